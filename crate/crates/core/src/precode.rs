//! Linear precoding under per-feed power limits, layered (two users per
//! beam) transmission and joint broadcast/multicast.
//!
//! A [`Precoder`] stores one row per stream and one column per feed, so the
//! complex amplitude of stream `s` at user `u` is `sum_n h[u, n] * w[s, n]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chanmodel::ChannelMatrix;
use crate::regions::{snd_max_sum_rate, unit_grid, LinkPair, DEFAULT_GRID_STEP};
use crate::{capacity, Error, Result};

/// Condition number above which a channel is rejected by [`zf_precoder`].
pub const SINGULAR_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    w: DMatrix<Complex64>,
    stream_power: Vec<f64>,
    layer_split: Option<Vec<f64>>,
}

impl Precoder {
    pub fn new(w: DMatrix<Complex64>, stream_power: Vec<f64>) -> Result<Self> {
        if w.nrows() != stream_power.len() {
            return Err(Error::invalid(format!(
                "{} streams but {} stream powers",
                w.nrows(),
                stream_power.len()
            )));
        }
        if stream_power.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid("stream powers must be finite and non-negative"));
        }
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("precoder has non-finite entries"));
        }
        Ok(Self {
            w,
            stream_power,
            layer_split: None,
        })
    }

    /// Unit stream powers.
    pub fn from_directions(w: DMatrix<Complex64>) -> Result<Self> {
        let n = w.nrows();
        Self::new(w, vec![1.0; n])
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    pub fn streams(&self) -> usize {
        self.w.nrows()
    }

    pub fn feeds(&self) -> usize {
        self.w.ncols()
    }

    pub fn stream_power(&self) -> &[f64] {
        &self.stream_power
    }

    pub fn layer_split(&self) -> Option<&[f64]> {
        self.layer_split.as_deref()
    }

    /// Weak-layer power fraction per stream for two-layer superposition.
    pub fn with_layer_split(mut self, split: Vec<f64>) -> Result<Self> {
        if split.len() != self.streams() {
            return Err(Error::invalid("one layer split per stream required"));
        }
        if split.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::invalid("layer split must lie in [0, 1]"));
        }
        self.layer_split = Some(split);
        Ok(self)
    }

    pub fn with_stream_power(mut self, stream_power: Vec<f64>) -> Result<Self> {
        let split = self.layer_split.take();
        let mut p = Precoder::new(self.w, stream_power)?;
        p.layer_split = split;
        self = p;
        Ok(self)
    }

    /// `||w_s||^2` per stream.
    pub fn stream_norms_sqr(&self) -> Vec<f64> {
        self.w
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Radiated power per feed, `sum_s |w[s, n]|^2 p_s`.
    pub fn feed_loads(&self) -> Vec<f64> {
        (0..self.feeds())
            .map(|n| {
                (0..self.streams())
                    .map(|s| self.w[(s, n)].norm_sqr() * self.stream_power[s])
                    .sum()
            })
            .collect()
    }

    pub fn max_feed_load(&self) -> f64 {
        self.feed_loads().into_iter().fold(0.0, f64::max)
    }

    /// Same total radiated power `total` shared equally between streams.
    pub fn equal_radiated_power(self, total: f64) -> Result<Self> {
        let norms = self.stream_norms_sqr();
        let share = total / self.streams() as f64;
        let p = norms.iter().map(|&n| if n > 0.0 { share / n } else { 0.0 }).collect();
        self.with_stream_power(p)
    }
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `h^H (h h^H + alpha I)^-1`, transposed into stream-by-feed layout.
fn regularized_inverse(h: &DMatrix<Complex64>, alpha: f64) -> Result<DMatrix<Complex64>> {
    let k = h.nrows();
    let gram = h * h.adjoint() + DMatrix::<Complex64>::identity(k, k) * Complex64::new(alpha, 0.0);
    let inv = gram.try_inverse().ok_or(Error::SingularChannel {
        cond: f64::INFINITY,
        limit: SINGULAR_CONDITION,
    })?;
    Ok((h.adjoint() * inv).transpose())
}

/// Zero-forcing precoder for the `K x N` channel of the selected users
/// (`K <= N`). Streams carry equal radiated power before per-feed scaling.
pub fn zf_precoder(h: &ChannelMatrix) -> Result<Precoder> {
    let m = h.matrix();
    if m.nrows() > m.ncols() {
        return Err(Error::invalid(format!(
            "zero forcing needs at most as many users ({}) as feeds ({})",
            m.nrows(),
            m.ncols()
        )));
    }
    let cond = condition_number(m);
    if !(cond <= SINGULAR_CONDITION) {
        return Err(Error::SingularChannel {
            cond,
            limit: SINGULAR_CONDITION,
        });
    }
    Precoder::from_directions(regularized_inverse(m, 0.0)?)?.equal_radiated_power(1.0)
}

/// Regularised zero forcing with `alpha = K * noise / p_total`.
pub fn rzf_precoder(h: &ChannelMatrix, noise: f64, p_total: f64) -> Result<Precoder> {
    if !(noise >= 0.0) || !(p_total > 0.0) {
        return Err(Error::invalid("noise must be >= 0 and total power > 0"));
    }
    let m = h.matrix();
    let alpha = m.nrows() as f64 * noise / p_total;
    Precoder::from_directions(regularized_inverse(m, alpha)?)?.equal_radiated_power(1.0)
}

/// Scale all stream powers by one factor so the most loaded feed radiates
/// exactly `p_feed`.
pub fn enforce_per_feed_power(pre: &Precoder, p_feed: f64) -> Result<Precoder> {
    if !(p_feed > 0.0 && p_feed.is_finite()) {
        return Err(Error::invalid("per-feed power limit must be positive"));
    }
    let max = pre.max_feed_load();
    if !(max > 0.0) {
        return Err(Error::invalid("precoder radiates no power"));
    }
    let scale = p_feed / max;
    let p = pre.stream_power.iter().map(|&x| x * scale).collect();
    pre.clone().with_stream_power(p)
}

/// Received power of every stream at every user.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrTable {
    received: DMatrix<f64>,
    noise: f64,
}

impl SinrTable {
    pub fn users(&self) -> usize {
        self.received.nrows()
    }

    pub fn streams(&self) -> usize {
        self.received.ncols()
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn received(&self, user: usize, stream: usize) -> f64 {
        self.received[(user, stream)]
    }

    pub fn total_received(&self, user: usize) -> f64 {
        self.received.row(user).sum()
    }

    /// Power at `user` from every stream except `stream`.
    pub fn interference(&self, user: usize, stream: usize) -> f64 {
        self.total_received(user) - self.received[(user, stream)]
    }

    pub fn sinr(&self, user: usize, stream: usize) -> f64 {
        self.received[(user, stream)] / (self.noise + self.interference(user, stream))
    }
}

pub fn sinr_table(h: &ChannelMatrix, pre: &Precoder, noise: f64) -> Result<SinrTable> {
    if h.n_count() != pre.feeds() {
        return Err(Error::invalid(format!(
            "channel has {} feeds, precoder {}",
            h.n_count(),
            pre.feeds()
        )));
    }
    if !(noise >= 0.0) {
        return Err(Error::invalid("noise must be non-negative"));
    }
    let amp = h.matrix() * pre.matrix().transpose();
    let received = DMatrix::from_fn(amp.nrows(), amp.ncols(), |u, s| {
        amp[(u, s)].norm_sqr() * pre.stream_power[s]
    });
    Ok(SinrTable { received, noise })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerDecoder {
    /// Strong user cancels the weak layer when it can, else treats it as noise.
    Sud,
    /// Both users decode non-uniquely; the pair sum rate is maximised over the
    /// resulting region.
    Snd,
}

impl std::str::FromStr for LayerDecoder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sud" => Ok(LayerDecoder::Sud),
            "snd" => Ok(LayerDecoder::Snd),
            other => Err(Error::invalid(format!("unknown layer decoder '{other}'"))),
        }
    }
}

/// Users sharing one precoded stream: the strong one decodes both layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamPair {
    pub strong: usize,
    pub weak: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRates {
    pub strong: f64,
    pub weak: f64,
    pub beta: f64,
}

impl PairRates {
    pub fn sum(&self) -> f64 {
        self.strong + self.weak
    }
}

/// Serving-stream power and residual interbeam interference seen by a user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamLink {
    pub q: f64,
    pub j: f64,
}

/// Two-layer rates for one stream at weak-layer fraction `beta`.
pub fn pair_rates(strong: StreamLink, weak: StreamLink, beta: f64, noise: f64, decoder: LayerDecoder) -> PairRates {
    let weak_rate = capacity(beta * weak.q / (noise + (1.0 - beta) * weak.q + weak.j));
    match decoder {
        LayerDecoder::Sud => {
            let sic = capacity(beta * strong.q / (noise + (1.0 - beta) * strong.q + strong.j));
            let strong_rate = if sic >= weak_rate - 1e-12 {
                capacity((1.0 - beta) * strong.q / (noise + strong.j))
            } else {
                capacity((1.0 - beta) * strong.q / (noise + beta * strong.q + strong.j))
            };
            PairRates {
                strong: strong_rate,
                weak: weak_rate,
                beta,
            }
        }
        LayerDecoder::Snd => {
            let ns = noise + strong.j;
            let nw = noise + weak.j;
            let link = LinkPair {
                s1: (1.0 - beta) * strong.q / ns,
                i1: beta * strong.q / ns,
                s2: beta * weak.q / nw,
                i2: (1.0 - beta) * weak.q / nw,
            };
            let (_, at) = snd_max_sum_rate(&link);
            PairRates {
                strong: at.r1,
                weak: at.r2,
                beta,
            }
        }
    }
}

/// Whether the strong user can decode the weak layer at the weak user's rate.
pub fn sic_feasible(strong: StreamLink, weak: StreamLink, beta: f64, noise: f64) -> bool {
    let weak_rate = capacity(beta * weak.q / (noise + (1.0 - beta) * weak.q + weak.j));
    let sic = capacity(beta * strong.q / (noise + (1.0 - beta) * strong.q + strong.j));
    sic >= weak_rate - 1e-12
}

/// Grid search over `beta` for the largest pair sum rate. Under `Sud` only
/// splits where the strong user can cancel the weak layer are admitted; the
/// first maximiser on the grid wins ties.
pub fn best_split(strong: StreamLink, weak: StreamLink, betas: &[f64], noise: f64, decoder: LayerDecoder) -> PairRates {
    let mut best: Option<PairRates> = None;
    for &beta in betas {
        if decoder == LayerDecoder::Sud && !sic_feasible(strong, weak, beta, noise) {
            continue;
        }
        let r = pair_rates(strong, weak, beta, noise, decoder);
        if best.is_none_or(|b| r.sum() > b.sum() + 1e-12) {
            best = Some(r);
        }
    }
    best.unwrap_or_else(|| pair_rates(strong, weak, 0.0, noise, decoder))
}

/// Serving power and interbeam residual of `user` on `stream`.
pub fn stream_link(table: &SinrTable, user: usize, stream: usize) -> StreamLink {
    StreamLink {
        q: table.received(user, stream),
        j: table.interference(user, stream),
    }
}

/// Rates of every (strong, weak) pair; pair `k` rides on stream `k` with the
/// precoder's layer split for that stream (0 when none is set).
pub fn layered_rates(
    h: &ChannelMatrix,
    pairs: &[BeamPair],
    pre: &Precoder,
    decoder: LayerDecoder,
    noise: f64,
) -> Result<Vec<PairRates>> {
    if pairs.len() != pre.streams() {
        return Err(Error::invalid(format!(
            "{} pairs for {} streams",
            pairs.len(),
            pre.streams()
        )));
    }
    let table = sinr_table(h, pre, noise)?;
    pairs
        .iter()
        .enumerate()
        .map(|(k, pair)| {
            let (s, w) = ordered_links(&table, pair, k)?;
            let beta = pre.layer_split().map_or(0.0, |b| b[k]);
            Ok(pair_rates(s, w, beta, noise, decoder))
        })
        .collect()
}

fn ordered_links(table: &SinrTable, pair: &BeamPair, k: usize) -> Result<(StreamLink, StreamLink)> {
    if pair.strong >= table.users() || pair.weak >= table.users() {
        return Err(Error::invalid("pair refers to an unknown user"));
    }
    let s = stream_link(table, pair.strong, k);
    let w = stream_link(table, pair.weak, k);
    if s.q < w.q {
        return Err(Error::invalid(format!(
            "pair on stream {k}: strong user {} has serving power {} below weak user {} ({})",
            pair.strong, s.q, pair.weak, w.q
        )));
    }
    Ok((s, w))
}

/// Like [`layered_rates`] but choosing each stream's split by [`best_split`].
/// Returns the rates; the chosen splits are in `PairRates::beta`.
pub fn layered_rates_best_split(
    h: &ChannelMatrix,
    pairs: &[BeamPair],
    pre: &Precoder,
    decoder: LayerDecoder,
    noise: f64,
    betas: &[f64],
) -> Result<Vec<PairRates>> {
    if pairs.len() != pre.streams() {
        return Err(Error::invalid("one pair per stream required"));
    }
    let table = sinr_table(h, pre, noise)?;
    pairs
        .iter()
        .enumerate()
        .map(|(k, pair)| {
            let (s, w) = ordered_links(&table, pair, k)?;
            Ok(best_split(s, w, betas, noise, decoder))
        })
        .collect()
}

/// Default split grid, step 0.02.
pub fn default_betas() -> Vec<f64> {
    unit_grid(DEFAULT_GRID_STEP).expect("static grid")
}

/// Reorders each pair so that the strong role goes to the user with the larger
/// serving-stream power under `pre`.
pub fn order_pairs_by_stream_power(h: &ChannelMatrix, pairs: &[BeamPair], pre: &Precoder) -> Result<Vec<BeamPair>> {
    let table = sinr_table(h, pre, 1.0)?;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if table.received(p.strong, k) >= table.received(p.weak, k) {
                *p
            } else {
                BeamPair {
                    strong: p.weak,
                    weak: p.strong,
                }
            }
        })
        .collect())
}

/// Stream directions for joint broadcast and multicast: stream 0 is common
/// to every user, stream `k + 1` serves group `k`.
///
/// Private streams zero-force the weakest member of each group. The common
/// stream is the normalised sum of every member's matched-filter direction.
pub fn broadcast_multicast_directions(h: &ChannelMatrix, groups: &[Vec<usize>]) -> Result<Precoder> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(Error::invalid("every multicast group needs a member"));
    }
    let reps: Vec<usize> = groups
        .iter()
        .map(|g| {
            *g.iter()
                .min_by(|&&a, &&b| h.row_norm_sqr(a).total_cmp(&h.row_norm_sqr(b)).then(a.cmp(&b)))
                .expect("non-empty group")
        })
        .collect();
    let private = zf_precoder(&h.select_rows(&reps))?;
    let n = h.n_count();
    let mut common = vec![Complex64::new(0.0, 0.0); n];
    for &u in groups.iter().flatten() {
        let norm = h.row_norm_sqr(u).sqrt();
        for (f, c) in common.iter_mut().enumerate() {
            *c += h.get(u, f).conj() / norm;
        }
    }
    let cn: f64 = common.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(cn > 0.0) {
        return Err(Error::invalid("common direction vanishes"));
    }
    let k = groups.len();
    let mut w = DMatrix::<Complex64>::zeros(k + 1, n);
    for f in 0..n {
        w[(0, f)] = common[f] / cn;
        for s in 0..k {
            w[(s + 1, f)] = private.matrix()[(s, f)];
        }
    }
    Precoder::from_directions(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastMulticastRates {
    pub common: f64,
    /// Per group, after cancelling the common stream.
    pub private: Vec<f64>,
}

impl BroadcastMulticastRates {
    pub fn sum(&self) -> f64 {
        self.common + self.private.iter().sum::<f64>()
    }
}

/// Allocates `common_fraction` of the radiated power to stream 0, splits the
/// rest equally over the private streams, enforces the per-feed limit and
/// evaluates rates.
pub fn broadcast_multicast_precoder(directions: &Precoder, common_fraction: f64, p_feed: f64) -> Result<Precoder> {
    if !(0.0..=1.0).contains(&common_fraction) {
        return Err(Error::invalid("common fraction must lie in [0, 1]"));
    }
    let k = directions.streams() - 1;
    let norms = directions.stream_norms_sqr();
    let mut p = Vec::with_capacity(k + 1);
    p.push(common_fraction / norms[0]);
    for &ns in &norms[1..=k] {
        p.push(if ns > 0.0 {
            (1.0 - common_fraction) / k as f64 / ns
        } else {
            0.0
        });
    }
    enforce_per_feed_power(&directions.clone().with_stream_power(p)?, p_feed)
}

/// Common rate is limited by the worst user; each group's private rate by its
/// worst member after cancelling the common stream.
pub fn broadcast_multicast_rates(
    h: &ChannelMatrix,
    pre: &Precoder,
    groups: &[Vec<usize>],
    noise: f64,
) -> Result<BroadcastMulticastRates> {
    if pre.streams() != groups.len() + 1 {
        return Err(Error::invalid(
            "precoder must have one common plus one stream per group",
        ));
    }
    let t = sinr_table(h, pre, noise)?;
    let mut common = f64::INFINITY;
    let mut private = Vec::with_capacity(groups.len());
    for (k, g) in groups.iter().enumerate() {
        let mut worst = f64::INFINITY;
        for &u in g {
            let privates = t.total_received(u) - t.received(u, 0);
            common = common.min(capacity(t.received(u, 0) / (noise + privates)));
            let own = t.received(u, k + 1);
            worst = worst.min(capacity(own / (noise + privates - own)));
        }
        private.push(worst);
    }
    Ok(BroadcastMulticastRates { common, private })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeederScheme {
    SingleLayer,
    Ldm,
    BroadcastMulticast,
}

impl FeederScheme {
    pub const ALL: [FeederScheme; 3] = [
        FeederScheme::SingleLayer,
        FeederScheme::Ldm,
        FeederScheme::BroadcastMulticast,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FeederScheme::SingleLayer => "single_layer",
            FeederScheme::Ldm => "ldm",
            FeederScheme::BroadcastMulticast => "broadcast_multicast",
        }
    }

    /// Bandwidth multiple of `B`.
    pub fn multiplier(self, k: u64) -> u64 {
        match self {
            FeederScheme::SingleLayer => k,
            FeederScheme::Ldm => 2 * k,
            FeederScheme::BroadcastMulticast => 2 * (k + 1),
        }
    }
}

impl std::str::FromStr for FeederScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FeederScheme::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown feeder scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeederPlan {
    pub scheme: FeederScheme,
    pub k: u64,
    pub b: f64,
    pub total_hz: f64,
}

/// Feeder-link bandwidth: `BK`, `2BK` or `2B(K+1)`.
pub fn feeder_bandwidth(scheme: FeederScheme, k: u64, b: f64) -> Result<FeederPlan> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid("user bandwidth must be positive"));
    }
    Ok(FeederPlan {
        scheme,
        k,
        b,
        total_hz: b * scheme.multiplier(k) as f64,
    })
}
