//! Monte Carlo comparison of forward-link transmission schemes.
//!
//! A drop places users in every beam, builds the channel once and evaluates
//! each scheme (and scheduler) on that same geometry. Drop `i` uses a seed
//! derived from the configured seed and `i` only, so results do not depend
//! on execution order or thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chanmodel::{
    build_channel_with_feeds, drop_users, link_metrics, place_beams, BeamLayout, BeamPattern, ChannelMatrix,
    LinkParams, Reuse, TerminalClasses, UserTerminal,
};
use crate::precode::{
    broadcast_multicast_directions, broadcast_multicast_precoder, broadcast_multicast_rates, enforce_per_feed_power,
    layered_rates_best_split, order_pairs_by_stream_power, rzf_precoder, sinr_table, zf_precoder, LayerDecoder,
    PairRates, Precoder,
};
use crate::regions::unit_grid;
use crate::rng::{derive_seed, streams};
use crate::sched::{
    brute_force_pairing, group_min_euclidean, pair_users_weighted, OracleResult, PairingStrategy, Schedule,
};
use crate::{capacity, Error, Result};

/// Sub-seed retries of a drop whose channel is singular before it is skipped.
pub const MAX_SINGULAR_RETRIES: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    FourColor,
    SingleLayerPrecoding,
    MultilayerNoma,
    BroadcastMulticast,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::FourColor,
        Scheme::SingleLayerPrecoding,
        Scheme::MultilayerNoma,
        Scheme::BroadcastMulticast,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::FourColor => "four_color",
            Scheme::SingleLayerPrecoding => "single_layer_precoding",
            Scheme::MultilayerNoma => "multilayer_noma",
            Scheme::BroadcastMulticast => "broadcast_multicast",
        }
    }

    pub fn uses_scheduler(self) -> bool {
        self == Scheme::MultilayerNoma
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderKind {
    Zf,
    /// Regularised zero forcing with `alpha = K / (N p_feed)`.
    Rzf,
}

/// Whose channel row stands for a two-layer beam in the precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRow {
    /// The weak user, who cannot cancel interbeam interference.
    Weak,
    /// The strong user; the weak user absorbs the residual.
    Strong,
}

/// Channel the schedulers see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingGain {
    /// Raw channel; a user's gain is its serving-feed power.
    Serving,
    /// Channel after a reference precoder aimed at the beam centres; a user's
    /// gain is the power it receives from its beam's stream.
    PostPrecoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub k: usize,
    pub n: usize,
    pub users_per_beam: usize,
    pub p_feed_w: f64,
    pub obo_db: f64,
    pub bandwidth_hz: f64,
    pub noise_ref_db: f64,
    pub g_max_db: f64,
    pub theta_3db_deg: f64,
    pub spacing_deg: f64,
    /// Frequency reuse of the `four_color` baseline.
    pub reuse: Reuse,
    pub classes: TerminalClasses,
    pub schemes: Vec<Scheme>,
    pub schedulers: Vec<PairingStrategy>,
    pub decoder: LayerDecoder,
    pub precoder: PrecoderKind,
    pub pairing_gain: PairingGain,
    pub pair_row: PairRow,
    pub collinear_weight: f64,
    pub beta_step: f64,
    /// Common-stream power share; `None` sweeps `[0, 1]` in steps of 0.05 and
    /// keeps the best per slot.
    pub common_fraction: Option<f64>,
    pub drops: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            k: 19,
            n: 19,
            users_per_beam: 2,
            p_feed_w: 55.0,
            obo_db: 5.0,
            bandwidth_hz: 500e6,
            noise_ref_db: 51.4,
            g_max_db: 52.0,
            theta_3db_deg: 0.2,
            spacing_deg: 0.4,
            reuse: Reuse::FourColor,
            classes: TerminalClasses::default(),
            schemes: Scheme::ALL.to_vec(),
            schedulers: vec![PairingStrategy::MinGainDiff, PairingStrategy::MaxGainDiff],
            decoder: LayerDecoder::Snd,
            precoder: PrecoderKind::Zf,
            pairing_gain: PairingGain::PostPrecoding,
            pair_row: PairRow::Weak,
            collinear_weight: crate::sched::DEFAULT_COLLINEAR_WEIGHT,
            beta_step: crate::regions::DEFAULT_GRID_STEP,
            common_fraction: None,
            drops: 100,
            seed: 1,
            threads: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.n < self.k {
            return bad(format!("n ({}) must be at least k ({})", self.n, self.k));
        }
        if self.drops == 0 {
            return bad("drops must be at least 1".into());
        }
        if self.users_per_beam == 0 {
            return bad("users_per_beam must be at least 1".into());
        }
        let paired = self
            .schemes
            .iter()
            .any(|s| matches!(s, Scheme::MultilayerNoma | Scheme::BroadcastMulticast));
        if paired && !self.users_per_beam.is_multiple_of(2) {
            return bad("multilayer and multicast schemes need an even users_per_beam".into());
        }
        if self.schemes.iter().any(|s| s.uses_scheduler()) && self.schedulers.is_empty() {
            return bad("at least one scheduler is required".into());
        }
        if !(self.spacing_deg > 0.0) {
            return bad("spacing_deg must be positive".into());
        }
        if let Some(cf) = self.common_fraction {
            if !(0.0..=1.0).contains(&cf) {
                return bad("common_fraction must lie in [0, 1]".into());
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        unit_grid(self.beta_step).map_err(|e| Error::Config(e.to_string()))?;
        self.link().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.pattern().map(|_| ()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn pattern(&self) -> Result<BeamPattern> {
        BeamPattern::new(self.g_max_db, self.theta_3db_deg.to_radians())
    }

    pub fn link(&self) -> LinkParams {
        LinkParams {
            p_feed_sat_w: self.p_feed_w,
            obo_db: self.obo_db,
            noise_ref_db: self.noise_ref_db,
            bandwidth_hz: self.bandwidth_hz,
        }
    }

    /// Every (scheme, scheduler) combination evaluated per drop. Schemes that
    /// need no scheduler appear once.
    pub fn combos(&self) -> Vec<(Scheme, Option<PairingStrategy>)> {
        let mut out = Vec::new();
        for &s in &self.schemes {
            if s.uses_scheduler() {
                out.extend(self.schedulers.iter().map(|&p| (s, Some(p))));
            } else {
                out.push((s, None));
            }
        }
        out
    }
}

/// Precoder for the selected rows, scaled to the per-feed limit.
pub fn slot_precoder(cfg: &SimConfig, h: &ChannelMatrix) -> Result<Precoder> {
    let p = cfg.link().p_feed_eff();
    let pre = match cfg.precoder {
        PrecoderKind::Zf => zf_precoder(h)?,
        PrecoderKind::Rzf => rzf_precoder(h, 1.0, h.n_count() as f64 * p)?,
    };
    enforce_per_feed_power(&pre, p)
}

/// Geometry and channel of one drop.
#[derive(Debug, Clone)]
pub struct DropInstance {
    pub seed: u64,
    pub beams: BeamLayout,
    pub feeds: Vec<[f64; 2]>,
    pub users: Vec<UserTerminal>,
    pub h: ChannelMatrix,
    /// User ids per beam.
    pub candidates: Vec<Vec<usize>>,
}

/// Beams sit on the first `k` cells of an `n`-cell feed lattice.
pub fn build_drop(cfg: &SimConfig, seed: u64) -> Result<DropInstance> {
    cfg.validate()?;
    let spacing = cfg.spacing_deg.to_radians();
    let feeds = place_beams(cfg.n, spacing)?.centers;
    let beams = place_beams(cfg.k, spacing)?.with_reuse(cfg.reuse);
    let pattern = cfg.pattern()?;
    let users = drop_users(&beams, &pattern, cfg.users_per_beam, &cfg.classes, seed)?;
    let h = build_channel_with_feeds(&feeds, &users, &pattern, &cfg.link(), seed)?;
    let mut candidates = vec![Vec::new(); cfg.k];
    for u in &users {
        candidates[u.beam_id].push(u.id);
    }
    Ok(DropInstance {
        seed,
        beams,
        feeds,
        users,
        h,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub scheme: Scheme,
    pub scheduler: Option<PairingStrategy>,
    /// Indexed by user id, b/s.
    pub per_user_bps: Vec<f64>,
    pub sum_bps: f64,
    pub jain: f64,
    pub slots: usize,
}

impl DropResult {
    fn new(scheme: Scheme, scheduler: Option<PairingStrategy>, per_user_bps: Vec<f64>, slots: usize) -> Result<Self> {
        let jain = jain_fairness(&per_user_bps)?;
        Ok(Self {
            scheme,
            scheduler,
            sum_bps: per_user_bps.iter().sum(),
            per_user_bps,
            jain,
            slots,
        })
    }

    pub fn scheduler_tag(&self) -> &'static str {
        self.scheduler.map_or("none", PairingStrategy::tag)
    }
}

/// `(sum r)^2 / (n sum r^2)`.
pub fn jain_fairness(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::invalid("no rates"));
    }
    if rates.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::invalid("rates must be finite and non-negative"));
    }
    let s: f64 = rates.iter().sum();
    let s2: f64 = rates.iter().map(|r| r * r).sum();
    if s2 == 0.0 {
        return Err(Error::invalid("all rates are zero"));
    }
    Ok((s * s / (rates.len() as f64 * s2)).min(1.0))
}

fn four_color(cfg: &SimConfig, d: &DropInstance) -> Result<DropResult> {
    let p = cfg.link().p_feed_eff();
    let powers = vec![p; cfg.k];
    let assignment: Vec<usize> = d.users.iter().map(|u| u.beam_id).collect();
    let m = link_metrics(&d.h, &powers, &assignment, &d.beams.colors())?;
    let slots = cfg.users_per_beam;
    let b = cfg.bandwidth_hz * d.beams.reuse.bandwidth_fraction();
    let rates = m
        .iter()
        .map(|l| b * capacity(l.snr / (1.0 + l.inr)) / slots as f64)
        .collect();
    DropResult::new(Scheme::FourColor, None, rates, slots)
}

/// Slot `j` serves the `j`-th strongest candidate of every beam.
fn single_layer(cfg: &SimConfig, d: &DropInstance) -> Result<DropResult> {
    let slots = cfg.users_per_beam;
    let ranked: Vec<Vec<usize>> = d
        .candidates
        .iter()
        .enumerate()
        .map(|(b, c)| {
            let mut v = c.clone();
            v.sort_by(|&x, &y| d.h.power(y, b).total_cmp(&d.h.power(x, b)).then(x.cmp(&y)));
            v
        })
        .collect();
    let mut rates = vec![0.0; d.users.len()];
    for j in 0..slots {
        let sel: Vec<usize> = ranked.iter().map(|r| r[j]).collect();
        let hs = d.h.select_rows(&sel);
        let pre = slot_precoder(cfg, &hs)?;
        let t = sinr_table(&hs, &pre, 1.0)?;
        for (i, &u) in sel.iter().enumerate() {
            rates[u] = cfg.bandwidth_hz * capacity(t.sinr(i, i)) / slots as f64;
        }
    }
    DropResult::new(Scheme::SingleLayerPrecoding, None, rates, slots)
}

/// Layered rates of every scheduled pair (b/s/Hz, before time sharing), by
/// slot then beam.
pub fn multilayer_pair_rates(
    cfg: &SimConfig,
    h: &ChannelMatrix,
    schedule: &Schedule,
    decoder: LayerDecoder,
) -> Result<Vec<Vec<(crate::precode::BeamPair, PairRates)>>> {
    let betas = unit_grid(cfg.beta_step)?;
    (0..schedule.slots())
        .map(|slot| {
            let pairs = schedule
                .pairs_in_slot(slot)
                .ok_or_else(|| Error::invalid(format!("slot {slot} has an unpaired user")))?;
            let rows: Vec<usize> = pairs
                .iter()
                .map(|q| match cfg.pair_row {
                    PairRow::Weak => q.weak,
                    PairRow::Strong => q.strong,
                })
                .collect();
            let pre = slot_precoder(cfg, &h.select_rows(&rows))?;
            let pairs = order_pairs_by_stream_power(h, &pairs, &pre)?;
            let r = layered_rates_best_split(h, &pairs, &pre, decoder, 1.0, &betas)?;
            Ok(pairs.into_iter().zip(r).collect())
        })
        .collect()
}

/// `h W^T` under the slot precoder designed for virtual 0 dB terminals at the
/// beam centres. Column `b` is what each user receives from beam `b`'s stream.
pub fn post_precoding_channel(cfg: &SimConfig, d: &DropInstance) -> Result<ChannelMatrix> {
    let centres: Vec<UserTerminal> = d
        .beams
        .centers
        .iter()
        .enumerate()
        .map(|(b, &direction)| UserTerminal {
            id: b,
            direction,
            beam_id: b,
            rx_gain_db: 0.0,
        })
        .collect();
    let reference = build_channel_with_feeds(&d.feeds, &centres, &cfg.pattern()?, &cfg.link(), d.seed)?;
    let pre = slot_precoder(cfg, &reference)?;
    let mut w = pre.matrix().transpose();
    for (s, p) in pre.stream_power().iter().enumerate() {
        w.column_mut(s).scale_mut(p.sqrt());
    }
    ChannelMatrix::new(d.h.matrix() * w)
}

/// Channel the schedulers rank and pair users on.
pub fn pairing_channel(cfg: &SimConfig, d: &DropInstance) -> Result<ChannelMatrix> {
    match cfg.pairing_gain {
        PairingGain::Serving => Ok(d.h.clone()),
        PairingGain::PostPrecoding => post_precoding_channel(cfg, d),
    }
}

pub fn schedule_drop(cfg: &SimConfig, d: &DropInstance, scheduler: PairingStrategy) -> Result<Schedule> {
    let h = pairing_channel(cfg, d)?;
    pair_users_weighted(&h, &d.candidates, scheduler, d.seed, cfg.collinear_weight)
}

/// Exhaustive pairing search scored by the multilayer sum rate. Pairs are
/// ordered into slots on the same channel as the heuristics, so every
/// heuristic schedule is among the candidates.
pub fn oracle_drop(cfg: &SimConfig, d: &DropInstance) -> Result<OracleResult> {
    let ranked = pairing_channel(cfg, d)?;
    brute_force_pairing(&ranked, &d.candidates, |s| {
        multilayer_sum_bps(cfg, &d.h, s, cfg.decoder)
    })
}

/// Sum over all users of the per-user rate, in b/s.
pub fn multilayer_sum_bps(
    cfg: &SimConfig,
    h: &ChannelMatrix,
    schedule: &Schedule,
    decoder: LayerDecoder,
) -> Result<f64> {
    let slots = schedule.slots() as f64;
    let rates = multilayer_pair_rates(cfg, h, schedule, decoder)?;
    Ok(rates.iter().flatten().map(|(_, r)| r.sum()).sum::<f64>() * cfg.bandwidth_hz / slots)
}

fn multilayer(cfg: &SimConfig, d: &DropInstance, scheduler: PairingStrategy) -> Result<DropResult> {
    let schedule = schedule_drop(cfg, d, scheduler)?;
    let slots = schedule.slots();
    let mut rates = vec![0.0; d.users.len()];
    for (pair, r) in multilayer_pair_rates(cfg, &d.h, &schedule, cfg.decoder)?
        .into_iter()
        .flatten()
    {
        rates[pair.strong] = cfg.bandwidth_hz * r.strong / slots as f64;
        rates[pair.weak] = cfg.bandwidth_hz * r.weak / slots as f64;
    }
    DropResult::new(Scheme::MultilayerNoma, Some(scheduler), rates, slots)
}

/// Groups of two per beam share one private stream; a group's private rate is
/// split evenly between its members and the common rate evenly over the slot.
fn broadcast_multicast(cfg: &SimConfig, d: &DropInstance) -> Result<DropResult> {
    let p = cfg.link().p_feed_eff();
    let groups = group_min_euclidean(&d.h, &d.candidates, 2)?;
    let slots = groups[0].len();
    let fractions = match cfg.common_fraction {
        Some(cf) => vec![cf],
        None => unit_grid(0.05)?,
    };
    let mut rates = vec![0.0; d.users.len()];
    for slot in 0..slots {
        let gs: Vec<Vec<usize>> = groups.iter().map(|g| g[slot].clone()).collect();
        let dirs = broadcast_multicast_directions(&d.h, &gs)?;
        let mut best = None;
        for &cf in &fractions {
            let pre = broadcast_multicast_precoder(&dirs, cf, p)?;
            let r = broadcast_multicast_rates(&d.h, &pre, &gs, 1.0)?;
            if best
                .as_ref()
                .is_none_or(|b: &crate::precode::BroadcastMulticastRates| r.sum() > b.sum() + 1e-12)
            {
                best = Some(r);
            }
        }
        let best = best.expect("non-empty fraction grid");
        let members: usize = gs.iter().map(Vec::len).sum();
        for (g, priv_rate) in gs.iter().zip(&best.private) {
            for &u in g {
                let r = priv_rate / g.len() as f64 + best.common / members as f64;
                rates[u] = cfg.bandwidth_hz * r / slots as f64;
            }
        }
    }
    DropResult::new(Scheme::BroadcastMulticast, None, rates, slots)
}

/// Evaluates one scheme on an existing drop. `scheduler` is only used by
/// `multilayer_noma` (default `min_gain_diff`).
pub fn evaluate(
    cfg: &SimConfig,
    d: &DropInstance,
    scheme: Scheme,
    scheduler: Option<PairingStrategy>,
) -> Result<DropResult> {
    match scheme {
        Scheme::FourColor => four_color(cfg, d),
        Scheme::SingleLayerPrecoding => single_layer(cfg, d),
        Scheme::MultilayerNoma => multilayer(cfg, d, scheduler.unwrap_or(PairingStrategy::MinGainDiff)),
        Scheme::BroadcastMulticast => broadcast_multicast(cfg, d),
    }
}

pub fn run_drop(cfg: &SimConfig, scheme: Scheme, scheduler: PairingStrategy, seed: u64) -> Result<DropResult> {
    evaluate(cfg, &build_drop(cfg, seed)?, scheme, Some(scheduler))
}

pub fn drop_seed(cfg_seed: u64, index: usize) -> u64 {
    derive_seed(cfg_seed, streams::DROP + index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropRecord {
    pub index: usize,
    /// Seed that produced a non-singular drop.
    pub seed: u64,
    pub retries: u64,
    /// One per [`SimConfig::combos`] entry, in that order.
    pub results: Vec<DropResult>,
}

/// Runs all combinations on drop `index`, retrying singular channels with
/// sub-seeds. `Ok(None)` means the drop was skipped.
pub fn run_indexed_drop(cfg: &SimConfig, index: usize) -> Result<Option<DropRecord>> {
    let base = drop_seed(cfg.seed, index);
    let combos = cfg.combos();
    for attempt in 0..=MAX_SINGULAR_RETRIES {
        let seed = if attempt == 0 { base } else { derive_seed(base, attempt) };
        let outcome = build_drop(cfg, seed).and_then(|d| {
            combos
                .iter()
                .map(|&(s, p)| evaluate(cfg, &d, s, p))
                .collect::<Result<Vec<_>>>()
        });
        match outcome {
            Ok(results) => {
                return Ok(Some(DropRecord {
                    index,
                    seed,
                    retries: attempt,
                    results,
                }))
            }
            Err(Error::SingularChannel { cond, .. }) => {
                log::warn!("drop {index} attempt {attempt}: singular channel (cond {cond:.3e}), retrying");
            }
            Err(e) => return Err(e),
        }
    }
    log::warn!("drop {index} skipped after {MAX_SINGULAR_RETRIES} retries");
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub scheduler: Option<PairingStrategy>,
    pub drops: usize,
    pub mean_bps: f64,
    pub median_bps: f64,
    pub p10_bps: f64,
    pub mean_jain: f64,
    /// Relative to `four_color`, percent; `None` without that baseline.
    pub gain_vs_four_color_pct: Option<f64>,
}

impl SummaryRow {
    pub fn scheduler_tag(&self) -> &'static str {
        self.scheduler.map_or("none", PairingStrategy::tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<SummaryRow>,
    pub drops: Vec<DropRecord>,
    pub skipped: usize,
}

impl Comparison {
    /// Per-drop sum rates of one combination, in drop order.
    pub fn sums(&self, scheme: Scheme, scheduler: Option<PairingStrategy>) -> Vec<f64> {
        self.drops
            .iter()
            .filter_map(|d| {
                d.results
                    .iter()
                    .find(|r| r.scheme == scheme && (r.scheduler == scheduler || !scheme.uses_scheduler()))
                    .map(|r| r.sum_bps)
            })
            .collect()
    }

    pub fn row(&self, scheme: Scheme, scheduler: Option<PairingStrategy>) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && (r.scheduler == scheduler || !scheme.uses_scheduler()))
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(cfg: &SimConfig, drops: &[DropRecord]) -> Vec<SummaryRow> {
    let combos = cfg.combos();
    let mut rows: Vec<SummaryRow> = combos
        .iter()
        .enumerate()
        .map(|(i, &(scheme, scheduler))| {
            let mut sums: Vec<f64> = drops.iter().map(|d| d.results[i].sum_bps).collect();
            let n = sums.len();
            let mean = sums.iter().sum::<f64>() / n as f64;
            let mean_jain = drops.iter().map(|d| d.results[i].jain).sum::<f64>() / n as f64;
            sums.sort_by(f64::total_cmp);
            SummaryRow {
                scheme,
                scheduler,
                drops: n,
                mean_bps: mean,
                median_bps: quantile(&sums, 0.5),
                p10_bps: quantile(&sums, 0.1),
                mean_jain,
                gain_vs_four_color_pct: None,
            }
        })
        .collect();
    if let Some(base) = rows.iter().find(|r| r.scheme == Scheme::FourColor).map(|r| r.mean_bps) {
        for r in &mut rows {
            r.gain_vs_four_color_pct = Some(100.0 * (r.mean_bps / base - 1.0));
        }
    }
    rows
}

/// Runs `cfg.drops` drops (in parallel) and aggregates them in drop order.
pub fn compare_schemes(cfg: &SimConfig) -> Result<Comparison> {
    cfg.validate()?;
    let work = || -> Result<Vec<Option<DropRecord>>> {
        (0..cfg.drops)
            .into_par_iter()
            .map(|i| run_indexed_drop(cfg, i))
            .collect()
    };
    let records = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let skipped = records.iter().filter(|r| r.is_none()).count();
    let drops: Vec<DropRecord> = records.into_iter().flatten().collect();
    if drops.is_empty() {
        return Err(Error::invalid("every drop was skipped"));
    }
    Ok(Comparison {
        rows: summarize(cfg, &drops),
        drops,
        skipped,
    })
}
