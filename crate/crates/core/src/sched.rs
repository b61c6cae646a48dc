//! Intra-beam user pairing and grouping.
//!
//! Candidates are pre-assigned to beams; beam `b` is served by channel
//! column `b`, whose power is the "serving gain" used for ordering.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chanmodel::ChannelMatrix;
use crate::precode::BeamPair;
use crate::rng::{stream_rng, streams};
use crate::{linear_to_db, Error, Result};

/// Weight of the gain difference (per dB) in the collinearity score.
pub const DEFAULT_COLLINEAR_WEIGHT: f64 = 0.1;

pub const MAX_ORACLE_CANDIDATES: usize = 10;
pub const MAX_ORACLE_BEAMS: usize = 4;
/// Upper bound on schedules the oracle will evaluate.
pub const MAX_ORACLE_EVALUATIONS: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingStrategy {
    MinGainDiff,
    MaxGainDiff,
    CollinearMinGain,
    Random,
}

impl PairingStrategy {
    pub const ALL: [PairingStrategy; 4] = [
        PairingStrategy::MinGainDiff,
        PairingStrategy::MaxGainDiff,
        PairingStrategy::CollinearMinGain,
        PairingStrategy::Random,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PairingStrategy::MinGainDiff => "min_gain_diff",
            PairingStrategy::MaxGainDiff => "max_gain_diff",
            PairingStrategy::CollinearMinGain => "collinear_min_gain",
            PairingStrategy::Random => "random",
        }
    }
}

impl std::str::FromStr for PairingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairingStrategy::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown pairing strategy '{s}'")))
    }
}

/// One transmission: a (strong, weak) pair or a lone user (`weak == None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub beam: usize,
    pub slot: usize,
    pub strong: usize,
    pub weak: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub strategy: String,
    /// Sorted by (slot, beam).
    pub entries: Vec<ScheduleEntry>,
}

impl Schedule {
    fn from_beams(strategy: &str, beams: Vec<Vec<ScheduleEntry>>) -> Self {
        let mut entries: Vec<ScheduleEntry> = beams.into_iter().flatten().collect();
        entries.sort_by_key(|e| (e.slot, e.beam));
        Self {
            strategy: strategy.to_string(),
            entries,
        }
    }

    pub fn slots(&self) -> usize {
        self.entries.iter().map(|e| e.slot + 1).max().unwrap_or(0)
    }

    pub fn slot(&self, slot: usize) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.iter().filter(move |e| e.slot == slot)
    }

    /// Pairs of a slot in beam order; `None` if any beam in the slot has a
    /// lone user.
    pub fn pairs_in_slot(&self, slot: usize) -> Option<Vec<BeamPair>> {
        self.slot(slot)
            .map(|e| {
                e.weak.map(|w| BeamPair {
                    strong: e.strong,
                    weak: w,
                })
            })
            .collect()
    }

    /// Every scheduled user, in entry order.
    pub fn users(&self) -> Vec<usize> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::once(e.strong).chain(e.weak))
            .collect()
    }

    pub fn pair_count(&self) -> usize {
        self.entries.iter().filter(|e| e.weak.is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingScore {
    pub collinearity: f64,
    pub gain_diff_db: f64,
}

impl PairingScore {
    pub fn composite(&self, weight: f64) -> f64 {
        self.collinearity - weight * self.gain_diff_db
    }
}

/// Serving-beam gain of `user` in dB.
pub fn serving_gain_db(h: &ChannelMatrix, user: usize, beam: usize) -> f64 {
    linear_to_db(h.power(user, beam))
}

/// `|<h_a, h_b>| / (|h_a| |h_b|)`, clamped to `[0, 1]`.
pub fn collinearity(h: &ChannelMatrix, a: usize, b: usize) -> f64 {
    let m = h.matrix();
    let inner: num_complex::Complex64 = m.row(a).iter().zip(m.row(b).iter()).map(|(x, y)| x * y.conj()).sum();
    (inner.norm() / (h.row_norm_sqr(a) * h.row_norm_sqr(b)).sqrt()).clamp(0.0, 1.0)
}

pub fn pairing_score(h: &ChannelMatrix, a: usize, b: usize, beam: usize) -> PairingScore {
    PairingScore {
        collinearity: collinearity(h, a, b),
        gain_diff_db: (serving_gain_db(h, a, beam) - serving_gain_db(h, b, beam)).abs(),
    }
}

fn check_inputs(h: &ChannelMatrix, candidates: &[Vec<usize>]) -> Result<()> {
    if candidates.len() > h.n_count() {
        return Err(Error::invalid(format!(
            "{} beams but only {} channel columns",
            candidates.len(),
            h.n_count()
        )));
    }
    let mut seen = vec![false; h.u_count()];
    for &u in candidates.iter().flatten() {
        if u >= h.u_count() {
            return Err(Error::invalid(format!("candidate {u} has no channel row")));
        }
        if std::mem::replace(&mut seen[u], true) {
            return Err(Error::invalid(format!("candidate {u} listed twice")));
        }
    }
    Ok(())
}

/// Orders a pair so the first user has the larger serving gain (lower index
/// on ties).
fn order_pair(gain: &impl Fn(usize) -> f64, a: usize, b: usize) -> (usize, usize) {
    let (ga, gb) = (gain(a), gain(b));
    if ga > gb || (ga == gb && a < b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Turns a beam's pairing into slot entries: pairs by descending strong gain,
/// a lone user (if any) last.
fn beam_entries(
    beam: usize,
    pairs: &[(usize, usize)],
    single: Option<usize>,
    gain: &impl Fn(usize) -> f64,
) -> Vec<ScheduleEntry> {
    let mut ordered: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| order_pair(gain, a, b)).collect();
    ordered.sort_by(|x, y| gain(y.0).total_cmp(&gain(x.0)).then(x.0.cmp(&y.0)));
    let mut out: Vec<ScheduleEntry> = ordered
        .into_iter()
        .enumerate()
        .map(|(slot, (s, w))| ScheduleEntry {
            beam,
            slot,
            strong: s,
            weak: Some(w),
        })
        .collect();
    if let Some(u) = single {
        out.push(ScheduleEntry {
            beam,
            slot: out.len(),
            strong: u,
            weak: None,
        });
    }
    out
}

/// Candidates sorted by descending gain, index ascending on ties.
fn by_gain(cands: &[usize], gain: &impl Fn(usize) -> f64) -> Vec<usize> {
    let mut v = cands.to_vec();
    v.sort_by(|&a, &b| gain(b).total_cmp(&gain(a)).then(a.cmp(&b)));
    v
}

/// Repeatedly takes the best-scoring remaining pair.
fn greedy_pairs(cands: &[usize], score: impl Fn(usize, usize) -> f64) -> (Vec<(usize, usize)>, Option<usize>) {
    let mut left: Vec<usize> = cands.to_vec();
    left.sort_unstable();
    let mut pairs = Vec::new();
    while left.len() >= 2 {
        let mut best = (0, 1, f64::NEG_INFINITY);
        for i in 0..left.len() {
            for j in i + 1..left.len() {
                let s = score(left[i], left[j]);
                if s > best.2 {
                    best = (i, j, s);
                }
            }
        }
        let (i, j, _) = best;
        pairs.push((left[i], left[j]));
        left.remove(j);
        left.remove(i);
    }
    (pairs, left.pop())
}

/// Pairs the candidates of every beam.
///
/// * `min_gain_diff`: neighbours in gain order, which minimises the total gain
///   difference over all pairings.
/// * `max_gain_diff`: strongest with weakest, inward, which maximises it.
/// * `collinear_min_gain`: greedy on `collinearity - weight * gain_diff_db`.
/// * `random`: uniform shuffle keyed by `seed` and the beam index.
pub fn pair_users_weighted(
    h: &ChannelMatrix,
    candidates: &[Vec<usize>],
    strategy: PairingStrategy,
    seed: u64,
    collinear_weight: f64,
) -> Result<Schedule> {
    check_inputs(h, candidates)?;
    let mut beams = Vec::with_capacity(candidates.len());
    for (beam, cands) in candidates.iter().enumerate() {
        if cands.len() < 2 {
            return Err(Error::InsufficientUsers {
                needed: 2,
                got: cands.len(),
            });
        }
        let gain = |u: usize| h.power(u, beam);
        let (pairs, single) = match strategy {
            PairingStrategy::MinGainDiff => {
                let s = by_gain(cands, &gain);
                let pairs = s.chunks_exact(2).map(|c| (c[0], c[1])).collect();
                (pairs, (s.len() % 2 == 1).then(|| s[s.len() - 1]))
            }
            PairingStrategy::MaxGainDiff => {
                let s = by_gain(cands, &gain);
                let half = s.len() / 2;
                let pairs = (0..half).map(|i| (s[i], s[s.len() - 1 - i])).collect();
                (pairs, (s.len() % 2 == 1).then(|| s[half]))
            }
            PairingStrategy::CollinearMinGain => {
                greedy_pairs(cands, |a, b| pairing_score(h, a, b, beam).composite(collinear_weight))
            }
            PairingStrategy::Random => {
                let mut s = cands.to_vec();
                s.sort_unstable();
                let mut rng = stream_rng(seed, streams::PAIRING.wrapping_add((beam as u64) << 8));
                s.shuffle(&mut rng);
                let pairs = s.chunks_exact(2).map(|c| (c[0], c[1])).collect();
                (pairs, (s.len() % 2 == 1).then(|| s[s.len() - 1]))
            }
        };
        beams.push(beam_entries(beam, &pairs, single, &gain));
    }
    Ok(Schedule::from_beams(strategy.tag(), beams))
}

pub fn pair_users(
    h: &ChannelMatrix,
    candidates: &[Vec<usize>],
    strategy: PairingStrategy,
    seed: u64,
) -> Result<Schedule> {
    pair_users_weighted(h, candidates, strategy, seed, DEFAULT_COLLINEAR_WEIGHT)
}

/// Phase-invariant distance between unit-normalised channel rows,
/// `sqrt(2 - 2 |<a, b>| / (|a| |b|))`.
pub fn channel_distance(h: &ChannelMatrix, a: usize, b: usize) -> f64 {
    (2.0 - 2.0 * collinearity(h, a, b)).max(0.0).sqrt()
}

/// Greedy grouping by channel-direction distance. Each group is seeded with
/// the closest remaining pair and grown with the candidate nearest (summed
/// distance) to the group. Candidates left over after the last full group
/// form a final smaller group.
pub fn group_min_euclidean(
    h: &ChannelMatrix,
    candidates: &[Vec<usize>],
    group_size: usize,
) -> Result<Vec<Vec<Vec<usize>>>> {
    check_inputs(h, candidates)?;
    if group_size == 0 {
        return Err(Error::invalid("group size must be at least 1"));
    }
    let mut out = Vec::with_capacity(candidates.len());
    for cands in candidates {
        if cands.len() < group_size {
            return Err(Error::InsufficientUsers {
                needed: group_size,
                got: cands.len(),
            });
        }
        let mut left = cands.to_vec();
        left.sort_unstable();
        let mut groups = Vec::new();
        if group_size == 1 {
            groups.extend(left.into_iter().map(|u| vec![u]));
            out.push(groups);
            continue;
        }
        while left.len() >= group_size {
            let mut best = (0, 1, f64::INFINITY);
            for i in 0..left.len() {
                for j in i + 1..left.len() {
                    let d = channel_distance(h, left[i], left[j]);
                    if d < best.2 {
                        best = (i, j, d);
                    }
                }
            }
            let mut group = vec![left[best.0], left[best.1]];
            left.remove(best.1);
            left.remove(best.0);
            while group.len() < group_size {
                let (idx, _) = left
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| (i, group.iter().map(|&g| channel_distance(h, u, g)).sum::<f64>()))
                    .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
                group.push(left.remove(idx));
            }
            groups.push(group);
        }
        if !left.is_empty() {
            groups.push(left);
        }
        out.push(groups);
    }
    Ok(out)
}

/// Pairs plus the lone element of an odd-sized set.
pub type Pairing = (Vec<(usize, usize)>, Option<usize>);

/// Every perfect pairing of `items` (one lone element when odd), in
/// lexicographic order of the pair list.
pub fn enumerate_pairings(items: &[usize]) -> Vec<Pairing> {
    fn rec(left: &[usize], acc: &mut Vec<(usize, usize)>, single: Option<usize>, out: &mut Vec<Pairing>) {
        if left.is_empty() {
            out.push((acc.clone(), single));
            return;
        }
        let first = left[0];
        if left.len() % 2 == 1 && single.is_none() {
            rec(&left[1..], acc, Some(first), out);
        }
        for i in 1..left.len() {
            let rest: Vec<usize> = left[1..]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j + 1 != i)
                .map(|(_, &v)| v)
                .collect();
            acc.push((first, left[i]));
            rec(&rest, acc, single, out);
            acc.pop();
        }
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    rec(&sorted, &mut Vec::new(), None, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub schedule: Schedule,
    pub sum_rate: f64,
    pub evaluated: u64,
}

/// Exhaustive search over the per-beam pairings. Ties go to the
/// lexicographically first combination.
pub fn brute_force_pairing<F>(h: &ChannelMatrix, candidates: &[Vec<usize>], evaluator: F) -> Result<OracleResult>
where
    F: Fn(&Schedule) -> Result<f64> + Sync,
{
    check_inputs(h, candidates)?;
    if candidates.len() > MAX_ORACLE_BEAMS {
        return Err(Error::SizeLimit(format!(
            "{} beams exceeds the oracle limit of {MAX_ORACLE_BEAMS}",
            candidates.len()
        )));
    }
    if let Some(c) = candidates.iter().find(|c| c.len() > MAX_ORACLE_CANDIDATES) {
        return Err(Error::SizeLimit(format!(
            "{} candidates in one beam exceeds the oracle limit of {MAX_ORACLE_CANDIDATES}",
            c.len()
        )));
    }
    if let Some(c) = candidates.iter().find(|c| c.len() < 2) {
        return Err(Error::InsufficientUsers {
            needed: 2,
            got: c.len(),
        });
    }
    let per_beam: Vec<_> = candidates.iter().map(|c| enumerate_pairings(c)).collect();
    let total = per_beam
        .iter()
        .try_fold(1u64, |acc, p| acc.checked_mul(p.len() as u64))
        .filter(|&t| t <= MAX_ORACLE_EVALUATIONS)
        .ok_or_else(|| Error::SizeLimit(format!("more than {MAX_ORACLE_EVALUATIONS} pairings")))?;

    let build = |mut idx: u64| {
        let mut choice = vec![0usize; per_beam.len()];
        for b in (0..per_beam.len()).rev() {
            let n = per_beam[b].len() as u64;
            choice[b] = (idx % n) as usize;
            idx /= n;
        }
        let beams = choice
            .iter()
            .enumerate()
            .map(|(beam, &c)| {
                let (pairs, single) = &per_beam[beam][c];
                beam_entries(beam, pairs, *single, &|u: usize| h.power(u, beam))
            })
            .collect();
        Schedule::from_beams("oracle", beams)
    };

    let best = (0..total)
        .into_par_iter()
        .map(|i| evaluator(&build(i)).map(|r| (i, r)))
        .try_reduce(
            || (u64::MAX, f64::NEG_INFINITY),
            |a, b| Ok(if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a }),
        )?;
    Ok(OracleResult {
        schedule: build(best.0),
        sum_rate: best.1,
        evaluated: total,
    })
}
