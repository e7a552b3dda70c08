//! Monotone families over a finite ground set: the product measure `μ_p`,
//! exact thresholds for small ground sets and Monte Carlo thresholds for
//! large ones.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{graph_from_edge_mask, pair_count, SmallGraphs};
use crate::mask::{GroundSet, SubsetMask, MAX_ENUMERABLE};
use crate::rng::{self, bernoulli};
use crate::stats::{compensated_sum, Proportion};

/// Largest ground set checked exhaustively for monotonicity.
pub const MAX_EXHAUSTIVE_MONOTONE_CHECK: usize = 16;
/// Comparable pairs sampled when the exhaustive check is out of reach.
pub const MONOTONE_CHECK_SAMPLES: usize = 10_000;
/// Largest `n` accepted for the builtin triangle-free family.
pub const MAX_BUILTIN_VERTICES: usize = 1024;

pub const DEFAULT_EXACT_TOL: f64 = 1e-6;
pub const DEFAULT_MC_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Closed under supersets.
    Up,
    /// Closed under subsets.
    Down,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

pub type MemberPredicate = Arc<dyn Fn(&SubsetMask) -> bool + Send + Sync>;

#[derive(Clone)]
enum Membership {
    /// Sorted, deduplicated member list.
    Explicit(Vec<SubsetMask>),
    /// Up- or down-closure of the generators.
    Closure(Vec<SubsetMask>),
    TriangleFree { n: usize, small: Option<Arc<SmallGraphs>> },
    Predicate(MemberPredicate),
}

/// A family `F ⊆ 2^X` with a declared direction.
#[derive(Clone)]
pub struct MonotoneFamily {
    ground: GroundSet,
    direction: Direction,
    membership: Membership,
}

impl fmt::Debug for MonotoneFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.membership {
            Membership::Explicit(m) => format!("explicit({} members)", m.len()),
            Membership::Closure(g) => format!("closure({} generators)", g.len()),
            Membership::TriangleFree { n, .. } => format!("triangle-free(n = {n})"),
            Membership::Predicate(_) => "predicate".to_string(),
        };
        f.debug_struct("MonotoneFamily")
            .field("ground", &self.ground.size())
            .field("direction", &self.direction)
            .field("kind", &kind)
            .finish()
    }
}

fn check_len(ground: &GroundSet, masks: &[SubsetMask]) -> Result<()> {
    match masks.iter().find(|m| m.len() != ground.size()) {
        Some(m) => Err(Error::InvalidArgument(format!(
            "set {m} has {} bits, ground set has {}",
            m.len(),
            ground.size()
        ))),
        None => Ok(()),
    }
}

impl MonotoneFamily {
    /// A family given by its full member list; monotonicity is verified.
    pub fn explicit(ground: GroundSet, direction: Direction, mut members: Vec<SubsetMask>) -> Result<Self> {
        check_len(&ground, &members)?;
        members.sort();
        members.dedup();
        let fam = Self {
            ground,
            direction,
            membership: Membership::Explicit(members),
        };
        fam.check_explicit_closed()?;
        Ok(fam)
    }

    /// `{S : S ⊇ g for some generator g}` (Up) or `{S : S ⊆ g}` (Down).
    pub fn closure(ground: GroundSet, direction: Direction, generators: Vec<SubsetMask>) -> Result<Self> {
        check_len(&ground, &generators)?;
        Ok(Self {
            ground,
            direction,
            membership: Membership::Closure(generators),
        })
    }

    /// `T_n`: triangle-free graphs on `[n]` as a down-set over `E(K_n)`.
    pub fn triangle_free(n: usize) -> Result<Self> {
        if !(3..=MAX_BUILTIN_VERTICES).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "triangle-free family needs 3 <= n <= {MAX_BUILTIN_VERTICES}, got {n}"
            )));
        }
        let ground = GroundSet::labelled(pair_count(n), format!("E(K_{n})"))?;
        let small = SmallGraphs::new(n).ok().map(Arc::new);
        Ok(Self {
            ground,
            direction: Direction::Down,
            membership: Membership::TriangleFree { n, small },
        })
    }

    /// A family given by an arbitrary predicate. Monotonicity is the
    /// caller's claim; [`MonotoneFamily::check_monotone`] tests it.
    pub fn from_predicate<F>(ground: GroundSet, direction: Direction, member: F) -> Self
    where
        F: Fn(&SubsetMask) -> bool + Send + Sync + 'static,
    {
        Self {
            ground,
            direction,
            membership: Membership::Predicate(Arc::new(member)),
        }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn size(&self) -> usize {
        self.ground.size()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn contains(&self, s: &SubsetMask) -> bool {
        debug_assert_eq!(s.len(), self.size());
        match &self.membership {
            Membership::Explicit(m) => m.binary_search(s).is_ok(),
            Membership::Closure(gens) => match self.direction {
                Direction::Up => gens.iter().any(|g| g.is_subset_of(s)),
                Direction::Down => gens.iter().any(|g| s.is_subset_of(g)),
            },
            Membership::TriangleFree { n, small } => match (small, s.as_u64()) {
                (Some(sg), Some(bits)) => sg.is_triangle_free(bits),
                _ => graph_from_edge_mask(*n, s).is_triangle_free(),
            },
            Membership::Predicate(f) => f(s),
        }
    }

    /// Membership for ground sets of at most 64 elements.
    pub fn contains_bits(&self, bits: u64) -> bool {
        match &self.membership {
            Membership::TriangleFree { small: Some(sg), .. } => sg.is_triangle_free(bits),
            _ => self.contains(&SubsetMask::from_u64(self.size(), bits)),
        }
    }

    /// Neither empty nor the whole power set. For a monotone family this
    /// only needs the membership of `∅` and `X`.
    pub fn is_nontrivial(&self) -> bool {
        let has_empty = self.contains(&self.ground.empty_set());
        let has_full = self.contains(&self.ground.full_set());
        match self.direction {
            Direction::Up => has_full && !has_empty,
            Direction::Down => has_empty && !has_full,
        }
    }

    pub fn require_nontrivial(&self) -> Result<()> {
        if self.is_nontrivial() {
            Ok(())
        } else {
            Err(Error::TrivialFamily)
        }
    }

    fn check_explicit_closed(&self) -> Result<()> {
        let Membership::Explicit(members) = &self.membership else {
            return Ok(());
        };
        for s in members {
            for i in 0..self.size() {
                let neighbour = match self.direction {
                    Direction::Down if s.contains(i) => {
                        let mut t = s.clone();
                        t.remove(i);
                        t
                    }
                    Direction::Up if !s.contains(i) => {
                        let mut t = s.clone();
                        t.insert(i);
                        t
                    }
                    _ => continue,
                };
                if members.binary_search(&neighbour).is_err() {
                    return Err(Error::NotMonotone(format!(
                        "{s} is a member but {neighbour} is not"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks closure under the declared direction: exhaustively over all
    /// covering pairs when `N ≤ 16`, otherwise on sampled comparable pairs.
    pub fn check_monotone(&self) -> Result<()> {
        let n = self.size();
        let violation = |small: &SubsetMask, large: &SubsetMask| -> Option<Error> {
            let (a, b) = (self.contains(small), self.contains(large));
            let bad = match self.direction {
                Direction::Up => a && !b,
                Direction::Down => b && !a,
            };
            bad.then(|| Error::NotMonotone(format!("pair {small} ⊆ {large} violates closure")))
        };
        if n <= MAX_EXHAUSTIVE_MONOTONE_CHECK {
            for bits in 0u64..(1 << n) {
                let s = SubsetMask::from_u64(n, bits);
                for i in (0..n).filter(|i| bits >> i & 1 == 0) {
                    let t = SubsetMask::from_u64(n, bits | 1 << i);
                    if let Some(e) = violation(&s, &t) {
                        return Err(e);
                    }
                }
            }
            return Ok(());
        }
        let mut r = rng::seeded_rng(0x6d6f_6e6f);
        use rand::Rng;
        for _ in 0..MONOTONE_CHECK_SAMPLES {
            let density: f64 = r.random();
            let mut s = SubsetMask::empty(n);
            for i in 0..n {
                if bernoulli(&mut r, density) {
                    s.insert(i);
                }
            }
            let mut t = s.clone();
            let extra: f64 = r.random::<f64>() * 0.1;
            for i in 0..n {
                if !t.contains(i) && bernoulli(&mut r, extra) {
                    t.insert(i);
                }
            }
            if let Some(e) = violation(&s, &t) {
                return Err(e);
            }
        }
        Ok(())
    }

    /// All members, in increasing mask order. `N ≤ 24`.
    pub fn members(&self) -> Result<Vec<SubsetMask>> {
        Ok(self
            .member_bits()?
            .into_iter()
            .map(|b| SubsetMask::from_u64(self.size(), b))
            .collect())
    }

    /// All members as `u64` masks, in increasing order. `N ≤ 24`.
    pub fn member_bits(&self) -> Result<Vec<u64>> {
        self.ground.require_at_most(MAX_ENUMERABLE)?;
        if let Membership::Explicit(m) = &self.membership {
            let mut bits: Vec<u64> = m.iter().map(|s| s.as_u64().expect("small")).collect();
            bits.sort_unstable();
            return Ok(bits);
        }
        let total = 1u64 << self.size();
        Ok((0..total)
            .into_par_iter()
            .filter(|&b| self.contains_bits(b))
            .collect())
    }

    /// Member counts grouped by cardinality. `N ≤ 24`.
    pub fn size_profile(&self) -> Result<SizeProfile> {
        let n = self.size();
        let mut counts = vec![0u64; n + 1];
        for b in self.member_bits()? {
            counts[b.count_ones() as usize] += 1;
        }
        Ok(SizeProfile { counts })
    }

    /// `{S : X∖S ∉ F}`. It has the same direction as `F` and
    /// `μ_p = 1 − μ_{1−p}(F)`, so `p_c = 1 − p_c(F)`. `N ≤ 24`.
    pub fn complement_dual(&self) -> Result<MonotoneFamily> {
        self.ground.require_at_most(MAX_ENUMERABLE)?;
        let full = self.full_bits();
        let members = (0..=full)
            .filter(|&b| !self.contains_bits(full & !b))
            .map(|b| SubsetMask::from_u64(self.size(), b))
            .collect();
        MonotoneFamily::explicit(self.ground.clone(), self.direction, members)
    }

    /// `{X∖S : S ∈ F}`, the opposite direction with `μ_p = μ_{1−p}(F)`.
    pub fn mirror(&self) -> Result<MonotoneFamily> {
        let full = self.full_bits();
        let members = self
            .member_bits()?
            .into_iter()
            .map(|b| SubsetMask::from_u64(self.size(), full & !b))
            .collect();
        MonotoneFamily::explicit(self.ground.clone(), self.direction.flip(), members)
    }

    fn full_bits(&self) -> u64 {
        debug_assert!(self.size() <= MAX_ENUMERABLE);
        (1u64 << self.size()) - 1
    }

    /// Draws a `p`-biased random subset of the ground set.
    pub fn sample_subset<R: rand::Rng + ?Sized>(&self, p: f64, rng: &mut R) -> SubsetMask {
        let mut s = SubsetMask::empty(self.size());
        for i in 0..self.size() {
            if bernoulli(rng, p) {
                s.insert(i);
            }
        }
        s
    }
}

/// Members of a family counted by cardinality: `counts[k] = #{S ∈ F : |S| = k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeProfile {
    pub counts: Vec<u64>,
}

impl SizeProfile {
    pub fn ground_size(&self) -> usize {
        self.counts.len() - 1
    }

    /// `Σ_k counts[k] p^k (1−p)^{N−k}`.
    pub fn mu(&self, p: f64) -> f64 {
        let n = self.ground_size() as i32;
        let terms = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * p.powi(k as i32) * (1.0 - p).powi(n - k as i32));
        compensated_sum(terms).clamp(0.0, 1.0)
    }
}

/// `μ_p(F) = Σ_{S ∈ F} p^{|S|} (1−p)^{N−|S|}`, summed by cardinality.
pub fn mu_p_exact(family: &MonotoneFamily, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(family.size_profile()?.mu(p))
}

/// A bisection bracket `[lo, hi]`; the reported value is its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }
}

/// Bisection on a predicate that is false on `[0, p*)` and true on `(p*, 1]`.
pub(crate) fn bisect(tol: f64, mut above: impl FnMut(f64) -> Result<bool>) -> Result<Bracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Bracket { lo, hi })
}

/// The unique `p` with `μ_p(F) = 1/2`, located by bisection to width `tol`.
pub fn threshold_exact(family: &MonotoneFamily, tol: f64) -> Result<Bracket> {
    family.ground().require_at_most(MAX_ENUMERABLE)?;
    family.require_nontrivial()?;
    let profile = family.size_profile()?;
    let dir = family.direction();
    bisect(tol, |p| {
        let mu = profile.mu(p);
        Ok(match dir {
            Direction::Up => mu >= 0.5,
            Direction::Down => mu <= 0.5,
        })
    })
}

/// Monte Carlo estimate of `μ_p(F)` with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub half_width: f64,
    pub successes: u64,
    pub trials: u64,
}

/// Samples `trials` independent `p`-biased subsets; trial `t` uses substream
/// `t` of `seed`, so the result does not depend on the thread count.
pub fn mu_p_monte_carlo(family: &MonotoneFamily, p: f64, trials: u64, seed: u64) -> Result<McEstimate> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if p == 0.0 || p == 1.0 {
        let s = if p == 0.0 {
            family.ground().empty_set()
        } else {
            family.ground().full_set()
        };
        let hit = family.contains(&s);
        return Ok(McEstimate {
            estimate: if hit { 1.0 } else { 0.0 },
            half_width: 0.0,
            successes: if hit { trials } else { 0 },
            trials,
        });
    }
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::trial_rng(seed, t);
            family.contains(&family.sample_subset(p, &mut r)) as u64
        })
        .sum();
    let prop = Proportion::new(successes, trials);
    Ok(McEstimate {
        estimate: prop.estimate(),
        half_width: prop.half_width(),
        successes,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltReason {
    /// The bracket reached the requested width.
    Tolerance,
    /// The confidence interval at the last probe contained 1/2.
    Straddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u64,
    pub p: f64,
    pub estimate: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McThreshold {
    pub p: f64,
    pub bracket: Bracket,
    pub half_width: f64,
    pub halted: HaltReason,
    pub levels: Vec<LevelRecord>,
}

/// Confidence-aware bisection for `μ_p(F) = 1/2`.
///
/// Level `ℓ` probes the bracket midpoint with `trials_per_level` samples drawn
/// from substream `ℓ` of `seed`. Refinement stops when the bracket is narrower
/// than `tol` or the probe's 95% interval contains 1/2; in the latter case the
/// probe itself (the midpoint of the bracket it was drawn from) is returned.
pub fn threshold_monte_carlo(
    family: &MonotoneFamily,
    trials_per_level: u64,
    seed: u64,
    tol: f64,
) -> Result<McThreshold> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let dir = family.direction();
    let low_end = mu_p_monte_carlo(family, 0.0, trials_per_level, seed)?.estimate;
    let high_end = mu_p_monte_carlo(family, 1.0, trials_per_level, seed)?.estimate;
    let sign_ok = match dir {
        Direction::Up => low_end < 0.5 && high_end > 0.5,
        Direction::Down => low_end > 0.5 && high_end < 0.5,
    };
    if !sign_ok {
        return Err(Error::Inconclusive(format!(
            "μ_0 = {low_end}, μ_1 = {high_end} do not bracket 1/2"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut levels = Vec::new();
    let mut last_hw = 0.0;
    let mut level = 0u64;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let est = mu_p_monte_carlo(family, mid, trials_per_level, rng::substream(seed, level))?;
        levels.push(LevelRecord {
            level,
            p: mid,
            estimate: est.estimate,
            half_width: est.half_width,
        });
        level += 1;
        last_hw = est.half_width;
        if (est.estimate - 0.5).abs() <= est.half_width {
            return Ok(McThreshold {
                p: mid,
                bracket: Bracket { lo, hi },
                half_width: est.half_width,
                halted: HaltReason::Straddle,
                levels,
            });
        }
        let below = match dir {
            Direction::Up => est.estimate < 0.5,
            Direction::Down => est.estimate > 0.5,
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let bracket = Bracket { lo, hi };
    Ok(McThreshold {
        p: bracket.value(),
        bracket,
        half_width: last_hw,
        halted: HaltReason::Tolerance,
        levels,
    })
}

/// Every family on a ground set of size `n ≤ 4` closed in `direction`,
/// including the two trivial ones, in increasing order of the characteristic
/// vector over `2^X`.
pub fn enumerate_monotone_families(n: usize, direction: Direction) -> Result<Vec<MonotoneFamily>> {
    if n == 0 || n > 4 {
        return Err(Error::GroundSetTooLarge { size: n, max: 4 });
    }
    let subsets = 1usize << n;
    let ground = GroundSet::new(n)?;
    let mut out = Vec::new();
    for chi in 0u64..(1u64 << subsets) {
        let member = |s: usize| chi >> s & 1 == 1;
        let closed = (0..subsets).filter(|&s| member(s)).all(|s| {
            (0..n).all(|i| {
                let t = match direction {
                    Direction::Down => s & !(1 << i),
                    Direction::Up => s | (1 << i),
                };
                member(t)
            })
        });
        if closed {
            let members = (0..subsets)
                .filter(|&s| member(s))
                .map(|s| SubsetMask::from_u64(n, s as u64))
                .collect();
            out.push(MonotoneFamily::explicit(ground.clone(), direction, members)?);
        }
    }
    Ok(out)
}

/// JSON declaration of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `"triangle-free"` with `n`; `"clique-free-r"` is reserved.
    Builtin {
        name: String,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<usize>,
    },
    Explicit {
        direction: Direction,
        ground_size: usize,
        members: Vec<SubsetMask>,
    },
    Closure {
        direction: Direction,
        ground_size: usize,
        generators: Vec<SubsetMask>,
    },
}

impl FamilySpec {
    /// Largest ground set accepted from a declaration.
    pub const MAX_GROUND_SIZE: usize = 1 << 20;

    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn build(&self) -> Result<MonotoneFamily> {
        let ground_for = |size: usize| -> Result<GroundSet> {
            if size > Self::MAX_GROUND_SIZE {
                return Err(Error::Malformed(format!("ground_size {size} too large")));
            }
            GroundSet::new(size)
        };
        match self {
            FamilySpec::Builtin { name, n, .. } => match name.as_str() {
                "triangle-free" => MonotoneFamily::triangle_free(*n),
                "clique-free-r" => Err(Error::Unsupported(
                    "clique-free-r is reserved and not implemented".into(),
                )),
                other => Err(Error::InvalidArgument(format!("unknown builtin family {other:?}"))),
            },
            FamilySpec::Explicit {
                direction,
                ground_size,
                members,
            } => MonotoneFamily::explicit(ground_for(*ground_size)?, *direction, members.clone()),
            FamilySpec::Closure {
                direction,
                ground_size,
                generators,
            } => MonotoneFamily::closure(ground_for(*ground_size)?, *direction, generators.clone()),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn masks(n: usize, sets: &[&[usize]]) -> Vec<SubsetMask> {
        sets.iter()
            .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap())
            .collect()
    }

    /// `{∅, {1}, {2}}` on a two-element ground set.
    pub fn down_pair() -> MonotoneFamily {
        MonotoneFamily::explicit(GroundSet::new(2).unwrap(), Direction::Down, masks(2, &[&[], &[0], &[1]]))
            .unwrap()
    }

    /// Up-set generated by the two singletons of a two-element ground set.
    pub fn up_pair() -> MonotoneFamily {
        MonotoneFamily::closure(GroundSet::new(2).unwrap(), Direction::Up, masks(2, &[&[0], &[1]])).unwrap()
    }

    pub fn up_singleton(n: usize) -> MonotoneFamily {
        MonotoneFamily::closure(GroundSet::new(n).unwrap(), Direction::Up, masks(n, &[&[0]])).unwrap()
    }

    pub fn t3() -> MonotoneFamily {
        MonotoneFamily::triangle_free(3).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Direct `Σ_{S∈F} μ_p(S)` over the enumerated members.
    fn mu_oracle(f: &MonotoneFamily, p: f64) -> f64 {
        let n = f.size() as i32;
        (0..1u64 << n)
            .filter(|&b| f.contains_bits(b))
            .map(|b| {
                let k = b.count_ones() as i32;
                p.powi(k) * (1.0 - p).powi(n - k)
            })
            .sum()
    }

    #[test]
    fn mu_examples() {
        assert_abs_diff_eq!(mu_p_exact(&up_singleton(3), 0.3).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(mu_p_exact(&t3(), 0.5).unwrap(), 0.875, epsilon = 1e-15);
        let only_empty =
            MonotoneFamily::explicit(GroundSet::new(4).unwrap(), Direction::Down, masks(4, &[&[]])).unwrap();
        for &p in &[0.0, 0.2, 0.9, 1.0] {
            assert_abs_diff_eq!(mu_p_exact(&only_empty, p).unwrap(), (1.0f64 - p).powi(4), epsilon = 1e-15);
        }
    }

    #[test]
    fn mu_rejects_large_ground_sets() {
        let big = MonotoneFamily::triangle_free(8).unwrap();
        assert_eq!(
            mu_p_exact(&big, 0.5),
            Err(Error::GroundSetTooLarge { size: 28, max: 24 })
        );
    }

    #[test]
    fn threshold_examples() {
        let t = threshold_exact(&up_singleton(3), DEFAULT_EXACT_TOL).unwrap();
        assert_abs_diff_eq!(t.value(), 0.5, epsilon = 1e-6);
        // Roots of 1 − p² = 1/2 and 1 − p³ = 1/2, cross-checked on the oracle.
        let t = threshold_exact(&down_pair(), DEFAULT_EXACT_TOL).unwrap();
        assert_abs_diff_eq!(t.value(), 0.5f64.sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(mu_oracle(&down_pair(), 0.5f64.sqrt()), 0.5, epsilon = 1e-12);
        let t = threshold_exact(&t3(), DEFAULT_EXACT_TOL).unwrap();
        assert_abs_diff_eq!(t.value(), 0.5f64.powf(1.0 / 3.0), epsilon = 1e-6);
        assert_abs_diff_eq!(mu_oracle(&t3(), 0.5f64.powf(1.0 / 3.0)), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn trivial_families_are_rejected() {
        let g = GroundSet::new(2).unwrap();
        let empty = MonotoneFamily::explicit(g.clone(), Direction::Down, vec![]).unwrap();
        let full = MonotoneFamily::closure(g, Direction::Up, masks(2, &[&[]])).unwrap();
        assert_eq!(threshold_exact(&empty, 1e-6), Err(Error::TrivialFamily));
        assert_eq!(threshold_exact(&full, 1e-6), Err(Error::TrivialFamily));
    }

    #[test]
    fn explicit_families_must_be_closed() {
        let g = GroundSet::new(2).unwrap();
        let bad = MonotoneFamily::explicit(g.clone(), Direction::Down, masks(2, &[&[0]]));
        assert!(matches!(bad, Err(Error::NotMonotone(_))));
        let bad = MonotoneFamily::explicit(g, Direction::Up, masks(2, &[&[0]]));
        assert!(matches!(bad, Err(Error::NotMonotone(_))));
    }

    #[test]
    fn predicate_monotonicity_check() {
        let g = GroundSet::new(5).unwrap();
        let at_most_two = MonotoneFamily::from_predicate(g.clone(), Direction::Down, |s| s.count() <= 2);
        assert!(at_most_two.check_monotone().is_ok());
        let exactly_two = MonotoneFamily::from_predicate(g, Direction::Down, |s| s.count() == 2);
        assert!(exactly_two.check_monotone().is_err());
        // Sampled check on a large ground set.
        let big = MonotoneFamily::triangle_free(10).unwrap();
        assert!(big.check_monotone().is_ok());
        let parity = MonotoneFamily::from_predicate(GroundSet::new(40).unwrap(), Direction::Up, |s| {
            s.count() % 2 == 0
        });
        assert!(parity.check_monotone().is_err());
    }

    #[test]
    fn monotone_family_counts() {
        // Dedekind numbers M(3) = 20 and M(4) = 168.
        assert_eq!(enumerate_monotone_families(3, Direction::Down).unwrap().len(), 20);
        assert_eq!(enumerate_monotone_families(3, Direction::Up).unwrap().len(), 20);
        assert_eq!(enumerate_monotone_families(4, Direction::Down).unwrap().len(), 168);
        assert_eq!(enumerate_monotone_families(4, Direction::Up).unwrap().len(), 168);
    }

    #[test]
    fn mu_is_monotone_in_p_for_every_small_family() {
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        for n in [3, 4] {
            for dir in [Direction::Up, Direction::Down] {
                for f in enumerate_monotone_families(n, dir).unwrap() {
                    let prof = f.size_profile().unwrap();
                    for w in grid.windows(2) {
                        let (a, b) = (prof.mu(w[0]), prof.mu(w[1]));
                        match dir {
                            Direction::Up => assert!(a <= b + 1e-15),
                            Direction::Down => assert!(a + 1e-15 >= b),
                        }
                        assert_abs_diff_eq!(a, mu_oracle(&f, w[0]), epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn dual_thresholds_are_complementary() {
        for n in 1..=4 {
            for dir in [Direction::Down, Direction::Up] {
                for f in enumerate_monotone_families(n, dir).unwrap() {
                    if !f.is_nontrivial() {
                        continue;
                    }
                    let a = threshold_exact(&f, 1e-9).unwrap().value();
                    let g = f.complement_dual().unwrap();
                    assert_eq!(g.direction(), dir);
                    assert_abs_diff_eq!(a + threshold_exact(&g, 1e-9).unwrap().value(), 1.0, epsilon = 1e-8);
                    let h = f.mirror().unwrap();
                    assert_eq!(h.direction(), dir.flip());
                    assert_abs_diff_eq!(a + threshold_exact(&h, 1e-9).unwrap().value(), 1.0, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn monte_carlo_examples() {
        let e = mu_p_monte_carlo(&t3(), 0.0, 100, 1).unwrap();
        assert_eq!((e.estimate, e.half_width), (1.0, 0.0));
        let e = mu_p_monte_carlo(&up_singleton(3), 0.0, 100, 1).unwrap();
        assert_eq!(e.estimate, 0.0);
        let e = mu_p_monte_carlo(&up_singleton(3), 0.3, 100_000, 2).unwrap();
        assert!((e.estimate - 0.3).abs() < 0.01, "{e:?}");
        let e = mu_p_monte_carlo(&t3(), 0.5, 100_000, 3).unwrap();
        assert!((e.estimate - 0.875).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn monte_carlo_is_thread_count_invariant() {
        let f = MonotoneFamily::triangle_free(9).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mu_p_monte_carlo(&f, 0.2, 5000, 77).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn monte_carlo_converges() {
        // |estimate − exact| ≤ 4·half-width in at least 99 of 100 seeded runs.
        let fams: Vec<MonotoneFamily> = enumerate_monotone_families(4, Direction::Down)
            .unwrap()
            .into_iter()
            .filter(|f| f.is_nontrivial())
            .collect();
        let mut ok = 0;
        for run in 0..100u64 {
            let f = &fams[(run as usize * 37) % fams.len()];
            let exact = mu_p_exact(f, 0.5).unwrap();
            let e = mu_p_monte_carlo(f, 0.5, 4000, run).unwrap();
            if (e.estimate - exact).abs() <= 4.0 * e.half_width {
                ok += 1;
            }
        }
        assert!(ok >= 99, "{ok}");
    }

    #[test]
    fn monte_carlo_threshold_examples() {
        let t = threshold_monte_carlo(&up_singleton(3), 100_000, 5, 0.01).unwrap();
        assert!((t.p - 0.5).abs() <= 0.01, "{t:?}");
        let t = threshold_monte_carlo(&t3(), 100_000, 6, 0.01).unwrap();
        assert!((t.p - 0.5f64.powf(1.0 / 3.0)).abs() <= 0.01, "{t:?}");
    }

    #[test]
    fn monte_carlo_threshold_decreases_with_n() {
        let a = threshold_monte_carlo(&MonotoneFamily::triangle_free(16).unwrap(), 2000, 8, 1e-3).unwrap();
        let b = threshold_monte_carlo(&MonotoneFamily::triangle_free(32).unwrap(), 2000, 8, 1e-3).unwrap();
        assert!(0.0 < b.p && b.p < a.p && a.p < 1.0, "{} {}", a.p, b.p);
    }

    #[test]
    fn non_monotone_predicate_is_inconclusive() {
        let g = GroundSet::new(3).unwrap();
        let odd = MonotoneFamily::from_predicate(g, Direction::Up, |s| s.count() == 1);
        assert!(matches!(
            threshold_monte_carlo(&odd, 100, 1, 0.01),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn family_spec_parsing() {
        let spec = FamilySpec::parse(
            r#"{"kind":"explicit","direction":"down","ground_size":2,"members":["00","10","01"]}"#,
        )
        .unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.member_bits().unwrap(), vec![0, 1, 2]);
        let spec = FamilySpec::parse(r#"{"kind":"closure","direction":"up","ground_size":2,"generators":["10","01"]}"#)
            .unwrap();
        assert_eq!(spec.build().unwrap().member_bits().unwrap(), vec![1, 2, 3]);
        let spec = FamilySpec::parse(r#"{"kind":"builtin","name":"triangle-free","n":4}"#).unwrap();
        assert_eq!(spec.build().unwrap().size(), 6);
        let reserved = FamilySpec::parse(r#"{"kind":"builtin","name":"clique-free-r","n":5,"r":4}"#).unwrap();
        assert!(matches!(reserved.build(), Err(Error::Unsupported(_))));
        assert!(FamilySpec::parse(r#"{"kind":"explicit","direction":"down","ground_size":2,"members":["000"]}"#)
            .unwrap()
            .build()
            .is_err());
        assert!(FamilySpec::parse(r#"{"kind":"closure","direction":"up","ground_size":2,"generators":[],"x":1}"#)
            .is_err());
    }
}
