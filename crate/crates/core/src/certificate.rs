//! Certificates of p-smallness and weak p-smallness, and the expectation
//! thresholds `q` (integral covers) and `q_f` (fractional covers).

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::family::{bisect, threshold_exact, Bracket, Direction, MonotoneFamily};
use crate::lp::{self, Scalar};
use crate::mask::{GroundSet, SubsetMask, MAX_ENUMERABLE};
use crate::rng;
use crate::stats::CompensatedSum;

/// Largest ground set for the exact integral cover search.
pub const MAX_Q_EXACT: usize = 4;
/// Largest ground set for the covering LP (`2^N` variables).
pub const MAX_LP: usize = 5;
pub const LP_VALIDATION_TOL: f64 = 1e-9;
pub const SANDWICH_TOL: f64 = 1e-5;

/// `base^k` with `0^0 = 1`, evaluated as `exp(k ln base)`.
fn power(base: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else if base <= 0.0 {
        0.0
    } else {
        (k as f64 * base.ln()).exp()
    }
}

/// The cost of a single certificate member: `p^{|T|}` for up-sets,
/// `(1−p)^{N−|T|}` for down-sets.
pub fn set_weight(t: &SubsetMask, p: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Up => power(p, t.count()),
        Direction::Down => power(1.0 - p, t.len() - t.count()),
    }
}

/// Whether certificate member `t` accounts for family member `s`:
/// `s ⊇ t` for up-sets and `s ⊆ t` for down-sets.
pub fn covers_set(t: &SubsetMask, s: &SubsetMask, direction: Direction) -> bool {
    match direction {
        Direction::Up => t.is_subset_of(s),
        Direction::Down => s.is_subset_of(t),
    }
}

fn covers_bits(t: u64, s: u64, direction: Direction) -> bool {
    match direction {
        Direction::Up => t & !s == 0,
        Direction::Down => s & !t == 0,
    }
}

/// A finite collection of subsets, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateJson", into = "CertificateJson")]
pub struct Certificate {
    ground: GroundSet,
    members: Vec<SubsetMask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub ground_size: usize,
    pub members: Vec<SubsetMask>,
}

impl TryFrom<CertificateJson> for Certificate {
    type Error = Error;
    fn try_from(j: CertificateJson) -> Result<Self> {
        Certificate::new(GroundSet::new(j.ground_size)?, j.members)
    }
}

impl From<Certificate> for CertificateJson {
    fn from(c: Certificate) -> Self {
        CertificateJson {
            ground_size: c.ground.size(),
            members: c.members,
        }
    }
}

fn check_masks<'a>(ground: &GroundSet, masks: impl IntoIterator<Item = &'a SubsetMask>) -> Result<()> {
    for m in masks {
        if m.len() != ground.size() {
            return Err(Error::InvalidArgument(format!(
                "set {m} has {} bits, ground set has {}",
                m.len(),
                ground.size()
            )));
        }
    }
    Ok(())
}

impl Certificate {
    pub fn new(ground: GroundSet, mut members: Vec<SubsetMask>) -> Result<Self> {
        check_masks(&ground, &members)?;
        members.sort();
        members.dedup();
        Ok(Self { ground, members })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn covers_member(&self, s: &SubsetMask, direction: Direction) -> bool {
        self.members.iter().any(|t| covers_set(t, s, direction))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialises")
    }
}

/// `Σ_T p^{|T|}` (Up) or `Σ_T (1−p)^{N−|T|}` (Down).
pub fn cert_cost(cert: &Certificate, p: f64, direction: Direction) -> Result<f64> {
    check_probability(p)?;
    Ok(cert
        .members
        .iter()
        .map(|t| set_weight(t, p, direction))
        .collect::<CompensatedSum>()
        .value())
}

/// Result of a coverage check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub covers: bool,
    /// Every member was examined; otherwise only sampled subsets were.
    pub exhaustive: bool,
    pub checked: u64,
    pub counterexample: Option<SubsetMask>,
}

fn same_ground(a: &GroundSet, b: &GroundSet) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::InvalidArgument(format!(
            "ground sets differ: {} vs {}",
            a.size(),
            b.size()
        )));
    }
    Ok(())
}

/// Checks `F ⊆ G^↓` (Down) or `F ⊆ G^↑` (Up) over every member of `F`.
/// Requires `N ≤ 24`; see [`covers_sampled`] for larger ground sets.
pub fn covers(cert: &Certificate, family: &MonotoneFamily) -> Result<CoverCheck> {
    same_ground(cert.ground(), family.ground())?;
    family.ground().require_at_most(MAX_ENUMERABLE)?;
    let dir = family.direction();
    let members = family.member_bits()?;
    let cert_bits: Vec<u64> = cert.members.iter().map(|t| t.as_u64().expect("small")).collect();
    let miss = members
        .par_iter()
        .find_first(|&&s| !cert_bits.iter().any(|&t| covers_bits(t, s, dir)));
    Ok(CoverCheck {
        covers: miss.is_none(),
        exhaustive: true,
        checked: members.len() as u64,
        counterexample: miss.map(|&s| SubsetMask::from_u64(family.size(), s)),
    })
}

/// Looks for an uncovered member among `trials` random subsets. Trial `t`
/// draws a density from substream `t` of `seed` and then a subset at that
/// density, so sparse and dense members are both reached.
pub fn covers_sampled(cert: &Certificate, family: &MonotoneFamily, trials: u64, seed: u64) -> Result<CoverCheck> {
    use rand::Rng;
    same_ground(cert.ground(), family.ground())?;
    let dir = family.direction();
    let miss = (0..trials).into_par_iter().find_map_first(|t| {
        let mut r = rng::trial_rng(seed, t);
        let density: f64 = r.random();
        let s = family.sample_subset(density, &mut r);
        (family.contains(&s) && !cert.covers_member(&s, dir)).then_some(s)
    });
    Ok(CoverCheck {
        covers: miss.is_none(),
        exhaustive: false,
        checked: trials,
        counterexample: miss,
    })
}

/// Cost and coverage of a certificate against a family at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertVerdict {
    pub cost: f64,
    pub covers: bool,
    pub p_small: bool,
}

pub fn verdict(cert: &Certificate, family: &MonotoneFamily, p: f64) -> Result<CertVerdict> {
    let cost = cert_cost(cert, p, family.direction())?;
    let covers = covers(cert, family)?.covers;
    Ok(CertVerdict {
        cost,
        covers,
        p_small: covers && cost <= 0.5,
    })
}

/// A cheapest integral cover at a fixed `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub cost: f64,
    pub certificate: Certificate,
}

struct Candidate {
    set: u64,
    cover: u64,
    weight: f64,
}

/// Minimises [`cert_cost`] over all certificates covering `family`, by
/// branch-and-bound over the `2^N` candidate sets. `N ≤ 4`.
pub fn min_integral_cover(family: &MonotoneFamily, p: f64) -> Result<CoverSolution> {
    check_probability(p)?;
    family.ground().require_at_most(MAX_Q_EXACT)?;
    let n = family.size();
    let dir = family.direction();
    let members = family.member_bits()?;
    let all_covered: u64 = if members.len() == 64 { u64::MAX } else { (1u64 << members.len()) - 1 };

    let mut cands: Vec<Candidate> = (0..1u64 << n)
        .map(|t| Candidate {
            set: t,
            cover: members
                .iter()
                .enumerate()
                .filter(|(_, &s)| covers_bits(t, s, dir))
                .fold(0u64, |acc, (i, _)| acc | 1 << i),
            weight: set_weight(&SubsetMask::from_u64(n, t), p, dir),
        })
        .filter(|c| c.cover != 0)
        .collect();
    // Drop a candidate when another covers a superset at no greater cost;
    // exact ties keep the smaller set index.
    let dominated: Vec<bool> = cands
        .iter()
        .map(|c| {
            cands.iter().any(|d| {
                d.set != c.set
                    && d.cover & c.cover == c.cover
                    && d.weight <= c.weight
                    && (d.cover != c.cover || d.weight < c.weight || d.set < c.set)
            })
        })
        .collect();
    let mut keep = dominated.iter().map(|d| !d);
    cands.retain(|_| keep.next().unwrap());
    cands.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.set.cmp(&b.set)));

    struct Search<'a> {
        cands: &'a [Candidate],
        full: u64,
        best: f64,
        best_sets: Vec<u64>,
        chosen: Vec<u64>,
    }
    impl Search<'_> {
        fn go(&mut self, covered: u64, cost: f64) {
            if covered == self.full {
                if cost < self.best {
                    self.best = cost;
                    self.best_sets = self.chosen.clone();
                }
                return;
            }
            let target = (!covered & self.full).trailing_zeros();
            for c in self.cands.iter().filter(|c| c.cover >> target & 1 == 1) {
                let next = cost + c.weight;
                if next >= self.best {
                    // Candidates are sorted by weight.
                    break;
                }
                self.chosen.push(c.set);
                self.go(covered | c.cover, next);
                self.chosen.pop();
            }
        }
    }
    let mut search = Search {
        cands: &cands,
        full: all_covered,
        best: f64::INFINITY,
        best_sets: Vec::new(),
        chosen: Vec::new(),
    };
    if members.is_empty() {
        search.best = 0.0;
    } else {
        search.go(0, 0.0);
    }
    let certificate = Certificate::new(
        family.ground().clone(),
        search.best_sets.iter().map(|&t| SubsetMask::from_u64(n, t)).collect(),
    )?;
    let cost = cert_cost(&certificate, p, dir)?;
    Ok(CoverSolution { cost, certificate })
}

/// An optimal `p` located by bisection, with a witness certificate valid at
/// the feasible end of the bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnessed<C> {
    pub bracket: Bracket,
    /// The end of the bracket at which `witness` certifies (weak) p-smallness.
    pub feasible_p: f64,
    pub witness: C,
    pub cost: f64,
}

impl<C> Witnessed<C> {
    pub fn value(&self) -> f64 {
        self.bracket.value()
    }
}

/// Bisection for the optimum of a monotone smallness predicate, asserting the
/// expected truth values at `p = 0` and `p = 1` first.
fn threshold_of<C>(
    family: &MonotoneFamily,
    tol: f64,
    what: &str,
    mut solve: impl FnMut(f64) -> Result<(f64, C)>,
) -> Result<Witnessed<C>> {
    family.require_nontrivial()?;
    let dir = family.direction();
    let small_at = |cost: f64| cost <= 0.5;
    let (c0, _) = solve(0.0)?;
    let (c1, _) = solve(1.0)?;
    let expected = match dir {
        Direction::Up => (true, false),
        Direction::Down => (false, true),
    };
    if (small_at(c0), small_at(c1)) != expected {
        return Err(Error::NotMonotone(format!(
            "{what}: optimal cost {c0} at p = 0 and {c1} at p = 1 is inconsistent with a {dir}-set"
        )));
    }
    let bracket = bisect(tol, |p| {
        let small = small_at(solve(p)?.0);
        Ok(match dir {
            Direction::Up => !small,
            Direction::Down => small,
        })
    })?;
    let feasible_p = match dir {
        Direction::Up => bracket.lo,
        Direction::Down => bracket.hi,
    };
    let (cost, witness) = solve(feasible_p)?;
    Ok(Witnessed {
        bracket,
        feasible_p,
        witness,
        cost,
    })
}

/// The expectation-threshold `q(F)`: the smallest `p` (Down) or the largest
/// `p` (Up) at which `F` is p-small. `N ≤ 4`.
pub fn q_exact(family: &MonotoneFamily, tol: f64) -> Result<Witnessed<Certificate>> {
    family.ground().require_at_most(MAX_Q_EXACT)?;
    threshold_of(family, tol, "integral cover", |p| {
        let s = min_integral_cover(family, p)?;
        Ok((s.cost, s.certificate))
    })
}

/// A nonnegative weight function on subsets. Zero weights are dropped and
/// the entries kept sorted by set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FractionalJson", into = "FractionalJson")]
pub struct FractionalCertificate {
    ground: GroundSet,
    weights: Vec<(SubsetMask, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub set: SubsetMask,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractionalJson {
    pub ground_size: usize,
    pub weights: Vec<WeightEntry>,
}

impl TryFrom<FractionalJson> for FractionalCertificate {
    type Error = Error;
    fn try_from(j: FractionalJson) -> Result<Self> {
        FractionalCertificate::new(
            GroundSet::new(j.ground_size)?,
            j.weights.into_iter().map(|e| (e.set, e.weight)).collect(),
        )
    }
}

impl From<FractionalCertificate> for FractionalJson {
    fn from(c: FractionalCertificate) -> Self {
        FractionalJson {
            ground_size: c.ground.size(),
            weights: c
                .weights
                .into_iter()
                .map(|(set, weight)| WeightEntry { set, weight })
                .collect(),
        }
    }
}

impl FractionalCertificate {
    /// Repeated sets have their weights added.
    pub fn new(ground: GroundSet, weights: Vec<(SubsetMask, f64)>) -> Result<Self> {
        check_masks(&ground, weights.iter().map(|(s, _)| s))?;
        let mut acc: BTreeMap<SubsetMask, f64> = BTreeMap::new();
        for (s, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("weight {w} on {s} is not a nonnegative number")));
            }
            *acc.entry(s).or_insert(0.0) += w;
        }
        Ok(Self {
            ground,
            weights: acc.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn weights(&self) -> &[(SubsetMask, f64)] {
        &self.weights
    }

    pub fn weight_of(&self, s: &SubsetMask) -> f64 {
        self.weights
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.weights[i].1)
            .unwrap_or(0.0)
    }

    /// `Σ_T g(T)·w_p(T)`.
    pub fn cost(&self, p: f64, direction: Direction) -> Result<f64> {
        check_probability(p)?;
        Ok(self
            .weights
            .iter()
            .map(|(t, g)| g * set_weight(t, p, direction))
            .collect::<CompensatedSum>()
            .value())
    }

    /// `Σ_{T ⊇ S} g(T)` (Down) or `Σ_{T ⊆ S} g(T)` (Up).
    pub fn coverage(&self, s: &SubsetMask, direction: Direction) -> f64 {
        self.weights
            .iter()
            .filter(|(t, _)| covers_set(t, s, direction))
            .map(|(_, g)| *g)
            .collect::<CompensatedSum>()
            .value()
    }

    /// Every member of `family` has coverage at least `1 − tol`. `N ≤ 24`.
    pub fn covers(&self, family: &MonotoneFamily, tol: f64) -> Result<bool> {
        same_ground(&self.ground, family.ground())?;
        let dir = family.direction();
        Ok(family
            .members()?
            .par_iter()
            .all(|s| self.coverage(s, dir) >= 1.0 - tol))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialises")
    }
}

impl From<&Certificate> for FractionalCertificate {
    fn from(c: &Certificate) -> Self {
        FractionalCertificate {
            ground: c.ground.clone(),
            weights: c.members.iter().map(|t| (t.clone(), 1.0)).collect(),
        }
    }
}

/// `w_p(T)` for every `T ⊆ X`, in mask order. `N ≤ 24`.
pub fn direction_weights(ground: &GroundSet, p: f64, direction: Direction) -> Result<BTreeMap<SubsetMask, f64>> {
    check_probability(p)?;
    ground.require_at_most(MAX_ENUMERABLE)?;
    let n = ground.size();
    Ok((0..1u64 << n)
        .map(|t| {
            let s = SubsetMask::from_u64(n, t);
            let w = set_weight(&s, p, direction);
            (s, w)
        })
        .collect())
}

/// Arithmetic used by the covering LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpArithmetic {
    /// Floating point, re-solved in exact rationals if validation fails.
    Float,
    Exact,
}

/// Optimal covering LP solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpCover {
    pub value: f64,
    pub certificate: FractionalCertificate,
    /// The exact rational solver produced this solution.
    pub exact: bool,
}

/// `min Σ_T g(T)·weight(T)` subject to unit coverage of every member of
/// `family` and `g ≥ 0`. Candidate sets are the keys of `weights`. `N ≤ 5`.
///
/// Solved through its packing dual; ties go to the smallest candidate set.
pub fn lp_min_cover(family: &MonotoneFamily, weights: &BTreeMap<SubsetMask, f64>) -> Result<LpCover> {
    lp_min_cover_with(family, weights, LpArithmetic::Float)
}

pub fn lp_min_cover_with(
    family: &MonotoneFamily,
    weights: &BTreeMap<SubsetMask, f64>,
    arithmetic: LpArithmetic,
) -> Result<LpCover> {
    family.ground().require_at_most(MAX_LP)?;
    check_masks(family.ground(), weights.keys())?;
    if let Some((s, w)) = weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidArgument(format!("weight {w} on {s} is not a nonnegative number")));
    }
    let dir = family.direction();
    let members = family.members()?;
    let sets: Vec<&SubsetMask> = weights.keys().collect();
    if let Some(s) = members
        .iter()
        .find(|s| !sets.iter().any(|t| covers_set(t, s, dir)))
    {
        return Err(Error::InvalidArgument(format!("member {s} is not covered by any candidate set")));
    }
    if members.is_empty() {
        return Ok(LpCover {
            value: 0.0,
            certificate: FractionalCertificate::new(family.ground().clone(), vec![])?,
            exact: arithmetic == LpArithmetic::Exact,
        });
    }
    let a: Vec<Vec<f64>> = sets
        .iter()
        .map(|t| members.iter().map(|s| covers_set(t, s, dir) as u8 as f64).collect())
        .collect();
    let b: Vec<f64> = weights.values().copied().collect();
    let c = vec![1.0; members.len()];

    let build = |g: Vec<f64>, value: f64, exact: bool| -> Result<LpCover> {
        let certificate = FractionalCertificate::new(
            family.ground().clone(),
            sets.iter().zip(g).map(|(t, w)| ((*t).clone(), w.max(0.0))).collect(),
        )?;
        Ok(LpCover {
            value,
            certificate,
            exact,
        })
    };
    if arithmetic == LpArithmetic::Float {
        let sol = lp::solve_packing(&a, &b, &c)?;
        if let Some(g) = validate(&a, &b, &sol.primal, &sol.dual, sol.value) {
            return build(g, sol.value, false);
        }
    }
    let (ar, br, cr) = lp::to_rational(&a, &b, &c)?;
    let sol = lp::solve_packing::<BigRational>(&ar, &br, &cr)?;
    let primal: Vec<f64> = sol.primal.iter().map(Scalar::to_f64).collect();
    let dual: Vec<f64> = sol.dual.iter().map(Scalar::to_f64).collect();
    let value = sol.value.to_f64();
    match validate(&a, &b, &primal, &dual, value) {
        Some(g) => build(g, value, true),
        None => Err(Error::LpNumericalFailure(format!(
            "covering LP solution failed validation at tolerance {LP_VALIDATION_TOL}"
        ))),
    }
}

/// Checks primal and dual feasibility and equal objectives at
/// [`LP_VALIDATION_TOL`]; returns the cover weights with round-off
/// negatives clipped.
fn validate(a: &[Vec<f64>], b: &[f64], y: &[f64], g: &[f64], value: f64) -> Option<Vec<f64>> {
    let tol = LP_VALIDATION_TOL;
    if !value.is_finite() || g.iter().chain(y).any(|x| !x.is_finite() || *x < -tol) {
        return None;
    }
    let g: Vec<f64> = g.iter().map(|x| x.max(0.0)).collect();
    for j in 0..y.len() {
        let cov: CompensatedSum = (0..a.len()).map(|i| a[i][j] * g[i]).collect();
        if cov.value() < 1.0 - tol {
            return None;
        }
    }
    for (row, bi) in a.iter().zip(b) {
        let lhs: CompensatedSum = row.iter().zip(y).map(|(x, yj)| x * yj).collect();
        if lhs.value() > bi + tol {
            return None;
        }
    }
    let cover_cost: CompensatedSum = g.iter().zip(b).map(|(x, w)| x * w).collect();
    let packing: CompensatedSum = y.iter().copied().collect();
    let scale = value.abs().max(1.0);
    if (cover_cost.value() - value).abs() > tol * scale || (packing.value() - value).abs() > tol * scale {
        return None;
    }
    Some(g)
}

/// The fractional expectation-threshold `q_f(F)`, by bisection on the LP
/// optimum. `N ≤ 5`.
pub fn qf_exact(family: &MonotoneFamily, tol: f64) -> Result<Witnessed<FractionalCertificate>> {
    family.ground().require_at_most(MAX_LP)?;
    let dir = family.direction();
    threshold_of(family, tol, "covering LP", |p| {
        let w = direction_weights(family.ground(), p, dir)?;
        let sol = lp_min_cover(family, &w)?;
        Ok((sol.value, sol.certificate))
    })
}

/// `p_c`, `q_f` and `q` of one family and whether they are ordered as
/// `p_c ≤ q_f ≤ q` (Down) or `q ≤ q_f ≤ p_c` (Up).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub direction: Direction,
    pub p_c: f64,
    pub q_f: f64,
    pub q: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Computes the three thresholds of a nontrivial family with `N ≤ 4`.
pub fn verify_sandwich(family: &MonotoneFamily) -> Result<SandwichReport> {
    family.ground().require_at_most(MAX_Q_EXACT)?;
    let tol = 1e-8;
    let p_c = threshold_exact(family, tol)?.value();
    let q_f = qf_exact(family, tol)?.value();
    let q = q_exact(family, tol)?.value();
    let t = SANDWICH_TOL;
    let holds = match family.direction() {
        Direction::Down => p_c <= q_f + t && q_f <= q + t,
        Direction::Up => q <= q_f + t && q_f <= p_c + t,
    };
    Ok(SandwichReport {
        direction: family.direction(),
        p_c,
        q_f,
        q,
        tolerance: t,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::fixtures::*;
    use crate::family::{enumerate_monotone_families, mu_p_exact};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn cert(n: usize, sets: &[&[usize]]) -> Certificate {
        Certificate::new(GroundSet::new(n).unwrap(), masks(n, sets)).unwrap()
    }

    fn t3_two_edge_cover() -> Certificate {
        cert(3, &[&[0, 1], &[0, 2], &[1, 2]])
    }

    /// Cheapest cover by trying every subfamily of `2^X`. `N ≤ 3`.
    fn brute_min_cover(f: &MonotoneFamily, p: f64) -> f64 {
        let n = f.size();
        let dir = f.direction();
        let members = f.member_bits().unwrap();
        let sets = 1u64 << n;
        let mut best = f64::INFINITY;
        for choice in 0u64..(1 << sets) {
            let chosen: Vec<u64> = (0..sets).filter(|t| choice >> t & 1 == 1).collect();
            if members.iter().all(|&s| chosen.iter().any(|&t| covers_bits(t, s, dir))) {
                let cost: f64 = chosen
                    .iter()
                    .map(|&t| set_weight(&SubsetMask::from_u64(n, t), p, dir))
                    .sum();
                best = best.min(cost);
            }
        }
        best
    }

    #[test]
    fn cost_examples() {
        let c = cert(2, &[&[0], &[1]]);
        assert_abs_diff_eq!(cert_cost(&c, 0.75, Direction::Down).unwrap(), 0.5, epsilon = 1e-15);
        for &p in &[0.0, 0.3, 1.0] {
            assert_eq!(cert_cost(&cert(3, &[&[]]), p, Direction::Up).unwrap(), 1.0);
            assert_eq!(cert_cost(&cert(3, &[&[0, 1, 2]]), p, Direction::Down).unwrap(), 1.0);
        }
        assert!(cert_cost(&c, 1.5, Direction::Up).is_err());
    }

    #[test]
    fn cost_survives_huge_ground_sets() {
        let g = GroundSet::new(5000).unwrap();
        let c = Certificate::new(g, vec![SubsetMask::empty(5000)]).unwrap();
        let cost = cert_cost(&c, 0.5, Direction::Down).unwrap();
        assert!(cost == 0.0 || cost.is_normal() || cost.is_subnormal());
    }

    #[test]
    fn cover_examples() {
        let f = down_pair();
        assert!(covers(&cert(2, &[&[0], &[1]]), &f).unwrap().covers);
        let miss = covers(&cert(2, &[&[0]]), &f).unwrap();
        assert!(!miss.covers);
        assert_eq!(miss.counterexample.unwrap().to_bitstring(), "01");
        assert!(covers(&t3_two_edge_cover(), &t3()).unwrap().covers);
        assert_eq!(covers(&t3_two_edge_cover(), &t3()).unwrap().checked, 7);
    }

    #[test]
    fn sampled_cover_check() {
        let f = MonotoneFamily::triangle_free(9).unwrap();
        let everything = Certificate::new(f.ground().clone(), vec![f.ground().full_set()]).unwrap();
        assert!(covers_sampled(&everything, &f, 500, 1).unwrap().covers);
        let nothing = Certificate::new(f.ground().clone(), vec![f.ground().empty_set()]).unwrap();
        let r = covers_sampled(&nothing, &f, 500, 1).unwrap();
        assert!(!r.covers && !r.exhaustive);
        assert!(f.contains(r.counterexample.as_ref().unwrap()));
    }

    #[test]
    fn verdict_requires_cover_and_cost() {
        let v = verdict(&cert(2, &[&[0], &[1]]), &down_pair(), 0.75).unwrap();
        assert!(v.covers && v.p_small);
        let v = verdict(&cert(2, &[&[0], &[1]]), &down_pair(), 0.7).unwrap();
        assert!(v.covers && !v.p_small);
        let v = verdict(&cert(2, &[&[0]]), &down_pair(), 1.0).unwrap();
        assert!(!v.covers && !v.p_small);
    }

    #[test]
    fn integral_cover_matches_brute_force() {
        for n in 1..=3 {
            for dir in [Direction::Down, Direction::Up] {
                for f in enumerate_monotone_families(n, dir).unwrap() {
                    for &p in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
                        let s = min_integral_cover(&f, p).unwrap();
                        assert_abs_diff_eq!(s.cost, brute_min_cover(&f, p), epsilon = 1e-12);
                        assert!(covers(&s.certificate, &f).unwrap().covers);
                    }
                }
            }
        }
    }

    #[test]
    fn q_examples() {
        let q = q_exact(&down_pair(), 1e-6).unwrap();
        assert_abs_diff_eq!(q.value(), 0.75, epsilon = 1e-6);
        assert_eq!(q.witness, cert(2, &[&[0], &[1]]));
        let q = q_exact(&t3(), 1e-6).unwrap();
        assert_abs_diff_eq!(q.value(), 5.0 / 6.0, epsilon = 1e-6);
        assert_eq!(q.witness.members(), t3_two_edge_cover().members());
        let q = q_exact(&up_pair(), 1e-6).unwrap();
        assert_abs_diff_eq!(q.value(), 0.25, epsilon = 1e-6);
        assert_eq!(q.witness, cert(2, &[&[0], &[1]]));
        let big = MonotoneFamily::triangle_free(4).unwrap();
        assert_eq!(q_exact(&big, 1e-6).unwrap_err(), Error::GroundSetTooLarge { size: 6, max: 4 });
    }

    #[test]
    fn qf_examples() {
        // Closed forms: min_t t + 2(1−t)(1−p), min_a a + 3(1−a)(1−p),
        // min_t t + 2(1−t)p.
        assert_abs_diff_eq!(qf_exact(&down_pair(), 1e-7).unwrap().value(), 0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(qf_exact(&t3(), 1e-7).unwrap().value(), 5.0 / 6.0, epsilon = 1e-6);
        assert_abs_diff_eq!(qf_exact(&up_pair(), 1e-7).unwrap().value(), 0.25, epsilon = 1e-6);
        let w = qf_exact(&t3(), 1e-7).unwrap();
        assert!(w.witness.covers(&t3(), LP_VALIDATION_TOL).unwrap());
        assert!(w.cost <= 0.5 + 1e-9);
    }

    #[test]
    fn lp_examples() {
        let g = GroundSet::new(2).unwrap();
        let only_empty = MonotoneFamily::explicit(g.clone(), Direction::Down, masks(2, &[&[]])).unwrap();
        let ones: BTreeMap<SubsetMask, f64> = (0..4u64).map(|t| (SubsetMask::from_u64(2, t), 1.0)).collect();
        let sol = lp_min_cover(&only_empty, &ones).unwrap();
        assert_abs_diff_eq!(sol.value, 1.0, epsilon = 1e-12);
        assert_eq!(sol.certificate.weights(), &[(SubsetMask::empty(2), 1.0)]);

        let w = direction_weights(&g, 0.75, Direction::Down).unwrap();
        let sol = lp_min_cover(&down_pair(), &w).unwrap();
        assert_abs_diff_eq!(sol.value, 0.5, epsilon = 1e-12);
        let exact = lp_min_cover_with(&down_pair(), &w, LpArithmetic::Exact).unwrap();
        assert!(exact.exact);
        assert_abs_diff_eq!(exact.value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lp_rejects_bad_inputs() {
        let mut w = direction_weights(&GroundSet::new(2).unwrap(), 0.5, Direction::Down).unwrap();
        w.insert(SubsetMask::full(2), -1.0);
        assert!(lp_min_cover(&down_pair(), &w).is_err());
        let mut partial = BTreeMap::new();
        partial.insert(SubsetMask::from_u64(2, 1), 1.0);
        assert!(lp_min_cover(&down_pair(), &partial).is_err());
        let big = MonotoneFamily::triangle_free(4).unwrap();
        assert!(matches!(
            lp_min_cover(&big, &BTreeMap::new()),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn lp_value_is_at_most_integral_cost() {
        for f in enumerate_monotone_families(3, Direction::Down).unwrap() {
            for &p in &[0.2, 0.5, 0.8] {
                let w = direction_weights(f.ground(), p, Direction::Down).unwrap();
                let lp = lp_min_cover(&f, &w).unwrap();
                let integral = brute_min_cover(&f, p);
                assert!(lp.value <= integral + 1e-9, "{} > {integral}", lp.value);
                let exact = lp_min_cover_with(&f, &w, LpArithmetic::Exact).unwrap();
                assert_abs_diff_eq!(lp.value, exact.value, epsilon = 1e-9);
                assert!(lp.certificate.covers(&f, 1e-9).unwrap());
                assert_abs_diff_eq!(lp.certificate.cost(p, Direction::Down).unwrap(), lp.value, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn q_f_between_q_and_p_c_on_three_elements() {
        for dir in [Direction::Down, Direction::Up] {
            for f in enumerate_monotone_families(3, dir).unwrap() {
                if !f.is_nontrivial() {
                    continue;
                }
                let r = verify_sandwich(&f).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
    }

    #[test]
    fn p_small_implies_small_measure() {
        for n in 1..=4 {
            for dir in [Direction::Down, Direction::Up] {
                for f in enumerate_monotone_families(n, dir).unwrap() {
                    if !f.is_nontrivial() {
                        continue;
                    }
                    let q = q_exact(&f, 1e-6).unwrap();
                    let v = verdict(&q.witness, &f, q.feasible_p).unwrap();
                    assert!(v.p_small);
                    assert!(mu_p_exact(&f, q.feasible_p).unwrap() <= 0.5 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sandwich_examples() {
        let r = verify_sandwich(&down_pair()).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.p_c, 0.70711, epsilon = 1e-5);
        let r = verify_sandwich(&up_pair()).unwrap();
        assert!(r.holds);
        assert_abs_diff_eq!(r.p_c, 0.29289, epsilon = 1e-5);
        assert_abs_diff_eq!(r.q, 0.25, epsilon = 1e-5);
    }

    #[test]
    fn json_round_trips() {
        let c = Certificate::from_json(r#"{"ground_size":3,"members":["110","101","011","110"]}"#).unwrap();
        assert_eq!(c, t3_two_edge_cover());
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
        assert!(Certificate::from_json(r#"{"ground_size":3,"members":["11"]}"#).is_err());
        let f = FractionalCertificate::from_json(
            r#"{"ground_size":2,"weights":[{"set":"10","weight":0.5},{"set":"01","weight":0.0}]}"#,
        )
        .unwrap();
        assert_eq!(f.weights().len(), 1);
        assert_eq!(FractionalCertificate::from_json(&f.to_json()).unwrap(), f);
        assert!(FractionalCertificate::from_json(r#"{"ground_size":2,"weights":[{"set":"10","weight":-1}]}"#).is_err());
    }

    fn arb_cert(n: usize) -> impl Strategy<Value = Certificate> {
        proptest::collection::vec(0u64..(1 << n), 0..8).prop_map(move |bits| {
            Certificate::new(
                GroundSet::new(n).unwrap(),
                bits.into_iter().map(|b| SubsetMask::from_u64(n, b)).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn cost_is_monotone_in_p(c in arb_cert(6)) {
            let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
            for w in grid.windows(2) {
                let up = (cert_cost(&c, w[0], Direction::Up).unwrap(), cert_cost(&c, w[1], Direction::Up).unwrap());
                prop_assert!(up.0 <= up.1 + 1e-12);
                let dn = (cert_cost(&c, w[0], Direction::Down).unwrap(), cert_cost(&c, w[1], Direction::Down).unwrap());
                prop_assert!(dn.0 + 1e-12 >= dn.1);
            }
        }

        #[test]
        fn lp_value_decreases_with_weights(idx in 0usize..168, seed in any::<u64>()) {
            use rand::Rng;
            let f = &enumerate_monotone_families(4, Direction::Down).unwrap()[idx];
            let mut r = crate::rng::seeded_rng(seed);
            let hi: BTreeMap<SubsetMask, f64> =
                (0..16u64).map(|t| (SubsetMask::from_u64(4, t), r.random::<f64>())).collect();
            let lo: BTreeMap<SubsetMask, f64> =
                hi.iter().map(|(k, &v)| (k.clone(), v * r.random::<f64>())).collect();
            let a = lp_min_cover(f, &hi).unwrap().value;
            let b = lp_min_cover(f, &lo).unwrap().value;
            prop_assert!(b <= a + 1e-9);
        }
    }
}
