//! Monte Carlo checks of the exponential-moment and tail bounds for closed
//! triangles, and the hitting experiments built on maximal triangle-free
//! subgraphs of `G(n, p)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{count_closed, h_good_edges, Graph};
use crate::random::{sample_digraph, sample_gnp};
use crate::rng::{self, bernoulli};
use crate::stats::{ln_binomial, log_sum_exp, CompensatedSum, LogSumExp, Proportion, Z95};

/// `γ'` of the directed tail bound.
pub const GAMMA_DIRECTED: f64 = 1.0 / 5.0;
/// `γ = γ'/2` of the undirected tail bound.
pub const GAMMA_UNDIRECTED: f64 = 1.0 / 10.0;
/// `ε = ε'`: both tail bounds need `p ≤ ε n^{-1/2}`.
pub const EPSILON: f64 = 1.0 / 20.0;
/// Standard errors of slack allowed before a bound counts as violated.
pub const ASSERT_SIGMAS: f64 = 3.0;

/// Graphs with nonnegative weights `a(H)`, all on the same vertex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFamily {
    n: usize,
    members: Vec<(Graph, f64)>,
}

impl WeightedFamily {
    pub fn new(n: usize, members: Vec<(Graph, f64)>) -> Result<Self> {
        for (h, a) in &members {
            if h.n() != n {
                return Err(Error::InvalidArgument(format!("member on {} vertices, expected {n}", h.n())));
            }
            if !a.is_finite() || *a < 0.0 {
                return Err(Error::InvalidArgument(format!("weight {a} is not a nonnegative number")));
            }
        }
        Ok(Self { n, members })
    }

    /// Every member with weight 1.
    pub fn unweighted(n: usize, graphs: Vec<Graph>) -> Result<Self> {
        Self::new(n, graphs.into_iter().map(|h| (h, 1.0)).collect())
    }

    /// Weights `a(H) = exp(δ e(H)/√n) / (4|H|)`, for which the weighted
    /// condition sum equals `1/4`.
    pub fn scaled_for_condition(n: usize, graphs: Vec<Graph>, delta: f64) -> Result<Self> {
        let k = graphs.len() as f64;
        let members = graphs
            .into_iter()
            .map(|h| {
                let a = (delta * h.edge_count() as f64 / (n as f64).sqrt()).exp() / (4.0 * k);
                (h, a)
            })
            .collect();
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[(Graph, f64)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// An upper bound on the probability of an event.
    Probability,
    /// An upper bound on an exponential moment; never vacuous.
    Moment,
}

/// Per-trial data behind a [`DeviationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationTrial {
    pub trial: u64,
    /// `X = e(H[U])`, `e(H ∩ D̂)` or `e(H ∩ Γ²)`.
    pub statistic: u64,
    /// `|U|`, `Δ(D)` or `Δ(Γ)`.
    pub size: u64,
    /// `Z = 1[|U| ≤ 5pn]` for the moment check, the event for tail checks.
    pub indicator: bool,
    /// `ZX/(5pn)` for the moment check; unused (0) for tail checks.
    pub log_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub kind: BoundKind,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Trials with the event (tail checks) or with `Z = 1` (moment check).
    pub event_count: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    pub bound: f64,
    /// A probability bound `≥ 1`; such bounds are reported, not asserted.
    pub vacuous: bool,
    /// `estimate ≤ bound + 3·std_error`, or vacuous.
    pub passes: bool,
    pub records: Vec<DeviationTrial>,
}

impl DeviationReport {
    fn finish(mut self) -> Self {
        self.vacuous = self.kind == BoundKind::Probability && self.bound >= 1.0;
        self.passes = self.vacuous || self.estimate <= self.bound + ASSERT_SIGMAS * self.std_error;
        self
    }
}

fn require_bipartite(h: &Graph) -> Result<()> {
    if h.is_bipartite() {
        Ok(())
    } else {
        Err(Error::NotBipartite)
    }
}

fn require_small_p(p: f64, n: usize) -> Result<()> {
    check_probability(p)?;
    let max = EPSILON / (n as f64).sqrt();
    if p > max {
        return Err(Error::PTooLarge { p, max });
    }
    Ok(())
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Estimates `E[exp(ZX/(5pn))]` for `X = e(H[U])`, `U` a `p`-random vertex
/// subset and `Z = 1[|U| ≤ 5pn]`, against `exp(pm/n)`. The mean is taken in
/// log space.
pub fn moment_check(h: &Graph, p: f64, trials: u64, seed: u64) -> Result<DeviationReport> {
    require_bipartite(h)?;
    check_probability(p)?;
    if p == 0.0 {
        return Err(Error::InvalidP(p));
    }
    require_trials(trials)?;
    let n = h.n();
    let m = h.edge_count();
    let scale = 5.0 * p * n as f64;
    let words = n.div_ceil(64).max(1);
    let records: Vec<DeviationTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::trial_rng(seed, t);
            let mut u = vec![0u64; words];
            for v in 0..n {
                if bernoulli(&mut r, p) {
                    u[v / 64] |= 1 << (v % 64);
                }
            }
            let size = u.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            let x = h.induced_edge_count(&u) as u64;
            let z = size as f64 <= scale;
            DeviationTrial {
                trial: t,
                statistic: x,
                size,
                indicator: z,
                log_value: if z { x as f64 / scale } else { 0.0 },
            }
        })
        .collect();
    let mut acc = LogSumExp::new();
    for rec in &records {
        acc.push(rec.log_value);
    }
    let std_error = acc.std_error();
    Ok(DeviationReport {
        kind: BoundKind::Moment,
        n,
        m,
        p,
        trials,
        seed,
        event_count: records.iter().filter(|r| r.indicator).count() as u64,
        estimate: acc.mean(),
        std_error,
        half_width: Z95 * std_error,
        bound: (p * m as f64 / n as f64).exp(),
        vacuous: false,
        passes: false,
        records,
    }
    .finish())
}

fn probability_report(
    n: usize,
    m: usize,
    p: f64,
    seed: u64,
    bound: f64,
    records: Vec<DeviationTrial>,
) -> DeviationReport {
    let trials = records.len() as u64;
    let events = records.iter().filter(|r| r.indicator).count() as u64;
    let prop = Proportion::new(events, trials);
    DeviationReport {
        kind: BoundKind::Probability,
        n,
        m,
        p,
        trials,
        seed,
        event_count: events,
        estimate: prop.estimate(),
        std_error: prop.std_error(),
        half_width: prop.half_width(),
        bound,
        vacuous: false,
        passes: false,
        records,
    }
    .finish()
}

/// `P(e(H ∩ D̂) ≥ m/16 ∧ Δ(D) ≤ 5pn − 1)` for `D ~ G⃗(n, p)`, against
/// `exp(−γ' m/√n)` with `γ' = 1/5`.
pub fn tail_check_directed(h: &Graph, p: f64, trials: u64, seed: u64) -> Result<DeviationReport> {
    require_bipartite(h)?;
    let n = h.n();
    require_small_p(p, n)?;
    require_trials(trials)?;
    let m = h.edge_count();
    let degree_cap = 5.0 * p * n as f64 - 1.0;
    let records: Vec<DeviationTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let d = sample_digraph(n, p, rng::substream(seed, t), false).expect("p validated");
            let closed = h.intersection(&d.hat()).edge_count() as u64;
            let delta = d.max_out_degree() as u64;
            DeviationTrial {
                trial: t,
                statistic: closed,
                size: delta,
                indicator: 16 * closed >= m as u64 && delta as f64 <= degree_cap,
                log_value: 0.0,
            }
        })
        .collect();
    let bound = (-GAMMA_DIRECTED * m as f64 / (n as f64).sqrt()).exp();
    Ok(probability_report(n, m, p, seed, bound, records))
}

/// `P(e(H ∩ Γ²) ≥ 3m/4 ∧ Δ(Γ) < 2pn)` for `Γ ~ G(n, p)`, against
/// `15 exp(−γ m/√n)` with `γ = 1/10`.
///
/// With `degree_filter = false` the degree condition is dropped; this
/// diagnostic mode is monotone in `p` under the shared-seed coupling.
pub fn tail_check_undirected(
    h: &Graph,
    p: f64,
    trials: u64,
    seed: u64,
    degree_filter: bool,
) -> Result<DeviationReport> {
    let n = h.n();
    require_small_p(p, n)?;
    require_trials(trials)?;
    let m = h.edge_count();
    let degree_cap = 2.0 * p * n as f64;
    let records: Vec<DeviationTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let gamma = sample_gnp(n, p, rng::substream(seed, t)).expect("p validated");
            let closed = count_closed(h, &gamma) as u64;
            let delta = gamma.max_degree() as u64;
            let degree_ok = !degree_filter || (delta as f64) < degree_cap;
            DeviationTrial {
                trial: t,
                statistic: closed,
                size: delta,
                indicator: 4 * closed >= 3 * m as u64 && degree_ok,
                log_value: 0.0,
            }
        })
        .collect();
    let bound = 15.0 * (-GAMMA_UNDIRECTED * m as f64 / (n as f64).sqrt()).exp();
    Ok(probability_report(n, m, p, seed, bound, records))
}

/// One run of the hitting experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingRun {
    pub run: u64,
    pub edges: usize,
    pub max_degree: usize,
    /// `Z`: `Δ(Γ) ≥ 2pn`.
    pub z: bool,
    /// Members with no good edge in `Γ` (`X_H`).
    pub x_count: usize,
    /// Members with `e(H ∩ Γ²) ≥ 3e(H)/4` (`Y_H`).
    pub y_count: usize,
    /// Members meeting the maximal triangle-free subgraph.
    pub hit_count: usize,
    /// Members with a good edge that were nevertheless missed.
    pub implication_violations: usize,
    /// `[∃H missed] ⇒ [Z ∨ ∃H (Y_H ∧ ¬Z) ∨ ∃H (X_H ∧ ¬Y_H)]`.
    pub decomposition_holds: bool,
    /// Per member: whether it was hit. Same order as the input family.
    pub hits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingReport {
    pub n: usize,
    pub p: f64,
    pub runs: u64,
    pub seed: u64,
    pub members: usize,
    /// Per member: fraction of runs in which it was hit.
    pub hit_rates: Vec<f64>,
    /// Fraction of runs in which every member was hit.
    pub all_hit_rate: f64,
    pub implication_violations: u64,
    pub decomposition_violations: u64,
    pub records: Vec<HittingRun>,
}

impl HittingReport {
    pub fn passes(&self) -> bool {
        self.implication_violations == 0 && self.decomposition_violations == 0
    }
}

fn check_family(family: &[Graph], n: usize) -> Result<()> {
    match family.iter().find(|h| h.n() != n) {
        Some(h) => Err(Error::InvalidArgument(format!("member on {} vertices, expected {n}", h.n()))),
        None => Ok(()),
    }
}

/// Run `r` draws `Γ ~ G(n, p)` from substream `r` of `seed` and takes the
/// greedy maximal triangle-free subgraph over an edge order drawn from the
/// next substream level.
fn hitting_run(family: &[Graph], n: usize, p: f64, seed: u64, run: u64) -> (Graph, HittingRun) {
    let run_seed = rng::substream(seed, run);
    let gamma = sample_gnp(n, p, run_seed).expect("p validated");
    let g = gamma.maximal_triangle_free(rng::substream(run_seed, 1));
    let max_degree = gamma.max_degree();
    let z = max_degree as f64 >= 2.0 * p * n as f64;
    let (mut x_count, mut y_count, mut violations) = (0, 0, 0);
    let (mut y_not_z, mut x_not_y, mut any_missed) = (false, false, false);
    let mut hits = Vec::with_capacity(family.len());
    for h in family {
        let x = h_good_edges(h, &gamma).is_empty();
        let y = 4 * count_closed(h, &gamma) >= 3 * h.edge_count();
        let hit = !g.is_disjoint_from(h);
        x_count += x as usize;
        y_count += y as usize;
        violations += (!x && !hit) as usize;
        y_not_z |= y && !z;
        x_not_y |= x && !y;
        any_missed |= !hit;
        hits.push(hit);
    }
    let record = HittingRun {
        run,
        edges: gamma.edge_count(),
        max_degree,
        z,
        x_count,
        y_count,
        hit_count: hits.iter().filter(|&&b| b).count(),
        implication_violations: violations,
        decomposition_holds: !any_missed || z || y_not_z || x_not_y,
        hits,
    };
    (g, record)
}

/// For each run, samples `Γ`, builds a maximal triangle-free `G ⊆ Γ` and
/// records `X_H`, `Y_H`, `Z` and `G ∩ H ≠ ∅` for every member, checking the
/// good-edge implication and the event decomposition.
pub fn hitting_experiment(family: &[Graph], n: usize, p: f64, runs: u64, seed: u64) -> Result<HittingReport> {
    check_probability(p)?;
    check_family(family, n)?;
    require_trials(runs)?;
    let records: Vec<HittingRun> = (0..runs)
        .into_par_iter()
        .map(|r| hitting_run(family, n, p, seed, r).1)
        .collect();
    let hit_rates = (0..family.len())
        .map(|i| records.iter().filter(|r| r.hits[i]).count() as f64 / runs as f64)
        .collect();
    Ok(HittingReport {
        n,
        p,
        runs,
        seed,
        members: family.len(),
        hit_rates,
        all_hit_rate: records.iter().filter(|r| r.hit_count == family.len()).count() as f64 / runs as f64,
        implication_violations: records.iter().map(|r| r.implication_violations as u64).sum(),
        decomposition_violations: records.iter().filter(|r| !r.decomposition_holds).count() as u64,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalHittingReport {
    pub n: usize,
    pub p: f64,
    pub runs: u64,
    pub seed: u64,
    /// Per run: `Σ_{H : G ∩ H = ∅} a(H)`.
    pub missed_weight: Vec<f64>,
    pub mean_missed_weight: f64,
    pub max_missed_weight: f64,
    /// Fraction of runs with missed weight `< 1`.
    pub below_one_rate: f64,
}

/// The missed weight of the maximal triangle-free subgraph in each run. Runs
/// use the same `Γ` and edge order as [`hitting_experiment`] for equal seeds.
pub fn fractional_hitting(
    wfamily: &WeightedFamily,
    n: usize,
    p: f64,
    runs: u64,
    seed: u64,
) -> Result<FractionalHittingReport> {
    check_probability(p)?;
    require_trials(runs)?;
    if wfamily.n() != n {
        return Err(Error::InvalidArgument(format!(
            "family is on {} vertices, expected {n}",
            wfamily.n()
        )));
    }
    let graphs: Vec<Graph> = wfamily.members().iter().map(|(h, _)| h.clone()).collect();
    let missed_weight: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let (_, rec) = hitting_run(&graphs, n, p, seed, r);
            rec.hits
                .iter()
                .zip(wfamily.members())
                .filter(|(hit, _)| !**hit)
                .map(|(_, (_, a))| *a)
                .collect::<CompensatedSum>()
                .value()
        })
        .collect();
    let mean = missed_weight.iter().copied().collect::<CompensatedSum>().value() / runs as f64;
    Ok(FractionalHittingReport {
        n,
        p,
        runs,
        seed,
        mean_missed_weight: mean,
        max_missed_weight: missed_weight.iter().copied().fold(0.0, f64::max),
        below_one_rate: missed_weight.iter().filter(|&&w| w < 1.0).count() as f64 / runs as f64,
        missed_weight,
    })
}

/// `min(ε/4, γ)/5`.
pub fn delta_budget(epsilon: f64, gamma: f64) -> Result<f64> {
    if !(epsilon > 0.0 && gamma > 0.0) || !epsilon.is_finite() || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon and gamma must be positive, got {epsilon} and {gamma}"
        )));
    }
    Ok((epsilon / 4.0).min(gamma) / 5.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `ln Σ_H a(H) exp(−δ e(H)/√n)`; `−∞` for an empty sum.
    pub log_sum: f64,
    pub sum: f64,
    /// `sum < 1/2`, decided in log space.
    pub satisfied: bool,
}

impl ConditionReport {
    fn from_log(log_sum: f64) -> Self {
        ConditionReport {
            log_sum,
            sum: log_sum.exp(),
            satisfied: log_sum < -std::f64::consts::LN_2,
        }
    }
}

fn require_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")))
    }
}

/// `Σ_H a(H) exp(−δ e(H)/√n) < 1/2`, summed by log-sum-exp.
pub fn family_condition_check(wfamily: &WeightedFamily, delta: f64, n: usize) -> Result<ConditionReport> {
    require_delta(delta)?;
    let sqrt_n = (n as f64).sqrt();
    let logs: Vec<f64> = wfamily
        .members()
        .iter()
        .filter(|(_, a)| *a > 0.0)
        .map(|(h, a)| a.ln() - delta * h.edge_count() as f64 / sqrt_n)
        .collect();
    Ok(ConditionReport::from_log(log_sum_exp(&logs)))
}

/// The condition for the family of all `C(n, k)` cliques of size `k`, each
/// with weight 1: `ln C(n, k) − δ C(k, 2)/√n < ln(1/2)`.
pub fn clique_family_condition(n: u64, k: u64, delta: f64) -> Result<ConditionReport> {
    require_delta(delta)?;
    if k > n {
        return Ok(ConditionReport::from_log(f64::NEG_INFINITY));
    }
    let edges = k as f64 * (k as f64 - 1.0) / 2.0;
    Ok(ConditionReport::from_log(ln_binomial(n, k) - delta * edges / (n as f64).sqrt()))
}

/// Clique size `⌈C √n ln n⌉` used for the Ramsey application.
pub fn ramsey_clique_size(n: u64, c: f64) -> u64 {
    (c * (n as f64).sqrt() * (n as f64).ln()).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bipartite_random(n: usize, m: usize, seed: u64) -> Graph {
        use rand::Rng;
        let mut r = rng::seeded_rng(seed);
        let mut g = Graph::empty(n);
        while g.edge_count() < m {
            let u = r.random_range(0..n / 2);
            let v = n / 2 + r.random_range(0..n - n / 2);
            g.add_edge(u, v);
        }
        g
    }

    #[test]
    fn moment_trivial_cases() {
        let r = moment_check(&Graph::empty(10), 0.1, 1000, 1).unwrap();
        assert_eq!((r.estimate, r.bound), (1.0, 1.0));
        assert!(r.passes && !r.vacuous);
        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = moment_check(&edge, 1.0, 100, 1).unwrap();
        assert_abs_diff_eq!(r.estimate, 0.1f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.bound, 0.5f64.exp(), epsilon = 1e-12);
        assert!(r.passes);
    }

    #[test]
    fn moment_rejects_non_bipartite() {
        assert_eq!(moment_check(&Graph::complete(3), 0.1, 10, 1).unwrap_err(), Error::NotBipartite);
        assert!(moment_check(&Graph::cycle(4), 0.0, 10, 1).is_err());
    }

    #[test]
    fn moment_bound_holds() {
        let mut c4 = Graph::empty(64);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            c4.add_edge(u, v);
        }
        let r = moment_check(&c4, 1.0 / 160.0, 20_000, 9).unwrap();
        assert!(r.passes, "{} vs {}", r.estimate, r.bound);
        let dense = bipartite_random(16, 40, 3);
        let r = moment_check(&dense, 0.5, 20_000, 4).unwrap();
        assert!(r.passes, "{} vs {}", r.estimate, r.bound);
    }

    #[test]
    fn moment_estimate_matches_exact_expectation() {
        // Single edge, n = 4, p = 1/2: 5pn = 10, |U| ≤ 10 always, so
        // E = 1 − 1/4 + e^{1/10}/4.
        let mut g = Graph::empty(4);
        g.add_edge(0, 1);
        let r = moment_check(&g, 0.5, 200_000, 5).unwrap();
        let exact = 0.75 + 0.1f64.exp() / 4.0;
        assert!((r.estimate - exact).abs() <= 4.0 * r.std_error, "{} {exact}", r.estimate);
    }

    #[test]
    fn directed_tail_cases() {
        let r = tail_check_directed(&Graph::empty(64), 1.0 / 160.0, 500, 1).unwrap();
        assert!(r.vacuous && r.passes);
        let h = Graph::matching(64, 32);
        let r = tail_check_directed(&h, 1.0 / 160.0, 5000, 2).unwrap();
        assert_abs_diff_eq!(r.bound, (-0.8f64).exp(), epsilon = 1e-12);
        assert!(!r.vacuous && r.passes);
        assert_eq!(
            tail_check_directed(&h, 0.01, 10, 1).unwrap_err(),
            Error::PTooLarge { p: 0.01, max: 1.0 / 160.0 }
        );
        assert_eq!(tail_check_directed(&Graph::cycle(5), 0.001, 10, 1).unwrap_err(), Error::NotBipartite);
    }

    #[test]
    fn directed_event_along_nested_stars() {
        // For m ≤ 16 the count threshold ⌈m/16⌉ is 1 throughout the chain
        // S_4 ⊂ S_8 ⊂ S_16, so with shared digraphs the event can only be
        // gained as edges are added.
        let p = 1.0 / 160.0;
        let reports: Vec<DeviationReport> = [4, 8, 16]
            .iter()
            .map(|&k| tail_check_directed(&Graph::star(64, k), p, 4000, 11).unwrap())
            .collect();
        for w in reports.windows(2) {
            for (a, b) in w[0].records.iter().zip(&w[1].records) {
                assert!(a.statistic <= b.statistic);
                assert!(!a.indicator || b.indicator);
            }
            assert!(w[0].estimate <= w[1].estimate);
        }
    }

    #[test]
    fn undirected_tail_cases() {
        let h = Graph::matching(64, 8);
        let r = tail_check_undirected(&h, 1.0 / 160.0, 200, 1, true).unwrap();
        assert!(r.vacuous && r.passes);
        assert_abs_diff_eq!(r.bound, 15.0 * (-0.1f64).exp(), epsilon = 1e-12);
        let k8 = Graph::clique_on(64, &(0..8).collect::<Vec<_>>());
        let r = tail_check_undirected(&k8, 1.0 / 160.0, 2000, 2, true).unwrap();
        assert!(r.estimate < 0.01 && r.passes);
    }

    #[test]
    fn closed_count_is_monotone_in_p() {
        // Edge draws are uniform thresholds, so equal seeds nest Γ_{p/2} ⊆ Γ_p.
        let h = Graph::clique_on(64, &(0..12).collect::<Vec<_>>());
        let p = 1.0 / 160.0;
        let a = tail_check_undirected(&h, p / 2.0, 2000, 3, false).unwrap();
        let b = tail_check_undirected(&h, p, 2000, 3, false).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert!(x.statistic <= y.statistic);
            assert!(!x.indicator || y.indicator);
        }
        assert!(a.estimate <= b.estimate);
    }

    #[test]
    fn hitting_examples() {
        let n = 12;
        let r = hitting_experiment(&[Graph::complete(n), Graph::empty(n)], n, 0.3, 200, 1).unwrap();
        assert!(r.passes());
        for rec in &r.records {
            assert_eq!(rec.hits[0], rec.edges > 0);
            assert!(!rec.hits[1]);
        }
        assert_eq!(r.hit_rates[1], 0.0);
    }

    #[test]
    fn hitting_implication_on_random_families() {
        let n = 30;
        let family: Vec<Graph> = (0..20).map(|i| sample_gnp(n, 0.4, 100 + i).unwrap()).collect();
        let r = hitting_experiment(&family, n, 0.1, 100, 7).unwrap();
        assert_eq!(r.implication_violations, 0);
        assert_eq!(r.decomposition_violations, 0);
    }

    #[test]
    fn fractional_examples() {
        let n = 10;
        let zero = WeightedFamily::new(n, vec![(Graph::complete(n), 0.0)]).unwrap();
        let r = fractional_hitting(&zero, n, 0.3, 50, 1).unwrap();
        assert!(r.missed_weight.iter().all(|&w| w == 0.0));
        assert_eq!(r.below_one_rate, 1.0);
        let empty = WeightedFamily::new(n, vec![(Graph::empty(n), 2.0)]).unwrap();
        let r = fractional_hitting(&empty, n, 0.3, 50, 1).unwrap();
        assert!(r.missed_weight.iter().all(|&w| w == 2.0));
        assert_eq!(r.below_one_rate, 0.0);
        assert!(WeightedFamily::new(n, vec![(Graph::empty(n), -1.0)]).is_err());
        assert!(WeightedFamily::new(n, vec![(Graph::empty(n + 1), 1.0)]).is_err());
    }

    #[test]
    fn scaled_weights_meet_the_condition() {
        let n = 40;
        let delta = delta_budget(EPSILON, GAMMA_UNDIRECTED).unwrap();
        let graphs: Vec<Graph> = (0..10).map(|i| sample_gnp(n, 0.5, i).unwrap()).collect();
        let wf = WeightedFamily::scaled_for_condition(n, graphs, delta).unwrap();
        let c = family_condition_check(&wf, delta, n).unwrap();
        assert_abs_diff_eq!(c.sum, 0.25, epsilon = 1e-12);
        assert!(c.satisfied);
        let r = fractional_hitting(&wf, n, 0.2, 100, 3).unwrap();
        assert!(r.below_one_rate > 0.9);
    }

    #[test]
    fn delta_examples() {
        assert_abs_diff_eq!(delta_budget(1.0 / 20.0, 1.0 / 10.0).unwrap(), 0.0025, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_budget(4.0, 1.0).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_budget(0.4, 0.1).unwrap(), 0.02, epsilon = 1e-15);
        assert!(delta_budget(0.0, 1.0).is_err());
    }

    #[test]
    fn condition_examples() {
        let empty = WeightedFamily::unweighted(5, vec![]).unwrap();
        let c = family_condition_check(&empty, 0.1, 5).unwrap();
        assert_eq!(c.sum, 0.0);
        assert!(c.satisfied);
        let single = WeightedFamily::unweighted(5, vec![Graph::empty(5)]).unwrap();
        let c = family_condition_check(&single, 0.1, 5).unwrap();
        assert_abs_diff_eq!(c.sum, 1.0, epsilon = 1e-15);
        assert!(!c.satisfied);
    }

    #[test]
    fn clique_condition_in_log_domain() {
        // n = 10^4, C = 40: the clique size exceeds n, so the family is empty.
        let k = ramsey_clique_size(10_000, 40.0);
        assert!(k > 10_000);
        let c = clique_family_condition(10_000, k, 0.0025).unwrap();
        assert!(c.satisfied && c.sum == 0.0);
        // A nonempty instance far past f64 range: ln C(n, k) ≈ 4·10^10.
        let n = 10_000_000_000u64;
        let k = ramsey_clique_size(n, 1000.0);
        assert!(k < n);
        let c = clique_family_condition(n, k, 0.0025).unwrap();
        assert!(c.satisfied && c.log_sum.is_finite());
        let c = clique_family_condition(n, ramsey_clique_size(n, 1.0), 0.0025).unwrap();
        assert!(!c.satisfied && c.sum.is_infinite());
    }

    #[test]
    fn reports_are_thread_count_invariant() {
        let h = Graph::matching(64, 16);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| tail_check_directed(&h, 1.0 / 160.0, 3000, 5).unwrap())
        };
        assert_eq!(run(1), run(8));
    }
}
