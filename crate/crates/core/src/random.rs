//! Random graph and digraph samplers and the undirected/directed coupling.
//!
//! Every sampler is a pure function of its parameters and seed. Bernoulli
//! draws are taken one per potential edge or arc in canonical order:
//! undirected pairs `(u, v)`, `u < v`, row by row; directed arcs by source,
//! then target; self-loops (when enabled) after all other arcs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::{iter_bits, Graph, MAX_IO_VERTICES};
use crate::rng::{self, bernoulli};
use crate::stats::{chi_square_test, Proportion};

/// `G(n, p)`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = rng::seeded_rng(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if bernoulli(&mut rng, p) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// A directed graph; antiparallel arcs may coexist and, when
/// `loops_allowed`, so may self-loops.
#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    stride: usize,
    out: Vec<u64>,
    loops_allowed: bool,
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .field("loops_allowed", &self.loops_allowed)
            .finish()
    }
}

impl Digraph {
    pub fn empty(n: usize, loops_allowed: bool) -> Self {
        let stride = n.div_ceil(64).max(1);
        Self {
            n,
            stride,
            out: vec![0; n * stride],
            loops_allowed,
        }
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)], loops_allowed: bool) -> Result<Self> {
        let mut d = Self::empty(n, loops_allowed);
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "arc ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v && !loops_allowed {
                return Err(Error::InvalidArgument(format!("self-loop at {u} not allowed")));
            }
            d.add_arc(u, v);
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loops_allowed(&self) -> bool {
        self.loops_allowed
    }

    #[inline]
    pub fn out_row(&self, u: usize) -> &[u64] {
        &self.out[u * self.stride..(u + 1) * self.stride]
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u * self.stride + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "arc out of range");
        assert!(u != v || self.loops_allowed, "self-loops not allowed");
        self.out[u * self.stride + v / 64] |= 1 << (v % 64);
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `Δ(D)`, the maximum out-degree.
    pub fn max_out_degree(&self) -> usize {
        (0..self.n).map(|u| self.out_degree(u)).max().unwrap_or(0)
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| iter_bits(self.out_row(u)).map(move |v| (u, v)))
    }

    pub fn remove_loops(&self) -> Digraph {
        let mut d = self.clone();
        d.loops_allowed = false;
        for v in 0..self.n {
            d.out[v * self.stride + v / 64] &= !(1 << (v % 64));
        }
        d
    }

    /// The underlying simple graph: `uv` is an edge iff at least one of the
    /// arcs `(u, v)`, `(v, u)` is present. Loops are dropped.
    pub fn undirected(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for (u, v) in self.arcs() {
            if u != v {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// `D̂`: pairs of distinct vertices with a common in-neighbour, i.e. the
    /// union over `v` of all pairs inside the out-neighbourhood of `v`.
    pub fn hat(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for v in 0..self.n {
            let outs: Vec<usize> = iter_bits(self.out_row(v)).collect();
            for (i, &a) in outs.iter().enumerate() {
                for &b in &outs[i + 1..] {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DigraphJson::from(self)).expect("digraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// JSON form `{"n": 3, "arcs": [[0, 1]], "loops_allowed": false}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigraphJson {
    pub n: usize,
    pub arcs: Vec<[usize; 2]>,
    pub loops_allowed: bool,
}

impl From<&Digraph> for DigraphJson {
    fn from(d: &Digraph) -> Self {
        DigraphJson {
            n: d.n,
            arcs: d.arcs().map(|(u, v)| [u, v]).collect(),
            loops_allowed: d.loops_allowed,
        }
    }
}

impl TryFrom<DigraphJson> for Digraph {
    type Error = Error;

    fn try_from(raw: DigraphJson) -> Result<Self> {
        if raw.n > MAX_IO_VERTICES {
            return Err(Error::Malformed(format!("n = {} exceeds {MAX_IO_VERTICES}", raw.n)));
        }
        let arcs: Vec<_> = raw.arcs.iter().map(|a| (a[0], a[1])).collect();
        Digraph::from_arcs(raw.n, &arcs, raw.loops_allowed).map_err(|e| Error::Malformed(e.to_string()))
    }
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DigraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Digraph::try_from(DigraphJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `G⃗(n, p)`, optionally with self-loops drawn after all other arcs.
///
/// Because loops come last in the draw order, removing the loops of a
/// `loops = true` sample gives exactly the `loops = false` sample for the
/// same seed.
pub fn sample_digraph(n: usize, p: f64, seed: u64, loops: bool) -> Result<Digraph> {
    check_probability(p)?;
    let mut rng = rng::seeded_rng(seed);
    let mut d = Digraph::empty(n, loops);
    for u in 0..n {
        for v in 0..n {
            if u != v && bernoulli(&mut rng, p) {
                d.add_arc(u, v);
            }
        }
    }
    if loops {
        for v in 0..n {
            if bernoulli(&mut rng, p) {
                d.add_arc(v, v);
            }
        }
    }
    Ok(d)
}

/// Arc probability `p'` with `2p' − p'² = p`, i.e. `1 − √(1 − p)`, computed
/// as `p / (1 + √(1 − p))` to avoid cancellation for small `p`.
pub fn coupled_arc_probability(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidP(p));
    }
    let q = p / (1.0 + (1.0 - p).sqrt());
    debug_assert!((2.0 * q - q * q - p).abs() <= 1e-12);
    Ok(q)
}

/// A sample of `Γ ~ G(n, p)` and `D ~ G⃗(n, p')` with `uv ∈ Γ` iff at least one
/// of `(u, v)`, `(v, u)` is in `D`.
#[derive(Debug, Clone)]
pub struct CoupledSample {
    pub gamma: Graph,
    pub d: Digraph,
    pub p: f64,
    pub p_prime: f64,
}

/// Draws `D` first and undirects it; the marginals are exactly `G(n, p)` and
/// `G⃗(n, p')`.
pub fn couple(n: usize, p: f64, seed: u64) -> Result<CoupledSample> {
    let p_prime = coupled_arc_probability(p)?;
    let d = sample_digraph(n, p_prime, seed, false)?;
    let gamma = d.undirected();
    Ok(CoupledSample { gamma, d, p, p_prime })
}

/// Capture counts for edges of `Γ²` with a given number of common neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureClass {
    pub multiplicity: usize,
    pub captured: u64,
    pub total: u64,
    pub frequency: f64,
    pub std_error: f64,
    /// `frequency ≥ 1/4 − 4·std_error`.
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub n: usize,
    pub p: f64,
    pub p_prime: f64,
    pub trials: u64,
    pub seed: u64,
    pub classes: Vec<CaptureClass>,
    pub min_frequency: f64,
    pub passes: bool,
}

/// For each coupled sample and each edge of `Γ²`, records whether the edge
/// also lies in `D̂`, grouped by the edge's number of common neighbours in `Γ`.
pub fn conditional_square_capture(n: usize, p: f64, seed: u64, trials: u64) -> Result<CaptureReport> {
    let p_prime = coupled_arc_probability(p)?;
    let per_trial: Vec<BTreeMap<usize, (u64, u64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = couple(n, p, rng::substream(seed, t)).expect("p validated");
            let hat = s.d.hat();
            let mut counts = BTreeMap::new();
            for u in 0..n {
                for w in u + 1..n {
                    let mult = s.gamma.common_neighbors(u, w);
                    if mult > 0 {
                        let e: &mut (u64, u64) = counts.entry(mult).or_default();
                        e.1 += 1;
                        if hat.has_edge(u, w) {
                            e.0 += 1;
                        }
                    }
                }
            }
            counts
        })
        .collect();
    let mut merged: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for m in per_trial {
        for (k, (c, t)) in m {
            let e = merged.entry(k).or_default();
            e.0 += c;
            e.1 += t;
        }
    }
    let classes: Vec<CaptureClass> = merged
        .into_iter()
        .map(|(multiplicity, (captured, total))| {
            let prop = Proportion::new(captured, total);
            let frequency = prop.estimate();
            let std_error = prop.std_error();
            CaptureClass {
                multiplicity,
                captured,
                total,
                frequency,
                std_error,
                passes: frequency >= 0.25 - 4.0 * std_error,
            }
        })
        .collect();
    let min_frequency = classes
        .iter()
        .map(|c| c.frequency)
        .fold(f64::INFINITY, f64::min);
    let passes = classes.iter().all(|c| c.passes);
    Ok(CaptureReport {
        n,
        p,
        p_prime,
        trials,
        seed,
        classes,
        min_frequency,
        passes,
    })
}

/// Goodness-of-fit of the coupled marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMarginals {
    pub samples: u64,
    /// `[absent, present]` over all pairs of all samples of `Γ`.
    pub edge_counts: [u64; 2],
    /// `[neither, u→v only, v→u only, both]` over all pairs `u < v` of `D`.
    pub arc_state_counts: [u64; 4],
    pub edge_chi2: f64,
    pub edge_p_value: f64,
    pub arc_chi2: f64,
    pub arc_p_value: f64,
    /// Samples in which `Δ(D) > Δ(Γ)`; always zero for a correct coupling.
    pub degree_violations: u64,
}

pub fn coupling_marginal_test(n: usize, p: f64, samples: u64, seed: u64) -> Result<CouplingMarginals> {
    let p_prime = coupled_arc_probability(p)?;
    let per: Vec<([u64; 2], [u64; 4], u64)> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let s = couple(n, p, rng::substream(seed, t)).expect("p validated");
            let mut edges = [0u64; 2];
            let mut arcs = [0u64; 4];
            for u in 0..n {
                for v in u + 1..n {
                    edges[s.gamma.has_edge(u, v) as usize] += 1;
                    let state = s.d.has_arc(u, v) as usize | (s.d.has_arc(v, u) as usize) << 1;
                    arcs[state] += 1;
                }
            }
            let viol = (s.d.max_out_degree() > s.gamma.max_degree()) as u64;
            (edges, arcs, viol)
        })
        .collect();
    let mut edge_counts = [0u64; 2];
    let mut arc_state_counts = [0u64; 4];
    let mut degree_violations = 0;
    for (e, a, v) in per {
        for i in 0..2 {
            edge_counts[i] += e[i];
        }
        for i in 0..4 {
            arc_state_counts[i] += a[i];
        }
        degree_violations += v;
    }
    let q = p_prime;
    let (edge_chi2, edge_p_value) = chi_square_test(&edge_counts, &[1.0 - p, p]);
    let (arc_chi2, arc_p_value) = chi_square_test(
        &arc_state_counts,
        &[(1.0 - q) * (1.0 - q), q * (1.0 - q), (1.0 - q) * q, q * q],
    );
    Ok(CouplingMarginals {
        samples,
        edge_counts,
        arc_state_counts,
        edge_chi2,
        edge_p_value,
        arc_chi2,
        arc_p_value,
        degree_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gnp_endpoints() {
        assert_eq!(sample_gnp(10, 0.0, 1).unwrap(), Graph::empty(10));
        assert_eq!(sample_gnp(10, 1.0, 1).unwrap(), Graph::complete(10));
        assert!(sample_gnp(10, 1.5, 1).is_err());
    }

    #[test]
    fn gnp_mean_edge_count() {
        // Binomial(435, 1/2): mean 217.5, sd of the mean over 10^4 samples ≈ 0.104.
        let samples = 10_000u64;
        let total: usize = (0..samples)
            .map(|t| sample_gnp(30, 0.5, rng::substream(99, t)).unwrap().edge_count())
            .sum();
        let mean = total as f64 / samples as f64;
        let sd = (435.0f64 * 0.25 / samples as f64).sqrt();
        assert!((mean - 217.5).abs() <= 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn digraph_endpoints() {
        assert_eq!(sample_digraph(6, 0.0, 3, false).unwrap().arc_count(), 0);
        let full = sample_digraph(6, 1.0, 3, false).unwrap();
        assert_eq!(full.arc_count(), 30);
        assert!((0..6).all(|v| !full.has_arc(v, v)));
        assert_eq!(sample_digraph(6, 1.0, 3, true).unwrap().arc_count(), 36);
    }

    #[test]
    fn loop_removal_reproduces_loopless_sample() {
        for seed in 0..200 {
            let with = sample_digraph(9, 0.3, seed, true).unwrap();
            let without = sample_digraph(9, 0.3, seed, false).unwrap();
            assert_eq!(with.remove_loops(), without);
        }
    }

    #[test]
    fn loop_removal_distribution_matches() {
        // Per-arc frequency over 10^4 samples for both constructions.
        let (n, p, samples) = (6usize, 0.2, 10_000u64);
        let mut a = 0u64;
        let mut b = 0u64;
        for t in 0..samples {
            a += sample_digraph(n, p, rng::substream(5, t), true)
                .unwrap()
                .remove_loops()
                .arc_count() as u64;
            b += sample_digraph(n, p, rng::substream(6, t), false).unwrap().arc_count() as u64;
        }
        let trials = samples * (n * (n - 1)) as u64;
        let (fa, fb) = (a as f64 / trials as f64, b as f64 / trials as f64);
        let se = (2.0 * p * (1.0 - p) / trials as f64).sqrt();
        assert!((fa - fb).abs() <= 4.0 * se, "{fa} vs {fb}");
    }

    #[test]
    fn hat_examples() {
        let d = Digraph::from_arcs(3, &[(0, 1), (0, 2)], false).unwrap();
        assert_eq!(d.hat().edges().collect::<Vec<_>>(), vec![(1, 2)]);
        let d = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], false).unwrap();
        assert_eq!(d.hat().edge_count(), 0);
        let looped = Digraph::from_arcs(3, &[(0, 0), (0, 1)], true).unwrap();
        assert_eq!(looped.hat().edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn coupled_probability_examples() {
        assert_relative_eq!(coupled_arc_probability(0.19).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(coupled_arc_probability(0.0).unwrap(), 0.0);
        assert!(matches!(coupled_arc_probability(1.0), Err(Error::InvalidP(_))));
        for &p in &[1e-9, 1e-4, 0.2, 0.5, 0.999] {
            let q = coupled_arc_probability(p).unwrap();
            assert!((2.0 * q - q * q - p).abs() <= 1e-12);
        }
    }

    #[test]
    fn couple_at_zero_is_empty() {
        let s = couple(10, 0.0, 4).unwrap();
        assert_eq!(s.gamma.edge_count(), 0);
        assert_eq!(s.d.arc_count(), 0);
    }

    #[test]
    fn coupled_densities() {
        let (n, p, samples) = (20usize, 0.2, 20_000u64);
        let q = coupled_arc_probability(p).unwrap();
        let mut edges = 0u64;
        let mut arcs = 0u64;
        for t in 0..samples {
            let s = couple(n, p, rng::substream(11, t)).unwrap();
            edges += s.gamma.edge_count() as u64;
            arcs += s.d.arc_count() as u64;
        }
        let pairs = samples * 190;
        let ordered = samples * 380;
        let fe = edges as f64 / pairs as f64;
        let fa = arcs as f64 / ordered as f64;
        assert!((fe - p).abs() <= 3.0 * (p * (1.0 - p) / pairs as f64).sqrt(), "{fe}");
        assert!((fa - q).abs() <= 3.0 * (q * (1.0 - q) / ordered as f64).sqrt(), "{fa}");
    }

    #[test]
    fn single_neighbour_class_matches_direction_law() {
        let r = conditional_square_capture(12, 0.19, 21, 20_000).unwrap();
        let single = r.classes.iter().find(|c| c.multiplicity == 1).unwrap();
        let expected = (0.1f64 / 0.19).powi(2);
        assert!((single.frequency - expected).abs() <= 4.0 * single.std_error, "{single:?}");
        assert!(r.passes);
        if let Some(double) = r.classes.iter().find(|c| c.multiplicity == 2) {
            assert!(double.frequency > single.frequency);
        }
    }

    #[test]
    fn small_p_limit_approaches_quarter() {
        for &p in &[0.1, 0.01, 1e-4, 1e-8] {
            let q = coupled_arc_probability(p).unwrap();
            let f = (q / p).powi(2);
            assert!(f > 0.25);
        }
        let q = coupled_arc_probability(1e-8).unwrap();
        assert_relative_eq!((q / 1e-8f64).powi(2), 0.25, epsilon = 1e-8);
    }

    #[test]
    fn digraph_json_round_trip() {
        let d = sample_digraph(7, 0.3, 8, true).unwrap();
        assert_eq!(Digraph::from_json(&d.to_json()).unwrap(), d);
        assert!(Digraph::from_json(r#"{"n":2,"arcs":[[0,0]],"loops_allowed":false}"#).is_err());
    }

    proptest! {
        #[test]
        fn coupling_invariants(n in 2usize..30, p in 0.0f64..0.99, seed in any::<u64>()) {
            let s = couple(n, p, seed).unwrap();
            for u in 0..n {
                for v in u + 1..n {
                    prop_assert_eq!(s.gamma.has_edge(u, v), s.d.has_arc(u, v) || s.d.has_arc(v, u));
                }
            }
            prop_assert!(s.d.max_out_degree() <= s.gamma.max_degree());
            prop_assert!((2.0 * s.p_prime - s.p_prime * s.p_prime - p).abs() <= 1e-12);
        }

        #[test]
        fn loop_removal_inequalities(n in 1usize..30, p in 0.0f64..0.5, seed in any::<u64>()) {
            let looped = sample_digraph(n, p, seed, true).unwrap();
            let plain = looped.remove_loops();
            prop_assert!(plain.hat().is_subgraph_of(&looped.hat()));
            prop_assert!(plain.max_out_degree() + 1 >= looped.max_out_degree());
        }

        #[test]
        fn hat_edges_lie_in_an_out_neighbourhood(n in 2usize..25, p in 0.0f64..0.5, seed in any::<u64>()) {
            let d = sample_digraph(n, p, seed, false).unwrap();
            for (a, b) in d.hat().edges() {
                prop_assert!((0..n).any(|v| d.has_arc(v, a) && d.has_arc(v, b)));
            }
        }
    }
}
