//! Uniform covers of the triangle-free graphs: families of graphs with a
//! common number `m` of non-edges such that every triangle-free graph on
//! `[n]` is a subgraph of some member.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, GraphJson, SmallGraphs};
use crate::independence::{independence_number, MAX_ALPHA_VERTICES};
use crate::rng::{self, bernoulli};
use crate::stats::{ln_binomial, Proportion, Z95};

/// Largest `n` for exhaustive checks over all `2^C(n,2)` graphs.
pub const MAX_EXHAUSTIVE_COVER: usize = 7;
/// Largest number of members a generated cover may have.
pub const MAX_COVER_MEMBERS: u64 = 1_000_000;
/// The container-method bound, reported as a formula only.
pub const CONTAINER_BOUND_FORMULA: &str = "f(m, n) <= exp(C n^(3/2) log n)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeCountMode {
    /// Every member has exactly `C(n, 2) − m` edges.
    #[default]
    Exact,
    /// Members may have more edges. Not part of the definition of `f(m, n)`.
    AtLeast,
}

/// Graphs on `[n]`, each missing `m` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoverJson", into = "CoverJson")]
pub struct CoverFamily {
    n: usize,
    m: usize,
    mode: EdgeCountMode,
    members: Vec<Graph>,
}

/// A cover serialised as `{n, m, mode, members: [[[u, v], …], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverJson {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub mode: EdgeCountMode,
    pub members: Vec<Vec<[usize; 2]>>,
}

impl TryFrom<CoverJson> for CoverFamily {
    type Error = Error;
    fn try_from(j: CoverJson) -> Result<Self> {
        let members = j
            .members
            .into_iter()
            .map(|edges| Graph::try_from(GraphJson { n: j.n, edges }))
            .collect::<Result<Vec<_>>>()?;
        CoverFamily::with_mode(j.n, j.m, members, j.mode)
    }
}

impl From<CoverFamily> for CoverJson {
    fn from(c: CoverFamily) -> Self {
        CoverJson {
            n: c.n,
            m: c.m,
            mode: c.mode,
            members: c.members.iter().map(|g| GraphJson::from(g).edges).collect(),
        }
    }
}

impl CoverFamily {
    pub fn new(n: usize, m: usize, members: Vec<Graph>) -> Result<Self> {
        Self::with_mode(n, m, members, EdgeCountMode::Exact)
    }

    pub fn with_mode(n: usize, m: usize, members: Vec<Graph>, mode: EdgeCountMode) -> Result<Self> {
        let total = pair_count(n);
        if m > total {
            return Err(Error::InvalidArgument(format!("m = {m} exceeds C({n}, 2) = {total}")));
        }
        let want = total - m;
        for g in &members {
            if g.n() != n {
                return Err(Error::InvalidArgument(format!("member on {} vertices, expected {n}", g.n())));
            }
            let ok = match mode {
                EdgeCountMode::Exact => g.edge_count() == want,
                EdgeCountMode::AtLeast => g.edge_count() >= want,
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "member has {} edges, expected {}{want}",
                    g.edge_count(),
                    if mode == EdgeCountMode::Exact { "" } else { "at least " }
                )));
            }
        }
        Ok(Self { n, m, mode, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> EdgeCountMode {
        self.mode
    }

    pub fn members(&self) -> &[Graph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `0 ≤ m ≤ C(n, 2) − ⌊n²/4⌋`: a cover by members with more non-edges
    /// than this cannot contain a complete bipartite graph of maximum size.
    pub fn m_in_range(&self) -> bool {
        self.m <= pair_count(self.n).saturating_sub(self.n * self.n / 4)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cover serialises")
    }
}

/// Calls `visit` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `{K_n − E(K_n[B]) : |B| = k}`, in lexicographic order of `B`; `m = C(k, 2)`.
pub fn ramsey_clique_cover(n: usize, k: usize) -> Result<CoverFamily> {
    if !(2..=n).contains(&k) {
        return Err(Error::InvalidArgument(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let size = ln_binomial(n as u64, k as u64).exp();
    if size > MAX_COVER_MEMBERS as f64 {
        return Err(Error::InvalidArgument(format!(
            "C({n}, {k}) members exceed the limit of {MAX_COVER_MEMBERS}"
        )));
    }
    let kn = Graph::complete(n);
    let mut members = Vec::new();
    for_each_subset(n, k, |b| members.push(kn.difference(&Graph::clique_on(n, b))));
    CoverFamily::new(n, pair_count(k), members)
}

/// Outcome of a cover or Ramsey-type check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    Valid,
    Invalid,
    /// Sampling found no counterexample; nothing is claimed.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub validity: Validity,
    pub exhaustive: bool,
    /// Graphs examined: triangle-free graphs (exhaustive) or samples.
    pub checked: u64,
    /// A triangle-free graph not covered, or with too small an independence number.
    pub witness: Option<Graph>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.validity == Validity::Valid
    }
}

fn small_graphs(n: usize) -> Result<SmallGraphs> {
    if n > MAX_EXHAUSTIVE_COVER {
        return Err(Error::GroundSetTooLarge {
            size: pair_count(n),
            max: pair_count(MAX_EXHAUSTIVE_COVER),
        });
    }
    SmallGraphs::new(n)
}

fn exhaustive_report(sg: &SmallGraphs, witness: Option<u64>) -> ValidityReport {
    ValidityReport {
        validity: if witness.is_none() { Validity::Valid } else { Validity::Invalid },
        exhaustive: true,
        checked: sg.count_triangle_free(),
        witness: witness.map(|w| sg.to_graph(w)),
    }
}

/// Checks every triangle-free graph on `[n]` against the cover; the witness
/// is the uncovered graph with the least edge mask. `n ≤ 7`.
pub fn cover_validity_exhaustive(cover: &CoverFamily) -> Result<ValidityReport> {
    let sg = small_graphs(cover.n())?;
    let members: Vec<u64> = cover.members().iter().map(|g| sg.encode(g)).collect();
    let witness = sg.find_first_triangle_free(|t| !members.iter().any(|&h| t & !h == 0));
    Ok(exhaustive_report(&sg, witness))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// All triangle-free graphs; `n ≤ 7`.
    Exhaustive,
    /// Random maximal triangle-free graphs from greedy insertion.
    Sampled { trials: u64, seed: u64 },
}

/// Whether every triangle-free graph on `[n]` has an independent set of size
/// `k`, which holds iff `ramsey_clique_cover(n, k)` is a valid cover.
///
/// Sampling examines maximal triangle-free graphs only; these suffice since
/// removing edges cannot lower the independence number.
pub fn clique_cover_validity_via_alpha(n: usize, k: usize, mode: AlphaMode) -> Result<ValidityReport> {
    match mode {
        AlphaMode::Exhaustive => {
            let sg = small_graphs(n)?;
            let witness = sg.find_first_triangle_free(|t| {
                independence_number(&sg.to_graph(t)).expect("n is small") < k
            });
            Ok(exhaustive_report(&sg, witness))
        }
        AlphaMode::Sampled { trials, seed } => {
            if n > MAX_ALPHA_VERTICES {
                return Err(Error::TooLarge {
                    n,
                    max: MAX_ALPHA_VERTICES,
                });
            }
            let kn = Graph::complete(n);
            let witness = (0..trials).into_par_iter().find_map_first(|t| {
                let g = kn.maximal_triangle_free(rng::substream(seed, t));
                (independence_number(&g).expect("n is at most the limit") < k).then_some(g)
            });
            Ok(ValidityReport {
                validity: if witness.is_some() { Validity::Invalid } else { Validity::Inconclusive },
                exhaustive: false,
                checked: trials,
                witness,
            })
        }
    }
}

/// `ln(2s)/m`, an upper bound on `q(T_n)` from a valid cover of size `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QUpperBound {
    pub bound: f64,
    /// `bound ≥ 1`: no information about a probability.
    pub vacuous: bool,
}

pub fn q_upper_bound(m: u64, n: u64, cover_size: f64) -> Result<QUpperBound> {
    if m == 0 || !(cover_size >= 1.0) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need m >= 1, n >= 2 and cover size >= 1, got m = {m}, n = {n}, size = {cover_size}"
        )));
    }
    let bound = (2.0 * cover_size).ln() / m as f64;
    Ok(QUpperBound {
        bound,
        vacuous: bound >= 1.0,
    })
}

/// The same bound with the cover size given by its natural logarithm.
pub fn q_upper_bound_ln(m: u64, ln_cover_size: f64) -> Result<f64> {
    if m == 0 || !(ln_cover_size >= 0.0) {
        return Err(Error::InvalidArgument("need m >= 1 and cover size >= 1".into()));
    }
    Ok((std::f64::consts::LN_2 + ln_cover_size) / m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// `e(T)` for a spanning forest `T` of the complement of `H`.
    pub forest_edges: usize,
    /// `2^{−e(T)}`.
    pub bound: f64,
    /// Trials with `G ⊆ H`.
    pub contained: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub half_width: f64,
    /// `estimate ≤ bound + 3·std_error`.
    pub passes: bool,
}

/// Estimates `P(G ⊆ H)` for a random complete bipartite graph `G` (each
/// vertex on a uniformly random side) and compares with `2^{−e(T)}`.
pub fn bipartite_lower_bound_experiment(h: &Graph, trials: u64, seed: u64) -> Result<BipartiteReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = h.n();
    let missing: Vec<(usize, usize)> = h.complement().edges().collect();
    let forest_edges = h.complement().spanning_forest().edge_count();
    let contained = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut r = rng::trial_rng(seed, t);
            let side: Vec<bool> = (0..n).map(|_| bernoulli(&mut r, 0.5)).collect();
            missing.iter().all(|&(u, v)| side[u] == side[v])
        })
        .count() as u64;
    let prop = Proportion::new(contained, trials);
    let bound = 0.5f64.powi(forest_edges as i32);
    Ok(BipartiteReport {
        n,
        trials,
        seed,
        forest_edges,
        bound,
        contained,
        estimate: prop.estimate(),
        std_error: prop.std_error(),
        half_width: Z95 * prop.std_error(),
        passes: prop.estimate() <= bound + 3.0 * prop.std_error(),
    })
}
