//! Simple undirected graphs on `{0, …, n-1}` stored as adjacency bitsets,
//! together with the triangle machinery used by the hitting construction.

mod enumerate;
mod hitting;
mod io;
mod spec;

pub use enumerate::{
    for_each_maximal_triangle_free, maximal_triangle_free_subgraphs, SmallGraphs,
};
pub use hitting::{goodness_implies_hitting_check, HittingCheck, HittingMode, MAX_EXHAUSTIVE_HITTING};
pub use io::{GraphJson, MAX_IO_VERTICES};
pub use spec::GraphSpec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rng;

/// Number of vertex pairs, `C(n, 2)`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Canonical index of the edge `{u, v}` in the row-major upper triangle of
/// `K_n`: `u·n − u(u+1)/2 + (v − u − 1)` with `u < v`.
#[inline]
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    debug_assert!(v < n && u != v);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Inverse of [`edge_index`].
pub fn edge_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut u = 0;
    loop {
        let row = n - u - 1;
        if idx < row {
            return (u, u + 1 + idx);
        }
        idx -= row;
        u += 1;
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    edge_count: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        Self {
            n,
            stride,
            rows: vec![0; n * stride],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        if n >= 3 {
            for i in 0..n {
                g.add_edge(i, (i + 1) % n);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// Star with centre 0 and leaves `1..=leaves`, on `n ≥ leaves + 1` vertices.
    pub fn star(n: usize, leaves: usize) -> Self {
        assert!(leaves < n, "star needs leaves + 1 <= n");
        let mut g = Self::empty(n);
        for l in 1..=leaves {
            g.add_edge(0, l);
        }
        g
    }

    /// Matching `{2i, 2i+1}` for `i < size`.
    pub fn matching(n: usize, size: usize) -> Self {
        assert!(2 * size <= n, "matching does not fit");
        let mut g = Self::empty(n);
        for i in 0..size {
            g.add_edge(2 * i, 2 * i + 1);
        }
        g
    }

    /// The complete graph on the listed vertices, inside `n` vertices.
    pub fn clique_on(n: usize, vertices: &[usize]) -> Self {
        let mut g = Self::empty(n);
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, &edges).expect("valid edges")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `e(G)`.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.stride..(u + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.rows[u * self.stride + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n && u != v, "invalid edge ({u}, {v})");
        if self.has_edge(u, v) {
            return false;
        }
        self.rows[u * self.stride + v / 64] |= 1 << (v % 64);
        self.rows[v * self.stride + u / 64] |= 1 << (u % 64);
        self.edge_count += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if !self.has_edge(u, v) {
            return false;
        }
        self.rows[u * self.stride + v / 64] &= !(1 << (v % 64));
        self.rows[v * self.stride + u / 64] &= !(1 << (u % 64));
        self.edge_count -= 1;
        true
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `Δ(G)`; zero for the empty vertex set.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(u))
    }

    /// Edges `(u, v)` with `u < v`, in canonical index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    #[inline]
    fn rows_meet(&self, u: usize, v: usize) -> bool {
        self.row(u).iter().zip(self.row(v)).any(|(a, b)| a & b != 0)
    }

    fn check_same_order(&self, other: &Graph) {
        assert_eq!(self.n, other.n, "graphs on different vertex sets");
    }

    fn combine(&self, other: &Graph, op: impl Fn(u64, u64) -> u64) -> Graph {
        self.check_same_order(other);
        let rows: Vec<u64> = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let degree_sum: usize = rows.iter().map(|w| w.count_ones() as usize).sum();
        Graph {
            n: self.n,
            stride: self.stride,
            rows,
            edge_count: degree_sum / 2,
        }
    }

    pub fn union(&self, other: &Graph) -> Graph {
        self.combine(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Graph) -> Graph {
        self.combine(other, |a, b| a & b)
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &Graph) -> Graph {
        self.combine(other, |a, b| a & !b)
    }

    /// `G^c`, the complement within `K_n`.
    pub fn complement(&self) -> Graph {
        Graph::complete(self.n).difference(self)
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.check_same_order(other);
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &Graph) -> bool {
        self.check_same_order(other);
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & b == 0)
    }

    pub fn to_edge_set(&self) -> EdgeSet {
        let mut mask = SubsetMask::empty(pair_count(self.n));
        for (u, v) in self.edges() {
            mask.insert(edge_index(self.n, u, v));
        }
        EdgeSet { n: self.n, mask }
    }

    /// True iff no three vertices are pairwise adjacent.
    pub fn is_triangle_free(&self) -> bool {
        self.edges().all(|(u, v)| !self.rows_meet(u, v))
    }

    /// Some triangle `(u, v, w)` with `u < v < w`, if one exists.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        for (u, v) in self.edges() {
            if let Some(w) = (v + 1..self.n).find(|&w| self.has_edge(u, w) && self.has_edge(v, w)) {
                return Some((u, v, w));
            }
        }
        None
    }

    /// `Γ²`: pairs of distinct vertices with a common neighbour. Edges of `Γ`
    /// itself appear only if they also have a common neighbour.
    pub fn square(&self) -> Graph {
        let mut sq = Graph::empty(self.n);
        for u in 0..self.n {
            for w in u + 1..self.n {
                if self.rows_meet(u, w) {
                    sq.add_edge(u, w);
                }
            }
        }
        sq
    }

    /// A maximal triangle-free subgraph built by greedy insertion over a
    /// uniformly random order of the edges (the order is fixed by `seed`).
    pub fn maximal_triangle_free(&self, seed: u64) -> Graph {
        let mut order: Vec<(usize, usize)> = self.edges().collect();
        order.shuffle(&mut rng::seeded_rng(seed));
        self.greedy_triangle_free(&order)
    }

    /// Greedy triangle-free insertion in the given edge order.
    pub fn greedy_triangle_free(&self, order: &[(usize, usize)]) -> Graph {
        let mut g = Graph::empty(self.n);
        for &(u, v) in order {
            debug_assert!(self.has_edge(u, v));
            if !g.rows_meet(u, v) {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// True iff `self` is a triangle-free subgraph of `host` to which no
    /// further host edge can be added without creating a triangle.
    pub fn is_maximal_triangle_free_in(&self, host: &Graph) -> bool {
        self.is_subgraph_of(host)
            && self.is_triangle_free()
            && host
                .edges()
                .all(|(u, v)| self.has_edge(u, v) || self.rows_meet(u, v))
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut comp = vec![root];
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A spanning forest: one depth-first tree per component, rooted at the
    /// least vertex, visiting neighbours in increasing order.
    pub fn spanning_forest(&self) -> Graph {
        let mut forest = Graph::empty(self.n);
        let mut seen = vec![false; self.n];
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![(root, self.neighbors(root).collect::<Vec<_>>().into_iter())];
            while let Some((u, it)) = stack.last_mut() {
                let u = *u;
                match it.next() {
                    Some(v) if !seen[v] => {
                        seen[v] = true;
                        forest.add_edge(u, v);
                        let next = self.neighbors(v).collect::<Vec<_>>().into_iter();
                        stack.push((v, next));
                    }
                    Some(_) => {}
                    None => {
                        stack.pop();
                    }
                }
            }
        }
        forest
    }

    /// A proper 2-colouring (`false`/`true` per vertex), if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut colour: Vec<Option<bool>> = vec![None; self.n];
        for root in 0..self.n {
            if colour[root].is_some() {
                continue;
            }
            colour[root] = Some(false);
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                let cu = colour[u].expect("coloured");
                for v in self.neighbors(u) {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            stack.push(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(|c| c.unwrap_or(false)).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Number of edges with both endpoints in `subset`.
    pub fn induced_edge_count(&self, subset: &[u64]) -> usize {
        let mut twice = 0usize;
        for u in iter_bits(subset) {
            if u >= self.n {
                break;
            }
            twice += self
                .row(u)
                .iter()
                .zip(subset)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum::<usize>();
        }
        twice / 2
    }
}

/// `e(H ∩ Γ²)`: edges of `h` whose endpoints have a common neighbour in `gamma`.
pub fn count_closed(h: &Graph, gamma: &Graph) -> usize {
    h.check_same_order(gamma);
    h.edges().filter(|&(u, v)| gamma.rows_meet(u, v)).count()
}

/// Edges `uv ∈ E(H) ∩ E(Γ)` with `uv ∉ E((Γ∖H)²)`, i.e. edges of `H` present
/// in `Γ` that close no triangle with two edges of `Γ∖H`.
pub fn h_good_edges(h: &Graph, gamma: &Graph) -> EdgeSet {
    let rest = gamma.difference(h);
    let mut mask = SubsetMask::empty(pair_count(h.n));
    for (u, v) in h.edges() {
        if gamma.has_edge(u, v) && !rest.rows_meet(u, v) {
            mask.insert(edge_index(h.n, u, v));
        }
    }
    EdgeSet { n: h.n, mask }
}

/// `e(H ∖ (Γ∖H)²)`: edges of `H`, present in `Γ` or not, outside the square of
/// `Γ∖H`. These are the edges that become good once they appear in `Γ`.
pub fn good_candidate_count(h: &Graph, gamma: &Graph) -> usize {
    let rest = gamma.difference(h);
    h.edges().filter(|&(u, v)| !rest.rows_meet(u, v)).count()
}

/// A graph viewed as a subset of `E(K_n)` under [`edge_index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: usize,
    mask: SubsetMask,
}

impl EdgeSet {
    pub fn new(n: usize, mask: SubsetMask) -> Result<Self> {
        if mask.len() != pair_count(n) {
            return Err(Error::InvalidArgument(format!(
                "edge mask has {} bits, expected C({n}, 2) = {}",
                mask.len(),
                pair_count(n)
            )));
        }
        Ok(Self { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> &SubsetMask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mask.iter().map(move |i| edge_from_index(self.n, i))
    }

    pub fn to_graph(&self) -> Graph {
        graph_from_edge_mask(self.n, &self.mask)
    }
}

/// Decodes an edge mask over `E(K_n)` into a graph.
pub fn graph_from_edge_mask(n: usize, mask: &SubsetMask) -> Graph {
    let mut g = Graph::empty(n);
    let mut idx = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask.contains(idx) {
                g.add_edge(u, v);
            }
            idx += 1;
        }
    }
    g
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}
