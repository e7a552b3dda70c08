//! Exhaustive enumeration over small graphs.

use rayon::prelude::*;

use super::{edge_from_index, pair_count, Graph};
use crate::error::{Error, Result};

/// Graphs on at most 11 vertices encoded as `u64` edge masks under the
/// canonical edge index.
#[derive(Debug, Clone)]
pub struct SmallGraphs {
    n: usize,
    pairs: Vec<(usize, usize)>,
    triangles: Vec<u64>,
}

impl SmallGraphs {
    pub const MAX_N: usize = 11;

    pub fn new(n: usize) -> Result<Self> {
        if n > Self::MAX_N {
            return Err(Error::TooLarge { n, max: Self::MAX_N });
        }
        let pairs: Vec<_> = (0..pair_count(n)).map(|i| edge_from_index(n, i)).collect();
        let mut triangles = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let bit = |u, v| 1u64 << super::edge_index(n, u, v);
                    triangles.push(bit(a, b) | bit(a, c) | bit(b, c));
                }
            }
        }
        Ok(Self { n, pairs, triangles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Number of masks, `2^C(n,2)`.
    pub fn mask_count(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    #[inline]
    pub fn is_triangle_free(&self, mask: u64) -> bool {
        self.triangles.iter().all(|&t| mask & t != t)
    }

    pub fn to_graph(&self, mask: u64) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, &(u, v)) in self.pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn encode(&self, g: &Graph) -> u64 {
        assert_eq!(g.n(), self.n);
        g.edges()
            .fold(0u64, |m, (u, v)| m | 1 << super::edge_index(self.n, u, v))
    }

    /// The least triangle-free mask satisfying `pred`, scanning all
    /// `2^C(n,2)` masks in parallel blocks partitioned by mask prefix.
    pub fn find_first_triangle_free<F>(&self, pred: F) -> Option<u64>
    where
        F: Fn(u64) -> bool + Sync,
    {
        const BLOCK_BITS: u32 = 12;
        let total = self.mask_count();
        let blocks = total.div_ceil(1 << BLOCK_BITS);
        (0..blocks).into_par_iter().find_map_first(|b| {
            let lo = b << BLOCK_BITS;
            let hi = ((b + 1) << BLOCK_BITS).min(total);
            (lo..hi).find(|&m| self.is_triangle_free(m) && pred(m))
        })
    }

    /// Counts triangle-free graphs on `[n]`.
    pub fn count_triangle_free(&self) -> u64 {
        (0..self.mask_count())
            .into_par_iter()
            .filter(|&m| self.is_triangle_free(m))
            .count() as u64
    }
}

/// Calls `visit` on every maximal triangle-free subgraph of `host`.
///
/// Backtracks over the host edges in canonical order, including an edge only
/// when it closes no triangle and excluding it only while it can still be
/// blocked by later edges. Exponential; intended for hosts on a handful of
/// vertices.
pub fn for_each_maximal_triangle_free(host: &Graph, mut visit: impl FnMut(&Graph)) -> Result<()> {
    let n = host.n();
    if n > 64 {
        return Err(Error::TooLarge { n, max: 64 });
    }
    let edges: Vec<(usize, usize)> = host.edges().collect();
    let mut state = Search {
        n,
        edges: &edges,
        chosen: vec![0u64; n],
        future: host_rows(host),
        excluded: Vec::new(),
    };
    state.recurse(0, &mut visit);
    Ok(())
}

pub fn maximal_triangle_free_subgraphs(host: &Graph) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for_each_maximal_triangle_free(host, |g| out.push(g.clone()))?;
    Ok(out)
}

fn host_rows(host: &Graph) -> Vec<u64> {
    (0..host.n()).map(|u| host.row(u)[0]).collect()
}

struct Search<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
    /// Adjacency of the subgraph built so far.
    chosen: Vec<u64>,
    /// Adjacency of chosen edges plus undecided host edges.
    future: Vec<u64>,
    excluded: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn recurse(&mut self, i: usize, visit: &mut impl FnMut(&Graph)) {
        if i == self.edges.len() {
            let blocked = self
                .excluded
                .iter()
                .all(|&(u, v)| self.chosen[u] & self.chosen[v] != 0);
            if blocked {
                let mut g = Graph::empty(self.n);
                for u in 0..self.n {
                    for v in super::iter_bits(&[self.chosen[u]]) {
                        if v > u {
                            g.add_edge(u, v);
                        }
                    }
                }
                visit(&g);
            }
            return;
        }
        let (u, v) = self.edges[i];
        let (bu, bv) = (1u64 << u, 1u64 << v);
        if self.chosen[u] & self.chosen[v] == 0 {
            self.chosen[u] |= bv;
            self.chosen[v] |= bu;
            self.recurse(i + 1, visit);
            self.chosen[u] &= !bv;
            self.chosen[v] &= !bu;
        }
        self.future[u] &= !bv;
        self.future[v] &= !bu;
        let still_blockable = self
            .excluded
            .iter()
            .chain(std::iter::once(&(u, v)))
            .all(|&(a, b)| self.future[a] & self.future[b] != 0);
        if still_blockable {
            self.excluded.push((u, v));
            self.recurse(i + 1, visit);
            self.excluded.pop();
        }
        self.future[u] |= bv;
        self.future[v] |= bu;
    }
}
