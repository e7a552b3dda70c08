//! Exact independence number by branch-and-bound.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ALPHA_VERTICES: usize = 40;

/// A maximum independent set, found as a maximum clique of the complement
/// with greedy-colouring bounds. `n ≤ 40`.
pub fn maximum_independent_set(g: &Graph) -> Result<Vec<usize>> {
    let n = g.n();
    if n > MAX_ALPHA_VERTICES {
        return Err(Error::TooLarge {
            n,
            max: MAX_ALPHA_VERTICES,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // Complement adjacency.
    let adj: Vec<u64> = (0..n).map(|u| !g.row(u)[0] & all & !(1 << u)).collect();
    let mut search = CliqueSearch {
        adj,
        best: Vec::new(),
        current: Vec::new(),
    };
    search.expand(all);
    let mut best = search.best;
    best.sort_unstable();
    Ok(best)
}

pub fn independence_number(g: &Graph) -> Result<usize> {
    Ok(maximum_independent_set(g)?.len())
}

struct CliqueSearch {
    adj: Vec<u64>,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl CliqueSearch {
    /// Greedy colouring of `p`: vertices in colour order with the running
    /// colour count, an upper bound on the clique size within each prefix.
    fn colour_sort(&self, mut p: u64) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count_ones() as usize);
        let mut colour = 0;
        while p != 0 {
            colour += 1;
            let mut q = p;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= !(1 << v);
                q &= !self.adj[v];
                p &= !(1 << v);
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(&mut self, mut p: u64) {
        let order = self.colour_sort(p);
        for &(v, bound) in order.iter().rev() {
            if self.current.len() + bound <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next = p & self.adj[v];
            if next == 0 {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p &= !(1 << v);
        }
    }
}

/// Whether `set` is independent in `g`.
pub fn is_independent(g: &Graph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &u)| set[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::sample_gnp;
    use proptest::prelude::*;

    fn brute_alpha(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&s| {
                let set: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 1).collect();
                is_independent(g, &set)
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn examples() {
        assert_eq!(independence_number(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(independence_number(&Graph::empty(9)).unwrap(), 9);
        assert_eq!(independence_number(&Graph::petersen()).unwrap(), 4);
        assert_eq!(brute_alpha(&Graph::petersen()), 4);
        assert_eq!(independence_number(&Graph::complete(40)).unwrap(), 1);
        assert_eq!(independence_number(&Graph::empty(0)).unwrap(), 0);
        assert_eq!(
            independence_number(&Graph::empty(41)).unwrap_err(),
            Error::TooLarge { n: 41, max: 40 }
        );
    }

    #[test]
    fn forty_vertices_is_fast_enough() {
        for seed in 0..5 {
            let g = sample_gnp(40, 0.2, seed).unwrap();
            let set = maximum_independent_set(&g).unwrap();
            assert!(is_independent(&g, &set));
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..13, p in 0.0f64..1.0, seed in any::<u64>()) {
            let g = sample_gnp(n, p, seed).unwrap();
            let set = maximum_independent_set(&g).unwrap();
            prop_assert!(is_independent(&g, &set));
            prop_assert_eq!(set.len(), brute_alpha(&g));
        }
    }
}
