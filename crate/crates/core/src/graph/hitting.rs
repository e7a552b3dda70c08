//! Checks that an `H`-good edge of `Γ` forces every maximal triangle-free
//! subgraph of `Γ` to meet `H`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{for_each_maximal_triangle_free, h_good_edges, Graph};
use crate::error::{Error, Result};
use crate::rng;

/// Largest vertex count for [`HittingMode::Exhaustive`].
pub const MAX_EXHAUSTIVE_HITTING: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HittingMode {
    /// Every maximal triangle-free subgraph of `Γ`.
    Exhaustive,
    /// `samples` greedy maximal subgraphs over seeded random edge orders.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingCheck {
    pub good_edges: usize,
    /// Maximal subgraphs examined; zero when there is no good edge.
    pub checked: u64,
    /// A maximal triangle-free subgraph disjoint from `H` despite a good edge.
    pub counterexample: Option<Graph>,
}

impl HittingCheck {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// If `Γ` has an `H`-good edge, looks for a maximal triangle-free subgraph of
/// `Γ` that misses `H`. Without a good edge there is nothing to check.
pub fn goodness_implies_hitting_check(h: &Graph, gamma: &Graph, mode: HittingMode) -> Result<HittingCheck> {
    if h.n() != gamma.n() {
        return Err(Error::InvalidArgument(format!(
            "vertex counts differ: {} vs {}",
            h.n(),
            gamma.n()
        )));
    }
    let good_edges = h_good_edges(h, gamma).len();
    if good_edges == 0 {
        return Ok(HittingCheck {
            good_edges,
            checked: 0,
            counterexample: None,
        });
    }
    match mode {
        HittingMode::Exhaustive => {
            if gamma.n() > MAX_EXHAUSTIVE_HITTING {
                return Err(Error::TooLarge {
                    n: gamma.n(),
                    max: MAX_EXHAUSTIVE_HITTING,
                });
            }
            let mut checked = 0;
            let mut counterexample = None;
            for_each_maximal_triangle_free(gamma, |g| {
                checked += 1;
                if counterexample.is_none() && g.is_disjoint_from(h) {
                    counterexample = Some(g.clone());
                }
            })?;
            Ok(HittingCheck {
                good_edges,
                checked,
                counterexample,
            })
        }
        HittingMode::Sampled { samples, seed } => {
            let counterexample = (0..samples).into_par_iter().find_map_first(|t| {
                let g = gamma.maximal_triangle_free(rng::substream(seed, t));
                g.is_disjoint_from(h).then_some(g)
            });
            Ok(HittingCheck {
                good_edges,
                checked: samples,
                counterexample,
            })
        }
    }
}
