//! Compact declarations of test graphs, e.g. `star:10`, `matching:16`,
//! `random-bipartite:50:7` or `co-matching:4`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

/// A graph to be placed on `{0, …, n-1}` once `n` is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Cycle on vertices `0..len`.
    Cycle { len: usize },
    /// Path on vertices `0..len`.
    Path { len: usize },
    /// Star with centre 0.
    Star { leaves: usize },
    Matching { edges: usize },
    Complete,
    /// `edges` distinct pairs across the halves `[0, n/2)` and `[n/2, n)`.
    RandomBipartite { edges: usize, seed: u64 },
    Complement { of: Box<GraphSpec> },
    Edges { edges: Vec<[usize; 2]> },
}

impl GraphSpec {
    pub fn build(&self, n: usize) -> Result<Graph> {
        let fits = |need: usize, what: &str| {
            if need > n {
                Err(Error::InvalidArgument(format!("{what} needs {need} vertices, have {n}")))
            } else {
                Ok(())
            }
        };
        match self {
            GraphSpec::Cycle { len } => {
                if *len < 3 {
                    return Err(Error::InvalidArgument(format!("cycle length {len} below 3")));
                }
                fits(*len, "cycle")?;
                let edges: Vec<_> = (0..*len).map(|i| (i, (i + 1) % len)).collect();
                Graph::from_edges(n, &edges)
            }
            GraphSpec::Path { len } => {
                fits(*len, "path")?;
                let edges: Vec<_> = (1..*len).map(|i| (i - 1, i)).collect();
                Graph::from_edges(n, &edges)
            }
            GraphSpec::Star { leaves } => {
                fits(leaves.saturating_add(1), "star")?;
                Ok(Graph::star(n, *leaves))
            }
            GraphSpec::Matching { edges } => {
                fits(edges.saturating_mul(2), "matching")?;
                Ok(Graph::matching(n, *edges))
            }
            GraphSpec::Complete => Ok(Graph::complete(n)),
            GraphSpec::RandomBipartite { edges, seed } => {
                let half = n / 2;
                let mut pairs: Vec<(usize, usize)> =
                    (0..half).flat_map(|u| (half..n).map(move |v| (u, v))).collect();
                if *edges > pairs.len() {
                    return Err(Error::InvalidArgument(format!(
                        "{edges} edges exceed the {} cross pairs on {n} vertices",
                        pairs.len()
                    )));
                }
                pairs.shuffle(&mut rng::seeded_rng(*seed));
                pairs.truncate(*edges);
                pairs.sort_unstable();
                Graph::from_edges(n, &pairs)
            }
            GraphSpec::Complement { of } => Ok(of.build(n)?.complement()),
            GraphSpec::Edges { edges } => {
                let edges: Vec<_> = edges.iter().map(|e| (e[0], e[1])).collect();
                Graph::from_edges(n, &edges)
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle { len } => write!(f, "cycle:{len}"),
            GraphSpec::Path { len } => write!(f, "path:{len}"),
            GraphSpec::Star { leaves } => write!(f, "star:{leaves}"),
            GraphSpec::Matching { edges } => write!(f, "matching:{edges}"),
            GraphSpec::Complete => write!(f, "complete"),
            GraphSpec::RandomBipartite { edges, seed } => write!(f, "random-bipartite:{edges}:{seed}"),
            GraphSpec::Complement { of } => write!(f, "co-{of}"),
            GraphSpec::Edges { edges } => {
                f.write_str("edges:")?;
                for (i, e) in edges.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}-{}", e[0], e[1])?;
                }
                Ok(())
            }
        }
    }
}

/// Nesting limit for `co-` prefixes.
const MAX_COMPLEMENT_DEPTH: usize = 8;

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s.trim(), 0)
    }
}

fn parse(s: &str, depth: usize) -> Result<GraphSpec> {
    let bad = |msg: &str| Error::Malformed(format!("graph spec {s:?}: {msg}"));
    if let Some(rest) = s.strip_prefix("co-") {
        if depth >= MAX_COMPLEMENT_DEPTH {
            return Err(bad("too many complements"));
        }
        return Ok(GraphSpec::Complement {
            of: Box::new(parse(rest, depth + 1)?),
        });
    }
    let (kind, args) = s.split_once(':').unwrap_or((s, ""));
    let num = |t: &str| t.parse::<usize>().map_err(|_| bad("expected a count"));
    let parts: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(':').collect() };
    let one = || match parts.as_slice() {
        [x] => num(x),
        _ => Err(bad("expected exactly one count")),
    };
    match kind {
        "cycle" => Ok(GraphSpec::Cycle { len: one()? }),
        "path" => Ok(GraphSpec::Path { len: one()? }),
        "star" => Ok(GraphSpec::Star { leaves: one()? }),
        "matching" => Ok(GraphSpec::Matching { edges: one()? }),
        "complete" if parts.is_empty() => Ok(GraphSpec::Complete),
        "random-bipartite" => match parts.as_slice() {
            [m] => Ok(GraphSpec::RandomBipartite { edges: num(m)?, seed: 0 }),
            [m, seed] => Ok(GraphSpec::RandomBipartite {
                edges: num(m)?,
                seed: seed.parse().map_err(|_| bad("expected a seed"))?,
            }),
            _ => Err(bad("expected edges[:seed]")),
        },
        "edges" => {
            let edges = if args.is_empty() {
                Vec::new()
            } else {
                args.split(',')
                    .map(|pair| {
                        let (u, v) = pair.split_once('-').ok_or_else(|| bad("expected u-v"))?;
                        Ok([num(u)?, num(v)?])
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            Ok(GraphSpec::Edges { edges })
        }
        _ => Err(bad("unknown kind")),
    }
}
