use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Largest vertex count accepted by the text and JSON decoders.
pub const MAX_IO_VERTICES: usize = 4096;

/// JSON form `{"n": 4, "edges": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Self> {
        if g.n > MAX_IO_VERTICES {
            return Err(Error::Malformed(format!(
                "n = {} exceeds {MAX_IO_VERTICES}",
                g.n
            )));
        }
        let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(g.n, &edges).map_err(|e| Error::Malformed(e.to_string()))
    }
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Graph::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl Graph {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph serializes")
    }

    /// Parses whitespace-separated edge-list text: the vertex count followed
    /// by pairs `u v`. Everything after `#` on a line is a comment.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Malformed("missing vertex count".into()))?
            .parse()
            .map_err(|e| Error::Malformed(format!("vertex count: {e}")))?;
        if n > MAX_IO_VERTICES {
            return Err(Error::Malformed(format!("n = {n} exceeds {MAX_IO_VERTICES}")));
        }
        let mut g = Graph::empty(n);
        loop {
            let Some(a) = tokens.next() else { break };
            let b = tokens
                .next()
                .ok_or_else(|| Error::Malformed("dangling vertex without a partner".into()))?;
            let parse = |t: &str| -> Result<usize> {
                t.parse()
                    .map_err(|e| Error::Malformed(format!("vertex {t:?}: {e}")))
            };
            let (u, v) = (parse(a)?, parse(b)?);
            if u >= n || v >= n || u == v {
                return Err(Error::Malformed(format!("invalid edge {u} {v} for n = {n}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}
