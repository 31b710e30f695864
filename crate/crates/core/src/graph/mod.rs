//! Undirected friendship networks: loading, generation and degree summaries.

mod edge_list;
mod generate;
mod gml;

use serde::Serialize;

pub use edge_list::{load_edge_list, parse_edge_list, write_edge_list};
pub use generate::generate_power_law;
pub use gml::{load_gml, parse_gml, write_gml};

use crate::error::{Error, Result};

/// Simple undirected graph on dense ids `0..node_count`.
///
/// Neighbor lists are sorted and contain no self-loops or duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
    edge_count: usize,
    self_loops_dropped: usize,
    duplicates_collapsed: usize,
}

impl SocialGraph {
    /// Builds a graph from an edge iterator, dropping self-loops and
    /// collapsing repeated edges (in either orientation).
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut self_loops = 0;
        let mut raw = 0;
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) outside 0..{node_count}"
                )));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            raw += 1;
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(SocialGraph {
            adjacency,
            labels: None,
            edge_count,
            self_loops_dropped: self_loops,
            duplicates_collapsed: raw - edge_count,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates_collapsed
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Same vertex set and edge set; labels and load counters are ignored.
    pub fn same_structure(&self, other: &SocialGraph) -> bool {
        self.adjacency == other.adjacency
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v)));
        SocialGraph::from_edges(n, edges).expect("ids in range")
    }

    pub fn path(n: usize) -> Self {
        SocialGraph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("ids in range")
    }

    /// Node 0 joined to every other node.
    pub fn star(n: usize) -> Self {
        SocialGraph::from_edges(n, (1..n).map(|v| (0, v))).expect("ids in range")
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Checks the structural invariants: symmetric adjacency, no self-loops,
    /// no duplicates, consistent edge count.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut half_edges = 0;
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for w in nbrs.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("node {u}: neighbor list not strictly increasing"));
                }
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v >= self.node_count() {
                    return Err(format!("node {u}: neighbor {v} out of range"));
                }
                if self.adjacency[v].binary_search(&u).is_err() {
                    return Err(format!("edge {u}-{v} not symmetric"));
                }
            }
            half_edges += nbrs.len();
        }
        if half_edges != 2 * self.edge_count {
            return Err(format!("degree sum {half_edges} != 2 x edge count {}", self.edge_count));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: f64,
    /// `histogram[d]` is the number of nodes with degree `d`.
    pub histogram: Vec<usize>,
}

pub fn degree_stats(g: &SocialGraph) -> DegreeStats {
    let mut degrees: Vec<usize> = (0..g.node_count()).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let n = degrees.len();
    let max = degrees.last().copied().unwrap_or(0);
    let mut histogram = vec![0; max + 1];
    for &d in &degrees {
        histogram[d] += 1;
    }
    let median = match n {
        0 => 0.0,
        _ if n % 2 == 1 => degrees[n / 2] as f64,
        _ => (degrees[n / 2 - 1] + degrees[n / 2]) as f64 / 2.0,
    };
    DegreeStats {
        min: degrees.first().copied().unwrap_or(0),
        max,
        mean: if n == 0 {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / n as f64
        },
        median,
        histogram,
    }
}
