use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SocialGraph;
use crate::error::{Error, Result};

/// Preferential-attachment (Barabási-Albert) graph.
///
/// Starts from a complete graph on `m + 1` nodes; each later node attaches to
/// `m` distinct existing nodes chosen with probability proportional to their
/// degree. The result is connected with `m(m+1)/2 + (n-m-1)m` edges, so
/// `m = 1` yields a tree.
pub fn generate_power_law(n: usize, m: usize, seed: u64) -> Result<SocialGraph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidArgument(format!(
            "preferential attachment needs n > m >= 1 (got n = {n}, m = {m})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m * n);
    // every edge endpoint, so a uniform pick is a degree-weighted pick
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * n);
    for u in 0..=m {
        for v in (u + 1)..=m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for new in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((new, t));
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    SocialGraph::from_edges(n, edges)
}
