//! Bundled reference network used by the benchmark presets and tests.
//!
//! Six agents behind one source. The non-source subgraph splits into an
//! ordered chain of blocks {1} < {2,3} < {4,5,6}: the pair 2,3 couple
//! symmetrically, the tail 4,5,6 is acyclic, and every cross edge points
//! from an earlier block to a later one, which keeps the pinned Laplacian
//! block lower-triangular with a real spectrum {1, 1, 1, 1, 3, 4}.

use crate::graph::{build_graph, Digraph, EdgeSpec, GraphSpec};

pub const SOURCE_ID: u64 = 0;

fn base_edges() -> Vec<EdgeSpec> {
    let e = |from, to| EdgeSpec { from, to, w: 1.0 };
    vec![
        e(SOURCE_ID, 1),
        e(1, 2),
        e(1, 3),
        e(2, 3),
        e(3, 2),
        e(2, 4),
        e(3, 5),
        e(2, 6),
        e(3, 6),
        e(4, 6),
        e(5, 6),
    ]
}

fn build(edges: Vec<EdgeSpec>) -> Digraph {
    build_graph(&GraphSpec {
        agents: vec![1, 2, 3, 4, 5, 6],
        source: SOURCE_ID,
        edges,
    })
    .expect("embedded network is valid")
}

/// The reference network.
pub fn network() -> Digraph {
    build(base_edges())
}

/// The reference network plus unit-weight feedback edges from agents
/// 4, 5, 6 into agent 1. The feedback cycles destroy the block ordering
/// and make the pinned Laplacian's spectrum complex.
pub fn complex_variant() -> Digraph {
    let mut edges = base_edges();
    let e = |from, to| EdgeSpec { from, to, w: 1.0 };
    edges.extend([e(4, 1), e(5, 1), e(6, 1)]);
    build(edges)
}

/// The ordered block partition under which the reference network's pinned
/// Laplacian is block lower-triangular.
pub fn block_partition() -> Vec<Vec<u64>> {
    vec![vec![1], vec![2, 3], vec![4, 5, 6]]
}
