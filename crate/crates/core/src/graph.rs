//! Weighted digraphs with a pinned source node, Laplacian partition, and
//! structural validation.
//!
//! Edge direction convention: an edge `from -> to` means `to` listens to
//! `from`, i.e. `from` is in the neighbor set of `to` and the weight lands
//! in entry `(to, from)` of the weight table. The source node never
//! listens to anyone and is stored last internally, so the pinned system
//! is a plain leading-block extraction of the Laplacian.

use crate::error::GraphError;
use crate::matrix::Matrix;
use crate::numerics::{self, Complex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type NodeId = u64;

/// Graph file schema: `{"agents": [...], "source": id, "edges": [{"from", "to", "w"}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub agents: Vec<NodeId>,
    pub source: NodeId,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: NodeId,
    pub to: NodeId,
    pub w: f64,
}

/// A validated digraph with the source reindexed to the last slot.
#[derive(Debug, Clone)]
pub struct Digraph {
    n_agents: usize,
    agent_ids: Vec<NodeId>,
    source_id: NodeId,
    /// `weights[(i, k)]` is the weight agent `i` places on node `k`
    /// (edge `k -> i`); dimension `(n+1) x (n+1)`, source row all zero.
    weights: Matrix,
}

impl Digraph {
    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn agent_ids(&self) -> &[NodeId] {
        &self.agent_ids
    }

    pub fn source_id(&self) -> NodeId {
        self.source_id
    }

    /// Weight agent `i` (internal index) places on node `k` (internal index,
    /// source = `n_agents`). Zero when there is no edge `k -> i`.
    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.weights[(i, k)]
    }

    fn internal_index(&self, id: NodeId) -> Option<usize> {
        if id == self.source_id {
            return Some(self.n_agents);
        }
        self.agent_ids.binary_search(&id).ok()
    }
}

/// Pinned Laplacian `K`, input vector `B`, and the full Laplacian.
#[derive(Debug, Clone)]
pub struct PinnedSystem {
    pub k: Matrix,
    pub b: Vec<f64>,
    pub laplacian: Matrix,
}

impl PinnedSystem {
    pub fn n(&self) -> usize {
        self.b.len()
    }
}

/// Spectral data of the pinned Laplacian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex>,
    pub magnitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub m_lo: f64,
    pub m_hi: f64,
    pub phi_hi: f64,
    pub all_real: bool,
}

/// Relative imaginary-part threshold below which a spectrum counts as real.
pub const ALL_REAL_REL_TOL: f64 = 1e-9;

/// Source reachability result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connectivity {
    pub fully_connected: bool,
    pub unreachable: Vec<NodeId>,
}

/// Structural facts about the non-source subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub is_acyclic: bool,
    pub is_symmetric: bool,
    pub partition_valid: Option<bool>,
}

/// Validates and normalizes an edge-list description.
pub fn build_graph(spec: &GraphSpec) -> Result<Digraph, GraphError> {
    if spec.agents.is_empty() {
        return Err(GraphError::NoAgents);
    }
    let mut agent_ids = spec.agents.clone();
    agent_ids.sort_unstable();
    for pair in agent_ids.windows(2) {
        if pair[0] == pair[1] {
            return Err(GraphError::DuplicateNode(pair[0]));
        }
    }
    if agent_ids.binary_search(&spec.source).is_ok() {
        return Err(GraphError::SourceIsAgent(spec.source));
    }
    let n = agent_ids.len();
    let graph = Digraph {
        n_agents: n,
        agent_ids,
        source_id: spec.source,
        weights: Matrix::zeros(n + 1, n + 1),
    };
    let mut graph = graph;
    let mut seen = BTreeSet::new();
    for e in &spec.edges {
        if e.from == e.to {
            return Err(GraphError::SelfEdge(e.from));
        }
        if e.to == spec.source {
            return Err(GraphError::EdgeIntoSource {
                from: e.from,
                to: e.to,
            });
        }
        if !(e.w > 0.0) || !e.w.is_finite() {
            return Err(GraphError::NonpositiveWeight {
                from: e.from,
                to: e.to,
                weight: e.w,
            });
        }
        let from = graph
            .internal_index(e.from)
            .ok_or(GraphError::UnknownNode(e.from))?;
        let to = graph
            .internal_index(e.to)
            .ok_or(GraphError::UnknownNode(e.to))?;
        if !seen.insert((from, to)) {
            return Err(GraphError::DuplicateEdge {
                from: e.from,
                to: e.to,
            });
        }
        graph.weights[(to, from)] = e.w;
    }
    Ok(graph)
}

/// Extracts `K` and `B` from the Laplacian partition.
pub fn pinned_system(g: &Digraph) -> PinnedSystem {
    let n = g.n_agents;
    let mut l = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        let mut degree = 0.0;
        for k in 0..=n {
            if k != i {
                let w = g.weights[(i, k)];
                degree += w;
                if w != 0.0 {
                    l[(i, k)] = -w;
                }
            }
        }
        l[(i, i)] = degree;
    }
    // Source row stays zero: the source listens to nobody.
    let mut k_mat = Matrix::zeros(n, n);
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            k_mat[(i, j)] = l[(i, j)];
        }
        b[i] = -l[(i, n)];
    }
    PinnedSystem {
        k: k_mat,
        b,
        laplacian: l,
    }
}

/// BFS from the source along edge direction.
pub fn check_source_connectivity(g: &Digraph) -> Connectivity {
    let n = g.n_agents;
    let mut reached = vec![false; n + 1];
    reached[n] = true;
    let mut queue = vec![n];
    while let Some(k) = queue.pop() {
        // Edge k -> i exists when agent i has weight on k.
        for i in 0..n {
            if !reached[i] && g.weights[(i, k)] != 0.0 {
                reached[i] = true;
                queue.push(i);
            }
        }
    }
    let unreachable: Vec<NodeId> = (0..n)
        .filter(|&i| !reached[i])
        .map(|i| g.agent_ids[i])
        .collect();
    Connectivity {
        fully_connected: unreachable.is_empty(),
        unreachable,
    }
}

/// Eigenvalues of the pinned Laplacian with magnitude/phase bounds.
pub fn spectrum(ps: &PinnedSystem) -> Result<Spectrum, GraphError> {
    let result = numerics::eigenvalues(&ps.k)?;
    let eigenvalues = result.eigenvalues;
    let max_mag = eigenvalues.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    for c in &eigenvalues {
        if c.re <= ALL_REAL_REL_TOL * max_mag.max(1.0) {
            return Err(GraphError::NonpositiveRealPart { re: c.re });
        }
    }
    let magnitudes: Vec<f64> = eigenvalues.iter().map(|c| c.norm()).collect();
    let phases: Vec<f64> = eigenvalues.iter().map(|c| c.im.atan2(c.re)).collect();
    let m_lo = magnitudes.iter().cloned().fold(f64::INFINITY, f64::min);
    let m_hi = magnitudes.iter().cloned().fold(0.0, f64::max);
    let phi_hi = phases.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let all_real = eigenvalues
        .iter()
        .all(|c| c.im.abs() <= ALL_REAL_REL_TOL * max_mag);
    Ok(Spectrum {
        eigenvalues,
        magnitudes,
        phases,
        m_lo,
        m_hi,
        phi_hi,
        all_real,
    })
}

/// Checks acyclicity, weight symmetry, and (optionally) a user-supplied
/// ordered block partition for lower block-triangular structure with
/// symmetric-or-acyclic diagonal blocks.
pub fn structure_report(
    g: &Digraph,
    partition: Option<&[Vec<NodeId>]>,
) -> Result<StructureReport, GraphError> {
    let n = g.n_agents;
    let agent_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&k| k != i).map(move |k| (k, i)))
        .filter(|&(k, i)| g.weights[(i, k)] != 0.0)
        .collect();

    let is_acyclic = is_acyclic(n, &agent_edges, |x| x);
    let mut is_symmetric = true;
    for i in 0..n {
        for k in (i + 1)..n {
            if g.weights[(i, k)] != g.weights[(k, i)] {
                is_symmetric = false;
            }
        }
    }

    let partition_valid = match partition {
        None => None,
        Some(blocks) => Some(validate_partition(g, blocks, &agent_edges)?),
    };

    Ok(StructureReport {
        is_acyclic,
        is_symmetric,
        partition_valid,
    })
}

fn is_acyclic(n: usize, edges: &[(usize, usize)], map: impl Fn(usize) -> usize) -> bool {
    // Kahn's algorithm over the mapped node set.
    let mut indegree = BTreeMap::new();
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        indegree.entry(map(v)).or_insert(0usize);
    }
    for &(from, to) in edges {
        *indegree.entry(map(to)).or_insert(0) += 1;
        out.entry(map(from)).or_default().push(map(to));
    }
    let mut ready: Vec<usize> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&v, _)| v)
        .collect();
    let mut removed = 0;
    let total = indegree.len();
    while let Some(v) = ready.pop() {
        removed += 1;
        if let Some(succ) = out.get(&v) {
            for &w in succ.clone().iter() {
                let d = indegree.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
    }
    removed == total
}

fn validate_partition(
    g: &Digraph,
    blocks: &[Vec<NodeId>],
    agent_edges: &[(usize, usize)],
) -> Result<bool, GraphError> {
    let n = g.n_agents;
    let mut block_of = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        for &id in block {
            let idx = g
                .internal_index(id)
                .filter(|&i| i < n)
                .ok_or_else(|| GraphError::MalformedPartition(format!("unknown agent id {id}")))?;
            if block_of[idx] != usize::MAX {
                return Err(GraphError::MalformedPartition(format!(
                    "agent {id} appears in more than one block"
                )));
            }
            block_of[idx] = b;
        }
    }
    if block_of.iter().any(|&b| b == usize::MAX) {
        return Err(GraphError::MalformedPartition(
            "partition does not cover all agents".into(),
        ));
    }

    // Every edge must end in a block no earlier than its start block.
    let ordering_ok = agent_edges
        .iter()
        .all(|&(from, to)| block_of[from] <= block_of[to]);

    // Each diagonal block must be symmetric or acyclic.
    let mut blocks_ok = true;
    for b in 0..blocks.len() {
        let members: Vec<usize> = (0..n).filter(|&i| block_of[i] == b).collect();
        let inner: Vec<(usize, usize)> = agent_edges
            .iter()
            .filter(|&&(from, to)| block_of[from] == b && block_of[to] == b)
            .map(|&(from, to)| {
                (
                    members.iter().position(|&m| m == from).unwrap(),
                    members.iter().position(|&m| m == to).unwrap(),
                )
            })
            .collect();
        let symmetric = members.iter().all(|&i| {
            members
                .iter()
                .all(|&k| g.weights[(i, k)] == g.weights[(k, i)])
        });
        let acyclic = is_acyclic(members.len(), &inner, |x| x);
        if !(symmetric || acyclic) {
            blocks_ok = false;
        }
    }
    Ok(ordering_ok && blocks_ok)
}

/// Residual of the Laplacian row-sum identity `K 1 = B`, infinity norm.
pub fn row_sum_residual(ps: &PinnedSystem) -> f64 {
    let ones = vec![1.0; ps.n()];
    ps.k.matvec(&ones)
        .iter()
        .zip(&ps.b)
        .fold(0.0f64, |m, (x, b)| m.max((x - b).abs()))
}
