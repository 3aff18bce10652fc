//! Euler-based review assignment.
//!
//! Agents are split into two halves `X` and `Y`, a simple `2m`-regular
//! bipartite graph is grown greedily between them, and the edges are oriented
//! along an Euler circuit. Every agent is entered and left `m` times, so the
//! result is `m`-regular, and every agent only reviews agents on the other
//! side. Two agents linked by a review therefore never share a reviewee.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::types::{AgentId, Assignment, Params};

/// How many times construction is retried when the greedy graph comes out
/// disconnected.
pub const DEFAULT_MAX_ATTEMPTS: usize = 100;

/// Undirected simple bipartite graph between two disjoint agent sets.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n: usize,
    left: Vec<AgentId>,
    right: Vec<AgentId>,
    side: Vec<Option<bool>>,
    adjacency: Vec<Vec<(AgentId, usize)>>,
    edges: Vec<(AgentId, AgentId)>,
}

impl BipartiteGraph {
    /// An edgeless graph on nodes `0..n` with the given parts.
    pub fn new(n: usize, left: Vec<AgentId>, right: Vec<AgentId>) -> Result<Self> {
        let mut side = vec![None; n];
        for (nodes, is_left) in [(&left, true), (&right, false)] {
            for &v in nodes {
                if v >= n {
                    return Err(Error::AgentOutOfRange { index: v, n });
                }
                if side[v].is_some() {
                    return Err(invalid(format!("node {v} appears twice in the partition")));
                }
                side[v] = Some(is_left);
            }
        }
        Ok(BipartiteGraph { n, left, right, side, adjacency: vec![Vec::new(); n], edges: Vec::new() })
    }

    /// Adds the edge `{x, y}`. Edges must cross the partition and may not be
    /// repeated.
    pub fn add_edge(&mut self, x: AgentId, y: AgentId) -> Result<()> {
        match (self.side.get(x).copied().flatten(), self.side.get(y).copied().flatten()) {
            (Some(a), Some(b)) if a != b => {}
            _ => return Err(invalid(format!("edge {{{x}, {y}}} does not cross the partition"))),
        }
        if self.adjacency[x].iter().any(|&(v, _)| v == y) {
            return Err(invalid(format!("parallel edge {{{x}, {y}}}")));
        }
        let id = self.edges.len();
        self.edges.push((x, y));
        self.adjacency[x].push((y, id));
        self.adjacency[y].push((x, id));
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn left(&self) -> &[AgentId] {
        &self.left
    }

    pub fn right(&self) -> &[AgentId] {
        &self.right
    }

    pub fn edges(&self) -> &[(AgentId, AgentId)] {
        &self.edges
    }

    pub fn degree(&self, v: AgentId) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.adjacency[v].iter().map(|&(u, _)| u)
    }

    /// True when all nodes carrying at least one edge lie in one component.
    pub fn is_connected(&self) -> bool {
        let Some(start) = (0..self.n).find(|&v| self.degree(v) > 0) else {
            return true;
        };
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..self.n).all(|v| seen[v] || self.degree(v) == 0)
    }
}

/// Hierholzer's algorithm. Returns a closed walk `v0, v1, …, v0` using every
/// edge exactly once; an edgeless graph yields an empty walk.
pub fn find_euler_cycle(g: &BipartiteGraph) -> Result<Vec<AgentId>> {
    if let Some(node) = (0..g.n).find(|&v| g.degree(v) % 2 == 1) {
        return Err(Error::OddDegree { node, degree: g.degree(node) });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let Some(start) = (0..g.n).find(|&v| g.degree(v) > 0) else {
        return Ok(Vec::new());
    };

    let mut used = vec![false; g.edges.len()];
    let mut next = vec![0usize; g.n];
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(g.edges.len() + 1);
    while let Some(&v) = stack.last() {
        let adj = &g.adjacency[v];
        while next[v] < adj.len() && used[adj[next[v]].1] {
            next[v] += 1;
        }
        if next[v] == adj.len() {
            circuit.push(v);
            stack.pop();
        } else {
            let (u, id) = adj[next[v]];
            used[id] = true;
            stack.push(u);
        }
    }
    circuit.reverse();
    debug_assert_eq!(circuit.len(), g.edges.len() + 1);
    Ok(circuit)
}

/// Builds a strategyproof `m`-regular assignment for `p.n` agents.
pub fn build_assignment<R: Rng + ?Sized>(p: &Params, rng: &mut R) -> Result<Assignment> {
    euler_assignment(p.n, p.m, DEFAULT_MAX_ATTEMPTS, rng)
}

/// Euler-based assignment for `n` agents each reviewing `m` others.
///
/// Requires `n` even and `m <= n/4`, so each node of `X` can be joined to
/// `2m` distinct nodes of `Y`.
pub fn euler_assignment<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Assignment> {
    if n % 2 != 0 {
        return Err(invalid(format!("Euler assignment needs an even number of agents, got {n}")));
    }
    if m == 0 || 4 * m > n {
        return Err(invalid(format!("Euler assignment needs 1 <= m <= n/4 (n={n}, m={m})")));
    }
    for _ in 0..max_attempts {
        let g = random_regular_bipartite(n, m, rng)?;
        match find_euler_cycle(&g) {
            Ok(cycle) => return orient(n, &cycle),
            Err(Error::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConstructionFailed(max_attempts))
}

/// Greedy `2m`-regular bipartite graph on a random halving of `0..n`. Each
/// `x` is joined to the `2m` currently least-loaded nodes of `Y`, ties broken
/// at random.
pub fn random_regular_bipartite<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<BipartiteGraph> {
    let mut nodes: Vec<AgentId> = (0..n).collect();
    nodes.shuffle(rng);
    let right = nodes.split_off(n / 2);
    let left = nodes;
    let mut g = BipartiteGraph::new(n, left.clone(), right.clone())?;

    let mut candidates = right;
    for &x in &left {
        candidates.shuffle(rng);
        // Stable sort keeps the shuffled order among equal degrees.
        candidates.sort_by_key(|&y| g.degree(y));
        for i in 0..2 * m {
            g.add_edge(x, candidates[i])?;
        }
    }
    Ok(g)
}

fn orient(n: usize, cycle: &[AgentId]) -> Result<Assignment> {
    Assignment::from_arcs(n, cycle.windows(2).map(|w| (w[0], w[1])))
}

/// True iff no arc `(i, j)` has its reverse present and no such pair shares a
/// reviewee. Under this structure no agent can influence the weight of one of
/// its own reviewers.
pub fn check_sp_structure(a: &Assignment) -> bool {
    a.arcs().all(|(i, j)| !a.contains_arc(j, i) && disjoint(a.reviewees(i), a.reviewees(j)))
}

fn disjoint(a: &[AgentId], b: &[AgentId]) -> bool {
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}
