//! Communication graphs and the structural checks the learning guarantees
//! depend on: regularity, double stochasticity of the degree-weighted
//! adjacency matrix, connectivity, and flow balance across cuts.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default floating-point tolerance for the doubly-stochastic row check.
pub const DOUBLY_STOCHASTIC_TOL: f64 = 1e-9;

/// Undirected communication graph over agents `0..num_agents()`.
///
/// Adjacency lists are sorted, deduplicated and symmetric; isolated agents
/// are rejected at construction because every transition rate divides by the
/// degree. A topology is immutable after construction and can be shared
/// across concurrent replications without synchronization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTopology {
    neighbors: Vec<Vec<u32>>,
    min_degree: usize,
}

impl GraphTopology {
    fn from_adjacency(adj: Vec<BTreeSet<u32>>) -> Result<Self> {
        let n = adj.len();
        let mut neighbors = Vec::with_capacity(n);
        let mut min_degree = usize::MAX;
        for (i, set) in adj.into_iter().enumerate() {
            if set.contains(&(i as u32)) {
                return Err(Error::SelfLoop(i));
            }
            if set.is_empty() {
                return Err(Error::IsolatedAgent(i));
            }
            min_degree = min_degree.min(set.len());
            neighbors.push(set.into_iter().collect());
        }
        let g = GraphTopology {
            neighbors,
            min_degree,
        };
        debug_assert!(g.is_symmetric());
        Ok(g)
    }

    fn is_symmetric(&self) -> bool {
        self.neighbors.iter().enumerate().all(|(i, nbrs)| {
            nbrs.iter()
                .all(|&j| self.neighbors[j as usize].binary_search(&(i as u32)).is_ok())
        })
    }

    /// Complete graph on `n >= 2` agents.
    pub fn build_complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewAgents { n, min: 2 });
        }
        let neighbors = (0..n)
            .map(|i| (0..n as u32).filter(|&j| j != i as u32).collect())
            .collect();
        Ok(GraphTopology {
            neighbors,
            min_degree: n - 1,
        })
    }

    /// Circular graph on `n >= 3` agents; agent `i` is adjacent to
    /// `i - 1 mod n` and `i + 1 mod n`.
    pub fn build_cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewAgents { n, min: 3 });
        }
        let neighbors = (0..n)
            .map(|i| {
                let prev = ((i + n - 1) % n) as u32;
                let next = ((i + 1) % n) as u32;
                let mut v = vec![prev, next];
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        Ok(GraphTopology {
            neighbors,
            min_degree: 2,
        })
    }

    /// Random simple `d`-regular graph via the pairing model: stubs are
    /// shuffled and matched greedily; stubs whose match would create a
    /// self-loop or multi-edge are pooled and reshuffled, and a pass without
    /// progress (a dead end) triggers a full restart, up to 10^4 restarts.
    /// Deterministic for a fixed seed. When `require_connected` is set,
    /// disconnected outcomes also restart.
    pub fn build_random_regular(
        n: usize,
        d: usize,
        seed: u64,
        require_connected: bool,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewAgents { n, min: 2 });
        }
        if d == 0 || d >= n || (n * d) % 2 == 1 {
            return Err(Error::InfeasibleDegree { n, d });
        }
        const MAX_RESTARTS: u32 = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_RESTARTS {
            if let Some(adj) = pairing_attempt(n, d, &mut rng) {
                if require_connected && !adjacency_connected(&adj) {
                    continue;
                }
                return Self::from_adjacency(adj);
            }
        }
        Err(Error::RetryBudgetExhausted {
            attempts: MAX_RESTARTS,
        })
    }

    /// Disjoint union of `num_components` complete graphs, each on
    /// `component_size >= 2` agents.
    pub fn build_disjoint_cliques(num_components: usize, component_size: usize) -> Result<Self> {
        if num_components < 1 {
            return Err(Error::TooFewAgents { n: 0, min: 1 });
        }
        if component_size < 2 {
            return Err(Error::ComponentTooSmall(component_size));
        }
        let n = num_components * component_size;
        let neighbors = (0..n)
            .map(|i| {
                let base = (i / component_size) * component_size;
                (base..base + component_size)
                    .map(|j| j as u32)
                    .filter(|&j| j != i as u32)
                    .collect()
            })
            .collect();
        Ok(GraphTopology {
            neighbors,
            min_degree: component_size - 1,
        })
    }

    /// Builds a graph from an explicit edge list. Edges are deduplicated and
    /// symmetrized; out-of-range indices, self-loops and isolated agents are
    /// rejected.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewAgents { n, min: 2 });
        }
        let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::IndexOutOfRange { index: a, n });
            }
            if b >= n {
                return Err(Error::IndexOutOfRange { index: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            adj[a].insert(b as u32);
            adj[b].insert(a as u32);
        }
        Self::from_adjacency(adj)
    }

    pub fn num_agents(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted neighbor list of `agent`.
    pub fn neighbors(&self, agent: usize) -> &[u32] {
        &self.neighbors[agent]
    }

    pub fn degree(&self, agent: usize) -> usize {
        self.neighbors[agent].len()
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    /// All edges as `(i, j)` pairs with `i < j`, in ascending order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            for &j in nbrs {
                if (i as u32) < j {
                    out.push((i as u32, j));
                }
            }
        }
        out
    }

    /// Returns the common degree when the graph is regular.
    pub fn is_regular(&self) -> Option<usize> {
        let d = self.degree(0);
        self.neighbors
            .iter()
            .all(|nbrs| nbrs.len() == d)
            .then_some(d)
    }

    /// Whether every row of inverse-degree neighbor sums equals 1, i.e. the
    /// degree-weighted adjacency matrix is doubly-stochastic. With `tol = 0`
    /// the check runs in exact rational arithmetic; otherwise each row sum
    /// must satisfy `|sum - 1| <= tol`.
    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        if tol == 0.0 {
            return self.is_doubly_stochastic_exact();
        }
        self.neighbors.iter().all(|nbrs| {
            let sum: f64 = nbrs
                .iter()
                .map(|&j| 1.0 / self.degree(j as usize) as f64)
                .sum();
            (sum - 1.0).abs() <= tol
        })
    }

    fn is_doubly_stochastic_exact(&self) -> bool {
        let one = BigRational::from_integer(BigInt::from(1));
        self.neighbors.iter().all(|nbrs| {
            let mut sum = BigRational::from_integer(BigInt::from(0));
            for &j in nbrs {
                sum += BigRational::new(BigInt::from(1), BigInt::from(self.degree(j as usize)));
            }
            sum == one
        })
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Partition of the agents into connected components (breadth-first
    /// search); each component is sorted, and components are ordered by
    /// their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let n = self.num_agents();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start as u32]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbors(u as usize) {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Component id per agent, ids numbered as in [`connected_components`].
    ///
    /// [`connected_components`]: GraphTopology::connected_components
    pub fn component_ids(&self) -> Vec<u32> {
        let comps = self.connected_components();
        let mut ids = vec![0u32; self.num_agents()];
        for (c, members) in comps.iter().enumerate() {
            for &m in members {
                ids[m as usize] = c as u32;
            }
        }
        ids
    }

    /// Inverse-degree-weighted flow out of and into the subset:
    /// `outflow = sum_{i in S} (1/deg i) * #{j in V_i : j not in S}` and
    /// symmetrically for `inflow`. On a doubly-stochastic graph the two
    /// agree for every subset.
    pub fn flow_balance(&self, subset: &[u32]) -> Result<(f64, f64)> {
        let n = self.num_agents();
        let mut in_set = vec![false; n];
        for &i in subset {
            if i as usize >= n {
                return Err(Error::IndexOutOfRange {
                    index: i as usize,
                    n,
                });
            }
            in_set[i as usize] = true;
        }
        let mut outflow = 0.0;
        let mut inflow = 0.0;
        for i in 0..n {
            let crossing = self
                .neighbors(i)
                .iter()
                .filter(|&&j| in_set[j as usize] != in_set[i])
                .count();
            let share = crossing as f64 / self.degree(i) as f64;
            if in_set[i] {
                outflow += share;
            } else {
                inflow += share;
            }
        }
        Ok((outflow, inflow))
    }

    /// Canonical edge-list text: first line `N <num_agents>`, then one
    /// `i j` pair per line with `i < j`, ascending. Writing the result of
    /// [`from_edge_list_str`] reproduces the input byte for byte.
    ///
    /// [`from_edge_list_str`]: GraphTopology::from_edge_list_str
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "N {}", self.num_agents());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Parses the edge-list format: first non-comment line `N <num_agents>`,
    /// then whitespace-separated `i j` pairs (0-based). Lines starting with
    /// `#` and blank lines are skipped.
    pub fn from_edge_list_str(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |tok: &str| -> Result<usize> {
                tok.parse().map_err(|_| Error::EdgeListParse {
                    line: lineno + 1,
                    msg: format!("expected an integer, got `{tok}`"),
                })
            };
            let mut toks = line.split_whitespace();
            match n {
                None => {
                    if toks.next() != Some("N") {
                        return Err(Error::EdgeListParse {
                            line: lineno + 1,
                            msg: "first line must be `N <num_agents>`".into(),
                        });
                    }
                    let count = toks.next().ok_or_else(|| Error::EdgeListParse {
                        line: lineno + 1,
                        msg: "missing agent count".into(),
                    })?;
                    n = Some(parse(count)?);
                }
                Some(_) => {
                    let (a, b) = match (toks.next(), toks.next(), toks.next()) {
                        (Some(a), Some(b), None) => (a, b),
                        _ => {
                            return Err(Error::EdgeListParse {
                                line: lineno + 1,
                                msg: "expected exactly two indices".into(),
                            })
                        }
                    };
                    edges.push((parse(a)?, parse(b)?));
                }
            }
        }
        let n = n.ok_or_else(|| Error::EdgeListParse {
            line: 0,
            msg: "empty edge-list file".into(),
        })?;
        Self::from_edge_list(n, &edges)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        Self::from_edge_list_str(&std::fs::read_to_string(path)?)
    }
}

/// One configuration-model attempt: match shuffled stubs pairwise, keep the
/// valid edges, reshuffle the conflicted stubs, and give up (None) when a
/// whole pass makes no progress.
fn pairing_attempt(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<BTreeSet<u32>>> {
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    let mut stubs: Vec<u32> = (0..n as u32)
        .flat_map(|i| std::iter::repeat_n(i, d))
        .collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let half = stubs.len() / 2;
        let mut leftover = Vec::new();
        for m in 0..half {
            let u = stubs[m];
            let v = stubs[m + half];
            if u == v || adj[u as usize].contains(&v) {
                leftover.push(u);
                leftover.push(v);
            } else {
                adj[u as usize].insert(v);
                adj[v as usize].insert(u);
            }
        }
        if leftover.len() == stubs.len() {
            return None; // dead end: every remaining match conflicts
        }
        stubs = leftover;
    }
    Some(adj)
}

fn adjacency_connected(adj: &[BTreeSet<u32>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0u32]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u as usize] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}
