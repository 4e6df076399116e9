//! Immutable directed graphs with deterministic DAG ordering.
//!
//! Vertices are kept sorted by name, so a vertex's dense index doubles as its
//! rank in the lexicographic order. Everything downstream (move ordering,
//! state keys, serialization) relies on that.

use std::borrow::Borrow;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid vertex name {0:?}")]
    InvalidName(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(VertexId, VertexId),
    #[error("arc {from} -> {to} references undeclared vertex {missing}")]
    UnknownEndpoint {
        from: String,
        to: String,
        missing: String,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("graph has a cycle through arc {0} -> {1}")]
    CycleDetected(VertexId, VertexId),
}

/// Name of a vertex. Ordered by the bytes of the name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if is_valid_name(&name) {
            Ok(VertexId(name))
        } else {
            Err(GraphError::InvalidName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for VertexId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'(' | b')' | b'-'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    names: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    arc_count: usize,
}

impl Digraph {
    /// Builds a graph from vertex names and arcs.
    ///
    /// Without `strict`, repeated vertices and arcs collapse. With it they
    /// are reported as errors.
    pub fn build<S, T, U>(
        vertex_names: &[S],
        arc_pairs: &[(T, U)],
        strict: bool,
    ) -> Result<Self, GraphError>
    where
        S: AsRef<str>,
        T: AsRef<str>,
        U: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for name in vertex_names {
            let id = VertexId::new(name.as_ref())?;
            if !set.insert(id.clone()) && strict {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        let names: Vec<VertexId> = set.into_iter().collect();
        let index: HashMap<VertexId, usize> = names
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();

        let mut arcs = BTreeSet::new();
        for (from, to) in arc_pairs {
            let (from, to) = (from.as_ref(), to.as_ref());
            let lookup = |name: &str| {
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownEndpoint {
                        from: from.to_string(),
                        to: to.to_string(),
                        missing: name.to_string(),
                    })
            };
            let (u, v) = (lookup(from)?, lookup(to)?);
            if !arcs.insert((u, v)) && strict {
                return Err(GraphError::DuplicateArc(names[u].clone(), names[v].clone()));
            }
        }

        let mut out = vec![Vec::new(); names.len()];
        let mut inc = vec![Vec::new(); names.len()];
        // BTreeSet iteration keeps both adjacency lists sorted.
        for &(u, v) in &arcs {
            out[u].push(v);
            inc[v].push(u);
        }
        for list in &mut inc {
            list.sort_unstable();
        }

        Ok(Digraph {
            names,
            index,
            out,
            inc,
            arc_count: arcs.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.names
    }

    /// All arcs, sorted by (from, to).
    pub fn arcs(&self) -> impl Iterator<Item = (&VertexId, &VertexId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(move |(u, list)| list.iter().map(move |&v| (&self.names[u], &self.names[v])))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &VertexId {
        &self.names[idx]
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn has_arc(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(u), Some(v)) => self.out[u].binary_search(&v).is_ok(),
            _ => false,
        }
    }

    /// Out-neighbour indices of `idx`, ascending.
    pub fn out_indices(&self, idx: usize) -> &[usize] {
        &self.out[idx]
    }

    pub fn in_indices(&self, idx: usize) -> &[usize] {
        &self.inc[idx]
    }

    fn require(&self, v: &str) -> Result<usize, GraphError> {
        self.index_of(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn out_neighbors(&self, v: &str) -> Result<Vec<&VertexId>, GraphError> {
        let idx = self.require(v)?;
        Ok(self.out[idx].iter().map(|&u| &self.names[u]).collect())
    }

    /// `(in_count, out_count)` for `v`.
    pub fn degrees(&self, v: &str) -> Result<(usize, usize), GraphError> {
        let idx = self.require(v)?;
        Ok((self.inc[idx].len(), self.out[idx].len()))
    }

    /// Topological order as vertex indices. Among the admissible orders this
    /// is the one that always removes the smallest available source.
    pub fn topological_indices(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.names.len();
        let mut indegree: Vec<usize> = self.inc.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(u)) = ready.pop() {
            order.push(u);
            for &v in &self.out[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    ready.push(Reverse(v));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        let (u, v) = self.arc_on_cycle(&indegree);
        Err(GraphError::CycleDetected(
            self.names[u].clone(),
            self.names[v].clone(),
        ))
    }

    // After Kahn's algorithm stalls, every vertex with positive remaining
    // in-degree has a predecessor that also stalled. Walking predecessors
    // backwards must revisit a vertex, and the closing step is a cycle arc.
    fn arc_on_cycle(&self, indegree: &[usize]) -> (usize, usize) {
        let start = indegree
            .iter()
            .position(|&d| d > 0)
            .expect("stalled vertex");
        let mut seen = vec![false; indegree.len()];
        let mut cur = start;
        loop {
            seen[cur] = true;
            let pred = *self.inc[cur]
                .iter()
                .find(|&&p| indegree[p] > 0)
                .expect("stalled vertex has a stalled predecessor");
            if seen[pred] {
                return (pred, cur);
            }
            cur = pred;
        }
    }

    pub fn validate_dag(&self) -> Result<Vec<VertexId>, GraphError> {
        Ok(self
            .topological_indices()?
            .into_iter()
            .map(|i| self.names[i].clone())
            .collect())
    }

    /// Position of every vertex in the deterministic topological order.
    pub fn topological_ranks(&self) -> Result<Vec<usize>, GraphError> {
        let order = self.topological_indices()?;
        let mut rank = vec![0; order.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        Ok(rank)
    }
}
