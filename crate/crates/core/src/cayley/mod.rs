//! Cayley multigraphs of finite groups: breadth-first realization, distances,
//! girth, ball growth, Cheeger constants and spectral gaps.

mod cheeger;
mod metrics;
mod spectral;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{Element, GenSet, Group, GroupSpec, Multiplication};

pub use cheeger::{bfs_prefix_cut, cheeger_exact, Cut, CHEEGER_MAX_ORDER};
pub use metrics::{central_distortion_heisenberg, GraphMetrics, MetricsConfig};
pub use spectral::{dense_spectral_gap, spectral_gap, SpectralGap, DENSE_MAX_ORDER};

/// Vertex budget used when nothing else is configured.
pub const DEFAULT_MAX_VERTICES: u64 = 1_000_000;

/// A Cayley multigraph. Vertex 0 is the identity, vertices are numbered in
/// breadth-first discovery order, and `neighbor(v, i)` is `v·s_i`. Loops and
/// parallel edges are kept, so every vertex has exactly `degree` slots.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    group: Group,
    gens: GenSet,
    vertices: Vec<Element>,
    index: HashMap<Element, u32>,
    adj: Vec<u32>,
    dist: Vec<u32>,
    parent_slot: Vec<u32>,
}

fn budget(what: String, needed: u64, limit: u64) -> Error {
    Error::Budget { what, needed, limit }
}

impl CayleyGraph {
    /// Builds the Cayley graph of `spec` for its canonical generating set.
    pub fn build(spec: &GroupSpec, max_size: u64) -> Result<CayleyGraph> {
        let group = Group::new(spec)?;
        let gens = group.generators();
        CayleyGraph::build_with(group, gens, max_size)
    }

    /// Builds the Cayley graph for an arbitrary symmetric generating multiset.
    /// Fails if it does not generate the group.
    pub fn build_with(group: Group, gens: GenSet, max_size: u64) -> Result<CayleyGraph> {
        let order = group.order().to_u64().unwrap_or(u64::MAX);
        if order > max_size || order > u32::MAX as u64 {
            return Err(budget(format!("Cayley graph of {}", group.spec()), order, max_size));
        }
        let d = gens.len();
        let n = order as usize;
        let mut vertices = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        let mut adj = Vec::with_capacity(n * d);
        let mut dist = Vec::with_capacity(n);
        let mut parent_slot = Vec::with_capacity(n);
        vertices.push(group.identity());
        index.insert(group.identity(), 0u32);
        dist.push(0);
        parent_slot.push(u32::MAX);
        let mut head = 0;
        while head < vertices.len() {
            let x = vertices[head];
            for (i, s) in gens.elems().iter().enumerate() {
                let y = group.mul_unchecked(&x, s);
                let next = vertices.len() as u32;
                let id = *index.entry(y).or_insert(next);
                if id == next {
                    if vertices.len() == n {
                        return Err(Error::Verification(format!(
                            "BFS of {} exceeded the closed-form order {order}",
                            group.spec()
                        )));
                    }
                    vertices.push(y);
                    dist.push(dist[head] + 1);
                    parent_slot.push(i as u32);
                }
                adj.push(id);
            }
            head += 1;
        }
        if vertices.len() != n {
            return Err(Error::InvalidInput(format!(
                "generators reach {} of {order} elements of {}",
                vertices.len(),
                group.spec()
            )));
        }
        Ok(CayleyGraph { group, gens, vertices, index, adj, dist, parent_slot })
    }

    pub fn spec(&self) -> &GroupSpec {
        self.group.spec()
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn gens(&self) -> &GenSet {
        &self.gens
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn vertices(&self) -> &[Element] {
        &self.vertices
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    pub fn neighbor(&self, v: usize, slot: usize) -> usize {
        self.adj[v * self.degree() + slot] as usize
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        let d = self.degree();
        &self.adj[v * d..(v + 1) * d]
    }

    /// Word length of every vertex.
    pub fn distances_from_identity(&self) -> &[u32] {
        &self.dist
    }

    /// Eccentricity of the identity, which is the diameter since Cayley
    /// graphs are vertex-transitive.
    pub fn diameter(&self) -> u32 {
        *self.dist.last().expect("graphs have at least one vertex")
    }

    /// Distances from an arbitrary vertex.
    pub fn bfs_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.order()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn is_tree_edge(&self, u: usize, slot: usize, v: usize) -> bool {
        let inv = self.gens.inverse_slot(slot);
        // Either the edge that discovered v, or u's edge back to its parent.
        (v != 0 && self.parent_slot[v] as usize == slot && self.neighbor(v, inv) == u)
            || (u != 0 && self.parent_slot[u] as usize == inv)
    }

    /// Shortest cycle through the identity: the least `d(u) + d(v) + 1`
    /// over edges outside the breadth-first tree. Loops give 1 and parallel
    /// edges 2.
    pub fn girth(&self) -> Girth {
        let d = self.degree();
        let mut best: Option<u32> = None;
        for u in 0..self.order() {
            let du = self.dist[u];
            if best.is_some_and(|b| 2 * du >= b) {
                break;
            }
            for slot in 0..d {
                let v = self.neighbor(u, slot);
                if self.is_tree_edge(u, slot, v) {
                    continue;
                }
                let len = du + self.dist[v] + 1;
                if best.is_none_or(|b| len < b) {
                    best = Some(len);
                }
            }
        }
        best.map_or(Girth::Acyclic, Girth::Finite)
    }

    /// Adjacency multiplicities `A[u][v]` as a dense row-major matrix.
    pub fn dense_adjacency(&self) -> Vec<f64> {
        let n = self.order();
        let mut a = vec![0.0; n * n];
        for u in 0..n {
            for &v in self.neighbors(u) {
                a[u * n + v as usize] += 1.0;
            }
        }
        a
    }

    /// Writes the `boxlab-graph v1` edge list: one `u v g` line per slot.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "boxlab-graph v1")?;
        let d = self.degree();
        for u in 0..self.order() {
            for g in 0..d {
                writeln!(out, "{} {} {}", u, self.neighbor(u, g), g)?;
            }
        }
        Ok(())
    }

    pub fn envelope(&self) -> GraphEnvelope {
        let d = self.degree();
        let mut edges = Vec::with_capacity(self.order() * d);
        for u in 0..self.order() {
            for g in 0..d {
                edges.push([u as u64, self.neighbor(u, g) as u64, g as u64]);
            }
        }
        GraphEnvelope {
            spec: self.spec().clone(),
            order: self.order() as u64,
            degree: d as u64,
            edges,
        }
    }
}

/// JSON form of a Cayley graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEnvelope {
    pub spec: GroupSpec,
    pub order: u64,
    pub degree: u64,
    pub edges: Vec<[u64; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Girth {
    Finite(u32),
    Acyclic,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Acyclic => write!(f, "acyclic"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u32(*g),
            Girth::Acyclic => s.serialize_str("acyclic"),
        }
    }
}

impl<'de> Deserialize<'de> for Girth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u32),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(g) => Ok(Girth::Finite(g)),
            Repr::S(s) if s == "acyclic" => Ok(Girth::Acyclic),
            Repr::S(s) => Err(serde::de::Error::custom(format!("bad girth {s:?}"))),
        }
    }
}

/// Cumulative ball sizes `|B(0)|, …, |B(R)|` around the identity of a
/// finite quotient or an infinite parent.
pub fn ball_growth<M: Multiplication>(group: &M, radius: u32, max_size: u64) -> Result<Vec<u64>> {
    let gens = group.generator_list();
    let mut seen: HashSet<M::Elem> = HashSet::new();
    let mut frontier = vec![group.identity()];
    seen.insert(group.identity());
    let mut out = vec![1u64];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = group.mul(x, s);
                if !seen.contains(&y) {
                    if seen.len() as u64 >= max_size {
                        return Err(budget("ball".into(), seen.len() as u64 + 1, max_size));
                    }
                    seen.insert(y.clone());
                    next.push(y);
                }
            }
        }
        out.push(seen.len() as u64);
        frontier = next;
    }
    Ok(out)
}

/// Breadth-first search in `group` to `radius`, returning the least word
/// length of an element other than the identity that satisfies `pred`.
pub fn first_hit<M, F>(group: &M, radius: u32, max_size: u64, mut pred: F) -> Result<Option<u32>>
where
    M: Multiplication,
    F: FnMut(&M::Elem) -> Result<bool>,
{
    let gens = group.generator_list();
    let mut seen: HashSet<M::Elem> = HashSet::new();
    let mut frontier = vec![group.identity()];
    seen.insert(group.identity());
    for r in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = group.mul(x, s);
                if seen.contains(&y) {
                    continue;
                }
                if pred(&y)? {
                    return Ok(Some(r));
                }
                if seen.len() as u64 >= max_size {
                    return Err(budget("truncated parent BFS".into(), seen.len() as u64 + 1, max_size));
                }
                seen.insert(y.clone());
                next.push(y);
            }
        }
        frontier = next;
    }
    Ok(None)
}
