//! Johnson graphs `J(n, w)`, their induced subgraphs and orientations.
//!
//! Vertices of `J(n, w)` are the words of `S(n, w)`; two words are adjacent
//! when they differ by a single transposition (Hamming distance 2). An
//! [`Orientation`] directs every edge of an [`InducedSubgraph`]; the
//! outdegree of a vertex is the number of arcs leaving it.

mod flow;

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) use flow::orient_bounded;

use crate::cwords::{binomial, Word, Words};
use crate::{Error, Result};

/// Full Johnson graphs are only materialised up to this many vertices.
pub const MAX_MATERIALIZED: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JohnsonGraph {
    n: usize,
    w: usize,
}

impl JohnsonGraph {
    pub fn new(n: usize, w: usize) -> Result<Self> {
        Words::new(n, w)?;
        Ok(JohnsonGraph { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn vertex_count(&self) -> u64 {
        binomial(self.n, self.w)
    }

    /// Every vertex has this many neighbours.
    pub fn degree(&self) -> usize {
        self.w * (self.n - self.w)
    }

    pub fn edge_count(&self) -> u64 {
        self.vertex_count() * self.degree() as u64 / 2
    }

    /// The whole graph as an induced subgraph on all of `S(n, w)`.
    pub fn full(&self) -> Result<InducedSubgraph> {
        let count = self.vertex_count();
        if count > MAX_MATERIALIZED {
            return Err(Error::resource(format!(
                "J({},{}) has {count} vertices; at most {MAX_MATERIALIZED} are materialised",
                self.n, self.w
            )));
        }
        let vertices: Vec<Word> = Words::new(self.n, self.w)?.collect();
        build_induced(self, &vertices)
    }
}

/// The subgraph of a Johnson graph induced by a set of its vertices.
///
/// Vertices are kept sorted by rank and addressed by their local index;
/// each edge `(a, b)` has `a < b`.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    parent: JohnsonGraph,
    vertices: Vec<Word>,
    index: HashMap<u64, usize>,
    edges: Vec<(usize, usize)>,
}

/// Subgraph of `graph` induced by `vertices` (duplicates are merged).
pub fn build_induced(graph: &JohnsonGraph, vertices: &[Word]) -> Result<InducedSubgraph> {
    for v in vertices {
        if v.len() != graph.n || v.weight() != graph.w {
            return Err(Error::param(format!("vertex {v} is not in S({},{})", graph.n, graph.w)));
        }
    }
    let mut sorted = vertices.to_vec();
    sorted.sort();
    sorted.dedup();
    let index: HashMap<u64, usize> = sorted.iter().enumerate().map(|(i, v)| (v.bits(), i)).collect();
    let mut edges = Vec::new();
    for (a, v) in sorted.iter().enumerate() {
        for u in v.neighbors() {
            if let Some(&b) = index.get(&u.bits()) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(InducedSubgraph {
        parent: *graph,
        vertices: sorted,
        index,
        edges,
    })
}

impl InducedSubgraph {
    pub fn parent(&self) -> &JohnsonGraph {
        &self.parent
    }

    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    /// Edges as pairs of local vertex indices.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges keyed canonically by `(min rank, max rank)`.
    pub fn edge_ranks(&self) -> Vec<(u64, u64)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.vertices[a].rank(), self.vertices[b].rank()))
            .collect()
    }

    pub fn index_of(&self, v: &Word) -> Option<usize> {
        if v.len() != self.parent.n {
            return None;
        }
        self.index.get(&v.bits()).copied()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// True when this is all of `J(n, w)`.
    pub fn is_full(&self) -> bool {
        self.vertices.len() as u64 == self.parent.vertex_count()
    }
}

/// A direction for every edge of an induced subgraph.
#[derive(Clone, Debug)]
pub struct Orientation {
    graph: InducedSubgraph,
    /// `true` when edge `(a, b)` points from `a` to `b`.
    forward: Vec<bool>,
    outdeg: Vec<usize>,
}

impl Orientation {
    fn from_forward(graph: InducedSubgraph, forward: Vec<bool>) -> Self {
        let mut outdeg = vec![0; graph.vertices.len()];
        for (&(a, b), &f) in graph.edges.iter().zip(&forward) {
            outdeg[if f { a } else { b }] += 1;
        }
        Orientation { graph, forward, outdeg }
    }

    /// Orientation whose arcs leave the given tail of each edge.
    pub(crate) fn from_tails(graph: InducedSubgraph, tails: &[usize]) -> Self {
        let forward = graph.edges.iter().zip(tails).map(|(&(a, _), &t)| t == a).collect();
        Orientation::from_forward(graph, forward)
    }

    /// Builds an orientation from explicit arcs, each of which must be an
    /// edge of `graph`; every edge must be covered exactly once.
    pub fn from_arcs(graph: InducedSubgraph, arcs: &[(Word, Word)]) -> Result<Self> {
        let mut slot: HashMap<(usize, usize), usize> = graph.edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut forward = vec![false; graph.edges.len()];
        for (from, to) in arcs {
            let (a, b) = match (graph.index_of(from), graph.index_of(to)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::input(format!("arc {from} -> {to} leaves the vertex set"))),
            };
            let key = (a.min(b), a.max(b));
            let k = slot
                .remove(&key)
                .ok_or_else(|| Error::input(format!("arc {from} -> {to} is not a free edge")))?;
            forward[k] = a < b;
        }
        if !slot.is_empty() {
            return Err(Error::input(format!("{} edges have no direction", slot.len())));
        }
        Ok(Orientation::from_forward(graph, forward))
    }

    pub fn graph(&self) -> &InducedSubgraph {
        &self.graph
    }

    pub fn outdegree(&self, v: &Word) -> Result<usize> {
        self.graph
            .index_of(v)
            .map(|i| self.outdeg[i])
            .ok_or_else(|| Error::param(format!("vertex {v} is not in the orientation's domain")))
    }

    /// Outdegrees by local vertex index.
    pub fn outdegrees(&self) -> &[usize] {
        &self.outdeg
    }

    pub fn max_outdegree(&self) -> usize {
        self.outdeg.iter().copied().max().unwrap_or(0)
    }

    /// Arcs as `(from, to)` local indices, in edge order.
    pub fn arc_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph
            .edges
            .iter()
            .zip(&self.forward)
            .map(|(&(a, b), &f)| if f { (a, b) } else { (b, a) })
    }

    pub fn arcs(&self) -> Vec<(Word, Word)> {
        let v = &self.graph.vertices;
        self.arc_indices().map(|(a, b)| (v[a], v[b])).collect()
    }

    /// Recounts outdegrees from the arc list and checks them against `bound`.
    pub fn audit(&self, bound: usize) -> bool {
        let mut count: HashMap<Word, usize> = HashMap::new();
        for (from, to) in self.arcs() {
            if crate::cwords::hamming(&from, &to).ok() != Some(2) {
                return false;
            }
            *count.entry(from).or_default() += 1;
        }
        count.values().all(|&c| c <= bound)
    }
}

/// Orientation in which every vertex has outdegree at most `ceil(deg / 2)`.
///
/// Odd-degree vertices are paired, in rank order, by virtual edges; the now
/// even graph is split into closed trails which are oriented along their
/// walking direction, and the virtual arcs are dropped again.
pub fn eulerian_orientation(g: &InducedSubgraph) -> Orientation {
    let nv = g.vertices.len();
    let mut ends: Vec<(usize, usize)> = g.edges.clone();
    let degrees = g.degrees();
    let odd: Vec<usize> = (0..nv).filter(|&v| degrees[v] % 2 == 1).collect();
    for pair in odd.chunks(2) {
        ends.push((pair[0], pair[1]));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (k, &(a, b)) in ends.iter().enumerate() {
        adj[a].push(k);
        adj[b].push(k);
    }
    let mut used = vec![false; ends.len()];
    let mut forward = vec![false; ends.len()];
    let mut cursor = vec![0usize; nv];
    for start in 0..nv {
        loop {
            // walk a closed trail from `start`; in an even graph it can only
            // get stuck back at `start`
            let mut v = start;
            let mut moved = false;
            loop {
                while cursor[v] < adj[v].len() && used[adj[v][cursor[v]]] {
                    cursor[v] += 1;
                }
                if cursor[v] == adj[v].len() {
                    break;
                }
                let k = adj[v][cursor[v]];
                used[k] = true;
                moved = true;
                let (a, b) = ends[k];
                forward[k] = v == a;
                v = if v == a { b } else { a };
            }
            debug_assert_eq!(v, start);
            if !moved {
                break;
            }
        }
    }
    forward.truncate(g.edges.len());
    Orientation::from_forward(g.clone(), forward)
}

/// An orientation of `g` with every outdegree at most `bound`, or `None` if
/// there is none.
pub fn orientation_feasible(g: &InducedSubgraph, bound: usize) -> Option<Orientation> {
    orient_bounded(g.vertices.len(), &g.edges, bound).map(|tails| Orientation::from_tails(g.clone(), &tails))
}

/// Smallest `W` for which [`orientation_feasible`] succeeds.
pub fn min_max_outdegree(g: &InducedSubgraph) -> usize {
    let mut lo = 0;
    let mut hi = g.max_degree().div_ceil(2);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if orient_bounded(g.vertices.len(), &g.edges, mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Orientation of the full graph with an independent fair coin per edge,
/// drawn from a ChaCha stream seeded with `seed`, in canonical edge order.
pub fn random_orientation(graph: &JohnsonGraph, seed: u64) -> Result<Orientation> {
    let full = graph.full()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forward = (0..full.edges.len()).map(|_| rng.random::<bool>()).collect();
    Ok(Orientation::from_forward(full, forward))
}

/// Number of vertices with outdegree at most `bound`; the orientation must
/// cover all of `J(n, w)`.
pub fn count_w_light(o: &Orientation, bound: usize) -> Result<usize> {
    if !o.graph.is_full() {
        return Err(Error::param("orientation does not cover the full Johnson graph"));
    }
    Ok(o.outdeg.iter().filter(|&&d| d <= bound).count())
}

/// Witness file: header `n w`, then one `FROMBITS -> TOBITS` line per arc.
pub fn format_orientation(o: &Orientation) -> String {
    let mut out = format!("{} {}\n", o.graph.parent.n, o.graph.parent.w);
    for (from, to) in o.arcs() {
        let _ = writeln!(out, "{from} -> {to}");
    }
    out
}

/// `(n, w, arcs)` as read from a witness file.
pub type ParsedOrientation = (usize, usize, Vec<(Word, Word)>);

/// Parses the witness file format.
pub fn parse_orientation(text: &str) -> Result<ParsedOrientation> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::input("orientation file is empty"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::input(format!("bad orientation header '{header}'")))?;
    let [n, w] = nums[..] else {
        return Err(Error::input(format!("orientation header '{header}' must be 'n w'")));
    };
    let mut arcs = Vec::new();
    for line in lines {
        let (from, to) = line
            .split_once("->")
            .ok_or_else(|| Error::input(format!("arc line '{line}' lacks '->'")))?;
        let (from, to) = (Word::parse(from)?, Word::parse(to)?);
        for x in [from, to] {
            if x.len() != n || x.weight() != w {
                return Err(Error::input(format!("arc endpoint {x} is not in S({n},{w})")));
            }
        }
        arcs.push((from, to));
    }
    Ok((n, w, arcs))
}
