//! Unit-capacity Dinic max-flow and the bounded-outdegree orientation test
//! built on it.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

pub(crate) struct Dinic {
    graph: Vec<Vec<Arc>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    pub(crate) fn new(nodes: usize) -> Self {
        Dinic {
            graph: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            iter: vec![0; nodes],
        }
    }

    /// Adds `from -> to` and returns its index within `from`'s arc list.
    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(Arc { to, cap, rev: rev_from });
        self.graph[to].push(Arc {
            to: from,
            cap: 0,
            rev: rev_to,
        });
        rev_to
    }

    pub(crate) fn residual(&self, from: usize, idx: usize) -> u32 {
        self.graph[from][idx].cap
    }

    fn bfs(&mut self, source: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for a in &self.graph[v] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, sink: usize, limit: u32) -> u32 {
        if v == sink {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let Arc { to, cap, rev } = self.graph[v][self.iter[v]];
            if cap > 0 && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, sink, limit.min(cap));
                if pushed > 0 {
                    let i = self.iter[v];
                    self.graph[v][i].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        let mut total = 0u64;
        loop {
            self.bfs(source);
            if self.level[sink] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(source, sink, u32::MAX);
                if f == 0 {
                    break;
                }
                total += f as u64;
            }
        }
    }
}

/// Orients `edges` over `vertex_count` vertices so that no vertex has more
/// than `cap` outgoing arcs. Returns the tail of every edge, or `None` when
/// no such orientation exists.
///
/// Network: source -> one node per edge (capacity 1) -> both endpoints
/// (capacity 1) -> sink (capacity `cap` per vertex). The endpoint that
/// absorbs an edge's unit of flow becomes its tail.
pub(crate) fn orient_bounded(vertex_count: usize, edges: &[(usize, usize)], cap: usize) -> Option<Vec<usize>> {
    if edges.is_empty() {
        return Some(Vec::new());
    }
    if edges.len() > cap.saturating_mul(vertex_count) {
        return None;
    }
    let e = edges.len();
    let source = 0;
    let sink = 1 + e + vertex_count;
    let mut net = Dinic::new(sink + 1);
    let mut first_arc = Vec::with_capacity(e);
    for (k, &(a, b)) in edges.iter().enumerate() {
        net.add_arc(source, 1 + k, 1);
        let ia = net.add_arc(1 + k, 1 + e + a, 1);
        net.add_arc(1 + k, 1 + e + b, 1);
        first_arc.push(ia);
    }
    let cap = u32::try_from(cap).unwrap_or(u32::MAX);
    for v in 0..vertex_count {
        net.add_arc(1 + e + v, sink, cap);
    }
    if net.max_flow(source, sink) != e as u64 {
        return None;
    }
    Some(
        edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| if net.residual(1 + k, first_arc[k]) == 0 { a } else { b })
            .collect(),
    )
}
