//! `W`-light constant-weight codes.
//!
//! A set `C` of words of `S(n, w)` is `W`-light when some orientation of
//! `J(n, w)` leaves every word of `C` with outdegree at most `W`. Edges from
//! a code word to a non-code word can always point into the code word, so
//! only the subgraph induced by `C` matters. `L(W, n, w)` is the largest
//! size of such a code; `W = 0` gives the classical distance-4
//! constant-weight codes.

use std::collections::BTreeMap;

use crate::cwords::{binomial, enumerate_words, Word};
use crate::johnson::{
    build_induced, eulerian_orientation, orientation_feasible, JohnsonGraph, Orientation, MAX_MATERIALIZED,
};
use crate::{Error, Result};

/// Exhaustive search is limited to Johnson graphs with this many vertices.
pub const MAX_EXACT_VERTICES: u64 = 24;

#[derive(Clone, Debug)]
pub struct LightCode {
    n: usize,
    w: usize,
    lightness: usize,
    words: Vec<Word>,
    witness: Option<Orientation>,
}

impl LightCode {
    /// A code claimed `lightness`-light; words must be distinct members of
    /// `S(n, w)`. Sorted by rank.
    pub fn new(n: usize, w: usize, lightness: usize, words: Vec<Word>) -> Result<Self> {
        JohnsonGraph::new(n, w)?;
        let mut words = words;
        for x in &words {
            if x.len() != n || x.weight() != w {
                return Err(Error::param(format!("word {x} is not in S({n},{w})")));
            }
        }
        words.sort();
        if let Some(p) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::param(format!("word {} repeated", p[0])));
        }
        Ok(LightCode {
            n,
            w,
            lightness,
            words,
            witness: None,
        })
    }

    fn with_witness(mut self, witness: Orientation) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn lightness(&self) -> usize {
        self.lightness
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn witness(&self) -> Option<&Orientation> {
        self.witness.as_ref()
    }

    /// True when the stored witness orients exactly the induced subgraph of
    /// the code and keeps every code word within the lightness bound.
    pub fn witness_is_valid(&self) -> bool {
        let Some(o) = &self.witness else { return false };
        let g = o.graph();
        g.vertices() == self.words.as_slice()
            && build_induced(g.parent(), &self.words)
                .map(|h| h.edges() == g.edges())
                .unwrap_or(false)
            && o.audit(self.lightness)
    }

    /// The image under bitwise complement, a code of `S(n, n - w)`.
    pub fn complement(&self) -> LightCode {
        let words: Vec<Word> = self.words.iter().map(Word::complement).collect();
        let code = LightCode::new(self.n, self.n - self.w, self.lightness, words)
            .expect("complement of a valid code is valid");
        match verify_light(&code) {
            Some(o) => code.with_witness(o),
            None => code,
        }
    }
}

/// Decides whether the code is `W`-light for its own lightness, returning a
/// witness orientation of the induced subgraph when it is.
pub fn verify_light(code: &LightCode) -> Option<Orientation> {
    let graph = JohnsonGraph::new(code.n, code.w).ok()?;
    let g = build_induced(&graph, &code.words).ok()?;
    orientation_feasible(&g, code.lightness)
}

fn finish(n: usize, w: usize, lightness: usize, words: Vec<Word>) -> Result<LightCode> {
    let code = LightCode::new(n, w, lightness, words)?;
    let g = build_induced(&JohnsonGraph::new(n, w)?, &code.words)?;
    let witness = eulerian_orientation(&g);
    Ok(code.with_witness(witness))
}

/// Weight-one code of size `min(2W + 1, n)`: `J(n, 1)` is complete, and a
/// complete graph on `2W + 1` vertices has an orientation with all
/// outdegrees equal to `W`.
pub fn construct_tournament(n: usize, lightness: usize) -> Result<LightCode> {
    if n < 2 {
        return Err(Error::param(format!("tournament code needs n >= 2, got {n}")));
    }
    let size = (2 * lightness + 1).min(n);
    let words = (0..size)
        .map(|p| Word::from_positions(n, &[p]))
        .collect::<Result<Vec<_>>>()?;
    finish(n, 1, lightness, words)
}

/// `min(floor((W+1) n / 2), C(n, 2))`.
pub fn orbit_size(n: usize, lightness: usize) -> u64 {
    (((lightness + 1) * n / 2) as u64).min(binomial(n, 2))
}

/// Weight-two code built from orbits of `S(n, 2)` under the cyclic shift.
///
/// Every column of the stacked code matrix holds at most `W + 1` ones, so
/// each word has at most `2W` neighbours inside the code. The orbit of
/// `{0, d}` adds two ones per column, except the diameter orbit `d = n/2`
/// for even `n`, which adds one. When `(W + 1) n` is odd one column budget
/// is left over; it is filled with every other word of the `d = 1` orbit,
/// `{0,1}, {2,3}, ...`, and the full orbits use `d = 2, 3, ...`.
pub fn construct_orbit(n: usize, lightness: usize) -> Result<LightCode> {
    if n < 3 {
        return Err(Error::param(format!("orbit code needs n >= 3, got {n}")));
    }
    let target = orbit_size(n, lightness);
    let pair = |a: usize, b: usize| Word::from_positions(n, &[a % n, b % n]);
    let mut words = Vec::new();
    if target == binomial(n, 2) {
        words = enumerate_words(n, 2)?;
    } else {
        let per_column = lightness + 1;
        let full_orbits = per_column / 2;
        let leftover = per_column % 2 == 1;
        let first_full = if leftover && n % 2 == 1 { 2 } else { 1 };
        for d in first_full..first_full + full_orbits {
            for k in 0..n {
                words.push(pair(k, k + d)?);
            }
        }
        if leftover {
            if n.is_multiple_of(2) {
                for k in 0..n / 2 {
                    words.push(pair(k, k + n / 2)?);
                }
            } else {
                for k in (0..n - 1).step_by(2) {
                    words.push(pair(k, k + 1)?);
                }
            }
        }
    }
    debug_assert_eq!(words.len() as u64, target);
    finish(n, 2, lightness, words)
}

/// Residue class `sum_i i * B_i mod (n - 2W)` with one-based positions `i`.
pub fn tau(word: &Word, lightness: usize) -> Result<usize> {
    let n = word.len();
    if n <= 2 * lightness {
        return Err(Error::param(format!(
            "modulus n - 2W = {n} - {} is below 1",
            2 * lightness
        )));
    }
    let modulus = n - 2 * lightness;
    Ok(word.ones().map(|i| i + 1).sum::<usize>() % modulus)
}

/// The largest residue class of [`tau`], smallest residue on ties.
///
/// Two words of one class differ by a transposition `(i j)` only when
/// `i = j mod (n - 2W)`; with `n >= 4W` there are `2W` such disjoint pairs,
/// so every class induces hypercubes of dimension at most `2W` and the
/// Eulerian orientation keeps every outdegree at most `W`.
pub fn construct_graham_sloane(n: usize, w: usize, lightness: usize) -> Result<LightCode> {
    JohnsonGraph::new(n, w)?;
    if n < 4 * lightness {
        return Err(Error::param(format!(
            "Graham-Sloane code needs n >= 4W, got n={n}, W={lightness}"
        )));
    }
    let count = binomial(n, w);
    if count > MAX_MATERIALIZED {
        return Err(Error::resource(format!(
            "C({n},{w}) = {count} words is too many to classify"
        )));
    }
    let mut classes: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
    for x in enumerate_words(n, w)? {
        classes.entry(tau(&x, lightness)?).or_default().push(x);
    }
    let mut best: Option<&Vec<Word>> = None;
    for class in classes.values() {
        if best.is_none_or(|b| class.len() > b.len()) {
            best = Some(class);
        }
    }
    finish(n, w, lightness, best.cloned().unwrap_or_default())
}

/// Exact `L(W, n, w)` by exhaustive branch and bound, with one optimal code.
pub fn exact_l(n: usize, w: usize, lightness: usize) -> Result<LightCode> {
    let graph = JohnsonGraph::new(n, w)?;
    let count = graph.vertex_count();
    if count > MAX_EXACT_VERTICES {
        return Err(Error::resource(format!(
            "exact search is limited to C(n,w) <= {MAX_EXACT_VERTICES}; C({n},{w}) = {count}"
        )));
    }
    let vertices = enumerate_words(n, w)?;
    let full = build_induced(&graph, &vertices)?;
    let nv = vertices.len();
    let mut adj = vec![0u32; nv];
    for &(a, b) in full.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }

    let mut search = Search {
        adj,
        lightness,
        best: 0,
        best_set: 0,
    };
    for code in incumbents(n, w, lightness) {
        let set = code.words().iter().fold(0u32, |m, x| {
            m | 1 << full.index_of(x).expect("construction word in graph")
        });
        if code.len() > search.best && search.is_light(set) {
            search.best = code.len();
            search.best_set = set;
        }
    }
    if search.best == 0 {
        search.best = 1;
        search.best_set = 1;
    }

    // J(n, w) is vertex-transitive, so some optimal code contains vertex 0.
    let root = State::empty(nv);
    if let Some(with_zero) = search.add(&root, 0) {
        let all = if nv == 32 { u32::MAX } else { (1u32 << nv) - 1 };
        let candidates = search.filter(&with_zero, all & !1);
        search.explore(with_zero, candidates);
    }

    let words: Vec<Word> = (0..nv)
        .filter(|&i| search.best_set & (1 << i) != 0)
        .map(|i| vertices[i])
        .collect();
    let code = LightCode::new(n, w, lightness, words)?;
    let witness = verify_light(&code).expect("search only keeps light codes");
    Ok(code.with_witness(witness))
}

/// Known constructions used to seed the exact search.
fn incumbents(n: usize, w: usize, lightness: usize) -> Vec<LightCode> {
    let mut out = Vec::new();
    if w == 1 {
        out.extend(construct_tournament(n, lightness));
    }
    if w + 1 == n {
        out.extend(construct_tournament(n, lightness).map(|c| c.complement()));
    }
    if w == 2 {
        out.extend(construct_orbit(n, lightness));
    }
    if w + 2 == n && n >= 3 {
        out.extend(construct_orbit(n, lightness).map(|c| c.complement()));
    }
    if n >= 4 * lightness {
        out.extend(construct_graham_sloane(n, w, lightness));
    }
    out
}

/// A light vertex set together with one bounded orientation of it.
#[derive(Clone)]
struct State {
    set: u32,
    size: usize,
    /// out-neighbours of each vertex inside `set`
    out: Vec<u32>,
}

impl State {
    fn empty(nv: usize) -> Self {
        State {
            set: 0,
            size: 0,
            out: vec![0; nv],
        }
    }

    fn edge_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }
}

struct Search {
    adj: Vec<u32>,
    lightness: usize,
    best: usize,
    best_set: u32,
}

impl Search {
    fn is_light(&self, set: u32) -> bool {
        let mut state = State::empty(self.adj.len());
        (0..self.adj.len())
            .filter(|&v| set & (1 << v) != 0)
            .all(|v| match self.add(&state, v) {
                Some(next) => {
                    state = next;
                    true
                }
                None => false,
            })
    }

    /// Adds `v` to a light set, repairing the orientation along reversal
    /// paths. `None` when the enlarged set is not light.
    fn add(&self, state: &State, v: usize) -> Option<State> {
        let mut next = state.clone();
        next.out[v] = self.adj[v] & state.set;
        next.set |= 1 << v;
        next.size += 1;
        while next.out[v].count_ones() as usize > self.lightness {
            let path = self.path_to_slack(&next, v)?;
            for pair in path.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                next.out[a] &= !(1 << b);
                next.out[b] |= 1 << a;
            }
        }
        Some(next)
    }

    /// Shortest directed path from `v` to a vertex with spare outdegree.
    fn path_to_slack(&self, state: &State, v: usize) -> Option<Vec<usize>> {
        let nv = self.adj.len();
        let mut parent = vec![usize::MAX; nv];
        let mut seen = 1u32 << v;
        let mut queue = std::collections::VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let mut outs = state.out[x] & !seen;
            while outs != 0 {
                let y = outs.trailing_zeros() as usize;
                outs &= outs - 1;
                seen |= 1 << y;
                parent[y] = x;
                if (state.out[y].count_ones() as usize) < self.lightness {
                    let mut path = vec![y];
                    let mut z = y;
                    while z != v {
                        z = parent[z];
                        path.push(z);
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(y);
            }
        }
        None
    }

    /// Candidates that can individually join `state`.
    fn filter(&self, state: &State, candidates: u32) -> u32 {
        let mut keep = 0u32;
        let mut rest = candidates;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let inward = (self.adj[u] & state.set).count_ones() as usize;
            if inward <= self.lightness || self.add(state, u).is_some() {
                keep |= 1 << u;
            }
        }
        keep
    }

    /// Largest size reachable from `state` with vertices from `candidates`,
    /// bounded by counting the edges any extension must absorb.
    fn upper_bound(&self, state: &State, candidates: u32) -> usize {
        let pool = candidates.count_ones() as usize;
        let edges = state.edge_count();
        let mut inside = Vec::with_capacity(pool);
        let mut to_pool = Vec::with_capacity(pool);
        let mut rest = candidates;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            inside.push((self.adj[u] & state.set).count_ones() as usize);
            to_pool.push((self.adj[u] & candidates).count_ones() as usize);
        }
        for q in (1..=pool).rev() {
            if state.size + q <= self.best {
                break;
            }
            // a q-subset Q of the pool has at least d_pool(u) - (pool - q)
            // neighbours of u inside Q; doubled to stay in integers
            let mut cost: Vec<usize> = inside
                .iter()
                .zip(&to_pool)
                .map(|(&s, &p)| 2 * s + p.saturating_sub(pool - q))
                .collect();
            cost.sort_unstable();
            let needed: usize = 2 * edges + cost[..q].iter().sum::<usize>();
            if needed <= 2 * self.lightness * (state.size + q) {
                return state.size + q;
            }
        }
        state.size
    }

    fn explore(&mut self, state: State, candidates: u32) {
        if state.size > self.best {
            self.best = state.size;
            self.best_set = state.set;
        }
        if candidates == 0 || self.upper_bound(&state, candidates) <= self.best {
            return;
        }
        // branch on the candidate with the most neighbours among candidates
        let mut pick = usize::MAX;
        let mut pick_deg = 0;
        let mut rest = candidates;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[u] & candidates).count_ones() as usize;
            if pick == usize::MAX || d > pick_deg {
                pick = u;
                pick_deg = d;
            }
        }
        let remaining = candidates & !(1 << pick);
        if let Some(with) = self.add(&state, pick) {
            let next = self.filter(&with, remaining);
            self.explore(with, next);
        }
        self.explore(state, remaining);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwords::hamming;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn code(lightness: usize, words: &[&str]) -> LightCode {
        let ws: Vec<Word> = words.iter().map(|s| w(s)).collect();
        LightCode::new(ws[0].len(), ws[0].weight(), lightness, ws).unwrap()
    }

    #[test]
    fn verify_examples() {
        assert!(verify_light(&code(0, &["1100", "0011"])).is_some());
        let all = ["1100", "1010", "0110", "1001", "0101", "0011"];
        assert!(verify_light(&code(1, &all)).is_none());
        let o = verify_light(&code(2, &all)).unwrap();
        assert!(o.audit(2));
    }

    #[test]
    fn code_validation() {
        assert!(LightCode::new(4, 2, 0, vec![w("1100"), w("1100")]).is_err());
        assert!(LightCode::new(4, 2, 0, vec![w("1110")]).is_err());
        assert!(LightCode::new(4, 2, 0, vec![]).is_ok());
    }

    #[test]
    fn tournament_examples() {
        assert_eq!(construct_tournament(7, 1).unwrap().len(), 3);
        assert_eq!(construct_tournament(3, 0).unwrap().len(), 1);
        assert_eq!(construct_tournament(3, 5).unwrap().len(), 3);
        for n in 2..=12 {
            for lightness in 0..=6 {
                let c = construct_tournament(n, lightness).unwrap();
                assert_eq!(c.len(), (2 * lightness + 1).min(n));
                assert!(c.witness_is_valid());
            }
        }
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(construct_orbit(4, 0).unwrap().len(), 2);
        assert_eq!(construct_orbit(5, 1).unwrap().len(), 5);
        assert_eq!(construct_orbit(5, 2).unwrap().len(), 7);
        assert_eq!(construct_orbit(3, 0).unwrap().words(), &[w("110")]);
    }

    #[test]
    fn orbit_sizes_match_closed_form() {
        for n in 3..=12 {
            for lightness in 0..=4 {
                let c = construct_orbit(n, lightness).unwrap();
                let expected = ((lightness + 1) * n / 2).min(n * (n - 1) / 2);
                assert_eq!(c.len(), expected, "n={n} W={lightness}");
                assert!(c.witness_is_valid(), "n={n} W={lightness}");
                assert!(verify_light(&c).is_some());
            }
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&w("1100"), 0).unwrap(), 3);
        assert!(tau(&w("1100"), 2).is_err());
        // same class after a transposition forces i = j mod (n - 2W)
        for (n, k, lightness) in [(8, 3, 1), (9, 4, 2), (10, 4, 1)] {
            let modulus = n - 2 * lightness;
            for x in enumerate_words(n, k).unwrap() {
                for i in x.ones() {
                    for j in x.zeros() {
                        let y = x.transpose(i, j).unwrap();
                        if tau(&x, lightness).unwrap() == tau(&y, lightness).unwrap() {
                            assert_eq!((i + 1) % modulus, (j + 1) % modulus);
                        }
                    }
                }
            }
        }
        // W = 0: classes are distance-4 codes
        for x in enumerate_words(7, 3).unwrap() {
            for y in enumerate_words(7, 3).unwrap() {
                if x != y && tau(&x, 0).unwrap() == tau(&y, 0).unwrap() {
                    assert!(hamming(&x, &y).unwrap() >= 4);
                }
            }
        }
    }

    #[test]
    fn graham_sloane_examples() {
        for (n, k, lightness) in [(5, 2, 0), (6, 3, 0), (8, 3, 1), (9, 4, 2)] {
            let c = construct_graham_sloane(n, k, lightness).unwrap();
            let floor = binomial(n, k).div_ceil((n - 2 * lightness) as u64);
            assert!(c.len() as u64 >= floor);
            assert!(c.witness_is_valid());
            assert!(verify_light(&c).is_some());
        }
        assert!(matches!(construct_graham_sloane(7, 3, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_l(4, 2, 0).unwrap().len(), 2);
        assert_eq!(exact_l(4, 2, 1).unwrap().len(), 4);
        assert_eq!(exact_l(5, 1, 1).unwrap().len(), 3);
        assert_eq!(exact_l(5, 1, 2).unwrap().len(), 5);
        assert!(matches!(exact_l(7, 3, 0), Err(Error::Resource(_))));
        let best = exact_l(6, 3, 1).unwrap();
        assert!(best.witness_is_valid());
    }

    /// Plain subset enumeration with the flow test, independent of the
    /// branch and bound.
    fn brute_force_l(n: usize, k: usize, lightness: usize) -> usize {
        let vertices = enumerate_words(n, k).unwrap();
        let graph = JohnsonGraph::new(n, k).unwrap();
        let nv = vertices.len();
        let mut best = 0;
        for mask in 0u32..(1 << nv) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let subset: Vec<Word> = (0..nv).filter(|i| mask & (1 << i) != 0).map(|i| vertices[i]).collect();
            let g = build_induced(&graph, &subset).unwrap();
            if orientation_feasible(&g, lightness).is_some() {
                best = size;
            }
        }
        best
    }

    #[test]
    fn exact_matches_brute_force() {
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 1), (6, 2)] {
            for lightness in 0..=4 {
                assert_eq!(
                    exact_l(n, k, lightness).unwrap().len(),
                    brute_force_l(n, k, lightness),
                    "n={n} w={k} W={lightness}"
                );
            }
        }
    }

    #[test]
    fn exact_properties() {
        for (n, k) in [(4, 1), (4, 2), (5, 2), (6, 2), (6, 3), (7, 2)] {
            let mut prev = 0;
            for lightness in 0..=k * (n - k) {
                let l = exact_l(n, k, lightness).unwrap().len();
                assert!(l >= prev);
                prev = l;
                assert_eq!(l, exact_l(n, n - k, lightness).unwrap().len());
                if k == 2 {
                    assert_eq!(l as u64, orbit_size(n, lightness));
                }
                if k == 1 {
                    assert_eq!(l, (2 * lightness + 1).min(n));
                }
            }
            assert_eq!(prev as u64, binomial(n, k));
        }
    }

    #[test]
    fn complement_code_stays_light() {
        let c = construct_orbit(6, 1).unwrap().complement();
        assert_eq!(c.w(), 4);
        assert!(c.witness_is_valid());
    }
}
