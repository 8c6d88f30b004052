//! Minimum-weight perfect matching on general graphs.
//!
//! Primal-dual Edmonds blossom algorithm in the formulation of Galil
//! ("Efficient algorithms for finding maximum matching in graphs", 1986),
//! following the structure of Joris van Rantwijk's reference
//! implementation. Minimum-weight perfect matching is solved as a
//! maximum-weight maximum-cardinality matching on negated weights.
//!
//! Weights on a decimal grid of at most nine digits are solved in exact
//! integer arithmetic; anything else runs in `f64` with a relative
//! tightness tolerance of `1e-12`.
//!
//! Determinism: edges are scanned in index order and the initial greedy
//! matching takes tight edges by increasing index, so equal inputs always
//! produce the same matching. Among co-optimal matchings the one returned
//! is the one this scan order reaches first.

#![allow(clippy::needless_range_loop)]

use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::exact::ScaledWeights;

/// Graph for a perfect-matching query. Parallel edges are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingProblem {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Perfect matching as a sorted list of edge indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    pub edges: Vec<usize>,
    pub total_weight: f64,
}

impl Matching {
    /// Partner of every vertex, indexed by vertex.
    pub fn mates(&self, problem: &MatchingProblem) -> Vec<usize> {
        let mut mate = vec![usize::MAX; problem.vertex_count];
        for &k in &self.edges {
            let (u, v, _) = problem.edges[k];
            mate[u] = v;
            mate[v] = u;
        }
        mate
    }
}

/// Exact minimum-weight perfect matching.
pub fn min_weight_perfect_matching(problem: &MatchingProblem) -> Result<Matching> {
    let n = problem.vertex_count;
    if n % 2 == 1 {
        return Err(Error::OddVertexCount(n));
    }
    for (k, &(u, v, w)) in problem.edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::MalformedInput(format!("matching edge {k} out of range")));
        }
        if u == v {
            return Err(Error::MalformedInput(format!("matching edge {k} is a self-loop")));
        }
        if !w.is_finite() {
            return Err(Error::Domain(format!("matching edge {k} has a non-finite weight")));
        }
    }
    if n == 0 {
        return Ok(Matching { edges: Vec::new(), total_weight: 0.0 });
    }
    let raw: Vec<f64> = problem.edges.iter().map(|e| e.2).collect();
    let (chosen, total_weight) = match ScaledWeights::detect(&raw) {
        Some(scaled) => {
            let edges: Vec<(usize, usize, i64)> =
                problem.edges.iter().zip(&scaled.units).map(|(&(u, v, _), &w)| (u, v, -w)).collect();
            let chosen = solve(n, &edges, 0).ok_or(Error::NoPerfectMatching)?;
            let units: i64 = chosen.iter().map(|&k| scaled.units[k]).sum();
            (chosen, scaled.to_real(units))
        }
        None => {
            let max_abs = raw.iter().fold(0.0f64, |m, w| m.max(w.abs()));
            let tol = 1e-12 * max_abs.max(1.0);
            let edges: Vec<(usize, usize, f64)> = problem.edges.iter().map(|&(u, v, w)| (u, v, -w)).collect();
            let chosen = solve(n, &edges, tol).ok_or(Error::NoPerfectMatching)?;
            let total: f64 = chosen.iter().map(|&k| raw[k]).sum();
            (chosen, total)
        }
    };
    Ok(Matching { edges: chosen, total_weight })
}

/// Arithmetic needed by the blossom algorithm.
pub(crate) trait Weight:
    Copy + PartialOrd + Debug + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    const ZERO: Self;
    fn double(self) -> Self;
    fn half(self) -> Self;
    /// Smallest value `>= self` usable as a vertex dual start (even for integers).
    fn dual_start(self) -> Self;
}

impl Weight for i64 {
    const ZERO: i64 = 0;
    fn double(self) -> i64 {
        2 * self
    }
    fn half(self) -> i64 {
        debug_assert!(self % 2 == 0, "odd slack between S-blossoms");
        self / 2
    }
    fn dual_start(self) -> i64 {
        if self % 2 == 0 {
            self
        } else {
            self + 1
        }
    }
}

impl Weight for f64 {
    const ZERO: f64 = 0.0;
    fn double(self) -> f64 {
        2.0 * self
    }
    fn half(self) -> f64 {
        0.5 * self
    }
    fn dual_start(self) -> f64 {
        self
    }
}

const NONE: usize = usize::MAX;

/// Maximum-weight maximum-cardinality matching; returns the matched edge
/// indices if the matching is perfect.
///
/// Vertex duals start at the (even-rounded) heaviest incident edge so
/// that a greedy matching on tight edges can seed the search. All starting
/// duals share a parity, which keeps S-to-S slacks even in integer mode.
pub(crate) fn solve<W: Weight>(n: usize, edges: &[(usize, usize, W)], tol: W) -> Option<Vec<usize>> {
    let mut state = Blossom::new(n, edges, tol);
    state.run();
    let mut chosen = Vec::with_capacity(n / 2);
    for v in 0..n {
        let p = state.mate[v];
        if p == NONE {
            return None;
        }
        if v < state.endpoint[p] {
            chosen.push(p / 2);
        }
    }
    chosen.sort_unstable();
    Some(chosen)
}

struct Blossom<'a, W> {
    nvertex: usize,
    edges: &'a [(usize, usize, W)],
    tol: W,
    /// endpoint[p] is the vertex of endpoint p; endpoints 2k and 2k+1 belong to edge k.
    endpoint: Vec<usize>,
    /// Remote endpoints of the edges incident to each vertex.
    neighbend: Vec<Vec<usize>>,
    /// Remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    /// 0 = free, 1 = S, 2 = T, 5 = S being scanned, -1 = unused blossom slot.
    label: Vec<i8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<W>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
    scratch_bestedgeto: Vec<usize>,
}

fn cyclic(v: &[usize], j: isize) -> usize {
    v[j.rem_euclid(v.len() as isize) as usize]
}

impl<'a, W: Weight> Blossom<'a, W> {
    fn new(n: usize, edges: &'a [(usize, usize, W)], tol: W) -> Self {
        let nedge = edges.len();
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![W::ZERO; 2 * n];
        let mut has_edge = vec![false; n];
        for &(i, j, w) in edges {
            for v in [i, j] {
                if !has_edge[v] || w > dualvar[v] {
                    dualvar[v] = w;
                    has_edge[v] = true;
                }
            }
        }
        for d in dualvar.iter_mut().take(n) {
            *d = d.dual_start();
        }
        let mut state = Blossom {
            nvertex: n,
            edges,
            tol,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
            scratch_bestedgeto: vec![NONE; 2 * n],
        };
        // greedy start on tight edges
        for k in 0..nedge {
            let (i, j, _) = edges[k];
            if state.mate[i] == NONE && state.mate[j] == NONE && state.is_tight(state.slack(k)) {
                state.mate[i] = 2 * k + 1;
                state.mate[j] = 2 * k;
            }
        }
        state
    }

    #[inline]
    fn slack(&self, k: usize) -> W {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - wt.double()
    }

    #[inline]
    fn is_tight(&self, slack: W) -> bool {
        slack <= self.tol
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    out.push(t);
                } else {
                    self.blossom_leaves(t, out);
                }
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: i8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let m = self.mate[base];
            debug_assert!(m != NONE);
            self.assign_label(self.endpoint[m], 1, m ^ 1);
        }
    }

    /// Traces back from v and w to find a new blossom base, or NONE when
    /// the two trees are different (augmenting path found).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = W::ZERO;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // best edges from the new blossom to each neighbouring S-blossom
        let mut touched = Vec::new();
        for &bv in &path {
            let lists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => {
                    self.leaves(bv).into_iter().map(|v| self.neighbend[v].iter().map(|p| p / 2).collect()).collect()
                }
            };
            for list in lists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b && self.label[bj] == 1 {
                        let cur = self.scratch_bestedgeto[bj];
                        if cur == NONE {
                            touched.push(bj);
                            self.scratch_bestedgeto[bj] = k;
                        } else if self.slack(k) < self.slack(cur) {
                            self.scratch_bestedgeto[bj] = k;
                        }
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        touched.sort_unstable();
        let mut best_list = Vec::with_capacity(touched.len());
        for bj in touched {
            best_list.push(self.scratch_bestedgeto[bj]);
            self.scratch_bestedgeto[bj] = NONE;
        }
        let mut best = NONE;
        for &k in &best_list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.blossombestedges[b] = Some(best_list);
        self.bestedge[b] = best;
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == W::ZERO {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            // relabel the part of the blossom on the path through it
            let endps = self.blossomendps[b].clone();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let len = childs.len() as isize;
            let mut j = childs.iter().position(|&c| c == entrychild).expect("entry child") as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = cyclic(&endps, j - endptrick as isize);
                self.label[self.endpoint[q ^ endptrick ^ 1]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[q / 2] = true;
                j += jstep;
                p = cyclic(&endps, j - endptrick as isize) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = cyclic(&childs, j);
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while cyclic(&childs, j) != entrychild {
                let bv = cyclic(&childs, j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves(bv);
                if let Some(&v) = leaves.iter().find(|&&v| self.label[v] != 0) {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = -1;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the even path from vertex v
    /// to the base of blossom b.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child") as isize;
        let mut j = i;
        let (jstep, endptrick): (isize, usize) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = cyclic(&self.blossomchilds[b], j);
            let p = cyclic(&self.blossomendps[b], j - endptrick as isize) ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = cyclic(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        let i = i as usize;
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (s0, p0) in [(v, 2 * k + 1), (w, 2 * k)] {
            let (mut s, mut p) = (s0, p0);
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn run(&mut self) {
        let n = self.nvertex;
        for _stage in 0..=n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|b| *b = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            if self.queue.is_empty() {
                break;
            }

            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let mut ni = 0;
                    while ni < self.neighbend[v].len() {
                        let p = self.neighbend[v][ni];
                        ni += 1;
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = W::ZERO;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if self.is_tight(kslack) {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // no augmenting path with the current duals: choose a dual step
                let mut deltatype = 0u8;
                let mut delta = W::ZERO;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let d = self.slack(self.bestedge[b]).half();
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // maximum cardinality reached
                    deltatype = 1;
                    delta = W::ZERO;
                }
                if delta < W::ZERO {
                    delta = W::ZERO;
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] = self.dualvar[v] - delta,
                        2 => self.dualvar[v] = self.dualvar[v] + delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] = self.dualvar[b] + delta,
                            2 => self.dualvar[b] = self.dualvar[b] - delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == W::ZERO
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}
