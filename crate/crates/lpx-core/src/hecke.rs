//! Concrete operator actions on finite graphs: vertex distance operators
//! `A_k` via the Hecke recurrence, the edge generators `s0`, `s1`, `tau`,
//! `nb` and normal-form words, the raising/lowering pair `U`/`D`, their
//! biregular analogues, and the relation suite that pins all of the algebra
//! identities down in exact integer arithmetic.
//!
//! `A_k` on a finite graph is *defined* by the recurrence
//! `A_2 = A² - (q+1)I`, `A_{k+1} = A·A_k - q·A_{k-1}`: on graphs with short
//! cycles this differs from graph-distance sphere sums, and the recurrence
//! is the operator that descends from the covering tree.

use std::fmt;

use num_complex::Complex64;
use num_traits::{FromPrimitive, Zero};
use thiserror::Error;

use crate::graph::{
    classify, directed_edges, oriented_edges, DirectedEdgeIndex, Graph, RegularityClass,
};
use crate::report::{CheckLine, CheckReport};
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum HeckeError {
    #[error("operation requires a regular graph")]
    NotRegular,
    #[error("operation requires a biregular graph")]
    NotBiregular,
    #[error("graph is neither regular nor biregular")]
    UnsupportedClass,
    #[error("function has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Scalar types the operators act on: exact integers for the relation
/// suite, complex floats for spectra and tree functions.
pub trait Scalar:
    Copy
    + Zero
    + FromPrimitive
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy
        + Zero
        + FromPrimitive
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
{
}

// ---------------------------------------------------------------------------
// The extended Coxeter group and its normal form.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    S0,
    S1,
}

impl Letter {
    fn swapped(self) -> Letter {
        match self {
            Letter::S0 => Letter::S1,
            Letter::S1 => Letter::S0,
        }
    }
}

/// Normal form `τ^{δτ} nb^m s1^{δ1}` of an element of the extended Coxeter
/// group generated by `s0, s1, τ` with `s0² = s1² = τ² = 1`, `τs0 = s1τ`.
/// The length function is `l(w) = m + δ1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorWord {
    delta_tau: bool,
    m: usize,
    delta_1: bool,
}

impl OperatorWord {
    pub fn new(delta_tau: bool, m: usize, delta_1: bool) -> OperatorWord {
        OperatorWord {
            delta_tau,
            m,
            delta_1,
        }
    }

    pub fn identity() -> OperatorWord {
        OperatorWord::new(false, 0, false)
    }

    pub fn tau() -> OperatorWord {
        OperatorWord::new(true, 0, false)
    }

    pub fn s1() -> OperatorWord {
        OperatorWord::new(false, 0, true)
    }

    pub fn s0() -> OperatorWord {
        // s0 = τ·nb.
        OperatorWord::new(true, 1, false)
    }

    pub fn nb() -> OperatorWord {
        OperatorWord::new(false, 1, false)
    }

    pub fn delta_tau(&self) -> bool {
        self.delta_tau
    }

    pub fn nb_power(&self) -> usize {
        self.m
    }

    pub fn delta_1(&self) -> bool {
        self.delta_1
    }

    pub fn length(&self) -> usize {
        self.m + usize::from(self.delta_1)
    }

    /// `(τ-prefix, reduced alternating word in s0/s1)`.
    fn to_parts(self) -> (bool, Vec<Letter>) {
        let mut word = Vec::with_capacity(self.m + 1);
        // nb^m = (s1 s0)^{m/2} for even m, τ·s0(s1 s0)^{(m-1)/2} for odd m.
        let start = if self.m.is_multiple_of(2) {
            Letter::S1
        } else {
            Letter::S0
        };
        let mut next = start;
        for _ in 0..self.m {
            word.push(next);
            next = next.swapped();
        }
        if self.delta_1 {
            debug_assert_ne!(word.last(), Some(&Letter::S1));
            word.push(Letter::S1);
        }
        (self.delta_tau ^ (self.m % 2 == 1), word)
    }

    fn from_parts(t: bool, word: Vec<Letter>) -> OperatorWord {
        if word.is_empty() {
            return OperatorWord::new(t, 0, false);
        }
        let odd_m = word[0] == Letter::S0;
        let delta_1 = *word.last().unwrap() == Letter::S1;
        let m = word.len() - usize::from(delta_1);
        debug_assert_eq!(m % 2 == 1, odd_m);
        OperatorWord::new(t ^ odd_m, m, delta_1)
    }

    /// Group multiplication `self · other`, re-normalized.
    pub fn mul(&self, other: &OperatorWord) -> OperatorWord {
        let (t1, w1) = self.to_parts();
        let (t2, mut w2) = other.to_parts();
        // τ^{t1} w1 τ^{t2} w2 = τ^{t1 xor t2} (τ^{t2} w1 τ^{t2}) w2, and
        // conjugation by τ swaps s0 <-> s1.
        let mut left: Vec<Letter> = if t2 {
            w1.iter().map(|l| l.swapped()).collect()
        } else {
            w1
        };
        // Both sides are alternating, so cancellation happens only at the
        // junction.
        loop {
            match (left.last(), w2.first()) {
                (Some(a), Some(b)) if a == b => {
                    left.pop();
                    w2.remove(0);
                }
                _ => break,
            }
        }
        left.extend(w2);
        OperatorWord::from_parts(t1 ^ t2, left)
    }

    pub fn inverse(&self) -> OperatorWord {
        let (t, w) = self.to_parts();
        let mut rev: Vec<Letter> = w.into_iter().rev().collect();
        if t {
            for l in rev.iter_mut() {
                *l = l.swapped();
            }
        }
        OperatorWord::from_parts(t, rev)
    }

    /// All words of length at most `max_len` (both τ-classes).
    pub fn enumerate(max_len: usize) -> Vec<OperatorWord> {
        let mut out = Vec::new();
        for delta_tau in [false, true] {
            for m in 0..=max_len {
                for delta_1 in [false, true] {
                    if m + usize::from(delta_1) <= max_len {
                        out.push(OperatorWord::new(delta_tau, m, delta_1));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.delta_tau {
            parts.push("tau".to_string());
        }
        if self.m == 1 {
            parts.push("nb".to_string());
        } else if self.m > 1 {
            parts.push(format!("nb^{}", self.m));
        }
        if self.delta_1 {
            parts.push("s1".to_string());
        }
        if parts.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", parts.join("."))
        }
    }
}

// ---------------------------------------------------------------------------
// Vertex operators.
// ---------------------------------------------------------------------------

/// Neighbor-sum (adjacency) action.
pub fn apply_adjacency<T: Scalar>(g: &Graph, f: &[T]) -> Vec<T> {
    assert_eq!(f.len(), g.n());
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(T::zero(), |acc, &w| acc + f[w]))
        .collect()
}

/// Eigenvalue of `A_k` as a function of an adjacency eigenvalue, via the
/// same recurrence that defines the operator.
pub fn ak_eigenvalue(lambda: f64, k: usize, q: i64) -> f64 {
    let qf = q as f64;
    match k {
        0 => 1.0,
        1 => lambda,
        _ => {
            let mut prev = lambda;
            let mut cur = lambda * lambda - (qf + 1.0);
            for _ in 2..k {
                (prev, cur) = (cur, lambda * cur - qf * prev);
            }
            cur
        }
    }
}

/// `A_k f` on a regular graph by the Hecke recurrence.
pub fn apply_ak<T: Scalar>(g: &Graph, f: &[T], k: usize) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Regular { q } = classify(g) else {
        return Err(HeckeError::NotRegular);
    };
    if f.len() != g.n() {
        return Err(HeckeError::DimensionMismatch {
            expected: g.n(),
            got: f.len(),
        });
    }
    let qs = T::from_usize(q).unwrap();
    let q1 = T::from_usize(q + 1).unwrap();
    match k {
        0 => Ok(f.to_vec()),
        1 => Ok(apply_adjacency(g, f)),
        _ => {
            let mut prev = f.to_vec();
            let a1 = apply_adjacency(g, f);
            let mut cur: Vec<T> = apply_adjacency(g, &a1)
                .into_iter()
                .zip(&prev)
                .map(|(x, &p)| x - q1 * p)
                .collect();
            prev = a1;
            for _ in 2..k {
                let next: Vec<T> = apply_adjacency(g, &cur)
                    .into_iter()
                    .zip(&prev)
                    .map(|(x, &p)| x - qs * p)
                    .collect();
                prev = std::mem::replace(&mut cur, next);
            }
            Ok(cur)
        }
    }
}

// ---------------------------------------------------------------------------
// Directed-edge operators.
// ---------------------------------------------------------------------------

/// Matrix-free edge-operator kernel over the directed-edge index.
///
/// Defined for any simple graph (the tree truncations use it at their
/// boundary); the public `apply_iwahori` entry points enforce regularity.
pub struct EdgeOps {
    idx: DirectedEdgeIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IwahoriGen {
    S0,
    S1,
    Tau,
    Nb,
}

impl EdgeOps {
    pub fn new(g: &Graph) -> EdgeOps {
        EdgeOps {
            idx: directed_edges(g),
        }
    }

    pub fn index(&self) -> &DirectedEdgeIndex {
        &self.idx
    }

    pub fn dim(&self) -> usize {
        self.idx.len()
    }

    fn origin_sums<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let mut sums = vec![T::zero(); self.idx.vertex_count()];
        for (e, &value) in f.iter().enumerate() {
            let o = self.idx.origin(e);
            sums[o] = sums[o] + value;
        }
        sums
    }

    fn terminus_sums<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let mut sums = vec![T::zero(); self.idx.vertex_count()];
        for (e, &value) in f.iter().enumerate() {
            let t = self.idx.terminus(e);
            sums[t] = sums[t] + value;
        }
        sums
    }

    /// `s0 f(x,y) = Σ_{y'~x, y'≠y} f(x,y')`.
    pub fn s0<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let sums = self.origin_sums(f);
        (0..f.len())
            .map(|e| sums[self.idx.origin(e)] - f[e])
            .collect()
    }

    /// `s1 f(x,y) = Σ_{x'~y, x'≠x} f(x',y)`.
    pub fn s1<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let sums = self.terminus_sums(f);
        (0..f.len())
            .map(|e| sums[self.idx.terminus(e)] - f[e])
            .collect()
    }

    /// `τ f(x,y) = f(y,x)`.
    pub fn tau<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        (0..f.len()).map(|e| f[self.idx.reversal(e)]).collect()
    }

    /// `nb f(x,y) = Σ_{x'~y, x'≠x} f(y,x')`, the forward non-backtracking
    /// sum. Equals both `τ∘s0` and `s1∘τ`.
    pub fn nb<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let sums = self.origin_sums(f);
        (0..f.len())
            .map(|e| sums[self.idx.terminus(e)] - f[self.idx.reversal(e)])
            .collect()
    }

    pub fn generator<T: Scalar>(&self, f: &[T], gen: IwahoriGen) -> Vec<T> {
        match gen {
            IwahoriGen::S0 => self.s0(f),
            IwahoriGen::S1 => self.s1(f),
            IwahoriGen::Tau => self.tau(f),
            IwahoriGen::Nb => self.nb(f),
        }
    }

    /// `h_w = τ^{δτ} ∘ nb^m ∘ s1^{δ1}` (rightmost factor applies first).
    pub fn word<T: Scalar>(&self, f: &[T], w: &OperatorWord) -> Vec<T> {
        let mut cur = if w.delta_1() { self.s1(f) } else { f.to_vec() };
        for _ in 0..w.nb_power() {
            cur = self.nb(&cur);
        }
        if w.delta_tau() {
            cur = self.tau(&cur);
        }
        cur
    }

    /// `U f(x,y) = f(x)` for a vertex function `f`.
    pub fn up<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        (0..self.idx.len()).map(|e| f[self.idx.origin(e)]).collect()
    }

    /// `D f(x) = Σ_{y~x} f(x,y)` for an edge function `f`.
    pub fn down<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.origin_sums(f)
    }
}

/// Apply one Iwahori generator on a regular graph.
pub fn apply_iwahori<T: Scalar>(
    g: &Graph,
    ef: &[T],
    gen: IwahoriGen,
) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Regular { .. } = classify(g) else {
        return Err(HeckeError::NotRegular);
    };
    let ops = EdgeOps::new(g);
    if ef.len() != ops.dim() {
        return Err(HeckeError::DimensionMismatch {
            expected: ops.dim(),
            got: ef.len(),
        });
    }
    Ok(ops.generator(ef, gen))
}

/// Apply a normal-form word on a regular graph.
pub fn apply_word<T: Scalar>(g: &Graph, ef: &[T], w: &OperatorWord) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Regular { .. } = classify(g) else {
        return Err(HeckeError::NotRegular);
    };
    let ops = EdgeOps::new(g);
    if ef.len() != ops.dim() {
        return Err(HeckeError::DimensionMismatch {
            expected: ops.dim(),
            got: ef.len(),
        });
    }
    Ok(ops.word(ef, w))
}

/// `U`: vertex functions to edge functions on a regular graph.
pub fn apply_up<T: Scalar>(g: &Graph, f: &[T]) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Regular { .. } = classify(g) else {
        return Err(HeckeError::NotRegular);
    };
    if f.len() != g.n() {
        return Err(HeckeError::DimensionMismatch {
            expected: g.n(),
            got: f.len(),
        });
    }
    Ok(EdgeOps::new(g).up(f))
}

/// `D`: edge functions to vertex functions on a regular graph.
pub fn apply_down<T: Scalar>(g: &Graph, ef: &[T]) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Regular { .. } = classify(g) else {
        return Err(HeckeError::NotRegular);
    };
    let ops = EdgeOps::new(g);
    if ef.len() != ops.dim() {
        return Err(HeckeError::DimensionMismatch {
            expected: ops.dim(),
            got: ef.len(),
        });
    }
    Ok(ops.down(ef))
}

// ---------------------------------------------------------------------------
// Biregular edge operators (oriented undirected edges, type 0 -> type 1).
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiregularGen {
    S0,
    S1,
}

/// Operators of the biregular edge algebra over the `m` oriented edges.
pub struct BiregularOps {
    edges: Vec<(usize, usize)>,
    types: Vec<u8>,
    n: usize,
}

impl BiregularOps {
    pub fn new(g: &Graph, types: &[u8]) -> BiregularOps {
        BiregularOps {
            edges: oriented_edges(g, types),
            types: types.to_vec(),
            n: g.n(),
        }
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn sums_at<T: Scalar>(&self, f: &[T], end: usize) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        for (i, &(x, y)) in self.edges.iter().enumerate() {
            let v = if end == 0 { x } else { y };
            sums[v] = sums[v] + f[i];
        }
        sums
    }

    /// `s0 f(x,y) = Σ_{y'~x, y'≠y} f(x,y')` (other edges at the type-0 end).
    pub fn s0<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let sums = self.sums_at(f, 0);
        (0..f.len()).map(|i| sums[self.edges[i].0] - f[i]).collect()
    }

    /// `s1 f(x,y) = Σ_{x'~y, x'≠x} f(x',y)` (other edges at the type-1 end).
    pub fn s1<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let sums = self.sums_at(f, 1);
        (0..f.len()).map(|i| sums[self.edges[i].1] - f[i]).collect()
    }

    pub fn generator<T: Scalar>(&self, f: &[T], gen: BiregularGen) -> Vec<T> {
        match gen {
            BiregularGen::S0 => self.s0(f),
            BiregularGen::S1 => self.s1(f),
        }
    }

    /// `nb_tilde = s1 ∘ s0`.
    pub fn nb_tilde<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.s1(&self.s0(f))
    }

    /// `nb_tilde` written out as the literal two-step non-backtracking sum
    /// `Σ_{x'~y, x'≠x} Σ_{y'~x', y'≠y} f(x',y')`. Independent route used by
    /// the relation suite to pin the composition.
    pub fn nb_tilde_direct<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let mut at0: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        let mut at1: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, &(x, y)) in self.edges.iter().enumerate() {
            at0[x].push(i);
            at1[y].push(i);
        }
        (0..f.len())
            .map(|i| {
                let (x, y) = self.edges[i];
                let mut acc = T::zero();
                for &j in &at1[y] {
                    let xp = self.edges[j].0;
                    if xp == x {
                        continue;
                    }
                    for &k in &at0[xp] {
                        if self.edges[k].1 != y {
                            acc = acc + f[k];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// `U_0 f(x,y) = f(x)`.
    pub fn u0<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.edges.iter().map(|&(x, _)| f[x]).collect()
    }

    /// `U_1 f(x,y) = f(y)`.
    pub fn u1<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.edges.iter().map(|&(_, y)| f[y]).collect()
    }

    /// `D_0 f(x) = Σ_{y~x} f(x,y)` on type-0 vertices, zero elsewhere.
    pub fn d0<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let mut out = self.sums_at(f, 0);
        for (v, slot) in out.iter_mut().enumerate() {
            if self.types[v] != 0 {
                *slot = T::zero();
            }
        }
        out
    }

    /// `D_1 f(y) = Σ_{x~y} f(x,y)` on type-1 vertices, zero elsewhere.
    pub fn d1<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        let mut out = self.sums_at(f, 1);
        for (v, slot) in out.iter_mut().enumerate() {
            if self.types[v] != 1 {
                *slot = T::zero();
            }
        }
        out
    }
}

/// Apply a biregular edge generator; errors unless the graph is biregular.
pub fn apply_iwahori_biregular<T: Scalar>(
    g: &Graph,
    ef: &[T],
    gen: BiregularGen,
) -> Result<Vec<T>, HeckeError> {
    let RegularityClass::Biregular { types, .. } = classify(g) else {
        return Err(HeckeError::NotBiregular);
    };
    let ops = BiregularOps::new(g, &types);
    if ef.len() != ops.dim() {
        return Err(HeckeError::DimensionMismatch {
            expected: ops.dim(),
            got: ef.len(),
        });
    }
    Ok(ops.generator(ef, gen))
}

// ---------------------------------------------------------------------------
// Relation suite.
// ---------------------------------------------------------------------------

/// Exact probe set: the full standard basis for small dimensions, seeded
/// random integer vectors otherwise. Either way the arithmetic is exact.
fn integer_probes(dim: usize, seed: u64) -> Vec<Vec<i64>> {
    const DENSE_LIMIT: usize = 600;
    if dim <= DENSE_LIMIT {
        (0..dim)
            .map(|i| {
                let mut v = vec![0i64; dim];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        let mut rng = SplitMix64::new(seed);
        (0..20)
            .map(|_| (0..dim).map(|_| rng.below(19) as i64 - 9).collect())
            .collect()
    }
}

fn probe_residual(
    probes: &[Vec<i64>],
    lhs: impl Fn(&[i64]) -> Vec<i64>,
    rhs: impl Fn(&[i64]) -> Vec<i64>,
) -> f64 {
    let mut worst = 0i64;
    for p in probes {
        let a = lhs(p);
        let b = rhs(p);
        debug_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    worst as f64
}

/// Evaluate every algebra identity in scope as an exact integer identity
/// and report the max residual per identity.
pub fn relation_suite(g: &Graph) -> Result<CheckReport, HeckeError> {
    match classify(g) {
        RegularityClass::Regular { q } => Ok(regular_relation_suite(g, q)),
        RegularityClass::Biregular { q0, q1, types } => {
            Ok(biregular_relation_suite(g, q0, q1, &types))
        }
        RegularityClass::Neither => Err(HeckeError::UnsupportedClass),
    }
}

fn regular_relation_suite(g: &Graph, q: usize) -> CheckReport {
    let mut report = CheckReport::new("relation_suite_regular");
    let ops = EdgeOps::new(g);
    let qi = q as i64;
    let edge_probes = integer_probes(ops.dim(), 0x5EED_0001);
    let vertex_probes = integer_probes(g.n(), 0x5EED_0002);

    let scale = |f: &[i64], c: i64| -> Vec<i64> { f.iter().map(|&x| c * x).collect() };
    let add = |a: Vec<i64>, b: Vec<i64>| -> Vec<i64> {
        a.into_iter().zip(b).map(|(x, y)| x + y).collect()
    };

    report.push(CheckLine::exact_eq(
        "tau.tau == id",
        probe_residual(&edge_probes, |f| ops.tau(&ops.tau(f)), |f| f.to_vec()),
    ));
    report.push(CheckLine::exact_eq(
        format!("s0.s0 == {q}*id + {}*s0", qi - 1),
        probe_residual(
            &edge_probes,
            |f| ops.s0(&ops.s0(f)),
            |f| add(scale(f, qi), scale(&ops.s0(f), qi - 1)),
        ),
    ));
    report.push(CheckLine::exact_eq(
        format!("s1.s1 == {q}*id + {}*s1", qi - 1),
        probe_residual(
            &edge_probes,
            |f| ops.s1(&ops.s1(f)),
            |f| add(scale(f, qi), scale(&ops.s1(f), qi - 1)),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "tau.s0 == s1.tau",
        probe_residual(
            &edge_probes,
            |f| ops.tau(&ops.s0(f)),
            |f| ops.s1(&ops.tau(f)),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "nb == tau.s0",
        probe_residual(&edge_probes, |f| ops.nb(f), |f| ops.tau(&ops.s0(f))),
    ));
    report.push(CheckLine::exact_eq(
        "nb == s1.tau",
        probe_residual(&edge_probes, |f| ops.nb(f), |f| ops.s1(&ops.tau(f))),
    ));
    report.push(CheckLine::exact_eq(
        "U.D == s0 + id",
        probe_residual(
            &edge_probes,
            |f| ops.up(&ops.down(f)),
            |f| add(ops.s0(f), f.to_vec()),
        ),
    ));
    report.push(CheckLine::exact_eq(
        format!("D.U == {}*id", qi + 1),
        probe_residual(
            &vertex_probes,
            |f| ops.down(&ops.up(f)),
            |f| scale(f, qi + 1),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "A == D.tau.U",
        probe_residual(
            &vertex_probes,
            |f| ops.down(&ops.tau(&ops.up(f))),
            |f| apply_adjacency(g, f),
        ),
    ));
    for m in 2..=5 {
        report.push(CheckLine::exact_eq(
            format!("A_{m} == D.nb^{}.tau.U", m - 1),
            probe_residual(
                &vertex_probes,
                |f| {
                    let mut cur = ops.tau(&ops.up(f));
                    for _ in 0..(m - 1) {
                        cur = ops.nb(&cur);
                    }
                    ops.down(&cur)
                },
                |f| apply_ak(g, f, m).unwrap(),
            ),
        ));
    }
    for k in 2..=4usize {
        report.push(CheckLine::exact_eq(
            format!("A.A_{k} == A_{} + {q}*A_{}", k + 1, k - 1),
            probe_residual(
                &vertex_probes,
                |f| apply_adjacency(g, &apply_ak(g, f, k).unwrap()),
                |f| {
                    add(
                        apply_ak(g, f, k + 1).unwrap(),
                        scale(&apply_ak(g, f, k - 1).unwrap(), qi),
                    )
                },
            ),
        ));
    }
    // Adjointness: <h_w u, v> == <u, h_{w^{-1}} v> for short words, exact.
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let mut rng = SplitMix64::new(0x5EED_0003);
    let pairs: Vec<(Vec<i64>, Vec<i64>)> = (0..12)
        .map(|_| {
            let u: Vec<i64> = (0..ops.dim()).map(|_| rng.below(19) as i64 - 9).collect();
            let v: Vec<i64> = (0..ops.dim()).map(|_| rng.below(19) as i64 - 9).collect();
            (u, v)
        })
        .collect();
    for w in OperatorWord::enumerate(3) {
        let winv = w.inverse();
        let mut worst = 0i64;
        for (u, v) in &pairs {
            let lhs = dot(&ops.word(u, &w), v);
            let rhs = dot(u, &ops.word(v, &winv));
            worst = worst.max((lhs - rhs).abs());
        }
        report.push(CheckLine::exact_eq(
            format!("adjoint({w}) == {winv}"),
            worst as f64,
        ));
    }
    report
}

fn biregular_relation_suite(g: &Graph, q0: usize, q1: usize, types: &[u8]) -> CheckReport {
    let mut report = CheckReport::new("relation_suite_biregular");
    let ops = BiregularOps::new(g, types);
    let (i0, i1) = (q0 as i64, q1 as i64);
    let edge_probes = integer_probes(ops.dim(), 0x5EED_0004);
    let vertex_probes = integer_probes(g.n(), 0x5EED_0005);

    let scale = |f: &[i64], c: i64| -> Vec<i64> { f.iter().map(|&x| c * x).collect() };
    let add = |a: Vec<i64>, b: Vec<i64>| -> Vec<i64> {
        a.into_iter().zip(b).map(|(x, y)| x + y).collect()
    };

    report.push(CheckLine::exact_eq(
        format!("s0.s0 == {}*s0 + {q0}*id", i0 - 1),
        probe_residual(
            &edge_probes,
            |f| ops.s0(&ops.s0(f)),
            |f| add(scale(&ops.s0(f), i0 - 1), scale(f, i0)),
        ),
    ));
    report.push(CheckLine::exact_eq(
        format!("s1.s1 == {}*s1 + {q1}*id", i1 - 1),
        probe_residual(
            &edge_probes,
            |f| ops.s1(&ops.s1(f)),
            |f| add(scale(&ops.s1(f), i1 - 1), scale(f, i1)),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "U0.D0 == s0 + id",
        probe_residual(
            &edge_probes,
            |f| ops.u0(&ops.d0(f)),
            |f| add(ops.s0(f), f.to_vec()),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "U1.D1 == s1 + id",
        probe_residual(
            &edge_probes,
            |f| ops.u1(&ops.d1(f)),
            |f| add(ops.s1(f), f.to_vec()),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "A == D0.U1 + D1.U0",
        probe_residual(
            &vertex_probes,
            |f| add(ops.d0(&ops.u1(f)), ops.d1(&ops.u0(f))),
            |f| apply_adjacency(g, f),
        ),
    ));
    report.push(CheckLine::exact_eq(
        "nb_tilde == s1.s0 (vs the literal two-step sum)",
        probe_residual(
            &edge_probes,
            |f| ops.nb_tilde(f),
            |f| ops.nb_tilde_direct(f),
        ),
    ));
    report
}

// Complex edge functions get a convenience alias in the public signatures.
pub type VertexFunction = Vec<Complex64>;
pub type EdgeFunction = Vec<Complex64>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn word_normal_forms_multiply_correctly() {
        let tau = OperatorWord::tau();
        let s0 = OperatorWord::s0();
        let s1 = OperatorWord::s1();
        let nb = OperatorWord::nb();
        // Defining relations.
        assert_eq!(tau.mul(&tau), OperatorWord::identity());
        assert_eq!(s0.mul(&s0), OperatorWord::identity());
        assert_eq!(s1.mul(&s1), OperatorWord::identity());
        assert_eq!(tau.mul(&s0), s1.mul(&tau));
        assert_eq!(tau.mul(&s0), nb);
        assert_eq!(nb.mul(&nb), OperatorWord::new(false, 2, false));
        assert_eq!(s1.mul(&s0), OperatorWord::new(false, 2, false));
        // Lengths of the normal form.
        assert_eq!(OperatorWord::new(true, 3, true).length(), 4);
        // Inverses round-trip through the rewriting.
        for w in OperatorWord::enumerate(4) {
            assert_eq!(w.mul(&w.inverse()), OperatorWord::identity(), "{w}");
            assert_eq!(w.inverse().mul(&w), OperatorWord::identity(), "{w}");
        }
        // Associativity spot check over all short triples.
        let words = OperatorWord::enumerate(2);
        for a in &words {
            for b in &words {
                for c in &words {
                    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                }
            }
        }
    }

    #[test]
    fn tau_is_an_involution_on_random_functions() {
        let g = fixtures::petersen();
        let ops = EdgeOps::new(&g);
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let f: Vec<Complex64> = (0..ops.dim()).map(|_| rng.complex_box()).collect();
            let back = ops.tau(&ops.tau(&f));
            for (a, b) in back.iter().zip(&f) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn constant_functions_and_traces() {
        let g = fixtures::k4();
        let ops = EdgeOps::new(&g);
        let ones = vec![1i64; ops.dim()];
        assert!(ops.s0(&ones).iter().all(|&x| x == 2));
        assert!(ops.nb(&ones).iter().all(|&x| x == 2));
        // Simple graphs have no closed non-backtracking walks of length 1 or 2.
        let mut trace = 0i64;
        let mut trace_sq = 0i64;
        for e in 0..ops.dim() {
            let mut basis = vec![0i64; ops.dim()];
            basis[e] = 1;
            let once = ops.nb(&basis);
            trace += once[e];
            trace_sq += ops.nb(&once)[e];
        }
        assert_eq!(trace, 0);
        assert_eq!(trace_sq, 0);
    }

    #[test]
    fn ak_on_k4_matches_hand_computation() {
        let g = fixtures::k4();
        let mut delta = vec![0i64; 4];
        delta[0] = 1;
        let a2 = apply_ak(&g, &delta, 2).unwrap();
        assert_eq!(a2, vec![0, 2, 2, 2]);
        // A_0 is the identity.
        assert_eq!(apply_ak(&g, &delta, 0).unwrap(), delta);
        // Constants: A_k 1 = (q+1) q^{k-1}.
        let ones = vec![1i64; 4];
        for k in 1..=5 {
            let want = 3 * 2i64.pow(k as u32 - 1);
            assert!(apply_ak(&g, &ones, k).unwrap().iter().all(|&x| x == want));
        }
        assert_eq!(
            apply_ak(&fixtures::k23(), &[1i64; 5], 1),
            Err(HeckeError::NotRegular)
        );
    }

    #[test]
    fn ak_eigenvalue_matches_operator() {
        // On the Petersen graph each eigenvalue pushes through the
        // recurrence; check via the all-ones eigenvector (λ = 3).
        for k in 0..6 {
            let lhs = ak_eigenvalue(3.0, k, 2);
            let want = if k == 0 {
                1.0
            } else {
                3.0 * 2.0_f64.powi(k as i32 - 1)
            };
            assert!((lhs - want).abs() < 1e-12);
        }
    }

    #[test]
    fn word_composition_matches_group_multiplication() {
        let g = fixtures::k4();
        let ops = EdgeOps::new(&g);
        let mut rng = SplitMix64::new(9);
        let f: Vec<i64> = (0..ops.dim()).map(|_| rng.below(19) as i64 - 9).collect();
        // The identity word acts as the identity operator.
        assert_eq!(ops.word(&f, &OperatorWord::identity()), f);
        // Length-additive case: appending s1 to a word with δ1 = 0.
        for m in 0..4usize {
            for delta_tau in [false, true] {
                let w = OperatorWord::new(delta_tau, m, false);
                let ws1 = w.mul(&OperatorWord::s1());
                assert_eq!(ws1.length(), w.length() + 1);
                let via_composition = ops.word(&ops.s1(&f), &w);
                let via_word = ops.word(&f, &ws1);
                assert_eq!(via_composition, via_word, "w={w}");
            }
        }
        // Length-reducing case: h_w h_s1 = q h_{w s1} + (q-1) h_w for δ1 = 1.
        let q = 2i64;
        for m in 0..4usize {
            let w = OperatorWord::new(false, m, true);
            let ws1 = w.mul(&OperatorWord::s1());
            assert_eq!(ws1.length(), w.length() - 1);
            let lhs = ops.word(&ops.s1(&f), &w);
            let rhs: Vec<i64> = ops
                .word(&f, &ws1)
                .into_iter()
                .zip(ops.word(&f, &w))
                .map(|(a, b)| q * a + (q - 1) * b)
                .collect();
            assert_eq!(lhs, rhs, "w={w}");
        }
    }

    #[test]
    fn relation_suites_pass_on_fixtures() {
        for (name, g) in [
            ("k4", fixtures::k4()),
            ("petersen", fixtures::petersen()),
            ("k23", fixtures::k23()),
            ("subdivided_k4", fixtures::subdivided_k4()),
        ] {
            let report = relation_suite(&g).unwrap();
            assert!(report.all_pass(), "{name}: {:?}", report.failures());
            assert!(report.lines.iter().all(|l| l.exact));
        }
        let path = crate::graph::parse_edge_list("0 1\n1 2").unwrap();
        assert!(matches!(
            relation_suite(&path),
            Err(HeckeError::UnsupportedClass)
        ));
    }

    #[test]
    fn relation_suite_rejects_irregular_graphs() {
        let g = crate::graph::parse_edge_list("0 1\n1 2\n2 0\n2 3\n3 0\n3 1\n0 4\n4 1").unwrap();
        assert!(matches!(
            relation_suite(&g),
            Err(HeckeError::UnsupportedClass)
        ));
    }

    #[test]
    fn up_down_shapes() {
        let g = fixtures::petersen();
        let f: Vec<i64> = (0..10).map(|v| v as i64).collect();
        let uf = apply_up(&g, &f).unwrap();
        assert_eq!(uf.len(), 30);
        let back = apply_down(&g, &uf).unwrap();
        // D U = (q+1) Id.
        for (a, b) in back.iter().zip(&f) {
            assert_eq!(*a, 3 * b);
        }
    }
}
