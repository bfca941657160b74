//! Depth-`R` truncation of the universal covering tree of a regular graph.
//!
//! The cover is realized by non-backtracking walks from a root: tree
//! vertices are walks of length at most `R`, the covering map sends a walk
//! to its endpoint, and adjacency is walk extension. That makes the
//! construction canonical and deterministic given the sorted neighbor
//! lists of the base graph.
//!
//! Truncation falsifies eigen-equations at the leaves, so every eigen and
//! commutation statement here is asserted on interior vertices only
//! (depth at most `R - 1`).

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{classify, Graph, RegularityClass};
use crate::satake::{eval_ak, SatakeError};

#[derive(Debug, Error, PartialEq)]
pub enum CoverError {
    #[error("universal-cover unfolding requires a regular graph")]
    NotRegular,
    #[error("radius {radius} needs {needed} tree vertices, over the cap of {cap} (LPX_MAX_TREE_VERTICES overrides)")]
    RadiusTooLarge {
        radius: usize,
        needed: usize,
        cap: usize,
    },
    #[error("radius must be at least 1")]
    ZeroRadius,
    #[error("root vertex {root} out of range (n = {n})")]
    BadRoot { root: usize, n: usize },
    #[error("theta must be nonzero")]
    ZeroTheta,
    #[error("epsilon must satisfy 0 <= eps < 1/2, got {eps}")]
    BadEpsilon { eps: f64 },
    #[error("test functions must be supported on depth <= {max_depth} for k = {k}")]
    SupportTooDeep { k: usize, max_depth: usize },
}

impl From<SatakeError> for CoverError {
    fn from(e: SatakeError) -> CoverError {
        match e {
            SatakeError::ZeroTheta => CoverError::ZeroTheta,
            SatakeError::BadParameters { .. } => unreachable!("regular covers only"),
        }
    }
}

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

/// Complex-valued function on the tree vertices of a cover.
pub type TreeFunction = Vec<Complex64>;

/// Depth-`R` truncation of the universal cover, with the covering map.
///
/// Vertices are indexed in BFS order, so each depth sphere is a contiguous
/// id range.
pub struct TruncatedCover {
    q: usize,
    radius: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    pi: Vec<usize>,
    depth: Vec<usize>,
    sphere_start: Vec<usize>,
}

impl TruncatedCover {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Base vertex under the covering map.
    pub fn pi(&self, v: usize) -> usize {
        self.pi[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Ids of the depth-`k` sphere.
    pub fn sphere(&self, k: usize) -> std::ops::Range<usize> {
        self.sphere_start[k]..self.sphere_start[k + 1]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.depth[v] < self.radius
    }

    /// Tree adjacency action: parent plus children.
    pub fn adjacency(&self, f: &[Complex64]) -> TreeFunction {
        (0..self.len())
            .map(|v| {
                let mut acc = Complex64::new(0.0, 0.0);
                if let Some(p) = self.parent[v] {
                    acc += f[p];
                }
                for &c in &self.children[v] {
                    acc += f[c];
                }
                acc
            })
            .collect()
    }

    /// The tree as a plain (irregular at the leaves) graph, for edge-level
    /// checks on interior edges.
    pub fn as_graph(&self) -> Graph {
        let edges: Vec<(u64, u64)> = (1..self.len())
            .map(|v| (self.parent[v].unwrap() as u64, v as u64))
            .collect();
        Graph::from_edges(&edges).expect("trees are simple and connected")
    }

    /// Sum of `f` over the distance-`k` sphere around each vertex: the
    /// genuine sphere-sum operator of the tree (not the recurrence).
    pub fn sphere_sum_operator(&self, f: &[Complex64], k: usize) -> TreeFunction {
        (0..self.len())
            .map(|v| self.sphere_sum_at(f, v, k))
            .collect()
    }

    fn sphere_sum_at(&self, f: &[Complex64], v: usize, k: usize) -> Complex64 {
        if k == 0 {
            return f[v];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        // Descend k levels inside the subtree of v.
        acc += self.descend_sum(f, v, k);
        // Walk up j steps, then descend k - j levels avoiding the branch
        // we came from.
        let mut branch = v;
        let mut node = self.parent[v];
        for j in 1..=k {
            let Some(u) = node else { break };
            if j == k {
                acc += f[u];
            } else {
                for &c in &self.children[u] {
                    if c != branch {
                        acc += self.descend_sum(f, c, k - j - 1);
                    }
                }
            }
            branch = u;
            node = self.parent[u];
        }
        acc
    }

    fn descend_sum(&self, f: &[Complex64], v: usize, levels: usize) -> Complex64 {
        if levels == 0 {
            return f[v];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.children[v] {
            acc += self.descend_sum(f, c, levels - 1);
        }
        acc
    }
}

/// Unfold the universal cover of a regular graph to depth `R` around
/// `root`, with the default vertex cap.
pub fn unfold(g: &Graph, root: usize, radius: usize) -> Result<TruncatedCover, CoverError> {
    unfold_capped(g, root, radius, DEFAULT_VERTEX_CAP)
}

pub fn unfold_capped(
    g: &Graph,
    root: usize,
    radius: usize,
    cap: usize,
) -> Result<TruncatedCover, CoverError> {
    let RegularityClass::Regular { q } = classify(g) else {
        return Err(CoverError::NotRegular);
    };
    if radius == 0 {
        return Err(CoverError::ZeroRadius);
    }
    if root >= g.n() {
        return Err(CoverError::BadRoot { root, n: g.n() });
    }
    // Total vertex count 1 + (q+1)(q^R - 1)/(q - 1), accumulated stepwise
    // to avoid overflow before comparing with the cap.
    let mut needed = 1usize;
    let mut shell = q + 1;
    for _ in 1..=radius {
        needed = needed.saturating_add(shell);
        shell = shell.saturating_mul(q);
    }
    if needed > cap {
        return Err(CoverError::RadiusTooLarge {
            radius,
            needed,
            cap,
        });
    }

    let mut cover = TruncatedCover {
        q,
        radius,
        parent: vec![None],
        children: vec![Vec::new()],
        pi: vec![root],
        depth: vec![0],
        sphere_start: vec![0, 1],
    };
    let mut frontier = vec![0usize];
    for depth in 1..=radius {
        let mut next = Vec::with_capacity(frontier.len() * q.max(1));
        for &v in &frontier {
            let base = cover.pi[v];
            let avoid = cover.parent[v].map(|p| cover.pi[p]);
            for &w in g.neighbors(base) {
                if Some(w) == avoid {
                    continue;
                }
                let id = cover.pi.len();
                cover.pi.push(w);
                cover.parent.push(Some(v));
                cover.children.push(Vec::new());
                cover.depth.push(depth);
                cover.children[v].push(id);
                next.push(id);
            }
        }
        cover.sphere_start.push(cover.pi.len());
        frontier = next;
    }
    Ok(cover)
}

/// Lift of a base function through the covering map: `f̃ = f ∘ π`.
pub fn lift(cover: &TruncatedCover, f: &[Complex64]) -> TreeFunction {
    (0..cover.len()).map(|v| f[cover.pi(v)]).collect()
}

/// Spherical averaging around the root: replace each value by the mean of
/// its depth sphere. Idempotent, and commutes with the tree adjacency on
/// interior vertices.
pub fn spherical_average(cover: &TruncatedCover, tf: &[Complex64]) -> TreeFunction {
    let mut out = vec![Complex64::new(0.0, 0.0); cover.len()];
    for k in 0..=cover.radius() {
        let sphere = cover.sphere(k);
        let size = sphere.len() as f64;
        let mean = tf[sphere.clone()].iter().sum::<Complex64>() / size;
        for v in sphere {
            out[v] = mean;
        }
    }
    out
}

/// The leftmost infinite ray (first child at every step) and the relative
/// distance `c(v)` of every vertex to it.
pub struct RayCoordinate {
    pub ray: Vec<usize>,
    pub c: Vec<i64>,
}

pub fn ray_coordinate(cover: &TruncatedCover) -> RayCoordinate {
    let mut ray = vec![0usize];
    loop {
        let last = *ray.last().unwrap();
        match cover.children(last).first() {
            Some(&c) => ray.push(c),
            None => break,
        }
    }
    let mut on_ray = vec![false; cover.len()];
    for &v in &ray {
        on_ray[v] = true;
    }
    // c(v) = depth(v) - 2 * (depth of the deepest ray vertex on the root
    // path of v); the meet depth propagates down the tree.
    let mut meet = vec![0usize; cover.len()];
    let mut c = vec![0i64; cover.len()];
    for v in 0..cover.len() {
        meet[v] = if on_ray[v] {
            cover.depth(v)
        } else {
            meet[cover.parent(v).expect("only the root lacks a parent")]
        };
        c[v] = cover.depth(v) as i64 - 2 * meet[v] as i64;
    }
    RayCoordinate { ray, c }
}

/// Sectorial eigenfunction `v -> θ^{-c(v)}`; an interior eigenfunction of
/// the adjacency with eigenvalue `θ + qθ^{-1}`.
pub fn sectorial_function(
    cover: &TruncatedCover,
    rc: &RayCoordinate,
    theta: Complex64,
) -> Result<TreeFunction, CoverError> {
    if theta == Complex64::new(0.0, 0.0) {
        return Err(CoverError::ZeroTheta);
    }
    assert_eq!(rc.c.len(), cover.len(), "ray coordinate from another cover");
    Ok(rc.c.iter().map(|&ci| theta.powi(-ci as i32)).collect())
}

/// Spherical eigenfunction: 1 at the root and `A_k(θ) / ((q+1)q^{k-1})` on
/// the depth-`k` sphere. Equals the spherical average of the sectorial
/// function for the ray starting at the root.
pub fn spherical_function(
    cover: &TruncatedCover,
    theta: Complex64,
) -> Result<TreeFunction, CoverError> {
    if theta == Complex64::new(0.0, 0.0) {
        return Err(CoverError::ZeroTheta);
    }
    let q = cover.q() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); cover.len()];
    for k in 0..=cover.radius() {
        let value = if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let size = (cover.q() + 1) as f64 * (cover.q() as f64).powi(k as i32 - 1);
            eval_ak(theta, k, q)? / size
        };
        for v in cover.sphere(k) {
            out[v] = value;
        }
    }
    Ok(out)
}

/// Growth verdict of the shell sums of `|tf|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthVerdict {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct LpGrowth {
    /// `a_k`: sum of `|tf|^p` over the depth-`k` shell.
    pub shell_sums: Vec<f64>,
    /// Partial sums over depth at most `k`.
    pub partial_sums: Vec<f64>,
    /// Least-squares slope of `ln a_k` over the upper half of the depths.
    pub growth_exponent: f64,
    pub verdict: GrowthVerdict,
}

/// Shell decomposition of the `L^p` partial norms, with the growth
/// exponent fitted on `k in [ceil(R/2), R]` to dodge transients. A slope
/// within ±0.05 of zero is reported inconclusive: partial sums cannot
/// decide boundary membership.
pub fn lp_partial_norm(cover: &TruncatedCover, tf: &[Complex64], p: f64) -> LpGrowth {
    assert!(p >= 1.0, "p must be at least 1");
    let radius = cover.radius();
    let mut shell_sums = Vec::with_capacity(radius + 1);
    for k in 0..=radius {
        shell_sums.push(cover.sphere(k).map(|v| tf[v].norm().powf(p)).sum::<f64>());
    }
    let mut partial_sums = Vec::with_capacity(radius + 1);
    let mut acc = 0.0;
    for &a in &shell_sums {
        acc += a;
        partial_sums.push(acc);
    }
    let lo = radius.div_ceil(2);
    let points: Vec<(f64, f64)> = (lo..=radius)
        .filter(|&k| shell_sums[k] > 0.0)
        .map(|k| (k as f64, shell_sums[k].ln()))
        .collect();
    let growth_exponent = least_squares_slope(&points);
    let verdict = if points.len() < 2 || growth_exponent.abs() < 0.05 {
        GrowthVerdict::Inconclusive
    } else if growth_exponent < 0.0 {
        GrowthVerdict::Converging
    } else {
        GrowthVerdict::Diverging
    };
    LpGrowth {
        shell_sums,
        partial_sums,
        growth_exponent,
        verdict,
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `L^p` norm over all cover vertices.
pub fn lp_norm(tf: &[Complex64], p: f64) -> f64 {
    tf.iter()
        .map(|z| z.norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}
