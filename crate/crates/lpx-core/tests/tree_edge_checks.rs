//! Cross-module checks that couple the edge operators to the truncated
//! cover: word supports on the tree and the lift/averaging bridge.

use num_complex::Complex64;

use lpx_core::cover::{lift, spherical_average, unfold};
use lpx_core::fixtures;
use lpx_core::graph::directed_edges;
use lpx_core::hecke::{apply_ak, EdgeOps, OperatorWord};
use lpx_core::rng::SplitMix64;

/// Applied to an interior edge indicator, `h_w` is supported on exactly
/// `q^{l(w)}` edges, each with value 1.
#[test]
fn word_support_counts_on_the_tree() {
    let g = fixtures::k4();
    let cover = unfold(&g, 0, 7).unwrap();
    let tree = cover.as_graph();
    let ops = EdgeOps::new(&tree);
    let idx = directed_edges(&tree);
    // A mid-depth edge with room on all sides for walks of length 4.
    let x = cover.sphere(3).next().unwrap();
    let parent = cover.parent(x).unwrap();
    let e1 = idx.id(parent, x).unwrap();
    let mut indicator = vec![0i64; ops.dim()];
    indicator[e1] = 1;
    for w in OperatorWord::enumerate(3) {
        let image = ops.word(&indicator, &w);
        let support: Vec<i64> = image.into_iter().filter(|&v| v != 0).collect();
        assert_eq!(
            support.len(),
            2usize.pow(w.length() as u32),
            "support of h_{w} on an interior edge"
        );
        assert!(support.iter().all(|&v| v == 1), "unique walk per edge");
    }
}

/// Averaged lifts recover the normalized distance operators at the root:
/// `ρ(lift f)` at depth k equals `(A_k f)(root) / ((q+1) q^{k-1})`.
#[test]
fn averaged_lift_matches_normalized_distance_operators() {
    for g in [fixtures::k4(), fixtures::petersen()] {
        let cover = unfold(&g, 0, 6).unwrap();
        let mut rng = SplitMix64::new(61);
        let f: Vec<Complex64> = (0..g.n()).map(|_| rng.complex_box()).collect();
        let averaged = spherical_average(&cover, &lift(&cover, &f));
        for k in 0..=6usize {
            let ak = apply_ak(&g, &f, k).unwrap();
            let size = if k == 0 {
                1.0
            } else {
                3.0 * 2.0_f64.powi(k as i32 - 1)
            };
            let want = ak[0] / size;
            let v = cover.sphere(k).next().unwrap();
            assert!(
                (averaged[v] - want).norm() <= 1e-10,
                "depth {k}: {} vs {want}",
                averaged[v]
            );
        }
    }
}
