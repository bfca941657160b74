//! Acceptance suite: one test per release criterion, each printing a
//! single pass/fail line (visible with `--nocapture`).

use std::time::Instant;

use num_complex::Complex64;

use lpx_core::cover::{
    lift, ray_coordinate, sectorial_function, spherical_average, spherical_function, unfold,
};
use lpx_core::fixtures;
use lpx_core::graph::random_regular;
use lpx_core::hecke::{apply_ak, relation_suite};
use lpx_core::rng::SplitMix64;
use lpx_core::satake::{eval_ak, phi4_check, verify_hecke_symbolic};
use lpx_core::spectral::{
    approx_eigenvector_residual, biregular_report, expander_exponent, full_theorem_suite,
    ihara_zeta_check, lp_norm_bound_check, nb_spectrum_check,
};

fn conclude(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {}{}",
        if pass { "PASS" } else { "FAIL" },
        if detail.is_empty() {
            String::new()
        } else {
            format!(" ({detail})")
        }
    );
    assert!(pass, "acceptance {criterion} failed: {detail}");
}

#[test]
fn criterion_01_symbolic_satake_suite() {
    let start = Instant::now();
    let mut pass = true;
    for q in [2, 3, 5] {
        let report = verify_hecke_symbolic(8, q);
        pass &= report.all_pass() && report.lines.iter().all(|l| l.exact);
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 1.0;
    conclude(
        "01 symbolic Satake suite (k_max=8, q in {2,3,5}, exact)",
        pass,
        &format!("{elapsed:.2?}"),
    );
}

/// Independent oracle for criterion 2: solve q^{(p-1)/p} = theta for p by
/// bisection, never through the library's closed form.
fn bisect_p_for_theta(theta: f64, q: f64) -> f64 {
    let f = |p: f64| q.powf((p - 1.0) / p) - theta;
    let (mut lo, mut hi) = (2.0, 64.0);
    assert!(f(lo) <= 0.0 && f(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_02_named_graph_classification() {
    let timed = |g: &lpx_core::Graph| {
        let start = Instant::now();
        let report = expander_exponent(g, None).unwrap();
        (report, start.elapsed().as_secs_f64())
    };
    let (petersen, t1) = timed(&fixtures::petersen());
    let mut pass = petersen.ramanujan;
    pass &= (petersen.p_star.as_f64() - 2.0).abs() <= 1e-6;

    let (k4, t2) = timed(&fixtures::k4());
    pass &= k4.ramanujan;

    let (cl16, t3) = timed(&fixtures::cl16());
    let lambda_want = 2.0 * (std::f64::consts::PI / 8.0).cos() + 1.0;
    pass &= !cl16.ramanujan;
    pass &= (cl16.lambda_x - lambda_want).abs() <= 1e-9;
    // Oracle: θ from the quadratic, then bisection for p.
    let theta = (lambda_want + (lambda_want * lambda_want - 8.0).sqrt()) / 2.0;
    let p_oracle = bisect_p_for_theta(theta, 2.0);
    pass &= (cl16.p_star.as_f64() - p_oracle).abs() <= 1e-6;
    pass &= (cl16.p_star.as_f64() - 3.017).abs() <= 0.01;

    pass &= t1 < 1.0 && t2 < 1.0 && t3 < 1.0;
    conclude(
        "02 named-graph classification (petersen, k4, cl16), < 1 s each",
        pass,
        &format!(
            "p*(cl16) = {:.4} vs oracle {:.4}",
            cl16.p_star.as_f64(),
            p_oracle
        ),
    );
}

#[test]
fn criterion_03_relation_suite_exact() {
    let start = Instant::now();
    let mut pass = true;
    for g in [fixtures::k4(), fixtures::petersen(), fixtures::k23()] {
        let report = relation_suite(&g).unwrap();
        pass &= report.all_pass();
        pass &= report.lines.iter().all(|l| l.exact && l.residual == 0.0);
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 5.0;
    conclude(
        "03 operator relation suite, residual exactly 0 (k4, petersen, k23)",
        pass,
        &format!("{elapsed:.2?}"),
    );
}

#[test]
fn criterion_04_ihara_bass_and_nb_spectrum() {
    let samples: Vec<f64> = (1..=10).map(|i| 0.044 * i as f64).collect();
    let mut graphs = vec![fixtures::k4(), fixtures::petersen()];
    let sizes = [8usize, 10, 12, 14, 16, 18, 20, 10, 14, 18];
    for (i, &n) in sizes.iter().enumerate() {
        graphs.push(random_regular(n, 3, 1000 + i as u64).unwrap());
    }
    let mut pass = true;
    for g in &graphs {
        let zeta = ihara_zeta_check(g, &samples).unwrap();
        pass &= zeta.all_pass();
        let nb = nb_spectrum_check(g, 1e-6).unwrap();
        pass &= nb.all_pass();
    }
    conclude(
        "04 Ihara-Bass determinant + nb singular-value checks (12 graphs)",
        pass,
        "",
    );
}

#[test]
fn criterion_05_theorem_coherence() {
    let mut pass = true;
    for (_, g) in fixtures::all() {
        if expander_exponent(&g, None).is_err() {
            continue; // biregular fixtures have their own criterion
        }
        for p in [2.0, 2.5, 3.0, 4.0] {
            let v = full_theorem_suite(&g, p).unwrap();
            pass &= v.agree();
        }
    }
    conclude(
        "05 criteria (1), (6) k<=5, (7) agree at p in {2, 2.5, 3, 4}",
        pass,
        "",
    );
}

#[test]
fn criterion_06_tree_realizations() {
    let g = fixtures::k4();
    let cover = unfold(&g, 0, 12).unwrap();
    let rc = ray_coordinate(&cover);
    let mut rng = SplitMix64::new(0xACCE);
    let mut worst_eigen: f64 = 0.0;
    let mut worst_avg: f64 = 0.0;
    let mut tested = 0;
    while tested < 20 {
        let theta = Complex64::new(rng.range_f64(-2.0, 2.0), rng.range_f64(-2.0, 2.0));
        if theta.norm() < 0.5 {
            continue;
        }
        tested += 1;
        let f = spherical_function(&cover, theta).unwrap();
        let af = cover.adjacency(&f);
        let ev = theta + Complex64::new(2.0, 0.0) / theta;
        for v in 0..cover.len() {
            if cover.is_interior(v) {
                worst_eigen = worst_eigen.max((af[v] - ev * f[v]).norm());
            }
        }
        let averaged = spherical_average(&cover, &sectorial_function(&cover, &rc, theta).unwrap());
        for v in 0..cover.len() {
            worst_avg = worst_avg.max((averaged[v] - f[v]).norm() / f[v].norm().max(1.0));
        }
    }
    let mut worst_bridge: f64 = 0.0;
    let base: Vec<Complex64> = (0..4).map(|_| rng.complex_box()).collect();
    let lifted = lift(&cover, &base);
    for k in 0..=4usize {
        let ak = apply_ak(&g, &base, k).unwrap();
        let total: Complex64 = cover.sphere(k).map(|v| lifted[v]).sum();
        worst_bridge = worst_bridge.max((total - ak[0]).norm());
    }
    let pass = worst_eigen <= 1e-10 && worst_avg <= 1e-10 && worst_bridge <= 1e-10;
    conclude(
        "06 tree realizations on unfold(k4, 0, 12)",
        pass,
        &format!("eigen {worst_eigen:.2e}, average {worst_avg:.2e}, bridge {worst_bridge:.2e}"),
    );
}

#[test]
fn criterion_07_lp_operator_norm_bounds() {
    let g = fixtures::k4();
    let cover = unfold(&g, 0, 8).unwrap();
    let mut violations = 0;
    let mut kesten = (0.0_f64, 0.0_f64); // observed supremum vs bound at k=1, p=2
    for k in 1..=3usize {
        for (j, p) in [2.0, 3.0, 10.0].into_iter().enumerate() {
            let r = lp_norm_bound_check(&cover, k, p, 100, (k * 10 + j) as u64).unwrap();
            violations += r.violations;
            if k == 1 && p == 2.0 {
                kesten = (r.max_ratio, r.bound);
            }
        }
    }
    conclude(
        "07 Lp norm bounds, 100 trials per (k <= 3, p in {2,3,10}), q = 2",
        violations == 0,
        &format!(
            "{violations} violations; observed sup at (k=1, p=2): {:.4} below the bound {:.4}",
            kesten.0, kesten.1
        ),
    );
}

#[test]
fn criterion_08_approximate_eigenvectors() {
    let g = fixtures::k4();
    let cover = unfold(&g, 0, 12).unwrap();
    let theta = Complex64::from_polar(2.0_f64.sqrt(), std::f64::consts::PI / 3.0);
    let mut pass = true;
    let exact = approx_eigenvector_residual(&cover, theta, 0.0, 2.0).unwrap();
    pass &= exact.residual_ratio <= 1e-10;
    for eps in [0.2, 0.1, 0.05] {
        let r = approx_eigenvector_residual(&cover, theta, eps, 2.0).unwrap();
        pass &= r.residual_ratio <= r.bound;
    }
    conclude(
        "08 approximate eigenvectors: residual <= 2(q+1) eps, exact at eps = 0",
        pass,
        &format!("ratio(0) = {:.2e}", exact.residual_ratio),
    );
}

#[test]
fn criterion_09_biregular() {
    let k23 = biregular_report(&fixtures::k23()).unwrap();
    let mut pass =
        !k23.ramanujan && k23.zero_multiplicity == 3 && k23.expected_zero_multiplicity == 1;
    let sub = biregular_report(&fixtures::subdivided_k4()).unwrap();
    pass &= sub.ramanujan && sub.zero_multiplicity == 2 && sub.expected_zero_multiplicity == 2;
    let mut rng = SplitMix64::new(0xB1B1);
    let mut checked = 0;
    while checked < 5 {
        let tp = Complex64::new(rng.range_f64(-3.0, 3.0), rng.range_f64(-3.0, 3.0));
        if tp.norm() < 0.4 || (tp - Complex64::new(1.0, 0.0)).norm() < 0.1 {
            continue;
        }
        checked += 1;
        let report = phi4_check(tp, 1, 2).unwrap();
        pass &= report.all_pass();
        let report = phi4_check(tp, 2, 3).unwrap();
        pass &= report.all_pass();
    }
    conclude(
        "09 biregular verdicts (k23, subdivided k4) + 4x4 model at 5 random theta'",
        pass,
        "",
    );
}

#[test]
fn criterion_10_growth_lemma() {
    let mut rng = SplitMix64::new(0x6047);
    let mut upper_violations = 0;
    let mut lower_failures = 0;
    for i in 0..100 {
        let q = if i % 2 == 0 { 2i64 } else { 3 };
        let r = rng.range_f64((q as f64).sqrt(), q as f64);
        let theta = Complex64::from_polar(r, rng.range_f64(0.0, std::f64::consts::TAU));
        let mut lower_met = false;
        for k in 0..=40usize {
            let v = eval_ak(theta, k, q).unwrap().norm();
            let pk = r.powi(k as i32);
            if v > (k as f64 + 1.0) * pk * (1.0 + 1e-9) {
                upper_violations += 1;
            }
            if v >= 0.1 * pk {
                lower_met = true;
            }
        }
        if !lower_met {
            lower_failures += 1;
        }
    }
    conclude(
        "10 growth bounds |A_k| <= (k+1)|theta|^k and lower 0.1|theta|^k, k <= 40",
        upper_violations == 0 && lower_failures == 0,
        &format!("{upper_violations} upper violations, {lower_failures} lower failures"),
    );
}
