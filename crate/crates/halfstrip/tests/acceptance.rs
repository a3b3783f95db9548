//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//!
//! Library-level criteria live here; report determinism and wall-time of
//! the command-line front end are exercised in the CLI crate's own
//! integration tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use halfstrip::cauchy::RegionTag;
use halfstrip::conformal::{phi_minus, phi_plus, psi_minus, psi_plus, sc_integral_upper};
use halfstrip::geometry::{Side, StripGeometry};
use halfstrip::hardy::{hp_norm_estimate, laplace_bound_ratio, test_corpus, GridSpec, LaplaceInput};
use halfstrip::quadrature::QuadratureSpec;
use halfstrip::verify::{run_check, CheckOverrides, Verdict};

fn gate(number: u32, name: &str, ok: bool, detail: String) {
    println!(
        "ACCEPTANCE {number:02} {name}: {} ({detail})",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} ({name}): {detail}");
}

fn check_passes(id: &str) -> (bool, String) {
    let report = run_check(id, &CheckOverrides::default()).expect("check runs");
    (
        report.verdict == Verdict::Pass,
        format!(
            "max_violation {:.3e} vs tolerance {:.1e} over {} samples",
            report.max_violation, report.tolerance, report.samples
        ),
    )
}

#[test]
fn criterion_01_kernel_normalization() {
    let (ok, detail) = check_passes("CHK-K1");
    gate(1, "kernel normalization", ok, detail);
}

#[test]
fn criterion_02_cauchy_representation_both_sides() {
    let (ok1, d1) = check_passes("CHK-C1");
    let (ok2, d2) = check_passes("CHK-C2");
    gate(
        2,
        "Cauchy representation",
        ok1 && ok2,
        format!("interior: {d1}; exterior: {d2}"),
    );
}

#[test]
fn criterion_03_jump_completeness() {
    let (ok, detail) = check_passes("CHK-J1");
    gate(3, "jump completeness", ok, detail);
}

#[test]
fn criterion_04_orthogonality() {
    let g = StripGeometry::new(1.0).unwrap();
    let spec = QuadratureSpec::default();
    let gamma = g.boundary();
    let plus: Vec<_> = test_corpus(1.0)
        .into_iter()
        .filter(|t| t.side == Side::Plus && !t.poles().is_empty())
        .collect();
    let mut pair_max = 0.0_f64;
    for k in 0..10 {
        let a = plus[k % plus.len()].boundary(&g).unwrap();
        let b = plus[(k * 7 + 2) % plus.len()].boundary(&g).unwrap();
        let v = halfstrip::cauchy::orthogonality_pairing(&a, &b, &gamma, &spec).unwrap();
        pair_max = pair_max.max(v.norm());
    }
    let fa = plus
        .iter()
        .find(|t| t.name == "pole(2s)")
        .unwrap()
        .boundary(&g)
        .unwrap();
    let fb = test_corpus(1.0)
        .into_iter()
        .find(|t| t.name == "pole(0.5is)")
        .unwrap()
        .boundary(&g)
        .unwrap();
    let v = halfstrip::cauchy::orthogonality_pairing(&fa, &fb, &gamma, &spec).unwrap();
    let residue = Complex64::new(0.0, 2.0 * std::f64::consts::PI)
        / (Complex64::new(0.0, 0.5) - Complex64::new(2.0, 0.0));
    let cross_dev = (v - residue).norm();
    gate(
        4,
        "orthogonality",
        pair_max < 1e-7 && cross_dev < 1e-6,
        format!("same-side pairs max {pair_max:.3e}, cross pair dev {cross_dev:.3e}"),
    );
}

#[test]
fn criterion_05_transform_bound_constants() {
    let (ok, detail) = check_passes("CHK-C3");
    gate(5, "transform-bound constants", ok, detail);
}

#[test]
fn criterion_06_laplace_bound() {
    let (ok, detail) = check_passes("CHK-L1");
    let spec = QuadratureSpec::default();
    let exp_ratio = laplace_bound_ratio(&LaplaceInput::new(|t| (-t).exp()), &spec).unwrap();
    let exact = (exp_ratio - 2.0_f64.sqrt()).abs() < 1e-6;
    gate(
        6,
        "Laplace bound",
        ok && exact,
        format!("{detail}; e^-t ratio {exp_ratio:.9} vs sqrt(2)"),
    );
}

#[test]
fn criterion_07_conformal_round_trips() {
    let spec = QuadratureSpec::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut rt = 0.0_f64;
    let mut sc = 0.0_f64;
    let mut n_minus = 0;
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(1e-3..3.0));
        rt = rt.max((psi_plus(phi_plus(z, 1.0), 1.0) - z).norm());
        sc = sc.max((phi_plus(z, 1.0) - sc_integral_upper(z, 1.0, &spec).unwrap()).norm());
    }
    while n_minus < 100 {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), -rng.gen_range(0.02..3.0));
        if (z - Complex64::new(1.0, 0.0)).norm() < 0.05
            || (z + Complex64::new(1.0, 0.0)).norm() < 0.05
        {
            continue;
        }
        rt = rt.max((psi_minus(phi_minus(z, 1.0), 1.0).unwrap() - z).norm());
        n_minus += 1;
    }
    gate(
        7,
        "conformal round-trips",
        rt < 1e-10 && sc < 1e-9,
        format!("round-trip max {rt:.3e}, mapping-integral agreement {sc:.3e}"),
    );
}

#[test]
fn criterion_08_derivative_signs() {
    let (ok, detail) = check_passes("CHK-M2");
    gate(8, "derivative signs", ok, detail);
}

#[test]
fn criterion_09_isomorphism_bracket() {
    let g = StripGeometry::new(1.0).unwrap();
    let spec = QuadratureSpec::default();
    let corpus = test_corpus(1.0);
    let names = ["pole(2s)", "pole(-3s)", "pole(2s-is)", "expw(1)", "mix(2s,-3s)"];
    let lo = 5.0_f64.powf(-0.5) - 0.05;
    let hi = 1.01;
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = 0.0_f64;
    let mut rt = 0.0_f64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for name in names {
        let t = corpus.iter().find(|t| t.name == name).unwrap();
        let trace = t.boundary(&g).unwrap().trace_norm(2.0, &g, &spec).unwrap();
        let est = hp_norm_estimate(
            &t.analytic(),
            2.0,
            Side::Plus,
            GridSpec::new(16).unwrap(),
            &g,
            &spec,
        )
        .unwrap();
        let ratio = trace.value / est.value;
        worst_lo = worst_lo.min(ratio);
        worst_hi = worst_hi.max(ratio);

        let tf = halfstrip::conformal::transform_t(&t.analytic(), 2.0, 1.0).unwrap();
        let back = halfstrip::conformal::transform_t_inv(&tf, 2.0, 1.0).unwrap();
        for _ in 0..10 {
            let w = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(0.05..3.0));
            rt = rt.max((back.eval(w) - t.eval(w)).norm());
        }
    }
    gate(
        9,
        "isomorphism bracket",
        worst_lo >= lo && worst_hi <= hi && rt < 1e-9,
        format!(
            "ratios in [{worst_lo:.4}, {worst_hi:.4}] vs [{lo:.4}, {hi}], round-trip {rt:.3e}"
        ),
    );
}

#[test]
fn criterion_10_blaschke_moduli() {
    let (ok, detail) = check_passes("CHK-BL1");
    gate(10, "Blaschke moduli", ok, detail);
}

#[test]
fn criterion_11_nontangential_convergence() {
    let (ok, detail) = check_passes("CHK-NT1");
    gate(11, "non-tangential convergence", ok, detail);
}

#[test]
fn criterion_12_norm_estimator_sanity() {
    let g = StripGeometry::new(1.0).unwrap();
    let spec = QuadratureSpec::default();
    let f = halfstrip::cauchy::AnalyticFunction::new(RegionTag::OmegaPlus, |w| {
        (Complex64::i() * w).exp()
    });
    let est = hp_norm_estimate(&f, 2.0, Side::Plus, GridSpec::new(16).unwrap(), &g, &spec)
        .unwrap();
    let exact = 3.0_f64.sqrt();
    let ok = est.value >= exact - 1e-3 && est.value <= exact;
    gate(
        12,
        "norm estimator sanity",
        ok,
        format!("estimate {:.9} vs sqrt(3) = {exact:.9}", est.value),
    );
}
