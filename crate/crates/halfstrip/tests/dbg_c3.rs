use std::sync::Mutex;
use halfstrip::geometry::StripGeometry;
use halfstrip::quadrature::QuadratureSpec;
use num_complex::Complex64;

#[test]
fn debug_ray_sampling() {
    let g = StripGeometry::new(1.0).unwrap();
    let inner = QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-11, ..Default::default() };
    let outer = QuadratureSpec { rel_tol: 1e-6, abs_tol: 1e-9, ..Default::default() };
    let f = halfstrip::cauchy::BoundaryFunction::new(
        &g, |z| (z - Complex64::new(2.0, 0.0)).inv(),
        halfstrip::quadrature::TailBound::algebraic(1.0, 8.0), 1.0).unwrap();
    let log: Mutex<Vec<(f64, f64)>> = Mutex::new(Vec::new());
    // outer integrand |CF(-s+iv)|^(1.25) on the left ray of the (0.5, 0.5) contour
    let p = 1.25f64;
    let c = halfstrip::geometry::ContourSpec::new(0.5, 0.5).unwrap();
    let cf = |w: Complex64| halfstrip::cauchy::cauchy_transform(&f, w, &g, &inner)
        .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let n = halfstrip::quadrature::lp_norm_on_contour(
        |w| { let v = cf(w); log.lock().unwrap().push((w.im, v.norm())); v },
        p, &c, &outer).unwrap();
    let mut samples = log.into_inner().unwrap();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("norm = {:.6e}, converged = {}, samples = {}", n.value, n.converged, samples.len());
    // histogram of sample heights
    let mut buckets = std::collections::BTreeMap::new();
    for (v, _) in &samples {
        let key = if *v < 0.5 { -1 } else { (v.log10().floor() as i64).min(300) };
        *buckets.entry(key).or_insert(0usize) += 1;
    }
    for (k, n) in buckets {
        println!("height decade 10^{k}: {n} samples");
    }
    // print a few huge-height values
    for (v, a) in samples.iter().rev().take(5) {
        println!("v={v:.3e}  |CF|={a:.3e}");
    }
}
