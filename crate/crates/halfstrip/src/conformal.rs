//! The explicit Riemann maps between half-planes and the strip regions,
//! their branch rules, the weighted composition isomorphisms, and the two
//! analytic facts about the map derivatives that make the weights
//! single-valued.
//!
//! Branch conventions. On the closed upper half-plane the factor `1 - z`
//! carries its argument in `[-pi, 0]` and `1 + z` in `[0, pi]`; on the
//! closed lower half-plane the two are swapped. With these choices the
//! square roots below are positive on `(-1, 1)` and analytic off `±1`, and
//! both map derivatives have positive real part away from the axis.

use num_complex::Complex64;

use crate::cauchy::{AnalyticFunction, RegionTag};
use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::quadrature::{integrate_finite_interval, integrate_real_line, QuadratureSpec};

/// Square root with the argument of `w` read in `[0, pi]`; callers must pass
/// `Im w >= 0`.
fn sqrt_arg_upper(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re < 0.0 {
        Complex64::new(0.0, (-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

/// Square root with the argument of `w` read in `[-pi, 0]`; callers must
/// pass `Im w <= 0`.
fn sqrt_arg_lower(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re < 0.0 {
        Complex64::new(0.0, -(-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

/// `sqrt(1 - z^2)` with the upper-map branch (for `z` in the closed upper
/// half-plane).
fn sqrt_1mz2_upper(z: Complex64) -> Complex64 {
    sqrt_arg_lower(Complex64::new(1.0, 0.0) - z) * sqrt_arg_upper(Complex64::new(1.0, 0.0) + z)
}

/// `sqrt(1 - z^2)` with the lower-map branch (for `z` in the closed lower
/// half-plane).
fn sqrt_1mz2_lower(z: Complex64) -> Complex64 {
    sqrt_arg_upper(Complex64::new(1.0, 0.0) - z) * sqrt_arg_lower(Complex64::new(1.0, 0.0) + z)
}

/// `arcsin` through the logarithm, evaluated via whichever of the two
/// reciprocal roots `iz + r` and `r - iz` is larger in modulus; the two
/// multiply to 1 exactly, so the switch avoids the catastrophic
/// cancellation the naive form suffers for large `|z|`.
fn asin_from_root(z: Complex64, r: Complex64) -> Complex64 {
    let a = Complex64::i() * z + r;
    let b = r - Complex64::i() * z;
    if a.norm() >= b.norm() {
        -Complex64::i() * a.ln()
    } else {
        Complex64::i() * b.ln()
    }
}

fn asin_upper(z: Complex64) -> Complex64 {
    asin_from_root(z, sqrt_1mz2_upper(z))
}

fn asin_lower(z: Complex64) -> Complex64 {
    asin_from_root(z, sqrt_1mz2_lower(z))
}

/// Upper half-plane onto the strip interior: `(2 sigma / pi) arcsin z`, with
/// `±1` going to the corners `±sigma`.
pub fn phi_plus(z: Complex64, sigma: f64) -> Complex64 {
    2.0 * sigma / std::f64::consts::PI * asin_upper(z)
}

/// Derivative of [`phi_plus`]; branch-point singularity at `z = ±1`.
pub fn phi_plus_prime(z: Complex64, sigma: f64) -> Result<Complex64> {
    let den = sqrt_1mz2_upper(z);
    if den.norm() == 0.0 {
        return Err(Error::Singular {
            what: "branch point of the upper map derivative".into(),
            point: z,
        });
    }
    Ok(Complex64::new(2.0 * sigma / std::f64::consts::PI, 0.0) / den)
}

/// Inverse of the upper map: `sin(pi w / (2 sigma))`, entire.
pub fn psi_plus(w: Complex64, sigma: f64) -> Complex64 {
    (std::f64::consts::PI / (2.0 * sigma) * w).sin()
}

pub fn psi_plus_prime(w: Complex64, sigma: f64) -> Complex64 {
    let k = std::f64::consts::PI / (2.0 * sigma);
    (k * w).cos() * k
}

/// Lower half-plane onto the strip exterior:
/// `(2 sigma / pi) (z sqrt(1-z^2) + arcsin z)` with the lower branch,
/// sending `±1` to the corners `±sigma`.
pub fn phi_minus(z: Complex64, sigma: f64) -> Complex64 {
    let root = sqrt_1mz2_lower(z);
    2.0 * sigma / std::f64::consts::PI * (z * root + asin_lower(z))
}

/// Derivative of [`phi_minus`]: `(4 sigma / pi) sqrt(1 - z^2)`; vanishes at
/// the prevertices `±1`.
pub fn phi_minus_prime(z: Complex64, sigma: f64) -> Complex64 {
    4.0 * sigma / std::f64::consts::PI * sqrt_1mz2_lower(z)
}

/// Inverse of the lower map by safeguarded Newton iteration: damped steps,
/// iterates projected back into the closed lower half-plane, and a fallback
/// sequence of initial guesses (series at the origin, the quadratic
/// asymptote, and a fixed interior seed).
pub fn psi_minus(w: Complex64, sigma: f64) -> Result<Complex64> {
    let tol = 1e-13 * (1.0 + w.norm());
    let mut candidates = Vec::with_capacity(4);
    // low-order series of the map at the origin inverts to w pi/(4 sigma)
    candidates.push(clamp_lower(w * std::f64::consts::PI / (4.0 * sigma)));
    // far from the strip the map behaves like (2 sigma / pi) i z^2
    let z2 = -Complex64::i() * w * std::f64::consts::PI / (2.0 * sigma);
    let r = z2.sqrt();
    candidates.push(pick_lower(r, -r, w));
    candidates.push(pick_lower(-r, r, w));
    candidates.push(Complex64::new(0.0, -1.0));

    let mut best_residual = f64::INFINITY;
    for z0 in candidates {
        match newton_lower(z0, w, sigma, tol) {
            Ok(z) => return Ok(z),
            Err(res) => best_residual = best_residual.min(res),
        }
    }
    Err(Error::Inversion {
        residual: best_residual,
        iterations: 80,
    })
}

fn clamp_lower(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im.min(0.0))
}

fn pick_lower(a: Complex64, b: Complex64, w: Complex64) -> Complex64 {
    // prefer the root in the closed lower half-plane; on a tie, match the
    // sign of the real parts
    if a.im < 0.0 && b.im >= 0.0 {
        a
    } else if b.im < 0.0 && a.im >= 0.0 {
        b
    } else if a.re * w.re >= 0.0 {
        clamp_lower(a)
    } else {
        clamp_lower(b)
    }
}

/// One damped Newton run; returns the achieved residual on failure.
fn newton_lower(z0: Complex64, w: Complex64, sigma: f64, tol: f64) -> std::result::Result<Complex64, f64> {
    let mut z = clamp_lower(z0);
    let mut res = (phi_minus(z, sigma) - w).norm();
    for _ in 0..80 {
        if res <= tol {
            return Ok(z);
        }
        let d = phi_minus_prime(z, sigma);
        if d.norm() < 1e-150 {
            // sitting on a prevertex: nudge into the interior
            z = clamp_lower(z - Complex64::new(0.0, 1e-3));
            res = (phi_minus(z, sigma) - w).norm();
            continue;
        }
        let full = (phi_minus(z, sigma) - w) / d;
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..50 {
            let zn = clamp_lower(z - full * lambda);
            let rn = (phi_minus(zn, sigma) - w).norm();
            if rn < res {
                z = zn;
                res = rn;
                advanced = true;
                break;
            }
            lambda *= 0.5;
        }
        if !advanced {
            return Err(res);
        }
    }
    if res <= tol {
        Ok(z)
    } else {
        Err(res)
    }
}

/// `1 / phi_minus_prime` at the preimage; singular at the corners.
pub fn psi_minus_prime(w: Complex64, sigma: f64) -> Result<Complex64> {
    let z = psi_minus(w, sigma)?;
    let d = phi_minus_prime(z, sigma);
    if d.norm() < 1e-150 {
        return Err(Error::Singular {
            what: "corner of the exterior map".into(),
            point: w,
        });
    }
    Ok(d.inv())
}

/// A forward/derivative/inverse bundle for one side.
#[derive(Clone, Copy, Debug)]
pub struct BranchedMap {
    pub side: Side,
    pub sigma: f64,
}

impl BranchedMap {
    pub fn new(side: Side, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(BranchedMap { side, sigma })
    }

    pub fn forward(&self, z: Complex64) -> Complex64 {
        match self.side {
            Side::Plus => phi_plus(z, self.sigma),
            Side::Minus => phi_minus(z, self.sigma),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        match self.side {
            Side::Plus => phi_plus_prime(z, self.sigma),
            Side::Minus => Ok(phi_minus_prime(z, self.sigma)),
        }
    }

    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        match self.side {
            Side::Plus => Ok(psi_plus(w, self.sigma)),
            Side::Minus => psi_minus(w, self.sigma),
        }
    }

    pub fn inverse_derivative(&self, w: Complex64) -> Result<Complex64> {
        match self.side {
            Side::Plus => Ok(psi_plus_prime(w, self.sigma)),
            Side::Minus => psi_minus_prime(w, self.sigma),
        }
    }

    /// Human-readable branch descriptor.
    pub fn branch_rule(&self) -> &'static str {
        match self.side {
            Side::Plus => "arg(1-z) in [-pi,0], arg(1+z) in [0,pi] on the closed upper half-plane",
            Side::Minus => "arg(1-z) in [0,pi], arg(1+z) in [-pi,0] on the closed lower half-plane",
        }
    }
}

/// Direct quadrature of the mapping integral for the upper map along the
/// segment from 0 to `z`; an independent cross-check of the closed form.
pub fn sc_integral_upper(z: Complex64, sigma: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let integrand = |tau: f64| {
        let xi = z * tau;
        z / sqrt_1mz2_upper(xi)
    };
    let (v, _, _) = integrate_finite_interval(&integrand, 0.0, 1.0, spec)?;
    Ok(2.0 * sigma / std::f64::consts::PI * v)
}

/// Direct quadrature of the mapping integral for the lower map.
pub fn sc_integral_lower(z: Complex64, sigma: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let integrand = |tau: f64| {
        let xi = z * tau;
        z * sqrt_1mz2_lower(xi)
    };
    let (v, _, _) = integrate_finite_interval(&integrand, 0.0, 1.0, spec)?;
    Ok(4.0 * sigma / std::f64::consts::PI * v)
}

/// The weighted composition `T F = F(map) (map')^{1/p}` carrying `H^p` of a
/// strip region onto `H^p` of its half-plane. The principal `p`-th root is
/// single-valued because the map derivative has positive real part.
pub fn transform_t(f: &AnalyticFunction, p: f64, sigma: f64) -> Result<AnalyticFunction> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Parameter(format!(
            "transform exponent must be in (0, infinity), got {p}"
        )));
    }
    let side = f.region().side().ok_or_else(|| {
        Error::Parameter("transform acts on functions declared on a strip region".into())
    })?;
    let map = BranchedMap::new(side, sigma)?;
    let tag = match side {
        Side::Plus => RegionTag::UpperHalfPlane,
        Side::Minus => RegionTag::LowerHalfPlane,
    };
    let inner = f.clone();
    Ok(AnalyticFunction::new(tag, move |z| {
        let w = map.forward(z);
        let d = match map.derivative(z) {
            Ok(d) => d,
            Err(_) => return Complex64::new(f64::NAN, f64::NAN),
        };
        inner.eval(w) * d.powf(1.0 / p)
    }))
}

/// Inverse of [`transform_t`]: `T^{-1} f = f(inverse) (inverse')^{1/p}`.
pub fn transform_t_inv(f: &AnalyticFunction, p: f64, sigma: f64) -> Result<AnalyticFunction> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Parameter(format!(
            "transform exponent must be in (0, infinity), got {p}"
        )));
    }
    let side = match f.region() {
        RegionTag::UpperHalfPlane => Side::Plus,
        RegionTag::LowerHalfPlane => Side::Minus,
        other => {
            return Err(Error::Parameter(format!(
                "inverse transform acts on half-plane functions, got {other:?}"
            )))
        }
    };
    let map = BranchedMap::new(side, sigma)?;
    let tag = match side {
        Side::Plus => RegionTag::OmegaPlus,
        Side::Minus => RegionTag::OmegaMinus,
    };
    let inner = f.clone();
    Ok(AnalyticFunction::new(tag, move |w| {
        let (z, d) = match (map.inverse(w), map.inverse_derivative(w)) {
            (Ok(z), Ok(d)) => (z, d),
            _ => return Complex64::new(f64::NAN, f64::NAN),
        };
        inner.eval(z) * d.powf(1.0 / p)
    }))
}

/// One derivative-sign violation.
#[derive(Clone, Debug)]
pub struct SignViolation {
    pub z: Complex64,
    pub what: &'static str,
    pub magnitude: f64,
}

/// Result of checking the three sign assertions for the map derivatives.
#[derive(Clone, Debug)]
pub struct SignReport {
    pub checked: usize,
    pub violations: Vec<SignViolation>,
    pub max_violation: f64,
}

/// Verify, at every sample, that the appropriate map derivative has positive
/// real part, an imaginary part signed like the real coordinate, and a real
/// value on the axis of symmetry. Upper half-plane samples check the upper
/// map, lower ones the lower map; samples on the real axis are rejected.
pub fn derivative_sign_report(samples: &[Complex64], sigma: f64) -> Result<SignReport> {
    let axis_tol = 1e-12;
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for &z in samples {
        if z.im == 0.0 {
            return Err(Error::domain("samples must lie off the real axis", z));
        }
        let d = if z.im > 0.0 {
            phi_plus_prime(z, sigma)?
        } else {
            phi_minus_prime(z, sigma)
        };
        checked += 1;
        if d.re <= 0.0 {
            violations.push(SignViolation {
                z,
                what: "nonpositive real part",
                magnitude: -d.re,
            });
        }
        if z.re == 0.0 {
            if d.im.abs() > axis_tol {
                violations.push(SignViolation {
                    z,
                    what: "nonzero imaginary part on the axis",
                    magnitude: d.im.abs(),
                });
            }
        } else if z.re * d.im <= 0.0 {
            violations.push(SignViolation {
                z,
                what: "imaginary part signed against the real coordinate",
                magnitude: (z.re * d.im).abs(),
            });
        }
    }
    let max_violation = violations
        .iter()
        .map(|v| v.magnitude)
        .fold(0.0_f64, f64::max);
    Ok(SignReport {
        checked,
        violations,
        max_violation,
    })
}

/// One height's restricted kernel integral against its bound.
#[derive(Clone, Debug)]
pub struct KernelBoundRow {
    pub y: f64,
    /// Quadrature over `|t| <= HEAVY_CAP` plus the analytic tail majorant.
    pub integral: f64,
    /// Portion of `integral` contributed by the tail majorant.
    pub tail_majorant: f64,
    pub bound: f64,
}

/// Abscissa cap for integrals whose tails decay on a logarithmic scale.
const HEAVY_CAP: f64 = 1e12;

/// Report for the restricted kernel integral
/// `\int |phi'(t+iy)| / |phi(t+iy) - alpha|^q dt` over the set where the
/// denominator stays at least `eps`, against `3 * 2^{q+1} / ((q-1) eps^{q-1})`.
#[derive(Clone, Debug)]
pub struct KernelBoundReport {
    pub rows: Vec<KernelBoundRow>,
    /// Max over rows of `integral/bound - 1`, clamped at zero.
    pub max_excess: f64,
}

pub fn conformal_kernel_bound_check(
    alpha: Complex64,
    eps: f64,
    q_exp: f64,
    heights: &[f64],
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<KernelBoundReport> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    if !(q_exp > 1.0) || !q_exp.is_finite() {
        return Err(Error::Parameter(format!(
            "exponent must lie in (1, infinity), got {q_exp}"
        )));
    }
    let bound = 3.0 * 2.0_f64.powf(q_exp + 1.0) / ((q_exp - 1.0) * eps.powf(q_exp - 1.0));

    // Past the cap, `|phi'| <= (2 sigma/pi)/(x-1)` and
    // `|phi - alpha| >= (2 sigma/pi) ln(x-1) - |alpha|`, so substituting
    // `m = ln(x-1)` majorizes each tail by a power of the linear form below.
    let scale = 2.0 * sigma / std::f64::consts::PI;
    let m0 = (HEAVY_CAP - 1.0).ln();
    let base = scale * m0 - alpha.norm();
    if base <= eps {
        return Err(Error::Truncation(
            "tail majorant for the kernel bound is not positive at the cap".into(),
        ));
    }
    let tail_majorant = 2.0 * base.powf(1.0 - q_exp) / (q_exp - 1.0);

    let mut rows = Vec::with_capacity(heights.len());
    let mut max_excess = 0.0_f64;
    for &y in heights {
        if !(y > 0.0) {
            return Err(Error::Parameter(format!(
                "heights must be positive, got {y}"
            )));
        }
        let integrand = |t: f64| {
            let z = Complex64::new(t, y);
            let dist = (phi_plus(z, sigma) - alpha).norm();
            if dist < eps {
                return Complex64::default();
            }
            let d = phi_plus_prime(z, sigma).map(|d| d.norm()).unwrap_or(0.0);
            Complex64::new(d / dist.powf(q_exp), 0.0)
        };
        let (v, _, _) =
            integrate_real_line(&integrand, &[-1.0, 0.0, 1.0], Some(HEAVY_CAP), spec)?;
        let integral = v.re + tail_majorant;
        max_excess = max_excess.max(integral / bound - 1.0);
        rows.push(KernelBoundRow {
            y,
            integral,
            tail_majorant,
            bound,
        });
    }
    Ok(KernelBoundReport {
        rows,
        max_excess: max_excess.max(0.0),
    })
}

/// `(\int_{|x| <= 1e12} |f(x+iy)|^p dx)^{1/p}` for a half-plane function
/// handle, using the capped heavy-tail route. Transformed strip functions
/// decay only logarithmically along lines, so this is a lower estimate of
/// the full line norm, adequate as boundedness evidence; exact norm
/// comparisons go through the boundary trace instead.
pub fn line_norm_at_height(
    f: &AnalyticFunction,
    p: f64,
    y: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Parameter(
            "height must be nonzero; boundary norms go through the trace".into(),
        ));
    }
    let integrand = |x: f64| {
        let v = f.eval(Complex64::new(x, y)).norm();
        Complex64::new(v.powf(p), 0.0)
    };
    let (v, _, _) = integrate_real_line(&integrand, &[-1.0, 0.0, 1.0], Some(HEAVY_CAP), spec)?;
    Ok(v.re.max(0.0).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn upper_map_reference_values() {
        assert!((phi_plus(c64(0.0, 0.0), 1.0)).norm() < 1e-15);
        assert!((phi_plus(c64(1.0, 0.0), 1.0) - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((phi_plus(c64(-1.0, 0.0), 1.0) - c64(-1.0, 0.0)).norm() < 1e-14);
        let expected = 2.0 / std::f64::consts::PI * (1.0 + 2.0_f64.sqrt()).ln();
        assert!(
            (phi_plus(c64(0.0, 1.0), 1.0) - c64(0.0, expected)).norm() < 1e-14,
            "got {}",
            phi_plus(c64(0.0, 1.0), 1.0)
        );
        assert!((expected - 0.56110).abs() < 1e-5);
    }

    #[test]
    fn upper_map_boundary_correspondence() {
        let g = crate::geometry::StripGeometry::new(1.0).unwrap();
        for k in 1..40 {
            let x = -0.999 + 1.998 * (k as f64) / 40.0;
            let w = phi_plus(c64(x, 0.0), 1.0);
            assert_eq!(g.classify(w), crate::geometry::Region::Gamma2, "x={x} w={w}");
        }
        for k in 1..20 {
            let x = 1.0 + (k as f64) * 0.7;
            let w = phi_plus(c64(x, 0.0), 1.0);
            assert_eq!(g.classify(w), crate::geometry::Region::Gamma3, "x={x} w={w}");
            let w = phi_plus(c64(-x, 0.0), 1.0);
            assert_eq!(g.classify(w), crate::geometry::Region::Gamma1, "x={x} w={w}");
        }
    }

    #[test]
    fn upper_map_agrees_with_direct_mapping_integral() {
        let s = spec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let z = c64(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
            let closed = phi_plus(z, 1.0);
            let direct = sc_integral_upper(z, 1.0, &s).unwrap();
            assert!(
                (closed - direct).norm() < 1e-9,
                "z={z}: closed {closed} direct {direct}"
            );
        }
    }

    #[test]
    fn lower_map_reference_values() {
        assert!((phi_minus(c64(0.0, 0.0), 1.0)).norm() < 1e-15);
        assert!((phi_minus(c64(1.0, 0.0), 1.0) - c64(1.0, 0.0)).norm() < 1e-14);
        assert!((phi_minus(c64(-1.0, 0.0), 1.0) - c64(-1.0, 0.0)).norm() < 1e-14);
        let expected = -(2.0 / std::f64::consts::PI)
            * (2.0_f64.sqrt() + (1.0 + 2.0_f64.sqrt()).ln());
        let got = phi_minus(c64(0.0, -1.0), 1.0);
        assert!((got - c64(0.0, expected)).norm() < 1e-14, "got {got}");
        assert!((expected + 1.4614162).abs() < 1e-6);
    }

    #[test]
    fn lower_map_agrees_with_direct_mapping_integral() {
        let s = spec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..40 {
            let z = c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..-0.05));
            let closed = phi_minus(z, 1.0);
            let direct = sc_integral_lower(z, 1.0, &s).unwrap();
            assert!(
                (closed - direct).norm() < 1e-9,
                "z={z}: closed {closed} direct {direct}"
            );
        }
    }

    #[test]
    fn lower_map_lands_in_the_exterior() {
        let g = crate::geometry::StripGeometry::new(1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let z = c64(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..-1e-3));
            let w = phi_minus(z, 1.0);
            assert_eq!(
                g.classify(w),
                crate::geometry::Region::OmegaMinus,
                "z={z} w={w}"
            );
        }
    }

    #[test]
    fn upper_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let z = c64(rng.gen_range(-3.0..3.0), rng.gen_range(1e-3..3.0));
            let back = psi_plus(phi_plus(z, 1.0), 1.0);
            assert!((back - z).norm() < 1e-10, "z={z} back={back}");
        }
        // interior points of the strip round-trip the other way
        for _ in 0..100 {
            let w = c64(rng.gen_range(-0.95..0.95), rng.gen_range(0.05..4.0));
            let fwd = phi_plus(psi_plus(w, 1.0), 1.0);
            assert!((fwd - w).norm() < 1e-10, "w={w} fwd={fwd}");
        }
    }

    #[test]
    fn lower_round_trips_through_newton() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let z = c64(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..-0.02));
            if (z - c64(1.0, 0.0)).norm() < 0.05 || (z + c64(1.0, 0.0)).norm() < 0.05 {
                continue;
            }
            let w = phi_minus(z, 1.0);
            let back = psi_minus(w, 1.0).unwrap();
            assert!((back - z).norm() < 1e-10, "z={z} w={w} back={back}");
        }
        let z = c64(-0.3, -0.7);
        let back = psi_minus(phi_minus(z, 1.0), 1.0).unwrap();
        assert!((back - z).norm() < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for &z in &[c64(0.3, 0.8), c64(-1.4, 0.3), c64(2.0, 1.5)] {
            let d = phi_plus_prime(z, 1.0).unwrap();
            let fd = (phi_plus(z + c64(h, 0.0), 1.0) - phi_plus(z - c64(h, 0.0), 1.0))
                / (2.0 * h);
            assert!((d - fd).norm() < 1e-8, "z={z}: {d} vs {fd}");
        }
        for &z in &[c64(0.3, -0.8), c64(-1.4, -0.3), c64(2.0, -1.5)] {
            let d = phi_minus_prime(z, 1.0);
            let fd = (phi_minus(z + c64(h, 0.0), 1.0) - phi_minus(z - c64(h, 0.0), 1.0))
                / (2.0 * h);
            assert!((d - fd).norm() < 1e-7, "z={z}: {d} vs {fd}");
        }
    }

    #[test]
    fn derivative_inverse_relation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let z = c64(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0));
            let w = phi_plus(z, 1.0);
            let prod = phi_plus_prime(z, 1.0).unwrap() * psi_plus_prime(w, 1.0);
            assert!((prod - c64(1.0, 0.0)).norm() < 1e-10, "z={z}: {prod}");
        }
    }

    #[test]
    fn branch_point_derivative_errors() {
        assert!(phi_plus_prime(c64(1.0, 0.0), 1.0).is_err());
        assert!(phi_plus_prime(c64(-1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn transform_reference_value_and_round_trip() {
        let f = AnalyticFunction::new(RegionTag::OmegaPlus, |w| (Complex64::i() * w).exp());
        let tf = transform_t(&f, 2.0, 1.0).unwrap();
        let got = tf.eval(c64(0.0, 0.0));
        let want = (2.0 / std::f64::consts::PI).sqrt();
        assert!((got - c64(want, 0.0)).norm() < 1e-14, "got {got}");

        let g = crate::geometry::StripGeometry::new(1.0).unwrap();
        let back = transform_t_inv(&tf, 2.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let w = c64(rng.gen_range(-0.95..0.95), rng.gen_range(0.05..3.0));
            let a = back.eval_checked(w, &g).unwrap();
            let b = f.eval(w);
            assert!((a - b).norm() < 1e-9, "w={w}: {a} vs {b}");
        }
    }

    #[test]
    fn transform_of_member_has_bounded_line_norms() {
        let f = AnalyticFunction::new(RegionTag::OmegaPlus, |w| (w - c64(2.0, 0.0)).inv());
        let tf = transform_t(&f, 2.0, 1.0).unwrap();
        let s = spec().with_tols(1e-8, 1e-9);
        let mut last = 0.0;
        for y in [1.0, 0.1, 0.01] {
            let n = line_norm_at_height(&tf, 2.0, y, &s).unwrap();
            assert!(n.is_finite() && n > 0.0);
            assert!(n < 10.0, "unexpectedly large line norm {n} at y={y}");
            // norms grow toward the boundary
            assert!(n >= last - 1e-6, "norm at y={y} fell to {n} from {last}");
            last = n;
        }
    }

    #[test]
    fn sign_report_is_clean_on_both_sides() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let mut samples = Vec::new();
        for _ in 0..500 {
            samples.push(c64(rng.gen_range(-5.0..5.0), rng.gen_range(1e-4..5.0)));
            samples.push(c64(rng.gen_range(-5.0..5.0), -rng.gen_range(1e-4..5.0)));
        }
        samples.push(c64(0.0, 2.0));
        samples.push(c64(0.0, -2.0));
        let report = derivative_sign_report(&samples, 1.0).unwrap();
        assert_eq!(report.checked, samples.len());
        assert!(
            report.violations.is_empty(),
            "violations: {:?}",
            report.violations
        );

        // the reference sample in the first quadrant has both parts positive
        let d = phi_plus_prime(c64(0.5, 0.5), 1.0).unwrap();
        assert!(d.re > 0.0 && d.im > 0.0);
        let d = phi_plus_prime(c64(0.0, 1.0), 1.0).unwrap();
        assert!(d.im.abs() < 1e-12);
    }

    #[test]
    fn monotone_real_part_along_horizontals() {
        for y in [0.1, 0.5, 2.0] {
            let mut last = f64::NEG_INFINITY;
            for k in 0..200 {
                let t = -6.0 + 12.0 * (k as f64) / 199.0;
                let re = phi_plus(c64(t, y), 1.0).re;
                assert!(re > last, "t={t} y={y}");
                last = re;
            }
        }
    }

    #[test]
    fn kernel_bound_observed_below_reference() {
        let s = spec().with_tols(1e-8, 1e-10);
        let report = conformal_kernel_bound_check(
            c64(3.0, 0.0),
            1.0,
            2.0,
            &[0.5, 1.0, 2.0],
            1.0,
            &s,
        )
        .unwrap();
        assert_eq!(report.rows[0].bound, 24.0);
        assert_eq!(report.max_excess, 0.0, "rows: {:?}", report.rows);
        for row in &report.rows {
            assert!(row.integral > 0.0 && row.integral < row.bound);
        }

        let report =
            conformal_kernel_bound_check(c64(3.0, 0.0), 2.0, 2.0, &[0.5], 1.0, &s).unwrap();
        assert_eq!(report.rows[0].bound, 12.0);
        assert_eq!(report.max_excess, 0.0);

        // interior alpha: the excluded set is genuinely restricted and the
        // bound still holds
        let report =
            conformal_kernel_bound_check(c64(0.0, 0.0), 0.5, 2.0, &[0.3], 1.0, &s).unwrap();
        assert_eq!(report.max_excess, 0.0, "rows: {:?}", report.rows);
    }
}
