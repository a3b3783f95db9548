//! `H^p` norm estimation over the contour family, pointwise growth bounds,
//! the explicit transform constants, the Laplace `L^2` bound, and the corpus
//! of exactly representable test functions.
//!
//! The `H^p` norm is a supremum over an open continuum of contours; the
//! estimator samples a geometric corner-approach grid and reports the
//! refinement trend, so the value is a lower bound of the true norm and
//! divergence is distinguishable from convergence.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cauchy::{AnalyticFunction, BoundaryFunction, RegionTag};
use crate::error::{Error, Result};
use crate::geometry::{ContourSpec, Side, StripGeometry};
use crate::par;
use crate::quadrature::{lp_norm_on_contour, QuadratureSpec, TailBound};

/// Contour grid for the norm supremum: `j = 1..=depth` produces
/// `(s_j, t_j) = (sigma (1 - 2^-j), 2^-j)` on the plus side and the mirrored
/// `(sigma (1 + 2^-j), -2^-j)` on the minus side.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub depth: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { depth: 16 }
    }
}

impl GridSpec {
    pub fn new(depth: usize) -> Result<Self> {
        if !(1..=40).contains(&depth) {
            return Err(Error::Parameter(format!(
                "grid depth must be in 1..=40, got {depth}"
            )));
        }
        Ok(GridSpec { depth })
    }

    pub fn contours(&self, side: Side, sigma: f64) -> Vec<ContourSpec> {
        (1..=self.depth)
            .map(|j| {
                let step = 2.0_f64.powi(-(j as i32));
                match side {
                    Side::Plus => ContourSpec::new(sigma * (1.0 - step), step),
                    Side::Minus => ContourSpec::new(sigma * (1.0 + step), -step),
                }
                .expect("grid contour parameters are valid")
            })
            .collect()
    }
}

/// Monotonicity summary of the grid values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Mixed,
    Flat,
}

/// Grid estimate of an `H^p` norm.
#[derive(Clone, Debug)]
pub struct HpNormEstimate {
    pub p: f64,
    pub side: Side,
    /// Max of the grid values; a lower bound of the true norm.
    pub value: f64,
    /// `(s, t, m(s,t,F))` rows in grid order.
    pub grid: Vec<(f64, f64, f64)>,
    pub refinement_trend: Trend,
    /// Super-linear growth along the grid: evidence the function is not in
    /// the space. Never an exception.
    pub divergent: bool,
}

fn trend_of(values: &[f64]) -> Trend {
    let mut up = false;
    let mut down = false;
    for w in values.windows(2) {
        let rel = (w[1] - w[0]) / w[0].abs().max(1e-300);
        if rel > 1e-12 {
            up = true;
        } else if rel < -1e-12 {
            down = true;
        }
    }
    match (up, down) {
        (true, true) => Trend::Mixed,
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (false, false) => Trend::Flat,
    }
}

/// Estimate the `H^p` norm of `f` by the max of `m(s,t,F)` over the
/// corner-approach grid. For `p = infinity` pass `f64::INFINITY`; leg
/// suprema then replace the integrals.
pub fn hp_norm_estimate(
    f: &AnalyticFunction,
    p: f64,
    side: Side,
    grid: GridSpec,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<HpNormEstimate> {
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("p must be positive, got {p}")));
    }
    let contours = grid.contours(side, g.sigma);
    let rows: Vec<Result<(f64, f64, f64)>> = par::map_collect(&contours, |c| {
        let m = if p.is_infinite() {
            sup_norm_on_contour(f, c)
        } else {
            lp_norm_on_contour(|z| f.eval(z), p, c, spec).map(|n| n.value)
        }?;
        Ok((c.s, c.t, m))
    });
    let mut grid_rows = Vec::with_capacity(rows.len());
    for r in rows {
        grid_rows.push(r?);
    }
    let values: Vec<f64> = grid_rows.iter().map(|r| r.2).collect();
    let value = values.iter().copied().fold(0.0, f64::max);

    // super-linear growth heuristic on the last few refinement steps
    let mut divergent = false;
    if values.len() >= 4 {
        let k = values.len();
        let tail_ratios = [
            values[k - 1] / values[k - 2].max(1e-300),
            values[k - 2] / values[k - 3].max(1e-300),
            values[k - 3] / values[k - 4].max(1e-300),
        ];
        if tail_ratios.iter().all(|&r| r > 1.2) {
            divergent = true;
        }
    }
    Ok(HpNormEstimate {
        p,
        side,
        value,
        grid: grid_rows,
        refinement_trend: trend_of(&values),
        divergent,
    })
}

/// Leg-wise supremum of `|f|`, sampled densely along each leg with
/// geometric heights on the rays.
fn sup_norm_on_contour(f: &AnalyticFunction, c: &ContourSpec) -> Result<f64> {
    let mut best = 0.0_f64;
    for k in 0..=400 {
        let u = -c.s + 2.0 * c.s * (k as f64) / 400.0;
        best = best.max(f.eval(Complex64::new(u, c.t)).norm());
    }
    for k in 0..=400 {
        let v = c.t + 1e-3 * (1e7_f64).powf(k as f64 / 400.0);
        best = best.max(f.eval(Complex64::new(-c.s, v)).norm());
        best = best.max(f.eval(Complex64::new(c.s, v)).norm());
    }
    if !best.is_finite() {
        return Err(Error::Truncation("sup norm sample is not finite".into()));
    }
    Ok(best)
}

/// One pointwise-bound violation row.
#[derive(Clone, Debug)]
pub struct PointwiseRow {
    pub w: Complex64,
    pub observed: f64,
    pub allowed: f64,
}

/// Report of the interior growth bound
/// `|F(w)| <= (2/pi)^{1/p} ||F|| rho(w)^{-1/p}`.
#[derive(Clone, Debug)]
pub struct PointwiseBoundReport {
    pub norm_used: f64,
    pub rows: Vec<PointwiseRow>,
    /// Max over samples of `observed/allowed - 1`, clamped at zero.
    pub max_excess: f64,
}

/// Distance proxy `rho` for the growth bound: `min(sigma - |u|, v)` inside,
/// and the larger of the applicable `|u| - sigma` / `|v|` outside.
pub fn growth_distance(w: Complex64, side: Side, g: &StripGeometry) -> Result<f64> {
    let (u, v) = (w.re, w.im);
    match side {
        Side::Plus => {
            if g.classify(w) != crate::geometry::Region::OmegaPlus {
                return Err(Error::domain("sample must lie in the interior region", w));
            }
            Ok((g.sigma - u.abs()).min(v))
        }
        Side::Minus => {
            if g.classify(w) != crate::geometry::Region::OmegaMinus {
                return Err(Error::domain("sample must lie in the exterior region", w));
            }
            let mut rho = f64::NEG_INFINITY;
            if u.abs() > g.sigma {
                rho = rho.max(u.abs() - g.sigma);
            }
            if v < 0.0 {
                rho = rho.max(-v);
            }
            if rho.is_finite() {
                Ok(rho)
            } else {
                Err(Error::domain("sample is not exterior to the strip", w))
            }
        }
    }
}

/// Check the interior growth bound at every sample, using a grid estimate of
/// the norm when no exact norm is supplied.
pub fn pointwise_bound_check(
    f: &AnalyticFunction,
    p: f64,
    side: Side,
    samples: &[Complex64],
    norm: Option<f64>,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<PointwiseBoundReport> {
    let norm_used = match norm {
        Some(n) => n,
        None => hp_norm_estimate(f, p, side, GridSpec::default(), g, spec)?.value,
    };
    let scale = (2.0 / std::f64::consts::PI).powf(1.0 / p) * norm_used;
    let mut rows = Vec::with_capacity(samples.len());
    let mut max_excess = 0.0_f64;
    for &w in samples {
        let rho = growth_distance(w, side, g)?;
        let allowed = scale * rho.powf(-1.0 / p);
        let observed = f.eval_checked(w, g)?.norm();
        max_excess = max_excess.max(observed / allowed - 1.0);
        rows.push(PointwiseRow {
            w,
            observed,
            allowed,
        });
    }
    Ok(PointwiseBoundReport {
        norm_used,
        rows,
        max_excess: max_excess.max(0.0),
    })
}

/// The explicit constants of the transform bounds at exponent `p`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Constants {
    /// Line transform bound: `A_p = max(p/(p-1), p^{p-1})^{1/p}`.
    pub a_p: f64,
    /// Maximal-function route constant `B_p = 3^{1/p} p/(p-1)`.
    pub b_p: f64,
    /// `B(1/2, (p-1)/2)`, via the Gamma function.
    pub beta_half: f64,
    /// `(5/2)^{1/p}`: interior-side contour bound factor.
    pub five_halves_pow: f64,
    /// `3^{1/p}`: exterior-side contour bound factor.
    pub three_pow: f64,
}

/// Compute the named constants; `p` must lie strictly between 1 and
/// infinity.
pub fn constants(p: f64) -> Result<Constants> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Parameter(format!(
            "constants are defined for 1 < p < infinity, got {p}"
        )));
    }
    use statrs::function::gamma::gamma;
    let a_p = (p / (p - 1.0)).max(p.powf(p - 1.0)).powf(1.0 / p);
    let b_p = 3.0_f64.powf(1.0 / p) * p / (p - 1.0);
    let beta_half = gamma(0.5) * gamma((p - 1.0) / 2.0) / gamma(p / 2.0);
    Ok(Constants {
        a_p,
        b_p,
        beta_half,
        five_halves_pow: 2.5_f64.powf(1.0 / p),
        three_pow: 3.0_f64.powf(1.0 / p),
    })
}

/// A function on the positive half-line, with enough metadata to integrate
/// it and its transform.
#[derive(Clone)]
pub struct LaplaceInput {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Integration stops here when the support is compact.
    support_end: Option<f64>,
}

impl LaplaceInput {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        LaplaceInput {
            eval: Arc::new(eval),
            support_end: None,
        }
    }

    pub fn with_support_end(mut self, end: f64) -> Self {
        self.support_end = Some(end);
        self
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
        let wrapped = |t: f64| Complex64::new(f(t), 0.0);
        let v = match self.support_end {
            Some(end) => crate::quadrature::integrate_finite_interval(&wrapped, 0.0, end, spec)?.0,
            None => {
                let g = |u: f64| {
                    let om = 1.0 - u;
                    wrapped(u / om) / (om * om)
                };
                crate::quadrature::integrate_finite_interval(&g, 0.0, 1.0, spec)?.0
            }
        };
        Ok(v.re)
    }

    pub fn l2_norm(&self, spec: &QuadratureSpec) -> Result<f64> {
        let eval = self.eval.clone();
        let v = self.integrate(|t| eval(t) * eval(t), spec)?;
        Ok(v.max(0.0).sqrt())
    }
}

/// `g(y) = \int_0^infty e^{-yt} f(t) dt` for `y > 0`.
pub fn laplace_transform(f: &LaplaceInput, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Parameter(format!(
            "transform argument must be positive, got {y}"
        )));
    }
    let eval = f.eval.clone();
    f.integrate(move |t| (-y * t).exp() * eval(t), spec)
}

/// `||g||_{L^2} / ||f||_{L^2}` for the transform above; zero for `f = 0`.
pub fn laplace_bound_ratio(f: &LaplaceInput, spec: &QuadratureSpec) -> Result<f64> {
    let nf = f.l2_norm(spec)?;
    if nf == 0.0 {
        return Ok(0.0);
    }
    // ||g||^2 over (0, infinity), by the same substitution route
    let fc = f.clone();
    let sc = spec.clone();
    let g2 = |u: f64| {
        let om = 1.0 - u;
        let y = u / om;
        let gy = laplace_transform(&fc, y, &sc).unwrap_or(f64::NAN);
        Complex64::new(gy * gy / (om * om), 0.0)
    };
    let (v, _, _) = crate::quadrature::integrate_finite_interval(&g2, 0.0, 1.0, spec)?;
    Ok(v.re.max(0.0).sqrt() / nf)
}

/// How a corpus member is built.
#[derive(Clone, Debug)]
enum TestKind {
    /// Sum of terms `coeff / (w - pole)^k`.
    Rational(Vec<(Complex64, Complex64, u32)>),
    /// `e^{i lambda w}`, decaying upward.
    ExpWave(f64),
}

/// A test function with declared membership and closed-form data.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub name: String,
    pub side: Side,
    /// Member of `H^p` for every `p > p_min`.
    pub p_min: f64,
    kind: TestKind,
    sigma: f64,
}

impl TestFunction {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        match &self.kind {
            TestKind::Rational(terms) => terms
                .iter()
                .map(|&(c, pole, k)| c * (w - pole).powi(-(k as i32)))
                .sum(),
            TestKind::ExpWave(lambda) => (Complex64::i() * lambda * w).exp(),
        }
    }

    /// Poles with multiplicities (empty for entire members).
    pub fn poles(&self) -> Vec<(Complex64, u32)> {
        match &self.kind {
            TestKind::Rational(terms) => terms.iter().map(|&(_, p, k)| (p, k)).collect(),
            TestKind::ExpWave(_) => Vec::new(),
        }
    }

    /// Handle declared on the membership side.
    pub fn analytic(&self) -> AnalyticFunction {
        let me = self.clone();
        let tag = match self.side {
            Side::Plus => RegionTag::OmegaPlus,
            Side::Minus => RegionTag::OmegaMinus,
        };
        AnalyticFunction::new(tag, move |w| me.eval(w))
    }

    /// Boundary trace with decay metadata.
    pub fn boundary(&self, g: &StripGeometry) -> Result<BoundaryFunction> {
        let me = self.clone();
        let decay = self.ray_decay();
        let p_class = match &self.kind {
            TestKind::Rational(_) => self.p_min.max(1e-9),
            TestKind::ExpWave(_) => 0.0,
        };
        BoundaryFunction::new(g, move |z| me.eval(z), decay, p_class)
    }

    /// Pointwise decay bound along the rays of the distinguished contour.
    ///
    /// For a pole at `w0`, the distance from a ray point at height `v >= 1`
    /// satisfies `|zeta - w0| >= c v` with
    /// `c = min(1/2, d0 / (2 |w0|))` where `d0` is the distance from the
    /// pole to the nearer ray, so each term obeys an algebraic bound with a
    /// computable coefficient on all sampled heights.
    fn ray_decay(&self) -> TailBound {
        match &self.kind {
            TestKind::Rational(terms) => {
                let qmin = terms.iter().map(|&(_, _, k)| k).min().unwrap_or(1);
                let ray_dist = |w0: Complex64| -> f64 {
                    let d = |x0: f64| {
                        let dx = w0.re - x0;
                        let dy = (-w0.im).max(0.0);
                        (dx * dx + dy * dy).sqrt()
                    };
                    d(-self.sigma).min(d(self.sigma))
                };
                let coeff: f64 = terms
                    .iter()
                    .map(|&(c, w0, k)| {
                        let d0 = ray_dist(w0);
                        let ratio = if w0.norm() < 0.5 {
                            0.5
                        } else {
                            0.5_f64.min(d0 / (2.0 * w0.norm()))
                        };
                        // v^{-k} <= v^{-qmin} on the sampled heights v >= 1
                        c.norm() / ratio.powi(k as i32)
                    })
                    .sum();
                TailBound::algebraic(qmin as f64, coeff.max(1.0))
            }
            TestKind::ExpWave(lambda) => {
                TailBound::exponential(*lambda, (lambda * self.sigma).exp() + 1.0)
            }
        }
    }

    /// Exact `H^p` norm, where one is known in closed form.
    pub fn exact_hp_norm(&self, p: f64) -> Option<f64> {
        match &self.kind {
            TestKind::ExpWave(lambda) => {
                // m(s,t)^p = e^{-lambda p t} (2/(lambda p) + 2 s), sup at the corner
                Some((2.0 / (lambda * p) + 2.0 * self.sigma).powf(1.0 / p))
            }
            _ => None,
        }
    }
}

/// A rational combination with arbitrary pole placement, for boundary data
/// that mixes the two sides. The side tag records where the declared-member
/// part lives; callers that only need the trace can ignore it.
pub fn mixed_rational(
    name: &str,
    side: Side,
    terms: Vec<(Complex64, Complex64, u32)>,
    sigma: f64,
) -> TestFunction {
    TestFunction {
        name: name.to_string(),
        side,
        p_min: 1.0,
        kind: TestKind::Rational(terms),
        sigma,
    }
}

/// The library of exactly representable test functions over a strip of
/// half-width `sigma`: simple and higher-order rationals with poles on
/// either side, exponential waves, and power combinations.
pub fn test_corpus(sigma: f64) -> Vec<TestFunction> {
    let s = sigma;
    let one = Complex64::new(1.0, 0.0);
    let rational = |name: &str, side: Side, p_min: f64, terms: Vec<(Complex64, Complex64, u32)>| {
        TestFunction {
            name: name.to_string(),
            side,
            p_min,
            kind: TestKind::Rational(terms),
            sigma,
        }
    };
    vec![
        // (a) poles in the exterior: members on the plus side, all p > 1/k
        rational(
            "pole(2s)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(2.0 * s, 0.0), 1)],
        ),
        rational(
            "pole(-3s)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(-3.0 * s, 0.0), 1)],
        ),
        rational(
            "pole(2s-is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(2.0 * s, -s), 1)],
        ),
        rational(
            "pole(-1.5s-0.5is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(-1.5 * s, -0.5 * s), 1)],
        ),
        rational(
            "pole(0.3s-2is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(0.3 * s, -2.0 * s), 1)],
        ),
        rational(
            "pole(4s+3is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(4.0 * s, 3.0 * s), 1)],
        ),
        rational(
            "pole(-2s+4is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(-2.0 * s, 4.0 * s), 1)],
        ),
        rational(
            "pole(2.5s+0.5is)",
            Side::Plus,
            1.0,
            vec![(one, Complex64::new(2.5 * s, 0.5 * s), 1)],
        ),
        // (d) the square realizes the power relation: member for p > 1/2
        rational(
            "pole(2s)^2",
            Side::Plus,
            0.5,
            vec![(one, Complex64::new(2.0 * s, 0.0), 2)],
        ),
        rational(
            "mix(2s,-3s)",
            Side::Plus,
            1.0,
            vec![
                (one, Complex64::new(2.0 * s, 0.0), 1),
                (Complex64::new(0.5, 0.5), Complex64::new(-3.0 * s, 0.0), 1),
            ],
        ),
        // (b) mirrored poles in the interior: members on the minus side
        rational(
            "pole(0.5is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(0.0, 0.5 * s), 1)],
        ),
        rational(
            "pole(0.3s+0.2is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(0.3 * s, 0.2 * s), 1)],
        ),
        rational(
            "pole(-0.4s+is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(-0.4 * s, s), 1)],
        ),
        rational(
            "pole(0.5s+0.6is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(0.5 * s, 0.6 * s), 1)],
        ),
        rational(
            "pole(-0.2s+0.7is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(-0.2 * s, 0.7 * s), 1)],
        ),
        rational(
            "pole(0.1s+3is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(0.1 * s, 3.0 * s), 1)],
        ),
        rational(
            "pole(0.5s+1.5is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(0.5 * s, 1.5 * s), 1)],
        ),
        rational(
            "pole(-0.7s+0.4is)",
            Side::Minus,
            1.0,
            vec![(one, Complex64::new(-0.7 * s, 0.4 * s), 1)],
        ),
        rational(
            "mix(0.5is,2is)",
            Side::Minus,
            1.0,
            vec![
                (one, Complex64::new(0.0, 0.5 * s), 1),
                (Complex64::new(0.3, -0.4), Complex64::new(0.0, 2.0 * s), 1),
            ],
        ),
        rational(
            "pole(2is)^2",
            Side::Minus,
            0.5,
            vec![(one, Complex64::new(0.0, 2.0 * s), 2)],
        ),
        // (c) exponential waves, decaying upward
        TestFunction {
            name: "expw(1)".into(),
            side: Side::Plus,
            p_min: 0.0,
            kind: TestKind::ExpWave(1.0),
            sigma,
        },
        TestFunction {
            name: "expw(2)".into(),
            side: Side::Plus,
            p_min: 0.0,
            kind: TestKind::ExpWave(2.0),
            sigma,
        },
    ]
}
