//! Cauchy transforms on the boundary contour and on lines, the symmetric
//! limit kernel, non-tangential boundary limits, the jump decomposition, the
//! half-plane splitting, boundary-membership evidence, and orthogonality
//! pairings.
//!
//! Everything here works strictly off the contour: boundary values are
//! reached only through non-tangential limits, never by principal-value
//! integration on the contour itself.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Cone, ContourSpec, Leg, Region, Side, StripGeometry};
use crate::quadrature::{
    integrate_contour, integrate_leg, integrate_real_line, lp_norm_on_contour, LpNorm,
    QuadratureSpec, TailBound,
};

const TWO_PI_I_INV: Complex64 = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));

type EvalFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A complex-valued function on the boundary contour, with decay metadata
/// for the two rays and a declared integrability exponent.
#[derive(Clone)]
pub struct BoundaryFunction {
    eval: EvalFn,
    decay: TailBound,
    /// Declared: the function is in `L^p` of the contour for `p > p_class`.
    p_class: f64,
    sigma: f64,
}

impl BoundaryFunction {
    /// Build a boundary function and verify that the declared decay bound
    /// dominates `|F|` at 20 sampled heights on each ray.
    pub fn new(
        g: &StripGeometry,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        decay: TailBound,
        p_class: f64,
    ) -> Result<Self> {
        let f = BoundaryFunction {
            eval: Arc::new(eval),
            decay,
            p_class,
            sigma: g.sigma,
        };
        for ray in [-g.sigma, g.sigma] {
            for k in 0..20 {
                let v = 1.0 * 2.0_f64.powi(k);
                let sample = (f.eval)(Complex64::new(ray, v)).norm();
                if !sample.is_finite() {
                    return Err(Error::NonFiniteSample {
                        point: Complex64::new(ray, v),
                    });
                }
                let bound = f.decay_bound(v);
                if sample > bound * (1.0 + 1e-9) + 1e-300 {
                    return Err(Error::Truncation(format!(
                        "declared decay fails to dominate |F| at height {v}: \
                         {sample:.3e} > {bound:.3e}"
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        (self.eval)(zeta)
    }

    pub fn p_class(&self) -> f64 {
        self.p_class
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn decay_bound(&self, v: f64) -> f64 {
        match &self.decay {
            TailBound::Algebraic { exponent, coeff } => coeff * v.powf(-exponent),
            TailBound::Exponential { rate, coeff } => coeff * (-rate * v).exp(),
            TailBound::Custom(b) => b(v),
        }
    }

    /// Tail bound for `|F|^p`, where one exists in closed form.
    pub fn power_tail(&self, p: f64) -> Option<TailBound> {
        match &self.decay {
            TailBound::Algebraic { exponent, coeff } => Some(TailBound::Algebraic {
                exponent: exponent * p,
                coeff: coeff.powf(p),
            }),
            TailBound::Exponential { rate, coeff } => Some(TailBound::Exponential {
                rate: rate * p,
                coeff: coeff.powf(p),
            }),
            TailBound::Custom(_) => None,
        }
    }

    /// `L^p` norm of the function over the boundary contour.
    pub fn trace_norm(&self, p: f64, g: &StripGeometry, spec: &QuadratureSpec) -> Result<LpNorm> {
        let eval = self.eval.clone();
        lp_norm_on_contour(move |z| eval(z), p, &g.boundary(), spec)
    }
}

/// Open regions a function handle may be declared analytic on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionTag {
    OmegaPlus,
    OmegaMinus,
    UpperHalfPlane,
    LowerHalfPlane,
    /// `{Re w > c}`
    RightOf(f64),
    /// `{Re w < c}`
    LeftOf(f64),
}

impl RegionTag {
    pub fn contains(self, w: Complex64, g: &StripGeometry) -> bool {
        match self {
            RegionTag::OmegaPlus => g.classify(w) == Region::OmegaPlus,
            RegionTag::OmegaMinus => g.classify(w) == Region::OmegaMinus,
            RegionTag::UpperHalfPlane => w.im > 0.0,
            RegionTag::LowerHalfPlane => w.im < 0.0,
            RegionTag::RightOf(c) => w.re > c,
            RegionTag::LeftOf(c) => w.re < c,
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            RegionTag::OmegaPlus => Some(Side::Plus),
            RegionTag::OmegaMinus => Some(Side::Minus),
            _ => None,
        }
    }
}

/// A complex-valued function with a declared open region of analyticity.
/// Evaluating outside the region is a contract violation.
#[derive(Clone)]
pub struct AnalyticFunction {
    eval: EvalFn,
    region: RegionTag,
}

impl AnalyticFunction {
    pub fn new(
        region: RegionTag,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticFunction {
            eval: Arc::new(eval),
            region,
        }
    }

    pub fn region(&self) -> RegionTag {
        self.region
    }

    /// Evaluate after checking the region contract.
    pub fn eval_checked(&self, w: Complex64, g: &StripGeometry) -> Result<Complex64> {
        if !self.region.contains(w, g) {
            return Err(Error::domain(
                format!("evaluation outside declared region {:?}", self.region),
                w,
            ));
        }
        Ok((self.eval)(w))
    }

    /// Evaluate without the region check.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        (self.eval)(w)
    }
}

/// The Cauchy transform `(2 pi i)^{-1} \int F(zeta) / (zeta - w) d(zeta)`
/// over the boundary contour, for `w` off the contour.
pub fn cauchy_transform(
    f: &BoundaryFunction,
    w: Complex64,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    cauchy_transform_detailed(f, w, g, spec).map(|(v, _)| v)
}

/// As [`cauchy_transform`], also returning the propagated quadrature error
/// estimate.
pub fn cauchy_transform_detailed(
    f: &BoundaryFunction,
    w: Complex64,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    // absolute distance, not the |w|-scaled classification snap: far-away
    // evaluation points near a ray's direction are regular
    if g.distance_to_boundary(w) <= 1e-12 * g.sigma.max(1.0) {
        return Err(Error::Singular {
            what: "Cauchy transform evaluated on the contour".into(),
            point: w,
        });
    }
    let eval = &f.eval;
    let q = integrate_contour(|z| eval(z) / (z - w), &g.boundary(), spec)?;
    Ok((
        TWO_PI_I_INV * q.value,
        q.error_estimate * TWO_PI_I_INV.norm(),
    ))
}

/// Straight lines the line transform integrates over.
#[derive(Clone, Copy, Debug)]
pub enum Line {
    /// `{x + i*im : xper real}`, oriented left to right.
    Horizontal { im: f64 },
    /// `{re + i*y}`, oriented bottom to top.
    VerticalUp { re: f64 },
    /// `{re + i*y}`, oriented top to bottom.
    VerticalDown { re: f64 },
}

impl Line {
    /// Point at parameter `x` and the (constant) direction factor `d(zeta)/dx`.
    fn at(self, x: f64) -> Complex64 {
        match self {
            Line::Horizontal { im } => Complex64::new(x, im),
            Line::VerticalUp { re } | Line::VerticalDown { re } => Complex64::new(re, x),
        }
    }

    fn direction(self) -> Complex64 {
        match self {
            Line::Horizontal { .. } => Complex64::new(1.0, 0.0),
            Line::VerticalUp { .. } => Complex64::new(0.0, 1.0),
            Line::VerticalDown { .. } => Complex64::new(0.0, -1.0),
        }
    }

    fn contains(self, z: Complex64, tol: f64) -> bool {
        match self {
            Line::Horizontal { im } => (z.im - im).abs() <= tol,
            Line::VerticalUp { re } | Line::VerticalDown { re } => (z.re - re).abs() <= tol,
        }
    }

    /// Parameter of the orthogonal projection of `z` onto the line.
    fn project(self, z: Complex64) -> f64 {
        match self {
            Line::Horizontal { .. } => z.re,
            _ => z.im,
        }
    }
}

/// Result of an integral over a full line.
#[derive(Clone, Copy, Debug)]
pub struct LineValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// The Cauchy transform of `f` over a full line, for `z` off the line.
pub fn cauchy_transform_line(
    f: impl Fn(Complex64) -> Complex64,
    line: Line,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<LineValue> {
    if line.contains(z, 1e-12 * z.norm().max(1.0)) {
        return Err(Error::Singular {
            what: "line Cauchy transform evaluated on the line".into(),
            point: z,
        });
    }
    let dir = line.direction();
    let integrand = |x: f64| {
        let zeta = line.at(x);
        f(zeta) / (zeta - z) * dir
    };
    let (value, err, converged) =
        integrate_real_line(&integrand, &[line.project(z)], None, spec)?;
    Ok(LineValue {
        value: TWO_PI_I_INV * value,
        error_estimate: err * TWO_PI_I_INV.norm(),
        converged,
    })
}

/// `L^p` norm along a full line.
#[derive(Clone, Copy, Debug)]
pub struct LineNorm {
    pub value: f64,
    /// Propagated quadrature error, in the units of `value`.
    pub error_estimate: f64,
    pub converged: bool,
}

/// `L^p` norm of `f` along a full line, parametrized by arc length.
pub fn lp_norm_on_line(
    f: impl Fn(Complex64) -> Complex64,
    p: f64,
    line: Line,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<LineNorm> {
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("p must be positive, got {p}")));
    }
    let integrand = |x: f64| Complex64::new(f(line.at(x)).norm().powf(p), 0.0);
    let (value, err, converged) = integrate_real_line(&integrand, breakpoints, None, spec)?;
    let total = value.re.max(0.0);
    let norm = total.powf(1.0 / p);
    // d(m) = d(m^p) * m^{1-p} / p
    let error_estimate = if total > 0.0 {
        err * norm.powf(1.0 - p) / p
    } else {
        err.powf(1.0 / p)
    };
    Ok(LineNorm {
        value: norm,
        error_estimate,
        converged,
    })
}

/// The symmetric two-pole kernel
/// `K_z(zeta, zeta0) = (pi i)^{-1} z / ((zeta - zeta0)^2 - z^2)`.
pub fn pair_kernel(z: Complex64, zeta: Complex64, zeta0: Complex64) -> Result<Complex64> {
    let d = zeta - zeta0;
    let den = d * d - z * z;
    if den.norm() == 0.0 {
        return Err(Error::Singular {
            what: "kernel pole (zeta = zeta0 ± z)".into(),
            point: zeta,
        });
    }
    let pi_i = Complex64::new(0.0, std::f64::consts::PI);
    Ok(z / (pi_i * den))
}

/// `\int K_z(., zeta0)` over the boundary contour. The two kernel poles must
/// straddle the contour: `zeta0 + z` inside, `zeta0 - z` outside.
pub fn kernel_integral(
    z: Complex64,
    zeta0: Complex64,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<crate::quadrature::QuadratureValue> {
    if g.classify(zeta0 + z) != Region::OmegaPlus {
        return Err(Error::domain(
            "kernel pole zeta0 + z must lie in the interior region",
            zeta0 + z,
        ));
    }
    if g.classify(zeta0 - z) != Region::OmegaMinus {
        return Err(Error::domain(
            "kernel pole zeta0 - z must lie in the exterior region",
            zeta0 - z,
        ));
    }
    integrate_contour(
        |zeta| pair_kernel(z, zeta, zeta0).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        &g.boundary(),
        spec,
    )
}

/// Poisson kernel with the bandwidth in the first slot:
/// `(1/pi) a / (a^2 + b^2)` for `a > 0`.
pub fn poisson_kernel(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Parameter(format!(
            "poisson kernel bandwidth must be positive, got {a}"
        )));
    }
    Ok(a / (std::f64::consts::PI * (a * a + b * b)))
}

/// Strictly decreasing radii for a non-tangential approach.
#[derive(Clone, Debug)]
pub struct RadiusSchedule {
    radii: Vec<f64>,
}

impl RadiusSchedule {
    pub fn geometric(r0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(r0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 3 {
            return Err(Error::Parameter(format!(
                "geometric schedule needs r0 > 0, ratio in (0,1), count >= 3; \
                 got r0={r0}, ratio={ratio}, count={count}"
            )));
        }
        let radii = (0..count).map(|k| r0 * ratio.powi(k as i32)).collect();
        Ok(RadiusSchedule { radii })
    }

    pub fn from_radii(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 3 {
            return Err(Error::Parameter("schedule needs at least 3 radii".into()));
        }
        for w in radii.windows(2) {
            if !(w[1] > 0.0 && w[1] < w[0]) {
                return Err(Error::Parameter(
                    "radii must be strictly decreasing and positive".into(),
                ));
            }
        }
        Ok(RadiusSchedule { radii })
    }

    /// Default schedule at a boundary point: `r_k = r0 / 2^k`, `k = 1..20`,
    /// with `r0 = min(0.1, delta/2)` where `delta` is the kernel radius.
    pub fn default_at(zeta0: Complex64, g: &StripGeometry) -> Result<Self> {
        let delta = g.kernel_radius(zeta0)?;
        Self::geometric((delta / 2.0).min(0.1) * 0.5, 0.5, 20)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn ratio(&self) -> f64 {
        self.radii[1] / self.radii[0]
    }
}

/// Approach table and extrapolated limit of a non-tangential approach.
#[derive(Clone, Debug)]
pub struct LimitRecord {
    pub limit: Complex64,
    /// `(r_k, G(zeta0 + z_k))` in schedule order.
    pub table: Vec<(f64, Complex64)>,
    /// False when successive values fail to settle.
    pub converged: bool,
}

/// Approach `zeta0` inside the cone of aperture `alpha` along its bisector,
/// on the side the function is declared on, and Richardson-extrapolate the
/// limit from the approach table.
pub fn nontangential_limit(
    f: &AnalyticFunction,
    zeta0: Complex64,
    alpha: f64,
    schedule: &RadiusSchedule,
    g: &StripGeometry,
) -> Result<LimitRecord> {
    let side = f.region().side().ok_or_else(|| {
        Error::Parameter(format!(
            "non-tangential limits are taken from the two strip regions, \
             got {:?}",
            f.region()
        ))
    })?;
    let cone = Cone::new(zeta0, alpha, side, g)?;
    let axis = cone.axis();
    let mut table = Vec::with_capacity(schedule.radii().len());
    for &r in schedule.radii() {
        let w = zeta0 + axis * r;
        if !cone.contains(w) {
            return Err(Error::domain("approach point left the cone", w));
        }
        let value = f.eval_checked(w, g)?;
        table.push((r, value));
    }

    // two Richardson stages on the last three values, assuming the
    // schedule's geometric ratio
    let rho = schedule.ratio();
    let n = table.len();
    let (g0, g1, g2) = (table[n - 3].1, table[n - 2].1, table[n - 1].1);
    let l1a = (g1 - g0 * rho) / (1.0 - rho);
    let l1b = (g2 - g1 * rho) / (1.0 - rho);
    let limit = (l1b - l1a * rho * rho) / (1.0 - rho * rho);

    // settled when the tail increments shrink
    let mut converged = true;
    let tail = 5.min(n - 1);
    for k in (n - tail)..n {
        let inc = (table[k].1 - table[k - 1].1).norm();
        let prev = (table[k - 1].1 - limit).norm();
        if inc > 2.0 * prev + 1e-13 {
            converged = false;
        }
    }
    Ok(LimitRecord {
        limit,
        table,
        converged,
    })
}

/// Split a boundary function into its analytic continuations: the Cauchy
/// transform restricted to the interior, and its negative restricted to the
/// exterior. Non-tangential traces of the two sum back to the boundary
/// function almost everywhere.
pub fn jump_decompose(
    f: &BoundaryFunction,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> (AnalyticFunction, AnalyticFunction) {
    let (f1, g1, s1) = (f.clone(), *g, spec.clone());
    let plus = AnalyticFunction::new(RegionTag::OmegaPlus, move |w| {
        cauchy_transform(&f1, w, &g1, &s1).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    let (f2, g2, s2) = (f.clone(), *g, spec.clone());
    let minus = AnalyticFunction::new(RegionTag::OmegaMinus, move |w| {
        -cauchy_transform(&f2, w, &g2, &s2).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    (plus, minus)
}

/// Split the Cauchy transform into the three single-leg transforms, each an
/// analytic function on a half-plane containing the interior region; their
/// sum reproduces the full transform there.
pub fn decompose_into_halfplanes(
    f: &BoundaryFunction,
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> [AnalyticFunction; 3] {
    let tags = [
        RegionTag::RightOf(-g.sigma),
        RegionTag::UpperHalfPlane,
        RegionTag::LeftOf(g.sigma),
    ];
    let legs = [Leg::Left, Leg::Bottom, Leg::Right];
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let (fk, gk, sk, leg) = (f.clone(), *g, spec.clone(), legs[k]);
        out.push(AnalyticFunction::new(tags[k], move |w| {
            let eval = |z: Complex64| fk.eval(z) / (z - w);
            match integrate_leg(&eval, &gk.boundary(), leg, &sk) {
                Ok((v, _, _)) => TWO_PI_I_INV * v,
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        }));
    }
    let [a, b, c]: [AnalyticFunction; 3] = out.try_into().ok().expect("three legs");
    [a, b, c]
}

/// Moment integrals of a boundary function at probes in the opposite
/// region; values near zero are evidence that the function is a
/// non-tangential trace from the declared side.
#[derive(Clone, Debug)]
pub struct MembershipEvidence {
    pub max_abs: f64,
    pub values: Vec<(Complex64, Complex64)>,
}

pub fn boundary_membership_test(
    f: &BoundaryFunction,
    side: Side,
    probes: &[Complex64],
    g: &StripGeometry,
    spec: &QuadratureSpec,
) -> Result<MembershipEvidence> {
    let want = match side {
        Side::Plus => Region::OmegaMinus,
        Side::Minus => Region::OmegaPlus,
    };
    for &a in probes {
        if g.classify(a) != want {
            return Err(Error::domain(
                format!("probe must lie in the {want:?} region"),
                a,
            ));
        }
    }
    let values = crate::par::map_collect(probes, |&a| {
        let v = cauchy_transform(f, a, g, spec).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        (a, v)
    });
    let max_abs = values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    Ok(MembershipEvidence { max_abs, values })
}

/// Reproducible default probes: 8 points in the region opposite `side`, all
/// at distance at least 0.5 from the contour (scaled down for thin strips).
pub fn default_membership_probes(side: Side, g: &StripGeometry, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let clearance = 0.5_f64.min(0.4 * g.sigma);
    let mut probes = Vec::with_capacity(8);
    let target = match side {
        Side::Plus => Region::OmegaMinus,
        Side::Minus => Region::OmegaPlus,
    };
    while probes.len() < 8 {
        let w = match side {
            // probes live in the exterior
            Side::Plus => Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
            // probes live in the interior
            Side::Minus => Complex64::new(
                rng.gen_range(-g.sigma..g.sigma),
                rng.gen_range(0.0..4.0 * g.sigma),
            ),
        };
        if g.classify(w) == target && g.distance_to_boundary(w) >= clearance {
            probes.push(w);
        }
    }
    probes
}

/// `\int F G d(zeta)` over the contour `c`.
pub fn orthogonality_pairing(
    f: &BoundaryFunction,
    g2: &BoundaryFunction,
    c: &ContourSpec,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let (fa, fb) = (f.eval.clone(), g2.eval.clone());
    let q = integrate_contour(|z| fa(z) * fb(z), c, spec)?;
    Ok(q.value)
}
