//! The half-strip world: strips `D_{s,t}`, their three-leg boundary contours,
//! arc-length parametrization, the translation maps between the contour
//! family and the fixed line family, approach cones, and point
//! classification.
//!
//! Conventions. The strip `D_{s,t} = {u+iv : |u| < s, v > t}` has boundary
//! legs
//!
//! * leg 1: the ray `{-s+iv : v > t}`, traversed downward,
//! * leg 2: the segment `{u+it : |u| <= s}`, traversed left to right,
//! * leg 3: the ray `{s+iv : v > t}`, traversed upward,
//!
//! so the strip always lies on the left of the contour. The distinguished
//! strip is `D_{sigma,0}` (interior region "plus", exterior "minus"), whose
//! boundary carries the arc-length parameter `b` with `b = 0` at the middle
//! of leg 2; the same corner-anchored convention is used for every `(s,t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the boundary a set or function lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// Exhaustive classification of a point relative to the distinguished strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Interior of the strip `{|u| < sigma, v > 0}`.
    OmegaPlus,
    /// Exterior of the closed strip.
    OmegaMinus,
    /// Left ray `{-sigma + iv : v > 0}`.
    Gamma1,
    /// Bottom segment `{u : |u| < sigma}`.
    Gamma2,
    /// Right ray `{sigma + iv : v > 0}`.
    Gamma3,
    /// One of the two corners `-sigma` (false) or `+sigma` (true).
    Corner(bool),
}

impl Region {
    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            Region::Gamma1 | Region::Gamma2 | Region::Gamma3 | Region::Corner(_)
        )
    }

    pub fn is_corner(self) -> bool {
        matches!(self, Region::Corner(_))
    }
}

/// Index of a contour leg.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    Left,
    Bottom,
    Right,
}

impl Leg {
    pub const ALL: [Leg; 3] = [Leg::Left, Leg::Bottom, Leg::Right];

    pub fn index(self) -> usize {
        match self {
            Leg::Left => 0,
            Leg::Bottom => 1,
            Leg::Right => 2,
        }
    }
}

/// Half-width of the distinguished strip, plus the snap tolerance used to
/// pull slightly-off points onto the boundary when classifying computed
/// values.
#[derive(Clone, Copy, Debug)]
pub struct StripGeometry {
    pub sigma: f64,
    snap_tol: f64,
}

impl StripGeometry {
    /// Geometry with the default snap tolerance `1e-12 * max(1,|w|)`.
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_snap_tol(sigma, 1e-12)
    }

    pub fn with_snap_tol(sigma: f64, snap_tol: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Parameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if !(snap_tol >= 0.0) {
            return Err(Error::Parameter(format!(
                "snap tolerance must be nonnegative, got {snap_tol}"
            )));
        }
        Ok(StripGeometry { sigma, snap_tol })
    }

    fn tol_at(&self, w: Complex64) -> f64 {
        self.snap_tol * w.norm().max(1.0)
    }

    /// Classify `w` as exactly one of interior / exterior / leg / corner.
    ///
    /// A configurable snap tolerance maps near-boundary points onto the
    /// boundary so the classification is usable on computed values.
    pub fn classify(&self, w: Complex64) -> Region {
        let tol = self.tol_at(w);
        let mut u = w.re;
        let mut v = w.im;
        if (u - self.sigma).abs() <= tol {
            u = self.sigma;
        } else if (u + self.sigma).abs() <= tol {
            u = -self.sigma;
        }
        if v.abs() <= tol {
            v = 0.0;
        }
        if u == self.sigma {
            if v == 0.0 {
                Region::Corner(true)
            } else if v > 0.0 {
                Region::Gamma3
            } else {
                Region::OmegaMinus
            }
        } else if u == -self.sigma {
            if v == 0.0 {
                Region::Corner(false)
            } else if v > 0.0 {
                Region::Gamma1
            } else {
                Region::OmegaMinus
            }
        } else if u.abs() < self.sigma {
            if v == 0.0 {
                Region::Gamma2
            } else if v > 0.0 {
                Region::OmegaPlus
            } else {
                Region::OmegaMinus
            }
        } else {
            Region::OmegaMinus
        }
    }

    /// The boundary contour of the distinguished strip.
    pub fn boundary(&self) -> ContourSpec {
        ContourSpec::new(self.sigma, 0.0).expect("sigma validated")
    }

    /// Euclidean distance from `w` to the boundary contour.
    pub fn distance_to_boundary(&self, w: Complex64) -> f64 {
        self.boundary().distance(w)
    }

    /// Distance from a boundary point to the nearest corner.
    pub fn corner_distance(&self, zeta: Complex64) -> f64 {
        let d_plus = (zeta - Complex64::new(self.sigma, 0.0)).norm();
        let d_minus = (zeta - Complex64::new(-self.sigma, 0.0)).norm();
        d_plus.min(d_minus)
    }

    /// Radius within which the cone kernel bound is guaranteed: half the
    /// distance from `zeta0` to the nearest corner, capped by `sigma`.
    pub fn kernel_radius(&self, zeta0: Complex64) -> Result<f64> {
        if self.classify(zeta0).is_corner() {
            return Err(Error::domain("kernel radius undefined at a corner", zeta0));
        }
        if !self.classify(zeta0).is_boundary() {
            return Err(Error::domain("point is not on the boundary", zeta0));
        }
        Ok((self.corner_distance(zeta0) / 2.0).min(self.sigma))
    }
}

/// A boundary contour of `D_{s,t}`: two vertical rays and a bottom segment,
/// oriented with the strip on the left (or the reverse).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub s: f64,
    pub t: f64,
    reversed: bool,
}

impl ContourSpec {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() || !t.is_finite() {
            return Err(Error::Parameter(format!(
                "contour needs finite s > 0 and finite t, got s={s}, t={t}"
            )));
        }
        Ok(ContourSpec {
            s,
            t,
            reversed: false,
        })
    }

    /// The same legs traversed in the opposite direction.
    pub fn reversed(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// Corner between leg 1 and leg 2.
    pub fn corner_left(&self) -> Complex64 {
        Complex64::new(-self.s, self.t)
    }

    /// Corner between leg 2 and leg 3.
    pub fn corner_right(&self) -> Complex64 {
        Complex64::new(self.s, self.t)
    }

    /// The point at signed arc length `b`, with `b = 0` at the middle of the
    /// bottom segment. Total on reals.
    pub fn point_at(&self, b: f64) -> Complex64 {
        if b < -self.s {
            Complex64::new(-self.s, self.t + (-b - self.s))
        } else if b <= self.s {
            Complex64::new(b, self.t)
        } else {
            Complex64::new(self.s, self.t + (b - self.s))
        }
    }

    /// Which leg the parameter `b` falls on (corners belong to the segment).
    pub fn leg_of_param(&self, b: f64) -> Leg {
        if b < -self.s {
            Leg::Left
        } else if b <= self.s {
            Leg::Bottom
        } else {
            Leg::Right
        }
    }

    /// Arc-length parameter of a point on the contour.
    pub fn param_of_point(&self, zeta: Complex64, tol: f64) -> Result<f64> {
        let (u, v) = (zeta.re, zeta.im);
        if (v - self.t).abs() <= tol && u.abs() <= self.s + tol {
            return Ok(u.clamp(-self.s, self.s));
        }
        if (u + self.s).abs() <= tol && v >= self.t - tol {
            return Ok(-self.s - (v - self.t).max(0.0));
        }
        if (u - self.s).abs() <= tol && v >= self.t - tol {
            return Ok(self.s + (v - self.t).max(0.0));
        }
        Err(Error::domain("point is not on the contour", zeta))
    }

    /// Euclidean distance from `w` to the contour.
    pub fn distance(&self, w: Complex64) -> f64 {
        let (u, v) = (w.re, w.im);
        // leg 2: segment [-s, s] at height t
        let d2 = {
            let du = (u.abs() - self.s).max(0.0);
            (du * du + (v - self.t) * (v - self.t)).sqrt()
        };
        // legs 1 and 3: rays upward from the corners
        let dray = |x0: f64| -> f64 {
            let dv = (self.t - v).max(0.0);
            ((u - x0) * (u - x0) + dv * dv).sqrt()
        };
        d2.min(dray(-self.s)).min(dray(self.s))
    }
}

/// Map a point of the fixed line family (vertical lines at `±sigma` above
/// height `t`, plus the real-axis segment `|u| <= s`) onto the matching leg
/// of the contour of `D_{s,t}`: horizontal translation by `sigma - s` on the
/// rays, vertical translation by `t` on the segment.
pub fn translate_to_contour(
    zeta: Complex64,
    s: f64,
    t: f64,
    g: &StripGeometry,
) -> Result<Complex64> {
    let tol = g.tol_at(zeta);
    let (u, v) = (zeta.re, zeta.im);
    if (u + g.sigma).abs() <= tol {
        if v > t {
            return Ok(Complex64::new(-s, v));
        }
        return Err(Error::domain("line point lies below the cut height", zeta));
    }
    if (u - g.sigma).abs() <= tol {
        if v > t {
            return Ok(Complex64::new(s, v));
        }
        return Err(Error::domain("line point lies below the cut height", zeta));
    }
    if v.abs() <= tol && u.abs() <= s + tol {
        return Ok(Complex64::new(u.clamp(-s, s), t));
    }
    Err(Error::domain("point is not on the line family", zeta))
}

/// Inverse of [`translate_to_contour`]: contour point back to the line family.
pub fn translate_to_lines(w: Complex64, s: f64, t: f64, g: &StripGeometry) -> Result<Complex64> {
    let c = ContourSpec::new(s, t)?;
    let tol = g.tol_at(w);
    let b = c.param_of_point(w, tol)?;
    match c.leg_of_param(b) {
        Leg::Left => Ok(Complex64::new(-g.sigma, w.im)),
        Leg::Bottom => Ok(Complex64::new(w.re.clamp(-s, s), 0.0)),
        Leg::Right => Ok(Complex64::new(g.sigma, w.im)),
    }
}

/// Open approach cone with vertex on the boundary (never at a corner).
///
/// The cone opens into the interior region for `Side::Plus` and into the
/// exterior for `Side::Minus`; its axis is normal to the leg carrying the
/// vertex and `alpha` is the slope of its walls.
#[derive(Clone, Copy, Debug)]
pub struct Cone {
    pub vertex: Complex64,
    pub alpha: f64,
    pub side: Side,
    leg: Leg,
}

impl Cone {
    pub fn new(vertex: Complex64, alpha: f64, side: Side, g: &StripGeometry) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!(
                "cone aperture must be positive, got {alpha}"
            )));
        }
        let leg = match g.classify(vertex) {
            Region::Gamma1 => Leg::Left,
            Region::Gamma2 => Leg::Bottom,
            Region::Gamma3 => Leg::Right,
            Region::Corner(_) => {
                return Err(Error::domain("cones are not defined at corners", vertex))
            }
            _ => return Err(Error::domain("cone vertex must lie on the boundary", vertex)),
        };
        Ok(Cone {
            vertex,
            alpha,
            side,
            leg,
        })
    }

    /// Unit vector along the cone axis.
    pub fn axis(&self) -> Complex64 {
        let inward = match self.leg {
            Leg::Left => Complex64::new(1.0, 0.0),
            Leg::Bottom => Complex64::new(0.0, 1.0),
            Leg::Right => Complex64::new(-1.0, 0.0),
        };
        match self.side {
            Side::Plus => inward,
            Side::Minus => -inward,
        }
    }

    /// Open membership test; the vertex itself is not a member.
    pub fn contains(&self, w: Complex64) -> bool {
        let mut d = w - self.vertex;
        if self.side == Side::Minus {
            d = -d;
        }
        match self.leg {
            Leg::Left => d.re > 0.0 && d.im.abs() < self.alpha * d.re,
            Leg::Bottom => d.im > 0.0 && d.re.abs() < self.alpha * d.im,
            Leg::Right => d.re < 0.0 && d.im.abs() < -self.alpha * d.re,
        }
    }
}

/// The constant `C` in the chord-arc comparison
/// `|zeta(b) - zeta(b0)| >= C |b - b0|` on the distinguished boundary:
/// `C = min{ sigma / sqrt(b0^2 + sigma^2), 1/sqrt(2) }`.
pub fn chord_arc_constant(b0: f64, g: &StripGeometry) -> Result<f64> {
    if (b0.abs() - g.sigma).abs() <= g.tol_at(Complex64::new(b0, 0.0)) {
        return Err(Error::domain(
            "chord-arc constant undefined at a corner parameter",
            g.boundary().point_at(b0),
        ));
    }
    let c1 = g.sigma / (b0 * b0 + g.sigma * g.sigma).sqrt();
    Ok(c1.min(std::f64::consts::FRAC_1_SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contour_point_distinguished_boundary() {
        let gamma = ContourSpec::new(1.0, 0.0).unwrap();
        assert_eq!(gamma.point_at(0.0), c(0.0, 0.0));
        assert_eq!(gamma.point_at(2.0), c(1.0, 1.0));
        assert_eq!(gamma.point_at(-1.5), c(-1.0, 0.5));
        // corners sit exactly at b = ±s
        assert_eq!(gamma.point_at(1.0), c(1.0, 0.0));
        assert_eq!(gamma.point_at(-1.0), c(-1.0, 0.0));
    }

    #[test]
    fn contour_point_general_family() {
        let gamma = ContourSpec::new(0.5, 0.3).unwrap();
        assert!((gamma.point_at(0.2) - c(0.2, 0.3)).norm() < 1e-15);
        assert!((gamma.point_at(1.5) - c(0.5, 1.3)).norm() < 1e-15);
        assert!((gamma.point_at(-0.7) - c(-0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn arc_length_is_isometric_on_each_leg() {
        let gamma = ContourSpec::new(0.8, -0.4).unwrap();
        for (b1, b2) in [(-5.0, -1.2), (-0.7, 0.7), (1.1, 9.0)] {
            let chord = (gamma.point_at(b2) - gamma.point_at(b1)).norm();
            assert!((chord - (b2 - b1)).abs() < 1e-14);
        }
    }

    #[test]
    fn param_of_point_round_trip() {
        let gamma = ContourSpec::new(1.3, 0.2).unwrap();
        for b in [-7.5, -1.31, -0.4, 0.0, 1.2999, 4.0] {
            let z = gamma.point_at(b);
            let back = gamma.param_of_point(z, 1e-12).unwrap();
            assert!((back - b).abs() < 1e-12, "b={b} back={back}");
        }
        assert!(gamma.param_of_point(c(0.0, 5.0), 1e-12).is_err());
    }

    #[test]
    fn classify_examples() {
        let g = StripGeometry::new(1.0).unwrap();
        assert_eq!(g.classify(c(0.0, 0.5)), Region::OmegaPlus);
        assert_eq!(g.classify(c(2.0, 0.0)), Region::OmegaMinus);
        assert_eq!(g.classify(c(1.0, 0.0)), Region::Corner(true));
        assert_eq!(g.classify(c(-1.0, 0.0)), Region::Corner(false));
        assert_eq!(g.classify(c(-1.0, 2.0)), Region::Gamma1);
        assert_eq!(g.classify(c(0.3, 0.0)), Region::Gamma2);
        assert_eq!(g.classify(c(1.0, 0.1)), Region::Gamma3);
        assert_eq!(g.classify(c(0.0, -0.1)), Region::OmegaMinus);
        assert_eq!(g.classify(c(1.0, -0.1)), Region::OmegaMinus);
    }

    #[test]
    fn classify_snaps_near_boundary_points() {
        let g = StripGeometry::new(1.0).unwrap();
        assert_eq!(g.classify(c(1.0 + 1e-14, 0.5)), Region::Gamma3);
        assert_eq!(g.classify(c(0.2, -1e-14)), Region::Gamma2);
        assert_eq!(g.classify(c(1.0 - 1e-14, 1e-14)), Region::Corner(true));
    }

    #[test]
    fn strip_nesting() {
        // every boundary point of a smaller strip is interior to a larger one
        let g_big = StripGeometry::new(2.0).unwrap();
        let inner = ContourSpec::new(1.0, 0.5).unwrap();
        for k in 0..200 {
            let b = -20.0 + 40.0 * (k as f64) / 199.0;
            let w = inner.point_at(b);
            assert_eq!(g_big.classify(w), Region::OmegaPlus, "w={w}");
        }
    }

    #[test]
    fn translate_examples() {
        let g = StripGeometry::new(1.0).unwrap();
        let w = translate_to_contour(c(-1.0, 3.0), 0.5, 0.2, &g).unwrap();
        assert_eq!(w, c(-0.5, 3.0));
        let w = translate_to_contour(c(0.0, 0.0), 0.5, 0.2, &g).unwrap();
        assert_eq!(w, c(0.0, 0.2));
        assert!(translate_to_contour(c(0.7, 0.3), 0.5, 0.2, &g).is_err());
    }

    #[test]
    fn translate_round_trip_and_isometry() {
        use rand::{Rng, SeedableRng};
        let g = StripGeometry::new(1.0).unwrap();
        let (s, t) = (0.6, -0.3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gamma_st = ContourSpec::new(s, t).unwrap();
        let mut prev: Option<(Complex64, Complex64, Leg)> = None;
        for _ in 0..100 {
            let b: f64 = rng.gen_range(-8.0..8.0);
            let zeta = {
                // sample the line family through the contour's own parameter
                let w = gamma_st.point_at(b);
                translate_to_lines(w, s, t, &g).unwrap()
            };
            let w = translate_to_contour(zeta, s, t, &g).unwrap();
            let back = translate_to_lines(w, s, t, &g).unwrap();
            assert!((back - zeta).norm() < 1e-12);
            let leg = gamma_st.leg_of_param(b);
            if let Some((z0, w0, leg0)) = prev {
                if leg0 == leg {
                    assert!(((w - w0).norm() - (zeta - z0).norm()).abs() < 1e-12);
                }
            }
            prev = Some((zeta, w, leg));
        }
    }

    #[test]
    fn cone_membership() {
        let g = StripGeometry::new(1.0).unwrap();
        let k = Cone::new(c(0.0, 0.0), 1.0, Side::Plus, &g).unwrap();
        assert!(k.contains(c(0.1, 0.5)));
        assert!(!k.contains(c(0.6, 0.5)));
        assert!(!k.contains(c(0.0, 0.0)), "vertex is not a member");

        let k = Cone::new(c(-1.0, 1.0), 0.5, Side::Plus, &g).unwrap();
        assert!(k.contains(c(-0.8, 1.05)));
        assert!(!k.contains(c(-0.8, 1.15)));

        let k = Cone::new(c(1.0, 1.0), 0.5, Side::Minus, &g).unwrap();
        assert!(k.contains(c(1.2, 1.05)));

        assert!(Cone::new(c(1.0, 0.0), 1.0, Side::Plus, &g).is_err());
    }

    #[test]
    fn chord_arc_values_and_inequality() {
        let g = StripGeometry::new(1.0).unwrap();
        let gamma = g.boundary();
        let c0 = chord_arc_constant(0.0, &g).unwrap();
        assert!((c0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let c2 = chord_arc_constant(-2.0, &g).unwrap();
        assert!((c2 - 1.0 / 5.0_f64.sqrt()).abs() < 1e-15);
        assert!(chord_arc_constant(1.0, &g).is_err());

        for &b0 in &[0.0, -2.0, 3.7, -0.99] {
            let cc = chord_arc_constant(b0, &g).unwrap();
            let z0 = gamma.point_at(b0);
            for k in 0..2000 {
                let b = -50.0 + 100.0 * (k as f64) / 1999.0;
                let lhs = (gamma.point_at(b) - z0).norm();
                assert!(
                    lhs >= cc * (b - b0).abs() - 1e-12,
                    "violated at b0={b0}, b={b}"
                );
            }
        }
    }

    #[test]
    fn distance_to_contour() {
        let gamma = ContourSpec::new(1.0, 0.0).unwrap();
        assert!((gamma.distance(c(0.0, 0.5)) - 0.5).abs() < 1e-15);
        assert!((gamma.distance(c(3.0, 0.0)) - 2.0).abs() < 1e-15);
        assert!((gamma.distance(c(0.0, -2.0)) - 2.0).abs() < 1e-15);
        assert!((gamma.distance(c(2.0, -1.0)) - 2.0_f64.sqrt()).abs() < 1e-15);
    }
}
