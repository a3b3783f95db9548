//! Finite Blaschke products on the half-planes and their transplants to the
//! strip regions, with convergence-criterion evaluation and
//! boundary-modulus checks.
//!
//! Only finite products are evaluated; a prescribed infinite zero sequence
//! is represented by truncation, with the convergence-criterion partial
//! sums standing in for the tail.

use num_complex::Complex64;

use crate::cauchy::AnalyticFunction;
use crate::conformal::{psi_minus, psi_plus};
use crate::error::{Error, Result};
use crate::geometry::{Region, StripGeometry};

/// Domain a Blaschke product lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlaschkeDomain {
    UpperHalfPlane,
    LowerHalfPlane,
    OmegaPlus,
    OmegaMinus,
}

impl BlaschkeDomain {
    /// The distinguished point whose factors degenerate to the pure Moebius
    /// power: `i` upstairs, `-i` downstairs.
    fn special_point(self) -> Complex64 {
        match self {
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::OmegaPlus => Complex64::i(),
            BlaschkeDomain::LowerHalfPlane | BlaschkeDomain::OmegaMinus => -Complex64::i(),
        }
    }

    pub fn is_half_plane(self) -> bool {
        matches!(
            self,
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::LowerHalfPlane
        )
    }
}

/// A finite Blaschke product with a prescribed zero multiset.
#[derive(Clone, Debug)]
pub struct BlaschkeProduct {
    domain: BlaschkeDomain,
    /// Zeros in the product's own domain, with multiplicity.
    zeros: Vec<Complex64>,
    /// Zeros mapped to the half-plane (identity for half-plane domains).
    plane_zeros: Vec<Complex64>,
    /// Count of mapped zeros equal to the special point.
    m: usize,
    sigma: f64,
}

const SPECIAL_TOL: f64 = 1e-12;

impl BlaschkeProduct {
    /// Build a product on the chosen domain; every zero must classify
    /// strictly inside it.
    pub fn new(domain: BlaschkeDomain, zeros: Vec<Complex64>, g: &StripGeometry) -> Result<Self> {
        let mut plane_zeros = Vec::with_capacity(zeros.len());
        for &w in &zeros {
            let inside = match domain {
                BlaschkeDomain::UpperHalfPlane => w.im > 0.0,
                BlaschkeDomain::LowerHalfPlane => w.im < 0.0,
                BlaschkeDomain::OmegaPlus => g.classify(w) == Region::OmegaPlus,
                BlaschkeDomain::OmegaMinus => g.classify(w) == Region::OmegaMinus,
            };
            if !inside {
                return Err(Error::domain("Blaschke zero outside its domain", w));
            }
            let z = match domain {
                BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::LowerHalfPlane => w,
                BlaschkeDomain::OmegaPlus => psi_plus(w, g.sigma),
                BlaschkeDomain::OmegaMinus => psi_minus(w, g.sigma)?,
            };
            plane_zeros.push(z);
        }
        let special = domain.special_point();
        let m = plane_zeros
            .iter()
            .filter(|z| (*z - special).norm() <= SPECIAL_TOL)
            .count();
        Ok(BlaschkeProduct {
            domain,
            zeros,
            plane_zeros,
            m,
            sigma: g.sigma,
        })
    }

    pub fn domain(&self) -> BlaschkeDomain {
        self.domain
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    /// Evaluate at a point of the closed domain.
    pub fn eval(&self, point: Complex64) -> Result<Complex64> {
        let z = match self.domain {
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::LowerHalfPlane => point,
            BlaschkeDomain::OmegaPlus => psi_plus(point, self.sigma),
            BlaschkeDomain::OmegaMinus => psi_minus(point, self.sigma)?,
        };
        self.eval_plane(z)
    }

    /// Evaluate the underlying half-plane product.
    fn eval_plane(&self, z: Complex64) -> Result<Complex64> {
        let special = self.domain.special_point();
        let moebius = (z - special) / (z + special);
        let mut out = moebius.powi(self.m as i32);
        for &zn in &self.plane_zeros {
            if (zn - special).norm() <= SPECIAL_TOL {
                continue;
            }
            let pole = zn.conj();
            let den = z - pole;
            if den.norm() == 0.0 {
                return Err(Error::Singular {
                    what: "Blaschke factor pole (conjugate-reflected zero)".into(),
                    point: z,
                });
            }
            out *= unimodular_phase(zn) * (z - zn) / den;
        }
        Ok(out)
    }

    /// Wrap as an analytic handle on the matching region tag.
    pub fn analytic(&self) -> AnalyticFunction {
        let me = self.clone();
        let tag = match self.domain {
            BlaschkeDomain::UpperHalfPlane => crate::cauchy::RegionTag::UpperHalfPlane,
            BlaschkeDomain::LowerHalfPlane => crate::cauchy::RegionTag::LowerHalfPlane,
            BlaschkeDomain::OmegaPlus => crate::cauchy::RegionTag::OmegaPlus,
            BlaschkeDomain::OmegaMinus => crate::cauchy::RegionTag::OmegaMinus,
        };
        AnalyticFunction::new(tag, move |w| {
            me.eval(w).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
    }
}

/// The factor normalization `|z^2+1| / (z^2+1)` as a unit phase, computed
/// through argument arithmetic so huge zeros cannot overflow.
fn unimodular_phase(zn: Complex64) -> Complex64 {
    let phase = if zn.norm() > 1e100 {
        let mut a = -2.0 * zn.arg();
        while a > std::f64::consts::PI {
            a -= 2.0 * std::f64::consts::PI;
        }
        while a <= -std::f64::consts::PI {
            a += 2.0 * std::f64::consts::PI;
        }
        a
    } else {
        -(zn * zn + Complex64::new(1.0, 0.0)).arg()
    };
    Complex64::from_polar(1.0, phase)
}

/// Summability verdict for a prescribed zero sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummabilityVerdict {
    SummableEvidence,
    DivergentEvidence,
}

/// Partial sums of the Blaschke convergence series with a divergence
/// heuristic.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub sum: f64,
    pub terms: usize,
    pub verdict: SummabilityVerdict,
}

/// Sum `y_n / (1 + |z_n|^2)` over the (mapped) zeros, comparing the tail
/// increments against a harmonic-like profile to flag divergence.
pub fn convergence_criterion(
    zeros: &[Complex64],
    domain: BlaschkeDomain,
    g: &StripGeometry,
) -> Result<ConvergenceRecord> {
    let mut mapped = Vec::with_capacity(zeros.len());
    for &w in zeros {
        let z = match domain {
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::LowerHalfPlane => w,
            BlaschkeDomain::OmegaPlus => psi_plus(w, g.sigma),
            BlaschkeDomain::OmegaMinus => psi_minus(w, g.sigma)?,
        };
        mapped.push(z);
    }
    let term = |z: Complex64| -> f64 {
        let y = match domain {
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::OmegaPlus => z.im,
            BlaschkeDomain::LowerHalfPlane | BlaschkeDomain::OmegaMinus => -z.im,
        };
        y / (1.0 + z.norm_sqr())
    };
    let partial: Vec<f64> = mapped
        .iter()
        .scan(0.0, |acc, &z| {
            *acc += term(z);
            Some(*acc)
        })
        .collect();
    let n = partial.len();
    let sum = partial.last().copied().unwrap_or(0.0);
    let verdict = if n < 8 {
        SummabilityVerdict::SummableEvidence
    } else {
        let d2 = partial[n - 1] - partial[n / 2 - 1];
        let d1 = partial[n / 2 - 1] - partial[n / 4 - 1];
        if d2 > 1e-10 && d2 >= 0.5 * d1 {
            SummabilityVerdict::DivergentEvidence
        } else {
            SummabilityVerdict::SummableEvidence
        }
    };
    Ok(ConvergenceRecord {
        sum,
        terms: n,
        verdict,
    })
}

/// A function handle bundled with its declared zero multiset.
#[derive(Clone)]
pub struct ZeroTaggedFunction {
    pub f: AnalyticFunction,
    pub zeros: Vec<Complex64>,
}

/// Result of the factorization boundary-modulus check.
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// Max over probes of `| |F| - |F/B| | / |F|`.
    pub boundary_max_dev: f64,
    /// Quotient stayed finite and nonzero on small rings around the former
    /// zeros.
    pub removable_ok: bool,
    pub probes: usize,
}

/// Check that dividing out the Blaschke product of `f`'s zeros preserves the
/// boundary modulus and removes the zeros without leaving poles.
pub fn factorization_modulus_check(
    f: &ZeroTaggedFunction,
    b: &BlaschkeProduct,
    probes: &[Complex64],
    g: &StripGeometry,
) -> Result<FactorizationReport> {
    if f.zeros.len() != b.zeros().len()
        || f.zeros.iter().any(|z| {
            !b.zeros().iter().any(|bz| (z - bz).norm() < 1e-10)
        })
    {
        return Err(Error::Contract(
            "Blaschke zero set does not match the declared zeros of the function".into(),
        ));
    }
    let on_boundary = |w: Complex64| -> bool {
        match b.domain() {
            BlaschkeDomain::UpperHalfPlane | BlaschkeDomain::LowerHalfPlane => w.im == 0.0,
            BlaschkeDomain::OmegaPlus | BlaschkeDomain::OmegaMinus => {
                let r = g.classify(w);
                r.is_boundary() && !r.is_corner()
            }
        }
    };
    let mut max_dev = 0.0_f64;
    for &w in probes {
        if !on_boundary(w) {
            return Err(Error::domain("probe must be a non-corner boundary point", w));
        }
        let fv = f.f.eval(w).norm();
        let bv = b.eval(w)?;
        let qv = (f.f.eval(w) / bv).norm();
        if fv > 1e-300 {
            max_dev = max_dev.max((fv - qv).abs() / fv);
        }
    }

    // the quotient should have a finite nonzero limit at each former zero
    let mut removable_ok = true;
    for &z0 in &f.zeros {
        let eps = 1e-5;
        let mut ring = Vec::new();
        for k in 0..4 {
            let ang = std::f64::consts::FRAC_PI_2 * k as f64 + 0.3;
            let w = z0 + Complex64::from_polar(eps, ang);
            let q = f.f.eval(w) / b.eval(w)?;
            if !q.re.is_finite() || !q.im.is_finite() {
                removable_ok = false;
                continue;
            }
            ring.push(q.norm());
        }
        let lo = ring.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ring.iter().copied().fold(0.0, f64::max);
        if !(lo > 1e-8) || !(hi / lo < 3.0) {
            removable_ok = false;
        }
    }
    Ok(FactorizationReport {
        boundary_max_dev: max_dev,
        removable_ok,
        probes: probes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn geom() -> StripGeometry {
        StripGeometry::new(1.0).unwrap()
    }

    #[test]
    fn single_zero_at_the_special_point() {
        let g = geom();
        let b =
            BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, vec![Complex64::i()], &g).unwrap();
        let v = b.eval(c64(0.0, 2.0)).unwrap();
        assert!((v - c64(1.0 / 3.0, 0.0)).norm() < 1e-15, "got {v}");
        let v = b.eval(Complex64::i()).unwrap();
        assert_eq!(v, Complex64::default());
    }

    #[test]
    fn transplanted_zero_is_unimodular_on_the_contour() {
        let g = geom();
        let w1 = crate::conformal::phi_plus(Complex64::i(), 1.0);
        let b = BlaschkeProduct::new(BlaschkeDomain::OmegaPlus, vec![w1], &g).unwrap();
        let v = b.eval(c64(0.3, 0.0)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10, "|B| = {}", v.norm());
        // and the zero is where it was prescribed
        assert!(b.eval(w1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn interior_contraction_and_boundary_modulus() {
        let g = geom();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let zeros = vec![
            c64(0.0, 1.0),
            c64(2.0, 0.5),
            c64(-1.5, 2.0),
            c64(0.3, 0.01),
            c64(10.0, 3.0),
        ];
        let b = BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, zeros, &g).unwrap();
        for _ in 0..1000 {
            let z = c64(rng.gen_range(-20.0..20.0), rng.gen_range(1e-4..20.0));
            let v = b.eval(z).unwrap();
            assert!(v.norm() < 1.0, "interior point {z} gave |B| = {}", v.norm());
        }
        for _ in 0..1000 {
            let x = rng.gen_range(-50.0..50.0);
            let v = b.eval(c64(x, 0.0)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-10, "x={x}: |B| = {}", v.norm());
        }
    }

    #[test]
    fn strip_products_on_both_sides() {
        let g = geom();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        let bp = BlaschkeProduct::new(
            BlaschkeDomain::OmegaPlus,
            vec![c64(0.0, 0.5), c64(0.4, 1.2), c64(-0.6, 0.3)],
            &g,
        )
        .unwrap();
        let bm = BlaschkeProduct::new(
            BlaschkeDomain::OmegaMinus,
            vec![c64(3.0, 0.0), c64(0.0, -1.0), c64(-2.0, 1.0)],
            &g,
        )
        .unwrap();
        let gamma = g.boundary();
        for _ in 0..300 {
            let bparam: f64 = rng.gen_range(-30.0..30.0);
            if (bparam.abs() - 1.0).abs() < 1e-3 {
                continue;
            }
            let zeta = gamma.point_at(bparam);
            let vp = bp.eval(zeta).unwrap();
            assert!((vp.norm() - 1.0).abs() < 1e-10, "plus side at {zeta}");
            let vm = bm.eval(zeta).unwrap();
            assert!((vm.norm() - 1.0).abs() < 1e-9, "minus side at {zeta}: {}", vm.norm());
        }
        // interior contraction on each side
        for _ in 0..200 {
            let w = c64(rng.gen_range(-0.95..0.95), rng.gen_range(0.05..5.0));
            assert!(bp.eval(w).unwrap().norm() < 1.0);
        }
        for _ in 0..200 {
            let w = c64(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..-0.05));
            assert!(bm.eval(w).unwrap().norm() < 1.0, "at {w}");
        }
    }

    #[test]
    fn transplant_matches_composition() {
        let g = geom();
        let zeros_strip = vec![c64(0.2, 0.8), c64(-0.3, 1.5)];
        let bp = BlaschkeProduct::new(BlaschkeDomain::OmegaPlus, zeros_strip.clone(), &g).unwrap();
        let zeros_plane: Vec<Complex64> = zeros_strip
            .iter()
            .map(|&w| psi_plus(w, 1.0))
            .collect();
        let bu = BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, zeros_plane, &g).unwrap();
        for &w in &[c64(0.1, 0.3), c64(-0.5, 2.0), c64(0.7, 0.9)] {
            let a = bp.eval(w).unwrap();
            let b = bu.eval(psi_plus(w, 1.0)).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_multiplicity_is_exact() {
        let g = geom();
        let z0 = c64(0.5, 1.0);
        let b = BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, vec![z0, z0], &g).unwrap();
        // |B(z0 + eps)| ~ c eps^2: halving eps divides the value by ~4
        let v1 = b.eval(z0 + c64(1e-4, 0.0)).unwrap().norm();
        let v2 = b.eval(z0 + c64(5e-5, 0.0)).unwrap().norm();
        let order = (v1 / v2).log2();
        assert!((order - 2.0).abs() < 1e-3, "estimated order {order}");
    }

    #[test]
    fn construction_rejects_out_of_domain_zeros() {
        let g = geom();
        assert!(
            BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, vec![c64(0.0, -1.0)], &g)
                .is_err()
        );
        assert!(BlaschkeProduct::new(BlaschkeDomain::OmegaPlus, vec![c64(3.0, 0.0)], &g).is_err());
    }

    #[test]
    fn convergence_heuristic() {
        let g = geom();
        let linear: Vec<Complex64> = (1..=4000).map(|n| c64(0.0, n as f64)).collect();
        let rec = convergence_criterion(&linear, BlaschkeDomain::UpperHalfPlane, &g).unwrap();
        assert_eq!(rec.verdict, SummabilityVerdict::DivergentEvidence);

        let geometric: Vec<Complex64> = (1..=60).map(|n| c64(0.0, 2.0_f64.powi(-n))).collect();
        let rec = convergence_criterion(&geometric, BlaschkeDomain::UpperHalfPlane, &g).unwrap();
        assert_eq!(rec.verdict, SummabilityVerdict::SummableEvidence);
        assert!(rec.sum < 1.0);

        let rec = convergence_criterion(&[], BlaschkeDomain::UpperHalfPlane, &g).unwrap();
        assert_eq!(rec.sum, 0.0);
        assert_eq!(rec.verdict, SummabilityVerdict::SummableEvidence);
    }

    #[test]
    fn factorization_preserves_boundary_modulus() {
        let g = geom();
        // F(z) = (z - i) / ((z + i)(z + 2i)) on the upper half-plane
        let f = ZeroTaggedFunction {
            f: AnalyticFunction::new(crate::cauchy::RegionTag::UpperHalfPlane, |z| {
                (z - Complex64::i()) / ((z + Complex64::i()) * (z + 2.0 * Complex64::i()))
            }),
            zeros: vec![Complex64::i()],
        };
        let b =
            BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, vec![Complex64::i()], &g).unwrap();
        let probes: Vec<Complex64> = (0..20).map(|k| c64(-5.0 + 0.5 * k as f64, 0.0)).collect();
        let report = factorization_modulus_check(&f, &b, &probes, &g).unwrap();
        assert!(report.boundary_max_dev < 1e-12, "{report:?}");
        assert!(report.removable_ok);

        // mismatched zero sets are a contract violation
        let wrong =
            BlaschkeProduct::new(BlaschkeDomain::UpperHalfPlane, vec![c64(0.0, 2.0)], &g).unwrap();
        assert!(factorization_modulus_check(&f, &wrong, &probes, &g).is_err());
    }

    #[test]
    fn constructed_strip_factorization() {
        let g = geom();
        // F = B_+ * R with R pole in the exterior; on the contour |F| = |R|
        let zero = c64(0.0, 0.7);
        let b = BlaschkeProduct::new(BlaschkeDomain::OmegaPlus, vec![zero], &g).unwrap();
        let bh = b.analytic();
        let f = ZeroTaggedFunction {
            f: AnalyticFunction::new(crate::cauchy::RegionTag::OmegaPlus, move |w| {
                bh.eval(w) * (w - c64(2.0, 0.0)).inv()
            }),
            zeros: vec![zero],
        };
        let gamma = g.boundary();
        let probes: Vec<Complex64> = (0..20)
            .map(|k| gamma.point_at(-4.7 + 0.5 * k as f64))
            .collect();
        let report = factorization_modulus_check(&f, &b, &probes, &g).unwrap();
        assert!(report.boundary_max_dev < 1e-9, "{report:?}");
        for &w in &probes {
            let fv = f.f.eval(w).norm();
            let rv = (w - c64(2.0, 0.0)).inv().norm();
            assert!((fv - rv).abs() < 1e-9 * rv.max(1.0));
        }

        // F identically equal to B: quotient 1 on the boundary
        let bh2 = b.analytic();
        let fb = ZeroTaggedFunction {
            f: AnalyticFunction::new(crate::cauchy::RegionTag::OmegaPlus, move |w| bh2.eval(w)),
            zeros: vec![zero],
        };
        let report = factorization_modulus_check(&fb, &b, &probes, &g).unwrap();
        assert!(report.boundary_max_dev < 1e-12);
    }
}
