//! Complex zeros of the residence-time denominators and the Szego curve
//! they accumulate on.
//!
//! The morphing denominator `1 - rho^m`, continued to complex `rho`, has
//! its zeros at the m-th roots of unity on the unit circle. The
//! corrected denominators vanish at the zeros of the tabulated integer
//! polynomials: one zero sits exactly at `rho = 1` (the saturation pole;
//! every coefficient row sums to zero) and the remaining `m - 1` lie
//! strictly inside the unit disk, drifting toward the tear-drop shaped
//! Szego curve `|z e^{1-z}| = 1` as `m` grows.
//!
//! Roots are found with Aberth–Ehrlich iteration polished by Newton
//! steps; the contract is the residual bound, not the algorithm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::morphing::CorrectionPolynomial;

/// Which denominator family a root locus belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Zeros of `1 - rho^m`: the m-th roots of unity.
    Morphing,
    /// Zeros of the tabulated correction polynomial `P_m`.
    Corrected,
}

/// All complex zeros of one denominator of order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootLocus {
    pub m: u32,
    pub kind: RootKind,
    pub roots: Vec<Complex64>,
    /// Largest `|P(z)|` over the returned roots.
    pub max_residual: f64,
}

/// Ordered samples tracing the closed curve `|z e^{1-z}| = 1`, `|z| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoCurve {
    pub points: Vec<Complex64>,
}

/// The m-th roots of unity `e^{2 pi i k / m}`, `k = 0 .. m-1`.
pub fn morphing_roots(m: u32) -> Result<RootLocus> {
    if m < 1 {
        return Err(Error::InvalidArgument("order m must be >= 1".into()));
    }
    let roots: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(m);
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();
    let max_residual = roots
        .iter()
        .map(|z| (Complex64::new(1.0, 0.0) - z.powu(m)).norm())
        .fold(0.0, f64::max);
    Ok(RootLocus {
        m,
        kind: RootKind::Morphing,
        roots,
        max_residual,
    })
}

/// All `m` complex zeros of a tabulated correction polynomial.
///
/// Every returned root is polished until `|P_m(z)| <= 1e-8`; failing
/// that, the offending order is reported. One root is always the
/// saturation pole at `z = 1`; for `m >= 3` the others lie strictly
/// inside the unit disk.
pub fn corrected_roots(poly: &CorrectionPolynomial) -> Result<RootLocus> {
    let coeffs: Vec<f64> = poly.coeffs().iter().map(|&c| c as f64).collect();
    let roots = aberth(&coeffs).ok_or(Error::NoConvergence {
        degree: poly.servers() as usize,
    })?;
    let max_residual = roots
        .iter()
        .map(|&z| eval_poly(&coeffs, z).norm())
        .fold(0.0, f64::max);
    if max_residual > 1e-8 {
        return Err(Error::NoConvergence {
            degree: poly.servers() as usize,
        });
    }
    Ok(RootLocus {
        m: poly.servers(),
        kind: RootKind::Corrected,
        roots,
        max_residual,
    })
}

/// Samples the Szego curve at `n_points` equally spaced polar angles,
/// starting from the cusp at `z = 1` and proceeding counter-clockwise.
///
/// For each angle the modulus condition `ln r + 1 - r cos(theta) = 0`
/// has exactly one solution in `(0, 1]`, found by bisection.
pub fn szego_curve(n_points: usize) -> Result<SzegoCurve> {
    if n_points < 16 {
        return Err(Error::InvalidArgument(format!(
            "need at least 16 samples to trace the curve, got {n_points}"
        )));
    }
    let points = (0..n_points)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n_points as f64;
            if k == 0 {
                // ln r + 1 - r has a double zero at r = 1; return the
                // cusp exactly rather than bisecting a tangent root.
                return Complex64::new(1.0, 0.0);
            }
            let cos_t = theta.cos();
            // f(r) = ln r + 1 - r cos(theta) rises from -inf to f(1) >= 0.
            let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid.ln() + 1.0 - mid * cos_t < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            Complex64::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    Ok(SzegoCurve { points })
}

fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_deriv(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
            acc * z + c * k as f64
        })
}

/// Aberth–Ehrlich iteration over all roots simultaneously, followed by
/// a few Newton polishing steps per root. Coefficients ascending.
fn aberth(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    if degree == 0 || lead == 0.0 {
        return None;
    }
    // Initial guesses on a circle inside the Cauchy bound, angles offset
    // so no guess starts on the real axis.
    let cauchy = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let radius = 0.7 * cauchy;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();

    let tol = 1e-14;
    let mut settled = false;
    for _ in 0..200 {
        let mut max_step = 0.0_f64;
        for i in 0..degree {
            let p = eval_poly(coeffs, z[i]);
            let dp = eval_deriv(coeffs, z[i]);
            let newton = if dp.norm() == 0.0 {
                // Perturb off a critical point.
                Complex64::new(tol, tol)
            } else {
                p / dp
            };
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).finv())
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() == 0.0 { newton } else { newton / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < tol {
            settled = true;
            break;
        }
    }
    if !settled {
        return None;
    }
    // Newton polish sharpens each root to the residual floor.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let dp = eval_deriv(coeffs, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= eval_poly(coeffs, *zi) / dp;
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn has_root(roots: &[Complex64], target: Complex64, tol: f64) -> bool {
        roots.iter().any(|z| (z - target).norm() <= tol)
    }

    #[test]
    fn morphing_roots_are_roots_of_unity() {
        let one = morphing_roots(1).unwrap();
        assert_eq!(one.roots, vec![Complex64::new(1.0, 0.0)]);

        let four = morphing_roots(4).unwrap();
        assert_eq!(four.roots.len(), 4);
        for target in [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ] {
            assert!(has_root(&four.roots, target, 1e-12));
        }

        let three = morphing_roots(3).unwrap();
        for z in &three.roots {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            // Direct check of the defining polynomial 1 - z^3.
            assert!((Complex64::new(1.0, 0.0) - z.powu(3)).norm() < 1e-12);
        }
        assert!(three.max_residual <= 1e-8);
        assert!(morphing_roots(0).is_err());
    }

    #[test]
    fn corrected_roots_low_orders_are_exact() {
        let p1 = CorrectionPolynomial::for_servers(1).unwrap();
        let l1 = corrected_roots(p1).unwrap();
        assert_eq!(l1.roots.len(), 1);
        assert!(has_root(&l1.roots, Complex64::new(1.0, 0.0), 1e-10));

        let p2 = CorrectionPolynomial::for_servers(2).unwrap();
        let l2 = corrected_roots(p2).unwrap();
        assert_eq!(l2.roots.len(), 2);
        assert!(has_root(&l2.roots, Complex64::new(1.0, 0.0), 1e-10));
        assert!(has_root(&l2.roots, Complex64::new(-1.0, 0.0), 1e-10));
    }

    #[test]
    fn corrected_roots_p3_match_direct_factoring() {
        // P3 = 3 rho^3 + rho^2 - 2 rho - 2 = (rho - 1)(3 rho^2 + 4 rho + 2),
        // so the nontrivial pair is -2/3 +- i sqrt(2)/3.
        let p3 = CorrectionPolynomial::for_servers(3).unwrap();
        let locus = corrected_roots(p3).unwrap();
        assert_eq!(locus.roots.len(), 3);
        let im = 2.0_f64.sqrt() / 3.0;
        assert!(has_root(&locus.roots, Complex64::new(1.0, 0.0), 1e-9));
        assert!(has_root(&locus.roots, Complex64::new(-2.0 / 3.0, im), 1e-9));
        assert!(has_root(&locus.roots, Complex64::new(-2.0 / 3.0, -im), 1e-9));
        assert!(locus.max_residual <= 1e-8);
    }

    #[test]
    fn corrected_roots_interior_except_saturation_pole() {
        for poly in CorrectionPolynomial::all() {
            let locus = corrected_roots(poly).unwrap();
            assert_eq!(locus.roots.len() as u32, poly.servers());
            assert!(locus.max_residual <= 1e-8, "m={}", poly.servers());
            let at_one = locus
                .roots
                .iter()
                .filter(|z| (*z - Complex64::new(1.0, 0.0)).norm() <= 1e-9)
                .count();
            assert_eq!(at_one, 1, "exactly one saturation pole for m={}", poly.servers());
            if poly.servers() >= 3 {
                for z in locus
                    .roots
                    .iter()
                    .filter(|z| (*z - Complex64::new(1.0, 0.0)).norm() > 1e-9)
                {
                    assert!(
                        z.norm() < 1.0 - 1e-6,
                        "m={}: root {z} escaped the open disk",
                        poly.servers()
                    );
                }
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for poly in CorrectionPolynomial::all() {
            let locus = corrected_roots(poly).unwrap();
            for z in &locus.roots {
                assert!(
                    has_root(&locus.roots, z.conj(), 1e-7),
                    "m={}: {z} lacks a conjugate partner",
                    poly.servers()
                );
            }
        }
    }

    #[test]
    fn szego_samples_satisfy_identity() {
        assert!(szego_curve(8).is_err());
        let curve = szego_curve(64).unwrap();
        assert_eq!(curve.points.len(), 64);
        assert_eq!(curve.points[0], Complex64::new(1.0, 0.0));
        for z in &curve.points {
            let value = (z * (Complex64::new(1.0, 0.0) - z).exp()).norm();
            assert!((value - 1.0).abs() <= 1e-10, "identity failed at {z}");
            assert!(z.norm() <= 1.0 + 1e-12);
        }
        // The curve crosses the negative real axis near -0.2784645.
        let back = curve.points[32];
        assert_relative_eq!(back.re, -0.2784645427610738, max_relative = 1e-10);
        assert!(back.im.abs() < 1e-12);
    }

    #[test]
    fn szego_curve_is_continuous() {
        let curve = szego_curve(256).unwrap();
        for pair in curve.points.windows(2) {
            assert!((pair[1] - pair[0]).norm() < 0.1);
        }
        let wrap = (curve.points[0] - curve.points[255]).norm();
        assert!(wrap < 0.1);
    }
}
