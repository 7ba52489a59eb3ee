//! The morphing approximation `R_m = S / (1 - rho^m)`, its error bound,
//! and the exact corrected form driven by tabulated integer polynomials.
//!
//! The morphing form interpolates between `m` parallel M/M/1 queues at
//! low load and a single m-times-faster M/M/1 at high load. It is exact
//! for one and two servers and an approximation beyond that, with
//! relative error bounded by `ln(m) / (4 (1 + ln m))` — under 25% even
//! as `m` grows without bound. Multiplying `rho^m` by the correction
//! ratio `|c_m / P_{m-1}(rho)|` restores the exact residence time, where
//! `P_m` is the tabulated integer polynomial of order `m` and `P_{m-1}`
//! its deflation (the degree-m term dropped).

use crate::erlang::{residence_time, QueueSpec};
use crate::error::{Error, Result};

/// Integer correction polynomial `P_m(rho)` for an `m`-server queue,
/// stored as coefficients `c_0 .. c_m` in ascending degree.
///
/// Tabulated for `m` in `1..=8`; no generating procedure is known for
/// larger orders. Note that the coefficient sum of every entry is zero,
/// so `rho = 1` is an exact root of each polynomial — the saturation
/// pole every stable-queue denominator must carry.
#[derive(Debug, PartialEq, Eq)]
pub struct CorrectionPolynomial {
    m: u32,
    coeffs: &'static [i64],
}

const TABLE: [CorrectionPolynomial; 8] = [
    CorrectionPolynomial { m: 1, coeffs: &[1, -1] },
    CorrectionPolynomial { m: 2, coeffs: &[1, 0, -1] },
    CorrectionPolynomial { m: 3, coeffs: &[-2, -2, 1, 3] },
    CorrectionPolynomial { m: 4, coeffs: &[-3, -6, -3, 4, 8] },
    CorrectionPolynomial { m: 5, coeffs: &[-24, -72, -84, -20, 75, 125] },
    CorrectionPolynomial { m: 6, coeffs: &[5, 20, 35, 30, 0, -36, -54] },
    CorrectionPolynomial {
        m: 7,
        coeffs: &[-720, -3600, -8280, -10920, -7350, 2058, 12005, 16807],
    },
    CorrectionPolynomial {
        m: 8,
        coeffs: &[-315, -1890, -5355, -9240, -10080, -5376, 3584, 12288, 16384],
    },
];

impl CorrectionPolynomial {
    /// The tabulated polynomial for an `m`-server queue, `1 <= m <= 8`.
    pub fn for_servers(m: u32) -> Result<&'static CorrectionPolynomial> {
        if (1..=8).contains(&m) {
            Ok(&TABLE[(m - 1) as usize])
        } else {
            Err(Error::InvalidArgument(format!(
                "correction polynomials are tabulated only for m in 1..=8, got {m}"
            )))
        }
    }

    /// All eight tabulated polynomials in order of `m`.
    pub fn all() -> &'static [CorrectionPolynomial; 8] {
        &TABLE
    }

    pub fn servers(&self) -> u32 {
        self.m
    }

    /// Coefficients `c_0 .. c_m` in ascending degree.
    pub fn coeffs(&self) -> &'static [i64] {
        self.coeffs
    }

    /// Coefficients of the deflated polynomial `P_{m-1}`: `P_m` with its
    /// degree-m term removed.
    pub fn deflated_coeffs(&self) -> &'static [i64] {
        &self.coeffs[..self.coeffs.len() - 1]
    }

    /// Leading coefficient `c_m`.
    pub fn leading(&self) -> i64 {
        *self.coeffs.last().expect("tabulated polynomials are nonempty")
    }

    /// Horner evaluation of `P_m(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(self.coeffs, x)
    }

    /// Horner evaluation of the deflated polynomial `P_{m-1}(x)`.
    pub fn eval_deflated(&self, x: f64) -> f64 {
        horner(self.deflated_coeffs(), x)
    }
}

// Nested form keeps the large tabulated coefficients from shedding
// precision during evaluation.
fn horner(coeffs: &[i64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}

/// Morphing, exact and corrected residence times side by side at one
/// operating point, with the realized relative error and its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphMetrics {
    pub r_morph: f64,
    pub r_exact: f64,
    pub r_corrected: f64,
    /// `|r_morph - r_exact| / r_exact`.
    pub rel_error: f64,
    /// `ln(m) / (4 (1 + ln m))`.
    pub bound: f64,
}

impl MorphMetrics {
    /// Computes all three residence times at `spec`'s operating point.
    /// The corrected form needs tabulated coefficients, so `m <= 8`.
    pub fn compute(spec: &QueueSpec) -> Result<Self> {
        let poly = CorrectionPolynomial::for_servers(spec.servers())?;
        let rho = spec.utilization();
        let s = spec.service_time();
        let r_morph = morphing_residence(spec.servers(), rho, s)?;
        let r_exact = residence_time(spec)?;
        let r_corrected = corrected_residence(poly, rho, s)?;
        Ok(Self {
            r_morph,
            r_exact,
            r_corrected,
            rel_error: (r_morph - r_exact).abs() / r_exact,
            bound: morphing_error_bound(u64::from(spec.servers()))?,
        })
    }
}

/// Residence time of the morphing model, `S / (1 - rho^m)`.
///
/// Exact for `m = 1` (plain M/M/1) and `m = 2`; an approximation beyond
/// that, always an underestimate of the true residence time.
pub fn morphing_residence(m: u32, rho: f64, s: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument("server count m must be >= 1".into()));
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "utilization must be finite and >= 0, got {rho}"
        )));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "service time must be finite and > 0, got {s}"
        )));
    }
    if rho >= 1.0 {
        return Err(Error::Unstable {
            m,
            a: rho * f64::from(m),
        });
    }
    Ok(s / (1.0 - rho.powi(m as i32)))
}

/// Upper bound on the relative error of the morphing model:
/// `ln(m) / (4 (1 + ln m))`.
///
/// Zero at `m = 1`, strictly increasing, with supremum 1/4.
pub fn morphing_error_bound(m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument("server count m must be >= 1".into()));
    }
    let ln_m = (m as f64).ln();
    Ok(ln_m / (4.0 * (1.0 + ln_m)))
}

/// Exact residence time in corrected geometric form,
/// `S / (1 - |c_m / P_{m-1}(rho)| rho^m)`.
///
/// With the tabulated coefficients and drop-the-leading-term deflation
/// this reproduces the Erlang-C residence time; the property tests pin
/// that agreement at 1e-9 relative, which is what validates the
/// deflation convention.
pub fn corrected_residence(poly: &CorrectionPolynomial, rho: f64, s: f64) -> Result<f64> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "utilization must be finite and >= 0, got {rho}"
        )));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "service time must be finite and > 0, got {s}"
        )));
    }
    if rho >= 1.0 {
        return Err(Error::Unstable {
            m: poly.servers(),
            a: rho * f64::from(poly.servers()),
        });
    }
    let deflated = poly.eval_deflated(rho);
    if deflated == 0.0 {
        return Err(Error::Domain(format!(
            "deflated correction polynomial for m = {} vanishes at rho = {rho}",
            poly.servers()
        )));
    }
    let ratio = (poly.leading() as f64 / deflated).abs();
    let denom = 1.0 - ratio * rho.powi(poly.servers() as i32);
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "corrected denominator non-positive at rho = {rho} for m = {}",
            poly.servers()
        )));
    }
    Ok(s / denom)
}
