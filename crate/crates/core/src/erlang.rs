//! Exact analytic metrics for M/M/1, M/M/m/m (loss) and M/M/m (delay)
//! queues.
//!
//! The Erlang B blocking probability is computed by two independent
//! algorithms: the classic one-pass recurrence and a Poisson pmf/cdf
//! ratio evaluated in log space. Erlang C is obtained from B through the
//! numerically benign identity `C = B / (1 - rho (1 - B))` rather than
//! from factorial sums, and the transformation `phi_b` applies the same
//! map to the Poisson-route B, giving two floating-point paths to the
//! same quantity that the test suite holds to 1e-12 of each other.
//! Waiting time follows as `W = R1_fast * phi_b` where `R1_fast` is the
//! residence time of an M/M/1 server running `m` times faster, and the
//! residence time is `R = S + W`.
//!
//! Loss-model operations accept any `a >= 0`; delay-model operations
//! require `a < m` and report `Error::Unstable` otherwise.

use crate::error::{Error, Result};
use crate::special::{ln_poisson_cdf, ln_poisson_pmf};

/// Operating point of a queueing facility: `m` identical servers fed by
/// Poisson arrivals at mean rate `lambda`, each service exponentially
/// distributed with mean `s`.
///
/// Traffic intensity `a = lambda * s` and per-server utilization
/// `rho = a / m` are derived, never stored, so they can not drift out of
/// sync with the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueSpec {
    m: u32,
    lambda: f64,
    s: f64,
}

impl QueueSpec {
    /// Builds a spec from the arrival rate. Requires `m >= 1`,
    /// `lambda >= 0` and `s > 0`.
    pub fn new(m: u32, lambda: f64, s: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("server count m must be >= 1".into()));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "arrival rate must be finite and >= 0, got {lambda}"
            )));
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "service time must be finite and > 0, got {s}"
            )));
        }
        Ok(Self { m, lambda, s })
    }

    /// Builds a spec from offered traffic `a` in erlangs; `lambda` is
    /// recovered as `a / s`.
    pub fn from_traffic(m: u32, a: f64, s: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "traffic intensity must be finite and >= 0, got {a}"
            )));
        }
        Self::new(m, a / s, s)
    }

    pub fn servers(&self) -> u32 {
        self.m
    }

    pub fn arrival_rate(&self) -> f64 {
        self.lambda
    }

    pub fn service_time(&self) -> f64 {
        self.s
    }

    /// Offered traffic `a = lambda * s` in erlangs.
    pub fn traffic(&self) -> f64 {
        self.lambda * self.s
    }

    /// Per-server utilization `rho = a / m` of the delay model.
    pub fn utilization(&self) -> f64 {
        self.traffic() / f64::from(self.m)
    }

    fn require_stable(&self) -> Result<()> {
        if self.utilization() >= 1.0 {
            Err(Error::Unstable {
                m: self.m,
                a: self.traffic(),
            })
        } else {
            Ok(())
        }
    }
}

/// Full set of steady-state metrics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMetrics {
    /// Erlang B blocking probability of the loss model.
    pub b: f64,
    /// Erlang C waiting probability of the delay model.
    pub c: f64,
    /// Value of the B-to-C transformation; numerically equal to `c`.
    pub phi_b: f64,
    /// Mean waiting time.
    pub w: f64,
    /// Mean residence time, `r = s + w`.
    pub r: f64,
    /// Mean number in system by Little's law, `q = lambda * r`.
    pub q: f64,
    /// Per-server utilization of the loss model, `(1 - b) a / m`.
    pub rho_loss: f64,
}

/// The delay queue viewed as a single M/M/1 whose server runs `m` times
/// faster. Its residence time is the quantity `phi_b` scales down to
/// produce the true M/M/m waiting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastServerView {
    /// Residence time of the m-times-faster M/M/1, `(s/m) / (1 - rho)`.
    pub r1_fast: f64,
}

impl FastServerView {
    pub fn of(spec: &QueueSpec) -> Result<Self> {
        spec.require_stable()?;
        let r1_fast = (spec.s / f64::from(spec.m)) / (1.0 - spec.utilization());
        Ok(Self { r1_fast })
    }
}

fn check_loss_args(m: u32, a: f64) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidArgument("server count m must be >= 1".into()));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "traffic intensity must be finite and >= 0, got {a}"
        )));
    }
    Ok(())
}

fn check_delay_args(m: u32, a: f64) -> Result<()> {
    check_loss_args(m, a)?;
    if a >= f64::from(m) {
        return Err(Error::Unstable { m, a });
    }
    Ok(())
}

/// Erlang B by the one-pass recurrence
/// `B_k = B_{k-1} a / (a B_{k-1} + k)` seeded with `B_1 = a / (1 + a)`.
///
/// Runs in O(m) with no large intermediates, for any `a >= 0`.
pub fn erlang_b_recurrence(m: u32, a: f64) -> Result<f64> {
    check_loss_args(m, a)?;
    let mut b = a / (1.0 + a);
    for k in 2..=m {
        b = b * a / (a * b + f64::from(k));
    }
    Ok(b)
}

/// Erlang B as the ratio of the Poisson pmf to the Poisson cdf at
/// `k = m`, evaluated in log space.
///
/// An independent route to the same number as [`erlang_b_recurrence`];
/// the two agree to better than 1e-12 relative over the tested domain.
pub fn erlang_b_poisson(m: u32, a: f64) -> Result<f64> {
    check_loss_args(m, a)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok((ln_poisson_pmf(m, a) - ln_poisson_cdf(m, a)).exp())
}

/// Poisson probability mass `e^{-a} a^k / k!`, computed in log space so
/// it underflows only where the true value does.
pub fn poisson_pmf(k: u32, a: f64) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "poisson mean must be finite and >= 0, got {a}"
        )));
    }
    if a == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    Ok(ln_poisson_pmf(k, a).exp())
}

/// Poisson cumulative distribution `sum_{j=0..=k} pmf(j, a)`.
pub fn poisson_cdf(k: u32, a: f64) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "poisson mean must be finite and >= 0, got {a}"
        )));
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    Ok(ln_poisson_cdf(k, a).exp().min(1.0))
}

/// Erlang C: the probability an arrival finds all `m` servers busy and
/// must wait.
///
/// Computed from Erlang B through `C = B / (1 - rho (1 - B))`, which is
/// well conditioned everywhere the factorial sums are not.
pub fn erlang_c(m: u32, a: f64) -> Result<f64> {
    check_delay_args(m, a)?;
    let b = erlang_b_recurrence(m, a)?;
    let rho = a / f64::from(m);
    Ok(b / (1.0 - rho * (1.0 - b)))
}

/// The transformation `phi_b = B / (1 - (1 - B) rho)` carrying the loss
/// model's blocking probability into the delay model's waiting
/// probability.
///
/// `B` is taken from the Poisson-ratio algorithm, so this value reaches
/// Erlang C by a floating-point route independent of [`erlang_c`].
/// It inherits B's limits: `phi_b ~ B` as `a -> 0` and `phi_b -> 1` as
/// `a -> m`.
pub fn phi_b(m: u32, a: f64) -> Result<f64> {
    check_delay_args(m, a)?;
    let b = erlang_b_poisson(m, a)?;
    let rho = a / f64::from(m);
    Ok(b / (1.0 - (1.0 - b) * rho))
}

/// Mean waiting time `W = R1_fast * phi_b`, identical to
/// `C(m,a) s / (m (1 - rho))`.
pub fn waiting_time(spec: &QueueSpec) -> Result<f64> {
    let fast = FastServerView::of(spec)?;
    Ok(fast.r1_fast * phi_b(spec.m, spec.traffic())?)
}

/// Mean residence time `R = S + W`.
pub fn residence_time(spec: &QueueSpec) -> Result<f64> {
    Ok(spec.s + waiting_time(spec)?)
}

/// Per-server utilization of the loss model, `(1 - B) a / m`.
///
/// Defined for arbitrarily large `a`, strictly increasing, and only
/// approaching 1 asymptotically: rejected arrivals thin the stream that
/// actually reaches the servers.
pub fn utilization_loss(m: u32, a: f64) -> Result<f64> {
    check_loss_args(m, a)?;
    let b = erlang_b_recurrence(m, a)?;
    Ok((1.0 - b) * a / f64::from(m))
}

/// Every analytic metric at one operating point. Requires `rho < 1`;
/// loss-only quantities for saturated points are available separately
/// through [`utilization_loss`] and [`erlang_b_recurrence`].
pub fn metrics(spec: &QueueSpec) -> Result<ExactMetrics> {
    spec.require_stable()?;
    let m = spec.m;
    let a = spec.traffic();
    let b = erlang_b_recurrence(m, a)?;
    let c = erlang_c(m, a)?;
    let phi = phi_b(m, a)?;
    let w = waiting_time(spec)?;
    let r = spec.s + w;
    Ok(ExactMetrics {
        b,
        c,
        phi_b: phi,
        w,
        r,
        q: spec.lambda * r,
        rho_loss: (1.0 - b) * a / f64::from(m),
    })
}
