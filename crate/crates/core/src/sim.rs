//! Discrete-event simulation of M/M/m/m (loss) and M/M/m (FIFO delay)
//! queues, used as an independent statistical oracle for the analytic
//! metrics.
//!
//! A replication is a strictly sequential loop over a priority queue of
//! arrival and departure events. Exponential variates come from inverse
//! transform over a ChaCha stream; replication `i` runs on stream `i` of
//! the configured seed, so every estimate is bit-for-bit reproducible
//! and replications stay independent. Confidence intervals use the
//! normal approximation across replication means.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::erlang::QueueSpec;
use crate::error::{Error, Result};

/// Default completions per replication.
pub const DEFAULT_COMPLETIONS: u64 = 100_000;
/// Default number of independent replications.
pub const DEFAULT_REPLICATIONS: u32 = 10;

/// Queueing discipline of the simulated facility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discipline {
    /// M/M/m/m: no waiting room; arrivals finding all servers busy are
    /// rejected and lost.
    Loss,
    /// M/M/m: unbounded waiting line served in strict arrival order.
    Fifo,
}

/// Run parameters for one simulation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub spec: QueueSpec,
    pub discipline: Discipline,
    /// Completions per replication (>= 1000).
    pub n_customers: u64,
    /// Independent replications (>= 5).
    pub n_reps: u32,
    /// Completions discarded at the start of each replication.
    pub warmup: u64,
    /// Base RNG seed; replication `i` uses stream `i`.
    pub seed: u64,
}

impl SimConfig {
    /// Defaults: 10 replications of 100_000 completions, 10% warmup.
    pub fn with_defaults(spec: QueueSpec, discipline: Discipline, seed: u64) -> Self {
        Self {
            spec,
            discipline,
            n_customers: DEFAULT_COMPLETIONS,
            n_reps: DEFAULT_REPLICATIONS,
            warmup: DEFAULT_COMPLETIONS / 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_customers < 1000 {
            return Err(Error::InvalidArgument(format!(
                "need at least 1000 completions per replication, got {}",
                self.n_customers
            )));
        }
        if self.n_reps < 5 {
            return Err(Error::InvalidArgument(format!(
                "need at least 5 replications, got {}",
                self.n_reps
            )));
        }
        if self.warmup >= self.n_customers {
            return Err(Error::InvalidArgument(format!(
                "warmup ({}) must be smaller than completions per replication ({})",
                self.warmup, self.n_customers
            )));
        }
        if self.discipline == Discipline::Fifo && self.spec.utilization() >= 1.0 {
            return Err(Error::Unstable {
                m: self.spec.servers(),
                a: self.spec.traffic(),
            });
        }
        Ok(())
    }
}

/// Replication-averaged estimates with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    /// Sample mean waiting time.
    pub mean_w: f64,
    /// Sample mean residence time.
    pub mean_r: f64,
    /// Sample mean service time of counted completions.
    pub mean_s: f64,
    /// Fraction of arrivals rejected (zero under FIFO).
    pub loss_frac: f64,
    /// Standard error of `loss_frac` across replications.
    pub loss_se: f64,
    /// 95% half-width on `mean_w` across replications.
    pub ci_half_width: f64,
    /// Time-averaged per-server utilization.
    pub utilization: f64,
    /// Time-averaged probability that all servers are busy.
    pub all_busy_frac: f64,
    /// Replications behind these numbers.
    pub reps: u32,
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Arrival,
    Departure { server: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // Sequence number breaks time ties deterministically.
        self.time
            .total_cmp(&other.time)
            .then(self.seq.cmp(&other.seq))
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct RepStats {
    mean_w: f64,
    mean_r: f64,
    mean_s: f64,
    loss_frac: f64,
    utilization: f64,
    all_busy_frac: f64,
}

fn exp_draw(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    // Inverse transform; 1 - u keeps the argument strictly positive.
    -(1.0 - rng.random::<f64>()).ln() / rate
}

fn run_replication(cfg: &SimConfig, rep: u32) -> RepStats {
    let spec = &cfg.spec;
    let m = spec.servers() as usize;
    let lambda = spec.arrival_rate();
    let service_rate = 1.0 / spec.service_time();
    let fifo = cfg.discipline == Discipline::Fifo;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::from(rep));

    let mut heap: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let push = |heap: &mut BinaryHeap<Reverse<Event>>, seq: &mut u64, time: f64, kind: EventKind| {
        heap.push(Reverse(Event { time, seq: *seq, kind }));
        *seq += 1;
    };

    let mut idle: BTreeSet<usize> = (0..m).collect();
    // (arrival time, service start) of the customer on each server.
    let mut in_service: Vec<(f64, f64)> = vec![(0.0, 0.0); m];
    let mut waiting: VecDeque<f64> = VecDeque::new();

    let mut now = 0.0_f64;
    let mut completions: u64 = 0;
    let mut arrivals: u64 = 0;
    let mut blocked: u64 = 0;
    let mut busy_time = 0.0_f64;
    let mut all_busy_time = 0.0_f64;

    let mut w_sum = 0.0_f64;
    let mut r_sum = 0.0_f64;
    let mut s_sum = 0.0_f64;

    // Snapshot taken when the warmup completion count is reached.
    let mut snap_taken = cfg.warmup == 0;
    let mut snap = (0.0_f64, 0u64, 0u64, 0.0_f64, 0.0_f64);

    push(&mut heap, &mut seq, exp_draw(&mut rng, lambda), EventKind::Arrival);

    while let Some(Reverse(ev)) = heap.pop() {
        let busy = (m - idle.len()) as f64;
        busy_time += busy * (ev.time - now);
        if idle.is_empty() {
            all_busy_time += ev.time - now;
        }
        now = ev.time;

        match ev.kind {
            EventKind::Arrival => {
                arrivals += 1;
                push(&mut heap, &mut seq, now + exp_draw(&mut rng, lambda), EventKind::Arrival);
                if let Some(&server) = idle.iter().next() {
                    idle.remove(&server);
                    in_service[server] = (now, now);
                    let service = exp_draw(&mut rng, service_rate);
                    push(&mut heap, &mut seq, now + service, EventKind::Departure { server });
                } else if fifo {
                    waiting.push_back(now);
                } else {
                    blocked += 1;
                }
            }
            EventKind::Departure { server } => {
                let (arrived, started) = in_service[server];
                completions += 1;
                if completions > cfg.warmup {
                    w_sum += started - arrived;
                    r_sum += now - arrived;
                    s_sum += now - started;
                }
                if let Some(arrived_next) = waiting.pop_front() {
                    in_service[server] = (arrived_next, now);
                    let service = exp_draw(&mut rng, service_rate);
                    push(&mut heap, &mut seq, now + service, EventKind::Departure { server });
                } else {
                    idle.insert(server);
                }
                if completions == cfg.warmup && !snap_taken {
                    snap = (now, arrivals, blocked, busy_time, all_busy_time);
                    snap_taken = true;
                }
                if completions == cfg.n_customers {
                    break;
                }
            }
        }
    }

    let (t0, arr0, blk0, busy0, all0) = snap;
    let counted = (cfg.n_customers - cfg.warmup) as f64;
    let span = now - t0;
    let window_arrivals = arrivals - arr0;
    RepStats {
        mean_w: w_sum / counted,
        mean_r: r_sum / counted,
        mean_s: s_sum / counted,
        loss_frac: if window_arrivals == 0 {
            0.0
        } else {
            (blocked - blk0) as f64 / window_arrivals as f64
        },
        utilization: if span > 0.0 {
            (busy_time - busy0) / (m as f64 * span)
        } else {
            0.0
        },
        all_busy_frac: if span > 0.0 { (all_busy_time - all0) / span } else { 0.0 },
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0u32);
    for v in values {
        sum += v;
        n += 1;
    }
    sum / f64::from(n)
}

fn std_error(values: &[f64], center: f64) -> f64 {
    let n = values.len() as f64;
    let var = values.iter().map(|v| (v - center) * (v - center)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Runs every replication of `config` and aggregates the estimates.
///
/// A zero arrival rate is a legal degenerate case: no customer ever
/// appears, so every estimate is zero.
pub fn simulate(config: &SimConfig) -> Result<SimEstimate> {
    config.validate()?;
    if config.spec.arrival_rate() == 0.0 {
        return Ok(SimEstimate {
            mean_w: 0.0,
            mean_r: 0.0,
            mean_s: 0.0,
            loss_frac: 0.0,
            loss_se: 0.0,
            ci_half_width: 0.0,
            utilization: 0.0,
            all_busy_frac: 0.0,
            reps: config.n_reps,
        });
    }
    let reps: Vec<RepStats> = (0..config.n_reps)
        .map(|r| run_replication(config, r))
        .collect();
    let mean_w = mean(reps.iter().map(|r| r.mean_w));
    let loss_frac = mean(reps.iter().map(|r| r.loss_frac));
    let w_means: Vec<f64> = reps.iter().map(|r| r.mean_w).collect();
    let loss_means: Vec<f64> = reps.iter().map(|r| r.loss_frac).collect();
    Ok(SimEstimate {
        mean_w,
        mean_r: mean(reps.iter().map(|r| r.mean_r)),
        mean_s: mean(reps.iter().map(|r| r.mean_s)),
        loss_frac,
        loss_se: std_error(&loss_means, loss_frac),
        ci_half_width: 1.96 * std_error(&w_means, mean_w),
        utilization: mean(reps.iter().map(|r| r.utilization)),
        all_busy_frac: mean(reps.iter().map(|r| r.all_busy_frac)),
        reps: config.n_reps,
    })
}

/// Measured per-server utilization over a grid of traffic intensities.
///
/// Loss-mode points track `(1 - B) a / m`; FIFO points track `a / m`
/// and therefore require `a < m`. Each grid point runs a full default
/// experiment on its own seed offset.
pub fn utilization_sweep_empirical(
    m: u32,
    a_values: &[f64],
    discipline: Discipline,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if a_values.is_empty() {
        return Err(Error::InvalidArgument("a_values must be non-empty".into()));
    }
    a_values
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let spec = QueueSpec::from_traffic(m, a, 1.0)?;
            let cfg = SimConfig::with_defaults(spec, discipline, seed.wrapping_add(i as u64));
            let est = simulate(&cfg)?;
            Ok((a, est.utilization))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erlang;

    fn config(m: u32, a: f64, discipline: Discipline) -> SimConfig {
        let spec = QueueSpec::from_traffic(m, a, 1.0).unwrap();
        SimConfig {
            spec,
            discipline,
            n_customers: 20_000,
            n_reps: 5,
            warmup: 2_000,
            seed: 7,
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = config(2, 1.0, Discipline::Fifo);
        cfg.n_customers = 10;
        assert!(matches!(simulate(&cfg), Err(Error::InvalidArgument(_))));
        let mut cfg = config(2, 1.0, Discipline::Fifo);
        cfg.n_reps = 2;
        assert!(simulate(&cfg).is_err());
        let mut cfg = config(2, 1.0, Discipline::Fifo);
        cfg.warmup = cfg.n_customers;
        assert!(simulate(&cfg).is_err());
        // Saturated FIFO has no steady state to estimate.
        assert!(matches!(
            simulate(&config(2, 2.0, Discipline::Fifo)),
            Err(Error::Unstable { .. })
        ));
        // The loss model is happy to run oversaturated.
        assert!(simulate(&config(2, 3.0, Discipline::Loss)).is_ok());
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let cfg = config(2, 1.5, Discipline::Fifo);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg;
        other.seed = 8;
        assert_ne!(simulate(&other).unwrap(), a);
    }

    #[test]
    fn degenerate_no_traffic_run_completes() {
        let est = simulate(&config(4, 0.0, Discipline::Fifo)).unwrap();
        assert_eq!(est.mean_w, 0.0);
        assert_eq!(est.mean_r, 0.0);
        assert_eq!(est.loss_frac, 0.0);
        assert_eq!(est.reps, 5);
    }

    #[test]
    fn iron_law_holds_empirically() {
        for discipline in [Discipline::Fifo, Discipline::Loss] {
            let est = simulate(&config(3, 2.0, discipline)).unwrap();
            let gap = (est.mean_r - est.mean_w - est.mean_s).abs();
            assert!(gap < 1e-10 * est.mean_r, "gap {gap}");
        }
    }

    #[test]
    fn fifo_tracks_analytic_waiting_time() {
        let cfg = config(2, 1.5, Discipline::Fifo);
        let est = simulate(&cfg).unwrap();
        let w = erlang::waiting_time(&cfg.spec).unwrap();
        assert!(
            (est.mean_w - w).abs() / w < 0.05,
            "mean_w {} vs analytic {w}",
            est.mean_w
        );
        assert!(est.ci_half_width > 0.0);
        assert_eq!(est.loss_frac, 0.0);
    }

    #[test]
    fn loss_tracks_erlang_b_and_pasta() {
        let cfg = config(1, 1.0, Discipline::Loss);
        let est = simulate(&cfg).unwrap();
        let b = erlang::erlang_b_recurrence(1, 1.0).unwrap();
        assert!(
            (est.loss_frac - b).abs() <= 3.0 * est.loss_se,
            "loss {} vs B {b} (se {})",
            est.loss_frac,
            est.loss_se
        );
        // Poisson arrivals see time averages: the arrival-observed
        // blocking fraction and the time-averaged all-busy probability
        // estimate the same number.
        assert!(
            (est.all_busy_frac - est.loss_frac).abs() <= 4.0 * est.loss_se + 0.01,
            "PASTA violated: {} vs {}",
            est.all_busy_frac,
            est.loss_frac
        );
        // Residence equals service when nobody waits.
        assert!((est.mean_r - est.mean_s).abs() < 1e-12);
    }

    #[test]
    fn utilization_sweep_matches_both_models() {
        let loss = utilization_sweep_empirical(2, &[0.0, 4.0], Discipline::Loss, 11).unwrap();
        assert_eq!(loss[0], (0.0, 0.0));
        let expected = erlang::utilization_loss(2, 4.0).unwrap();
        assert!(
            (loss[1].1 - expected).abs() < 0.01,
            "loss util {} vs {expected}",
            loss[1].1
        );
        let fifo = utilization_sweep_empirical(2, &[1.0], Discipline::Fifo, 11).unwrap();
        assert!((fifo[0].1 - 0.5).abs() < 0.01, "fifo util {}", fifo[0].1);
        assert!(matches!(
            utilization_sweep_empirical(2, &[2.5], Discipline::Fifo, 11),
            Err(Error::Unstable { .. })
        ));
        assert!(utilization_sweep_empirical(2, &[], Discipline::Loss, 11).is_err());
    }
}
