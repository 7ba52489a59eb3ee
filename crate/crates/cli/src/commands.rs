//! The five subcommands, each emitting flat records on stdout.

use mmm_core::erlang::{self, QueueSpec};
use mmm_core::morphing::{morphing_error_bound, morphing_residence, CorrectionPolynomial};
use mmm_core::polyroots::{corrected_roots, morphing_roots, szego_curve};
use mmm_core::sim::{simulate, utilization_sweep_empirical, Discipline, SimConfig};
use mmm_core::{Error, Result};

use crate::output::{emit, print_stdout, Field, Format, Record, TextStyle};

/// Servers and traffic of the reference table: rho = 0.75 throughout.
const TABLE_SERVERS: [u32; 7] = [1, 2, 3, 4, 8, 16, 32];

fn delay_metrics_record(spec: &QueueSpec) -> Result<Record> {
    let m = erlang::metrics(spec)?;
    let r_morph = morphing_residence(spec.servers(), spec.utilization(), spec.service_time())?;
    let rel_error = (r_morph - m.r).abs() / m.r;
    let bound = morphing_error_bound(u64::from(spec.servers()))?;
    Ok(Record {
        fields: vec![
            ("m", Field::UInt(u64::from(spec.servers()))),
            ("a", Field::Num(spec.traffic())),
            ("rho", Field::Num(spec.utilization())),
            ("b", Field::Num(m.b)),
            ("c", Field::Num(m.c)),
            ("phi_b", Field::Num(m.phi_b)),
            ("w", Field::Num(m.w)),
            ("r", Field::Num(m.r)),
            ("r_morph", Field::Num(r_morph)),
            ("rel_error", Field::Num(rel_error)),
            ("bound", Field::Num(bound)),
        ],
    })
}

pub fn cmd_calc(spec: &QueueSpec, format: Format, decimals: usize) -> Result<()> {
    let record = delay_metrics_record(spec)?;
    emit(&[record], format, decimals, TextStyle::KeyValue);
    Ok(())
}

struct TableRow {
    m: u32,
    a: f64,
    b: f64,
    poisson: f64,
    phi_b: f64,
    c: f64,
    w: f64,
    r: f64,
    r_morph: f64,
}

fn table_rows() -> Result<Vec<TableRow>> {
    TABLE_SERVERS
        .iter()
        .map(|&m| {
            let a = 0.75 * f64::from(m);
            let spec = QueueSpec::from_traffic(m, a, 1.0)?;
            Ok(TableRow {
                m,
                a,
                b: erlang::erlang_b_recurrence(m, a)?,
                poisson: erlang::erlang_b_poisson(m, a)?,
                phi_b: erlang::phi_b(m, a)?,
                c: erlang::erlang_c(m, a)?,
                w: erlang::waiting_time(&spec)?,
                r: erlang::residence_time(&spec)?,
                r_morph: morphing_residence(m, 0.75, 1.0)?,
            })
        })
        .collect()
}

/// The reference table as fixed-layout text, byte-stable across runs.
pub fn table_text() -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>3} {:>7} {:>13} {:>13} {:>13} {:>13} {:>13} {:>11} {:>11}\n",
        "m", "a", "b", "poisson", "phi_b", "c", "w", "r", "r_morph"
    ));
    for row in table_rows()? {
        out.push_str(&format!(
            "{:>3} {:>7.2} {:>13.8} {:>13.8} {:>13.8} {:>13.8} {:>13.8} {:>11.6} {:>11.6}\n",
            row.m, row.a, row.b, row.poisson, row.phi_b, row.c, row.w, row.r, row.r_morph
        ));
    }
    Ok(out)
}

pub fn cmd_table(format: Format) -> Result<()> {
    match format {
        Format::Text => print_stdout(&table_text()?),
        Format::Csv | Format::Json => {
            let records: Vec<Record> = table_rows()?
                .into_iter()
                .map(|row| Record {
                    fields: vec![
                        ("m", Field::UInt(u64::from(row.m))),
                        ("a", Field::Num(row.a)),
                        ("b", Field::Num(row.b)),
                        ("poisson", Field::Num(row.poisson)),
                        ("phi_b", Field::Num(row.phi_b)),
                        ("c", Field::Num(row.c)),
                        ("w", Field::Num(row.w)),
                        ("r", Field::Num(row.r)),
                        ("r_morph", Field::Num(row.r_morph)),
                    ],
                })
                .collect();
            emit(&records, format, 8, TextStyle::Table);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Curves {
    /// Full delay-model records; delay fields empty once a >= m.
    Metrics,
    /// Loss- and delay-model per-server utilization.
    Util,
}

pub fn cmd_sweep(
    m: u32,
    a_min: f64,
    a_max: f64,
    steps: usize,
    curves: Curves,
    format: Format,
    decimals: usize,
) -> Result<()> {
    if !a_min.is_finite() || !a_max.is_finite() || a_min < 0.0 || a_max <= a_min {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= a_min < a_max, got a_min = {a_min}, a_max = {a_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    let records: Vec<Record> = (0..steps)
        .map(|i| {
            let a = a_min + (a_max - a_min) * i as f64 / (steps - 1) as f64;
            match curves {
                Curves::Metrics => sweep_metrics_record(m, a),
                Curves::Util => sweep_util_record(m, a),
            }
        })
        .collect::<Result<_>>()?;
    emit(&records, format, decimals, TextStyle::Table);
    Ok(())
}

fn sweep_metrics_record(m: u32, a: f64) -> Result<Record> {
    let b = erlang::erlang_b_recurrence(m, a)?;
    let bound = morphing_error_bound(u64::from(m))?;
    let stable = a < f64::from(m);
    let delay = if stable {
        let spec = QueueSpec::from_traffic(m, a, 1.0)?;
        let c = erlang::erlang_c(m, a)?;
        let phi = erlang::phi_b(m, a)?;
        let w = erlang::waiting_time(&spec)?;
        let r = erlang::residence_time(&spec)?;
        let r_morph = morphing_residence(m, spec.utilization(), 1.0)?;
        Some((c, phi, w, r, r_morph, (r_morph - r).abs() / r))
    } else {
        None
    };
    let opt = |v: Option<f64>| v.map_or(Field::Missing, Field::Num);
    Ok(Record {
        fields: vec![
            ("m", Field::UInt(u64::from(m))),
            ("a", Field::Num(a)),
            ("rho", Field::Num(a / f64::from(m))),
            ("b", Field::Num(b)),
            ("c", opt(delay.map(|d| d.0))),
            ("phi_b", opt(delay.map(|d| d.1))),
            ("w", opt(delay.map(|d| d.2))),
            ("r", opt(delay.map(|d| d.3))),
            ("r_morph", opt(delay.map(|d| d.4))),
            ("rel_error", opt(delay.map(|d| d.5))),
            ("bound", Field::Num(bound)),
        ],
    })
}

fn sweep_util_record(m: u32, a: f64) -> Result<Record> {
    let rho_loss = erlang::utilization_loss(m, a)?;
    let rho_delay = if a < f64::from(m) {
        Field::Num(a / f64::from(m))
    } else {
        Field::Missing
    };
    Ok(Record {
        fields: vec![
            ("m", Field::UInt(u64::from(m))),
            ("a", Field::Num(a)),
            ("rho_loss", Field::Num(rho_loss)),
            ("rho_delay", rho_delay),
        ],
    })
}

pub fn cmd_roots(
    m_max: u32,
    include_szego: bool,
    szego_points: usize,
    format: Format,
    decimals: usize,
) -> Result<()> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    if m_max > 8 {
        return Err(Error::InvalidArgument(format!(
            "correction polynomials are tabulated only for m <= 8, got m_max = {m_max}"
        )));
    }
    let mut records = Vec::new();
    let mut push = |kind: &'static str, m: u32, re: f64, im: f64| {
        records.push(Record {
            fields: vec![
                ("kind", Field::Str(kind)),
                ("m", Field::UInt(u64::from(m))),
                ("re", Field::Num(re)),
                ("im", Field::Num(im)),
            ],
        });
    };
    for m in 1..=m_max {
        for z in morphing_roots(m)?.roots {
            push("morphing", m, z.re, z.im);
        }
        let poly = CorrectionPolynomial::for_servers(m)?;
        for z in corrected_roots(poly)?.roots {
            push("corrected", m, z.re, z.im);
        }
    }
    if include_szego {
        // The curve is not tied to a polynomial order; m is zero here.
        for z in szego_curve(szego_points)?.points {
            push("szego", 0, z.re, z.im);
        }
    }
    emit(&records, format, decimals, TextStyle::Table);
    Ok(())
}

pub struct SimulateArgs {
    pub spec: QueueSpec,
    pub discipline: Discipline,
    pub completions: u64,
    pub reps: u32,
    pub warmup: Option<u64>,
    pub seed: u64,
}

pub fn cmd_simulate(args: &SimulateArgs, format: Format, decimals: usize) -> Result<()> {
    let cfg = SimConfig {
        spec: args.spec,
        discipline: args.discipline,
        n_customers: args.completions,
        n_reps: args.reps,
        warmup: args.warmup.unwrap_or(args.completions / 10),
        seed: args.seed,
    };
    let est = simulate(&cfg)?;
    let (discipline, m, a) = (
        match args.discipline {
            Discipline::Fifo => "fifo",
            Discipline::Loss => "loss",
        },
        args.spec.servers(),
        args.spec.traffic(),
    );
    let mut fields = vec![
        ("discipline", Field::Str(discipline)),
        ("m", Field::UInt(u64::from(m))),
        ("a", Field::Num(a)),
        ("rho", Field::Num(args.spec.utilization())),
        ("s", Field::Num(args.spec.service_time())),
        ("completions", Field::UInt(cfg.n_customers)),
        ("reps", Field::UInt(u64::from(cfg.n_reps))),
        ("warmup", Field::UInt(cfg.warmup)),
        ("seed", Field::UInt(cfg.seed)),
    ];
    match args.discipline {
        Discipline::Fifo => {
            let analytic = erlang::waiting_time(&args.spec)?;
            let within = (est.mean_w - analytic).abs() <= est.ci_half_width;
            fields.extend([
                ("mean_w", Field::Num(est.mean_w)),
                ("ci_half_width", Field::Num(est.ci_half_width)),
                ("mean_r", Field::Num(est.mean_r)),
                ("analytic_w", Field::Num(analytic)),
                ("within_ci", Field::Bool(within)),
            ]);
        }
        Discipline::Loss => {
            let analytic = erlang::erlang_b_recurrence(m, a)?;
            let within = (est.loss_frac - analytic).abs() <= 1.96 * est.loss_se;
            fields.extend([
                ("loss_frac", Field::Num(est.loss_frac)),
                ("loss_se", Field::Num(est.loss_se)),
                ("mean_r", Field::Num(est.mean_r)),
                ("analytic_b", Field::Num(analytic)),
                ("within_ci", Field::Bool(within)),
            ]);
        }
    }
    emit(&[Record { fields }], format, decimals, TextStyle::KeyValue);
    Ok(())
}

pub fn cmd_util_sweep(
    m: u32,
    a_values: &[f64],
    discipline: Discipline,
    seed: u64,
    format: Format,
    decimals: usize,
) -> Result<()> {
    let measured = utilization_sweep_empirical(m, a_values, discipline, seed)?;
    let records: Vec<Record> = measured
        .into_iter()
        .map(|(a, util)| {
            let analytic = match discipline {
                Discipline::Loss => erlang::utilization_loss(m, a)?,
                Discipline::Fifo => a / f64::from(m),
            };
            Ok(Record {
                fields: vec![
                    (
                        "discipline",
                        Field::Str(match discipline {
                            Discipline::Fifo => "fifo",
                            Discipline::Loss => "loss",
                        }),
                    ),
                    ("m", Field::UInt(u64::from(m))),
                    ("a", Field::Num(a)),
                    ("util_sim", Field::Num(util)),
                    ("util_analytic", Field::Num(analytic)),
                ],
            })
        })
        .collect::<Result<_>>()?;
    emit(&records, format, decimals, TextStyle::Table);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::fmt_num;

    #[test]
    fn table_text_carries_the_reference_values() {
        let text = table_text().unwrap();
        assert!(text.contains("0.42857143"));
        assert!(text.contains("1.28571429"));
        assert!(text.contains("1.757009"));
        assert!(text.contains("1.000100"));
        assert_eq!(text.lines().count(), 8);
    }

    #[test]
    fn numeric_rendering_is_fixed_width() {
        assert_eq!(fmt_num(1.2857142857142858, 8), "1.28571429");
        assert_eq!(fmt_num(-0.0, 8), "0.00000000");
    }
}
