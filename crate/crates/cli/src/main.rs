//! `orw`: batch front end for the once-reinforced walk toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod grid;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use orw_core::bridge::{self, BoundBand, DeltaMapping};
use orw_core::continuum::{
    joint_density, p_series, q_auto, walker_marginal_from_joint, write_density_csv, DensityRow, Method,
    SeriesValue,
};
use orw_core::discrete::{dp_evolve, mc_simulate, DpConfig, JointPmf, McConfig};
use orw_core::genfunc::{gf_double_all, gf_to_pmf, write_coeff_csv, AssemblyForm};
use orw_core::moments::{self, MomentRow};
use orw_core::verify;
use orw_core::{make_param, NumericConfig, OrwError};

use grid::Grid;

const EXIT_DOMAIN: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "orw", version, about = "Once-reinforced random walk: lattice law, Brownian limit and checks")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "ORW_WORKERS")]
    workers: Option<usize>,

    /// JSON file with default values for any flag (flags on the command line win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Numeric {
    #[arg(long, default_value_t = 1e-12)]
    series_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long, default_value_t = 32)]
    ilt_terms: usize,
    #[arg(long, default_value_t = 10_000)]
    max_terms: usize,
}

impl Numeric {
    fn config(&self) -> orw_core::Result<NumericConfig> {
        let cfg = NumericConfig {
            series_tol: self.series_tol,
            quad_tol: self.quad_tol,
            ilt_terms: self.ilt_terms,
            max_terms: self.max_terms,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Quantity {
    /// Density of the running maximum, over b.
    #[value(name = "Q")]
    Q,
    /// Density of the walker position, over y.
    #[value(name = "P")]
    P,
    /// Joint density over y at fixed b.
    Joint,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Form {
    Derived,
    Alternate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mapping {
    Doubled,
    Identity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Band {
    AsStated,
    LimitConsistent,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact joint law P_N(x, a) by dynamic programming.
    Dp {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        steps: usize,
        /// Exact rational arithmetic (entries printed as p/q).
        #[arg(long)]
        exact: bool,
        /// Drop rows with a larger maximum.
        #[arg(long)]
        a_cap: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo histogram of (S_N, A_N).
    Mc {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        walks: u64,
        #[arg(long, default_value_t = McConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = McConfig::default().batch_size)]
        batch_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare generating-function coefficients with the recursion, exactly.
    GfCheck {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Form::Derived)]
        form: Form,
        /// Also write the coefficient table `a,N,x,coeff`.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Continuum density table over a grid.
    Density {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// `min:max:count`, inclusive.
        #[arg(long)]
        grid: Grid,
        /// Maximum for `--quantity joint`.
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moments of the maximum and walker marginals at delta = 4m.
    Moments {
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Highest moment of the maximum.
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sup-errors of rescaled lattice marginals against the continuum.
    Bridge {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Strictly decreasing list.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025])]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mapping::Doubled)]
        mapping: Mapping,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided bounds on a P{A_N = a} for the unreinforced walk.
    Bounds {
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_values_t = verify::BOUND_GAMMAS)]
        gammas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Band::AsStated)]
        band: Band,
        #[arg(long, default_value_t = bridge::FROZEN_SLACK)]
        slack: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run acceptance criteria and report PASS/FAIL per criterion.
    Verify {
        /// `all` or a comma list of criterion numbers.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        numeric: Numeric,
    },
}

/// A finished run: the bytes to write and whether a verification failed.
struct Output {
    files: Vec<(Option<PathBuf>, Vec<u8>)>,
    verified: bool,
}

impl Output {
    fn one(path: Option<PathBuf>, bytes: Vec<u8>) -> Self {
        Output {
            files: vec![(path, bytes)],
            verified: true,
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command).and_then(write_outputs) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFICATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &OrwError) -> u8 {
    match e {
        OrwError::Convergence { .. } => EXIT_CONVERGENCE,
        OrwError::Singularity(_) => EXIT_VERIFICATION,
        _ => EXIT_DOMAIN,
    }
}

/// Writes every artifact only after the whole computation succeeded.
fn write_outputs(out: Output) -> orw_core::Result<bool> {
    for (path, bytes) in out.files {
        match path {
            Some(p) => fs::write(p, bytes)?,
            None => io::stdout().lock().write_all(&bytes)?,
        }
    }
    Ok(out.verified)
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn positive(name: &str, v: f64) -> orw_core::Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(OrwError::Domain(format!("--{name} must be positive, got {v}")))
    }
}

fn steps_at_least_one(n: usize) -> orw_core::Result<()> {
    if n == 0 {
        return Err(OrwError::Domain("--steps must be at least 1".into()));
    }
    Ok(())
}

fn run(cmd: Command) -> orw_core::Result<Output> {
    match cmd {
        Command::Dp {
            delta,
            steps,
            exact,
            a_cap,
            out,
        } => {
            let param = make_param(delta)?;
            steps_at_least_one(steps)?;
            let cfg = DpConfig {
                a_cap,
                ..DpConfig::default()
            };
            let mut buf = Vec::new();
            if exact {
                dp_evolve::<BigRational>(steps, param, &cfg)?.write_csv(&mut buf)?;
            } else {
                dp_evolve::<f64>(steps, param, &cfg)?.write_csv(&mut buf)?;
            }
            Ok(Output::one(out, buf))
        }
        Command::Mc {
            delta,
            steps,
            walks,
            seed,
            batch_size,
            out,
        } => {
            let param = make_param(delta)?;
            steps_at_least_one(steps)?;
            let hist = mc_simulate(steps, param, walks, &McConfig { seed, batch_size })?;
            let mut buf = Vec::new();
            hist.write_csv(&mut buf)?;
            Ok(Output::one(out, buf))
        }
        Command::GfCheck {
            delta,
            steps,
            form,
            coeffs,
        } => {
            let param = make_param(delta)?;
            steps_at_least_one(steps)?;
            let form = match form {
                Form::Derived => AssemblyForm::Derived,
                Form::Alternate => AssemblyForm::Alternate,
            };
            let mut files = vec![];
            let mut mismatches = vec![];
            for n in 1..=steps {
                let gf: JointPmf<BigRational> = gf_to_pmf(n, param, form)?;
                let dp: JointPmf<BigRational> = dp_evolve(n, param, &DpConfig::default())?;
                if gf != dp {
                    mismatches.push(n);
                }
            }
            if let Some(path) = coeffs {
                let doubles = gf_double_all::<BigRational>(steps, delta, steps, form)?;
                let mut buf = Vec::new();
                write_coeff_csv(&doubles, &mut buf)?;
                files.push((Some(path), buf));
            }
            let summary = serde_json::json!({
                "delta": delta,
                "steps": steps,
                "identical": mismatches.is_empty(),
                "mismatched_steps": mismatches,
            });
            files.push((None, json_bytes(&summary)));
            Ok(Output {
                files,
                verified: mismatches.is_empty(),
            })
        }
        Command::Density {
            delta,
            t,
            quantity,
            grid,
            b,
            format,
            numeric,
            out,
        } => {
            make_param(delta)?;
            positive("t", t)?;
            let cfg = numeric.config()?;
            let points = grid.points();
            let b = match quantity {
                Quantity::Joint => {
                    let b = b.ok_or_else(|| OrwError::Domain("--quantity joint needs --b".into()))?;
                    positive("b", b)?;
                    Some(b)
                }
                _ => None,
            };
            if points.iter().any(|&c| c < 0.0) {
                return Err(OrwError::Domain("grid coordinates must be >= 0".into()));
            }
            let m = delta / 4.0;
            let integer_m = m >= 0.0 && (m - m.round()).abs() < 1e-12;
            let rows = points
                .iter()
                .map(|&c| {
                    let value = match quantity {
                        Quantity::Q if c == 0.0 => Ok(SeriesValue {
                            value: 0.0,
                            terms_used: 0,
                            tail_bound: 0.0,
                            method: Method::ClosedForm,
                            gamma: Some(0.0),
                        }),
                        Quantity::Q => q_auto(t, c, delta, &cfg),
                        Quantity::P if integer_m => p_series(t, c, m.round() as u32, &cfg),
                        Quantity::P => walker_marginal_from_joint(t, c, delta, &cfg),
                        Quantity::Joint => joint_density(t, c, b.unwrap_or(0.0), delta, &cfg).map(|v| SeriesValue {
                            value: v,
                            terms_used: cfg.ilt_terms,
                            tail_bound: 0.0,
                            method: Method::IltOracle,
                            gamma: None,
                        }),
                    }?;
                    Ok(DensityRow { t, delta, coord: c, value })
                })
                .collect::<orw_core::Result<Vec<_>>>()?;
            let buf = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_density_csv(&rows, &mut buf)?;
                    buf
                }
                Format::Json => json_bytes(
                    &rows
                        .iter()
                        .map(|r| serde_json::json!({"t": r.t, "delta": r.delta, "coord": r.coord, "value": r.value}))
                        .collect::<Vec<_>>(),
                ),
            };
            Ok(Output::one(out, buf))
        }
        Command::Moments {
            m,
            t,
            k_max,
            format,
            numeric,
            out,
        } => {
            orw_core::ReinforcementParam::from_m(m)?;
            positive("t", t)?;
            let cfg = numeric.config()?;
            let mut rows = vec![];
            let mut push = |q: &str, r| rows.push(MomentRow { quantity: q.into(), result: r });
            for k in 0..=k_max {
                push("max_moment", moments::max_moment(k, t, m, &cfg)?);
                push("max_moment_asymptotic", moments::max_moment_asymptotic(k, t, m));
                push("max_moment_asymptotic_rederived", moments::max_moment_asymptotic_rederived(k, t, m));
            }
            push("walker_mean", moments::walker_mean(t, m, &cfg)?);
            push("walker_mean_laplace", moments::walker_moment_laplace(1, t, m, &cfg)?);
            push("walker_second_moment", moments::walker_second_moment(t, m, &cfg)?);
            push("walker_second_moment_laplace", moments::walker_moment_laplace(2, t, m, &cfg)?);
            push("walker_second_moment_asymptotic", moments::walker_second_moment_asymptotic(t, m));
            let buf = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    moments::write_moments_csv(&rows, &mut buf)?;
                    buf
                }
                Format::Json => json_bytes(
                    &rows
                        .iter()
                        .map(|r| serde_json::json!({"quantity": r.quantity, "result": r.result}))
                        .collect::<Vec<_>>(),
                ),
            };
            Ok(Output::one(out, buf))
        }
        Command::Bridge {
            delta,
            t,
            eps,
            mapping,
            format,
            numeric,
            out,
        } => {
            make_param(delta)?;
            positive("t", t)?;
            let cfg = numeric.config()?;
            for &e in &eps {
                positive("eps", e)?;
                if bridge::steps_for(t, e) < 10 {
                    return Err(OrwError::Domain(format!("eps = {e} gives fewer than 10 steps")));
                }
            }
            let mapping = match mapping {
                Mapping::Doubled => DeltaMapping::Doubled,
                Mapping::Identity => DeltaMapping::Identity,
            };
            let rows = bridge::convergence_report(t, delta, &eps, mapping, &cfg)?;
            let buf = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    bridge::write_convergence_csv(&rows, &mut buf)?;
                    buf
                }
                Format::Json => json_bytes(&rows),
            };
            Ok(Output {
                verified: bridge::is_non_increasing(&rows, 0.1),
                files: vec![(out, buf)],
            })
        }
        Command::Bounds {
            steps,
            gammas,
            band,
            slack,
            json,
        } => {
            steps_at_least_one(steps)?;
            if gammas.iter().any(|&g| !(g > 0.0)) {
                return Err(OrwError::Domain("--gammas must be positive".into()));
            }
            let band = match band {
                Band::AsStated => BoundBand::AsStated,
                Band::LimitConsistent => BoundBand::LimitConsistent,
            };
            let grid = bridge::a_grid_for(steps, &gammas);
            let report = bridge::max_bound_check(steps, &grid, band, slack)?;
            let mut buf = report.to_json().into_bytes();
            buf.push(b'\n');
            Ok(Output {
                verified: report.passed,
                files: vec![(json, buf)],
            })
        }
        Command::Verify { suite, json, numeric } => {
            let cfg = numeric.config()?;
            let ids = parse_suite(&suite)?;
            let mut lines = Vec::new();
            let mut criteria = vec![];
            for id in ids {
                let r = verify::run(id, &cfg);
                writeln!(lines, "{}", r.line())?;
                for n in &r.notes {
                    writeln!(lines, "      note: {n}")?;
                }
                criteria.push(r);
            }
            let report = verify::SuiteReport {
                passed: criteria.iter().all(|c| c.passed),
                criteria,
            };
            let mut files = vec![(None, lines)];
            if let Some(p) = json {
                files.push((Some(p), json_bytes(&report)));
            }
            Ok(Output {
                files,
                verified: report.passed,
            })
        }
    }
}

fn parse_suite(s: &str) -> orw_core::Result<Vec<u32>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(verify::ALL.to_vec());
    }
    s.split(',')
        .map(|p| {
            let p = p.trim().trim_start_matches(['A', 'a']);
            p.parse::<u32>()
                .ok()
                .filter(|id| verify::ALL.contains(id))
                .ok_or_else(|| OrwError::Domain(format!("unknown criterion {p:?} in --suite")))
        })
        .collect()
}
