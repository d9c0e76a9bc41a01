//! Command-line front end: `demo` runs a built-in model's fact table,
//! `check` runs one operation against a TOML system file.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 input/usage error.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::exterior::VectorField;
use crate::models;
use crate::report::{render_text, Verdict};
use crate::sections;
use crate::solutions;
use crate::system::RunConfig;
use crate::systemfile::SystemFile;
use crate::{kernels, reduction};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "msym",
    version,
    about = "Premultisymplectic system checks on coordinate charts"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Sample points per check.
    #[arg(long, global = true, default_value_t = 8)]
    points: usize,
    /// Seed for all sampling and random constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Algebraic residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Finite-difference residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-5)]
    fd_tol: f64,
    /// Central-difference step.
    #[arg(long, global = true, default_value_t = 1e-5)]
    fd_step: f64,
    /// Sampling box as `lo,hi` per coordinate.
    #[arg(long, global = true, default_value = "-1,1", value_parser = parse_box)]
    r#box: (f64, f64),
    /// Worker threads for fact tables.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
}

fn parse_box(src: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `lo,hi`".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| "bad lower bound")?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| "bad upper bound")?;
    if lo >= hi {
        return Err("empty box".into());
    }
    Ok((lo, hi))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a built-in model's expected-fact table.
    Demo {
        /// Model name (see `msym demo --help` for the list).
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(models::model_names()))]
        model: String,
        /// Only run facts whose name contains this substring.
        #[arg(long)]
        check: Option<String>,
    },
    /// Run one check against a TOML system file.
    Check {
        /// Path to the system file.
        file: String,
        #[command(subcommand)]
        what: CheckCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Triple-contraction variationality test.
    Variational,
    /// Kernel distribution at the sample points.
    Kernel {
        /// Fail unless the vertical kernel has this dimension everywhere.
        #[arg(long)]
        expect_dim: Option<usize>,
    },
    /// Expanded-solution test for a named distribution.
    Expanded {
        #[arg(long)]
        dist: String,
    },
    /// Kernel-relatedness of two named distributions.
    Related {
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
    },
    /// Finite-difference involutivity of a named distribution.
    Involutive {
        #[arg(long)]
        dist: String,
    },
    /// Solution test for a named section.
    Section {
        #[arg(long)]
        section: String,
    },
    /// Build the quotient declared in the file and emit the reduced system.
    Reduce {
        /// Write the reduced system file here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Weak-kernel test for a coordinate direction or a named distribution's
    /// generators.
    WeakKernel {
        #[arg(long, conflicts_with = "dist")]
        dir: Option<String>,
        #[arg(long)]
        dist: Option<String>,
    },
}

/// Everything a run produced: exit code plus rendered output.
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Outcome {
        Outcome {
            exit_code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: u32,
    command: &'a str,
    subject: &'a str,
    pass: bool,
    verdicts: &'a [Verdict],
}

fn render(command: &str, subject: &str, verdicts: &[Verdict], output: Output) -> (bool, String) {
    let pass = verdicts.iter().all(|v| v.pass);
    let body = match output {
        Output::Text => render_text(verdicts),
        Output::Json => {
            let report = JsonReport {
                schema: 1,
                command,
                subject,
                pass,
                verdicts,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
    };
    (pass, body)
}

/// Run with pre-split arguments; the binary wraps this.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap help/version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            return Outcome {
                exit_code: code,
                stdout: String::new(),
                stderr: e.to_string(),
            };
        }
    };
    let cfg = RunConfig {
        points: cli.run.points,
        seed: cli.run.seed,
        box_lo: cli.run.r#box.0,
        box_hi: cli.run.r#box.1,
        jobs: cli.run.jobs,
        tol: crate::system::Tolerances {
            algebraic: cli.run.tol,
            fd: cli.run.fd_tol.min(1e-3),
            involutive: cli.run.fd_tol,
            fd_step: cli.run.fd_step,
            ..Default::default()
        },
    };
    match cli.command {
        Command::Demo { model, check } => run_demo(&model, check.as_deref(), &cfg, cli.run.output),
        Command::Check { file, what } => run_check(&file, &what, cfg, cli.run.output),
    }
}

fn run_demo(model_name: &str, filter: Option<&str>, cfg: &RunConfig, output: Output) -> Outcome {
    let model = match models::by_name(model_name) {
        Ok(m) => m,
        Err(e) => return Outcome::usage(format!("{e}\n")),
    };
    let verdicts = model.run_facts(cfg, filter);
    if verdicts.is_empty() {
        return Outcome::usage(format!("no facts match filter {filter:?}\n"));
    }
    let (pass, body) = render("demo", model_name, &verdicts, output);
    Outcome {
        exit_code: if pass { EXIT_PASS } else { EXIT_CHECK_FAILED },
        stdout: body,
        stderr: String::new(),
    }
}

fn run_check(path: &str, what: &CheckCommand, mut cfg: RunConfig, output: Output) -> Outcome {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(format!("cannot read `{path}`: {e}\n")),
    };
    let file = match SystemFile::parse(&src) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(format!("{e}\n")),
    };
    if let Err(e) = file.apply_overrides(&src, &mut cfg) {
        return Outcome::usage(format!("{e}\n"));
    }
    let points = cfg.sample_box(file.system.dim());
    let started = Instant::now();

    let verdict = match what {
        CheckCommand::Variational => {
            let mut worst: f64 = 0.0;
            let mut pass = true;
            let mut witness = None;
            for p in &points {
                let omega = file.system.omega().at(p);
                let (ok, wit) =
                    kernels::is_variational_point(&omega, file.system.chart(), cfg.tol.algebraic);
                pass &= ok;
                if let Some(w) = wit {
                    worst = worst.max(w.residual);
                    witness = Some(json!({
                        "triple": w.triple.iter().map(|&i| file.system.chart().name(i)).collect::<Vec<_>>(),
                        "residual": w.residual,
                    }));
                }
            }
            let mut v = Verdict::new("variational", "", pass, worst);
            if let Some(w) = witness {
                v = v.with_witness(w);
            }
            v
        }
        CheckCommand::Kernel { expect_dim } => {
            let mut worst: f64 = 0.0;
            let mut pass = true;
            let mut dims = Vec::new();
            for p in &points {
                let omega = file.system.omega().at(p);
                let rep =
                    kernels::kernel_distribution_point(&omega, file.system.chart(), cfg.tol.rank);
                worst = worst.max(rep.max_residual);
                if let Some(d) = expect_dim {
                    pass &= rep.k_dim == *d;
                }
                dims.push(rep.k_dim);
            }
            Verdict::new("kernel", "", pass, worst).with_witness(json!({ "dims": dims }))
        }
        CheckCommand::Expanded { dist } => {
            let Some(d) = file.distribution(dist) else {
                return Outcome::usage(format!("unknown distribution `{dist}`\n"));
            };
            let mut pass = true;
            let mut worst: f64 = 0.0;
            let mut witness = None;
            for p in &points {
                let omega = file.system.omega().at(p);
                let (ok, wit) =
                    solutions::is_expanded_solution_point(d, &omega, p, cfg.tol.algebraic);
                pass &= ok;
                if let Some(w) = wit {
                    worst = worst.max(w.residual);
                    witness = Some(json!({
                        "generators": w.generator_indices,
                        "contraction": w.contraction,
                    }));
                }
            }
            let mut v = Verdict::new("expanded", dist.clone(), pass, worst);
            if let Some(w) = witness {
                v = v.with_witness(w);
            }
            v
        }
        CheckCommand::Related { d1, d2 } => {
            if d1.trim().is_empty() || d2.trim().is_empty() {
                return Outcome::usage("empty distribution name\n");
            }
            let (Some(a), Some(b)) = (file.distribution(d1), file.distribution(d2)) else {
                return Outcome::usage(format!("unknown distribution `{d1}` or `{d2}`\n"));
            };
            let (ok, wit) =
                solutions::kernel_related(a, b, &file.system, &points, cfg.tol.algebraic);
            let mut v = Verdict::new(
                "related",
                format!("{d1} {d2}"),
                ok,
                wit.as_ref().map(|w| w.residual).unwrap_or(0.0),
            );
            if let Some(w) = wit {
                v = v.with_witness(json!({
                    "generators": w.generator_indices,
                    "contraction": w.contraction,
                }));
            }
            v
        }
        CheckCommand::Involutive { dist } => {
            let Some(d) = file.distribution(dist) else {
                return Outcome::usage(format!("unknown distribution `{dist}`\n"));
            };
            let pass = points
                .iter()
                .all(|p| solutions::is_involutive_point(d, p, cfg.tol.fd_step, cfg.tol.involutive));
            Verdict::new("involutive", dist.clone(), pass, 0.0)
        }
        CheckCommand::Section { section } => {
            let Some(s) = file.section(section) else {
                return Outcome::usage(format!("unknown section `{section}`\n"));
            };
            let m = file.system.base_dim();
            let base_points: Vec<Vec<f64>> = points.iter().map(|p| p[..m].to_vec()).collect();
            let (ok, worst) = sections::section_is_solution(
                s,
                &file.system,
                &base_points,
                cfg.tol.fd_step,
                cfg.tol.algebraic.max(cfg.tol.fd),
            );
            Verdict::new("section", section.clone(), ok, worst)
        }
        CheckCommand::Reduce { out } => {
            let Some((dropped, beta)) = file.quotient.clone() else {
                return Outcome::usage("system file declares no [quotient]\n");
            };
            match reduction::build_quotient(
                &file.system,
                &dropped,
                &beta,
                &points,
                cfg.tol.fd_step,
                cfg.tol.algebraic.max(cfg.tol.fd),
            ) {
                Ok(reduced) => {
                    let emitted = match file.emit_reduced(&dropped, &beta) {
                        Ok(e) => e,
                        Err(e) => return Outcome::usage(format!("{e}\n")),
                    };
                    if let Some(path) = out {
                        if let Err(e) = std::fs::write(path, &emitted) {
                            return Outcome::usage(format!("cannot write output: {e}\n"));
                        }
                    }
                    Verdict::new(
                        "reduce",
                        format!("{:?}", dropped),
                        true,
                        reduced.certificate.kernel_residual,
                    )
                    .with_witness(json!({
                        "slice_dependence": reduced.certificate.slice_dependence,
                        "reduced_system": emitted,
                    }))
                }
                Err(e @ (Error::NotInKernel { .. } | Error::NonProjectable { .. })) => {
                    Verdict::new("reduce", format!("{:?}", dropped), false, f64::NAN)
                        .with_witness(json!({ "error": e.to_string() }))
                }
                Err(e) => return Outcome::usage(format!("{e}\n")),
            }
        }
        CheckCommand::WeakKernel { dir, dist } => {
            let fields: Vec<(String, VectorField)> = match (dir, dist) {
                (Some(name), None) => {
                    let Some(idx) = file.system.chart().index_of(name) else {
                        return Outcome::usage(format!("unknown coordinate `{name}`\n"));
                    };
                    vec![(
                        name.clone(),
                        VectorField::coordinate(file.system.chart().clone(), idx),
                    )]
                }
                (None, Some(name)) => match file.distribution(name) {
                    Some(d) => d
                        .generators()
                        .iter()
                        .enumerate()
                        .map(|(i, g)| (format!("{name}[{i}]"), g.clone()))
                        .collect(),
                    None => return Outcome::usage(format!("unknown distribution `{name}`\n")),
                },
                _ => return Outcome::usage("weak-kernel needs --dir or --dist\n"),
            };
            let mut pass = true;
            let mut worst: f64 = 0.0;
            for (_, field) in &fields {
                match sections::weak_kernel_test(field, &file.system, &points, cfg.tol.algebraic) {
                    Ok((ok, r)) => {
                        pass &= ok;
                        worst = worst.max(r);
                    }
                    Err(e) => return Outcome::usage(format!("{e}\n")),
                }
            }
            Verdict::new("weak-kernel", "", pass, worst)
        }
    };

    let mut verdict = verdict;
    verdict.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let verdicts = vec![verdict];
    let (pass, body) = render("check", path, &verdicts, output);
    Outcome {
        exit_code: if pass { EXIT_PASS } else { EXIT_CHECK_FAILED },
        stdout: body,
        stderr: String::new(),
    }
}
