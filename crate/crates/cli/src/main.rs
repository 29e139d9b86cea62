use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use loci::certify::{certify_add_members, certify_add_vector, certify_linear_combo, certify_multi_combo};
use loci::locus::{solve_on_ray_with, DEFAULT_RAY_SAMPLES};
use loci::reference::{all_checks, Relation};
use loci::trace::{render_csv, render_svg, DEFAULT_RESOLUTION};
use loci::transport::SpaceSource;
use loci::{eval_g, is_member, trace_locus, Certificate, GramSpace, LocusFile, LocusSpec, Vector, Window};

/// Loci of weighted distance sums in real inner product spaces.
#[derive(Parser)]
#[command(name = "loci", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a space file defines an inner product and print its Gram matrix.
    Validate { space: PathBuf },
    /// Evaluate g at a point.
    Eval {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        point: Vector,
    },
    /// Decide whether a point lies on the locus. Exits 1 when it does not.
    Member {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        point: Vector,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Find where a ray crosses the locus.
    Solve {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        origin: Vector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        direction: Vector,
        /// Parameter range as `t_min,t_max`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        range: (f64, f64),
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_RAY_SAMPLES)]
        samples: usize,
    },
    /// Issue certificates, one JSON line each, with audits.
    Certify {
        #[command(subcommand)]
        which: CertifyCommand,
    },
    /// Materialize the Gram matrix of a basis oracle and attach a locus to it.
    Transport { oracle: PathBuf, locus: PathBuf },
    /// Trace a planar locus and write SVG and/or CSV.
    Trace {
        #[command(flatten)]
        input: LocusInput,
        /// `x_min,x_max,y_min,y_max`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window_bounds)]
        window: [f64; 4],
        /// Grid cells per axis.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        res: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also trace the level `-c`, giving both branches of a hyperbola.
        #[arg(long)]
        symmetric: bool,
    },
    /// Run the built-in worked examples and print a pass/fail table.
    VerifyPaper {
        /// Print one JSON object per check instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Audit every fired certificate on seeded random instances.
    Soundness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

#[derive(Args)]
struct LocusInput {
    /// Space file: a Gram matrix or a basis oracle.
    space: PathBuf,
    /// Locus file with foci, alphas and c.
    locus: PathBuf,
}

impl LocusInput {
    fn load(&self) -> anyhow::Result<(GramSpace, LocusSpec)> {
        let space = GramSpace::from_file(&self.space)?;
        let spec = LocusSpec::from_file(&self.locus)?;
        spec.check(&space)
            .with_context(|| format!("{} does not fit {}", self.locus.display(), self.space.display()))?;
        Ok((space, spec))
    }
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// `z + y` for a member `z` and any vector `y`.
    Add {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        point: Vector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        vector: Vector,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// `v + w` for two members.
    Members {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        v: Vector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        w: Vector,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// `gamma v + beta w` for two members.
    Combo {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        v: Vector,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vector)]
        w: Vector,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// `Σ beta_j v_j` for several members; repeat `--vector` and `--beta`.
    Multi {
        #[command(flatten)]
        input: LocusInput,
        #[arg(long = "vector", required = true, allow_hyphen_values = true, value_parser = parse_vector)]
        vectors: Vec<Vector>,
        #[arg(long = "beta", required = true, allow_hyphen_values = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            let v: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{p}` is not finite"))
            }
        })
        .collect()
}

fn parse_vector(s: &str) -> Result<Vector, String> {
    Vector::try_new(parse_floats(s)?).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    match parse_floats(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err("expected `t_min,t_max`".into()),
    }
}

fn parse_window_bounds(s: &str) -> Result<[f64; 4], String> {
    parse_floats(s)?.try_into().map_err(|_| "expected `x_min,x_max,y_min,y_max`".to_string())
}

/// Six significant digits, for tables.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Prints certificate reports; `Ok(false)` if a fired, non-suspect one fails its audit.
fn print_certificates(certs: &[Certificate], space: &GramSpace, spec: &LocusSpec) -> anyhow::Result<bool> {
    let mut sound = true;
    for cert in certs {
        let report = cert.report(space, spec);
        if report.audit == Some(false) && !report.flags.suspect_direction {
            sound = false;
        }
        println!("{}", serde_json::to_string(&report)?);
    }
    Ok(sound)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let ok = |good: bool| if good { ExitCode::SUCCESS } else { ExitCode::from(1) };
    match cli.command {
        Command::Validate { space } => {
            let file = SpaceSource::read(&space)?.materialize()?;
            println!("{}", serde_json::to_string(&file)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { input, point } => {
            let (space, spec) = input.load()?;
            println!("{}", eval_g(&space, &spec, &point)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Member { input, point, tol } => {
            let (space, spec) = input.load()?;
            let member = is_member(&space, &spec, &point, tol)?;
            println!("{member}");
            Ok(ok(member))
        }
        Command::Solve { input, origin, direction, range, tol, samples } => {
            let (space, spec) = input.load()?;
            let roots = solve_on_ray_with(&space, &spec, &origin, &direction, range.0, range.1, tol, samples)?;
            for t in roots {
                let point = origin.along(&direction, t);
                let residual = eval_g(&space, &spec, &point)? - spec.c();
                println!("{}", json!({ "t": t, "point": point, "residual": residual }));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { which } => {
            let (input, certs) = match which {
                CertifyCommand::Add { input, point, vector, tol } => {
                    let (space, spec) = input.load()?;
                    let certs = certify_add_vector(&space, &spec, &point, &vector, tol)?;
                    ((space, spec), certs)
                }
                CertifyCommand::Members { input, v, w, tol } => {
                    let (space, spec) = input.load()?;
                    let certs = certify_add_members(&space, &spec, &v, &w, tol)?;
                    ((space, spec), certs)
                }
                CertifyCommand::Combo { input, v, w, gamma, beta, tol } => {
                    let (space, spec) = input.load()?;
                    let certs = certify_linear_combo(&space, &spec, &v, &w, gamma, beta, tol)?;
                    ((space, spec), certs)
                }
                CertifyCommand::Multi { input, vectors, betas, tol } => {
                    let (space, spec) = input.load()?;
                    let certs = certify_multi_combo(&space, &spec, &vectors, &betas, tol)?;
                    ((space, spec), certs)
                }
            };
            let (space, spec) = input;
            Ok(ok(print_certificates(&certs, &space, &spec)?))
        }
        Command::Transport { oracle, locus } => {
            let source = SpaceSource::read(&oracle)?;
            let materialized = source.materialize()?;
            let space = materialized.clone().into_space()?;
            let mut locus_file = LocusFile::read(&locus)?;
            let spec = locus_file.clone().into_spec()?;
            spec.check(&space)?;
            locus_file.space = None;
            println!("{}", json!({ "space": materialized, "locus": locus_file }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { input, window, res, svg, csv, symmetric } => {
            let (space, spec) = input.load()?;
            let [x_min, x_max, y_min, y_max] = window;
            let window = Window::new(x_min, x_max, y_min, y_max, res, res)?;
            let mut lines = trace_locus(&space, &spec, &window)?;
            if symmetric && spec.c() != 0.0 {
                lines.extend(trace_locus(&space, &spec.with_level(-spec.c())?, &window)?);
            }
            if let Some(path) = &svg {
                write(path, &render_svg(&lines, &window))?;
            }
            if let Some(path) = &csv {
                write(path, &render_csv(&lines))?;
            }
            let closed = lines.iter().filter(|l| l.closed).count();
            println!("{} polylines ({} closed, {} open)", lines.len(), closed, lines.len() - closed);
            if lines.is_empty() {
                println!("note: the locus does not meet the window");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyPaper { json } => {
            let checks = all_checks()?;
            if json {
                for c in &checks {
                    println!("{}", serde_json::to_string(c)?);
                }
            } else {
                println!(
                    "{:<4} {:<52} {:>14} {:>3} {:>12} {:>10}  result",
                    "id", "check", "computed", "", "expected", "tol"
                );
                for c in &checks {
                    let rel = match c.relation {
                        Relation::Approx => "~",
                        Relation::AtMost => "<=",
                        Relation::AtLeast => ">=",
                    };
                    println!(
                        "{:<4} {:<52} {:>14} {:>3} {:>12} {:>10}  {}",
                        c.id,
                        c.description,
                        sig6(c.computed),
                        rel,
                        sig6(c.expected),
                        sig6(c.tol),
                        if c.pass { "PASS" } else { "FAIL" }
                    );
                }
                let failed = checks.iter().filter(|c| !c.pass).count();
                println!("{} checks, {} passed, {} failed", checks.len(), checks.len() - failed, failed);
            }
            Ok(ok(checks.iter().all(|c| c.pass)))
        }
        Command::Soundness { seed, instances } => {
            let report = loci::sample::soundness_sweep(seed, instances);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ok(report.sound()))
        }
    }
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// 1 for inputs that are well-formed but fail a mathematical requirement,
/// 2 for unreadable or malformed input.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    use loci::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::NotSymmetric { .. }
            | E::NotPositiveDefinite { .. }
            | E::NotAMember { .. }
            | E::FocusCoincidence(_)
            | E::NegativeCoefficient(_)
            | E::NonPositiveCoefficient(_)
            | E::ZeroTailVector { .. }
            | E::ZeroVector
            | E::DegenerateTriangle,
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("LOCUS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
