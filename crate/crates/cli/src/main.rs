//! Command-line front end: completion, oriented analysis, the minimizing
//! sequence, cost evaluation and oracle comparison.

mod bc;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sr_elastica::cost::{evaluate, Functional};
use sr_elastica::curve::PlanarCurve;
use sr_elastica::lift::project;
use sr_elastica::nonexistence::{build_pn, build_qbar_with, convergence_table};
use sr_elastica::oracle::{minimize, OracleOptions, OracleReport};
use sr_elastica::se2::{Mode, Point2};
use sr_elastica::shooting::{analyze_oriented_with, solve_projective_with, ShootingOptions};
use sr_elastica::{Error, Tolerances};

use svg::{Plot, Stroke};

/// Environment variable with tolerance overrides, e.g.
/// `integrator=1e-12,converge=1e-9`.
const TOL_ENV: &str = "SR_ELASTICA_TOL";

/// Samples per primitive when a curve is written out.
const SAMPLES_PER_PIECE: usize = 400;

#[derive(Parser)]
#[command(name = "sr-elastica", version, about = "Planar curve completion by sub-Riemannian geodesics in SE(2)")]
struct Cli {
    #[command(flatten)]
    tol: TolFlags,
    #[command(subcommand)]
    command: Command,
}

/// Per-tolerance overrides; they take precedence over the environment.
#[derive(Args, Default)]
struct TolFlags {
    #[arg(long, global = true, value_name = "X")]
    tol_vanishing_speed: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_quadrature: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_integrator: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_event: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_converge: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_dedup_covector: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_dedup_cost: Option<f64>,
    #[arg(long, global = true, value_name = "X")]
    tol_degenerate_rho: Option<f64>,
}

impl TolFlags {
    fn resolve(&self, env: Option<&str>) -> Result<Tolerances, Error> {
        let mut tol = Tolerances::default();
        if let Some(spec) = env {
            tol = tol.with_overrides(spec).map_err(|e| Error::Parse(format!("{TOL_ENV}: {e}")))?;
        }
        let flags = [
            ("vanishing_speed", self.tol_vanishing_speed),
            ("quadrature", self.tol_quadrature),
            ("integrator", self.tol_integrator),
            ("event", self.tol_event),
            ("converge", self.tol_converge),
            ("dedup_covector", self.tol_dedup_covector),
            ("dedup_cost", self.tol_dedup_cost),
            ("degenerate_rho", self.tol_degenerate_rho),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                if !(v > 0.0) {
                    return Err(Error::Parse(format!("--tol-{} must be positive", key.replace('_', "-"))));
                }
                tol.set(key, v).map_err(Error::Parse)?;
            }
        }
        Ok(tol)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Complete a curve between projective boundary conditions.
    Complete {
        /// Boundary-condition JSON file.
        #[arg(long)]
        bc: PathBuf,
        /// Directory for completion.{json,csv,svg}.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Analyze oriented boundary conditions: is the infimum attained?
    Oriented {
        #[arg(long)]
        bc: PathBuf,
        /// Directory for oriented.{json,csv,svg}.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build the minimizing sequence for the non-attainment example.
    Counterexample {
        #[arg(long, default_value_t = sr_elastica::nonexistence::XI_DEFAULT)]
        xi: f64,
        /// Sequence indices, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        ns: Vec<usize>,
        /// Directory for convergence.{csv,json} and pn_<n>.svg.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a cost functional on a curve file.
    Costs {
        /// Curve CSV (`t,x,y` or `t,x,y,theta,u1,u2`).
        #[arg(long)]
        curve: PathBuf,
        /// One of J, C, E1, E2, E3, E4.
        #[arg(long, default_value = "J")]
        functional: String,
        /// Length weight of E3.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Compare the direct discrete minimizer with the shooting solution.
    Oracle {
        #[arg(long)]
        bc: PathBuf,
        /// Points per discrete curve.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DegenerateBoundary(_)
            | Error::Parse(_)
            | Error::InvalidCurve(_)
            | Error::InvalidSpec(_)
            | Error::InsufficientSamples { .. }
            | Error::XiTooLarge { .. }
            | Error::ZeroScale
            | Error::ZeroCost
            | Error::DegenerateSegment(_) => 2,
            Error::VanishingVelocity { .. } | Error::NonIntegrable(_) => 4,
            Error::NoConvergence { .. }
            | Error::NoDescent
            | Error::EventDetectionFailure(_)
            | Error::DegenerateIntersection(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

fn polyline(curve: &PlanarCurve) -> Vec<Point2> {
    curve.dense_samples(SAMPLES_PER_PIECE).into_iter().map(|(_, p)| p).collect()
}

fn complete(bc_path: &Path, out: &Path, tol: Tolerances) -> Result<(), Failure> {
    let bc = bc::parse(&read(bc_path)?)?;
    if bc.mode != Mode::Projective {
        return Err(Failure {
            code: 2,
            message: "`complete` needs projective boundary conditions; use `oriented` for oriented ones".into(),
        });
    }
    let results = solve_projective_with(&bc, &ShootingOptions::with_tolerances(tol))?;
    let best = &results[0];
    let curve = project(&best.trajectory)?;
    write(out, "completion.json", &best.to_json())?;
    write(out, "completion.csv", &curve.to_csv(SAMPLES_PER_PIECE))?;
    let mut plot = Plot::default();
    plot.line(polyline(&curve), "black", Stroke::Solid);
    for &t in &best.cusp_times {
        plot.dot(curve.point_at(t), "crimson");
    }
    write(out, "completion.svg", &plot.render())?;
    println!(
        "cost {} with {} cusp(s); {} candidate(s); files in {}",
        best.cost,
        best.cusp_times.len(),
        results.len(),
        out.display()
    );
    Ok(())
}

fn oriented(bc_path: &Path, out: &Path, tol: Tolerances) -> Result<(), Failure> {
    let bc = bc::parse(&read(bc_path)?)?;
    if bc.mode != Mode::Oriented {
        return Err(Failure {
            code: 2,
            message: "`oriented` needs oriented boundary conditions; use `complete` for projective ones".into(),
        });
    }
    let analysis = analyze_oriented_with(&bc, &ShootingOptions::with_tolerances(tol))?;
    write(out, "oriented.json", &analysis.to_json())?;
    if let Ok(curve) = project(&analysis.minimizer) {
        write(out, "oriented.csv", &curve.to_csv(SAMPLES_PER_PIECE))?;
        let mut plot = Plot::default();
        plot.line(polyline(&curve), "black", Stroke::Solid);
        write(out, "oriented.svg", &plot.render())?;
    }
    println!("cost {}: {}", analysis.cost, analysis.message());
    Ok(())
}

fn counterexample(xi: f64, ns: &[usize], out: &Path, tol: Tolerances) -> Result<(), Failure> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::Parse("--ns needs positive integers".into()).into());
    }
    let qbar = build_qbar_with(xi, &[], &tol)?;
    let table = convergence_table(&qbar, ns)?;
    write(out, "convergence.csv", &table.to_csv())?;
    write(out, "convergence.json", &table.to_json())?;
    let mut tails = String::from("n,tail_J,tail_C,difference\n");
    for r in &table.rows {
        tails += &format!("{},{},{},{}\n", r.n, r.tail_j, r.tail_c, r.tail_j - r.tail_c);
    }
    write(out, "tail_identity.csv", &tails)?;
    let pbar = polyline(&project(&qbar.trajectory)?);
    for &n in ns {
        let pn = build_pn(&qbar, n)?;
        let mut plot = Plot::default();
        plot.line(pbar.clone(), "gray", Stroke::Dashed)
            .line(polyline(&pn.curve), "black", Stroke::Solid)
            .dot(pn.o, "steelblue")
            .dot(pn.c, "steelblue");
        write(out, &format!("pn_{n}.svg"), &plot.render())?;
    }
    println!("{}", table.to_csv().trim_end());
    Ok(())
}

fn costs(curve_path: &Path, functional: &str, eta: Option<f64>, tol: Tolerances) -> Result<(), Failure> {
    let which = if functional.trim().eq_ignore_ascii_case("E3") {
        let eta = eta.ok_or_else(|| Error::Parse("E3 needs --eta".into()))?;
        Functional::E3 { eta }
    } else {
        functional.parse::<Functional>()?
    };
    let text = read(curve_path)?;
    let curve = PlanarCurve::from_csv(text.as_bytes())?;
    println!("{}", evaluate(&curve, which, &tol)?.to_json());
    Ok(())
}

fn oracle(bc_path: &Path, n: usize, restarts: usize, seed: u64, tol: Tolerances) -> Result<(), Failure> {
    let bc = bc::parse(&read(bc_path)?)?;
    let opts = OracleOptions {
        n,
        restarts,
        seed,
        ..OracleOptions::default()
    };
    let (_, oracle_cost) = minimize(&bc, &opts)?;
    let shooting = ShootingOptions::with_tolerances(tol);
    let report = match bc.mode {
        Mode::Projective => {
            let best = solve_projective_with(&bc, &shooting)?;
            OracleReport::new(oracle_cost, best[0].cost, None)
        }
        Mode::Oriented => {
            let analysis = analyze_oriented_with(&bc, &shooting)?;
            let note = (!analysis.projection_admissible).then(|| {
                format!(
                    "infimum not attained: the discrete costs approach the SE(2) minimum from above; {}",
                    analysis.message()
                )
            });
            OracleReport::new(oracle_cost, analysis.cost, note)
        }
    };
    println!("{}", report.to_json());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let env = std::env::var(TOL_ENV).ok();
    let tol = cli.tol.resolve(env.as_deref())?;
    match cli.command {
        Command::Complete { bc, out } => complete(&bc, &out, tol),
        Command::Oriented { bc, out } => oriented(&bc, &out, tol),
        Command::Counterexample { xi, ns, out } => counterexample(xi, &ns, &out, tol),
        Command::Costs { curve, functional, eta } => costs(&curve, &functional, eta, tol),
        Command::Oracle { bc, n, restarts, seed } => oracle(&bc, n, restarts, seed, tol),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_environment() {
        let flags = TolFlags {
            tol_integrator: Some(1e-11),
            ..TolFlags::default()
        };
        let tol = flags.resolve(Some("integrator=1e-12,event=1e-13")).unwrap();
        assert_eq!(tol.integrator, 1e-11);
        assert_eq!(tol.event, 1e-13);
    }

    #[test]
    fn rejects_nonpositive_flag() {
        let flags = TolFlags {
            tol_event: Some(0.0),
            ..TolFlags::default()
        };
        assert!(flags.resolve(None).is_err());
    }
}
