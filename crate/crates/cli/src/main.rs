use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scaled_bregman::families::{Binomial, FamilySpec};
use scaled_bregman::grid::{discrimination_grid, write_csv, AxisRange, GridSpec};
use scaled_bregman::suites::{Suite, DEFAULT_SEED};
use scaled_bregman::{b_phi, d_phi, DiscreteMeasure, Error, Generator, NaturalParam};

/// Divergences and scaled Bregman distances between probability laws.
///
/// Exit status: 0 success, 1 failed property check, 2 malformed input,
/// 3 domain error.
#[derive(Debug, Parser)]
#[command(name = "sbreg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two discrete measures given as JSON files
    /// `{"support": [...], "mass": [...]}`.
    Divergence(DivergenceArgs),
    /// Sweep B_alpha(P, Q | beta P + (1 - beta) Q) over an (alpha, beta) grid
    /// and write it as CSV.
    ///
    /// Grid points at alpha = 0 or alpha = 1 use the reverse Kullback-Leibler
    /// and Kullback-Leibler generators.
    Grid3d(GridArgs),
    /// Closed-form power divergence or power distance inside an exponential
    /// family.
    Expfam(ExpfamArgs),
    /// Run a property suite and report the largest deviation per property.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    /// D_phi(P, Q)
    Dphi,
    /// B_phi(P, Q | M), with M = Q when --m is absent
    Bphi,
}

#[derive(Debug, clap::Args)]
struct DivergenceArgs {
    /// Generator: kl | rkl | tv | pearson | lecam | power:<alpha>
    #[arg(long, value_parser = parse_generator)]
    phi: Generator,
    #[arg(long)]
    p: PathBuf,
    #[arg(long)]
    q: PathBuf,
    /// Scale measure (bphi only).
    #[arg(long)]
    m: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bphi")]
    kind: Kind,
}

#[derive(Debug, clap::Args)]
struct GridArgs {
    /// binomial:<n>
    #[arg(long)]
    family: String,
    /// Success probability of P.
    #[arg(long)]
    ptilde: f64,
    /// Success probability of Q.
    #[arg(long)]
    qtilde: f64,
    /// <min>:<max>:<steps>
    #[arg(long, default_value = "0.2:2:50", value_parser = parse_range, allow_hyphen_values = true)]
    alpha: AxisRange,
    /// <min>:<max>:<steps>, within [0, 1]
    #[arg(long, default_value = "0:1:50", value_parser = parse_range)]
    beta: AxisRange,
    /// Output CSV path; `-` writes to stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Quantity {
    /// D_alpha(P_theta1, P_theta2)
    Dalpha,
    /// B_alpha(P_theta1, P_theta2 | P_theta0)
    Balpha,
}

#[derive(Debug, clap::Args)]
struct ExpfamArgs {
    /// binomial:<n> | rayleigh | poisson-process:<t> | wiener:<t> | gbm:<t>,<sigma>
    #[arg(long, value_parser = parse_family)]
    family: FamilySpec,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Comma-separated natural parameter.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    theta1: Vector,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    theta2: Vector,
    /// Required for balpha.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    theta0: Option<Vector>,
    #[arg(long, value_enum, default_value = "balpha")]
    quantity: Quantity,
    /// Read the thetas as model parameters: success probability (binomial),
    /// log-intensity (poisson-process), scale (wiener), drift (gbm).
    #[arg(long)]
    model: bool,
}

#[derive(Debug, clap::Args)]
struct CheckArgs {
    /// identities | oracle | sufficiency | counterexample | limits | shift | all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_generator(s: &str) -> Result<Generator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<FamilySpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<AxisRange, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated parameter vector.
#[derive(Debug, Clone)]
struct Vector(Vec<f64>);

fn parse_vector(s: &str) -> Result<Vector, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("invalid number {x:?}")))
        .collect::<Result<_, _>>()
        .map(Vector)
}

enum Failure {
    Input(String),
    Domain(String),
    Property,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_measure(path: &Path) -> Result<DiscreteMeasure, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    DiscreteMeasure::from_json(&text).map_err(|e| match Failure::from(e) {
        Failure::Input(m) | Failure::Domain(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn divergence(args: DivergenceArgs) -> Result<(), Failure> {
    let p = read_measure(&args.p)?;
    let q = read_measure(&args.q)?;
    let value = match args.kind {
        Kind::Dphi => {
            if args.m.is_some() {
                return Err(Failure::Input("--m applies to --kind bphi only".into()));
            }
            d_phi(&args.phi, &p, &q)?
        }
        Kind::Bphi => {
            let m = match &args.m {
                Some(path) => read_measure(path)?,
                None => q.clone(),
            };
            b_phi(&args.phi, &p, &q, &m)?
        }
    };
    println!("{value}");
    Ok(())
}

fn grid3d(args: GridArgs) -> Result<(), Failure> {
    let n = match args.family.parse::<FamilySpec>() {
        Ok(FamilySpec::Binomial(b)) => b.n(),
        Ok(_) => return Err(Failure::Input("grid3d supports binomial:<n> families only".into())),
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    let bin = Binomial::new(n)?;
    let law = |ptilde: f64| -> Result<DiscreteMeasure, Failure> {
        if !(ptilde > 0.0 && ptilde < 1.0) {
            return Err(Failure::Domain(format!("success probability {ptilde} outside (0, 1)")));
        }
        Ok(DiscreteMeasure::probability(bin.pmf_success(ptilde))?)
    };
    let p = law(args.ptilde)?;
    let q = law(args.qtilde)?;
    let spec = GridSpec::new(args.alpha, args.beta).map_err(|e| Failure::Input(e.to_string()))?;
    let points = discrimination_grid(&p, &q, &spec)?;
    if args.out.as_os_str() == "-" {
        write_csv(io::stdout().lock(), &points)?;
    } else {
        let file = fs::File::create(&args.out)
            .map_err(|e| Failure::Input(format!("{}: {e}", args.out.display())))?;
        write_csv(BufWriter::new(file), &points)?;
    }
    Ok(())
}

fn expfam(args: ExpfamArgs) -> Result<(), Failure> {
    let fam = args.family.family();
    let natural = |v: &Vector| -> Result<NaturalParam, Failure> {
        if args.model {
            Ok(args.family.natural_from_model(&v.0)?)
        } else {
            Ok(NaturalParam(v.0.clone()))
        }
    };
    let t1 = natural(&args.theta1)?;
    let t2 = natural(&args.theta2)?;
    let value = match args.quantity {
        Quantity::Dalpha => fam.d_alpha(args.alpha, &t1, &t2)?,
        Quantity::Balpha => {
            let t0 = args
                .theta0
                .as_ref()
                .ok_or_else(|| Failure::Input("--theta0 is required for --quantity balpha".into()))?;
            fam.b_alpha(args.alpha, &t1, &t2, &natural(t0)?)?
        }
    };
    println!("{value}");
    Ok(())
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse().map_err(|e: Error| Failure::Input(e.to_string()))?]
    };
    let mut all_passed = true;
    let mut out = io::stdout().lock();
    for suite in suites {
        for outcome in suite.run(args.seed)? {
            all_passed &= outcome.passed;
            writeln!(out, "[{suite}] {outcome}")?;
        }
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Divergence(a) => divergence(a),
        Command::Grid3d(a) => grid3d(a),
        Command::Expfam(a) => expfam(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("input-error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("domain-error: {msg}");
            ExitCode::from(3)
        }
    }
}
