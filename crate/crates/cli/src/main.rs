use ader::config::RunConfig;
use ader::driver::{self, ExactRiemannRequest};
use ader::error::{Error, Result};
use ader::problems::reference::ReferenceProfile;
use ader::problems::{problem, PhysicsOverrides};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ader", version, about = "High-order ADER-WENO finite-volume solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration to its final time.
    Run(RunArgs),
    /// Run a configuration on a sequence of grids and tabulate errors.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Comma separated cell counts along x.
        #[arg(long, value_delimiter = ',', required = true)]
        grids: Vec<usize>,
    },
    /// Compare two profiles with each other and an optional reference.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Comma separated variable names; all shared ones by default.
        #[arg(long, value_delimiter = ',')]
        variables: Vec<String>,
        /// CSV output file; standard output by default.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sample the exact solution of an Euler or RHD Riemann problem.
    RiemannExact(ExactArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file.
    config: Option<PathBuf>,
    /// Override `section.key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    pipeline: Option<String>,
    #[arg(long)]
    flux: Option<String>,
    #[arg(long)]
    guess: Option<String>,
    #[arg(long)]
    velocity: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Output directory.
    #[arg(long, short)]
    output: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.problem) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(id)) => RunConfig::new(id),
            (None, None) => return Err(Error::Config("a configuration file or --problem is required".into())),
        };
        let flags = [
            ("problem.id", &self.problem),
            ("scheme.degree", &self.degree),
            ("scheme.pipeline", &self.pipeline),
            ("scheme.flux", &self.flux),
            ("scheme.guess", &self.guess),
            ("scheme.velocity", &self.velocity),
            ("scheme.cfl", &self.cfl),
            ("scheme.dt", &self.dt),
            ("grid.nx", &self.nx),
            ("grid.ny", &self.ny),
            ("run.t_final", &self.t_final),
            ("physics.gamma", &self.gamma),
            ("output.dir", &self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for s in &self.sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{s}'")))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct ExactArgs {
    /// Registered problem with an exact solution.
    #[arg(long, conflicts_with_all = ["system", "left", "right"])]
    problem: Option<String>,
    /// `euler` or `rhd`.
    #[arg(long)]
    system: Option<String>,
    /// Left state `rho,u,p`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    left: Vec<f64>,
    /// Right state `rho,u,p`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    right: Vec<f64>,
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    x0: f64,
    /// Domain `a,b`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 1.0])]
    range: Vec<f64>,
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    cells: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn state(v: &[f64], side: &str) -> Result<[f64; 3]> {
    v.try_into()
        .map_err(|_| Error::Config(format!("--{side} needs three values rho,u,p")))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(p) => Ok(ader::io::write_atomic(p, text.as_bytes())?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let (report, _) = driver::execute(&cfg)?;
            print!("{}", report.to_text());
            println!("wall_time = {:.3}", report.wall_time);
        }
        Command::Convergence { run, grids } => {
            let cfg = run.config()?;
            let report = driver::convergence(&cfg, &grids)?;
            print!("{}", report.to_text());
            if let Some(dir) = &cfg.output.dir {
                driver::write_convergence(&report, dir)?;
            }
        }
        Command::Compare {
            a,
            b,
            reference,
            variables,
            output,
        } => {
            let a = ReferenceProfile::load(&a)?;
            let b = ReferenceProfile::load(&b)?;
            let r = reference.map(|p| ReferenceProfile::load(&p)).transpose()?;
            let cmp = driver::compare(&a, &b, r.as_ref(), &variables)?;
            emit(&cmp.to_csv(), output.as_ref())?;
        }
        Command::RiemannExact(args) => {
            let profile = if let Some(id) = &args.problem {
                let p = problem(id, &PhysicsOverrides::default())?;
                driver::exact_problem_profile(&p, args.time.unwrap_or(p.t_final), args.cells)?
            } else {
                let system = args
                    .system
                    .clone()
                    .ok_or_else(|| Error::Config("either --problem or --system is required".into()))?;
                let [a, b] = args.range[..] else {
                    return Err(Error::Config("--range needs two values a,b".into()));
                };
                driver::exact_riemann_profile(&ExactRiemannRequest {
                    system,
                    left: state(&args.left, "left")?,
                    right: state(&args.right, "right")?,
                    gamma: args.gamma,
                    x0: args.x0,
                    range: (a, b),
                    time: args.time.ok_or_else(|| Error::Config("--time is required".into()))?,
                    cells: args.cells,
                })?
            };
            emit(&profile.to_text(), args.output.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
