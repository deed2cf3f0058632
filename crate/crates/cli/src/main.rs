//! `qxsim`: parse, validate, run and sweep small quantum circuits.
//!
//! Exit status: 0 on success, 1 when a program fails to parse, violates the
//! backend, or an experiment misses its tolerance, 2 on usage errors.

mod render;

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qxsim_core::engine::{self, EngineError, Execution, NoiseModel, RunConfig};
use qxsim_core::experiments::{
    self, phase_from_plate, ExperimentError, ExperimentReport, Exp3Variant, PhasePlateSpec, QubitPair, Setup,
};
use qxsim_core::topology::{self, BackendTopology};
use qxsim_core::{qasm, Circuit};

#[derive(Parser)]
#[command(name = "qxsim", version, about = "Five-qubit quantum computer emulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a QASM program with the realistic noise preset unless told otherwise.
    Run(RunArgs),
    /// Sample a QASM program without noise unless told otherwise.
    Simulate(RunArgs),
    /// List coupling-map and basis violations of a QASM program.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        backend: BackendArg,
    },
    /// Equal-superposition random bits, with frequency and runs tests.
    Exp1 {
        #[command(flatten)]
        common: ExpArgs,
        /// Single-shot bits collected for the randomness tests.
        #[arg(long, default_value_t = experiments::DEFAULT_BITSTREAM_LEN)]
        bits: usize,
    },
    /// Mach-Zehnder phase sweep against cos^2(phi/2).
    Exp2 {
        #[command(flatten)]
        common: ExpArgs,
        /// Comma-separated phases in radians. Defaults to 0..2pi in steps of pi/6.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phis: Vec<f64>,
        /// Equally spaced phases over [0, 2pi], endpoints included.
        #[arg(long, conflicts_with = "phis")]
        points: Option<usize>,
        /// Phase plate `n,t,lambda` (index, thickness and wavelength in meters). Repeatable.
        #[arg(long, value_parser = parse_plate)]
        plate: Vec<PhasePlateSpec>,
    },
    /// Bell-state preparation and entanglement summary.
    Exp3 {
        #[command(flatten)]
        common: ExpArgs,
        #[arg(long, value_enum, default_value_t = Variant::PsiPlus)]
        variant: Variant,
        /// u3 polar angle for `--variant u3`.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        control: usize,
        #[arg(long, default_value_t = 0)]
        target: usize,
    },
    /// List builtin backends and those found in QX_BACKEND_DIR.
    Backends {
        #[arg(long, env = "QX_BACKEND_DIR")]
        backend_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BackendArg {
    /// Builtin name, TOML file, or name of `<NAME>.toml` in QX_BACKEND_DIR.
    #[arg(long, default_value = "ibmqx4")]
    backend: String,
    #[arg(long, env = "QX_BACKEND_DIR", hide_env_values = true)]
    backend_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    backend: BackendArg,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `off`, `preset`, or a JSON noise-model file.
    #[arg(long)]
    noise: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpArgs {
    #[command(flatten)]
    sample: SampleArgs,
    /// Directory for report files. Without it the JSON report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Bars,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    PsiPlus,
    PhiPlus,
    U3,
}

enum Failure {
    Usage(String),
    Rejected(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn rejected(e: impl std::fmt::Display) -> Failure {
    Failure::Rejected(e.to_string())
}

fn parse_plate(s: &str) -> Result<PhasePlateSpec, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [n, t, lambda] = parts[..] else {
        return Err("expected n,t,lambda".into());
    };
    PhasePlateSpec::new(n, t, lambda).map_err(|e| e.to_string())
}

fn load_backend(arg: &BackendArg) -> Result<BackendTopology, Failure> {
    topology::resolve(&arg.backend, arg.backend_dir.as_deref()).map_err(usage)
}

fn load_noise(spec: Option<&str>, default_preset: bool) -> Result<Option<NoiseModel>, Failure> {
    match spec {
        None if default_preset => Ok(Some(NoiseModel::preset())),
        None | Some("off") => Ok(None),
        Some("preset") => Ok(Some(NoiseModel::preset())),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| usage(format!("{path}: {e}")))
        }
    }
}

fn load_program(path: &Path) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    qasm::parse(&text).map_err(|e| rejected(format!("{}:{e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::Validation(report) => {
            let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            rejected(lines.join("\n"))
        }
        EngineError::ShotsOutOfRange(_) | EngineError::BadNoise(_) => usage(e),
        other => rejected(other),
    }
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::Engine(inner) => engine_failure(inner),
        ExperimentError::BadPlate(_) | ExperimentError::EmptySweep | ExperimentError::BadPhase(_) => usage(e),
        ExperimentError::BadQubits { .. } => usage(e),
        other => rejected(other),
    }
}

fn sample(args: &RunArgs, default_preset: bool) -> Outcome {
    let backend = load_backend(&args.sample.backend)?;
    let noise = load_noise(args.sample.noise.as_deref(), default_preset)?;
    let circuit = load_program(&args.file)?;
    let cfg = RunConfig::new(args.sample.shots, args.sample.seed, backend)
        .map_err(usage)?
        .with_noise(noise)
        .with_execution(Execution::Parallel);
    let hist = engine::sample(&circuit, &cfg).map_err(engine_failure)?;
    let text = match args.format {
        Format::Json => render::json(&hist),
        Format::Bars => render::bars(&hist),
        Format::Csv => render::csv(&hist),
    };
    emit(&text, args.out.as_deref())
}

fn validate(file: &Path, backend: &BackendArg) -> Outcome {
    let topo = load_backend(backend)?;
    let circuit = load_program(file)?;
    let report = circuit.validate(&topo);
    if report.is_runnable() {
        println!("ok: runs on {}", topo.name());
        return Ok(());
    }
    for v in &report.violations {
        println!("{v}");
    }
    Err(rejected(format!("{} violation(s) on {}", report.violations.len(), topo.name())))
}

fn setup(args: &SampleArgs) -> Result<Setup, Failure> {
    let backend = load_backend(&args.backend)?;
    let noise = load_noise(args.noise.as_deref(), false)?;
    Ok(Setup::new(args.shots, args.seed, backend).with_noise(noise))
}

fn finish_report(report: &ExperimentReport, out: Option<&Path>, extra: &[(&str, String)]) -> Outcome {
    let name = serde_json::to_value(report.id).expect("id serializes");
    let name = name.as_str().expect("id is a string");
    match out {
        None => println!("{}", report.to_json()),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            let mut files = vec![(format!("{name}.json"), report.to_json() + "\n")];
            files.extend(extra.iter().map(|(ext, body)| (format!("{name}.{ext}"), body.clone())));
            for (file, body) in files {
                let path = dir.join(&file);
                fs::write(&path, body).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
        }
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(rejected(format!("{name} failed: {}", failed.join(", "))))
    }
}

fn exp2_phis(phis: &[f64], points: Option<usize>, plates: &[PhasePlateSpec]) -> Result<Vec<f64>, Failure> {
    let mut out: Vec<f64> = match points {
        Some(0) => return Err(usage("--points must be at least 1")),
        Some(1) => vec![0.0],
        Some(n) => (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect(),
        None => phis.to_vec(),
    };
    for plate in plates {
        out.push(phase_from_plate(plate, true).map_err(usage)?);
    }
    if out.is_empty() {
        out = experiments::default_phis();
    }
    Ok(out)
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Run(args) => sample(&args, true),
        Command::Simulate(args) => sample(&args, false),
        Command::Validate { file, backend } => validate(&file, &backend),
        Command::Exp1 { common, bits } => {
            let report = experiments::run_exp1(&setup(&common.sample)?, bits).map_err(experiment_failure)?;
            finish_report(&report, common.out.as_deref(), &[])
        }
        Command::Exp2 {
            common,
            phis,
            points,
            plate,
        } => {
            let phis = exp2_phis(&phis, points, &plate)?;
            let report = experiments::run_exp2(&setup(&common.sample)?, &phis).map_err(experiment_failure)?;
            let table = report.sweep.as_ref().expect("sweep table present");
            let extra = [("csv", table.to_csv()), ("dat", table.to_gnuplot())];
            finish_report(&report, common.out.as_deref(), &extra)
        }
        Command::Exp3 {
            common,
            variant,
            theta,
            control,
            target,
        } => {
            let variant = match variant {
                Variant::PsiPlus => Exp3Variant::PsiPlus,
                Variant::PhiPlus => Exp3Variant::PhiPlus,
                Variant::U3 => Exp3Variant::U3Theta(theta),
            };
            let pair = QubitPair { control, target };
            let report = experiments::run_exp3(&setup(&common.sample)?, variant, pair).map_err(experiment_failure)?;
            finish_report(&report, common.out.as_deref(), &[])
        }
        Command::Backends { backend_dir } => {
            for t in topology::available(backend_dir.as_deref()) {
                println!("{} {}", t.name(), t.coupling());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
