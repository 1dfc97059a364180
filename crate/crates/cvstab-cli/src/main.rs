use clap::{Args, Parser, Subcommand, ValueEnum};
use cvstab::circuit::parse_circuit;
use cvstab::pipeline::{compile, run_strong, run_weak, verify, Compiled, VerifyOptions, DEFAULT_MAX_BRANCHES};
use cvstab::report::Report;
use cvstab::rsb::Method;
use cvstab::wigner::{input_wavefunction, negativity, wigner_of_wavefunction};
use cvstab::Error;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulate GKP and rotation-symmetric bosonic circuits as qudit Clifford circuits.
#[derive(Parser)]
#[command(name = "cvstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve the embedding and print the compiled qudit program.
    Compile(Common),
    /// Simulate a circuit, strongly (exact probabilities) or by sampling shots.
    Run(RunArgs),
    /// Compare tableau predictions with the dense, grid or Fock oracle.
    Verify(VerifyArgs),
    /// Wigner function and negativity of a circuit's input codeword.
    Wigner(WignerArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    One,
    Two,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Circuit file.
    file: PathBuf,
    /// Force the RSB embedding method.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum, default_value = "text")]
    report: Format,
    /// Append the final tableau in text form.
    #[arg(long)]
    dump_state: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Enumerate every outcome with its exact probability (default).
    #[arg(long, conflicts_with = "shots")]
    strong: bool,
    /// Sample this many shots instead.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample teleported-gate failures and abort those shots.
    #[arg(long)]
    model_postselection: bool,
    /// Attach oracle comparisons (circuits with at most two modes).
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_BRANCHES)]
    max_branches: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// GKP peak width.
    #[arg(long, default_value_t = 0.15)]
    delta: f64,
    /// GKP envelope width parameter (defaults to --delta).
    #[arg(long)]
    envelope: Option<f64>,
    /// Coherent amplitude used when an RSB circuit declares the ideal primitive.
    #[arg(long, default_value_t = 6.0)]
    alpha: f64,
    /// Fock truncation.
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct WignerArgs {
    /// Circuit file; its input on --mode is the codeword analysed.
    file: PathBuf,
    #[arg(long, default_value_t = 0)]
    mode: usize,
    /// GKP peak width.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    /// GKP envelope width parameter (defaults to --delta).
    #[arg(long)]
    envelope: Option<f64>,
    /// Write the grid as CSV rows q,p,w.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Keep every k-th grid point per axis in the CSV (0 picks at most 256 per axis).
    #[arg(long, default_value_t = 0)]
    csv_stride: usize,
    /// Write the negativity report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 2,
        Error::NonCliffordGate { .. } | Error::NotAdmitted(_) | Error::MethodTwoInputViolation { .. } => 3,
        Error::OracleMismatch(_) => 4,
        _ => 1,
    }
}

fn load(c: &Common) -> Result<Compiled, Error> {
    let text = std::fs::read_to_string(&c.file)
        .map_err(|e| Error::Argument(format!("cannot read {}: {}", c.file.display(), e)))?;
    let circuit = parse_circuit(&text)?;
    let method = c.method.map(|m| match m {
        MethodArg::One => Method::One,
        MethodArg::Two => Method::Two,
    });
    compile(&circuit, method)
}

fn emit(r: &Report, f: Format) {
    let text = match f {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn verify_options(a: &VerifyArgs) -> VerifyOptions {
    VerifyOptions {
        delta: a.delta,
        delta_env: a.envelope.unwrap_or(a.delta),
        n_max: a.n_max,
        fallback_alpha: a.alpha,
        ..VerifyOptions::default()
    }
}

#[derive(Serialize)]
struct WignerReport {
    schema: &'static str,
    family: &'static str,
    d1: u64,
    mode: usize,
    input: u64,
    grid_points: usize,
    q_range: [f64; 2],
    p_range: [f64; 2],
    integral: f64,
    negativity: cvstab::wigner::NegativityReport,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Compile(c) => {
            let compiled = load(&c)?;
            let mut r = Report::new("compile", &compiled);
            r.program = Some(compiled.program.clone());
            if c.dump_state {
                r.final_state = Some(compiled.initial.to_text());
            }
            emit(&r, c.report);
        }
        Command::Run(a) => {
            let compiled = load(&a.common)?;
            let mut r = Report::new("run", &compiled);
            let state = match a.shots {
                Some(n) => {
                    let w = run_weak(&compiled, n, a.seed, a.model_postselection)?;
                    let s = w.final_state.clone();
                    r.weak = Some(w);
                    s
                }
                None => {
                    let s = run_strong(&compiled, a.max_branches)?;
                    let t = s.final_state.clone();
                    r.strong = Some(s);
                    t
                }
            };
            if a.common.dump_state {
                r.final_state = state.map(|t| t.to_text());
            }
            let mut mismatch = false;
            if a.verify {
                let v = verify(&compiled, &VerifyOptions::default())?;
                mismatch = !v.passed;
                r.verify = Some(v);
            }
            emit(&r, a.common.report);
            if mismatch {
                return Err(Error::OracleMismatch("see the verify block of the report".into()));
            }
        }
        Command::Verify(a) => {
            let compiled = load(&a.common)?;
            let mut r = Report::new("verify", &compiled);
            let v = verify(&compiled, &verify_options(&a))?;
            let passed = v.passed;
            r.verify = Some(v);
            if a.common.dump_state {
                r.final_state = Some(compiled.initial.to_text());
            }
            emit(&r, a.common.report);
            if !passed {
                return Err(Error::OracleMismatch("see the verify block of the report".into()));
            }
        }
        Command::Wigner(a) => {
            let text = std::fs::read_to_string(&a.file)
                .map_err(|e| Error::Argument(format!("cannot read {}: {}", a.file.display(), e)))?;
            let circuit = parse_circuit(&text)?;
            let psi = input_wavefunction(&circuit, a.mode, a.delta, a.envelope.unwrap_or(a.delta))?;
            let g = wigner_of_wavefunction(&psi)?;
            let neg = negativity(&g)?;
            if let Some(path) = &a.csv {
                let stride = if a.csv_stride == 0 { g.q.len().div_ceil(256) } else { a.csv_stride };
                std::fs::write(path, g.to_csv(stride))
                    .map_err(|e| Error::Argument(format!("cannot write {}: {}", path.display(), e)))?;
            }
            let rep = WignerReport {
                schema: cvstab::report::SCHEMA,
                family: if matches!(circuit.code, cvstab::circuit::Code::Gkp) { "gkp" } else { "rsb" },
                d1: circuit.d1,
                mode: a.mode,
                input: circuit.inputs[a.mode],
                grid_points: g.q.len(),
                q_range: [g.q[0], *g.q.last().expect("grid is non-empty")],
                p_range: [g.p[0], *g.p.last().expect("grid is non-empty")],
                integral: g.integral(),
                negativity: neg,
            };
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            match &a.json {
                Some(path) => std::fs::write(path, json + "\n")
                    .map_err(|e| Error::Argument(format!("cannot write {}: {}", path.display(), e)))?,
                None => println!("{}", json),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
