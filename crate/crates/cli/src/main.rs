use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qecc_core::bounds::{
    distance_limits, emit_rate_curves, linspace, rate_curves_csv, survival, threshold_summary,
};
use qecc_core::channels::DefectionSpec;
use qecc_core::codec::{
    encode, phase_error_alpha, purity_alpha, run_defection_recovery, run_manifest,
    run_phase_error_experiment, run_purity_amplification, Manifest,
};
use qecc_core::codes::LinearCode;
use qecc_core::css::{search_weakly_self_dual, CssTriple};
use qecc_core::gf2::BinaryMatrix;
use qecc_core::qstate::{basis2_transform, support_in_basis2, QuantumState, DEFAULT_SUPPORT_TOL};
use qecc_core::verify::{run_criterion, CRITERIA};
use qecc_core::zoo;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] qecc_core::Error),
    #[error("manifest: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid argument: {0}")]
    Arg(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use qecc_core::Error as E;
        match self {
            CliError::Check(_) => 1,
            CliError::Arg(_) | CliError::Core(E::Usage(_)) => 2,
            CliError::Core(E::Parse(_) | E::LengthMismatch { .. } | E::WordTooLong(_)) => 3,
            CliError::Core(E::Capability(_)) => 4,
            CliError::Core(E::Construction(_) | E::DependentRows(_) | E::NotIsometry { .. }) => 5,
            CliError::Schema(_) => 6,
            CliError::Io { .. } => 7,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "qecc",
    version,
    about = "Classical and quantum error-correcting code toolkit"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical codes and CSS triples.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Code superposition states.
    #[command(subcommand)]
    State(StateCmd),
    /// Encoding and correction experiments.
    #[command(subcommand)]
    Codec(CodecCmd),
    /// Rate, distance and survival bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Run the acceptance checks and print a pass/fail table.
    Reproduce {
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        /// Run only these criteria.
        #[arg(long)]
        criterion: Vec<u8>,
    },
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct CodeSource {
    /// Built-in code: repetition3, even-parity3, hamming7, simplex7.
    #[arg(long)]
    code: Option<String>,
    /// Text file with one generator row per line.
    #[arg(long)]
    generator: Option<PathBuf>,
    /// Text file with one parity-check row per line.
    #[arg(long)]
    check: Option<PathBuf>,
}

impl CodeSource {
    fn load(&self) -> Result<LinearCode> {
        if let Some(name) = &self.code {
            return Ok(zoo::by_name(name)?);
        }
        if let Some(p) = &self.generator {
            return Ok(LinearCode::from_generator(read_matrix(p)?)?);
        }
        let p = self.check.as_ref().expect("clap enforces one source");
        Ok(LinearCode::from_parity_check(read_matrix(p)?)?)
    }
}

#[derive(Subcommand)]
enum CodeCmd {
    /// n, k, d, generator and check matrices as JSON.
    Inspect(CodeSource),
    /// The dual code as JSON.
    Dual(CodeSource),
    /// Minimum distance and correctable weight.
    Distance(CodeSource),
    /// A CSS triple: built in, or from C+ and extra rows.
    Css {
        #[arg(long, conflicts_with_all = ["c_plus", "extra"])]
        triple: Option<String>,
        /// Generator file for C+.
        #[arg(long, requires = "extra")]
        c_plus: Option<PathBuf>,
        /// Rows appended to the checks of C+ to form the checks of C.
        #[arg(long, requires = "c_plus")]
        extra: Option<PathBuf>,
    },
    /// Random search for a code containing its dual.
    Search {
        #[arg(long)]
        n: usize,
        /// Logical qubits.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        attempts: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Subcommand)]
enum StateCmd {
    /// CSV of the uniform code superposition.
    Dump {
        #[command(flatten)]
        source: CodeSource,
        #[arg(long, value_enum, default_value = "1")]
        basis: BasisArg,
        #[arg(long, default_value_t = DEFAULT_SUPPORT_TOL)]
        tol: f64,
    },
    /// Words carrying amplitude, as JSON.
    Support {
        #[command(flatten)]
        source: CodeSource,
        #[arg(long, value_enum, default_value = "2")]
        basis: BasisArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    N3Phase,
    N3Entangle,
}

#[derive(Subcommand)]
enum CodecCmd {
    /// CSV of an encoded block.
    Encode {
        #[arg(long, default_value = "steane7")]
        triple: String,
        /// Logical amplitude `re,im`, one per basis state.
        #[arg(long = "amp", required = true, allow_hyphen_values = true)]
        amps: Vec<String>,
    },
    /// Run a JSON manifest and print the recovery report.
    Correct {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Seeded random single-qubit defections; CSV per trial.
    Theorem6 {
        #[arg(long, default_value = "steane7")]
        triple: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// CSV of the coherence factor over a strength grid.
    AlphaSweep {
        #[arg(long, value_enum)]
        scheme: Scheme,
        /// `start:stop:count`.
        #[arg(long)]
        eps_grid: String,
        /// Rotation angles for the phase scheme, `a,b,c`.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        phis: String,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// CSV of the rate curves against d/n.
    Curves {
        /// `start:stop:count`, within (0, 1/2).
        #[arg(long, default_value = "0.005:0.495:99")]
        grid: String,
    },
    /// JSON survival report for T rounds.
    Survival {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: u64,
        #[arg(long = "T")]
        t: u64,
    },
    /// Error-rate thresholds and distance limits.
    Threshold,
}

fn read_text(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|source| CliError::Io {
        path: p.display().to_string(),
        source,
    })
}

fn read_matrix(p: &Path) -> Result<BinaryMatrix> {
    Ok(read_text(p)?.parse()?)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Arg(format!("grid {s:?}: expected start:stop:count"));
    let [a, b, m] = parts[..] else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    let m: usize = m.parse().map_err(|_| bad())?;
    if m == 0 {
        return Err(bad());
    }
    Ok(linspace(a, b, m))
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Arg(format!("not a number: {t:?}")))
        })
        .collect()
}

fn parse_complex(s: &str) -> Result<Complex64> {
    match parse_floats(s)?[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(CliError::Arg(format!(
            "amplitude {s:?}: expected re or re,im"
        ))),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn load_triple(
    name: Option<&str>,
    c_plus: Option<&Path>,
    extra: Option<&Path>,
) -> Result<CssTriple> {
    match (name, c_plus, extra) {
        (_, Some(c), Some(e)) => Ok(CssTriple::build(
            &LinearCode::from_generator(read_matrix(c)?)?,
            &read_matrix(e)?,
        )?),
        (Some(n), _, _) => Ok(zoo::triple_by_name(n)?),
        _ => Err(CliError::Arg(
            "give --triple or both --c-plus and --extra".into(),
        )),
    }
}

fn code_cmd(cmd: &CodeCmd) -> Result<String> {
    match cmd {
        CodeCmd::Inspect(src) => json(&src.load()?.summary()?),
        CodeCmd::Dual(src) => json(&src.load()?.dual().summary()?),
        CodeCmd::Distance(src) => {
            let c = src.load()?;
            json(&serde_json::json!({
                "n": c.n(),
                "k": c.k(),
                "d": c.min_distance()?,
                "t": c.max_correctable()?,
            }))
        }
        CodeCmd::Css {
            triple,
            c_plus,
            extra,
        } => json(&load_triple(triple.as_deref(), c_plus.as_deref(), extra.as_deref())?.summary()?),
        CodeCmd::Search {
            n,
            k,
            d,
            seed,
            attempts,
        } => match search_weakly_self_dual(*n, *k, *d, *seed, *attempts)? {
            Some(css) => json(&css.summary()?),
            None => Err(qecc_core::Error::Construction(format!(
                "no [{n}, {k}] triple with distance {d} found in {attempts} attempts"
            ))
            .into()),
        },
    }
}

fn code_state(src: &CodeSource, basis: BasisArg) -> Result<QuantumState> {
    let c = src.load()?;
    let s = QuantumState::uniform(c.n(), &c.codewords()?)?;
    Ok(match basis {
        BasisArg::One => s,
        BasisArg::Two => basis2_transform(&s, &(0..c.n()).collect::<Vec<_>>())?,
    })
}

fn state_cmd(cmd: &StateCmd) -> Result<String> {
    match cmd {
        StateCmd::Dump { source, basis, tol } => Ok(code_state(source, *basis)?.dump_csv(*tol)),
        StateCmd::Support { source, basis } => {
            let s = code_state(source, BasisArg::One)?;
            let words = match basis {
                BasisArg::Two => support_in_basis2(&s, DEFAULT_SUPPORT_TOL)?,
                BasisArg::One => source.load()?.codewords()?,
            };
            json(&words)
        }
    }
}

fn random_logical(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])]
}

fn codec_cmd(cmd: &CodecCmd) -> Result<String> {
    match cmd {
        CodecCmd::Encode { triple, amps } => {
            let css = zoo::triple_by_name(triple)?;
            let logical = amps
                .iter()
                .map(|a| parse_complex(a))
                .collect::<Result<Vec<_>>>()?;
            Ok(encode(&css, &logical)?.state.dump_csv(DEFAULT_SUPPORT_TOL))
        }
        CodecCmd::Correct { manifest } => {
            let m: Manifest = serde_json::from_str(&read_text(manifest)?)?;
            json(&run_manifest(&m)?)
        }
        CodecCmd::Theorem6 {
            triple,
            trials,
            seed,
        } => {
            let css = zoo::triple_by_name(triple)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut out = String::from("trial,qubit,defection_seed,fidelity,purity\n");
            for t in 0..*trials {
                let q = rng.random_range(0..css.n());
                let dseed: u64 = rng.random();
                let logical = random_logical(&mut rng);
                let r =
                    run_defection_recovery(&css, &logical, &DefectionSpec::random(vec![q], dseed))?;
                out.push_str(&format!(
                    "{t},{q},{dseed},{:.16e},{:.16e}\n",
                    r.fidelity, r.purity
                ));
            }
            Ok(out)
        }
        CodecCmd::AlphaSweep {
            scheme,
            eps_grid,
            phis,
        } => alpha_sweep(*scheme, &parse_grid(eps_grid)?, phis),
    }
}

/// Agreement required between simulation and closed form.
const SWEEP_TOL: f64 = 1e-10;

fn alpha_sweep(scheme: Scheme, grid: &[f64], phis: &str) -> Result<String> {
    let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let phis: [f64; 3] = parse_floats(phis)?
        .try_into()
        .map_err(|_| CliError::Arg("--phis needs three angles".into()))?;
    let mut out = String::from("eps,alpha_re,alpha_im,closed_re,closed_im\n");
    for &eps in grid {
        let (sim, closed) = match scheme {
            Scheme::N3Phase => (
                run_phase_error_experiment(phis, eps, a, b)?.alpha,
                phase_error_alpha(phis, eps),
            ),
            Scheme::N3Entangle => (
                run_purity_amplification([eps; 3], a, b)?.alpha,
                Complex64::new(purity_alpha([eps; 3]), 0.0),
            ),
        };
        if (sim - closed).norm() > SWEEP_TOL {
            return Err(CliError::Check(format!(
                "eps = {eps}: simulated {sim} differs from closed form {closed}"
            )));
        }
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            eps, sim.re, sim.im, closed.re, closed.im
        ));
    }
    Ok(out)
}

fn bounds_cmd(cmd: &BoundsCmd) -> Result<String> {
    match cmd {
        BoundsCmd::Curves { grid } => Ok(rate_curves_csv(&emit_rate_curves(&parse_grid(grid)?)?)),
        BoundsCmd::Survival { n, p, d, t } => json(&survival(*n, *p, *d, *t)?),
        BoundsCmd::Threshold => {
            let t = threshold_summary()?;
            let l = distance_limits()?;
            json(&serde_json::json!({
                "guaranteed": t.guaranteed,
                "impossible": t.impossible,
                "distance_achievable": l.achievable,
                "distance_impossible_above": l.impossible_above,
            }))
        }
    }
}

fn reproduce(all: bool, only: &[u8]) -> Result<String> {
    let ids: Vec<u8> = if all || only.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        only.to_vec()
    };
    let mut out = String::new();
    let mut failed = Vec::new();
    for id in ids {
        log::info!("running criterion {id}");
        let r = run_criterion(id);
        out.push_str(&format!("{r}\n"));
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Check(format!("criteria {failed:?} failed")))
    }
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Code(c) => code_cmd(c),
        Command::State(c) => state_cmd(c),
        Command::Codec(c) => codec_cmd(c),
        Command::Bounds(c) => bounds_cmd(c),
        Command::Reproduce { all, criterion } => reproduce(*all, criterion),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let io = |source| CliError::Io {
        path: out.map_or("stdout".into(), |p| p.display().to_string()),
        source,
    };
    match out {
        Some(p) => fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QECC_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(cli.out.as_deref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
