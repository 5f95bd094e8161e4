//! Command-line front end. Exit codes: 0 pass, 1 check failure, 2 usage or
//! input error, 3 singular to available precision.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::detlab::{self, DetError, DetForm2Report, GensDetReport, GeneratorsFile};
use crate::replib::{RepError, RepSpec};
use crate::scalarforms::{NamedForm, DEFAULT_ORDER};
use crate::suites::{self, Suite, DEFAULT_SEED};
use crate::weightcalc::{self, AnalysisReport, EnumerationBounds, WeightError, DEFAULT_K_MAX, DEFAULT_K_MIN, REPORT_SCHEMA_VERSION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

/// Smallest accepted `--order`.
pub const MIN_ORDER: i64 = 8;

#[derive(Debug, Parser)]
#[command(name = "vvmf", version, about = "Exact q-series and representation checks for vector-valued modular forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of trusted q-powers in every expansion (at least 8).
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER)]
    pub order: i64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand a named form: E4, E6, Delta, J, delta or f:<n>.
    Series { form: String },
    /// Validate a representation file and report its weight constraints.
    Analyze {
        rep: PathBuf,
        /// List every weight multiset consistent with the traces.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = DEFAULT_K_MIN, allow_hyphen_values = true)]
        kmin: i64,
        #[arg(long, default_value_t = DEFAULT_K_MAX, allow_hyphen_values = true)]
        kmax: i64,
        /// Required sum of the weights.
        #[arg(long, allow_hyphen_values = true)]
        sum: Option<i64>,
    },
    /// Run a verification suite: scalar, counting, kappa, sums or det.
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Check the exterior product of generators against a representation.
    Det { generators: PathBuf, rep: PathBuf },
}

/// Rendered output and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            output: format!("error: {msg}\n"),
        }
    }
}

/// Report printed by `det`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetReport {
    pub schema_version: u32,
    pub rep_name: String,
    pub order: i64,
    pub gensdet: GensDetReport,
    /// The normalized wedge of the weight-ε weak generators against `Δ_ε` (`Δ_0` for even reps).
    pub reference: DetForm2Report,
    pub passed: bool,
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))
}

fn render<T: Serialize>(value: &T, format: Format, text: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("report serializes") + "\n",
        Format::Text => text(value),
    }
}

fn load_rep(path: &Path) -> Result<RepSpec, Outcome> {
    RepSpec::from_json(&read(path)?).map_err(|e| match e {
        RepError::Parse(_) | RepError::Shape(_) => Outcome::usage(format!("{}: {e}", path.display())),
        other => Outcome {
            code: EXIT_FAIL,
            output: format!("error: {}: {other}\n", path.display()),
        },
    })
}

fn cmd_series(form: &str, order: i64, format: Format) -> Outcome {
    let named: NamedForm = match form.parse() {
        Ok(f) => f,
        Err(e) => return Outcome::usage(e),
    };
    match named.expand(order) {
        Ok(s) => Outcome {
            code: EXIT_PASS,
            output: render(&s, format, |s| format!("{s}\n")),
        },
        Err(e) => Outcome::usage(e),
    }
}

fn analysis_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "representation: {}", r.name);
    let _ = writeln!(out, "dimension: {}", r.dimension);
    let _ = writeln!(out, "parity: epsilon = {}", r.parity.epsilon());
    let _ = writeln!(out, "cyclotomic order: {}", r.cyclotomic_order);
    if !r.t_diagonalizable {
        let _ = writeln!(out, "warning: rho(T) is not diagonalizable; weight constraints may not apply");
    }
    let _ = writeln!(out, "Tr S = {}", r.traces.tr_s);
    let _ = writeln!(out, "Tr U = {}", r.traces.tr_u);
    let _ = writeln!(out, "Tr U^-1 = {}", r.traces.tr_u_inv);
    let m = r.multiplicities;
    let _ = writeln!(out, "multiplicities: alpha = {}, beta1 = {}, beta2 = {}", m.alpha, m.beta1, m.beta2);
    let c = r.weight_congruence_counts;
    let _ = writeln!(
        out,
        "weight counts: k odd = {}, k = 1 mod 3 = {}, k = 2 mod 3 = {}",
        c.k_odd, c.k_mod3_1, c.k_mod3_2
    );
    let h = &r.hilbert_values;
    let _ = writeln!(out, "P(-i) = {}", h.at_minus_i);
    let _ = writeln!(out, "P(zeta) = {}", h.at_zeta);
    let _ = writeln!(out, "P(zeta^-1) = {}", h.at_zeta_inv);
    if let Some(cands) = &r.candidate_multisets {
        let _ = writeln!(out, "candidate weight multisets: {}", cands.len());
        for ws in cands {
            let _ = writeln!(out, "  k = {:?}  w = {:?}", ws.ks, ws.weights());
        }
    }
    out
}

fn cmd_analyze(path: &Path, bounds: Option<EnumerationBounds>, format: Format) -> Outcome {
    let rep = match load_rep(path) {
        Ok(r) => r,
        Err(o) => return o,
    };
    match weightcalc::analyze(&rep, bounds) {
        Ok(report) => Outcome {
            code: EXIT_PASS,
            output: render(&report, format, analysis_text),
        },
        Err(e @ WeightError::Bounds { .. }) => Outcome::usage(e),
        Err(e) => Outcome {
            code: EXIT_FAIL,
            output: format!("error: {e}\n"),
        },
    }
}

fn cmd_verify(suite: &str, order: i64, seed: u64, format: Format) -> Outcome {
    let suite: Suite = match suite.parse() {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };
    let report = suites::run_suite(suite, order, seed);
    Outcome {
        code: if report.all_passed() { EXIT_PASS } else { EXIT_FAIL },
        output: render(&report, format, |r| r.to_text()),
    }
}

fn det_text(r: &DetReport) -> String {
    let g = &r.gensdet;
    let mut out = String::new();
    let _ = writeln!(out, "representation: {}", r.rep_name);
    let _ = writeln!(out, "declared weights: {:?} (sum {})", g.declared_weights, g.weight_sum);
    let _ = writeln!(out, "weights match generators: {}", g.weights_match_generators);
    let _ = writeln!(out, "leading coefficient K = {}", g.leading_coefficient);
    let _ = writeln!(out, "leading exponent: {} (expected {})", g.leading_exponent, g.expected_exponent);
    let _ = writeln!(out, "wedge = K·delta^(sum w): {} (window to q^{})", g.determinant_matches, g.window_bound);
    let _ = writeln!(out, "weight sum nonnegative: {}", g.weight_sum_nonnegative);
    let _ = writeln!(out, "wedge of weak generators matches closed form: {}", r.reference.wedge_ok);
    let _ = writeln!(out, "{}", if r.passed { "PASS" } else { "FAIL" });
    out
}

fn det_failure(e: DetError) -> Outcome {
    match e {
        DetError::Singular => Outcome {
            code: EXIT_SINGULAR,
            output: format!("error: {e}\n"),
        },
        DetError::Parse(_) | DetError::Shape(_) => Outcome::usage(e),
        other => Outcome {
            code: EXIT_FAIL,
            output: format!("error: {other}\n"),
        },
    }
}

fn cmd_det(gens_path: &Path, rep_path: &Path, order: i64, format: Format) -> Outcome {
    let gens = match read(gens_path).and_then(|s| GeneratorsFile::from_json(&s).map_err(det_failure)) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let rep = match load_rep(rep_path) {
        Ok(r) => r,
        Err(o) => return o,
    };
    if gens.dimension != rep.dimension() {
        return Outcome::usage(format!(
            "generators have dimension {} but the representation has dimension {}",
            gens.dimension,
            rep.dimension()
        ));
    }
    let ws = gens.weights();
    let gensdet = match detlab::check_gensdet(&gens.generators, &ws, order) {
        Ok(r) => r,
        Err(e) => return det_failure(e),
    };
    let ks: Vec<i64> = ws.iter().map(|w| w.div_euclid(2)).collect();
    let reference = match detlab::verify_detform2(&rep, &gens.generators, &ks, 0, order) {
        Ok(r) => r,
        Err(e) => return det_failure(e),
    };
    let passed = gensdet.passed() && reference.passed();
    let report = DetReport {
        schema_version: REPORT_SCHEMA_VERSION,
        rep_name: gens.rep_name.clone(),
        order,
        gensdet,
        reference,
        passed,
    };
    Outcome {
        code: if passed { EXIT_PASS } else { EXIT_FAIL },
        output: render(&report, format, det_text),
    }
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    let CommonArgs { order, format, .. } = cli.common;
    if order < MIN_ORDER {
        return Outcome::usage(format!("--order must be at least {MIN_ORDER}, got {order}"));
    }
    match &cli.command {
        Command::Series { form } => cmd_series(form, order, format),
        Command::Analyze {
            rep,
            enumerate,
            kmin,
            kmax,
            sum,
        } => {
            let bounds = enumerate.then_some(EnumerationBounds {
                k_min: *kmin,
                k_max: *kmax,
                sum_w: *sum,
            });
            cmd_analyze(rep, bounds, format)
        }
        Command::Verify { suite, seed } => cmd_verify(suite, order, *seed, format),
        Command::Det { generators, rep } => cmd_det(generators, rep, order, format),
    }
}

/// Parses arguments, runs, and writes the result; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let outcome = execute(&cli);
    if outcome.code == EXIT_USAGE || outcome.output.starts_with("error:") {
        eprint!("{}", outcome.output);
        return outcome.code;
    }
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{}", outcome.output),
    }
    outcome.code
}
