//! Command-line front end: load a state (named spec or JSON file), run the
//! sweep machinery, and emit a JSON or CSV report.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 assertion flag
//! contradicted by the verdict.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bellsweep::distill::{distillability_witness, ppt_check, DistillReport};
use bellsweep::linalg::DimsSpec;
use bellsweep::projection::{enumerate_bipartitions, Bipartition};
use bellsweep::states::{make_named_state, parse_state, State};
use bellsweep::sweep::{random_trials, sweep, SweepOptions, SweepReport, Verdict};

const SCHEMA_VERSION: u32 = 1;

const STATE_GRAMMAR: &str = "\
Named states (for --state):
  bell                    two-qubit maximally entangled pair
  ghz:LxD                 L parties of dimension D, e.g. ghz:3x2
  w:L                     L-qubit W state
  product:D1xD2x..        product of local basis states, e.g. product:3x3
  acin:l0=..,l1=..,psi=.. canonical three-qubit form (weights renormalized)
  werner:P                two-qubit Werner state with parameter P
  isotropic:D,F           DxD isotropic state with fidelity F
  chessboard-ppt          3x3 PPT-entangled chessboard-family state
  haar:D1xD2x..           Haar-random pure state (uses --seed)

State files (for --file) are JSON:
  {\"kind\":\"pure\",\"dims\":[2,2],\"amplitudes\":[[re,im],..]}
  {\"kind\":\"density\",\"dims\":[2,2],\"entries\":[[re,im],..]} (row-major)";

#[derive(Parser)]
#[command(
    name = "bellsweep",
    version,
    about = "Detect entanglement by sweeping projected CHSH inequalities",
    after_long_help = STATE_GRAMMAR
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement verdict for a pure state, with a violation witness
    Analyze(AnalyzeArgs),
    /// Full violation-record report over every bipartition and slice
    Sweep(SweepArgs),
    /// Haar-random trials comparing sweep verdicts to concurrence
    #[command(name = "random-trials")]
    RandomTrials(TrialArgs),
    /// Partial-transpose eigenvalue floor across bipartitions
    Ppt(PptArgs),
    /// Distillability witness with explicit local projectors
    Distill(DistillArgs),
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct InputArgs {
    /// Named state spec (see --help for the grammar)
    #[arg(long, group = "input")]
    state: Option<String>,
    /// Path to a JSON state file
    #[arg(long, group = "input")]
    file: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self, seed: u64) -> Result<(State, String), String> {
        if let Some(spec) = &self.state {
            let state = make_named_state(spec, seed).map_err(|e| e.to_string())?;
            return Ok((state, spec.clone()));
        }
        let path = self.file.as_ref().expect("clap guarantees one input source");
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let state = parse_state(&text).map_err(|e| e.to_string())?;
        Ok((state, path.display().to_string()))
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Violation tolerance above the classical bound of 2
    #[arg(long, default_value_t = bellsweep::sweep::DEFAULT_VIOLATION_TOLERANCE)]
    tol: f64,
    /// Concurrence threshold below which a pure state counts as separable
    #[arg(long, default_value_t = bellsweep::sweep::DEFAULT_CONCURRENCE_TOLERANCE)]
    concurrence_tol: f64,
    /// Maximum number of projections before the sweep refuses to run
    #[arg(long, default_value_t = bellsweep::sweep::DEFAULT_BUDGET)]
    budget: u64,
}

impl EngineArgs {
    fn options(&self, label: String) -> Result<SweepOptions, String> {
        // NaN must be rejected along with nonpositive values.
        let bad = |x: f64| x.is_nan() || x <= 0.0;
        if bad(self.tol) || bad(self.concurrence_tol) {
            return Err("tolerances must be positive".into());
        }
        Ok(SweepOptions {
            tolerance: self.tol,
            concurrence_tolerance: self.concurrence_tol,
            budget: self.budget,
            label: Some(label),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit the generation timestamp, making output reproducible
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct AssertArgs {
    /// Exit with status 2 if the verdict is entangled
    #[arg(long, conflicts_with = "assert_entangled")]
    assert_separable: bool,
    /// Exit with status 2 if the verdict is separable
    #[arg(long)]
    assert_entangled: bool,
}

impl AssertArgs {
    fn check(&self, verdict: Verdict) -> bool {
        (self.assert_separable && verdict == Verdict::Entangled)
            || (self.assert_entangled && verdict == Verdict::Separable)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for haar: states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    assertion: AssertArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for haar: states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    assertion: AssertArgs,
}

#[derive(Args)]
struct TrialArgs {
    /// Party dimensions, e.g. 2,2 or 2x2x3
    #[arg(long)]
    dims: String,
    /// Number of trials
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PptArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for haar: states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated side-A parties, e.g. 0,2 (default: every bipartition)
    #[arg(long)]
    cut: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DistillArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Seed for haar: states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    command: &'static str,
    #[serde(flatten)]
    report: T,
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema_version: u32,
    state: String,
    dims: DimsSpec,
    tolerance: f64,
    verdict: Verdict,
    best_violation: f64,
    max_projected_concurrence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<bellsweep::sweep::ViolationRecord>,
}

#[derive(Serialize)]
struct PptCutReport {
    cut: String,
    cut_mask: u64,
    min_eigenvalue: f64,
    is_ppt: bool,
}

#[derive(Serialize)]
struct PptReport {
    schema_version: u32,
    state: String,
    dims: DimsSpec,
    cuts: Vec<PptCutReport>,
    all_ppt: bool,
}

#[derive(Serialize)]
struct TrialReport {
    schema_version: u32,
    tolerance: f64,
    concurrence_tolerance: f64,
    #[serde(flatten)]
    stats: bellsweep::sweep::TrialStats,
}

fn timestamp(suppress: bool) -> Option<String> {
    if suppress {
        return None;
    }
    let now = time::OffsetDateTime::now_utc();
    Some(
        now.format(&time::format_description::well_known::Rfc3339)
            .expect("RFC3339 formatting cannot fail for UTC"),
    )
}

/// Floats are rendered exactly as serde_json renders them, so CSV and JSON
/// carry identical numeric spellings.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn emit_json<T: Serialize>(output: &OutputArgs, command: &'static str, report: T) -> Result<(), String> {
    let envelope = Envelope {
        generated_at: timestamp(output.no_timestamp),
        command,
        report,
    };
    let mut text =
        serde_json::to_string_pretty(&envelope).map_err(|e| format!("serialization: {e}"))?;
    text.push('\n');
    write_output(&output.out, &text)
}

fn emit_csv(output: &OutputArgs, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| e.to_string())?;
    for row in rows {
        w.write_record(&row).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    let text = String::from_utf8(bytes).expect("csv output is UTF-8");
    write_output(&output.out, &text)
}

fn sweep_csv_rows(report: &SweepReport) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "cut",
        "cut_mask",
        "alpha_j",
        "alpha_k",
        "beta_j",
        "beta_k",
        "weight",
        "concurrence",
        "max_violation",
        "degenerate",
        "is_best",
        "a1x",
        "a1y",
        "a1z",
        "a2x",
        "a2y",
        "a2z",
        "b1x",
        "b1y",
        "b1z",
        "b2x",
        "b2y",
        "b2z",
    ];
    let rows = report
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![
                r.cut.clone(),
                r.cut_mask.to_string(),
                r.alpha[0].to_string(),
                r.alpha[1].to_string(),
                r.beta[0].to_string(),
                r.beta[1].to_string(),
                num(r.weight),
                num(r.concurrence),
                num(r.max_violation),
                r.degenerate.to_string(),
                (report.best == Some(i)).to_string(),
            ];
            match &r.settings {
                Some(s) => {
                    for v in [s.a1, s.a2, s.b1, s.b2] {
                        row.extend(v.iter().map(|&x| num(x)));
                    }
                }
                None => row.extend(std::iter::repeat_n(String::new(), 12)),
            }
            row
        })
        .collect();
    (header, rows)
}

fn run_analyze(args: &AnalyzeArgs) -> Result<u8, String> {
    let (state, label) = args.input.load(args.seed)?;
    let psi = match &state {
        State::Pure(p) => p.clone(),
        State::Density(_) => {
            return Err("analyze needs a pure state; use sweep or distill for mixed ones".into())
        }
    };
    let opts = args.engine.options(label.clone())?;
    let report = sweep(&State::Pure(psi), &opts).map_err(|e| e.to_string())?;
    let witness = if report.verdict == Verdict::Entangled {
        report.best_record().cloned()
    } else {
        None
    };
    let max_c = report
        .records
        .iter()
        .filter(|r| !r.degenerate)
        .map(|r| r.concurrence)
        .fold(0.0f64, f64::max);
    let verdict = report.verdict;
    let analyze = AnalyzeReport {
        schema_version: SCHEMA_VERSION,
        state: label,
        dims: report.dims.clone(),
        tolerance: report.tolerance,
        verdict,
        best_violation: report.best_violation,
        max_projected_concurrence: max_c,
        witness,
    };
    match args.output.format {
        Format::Json => emit_json(&args.output, "analyze", analyze)?,
        Format::Csv => {
            let header = vec![
                "state",
                "dims",
                "verdict",
                "best_violation",
                "max_projected_concurrence",
                "tolerance",
            ];
            let row = vec![
                analyze.state.clone(),
                analyze.dims.to_string(),
                analyze.verdict.to_string(),
                num(analyze.best_violation),
                num(analyze.max_projected_concurrence),
                num(analyze.tolerance),
            ];
            emit_csv(&args.output, &header, vec![row])?;
        }
    }
    Ok(if args.assertion.check(verdict) { 2 } else { 0 })
}

fn run_sweep(args: &SweepArgs) -> Result<u8, String> {
    let (state, label) = args.input.load(args.seed)?;
    let opts = args.engine.options(label)?;
    let report = sweep(&state, &opts).map_err(|e| e.to_string())?;
    let verdict = report.verdict;
    match args.output.format {
        Format::Json => emit_json(&args.output, "sweep", &report)?,
        Format::Csv => {
            let (header, rows) = sweep_csv_rows(&report);
            emit_csv(&args.output, &header, rows)?;
        }
    }
    Ok(if args.assertion.check(verdict) { 2 } else { 0 })
}

fn run_trials(args: &TrialArgs) -> Result<u8, String> {
    let dims: DimsSpec = args.dims.parse().map_err(|e: bellsweep::Error| e.to_string())?;
    let opts = args.engine.options(format!("haar trials {dims}"))?;
    let stats = random_trials(&dims, args.n, args.seed, &opts).map_err(|e| e.to_string())?;
    match args.output.format {
        Format::Json => {
            let report = TrialReport {
                schema_version: SCHEMA_VERSION,
                tolerance: opts.tolerance,
                concurrence_tolerance: opts.concurrence_tolerance,
                stats,
            };
            emit_json(&args.output, "random-trials", report)?;
        }
        Format::Csv => {
            let header = vec![
                "dims",
                "trials",
                "seed",
                "entangled_violating",
                "entangled_not_violating",
                "separable_violating",
                "separable_quiet",
            ];
            let row = vec![
                stats.dims.to_string(),
                stats.trials.to_string(),
                stats.seed.to_string(),
                stats.entangled_violating.to_string(),
                stats.entangled_not_violating.to_string(),
                stats.separable_violating.to_string(),
                stats.separable_quiet.to_string(),
            ];
            emit_csv(&args.output, &header, vec![row])?;
        }
    }
    Ok(0)
}

fn parse_cut(spec: &str, dims: &DimsSpec) -> Result<Bipartition, String> {
    let parties: Vec<usize> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad party index {s:?} in --cut"))
        })
        .collect::<Result<_, _>>()?;
    Bipartition::new(dims, &parties).map_err(|e| e.to_string())
}

fn run_ppt(args: &PptArgs) -> Result<u8, String> {
    let (state, label) = args.input.load(args.seed)?;
    let rho = state.to_density();
    let cuts = match &args.cut {
        Some(spec) => vec![parse_cut(spec, rho.dims())?],
        None => enumerate_bipartitions(rho.dims()).map_err(|e| e.to_string())?,
    };
    let mut reports = Vec::with_capacity(cuts.len());
    for cut in &cuts {
        let (min, is_ppt) = ppt_check(&rho, cut).map_err(|e| e.to_string())?;
        reports.push(PptCutReport {
            cut: cut.label(),
            cut_mask: cut.mask(),
            min_eigenvalue: min,
            is_ppt,
        });
    }
    let all_ppt = reports.iter().all(|c| c.is_ppt);
    let report = PptReport {
        schema_version: SCHEMA_VERSION,
        state: label,
        dims: rho.dims().clone(),
        cuts: reports,
        all_ppt,
    };
    match args.output.format {
        Format::Json => emit_json(&args.output, "ppt", report)?,
        Format::Csv => {
            let header = vec!["cut", "cut_mask", "min_eigenvalue", "is_ppt"];
            let rows = report
                .cuts
                .iter()
                .map(|c| {
                    vec![
                        c.cut.clone(),
                        c.cut_mask.to_string(),
                        num(c.min_eigenvalue),
                        c.is_ppt.to_string(),
                    ]
                })
                .collect();
            emit_csv(&args.output, &header, rows)?;
        }
    }
    Ok(0)
}

fn distill_csv_rows(report: &DistillReport) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "verdict",
        "cut",
        "alpha_j",
        "alpha_k",
        "beta_j",
        "beta_k",
        "violation",
        "weight",
        "concurrence",
        "min_pt_eigenvalue",
    ];
    let row = match &report.witness {
        Some(w) => vec![
            report.verdict.to_string(),
            w.cut.clone(),
            w.alpha[0].to_string(),
            w.alpha[1].to_string(),
            w.beta[0].to_string(),
            w.beta[1].to_string(),
            num(w.violation),
            num(w.weight),
            num(w.concurrence),
            num(w.min_pt_eigenvalue),
        ],
        None => {
            let mut row = vec![report.verdict.to_string()];
            row.extend(std::iter::repeat_n(String::new(), 9));
            row
        }
    };
    (header, vec![row])
}

fn run_distill(args: &DistillArgs) -> Result<u8, String> {
    let (state, label) = args.input.load(args.seed)?;
    let rho = state.to_density();
    let opts = args.engine.options(label)?;
    let report = distillability_witness(&rho, &opts).map_err(|e| e.to_string())?;
    match args.output.format {
        Format::Json => emit_json(&args.output, "distill", &report)?,
        Format::Csv => {
            let (header, rows) = distill_csv_rows(&report);
            emit_csv(&args.output, &header, rows)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is an
            // input error and exits 1 per the documented code set.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Sweep(args) => run_sweep(args),
        Command::RandomTrials(args) => run_trials(args),
        Command::Ppt(args) => run_ppt(args),
        Command::Distill(args) => run_distill(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
