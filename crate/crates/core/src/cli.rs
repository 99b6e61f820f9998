//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns a
//! [`CommandOutcome`] instead of touching the process, so the binary stays a
//! thin wrapper and commands can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fit::{fit, report_errors_breakdown, FitOutcome, FitSpec, SimilarityReport};
use crate::gate::{build_ideal_cnot, ideal_layout, GateParams, LogicalBasis, LogicalPorts};
use crate::metrics::{
    ideal_table, logical_fidelity, model_truth_table, plot_csv, truth_table, FidelityReport,
    TruthTable,
};
use crate::pipeline::{
    bootstrap_fidelity_error, counts_to_truth_table, merge, parse_counts, synth_counts, CountSet,
};

/// Result of one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    /// 0 success, 1 domain or validation error, 2 usage error.
    pub exit_code: i32,
    /// Files written by the command.
    pub artifacts: Vec<PathBuf>,
    /// Text for the standard output stream.
    pub stdout: String,
    /// Diagnostics for the error stream; non-empty iff `exit_code != 0`.
    pub stderr: String,
}

impl CommandOutcome {
    fn failure(code: i32, message: String) -> Self {
        Self {
            exit_code: code,
            artifacts: Vec::new(),
            stdout: String::new(),
            stderr: if message.ends_with('\n') {
                message
            } else {
                format!("{message}\n")
            },
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Doc,
}

#[derive(Debug, Parser)]
#[command(
    name = "fibre-cnot",
    version,
    about = "Simulate and analyse a post-selected two-photon fibre CNOT gate"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: human-readable text or a structured JSON document.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute truth tables of the ideal gate or the imperfection model.
    Simulate(SimulateArgs),
    /// Turn coincidence counts into truth tables, fidelities and bounds.
    Analyze(AnalyzeArgs),
    /// Fit the imperfection model to a two-basis count file.
    Fit(FitArgs),
    /// Generate synthetic coincidence counts.
    Synth(SynthArgs),
    /// Render a structured document, or the similarity-gain breakdown.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Use the exact ideal network and ignore any config.
    #[arg(long)]
    ideal: bool,
    /// Gate parameter file (`key = value` lines).
    #[arg(long, required_unless_present = "ideal")]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "ZZ,XX")]
    basis: Vec<LogicalBasis>,
    /// Also write bar heights as CSV.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Count file.
    counts: PathBuf,
    /// Bases to analyse; defaults to every basis in the file.
    #[arg(long, value_delimiter = ',')]
    basis: Vec<LogicalBasis>,
    /// `ideal`, or a truth-table file holding the reference tables.
    #[arg(long, default_value = "ideal")]
    reference: String,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Also write the measured truth tables here.
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Count file with both bases.
    counts: PathBuf,
    /// Fit specification (`key = value` lines).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Draw from the ideal truth tables.
    #[arg(long, conflicts_with_all = ["table", "config"])]
    ideal: bool,
    /// Truth-table file to draw from.
    #[arg(long, conflicts_with = "config")]
    table: Option<PathBuf>,
    /// Gate parameter file; draws from the model's truth tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "ZZ,XX")]
    basis: Vec<LogicalBasis>,
    /// Trials per logical input.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Mean background counts added to every output.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    accidental_rate: f64,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Structured document written with `--format doc`.
    #[arg(required_unless_present = "similarities")]
    document: Option<PathBuf>,
    /// Print gains between IDEAL, INTERFERENCE and FULL MODEL rows.
    #[arg(long)]
    breakdown: bool,
    /// Six similarities `zz_ideal zz_interf zz_full xx_ideal xx_interf xx_full`.
    #[arg(long, num_args = 6, value_name = "S", conflicts_with = "document")]
    similarities: Option<Vec<f64>>,
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite and non-negative: {s}"))
    }
}

/// Structured single-document output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    TruthTables {
        tables: Vec<TruthTable>,
        params: Option<GateParams>,
    },
    Analysis {
        report: FidelityReport,
        tables: Vec<TruthTable>,
    },
    Fit {
        outcome: Box<FitOutcome>,
    },
    Counts {
        counts: CountSet,
    },
}

impl Document {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        match self {
            Document::TruthTables { tables, .. } => tables_text(tables),
            Document::Analysis { report, tables } => {
                format!("{}\n{}", report.to_text(), tables_text(tables))
            }
            Document::Fit { outcome } => outcome.report.to_text(),
            Document::Counts { counts } => counts.to_text(),
        }
    }
}

fn tables_text(tables: &[TruthTable]) -> String {
    tables
        .iter()
        .map(TruthTable::to_text)
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_input(path: &Path, what: &str) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {what} {}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> CliResult<()> {
    fs::write(path, content)
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn read_counts(path: &Path) -> CliResult<CountSet> {
    let text = read_input(path, "count file")?;
    if is_json(&text) {
        match serde_json::from_str::<Document>(&text) {
            Ok(Document::Counts { counts }) => Ok(CountSet::from_records(counts.records().to_vec())?),
            Ok(_) => Err(CliError::Domain(format!(
                "{}: document does not hold counts",
                path.display()
            ))),
            Err(e) => Err(CliError::Domain(format!("{}: {e}", path.display()))),
        }
    } else {
        parse_counts(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
    }
}

fn read_tables(path: &Path) -> CliResult<Vec<TruthTable>> {
    let text = read_input(path, "truth-table file")?;
    if is_json(&text) {
        match serde_json::from_str::<Document>(&text) {
            Ok(Document::TruthTables { tables, .. } | Document::Analysis { tables, .. }) => {
                for t in &tables {
                    t.validate()?;
                }
                Ok(tables)
            }
            Ok(_) => Err(CliError::Domain(format!(
                "{}: document does not hold truth tables",
                path.display()
            ))),
            Err(e) => Err(CliError::Domain(format!("{}: {e}", path.display()))),
        }
    } else {
        TruthTable::parse_text_all(&text)
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
    }
}

fn read_params(path: &Path) -> CliResult<GateParams> {
    let text = read_input(path, "config")?;
    GateParams::from_config(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn dedup_bases(bases: &[LogicalBasis]) -> Vec<LogicalBasis> {
    LogicalBasis::ALL
        .into_iter()
        .filter(|b| bases.contains(b))
        .collect()
}

struct Emitter {
    out: Option<PathBuf>,
    format: Format,
    artifacts: Vec<PathBuf>,
    stdout: String,
}

impl Emitter {
    fn primary(&mut self, doc: &Document, summary: &str) -> CliResult<()> {
        let body = match self.format {
            Format::Text => doc.to_text(),
            Format::Doc => doc.to_json(),
        };
        match &self.out {
            Some(path) => {
                write_output(path, &body)?;
                self.artifacts.push(path.clone());
                self.stdout.push_str(summary);
            }
            None => self.stdout.push_str(&body),
        }
        Ok(())
    }

    fn extra(&mut self, path: &Path, content: &str) -> CliResult<()> {
        write_output(path, content)?;
        self.artifacts.push(path.to_path_buf());
        Ok(())
    }
}

fn simulate(args: &SimulateArgs, em: &mut Emitter) -> CliResult<()> {
    let bases = dedup_bases(&args.basis);
    let (tables, params) = if args.ideal {
        let layout = ideal_layout();
        let circuit = build_ideal_cnot(&layout)?;
        let ports = LogicalPorts::for_layout(&layout)?;
        let tables = bases
            .iter()
            .map(|&b| truth_table(&circuit, b, &ports))
            .collect::<Result<Vec<_>, _>>()?;
        (tables, None)
    } else {
        let path = args.config.as_ref().expect("clap requires config");
        let params = read_params(path)?;
        let tables = bases
            .iter()
            .map(|&b| model_truth_table(&params, b))
            .collect::<Result<Vec<_>, _>>()?;
        (tables, Some(params))
    };
    if let Some(plot) = &args.plot {
        em.extra(plot, &plot_csv(&tables))?;
    }
    let summary = tables
        .iter()
        .map(|t| {
            let f = logical_fidelity(t, &ideal_table(t.basis)).unwrap_or(f64::NAN);
            format!("{}: logical fidelity {f:.4}\n", t.basis)
        })
        .collect::<String>();
    em.primary(&Document::TruthTables { tables, params }, &summary)
}

fn reference_tables(spec: &str) -> CliResult<Vec<TruthTable>> {
    if spec == "ideal" {
        Ok(LogicalBasis::ALL.into_iter().map(ideal_table).collect())
    } else {
        read_tables(Path::new(spec))
    }
}

fn analyze(args: &AnalyzeArgs, seed: u64, em: &mut Emitter) -> CliResult<()> {
    let counts = read_counts(&args.counts)?;
    let bases = if args.basis.is_empty() {
        counts.bases()
    } else {
        dedup_bases(&args.basis)
    };
    let references = reference_tables(&args.reference)?;
    let mut tables = Vec::new();
    let mut fids = [None, None];
    for basis in bases {
        let table = counts_to_truth_table(&counts, basis)?;
        let reference = references
            .iter()
            .find(|t| t.basis == basis)
            .ok_or_else(|| CliError::Domain(format!("no {basis} reference table")))?;
        let f = logical_fidelity(&table, reference)?;
        let err = bootstrap_fidelity_error(&counts, basis, reference, args.resamples, seed)?;
        fids[basis as usize] = Some((f, Some(err)));
        tables.push(table);
    }
    let report = FidelityReport::new(fids[0], fids[1]);
    if let Some(path) = &args.tables {
        em.extra(path, &tables_text(&tables))?;
    }
    let summary = report.to_text();
    em.primary(&Document::Analysis { report, tables }, &summary)
}

fn run_fit(args: &FitArgs, em: &mut Emitter) -> CliResult<()> {
    let counts = read_counts(&args.counts)?;
    for basis in LogicalBasis::ALL {
        if !counts.has_basis(basis) {
            return Err(CliError::Domain(format!(
                "fit needs both ZZ and XX counts; {basis} is missing"
            )));
        }
    }
    let spec = match &args.spec {
        Some(path) => FitSpec::from_config(&read_input(path, "fit spec")?)
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?,
        None => FitSpec::default(),
    };
    let zz = counts_to_truth_table(&counts, LogicalBasis::ZZ)?;
    let xx = counts_to_truth_table(&counts, LogicalBasis::XX)?;
    let outcome = fit(&zz, &xx, &spec)?;
    let summary = outcome.report.to_text();
    em.primary(&Document::Fit { outcome: Box::new(outcome) }, &summary)
}

fn synth(args: &SynthArgs, seed: u64, em: &mut Emitter) -> CliResult<()> {
    let bases = dedup_bases(&args.basis);
    let sources: Vec<TruthTable> = if let Some(path) = &args.table {
        read_tables(path)?
            .into_iter()
            .filter(|t| bases.contains(&t.basis))
            .collect()
    } else if let Some(path) = &args.config {
        let params = read_params(path)?;
        bases
            .iter()
            .map(|&b| model_truth_table(&params, b))
            .collect::<Result<_, _>>()?
    } else if args.ideal {
        bases.iter().map(|&b| ideal_table(b)).collect()
    } else {
        return Err(CliError::Usage(
            "synth needs one of --ideal, --table or --config".into(),
        ));
    };
    if sources.is_empty() {
        return Err(CliError::Domain("no truth table for the requested bases".into()));
    }
    let sets = sources
        .iter()
        .enumerate()
        .map(|(i, t)| synth_counts(t, args.trials, args.accidental_rate, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let counts = merge(sets)?;
    let summary = format!(
        "{} records, {} trials per input, accidental rate {}\n",
        counts.records().len(),
        args.trials,
        args.accidental_rate
    );
    em.primary(&Document::Counts { counts }, &summary)
}

fn report(args: &ReportArgs, em: &mut Emitter) -> CliResult<()> {
    let text = if let Some(s) = &args.similarities {
        let r = SimilarityReport::from_similarities([s[0], s[1], s[2]], [s[3], s[4], s[5]]);
        let mut text = r.to_text();
        if args.breakdown {
            text.push('\n');
            text.push_str(&report_errors_breakdown(&r).to_text());
        }
        text
    } else {
        let path = args.document.as_ref().expect("clap requires a document");
        let raw = read_input(path, "document")?;
        let doc: Document = serde_json::from_str(&raw)
            .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
        let mut text = doc.to_text();
        if args.breakdown {
            match &doc {
                Document::Fit { outcome } => {
                    text.push('\n');
                    text.push_str(&report_errors_breakdown(&outcome.report).to_text());
                }
                _ => {
                    return Err(CliError::Domain(
                        "--breakdown needs a fit document".into(),
                    ))
                }
            }
        }
        text
    };
    match &em.out {
        Some(path) => {
            let path = path.clone();
            em.extra(&path, &text)?;
        }
        None => em.stdout.push_str(&text),
    }
    Ok(())
}

/// Runs one command line (including the program name).
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                CommandOutcome {
                    exit_code: 0,
                    artifacts: Vec::new(),
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                CommandOutcome::failure(2, rendered)
            };
        }
    };
    let mut em = Emitter {
        out: cli.out.clone(),
        format: cli.format,
        artifacts: Vec::new(),
        stdout: String::new(),
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a, &mut em),
        Command::Analyze(a) => analyze(a, cli.seed, &mut em),
        Command::Fit(a) => run_fit(a, &mut em),
        Command::Synth(a) => synth(a, cli.seed, &mut em),
        Command::Report(a) => report(a, &mut em),
    };
    match result {
        Ok(()) => CommandOutcome {
            exit_code: 0,
            artifacts: em.artifacts,
            stdout: em.stdout,
            stderr: String::new(),
        },
        Err(CliError::Usage(m)) => CommandOutcome::failure(2, format!("error: {m}")),
        Err(CliError::Domain(m)) => CommandOutcome::failure(1, format!("error: {m}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        let o = run(["fibre-cnot", "simulate"]);
        assert_eq!(o.exit_code, 2);
        assert!(!o.stderr.is_empty());
        let o = run(["fibre-cnot", "synth", "--ideal", "--trials", "0"]);
        assert_eq!(o.exit_code, 2);
        let o = run(["fibre-cnot", "bogus"]);
        assert_eq!(o.exit_code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let o = run(["fibre-cnot", "--help"]);
        assert_eq!(o.exit_code, 0);
        assert!(o.stdout.contains("simulate"));
    }

    #[test]
    fn similarities_breakdown() {
        let o = run([
            "fibre-cnot", "report", "--breakdown", "--similarities", "0.895", "0.974", "0.997",
            "0.883", "0.960", "0.998",
        ]);
        assert_eq!(o.exit_code, 0, "{}", o.stderr);
        assert!(o.stdout.contains("7.9 (ZZ) 7.7 (XX)"), "{}", o.stdout);
        assert!(o.stdout.contains("2.3 (ZZ) 3.8 (XX)"), "{}", o.stdout);
    }
}
