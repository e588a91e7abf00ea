//! Command implementations behind the `blind-proxy` binary. They take their
//! output streams as arguments so tests can run them in-process.

use std::collections::HashMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::agents::{run_scenario, ConfigError, Outcome, Role, ScenarioConfig, ScenarioTrace};
use crate::ballot::{match_pair, parse_document, Document, ElectionParams, ElectoralMode, Grid, Grille};
use crate::records::{render_lines, render_text, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNREADABLE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Sectioned, tab-separated text.
    #[default]
    Text,
    /// One JSON object per line.
    Records,
}

impl OutputFormat {
    pub fn render(self, records: &[Record]) -> String {
        match self {
            OutputFormat::Text => render_text(records),
            OutputFormat::Records => render_lines(records),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub start: u64,
    pub count: u64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario_path: PathBuf,
    pub seed_override: Option<u64>,
    pub sweep: Option<Sweep>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub emit_views: Vec<Role>,
    /// Also emit the full, unprojected event log.
    pub emit_trace: bool,
    /// Also emit the simulator's ground truth per voter.
    pub emit_truth: bool,
}

fn records_for(trace: &ScenarioTrace, config: &ScenarioConfig, opts: &RunOptions) -> Vec<Record> {
    let mut out = vec![Record::Run { seed: trace.seed }];
    out.extend(trace.report.records());
    for role in &opts.emit_views {
        out.extend(trace.view_records(role));
    }
    if opts.emit_truth {
        out.extend(trace.truth_records(&config.params()));
    }
    if opts.emit_trace {
        out.extend(trace.trace_records());
    }
    out
}

fn write_output(opts: &RunOptions, bytes: &str, out: &mut dyn Write) -> io::Result<()> {
    match &opts.output_path {
        Some(path) => std::fs::write(path, bytes),
        None => out.write_all(bytes.as_bytes()),
    }
}

/// Runs one scenario, or a sweep over consecutive seeds. Sweeps run in
/// parallel and are emitted in seed order.
///
/// Exit status: 0 on completion, 2 if the scenario (or an output file) cannot
/// be read or written, 3 if the scenario breaks a config invariant.
pub fn cmd_run(opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if opts.sweep.is_some() && opts.seed_override.is_some() {
        let _ = writeln!(err, "error: a sweep and a fixed seed cannot be combined");
        return EXIT_UNREADABLE;
    }
    let config = match ScenarioConfig::load(&opts.scenario_path) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", opts.scenario_path.display());
            return e.exit_code();
        }
    };
    let seeds: Vec<u64> = match (opts.sweep, opts.seed_override) {
        (Some(s), _) => (0..s.count).map(|i| s.start.wrapping_add(i)).collect(),
        (None, Some(seed)) => vec![seed],
        (None, None) => vec![config.seed],
    };
    let results: Vec<Result<(String, usize), ConfigError>> = seeds
        .par_iter()
        .map(|seed| {
            let config = ScenarioConfig {
                seed: *seed,
                ..config.clone()
            };
            let trace = run_scenario(&config)?;
            let invalidated = trace
                .ground_truth
                .values()
                .filter(|t| matches!(t.outcome, Outcome::Invalidated(_)))
                .count();
            Ok((
                opts.output_format.render(&records_for(&trace, &config, opts)),
                invalidated,
            ))
        })
        .collect();

    let mut text = String::new();
    let mut invalidated = 0;
    for result in results {
        match result {
            Ok((chunk, n)) => {
                text.push_str(&chunk);
                invalidated += n;
            }
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", opts.scenario_path.display());
                return e.exit_code();
            }
        }
    }
    if let Err(e) = write_output(opts, &text, out) {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_UNREADABLE;
    }
    if opts.sweep.is_some() {
        let _ = writeln!(
            err,
            "sweep: {} runs, {invalidated} voter ballots invalidated in total",
            seeds.len()
        );
    }
    EXIT_OK
}

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub files: Vec<PathBuf>,
    pub candidates: Vec<String>,
    pub seats: u32,
    pub mode: ElectoralMode,
    pub embellishment: bool,
    pub output_format: OutputFormat,
}

enum Read {
    Grid(Grid),
    Grille(Grille),
    Verdict(String),
}

fn read_file(path: &Path, params: &ElectionParams) -> Read {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Read::Verdict(format!("unreadable: {e}")),
    };
    match parse_document(&text) {
        Ok(Document::Grid(g)) => Read::Grid(g),
        Ok(Document::Grille(g)) => Read::Grille(g),
        Ok(Document::Ballot(paper)) => Read::Verdict(verdict(&paper.grid, &paper.grille, params)),
        Err(e) => Read::Verdict(format!("unreadable: {e}")),
    }
}

fn verdict(grid: &Grid, grille: &Grille, params: &ElectionParams) -> String {
    let params = params.clone().with_encoding(grid.encoding());
    match match_pair(grid, grille, &params) {
        Ok(v) => v.to_string(),
        Err(e) => format!("unreadable: {e}"),
    }
}

/// Desk-checks hand-written ballots. Each argument is a complete ballot
/// document, or a grid or a grille; grids and grilles are paired by id. One
/// verdict per ballot, in argument order. Verdicts are the output, so the
/// exit status is 0 even for unreadable files; only bad election
/// parameters give 2.
pub fn cmd_validate(opts: &ValidateOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let params = match ElectionParams::new(opts.candidates.iter().cloned(), opts.seats, opts.mode) {
        Ok(p) => p.with_embellishment(opts.embellishment),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_UNREADABLE;
        }
    };
    let reads: Vec<Read> = opts.files.iter().map(|f| read_file(f, &params)).collect();
    let mut grilles: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, r) in reads.iter().enumerate() {
        if let Read::Grille(g) = r {
            grilles.entry(g.id()).or_default().push(i);
        }
    }
    let mut paired = vec![false; reads.len()];
    let mut records = Vec::new();
    for (i, read) in reads.iter().enumerate() {
        let source = opts.files[i].display().to_string();
        let (source, verdict) = match read {
            Read::Verdict(v) => (source, v.clone()),
            Read::Grid(grid) => match grilles.get(&grid.id).map(Vec::as_slice) {
                Some([j]) => {
                    paired[*j] = true;
                    let Read::Grille(grille) = &reads[*j] else {
                        unreachable!()
                    };
                    (
                        format!("{source} + {}", opts.files[*j].display()),
                        verdict(grid, grille, &params),
                    )
                }
                Some(_) => (source, "mismatch: several grilles share this id".into()),
                None => (source, "unpaired: no grille with this id".into()),
            },
            Read::Grille(_) if paired[i] => continue,
            Read::Grille(g) => match grilles.get(&g.id()).map(Vec::len) {
                Some(1) => (source, "unpaired: no grid with this id".into()),
                _ => (source, "mismatch: several grilles share this id".into()),
            },
        };
        records.push(Record::Verdict { source, verdict });
    }
    let _ = out.write_all(opts.output_format.render(&records).as_bytes());
    EXIT_OK
}
