//! One record stream, two renderings. Reports, role views, traces and desk
//! verdicts are all lowered to [`Record`]s first, so the human text and the
//! machine-readable lines cannot drift apart.

use std::fmt::Write as _;

use serde::Serialize;

use crate::ballot::BallotId;
use crate::tally::IdStatus;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Record {
    Run {
        seed: u64,
    },
    Count {
        candidate: String,
        votes: u64,
    },
    TotalValid {
        ballots: u64,
    },
    Ledger {
        id: BallotId,
        status: IdStatus,
    },
    Discarded {
        sheets: u64,
    },
    Purged {
        ballot: Vec<String>,
    },
    /// One event as seen by `role`; `role` is `trace` for the full simulator log.
    Event {
        role: String,
        tick: u64,
        actor: String,
        action: String,
        detail: String,
    },
    Truth {
        voter: String,
        intent: Option<Vec<String>>,
        outcome: String,
    },
    Verdict {
        source: String,
        verdict: String,
    },
}

impl Record {
    fn section(&self) -> String {
        match self {
            Record::Run { .. } => "run".into(),
            Record::Count { .. } => "counts".into(),
            Record::TotalValid { .. } => "total".into(),
            Record::Ledger { .. } => "ledger".into(),
            Record::Discarded { .. } => "discarded".into(),
            Record::Purged { .. } => "purged".into(),
            Record::Event { role, .. } => format!("view {role}"),
            Record::Truth { .. } => "truth".into(),
            Record::Verdict { .. } => "verdicts".into(),
        }
    }

    fn write_line(&self, out: &mut String) {
        let _ = match self {
            Record::Run { seed } => writeln!(out, "seed\t{seed}"),
            Record::Count { candidate, votes } => writeln!(out, "{candidate}\t{votes}"),
            Record::TotalValid { ballots } => writeln!(out, "valid_ballots\t{ballots}"),
            Record::Ledger { id, status } => writeln!(out, "{id}\t{status}"),
            Record::Discarded { sheets } => writeln!(out, "sheets\t{sheets}"),
            Record::Purged { ballot } => writeln!(out, "{}", ballot.join(",")),
            Record::Event {
                tick,
                actor,
                action,
                detail,
                ..
            } => writeln!(out, "{tick}\t{actor}\t{action}\t{detail}"),
            Record::Truth { voter, intent, outcome } => {
                let intent = intent
                    .as_ref()
                    .map_or_else(|| "-".to_string(), |v| format!("{{{}}}", v.join(", ")));
                writeln!(out, "{voter}\t{intent}\t{outcome}")
            }
            Record::Verdict { source, verdict } => writeln!(out, "{source}\t{verdict}"),
        };
    }
}

/// Human text: a `[section]` header whenever the section changes, then one
/// tab-separated line per record.
pub fn render_text(records: &[Record]) -> String {
    let mut out = String::new();
    let mut current: Option<String> = None;
    for record in records {
        let section = record.section();
        if current.as_deref() != Some(section.as_str()) {
            let _ = writeln!(out, "[{section}]");
            current = Some(section);
        }
        record.write_line(&mut out);
    }
    out
}

/// Machine records: one JSON object per line, tagged by `type`.
pub fn render_lines(records: &[Record]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records always serialize"));
        out.push('\n');
    }
    out
}
