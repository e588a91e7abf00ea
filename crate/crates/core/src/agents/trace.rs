//! Scenario traces and who gets to see what.
//!
//! Every event lists the roles that can observe it. [`role_view`] projects a
//! trace onto one role; the projection is the executable form of the
//! knowledge matrix: the RA never sees a grille, the committee never sees
//! which voter holds which id, a proxy sees exactly what was entrusted to him.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ballot::{BallotId, Grid, Grille, VoteIntent};
use crate::collection::Payload;
use crate::records::Record;
use crate::registration::{HandoverPackage, Tick};
use crate::tally::{ElectionReport, IdStatus};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Ra,
    Ec,
    Proxy(String),
    /// Anyone at all.
    Public,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Ra => f.write_str("ra"),
            Role::Ec => f.write_str("ec"),
            Role::Proxy(p) => write!(f, "proxy:{p}"),
            Role::Public => f.write_str("public"),
        }
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ra" => Ok(Role::Ra),
            "ec" => Ok(Role::Ec),
            "public" => Ok(Role::Public),
            _ => match s.strip_prefix("proxy:") {
                Some(name) if !name.is_empty() => Ok(Role::Proxy(name.to_string())),
                _ => Err(format!("unknown role {s:?} (expected ra, ec, public or proxy:<name>)")),
            },
        }
    }
}

/// A ballot part in someone's hands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Part {
    Grid(Grid),
    Grille(Grille),
}

impl Part {
    fn to_text(&self) -> String {
        match self {
            Part::Grid(g) => g.to_text(),
            Part::Grille(g) => g.to_text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    IdIssued {
        voter: String,
        id: BallotId,
    },
    DefaultGridIssued {
        id: BallotId,
        grid: Grid,
    },
    DefaultGrilleIssued {
        id: BallotId,
        grille: Grille,
    },
    /// Simulator bookkeeping: what the voter actually made.
    BallotPrepared {
        voter: String,
        id: BallotId,
    },
    GridSubmitted {
        voter: String,
        id: BallotId,
        grid: Grid,
        on_time: bool,
    },
    GrilleSubmitted {
        voter: String,
        id: BallotId,
        grille: Grille,
    },
    Entrusted {
        voter: String,
        proxy: String,
        id: BallotId,
        part: Part,
    },
    Delegated {
        from: String,
        to: String,
        id: BallotId,
        part: Part,
    },
    IdLeaked {
        proxy: String,
        id: BallotId,
    },
    Deanonymized {
        proxy: String,
        voter: String,
        id: BallotId,
    },
    BoxSealed,
    SheetInserted {
        by: String,
        payload: Payload,
    },
    /// The insertion cap turned a sheet away.
    SheetRefused {
        by: String,
    },
    StuffingInserted {
        accepted: u64,
        refused: u64,
    },
    BoxClosed {
        sheets: usize,
    },
    Handover {
        package: Arc<HandoverPackage>,
    },
    BoxOpened {
        payloads: Arc<[Payload]>,
    },
    ResultPublished {
        total_valid_ballots: u64,
    },
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::IdIssued { .. } => "id-issued",
            Action::DefaultGridIssued { .. } => "default-grid-issued",
            Action::DefaultGrilleIssued { .. } => "default-grille-issued",
            Action::BallotPrepared { .. } => "ballot-prepared",
            Action::GridSubmitted { .. } => "grid-submitted",
            Action::GrilleSubmitted { .. } => "grille-submitted",
            Action::Entrusted { .. } => "entrusted",
            Action::Delegated { .. } => "delegated",
            Action::IdLeaked { .. } => "id-leaked",
            Action::Deanonymized { .. } => "deanonymized",
            Action::BoxSealed => "box-sealed",
            Action::SheetInserted { .. } => "sheet-inserted",
            Action::SheetRefused { .. } => "sheet-refused",
            Action::StuffingInserted { .. } => "stuffing-inserted",
            Action::BoxClosed { .. } => "box-closed",
            Action::Handover { .. } => "handover",
            Action::BoxOpened { .. } => "box-opened",
            Action::ResultPublished { .. } => "result-published",
        }
    }

    /// Every grille carried by this event, wherever it sits.
    pub fn grilles(&self) -> Vec<&Grille> {
        match self {
            Action::DefaultGrilleIssued { grille, .. } | Action::GrilleSubmitted { grille, .. } => vec![grille],
            Action::Entrusted {
                part: Part::Grille(g), ..
            }
            | Action::Delegated {
                part: Part::Grille(g), ..
            } => vec![g],
            Action::SheetInserted {
                payload: Payload::Grille(g),
                ..
            } => vec![g],
            Action::Handover { package } => package.grilles.values().collect(),
            Action::BoxOpened { payloads } => payloads
                .iter()
                .filter_map(|p| match p {
                    Payload::Grille(g) => Some(g),
                    _ => None,
                })
                .collect(),
            _ => vec![],
        }
    }

    /// The voter names and ids this event puts side by side.
    pub fn voter_id_links(&self) -> Vec<(&str, BallotId)> {
        match self {
            Action::IdIssued { voter, id }
            | Action::BallotPrepared { voter, id }
            | Action::GridSubmitted { voter, id, .. }
            | Action::GrilleSubmitted { voter, id, .. }
            | Action::Entrusted { voter, id, .. }
            | Action::Deanonymized { voter, id, .. } => vec![(voter, *id)],
            Action::SheetInserted { by, payload } => match payload {
                Payload::Grille(g) => vec![(by, g.id())],
                Payload::Grid(g) => vec![(by, g.id)],
                Payload::Text(_) => vec![],
            },
            _ => vec![],
        }
    }

    fn detail(&self) -> String {
        match self {
            Action::IdIssued { voter, id } => format!("voter={voter} id={id}"),
            Action::DefaultGridIssued { id, grid } => format!("id={id} rows={}", grid.names.len()),
            Action::DefaultGrilleIssued { id, grille } => format!("id={id} {}", escape(&grille.to_text())),
            Action::BallotPrepared { voter, id } => format!("voter={voter} id={id}"),
            Action::GridSubmitted {
                voter,
                id,
                grid,
                on_time,
            } => {
                format!("voter={voter} id={id} on_time={on_time} {}", escape(&grid.to_text()))
            }
            Action::GrilleSubmitted { voter, id, grille } => {
                format!("voter={voter} id={id} {}", escape(&grille.to_text()))
            }
            Action::Entrusted { voter, proxy, id, part } => {
                format!("voter={voter} proxy={proxy} id={id} {}", escape(&part.to_text()))
            }
            Action::Delegated { from, to, id, part } => {
                format!("from={from} to={to} id={id} {}", escape(&part.to_text()))
            }
            Action::IdLeaked { proxy, id } => format!("proxy={proxy} id={id}"),
            Action::Deanonymized { proxy, voter, id } => format!("proxy={proxy} voter={voter} id={id}"),
            Action::BoxSealed => "empty".into(),
            Action::SheetInserted { by, payload } => format!("by={by} {}", escape(&payload.to_text())),
            Action::SheetRefused { by } => format!("by={by}"),
            Action::StuffingInserted { accepted, refused } => format!("accepted={accepted} refused={refused}"),
            Action::BoxClosed { sheets } => format!("sheets={sheets}"),
            Action::Handover { package } => escape(&package.to_text()),
            Action::BoxOpened { payloads } => format!("sheets={}", payloads.len()),
            Action::ResultPublished { total_valid_ballots } => format!("valid_ballots={total_valid_ballots}"),
        }
    }
}

/// Escapes line breaks and tabs so a document fits on one record line.
fn escape(text: &str) -> String {
    text.chars()
        .flat_map(|c| match c {
            '\n' => vec!['\\', 'n'],
            '\t' => vec!['\\', 't'],
            '\\' => vec!['\\', '\\'],
            c => vec![c],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub tick: Tick,
    pub actor: String,
    pub action: Action,
    /// Roles that observe this event; empty for simulator-only bookkeeping.
    pub seen_by: Vec<Role>,
}

impl Event {
    pub fn visible_to(&self, role: &Role) -> bool {
        self.seen_by.iter().any(|r| r == role || *r == Role::Public)
    }

    /// The event as records seen by `role` (`trace` for the unprojected log).
    /// An opened box expands to one record per sheet.
    pub fn records(&self, role: &str) -> Vec<Record> {
        let record = |action: &str, detail: String| Record::Event {
            role: role.to_string(),
            tick: self.tick,
            actor: self.actor.clone(),
            action: action.to_string(),
            detail,
        };
        let mut out = vec![record(self.action.name(), self.action.detail())];
        if let Action::BoxOpened { payloads } = &self.action {
            out.extend(payloads.iter().map(|p| record("sheet-read", escape(&p.to_text()))));
        }
        out
    }
}

/// Events visible to `role`, in trace order.
pub fn role_view<'a>(trace: &'a ScenarioTrace, role: &Role) -> Vec<&'a Event> {
    trace.events.iter().filter(|e| e.visible_to(role)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    CountedAsIntended,
    /// Counted, but from a ballot part that was changed on its way.
    CountedAltered,
    Invalidated(IdStatus),
    Absent,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::CountedAsIntended => f.write_str("counted-as-intended"),
            Outcome::CountedAltered => f.write_str("counted-altered"),
            Outcome::Invalidated(status) => write!(f, "invalidated ({status})"),
            Outcome::Absent => f.write_str("absent"),
        }
    }
}

/// Simulator-only knowledge about one voter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truth {
    pub intent: Option<VoteIntent>,
    /// The id her ballot was cast under (her partner's, after an id swap).
    pub ballot_id: Option<BallotId>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct ScenarioTrace {
    pub seed: u64,
    pub events: Vec<Event>,
    pub report: ElectionReport,
    pub ground_truth: BTreeMap<String, Truth>,
}

impl ScenarioTrace {
    pub fn handover(&self) -> Option<&HandoverPackage> {
        self.events.iter().find_map(|e| match &e.action {
            Action::Handover { package } => Some(package.as_ref()),
            _ => None,
        })
    }

    pub fn view_records(&self, role: &Role) -> Vec<Record> {
        let label = role.to_string();
        role_view(self, role).iter().flat_map(|e| e.records(&label)).collect()
    }

    pub fn trace_records(&self) -> Vec<Record> {
        self.events.iter().flat_map(|e| e.records("trace")).collect()
    }

    pub fn truth_records(&self, params: &crate::ballot::ElectionParams) -> Vec<Record> {
        self.ground_truth
            .iter()
            .map(|(voter, t)| Record::Truth {
                voter: voter.clone(),
                intent: t.intent.as_ref().map(|i| i.in_candidate_order(params)),
                outcome: t.outcome.to_string(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_round_trip() {
        for r in ["ra", "ec", "public", "proxy:peter"] {
            assert_eq!(r.parse::<Role>().unwrap().to_string(), r);
        }
        assert!("proxy:".parse::<Role>().is_err());
        assert!("voter".parse::<Role>().is_err());
    }

    #[test]
    fn public_events_reach_everyone() {
        let e = Event {
            tick: 0,
            actor: "ec".into(),
            action: Action::BoxSealed,
            seen_by: vec![Role::Public],
        };
        assert!(e.visible_to(&Role::Ra));
        assert!(e.visible_to(&Role::Proxy("p".into())));
        let hidden = Event { seen_by: vec![], ..e };
        assert!(!hidden.visible_to(&Role::Ec));
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("a\tb\nc\\"), "a\\tb\\nc\\\\");
    }
}
