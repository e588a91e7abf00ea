//! The electoral committee's reading and counting of ballot papers.
//!
//! [`tally`] is the pure pipeline. [`Committee`] wraps it with the ordering
//! the committee must respect: no counting before the handover, and vote
//! proving only between counting and publication.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ballot::{match_pair, BallotId, ElectionParams, Grid, Grille, MatchVerdict, MismatchReason, VoteIntent};
use crate::collection::{read_sheet, Payload, SheetContent};
use crate::records::Record;
use crate::registration::HandoverPackage;

/// Published status of a valid id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdStatus {
    Counted,
    InvalidDuplicateGrille,
    /// Two or more grids under one id in the box (two-proxy and default-grille variants).
    InvalidDuplicateGrid,
    InvalidMissingGrid,
    InvalidMissingGrille,
    InvalidChecksum,
    InvalidMismatch,
    InvalidEmbellishment,
    Unused,
}

impl IdStatus {
    pub fn is_invalid(self) -> bool {
        !matches!(self, IdStatus::Counted | IdStatus::Unused)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IdStatus::Counted => "counted",
            IdStatus::InvalidDuplicateGrille => "invalid-duplicate-grille",
            IdStatus::InvalidDuplicateGrid => "invalid-duplicate-grid",
            IdStatus::InvalidMissingGrid => "invalid-missing-grid",
            IdStatus::InvalidMissingGrille => "invalid-missing-grille",
            IdStatus::InvalidChecksum => "invalid-checksum",
            IdStatus::InvalidMismatch => "invalid-mismatch",
            IdStatus::InvalidEmbellishment => "invalid-embellishment",
            IdStatus::Unused => "unused",
        }
    }
}

impl fmt::Display for IdStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub id: BallotId,
    pub status: IdStatus,
}

/// The published election result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElectionReport {
    /// For-votes per candidate, in candidate-list order.
    pub counts: Vec<(String, u64)>,
    pub total_valid_ballots: u64,
    /// One entry per valid id, ascending by id.
    pub ledger: Vec<LedgerEntry>,
    pub discarded_sheets: u64,
    /// Present only when purged ballots are published; sorted canonically.
    pub purged_ballots: Option<Vec<Vec<String>>>,
}

impl ElectionReport {
    pub fn count_for(&self, candidate: &str) -> Option<u64> {
        self.counts.iter().find(|(c, _)| c == candidate).map(|(_, n)| *n)
    }

    pub fn status_of(&self, id: BallotId) -> Option<IdStatus> {
        self.ledger
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| self.ledger[i].status)
    }

    pub fn records(&self) -> Vec<Record> {
        let mut out: Vec<Record> = self
            .counts
            .iter()
            .map(|(candidate, votes)| Record::Count {
                candidate: candidate.clone(),
                votes: *votes,
            })
            .collect();
        out.push(Record::TotalValid {
            ballots: self.total_valid_ballots,
        });
        out.extend(self.ledger.iter().map(|e| Record::Ledger {
            id: e.id,
            status: e.status,
        }));
        out.push(Record::Discarded {
            sheets: self.discarded_sheets,
        });
        if let Some(purged) = &self.purged_ballots {
            out.extend(purged.iter().map(|b| Record::Purged { ballot: b.clone() }));
        }
        out
    }

    /// Structured text document with `counts`, `total`, `ledger`,
    /// `discarded` and optional `purged` sections.
    pub fn to_text(&self) -> String {
        crate::records::render_text(&self.records())
    }
}

/// Which route each ballot part takes to the committee.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Routes {
    /// Grids via the RA, grilles via the box.
    #[default]
    GridViaRegistry,
    /// Both parts may come through the box (two-proxy variant); grids handed
    /// over by the RA are accepted as well.
    BothViaBox,
    /// Grilles via the RA, grids via the box (default-grille variant).
    GrilleViaRegistry,
}

impl Routes {
    fn box_accepts_grids(self) -> bool {
        !matches!(self, Routes::GridViaRegistry)
    }

    fn box_accepts_grilles(self) -> bool {
        !matches!(self, Routes::GrilleViaRegistry)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TallyOptions {
    pub routes: Routes,
    pub publish_purged: bool,
}

/// The committee's complete reading: the published report plus the decoded
/// ballot under each counted id, which the committee sees but never publishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub report: ElectionReport,
    pub decoded: BTreeMap<BallotId, VoteIntent>,
}

enum Part<'a, T> {
    Borrowed(&'a T),
    Owned(T),
}

impl<T> std::ops::Deref for Part<'_, T> {
    type Target = T;

    fn deref(&self) -> &T {
        match self {
            Part::Borrowed(t) => t,
            Part::Owned(t) => t,
        }
    }
}

fn status_for(reason: MismatchReason) -> IdStatus {
    match reason {
        MismatchReason::Checksum => IdStatus::InvalidChecksum,
        MismatchReason::Embellishment => IdStatus::InvalidEmbellishment,
        _ => IdStatus::InvalidMismatch,
    }
}

/// Reads the closed box against the handover package.
///
/// 1. Unreadable sheets, sheets of a kind the routes do not allow in the box,
///    and sheets whose id is not valid are discarded.
/// 2. An id with two or more grilles (or grids, where grids come through the
///    box) is invalidated and all its papers disregarded.
/// 3. An id with only one part is invalidated as missing the other; an id
///    with neither is unused.
/// 4. Remaining pairs go through [`match_pair`]; checksum and embellishment
///    failures get their own status, every other mismatch is
///    `invalid-mismatch`.
/// 5. Matched papers add one vote to each voted-for candidate.
pub fn tally(
    payloads: &[Payload],
    handover: &HandoverPackage,
    params: &ElectionParams,
    options: &TallyOptions,
) -> Reading {
    let mut discarded = 0u64;
    let mut grilles: HashMap<BallotId, Vec<Part<'_, Grille>>> = HashMap::new();
    let mut grids: HashMap<BallotId, Vec<Part<'_, Grid>>> = HashMap::new();

    let routes = options.routes;
    for payload in payloads {
        match payload {
            Payload::Grille(g) if routes.box_accepts_grilles() && handover.valid_ids.contains(&g.id()) => {
                grilles.entry(g.id()).or_default().push(Part::Borrowed(g));
            }
            Payload::Grid(g) if routes.box_accepts_grids() && handover.valid_ids.contains(&g.id) => {
                grids.entry(g.id).or_default().push(Part::Borrowed(g));
            }
            Payload::Text(text) => match read_sheet(text) {
                SheetContent::Grille(g) if routes.box_accepts_grilles() && handover.valid_ids.contains(&g.id()) => {
                    grilles.entry(g.id()).or_default().push(Part::Owned(g));
                }
                SheetContent::Grid(g) if routes.box_accepts_grids() && handover.valid_ids.contains(&g.id) => {
                    grids.entry(g.id).or_default().push(Part::Owned(g));
                }
                _ => discarded += 1,
            },
            _ => discarded += 1,
        }
    }
    for (id, grid) in &handover.grids {
        grids.entry(*id).or_default().push(Part::Borrowed(grid));
    }
    for (id, grille) in &handover.grilles {
        grilles.entry(*id).or_default().push(Part::Borrowed(grille));
    }

    let mut counts = vec![0u64; params.candidates().len()];
    let mut ledger = Vec::with_capacity(handover.valid_ids.len());
    let mut decoded = BTreeMap::new();
    for id in &handover.valid_ids {
        let gs = grilles.get(id).map_or(&[][..], Vec::as_slice);
        let ds = grids.get(id).map_or(&[][..], Vec::as_slice);
        let status = match (ds, gs) {
            (_, gs) if gs.len() >= 2 => IdStatus::InvalidDuplicateGrille,
            (ds, _) if ds.len() >= 2 => IdStatus::InvalidDuplicateGrid,
            ([], []) => IdStatus::Unused,
            (_, []) => IdStatus::InvalidMissingGrille,
            ([], _) => IdStatus::InvalidMissingGrid,
            ([grid], [grille]) => match match_pair(grid, grille, params) {
                Ok(MatchVerdict::Matched(intent)) => {
                    for name in intent.iter() {
                        if let Some(i) = params.candidate_index(name) {
                            counts[i] += 1;
                        }
                    }
                    decoded.insert(*id, intent);
                    IdStatus::Counted
                }
                Ok(MatchVerdict::Mismatch(reason)) => status_for(reason),
                // parts are filed under their own ids, so this is unreachable in practice
                Err(_) => IdStatus::InvalidMismatch,
            },
            _ => unreachable!("slice lengths are covered above"),
        };
        ledger.push(LedgerEntry { id: *id, status });
    }

    let purged_ballots = options.publish_purged.then(|| {
        let mut ballots: Vec<Vec<usize>> = decoded
            .values()
            .map(|intent| {
                intent
                    .iter()
                    .filter_map(|n| params.candidate_index(n))
                    .collect::<Vec<_>>()
            })
            .map(|mut idx| {
                idx.sort_unstable();
                idx
            })
            .collect();
        ballots.sort();
        ballots
            .into_iter()
            .map(|idx| idx.into_iter().map(|i| params.candidates()[i].clone()).collect())
            .collect()
    });

    let report = ElectionReport {
        counts: params.candidates().iter().cloned().zip(counts).collect(),
        total_valid_ballots: decoded.len() as u64,
        ledger,
        discarded_sheets: discarded,
        purged_ballots,
    };
    Reading { report, decoded }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TallyError {
    #[error("the committee has not received the handover package")]
    NoHandover,
    #[error("the committee has not counted yet")]
    NotCounted,
    #[error("the result has already been published")]
    AlreadyPublished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    AwaitingHandover,
    Ready,
    Counted,
    Published,
}

/// The electoral committee as a stateful actor.
#[derive(Debug)]
pub struct Committee {
    params: ElectionParams,
    options: TallyOptions,
    phase: Phase,
    handover: Option<HandoverPackage>,
    reading: Option<Reading>,
}

impl Committee {
    pub fn new(params: ElectionParams, options: TallyOptions) -> Self {
        Self {
            params,
            options,
            phase: Phase::AwaitingHandover,
            handover: None,
            reading: None,
        }
    }

    pub fn receive_handover(&mut self, package: HandoverPackage) {
        if self.phase == Phase::AwaitingHandover {
            self.handover = Some(package);
            self.phase = Phase::Ready;
        }
    }

    pub fn count(&mut self, payloads: &[Payload]) -> Result<&ElectionReport, TallyError> {
        let handover = match self.phase {
            Phase::AwaitingHandover => return Err(TallyError::NoHandover),
            Phase::Published => return Err(TallyError::AlreadyPublished),
            Phase::Ready | Phase::Counted => self.handover.as_ref().expect("handover received"),
        };
        self.reading = Some(tally(payloads, handover, &self.params, &self.options));
        self.phase = Phase::Counted;
        Ok(&self.reading.as_ref().expect("just counted").report)
    }

    /// A voter who hands the committee her id before publication can show how
    /// she voted: true iff that id was counted with exactly `claimed`.
    pub fn prove_vote(&self, id: BallotId, claimed: &VoteIntent) -> Result<bool, TallyError> {
        match self.phase {
            Phase::AwaitingHandover | Phase::Ready => Err(TallyError::NotCounted),
            Phase::Published => Err(TallyError::AlreadyPublished),
            Phase::Counted => {
                let reading = self.reading.as_ref().expect("counted");
                Ok(reading.decoded.get(&id) == Some(claimed))
            }
        }
    }

    pub fn publish(&mut self) -> Result<ElectionReport, TallyError> {
        match self.phase {
            Phase::Counted => {
                self.phase = Phase::Published;
                Ok(self.reading.as_ref().expect("counted").report.clone())
            }
            Phase::Published => Err(TallyError::AlreadyPublished),
            _ => Err(TallyError::NotCounted),
        }
    }

    /// The committee's full reading, including decoded ballots per id.
    pub fn reading(&self) -> Option<&Reading> {
        self.reading.as_ref()
    }
}
