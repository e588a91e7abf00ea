//! The ballot box: sealed empty, open for insertion during election day,
//! closed and opened for reading afterwards. Anyone may insert anything while
//! it is open; nothing comes out until it is closed.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ballot::{parse_document, Document, Grid, Grille};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxState {
    SealedEmpty,
    OpenForInsertion,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("ballot box is {actual:?}, operation needs {needed:?}")]
    State { actual: BoxState, needed: BoxState },
    #[error("{participant:?} reached the insertion cap of {cap}")]
    CapReached { participant: String, cap: usize },
}

/// What is written on a sheet of paper.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Grille(Grille),
    /// Grids travel through the box only in the two-proxy and default-grille variants.
    Grid(Grid),
    /// Anything else: hand-written ballots, scrawls, noise.
    Text(String),
}

impl Payload {
    /// Canonical text of the sheet. Grilles inserted in person and by a
    /// proxy serialize identically.
    pub fn to_text(&self) -> String {
        match self {
            Payload::Grille(g) => g.to_text(),
            Payload::Grid(g) => g.to_text(),
            Payload::Text(t) => t.clone(),
        }
    }
}

/// One physical sheet. `inserted_by` is simulator bookkeeping and is dropped
/// when the box is closed.
#[derive(Debug, Clone)]
pub struct Sheet {
    pub payload: Payload,
    pub inserted_by: String,
}

impl Sheet {
    pub fn new(payload: Payload, inserted_by: impl Into<String>) -> Self {
        Self {
            payload,
            inserted_by: inserted_by.into(),
        }
    }
}

/// Reading of a sheet found in the box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SheetContent {
    Grille(Grille),
    Grid(Grid),
    Unreadable,
}

/// Parses a sheet written in canonical text form. Total: anything that is not
/// exactly a canonical grille or grid is unreadable.
pub fn read_sheet(text: &str) -> SheetContent {
    match parse_document(text) {
        Ok(Document::Grille(g)) => SheetContent::Grille(g),
        Ok(Document::Grid(g)) => SheetContent::Grid(g),
        Ok(Document::Ballot(_)) | Err(_) => SheetContent::Unreadable,
    }
}

#[derive(Debug)]
pub struct BallotBox {
    state: BoxState,
    sheets: Vec<Sheet>,
    cap: Option<usize>,
    inserted: HashMap<String, usize>,
    closed: Vec<Payload>,
}

impl Default for BallotBox {
    fn default() -> Self {
        Self::sealed_empty()
    }
}

impl BallotBox {
    pub fn sealed_empty() -> Self {
        Self {
            state: BoxState::SealedEmpty,
            sheets: Vec::new(),
            cap: None,
            inserted: HashMap::new(),
            closed: Vec::new(),
        }
    }

    /// A sealed empty box, immediately opened for insertion.
    pub fn open() -> Self {
        let mut b = Self::sealed_empty();
        b.state = BoxState::OpenForInsertion;
        b
    }

    /// Limits how many sheets each participant may insert. Off by default.
    pub fn with_cap(mut self, cap: Option<usize>) -> Self {
        self.cap = cap;
        self
    }

    pub fn state(&self) -> BoxState {
        self.state
    }

    fn require(&self, needed: BoxState) -> Result<(), BoxError> {
        if self.state == needed {
            Ok(())
        } else {
            Err(BoxError::State {
                actual: self.state,
                needed,
            })
        }
    }

    pub fn begin_polling(&mut self) -> Result<(), BoxError> {
        self.require(BoxState::SealedEmpty)?;
        self.state = BoxState::OpenForInsertion;
        Ok(())
    }

    /// Appends a sheet. No identity or content filtering, only the optional cap.
    pub fn insert(&mut self, sheet: Sheet) -> Result<(), BoxError> {
        self.require(BoxState::OpenForInsertion)?;
        if let Some(cap) = self.cap {
            let n = self.inserted.entry(sheet.inserted_by.clone()).or_default();
            if *n >= cap {
                return Err(BoxError::CapReached {
                    participant: sheet.inserted_by,
                    cap,
                });
            }
            *n += 1;
        }
        self.sheets.push(sheet);
        Ok(())
    }

    /// Number of sheets inserted so far; the contents stay unreadable.
    pub fn sheet_count(&self) -> usize {
        match self.state {
            BoxState::Closed => self.closed.len(),
            _ => self.sheets.len(),
        }
    }

    /// Closes the box and mixes its contents with `rng`. Inserter names are
    /// stripped; the result depends only on the payloads and the random source.
    pub fn close<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<&[Payload], BoxError> {
        self.require(BoxState::OpenForInsertion)?;
        self.state = BoxState::Closed;
        self.inserted.clear();
        self.closed = std::mem::take(&mut self.sheets)
            .into_iter()
            .map(|s| s.payload)
            .collect();
        self.closed.shuffle(rng);
        Ok(&self.closed)
    }

    pub fn contents(&self) -> Result<&[Payload], BoxError> {
        self.require(BoxState::Closed)?;
        Ok(&self.closed)
    }

    pub fn into_payloads(self) -> Result<Vec<Payload>, BoxError> {
        self.require(BoxState::Closed)?;
        Ok(self.closed)
    }
}

/// Audit dump of closed-box contents: each sheet as `sheet bytes=<n>` followed
/// by its `n` bytes of canonical text.
pub fn dump(payloads: &[Payload]) -> String {
    let mut out = String::new();
    for p in payloads {
        let text = p.to_text();
        let _ = writeln!(out, "sheet bytes={}", text.len());
        out.push_str(&text);
    }
    out
}
