use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::BallotError;

/// How many candidates a single voter may vote for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElectoralMode {
    /// Any subset of the candidates, including none or all of them.
    #[default]
    Subset,
    /// At most one candidate.
    FirstPastThePost,
    /// At most `seats` candidates.
    PluralityAtLarge,
}

impl ElectoralMode {
    /// Upper bound on the size of a vote, if the mode has one.
    pub fn max_votes(self, seats: u32) -> Option<usize> {
        match self {
            ElectoralMode::Subset => None,
            ElectoralMode::FirstPastThePost => Some(1),
            ElectoralMode::PluralityAtLarge => Some(seats as usize),
        }
    }

    /// Fixed-vote modes list only the real candidate names on a grid.
    pub fn is_fixed_vote(self) -> bool {
        !matches!(self, ElectoralMode::Subset)
    }
}

impl fmt::Display for ElectoralMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElectoralMode::Subset => "subset",
            ElectoralMode::FirstPastThePost => "first-past-the-post",
            ElectoralMode::PluralityAtLarge => "plurality-at-large",
        })
    }
}

/// How a grille marks the voted-for rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrilleEncoding {
    /// One 0/1 mark per grid row.
    #[default]
    Bits,
    /// The list of code numbers of the voted-for rows.
    Numerical,
}

impl fmt::Display for GrilleEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GrilleEncoding::Bits => "bits",
            GrilleEncoding::Numerical => "codes",
        })
    }
}

/// Names are compared after trimming surrounding whitespace, case-sensitively.
pub fn normalize_name(name: &str) -> &str {
    name.trim()
}

pub(crate) fn check_name(name: &str) -> Result<(), BallotError> {
    let trimmed = normalize_name(name);
    if trimmed.is_empty() {
        return Err(BallotError::InvalidParams("candidate name is empty".into()));
    }
    if trimmed.contains(['\t', '\n', '\r']) {
        return Err(BallotError::InvalidParams(format!(
            "candidate name {trimmed:?} contains a tab or line break"
        )));
    }
    Ok(())
}

/// The fixed parameters of one election: who runs, for how many seats, and
/// which ballot encoding the voters use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionParams {
    candidates: Vec<String>,
    seats: u32,
    mode: ElectoralMode,
    encoding: GrilleEncoding,
    embellishment: bool,
}

impl ElectionParams {
    pub fn new<I, S>(candidates: I, seats: u32, mode: ElectoralMode) -> Result<Self, BallotError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names = Vec::new();
        let mut seen = BTreeSet::new();
        for raw in candidates {
            let raw = raw.as_ref();
            check_name(raw)?;
            let name = normalize_name(raw).to_string();
            if !seen.insert(name.clone()) {
                return Err(BallotError::InvalidParams(format!("candidate {name:?} listed twice")));
            }
            names.push(name);
        }
        if names.is_empty() {
            return Err(BallotError::InvalidParams("no candidates".into()));
        }
        if seats == 0 {
            return Err(BallotError::InvalidParams("seats must be at least 1".into()));
        }
        if mode == ElectoralMode::PluralityAtLarge && seats as usize > names.len() {
            return Err(BallotError::InvalidParams(format!(
                "{seats} seats exceed {} candidates in plurality-at-large mode",
                names.len()
            )));
        }
        Ok(Self {
            candidates: names,
            seats,
            mode,
            encoding: GrilleEncoding::Bits,
            embellishment: false,
        })
    }

    pub fn with_encoding(mut self, encoding: GrilleEncoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn with_embellishment(mut self, enabled: bool) -> Self {
        self.embellishment = enabled;
        self
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn seats(&self) -> u32 {
        self.seats
    }

    pub fn mode(&self) -> ElectoralMode {
        self.mode
    }

    pub fn encoding(&self) -> GrilleEncoding {
        self.encoding
    }

    pub fn embellishment_enabled(&self) -> bool {
        self.embellishment
    }

    /// Position of `name` in the candidate list, after normalization.
    pub fn candidate_index(&self, name: &str) -> Option<usize> {
        let name = normalize_name(name);
        self.candidates.iter().position(|c| c == name)
    }

    pub fn is_candidate(&self, name: &str) -> bool {
        self.candidate_index(name).is_some()
    }

    /// Rows on a voter-made grid: twice the candidate count in subset mode,
    /// exactly the candidates in fixed-vote modes.
    pub fn grid_len(&self) -> usize {
        if self.mode.is_fixed_vote() {
            self.candidates.len()
        } else {
            2 * self.candidates.len()
        }
    }
}

/// The set of candidates a voter votes for.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoteIntent(BTreeSet<String>);

impl VoteIntent {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self(
            names
                .into_iter()
                .map(|n| normalize_name(n.as_ref()).to_string())
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(normalize_name(name))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// The voted-for names in candidate-list order.
    pub fn in_candidate_order(&self, params: &ElectionParams) -> Vec<String> {
        params
            .candidates()
            .iter()
            .filter(|c| self.0.contains(*c))
            .cloned()
            .collect()
    }

    /// Checks that every name is a candidate and the mode's cardinality bound holds.
    pub fn validate(&self, params: &ElectionParams) -> Result<(), BallotError> {
        if let Some(unknown) = self.0.iter().find(|n| !params.is_candidate(n)) {
            return Err(BallotError::Intent(format!("{unknown:?} is not a candidate")));
        }
        if let Some(max) = params.mode().max_votes(params.seats()) {
            if self.0.len() > max {
                return Err(BallotError::Intent(format!(
                    "{} votes exceed the {} limit of {max}",
                    self.0.len(),
                    params.mode()
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for VoteIntent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, name) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(name)?;
        }
        f.write_str("}")
    }
}

impl<S: AsRef<str>> FromIterator<S> for VoteIntent {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Self::new(iter)
    }
}
