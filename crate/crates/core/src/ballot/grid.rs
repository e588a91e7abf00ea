use std::collections::HashSet;

use rand::distributions::Alphanumeric;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::params::{normalize_name, ElectionParams, GrilleEncoding, VoteIntent};
use super::{BallotError, BallotId};

/// Length of a generated decoy name.
pub const DECOY_NAME_LEN: usize = 8;

/// The name column of a ballot paper, submitted with its checksum under an id.
///
/// Any list of names is representable; whether it is usable is decided by
/// [`grid_classify`](super::grid_classify) and
/// [`match_pair`](super::match_pair).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub id: BallotId,
    pub names: Vec<String>,
    pub checksum: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embellishment: Option<u64>,
    /// Numerical encoding only: one code per row, parallel to `names`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_numbers: Option<Vec<u32>>,
}

impl Grid {
    pub fn encoding(&self) -> GrilleEncoding {
        if self.code_numbers.is_some() {
            GrilleEncoding::Numerical
        } else {
            GrilleEncoding::Bits
        }
    }
}

/// The marks of a grille.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Marks {
    Bits(Vec<bool>),
    /// Sorted ascending, pairwise distinct.
    Codes(Vec<u32>),
}

/// The mark column of a ballot paper, delivered to the ballot box.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grille {
    id: BallotId,
    marks: Marks,
}

impl Grille {
    pub fn bits(id: BallotId, bits: Vec<bool>) -> Self {
        Self {
            id,
            marks: Marks::Bits(bits),
        }
    }

    /// Numerical grille. Codes are stored in ascending order so the listing
    /// carries no row-order information.
    pub fn codes(id: BallotId, mut codes: Vec<u32>) -> Result<Self, BallotError> {
        codes.sort_unstable();
        if codes.windows(2).any(|w| w[0] == w[1]) {
            return Err(BallotError::InvalidGrille("code numbers repeat".into()));
        }
        Ok(Self {
            id,
            marks: Marks::Codes(codes),
        })
    }

    pub fn id(&self) -> BallotId {
        self.id
    }

    pub fn marks(&self) -> &Marks {
        &self.marks
    }

    pub fn encoding(&self) -> GrilleEncoding {
        match self.marks {
            Marks::Bits(_) => GrilleEncoding::Bits,
            Marks::Codes(_) => GrilleEncoding::Numerical,
        }
    }

    /// Bit marks, if this is a bit-vector grille.
    pub fn as_bits(&self) -> Option<&[bool]> {
        match &self.marks {
            Marks::Bits(bits) => Some(bits),
            Marks::Codes(_) => None,
        }
    }

    /// The same marks under a different id.
    pub fn with_id(&self, id: BallotId) -> Self {
        Self {
            id,
            marks: self.marks.clone(),
        }
    }
}

/// A grid and a grille under one id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotPaper {
    pub grid: Grid,
    pub grille: Grille,
}

impl BallotPaper {
    pub fn new(grid: Grid, grille: Grille) -> Result<Self, BallotError> {
        if grid.id != grille.id {
            return Err(BallotError::Usage(format!(
                "grid id {} does not match grille id {}",
                grid.id, grille.id
            )));
        }
        Ok(Self { grid, grille })
    }
}

/// Number of 1 marks; for a numerical grille, the number of listed codes.
pub fn checksum_of(grille: &Grille) -> u64 {
    match &grille.marks {
        Marks::Bits(bits) => bits.iter().filter(|b| **b).count() as u64,
        Marks::Codes(codes) => codes.len() as u64,
    }
}

/// Position fingerprint: the sum of 1-based positions of the 1 marks; for a
/// numerical grille, the sum of the listed codes.
///
/// Exchanging a 1 at position `i` with a 0 at position `j` keeps the checksum
/// and shifts this value by `j - i`, so every such swap is caught.
pub fn embellishment_of(grille: &Grille) -> u64 {
    match &grille.marks {
        Marks::Bits(bits) => bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i as u64 + 1)
            .sum(),
        Marks::Codes(codes) => codes.iter().map(|c| u64::from(*c)).sum(),
    }
}

/// `count` random alphanumeric names, distinct from each other and from every candidate.
pub fn decoy_names<R: Rng + ?Sized>(count: usize, params: &ElectionParams, rng: &mut R) -> Vec<String> {
    let mut taken: HashSet<String> = params.candidates().iter().cloned().collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let name: String = (0..DECOY_NAME_LEN)
            .map(|_| char::from(rng.sample(Alphanumeric)))
            .collect();
        if taken.insert(name.clone()) {
            out.push(name);
        }
    }
    out
}

/// Candidate names plus decoys up to `len` rows, in a uniformly random order.
pub fn shuffled_layout<R: Rng + ?Sized>(len: usize, params: &ElectionParams, rng: &mut R) -> Vec<String> {
    let m = params.candidates().len();
    let mut names: Vec<String> = params.candidates().to_vec();
    names.extend(decoy_names(len.saturating_sub(m), params, rng));
    names.shuffle(rng);
    names
}

/// Marks an existing list of names according to `intent`.
///
/// Candidate rows get 1 exactly when voted for; every other row gets a fair
/// coin flip, so the number of 1's says nothing about the number of votes.
/// The checksum and, when enabled, the embellishment are filled in. In
/// numerical mode each row also receives a distinct random code and the
/// grille lists the codes of the 1 rows.
pub fn mark_names<R: Rng + ?Sized>(
    id: BallotId,
    names: Vec<String>,
    intent: &VoteIntent,
    params: &ElectionParams,
    rng: &mut R,
) -> (Grid, Grille) {
    mark_layout(id, names, None, intent, params, rng)
}

/// As [`mark_names`], but keeps the given row codes (e.g. from a default
/// grid) instead of drawing fresh ones. Codes are ignored in bit mode.
pub fn mark_layout<R: Rng + ?Sized>(
    id: BallotId,
    names: Vec<String>,
    codes: Option<Vec<u32>>,
    intent: &VoteIntent,
    params: &ElectionParams,
    rng: &mut R,
) -> (Grid, Grille) {
    let bits: Vec<bool> = names
        .iter()
        .map(|name| {
            if params.is_candidate(name) {
                intent.contains(name)
            } else {
                rng.gen_bool(0.5)
            }
        })
        .collect();
    let (grille, code_numbers) = match params.encoding() {
        GrilleEncoding::Bits => (Grille::bits(id, bits), None),
        GrilleEncoding::Numerical => {
            let codes = codes
                .filter(|c| c.len() == names.len())
                .unwrap_or_else(|| distinct_codes(names.len(), rng));
            let marked = codes.iter().zip(&bits).filter(|(_, b)| **b).map(|(c, _)| *c).collect();
            let grille = Grille::codes(id, marked).expect("generated codes are distinct");
            (grille, Some(codes))
        }
    };
    let grid = Grid {
        id,
        names,
        checksum: checksum_of(&grille),
        embellishment: params.embellishment_enabled().then(|| embellishment_of(&grille)),
        code_numbers,
    };
    (grid, grille)
}

/// `count` distinct codes drawn uniformly from `[0, 2^32)`.
pub fn distinct_codes<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<u32> {
    let mut seen = HashSet::with_capacity(count);
    let mut codes = Vec::with_capacity(count);
    while codes.len() < count {
        let code: u32 = rng.gen();
        if seen.insert(code) {
            codes.push(code);
        }
    }
    codes
}

/// Builds a voter's ballot paper from scratch.
pub fn make_grid<R: Rng + ?Sized>(
    intent: &VoteIntent,
    params: &ElectionParams,
    rng: &mut R,
    id: BallotId,
) -> Result<(Grid, Grille), BallotError> {
    intent.validate(params)?;
    let names = shuffled_layout(params.grid_len(), params, rng);
    Ok(mark_names(id, names, intent, params, rng))
}

/// Fills names into a given 0/1 grille: voted candidates on 1 rows, the other
/// candidates on 0 rows, decoys everywhere else.
pub fn names_for_grille<R: Rng + ?Sized>(
    bits: &[bool],
    intent: &VoteIntent,
    params: &ElectionParams,
    rng: &mut R,
) -> Result<Vec<String>, BallotError> {
    intent.validate(params)?;
    let mut ones: Vec<usize> = (0..bits.len()).filter(|i| bits[*i]).collect();
    let mut zeros: Vec<usize> = (0..bits.len()).filter(|i| !bits[*i]).collect();
    let voted = intent.in_candidate_order(params);
    let unvoted: Vec<&String> = params.candidates().iter().filter(|c| !intent.contains(c)).collect();
    if voted.len() > ones.len() || unvoted.len() > zeros.len() {
        return Err(BallotError::Intent(format!(
            "a grille with {} ones and {} zeros cannot carry this vote",
            ones.len(),
            zeros.len()
        )));
    }
    ones.shuffle(rng);
    zeros.shuffle(rng);
    let mut names = vec![String::new(); bits.len()];
    for (slot, name) in ones.iter().zip(voted.iter()) {
        names[*slot] = name.clone();
    }
    for (slot, name) in zeros.iter().zip(unvoted.iter()) {
        names[*slot] = (*name).clone();
    }
    let free: Vec<usize> = ones[voted.len()..]
        .iter()
        .chain(&zeros[unvoted.len()..])
        .copied()
        .collect();
    for (slot, decoy) in free.iter().zip(decoy_names(free.len(), params, rng)) {
        names[*slot] = decoy;
    }
    Ok(names)
}

pub(crate) fn trimmed_names(grid: &Grid) -> impl Iterator<Item = &str> {
    grid.names.iter().map(|n| normalize_name(n))
}
