use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::{checksum_of, embellishment_of, trimmed_names, BallotPaper, Grid, Grille, Marks};
use super::params::{ElectionParams, VoteIntent};
use super::BallotError;

/// Shape of a grid relative to the candidate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridClass {
    /// Every candidate appears exactly once.
    Complete,
    /// No duplicates, but these candidates (in candidate order) are absent.
    /// They are read as not voted for.
    MissingCandidates(Vec<String>),
    /// A candidate row repeats, the grid is empty, or its code numbers are unusable.
    Malformed,
}

pub fn grid_classify(grid: &Grid, params: &ElectionParams) -> GridClass {
    if grid.names.is_empty() {
        return GridClass::Malformed;
    }
    if let Some(codes) = &grid.code_numbers {
        let distinct: HashSet<_> = codes.iter().collect();
        if codes.len() != grid.names.len() || distinct.len() != codes.len() {
            return GridClass::Malformed;
        }
    }
    let mut seen = vec![0usize; params.candidates().len()];
    for name in trimmed_names(grid) {
        if let Some(i) = params.candidate_index(name) {
            seen[i] += 1;
            if seen[i] > 1 {
                return GridClass::Malformed;
            }
        }
    }
    let missing: Vec<String> = params
        .candidates()
        .iter()
        .zip(&seen)
        .filter(|(_, n)| **n == 0)
        .map(|(c, _)| c.clone())
        .collect();
    if missing.is_empty() {
        GridClass::Complete
    } else {
        GridClass::MissingCandidates(missing)
    }
}

/// Why a grid and a grille under one id do not form a usable ballot paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchReason {
    /// The grille does not have one mark per grid row.
    Length,
    Checksum,
    Embellishment,
    /// A listed code is not on the grid.
    UnknownCode,
    /// Grid, grille and election disagree on bits versus codes.
    Encoding,
    Malformed,
    /// The decoded vote exceeds the electoral mode's limit.
    Cardinality,
}

impl fmt::Display for MismatchReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MismatchReason::Length => "length",
            MismatchReason::Checksum => "checksum",
            MismatchReason::Embellishment => "embellishment",
            MismatchReason::UnknownCode => "unknown-code",
            MismatchReason::Encoding => "encoding",
            MismatchReason::Malformed => "malformed",
            MismatchReason::Cardinality => "cardinality",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchVerdict {
    Matched(VoteIntent),
    Mismatch(MismatchReason),
}

impl fmt::Display for MatchVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchVerdict::Matched(intent) => write!(f, "matched {intent}"),
            MatchVerdict::Mismatch(reason) => write!(f, "mismatch: {reason}"),
        }
    }
}

/// Joins a grid with its grille and decodes the vote.
///
/// Checks run in order: encoding, length, checksum, embellishment (only when
/// the election enables it), unknown codes, grid shape, cardinality. Marks on
/// non-candidate rows are ignored; cardinality is checked on the decoded
/// candidate vote only.
pub fn match_pair(grid: &Grid, grille: &Grille, params: &ElectionParams) -> Result<MatchVerdict, BallotError> {
    use MismatchReason::*;

    if grid.id != grille.id() {
        return Err(BallotError::Usage(format!(
            "grid id {} does not match grille id {}",
            grid.id,
            grille.id()
        )));
    }
    if grille.encoding() != params.encoding() || grid.encoding() != params.encoding() {
        return Ok(MatchVerdict::Mismatch(Encoding));
    }
    let marked_rows: Vec<usize> = match grille.marks() {
        Marks::Bits(bits) => {
            if bits.len() != grid.names.len() {
                return Ok(MatchVerdict::Mismatch(Length));
            }
            (0..bits.len()).filter(|i| bits[*i]).collect()
        }
        Marks::Codes(_) => {
            let codes = grid.code_numbers.as_deref().unwrap_or_default();
            if codes.len() != grid.names.len() {
                return Ok(MatchVerdict::Mismatch(Length));
            }
            Vec::new()
        }
    };
    if checksum_of(grille) != grid.checksum {
        return Ok(MatchVerdict::Mismatch(Checksum));
    }
    if params.embellishment_enabled() && grid.embellishment != Some(embellishment_of(grille)) {
        return Ok(MatchVerdict::Mismatch(Embellishment));
    }
    let marked_rows = match grille.marks() {
        Marks::Bits(_) => marked_rows,
        Marks::Codes(listed) => {
            let codes = grid.code_numbers.as_deref().unwrap_or_default();
            let mut rows = Vec::with_capacity(listed.len());
            for code in listed {
                match codes.iter().position(|c| c == code) {
                    Some(row) => rows.push(row),
                    None => return Ok(MatchVerdict::Mismatch(UnknownCode)),
                }
            }
            rows
        }
    };
    if grid_classify(grid, params) == GridClass::Malformed {
        return Ok(MatchVerdict::Mismatch(Malformed));
    }
    let intent: VoteIntent = marked_rows
        .iter()
        .map(|row| grid.names[*row].as_str())
        .filter(|name| params.is_candidate(name))
        .collect();
    if let Some(max) = params.mode().max_votes(params.seats()) {
        if intent.len() > max {
            return Ok(MatchVerdict::Mismatch(Cardinality));
        }
    }
    Ok(MatchVerdict::Matched(intent))
}

/// The published form of a valid ballot paper: voted-for candidates only, in
/// candidate-list order, with no id and no decoys.
pub fn purge(paper: &BallotPaper, params: &ElectionParams) -> Result<Vec<String>, BallotError> {
    match match_pair(&paper.grid, &paper.grille, params)? {
        MatchVerdict::Matched(intent) => Ok(intent.in_candidate_order(params)),
        MatchVerdict::Mismatch(reason) => Err(BallotError::Usage(format!(
            "cannot purge an unmatched ballot paper ({reason})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballot::{BallotId, ElectoralMode, GrilleEncoding};

    fn params() -> ElectionParams {
        ElectionParams::new(["A", "B", "C"], 1, ElectoralMode::Subset).unwrap()
    }

    fn grid(names: &[&str], checksum: u64) -> Grid {
        Grid {
            id: BallotId::new(42),
            names: names.iter().map(|s| s.to_string()).collect(),
            checksum,
            embellishment: None,
            code_numbers: None,
        }
    }

    fn bits(v: &[u8]) -> Grille {
        Grille::bits(BallotId::new(42), v.iter().map(|b| *b == 1).collect())
    }

    #[test]
    fn classify_examples() {
        let p = params();
        assert_eq!(grid_classify(&grid(&["B", "x", "A", "C"], 0), &p), GridClass::Complete);
        assert_eq!(
            grid_classify(&grid(&["A", "B"], 0), &p),
            GridClass::MissingCandidates(vec!["C".into()])
        );
        assert_eq!(grid_classify(&grid(&["A", "A", "B", "C"], 0), &p), GridClass::Malformed);
        assert_eq!(grid_classify(&grid(&[], 0), &p), GridClass::Malformed);
        assert_eq!(
            grid_classify(&grid(&[" A", "A ", "B", "C"], 0), &p),
            GridClass::Malformed
        );
    }

    #[test]
    fn decoy_marks_are_ignored() {
        let v = match_pair(&grid(&["A", "x", "B"], 1), &bits(&[0, 1, 0]), &params()).unwrap();
        assert_eq!(v, MatchVerdict::Matched(VoteIntent::empty()));
    }

    #[test]
    fn checksum_mismatch() {
        let v = match_pair(&grid(&["A", "x", "B", "C"], 2), &bits(&[1, 1, 1, 0]), &params()).unwrap();
        assert_eq!(v, MatchVerdict::Mismatch(MismatchReason::Checksum));
    }

    #[test]
    fn no_five_bit_grille_fits_a_four_row_grid() {
        // exhaustive: every 5-bit vector against a 4-row grid with the matching checksum
        let p = params();
        for v in 0u32..32 {
            let marks: Vec<u8> = (0..5).map(|i| (v >> i & 1) as u8).collect();
            let g = grid(&["A", "B", "C", "x"], marks.iter().map(|b| *b as u64).sum());
            assert_eq!(
                match_pair(&g, &bits(&marks), &p).unwrap(),
                MatchVerdict::Mismatch(MismatchReason::Length)
            );
        }
    }

    #[test]
    fn id_mismatch_is_a_usage_error() {
        let g = grid(&["A", "B", "C"], 0);
        let gr = Grille::bits(BallotId::new(7), vec![false; 3]);
        assert!(matches!(match_pair(&g, &gr, &params()), Err(BallotError::Usage(_))));
    }

    #[test]
    fn embellishment_checked_only_when_enabled() {
        let mut g = grid(&["A", "B", "C", "x"], 1);
        g.embellishment = Some(1);
        let swapped = bits(&[0, 1, 0, 0]);
        assert!(matches!(
            match_pair(&g, &swapped, &params()).unwrap(),
            MatchVerdict::Matched(_)
        ));
        let on = params().with_embellishment(true);
        assert_eq!(
            match_pair(&g, &swapped, &on).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::Embellishment)
        );
        g.embellishment = None;
        assert_eq!(
            match_pair(&g, &bits(&[1, 0, 0, 0]), &on).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::Embellishment)
        );
    }

    #[test]
    fn missing_candidates_read_as_not_voted() {
        let v = match_pair(&grid(&["A", "x"], 1), &bits(&[1, 0]), &params()).unwrap();
        assert_eq!(v, MatchVerdict::Matched(VoteIntent::new(["A"])));
    }

    #[test]
    fn malformed_grid_is_a_mismatch() {
        let v = match_pair(&grid(&["A", "A", "B", "C"], 1), &bits(&[1, 0, 0, 0]), &params()).unwrap();
        assert_eq!(v, MatchVerdict::Mismatch(MismatchReason::Malformed));
    }

    #[test]
    fn cardinality_ignores_decoy_marks() {
        let fptp = ElectionParams::new(["A", "B", "C"], 1, ElectoralMode::FirstPastThePost).unwrap();
        let g = grid(&["A", "x", "B", "C"], 2);
        assert_eq!(
            match_pair(&g, &bits(&[1, 1, 0, 0]), &fptp).unwrap(),
            MatchVerdict::Matched(VoteIntent::new(["A"]))
        );
        assert_eq!(
            match_pair(&g, &bits(&[1, 0, 1, 0]), &fptp).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::Cardinality)
        );
    }

    #[test]
    fn numerical_unknown_code() {
        let p = params().with_encoding(GrilleEncoding::Numerical);
        let mut g = grid(&["A", "B", "C"], 1);
        g.code_numbers = Some(vec![10, 20, 30]);
        let ok = Grille::codes(BallotId::new(42), vec![20]).unwrap();
        assert_eq!(
            match_pair(&g, &ok, &p).unwrap(),
            MatchVerdict::Matched(VoteIntent::new(["B"]))
        );
        let bad = Grille::codes(BallotId::new(42), vec![21]).unwrap();
        assert_eq!(
            match_pair(&g, &bad, &p).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::UnknownCode)
        );
        assert_eq!(
            match_pair(&g, &bits(&[0, 1, 0]), &p).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::Encoding)
        );
    }

    #[test]
    fn purge_examples() {
        let p = params();
        let paper = BallotPaper::new(grid(&["C", "x", "A", "B"], 2), bits(&[1, 0, 1, 0])).unwrap();
        assert_eq!(purge(&paper, &p).unwrap(), ["A", "C"]);
        let empty = BallotPaper::new(grid(&["C", "x", "A", "B"], 1), bits(&[0, 1, 0, 0])).unwrap();
        assert!(purge(&empty, &p).unwrap().is_empty());
        let bad = BallotPaper::new(grid(&["C", "x", "A", "B"], 3), bits(&[1, 0, 1, 0])).unwrap();
        assert!(matches!(purge(&bad, &p), Err(BallotError::Usage(_))));
    }
}
