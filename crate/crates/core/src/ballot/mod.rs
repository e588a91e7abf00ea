//! Ballot papers: election parameters, grids, grilles, and the stateless
//! operations that build, encode, match and purge them.

mod grid;
mod id;
mod params;
pub mod text;
mod verdict;

use thiserror::Error;

pub use grid::{
    checksum_of, decoy_names, distinct_codes, embellishment_of, make_grid, mark_layout, mark_names, names_for_grille,
    shuffled_layout, BallotPaper, Grid, Grille, Marks, DECOY_NAME_LEN,
};
pub use id::BallotId;
pub use params::{normalize_name, ElectionParams, ElectoralMode, GrilleEncoding, VoteIntent};
pub use text::{parse_document, Document, ParseError};
pub use verdict::{grid_classify, match_pair, purge, GridClass, MatchVerdict, MismatchReason};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallotError {
    #[error("invalid election parameters: {0}")]
    InvalidParams(String),
    #[error("invalid vote: {0}")]
    Intent(String),
    #[error("invalid grille: {0}")]
    InvalidGrille(String),
    #[error("usage error: {0}")]
    Usage(String),
}
