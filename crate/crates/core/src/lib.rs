//! Blind proxy voting: a secret-ballot vote collection scheme in which every
//! voter splits her ballot paper into a *grid* (the names, in an order she
//! chooses) and a *grille* (the 0/1 marks), casts both under a secret random
//! id, and delivers them by separate routes. The grid travels through the
//! registering authority before election day; the grille goes into the ballot
//! box on election day, in person or through a proxy who cannot read it.
//!
//! The crate is organized by role:
//!
//! - [`ballot`]: ballot-paper types and pure operations (build, match, purge,
//!   canonical text form).
//! - [`registration`]: the registering authority (ids, grid intake, handover).
//! - [`collection`]: the ballot box.
//! - [`tally`]: the electoral committee's validation and counting pipeline.
//! - [`agents`]: voter and proxy behavior models and the scenario engine.
//! - [`cli`]: the command-line front end (`run`, `sweep`, `validate`).
//!
//! Everything is deterministic given a seed.

pub mod agents;
pub mod ballot;
pub mod cli;
pub mod collection;
pub mod records;
pub mod registration;
pub mod tally;

pub use ballot::{BallotId, ElectionParams, ElectoralMode, Grid, Grille, GrilleEncoding, VoteIntent};

/// Seeded random source used throughout the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;
