//! The registering authority (RA).
//!
//! The RA privately assigns each voter a random [`BallotId`], collects grids
//! (and, in the default-grille variant, grilles) before a deadline, and after
//! the poll has closed hands the electoral committee the list of valid ids with
//! the collected ballot parts. The voter-to-id assignment never leaves this
//! module through any committee-facing operation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ballot::{shuffled_layout, BallotId, ElectionParams, Grid, Grille, GrilleEncoding};

/// Logical time. Deadlines are ticks, never wall-clock.
pub type Tick = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("voter {0:?} appears twice on the roll")]
    DuplicateVoter(String),
    #[error("the registry is sealed")]
    Sealed,
    #[error("handover requested before the poll closed")]
    PollStillOpen,
    #[error("the assignment can only be deleted after handover")]
    NotSealed,
    #[error("default ballot variant not available: {0}")]
    Variant(String),
    #[error("id {0} was not issued by this registry")]
    UnknownId(BallotId),
}

/// Returned for every submission. It deliberately says nothing about whether
/// the id was valid or the submission was on time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Acknowledgment;

/// Which default ballot parts the RA hands out with ids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DefaultBallots {
    pub grids: bool,
    pub grilles: bool,
}

/// What the committee receives at poll close.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct HandoverPackage {
    pub valid_ids: BTreeSet<BallotId>,
    pub grids: BTreeMap<BallotId, Grid>,
    /// Only populated in the default-grille variant, where grilles travel via the RA.
    pub grilles: BTreeMap<BallotId, Grille>,
}

impl HandoverPackage {
    /// Canonical text form: a `valid_ids` block, then one canonical grid
    /// document per id, then one canonical grille document per id, all in
    /// ascending id order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "valid_ids={}", self.valid_ids.len());
        for id in &self.valid_ids {
            let _ = writeln!(out, "{id}");
        }
        let _ = writeln!(out, "grids={}", self.grids.len());
        for grid in self.grids.values() {
            grid.write_text(&mut out);
        }
        let _ = writeln!(out, "grilles={}", self.grilles.len());
        for grille in self.grilles.values() {
            grille.write_text(&mut out);
        }
        out
    }
}

#[derive(Debug)]
struct Submission<T> {
    at: Tick,
    part: T,
}

#[derive(Debug)]
pub struct Registry {
    assignment: BTreeMap<String, BallotId>,
    issued: HashSet<BallotId>,
    grid_inbox: HashMap<BallotId, Vec<Submission<Grid>>>,
    grille_inbox: HashMap<BallotId, Vec<Submission<Grille>>>,
    deadline: Tick,
    defaults: DefaultBallots,
    rejected: usize,
    sealed: Option<HandoverPackage>,
}

impl Registry {
    /// Issues a fresh uniformly random 128-bit id to every voter on the roll.
    pub fn register<R, S>(roll: &[S], deadline: Tick, rng: &mut R) -> Result<Self, RegistryError>
    where
        R: Rng + ?Sized,
        S: AsRef<str>,
    {
        let mut assignment = BTreeMap::new();
        let mut issued = HashSet::with_capacity(roll.len());
        for voter in roll {
            let voter = voter.as_ref();
            if assignment.contains_key(voter) {
                return Err(RegistryError::DuplicateVoter(voter.to_string()));
            }
            let id = loop {
                let candidate = BallotId::random(rng);
                if issued.insert(candidate) {
                    break candidate;
                }
            };
            assignment.insert(voter.to_string(), id);
        }
        Ok(Self {
            assignment,
            issued,
            grid_inbox: HashMap::new(),
            grille_inbox: HashMap::new(),
            deadline,
            defaults: DefaultBallots::default(),
            rejected: 0,
            sealed: None,
        })
    }

    pub fn with_default_ballots(mut self, defaults: DefaultBallots) -> Self {
        self.defaults = defaults;
        self
    }

    /// The private voter-facing delivery of an id.
    pub fn id_of(&self, voter: &str) -> Option<BallotId> {
        self.assignment.get(voter).copied()
    }

    pub fn voter_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn deadline(&self) -> Tick {
        self.deadline
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed.is_some()
    }

    /// Submissions that were swallowed: unknown id, id mismatch, or late.
    pub fn rejected_submissions(&self) -> usize {
        self.rejected
    }

    fn accepts(&self, id: BallotId, part_id: BallotId, at: Tick) -> bool {
        id == part_id && at <= self.deadline && self.issued.contains(&id)
    }

    /// Accepts a grid under `id`. Resubmission is allowed; at handover the
    /// latest submission before the deadline wins.
    pub fn submit_grid(&mut self, id: BallotId, grid: Grid, at: Tick) -> Result<Acknowledgment, RegistryError> {
        if self.is_sealed() {
            return Err(RegistryError::Sealed);
        }
        if self.accepts(id, grid.id, at) {
            self.grid_inbox
                .entry(id)
                .or_default()
                .push(Submission { at, part: grid });
        } else {
            self.rejected += 1;
        }
        Ok(Acknowledgment)
    }

    /// Default-grille variant: the voter confirms or replaces the grille via the RA.
    pub fn submit_grille(&mut self, id: BallotId, grille: Grille, at: Tick) -> Result<Acknowledgment, RegistryError> {
        if self.is_sealed() {
            return Err(RegistryError::Sealed);
        }
        if self.accepts(id, grille.id(), at) {
            self.grille_inbox
                .entry(id)
                .or_default()
                .push(Submission { at, part: grille });
        } else {
            self.rejected += 1;
        }
        Ok(Acknowledgment)
    }

    fn check_issued(&self, id: BallotId) -> Result<(), RegistryError> {
        if self.issued.contains(&id) {
            Ok(())
        } else {
            Err(RegistryError::UnknownId(id))
        }
    }

    /// A ready-made grid: every candidate once plus decoys, in a random order
    /// private to the voter. The checksum is left at zero; the voter fills it
    /// in after marking her grille.
    pub fn make_default_grid<R: Rng + ?Sized>(
        &self,
        id: BallotId,
        params: &ElectionParams,
        rng: &mut R,
    ) -> Result<Grid, RegistryError> {
        if !self.defaults.grids {
            return Err(RegistryError::Variant("default grids are not enabled".into()));
        }
        self.check_issued(id)?;
        let names = shuffled_layout(params.grid_len(), params, rng);
        let code_numbers = match params.encoding() {
            GrilleEncoding::Bits => None,
            GrilleEncoding::Numerical => Some(crate::ballot::distinct_codes(names.len(), rng)),
        };
        Ok(Grid {
            id,
            names,
            checksum: 0,
            embellishment: None,
            code_numbers,
        })
    }

    /// A ready-made 0/1 grille of length twice the candidate count with
    /// exactly as many 1's as there are candidates, in a random order.
    /// Subset mode with bit-vector grilles only.
    pub fn make_default_grille<R: Rng + ?Sized>(
        &self,
        id: BallotId,
        params: &ElectionParams,
        rng: &mut R,
    ) -> Result<Grille, RegistryError> {
        if !self.defaults.grilles {
            return Err(RegistryError::Variant("default grilles are not enabled".into()));
        }
        if params.mode().is_fixed_vote() || params.encoding() != GrilleEncoding::Bits {
            return Err(RegistryError::Variant(
                "default grilles need subset mode and bit-vector grilles".into(),
            ));
        }
        self.check_issued(id)?;
        let m = params.candidates().len();
        let mut bits: Vec<bool> = (0..2 * m).map(|i| i < m).collect();
        bits.shuffle(rng);
        Ok(Grille::bits(id, bits))
    }

    /// Seals the registry and builds the committee's package. Only allowed
    /// once the poll has closed; repeated calls return the same package.
    pub fn seal_and_handover(&mut self, poll_closed: bool) -> Result<HandoverPackage, RegistryError> {
        if let Some(package) = &self.sealed {
            return Ok(package.clone());
        }
        if !poll_closed {
            return Err(RegistryError::PollStillOpen);
        }
        let package = HandoverPackage {
            valid_ids: self.issued.iter().copied().collect(),
            grids: latest(&mut self.grid_inbox),
            grilles: latest(&mut self.grille_inbox),
        };
        self.sealed = Some(package.clone());
        Ok(package)
    }

    /// Permanently forgets which voter holds which id. Allowed after handover.
    pub fn delete_assignment(&mut self) -> Result<(), RegistryError> {
        if !self.is_sealed() {
            return Err(RegistryError::NotSealed);
        }
        self.assignment.clear();
        Ok(())
    }
}

/// Latest submission per id; ties on the tick go to the later arrival.
fn latest<T>(inbox: &mut HashMap<BallotId, Vec<Submission<T>>>) -> BTreeMap<BallotId, T> {
    inbox
        .drain()
        .filter_map(|(id, subs)| {
            let mut best: Option<Submission<T>> = None;
            for sub in subs {
                if best.as_ref().is_none_or(|b| sub.at >= b.at) {
                    best = Some(sub);
                }
            }
            best.map(|s| (id, s.part))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballot::{checksum_of, make_grid, ElectoralMode, VoteIntent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(99)
    }

    fn params() -> ElectionParams {
        ElectionParams::new(["A", "B", "C"], 1, ElectoralMode::Subset).unwrap()
    }

    fn grid_for(id: BallotId, tag: &str) -> Grid {
        Grid {
            id,
            names: vec!["A".into(), "B".into(), "C".into(), tag.into()],
            checksum: 0,
            embellishment: None,
            code_numbers: None,
        }
    }

    #[test]
    fn hundred_voters_get_distinct_ids() {
        let roll: Vec<String> = (0..100).map(|i| format!("v{i}")).collect();
        let reg = Registry::register(&roll, 5, &mut rng()).unwrap();
        let ids: HashSet<_> = roll.iter().map(|v| reg.id_of(v).unwrap()).collect();
        assert_eq!(ids.len(), 100);
    }

    #[test]
    fn empty_roll_and_duplicates() {
        let reg = Registry::register::<_, &str>(&[], 5, &mut rng()).unwrap();
        assert_eq!(reg.voter_count(), 0);
        assert_eq!(
            Registry::register(&["v", "v"], 5, &mut rng()).unwrap_err(),
            RegistryError::DuplicateVoter("v".into())
        );
    }

    #[test]
    fn unknown_late_and_mismatched_submissions_are_swallowed() {
        let mut reg = Registry::register(&["v"], 5, &mut rng()).unwrap();
        let id = reg.id_of("v").unwrap();
        let stranger = BallotId::new(id.value().wrapping_add(1));
        assert_eq!(
            reg.submit_grid(stranger, grid_for(stranger, "x"), 1),
            Ok(Acknowledgment)
        );
        assert_eq!(reg.submit_grid(id, grid_for(id, "late"), 6), Ok(Acknowledgment));
        assert_eq!(reg.submit_grid(id, grid_for(stranger, "other"), 1), Ok(Acknowledgment));
        assert_eq!(reg.rejected_submissions(), 3);
        let pkg = reg.seal_and_handover(true).unwrap();
        assert!(pkg.grids.is_empty());
        assert_eq!(pkg.valid_ids.len(), 1);
    }

    #[test]
    fn latest_before_deadline_wins_in_either_arrival_order() {
        for order in [[1, 3], [3, 1]] {
            let mut reg = Registry::register(&["v"], 5, &mut rng()).unwrap();
            let id = reg.id_of("v").unwrap();
            for t in order {
                reg.submit_grid(id, grid_for(id, &format!("t{t}")), t).unwrap();
            }
            let pkg = reg.seal_and_handover(true).unwrap();
            assert_eq!(pkg.grids[&id].names[3], "t3");
        }
    }

    #[test]
    fn handover_timing_and_idempotence() {
        let roll = [
            "alice-long-unique-name",
            "bob-long-unique-name",
            "carol-long-unique-name",
        ];
        let mut r = rng();
        let mut reg = Registry::register(&roll, 5, &mut r).unwrap();
        for v in &roll[..2] {
            let id = reg.id_of(v).unwrap();
            let (grid, _) = make_grid(&VoteIntent::new(["A"]), &params(), &mut r, id).unwrap();
            reg.submit_grid(id, grid, 2).unwrap();
        }
        assert_eq!(reg.seal_and_handover(false), Err(RegistryError::PollStillOpen));
        let first = reg.seal_and_handover(true).unwrap();
        assert_eq!(first.valid_ids.len(), 3);
        assert_eq!(first.grids.len(), 2);
        let text = first.to_text();
        for v in roll {
            assert!(!text.contains(v));
        }
        let second = reg.seal_and_handover(true).unwrap();
        assert_eq!(text, second.to_text());
        let id = reg.id_of(roll[2]).unwrap();
        assert_eq!(reg.submit_grid(id, grid_for(id, "x"), 3), Err(RegistryError::Sealed));
    }

    #[test]
    fn handover_text_sorted_by_id() {
        let roll: Vec<String> = (0..10).map(|i| format!("v{i}")).collect();
        let mut reg = Registry::register(&roll, 5, &mut rng()).unwrap();
        let pkg = reg.seal_and_handover(true).unwrap();
        let text = pkg.to_text();
        let ids: Vec<u128> = text.lines().skip(1).take(10).map(|l| l.parse().unwrap()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert!(text.ends_with("grids=0\ngrilles=0\n"));
    }

    #[test]
    fn assignment_deletable_only_after_sealing() {
        let mut reg = Registry::register(&["v"], 5, &mut rng()).unwrap();
        assert_eq!(reg.delete_assignment(), Err(RegistryError::NotSealed));
        reg.seal_and_handover(true).unwrap();
        reg.delete_assignment().unwrap();
        assert_eq!(reg.id_of("v"), None);
    }

    #[test]
    fn default_grid_and_grille() {
        let mut r = rng();
        let reg = Registry::register(&["v"], 5, &mut r).unwrap();
        let id = reg.id_of("v").unwrap();
        assert!(matches!(
            reg.make_default_grid(id, &params(), &mut r),
            Err(RegistryError::Variant(_))
        ));
        let reg = reg.with_default_ballots(DefaultBallots {
            grids: true,
            grilles: true,
        });
        let grid = reg.make_default_grid(id, &params(), &mut r).unwrap();
        assert_eq!(grid.names.len(), 6);
        for c in ["A", "B", "C"] {
            assert_eq!(grid.names.iter().filter(|n| *n == c).count(), 1);
        }
        let grille = reg.make_default_grille(id, &params(), &mut r).unwrap();
        assert_eq!(grille.as_bits().unwrap().len(), 6);
        assert_eq!(checksum_of(&grille), 3);
        let fptp = ElectionParams::new(["A", "B"], 1, ElectoralMode::FirstPastThePost).unwrap();
        assert!(matches!(
            reg.make_default_grille(id, &fptp, &mut r),
            Err(RegistryError::Variant(_))
        ));
        assert!(matches!(
            reg.make_default_grid(BallotId::new(1), &params(), &mut r),
            Err(RegistryError::UnknownId(_))
        ));
    }

    #[test]
    fn discarded_default_replaced_by_own_grid() {
        let mut r = rng();
        let mut reg = Registry::register(&["v"], 5, &mut r)
            .unwrap()
            .with_default_ballots(DefaultBallots {
                grids: true,
                grilles: false,
            });
        let id = reg.id_of("v").unwrap();
        let default = reg.make_default_grid(id, &params(), &mut r).unwrap();
        reg.submit_grid(id, default, 1).unwrap();
        let (own, _) = make_grid(&VoteIntent::new(["B"]), &params(), &mut r, id).unwrap();
        reg.submit_grid(id, own.clone(), 2).unwrap();
        assert_eq!(reg.seal_and_handover(true).unwrap().grids[&id], own);
    }
}
