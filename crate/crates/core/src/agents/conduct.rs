//! What a proxy can do to a ballot part he carries. He never holds the
//! matching part, so every alteration is blind.

use std::collections::{HashMap, HashSet};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use super::behavior::{Conduct, ProxyBehavior};
use crate::ballot::{BallotId, Grid, Grille, Marks};

/// Hop limit for delegation chains; longer chains and cycles end in a no-show.
pub const MAX_HOPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductEffect<T> {
    pub delivered: Option<T>,
    pub leaked: Option<BallotId>,
    pub deanonymized: bool,
}

/// A ballot part a proxy can carry.
pub trait Carried: Clone + PartialEq {
    fn ballot_id(&self) -> BallotId;
    /// A uniformly random different part that keeps the checksum, or an
    /// unchanged copy when no such part exists.
    fn swapped<R: Rng + ?Sized>(&self, rng: &mut R) -> Self;
    /// A blind random alteration that keeps the checksum.
    fn altered<R: Rng + ?Sized>(&self, rng: &mut R) -> Self;
}

/// Replaces one code by a fresh one not already listed. The proxy knows no
/// grid, so the new code is a blind guess.
fn replace_code<R: Rng + ?Sized>(id: BallotId, codes: &[u32], rng: &mut R) -> Grille {
    if codes.is_empty() {
        return Grille::codes(id, Vec::new()).expect("empty list");
    }
    let taken: HashSet<u32> = codes.iter().copied().collect();
    let fresh = loop {
        let c: u32 = rng.gen();
        if !taken.contains(&c) {
            break c;
        }
    };
    let mut out = codes.to_vec();
    let at = rng.gen_range(0..out.len());
    out[at] = fresh;
    Grille::codes(id, out).expect("codes stay distinct")
}

impl Carried for Grille {
    fn ballot_id(&self) -> BallotId {
        self.id()
    }

    fn swapped<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        match self.marks() {
            Marks::Bits(bits) => {
                let ones = bits.iter().filter(|b| **b).count();
                if ones == 0 || ones == bits.len() {
                    return self.clone();
                }
                // a uniform shuffle is uniform over equal-popcount vectors;
                // rejecting the original leaves it uniform over the others
                let mut out = bits.clone();
                loop {
                    out.shuffle(rng);
                    if out != *bits {
                        return Grille::bits(self.id(), out);
                    }
                }
            }
            Marks::Codes(codes) => replace_code(self.id(), codes, rng),
        }
    }

    fn altered<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        match self.marks() {
            Marks::Bits(bits) => {
                let one = (0..bits.len()).filter(|i| bits[*i]).choose(rng);
                let zero = (0..bits.len()).filter(|i| !bits[*i]).choose(rng);
                match (one, zero) {
                    (Some(i), Some(j)) => {
                        let mut out = bits.clone();
                        out.swap(i, j);
                        Grille::bits(self.id(), out)
                    }
                    _ => self.clone(),
                }
            }
            Marks::Codes(codes) => replace_code(self.id(), codes, rng),
        }
    }
}

impl Carried for Grid {
    fn ballot_id(&self) -> BallotId {
        self.id
    }

    /// Two rows exchange names.
    fn swapped<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        if out.names.len() >= 2 {
            let picked = rand::seq::index::sample(rng, out.names.len(), 2);
            out.names.swap(picked.index(0), picked.index(1));
        }
        out
    }

    /// The rows are reshuffled.
    fn altered<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        out.names.shuffle(rng);
        out
    }
}

/// Applies a proxy's conduct to the part he carries.
///
/// `DelegateTo` must be resolved with [`resolve_chain`] first; applied
/// directly it is treated as a no-show, since nobody receives the part.
pub fn apply_conduct<T: Carried, R: Rng + ?Sized>(conduct: &Conduct, part: &T, rng: &mut R) -> ConductEffect<T> {
    let delivered = |p: T| ConductEffect {
        delivered: Some(p),
        leaked: None,
        deanonymized: false,
    };
    match conduct {
        Conduct::Faithful => delivered(part.clone()),
        Conduct::NoShow | Conduct::DelegateTo(_) => ConductEffect {
            delivered: None,
            leaked: None,
            deanonymized: false,
        },
        Conduct::Deanonymize => ConductEffect {
            deanonymized: true,
            ..delivered(part.clone())
        },
        Conduct::LeakId => ConductEffect {
            leaked: Some(part.ballot_id()),
            ..delivered(part.clone())
        },
        Conduct::SwapGrillePreservingChecksum => delivered(part.swapped(rng)),
        Conduct::RandomAlteration => delivered(part.altered(rng)),
    }
}

/// The end of a delegation chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    /// The proxy who ends up holding the part.
    pub carrier: String,
    /// His conduct; never `DelegateTo`.
    pub conduct: Conduct,
    /// Each hand-over along the way, as (from, to).
    pub hops: Vec<(String, String)>,
}

/// Follows `DelegateTo` links from `first`. A cycle, or more than
/// [`MAX_HOPS`] hand-overs, ends with the last holder not showing up.
pub fn resolve_chain(first: &str, proxies: &HashMap<&str, &ProxyBehavior>) -> Resolved {
    let mut carrier = first.to_string();
    let mut hops = Vec::new();
    let mut seen = HashSet::from([carrier.clone()]);
    loop {
        let conduct = proxies
            .get(carrier.as_str())
            .map_or(Conduct::NoShow, |p| p.conduct.clone());
        let Conduct::DelegateTo(next) = conduct else {
            return Resolved { carrier, conduct, hops };
        };
        if hops.len() == MAX_HOPS || !seen.insert(next.clone()) {
            return Resolved {
                carrier,
                conduct: Conduct::NoShow,
                hops,
            };
        }
        hops.push((carrier, next.clone()));
        carrier = next;
    }
}
