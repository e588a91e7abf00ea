use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Secret per-voter identification number, drawn uniformly from `[0, 2^128)`.
///
/// Serialized as a decimal string so that no consumer truncates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallotId(u128);

impl BallotId {
    pub const fn new(value: u128) -> Self {
        Self(value)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.gen())
    }

    pub const fn value(self) -> u128 {
        self.0
    }
}

impl From<u128> for BallotId {
    fn from(value: u128) -> Self {
        Self(value)
    }
}

impl fmt::Display for BallotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for BallotId {
    type Err = super::text::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::text::parse_decimal::<u128>(s, 0).map(Self)
    }
}

impl Serialize for BallotId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BallotId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
