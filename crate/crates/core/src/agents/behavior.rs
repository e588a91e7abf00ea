use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ballot::VoteIntent;

/// How a voter gets her box-route part into the ballot box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attendance {
    InPerson,
    ByProxy(String),
    /// Grid carried by the first proxy, grille by the second (two-proxy variant).
    TwoProxy(String, String),
    Abstain,
}

impl Attendance {
    pub fn proxies(&self) -> Vec<&str> {
        match self {
            Attendance::ByProxy(p) => vec![p],
            Attendance::TwoProxy(a, b) => vec![a, b],
            Attendance::InPerson | Attendance::Abstain => vec![],
        }
    }
}

/// Deliberate slips a voter can make while preparing or casting her ballot,
/// used to exercise the committee's invalidation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mistake {
    /// The checksum written with the grid is off by one.
    WrongChecksum,
    /// The fingerprint written with the grid is off by one.
    WrongEmbellishment,
    /// The grid has one row more than the grille.
    ExtraRow,
    /// The grid is never delivered, by any route.
    NoGrid,
    /// The part sent through the RA arrives after the deadline.
    LateRegistration,
    /// The grille is inserted twice.
    ExtraGrille,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterBehavior {
    pub name: String,
    /// `None`: the voter takes no part at all.
    pub intent: Option<VoteIntent>,
    pub attendance: Attendance,
    pub id_swap_partner: Option<String>,
    pub mistake: Option<Mistake>,
}

impl VoterBehavior {
    /// An honest voter who votes in person.
    pub fn in_person(name: impl Into<String>, intent: VoteIntent) -> Self {
        Self {
            name: name.into(),
            intent: Some(intent),
            attendance: Attendance::InPerson,
            id_swap_partner: None,
            mistake: None,
        }
    }

    pub fn by_proxy(name: impl Into<String>, intent: VoteIntent, proxy: impl Into<String>) -> Self {
        Self {
            attendance: Attendance::ByProxy(proxy.into()),
            ..Self::in_person(name, intent)
        }
    }

    pub fn abstaining(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            intent: None,
            attendance: Attendance::Abstain,
            id_swap_partner: None,
            mistake: None,
        }
    }

    pub fn with_mistake(mut self, mistake: Mistake) -> Self {
        self.mistake = Some(mistake);
        self
    }

    pub fn swapping_with(mut self, partner: impl Into<String>) -> Self {
        self.id_swap_partner = Some(partner.into());
        self
    }
}

/// What a proxy does with a ballot part entrusted to him.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conduct {
    Faithful,
    NoShow,
    /// Delivers, but tells the committee whose id it is.
    Deanonymize,
    /// Delivers, and makes the id public.
    LeakId,
    /// Replaces the grille by a different one with the same number of 1's.
    SwapGrillePreservingChecksum,
    /// Exchanges one 1-row with one 0-row, chosen uniformly.
    RandomAlteration,
    /// Hands the part on to another proxy (transitive-proxy variant).
    DelegateTo(String),
}

impl fmt::Display for Conduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conduct::Faithful => f.write_str("faithful"),
            Conduct::NoShow => f.write_str("no-show"),
            Conduct::Deanonymize => f.write_str("deanonymize"),
            Conduct::LeakId => f.write_str("leak-id"),
            Conduct::SwapGrillePreservingChecksum => f.write_str("swap-grille-preserving-checksum"),
            Conduct::RandomAlteration => f.write_str("random-alteration"),
            Conduct::DelegateTo(p) => write!(f, "delegate-to {p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyBehavior {
    pub name: String,
    pub conduct: Conduct,
}

impl ProxyBehavior {
    pub fn new(name: impl Into<String>, conduct: Conduct) -> Self {
        Self {
            name: name.into(),
            conduct,
        }
    }

    pub fn faithful(name: impl Into<String>) -> Self {
        Self::new(name, Conduct::Faithful)
    }
}
