//! Scenario configuration and its TOML form.
//!
//! ```toml
//! seed = 7
//! [election]
//! candidates = ["Ann", "Ben", "Cy"]
//! seats = 1
//! mode = "subset"
//! [variants]
//! embellishment = true
//! [stuffing]
//! count = 1000
//! strategy = "leaked"
//! [[voters]]
//! name = "victoria"
//! vote = ["Ann"]
//! attendance = "by-proxy"
//! proxy = "peter"
//! [[proxies]]
//! name = "peter"
//! conduct = "leak-id"
//! ```

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::behavior::{Attendance, Conduct, Mistake, ProxyBehavior, VoterBehavior};
use crate::ballot::{ElectionParams, ElectoralMode, GrilleEncoding, VoteIntent};
use crate::registration::Tick;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario: {0}")]
    Parse(String),
    #[error("scenario violates `{invariant}`: {detail}")]
    Invariant { invariant: &'static str, detail: String },
}

impl ConfigError {
    /// 2 for unreadable input, 3 for a readable scenario that breaks an invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Parse(_) => 2,
            ConfigError::Invariant { .. } => 3,
        }
    }
}

fn violated(invariant: &'static str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Invariant {
        invariant,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Variants {
    pub two_proxy: bool,
    pub default_grid: bool,
    pub default_grille: bool,
    pub numerical: bool,
    pub embellishment: bool,
    pub transitive_proxy: bool,
    pub publish_purged: bool,
    pub id_swap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StuffingStrategy {
    /// Fresh uniformly random ids.
    Random,
    /// Ids made public by leaking proxies; random ids once none are known.
    Leaked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stuffing {
    pub count: u64,
    pub strategy: StuffingStrategy,
}

pub const DEFAULT_DEADLINE: Tick = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Candidates, seats and mode. Encoding and embellishment come from `variants`.
    pub election: ElectionParams,
    /// The electoral roll, in order.
    pub voters: Vec<VoterBehavior>,
    pub proxies: Vec<ProxyBehavior>,
    pub variants: Variants,
    pub stuffing: Option<Stuffing>,
    /// Last tick at which the RA accepts grids; must be at least 1.
    pub deadline: Tick,
    pub box_cap: Option<usize>,
}

impl ScenarioConfig {
    pub fn new(seed: u64, election: ElectionParams) -> Self {
        Self {
            seed,
            election,
            voters: Vec::new(),
            proxies: Vec::new(),
            variants: Variants::default(),
            stuffing: None,
            deadline: DEFAULT_DEADLINE,
            box_cap: None,
        }
    }

    /// The parameters every participant works with.
    pub fn params(&self) -> ElectionParams {
        let encoding = if self.variants.numerical {
            GrilleEncoding::Numerical
        } else {
            GrilleEncoding::Bits
        };
        self.election
            .clone()
            .with_encoding(encoding)
            .with_embellishment(self.variants.embellishment)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let config = raw.into_config()?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Checks every cross-field invariant; the error names the first one broken.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = &self.variants;
        let params = self.params();
        if self.deadline == 0 {
            return Err(violated("deadline-after-preparation", "deadline must be at least 1"));
        }
        if v.default_grid && v.default_grille {
            return Err(violated(
                "default-grid-xor-default-grille",
                "default grids and default grilles cannot both be enabled",
            ));
        }
        if v.default_grille && (params.mode().is_fixed_vote() || v.numerical) {
            return Err(violated(
                "default-grille-subset-bits",
                "default grilles need subset mode and bit-vector grilles",
            ));
        }
        if v.default_grille && v.two_proxy {
            return Err(violated(
                "default-grille-single-route",
                "the default-grille variant already sends grids through the box",
            ));
        }

        let mut proxies: HashMap<&str, &ProxyBehavior> = HashMap::new();
        for p in &self.proxies {
            if p.name.trim().is_empty() {
                return Err(violated("named-participants", "a proxy has an empty name"));
            }
            if proxies.insert(&p.name, p).is_some() {
                return Err(violated(
                    "unique-proxy-names",
                    format!("proxy {:?} listed twice", p.name),
                ));
            }
        }
        for p in &self.proxies {
            if let Conduct::DelegateTo(next) = &p.conduct {
                if !v.transitive_proxy {
                    return Err(violated(
                        "delegation-needs-transitive-proxy",
                        format!("proxy {:?} delegates but the transitive-proxy variant is off", p.name),
                    ));
                }
                if !proxies.contains_key(next.as_str()) {
                    return Err(violated(
                        "known-proxy",
                        format!("proxy {:?} delegates to unknown {next:?}", p.name),
                    ));
                }
            }
        }

        let mut voters: HashMap<&str, &VoterBehavior> = HashMap::new();
        for voter in &self.voters {
            if voter.name.trim().is_empty() {
                return Err(violated("named-participants", "a voter has an empty name"));
            }
            if voters.insert(&voter.name, voter).is_some() {
                return Err(violated(
                    "unique-voter-names",
                    format!("voter {:?} listed twice", voter.name),
                ));
            }
        }
        for voter in &self.voters {
            self.validate_voter(voter, &params, &proxies, &voters)?;
        }
        Ok(())
    }

    fn validate_voter(
        &self,
        voter: &VoterBehavior,
        params: &ElectionParams,
        proxies: &HashMap<&str, &ProxyBehavior>,
        voters: &HashMap<&str, &VoterBehavior>,
    ) -> Result<(), ConfigError> {
        let name = &voter.name;
        match &voter.intent {
            Some(intent) => intent
                .validate(params)
                .map_err(|e| violated("valid-vote", format!("voter {name:?}: {e}")))?,
            None => {
                if voter.attendance != Attendance::Abstain || voter.mistake.is_some() || voter.id_swap_partner.is_some()
                {
                    return Err(violated(
                        "non-voters-stay-home",
                        format!("voter {name:?} has no vote but is set to take part"),
                    ));
                }
            }
        }
        for p in voter.attendance.proxies() {
            if !proxies.contains_key(p) {
                return Err(violated(
                    "known-proxy",
                    format!("voter {name:?} names unknown proxy {p:?}"),
                ));
            }
            if p == name {
                return Err(violated(
                    "proxy-is-someone-else",
                    format!("voter {name:?} is her own proxy"),
                ));
            }
        }
        if let Attendance::TwoProxy(a, b) = &voter.attendance {
            if !self.variants.two_proxy {
                return Err(violated(
                    "two-proxies-need-variant",
                    format!("voter {name:?} uses two proxies but the two-proxy variant is off"),
                ));
            }
            if a == b {
                return Err(violated(
                    "two-distinct-proxies",
                    format!("voter {name:?} names {a:?} twice"),
                ));
            }
        }
        if voter.mistake == Some(Mistake::WrongEmbellishment) && !self.variants.embellishment {
            return Err(violated(
                "embellishment-mistake-needs-variant",
                format!("voter {name:?} cannot get a fingerprint wrong without the embellishment variant"),
            ));
        }
        if let Some(partner) = &voter.id_swap_partner {
            if !self.variants.id_swap {
                return Err(violated(
                    "id-swap-needs-variant",
                    format!("voter {name:?} swaps ids but the id-swap variant is off"),
                ));
            }
            if partner == name {
                return Err(violated(
                    "id-swap-partner",
                    format!("voter {name:?} swaps with herself"),
                ));
            }
            let Some(other) = voters.get(partner.as_str()) else {
                return Err(violated(
                    "id-swap-partner",
                    format!("voter {name:?} swaps with unknown {partner:?}"),
                ));
            };
            if other.id_swap_partner.as_deref() != Some(name.as_str()) {
                return Err(violated(
                    "id-swap-symmetric",
                    format!("{name:?} swaps with {partner:?} but not the other way round"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RawConfig {
    seed: u64,
    #[serde(default)]
    deadline: Option<Tick>,
    #[serde(default)]
    box_cap: Option<usize>,
    election: RawElection,
    #[serde(default)]
    variants: Variants,
    #[serde(default)]
    stuffing: Option<Stuffing>,
    #[serde(default)]
    voters: Vec<RawVoter>,
    #[serde(default)]
    proxies: Vec<RawProxy>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElection {
    candidates: Vec<String>,
    #[serde(default = "one")]
    seats: u32,
    #[serde(default)]
    mode: ElectoralMode,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum RawAttendance {
    InPerson,
    ByProxy,
    TwoProxy,
    Abstain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RawVoter {
    name: String,
    #[serde(default)]
    vote: Option<Vec<String>>,
    #[serde(default)]
    attendance: Option<RawAttendance>,
    #[serde(default)]
    proxy: Option<String>,
    #[serde(default)]
    proxies: Option<Vec<String>>,
    #[serde(default)]
    swap_with: Option<String>,
    #[serde(default)]
    mistake: Option<Mistake>,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum RawConduct {
    Faithful,
    NoShow,
    Deanonymize,
    LeakId,
    SwapGrillePreservingChecksum,
    RandomAlteration,
    DelegateTo,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RawProxy {
    name: String,
    #[serde(default)]
    conduct: Option<RawConduct>,
    #[serde(default)]
    delegate_to: Option<String>,
}

impl RawConfig {
    fn into_config(self) -> Result<ScenarioConfig, ConfigError> {
        let election = ElectionParams::new(self.election.candidates, self.election.seats, self.election.mode)
            .map_err(|e| violated("valid-election", e.to_string()))?;
        let voters = self
            .voters
            .into_iter()
            .map(RawVoter::into_behavior)
            .collect::<Result<_, _>>()?;
        let proxies = self
            .proxies
            .into_iter()
            .map(RawProxy::into_behavior)
            .collect::<Result<_, _>>()?;
        Ok(ScenarioConfig {
            seed: self.seed,
            election,
            voters,
            proxies,
            variants: self.variants,
            stuffing: self.stuffing,
            deadline: self.deadline.unwrap_or(DEFAULT_DEADLINE),
            box_cap: self.box_cap,
        })
    }
}

impl RawVoter {
    fn into_behavior(self) -> Result<VoterBehavior, ConfigError> {
        let name = self.name;
        let default = if self.vote.is_some() {
            RawAttendance::InPerson
        } else {
            RawAttendance::Abstain
        };
        let kind = self.attendance.unwrap_or(default);
        let stray = |field: &str| {
            violated(
                "attendance-fields",
                format!("voter {name:?}: `{field}` does not fit this attendance"),
            )
        };
        let attendance = match kind {
            RawAttendance::InPerson | RawAttendance::Abstain => {
                if self.proxy.is_some() {
                    return Err(stray("proxy"));
                }
                if self.proxies.is_some() {
                    return Err(stray("proxies"));
                }
                if kind == RawAttendance::InPerson {
                    Attendance::InPerson
                } else {
                    Attendance::Abstain
                }
            }
            RawAttendance::ByProxy => {
                if self.proxies.is_some() {
                    return Err(stray("proxies"));
                }
                Attendance::ByProxy(self.proxy.ok_or_else(|| stray("proxy (missing)"))?)
            }
            RawAttendance::TwoProxy => {
                if self.proxy.is_some() {
                    return Err(stray("proxy"));
                }
                match self.proxies.as_deref() {
                    Some([a, b]) => Attendance::TwoProxy(a.clone(), b.clone()),
                    _ => return Err(stray("proxies (needs exactly two)")),
                }
            }
        };
        Ok(VoterBehavior {
            intent: self.vote.map(VoteIntent::new),
            attendance,
            id_swap_partner: self.swap_with,
            mistake: self.mistake,
            name,
        })
    }
}

impl RawProxy {
    fn into_behavior(self) -> Result<ProxyBehavior, ConfigError> {
        let conduct = match (self.conduct.unwrap_or(RawConduct::Faithful), self.delegate_to) {
            (RawConduct::DelegateTo, Some(next)) => Conduct::DelegateTo(next),
            (RawConduct::DelegateTo, None) => {
                return Err(violated(
                    "delegation-target",
                    format!("proxy {:?} delegates to nobody", self.name),
                ))
            }
            (_, Some(_)) => {
                return Err(violated(
                    "delegation-target",
                    format!("proxy {:?} names a delegate but does not delegate", self.name),
                ))
            }
            (RawConduct::Faithful, None) => Conduct::Faithful,
            (RawConduct::NoShow, None) => Conduct::NoShow,
            (RawConduct::Deanonymize, None) => Conduct::Deanonymize,
            (RawConduct::LeakId, None) => Conduct::LeakId,
            (RawConduct::SwapGrillePreservingChecksum, None) => Conduct::SwapGrillePreservingChecksum,
            (RawConduct::RandomAlteration, None) => Conduct::RandomAlteration,
        };
        Ok(ProxyBehavior {
            name: self.name,
            conduct,
        })
    }
}

/// Every config invariant checked by [`ScenarioConfig::validate`], by name.
pub fn invariant_names() -> HashSet<&'static str> {
    HashSet::from([
        "deadline-after-preparation",
        "default-grid-xor-default-grille",
        "default-grille-subset-bits",
        "default-grille-single-route",
        "named-participants",
        "unique-proxy-names",
        "unique-voter-names",
        "delegation-needs-transitive-proxy",
        "delegation-target",
        "known-proxy",
        "valid-vote",
        "valid-election",
        "non-voters-stay-home",
        "proxy-is-someone-else",
        "two-proxies-need-variant",
        "two-distinct-proxies",
        "embellishment-mistake-needs-variant",
        "id-swap-needs-variant",
        "id-swap-partner",
        "id-swap-symmetric",
        "attendance-fields",
    ])
}
