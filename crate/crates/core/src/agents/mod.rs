//! Voters, proxies and stuffers acting out an election.
//!
//! A [`ScenarioConfig`] describes the roll, the proxy pool, each participant's
//! behavior and the protocol variants in force; [`run_scenario`] plays it out
//! through the registry, the ballot box and the committee and returns a
//! [`ScenarioTrace`] with every event, the published report and the
//! simulator's ground truth.

mod behavior;
mod conduct;
mod config;
pub mod generate;
mod scenario;
mod trace;

pub use behavior::{Attendance, Conduct, Mistake, ProxyBehavior, VoterBehavior};
pub use conduct::{apply_conduct, resolve_chain, Carried, ConductEffect, Resolved, MAX_HOPS};
pub use config::{
    invariant_names, ConfigError, ScenarioConfig, Stuffing, StuffingStrategy, Variants, DEFAULT_DEADLINE,
};
pub use scenario::{run_scenario, STUFFER};
pub use trace::{role_view, Action, Event, Outcome, Part, Role, ScenarioTrace, Truth};
