//! Oracles and checks shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use blind_proxy::agents::{role_view, Attendance, Role, ScenarioConfig, ScenarioTrace};
use blind_proxy::records::render_text;

/// Brute-force count straight from the voters' intents: every voter who
/// makes a ballot and gets it into the box adds one per candidate she chose.
/// Only valid for scenarios without mistakes or misbehaving proxies.
pub fn oracle_counts(config: &ScenarioConfig) -> Vec<(String, u64)> {
    let mut tally: BTreeMap<&str, u64> = config.election.candidates().iter().map(|c| (c.as_str(), 0)).collect();
    for voter in &config.voters {
        if voter.attendance == Attendance::Abstain {
            continue;
        }
        if let Some(intent) = &voter.intent {
            for name in intent.iter() {
                *tally.get_mut(name).expect("intent names are candidates") += 1;
            }
        }
    }
    config
        .election
        .candidates()
        .iter()
        .map(|c| (c.clone(), tally[c.as_str()]))
        .collect()
}

pub fn participants(config: &ScenarioConfig) -> u64 {
    config
        .voters
        .iter()
        .filter(|v| v.intent.is_some() && v.attendance != Attendance::Abstain)
        .count() as u64
}

/// Checks the knowledge matrix on a finished scenario:
/// the RA sees no grille, the committee sees no voter name next to an id, and
/// the handover package mentions no voter. Returns every violation found.
///
/// With `textual`, the rendered views are also searched for grille documents
/// and voter names, which is exhaustive but slow on huge boxes.
pub fn privacy_violations(config: &ScenarioConfig, trace: &ScenarioTrace, textual: bool) -> Vec<String> {
    let mut found = Vec::new();
    let names: Vec<&str> = config.voters.iter().map(|v| v.name.as_str()).collect();

    for e in role_view(trace, &Role::Ra) {
        if !e.action.grilles().is_empty() {
            found.push(format!("ra sees a grille in {}", e.action.name()));
        }
    }
    for e in role_view(trace, &Role::Ec) {
        if !e.action.voter_id_links().is_empty() {
            found.push(format!("ec sees a voter-id link in {}", e.action.name()));
        }
    }
    let handover = trace.handover().expect("every run hands over").to_text();
    for name in &names {
        if handover.contains(name) {
            found.push(format!("handover mentions voter {name:?}"));
        }
    }
    if textual {
        let ra = render_text(&trace.view_records(&Role::Ra));
        if ra.contains("kind=grille") {
            found.push("ra view text holds a grille document".into());
        }
        let ec = render_text(&trace.view_records(&Role::Ec));
        for name in &names {
            if ec.contains(name) {
                found.push(format!("ec view text mentions voter {name:?}"));
            }
        }
    }
    found
}
