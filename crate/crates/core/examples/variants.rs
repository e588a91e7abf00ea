//! Each protocol variant on a generated honest election, checked against a
//! direct count of the voters' intents.

use blind_proxy::agents::generate::{honest_scenario, Flavor};
use blind_proxy::agents::{run_scenario, Attendance};

fn main() {
    for flavor in Flavor::ALL {
        let config = honest_scenario(2024, flavor);
        let trace = run_scenario(&config).expect("generated scenarios are valid");
        let expected = config
            .voters
            .iter()
            .filter(|v| v.attendance != Attendance::Abstain && v.intent.is_some())
            .count() as u64;
        println!(
            "{:<16} {} voters, {} mode, {} valid ballots (expected {expected})",
            format!("{flavor:?}"),
            config.voters.len(),
            config.election.mode(),
            trace.report.total_valid_ballots,
        );
        assert_eq!(trace.report.total_valid_ballots, expected);
    }
}
