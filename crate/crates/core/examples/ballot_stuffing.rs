//! A stuffer adds 100 000 forged grilles under random ids. The box accepts
//! them all; the committee discards every one and the count is unchanged.

use blind_proxy::agents::{run_scenario, ScenarioConfig, Stuffing, StuffingStrategy, VoterBehavior};
use blind_proxy::{ElectionParams, ElectoralMode, VoteIntent};

fn main() {
    let params = ElectionParams::new(["Ann", "Ben"], 1, ElectoralMode::FirstPastThePost).unwrap();
    let mut config = ScenarioConfig::new(11, params);
    for i in 0..20 {
        let vote = if i % 3 == 0 { "Ben" } else { "Ann" };
        config
            .voters
            .push(VoterBehavior::in_person(format!("voter-{i}"), VoteIntent::new([vote])));
    }
    let clean = run_scenario(&config).expect("scenario is valid").report;

    config.stuffing = Some(Stuffing {
        count: 100_000,
        strategy: StuffingStrategy::Random,
    });
    let stuffed = run_scenario(&config).expect("scenario is valid").report;

    println!(
        "without stuffing: {:?}, discarded {}",
        clean.counts, clean.discarded_sheets
    );
    println!(
        "with stuffing:    {:?}, discarded {}",
        stuffed.counts, stuffed.discarded_sheets
    );
    assert_eq!(clean.counts, stuffed.counts);
}
