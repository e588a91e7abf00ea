//! Ten voters, three candidates, two of them voting through faithful proxies.
//! Prints the published result and each voter's ground-truth outcome.

use blind_proxy::agents::{run_scenario, ProxyBehavior, ScenarioConfig, VoterBehavior};
use blind_proxy::records::render_text;
use blind_proxy::{ElectionParams, ElectoralMode, VoteIntent};

fn main() {
    let params = ElectionParams::new(["Ann", "Ben", "Cy"], 1, ElectoralMode::Subset).unwrap();
    let mut config = ScenarioConfig::new(7, params.clone());
    config.proxies.push(ProxyBehavior::faithful("peter"));
    let votes: [&[&str]; 10] = [
        &["Ann"],
        &["Ann", "Cy"],
        &["Ben"],
        &[],
        &["Cy"],
        &["Ann"],
        &["Ben", "Cy"],
        &["Ann"],
        &["Ann", "Ben", "Cy"],
        &["Ben"],
    ];
    for (i, vote) in votes.iter().enumerate() {
        let name = format!("voter-{i}");
        let intent = VoteIntent::new(vote.iter().copied());
        config.voters.push(if i % 5 == 4 {
            VoterBehavior::by_proxy(name, intent, "peter")
        } else {
            VoterBehavior::in_person(name, intent)
        });
    }

    let trace = run_scenario(&config).expect("scenario is valid");
    print!("{}", trace.report.to_text());
    print!("{}", render_text(&trace.truth_records(&params)));
}
