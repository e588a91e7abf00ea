//! Every kind of proxy misconduct, each against one voter, with and without
//! the embellishment fingerprint.

use blind_proxy::agents::{run_scenario, Conduct, ProxyBehavior, ScenarioConfig, VoterBehavior};
use blind_proxy::{ElectionParams, ElectoralMode, VoteIntent};

fn main() {
    let conducts = [
        Conduct::Faithful,
        Conduct::NoShow,
        Conduct::Deanonymize,
        Conduct::LeakId,
        Conduct::SwapGrillePreservingChecksum,
        Conduct::RandomAlteration,
    ];
    for embellishment in [false, true] {
        println!("embellishment {}", if embellishment { "on" } else { "off" });
        for conduct in &conducts {
            let params = ElectionParams::new(["Ann", "Ben", "Cy"], 1, ElectoralMode::Subset).unwrap();
            let mut config = ScenarioConfig::new(3, params);
            config.variants.embellishment = embellishment;
            config.proxies.push(ProxyBehavior::new("mallory", conduct.clone()));
            config
                .voters
                .push(VoterBehavior::by_proxy("victim", VoteIntent::new(["Ann"]), "mallory"));
            config
                .voters
                .push(VoterBehavior::in_person("bystander", VoteIntent::new(["Ben"])));
            let trace = run_scenario(&config).expect("scenario is valid");
            println!(
                "  {:<34} victim: {}",
                conduct.to_string(),
                trace.ground_truth["victim"].outcome
            );
        }
    }
}
