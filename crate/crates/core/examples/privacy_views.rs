//! What each role gets to see. The RA links voters to ids but never sees a
//! grille; the committee reads every sheet but never sees a voter name; a
//! proxy sees only the sealed part he carries.

use blind_proxy::agents::{run_scenario, ProxyBehavior, Role, ScenarioConfig, VoterBehavior};
use blind_proxy::records::render_text;
use blind_proxy::{ElectionParams, ElectoralMode, VoteIntent};

fn main() {
    let params = ElectionParams::new(["Ann", "Ben"], 1, ElectoralMode::FirstPastThePost).unwrap();
    let mut config = ScenarioConfig::new(21, params);
    config.proxies.push(ProxyBehavior::faithful("peter"));
    config
        .voters
        .push(VoterBehavior::in_person("alice", VoteIntent::new(["Ann"])));
    config
        .voters
        .push(VoterBehavior::by_proxy("bob", VoteIntent::new(["Ben"]), "peter"));

    let trace = run_scenario(&config).expect("scenario is valid");
    for role in [Role::Ra, Role::Ec, Role::Proxy("peter".into()), Role::Public] {
        print!("{}", render_text(&trace.view_records(&role)));
    }
}
