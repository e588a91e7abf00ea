//! Random honest scenarios, for sweeps and equivalence checks.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};

use super::behavior::{Attendance, Conduct, ProxyBehavior, VoterBehavior};
use super::config::ScenarioConfig;
use crate::ballot::{ElectionParams, ElectoralMode, VoteIntent};
use crate::SimRng;

/// Which variant a generated scenario exercises. Every flavor produces only
/// honest voters and faithful proxies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Plain,
    TwoProxy,
    IdSwap,
    TransitiveProxy,
    DefaultGrid,
    DefaultGrille,
    Numerical,
}

impl Flavor {
    pub const ALL: [Flavor; 7] = [
        Flavor::Plain,
        Flavor::TwoProxy,
        Flavor::IdSwap,
        Flavor::TransitiveProxy,
        Flavor::DefaultGrid,
        Flavor::DefaultGrille,
        Flavor::Numerical,
    ];
}

/// Voters whose names are long and distinctive enough that a substring search
/// for them cannot hit ids, checksums or random decoy names by accident.
fn voter_name<R: Rng + ?Sized>(i: usize, rng: &mut R) -> String {
    format!("voter-{i:03}-{:08x}", rng.gen::<u32>())
}

fn random_intent<R: Rng + ?Sized>(params: &ElectionParams, rng: &mut R) -> VoteIntent {
    let candidates = params.candidates();
    match params.mode() {
        ElectoralMode::Subset => candidates.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
        ElectoralMode::FirstPastThePost | ElectoralMode::PluralityAtLarge => {
            let most = params.mode().max_votes(params.seats()).unwrap_or(candidates.len());
            let k = rng.gen_range(0..=most);
            candidates.iter().cloned().choose_multiple(rng, k).into_iter().collect()
        }
    }
}

/// 5–50 voters, 2–8 candidates, any electoral mode (subset only for default
/// grilles), a mix of in-person voters, faithful proxies and a few abstainers.
pub fn honest_scenario(seed: u64, flavor: Flavor) -> ScenarioConfig {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(9);

    let m = rng.gen_range(2..=8usize);
    let candidates: Vec<String> = (0..m).map(|i| format!("Cand-{}", (b'A' + i as u8) as char)).collect();
    let mode = if flavor == Flavor::DefaultGrille {
        ElectoralMode::Subset
    } else {
        *[
            ElectoralMode::Subset,
            ElectoralMode::FirstPastThePost,
            ElectoralMode::PluralityAtLarge,
        ]
        .choose(&mut rng)
        .expect("non-empty")
    };
    let seats = match mode {
        ElectoralMode::FirstPastThePost => 1,
        _ => rng.gen_range(1..=m as u32),
    };
    let params = ElectionParams::new(candidates, seats, mode).expect("generated parameters are valid");

    let mut config = ScenarioConfig::new(seed, params.clone());
    match flavor {
        Flavor::TwoProxy => config.variants.two_proxy = true,
        Flavor::IdSwap => config.variants.id_swap = true,
        Flavor::TransitiveProxy => config.variants.transitive_proxy = true,
        Flavor::DefaultGrid => config.variants.default_grid = true,
        Flavor::DefaultGrille => config.variants.default_grille = true,
        Flavor::Numerical => config.variants.numerical = true,
        Flavor::Plain => {}
    }

    let pool = rng.gen_range(2..=5usize);
    let proxy_names: Vec<String> = (0..pool)
        .map(|i| format!("proxy-{i}-{:08x}", rng.gen::<u32>()))
        .collect();
    config.proxies = proxy_names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            // delegation only ever points further down the pool, so chains end
            if flavor == Flavor::TransitiveProxy && i + 1 < pool && rng.gen_bool(0.6) {
                let next = rng.gen_range(i + 1..pool);
                ProxyBehavior::new(name.clone(), Conduct::DelegateTo(proxy_names[next].clone()))
            } else {
                ProxyBehavior::faithful(name.clone())
            }
        })
        .collect();

    let n = rng.gen_range(5..=50usize);
    for i in 0..n {
        let name = voter_name(i, &mut rng);
        if rng.gen_bool(0.1) {
            config.voters.push(VoterBehavior::abstaining(name));
            continue;
        }
        let intent = random_intent(&params, &mut rng);
        let attendance = match rng.gen_range(0..3) {
            0 => Attendance::InPerson,
            1 if flavor == Flavor::TwoProxy => {
                let pair = proxy_names.choose_multiple(&mut rng, 2).cloned().collect::<Vec<_>>();
                Attendance::TwoProxy(pair[0].clone(), pair[1].clone())
            }
            _ => Attendance::ByProxy(proxy_names.choose(&mut rng).expect("pool is non-empty").clone()),
        };
        config.voters.push(VoterBehavior {
            attendance,
            ..VoterBehavior::in_person(name, intent)
        });
    }

    if flavor == Flavor::IdSwap {
        let mut voting: Vec<usize> = (0..n).filter(|i| config.voters[*i].intent.is_some()).collect();
        voting.shuffle(&mut rng);
        for pair in voting.chunks_exact(2) {
            if rng.gen_bool(0.7) {
                let (a, b) = (pair[0], pair[1]);
                config.voters[a].id_swap_partner = Some(config.voters[b].name.clone());
                config.voters[b].id_swap_partner = Some(config.voters[a].name.clone());
            }
        }
    }
    config
}
