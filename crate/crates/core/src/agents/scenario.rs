//! End-to-end execution: registration, ballot preparation, election day,
//! handover and counting, with every step logged.
//!
//! Each phase draws from its own ChaCha stream of the scenario seed, so adding
//! stuffers or changing a proxy's conduct never reshuffles anybody's ballot.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};

use super::behavior::{Attendance, Mistake, ProxyBehavior, VoterBehavior};
use super::conduct::{apply_conduct, resolve_chain};
use super::config::{ConfigError, ScenarioConfig, StuffingStrategy};
use super::trace::{Action, Event, Outcome, Part, Role, ScenarioTrace, Truth};
use crate::ballot::{
    checksum_of, decoy_names, embellishment_of, make_grid, mark_layout, names_for_grille, BallotId, ElectionParams,
    Grid, Grille, GrilleEncoding, VoteIntent,
};
use crate::collection::{BallotBox, BoxError, Payload, Sheet};
use crate::registration::{DefaultBallots, HandoverPackage, Registry, Tick};
use crate::tally::{Committee, IdStatus, Routes, TallyOptions};
use crate::SimRng;

const REGISTRATION: Tick = 0;
const PREPARATION: Tick = 1;

/// Name under which fake sheets are inserted.
pub const STUFFER: &str = "stuffer";

#[derive(Clone, Copy)]
enum Stream {
    Registry = 1,
    Ballots = 2,
    Conduct = 3,
    Stuffing = 4,
    Box = 5,
}

fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

/// Who takes a box-route part to the box.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Carrier {
    Voter,
    Proxy(String),
}

/// One voter's prepared ballot and where its parts go.
struct Plan<'a> {
    voter: &'a VoterBehavior,
    intent: VoteIntent,
    id: BallotId,
    /// Parts that travel through the box, with their carriers.
    box_parts: Vec<(Part, Carrier)>,
}

/// Runs a scenario to completion. Deterministic in the config, seed included.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioTrace, ConfigError> {
    config.validate()?;
    Ok(Engine::new(config).run())
}

struct Engine<'a> {
    config: &'a ScenarioConfig,
    params: ElectionParams,
    events: Vec<Event>,
    proxies: HashMap<&'a str, &'a ProxyBehavior>,
    election_day: Tick,
}

impl<'a> Engine<'a> {
    fn new(config: &'a ScenarioConfig) -> Self {
        Self {
            config,
            params: config.params(),
            events: Vec::new(),
            proxies: config.proxies.iter().map(|p| (p.name.as_str(), p)).collect(),
            election_day: config.deadline + 1,
        }
    }

    fn emit(&mut self, tick: Tick, actor: &str, action: Action, seen_by: Vec<Role>) {
        self.events.push(Event {
            tick,
            actor: actor.to_string(),
            action,
            seen_by,
        });
    }

    fn run(mut self) -> ScenarioTrace {
        let config = self.config;
        let variants = config.variants;
        let params = self.params.clone();

        // registration
        let mut reg_rng = stream(config.seed, Stream::Registry);
        let roll: Vec<&str> = config.voters.iter().map(|v| v.name.as_str()).collect();
        let mut registry = Registry::register(&roll, config.deadline, &mut reg_rng)
            .expect("voter names are validated unique")
            .with_default_ballots(DefaultBallots {
                grids: variants.default_grid,
                grilles: variants.default_grille,
            });
        let own_id: HashMap<&str, BallotId> = roll
            .iter()
            .map(|v| (*v, registry.id_of(v).expect("every roll member has an id")))
            .collect();
        let mut default_grids = HashMap::new();
        let mut default_grilles = HashMap::new();
        for voter in &roll {
            let id = own_id[voter];
            self.emit(
                REGISTRATION,
                "ra",
                Action::IdIssued {
                    voter: voter.to_string(),
                    id,
                },
                vec![Role::Ra],
            );
            if variants.default_grid {
                let grid = registry
                    .make_default_grid(id, &params, &mut reg_rng)
                    .expect("variant enabled");
                self.emit(
                    REGISTRATION,
                    "ra",
                    Action::DefaultGridIssued { id, grid: grid.clone() },
                    vec![Role::Ra],
                );
                default_grids.insert(id, grid);
            }
            if variants.default_grille {
                let grille = registry
                    .make_default_grille(id, &params, &mut reg_rng)
                    .expect("variant validated");
                self.emit(
                    REGISTRATION,
                    "ra",
                    Action::DefaultGrilleIssued {
                        id,
                        grille: grille.clone(),
                    },
                    vec![Role::Ra],
                );
                default_grilles.insert(id, grille);
            }
        }

        // preparation: ballots are made, RA-route parts submitted, proxies briefed
        let mut ballot_rng = stream(config.seed, Stream::Ballots);
        let mut plans = Vec::new();
        for voter in &config.voters {
            let Some(intent) = voter.intent.clone() else { continue };
            let id = match &voter.id_swap_partner {
                Some(partner) => own_id[partner.as_str()],
                None => own_id[voter.name.as_str()],
            };
            let (mut grid, grille) = if let Some(default) = default_grids.get(&id) {
                let Grid {
                    names, code_numbers, ..
                } = Grid::clone(default);
                mark_layout(id, names, code_numbers, &intent, &params, &mut ballot_rng)
            } else if let Some(default) = default_grilles.get(&id) {
                let grille: Grille = Grille::clone(default);
                let bits = grille.as_bits().expect("default grilles are bit vectors");
                let names =
                    names_for_grille(bits, &intent, &params, &mut ballot_rng).expect("n ones and n zeros fit any vote");
                let grid = Grid {
                    id,
                    names,
                    checksum: checksum_of(&grille),
                    embellishment: params.embellishment_enabled().then(|| embellishment_of(&grille)),
                    code_numbers: None,
                };
                (grid, grille)
            } else {
                make_grid(&intent, &params, &mut ballot_rng, id).expect("votes are validated")
            };
            apply_mistake(voter.mistake, &mut grid, &params, &mut ballot_rng);
            self.emit(
                PREPARATION,
                &voter.name,
                Action::BallotPrepared {
                    voter: voter.name.clone(),
                    id,
                },
                vec![],
            );

            let grid_by_box = variants.default_grille
                || (variants.two_proxy && matches!(voter.attendance, Attendance::InPerson | Attendance::TwoProxy(..)));
            let registry_tick = if voter.mistake == Some(Mistake::LateRegistration) {
                config.deadline + 1
            } else {
                PREPARATION
            };
            let no_grid = voter.mistake == Some(Mistake::NoGrid);
            if variants.default_grille {
                registry
                    .submit_grille(id, grille.clone(), registry_tick)
                    .expect("registry open");
                self.emit(
                    registry_tick,
                    &voter.name,
                    Action::GrilleSubmitted {
                        voter: voter.name.clone(),
                        id,
                        grille: grille.clone(),
                    },
                    vec![Role::Ra],
                );
            } else if !grid_by_box && !no_grid {
                registry
                    .submit_grid(id, grid.clone(), registry_tick)
                    .expect("registry open");
                self.emit(
                    registry_tick,
                    &voter.name,
                    Action::GridSubmitted {
                        voter: voter.name.clone(),
                        id,
                        grid: grid.clone(),
                        on_time: registry_tick <= config.deadline,
                    },
                    vec![Role::Ra],
                );
            }

            let mut box_parts = Vec::new();
            if grid_by_box && !no_grid {
                let carrier = match &voter.attendance {
                    Attendance::ByProxy(p) | Attendance::TwoProxy(p, _) => Carrier::Proxy(p.clone()),
                    _ => Carrier::Voter,
                };
                box_parts.push((Part::Grid(grid), carrier));
            }
            if !variants.default_grille {
                let carrier = match &voter.attendance {
                    Attendance::ByProxy(p) | Attendance::TwoProxy(_, p) => Carrier::Proxy(p.clone()),
                    _ => Carrier::Voter,
                };
                box_parts.push((Part::Grille(grille), carrier));
            }
            if voter.attendance == Attendance::Abstain {
                box_parts.clear();
            }
            for (part, carrier) in &box_parts {
                if let Carrier::Proxy(p) = carrier {
                    self.emit(
                        PREPARATION,
                        &voter.name,
                        Action::Entrusted {
                            voter: voter.name.clone(),
                            proxy: p.clone(),
                            id,
                            part: part.clone(),
                        },
                        vec![Role::Proxy(p.clone())],
                    );
                }
            }
            plans.push(Plan {
                voter,
                intent,
                id,
                box_parts,
            });
        }

        // election day
        let day = self.election_day;
        let mut conduct_rng = stream(config.seed, Stream::Conduct);
        let mut ballot_box = BallotBox::sealed_empty().with_cap(config.box_cap);
        self.emit(day, "ec", Action::BoxSealed, vec![Role::Public]);
        ballot_box.begin_polling().expect("fresh box");
        let mut altered: HashSet<&str> = HashSet::new();
        let mut leaked: Vec<BallotId> = Vec::new();
        for plan in &plans {
            let copies = if plan.voter.mistake == Some(Mistake::ExtraGrille) {
                2
            } else {
                1
            };
            for (part, carrier) in &plan.box_parts {
                let (inserter, delivered) = match carrier {
                    Carrier::Voter => (plan.voter.name.clone(), Some(part.clone())),
                    Carrier::Proxy(first) => {
                        let resolved = resolve_chain(first, &self.proxies);
                        for (from, to) in &resolved.hops {
                            self.emit(
                                day,
                                from,
                                Action::Delegated {
                                    from: from.clone(),
                                    to: to.clone(),
                                    id: plan.id,
                                    part: part.clone(),
                                },
                                vec![Role::Proxy(from.clone()), Role::Proxy(to.clone())],
                            );
                        }
                        let (delivered, leak, deanonymized) = match part {
                            Part::Grid(g) => {
                                let e = apply_conduct(&resolved.conduct, g, &mut conduct_rng);
                                (e.delivered.map(Part::Grid), e.leaked, e.deanonymized)
                            }
                            Part::Grille(g) => {
                                let e = apply_conduct(&resolved.conduct, g, &mut conduct_rng);
                                (e.delivered.map(Part::Grille), e.leaked, e.deanonymized)
                            }
                        };
                        if let Some(id) = leak {
                            leaked.push(id);
                            self.emit(
                                day,
                                &resolved.carrier,
                                Action::IdLeaked {
                                    proxy: resolved.carrier.clone(),
                                    id,
                                },
                                vec![Role::Public],
                            );
                        }
                        if deanonymized {
                            self.emit(
                                day,
                                &resolved.carrier,
                                Action::Deanonymized {
                                    proxy: resolved.carrier.clone(),
                                    voter: plan.voter.name.clone(),
                                    id: plan.id,
                                },
                                vec![Role::Ec],
                            );
                        }
                        (resolved.carrier, delivered)
                    }
                };
                let Some(delivered) = delivered else { continue };
                if delivered != *part {
                    altered.insert(&plan.voter.name);
                }
                let repeat = if matches!(delivered, Part::Grille(_)) {
                    copies
                } else {
                    1
                };
                let payload = match delivered {
                    Part::Grid(g) => Payload::Grid(g),
                    Part::Grille(g) => Payload::Grille(g),
                };
                for _ in 0..repeat {
                    self.insert(&mut ballot_box, &inserter, payload.clone());
                }
            }
        }

        if let Some(stuffing) = config.stuffing {
            let mut rng = stream(config.seed, Stream::Stuffing);
            let (mut accepted, mut refused) = (0u64, 0u64);
            for i in 0..stuffing.count {
                let id = match stuffing.strategy {
                    StuffingStrategy::Leaked if !leaked.is_empty() => leaked[i as usize % leaked.len()],
                    _ => BallotId::random(&mut rng),
                };
                let fake = fake_grille(id, &params, &mut rng);
                match ballot_box.insert(Sheet::new(Payload::Grille(fake), STUFFER)) {
                    Ok(()) => accepted += 1,
                    Err(_) => refused += 1,
                }
            }
            self.emit(day, STUFFER, Action::StuffingInserted { accepted, refused }, vec![]);
        }

        let mut box_rng = stream(config.seed, Stream::Box);
        let sheets = ballot_box.sheet_count();
        ballot_box.close(&mut box_rng).expect("box open");
        self.emit(day, "ec", Action::BoxClosed { sheets }, vec![Role::Public]);
        let payloads: Arc<[Payload]> = ballot_box.into_payloads().expect("box closed").into();

        // handover
        let package = registry.seal_and_handover(true).expect("poll closed");
        registry.delete_assignment().expect("sealed");
        let package = Arc::new(package);
        self.emit(
            day + 1,
            "ra",
            Action::Handover {
                package: Arc::clone(&package),
            },
            vec![Role::Ra, Role::Ec],
        );

        // counting
        let routes = if variants.default_grille {
            Routes::GrilleViaRegistry
        } else if variants.two_proxy {
            Routes::BothViaBox
        } else {
            Routes::GridViaRegistry
        };
        let mut committee = Committee::new(
            params.clone(),
            TallyOptions {
                routes,
                publish_purged: variants.publish_purged,
            },
        );
        committee.receive_handover(HandoverPackage::clone(&package));
        self.emit(
            day + 2,
            "ec",
            Action::BoxOpened {
                payloads: Arc::clone(&payloads),
            },
            vec![Role::Ec],
        );
        committee.count(&payloads).expect("handover received");
        let decoded = committee.reading().expect("counted").decoded.clone();
        let report = committee.publish().expect("counted once");
        self.emit(
            day + 2,
            "ec",
            Action::ResultPublished {
                total_valid_ballots: report.total_valid_ballots,
            },
            vec![Role::Public],
        );

        let mut ground_truth = BTreeMap::new();
        for voter in &config.voters {
            ground_truth.insert(
                voter.name.clone(),
                Truth {
                    intent: voter.intent.clone(),
                    ballot_id: None,
                    outcome: Outcome::Absent,
                },
            );
        }
        for plan in &plans {
            let status = report.status_of(plan.id).expect("every issued id is in the ledger");
            let outcome = match status {
                IdStatus::Counted => {
                    if !altered.contains(plan.voter.name.as_str()) && decoded.get(&plan.id) == Some(&plan.intent) {
                        Outcome::CountedAsIntended
                    } else {
                        Outcome::CountedAltered
                    }
                }
                IdStatus::Unused => Outcome::Absent,
                invalid => Outcome::Invalidated(invalid),
            };
            let truth = ground_truth.get_mut(&plan.voter.name).expect("inserted above");
            truth.ballot_id = Some(plan.id);
            truth.outcome = outcome;
        }

        ScenarioTrace {
            seed: config.seed,
            events: self.events,
            report,
            ground_truth,
        }
    }

    fn insert(&mut self, ballot_box: &mut BallotBox, by: &str, payload: Payload) {
        let day = self.election_day;
        match ballot_box.insert(Sheet::new(payload.clone(), by)) {
            Ok(()) => self.emit(
                day,
                by,
                Action::SheetInserted {
                    by: by.to_string(),
                    payload,
                },
                vec![],
            ),
            Err(BoxError::CapReached { .. }) => {
                self.emit(day, by, Action::SheetRefused { by: by.to_string() }, vec![Role::Ec])
            }
            Err(e) => unreachable!("box is open during election day: {e}"),
        }
    }
}

fn apply_mistake<R: Rng + ?Sized>(mistake: Option<Mistake>, grid: &mut Grid, params: &ElectionParams, rng: &mut R) {
    match mistake {
        Some(Mistake::WrongChecksum) => grid.checksum += 1,
        Some(Mistake::WrongEmbellishment) => grid.embellishment = grid.embellishment.map(|e| e + 1),
        Some(Mistake::ExtraRow) => {
            let name = loop {
                let name = decoy_names(1, params, rng).remove(0);
                if !grid.names.contains(&name) {
                    break name;
                }
            };
            grid.names.push(name);
            if let Some(codes) = &mut grid.code_numbers {
                let code = loop {
                    let c: u32 = rng.gen();
                    if !codes.contains(&c) {
                        break c;
                    }
                };
                codes.push(code);
            }
        }
        _ => {}
    }
}

/// A stuffer's sheet: a plausible-looking grille under `id`.
fn fake_grille<R: Rng + ?Sized>(id: BallotId, params: &ElectionParams, rng: &mut R) -> Grille {
    let len = params.grid_len();
    match params.encoding() {
        GrilleEncoding::Bits => Grille::bits(id, (0..len).map(|_| rng.gen_bool(0.5)).collect()),
        GrilleEncoding::Numerical => {
            let count = rng.gen_range(0..=len);
            Grille::codes(id, crate::ballot::distinct_codes(count, rng)).expect("distinct codes")
        }
    }
}
