//! Properties of ballots, the registry, the box and the tally, plus the
//! behavioral equivalences the agent layer promises.

mod common;

use std::collections::BTreeSet;

use blind_proxy::agents::{
    apply_conduct, run_scenario, Attendance, Conduct, ProxyBehavior, Role, ScenarioConfig, VoterBehavior,
};
use blind_proxy::ballot::{
    checksum_of, embellishment_of, grid_classify, make_grid, match_pair, parse_document, Document, GridClass,
    MatchVerdict, MismatchReason,
};
use blind_proxy::collection::{BallotBox, Payload, Sheet};
use blind_proxy::records::render_text;
use blind_proxy::registration::{HandoverPackage, Registry};
use blind_proxy::tally::{tally, IdStatus, TallyOptions};
use blind_proxy::{BallotId, ElectionParams, ElectoralMode, Grid, Grille, GrilleEncoding, SimRng, VoteIntent};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn letters(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("Cand-{}", (b'A' + i as u8) as char)).collect()
}

/// Election parameters plus an intent that is legal under them.
fn election() -> impl Strategy<Value = (ElectionParams, VoteIntent)> {
    (2..=8usize, 0..3u8, any::<bool>(), any::<bool>(), any::<u64>()).prop_flat_map(
        |(m, mode, numerical, embellished, salt)| {
            let mode = [
                ElectoralMode::Subset,
                ElectoralMode::FirstPastThePost,
                ElectoralMode::PluralityAtLarge,
            ][mode as usize];
            let seats = match mode {
                ElectoralMode::FirstPastThePost => Just(1u32).boxed(),
                _ => (1..=m as u32).boxed(),
            };
            (seats, proptest::collection::vec(any::<bool>(), m)).prop_map(move |(seats, picks)| {
                let encoding = if numerical {
                    GrilleEncoding::Numerical
                } else {
                    GrilleEncoding::Bits
                };
                let params = ElectionParams::new(letters(m), seats, mode)
                    .unwrap()
                    .with_encoding(encoding)
                    .with_embellishment(embellished);
                let mut chosen: Vec<String> = letters(m)
                    .into_iter()
                    .zip(picks)
                    .filter(|(_, p)| *p)
                    .map(|(c, _)| c)
                    .collect();
                if let Some(max) = mode.max_votes(seats) {
                    let mut rng = SimRng::seed_from_u64(salt);
                    chosen.shuffle(&mut rng);
                    chosen.truncate(max);
                }
                (params, VoteIntent::new(chosen))
            })
        },
    )
}

fn ballot(params: &ElectionParams, intent: &VoteIntent, seed: u64) -> (Grid, Grille) {
    let mut rng = SimRng::seed_from_u64(seed);
    let id = BallotId::random(&mut rng);
    make_grid(intent, params, &mut rng, id).unwrap()
}

fn bit_params(m: usize) -> ElectionParams {
    ElectionParams::new(letters(m), 1, ElectoralMode::Subset).unwrap()
}

proptest! {
    #[test]
    fn made_ballots_decode_to_their_intent((params, intent) in election(), seed in any::<u64>()) {
        let (grid, grille) = ballot(&params, &intent, seed);
        prop_assert_eq!(match_pair(&grid, &grille, &params).unwrap(), MatchVerdict::Matched(intent));
        prop_assert_eq!(grid_classify(&grid, &params), GridClass::Complete);
    }

    #[test]
    fn fixed_vote_grids_have_one_row_per_candidate((params, intent) in election(), seed in any::<u64>()) {
        let (grid, _) = ballot(&params, &intent, seed);
        if params.mode().is_fixed_vote() {
            prop_assert_eq!(grid.names.len(), params.candidates().len());
        } else {
            prop_assert_eq!(grid.names.len(), params.grid_len());
        }
    }

    #[test]
    fn permuting_rows_keeps_the_vote((params, intent) in election(), seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (grid, grille) = ballot(&params, &intent, seed);
        let mut order: Vec<usize> = (0..grid.names.len()).collect();
        order.shuffle(&mut SimRng::seed_from_u64(perm_seed));
        let mut moved = grid.clone();
        moved.names = order.iter().map(|i| grid.names[*i].clone()).collect();
        let moved_grille = match grille.as_bits() {
            Some(bits) => Grille::bits(grid.id, order.iter().map(|i| bits[*i]).collect()),
            None => {
                moved.code_numbers = grid.code_numbers.as_ref().map(|c| order.iter().map(|i| c[*i]).collect());
                grille.clone()
            }
        };
        moved.embellishment = params.embellishment_enabled().then(|| embellishment_of(&moved_grille));
        prop_assert_eq!(match_pair(&moved, &moved_grille, &params).unwrap(), MatchVerdict::Matched(intent));
    }

    #[test]
    fn decoy_marks_do_not_change_the_vote(m in 2..=8usize, picks in proptest::collection::vec(any::<bool>(), 8), seed in any::<u64>(), which in any::<prop::sample::Index>()) {
        let params = bit_params(m);
        let intent = VoteIntent::new(letters(m).into_iter().zip(picks).filter(|(_, p)| *p).map(|(c, _)| c));
        let (mut grid, grille) = ballot(&params, &intent, seed);
        let decoys: Vec<usize> = (0..grid.names.len()).filter(|i| !params.is_candidate(&grid.names[*i])).collect();
        let row = decoys[which.index(decoys.len())];
        let mut bits = grille.as_bits().unwrap().to_vec();
        bits[row] = !bits[row];
        let flipped = Grille::bits(grid.id, bits);
        grid.checksum = checksum_of(&flipped);
        prop_assert_eq!(match_pair(&grid, &flipped, &params).unwrap(), MatchVerdict::Matched(intent));
    }

    #[test]
    fn embellishment_catches_every_checksum_preserving_swap(m in 2..=8usize, seed in any::<u64>(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let params = bit_params(m).with_embellishment(true);
        let (grid, grille) = ballot(&params, &VoteIntent::new(letters(m).into_iter().take(1)), seed);
        let bits = grille.as_bits().unwrap();
        let ones: Vec<usize> = (0..bits.len()).filter(|i| bits[*i]).collect();
        let zeros: Vec<usize> = (0..bits.len()).filter(|i| !bits[*i]).collect();
        prop_assume!(!zeros.is_empty());
        let mut swapped = bits.to_vec();
        swapped.swap(ones[a.index(ones.len())], zeros[b.index(zeros.len())]);
        let swapped = Grille::bits(grid.id, swapped);
        prop_assert_eq!(checksum_of(&swapped), grid.checksum);
        prop_assert_eq!(
            match_pair(&grid, &swapped, &params).unwrap(),
            MatchVerdict::Mismatch(MismatchReason::Embellishment)
        );
    }

    #[test]
    fn text_forms_round_trip((params, intent) in election(), seed in any::<u64>()) {
        let (grid, grille) = ballot(&params, &intent, seed);
        prop_assert_eq!(Grid::parse(&grid.to_text()).unwrap(), grid.clone());
        prop_assert_eq!(Grille::parse(&grille.to_text()).unwrap(), grille.clone());
        prop_assert_eq!(parse_document(&grille.to_text()).unwrap(), Document::Grille(grille));
    }

    #[test]
    fn registry_ids_are_distinct(n in 1..300usize, seed in any::<u64>()) {
        let roll: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let registry = Registry::register(&roll, 2, &mut SimRng::seed_from_u64(seed)).unwrap();
        let ids: BTreeSet<BallotId> = roll.iter().map(|v| registry.id_of(v).unwrap()).collect();
        prop_assert_eq!(ids.len(), n);
    }

    #[test]
    fn closed_box_holds_exactly_what_went_in(texts in proptest::collection::vec("[a-z]{0,6}", 0..40), seed in any::<u64>()) {
        let mut by_alice = BallotBox::open();
        let mut by_bob = BallotBox::open();
        for t in &texts {
            by_alice.insert(Sheet::new(Payload::Text(t.clone()), "alice")).unwrap();
            by_bob.insert(Sheet::new(Payload::Text(t.clone()), "bob")).unwrap();
        }
        let a = by_alice.close(&mut SimRng::seed_from_u64(seed)).unwrap().to_vec();
        let b = by_bob.close(&mut SimRng::seed_from_u64(seed)).unwrap().to_vec();
        // who inserted a sheet leaves no trace in the closed box
        prop_assert_eq!(&a, &b);
        let mut went_in = texts.clone();
        let mut came_out: Vec<String> = a.iter().map(Payload::to_text).collect();
        went_in.sort();
        came_out.sort();
        prop_assert_eq!(went_in, came_out);
        prop_assert!(by_alice.insert(Sheet::new(Payload::Text("late".into()), "alice")).is_err());
    }
}

/// A small election run directly through registry, box and tally.
#[derive(Debug, Clone)]
struct Election {
    params: ElectionParams,
    handover: HandoverPackage,
    payloads: Vec<Payload>,
    intents: Vec<VoteIntent>,
}

fn direct_election(params: &ElectionParams, intents: Vec<VoteIntent>, seed: u64) -> Election {
    let mut rng = SimRng::seed_from_u64(seed);
    let roll: Vec<String> = (0..intents.len() + 3).map(|i| format!("v{i}")).collect();
    let mut registry = Registry::register(&roll, 2, &mut rng).unwrap();
    let mut payloads = Vec::new();
    for (voter, intent) in roll.iter().zip(&intents) {
        let id = registry.id_of(voter).unwrap();
        let (grid, grille) = make_grid(intent, params, &mut rng, id).unwrap();
        registry.submit_grid(id, grid, 1).unwrap();
        payloads.push(Payload::Grille(grille));
    }
    Election {
        params: params.clone(),
        handover: registry.seal_and_handover(true).unwrap(),
        payloads,
        intents,
    }
}

fn subset_intents(m: usize) -> impl Strategy<Value = Vec<VoteIntent>> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), 0..20).prop_map(move |rows| {
        rows.into_iter()
            .map(|picks| VoteIntent::new(letters(m).into_iter().zip(picks).filter(|(_, p)| *p).map(|(c, _)| c)))
            .collect()
    })
}

fn scenario_election() -> impl Strategy<Value = Election> {
    (2..=6usize, any::<u64>()).prop_flat_map(|(m, seed)| {
        subset_intents(m).prop_map(move |intents| direct_election(&bit_params(m), intents, seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tally_counts_every_intent_once(e in scenario_election()) {
        let report = tally(&e.payloads, &e.handover, &e.params, &TallyOptions::default()).report;
        for c in e.params.candidates() {
            let expected = e.intents.iter().filter(|i| i.contains(c)).count() as u64;
            prop_assert_eq!(report.count_for(c), Some(expected));
        }
        prop_assert_eq!(report.total_valid_ballots, e.intents.len() as u64);
        prop_assert_eq!(report.ledger.len(), e.handover.valid_ids.len());
        let unused = report.ledger.iter().filter(|l| l.status == IdStatus::Unused).count();
        prop_assert_eq!(unused, 3);
    }

    #[test]
    fn tally_ignores_sheet_order(e in scenario_election(), seed in any::<u64>()) {
        let before = tally(&e.payloads, &e.handover, &e.params, &TallyOptions::default()).report;
        let mut shuffled = e.payloads.clone();
        shuffled.shuffle(&mut SimRng::seed_from_u64(seed));
        prop_assert_eq!(before, tally(&shuffled, &e.handover, &e.params, &TallyOptions::default()).report);
    }

    #[test]
    fn noise_is_discarded_and_changes_nothing(e in scenario_election(), noise in proptest::collection::vec(".{0,30}", 0..30), fakes in 0..30usize, seed in any::<u64>()) {
        let before = tally(&e.payloads, &e.handover, &e.params, &TallyOptions::default()).report;
        let mut rng = SimRng::seed_from_u64(seed);
        let mut papers = e.payloads.clone();
        papers.extend(noise.iter().cloned().map(Payload::Text));
        let len = e.params.grid_len();
        for _ in 0..fakes {
            let bits = (0..len).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
            papers.push(Payload::Grille(Grille::bits(BallotId::random(&mut rng), bits)));
        }
        let after = tally(&papers, &e.handover, &e.params, &TallyOptions::default()).report;
        prop_assert_eq!(&after.counts, &before.counts);
        prop_assert_eq!(&after.ledger, &before.ledger);
        prop_assert_eq!(after.discarded_sheets, before.discarded_sheets + (noise.len() + fakes) as u64);
    }

    #[test]
    fn generated_scenarios_are_deterministic(seed in any::<u64>()) {
        let config = blind_proxy::agents::generate::honest_scenario(seed, blind_proxy::agents::generate::Flavor::Plain);
        let a = run_scenario(&config).unwrap();
        let b = run_scenario(&config).unwrap();
        prop_assert_eq!(render_text(&a.trace_records()), render_text(&b.trace_records()));
        prop_assert_eq!(a.report, b.report);
    }
}

fn base_config(seed: u64) -> ScenarioConfig {
    let params = ElectionParams::new(letters(3), 1, ElectoralMode::Subset).unwrap();
    let mut config = ScenarioConfig::new(seed, params);
    config.proxies = vec![ProxyBehavior::faithful("carol"), ProxyBehavior::faithful("dave")];
    for (i, picks) in [["Cand-A"].as_slice(), &["Cand-B", "Cand-C"], &[], &["Cand-A", "Cand-C"]]
        .iter()
        .enumerate()
    {
        config.voters.push(VoterBehavior::in_person(
            format!("voter-{i}-props"),
            VoteIntent::new(picks.iter().copied()),
        ));
    }
    config
}

#[test]
fn a_faithful_proxy_looks_like_voting_in_person() {
    for seed in 0..50 {
        let in_person = base_config(seed);
        let mut via_proxy = in_person.clone();
        via_proxy.voters[1].attendance = Attendance::ByProxy("carol".into());
        let a = run_scenario(&in_person).unwrap();
        let b = run_scenario(&via_proxy).unwrap();
        assert_eq!(
            render_text(&a.view_records(&Role::Ec)),
            render_text(&b.view_records(&Role::Ec)),
            "seed {seed}"
        );
        assert_eq!(a.report, b.report);
    }
}

#[test]
fn swapping_ids_changes_no_count() {
    for seed in 0..50 {
        let plain = base_config(seed);
        let mut swapped = plain.clone();
        swapped.variants.id_swap = true;
        swapped.voters[0].id_swap_partner = Some("voter-3-props".into());
        swapped.voters[3].id_swap_partner = Some("voter-0-props".into());
        let a = run_scenario(&plain).unwrap().report;
        let b = run_scenario(&swapped).unwrap().report;
        assert_eq!(a.counts, b.counts, "seed {seed}");
        assert_eq!(a.counts, common::oracle_counts(&plain));
    }
}

#[test]
fn two_faithful_proxies_count_like_one() {
    for seed in 0..50 {
        let mut one = base_config(seed);
        one.variants.two_proxy = true;
        let mut two = one.clone();
        one.voters[2].attendance = Attendance::ByProxy("carol".into());
        two.voters[2].attendance = Attendance::TwoProxy("carol".into(), "dave".into());
        let a = run_scenario(&one).unwrap().report;
        let b = run_scenario(&two).unwrap().report;
        assert_eq!(a.counts, b.counts, "seed {seed}");
        assert_eq!(a.total_valid_ballots, common::participants(&one));
    }
}

#[test]
fn a_delegation_chain_counts_like_its_last_proxy() {
    for seed in 0..50 {
        let mut direct = base_config(seed);
        direct.variants.transitive_proxy = true;
        direct.voters[0].attendance = Attendance::ByProxy("dave".into());
        let mut chained = direct.clone();
        chained.voters[0].attendance = Attendance::ByProxy("carol".into());
        chained.proxies[0] = ProxyBehavior::new("carol", Conduct::DelegateTo("dave".into()));
        let a = run_scenario(&direct).unwrap().report;
        let b = run_scenario(&chained).unwrap().report;
        assert_eq!(a.counts, b.counts, "seed {seed}");
        assert_eq!(a.counts, common::oracle_counts(&direct));
    }
}

/// A blind alteration keeps the vote exactly when it moves a mark between
/// two decoy rows, so its survival rate is d1·d0 / (k·(L−k)) for d1 decoys
/// marked 1, d0 decoys marked 0 and k marks out of L rows. Compared with the
/// exact rate from enumerating every possible transposition, within 3σ.
#[test]
fn random_alteration_survival_matches_its_exact_rate() {
    const TRIALS: u64 = 10_000;
    let params = bit_params(4);
    let intent = VoteIntent::new(["Cand-A", "Cand-C"]);
    let mut checked = 0;
    for layout_seed in 0..40u64 {
        let (grid, grille) = ballot(&params, &intent, layout_seed);
        let bits = grille.as_bits().unwrap();
        let ones: Vec<usize> = (0..bits.len()).filter(|i| bits[*i]).collect();
        let zeros: Vec<usize> = (0..bits.len()).filter(|i| !bits[*i]).collect();
        let keeps = |g: &Grille| match_pair(&grid, g, &params).unwrap() == MatchVerdict::Matched(intent.clone());

        let mut kept = 0;
        for i in &ones {
            for j in &zeros {
                let mut b = bits.to_vec();
                b.swap(*i, *j);
                kept += keeps(&Grille::bits(grid.id, b)) as u64;
            }
        }
        let exact = kept as f64 / (ones.len() * zeros.len()) as f64;
        let decoy = |want: bool| {
            (0..bits.len())
                .filter(|r| bits[*r] == want && !params.is_candidate(&grid.names[*r]))
                .count()
        };
        let closed_form = (decoy(true) * decoy(false)) as f64 / (ones.len() * zeros.len()) as f64;
        assert!((exact - closed_form).abs() < 1e-12, "layout {layout_seed}");
        if layout_seed % 8 != 0 {
            continue;
        }

        let mut survived = 0u64;
        for seed in 0..TRIALS {
            let mut rng = SimRng::seed_from_u64(seed);
            let altered = apply_conduct(&Conduct::RandomAlteration, &grille, &mut rng)
                .delivered
                .unwrap();
            assert_eq!(checksum_of(&altered), grid.checksum);
            survived += keeps(&altered) as u64;
        }
        let observed = survived as f64 / TRIALS as f64;
        let sigma = (exact * (1.0 - exact) / TRIALS as f64).sqrt();
        assert!(
            (observed - exact).abs() <= 3.0 * sigma + 1e-9,
            "layout {layout_seed}: observed {observed}, exact {exact}, sigma {sigma}"
        );
        checked += 1;
    }
    assert_eq!(checked, 5);
}
