//! Why the position-sum fingerprint matters: a checksum-preserving grille
//! swap passes the plain checksum but never the embellished one.

use blind_proxy::ballot::{checksum_of, embellishment_of, make_grid, match_pair};
use blind_proxy::{BallotId, ElectionParams, ElectoralMode, Grille, SimRng, VoteIntent};
use rand::SeedableRng;

fn main() {
    let intent = VoteIntent::new(["Ann"]);
    for embellishment in [false, true] {
        let params = ElectionParams::new(["Ann", "Ben", "Cy"], 1, ElectoralMode::Subset)
            .unwrap()
            .with_embellishment(embellishment);
        let mut rng = SimRng::seed_from_u64(5);
        let id = BallotId::random(&mut rng);
        let (grid, grille) = make_grid(&intent, &params, &mut rng, id).unwrap();

        // move the first mark onto the first blank row
        let mut bits = grille.as_bits().unwrap().to_vec();
        let one = bits.iter().position(|b| *b).unwrap();
        let zero = bits.iter().position(|b| !*b).unwrap();
        bits.swap(one, zero);
        let forged = Grille::bits(id, bits);

        println!("embellishment {}", if embellishment { "on" } else { "off" });
        println!("{}", grid.to_text());
        println!(
            "forged grille: checksum {} (grid says {}), position sum {} (was {})",
            checksum_of(&forged),
            grid.checksum,
            embellishment_of(&forged),
            embellishment_of(&grille)
        );
        println!("verdict: {}\n", match_pair(&grid, &forged, &params).unwrap());
    }
}
