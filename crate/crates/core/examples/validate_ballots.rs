//! Desk-checking hand-made ballots: writes a grid and three grilles to a
//! temporary directory and runs the `validate` command over them.

use blind_proxy::ballot::make_grid;
use blind_proxy::cli::{cmd_validate, OutputFormat, ValidateOptions};
use blind_proxy::{BallotId, ElectionParams, ElectoralMode, Grille, SimRng, VoteIntent};
use rand::SeedableRng;

fn main() {
    let params = ElectionParams::new(["Ann", "Ben", "Cy"], 1, ElectoralMode::Subset).unwrap();
    let mut rng = SimRng::seed_from_u64(9);
    let dir = std::env::temp_dir().join(format!("blind-proxy-validate-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let mut files = Vec::new();
    let mut save = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        files.push(path);
    };
    for (n, tamper) in ["good", "extra-mark", "short"].iter().enumerate() {
        let id = BallotId::random(&mut rng);
        let (grid, grille) = make_grid(&VoteIntent::new(["Ben", "Cy"]), &params, &mut rng, id).unwrap();
        let mut bits = grille.as_bits().unwrap().to_vec();
        match *tamper {
            "extra-mark" => {
                let zero = bits.iter().position(|b| !*b).unwrap();
                bits[zero] = true;
            }
            "short" => {
                bits.pop();
            }
            _ => {}
        }
        save(&format!("{n}-grid.txt"), grid.to_text());
        save(&format!("{n}-grille.txt"), Grille::bits(id, bits).to_text());
    }
    save("scrawl.txt", "vote Ann!\n".into());

    let opts = ValidateOptions {
        files,
        candidates: params.candidates().to_vec(),
        seats: 1,
        mode: ElectoralMode::Subset,
        embellishment: false,
        output_format: OutputFormat::Text,
    };
    cmd_validate(&opts, &mut std::io::stdout(), &mut std::io::stderr());
    std::fs::remove_dir_all(&dir).unwrap();
}
