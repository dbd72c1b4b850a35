//! Regenerates the bundled dataset fixtures.
//!
//! The season and golf tables are fixed small benchmarks. The breast-cancer
//! file is a seeded synthetic reconstruction of the classic Wisconsin
//! screening dataset (699 rows, nine 1-10 cytology attributes, 65.5%
//! benign, 16 rows with a missing bare-nuclei value): class-conditional
//! structure is matched so that clump thickness, bare nuclei, and mitosis
//! carry the diagnostic signal while the remaining attributes are noisy
//! correlates.
//!
//! Usage: cargo run --example make_fixtures [fixtures-root]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

const SEED: u64 = 0x5EED_CAFE;

#[derive(Clone, Debug)]
struct Row {
    attrs: [u8; 9],
    benign: bool,
    missing_a6: bool,
}

fn weighted(rng: &mut ChaCha8Rng, choices: &[(u8, u32)]) -> u8 {
    let total: u32 = choices.iter().map(|&(_, w)| w).sum();
    let mut roll = rng.random_range(0..total);
    for &(value, weight) in choices {
        if roll < weight {
            return value;
        }
        roll -= weight;
    }
    choices.last().unwrap().0
}

fn filler(rng: &mut ChaCha8Rng, benign: bool) -> u8 {
    if benign {
        weighted(
            rng,
            &[
                (1, 26),
                (2, 22),
                (3, 17),
                (4, 13),
                (5, 10),
                (6, 6),
                (7, 4),
                (8, 2),
            ],
        )
    } else {
        weighted(
            rng,
            &[
                (1, 7),
                (2, 9),
                (3, 10),
                (4, 11),
                (5, 12),
                (6, 12),
                (7, 11),
                (8, 10),
                (9, 9),
                (10, 9),
            ],
        )
    }
}

fn fill_rest(rng: &mut ChaCha8Rng, a1: u8, a6: u8, a9: u8, benign: bool) -> [u8; 9] {
    let mut attrs = [0u8; 9];
    attrs[0] = a1;
    attrs[5] = a6;
    attrs[8] = a9;
    for slot in [1, 2, 3, 4, 6, 7] {
        attrs[slot] = filler(rng, benign);
    }
    attrs
}

/// Benign rows sit low on all three marker attributes.
fn clean_benign(rng: &mut ChaCha8Rng) -> Row {
    let a1 = weighted(rng, &[(1, 50), (2, 32), (3, 18)]);
    let a6 = weighted(rng, &[(1, 75), (2, 25)]);
    Row {
        attrs: fill_rest(rng, a1, a6, 1, true),
        benign: true,
        missing_a6: false,
    }
}

fn malig_a1_solo(rng: &mut ChaCha8Rng) -> Row {
    let a1 = weighted(rng, &[(8, 40), (9, 35), (10, 25)]);
    let a6 = weighted(rng, &[(1, 75), (2, 25)]);
    Row {
        attrs: fill_rest(rng, a1, a6, 1, false),
        benign: false,
        missing_a6: false,
    }
}

fn malig_a6_solo(rng: &mut ChaCha8Rng) -> Row {
    let a1 = weighted(rng, &[(1, 35), (2, 35), (3, 30)]);
    let a6 = weighted(rng, &[(7, 20), (8, 28), (9, 26), (10, 26)]);
    Row {
        attrs: fill_rest(rng, a1, a6, 1, false),
        benign: false,
        missing_a6: false,
    }
}

fn malig_a9_solo(rng: &mut ChaCha8Rng) -> Row {
    let a1 = weighted(rng, &[(1, 35), (2, 35), (3, 30)]);
    let a6 = weighted(rng, &[(1, 75), (2, 25)]);
    let a9 = weighted(rng, &[(6, 30), (7, 22), (8, 18), (9, 16), (10, 14)]);
    Row {
        attrs: fill_rest(rng, a1, a6, a9, false),
        benign: false,
        missing_a6: false,
    }
}

fn malig_multi(rng: &mut ChaCha8Rng) -> Row {
    let a1 = weighted(rng, &[(7, 22), (8, 30), (9, 26), (10, 22)]);
    let a6 = weighted(rng, &[(6, 14), (7, 22), (8, 24), (9, 20), (10, 20)]);
    let a9 = weighted(
        rng,
        &[
            (3, 14),
            (4, 18),
            (5, 20),
            (6, 16),
            (7, 12),
            (8, 10),
            (9, 6),
            (10, 4),
        ],
    );
    Row {
        attrs: fill_rest(rng, a1, a6, a9, false),
        benign: false,
        missing_a6: false,
    }
}

/// Malignant rows just past the benign region on the clump axis. They share
/// one attribute triple, land near the trained decision surface, and form
/// the small middle activation cluster.
fn malig_middle(rng: &mut ChaCha8Rng) -> Row {
    Row {
        attrs: fill_rest(rng, 4, 2, 1, false),
        benign: false,
        missing_a6: false,
    }
}

/// Mislabeled screening outcomes: marker profile of the opposite class.
/// They keep the fit imperfect, as real data would.
fn exception(rng: &mut ChaCha8Rng, benign_label: bool) -> Row {
    let row = if benign_label {
        malig_multi(rng)
    } else {
        clean_benign(rng)
    };
    Row {
        attrs: row.attrs,
        benign: benign_label,
        missing_a6: false,
    }
}

fn cancer_rows() -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut benign: Vec<Row> = (0..453).map(|_| clean_benign(&mut rng)).collect();
    benign.extend((0..5).map(|_| exception(&mut rng, true)));
    let mut malig: Vec<Row> = Vec::new();
    malig.extend((0..30).map(|_| malig_a1_solo(&mut rng)));
    malig.extend((0..118).map(|_| malig_a6_solo(&mut rng)));
    malig.extend((0..46).map(|_| malig_a9_solo(&mut rng)));
    malig.extend((0..30).map(|_| malig_multi(&mut rng)));
    malig.extend((0..12).map(|_| malig_middle(&mut rng)));
    malig.extend((0..5).map(|_| exception(&mut rng, false)));
    assert_eq!(benign.len(), 458);
    assert_eq!(malig.len(), 241);

    benign.shuffle(&mut rng);
    malig.shuffle(&mut rng);

    // First 350 file rows: 237 benign + 113 malignant.
    let mut train_half: Vec<Row> = Vec::new();
    train_half.extend(benign.drain(..237));
    train_half.extend(malig.drain(..113));
    train_half.shuffle(&mut rng);

    let mut test_half: Vec<Row> = Vec::new();
    test_half.append(&mut benign);
    test_half.append(&mut malig);
    test_half.shuffle(&mut rng);

    let mut rows = train_half;
    rows.extend(test_half);
    assert_eq!(rows.len(), 699);

    // 16 missing bare-nuclei values scattered through the file: 8 per
    // half, mostly benign.
    let mut marked = 0usize;
    let mut mark =
        |rows: &mut [Row], start: usize, end: usize, benign_quota: usize, malig_quota: usize| {
            let stride = 37usize;
            let (mut b, mut m) = (0usize, 0usize);
            'outer: for offset in 0..stride {
                let mut i = start + offset + 11;
                while i < end {
                    let row = &mut rows[i];
                    if !row.missing_a6 {
                        if row.benign && b < benign_quota {
                            row.missing_a6 = true;
                            b += 1;
                            marked += 1;
                        } else if !row.benign && m < malig_quota {
                            row.missing_a6 = true;
                            m += 1;
                            marked += 1;
                        }
                    }
                    if b == benign_quota && m == malig_quota {
                        break 'outer;
                    }
                    i += stride;
                }
            }
            assert_eq!(
                (b, m),
                (benign_quota, malig_quota),
                "missing-value quota unmet"
            );
        };
    mark(&mut rows, 0, 350, 6, 2);
    mark(&mut rows, 350, 699, 6, 2);
    assert_eq!(marked, 16);
    rows
}

fn write_cancer(path: &Path) {
    let rows = cancer_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x1D_B175);
    let mut id: u64 = 1_000_025;
    let mut out = String::new();
    for row in &rows {
        write!(out, "{id}").unwrap();
        for (i, &v) in row.attrs.iter().enumerate() {
            if i == 5 && row.missing_a6 {
                out.push_str(",?");
            } else {
                write!(out, ",{v}").unwrap();
            }
        }
        out.push_str(if row.benign { ",2\n" } else { ",4\n" });
        id += rng.random_range(1..4000);
    }
    std::fs::write(path, out).unwrap();
}

const SEASON: &str = "\
sunny,green,mild,spring
rainy,green,mild,spring
cloudy,green,mild,spring
sunny,green,high,summer
cloudy,green,high,summer
rainy,green,high,summer
sunny,yellow,mild,autumn
cloudy,yellow,mild,autumn
rainy,leafless,mild,autumn
rainy,green,low,winter
cloudy,green,low,winter
";

const GOLF: &str = "\
sunny,85,85,weak,don't play
sunny,80,90,strong,don't play
overcast,83,86,weak,play
rainy,70,96,weak,play
rainy,68,80,weak,play
rainy,65,70,strong,don't play
overcast,64,65,strong,play
sunny,72,95,weak,don't play
sunny,69,70,weak,play
rainy,75,80,weak,play
sunny,75,70,strong,play
overcast,72,90,strong,play
overcast,81,75,weak,play
rainy,71,91,strong,don't play
";

fn main() {
    let root = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    let root = Path::new(&root);
    for sub in ["cancer", "season", "golf"] {
        std::fs::create_dir_all(root.join(sub)).unwrap();
    }
    write_cancer(&root.join("cancer/breast-cancer-wisconsin.csv"));
    std::fs::write(root.join("season/season.csv"), SEASON).unwrap();
    std::fs::write(root.join("golf/golf.csv"), GOLF).unwrap();
    println!("fixtures written under {}", root.display());
}
