//! Pair selection from a subject manifest under the gender, ethnicity and
//! glasses constraints.
//!
//!     cargo run --example pair_protocol

use morphkit::protocol::{generate_pairs, parse_manifest, PairConstraints};

const MANIFEST: &str = "\
subject_id,image_id,gender,ethnicity,glasses,image_path,landmarks_path
s1,s1_a,F,asian,0,s1_a.png,s1_a.txt
s1,s1_b,F,asian,0,s1_b.png,s1_b.txt
s2,s2_a,F,asian,1,s2_a.png,s2_a.txt
s3,s3_a,F,asian,1,s3_a.png,s3_a.txt
s4,s4_a,M,asian,0,s4_a.png,s4_a.txt
s5,s5_a,F,white,0,s5_a.png,s5_a.txt
s6,s6_a,F,asian,0,s6_a.png,s6_a.txt
";

fn main() {
    let records = parse_manifest(csv::Reader::from_reader(MANIFEST.as_bytes()), std::path::Path::new("."))
        .expect("manifest parses");
    for all in [false, true] {
        let pairs = generate_pairs(
            &records,
            PairConstraints {
                all_image_combinations: all,
            },
        );
        println!("all_image_combinations = {all}: {} pairs", pairs.len());
        for p in &pairs {
            println!("  {} + {}", p.a.image_id, p.b.image_id);
        }
    }
}
