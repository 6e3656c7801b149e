//! Threshold at FMR = 0.1 %, then FNMR and MMPMR under both acceptance
//! rules, on simulated score distributions.
//!
//!     cargo run --example vulnerability_eval

use morphkit::metrics::{
    emit_report, evaluate, MmpmrRule, MorphScore, ReportEntry, ReportFormat, ScenarioConfig,
    ScenarioMode, ScoreSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simulate(rng: &mut ChaCha8Rng, morph_strength: f64) -> ScoreSet {
    let mut noise = |c: f64, w: f64| c + w * (rng.gen::<f64>() + rng.gen::<f64>() - 1.0);
    let genuine = (0..2000).map(|_| noise(0.75, 0.2)).collect();
    let impostor = (0..20000).map(|_| noise(0.1, 0.35)).collect();
    let mut morph_attacks = Vec::new();
    for m in 0..300 {
        for s in ["a", "b"] {
            morph_attacks.push(MorphScore::new(format!("m{m}"), s, noise(morph_strength, 0.3)));
        }
    }
    ScoreSet {
        genuine,
        impostor,
        morph_attacks,
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut entries = Vec::new();
    for (model, strength) in [("strong-frs", 0.35), ("weak-frs", 0.5)] {
        for (mode, shift) in [(ScenarioMode::MorphsAsReferences, 0.0), (ScenarioMode::MorphsAsProbes, -0.03)] {
            let set = simulate(&mut rng, strength + shift);
            for rule in [MmpmrRule::Min, MmpmrRule::Any] {
                let config = ScenarioConfig { rule, ..ScenarioConfig::new(mode) };
                let r = evaluate(&set, &config).expect("non-empty scores");
                println!(
                    "{model:10} {mode:10} rule={rule}: threshold={:.4} fmr={:.4} fnmr={:.4} mmpmr={:.4}",
                    r.threshold, r.fmr_at_threshold, r.fnmr_at_threshold, r.mmpmr
                );
                if rule == MmpmrRule::Min {
                    entries.push(ReportEntry {
                        tool: "simulated".into(),
                        model: model.into(),
                        dataset: "toy".into(),
                        mode,
                        report: r,
                    });
                }
            }
        }
    }
    println!();
    print!("{}", emit_report(&entries, ReportFormat::Text));
}
