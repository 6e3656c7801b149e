mod common;

use std::collections::BTreeMap;

use common::*;
use morphkit::metrics::{
    assemble_scenario, plan_comparisons, BonaFideImage, MorphImage, PairingRules, ScenarioConfig,
    ScenarioMode,
};
use morphkit::scoring::{build_references, cosine_score, score_comparisons, Embedding, Label};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact `cos^2` and sign of the dot product.
fn exact_cos2(u: &[f64], v: &[f64]) -> (BigRational, bool) {
    let dot = u.iter().zip(v).fold(BigRational::zero(), |s, (a, b)| s + q(*a) * q(*b));
    let nu = u.iter().fold(BigRational::zero(), |s, a| s + q(*a) * q(*a));
    let nv = v.iter().fold(BigRational::zero(), |s, a| s + q(*a) * q(*a));
    (&dot * &dot / (nu * nv), !dot.is_negative())
}

#[test]
fn cosine_matches_exact_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc05);
    for _ in 0..500 {
        let d = rng.gen_range(1..64);
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let got = cosine_score(&u, &v).unwrap();
        let (c2, nonneg) = exact_cos2(&u, &v);
        let c2 = c2.to_f64().unwrap();
        let want = if nonneg { c2.sqrt() } else { -c2.sqrt() };
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((-1.0..=1.0).contains(&got));
    }
    // Parallel vectors clamp to exactly one.
    assert_eq!(cosine_score(&[1e-3, 3.0], &[2e-3, 6.0]).unwrap(), 1.0);
}

fn emb(id: &str, v: Vec<f64>) -> Embedding {
    Embedding { image_id: id.into(), model_tag: "t".into(), vector: v }
}

#[test]
fn scenario_counts_match_enumeration() {
    // Four identities with three images each, two morphs.
    let subjects = ["p", "q", "r", "s"];
    let mut bona_fide = Vec::new();
    let mut embeddings = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for s in subjects {
        for i in 0..3 {
            let id = format!("{s}{i}");
            bona_fide.push(BonaFideImage { subject_id: s.into(), image_id: id.clone() });
            embeddings.push(emb(&id, (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()));
        }
    }
    let morphs = vec![
        MorphImage { image_id: "m_pq".into(), subjects: vec!["p".into(), "q".into()] },
        MorphImage { image_id: "m_rs".into(), subjects: vec!["r".into(), "s".into()] },
    ];
    for m in &morphs {
        embeddings.push(emb(&m.image_id, (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()));
    }

    for (mode, n_morph_rows) in [
        // Each morph reference against the 2 probe images of both contributors.
        (ScenarioMode::MorphsAsReferences, 2 * 2 * 2),
        // Each morph probe against both contributors' references.
        (ScenarioMode::MorphsAsProbes, 2 * 2),
    ] {
        let plan = plan_comparisons(&bona_fide, &morphs, mode, PairingRules::default()).unwrap();
        let mut by_label: BTreeMap<Label, usize> = BTreeMap::new();
        for p in &plan.pairing {
            *by_label.entry(p.label).or_default() += 1;
        }
        // One enrolled image per subject, two probes each.
        assert_eq!(by_label[&Label::Genuine], 4 * 2);
        assert_eq!(by_label[&Label::Impostor], 4 * 3 * 2);
        assert_eq!(by_label[&Label::Morph], n_morph_rows);

        let refs = build_references(&plan.enrollment, &embeddings).unwrap();
        let rows = score_comparisons(&refs, &embeddings, &plan.pairing).unwrap();
        let config = ScenarioConfig::new(mode);
        let (set, counts) = assemble_scenario(&rows, &config).unwrap();
        assert_eq!(counts.n_genuine, 8);
        assert_eq!(counts.n_impostor, 24);
        assert_eq!(counts.n_morphs, 2);
        assert_eq!(counts.n_morph_comparisons, n_morph_rows);
        assert_eq!(set.morph_attacks.len(), n_morph_rows);
        match mode {
            ScenarioMode::MorphsAsReferences => {
                assert_eq!((counts.n_morph_references, counts.n_morph_probes), (2, 8));
            }
            ScenarioMode::MorphsAsProbes => {
                assert_eq!((counts.n_morph_references, counts.n_morph_probes), (4, 2));
            }
        }

        // Wrong-mode assembly is rejected.
        let other = match mode {
            ScenarioMode::MorphsAsReferences => ScenarioMode::MorphsAsProbes,
            ScenarioMode::MorphsAsProbes => ScenarioMode::MorphsAsReferences,
        };
        assert!(assemble_scenario(&rows, &ScenarioConfig::new(other)).is_err());
    }
}

#[test]
fn reference_is_mean_of_enrolled_embeddings() {
    let es = vec![emb("a", vec![1.0, 0.0]), emb("b", vec![0.0, 1.0]), emb("c", vec![5.0, 5.0])];
    let enrol = vec![("x".to_string(), "a".to_string()), ("x".to_string(), "b".to_string())];
    let refs = build_references(&enrol, &es).unwrap();
    assert_eq!(refs[0].mean_vector, vec![0.5, 0.5]);
    assert_eq!(refs[0].n_images, 2);
    let s = cosine_score(&refs[0].mean_vector, &es[2].vector).unwrap();
    assert!((s - 1.0).abs() < 1e-15);
}
