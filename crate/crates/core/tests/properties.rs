mod common;

use std::collections::BTreeMap;
use std::path::Path;

use common::{random_instance, random_resources, VOCAB};
use meteor_e::evalharness::{Dataset, LanguagePairData, ScoreMap};
use meteor_e::{
    align, generate_candidates, kendall_tau, oracle_threshold_sweep, score_from_stats, stem, tokenize, EmbeddingTable,
    Language, Meteor, MetricConfig, PairwiseJudgment, ParaphraseTable, Resources, SegmentStats, Stage, SynonymTable,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn stemming_reaches_a_fixpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let alphabet: Vec<char> = "abcdeéèfghiklmnoprstuüvyzäößçа".chars().collect();
    for lang in Language::ALL {
        for _ in 0..10_000 {
            let n = rng.gen_range(1..12);
            let word: String = (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
            let once = stem(&word, lang);
            assert_eq!(stem(&once, lang), once, "{lang:?} {word}");
        }
    }
}

proptest! {
    #[test]
    fn tokenizing_joined_tokens_is_stable(text in "[a-zA-Zé' ,.!?-]{0,60}") {
        for lang in [Language::En, Language::Fr] {
            let first = tokenize(&text, lang);
            let second = tokenize(&first.joined(), lang);
            prop_assert_eq!(first.surfaces().collect::<Vec<_>>(), second.surfaces().collect::<Vec<_>>());
        }
    }

    #[test]
    fn cosine_is_symmetric_and_bounded(
        a in proptest::collection::vec(-5.0f64..5.0, 4),
        b in proptest::collection::vec(-5.0f64..5.0, 4),
    ) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-6) && b.iter().any(|x| x.abs() > 1e-6));
        let table = EmbeddingTable::from_vectors(4, [("a", a), ("b", b)]).unwrap();
        let ab = table.cosine("a", "b").unwrap();
        prop_assert_eq!(ab, table.cosine("b", "a").unwrap());
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn score_stays_in_unit_interval(
        hyp_len in 1usize..40,
        ref_len in 1usize..40,
        frac in 0.0f64..=1.0,
        chunk_frac in 0.0f64..=1.0,
    ) {
        let matches = ((hyp_len.min(ref_len) as f64) * frac) as usize;
        let chunks = if matches == 0 { 0 } else { 1 + ((matches - 1) as f64 * chunk_frac) as usize };
        let stats = SegmentStats {
            weighted_matches: matches as f64,
            covered_hyp: matches,
            covered_ref: matches,
            hyp_len,
            ref_len,
            chunks,
            matches,
        };
        let s = score_from_stats(&stats, &MetricConfig::from_preset(meteor_e::Preset::Baseline, Language::En));
        prop_assert!((0.0..=1.0).contains(&s.score));
        prop_assert!(s.score <= s.fmean + 1e-12);
    }
}

#[test]
fn filtering_equals_regenerating() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let mut inst = random_instance(&mut rng, 10);
        let low = rng.gen_range(-1.0..0.5f64);
        let high = low + rng.gen_range(0.0..0.5f64);
        inst.config.threshold = Some(low);
        let base = generate_candidates(&inst.hyp, &inst.reference, &inst.config, &inst.resources).unwrap();
        inst.config.threshold = Some(high);
        let direct = generate_candidates(&inst.hyp, &inst.reference, &inst.config, &inst.resources).unwrap();
        assert_eq!(base.with_threshold(high), direct);
    }
}

#[test]
fn more_stages_never_cover_less() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 8);
        let mut previous = 0;
        for k in 1..=Stage::ALL.len() {
            let mut config = inst.config.clone();
            config.stages = Stage::ALL[..k].iter().copied().collect();
            let set = generate_candidates(&inst.hyp, &inst.reference, &config, &inst.resources).unwrap();
            let covered = align(&set).covered();
            assert!(covered >= previous, "stages {:?}", config.stages);
            previous = covered;
        }
    }
}

fn random_tau_case(rng: &mut ChaCha8Rng) -> (Vec<PairwiseJudgment>, ScoreMap) {
    let systems = ["s1", "s2", "s3", "s4"];
    let mut scores = ScoreMap::new();
    for sys in systems {
        for seg in 1..=5u64 {
            scores.insert((sys.to_string(), seg), (rng.gen_range(0..6) as f64) / 5.0);
        }
    }
    let judgments = (0..rng.gen_range(1..30))
        .map(|_| {
            let a = rng.gen_range(0..systems.len());
            let b = (a + rng.gen_range(1..systems.len())) % systems.len();
            PairwiseJudgment {
                language_pair: "xx-yy".into(),
                segment_id: rng.gen_range(1..=5),
                better_system: systems[a].into(),
                worse_system: systems[b].into(),
            }
        })
        .collect();
    (judgments, scores)
}

#[test]
fn tau_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let (mut judgments, scores) = random_tau_case(&mut rng);
        let t = kendall_tau(&judgments, &scores).unwrap();
        assert_eq!(t.concordant + t.discordant, judgments.len());
        assert!((-1.0..=1.0).contains(&t.tau));

        let monotone: ScoreMap = scores.iter().map(|(k, v)| (k.clone(), (3.0 * v).exp())).collect();
        assert_eq!(kendall_tau(&judgments, &monotone).unwrap(), t);

        judgments.reverse();
        assert_eq!(kendall_tau(&judgments, &scores).unwrap(), t);
    }
}

#[test]
fn synonym_table_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let table = random_resources(&mut rng).synonyms.unwrap();
        let text = table.serialize();
        let back = SynonymTable::parse(&text, Language::Fr, Path::new("mem")).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.serialize(), text);
    }
}

#[test]
fn paraphrase_table_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let table = random_resources(&mut rng).paraphrases.unwrap();
        let text = table.serialize();
        let back = ParaphraseTable::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, table);
        for a in VOCAB {
            let phrase = vec![a.to_string()];
            assert_eq!(back.partners(&phrase), table.partners(&phrase));
        }
    }
}

#[test]
fn sweep_best_is_curve_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let resources = random_resources(&mut rng);
        let mut config = MetricConfig::with_stages(Language::Fr, [Stage::Exact, Stage::Vector]);
        config.threshold = Some(0.5);
        let meteor = Meteor::new(
            config,
            Resources {
                embeddings: resources.embeddings,
                ..Resources::default()
            },
        )
        .unwrap();

        let systems = ["a", "b", "c"];
        let n = 6;
        let sentence = |rng: &mut ChaCha8Rng| common::random_sentence(rng, 6);
        let mut data = LanguagePairData {
            references: (0..n).map(|_| sentence(&mut rng)).collect(),
            systems: BTreeMap::new(),
        };
        for sys in systems {
            data.systems.insert(sys.into(), (0..n).map(|_| sentence(&mut rng)).collect());
        }
        let judgments = (0..20)
            .map(|_| {
                let a = rng.gen_range(0..3);
                PairwiseJudgment {
                    language_pair: "fr-en".into(),
                    segment_id: rng.gen_range(1..=n as u64),
                    better_system: systems[a].into(),
                    worse_system: systems[(a + 1) % 3].into(),
                }
            })
            .collect();
        let dataset = Dataset {
            pairs: BTreeMap::from([("fr-en".to_string(), data)]),
            judgments,
        };
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let result = oracle_threshold_sweep(&dataset, &meteor, &grid).unwrap();
        let max = result.grid.iter().map(|p| p.average_tau).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(result.best_tau, max);
        let largest_best = result.grid.iter().filter(|p| p.average_tau == max).map(|p| p.threshold).next_back();
        assert_eq!(Some(result.best_threshold), largest_best);
    }
}
