use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;
use usi_core::competitors::{substring_hk_mine, topk_trie_mine, EngineKind, ShkParams};
use usi_core::suffix::SuffixArrayIndex;
use usi_core::text::WeightedText;
use usi_core::topk::{approximate_top_k, build_tuning_tables, exact_top_k, ApproxConfig, LceStrategy};
use usi_core::usi::{deserialize, serialize, BuildOptions, FallbackIndex, UsiIndex};
use usi_core::utility::{global_utility_bruteforce, utilities_agree, GlobalOp, LocalOp, UtilitySpec};

fn naive_count(text: &[u8], p: &[u8]) -> u64 {
    text.windows(p.len()).filter(|w| *w == p).count() as u64
}

/// Frequencies of the K most frequent distinct substrings, descending.
fn brute_top_k(text: &[u8], k: usize) -> Vec<u64> {
    let mut counts: HashMap<&[u8], u64> = HashMap::new();
    for i in 0..text.len() {
        for j in i + 1..=text.len() {
            *counts.entry(&text[i..j]).or_default() += 1;
        }
    }
    let mut f: Vec<u64> = counts.into_values().collect();
    f.sort_unstable_by(|a, b| b.cmp(a));
    f.truncate(k);
    f
}

fn text_strategy(max_n: usize) -> impl Strategy<Value = Vec<u8>> {
    (1u8..=4).prop_flat_map(move |sigma| prop::collection::vec(b'a'..b'a' + sigma, 1..=max_n))
}

fn weighted_strategy(max_n: usize) -> impl Strategy<Value = WeightedText> {
    text_strategy(max_n).prop_flat_map(|text| {
        let n = text.len();
        prop::collection::vec(-2.0f64..4.0, n).prop_map(move |w| WeightedText::new(text.clone(), w).unwrap())
    })
}

fn spec_strategy() -> impl Strategy<Value = UtilitySpec> {
    (
        prop_oneof![Just(LocalOp::Sum), Just(LocalOp::Mean)],
        prop_oneof![Just(GlobalOp::Sum), Just(GlobalOp::Min), Just(GlobalOp::Max), Just(GlobalOp::Avg)],
    )
        .prop_map(|(l, g)| UtilitySpec::new(l, g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_engine_matches_bruteforce(
        wt in weighted_strategy(80),
        spec in spec_strategy(),
        k_frac in 0.0f64..1.5,
        starts in prop::collection::vec((any::<prop::sample::Index>(), 1usize..12), 1..30),
    ) {
        let n = wt.len();
        let k = (k_frac * n as f64) as usize;
        let base = Arc::new(FallbackIndex::build(&wt, spec).unwrap());
        let usi = UsiIndex::build_on(base.clone(), &BuildOptions::exact(k)).unwrap();
        let mut baselines: Vec<_> = EngineKind::ALL[1..].iter().map(|e| e.baseline(base.clone(), k, 5).unwrap()).collect();
        let mut patterns: Vec<Vec<u8>> = starts
            .iter()
            .map(|(i, len)| {
                let s = i.index(n);
                wt.text()[s..(s + len).min(n)].to_vec()
            })
            .collect();
        patterns.push(b"zz".to_vec());
        // Query everything twice so the caches answer some of them.
        for p in patterns.iter().chain(patterns.iter()) {
            let expected = global_utility_bruteforce(&wt, &spec, p);
            prop_assert!(utilities_agree(usi.query(p).unwrap(), expected, 1e-9));
            for b in baselines.iter_mut() {
                prop_assert!(utilities_agree(b.query(p).unwrap(), expected, 1e-9), "{}", b.name());
            }
        }
    }

    #[test]
    fn exact_miner_matches_enumeration(text in text_strategy(120), k in 1usize..200) {
        let idx = SuffixArrayIndex::build(&text).unwrap();
        let tables = build_tuning_tables(&idx, Default::default());
        let mut got: Vec<u64> = exact_top_k(&tables, k).iter().map(|t| t.frequency() as u64).collect();
        got.sort_unstable_by(|a, b| b.cmp(a));
        prop_assert_eq!(got, brute_top_k(&text, k));
    }

    #[test]
    fn approximate_miner_never_overcounts(text in text_strategy(300), k in 1usize..60, s in 1usize..9, fingerprint in any::<bool>()) {
        let strategy = if fingerprint { LceStrategy::FingerprintBinarySearch } else { LceStrategy::DirectCompare };
        let out = approximate_top_k(&text, k, &ApproxConfig { s: Some(s), strategy, ..Default::default() });
        prop_assert!(out.len() <= k);
        for e in &out {
            prop_assert!(e.f >= 1 && e.f <= naive_count(&text, e.substring(&text)));
        }
        if s == 1 {
            let mut got: Vec<u64> = out.iter().map(|e| e.f).collect();
            got.sort_unstable_by(|a, b| b.cmp(a));
            prop_assert_eq!(got, brute_top_k(&text, k));
        }
    }

    #[test]
    fn top_k_trie_undercounts_within_budget(text in text_strategy(200), k in 1usize..40) {
        let out = topk_trie_mine(&text, k);
        prop_assert!(out.len() <= k);
        for e in &out {
            prop_assert!(e.f <= naive_count(&text, e.substring(&text)));
        }
    }

    #[test]
    fn substring_hk_reports_at_most_k_real_substrings(text in text_strategy(200), k in 1usize..40) {
        let out = substring_hk_mine(&text, k, &ShkParams::default());
        prop_assert!(out.len() <= k);
        for e in &out {
            prop_assert!(e.len >= 1 && e.j + e.len <= text.len());
        }
    }

    #[test]
    fn serialization_preserves_answers(wt in weighted_strategy(60), spec in spec_strategy(), k in 0usize..80, approx in any::<bool>()) {
        let opts = if approx {
            BuildOptions::approx(k, ApproxConfig { s: Some(3), ..Default::default() })
        } else {
            BuildOptions::exact(k)
        };
        let idx = UsiIndex::build(&wt, spec, &opts).unwrap();
        let mut bytes = Vec::new();
        serialize(&idx, &mut bytes).unwrap();
        let back = deserialize(bytes.as_slice()).unwrap();
        let mut again = Vec::new();
        serialize(&back, &mut again).unwrap();
        prop_assert_eq!(&bytes, &again);
        let text = wt.text();
        for i in 0..text.len() {
            for j in i + 1..=(i + 6).min(text.len()) {
                let (a, b) = (idx.query(&text[i..j]).unwrap(), back.query(&text[i..j]).unwrap());
                prop_assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
            }
        }
    }
}
