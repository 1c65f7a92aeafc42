use std::collections::BTreeSet;

use gdf_core::corpus::{builtin, random_word, CLASSICAL};
use gdf_core::linalg::{left_nullspace, RationalMatrix};
use gdf_core::moves::{applicable_moves, apply_move, random_walk, trial_rng, MoveKind};
use gdf_core::relators::{generate_virtual_relators, project, Flavor, Template};
use gdf_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word(n: usize, seed: u64) -> GaussWord {
    random_word(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn arb_word(max: usize) -> impl Strategy<Value = GaussWord> {
    (0..=max, any::<u64>()).prop_map(|(n, s)| word(n, s))
}

/// Renames letters by an arbitrary injection into larger labels.
fn relabel_by(w: &GaussWord, seed: u64) -> GaussWord {
    let letters: Vec<u32> = w.letters().into_iter().collect();
    let mut targets: Vec<u32> = (1..=letters.len() as u32).map(|i| i * 7 + (seed % 5) as u32).collect();
    targets.rotate_left((seed as usize) % letters.len().max(1));
    let tokens = w
        .tokens()
        .iter()
        .map(|t| {
            let k = letters.iter().position(|&l| l == t.letter).unwrap();
            Token { letter: targets[k], ..*t }
        })
        .collect();
    GaussWord::new(tokens, w.is_based()).unwrap()
}

fn brute_count(pattern: &CanonicalDiagram, target: &GaussWord) -> i64 {
    let letters: Vec<u32> = target.letters().into_iter().collect();
    let mut total = 0;
    for mask in 0u32..(1 << letters.len()) {
        if mask.count_ones() as usize != pattern.arrow_count() {
            continue;
        }
        let keep: BTreeSet<u32> = (0..letters.len()).filter(|i| mask >> i & 1 == 1).map(|i| letters[i]).collect();
        let sub = target.restrict(&keep);
        if sub.canonical(pattern.is_signed()) == *pattern {
            total += sub.sign_product();
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_text_round_trips(w in arb_word(6)) {
        let c = w.canonical_based().unwrap();
        let again = GaussWord::parse(&c.text()).unwrap().canonical_based().unwrap();
        prop_assert_eq!(again, c);
        prop_assert_eq!(GaussWord::parse(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn cyclic_form_ignores_rotation(w in arb_word(6), k in -20i64..20) {
        prop_assume!(!w.is_empty());
        prop_assert_eq!(w.rotate_base(k).unwrap().canonical_cyclic(), w.canonical_cyclic());
    }

    #[test]
    fn rotations_compose(w in arb_word(5), a in -12i64..12, b in -12i64..12) {
        prop_assume!(!w.is_empty());
        prop_assert_eq!(w.rotate_base(a).unwrap().rotate_base(b).unwrap(), w.rotate_base(a + b).unwrap());
        prop_assert_eq!(w.rotate_base(w.len() as i64).unwrap(), w.clone());
    }

    #[test]
    fn operations_respect_isomorphism(w in arb_word(6), s in any::<u64>()) {
        let v = relabel_by(&w, s);
        prop_assert_eq!(v.canonical_based().unwrap(), w.canonical_based().unwrap());
        prop_assert_eq!(v.reverse().canonical_based().unwrap(), w.reverse().canonical_based().unwrap());
        prop_assert_eq!(w.reverse().reverse(), w.clone());
        if !w.is_empty() {
            // Token positions survive renaming, so the arrow at position 0 is the same in both.
            let first_w = BTreeSet::from([w.tokens()[0].letter]);
            let first_v = BTreeSet::from([v.tokens()[0].letter]);
            prop_assert_eq!(
                w.delete_arrows(&first_w).unwrap().canonical_based().unwrap(),
                v.delete_arrows(&first_v).unwrap().canonical_based().unwrap()
            );
        }
    }

    #[test]
    fn connected_words_have_no_isolated_arrow(w in arb_word(6)) {
        if w.arrow_count() >= 2 && w.interlacement_connected() {
            prop_assert!(!w.has_isolated_arrow());
        }
    }

    #[test]
    fn realizability_ignores_rotation_and_reversal(w in arb_word(6), k in 0i64..12) {
        prop_assume!(!w.is_empty());
        let r = w.is_realizable();
        prop_assert_eq!(w.rotate_base(k).unwrap().is_realizable(), r);
        prop_assert_eq!(w.reverse().is_realizable(), r);
    }

    #[test]
    fn counts_match_brute_force(w in arb_word(6), i in 0usize..48) {
        let b = degree3_basis();
        let p = b.get(i);
        prop_assert_eq!(count_occurrences(p, &w).unwrap(), brute_count(p, &w));
    }

    #[test]
    fn counts_are_sums_of_tilde_values(w in arb_word(5), i in 0usize..48) {
        let b = degree3_basis();
        let p = b.get(i);
        let letters: Vec<u32> = w.letters().into_iter().collect();
        let mut total = 0;
        for mask in 0u32..(1 << letters.len()) {
            let keep: BTreeSet<u32> = (0..letters.len()).filter(|j| mask >> j & 1 == 1).map(|j| letters[j]).collect();
            total += tilde_eval(p, &w.restrict(&keep).canonical(true)).unwrap();
        }
        prop_assert_eq!(count_occurrences(p, &w).unwrap(), total);
    }

    #[test]
    fn unsigned_counts_sum_signed_refinements(w in arb_word(6), i in 16usize..48) {
        let b = degree3_basis();
        let p = b.get(i);
        let mut total = 0;
        for signs in 0u32..8 {
            let tokens: Vec<Token> = p.tokens().iter().map(|t| {
                let sign = if signs >> (t.letter - 1) & 1 == 1 { Sign::Minus } else { Sign::Plus };
                Token { sign, ..*t }
            }).collect();
            let refined = GaussWord::new(tokens, true).unwrap().canonical_based().unwrap();
            total += count_occurrences(&refined, &w).unwrap();
        }
        prop_assert_eq!(count_occurrences(p, &w).unwrap(), total);
    }

    #[test]
    fn connected_counts_are_additive(a in arb_word(4), b in arb_word(4), i in 0usize..48) {
        let basis = degree3_basis();
        let p = basis.get(i);
        let sum = a.connected_sum(&b).unwrap();
        prop_assert_eq!(count_occurrences(p, &sum).unwrap(), count_occurrences(p, &a).unwrap() + count_occurrences(p, &b).unwrap());
    }

    #[test]
    fn dual_evaluation_is_linear(i in 0usize..84, j in 0usize..84, k in -3i64..4, c in proptest::collection::vec(-2i64..3, 48)) {
        let rs = generate_virtual_relators();
        let b = degree3_basis();
        let f = GaussFormula::new("f", b.entries().to_vec(), c).unwrap();
        let (r, s) = (rs.relators()[i].sum(), rs.relators()[j].sum());
        let mut combined = r.clone();
        combined.add(&s.scaled(k)).unwrap();
        prop_assert_eq!(
            tilde_eval_sum(&f, &combined).unwrap(),
            tilde_eval_sum(&f, r).unwrap() + k * tilde_eval_sum(&f, s).unwrap()
        );
    }

    #[test]
    fn projection_keeps_window_values(i in any::<prop::sample::Index>(), e in 0usize..48, wii in any::<bool>()) {
        let t = if wii { Template::wii() } else { Template::siii() };
        let placements = t.placements(true, true);
        let r = t.instantiate(&placements[i.index(placements.len())]).unwrap();
        let b = degree3_basis();
        let p = project(&r, 2, 3, true);
        let f = GaussFormula::new("e", vec![b.get(e).clone()], vec![1]).unwrap();
        prop_assert_eq!(tilde_eval_sum(&f, r.sum()).unwrap(), tilde_eval_sum(&f, p.sum()).unwrap());
    }

    #[test]
    fn moves_have_inverses(w in arb_word(4), pick in any::<prop::sample::Index>()) {
        let sites = applicable_moves(&w, Flavor::Virtual);
        let site = &sites[pick.index(sites.len())];
        let out = apply_move(&w, site).unwrap();
        let back = applicable_moves(&out, Flavor::Virtual)
            .into_iter()
            .filter(|s| s.kind == site.kind.inverse())
            .any(|s| apply_move(&out, &s).unwrap().canonical_based().unwrap() == w.canonical_based().unwrap());
        prop_assert!(back, "no inverse of {} on {}", site, out);
    }

    #[test]
    fn kinks_leave_connected_counts_alone(w in arb_word(5), pick in any::<prop::sample::Index>()) {
        let kinks: Vec<_> = applicable_moves(&w, Flavor::Virtual)
            .into_iter()
            .filter(|s| matches!(s.kind, MoveKind::RiInsert { .. } | MoveKind::RiDelete { .. }))
            .collect();
        let site = &kinks[pick.index(kinks.len())];
        let out = apply_move(&w, site).unwrap();
        let b = degree3_basis();
        let counter = BasisCounter::new(b.entries()).unwrap();
        prop_assert_eq!(counter.counts(&out), counter.counts(&w));
    }

    #[test]
    fn classical_walks_stay_realizable(seed in any::<u64>(), k in 0usize..5) {
        let start = builtin(CLASSICAL[k]).unwrap().word;
        let walk = random_walk(&start, 12, &mut trial_rng(seed, 0), Flavor::Classical).unwrap();
        prop_assert!(walk.words.iter().all(|w| w.is_realizable()));
    }

    #[test]
    fn nullspace_vectors_annihilate(rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 4), 1..7), scale in 1i64..5) {
        let m = RationalMatrix::from_integer_rows(&rows, 4).unwrap();
        let ns = left_nullspace(&m);
        prop_assert_eq!(ns.len(), rows.len() - m.rank());
        if !ns.is_empty() {
            prop_assert!(ns.as_matrix().mul(&m).unwrap().is_zero());
        }
        for v in ns.vectors() {
            let g = v.iter().fold(0i64, |g, &x| num_gcd(g, x));
            prop_assert_eq!(g, 1);
        }
        let scaled: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
        let again = left_nullspace(&RationalMatrix::from_integer_rows(&scaled, 4).unwrap());
        prop_assert_eq!(again.vectors(), ns.vectors());
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}
