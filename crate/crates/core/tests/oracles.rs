use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sortnet_core::canon::canonicalize;
use sortnet_core::huffman::{huffman_min, huffman_min_bruteforce};
use sortnet_core::oracle::{
    all_permutations, brute_force_canonical, exact_size, interior_by_thresholds, ExactSize,
};
use sortnet_core::subsume::subsumes;
use sortnet_core::{memo_min_size, BoolSeqSet, ChannelPermutation, Comparator, Search};

fn set_from_mask(width: usize, mask: u64) -> BoolSeqSet {
    BoolSeqSet::from_codes(width, (0..1u32 << width).filter(|c| mask >> c & 1 == 1)).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, width: usize, density: f64) -> BoolSeqSet {
    BoolSeqSet::from_codes(width, (0..1u32 << width).filter(|_| rng.gen_bool(density))).unwrap()
}

/// `B^w` pushed through random comparators.
fn random_well_behaved(rng: &mut ChaCha8Rng, width: usize, depth: usize) -> BoolSeqSet {
    let mut x = BoolSeqSet::full(width).unwrap();
    for _ in 0..depth {
        let i = rng.gen_range(0..width - 1);
        let j = rng.gen_range(i + 1..width);
        x = x.apply_comparator(Comparator::new(i, j).unwrap()).unwrap();
    }
    x
}

fn random_perm(rng: &mut ChaCha8Rng, width: usize) -> ChannelPermutation {
    let mut image: Vec<usize> = (0..width).collect();
    for k in (1..width).rev() {
        image.swap(k, rng.gen_range(0..=k));
    }
    ChannelPermutation::new(image).unwrap()
}

#[test]
fn interior_is_the_union_of_threshold_sets_exhaustively() {
    for width in 1..=4 {
        for mask in 0..1u64 << (1 << width) {
            let x = set_from_mask(width, mask);
            assert_eq!(x.interior(), interior_by_thresholds(&x), "{x:?}");
        }
    }
}

#[test]
fn interior_is_the_union_of_threshold_sets_at_width_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..300 {
        let x = random_set(&mut rng, 5, 0.3 + 0.6 * (round % 3) as f64 / 2.0);
        assert_eq!(x.interior(), interior_by_thresholds(&x), "{x:?}");
    }
}

#[test]
fn canonical_forms_agree_with_brute_force_on_width_three() {
    for mask in 0..1u64 << 8 {
        let x = set_from_mask(3, mask);
        for y in (0..1u64 << 8).step_by(7).map(|m| set_from_mask(3, m)) {
            let same = canonicalize(&x).set == canonicalize(&y).set;
            assert_eq!(same, brute_force_canonical(&x) == brute_force_canonical(&y));
        }
    }
}

#[test]
fn canonical_forms_are_orbit_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for width in 2..=6 {
        let perms = all_permutations(width);
        for _ in 0..6 {
            let x = random_set(&mut rng, width, 0.4);
            let cf = canonicalize(&x);
            assert_eq!(x.transform(&cf.perm, cf.negate).unwrap(), cf.set);
            for p in &perms {
                for b in [false, true] {
                    let y = x.transform(p, b).unwrap();
                    assert_eq!(canonicalize(&y).set, cf.set);
                }
            }
        }
    }
}

#[test]
fn subsumption_matches_exhaustive_transform_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut positives = 0;
    for width in 2..=5 {
        let perms = all_permutations(width);
        for _ in 0..150 {
            let y = random_set(&mut rng, width, 0.5);
            let x = if rng.gen_bool(0.5) {
                let keep: Vec<u32> = y.members().filter(|_| rng.gen_bool(0.7)).collect();
                let sub = BoolSeqSet::from_codes(width, keep).unwrap();
                sub.transform(&random_perm(&mut rng, width), rng.gen_bool(0.5))
                    .unwrap()
            } else {
                random_set(&mut rng, width, 0.3)
            };
            let brute = perms.iter().any(|p| {
                [false, true]
                    .into_iter()
                    .any(|b| x.transform(p, b).unwrap().is_subset(&y))
            });
            positives += brute as usize;
            assert_eq!(subsumes(&x, &y).unwrap(), brute, "{x:?} into {y:?}");
        }
    }
    assert!(positives > 100);
}

#[test]
fn memo_and_search_agree_with_exhaustive_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = ExactSize::new();
    let search = Search::new();
    for round in 0..200 {
        let width = 2 + round % 4;
        let depth = rng.gen_range(0..6);
        let x = random_well_behaved(&mut rng, width, depth);
        let memo = memo_min_size(&x).unwrap();
        assert_eq!(search.size_of(&x).unwrap(), memo, "{x:?}");
        assert_eq!(exact.size(&x), memo, "{x:?}");
    }
}

#[test]
fn huffman_matches_all_trees() {
    fn multisets(len: usize, min: u32, out: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if !out.is_empty() {
            f(out);
        }
        if out.len() == len {
            return;
        }
        for v in min..=4 {
            out.push(v);
            multisets(len, v, out, f);
            out.pop();
        }
    }
    let mut count = 0;
    multisets(6, 0, &mut Vec::new(), &mut |m| {
        count += 1;
        assert_eq!(
            huffman_min(m).unwrap(),
            huffman_min_bruteforce(m).unwrap(),
            "{m:?}"
        );
    });
    assert_eq!(count, 461);
}

#[test]
fn exact_sizes_of_small_cubes() {
    let sizes: Vec<u32> = (1..=4)
        .map(|n| exact_size(&BoolSeqSet::full(n).unwrap()))
        .collect();
    assert_eq!(sizes, [0, 1, 3, 5]);
}

proptest! {
    #[test]
    fn negation_and_transform_are_involutive(mask in any::<u64>(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = set_from_mask(6, mask);
        let p = random_perm(&mut rng, 6);
        prop_assert_eq!(x.negate().negate(), x.clone());
        let y = x.transform(&p, true).unwrap();
        prop_assert_eq!(y.len(), x.len());
        prop_assert_eq!(y.transform(&p.inverse(), true).unwrap(), x);
    }

    #[test]
    fn comparators_match_elementwise_sorting(mask in any::<u64>(), i in 0usize..6, d in 1usize..6) {
        let j = (i + d).min(5);
        prop_assume!(i < j);
        let x = set_from_mask(6, mask);
        let c = Comparator::new(i, j).unwrap();
        let expected = BoolSeqSet::from_codes(6, x.members().map(|v| {
            if v >> i & 1 == 1 && v >> j & 1 == 0 { v ^ (1 << i) ^ (1 << j) } else { v }
        })).unwrap();
        prop_assert_eq!(x.apply_comparator(c).unwrap(), expected);
    }

    #[test]
    fn pruned_interior_lies_in_the_pruned_set(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_well_behaved(&mut rng, 6, 4);
        for p in x.prunable_channels() {
            let interior = x.pruned_interior(p).unwrap();
            prop_assert!(interior.is_subset(&x.prune(p).unwrap()));
            prop_assert!(interior.is_well_behaved());
        }
    }

    #[test]
    fn codec_round_trips(mask in any::<u64>()) {
        let x = set_from_mask(6, mask);
        prop_assert_eq!(BoolSeqSet::from_bytes(6, &x.to_bytes()).unwrap(), x);
    }
}
