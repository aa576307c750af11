//! Randomized properties cross-checking the criterion, the construction,
//! and the exhaustive solver against each other.

use proptest::prelude::*;

use linesum::construct::{build, build_traced, replay, switch_repair, verify};
use linesum::linesum::{compatible, compatible_2d, maximal_matrix, maximal_profile};
use linesum::oracle::{solve, SearchBudget};
use linesum::symmetric::{build_symmetric, check_symmetric, is_symmetric};
use linesum::tensor::{binary_representation, from_binary_representation, iter_lines};
use linesum::{LineSumArray, Shape, Tensor, Verdict};

/// A random shape together with a random tensor on it.
fn tensor_strategy(max_d: usize, max_n: usize, max_q: u32) -> impl Strategy<Value = Tensor> {
    (2..=max_d, 2..=max_q)
        .prop_flat_map(move |(d, q)| {
            proptest::collection::vec(1..=max_n, d).prop_map(move |dims| (dims, q))
        })
        .prop_flat_map(|(dims, q)| {
            let shape = Shape::new(dims, q).unwrap();
            let cells = shape.cells();
            proptest::collection::vec(0..q, cells)
                .prop_map(move |entries| Tensor::from_entries(shape.clone(), entries).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binary_representation_round_trips(m in tensor_strategy(4, 4, 4)) {
        let b = binary_representation(&m);
        prop_assert_eq!(from_binary_representation(&b).unwrap(), m);
    }

    #[test]
    fn line_sums_are_compatible_and_rebuildable(m in tensor_strategy(4, 4, 4)) {
        let s = LineSumArray::from_tensor(&m);
        prop_assert!(compatible(&s).is_compatible());
        let built = build(&s).unwrap();
        prop_assert!(verify(&built, &s).unwrap());
    }

    #[test]
    fn traces_replay_to_the_built_tensor(m in tensor_strategy(3, 3, 3)) {
        let s = LineSumArray::from_tensor(&m);
        let (built, trace) = build_traced(&s).unwrap();
        prop_assert_eq!(replay(&s, &trace).unwrap(), built);
    }

    #[test]
    fn maximal_profile_matches_its_matrix(
        r in proptest::collection::vec(0u64..=9, 1..=5),
        q in 2u32..=4,
    ) {
        let n2 = 5usize;
        let r: Vec<u64> = r.into_iter().map(|v| v.min(n2 as u64 * (q - 1) as u64)).collect();
        let profile = maximal_profile(&r, n2, q).unwrap();
        // non-increasing, total-preserving
        prop_assert!(profile.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(profile.iter().sum::<u64>(), r.iter().sum::<u64>());
        // equals the column sums of the packed matrix
        let shape = Shape::new(vec![r.len(), n2], q).unwrap();
        let s = LineSumArray::new(shape, vec![profile.clone(), r.clone()]).unwrap();
        let m = maximal_matrix(&s, 2).unwrap();
        let sums = LineSumArray::from_tensor(&m);
        prop_assert_eq!(sums.axis_sums(1), &profile[..]);
    }

    #[test]
    fn two_dim_verdict_matches_the_oracle(
        r in proptest::collection::vec(0u64..=6, 1..=3),
        c in proptest::collection::vec(0u64..=6, 1..=3),
        q in 2u32..=3,
    ) {
        let cap_r = c.len() as u64 * (q - 1) as u64;
        let cap_c = r.len() as u64 * (q - 1) as u64;
        let r: Vec<u64> = r.into_iter().map(|v| v.min(cap_r)).collect();
        let c: Vec<u64> = c.into_iter().map(|v| v.min(cap_c)).collect();
        let shape = Shape::new(vec![r.len(), c.len()], q).unwrap();
        let s = LineSumArray::new(shape, vec![c.clone(), r.clone()]).unwrap();
        let exists = solve(&s, &SearchBudget::default()).unwrap().is_some();
        match compatible_2d(&r, &c, q) {
            Verdict::Compatible => prop_assert!(exists),
            Verdict::Incompatible(w) => {
                prop_assert!(!exists);
                prop_assert!(linesum::linesum::verify_witness(&s, &w));
            }
            Verdict::Malformed(_) => prop_assert!(!exists),
        }
    }

    #[test]
    fn symmetric_tensors_round_trip(
        n in 1usize..=3,
        d in 2usize..=3,
        q in 2u32..=3,
        seed in proptest::collection::vec(0u32..4, 64),
    ) {
        let shape = Shape::new(vec![n; d], q).unwrap();
        // symmetrize an arbitrary entry table by sampling at sorted coords
        let entries: Vec<u32> = shape
            .iter_coords()
            .map(|c| {
                let mut key = c.clone();
                key.sort_unstable();
                let idx = key.iter().fold(0usize, |acc, &k| acc * 4 + k) % seed.len();
                seed[idx] % q
            })
            .collect();
        let m = Tensor::from_entries(shape, entries).unwrap();
        prop_assert!(is_symmetric(&m));
        let s = LineSumArray::from_tensor(&m);
        prop_assert!(check_symmetric(&s));
        let built = build_symmetric(&s).unwrap();
        prop_assert!(is_symmetric(&built));
        prop_assert!(verify(&built, &s).unwrap());
    }

    #[test]
    fn switch_repair_is_sound(
        m in tensor_strategy(3, 3, 3),
        hi_seed in proptest::collection::vec(0u32..4, 128),
    ) {
        let q1 = m.shape().q() - 1;
        let lo = vec![0u32; m.shape().cells()];
        let hi: Vec<u32> = (0..m.shape().cells())
            .map(|i| hi_seed[i % hi_seed.len()].min(q1))
            .collect();
        if let Ok(fixed) = switch_repair(&m, &lo, &hi) {
            // inside the box, every line sum untouched
            for (e, (&l, &h)) in fixed.entries().iter().zip(lo.iter().zip(&hi)) {
                prop_assert!(l <= *e && *e <= h);
            }
            for line in iter_lines(m.shape()) {
                prop_assert_eq!(
                    fixed.line_sum(&line).unwrap(),
                    m.line_sum(&line).unwrap()
                );
            }
        }
    }
}
