mod common;

use common::{dense_lambdas, dense_profile, random_shape, random_word};
use ndooc::ooc::{correlation_profile, validate_code, Code, CodeShape, Codeword};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_code(seed: u64) -> Code {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = random_shape(&mut rng, 400);
    let w = rand::Rng::gen_range(&mut rng, 1..=shape.total().min(6) as usize);
    let count = rand::Rng::gen_range(&mut rng, 1..=5);
    let mut words: Vec<Codeword> = Vec::new();
    for _ in 0..count {
        let cand = random_word(&mut rng, &shape, w);
        if words.iter().all(|x| x.canonical() != cand.canonical()) {
            words.push(cand);
        }
    }
    Code::new(shape, w as u32, u32::MAX, u32::MAX, words)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_matches_dense(seed in any::<u64>()) {
        let code = random_code(seed);
        for a in code.words() {
            for b in code.words() {
                prop_assert_eq!(correlation_profile(a, b).unwrap(), dense_profile(a, b));
            }
        }
    }

    #[test]
    fn measured_lambdas_match_dense(seed in any::<u64>()) {
        let code = random_code(seed);
        let r = validate_code(&code).unwrap();
        prop_assert_eq!((r.max_offpeak_auto, r.max_cross), dense_lambdas(&code));
        prop_assert!(r.passes);
    }

    #[test]
    fn witnesses_reproduce_maxima(seed in any::<u64>()) {
        let code = random_code(seed);
        let r = validate_code(&code).unwrap();
        if let Some(w) = &r.auto_witness {
            let a = &code.words()[w.word];
            prop_assert_eq!(dense_profile(a, a)[w.shift as usize], r.max_offpeak_auto);
        }
        if let Some(w) = &r.cross_witness {
            let (a, b) = (&code.words()[w.first], &code.words()[w.second]);
            prop_assert_eq!(dense_profile(a, b)[w.shift as usize], r.max_cross);
        }
    }

    #[test]
    fn time_shifts_do_not_change_measurements(seed in any::<u64>(), shift in 0i64..50) {
        let code = random_code(seed);
        let shifted: Vec<Codeword> = code.words().iter().map(|w| w.time_shift(shift)).collect();
        let again = Code::new(code.shape().clone(), code.weight(), 0, 0, shifted);
        prop_assert_eq!(again.words(), code.words());
        let a = validate_code(&code).unwrap();
        let b = validate_code(&again).unwrap();
        prop_assert_eq!(a.max_offpeak_auto, b.max_offpeak_auto);
        prop_assert_eq!(a.max_cross, b.max_cross);
    }
}

#[test]
fn one_dimensional_code_is_a_cyclic_code() {
    // {0, 1, 3} mod 7 is a perfect difference set
    let shape = CodeShape::new(vec![7]).unwrap();
    let w = Codeword::from_coords(shape.clone(), [vec![0], vec![1], vec![3]]).unwrap();
    let code = Code::new(shape, 3, 1, 1, vec![w]);
    let r = validate_code(&code).unwrap();
    assert_eq!(r.max_offpeak_auto, 1);
    assert!(!r.is_ideal);
}
