//! Randomised invariants over the basic symbols, the text formats and the
//! circuit normaliser.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use odewb::circuit::{normalize, parse_circuit, validate_nf, write_circuit};
use odewb::engine::{alpha, eval_basic, len_int, Basic, Evaluator};
use odewb::fixtures::{mod_counter, parity_circuit};
use odewb::program_text::{parse_program, write_program};
use odewb::stdlib::build_cmodn;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

proptest! {
    #[test]
    fn len_of_alpha_is_identity(u in 0i64..1000) {
        prop_assert_eq!(len_int(&alpha(u)), u as u64);
    }

    #[test]
    fn div2_is_floor_division(x in -10_000i64..10_000) {
        let v = eval_basic(&Basic::Div2, &[big(x)], None).unwrap();
        prop_assert_eq!(v, big(x.div_euclid(2)));
    }

    #[test]
    fn sg_cosg_partition(x in -10_000i64..10_000) {
        let s = eval_basic(&Basic::Sg, &[big(x)], None).unwrap();
        let c = eval_basic(&Basic::Cosg, &[big(x)], None).unwrap();
        prop_assert_eq!(s.clone() + c, big(1));
        prop_assert_eq!(s, big(i64::from(x > 0)));
    }

    #[test]
    fn smash_concatenates(x in 0u64..1 << 20, y in 0u64..1 << 20) {
        let v = eval_basic(&Basic::Smash, &[big(x as i64), big(y as i64)], None).unwrap();
        let want = (BigInt::from(x) << len_int(&big(y as i64))) + big(y as i64);
        prop_assert_eq!(v, want);
    }

    #[test]
    fn bit_matches_shift(i in 0u64..64, x in 0u64..u64::MAX) {
        let v = eval_basic(&Basic::Bit, &[big(i as i64), BigInt::from(x)], None).unwrap();
        prop_assert_eq!(v, BigInt::from(x >> i & 1));
    }

    #[test]
    fn negative_length_is_a_domain_error(x in -10_000i64..0) {
        prop_assert!(eval_basic(&Basic::Len, &[big(x)], None).is_err());
    }

    #[test]
    fn program_text_roundtrips(n in 2u32..8) {
        let prog = build_cmodn(n);
        let text = write_program(&prog);
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(write_program(&back), text);
        let mut e1 = Evaluator::new(&prog);
        let mut e2 = Evaluator::new(&back);
        for x in 0u64..64 {
            prop_assert_eq!(
                e1.eval("cmodn", &[BigInt::from(x)]).unwrap(),
                e2.eval("cmodn", &[BigInt::from(x)]).unwrap()
            );
        }
    }

    #[test]
    fn circuit_text_roundtrips(width in 2usize..8) {
        let c = parity_circuit(width);
        let text = write_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        prop_assert_eq!(write_circuit(&back), text);
        for x in 0u64..1 << width {
            prop_assert_eq!(c.eval_u64(x).unwrap(), back.eval_u64(x).unwrap());
        }
    }

    #[test]
    fn normalize_preserves_semantics(width in 2usize..7, n in 2u32..6, r in 0u32..6) {
        let r = r % n;
        let c = mod_counter(width, n, r);
        let normal = normalize(&c).unwrap();
        prop_assert!(validate_nf(&normal).is_empty());
        for x in 0u64..1 << width {
            prop_assert_eq!(c.eval_u64(x).unwrap(), normal.eval_u64(x).unwrap());
        }
    }

    #[test]
    fn evaluation_is_deterministic(x in 0u64..1 << 16) {
        let prog = build_cmodn(3);
        let a = Evaluator::new(&prog).eval("cmodn", &[BigInt::from(x)]).unwrap();
        let b = Evaluator::new(&prog).eval("cmodn", &[BigInt::from(x)]).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a >= BigInt::zero() && a < big(3));
    }
}
