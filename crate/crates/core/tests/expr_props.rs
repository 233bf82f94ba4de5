mod common;

use flrw_core::expr::{parse, Dual, ExprError};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn autodiff_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    let misses: Vec<_> = (0..1000)
        .map(|_| common::ad_case(&mut rng))
        .filter(|c| !common::ad_within_tol(c))
        .collect();
    assert!(misses.is_empty(), "{misses:#?}");
}

proptest! {
    #[test]
    fn autodiff_property(seed in any::<u64>()) {
        let c = common::ad_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(common::ad_within_tol(&c), "{c:?}");
    }

    #[test]
    fn print_parse_is_idempotent(seed in any::<u64>()) {
        let text = common::random_expr_text(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let once = parse(&text).unwrap();
        let printed = once.to_string();
        let twice = parse(&printed).unwrap();
        prop_assert_eq!(twice.to_string(), printed);
        prop_assert_eq!(parse(&twice.to_string()).unwrap(), twice);
    }

    #[test]
    fn printing_preserves_values(seed in any::<u64>(), t in 0.1f64..4.0) {
        let e = parse(&common::random_expr_text(&mut ChaCha8Rng::seed_from_u64(seed), 4)).unwrap();
        let back = parse(&e.to_string()).unwrap();
        match (e.eval_dual(t), back.eval_dual(t)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn never_a_silent_nan(seed in any::<u64>(), t in -5.0f64..5.0) {
        let e = parse(&common::random_expr_text(&mut ChaCha8Rng::seed_from_u64(seed), 5)).unwrap();
        match e.eval_dual(t) {
            Ok(d) => prop_assert!(!d.value.is_nan() && !d.deriv.is_nan(), "{d:?}"),
            Err(ExprError::Domain { .. } | ExprError::NonFinite { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected {other}"),
        }
    }

    #[test]
    fn composition_is_the_chain_rule(c in 0.2f64..2.0, t in 0.1f64..2.0) {
        // f(t) = t^3 + sin t composed with g(x) = c·x at x = t/c
        let f = parse("t^3 + sin(t)").unwrap();
        let got = f.eval_composed(Dual::new(t, c)).unwrap();
        prop_assert!((got.deriv - c * (3.0 * t * t + t.cos())).abs() <= 1e-12 * (1.0 + got.deriv.abs()));
    }
}
