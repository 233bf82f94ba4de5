use flrw_core::catalog::{self, power_law};
use flrw_core::criteria::{full_report, Conclusion, Curvature, SpacetimeSpec, MILNE_LIKE, PAST_C0, STATEMENT_IDS};
use flrw_core::scale_factor::{has_particle_horizon, Horizon, ScaleFactor};
use proptest::prelude::*;

fn curvature() -> impl Strategy<Value = Curvature> {
    prop_oneof![Just(Curvature::Spherical), Just(Curvature::Flat), Just(Curvature::Hyperbolic)]
}

/// Exponents away from the threshold `p = 1`, where sampled limits cannot
/// separate neighbouring regimes.
fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![0.15f64..0.9, 1.1f64..3.0]
}

fn spec(k: Curvature, d: u32, a: &str) -> SpacetimeSpec {
    SpacetimeSpec::new(k, d, ScaleFactor::new(a, 0.0, f64::INFINITY).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_law_sweep(p in exponent(), k in curvature()) {
        let e = power_law(p, k).unwrap();
        let report = full_report(&e.spec);
        for (id, want) in &e.expected {
            let got = report.verdict(id).unwrap().conclusion;
            prop_assert_eq!(got, *want, "{} {}", e.name, id);
        }
    }

    #[test]
    fn horizon_iff_sublinear_power(p in exponent()) {
        let sf = ScaleFactor::new(&format!("t^{p}"), 0.0, f64::INFINITY).unwrap();
        let h = has_particle_horizon(&sf).unwrap();
        prop_assert_eq!(matches!(h, Horizon::HasHorizon(_)), p < 1.0, "{:?}", h);
        prop_assert_eq!(matches!(h, Horizon::NoHorizon(_)), p > 1.0, "{:?}", h);
    }

    /// A Milne-like spacetime is C⁰-extendible through the past, so the
    /// past C⁰ statement can never apply to it as well.
    #[test]
    fn milne_like_excludes_past_c0(p in 0.2f64..3.0, c in 0.0f64..2.0, k in curvature()) {
        let r = full_report(&spec(k, 3, &format!("t^{p} + {c}*t^2")));
        let both = r.verdict(MILNE_LIKE).unwrap().applies() && r.verdict(PAST_C0).unwrap().applies();
        prop_assert!(!both);
    }

    #[test]
    fn verdicts_follow_their_hypotheses(p in exponent(), k in curvature(), d in 1u32..5) {
        let r = full_report(&spec(k, d, &format!("t^{p}")));
        let ids: Vec<&str> = r.verdicts.iter().map(|v| v.id.as_str()).collect();
        prop_assert_eq!(ids, STATEMENT_IDS.to_vec());
        for v in &r.verdicts {
            prop_assert!(v.is_consistent(), "{:?}", v);
        }
    }

    #[test]
    fn reports_are_deterministic(p in exponent(), k in curvature()) {
        let s = spec(k, 3, &format!("t^{p}"));
        let a = serde_json::to_string(&full_report(&s)).unwrap();
        let b = serde_json::to_string(&full_report(&s)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn catalog_fragments() {
    for name in catalog::list() {
        let e = catalog::get(name).unwrap();
        let r = full_report(&e.spec);
        for (id, want) in &e.expected {
            assert_eq!(r.verdict(id).unwrap().conclusion, *want, "{name}: {id}");
        }
    }
}

#[test]
fn one_dimensional_row_notes_past_extendibility() {
    let r = full_report(&spec(Curvature::Flat, 1, "t^(1/2)"));
    assert!(r.table_row.contains("d=1"), "{}", r.table_row);
}

#[test]
fn no_inconclusive_on_the_catalog() {
    for name in catalog::list() {
        let r = full_report(&catalog::get(name).unwrap().spec);
        for v in &r.verdicts {
            assert_ne!(v.conclusion, Conclusion::Inconclusive, "{name}: {}", v.id);
        }
    }
}
