//! Named example spacetimes with the verdicts they are expected to produce.

use serde::Serialize;
use thiserror::Error;

use crate::criteria::{
    Conclusion, Curvature, SpacetimeSpec, FUTURE_C0, LING, MILNE_LIKE, PAST_C0, PAST_C01, SYMMETRIC,
};
use crate::scale_factor::{Meta, ScaleFactor, Sublinear};

use Conclusion::{Applies as Y, DoesNotApply as N};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("invalid power-law parameters: {0}")]
    InvalidPowerLaw(String),
}

pub const FLAG_TYPO_SUSPECT: &str = "paper-typo-suspect";
pub const FLAG_ARTIFACT_EXPONENT: &str = "artifact-supplied exponent";

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub spec: SpacetimeSpec,
    /// `(statement id, conclusion)` pairs `full_report` must reproduce.
    pub expected: Vec<(&'static str, Conclusion)>,
    pub provenance: String,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogListing {
    pub name: String,
    pub k: i32,
    pub a: String,
    pub provenance: String,
    pub flags: Vec<String>,
}

const NAMES: [&str; 8] = [
    "milne",
    "milne_like_quadratic",
    "milne_like_rational",
    "desitter_flat",
    "desitter_hyperbolic_paper",
    "desitter_hyperbolic_standard",
    "radiation_flat",
    "matter_flat",
];

pub fn list() -> Vec<&'static str> {
    NAMES.to_vec()
}

pub fn listing() -> Vec<CatalogListing> {
    NAMES
        .iter()
        .map(|n| {
            let e = get(n).expect("catalog names resolve");
            CatalogListing {
                name: e.name,
                k: e.spec.k.k(),
                a: e.spec.sf.expr().to_string(),
                provenance: e.provenance,
                flags: e.flags,
            }
        })
        .collect()
}

fn sf(text: &str, lo: f64, hi: f64) -> ScaleFactor {
    ScaleFactor::new(text, lo, hi).expect("catalog expressions parse")
}

fn sublinear(m: f64, b: f64) -> Meta {
    Meta {
        monotone_increasing: true,
        sublinear: Some(Sublinear { m, b }),
        positivity_asserted: true,
    }
}

fn entry(
    name: &str,
    k: Curvature,
    a: ScaleFactor,
    verdicts: [Conclusion; 6],
    provenance: &str,
    flags: &[&str],
) -> CatalogEntry {
    let ids = [FUTURE_C0, PAST_C01, PAST_C0, LING, MILNE_LIKE, SYMMETRIC];
    CatalogEntry {
        name: name.to_string(),
        spec: SpacetimeSpec::new(k, 3, a),
        expected: ids.into_iter().zip(verdicts).collect(),
        provenance: provenance.to_string(),
        flags: flags.iter().map(|s| s.to_string()).collect(),
    }
}

/// Looks up a fixed entry, or a generated one written `power_law(p)` or
/// `power_law(p, K)`.
pub fn get(name: &str) -> Result<CatalogEntry, CatalogError> {
    const INF: f64 = f64::INFINITY;
    let e = match name {
        // columns: future_c0, past_c01, past_c0, ling, milne_like, symmetric
        "milne" => entry(
            name,
            Curvature::Hyperbolic,
            sf("t", 0.0, INF),
            [Y, N, N, N, Y, N],
            "interior of the future light cone of a point in Minkowski space",
            &[],
        ),
        "milne_like_quadratic" => entry(
            name,
            Curvature::Hyperbolic,
            sf("t + t^2", 0.0, INF),
            [Y, N, N, N, N, N],
            "a'(0) = 1 with a·exp(∫1/a) → 1/2, but a grows quadratically",
            &["not-sublinear"],
        ),
        "milne_like_rational" => entry(
            name,
            Curvature::Hyperbolic,
            sf("(t + 2*t^2)/(1 + t)", 0.0, INF).with_meta(sublinear(2.0, 0.0)),
            [Y, N, N, N, Y, N],
            "a'(0) = 1, a ≤ 2t, no particle horizon",
            &[],
        ),
        "desitter_flat" => entry(
            name,
            Curvature::Flat,
            sf("exp(t)", -INF, INF),
            [Y, N, N, N, N, N],
            "flatly sliced patch of de Sitter space",
            &[],
        ),
        "desitter_hyperbolic_paper" => entry(
            name,
            Curvature::Hyperbolic,
            sf("sinh(t)^2", 0.0, INF),
            [Y, N, Y, N, N, Y],
            "hyperbolic de Sitter slicing with a = sinh²t; the standard slicing is sinh t",
            &[FLAG_TYPO_SUSPECT],
        ),
        "desitter_hyperbolic_standard" => entry(
            name,
            Curvature::Hyperbolic,
            sf("sinh(t)", 0.0, INF),
            [Y, N, N, N, N, N],
            "hyperbolically sliced patch of de Sitter space",
            &[FLAG_TYPO_SUSPECT],
        ),
        "radiation_flat" => entry(
            name,
            Curvature::Flat,
            sf("t^(1/2)", 0.0, INF).with_meta(sublinear(1.0, 1.0)),
            [Y, Y, N, N, N, Y],
            "radiation-dominated flat universe",
            &[FLAG_ARTIFACT_EXPONENT],
        ),
        "matter_flat" => entry(
            name,
            Curvature::Flat,
            sf("t^(2/3)", 0.0, INF).with_meta(sublinear(1.0, 1.0)),
            [Y, Y, N, N, N, Y],
            "matter-dominated flat universe",
            &[FLAG_ARTIFACT_EXPONENT],
        ),
        other => return parse_power_law(other),
    };
    Ok(e)
}

fn parse_power_law(name: &str) -> Result<CatalogEntry, CatalogError> {
    let unknown = || CatalogError::UnknownEntry(name.to_string());
    let inner = name
        .strip_prefix("power_law(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(unknown)?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let p: f64 = parts[0].parse().map_err(|_| unknown())?;
    let k = match parts.get(1) {
        None => Curvature::Flat,
        Some(s) => {
            let k: i64 = s.trim_start_matches('+').parse().map_err(|_| unknown())?;
            Curvature::from_k(k).ok_or_else(unknown)?
        }
    };
    if parts.len() > 2 {
        return Err(unknown());
    }
    power_law(p, k)
}

/// `a = t^p` on `(0, ∞)`.
///
/// The expected verdicts follow from closed forms. There is a particle
/// horizon iff `p < 1`. `a'(0)` is `∞` below `p = 1`, `1` at it and `0`
/// above. `a·exp(∫_t^1 1/a)` tends to `0`, `1` and `∞` in the same three
/// ranges.
pub fn power_law(p: f64, k: Curvature) -> Result<CatalogEntry, CatalogError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(CatalogError::InvalidPowerLaw(format!("p = {p} must be positive")));
    }
    let horizon = p < 1.0;
    let unit = p == 1.0;
    let past_c0 = match k {
        Curvature::Spherical => !horizon,
        Curvature::Hyperbolic => p > 1.0,
        Curvature::Flat => false,
    };
    let symmetric = match k {
        Curvature::Flat => p <= 1.0,
        Curvature::Hyperbolic => !unit,
        Curvature::Spherical => false,
    };
    let yn = |b: bool| if b { Y } else { N };
    let text = if unit { "t".to_string() } else { format!("t^{p:?}") };
    let name = format!("power_law({p:?}, {})", k.k());
    Ok(entry(
        &name,
        k,
        sf(&text, 0.0, f64::INFINITY),
        [
            Y,
            yn(horizon),
            yn(past_c0),
            N,
            yn(unit && k == Curvature::Hyperbolic),
            yn(symmetric),
        ],
        "generated power law",
        &[],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::full_report;

    fn matches(e: &CatalogEntry) -> Vec<String> {
        let report = full_report(&e.spec);
        e.expected
            .iter()
            .filter_map(|&(id, want)| {
                let got = report.verdict(id).unwrap().conclusion;
                (got != want).then(|| format!("{}: {id} expected {want}, got {got}", e.name))
            })
            .collect()
    }

    #[test]
    fn every_entry_reproduces_its_fragment() {
        let misses: Vec<String> = list().iter().flat_map(|n| matches(&get(n).unwrap())).collect();
        assert!(misses.is_empty(), "{misses:#?}");
    }

    #[test]
    fn generated_power_laws() {
        let mut misses = Vec::new();
        for p in [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5, 3.0] {
            for k in [Curvature::Spherical, Curvature::Flat, Curvature::Hyperbolic] {
                misses.extend(matches(&power_law(p, k).unwrap()));
            }
        }
        assert!(misses.is_empty(), "{misses:#?}");
    }

    #[test]
    fn lookup() {
        assert_eq!(get("milne").unwrap().spec.k, Curvature::Hyperbolic);
        let e = get("power_law(1, +1)").unwrap();
        assert_eq!(e.spec.k, Curvature::Spherical);
        assert!(e.expected.contains(&(PAST_C0, Y)));
        assert_eq!(get("power_law(0.5)").unwrap().spec.k, Curvature::Flat);
        assert!(matches!(get("nope"), Err(CatalogError::UnknownEntry(_))));
        assert!(get("power_law(-1)").is_err());
        let flagged: Vec<_> = list()
            .into_iter()
            .filter(|n| get(n).unwrap().flags.iter().any(|f| f == FLAG_TYPO_SUSPECT))
            .collect();
        assert_eq!(flagged, ["desitter_hyperbolic_paper", "desitter_hyperbolic_standard"]);
        assert_eq!(listing().len(), 8);
    }
}
