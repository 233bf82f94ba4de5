//! Boundary-approach diagnostics: sample `R`, `r`, `G`, `C` and `r²a'²`
//! along curves running into `t → t_inf⁺` and classify their limits.

use serde::Serialize;
use thiserror::Error;

use crate::axi_chart::{degeneracy, locus_residual, DegeneracyKind};
use crate::criteria::{symmetric_class_obstruction, Curvature, SpacetimeSpec, Status};
use crate::expr::Expr;
use crate::quad::{integrate, QuadError, QuadTol};
use crate::scale_factor::{
    classify_limit, limit_at_lower, LimitDiag, LimitTarget, ScaleFactor, SfError, DEFAULT_Q,
};
use crate::sph_chart::{g_of, Branch, ChartError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Sf(#[from] SfError),
    #[error("curve leaves the interval at t={t}")]
    CurveLeavesInterval { t: f64 },
    #[error("θ={theta} is on the axis or outside (0, π)")]
    DegenerateThetaFixed { theta: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("probing needs a flat or hyperbolic spacetime")]
    UnsupportedCurvature,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// `R ≡ R₀`.
    ConstantR { r0: f64 },
    /// `r(t) = r₁ + κ∫_t^{t₁} ds/a(s)`, timelike for `κ < 1`.
    NearNullIngoing { kappa: f64, r1: f64, t1: f64 },
    /// `r(t)` given as an expression in `t`.
    Custom(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub theta: f64,
}

impl CurveSpec {
    pub fn describe(&self) -> String {
        match &self.kind {
            CurveKind::ConstantR { r0 } => format!("constant R = {r0:?}"),
            CurveKind::NearNullIngoing { kappa, r1, t1 } => {
                format!("near-null ingoing, kappa = {kappa:?}, r1 = {r1:?}, t1 = {t1:?}")
            }
            CurveKind::Custom(e) => format!("r(t) = {e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSample {
    pub t: f64,
    pub r: f64,
    pub big_r: f64,
    pub g: f64,
    pub c: f64,
    pub r2ap2: f64,
    /// `g(γ', γ')` for the radial tangent `(1, r')`: `−1 + a²r'²`.
    pub tangent_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeLimits {
    pub big_r: LimitDiag,
    pub r: LimitDiag,
    pub g: LimitDiag,
    pub c: LimitDiag,
    pub r2ap2: LimitDiag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub curve: String,
    pub theta: f64,
    pub q: f64,
    pub samples: Vec<ProbeSample>,
    /// Schedule times dropped because the point is on the degenerate set.
    pub skipped: Vec<f64>,
    pub limits: ProbeLimits,
    pub timelike_fraction: f64,
    pub notes: Vec<String>,
}

fn branch_of(spec: &SpacetimeSpec) -> Result<Branch, ProbeError> {
    match spec.k {
        Curvature::Flat => Ok(Branch::Flat),
        Curvature::Hyperbolic => Ok(Branch::Hyperbolic),
        Curvature::Spherical => Err(ProbeError::UnsupportedCurvature),
    }
}

fn check_theta(theta: f64) -> Result<(), ProbeError> {
    let axis = degeneracy(1.0, theta).kind == DegeneracyKind::AxisTheta;
    if !(theta > 0.0 && theta < std::f64::consts::PI) || axis {
        return Err(ProbeError::DegenerateThetaFixed { theta });
    }
    Ok(())
}

/// `(r, r')` of the curve at `t`.
fn curve_at(spec: &SpacetimeSpec, branch: Branch, kind: &CurveKind, t: f64) -> Result<(f64, f64), ProbeError> {
    let sf = &spec.sf;
    let d = sf.eval(t)?;
    let (a, ap) = (d.value, d.deriv);
    let (r, rp) = match kind {
        CurveKind::ConstantR { r0 } => match branch {
            Branch::Flat => (r0 / a, -r0 * ap / (a * a)),
            Branch::Hyperbolic => {
                let x = r0 / a;
                (x.asinh(), -x * ap / (a * (1.0 + x * x).sqrt()))
            }
        },
        CurveKind::NearNullIngoing { kappa, r1, t1 } => {
            let q = inverse_a_integral(sf, t, *t1)?;
            (r1 + kappa * q, -kappa / a)
        }
        CurveKind::Custom(e) => {
            let v = e.eval_dual(t).map_err(SfError::from)?;
            (v.value, v.deriv)
        }
    };
    if !(r > 0.0) {
        return Err(ProbeError::InvalidCurve(format!("r = {r} at t = {t}")));
    }
    Ok((r, rp))
}

/// `∫_t^{t₁} ds/a(s)`, split into pieces whose distance to `t_inf` doubles
/// so each piece is free of the endpoint singularity.
fn inverse_a_integral(sf: &ScaleFactor, t: f64, t1: f64) -> Result<f64, ProbeError> {
    let tol = QuadTol {
        abs: 0.0,
        rel: 1e-12,
        max_depth: 48,
    };
    let base = if sf.t_inf().is_finite() { sf.t_inf() } else { t - 1.0 };
    let mut total = 0.0;
    let mut lo = t;
    while lo < t1 {
        let hi = (base + 2.0 * (lo - base)).min(t1);
        let piece = integrate(|s| sf.a(s).map(|v| 1.0 / v), lo, hi, tol).map_err(|e| match e {
            QuadError::Integrand { source, .. } => ProbeError::Sf(source),
            other => ProbeError::InvalidCurve(format!("{other:?}")),
        })?;
        total += piece.value;
        lo = hi;
    }
    Ok(total)
}

fn validate_curve(spec: &SpacetimeSpec, curve: &CurveSpec) -> Result<(), ProbeError> {
    check_theta(curve.theta)?;
    match curve.kind {
        CurveKind::ConstantR { r0 } if !(r0 > 0.0) => Err(ProbeError::InvalidCurve("R0 must be positive".into())),
        CurveKind::NearNullIngoing { kappa, r1, t1 } => {
            if !(kappa > 0.0 && kappa < 1.0) {
                return Err(ProbeError::InvalidCurve("kappa must lie in (0, 1)".into()));
            }
            if !(r1 > 0.0) {
                return Err(ProbeError::InvalidCurve("r1 must be positive".into()));
            }
            if !spec.sf.contains(t1) {
                return Err(ProbeError::CurveLeavesInterval { t: t1 });
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn sample(spec: &SpacetimeSpec, branch: Branch, curve: &CurveSpec, t: f64) -> Result<Option<ProbeSample>, ProbeError> {
    let (r, rp) = curve_at(spec, branch, &curve.kind, t)?;
    let d = spec.sf.eval(t)?;
    let big_r = match branch {
        Branch::Flat => r * d.value,
        Branch::Hyperbolic => d.value * r.sinh(),
    };
    let g = match g_of(branch, &spec.sf, t, r) {
        Ok(g) => g,
        Err(ChartError::DegeneratePoint { .. }) => return Ok(None),
        Err(ChartError::Sf(e)) => return Err(e.into()),
        Err(e) => return Err(ProbeError::InvalidCurve(e.to_string())),
    };
    let den = locus_residual(g, curve.theta);
    Ok(Some(ProbeSample {
        t,
        r,
        big_r,
        g,
        c: g / den,
        r2ap2: (r * d.deriv).powi(2),
        tangent_norm: -1.0 + (d.value * rp).powi(2),
    }))
}

fn limit(samples: &[ProbeSample], f: impl Fn(&ProbeSample) -> f64) -> LimitDiag {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, f(s))).collect();
    let (kind, note) = classify_limit(&pts);
    LimitDiag { kind, samples: pts, note }
}

/// Samples the curve on the geometric schedule with ratio `q` toward
/// `t_inf`. Points of the degenerate set `{G⁻¹ = 0}` are skipped.
pub fn probe(spec: &SpacetimeSpec, curve: &CurveSpec, q: f64) -> Result<ProbeResult, ProbeError> {
    let branch = branch_of(spec)?;
    validate_curve(spec, curve)?;
    let mut schedule = spec.sf.lower_schedule(q);
    let mut notes = Vec::new();
    if let CurveKind::NearNullIngoing { t1, .. } = curve.kind {
        let before = schedule.len();
        schedule.retain(|&t| t <= t1);
        if schedule.len() < before {
            notes.push(format!("{} schedule points after t1 = {t1:?} dropped", before - schedule.len()));
        }
    }
    let mut samples = Vec::with_capacity(schedule.len());
    let mut skipped = Vec::new();
    for &t in &schedule {
        match sample(spec, branch, curve, t) {
            Ok(Some(s)) if [s.r, s.big_r, s.g, s.c, s.r2ap2, s.tangent_norm].iter().all(|v| v.is_finite()) => {
                samples.push(s)
            }
            Ok(_) => skipped.push(t),
            // overflow deep in the schedule ends the sweep
            Err(ProbeError::Sf(e)) if e.is_numerical_breakdown() => {
                notes.push(format!("schedule truncated at t = {t:e}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let timelike = samples.iter().filter(|s| s.tangent_norm < 0.0).count();
    let timelike_fraction = if samples.is_empty() {
        0.0
    } else {
        timelike as f64 / samples.len() as f64
    };
    let limits = ProbeLimits {
        big_r: limit(&samples, |s| s.big_r),
        r: limit(&samples, |s| s.r),
        g: limit(&samples, |s| s.g),
        c: limit(&samples, |s| s.c),
        r2ap2: limit(&samples, |s| s.r2ap2),
    };
    let mut result = ProbeResult {
        curve: curve.describe(),
        theta: curve.theta,
        q,
        samples,
        skipped,
        limits,
        timelike_fraction,
        notes,
    };
    if let Ok(a_lim) = limit_at_lower(&spec.sf, LimitTarget::A) {
        if !result.radius_invariant_holds(&a_lim) {
            result
                .notes
                .push("R has a finite positive limit and a → 0, yet r does not diverge".into());
        }
    }
    Ok(result)
}

impl ProbeResult {
    /// `R → R₀ > 0` together with `a → 0` forces `r → ∞`.
    pub fn radius_invariant_holds(&self, a_limit: &LimitDiag) -> bool {
        let finite_positive = matches!(self.limits.big_r.finite_value(), Some(v) if v > 0.0);
        !(finite_positive && a_limit.is_zero()) || self.limits.r.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum WitnessOutcome {
    Witness { t: f64, g: f64, c: f64 },
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub outcome: WitnessOutcome,
    /// Whether the Big Bang and `a'(0)` hypotheses of the symmetric-class
    /// obstruction hold for this spec.
    pub hypotheses_established: bool,
    pub note: String,
}

const WITNESS_HYPOTHESES: [&str; 4] = [
    "flat_or_hyperbolic",
    "big_bang_at_finite_time",
    "a_prime_limit_in_(0,inf]",
    "a_prime_limit_in_[0,inf]_not_1",
];

fn hypotheses_established(spec: &SpacetimeSpec) -> bool {
    let v = symmetric_class_obstruction(spec);
    let relevant: Vec<_> = v
        .hypotheses
        .iter()
        .filter(|h| WITNESS_HYPOTHESES.contains(&h.name.as_str()))
        .collect();
    relevant.len() >= 3 && relevant.iter().all(|h| matches!(h.status, Status::Holds | Status::SampledOnly))
}

/// Largest schedule time on the constant-`R` locus where both `|G| ≤ ε` and
/// `|C| ≤ ε`, refined by bisection against the previous schedule point.
pub fn witness_degeneracy(spec: &SpacetimeSpec, r0: f64, theta: f64, eps: f64) -> Result<WitnessReport, ProbeError> {
    let branch = branch_of(spec)?;
    let curve = CurveSpec {
        kind: CurveKind::ConstantR { r0 },
        theta,
    };
    validate_curve(spec, &curve)?;
    let established = hypotheses_established(spec);
    let tag = if established {
        String::new()
    } else {
        "hypotheses not established; ".into()
    };
    let hit = |t: f64| -> Result<Option<ProbeSample>, ProbeError> {
        Ok(sample(spec, branch, &curve, t)?.filter(|s| s.g.abs() <= eps && s.c.abs() <= eps))
    };
    let schedule = spec.sf.lower_schedule(DEFAULT_Q);
    let mut prev: Option<f64> = None;
    for &t in &schedule {
        let found = match hit(t) {
            Ok(v) => v,
            Err(ProbeError::Sf(e)) if e.is_numerical_breakdown() => break,
            Err(e) => return Err(e),
        };
        if let Some(mut best) = found {
            if let Some(mut miss) = prev {
                let mut inside = t;
                for _ in 0..100 {
                    let mid = 0.5 * (inside + miss);
                    if mid == inside || mid == miss {
                        break;
                    }
                    match hit(mid)? {
                        Some(s) => {
                            inside = mid;
                            best = s;
                        }
                        None => miss = mid,
                    }
                }
            }
            return Ok(WitnessReport {
                outcome: WitnessOutcome::Witness {
                    t: best.t,
                    g: best.g,
                    c: best.c,
                },
                hypotheses_established: established,
                note: format!("{tag}|G| and |C| fall below {eps:e} on R = {r0:?}"),
            });
        }
        prev = Some(t);
    }
    Ok(WitnessReport {
        outcome: WitnessOutcome::NoWitness,
        hypotheses_established: established,
        note: format!("{tag}no schedule point with |G|, |C| ≤ {eps:e}"),
    })
}
