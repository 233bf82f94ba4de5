//! Inextendibility criteria as hypothesis checklists.
//!
//! Each statement becomes a [`Verdict`]: a list of named hypotheses, each
//! with a status and the diagnostic that produced it, and a conclusion that
//! follows mechanically from the statuses. Statements with alternative
//! conditions prefix hypothesis names with a route label (`i:`, `ii:`), and
//! the conclusion applies when every hypothesis on some route is satisfied.

use std::cell::OnceCell;
use std::fmt;

use serde::Serialize;

use crate::scale_factor::{
    fmt_endpoint, future_integral, has_particle_horizon, limit_at_lower, ling_limit,
    sbierski_hyperbolic_limit, Horizon, IntegralDiag, IntegralKind, LimitDiag, LimitKind,
    LimitTarget, ScaleFactor, SfError,
};

/// Tolerance on `|a'(0) − 1|` for treating the derivative limit as one.
pub const UNIT_SLOPE_TOL: f64 = 1e-3;
/// Number of points on the audit grid.
pub const AUDIT_POINTS: usize = 1000;
/// Audit grids stop here when the interval is unbounded above.
pub const AUDIT_T_MAX: f64 = 1e6;

pub const FUTURE_C0: &str = "future_c0";
pub const PAST_C01: &str = "past_c01";
pub const PAST_C0: &str = "past_c0";
pub const LING: &str = "ling_past_eternal";
pub const MILNE_LIKE: &str = "milne_like";
pub const SYMMETRIC: &str = "symmetric_class_obstruction";

pub const STATEMENT_IDS: [&str; 6] = [FUTURE_C0, PAST_C01, PAST_C0, LING, MILNE_LIKE, SYMMETRIC];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curvature {
    Spherical,
    Flat,
    Hyperbolic,
}

impl Curvature {
    pub fn k(self) -> i32 {
        match self {
            Curvature::Spherical => 1,
            Curvature::Flat => 0,
            Curvature::Hyperbolic => -1,
        }
    }

    pub fn from_k(k: i64) -> Option<Curvature> {
        match k {
            1 => Some(Curvature::Spherical),
            0 => Some(Curvature::Flat),
            -1 => Some(Curvature::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Curvature::Spherical => "spherical",
            Curvature::Flat => "flat",
            Curvature::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpacetimeSpec {
    pub k: Curvature,
    pub d: u32,
    pub sf: ScaleFactor,
}

impl SpacetimeSpec {
    pub fn new(k: Curvature, d: u32, sf: ScaleFactor) -> Self {
        assert!(d >= 1, "spatial dimension must be at least 1");
        SpacetimeSpec { k, d, sf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    SampledOnly,
    Inconclusive,
}

impl Status {
    fn satisfied(self) -> bool {
        matches!(self, Status::Holds | Status::SampledOnly)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    pub evidence: String,
}

fn hyp(name: &str, status: Status, evidence: impl Into<String>) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        status,
        evidence: evidence.into(),
    }
}

fn check(name: &str, ok: bool, evidence: impl Into<String>) -> Hypothesis {
    hyp(name, if ok { Status::Holds } else { Status::Fails }, evidence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    Applies,
    DoesNotApply,
    Inconclusive,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Applies => "Applies",
            Conclusion::DoesNotApply => "DoesNotApply",
            Conclusion::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub id: String,
    pub conclusion: Conclusion,
    /// What the statement concludes when it applies.
    pub text: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn route_of(name: &str) -> Option<&str> {
    name.split_once(':').map(|(r, _)| r)
}

impl Verdict {
    /// Derives the conclusion from the hypothesis statuses.
    fn decide(id: &str, text: &str, hypotheses: Vec<Hypothesis>) -> Verdict {
        let mut routes: Vec<&str> = Vec::new();
        for h in &hypotheses {
            let r = route_of(&h.name).unwrap_or("");
            if !routes.contains(&r) {
                routes.push(r);
            }
        }
        let on_route = |r: &'_ str| -> Vec<&Hypothesis> {
            hypotheses
                .iter()
                .filter(|h| route_of(&h.name).unwrap_or("") == r)
                .collect()
        };
        let conclusion = if routes.iter().any(|r| on_route(r).iter().all(|h| h.status.satisfied())) {
            Conclusion::Applies
        } else if routes
            .iter()
            .all(|r| on_route(r).iter().any(|h| h.status == Status::Fails))
        {
            Conclusion::DoesNotApply
        } else {
            Conclusion::Inconclusive
        };
        Verdict {
            id: id.to_string(),
            conclusion,
            text: (conclusion == Conclusion::Applies).then(|| text.to_string()),
            hypotheses,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = Some(note.into());
        self
    }

    /// True when the conclusion is the one implied by the statuses.
    pub fn is_consistent(&self) -> bool {
        let text = self.text.clone().unwrap_or_default();
        Verdict::decide(&self.id, &text, self.hypotheses.clone()).conclusion == self.conclusion
    }

    pub fn applies(&self) -> bool {
        self.conclusion == Conclusion::Applies
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecEcho {
    #[serde(rename = "K")]
    pub k: i32,
    pub d: u32,
    pub a: String,
    pub interval: [String; 2],
    pub anchor: f64,
}

impl SpecEcho {
    pub fn of(spec: &SpacetimeSpec) -> SpecEcho {
        SpecEcho {
            k: spec.k.k(),
            d: spec.d,
            a: spec.sf.expr().to_string(),
            interval: [fmt_endpoint(spec.sf.t_inf()), fmt_endpoint(spec.sf.t_sup())],
            anchor: spec.sf.anchor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub spec: SpecEcho,
    pub verdicts: Vec<Verdict>,
    pub table_row: String,
    pub version: String,
}

impl CriterionReport {
    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }
}

#[derive(Debug, Clone)]
struct Audit {
    points: usize,
    sublinear: (Status, String),
    increasing: (Status, String),
}

/// Memoized diagnostics for one spec, shared by all verdicts.
pub struct Diagnostics<'a> {
    spec: &'a SpacetimeSpec,
    horizon: OnceCell<Result<Horizon, SfError>>,
    lim_a: OnceCell<Result<LimitDiag, SfError>>,
    lim_a_prime: OnceCell<Result<LimitDiag, SfError>>,
    future: OnceCell<Result<IntegralDiag, SfError>>,
    sbierski: OnceCell<Result<LimitDiag, SfError>>,
    ling: OnceCell<Result<LimitDiag, SfError>>,
    audit: OnceCell<Audit>,
}

fn describe_limit(d: &LimitDiag) -> String {
    let kind = match d.kind {
        LimitKind::Finite(v) => format!("Finite({v:?})"),
        other => format!("{other:?}"),
    };
    format!("{kind} over {} samples: {}", d.samples.len(), d.note)
}

fn describe_integral(d: &IntegralDiag) -> String {
    let kind = match d.kind {
        IntegralKind::Convergent { value, err } => format!("Convergent({value:?} ± {err:.1e})"),
        other => format!("{other:?}"),
    };
    format!("{kind}: {}", d.note)
}

impl<'a> Diagnostics<'a> {
    pub fn new(spec: &'a SpacetimeSpec) -> Self {
        Diagnostics {
            spec,
            horizon: OnceCell::new(),
            lim_a: OnceCell::new(),
            lim_a_prime: OnceCell::new(),
            future: OnceCell::new(),
            sbierski: OnceCell::new(),
            ling: OnceCell::new(),
            audit: OnceCell::new(),
        }
    }

    fn sf(&self) -> &ScaleFactor {
        &self.spec.sf
    }

    fn horizon(&self) -> &Result<Horizon, SfError> {
        self.horizon.get_or_init(|| has_particle_horizon(self.sf()))
    }

    fn lim_a(&self) -> &Result<LimitDiag, SfError> {
        self.lim_a.get_or_init(|| limit_at_lower(self.sf(), LimitTarget::A))
    }

    fn lim_a_prime(&self) -> &Result<LimitDiag, SfError> {
        self.lim_a_prime
            .get_or_init(|| limit_at_lower(self.sf(), LimitTarget::APrime))
    }

    fn future(&self) -> &Result<IntegralDiag, SfError> {
        self.future.get_or_init(|| future_integral(self.sf()))
    }

    fn sbierski(&self) -> &Result<LimitDiag, SfError> {
        self.sbierski.get_or_init(|| sbierski_hyperbolic_limit(self.sf()))
    }

    fn ling(&self) -> &Result<LimitDiag, SfError> {
        self.ling.get_or_init(|| ling_limit(self.sf()))
    }

    fn audit(&self) -> &Audit {
        self.audit.get_or_init(|| audit(self.sf()))
    }

    fn no_horizon(&self, name: &str) -> Hypothesis {
        match self.horizon() {
            Ok(h) => {
                let status = match h {
                    Horizon::NoHorizon(_) => Status::Holds,
                    Horizon::HasHorizon(_) => Status::Fails,
                    Horizon::Inconclusive(_) => Status::Inconclusive,
                };
                hyp(name, status, format!("{}: {}", h.label(), describe_integral(h.integral())))
            }
            Err(e) => hyp(name, Status::Inconclusive, format!("horizon integral failed: {e}")),
        }
    }

    fn has_horizon(&self, name: &str) -> Hypothesis {
        let mut h = self.no_horizon(name);
        h.status = match h.status {
            Status::Holds => Status::Fails,
            Status::Fails => Status::Holds,
            s => s,
        };
        h
    }

    fn big_bang(&self, name: &str) -> Hypothesis {
        match self.lim_a() {
            Ok(d) => {
                let status = match d.kind {
                    LimitKind::Zero => Status::Holds,
                    LimitKind::Finite(_) | LimitKind::PlusInfinity => Status::Fails,
                    LimitKind::Inconclusive => Status::Inconclusive,
                };
                hyp(name, status, format!("lim a = {}", describe_limit(d)))
            }
            Err(e) => hyp(name, Status::Inconclusive, format!("lim a failed: {e}")),
        }
    }

    fn finite_big_bang(&self, name: &str) -> Hypothesis {
        if !self.sf().t_inf().is_finite() {
            return hyp(name, Status::Fails, "t_inf = -inf (past eternal)");
        }
        self.big_bang(name)
    }

    fn sublinear(&self, name: &str) -> Hypothesis {
        let a = self.audit();
        hyp(name, a.sublinear.0, format!("{} ({} grid points)", a.sublinear.1, a.points))
    }

    fn increasing(&self, name: &str) -> Hypothesis {
        let a = self.audit();
        hyp(name, a.increasing.0, format!("{} ({} grid points)", a.increasing.1, a.points))
    }

    /// `a'(0)` tested against a predicate on its classified limit. A `Zero`
    /// limit is passed to the predicate as the value 0.
    fn slope_limit(&self, name: &str, ok: impl Fn(Option<f64>) -> bool) -> Hypothesis {
        match self.lim_a_prime() {
            Ok(d) => {
                let value = match d.kind {
                    LimitKind::Finite(v) => Some(Some(v)),
                    LimitKind::Zero => Some(Some(0.0)),
                    LimitKind::PlusInfinity => Some(None),
                    LimitKind::Inconclusive => None,
                };
                let status = match value {
                    Some(v) if ok(v) => Status::Holds,
                    Some(_) => Status::Fails,
                    None => Status::Inconclusive,
                };
                hyp(name, status, format!("a'(t_inf+) = {}", describe_limit(d)))
            }
            Err(e) => hyp(name, Status::Inconclusive, format!("lim a' failed: {e}")),
        }
    }
}

/// Log-spaced points inside `(max(t_inf, 0), min(t_sup, 1e6))`, clustered
/// toward the lower end.
pub fn audit_grid(sf: &ScaleFactor) -> Vec<f64> {
    let lo = sf.t_inf().max(0.0);
    let hi = sf.t_sup().min(AUDIT_T_MAX);
    if !(hi > lo) {
        return Vec::new();
    }
    let span = hi - lo;
    (0..AUDIT_POINTS)
        .map(|i| lo + span * 10f64.powf(-12.0 + 12.0 * i as f64 / AUDIT_POINTS as f64))
        .filter(|&t| sf.contains(t))
        .collect()
}

fn audit(sf: &ScaleFactor) -> Audit {
    let grid = audit_grid(sf);
    let mut values = Vec::with_capacity(grid.len());
    let mut failure = None;
    for &t in &grid {
        match sf.eval(t) {
            Ok(d) => values.push((t, d.value, d.deriv)),
            Err(e) => {
                failure = Some(format!("evaluation failed at t={t:e}: {e}"));
                break;
            }
        }
    }
    let points = grid.len();
    if points == 0 {
        let none = (Status::Inconclusive, "audit grid is empty (no positive times)".to_string());
        return Audit {
            points,
            sublinear: none.clone(),
            increasing: none,
        };
    }
    if let Some(msg) = failure {
        return Audit {
            points,
            sublinear: (Status::Fails, msg.clone()),
            increasing: (Status::Fails, msg),
        };
    }
    let meta = sf.meta();

    let sublinear = match meta.sublinear {
        Some(s) => match values.iter().find(|&&(t, a, _)| a > s.m * t + s.b + 1e-12 * (1.0 + a)) {
            None => (Status::Holds, format!("a ≤ {:?}·t + {:?} audited", s.m, s.b)),
            Some(&(t, a, _)) => (
                Status::Fails,
                format!("a({t:e}) = {a:e} exceeds {:?}·t + {:?}", s.m, s.b),
            ),
        },
        None => fit_sublinear(&values),
    };

    let increasing = match values.iter().find(|v| !(v.2 > 0.0)) {
        Some(&(t, _, ap)) => (Status::Fails, format!("a'({t:e}) = {ap:e} is not positive")),
        None if meta.monotone_increasing => (Status::Holds, "a' > 0 asserted and audited".into()),
        None => (Status::SampledOnly, "a' > 0 on every grid point".into()),
    };

    Audit {
        points,
        sublinear,
        increasing,
    }
}

/// Without analytic bounds: take `b` from the early part of the grid and
/// `m` from the rest, then reject when `a/t` is still growing over the last
/// decade of the grid.
fn fit_sublinear(values: &[(f64, f64, f64)]) -> (Status, String) {
    let b = values
        .iter()
        .filter(|v| v.0 <= 1.0)
        .map(|v| v.1)
        .fold(0.0, f64::max);
    let m = values
        .iter()
        .filter(|v| v.0 > 1.0)
        .map(|v| (v.1 - b) / v.0)
        .fold(1e-12, f64::max);
    let (t_top, a_top, _) = values[values.len() - 1];
    let slope_top = a_top / t_top;
    let earlier = values
        .iter()
        .filter(|v| v.0 >= 1.0 && v.0 <= 0.1 * t_top)
        .map(|v| v.1 / v.0)
        .fold(f64::NAN, f64::max);
    if earlier.is_finite() && slope_top > 1.01 * earlier {
        return (
            Status::Fails,
            format!("a/t grows from {earlier:e} to {slope_top:e} over the last decade"),
        );
    }
    (
        Status::SampledOnly,
        format!("no analytic bound; grid fits a ≤ {m:e}·t + {b:e}"),
    )
}

fn k_in(spec: &SpacetimeSpec, allowed: &[Curvature], name: &str) -> Hypothesis {
    let names: Vec<&str> = allowed.iter().map(|c| c.name()).collect();
    check(
        name,
        allowed.contains(&spec.k),
        format!("K = {} ({}); requires {}", spec.k.k(), spec.k.name(), names.join(" or ")),
    )
}

fn dim_at_least_2(spec: &SpacetimeSpec) -> Hypothesis {
    check("dimension_at_least_2", spec.d >= 2, format!("d = {}", spec.d))
}

pub fn future_c0(spec: &SpacetimeSpec) -> Verdict {
    future_c0_with(&Diagnostics::new(spec))
}

pub fn future_c0_with(dx: &Diagnostics) -> Verdict {
    let spec = dx.spec;
    let mut hs = vec![
        k_in(spec, &[Curvature::Flat, Curvature::Hyperbolic], "i:flat_or_hyperbolic"),
        dx.sublinear("i:sublinear_growth"),
        dx.increasing("i:a_prime_positive"),
    ];
    hs.push(match dx.future() {
        Ok(d) => {
            let status = match d.kind {
                IntegralKind::Divergent => Status::Holds,
                IntegralKind::Convergent { .. } => Status::Fails,
                IntegralKind::Inconclusive => Status::Inconclusive,
            };
            hyp("ii:future_integral_diverges", status, describe_integral(d))
        }
        Err(e @ SfError::FiniteUpperEndpoint { .. }) => {
            hyp("ii:future_integral_diverges", Status::Fails, e.to_string())
        }
        Err(e) => hyp("ii:future_integral_diverges", Status::Inconclusive, e.to_string()),
    });
    let v = Verdict::decide(FUTURE_C0, "future C⁰-inextendible", hs);
    if spec.sf.t_inf() != 0.0 || spec.sf.t_sup() != f64::INFINITY {
        v.with_note("condition (i) audited on the given interval rather than (0, inf)")
    } else {
        v
    }
}

pub fn past_c01(spec: &SpacetimeSpec) -> Verdict {
    past_c01_with(&Diagnostics::new(spec))
}

pub fn past_c01_with(dx: &Diagnostics) -> Verdict {
    let hs = vec![dx.has_horizon("particle_horizon"), dx.big_bang("big_bang")];
    Verdict::decide(PAST_C01, "past C⁰,¹_loc-inextendible", hs)
}

pub fn past_c0(spec: &SpacetimeSpec) -> Verdict {
    past_c0_with(&Diagnostics::new(spec))
}

pub fn past_c0_with(dx: &Diagnostics) -> Verdict {
    let spec = dx.spec;
    let text = "past C⁰-inextendible";
    match spec.k {
        Curvature::Flat => Verdict::decide(
            PAST_C0,
            text,
            vec![k_in(spec, &[Curvature::Spherical, Curvature::Hyperbolic], "spherical_or_hyperbolic")],
        )
        .with_note("no general criterion known for flat FLRW with a Big Bang at finite time"),
        Curvature::Spherical => Verdict::decide(
            PAST_C0,
            text,
            vec![dim_at_least_2(spec), dx.no_horizon("no_particle_horizon")],
        ),
        Curvature::Hyperbolic => {
            let limit = match dx.sbierski() {
                Ok(d) => {
                    let status = match d.kind {
                        LimitKind::PlusInfinity => Status::Holds,
                        LimitKind::Finite(_) | LimitKind::Zero => Status::Fails,
                        LimitKind::Inconclusive => Status::Inconclusive,
                    };
                    hyp("sbierski_limit_infinite", status, describe_limit(d))
                }
                Err(e @ SfError::InfiniteLowerEndpoint) => {
                    hyp("sbierski_limit_infinite", Status::Fails, format!("{e}; stated for t → t_inf finite"))
                }
                Err(e) => hyp("sbierski_limit_infinite", Status::Inconclusive, e.to_string()),
            };
            Verdict::decide(
                PAST_C0,
                text,
                vec![dim_at_least_2(spec), dx.no_horizon("no_particle_horizon"), limit],
            )
        }
    }
}

pub fn ling_past_eternal(spec: &SpacetimeSpec) -> Verdict {
    ling_with(&Diagnostics::new(spec))
}

pub fn ling_with(dx: &Diagnostics) -> Verdict {
    let spec = dx.spec;
    let eternal = !spec.sf.t_inf().is_finite();
    let mut hs = vec![
        k_in(spec, &[Curvature::Flat], "flat"),
        dim_at_least_2(spec),
        check(
            "past_eternal",
            eternal,
            format!("t_inf = {}", fmt_endpoint(spec.sf.t_inf())),
        ),
    ];
    if eternal {
        hs.push(dx.big_bang("a_tends_to_zero"));
        hs.push(match dx.ling() {
            Ok(d) => {
                let status = match d.kind {
                    LimitKind::PlusInfinity => Status::Holds,
                    LimitKind::Finite(_) | LimitKind::Zero => Status::Fails,
                    LimitKind::Inconclusive => Status::Inconclusive,
                };
                hyp("ling_limit_infinite", status, describe_limit(d))
            }
            Err(e) => hyp("ling_limit_infinite", Status::Inconclusive, e.to_string()),
        });
    }
    Verdict::decide(LING, "past C⁰-inextendible", hs)
}

pub fn milne_like(spec: &SpacetimeSpec) -> Verdict {
    milne_like_with(&Diagnostics::new(spec))
}

pub fn milne_like_with(dx: &Diagnostics) -> Verdict {
    let spec = dx.spec;
    let mut hs = vec![
        k_in(spec, &[Curvature::Hyperbolic], "hyperbolic"),
        dx.no_horizon("no_particle_horizon"),
        dx.sublinear("sublinear_growth"),
        dx.increasing("a_prime_positive"),
        dx.slope_limit("a_prime_limit_one", |v| {
            v.is_some_and(|v| (v - 1.0).abs() <= UNIT_SLOPE_TOL)
        }),
    ];
    hs.push(match dx.sbierski() {
        Ok(d) => {
            let status = match d.kind {
                LimitKind::Finite(v) if v > 0.0 => Status::Holds,
                LimitKind::Inconclusive => Status::Inconclusive,
                _ => Status::Fails,
            };
            hyp("sbierski_limit_finite_positive", status, describe_limit(d))
        }
        Err(e @ SfError::InfiniteLowerEndpoint) => {
            hyp("sbierski_limit_finite_positive", Status::Fails, e.to_string())
        }
        Err(e) => hyp("sbierski_limit_finite_positive", Status::Inconclusive, e.to_string()),
    });
    Verdict::decide(MILNE_LIKE, "predicted C⁰-extendible (Milne-like)", hs)
}

pub fn symmetric_class_obstruction(spec: &SpacetimeSpec) -> Verdict {
    let dx = Diagnostics::new(spec);
    let future = future_c0_with(&dx);
    symmetric_with(&dx, &future)
}

/// The corollaries take future inextendibility as a hypothesis, so the
/// already computed `future_c0` verdict is passed in.
pub fn symmetric_with(dx: &Diagnostics, future: &Verdict) -> Verdict {
    let spec = dx.spec;
    let text = if spec.d == 3 {
        "no natural strongly spherically symmetric and no natural strongly axisymmetric C⁰-extension"
    } else {
        "no natural strongly spherically symmetric C⁰-extension"
    };
    let mut hs = vec![k_in(spec, &[Curvature::Flat, Curvature::Hyperbolic], "flat_or_hyperbolic")];
    if spec.k == Curvature::Spherical {
        return Verdict::decide(SYMMETRIC, text, hs);
    }
    hs.push(dim_at_least_2(spec));
    hs.push(dx.finite_big_bang("big_bang_at_finite_time"));
    hs.push(hyp(
        "future_inextendible",
        match future.conclusion {
            Conclusion::Applies => Status::Holds,
            Conclusion::DoesNotApply => Status::Fails,
            Conclusion::Inconclusive => Status::Inconclusive,
        },
        format!("{FUTURE_C0}: {}", future.conclusion),
    ));
    hs.push(match spec.k {
        Curvature::Flat => dx.slope_limit("a_prime_limit_in_(0,inf]", |v| match v {
            None => true,
            Some(v) => v > 0.0,
        }),
        _ => dx.slope_limit("a_prime_limit_in_[0,inf]_not_1", |v| match v {
            None => true,
            Some(v) => v >= 0.0 && (v - 1.0).abs() > UNIT_SLOPE_TOL,
        }),
    });
    let v = Verdict::decide(SYMMETRIC, text, hs);
    if spec.d != 3 {
        v.with_note("axisymmetric statement needs d = 3; only the spherical one is assessed")
    } else {
        v
    }
}

const D1_NOTE: &str = "past C⁰-extendible (d=1)";

/// Every statement on one spec.
pub fn full_report(spec: &SpacetimeSpec) -> CriterionReport {
    let dx = Diagnostics::new(spec);
    let future = future_c0_with(&dx);
    let mut verdicts = vec![
        future.clone(),
        past_c01_with(&dx),
        past_c0_with(&dx),
        ling_with(&dx),
        milne_like_with(&dx),
        symmetric_with(&dx, &future),
    ];
    if spec.d == 1 {
        for v in verdicts.iter_mut() {
            if [PAST_C0, LING, SYMMETRIC].contains(&v.id.as_str()) {
                if !v.hypotheses.iter().any(|h| h.name == "dimension_at_least_2") {
                    v.hypotheses.push(dim_at_least_2(spec));
                }
                v.conclusion = Conclusion::DoesNotApply;
                v.text = None;
                v.note = Some(D1_NOTE.into());
            }
        }
    }
    let table_row = table_row(spec, &verdicts);
    CriterionReport {
        spec: SpecEcho::of(spec),
        verdicts,
        table_row,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn table_row(spec: &SpacetimeSpec, verdicts: &[Verdict]) -> String {
    let get = |id: &str| verdicts.iter().find(|v| v.id == id).unwrap();
    let mut past = Vec::new();
    if get(PAST_C01).applies() {
        past.push("with particle horizon: C⁰,¹_loc-inext.".to_string());
    }
    if get(PAST_C0).applies() {
        past.push("no particle horizon: C⁰-inext.".to_string());
    }
    if get(LING).applies() {
        past.push("past eternal: C⁰-inext.".to_string());
    }
    if get(SYMMETRIC).applies() {
        past.push(if spec.d == 3 {
            "no nat. str. spherically symm. or axisymm. C⁰-extensions".to_string()
        } else {
            "no nat. str. spherically symm. C⁰-extensions".to_string()
        });
    }
    if get(MILNE_LIKE).applies() {
        past.push("Milne-like: C⁰-extendible".to_string());
    }
    if spec.d == 1 {
        past.push("d=1: past C⁰-extendible".to_string());
    }
    if past.is_empty() {
        past.push(if spec.k == Curvature::Flat {
            "open (no general criterion)".to_string()
        } else {
            "none established".to_string()
        });
    }
    let future = if get(FUTURE_C0).applies() {
        "C⁰-inext."
    } else {
        "not established"
    };
    format!(
        "K={} ({}), d={} | past: {} | future: {}",
        spec.k.k(),
        spec.k.name(),
        spec.d,
        past.join("; "),
        future
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale_factor::{Meta, Sublinear};

    const INF: f64 = f64::INFINITY;

    fn spec(k: Curvature, d: u32, a: &str, lo: f64, hi: f64) -> SpacetimeSpec {
        SpacetimeSpec::new(k, d, ScaleFactor::new(a, lo, hi).unwrap())
    }

    #[test]
    fn route_logic() {
        let ok = |n: &str| hyp(n, Status::Holds, "");
        let bad = |n: &str| hyp(n, Status::Fails, "");
        let unk = |n: &str| hyp(n, Status::Inconclusive, "");
        let v = Verdict::decide("x", "t", vec![bad("i:a"), ok("ii:b")]);
        assert_eq!(v.conclusion, Conclusion::Applies);
        let v = Verdict::decide("x", "t", vec![bad("i:a"), unk("ii:b")]);
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
        let v = Verdict::decide("x", "t", vec![bad("i:a"), bad("ii:b")]);
        assert_eq!(v.conclusion, Conclusion::DoesNotApply);
        let v = Verdict::decide("x", "t", vec![ok("a"), hyp("b", Status::SampledOnly, "")]);
        assert_eq!(v.conclusion, Conclusion::Applies);
        assert!(v.is_consistent());
    }

    #[test]
    fn future_radiation_both_routes() {
        let sf = ScaleFactor::new("t^(1/2)", 0.0, INF).unwrap().with_meta(Meta {
            sublinear: Some(Sublinear { m: 1.0, b: 1.0 }),
            ..Meta::default()
        });
        let v = future_c0(&SpacetimeSpec::new(Curvature::Flat, 3, sf));
        assert!(v.applies());
        for h in &v.hypotheses {
            assert!(h.status == Status::Holds || h.status == Status::SampledOnly, "{h:?}");
        }
    }

    #[test]
    fn future_decaying_spherical_fails() {
        let v = future_c0(&spec(Curvature::Spherical, 3, "exp(-t)", 0.0, INF));
        assert_eq!(v.conclusion, Conclusion::DoesNotApply);
    }

    #[test]
    fn sublinear_fit_rejects_quadratic() {
        let v = milne_like(&spec(Curvature::Hyperbolic, 3, "t+t^2", 0.0, INF));
        let h = v.hypotheses.iter().find(|h| h.name == "sublinear_growth").unwrap();
        assert_eq!(h.status, Status::Fails);
        assert_eq!(v.conclusion, Conclusion::DoesNotApply);
    }

    #[test]
    fn wrong_meta_is_caught() {
        let sf = ScaleFactor::new("t^2", 0.0, INF).unwrap().with_meta(Meta {
            sublinear: Some(Sublinear { m: 1.0, b: 0.0 }),
            ..Meta::default()
        });
        let v = future_c0(&SpacetimeSpec::new(Curvature::Flat, 3, sf));
        let h = v.hypotheses.iter().find(|h| h.name == "i:sublinear_growth").unwrap();
        assert_eq!(h.status, Status::Fails);
        // the integral route still holds
        assert!(v.applies());
    }

    #[test]
    fn past_c01_cases() {
        assert!(past_c01(&spec(Curvature::Flat, 3, "t^(1/2)", 0.0, INF)).applies());
        assert_eq!(
            past_c01(&spec(Curvature::Hyperbolic, 3, "t", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
        assert_eq!(past_c01(&spec(Curvature::Flat, 3, "1", 0.0, INF)).conclusion, Conclusion::DoesNotApply);
    }

    #[test]
    fn past_c0_cases() {
        assert_eq!(past_c0(&spec(Curvature::Hyperbolic, 3, "t", 0.0, INF)).conclusion, Conclusion::DoesNotApply);
        assert_eq!(
            past_c0(&spec(Curvature::Hyperbolic, 3, "t+t^2", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
        assert!(past_c0(&spec(Curvature::Spherical, 3, "t", 0.0, INF)).applies());
        let flat = past_c0(&spec(Curvature::Flat, 3, "t", 0.0, INF));
        assert_eq!(flat.conclusion, Conclusion::DoesNotApply);
        assert!(flat.note.unwrap().contains("no general criterion"));
    }

    #[test]
    fn ling_cases() {
        assert_eq!(
            ling_past_eternal(&spec(Curvature::Flat, 3, "exp(t)", -INF, INF)).conclusion,
            Conclusion::DoesNotApply
        );
        assert_eq!(
            ling_past_eternal(&spec(Curvature::Flat, 3, "t", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
        assert_eq!(
            ling_past_eternal(&spec(Curvature::Hyperbolic, 3, "exp(t)", -INF, INF)).conclusion,
            Conclusion::DoesNotApply
        );
    }

    #[test]
    fn milne_cases() {
        assert!(milne_like(&spec(Curvature::Hyperbolic, 3, "t", 0.0, INF)).applies());
        assert_eq!(
            milne_like(&spec(Curvature::Hyperbolic, 3, "t^(1/2)", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
    }

    #[test]
    fn symmetric_cases() {
        let v = symmetric_class_obstruction(&spec(Curvature::Flat, 3, "t^(1/2)", 0.0, INF));
        assert!(v.applies());
        assert!(v.text.unwrap().contains("axisymmetric"));
        assert_eq!(
            symmetric_class_obstruction(&spec(Curvature::Hyperbolic, 3, "t", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
        assert_eq!(
            symmetric_class_obstruction(&spec(Curvature::Spherical, 3, "t", 0.0, INF)).conclusion,
            Conclusion::DoesNotApply
        );
    }

    #[test]
    fn d1_override() {
        let r = full_report(&spec(Curvature::Spherical, 1, "t", 0.0, INF));
        assert_eq!(r.verdict(PAST_C0).unwrap().conclusion, Conclusion::DoesNotApply);
        assert_eq!(r.verdict(PAST_C0).unwrap().note.as_deref(), Some(D1_NOTE));
        assert!(r.table_row.contains("d=1"));
        let r3 = full_report(&spec(Curvature::Spherical, 3, "t", 0.0, INF));
        assert_eq!(r.verdict(FUTURE_C0), r3.verdict(FUTURE_C0));
        for v in &r.verdicts {
            assert!(v.is_consistent(), "{v:?}");
        }
    }

    #[test]
    fn report_has_one_verdict_per_statement() {
        let r = full_report(&spec(Curvature::Hyperbolic, 3, "t", 0.0, INF));
        let ids: Vec<&str> = r.verdicts.iter().map(|v| v.id.as_str()).collect();
        assert_eq!(ids, STATEMENT_IDS);
    }
}
