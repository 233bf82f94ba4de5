use serde::Serialize;

use super::{ScaleFactor, SfError};
use crate::quad::{integrate, QuadError, QuadTol};

/// Ratio of the default geometric schedule.
pub const DEFAULT_Q: f64 = 0.5;
/// Maximum schedule length.
pub const MAX_STEPS: usize = 60;

const ZERO_CUTOFF: f64 = 1e-12;
const INFINITY_CUTOFF: f64 = 1e12;
const CAUCHY_RTOL: f64 = 1e-4;
const MIN_SAMPLES: usize = 6;
/// The cutoff rules need only this many samples, all moving the same way.
const THRESHOLD_SAMPLES: usize = 3;
const TREND_WINDOW: usize = 5;
const DECAY_RATIO: f64 = 0.95;
const GROWTH_RATIO: f64 = 1.05;
const DIVERGENT_RATIO: f64 = 0.999;
const STABLE_SPREAD: f64 = 0.05;
/// Increments below this many ulps of the partial sum are rounding noise.
const ROUNDOFF_INCREMENTS: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum LimitKind {
    Finite(f64),
    Zero,
    PlusInfinity,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiag {
    pub kind: LimitKind,
    pub samples: Vec<(f64, f64)>,
    pub note: String,
}

impl LimitDiag {
    pub fn is_zero(&self) -> bool {
        self.kind == LimitKind::Zero
    }

    pub fn is_infinite(&self) -> bool {
        self.kind == LimitKind::PlusInfinity
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self.kind {
            LimitKind::Finite(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum IntegralKind {
    Convergent { value: f64, err: f64 },
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralDiag {
    pub kind: IntegralKind,
    /// `(cutoff, partial integral)` pairs.
    pub partials: Vec<(f64, f64)>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "integral")]
pub enum Horizon {
    HasHorizon(IntegralDiag),
    NoHorizon(IntegralDiag),
    Inconclusive(IntegralDiag),
}

impl Horizon {
    pub fn integral(&self) -> &IntegralDiag {
        match self {
            Horizon::HasHorizon(d) | Horizon::NoHorizon(d) | Horizon::Inconclusive(d) => d,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Horizon::HasHorizon(_) => "HasHorizon",
            Horizon::NoHorizon(_) => "NoHorizon",
            Horizon::Inconclusive(_) => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitTarget {
    A,
    APrime,
}

fn ratios(v: &[f64]) -> Option<Vec<f64>> {
    let w = &v[v.len() - TREND_WINDOW - 1..];
    let mut out = Vec::with_capacity(TREND_WINDOW);
    for p in w.windows(2) {
        if p[0] == 0.0 {
            return None;
        }
        out.push(p[1] / p[0]);
    }
    Some(out)
}

fn stable(r: &[f64]) -> bool {
    let (lo, hi) = r
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo <= STABLE_SPREAD * hi.abs()
}

fn monotone(r: &[f64], increasing: bool) -> bool {
    r.windows(2)
        .all(|p| if increasing { p[1] >= p[0] } else { p[1] <= p[0] })
}

/// Classifies a sampled sequence approaching a limit.
///
/// Cutoff rules come first and need only three samples: a last sample below
/// `1e-12` in magnitude with the last three shrinking is `Zero`, and a last
/// sample above `1e12` with the last three growing is `PlusInfinity`. Those
/// matter when overflow ends a schedule early. Everything else needs six
/// samples: the last three agreeing to `1e-4` is `Finite`. Failing that, the
/// last five successive ratios decide: all at most 0.95 and steady means
/// geometric decay to zero, all at least 1.05 and steady means geometric
/// growth. A 60-step halving schedule
/// takes `t^(-1/2)` only to about 1e9, so the ratio rules carry most power
/// laws.
pub fn classify_limit(samples: &[(f64, f64)]) -> (LimitKind, String) {
    let v: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let n = v.len();
    if n < THRESHOLD_SAMPLES {
        return (LimitKind::Inconclusive, format!("only {n} usable samples"));
    }
    let last = v[n - 1];
    let tail = &v[n - THRESHOLD_SAMPLES..];
    if last.abs() < ZERO_CUTOFF && tail.windows(2).all(|p| p[1].abs() <= p[0].abs()) {
        return (LimitKind::Zero, format!("|v| = {:e} below cutoff", last.abs()));
    }
    if last > INFINITY_CUTOFF && tail.windows(2).all(|p| p[1] > p[0]) {
        return (LimitKind::PlusInfinity, format!("v = {last:e} above cutoff"));
    }
    if n < MIN_SAMPLES {
        return (LimitKind::Inconclusive, format!("only {n} usable samples"));
    }
    if last != 0.0 && v[n - 3..].iter().all(|x| (x - last).abs() <= CAUCHY_RTOL * last.abs()) {
        return (LimitKind::Finite(last), "last three samples agree".into());
    }
    if let Some(r) = ratios(&v) {
        if r.iter().all(|&x| x > 0.0 && x <= DECAY_RATIO) && (stable(&r) || monotone(&r, false)) {
            return (LimitKind::Zero, format!("geometric decay, ratio {:.4}", r[r.len() - 1]));
        }
        if last > 0.0
            && r.iter().all(|&x| x >= GROWTH_RATIO)
            && (stable(&r) || monotone(&r, true))
        {
            return (LimitKind::PlusInfinity, format!("geometric growth, ratio {:.4}", r[r.len() - 1]));
        }
    }
    (LimitKind::Inconclusive, "no limit pattern recognized".into())
}

/// Classifies an improper integral from the increments between successive
/// cutoffs. `partials[k]` is the integral up to `cutoffs[k]`.
pub fn classify_increments(partials: &[(f64, f64)], quad_err: f64) -> (IntegralKind, String) {
    let n = partials.len();
    if n < MIN_SAMPLES {
        return (IntegralKind::Inconclusive, format!("only {n} usable partials"));
    }
    let mut inc: Vec<f64> = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &(_, p) in partials {
        inc.push(p - prev);
        prev = p;
    }
    // increments at the rounding level of the running sum carry no trend
    let noise = |k: usize| inc[k].abs() <= ROUNDOFF_INCREMENTS * f64::EPSILON * partials[k].1.abs();
    if let Some(cut) = (1..n).find(|&k| noise(k)) {
        if cut >= MIN_SAMPLES {
            let (kind, note) = classify_increments(&partials[..cut], quad_err);
            return (kind, format!("{note}; increments reach rounding level after {cut} cutoffs"));
        }
    }
    let value = partials[n - 1].1;
    if inc[n - 1] == 0.0 && inc[n - 2] == 0.0 {
        return (
            IntegralKind::Convergent { value, err: quad_err },
            "increments vanish".into(),
        );
    }
    let Some(r) = ratios(&inc) else {
        return (IntegralKind::Inconclusive, "zero increment inside window".into());
    };
    if r.iter().all(|&x| x >= 0.0 && x <= DECAY_RATIO) && (stable(&r) || monotone(&r, false)) {
        let rho = r[r.len() - 1];
        let rho_max = r.iter().cloned().fold(0.0, f64::max);
        let last = inc[n - 1];
        let tail = last * rho / (1.0 - rho);
        let tail_hi = last * rho_max / (1.0 - rho_max);
        let err = (tail_hi - tail).abs() + quad_err + 4.0 * f64::EPSILON * value.abs();
        return (
            IntegralKind::Convergent { value: value + tail, err },
            format!("geometric increments, ratio {rho:.4}"),
        );
    }
    if r.iter().all(|&x| x >= DIVERGENT_RATIO) {
        return (IntegralKind::Divergent, format!("increments do not decay, ratio {:.4}", r[r.len() - 1]));
    }
    (IntegralKind::Inconclusive, "increments neither decay nor persist".into())
}

fn lift(e: QuadError<SfError>) -> SfError {
    match e {
        QuadError::Integrand { source, .. } => source,
        QuadError::NonFinite { x } => SfError::NonFinite {
            t: x,
            what: "integrand".into(),
        },
        QuadError::NoConvergence { a, b } => SfError::Quadrature { a, b },
    }
}

fn quad_tol() -> QuadTol {
    QuadTol::default()
}

/// `∫_lo^hi g` with errors lifted into [`SfError`].
pub(crate) fn integral<G>(g: G, lo: f64, hi: f64) -> Result<(f64, f64), SfError>
where
    G: FnMut(f64) -> Result<f64, SfError>,
{
    integrate(g, lo, hi, quad_tol())
        .map(|r| (r.value, r.err))
        .map_err(lift)
}

fn inv_a(sf: &ScaleFactor) -> impl FnMut(f64) -> Result<f64, SfError> + '_ {
    move |t| sf.a(t).map(|a| 1.0 / a)
}

/// Runs `step` over the schedule, stopping quietly at the first numerical
/// breakdown and propagating every other error.
fn sweep<S>(schedule: &[f64], mut step: S) -> Result<(Vec<(f64, f64)>, String), SfError>
where
    S: FnMut(usize, f64) -> Result<f64, SfError>,
{
    let mut out = Vec::with_capacity(schedule.len());
    for (k, &t) in schedule.iter().enumerate() {
        match step(k, t) {
            Ok(v) if v.is_finite() => out.push((t, v)),
            Ok(_) => return Ok((out, format!("stopped at t={t:e}: non-finite value"))),
            Err(e) if e.is_numerical_breakdown() => {
                return Ok((out, format!("stopped at t={t:e}: {e}")))
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, String::new()))
}

fn finish(samples: Vec<(f64, f64)>, stop_note: String) -> LimitDiag {
    let (kind, note) = classify_limit(&samples);
    let note = if stop_note.is_empty() { note } else { format!("{note}; {stop_note}") };
    LimitDiag { kind, samples, note }
}

/// Limit of an arbitrary functional as `t → t_inf⁺` along the schedule with
/// ratio `q`.
pub fn limit_of<F>(sf: &ScaleFactor, q: f64, mut f: F) -> Result<LimitDiag, SfError>
where
    F: FnMut(f64) -> Result<f64, SfError>,
{
    let schedule = sf.lower_schedule(q);
    let (samples, stop) = sweep(&schedule, |_, t| f(t))?;
    Ok(finish(samples, stop))
}

/// `lim a` or `lim a'` as `t → t_inf⁺`.
pub fn limit_at_lower(sf: &ScaleFactor, what: LimitTarget) -> Result<LimitDiag, SfError> {
    limit_of(sf, DEFAULT_Q, |t| match what {
        LimitTarget::A => sf.a(t),
        LimitTarget::APrime => sf.a_prime(t),
    })
}

/// Classifies `∫_{t_inf}^{anchor} dt/a`.
pub fn has_particle_horizon(sf: &ScaleFactor) -> Result<Horizon, SfError> {
    let schedule = sf.lower_schedule(DEFAULT_Q);
    let anchor = sf.anchor();
    let mut acc = 0.0;
    let mut quad_err = 0.0;
    let mut upper = anchor;
    let (partials, stop) = sweep(&schedule, |_, t| {
        let (v, e) = integral(inv_a(sf), t, upper)?;
        acc += v;
        quad_err += e;
        upper = t;
        Ok(acc)
    })?;
    let (kind, note) = classify_increments(&partials, quad_err);
    let note = format!("upper anchor {anchor:?}; {note}{}", sep(&stop));
    let diag = IntegralDiag { kind, partials, note };
    Ok(match kind {
        IntegralKind::Convergent { .. } => Horizon::HasHorizon(diag),
        IntegralKind::Divergent => Horizon::NoHorizon(diag),
        IntegralKind::Inconclusive => Horizon::Inconclusive(diag),
    })
}

fn sep(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; {s}")
    }
}

/// Classifies `∫_anchor^∞ a/√(a²+1) dt` on cutoffs
/// `X_k = anchor + (2^k − 1)·max(1, |anchor|)`.
pub fn future_integral(sf: &ScaleFactor) -> Result<IntegralDiag, SfError> {
    if sf.t_sup().is_finite() {
        return Err(SfError::FiniteUpperEndpoint { t_sup: sf.t_sup() });
    }
    let anchor = sf.anchor();
    let unit = anchor.abs().max(1.0);
    let cutoffs: Vec<f64> = (1..=MAX_STEPS as i32)
        .map(|k| anchor + (2f64.powi(k) - 1.0) * unit)
        .collect();
    let mut acc = 0.0;
    let mut quad_err = 0.0;
    let mut lower = anchor;
    let (partials, stop) = sweep(&cutoffs, |_, x| {
        let (v, e) = integral(
            |t| sf.a(t).map(|a| if a.is_infinite() { 1.0 } else { a / a.hypot(1.0) }),
            lower,
            x,
        )?;
        acc += v;
        quad_err += e;
        lower = x;
        Ok(acc)
    })?;
    let (kind, note) = classify_increments(&partials, quad_err);
    Ok(IntegralDiag {
        kind,
        partials,
        note: format!("lower anchor {anchor:?}; {note}{}", sep(&stop)),
    })
}

/// Limit of `a(t)·exp(∫ₜ^anchor dt'/a)` as `t → t_inf⁺`.
pub fn sbierski_hyperbolic_limit(sf: &ScaleFactor) -> Result<LimitDiag, SfError> {
    sbierski_with_q(sf, DEFAULT_Q)
}

pub(crate) fn sbierski_with_q(sf: &ScaleFactor, q: f64) -> Result<LimitDiag, SfError> {
    if !sf.t_inf().is_finite() {
        return Err(SfError::InfiniteLowerEndpoint);
    }
    let schedule = sf.lower_schedule(q);
    let mut acc = 0.0;
    let mut upper = sf.anchor();
    let (samples, stop) = sweep(&schedule, |_, t| {
        acc += integral(inv_a(sf), t, upper)?.0;
        upper = t;
        let a = sf.a(t)?;
        Ok((a.ln() + acc).exp())
    })?;
    Ok(finish(samples, stop))
}

/// Limit of `a(t)·∫ₜ^anchor dt'/a` as `t → −∞`.
pub fn ling_limit(sf: &ScaleFactor) -> Result<LimitDiag, SfError> {
    if sf.t_inf().is_finite() {
        return Err(SfError::FiniteLowerEndpoint { t_inf: sf.t_inf() });
    }
    let schedule = sf.lower_schedule(DEFAULT_Q);
    let mut acc = 0.0;
    let mut upper = sf.anchor();
    let (samples, stop) = sweep(&schedule, |_, t| {
        acc += integral(inv_a(sf), t, upper)?.0;
        upper = t;
        Ok(sf.a(t)? * acc)
    })?;
    Ok(finish(samples, stop))
}
