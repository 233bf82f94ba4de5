//! Strongly spherically symmetric chart `(t, r) ↦ (T, R)` for flat and
//! hyperbolic FLRW.
//!
//! `R` and `G` are closed form. `T` is constant along curves orthogonal to
//! `∇R`, whose slope is `dr/dt = −R_r/(a²R_t)`. That ODE separates:
//! `Φ(t) + q(r)` is constant along each curve, where `Φ' = 1/(a a')` and
//! `q(r) = r²/2` (flat) or `ln cosh r` (hyperbolic). `Φ` is tabulated once
//! and every curve is then labeled exactly, without integrating it.
//!
//! Two labelings are offered. `Axis` labels a curve by the time `τ` at which
//! it reaches `r = 0`, so `T = Φ⁻¹(Q)`. This is the labeling under which
//! Milne becomes Minkowski with `F = 1`. `Slice` labels a curve by its radius
//! on the slice `t = t_ref`, so `T = ±q⁻¹(Q)`.

use serde::Serialize;
use thiserror::Error;

use crate::fd::solve_bracketed;
use crate::quad::{CumulativeTable, QuadError};
use crate::scale_factor::{ScaleFactor, SfError};

/// Membership tolerance for the excluded sets.
pub const TOL_EXC: f64 = 1e-9;

const PHI_RTOL: f64 = 1e-14;
const MAX_EXTENSIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Flat,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    Axis,
    Slice,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error(transparent)]
    Sf(#[from] SfError),
    #[error("degenerate point t={t}, r={r}: denominator {denominator:e}")]
    DegeneratePoint { t: f64, r: f64, denominator: f64 },
    #[error("region crosses the degenerate set near t={t}, r={r}")]
    RegionCrossesDegenerateSet { t: f64, r: f64 },
    #[error("characteristic through t={t}, r={r} escapes: {reason}")]
    CharacteristicEscapedRegion { t: f64, r: f64, reason: String },
    #[error("point ({x}, {y}) is outside the built region")]
    OutsideRegion { x: f64, y: f64 },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("a' vanishes or changes sign near t={t}")]
    StationaryScaleFactor { t: f64 },
    #[error("source field failed at T={t_cap}, R={r_cap}: {what}")]
    Source { t_cap: f64, r_cap: f64, what: String },
}

fn lift(e: QuadError<SfError>) -> ChartError {
    match e {
        QuadError::Integrand { source, .. } => ChartError::Sf(source),
        QuadError::NonFinite { x } => ChartError::StationaryScaleFactor { t: x },
        QuadError::NoConvergence { a, .. } => ChartError::StationaryScaleFactor { t: a },
    }
}

/// `R(t, r)`: `r·a` (flat) or `a·sinh r` (hyperbolic).
pub fn r_of(branch: Branch, sf: &ScaleFactor, t: f64, r: f64) -> Result<f64, ChartError> {
    let a = sf.a(t)?;
    Ok(match branch {
        Branch::Flat => r * a,
        Branch::Hyperbolic => a * r.sinh(),
    })
}

/// Denominator of `G`. The hyperbolic form `1 + sinh²r·(1 − a'²)` equals
/// `cosh²r − sinh²r·a'²` without the cancellation.
fn g_denominator(branch: Branch, r: f64, a_prime: f64) -> f64 {
    match branch {
        Branch::Flat => 1.0 - (r * a_prime).powi(2),
        Branch::Hyperbolic => {
            let s = r.sinh();
            1.0 + s * s * (1.0 - a_prime * a_prime)
        }
    }
}

/// `G(t, r)`: `1/(1 − r²a'²)` or `1/(cosh²r − sinh²r·a'²)`.
pub fn g_of(branch: Branch, sf: &ScaleFactor, t: f64, r: f64) -> Result<f64, ChartError> {
    let ap = sf.a_prime(t)?;
    let den = g_denominator(branch, r, ap);
    if den.abs() <= TOL_EXC {
        return Err(ChartError::DegeneratePoint { t, r, denominator: den });
    }
    Ok(1.0 / den)
}

/// The `dr²` coefficient of the FLRW metric, `a²` on both branches.
pub fn s_squared(sf: &ScaleFactor, t: f64) -> Result<f64, ChartError> {
    Ok(sf.a(t)?.powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExcludedKind {
    DegenerateJacobian,
    Axis,
    OutsideInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcludedSetDiag {
    pub kind: ExcludedKind,
    /// `|denominator of G|`, `r`, or the signed distance to the interval.
    pub distance: f64,
}

pub fn excluded_set(branch: Branch, sf: &ScaleFactor, t: f64, r: f64) -> Option<ExcludedSetDiag> {
    if !sf.contains(t) {
        let d = if t <= sf.t_inf() { t - sf.t_inf() } else { sf.t_sup() - t };
        return Some(ExcludedSetDiag {
            kind: ExcludedKind::OutsideInterval,
            distance: d,
        });
    }
    if r == 0.0 {
        return Some(ExcludedSetDiag {
            kind: ExcludedKind::Axis,
            distance: 0.0,
        });
    }
    let ap = match sf.a_prime(t) {
        Ok(v) => v,
        Err(_) => {
            return Some(ExcludedSetDiag {
                kind: ExcludedKind::OutsideInterval,
                distance: 0.0,
            })
        }
    };
    let den = g_denominator(branch, r, ap);
    (den.abs() <= TOL_EXC).then_some(ExcludedSetDiag {
        kind: ExcludedKind::DegenerateJacobian,
        distance: den.abs(),
    })
}

fn q_of(branch: Branch, r: f64) -> f64 {
    match branch {
        Branch::Flat => 0.5 * r * r,
        Branch::Hyperbolic => r.cosh().ln(),
    }
}

fn q_prime(branch: Branch, r: f64) -> f64 {
    match branch {
        Branch::Flat => r,
        Branch::Hyperbolic => r.tanh(),
    }
}

fn q_inverse(branch: Branch, u: f64) -> f64 {
    match branch {
        Branch::Flat => (2.0 * u).sqrt(),
        Branch::Hyperbolic => u.exp().acosh(),
    }
}

/// `r` at which the chart radius equals `R` on the slice `t`.
fn r_from_big_r(branch: Branch, a: f64, big_r: f64) -> f64 {
    match branch {
        Branch::Flat => big_r / a,
        Branch::Hyperbolic => (big_r / a).asinh(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub t: (f64, f64),
    pub r: (f64, f64),
}

impl Region {
    pub fn contains(&self, t: f64, r: f64) -> bool {
        t >= self.t.0 && t <= self.t.1 && r >= self.r.0 && r <= self.r.1
    }
}

#[derive(Debug, Clone)]
pub struct ChartParams {
    pub branch: Branch,
    pub sf: ScaleFactor,
    /// Reference slice; defaults to the lower edge of the region.
    pub t_ref: Option<f64>,
    pub labeling: Labeling,
}

#[derive(Debug, Clone)]
pub struct SphericalChart {
    branch: Branch,
    sf: ScaleFactor,
    labeling: Labeling,
    t_ref: f64,
    sign: f64,
    region: Region,
    ts: Vec<f64>,
    rs: Vec<f64>,
    t_field: Vec<f64>,
    f_field: Vec<f64>,
    phi: CumulativeTable,
    notes: Vec<String>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Builds `T` and `F` over `region` on an `nt × nr` grid.
pub fn build_tf(params: &ChartParams, region: Region, nt: usize, nr: usize) -> Result<SphericalChart, ChartError> {
    let ChartParams { branch, ref sf, labeling, .. } = *params;
    if nt < 2 || nr < 2 {
        return Err(ChartError::InvalidRegion("grid needs at least 2×2 nodes".into()));
    }
    let (t0, t1) = region.t;
    let (r0, r1) = region.r;
    if !(t0 < t1 && r0 < r1) {
        return Err(ChartError::InvalidRegion("empty rectangle".into()));
    }
    if !(sf.contains(t0) && sf.contains(t1)) {
        return Err(ChartError::InvalidRegion(format!(
            "t-range [{t0}, {t1}] is not inside the scale factor's interval"
        )));
    }
    if r0 <= 0.0 {
        return Err(ChartError::InvalidRegion("r-range must stay off the axis r = 0".into()));
    }
    let t_ref = params.t_ref.unwrap_or(t0);
    if !sf.contains(t_ref) {
        return Err(ChartError::InvalidRegion(format!("t_ref = {t_ref} is outside the interval")));
    }

    // G > 0 and a fixed sign of a' on a grid twice as fine as the chart's.
    let mut sign = 0.0;
    for &t in &linspace(t0, t1, 2 * nt - 1) {
        let ap = sf.a_prime(t)?;
        if ap == 0.0 || (sign != 0.0 && ap.signum() != sign) {
            return Err(ChartError::StationaryScaleFactor { t });
        }
        sign = ap.signum();
        for &r in &linspace(r0, r1, 2 * nr - 1) {
            if g_denominator(branch, r, ap) <= TOL_EXC {
                return Err(ChartError::RegionCrossesDegenerateSet { t, r });
            }
        }
    }
    let ts = linspace(t0, t1, nt);
    let rs = linspace(r0, r1, nr);

    let rate = |t: f64| sf.eval(t).map(|d| 1.0 / (d.value * d.deriv));
    let mut nodes = ts.clone();
    if !nodes.contains(&t_ref) {
        nodes.push(t_ref);
        nodes.sort_by(f64::total_cmp);
    }
    let mut phi = CumulativeTable::build(rate, nodes, t_ref, PHI_RTOL).map_err(lift)?;

    let mut notes = Vec::new();
    if branch == Branch::Hyperbolic {
        notes.push("hyperbolic branch: R = a·sinh r, the only radius compatible with G = a²/(R²(1−a'²)+a²)".into());
    }
    if labeling == Labeling::Axis {
        let q_max = phi
            .node_values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            + q_of(branch, r1);
        let mut grown = 0;
        loop {
            let (lo, hi) = phi.domain();
            let vals = phi.node_values();
            let reach = if sign > 0.0 { vals[vals.len() - 1] } else { vals[0] };
            if reach >= q_max {
                break;
            }
            grown += 1;
            let span = (hi - lo).max(1e-3);
            let next = if sign > 0.0 {
                let x = hi + span;
                if x < sf.t_sup() { x } else { hi + 0.5 * (sf.t_sup() - hi) }
            } else {
                let x = lo - span;
                if x > sf.t_inf() { x } else { lo - 0.5 * (lo - sf.t_inf()) }
            };
            let stuck = next == hi || next == lo || grown > MAX_EXTENSIONS;
            let extended = if stuck {
                Err(ChartError::StationaryScaleFactor { t: next })
            } else if sign > 0.0 {
                phi.push_back(rate, next, PHI_RTOL).map_err(lift)
            } else {
                phi.push_front(rate, next, PHI_RTOL).map_err(lift)
            };
            if let Err(e) = extended {
                return Err(ChartError::CharacteristicEscapedRegion {
                    t: t1,
                    r: r1,
                    reason: format!("does not reach the axis inside the interval ({e})"),
                });
            }
        }
        let (lo, hi) = phi.domain();
        if lo < t0 || hi > t1 {
            notes.push(format!("level-curve table extended to [{lo:?}, {hi:?}] to reach the axis"));
        }
    }

    let mut chart = SphericalChart {
        branch,
        sf: sf.clone(),
        labeling,
        t_ref,
        sign: if labeling == Labeling::Slice { sign } else { 1.0 },
        region,
        ts,
        rs,
        t_field: Vec::with_capacity(nt * nr),
        f_field: Vec::with_capacity(nt * nr),
        phi,
        notes,
    };
    for i in 0..nt {
        for j in 0..nr {
            let (t, r) = (chart.ts[i], chart.rs[j]);
            let (cap_t, f) = chart.eval_tf(t, r)?;
            chart.t_field.push(cap_t);
            chart.f_field.push(f);
        }
    }
    Ok(chart)
}

impl SphericalChart {
    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn scale_factor(&self) -> &ScaleFactor {
        &self.sf
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    /// Orientation applied to the slice label so `T` increases with `t`.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.ts, &self.rs)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// `T` and `F` at grid node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.rs.len() + j;
        (self.t_field[k], self.f_field[k])
    }

    fn rate(&self) -> impl FnMut(f64) -> Result<f64, SfError> + '_ {
        |t| self.sf.eval(t).map(|d| 1.0 / (d.value * d.deriv))
    }

    fn phi_at(&self, t: f64) -> Result<f64, ChartError> {
        match self.phi.eval(self.rate(), t) {
            Some(v) => v.map_err(lift),
            None => Err(ChartError::OutsideRegion { x: t, y: f64::NAN }),
        }
    }

    /// Level-curve constant `Q = Φ(t) + q(r)`.
    fn level(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        Ok(self.phi_at(t)? + q_of(self.branch, r))
    }

    /// `τ` with `Φ(τ) = Q`.
    fn phi_inverse(&self, target: f64, t: f64, r: f64) -> Result<f64, ChartError> {
        let escaped = || ChartError::CharacteristicEscapedRegion {
            t,
            r,
            reason: format!("level {target:e} is outside the tabulated range"),
        };
        let (lo, hi) = self.phi.bracket_value(target).ok_or_else(escaped)?;
        let root = solve_bracketed(
            |x| -> Result<(f64, f64), ChartError> {
                let d = self.sf.eval(x)?;
                Ok((self.phi_at(x)? - target, 1.0 / (d.value * d.deriv)))
            },
            lo,
            hi,
        )?;
        root.ok_or_else(escaped)
    }

    fn check_inside(&self, t: f64, r: f64) -> Result<(), ChartError> {
        if self.region.contains(t, r) {
            Ok(())
        } else {
            Err(ChartError::OutsideRegion { x: t, y: r })
        }
    }

    pub fn big_r(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        self.check_inside(t, r)?;
        r_of(self.branch, &self.sf, t, r)
    }

    pub fn g(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        self.check_inside(t, r)?;
        g_of(self.branch, &self.sf, t, r)
    }

    pub fn t_cap(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        self.eval_tf(t, r).map(|v| v.0)
    }

    pub fn f(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        self.eval_tf(t, r).map(|v| v.1)
    }

    /// `(T, F)` at any point of the region, evaluated exactly rather than
    /// interpolated from the grid.
    pub fn eval_tf(&self, t: f64, r: f64) -> Result<(f64, f64), ChartError> {
        self.check_inside(t, r)?;
        let d = self.sf.eval(t)?;
        let q_t = 1.0 / (d.value * d.deriv);
        let level = self.level(t, r)?;
        let (cap_t, t_t) = match self.labeling {
            Labeling::Axis => {
                let tau = self.phi_inverse(level, t, r)?;
                let e = self.sf.eval(tau)?;
                (tau, q_t * e.value * e.deriv)
            }
            Labeling::Slice => {
                if level <= 0.0 {
                    return Err(ChartError::CharacteristicEscapedRegion {
                        t,
                        r,
                        reason: format!("reaches the axis before the slice t = {}", self.t_ref),
                    });
                }
                let rho = q_inverse(self.branch, level);
                (self.sign * rho, self.sign * q_t / q_prime(self.branch, rho))
            }
        };
        let g = g_of(self.branch, &self.sf, t, r)?;
        let r_t = match self.branch {
            Branch::Flat => r * d.deriv,
            Branch::Hyperbolic => d.deriv * r.sinh(),
        };
        let f = (g * r_t * r_t + 1.0) / (t_t * t_t);
        Ok((cap_t, f))
    }

    /// Smallest and largest `R` over the grid.
    pub fn r_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in &self.ts {
            for &r in &self.rs {
                if let Ok(v) = r_of(self.branch, &self.sf, t, r) {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        (lo, hi)
    }

    /// Smallest and largest `T` over the grid.
    pub fn t_cap_range(&self) -> (f64, f64) {
        self.t_field
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// `(t, r)` with `T(t, r) = T` and `R(t, r) = R`, inside the region.
    pub fn invert(&self, cap_t: f64, big_r: f64) -> Result<(f64, f64), ChartError> {
        let outside = ChartError::OutsideRegion { x: cap_t, y: big_r };
        if !(big_r > 0.0) {
            return Err(outside);
        }
        let target = match self.labeling {
            Labeling::Axis => self.phi_at(cap_t).map_err(|_| outside.clone())?,
            Labeling::Slice => {
                let rho = self.sign * cap_t;
                if rho <= 0.0 {
                    return Err(outside);
                }
                q_of(self.branch, rho)
            }
        };
        let branch = self.branch;
        let root = solve_bracketed(
            |t| -> Result<(f64, f64), ChartError> {
                let d = self.sf.eval(t)?;
                let r = r_from_big_r(branch, d.value, big_r);
                // d r / d t at fixed R
                let r_t = match branch {
                    Branch::Flat => -r * d.deriv / d.value,
                    Branch::Hyperbolic => -r.tanh() * d.deriv / d.value,
                };
                let value = self.phi_at(t)? + q_of(branch, r) - target;
                let slope = 1.0 / (d.value * d.deriv) + q_prime(branch, r) * r_t;
                Ok((value, slope))
            },
            self.region.t.0,
            self.region.t.1,
        )?;
        let t = root.ok_or(outside.clone())?;
        let r = r_from_big_r(branch, self.sf.a(t)?, big_r);
        if !self.region.contains(t, r) {
            return Err(outside);
        }
        Ok((t, r))
    }

    /// `(F, G)` as functions of the new coordinates.
    pub fn fg_at(&self, cap_t: f64, big_r: f64) -> Result<(f64, f64), ChartError> {
        let (t, r) = self.invert(cap_t, big_r)?;
        let (_, f) = self.eval_tf(t, r)?;
        Ok((f, g_of(self.branch, &self.sf, t, r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::gradient;

    const INF: f64 = f64::INFINITY;

    fn sf(text: &str, lo: f64, hi: f64) -> ScaleFactor {
        ScaleFactor::new(text, lo, hi).unwrap()
    }

    fn params(branch: Branch, a: ScaleFactor, labeling: Labeling) -> ChartParams {
        ChartParams {
            branch,
            sf: a,
            t_ref: None,
            labeling,
        }
    }

    #[test]
    fn closed_forms() {
        let rad = sf("t^(1/2)", 0.0, INF);
        assert_eq!(r_of(Branch::Flat, &rad, 0.25, 2.0).unwrap(), 1.0);
        let milne = sf("t", 0.0, INF);
        assert_eq!(r_of(Branch::Hyperbolic, &milne, 1.0, 0.0).unwrap(), 0.0);
        let ds = sf("exp(t)", -INF, INF);
        assert_eq!(r_of(Branch::Flat, &ds, 0.0, 3.0).unwrap(), 3.0);
        for &(t, r) in &[(0.3, 0.2), (1.0, 2.5), (7.0, 0.01)] {
            assert_eq!(g_of(Branch::Hyperbolic, &milne, t, r).unwrap(), 1.0);
        }
        let g = g_of(Branch::Flat, &ds, -1.0, 0.5).unwrap();
        let big_r = 0.5 * (-1f64).exp();
        assert!((g - 1.0 / (1.0 - big_r * big_r)).abs() < 1e-15);
        assert!((g_of(Branch::Flat, &rad, 0.3, 1e-9).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_second_form() {
        let a = sf("sinh(t)", 0.0, INF);
        for &(t, r) in &[(0.5, 0.3), (1.2, 0.1), (0.2, 1.5)] {
            let (av, ap) = (a.a(t).unwrap(), a.a_prime(t).unwrap());
            let big_r = r_of(Branch::Hyperbolic, &a, t, r).unwrap();
            let other = av * av / (big_r * big_r * (1.0 - ap * ap) + av * av);
            let g = g_of(Branch::Hyperbolic, &a, t, r).unwrap();
            assert!((g - other).abs() <= 1e-12 * g.abs());
        }
    }

    #[test]
    fn excluded_sets() {
        let a = sf("t", 0.0, INF);
        assert_eq!(
            excluded_set(Branch::Flat, &a, 0.5, 1.0).unwrap().kind,
            ExcludedKind::DegenerateJacobian
        );
        assert!(excluded_set(Branch::Flat, &a, 0.5, 0.5).is_none());
        assert_eq!(excluded_set(Branch::Flat, &a, 0.5, 0.0).unwrap().kind, ExcludedKind::Axis);
        assert_eq!(
            excluded_set(Branch::Hyperbolic, &a, -1.0, 0.3).unwrap().kind,
            ExcludedKind::OutsideInterval
        );
        assert!(matches!(
            g_of(Branch::Flat, &a, 0.5, 1.0),
            Err(ChartError::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn milne_axis_labeling_is_minkowski_time() {
        let p = params(Branch::Hyperbolic, sf("t", 0.0, INF), Labeling::Axis);
        let region = Region { t: (0.5, 2.0), r: (0.1, 1.5) };
        let chart = build_tf(&p, region, 6, 5).unwrap();
        let (ts, rs) = chart.grid();
        for (i, &t) in ts.iter().enumerate() {
            for (j, &r) in rs.iter().enumerate() {
                let (cap_t, f) = chart.node(i, j);
                assert!((cap_t - t * r.cosh()).abs() < 1e-12 * cap_t, "{t} {r} {cap_t}");
                assert!((f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn de_sitter_static_time() {
        let p = params(Branch::Flat, sf("exp(t)", -INF, INF), Labeling::Axis);
        let region = Region { t: (-1.0, 0.5), r: (0.05, 0.5) };
        let chart = build_tf(&p, region, 5, 5).unwrap();
        for &(t, r) in &[(-0.7, 0.2), (0.3, 0.49), (0.0, 0.06)] {
            let big_r: f64 = r * f64::exp(t);
            let (cap_t, f) = chart.eval_tf(t, r).unwrap();
            assert!((cap_t - (t - 0.5 * (1.0 - big_r * big_r).ln())).abs() < 1e-12);
            assert!((f - (1.0 - big_r * big_r)).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_labeling_relabels_milne() {
        let p = params(Branch::Hyperbolic, sf("t", 0.0, INF), Labeling::Slice);
        let region = Region { t: (0.5, 2.0), r: (0.1, 1.5) };
        let chart = build_tf(&p, region, 4, 4).unwrap();
        // t_ref·cosh T = t·cosh r
        let (cap_t, _) = chart.eval_tf(1.3, 0.7).unwrap();
        assert!((0.5 * cap_t.cosh() - 1.3 * 0.7f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn orthogonality_ratio() {
        // (T_t/T_r)² = (G R_t² + 1)/(G R_r² − a²) on the flat branch
        let p = params(Branch::Flat, sf("t^(2/3)", 0.0, INF), Labeling::Axis);
        let region = Region { t: (1.0, 2.0), r: (0.1, 0.8) };
        let chart = build_tf(&p, region, 4, 4).unwrap();
        let a = chart.scale_factor().clone();
        let (t, r) = (1.4, 0.5);
        let (tt, tr) = gradient(|x, y| chart.t_cap(x, y), t, r, 1e-5).unwrap();
        let (av, ap) = (a.a(t).unwrap(), a.a_prime(t).unwrap());
        let g = chart.g(t, r).unwrap();
        let (r_t, r_r) = (r * ap, av);
        let rhs = (g * r_t * r_t + 1.0) / (g * r_r * r_r - av * av);
        assert!(((tt / tr).powi(2) - rhs).abs() < 1e-7 * rhs, "{} {rhs}", (tt / tr).powi(2));
    }

    #[test]
    fn t_increases_with_t() {
        for labeling in [Labeling::Axis, Labeling::Slice] {
            let p = params(Branch::Flat, sf("t^(1/2)", 0.0, INF), labeling);
            let region = Region { t: (1.0, 3.0), r: (0.1, 1.0) };
            let chart = build_tf(&p, region, 8, 5).unwrap();
            for j in 0..5 {
                for i in 1..8 {
                    assert!(chart.node(i, j).0 > chart.node(i - 1, j).0);
                }
            }
        }
    }

    #[test]
    fn degenerate_region_is_rejected() {
        let p = params(Branch::Flat, sf("t", 0.0, INF), Labeling::Axis);
        let r = build_tf(&p, Region { t: (0.5, 1.0), r: (0.5, 1.5) }, 4, 4);
        assert!(matches!(r, Err(ChartError::RegionCrossesDegenerateSet { .. })));
    }

    #[test]
    fn inverse_round_trip() {
        let p = params(Branch::Flat, sf("exp(t)", -INF, INF), Labeling::Axis);
        let chart = build_tf(&p, Region { t: (-1.0, 0.5), r: (0.05, 0.5) }, 5, 5).unwrap();
        let (t, r) = (-0.2, 0.3);
        let cap_t = chart.t_cap(t, r).unwrap();
        let big_r = chart.big_r(t, r).unwrap();
        let (t2, r2) = chart.invert(cap_t, big_r).unwrap();
        assert!((t - t2).abs() < 1e-12 && (r - r2).abs() < 1e-12);
        assert!(chart.invert(cap_t, 5.0).is_err());
    }
}
