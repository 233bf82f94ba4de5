//! Strongly axisymmetric chart `(T, R, θ) ↦ (T, z, ρ)` built on top of a
//! strongly spherically symmetric metric `−F dT² + G dR² + R² dΩ²`.
//!
//! `ρ = R sinθ` and `z = f(cosθ·e^{I})` with `I(T, R) = ∫_{R₀}^{R} G(T, s)/s ds`.
//! `z` is constant along the characteristics `dθ/dR = G cosθ/(R sinθ)`, and the
//! metric becomes `−A dT² + B dz² + C dρ² + ρ² dφ²` with
//! `A = F`, `C = G/D`, `B = R²/(e^{2I} f'² D)`, where `D = G cos²θ + sin²θ`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_with_var, Dual, Expr, ExprError};
use crate::ode::{self, OdeError, OdeOptions};
use crate::quad::{integrate, QuadError, QuadTol};
use crate::sph_chart::{ChartError, SphericalChart, TOL_EXC};

/// `|sinθ|` below which the integration of a characteristic stops.
pub const POLE_TOL: f64 = 1e-6;

const INT_TOL: QuadTol = QuadTol {
    abs: 1e-13,
    rel: 1e-13,
    max_depth: 40,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiError {
    #[error(transparent)]
    Source(#[from] ChartError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("path from R0={r0} to R={r} at T={t_cap} crosses a singularity of G: {detail}")]
    PathCrossesSingularity { t_cap: f64, r0: f64, r: f64, detail: String },
    #[error("profile violates its contract at x={x}: {what}")]
    ProfileViolation { x: f64, what: String },
    #[error("degenerate point R={r}, θ={theta}: residual {residual:e}")]
    DegeneratePoint { r: f64, theta: f64, residual: f64 },
    #[error("characteristic reached the axis near R={r} (θ={theta})")]
    ThetaHitPole { r: f64, theta: f64 },
    #[error("characteristic starts on the equator θ=π/2 at R={r}")]
    ThetaHitEquator { r: f64 },
    #[error("θ={theta} is not inside (0, π)")]
    InvalidTheta { theta: f64 },
    #[error("base radius R0={r0} is not inside ({lo}, {hi})")]
    InvalidBase { r0: f64, lo: f64, hi: f64 },
    #[error("characteristic integration failed near R={r}: {detail}")]
    Integration { r: f64, detail: String },
}

type FgFn = dyn Fn(f64, f64) -> Result<(f64, f64), String> + Send + Sync;

/// A `(F, G)` field given directly, independent of any FLRW chart.
#[derive(Clone)]
pub struct SyntheticFg {
    name: String,
    t_range: (f64, f64),
    r_range: (f64, f64),
    field: Arc<FgFn>,
}

impl fmt::Debug for SyntheticFg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntheticFg")
            .field("name", &self.name)
            .field("t_range", &self.t_range)
            .field("r_range", &self.r_range)
            .finish()
    }
}

impl SyntheticFg {
    pub fn from_fn<F>(name: &str, t_range: (f64, f64), r_range: (f64, f64), field: F) -> Self
    where
        F: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        SyntheticFg {
            name: name.to_string(),
            t_range,
            r_range,
            field: Arc::new(move |t, r| Ok(field(t, r))),
        }
    }

    /// `F` and `G` as expressions in `R`.
    pub fn from_exprs(f_text: &str, g_text: &str, t_range: (f64, f64), r_range: (f64, f64)) -> Result<Self, ExprError> {
        let f = parse_with_var(f_text, "R")?;
        let g = parse_with_var(g_text, "R")?;
        Ok(SyntheticFg {
            name: format!("F={f_text}, G={g_text}"),
            t_range,
            r_range,
            field: Arc::new(move |_, r| {
                let fv = f.eval(r).map_err(|e| e.to_string())?;
                let gv = g.eval(r).map_err(|e| e.to_string())?;
                Ok((fv, gv))
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    Spherical(Box<SphericalChart>),
    Synthetic(SyntheticFg),
}

impl Source {
    pub fn fg(&self, t_cap: f64, r: f64) -> Result<(f64, f64), AxiError> {
        match self {
            Source::Spherical(chart) => Ok(chart.fg_at(t_cap, r)?),
            Source::Synthetic(s) => {
                let (lo, hi) = s.r_range;
                if !(r >= lo && r <= hi) {
                    return Err(ChartError::OutsideRegion { x: t_cap, y: r }.into());
                }
                (s.field)(t_cap, r).map_err(|what| {
                    ChartError::Source {
                        t_cap,
                        r_cap: r,
                        what,
                    }
                    .into()
                })
            }
        }
    }

    pub fn t_range(&self) -> (f64, f64) {
        match self {
            Source::Spherical(chart) => chart.t_cap_range(),
            Source::Synthetic(s) => s.t_range,
        }
    }

    pub fn r_range(&self) -> (f64, f64) {
        match self {
            Source::Spherical(chart) => chart.r_range(),
            Source::Synthetic(s) => s.r_range,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Source::Spherical(chart) => format!("spherical chart ({:?} branch)", chart.branch()).to_lowercase(),
            Source::Synthetic(s) => format!("synthetic {}", s.name),
        }
    }
}

/// The free function `f` in `z = f(cosθ·e^{I})`; it needs `f(0) = 0` and
/// `f' ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Identity,
    Expr(Expr),
}

impl Profile {
    /// `identity` or an expression in `x`.
    pub fn parse(text: &str) -> Result<Profile, ExprError> {
        match text.trim() {
            "identity" | "x" => Ok(Profile::Identity),
            other => parse_with_var(other, "x").map(Profile::Expr),
        }
    }

    pub fn eval(&self, x: f64) -> Result<Dual, AxiError> {
        let d = match self {
            Profile::Identity => Dual::variable(x),
            Profile::Expr(e) => e.eval_dual(x)?,
        };
        if d.deriv.abs() <= 1e-12 {
            return Err(AxiError::ProfileViolation {
                x,
                what: format!("f'(x) = {:e}", d.deriv),
            });
        }
        Ok(d)
    }

    /// Checks `f(0) = 0` and that `f'` keeps one sign on `[-10, 10]`.
    pub fn validate(&self) -> Result<(), AxiError> {
        let zero = self.eval(0.0)?;
        if zero.value.abs() > 1e-12 {
            return Err(AxiError::ProfileViolation {
                x: 0.0,
                what: format!("f(0) = {:e}", zero.value),
            });
        }
        // a sign change of f' between sweep points hides a zero
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=2000 {
            let x = -10.0 + 0.01 * i as f64;
            let d = self.eval(x)?.deriv;
            if let Some((x0, d0)) = prev {
                if d0.signum() != d.signum() {
                    return Err(AxiError::ProfileViolation {
                        x: 0.5 * (x0 + x),
                        what: format!("f' changes sign on [{x0}, {x}]"),
                    });
                }
            }
            prev = Some((x, d));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Cross-term coefficients, zero by construction.
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignCase {
    CaseI,
    CaseII,
    CaseIII,
    Degenerate,
}

impl SignCase {
    pub fn label(self) -> &'static str {
        match self {
            SignCase::CaseI => "I",
            SignCase::CaseII => "II",
            SignCase::CaseIII => "III",
            SignCase::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegeneracyKind {
    GTanLocus,
    AxisTheta,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegeneracyDiag {
    pub kind: DegeneracyKind,
    pub residual: f64,
}

/// `G cos²θ + sin²θ`.
pub fn locus_residual(g: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    g * c * c + s * s
}

pub fn degeneracy(g: f64, theta: f64) -> DegeneracyDiag {
    let s = theta.sin().abs();
    if s <= TOL_EXC {
        return DegeneracyDiag {
            kind: DegeneracyKind::AxisTheta,
            residual: s,
        };
    }
    let residual = locus_residual(g, theta).abs();
    let kind = if residual <= TOL_EXC {
        DegeneracyKind::GTanLocus
    } else {
        DegeneracyKind::None
    };
    DegeneracyDiag { kind, residual }
}

/// Sign pattern of `(A, B, C)`. Anything other than the three Lorentzian
/// patterns, including `F·G < 0`, is reported as degenerate.
pub fn sign_case(f: f64, g: f64, theta: f64) -> SignCase {
    if degeneracy(g, theta).kind != DegeneracyKind::None || f == 0.0 || g == 0.0 {
        return SignCase::Degenerate;
    }
    let d = locus_residual(g, theta);
    let (b_pos, c_pos) = (d > 0.0, g / d > 0.0);
    match (f > 0.0, b_pos, c_pos) {
        (true, true, true) => SignCase::CaseI,
        (false, false, true) => SignCase::CaseII,
        (false, true, false) => SignCase::CaseIII,
        _ => SignCase::Degenerate,
    }
}

/// Everything the chart knows at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiPoint {
    pub t_cap: f64,
    pub r: f64,
    pub theta: f64,
    pub z: f64,
    pub rho: f64,
    pub coeffs: Option<AxiCoeffs>,
    pub jacobian: f64,
    pub case: SignCase,
    pub degeneracy: DegeneracyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharCurve {
    pub rs: Vec<f64>,
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AxiChart {
    source: Source,
    r0: f64,
    profile: Profile,
    notes: Vec<String>,
}

pub fn rho_of(r: f64, theta: f64) -> f64 {
    r * theta.sin()
}

fn check_theta(theta: f64) -> Result<(), AxiError> {
    if theta > 0.0 && theta < std::f64::consts::PI {
        Ok(())
    } else {
        Err(AxiError::InvalidTheta { theta })
    }
}

impl AxiChart {
    /// `r0 = None` puts the base radius at the midpoint of the source's
    /// `R`-range.
    pub fn new(source: Source, r0: Option<f64>, profile: Profile) -> Result<AxiChart, AxiError> {
        profile.validate()?;
        let (lo, hi) = source.r_range();
        let r0 = r0.unwrap_or(0.5 * (lo + hi));
        if !(r0 > 0.0 && r0 >= lo && r0 <= hi) {
            return Err(AxiError::InvalidBase { r0, lo, hi });
        }
        let notes = vec![format!(
            "base radius R0 = {r0:?}; moving it rescales e^I by a T-dependent factor"
        )];
        Ok(AxiChart {
            source,
            r0,
            profile,
            notes,
        })
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn fg(&self, t_cap: f64, r: f64) -> Result<(f64, f64), AxiError> {
        self.source.fg(t_cap, r)
    }

    /// `∫_{R₀}^{R} G(T, s)/s ds`.
    pub fn int_g_over_r(&self, t_cap: f64, r: f64) -> Result<f64, AxiError> {
        if r == self.r0 {
            return Ok(0.0);
        }
        let crossing = |detail: String| AxiError::PathCrossesSingularity {
            t_cap,
            r0: self.r0,
            r,
            detail,
        };
        if !(r > 0.0) {
            return Err(crossing("R must be positive".into()));
        }
        let integrand = |s: f64| self.source.fg(t_cap, s).map(|(_, g)| g / s);
        match integrate(integrand, self.r0, r, INT_TOL) {
            Ok(q) => Ok(q.value),
            Err(QuadError::Integrand { source, .. }) => match source {
                AxiError::Source(ChartError::OutsideRegion { .. }) => Err(source),
                other => Err(crossing(other.to_string())),
            },
            Err(e) => Err(crossing(format!("{e:?}"))),
        }
    }

    fn profile_at(&self, t_cap: f64, r: f64, theta: f64) -> Result<(f64, Dual), AxiError> {
        check_theta(theta)?;
        let e = self.int_g_over_r(t_cap, r)?.exp();
        Ok((e, self.profile.eval(theta.cos() * e)?))
    }

    pub fn z_of(&self, t_cap: f64, r: f64, theta: f64) -> Result<f64, AxiError> {
        self.profile_at(t_cap, r, theta).map(|(_, f)| f.value)
    }

    pub fn coeffs(&self, t_cap: f64, r: f64, theta: f64) -> Result<AxiCoeffs, AxiError> {
        check_theta(theta)?;
        let (f_val, g) = self.fg(t_cap, r)?;
        let diag = degeneracy(g, theta);
        if diag.kind != DegeneracyKind::None {
            return Err(AxiError::DegeneratePoint {
                r,
                theta,
                residual: diag.residual,
            });
        }
        let (e, f) = self.profile_at(t_cap, r, theta)?;
        let d = locus_residual(g, theta);
        Ok(AxiCoeffs {
            a: f_val,
            b: r * r / (e * e * f.deriv * f.deriv * d),
            c: g / d,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        })
    }

    /// `det ∂(z, ρ)/∂(R, θ) = f'·e^{I}·(G cos²θ + sin²θ)`.
    pub fn jacobian(&self, t_cap: f64, r: f64, theta: f64) -> Result<f64, AxiError> {
        let (_, g) = self.fg(t_cap, r)?;
        let (e, f) = self.profile_at(t_cap, r, theta)?;
        Ok(f.deriv * e * locus_residual(g, theta))
    }

    /// `∂z/∂θ = −sinθ·e^{I}·f'`, never zero off the axis.
    pub fn z_theta(&self, t_cap: f64, r: f64, theta: f64) -> Result<f64, AxiError> {
        let (e, f) = self.profile_at(t_cap, r, theta)?;
        Ok(-theta.sin() * e * f.deriv)
    }

    pub fn point(&self, t_cap: f64, r: f64, theta: f64) -> Result<AxiPoint, AxiError> {
        check_theta(theta)?;
        let (f_val, g) = self.fg(t_cap, r)?;
        let (e, f) = self.profile_at(t_cap, r, theta)?;
        let diag = degeneracy(g, theta);
        let d = locus_residual(g, theta);
        let coeffs = (diag.kind == DegeneracyKind::None).then(|| AxiCoeffs {
            a: f_val,
            b: r * r / (e * e * f.deriv * f.deriv * d),
            c: g / d,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        });
        Ok(AxiPoint {
            t_cap,
            r,
            theta,
            z: f.value,
            rho: rho_of(r, theta),
            coeffs,
            jacobian: f.deriv * e * d,
            case: sign_case(f_val, g, theta),
            degeneracy: diag.kind,
        })
    }

    /// Integrates `dθ/dR = G cosθ/(R sinθ)` at fixed `T` from `(r_start, θ0)`
    /// and samples it at `n` evenly spaced radii up to `r_end`.
    pub fn characteristic_curve(
        &self,
        t_cap: f64,
        theta0: f64,
        r_start: f64,
        r_end: f64,
        n: usize,
    ) -> Result<CharCurve, AxiError> {
        check_theta(theta0)?;
        if (theta0 - std::f64::consts::FRAC_PI_2).abs() <= 1e-12 {
            return Err(AxiError::ThetaHitEquator { r: r_start });
        }
        let n = n.max(2);
        let outputs: Vec<f64> = (1..n)
            .map(|i| {
                if i + 1 == n {
                    r_end
                } else {
                    r_start + (r_end - r_start) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        let rhs = |r: f64, th: f64| -> Result<f64, AxiError> {
            let s = th.sin();
            if s.abs() < POLE_TOL {
                return Err(AxiError::ThetaHitPole { r, theta: th });
            }
            let (_, g) = self.fg(t_cap, r)?;
            Ok(g * th.cos() / (r * s))
        };
        let opts = OdeOptions {
            rtol: 1e-11,
            atol: 1e-13,
            ..OdeOptions::default()
        };
        let sol = ode::solve(rhs, r_start, theta0, &outputs, opts, |_, th| th.sin().abs() < POLE_TOL)
            .map_err(|e| match e {
                OdeError::Rhs { source, .. } => source,
                OdeError::StepUnderflow { x } | OdeError::MaxSteps { x } => AxiError::Integration {
                    r: x,
                    detail: format!("{e:?}"),
                },
            })?;
        if let Some(r) = sol.stopped {
            return Err(AxiError::ThetaHitPole {
                r,
                theta: sol.ys.last().copied().unwrap_or(theta0),
            });
        }
        let mut rs = vec![r_start];
        let mut thetas = vec![theta0];
        rs.extend(sol.xs);
        thetas.extend(sol.ys);
        Ok(CharCurve { rs, thetas })
    }
}
