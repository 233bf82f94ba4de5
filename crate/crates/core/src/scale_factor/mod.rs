//! The scale factor `a(t)` on its open interval, plus the one-sided limits
//! and improper integrals that the inextendibility criteria depend on.

mod diag;

pub use diag::{
    classify_increments, classify_limit, future_integral, has_particle_horizon, limit_at_lower,
    limit_of, ling_limit, sbierski_hyperbolic_limit, Horizon, IntegralDiag, IntegralKind,
    LimitDiag, LimitKind, LimitTarget, DEFAULT_Q, MAX_STEPS,
};

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Dual, Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid interval ({t_inf}, {t_sup})")]
    InvalidInterval { t_inf: f64, t_sup: f64 },
    #[error("t={t} is not inside ({t_inf}, {t_sup})")]
    OutsideInterval { t: f64, t_inf: f64, t_sup: f64 },
    #[error("scale factor is negative at t={t}: a={value}")]
    NonPositive { t: f64, value: f64 },
    #[error("anchor {anchor} is not inside the interval")]
    AnchorOutsideInterval { anchor: f64 },
    #[error("upper endpoint {t_sup} is finite")]
    FiniteUpperEndpoint { t_sup: f64 },
    #[error("lower endpoint {t_inf} is finite")]
    FiniteLowerEndpoint { t_inf: f64 },
    #[error("lower endpoint is -inf")]
    InfiniteLowerEndpoint,
    #[error("non-finite value at t={t}: {what}")]
    NonFinite { t: f64, what: String },
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
}

impl SfError {
    /// Overflow, underflow to a singular integrand, or a quadrature that
    /// cannot resolve the integrand. Limit schedules stop at such points
    /// instead of failing.
    pub fn is_numerical_breakdown(&self) -> bool {
        matches!(
            self,
            SfError::NonFinite { .. }
                | SfError::Quadrature { .. }
                | SfError::Expr(ExprError::NonFinite { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sublinear {
    pub m: f64,
    pub b: f64,
}

/// Analytic facts the user asserts about `a`. They are audited, not trusted.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Meta {
    pub monotone_increasing: bool,
    pub sublinear: Option<Sublinear>,
    pub positivity_asserted: bool,
}

#[derive(Debug, Clone)]
pub struct ScaleFactor {
    expr: Expr,
    t_inf: f64,
    t_sup: f64,
    anchor: f64,
    meta: Meta,
}

impl ScaleFactor {
    pub fn new(text: &str, t_inf: f64, t_sup: f64) -> Result<Self, SfError> {
        Self::from_expr(parse(text)?, t_inf, t_sup)
    }

    pub fn from_expr(expr: Expr, t_inf: f64, t_sup: f64) -> Result<Self, SfError> {
        let valid = !t_inf.is_nan()
            && !t_sup.is_nan()
            && t_inf < t_sup
            && t_inf != f64::INFINITY
            && t_sup != f64::NEG_INFINITY;
        if !valid {
            return Err(SfError::InvalidInterval { t_inf, t_sup });
        }
        Ok(ScaleFactor {
            expr,
            t_inf,
            t_sup,
            anchor: default_anchor(t_inf, t_sup),
            meta: Meta::default(),
        })
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_anchor(mut self, anchor: f64) -> Result<Self, SfError> {
        if !self.contains(anchor) {
            return Err(SfError::AnchorOutsideInterval { anchor });
        }
        self.anchor = anchor;
        Ok(self)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn t_inf(&self) -> f64 {
        self.t_inf
    }

    pub fn t_sup(&self) -> f64 {
        self.t_sup
    }

    /// Upper limit of the integrals `∫ₜ^anchor dt'/a`.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.t_inf && t < self.t_sup
    }

    /// `(a(t), a'(t))`. A negative value is an error; an exact zero is
    /// accepted because it only arises from underflow near a Big Bang.
    pub fn eval(&self, t: f64) -> Result<Dual, SfError> {
        if !self.contains(t) {
            return Err(SfError::OutsideInterval {
                t,
                t_inf: self.t_inf,
                t_sup: self.t_sup,
            });
        }
        let d = self.expr.eval_dual(t)?;
        if d.value < 0.0 {
            return Err(SfError::NonPositive { t, value: d.value });
        }
        Ok(d)
    }

    pub fn a(&self, t: f64) -> Result<f64, SfError> {
        self.eval(t).map(|d| d.value)
    }

    pub fn a_prime(&self, t: f64) -> Result<f64, SfError> {
        self.eval(t).map(|d| d.deriv)
    }

    /// Geometric schedule approaching `t_inf` from above: `t_k` for
    /// `k = 1..=MAX_STEPS`, stopping early once a point is no longer strictly
    /// inside the interval.
    pub fn lower_schedule(&self, q: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(MAX_STEPS);
        for k in 1..=MAX_STEPS as i32 {
            let t = if self.t_inf.is_finite() {
                self.t_inf + (self.anchor - self.t_inf) * q.powi(k)
            } else {
                (self.anchor - 1.0).min(-1.0) * q.powi(-k)
            };
            if !self.contains(t) {
                break;
            }
            out.push(t);
        }
        out
    }

    /// Interval endpoints as display strings (`-inf`, `inf` for infinities).
    pub fn interval_strings(&self) -> (String, String) {
        (fmt_endpoint(self.t_inf), fmt_endpoint(self.t_sup))
    }
}

pub fn fmt_endpoint(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

/// Parses `inf`, `+inf`, `-inf` or a decimal number.
pub fn parse_endpoint(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        other => other.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// 1 when it lies inside the interval. Otherwise the midpoint of a bounded
/// interval, twice a positive lower endpoint for `(c, ∞)`, or one unit (at
/// least) below a finite upper endpoint.
pub fn default_anchor(t_inf: f64, t_sup: f64) -> f64 {
    if t_inf < 1.0 && 1.0 < t_sup {
        1.0
    } else if t_inf.is_finite() && t_sup.is_finite() {
        0.5 * (t_inf + t_sup)
    } else if t_inf.is_finite() && t_inf > 0.0 {
        2.0 * t_inf
    } else {
        t_sup - t_sup.abs().max(1.0)
    }
}
