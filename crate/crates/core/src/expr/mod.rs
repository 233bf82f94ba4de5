//! Scale-factor expressions: parsing, canonical printing and evaluation with
//! exact first derivatives.

mod ast;
mod dual;
mod parser;

pub use ast::{Expr, Func};
pub use dual::Dual;
pub use parser::{parse, parse_with_var};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("domain error at t={t}: {what}")]
    Domain { t: f64, what: String },
    #[error("non-finite value at t={t} in {what}")]
    NonFinite { t: f64, what: String },
}

impl ExprError {
    pub fn is_domain(&self) -> bool {
        matches!(self, ExprError::Domain { .. })
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Expr {
    /// Evaluates `(e(t), e'(t))`.
    pub fn eval_dual(&self, t: f64) -> Result<Dual, ExprError> {
        if !t.is_finite() {
            return Err(ExprError::NonFinite {
                t,
                what: "argument".into(),
            });
        }
        self.eval_at(Dual::variable(t), t)
    }

    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        self.eval_dual(t).map(|d| d.value)
    }

    /// Evaluates the expression with `t` replaced by an arbitrary dual
    /// number, which lets callers compose `f(g(x))`.
    pub fn eval_composed(&self, arg: Dual) -> Result<Dual, ExprError> {
        self.eval_at(arg, arg.value)
    }

    fn eval_at(&self, x: Dual, t: f64) -> Result<Dual, ExprError> {
        let domain = |what: &str| ExprError::Domain {
            t,
            what: what.to_string(),
        };
        let out = match self {
            Expr::Const(v) => Dual::constant(*v),
            Expr::Var => x,
            Expr::Neg(a) => -a.eval_at(x, t)?,
            Expr::Add(a, b) => a.eval_at(x, t)? + b.eval_at(x, t)?,
            Expr::Sub(a, b) => a.eval_at(x, t)? - b.eval_at(x, t)?,
            Expr::Mul(a, b) => a.eval_at(x, t)? * b.eval_at(x, t)?,
            Expr::Div(a, b) => {
                let num = a.eval_at(x, t)?;
                let den = b.eval_at(x, t)?;
                if den.value == 0.0 {
                    return Err(domain("division by zero"));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval_at(x, t)?;
                let exp = b.eval_at(x, t)?;
                pow_checked(base, exp).map_err(|what| domain(&what))?
            }
            Expr::Call(f, a) => {
                let v = a.eval_at(x, t)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Ln => {
                        if v.value <= 0.0 {
                            return Err(domain(&format!("ln of non-positive value {}", v.value)));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v.value < 0.0 {
                            return Err(domain(&format!("sqrt of negative value {}", v.value)));
                        }
                        v.sqrt()
                    }
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Tanh => v.tanh(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        };
        if out.is_finite() {
            Ok(out)
        } else {
            Err(ExprError::NonFinite {
                t,
                what: self.to_string(),
            })
        }
    }
}

fn pow_checked(base: Dual, exp: Dual) -> Result<Dual, String> {
    let integral = exp.deriv == 0.0 && exp.value.fract() == 0.0;
    if base.value < 0.0 && !integral {
        return Err(format!(
            "non-integer power {} of negative base {}",
            exp.value, base.value
        ));
    }
    if base.value == 0.0 {
        if exp.deriv != 0.0 {
            return Err("variable exponent of zero base".into());
        }
        if exp.value < 0.0 {
            return Err(format!("zero base raised to negative power {}", exp.value));
        }
    }
    Ok(base.pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, t: f64) -> Dual {
        parse(s).unwrap().eval_dual(t).unwrap()
    }

    #[test]
    fn power_rule() {
        assert_eq!(ev("t^2", 3.0), Dual::new(9.0, 6.0));
    }

    #[test]
    fn sinh_at_zero() {
        assert_eq!(ev("sinh(t)", 0.0), Dual::new(0.0, 1.0));
    }

    #[test]
    fn sum_and_product() {
        assert_eq!(ev("t + t*t", 1.0), Dual::new(2.0, 3.0));
    }

    #[test]
    fn negative_base_integer_power_is_fine() {
        assert_eq!(ev("(t-3)^3", 1.0), Dual::new(-8.0, 12.0));
    }

    #[test]
    fn domain_errors() {
        let e = parse("ln(t)").unwrap();
        assert!(e.eval_dual(0.0).unwrap_err().is_domain());
        assert!(e.eval_dual(-1.0).unwrap_err().is_domain());
        let e = parse("(t-2)^(1/2)").unwrap();
        assert!(e.eval_dual(1.0).unwrap_err().is_domain());
        let e = parse("1/(t-1)").unwrap();
        assert!(e.eval_dual(1.0).unwrap_err().is_domain());
        let e = parse("sqrt(t)").unwrap();
        assert!(e.eval_dual(-0.5).unwrap_err().is_domain());
    }

    #[test]
    fn non_finite_is_reported() {
        let e = parse("exp(t)").unwrap();
        assert!(matches!(e.eval_dual(1000.0), Err(ExprError::NonFinite { .. })));
        // sqrt'(0) is unbounded
        let e = parse("sqrt(t)").unwrap();
        assert!(matches!(e.eval_dual(0.0), Err(ExprError::NonFinite { .. })));
        assert!(matches!(e.eval_dual(f64::NAN), Err(ExprError::NonFinite { .. })));
    }

    #[test]
    fn constant_subtree_at_singular_point() {
        // derivative of a constant argument stays zero
        assert_eq!(ev("sqrt(0) + t", 2.0), Dual::new(2.0, 1.0));
    }

    #[test]
    fn display_is_canonical() {
        let e = parse("t^(1/2) - -2*sinh(t)").unwrap();
        assert_eq!(e.to_string(), "((t ^ (1.0 / 2.0)) - ((-2.0) * sinh(t)))");
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn composition() {
        // f(g) with g = 2x at x=1, f(t) = t^2  -> value 4, d/dx = 8
        let f = parse("t^2").unwrap();
        let g = Dual::new(2.0, 2.0);
        assert_eq!(f.eval_composed(g).unwrap(), Dual::new(4.0, 8.0));
    }
}
