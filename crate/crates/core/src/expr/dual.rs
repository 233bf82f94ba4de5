use std::ops::{Add, Div, Mul, Neg, Sub};

/// First-order dual number `value + deriv·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub const fn new(value: f64, deriv: f64) -> Self {
        Dual { value, deriv }
    }

    pub const fn constant(value: f64) -> Self {
        Dual { value, deriv: 0.0 }
    }

    /// The independent variable at `t`.
    pub const fn variable(t: f64) -> Self {
        Dual { value: t, deriv: 1.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }

    /// Chain rule helper: `f(self)` given `f(v)` and `f'(v)`.
    #[inline]
    pub fn chain(self, f: f64, df: f64) -> Dual {
        // A constant argument stays constant even where f' is unbounded.
        let d = if self.deriv == 0.0 { 0.0 } else { df * self.deriv };
        Dual::new(f, d)
    }

    pub fn exp(self) -> Dual {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Dual {
        self.chain(self.value.ln(), 1.0 / self.value)
    }

    pub fn sqrt(self) -> Dual {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn sinh(self) -> Dual {
        self.chain(self.value.sinh(), self.value.cosh())
    }

    pub fn cosh(self) -> Dual {
        self.chain(self.value.cosh(), self.value.sinh())
    }

    pub fn tanh(self) -> Dual {
        let th = self.value.tanh();
        self.chain(th, 1.0 - th * th)
    }

    pub fn sin(self) -> Dual {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Dual {
        self.chain(self.value.cos(), -self.value.sin())
    }

    /// `self^n` for a constant exponent.
    pub fn powf(self, n: f64) -> Dual {
        if n == 0.0 {
            return Dual::constant(1.0);
        }
        let v = self.value.powf(n);
        let dv = if n == 1.0 { 1.0 } else { n * self.value.powf(n - 1.0) };
        self.chain(v, dv)
    }

    /// `self^other` where both may carry derivatives. Requires a positive base
    /// whenever the exponent varies.
    pub fn pow(self, other: Dual) -> Dual {
        if other.deriv == 0.0 {
            return self.powf(other.value);
        }
        let v = self.value.powf(other.value);
        let d = v * (other.deriv * self.value.ln() + other.value * self.deriv / self.value);
        Dual::new(v, d)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.value + o.value, self.deriv + o.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.value - o.value, self.deriv - o.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.value * o.value, self.deriv * o.value + self.value * o.deriv)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.value / o.value;
        Dual::new(q, (self.deriv - q * o.deriv) / o.value)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::variable(2.0);
        let p = x * x * x;
        assert_eq!(p, Dual::new(8.0, 12.0));
        let q = Dual::constant(1.0) / x;
        assert_eq!(q, Dual::new(0.5, -0.25));
    }

    #[test]
    fn chain_rule_composition() {
        // d/dt sinh(t^2) = 2t cosh(t^2)
        let t = 0.7;
        let d = (Dual::variable(t) * Dual::variable(t)).sinh();
        assert!((d.value - (t * t).sinh()).abs() < 1e-15);
        assert!((d.deriv - 2.0 * t * (t * t).cosh()).abs() < 1e-14);
    }

    #[test]
    fn variable_exponent() {
        // d/dt t^t = t^t (ln t + 1)
        let t = 1.3;
        let x = Dual::variable(t);
        let d = x.pow(x);
        let expected = t.powf(t) * (t.ln() + 1.0);
        assert!((d.deriv - expected).abs() < 1e-13);
    }
}
