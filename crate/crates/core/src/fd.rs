//! Central finite differences and a safeguarded scalar root finder.

/// Step used at `x` for a base step `h`: `h·(1+|x|)`.
pub fn step(h: f64, x: f64) -> f64 {
    h * (1.0 + x.abs())
}

/// Central difference `(f(x+s) − f(x−s)) / 2s` with `s = step(h, x)`.
pub fn central<F, E>(mut f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let s = step(h, x);
    let hi = f(x + s)?;
    let lo = f(x - s)?;
    Ok((hi - lo) / ((x + s) - (x - s)))
}

/// Both partials of `f(x, y)` by central differences.
pub fn gradient<F, E>(mut f: F, x: f64, y: f64, h: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
{
    let fx = central(|u| f(u, y), x, h)?;
    let fy = central(|v| f(x, v), y, h)?;
    Ok((fx, fy))
}

/// Root of a function that changes sign on `[lo, hi]`. `f` returns the
/// value and derivative; Newton steps that leave the current bracket are
/// replaced by bisection. Returns `None` when the endpoints do not bracket a
/// root.
pub fn solve_bracketed<F, E>(mut f: F, lo: f64, hi: f64) -> Result<Option<f64>, E>
where
    F: FnMut(f64) -> Result<(f64, f64), E>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?.0;
    let fb = f(b)?.0;
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    let rising = fb > 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(Some(x));
        }
        if (fx > 0.0) == rising {
            b = x;
        } else {
            a = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || b - a <= 0.0 {
            return Ok(Some(next));
        }
        x = next;
    }
    Ok(Some(x))
}
