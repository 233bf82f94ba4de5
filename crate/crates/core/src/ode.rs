//! Adaptive Dormand–Prince 5(4) integrator for scalar ODEs `y' = f(x, y)`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError<E> {
    #[error("right-hand side failed at x={x}: {source}")]
    Rhs { x: f64, source: E },
    #[error("step size underflow at x={x}")]
    StepUnderflow { x: f64 },
    #[error("step budget exhausted at x={x}")]
    MaxSteps { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            max_steps: 100_000,
        }
    }
}

/// Samples at the requested output abscissae. When the stop predicate fires
/// the solution ends early and `stopped` holds the abscissa where it fired.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub stopped: Option<f64>,
    pub steps: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error weights: fifth-order minus embedded fourth-order
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One trial step. `None` means the right-hand side was unusable somewhere
/// inside the step, which the driver treats as a rejection.
fn trial<F, E>(f: &mut F, x: f64, y: f64, k1: f64, h: f64) -> Result<Option<(f64, f64, f64)>, E>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
{
    let mut stage = |xs: f64, ys: f64| -> Result<Option<f64>, E> {
        let v = f(xs, ys)?;
        Ok(v.is_finite().then_some(v))
    };
    macro_rules! st {
        ($x:expr, $y:expr) => {
            match stage($x, $y)? {
                Some(v) => v,
                None => return Ok(None),
            }
        };
    }
    let k2 = st!(x + C2 * h, y + h * A21 * k1);
    let k3 = st!(x + C3 * h, y + h * (A31 * k1 + A32 * k2));
    let k4 = st!(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = st!(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = st!(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = st!(x + h, y_new);
    let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok(Some((y_new, err, k7)))
}

/// Integrates from `(x0, y0)` through each abscissa in `outputs`, which must
/// move monotonically away from `x0`. The step is clipped to land exactly on
/// every output. `stop(x, y)` is checked after each accepted step.
pub fn solve<F, E, S>(
    mut f: F,
    x0: f64,
    y0: f64,
    outputs: &[f64],
    opts: OdeOptions,
    mut stop: S,
) -> Result<Solution, OdeError<E>>
where
    F: FnMut(f64, f64) -> Result<f64, E>,
    S: FnMut(f64, f64) -> bool,
{
    let mut sol = Solution {
        xs: Vec::with_capacity(outputs.len()),
        ys: Vec::with_capacity(outputs.len()),
        stopped: None,
        steps: 0,
        rejected: 0,
    };
    let Some(&last) = outputs.last() else {
        return Ok(sol);
    };
    let dir = if last >= x0 { 1.0 } else { -1.0 };
    let span = (last - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y).map_err(|source| OdeError::Rhs { x, source })?;
    let mut h = opts.h_init.unwrap_or(0.01 * span.max(1e-300)).abs();
    let h_min = 1e-14 * x0.abs().max(span).max(1e-300);

    for &target in outputs {
        while (target - x) * dir > 0.0 {
            if sol.steps + sol.rejected >= opts.max_steps {
                return Err(OdeError::MaxSteps { x });
            }
            let remaining = (target - x).abs();
            let clipped = h >= remaining;
            let step = dir * h.min(remaining);
            let attempt = trial(&mut f, x, y, k1, step).map_err(|source| OdeError::Rhs { x, source })?;
            let accepted = attempt.and_then(|(y_new, err, k7)| {
                let scale = opts.atol + opts.rtol * y.abs().max(y_new.abs());
                let ratio = (err / scale).abs();
                if ratio <= 1.0 {
                    Some((y_new, k7, ratio))
                } else {
                    h = step.abs() * (0.9 * ratio.powf(-0.2)).max(0.2);
                    None
                }
            });
            match accepted {
                Some((y_new, k7, ratio)) => {
                    x = if clipped { target } else { x + step };
                    y = y_new;
                    k1 = k7;
                    sol.steps += 1;
                    let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).min(5.0) };
                    if !clipped {
                        h = step.abs() * grow;
                    }
                    if stop(x, y) {
                        sol.stopped = Some(x);
                        sol.xs.push(x);
                        sol.ys.push(y);
                        return Ok(sol);
                    }
                }
                None => {
                    sol.rejected += 1;
                    if attempt.is_none() {
                        h = 0.25 * step.abs();
                    }
                    if h < h_min {
                        return Err(OdeError::StepUnderflow { x });
                    }
                }
            }
        }
        sol.xs.push(x);
        sol.ys.push(y);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_growth() {
        let outs = [0.5, 1.0, 2.0];
        let sol = solve(
            |_, y| Ok::<_, Infallible>(y),
            0.0,
            1.0,
            &outs,
            OdeOptions::default(),
            |_, _| false,
        )
        .unwrap();
        for (x, y) in sol.xs.iter().zip(&sol.ys) {
            assert!((y - x.exp()).abs() <= 1e-8 * x.exp(), "{x} {y}");
        }
        assert_eq!(sol.xs, outs);
    }

    #[test]
    fn backwards_integration() {
        // y' = -2xy, y = exp(-x^2)
        let sol = solve(
            |x, y| Ok::<_, Infallible>(-2.0 * x * y),
            1.0,
            (-1.0f64).exp(),
            &[0.0],
            OdeOptions::default(),
            |_, _| false,
        )
        .unwrap();
        assert!((sol.ys[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stop_predicate_ends_early() {
        let sol = solve(
            |_, _| Ok::<_, Infallible>(1.0),
            0.0,
            0.0,
            &[10.0],
            OdeOptions::default(),
            |_, y| y > 3.0,
        )
        .unwrap();
        let at = sol.stopped.unwrap();
        assert!(at > 3.0 && at < 10.0);
    }

    #[test]
    fn rhs_errors_propagate() {
        let r = solve(
            |x, _| if x > 0.5 { Err("boom") } else { Ok(1.0) },
            0.0,
            0.0,
            &[1.0],
            OdeOptions::default(),
            |_, _| false,
        );
        assert!(matches!(r, Err(OdeError::Rhs { .. })));
    }

    #[test]
    fn non_finite_rhs_shrinks_then_underflows() {
        // y' = 1/(1-x) blows up at x = 1
        let r = solve(
            |x, _| Ok::<_, Infallible>(if x >= 1.0 { f64::INFINITY } else { 1.0 / (1.0 - x) }),
            0.0,
            0.0,
            &[2.0],
            OdeOptions::default(),
            |_, _| false,
        );
        assert!(r.is_err());
    }
}
