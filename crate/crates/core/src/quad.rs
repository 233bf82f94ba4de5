//! Gauss–Legendre quadrature: fixed rules, adaptive bisection, and a
//! cumulative integral table whose evaluation is smooth in the upper limit.

use std::sync::OnceLock;

use thiserror::Error;

/// Order of the base rule.
pub const GL_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError<E> {
    #[error("integrand failed at x={x}: {source}")]
    Integrand { x: f64, source: E },
    #[error("integrand is not finite at x={x}")]
    NonFinite { x: f64 },
    #[error("no convergence on [{a}, {b}] after maximum subdivision depth")]
    NoConvergence { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-10,
            rel: 1e-12,
            max_depth: 48,
        }
    }
}

/// Nodes and weights on [-1, 1], computed once by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Fixed GL rule on [a, b].
pub fn gl_fixed<F, E>(f: &mut F, a: f64, b: f64) -> Result<f64, QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let xi = mid + half * x;
        let v = f(xi).map_err(|source| QuadError::Integrand { x: xi, source })?;
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x: xi });
        }
        sum += w * v;
    }
    Ok(sum * half)
}

/// Composite GL rule with `panels` equal sub-intervals of [a, b].
pub fn gl_composite<F, E>(f: &mut F, a: f64, b: f64, panels: usize) -> Result<f64, QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == panels { b } else { lo + h };
        sum += gl_fixed(f, lo, hi)?;
    }
    Ok(sum)
}

/// Adaptive bisection: a panel is accepted when the one-panel and two-panel
/// estimates agree to `max(tol.abs·w, tol.rel·|I|)` where `w` is the panel's
/// share of the full interval.
pub fn integrate<F, E>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<QuadResult, QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            err: 0.0,
            evals: 0,
        });
    }
    let mut evals = 0usize;
    let mut counted = |x: f64| {
        evals += 1;
        f(x)
    };
    let whole = gl_fixed(&mut counted, a, b)?;
    let mut out = (0.0, 0.0);
    recurse(&mut counted, a, b, whole, tol, (b - a).abs(), 0, &mut out)?;
    Ok(QuadResult {
        value: out.0,
        err: out.1,
        evals,
    })
}

#[allow(clippy::too_many_arguments)]
fn recurse<F, E>(
    f: &mut F,
    a: f64,
    b: f64,
    coarse: f64,
    tol: QuadTol,
    total: f64,
    depth: u32,
    out: &mut (f64, f64),
) -> Result<(), QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let m = 0.5 * (a + b);
    let left = gl_fixed(f, a, m)?;
    let right = gl_fixed(f, m, b)?;
    let fine = left + right;
    let diff = (fine - coarse).abs();
    let share = (b - a).abs() / total;
    let target = (tol.abs * share).max(tol.rel * fine.abs()).max(4.0 * f64::EPSILON * fine.abs());
    if diff <= target || fine == coarse {
        out.0 += fine;
        out.1 += diff;
        return Ok(());
    }
    if depth >= tol.max_depth || m == a || m == b {
        return Err(QuadError::NoConvergence { a, b });
    }
    recurse(f, a, m, left, tol, total, depth + 1, out)?;
    recurse(f, m, b, right, tol, total, depth + 1, out)
}

/// `Φ(x) = ∫_{x₀}^{x} f` tabulated on a set of nodes.
///
/// Each cell gets a panel count fixed at build time, and off-node values use
/// that same composite rule on `[x_j, x]`. The result is a smooth function of
/// `x` inside a cell and continuous across cells, so finite differences of
/// `Φ` are not polluted by adaptive-refinement jumps.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    panels: Vec<usize>,
    base: f64,
}

impl CumulativeTable {
    /// Builds a table over sorted `nodes`; `base` must be one of the nodes and
    /// is where `Φ = 0`.
    pub fn build<F, E>(mut f: F, nodes: Vec<f64>, base: f64, rel_tol: f64) -> Result<Self, QuadError<E>>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        assert!(nodes.len() >= 2, "table needs at least two nodes");
        assert!(nodes.windows(2).all(|w| w[0] < w[1]), "nodes must increase");
        let b = nodes
            .iter()
            .position(|&x| x == base)
            .expect("base must be a node");
        let n = nodes.len();
        let mut panels = vec![1usize; n - 1];
        let mut cell = vec![0.0; n - 1];
        for j in 0..n - 1 {
            let (m, v) = settle(&mut f, nodes[j], nodes[j + 1], rel_tol)?;
            panels[j] = m;
            cell[j] = v;
        }
        let mut values = vec![0.0; n];
        for j in b + 1..n {
            values[j] = values[j - 1] + cell[j - 1];
        }
        for j in (0..b).rev() {
            values[j] = values[j + 1] - cell[j];
        }
        Ok(CumulativeTable {
            nodes,
            values,
            panels,
            base,
        })
    }

    /// Appends a node after the current last one.
    pub fn push_back<F, E>(&mut self, mut f: F, x: f64, rel_tol: f64) -> Result<(), QuadError<E>>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let last = *self.nodes.last().unwrap();
        assert!(x > last);
        let (m, v) = settle(&mut f, last, x, rel_tol)?;
        let prev = *self.values.last().unwrap();
        self.nodes.push(x);
        self.values.push(prev + v);
        self.panels.push(m);
        Ok(())
    }

    /// Prepends a node before the current first one.
    pub fn push_front<F, E>(&mut self, mut f: F, x: f64, rel_tol: f64) -> Result<(), QuadError<E>>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let first = self.nodes[0];
        assert!(x < first);
        let (m, v) = settle(&mut f, x, first, rel_tol)?;
        let v0 = self.values[0];
        self.nodes.insert(0, x);
        self.values.insert(0, v0 - v);
        self.panels.insert(0, m);
        Ok(())
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    fn cell_of(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let j = self.nodes.partition_point(|&n| n <= x);
        Some(j.saturating_sub(1).min(self.nodes.len() - 2))
    }

    /// Value at `x`, or `None` outside the tabulated range.
    pub fn eval<F, E>(&self, mut f: F, x: f64) -> Option<Result<f64, QuadError<E>>>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let j = self.cell_of(x)?;
        if x == self.nodes[j] {
            return Some(Ok(self.values[j]));
        }
        Some(gl_composite(&mut f, self.nodes[j], x, self.panels[j]).map(|v| self.values[j] + v))
    }

    /// Locates the cell containing a target value when the table is
    /// monotone. Returns the bracketing node pair.
    pub fn bracket_value(&self, target: f64) -> Option<(f64, f64)> {
        let increasing = self.values.last() >= self.values.first();
        let n = self.values.len();
        for j in 0..n - 1 {
            let (v0, v1) = (self.values[j], self.values[j + 1]);
            let inside = if increasing {
                v0 <= target && target <= v1
            } else {
                v1 <= target && target <= v0
            };
            if inside {
                return Some((self.nodes[j], self.nodes[j + 1]));
            }
        }
        None
    }
}

/// Chooses a panel count for one cell: doubles until successive composite
/// estimates agree, then keeps the finer count.
fn settle<F, E>(f: &mut F, a: f64, b: f64, rel_tol: f64) -> Result<(usize, f64), QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut m = 1usize;
    let mut prev = gl_composite(f, a, b, m)?;
    loop {
        let next = gl_composite(f, a, b, 2 * m)?;
        if (next - prev).abs() <= rel_tol * next.abs().max(1e-300) || (next - prev).abs() < 1e-300 {
            return Ok((2 * m, next));
        }
        m *= 2;
        if m > 1 << 16 {
            return Err(QuadError::NoConvergence { a, b });
        }
        prev = next;
    }
}
