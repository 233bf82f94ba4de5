//! Shared helpers for integration tests.
#![allow(dead_code)]

use flrw_core::expr::{parse, Expr};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const FUNCS: [&str; 8] = ["exp", "ln", "sqrt", "sinh", "cosh", "tanh", "sin", "cos"];

/// Random expression text in `t`, at most `depth` levels deep.
pub fn random_expr_text(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            "t".into()
        } else {
            format!("{:.3}", rng.gen_range(0.25..3.0))
        };
    }
    let a = random_expr_text(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => format!("({a} + {})", random_expr_text(rng, depth - 1)),
        1 => format!("({a} - {})", random_expr_text(rng, depth - 1)),
        2 => format!("({a} * {})", random_expr_text(rng, depth - 1)),
        3 => format!("({a} / (1.5 + {}))", random_expr_text(rng, depth - 1)),
        4 => format!("({a})^{}", rng.gen_range(1..4)),
        5 => format!("(1 + ({a})^2)^({:.2})", rng.gen_range(-1.5..1.5)),
        6 => format!("-({a})"),
        _ => format!("{}({a})", FUNCS[rng.gen_range(0..FUNCS.len())]),
    }
}

pub const AD_BOUND: f64 = 1e3;

/// `h = 1e-6·max(1, |t|)`.
pub fn fd_step(t: f64) -> f64 {
    1e-6 * t.abs().max(1.0)
}

#[derive(Debug)]
pub struct AdCase {
    pub text: String,
    pub t: f64,
    pub deriv: f64,
    pub fd: f64,
}

/// Draws expressions until one is defined and bounded by [`AD_BOUND`] in
/// value and slope on `[t − 1e-3, t + 1e-3]`, then compares its dual-number
/// derivative with a central difference.
pub fn ad_case(rng: &mut ChaCha8Rng) -> AdCase {
    loop {
        let text = random_expr_text(rng, 4);
        let e = parse(&text).unwrap_or_else(|err| panic!("generator produced {text:?}: {err}"));
        let t = rng.gen_range(0.2..3.0);
        if !well_behaved(&e, t) {
            continue;
        }
        let d = e.eval_dual(t).unwrap();
        let h = fd_step(t);
        let fd = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
        return AdCase { text, t, deriv: d.deriv, fd };
    }
}

fn well_behaved(e: &Expr, t: f64) -> bool {
    (-4..=4).all(|k| match e.eval_dual(t + 2.5e-4 * k as f64) {
        Ok(d) => d.value.abs() <= AD_BOUND && d.deriv.abs() <= AD_BOUND,
        Err(_) => false,
    })
}

pub fn ad_within_tol(c: &AdCase) -> bool {
    (c.deriv - c.fd).abs() <= 1e-6 * (1.0 + c.deriv.abs())
}
