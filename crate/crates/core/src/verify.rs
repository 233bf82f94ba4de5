//! Finite-difference pushforward checks: pull a chart's claimed metric back
//! through numerically differentiated coordinates and compare with the
//! source metric.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::axi_chart::{locus_residual, rho_of, AxiChart, AxiError, Source};
use crate::fd::{central, gradient, step};
use crate::sph_chart::{ChartError, Region, SphericalChart, TOL_EXC};

/// Default base step; the step used at `x` is `h·(1+|x|)`.
pub const DEFAULT_H: f64 = 1e-5;

/// Steps above this are flagged: truncation error then dominates.
pub const LARGE_STEP: f64 = 1e-3;

const POLE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Axi(#[from] AxiError),
    #[error("sample ({x}, {y}) is outside the region")]
    SampleOutsideRegion { x: f64, y: f64 },
    #[error("no usable samples for {identity}: {skipped} skipped")]
    NoSamples { identity: String, skipped: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub identity: String,
    pub samples: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub tol: f64,
    pub h: f64,
    pub seed: u64,
    pub pass: bool,
    /// Maximum residual of each sub-identity.
    pub components: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

struct Accumulator {
    identity: String,
    samples: usize,
    skipped: usize,
    max_residual: f64,
    worst_point: Vec<f64>,
    components: BTreeMap<String, f64>,
    flags: Vec<String>,
}

impl Accumulator {
    fn new(identity: &str, names: &[&str]) -> Self {
        Accumulator {
            identity: identity.to_string(),
            samples: 0,
            skipped: 0,
            max_residual: 0.0,
            worst_point: Vec::new(),
            components: names.iter().map(|n| (n.to_string(), 0.0)).collect(),
            flags: Vec::new(),
        }
    }

    fn record(&mut self, point: &[f64], residuals: &[(&str, f64)]) {
        self.samples += 1;
        for &(name, r) in residuals {
            let slot = self.components.entry(name.to_string()).or_insert(0.0);
            *slot = slot.max(r);
            // NaN residuals must fail the check, never vanish under max()
            if r > self.max_residual || r.is_nan() {
                self.max_residual = if r.is_nan() { f64::INFINITY } else { r };
                self.worst_point = point.to_vec();
            }
        }
    }

    fn finish(mut self, tol: f64, h: f64, seed: u64) -> Result<VerifyReport, VerifyError> {
        if self.samples == 0 {
            return Err(VerifyError::NoSamples {
                identity: self.identity,
                skipped: self.skipped,
            });
        }
        if h > LARGE_STEP {
            self.flags.push(format!(
                "step h={h:e} exceeds {LARGE_STEP:e}; finite-difference truncation error dominates"
            ));
        }
        Ok(VerifyReport {
            pass: self.max_residual <= tol,
            identity: self.identity,
            samples: self.samples,
            skipped: self.skipped,
            max_residual: self.max_residual,
            worst_point: self.worst_point,
            tol,
            h,
            seed,
            components: self.components,
            flags: self.flags,
        })
    }
}

/// The fields of a strongly spherically symmetric chart over an FLRW
/// region, as functions of `(t, r)`.
pub trait SphFields {
    fn region(&self) -> Region;
    fn t_cap(&self, t: f64, r: f64) -> Result<f64, ChartError>;
    fn big_r(&self, t: f64, r: f64) -> Result<f64, ChartError>;
    fn f(&self, t: f64, r: f64) -> Result<f64, ChartError>;
    fn g(&self, t: f64, r: f64) -> Result<f64, ChartError>;
    /// The `dr²` coefficient of the FLRW metric.
    fn s_squared(&self, t: f64, r: f64) -> Result<f64, ChartError>;
}

impl SphFields for SphericalChart {
    fn region(&self) -> Region {
        SphericalChart::region(self)
    }
    fn t_cap(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        SphericalChart::t_cap(self, t, r)
    }
    fn big_r(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        SphericalChart::big_r(self, t, r)
    }
    fn f(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        SphericalChart::f(self, t, r)
    }
    fn g(&self, t: f64, r: f64) -> Result<f64, ChartError> {
        SphericalChart::g(self, t, r)
    }
    fn s_squared(&self, t: f64, _r: f64) -> Result<f64, ChartError> {
        crate::sph_chart::s_squared(self.scale_factor(), t)
    }
}

/// Uniform draw from `[lo, hi]` shrunk so a central-difference stencil with
/// base step `h` stays inside.
fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64, h: f64) -> f64 {
    let m = 1.01 * step(h, lo.abs().max(hi.abs()));
    let (a, b) = if hi - lo > 4.0 * m { (lo + m, hi - m) } else { (lo, hi) };
    a + (b - a) * rng.gen::<f64>()
}

/// Residual of `−F dT² + G dR²` against `−dt² + s² dr²`, normalised by
/// `max(1, s²)`.
pub fn check_sph_pushforward<C: SphFields + ?Sized>(
    chart: &C,
    n_samples: usize,
    h: f64,
    tol: f64,
    seed: u64,
) -> Result<VerifyReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = chart.region();
    let mut acc = Accumulator::new("sph_pushforward", &["dt2", "dtdr", "dr2"]);
    for _ in 0..n_samples {
        let t = draw(&mut rng, region.t.0, region.t.1, h);
        let r = draw(&mut rng, region.r.0, region.r.1, h);
        if !region.contains(t, r) {
            return Err(VerifyError::SampleOutsideRegion { x: t, y: r });
        }
        let (tt, tr) = gradient(|x, y| chart.t_cap(x, y), t, r, h)?;
        let (rt, rr) = gradient(|x, y| chart.big_r(x, y), t, r, h)?;
        let f = chart.f(t, r)?;
        let g = chart.g(t, r)?;
        let s2 = chart.s_squared(t, r)?;
        let norm = s2.max(1.0);
        let g_tt = -f * tt * tt + g * rt * rt;
        let g_tr = -f * tt * tr + g * rt * rr;
        let g_rr = -f * tr * tr + g * rr * rr;
        acc.record(
            &[t, r],
            &[
                ("dt2", (g_tt + 1.0).abs() / norm),
                ("dtdr", g_tr.abs() / norm),
                ("dr2", (g_rr - s2).abs() / norm),
            ],
        );
    }
    acc.finish(tol, h, seed)
}

/// Draws `(T, R, θ)`. Spherical sources are sampled through their `(t, r)`
/// region so the point lies in the chart's image.
fn draw_axi(rng: &mut ChaCha8Rng, chart: &AxiChart, h: f64) -> Result<(f64, f64, f64), VerifyError> {
    let (t_cap, r) = match chart.source() {
        Source::Spherical(sph) => {
            let region = sph.region();
            let t = draw(rng, region.t.0, region.t.1, h);
            let r = draw(rng, region.r.0, region.r.1, h);
            (sph.t_cap(t, r)?, sph.big_r(t, r)?)
        }
        Source::Synthetic(_) => {
            let (t0, t1) = chart.source().t_range();
            let (r0, r1) = chart.source().r_range();
            (t0 + (t1 - t0) * rng.gen::<f64>(), draw(rng, r0, r1, h))
        }
    };
    let margin = POLE_MARGIN.max(1.01 * step(h, std::f64::consts::PI));
    let theta = margin + (std::f64::consts::PI - 2.0 * margin) * rng.gen::<f64>();
    Ok((t_cap, r, theta))
}

/// Evaluation failures that mean "this sample is not in the chart's domain"
/// rather than "the chart is wrong".
fn is_outside(e: &AxiError) -> bool {
    matches!(
        e,
        AxiError::Source(ChartError::OutsideRegion { .. })
            | AxiError::Source(ChartError::CharacteristicEscapedRegion { .. })
    )
}

/// Runs `body` over `n_samples` draws, skipping samples outside the chart's
/// domain or within `10·TOL_EXC` of the degenerate locus.
fn axi_loop<F>(
    chart: &AxiChart,
    acc: &mut Accumulator,
    n_samples: usize,
    h: f64,
    seed: u64,
    mut body: F,
) -> Result<(), VerifyError>
where
    F: FnMut(&mut Accumulator, f64, f64, f64) -> Result<(), AxiError>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut outside, mut degenerate) = (0, 0);
    for _ in 0..n_samples {
        let (t_cap, r, theta) = draw_axi(&mut rng, chart, h)?;
        let g = match chart.fg(t_cap, r) {
            Ok((_, g)) => g,
            Err(e) if is_outside(&e) => {
                outside += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if locus_residual(g, theta).abs() <= 10.0 * TOL_EXC {
            degenerate += 1;
            continue;
        }
        match body(acc, t_cap, r, theta) {
            Ok(()) => {}
            Err(e) if is_outside(&e) => outside += 1,
            Err(e) => return Err(e.into()),
        }
    }
    acc.skipped += outside + degenerate;
    if degenerate > 0 {
        acc.flags.push(format!("{degenerate} degenerate samples skipped"));
    }
    if outside > 0 {
        acc.flags.push(format!("{outside} samples outside the chart's image skipped"));
    }
    Ok(())
}

struct Partials {
    z_r: f64,
    z_th: f64,
    rho_r: f64,
    rho_th: f64,
}

fn partials(chart: &AxiChart, t_cap: f64, r: f64, theta: f64, h: f64) -> Result<Partials, AxiError> {
    let (z_r, z_th) = gradient(|x, y| chart.z_of(t_cap, x, y), r, theta, h)?;
    let (rho_r, rho_th) = gradient(|x, y| Ok::<_, AxiError>(rho_of(x, y)), r, theta, h)?;
    Ok(Partials { z_r, z_th, rho_r, rho_th })
}

/// The three sub-identities of `B dz² + C dρ² = G dR² + R² dθ²` plus
/// `ρ² = R² sin²θ`.
pub fn check_axi_pushforward(
    chart: &AxiChart,
    n_samples: usize,
    h: f64,
    tol: f64,
    seed: u64,
) -> Result<VerifyReport, VerifyError> {
    let mut acc = Accumulator::new("axi_pushforward", &["dR2", "dtheta2", "dRdtheta", "rho2"]);
    axi_loop(chart, &mut acc, n_samples, h, seed, |acc, t_cap, r, theta| {
        let (_, g) = chart.fg(t_cap, r)?;
        let c = chart.coeffs(t_cap, r, theta)?;
        let p = partials(chart, t_cap, r, theta, h)?;
        let r2 = r * r;
        let rho = rho_of(r, theta);
        acc.record(
            &[t_cap, r, theta],
            &[
                ("dR2", (c.b * p.z_r * p.z_r + c.c * p.rho_r * p.rho_r - g).abs() / (1.0 + g.abs())),
                ("dtheta2", (c.b * p.z_th * p.z_th + c.c * p.rho_th * p.rho_th - r2).abs() / r2),
                ("dRdtheta", (c.b * p.z_r * p.z_th + c.c * p.rho_r * p.rho_th).abs() / r2),
                ("rho2", (rho * rho - r2 * theta.sin().powi(2)).abs() / r2),
            ],
        );
        Ok(())
    })?;
    acc.finish(tol, h, seed)
}

/// `|J − det ∂(z, ρ)/∂(R, θ)| / (1 + |J|)`.
pub fn check_jacobian(chart: &AxiChart, n_samples: usize, h: f64, tol: f64, seed: u64) -> Result<VerifyReport, VerifyError> {
    let mut acc = Accumulator::new("jacobian", &["det"]);
    axi_loop(chart, &mut acc, n_samples, h, seed, |acc, t_cap, r, theta| {
        let j = chart.jacobian(t_cap, r, theta)?;
        let p = partials(chart, t_cap, r, theta, h)?;
        let det = p.z_r * p.rho_th - p.z_th * p.rho_r;
        acc.record(&[t_cap, r, theta], &[("det", (j - det).abs() / (1.0 + j.abs()))]);
        Ok(())
    })?;
    acc.finish(tol, h, seed)
}

/// Transport equation `z_R/z_θ = −G cosθ/(R sinθ)`, compared as
/// `|lhs − rhs| / (1 + |rhs|)`.
pub fn check_transport(chart: &AxiChart, n_samples: usize, h: f64, tol: f64, seed: u64) -> Result<VerifyReport, VerifyError> {
    let mut acc = Accumulator::new("transport", &["ratio"]);
    axi_loop(chart, &mut acc, n_samples, h, seed, |acc, t_cap, r, theta| {
        let (_, g) = chart.fg(t_cap, r)?;
        let p = partials(chart, t_cap, r, theta, h)?;
        let expected = -g * theta.cos() / (r * theta.sin());
        acc.record(
            &[t_cap, r, theta],
            &[("ratio", (p.z_r / p.z_th - expected).abs() / (1.0 + expected.abs()))],
        );
        Ok(())
    })?;
    acc.finish(tol, h, seed)
}

/// Finite-difference `z_θ` against `−sinθ·e^{I}·f'`.
pub fn check_z_theta(chart: &AxiChart, n_samples: usize, h: f64, tol: f64, seed: u64) -> Result<VerifyReport, VerifyError> {
    let mut acc = Accumulator::new("z_theta", &["z_theta"]);
    axi_loop(chart, &mut acc, n_samples, h, seed, |acc, t_cap, r, theta| {
        let formula = chart.z_theta(t_cap, r, theta)?;
        let fd = central(|y| chart.z_of(t_cap, r, y), theta, h)?;
        acc.record(
            &[t_cap, r, theta],
            &[("z_theta", (fd - formula).abs() / (1.0 + formula.abs()))],
        );
        Ok(())
    })?;
    acc.finish(tol, h, seed)
}

/// Integrates characteristics from random starts and measures the drift of
/// `z` along them, relative to `1 + |z(start)|`.
pub fn check_characteristics(chart: &AxiChart, n_curves: usize, tol: f64, seed: u64) -> Result<VerifyReport, VerifyError> {
    let mut acc = Accumulator::new("characteristic_constancy", &["z_drift"]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stopped = 0;
    for _ in 0..n_curves {
        let (t_cap, r_start, theta0) = draw_axi(&mut rng, chart, 0.0)?;
        let (lo, hi) = chart.source().r_range();
        // short arcs: long ones mostly leave the image at fixed T
        let r_end = (r_start + 0.25 * (hi - lo) * (rng.gen::<f64>() - 0.5)).clamp(lo, hi);
        let curve = match chart.characteristic_curve(t_cap, theta0, r_start, r_end, 9) {
            Ok(c) => c,
            Err(
                AxiError::ThetaHitPole { .. } | AxiError::ThetaHitEquator { .. } | AxiError::DegeneratePoint { .. },
            ) => {
                stopped += 1;
                continue;
            }
            Err(e) if is_outside(&e) => {
                stopped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        // z needs the path from R0 at fixed T, which can leave the image
        let drift = (|| -> Result<(f64, Vec<f64>), AxiError> {
            let z0 = chart.z_of(t_cap, r_start, theta0)?;
            let mut drift: f64 = 0.0;
            let mut worst = vec![t_cap, r_start, theta0];
            for (&r, &th) in curve.rs.iter().zip(&curve.thetas) {
                let d = (chart.z_of(t_cap, r, th)? - z0).abs() / (1.0 + z0.abs());
                if d > drift {
                    drift = d;
                    worst = vec![t_cap, r, th];
                }
            }
            Ok((drift, worst))
        })();
        match drift {
            Ok((drift, worst)) => acc.record(&worst, &[("z_drift", drift)]),
            Err(e) if is_outside(&e) => stopped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    acc.skipped += stopped;
    if stopped > 0 {
        acc.flags.push(format!("{stopped} curves reached the axis or left the domain"));
    }
    acc.finish(tol, 0.0, seed)
}

/// Ratio of maximum residuals at `h` and `h/2`; close to 4 for a
/// second-order scheme on a smooth chart.
pub fn convergence_ratio<C: SphFields + ?Sized>(chart: &C, n_samples: usize, h: f64, seed: u64) -> Result<(f64, f64, f64), VerifyError> {
    let coarse = check_sph_pushforward(chart, n_samples, h, f64::INFINITY, seed)?.max_residual;
    let fine = check_sph_pushforward(chart, n_samples, 0.5 * h, f64::INFINITY, seed)?.max_residual;
    Ok((coarse, fine, coarse / fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axi_chart::{Profile, SyntheticFg};
    use crate::scale_factor::ScaleFactor;
    use crate::sph_chart::{build_tf, Branch, ChartParams, Labeling};

    fn chart(branch: Branch, a: &str, lo: f64, region: Region) -> SphericalChart {
        let p = ChartParams {
            branch,
            sf: ScaleFactor::new(a, lo, f64::INFINITY).unwrap(),
            t_ref: None,
            labeling: Labeling::Axis,
        };
        build_tf(&p, region, 6, 6).unwrap()
    }

    struct ScaledF<'a>(&'a SphericalChart, f64);

    impl SphFields for ScaledF<'_> {
        fn region(&self) -> Region {
            self.0.region()
        }
        fn t_cap(&self, t: f64, r: f64) -> Result<f64, ChartError> {
            self.0.t_cap(t, r)
        }
        fn big_r(&self, t: f64, r: f64) -> Result<f64, ChartError> {
            self.0.big_r(t, r)
        }
        fn f(&self, t: f64, r: f64) -> Result<f64, ChartError> {
            Ok(self.1 * self.0.f(t, r)?)
        }
        fn g(&self, t: f64, r: f64) -> Result<f64, ChartError> {
            self.0.g(t, r)
        }
        fn s_squared(&self, t: f64, r: f64) -> Result<f64, ChartError> {
            SphFields::s_squared(self.0, t, r)
        }
    }

    #[test]
    fn milne_pushforward_and_fault_injection() {
        let c = chart(Branch::Hyperbolic, "t", 0.0, Region { t: (0.5, 2.0), r: (0.1, 1.5) });
        let ok = check_sph_pushforward(&c, 100, DEFAULT_H, 1e-6, 7).unwrap();
        assert!(ok.pass, "{ok:?}");
        let bad = check_sph_pushforward(&ScaledF(&c, 1.01), 100, DEFAULT_H, 1e-5, 7).unwrap();
        assert!(!bad.pass);
        assert!(bad.max_residual > 1e-3 && bad.max_residual < 1e-1, "{}", bad.max_residual);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = chart(Branch::Flat, "t^(2/3)", 0.0, Region { t: (1.0, 2.0), r: (0.1, 0.8) });
        let a = check_sph_pushforward(&c, 50, DEFAULT_H, 1e-5, 3).unwrap();
        let b = check_sph_pushforward(&c, 50, DEFAULT_H, 1e-5, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
    }

    #[test]
    fn second_order_residuals() {
        let c = chart(Branch::Flat, "t^(2/3)", 0.0, Region { t: (1.0, 2.0), r: (0.1, 0.8) });
        let (_, _, ratio) = convergence_ratio(&c, 50, 1e-4, 11).unwrap();
        assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn synthetic_axi_identities() {
        let src = Source::Synthetic(SyntheticFg::from_exprs("1 - R^2", "1/(1 - R^2)", (0.0, 1.0), (0.1, 0.9)).unwrap());
        let axi = AxiChart::new(src, None, Profile::Identity).unwrap();
        for report in [
            check_axi_pushforward(&axi, 200, DEFAULT_H, 1e-5, 1).unwrap(),
            check_jacobian(&axi, 100, DEFAULT_H, 1e-5, 2).unwrap(),
            check_transport(&axi, 100, DEFAULT_H, 1e-4, 3).unwrap(),
            check_z_theta(&axi, 100, DEFAULT_H, 1e-4, 4).unwrap(),
            check_characteristics(&axi, 20, 1e-6, 5).unwrap(),
        ] {
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn degenerate_samples_are_skipped() {
        // G = −tan²θ on half the θ range means some samples hit the locus
        let src = Source::Synthetic(SyntheticFg::from_fn("locus", (0.0, 1.0), (0.5, 2.0), |_, _| (-1.0, -1.0)));
        let axi = AxiChart::new(src, Some(1.0), Profile::Identity).unwrap();
        let report = check_axi_pushforward(&axi, 100, DEFAULT_H, 1e-4, 9).unwrap();
        assert!(report.samples > 0);
        assert!(report.max_residual.is_finite());
    }

    #[test]
    fn large_step_is_flagged() {
        let src = Source::Synthetic(SyntheticFg::from_exprs("1", "1 + R", (0.0, 1.0), (0.5, 2.0)).unwrap());
        let axi = AxiChart::new(src, None, Profile::Identity).unwrap();
        let report = check_jacobian(&axi, 50, 0.1, 1e-5, 1).unwrap();
        assert!(!report.pass);
        assert!(report.flags.iter().any(|f| f.contains("step")));
    }
}
