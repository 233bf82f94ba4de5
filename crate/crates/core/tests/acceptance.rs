//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_3, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use flrw_core::axi_chart::{AxiChart, AxiError, Profile, Source, SyntheticFg};
use flrw_core::catalog::{self, power_law};
use flrw_core::criteria::{
    full_report, Conclusion, Curvature, SpacetimeSpec, MILNE_LIKE, PAST_C0, PAST_C01, SYMMETRIC,
};
use flrw_core::probe::{probe, witness_degeneracy, CurveKind, CurveSpec, WitnessOutcome};
use flrw_core::scale_factor::{
    has_particle_horizon, ling_limit, sbierski_hyperbolic_limit, Horizon, LimitDiag, LimitKind, ScaleFactor,
};
use flrw_core::sph_chart::{build_tf, g_of, r_of, Branch, ChartError, ChartParams, Labeling, Region, SphericalChart};
use flrw_core::verify::{
    check_axi_pushforward, check_characteristics, check_jacobian, check_sph_pushforward, check_transport,
    check_z_theta, convergence_ratio, VerifyReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;

struct Outcome {
    ok: bool,
    summary: String,
    details: Vec<String>,
}

/// Collects sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    parts: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        self.parts.push(what);
    }

    fn finish(self, headline: &str) -> Outcome {
        Outcome {
            ok: self.failures.is_empty(),
            summary: headline.to_string(),
            details: if self.failures.is_empty() { self.parts } else { self.failures },
        }
    }
}

fn sf(text: &str, lo: f64, hi: f64) -> ScaleFactor {
    ScaleFactor::new(text, lo, hi).unwrap()
}

fn chart(branch: Branch, a: ScaleFactor, region: Region, n: usize) -> SphericalChart {
    let params = ChartParams {
        branch,
        sf: a,
        t_ref: None,
        labeling: Labeling::Axis,
    };
    build_tf(&params, region, n, n).unwrap()
}

fn milne_chart() -> SphericalChart {
    chart(Branch::Hyperbolic, sf("t", 0.0, INF), Region { t: (0.2, 5.0), r: (0.02, 2.5) }, 21)
}

/// Flat de Sitter on `t ∈ (−0.3, 0.3)`, `r ∈ (0.07, 0.66)`, so that
/// `R = r·e^t` stays inside `(0.05, 0.9)`.
fn desitter_chart() -> SphericalChart {
    chart(Branch::Flat, sf("exp(t)", -INF, INF), Region { t: (-0.3, 0.3), r: (0.07, 0.66) }, 21)
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

fn report_line(r: &VerifyReport) -> String {
    format!(
        "{} max {:.2e} (tol {:.0e}, {} samples, {} skipped)",
        r.identity, r.max_residual, r.tol, r.samples, r.skipped
    )
}

fn milne_end_to_end() -> Outcome {
    let mut c = Checks::default();
    let a = sf("t", 0.0, INF);
    let mut g_err: f64 = 0.0;
    let mut n = 0;
    for t in grid(0.1, 10.0, 40) {
        for r in grid(0.0, 3.0, 25) {
            g_err = g_err.max((g_of(Branch::Hyperbolic, &a, t, r).unwrap() - 1.0).abs());
            n += 1;
        }
    }
    c.check(n == 1000 && g_err <= 1e-12, format!("G ≡ 1 at {n} points, max err {g_err:.1e}"));

    let ch = milne_chart();
    let push = check_sph_pushforward(&ch, 1000, 1e-5, 1e-6, 1).unwrap();
    c.check(push.pass, report_line(&push));

    // Minkowski cylindrical coordinates: z = R cosθ, ρ = R sinθ, A = B = C = 1,
    // at (T, R) = (t cosh r, t sinh r)
    let mut t_err: f64 = 0.0;
    for t in grid(0.2, 5.0, 32) {
        for r in grid(0.02, 2.5, 32) {
            t_err = t_err.max((ch.t_cap(t, r).unwrap() - t * r.cosh()).abs() / (1.0 + t * r.cosh()));
        }
    }
    c.check(t_err <= 1e-9, format!("T = t cosh r, max rel err {t_err:.1e}"));
    let axi = AxiChart::new(Source::Spherical(Box::new(ch)), Some(1.0), Profile::Identity).unwrap();
    let (mut worst, mut used, mut outside) = (0.0f64, 0, 0);
    for t in grid(0.2, 5.0, 32) {
        for r in grid(0.02, 2.5, 32) {
            let (t_cap, big_r) = (t * r.cosh(), t * r.sinh());
            for th in grid(0.0, PI, 5) {
                let p = match axi.point(t_cap, big_r, th) {
                    Ok(p) => p,
                    // the fixed-T path from R0 = 1 leaves the image
                    Err(AxiError::Source(ChartError::OutsideRegion { .. })) => {
                        outside += 1;
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                let k = p.coeffs.expect("Milne has no degenerate locus");
                let errs = [
                    p.z - big_r * th.cos(),
                    p.rho - big_r * th.sin(),
                    k.a - 1.0,
                    k.b - 1.0,
                    k.c - 1.0,
                ];
                worst = errs.iter().fold(worst, |m, e| m.max(e.abs()));
                used += 1;
            }
        }
    }
    c.check(
        used >= 1000 && worst <= 1e-9,
        format!("axi z, ρ, A, B, C at {used} points ({outside} outside), max err {worst:.1e}"),
    );
    c.finish("Milne end-to-end")
}

fn flat_desitter() -> Outcome {
    let mut c = Checks::default();
    let a = sf("exp(t)", -INF, INF);
    let mut g_err: f64 = 0.0;
    for t in grid(-2.0, 1.0, 40) {
        for r in grid(0.0, 0.3, 25) {
            let big_r = r * t.exp();
            let oracle = 1.0 / (1.0 - big_r * big_r);
            let got = g_of(Branch::Flat, &a, t, r).unwrap();
            g_err = g_err.max((got - oracle).abs());
            assert_eq!(r_of(Branch::Flat, &a, t, r).unwrap(), big_r);
        }
    }
    c.check(g_err <= 1e-12, format!("G = 1/(1−R²) at 1000 points, max err {g_err:.1e}"));
    let ch = desitter_chart();
    let push = check_sph_pushforward(&ch, 1000, 1e-5, 1e-5, 2).unwrap();
    c.check(push.pass, report_line(&push));
    c.finish("flat de Sitter")
}

fn synthetic(f: &str, g: &str, profile: &str) -> AxiChart {
    let src = SyntheticFg::from_exprs(f, g, (0.0, 1.0), (0.3, 2.0)).unwrap();
    AxiChart::new(Source::Synthetic(src), None, Profile::parse(profile).unwrap()).unwrap()
}

fn axi_suite() -> Outcome {
    let mut c = Checks::default();
    let charts: Vec<(&str, AxiChart)> = vec![
        (
            "Milne",
            AxiChart::new(Source::Spherical(Box::new(milne_chart())), Some(1.0), Profile::Identity).unwrap(),
        ),
        (
            "de Sitter",
            AxiChart::new(Source::Spherical(Box::new(desitter_chart())), None, Profile::Identity).unwrap(),
        ),
        ("F=1, G=1+R²", synthetic("1", "1 + R^2", "identity")),
        ("F=1−R²/4, G=1/(1+R)", synthetic("1 - R^2/4", "1/(1 + R)", "x + x^3")),
        ("F=−1, G=−2", synthetic("-1", "-2", "identity")),
        ("F=2, G=e^{−R}", synthetic("2", "exp(-R)", "sinh(x)")),
        ("F=1+R, G=R²−1/2", synthetic("1 + R", "R^2 - 0.5", "2*x")),
    ];
    for (k, (name, chart)) in charts.iter().enumerate() {
        let seed = 100 + k as u64;
        // FLRW sources lose draws whose fixed-T path leaves the image
        let draws = if matches!(chart.source(), Source::Spherical(_)) { 1500 } else { 500 };
        let reports = [
            check_axi_pushforward(chart, draws, 1e-5, 1e-4, seed),
            check_transport(chart, draws, 1e-5, 1e-4, seed),
            check_jacobian(chart, draws, 1e-5, 1e-5, seed),
            check_z_theta(chart, draws, 1e-5, 1e-5, seed),
        ];
        for r in reports {
            match r {
                Ok(r) => c.check(r.pass && r.samples >= 500, format!("{name}: {}", report_line(&r))),
                Err(e) => c.check(false, format!("{name}: {e}")),
            }
        }
        match check_characteristics(chart, 4 * draws / 10, 1e-6, seed) {
            Ok(r) => c.check(r.pass && r.samples >= 20, format!("{name}: {}", report_line(&r))),
            Err(e) => c.check(false, format!("{name}: {e}")),
        }
    }
    c.finish("axisymmetric identity suite (2 FLRW + 5 synthetic fields)")
}

/// `t` below which `|G| ≤ ε` and `|C| ≤ ε` on `R = R0`, θ = π/3, for flat
/// `a = t^p`. There `G = t²/(t² − k)` with `k = (p·R0)²` and
/// `C = 4G/(G + 3)`.
fn witness_oracle(p: f64, r0: f64, eps: f64) -> f64 {
    let k = (p * r0).powi(2);
    let g_for_c = 3.0 * eps / (4.0 + eps);
    let g_max = eps.min(g_for_c);
    (k * g_max / (1.0 + g_max)).sqrt()
}

fn kind_name(d: &LimitDiag) -> &'static str {
    match d.kind {
        LimitKind::Finite(_) => "Finite",
        LimitKind::Zero => "Zero",
        LimitKind::PlusInfinity => "PlusInfinity",
        LimitKind::Inconclusive => "Inconclusive",
    }
}

fn witnesses() -> Outcome {
    let mut c = Checks::default();
    for (text, p) in [("t^(1/2)", 0.5), ("t^(2/3)", 2.0 / 3.0)] {
        let spec = SpacetimeSpec::new(Curvature::Flat, 3, sf(text, 0.0, INF));
        let w = witness_degeneracy(&spec, 1.0, FRAC_PI_3, 1e-2).unwrap();
        let oracle = witness_oracle(p, 1.0, 1e-2);
        match w.outcome {
            WitnessOutcome::Witness { t, g, c: cc } => c.check(
                g.abs() <= 1e-2 && cc.abs() <= 1e-2 && (t - oracle).abs() <= 1e-6 * oracle,
                format!("a={text}: Witness at t={t:.6} (oracle {oracle:.6}), G={g:.2e}, C={cc:.2e}"),
            ),
            WitnessOutcome::NoWitness => c.check(false, format!("a={text}: NoWitness")),
        }
        let curve = CurveSpec {
            kind: CurveKind::ConstantR { r0: 1.0 },
            theta: FRAC_PI_3,
        };
        let res = probe(&spec, &curve, 0.5).unwrap();
        let kinds = [kind_name(&res.limits.g), kind_name(&res.limits.c), kind_name(&res.limits.r2ap2)];
        c.check(
            kinds == ["Zero", "Zero", "PlusInfinity"],
            format!("a={text}: (G, C, r²a'²) limits {kinds:?}"),
        );
    }
    let milne = SpacetimeSpec::new(Curvature::Hyperbolic, 3, sf("t", 0.0, INF));
    let w = witness_degeneracy(&milne, 1.0, FRAC_PI_3, 1e-2).unwrap();
    c.check(w.outcome == WitnessOutcome::NoWitness, format!("Milne: {:?}", w.outcome));
    c.finish("degeneracy witnesses")
}

fn classification_regression() -> Outcome {
    let mut c = Checks::default();
    let mut misses = Vec::new();
    let mut total = 0;
    for name in catalog::list() {
        let e = catalog::get(name).unwrap();
        let r = full_report(&e.spec);
        for (id, want) in &e.expected {
            total += 1;
            let got = r.verdict(id).unwrap().conclusion;
            if got != *want {
                misses.push(format!("{name}/{id}: {got} ≠ {want}"));
            }
        }
    }
    c.check(misses.is_empty(), format!("{} of {total} catalog verdicts match {misses:?}", total - misses.len()));
    let verdict = |name: &str, id: &str| full_report(&catalog::get(name).unwrap().spec).verdict(id).unwrap().conclusion;
    for (name, id) in [("radiation_flat", PAST_C01), ("radiation_flat", SYMMETRIC), ("milne", MILNE_LIKE)] {
        let got = verdict(name, id);
        c.check(got == Conclusion::Applies, format!("{name}: {id} {got}"));
    }
    let sph = power_law(1.0, Curvature::Spherical).unwrap();
    let got = full_report(&sph.spec).verdict(PAST_C0).unwrap().conclusion;
    c.check(got == Conclusion::Applies, format!("K=+1, a=t: {PAST_C0} {got}"));
    c.finish("classification regression")
}

fn classifiers() -> Outcome {
    let mut c = Checks::default();
    for p in [0.25, 0.5, 2.0 / 3.0, 1.0, 1.5] {
        let h = has_particle_horizon(&sf(&format!("t^{p:?}"), 0.0, INF)).unwrap();
        let has = matches!(h, Horizon::HasHorizon(_));
        let decided = !matches!(h, Horizon::Inconclusive(_));
        c.check(decided && has == (p < 1.0), format!("t^{p:.3}: horizon {has}"));
    }
    let finite_near = |d: &LimitDiag, v: f64, tol: f64| matches!(d.kind, LimitKind::Finite(x) if (x - v).abs() <= tol);
    let s1 = sbierski_hyperbolic_limit(&sf("t", 0.0, INF)).unwrap();
    c.check(finite_near(&s1, 1.0, 1e-6), format!("sbierski(t) {:?}", s1.kind));
    let s2 = sbierski_hyperbolic_limit(&sf("t + t^2", 0.0, INF)).unwrap();
    c.check(finite_near(&s2, 0.5, 1e-4), format!("sbierski(t+t²) {:?}", s2.kind));
    let l = ling_limit(&sf("exp(t)", -INF, INF)).unwrap();
    c.check(finite_near(&l, 1.0, 1e-4), format!("ling(e^t) {:?}", l.kind));
    c.finish("integral and limit classifiers")
}

fn byte_determinism() -> Result<usize, String> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (cmd, cfg) in [
        (&["classify"][..], "radiation.toml"),
        (&["chart", "spherical"][..], "milne.toml"),
        (&["chart", "axi"][..], "desitter.toml"),
        (&["chart", "axi"][..], "synthetic.toml"),
        (&["verify", "--seed", "9"][..], "milne.toml"),
        (&["verify", "--seed", "9"][..], "synthetic.toml"),
        (&["probe"][..], "radiation.toml"),
        (&["catalog", "list"][..], "radiation.toml"),
    ] {
        let mut outs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("run{k}.out"));
            let status = Command::new(env!("CARGO_BIN_EXE_flrw"))
                .args(cmd)
                .arg("--config")
                .arg(configs.join(cfg))
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{cmd:?} {cfg}: {status}"));
            }
            let mut bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
            if cmd[0] == "probe" {
                bytes.extend(std::fs::read(dir.path().join(format!("run{k}.summary.json"))).map_err(|e| e.to_string())?);
            }
            outs.push(bytes);
        }
        if outs[0] != outs[1] || outs[0].is_empty() {
            return Err(format!("{cmd:?} {cfg}: outputs differ"));
        }
        runs += 1;
    }
    Ok(runs)
}

fn hygiene() -> Outcome {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<_> = (0..1000).map(|_| common::ad_case(&mut rng)).collect();
    let bad = cases.iter().filter(|x| !common::ad_within_tol(x)).count();
    let worst = cases
        .iter()
        .map(|x| (x.deriv - x.fd).abs() / (1.0 + x.deriv.abs()))
        .fold(0.0, f64::max);
    c.check(bad == 0, format!("autodiff vs FD: {bad}/1000 outside 1e-6, worst {worst:.1e}"));

    for (name, ch) in [("de Sitter", desitter_chart()), ("Milne", milne_chart())] {
        let (coarse, fine, ratio) = convergence_ratio(&ch, 200, 1e-4, 3).unwrap();
        c.check(
            (3.0..=5.0).contains(&ratio),
            format!("{name}: residual {coarse:.2e} → {fine:.2e} from h=1e-4 to 5e-5, ratio {ratio:.2}"),
        );
    }
    match byte_determinism() {
        Ok(n) => c.check(true, format!("CLI byte-identical across two runs for {n} commands")),
        Err(e) => c.check(false, format!("CLI determinism: {e}")),
    }
    c.finish("numerical hygiene")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1", milne_end_to_end),
        ("2", flat_desitter),
        ("3", axi_suite),
        ("4", witnesses),
        ("5", classification_regression),
        ("6", classifiers),
        ("7", hygiene),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                ok: false,
                summary: "panicked".into(),
                details: vec![msg],
            }
        });
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {}", outcome.summary);
        for d in &outcome.details {
            println!("       {d}");
        }
        failed += usize::from(!outcome.ok);
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
