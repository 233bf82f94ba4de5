//! TOML run configuration.

use std::path::Path;

use serde::Deserialize;

use crate::axi_chart::{AxiChart, Profile, Source, SyntheticFg};
use crate::criteria::{Curvature, SpacetimeSpec};
use crate::expr::parse;
use crate::probe::{CurveKind, CurveSpec};
use crate::scale_factor::{parse_endpoint, Meta, ScaleFactor, Sublinear};
use crate::sph_chart::{build_tf, Branch, ChartParams, Labeling, Region, SphericalChart};

use super::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spacetime: SpacetimeCfg,
    pub chart: Option<ChartCfg>,
    pub axi: Option<AxiCfg>,
    pub probe: Option<ProbeCfg>,
    pub verify: Option<VerifyCfg>,
}

/// An interval endpoint: a number, TOML's `inf`/`-inf`, or a string such as
/// `"-inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Num(f64),
    Text(String),
}

impl Endpoint {
    fn value(&self) -> Option<f64> {
        match self {
            Endpoint::Num(v) if !v.is_nan() => Some(*v),
            Endpoint::Num(_) => None,
            Endpoint::Text(s) => parse_endpoint(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeCfg {
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(default = "default_d")]
    pub d: u32,
    pub a: String,
    pub interval: [Endpoint; 2],
    pub anchor: Option<f64>,
    pub meta: Option<MetaCfg>,
}

fn default_d() -> u32 {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaCfg {
    #[serde(default)]
    pub monotone_increasing: bool,
    pub sublinear: Option<SublinearCfg>,
    #[serde(default)]
    pub positivity_asserted: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublinearCfg {
    pub m: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelingCfg {
    Axis,
    Slice,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartCfg {
    pub t_range: [f64; 2],
    pub r_range: [f64; 2],
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default = "default_labeling")]
    pub labeling: LabelingCfg,
    pub t_ref: Option<f64>,
}

fn default_grid() -> [usize; 2] {
    [11, 11]
}

fn default_labeling() -> LabelingCfg {
    LabelingCfg::Axis
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceCfg {
    Spherical,
    Synthetic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiCfg {
    #[serde(default = "default_source")]
    pub source: SourceCfg,
    #[serde(rename = "F")]
    pub f: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<String>,
    #[serde(rename = "T_range")]
    pub t_range: Option<[f64; 2]>,
    #[serde(rename = "R_range")]
    pub r_range: Option<[f64; 2]>,
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    #[serde(default = "default_profile")]
    pub profile: String,
    /// Number of `θ` values in `(0, π)`, evenly spaced, endpoints excluded.
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    /// `T × R` grid for synthetic sources.
    #[serde(default = "default_axi_grid")]
    pub grid: [usize; 2],
}

fn default_source() -> SourceCfg {
    SourceCfg::Spherical
}

fn default_profile() -> String {
    "identity".into()
}

fn default_n_theta() -> usize {
    7
}

fn default_axi_grid() -> [usize; 2] {
    [3, 9]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveCfg {
    ConstantR,
    NearNull,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeCfg {
    pub curve: CurveCfg,
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    pub kappa: Option<f64>,
    pub r1: Option<f64>,
    pub t1: Option<f64>,
    /// `r(t)` for custom curves.
    pub r: Option<String>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_q")]
    pub q: f64,
    pub witness: Option<WitnessCfg>,
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_3
}

fn default_q() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCfg {
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckCfg {
    Sph,
    Axi,
    Jacobian,
    Transport,
    ZTheta,
    Characteristics,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    pub checks: Option<Vec<CheckCfg>>,
}

fn default_samples() -> usize {
    100
}

fn default_h() -> f64 {
    crate::verify::DEFAULT_H
}

fn default_tol() -> f64 {
    1e-5
}

impl Default for VerifyCfg {
    fn default() -> Self {
        VerifyCfg {
            samples: default_samples(),
            h: default_h(),
            tol: default_tol(),
            seed: 0,
            checks: None,
        }
    }
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn require<T: Copy>(v: Option<T>, field: &str) -> Result<T, CliError> {
    v.ok_or_else(|| config_err(field, "missing"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<SpacetimeSpec, CliError> {
        let s = &self.spacetime;
        let k = Curvature::from_k(s.k).ok_or_else(|| config_err("spacetime.K", "must be -1, 0 or 1"))?;
        if s.d == 0 {
            return Err(config_err("spacetime.d", "must be at least 1"));
        }
        let expr = parse(&s.a).map_err(|e| config_err("spacetime.a", e))?;
        let lo = s.interval[0]
            .value()
            .ok_or_else(|| config_err("spacetime.interval[0]", "not a number or ±inf"))?;
        let hi = s.interval[1]
            .value()
            .ok_or_else(|| config_err("spacetime.interval[1]", "not a number or ±inf"))?;
        let mut sf = ScaleFactor::from_expr(expr, lo, hi).map_err(|e| config_err("spacetime.interval", e))?;
        if let Some(anchor) = s.anchor {
            sf = sf.with_anchor(anchor).map_err(|e| config_err("spacetime.anchor", e))?;
        }
        if let Some(m) = &s.meta {
            if let Some(sl) = m.sublinear {
                if !(sl.m > 0.0 && sl.b >= 0.0) {
                    return Err(config_err("spacetime.meta.sublinear", "needs m > 0 and b ≥ 0"));
                }
            }
            sf = sf.with_meta(Meta {
                monotone_increasing: m.monotone_increasing,
                sublinear: m.sublinear.map(|x| Sublinear { m: x.m, b: x.b }),
                positivity_asserted: m.positivity_asserted,
            });
        }
        Ok(SpacetimeSpec::new(k, s.d, sf))
    }

    pub fn branch(&self) -> Result<Branch, CliError> {
        match self.spacetime.k {
            0 => Ok(Branch::Flat),
            -1 => Ok(Branch::Hyperbolic),
            _ => Err(config_err("spacetime.K", "charts need a flat (0) or hyperbolic (-1) spacetime")),
        }
    }

    pub fn spherical_chart(&self) -> Result<SphericalChart, CliError> {
        let c = self.chart.as_ref().ok_or_else(|| config_err("chart", "section missing"))?;
        let spec = self.spec()?;
        let params = ChartParams {
            branch: self.branch()?,
            sf: spec.sf,
            t_ref: c.t_ref,
            labeling: match c.labeling {
                LabelingCfg::Axis => Labeling::Axis,
                LabelingCfg::Slice => Labeling::Slice,
            },
        };
        let region = Region {
            t: (c.t_range[0], c.t_range[1]),
            r: (c.r_range[0], c.r_range[1]),
        };
        build_tf(&params, region, c.grid[0], c.grid[1]).map_err(super::chart_error)
    }

    pub fn axi_chart(&self) -> Result<AxiChart, CliError> {
        let c = self.axi.as_ref().ok_or_else(|| config_err("axi", "section missing"))?;
        let source = match c.source {
            SourceCfg::Spherical => Source::Spherical(Box::new(self.spherical_chart()?)),
            SourceCfg::Synthetic => {
                let f = c.f.as_deref().ok_or_else(|| config_err("axi.F", "missing"))?;
                let g = c.g.as_deref().ok_or_else(|| config_err("axi.G", "missing"))?;
                let t = require(c.t_range, "axi.T_range")?;
                let r = require(c.r_range, "axi.R_range")?;
                if !(r[0] > 0.0 && r[0] < r[1] && t[0] <= t[1]) {
                    return Err(config_err("axi.R_range", "needs 0 < lo < hi"));
                }
                Source::Synthetic(
                    SyntheticFg::from_exprs(f, g, (t[0], t[1]), (r[0], r[1])).map_err(|e| config_err("axi.F/G", e))?,
                )
            }
        };
        let profile = Profile::parse(&c.profile).map_err(|e| config_err("axi.profile", e))?;
        AxiChart::new(source, c.r0, profile).map_err(super::axi_error)
    }

    pub fn curve(&self) -> Result<CurveSpec, CliError> {
        let p = self.probe.as_ref().ok_or_else(|| config_err("probe", "section missing"))?;
        let kind = match p.curve {
            CurveCfg::ConstantR => CurveKind::ConstantR {
                r0: require(p.r0, "probe.R0")?,
            },
            CurveCfg::NearNull => CurveKind::NearNullIngoing {
                kappa: require(p.kappa, "probe.kappa")?,
                r1: require(p.r1, "probe.r1")?,
                t1: require(p.t1, "probe.t1")?,
            },
            CurveCfg::Custom => {
                let text = p.r.as_deref().ok_or_else(|| config_err("probe.r", "missing"))?;
                CurveKind::Custom(parse(text).map_err(|e| config_err("probe.r", e))?)
            }
        };
        if !(p.q > 0.0 && p.q < 1.0) {
            return Err(config_err("probe.q", "must lie in (0, 1)"));
        }
        Ok(CurveSpec { kind, theta: p.theta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[spacetime]
K = 0
a = "t^(1/2)"
interval = [0.0, inf]
"#;

    #[test]
    fn minimal_config() {
        let cfg = RunConfig::parse(BASE).unwrap();
        let spec = cfg.spec().unwrap();
        assert_eq!(spec.d, 3);
        assert_eq!(spec.sf.t_sup(), f64::INFINITY);
    }

    #[test]
    fn string_endpoints() {
        let cfg = RunConfig::parse(
            "[spacetime]\nK = 0\na = \"exp(t)\"\ninterval = [\"-inf\", \"inf\"]\n",
        )
        .unwrap();
        assert_eq!(cfg.spec().unwrap().sf.t_inf(), f64::NEG_INFINITY);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = BASE.replace("t^(1/2)", "t^^2");
        let e = RunConfig::parse(&bad).unwrap().spec().unwrap_err().to_string();
        assert!(e.contains("spacetime.a"), "{e}");
        let e = RunConfig::parse(&format!("{BASE}bogus = 1\n")).unwrap_err().to_string();
        assert!(e.contains("bogus") && e.contains("line"), "{e}");
        let e = RunConfig::parse(&BASE.replace("K = 0", "K = 2")).unwrap().spec().unwrap_err();
        assert!(e.to_string().contains("spacetime.K"));
    }
}
