//! Experiment files: one config shape per subcommand, each resolved to a
//! report value plus optional CSV rows.

use std::path::PathBuf;

use equidyn_core::config::{MeasureConfig, Sided, SystemConfig};
use equidyn_core::measures::{uncovered_mass, vitali_cover};
use equidyn_core::orbit::mu_equicontinuity_report;
use equidyn_core::periodicity::{lep_statistics, mu_lep_classify};
use equidyn_core::sensitivity::{dichotomy_report, mu_sensitivity_estimate, Thresholds};
use equidyn_core::spectral::{spectrum, IntegrationMode};
use equidyn_core::{
    Configuration, Cylinder, CylinderSet, EigenfunctionSpec, EquicontinuityParams, Indexing, Measure, System, Word,
    DEFAULT_ENUMERATION_CAP,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

fn default_samples() -> u64 {
    10_000
}

fn default_delta() -> f64 {
    0.05
}

fn default_points() -> usize {
    20
}

fn default_n_list() -> Vec<usize> {
    vec![1, 2, 4, 8]
}

fn default_resolution() -> usize {
    1
}

fn default_eps_list() -> Vec<f64> {
    vec![0.05]
}

fn default_certificate_horizon() -> usize {
    64
}

/// Fields shared by every experiment that runs a system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Base {
    pub system: SystemConfig,
    pub measure: MeasureConfig,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: u64,
    /// Where the report goes; not part of the payload.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Base {
    fn build(&self) -> Result<(System, Measure), CliError> {
        let sys = self.system.build().map_err(|e| CliError::config("system", e))?;
        let mu = self.measure.build().map_err(|e| CliError::config("measure", e))?;
        Ok((sys, mu))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquicontinuitySection {
    #[serde(default = "default_resolution")]
    pub m: usize,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    /// Defaults to the experiment's `T`.
    #[serde(rename = "T", default)]
    pub horizon: Option<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(rename = "N", default)]
    pub samples: Option<u64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

impl Default for EquicontinuitySection {
    fn default() -> Self {
        EquicontinuitySection {
            m: default_resolution(),
            n_list: default_n_list(),
            horizon: None,
            points: default_points(),
            samples: None,
            delta: default_delta(),
        }
    }
}

impl EquicontinuitySection {
    fn resolve(&mut self, horizon: usize, samples: u64) {
        self.horizon.get_or_insert(horizon);
        self.samples.get_or_insert(samples);
    }

    fn params(&self, cap: u64) -> EquicontinuityParams {
        EquicontinuityParams {
            m: self.m,
            n_list: self.n_list.clone(),
            horizon: self.horizon.expect("resolved"),
            points: self.points,
            samples: self.samples.expect("resolved"),
            delta: self.delta,
            cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityConfig {
    #[serde(flatten)]
    pub base: Base,
    pub m: usize,
    pub n_list: Vec<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LepConfig {
    #[serde(flatten)]
    pub base: Base,
    pub m_list: Vec<usize>,
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    #[serde(flatten)]
    pub base: Base,
    pub m_list: Vec<usize>,
    #[serde(default = "default_delta")]
    pub eps: f64,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub equicontinuity: EquicontinuitySection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integration {
    Exact,
    Sampled,
}

fn exact() -> Integration {
    Integration::Exact
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralConfig {
    #[serde(flatten)]
    pub base: Base,
    /// Base point, written as its window word.
    pub y: String,
    pub m: usize,
    /// A single frequency; all `k < p` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "certificate_T", default = "default_certificate_horizon")]
    pub certificate_horizon: usize,
    #[serde(default = "exact")]
    pub integration: Integration,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityConfig {
    #[serde(flatten)]
    pub base: Base,
    pub eps_list: Vec<f64>,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DichotomyConfig {
    #[serde(flatten)]
    pub base: Base,
    pub eps_list: Vec<f64>,
    #[serde(rename = "N", default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_delta")]
    pub delta_s: f64,
    #[serde(default = "default_delta")]
    pub delta_e: f64,
    #[serde(default)]
    pub equicontinuity: EquicontinuitySection,
}

fn one_sided() -> Sided {
    Sided::One
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VitaliConfig {
    pub measure: MeasureConfig,
    #[serde(default = "one_sided")]
    pub sided: Sided,
    /// Cylinder words; their union is the set to cover.
    pub set: Vec<String>,
    pub min_radius: usize,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    /// Where the report goes; not part of the payload.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

/// What a run produces: the JSON payload and, for tabular results, CSV
/// rows with a header.
pub struct Outcome {
    pub report: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("field `{path}`: {inner}"))
        }
    })
}

/// Parses a config that flattens [`Base`]. Flattening hides field paths,
/// so the shared fields are checked on their own first.
fn parse_with_base<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    parse::<Base>(text)?;
    parse(text)
}

fn apply(base: &mut Base, o: &Overrides) {
    if let Some(seed) = o.seed {
        base.seed = seed;
    }
    if let Some(out) = &o.out {
        base.out = Some(out.clone());
    }
}

fn report<C: Serialize, R: Serialize>(kind: &str, config: &C, result: &R) -> Result<Value, CliError> {
    let config = serde_json::to_value(config).map_err(CliError::internal)?;
    let result = serde_json::to_value(result).map_err(CliError::internal)?;
    Ok(serde_json::json!({ "kind": kind, "config": config, "result": result }))
}

fn float(v: f64) -> String {
    let r = crate::output::round_sig(v);
    serde_json::Number::from_f64(r).map_or_else(|| r.to_string(), |n| n.to_string())
}

pub fn density(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: DensityConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    let (sys, mu) = cfg.base.build()?;
    let params = EquicontinuityParams {
        m: cfg.m,
        n_list: cfg.n_list.clone(),
        horizon: cfg.base.horizon,
        points: cfg.points,
        samples: cfg.samples,
        delta: cfg.delta,
        cap: cfg.base.cap,
    };
    let res = mu_equicontinuity_report(&sys, &mu, &params, cfg.base.seed)?;
    let mut rows = Vec::new();
    for (i, curve) in res.points.iter().enumerate() {
        for (j, n) in cfg.n_list.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                curve.point.clone(),
                n.to_string(),
                float(curve.ratios[j]),
                float(curve.stderr[j]),
                curve.exact.to_string(),
            ]);
        }
    }
    let table = Table {
        header: vec!["point", "x", "n", "ratio", "stderr", "exact"],
        rows,
    };
    Ok((
        Outcome {
            report: report("density", &cfg, &res)?,
            table: Some(table),
        },
        cfg.base.out,
    ))
}

pub fn lep(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: LepConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    let (sys, mu) = cfg.base.build()?;
    let mut stats = Vec::new();
    for &m in &cfg.m_list {
        for &eps in &cfg.eps_list {
            stats.push(lep_statistics(
                &sys,
                &mu,
                m,
                eps,
                cfg.samples,
                cfg.base.horizon,
                cfg.base.seed,
            )?);
        }
    }
    let opt = |v: Option<usize>| v.map(|p| p.to_string()).unwrap_or_default();
    let rows = stats
        .iter()
        .map(|s| {
            vec![
                s.m.to_string(),
                float(s.eps),
                opt(s.period_bound),
                opt(s.preperiod_bound),
                float(s.certified_fraction),
                float(s.periodic_fraction),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["m", "eps", "p_hat", "q_hat", "certified_fraction", "periodic_fraction"],
        rows,
    };
    Ok((
        Outcome {
            report: report("lep", &cfg, &stats)?,
            table: Some(table),
        },
        cfg.base.out,
    ))
}

pub fn classify(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: ClassifyConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    cfg.equicontinuity.resolve(cfg.base.horizon, cfg.samples);
    let (sys, mu) = cfg.base.build()?;
    let params = cfg.equicontinuity.params(cfg.base.cap);
    let res = mu_lep_classify(
        &sys,
        &mu,
        &cfg.m_list,
        cfg.eps,
        cfg.samples,
        cfg.base.horizon,
        cfg.base.seed,
        &params,
    )?;
    Ok((
        Outcome {
            report: report("classify", &cfg, &res)?,
            table: None,
        },
        cfg.base.out,
    ))
}

pub fn spectral(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: SpectralConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    let (sys, mu) = cfg.base.build()?;
    let (Some(alphabet), Some(indexing)) = (sys.alphabet(), sys.indexing()) else {
        return Err(CliError::Config(
            "field `system`: spectral analysis needs a symbolic system".into(),
        ));
    };
    let y = Configuration::parse(&cfg.y, alphabet, indexing).map_err(|e| CliError::config("y", e))?;
    let base = EigenfunctionSpec::new(&sys, &y, cfg.m, cfg.k.unwrap_or(0), cfg.certificate_horizon)?;
    let mode = match cfg.integration {
        Integration::Exact => IntegrationMode::Exact { cap: cfg.base.cap },
        Integration::Sampled => IntegrationMode::Sampled {
            samples: cfg.samples,
            seed: cfg.base.seed,
        },
    };
    let mut entries = spectrum(&base, &mu, mode, cfg.base.horizon)?;
    if let Some(k) = cfg.k {
        entries.retain(|e| e.k == k);
    }
    let rows = entries
        .iter()
        .map(|e| {
            vec![
                e.p.to_string(),
                e.k.to_string(),
                float(e.eigenvalue.re),
                float(e.eigenvalue.im),
                float(e.residual),
                float(e.norm),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["p", "k", "re", "im", "residual", "norm"],
        rows,
    };
    Ok((
        Outcome {
            report: report("spectral", &cfg, &entries)?,
            table: Some(table),
        },
        cfg.base.out,
    ))
}

pub fn sensitivity(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: SensitivityConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    let (sys, mu) = cfg.base.build()?;
    let seeds = equidyn_core::SeedStream::new(cfg.base.seed);
    let estimates = cfg
        .eps_list
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            mu_sensitivity_estimate(
                &sys,
                &mu,
                eps,
                cfg.base.horizon,
                cfg.samples,
                seeds.substream(i as u64).seed(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = estimates
        .iter()
        .map(|s| {
            vec![
                float(s.eps),
                s.horizon.to_string(),
                float(s.estimate),
                float(s.stderr),
                s.samples.to_string(),
            ]
        })
        .collect();
    let table = Table {
        header: vec!["eps", "T", "p", "stderr", "N"],
        rows,
    };
    Ok((
        Outcome {
            report: report("sensitivity", &cfg, &estimates)?,
            table: Some(table),
        },
        cfg.base.out,
    ))
}

pub fn dichotomy(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: DichotomyConfig = parse_with_base(text)?;
    apply(&mut cfg.base, o);
    cfg.equicontinuity.resolve(cfg.base.horizon, cfg.samples);
    let (sys, mu) = cfg.base.build()?;
    let params = cfg.equicontinuity.params(cfg.base.cap);
    let thresholds = Thresholds {
        delta_s: cfg.delta_s,
        delta_e: cfg.delta_e,
    };
    let res = dichotomy_report(
        &sys,
        &mu,
        &cfg.eps_list,
        cfg.base.horizon,
        cfg.samples,
        &params,
        thresholds,
        cfg.base.seed,
    )?;
    Ok((
        Outcome {
            report: report("dichotomy", &cfg, &res)?,
            table: None,
        },
        cfg.base.out,
    ))
}

#[derive(Serialize)]
struct VitaliResult {
    balls: Vec<VitaliBall>,
    set_mass: f64,
    covered_mass: f64,
    uncovered_mass: f64,
    pairwise_disjoint: bool,
}

#[derive(Serialize)]
struct VitaliBall {
    center: String,
    radius: usize,
}

pub fn vitali(text: &str, o: &Overrides) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let mut cfg: VitaliConfig = parse(text)?;
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &o.out {
        cfg.out = Some(out.clone());
    }
    let mu = cfg.measure.build().map_err(|e| CliError::config("measure", e))?;
    let alphabet = mu
        .alphabet()
        .ok_or_else(|| CliError::Config("field `measure`: vitali covers need a measure on a Cantor space".into()))?;
    let indexing = Indexing::from(cfg.sided);
    let cylinders = cfg
        .set
        .iter()
        .map(|w| Cylinder::new(alphabet, indexing, Word::parse(w, alphabet)?))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::config("set", e))?;
    let set = CylinderSet::new(alphabet, indexing, cylinders).map_err(|e| CliError::config("set", e))?;
    let family = vitali_cover(&mu, &set, cfg.min_radius, cfg.eps)?;
    let result = VitaliResult {
        balls: family
            .balls
            .iter()
            .map(|b| VitaliBall {
                center: b.center.render(),
                radius: b.radius,
            })
            .collect(),
        set_mass: mu.set_probability(&set)?,
        covered_mass: family.mass(&mu)?,
        uncovered_mass: uncovered_mass(&mu, &set, &family)?,
        pairwise_disjoint: family.is_pairwise_disjoint()?,
    };
    let rows = result
        .balls
        .iter()
        .map(|b| vec![b.center.clone(), b.radius.to_string()])
        .collect();
    let table = Table {
        header: vec!["center", "radius"],
        rows,
    };
    Ok((
        Outcome {
            report: report("vitali", &cfg, &result)?,
            table: Some(table),
        },
        cfg.out,
    ))
}
