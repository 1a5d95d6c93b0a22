//! JSON run files and their merge with command-line flags (flags win).

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use rivalry_core::analysis::AnalysisConfig;
use rivalry_core::experiments::SweepAxis;
use rivalry_core::integrator::{InitialState, Preset, Scheme, SimConfig};
use rivalry_core::model::{ModelInstance, ModelKind, Stimulus};

use crate::args::{PresetArg, RunArgs, SchemeArg};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub model: Option<ModelInstance>,
    pub stim: Option<Stimulus>,
    #[serde(default)]
    pub sim: SimPatch,
    #[serde(default)]
    pub analysis: AnalysisPatch,
    #[serde(default)]
    pub sweep: SweepPatch,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimPatch {
    pub dt: Option<f64>,
    pub duration: Option<f64>,
    pub record_every: Option<usize>,
    pub seed: Option<u64>,
    pub initial_state: Option<InitialState>,
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisPatch {
    pub t_transient: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon_fusion: Option<f64>,
    pub min_switches_rivalry: Option<usize>,
    pub activity_midpoint: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPatch {
    pub axis: Option<SweepAxis>,
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub replicates: Option<usize>,
    pub extend_undetermined: Option<u32>,
}

impl RunFile {
    pub fn load(path: Option<&Path>) -> Result<RunFile> {
        let Some(path) = path else {
            return Ok(RunFile::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved model run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: ModelInstance,
    pub sim: SimConfig,
    pub analysis: AnalysisConfig,
}

pub fn parse_kv(text: &str) -> Result<(String, f64)> {
    let Some((k, v)) = text.split_once('=') else {
        bail!("expected NAME=VALUE, got `{text}`");
    };
    let v: f64 = v.trim().parse().with_context(|| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

pub fn parse_stim(text: &str) -> Result<Stimulus> {
    let parts: Vec<&str> = text.split(',').collect();
    let [s1, s2] = parts.as_slice() else {
        bail!("expected S1,S2, got `{text}`");
    };
    let s1: f64 = s1.trim().parse().with_context(|| format!("`{s1}` is not a number"))?;
    let s2: f64 = s2.trim().parse().with_context(|| format!("`{s2}` is not a number"))?;
    Ok(Stimulus::new(s1, s2)?)
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("expected LO:HI:STEP, got `{text}`");
    };
    let num = |s: &str| -> Result<f64> { s.trim().parse().with_context(|| format!("`{s}` is not a number")) };
    Ok(rivalry_core::experiments::grid(num(lo)?, num(hi)?, num(step)?)?)
}

/// Merges defaults, the run file and flags, in increasing priority.
pub fn resolve(file: &RunFile, args: &RunArgs) -> Result<Resolved> {
    let mut model = match (&args.model, file.model) {
        (Some(name), Some(m)) if m.kind() == name.parse::<ModelKind>()? => m,
        (Some(name), _) => ModelInstance::default_for(name.parse()?),
        (None, Some(m)) => m,
        (None, None) => bail!("no model given (use --model or a run file)"),
    };
    for kv in &args.params {
        let (k, v) = parse_kv(kv)?;
        model = model.with_param(&k, v)?;
    }
    model.validate()?;
    let kind = model.kind();

    let mut sim = SimConfig::default_for(kind);
    let p = &file.sim;
    sim.dt = args.dt.or(p.dt).unwrap_or(sim.dt);
    sim.duration = args.dur.or(p.duration).unwrap_or(sim.duration);
    sim.record_every = args.record_every.or(p.record_every).unwrap_or(sim.record_every);
    sim.seed = args.seed.or(p.seed).unwrap_or(sim.seed);
    sim.scheme = args
        .scheme
        .map(|s| match s {
            SchemeArg::Rk4 => Scheme::Rk4,
            SchemeArg::Euler => Scheme::Euler,
        })
        .or(p.scheme)
        .unwrap_or(sim.scheme);
    sim.initial_state = args
        .init
        .map(|i| {
            InitialState::Preset(match i {
                PresetArg::SymmetricZero => Preset::SymmetricZero,
                PresetArg::Perturbed => Preset::Perturbed,
            })
        })
        .or(p.initial_state)
        .unwrap_or(sim.initial_state);
    sim.validate(kind)?;

    let mut analysis = AnalysisConfig::default_for(kind, sim.duration);
    let a = &file.analysis;
    analysis.t_transient = args.transient.or(a.t_transient).unwrap_or(analysis.t_transient);
    analysis.delta = args.delta.or(a.delta).unwrap_or(analysis.delta);
    analysis.epsilon_fusion = args
        .delta
        .or(a.epsilon_fusion)
        .or(a.delta)
        .unwrap_or(analysis.epsilon_fusion);
    analysis.min_switches_rivalry = a.min_switches_rivalry.unwrap_or(analysis.min_switches_rivalry);
    analysis.activity_midpoint = a.activity_midpoint.unwrap_or(analysis.activity_midpoint);
    analysis.validate()?;

    Ok(Resolved { model, sim, analysis })
}
