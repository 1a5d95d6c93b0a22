use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use rivalry_core::analysis::{analyze, analyze_series, AnalysisConfig, RegimeLabel};
use rivalry_core::experiments::{
    run_levelt, run_sweep_with, Execution, LeveltPlan, LeveltReport, SweepAxis, SweepSpec,
};
use rivalry_core::export::{
    read_trajectory_csv, write_intervals_csv, write_json, write_sweep_csv, write_trajectory_csv,
    TrajectoryMeta,
};
use rivalry_core::integrator::simulate;
use rivalry_core::model::{ModelKind, Stimulus};

use crate::args::{AxisArg, ClassifyArgs, LeveltArgs, SimulateArgs, SweepArgs};
use crate::config::{parse_grid, parse_kv, parse_stim, resolve, RunFile};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A proposition verdict came out opposite to the documented expectation.
    ExpectationUnmet,
    NumericalFailure,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ExpectationUnmet => 1,
            Outcome::NumericalFailure => 3,
            Outcome::Inconclusive => 4,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    write_json(value, &mut lock)?;
    lock.flush()?;
    Ok(())
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn execution(jobs: Option<usize>) -> Execution {
    match jobs {
        Some(1) => Execution::Sequential,
        Some(0) | None => Execution::default(),
        Some(n) => Execution::Parallel(Some(n)),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let file = RunFile::load(args.run.config.as_deref())?;
    let run = resolve(&file, &args.run)?;
    let stim = match &args.stim {
        Some(s) => parse_stim(s)?,
        None => file.stim.unwrap_or(Stimulus::equal(0.0)?),
    };
    let traj = simulate(&run.model, &stim, &run.sim)?;
    if let Some(out) = &args.out {
        write_trajectory_csv(&traj, create(out)?)?;
        let meta = TrajectoryMeta {
            analysis: Some(run.analysis),
            ..TrajectoryMeta::of(&traj)
        };
        write_json(&meta, create(&sidecar_path(out))?)?;
    }
    let report = analyze(&traj, &run.analysis)?;
    if let Some(path) = &args.intervals {
        write_intervals_csv(&report.intervals, create(path)?)?;
    }
    print_json(&report)?;
    Ok(Outcome::Success)
}

pub fn cmd_sweep(args: &SweepArgs, jobs: Option<usize>) -> Result<Outcome> {
    let file = RunFile::load(args.run.config.as_deref())?;
    let run = resolve(&file, &args.run)?;
    let kind = run.model.kind();
    let axis = match args.axis {
        Some(AxisArg::Equal) => SweepAxis::EqualStimulus,
        Some(AxisArg::CrossInhibition) => SweepAxis::CrossInhibition,
        Some(AxisArg::Asymmetric) => SweepAxis::AsymmetricS1,
        None => file.sweep.axis.unwrap_or(SweepAxis::EqualStimulus),
    };
    let grid = match (&args.grid, &file.sweep.grid) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(g)) => g.clone(),
        (None, None) if axis == SweepAxis::EqualStimulus => SweepSpec::default_equal(kind).grid,
        (None, None) => bail!("--grid is required for the {axis:?} axis"),
    };
    let mut spec = SweepSpec::new(run.model, axis, grid);
    spec.sim = run.sim;
    spec.analysis = run.analysis;
    let duration_given = args.run.dur.is_some() || file.sim.duration.is_some();
    let transient_given = args.run.transient.is_some() || file.analysis.t_transient.is_some();
    if axis == SweepAxis::EqualStimulus && !duration_given {
        // equal sweeps default to the (possibly longer) sweep duration
        spec.sim.duration = SweepSpec::default_equal(kind).sim.duration;
        if !transient_given {
            spec.analysis.t_transient = AnalysisConfig::default_for(kind, spec.sim.duration).t_transient;
        }
    }
    spec.fixed = file.sweep.fixed.clone();
    for kv in &args.fixed {
        let (k, v) = parse_kv(kv)?;
        spec.fixed.insert(k, v);
    }
    if let Some(r) = args.replicates.or(file.sweep.replicates) {
        spec.replicates = r;
    }
    if let Some(n) = file.sweep.extend_undetermined {
        spec.extend_undetermined = n;
    }
    let result = run_sweep_with(&spec, execution(jobs))?;
    let failures: Vec<String> = result
        .rows
        .iter()
        .flat_map(|row| {
            row.replicates
                .iter()
                .filter_map(move |r| r.error.as_ref().map(|e| format!("param {} replicate {}: {e}", row.param, r.replicate)))
        })
        .collect();
    match &args.out {
        Some(prefix) => {
            write_sweep_csv(&result, create(&prefix.with_extension("csv"))?)?;
            write_json(&result, create(&prefix.with_extension("json"))?)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_sweep_csv(&result, &mut lock)?;
        }
    }
    if failures.is_empty() {
        Ok(Outcome::Success)
    } else {
        for f in &failures {
            eprintln!("error: {f}");
        }
        Ok(Outcome::NumericalFailure)
    }
}

/// Verdicts each model is expected to reach.
pub fn levelt_expectations(report: &LeveltReport) -> Vec<(&'static str, Option<bool>)> {
    match report.model {
        ModelKind::Wilson | ModelKind::LaingChow => {
            vec![("prop4_modified.reversal", report.prop4_modified.reversal)]
        }
        ModelKind::Kalarickal => vec![
            ("prop4_original.holds", report.prop4_original.holds),
            ("prop4_original.reversal == false", report.prop4_original.reversal.map(|r| !r)),
        ],
        ModelKind::LcAdaptation => vec![(
            "no WinnerTakeAll band in the equal sweep",
            Some(!report.equal_bands.iter().any(|b| b.regime == RegimeLabel::WinnerTakeAll)),
        )],
        ModelKind::LcDepression => Vec::new(),
    }
}

fn inconclusive_propositions(report: &LeveltReport) -> Vec<&'static str> {
    let verdicts = [
        ("prop1", report.prop1.holds),
        ("prop2_original", report.prop2_original.holds),
        ("prop2_modified", report.prop2_modified.holds),
        ("prop3_original", report.prop3_original.holds),
        ("prop3_modified", report.prop3_modified.holds),
        ("prop4_original", report.prop4_original.holds),
        ("prop4_modified", report.prop4_modified.holds),
        ("cross_inhibition", report.cross_inhibition.holds),
    ];
    verdicts.iter().filter(|(_, h)| h.is_none()).map(|(n, _)| *n).collect()
}

pub fn cmd_levelt(args: &LeveltArgs, jobs: Option<usize>) -> Result<Outcome> {
    let kind: ModelKind = args.model.parse()?;
    let plan = LeveltPlan::default_for(kind).with_seed(args.seed.unwrap_or(0));
    let report = run_levelt(&plan, execution(jobs))?;
    if let Some(out) = &args.out {
        write_json(&report, create(out)?)?;
    }
    let expectations = levelt_expectations(&report);
    let mut summary = serde_json::to_value(&report)?;
    if let Some(obj) = summary.as_object_mut() {
        obj.remove("sweeps");
        obj.insert(
            "expectations".into(),
            json!(expectations
                .iter()
                .map(|(name, met)| json!({ "check": name, "met": met }))
                .collect::<Vec<_>>()),
        );
    }
    print_json(&summary)?;

    let lacking = inconclusive_propositions(&report);
    if !lacking.is_empty() {
        eprintln!("inconclusive (too few rivalry rows): {}", lacking.join(", "));
    }
    if !lacking.is_empty() || expectations.iter().any(|(_, met)| met.is_none()) {
        return Ok(Outcome::Inconclusive);
    }
    let unmet: Vec<&str> = expectations
        .iter()
        .filter(|(_, met)| *met == Some(false))
        .map(|(n, _)| *n)
        .collect();
    if unmet.is_empty() {
        Ok(Outcome::Success)
    } else {
        eprintln!("expectation not met: {}", unmet.join(", "));
        Ok(Outcome::ExpectationUnmet)
    }
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Outcome> {
    let kind = args.model.as_deref().map(str::parse::<ModelKind>).transpose()?;
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let table = read_trajectory_csv(io::BufReader::new(file), kind)?;
    let sidecar = args.sidecar.clone().or_else(|| {
        let p = sidecar_path(&args.input);
        p.exists().then_some(p)
    });
    let meta: Option<TrajectoryMeta> = match &sidecar {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => None,
    };
    if let Some(m) = &meta {
        if m.model.kind() != table.kind {
            bail!("sidecar describes {} but the CSV holds {}", m.model.kind(), table.kind);
        }
    }
    let (duration, interval) = match &meta {
        Some(m) => (m.config.duration, Some(m.config.dt * m.config.record_every as f64)),
        None => (*table.times.last().expect("non-empty table"), None),
    };
    let series = table.activity_series(interval)?;
    let mut cfg = meta
        .as_ref()
        .and_then(|m| m.analysis)
        .unwrap_or_else(|| AnalysisConfig::default_for(table.kind, duration));
    if let Some(t) = args.transient {
        cfg.t_transient = t;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
        cfg.epsilon_fusion = d;
    }
    cfg.validate()?;
    let report = analyze_series(&series, &cfg)?;
    if let Some(path) = &args.intervals {
        write_intervals_csv(&report.intervals, create(path)?)?;
    }
    print_json(&report)?;
    Ok(Outcome::Success)
}
