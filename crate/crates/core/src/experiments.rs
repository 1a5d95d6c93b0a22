//! Parameter sweeps, regime bands and the Levelt proposition suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, AnalysisConfig, DominanceReport, Regime, RegimeLabel};
use crate::error::{Error, Result};
use crate::integrator::{simulate, SimConfig};
use crate::model::{ModelInstance, ModelKind, Stimulus};
use crate::noise::hash3;
use crate::stats::spearman;

/// Rank-correlation magnitude required for a monotone trend.
pub const RHO_THRESHOLD: f64 = 0.9;
/// Minimum rivalry rows for a monotonicity verdict.
pub const MIN_BAND_ROWS: usize = 5;
/// Largest relative spread of a duration considered unchanged.
pub const FLAT_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Both eyes receive the grid value.
    EqualStimulus,
    /// The model's cross-inhibition parameter takes the grid value; stimuli fixed by `fixed["stimulus"]`.
    CrossInhibition,
    /// Eye 1 receives the grid value, eye 2 `fixed["s2"]`.
    AsymmetricS1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelInstance,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub replicates: usize,
    /// `sim.seed` is the base seed; replicate seeds are derived from it.
    pub sim: SimConfig,
    pub analysis: AnalysisConfig,
    /// Times an `Undetermined` run is repeated with doubled duration (and transient).
    #[serde(default)]
    pub extend_undetermined: u32,
}

/// `lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Config(format!("invalid grid {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    // rounding to 12 decimals keeps grid values printable and stable
    Ok((0..=n)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

impl SweepSpec {
    pub fn new(model: ModelInstance, axis: SweepAxis, grid: Vec<f64>) -> SweepSpec {
        let kind = model.kind();
        let sim = SimConfig::default_for(kind);
        SweepSpec {
            model,
            axis,
            grid,
            fixed: BTreeMap::new(),
            replicates: if kind.is_noisy() { 5 } else { 1 },
            analysis: AnalysisConfig::default_for(kind, sim.duration),
            sim,
            extend_undetermined: 2,
        }
    }

    /// Default equal-stimulus grid for a model.
    pub fn default_equal(kind: ModelKind) -> SweepSpec {
        let g = match kind {
            ModelKind::Wilson => grid(0.0, 120.0, 0.1),
            ModelKind::LaingChow | ModelKind::LcAdaptation | ModelKind::LcDepression => grid(0.0, 1.2, 0.01),
            ModelKind::Kalarickal => grid(0.0, 4.0, 0.08),
        }
        .expect("static grid");
        let mut spec = SweepSpec::new(ModelInstance::default_for(kind), SweepAxis::EqualStimulus, g);
        if kind == ModelKind::Wilson {
            spec.set_duration(60_000.0);
        }
        spec
    }

    pub fn cross_inhibition(model: ModelInstance, grid: Vec<f64>, stimulus: f64) -> SweepSpec {
        let mut spec = SweepSpec::new(model, SweepAxis::CrossInhibition, grid);
        spec.fixed.insert("stimulus".into(), stimulus);
        spec
    }

    pub fn asymmetric(model: ModelInstance, grid: Vec<f64>, s2: f64) -> SweepSpec {
        let mut spec = SweepSpec::new(model, SweepAxis::AsymmetricS1, grid);
        spec.fixed.insert("s2".into(), s2);
        spec
    }

    /// Sets the simulated duration and rescales the transient cut to match.
    pub fn set_duration(&mut self, duration: f64) {
        let frac = self.analysis.t_transient / self.sim.duration;
        self.sim.duration = duration;
        self.analysis.t_transient = frac * duration;
    }

    fn fixed_value(&self, key: &str) -> Result<f64> {
        self.fixed
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("sweep axis {:?} needs fixed value `{key}`", self.axis)))
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.sim.validate(self.model.kind())?;
        self.analysis.validate()?;
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep grid must be strictly ascending".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        match self.axis {
            SweepAxis::EqualStimulus => {}
            SweepAxis::CrossInhibition => {
                self.fixed_value("stimulus")?;
            }
            SweepAxis::AsymmetricS1 => {
                self.fixed_value("s2")?;
            }
        }
        // every grid point must yield a valid model and stimulus
        for &v in &self.grid {
            self.point(v)?;
        }
        Ok(())
    }

    /// Model and stimulus at one grid value.
    pub fn point(&self, value: f64) -> Result<(ModelInstance, Stimulus)> {
        match self.axis {
            SweepAxis::EqualStimulus => Ok((self.model, Stimulus::equal(value)?)),
            SweepAxis::CrossInhibition => {
                let name = self.model.kind().cross_inhibition_param();
                let model = self.model.with_param(name, value)?;
                Ok((model, Stimulus::equal(self.fixed_value("stimulus")?)?))
            }
            SweepAxis::AsymmetricS1 => Ok((self.model, Stimulus::new(value, self.fixed_value("s2")?)?)),
        }
    }

    /// Seed of replicate `k` at grid index `j`.
    pub fn replicate_seed(&self, j: usize, k: usize) -> u64 {
        hash3(self.sim.seed, j as u64, k as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    /// Simulated duration actually used (after any extension).
    pub duration: f64,
    pub report: Option<DominanceReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowAggregate {
    pub regime: Regime,
    pub n_ok: usize,
    pub mean_duration_1: Option<f64>,
    pub n_duration_1: usize,
    pub mean_duration_2: Option<f64>,
    pub n_duration_2: usize,
    pub mean_duration: Option<f64>,
    pub n_duration: usize,
    pub alternation_rate: Option<f64>,
    pub predominance_1: Option<f64>,
    pub predominance_2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub replicates: Vec<ReplicateResult>,
    pub aggregate: RowAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> (Option<f64>, usize) {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    ((n > 0).then(|| sum / n as f64), n)
}

/// Majority regime over replicates; ties or no successful runs give `Undetermined`.
fn majority_regime(reports: &[&DominanceReport]) -> Regime {
    let mut counts: Vec<(Regime, usize)> = Vec::new();
    for r in reports {
        match counts.iter_mut().find(|(reg, _)| *reg == r.regime) {
            Some((_, n)) => *n += 1,
            None => counts.push((r.regime, 1)),
        }
    }
    let Some(best) = counts.iter().map(|(_, n)| *n).max() else {
        return Regime::Undetermined;
    };
    let mut winners = counts.iter().filter(|(_, n)| *n == best);
    match (winners.next(), winners.next()) {
        (Some((r, _)), None) => *r,
        _ => Regime::Undetermined,
    }
}

pub fn aggregate(replicates: &[ReplicateResult]) -> RowAggregate {
    let ok: Vec<&DominanceReport> = replicates.iter().filter_map(|r| r.report.as_ref()).collect();
    let (mean_duration_1, n_duration_1) = mean_of(ok.iter().map(|r| r.mean_duration_1));
    let (mean_duration_2, n_duration_2) = mean_of(ok.iter().map(|r| r.mean_duration_2));
    let (mean_duration, n_duration) = mean_of(ok.iter().map(|r| r.mean_duration));
    RowAggregate {
        regime: majority_regime(&ok),
        n_ok: ok.len(),
        mean_duration_1,
        n_duration_1,
        mean_duration_2,
        n_duration_2,
        mean_duration,
        n_duration,
        alternation_rate: mean_of(ok.iter().map(|r| Some(r.alternation_rate))).0,
        predominance_1: mean_of(ok.iter().map(|r| Some(r.predominance_1))).0,
        predominance_2: mean_of(ok.iter().map(|r| Some(r.predominance_2))).0,
    }
}

fn run_replicate(spec: &SweepSpec, j: usize, k: usize, value: f64) -> ReplicateResult {
    let seed = spec.replicate_seed(j, k);
    let mut sim = spec.sim;
    sim.seed = seed;
    let mut analysis = spec.analysis;
    let outcome = spec.point(value).and_then(|(model, stim)| {
        let mut attempt = 0;
        loop {
            let traj = simulate(&model, &stim, &sim)?;
            let report = analyze(&traj, &analysis)?;
            if report.regime != Regime::Undetermined || attempt >= spec.extend_undetermined {
                return Ok(report);
            }
            attempt += 1;
            sim.duration *= 2.0;
            analysis.t_transient *= 2.0;
        }
    });
    let (report, error) = match outcome {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    ReplicateResult {
        replicate: k,
        seed,
        duration: sim.duration,
        report,
        error,
    }
}

/// How sweep rows are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon workers; `None` uses the global pool.
    Parallel(Option<usize>),
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel(None)
        } else {
            Execution::Sequential
        }
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, Execution::default())
}

pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let tasks: Vec<(usize, usize, f64)> = spec
        .grid
        .iter()
        .enumerate()
        .flat_map(|(j, &v)| (0..spec.replicates).map(move |k| (j, k, v)))
        .collect();
    let results = execute(&tasks, exec, |&(j, k, v)| run_replicate(spec, j, k, v))?;
    let mut results = results.into_iter();
    let rows = spec
        .grid
        .iter()
        .map(|&param| {
            let replicates: Vec<ReplicateResult> = results.by_ref().take(spec.replicates).collect();
            SweepRow {
                param,
                aggregate: aggregate(&replicates),
                replicates,
            }
        })
        .collect();
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

#[cfg(feature = "parallel")]
fn execute<T, R, F>(tasks: &[T], exec: Execution, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Sequential => Ok(tasks.iter().map(f).collect()),
        Execution::Parallel(None) => Ok(tasks.par_iter().map(f).collect()),
        Execution::Parallel(Some(jobs)) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(|| tasks.par_iter().map(f).collect()))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<T, R, F>(tasks: &[T], _exec: Execution, f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> R,
{
    Ok(tasks.iter().map(f).collect())
}

/// Cross-inhibition sweep of a model at fixed equal stimuli.
pub fn cross_inhibition_sweep(
    model: ModelInstance,
    grid: Vec<f64>,
    stimulus: f64,
    exec: Execution,
) -> Result<SweepResult> {
    run_sweep_with(&SweepSpec::cross_inhibition(model, grid, stimulus), exec)
}

/// Maximal run of rows sharing a regime label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeBand {
    pub regime: RegimeLabel,
    pub lo: f64,
    pub hi: f64,
    pub first_row: usize,
    pub last_row: usize,
}

impl RegimeBand {
    pub fn rows(&self) -> usize {
        self.last_row - self.first_row + 1
    }
}

/// Run-length encodes the row regimes (winner identity ignored) into bands.
pub fn find_regime_bands(result: &SweepResult) -> Vec<RegimeBand> {
    let mut bands: Vec<RegimeBand> = Vec::new();
    for (i, row) in result.rows.iter().enumerate() {
        let label = row.aggregate.regime.label();
        match bands.last_mut() {
            Some(b) if b.regime == label => {
                b.hi = row.param;
                b.last_row = i;
            }
            _ => bands.push(RegimeBand {
                regime: label,
                lo: row.param,
                hi: row.param,
                first_row: i,
                last_row: i,
            }),
        }
    }
    bands
}

/// Boundary between adjacent bands, bracketed by `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdge {
    pub below: RegimeLabel,
    pub above: RegimeLabel,
    pub lo: f64,
    pub hi: f64,
}

fn row_label(spec: &SweepSpec, j: usize, value: f64) -> RegimeLabel {
    let reps: Vec<ReplicateResult> = (0..spec.replicates)
        .map(|k| run_replicate(spec, j, k, value))
        .collect();
    aggregate(&reps).regime.label()
}

/// Bisects every band boundary down to `fraction` of the local grid spacing.
pub fn refine_band_edges(result: &SweepResult, fraction: f64) -> Result<Vec<BandEdge>> {
    let bands = find_regime_bands(result);
    let spec = &result.spec;
    bands
        .windows(2)
        .map(|w| {
            let (below, above) = (w[0], w[1]);
            let j = below.last_row;
            let (mut lo, mut hi) = (result.rows[j].param, result.rows[above.first_row].param);
            let tol = fraction * (hi - lo);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                let label = row_label(spec, j, mid);
                if label == below.regime {
                    lo = mid;
                } else if label == above.regime {
                    hi = mid;
                } else {
                    break;
                }
            }
            Ok(BandEdge {
                below: below.regime,
                above: above.regime,
                lo,
                hi,
            })
        })
        .collect()
}

/// Row statistic used by monotonicity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanDuration,
    MeanDuration1,
    MeanDuration2,
    AlternationRate,
    Predominance1,
}

impl Metric {
    fn of(self, a: &RowAggregate) -> Option<f64> {
        match self {
            Metric::MeanDuration => a.mean_duration,
            Metric::MeanDuration1 => a.mean_duration_1,
            Metric::MeanDuration2 => a.mean_duration_2,
            Metric::AlternationRate => a.alternation_rate,
            Metric::Predominance1 => a.predominance_1,
        }
    }
}

/// Parameters and metric values over rows `first..=last`, which must all be rivalry rows.
pub fn rivalry_series(result: &SweepResult, first: usize, last: usize, metric: Metric) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = result
        .rows
        .get(first..=last)
        .ok_or_else(|| Error::BandSelection(format!("rows {first}..={last} out of range")))?;
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for row in rows {
        if row.aggregate.regime != Regime::Rivalry {
            return Err(Error::BandSelection(format!(
                "row at {} is {}, not Rivalry",
                row.param, row.aggregate.regime
            )));
        }
        let y = metric.of(&row.aggregate).ok_or_else(|| {
            Error::BandSelection(format!("row at {} has no {metric:?}", row.param))
        })?;
        xs.push(row.param);
        ys.push(y);
    }
    Ok((xs, ys))
}

/// Spearman correlation of the grid parameter against a metric over rivalry rows.
pub fn band_correlation(result: &SweepResult, first: usize, last: usize, metric: Metric) -> Result<Option<f64>> {
    let (x, y) = rivalry_series(result, first, last, metric)?;
    Ok(spearman(&x, &y))
}

/// Trend statistic over a band of rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandTrend {
    pub lo: f64,
    pub hi: f64,
    pub rows: usize,
    pub rho: Option<f64>,
}

fn trend(result: &SweepResult, first: usize, last: usize, metric: Metric) -> Result<BandTrend> {
    Ok(BandTrend {
        lo: result.rows[first].param,
        hi: result.rows[last].param,
        rows: last - first + 1,
        rho: band_correlation(result, first, last, metric)?,
    })
}

fn rivalry_bands(result: &SweepResult) -> Vec<RegimeBand> {
    find_regime_bands(result)
        .into_iter()
        .filter(|b| b.regime == RegimeLabel::Rivalry)
        .collect()
}

/// The widest rivalry band (highest strength on ties).
pub fn widest_rivalry_band(result: &SweepResult) -> Option<RegimeBand> {
    rivalry_bands(result)
        .into_iter()
        .max_by(|a, b| a.rows().cmp(&b.rows()).then(a.lo.total_cmp(&b.lo)))
}

/// Highest-strength rivalry band with at least `MIN_BAND_ROWS` rows.
pub fn high_rivalry_band(result: &SweepResult) -> Option<RegimeBand> {
    rivalry_bands(result)
        .into_iter()
        .filter(|b| b.rows() >= MIN_BAND_ROWS)
        .last()
}

/// Longest run of at least `MIN_BAND_ROWS` rivalry rows, below the high band and
/// separated from it, whose metric correlates with strength at `sign * rho >= RHO_THRESHOLD`.
pub fn find_branch(result: &SweepResult, metric: Metric, sign: f64) -> Result<Option<BandTrend>> {
    let Some(high) = high_rivalry_band(result) else {
        return Ok(None);
    };
    let mut best: Option<BandTrend> = None;
    for band in rivalry_bands(result).into_iter().filter(|b| b.last_row < high.first_row) {
        for first in band.first_row..=band.last_row {
            for last in (first + MIN_BAND_ROWS - 1)..=band.last_row {
                let t = trend(result, first, last, metric)?;
                let passes = t.rho.is_some_and(|r| sign * r >= RHO_THRESHOLD);
                let better = best.map_or(true, |b| t.rows > b.rows || (t.rows == b.rows && t.lo > b.lo));
                if passes && better {
                    best = Some(t);
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionVerdict {
    /// `None` when the sweep lacks enough rivalry rows to decide.
    pub holds: Option<bool>,
    /// Primary rank correlation behind the verdict.
    pub evidence: Option<f64>,
    /// Parameter range examined.
    pub band: Option<(f64, f64)>,
    pub rows: usize,
    pub note: String,
}

impl PropositionVerdict {
    fn inconclusive(note: impl Into<String>) -> Self {
        Self {
            holds: None,
            evidence: None,
            band: None,
            rows: 0,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop4Verdict {
    pub holds: Option<bool>,
    /// Correlation of strength with alternation rate in the high-strength rivalry band.
    pub evidence: Option<f64>,
    pub band: Option<(f64, f64)>,
    pub rows: usize,
    /// Whether a lower-strength band exists where alternation rate falls with strength.
    pub reversal: Option<bool>,
    pub reversal_evidence: Option<f64>,
    pub reversal_band: Option<(f64, f64)>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveltSweeps {
    pub equal: SweepResult,
    pub asymmetric: SweepResult,
    pub cross_inhibition: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveltReport {
    pub model: ModelKind,
    pub prop1: PropositionVerdict,
    pub prop2_original: PropositionVerdict,
    pub prop2_modified: PropositionVerdict,
    pub prop3_original: PropositionVerdict,
    pub prop3_modified: PropositionVerdict,
    pub prop4_original: Prop4Verdict,
    pub prop4_modified: Prop4Verdict,
    /// Mean dominance time rising with cross-inhibition.
    pub cross_inhibition: PropositionVerdict,
    /// Regime bands of the equal-stimulus sweep, ascending in strength.
    pub equal_bands: Vec<RegimeBand>,
    pub sweeps: LeveltSweeps,
}

fn at_least(rho: Option<f64>, sign: f64) -> bool {
    rho.is_some_and(|r| sign * r >= RHO_THRESHOLD)
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean
}

fn asymmetric_verdicts(asym: &SweepResult) -> Result<[PropositionVerdict; 5]> {
    let Some(band) = widest_rivalry_band(asym).filter(|b| b.rows() >= MIN_BAND_ROWS) else {
        let v = PropositionVerdict::inconclusive("asymmetric sweep has fewer than 5 contiguous rivalry rows");
        return Ok([v.clone(), v.clone(), v.clone(), v.clone(), v]);
    };
    let (first, last) = (band.first_row, band.last_row);
    let s2 = asym.spec.fixed_value("s2")?;
    let rows = band.rows();
    let range = Some((band.lo, band.hi));
    let verdict = |holds: bool, evidence: Option<f64>, note: String| PropositionVerdict {
        holds: Some(holds),
        evidence,
        band: range,
        rows,
        note,
    };

    let (_, p1) = rivalry_series(asym, first, last, Metric::Predominance1)?;
    let (s1, d1) = rivalry_series(asym, first, last, Metric::MeanDuration1)?;
    let (_, d2) = rivalry_series(asym, first, last, Metric::MeanDuration2)?;
    let (_, rate) = rivalry_series(asym, first, last, Metric::AlternationRate)?;
    let diff: Vec<f64> = s1.iter().map(|s| (s - s2).abs()).collect();

    let rho_p1 = spearman(&s1, &p1);
    let rho_d1 = spearman(&s1, &d1);
    let rho_d2 = spearman(&s1, &d2);
    let spread_d1 = relative_spread(&d1);
    let spread_d2 = relative_spread(&d2);
    let rho_rate = spearman(&diff, &rate);

    Ok([
        verdict(at_least(rho_p1, 1.0), rho_p1, "rho(s1, predominance_1) >= 0.9".into()),
        verdict(
            spread_d1 < FLAT_TOLERANCE && at_least(rho_d2, -1.0),
            rho_d2,
            format!("eye-1 duration spread {spread_d1:.3} < 0.2 and rho(s1, mean_duration_2) <= -0.9"),
        ),
        verdict(
            at_least(rho_d1, 1.0) && spread_d2 < FLAT_TOLERANCE,
            rho_d1,
            format!("rho(s1, mean_duration_1) >= 0.9 and eye-2 duration spread {spread_d2:.3} < 0.2"),
        ),
        verdict(at_least(rho_rate, 1.0), rho_rate, "rho(|s1-s2|, alternation_rate) >= 0.9".into()),
        verdict(at_least(rho_rate, -1.0), rho_rate, "rho(|s1-s2|, alternation_rate) <= -0.9".into()),
    ])
}

fn prop4_verdicts(equal: &SweepResult) -> Result<(Prop4Verdict, Prop4Verdict)> {
    let Some(high) = high_rivalry_band(equal) else {
        let v = Prop4Verdict {
            holds: None,
            evidence: None,
            band: None,
            rows: 0,
            reversal: None,
            reversal_evidence: None,
            reversal_band: None,
            note: "equal sweep has no rivalry band with at least 5 rows".into(),
        };
        return Ok((v.clone(), v));
    };
    let t = trend(equal, high.first_row, high.last_row, Metric::AlternationRate)?;
    let increase = at_least(t.rho, 1.0);
    let reversal = find_branch(equal, Metric::AlternationRate, -1.0)?;
    let base = Prop4Verdict {
        holds: None,
        evidence: t.rho,
        band: Some((t.lo, t.hi)),
        rows: t.rows,
        reversal: Some(reversal.is_some()),
        reversal_evidence: reversal.and_then(|r| r.rho),
        reversal_band: reversal.map(|r| (r.lo, r.hi)),
        note: String::new(),
    };
    let original = Prop4Verdict {
        holds: Some(increase && reversal.is_none()),
        note: "alternation rate rises with equal strength in the high band and never reverses".into(),
        ..base.clone()
    };
    let modified = Prop4Verdict {
        holds: Some(increase),
        note: "alternation rate rises with equal strength in the high band; reversal reported separately".into(),
        ..base
    };
    Ok((original, modified))
}

fn cross_verdict(cross: &SweepResult) -> Result<PropositionVerdict> {
    let Some(band) = widest_rivalry_band(cross).filter(|b| b.rows() >= MIN_BAND_ROWS) else {
        return Ok(PropositionVerdict::inconclusive(
            "cross-inhibition sweep has fewer than 5 contiguous rivalry rows",
        ));
    };
    let t = trend(cross, band.first_row, band.last_row, Metric::MeanDuration)?;
    Ok(PropositionVerdict {
        holds: Some(at_least(t.rho, 1.0)),
        evidence: t.rho,
        band: Some((t.lo, t.hi)),
        rows: t.rows,
        note: "rho(cross-inhibition, mean duration) >= 0.9".into(),
    })
}

pub fn evaluate_levelt(kind: ModelKind, sweeps: LeveltSweeps) -> Result<LeveltReport> {
    let [prop1, prop2_original, prop2_modified, prop3_original, prop3_modified] =
        asymmetric_verdicts(&sweeps.asymmetric)?;
    let (prop4_original, prop4_modified) = prop4_verdicts(&sweeps.equal)?;
    let cross_inhibition = cross_verdict(&sweeps.cross_inhibition)?;
    Ok(LeveltReport {
        model: kind,
        prop1,
        prop2_original,
        prop2_modified,
        prop3_original,
        prop3_modified,
        prop4_original,
        prop4_modified,
        cross_inhibition,
        equal_bands: find_regime_bands(&sweeps.equal),
        sweeps,
    })
}

/// Default sweep plan for the Levelt suite.
///
/// The asymmetric and cross-inhibition sweeps are centred on the middle row of
/// the equal sweep's widest rivalry band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeveltPlan {
    pub equal: SweepSpec,
    /// Points in the asymmetric sweep, `s1` from `s2` to `1.5 * s2`.
    pub asymmetric_points: usize,
    /// Cross-inhibition grid as multiples of the model's default value.
    pub cross_factors: Vec<f64>,
}

impl LeveltPlan {
    pub fn default_for(kind: ModelKind) -> LeveltPlan {
        LeveltPlan {
            equal: SweepSpec::default_equal(kind),
            asymmetric_points: 11,
            cross_factors: grid(0.8, 1.2, 0.05).expect("static grid"),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> LeveltPlan {
        self.equal.sim.seed = seed;
        self
    }
}

/// Middle grid value of the widest rivalry band with at least `MIN_BAND_ROWS` rows.
pub fn band_midpoint(result: &SweepResult) -> Option<f64> {
    widest_rivalry_band(result)
        .filter(|b| b.rows() >= MIN_BAND_ROWS)
        .map(|b| result.rows[(b.first_row + b.last_row) / 2].param)
}

/// Runs the three sweeps of a plan and evaluates the propositions.
pub fn run_levelt(plan: &LeveltPlan, exec: Execution) -> Result<LeveltReport> {
    let kind = plan.equal.model.kind();
    let equal = run_sweep_with(&plan.equal, exec)?;
    let derived = |axis_spec: SweepSpec| SweepSpec {
        sim: plan.equal.sim,
        analysis: plan.equal.analysis,
        replicates: plan.equal.replicates,
        extend_undetermined: plan.equal.extend_undetermined,
        ..axis_spec
    };
    let (asymmetric, cross_inhibition) = match band_midpoint(&equal) {
        Some(mid) => {
            let n = plan.asymmetric_points.max(2);
            let s1: Vec<f64> = (0..n)
                .map(|k| mid * (1.0 + 0.5 * k as f64 / (n - 1) as f64))
                .collect();
            let asym = derived(SweepSpec::asymmetric(plan.equal.model, s1, mid));
            let base = plan.equal.model.param(cross_param_field(kind))?;
            let cgrid: Vec<f64> = plan.cross_factors.iter().map(|f| f * base).collect();
            let cross = derived(SweepSpec::cross_inhibition(plan.equal.model, cgrid, mid));
            (run_sweep_with(&asym, exec)?, run_sweep_with(&cross, exec)?)
        }
        None => {
            // keep the report shape; verdicts come out inconclusive
            let empty = |axis: SweepAxis| SweepResult {
                spec: SweepSpec {
                    axis,
                    grid: Vec::new(),
                    ..plan.equal.clone()
                },
                rows: Vec::new(),
            };
            let mut a = empty(SweepAxis::AsymmetricS1);
            a.spec.fixed.insert("s2".into(), f64::NAN);
            (a, empty(SweepAxis::CrossInhibition))
        }
    };
    evaluate_levelt(
        kind,
        LeveltSweeps {
            equal,
            asymmetric,
            cross_inhibition,
        },
    )
}

fn cross_param_field(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Kalarickal => "w_inh_12",
        k => k.cross_inhibition_param(),
    }
}
