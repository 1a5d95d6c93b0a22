//! CSV and JSON file formats.
//!
//! Floats are written with 17 significant digits so every value read back
//! is bitwise identical to the one written.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analysis::{ActivitySeries, AnalysisConfig, DominanceInterval};
use crate::error::{Error, Result};
use crate::experiments::SweepResult;
use crate::integrator::{SimConfig, Trajectory};
use crate::model::{ModelInstance, ModelKind, StateVector, Stimulus};

/// Exact-round-trip float formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Csv {
            line,
            reason: format!("{kind:?}"),
        },
    }
}

/// Everything needed to regenerate a trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub model: ModelInstance,
    pub stim: Stimulus,
    pub config: SimConfig,
    pub labels: Vec<String>,
    pub samples: usize,
    /// Dominance analysis applied to the run, when one was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisConfig>,
}

impl TrajectoryMeta {
    pub fn of(traj: &Trajectory) -> TrajectoryMeta {
        TrajectoryMeta {
            model: traj.model,
            stim: traj.stim,
            config: traj.config,
            labels: traj.model.kind().labels().iter().map(|s| s.to_string()).collect(),
            samples: traj.len(),
            analysis: None,
        }
    }
}

/// Writes `t,<labels>` followed by one row per recorded sample.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t"];
    header.extend_from_slice(traj.model.kind().labels());
    w.write_record(&header).map_err(csv_err)?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row = std::iter::once(*t).chain(s.as_slice().iter().copied()).map(fmt_f64);
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Samples read back from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub kind: ModelKind,
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
}

impl TrajectoryTable {
    /// Activity channels; the sample interval is taken from the first two rows
    /// unless given.
    pub fn activity_series(&self, sample_interval: Option<f64>) -> Result<ActivitySeries> {
        let dt = match (sample_interval, self.times.as_slice()) {
            (Some(dt), _) => dt,
            (None, [t0, t1, ..]) => t1 - t0,
            (None, _) => {
                return Err(Error::Config(
                    "a single-sample trajectory needs its sidecar to fix the sample interval".into(),
                ))
            }
        };
        let (i, j) = self.kind.activity_indices();
        ActivitySeries::new(
            self.times.clone(),
            self.states.iter().map(|s| s[i]).collect(),
            self.states.iter().map(|s| s[j]).collect(),
            dt,
        )
    }
}

/// Model kind whose state labels match a header (after the time column).
pub fn kind_from_header(labels: &[&str]) -> Option<ModelKind> {
    ModelKind::ALL.into_iter().find(|k| k.labels() == labels)
}

/// Parses a trajectory CSV. `kind` overrides header-based model detection.
pub fn read_trajectory_csv<R: Read>(input: R, kind: Option<ModelKind>) -> Result<TrajectoryTable> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names.first() != Some(&"t") {
        return Err(Error::Csv {
            line: 1,
            reason: "first column must be `t`".into(),
        });
    }
    let kind = match kind {
        Some(k) if k.dim() == names.len() - 1 => k,
        Some(k) => {
            return Err(Error::Csv {
                line: 1,
                reason: format!("{k} needs {} state columns, header has {}", k.dim(), names.len() - 1),
            })
        }
        None => kind_from_header(&names[1..]).ok_or_else(|| Error::Csv {
            line: 1,
            reason: format!("header `{}` matches no model", names.join(",")),
        })?,
    };
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut values = Vec::with_capacity(kind.dim() + 1);
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        values.clear();
        for field in record.iter() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                line,
                reason: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line,
                    reason: format!("non-finite value `{field}`"),
                });
            }
            values.push(v);
        }
        if let Some(&prev) = times.last() {
            if !(values[0] > prev) {
                return Err(Error::Csv {
                    line,
                    reason: "times must be strictly ascending".into(),
                });
            }
        }
        times.push(values[0]);
        states.push(StateVector::from_slice(&values[1..])?);
    }
    if times.is_empty() {
        return Err(Error::Csv {
            line: 1,
            reason: "no samples".into(),
        });
    }
    Ok(TrajectoryTable { kind, times, states })
}

/// Interval list as `channel,start_ms,end_ms,complete`.
pub fn write_intervals_csv<W: Write>(intervals: &[DominanceInterval], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel", "start_ms", "end_ms", "complete"])
        .map_err(csv_err)?;
    for iv in intervals {
        w.write_record([
            iv.channel.number().to_string(),
            fmt_f64(iv.start),
            fmt_f64(iv.end),
            iv.complete.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One line per replicate. Absent statistics are empty cells; failed runs have regime `Error`.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "param", "replicate", "regime", "mean_dur_1", "mean_dur_2", "alt_rate", "predom_1", "predom_2",
    ])
    .map_err(csv_err)?;
    for row in &result.rows {
        for rep in &row.replicates {
            let cells = match &rep.report {
                Some(r) => [
                    r.regime.to_string(),
                    fmt_opt(r.mean_duration_1),
                    fmt_opt(r.mean_duration_2),
                    fmt_f64(r.alternation_rate),
                    fmt_f64(r.predominance_1),
                    fmt_f64(r.predominance_2),
                ],
                None => ["Error".into(), String::new(), String::new(), String::new(), String::new(), String::new()],
            };
            let [regime, d1, d2, rate, p1, p2] = cells;
            w.write_record([fmt_f64(row.param), rep.replicate.to_string(), regime, d1, d2, rate, p1, p2])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}
