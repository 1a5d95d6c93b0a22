//! Dominance detection, duration statistics and regime classification.
//!
//! Dominance uses a margin with hysteresis: channel `i` is dominant while
//! `activity_i - activity_j > delta`, and an interval only ends when the
//! opposite channel crosses its own threshold. Dips into the sub-threshold
//! gap therefore never split an interval. Each sample owns the time span
//! `[t_k, t_k + Δ)`, where `Δ` is the sample spacing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Channel {
    One,
    Two,
}

impl Channel {
    pub fn other(self) -> Channel {
        match self {
            Channel::One => Channel::Two,
            Channel::Two => Channel::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Channel::One => 1,
            Channel::Two => 2,
        }
    }
}

impl From<Channel> for u8 {
    fn from(c: Channel) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for Channel {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Channel::One),
            2 => Ok(Channel::Two),
            _ => Err(format!("channel must be 1 or 2, got {v}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceInterval {
    pub channel: Channel,
    pub start: f64,
    pub end: f64,
    /// False for the first and last intervals, which may be censored by the window.
    pub complete: bool,
}

impl DominanceInterval {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Rivalry,
    WinnerTakeAll(Channel),
    Fusion,
    EqualActivity,
    Undetermined,
}

impl Regime {
    /// Label with the winner dropped, used when grouping rows into bands.
    pub fn label(self) -> RegimeLabel {
        match self {
            Regime::Rivalry => RegimeLabel::Rivalry,
            Regime::WinnerTakeAll(_) => RegimeLabel::WinnerTakeAll,
            Regime::Fusion => RegimeLabel::Fusion,
            Regime::EqualActivity => RegimeLabel::EqualActivity,
            Regime::Undetermined => RegimeLabel::Undetermined,
        }
    }

    pub fn swapped(self) -> Regime {
        match self {
            Regime::WinnerTakeAll(c) => Regime::WinnerTakeAll(c.other()),
            r => r,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::WinnerTakeAll(c) => write!(f, "WinnerTakeAll({})", c.number()),
            other => write!(f, "{}", other.label()),
        }
    }
}

impl FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "Rivalry" => Regime::Rivalry,
            "Fusion" => Regime::Fusion,
            "EqualActivity" => Regime::EqualActivity,
            "Undetermined" => Regime::Undetermined,
            "WinnerTakeAll(1)" => Regime::WinnerTakeAll(Channel::One),
            "WinnerTakeAll(2)" => Regime::WinnerTakeAll(Channel::Two),
            _ => return Err(format!("unknown regime `{s}`")),
        })
    }
}

impl Serialize for Regime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Regime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeLabel {
    Rivalry,
    WinnerTakeAll,
    Fusion,
    EqualActivity,
    Undetermined,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeLabel::Rivalry => "Rivalry",
            RegimeLabel::WinnerTakeAll => "WinnerTakeAll",
            RegimeLabel::Fusion => "Fusion",
            RegimeLabel::EqualActivity => "EqualActivity",
            RegimeLabel::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Prefix of the run discarded before analysis.
    pub t_transient: f64,
    pub delta: f64,
    pub epsilon_fusion: f64,
    pub min_switches_rivalry: usize,
    /// Common activity level separating equal high activity from low fused activity.
    pub activity_midpoint: f64,
}

/// Fraction of the activity scale used as dominance margin.
pub const DELTA_FRACTION: f64 = 0.05;
/// Fraction of the activity scale separating `EqualActivity` from `Fusion`.
pub const MIDPOINT_FRACTION: f64 = 0.25;

impl AnalysisConfig {
    pub fn default_for(kind: ModelKind, duration: f64) -> AnalysisConfig {
        let scale = kind.activity_scale();
        AnalysisConfig {
            t_transient: 0.2 * duration,
            delta: DELTA_FRACTION * scale,
            epsilon_fusion: DELTA_FRACTION * scale,
            min_switches_rivalry: 3,
            activity_midpoint: MIDPOINT_FRACTION * scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_transient", self.t_transient),
            ("delta", self.delta),
            ("epsilon_fusion", self.epsilon_fusion),
            ("activity_midpoint", self.activity_midpoint),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Two activity channels on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySeries {
    pub times: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    /// Sample spacing; each sample covers `[t, t + sample_interval)`.
    pub sample_interval: f64,
}

impl ActivitySeries {
    pub fn new(times: Vec<f64>, a1: Vec<f64>, a2: Vec<f64>, sample_interval: f64) -> Result<Self> {
        if times.len() != a1.len() || times.len() != a2.len() {
            return Err(Error::Config("activity series lengths differ".into()));
        }
        if times.is_empty() {
            return Err(Error::Config("activity series is empty".into()));
        }
        if !(sample_interval > 0.0) {
            return Err(Error::Config("sample interval must be positive".into()));
        }
        Ok(Self {
            times,
            a1,
            a2,
            sample_interval,
        })
    }

    pub fn from_trajectory(traj: &Trajectory) -> ActivitySeries {
        let (a1, a2) = traj.activities();
        ActivitySeries {
            times: traj.times.clone(),
            a1,
            a2,
            sample_interval: traj.sample_interval(),
        }
    }

    /// Channel relabelling.
    pub fn swapped(&self) -> ActivitySeries {
        ActivitySeries {
            times: self.times.clone(),
            a1: self.a2.clone(),
            a2: self.a1.clone(),
            sample_interval: self.sample_interval,
        }
    }

    /// First sample index inside the analysis window.
    fn window_start(&self, t_transient: f64) -> Result<usize> {
        let tol = 1e-9 * self.sample_interval;
        let k = self.times.partition_point(|&t| t < t_transient - tol);
        if k >= self.times.len() {
            return Err(Error::Config(format!(
                "trajectory ends at {} before the transient cut at {}",
                self.times.last().copied().unwrap_or(0.0),
                t_transient
            )));
        }
        Ok(k)
    }

    /// Analysis window `(t0, t1)` after the transient.
    pub fn window(&self, t_transient: f64) -> Result<(f64, f64)> {
        let k = self.window_start(t_transient)?;
        Ok((self.times[k], self.times[self.times.len() - 1] + self.sample_interval))
    }
}

pub fn detect_dominance(traj: &Trajectory, cfg: &AnalysisConfig) -> Result<Vec<DominanceInterval>> {
    detect_dominance_series(&ActivitySeries::from_trajectory(traj), cfg)
}

pub fn detect_dominance_series(
    series: &ActivitySeries,
    cfg: &AnalysisConfig,
) -> Result<Vec<DominanceInterval>> {
    cfg.validate()?;
    let start = series.window_start(cfg.t_transient)?;
    let dt = series.sample_interval;
    let mut out = Vec::new();
    // (channel, first sample, last sample above threshold)
    let mut current: Option<(Channel, usize, usize)> = None;
    for k in start..series.times.len() {
        let margin = series.a1[k] - series.a2[k];
        let above = if margin > cfg.delta {
            Some(Channel::One)
        } else if -margin > cfg.delta {
            Some(Channel::Two)
        } else {
            None
        };
        let Some(ch) = above else { continue };
        current = match current {
            None => Some((ch, k, k)),
            Some((c, s, _)) if c == ch => Some((c, s, k)),
            Some((c, s, l)) => {
                out.push(DominanceInterval {
                    channel: c,
                    start: series.times[s],
                    end: series.times[l] + dt,
                    complete: true,
                });
                Some((ch, k, k))
            }
        };
    }
    if let Some((c, s, l)) = current {
        out.push(DominanceInterval {
            channel: c,
            start: series.times[s],
            end: series.times[l] + dt,
            complete: true,
        });
    }
    if let Some(first) = out.first_mut() {
        first.complete = false;
    }
    if let Some(last) = out.last_mut() {
        last.complete = false;
    }
    Ok(out)
}

/// Dominance measurements over one analysis window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub intervals: Vec<DominanceInterval>,
    pub window: (f64, f64),
    /// Mean over complete intervals of channel 1; absent when there are none.
    pub mean_duration_1: Option<f64>,
    pub mean_duration_2: Option<f64>,
    /// Mean over all complete intervals regardless of channel.
    pub mean_duration: Option<f64>,
    pub switches: usize,
    /// Channel switches per second (per 1000 time units).
    pub alternation_rate: f64,
    pub predominance_1: f64,
    pub predominance_2: f64,
    pub undecided_fraction: f64,
    pub regime: Regime,
}

impl DominanceReport {
    /// The same measurements with channel labels exchanged.
    pub fn swapped(&self) -> DominanceReport {
        DominanceReport {
            intervals: self
                .intervals
                .iter()
                .map(|iv| DominanceInterval {
                    channel: iv.channel.other(),
                    ..*iv
                })
                .collect(),
            mean_duration_1: self.mean_duration_2,
            mean_duration_2: self.mean_duration_1,
            predominance_1: self.predominance_2,
            predominance_2: self.predominance_1,
            regime: self.regime.swapped(),
            ..self.clone()
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Duration statistics for intervals over `window`; the regime is left `Undetermined`.
pub fn dominance_stats(intervals: &[DominanceInterval], window: (f64, f64)) -> DominanceReport {
    let (t0, t1) = window;
    let length = t1 - t0;
    let complete = |c: Channel| {
        intervals
            .iter()
            .filter(move |iv| iv.complete && iv.channel == c)
            .map(DominanceInterval::duration)
    };
    let total = |c: Channel| -> f64 {
        intervals
            .iter()
            .filter(|iv| iv.channel == c)
            .map(DominanceInterval::duration)
            .sum()
    };
    let switches = intervals
        .windows(2)
        .filter(|w| w[0].channel != w[1].channel)
        .count();
    let predominance_1 = total(Channel::One) / length;
    let predominance_2 = total(Channel::Two) / length;
    DominanceReport {
        intervals: intervals.to_vec(),
        window,
        mean_duration_1: mean(complete(Channel::One)),
        mean_duration_2: mean(complete(Channel::Two)),
        mean_duration: mean(
            intervals
                .iter()
                .filter(|iv| iv.complete)
                .map(DominanceInterval::duration),
        ),
        switches,
        alternation_rate: switches as f64 / (length / 1000.0),
        predominance_1,
        predominance_2,
        undecided_fraction: 1.0 - (predominance_1 + predominance_2),
        regime: Regime::Undetermined,
    }
}

fn classify_from(series: &ActivitySeries, cfg: &AnalysisConfig, intervals: &[DominanceInterval]) -> Result<Regime> {
    let start = series.window_start(cfg.t_transient)?;
    let window = start..series.times.len();
    let max_margin = window
        .clone()
        .map(|k| (series.a1[k] - series.a2[k]).abs())
        .fold(0.0, f64::max);
    if max_margin < cfg.epsilon_fusion {
        let lowest = window.clone().map(|k| series.a1[k].min(series.a2[k])).fold(f64::INFINITY, f64::min);
        let highest = window.map(|k| series.a1[k].max(series.a2[k])).fold(f64::NEG_INFINITY, f64::max);
        if lowest > cfg.activity_midpoint {
            return Ok(Regime::EqualActivity);
        }
        if highest < cfg.activity_midpoint {
            return Ok(Regime::Fusion);
        }
    }
    let switches = intervals.windows(2).filter(|w| w[0].channel != w[1].channel).count();
    if intervals.len() == 1 {
        return Ok(Regime::WinnerTakeAll(intervals[0].channel));
    }
    if switches >= cfg.min_switches_rivalry {
        return Ok(Regime::Rivalry);
    }
    Ok(Regime::Undetermined)
}

pub fn classify_regime(traj: &Trajectory, cfg: &AnalysisConfig) -> Result<Regime> {
    let series = ActivitySeries::from_trajectory(traj);
    let intervals = detect_dominance_series(&series, cfg)?;
    classify_from(&series, cfg, &intervals)
}

/// Full report: intervals, statistics and regime.
pub fn analyze_series(series: &ActivitySeries, cfg: &AnalysisConfig) -> Result<DominanceReport> {
    let intervals = detect_dominance_series(series, cfg)?;
    let window = series.window(cfg.t_transient)?;
    let mut report = dominance_stats(&intervals, window);
    report.regime = classify_from(series, cfg, &intervals)?;
    Ok(report)
}

pub fn analyze(traj: &Trajectory, cfg: &AnalysisConfig) -> Result<DominanceReport> {
    analyze_series(&ActivitySeries::from_trajectory(traj), cfg)
}
