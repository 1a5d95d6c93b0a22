//! Fixed-step time integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelInstance, ModelKind, NoisePair, StateVector, Stimulus};
use crate::noise::NoiseStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk4,
    Euler,
}

/// Named initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Resting state: activities and adaptation at 0, depression / pathway efficacy at 1.
    SymmetricZero,
    /// Resting state plus 0.05 on population 1's activity.
    Perturbed,
}

pub const PERTURBATION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Preset(Preset),
    Explicit(StateVector),
}

impl InitialState {
    pub fn resolve(&self, kind: ModelKind) -> Result<StateVector> {
        match self {
            InitialState::Explicit(s) => {
                if s.len() != kind.dim() {
                    return Err(Error::Dimension {
                        expected: kind.dim(),
                        actual: s.len(),
                    });
                }
                if !s.is_finite() {
                    return Err(Error::Config("initial state must be finite".into()));
                }
                Ok(*s)
            }
            InitialState::Preset(p) => {
                let mut s = StateVector::zeros(kind.dim());
                // variables that rest at 1
                let unit: &[usize] = match kind {
                    ModelKind::LaingChow => &[2, 5],
                    ModelKind::LcDepression | ModelKind::Kalarickal => &[1, 3],
                    _ => &[],
                };
                for &i in unit {
                    s[i] = 1.0;
                }
                if *p == Preset::Perturbed {
                    s[kind.activity_indices().0] += PERTURBATION;
                }
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Step size (ms; dimensionless time for Kalarickal).
    pub dt: f64,
    pub duration: f64,
    pub record_every: usize,
    pub seed: u64,
    pub initial_state: InitialState,
    pub scheme: Scheme,
}

impl SimConfig {
    /// Per-model defaults: at least 20 steps per fastest time constant.
    pub fn default_for(kind: ModelKind) -> SimConfig {
        let (dt, duration, record_every, scheme) = match kind {
            ModelKind::Wilson => (0.5, 10_000.0, 2, Scheme::Rk4),
            ModelKind::LaingChow | ModelKind::LcAdaptation | ModelKind::LcDepression => {
                (0.05, 10_000.0, 2, Scheme::Rk4)
            }
            // the shunting inhibition rate W·y·x reaches ~80, so explicit Euler needs dt well below 0.025
            ModelKind::Kalarickal => (0.01, 5_000.0, 10, Scheme::Euler),
        };
        SimConfig {
            dt,
            duration,
            record_every,
            seed: 0,
            initial_state: InitialState::Preset(Preset::Perturbed),
            scheme,
        }
    }

    pub fn steps(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(Error::Config(format!(
                "duration {} must be at least dt {}",
                self.duration, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        self.initial_state.resolve(kind).map(|_| ())
    }
}

/// Uniformly sampled simulation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub model: ModelInstance,
    pub stim: Stimulus,
    pub config: SimConfig,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Spacing of the recorded samples.
    pub fn sample_interval(&self) -> f64 {
        self.config.dt * self.config.record_every as f64
    }

    /// The two activity channels as separate series.
    pub fn activities(&self) -> (Vec<f64>, Vec<f64>) {
        let (i, j) = self.model.kind().activity_indices();
        self.states.iter().map(|s| (s[i], s[j])).unzip()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory is never empty")
    }
}

/// One classical Runge–Kutta step; the noise pair is held across all stages.
pub fn step_rk4(
    model: &ModelInstance,
    state: &StateVector,
    stim: &Stimulus,
    dt: f64,
    noise: NoisePair,
) -> StateVector {
    let k1 = model.rhs_unchecked(state, stim, noise);
    let k2 = model.rhs_unchecked(&state.axpy(0.5 * dt, &k1), stim, noise);
    let k3 = model.rhs_unchecked(&state.axpy(0.5 * dt, &k2), stim, noise);
    let k4 = model.rhs_unchecked(&state.axpy(dt, &k3), stim, noise);
    let mut out = *state;
    let w = dt / 6.0;
    for i in 0..state.len() {
        out[i] = state[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

pub fn step_euler(
    model: &ModelInstance,
    state: &StateVector,
    stim: &Stimulus,
    dt: f64,
    noise: NoisePair,
) -> StateVector {
    state.axpy(dt, &model.rhs_unchecked(state, stim, noise))
}

/// Applies one step of `scheme`, rejecting non-finite results.
pub fn step(
    scheme: Scheme,
    model: &ModelInstance,
    state: &StateVector,
    stim: &Stimulus,
    dt: f64,
    noise: NoisePair,
    time: f64,
) -> Result<StateVector> {
    if state.len() != model.dim() {
        return Err(Error::Dimension {
            expected: model.dim(),
            actual: state.len(),
        });
    }
    let next = match scheme {
        Scheme::Rk4 => step_rk4(model, state, stim, dt, noise),
        Scheme::Euler => step_euler(model, state, stim, dt, noise),
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NumericalBlowup { time: time + dt })
    }
}

/// The noise stream a configuration implies for a model (silent unless Kalarickal).
pub fn noise_stream_for(model: &ModelInstance, config: &SimConfig) -> NoiseStream {
    match model {
        ModelInstance::Kalarickal(p) => NoiseStream::new(config.seed, p.p, p.m),
        _ => NoiseStream::new(config.seed, 0.0, 0.0),
    }
}

pub fn simulate(model: &ModelInstance, stim: &Stimulus, config: &SimConfig) -> Result<Trajectory> {
    simulate_with_noise(model, stim, config, &noise_stream_for(model, config))
}

/// Runs a simulation with an explicit noise stream.
pub fn simulate_with_noise(
    model: &ModelInstance,
    stim: &Stimulus,
    config: &SimConfig,
    noise: &NoiseStream,
) -> Result<Trajectory> {
    model.validate()?;
    stim.validate()?;
    config.validate(model.kind())?;
    let mut state = config.initial_state.resolve(model.kind())?;
    let steps = config.steps();
    let stride = config.record_every as u64;
    let capacity = (steps / stride + 1) as usize;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    times.push(0.0);
    states.push(state);
    let silent = noise.m == 0.0;
    for n in 0..steps {
        let pair = if silent { NoisePair::ZERO } else { noise.pair(n) };
        let t = n as f64 * config.dt;
        state = step(config.scheme, model, &state, stim, config.dt, pair, t)?;
        if (n + 1) % stride == 0 {
            times.push((n + 1) as f64 * config.dt);
            states.push(state);
        }
    }
    Ok(Trajectory {
        times,
        states,
        model: *model,
        stim: *stim,
        config: *config,
    })
}
