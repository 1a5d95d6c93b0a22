//! Competition models for binocular rivalry.
//!
//! Five two-population models are provided, each with its parameter record,
//! gain function and right-hand side. Every right-hand side is a pure function
//! of `(state, params, stimulus, noise)`; stochastic input is supplied by the
//! caller, one value per inhibitory pathway.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest state dimension over all models.
pub const MAX_DIM: usize = 6;

/// Naka-Rushton gain used by the Wilson model.
///
/// `100 x₊² / ((10 + h)² + x₊²)`; zero for non-positive input, strictly below 100.
#[inline]
pub fn naka_rushton(x: f64, adaptation: f64) -> f64 {
    let xp = x.max(0.0);
    let num = xp * xp;
    let semi = 10.0 + adaptation;
    100.0 * num / (semi * semi + num)
}

/// Heaviside step with `f(0) = 1`.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Logistic gain `1 / (1 + exp(-(x - theta) / k))`.
#[inline]
pub fn sigmoid(x: f64, k: f64, theta: f64) -> f64 {
    1.0 / (1.0 + (-(x - theta) / k).exp())
}

/// Fixed-capacity state vector; the length depends on the model.
#[derive(Clone, Copy, PartialEq)]
pub struct StateVector {
    data: [f64; MAX_DIM],
    len: usize,
}

impl StateVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_DIM, "state dimension {len} exceeds {MAX_DIM}");
        Self {
            data: [0.0; MAX_DIM],
            len,
        }
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() > MAX_DIM {
            return Err(Error::Dimension {
                expected: MAX_DIM,
                actual: values.len(),
            });
        }
        let mut s = Self::zeros(values.len());
        s.data[..values.len()].copy_from_slice(values);
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data[..self.len]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    /// `self + scale * other`, component-wise.
    #[inline]
    pub fn axpy(&self, scale: f64, other: &StateVector) -> StateVector {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for i in 0..self.len {
            out.data[i] = self.data[i] + scale * other.data[i];
        }
        out
    }

    /// Exchanges the population-1 and population-2 halves.
    pub fn block_swapped(&self) -> StateVector {
        let half = self.len / 2;
        let mut out = *self;
        for i in 0..half {
            out.data[i] = self.data[half + i];
            out.data[half + i] = self.data[i];
        }
        out
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl std::ops::IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        StateVector::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// Constant input strengths to the two eyes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stimulus {
    pub s1: f64,
    pub s2: f64,
}

impl Stimulus {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        let s = Self { s1, s2 };
        s.validate()?;
        Ok(s)
    }

    pub fn equal(s: f64) -> Result<Self> {
        Self::new(s, s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("s1", self.s1), ("s2", self.s2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    value: v,
                    reason: "stimulus must be finite and non-negative",
                });
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Stimulus {
        Stimulus {
            s1: self.s2,
            s2: self.s1,
        }
    }
}

/// Per-step noise values added to the two adaptation pathways `(b21, b12)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoisePair {
    pub b21: f64,
    pub b12: f64,
}

impl NoisePair {
    pub const ZERO: NoisePair = NoisePair { b21: 0.0, b12: 0.0 };

    pub fn swapped(&self) -> NoisePair {
        NoisePair {
            b21: self.b12,
            b12: self.b21,
        }
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

/// Wilson model: separate excitatory, adaptation and inhibitory populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WilsonParams {
    pub g: f64,
    pub h: f64,
    pub tau_e: f64,
    pub tau_h: f64,
    pub tau_i: f64,
}

impl Default for WilsonParams {
    fn default() -> Self {
        Self {
            g: 0.45,
            h: 0.47,
            tau_e: 20.0,
            tau_h: 900.0,
            tau_i: 11.0,
        }
    }
}

impl WilsonParams {
    pub fn validate(&self) -> Result<()> {
        positive("g", self.g)?;
        positive("h", self.h)?;
        positive("tau_e", self.tau_e)?;
        positive("tau_h", self.tau_h)?;
        positive("tau_i", self.tau_i)
    }
}

/// Laing–Chow model with recurrent excitation, adaptation and synaptic depression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaingChowParams {
    pub alpha: f64,
    pub beta: f64,
    pub phi_a: f64,
    pub phi_d: f64,
    pub tau_a: f64,
    pub tau_d: f64,
    pub tau_u: f64,
}

impl Default for LaingChowParams {
    fn default() -> Self {
        Self {
            alpha: 0.35,
            beta: 0.7,
            phi_a: 0.6,
            phi_d: 0.6,
            tau_a: 20.0,
            tau_d: 40.0,
            tau_u: 1.0,
        }
    }
}

impl LaingChowParams {
    pub fn validate(&self) -> Result<()> {
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("phi_a", self.phi_a)?;
        positive("phi_d", self.phi_d)?;
        positive("tau_a", self.tau_a)?;
        positive("tau_d", self.tau_d)?;
        positive("tau_u", self.tau_u)
    }
}

/// Adaptation-only reduction of the Laing–Chow model with sigmoid gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcAdaptationParams {
    pub beta: f64,
    pub g: f64,
    pub tau_a: f64,
    pub tau_u: f64,
    pub k: f64,
    pub theta: f64,
}

impl Default for LcAdaptationParams {
    fn default() -> Self {
        Self {
            beta: 0.9,
            g: 0.5,
            tau_a: 100.0,
            tau_u: 1.0,
            k: 0.1,
            theta: 0.2,
        }
    }
}

impl LcAdaptationParams {
    pub fn validate(&self) -> Result<()> {
        positive("beta", self.beta)?;
        positive("g", self.g)?;
        positive("tau_a", self.tau_a)?;
        positive("tau_u", self.tau_u)?;
        positive("k", self.k)?;
        positive("theta", self.theta)
    }
}

/// Depression-only reduction of the Laing–Chow model with sigmoid gain.
///
/// `gamma` and `tau_d` have no published values; the defaults are chosen here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcDepressionParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau_d: f64,
    pub tau_u: f64,
    pub k: f64,
    pub theta: f64,
}

impl Default for LcDepressionParams {
    fn default() -> Self {
        Self {
            beta: 0.9,
            gamma: 0.5,
            tau_d: 100.0,
            tau_u: 1.0,
            k: 0.1,
            theta: 0.2,
        }
    }
}

impl LcDepressionParams {
    pub fn validate(&self) -> Result<()> {
        positive("beta", self.beta)?;
        positive("gamma", self.gamma)?;
        positive("tau_d", self.tau_d)?;
        positive("tau_u", self.tau_u)?;
        positive("k", self.k)?;
        positive("theta", self.theta)
    }
}

/// Kalarickal–Marshall model with adapting inhibitory pathways and dichotomous noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KalarickalParams {
    pub w_exc_1: f64,
    pub w_exc_2: f64,
    pub w_inh_12: f64,
    pub w_inh_21: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Probability that a pathway's noise takes the value `+m`.
    pub p: f64,
    /// Noise magnitude.
    pub m: f64,
}

impl Default for KalarickalParams {
    fn default() -> Self {
        Self {
            w_exc_1: 0.25,
            w_exc_2: 0.25,
            w_inh_12: 250.0,
            w_inh_21: 250.0,
            c1: 0.01,
            c2: 0.008,
            c3: 0.083,
            p: 0.5,
            m: 0.0025,
        }
    }
}

impl KalarickalParams {
    pub fn validate(&self) -> Result<()> {
        positive("w_exc_1", self.w_exc_1)?;
        positive("w_exc_2", self.w_exc_2)?;
        positive("w_inh_12", self.w_inh_12)?;
        positive("w_inh_21", self.w_inh_21)?;
        positive("c1", self.c1)?;
        positive("c2", self.c2)?;
        positive("c3", self.c3)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter {
                name: "p".into(),
                value: self.p,
                reason: "must lie in [0, 1]",
            });
        }
        if !self.m.is_finite() || self.m < 0.0 {
            return Err(Error::InvalidParameter {
                name: "m".into(),
                value: self.m,
                reason: "must be finite and non-negative",
            });
        }
        Ok(())
    }
}

/// Model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Wilson,
    LaingChow,
    LcAdaptation,
    LcDepression,
    Kalarickal,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Wilson,
        ModelKind::LaingChow,
        ModelKind::LcAdaptation,
        ModelKind::LcDepression,
        ModelKind::Kalarickal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Wilson => "wilson",
            ModelKind::LaingChow => "laing-chow",
            ModelKind::LcAdaptation => "lc-adaptation",
            ModelKind::LcDepression => "lc-depression",
            ModelKind::Kalarickal => "kalarickal",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ModelKind::Wilson | ModelKind::LaingChow => 6,
            _ => 4,
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            ModelKind::Wilson => &["E1", "H1", "I1", "E2", "H2", "I2"],
            ModelKind::LaingChow => &["u1", "a1", "g1", "u2", "a2", "g2"],
            ModelKind::LcAdaptation => &["u1", "a1", "u2", "a2"],
            ModelKind::LcDepression => &["u1", "g1", "u2", "g2"],
            ModelKind::Kalarickal => &["x1", "y21", "x2", "y12"],
        }
    }

    /// Indices of the two activity variables (firing rate / activation level).
    pub fn activity_indices(self) -> (usize, usize) {
        let half = self.dim() / 2;
        (0, half)
    }

    /// Characteristic activity scale: 100 for Wilson, 1 otherwise.
    pub fn activity_scale(self) -> f64 {
        match self {
            ModelKind::Wilson => 100.0,
            _ => 1.0,
        }
    }

    /// Name of the cross-inhibition parameter, if the model exposes one for sweeps.
    pub fn cross_inhibition_param(self) -> &'static str {
        match self {
            ModelKind::Wilson => "g",
            ModelKind::Kalarickal => "w_inh",
            _ => "beta",
        }
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, ModelKind::Kalarickal)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// A model kind together with its parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ModelInstance {
    Wilson(WilsonParams),
    LaingChow(LaingChowParams),
    LcAdaptation(LcAdaptationParams),
    LcDepression(LcDepressionParams),
    Kalarickal(KalarickalParams),
}

impl ModelInstance {
    /// Published parameter set for `kind` (implementer-chosen for the depression variant).
    pub fn default_for(kind: ModelKind) -> ModelInstance {
        match kind {
            ModelKind::Wilson => ModelInstance::Wilson(WilsonParams::default()),
            ModelKind::LaingChow => ModelInstance::LaingChow(LaingChowParams::default()),
            ModelKind::LcAdaptation => ModelInstance::LcAdaptation(LcAdaptationParams::default()),
            ModelKind::LcDepression => ModelInstance::LcDepression(LcDepressionParams::default()),
            ModelKind::Kalarickal => ModelInstance::Kalarickal(KalarickalParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelInstance::Wilson(_) => ModelKind::Wilson,
            ModelInstance::LaingChow(_) => ModelKind::LaingChow,
            ModelInstance::LcAdaptation(_) => ModelKind::LcAdaptation,
            ModelInstance::LcDepression(_) => ModelKind::LcDepression,
            ModelInstance::Kalarickal(_) => ModelKind::Kalarickal,
        }
    }

    pub fn dim(&self) -> usize {
        self.kind().dim()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelInstance::Wilson(p) => p.validate(),
            ModelInstance::LaingChow(p) => p.validate(),
            ModelInstance::LcAdaptation(p) => p.validate(),
            ModelInstance::LcDepression(p) => p.validate(),
            ModelInstance::Kalarickal(p) => p.validate(),
        }
    }

    /// Parameters whose current values are implementer defaults with no published source.
    pub fn implementer_defaults(&self) -> Vec<&'static str> {
        match self {
            ModelInstance::LcDepression(p) => {
                let d = LcDepressionParams::default();
                let mut out = Vec::new();
                if p.gamma == d.gamma {
                    out.push("gamma");
                }
                if p.tau_d == d.tau_d {
                    out.push("tau_d");
                }
                out
            }
            ModelInstance::LaingChow(p) if p.tau_u == LaingChowParams::default().tau_u => {
                vec!["tau_u"]
            }
            _ => Vec::new(),
        }
    }

    /// Reads a named parameter.
    pub fn param(&self, name: &str) -> Result<f64> {
        let v = serde_json::to_value(self).expect("parameter records serialize");
        v["params"]
            .get(name)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| Error::UnknownParameter {
                model: self.kind(),
                name: name.to_string(),
            })
    }

    /// Returns a copy with a named parameter replaced and re-validated.
    ///
    /// For Kalarickal, `w_exc` and `w_inh` set both pathway weights at once.
    pub fn with_param(&self, name: &str, value: f64) -> Result<ModelInstance> {
        let mut v = serde_json::to_value(self).expect("parameter records serialize");
        let params = v["params"].as_object_mut().expect("params object");
        let targets: Vec<String> = match (self.kind(), name) {
            (ModelKind::Kalarickal, "w_exc") => vec!["w_exc_1".into(), "w_exc_2".into()],
            (ModelKind::Kalarickal, "w_inh") => vec!["w_inh_12".into(), "w_inh_21".into()],
            _ => vec![name.to_string()],
        };
        for t in &targets {
            if !params.contains_key(t) {
                return Err(Error::UnknownParameter {
                    model: self.kind(),
                    name: name.to_string(),
                });
            }
            params.insert(t.clone(), serde_json::json!(value));
        }
        let out: ModelInstance = serde_json::from_value(v).map_err(|_| {
            Error::InvalidParameter {
                name: name.to_string(),
                value,
                reason: "not representable",
            }
        })?;
        out.validate()?;
        Ok(out)
    }

    /// Time derivative of `state`.
    pub fn rhs(&self, state: &StateVector, stim: &Stimulus, noise: NoisePair) -> Result<StateVector> {
        if state.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: state.len(),
            });
        }
        Ok(self.rhs_unchecked(state, stim, noise))
    }

    #[inline]
    pub(crate) fn rhs_unchecked(
        &self,
        state: &StateVector,
        stim: &Stimulus,
        noise: NoisePair,
    ) -> StateVector {
        match self {
            ModelInstance::Wilson(p) => rhs_wilson(p, state, stim),
            ModelInstance::LaingChow(p) => rhs_laing_chow(p, state, stim),
            ModelInstance::LcAdaptation(p) => rhs_lc_adaptation(p, state, stim),
            ModelInstance::LcDepression(p) => rhs_lc_depression(p, state, stim),
            ModelInstance::Kalarickal(p) => rhs_kalarickal(p, state, stim, noise),
        }
    }
}

// Each population's derivatives come from one helper called with (own, other)
// arguments, so swapping populations swaps outputs bit-for-bit.

#[inline]
fn wilson_population(p: &WilsonParams, e: f64, h: f64, i: f64, other_i: f64, v: f64) -> [f64; 3] {
    [
        (-e + naka_rushton(v - p.g * other_i, h)) / p.tau_e,
        (-h + p.h * e) / p.tau_h,
        (-i + e) / p.tau_i,
    ]
}

fn rhs_wilson(p: &WilsonParams, s: &StateVector, stim: &Stimulus) -> StateVector {
    let x = s.as_slice();
    let a = wilson_population(p, x[0], x[1], x[2], x[5], stim.s1);
    let b = wilson_population(p, x[3], x[4], x[5], x[2], stim.s2);
    let mut out = StateVector::zeros(6);
    out.as_mut_slice().copy_from_slice(&[a[0], a[1], a[2], b[0], b[1], b[2]]);
    out
}

#[inline]
fn laing_chow_population(
    p: &LaingChowParams,
    u: f64,
    a: f64,
    g: f64,
    other_u: f64,
    other_g: f64,
    input: f64,
) -> [f64; 3] {
    let f = heaviside(p.alpha * u * g - p.beta * other_u * other_g - a + input);
    [
        (-u + f) / p.tau_u,
        (-a + p.phi_a * f) / p.tau_a,
        (1.0 - g - g * p.phi_d * f) / p.tau_d,
    ]
}

fn rhs_laing_chow(p: &LaingChowParams, s: &StateVector, stim: &Stimulus) -> StateVector {
    let x = s.as_slice();
    let a = laing_chow_population(p, x[0], x[1], x[2], x[3], x[5], stim.s1);
    let b = laing_chow_population(p, x[3], x[4], x[5], x[0], x[2], stim.s2);
    let mut out = StateVector::zeros(6);
    out.as_mut_slice().copy_from_slice(&[a[0], a[1], a[2], b[0], b[1], b[2]]);
    out
}

#[inline]
fn lc_adaptation_population(p: &LcAdaptationParams, u: f64, a: f64, other_u: f64, input: f64) -> [f64; 2] {
    let f = sigmoid(-p.beta * other_u - p.g * a + input, p.k, p.theta);
    [(-u + f) / p.tau_u, (-a + u) / p.tau_a]
}

fn rhs_lc_adaptation(p: &LcAdaptationParams, s: &StateVector, stim: &Stimulus) -> StateVector {
    let x = s.as_slice();
    let a = lc_adaptation_population(p, x[0], x[1], x[2], stim.s1);
    let b = lc_adaptation_population(p, x[2], x[3], x[0], stim.s2);
    let mut out = StateVector::zeros(4);
    out.as_mut_slice().copy_from_slice(&[a[0], a[1], b[0], b[1]]);
    out
}

#[inline]
fn lc_depression_population(
    p: &LcDepressionParams,
    u: f64,
    g: f64,
    other_u: f64,
    other_g: f64,
    input: f64,
) -> [f64; 2] {
    let f = sigmoid(-p.beta * other_u * other_g + input, p.k, p.theta);
    [(-u + f) / p.tau_u, (1.0 - g - p.gamma * u * g) / p.tau_d]
}

fn rhs_lc_depression(p: &LcDepressionParams, s: &StateVector, stim: &Stimulus) -> StateVector {
    let x = s.as_slice();
    let a = lc_depression_population(p, x[0], x[1], x[2], x[3], stim.s1);
    let b = lc_depression_population(p, x[2], x[3], x[0], x[1], stim.s2);
    let mut out = StateVector::zeros(4);
    out.as_mut_slice().copy_from_slice(&[a[0], a[1], b[0], b[1]]);
    out
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn kalarickal_population(
    p: &KalarickalParams,
    x: f64,
    y_in: f64,
    other_x: f64,
    w_exc: f64,
    w_inh_in: f64,
    input: f64,
    noise: f64,
) -> [f64; 2] {
    let other_rate = other_x.max(0.0);
    [
        -x + (1.0 - x) * w_exc * input - (p.c1 + x) * w_inh_in * y_in * other_rate,
        p.c2 * ((1.0 - y_in) - p.c3 * other_rate * w_inh_in * y_in) + noise,
    ]
}

fn rhs_kalarickal(p: &KalarickalParams, s: &StateVector, stim: &Stimulus, noise: NoisePair) -> StateVector {
    let v = s.as_slice();
    // y21 gates inhibition from population 2 onto 1, y12 the reverse.
    let a = kalarickal_population(p, v[0], v[1], v[2], p.w_exc_1, p.w_inh_21, stim.s1, noise.b21);
    let b = kalarickal_population(p, v[2], v[3], v[0], p.w_exc_2, p.w_inh_12, stim.s2, noise.b12);
    let mut out = StateVector::zeros(4);
    out.as_mut_slice().copy_from_slice(&[a[0], a[1], b[0], b[1]]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn naka_rushton_examples() {
        assert_eq!(naka_rushton(0.0, 0.0), 0.0);
        assert_eq!(naka_rushton(10.0, 0.0), 50.0);
        assert_eq!(naka_rushton(-5.0, 3.0), 0.0);
        assert_eq!(naka_rushton(20.0, 10.0), 50.0);
    }

    #[test]
    fn heaviside_examples() {
        assert_eq!(heaviside(0.0), 1.0);
        assert_eq!(heaviside(-0.001), 0.0);
        assert_eq!(heaviside(5.0), 1.0);
    }

    #[test]
    fn sigmoid_examples() {
        assert_relative_eq!(sigmoid(0.2, 0.1, 0.2), 0.5);
        assert_relative_eq!(sigmoid(0.2 - 0.1 * 3f64.ln(), 0.1, 0.2), 0.25, epsilon = 1e-15);
        assert_eq!(sigmoid(1e6, 0.1, 0.2), 1.0);
    }

    #[test]
    fn defaults_match_published_values() {
        let ModelInstance::Wilson(w) = ModelInstance::default_for(ModelKind::Wilson) else {
            unreachable!()
        };
        assert_eq!((w.g, w.h, w.tau_e, w.tau_h, w.tau_i), (0.45, 0.47, 20.0, 900.0, 11.0));
        let ModelInstance::Kalarickal(k) = ModelInstance::default_for(ModelKind::Kalarickal) else {
            unreachable!()
        };
        assert_eq!((k.c2, k.c3, k.w_inh_12, k.w_inh_21, k.p, k.m), (0.008, 0.083, 250.0, 250.0, 0.5, 0.0025));
        assert_eq!((k.w_exc_1, k.w_exc_2, k.c1), (0.25, 0.25, 0.01));
        let ModelInstance::LaingChow(l) = ModelInstance::default_for(ModelKind::LaingChow) else {
            unreachable!()
        };
        assert_eq!((l.alpha, l.beta, l.phi_a, l.phi_d, l.tau_a, l.tau_d), (0.35, 0.7, 0.6, 0.6, 20.0, 40.0));
        let ModelInstance::LcAdaptation(a) = ModelInstance::default_for(ModelKind::LcAdaptation) else {
            unreachable!()
        };
        assert_eq!((a.beta, a.g, a.tau_a, a.k, a.theta), (0.9, 0.5, 100.0, 0.1, 0.2));
        let dep = ModelInstance::default_for(ModelKind::LcDepression);
        assert_eq!(dep.implementer_defaults(), vec!["gamma", "tau_d"]);
        assert!(ModelInstance::default_for(ModelKind::Wilson).implementer_defaults().is_empty());
    }

    #[test]
    fn wilson_plug_in() {
        let m = ModelInstance::default_for(ModelKind::Wilson);
        let zero = StateVector::zeros(6);
        let d = m.rhs(&zero, &Stimulus::new(0.0, 0.0).unwrap(), NoisePair::ZERO).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
        let d = m.rhs(&zero, &Stimulus::new(10.0, 0.0).unwrap(), NoisePair::ZERO).unwrap();
        assert_eq!(d.as_slice(), &[2.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn laing_chow_plug_in() {
        let m = ModelInstance::default_for(ModelKind::LaingChow);
        let s = StateVector::from_slice(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        // negative inputs are built directly; Stimulus rejects them
        let stim = Stimulus { s1: -1.0, s2: -1.0 };
        let d = m.rhs(&s, &stim, NoisePair::ZERO).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));

        let s = StateVector::from_slice(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let d = m.rhs(&s, &Stimulus::equal(0.5).unwrap(), NoisePair::ZERO).unwrap();
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn lc_adaptation_plug_in() {
        let m = ModelInstance::default_for(ModelKind::LcAdaptation);
        let d = m
            .rhs(&StateVector::zeros(4), &Stimulus::equal(0.0).unwrap(), NoisePair::ZERO)
            .unwrap();
        let expected = 1.0 / (1.0 + 2f64.exp());
        assert_relative_eq!(d[0], expected, max_relative = 1e-15);
        assert_relative_eq!(d[2], expected, max_relative = 1e-15);
        assert_eq!(d[1], 0.0);
        assert_eq!(d[3], 0.0);
    }

    #[test]
    fn lc_depression_near_rest() {
        let m = ModelInstance::default_for(ModelKind::LcDepression);
        let s = StateVector::from_slice(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        let stim = Stimulus { s1: -10.0, s2: -10.0 };
        let d = m.rhs(&s, &stim, NoisePair::ZERO).unwrap();
        let expected = 1.0 / (1.0 + (102.0f64).exp());
        assert_relative_eq!(d[0], expected, max_relative = 1e-12);
        assert!(d[0].abs() < 1e-40);
        assert_eq!(d[1], 0.0);
        assert_eq!(d[3], 0.0);
    }

    #[test]
    fn kalarickal_plug_in() {
        let mut p = KalarickalParams::default();
        p.m = 0.0;
        let m = ModelInstance::Kalarickal(p);
        let s = StateVector::from_slice(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        let d = m.rhs(&s, &Stimulus::equal(0.0).unwrap(), NoisePair::ZERO).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));

        let s = StateVector::from_slice(&[0.5, 1.0, 0.0, 1.0]).unwrap();
        let d = m.rhs(&s, &Stimulus::equal(0.0).unwrap(), NoisePair::ZERO).unwrap();
        assert_relative_eq!(d[0], -0.5);
        assert_relative_eq!(d[2], -1.25);
        assert_relative_eq!(d[3], -0.083, max_relative = 1e-12);
        assert_eq!(d[1], 0.0);

        let noisy = m
            .rhs(&s, &Stimulus::equal(0.0).unwrap(), NoisePair { b21: 0.5, b12: -0.25 })
            .unwrap();
        assert_eq!(noisy[0], d[0]);
        assert_eq!(noisy[2], d[2]);
        assert_eq!(noisy[1], d[1] + 0.5);
        assert_eq!(noisy[3], d[3] - 0.25);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = ModelInstance::default_for(ModelKind::Wilson);
        let err = m
            .rhs(&StateVector::zeros(4), &Stimulus::equal(1.0).unwrap(), NoisePair::ZERO)
            .unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 6, actual: 4 }));
    }

    #[test]
    fn invalid_params_rejected() {
        let m = ModelInstance::default_for(ModelKind::Wilson);
        assert!(m.with_param("g", -0.1).is_err());
        assert!(m.with_param("tau_e", 0.0).is_err());
        assert!(m.with_param("nope", 1.0).is_err());
        let k = ModelInstance::default_for(ModelKind::Kalarickal);
        assert!(k.with_param("p", 1.5).is_err());
        assert!(k.with_param("m", 0.0).is_ok());
        assert!(Stimulus::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn with_param_round_trips() {
        let m = ModelInstance::default_for(ModelKind::LaingChow).with_param("beta", 0.9).unwrap();
        assert_eq!(m.param("beta").unwrap(), 0.9);
        let k = ModelInstance::default_for(ModelKind::Kalarickal).with_param("w_inh", 200.0).unwrap();
        assert_eq!(k.param("w_inh_12").unwrap(), 200.0);
        assert_eq!(k.param("w_inh_21").unwrap(), 200.0);
    }

    #[test]
    fn json_schema_uses_field_names() {
        let m = ModelInstance::default_for(ModelKind::Wilson);
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["kind"], "wilson");
        assert_eq!(v["params"]["tau_h"], 900.0);
        let back: ModelInstance = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let partial = serde_json::json!({"kind": "wilson", "params": {"g": 1.0}});
        let m: ModelInstance = serde_json::from_value(partial).unwrap();
        assert_eq!(m.param("g").unwrap(), 1.0);
        assert_eq!(m.param("tau_e").unwrap(), 20.0);
        let bad = serde_json::json!({"kind": "wilson", "params": {"gg": 1.0}});
        assert!(serde_json::from_value::<ModelInstance>(bad).is_err());
    }

    #[test]
    fn model_kind_parsing() {
        assert_eq!("laing_chow".parse::<ModelKind>().unwrap(), ModelKind::LaingChow);
        assert_eq!("Kalarickal".parse::<ModelKind>().unwrap(), ModelKind::Kalarickal);
        assert!("lotka".parse::<ModelKind>().is_err());
    }
}
