//! Discrete-action softmax policies with exact log-probabilities and
//! analytic gradients.
//!
//! Two parameterizations share one interface: a tabular map from state key
//! to a logit vector, and a linear model over sparse binary features.
//! Unseen tabular states read as the zero logit vector, i.e. uniform over
//! the state's allowed actions. All distributions are computed with
//! max-logit subtraction.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Current checkpoint format.
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// Probability floor applied to the reference distribution inside [`kl`].
pub const KL_FLOOR: f64 = 1e-12;

/// What an action denotes when rendered into an utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    /// The action emits a query to the observer.
    Query,
    /// The action emits an answer token.
    Answer,
}

/// A single discrete action with a unique surface realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionDef {
    pub id: u32,
    pub surface: String,
    pub kind: ActionKind,
}

/// An ordered, finite action vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionSpace {
    actions: Vec<ActionDef>,
}

impl ActionSpace {
    pub fn new(actions: Vec<ActionDef>) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::InvalidConfig(
                "action space must contain at least two actions".into(),
            ));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.id as usize != i {
                return Err(Error::InvalidConfig(format!(
                    "action ids must be 0..k-1, found id {} at index {}",
                    a.id, i
                )));
            }
        }
        let mut surfaces: Vec<&str> = actions.iter().map(|a| a.surface.as_str()).collect();
        surfaces.sort_unstable();
        surfaces.dedup();
        if surfaces.len() != actions.len() {
            return Err(Error::InvalidConfig("action surfaces must be unique".into()));
        }
        Ok(Self { actions })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&ActionDef> {
        self.actions.get(id as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActionDef> {
        self.actions.iter()
    }

    /// Looks an action up by its exact surface string.
    pub fn by_surface(&self, surface: &str) -> Option<&ActionDef> {
        self.actions.iter().find(|a| a.surface == surface)
    }
}

/// Sparse binary feature vector; `ones` lists the active dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseFeatures {
    pub dim: u32,
    pub ones: Vec<u32>,
}

impl SparseFeatures {
    pub fn new(dim: u32, mut ones: Vec<u32>) -> Self {
        ones.sort_unstable();
        ones.dedup();
        debug_assert!(ones.iter().all(|&i| i < dim));
        Self { dim, ones }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim as usize];
        for &i in &self.ones {
            v[i as usize] = 1.0;
        }
        v
    }
}

/// A fully featurized decision point.
///
/// `key` addresses tabular parameters, `features` feed linear parameters,
/// and `allowed` restricts the distribution to the listed action ids
/// (the softmax is taken over the allowed subset only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    pub key: String,
    pub features: SparseFeatures,
    pub allowed: Vec<u32>,
}

impl PolicyState {
    pub fn new(key: String, features: SparseFeatures, mut allowed: Vec<u32>) -> Self {
        allowed.sort_unstable();
        allowed.dedup();
        Self {
            key,
            features,
            allowed,
        }
    }
}

/// Policy parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    /// `table[key]` is the logit vector (length k) for that state key.
    Tabular { table: BTreeMap<String, Vec<f64>> },
    /// Row-major `k x dim` weight matrix; logits = W . features.
    Linear { dim: u32, weights: Vec<f64> },
}

/// A softmax policy over a fixed action space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SoftmaxPolicy {
    pub space: ActionSpace,
    pub params: Params,
    pub temperature: f64,
}

impl SoftmaxPolicy {
    /// Tabular policy; every state starts at the zero logit vector.
    pub fn tabular(space: ActionSpace) -> Self {
        Self {
            space,
            params: Params::Tabular {
                table: BTreeMap::new(),
            },
            temperature: 1.0,
        }
    }

    /// Linear policy with all-zero weights.
    pub fn linear_zeros(space: ActionSpace, dim: u32) -> Self {
        let k = space.len();
        Self {
            space,
            params: Params::Linear {
                dim,
                weights: vec![0.0; k * dim as usize],
            },
            temperature: 1.0,
        }
    }

    /// Linear policy with weights drawn i.i.d. from `N(0, scale^2)`.
    pub fn linear_random(space: ActionSpace, dim: u32, scale: f64, rng: &mut dyn RngCore) -> Self {
        let k = space.len();
        let mut weights = Vec::with_capacity(k * dim as usize);
        for _ in 0..k * dim as usize {
            weights.push(scale * gaussian(rng));
        }
        Self {
            space,
            params: Params::Linear { dim, weights },
            temperature: 1.0,
        }
    }

    pub fn action_count(&self) -> usize {
        self.space.len()
    }

    /// Raw logits for a state, over the full action space.
    pub fn logits(&self, state: &PolicyState) -> Vec<f64> {
        let k = self.space.len();
        match &self.params {
            Params::Tabular { table } => table
                .get(&state.key)
                .cloned()
                .unwrap_or_else(|| vec![0.0; k]),
            Params::Linear { dim, weights } => {
                let d = *dim as usize;
                let mut out = vec![0.0; k];
                for (a, slot) in out.iter_mut().enumerate() {
                    let row = &weights[a * d..(a + 1) * d];
                    let mut acc = 0.0;
                    for &i in &state.features.ones {
                        acc += row[i as usize];
                    }
                    *slot = acc;
                }
                out
            }
        }
    }

    /// Probability vector of length k.
    ///
    /// Disallowed actions get probability zero; the allowed entries are a
    /// softmax over their logits and sum to one within 1e-9.
    pub fn action_distribution(&self, state: &PolicyState) -> Vec<f64> {
        let logits = self.logits(state);
        masked_softmax(&logits, &state.allowed, self.temperature)
    }

    /// Samples an action and returns it with its log-probability.
    pub fn sample_action(&self, state: &PolicyState, rng: &mut dyn RngCore) -> (u32, f64) {
        let probs = self.action_distribution(state);
        let u = uniform01(rng);
        let mut acc = 0.0;
        let mut chosen = *state.allowed.last().expect("allowed set is non-empty");
        for &a in &state.allowed {
            acc += probs[a as usize];
            if u < acc {
                chosen = a;
                break;
            }
        }
        (chosen, probs[chosen as usize].ln())
    }

    pub fn log_prob(&self, state: &PolicyState, action: u32) -> f64 {
        self.action_distribution(state)[action as usize].ln()
    }

    /// Analytic gradient of `log p(action | state)` with respect to the
    /// parameters touched by the state, accumulated into `buf` scaled by
    /// `scale`.
    ///
    /// For tabular parameters the per-state gradient is `onehot(action) -
    /// probs`; for linear parameters it is that vector outer-multiplied by
    /// the feature vector. Disallowed actions receive zero gradient.
    pub fn accumulate_log_prob_grad(
        &self,
        state: &PolicyState,
        action: u32,
        scale: f64,
        buf: &mut GradBuffer,
    ) {
        let probs = self.action_distribution(state);
        let k = self.space.len();
        let mut delta = vec![0.0; k];
        for &a in &state.allowed {
            delta[a as usize] = -probs[a as usize];
        }
        delta[action as usize] += 1.0;
        // The temperature divides the logits, so it scales the gradient.
        let scale = scale / self.temperature;
        buf.accumulate(state, &delta, scale);
    }

    /// Accumulates the gradient of `KL(pi(.|state) || q)` into `buf`,
    /// scaled by `scale`. `q` must be a full-length distribution aligned
    /// with the action space (typically a snapshot's distribution at the
    /// same state).
    pub fn accumulate_kl_grad(
        &self,
        state: &PolicyState,
        q: &[f64],
        scale: f64,
        buf: &mut GradBuffer,
    ) {
        let probs = self.action_distribution(state);
        let mut kl = 0.0;
        for &a in &state.allowed {
            let p = probs[a as usize];
            if p > 0.0 {
                kl += p * (p.ln() - q[a as usize].max(KL_FLOOR).ln());
            }
        }
        let k = self.space.len();
        let mut delta = vec![0.0; k];
        for &a in &state.allowed {
            let p = probs[a as usize];
            if p > 0.0 {
                let ratio = p.ln() - q[a as usize].max(KL_FLOOR).ln();
                delta[a as usize] = p * (ratio - kl);
            }
        }
        buf.accumulate(state, &delta, scale / self.temperature);
    }

    /// Applies an accumulated gradient: `params += lr * buf`.
    pub fn apply_grad(&mut self, buf: &GradBuffer, lr: f64) -> Result<()> {
        match (&mut self.params, &buf.inner) {
            (Params::Tabular { table }, GradInner::Tabular(grads)) => {
                let k = self.space.len();
                for (key, g) in grads {
                    let row = table.entry(key.clone()).or_insert_with(|| vec![0.0; k]);
                    for (w, d) in row.iter_mut().zip(g) {
                        *w += lr * d;
                        if !w.is_finite() {
                            return Err(Error::Divergence(format!(
                                "non-finite tabular logit at key {key:?}"
                            )));
                        }
                    }
                }
            }
            (Params::Linear { weights, .. }, GradInner::Linear(g)) => {
                for (w, d) in weights.iter_mut().zip(g) {
                    *w += lr * d;
                    if !w.is_finite() {
                        return Err(Error::Divergence("non-finite linear weight".into()));
                    }
                }
            }
            _ => {
                return Err(Error::InvalidConfig(
                    "gradient buffer does not match policy parameterization".into(),
                ))
            }
        }
        Ok(())
    }

    /// Fresh zeroed gradient buffer shaped like this policy.
    pub fn grad_buffer(&self) -> GradBuffer {
        match &self.params {
            Params::Tabular { .. } => GradBuffer {
                inner: GradInner::Tabular(BTreeMap::new()),
            },
            Params::Linear { dim, .. } => GradBuffer {
                inner: GradInner::Linear(vec![0.0; self.space.len() * *dim as usize]),
            },
        }
    }

    /// Frozen deep copy of the current parameters plus a content digest.
    pub fn snapshot(&self) -> PolicySnapshot {
        PolicySnapshot {
            digest: self.digest(),
            policy: self.clone(),
        }
    }

    /// Hex digest of the canonicalized parameters.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.params).expect("params serialize");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        hex::encode(hasher.finalize())
    }

    /// Serializes the policy to the JSON checkpoint format.
    pub fn to_checkpoint_json(&self) -> serde_json::Value {
        serde_json::json!({
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "action_space": self.space,
            "parameterization": match self.params {
                Params::Tabular { .. } => "tabular",
                Params::Linear { .. } => "linear",
            },
            "parameters": self.params,
            "temperature": self.temperature,
            "digest": self.digest(),
        })
    }

    pub fn save_checkpoint(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_checkpoint_json())?;
        crate::dataset::atomic_write(path, json.as_bytes())
    }

    pub fn from_checkpoint_json(value: &serde_json::Value) -> Result<Self> {
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Validation("checkpoint missing format_version".into()))?;
        if version != CHECKPOINT_FORMAT_VERSION as u64 {
            return Err(Error::Validation(format!(
                "unsupported checkpoint format_version {version}"
            )));
        }
        let space: ActionSpace = serde_json::from_value(
            value
                .get("action_space")
                .cloned()
                .ok_or_else(|| Error::Validation("checkpoint missing action_space".into()))?,
        )?;
        let params: Params = serde_json::from_value(
            value
                .get("parameters")
                .cloned()
                .ok_or_else(|| Error::Validation("checkpoint missing parameters".into()))?,
        )?;
        let temperature = value
            .get("temperature")
            .and_then(|v| v.as_f64())
            .unwrap_or(1.0);
        let policy = Self {
            space,
            params,
            temperature,
        };
        if let Some(stored) = value.get("digest").and_then(|v| v.as_str()) {
            let actual = policy.digest();
            if stored != actual {
                return Err(Error::Validation(format!(
                    "checkpoint digest mismatch: stored {stored}, computed {actual}"
                )));
            }
        }
        Ok(policy)
    }

    pub fn load_checkpoint(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        Self::from_checkpoint_json(&value)
    }
}

/// Immutable copy of a policy's parameters at a point in time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySnapshot {
    digest: String,
    policy: SoftmaxPolicy,
}

impl PolicySnapshot {
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Reconstructs a live policy identical to the snapshotted one.
    pub fn restore(&self) -> SoftmaxPolicy {
        self.policy.clone()
    }

    /// Distribution of the frozen policy at a state.
    pub fn action_distribution(&self, state: &PolicyState) -> Vec<f64> {
        self.policy.action_distribution(state)
    }

    pub fn log_prob(&self, state: &PolicyState, action: u32) -> f64 {
        self.policy.log_prob(state, action)
    }
}

/// Accumulated parameter-space gradient, shaped like one policy.
#[derive(Debug, Clone)]
pub struct GradBuffer {
    inner: GradInner,
}

#[derive(Debug, Clone)]
enum GradInner {
    Tabular(BTreeMap<String, Vec<f64>>),
    Linear(Vec<f64>),
}

impl GradBuffer {
    fn accumulate(&mut self, state: &PolicyState, delta: &[f64], scale: f64) {
        match &mut self.inner {
            GradInner::Tabular(map) => {
                let row = map
                    .entry(state.key.clone())
                    .or_insert_with(|| vec![0.0; delta.len()]);
                for (r, d) in row.iter_mut().zip(delta) {
                    *r += scale * d;
                }
            }
            GradInner::Linear(buf) => {
                let d = state.features.dim as usize;
                for (a, dv) in delta.iter().enumerate() {
                    if *dv == 0.0 {
                        continue;
                    }
                    let row = &mut buf[a * d..(a + 1) * d];
                    for &i in &state.features.ones {
                        row[i as usize] += scale * dv;
                    }
                }
            }
        }
    }

    /// Scales the whole buffer in place (e.g. to average over a batch).
    pub fn scale(&mut self, factor: f64) {
        match &mut self.inner {
            GradInner::Tabular(map) => {
                for row in map.values_mut() {
                    for v in row.iter_mut() {
                        *v *= factor;
                    }
                }
            }
            GradInner::Linear(buf) => {
                for v in buf.iter_mut() {
                    *v *= factor;
                }
            }
        }
    }

    /// Flattens to (state-key, dense gradient) pairs for inspection/tests.
    pub fn tabular_rows(&self) -> Option<&BTreeMap<String, Vec<f64>>> {
        match &self.inner {
            GradInner::Tabular(map) => Some(map),
            GradInner::Linear(_) => None,
        }
    }

    pub fn linear_flat(&self) -> Option<&[f64]> {
        match &self.inner {
            GradInner::Linear(buf) => Some(buf),
            GradInner::Tabular(_) => None,
        }
    }
}

/// Softmax over the allowed subset with max-logit subtraction.
fn masked_softmax(logits: &[f64], allowed: &[u32], temperature: f64) -> Vec<f64> {
    debug_assert!(!allowed.is_empty(), "state must allow at least one action");
    let mut out = vec![0.0; logits.len()];
    let max = allowed
        .iter()
        .map(|&a| logits[a as usize])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for &a in allowed {
        let e = ((logits[a as usize] - max) / temperature).exp();
        out[a as usize] = e;
        z += e;
    }
    for &a in allowed {
        out[a as usize] /= z;
    }
    out
}

/// `KL(p || q) = sum_j p_j ln(p_j / q_j)` with `0 ln(0/x) = 0` and `q`
/// clamped below at [`KL_FLOOR`].
pub fn kl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            acc += pi * (pi.ln() - qi.max(KL_FLOOR).ln());
        }
    }
    Ok(acc.max(0.0))
}

/// Uniform draw in [0, 1) from 53 random bits.
fn uniform01(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller.
fn gaussian(rng: &mut dyn RngCore) -> f64 {
    let u1 = uniform01(rng).max(1e-300);
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Builds a test/demo action space with `k` generic answer actions.
pub fn generic_space(k: usize) -> ActionSpace {
    ActionSpace::new(
        (0..k)
            .map(|i| ActionDef {
                id: i as u32,
                surface: format!("action-{i}"),
                kind: ActionKind::Answer,
            })
            .collect(),
    )
    .expect("generic space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn full_state(k: usize) -> PolicyState {
        PolicyState::new(
            "s0".into(),
            SparseFeatures::new(4, vec![0, 2]),
            (0..k as u32).collect(),
        )
    }

    #[test]
    fn uniform_distribution_on_equal_logits() {
        let policy = SoftmaxPolicy::tabular(generic_space(4));
        let probs = policy.action_distribution(&full_state(4));
        for p in &probs {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_invariance() {
        let space = generic_space(3);
        let mut policy = SoftmaxPolicy::tabular(space.clone());
        let state = full_state(3);
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![0.3, -1.2, 2.0]);
        }
        let base = policy.action_distribution(&state);
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![0.3 + 7.5, -1.2 + 7.5, 2.0 + 7.5]);
        }
        let shifted = policy.action_distribution(&state);
        for (a, b) in base.iter().zip(&shifted) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_logit_reference_value() {
        // e / (e + 1) for logits (1, 0).
        let mut policy = SoftmaxPolicy::tabular(generic_space(2));
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![1.0, 0.0]);
        }
        let probs = policy.action_distribution(&full_state(2));
        assert!((probs[0] - 0.7311).abs() < 1e-4);
        assert!((probs[1] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn masked_distribution_renormalizes() {
        let policy = SoftmaxPolicy::tabular(generic_space(4));
        let state = PolicyState::new("s0".into(), SparseFeatures::new(1, vec![]), vec![1, 3]);
        let probs = policy.action_distribution(&state);
        assert_eq!(probs[0], 0.0);
        assert_eq!(probs[2], 0.0);
        assert!((probs[1] - 0.5).abs() < 1e-12);
        assert!((probs[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_policy_sampling() {
        let mut policy = SoftmaxPolicy::tabular(generic_space(3));
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![1e6, 0.0, 0.0]);
        }
        let state = full_state(3);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (a, lp) = policy.sample_action(&state, &mut rng);
        assert_eq!(a, 0);
        assert!(lp.abs() < 1e-9);
    }

    #[test]
    fn sampling_matches_distribution_frequencies() {
        let policy = SoftmaxPolicy::tabular(generic_space(4));
        let state = full_state(4);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            let (a, _) = policy.sample_action(&state, &mut rng);
            counts[a as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.25).abs() < 0.005, "frequency {f}");
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let policy = SoftmaxPolicy::tabular(generic_space(4));
        let state = full_state(4);
        let a = policy.sample_action(&state, &mut ChaCha12Rng::seed_from_u64(99));
        let b = policy.sample_action(&state, &mut ChaCha12Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn kl_identity_and_reference_value() {
        let p = vec![0.5, 0.5];
        assert_eq!(kl(&p, &p).unwrap(), 0.0);
        // Direct summation: 0.5 ln 2 + 0.5 ln(2/3).
        let q = vec![0.25, 0.75];
        assert!((kl(&p, &q).unwrap() - 0.1438).abs() < 1e-4);
    }

    #[test]
    fn kl_dimension_mismatch() {
        assert!(matches!(
            kl(&[0.5, 0.5], &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tabular_gradient_uniform_two_actions() {
        let policy = SoftmaxPolicy::tabular(generic_space(2));
        let state = full_state(2);
        let mut buf = policy.grad_buffer();
        policy.accumulate_log_prob_grad(&state, 0, 1.0, &mut buf);
        let rows = buf.tabular_rows().unwrap();
        let g = &rows["s0"];
        assert!((g[0] - 0.5).abs() < 1e-12);
        assert!((g[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn saturated_gradient_is_zero() {
        let mut policy = SoftmaxPolicy::tabular(generic_space(2));
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![1e6, 0.0]);
        }
        let state = full_state(2);
        let mut buf = policy.grad_buffer();
        policy.accumulate_log_prob_grad(&state, 0, 1.0, &mut buf);
        let g = &buf.tabular_rows().unwrap()["s0"];
        assert!(g[0].abs() < 1e-9 && g[1].abs() < 1e-9);
    }

    #[test]
    fn snapshot_is_immutable_under_mutation() {
        let mut policy = SoftmaxPolicy::tabular(generic_space(2));
        let state = full_state(2);
        let snap = policy.snapshot();
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("s0".into(), vec![3.0, -3.0]);
        }
        let frozen = snap.action_distribution(&state);
        assert!((frozen[0] - 0.5).abs() < 1e-12);
        assert_ne!(policy.digest(), snap.digest());
    }

    #[test]
    fn checkpoint_round_trip_preserves_digest() {
        let mut policy = SoftmaxPolicy::tabular(generic_space(3));
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("a".into(), vec![0.1, -0.2, 0.3333333333333333]);
            table.insert("b".into(), vec![1.5e-13, 2.0, -7.25]);
        }
        let json = policy.to_checkpoint_json();
        let restored = SoftmaxPolicy::from_checkpoint_json(&json).unwrap();
        assert_eq!(policy.digest(), restored.digest());
    }

    #[test]
    fn fresh_tabular_checkpoint_has_zero_rows_for_touched_states() {
        let mut policy = SoftmaxPolicy::tabular(generic_space(2));
        if let Params::Tabular { table } = &mut policy.params {
            table.insert("seen".into(), vec![0.0, 0.0]);
        }
        let json = policy.to_checkpoint_json();
        let row = &json["parameters"]["table"]["seen"];
        assert_eq!(row[0], 0.0);
        assert_eq!(row[1], 0.0);
    }

    #[test]
    fn linear_logits_follow_features() {
        let space = generic_space(2);
        let mut policy = SoftmaxPolicy::linear_zeros(space, 3);
        if let Params::Linear { weights, .. } = &mut policy.params {
            // row 0: [1, 0, 2]; row 1: [0, 1, 0]
            weights.copy_from_slice(&[1.0, 0.0, 2.0, 0.0, 1.0, 0.0]);
        }
        let state = PolicyState::new(
            "x".into(),
            SparseFeatures::new(3, vec![0, 2]),
            vec![0, 1],
        );
        let logits = policy.logits(&state);
        assert_eq!(logits, vec![3.0, 0.0]);
    }
}
