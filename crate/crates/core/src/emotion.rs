//! Scene-level free-energy metrics and their video-level aggregation.
//!
//! Per scene, filtering yields a predictive prior and a post-observation
//! posterior over hidden states. Four quantities are derived:
//!
//! - `kld`: KL(prior || posterior), the information gained during perception;
//! - `bs`: KL(posterior || prior), Bayesian surprise from the belief update;
//! - `un`: the posterior-expected negative observation log-likelihood,
//!   recognition uncertainty;
//! - `shannon`: the negative log-evidence increment of the scene.
//!
//! Under exact inference `bs + un = shannon` per scene; that identity is the
//! load-bearing consistency check between the two free-energy decompositions.
//!
//! Repeated viewing adds filtered responsibilities to the concentrations
//! after each pass, so emission means sharpen and the metrics decay; the
//! decay rate between the first and last viewing quantifies habituation.

use crate::corpus::EncodedSequence;
use crate::inference::{forward_filter, log_likelihood_row, FilterResult, InferenceError, ModalityMode, ScoreParams};
use crate::model::{mean_params, ModelParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmotionError {
    #[error("distributions have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("support violation: q is zero where p is positive at index {0}")]
    SupportViolation(usize),
    #[error("replay learning rate must be >= 0, got {0}")]
    NegativeLearningRate(f64),
    #[error("viewings must be >= 1")]
    NoViewings,
    #[error("filter result does not match the sequence: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// KL divergence between categorical distributions, in nats, with the
/// convention 0 ln 0 = 0.
pub fn kl_categorical(p: &[f64], q: &[f64]) -> Result<f64, EmotionError> {
    if p.len() != q.len() {
        return Err(EmotionError::LengthMismatch(p.len(), q.len()));
    }
    let mut kl = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(EmotionError::SupportViolation(i));
        }
        kl += pi * (pi / qi).ln();
    }
    // Rounding can leave a tiny negative residue on near-identical inputs.
    Ok(if kl < 0.0 && kl > -1e-12 { 0.0 } else { kl })
}

/// Free-energy metrics of one scene, all in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneFeMetrics {
    pub kld: f64,
    pub bs: f64,
    pub un: f64,
    pub shannon: f64,
}

/// Per-scene metrics from a filtering result produced by the same
/// `(seq, params, mode)` triple.
pub fn scene_metrics(
    filter: &FilterResult,
    params: &ScoreParams,
    seq: &EncodedSequence,
    mode: ModalityMode,
) -> Result<Vec<SceneFeMetrics>, EmotionError> {
    if filter.scenes() != seq.len() {
        return Err(EmotionError::Mismatch(format!(
            "filter has {} scenes, sequence has {}",
            filter.scenes(),
            seq.len()
        )));
    }
    let mut out = Vec::with_capacity(seq.len());
    for t in 0..seq.len() {
        let prior = filter.priors.row(t);
        let posterior = filter.posteriors.row(t);
        let kld = kl_categorical(prior, posterior)?;
        let bs = kl_categorical(posterior, prior)?;
        let loglik = log_likelihood_row(params, seq, t, mode);
        let mut un = 0.0;
        for (q, ll) in posterior.iter().zip(&loglik) {
            if *q > 0.0 {
                un -= q * ll;
            }
        }
        out.push(SceneFeMetrics {
            kld,
            bs,
            un,
            shannon: -filter.log_evidence_inc[t],
        });
    }
    Ok(out)
}

/// Single-sequence Dirichlet increment after one viewing: each scene adds its
/// filtered posterior (scaled by the replay rate) to the emission columns it
/// observed, consecutive-posterior outer products feed the transition rows of
/// the scene's segment, and the first posterior feeds the initial belief.
/// The transition statistic is a causal responsibility proxy, not a smoothed
/// pairwise marginal.
pub fn replay_update(
    theta: &ModelParams,
    filter: &FilterResult,
    seq: &EncodedSequence,
    replay_lr: f64,
) -> Result<ModelParams, EmotionError> {
    if replay_lr < 0.0 {
        return Err(EmotionError::NegativeLearningRate(replay_lr));
    }
    if filter.scenes() != seq.len() {
        return Err(EmotionError::Mismatch(format!(
            "filter has {} scenes, sequence has {}",
            filter.scenes(),
            seq.len()
        )));
    }
    let mut out = theta.clone();
    let k = theta.meta.k;
    for t in 0..seq.len() {
        let posterior = filter.posteriors.row(t);
        let o1 = seq.obs_visual[t];
        let o2 = seq.obs_audio[t];
        for s in 0..k {
            out.alpha_a1[(s, o1)] += replay_lr * posterior[s];
            out.alpha_a2[(s, o2)] += replay_lr * posterior[s];
        }
        if t == 0 {
            for (alpha, q) in out.alpha_d.iter_mut().zip(posterior) {
                *alpha += replay_lr * q;
            }
        } else {
            let prev = filter.posteriors.row(t - 1);
            let bm = &mut out.alpha_b[seq.segment_of[t]];
            for i in 0..k {
                for j in 0..k {
                    bm[(i, j)] += replay_lr * prev[i] * posterior[j];
                }
            }
        }
    }
    Ok(out)
}

/// Scene metrics for each of `viewings` passes over the same sequence. The
/// first viewing scores the input concentrations untouched; each later
/// viewing scores the concentrations updated by the previous pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewingTrace {
    pub viewings: Vec<Vec<SceneFeMetrics>>,
    pub replay_lr: f64,
    pub mode: ModalityMode,
}

impl ViewingTrace {
    pub fn count(&self) -> usize {
        self.viewings.len()
    }
}

pub fn simulate_viewings(
    seq: &EncodedSequence,
    theta: &ModelParams,
    viewings: usize,
    replay_lr: f64,
    mode: ModalityMode,
) -> Result<ViewingTrace, EmotionError> {
    if viewings == 0 {
        return Err(EmotionError::NoViewings);
    }
    if replay_lr < 0.0 {
        return Err(EmotionError::NegativeLearningRate(replay_lr));
    }
    let mut current = theta.clone();
    let mut out = Vec::with_capacity(viewings);
    for r in 0..viewings {
        let params = ScoreParams::from_point(&mean_params(&current));
        let filter = forward_filter(seq, &params, mode)?;
        out.push(scene_metrics(&filter, &params, seq, mode)?);
        if r + 1 < viewings {
            current = replay_update(&current, &filter, seq, replay_lr)?;
        }
    }
    Ok(ViewingTrace {
        viewings: out,
        replay_lr,
        mode,
    })
}

/// Relative reduction of a scene-summed metric between the first and last
/// viewing. `None` when the first-viewing sum is zero.
pub fn decay_rate(first: &[f64], last: &[f64]) -> Option<f64> {
    assert_eq!(first.len(), last.len(), "viewings cover the same scenes");
    let denom: f64 = first.iter().sum();
    if denom == 0.0 {
        return None;
    }
    let diff: f64 = first.iter().zip(last).map(|(f, l)| f - l).sum();
    Some(diff / denom)
}

/// Biased Fisher-Pearson moment coefficient g1 = m3 / m2^(3/2) over
/// population moments. Undefined (n < 3 or zero variance) yields (0, false).
pub fn skewness(values: &[f64]) -> (f64, bool) {
    if values.len() < 3 {
        return (0.0, false);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return (0.0, false);
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    (m3 / m2.powf(1.5), true)
}

/// Video-level summary of one metric: peak, end, and skewness over the first
/// viewing's scenes, plus the decay rate between the first and last viewing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricIndices {
    pub peak: f64,
    pub end: f64,
    pub skew: f64,
    pub skew_defined: bool,
    pub decay: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoEmotionIndices {
    pub kld: MetricIndices,
    pub bs: MetricIndices,
    pub un: MetricIndices,
}

fn metric_indices(trace: &ViewingTrace, pick: fn(&SceneFeMetrics) -> f64) -> MetricIndices {
    let first: Vec<f64> = trace.viewings[0].iter().map(pick).collect();
    let last: Vec<f64> = trace.viewings[trace.count() - 1].iter().map(pick).collect();
    let peak = first.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let end = *first.last().expect("non-empty scene list");
    let (skew, skew_defined) = skewness(&first);
    MetricIndices {
        peak,
        end,
        skew,
        skew_defined,
        decay: decay_rate(&first, &last),
    }
}

pub fn video_indices(trace: &ViewingTrace) -> VideoEmotionIndices {
    assert!(!trace.viewings.is_empty() && !trace.viewings[0].is_empty());
    VideoEmotionIndices {
        kld: metric_indices(trace, |m| m.kld),
        bs: metric_indices(trace, |m| m.bs),
        un: metric_indices(trace, |m| m.un),
    }
}
