//! Stochastic natural-gradient coordinate ascent on the Dirichlet
//! concentrations. Each mini-batch runs forward-backward under the
//! geometric-mean parameters, scales the sufficient statistics to the full
//! data set, and blends the candidate concentrations into the current ones
//! with the learning rate. Full-batch mode (rate 1, batch = training set) is
//! exact coordinate ascent and never decreases the ELBO.

use super::{elbo, expected_log_params, init_params, ExpectedLogParams, ModelError, ModelParams};
use crate::corpus::EncodedSequence;
use crate::mat::Matrix;
use crate::rng::substream;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Observation-space dimensions the sequences were encoded against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelDims {
    pub v1: usize,
    pub v2: usize,
    pub m: usize,
    pub segment_seconds: f64,
}

fn default_hidden_states() -> usize {
    5
}

fn default_dirichlet_scale() -> f64 {
    0.2
}

fn default_learning_rate() -> f64 {
    0.0275
}

fn default_batch_size() -> usize {
    32
}

fn default_epochs() -> usize {
    20
}

fn default_validation_ratio() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_states: usize,
    pub dirichlet_scale: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub validation_ratio: f64,
    /// When set, every update uses the whole training set with rate 1.
    pub full_batch: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_states: default_hidden_states(),
            dirichlet_scale: default_dirichlet_scale(),
            learning_rate: default_learning_rate(),
            batch_size: default_batch_size(),
            epochs: default_epochs(),
            seed: 0,
            validation_ratio: default_validation_ratio(),
            full_batch: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hidden_states == 0 {
            return Err(ModelError::InvalidDimension("hidden_states must be >= 1".into()));
        }
        if !(self.dirichlet_scale > 0.0) {
            return Err(ModelError::InvalidScale(self.dirichlet_scale));
        }
        if !(0.0..=1.0).contains(&self.learning_rate) {
            return Err(ModelError::InvalidLearningRate(self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.validation_ratio) {
            return Err(ModelError::InvalidRatio(self.validation_ratio));
        }
        if self.batch_size == 0 && !self.full_batch {
            return Err(ModelError::InvalidDimension("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_elbo: f64,
    pub val_neg_elbo: Option<f64>,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub epochs: Vec<EpochStats>,
    pub config: TrainConfig,
    pub n_train: usize,
    pub n_val: usize,
}

/// Linear-domain geometric-mean parameters; entries in (0, 1], rows
/// sub-normalized.
pub(super) struct TildeParams {
    pub a1: Matrix,
    pub a2: Matrix,
    pub b: Vec<Matrix>,
    pub d: Vec<f64>,
}

impl From<&ExpectedLogParams> for TildeParams {
    fn from(el: &ExpectedLogParams) -> Self {
        TildeParams {
            a1: el.log_a1.map(f64::exp),
            a2: el.log_a2.map(f64::exp),
            b: el.log_b.iter().map(|m| m.map(f64::exp)).collect(),
            d: el.log_d.iter().map(|v| v.exp()).collect(),
        }
    }
}

impl TildeParams {
    fn k(&self) -> usize {
        self.d.len()
    }

    pub(super) fn check_sequence(&self, seq: &EncodedSequence) -> Result<(), ModelError> {
        if seq.is_empty() {
            return Err(ModelError::ShapeMismatch(format!("video {}: empty sequence", seq.video_id)));
        }
        let bad = seq.obs_visual.iter().any(|&o| o >= self.a1.cols())
            || seq.obs_audio.iter().any(|&o| o >= self.a2.cols())
            || seq.segment_of.iter().any(|&m| m >= self.b.len());
        if bad {
            return Err(ModelError::ShapeMismatch(format!(
                "video {}: observation or segment index out of range",
                seq.video_id
            )));
        }
        Ok(())
    }

    fn likelihood(&self, seq: &EncodedSequence, t: usize, out: &mut [f64]) {
        let o1 = seq.obs_visual[t];
        let o2 = seq.obs_audio[t];
        for s in 0..self.k() {
            out[s] = self.a1[(s, o1)] * self.a2[(s, o2)];
        }
    }
}

/// Scaled forward pass; returns per-step normalized filtering vectors, the
/// normalizers, and the accumulated log normalizer.
pub(super) fn forward_pass(
    seq: &EncodedSequence,
    tp: &TildeParams,
) -> Result<(Vec<Vec<f64>>, Vec<f64>, f64), ModelError> {
    tp.check_sequence(seq)?;
    let k = tp.k();
    let t_len = seq.len();
    let mut alphas = vec![vec![0.0; k]; t_len];
    let mut norms = vec![0.0; t_len];
    let mut logz = 0.0;
    let mut lik = vec![0.0; k];
    for t in 0..t_len {
        tp.likelihood(seq, t, &mut lik);
        let (prev, cur) = if t == 0 {
            (None, &mut alphas[t])
        } else {
            let (a, b) = alphas.split_at_mut(t);
            (Some(&a[t - 1]), &mut b[0])
        };
        match prev {
            None => {
                for s in 0..k {
                    cur[s] = tp.d[s] * lik[s];
                }
            }
            Some(prev) => {
                let b = &tp.b[seq.segment_of[t]];
                for (sp, c) in cur.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (s, p) in prev.iter().enumerate() {
                        acc += p * b[(s, sp)];
                    }
                    *c = acc * lik[sp];
                }
            }
        }
        let c: f64 = cur.iter().sum();
        if !(c > 0.0) || !c.is_finite() {
            return Err(ModelError::ShapeMismatch(format!(
                "video {}: zero forward normalizer at scene {t}",
                seq.video_id
            )));
        }
        for v in cur.iter_mut() {
            *v /= c;
        }
        norms[t] = c;
        logz += c.ln();
    }
    Ok((alphas, norms, logz))
}

/// Per-sequence expected sufficient statistics from forward-backward.
pub(super) struct SeqStats {
    pub emis1: Matrix,
    pub emis2: Matrix,
    pub trans: Vec<Matrix>,
    pub init: Vec<f64>,
    pub logz: f64,
}

impl SeqStats {
    fn zeros(k: usize, v1: usize, v2: usize, m: usize) -> Self {
        Self {
            emis1: Matrix::zeros(k, v1),
            emis2: Matrix::zeros(k, v2),
            trans: (0..m).map(|_| Matrix::zeros(k, k)).collect(),
            init: vec![0.0; k],
            logz: 0.0,
        }
    }

    fn absorb(&mut self, other: &SeqStats) {
        let add = |a: &mut Matrix, b: &Matrix| {
            for i in 0..a.rows() {
                for (x, y) in a.row_mut(i).iter_mut().zip(b.row(i)) {
                    *x += y;
                }
            }
        };
        add(&mut self.emis1, &other.emis1);
        add(&mut self.emis2, &other.emis2);
        for (a, b) in self.trans.iter_mut().zip(&other.trans) {
            add(a, b);
        }
        for (x, y) in self.init.iter_mut().zip(&other.init) {
            *x += y;
        }
        self.logz += other.logz;
    }
}

pub(super) fn forward_backward(seq: &EncodedSequence, tp: &TildeParams) -> Result<SeqStats, ModelError> {
    let k = tp.k();
    let t_len = seq.len();
    let (alphas, norms, logz) = forward_pass(seq, tp)?;
    let mut stats = SeqStats::zeros(k, tp.a1.cols(), tp.a2.cols(), tp.b.len());
    stats.logz = logz;

    let mut beta = vec![1.0; k];
    let mut beta_next = vec![0.0; k];
    let mut lik = vec![0.0; k];
    for t in (0..t_len).rev() {
        // Smoothed marginal under this scaling: gamma = alpha .* beta.
        let o1 = seq.obs_visual[t];
        let o2 = seq.obs_audio[t];
        for s in 0..k {
            let g = alphas[t][s] * beta[s];
            stats.emis1[(s, o1)] += g;
            stats.emis2[(s, o2)] += g;
            if t == 0 {
                stats.init[s] += g;
            }
        }
        if t == 0 {
            break;
        }
        tp.likelihood(seq, t, &mut lik);
        let seg = seq.segment_of[t];
        let b = &tp.b[seg];
        let inv_norm = 1.0 / norms[t];
        let trans = &mut stats.trans[seg];
        for i in 0..k {
            let a_prev = alphas[t - 1][i] * inv_norm;
            let mut acc = 0.0;
            for j in 0..k {
                let w = b[(i, j)] * lik[j] * beta[j];
                trans[(i, j)] += a_prev * w;
                acc += w;
            }
            beta_next[i] = acc * inv_norm;
        }
        std::mem::swap(&mut beta, &mut beta_next);
    }
    Ok(stats)
}

fn accumulate_batch(
    sequences: &[EncodedSequence],
    batch: &[usize],
    tp: &TildeParams,
) -> Result<SeqStats, ModelError> {
    let per_seq: Vec<SeqStats> = batch
        .par_iter()
        .map(|&i| forward_backward(&sequences[i], tp))
        .collect::<Result<_, _>>()?;
    let mut total = SeqStats::zeros(tp.k(), tp.a1.cols(), tp.a2.cols(), tp.b.len());
    // Fixed-order reduction keeps results identical regardless of thread count.
    for s in &per_seq {
        total.absorb(s);
    }
    Ok(total)
}

fn blend_candidate(theta: &mut ModelParams, stats: &SeqStats, prior: f64, scale_n: f64, rate: f64) {
    let blend_mat = |alpha: &mut Matrix, stat: &Matrix| {
        let candidate = stat.map(|s| prior + scale_n * s);
        alpha.blend_from(&candidate, rate);
    };
    blend_mat(&mut theta.alpha_a1, &stats.emis1);
    blend_mat(&mut theta.alpha_a2, &stats.emis2);
    for (alpha_b, stat) in theta.alpha_b.iter_mut().zip(&stats.trans) {
        blend_mat(alpha_b, stat);
    }
    for (alpha, stat) in theta.alpha_d.iter_mut().zip(&stats.init) {
        let candidate = prior + scale_n * stat;
        *alpha = (1.0 - rate) * *alpha + rate * candidate;
    }
}

/// 80:20-style split, mini-batch natural-gradient updates, per-epoch ELBO
/// trace; deterministic per seed.
pub fn train(
    sequences: &[EncodedSequence],
    dims: &ModelDims,
    config: &TrainConfig,
) -> Result<(ModelParams, TrainingTrace), ModelError> {
    config.validate()?;
    if sequences.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }

    let mut order: Vec<usize> = (0..sequences.len()).collect();
    order.shuffle(&mut substream(config.seed, "train/split"));
    let n_val = ((config.validation_ratio * sequences.len() as f64).floor() as usize).min(sequences.len() - 1);
    let (val_idx, train_idx) = order.split_at(n_val);
    let n_train = train_idx.len();
    if n_train == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    let (batch_size, rate) = if config.full_batch {
        (n_train, 1.0)
    } else {
        (config.batch_size, config.learning_rate)
    };
    if batch_size > n_train {
        return Err(ModelError::BatchTooLarge {
            batch: batch_size,
            train: n_train,
        });
    }

    let mut theta = init_params(
        config.hidden_states,
        dims.v1,
        dims.v2,
        dims.m,
        dims.segment_seconds,
        config.dirichlet_scale,
        config.seed,
    )?;
    // Surface encoding mismatches before the first epoch.
    {
        let tp = TildeParams::from(&expected_log_params(&theta));
        for seq in sequences {
            tp.check_sequence(seq)?;
        }
    }

    let train_seqs: Vec<EncodedSequence> = train_idx.iter().map(|&i| sequences[i].clone()).collect();
    let val_seqs: Vec<EncodedSequence> = val_idx.iter().map(|&i| sequences[i].clone()).collect();

    let mut epochs = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let started = Instant::now();
        let mut epoch_order: Vec<usize> = train_idx.to_vec();
        epoch_order.shuffle(&mut substream(config.seed, &format!("train/epoch/{epoch}")));
        for batch in epoch_order.chunks(batch_size) {
            let tp = TildeParams::from(&expected_log_params(&theta));
            let stats = accumulate_batch(sequences, batch, &tp)?;
            let scale_n = n_train as f64 / batch.len() as f64;
            blend_candidate(&mut theta, &stats, config.dirichlet_scale, scale_n, rate);
        }
        let train_elbo = elbo(&theta, config.dirichlet_scale, &train_seqs)?;
        if !train_elbo.is_finite() {
            return Err(ModelError::NonFiniteElbo {
                epoch,
                value: train_elbo,
            });
        }
        let val_neg_elbo = if val_seqs.is_empty() {
            None
        } else {
            let v = elbo(&theta, config.dirichlet_scale, &val_seqs)?;
            if !v.is_finite() {
                return Err(ModelError::NonFiniteElbo { epoch, value: v });
            }
            Some(-v)
        };
        epochs.push(EpochStats {
            epoch,
            train_elbo,
            val_neg_elbo,
            wall_secs: started.elapsed().as_secs_f64(),
        });
    }

    let trace = TrainingTrace {
        epochs,
        config: config.clone(),
        n_train,
        n_val,
    };
    Ok((theta, trace))
}
