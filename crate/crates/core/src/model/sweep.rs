//! Hyperparameter sweep: vary one axis at a time around a base config, train
//! several seeds per setting, and report mean and SD of the validation loss.

use super::{train, ModelDims, ModelError, TrainConfig};
use crate::corpus::EncodedSequence;
use crate::rng::substream_seed;
use serde::{Deserialize, Serialize};

/// One-axis-at-a-time grid around the base config. Empty axes are skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGrid {
    pub hidden_states: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub dirichlet_scales: Vec<f64>,
}

impl SweepGrid {
    pub fn is_empty(&self) -> bool {
        self.hidden_states.is_empty() && self.learning_rates.is_empty() && self.dirichlet_scales.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub hidden_states: usize,
    pub learning_rate: f64,
    pub dirichlet_scale: f64,
    pub mean_val_neg_elbo: f64,
    pub sd: f64,
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub seeds: usize,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Trains each configuration `seeds` times with derived seeds and records the
/// final-epoch validation negative ELBO; the lowest mean is flagged best.
pub fn hyperparameter_sweep(
    sequences: &[EncodedSequence],
    dims: &ModelDims,
    base: &TrainConfig,
    grid: &SweepGrid,
    seeds: usize,
) -> Result<SweepReport, ModelError> {
    if grid.is_empty() || seeds == 0 {
        return Err(ModelError::EmptyGrid);
    }
    let mut configs: Vec<(String, f64, TrainConfig)> = Vec::new();
    for &k in &grid.hidden_states {
        let mut cfg = base.clone();
        cfg.hidden_states = k;
        configs.push(("hidden_states".into(), k as f64, cfg));
    }
    for &lr in &grid.learning_rates {
        let mut cfg = base.clone();
        cfg.learning_rate = lr;
        configs.push(("learning_rate".into(), lr, cfg));
    }
    for &scale in &grid.dirichlet_scales {
        let mut cfg = base.clone();
        cfg.dirichlet_scale = scale;
        configs.push(("dirichlet_scale".into(), scale, cfg));
    }

    let mut rows = Vec::with_capacity(configs.len());
    for (axis, value, cfg) in configs {
        let mut losses = Vec::with_capacity(seeds);
        for i in 0..seeds {
            let mut run = cfg.clone();
            run.seed = substream_seed(base.seed, &format!("sweep/{axis}/{value}/{i}"));
            let (_, trace) = train(sequences, dims, &run)?;
            let last = trace.epochs.last().ok_or_else(|| {
                ModelError::InvalidDimension("sweep requires at least one training epoch".into())
            })?;
            let loss = last
                .val_neg_elbo
                .ok_or_else(|| ModelError::InvalidRatio(cfg.validation_ratio))?;
            losses.push(loss);
        }
        let (mean, sd) = mean_sd(&losses);
        rows.push(SweepRow {
            axis,
            value,
            hidden_states: cfg.hidden_states,
            learning_rate: cfg.learning_rate,
            dirichlet_scale: cfg.dirichlet_scale,
            mean_val_neg_elbo: mean,
            sd,
            best: false,
        });
    }
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.mean_val_neg_elbo.total_cmp(&b.1.mean_val_neg_elbo))
        .map(|(i, _)| i)
        .expect("grid checked non-empty");
    rows[best].best = true;
    Ok(SweepReport {
        rows,
        seeds,
    })
}
