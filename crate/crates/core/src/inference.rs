//! Exact filtering over the two-modality segment-indexed HMM: per-scene
//! predictive priors, post-observation posteriors, and log-evidence
//! increments, plus a brute-force path-enumeration oracle for testing.

use crate::corpus::EncodedSequence;
use crate::mat::Matrix;
use crate::model::{expected_log_params, ModelParams, PointParams};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModalityMode {
    Visual,
    Audio,
    Joint,
}

impl ModalityMode {
    pub const ALL: [ModalityMode; 3] = [ModalityMode::Visual, ModalityMode::Audio, ModalityMode::Joint];

    pub fn name(&self) -> &'static str {
        match self {
            ModalityMode::Visual => "visual",
            ModalityMode::Audio => "audio",
            ModalityMode::Joint => "joint",
        }
    }
}

impl fmt::Display for ModalityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModalityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "visual" => Ok(ModalityMode::Visual),
            "audio" => Ok(ModalityMode::Audio),
            "joint" => Ok(ModalityMode::Joint),
            other => Err(format!("unknown modality mode '{other}'")),
        }
    }
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("sequence is empty")]
    EmptySequence,
    #[error("video {video_id}: observation or segment index out of range at scene {scene}")]
    IndexOutOfRange { video_id: String, scene: usize },
    #[error("video {video_id}: all-zero likelihood at scene {scene}")]
    AllZeroLikelihood { video_id: String, scene: usize },
    #[error("instance too large for enumeration: K^T = {paths} exceeds {limit}")]
    TooLarge { paths: f64, limit: f64 },
}

/// Row-stochastic scoring parameters held in the log domain. Built either
/// from posterior means (the default scoring source) or from row-renormalized
/// geometric means.
#[derive(Debug, Clone)]
pub struct ScoreParams {
    pub log_a1: Matrix,
    pub log_a2: Matrix,
    pub log_b: Vec<Matrix>,
    pub log_d: Vec<f64>,
}

fn log_normalize_rows(mat: &Matrix) -> Matrix {
    let mut out = mat.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = mx + row.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
        for v in row.iter_mut() {
            *v -= lse;
        }
    }
    out
}

impl ScoreParams {
    pub fn from_point(p: &PointParams) -> Self {
        ScoreParams {
            log_a1: p.a1.map(f64::ln),
            log_a2: p.a2.map(f64::ln),
            log_b: p.b.iter().map(|m| m.map(f64::ln)).collect(),
            log_d: p.d.iter().map(|v| v.ln()).collect(),
        }
    }

    /// Geometric-mean source: digamma rows renormalized to proper
    /// distributions so the simplex invariants of `FilterResult` hold.
    pub fn from_expected_log(params: &ModelParams) -> Self {
        let el = expected_log_params(params);
        let log_d = {
            let mx = el.log_d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = mx + el.log_d.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
            el.log_d.iter().map(|v| v - lse).collect()
        };
        ScoreParams {
            log_a1: log_normalize_rows(&el.log_a1),
            log_a2: log_normalize_rows(&el.log_a2),
            log_b: el.log_b.iter().map(log_normalize_rows).collect(),
            log_d,
        }
    }

    pub fn k(&self) -> usize {
        self.log_d.len()
    }

    pub fn v1(&self) -> usize {
        self.log_a1.cols()
    }

    pub fn v2(&self) -> usize {
        self.log_a2.cols()
    }

    pub fn segments(&self) -> usize {
        self.log_b.len()
    }

    fn check(&self, seq: &EncodedSequence) -> Result<(), InferenceError> {
        if seq.is_empty() {
            return Err(InferenceError::EmptySequence);
        }
        for t in 0..seq.len() {
            if seq.obs_visual[t] >= self.v1() || seq.obs_audio[t] >= self.v2() || seq.segment_of[t] >= self.segments()
            {
                return Err(InferenceError::IndexOutOfRange {
                    video_id: seq.video_id.clone(),
                    scene: t,
                });
            }
        }
        Ok(())
    }
}

/// Per-state observation log-likelihood of scene `t` under the mode: the sum
/// of per-modality emission log-probabilities in joint mode, a single factor
/// otherwise.
pub fn log_likelihood_row(params: &ScoreParams, seq: &EncodedSequence, t: usize, mode: ModalityMode) -> Vec<f64> {
    let k = params.k();
    let mut out = vec![0.0; k];
    match mode {
        ModalityMode::Visual => {
            let o1 = seq.obs_visual[t];
            for (s, v) in out.iter_mut().enumerate() {
                *v = params.log_a1[(s, o1)];
            }
        }
        ModalityMode::Audio => {
            let o2 = seq.obs_audio[t];
            for (s, v) in out.iter_mut().enumerate() {
                *v = params.log_a2[(s, o2)];
            }
        }
        ModalityMode::Joint => {
            let o1 = seq.obs_visual[t];
            let o2 = seq.obs_audio[t];
            for (s, v) in out.iter_mut().enumerate() {
                *v = params.log_a1[(s, o1)] + params.log_a2[(s, o2)];
            }
        }
    }
    out
}

/// Filtering output: predictive priors, posteriors, and evidence increments.
/// `total_log_evidence` is the increments summed in scene order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    pub priors: Matrix,
    pub posteriors: Matrix,
    pub log_evidence_inc: Vec<f64>,
    pub total_log_evidence: f64,
}

impl FilterResult {
    pub fn scenes(&self) -> usize {
        self.log_evidence_inc.len()
    }
}

/// Sequential exact filtering: the prior of scene 1 is the initial belief;
/// later priors propagate the previous posterior through the transition
/// matrix of the segment containing the scene. The observation update runs in
/// the log domain with max-shift normalization.
pub fn forward_filter(
    seq: &EncodedSequence,
    params: &ScoreParams,
    mode: ModalityMode,
) -> Result<FilterResult, InferenceError> {
    params.check(seq)?;
    let k = params.k();
    let t_len = seq.len();
    let mut priors = Matrix::zeros(t_len, k);
    let mut posteriors = Matrix::zeros(t_len, k);
    let mut log_evidence_inc = Vec::with_capacity(t_len);

    let mut prior: Vec<f64> = params.log_d.iter().map(|v| v.exp()).collect();
    for t in 0..t_len {
        if t > 0 {
            let b = &params.log_b[seq.segment_of[t]];
            let prev = posteriors.row(t - 1).to_vec();
            let mut next = vec![0.0; k];
            for (sp, n) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (s, p) in prev.iter().enumerate() {
                    acc += p * b[(s, sp)].exp();
                }
                *n = acc;
            }
            let total: f64 = next.iter().sum();
            for v in next.iter_mut() {
                *v /= total;
            }
            prior = next;
        }
        let loglik = log_likelihood_row(params, seq, t, mode);
        let mut lp = vec![0.0; k];
        let mut mx = f64::NEG_INFINITY;
        for s in 0..k {
            lp[s] = prior[s].ln() + loglik[s];
            mx = mx.max(lp[s]);
        }
        if mx == f64::NEG_INFINITY {
            return Err(InferenceError::AllZeroLikelihood {
                video_id: seq.video_id.clone(),
                scene: t,
            });
        }
        let lse = mx + lp.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
        priors.row_mut(t).copy_from_slice(&prior);
        for (s, v) in posteriors.row_mut(t).iter_mut().enumerate() {
            *v = (lp[s] - lse).exp();
        }
        log_evidence_inc.push(lse);
    }
    let total_log_evidence = log_evidence_inc.iter().sum();
    Ok(FilterResult {
        priors,
        posteriors,
        log_evidence_inc,
        total_log_evidence,
    })
}

const ENUMERATION_LIMIT: f64 = 1e6;

/// Test oracle: filtered marginals and evidence by explicit enumeration of
/// all state paths per prefix length, in the linear domain. Independent of
/// the filtering recursion above.
pub fn brute_force_posterior(
    seq: &EncodedSequence,
    params: &ScoreParams,
    mode: ModalityMode,
) -> Result<FilterResult, InferenceError> {
    params.check(seq)?;
    let k = params.k();
    let t_len = seq.len();
    let paths = (k as f64).powi(t_len as i32);
    if paths > ENUMERATION_LIMIT {
        return Err(InferenceError::TooLarge {
            paths,
            limit: ENUMERATION_LIMIT,
        });
    }

    let d: Vec<f64> = params.log_d.iter().map(|v| v.exp()).collect();
    let b: Vec<Matrix> = params.log_b.iter().map(|m| m.map(f64::exp)).collect();
    let lik: Vec<Vec<f64>> = (0..t_len)
        .map(|t| log_likelihood_row(params, seq, t, mode).iter().map(|v| v.exp()).collect())
        .collect();

    let mut priors = Matrix::zeros(t_len, k);
    let mut posteriors = Matrix::zeros(t_len, k);
    let mut log_evidence_inc = Vec::with_capacity(t_len);
    let mut z_prev = 1.0f64;
    for t_prefix in 1..=t_len {
        let mut posterior_acc = vec![0.0; k];
        let mut prior_acc = vec![0.0; k];
        let count = k.pow(t_prefix as u32);
        let mut path = vec![0usize; t_prefix];
        for idx in 0..count {
            let mut rest = idx;
            for slot in path.iter_mut() {
                *slot = rest % k;
                rest /= k;
            }
            // Weight with all transitions and all observations except the
            // last scene's; the prior marginal drops that final factor.
            let mut w_no_last = d[path[0]];
            for tau in 1..t_prefix {
                w_no_last *= lik[tau - 1][path[tau - 1]];
                w_no_last *= b[seq.segment_of[tau]][(path[tau - 1], path[tau])];
            }
            let last = path[t_prefix - 1];
            prior_acc[last] += w_no_last;
            posterior_acc[last] += w_no_last * lik[t_prefix - 1][last];
        }
        let z_t: f64 = posterior_acc.iter().sum();
        let prior_total: f64 = prior_acc.iter().sum();
        for (s, v) in priors.row_mut(t_prefix - 1).iter_mut().enumerate() {
            *v = prior_acc[s] / prior_total;
        }
        for (s, v) in posteriors.row_mut(t_prefix - 1).iter_mut().enumerate() {
            *v = posterior_acc[s] / z_t;
        }
        log_evidence_inc.push(z_t.ln() - z_prev.ln());
        z_prev = z_t;
    }
    let total_log_evidence = log_evidence_inc.iter().sum();
    Ok(FilterResult {
        priors,
        posteriors,
        log_evidence_inc,
        total_log_evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seq(o1: Vec<usize>, o2: Vec<usize>, seg: Vec<usize>) -> EncodedSequence {
        EncodedSequence {
            video_id: "t".into(),
            obs_visual: o1,
            obs_audio: o2,
            segment_of: seg,
        }
    }

    fn uniform_params(k: usize, v1: usize, v2: usize, m: usize) -> ScoreParams {
        ScoreParams::from_point(&PointParams {
            a1: Matrix::filled(k, v1, 1.0 / v1 as f64),
            a2: Matrix::filled(k, v2, 1.0 / v2 as f64),
            b: vec![Matrix::filled(k, k, 1.0 / k as f64); m],
            d: vec![1.0 / k as f64; k],
        })
    }

    #[test]
    fn uniform_model_stays_uniform() {
        let params = uniform_params(2, 3, 4, 2);
        let s = seq(vec![0, 2, 1], vec![3, 0, 0], vec![0, 1, 1]);
        let fr = forward_filter(&s, &params, ModalityMode::Joint).unwrap();
        let expected_inc = (1.0f64 / 3.0).ln() + (1.0f64 / 4.0).ln();
        for t in 0..3 {
            for s_idx in 0..2 {
                assert_abs_diff_eq!(fr.priors[(t, s_idx)], 0.5, epsilon = 1e-12);
                assert_abs_diff_eq!(fr.posteriors[(t, s_idx)], 0.5, epsilon = 1e-12);
            }
            assert_abs_diff_eq!(fr.log_evidence_inc[t], expected_inc, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_state_chain_is_degenerate() {
        let params = ScoreParams::from_point(&PointParams {
            a1: Matrix::from_rows(&[vec![0.25, 0.75]]),
            a2: Matrix::from_rows(&[vec![0.1, 0.9]]),
            b: vec![Matrix::from_rows(&[vec![1.0]])],
            d: vec![1.0],
        });
        let s = seq(vec![1, 0], vec![1, 1], vec![0, 0]);
        let fr = forward_filter(&s, &params, ModalityMode::Joint).unwrap();
        assert_eq!(fr.posteriors[(0, 0)], 1.0);
        assert_eq!(fr.priors[(1, 0)], 1.0);
        let expected = (0.75f64.ln() + 0.9f64.ln()) + (0.25f64.ln() + 0.9f64.ln());
        assert_abs_diff_eq!(fr.total_log_evidence, expected, epsilon = 1e-12);
    }

    #[test]
    fn modality_modes_pick_their_factor() {
        let params = ScoreParams::from_point(&PointParams {
            a1: Matrix::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]),
            a2: Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]),
            b: vec![Matrix::filled(2, 2, 0.5)],
            d: vec![0.5, 0.5],
        });
        let s = seq(vec![0], vec![0], vec![0]);
        let visual = forward_filter(&s, &params, ModalityMode::Visual).unwrap();
        let audio = forward_filter(&s, &params, ModalityMode::Audio).unwrap();
        let joint = forward_filter(&s, &params, ModalityMode::Joint).unwrap();
        // Audio emissions are uninformative here.
        assert_abs_diff_eq!(audio.posteriors[(0, 0)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(visual.posteriors[(0, 0)], 0.9 / 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(joint.posteriors[(0, 0)], visual.posteriors[(0, 0)], epsilon = 1e-12);
        assert_abs_diff_eq!(
            joint.total_log_evidence,
            visual.total_log_evidence + audio.total_log_evidence,
            epsilon = 1e-12
        );
    }

    #[test]
    fn brute_force_single_scene_matches_hand_computation() {
        // K = 2, T = 1: posterior proportional to D .* likelihood.
        let params = ScoreParams::from_point(&PointParams {
            a1: Matrix::from_rows(&[vec![0.7, 0.3], vec![0.4, 0.6]]),
            a2: Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]),
            b: vec![Matrix::filled(2, 2, 0.5)],
            d: vec![0.6, 0.4],
        });
        let s = seq(vec![0], vec![1], vec![0]);
        let fr = brute_force_posterior(&s, &params, ModalityMode::Joint).unwrap();
        let w0 = 0.6 * 0.7 * 0.5;
        let w1 = 0.4 * 0.4 * 0.5;
        assert_abs_diff_eq!(fr.posteriors[(0, 0)], w0 / (w0 + w1), epsilon = 1e-12);
        assert_abs_diff_eq!(fr.total_log_evidence, (w0 + w1).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(fr.priors[(0, 0)], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn oracle_rejects_huge_instances() {
        let params = uniform_params(10, 2, 2, 1);
        let s = seq(vec![0; 7], vec![0; 7], vec![0; 7]);
        assert!(matches!(
            brute_force_posterior(&s, &params, ModalityMode::Joint),
            Err(InferenceError::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_likelihood_guarded() {
        let params = ScoreParams::from_point(&PointParams {
            a1: Matrix::from_rows(&[vec![1.0, 0.0]]),
            a2: Matrix::from_rows(&[vec![1.0, 0.0]]),
            b: vec![Matrix::from_rows(&[vec![1.0]])],
            d: vec![1.0],
        });
        let s = seq(vec![1], vec![0], vec![0]);
        assert!(matches!(
            forward_filter(&s, &params, ModalityMode::Joint),
            Err(InferenceError::AllZeroLikelihood { .. })
        ));
    }

    #[test]
    fn out_of_range_observation_rejected() {
        let params = uniform_params(2, 2, 2, 1);
        let s = seq(vec![5], vec![0], vec![0]);
        assert!(matches!(
            forward_filter(&s, &params, ModalityMode::Joint),
            Err(InferenceError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            forward_filter(&seq(vec![], vec![], vec![]), &params, ModalityMode::Joint),
            Err(InferenceError::EmptySequence)
        ));
    }

    #[test]
    fn geometric_mean_source_yields_proper_distributions() {
        let theta = crate::model::init_params(3, 4, 5, 2, 3.0, 0.2, 1).unwrap();
        let params = ScoreParams::from_expected_log(&theta);
        let s = seq(vec![0, 3, 1], vec![4, 0, 2], vec![0, 0, 1]);
        let fr = forward_filter(&s, &params, ModalityMode::Joint).unwrap();
        for t in 0..3 {
            let prior_sum: f64 = fr.priors.row(t).iter().sum();
            let post_sum: f64 = fr.posteriors.row(t).iter().sum();
            assert_abs_diff_eq!(prior_sum, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(post_sum, 1.0, epsilon = 1e-9);
        }
    }
}
