//! Two-modality categorical HMM with Dirichlet concentrations and
//! per-segment transition matrices, plus its variational-Bayes training loop.

mod elbo;
mod sweep;
mod train;

pub use elbo::{dirichlet_kl, elbo};
pub use sweep::{hyperparameter_sweep, SweepGrid, SweepReport, SweepRow};
pub use train::{train, EpochStats, ModelDims, TrainConfig, TrainingTrace};

use crate::mat::Matrix;
use crate::rng::substream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dirichlet scale must be > 0, got {0}")]
    InvalidScale(f64),
    #[error("learning rate must be in [0, 1], got {0}")]
    InvalidLearningRate(f64),
    #[error("validation ratio must be in [0, 1), got {0}")]
    InvalidRatio(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("batch size {batch} exceeds training-set size {train}")]
    BatchTooLarge { batch: usize, train: usize },
    #[error("non-finite ELBO at epoch {epoch}: {value} (diverged or invalid input)")]
    NonFiniteElbo { epoch: usize, value: f64 },
    #[error("empty sweep grid")]
    EmptyGrid,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file error: {0}")]
    BadModelFile(String),
}

/// Model dimensions carried alongside the concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub k: usize,
    pub v1: usize,
    pub v2: usize,
    pub m: usize,
    pub segment_seconds: f64,
}

/// Dirichlet concentration tensors for emissions, per-segment transitions,
/// and the initial state belief. All entries stay strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha_a1: Matrix,
    pub alpha_a2: Matrix,
    pub alpha_b: Vec<Matrix>,
    pub alpha_d: Vec<f64>,
    pub meta: ModelMeta,
}

/// Point parameters: each row an exact probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub a1: Matrix,
    pub a2: Matrix,
    pub b: Vec<Matrix>,
    pub d: Vec<f64>,
}

/// Log-domain geometric-mean parameters: entry `(i, j)` is
/// `digamma(alpha_ij) - digamma(sum_j alpha_ij)`, so `exp` of a row is
/// sub-normalized (sums to at most 1, strictly below 1 for finite
/// concentrations).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedLogParams {
    pub log_a1: Matrix,
    pub log_a2: Matrix,
    pub log_b: Vec<Matrix>,
    pub log_d: Vec<f64>,
}

const MODEL_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    meta: ModelMeta,
    alpha_a1: Matrix,
    alpha_a2: Matrix,
    alpha_b: Vec<Matrix>,
    alpha_d: Vec<f64>,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let meta = &self.meta;
        let shapes_ok = self.alpha_a1.has_shape(meta.k, meta.v1)
            && self.alpha_a2.has_shape(meta.k, meta.v2)
            && self.alpha_b.len() == meta.m
            && self.alpha_b.iter().all(|b| b.has_shape(meta.k, meta.k))
            && self.alpha_d.len() == meta.k;
        if !shapes_ok {
            return Err(ModelError::ShapeMismatch("concentrations do not match meta".into()));
        }
        let all_positive = self
            .concentration_slices()
            .into_iter()
            .all(|s| s.iter().all(|&v| v > 0.0 && v.is_finite()));
        if !all_positive {
            return Err(ModelError::ShapeMismatch("non-positive concentration".into()));
        }
        Ok(())
    }

    fn concentration_slices(&self) -> Vec<&[f64]> {
        let mut out = vec![self.alpha_a1.data(), self.alpha_a2.data()];
        for b in &self.alpha_b {
            out.push(b.data());
        }
        out.push(&self.alpha_d);
        out
    }

    /// Relabels hidden states: state `i` becomes `perm[i]`.
    pub fn permute_states(&self, perm: &[usize]) -> ModelParams {
        let k = self.meta.k;
        assert_eq!(perm.len(), k);
        let mut out = self.clone();
        for i in 0..k {
            out.alpha_a1.row_mut(perm[i]).copy_from_slice(self.alpha_a1.row(i));
            out.alpha_a2.row_mut(perm[i]).copy_from_slice(self.alpha_a2.row(i));
            out.alpha_d[perm[i]] = self.alpha_d[i];
            for (bm, old) in out.alpha_b.iter_mut().zip(&self.alpha_b) {
                for j in 0..k {
                    bm[(perm[i], perm[j])] = old[(i, j)];
                }
            }
        }
        out
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), ModelError> {
        let file = ModelFile {
            version: MODEL_FILE_VERSION,
            meta: self.meta,
            alpha_a1: self.alpha_a1.clone(),
            alpha_a2: self.alpha_a2.clone(),
            alpha_b: self.alpha_b.clone(),
            alpha_d: self.alpha_d.clone(),
        };
        let text = serde_json::to_string(&file).expect("model serializes");
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| ModelError::BadModelFile(e.to_string()))?;
        if file.version != MODEL_FILE_VERSION {
            return Err(ModelError::BadModelFile(format!(
                "unsupported model file version {}",
                file.version
            )));
        }
        let params = ModelParams {
            alpha_a1: file.alpha_a1,
            alpha_a2: file.alpha_a2,
            alpha_b: file.alpha_b,
            alpha_d: file.alpha_d,
            meta: file.meta,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Symmetric concentrations at `dirichlet_scale` plus a small seeded jitter
/// in `[0, 0.01 * scale)` to break state symmetry; deterministic per seed.
pub fn init_params(
    k: usize,
    v1: usize,
    v2: usize,
    m: usize,
    segment_seconds: f64,
    dirichlet_scale: f64,
    seed: u64,
) -> Result<ModelParams, ModelError> {
    if k == 0 || v1 == 0 || v2 == 0 || m == 0 {
        return Err(ModelError::InvalidDimension(format!(
            "all of k={k}, v1={v1}, v2={v2}, m={m} must be >= 1"
        )));
    }
    if !(dirichlet_scale > 0.0) {
        return Err(ModelError::InvalidScale(dirichlet_scale));
    }
    let mut rng = substream(seed, "init");
    let mut jittered = |rows: usize, cols: usize| -> Matrix {
        let mut mat = Matrix::filled(rows, cols, dirichlet_scale);
        for i in 0..rows {
            for v in mat.row_mut(i) {
                *v += rng.random::<f64>() * 0.01 * dirichlet_scale;
            }
        }
        mat
    };
    let alpha_a1 = jittered(k, v1);
    let alpha_a2 = jittered(k, v2);
    let alpha_b: Vec<Matrix> = (0..m).map(|_| jittered(k, k)).collect();
    let alpha_d = jittered(1, k).row(0).to_vec();
    Ok(ModelParams {
        alpha_a1,
        alpha_a2,
        alpha_b,
        alpha_d,
        meta: ModelMeta {
            k,
            v1,
            v2,
            m,
            segment_seconds,
        },
    })
}

fn normalize_row(row: &[f64]) -> Vec<f64> {
    let s: f64 = row.iter().sum();
    row.iter().map(|v| v / s).collect()
}

/// Posterior-mean parameters: entry = concentration / row sum.
pub fn mean_params(params: &ModelParams) -> PointParams {
    PointParams {
        a1: params.alpha_a1.row_normalized(),
        a2: params.alpha_a2.row_normalized(),
        b: params.alpha_b.iter().map(Matrix::row_normalized).collect(),
        d: normalize_row(&params.alpha_d),
    }
}

fn digamma_row(row: &[f64]) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    let dg_total = digamma(total);
    row.iter().map(|&a| digamma(a) - dg_total).collect()
}

fn digamma_matrix(mat: &Matrix) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..mat.rows()).map(|i| digamma_row(mat.row(i))).collect();
    Matrix::from_rows(&rows)
}

/// Geometric-mean (digamma) parameters in the log domain.
pub fn expected_log_params(params: &ModelParams) -> ExpectedLogParams {
    ExpectedLogParams {
        log_a1: digamma_matrix(&params.alpha_a1),
        log_a2: digamma_matrix(&params.alpha_a2),
        log_b: params.alpha_b.iter().map(digamma_matrix).collect(),
        log_d: digamma_row(&params.alpha_d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn init_is_deterministic_and_near_scale() {
        let a = init_params(5, 7, 11, 3, 3.0, 0.2, 42).unwrap();
        let b = init_params(5, 7, 11, 3, 3.0, 0.2, 42).unwrap();
        assert_eq!(a, b);
        for &v in a.alpha_a1.data() {
            assert!((0.2..0.202).contains(&v));
        }
        let c = init_params(5, 7, 11, 3, 3.0, 0.2, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_rejects_bad_inputs() {
        assert!(matches!(init_params(0, 2, 2, 1, 3.0, 0.2, 0), Err(ModelError::InvalidDimension(_))));
        assert!(matches!(init_params(2, 2, 2, 1, 3.0, 0.0, 0), Err(ModelError::InvalidScale(_))));
        assert!(matches!(init_params(2, 2, 2, 1, 3.0, -1.0, 0), Err(ModelError::InvalidScale(_))));
    }

    #[test]
    fn mean_rows_are_exactly_stochastic() {
        let p = ModelParams {
            alpha_a1: Matrix::from_rows(&[vec![1.0, 1.0]]),
            alpha_a2: Matrix::from_rows(&[vec![3.0, 1.0]]),
            alpha_b: vec![Matrix::from_rows(&[vec![2.0]])],
            alpha_d: vec![1.0],
            meta: ModelMeta {
                k: 1,
                v1: 2,
                v2: 2,
                m: 1,
                segment_seconds: 3.0,
            },
        };
        let mean = mean_params(&p);
        assert_eq!(mean.a1.row(0), &[0.5, 0.5]);
        assert_eq!(mean.a2.row(0), &[0.75, 0.25]);
        assert_eq!(mean.b[0].row(0), &[1.0]);
    }

    #[test]
    fn symmetric_init_without_jitter_gives_uniform_means() {
        let mut p = init_params(3, 4, 4, 2, 3.0, 0.7, 0).unwrap();
        p.alpha_a1 = Matrix::filled(3, 4, 0.7);
        let mean = mean_params(&p);
        for i in 0..3 {
            for &v in mean.a1.row(i) {
                assert_abs_diff_eq!(v, 0.25, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn expected_log_matches_digamma_identities() {
        // Row (1, 1): both entries psi(1) - psi(2) = -1 exactly.
        let row = digamma_row(&[1.0, 1.0]);
        assert_abs_diff_eq!(row[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(row[1], -1.0, epsilon = 1e-12);
        // Concentration limit: row (c, c) for large c tends to ln(1/2).
        let big = digamma_row(&[1e8, 1e8]);
        assert_abs_diff_eq!(big[0], 0.5f64.ln(), epsilon = 1e-7);
        // Single-column row: psi(a) - psi(a) = 0.
        let single = digamma_row(&[0.3]);
        assert_eq!(single[0], 0.0);
    }

    #[test]
    fn expected_log_rows_are_subnormalized() {
        let p = init_params(3, 5, 6, 2, 3.0, 0.4, 1).unwrap();
        let el = expected_log_params(&p);
        let mean = mean_params(&p);
        for i in 0..3 {
            let sub: f64 = el.log_a1.row(i).iter().map(|v| v.exp()).sum();
            assert!(sub < 1.0, "geometric-mean row must be strictly sub-normalized");
            let full: f64 = mean.a1.row(i).iter().sum();
            assert_abs_diff_eq!(full, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let p = init_params(2, 3, 4, 2, 3.0, 0.2, 9).unwrap();
        p.save(&path).unwrap();
        let q = ModelParams::load(&path).unwrap();
        assert_eq!(p, q);
        // Version is enforced.
        let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        doc["version"] = serde_json::json!(99);
        std::fs::write(&path, doc.to_string()).unwrap();
        assert!(matches!(ModelParams::load(&path), Err(ModelError::BadModelFile(_))));
    }

    #[test]
    fn permutation_is_a_relabeling() {
        let p = init_params(3, 2, 2, 2, 3.0, 0.2, 4).unwrap();
        let perm = [2, 0, 1];
        let q = p.permute_states(&perm);
        assert_eq!(q.alpha_a1.row(2), p.alpha_a1.row(0));
        assert_eq!(q.alpha_d[0], p.alpha_d[1]);
        assert_eq!(q.alpha_b[1][(2, 0)], p.alpha_b[1][(0, 1)]);
        let inv = [1, 2, 0];
        assert_eq!(q.permute_states(&inv), p);
    }
}
