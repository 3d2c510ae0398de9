//! Evidence lower bound: accumulated log normalizers of the geometric-mean
//! forward pass minus the Dirichlet KL to the symmetric prior.

use super::train::{forward_pass, TildeParams};
use super::{expected_log_params, ModelError, ModelParams};
use crate::corpus::EncodedSequence;
use statrs::function::gamma::{digamma, ln_gamma};

/// KL(Dirichlet(alpha) || Dirichlet(prior_scale * 1)).
pub fn dirichlet_kl(alpha: &[f64], prior_scale: f64) -> f64 {
    let a0: f64 = alpha.iter().sum();
    let b0 = prior_scale * alpha.len() as f64;
    let dg_a0 = digamma(a0);
    let mut kl = ln_gamma(a0) - ln_gamma(b0);
    for &a in alpha {
        kl += ln_gamma(prior_scale) - ln_gamma(a);
        kl += (a - prior_scale) * (digamma(a) - dg_a0);
    }
    kl
}

fn param_kl(params: &ModelParams, prior_scale: f64) -> f64 {
    let mut kl = 0.0;
    for i in 0..params.alpha_a1.rows() {
        kl += dirichlet_kl(params.alpha_a1.row(i), prior_scale);
    }
    for i in 0..params.alpha_a2.rows() {
        kl += dirichlet_kl(params.alpha_a2.row(i), prior_scale);
    }
    for b in &params.alpha_b {
        for i in 0..b.rows() {
            kl += dirichlet_kl(b.row(i), prior_scale);
        }
    }
    kl + dirichlet_kl(&params.alpha_d, prior_scale)
}

/// ELBO = sum over sequences of the log evidence under the sub-normalized
/// geometric-mean parameters, minus the KL between the Dirichlet posteriors
/// and the symmetric prior at `prior_scale`. A valid lower bound on the exact
/// log marginal likelihood for any positive concentrations.
pub fn elbo(params: &ModelParams, prior_scale: f64, sequences: &[EncodedSequence]) -> Result<f64, ModelError> {
    params.validate()?;
    if !(prior_scale > 0.0) {
        return Err(ModelError::InvalidScale(prior_scale));
    }
    let tp = TildeParams::from(&expected_log_params(params));
    let mut total = 0.0;
    for seq in sequences {
        let (_, _, logz) = forward_pass(seq, &tp)?;
        total += logz;
    }
    Ok(total - param_kl(params, prior_scale))
}
