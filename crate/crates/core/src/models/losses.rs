//! Adversarial and variational loss terms.

use crate::error::{Error, Result};
use crate::nn::PROB_FLOOR;

/// Standard GAN losses for one point, from discriminator probabilities:
/// `L_D = -[ln D(x) + ln(1 - D(G(z)))]` and `L_G = ln(1 - D(G(z)))`.
///
/// Inputs are clamped into `[PROB_FLOOR, 1 - PROB_FLOOR]`; values outside
/// `[0, 1]` (or NaN) are rejected.
pub fn gan_losses(d_real: f64, d_fake: f64) -> Result<(f64, f64)> {
    for (name, v) in [("d_real", d_real), ("d_fake", d_fake)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} is not a probability")));
        }
    }
    let r = d_real.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    let f = d_fake.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    let l_d = -(r.ln() + (1.0 - f).ln());
    let l_g = (1.0 - f).ln();
    Ok((l_d, l_g))
}

/// Wasserstein losses on raw critic scores:
/// `L_D = -[D(x) + (1 - D(G(z)))]` and `L_G = 1 - D(G(z))`.
///
/// Because both are linear, the batch mean of the per-point losses equals
/// this function evaluated at the mean scores. `dL_D/dD(x) = -1`,
/// `dL_D/dD(G(z)) = 1`, `dL_G/dD(G(z)) = -1`.
pub fn wgan_losses(d_real: f64, d_fake: f64) -> (f64, f64) {
    (-(d_real + (1.0 - d_fake)), 1.0 - d_fake)
}

/// `sum_d 0.5 (mu^2 + exp(logvar) - 1 - logvar)`: KL divergence from
/// `N(mu, diag(exp(logvar)))` to the standard normal.
pub fn gaussian_kl(mu: &[f64], logvar: &[f64]) -> f64 {
    mu.iter()
        .zip(logvar)
        .map(|(&m, &lv)| 0.5 * (m * m + lv.exp() - 1.0 - lv))
        .sum()
}
