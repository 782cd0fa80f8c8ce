//! Distance-dependent erasure models and the additive-interference
//! decoding rule.
//!
//! A transmitted symbol survives a link of (effective) distance `d` with
//! probability `gamma^d` under the exponential decay model or `d^-alpha`
//! under the polynomial model. The received value is the finite-field sum
//! of all surviving concurrent symbols, so decoding succeeds exactly when
//! the intended symbol survives and every interfering symbol is erased.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ErasureModel {
    Exponential { gamma: f64 },
    Polynomial { alpha: f64 },
}

impl ErasureModel {
    pub fn exponential(gamma: f64) -> Result<Self> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "exponential decay needs 0 < gamma < 1, got {gamma}"
            )));
        }
        Ok(ErasureModel::Exponential { gamma })
    }

    pub fn polynomial(alpha: f64) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "polynomial decay needs alpha > 0, got {alpha}"
            )));
        }
        Ok(ErasureModel::Polynomial { alpha })
    }

    /// Critical distance of the exponential model: `d*` with
    /// `gamma^d = e^(-d/d*)`, i.e. `d* = -1/ln(gamma)`.
    pub fn d_star(&self) -> Option<f64> {
        match self {
            ErasureModel::Exponential { gamma } => Some(-1.0 / gamma.ln()),
            ErasureModel::Polynomial { .. } => None,
        }
    }

    /// Configuration warnings that do not prevent simulation.
    pub fn warnings(&self) -> Vec<String> {
        match self {
            ErasureModel::Polynomial { alpha } if *alpha <= 3.0 => vec![format!(
                "alpha = {alpha} <= 3 is outside the proven regimes; rate and bound \
                 guarantees do not apply"
            )],
            _ => Vec::new(),
        }
    }

    /// Log-probability that a symbol survives a link of distance `d`.
    /// Exact in the log domain; clamped at 0 where the polynomial formula
    /// would exceed probability one (d < 1).
    pub fn ln_survival(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0);
        match self {
            ErasureModel::Exponential { gamma } => d * gamma.ln(),
            ErasureModel::Polynomial { alpha } => {
                if d <= 1.0 {
                    0.0
                } else {
                    -alpha * d.ln()
                }
            }
        }
    }

    pub fn survival(&self, d: f64) -> f64 {
        self.ln_survival(d).exp()
    }

    /// Log of the erasure probability, evaluated stably from the survival
    /// log-probability (computes `ln(1 - e^s)` without cancellation).
    pub fn ln_erasure(&self, d: f64) -> f64 {
        ln_one_minus_exp(self.ln_survival(d))
    }
}

/// Stable `ln(1 - e^s)` for `s <= 0`. Returns `-inf` at `s = 0`.
fn ln_one_minus_exp(s: f64) -> f64 {
    debug_assert!(s <= 0.0);
    if s > -std::f64::consts::LN_2 {
        (-s.exp_m1()).ln()
    } else {
        (-s.exp()).ln_1p()
    }
}

/// Erasure probability of a link of (effective) distance `d`.
pub fn erasure_probability(d: f64, model: &ErasureModel) -> f64 {
    -model.ln_survival(d).exp_m1()
}

/// One slot of the additive-interference rule with fresh Bernoulli draws:
/// the intended symbol must survive and every interferer must be erased.
pub fn decode_success<R: Rng + ?Sized>(
    intended_d: f64,
    interferer_ds: &[f64],
    model: &ErasureModel,
    rng: &mut R,
) -> bool {
    let s = model.survival(intended_d);
    if rng.gen::<f64>() >= s {
        return false;
    }
    for &d in interferer_ds {
        let si = model.survival(d);
        if rng.gen::<f64>() < si {
            return false; // interfering symbol arrived unerased
        }
    }
    true
}

/// Closed-form companion of `decode_success`:
/// `(1 - eps_intended) * prod(eps_interferer)`, evaluated in the log
/// domain. Equals the expectation of the Bernoulli rule.
pub fn success_probability(intended_d: f64, interferer_ds: &[f64], model: &ErasureModel) -> f64 {
    let mut log_p = model.ln_survival(intended_d);
    for &d in interferer_ds {
        let le = model.ln_erasure(d);
        if le == f64::NEG_INFINITY {
            return 0.0; // an interferer is never erased
        }
        log_p += le;
    }
    log_p.exp()
}

/// Number of slot-attempts until the first success: a geometric draw with
/// mean `1/success_prob`. A zero success probability is a stalled link,
/// reported as an error rather than looping forever.
pub fn arq_attempts<R: Rng + ?Sized>(success_prob: f64, rng: &mut R) -> Result<u64> {
    if success_prob <= 0.0 {
        return Err(Error::StalledLink);
    }
    if success_prob >= 1.0 {
        return Ok(1);
    }
    let u: f64 = rng.gen();
    let attempts = ((1.0 - u).ln() / (1.0 - success_prob).ln()).ceil();
    Ok(attempts.max(1.0) as u64)
}
