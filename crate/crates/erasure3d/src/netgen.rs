//! Random network instance generation and geometry.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const EXPONENT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMode {
    /// Fixed unit node density; the cuboid grows as `n^lambda x n^mu x n^nu`.
    Extended,
    /// Unit volume; distances are rescaled by `n^(1/3)` in the channel.
    Dense,
}

/// Shape parameters of a random network draw.
///
/// The side exponents must satisfy `lambda + mu + nu = 1`. A flat
/// configuration with `nu = 0` (constant height) is accepted only when
/// `allow_flat` is set, since the vertical highway machinery degenerates
/// to a 2D protocol there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n: u64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    #[serde(rename = "mode")]
    pub density_mode: DensityMode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_flat: bool,
}

impl NetworkConfig {
    pub fn cubic(n: u64, seed: u64) -> Self {
        NetworkConfig {
            n,
            lambda: 1.0 / 3.0,
            mu: 1.0 / 3.0,
            nu: 1.0 / 3.0,
            density_mode: DensityMode::Extended,
            seed,
            allow_flat: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("node count must be positive".into()));
        }
        let sum = self.lambda + self.mu + self.nu;
        if (sum - 1.0).abs() > EXPONENT_SUM_TOL {
            return Err(Error::InvalidConfig(format!(
                "exponents must sum to 1 (lambda + mu + nu = {sum})"
            )));
        }
        if self.lambda <= 0.0 || self.mu <= 0.0 || self.nu < 0.0 {
            return Err(Error::InvalidConfig(
                "exponents must be positive (nu = 0 only in flat mode)".into(),
            ));
        }
        if self.nu == 0.0 && !self.allow_flat {
            return Err(Error::InvalidConfig(
                "nu = 0 requires the explicit flat-mode flag".into(),
            ));
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.nu == 0.0
    }

    /// Cuboid side lengths in raw coordinates.
    pub fn extent(&self) -> [f64; 3] {
        let n = self.n as f64;
        match self.density_mode {
            DensityMode::Extended => [
                n.powf(self.lambda),
                n.powf(self.mu),
                n.powf(self.nu),
            ],
            DensityMode::Dense => [1.0, 1.0, 1.0],
        }
    }

    /// Distance scale factor applied to raw coordinates: 1 in extended
    /// mode, `n^(1/3)` in dense mode.
    pub fn distance_scale(&self) -> f64 {
        match self.density_mode {
            DensityMode::Extended => 1.0,
            DensityMode::Dense => (self.n as f64).cbrt(),
        }
    }

    /// Cuboid side lengths after distance rescaling. All tessellation and
    /// channel geometry operates on this scale.
    pub fn effective_extent(&self) -> [f64; 3] {
        let s = self.distance_scale();
        let e = self.extent();
        [e[0] * s, e[1] * s, e[2] * s]
    }
}

/// A placed network: node coordinates plus the source -> destination
/// pairing (a permutation; `pairing[i]` is the destination of source `i`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkInstance {
    #[serde(flatten)]
    pub config: NetworkConfig,
    pub positions: Vec<[f64; 3]>,
    pub pairing: Vec<u32>,
}

impl NetworkInstance {
    pub fn effective_position(&self, i: usize) -> [f64; 3] {
        let s = self.config.distance_scale();
        let p = self.positions[i];
        [p[0] * s, p[1] * s, p[2] * s]
    }

    pub fn effective_positions(&self) -> Vec<[f64; 3]> {
        (0..self.positions.len())
            .map(|i| self.effective_position(i))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("instance serializes")
    }
}

/// Draws node positions i.i.d. uniform over the cuboid and a uniform
/// random pairing permutation. Deterministic given `config.seed`;
/// self-pairs are allowed and carry zero traffic.
pub fn generate(config: &NetworkConfig) -> Result<NetworkInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let extent = config.extent();
    let n = config.n as usize;

    let mut positions = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.gen::<f64>() * extent[0];
        let y = rng.gen::<f64>() * extent[1];
        let z = rng.gen::<f64>() * extent[2];
        positions.push([x, y, z]);
    }

    let mut pairing: Vec<u32> = (0..n as u32).collect();
    pairing.shuffle(&mut rng);

    Ok(NetworkInstance {
        config: config.clone(),
        positions,
        pairing,
    })
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Rescales a raw distance for the channel: identity in extended mode,
/// `d * n^(1/3)` in dense mode.
pub fn effective_distance(d: f64, config: &NetworkConfig) -> f64 {
    d * config.distance_scale()
}
