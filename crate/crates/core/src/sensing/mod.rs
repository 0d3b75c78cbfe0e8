//! Compressive measurements `y = R Phi x + n`.
//!
//! `Phi` is an orthonormal fast transform and `R` keeps a random subset of
//! its outputs. Randomness comes from ChaCha20 seeded with the operator seed
//! (stream 0: scrambling, stream 1: sampling mask) or the noise seed
//! (stream 2).
//!
//! In `ComplexNoiselet` mode each kept coefficient contributes its real and
//! imaginary part, so there are `2 * round(p n)` real measurements. The
//! stacked real operator satisfies `A^T A = I` at full sampling, but its rows
//! are not orthonormal: `forward(adjoint(y)) = y` and the pseudo-inverse
//! identity only hold for `ScrambledHadamard`.

mod fast;
mod observation;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagegrid::ImageGrid;

pub use fast::{fwht, noiselet, noiselet_adjoint};
pub use observation::{
    read_observation, sidecar_path, write_observation, ObservationFile, ObservationHeader,
};

pub const SCRAMBLE_STREAM: u64 = 0;
pub const MASK_STREAM: u64 = 1;
pub const NOISE_STREAM: u64 = 2;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    ScrambledHadamard,
    ComplexNoiselet,
}

impl MeasurementMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "hadamard" | "scrambled_hadamard" => Ok(Self::ScrambledHadamard),
            "noiselet" | "complex_noiselet" => Ok(Self::ComplexNoiselet),
            other => Err(Error::InvalidArgument(format!(
                "unknown measurement mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    n: usize,
    mode: MeasurementMode,
    seed: u64,
    rate: f64,
    sample_indices: Vec<usize>,
    permutation: Vec<usize>,
    signs: Vec<f64>,
}

pub fn sample_count(n: usize, rate: f64) -> usize {
    (rate * n as f64).round() as usize
}

impl MeasurementOperator {
    pub fn new(n: usize, mode: MeasurementMode, seed: u64, rate: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidSize(n, 2));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sampling rate {rate} is outside (0, 1]"
            )));
        }
        let count = sample_count(n, rate);
        if count == 0 {
            return Err(Error::InvalidArgument(format!(
                "sampling rate {rate} keeps no measurements of {n}"
            )));
        }

        let (permutation, signs) = match mode {
            MeasurementMode::ScrambledHadamard => {
                let mut rng = stream_rng(seed, SCRAMBLE_STREAM);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let signs = (0..n)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                    .collect();
                (perm, signs)
            }
            MeasurementMode::ComplexNoiselet => (Vec::new(), Vec::new()),
        };

        let mut rng = stream_rng(seed, MASK_STREAM);
        let mut sample_indices = rand::seq::index::sample(&mut rng, n, count).into_vec();
        sample_indices.sort_unstable();

        Ok(MeasurementOperator {
            n,
            mode,
            seed,
            rate,
            sample_indices,
            permutation,
            signs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> MeasurementMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sample_indices(&self) -> &[usize] {
        &self.sample_indices
    }

    /// Length of `y`.
    pub fn measurement_count(&self) -> usize {
        match self.mode {
            MeasurementMode::ScrambledHadamard => self.sample_indices.len(),
            MeasurementMode::ComplexNoiselet => 2 * self.sample_indices.len(),
        }
    }

    /// Full orthonormal transform. Complex mode returns `[Re; Im]` (length `2 n`).
    pub fn full_transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.n, "signal")?;
        Ok(self.full_transform_unchecked(x))
    }

    fn full_transform_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        match self.mode {
            MeasurementMode::ScrambledHadamard => {
                let mut z: Vec<f64> = (0..n)
                    .map(|i| self.signs[i] * x[self.permutation[i]])
                    .collect();
                fwht(&mut z);
                let s = 1.0 / (n as f64).sqrt();
                z.iter_mut().for_each(|v| *v *= s);
                z
            }
            MeasurementMode::ComplexNoiselet => {
                let mut re = x.to_vec();
                let mut im = vec![0.0; n];
                noiselet(&mut re, &mut im);
                re.extend(im);
                re
            }
        }
    }

    /// Transpose of [`full_transform`](Self::full_transform).
    pub fn full_adjoint(&self, c: &[f64]) -> Result<Vec<f64>> {
        let len = match self.mode {
            MeasurementMode::ScrambledHadamard => self.n,
            MeasurementMode::ComplexNoiselet => 2 * self.n,
        };
        self.check_len(c.len(), len, "transform vector")?;
        Ok(self.full_adjoint_unchecked(c))
    }

    fn full_adjoint_unchecked(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        match self.mode {
            MeasurementMode::ScrambledHadamard => {
                let mut w = c.to_vec();
                fwht(&mut w);
                let s = 1.0 / (n as f64).sqrt();
                let mut x = vec![0.0; n];
                for i in 0..n {
                    x[self.permutation[i]] = self.signs[i] * w[i] * s;
                }
                x
            }
            MeasurementMode::ComplexNoiselet => {
                // Real input: x = Re(U^H (a + i b)).
                let mut re = c[..n].to_vec();
                let mut im = c[n..].to_vec();
                noiselet_adjoint(&mut re, &mut im);
                re
            }
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.n, "signal")?;
        let mut y = vec![0.0; self.measurement_count()];
        self.forward_into(x, &mut y);
        Ok(y)
    }

    /// `y = R Phi x` without length checks beyond debug assertions.
    pub fn forward_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(y.len(), self.measurement_count());
        let full = self.full_transform_unchecked(x);
        let k = self.sample_indices.len();
        for (j, &i) in self.sample_indices.iter().enumerate() {
            y[j] = full[i];
            if self.mode == MeasurementMode::ComplexNoiselet {
                y[k + j] = full[self.n + i];
            }
        }
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len(), self.measurement_count(), "measurement")?;
        let mut x = vec![0.0; self.n];
        self.adjoint_into(y, &mut x);
        Ok(x)
    }

    /// `Phi^T R^T y`.
    pub fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        let full_len = match self.mode {
            MeasurementMode::ScrambledHadamard => self.n,
            MeasurementMode::ComplexNoiselet => 2 * self.n,
        };
        let mut full = vec![0.0; full_len];
        let k = self.sample_indices.len();
        for (j, &i) in self.sample_indices.iter().enumerate() {
            full[i] = y[j];
            if self.mode == MeasurementMode::ComplexNoiselet {
                full[self.n + i] = y[k + j];
            }
        }
        x.copy_from_slice(&self.full_adjoint_unchecked(&full));
    }

    /// `Phi^T R^T y`, unclipped.
    pub fn pseudo_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.adjoint(y)
    }

    /// Pseudo-inverse reshaped to an image and clipped into `[0, 1]`.
    pub fn pseudo_inverse_estimate(
        &self,
        y: &[f64],
        height: usize,
        width: usize,
    ) -> Result<ImageGrid> {
        if height * width != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{height}x{width} image does not match operator length {}",
                self.n
            )));
        }
        ImageGrid::from_clipped(height, width, self.pseudo_inverse(y)?)
    }

    fn check_len(&self, got: usize, expected: usize, what: &str) -> Result<()> {
        if got != expected {
            return Err(Error::DimensionMismatch(format!(
                "{what} length {got}, expected {expected}"
            )));
        }
        Ok(())
    }
}

/// Noisy measurement vector and the parameters that produced the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub y: Vec<f64>,
    pub sigma: f64,
    pub seed_noise: u64,
}

impl Observation {
    /// Default fidelity radius `sigma * sqrt(len)`.
    pub fn default_epsilon(&self) -> f64 {
        self.sigma * (self.y.len() as f64).sqrt()
    }
}

pub fn add_noise(y: &[f64], sigma: f64, seed_noise: u64) -> Result<Observation> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma {sigma} must be non-negative"
        )));
    }
    let mut noisy = y.to_vec();
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).expect("valid sigma");
        let mut rng = stream_rng(seed_noise, NOISE_STREAM);
        for v in &mut noisy {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(Observation {
        y: noisy,
        sigma,
        seed_noise,
    })
}
