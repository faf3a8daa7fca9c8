use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Distribution of the scalar draws fed to O and P sub-steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLaw {
    #[default]
    Gaussian,
    /// ±1 with probability 1/2 each.
    TwoPoint,
    /// ±√3 with probability 1/6 each, 0 with probability 2/3.
    ThreePoint,
}

impl NoiseLaw {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseLaw::Gaussian => rng.sample(StandardNormal),
            NoiseLaw::TwoPoint => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseLaw::ThreePoint => match rng.random_range(0u8..6) {
                0 => 3f64.sqrt(),
                1 => -(3f64.sqrt()),
                _ => 0.0,
            },
        }
    }
}

/// Supplier of unit-variance scalar draws, consumed in sub-step order and
/// component order within a sub-step.
pub trait NoiseSource {
    fn draw(&mut self) -> f64;
}

/// Draws from a [`NoiseLaw`] using an owned generator.
#[derive(Debug, Clone)]
pub struct RandomNoise<R> {
    pub rng: R,
    pub law: NoiseLaw,
}

impl<R: Rng> RandomNoise<R> {
    pub fn new(rng: R, law: NoiseLaw) -> Self {
        Self { rng, law }
    }
}

impl<R: Rng> NoiseSource for RandomNoise<R> {
    #[inline]
    fn draw(&mut self) -> f64 {
        self.law.sample(&mut self.rng)
    }
}

/// Replays a fixed sequence, then yields zeros.
#[derive(Debug, Clone, Default)]
pub struct FixedNoise {
    values: Vec<f64>,
    next: usize,
}

impl FixedNoise {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values, next: 0 }
    }

    /// Number of values consumed so far (including zeros past the end).
    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl NoiseSource for FixedNoise {
    fn draw(&mut self) -> f64 {
        let v = self.values.get(self.next).copied().unwrap_or(0.0);
        self.next += 1;
        v
    }
}

/// Always zero; turns every stochastic sub-step into its mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn draw(&mut self) -> f64 {
        0.0
    }
}

/// Generator for trajectory `k` of a run seeded with `seed`.
///
/// Each trajectory gets its own ChaCha stream, so results do not depend on
/// how trajectories are scheduled across threads.
pub fn trajectory_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}
