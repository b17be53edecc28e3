//! Deterministic random-number plumbing.
//!
//! Every randomized check derives its stream from a label and a user seed so
//! reports are reproducible across runs and platforms.

use crate::jet::{C, Jet, JetShape};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// ChaCha stream keyed by a static label and a run seed.
pub fn rng_for(label: &str, seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (i, b) in label.bytes().enumerate() {
        key[i % 24] ^= b.rotate_left((i / 24) as u32);
    }
    key[24..32].copy_from_slice(&seed.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform sample from the closed complex unit disc.
pub fn uniform_disc(rng: &mut impl Rng) -> C {
    let r = rng.gen::<f64>().sqrt();
    let th = rng.gen::<f64>() * std::f64::consts::TAU;
    C::new(r * th.cos(), r * th.sin())
}

/// Jet with every coefficient drawn from the scaled unit disc.
pub fn uniform_disc_jet(rng: &mut impl Rng, shape: JetShape, scale: f64) -> Jet {
    let mut j = Jet::zeros(shape);
    for c in j.coeffs_mut() {
        *c = uniform_disc(rng) * scale;
    }
    j
}

/// Real-valued jet (conjugation-symmetric coefficients) from the unit disc.
pub fn uniform_real_jet(rng: &mut impl Rng, shape: JetShape, scale: f64) -> Jet {
    uniform_disc_jet(rng, shape, scale).realified()
}

/// Jet with dyadic-rational coefficients (multiples of 1/16 in [-1, 1]).
///
/// Sums and products of such coefficients are exact in f64 well past the
/// depths used here, so algebraic identities can be asserted with residual
/// exactly zero instead of a rounding tolerance.
pub fn dyadic_jet(rng: &mut impl Rng, shape: JetShape) -> Jet {
    let mut j = Jet::zeros(shape);
    for c in j.coeffs_mut() {
        let re = rng.gen_range(-16i32..=16) as f64 / 16.0;
        let im = rng.gen_range(-16i32..=16) as f64 / 16.0;
        *c = C::new(re, im);
    }
    j
}
