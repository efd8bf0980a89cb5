#![allow(dead_code)]

use irc_core::channel::{ChannelInstance, Gains, Noises, Powers};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the closed unit disc.
pub fn unit_disc<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let t = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, t)
}

/// Log-uniform on [0.1, 10].
pub fn log_uniform<R: Rng>(rng: &mut R) -> f64 {
    10f64.powf(rng.gen_range(-1.0..=1.0))
}

pub fn random_gains<R: Rng>(rng: &mut R) -> Gains {
    Gains {
        h11: unit_disc(rng),
        h12: unit_disc(rng),
        h21: unit_disc(rng),
        h22: unit_disc(rng),
        h1r: unit_disc(rng),
        h2r: unit_disc(rng),
        hr1: unit_disc(rng),
        hr2: unit_disc(rng),
    }
}

pub fn random_real_gains<R: Rng>(rng: &mut R) -> Gains {
    let mut g = [0.0; 8];
    for x in g.iter_mut() {
        *x = rng.gen_range(-1.0..=1.0);
    }
    Gains::real(g)
}

pub fn random_budget<R: Rng>(rng: &mut R) -> (Powers, Noises) {
    (
        Powers {
            p1: log_uniform(rng),
            p2: log_uniform(rng),
            pr: log_uniform(rng),
        },
        Noises {
            n1: log_uniform(rng),
            n2: log_uniform(rng),
            nr: log_uniform(rng),
        },
    )
}

pub fn random_channel<R: Rng>(rng: &mut R) -> ChannelInstance {
    let g = random_gains(rng);
    let (p, n) = random_budget(rng);
    ChannelInstance::new(g, p, n).unwrap()
}

pub fn random_real_channel<R: Rng>(rng: &mut R) -> ChannelInstance {
    let g = random_real_gains(rng);
    let (p, n) = random_budget(rng);
    ChannelInstance::new(g, p, n).unwrap()
}

pub fn unit_budget() -> (Powers, Noises) {
    (
        Powers { p1: 1.0, p2: 1.0, pr: 1.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
}
