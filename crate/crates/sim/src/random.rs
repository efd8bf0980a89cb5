//! Seeded random instances for tests and the `--seed` option.

use irc_core::channel::{Gains, Noises, Powers};
use irc_core::discrete::{BiLevelFactorization, Conditional, SingleLevelFactorization};
use irc_core::ChannelInstance;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the closed unit disc.
pub fn unit_disc<R: Rng>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
}

/// Log-uniform on `[0.1, 10]`.
pub fn log_uniform<R: Rng>(rng: &mut R) -> f64 {
    10f64.powf(rng.gen_range(-1.0..=1.0))
}

fn budget<R: Rng>(rng: &mut R) -> (Powers, Noises) {
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

/// Complex gains on the unit disc, powers and noises log-uniform.
pub fn channel<R: Rng>(rng: &mut R) -> ChannelInstance {
    let g = Gains {
        h11: unit_disc(rng),
        h12: unit_disc(rng),
        h21: unit_disc(rng),
        h22: unit_disc(rng),
        h1r: unit_disc(rng),
        h2r: unit_disc(rng),
        hr1: unit_disc(rng),
        hr2: unit_disc(rng),
    };
    let (p, n) = budget(rng);
    ChannelInstance::new(g, p, n).expect("positive budget")
}

/// Real gains uniform on `[-1, 1]`, powers and noises log-uniform.
pub fn real_channel<R: Rng>(rng: &mut R) -> ChannelInstance {
    let mut g = [0.0; 8];
    g.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..=1.0));
    let (p, n) = budget(rng);
    ChannelInstance::new(Gains::real(g), p, n).expect("positive budget")
}

/// Mirror-identical complex gains, equal source powers and equal
/// destination noises.
pub fn symmetric_channel<R: Rng>(rng: &mut R) -> ChannelInstance {
    let (direct, cross, to_relay, from_relay) = (unit_disc(rng), unit_disc(rng), unit_disc(rng), unit_disc(rng));
    let (p, n) = (log_uniform(rng), log_uniform(rng));
    ChannelInstance::new(
        Gains {
            h11: direct,
            h22: direct,
            h12: cross,
            h21: cross,
            h1r: to_relay,
            h2r: to_relay,
            hr1: from_relay,
            hr2: from_relay,
        },
        Powers {
            p1: p,
            p2: p,
            pr: log_uniform(rng),
        },
        Noises {
            n1: n,
            n2: n,
            nr: log_uniform(rng),
        },
    )
    .expect("positive budget")
}

/// Probability vector of length `n`, with some zero entries.
pub fn pmf<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen::<f64>() + 1e-3 })
        .collect();
    if p.iter().all(|&x| x == 0.0) {
        p[0] = 1.0;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

pub fn conditional<R: Rng>(rng: &mut R, given: &[usize], outcome: &[usize]) -> Conditional {
    let rows: usize = given.iter().product();
    let len: usize = outcome.iter().product();
    let table = (0..rows).flat_map(|_| pmf(rng, len)).collect();
    Conditional::new(given.to_vec(), outcome.to_vec(), table).expect("normalised rows")
}

fn size<R: Rng>(rng: &mut R, max: usize) -> usize {
    rng.gen_range(1..=max)
}

/// Bi-level factorization with every alphabet of size at most `max`.
pub fn bi_level<R: Rng>(rng: &mut R, max: usize) -> BiLevelFactorization {
    let s: Vec<usize> = (0..10).map(|_| size(rng, max)).collect();
    let (x1, x2, u1, u2, xr, y1, y2, yr, w1, w2) = (s[0], s[1], s[2], s[3], s[4], s[5], s[6], s[7], s[8], s[9]);
    BiLevelFactorization::new(
        pmf(rng, x1),
        pmf(rng, x2),
        pmf(rng, u1),
        pmf(rng, u2),
        conditional(rng, &[u1, u2], &[xr]),
        conditional(rng, &[x1, x2, xr], &[y1, y2, yr]),
        conditional(rng, &[yr, u1], &[w1]),
        conditional(rng, &[yr, u2], &[w2]),
    )
    .expect("consistent shapes")
}

/// Single-level factorization with every alphabet of size at most `max`.
pub fn single_level<R: Rng>(rng: &mut R, max: usize) -> SingleLevelFactorization {
    let s: Vec<usize> = (0..7).map(|_| size(rng, max)).collect();
    let (x1, x2, xr, y1, y2, yr, w) = (s[0], s[1], s[2], s[3], s[4], s[5], s[6]);
    SingleLevelFactorization::new(
        pmf(rng, x1),
        pmf(rng, x2),
        pmf(rng, xr),
        conditional(rng, &[x1, x2, xr], &[y1, y2, yr]),
        conditional(rng, &[yr, xr], &[w]),
    )
    .expect("consistent shapes")
}
