//! Decode-and-forward (DF).
//!
//! Source `i` splits its power: a fraction `tau_i` goes to a cooperation
//! signal that is coherent with the relay's forwarding of user `i`, which
//! gets a fraction `nu_i` of the relay power. The relay must decode, so each
//! rate is capped by the source-relay link:
//!
//! ```text
//! R_i = min{ C(|h_ir|^2 (1 - tau_i) P_i / N_r),
//!            C((|h_ii|^2 P_i + |h_ri|^2 nu_i P_r + 2 Re(h_ii h_ri*) sqrt(tau_i P_i nu_i P_r))
//!              / (|h_ji|^2 P_j + |h_ri|^2 nu_j P_r + 2 Re(h_ji h_ri*) sqrt(tau_j P_j nu_j P_r) + N_i)) }
//! ```

use crate::channel::{cap, ChannelInstance, RatePair, User};
use crate::error::{Error, Result};

/// Default grid resolution per axis for the DF searches.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// Cooperation degrees and relay power split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfParams {
    pub tau1: f64,
    pub tau2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

fn unit_interval(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: v })
    }
}

/// Slack allowed on `nu1 + nu2 <= 1` for grid points like `0.3 + 0.7`.
const SIMPLEX_SLACK: f64 = 1e-12;

impl DfParams {
    pub fn new(tau1: f64, tau2: f64, nu1: f64, nu2: f64) -> Result<Self> {
        unit_interval("tau1", tau1)?;
        unit_interval("tau2", tau2)?;
        unit_interval("nu1", nu1)?;
        unit_interval("nu2", nu2)?;
        if nu1 + nu2 > 1.0 + SIMPLEX_SLACK {
            return Err(Error::InvalidParams("nu1 + nu2 exceeds 1"));
        }
        Ok(DfParams {
            tau1,
            tau2,
            nu1,
            nu2,
        })
    }

    pub fn tau(&self, user: User) -> f64 {
        match user {
            User::One => self.tau1,
            User::Two => self.tau2,
        }
    }

    pub fn nu(&self, user: User) -> f64 {
        match user {
            User::One => self.nu1,
            User::Two => self.nu2,
        }
    }

    fn from_array(x: [f64; 4]) -> Self {
        DfParams {
            tau1: x[0],
            tau2: x[1],
            nu1: x[2],
            nu2: x[3],
        }
    }
}

/// Rate of `user` under DF.
pub fn df_rate(channel: &ChannelInstance, params: &DfParams, user: User) -> f64 {
    let j = user.other();
    let pr = channel.relay_power();
    let hri = channel.from_relay(user);
    let (pi, pj) = (channel.power(user), channel.power(j));
    let (tau_i, tau_j) = (params.tau(user), params.tau(j));
    let (nu_i, nu_j) = (params.nu(user), params.nu(j));

    let relay_decode = cap(channel.to_relay(user).norm_sqr() * (1.0 - tau_i) * pi
        / channel.relay_noise());
    let useful = channel.direct(user).norm_sqr() * pi
        + hri.norm_sqr() * nu_i * pr
        + 2.0 * (channel.direct(user) * hri.conj()).re * libm::sqrt(tau_i * pi * nu_i * pr);
    let interference = channel.cross(user).norm_sqr() * pj
        + hri.norm_sqr() * nu_j * pr
        + 2.0 * (channel.cross(user) * hri.conj()).re * libm::sqrt(tau_j * pj * nu_j * pr)
        + channel.noise(user);
    // A destructive cooperation phase can push the useful power below zero
    // only through rounding; clamp so the capacity stays defined.
    let destination = cap((useful / interference).max(0.0));
    relay_decode.min(destination)
}

/// Both users' DF rates.
pub fn df_rates(channel: &ChannelInstance, params: &DfParams) -> RatePair {
    RatePair::new(
        df_rate(channel, params, User::One),
        df_rate(channel, params, User::Two),
    )
}

fn grid(points: usize) -> impl Iterator<Item = f64> + Clone {
    let last = (points - 1) as f64;
    (0..points).map(move |k| k as f64 / last)
}

fn check_grid(points: usize) -> Result<()> {
    if points < 2 {
        Err(Error::InvalidParams("grid needs at least two points per axis"))
    } else {
        Ok(())
    }
}

/// One coordinate-descent pass around `start`: each coordinate in `free` is
/// scanned over `[x - step, x + step]` in steps of `step / 10`, the others
/// held fixed, keeping the first strictly better feasible point.
fn refine(
    start: [f64; 4],
    free: &[usize],
    step: f64,
    mut objective: impl FnMut([f64; 4]) -> f64,
) -> ([f64; 4], f64) {
    let mut best = start;
    let mut best_val = objective(best);
    for &axis in free {
        let centre = best[axis];
        for k in -10i32..=10 {
            let mut x = best;
            x[axis] = (centre + f64::from(k) * step / 10.0).clamp(0.0, 1.0);
            if x[2] + x[3] > 1.0 + SIMPLEX_SLACK {
                continue;
            }
            let v = objective(x);
            if v > best_val {
                best_val = v;
                best = x;
            }
        }
    }
    (best, best_val)
}

/// Sum-rate-maximising DF parameters over a uniform grid of `(tau1, tau2)`
/// in `[0,1]^2` times the simplex `nu1 + nu2 <= 1`, followed by one
/// refinement pass. Ties keep the first point in grid order.
pub fn df_sum_rate_search(
    channel: &ChannelInstance,
    grid_points: usize,
) -> Result<(DfParams, RatePair)> {
    check_grid(grid_points)?;
    let last = grid_points - 1;
    let sum = |x: [f64; 4]| df_rates(channel, &DfParams::from_array(x)).sum();
    let mut best = [0.0; 4];
    let mut best_val = f64::NEG_INFINITY;
    for k1 in 0..=last {
        for k2 in 0..=last - k1 {
            let nu1 = k1 as f64 / last as f64;
            let nu2 = k2 as f64 / last as f64;
            for t1 in grid(grid_points) {
                for t2 in grid(grid_points) {
                    let x = [t1, t2, nu1, nu2];
                    let v = sum(x);
                    if v > best_val {
                        best_val = v;
                        best = x;
                    }
                }
            }
        }
    }
    let (x, _) = refine(best, &[0, 1, 2, 3], 1.0 / last as f64, sum);
    let params = DfParams::from_array(x);
    Ok((params, df_rates(channel, &params)))
}

/// Sum-rate-maximising cooperation degrees for a fixed relay power split.
pub fn df_sum_rate_search_fixed_nu(
    channel: &ChannelInstance,
    nu: (f64, f64),
    grid_points: usize,
) -> Result<(DfParams, RatePair)> {
    check_grid(grid_points)?;
    DfParams::new(0.0, 0.0, nu.0, nu.1)?;
    let sum = |x: [f64; 4]| df_rates(channel, &DfParams::from_array(x)).sum();
    let mut best = [0.0, 0.0, nu.0, nu.1];
    let mut best_val = f64::NEG_INFINITY;
    for t1 in grid(grid_points) {
        for t2 in grid(grid_points) {
            let x = [t1, t2, nu.0, nu.1];
            let v = sum(x);
            if v > best_val {
                best_val = v;
                best = x;
            }
        }
    }
    let (x, _) = refine(best, &[0, 1], 1.0 / (grid_points - 1) as f64, sum);
    let params = DfParams::from_array(x);
    Ok((params, df_rates(channel, &params)))
}

/// Cooperation degree maximising `user`'s own rate when the other source
/// uses `other_tau` and the relay split is `nu`.
pub fn df_best_response(
    channel: &ChannelInstance,
    other_tau: f64,
    user: User,
    nu: (f64, f64),
    grid_points: usize,
) -> Result<f64> {
    check_grid(grid_points)?;
    unit_interval("other_tau", other_tau)?;
    DfParams::new(0.0, 0.0, nu.0, nu.1)?;
    let own = match user {
        User::One => 0,
        User::Two => 1,
    };
    let mut base = [other_tau, other_tau, nu.0, nu.1];
    let rate = |x: [f64; 4]| df_rate(channel, &DfParams::from_array(x), user);
    let mut best_val = f64::NEG_INFINITY;
    let mut best = base;
    for t in grid(grid_points) {
        base[own] = t;
        let v = rate(base);
        if v > best_val {
            best_val = v;
            best = base;
        }
    }
    let (x, _) = refine(best, &[own], 1.0 / (grid_points - 1) as f64, rate);
    Ok(x[own])
}
