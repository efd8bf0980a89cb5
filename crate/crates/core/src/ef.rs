//! Estimate-and-forward (EF) with Wyner-Ziv compression at the relay.
//!
//! The relay quantises its observation as `Yr_hat = Yr + Z_wz` with Gaussian
//! compression noise of variance `N_wz` and forwards the description.
//!
//! * Single-level compression: one description, decodable by both
//!   destinations. Its fineness is limited by the weaker relay-destination
//!   link through the bottleneck rate `R0`.
//! * Bi-level compression: two descriptions superposed at the relay with
//!   power shares `nu1 P_r` and `nu2 P_r`. Depending on the link qualities
//!   one destination may decode the other's description too and strip the
//!   relay interference ([`BiScenario`]).
//!
//! Every rate is the capacity of a two-branch SINR: the direct observation,
//! with the interferer partly resolved through the relay's description, plus
//! the compressed relay branch.

use crate::channel::{cap, ChannelInstance, RatePair, User};
use crate::error::{Error, Result};

/// Relative slack when checking a compression noise against its lower
/// bound, so that the bound itself passes after rounding.
const BOUND_SLACK: f64 = 1e-12;

/// Quantities shared by the compression-noise bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfDerived {
    /// Relay receive power `|h1r|^2 P1 + |h2r|^2 P2 + N_r`.
    pub a: f64,
    /// Modulus of the covariance between `Yr` and the source part of `Y1`,
    /// `|h1r h11* P1 + h2r h21* P2|`.
    pub a1: f64,
    /// Same for `Y2`: `|h1r h12* P1 + h2r h22* P2|`.
    pub a2: f64,
    /// Residual variance of `Yr` after linear MMSE estimation from the
    /// source part of `Y1`.
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl EfDerived {
    pub fn new(channel: &ChannelInstance) -> Self {
        let a = channel.relay_receive_power();
        let a1 = cross_covariance(channel, User::One);
        let a2 = cross_covariance(channel, User::Two);
        let residual = |user: User, c: f64| {
            // Cauchy-Schwarz keeps this nonnegative up to rounding.
            (a - c * c / channel.destination_receive_power(user)).max(0.0)
        };
        EfDerived {
            a,
            a1,
            a2,
            sigma1_sq: residual(User::One, a1),
            sigma2_sq: residual(User::Two, a2),
        }
    }

    pub fn cross(&self, user: User) -> f64 {
        match user {
            User::One => self.a1,
            User::Two => self.a2,
        }
    }

    pub fn sigma_sq(&self, user: User) -> f64 {
        match user {
            User::One => self.sigma1_sq,
            User::Two => self.sigma2_sq,
        }
    }
}

fn cross_covariance(channel: &ChannelInstance, user: User) -> f64 {
    let j = user.other();
    (channel.to_relay(user) * channel.direct(user).conj() * channel.power(user)
        + channel.to_relay(j) * channel.cross(user).conj() * channel.power(j))
    .norm()
}

/// Which destination, if any, can decode the other's relay description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiScenario {
    /// `D1` decodes both descriptions and cancels the relay interference.
    D1Better,
    /// `D2` decodes both descriptions.
    D2Better,
    /// Both destinations suffer the other description as interference.
    Neither,
}

impl BiScenario {
    pub fn tag(&self) -> &'static str {
        match self {
            BiScenario::D1Better => "D1_better",
            BiScenario::D2Better => "D2_better",
            BiScenario::Neither => "neither",
        }
    }

    pub fn from_tag(tag: &str) -> Option<BiScenario> {
        match tag {
            "D1_better" => Some(BiScenario::D1Better),
            "D2_better" => Some(BiScenario::D2Better),
            "neither" => Some(BiScenario::Neither),
            _ => None,
        }
    }

    /// Relay interference `|h_ri|^2 nu_j P_r` seen by `user` in this
    /// scenario, zero when the user cancels it.
    fn relay_interference(&self, channel: &ChannelInstance, nu: (f64, f64), user: User) -> f64 {
        let cancels = matches!(
            (self, user),
            (BiScenario::D1Better, User::One) | (BiScenario::D2Better, User::Two)
        );
        if cancels {
            0.0
        } else {
            let nu_other = match user {
                User::One => nu.1,
                User::Two => nu.0,
            };
            channel.from_relay(user).norm_sqr() * nu_other * channel.relay_power()
        }
    }
}

/// Bi-level control knobs: relay power split and the two compression noise
/// variances. An infinite noise switches that user's relay branch off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfBiParams {
    pub nu1: f64,
    pub nu2: f64,
    pub nwz1: f64,
    pub nwz2: f64,
}

impl EfBiParams {
    fn nu(&self) -> (f64, f64) {
        (self.nu1, self.nu2)
    }

    fn nwz(&self, user: User) -> f64 {
        match user {
            User::One => self.nwz1,
            User::Two => self.nwz2,
        }
    }
}

fn check_split(nu1: f64, nu2: f64) -> Result<()> {
    for (what, v) in [("nu1", nu1), ("nu2", nu2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain { what, value: v });
        }
    }
    if nu1 + nu2 > 1.0 + 1e-12 {
        return Err(Error::InvalidParams("nu1 + nu2 exceeds 1"));
    }
    Ok(())
}

/// Decide the bi-level scenario for a relay power split.
///
/// Condition 1 compares the SINR of user 2's description (user 1's treated
/// as noise) at `D1` and at `D2`; equality selects [`BiScenario::D1Better`].
/// Condition 2 is the mirror image and is checked only if condition 1 fails.
pub fn ef_bi_scenario(channel: &ChannelInstance, nu1: f64, nu2: f64) -> Result<BiScenario> {
    check_split(nu1, nu2)?;
    let pr = channel.relay_power();
    let b1 = channel.destination_receive_power(User::One);
    let b2 = channel.destination_receive_power(User::Two);
    let g1 = channel.from_relay(User::One).norm_sqr();
    let g2 = channel.from_relay(User::Two).norm_sqr();
    let cond1 = g1 * nu2 * pr / (b1 + g1 * nu1 * pr) >= g2 * nu2 * pr / (b2 + g2 * nu1 * pr);
    if cond1 {
        return Ok(BiScenario::D1Better);
    }
    let cond2 = g2 * nu1 * pr / (b2 + g2 * nu2 * pr) >= g1 * nu1 * pr / (b1 + g1 * nu2 * pr);
    Ok(if cond2 {
        BiScenario::D2Better
    } else {
        BiScenario::Neither
    })
}

/// Smallest admissible compression noises `(nwz1, nwz2)` for a power split
/// and scenario:
///
/// ```text
/// nwz_k >= ((B_k + I_k) A - A_k^2) / (|h_rk|^2 nu_k P_r)
/// ```
///
/// with `B_k` the source-only receive power at `D_k` and `I_k` the relay
/// interference it suffers in the scenario.
pub fn ef_bi_min_noise(
    channel: &ChannelInstance,
    nu1: f64,
    nu2: f64,
    scenario: BiScenario,
) -> Result<(f64, f64)> {
    check_split(nu1, nu2)?;
    let d = EfDerived::new(channel);
    let bound = |user: User, nu_own: f64| -> Result<f64> {
        let useful = channel.from_relay(user).norm_sqr() * nu_own * channel.relay_power();
        if useful <= 0.0 {
            return Err(Error::Infeasible(match user {
                User::One => "no relay power reaches D1 (nu1, h_r1 or P_r is zero)",
                User::Two => "no relay power reaches D2 (nu2, h_r2 or P_r is zero)",
            }));
        }
        let interf = scenario.relay_interference(channel, (nu1, nu2), user);
        let c = d.cross(user);
        let num = (channel.destination_receive_power(user) + interf) * d.a - c * c;
        Ok(num.max(0.0) / useful)
    };
    Ok((bound(User::One, nu1)?, bound(User::Two, nu2)?))
}

/// Two-branch EF rate of `user` with relay interference `interf` and
/// compression noise `nwz` (possibly infinite).
fn two_branch_rate(channel: &ChannelInstance, user: User, interf: f64, nwz: f64) -> f64 {
    let j = user.other();
    let (pi, pj) = (channel.power(user), channel.power(j));
    let ni = channel.noise(user);
    let nr = channel.relay_noise();
    let hji = channel.cross(user).norm_sqr();
    let hjr = channel.to_relay(j).norm_sqr();
    let direct_useful = channel.direct(user).norm_sqr() * pi;
    if nwz.is_infinite() {
        return cap(direct_useful / (ni + interf + hji * pj));
    }
    let q = nr + nwz;
    let direct = direct_useful / (ni + interf + hji * pj * q / (hjr * pj + q));
    let relayed = channel.to_relay(user).norm_sqr() * pi
        / (q + hjr * pj * (interf + ni) / (hji * pj + interf + ni));
    cap(direct + relayed)
}

fn check_noise(bound_name: &'static str, value: f64, required: f64) -> Result<()> {
    if value.is_nan() || value < required * (1.0 - BOUND_SLACK) {
        Err(Error::ConstraintViolated {
            bound: bound_name,
            value,
            required,
        })
    } else {
        Ok(())
    }
}

/// Bi-level EF rate pair for the given scenario.
///
/// Fails with [`Error::ConstraintViolated`] if a compression noise is below
/// its scenario bound. A user whose bound is infeasible (zero power share)
/// must use an infinite noise.
pub fn ef_bi_rate(
    channel: &ChannelInstance,
    params: &EfBiParams,
    scenario: BiScenario,
) -> Result<RatePair> {
    let (nu1, nu2) = params.nu();
    check_split(nu1, nu2)?;
    let d = EfDerived::new(channel);
    let pr = channel.relay_power();
    for (user, name) in [(User::One, "nwz1 lower bound"), (User::Two, "nwz2 lower bound")] {
        let nwz = params.nwz(user);
        if nwz.is_infinite() && nwz > 0.0 {
            continue;
        }
        let nu_own = match user {
            User::One => nu1,
            User::Two => nu2,
        };
        let useful = channel.from_relay(user).norm_sqr() * nu_own * pr;
        if useful <= 0.0 {
            return Err(Error::ConstraintViolated {
                bound: name,
                value: nwz,
                required: f64::INFINITY,
            });
        }
        let interf = scenario.relay_interference(channel, (nu1, nu2), user);
        let c = d.cross(user);
        let required =
            ((channel.destination_receive_power(user) + interf) * d.a - c * c).max(0.0) / useful;
        check_noise(name, nwz, required)?;
    }
    Ok(RatePair::new(
        two_branch_rate(
            channel,
            User::One,
            scenario.relay_interference(channel, (nu1, nu2), User::One),
            params.nwz1,
        ),
        two_branch_rate(
            channel,
            User::Two,
            scenario.relay_interference(channel, (nu1, nu2), User::Two),
            params.nwz2,
        ),
    ))
}

/// Bi-level rates at the minimal admissible noises for a power split, with
/// the scenario decided by [`ef_bi_scenario`].
pub fn ef_bi_rate_at_min_noise(
    channel: &ChannelInstance,
    nu1: f64,
    nu2: f64,
) -> Result<(EfBiParams, BiScenario, RatePair)> {
    let scenario = ef_bi_scenario(channel, nu1, nu2)?;
    let (nwz1, nwz2) = ef_bi_min_noise(channel, nu1, nu2, scenario)?;
    let params = EfBiParams {
        nu1,
        nu2,
        nwz1,
        nwz2,
    };
    let rates = ef_bi_rate(channel, &params, scenario)?;
    Ok((params, scenario, rates))
}

/// Sum-rate-maximising bi-level configuration over a uniform grid of the
/// simplex `nu1 + nu2 <= 1`, with compression noises at their minimal
/// admissible values.
///
/// Cells with a zero share are infeasible and skipped. If no cell is
/// feasible the relay-off point (`nu = 0`, infinite noises) is returned.
/// Ties keep the first cell in grid order.
pub fn ef_bi_sum_rate_search(
    channel: &ChannelInstance,
    grid_points: usize,
) -> Result<(EfBiParams, BiScenario, RatePair)> {
    if grid_points < 2 {
        return Err(Error::InvalidParams("grid needs at least two points per axis"));
    }
    let last = grid_points - 1;
    let mut best: Option<(EfBiParams, BiScenario, RatePair)> = None;
    for k1 in 1..last {
        for k2 in 1..=last - k1 {
            let nu1 = k1 as f64 / last as f64;
            let nu2 = k2 as f64 / last as f64;
            match ef_bi_rate_at_min_noise(channel, nu1, nu2) {
                Ok(cand) => {
                    if best.is_none_or(|b| cand.2.sum() > b.2.sum()) {
                        best = Some(cand);
                    }
                }
                Err(e) if e.is_infeasible() => continue,
                Err(e) => return Err(e),
            }
        }
    }
    match best {
        Some(b) => Ok(b),
        None => {
            let params = EfBiParams {
                nu1: 0.0,
                nu2: 0.0,
                nwz1: f64::INFINITY,
                nwz2: f64::INFINITY,
            };
            let scenario = ef_bi_scenario(channel, 0.0, 0.0)?;
            Ok((params, scenario, ef_bi_rate(channel, &params, scenario)?))
        }
    }
}

/// Factor in the single-level noise constraint
/// `N_wz >= max(sigma^2) / (2^(k R0) - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R0Exponent {
    /// `k = 2`, as the constraint is usually printed (real-signal form).
    #[default]
    Two,
    /// `k = 1`, the form consistent with `C(x) = log2(1 + x)` for complex
    /// signals.
    One,
}

impl R0Exponent {
    pub fn factor(&self) -> u8 {
        match self {
            R0Exponent::Two => 2,
            R0Exponent::One => 1,
        }
    }
}

/// Single-level compression operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfSingleParams {
    pub nwz: f64,
    pub r0: f64,
}

fn bottleneck_sinr(channel: &ChannelInstance) -> f64 {
    let pr = channel.relay_power();
    User::BOTH
        .iter()
        .map(|&u| channel.from_relay(u).norm_sqr() * pr / channel.destination_receive_power(u))
        .fold(f64::INFINITY, f64::min)
}

/// Common rate at which both destinations can decode the relay's single
/// description: `min_k C(|h_rk|^2 P_r / (source power at D_k + N_k))`.
pub fn ef_sl_bottleneck(channel: &ChannelInstance) -> f64 {
    cap(bottleneck_sinr(channel))
}

/// Smallest admissible single-level compression noise.
pub fn ef_sl_min_noise(channel: &ChannelInstance, exponent: R0Exponent) -> Result<f64> {
    let x = bottleneck_sinr(channel);
    if x <= 0.0 {
        return Err(Error::Infeasible("bottleneck rate R0 is zero"));
    }
    // 2^(k R0) - 1 with 2^R0 = 1 + x.
    let denom = match exponent {
        R0Exponent::Two => x * (2.0 + x),
        R0Exponent::One => x,
    };
    let d = EfDerived::new(channel);
    Ok(d.sigma1_sq.max(d.sigma2_sq) / denom)
}

/// Single-level operating point at the minimal admissible noise.
pub fn ef_sl_params(channel: &ChannelInstance, exponent: R0Exponent) -> Result<EfSingleParams> {
    Ok(EfSingleParams {
        nwz: ef_sl_min_noise(channel, exponent)?,
        r0: ef_sl_bottleneck(channel),
    })
}

/// Single-level EF rate pair at compression noise `nwz`.
pub fn ef_sl_rate(channel: &ChannelInstance, nwz: f64, exponent: R0Exponent) -> Result<RatePair> {
    if !(nwz.is_infinite() && nwz > 0.0) {
        let required = ef_sl_min_noise(channel, exponent)?;
        check_noise("single-level nwz lower bound", nwz, required)?;
    }
    Ok(RatePair::new(
        two_branch_rate(channel, User::One, 0.0, nwz),
        two_branch_rate(channel, User::Two, 0.0, nwz),
    ))
}

/// Single-level rates at the minimal admissible noise.
pub fn ef_sl_rate_at_min_noise(
    channel: &ChannelInstance,
    exponent: R0Exponent,
) -> Result<(EfSingleParams, RatePair)> {
    let params = ef_sl_params(channel, exponent)?;
    Ok((params, ef_sl_rate(channel, params.nwz, exponent)?))
}
