//! Zero-delay scalar amplify-and-forward (ZDSAF).
//!
//! The relay forwards `Xr = a * Yr` for a fixed gain `a >= 0`. Destination
//! `i` decodes its own message treating everything else as noise, so its
//! rate is the capacity of
//!
//! ```text
//!            |a h_ir h_ri + h_ii|^2 P_i
//! ---------------------------------------------------------
//! |a h_jr h_ri + h_ji|^2 P_j + a^2 |h_ri|^2 N_r + N_i
//! ```
//!
//! Dividing through by `N_i` gives the normalised form
//! `|m a + n|^2 / (|p a + q|^2 + s a^2 + 1)` used by [`AfAuxiliaries`].
//! The sign of `dR/da` is the sign of a quadratic in `a`, which is what
//! drives the closed-form selection in [`optimal_gain`].

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use num_complex::Complex64;

use crate::channel::{cap, ChannelInstance, RatePair, User};
use crate::error::{Error, Result};

/// Relative threshold below which the leading coefficient of the stationary
/// equation is treated as zero.
pub const LEADING_COEFF_EPS: f64 = 1e-14;

/// Default number of scan points for [`af_sum_rate_gain`].
pub const SUM_RATE_SCAN_POINTS: usize = 10_000;

/// Default gain tolerance for [`af_sum_rate_gain`].
pub const SUM_RATE_TOLERANCE: f64 = 1e-10;

/// Rate of `user` under ZDSAF with relay gain `gain`.
pub fn af_rate(channel: &ChannelInstance, gain: f64, user: User) -> Result<f64> {
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::Domain {
            what: "amplification gain",
            value: gain,
        });
    }
    Ok(rate_unchecked(channel, gain, user))
}

fn rate_unchecked(channel: &ChannelInstance, a: f64, user: User) -> f64 {
    let j = user.other();
    let hri = channel.from_relay(user);
    let useful = (channel.to_relay(user) * hri * a + channel.direct(user)).norm_sqr();
    let interf = (channel.to_relay(j) * hri * a + channel.cross(user)).norm_sqr();
    let ni = channel.noise(user);
    let sinr = useful * channel.snr(user)
        / (interf * channel.snr(j) * channel.noise(j) / ni
            + a * a * hri.norm_sqr() * channel.relay_noise() / ni
            + 1.0);
    cap(sinr)
}

/// Gain at which the relay transmits exactly at its power budget:
/// `sqrt(Pr / (|h1r|^2 P1 + |h2r|^2 P2 + Nr))`.
pub fn saturation_gain(channel: &ChannelInstance) -> f64 {
    libm::sqrt(channel.relay_power() / channel.relay_receive_power())
}

/// Normalised channel composites for one user.
///
/// With equal noise variances everywhere these are `m = h_ir h_ri sqrt(rho_i)`,
/// `n = h_ii sqrt(rho_i)`, `p = h_jr h_ri sqrt(rho_j)`, `q = h_ji sqrt(rho_j)`
/// and `s = |h_ri|^2`. For unequal noises the interference terms are scaled
/// by `sqrt(P_j / N_i)` and `s` by `N_r / N_i`, so that the normalised SINR
/// stays equal to the physical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfAuxiliaries {
    pub m: Complex64,
    pub n: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    pub s: f64,
}

impl AfAuxiliaries {
    pub fn new(channel: &ChannelInstance, user: User) -> Self {
        let j = user.other();
        let ni = channel.noise(user);
        let own = libm::sqrt(channel.snr(user));
        let other = libm::sqrt(channel.power(j) / ni);
        let hri = channel.from_relay(user);
        AfAuxiliaries {
            m: channel.to_relay(user) * hri * own,
            n: channel.direct(user) * own,
            p: channel.to_relay(j) * hri * other,
            q: channel.cross(user) * other,
            s: hri.norm_sqr() * channel.relay_noise() / ni,
        }
    }

    fn numerator(&self, a: f64) -> f64 {
        (self.m * a + self.n).norm_sqr()
    }

    fn denominator(&self, a: f64) -> f64 {
        (self.p * a + self.q).norm_sqr() + self.s * a * a + 1.0
    }

    pub fn sinr(&self, a: f64) -> f64 {
        self.numerator(a) / self.denominator(a)
    }

    pub fn rate(&self, a: f64) -> f64 {
        cap(self.sinr(a))
    }

    /// `dR/da`, in bits per unit gain.
    pub fn rate_derivative(&self, a: f64) -> f64 {
        let num = self.numerator(a);
        let den = self.denominator(a);
        2.0 * eval_quadratic(&self.stationary_coeffs(), a) / (den * (num + den) * LN_2)
    }

    /// Coefficients `[c2, c1, c0]` of the quadratic whose sign is the sign of
    /// `dR/da`:
    ///
    /// ```text
    /// c2 = |m|^2 Re(p q*) - (|p|^2 + s) Re(m n*)
    /// c1 = |m|^2 (|q|^2 + 1) - |n|^2 (|p|^2 + s)
    /// c0 = (|q|^2 + 1) Re(m n*) - |n|^2 Re(p q*)
    /// ```
    pub fn stationary_coeffs(&self) -> [f64; 3] {
        let m2 = self.m.norm_sqr();
        let n2 = self.n.norm_sqr();
        let ps = self.p.norm_sqr() + self.s;
        let q1 = self.q.norm_sqr() + 1.0;
        let mn = (self.m * self.n.conj()).re;
        let pq = (self.p * self.q.conj()).re;
        [m2 * pq - ps * mn, m2 * q1 - n2 * ps, q1 * mn - n2 * pq]
    }

    /// Limit of the rate as the gain grows without bound,
    /// `C(|m|^2 / (|p|^2 + s))`.
    pub fn asymptote(&self) -> f64 {
        cap(self.m.norm_sqr() / (self.p.norm_sqr() + self.s))
    }

    /// Closed-form critical points `-n/m` and
    /// `-(m q^2 + m - p q n) / (m q p - p^2 n - n s)` for real composites.
    ///
    /// Returns `None` when any composite has an imaginary part.
    pub fn real_closed_form_roots(&self) -> Option<[f64; 2]> {
        if [self.m, self.n, self.p, self.q].iter().any(|c| c.im != 0.0) {
            return None;
        }
        let (m, n, p, q, s) = (self.m.re, self.n.re, self.p.re, self.q.re, self.s);
        Some([
            -n / m,
            -(m * q * q + m - p * q * n) / (m * q * p - p * p * n - n * s),
        ])
    }
}

fn eval_quadratic(c: &[f64; 3], a: f64) -> f64 {
    (c[0] * a + c[1]) * a + c[2]
}

/// Real stationary points of one user's rate as a function of the gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalPoints {
    /// Every coefficient of the stationary equation vanishes.
    Degenerate,
    /// No real solution: the roots are a complex-conjugate pair, or the
    /// equation degenerates to a nonzero constant.
    None,
    /// Leading coefficient numerically zero; the linear solve's root.
    Linear(f64),
    /// Two real roots in ascending order (equal when the discriminant is 0).
    Two(f64, f64),
}

impl CriticalPoints {
    pub fn to_vec(&self) -> Vec<f64> {
        match *self {
            CriticalPoints::Degenerate | CriticalPoints::None => Vec::new(),
            CriticalPoints::Linear(r) => alloc::vec![r],
            CriticalPoints::Two(a, b) => alloc::vec![a, b],
        }
    }
}

fn solve_stationary(c: &[f64; 3]) -> (f64, CriticalPoints) {
    let [c2, c1, c0] = *c;
    let scale = c2.abs().max(c1.abs()).max(c0.abs());
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if scale == 0.0 {
        return (disc, CriticalPoints::Degenerate);
    }
    if c2.abs() < LEADING_COEFF_EPS * scale {
        if c1 == 0.0 {
            return (disc, CriticalPoints::None);
        }
        return (disc, CriticalPoints::Linear(-c0 / c1));
    }
    if disc < 0.0 {
        return (disc, CriticalPoints::None);
    }
    // Avoid cancellation between -c1 and sqrt(disc).
    let t = -0.5 * (c1 + libm::copysign(libm::sqrt(disc), c1));
    let (r1, r2) = if t == 0.0 {
        // c1 == 0 and c0 == 0: double root at the origin.
        (0.0, 0.0)
    } else {
        (t / c2, c0 / t)
    };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    (disc, CriticalPoints::Two(lo, hi))
}

/// Real solutions of the stationary equation of `user`'s rate in the gain.
///
/// Whatever the gain range, every interior maximiser of the rate is among
/// these. A leading coefficient below `LEADING_COEFF_EPS` times the largest
/// coefficient switches to the linear solve.
pub fn critical_points(channel: &ChannelInstance, user: User) -> CriticalPoints {
    let aux = AfAuxiliaries::new(channel, user);
    solve_stationary(&aux.stationary_coeffs()).1
}

/// Which branch of the gain selection produced the result.
///
/// Labels follow the usual enumeration of the case analysis: `Delta<0`,
/// then `1x` for a nonnegative leading coefficient (the rate has a local
/// minimum between the roots) and `2x` for a negative one (local maximum
/// between the roots), with `a` both roots nonpositive, `b` exactly one
/// positive root, `d` two positive roots, `d-iii` a double root. `linear`
/// and `degenerate` cover a vanishing leading coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainCase {
    NegativeDiscriminant,
    Case1a,
    Case1b,
    Case1d,
    Case1dDouble,
    Case2a,
    Case2b,
    Case2d,
    Case2dDouble,
    Linear,
    Degenerate,
}

/// Full record of the per-user optimal-gain computation.
#[derive(Debug, Clone, PartialEq)]
pub struct AfAnalysis {
    pub user: User,
    pub auxiliaries: AfAuxiliaries,
    pub saturation_gain: f64,
    /// `[c2, c1, c0]` of the stationary equation.
    pub quadratic_coeffs: [f64; 3],
    pub discriminant: f64,
    /// Real critical points, ascending; empty when there are none.
    pub critical_points: Vec<f64>,
    /// Rate as the gain tends to infinity.
    pub asymptote: f64,
    pub optimal_gain: f64,
    pub optimal_rate: f64,
    pub case: GainCase,
    /// Set when the stationary equation vanished identically. This cannot
    /// happen for a channel with a usable relay path.
    pub degenerate: bool,
}

/// Gain in `[0, a_sat]` maximising `user`'s own rate, by sign analysis of the
/// rate derivative.
///
/// Between consecutive roots of the stationary quadratic the derivative
/// keeps the sign of the leading coefficient outside the roots and the
/// opposite sign between them. Candidates are therefore the endpoints and
/// the root that is a local maximum, and endpoint comparisons are done on
/// exact rates. Saturating the relay is not always optimal.
pub fn optimal_gain(channel: &ChannelInstance, user: User) -> AfAnalysis {
    let aux = AfAuxiliaries::new(channel, user);
    let sat = saturation_gain(channel);
    let coeffs = aux.stationary_coeffs();
    let (disc, roots) = solve_stationary(&coeffs);
    let rate = |a: f64| aux.rate(a);
    let best_of = |x: f64, y: f64| if rate(x) >= rate(y) { x } else { y };

    let (gain, case) = match roots {
        CriticalPoints::Degenerate => (sat, GainCase::Degenerate),
        CriticalPoints::None => {
            // Derivative has constant sign: that of c2, or of c0 when the
            // quadratic collapsed to a constant.
            let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let (sign, case) = if coeffs[0].abs() >= LEADING_COEFF_EPS * scale {
                (coeffs[0], GainCase::NegativeDiscriminant)
            } else {
                (coeffs[2], GainCase::Linear)
            };
            (if sign > 0.0 { sat } else { 0.0 }, case)
        }
        CriticalPoints::Linear(r) => {
            let gain = if coeffs[1] > 0.0 {
                // Decreasing before r, increasing after: r is a minimum.
                if r <= 0.0 {
                    sat
                } else if sat <= r {
                    0.0
                } else {
                    best_of(0.0, sat)
                }
            } else if r <= 0.0 {
                0.0
            } else if sat <= r {
                sat
            } else {
                r
            };
            (gain, GainCase::Linear)
        }
        CriticalPoints::Two(lo, hi) if coeffs[0] > 0.0 => {
            // Increasing up to lo, decreasing on (lo, hi), increasing after.
            if lo == hi {
                (sat, GainCase::Case1dDouble)
            } else if hi <= 0.0 {
                (sat, GainCase::Case1a)
            } else if lo <= 0.0 {
                let gain = if sat <= hi { 0.0 } else { best_of(0.0, sat) };
                (gain, GainCase::Case1b)
            } else {
                let gain = if sat <= lo {
                    sat
                } else if sat <= hi {
                    lo
                } else {
                    best_of(lo, sat)
                };
                (gain, GainCase::Case1d)
            }
        }
        CriticalPoints::Two(lo, hi) => {
            // Decreasing up to lo, increasing on (lo, hi), decreasing after.
            if lo == hi {
                (0.0, GainCase::Case2dDouble)
            } else if hi <= 0.0 {
                (0.0, GainCase::Case2a)
            } else if lo <= 0.0 {
                let gain = if sat <= hi { sat } else { hi };
                (gain, GainCase::Case2b)
            } else {
                let gain = if sat <= lo {
                    0.0
                } else if sat <= hi {
                    best_of(0.0, sat)
                } else {
                    best_of(hi, 0.0)
                };
                (gain, GainCase::Case2d)
            }
        }
    };

    AfAnalysis {
        user,
        auxiliaries: aux,
        saturation_gain: sat,
        quadratic_coeffs: coeffs,
        discriminant: disc,
        critical_points: roots.to_vec(),
        asymptote: aux.asymptote(),
        optimal_gain: gain,
        optimal_rate: rate_unchecked(channel, gain, user),
        case,
        degenerate: matches!(roots, CriticalPoints::Degenerate),
    }
}

/// Sum-rate-maximising gain in `[0, a_sat]` and the rates it yields.
///
/// The sum of the two users' rates is not unimodal in general. The range is
/// scanned on [`SUM_RATE_SCAN_POINTS`] points, every `+ -> -` sign change of
/// the analytic derivative is bisected down to `tolerance` in gain, and the
/// best of the refined points and both endpoints is returned.
pub fn af_sum_rate_gain(channel: &ChannelInstance, tolerance: f64) -> Result<(f64, RatePair)> {
    af_sum_rate_gain_with(channel, tolerance, SUM_RATE_SCAN_POINTS)
}

/// [`af_sum_rate_gain`] with an explicit scan size.
pub fn af_sum_rate_gain_with(
    channel: &ChannelInstance,
    tolerance: f64,
    scan_points: usize,
) -> Result<(f64, RatePair)> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::Domain {
            what: "tolerance",
            value: tolerance,
        });
    }
    if scan_points < 2 {
        return Err(Error::InvalidParams("scan needs at least two points"));
    }
    let users = [
        AfAuxiliaries::new(channel, User::One),
        AfAuxiliaries::new(channel, User::Two),
    ];
    let sum = |a: f64| users[0].rate(a) + users[1].rate(a);
    let slope = |a: f64| users[0].rate_derivative(a) + users[1].rate_derivative(a);
    let sat = saturation_gain(channel);
    let step = sat / (scan_points - 1) as f64;

    let mut best = (0.0, sum(0.0));
    let mut consider = |a: f64| {
        let v = sum(a);
        if v > best.1 {
            best = (a, v);
        }
    };
    consider(sat);

    let mut prev = slope(0.0);
    for k in 1..scan_points {
        let a = if k == scan_points - 1 {
            sat
        } else {
            k as f64 * step
        };
        let cur = slope(a);
        if prev > 0.0 && cur <= 0.0 {
            let (mut lo, mut hi) = (a - step, a);
            while hi - lo > tolerance {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            consider(lo);
            consider(hi);
        }
        prev = cur;
    }
    let gain = best.0;
    Ok((
        gain,
        RatePair::new(
            rate_unchecked(channel, gain, User::One),
            rate_unchecked(channel, gain, User::Two),
        ),
    ))
}
