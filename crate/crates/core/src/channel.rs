//! Channel model: complex link gains, powers and noise variances, the
//! path-loss geometry that produces them, and the capacity function.
//!
//! Received signals:
//!
//! ```text
//! Y1 = h11 X1 + h21 X2 + hr1 Xr + Z1
//! Y2 = h22 X2 + h12 X1 + hr2 Xr + Z2
//! Yr = h1r X1 + h2r X2 + Zr
//! ```
//!
//! `h_ij` is the gain from node `i` to node `j`. There is no relay
//! self-interference link.

use core::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `log2(1 + x)`, unchecked. Used on SINRs that are nonnegative by
/// construction.
#[inline]
pub(crate) fn cap(x: f64) -> f64 {
    libm::log1p(x) / LN_2
}

/// Capacity of a complex AWGN channel at the given SINR, `log2(1 + x)`.
pub fn capacity(sinr: f64) -> Result<f64> {
    if !sinr.is_finite() || sinr < 0.0 {
        return Err(Error::Domain {
            what: "sinr",
            value: sinr,
        });
    }
    Ok(cap(sinr))
}

/// One of the two source/destination pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    /// The interfering user.
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<User> {
        match n {
            1 => Ok(User::One),
            2 => Ok(User::Two),
            _ => Err(Error::Domain {
                what: "user index",
                value: f64::from(n),
            }),
        }
    }
}

/// The eight link gains of the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
    pub h1r: Complex64,
    pub h2r: Complex64,
    pub hr1: Complex64,
    pub hr2: Complex64,
}

impl Gains {
    /// All gains real, in the order `h11, h12, h21, h22, h1r, h2r, hr1, hr2`.
    pub fn real(g: [f64; 8]) -> Gains {
        let c = |x: f64| Complex64::new(x, 0.0);
        Gains {
            h11: c(g[0]),
            h12: c(g[1]),
            h21: c(g[2]),
            h22: c(g[3]),
            h1r: c(g[4]),
            h2r: c(g[5]),
            hr1: c(g[6]),
            hr2: c(g[7]),
        }
    }

    /// The same channel with the roles of the two users exchanged.
    pub fn swapped(&self) -> Gains {
        Gains {
            h11: self.h22,
            h12: self.h21,
            h21: self.h12,
            h22: self.h11,
            h1r: self.h2r,
            h2r: self.h1r,
            hr1: self.hr2,
            hr2: self.hr1,
        }
    }
}

/// Transmit power budgets of the two sources and the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Powers {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
}

/// Noise variances at the two destinations and at the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noises {
    pub n1: f64,
    pub n2: f64,
    pub nr: f64,
}

/// A fully specified Gaussian IRC.
///
/// Source powers and all noise variances are strictly positive. The relay
/// power may be zero (a silent relay), which several limit cases rely on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelInstance {
    gains: Gains,
    powers: Powers,
    noises: Noises,
}

fn positive(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

impl ChannelInstance {
    pub fn new(gains: Gains, powers: Powers, noises: Noises) -> Result<Self> {
        positive("P1", powers.p1)?;
        positive("P2", powers.p2)?;
        if !(powers.pr.is_finite() && powers.pr >= 0.0) {
            return Err(Error::Domain {
                what: "Pr",
                value: powers.pr,
            });
        }
        positive("N1", noises.n1)?;
        positive("N2", noises.n2)?;
        positive("Nr", noises.nr)?;
        let all = [
            gains.h11, gains.h12, gains.h21, gains.h22, gains.h1r, gains.h2r, gains.hr1, gains.hr2,
        ];
        if let Some(h) = all.iter().find(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(Error::Domain {
                what: "channel gain",
                value: h.re + h.im,
            });
        }
        Ok(ChannelInstance {
            gains,
            powers,
            noises,
        })
    }

    pub fn gains(&self) -> &Gains {
        &self.gains
    }

    pub fn powers(&self) -> &Powers {
        &self.powers
    }

    pub fn noises(&self) -> &Noises {
        &self.noises
    }

    /// The same channel with users 1 and 2 relabelled.
    pub fn swapped(&self) -> ChannelInstance {
        ChannelInstance {
            gains: self.gains.swapped(),
            powers: Powers {
                p1: self.powers.p2,
                p2: self.powers.p1,
                pr: self.powers.pr,
            },
            noises: Noises {
                n1: self.noises.n2,
                n2: self.noises.n1,
                nr: self.noises.nr,
            },
        }
    }

    /// Same gains, new powers and noises.
    pub fn with_budget(&self, powers: Powers, noises: Noises) -> Result<ChannelInstance> {
        ChannelInstance::new(self.gains, powers, noises)
    }

    /// `h_ii`: source `i` to its own destination.
    pub fn direct(&self, user: User) -> Complex64 {
        match user {
            User::One => self.gains.h11,
            User::Two => self.gains.h22,
        }
    }

    /// `h_ji`: the other source to destination `i`.
    pub fn cross(&self, user: User) -> Complex64 {
        match user {
            User::One => self.gains.h21,
            User::Two => self.gains.h12,
        }
    }

    /// `h_ir`: source `i` to the relay.
    pub fn to_relay(&self, user: User) -> Complex64 {
        match user {
            User::One => self.gains.h1r,
            User::Two => self.gains.h2r,
        }
    }

    /// `h_ri`: relay to destination `i`.
    pub fn from_relay(&self, user: User) -> Complex64 {
        match user {
            User::One => self.gains.hr1,
            User::Two => self.gains.hr2,
        }
    }

    pub fn power(&self, user: User) -> f64 {
        match user {
            User::One => self.powers.p1,
            User::Two => self.powers.p2,
        }
    }

    pub fn noise(&self, user: User) -> f64 {
        match user {
            User::One => self.noises.n1,
            User::Two => self.noises.n2,
        }
    }

    pub fn relay_power(&self) -> f64 {
        self.powers.pr
    }

    pub fn relay_noise(&self) -> f64 {
        self.noises.nr
    }

    /// `rho_i = P_i / N_i`.
    pub fn snr(&self, user: User) -> f64 {
        self.power(user) / self.noise(user)
    }

    /// Total received power at the relay, `|h1r|^2 P1 + |h2r|^2 P2 + Nr`.
    pub fn relay_receive_power(&self) -> f64 {
        self.gains.h1r.norm_sqr() * self.powers.p1
            + self.gains.h2r.norm_sqr() * self.powers.p2
            + self.noises.nr
    }

    /// Source-only power at destination `i`: `|h_ii|^2 P_i + |h_ji|^2 P_j + N_i`.
    pub fn destination_receive_power(&self, user: User) -> f64 {
        let j = user.other();
        self.direct(user).norm_sqr() * self.power(user)
            + self.cross(user).norm_sqr() * self.power(j)
            + self.noise(user)
    }

    /// Rate of user `i` when the relay is ignored and interference is
    /// treated as noise: `C(|h_ii|^2 P_i / (|h_ji|^2 P_j + N_i))`.
    pub fn interference_channel_rate(&self, user: User) -> f64 {
        let j = user.other();
        cap(self.direct(user).norm_sqr() * self.power(user)
            / (self.cross(user).norm_sqr() * self.power(j) + self.noise(user)))
    }

    /// Both users' interference-channel rates.
    pub fn interference_channel_rates(&self) -> RatePair {
        RatePair::new(
            self.interference_channel_rate(User::One),
            self.interference_channel_rate(User::Two),
        )
    }
}

/// A pair of per-user rates in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePair { r1, r2 }
    }

    pub fn get(&self, user: User) -> f64 {
        match user {
            User::One => self.r1,
            User::Two => self.r2,
        }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Gain magnitude under the path-loss model, `(d / d0)^(-gamma / 2)`.
pub fn path_loss_gain(distance: f64, d0: f64, gamma: f64) -> Result<f64> {
    positive("distance", distance)?;
    positive("d0", d0)?;
    positive("gamma", gamma)?;
    Ok(libm::pow(distance / d0, -gamma / 2.0))
}

/// Planar coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Node positions for the path-loss model.
///
/// Sources and destinations lie in the plane `z = 0`; the relay floats at
/// height `epsilon` above the point `relay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLayout {
    pub s1: Point2,
    pub s2: Point2,
    pub d1: Point2,
    pub d2: Point2,
    pub relay: Point2,
    pub d0: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

/// Reference distance of the evaluation geometry, meters.
pub const REFERENCE_D0: f64 = 5.0;
/// Path-loss exponent of the evaluation geometry.
pub const REFERENCE_GAMMA: f64 = 2.0;
/// Relay height above the node plane, meters.
pub const REFERENCE_EPSILON: f64 = 0.1;
/// `d(S1, D1)`.
pub const REFERENCE_D11: f64 = 11.5;
/// `d(S2, D2)`.
pub const REFERENCE_D22: f64 = 10.0;
/// `d(S1, D2)`.
pub const REFERENCE_D12: f64 = 11.0;
/// `d(S2, D1)`.
pub const REFERENCE_D21: f64 = 14.0;

impl NodeLayout {
    /// The evaluation geometry, with the relay at the origin.
    ///
    /// Only the four source/destination distances are fixed, so the embedding
    /// is pinned as follows: `S1` at the origin, `D1` on the positive x axis,
    /// `S2` and `D2` in the closed upper half-plane, with `d(S1, S2)` as small
    /// as the distance constraints allow. `S2` must lie on the circle of
    /// radius `d21` around `D1`, whose closest point to `S1` is
    /// `(d11 - d21, 0)`; `D2` is then the upper intersection of the circles
    /// of radius `d12` around `S1` and `d22` around `S2`.
    pub fn reference() -> NodeLayout {
        let s1 = Point2::new(0.0, 0.0);
        let d1 = Point2::new(REFERENCE_D11, 0.0);
        let s2 = Point2::new(REFERENCE_D11 - REFERENCE_D21, 0.0);
        // x^2 + y^2 = d12^2 and (x - s2.x)^2 + y^2 = d22^2
        let x = (REFERENCE_D12 * REFERENCE_D12 - REFERENCE_D22 * REFERENCE_D22 + s2.x * s2.x)
            / (2.0 * s2.x);
        let y = libm::sqrt(REFERENCE_D12 * REFERENCE_D12 - x * x);
        NodeLayout {
            s1,
            s2,
            d1,
            d2: Point2::new(x, y),
            relay: Point2::new(0.0, 0.0),
            d0: REFERENCE_D0,
            gamma: REFERENCE_GAMMA,
            epsilon: REFERENCE_EPSILON,
        }
    }

    /// The same layout with the relay moved to `(x, y)` meters.
    pub fn with_relay(&self, x: f64, y: f64) -> NodeLayout {
        NodeLayout {
            relay: Point2::new(x, y),
            ..*self
        }
    }

    /// Relay position in space; `z` equals `epsilon`.
    pub fn relay_position(&self) -> [f64; 3] {
        [self.relay.x, self.relay.y, self.epsilon]
    }

    fn relay_distance(&self, p: &Point2) -> f64 {
        libm::sqrt(
            (self.relay.x - p.x) * (self.relay.x - p.x)
                + (self.relay.y - p.y) * (self.relay.y - p.y)
                + self.epsilon * self.epsilon,
        )
    }

    /// Link lengths in the gain order `h11, h12, h21, h22, h1r, h2r, hr1, hr2`.
    pub fn link_distances(&self) -> [f64; 8] {
        [
            self.s1.distance(&self.d1),
            self.s1.distance(&self.d2),
            self.s2.distance(&self.d1),
            self.s2.distance(&self.d2),
            self.relay_distance(&self.s1),
            self.relay_distance(&self.s2),
            self.relay_distance(&self.d1),
            self.relay_distance(&self.d2),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        positive("d0", self.d0)?;
        positive("gamma", self.gamma)?;
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Domain {
                what: "epsilon",
                value: self.epsilon,
            });
        }
        Ok(())
    }

    /// Real, nonnegative path-loss gains for every link.
    pub fn gains(&self) -> Result<Gains> {
        self.validate()?;
        let mut g = [0.0; 8];
        for (gain, d) in g.iter_mut().zip(self.link_distances()) {
            *gain = path_loss_gain(d, self.d0, self.gamma)?;
        }
        Ok(Gains::real(g))
    }
}

/// Channel induced by a layout, with the given powers and noise variances.
pub fn layout_to_channel(
    layout: &NodeLayout,
    powers: Powers,
    noises: Noises,
) -> Result<ChannelInstance> {
    ChannelInstance::new(layout.gains()?, powers, noises)
}
