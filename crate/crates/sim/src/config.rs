//! TOML configuration files.
//!
//! ```toml
//! [layout]            # node positions in meters
//! s1 = [0.0, 0.0]
//! s2 = [-2.5, 0.0]
//! d1 = [11.5, 0.0]
//! d2 = [-5.45, 9.555...]
//! relay = [0.0, 0.0]  # used by `rate` and `optimize`
//! d0 = 5.0            # reference distance
//! gamma = 2.0         # path-loss exponent
//! epsilon = 0.1       # relay height above the node plane
//!
//! [power]
//! p1 = 10.0
//! p2 = 10.0
//! pr = 10.0
//!
//! [noise]
//! n1 = 1.0
//! n2 = 1.0
//! nr = 1.0
//!
//! [sweep]             # optional; bounds in units of d0
//! x_min = -4.0
//! x_max = 4.0
//! y_min = -3.0
//! y_max = 4.0
//! points_per_d0 = 4
//! slice_y = 0.5
//! slice_points_per_d0 = 200
//! protocols = ["af", "df", "ef-bl", "ef-sl"]
//!
//! [optimizer]         # optional
//! pa_policy = "uniform"   # or "optimal"
//! af_scan_points = 10000
//! af_tolerance = 1e-10
//! df_grid_points = 101
//! pa_grid_points = 21
//! r0_exponent = 2         # or 1
//!
//! [gains]             # optional; replaces the path-loss gains
//! h11 = 1.0           # a real number or [re, im]
//! h12 = [0.3, -0.1]
//! # ... h21, h22, h1r, h2r, hr1, hr2
//! ```

use anyhow::{bail, Context, Result};
use irc_core::channel::{layout_to_channel, Gains, NodeLayout, Noises, Point2, Powers};
use irc_core::ef::R0Exponent;
use irc_core::scenario::{OptimizerSettings, PaPolicy, Protocol, ScenarioConfig, SweepGrid};
use irc_core::ChannelInstance;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub layout: LayoutSection,
    pub power: PowerSection,
    pub noise: NoiseSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub s1: [f64; 2],
    pub s2: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
    #[serde(default)]
    pub relay: [f64; 2],
    pub d0: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub p1: f64,
    pub p2: f64,
    pub pr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub n1: f64,
    pub n2: f64,
    pub nr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    Af,
    Df,
    EfBl,
    EfSl,
}

impl From<ProtocolName> for Protocol {
    fn from(p: ProtocolName) -> Protocol {
        match p {
            ProtocolName::Af => Protocol::Af,
            ProtocolName::Df => Protocol::Df,
            ProtocolName::EfBl => Protocol::EfBl,
            ProtocolName::EfSl => Protocol::EfSl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub points_per_d0: u32,
    pub slice_y: f64,
    pub slice_points_per_d0: u32,
    pub protocols: Vec<ProtocolName>,
}

/// Slice resolution fine enough to resolve the bi-level scenario jump.
pub const DEFAULT_SLICE_POINTS_PER_D0: u32 = 200;

impl Default for SweepSection {
    fn default() -> Self {
        let g = SweepGrid::protocol_map();
        SweepSection {
            x_min: g.x_min,
            x_max: g.x_max,
            y_min: g.y_min,
            y_max: g.y_max,
            points_per_d0: g.points_per_d0,
            slice_y: 0.5,
            slice_points_per_d0: DEFAULT_SLICE_POINTS_PER_D0,
            protocols: vec![ProtocolName::Af, ProtocolName::Df, ProtocolName::EfBl, ProtocolName::EfSl],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaPolicyName {
    Uniform,
    Optimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub pa_policy: PaPolicyName,
    pub af_scan_points: usize,
    pub af_tolerance: f64,
    pub df_grid_points: usize,
    pub pa_grid_points: usize,
    pub r0_exponent: u8,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let o = OptimizerSettings::default();
        OptimizerSection {
            pa_policy: PaPolicyName::Uniform,
            af_scan_points: o.af_scan_points,
            af_tolerance: o.af_tolerance,
            df_grid_points: o.df_grid_points,
            pa_grid_points: o.pa_grid_points,
            r0_exponent: o.r0_exponent.factor(),
        }
    }
}

/// A gain written as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainValue {
    Real(f64),
    Complex([f64; 2]),
}

impl GainValue {
    fn complex(self) -> Complex64 {
        match self {
            GainValue::Real(r) => Complex64::new(r, 0.0),
            GainValue::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub h11: GainValue,
    pub h12: GainValue,
    pub h21: GainValue,
    pub h22: GainValue,
    pub h1r: GainValue,
    pub h2r: GainValue,
    pub hr1: GainValue,
    pub hr2: GainValue,
}

impl GainsSection {
    pub fn gains(&self) -> Gains {
        Gains {
            h11: self.h11.complex(),
            h12: self.h12.complex(),
            h21: self.h21.complex(),
            h22: self.h22.complex(),
            h1r: self.h1r.complex(),
            h2r: self.h2r.complex(),
            hr1: self.hr1.complex(),
            hr2: self.hr2.complex(),
        }
    }
}

pub fn parse_r0_exponent(k: u8) -> Result<R0Exponent> {
    match k {
        2 => Ok(R0Exponent::Two),
        1 => Ok(R0Exponent::One),
        _ => bail!("r0_exponent must be 1 or 2, got {k}"),
    }
}

fn point([x, y]: [f64; 2]) -> Point2 {
    Point2::new(x, y)
}

impl ConfigFile {
    /// The reference geometry with `P1 = P2 = Pr = 10` and unit noises.
    pub fn defaults() -> Self {
        let l = NodeLayout::reference();
        let xy = |p: Point2| [p.x, p.y];
        ConfigFile {
            layout: LayoutSection {
                s1: xy(l.s1),
                s2: xy(l.s2),
                d1: xy(l.d1),
                d2: xy(l.d2),
                relay: xy(l.relay),
                d0: l.d0,
                gamma: l.gamma,
                epsilon: l.epsilon,
            },
            power: PowerSection {
                p1: 10.0,
                p2: 10.0,
                pr: 10.0,
            },
            noise: NoiseSection {
                n1: 1.0,
                n2: 1.0,
                nr: 1.0,
            },
            sweep: SweepSection::default(),
            optimizer: OptimizerSection::default(),
            gains: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text).context("malformed config")?;
        cfg.scenario()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn layout(&self) -> NodeLayout {
        let l = &self.layout;
        NodeLayout {
            s1: point(l.s1),
            s2: point(l.s2),
            d1: point(l.d1),
            d2: point(l.d2),
            relay: point(l.relay),
            d0: l.d0,
            gamma: l.gamma,
            epsilon: l.epsilon,
        }
    }

    pub fn powers(&self) -> Powers {
        Powers {
            p1: self.power.p1,
            p2: self.power.p2,
            pr: self.power.pr,
        }
    }

    pub fn noises(&self) -> Noises {
        Noises {
            n1: self.noise.n1,
            n2: self.noise.n2,
            nr: self.noise.nr,
        }
    }

    pub fn pa_policy(&self) -> PaPolicy {
        match self.optimizer.pa_policy {
            PaPolicyName::Uniform => PaPolicy::Uniform,
            PaPolicyName::Optimal => PaPolicy::Optimal,
        }
    }

    /// Validated sweep configuration.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let layout = self.layout();
        layout.validate().context("invalid [layout]")?;
        let check = |what: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                bail!("invalid [layout]: {what} must be finite")
            }
        };
        for (what, p) in [("s1", layout.s1), ("s2", layout.s2), ("d1", layout.d1), ("d2", layout.d2), ("relay", layout.relay)] {
            check(what, p.x)?;
            check(what, p.y)?;
        }
        ChannelInstance::new(Gains::real([1.0; 8]), self.powers(), self.noises())
            .context("invalid [power] or [noise]")?;
        let s = &self.sweep;
        if s.protocols.is_empty() {
            bail!("invalid [sweep]: protocols must not be empty");
        }
        if !s.slice_y.is_finite() {
            bail!("invalid [sweep]: slice_y must be finite");
        }
        if s.slice_points_per_d0 == 0 {
            bail!("invalid [sweep]: slice_points_per_d0 must be positive");
        }
        let grid = SweepGrid {
            x_min: s.x_min,
            x_max: s.x_max,
            y_min: s.y_min,
            y_max: s.y_max,
            points_per_d0: s.points_per_d0,
        };
        grid.validate().context("invalid [sweep]")?;
        let o = &self.optimizer;
        let optimizer = OptimizerSettings {
            af_scan_points: o.af_scan_points,
            af_tolerance: o.af_tolerance,
            df_grid_points: o.df_grid_points,
            pa_grid_points: o.pa_grid_points,
            r0_exponent: parse_r0_exponent(o.r0_exponent).context("invalid [optimizer]")?,
        };
        let config = ScenarioConfig {
            layout,
            powers: self.powers(),
            noises: self.noises(),
            grid,
            pa_policy: self.pa_policy(),
            optimizer,
            protocols: s.protocols.iter().map(|&p| Protocol::from(p)).collect(),
        };
        config.validate().context("invalid [optimizer]")?;
        Ok(config)
    }

    /// The single channel used by `rate` and `optimize`: explicit `[gains]`
    /// when present, otherwise the path-loss channel with the relay at
    /// `[layout].relay`.
    pub fn channel(&self) -> Result<ChannelInstance> {
        match &self.gains {
            Some(g) => ChannelInstance::new(g.gains(), self.powers(), self.noises())
                .context("invalid [gains]"),
            None => layout_to_channel(&self.layout(), self.powers(), self.noises())
                .context("invalid [layout]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ConfigFile::defaults();
        let text = c.to_toml().unwrap();
        assert_eq!(ConfigFile::from_toml(&text).unwrap(), c);
        let s = c.scenario().unwrap();
        assert_eq!(s.layout, NodeLayout::reference());
    }

    #[test]
    fn optional_sections_take_defaults() {
        let text = "[layout]\ns1=[0,0]\ns2=[1,0]\nd1=[0,1]\nd2=[1,1]\nd0=1.0\ngamma=2.0\nepsilon=0.1\n\
                    [power]\np1=1.0\np2=1.0\npr=1.0\n[noise]\nn1=1.0\nn2=1.0\nnr=1.0\n";
        let c = ConfigFile::from_toml(text).unwrap();
        assert_eq!(c.sweep, SweepSection::default());
        assert_eq!(c.layout.relay, [0.0, 0.0]);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let good = ConfigFile::defaults().to_toml().unwrap();
        let err = |t: &str| format!("{:#}", ConfigFile::from_toml(t).unwrap_err());
        assert!(err(&good.replace("p1 = 10.0", "p1 = -1.0")).contains("P1"));
        assert!(err(&good.replace("gamma = 2.0", "gama = 2.0")).contains("gama"));
        assert!(err(&good.replace("r0_exponent = 2", "r0_exponent = 3")).contains("r0_exponent"));
        assert!(err(&good.replace("\"ef-sl\"", "\"ef-xx\"")).contains("ef-xx"));
        assert!(err(&good.replace("points_per_d0 = 4", "points_per_d0 = 0")).contains("[sweep]"));
    }

    #[test]
    fn explicit_gains_override_the_layout() {
        let mut c = ConfigFile::defaults();
        c.gains = Some(GainsSection {
            h11: GainValue::Real(1.0),
            h12: GainValue::Real(0.0),
            h21: GainValue::Real(0.0),
            h22: GainValue::Complex([0.0, 1.0]),
            h1r: GainValue::Real(0.5),
            h2r: GainValue::Real(0.5),
            hr1: GainValue::Real(0.5),
            hr2: GainValue::Real(0.5),
        });
        let text = c.to_toml().unwrap();
        let back = ConfigFile::from_toml(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.channel().unwrap().gains().h22, Complex64::new(0.0, 1.0));
    }
}
