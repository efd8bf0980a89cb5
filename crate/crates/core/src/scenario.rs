//! Protocol comparison over relay positions.
//!
//! Relay coordinates are expressed in units of `d0` in the layout frame
//! (the frame in which the source and destination positions are given).
//! Grids are walked row-major: `y` ascending in the outer loop, `x`
//! ascending in the inner loop.
//!
//! These functions are sequential. Every cell is independent, so callers
//! that want parallelism can map [`evaluate_cell`] over [`Grid::positions`]
//! and keep the output in position order.

use alloc::vec::Vec;

use crate::af::{af_sum_rate_gain_with, saturation_gain, SUM_RATE_SCAN_POINTS, SUM_RATE_TOLERANCE};
use crate::channel::{layout_to_channel, ChannelInstance, NodeLayout, Noises, Powers, RatePair};
use crate::df::{df_sum_rate_search, df_sum_rate_search_fixed_nu, DfParams, DEFAULT_GRID_POINTS};
use crate::ef::{
    ef_bi_rate_at_min_noise, ef_bi_sum_rate_search, ef_sl_rate_at_min_noise, BiScenario,
    EfBiParams, EfSingleParams, R0Exponent,
};
use crate::error::{Error, Result};

/// Relaying protocols, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Af,
    Df,
    EfBl,
    EfSl,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::Af, Protocol::Df, Protocol::EfBl, Protocol::EfSl];

    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::Af => "af",
            Protocol::Df => "df",
            Protocol::EfBl => "ef-bl",
            Protocol::EfSl => "ef-sl",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Protocol> {
        Protocol::ALL.into_iter().find(|p| p.tag() == tag)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// A subset of the protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProtocolSet([bool; 4]);

impl ProtocolSet {
    pub const fn all() -> Self {
        ProtocolSet([true; 4])
    }

    pub const fn empty() -> Self {
        ProtocolSet([false; 4])
    }

    pub fn insert(&mut self, p: Protocol) {
        self.0[p.index()] = true;
    }

    pub fn contains(&self, p: Protocol) -> bool {
        self.0[p.index()]
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Protocol> + '_ {
        Protocol::ALL.into_iter().filter(|p| self.contains(*p))
    }
}

impl FromIterator<Protocol> for ProtocolSet {
    fn from_iter<I: IntoIterator<Item = Protocol>>(iter: I) -> Self {
        let mut s = ProtocolSet::empty();
        for p in iter {
            s.insert(p);
        }
        s
    }
}

/// How the relay splits its power between the two cooperation signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaPolicy {
    /// `nu1 = nu2 = 1/2`.
    #[default]
    Uniform,
    /// The split maximising the sum rate, searched per cell.
    Optimal,
}

impl PaPolicy {
    pub fn tag(&self) -> &'static str {
        match self {
            PaPolicy::Uniform => "uniform",
            PaPolicy::Optimal => "optimal",
        }
    }

    pub fn from_tag(tag: &str) -> Option<PaPolicy> {
        match tag {
            "uniform" => Some(PaPolicy::Uniform),
            "optimal" => Some(PaPolicy::Optimal),
            _ => None,
        }
    }
}

/// Rectangular sweep region in units of `d0`, sampled every
/// `1 / points_per_d0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub points_per_d0: u32,
}

impl SweepGrid {
    /// `[-4, 4] x [-3, 4]` at a quarter of `d0`.
    pub const fn protocol_map() -> Self {
        SweepGrid {
            x_min: -4.0,
            x_max: 4.0,
            y_min: -3.0,
            y_max: 4.0,
            points_per_d0: 4,
        }
    }

    /// `[-2, 3] x [-2, 3]` at a quarter of `d0`.
    pub const fn compression_map() -> Self {
        SweepGrid {
            x_min: -2.0,
            x_max: 3.0,
            y_min: -2.0,
            y_max: 3.0,
            points_per_d0: 4,
        }
    }

    fn axis(min: f64, max: f64, per_d0: u32) -> Vec<f64> {
        let per = f64::from(per_d0);
        // The small allowance keeps `max` itself when the span is a whole
        // number of steps up to rounding.
        let steps = libm::floor((max - min) * per + 1e-9) as usize;
        (0..=steps).map(|k| min + k as f64 / per).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.points_per_d0)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.points_per_d0)
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("grid x_min", self.x_min),
            ("grid x_max", self.x_max),
            ("grid y_min", self.y_min),
            ("grid y_max", self.y_max),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain { what, value: v });
            }
        }
        if self.points_per_d0 == 0 {
            return Err(Error::InvalidParams("grid resolution must be positive"));
        }
        if self.xs().len() < 2 || self.ys().len() < 2 {
            return Err(Error::InvalidParams("grid needs at least two points per axis"));
        }
        Ok(())
    }
}

/// Per-cell optimiser settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub af_scan_points: usize,
    pub af_tolerance: f64,
    /// Cooperation-degree grid per axis for DF under the uniform split.
    pub df_grid_points: usize,
    /// Grid per axis for searches over the power split (DF searches all
    /// four parameters on this grid under the optimal split).
    pub pa_grid_points: usize,
    pub r0_exponent: R0Exponent,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            af_scan_points: SUM_RATE_SCAN_POINTS,
            af_tolerance: SUM_RATE_TOLERANCE,
            df_grid_points: DEFAULT_GRID_POINTS,
            pa_grid_points: 21,
            r0_exponent: R0Exponent::Two,
        }
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub layout: NodeLayout,
    pub powers: Powers,
    pub noises: Noises,
    pub grid: SweepGrid,
    pub pa_policy: PaPolicy,
    pub optimizer: OptimizerSettings,
    pub protocols: ProtocolSet,
}

impl ScenarioConfig {
    /// Reference layout, `P1 = P2 = Pr = 10`, unit noises.
    pub fn symmetric() -> Self {
        ScenarioConfig {
            layout: NodeLayout::reference(),
            powers: Powers {
                p1: 10.0,
                p2: 10.0,
                pr: 10.0,
            },
            noises: Noises {
                n1: 1.0,
                n2: 1.0,
                nr: 1.0,
            },
            grid: SweepGrid::protocol_map(),
            pa_policy: PaPolicy::Uniform,
            optimizer: OptimizerSettings::default(),
            protocols: ProtocolSet::all(),
        }
    }

    /// As [`ScenarioConfig::symmetric`] with `P1 = 3`.
    pub fn asymmetric() -> Self {
        let mut c = Self::symmetric();
        c.powers.p1 = 3.0;
        c
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        // Builds a channel once to check powers and noises.
        ChannelInstance::new(self.layout.gains()?, self.powers, self.noises)?;
        self.grid.validate()?;
        let o = &self.optimizer;
        if o.af_scan_points < 2 || o.df_grid_points < 2 || o.pa_grid_points < 2 {
            return Err(Error::InvalidParams("optimizer grids need at least two points"));
        }
        if !(o.af_tolerance.is_finite() && o.af_tolerance > 0.0) {
            return Err(Error::Domain {
                what: "af_tolerance",
                value: o.af_tolerance,
            });
        }
        if self.protocols.is_empty() {
            return Err(Error::InvalidParams("no protocol selected"));
        }
        Ok(())
    }

    /// Channel with the relay at `(xr, yr)` in units of `d0`.
    pub fn channel_at(&self, xr: f64, yr: f64) -> Result<ChannelInstance> {
        let d0 = self.layout.d0;
        layout_to_channel(
            &self.layout.with_relay(xr * d0, yr * d0),
            self.powers,
            self.noises,
        )
    }
}

/// Operating points chosen in one cell, for replay and inspection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellDetails {
    pub af_gain: Option<f64>,
    pub af_saturation_gain: Option<f64>,
    pub df: Option<DfParams>,
    pub ef_bl: Option<EfBiParams>,
    pub ef_sl: Option<EfSingleParams>,
    /// Rate pairs indexed in protocol order; `None` for disabled protocols.
    pub rates: [Option<RatePair>; 4],
}

/// One relay position of a protocol comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub xr: f64,
    pub yr: f64,
    /// Sum rates; `None` when the protocol is not compared.
    pub af: Option<f64>,
    pub df: Option<f64>,
    pub ef_bl: Option<f64>,
    pub ef_sl: Option<f64>,
    pub winner: Protocol,
    pub bl_scenario: Option<BiScenario>,
    /// Protocols whose operating point was infeasible; their rate is 0.
    pub infeasible: ProtocolSet,
    pub details: CellDetails,
}

impl MapCell {
    pub fn sum_rate(&self, p: Protocol) -> Option<f64> {
        match p {
            Protocol::Af => self.af,
            Protocol::Df => self.df,
            Protocol::EfBl => self.ef_bl,
            Protocol::EfSl => self.ef_sl,
        }
    }
}

/// Protocol with the largest sum rate, earliest in protocol order on ties.
pub fn pick_winner(rates: impl IntoIterator<Item = (Protocol, f64)>) -> Option<Protocol> {
    let mut best: Option<(Protocol, f64)> = None;
    for (p, r) in rates {
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((p, r));
        }
    }
    best.map(|(p, _)| p)
}

fn infeasible_as_zero<T>(r: Result<T>, flag: &mut bool) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_infeasible() => {
            *flag = true;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn bi_level(config: &ScenarioConfig, ch: &ChannelInstance) -> Result<(EfBiParams, BiScenario, RatePair)> {
    match config.pa_policy {
        PaPolicy::Uniform => ef_bi_rate_at_min_noise(ch, 0.5, 0.5),
        PaPolicy::Optimal => ef_bi_sum_rate_search(ch, config.optimizer.pa_grid_points),
    }
}

/// Evaluates every enabled protocol with the relay at `(xr, yr)`.
pub fn evaluate_cell(config: &ScenarioConfig, xr: f64, yr: f64) -> Result<MapCell> {
    let ch = config.channel_at(xr, yr)?;
    let opt = &config.optimizer;
    let mut details = CellDetails::default();
    let mut infeasible = ProtocolSet::empty();
    let mut bl_scenario = None;

    for p in config.protocols.iter() {
        let mut flag = false;
        let rates = match p {
            Protocol::Af => {
                let (gain, rates) = af_sum_rate_gain_with(&ch, opt.af_tolerance, opt.af_scan_points)?;
                details.af_gain = Some(gain);
                details.af_saturation_gain = Some(saturation_gain(&ch));
                Some(rates)
            }
            Protocol::Df => {
                let (params, rates) = match config.pa_policy {
                    PaPolicy::Uniform => df_sum_rate_search_fixed_nu(&ch, (0.5, 0.5), opt.df_grid_points)?,
                    PaPolicy::Optimal => df_sum_rate_search(&ch, opt.pa_grid_points)?,
                };
                details.df = Some(params);
                Some(rates)
            }
            Protocol::EfBl => infeasible_as_zero(bi_level(config, &ch), &mut flag)?.map(|(params, s, rates)| {
                details.ef_bl = Some(params);
                bl_scenario = Some(s);
                rates
            }),
            Protocol::EfSl => infeasible_as_zero(ef_sl_rate_at_min_noise(&ch, opt.r0_exponent), &mut flag)?
                .map(|(params, rates)| {
                    details.ef_sl = Some(params);
                    rates
                }),
        };
        if flag {
            infeasible.insert(p);
        }
        details.rates[p.index()] = Some(rates.unwrap_or(RatePair::new(0.0, 0.0)));
    }

    let sum = |p: Protocol| details.rates[p.index()].map(|r| r.sum());
    let winner = pick_winner(config.protocols.iter().filter_map(|p| sum(p).map(|s| (p, s))))
        .ok_or(Error::InvalidParams("no protocol selected"))?;
    Ok(MapCell {
        xr,
        yr,
        af: sum(Protocol::Af),
        df: sum(Protocol::Df),
        ef_bl: sum(Protocol::EfBl),
        ef_sl: sum(Protocol::EfSl),
        winner,
        bl_scenario,
        infeasible,
        details,
    })
}

/// Values laid out on a sweep grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub cells: Vec<T>,
}

impl<T> Grid<T> {
    /// Relay positions in row-major order.
    pub fn positions(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
        ys.iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .collect()
    }

    pub fn get(&self, ix: usize, iy: usize) -> &T {
        &self.cells[iy * self.xs.len() + ix]
    }
}

/// Protocol comparison at every grid position.
pub fn dominance_map(config: &ScenarioConfig) -> Result<Grid<MapCell>> {
    config.validate()?;
    let (xs, ys) = (config.grid.xs(), config.grid.ys());
    let cells = Grid::<MapCell>::positions(&xs, &ys)
        .into_iter()
        .map(|(x, y)| evaluate_cell(config, x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(Grid { xs, ys, cells })
}

/// Protocol comparison along `x` at fixed `y_fixed` (units of `d0`), over the
/// grid's `x` range.
pub fn sum_rate_slice(config: &ScenarioConfig, y_fixed: f64) -> Result<Vec<MapCell>> {
    config.validate()?;
    if !y_fixed.is_finite() {
        return Err(Error::Domain {
            what: "slice y",
            value: y_fixed,
        });
    }
    config
        .grid
        .xs()
        .into_iter()
        .map(|x| evaluate_cell(config, x, y_fixed))
        .collect()
}

/// Single-level against bi-level compression in one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionCell {
    pub xr: f64,
    pub yr: f64,
    pub sl_sum: f64,
    pub bl_sum: f64,
    pub bl_scenario: Option<BiScenario>,
    /// `EfBl` or `EfSl`; a tie goes to `EfBl`.
    pub winner: Protocol,
    /// The bi-level scenario differs from a horizontal or vertical neighbour.
    pub frontier: bool,
    pub infeasible: ProtocolSet,
}

/// Evaluates both compression variants with the relay at `(xr, yr)`.
pub fn evaluate_compression_cell(config: &ScenarioConfig, xr: f64, yr: f64) -> Result<CompressionCell> {
    let ch = config.channel_at(xr, yr)?;
    let mut infeasible = ProtocolSet::empty();
    let mut flag = false;
    let bl = infeasible_as_zero(bi_level(config, &ch), &mut flag)?;
    if flag {
        infeasible.insert(Protocol::EfBl);
        flag = false;
    }
    let sl = infeasible_as_zero(ef_sl_rate_at_min_noise(&ch, config.optimizer.r0_exponent), &mut flag)?;
    if flag {
        infeasible.insert(Protocol::EfSl);
    }
    let bl_sum = bl.map_or(0.0, |b| b.2.sum());
    let sl_sum = sl.map_or(0.0, |s| s.1.sum());
    Ok(CompressionCell {
        xr,
        yr,
        sl_sum,
        bl_sum,
        bl_scenario: bl.map(|b| b.1),
        winner: if sl_sum > bl_sum {
            Protocol::EfSl
        } else {
            Protocol::EfBl
        },
        frontier: false,
        infeasible,
    })
}

/// Marks cells whose bi-level scenario differs from a 4-neighbour.
pub fn mark_frontier(grid: &mut Grid<CompressionCell>) {
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let tag = |g: &Grid<CompressionCell>, ix: usize, iy: usize| g.get(ix, iy).bl_scenario;
    let mut marks = Vec::with_capacity(grid.cells.len());
    for iy in 0..ny {
        for ix in 0..nx {
            let here = tag(grid, ix, iy);
            let mut neighbours = [None; 4];
            if ix > 0 {
                neighbours[0] = Some((ix - 1, iy));
            }
            if ix + 1 < nx {
                neighbours[1] = Some((ix + 1, iy));
            }
            if iy > 0 {
                neighbours[2] = Some((ix, iy - 1));
            }
            if iy + 1 < ny {
                neighbours[3] = Some((ix, iy + 1));
            }
            marks.push(
                neighbours
                    .iter()
                    .flatten()
                    .any(|&(jx, jy)| tag(grid, jx, jy) != here),
            );
        }
    }
    for (c, m) in grid.cells.iter_mut().zip(marks) {
        c.frontier = m;
    }
}

/// Single-level against bi-level compression over the grid, with the
/// bi-level scenario frontier marked.
pub fn sl_vs_bl_map(config: &ScenarioConfig) -> Result<Grid<CompressionCell>> {
    config.validate()?;
    let (xs, ys) = (config.grid.xs(), config.grid.ys());
    let cells = Grid::<CompressionCell>::positions(&xs, &ys)
        .into_iter()
        .map(|(x, y)| evaluate_compression_cell(config, x, y))
        .collect::<Result<Vec<_>>>()?;
    let mut grid = Grid { xs, ys, cells };
    mark_frontier(&mut grid);
    Ok(grid)
}

/// Factor over the median adjacent difference above which a step counts as
/// a jump.
pub const JUMP_FACTOR: f64 = 10.0;

/// Indices `i` such that `|v[i+1] - v[i]|` exceeds `factor` times the
/// median absolute adjacent difference.
pub fn detect_jumps(values: &[f64], factor: f64) -> Vec<usize> {
    if values.len() < 2 {
        return Vec::new();
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| libm::fabs(w[1] - w[0])).collect();
    let mut sorted = diffs.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    diffs
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > factor * median)
        .map(|(i, _)| i)
        .collect()
}

/// Indices `i` where the scenario tag changes between `i` and `i + 1`.
pub fn scenario_flips(tags: &[Option<BiScenario>]) -> Vec<usize> {
    tags.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(i, _)| i)
        .collect()
}
