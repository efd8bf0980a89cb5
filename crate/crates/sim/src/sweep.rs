//! Parallel versions of the relay-position sweeps.
//!
//! Cells are evaluated on the rayon pool and collected in grid order, so the
//! output is identical to the sequential sweeps whatever the thread count.

use anyhow::Result;
use irc_core::scenario::{
    evaluate_cell, evaluate_compression_cell, mark_frontier, CompressionCell, Grid, MapCell,
    ScenarioConfig,
};
use rayon::prelude::*;

fn cells<T: Send>(
    positions: &[(f64, f64)],
    eval: impl Fn(f64, f64) -> irc_core::Result<T> + Sync,
) -> Result<Vec<T>> {
    Ok(positions
        .par_iter()
        .map(|&(x, y)| eval(x, y))
        .collect::<irc_core::Result<Vec<T>>>()?)
}

/// Every enabled protocol at every grid position.
pub fn dominance_map(config: &ScenarioConfig) -> Result<Grid<MapCell>> {
    config.validate()?;
    let (xs, ys) = (config.grid.xs(), config.grid.ys());
    let cells = cells(&Grid::<MapCell>::positions(&xs, &ys), |x, y| evaluate_cell(config, x, y))?;
    Ok(Grid { xs, ys, cells })
}

/// Every enabled protocol along `x` at `y_fixed`, sampled `points_per_d0`
/// times per `d0` over the grid's `x` range.
pub fn sum_rate_slice(config: &ScenarioConfig, y_fixed: f64, points_per_d0: u32) -> Result<Vec<MapCell>> {
    let mut config = config.clone();
    config.grid.points_per_d0 = points_per_d0;
    config.validate()?;
    anyhow::ensure!(y_fixed.is_finite(), "slice y must be finite");
    let positions: Vec<(f64, f64)> = config.grid.xs().into_iter().map(|x| (x, y_fixed)).collect();
    cells(&positions, |x, y| evaluate_cell(&config, x, y))
}

/// Single-level against bi-level compression at every grid position.
pub fn sl_vs_bl_map(config: &ScenarioConfig) -> Result<Grid<CompressionCell>> {
    config.validate()?;
    let (xs, ys) = (config.grid.xs(), config.grid.ys());
    let cells = cells(&Grid::<CompressionCell>::positions(&xs, &ys), |x, y| {
        evaluate_compression_cell(config, x, y)
    })?;
    let mut grid = Grid { xs, ys, cells };
    mark_frontier(&mut grid);
    Ok(grid)
}
