//! Properties of the relay-position sweeps.

mod common;

use irc_core::af::{af_rate, af_sum_rate_gain_with, saturation_gain};
use irc_core::channel::{NodeLayout, Point2};
use irc_core::df::df_sum_rate_search_fixed_nu;
use irc_core::ef::{ef_bi_rate_at_min_noise, ef_sl_rate_at_min_noise, BiScenario};
use irc_core::scenario::*;
use irc_core::User;
use rand::Rng;

fn coarse(mut c: ScenarioConfig) -> ScenarioConfig {
    c.grid.points_per_d0 = 1;
    c
}

#[test]
fn far_relay_leaves_the_interference_channel() {
    let c = ScenarioConfig::symmetric();
    let cell = evaluate_cell(&c, 1e4, 1e4).unwrap();
    let base = c.channel_at(1e4, 1e4).unwrap().interference_channel_rates().sum();
    for p in [Protocol::Af, Protocol::EfBl, Protocol::EfSl] {
        assert!((cell.sum_rate(p).unwrap() - base).abs() < 1e-4, "{p:?}");
    }
    // DF cannot beat the source-to-relay link, which vanishes.
    assert!(cell.df.unwrap() < 1e-4);
}

#[test]
fn winners_are_consistent() {
    for c in [ScenarioConfig::symmetric(), ScenarioConfig::asymmetric()] {
        let map = dominance_map(&coarse(c)).unwrap();
        for cell in &map.cells {
            let w = cell.sum_rate(cell.winner).unwrap();
            for p in Protocol::ALL {
                let r = cell.sum_rate(p).unwrap();
                assert!(w >= r);
                if r == w {
                    assert!(cell.winner <= p);
                }
            }
        }
    }
}

#[test]
fn cells_match_independent_recomputation() {
    let c = ScenarioConfig::symmetric();
    let (xs, ys) = (c.grid.xs(), c.grid.ys());
    let mut rng = common::rng(91);
    for _ in 0..20 {
        let (x, y) = (xs[rng.gen_range(0..xs.len())], ys[rng.gen_range(0..ys.len())]);
        let cell = evaluate_cell(&c, x, y).unwrap();
        let ch = c.channel_at(x, y).unwrap();
        let af = af_sum_rate_gain_with(&ch, 1e-10, 10_000).unwrap().1.sum();
        let df = df_sum_rate_search_fixed_nu(&ch, (0.5, 0.5), 101).unwrap().1.sum();
        let (_, s, bl) = ef_bi_rate_at_min_noise(&ch, 0.5, 0.5).unwrap();
        let sl = ef_sl_rate_at_min_noise(&ch, Default::default()).unwrap().1.sum();
        assert_eq!(
            [cell.af, cell.df, cell.ef_bl, cell.ef_sl],
            [Some(af), Some(df), Some(bl.sum()), Some(sl)]
        );
        assert_eq!(cell.bl_scenario, Some(s));
    }
}

#[test]
fn reference_map_has_several_winners() {
    let map = dominance_map(&ScenarioConfig::symmetric()).unwrap();
    let mut winners: Vec<_> = map.cells.iter().map(|c| c.winner).collect();
    winners.sort();
    winners.dedup();
    assert!(winners.len() >= 2, "{winners:?}");
}

#[test]
fn af_gains_replay_and_stay_in_box() {
    let mut c = ScenarioConfig::asymmetric();
    c.grid.points_per_d0 = 2;
    for cell in sum_rate_slice(&c, 0.5).unwrap() {
        let ch = c.channel_at(cell.xr, cell.yr).unwrap();
        let a = cell.details.af_gain.unwrap();
        assert!((0.0..=saturation_gain(&ch)).contains(&a));
        let replay = af_rate(&ch, a, User::One).unwrap() + af_rate(&ch, a, User::Two).unwrap();
        assert!((replay - cell.af.unwrap()).abs() < 1e-14);
    }
}

#[test]
fn distant_slice_is_flat_at_the_baseline() {
    let mut c = ScenarioConfig::symmetric();
    c.protocols = [Protocol::Af, Protocol::EfBl, Protocol::EfSl].into_iter().collect();
    let slice = sum_rate_slice(&c, 1e4).unwrap();
    for cell in [slice.first().unwrap(), slice.last().unwrap()] {
        let base = c.channel_at(cell.xr, cell.yr).unwrap().interference_channel_rates().sum();
        for p in [Protocol::Af, Protocol::EfBl, Protocol::EfSl] {
            assert!((cell.sum_rate(p).unwrap() - base).abs() < 1e-4);
        }
    }
}

#[test]
fn bl_slice_jumps_where_the_scenario_flips() {
    let mut c = ScenarioConfig::symmetric();
    c.grid.points_per_d0 = 200;
    c.protocols = [Protocol::EfBl].into_iter().collect();
    let slice = sum_rate_slice(&c, 0.5).unwrap();
    let bl: Vec<f64> = slice.iter().map(|c| c.ef_bl.unwrap()).collect();
    let tags: Vec<_> = slice.iter().map(|c| c.bl_scenario).collect();
    let flips = scenario_flips(&tags);
    assert!(!flips.is_empty());
    assert_eq!(detect_jumps(&bl, JUMP_FACTOR), flips);
}

/// Users mirror each other across `x = 0`.
fn mirrored_layout() -> NodeLayout {
    NodeLayout {
        s1: Point2::new(-6.0, 0.0),
        s2: Point2::new(6.0, 0.0),
        d1: Point2::new(-4.0, 11.0),
        d2: Point2::new(4.0, 11.0),
        ..NodeLayout::reference()
    }
}

#[test]
fn mirrored_layout_mirrors_the_map() {
    let mut c = ScenarioConfig::symmetric();
    c.layout = mirrored_layout();
    c.grid = SweepGrid {
        x_min: -2.0,
        x_max: 2.0,
        y_min: -1.0,
        y_max: 3.0,
        points_per_d0: 2,
    };
    let map = dominance_map(&c).unwrap();
    let nx = map.xs.len();
    for iy in 0..map.ys.len() {
        for ix in 0..nx {
            let (a, b) = (map.get(ix, iy), map.get(nx - 1 - ix, iy));
            for p in Protocol::ALL {
                let (ra, rb) = (a.sum_rate(p).unwrap(), b.sum_rate(p).unwrap());
                // DF refines its grid optimum one coordinate at a time, so
                // mirror cells agree only to within the grid resolution.
                let tol = if p == Protocol::Df { 1e-3 } else { 1e-9 };
                assert!((ra - rb).abs() < tol, "{p:?} at ({}, {}): {ra} {rb}", a.xr, a.yr);
            }
            let mut sums: Vec<f64> = Protocol::ALL.iter().map(|&p| a.sum_rate(p).unwrap()).collect();
            sums.sort_by(|x, y| y.total_cmp(x));
            if sums[0] - sums[1] > 1e-3 {
                assert_eq!(a.winner, b.winner);
            }
        }
    }
}

#[test]
fn symmetric_square_prefers_single_level() {
    let k = 6.0;
    let mut c = ScenarioConfig::symmetric();
    c.layout = NodeLayout {
        s1: Point2::new(-k, -k),
        d1: Point2::new(k, k),
        s2: Point2::new(k, -k),
        d2: Point2::new(-k, k),
        ..NodeLayout::reference()
    };
    let cell = evaluate_compression_cell(&c, 0.0, 0.0).unwrap();
    assert_eq!(cell.winner, Protocol::EfSl);
    assert!(cell.sl_sum > cell.bl_sum);
}

#[test]
fn noisy_second_receiver_prefers_bi_level_everywhere() {
    for mut c in [ScenarioConfig::symmetric(), ScenarioConfig::asymmetric()] {
        c.grid = SweepGrid::compression_map();
        c.noises.n2 = 1e6 * c.noises.n1;
        let map = sl_vs_bl_map(&c).unwrap();
        for cell in &map.cells {
            assert_eq!(cell.winner, Protocol::EfBl, "({}, {})", cell.xr, cell.yr);
        }
    }
}

#[test]
fn compression_maps_are_deterministic_and_mark_the_frontier() {
    for mut c in [ScenarioConfig::symmetric(), ScenarioConfig::asymmetric()] {
        c.grid = SweepGrid::compression_map();
        let a = sl_vs_bl_map(&c).unwrap();
        assert_eq!(a, sl_vs_bl_map(&c).unwrap());
        let nx = a.xs.len();
        let tags: Vec<_> = a.cells.iter().map(|c| c.bl_scenario).collect();
        assert!(tags.contains(&Some(BiScenario::D1Better)) && tags.contains(&Some(BiScenario::D2Better)));
        for (i, cell) in a.cells.iter().enumerate() {
            let (ix, iy) = (i % nx, i / nx);
            let right = ix + 1 < nx && tags[i + 1] != tags[i];
            let up = iy + 1 < a.ys.len() && tags[i + nx] != tags[i];
            if right || up {
                assert!(cell.frontier);
            }
            if !cell.frontier {
                assert!(!right && !up);
            }
        }
        assert!(a.cells.iter().any(|c| c.frontier));
    }
}

#[test]
fn optimal_split_never_loses_to_uniform() {
    let mut u = ScenarioConfig::asymmetric();
    u.optimizer.pa_grid_points = 11;
    let mut o = u.clone();
    o.pa_policy = PaPolicy::Optimal;
    for (x, y) in [(0.5, 0.5), (2.0, 0.2), (-1.0, 1.5)] {
        let (a, b) = (evaluate_cell(&u, x, y).unwrap(), evaluate_cell(&o, x, y).unwrap());
        // (1/2, 1/2) lies on an 11-point simplex grid.
        assert!(b.ef_bl.unwrap() >= a.ef_bl.unwrap() - 1e-12);
        assert_eq!(a.ef_sl, b.ef_sl);
    }
}
