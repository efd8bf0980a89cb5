//! Oracle checks for the estimate-and-forward routines.

mod common;

use common::*;
use irc_core::channel::{layout_to_channel, ChannelInstance, Gains, NodeLayout, Noises, Powers};
use irc_core::ef::*;
use irc_core::User;
use num_complex::Complex64;
use rand::Rng;

fn cap(x: f64) -> f64 {
    (1.0 + x).log2()
}

/// Residual variance of `Yr` after LMMSE estimation from the source part of
/// `Y_i`, from the joint covariance of `(Yr, Y_i)` over `(X1, X2, Zr, Z_i)`.
fn schur_residual(ch: &ChannelInstance, user: User) -> f64 {
    let g = ch.gains();
    let (p1, p2) = (ch.powers().p1, ch.powers().p2);
    let (hy1, hy2, ni) = match user {
        User::One => (g.h11, g.h21, ch.noises().n1),
        User::Two => (g.h12, g.h22, ch.noises().n2),
    };
    // Rows: Yr, Yi. Columns: X1, X2, Zr, Zi with variances P1, P2, Nr, Ni.
    let rows = [
        [g.h1r, g.h2r, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [hy1, hy2, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let var = [p1, p2, ch.noises().nr, ni];
    let cov = |a: usize, b: usize| -> Complex64 {
        (0..4).map(|k| rows[a][k] * rows[b][k].conj() * var[k]).sum()
    };
    let k_rr = cov(0, 0).re;
    let k_ii = cov(1, 1).re;
    let k_ri = cov(0, 1);
    k_rr - k_ri.norm_sqr() / k_ii
}

#[test]
fn sigma_matches_schur_complement() {
    let mut rng = rng(41);
    for _ in 0..1000 {
        let ch = random_channel(&mut rng);
        let d = EfDerived::new(&ch);
        for user in User::BOTH {
            let oracle = schur_residual(&ch, user);
            assert!((d.sigma_sq(user) - oracle).abs() <= 1e-10 * oracle.abs().max(1.0));
        }
        // And the single-level bound is built from the larger one.
        if let Ok(nwz) = ef_sl_min_noise(&ch, R0Exponent::One) {
            let x = User::BOTH
                .iter()
                .map(|&u| ch.from_relay(u).norm_sqr() * ch.relay_power() / ch.destination_receive_power(u))
                .fold(f64::INFINITY, f64::min);
            let expected = schur_residual(&ch, User::One).max(schur_residual(&ch, User::Two)) / x;
            assert!((nwz - expected).abs() <= 1e-10 * expected);
        }
    }
}

#[test]
fn noise_bounds_are_nonnegative() {
    let mut rng = rng(42);
    for _ in 0..2000 {
        let ch = random_channel(&mut rng);
        let nu1: f64 = rng.gen_range(0.01..0.99);
        let nu2 = rng.gen_range(0.0..(1.0 - nu1)).max(1e-3);
        for s in [BiScenario::D1Better, BiScenario::D2Better, BiScenario::Neither] {
            let (a, b) = ef_bi_min_noise(&ch, nu1, nu2, s).unwrap();
            assert!(a >= 0.0 && b >= 0.0);
        }
        assert!(ef_sl_min_noise(&ch, R0Exponent::Two).unwrap() >= 0.0);
    }
}

#[test]
fn bounds_scale_with_common_budget_factor() {
    let mut rng = rng(43);
    for _ in 0..100 {
        let ch = random_channel(&mut rng);
        let lambda = 12.5;
        let p = ch.powers();
        let n = ch.noises();
        let scaled = ch
            .with_budget(
                Powers { p1: p.p1 * lambda, p2: p.p2 * lambda, pr: p.pr * lambda },
                Noises { n1: n.n1 * lambda, n2: n.n2 * lambda, nr: n.nr * lambda },
            )
            .unwrap();
        for s in [BiScenario::D1Better, BiScenario::D2Better, BiScenario::Neither] {
            let (a, b) = ef_bi_min_noise(&ch, 0.3, 0.6, s).unwrap();
            let (sa, sb) = ef_bi_min_noise(&scaled, 0.3, 0.6, s).unwrap();
            assert!((sa - lambda * a).abs() <= 1e-11 * sa);
            assert!((sb - lambda * b).abs() <= 1e-11 * sb);
        }
    }
}

#[test]
fn huge_noise_and_tiny_share_give_interference_baseline() {
    let mut rng = rng(44);
    for _ in 0..1000 {
        let ch = random_channel(&mut rng);
        let base = ch.interference_channel_rates();
        let sl = ef_sl_rate(&ch, 1e12, R0Exponent::Two).unwrap();
        assert!((sl.r1 - base.r1).abs() < 1e-6 && (sl.r2 - base.r2).abs() < 1e-6);

        let nu = 1e-12;
        let s = ef_bi_scenario(&ch, nu, nu).unwrap();
        let (b1, b2) = ef_bi_min_noise(&ch, nu, nu, s).unwrap();
        let params = EfBiParams { nu1: nu, nu2: nu, nwz1: b1.max(1e12), nwz2: b2.max(1e12) };
        let bl = ef_bi_rate(&ch, &params, s).unwrap();
        assert!((bl.r1 - base.r1).abs() < 1e-6 && (bl.r2 - base.r2).abs() < 1e-6);
    }
}

#[test]
fn d1_better_never_hurts_user_one() {
    let mut rng = rng(45);
    for _ in 0..500 {
        let ch = random_channel(&mut rng);
        let (nu1, nu2) = (0.4, 0.5);
        let (n1_s1, _) = ef_bi_min_noise(&ch, nu1, nu2, BiScenario::D1Better).unwrap();
        let (n1_s3, n2_s3) = ef_bi_min_noise(&ch, nu1, nu2, BiScenario::Neither).unwrap();
        // Same noise for user 1 in both evaluations (the larger bound).
        let params = EfBiParams { nu1, nu2, nwz1: n1_s3.max(n1_s1), nwz2: n2_s3 };
        let r1 = ef_bi_rate(&ch, &params, BiScenario::D1Better).unwrap().r1;
        let r3 = ef_bi_rate(&ch, &params, BiScenario::Neither).unwrap().r1;
        assert!(r1 >= r3);
    }
}

#[test]
fn rates_decrease_in_compression_noise() {
    let mut rng = rng(46);
    for _ in 0..200 {
        let ch = random_channel(&mut rng);
        if let Ok(base) = ef_sl_min_noise(&ch, R0Exponent::Two) {
            let mut prev = ef_sl_rate(&ch, base, R0Exponent::Two).unwrap();
            for k in 1..20 {
                let r = ef_sl_rate(&ch, base * (1.0 + 0.5 * k as f64) + 0.01 * k as f64, R0Exponent::Two).unwrap();
                assert!(r.r1 < prev.r1 && r.r2 < prev.r2);
                prev = r;
            }
        }
        let (p, s, _) = ef_bi_rate_at_min_noise(&ch, 0.5, 0.5).unwrap();
        let mut prev = ef_bi_rate(&ch, &p, s).unwrap();
        for k in 1..20 {
            let bump = 1.0 + 0.5 * k as f64;
            let q = EfBiParams { nwz1: p.nwz1 * bump + 0.01 * k as f64, ..p };
            let r = ef_bi_rate(&ch, &q, s).unwrap();
            assert!(r.r1 < prev.r1);
            assert_eq!(r.r2, prev.r2);
            prev = r;
        }
    }
}

#[test]
fn single_user_reduces_to_relay_channel_cf_rate() {
    let ch = ChannelInstance::new(
        Gains::real([0.8, 0.0, 0.0, 0.5, 0.9, 0.0, 0.7, 0.4]),
        Powers { p1: 4.0, p2: 2.0, pr: 6.0 },
        Noises { n1: 1.5, n2: 1.0, nr: 0.7 },
    )
    .unwrap();
    let nwz = ef_sl_min_noise(&ch, R0Exponent::Two).unwrap() * 1.7;
    let r = ef_sl_rate(&ch, nwz, R0Exponent::Two).unwrap();
    let expected = cap(0.64 * 4.0 / 1.5 + 0.81 * 4.0 / (0.7 + nwz));
    assert!((r.r1 - expected).abs() < 1e-14);
}

#[test]
fn symmetric_channel_gives_equal_sigmas_and_rates() {
    let ch = ChannelInstance::new(
        Gains::real([0.7, 0.3, 0.3, 0.7, 0.8, 0.8, 0.6, 0.6]),
        Powers { p1: 10.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    let d = EfDerived::new(&ch);
    assert_eq!(d.sigma1_sq, d.sigma2_sq);
    let r0 = ef_sl_bottleneck(&ch);
    let single = cap(0.36 * 10.0 / (0.49 * 10.0 + 0.09 * 10.0 + 1.0));
    assert!((r0 - single).abs() < 1e-15);
    let (_, r) = ef_sl_rate_at_min_noise(&ch, R0Exponent::Two).unwrap();
    assert_eq!(r.r1, r.r2);
}

/// Perfectly symmetric draw: mirror-identical complex gains.
fn symmetric_draw<R: Rng>(rng: &mut R) -> ChannelInstance {
    let direct = unit_disc(rng);
    let cross = unit_disc(rng);
    let to_relay = unit_disc(rng);
    let from_relay = unit_disc(rng);
    let p = log_uniform(rng);
    let n = log_uniform(rng);
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
        Powers { p1: p, p2: p, pr: log_uniform(rng) },
        Noises { n1: n, n2: n, nr: log_uniform(rng) },
    )
    .unwrap()
}

#[test]
fn symmetric_single_level_noise_is_lower() {
    let mut rng = rng(47);
    for _ in 0..1000 {
        let ch = symmetric_draw(&mut rng);
        let s = ef_bi_scenario(&ch, 0.5, 0.5).unwrap();
        let (a, b) = ef_bi_min_noise(&ch, 0.5, 0.5, s).unwrap();
        for e in [R0Exponent::Two, R0Exponent::One] {
            assert!(ef_sl_min_noise(&ch, e).unwrap() <= a.min(b));
        }
    }
}

#[test]
fn asymmetric_noise_limits() {
    let mut rng = rng(48);
    for _ in 0..1000 {
        let ch = random_channel(&mut rng);
        let n = *ch.noises();
        let ch = ch
            .with_budget(*ch.powers(), Noises { n2: 1e6 * n.n1, ..n })
            .unwrap();
        let (_, sl) = ef_sl_rate_at_min_noise(&ch, R0Exponent::Two).unwrap();
        let (p, s, bl) = ef_bi_rate_at_min_noise(&ch, 0.5, 0.5).unwrap();
        assert_eq!(s, BiScenario::D1Better);
        let g = ch.gains();
        let pw = ch.powers();
        let lim_sl = cap(g.h11.norm_sqr() * pw.p1 / (g.h21.norm_sqr() * pw.p2 + n.n1));
        let q = n.nr + p.nwz1;
        let lim_bl = cap(
            g.h11.norm_sqr() * pw.p1 / (n.n1 + g.h21.norm_sqr() * pw.p2 * q / (g.h2r.norm_sqr() * pw.p2 + q))
                + g.h1r.norm_sqr() * pw.p1
                    / (q + g.h2r.norm_sqr() * pw.p2 * n.n1 / (g.h21.norm_sqr() * pw.p2 + n.n1)),
        );
        assert!((sl.r1 - lim_sl).abs() < 1e-3);
        assert!((bl.r1 - lim_bl).abs() < 1e-3);
        assert!(sl.r2 <= 1e-3 && bl.r2 <= 1e-3);
    }
}

#[test]
fn relay_next_to_d2_makes_d2_better() {
    let layout = NodeLayout::reference();
    let ch = layout_to_channel(
        &layout.with_relay(layout.d2.x, layout.d2.y),
        Powers { p1: 10.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    // Independent evaluation of both printed conditions.
    let g = ch.gains();
    let b1 = g.h11.norm_sqr() * 10.0 + g.h21.norm_sqr() * 10.0 + 1.0;
    let b2 = g.h22.norm_sqr() * 10.0 + g.h12.norm_sqr() * 10.0 + 1.0;
    let (r1, r2) = (g.hr1.norm_sqr(), g.hr2.norm_sqr());
    let c1 = cap(r1 * 5.0 / (b1 + r1 * 5.0)) >= cap(r2 * 5.0 / (b2 + r2 * 5.0));
    let c2 = cap(r2 * 5.0 / (b2 + r2 * 5.0)) >= cap(r1 * 5.0 / (b1 + r1 * 5.0));
    assert!(!c1 && c2);
    assert_eq!(ef_bi_scenario(&ch, 0.5, 0.5).unwrap(), BiScenario::D2Better);
}

#[test]
fn bottleneck_near_d1_is_set_by_receiver_two() {
    let layout = NodeLayout::reference();
    let ch = layout_to_channel(
        &layout.with_relay(layout.d1.x, layout.d1.y + 1.0),
        Powers { p1: 3.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    let g = ch.gains();
    let t1 = cap(g.hr1.norm_sqr() * 10.0 / (g.h11.norm_sqr() * 3.0 + g.h21.norm_sqr() * 10.0 + 1.0));
    let t2 = cap(g.hr2.norm_sqr() * 10.0 / (g.h22.norm_sqr() * 10.0 + g.h12.norm_sqr() * 3.0 + 1.0));
    assert!(t2 < t1);
    assert!((ef_sl_bottleneck(&ch) - t2).abs() < 1e-15);
}

#[test]
fn sweep_without_relay_links_gives_baseline() {
    let ch = ChannelInstance::new(
        Gains::real([0.8, 0.3, 0.4, 0.6, 0.9, 0.7, 0.0, 0.0]),
        Powers { p1: 10.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    let (_, _, r) = ef_bi_sum_rate_search(&ch, 21).unwrap();
    assert!((r.sum() - ch.interference_channel_rates().sum()).abs() < 1e-15);
}

#[test]
fn symmetric_channel_ties_favour_user_one() {
    let ch = ChannelInstance::new(
        Gains::real([0.7, 0.3, 0.3, 0.7, 0.8, 0.8, 0.6, 0.6]),
        Powers { p1: 10.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    for k in 1..20 {
        let nu = k as f64 / 40.0;
        let (_, s, r) = ef_bi_rate_at_min_noise(&ch, nu, nu).unwrap();
        assert_eq!(s, BiScenario::D1Better);
        assert!(r.r1 >= r.r2);
    }
    let (p, s, r) = ef_bi_sum_rate_search(&ch, 41).unwrap();
    assert_eq!(s, BiScenario::D1Better);
    let (_, _, again) = ef_bi_rate_at_min_noise(&ch, p.nu1, p.nu2).unwrap();
    assert_eq!(again.sum(), r.sum());
}

#[test]
fn sweep_matches_dense_brute_force() {
    let layout = NodeLayout::reference();
    let d0 = layout.d0;
    let ch = layout_to_channel(
        &layout.with_relay(0.5 * d0, 0.5 * d0),
        Powers { p1: 10.0, p2: 10.0, pr: 10.0 },
        Noises { n1: 1.0, n2: 1.0, nr: 1.0 },
    )
    .unwrap();
    let (_, _, coarse) = ef_bi_sum_rate_search(&ch, 51).unwrap();
    let n = 401;
    let mut best = f64::NEG_INFINITY;
    for k1 in 1..n {
        for k2 in 1..=(n - k1) {
            let (nu1, nu2) = (k1 as f64 / n as f64, k2 as f64 / n as f64);
            if let Ok((_, _, r)) = ef_bi_rate_at_min_noise(&ch, nu1, nu2) {
                best = best.max(r.sum());
            }
        }
    }
    assert!(coarse.sum() <= best + 1e-3);
    assert!(coarse.sum() >= best - 2e-2, "{} vs {}", coarse.sum(), best);
}
