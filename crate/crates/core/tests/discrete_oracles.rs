//! Discrete information measures against an independent entropy-sum oracle
//! built from a hash map of outcomes.

mod common;

use std::collections::HashMap;

use common::rng;
use irc_core::discrete::*;
use rand::Rng;

type Table = HashMap<Vec<usize>, f64>;

fn random_pmf<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    // Occasionally zero out a letter to exercise the 0 log 0 convention.
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

fn random_conditional<R: Rng>(rng: &mut R, given: &[usize], outcome: &[usize]) -> Conditional {
    let rows: usize = given.iter().product();
    let len: usize = outcome.iter().product();
    let table = (0..rows).flat_map(|_| random_pmf(rng, len)).collect();
    Conditional::new(given.to_vec(), outcome.to_vec(), table).unwrap()
}

fn size<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=3)
}

fn random_bi<R: Rng>(rng: &mut R) -> BiLevelFactorization {
    let (x1, x2, u1, u2, xr) = (size(rng), size(rng), size(rng), size(rng), size(rng));
    let (y1, y2, yr, w1, w2) = (size(rng), size(rng), size(rng), size(rng), size(rng));
    BiLevelFactorization::new(
        random_pmf(rng, x1),
        random_pmf(rng, x2),
        random_pmf(rng, u1),
        random_pmf(rng, u2),
        random_conditional(rng, &[u1, u2], &[xr]),
        random_conditional(rng, &[x1, x2, xr], &[y1, y2, yr]),
        random_conditional(rng, &[yr, u1], &[w1]),
        random_conditional(rng, &[yr, u2], &[w2]),
    )
    .unwrap()
}

fn random_single<R: Rng>(rng: &mut R) -> SingleLevelFactorization {
    let (x1, x2, xr) = (size(rng), size(rng), size(rng));
    let (y1, y2, yr, w) = (size(rng), size(rng), size(rng), size(rng));
    SingleLevelFactorization::new(
        random_pmf(rng, x1),
        random_pmf(rng, x2),
        random_pmf(rng, xr),
        random_conditional(rng, &[x1, x2, xr], &[y1, y2, yr]),
        random_conditional(rng, &[yr, xr], &[w]),
    )
    .unwrap()
}

fn cond(c: &Conditional, given: &[usize], outcome: &[usize]) -> f64 {
    let gi = given.iter().zip(c.given_sizes()).fold(0, |a, (&d, &s)| a * s + d);
    let oi = outcome.iter().zip(c.outcome_sizes()).fold(0, |a, (&d, &s)| a * s + d);
    let len: usize = c.outcome_sizes().iter().product();
    c.table()[gi * len + oi]
}

/// Every outcome of the product form, keyed by its symbol vector.
fn bi_table(f: &BiLevelFactorization) -> Table {
    let s = f.sizes();
    let mut t = Table::new();
    for x1 in 0..s[0] {
        for x2 in 0..s[1] {
            for u1 in 0..s[2] {
                for u2 in 0..s[3] {
                    for xr in 0..s[4] {
                        for y1 in 0..s[5] {
                            for y2 in 0..s[6] {
                                for yr in 0..s[7] {
                                    for w1 in 0..s[8] {
                                        for w2 in 0..s[9] {
                                            let p = f.p_x1[x1]
                                                * f.p_x2[x2]
                                                * f.p_u1[u1]
                                                * f.p_u2[u2]
                                                * cond(&f.p_xr, &[u1, u2], &[xr])
                                                * cond(&f.channel, &[x1, x2, xr], &[y1, y2, yr])
                                                * cond(&f.p_yh1, &[yr, u1], &[w1])
                                                * cond(&f.p_yh2, &[yr, u2], &[w2]);
                                            t.insert(vec![x1, x2, u1, u2, xr, y1, y2, yr, w1, w2], p);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

fn single_table(f: &SingleLevelFactorization) -> Table {
    let s = f.sizes();
    let mut t = Table::new();
    for x1 in 0..s[0] {
        for x2 in 0..s[1] {
            for xr in 0..s[2] {
                for y1 in 0..s[3] {
                    for y2 in 0..s[4] {
                        for yr in 0..s[5] {
                            for w in 0..s[6] {
                                let p = f.p_x1[x1]
                                    * f.p_x2[x2]
                                    * f.p_xr[xr]
                                    * cond(&f.channel, &[x1, x2, xr], &[y1, y2, yr])
                                    * cond(&f.p_yh, &[yr, xr], &[w]);
                                t.insert(vec![x1, x2, xr, y1, y2, yr, w], p);
                            }
                        }
                    }
                }
            }
        }
    }
    t
}

fn h(t: &Table, group: &[usize]) -> f64 {
    let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
    for (k, &p) in t {
        *m.entry(group.iter().map(|&v| k[v]).collect()).or_default() += p;
    }
    m.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn cmi(t: &Table, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let ac = [a, c].concat();
    let bc = [b, c].concat();
    let abc = [a, b, c].concat();
    h(t, &ac) + h(t, &bc) - h(t, &abc) - h(t, c)
}

fn table_of(pmf: &JointPmf) -> Table {
    let mut t = Table::new();
    let sizes = pmf.sizes().to_vec();
    for (k, &p) in pmf.probabilities().iter().enumerate() {
        let mut idx = vec![0; sizes.len()];
        let mut r = k;
        for v in (0..sizes.len()).rev() {
            idx[v] = r % sizes[v];
            r /= sizes[v];
        }
        t.insert(idx, p);
    }
    t
}

#[test]
fn cmi_matches_entropy_sum_oracle() {
    let mut rng = rng(71);
    for _ in 0..300 {
        let sizes: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=3)).collect();
        let n = sizes.iter().product();
        let pmf = JointPmf::new(sizes, random_pmf(&mut rng, n)).unwrap();
        let t = table_of(&pmf);
        for (a, b, c) in [
            (vec![0], vec![1], vec![]),
            (vec![0], vec![1], vec![2, 3]),
            (vec![3, 1], vec![0], vec![2]),
            (vec![2], vec![0, 1, 3], vec![]),
        ] {
            let got = conditional_mutual_information(&pmf, &a, &b, &c).unwrap();
            assert!((got - cmi(&t, &a, &b, &c)).abs() < 1e-12);
            assert!(got >= 0.0);
        }
        assert!((entropy(&pmf, &[2, 0]).unwrap() - h(&t, &[0, 2])).abs() < 1e-12);
    }
}

#[test]
fn bi_level_bounds_match_full_tensor_oracle() {
    let mut rng = rng(72);
    type F = BiLevelFactorization;
    for _ in 0..100 {
        let f = random_bi(&mut rng);
        let t = bi_table(&f);
        let b = bi_level_bounds(&f).unwrap();
        let r1 = cmi(&t, &[F::X1], &[F::Y1, F::YH1], &[F::U1]);
        let r2 = cmi(&t, &[F::X2], &[F::Y2, F::YH2], &[F::U2]);
        let l1 = cmi(&t, &[F::YR], &[F::YH1], &[F::U1, F::Y1]);
        let l2 = cmi(&t, &[F::YR], &[F::YH2], &[F::U2, F::Y2]);
        let h1 = cmi(&t, &[F::U1], &[F::Y1], &[]);
        let h2 = cmi(&t, &[F::U2], &[F::Y2], &[]);
        assert!((b.r1_cap - r1).abs() < 1e-12 && (b.r2_cap - r2).abs() < 1e-12);
        for (got, want) in b.constraints.iter().zip([(l1, h1), (l2, h2)]) {
            assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12);
        }
        if (l1 - h1).abs() > 1e-9 && (l2 - h2).abs() > 1e-9 {
            assert_eq!(b.feasible, l1 <= h1 && l2 <= h2);
        }
    }
}

#[test]
fn single_level_bounds_match_full_tensor_oracle() {
    let mut rng = rng(73);
    type F = SingleLevelFactorization;
    for _ in 0..300 {
        let f = random_single(&mut rng);
        let t = single_table(&f);
        let b = single_level_bounds(&f).unwrap();
        let r1 = cmi(&t, &[F::X1], &[F::Y1, F::YH], &[F::XR]);
        let r2 = cmi(&t, &[F::X2], &[F::Y2, F::YH], &[F::XR]);
        let lhs = cmi(&t, &[F::YR], &[F::YH], &[F::XR, F::Y1]).max(cmi(&t, &[F::YR], &[F::YH], &[F::XR, F::Y2]));
        let rhs = cmi(&t, &[F::XR], &[F::Y1], &[]).min(cmi(&t, &[F::XR], &[F::Y2], &[]));
        assert!((b.r1_cap - r1).abs() < 1e-12 && (b.r2_cap - r2).abs() < 1e-12);
        assert!((b.constraints[0].0 - lhs).abs() < 1e-12);
        assert!((b.constraints[0].1 - rhs).abs() < 1e-12);
    }
}

#[test]
fn chain_rule_holds() {
    let mut rng = rng(74);
    for _ in 0..300 {
        let sizes: Vec<usize> = (0..4).map(|_| rng.gen_range(1..=3)).collect();
        let n = sizes.iter().product();
        let pmf = JointPmf::new(sizes, random_pmf(&mut rng, n)).unwrap();
        let (x, y, yh, u) = (0, 1, 2, 3);
        let whole = conditional_mutual_information(&pmf, &[x], &[y, yh], &[u]).unwrap();
        let parts = conditional_mutual_information(&pmf, &[x], &[y], &[u]).unwrap()
            + conditional_mutual_information(&pmf, &[x], &[yh], &[u, y]).unwrap();
        assert!((whole - parts).abs() < 1e-12);
    }
}

#[test]
fn single_level_compression_is_markov() {
    let mut rng = rng(75);
    type F = SingleLevelFactorization;
    for _ in 0..300 {
        let joint = random_single(&mut rng).joint().unwrap();
        for y in [F::Y1, F::Y2] {
            let i = conditional_mutual_information(&joint, &[F::YH], &[y], &[F::XR, F::YR]).unwrap();
            assert!(i <= 1e-12);
        }
    }
}

#[test]
fn constraint_rewrite_identity() {
    let mut rng = rng(76);
    type F = SingleLevelFactorization;
    for _ in 0..300 {
        let joint = random_single(&mut rng).joint().unwrap();
        let i = |a: &[usize], b: &[usize], c: &[usize]| conditional_mutual_information(&joint, a, b, c).unwrap();
        let lhs = i(&[F::YH], &[F::YR], &[F::XR])
            - i(&[F::YH], &[F::Y1], &[F::XR]).min(i(&[F::YH], &[F::Y2], &[F::XR]));
        let rhs = i(&[F::YH], &[F::YR], &[F::XR, F::Y1]).max(i(&[F::YH], &[F::YR], &[F::XR, F::Y2]));
        assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn quantities_respect_alphabet_bounds() {
    let mut rng = rng(77);
    for _ in 0..200 {
        let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
        let n = sizes.iter().product();
        let pmf = JointPmf::new(sizes.clone(), random_pmf(&mut rng, n)).unwrap();
        let i = conditional_mutual_information(&pmf, &[0], &[1], &[2]).unwrap();
        assert!(i >= 0.0 && i <= (sizes[0].min(sizes[1]) as f64).log2() + 1e-15);
        let m = pmf.marginalize(&[2, 0]).unwrap();
        assert!((m.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
