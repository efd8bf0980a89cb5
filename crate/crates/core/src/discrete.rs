//! Exact information measures on finite-alphabet joint distributions, and the
//! estimate-and-forward rate bounds of the discrete memoryless IRC.
//!
//! A [`JointPmf`] is a dense row-major tensor: the last variable varies
//! fastest. Variables are referred to by their position in the tensor.
//! Sums use the `0 log 0 = 0` convention, so outcomes of zero probability
//! contribute nothing.
//!
//! The two factorizations assemble their joint in a fixed variable order,
//! exposed as associated constants:
//!
//! * bi-level: `X1, X2, U1, U2, Xr, Y1, Y2, Yr, Yh1, Yh2`
//! * single-level: `X1, X2, Xr, Y1, Y2, Yr, Yh`

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest number of dense tensor entries accepted.
pub const MAX_ENTRIES: usize = 1_000_000;

/// Normalisation tolerance for joint tensors and conditional rows.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Slack on the compression constraints, so that a left side that is zero up
/// to rounding is not reported as exceeding a right side that is exactly zero.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

fn entry_count(sizes: &[usize]) -> Result<usize> {
    let mut n: usize = 1;
    for &s in sizes {
        if s == 0 {
            return Err(Error::InvalidDistribution("alphabet of size zero"));
        }
        n = match n.checked_mul(s) {
            Some(v) if v <= MAX_ENTRIES => v,
            _ => {
                return Err(Error::TooLarge {
                    entries: n.saturating_mul(s),
                    limit: MAX_ENTRIES,
                })
            }
        };
    }
    Ok(n)
}

fn check_entries(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidDistribution("negative or non-finite probability"));
    }
    Ok(())
}

/// Dense joint distribution over a product of finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Builds a joint from alphabet sizes and row-major probabilities.
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let n = entry_count(&sizes)?;
        if probs.len() != n {
            return Err(Error::InvalidDistribution(
                "probability count does not match the alphabet sizes",
            ));
        }
        check_entries(&probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution("probabilities do not sum to 1"));
        }
        Ok(JointPmf { sizes, probs })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    /// Probability of one outcome, given as one symbol per variable.
    pub fn prob(&self, outcome: &[usize]) -> Result<f64> {
        if outcome.len() != self.sizes.len() {
            return Err(Error::InvalidParams("outcome length differs from variable count"));
        }
        let mut flat = 0;
        for (&x, &s) in outcome.iter().zip(&self.sizes) {
            if x >= s {
                return Err(Error::Domain {
                    what: "symbol index",
                    value: x as f64,
                });
            }
            flat = flat * s + x;
        }
        Ok(self.probs[flat])
    }

    /// Marginal over the variables in `keep`, in the order listed.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointPmf> {
        self.check_vars(keep)?;
        let out_sizes: Vec<usize> = keep.iter().map(|&v| self.sizes[v]).collect();
        let n_out: usize = out_sizes.iter().product();
        // Stride of each source variable inside the output tensor.
        let mut out_stride = vec![0usize; self.sizes.len()];
        let mut stride = 1;
        for (k, &v) in keep.iter().enumerate().rev() {
            out_stride[v] = stride;
            stride *= out_sizes[k];
        }
        let mut out = vec![0.0; n_out];
        let mut digits = vec![0usize; self.sizes.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            // Mixed-radix increment, tracking the output index alongside.
            for v in (0..digits.len()).rev() {
                digits[v] += 1;
                target += out_stride[v];
                if digits[v] < self.sizes[v] {
                    break;
                }
                target -= out_stride[v] * digits[v];
                digits[v] = 0;
            }
        }
        Ok(JointPmf {
            sizes: out_sizes,
            probs: out,
        })
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.sizes.len()];
        for &v in vars {
            if v >= self.sizes.len() {
                return Err(Error::Domain {
                    what: "variable index",
                    value: v as f64,
                });
            }
            if seen[v] {
                return Err(Error::Domain {
                    what: "variable listed twice across groups",
                    value: v as f64,
                });
            }
            seen[v] = true;
        }
        Ok(())
    }
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * libm::log2(p)
    } else {
        0.0
    }
}

/// Joint entropy `H(group)` in bits.
pub fn entropy(pmf: &JointPmf, group: &[usize]) -> Result<f64> {
    let m = pmf.marginalize(group)?;
    Ok(-m.probs.iter().map(|&p| xlog2x(p)).sum::<f64>())
}

/// `I(A; B | C)` in bits. An empty `C` gives the plain mutual information.
/// The groups must be pairwise disjoint.
pub fn conditional_mutual_information(
    pmf: &JointPmf,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let abc = pmf.marginalize(&all)?;
    let (na, nb, nc) = (a.len(), b.len(), c.len());
    let idx = |from: usize, len: usize| (from..from + len).collect::<Vec<_>>();
    let ac = abc.marginalize(&[idx(0, na), idx(na + nb, nc)].concat())?;
    let bc = abc.marginalize(&idx(na, nb + nc))?;
    let c_only = abc.marginalize(&idx(na + nb, nc))?;

    let size_a: usize = abc.sizes[..na].iter().product();
    let size_b: usize = abc.sizes[na..na + nb].iter().product();
    let size_c: usize = abc.sizes[na + nb..].iter().product();
    let mut total = 0.0;
    for ia in 0..size_a {
        for ib in 0..size_b {
            for ic in 0..size_c {
                let p = abc.probs[(ia * size_b + ib) * size_c + ic];
                if p > 0.0 {
                    let ratio =
                        p * c_only.probs[ic] / (ac.probs[ia * size_c + ic] * bc.probs[ib * size_c + ic]);
                    total += p * libm::log2(ratio);
                }
            }
        }
    }
    // The exact value lies in [0, log2 min(|A|, |B|)]; only rounding leaves it.
    let cap = libm::log2(size_a.min(size_b) as f64);
    Ok(total.clamp(0.0, cap))
}

/// `I(A; B)` in bits.
pub fn mutual_information(pmf: &JointPmf, a: &[usize], b: &[usize]) -> Result<f64> {
    conditional_mutual_information(pmf, a, b, &[])
}

/// A probability vector over one finite alphabet.
fn check_marginal(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("alphabet of size zero"));
    }
    check_entries(p)?;
    if (p.iter().sum::<f64>() - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution("marginal does not sum to 1"));
    }
    Ok(())
}

/// Conditional distribution `p(outcome | given)` stored row-major with the
/// conditioning variables first: one row per `given` outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional {
    given: Vec<usize>,
    outcome: Vec<usize>,
    table: Vec<f64>,
}

impl Conditional {
    pub fn new(given: Vec<usize>, outcome: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let rows = entry_count(&given)?;
        let row_len = entry_count(&outcome)?;
        if table.len() != rows * row_len {
            return Err(Error::InvalidDistribution(
                "conditional table size does not match the alphabet sizes",
            ));
        }
        check_entries(&table)?;
        for row in table.chunks(row_len) {
            if (row.iter().sum::<f64>() - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidDistribution("conditional row does not sum to 1"));
            }
        }
        Ok(Conditional {
            given,
            outcome,
            table,
        })
    }

    pub fn given_sizes(&self) -> &[usize] {
        &self.given
    }

    pub fn outcome_sizes(&self) -> &[usize] {
        &self.outcome
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn row_len(&self) -> usize {
        self.outcome.iter().product()
    }

    fn row(&self, given_flat: usize) -> &[f64] {
        let n = self.row_len();
        &self.table[given_flat * n..(given_flat + 1) * n]
    }

    fn expect_shape(&self, given: &[usize], outcome_len: usize, what: &'static str) -> Result<()> {
        if self.given != given || self.outcome.len() != outcome_len {
            Err(Error::InvalidDistribution(what))
        } else {
            Ok(())
        }
    }
}

/// Flat index into a tensor with the given sizes.
fn flat(sizes: &[usize], digits: &[usize]) -> usize {
    sizes.iter().zip(digits).fold(0, |acc, (&s, &d)| acc * s + d)
}

/// Walks every outcome of a tensor with the given sizes, row-major.
fn for_each_outcome(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; sizes.len()];
    loop {
        visit(&digits);
        let mut v = sizes.len();
        loop {
            if v == 0 {
                return;
            }
            v -= 1;
            digits[v] += 1;
            if digits[v] < sizes[v] {
                break;
            }
            digits[v] = 0;
        }
    }
}

/// Rate caps and compression-constraint check of one EF bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBounds {
    pub r1_cap: f64,
    pub r2_cap: f64,
    pub feasible: bool,
    /// `(left side, right side)` of each compression constraint.
    pub constraints: Vec<(f64, f64)>,
}

/// Components of the bi-level compression joint distribution
/// `p(x1) p(x2) p(u1) p(u2) p(xr|u1,u2) p(y1,y2,yr|x1,x2,xr) p(yh1|yr,u1) p(yh2|yr,u2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLevelFactorization {
    pub p_x1: Vec<f64>,
    pub p_x2: Vec<f64>,
    pub p_u1: Vec<f64>,
    pub p_u2: Vec<f64>,
    pub p_xr: Conditional,
    pub channel: Conditional,
    pub p_yh1: Conditional,
    pub p_yh2: Conditional,
}

impl BiLevelFactorization {
    pub const X1: usize = 0;
    pub const X2: usize = 1;
    pub const U1: usize = 2;
    pub const U2: usize = 3;
    pub const XR: usize = 4;
    pub const Y1: usize = 5;
    pub const Y2: usize = 6;
    pub const YR: usize = 7;
    pub const YH1: usize = 8;
    pub const YH2: usize = 9;

    /// Validates every component and the alphabet sizes they share.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        p_u1: Vec<f64>,
        p_u2: Vec<f64>,
        p_xr: Conditional,
        channel: Conditional,
        p_yh1: Conditional,
        p_yh2: Conditional,
    ) -> Result<Self> {
        let f = BiLevelFactorization {
            p_x1,
            p_x2,
            p_u1,
            p_u2,
            p_xr,
            channel,
            p_yh1,
            p_yh2,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [&self.p_x1, &self.p_x2, &self.p_u1, &self.p_u2] {
            check_marginal(p)?;
        }
        let (u1, u2) = (self.p_u1.len(), self.p_u2.len());
        self.p_xr
            .expect_shape(&[u1, u2], 1, "p(xr|u1,u2) must be indexed by (U1, U2)")?;
        let xr = self.p_xr.outcome[0];
        self.channel.expect_shape(
            &[self.p_x1.len(), self.p_x2.len(), xr],
            3,
            "channel must map (X1, X2, Xr) to (Y1, Y2, Yr)",
        )?;
        let yr = self.channel.outcome[2];
        self.p_yh1
            .expect_shape(&[yr, u1], 1, "p(yh1|yr,u1) must be indexed by (Yr, U1)")?;
        self.p_yh2
            .expect_shape(&[yr, u2], 1, "p(yh2|yr,u2) must be indexed by (Yr, U2)")?;
        Ok(())
    }

    pub fn sizes(&self) -> [usize; 10] {
        let ch = &self.channel.outcome;
        [
            self.p_x1.len(),
            self.p_x2.len(),
            self.p_u1.len(),
            self.p_u2.len(),
            self.p_xr.outcome[0],
            ch[0],
            ch[1],
            ch[2],
            self.p_yh1.outcome[0],
            self.p_yh2.outcome[0],
        ]
    }

    /// The joint tensor in the order `X1, X2, U1, U2, Xr, Y1, Y2, Yr, Yh1, Yh2`.
    pub fn joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let sizes = self.sizes();
        entry_count(&sizes)?;
        let mut probs = Vec::with_capacity(sizes.iter().product());
        for_each_outcome(&sizes, |d| {
            let (x1, x2, u1, u2, xr, y1, y2, yr, w1, w2) =
                (d[0], d[1], d[2], d[3], d[4], d[5], d[6], d[7], d[8], d[9]);
            let p = self.p_x1[x1]
                * self.p_x2[x2]
                * self.p_u1[u1]
                * self.p_u2[u2]
                * self.p_xr.row(flat(&sizes[2..4], &[u1, u2]))[xr]
                * self.channel.row(flat(&[sizes[0], sizes[1], sizes[4]], &[x1, x2, xr]))
                    [flat(&sizes[5..8], &[y1, y2, yr])]
                * self.p_yh1.row(yr * sizes[2] + u1)[w1]
                * self.p_yh2.row(yr * sizes[3] + u2)[w2];
            probs.push(p);
        });
        // A product of normalised factors is normalised up to rounding.
        Ok(JointPmf {
            sizes: sizes.to_vec(),
            probs,
        })
    }
}

/// Bi-level bounds: `Ri <= I(Xi; Yi, Yhi | Ui)` under
/// `I(Yr; Yhi | Ui, Yi) <= I(Ui; Yi)` for both users.
pub fn bi_level_bounds(fact: &BiLevelFactorization) -> Result<DiscreteBounds> {
    type F = BiLevelFactorization;
    let joint = fact.joint()?;
    let user = |x: usize, y: usize, yh: usize, u: usize| -> Result<(f64, f64, f64)> {
        let cap = conditional_mutual_information(&joint, &[x], &[y, yh], &[u])?;
        let lhs = conditional_mutual_information(&joint, &[F::YR], &[yh], &[u, y])?;
        let rhs = mutual_information(&joint, &[u], &[y])?;
        Ok((cap, lhs, rhs))
    };
    let (r1, l1, h1) = user(F::X1, F::Y1, F::YH1, F::U1)?;
    let (r2, l2, h2) = user(F::X2, F::Y2, F::YH2, F::U2)?;
    Ok(DiscreteBounds {
        r1_cap: r1,
        r2_cap: r2,
        feasible: l1 <= h1 + FEASIBILITY_SLACK && l2 <= h2 + FEASIBILITY_SLACK,
        constraints: vec![(l1, h1), (l2, h2)],
    })
}

/// Components of the single-level compression joint distribution
/// `p(x1) p(x2) p(xr) p(y1,y2,yr|x1,x2,xr) p(yh|yr,xr)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLevelFactorization {
    pub p_x1: Vec<f64>,
    pub p_x2: Vec<f64>,
    pub p_xr: Vec<f64>,
    pub channel: Conditional,
    pub p_yh: Conditional,
}

impl SingleLevelFactorization {
    pub const X1: usize = 0;
    pub const X2: usize = 1;
    pub const XR: usize = 2;
    pub const Y1: usize = 3;
    pub const Y2: usize = 4;
    pub const YR: usize = 5;
    pub const YH: usize = 6;

    pub fn new(
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        p_xr: Vec<f64>,
        channel: Conditional,
        p_yh: Conditional,
    ) -> Result<Self> {
        let f = SingleLevelFactorization {
            p_x1,
            p_x2,
            p_xr,
            channel,
            p_yh,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [&self.p_x1, &self.p_x2, &self.p_xr] {
            check_marginal(p)?;
        }
        self.channel.expect_shape(
            &[self.p_x1.len(), self.p_x2.len(), self.p_xr.len()],
            3,
            "channel must map (X1, X2, Xr) to (Y1, Y2, Yr)",
        )?;
        self.p_yh.expect_shape(
            &[self.channel.outcome[2], self.p_xr.len()],
            1,
            "p(yh|yr,xr) must be indexed by (Yr, Xr)",
        )
    }

    pub fn sizes(&self) -> [usize; 7] {
        let ch = &self.channel.outcome;
        [
            self.p_x1.len(),
            self.p_x2.len(),
            self.p_xr.len(),
            ch[0],
            ch[1],
            ch[2],
            self.p_yh.outcome[0],
        ]
    }

    /// The joint tensor in the order `X1, X2, Xr, Y1, Y2, Yr, Yh`.
    pub fn joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let sizes = self.sizes();
        entry_count(&sizes)?;
        let mut probs = Vec::with_capacity(sizes.iter().product());
        for_each_outcome(&sizes, |d| {
            let (x1, x2, xr, yr, yh) = (d[0], d[1], d[2], d[5], d[6]);
            let p = self.p_x1[x1]
                * self.p_x2[x2]
                * self.p_xr[xr]
                * self.channel.row(flat(&sizes[..3], &d[..3]))[flat(&sizes[3..6], &d[3..6])]
                * self.p_yh.row(yr * sizes[2] + xr)[yh];
            probs.push(p);
        });
        Ok(JointPmf {
            sizes: sizes.to_vec(),
            probs,
        })
    }
}

/// Single-level bounds: `Ri <= I(Xi; Yi, Yh | Xr)` under
/// `max_i I(Yr; Yh | Xr, Yi) <= min_i I(Xr; Yi)`.
pub fn single_level_bounds(fact: &SingleLevelFactorization) -> Result<DiscreteBounds> {
    type F = SingleLevelFactorization;
    let joint = fact.joint()?;
    let r1 = conditional_mutual_information(&joint, &[F::X1], &[F::Y1, F::YH], &[F::XR])?;
    let r2 = conditional_mutual_information(&joint, &[F::X2], &[F::Y2, F::YH], &[F::XR])?;
    let mut lhs: f64 = 0.0;
    let mut rhs = f64::INFINITY;
    for y in [F::Y1, F::Y2] {
        lhs = lhs.max(conditional_mutual_information(&joint, &[F::YR], &[F::YH], &[F::XR, y])?);
        rhs = rhs.min(mutual_information(&joint, &[F::XR], &[y])?);
    }
    Ok(DiscreteBounds {
        r1_cap: r1,
        r2_cap: r2,
        feasible: lhs <= rhs + FEASIBILITY_SLACK,
        constraints: vec![(lhs, rhs)],
    })
}
