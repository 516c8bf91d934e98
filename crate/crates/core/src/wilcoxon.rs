//! Exact null distribution of the Wilcoxon-Mann-Whitney statistic.
//!
//! For a learner that ignores its training set and ranks by a fixed score,
//! the number of LPO errors on a uniformly random labeling follows the
//! classical WMW distribution. `Q(W, n, w)` counts the labelings of
//! `S(n, w)` with at most `W` discordant pairs:
//!
//! ```text
//! Q(W, n, w) = 0                                   W < 0
//!            = C(n, w)                             W >= w (n - w)
//!            = W + 1                               w = 1 or n - w = 1
//!            = Q(W, n-1, w) + Q(W-n+w, n-1, w-1)   otherwise
//! ```
//!
//! All counts are arbitrary precision and p-values exact rationals.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// `C(n, k)` without overflow.
pub fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * BigUint::from(n - k + i) / BigUint::from(i);
    }
    acc
}

fn check(n: usize, w: usize) -> Result<()> {
    if w == 0 || w >= n {
        return Err(Error::param(format!("need 0 < w < n, got n={n}, w={w}")));
    }
    Ok(())
}

/// Memo table for `Q`, keyed by `(W, n, min(w, n - w))`.
#[derive(Default, Debug)]
pub struct QTable {
    memo: HashMap<(i64, usize, usize), BigUint>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of labelings in `S(n, w)` with at most `errors` discordant pairs.
    pub fn q(&mut self, errors: i64, n: usize, w: usize) -> Result<BigUint> {
        check(n, w)?;
        Ok(self.q_inner(errors, n, w))
    }

    fn q_inner(&mut self, errors: i64, n: usize, w: usize) -> BigUint {
        let w = w.min(n - w);
        if errors < 0 {
            return BigUint::zero();
        }
        if errors as u128 >= (w * (n - w)) as u128 {
            return big_binomial(n, w);
        }
        if w == 1 {
            return BigUint::from(errors as u64 + 1);
        }
        if let Some(v) = self.memo.get(&(errors, n, w)) {
            return v.clone();
        }
        let v = self.q_inner(errors, n - 1, w) + self.q_inner(errors - (n - w) as i64, n - 1, w - 1);
        self.memo.insert((errors, n, w), v.clone());
        v
    }
}

/// `Q(errors, n, w)` with a fresh memo table.
pub fn q_count(errors: i64, n: usize, w: usize) -> Result<BigUint> {
    QTable::new().q(errors, n, w)
}

/// Exact counts of labelings per error count `0..=w (n - w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullDistribution {
    n: usize,
    w: usize,
    counts: Vec<BigUint>,
}

impl NullDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn max_errors(&self) -> usize {
        self.counts.len() - 1
    }

    /// CSV with header `errors,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("errors,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }
}

pub fn wmw_distribution(n: usize, w: usize) -> Result<NullDistribution> {
    check(n, w)?;
    let mut table = QTable::new();
    let max = w * (n - w);
    let mut counts = Vec::with_capacity(max + 1);
    let mut prev = BigUint::zero();
    for k in 0..=max {
        let cur = table.q_inner(k as i64, n, w);
        counts.push(&cur - &prev);
        prev = cur;
    }
    Ok(NullDistribution { n, w, counts })
}

/// `Q(errors, n, w) / C(n, w)`.
pub fn wmw_pvalue(errors: usize, n: usize, w: usize) -> Result<BigRational> {
    let q = q_count(errors as i64, n, w)?;
    Ok(BigRational::new(q.into(), big_binomial(n, w).into()))
}

/// Exact rational form of a significance level.
pub(crate) fn alpha_ratio(alpha: f64) -> Result<BigRational> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("significance level {alpha} outside (0, 1)")));
    }
    // the shortest decimal that round-trips, so 0.05 means 1/20
    let text = format!("{alpha}");
    let (whole, frac) = text.split_once('.').unwrap_or((&text, ""));
    let numer: BigInt = format!("{whole}{frac}")
        .parse()
        .map_err(|_| Error::param("significance level is not finite"))?;
    Ok(BigRational::new(numer, BigInt::from(10u32).pow(frac.len() as u32)))
}

/// Largest `W` with `Q(W, n, w) / C(n, w) < alpha`; `None` when even a
/// perfect ranking is not significant.
pub fn wmw_critical(alpha: f64, n: usize, w: usize) -> Result<Option<usize>> {
    check(n, w)?;
    let alpha = alpha_ratio(alpha)?;
    let total: BigRational = BigRational::from_integer(big_binomial(n, w).into());
    let threshold = alpha * total;
    let mut table = QTable::new();
    let mut critical = None;
    for k in 0..=w * (n - w) {
        let q = BigRational::from_integer(table.q_inner(k as i64, n, w).into());
        if q < threshold {
            critical = Some(k);
        } else {
            break;
        }
    }
    Ok(critical)
}
