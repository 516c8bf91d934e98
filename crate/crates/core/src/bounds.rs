//! Bounds on `L(W, n, w)` and the critical values they imply.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::codes::{exact_l, orbit_size, MAX_EXACT_VERTICES};
use crate::cwords::binomial;
use crate::wilcoxon::alpha_ratio;
use crate::{Error, Result};

fn valid(n: usize, w: usize) -> bool {
    w > 0 && w < n && n <= crate::cwords::MAX_LEN
}

/// Closed forms for `w` in `{1, 2, n - 2, n - 1}`:
/// `min(2W + 1, n)` for weight one and `min(floor((W+1) n / 2), C(n, 2))`
/// for weight two, both transported by complement.
pub fn boundary_exact(n: usize, w: usize, lightness: usize) -> Option<u64> {
    if !valid(n, w) {
        return None;
    }
    let w = w.min(n - w);
    match w {
        1 => Some(((2 * lightness + 1).min(n)) as u64),
        2 => Some(orbit_size(n, lightness)),
        _ => None,
    }
}

/// Memoised recursive Johnson-type upper bound for one lightness.
#[derive(Debug)]
pub struct JohnsonUpper {
    lightness: usize,
    memo: HashMap<(usize, usize), u64>,
}

impl JohnsonUpper {
    pub fn new(lightness: usize) -> Self {
        JohnsonUpper {
            lightness,
            memo: HashMap::new(),
        }
    }

    pub fn bound(&mut self, n: usize, w: usize) -> Result<u64> {
        if !valid(n, w) {
            return Err(Error::param(format!("need 0 < w < n <= 64, got n={n}, w={w}")));
        }
        Ok(self.inner(n, w))
    }

    fn inner(&mut self, n: usize, w: usize) -> u64 {
        if let Some(e) = boundary_exact(n, w, self.lightness) {
            return e;
        }
        let w = w.min(n - w);
        let all = binomial(n, w);
        // every vertex has degree w (n - w); an Eulerian orientation makes
        // the whole graph light once 2W reaches it
        if 2 * self.lightness >= w * (n - w) {
            return all;
        }
        if let Some(&v) = self.memo.get(&(n, w)) {
            return v;
        }
        let (n64, w64) = (n as u128, w as u128);
        let by_ones = n64 * self.inner(n - 1, w - 1) as u128 / w64;
        let by_zeros = n64 * self.inner(n - 1, w) as u128 / (n64 - w64);
        let v = (all as u128).min(by_ones).min(by_zeros) as u64;
        self.memo.insert((n, w), v);
        v
    }
}

pub fn johnson_upper(n: usize, w: usize, lightness: usize) -> Result<u64> {
    JohnsonUpper::new(lightness).bound(n, w)
}

/// `ceil(C(n, w) / (n - 2W))` when `n >= 4W`.
pub fn gs_lower(n: usize, w: usize, lightness: usize) -> Option<u64> {
    if !valid(n, w) || n < 4 * lightness {
        return None;
    }
    let modulus = (n - 2 * lightness) as u64;
    Some(binomial(n, w).div_ceil(modulus))
}

/// Best lower bound at exactly this lightness from the closed forms, the
/// residue-class construction and the single-word code.
fn lower_at(n: usize, w: usize, lightness: usize) -> u64 {
    let mut best = 1;
    if let Some(e) = boundary_exact(n, w, lightness) {
        best = best.max(e);
    }
    if let Some(g) = gs_lower(n, w, lightness) {
        best = best.max(g);
    }
    if 2 * lightness >= w * (n - w) {
        best = best.max(binomial(n, w));
    }
    best
}

/// Lower bound on `L(W, n, w)`; since `L` is nondecreasing in `W`, bounds
/// for smaller lightness carry over.
pub fn lower_bound(n: usize, w: usize, lightness: usize) -> Result<u64> {
    if !valid(n, w) {
        return Err(Error::param(format!("need 0 < w < n <= 64, got n={n}, w={w}")));
    }
    Ok((0..=lightness).map(|l| lower_at(n, w, l)).max().unwrap_or(1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRecord {
    pub n: usize,
    pub w: usize,
    pub lightness: usize,
    pub lower: u64,
    pub upper: u64,
    pub exact: Option<u64>,
}

/// All valid `(n, w, W)` rows of the given ranges (rows with `w >= n` are
/// skipped). With `search_exact`, instances with at most
/// [`MAX_EXACT_VERTICES`] words are settled by exhaustive search.
pub fn assemble_table(
    n_range: RangeInclusive<usize>,
    w_range: RangeInclusive<usize>,
    lightness_range: RangeInclusive<usize>,
    search_exact: bool,
) -> Result<Vec<BoundRecord>> {
    if n_range.is_empty() || w_range.is_empty() || lightness_range.is_empty() {
        return Err(Error::param("bound table ranges must be nonempty"));
    }
    let mut rows = Vec::new();
    for n in n_range {
        for w in w_range.clone() {
            if !valid(n, w) {
                continue;
            }
            let mut running_lower = 1;
            let mut uppers: HashMap<usize, JohnsonUpper> = HashMap::new();
            for lightness in 0..=*lightness_range.end() {
                running_lower = running_lower.max(lower_at(n, w, lightness));
                if !lightness_range.contains(&lightness) {
                    continue;
                }
                let upper = uppers
                    .entry(lightness)
                    .or_insert_with(|| JohnsonUpper::new(lightness))
                    .inner(n, w)
                    .min(binomial(n, w));
                let mut exact = boundary_exact(n, w, lightness);
                if exact.is_none() && search_exact && binomial(n, w) <= MAX_EXACT_VERTICES {
                    exact = Some(exact_l(n, w, lightness)?.len() as u64);
                }
                let lower = running_lower.max(exact.unwrap_or(0));
                rows.push(BoundRecord {
                    n,
                    w,
                    lightness,
                    lower,
                    upper,
                    exact,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV with header `n,w,W,lower,upper,exact`.
pub fn table_to_csv(rows: &[BoundRecord]) -> String {
    let mut out = String::from("n,w,W,lower,upper,exact\n");
    for r in rows {
        let exact = r.exact.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{exact}", r.n, r.w, r.lightness, r.lower, r.upper);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

/// Largest `W` whose bound on `L(W, n, w) / C(n, w)` stays below `alpha`,
/// scanning upward from `W = 0`; `None` when `W = 0` already fails.
///
/// Only the upper bound turns this into a valid critical value for every
/// learner; the lower bound reproduces the construction-based table and
/// stops at the first lightness without a construction (`n < 4W` outside
/// the closed forms). The
/// exact kind is only available where `L` is known in closed form or small
/// enough to search.
pub fn lightcode_critical(alpha: f64, n: usize, w: usize, kind: BoundKind) -> Result<Option<usize>> {
    if !valid(n, w) {
        return Err(Error::param(format!("need 0 < w < n <= 64, got n={n}, w={w}")));
    }
    let alpha = alpha_ratio(alpha)?;
    let total = binomial(n, w);
    let threshold = alpha * BigRational::from_integer(BigUint::from(total).into());
    let mut upper = JohnsonUpper::new(0);
    let mut running_lower = 1;
    let mut critical = None;
    for lightness in 0..w * (n - w) {
        let bound = match kind {
            BoundKind::Lower => {
                // no construction at this lightness, nothing to reject with
                if boundary_exact(n, w, lightness).is_none() && gs_lower(n, w, lightness).is_none() {
                    break;
                }
                running_lower = running_lower.max(lower_at(n, w, lightness));
                running_lower
            }
            BoundKind::Upper => {
                if upper.lightness != lightness {
                    upper = JohnsonUpper::new(lightness);
                }
                upper.inner(n, w)
            }
            BoundKind::Exact => match boundary_exact(n, w, lightness) {
                Some(e) => e,
                None if total <= MAX_EXACT_VERTICES => exact_l(n, w, lightness)?.len() as u64,
                None => {
                    return Err(Error::resource(format!(
                        "L(W,{n},{w}) is not known exactly and C({n},{w}) = {total} is too large to search"
                    )))
                }
            },
        };
        if BigRational::from_integer(BigUint::from(bound).into()) < threshold {
            critical = Some(lightness);
        } else {
            break;
        }
    }
    Ok(critical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wilcoxon::q_count;

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_exact(9, 1, 2), Some(5));
        assert_eq!(boundary_exact(6, 4, 1), Some(6));
        assert_eq!(boundary_exact(7, 3, 0), None);
        assert_eq!(boundary_exact(4, 4, 0), None);
        assert_eq!(boundary_exact(8, 7, 1), Some(3));
    }

    #[test]
    fn johnson_examples() {
        assert_eq!(johnson_upper(5, 2, 0).unwrap(), 2);
        assert_eq!(johnson_upper(6, 3, 0).unwrap(), 4);
        for (n, w) in [(6, 3), (7, 3), (9, 4)] {
            assert_eq!(johnson_upper(n, w, w * (n - w)).unwrap(), binomial(n, w));
        }
        // classical A(n,4,w) Johnson values
        assert_eq!(johnson_upper(7, 3, 0).unwrap(), 7);
        assert_eq!(johnson_upper(8, 4, 0).unwrap(), 14);
    }

    #[test]
    fn johnson_upper_never_exceeds_total_and_grows_with_w() {
        for n in 3..=20 {
            for w in 1..n {
                let mut prev = 0;
                for lightness in 0..=6 {
                    let u = johnson_upper(n, w, lightness).unwrap();
                    assert!(u <= binomial(n, w));
                    assert!(u >= prev);
                    assert_eq!(u, johnson_upper(n, n - w, lightness).unwrap());
                    prev = u;
                }
            }
        }
    }

    #[test]
    fn gs_examples() {
        assert_eq!(gs_lower(5, 2, 0), Some(2));
        assert_eq!(gs_lower(6, 3, 1), Some(5));
        assert_eq!(gs_lower(3, 1, 1), None);
    }

    #[test]
    fn table_examples() {
        let rows = assemble_table(4..=4, 2..=2, 0..=0, false).unwrap();
        assert_eq!(
            rows[0],
            BoundRecord {
                n: 4,
                w: 2,
                lightness: 0,
                lower: 2,
                upper: 2,
                exact: Some(2)
            }
        );
        let rows = assemble_table(5..=5, 2..=2, 1..=1, false).unwrap();
        assert_eq!(rows[0].exact, Some(5));
        let rows = assemble_table(3..=12, 1..=6, 0..=4, true).unwrap();
        for r in &rows {
            assert!(r.lower <= r.upper, "{r:?}");
            assert!(r.upper <= binomial(r.n, r.w));
            if let Some(e) = r.exact {
                assert!(r.lower <= e && e <= r.upper, "{r:?}");
            }
        }
        let six_three: Vec<_> = rows.iter().filter(|r| r.n == 6 && r.w == 3).collect();
        assert_eq!(six_three[0].exact, Some(4));
        let (lo, hi) = (4, 3);
        assert!(assemble_table(lo..=hi, 1..=1, 0..=0, false).is_err());
        let csv = table_to_csv(&assemble_table(7..=7, 3..=3, 0..=0, false).unwrap());
        assert_eq!(csv, "n,w,W,lower,upper,exact\n7,3,0,5,7,\n");
    }

    #[test]
    fn sandwich_against_search_and_wilcoxon() {
        for n in 2..=6 {
            for w in 1..n {
                for lightness in 0..=w * (n - w) {
                    let exact = exact_l(n, w, lightness).unwrap().len() as u64;
                    if let Some(g) = gs_lower(n, w, lightness) {
                        assert!(g <= exact);
                    }
                    assert!(lower_bound(n, w, lightness).unwrap() <= exact);
                    assert!(exact <= johnson_upper(n, w, lightness).unwrap());
                    let q = q_count(lightness as i64, n, w).unwrap();
                    assert!(BigUint::from(exact) >= q, "n={n} w={w} W={lightness}");
                }
            }
        }
    }

    #[test]
    fn critical_examples() {
        assert_eq!(lightcode_critical(0.05, 4, 2, BoundKind::Exact).unwrap(), None);
        // at W = 0 the lower-bound p-value is ceil(C/n)/C, roughly 1/n
        for n in [10, 20, 30] {
            let w = n / 2;
            // 1/n <= ceil(C/n)/C < 1/n + 1/C
            let (total, g) = (binomial(n, w), gs_lower(n, w, 0).unwrap());
            assert!(g * n as u64 >= total && (g - 1) * (n as u64) < total);
        }
        // 26, 32, 42 of 252 words at W = 0, 1, 2; no construction at W = 3
        assert_eq!(lightcode_critical(0.2, 10, 5, BoundKind::Lower).unwrap(), Some(2));
        assert_eq!(lightcode_critical(0.15, 10, 5, BoundKind::Lower).unwrap(), Some(1));
        assert!(lightcode_critical(0.05, 30, 15, BoundKind::Exact).is_err());
        assert!(lightcode_critical(1.0, 6, 3, BoundKind::Upper).is_err());
    }

    #[test]
    fn critical_orderings() {
        for (n, w) in [(5, 2), (6, 3), (6, 2), (7, 2), (8, 1)] {
            let mut prev_upper = None;
            for alpha in [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.95] {
                let upper = lightcode_critical(alpha, n, w, BoundKind::Upper).unwrap();
                let exact = lightcode_critical(alpha, n, w, BoundKind::Exact).unwrap();
                assert!(upper.is_none_or(|u| exact.is_some_and(|e| u <= e)));
                assert!(prev_upper <= upper);
                prev_upper = upper;
            }
        }
    }
}
