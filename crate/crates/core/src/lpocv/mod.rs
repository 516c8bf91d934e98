//! Leave-pair-out cross-validation as a test statistic.
//!
//! For a labeling `B` with `w` ones, every pair `(i, j)` with `B_i = 1`,
//! `B_j = 0` is held out in turn; the learner is trained on the other
//! `n - 2` rows and errs when it ranks `j` above `i`. The error count over
//! all `w (n - w)` pairs is the statistic, and its distribution over
//! labelings (or fresh samples) gives the null distribution.
//!
//! Monte-Carlo p-values use `(1 + count) / (M + 1)`; when `C(n, w)` is at
//! most [`EXACT_PVALUE_LIMIT`] every labeling is enumerated instead.

mod data;
mod learners;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use data::{
    generate_data, parse_dataset_csv, random_labeling, read_dataset_csv, Dataset, LabeledData, Scenario, SCENARIO_NAMES,
};
pub use learners::{
    BoundLearner, Constant, Knn, Learner, LearnerSpec, OrderDirection, Parity, RandomOrientation, Ridge,
    TrainingLabels, LEARNER_NAMES,
};

use crate::cwords::{binomial, Word, Words};
use crate::grid::CriticalGrid;
use crate::wilcoxon::alpha_ratio;
use crate::{Error, Result};

/// Largest `C(n, w)` for which null distributions are enumerated.
pub const EXACT_NULL_LIMIT: u64 = 1_000_000;
/// Largest `C(n, w)` for which [`mc_null_pvalue`] switches to enumeration.
pub const EXACT_PVALUE_LIMIT: u64 = 100_000;

fn check_labeling(learner: &dyn BoundLearner, labeling: &Word) -> Result<()> {
    if labeling.len() != learner.n() {
        return Err(Error::param(format!(
            "labeling of length {} for a dataset of {} rows",
            labeling.len(),
            learner.n()
        )));
    }
    Ok(())
}

fn kernel_unchecked(learner: &dyn BoundLearner, labeling: &Word, i: usize, j: usize) -> bool {
    let train = TrainingLabels::new(labeling.bits(), labeling.len(), i.min(j), i.max(j));
    !learner.predict(&train, i, j)
}

/// 1 when the learner, trained without rows `i` and `j`, ranks `j` (label 0)
/// above `i` (label 1).
pub fn lpo_kernel(learner: &dyn BoundLearner, labeling: &Word, i: usize, j: usize) -> Result<bool> {
    check_labeling(learner, labeling)?;
    if i >= labeling.len() || j >= labeling.len() || !labeling.get(i) || labeling.get(j) {
        return Err(Error::param(format!(
            "pair ({i}, {j}) does not straddle labeling {labeling}"
        )));
    }
    Ok(kernel_unchecked(learner, labeling, i, j))
}

fn errors_unchecked(learner: &dyn BoundLearner, labeling: &Word) -> usize {
    let mut errors = 0;
    for i in labeling.ones() {
        for j in labeling.zeros() {
            errors += usize::from(kernel_unchecked(learner, labeling, i, j));
        }
    }
    errors
}

/// Error count and `u = errors / (w (n - w))`.
pub fn lpocv_u(learner: &dyn BoundLearner, labeling: &Word) -> Result<(usize, Ratio<u64>)> {
    check_labeling(learner, labeling)?;
    let w = labeling.weight();
    if w == 0 || w == labeling.len() {
        return Err(Error::param("labeling needs both labels"));
    }
    let errors = errors_unchecked(learner, labeling);
    Ok((errors, Ratio::new(errors as u64, (w * (labeling.len() - w)) as u64)))
}

/// Counts of error values `0..=w (n - w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorHistogram {
    n: usize,
    w: usize,
    counts: Vec<u64>,
}

impl ErrorHistogram {
    pub fn new(n: usize, w: usize) -> Self {
        ErrorHistogram {
            n,
            w,
            counts: vec![0; w * (n - w) + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn record(&mut self, errors: usize) {
        self.counts[errors] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of recorded values at most `errors`.
    pub fn at_most(&self, errors: usize) -> u64 {
        self.counts.iter().take(errors + 1).sum()
    }

    /// Adds another histogram of the same shape.
    pub fn absorb(&mut self, other: &ErrorHistogram) -> Result<()> {
        if (self.n, self.w) != (other.n, other.w) {
            return Err(Error::param("histograms of different shapes"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    /// Largest `W` with `at_most(W) / total < alpha`, scanning up from 0.
    pub fn critical(&self, alpha: f64) -> Result<Option<usize>> {
        let alpha = alpha_ratio(alpha)?;
        let threshold = alpha * BigRational::from_integer(BigInt::from(self.total()));
        let mut cumulative = 0u64;
        let mut critical = None;
        for (k, &c) in self.counts.iter().enumerate() {
            cumulative += c;
            if BigRational::from_integer(BigInt::from(cumulative)) < threshold {
                critical = Some(k);
            } else {
                break;
            }
        }
        Ok(critical)
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

/// Histogram of the error count over every labeling in `S(n, w)`.
pub fn exact_null_distribution(learner: &dyn BoundLearner, w: usize) -> Result<ErrorHistogram> {
    let n = learner.n();
    let words = Words::new(n, w)?;
    if binomial(n, w) > EXACT_NULL_LIMIT {
        return Err(Error::resource(format!(
            "C({n},{w}) = {} labelings exceeds the enumeration limit {EXACT_NULL_LIMIT}",
            binomial(n, w)
        )));
    }
    let mut hist = ErrorHistogram::new(n, w);
    for labeling in words {
        hist.record(errors_unchecked(learner, &labeling));
    }
    Ok(hist)
}

/// Histogram of the error count over `draws` uniform labelings.
pub fn sampled_null_distribution(
    learner: &dyn BoundLearner,
    w: usize,
    draws: usize,
    seed: u64,
) -> Result<ErrorHistogram> {
    let n = learner.n();
    Words::new(n, w)?;
    let mut hist = ErrorHistogram::new(n, w);
    for m in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, m as u64));
        hist.record(errors_unchecked(learner, &random_labeling(n, w, &mut rng)?));
    }
    Ok(hist)
}

/// p-value of an observed error count: `(1 + #{errors <= observed}) / (M + 1)`
/// over `M` uniform labelings, or the exact fraction when `C(n, w)` is at
/// most [`EXACT_PVALUE_LIMIT`].
pub fn mc_null_pvalue(
    learner: &dyn BoundLearner,
    w: usize,
    observed_errors: usize,
    draws: usize,
    seed: u64,
) -> Result<Ratio<u64>> {
    if draws == 0 {
        return Err(Error::param("need at least one permutation"));
    }
    let n = learner.n();
    Words::new(n, w)?;
    if binomial(n, w) <= EXACT_PVALUE_LIMIT {
        let hist = exact_null_distribution(learner, w)?;
        return Ok(Ratio::new(hist.at_most(observed_errors), hist.total()));
    }
    let hist = sampled_null_distribution(learner, w, draws, seed)?;
    Ok(Ratio::new(1 + hist.at_most(observed_errors), draws as u64 + 1))
}

/// Independent stream seed for replication `index` of a run seeded `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    learners::splitmix64(master ^ learners::splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

/// Learner, data source and master seed of one experimental setup.
#[derive(Clone, Debug)]
pub struct Setup {
    pub learner: LearnerSpec,
    pub scenario: Scenario,
    pub seed: u64,
}

impl Setup {
    /// One setup per non-comment line: `learner;params;scenario;seed`.
    pub fn parse_lines(text: &str) -> Result<Vec<Setup>> {
        let mut setups = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            let [learner, params, scenario, seed] = fields[..] else {
                return Err(Error::input(format!(
                    "config line {}: expected learner;params;scenario;seed",
                    lineno + 1
                )));
            };
            let learner = LearnerSpec::parse(learner, params)
                .map_err(|e| Error::input(format!("config line {}: {e}", lineno + 1)))?;
            let seed = seed
                .parse()
                .map_err(|_| Error::input(format!("config line {}: bad seed '{seed}'", lineno + 1)))?;
            setups.push(Setup {
                learner,
                scenario: Scenario::parse(scenario)?,
                seed,
            });
        }
        if setups.is_empty() {
            return Err(Error::input("config file lists no setups"));
        }
        Ok(setups)
    }

    /// Error count on one fresh sample of `n` rows with `w` ones.
    pub fn sample_errors(&self, n: usize, w: usize, seed: u64) -> Result<usize> {
        let (data, labeling) = generate_data(&self.scenario, n, w, seed)?;
        let bound = self.learner.bind(&data)?;
        Ok(lpocv_u(bound.as_ref(), &labeling)?.0)
    }

    fn cell_seed(&self, n: usize, w: usize) -> u64 {
        derive_seed(self.seed, (n * 1024 + w) as u64)
    }

    /// Error counts of `reps` fresh samples, seeded per replication so the
    /// result does not depend on evaluation order.
    pub fn sample_histogram(&self, n: usize, w: usize, reps: usize) -> Result<ErrorHistogram> {
        let cell = self.cell_seed(n, w);
        let mut hist = ErrorHistogram::new(n, w);
        for rep in 0..reps {
            hist.record(self.sample_errors(n, w, derive_seed(cell, rep as u64))?);
        }
        Ok(hist)
    }
}

/// One null simulation: `replications` fresh samples, each with its own
/// labeling when more than one is drawn; a single replication instead
/// gives the distribution over labelings of one sample, exact when
/// `C(n, w)` is at most [`EXACT_PVALUE_LIMIT`] and otherwise from
/// `permutations` uniform labelings.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub setup: Setup,
    pub n: usize,
    pub w: usize,
    pub replications: usize,
    pub permutations: usize,
}

pub fn simulate_null(config: &SimulationConfig) -> Result<ErrorHistogram> {
    let SimulationConfig {
        setup,
        n,
        w,
        replications,
        permutations,
    } = config;
    if *replications == 0 {
        return Err(Error::param("need at least one replication"));
    }
    if *replications > 1 {
        return setup.sample_histogram(*n, *w, *replications);
    }
    let (data, _) = generate_data(&setup.scenario, *n, *w, setup.seed)?;
    let bound = setup.learner.bind(&data)?;
    if binomial(*n, *w) <= EXACT_PVALUE_LIMIT {
        exact_null_distribution(bound.as_ref(), *w)
    } else if *permutations == 0 {
        Err(Error::param(
            "need permutations when the labelings cannot be enumerated",
        ))
    } else {
        sampled_null_distribution(bound.as_ref(), *w, *permutations, derive_seed(setup.seed, u64::MAX))
    }
}

/// Empirical critical value of one setup for `ones` rows labelled 1 and
/// `zeros` labelled 0.
pub fn empirical_critical_cell(
    setup: &Setup,
    ones: usize,
    zeros: usize,
    alpha: f64,
    reps: usize,
) -> Result<Option<usize>> {
    if reps == 0 {
        return Err(Error::param("need at least one replication"));
    }
    setup.sample_histogram(ones + zeros, ones, reps)?.critical(alpha)
}

/// Cellwise minimum over setups of the empirical critical values, for
/// `1..=max_size` rows of each label.
pub fn empirical_critical_table(setups: &[Setup], alpha: f64, max_size: usize, reps: usize) -> Result<CriticalGrid> {
    if setups.is_empty() {
        return Err(Error::param("need at least one setup"));
    }
    alpha_ratio(alpha)?;
    let mut merged: Option<CriticalGrid> = None;
    for setup in setups {
        let mut grid = CriticalGrid::new(max_size);
        for ones in 1..=max_size {
            for zeros in 1..=max_size {
                grid.set(ones, zeros, empirical_critical_cell(setup, ones, zeros, alpha, reps)?);
            }
        }
        merged = Some(match merged {
            None => grid,
            Some(m) => m.merge_min(&grid)?,
        });
    }
    Ok(merged.expect("setups is nonempty"))
}

/// Per balanced sample size, the fraction of `reps` fresh samples whose
/// error count exceeds the table's critical value.
pub fn type2_experiment(
    setup: &Setup,
    sizes: &[usize],
    table: &CriticalGrid,
    reps: usize,
) -> Result<Vec<(usize, f64)>> {
    if reps == 0 {
        return Err(Error::param("need at least one replication"));
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size < 2 || size % 2 != 0 {
            return Err(Error::param(format!(
                "sample size {size} is not a positive even number"
            )));
        }
        let half = size / 2;
        let critical = table
            .get(half, half)
            .ok_or_else(|| Error::param(format!("critical table has no cell for size {size}")))?;
        let hist = setup.sample_histogram(size, half, reps)?;
        let failures = match critical {
            Some(c) => hist.total() - hist.at_most(c),
            None => hist.total(),
        };
        out.push((size, failures as f64 / reps as f64));
    }
    Ok(out)
}

/// CSV with header `size,failure_proportion`.
pub fn type2_to_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("size,failure_proportion\n");
    for (size, p) in rows {
        let _ = writeln!(out, "{size},{p}");
    }
    out
}
