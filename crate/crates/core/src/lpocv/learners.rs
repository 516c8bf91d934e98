//! Learners and their per-dataset bound form.
//!
//! A learner only ever answers for a held-out pair in canonical order
//! `(low, high)` by sample position: `true` means the row at `low` is
//! predicted to carry label 1. The other order is the negation, so pair
//! antisymmetry holds structurally. Every score comparison is strict, which
//! makes ties favour the second row.

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::data::Dataset;
use crate::{Error, Result};

/// Labels visible to a learner: everything except the held-out pair.
#[derive(Clone, Copy, Debug)]
pub struct TrainingLabels {
    ones: u64,
    mask: u64,
}

impl TrainingLabels {
    pub(crate) fn new(labels: u64, n: usize, low: usize, high: usize) -> Self {
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mask = all & !(1 << low) & !(1 << high);
        TrainingLabels {
            ones: labels & mask,
            mask,
        }
    }

    /// `None` for the held-out pair.
    pub fn label(&self, row: usize) -> Option<bool> {
        (self.mask >> row & 1 == 1).then_some(self.ones >> row & 1 == 1)
    }

    pub fn rows(&self) -> impl Iterator<Item = usize> {
        bits(self.mask)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> {
        bits(self.ones)
    }

    pub fn zeros(&self) -> impl Iterator<Item = usize> {
        bits(self.mask & !self.ones)
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            i
        })
    })
}

/// A learner bound to one dataset.
pub trait BoundLearner {
    /// Number of rows of the bound dataset.
    fn n(&self) -> usize;

    /// Prediction that the row at `low` carries label 1, with `low < high`.
    fn canonical_bit(&self, train: &TrainingLabels, low: usize, high: usize) -> bool;

    /// `predict(first, second)` for either order.
    fn predict(&self, train: &TrainingLabels, first: usize, second: usize) -> bool {
        if first < second {
            self.canonical_bit(train, first, second)
        } else {
            !self.canonical_bit(train, second, first)
        }
    }
}

pub trait Learner: fmt::Display {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>>;
}

fn column(data: &Dataset, feature: usize) -> Result<Vec<f64>> {
    if feature >= data.d() {
        return Err(Error::param(format!(
            "feature {feature} out of range for {} columns",
            data.d()
        )));
    }
    Ok((0..data.n()).map(|r| data.get(r, feature)).collect())
}

/// Ignores the training set and ranks by a fixed score.
#[derive(Clone, Debug, PartialEq)]
pub enum Constant {
    Feature(usize),
    Scores(Vec<f64>),
}

struct BoundScores {
    scores: Vec<f64>,
}

impl BoundLearner for BoundScores {
    fn n(&self) -> usize {
        self.scores.len()
    }

    fn canonical_bit(&self, _: &TrainingLabels, low: usize, high: usize) -> bool {
        self.scores[low] > self.scores[high]
    }
}

impl Learner for Constant {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        let scores = match self {
            Constant::Feature(f) => column(data, *f)?,
            Constant::Scores(s) if s.len() == data.n() => s.clone(),
            Constant::Scores(s) => return Err(Error::param(format!("{} scores for {} rows", s.len(), data.n()))),
        };
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("scores must be finite"));
        }
        Ok(Box::new(BoundScores { scores }))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Feature(i) => write!(f, "constant(feature={i})"),
            Constant::Scores(s) => write!(f, "constant(scores={})", s.len()),
        }
    }
}

/// Learns from the training set whether one feature ranks label 1 up or down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderDirection {
    pub feature: usize,
}

struct BoundOrderDirection {
    x: Vec<f64>,
}

impl BoundLearner for BoundOrderDirection {
    fn n(&self) -> usize {
        self.x.len()
    }

    fn canonical_bit(&self, train: &TrainingLabels, low: usize, high: usize) -> bool {
        let mut balance = 0i64;
        for a in train.ones() {
            for b in train.zeros() {
                if self.x[a] > self.x[b] {
                    balance += 1;
                } else if self.x[a] < self.x[b] {
                    balance -= 1;
                }
            }
        }
        if balance >= 0 {
            self.x[low] > self.x[high]
        } else {
            self.x[low] < self.x[high]
        }
    }
}

impl Learner for OrderDirection {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        Ok(Box::new(BoundOrderDirection {
            x: column(data, self.feature)?,
        }))
    }
}

impl fmt::Display for OrderDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order-direction(feature={})", self.feature)
    }
}

/// Needs column 0 to hold the true label and column 1 a 0/1 coin. Predicts
/// the held-out pair from column 0, correctly when the coin parity over the
/// whole sample is even and reversed when it is odd.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Parity;

struct BoundParity {
    leak: Vec<f64>,
    odd: bool,
}

impl BoundLearner for BoundParity {
    fn n(&self) -> usize {
        self.leak.len()
    }

    fn canonical_bit(&self, _: &TrainingLabels, low: usize, high: usize) -> bool {
        (self.leak[low] > self.leak[high]) != self.odd
    }
}

impl Learner for Parity {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        if data.d() < 2 {
            return Err(Error::param("parity learner needs a label column and a coin column"));
        }
        let coin = column(data, 1)?;
        if coin.iter().any(|&c| c != 0.0 && c != 1.0) {
            return Err(Error::param("parity learner needs a 0/1 coin in column 1"));
        }
        let odd = coin.iter().filter(|&&c| c == 1.0).count() % 2 == 1;
        Ok(Box::new(BoundParity {
            leak: column(data, 0)?,
            odd,
        }))
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("parity")
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uses the training set as a random seed: the bit is a hash of the
/// training multiset, the held-out pair and `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomOrientation {
    pub seed: u64,
}

struct BoundRandom {
    rows: Vec<u64>,
    seed: u64,
}

const LABEL_SALT: u64 = 0x5851_F42D_4C95_7F2D;

impl BoundLearner for BoundRandom {
    fn n(&self) -> usize {
        self.rows.len()
    }

    fn canonical_bit(&self, train: &TrainingLabels, low: usize, high: usize) -> bool {
        // wrapping sum of mixed row hashes is independent of row order
        let mut acc = 0u64;
        for r in train.rows() {
            let salt = if train.label(r) == Some(true) { LABEL_SALT } else { 0 };
            acc = acc.wrapping_add(splitmix64(self.rows[r] ^ salt));
        }
        let pair = splitmix64(self.rows[low]).wrapping_mul(3) ^ splitmix64(self.rows[high] ^ LABEL_SALT);
        let pos = splitmix64((low as u64) << 32 | high as u64);
        splitmix64(acc ^ splitmix64(pair ^ pos) ^ splitmix64(self.seed)) & 1 == 1
    }
}

impl Learner for RandomOrientation {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        let rows = (0..data.n())
            .map(|r| data.row(r).iter().fold(0u64, |h, v| splitmix64(h ^ v.to_bits())))
            .collect();
        Ok(Box::new(BoundRandom { rows, seed: self.seed }))
    }
}

impl fmt::Display for RandomOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "random-orientation(seed={})", self.seed)
    }
}

/// Ridge regression on 0/1 targets with an unpenalised intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ridge {
    pub lambda: f64,
}

struct BoundRidge {
    n: usize,
    rows: Vec<DVector<f64>>,
    /// `A^-1 (x_low - x_high)` per canonical pair, where `A` is the
    /// regularised Gram matrix without the pair; row-major upper triangle.
    directions: Vec<DVector<f64>>,
}

impl BoundRidge {
    fn slot(&self, low: usize, high: usize) -> usize {
        low * self.n + high
    }
}

impl BoundLearner for BoundRidge {
    fn n(&self) -> usize {
        self.n
    }

    fn canonical_bit(&self, train: &TrainingLabels, low: usize, high: usize) -> bool {
        let v = &self.directions[self.slot(low, high)];
        let mut xty = DVector::zeros(v.len());
        for r in train.ones() {
            xty += &self.rows[r];
        }
        v.dot(&xty) > 0.0
    }
}

impl Learner for Ridge {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param(format!(
                "ridge lambda must be positive, got {}",
                self.lambda
            )));
        }
        let (n, p) = (data.n(), data.d() + 1);
        let rows: Vec<DVector<f64>> = (0..n)
            .map(|r| DVector::from_iterator(p, std::iter::once(1.0).chain(data.row(r).iter().copied())))
            .collect();
        let mut gram = DMatrix::<f64>::zeros(p, p);
        for x in &rows {
            gram.ger(1.0, x, x, 1.0);
        }
        for k in 1..p {
            gram[(k, k)] += self.lambda;
        }
        let mut directions = vec![DVector::zeros(0); n * n];
        for low in 0..n {
            for high in low + 1..n {
                let diff = &rows[low] - &rows[high];
                if n == 2 {
                    directions[low * n + high] = DVector::zeros(p);
                    continue;
                }
                let mut a = gram.clone();
                a.ger(-1.0, &rows[low], &rows[low], 1.0);
                a.ger(-1.0, &rows[high], &rows[high], 1.0);
                let chol = Cholesky::new(a).ok_or_else(|| Error::param("ridge system is not positive definite"))?;
                directions[low * n + high] = chol.solve(&diff);
            }
        }
        Ok(Box::new(BoundRidge { n, rows, directions }))
    }
}

impl fmt::Display for Ridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ridge(lambda={})", self.lambda)
    }
}

/// Score is the mean label of the `k` nearest training rows; with fewer
/// training rows than `k` all of them are used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Knn {
    pub k: usize,
}

struct BoundKnn {
    k: usize,
    /// other rows by increasing distance, ties by index
    neighbors: Vec<Vec<usize>>,
}

impl BoundKnn {
    fn votes(&self, train: &TrainingLabels, row: usize) -> usize {
        self.neighbors[row]
            .iter()
            .filter_map(|&r| train.label(r))
            .take(self.k)
            .filter(|&l| l)
            .count()
    }
}

impl BoundLearner for BoundKnn {
    fn n(&self) -> usize {
        self.neighbors.len()
    }

    fn canonical_bit(&self, train: &TrainingLabels, low: usize, high: usize) -> bool {
        // both scores divide by the same count
        self.votes(train, low) > self.votes(train, high)
    }
}

impl Learner for Knn {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        if self.k == 0 {
            return Err(Error::param("knn needs k >= 1"));
        }
        let n = data.n();
        let dist = |a: usize, b: usize| -> f64 {
            data.row(a)
                .iter()
                .zip(data.row(b))
                .map(|(x, y)| (x - y) * (x - y))
                .sum()
        };
        let neighbors = (0..n)
            .map(|r| {
                let mut others: Vec<(f64, usize)> = (0..n).filter(|&o| o != r).map(|o| (dist(r, o), o)).collect();
                others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                others.into_iter().map(|(_, o)| o).collect()
            })
            .collect();
        Ok(Box::new(BoundKnn { k: self.k, neighbors }))
    }
}

impl fmt::Display for Knn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "knn(k={})", self.k)
    }
}

/// Parsed learner name plus `key=value` parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum LearnerSpec {
    Constant(Constant),
    OrderDirection(OrderDirection),
    Parity(Parity),
    RandomOrientation(RandomOrientation),
    Ridge(Ridge),
    Knn(Knn),
}

pub const LEARNER_NAMES: [&str; 6] = [
    "constant",
    "order-direction",
    "parity",
    "random-orientation",
    "ridge",
    "knn",
];

impl LearnerSpec {
    /// `params` is a comma separated `key=value` list, possibly empty.
    ///
    /// ```
    /// use lpo_codes::lpocv::LearnerSpec;
    /// let ridge = LearnerSpec::parse("ridge", "lambda=1").unwrap();
    /// assert_eq!(ridge.to_string(), "ridge(lambda=1)");
    /// ```
    pub fn parse(name: &str, params: &str) -> Result<LearnerSpec> {
        let mut pairs = Vec::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::param(format!("learner parameter '{item}' is not key=value")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let mut take = |key: &str| -> Option<&str> {
            let i = pairs.iter().position(|(k, _)| *k == key)?;
            Some(pairs.remove(i).1)
        };
        fn num<T: std::str::FromStr>(key: &str, v: Option<&str>, default: T) -> Result<T> {
            v.map_or(Ok(default), |s| {
                s.parse()
                    .map_err(|_| Error::param(format!("bad value '{s}' for {key}")))
            })
        }
        let spec = match name {
            "constant" => LearnerSpec::Constant(Constant::Feature(num("feature", take("feature"), 0)?)),
            "order-direction" => LearnerSpec::OrderDirection(OrderDirection {
                feature: num("feature", take("feature"), 0)?,
            }),
            "parity" => LearnerSpec::Parity(Parity),
            "random-orientation" => LearnerSpec::RandomOrientation(RandomOrientation {
                seed: num("seed", take("seed"), 0)?,
            }),
            "ridge" => LearnerSpec::Ridge(Ridge {
                lambda: num("lambda", take("lambda"), 1.0)?,
            }),
            "knn" => LearnerSpec::Knn(Knn {
                k: num("k", take("k"), 3)?,
            }),
            other => {
                return Err(Error::param(format!(
                    "unknown learner '{other}', expected one of {}",
                    LEARNER_NAMES.join(", ")
                )))
            }
        };
        if let Some((k, _)) = pairs.first() {
            return Err(Error::param(format!("unknown parameter '{k}' for learner {name}")));
        }
        Ok(spec)
    }

    fn inner(&self) -> &dyn Learner {
        match self {
            LearnerSpec::Constant(l) => l,
            LearnerSpec::OrderDirection(l) => l,
            LearnerSpec::Parity(l) => l,
            LearnerSpec::RandomOrientation(l) => l,
            LearnerSpec::Ridge(l) => l,
            LearnerSpec::Knn(l) => l,
        }
    }
}

impl Learner for LearnerSpec {
    fn bind<'a>(&self, data: &'a Dataset) -> Result<Box<dyn BoundLearner + 'a>> {
        self.inner().bind(data)
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[&[f64]]) -> Dataset {
        let d = rows[0].len();
        Dataset::new(rows.len(), d, rows.concat()).unwrap()
    }

    #[test]
    fn training_labels_mask_the_pair() {
        let t = TrainingLabels::new(0b1011, 4, 0, 2);
        assert_eq!(t.label(0), None);
        assert_eq!(t.label(1), Some(true));
        assert_eq!(t.label(2), None);
        assert_eq!(t.label(3), Some(true));
        assert_eq!(t.ones().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(t.zeros().count(), 0);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(LearnerSpec::parse("knn", "").unwrap(), LearnerSpec::Knn(Knn { k: 3 }));
        assert_eq!(
            LearnerSpec::parse("ridge", "lambda = 0.5").unwrap(),
            LearnerSpec::Ridge(Ridge { lambda: 0.5 })
        );
        assert!(LearnerSpec::parse("svm", "").is_err());
        assert!(LearnerSpec::parse("knn", "k=x").is_err());
        assert!(LearnerSpec::parse("knn", "k=3,j=1").is_err());
        assert!(LearnerSpec::parse("knn", "k").is_err());
    }

    #[test]
    fn ridge_matches_direct_refit() {
        let d = data(&[
            &[0.3, 1.0],
            &[1.2, -0.4],
            &[-0.7, 0.2],
            &[2.0, 0.9],
            &[0.1, -1.3],
            &[-1.1, 0.4],
        ]);
        let lambda = 0.7;
        let bound = Ridge { lambda }.bind(&d).unwrap();
        let labels = 0b101001u64;
        for low in 0..6 {
            for high in low + 1..6 {
                let train: Vec<usize> = (0..6).filter(|&r| r != low && r != high).collect();
                let x = DMatrix::from_fn(train.len(), 3, |i, j| if j == 0 { 1.0 } else { d.get(train[i], j - 1) });
                let y = DVector::from_iterator(train.len(), train.iter().map(|&r| (labels >> r & 1) as f64));
                let mut a = x.transpose() * &x;
                a[(1, 1)] += lambda;
                a[(2, 2)] += lambda;
                let theta = a.lu().solve(&(x.transpose() * y)).unwrap();
                let score = |r: usize| theta[0] + theta[1] * d.get(r, 0) + theta[2] * d.get(r, 1);
                let t = TrainingLabels::new(labels, 6, low, high);
                assert_eq!(bound.canonical_bit(&t, low, high), score(low) > score(high));
            }
        }
    }

    #[test]
    fn knn_votes_follow_distance_then_index() {
        let d = data(&[&[0.0], &[1.0], &[-1.0], &[10.0], &[11.0]]);
        let bound = Knn { k: 2 }.bind(&d).unwrap();
        // row 0 sees rows 1 and 2 (tie broken by index), row 3 sees row 4 then row 1
        let t = TrainingLabels::new(0b00110, 5, 0, 3);
        assert!(bound.canonical_bit(&t, 0, 3));
        let t = TrainingLabels::new(0b10000, 5, 0, 3);
        assert!(!bound.canonical_bit(&t, 0, 3));
        // k beyond the training set degenerates to a tie
        let bound = Knn { k: 9 }.bind(&d).unwrap();
        assert!(!bound.canonical_bit(&t, 0, 3));
    }

    #[test]
    fn order_direction_flips_with_training_concordance() {
        let d = data(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0]]);
        let bound = OrderDirection { feature: 0 }.bind(&d).unwrap();
        // training rows 2..6 with high values labelled 1: concordant
        let up = TrainingLabels::new(0b110000, 6, 0, 1);
        assert!(!bound.canonical_bit(&up, 0, 1));
        let down = TrainingLabels::new(0b001100, 6, 0, 1);
        assert!(bound.canonical_bit(&down, 0, 1));
    }

    #[test]
    fn parity_reads_the_coin() {
        let even = data(&[&[1.0, 1.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let odd = data(&[&[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let t = TrainingLabels::new(0b001, 3, 0, 1);
        assert!(Parity.bind(&even).unwrap().canonical_bit(&t, 0, 1));
        assert!(!Parity.bind(&odd).unwrap().canonical_bit(&t, 0, 1));
        let bad = data(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(Parity.bind(&bad).is_err());
    }

    #[test]
    fn random_orientation_ignores_training_order() {
        let a = data(&[&[0.1], &[0.2], &[0.3], &[0.4], &[0.5]]);
        let b = data(&[&[0.1], &[0.2], &[0.5], &[0.4], &[0.3]]);
        let la = RandomOrientation { seed: 9 }.bind(&a).unwrap();
        let lb = RandomOrientation { seed: 9 }.bind(&b).unwrap();
        // rows 2 and 4 swapped along with their labels
        assert_eq!(
            la.canonical_bit(&TrainingLabels::new(0b00101, 5, 0, 1), 0, 1),
            lb.canonical_bit(&TrainingLabels::new(0b10001, 5, 0, 1), 0, 1)
        );
    }
}
