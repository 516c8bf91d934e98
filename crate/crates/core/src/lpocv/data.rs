//! Datasets, CSV ingestion and the synthetic scenarios.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, StandardNormal};

use crate::cwords::{Word, MAX_LEN};
use crate::{Error, Result};

/// `n x d` row-major matrix of finite reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::param(format!("{} values for a {n}x{d} dataset", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("dataset entries must be finite"));
        }
        Ok(Dataset { n, d, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.d..(r + 1) * self.d]
    }

    pub fn get(&self, r: usize, f: usize) -> f64 {
        self.values[r * self.d + f]
    }

    fn select(&self, rows: &[usize]) -> Dataset {
        let values = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Dataset {
            n: rows.len(),
            d: self.d,
            values,
        }
    }
}

/// A dataset with optional 0/1 labels, as read from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData {
    pub data: Dataset,
    pub labels: Option<Vec<bool>>,
}

impl LabeledData {
    /// The labels as a word, when they fit one.
    pub fn labeling(&self) -> Result<Option<Word>> {
        let Some(labels) = &self.labels else { return Ok(None) };
        let ones: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
        Word::from_positions(labels.len(), &ones).map(Some)
    }
}

/// Header row, numeric columns, optional final `label` column of 0/1.
pub fn parse_dataset_csv(text: &str) -> Result<LabeledData> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::input("dataset CSV is empty"))?
        .split(',')
        .map(str::trim)
        .collect();
    let has_label = header.last() == Some(&"label");
    let d = header.len() - usize::from(has_label);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::input(format!(
                "data row {} has {} cells, header has {}",
                lineno + 1,
                cells.len(),
                header.len()
            )));
        }
        for cell in &cells[..d] {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::input(format!("data row {}: '{cell}' is not a number", lineno + 1)))?;
            if !v.is_finite() {
                return Err(Error::input(format!("data row {}: non-finite value", lineno + 1)));
            }
            values.push(v);
        }
        if has_label {
            labels.push(match cells[d] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::input(format!(
                        "data row {}: label '{other}' is not 0/1",
                        lineno + 1
                    )))
                }
            });
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::input("dataset CSV has no data rows"));
    }
    Ok(LabeledData {
        data: Dataset::new(n, d, values)?,
        labels: has_label.then_some(labels),
    })
}

pub fn read_dataset_csv(path: &Path) -> Result<LabeledData> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset_csv(&text)
}

/// Where samples come from.
#[derive(Clone, Debug)]
pub enum Scenario {
    NullGauss {
        dims: usize,
    },
    /// Equal-weight mixture of `N(-2, 1)` and `N(2, 1)`, one component per row.
    NullMix {
        dims: usize,
    },
    /// Ten features; the first `signal` have mean `+0.5` for label 1 and `-0.5` for label 0.
    Linear {
        signal: usize,
    },
    /// Ten features; feature 0 is `N(0.5, 1)` for label 1 and `N(5.5, 1)` or
    /// `N(-4.5, 1)` with equal odds for label 0.
    Nonlinear3Mode,
    /// Column 0 is the label, column 1 a fair coin.
    ParityLeak,
    /// Stratified subsamples of a labelled CSV file.
    Csv {
        path: String,
        source: Arc<LabeledData>,
    },
}

pub const SCENARIO_NAMES: [&str; 9] = [
    "null-gauss-1d",
    "null-gauss-10d",
    "null-mix-1d",
    "null-mix-10d",
    "linear-1sig",
    "linear-4sig",
    "nonlinear-3mode",
    "parity-leak",
    "csv:<path>",
];

impl Scenario {
    pub fn parse(id: &str) -> Result<Scenario> {
        Ok(match id {
            "null-gauss-1d" => Scenario::NullGauss { dims: 1 },
            "null-gauss-10d" => Scenario::NullGauss { dims: 10 },
            "null-mix-1d" => Scenario::NullMix { dims: 1 },
            "null-mix-10d" => Scenario::NullMix { dims: 10 },
            "linear-1sig" => Scenario::Linear { signal: 1 },
            "linear-4sig" => Scenario::Linear { signal: 4 },
            "nonlinear-3mode" => Scenario::Nonlinear3Mode,
            "parity-leak" => Scenario::ParityLeak,
            _ => match id.strip_prefix("csv:") {
                Some(path) => {
                    let source = read_dataset_csv(Path::new(path))?;
                    if source.labels.is_none() {
                        return Err(Error::input(format!("{path} has no label column")));
                    }
                    Scenario::Csv {
                        path: path.to_string(),
                        source: Arc::new(source),
                    }
                }
                None => {
                    return Err(Error::input(format!(
                        "unknown scenario '{id}', expected one of {}",
                        SCENARIO_NAMES.join(", ")
                    )))
                }
            },
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::NullGauss { dims } => write!(f, "null-gauss-{dims}d"),
            Scenario::NullMix { dims } => write!(f, "null-mix-{dims}d"),
            Scenario::Linear { signal } => write!(f, "linear-{signal}sig"),
            Scenario::Nonlinear3Mode => f.write_str("nonlinear-3mode"),
            Scenario::ParityLeak => f.write_str("parity-leak"),
            Scenario::Csv { path, .. } => write!(f, "csv:{path}"),
        }
    }
}

/// Uniform word of `S(n, w)`: a shuffle of the first word.
pub fn random_labeling<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<Word> {
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(rng);
    Word::from_positions(n, &positions[..w])
}

fn check_size(n: usize, w: usize) -> Result<()> {
    if w == 0 || w >= n || n > MAX_LEN {
        return Err(Error::param(format!("need 0 < w < n <= {MAX_LEN}, got n={n}, w={w}")));
    }
    Ok(())
}

/// One sample of `n` rows, `w` of them labelled 1. Deterministic in `seed`.
pub fn generate_data(scenario: &Scenario, n: usize, w: usize, seed: u64) -> Result<(Dataset, Word)> {
    check_size(n, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Scenario::Csv { path, source } = scenario {
        return subsample(path, source, n, w, &mut rng);
    }
    let labeling = random_labeling(n, w, &mut rng)?;
    let unit = |mean: f64| Normal::new(mean, 1.0).expect("unit variance");
    let mut values = Vec::new();
    for r in 0..n {
        let one = labeling.get(r);
        match scenario {
            Scenario::NullGauss { dims } => {
                values.extend((0..*dims).map(|_| Distribution::<f64>::sample(&StandardNormal, &mut rng)));
            }
            Scenario::NullMix { dims } => {
                let mean = if rng.random::<bool>() { 2.0 } else { -2.0 };
                values.extend((0..*dims).map(|_| unit(mean).sample(&mut rng)));
            }
            Scenario::Linear { signal } => {
                let shift = if one { 0.5 } else { -0.5 };
                values.extend((0..10).map(|f| unit(if f < *signal { shift } else { 0.0 }).sample(&mut rng)));
            }
            Scenario::Nonlinear3Mode => {
                let mean = if one {
                    0.5
                } else if rng.random::<bool>() {
                    5.5
                } else {
                    -4.5
                };
                values.push(unit(mean).sample(&mut rng));
                values.extend((1..10).map(|_| Distribution::<f64>::sample(&StandardNormal, &mut rng)));
            }
            Scenario::ParityLeak => {
                let coin = Bernoulli::new(0.5).expect("fair coin").sample(&mut rng);
                values.push(if one { 1.0 } else { 0.0 });
                values.push(if coin { 1.0 } else { 0.0 });
            }
            Scenario::Csv { .. } => unreachable!("handled above"),
        }
    }
    let d = values.len() / n;
    Ok((Dataset::new(n, d, values)?, labeling))
}

fn subsample(path: &str, source: &LabeledData, n: usize, w: usize, rng: &mut ChaCha8Rng) -> Result<(Dataset, Word)> {
    let labels = source
        .labels
        .as_ref()
        .ok_or_else(|| Error::input(format!("{path} has no label column")))?;
    let mut ones: Vec<usize> = (0..labels.len()).filter(|&r| labels[r]).collect();
    let mut zeros: Vec<usize> = (0..labels.len()).filter(|&r| !labels[r]).collect();
    if ones.len() < w || zeros.len() < n - w {
        return Err(Error::input(format!(
            "{path} has {} rows labelled 1 and {} labelled 0, need {w} and {}",
            ones.len(),
            zeros.len(),
            n - w
        )));
    }
    ones.shuffle(rng);
    zeros.shuffle(rng);
    let mut rows: Vec<usize> = ones[..w].iter().chain(&zeros[..n - w]).copied().collect();
    rows.sort_unstable();
    let positions: Vec<usize> = (0..n).filter(|&i| labels[rows[i]]).collect();
    Ok((source.data.select(&rows), Word::from_positions(n, &positions)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let parsed = parse_dataset_csv("a,b,label\n1.5,2,1\n-3,0.25,0\n\n").unwrap();
        assert_eq!(parsed.data.n(), 2);
        assert_eq!(parsed.data.row(1), &[-3.0, 0.25]);
        assert_eq!(parsed.labels, Some(vec![true, false]));
        assert_eq!(parsed.labeling().unwrap().unwrap().to_string(), "10");
        let unlabeled = parse_dataset_csv("a\n1\n2\n").unwrap();
        assert_eq!(unlabeled.labels, None);
        for bad in ["", "a,b\n1\n", "a\nx\n", "a,label\n1,2\n", "a\n", "a\nNaN\n"] {
            assert!(matches!(parse_dataset_csv(bad), Err(Error::Input(_))), "{bad:?}");
        }
    }

    #[test]
    fn scenario_shapes() {
        let (x, y) = generate_data(&Scenario::parse("null-gauss-10d").unwrap(), 30, 15, 1).unwrap();
        assert_eq!((x.n(), x.d(), y.weight()), (30, 10, 15));
        let (x, _) = generate_data(&Scenario::parse("null-mix-1d").unwrap(), 8, 3, 1).unwrap();
        assert_eq!(x.d(), 1);
        let (x, y) = generate_data(&Scenario::ParityLeak, 12, 6, 4).unwrap();
        for r in 0..12 {
            assert_eq!(x.get(r, 0) == 1.0, y.get(r));
            assert!(x.get(r, 1) == 0.0 || x.get(r, 1) == 1.0);
        }
        assert!(Scenario::parse("gauss").is_err());
        assert!(generate_data(&Scenario::ParityLeak, 4, 4, 0).is_err());
    }

    #[test]
    fn same_seed_same_sample() {
        let s = Scenario::parse("nonlinear-3mode").unwrap();
        assert_eq!(
            generate_data(&s, 20, 10, 7).unwrap(),
            generate_data(&s, 20, 10, 7).unwrap()
        );
        assert_ne!(
            generate_data(&s, 20, 10, 7).unwrap(),
            generate_data(&s, 20, 10, 8).unwrap()
        );
    }

    #[test]
    fn linear_signal_shifts_the_class_means() {
        let s = Scenario::Linear { signal: 1 };
        let (mut gap, mut noise) = (0.0, 0.0);
        let reps = 400;
        for seed in 0..reps {
            let (x, y) = generate_data(&s, 40, 20, seed).unwrap();
            let mean =
                |f: usize, label: bool| (0..40).filter(|&r| y.get(r) == label).map(|r| x.get(r, f)).sum::<f64>() / 20.0;
            gap += mean(0, true) - mean(0, false);
            noise += mean(5, true) - mean(5, false);
        }
        // standard error of each averaged gap is sqrt(2 / 20 / 400) ~ 0.016
        assert!((gap / reps as f64 - 1.0).abs() < 0.08);
        assert!((noise / reps as f64).abs() < 0.08);
    }

    #[test]
    fn csv_subsample_is_stratified() {
        let dir = std::env::temp_dir().join(format!("lpo-codes-data-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d.csv");
        let mut text = String::from("x,label\n");
        for r in 0..30 {
            text.push_str(&format!("{r},{}\n", u8::from(r % 3 == 0)));
        }
        std::fs::write(&path, text).unwrap();
        let s = Scenario::parse(&format!("csv:{}", path.display())).unwrap();
        let (x, y) = generate_data(&s, 12, 5, 3).unwrap();
        assert_eq!(y.weight(), 5);
        for r in 0..12 {
            assert_eq!((x.get(r, 0) as usize).is_multiple_of(3), y.get(r));
        }
        assert!(generate_data(&s, 30, 15, 3).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
