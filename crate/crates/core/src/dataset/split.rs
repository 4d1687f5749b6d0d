use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::IntervalFrame;
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Random,
    Chronological,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub mode: SplitMode,
    pub seed: u64,
    /// Exact training size; overrides `train_fraction` when set.
    pub train_count: Option<usize>,
}

impl SplitSpec {
    pub fn random(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            mode: SplitMode::Random,
            seed,
            train_count: None,
        }
    }

    pub fn chronological(train_fraction: f64) -> Self {
        Self {
            train_fraction,
            mode: SplitMode::Chronological,
            seed: 0,
            train_count: None,
        }
    }
}

/// Training-set size for `n` rows: `round(fraction · n)`, halves rounded up.
pub fn train_size(n: usize, spec: &SplitSpec) -> Result<usize> {
    if let Some(k) = spec.train_count {
        return check_sizes(n, k);
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Split(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let k = (spec.train_fraction * n as f64 + 0.5).floor() as usize;
    check_sizes(n, k)
}

fn check_sizes(n: usize, k: usize) -> Result<usize> {
    if k < 2 || k >= n {
        return Err(Error::Split(format!(
            "{n} rows give train size {k} and test size {}; need train >= 2 and test >= 1",
            n.saturating_sub(k)
        )));
    }
    Ok(k)
}

/// Partition row indices into (train, test), each in original row order.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let k = train_size(n, spec)?;
    match spec.mode {
        SplitMode::Chronological => Ok(((0..k).collect(), (k..n).collect())),
        SplitMode::Random => {
            let mut idx: Vec<usize> = (0..n).collect();
            let mut rng = stream(spec.seed, Stream::Split);
            idx.shuffle(&mut rng);
            let mut train = idx[..k].to_vec();
            let mut test = idx[k..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            Ok((train, test))
        }
    }
}

pub fn split(frame: &IntervalFrame, spec: &SplitSpec) -> Result<(IntervalFrame, IntervalFrame)> {
    let (train, test) = split_indices(frame.n(), spec)?;
    Ok((frame.select_rows(&train)?, frame.select_rows(&test)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_sizes() {
        let (tr, te) = split_indices(500, &SplitSpec::random(0.1, 3)).unwrap();
        assert_eq!((tr.len(), te.len()), (50, 450));
        let (tr, te) = split_indices(1511, &SplitSpec::chronological(0.8)).unwrap();
        assert_eq!((tr.len(), te.len()), (1209, 302));
        assert_eq!(tr, (0..1209).collect::<Vec<_>>());
        let exact = SplitSpec {
            train_count: Some(1208),
            ..SplitSpec::chronological(0.8)
        };
        let (tr, te) = split_indices(1511, &exact).unwrap();
        assert_eq!((tr.len(), te.len()), (1208, 303));
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = split_indices(100, &SplitSpec::random(0.3, 11)).unwrap();
        let b = split_indices(100, &SplitSpec::random(0.3, 11)).unwrap();
        let c = split_indices(100, &SplitSpec::random(0.3, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_sizes() {
        assert!(matches!(
            split_indices(3, &SplitSpec::random(0.1, 0)),
            Err(Error::Split(_))
        ));
        assert!(matches!(
            split_indices(10, &SplitSpec::random(0.99, 0)),
            Err(Error::Split(_))
        ));
        assert!(split_indices(10, &SplitSpec::random(1.0, 0)).is_err());
        assert!(split_indices(10, &SplitSpec::random(0.0, 0)).is_err());
    }
}
