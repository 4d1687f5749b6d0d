use serde::{Deserialize, Serialize};

/// Column-major matrix of scalar features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n: usize,
    columns: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    /// Panics when the columns differ in length.
    pub fn new(columns: Vec<Vec<f64>>) -> Self {
        let n = columns.first().map(Vec::len).unwrap_or(0);
        assert!(columns.iter().all(|c| c.len() == n), "ragged feature columns");
        Self { n, columns }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, f: usize) -> &[f64] {
        &self.columns[f]
    }

    pub fn get(&self, row: usize, f: usize) -> f64 {
        self.columns[f][row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[row]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Sum of the two children's residual sums of squares.
    pub rss: f64,
}

/// Minimum RSS reduction for a split to count.
pub const MIN_IMPROVEMENT: f64 = 1e-12;

const TIE_TOLERANCE: f64 = 1e-12;

/// Best axis-aligned split of `rows` over the candidate `features`.
///
/// Thresholds are midpoints between consecutive distinct values; rows with
/// `x <= threshold` go left. Both children must hold at least `min_leaf`
/// rows. Ties keep the lowest feature index, then the lowest threshold.
pub fn best_split_with_min_leaf(
    rows: &[usize],
    y: &[f64],
    features: &[usize],
    x: &FeatureMatrix,
    min_leaf: usize,
) -> Option<SplitCandidate> {
    let n = rows.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    // Centering keeps the running-sum RSS formula well conditioned.
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / n as f64;
    let parent: f64 = rows.iter().map(|&r| (y[r] - mean).powi(2)).sum();

    let mut ordered = features.to_vec();
    ordered.sort_unstable();
    ordered.dedup();

    // Equal partitions reached through different features can differ by
    // rounding alone; such near-ties must not displace the earlier feature.
    let tie = TIE_TOLERANCE * parent.max(f64::MIN_POSITIVE);

    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut best: Option<SplitCandidate> = None;
    for &f in &ordered {
        let col = x.column(f);
        pairs.clear();
        pairs.extend(rows.iter().map(|&r| (col[r], y[r] - mean)));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total_sum: f64 = pairs.iter().map(|p| p.1).sum();
        let total_sq: f64 = pairs.iter().map(|p| p.1 * p.1).sum();
        let (mut ls, mut lq) = (0.0, 0.0);
        for i in 0..n - 1 {
            ls += pairs[i].1;
            lq += pairs[i].1 * pairs[i].1;
            let nl = i + 1;
            let nr = n - nl;
            if nl < min_leaf {
                continue;
            }
            if nr < min_leaf {
                break;
            }
            let (lo, hi) = (pairs[i].0, pairs[i + 1].0);
            if lo >= hi {
                continue;
            }
            let rs = total_sum - ls;
            let rq = total_sq - lq;
            let rss = (lq - ls * ls / nl as f64) + (rq - rs * rs / nr as f64);
            if best.is_none_or(|b| rss < b.rss - tie) {
                let mid = 0.5 * (lo + hi);
                let threshold = if mid < hi { mid } else { lo };
                best = Some(SplitCandidate {
                    feature: f,
                    threshold,
                    rss: rss.max(0.0),
                });
            }
        }
    }
    best.filter(|b| parent - b.rss > MIN_IMPROVEMENT)
}

/// [`best_split_with_min_leaf`] with no minimum child size.
pub fn best_split(
    rows: &[usize],
    y: &[f64],
    features: &[usize],
    x: &FeatureMatrix,
) -> Option<SplitCandidate> {
    best_split_with_min_leaf(rows, y, features, x, 1)
}
