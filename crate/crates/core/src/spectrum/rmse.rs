use crate::error::{Error, Result};
use crate::scalar::Real;

/// Error charged for each true angle with no matching estimate.
pub const MISSING_PENALTY_DEG: f64 = 90.0;

/// Largest `K` solved by enumerating permutations; above this the Hungarian
/// algorithm is used.
const EXHAUSTIVE_LIMIT: usize = 6;

/// Outcome of pairing one trial's estimates with the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMatch<T> {
    /// Sum of squared angular errors in deg².
    pub squared_error: T,
    /// Number of true angles.
    pub count: usize,
    /// Estimates were fewer than true angles and the gap was charged at 90°.
    pub padded: bool,
    /// `assignment[i]` is the truth index paired with estimate `i`.
    pub assignment: Vec<usize>,
}

/// Minimum-cost one-to-one matching of estimates to true angles on absolute error.
pub fn match_trial<T: Real>(estimates: &[T], truth: &[T]) -> Result<TrialMatch<T>> {
    if truth.is_empty() {
        return Err(Error::Domain("truth list is empty".into()));
    }
    if estimates.len() > truth.len() {
        return Err(Error::Dimension(format!(
            "{} estimates for {} true angles",
            estimates.len(),
            truth.len()
        )));
    }
    if estimates.iter().chain(truth).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite angle".into()));
    }
    let k = truth.len();
    let n_est = estimates.len();
    // Rows: estimates followed by padding rows; columns: truth.
    let penalty = T::lit(MISSING_PENALTY_DEG);
    let cost = |i: usize, j: usize| -> T {
        if i < n_est {
            let d = estimates[i] - truth[j];
            d * d
        } else {
            penalty * penalty
        }
    };
    let perm = if k <= EXHAUSTIVE_LIMIT { best_permutation(k, &cost) } else { hungarian(k, &cost) };
    let squared_error = (0..k).map(|i| cost(i, perm[i])).sum();
    Ok(TrialMatch {
        squared_error,
        count: k,
        padded: n_est < k,
        assignment: perm[..n_est].to_vec(),
    })
}

/// RMSE of a single trial.
pub fn match_rmse<T: Real>(estimates: &[T], truth: &[T]) -> Result<T> {
    let m = match_trial(estimates, truth)?;
    Ok((m.squared_error / T::from_count(m.count)).sqrt())
}

/// `sqrt(Σ squared errors / Σ counts)` over trials.
pub fn aggregate_rmse<T: Real>(trials: &[TrialMatch<T>]) -> Option<T> {
    let count: usize = trials.iter().map(|t| t.count).sum();
    if count == 0 {
        return None;
    }
    let sum: T = trials.iter().map(|t| t.squared_error).sum();
    Some((sum / T::from_count(count)).sqrt())
}

fn best_permutation<T: Real>(k: usize, cost: &dyn Fn(usize, usize) -> T) -> Vec<usize> {
    fn recurse<T: Real>(
        row: usize,
        k: usize,
        used: &mut [bool],
        cur: &mut Vec<usize>,
        acc: T,
        best: &mut (T, Vec<usize>),
        cost: &dyn Fn(usize, usize) -> T,
    ) {
        if acc >= best.0 {
            return;
        }
        if row == k {
            *best = (acc, cur.clone());
            return;
        }
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                recurse(row + 1, k, used, cur, acc + cost(row, j), best, cost);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut best = (T::infinity(), (0..k).collect());
    recurse(0, k, &mut vec![false; k], &mut Vec::with_capacity(k), T::zero(), &mut best, cost);
    best.1
}

/// Square assignment by the O(k³) Hungarian method with potentials.
fn hungarian<T: Real>(k: usize, cost: &dyn Fn(usize, usize) -> T) -> Vec<usize> {
    let inf = T::infinity();
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![T::zero(); k + 1];
    let mut v = vec![T::zero(); k + 1];
    let mut col_row = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        col_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[col_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; k];
    for j in 1..=k {
        assign[col_row[j] - 1] = j - 1;
    }
    assign
}
