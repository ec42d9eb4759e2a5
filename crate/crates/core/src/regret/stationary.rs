use thiserror::Error;

/// Residual the solver aims for.
pub const STATIONARY_TARGET: f64 = 1e-12;
/// Largest residual accepted as a fixed point.
pub const STATIONARY_ACCEPT: f64 = 1e-9;
pub const POWER_ITERATION_CAP: usize = 100_000;

const COLUMN_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StationaryError {
    #[error("matrix is not square: column {column} has {len} entries for {n} columns")]
    NotSquare { column: usize, len: usize, n: usize },
    #[error("column {column} is not a probability vector (sum {sum})")]
    NotStochastic { column: usize, sum: f64 },
    #[error("no fixed point found: residual {residual}")]
    NoConvergence { residual: f64, approximate: Vec<f64> },
}

/// ‖q − Mq‖₁ for the column-stochastic matrix with the given columns.
pub fn residual(columns: &[Vec<f64>], q: &[f64]) -> f64 {
    let mq = apply(columns, q);
    q.iter().zip(&mq).map(|(a, b)| (a - b).abs()).sum()
}

fn apply(columns: &[Vec<f64>], q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut out = vec![0.0; n];
    for (col, &w) in columns.iter().zip(q) {
        for r in 0..n {
            out[r] += col[r] * w;
        }
    }
    out
}

fn normalize(q: &mut [f64]) {
    for v in q.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = q.iter().sum();
    for v in q.iter_mut() {
        *v /= s;
    }
}

/// Solves (M − I) q = 0, Σ q = 1 by Gaussian elimination with partial
/// pivoting. Returns `None` when the system is singular (M reducible).
fn direct_solve(columns: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = columns.len();
    // Row-major augmented matrix.
    let mut a = vec![vec![0.0; n + 1]; n];
    for r in 0..n {
        for c in 0..n {
            a[r][c] = columns[c][r] - if r == c { 1.0 } else { 0.0 };
        }
    }
    a[n - 1] = vec![1.0; n + 1];
    for k in 0..n {
        let pivot = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[pivot][k].abs() < 1e-13 {
            return None;
        }
        a.swap(k, pivot);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            if f != 0.0 {
                for c in k..=n {
                    a[r][c] -= f * a[k][c];
                }
            }
        }
    }
    let mut q = vec![0.0; n];
    for k in (0..n).rev() {
        let mut v = a[k][n];
        for c in k + 1..n {
            v -= a[k][c] * q[c];
        }
        q[k] = v / a[k][k];
    }
    if q.iter().any(|v| !v.is_finite() || *v < -1e-9) {
        return None;
    }
    normalize(&mut q);
    Some(q)
}

/// Iterates q ← (1−θ)q + θMq from `q` until the residual reaches the target.
fn iterate(columns: &[Vec<f64>], q: &mut Vec<f64>, damping: f64, cap: usize) -> f64 {
    let mut res = residual(columns, q);
    for _ in 0..cap {
        if res <= STATIONARY_TARGET {
            break;
        }
        let mq = apply(columns, q);
        for (v, m) in q.iter_mut().zip(&mq) {
            *v = (1.0 - damping) * *v + damping * m;
        }
        normalize(q);
        res = residual(columns, q);
    }
    res
}

/// Fixed point q = Mq of a column-stochastic matrix given by its columns.
///
/// Irreducible chains are solved directly and polished by power iteration.
/// Otherwise power iteration from the uniform vector is used, followed by
/// damped iteration q ← ½q + ½Mq if it has not converged; for reducible chains
/// this deterministically selects one of the fixed points.
pub fn stationary_distribution(columns: &[Vec<f64>]) -> Result<Vec<f64>, StationaryError> {
    let n = columns.len();
    for (c, col) in columns.iter().enumerate() {
        if col.len() != n {
            return Err(StationaryError::NotSquare { column: c, len: col.len(), n });
        }
        let sum: f64 = col.iter().sum();
        if (sum - 1.0).abs() > COLUMN_SUM_TOLERANCE || col.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(StationaryError::NotStochastic { column: c, sum });
        }
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![1.0]),
        2 => {
            let (to1, to0) = (columns[0][1], columns[1][0]);
            if to1 + to0 > 0.0 {
                let q = vec![to0 / (to0 + to1), to1 / (to0 + to1)];
                let res = residual(columns, &q);
                if res <= STATIONARY_ACCEPT {
                    return Ok(q);
                }
            }
        }
        _ => {}
    }

    if let Some(mut q) = direct_solve(columns) {
        let res = iterate(columns, &mut q, 1.0, 16);
        if res <= STATIONARY_ACCEPT {
            return Ok(q);
        }
    }
    let mut q = vec![1.0 / n as f64; n];
    let mut res = iterate(columns, &mut q, 1.0, POWER_ITERATION_CAP);
    if res > STATIONARY_TARGET {
        res = iterate(columns, &mut q, 0.5, POWER_ITERATION_CAP);
    }
    if res <= STATIONARY_ACCEPT {
        Ok(q)
    } else {
        Err(StationaryError::NoConvergence { residual: res, approximate: q })
    }
}
