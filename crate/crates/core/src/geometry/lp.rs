//! Exact simplex for `min Σ c_i` subject to `<c, β> >= 1` over a point set.
//!
//! The dual `max Σ y_β` subject to `Σ y_β β <= 1`, `y >= 0` has the slack
//! basis as a feasible start, so no phase one is needed. Bland's rule keeps
//! pivoting finite and the optimum deterministic.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Q,
    /// An optimal primal vector `c`.
    pub c: Vec<Q>,
}

pub fn iota_lp(points: &[Vec<Q>]) -> Result<LpSolution> {
    let k = points.len();
    let n = points.first().map_or(0, Vec::len);
    let cols = k + n;
    // tableau rows: n constraints, then the objective row (reduced costs)
    let mut t: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row = vec![Q::zero(); cols + 1];
            for (j, p) in points.iter().enumerate() {
                row[j] = p[i].clone();
            }
            row[k + i] = Q::one();
            row[cols] = Q::one();
            row
        })
        .collect();
    let mut obj = vec![Q::zero(); cols + 1];
    for x in obj.iter_mut().take(k) {
        *x = -Q::one();
    }
    let mut basis: Vec<usize> = (k..k + n).collect();
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..n {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { return Err(Error::UnboundedLp) };
        let inv = t[r][enter].recip();
        for x in t[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        let f = obj[enter].clone();
        for (x, y) in obj.iter_mut().zip(&pivot) {
            *x -= &f * y;
        }
        basis[r] = enter;
    }
    Ok(LpSolution { value: obj[cols].clone(), c: obj[k..k + n].to_vec() })
}
