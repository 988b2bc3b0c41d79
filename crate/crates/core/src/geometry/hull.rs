//! Double description method: extreme rays of `{y : <r, y> >= 0 for all rows r}`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{normalize, primitive, rref, solve};
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    pub fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    pub fn contains(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

#[derive(Debug, Clone)]
pub struct Ray {
    pub v: Vec<BigInt>,
    /// Rows on which `<r, v> = 0`.
    pub sat: Bits,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Extreme rays of the pointed cone `{y : rows * y >= 0}`.
pub fn extreme_rays(rows: &[Vec<BigInt>]) -> Result<Vec<Ray>> {
    let d = rows.first().map_or(0, Vec::len);
    let nrows = rows.len();

    // greedy choice of d independent rows
    let mut basis: Vec<usize> = Vec::new();
    let mut acc: Vec<Vec<Q>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = acc.clone();
        trial.push(r.iter().map(|x| Q::from_integer(x.clone())).collect());
        let mut m = trial.clone();
        if rref(&mut m).len() == trial.len() {
            acc = trial;
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(Error::Invalid("cone is not pointed".into()));
    }

    let mut rays: Vec<Ray> = (0..d)
        .map(|k| {
            let e: Vec<Q> = (0..d).map(|j| Q::from_integer(BigInt::from((j == k) as i32))).collect();
            let y = solve(&acc, &e).expect("independent rows");
            let v = primitive(&y);
            let mut sat = Bits::new(nrows);
            for (j, &b) in basis.iter().enumerate() {
                if j != k {
                    sat.set(b);
                }
            }
            Ray { v, sat }
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (k, r) in rays.iter().enumerate() {
            if vals[k].is_zero() {
                let mut r = r.clone();
                r.sat.set(i);
                next.push(r);
            } else if vals[k].is_positive() {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].sat.and(&rays[n].sat);
                if (common.count() as usize) + 2 < d {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != n && r.sat.contains(&common));
                if blocked {
                    continue;
                }
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(yn, yp)| &vals[p] * yn - &vals[n] * yp)
                    .collect();
                let mut sat = common;
                sat.set(i);
                next.push(Ray { v: normalize(v), sat });
            }
        }
        rays = next;
    }
    // recompute saturation against every row so callers can trust it
    for r in rays.iter_mut() {
        let mut sat = Bits::new(nrows);
        for (i, row) in rows.iter().enumerate() {
            if dot(row, &r.v).is_zero() {
                sat.set(i);
            }
        }
        r.sat = sat;
    }
    rays.sort_by(|a, b| a.v.cmp(&b.v));
    Ok(rays)
}
