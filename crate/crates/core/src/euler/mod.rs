//! Regularized Euler products `Π_p (1 - 1/p)^K Σ_ν g(ν) p^{-<ν, c>}`.
//!
//! With `D` the common denominator of `c`, the local sum is a power series
//! in `x = p^{-1/D}` whose integer coefficients do not depend on `p`. Primes
//! up to the cutoff are multiplied in high precision. The primes above the
//! cutoff contribute `Σ_j ℓ_j P_X(j/D)`, where `ℓ_j` are the coefficients of
//! the logarithm of the regularized series and `P_X` is a prime zeta tail;
//! the dropped part of that series is bounded by Cauchy's estimate.

pub mod primes;
pub mod zeta;

use std::collections::BTreeMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{UniformMultiplicativeSpec, WeightRule};
use crate::rational::{dot, format_q, to_f64, Q};
use primes::primes_up_to;
use zeta::prime_zeta;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConfig {
    pub prime_cutoff: u64,
    /// Target relative error for the truncated local sums, summed over all primes.
    pub tol: f64,
    pub precision_bits: usize,
}

impl Default for EulerConfig {
    fn default() -> Self {
        EulerConfig { prime_cutoff: 100_000, tol: 1e-15, precision_bits: 160 }
    }
}

pub(crate) fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else { return f64::NAN };
    let top = *words.last().unwrap() as f64;
    let next = if words.len() > 1 { words[words.len() - 2] as f64 } else { 0.0 };
    let m = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let v = m * 2f64.powi(e);
    if sign.is_negative() {
        -v
    } else {
        v
    }
}

fn bf_decimal(x: &BigFloat, cc: &mut Consts) -> String {
    x.format(Radix::Dec, RM, cc).unwrap_or_else(|_| "NaN".into())
}

/// The local sums as power series in `x = p^{-1/D}`, grouped by `|ν|`.
#[derive(Debug, Clone)]
pub struct LocalSeries {
    pub arity: usize,
    /// `D`.
    pub denom: u64,
    /// `D c`, integral.
    pub weights: Vec<u64>,
    pub cmin: f64,
    /// `levels[k]` maps `D<ν, c>` to `Σ g(ν)` over `|ν| = k`.
    pub levels: Vec<Vec<(u64, u64)>>,
    growth_c: f64,
    growth_m: u32,
}

impl LocalSeries {
    pub fn new(spec: &UniformMultiplicativeSpec, c: &[Q], max_level: usize) -> Result<Self> {
        if c.len() != spec.arity {
            return Err(Error::ArityMismatch { expected: spec.arity, got: c.len() });
        }
        if c.iter().any(|x| !x.is_positive()) {
            return Err(Error::NonPositivePolar);
        }
        let denom = c.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let dq = Q::from_integer(denom.clone());
        let weights: Vec<u64> = c
            .iter()
            .map(|x| (x * &dq).to_integer().to_u64().ok_or_else(|| Error::Invalid("polar vector too large".into())))
            .collect::<Result<_>>()?;
        let denom = denom.to_u64().ok_or_else(|| Error::Invalid("denominator too large".into()))?;
        let n = spec.arity;
        let levels: Vec<Vec<(u64, u64)>> = (0..=max_level)
            .into_par_iter()
            .map(|k| {
                let mut acc: BTreeMap<u64, u64> = BTreeMap::new();
                let mut nu = vec![0u32; n];
                visit_level(k as u32, 0, &mut nu, &mut |v| {
                    let g = spec.weight(v);
                    if g != 0 {
                        let e: u64 = v.iter().zip(&weights).map(|(&a, &w)| a as u64 * w).sum();
                        *acc.entry(e).or_insert(0) += g;
                    }
                });
                acc.into_iter().collect()
            })
            .collect();
        Ok(LocalSeries {
            arity: n,
            denom,
            cmin: c.iter().map(to_f64).fold(f64::INFINITY, f64::min),
            weights,
            levels,
            growth_c: spec.growth_c,
            growth_m: spec.growth_m,
        })
    }

    /// Terms `t_k` bounding the level sums at `p`, with a geometric closure.
    fn level_bounds(&self, p: f64) -> (Vec<f64>, f64) {
        let y = p.powf(-self.cmin);
        let n = self.arity;
        let mut terms = Vec::new();
        let mut binom = 1.0;
        let mut k = 0usize;
        loop {
            let t = self.growth_c * ((1 + k) as f64).powi(self.growth_m as i32) * binom * y.powi(k as i32);
            terms.push(t);
            let ratio = ((k + 2) as f64 / (k + 1) as f64).powi(self.growth_m as i32) * (k + n) as f64
                / (k + 1) as f64
                * y;
            if ratio < 1.0 && (t / (1.0 - ratio) < 1e-60 || k > 1_000_000) {
                return (terms, ratio / (1.0 - ratio));
            }
            binom *= (k + n) as f64 / (k + 1) as f64;
            k += 1;
        }
    }

    /// Bound on `Σ_{|ν| > level} g(ν) p^{-<ν,c>}`.
    pub fn tail_bound(&self, p: f64, level: usize) -> f64 {
        let (terms, closure) = self.level_bounds(p);
        if level + 1 >= terms.len() {
            return terms.last().unwrap() * closure;
        }
        terms[level + 1..].iter().sum::<f64>() + terms.last().unwrap() * closure
    }

    /// Smallest truncation level whose tail is below `target`.
    pub fn level_for(&self, p: f64, target: f64) -> usize {
        let (terms, closure) = self.level_bounds(p);
        let mut tail = terms.last().unwrap() * closure;
        let mut level = terms.len() - 1;
        while level > 0 && tail + terms[level] <= target {
            tail += terms[level];
            level -= 1;
        }
        level
    }

    /// Coefficients `s_e` of `x^e` from levels `0..=level`.
    pub fn coefficients(&self, level: usize) -> Vec<u64> {
        let top = self.levels[..=level].iter().flat_map(|l| l.iter().map(|t| t.0)).max().unwrap_or(0);
        let mut s = vec![0u64; top as usize + 1];
        for l in &self.levels[..=level] {
            for &(e, g) in l {
                s[e as usize] += g;
            }
        }
        s
    }

    /// Exact coefficients `s_e` for `e <= j_max`.
    pub fn exact_prefix(&self, j_max: u64) -> Result<Vec<u64>> {
        let wmin = *self.weights.iter().min().unwrap();
        let need = (j_max / wmin) as usize;
        if need >= self.levels.len() {
            return Err(Error::Invalid("local series enumerated too shallowly".into()));
        }
        let mut s = vec![0u64; j_max as usize + 1];
        for l in &self.levels[..=need] {
            for &(e, g) in l {
                if e <= j_max {
                    s[e as usize] += g;
                }
            }
        }
        Ok(s)
    }

    /// `Σ_{|ν| <= level} g(ν) p^{-<ν,c>}` in high precision.
    pub fn eval_bf(&self, p: u64, level: usize, prec: usize, cc: &mut Consts) -> BigFloat {
        let s = self.coefficients(level);
        let x = BigFloat::from_u64(p, prec)
            .ln(prec, RM, cc)
            .div(&BigFloat::from_u64(self.denom, prec), prec, RM)
            .neg()
            .exp(prec, RM, cc);
        let mut acc = BigFloat::from_u64(0, prec);
        for &coef in s.iter().rev() {
            acc = acc.mul(&x, prec, RM).add(&BigFloat::from_u64(coef, prec), prec, RM);
        }
        acc
    }

    /// Upper bound on the full local sum at a real `p`, in double precision.
    pub fn upper_f64(&self, p: f64) -> f64 {
        let level = self.level_for(p, 1e-12).min(self.levels.len() - 1);
        let s = self.coefficients(level);
        let x = p.powf(-1.0 / self.denom as f64);
        let v = s.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64);
        v * (1.0 + 1e-14) + self.tail_bound(p, level)
    }
}

fn visit_level(k: u32, depth: usize, nu: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    let n = nu.len();
    if depth + 1 == n {
        nu[depth] = k;
        f(nu);
        return;
    }
    for first in 0..=k {
        nu[depth] = first;
        visit_level(k - first, depth + 1, nu, f);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalFactor {
    pub p: u64,
    /// `Σ g(ν) p^{-<ν,c>}`.
    pub value: f64,
    pub truncation_level: usize,
    pub tail_bound: f64,
}

fn series_depth(series_tol: f64, spec: &UniformMultiplicativeSpec, c: &[Q], p: u64) -> Result<usize> {
    let probe = LocalSeries::new(spec, c, 0)?;
    Ok(probe.level_for(p as f64, series_tol))
}

/// `Σ_ν g(ν) p^{-<ν, c>}` to absolute accuracy `tol`.
pub fn local_factor(spec: &UniformMultiplicativeSpec, c: &[Q], p: u64, tol: f64) -> Result<LocalFactor> {
    let level = series_depth(tol, spec, c, p)?;
    let series = LocalSeries::new(spec, c, level)?;
    let mut cc = Consts::new().map_err(|e| Error::Invalid(format!("{e:?}")))?;
    let v = series.eval_bf(p, level, 128, &mut cc);
    Ok(LocalFactor { p, value: bf_to_f64(&v), truncation_level: level, tail_bound: series.tail_bound(p as f64, level) })
}

/// Least `⟨c, ν⟩ - 1` over generators off the face `⟨c, ·⟩ = 1`, capped by
/// `min c` so that it also covers non-minimal support points.
pub fn epsilon_gap(generators: &[Vec<u32>], c: &[Q]) -> Q {
    let cmin = c.iter().min().cloned().unwrap_or_else(Q::one);
    generators
        .iter()
        .map(|g| {
            let v: Vec<Q> = g.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect();
            dot(&v, c) - Q::one()
        })
        .filter(|x| x.is_positive())
        .fold(cmin, |a, x| a.min(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerReport {
    pub value: f64,
    /// The product to the working precision, in decimal.
    pub value_decimal: String,
    pub error: f64,
    pub relative_error: f64,
    pub prime_cutoff: u64,
    pub primes_used: usize,
    pub k: u32,
    pub denominator: u64,
    pub epsilon: String,
    /// `log` of the product over primes above the cutoff.
    pub tail_correction: f64,
    pub tail_remainder: f64,
    pub precision_bits: usize,
    /// Regularized local factors for the first primes.
    pub leading_factors: Vec<(u64, f64)>,
    #[serde(skip)]
    pub factors: Vec<(u64, f64)>,
}

/// `Π_i (1 - x^{a_i})^{-1}` with `x = p^{-1/D}`: the local sum of `g ≡ 1`.
fn geometric_product(exponents: &[u64], p: u64, d: u64, prec: usize, cc: &mut Consts) -> BigFloat {
    let one = BigFloat::from_u64(1, prec);
    let mut acc = one.clone();
    for &a in exponents {
        let xa = if a % d == 0 {
            BigFloat::from_u64(p, prec).powi((a / d) as usize, prec, RM).reciprocal(prec, RM)
        } else {
            BigFloat::from_u64(p, prec)
                .ln(prec, RM, cc)
                .mul(&BigFloat::from_u64(a, prec), prec, RM)
                .div(&BigFloat::from_u64(d, prec), prec, RM)
                .neg()
                .exp(prec, RM, cc)
        };
        acc = acc.div(&one.sub(&xa, prec, RM), prec, RM);
    }
    acc
}

/// `Π_p (1 - 1/p)^K Σ_ν g(ν) p^{-<ν, c>}`.
pub fn euler_constant(spec: &UniformMultiplicativeSpec, c: &[Q], k: u32, generators: &[Vec<u32>], cfg: &EulerConfig) -> Result<EulerReport> {
    let x_cut = cfg.prime_cutoff.max(10);
    let prec = cfg.precision_bits.max(64);
    let primes = primes_up_to(x_cut);
    // per-prime targets sum to at most tol, since Σ_p p^{-2} < 0.4523
    let target = |p: u64| cfg.tol * (p as f64).powi(-2) / 0.4523;

    let probe = LocalSeries::new(spec, c, 0)?;
    let d = probe.denom;
    let wmin = *probe.weights.iter().min().unwrap();
    let j_max = 8 * d;
    let depth = probe.level_for(2.0, target(2)).max((j_max / wmin) as usize);
    let series = LocalSeries::new(spec, c, depth)?;

    let s = series.exact_prefix(j_max)?;
    if s[1..d as usize].iter().any(|&v| v != 0) {
        return Err(Error::Invalid("polar vector is not normalized: some <ν,c> < 1".into()));
    }
    if s[d as usize] != k as u64 {
        return Err(Error::RegularizationMismatch { k, residual: s[d as usize] as f64 - k as f64 });
    }

    let exponents: Vec<u64> = c.iter().map(|ci| (ci * Q::from_integer(BigInt::from(d))).to_integer().to_u64().unwrap_or(0)).collect();
    let factors: Vec<BigFloat> = primes
        .par_iter()
        .map_init(
            || Consts::new().expect("constants cache"),
            |cc, &p| {
                let sp = match spec.rule {
                    WeightRule::Constant => geometric_product(&exponents, p, d, prec, cc),
                    _ => series.eval_bf(p, series.level_for(p as f64, target(p)).min(depth), prec, cc),
                };
                let one = BigFloat::from_u64(1, prec);
                let q = one.sub(&BigFloat::from_u64(p, prec).reciprocal(prec, RM), prec, RM);
                q.powi(k as usize, prec, RM).mul(&sp, prec, RM)
            },
        )
        .collect();
    let mut prod = BigFloat::from_u64(1, prec);
    for f in &factors {
        prod = prod.mul(f, prec, RM);
    }

    let (log_tail, remainder, floor) = tail_log(&series, &s, k, x_cut, &primes)?;
    let mut cc = Consts::new().map_err(|e| Error::Invalid(format!("{e:?}")))?;
    let total = prod.mul(&BigFloat::from_f64(log_tail, prec).exp(prec, RM, &mut cc), prec, RM);
    let value = bf_to_f64(&total);
    let rounding = 2f64.powi(-(prec as i32) + 32);
    let delta = cfg.tol + remainder + floor + rounding;
    let relative_error = delta.exp_m1();
    let factors_f64: Vec<(u64, f64)> = primes.iter().zip(&factors).map(|(&p, f)| (p, bf_to_f64(f))).collect();
    Ok(EulerReport {
        value,
        value_decimal: bf_decimal(&total, &mut cc),
        error: value.abs() * relative_error,
        relative_error,
        prime_cutoff: x_cut,
        primes_used: primes.len(),
        k,
        denominator: d,
        epsilon: format_q(&epsilon_gap(generators, c)),
        tail_correction: log_tail,
        tail_remainder: remainder,
        precision_bits: prec,
        leading_factors: factors_f64.iter().copied().take_while(|f| f.0 <= 100).collect(),
        factors: factors_f64,
    })
}

/// `Σ_{p > X} log F(p)` with `F = (1 - x^D)^K S(x)`, together with a bound on
/// the truncated series and a rounding floor that does not depend on `X`.
fn tail_log(series: &LocalSeries, s: &[u64], k: u32, x_cut: u64, primes: &[u64]) -> Result<(f64, f64, f64)> {
    let d = series.denom as usize;
    let j_max = s.len() - 1;
    // f_j: coefficients of (1 - x^D)^K S(x)
    let mut f = vec![0.0f64; j_max + 1];
    let mut binom = 1.0f64;
    for i in 0..=(k as usize) {
        let shift = i * d;
        if shift > j_max {
            break;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        for j in shift..=j_max {
            f[j] += sign * binom * s[j - shift] as f64;
        }
        binom = binom * (k as usize - i) as f64 / (i + 1) as f64;
    }
    // ℓ_j from j ℓ_j = j f_j - Σ_{i<j} i ℓ_i f_{j-i}
    let mut ell = vec![0.0f64; j_max + 1];
    for j in 1..=j_max {
        let mut acc = j as f64 * f[j];
        for i in 1..j {
            acc -= i as f64 * ell[i] * f[j - i];
        }
        ell[j] = acc / j as f64;
    }

    let mut log_tail = 0.0;
    let mut floor = 0.0;
    for j in (d + 1)..=j_max {
        if ell[j] == 0.0 {
            continue;
        }
        let sj = j as f64 / d as f64;
        let full = prime_zeta(sj);
        let mut head = 0.0;
        let mut comp = 0.0;
        for &p in primes.iter().rev() {
            // Kahan summation, smallest terms first
            let y = (p as f64).powf(-sj) - comp;
            let t = head + y;
            comp = (t - head) - y;
            head = t;
        }
        log_tail += ell[j] * (full - head);
        floor += 16.0 * f64::EPSILON * ell[j].abs() * (full + 1.0);
    }

    // Cauchy bound: find p_r with S(p_r) <= 3/2, then |ℓ_j| <= B p_r^{j/D}
    let mut p_r = 2.0f64;
    while series.upper_f64(p_r) > 1.5 {
        p_r *= 1.25;
        if p_r >= x_cut as f64 {
            return Ok((log_tail, f64::INFINITY, floor));
        }
    }
    let r_d = 1.0 / p_r;
    let b = -(k as f64) * (1.0 - r_d).ln() - (2.0 - series.upper_f64(p_r)).ln();
    let s_exp = (j_max + 1) as f64 / d as f64;
    let x = x_cut as f64;
    let remainder = b * p_r.powf(s_exp) * x.powf(1.0 - s_exp) / (s_exp - 1.0) / (1.0 - (p_r / x).powf(1.0 / d as f64));
    Ok((log_tail, remainder, floor))
}
