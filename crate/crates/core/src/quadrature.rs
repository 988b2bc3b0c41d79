//! Numerical integration over boxes: adaptive Gauss–Kronrod in one dimension,
//! adaptive Genz–Malik cubature up to dimension four, and randomized Sobol
//! points beyond that.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ADAPTIVE_DIM: usize = 4;
pub const MAX_QMC_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
    pub seed: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-9, rel_tol: 1e-10, max_evals: 20_000_000, seed: 0 }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug)]
struct Region<T> {
    error: f64,
    value: f64,
    data: T,
}

impl<T> PartialEq for Region<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T> Eq for Region<T> {}
impl<T> PartialOrd for Region<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Region<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn totals<T>(heap: &BinaryHeap<Region<T>>) -> (f64, f64) {
    let mut parts: Vec<(f64, f64)> = heap.iter().map(|r| (r.value, r.error)).collect();
    // fixed summation order regardless of heap layout
    parts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    parts.iter().fold((0.0, 0.0), |(v, e), p| (v + p.0, e + p.1))
}

/// Globally adaptive Gauss–Kronrod (7/15) on `[a, b]`.
pub fn integrate_1d(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Estimate {
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(f, a, b);
    heap.push(Region { error: e, value: v, data: (a, b) });
    let mut evals = 15u64;
    let (mut run_v, mut run_e) = (v, e);
    loop {
        if run_e <= cfg.abs_tol.max(cfg.rel_tol * run_v.abs()) || evals >= cfg.max_evals {
            let (value, error) = totals(&heap);
            if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) || evals >= cfg.max_evals {
                return Estimate { value, error, evals };
            }
            (run_v, run_e) = (value, error);
        }
        let worst = heap.pop().unwrap();
        run_v -= worst.value;
        run_e -= worst.error;
        let (lo, hi) = worst.data;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Estimate { value, error, evals };
        }
        for (x, y) in [(lo, mid), (mid, hi)] {
            let (v, e) = gk15(f, x, y);
            run_v += v;
            run_e += e;
            heap.push(Region { error: e, value: v, data: (x, y) });
        }
        evals += 30;
    }
}

struct GenzMalik {
    n: usize,
    l2: f64,
    l4: f64,
    l5: f64,
    w7: [f64; 5],
    w5: [f64; 4],
}

impl GenzMalik {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        GenzMalik {
            n,
            l2: (9.0f64 / 70.0).sqrt(),
            l4: (9.0f64 / 10.0).sqrt(),
            l5: (9.0f64 / 19.0).sqrt(),
            w7: [
                (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0,
                980.0 / 6561.0,
                (1820.0 - 400.0 * nf) / 19683.0,
                200.0 / 19683.0,
                6859.0 / 19683.0 / 2f64.powi(n as i32),
            ],
            w5: [
                (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0,
                245.0 / 486.0,
                (265.0 - 100.0 * nf) / 1458.0,
                25.0 / 729.0,
            ],
        }
    }

    fn evals(&self) -> u64 {
        let n = self.n as u64;
        (1 << n) + 2 * n * n + 2 * n + 1
    }

    /// Returns (value, error, axis with the largest fourth difference).
    fn apply(&self, f: &mut dyn FnMut(&[f64]) -> f64, c: &[f64], h: &[f64]) -> (f64, f64, usize) {
        let n = self.n;
        let mut x = c.to_vec();
        let f1 = f(&x);
        let (mut f2, mut f3) = (0.0, 0.0);
        let mut best = (f64::NEG_INFINITY, 0usize);
        let ratio = (self.l2 / self.l4).powi(2);
        for i in 0..n {
            x[i] = c[i] - self.l2 * h[i];
            let a = f(&x);
            x[i] = c[i] + self.l2 * h[i];
            let b = f(&x);
            x[i] = c[i] - self.l4 * h[i];
            let a4 = f(&x);
            x[i] = c[i] + self.l4 * h[i];
            let b4 = f(&x);
            x[i] = c[i];
            f2 += a + b;
            f3 += a4 + b4;
            let diff = ((a + b - 2.0 * f1) - ratio * (a4 + b4 - 2.0 * f1)).abs();
            if diff > best.0 {
                best = (diff, i);
            }
        }
        let mut f4 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    x[i] = c[i] + si * self.l4 * h[i];
                    x[j] = c[j] + sj * self.l4 * h[j];
                    f4 += f(&x);
                }
                x[i] = c[i];
                x[j] = c[j];
            }
        }
        let mut f5 = 0.0;
        for mask in 0u32..(1 << n) {
            for i in 0..n {
                let s = if (mask >> i) & 1 == 1 { 1.0 } else { -1.0 };
                x[i] = c[i] + s * self.l5 * h[i];
            }
            f5 += f(&x);
        }
        let vol: f64 = h.iter().map(|hi| 2.0 * hi).product();
        let w = &self.w7;
        let i7 = vol * (w[0] * f1 + w[1] * f2 + w[2] * f3 + w[3] * f4 + w[4] * f5);
        let v = &self.w5;
        let i5 = vol * (v[0] * f1 + v[1] * f2 + v[2] * f3 + v[3] * f4);
        (i7, (i7 - i5).abs(), best.1)
    }
}

/// Adaptive Genz–Malik cubature on the box `[lo, hi]`, dimension >= 2.
pub fn integrate_genz_malik(
    f: &mut dyn FnMut(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    cfg: &QuadConfig,
) -> Estimate {
    let n = lo.len();
    let rule = GenzMalik::new(n);
    let mut heap = BinaryHeap::new();
    let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let (v, e, axis) = rule.apply(f, &c, &h);
    heap.push(Region { error: e, value: v, data: (c, h, axis) });
    let mut evals = rule.evals();
    let (mut run_v, mut run_e) = (v, e);
    loop {
        if run_e <= cfg.abs_tol.max(cfg.rel_tol * run_v.abs()) || evals >= cfg.max_evals {
            let (value, error) = totals(&heap);
            if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) || evals >= cfg.max_evals {
                return Estimate { value, error, evals };
            }
            (run_v, run_e) = (value, error);
        }
        let Region { value: pv, error: pe, data: (c, h, axis) } = heap.pop().unwrap();
        run_v -= pv;
        run_e -= pe;
        let mut h2 = h.clone();
        h2[axis] *= 0.5;
        for s in [-1.0, 1.0] {
            let mut c2 = c.clone();
            c2[axis] += s * h2[axis];
            let (v, e, ax) = rule.apply(f, &c2, &h2);
            run_v += v;
            run_e += e;
            heap.push(Region { error: e, value: v, data: (c2, h2.clone(), ax) });
        }
        evals += 2 * rule.evals();
    }
}

/// Owen-scrambled Sobol estimate with independent replicates for the error.
pub fn integrate_qmc(f: &mut dyn FnMut(&[f64]) -> f64, lo: &[f64], hi: &[f64], cfg: &QuadConfig) -> Estimate {
    const REPLICATES: u32 = 16;
    let n = lo.len();
    let per = (cfg.max_evals / REPLICATES as u64).clamp(1024, 1 << 20) as u32;
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut means = Vec::with_capacity(REPLICATES as usize);
    let mut x = vec![0.0; n];
    for r in 0..REPLICATES {
        let seed = cfg.seed.wrapping_mul(0x9E37_79B9).wrapping_add(r.wrapping_mul(0x85EB_CA6B));
        let mut acc = 0.0;
        for i in 0..per {
            for d in 0..n {
                let u = sobol_burley::sample(i, d as u32, seed) as f64;
                x[d] = lo[d] + u * (hi[d] - lo[d]);
            }
            acc += f(&x);
        }
        means.push(acc / per as f64 * vol);
    }
    let m = means.iter().sum::<f64>() / REPLICATES as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (REPLICATES - 1) as f64;
    Estimate { value: m, error: 3.0 * (var / REPLICATES as f64).sqrt(), evals: per as u64 * REPLICATES as u64 }
}

/// Dispatches on dimension.
pub fn integrate_box(f: &mut dyn FnMut(&[f64]) -> f64, lo: &[f64], hi: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    match lo.len() {
        0 => Ok(Estimate { value: f(&[]), error: 0.0, evals: 1 }),
        1 => {
            let mut g = |t: f64| f(&[t]);
            Ok(integrate_1d(&mut g, lo[0], hi[0], cfg))
        }
        d if d <= MAX_ADAPTIVE_DIM => Ok(integrate_genz_malik(f, lo, hi, cfg)),
        d if d <= MAX_QMC_DIM => Ok(integrate_qmc(f, lo, hi, cfg)),
        d => Err(Error::DimensionTooHigh { dim: d, limit: MAX_QMC_DIM }),
    }
}

/// How each coordinate of the unit cube is mapped to the integration domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisMap {
    /// `[0, ∞)` via `x = u / (1 - u)`.
    HalfLine,
    /// `[1, ∞)` via `y = 1 / (1 - u)`.
    FromOne,
}

impl AxisMap {
    fn map(self, u: f64) -> (f64, f64) {
        let w = 1.0 - u;
        match self {
            AxisMap::HalfLine => (u / w, 1.0 / (w * w)),
            AxisMap::FromOne => (1.0 / w, 1.0 / (w * w)),
        }
    }

    /// `u` at which the mapped coordinate equals `r`.
    fn cut(self, r: f64) -> f64 {
        match self {
            AxisMap::HalfLine => r / (1.0 + r),
            AxisMap::FromOne => 1.0 - 1.0 / r,
        }
    }
}

/// `∫ f` over a product of unbounded axes, after checking that the mass in
/// growing boxes `[.., R]` converges.
pub fn integrate_unbounded(
    f: &dyn Fn(&[f64]) -> f64,
    axes: &[AxisMap],
    cfg: &QuadConfig,
) -> Result<Estimate> {
    let k = axes.len();
    let mut x = vec![0.0; k];
    let mut g = |u: &[f64]| {
        let mut jac = 1.0;
        for i in 0..k {
            let (xi, ji) = axes[i].map(u[i]);
            x[i] = xi;
            jac *= ji;
        }
        let v = f(&x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    if k > 0 {
        let coarse = QuadConfig { abs_tol: cfg.abs_tol.max(1e-7), rel_tol: 1e-6, max_evals: 200_000, ..*cfg };
        let lo = vec![0.0; k];
        let mut partial = Vec::new();
        for r in [8.0, 16.0, 32.0, 64.0] {
            let hi: Vec<f64> = axes.iter().map(|a| a.cut(r)).collect();
            partial.push(integrate_box(&mut g, &lo, &hi, &coarse)?.value);
        }
        let d: Vec<f64> = partial.windows(2).map(|w| w[1] - w[0]).collect();
        let slack = 1e-6 * partial[3].abs() + coarse.abs_tol;
        if d[0] > slack && d[1] >= 0.999 * d[0] && d[2] >= 0.999 * d[1] {
            return Err(Error::DivergentIntegral);
        }
    }
    let lo = vec![0.0; k];
    let hi = vec![1.0; k];
    integrate_box(&mut g, &lo, &hi, cfg)
}
