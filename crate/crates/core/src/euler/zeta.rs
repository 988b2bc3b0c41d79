//! Riemann and prime zeta values on the real axis, in double precision.

use super::primes::mobius_up_to;

/// Bernoulli numbers `B_2, B_4, ..., B_24`.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// `ζ(s)` for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: usize = 20;
    let n = N as f64;
    let mut total: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    total += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Σ B_2j / (2j)! · s(s+1)...(s+2j-2) · N^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * power;
        total += term;
        if term.abs() < 1e-18 * total {
            break;
        }
        let k = 2 * (j + 1) as u32;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        fact *= ((k + 1) * (k + 2)) as f64;
        power /= n * n;
    }
    total
}

/// `P(s) = Σ_p p^{-s} = Σ_m μ(m)/m · log ζ(ms)` for `s > 1`.
pub fn prime_zeta(s: f64) -> f64 {
    let mmax = ((60.0 / s).ceil() as usize).max(2);
    let mu = mobius_up_to(mmax);
    let mut total = 0.0;
    for m in (1..=mmax).rev() {
        if mu[m] != 0 {
            total += mu[m] as f64 / m as f64 * zeta(m as f64 * s).ln();
        }
    }
    total
}
