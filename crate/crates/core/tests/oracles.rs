//! Library results against independent brute-force oracles, with the
//! oracle outputs frozen.

use manin_toric::counting::{count_points, zeta_partial, HeightMode};
use manin_toric::polynomial::GeneralizedPolynomial;
use manin_toric::problem::{ToricProblem, Variety};
use num_integer::Integer;

fn gcd_all(v: &[u64]) -> u64 {
    v.iter().fold(0, |g, &x| g.gcd(&x))
}

fn int_root(v: u64, q: u32) -> Option<u64> {
    (1..=v).take_while(|r| r.pow(q) <= v).find(|r| r.pow(q) == v)
}

/// Primitive positive points on `X^a = Y^{|a|}` in the box `[1, t]^n`
/// accepted by `keep`.
fn hyper_oracle(a: &[u32], t: u64, keep: &dyn Fn(&[u64]) -> bool) -> u64 {
    let q: u32 = a.iter().sum();
    let n = a.len();
    let mut m = vec![1u64; n];
    let mut count = 0;
    loop {
        let prod: u64 = m.iter().zip(a).map(|(&x, &e)| x.pow(e)).product();
        if let Some(r) = int_root(prod, q) {
            let mut full = m.clone();
            full.push(r);
            if gcd_all(&full) == 1 && keep(&full) {
                count += 1;
            }
        }
        let mut k = 0;
        while k < n {
            m[k] += 1;
            if m[k] <= t {
                break;
            }
            m[k] = 1;
            k += 1;
        }
        if k == n {
            return count;
        }
    }
}

#[test]
fn projective_line_sup_norm() {
    let oracle = 2 * (1..=5u64).flat_map(|a| (1..=5u64).map(move |b| (a, b))).filter(|&(a, b)| a.gcd(&b) == 1).count() as u64;
    assert_eq!(oracle, 38);
    let v = Variety::Toric(ToricProblem::projective_torus(1));
    assert_eq!(count_points(&v, None, 5.0, HeightMode::SupNorm, 1e9).unwrap().n, oracle);
}

#[test]
fn conic_counts() {
    let sup = 2 * hyper_oracle(&[1, 1], 10, &|m| m[2] <= 10);
    let poly = 2 * hyper_oracle(&[1, 1], 10, &|m| m.iter().map(|x| x * x).sum::<u64>() <= 100);
    assert_eq!((sup, poly), (14, 10));
    let p = GeneralizedPolynomial::parse("X1^2+X2^2+X3^2", None).unwrap();
    for v in [Variety::Hypersurface(vec![1, 1]), Variety::Toric(ToricProblem::hypersurface(&[1, 1]).unwrap())] {
        assert_eq!(count_points(&v, None, 10.0, HeightMode::SupNorm, 1e9).unwrap().n, sup);
        assert_eq!(count_points(&v, Some(&p), 10.0, HeightMode::Polynomial, 1e9).unwrap().n, poly);
    }
    let big = hyper_oracle(&[1, 1], 50, &|m| m[2] <= 50);
    assert_eq!(big, 35);
    let v = Variety::Hypersurface(vec![1, 1]);
    assert_eq!(count_points(&v, None, 50.0, HeightMode::SupNorm, 1e9).unwrap().primitive, big);
}

#[test]
fn cubic_cone_sup_norm() {
    let primitive = hyper_oracle(&[1, 1, 1], 50, &|m| m[3] <= 50);
    assert_eq!(primitive, 355);
    let v = Variety::Hypersurface(vec![1, 1, 1]);
    let r = count_points(&v, None, 50.0, HeightMode::SupNorm, 1e9).unwrap();
    assert_eq!(r.sign_count, 4);
    assert_eq!(r.n, 4 * primitive);
}

#[test]
fn squared_conic_polynomial_height() {
    let primitive = hyper_oracle(&[2, 2], 30, &|m| m.iter().map(|x| x * x).sum::<u64>() <= 900);
    assert_eq!(primitive, 15);
    let p = GeneralizedPolynomial::parse("X1^2+X2^2+X3^2", None).unwrap();
    let v = Variety::Hypersurface(vec![2, 2]);
    let r = count_points(&v, Some(&p), 30.0, HeightMode::Polynomial, 1e9).unwrap();
    assert_eq!(r.sign_count, 4);
    assert_eq!(r.n, 4 * primitive);
}

#[test]
fn projective_line_zeta_partial_sum() {
    let mut oracle = 0.0;
    for a in 1..=100u64 {
        for b in 1..=100u64 {
            let h = (a * a + b * b) as f64;
            if a.gcd(&b) == 1 && h <= 1e4 {
                oracle += h.powf(-1.5);
            }
        }
    }
    assert!((oracle - 0.8692325199125817).abs() < 1e-13);
    let p = GeneralizedPolynomial::parse("X1^2+X2^2", None).unwrap();
    let v = Variety::Toric(ToricProblem::projective_torus(1));
    let z = zeta_partial(&v, Some(&p), &[3.0], 100.0, HeightMode::Polynomial, 2.0, 1, 1e9).unwrap();
    assert!((z.probes[0].partial - 2.0 * oracle).abs() < 1e-12, "{}", z.probes[0].partial);
    assert!(zeta_partial(&v, Some(&p), &[2.0], 100.0, HeightMode::Polynomial, 2.0, 1, 1e9).is_err());
}
