//! Archimedean constants: the Newton integral constant `A0(P)` of a
//! generalized polynomial, its mixed-volume variants, and the spherical
//! (Mahler-type) volume used as an independent cross-check.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::linalg::rank;
use crate::geometry::newton::{NewtonPolyhedron, Orientation};
use crate::geometry::polytope::polytope_volume;
use crate::polynomial::GeneralizedPolynomial;
use crate::quadrature::{integrate_box, integrate_unbounded, AxisMap, QuadConfig};
use crate::rational::{dot, format_q, to_f64, Q};

/// Data read off the polyhedron `conv(supp P) - R_+^n` at the point where
/// the diagonal leaves it.
#[derive(Debug, Clone)]
pub struct SargosData {
    /// `σ0`: the diagonal leaves at `σ0^{-1} · 1`.
    pub sigma0: Q,
    /// Codimension of the face `G0`.
    pub rho0: usize,
    /// Number of non-recession coordinates.
    pub m: usize,
    /// New position -> original variable.
    pub permutation: Vec<usize>,
    /// Monomials of `P` lying on `G0`.
    pub face_monomials: Vec<usize>,
    /// Normalized active normals, in permuted coordinates.
    pub lambdas: Vec<Vec<Q>>,
    pub recession: Vec<usize>,
    pub lambda_volume: Q,
}

pub fn newton_at_infinity(p: &GeneralizedPolynomial) -> Result<SargosData> {
    p.check_all_variables()?;
    let n = p.nvars;
    let pts: Vec<Vec<Q>> = p.monomials.iter().map(|m| m.exponents.clone()).collect();
    let e = NewtonPolyhedron::new(&pts, Orientation::Down)?;
    let ratio = |k: usize| &e.facets[k].offset / e.facets[k].normal_sum();
    let candidates: Vec<usize> = (0..e.facets.len()).filter(|&k| !e.facets[k].normal_sum().is_zero()).collect();
    let t_star = candidates.iter().map(|&k| ratio(k)).min().ok_or_else(|| {
        Error::InvalidPolynomial("support has no bounded direction".into())
    })?;
    let active: Vec<usize> = candidates.into_iter().filter(|&k| ratio(k) == t_star).collect();
    let normals: Vec<Vec<Q>> = active.iter().map(|&k| e.facets[k].normal_q()).collect();
    let rho0 = rank(&normals);
    let recession: Vec<usize> = (0..n).filter(|&i| normals.iter().all(|w| w[i].is_zero())).collect();
    let face_monomials: Vec<usize> = (0..p.monomials.len())
        .filter(|&j| active.iter().all(|&k| dot(&e.facets[k].normal_q(), &pts[j]) == e.facets[k].offset))
        .collect();

    // first block: coordinates whose unit vectors complement the face directions
    let mut first: Vec<usize> = Vec::new();
    for i in (0..n).filter(|i| !recession.contains(i)) {
        if first.len() == rho0 {
            break;
        }
        let mut trial = first.clone();
        trial.push(i);
        let cols: Vec<Vec<Q>> = normals.iter().map(|w| trial.iter().map(|&j| w[j].clone()).collect()).collect();
        if rank(&cols) == trial.len() {
            first = trial;
        }
    }
    let mut permutation = first.clone();
    permutation.extend((0..n).filter(|i| !recession.contains(i) && !first.contains(i)));
    permutation.extend(recession.iter().copied());

    let lambdas: Vec<Vec<Q>> = active
        .iter()
        .map(|&k| {
            let f = &e.facets[k];
            let w = f.normal_q();
            permutation.iter().map(|&i| &w[i] / &f.offset).collect()
        })
        .collect();
    let mut verts: Vec<Vec<Q>> = vec![vec![Q::zero(); n]];
    verts.extend(lambdas.iter().cloned());
    for k in rho0..n {
        let mut v = vec![Q::zero(); n];
        v[k] = Q::one();
        verts.push(v);
    }
    let lambda_volume = polytope_volume(&verts)?;
    Ok(SargosData {
        sigma0: t_star.recip(),
        rho0,
        m: n - recession.len(),
        permutation,
        face_monomials,
        lambdas,
        recession,
        lambda_volume,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantValue {
    pub value: f64,
    pub error: f64,
    pub method: &'static str,
    pub sigma0: String,
    pub rho0: usize,
    pub lambda_volume: String,
    pub integral: f64,
    pub integral_dim: usize,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

struct FastPoly {
    terms: Vec<(f64, Vec<(usize, f64)>)>,
}

impl FastPoly {
    fn new(p: &GeneralizedPolynomial, which: &[usize]) -> Self {
        let terms = which
            .iter()
            .map(|&j| {
                let m = &p.monomials[j];
                let e = m.exponents.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, e)| (i, to_f64(e))).collect();
                (to_f64(&m.coefficient), e)
            })
            .collect();
        FastPoly { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().fold(*c, |acc, &(i, p)| acc * x[i].powf(p)))
            .sum()
    }
}

/// `A0(P) = n! Vol(Λ) ∫ P_{G0}^{-σ0}(1, x, y) dx dy`.
pub fn sargos_constant(p: &GeneralizedPolynomial, cfg: &QuadConfig) -> Result<ConstantValue> {
    let data = newton_at_infinity(p)?;
    let n = p.nvars;
    let k = n - data.rho0;
    let fast = FastPoly::new(p, &data.face_monomials);
    let sigma = to_f64(&data.sigma0);
    let perm = data.permutation.clone();
    let rho0 = data.rho0;
    let f = |x: &[f64]| {
        let mut orig = vec![1.0; n];
        for (pos, &xi) in x.iter().enumerate() {
            orig[perm[rho0 + pos]] = xi;
        }
        fast.eval(&orig).powf(-sigma)
    };
    let mut axes = vec![AxisMap::HalfLine; data.m - rho0];
    axes.extend(vec![AxisMap::FromOne; n - data.m]);
    let est = integrate_unbounded(&f, &axes, cfg)?;
    let scale = to_f64(&(Q::from_integer(factorial(n)) * &data.lambda_volume));
    Ok(ConstantValue {
        value: scale * est.value,
        error: scale * est.error,
        method: "newton_integral",
        sigma0: format_q(&data.sigma0),
        rho0,
        lambda_volume: format_q(&data.lambda_volume),
        integral: est.value,
        integral_dim: k,
    })
}

/// `P_(I; u; b)`: the point `α ∈ I` is repeated `u(α)` times as a variable
/// column; monomial `k` is `b_k Π_i X_i^{α^i_k}`.
pub fn volume_polynomial(points: &[Vec<Q>], mult: &[u32], b: &[Q]) -> Result<GeneralizedPolynomial> {
    if points.len() != mult.len() {
        return Err(Error::ArityMismatch { expected: points.len(), got: mult.len() });
    }
    let r = b.len();
    let mut alphas: Vec<&Vec<Q>> = Vec::new();
    for (a, &u) in points.iter().zip(mult) {
        if a.len() != r {
            return Err(Error::ArityMismatch { expected: r, got: a.len() });
        }
        if a.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("points must be nonzero".into()));
        }
        if u == 0 {
            return Err(Error::Invalid("multiplicities must be positive".into()));
        }
        for _ in 0..u {
            alphas.push(a);
        }
    }
    let q = alphas.len();
    let terms = (0..r).map(|k| (alphas.iter().map(|a| a[k].clone()).collect(), b[k].clone())).collect();
    GeneralizedPolynomial::new(q, terms)
}

pub fn volume_constant(points: &[Vec<Q>], mult: &[u32], b: &[Q], cfg: &QuadConfig) -> Result<ConstantValue> {
    let p = volume_polynomial(points, mult, b)?;
    sargos_constant(&p, cfg)
}

/// `I_{T,P} = {μ(β)}` with `μ(β)_j = <β, γ^j>`, multiplicities summed on
/// collisions.
pub fn mixed_volume_data(t: &[Vec<Q>], u: &[u32], p: &GeneralizedPolynomial) -> Result<(Vec<Vec<Q>>, Vec<u32>, Vec<Q>)> {
    if t.len() != u.len() {
        return Err(Error::ArityMismatch { expected: t.len(), got: u.len() });
    }
    let mut pts: Vec<Vec<Q>> = Vec::new();
    let mut mult: Vec<u32> = Vec::new();
    for (beta, &m) in t.iter().zip(u) {
        if beta.len() != p.nvars {
            return Err(Error::ArityMismatch { expected: p.nvars, got: beta.len() });
        }
        let mu: Vec<Q> = p.monomials.iter().map(|mono| dot(beta, &mono.exponents)).collect();
        match pts.iter().position(|x| *x == mu) {
            Some(i) => mult[i] += m,
            None => {
                pts.push(mu);
                mult.push(m);
            }
        }
    }
    let b = p.monomials.iter().map(|m| m.coefficient.clone()).collect();
    Ok((pts, mult, b))
}

pub fn mixed_volume_constant(t: &[Vec<Q>], u: &[u32], p: &GeneralizedPolynomial, cfg: &QuadConfig) -> Result<ConstantValue> {
    let (pts, mult, b) = mixed_volume_data(t, u, p)?;
    volume_constant(&pts, &mult, &b, cfg)
}

/// Largest number of variables accepted by [`mahler_constant`].
pub const MAHLER_MAX_VARS: usize = 6;

/// `C(P) = (1/N) ∫_{S^{N-1} ∩ R_+^N} P^{-N/d} dσ` for homogeneous `P` in `N`
/// variables, integrated in hyperspherical angles.
pub fn mahler_constant(p: &GeneralizedPolynomial, cfg: &QuadConfig) -> Result<ConstantValue> {
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    p.check_all_variables()?;
    let n = p.nvars;
    if n > MAHLER_MAX_VARS {
        return Err(Error::DimensionTooHigh { dim: n - 1, limit: MAHLER_MAX_VARS - 1 });
    }
    let d = to_f64(&p.top_degree());
    let all: Vec<usize> = (0..p.monomials.len()).collect();
    let fast = FastPoly::new(p, &all);
    let expo = n as f64 / d;
    let mut v = vec![0.0; n];
    let mut f = |th: &[f64]| {
        let mut s = 1.0;
        let mut jac = 1.0;
        for (k, &t) in th.iter().enumerate() {
            v[k] = s * t.cos();
            jac *= t.sin().powi((n - 2 - k) as i32);
            s *= t.sin();
        }
        v[n - 1] = s;
        jac * fast.eval(&v).powf(-expo)
    };
    let lo = vec![0.0; n - 1];
    let hi = vec![std::f64::consts::FRAC_PI_2; n - 1];
    let est = integrate_box(&mut f, &lo, &hi, cfg)?;
    Ok(ConstantValue {
        value: est.value / n as f64,
        error: est.error / n as f64,
        method: "spherical",
        sigma0: format_q(&(Q::from_integer(BigInt::from(n as i64)) / p.top_degree())),
        rho0: 1,
        lambda_volume: "n/a".into(),
        integral: est.value,
        integral_dim: n - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};
    use std::f64::consts::PI;

    fn poly(s: &str) -> GeneralizedPolynomial {
        GeneralizedPolynomial::parse(s, None).unwrap()
    }

    #[test]
    fn closed_forms() {
        let cfg = QuadConfig::default();
        let c = sargos_constant(&poly("X1^2+X2^2"), &cfg).unwrap();
        assert_eq!(c.sigma0, "1");
        assert_eq!(c.lambda_volume, "1/4");
        assert!((c.value - PI / 4.0).abs() < 1e-9, "{c:?}");
        let c = sargos_constant(&poly("X1+X2"), &cfg).unwrap();
        assert!((c.value - 1.0).abs() < 1e-9);
        let c = sargos_constant(&poly("X1^2+X2^2+X3^2"), &cfg).unwrap();
        assert_eq!(c.sigma0, "3/2");
        assert_eq!(c.lambda_volume, "1/12");
        assert!((c.value - PI / 4.0).abs() < 1e-7, "{c:?}");
    }

    #[test]
    fn conic_volume_polynomial() {
        // T = {(1,0),(0,1),(1,1)} applied to X1^2 + X2^2 + X1 X2
        let p = poly("X1^2+X2^2+X1*X2");
        let t = vec![vec![q(2), q(0)], vec![q(0), q(2)], vec![q(1), q(1)]];
        let (pts, mult, _) = mixed_volume_data(&t, &[1, 1, 1], &p).unwrap();
        assert_eq!(mult, vec![1, 1, 1]);
        assert_eq!(pts[2], vec![q(2), q(2), q(2)]);
        let s = newton_at_infinity(&poly("X1^4+X2^4+X1^2*X2^2")).unwrap();
        assert_eq!(s.sigma0, qr(1, 2));
        assert_eq!(s.lambda_volume, qr(1, 8));
    }

    #[test]
    fn recession_block() {
        let p = poly("X1+X1*X2^1/2");
        let s = newton_at_infinity(&p).unwrap();
        assert_eq!(s.recession, vec![0]);
        assert_eq!(s.permutation, vec![1, 0]);
        let c = sargos_constant(&p, &QuadConfig::default()).unwrap();
        assert_eq!(c.integral_dim, 1);
        assert!((c.integral - 1.0).abs() < 1e-8, "{c:?}");
    }

    #[test]
    fn mahler_matches_newton_for_diagonal_forms() {
        let cfg = QuadConfig::default();
        for s in ["X1^2+X2^2", "X1^4+X2^4+X3^4+X1^2*X2^2", "X1^3+X2^3+X1*X2^2"] {
            let p = poly(s);
            let n = p.nvars as f64;
            let d = to_f64(&p.top_degree());
            let a0 = sargos_constant(&p, &cfg).unwrap().value;
            let m = mahler_constant(&p, &cfg).unwrap().value;
            assert!((a0 - n / d * m).abs() < 1e-6, "{s}: {a0} vs {}", n / d * m);
        }
    }
}
