//! Toric problems, sign counts and the multiplicative weights attached to them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::linalg::rank_i64;
use crate::polynomial::GeneralizedPolynomial;

/// Limit for routines that enumerate all sign vectors.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// The torus in P^n cut out by `Π x_j^{a_ij} = 1`. Rows of `matrix` sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricProblem {
    pub ncoords: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl ToricProblem {
    pub fn new(ncoords: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let p = ToricProblem { ncoords, matrix };
        p.validate()?;
        Ok(p)
    }

    /// The open torus of P^n.
    pub fn projective_torus(n: usize) -> Self {
        ToricProblem { ncoords: n + 1, matrix: Vec::new() }
    }

    /// The single relation `X^a = X_{n+1}^{|a|}`.
    pub fn hypersurface(a: &[u64]) -> Result<Self> {
        if a.len() < 2 || a.iter().any(|&x| x == 0) {
            return Err(Error::BadHypersurface);
        }
        let qa: i64 = a.iter().map(|&x| x as i64).sum();
        let mut row: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        row.push(-qa);
        Self::new(a.len() + 1, vec![row])
    }

    pub fn validate(&self) -> Result<()> {
        if self.ncoords < 2 {
            return Err(Error::TooFewCoordinates(self.ncoords));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.ncoords {
                return Err(Error::RaggedMatrix { row: i, got: row.len(), expected: self.ncoords });
            }
            let s: i64 = row.iter().sum();
            if s != 0 {
                return Err(Error::NonZeroRowSum { row: i, sum: s });
            }
        }
        let r = rank_i64(&self.matrix);
        if r < self.matrix.len() {
            return Err(Error::DependentRows { rank: r, rows: self.matrix.len() });
        }
        Ok(())
    }

    /// `n` in P^n.
    pub fn n(&self) -> usize {
        self.ncoords - 1
    }

    pub fn relations(&self) -> usize {
        self.matrix.len()
    }

    pub fn dimension(&self) -> usize {
        self.n() - self.relations()
    }

    /// `max |a_ij|`, at least 1.
    pub fn max_entry(&self) -> u64 {
        self.matrix.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(0).max(1)
    }

    /// `I*(A)`: the total absolute weight over all coordinates.
    pub fn total_weight(&self) -> u64 {
        self.matrix.iter().flatten().map(|x| x.unsigned_abs()).sum()
    }

    /// `c(A)`: half the number of sign vectors preserving every relation.
    pub fn sign_count(&self) -> Result<SignCount> {
        let m = self.ncoords;
        let odd: Vec<u64> = self
            .matrix
            .iter()
            .map(|row| {
                row.iter().enumerate().fold(0u64, |acc, (j, &a)| acc | (((a & 1) as u64) << j))
            })
            .collect();
        if m <= EXHAUSTIVE_LIMIT {
            // ε_j = -1 on the bits of `mask`; a relation holds iff the number
            // of odd exponents among flipped coordinates is even
            let total = (0u64..(1u64 << m))
                .filter(|mask| odd.iter().all(|r| (mask & r).count_ones() % 2 == 0))
                .count() as u64;
            return Ok(SignCount { value: total / 2, method: SignMethod::Exhaustive });
        }
        if m > 64 {
            return Err(Error::TooManyCoordinates { got: m, limit: 64 });
        }
        let r = gf2_rank(&odd);
        Ok(SignCount { value: 1u64 << (m - 1 - r), method: SignMethod::Gf2Rank })
    }
}

impl fmt::Display for ToricProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P^{} with {} relation(s)", self.n(), self.relations())
    }
}

pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut by_top = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut v = r;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if by_top[top] == 0 {
                by_top[top] = v;
                rank += 1;
                break;
            }
            v ^= by_top[top];
        }
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMethod {
    Exhaustive,
    Gf2Rank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCount {
    pub value: u64,
    pub method: SignMethod,
}

/// How the weight `g(ν)` of a uniformly multiplicative function is computed.
#[derive(Clone)]
pub enum WeightRule {
    /// `g ≡ 1`.
    Constant,
    /// `g(ν) = 1` iff `Aν = 0` and some `ν_i = 0`.
    Toric(ToricProblem),
    /// `g(ν) = 1` iff `|a|` divides `<a, ν>` and some `ν_i = 0`.
    Hypersurface(Vec<u64>),
    /// Any other rule with values bounded by the growth data of the spec.
    Custom(Arc<dyn Fn(&[u32]) -> u64 + Send + Sync>),
}

impl fmt::Debug for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Constant => f.write_str("Constant"),
            WeightRule::Toric(p) => write!(f, "Toric({:?})", p.matrix),
            WeightRule::Hypersurface(a) => write!(f, "Hypersurface({a:?})"),
            WeightRule::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A uniformly multiplicative function: `f(p^ν) = g(ν)` for every prime,
/// with `g(ν) <= growth_c (1 + |ν|)^growth_m`.
#[derive(Debug, Clone)]
pub struct UniformMultiplicativeSpec {
    pub arity: usize,
    pub rule: WeightRule,
    pub growth_c: f64,
    pub growth_m: u32,
}

impl UniformMultiplicativeSpec {
    pub fn constant(arity: usize) -> Self {
        UniformMultiplicativeSpec { arity, rule: WeightRule::Constant, growth_c: 1.0, growth_m: 0 }
    }

    pub fn weight(&self, nu: &[u32]) -> u64 {
        match &self.rule {
            WeightRule::Constant => 1,
            WeightRule::Toric(p) => toric_weight_raw(&p.matrix, nu),
            WeightRule::Hypersurface(a) => hypersurface_weight_raw(a, nu),
            WeightRule::Custom(f) => f(nu),
        }
    }

    /// Upper bound on `Σ_{|ν| = k} g(ν)` summed against `y^k`.
    pub fn growth_series_bound(&self, y: f64) -> f64 {
        growth_series_bound(self.growth_c, self.growth_m, self.arity, y)
    }
}

/// Bound for `Σ_k C (1+k)^M binom(k+n-1, n-1) y^k`.
pub fn growth_series_bound(c: f64, m: u32, n: usize, y: f64) -> f64 {
    assert!(y < 1.0);
    if m == 0 {
        return c * (1.0 - y).powi(-(n as i32));
    }
    let mut total = 0.0;
    let mut binom = 1.0;
    let mut k = 0usize;
    loop {
        let term = c * ((1 + k) as f64).powi(m as i32) * binom * y.powi(k as i32);
        total += term;
        // ratio of successive terms, decreasing in k
        let ratio = ((k + 2) as f64 / (k + 1) as f64).powi(m as i32) * (k + n) as f64
            / (k + 1) as f64
            * y;
        if ratio < 1.0 && term / (1.0 - ratio) < 1e-30 * total {
            return total + term * ratio / (1.0 - ratio);
        }
        binom *= (k + n) as f64 / (k + 1) as f64;
        k += 1;
        if k > 10_000_000 {
            return f64::INFINITY;
        }
    }
}

fn toric_weight_raw(matrix: &[Vec<i64>], nu: &[u32]) -> u64 {
    if !nu.contains(&0) {
        return 0;
    }
    let ok = matrix
        .iter()
        .all(|row| row.iter().zip(nu).map(|(&a, &v)| a as i128 * v as i128).sum::<i128>() == 0);
    ok as u64
}

fn hypersurface_weight_raw(a: &[u64], nu: &[u32]) -> u64 {
    if !nu.contains(&0) {
        return 0;
    }
    let qa: u128 = a.iter().map(|&x| x as u128).sum();
    let s: u128 = a.iter().zip(nu).map(|(&x, &v)| x as u128 * v as u128).sum();
    (s % qa == 0) as u64
}

pub fn toric_weight(problem: &ToricProblem) -> UniformMultiplicativeSpec {
    UniformMultiplicativeSpec {
        arity: problem.ncoords,
        rule: WeightRule::Toric(problem.clone()),
        growth_c: 1.0,
        growth_m: 0,
    }
}

pub fn hypersurface_weight(a: &[u64]) -> Result<UniformMultiplicativeSpec> {
    if a.len() < 2 || a.iter().any(|&x| x == 0) {
        return Err(Error::BadHypersurface);
    }
    Ok(UniformMultiplicativeSpec {
        arity: a.len(),
        rule: WeightRule::Hypersurface(a.to_vec()),
        growth_c: 1.0,
        growth_m: 0,
    })
}

/// The variety being studied: either a general torus or a hypersurface
/// `X^a = X_{n+1}^{|a|}`, which is counted through its first `n` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variety {
    Toric(ToricProblem),
    Hypersurface(Vec<u64>),
}

impl Variety {
    pub fn toric(&self) -> Result<ToricProblem> {
        match self {
            Variety::Toric(p) => Ok(p.clone()),
            Variety::Hypersurface(a) => ToricProblem::hypersurface(a),
        }
    }

    pub fn weight(&self) -> Result<UniformMultiplicativeSpec> {
        match self {
            Variety::Toric(p) => Ok(toric_weight(p)),
            Variety::Hypersurface(a) => hypersurface_weight(a),
        }
    }

    /// Number of projective coordinates.
    pub fn ncoords(&self) -> usize {
        match self {
            Variety::Toric(p) => p.ncoords,
            Variety::Hypersurface(a) => a.len() + 1,
        }
    }

    /// Dimension of the variety.
    pub fn dimension(&self) -> usize {
        self.ncoords() - 1 - self.toric().map(|p| p.relations()).unwrap_or(1)
    }
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypersurface: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolynomialFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFile {
    pub monomials: Vec<crate::polynomial::Monomial>,
}

impl ProblemFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn variety(&self) -> Result<Variety> {
        match (&self.matrix, &self.hypersurface) {
            (Some(_), Some(_)) => {
                Err(Error::Invalid("give either \"matrix\" or \"hypersurface\", not both".into()))
            }
            (None, Some(a)) => {
                ToricProblem::hypersurface(a)?;
                Ok(Variety::Hypersurface(a.clone()))
            }
            (Some(m), None) if !m.is_empty() => {
                let n = m[0].len();
                if let Some(d) = self.ambient_dimension {
                    if d + 1 != n {
                        return Err(Error::ArityMismatch { expected: d + 1, got: n });
                    }
                }
                Ok(Variety::Toric(ToricProblem::new(n, m.clone())?))
            }
            _ => {
                let d = self.ambient_dimension.ok_or_else(|| {
                    Error::Invalid("an empty relation matrix needs \"ambient_dimension\"".into())
                })?;
                Ok(Variety::Toric(ToricProblem::new(d + 1, Vec::new())?))
            }
        }
    }

    pub fn polynomial(&self) -> Result<Option<GeneralizedPolynomial>> {
        let Some(pf) = &self.polynomial else { return Ok(None) };
        let n = pf.monomials.first().map(|m| m.exponents.len()).unwrap_or(0);
        let terms = pf.monomials.iter().map(|m| (m.exponents.clone(), m.coefficient.clone())).collect();
        let p = GeneralizedPolynomial::new(n, terms)?;
        if p.monomials.len() != pf.monomials.len() {
            return Err(Error::InvalidPolynomial("repeated monomial".into()));
        }
        Ok(Some(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(
            ToricProblem::new(3, vec![vec![1, 1, -1]]),
            Err(Error::NonZeroRowSum { row: 0, sum: 1 })
        ));
        assert!(matches!(
            ToricProblem::new(3, vec![vec![1, 1, -2], vec![2, 2, -4]]),
            Err(Error::DependentRows { .. })
        ));
        assert!(matches!(
            ToricProblem::new(3, vec![vec![1, -1]]),
            Err(Error::RaggedMatrix { .. })
        ));
    }

    #[test]
    fn sign_counts() {
        assert_eq!(ToricProblem::hypersurface(&[1, 1]).unwrap().sign_count().unwrap().value, 2);
        assert_eq!(ToricProblem::hypersurface(&[1, 1, 1]).unwrap().sign_count().unwrap().value, 4);
        assert_eq!(ToricProblem::projective_torus(1).sign_count().unwrap().value, 2);
        assert_eq!(ToricProblem::projective_torus(3).sign_count().unwrap().value, 8);
        // all exponents even: no constraint on signs
        assert_eq!(ToricProblem::hypersurface(&[2, 2]).unwrap().sign_count().unwrap().value, 4);
    }

    #[test]
    fn gf2_matches_exhaustive_for_big_inputs() {
        let row: Vec<i64> = (0..30).map(|j| if j == 29 { -29 } else { 1 }).collect();
        let p = ToricProblem::new(30, vec![row]).unwrap();
        let s = p.sign_count().unwrap();
        assert_eq!(s.method, SignMethod::Gf2Rank);
        assert_eq!(s.value, 1 << 28);
    }

    #[test]
    fn weights() {
        let w = hypersurface_weight(&[1, 1]).unwrap();
        assert_eq!(w.weight(&[0, 0]), 1);
        assert_eq!(w.weight(&[2, 0]), 1);
        assert_eq!(w.weight(&[1, 0]), 0);
        assert_eq!(w.weight(&[1, 1]), 0);
        let t = toric_weight(&ToricProblem::hypersurface(&[1, 1]).unwrap());
        assert_eq!(t.weight(&[2, 0, 1]), 1);
        assert_eq!(t.weight(&[1, 1, 1]), 0);
    }

    #[test]
    fn problem_file_roundtrip() {
        let text = r#"{"matrix":[[1,1,-2]],"polynomial":{"monomials":[
            {"exponents":["2","0","0"],"coefficient":"1"},
            {"exponents":["0","1/2","3/2"],"coefficient":"3/2"}]}}"#;
        let pf = ProblemFile::from_json(text).unwrap();
        let again = ProblemFile::from_json(&pf.to_json()).unwrap();
        assert_eq!(pf, again);
        assert_eq!(pf.to_json(), again.to_json());
        assert!(matches!(pf.variety().unwrap(), Variety::Toric(_)));
    }
}
