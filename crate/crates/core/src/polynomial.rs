//! Generalized polynomials: finite sums of positive multiples of `X^γ` with
//! nonnegative rational exponents.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, q, sum, to_f64, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(with = "crate::rational::serde_qvec")]
    pub exponents: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub coefficient: Q,
}

impl Monomial {
    pub fn degree(&self) -> Q {
        sum(&self.exponents)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = to_f64(&self.coefficient);
        for (e, &xi) in self.exponents.iter().zip(x) {
            if !e.is_zero() {
                v *= xi.powf(to_f64(e));
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedPolynomial {
    pub nvars: usize,
    pub monomials: Vec<Monomial>,
}

impl GeneralizedPolynomial {
    /// Builds a polynomial, merging repeated exponent vectors.
    pub fn new(nvars: usize, terms: Vec<(Vec<Q>, Q)>) -> Result<Self> {
        let mut monomials: Vec<Monomial> = Vec::new();
        for (exponents, coefficient) in terms {
            if exponents.len() != nvars {
                return Err(Error::ArityMismatch { expected: nvars, got: exponents.len() });
            }
            if exponents.iter().any(|e| e.is_negative()) {
                return Err(Error::InvalidPolynomial("negative exponent".into()));
            }
            if !coefficient.is_positive() {
                return Err(Error::InvalidPolynomial("coefficients must be positive".into()));
            }
            match monomials.iter_mut().find(|m| m.exponents == exponents) {
                Some(m) => m.coefficient += coefficient,
                None => monomials.push(Monomial { exponents, coefficient }),
            }
        }
        if monomials.is_empty() {
            return Err(Error::InvalidPolynomial("no monomials".into()));
        }
        Ok(GeneralizedPolynomial { nvars, monomials })
    }

    /// `Σ X_i^d` in `nvars` variables.
    pub fn diagonal(nvars: usize, d: i64) -> Self {
        let terms = (0..nvars)
            .map(|i| {
                let mut e = vec![Q::zero(); nvars];
                e[i] = q(d);
                (e, Q::one())
            })
            .collect();
        Self::new(nvars, terms).expect("diagonal polynomial is valid")
    }

    pub fn parse(s: &str, nvars: Option<usize>) -> Result<Self> {
        Parser { s: s.as_bytes(), pos: 0 }.polynomial(nvars)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(
            self.nvars,
            self.monomials.iter().map(|m| (m.exponents.clone(), m.coefficient.clone())).collect(),
        )
        .map(|_| ())
    }

    pub fn top_degree(&self) -> Q {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or_else(Q::zero)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.top_degree();
        self.monomials.iter().all(|m| m.degree() == d)
    }

    /// The degree-`d` homogeneous part for the top degree `d`.
    pub fn top_part(&self) -> Self {
        let d = self.top_degree();
        GeneralizedPolynomial {
            nvars: self.nvars,
            monomials: self.monomials.iter().filter(|m| m.degree() == d).cloned().collect(),
        }
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.monomials.iter().all(|m| m.exponents.iter().all(|e| e.is_integer()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.monomials.iter().map(|m| m.eval(x)).sum()
    }

    pub fn check_all_variables(&self) -> Result<()> {
        for i in 0..self.nvars {
            if self.monomials.iter().all(|m| m.exponents[i].is_zero()) {
                return Err(Error::MissingVariable { variable: i + 1 });
            }
        }
        Ok(())
    }

    /// Checks that each variable has a pure power in the top-degree part.
    pub fn check_elliptic(&self) -> Result<()> {
        self.check_all_variables()?;
        let top = self.top_part();
        for i in 0..self.nvars {
            let pure = top.monomials.iter().any(|m| {
                m.exponents.iter().enumerate().all(|(j, e)| (j == i) != e.is_zero())
            });
            if !pure {
                return Err(Error::NotElliptic { variable: i + 1 });
            }
        }
        Ok(())
    }

    /// A certified lower bound for `min P_d` on the standard simplex.
    pub fn ellipticity_witness(&self) -> Result<f64> {
        self.check_elliptic()?;
        let top = self.top_part();
        Ok(simplex_lower_bound(&top))
    }

    /// Substitutes `X_{n+1} = (X^a)^{1/|a|}` in a polynomial of arity `n+1`.
    pub fn restrict_to_hypersurface(&self, a: &[u64]) -> Result<Self> {
        let n = a.len();
        if n < 2 || a.iter().any(|&x| x == 0) {
            return Err(Error::BadHypersurface);
        }
        if self.nvars != n + 1 {
            return Err(Error::ArityMismatch { expected: n + 1, got: self.nvars });
        }
        let qa: u64 = a.iter().sum();
        let terms = self
            .monomials
            .iter()
            .map(|m| {
                let last = &m.exponents[n];
                let e = (0..n)
                    .map(|j| &m.exponents[j] + last * Q::new(a[j].into(), qa.into()))
                    .collect();
                (e, m.coefficient.clone())
            })
            .collect();
        Self::new(n, terms)
    }
}

impl fmt::Display for GeneralizedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, m) in self.monomials.iter().enumerate() {
            if k > 0 {
                f.write_str("+")?;
            }
            let mut parts = Vec::new();
            if !m.coefficient.is_one() {
                parts.push(format_q(&m.coefficient));
            }
            for (i, e) in m.exponents.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if e.is_one() {
                    parts.push(format!("X{}", i + 1));
                } else {
                    parts.push(format!("X{}^{}", i + 1, format_q(e)));
                }
            }
            if parts.is_empty() {
                parts.push("1".into());
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Lower bound for a homogeneous positive-coefficient polynomial on the
/// simplex. Monotonicity gives `P(x) >= P(h k)` on each grid cell.
fn simplex_lower_bound(p: &GeneralizedPolynomial) -> f64 {
    let n = p.nvars;
    if n == 1 {
        return p.eval(&[1.0]);
    }
    // keep the number of cells around a few million
    let mut k = 64usize;
    while k > 4 && cells_estimate(n, k) > 3.0e6 {
        k /= 2;
    }
    let h = 1.0 / k as f64;
    let mut bounds: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut idx = vec![0usize; n];
    collect_cells(p, h, k, n, 0, 0, &mut idx, &mut bounds);
    bounds.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let refine = bounds.len().min(64);
    let mut best = bounds.get(refine).map(|b| b.0).unwrap_or(f64::INFINITY);
    let k2 = 2 * k;
    let h2 = h / 2.0;
    for (_, cell) in &bounds[..refine] {
        for mask in 0u32..(1 << n) {
            let child: Vec<usize> =
                cell.iter().enumerate().map(|(i, &c)| 2 * c + ((mask >> i) & 1) as usize).collect();
            let s: usize = child.iter().sum();
            if s + n < k2 || s > k2 {
                continue;
            }
            let x: Vec<f64> = child.iter().map(|&c| c as f64 * h2).collect();
            best = best.min(p.eval(&x));
        }
    }
    best * (1.0 - 1e-12)
}

fn cells_estimate(n: usize, k: usize) -> f64 {
    // number of lattice points with |k| in [K-n, K]
    let mut total = 0.0;
    for s in k.saturating_sub(n)..=k {
        total += binom_f(s + n - 1, n - 1);
    }
    total
}

fn binom_f(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[allow(clippy::too_many_arguments)]
fn collect_cells(
    p: &GeneralizedPolynomial,
    h: f64,
    k: usize,
    n: usize,
    depth: usize,
    used: usize,
    idx: &mut Vec<usize>,
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    if depth == n {
        if used + n >= k {
            let x: Vec<f64> = idx.iter().map(|&c| c as f64 * h).collect();
            out.push((p.eval(&x), idx.clone()));
        }
        return;
    }
    for c in 0..=(k - used) {
        idx[depth] = c;
        collect_cells(p, h, k, n, depth + 1, used + c, idx, out);
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn rational(&mut self) -> Result<Q> {
        let paren = self.eat(b'(');
        let n = self.uint()?;
        let d = if self.eat(b'/') {
            let at = self.pos;
            let d = self.uint()?;
            if d == 0 {
                self.pos = at;
                return self.err("zero denominator");
            }
            d
        } else {
            1
        };
        if paren && !self.eat(b')') {
            return self.err("expected ')'");
        }
        Ok(Q::new(n.into(), d.into()))
    }

    fn polynomial(mut self, nvars: Option<usize>) -> Result<GeneralizedPolynomial> {
        let mut terms: Vec<(Vec<(usize, Q)>, Q)> = Vec::new();
        loop {
            terms.push(self.term()?);
            if self.peek().is_none() {
                break;
            }
            if !self.eat(b'+') {
                return self.err("expected '+' or end of input");
            }
        }
        let maxvar = terms.iter().flat_map(|t| t.0.iter().map(|f| f.0)).max().unwrap_or(0);
        let n = match nvars {
            Some(n) if maxvar > n => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("variable X{maxvar} exceeds arity {n}"),
                })
            }
            Some(n) => n,
            None => maxvar,
        };
        if n == 0 {
            return Err(Error::Parse { pos: 0, msg: "no variables".into() });
        }
        let terms = terms
            .into_iter()
            .map(|(factors, c)| {
                let mut e = vec![Q::zero(); n];
                for (i, p) in factors {
                    e[i - 1] += p;
                }
                (e, c)
            })
            .collect();
        GeneralizedPolynomial::new(n, terms)
    }

    fn term(&mut self) -> Result<(Vec<(usize, Q)>, Q)> {
        let mut coef = Q::one();
        let mut factors = Vec::new();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'(' => {
                let at = self.pos;
                coef = self.rational()?;
                if coef.is_zero() {
                    self.pos = at;
                    return self.err("zero coefficient");
                }
                if !self.eat(b'*') {
                    return Ok((factors, coef));
                }
                factors.push(self.factor()?);
            }
            Some(b'X') | Some(b'x') => factors.push(self.factor()?),
            _ => return self.err("expected a coefficient or a variable"),
        }
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        Ok((factors, coef))
    }

    fn factor(&mut self) -> Result<(usize, Q)> {
        match self.peek() {
            Some(b'X') | Some(b'x') => self.pos += 1,
            _ => return self.err("expected a variable Xk"),
        }
        let at = self.pos;
        let i = self.uint()? as usize;
        if i == 0 {
            self.pos = at;
            return self.err("variables are numbered from 1");
        }
        let p = if self.eat(b'^') { self.rational()? } else { Q::one() };
        Ok((i, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn parse_roundtrip() {
        let p = GeneralizedPolynomial::parse("X1^2 + 3/2*X2^1/2*X3 + X3^2", None).unwrap();
        assert_eq!(p.nvars, 3);
        assert_eq!(p.monomials[1].exponents, vec![q(0), qr(1, 2), q(1)]);
        assert_eq!(p.monomials[1].coefficient, qr(3, 2));
        let again = GeneralizedPolynomial::parse(&p.to_string(), Some(3)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn parse_errors_carry_position() {
        match GeneralizedPolynomial::parse("X1^2 + + X2", None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        assert!(GeneralizedPolynomial::parse("X0", None).is_err());
        assert!(GeneralizedPolynomial::parse("X1X2", None).is_err());
        assert!(GeneralizedPolynomial::parse("X3", Some(2)).is_err());
    }

    #[test]
    fn merges_repeated_monomials() {
        let p = GeneralizedPolynomial::parse("X1^2+X1^2+X2^2", None).unwrap();
        assert_eq!(p.monomials.len(), 2);
        assert_eq!(p.monomials[0].coefficient, q(2));
    }

    #[test]
    fn witness_for_sum_of_squares() {
        let p = GeneralizedPolynomial::parse("X1^2+X2^2", None).unwrap();
        let k = p.ellipticity_witness().unwrap();
        assert!(k > 0.48 && k <= 0.5, "{k}");
    }

    #[test]
    fn product_is_not_elliptic() {
        let p = GeneralizedPolynomial::parse("X1*X2", None).unwrap();
        assert!(matches!(p.ellipticity_witness(), Err(Error::NotElliptic { .. })));
        let p = GeneralizedPolynomial::parse("X1^2", Some(2)).unwrap();
        assert!(matches!(p.ellipticity_witness(), Err(Error::MissingVariable { variable: 2 })));
    }

    #[test]
    fn restriction_to_conic() {
        let p = GeneralizedPolynomial::parse("X1^2+X2^2+X3^2", None).unwrap();
        let r = p.restrict_to_hypersurface(&[1, 1]).unwrap();
        let expect = GeneralizedPolynomial::parse("X1^2+X2^2+X1*X2", None).unwrap();
        assert_eq!(r, expect);
    }
}
