//! Assembly of the predicted leading constant `C(A; H)` and the pole
//! residue `C0`, plus the comparison table against brute-force counts.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::counting::{asymptotic_report, AsymptoticReport, CountResult, HeightMode};
use crate::error::{Error, Result};
use crate::euler::{euler_constant, EulerConfig, EulerReport};
use crate::generators::{generators_for, LatticePointSet, DEFAULT_ENUMERATION_BUDGET};
use crate::geometry::linalg::det;
use crate::geometry::newton::{DiagonalFace, NewtonPolyhedron};
use crate::polynomial::GeneralizedPolynomial;
use crate::problem::Variety;
use crate::quadrature::QuadConfig;
use crate::rational::{format_q, format_vec, to_f64, Q};
use crate::volume::{mixed_volume_constant, ConstantValue};

#[derive(Debug, Clone)]
pub struct ManinConfig {
    pub cap: Option<u32>,
    pub budget: u64,
    pub quad: QuadConfig,
    pub euler: EulerConfig,
}

impl Default for ManinConfig {
    fn default() -> Self {
        ManinConfig { cap: None, budget: DEFAULT_ENUMERATION_BUDGET, quad: QuadConfig::default(), euler: EulerConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManinFlags {
    pub compact: bool,
    /// `dim F0` equals the dimension of the variety.
    pub dimension_hypothesis: bool,
    pub stabilized: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManinReport {
    pub mode: HeightMode,
    pub iota: String,
    pub rho: i64,
    pub c: Vec<String>,
    pub sign_count: u64,
    pub dimension: usize,
    pub degree: String,
    /// `I*(A)`, the sum of all coordinate weights.
    pub total_weight: u64,
    pub generators_on_face: Vec<Vec<u32>>,
    pub a0: Option<ConstantValue>,
    pub euler: EulerReport,
    pub constant: f64,
    pub constant_error: f64,
    pub c0: f64,
    pub c0_error: f64,
    /// `C0 / C = ι (ρ-1)!`, exact.
    pub c0_over_c: String,
    pub flags: ManinFlags,
    /// `"exact"`, or `"upper-bound order only"` when the dimension
    /// hypothesis fails.
    pub order: &'static str,
}

impl ManinReport {
    pub fn iota_f64(&self) -> f64 {
        self.iota.parse::<f64>().unwrap_or_else(|_| {
            let (n, d) = self.iota.split_once('/').expect("rational");
            n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
        })
    }

    /// `N(t) / (C t^ι (log t)^{ρ-1})` along the given counts.
    pub fn asymptotics(&self, counts: &[CountResult]) -> Result<AsymptoticReport> {
        asymptotic_report(counts, self.constant, self.iota_f64(), self.rho.max(1) as u32)
    }
}

/// The geometric part of the pipeline: generators, their Newton polyhedron
/// and the face met by the diagonal.
pub struct Analysis {
    pub generators: LatticePointSet,
    pub polyhedron: NewtonPolyhedron,
    pub diagonal: DiagonalFace,
}

pub fn analyze(variety: &Variety, cap: Option<u32>, budget: u64) -> Result<Analysis> {
    let generators = generators_for(variety, cap, budget)?;
    let polyhedron = generators.polyhedron()?;
    let diagonal = polyhedron.diagonal_face()?;
    Ok(Analysis { generators, polyhedron, diagonal })
}

fn factorial(n: i64) -> u64 {
    (1..=n.max(0) as u64).product()
}

/// Builds the report. In polynomial mode `p` is a polynomial in all
/// projective coordinates; hypersurfaces use its restriction to the first
/// `n` coordinates.
pub fn manin_constant(variety: &Variety, p: Option<&GeneralizedPolynomial>, mode: HeightMode, cfg: &ManinConfig) -> Result<ManinReport> {
    let toric = variety.toric()?;
    let sign_count = toric.sign_count()?.value;
    let analysis = analyze(variety, cfg.cap, cfg.budget)?;
    let df = &analysis.diagonal;
    if !df.compact {
        return Err(Error::NonCompactFace);
    }
    let on_face: Vec<Vec<u32>> = df.face.points.iter().map(|&k| analysis.generators.points[k].clone()).collect();
    let k = on_face.len() as u32;
    let rho = df.rho;
    let dimension = variety.dimension();
    let flags = ManinFlags {
        compact: df.compact,
        dimension_hypothesis: df.face.dim == dimension,
        stabilized: analysis.generators.stabilized,
    };
    let spec = variety.weight()?;
    let euler = euler_constant(&spec, &df.c, k, &analysis.generators.points, &cfg.euler)?;
    let iota = to_f64(&df.iota);
    let ratio_exact = &df.iota * Q::from_integer(BigInt::from(factorial(rho - 1)));

    let (a0, degree, constant, rel) = match mode {
        HeightMode::Polynomial => {
            let p = p.ok_or_else(|| Error::Invalid("polynomial height needs a polynomial".into()))?;
            if p.nvars != toric.ncoords {
                return Err(Error::ArityMismatch { expected: toric.ncoords, got: p.nvars });
            }
            let local = match variety {
                Variety::Hypersurface(a) => p.restrict_to_hypersurface(a)?,
                Variety::Toric(_) => p.clone(),
            };
            let d = local.top_degree();
            let t: Vec<Vec<Q>> = on_face.iter().map(|b| b.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()).collect();
            let a0 = mixed_volume_constant(&t, &vec![1; t.len()], &local, &cfg.quad)?;
            let df64 = to_f64(&d);
            let c = sign_count as f64 * df64.powi(rho as i32) * a0.value * euler.value / (iota * factorial(rho - 1) as f64);
            let rel = a0.error / a0.value + euler.relative_error;
            (Some(a0), format_q(&d), c, rel)
        }
        HeightMode::SupNorm => {
            if on_face.len() != toric_arity(variety) {
                return Err(Error::Unsupported("sup-norm constant needs a simplicial diagonal face".into()));
            }
            let b: Vec<Vec<Q>> = on_face.iter().map(|r| r.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect()).collect();
            let det_b = det(&b).abs();
            if det_b == Q::from_integer(BigInt::from(0)) {
                return Err(Error::Unsupported("sup-norm constant needs a simplicial diagonal face".into()));
            }
            let prod_c = df.c.iter().fold(Q::from_integer(BigInt::from(1)), |a, x| a * x);
            let scale = (det_b * prod_c).to_f64().unwrap_or(f64::NAN);
            let c = sign_count as f64 * euler.value / scale;
            (None, "1".to_string(), c, euler.relative_error)
        }
    };
    let c0_factor = to_f64(&ratio_exact);
    Ok(ManinReport {
        mode,
        iota: format_q(&df.iota),
        rho,
        c: format_vec(&df.c),
        sign_count,
        dimension,
        degree,
        total_weight: toric.total_weight(),
        generators_on_face: on_face,
        a0,
        euler,
        constant,
        constant_error: constant * rel,
        c0: constant * c0_factor,
        c0_error: constant * rel * c0_factor,
        c0_over_c: format_q(&ratio_exact),
        order: if flags.dimension_hypothesis { "exact" } else { "upper-bound order only" },
        flags,
    })
}

fn toric_arity(variety: &Variety) -> usize {
    match variety {
        Variety::Toric(p) => p.ncoords,
        Variety::Hypersurface(a) => a.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::zeta::zeta;
    use crate::problem::ToricProblem;
    use std::f64::consts::PI;

    fn quick() -> ManinConfig {
        ManinConfig { euler: EulerConfig { prime_cutoff: 5000, ..Default::default() }, ..Default::default() }
    }

    #[test]
    fn conic_sup_norm_constant() {
        let r = manin_constant(&Variety::Hypersurface(vec![1, 1]), None, HeightMode::SupNorm, &quick()).unwrap();
        assert!((r.constant - 12.0 / (PI * PI)).abs() < 1e-9, "{}", r.constant);
        assert_eq!(r.c0_over_c, "1");
    }

    #[test]
    fn torus_sup_norm_constant() {
        for n in 1..=2 {
            let v = Variety::Toric(ToricProblem::projective_torus(n));
            let r = manin_constant(&v, None, HeightMode::SupNorm, &quick()).unwrap();
            let expect = 2f64.powi(n as i32) / zeta((n + 1) as f64);
            assert!((r.constant - expect).abs() < 1e-8 * expect, "{} vs {expect}", r.constant);
        }
    }

    #[test]
    fn conic_polynomial_constant() {
        let p = GeneralizedPolynomial::parse("X1^2+X2^2+X3^2", None).unwrap();
        let r = manin_constant(&Variety::Hypersurface(vec![1, 1]), Some(&p), HeightMode::Polynomial, &quick()).unwrap();
        // Simpson oracle for the angular integral
        let f = |t: f64| {
            let (c, s) = (t.cos(), t.sin());
            (c.powi(4) + s.powi(4) + c * c * s * s).powf(-0.5)
        };
        let n = 20000;
        let h = PI / 2.0 / n as f64;
        let mut acc = f(0.0) + f(PI / 2.0);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let expect = 6.0 / (PI * PI) * acc * h / 3.0;
        assert!((r.constant - expect).abs() < 1e-6, "{} vs {expect}", r.constant);
        assert!(r.flags.dimension_hypothesis && r.flags.compact && r.flags.stabilized);
    }
}
