//! Minimal generators of the support of a uniformly multiplicative weight.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::newton::NewtonPolyhedron;
use crate::problem::{UniformMultiplicativeSpec, Variety, WeightRule};

/// Default limit on the number of lattice points visited.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePointSet {
    pub arity: usize,
    /// Minimal elements of `supp(g) \ {0}` up to the cap, in graded
    /// lexicographic order.
    pub points: Vec<Vec<u32>>,
    pub cap: u32,
    /// Whether the Newton polyhedron has the same vertices at `2 * cap`.
    pub stabilized: bool,
}

impl LatticePointSet {
    pub fn contains(&self, nu: &[u32]) -> bool {
        self.points.iter().any(|p| p.as_slice() == nu)
    }

    pub fn polyhedron(&self) -> Result<NewtonPolyhedron> {
        NewtonPolyhedron::from_lattice(&self.points)
    }
}

/// `4 · arity · max(1, max |a_ij|, |a|)`.
pub fn default_cap(spec: &UniformMultiplicativeSpec) -> u32 {
    let scale = match &spec.rule {
        WeightRule::Toric(p) => p.max_entry(),
        WeightRule::Hypersurface(a) => a.iter().sum::<u64>().max(*a.iter().max().unwrap_or(&1)),
        _ => 1,
    };
    (4 * spec.arity as u64 * scale.max(1)).min(u32::MAX as u64) as u32
}

fn binom_f(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn compositions(k: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(k);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=k).rev() {
        prefix.push(first);
        compositions(k - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Enumerates `supp(g)` by total degree up to `cap`, keeping the points that
/// dominate no earlier accepted point.
pub fn minimal_generators(
    spec: &UniformMultiplicativeSpec,
    cap: u32,
    budget: u64,
) -> Result<Vec<Vec<u32>>> {
    let n = spec.arity;
    if n == 0 {
        return Err(Error::TooFewCoordinates(0));
    }
    if binom_f(cap as u64 + n as u64, n as u64) > budget as f64 {
        return Err(Error::EnumerationTooLarge { budget });
    }
    let mut accepted: Vec<Vec<u32>> = Vec::new();
    for k in 1..=cap {
        let mut level: Vec<Vec<u32>> = (0..=k)
            .rev()
            .collect::<Vec<_>>()
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut out = Vec::new();
                if n == 1 {
                    if first == k {
                        out.push(vec![k]);
                    }
                } else {
                    let mut prefix = vec![first];
                    compositions(k - first, n - 1, &mut prefix, &mut out);
                }
                out.into_iter().filter(|nu| {
                    spec.weight(nu) != 0
                        && !accepted.iter().any(|g| g.iter().zip(nu.iter()).all(|(a, b)| a <= b))
                })
            })
            .collect();
        level.sort_by(|a, b| b.cmp(a));
        accepted.extend(level);
    }
    if accepted.is_empty() {
        return Err(Error::CapTooSmall { cap });
    }
    Ok(accepted)
}

/// Generators at `cap`, flagged as stabilized when doubling the cap leaves
/// the vertex set of the Newton polyhedron unchanged.
pub fn generators_with_check(
    spec: &UniformMultiplicativeSpec,
    cap: Option<u32>,
    budget: u64,
) -> Result<LatticePointSet> {
    let cap = cap.unwrap_or_else(|| default_cap(spec));
    let points = minimal_generators(spec, cap, budget)?;
    let stabilized = match minimal_generators(spec, cap.saturating_mul(2), budget) {
        Ok(more) => {
            let a = NewtonPolyhedron::from_lattice(&points)?.vertex_points();
            let b = NewtonPolyhedron::from_lattice(&more)?.vertex_points();
            a == b
        }
        Err(Error::EnumerationTooLarge { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok(LatticePointSet { arity: spec.arity, points, cap, stabilized })
}

pub fn generators_for(variety: &Variety, cap: Option<u32>, budget: u64) -> Result<LatticePointSet> {
    generators_with_check(&variety.weight()?, cap, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{hypersurface_weight, toric_weight, ToricProblem};

    #[test]
    fn conic_generators() {
        let s = generators_with_check(&hypersurface_weight(&[1, 1]).unwrap(), None, 1 << 30).unwrap();
        assert_eq!(s.points, vec![vec![2, 0], vec![0, 2]]);
        assert!(s.stabilized);
    }

    #[test]
    fn unbalanced_exponents() {
        let s = generators_with_check(&hypersurface_weight(&[3, 5]).unwrap(), None, 1 << 30).unwrap();
        assert_eq!(s.points, vec![vec![8, 0], vec![0, 8]]);
    }

    #[test]
    fn toric_conic_generators() {
        let p = ToricProblem::hypersurface(&[1, 1]).unwrap();
        let s = generators_with_check(&toric_weight(&p), None, 1 << 30).unwrap();
        assert_eq!(s.points, vec![vec![2, 0, 1], vec![0, 2, 1]]);
    }

    #[test]
    fn torus_generators() {
        let p = ToricProblem::projective_torus(2);
        let s = generators_with_check(&toric_weight(&p), None, 1 << 30).unwrap();
        assert_eq!(s.points, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn budget_is_enforced() {
        let p = ToricProblem::projective_torus(5);
        assert!(matches!(
            minimal_generators(&toric_weight(&p), 100, 1000),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
