//! Exact volume of a bounded polytope given by points, via a pulling
//! triangulation over the face lattice.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::hull::{extreme_rays, Bits};
use super::linalg::{det, rank};
use crate::error::{Error, Result};
use crate::rational::{lcm_denoms, Q};

fn affine_rank(points: &[Vec<Q>], idx: &[usize]) -> usize {
    let base = &points[idx[0]];
    let diffs: Vec<Vec<Q>> = idx[1..]
        .iter()
        .map(|&k| points[k].iter().zip(base).map(|(x, y)| x - y).collect())
        .collect();
    rank(&diffs)
}

/// `vol_n(conv(points))`.
pub fn polytope_volume(points: &[Vec<Q>]) -> Result<Q> {
    let Some(first) = points.first() else { return Ok(Q::zero()) };
    let n = first.len();
    let mut pts: Vec<Vec<Q>> = Vec::new();
    for p in points {
        if p.len() != n {
            return Err(Error::ArityMismatch { expected: n, got: p.len() });
        }
        if !pts.contains(p) {
            pts.push(p.clone());
        }
    }
    let all: Vec<usize> = (0..pts.len()).collect();
    if affine_rank(&pts, &all) < n {
        return Ok(Q::zero());
    }
    if n > super::newton::MAX_HULL_DIM {
        return Err(Error::DimensionOverflow { dim: n, limit: super::newton::MAX_HULL_DIM });
    }
    // facets of the homogenized cone: <z, x> + μ >= 0
    let rows: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            let l = lcm_denoms(p.iter());
            let lq = Q::from_integer(l.clone());
            let mut r: Vec<BigInt> = p.iter().map(|x| (x * &lq).to_integer()).collect();
            r.push(l);
            r
        })
        .collect();
    let facets: Vec<Bits> = extreme_rays(&rows)?.into_iter().map(|r| r.sat).collect();
    let is_vertex = |k: usize| {
        let through: Vec<&Bits> = facets.iter().filter(|f| f.get(k)).collect();
        // a point is a vertex iff the facets through it meet only in it
        (0..pts.len()).all(|j| j == k || through.iter().any(|f| !f.get(j)))
    };
    let vertices: Vec<usize> = (0..pts.len()).filter(|&k| is_vertex(k)).collect();
    let facet_sets: Vec<Vec<usize>> =
        facets.iter().map(|f| vertices.iter().copied().filter(|&k| f.get(k)).collect()).collect();

    let mut simplices = Vec::new();
    triangulate(&pts, &vertices, n, &facet_sets, &mut simplices);
    let mut total = Q::zero();
    for s in simplices {
        let m: Vec<Vec<Q>> = s[1..]
            .iter()
            .map(|&k| pts[k].iter().zip(&pts[s[0]]).map(|(x, y)| x - y).collect())
            .collect();
        total += det(&m).abs();
    }
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    Ok(total / Q::from_integer(fact))
}

/// Pulls the first vertex of `face` and cones it over the facets of `face`
/// that avoid it.
fn triangulate(
    pts: &[Vec<Q>],
    face: &[usize],
    dim: usize,
    facet_sets: &[Vec<usize>],
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == dim + 1 {
        out.push(face.to_vec());
        return;
    }
    let apex = face[0];
    let mut subfaces: Vec<Vec<usize>> = Vec::new();
    for f in facet_sets {
        let sub: Vec<usize> = face.iter().copied().filter(|k| f.contains(k)).collect();
        if sub.len() < dim || sub.contains(&apex) || subfaces.contains(&sub) {
            continue;
        }
        if affine_rank(pts, &sub) == dim - 1 {
            subfaces.push(sub);
        }
    }
    for sub in subfaces {
        let mut inner = Vec::new();
        triangulate(pts, &sub, dim - 1, facet_sets, &mut inner);
        for mut s in inner {
            s.insert(0, apex);
            out.push(s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn cube_and_simplex() {
        let cube: Vec<Vec<Q>> = (0..8)
            .map(|m| (0..3).map(|i| q(((m >> i) & 1) as i64 * 2)).collect())
            .collect();
        assert_eq!(polytope_volume(&cube).unwrap(), q(8));
        let simplex = vec![vec![q(0), q(0)], vec![qr(1, 2), qr(1, 2)], vec![q(0), q(1)]];
        assert_eq!(polytope_volume(&simplex).unwrap(), qr(1, 4));
    }

    #[test]
    fn interior_points_are_ignored() {
        let sq = vec![
            vec![q(0), q(0)],
            vec![q(1), q(1)],
            vec![q(2), q(0)],
            vec![q(0), q(2)],
            vec![q(2), q(2)],
            vec![q(1), q(0)],
        ];
        assert_eq!(polytope_volume(&sq).unwrap(), q(4));
    }

    #[test]
    fn flat_is_zero() {
        let seg = vec![vec![q(0), q(0)], vec![q(1), q(1)]];
        assert_eq!(polytope_volume(&seg).unwrap(), q(0));
    }
}
