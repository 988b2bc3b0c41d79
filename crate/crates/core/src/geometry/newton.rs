//! Newton polyhedra `conv(S) + R_+^n` and their downward twins
//! `conv(S) - R_+^n`, with faces described by polar vectors.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::hull::extreme_rays;
use super::linalg::{int_vec_to_q, rank};
use crate::error::{Error, Result};
use crate::rational::{dot, format_q, format_vec, lcm_denoms, sum, Q};

/// Largest ambient dimension handled by the exact hull.
pub const MAX_HULL_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `conv(S) + R_+^n`; facets read `<w, x> >= m`.
    Up,
    /// `conv(S) - R_+^n`; facets read `<w, x> <= m`.
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Primitive nonnegative integer normal.
    pub normal: Vec<BigInt>,
    pub offset: Q,
    /// Indices of the generating points lying on the facet.
    pub points: Vec<usize>,
}

impl Facet {
    pub fn normal_q(&self) -> Vec<Q> {
        int_vec_to_q(&self.normal)
    }

    pub fn normal_sum(&self) -> Q {
        sum(&self.normal_q())
    }
}

#[derive(Debug, Clone)]
pub struct NewtonPolyhedron {
    pub dim: usize,
    pub orientation: Orientation,
    /// Distinct generating points, in input order.
    pub points: Vec<Vec<Q>>,
    pub facets: Vec<Facet>,
    /// Indices into `points` of the vertices.
    pub vertices: Vec<usize>,
}

impl NewtonPolyhedron {
    pub fn new(points: &[Vec<Q>], orientation: Orientation) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::DegenerateGenerators { coordinate: 0 });
        };
        let n = first.len();
        if n == 0 || n > MAX_HULL_DIM {
            return Err(Error::DimensionOverflow { dim: n, limit: MAX_HULL_DIM });
        }
        let mut pts: Vec<Vec<Q>> = Vec::new();
        for p in points {
            if p.len() != n {
                return Err(Error::ArityMismatch { expected: n, got: p.len() });
            }
            if p.iter().any(|x| x.is_negative()) {
                return Err(Error::Invalid("points must be nonnegative".into()));
            }
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
        let sign: i64 = match orientation {
            Orientation::Up => 1,
            Orientation::Down => -1,
        };
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..n {
            let mut r = vec![BigInt::zero(); n + 1];
            r[i] = BigInt::from(sign);
            rows.push(r);
        }
        for p in &pts {
            let l = lcm_denoms(p.iter());
            let lq = Q::from_integer(l.clone());
            let mut r: Vec<BigInt> = p.iter().map(|x| (x * &lq).to_integer()).collect();
            r.push(l);
            rows.push(r);
        }
        let rays = extreme_rays(&rows)?;
        let mut facets = Vec::new();
        for ray in rays {
            let z = &ray.v[..n];
            if z.iter().all(Zero::is_zero) {
                continue;
            }
            let mu = Q::from_integer(ray.v[n].clone());
            let (normal, offset): (Vec<BigInt>, Q) = match orientation {
                Orientation::Up => (z.to_vec(), -mu),
                Orientation::Down => (z.iter().map(|x| -x).collect(), mu),
            };
            let g = normal.iter().fold(BigInt::zero(), |a, x| num_integer::Integer::gcd(&a, x));
            let normal: Vec<BigInt> = normal.into_iter().map(|x| x / &g).collect();
            let offset = offset / Q::from_integer(g);
            let points = (0..pts.len()).filter(|&k| ray.sat.get(n + k)).collect();
            facets.push(Facet { normal, offset, points });
        }
        facets.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.offset.cmp(&b.offset)));
        let vertices = (0..pts.len())
            .filter(|&k| {
                let normals: Vec<Vec<Q>> =
                    facets.iter().filter(|f| f.points.contains(&k)).map(Facet::normal_q).collect();
                rank(&normals) == n
            })
            .collect();
        Ok(NewtonPolyhedron { dim: n, orientation, points: pts, facets, vertices })
    }

    /// The Newton polyhedron of a set of lattice points.
    pub fn from_lattice(points: &[Vec<u32>]) -> Result<Self> {
        let pts: Vec<Vec<Q>> = points
            .iter()
            .map(|p| p.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect())
            .collect();
        Self::new(&pts, Orientation::Up)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.facets.iter().all(|f| {
            let v = dot(&f.normal_q(), x);
            match self.orientation {
                Orientation::Up => v >= f.offset,
                Orientation::Down => v <= f.offset,
            }
        })
    }

    pub fn vertex_points(&self) -> Vec<Vec<Q>> {
        self.vertices.iter().map(|&k| self.points[k].clone()).collect()
    }

    /// `m(a)`: the optimum of `<a, x>` over the polyhedron (min for `Up`,
    /// max for `Down`), attained at a vertex for `a >= 0`.
    pub fn support_value(&self, a: &[Q]) -> Q {
        let vals = self.vertices.iter().map(|&k| dot(a, &self.points[k]));
        match self.orientation {
            Orientation::Up => vals.min(),
            Orientation::Down => vals.max(),
        }
        .expect("nonempty vertex set")
    }

    /// The face on which `<a, x>` is optimal, for `a >= 0`, `a != 0`.
    pub fn support_face(&self, a: &[Q]) -> Result<Face> {
        if a.len() != self.dim {
            return Err(Error::ArityMismatch { expected: self.dim, got: a.len() });
        }
        if a.iter().any(Signed::is_negative) || a.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("polar vector must be nonnegative and nonzero".into()));
        }
        let m = self.support_value(a);
        let points: Vec<usize> = (0..self.points.len()).filter(|&k| dot(a, &self.points[k]) == m).collect();
        let recession: Vec<usize> = (0..self.dim).filter(|&i| a[i].is_zero()).collect();
        Ok(self.make_face(points, recession, a.to_vec(), m))
    }

    fn make_face(&self, points: Vec<usize>, recession: Vec<usize>, polar: Vec<Q>, value: Q) -> Face {
        let base = &self.points[points[0]];
        let mut span: Vec<Vec<Q>> = points[1..]
            .iter()
            .map(|&k| self.points[k].iter().zip(base).map(|(x, y)| x - y).collect())
            .collect();
        for &i in &recession {
            let mut e = vec![Q::zero(); self.dim];
            e[i] = Q::one();
            span.push(e);
        }
        let dim = rank(&span);
        Face { points, recession, dim, polar, value }
    }

    /// Whether a face lies in some coordinate hyperplane.
    pub fn in_coordinate_hyperplane(&self, face: &Face) -> bool {
        (0..self.dim).any(|i| {
            !face.recession.contains(&i) && face.points.iter().all(|&k| self.points[k][i].is_zero())
        })
    }

    /// The face of `E` met first by the diagonal ray `t·1`.
    pub fn diagonal_face(&self) -> Result<DiagonalFace> {
        if self.orientation != Orientation::Up {
            return Err(Error::Invalid("diagonal face needs an upward polyhedron".into()));
        }
        if let Some(i) = (0..self.dim).find(|&i| self.points.iter().all(|p| p[i].is_zero())) {
            return Err(Error::DegenerateGenerators { coordinate: i + 1 });
        }
        let ratio = |f: &Facet| &f.offset / f.normal_sum();
        let t0 = self.facets.iter().map(ratio).max().expect("facets exist");
        let active: Vec<usize> = (0..self.facets.len()).filter(|&k| ratio(&self.facets[k]) == t0).collect();
        let normalized: Vec<Vec<Q>> = active
            .iter()
            .map(|&k| {
                let f = &self.facets[k];
                f.normal_q().into_iter().map(|x| x / &f.offset).collect()
            })
            .collect();
        let k = Q::from_integer(BigInt::from(normalized.len()));
        let c: Vec<Q> = (0..self.dim)
            .map(|i| normalized.iter().fold(Q::zero(), |a, w| a + &w[i]) / &k)
            .collect();
        let face = self.support_face(&c)?;
        let iota = sum(&c);
        let rho = face.points.len() as i64 - face.dim as i64;
        Ok(DiagonalFace {
            compact: face.recession.is_empty(),
            t0,
            iota,
            rho,
            c,
            active_facets: active,
            active_normals: normalized,
            face,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Generating points on the face.
    pub points: Vec<usize>,
    /// Coordinate directions `e_i` with `F = F + R_+ e_i`.
    pub recession: Vec<usize>,
    pub dim: usize,
    pub polar: Vec<Q>,
    /// `m(polar)`.
    pub value: Q,
}

#[derive(Debug, Clone)]
pub struct DiagonalFace {
    pub face: Face,
    pub t0: Q,
    /// `ι = 1/t0`, which equals `|c|` for every normalized polar vector `c`.
    pub iota: Q,
    /// `#(F0 ∩ S) - dim F0`.
    pub rho: i64,
    /// Canonical normalized polar vector: barycenter of the active normals.
    pub c: Vec<Q>,
    pub compact: bool,
    pub active_facets: Vec<usize>,
    /// Active facet normals scaled so that `<w, x> >= 1` on `E`.
    pub active_normals: Vec<Vec<Q>>,
}

impl DiagonalFace {
    pub fn summary(&self, e: &NewtonPolyhedron) -> serde_json::Value {
        serde_json::json!({
            "t0": format_q(&self.t0),
            "iota": format_q(&self.iota),
            "rho": self.rho,
            "c": format_vec(&self.c),
            "dim": self.face.dim,
            "compact": self.compact,
            "recession": self.face.recession.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "generators_on_face": self.face.points.iter()
                .map(|&k| format_vec(&e.points[k])).collect::<Vec<_>>(),
            "active_normals": self.active_normals.iter().map(|w| format_vec(w)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagonalOutcome {
    pub meets_diagonal: bool,
    pub norm_is_iota: bool,
}

impl DiagonalOutcome {
    pub fn consistent(&self) -> bool {
        self.meets_diagonal == self.norm_is_iota
    }
}

/// Compares "F meets the diagonal" with "`|a / m(a)| = ι`" for the face cut
/// out by `a`.
pub fn diagonal_face_check(e: &NewtonPolyhedron, a: &[Q], iota: &Q) -> Result<DiagonalOutcome> {
    let face = e.support_face(a)?;
    if e.in_coordinate_hyperplane(&face) || face.value.is_zero() {
        return Err(Error::FaceInCoordinateHyperplane);
    }
    let t = &face.value / sum(a);
    let diag = vec![t.clone(); e.dim];
    let meets_diagonal = e.contains(&diag);
    let norm = sum(a) / &face.value;
    Ok(DiagonalOutcome { meets_diagonal, norm_is_iota: &norm == iota })
}
