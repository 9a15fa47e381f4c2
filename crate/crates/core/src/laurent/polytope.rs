use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::ExponentVector;
use crate::error::{Error, Result};

/// Which lattice points of a polytope to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LatticeMode {
    /// Relative interior.
    Interior,
    /// Every lattice point, boundary included.
    All,
}

/// Linear constraint `normal . x (<= or =) offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Constraint {
    fn eval(&self, x: &[i64]) -> i128 {
        self.normal
            .iter()
            .zip(x)
            .map(|(a, b)| *a as i128 * *b as i128)
            .sum()
    }
}

/// Convex hull of finitely many lattice points, in facet form.
///
/// Facet normals are primitive integer vectors. When the hull is not full
/// dimensional, `affine_hull` lists equalities cutting out its affine span and the
/// facets are those of the relative interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polytope {
    pub dim: usize,
    /// Dimension of the affine hull.
    pub rank: usize,
    pub vertices: Vec<ExponentVector>,
    pub facets: Vec<Constraint>,
    pub affine_hull: Vec<Constraint>,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r == row || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..ncols {
                let t = &factor * &m[row][c];
                m[r][c] = &m[r][c] - &t;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Scales a rational vector to a primitive integer vector with positive leading entry.
fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut out: Vec<BigInt> = if g.is_zero() {
        ints
    } else {
        ints.iter().map(|x| x / &g).collect()
    };
    if out
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        out.iter_mut().for_each(|x| *x = -&*x);
    }
    out
}

/// Integer basis of `{a : rows . a = 0}`, one primitive vector per free column.
fn null_space(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(primitive(&v));
    }
    (basis, pivots)
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::InvalidArgument("polytope coefficients overflow".into()))
        })
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum()
}

/// Enumerates `k`-subsets of `0..n` in lexicographic order.
fn for_each_subset<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Polytope {
    /// Convex hull by brute-force facet enumeration over point subsets.
    pub fn hull(points: &[ExponentVector]) -> Result<Self> {
        let Some(p0) = points.first() else {
            return Err(Error::ZeroPolynomial);
        };
        let n = p0.len();
        let mut pts: Vec<Vec<i64>> = points.iter().map(|p| p.0.clone()).collect();
        pts.sort();
        pts.dedup();
        let base = pts[0].clone();
        let diffs: Vec<Vec<BigRational>> = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&base).map(|(a, b)| q(a - b)).collect())
            .collect();

        // affine hull: normals orthogonal to every difference, in canonical form
        let (eq_basis, _) = null_space(&diffs, n);
        let mut eq_rows: Vec<Vec<BigRational>> = eq_basis
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        rref(&mut eq_rows, n);
        let mut affine_hull = Vec::new();
        for row in eq_rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())) {
            let normal = to_i64_vec(&primitive(row))?;
            let offset = i64::try_from(dot(&normal, &base))
                .map_err(|_| Error::InvalidArgument("polytope offset overflow".into()))?;
            affine_hull.push(Constraint { normal, offset });
        }

        let rank = n - affine_hull.len();
        let mut diff_rows = diffs.clone();
        let coords = rref(&mut diff_rows, n);
        debug_assert_eq!(coords.len(), rank);
        let proj: Vec<Vec<i64>> = pts
            .iter()
            .map(|p| coords.iter().map(|&c| p[c]).collect())
            .collect();

        let mut facets: Vec<Constraint> = Vec::new();
        if rank > 0 {
            let mut seen: Vec<(Vec<i64>, i64)> = Vec::new();
            for_each_subset(proj.len(), rank, |sub| {
                let anchor = &proj[sub[0]];
                let rows: Vec<Vec<BigRational>> = sub[1..]
                    .iter()
                    .map(|&i| proj[i].iter().zip(anchor).map(|(a, b)| q(a - b)).collect())
                    .collect();
                let (ns, _) = null_space(&rows, rank);
                if ns.len() != 1 {
                    return;
                }
                let Ok(normal) = to_i64_vec(&ns[0]) else {
                    return;
                };
                let b = dot(&normal, anchor);
                let vals: Vec<i128> = proj.iter().map(|p| dot(&normal, p)).collect();
                let (normal, b) = if vals.iter().all(|&v| v <= b) {
                    (normal, b)
                } else if vals.iter().all(|&v| v >= b) {
                    (normal.iter().map(|x| -x).collect(), -b)
                } else {
                    return;
                };
                let b = b as i64;
                if !seen.iter().any(|(nn, bb)| nn == &normal && *bb == b) {
                    seen.push((normal, b));
                }
            });
            seen.sort();
            for (normal_proj, offset) in seen {
                let mut normal = vec![0i64; n];
                for (k, &c) in coords.iter().enumerate() {
                    normal[c] = normal_proj[k];
                }
                facets.push(Constraint { normal, offset });
            }
        }

        // vertices: points whose tight facets span the projected space
        let mut vertices = Vec::new();
        for p in &pts {
            if rank == 0 {
                vertices.push(ExponentVector(p.clone()));
                continue;
            }
            let tight: Vec<Vec<BigRational>> = facets
                .iter()
                .filter(|f| f.eval(p) == f.offset as i128)
                .map(|f| coords.iter().map(|&c| q(f.normal[c])).collect())
                .collect();
            let mut t = tight;
            if rref(&mut t, rank).len() == rank {
                vertices.push(ExponentVector(p.clone()));
            }
        }
        Ok(Polytope {
            dim: n,
            rank,
            vertices,
            facets,
            affine_hull,
        })
    }

    pub fn contains(&self, u: &[i64], strict: bool) -> bool {
        if u.len() != self.dim {
            return false;
        }
        if self
            .affine_hull
            .iter()
            .any(|e| e.eval(u) != e.offset as i128)
        {
            return false;
        }
        self.facets.iter().all(|f| {
            let v = f.eval(u);
            if strict {
                v < f.offset as i128
            } else {
                v <= f.offset as i128
            }
        })
    }

    pub fn dilate(&self, m: i64) -> Self {
        let scale = |c: &Constraint| Constraint {
            normal: c.normal.clone(),
            offset: c.offset * m,
        };
        Polytope {
            dim: self.dim,
            rank: self.rank,
            vertices: self.vertices.iter().map(|v| v.scale(m)).collect(),
            facets: self.facets.iter().map(scale).collect(),
            affine_hull: self.affine_hull.iter().map(scale).collect(),
        }
    }

    /// `(min, max)` per coordinate over the vertices.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        (0..self.dim)
            .map(|k| {
                let it = self.vertices.iter().map(|v| v.0[k]);
                (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
            })
            .collect()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.rank == self.dim
    }
}

/// Lattice points of `p` in lexicographic order, by a bounding-box scan.
pub fn lattice_points(p: &Polytope, mode: LatticeMode) -> Vec<ExponentVector> {
    let bb = p.bounding_box();
    let strict = mode == LatticeMode::Interior;
    let mut out = Vec::new();
    if bb.is_empty() {
        return out;
    }
    let mut cur: Vec<i64> = bb.iter().map(|b| b.0).collect();
    loop {
        if p.contains(&cur, strict) {
            out.push(ExponentVector(cur.clone()));
        }
        let mut k = bb.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] <= bb[k].1 {
                break;
            }
            cur[k] = bb[k].0;
        }
    }
}
