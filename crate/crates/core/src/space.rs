//! Real inner product spaces encoded by their Gram matrix.
//!
//! A finite-dimensional real inner product space with ordered basis
//! `s_1, ..., s_n` is fully described by the matrix `G[i][j] = <s_i, s_j>`.
//! Vectors are coordinate tuples with respect to that basis and
//! `<u, v> = u^T G v`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check, measured against the largest
/// absolute entry of the matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Coordinates of a vector with respect to the basis of a [`GramSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting NaN and infinite coordinates.
    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard coordinate vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|c| c * k).collect())
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `self + t * dir`
    pub fn along(&self, dir: &Vector, t: f64) -> Self {
        Self(self.0.iter().zip(&dir.0).map(|(a, b)| a + t * b).collect())
    }
}

/// # Panics
///
/// Panics if a coordinate is not finite. Use [`Vector::try_new`] for
/// untrusted input.
impl From<Vec<f64>> for Vector {
    fn from(coords: Vec<f64>) -> Self {
        Self::try_new(coords).expect("vector coordinates must be finite")
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(coords: [f64; N]) -> Self {
        Self::from(coords.to_vec())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Vector> for &Vector {
            type Output = Vector;

            fn $method(self, rhs: &Vector) -> Vector {
                assert_eq!(self.dim(), rhs.dim(), "vector dimensions differ");
                Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a $op b).collect())
            }
        }

        impl $tr<Vector> for Vector {
            type Output = Vector;

            fn $method(self, rhs: Vector) -> Vector {
                (&self).$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// An `n`-dimensional real inner product space given by a symmetric
/// positive-definite Gram matrix.
///
/// Immutable once built; all operations take `&self`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSpace {
    dim: usize,
    // row-major, always exactly symmetric
    gram: Vec<f64>,
}

impl GramSpace {
    /// Validates `matrix` as a Gram matrix.
    ///
    /// Asymmetry up to [`SYMMETRY_TOL`] (relative to the largest entry) is
    /// removed by averaging with the transpose. Positive definiteness is
    /// decided by a Cholesky factorization: every pivot must be strictly
    /// positive.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::InvalidParameter("gram matrix is empty".into()));
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, row, len: r.len() });
            }
        }
        let flat: Vec<f64> = matrix.into_iter().flatten().collect();
        if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }

        let scale = flat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut gram = flat;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (gram[i * n + j], gram[j * n + i]);
                let gap = (a - b).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { i, j, gap });
                }
                let mean = 0.5 * (a + b);
                gram[i * n + j] = mean;
                gram[j * n + i] = mean;
            }
        }

        cholesky_pivots(n, &gram)?;
        Ok(Self { dim: n, gram })
    }

    /// The standard inner product on `R^n`.
    pub fn euclidean(dim: usize) -> Self {
        let mut gram = vec![0.0; dim * dim];
        for i in 0..dim {
            gram[i * dim + i] = 1.0;
        }
        Self { dim, gram }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.gram.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn check(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        Ok(())
    }

    /// `u^T G v`
    pub fn inner(&self, u: &Vector, v: &Vector) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.quad(u.coords(), v.coords()))
    }

    pub fn norm_sq(&self, u: &Vector) -> Result<f64> {
        self.check(u)?;
        Ok(self.quad(u.coords(), u.coords()).max(0.0))
    }

    pub fn norm(&self, u: &Vector) -> Result<f64> {
        self.norm_sq(u).map(f64::sqrt)
    }

    /// Cosine of the angle between `u` and `v`, clamped to `[-1, 1]`.
    pub fn cos_angle(&self, u: &Vector, v: &Vector) -> Result<f64> {
        let nu = self.norm(u)?;
        let nv = self.norm(v)?;
        if nu == 0.0 || nv == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok((self.inner(u, v)? / (nu * nv)).clamp(-1.0, 1.0))
    }

    /// `Σᵢ Gᵢᵢ uᵢvᵢ + Σᵢ<ⱼ Gᵢⱼ (uᵢvⱼ + uⱼvᵢ)`, which is bitwise symmetric in `u` and `v`.
    pub(crate) fn quad(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.gram[i * n..(i + 1) * n];
            let mut off = 0.0;
            for j in (i + 1)..n {
                off += row[j] * (u[i] * v[j] + u[j] * v[i]);
            }
            acc += row[i] * (u[i] * v[i]) + off;
        }
        acc
    }

    /// Loads a space file holding either a Gram matrix or a basis oracle
    /// (see [`crate::transport::SpaceSource`]).
    pub fn from_file(path: &Path) -> Result<Self> {
        crate::transport::SpaceSource::read(path)?.into_space()
    }
}

/// Runs an in-place Cholesky factorization and fails on the first
/// non-positive pivot.
fn cholesky_pivots(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// On-disk description of a space: `{"dim": n, "gram": [[..],..], "basis_labels": [..]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceFile {
    pub dim: usize,
    pub gram: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
}

impl SpaceFile {
    pub fn read(path: &Path) -> Result<Self> {
        crate::io::read_json(path)
    }

    pub fn into_space(self) -> Result<GramSpace> {
        if self.gram.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.gram.len() });
        }
        if let Some(labels) = &self.basis_labels {
            if labels.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: labels.len() });
            }
        }
        GramSpace::new(self.gram)
    }

    pub fn from_space(space: &GramSpace, basis_labels: Option<Vec<String>>) -> Self {
        Self { dim: space.dim(), gram: space.rows(), basis_labels }
    }
}
