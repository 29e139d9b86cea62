//! Carrying loci from an abstract space to coordinates.
//!
//! An abstract `n`-dimensional real inner product space `V` (polynomials,
//! matrices, ...) with ordered basis `s_1, ..., s_n` is isomorphic to `R^n`
//! through the coordinate map. Pulling the inner product back along that
//! map gives `<a, b> = Σᵢⱼ aᵢ bⱼ <sᵢ, sⱼ>_V`, which is the [`GramSpace`]
//! built from the basis. Distances, and therefore loci, agree on both
//! sides.
//!
//! A [`BasisOracle`] names the space `V`, its basis, and how to compute
//! `<sᵢ, sⱼ>_V`. [`inner_in_v`] evaluates the inner product directly on
//! `V`-elements instead, which gives a second, independent path to the
//! same numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locus::LocusSpec;
use crate::space::{GramSpace, SpaceFile, Vector};

pub mod quadrature;

pub use quadrature::gauss_legendre;

/// A recipe for the inner product of an abstract space with a fixed basis.
///
/// Serialized with a `kind` tag:
///
/// ```json
/// {"kind": "poly_integral", "interval": [0, 6.283185307179586], "scale": 0.15915494309189535, "dim": 2}
/// {"kind": "matrix_trace", "rows": 2, "cols": 1}
/// {"kind": "table", "table": [[1, 0.5], [0.5, 0.3333333333333333]]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisOracle {
    /// Explicit table of `<sᵢ, sⱼ>_V`.
    Table {
        table: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    /// Polynomials of degree `< dim` with `<f, g> = scale · ∫_a^b f g`,
    /// basis `1, x, ..., x^(dim-1)`.
    PolyIntegral { interval: [f64; 2], scale: f64, dim: usize },
    /// `rows × cols` matrices with `<A, B> = tr(AᵀB)`, basis the unit
    /// matrices in row-major order.
    MatrixTrace {
        rows: usize,
        cols: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

impl BasisOracle {
    pub fn poly_integral(a: f64, b: f64, scale: f64, dim: usize) -> Self {
        BasisOracle::PolyIntegral { interval: [a, b], scale, dim }
    }

    pub fn matrix_trace(rows: usize, cols: usize) -> Self {
        BasisOracle::MatrixTrace { rows, cols, dim: None }
    }

    pub fn table(table: Vec<Vec<f64>>) -> Self {
        BasisOracle::Table { table, dim: None }
    }

    pub fn dim(&self) -> usize {
        match self {
            BasisOracle::Table { table, .. } => table.len(),
            BasisOracle::PolyIntegral { dim, .. } => *dim,
            BasisOracle::MatrixTrace { rows, cols, .. } => rows * cols,
        }
    }

    /// Checks the parameters, not positive definiteness.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOracle(msg));
        match self {
            BasisOracle::Table { table, dim } => {
                if table.is_empty() {
                    return bad("table is empty".into());
                }
                if let Some(d) = dim {
                    if *d != table.len() {
                        return bad(format!("dim is {d} but the table has {} rows", table.len()));
                    }
                }
            }
            BasisOracle::PolyIntegral { interval: [a, b], scale, dim } => {
                if *dim == 0 {
                    return bad("dim must be positive".into());
                }
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return bad(format!("interval [{a}, {b}] must be finite with a < b"));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return bad(format!("scale must be positive and finite, got {scale}"));
                }
            }
            BasisOracle::MatrixTrace { rows, cols, dim } => {
                if *rows == 0 || *cols == 0 {
                    return bad(format!("matrix shape {rows}x{cols} is empty"));
                }
                if let Some(d) = dim {
                    if *d != rows * cols {
                        return bad(format!("dim is {d} but {rows}x{cols} matrices have {} entries", rows * cols));
                    }
                }
            }
        }
        Ok(())
    }

    /// Human-readable names of the basis elements.
    pub fn basis_labels(&self) -> Vec<String> {
        match self {
            BasisOracle::Table { table, .. } => (1..=table.len()).map(|i| format!("s{i}")).collect(),
            BasisOracle::PolyIntegral { dim, .. } => (0..*dim)
                .map(|k| match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{k}"),
                })
                .collect(),
            BasisOracle::MatrixTrace { rows, cols, .. } => {
                (0..rows * cols).map(|k| format!("E{}{}", k / cols + 1, k % cols + 1)).collect()
            }
        }
    }

    /// `<sᵢ, sⱼ>_V` as the oracle defines it.
    fn basis_inner(&self, i: usize, j: usize) -> f64 {
        match self {
            BasisOracle::Table { table, .. } => table[i][j],
            BasisOracle::PolyIntegral { interval: [a, b], scale, .. } => {
                let degree = i + j;
                // k nodes integrate degree 2k - 1 exactly
                let nodes = (degree + 2).div_ceil(2);
                scale * quadrature::integrate(nodes, *a, *b, |x| x.powi(degree as i32))
            }
            BasisOracle::MatrixTrace { rows, cols, .. } => {
                let unit = |k: usize| {
                    let mut m = vec![0.0; rows * cols];
                    m[k] = 1.0;
                    m
                };
                trace_product(&unit(i), &unit(j))
            }
        }
    }
}

/// `tr(AᵀB)` for two matrices stored with the same shape.
fn trace_product(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The Gram matrix `G[i][j] = <sᵢ, sⱼ>_V`, validated.
pub fn gram_from_basis(oracle: &BasisOracle) -> Result<GramSpace> {
    oracle.validate()?;
    let n = oracle.dim();
    if let BasisOracle::Table { table, .. } = oracle {
        return GramSpace::new(table.clone());
    }
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = oracle.basis_inner(i, j);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    GramSpace::new(rows)
}

/// Coordinates of a polynomial in the monomial basis, constant term first,
/// zero-padded to `n`.
///
/// ```
/// # use loci::transport::poly_coords;
/// // 3x + 7.9104
/// assert_eq!(poly_coords(&[7.9104, 3.0], 2).unwrap().coords(), &[7.9104, 3.0]);
/// ```
pub fn poly_coords(coefficients: &[f64], n: usize) -> Result<Vector> {
    if coefficients.len() > n {
        return Err(Error::DegreeOverflow { len: coefficients.len(), dim: n });
    }
    let mut coords = coefficients.to_vec();
    coords.resize(n, 0.0);
    Vector::try_new(coords)
}

/// Builds the coordinate space for `oracle` and the locus whose foci have
/// the given coordinates.
///
/// A `V`-element satisfies the locus equation in `V` exactly when its
/// coordinate tuple is a member of the returned locus in the returned space.
pub fn transport_locus(
    oracle: &BasisOracle,
    foci: Vec<Vector>,
    alphas: Vec<f64>,
    c: f64,
) -> Result<(GramSpace, LocusSpec)> {
    let space = gram_from_basis(oracle)?;
    let spec = LocusSpec::new(foci, alphas, c)?;
    spec.check(&space)?;
    Ok((space, spec))
}

/// The inner product of two `V`-elements, computed in `V`.
///
/// Elements are given by their coordinates, but the computation does not
/// go through the Gram matrix: polynomials are multiplied and integrated,
/// matrices are multiplied and traced, and table elements are expanded as
/// `Σᵢⱼ aᵢ bⱼ <sᵢ, sⱼ>` straight from the table.
pub fn inner_in_v(oracle: &BasisOracle, a: &[f64], b: &[f64]) -> Result<f64> {
    oracle.validate()?;
    let n = oracle.dim();
    for len in [a.len(), b.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(match oracle {
        BasisOracle::Table { table, .. } => {
            let mut total = 0.0;
            for i in 0..n {
                for j in 0..n {
                    total += a[i] * b[j] * table[i][j];
                }
            }
            total
        }
        BasisOracle::PolyIntegral { interval: [lo, hi], scale, .. } => {
            let product = poly_mul(a, b);
            let nodes = (product.len() + 1).div_ceil(2).max(1);
            scale * quadrature::integrate(nodes, *lo, *hi, |x| horner(&product, x))
        }
        BasisOracle::MatrixTrace { rows, cols, .. } => {
            // tr(AᵀB) = Σ_k (AᵀB)_kk = Σ_k Σ_r A_rk B_rk
            let (r, c) = (*rows, *cols);
            (0..c).map(|k| (0..r).map(|i| a[i * c + k] * b[i * c + k]).sum::<f64>()).sum()
        }
    })
}

/// `g` evaluated entirely in `V`: `Σ αᵢ sqrt(<x - xᵢ, x - xᵢ>_V)`.
pub fn eval_g_in_v(oracle: &BasisOracle, spec: &LocusSpec, x: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (f, &alpha) in spec.foci().iter().zip(spec.alphas()) {
        if f.dim() != x.len() {
            return Err(Error::DimensionMismatch { expected: f.dim(), found: x.len() });
        }
        let diff: Vec<f64> = x.iter().zip(f.coords()).map(|(p, q)| p - q).collect();
        total += alpha * inner_in_v(oracle, &diff, &diff)?.max(0.0).sqrt();
    }
    Ok(total)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// A space file may give the Gram matrix directly or name an oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceSource {
    Gram(SpaceFile),
    Oracle(BasisOracle),
}

impl SpaceSource {
    /// Reads a space file, dispatching on the presence of a `kind` field.
    pub fn read(path: &Path) -> Result<Self> {
        let value: serde_json::Value = crate::io::read_json(path)?;
        let json_err = |source| Error::Json { path: path.into(), source };
        if value.get("kind").is_some() {
            serde_json::from_value(value).map(SpaceSource::Oracle).map_err(json_err)
        } else {
            serde_json::from_value(value).map(SpaceSource::Gram).map_err(json_err)
        }
    }

    pub fn into_space(self) -> Result<GramSpace> {
        match self {
            SpaceSource::Gram(file) => file.into_space(),
            SpaceSource::Oracle(oracle) => gram_from_basis(&oracle),
        }
    }

    /// The materialized space file, with basis labels when an oracle knows them.
    pub fn materialize(&self) -> Result<SpaceFile> {
        match self {
            SpaceSource::Gram(file) => {
                let space = file.clone().into_space()?;
                Ok(SpaceFile::from_space(&space, file.basis_labels.clone()))
            }
            SpaceSource::Oracle(oracle) => {
                let space = gram_from_basis(oracle)?;
                Ok(SpaceFile::from_space(&space, Some(oracle.basis_labels())))
            }
        }
    }
}
