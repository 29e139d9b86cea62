//! Generalized loci `{ x : α₁‖x − x₁‖ + … + αₙ‖x − xₙ‖ = c }`.
//!
//! With two foci and `α = (1, 1)` this is an ellipse, with `α = (1, -1)` one
//! branch of a hyperbola, and so on. The norm is whatever the [`GramSpace`]
//! induces.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{GramSpace, Vector};

/// `|Σαᵢ|` at or below this counts as a zero coefficient sum.
pub const ALPHA_SUM_ZERO_TOL: f64 = 1e-12;

/// Default number of uniform samples [`solve_on_ray`] takes before bisecting.
pub const DEFAULT_RAY_SAMPLES: usize = 1024;

/// Foci, coefficients and level constant of a locus.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusSpec {
    foci: Vec<Vector>,
    alphas: Vec<f64>,
    c: f64,
}

impl LocusSpec {
    pub fn new(foci: Vec<Vector>, alphas: Vec<f64>, c: f64) -> Result<Self> {
        if foci.is_empty() {
            return Err(Error::EmptyFoci);
        }
        if foci.len() != alphas.len() {
            return Err(Error::CoefficientCount { foci: foci.len(), alphas: alphas.len() });
        }
        let dim = foci[0].dim();
        if let Some(f) = foci.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
        }
        if let Some(i) = alphas.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(i) = alphas.iter().position(|&a| a == 0.0) {
            return Err(Error::ZeroCoefficient(i));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("level constant must be finite, got {c}")));
        }
        Ok(Self { foci, alphas, c })
    }

    pub fn foci(&self) -> &[Vector] {
        &self.foci
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.foci[0].dim()
    }

    /// Same foci and coefficients, different level.
    pub fn with_level(&self, c: f64) -> Result<Self> {
        Self::new(self.foci.clone(), self.alphas.clone(), c)
    }

    /// Ensures the foci live in `space`.
    pub fn check(&self, space: &GramSpace) -> Result<()> {
        space.check(&self.foci[0])
    }

    /// `Σαᵢ`
    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().sum()
    }

    /// `Σ|αᵢ|`, the Lipschitz constant of `g` with respect to the norm.
    pub fn alpha_abs_sum(&self) -> f64 {
        self.alphas.iter().map(|a| a.abs()).sum()
    }

    pub fn has_zero_alpha_sum(&self) -> bool {
        self.alpha_sum().abs() <= ALPHA_SUM_ZERO_TOL
    }

    /// Replaces every focus `xᵢ` by `xᵢ − z`.
    ///
    /// A point `y` lies on the translated locus iff `z + y` lies on the
    /// original one.
    pub fn translate_foci(&self, z: &Vector) -> Result<Self> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: z.dim() });
        }
        Ok(Self { foci: self.foci.iter().map(|f| f - z).collect(), alphas: self.alphas.clone(), c: self.c })
    }

    /// Scales every focus by `k`, keeping the coefficients and level.
    pub fn scale_foci(&self, k: f64) -> Self {
        Self { foci: self.foci.iter().map(|f| f.scale(k)).collect(), alphas: self.alphas.clone(), c: self.c }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        LocusFile::read(path)?.into_spec()
    }
}

/// `Σαᵢ‖x − xᵢ‖`. A term whose focus equals `x` is simply zero.
pub fn eval_g(space: &GramSpace, spec: &LocusSpec, x: &Vector) -> Result<f64> {
    space.check(x)?;
    spec.check(space)?;
    Ok(eval_with_foci(space, spec.alphas(), spec.foci(), x))
}

/// `Σαᵢ‖x − fᵢ‖` for an arbitrary focus list; dimensions must already agree.
pub(crate) fn eval_with_foci(space: &GramSpace, alphas: &[f64], foci: &[Vector], x: &Vector) -> f64 {
    let mut diff = vec![0.0; x.dim()];
    alphas
        .iter()
        .zip(foci)
        .map(|(a, f)| {
            for ((d, xi), fi) in diff.iter_mut().zip(x.coords()).zip(f.coords()) {
                *d = xi - fi;
            }
            a * space.quad(&diff, &diff).max(0.0).sqrt()
        })
        .sum()
}

/// `eval_g(x) − c`
pub fn residual(space: &GramSpace, spec: &LocusSpec, x: &Vector) -> Result<f64> {
    Ok(eval_g(space, spec, x)? - spec.c())
}

/// Whether `|eval_g(x) − c| ≤ tol`.
pub fn is_member(space: &GramSpace, spec: &LocusSpec, x: &Vector, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(residual(space, spec, x)?.abs() <= tol)
}

/// Finds the parameters `t ∈ [t_min, t_max]` where `origin + t·direction`
/// crosses the locus, using [`DEFAULT_RAY_SAMPLES`] samples.
///
/// See [`solve_on_ray_with`].
pub fn solve_on_ray(
    space: &GramSpace,
    spec: &LocusSpec,
    origin: &Vector,
    direction: &Vector,
    t_min: f64,
    t_max: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    solve_on_ray_with(space, spec, origin, direction, t_min, t_max, tol, DEFAULT_RAY_SAMPLES)
}

/// Samples the residual `r(t) = g(origin + t·direction) − c` on a uniform
/// grid of `samples` points, and bisects every sign change until
/// `|r| ≤ tol` or the bracket is narrower than `1e-14·(t_max − t_min)`.
///
/// Roots where the residual touches zero without changing sign are missed.
/// Results are ascending and free of duplicates.
#[allow(clippy::too_many_arguments)]
pub fn solve_on_ray_with(
    space: &GramSpace,
    spec: &LocusSpec,
    origin: &Vector,
    direction: &Vector,
    t_min: f64,
    t_max: f64,
    tol: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    space.check(origin)?;
    space.check(direction)?;
    spec.check(space)?;
    if space.norm(direction)? == 0.0 {
        return Err(Error::ZeroDirection);
    }
    if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidParameter(format!("empty parameter range [{t_min}, {t_max}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are needed".into()));
    }

    // ‖origin + t·d − xᵢ‖² = a t² + 2 b t + c₀ with a = ‖d‖², b = ⟨o − xᵢ, d⟩, c₀ = ‖o − xᵢ‖²
    let a = space.quad(direction.coords(), direction.coords());
    let terms: Vec<(f64, f64, f64)> = spec
        .foci()
        .iter()
        .zip(spec.alphas())
        .map(|(f, &alpha)| {
            let off = origin - f;
            (alpha, space.quad(off.coords(), direction.coords()), space.quad(off.coords(), off.coords()))
        })
        .collect();
    let r = |t: f64| {
        terms.iter().map(|&(alpha, b, c0)| alpha * (a * t * t + 2.0 * b * t + c0).max(0.0).sqrt()).sum::<f64>()
            - spec.c()
    };
    let min_width = 1e-14 * (t_max - t_min);
    let step = (t_max - t_min) / (samples - 1) as f64;
    let param = |i: usize| if i + 1 == samples { t_max } else { t_min + step * i as f64 };

    let mut roots: Vec<f64> = Vec::new();
    let push = |t: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| t - last > min_width) {
            roots.push(t);
        }
    };

    let mut t_lo = param(0);
    let mut r_lo = r(t_lo);
    for i in 1..samples {
        let t_hi = param(i);
        let r_hi = r(t_hi);
        if r_lo == 0.0 {
            push(t_lo, &mut roots);
        } else if r_lo * r_hi < 0.0 {
            push(bisect(&r, t_lo, r_lo, t_hi, tol, min_width), &mut roots);
        }
        t_lo = t_hi;
        r_lo = r_hi;
    }
    if r_lo == 0.0 {
        push(t_lo, &mut roots);
    }
    Ok(roots)
}

fn bisect(r: &impl Fn(f64) -> f64, mut lo: f64, mut r_lo: f64, mut hi: f64, tol: f64, min_width: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        let r_mid = r(mid);
        if r_mid.abs() <= tol || hi - lo <= min_width || mid == lo || mid == hi {
            return mid;
        }
        if (r_mid < 0.0) == (r_lo < 0.0) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
}

/// On-disk description of a locus:
/// `{"foci": [[..],..], "alphas": [..], "c": r, "space": "space.json"}`.
///
/// The optional `space` entry names the space file the foci refer to.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LocusFile {
    pub foci: Vec<Vector>,
    pub alphas: Vec<f64>,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
}

impl LocusFile {
    pub fn read(path: &Path) -> Result<Self> {
        crate::io::read_json(path)
    }

    pub fn into_spec(self) -> Result<LocusSpec> {
        LocusSpec::new(self.foci, self.alphas, self.c)
    }

    pub fn from_spec(spec: &LocusSpec) -> Self {
        Self { foci: spec.foci().to_vec(), alphas: spec.alphas().to_vec(), c: spec.c(), space: None }
    }
}
