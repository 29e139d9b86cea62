//! Bound certificates for points built from members of a locus.
//!
//! Start from a member `z` of `L_c = { x : Σαᵢ‖x − xᵢ‖ = c }` and move it,
//! by adding an arbitrary vector, another member, or forming a
//! non-negative combination of members. The exact value of `g` at the new
//! point is unknown without evaluating it, but each distance
//! `‖d + y‖` (with `d` the old offset to a focus and `y` the displacement)
//! is bracketed by
//!
//! ```text
//! proj = |‖d‖² + ⟨d,y⟩| / ‖d‖   ≤   ‖d + y‖   ≤   sqrt(‖y‖² + (‖d‖² + ⟨d,y⟩)² / ‖d‖²) = hyp
//! ```
//!
//! Picking the side of the bracket by the sign of each `αᵢ` gives four
//! scalar conditions. When a condition has the required strict sign, `g` at
//! the composite point is guaranteed to sit on one side of a bound; that
//! implication is a [`Certificate`].
//!
//! Conditions, with `Σ⁺` over positive and `Σ⁻` over negative coefficients:
//!
//! | case | condition                                   | fires when | claim            |
//! |------|---------------------------------------------|------------|------------------|
//! | 1    | `A − Σ⁺ α·proj − Σ⁻ α·hyp`                  | `< 0`      | `g ≥ upper bound` |
//! | 2    | `A − Σ⁺ α·hyp − Σ⁻ α·proj`                  | `> 0`      | `g ≤ upper bound` |
//! | 3    | `B + Σ⁺ α·proj + Σ⁻ α·hyp`                  | `> 0`      | `g ≥ lower bound` |
//! | 4    | `B + Σ⁺ α·hyp + Σ⁻ α·proj`                  | `< 0`      | `g ≤ lower bound` |
//!
//! The lead terms `A`, `B` and the two bounds depend on the construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locus::{eval_with_foci, LocusSpec};
use crate::space::{GramSpace, Vector};
use crate::triangle::bounds_from_parts;

/// Slack allowed when auditing a certificate, relative to `max(1, |bound|)`.
pub const AUDIT_SLACK: f64 = 1e-9;

/// Which construction a certificate is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `z + y` for a member `z` and any vector `y`.
    #[serde(rename = "T7")]
    AddVector,
    /// `v + w` for two members, against doubled foci.
    #[serde(rename = "T8")]
    AddMembers,
    /// `γv + βw` with `γ, β ≥ 0`, against foci scaled by `γ + β`.
    #[serde(rename = "T10")]
    LinearCombo,
    /// `Σβⱼvⱼ` with all `βⱼ > 0`, against foci scaled by `Σβⱼ`.
    #[serde(rename = "TMULTI")]
    MultiCombo,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::AddVector => "T7",
            Theorem::AddMembers => "T8",
            Theorem::LinearCombo => "T10",
            Theorem::MultiCombo => "TMULTI",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    Geq,
    Leq,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Geq => Direction::Leq,
            Direction::Leq => Direction::Geq,
        }
    }

    /// Whether `value` respects this direction against `bound`, up to `slack`.
    pub fn holds(self, value: f64, bound: f64, slack: f64) -> bool {
        match self {
            Direction::Geq => value >= bound - slack,
            Direction::Leq => value <= bound + slack,
        }
    }
}

/// Bracket on `‖d + y‖` for one focus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocusEstimate {
    pub proj: f64,
    pub hyp: f64,
    /// `‖d‖² + ⟨d,y⟩ < 0`; `proj` then relies on the absolute value.
    pub negative_projection: bool,
}

impl FocusEstimate {
    fn from_offsets(space: &GramSpace, d: &Vector, y: &Vector) -> Option<Self> {
        let d_sq = space.quad(d.coords(), d.coords()).max(0.0);
        let y_sq = space.quad(y.coords(), y.coords()).max(0.0);
        if d_sq == 0.0 {
            return None;
        }
        let ip = space.quad(d.coords(), y.coords());
        let (proj, hyp) = bounds_from_parts(d_sq, y_sq, ip);
        Some(Self { proj, hyp, negative_projection: d_sq + ip < 0.0 })
    }

    /// `‖0 + y‖ = ‖y‖` exactly, no estimate needed.
    fn exact(space: &GramSpace, y: &Vector) -> Self {
        let n = space.quad(y.coords(), y.coords()).max(0.0).sqrt();
        Self { proj: n, hyp: n, negative_projection: false }
    }
}

/// Per-focus brackets on `‖z + y − xᵢ‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaEstimates {
    pub per_focus: Vec<FocusEstimate>,
}

impl DeltaEstimates {
    pub fn any_negative_projection(&self) -> bool {
        self.per_focus.iter().any(|e| e.negative_projection)
    }
}

/// One "condition sign implies bound" statement, evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub theorem: Theorem,
    pub case_id: u8,
    pub condition_value: f64,
    pub direction: Direction,
    pub bound: f64,
    /// Whether the condition has the strict sign its case needs.
    pub fired: bool,
    pub negative_projection: bool,
    /// The stated direction of this case looks wrong; see
    /// [`Certificate::alternate_direction`].
    pub suspect_direction: bool,
    pub composite_point: Vector,
    pub composite_foci: Vec<Vector>,
}

impl Certificate {
    /// The opposite reading of a case whose stated direction is suspect.
    pub fn alternate_direction(&self) -> Option<Direction> {
        self.suspect_direction.then(|| self.direction.flipped())
    }

    /// `g` at the composite point against the composite foci.
    pub fn composite_value(&self, space: &GramSpace, spec: &LocusSpec) -> f64 {
        eval_with_foci(space, spec.alphas(), &self.composite_foci, &self.composite_point)
    }

    pub fn audit(&self, space: &GramSpace, spec: &LocusSpec) -> bool {
        audit_certificate(space, spec, &self.composite_point, &self.composite_foci, self)
    }

    /// Audit under [`Certificate::alternate_direction`], if there is one.
    pub fn audit_alternate(&self, space: &GramSpace, spec: &LocusSpec) -> Option<bool> {
        let dir = self.alternate_direction()?;
        let value = self.composite_value(space, spec);
        Some(dir.holds(value, self.bound, slack(self.bound)))
    }

    /// Flattened record with audit results, one JSON line per certificate.
    pub fn report(&self, space: &GramSpace, spec: &LocusSpec) -> CertificateReport {
        let value = self.composite_value(space, spec);
        CertificateReport {
            theorem: self.theorem,
            case: self.case_id,
            condition_value: self.condition_value,
            direction: self.direction,
            bound: self.bound,
            fired: self.fired,
            composite_value: value,
            audit: self.fired.then(|| self.direction.holds(value, self.bound, slack(self.bound))),
            flags: ReportFlags {
                negative_projection: self.negative_projection,
                suspect_direction: self.suspect_direction,
                alternate_audit: if self.fired { self.audit_alternate(space, spec) } else { None },
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub theorem: Theorem,
    pub case: u8,
    pub condition_value: f64,
    pub direction: Direction,
    pub bound: f64,
    pub fired: bool,
    pub composite_value: f64,
    /// `None` when the certificate did not fire and so claims nothing.
    pub audit: Option<bool>,
    pub flags: ReportFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub negative_projection: bool,
    pub suspect_direction: bool,
    pub alternate_audit: Option<bool>,
}

fn slack(bound: f64) -> f64 {
    AUDIT_SLACK * bound.abs().max(1.0)
}

/// Evaluates `g` at `composite_point` with `composite_foci` and checks it
/// against the certificate's direction and bound, with [`AUDIT_SLACK`].
///
/// Meant for fired certificates; an unfired one claims nothing, and the
/// result of auditing it is meaningless.
pub fn audit_certificate(
    space: &GramSpace,
    spec: &LocusSpec,
    composite_point: &Vector,
    composite_foci: &[Vector],
    cert: &Certificate,
) -> bool {
    let value = eval_with_foci(space, spec.alphas(), composite_foci, composite_point);
    cert.direction.holds(value, cert.bound, slack(cert.bound))
}

/// Per-focus brackets on `‖z + y − xᵢ‖` built from `d = z − xᵢ`.
pub fn delta_estimates(space: &GramSpace, spec: &LocusSpec, z: &Vector, y: &Vector) -> Result<DeltaEstimates> {
    space.check(z)?;
    space.check(y)?;
    spec.check(space)?;
    let per_focus = spec
        .foci()
        .iter()
        .enumerate()
        .map(|(i, f)| FocusEstimate::from_offsets(space, &(z - f), y).ok_or(Error::FocusCoincidence(i)))
        .collect::<Result<_>>()?;
    Ok(DeltaEstimates { per_focus })
}

fn require_member(space: &GramSpace, spec: &LocusSpec, x: &Vector, tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let residual = eval_with_foci(space, spec.alphas(), spec.foci(), x) - spec.c();
    if residual.abs() > tol {
        return Err(Error::NotAMember { residual, tol });
    }
    Ok(())
}

/// Condition values of the four cases, in order.
fn four_conditions(alphas: &[f64], est: &[FocusEstimate], lead_upper: f64, lead_lower: f64) -> [f64; 4] {
    // low_side: Σ⁺ α·proj + Σ⁻ α·hyp  (≤ Σα‖d+y‖)
    // high_side: Σ⁺ α·hyp + Σ⁻ α·proj  (≥ Σα‖d+y‖)
    let (mut low_side, mut high_side) = (0.0, 0.0);
    for (&a, e) in alphas.iter().zip(est) {
        if a > 0.0 {
            low_side += a * e.proj;
            high_side += a * e.hyp;
        } else {
            low_side += a * e.hyp;
            high_side += a * e.proj;
        }
    }
    [lead_upper - low_side, lead_upper - high_side, lead_lower + low_side, lead_lower + high_side]
}

fn fires(case_id: u8, value: f64) -> bool {
    match case_id {
        1 | 4 => value < 0.0,
        _ => value > 0.0,
    }
}

struct Composite {
    point: Vector,
    foci: Vec<Vector>,
}

fn build(
    theorem: Theorem,
    conditions: &[f64],
    claims: &[(Direction, f64)],
    composite: Composite,
    negative_projection: bool,
    suspect_case: Option<u8>,
) -> Vec<Certificate> {
    conditions
        .iter()
        .zip(claims)
        .enumerate()
        .map(|(k, (&value, &(direction, bound)))| {
            let case_id = k as u8 + 1;
            Certificate {
                theorem,
                case_id,
                condition_value: value,
                direction,
                bound,
                fired: fires(case_id, value),
                negative_projection,
                suspect_direction: suspect_case == Some(case_id),
                composite_point: composite.point.clone(),
                composite_foci: composite.foci.clone(),
            }
        })
        .collect()
}

/// Certificates for `z + y`, where `z` is a member and `y` is arbitrary.
///
/// Lead terms: `A = c + (Σα)‖y‖`, `B = (Σα)‖y‖ − c`. Bounds:
/// `c + (Σα)‖y‖` for cases 1–2 and `c − (Σα)‖y‖` for cases 3–4.
/// The composite is `z + y` against the original foci.
pub fn certify_add_vector(
    space: &GramSpace,
    spec: &LocusSpec,
    z: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<Vec<Certificate>> {
    let est = delta_estimates(space, spec, z, y)?;
    require_member(space, spec, z, tol)?;
    let shift = spec.alpha_sum() * space.norm(y)?;
    let c = spec.c();
    let conditions = four_conditions(spec.alphas(), &est.per_focus, c + shift, shift - c);
    let claims = [
        (Direction::Geq, c + shift),
        (Direction::Leq, c + shift),
        (Direction::Geq, c - shift),
        (Direction::Leq, c - shift),
    ];
    let composite = Composite { point: z + y, foci: spec.foci().to_vec() };
    Ok(build(Theorem::AddVector, &conditions, &claims, composite, est.any_negative_projection(), None))
}

/// Certificates for `v + w`, both members, against the doubled foci `2xᵢ`.
///
/// Per focus the displacement is `w − xᵢ`, so the sum of `αᵢ‖w − xᵢ‖`
/// collapses to `c`: `A = 2c`, `B = 0`, bounds `2c` (cases 1–2) and `0`
/// (cases 3–4).
///
/// Case 4 is issued with the direction `≥ 0` as traditionally stated and
/// carries `suspect_direction`: its condition actually forces `g ≤ 0`
/// (see [`Certificate::audit_alternate`]).
pub fn certify_add_members(
    space: &GramSpace,
    spec: &LocusSpec,
    v: &Vector,
    w: &Vector,
    tol: f64,
) -> Result<Vec<Certificate>> {
    space.check(v)?;
    space.check(w)?;
    spec.check(space)?;
    let mut est = Vec::with_capacity(spec.foci().len());
    for (i, f) in spec.foci().iter().enumerate() {
        est.push(FocusEstimate::from_offsets(space, &(v - f), &(w - f)).ok_or(Error::FocusCoincidence(i))?);
    }
    require_member(space, spec, v, tol)?;
    require_member(space, spec, w, tol)?;

    let c = spec.c();
    let conditions = four_conditions(spec.alphas(), &est, 2.0 * c, 0.0);
    let claims = [(Direction::Geq, 2.0 * c), (Direction::Leq, 2.0 * c), (Direction::Geq, 0.0), (Direction::Geq, 0.0)];
    let composite = Composite { point: v + w, foci: spec.scale_foci(2.0).foci().to_vec() };
    let negative = est.iter().any(|e| e.negative_projection);
    Ok(build(Theorem::AddMembers, &conditions, &claims, composite, negative, Some(4)))
}

/// Certificates for `γv + βw` with members `v`, `w` and `γ, β ≥ 0`,
/// against the foci `(γ + β)xᵢ`.
///
/// Offsets are `γ(v − xᵢ)` and displacements `β(w − xᵢ)`.
/// `A = (γ + β)c`, `B = (β − γ)c`, bounds `(γ + β)c` and `(γ − β)c`.
/// With `γ = 0` the offset vanishes and the exact length `‖β(w − xᵢ)‖`
/// replaces both estimates.
#[allow(clippy::too_many_arguments)]
pub fn certify_linear_combo(
    space: &GramSpace,
    spec: &LocusSpec,
    v: &Vector,
    w: &Vector,
    gamma: f64,
    beta: f64,
    tol: f64,
) -> Result<Vec<Certificate>> {
    for k in [gamma, beta] {
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("coefficient must be finite, got {k}")));
        }
        if k < 0.0 {
            return Err(Error::NegativeCoefficient(k));
        }
    }
    space.check(v)?;
    space.check(w)?;
    spec.check(space)?;
    let mut est = Vec::with_capacity(spec.foci().len());
    for (i, f) in spec.foci().iter().enumerate() {
        let y = (w - f).scale(beta);
        let e = if gamma == 0.0 {
            FocusEstimate::exact(space, &y)
        } else {
            FocusEstimate::from_offsets(space, &(v - f).scale(gamma), &y).ok_or(Error::FocusCoincidence(i))?
        };
        est.push(e);
    }
    require_member(space, spec, v, tol)?;
    require_member(space, spec, w, tol)?;

    let c = spec.c();
    let conditions = four_conditions(spec.alphas(), &est, (gamma + beta) * c, (beta - gamma) * c);
    let claims = [
        (Direction::Geq, (gamma + beta) * c),
        (Direction::Leq, (gamma + beta) * c),
        (Direction::Geq, (gamma - beta) * c),
        (Direction::Leq, (gamma - beta) * c),
    ];
    let composite =
        Composite { point: &v.scale(gamma) + &w.scale(beta), foci: spec.scale_foci(gamma + beta).foci().to_vec() };
    let negative = est.iter().any(|e| e.negative_projection);
    Ok(build(Theorem::LinearCombo, &conditions, &claims, composite, negative, None))
}

/// Bracket `(lower, upper)` on `‖Σβⱼvⱼ − (Σβⱼ)x‖` for one focus `x`.
///
/// With `aⱼ = βⱼ(vⱼ − x)` and tails `tⱼ = aⱼ + … + aₘ`, peeling one term at
/// a time gives `‖tⱼ‖² = ‖tⱼ₊₁‖² sin²θⱼ + Pⱼ` where
/// `Pⱼ = (‖aⱼ‖² + ⟨tⱼ₊₁, aⱼ⟩)² / ‖aⱼ‖²`. Hence
///
/// ```text
/// √P₁  ≤  ‖t₁‖  ≤  √Υ,   Υ = P₁ + … + Pₘ₋₁ + ‖aₘ‖²
/// ```
///
/// The lower bound is taken as `|‖a₁‖² + ⟨t₂, a₁⟩| / ‖a₁‖ = √P₁`.
pub fn combo_bracket(space: &GramSpace, vs: &[Vector], betas: &[f64], focus: &Vector) -> Result<(f64, f64)> {
    combo_bracket_at(space, vs, betas, focus, 0)
}

fn combo_bracket_at(
    space: &GramSpace,
    vs: &[Vector],
    betas: &[f64],
    focus: &Vector,
    focus_index: usize,
) -> Result<(f64, f64)> {
    let m = vs.len();
    let offsets: Vec<Vector> = vs.iter().zip(betas).map(|(v, &b)| (v - focus).scale(b)).collect();
    // tails[j] = offsets[j] + ... + offsets[m-1]; tails[m] = 0
    let mut tails = vec![Vector::zeros(focus.dim()); m + 1];
    for j in (0..m).rev() {
        tails[j] = &tails[j + 1] + &offsets[j];
    }

    let mut upsilon = 0.0;
    let mut lower = 0.0;
    for j in 0..m {
        let a = offsets[j].coords();
        let a_sq = space.quad(a, a).max(0.0);
        if j + 1 == m && m > 1 {
            upsilon += a_sq;
            break;
        }
        if a_sq == 0.0 {
            return Err(Error::ZeroTailVector { index: j, focus: focus_index });
        }
        let lead = a_sq + space.quad(tails[j + 1].coords(), a);
        upsilon += lead * lead / a_sq;
        if j == 0 {
            lower = lead.abs() / a_sq.sqrt();
        }
    }
    Ok((lower, upsilon.sqrt()))
}

/// `‖Σβⱼvⱼ − (Σβⱼ)x‖²` expanded over pairs:
/// `Σᵢ≤ⱼ C(2, d) βᵢβⱼ ⟨vᵢ − x, vⱼ − x⟩` with `d = 0` on the diagonal and
/// `d = 1` off it.
pub fn combo_norm_sq_expansion(space: &GramSpace, vs: &[Vector], betas: &[f64], focus: &Vector) -> Result<f64> {
    if vs.len() != betas.len() {
        return Err(Error::CoefficientCount { foci: vs.len(), alphas: betas.len() });
    }
    space.check(focus)?;
    let offsets: Vec<Vector> = vs.iter().map(|v| space.check(v).map(|_| v - focus)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..offsets.len() {
        for j in i..offsets.len() {
            let binom = if i == j { 1.0 } else { 2.0 };
            total += binom * betas[i] * betas[j] * space.quad(offsets[i].coords(), offsets[j].coords());
        }
    }
    Ok(total)
}

/// Certificates for `Σβⱼvⱼ` with members `vⱼ` and `βⱼ > 0`, against the
/// foci `(Σβⱼ)xᵢ`.
///
/// Uses the [`combo_bracket`] per focus. Two cases, both with lead term
/// `(Σβⱼ)c` and bound `(Σβⱼ)c`: case 1 (`< 0` ⇒ `≥`) and case 2 (`> 0` ⇒ `≤`).
/// With two vectors the condition values coincide with
/// [`certify_linear_combo`]'s cases 1 and 2.
pub fn certify_multi_combo(
    space: &GramSpace,
    spec: &LocusSpec,
    vs: &[Vector],
    betas: &[f64],
    tol: f64,
) -> Result<Vec<Certificate>> {
    if vs.is_empty() {
        return Err(Error::InvalidParameter("at least one vector is needed".into()));
    }
    if vs.len() != betas.len() {
        return Err(Error::CoefficientCount { foci: vs.len(), alphas: betas.len() });
    }
    if let Some(&b) = betas.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
        return Err(Error::NonPositiveCoefficient(b));
    }
    spec.check(space)?;
    for v in vs {
        space.check(v)?;
    }
    let brackets = spec
        .foci()
        .iter()
        .enumerate()
        .map(|(i, f)| combo_bracket_at(space, vs, betas, f, i))
        .collect::<Result<Vec<_>>>()?;
    for v in vs {
        require_member(space, spec, v, tol)?;
    }

    let total: f64 = betas.iter().sum();
    let lead = total * spec.c();
    let est: Vec<FocusEstimate> =
        brackets.iter().map(|&(proj, hyp)| FocusEstimate { proj, hyp, negative_projection: false }).collect();
    let [case1, case2, _, _] = four_conditions(spec.alphas(), &est, lead, 0.0);
    let point = vs.iter().zip(betas).fold(Vector::zeros(spec.dim()), |acc, (v, &b)| &acc + &v.scale(b));
    let composite = Composite { point, foci: spec.scale_foci(total).foci().to_vec() };
    Ok(build(
        Theorem::MultiCombo,
        &[case1, case2],
        &[(Direction::Geq, lead), (Direction::Leq, lead)],
        composite,
        false,
        None,
    ))
}
