//! Worked examples with known answers, embedded as data.
//!
//! Each [`Check`] compares one computed quantity with an expected value or
//! a bound. [`all_checks`] runs the whole set; the CLI's `verify-paper`
//! command prints it as a table.

use std::f64::consts::PI;

use serde::Serialize;

use crate::certify::{certify_add_members, certify_add_vector, certify_linear_combo, Certificate};
use crate::error::Result;
use crate::locus::{eval_g, LocusSpec};
use crate::space::{GramSpace, Vector};
use crate::trace::{trace_locus, Polyline, Window};
use crate::transport::{gram_from_basis, poly_coords, BasisOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed - expected| ≤ tol`
    Approx,
    /// `computed ≤ expected`
    AtMost,
    /// `computed ≥ expected`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Group number of the example set this check belongs to.
    pub group: u8,
    pub id: String,
    pub description: String,
    pub computed: f64,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    fn new(group: u8, id: &str, description: &str, computed: f64, expected: f64, tol: f64, relation: Relation) -> Self {
        let pass = match relation {
            Relation::Approx => (computed - expected).abs() <= tol,
            Relation::AtMost => computed <= expected + tol,
            Relation::AtLeast => computed >= expected - tol,
        };
        Self { group, id: id.into(), description: description.into(), computed, expected, tol, relation, pass }
    }

    fn approx(group: u8, id: &str, description: &str, computed: f64, expected: f64, tol: f64) -> Self {
        Self::new(group, id, description, computed, expected, tol, Relation::Approx)
    }

    fn flag(group: u8, id: &str, description: &str, ok: bool) -> Self {
        Self::new(group, id, description, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, Relation::Approx)
    }
}

/// Quadratic polynomials with `<f, g> = ∫₀¹ f g`, the locus
/// `‖p + x‖ - ‖p - x‖ = 1/2`, and its member `3x + √65/12 - 13/6`.
pub struct QuadraticExample {
    pub space: GramSpace,
    pub spec: LocusSpec,
    pub z: Vector,
    /// The displacement `x²`.
    pub y: Vector,
}

pub fn quadratic_example() -> Result<QuadraticExample> {
    let space = gram_from_basis(&BasisOracle::poly_integral(0.0, 1.0, 1.0, 3))?;
    let spec = LocusSpec::new(vec![poly_coords(&[0.0, -1.0], 3)?, poly_coords(&[0.0, 1.0], 3)?], vec![1.0, -1.0], 0.5)?;
    let z = poly_coords(&[65f64.sqrt() / 12.0 - 13.0 / 6.0, 3.0], 3)?;
    let y = poly_coords(&[0.0, 0.0, 1.0], 3)?;
    Ok(QuadraticExample { space, spec, z, y })
}

/// Three foci in `R³` with unit weights and level 15, and two approximate members.
pub struct SpatialExample {
    pub space: GramSpace,
    pub spec: LocusSpec,
    pub v: Vector,
    pub w: Vector,
}

pub fn spatial_example() -> Result<SpatialExample> {
    let spec = LocusSpec::new(
        vec![Vector::from([2.0, 3.0, -1.0]), Vector::from([-1.0, 3.0, -4.0]), Vector::from([0.0, 0.0, 3.0])],
        vec![1.0, 1.0, 1.0],
        15.0,
    )?;
    Ok(SpatialExample {
        space: GramSpace::euclidean(3),
        spec,
        v: Vector::from([3.8945, 1.0, -2.0]),
        w: Vector::from([1.0, 2.0, -5.001]),
    })
}

/// Linear polynomials with `<f, g> = (1/2π) ∫₀^{2π} f g`, the locus
/// `2‖p - x‖ - ‖p + 2x‖ = 4`, and two approximate members
/// `7.9x - 19.3545` and `3x + 7.9104`.
pub struct LinearExample {
    pub space: GramSpace,
    pub spec: LocusSpec,
    pub v: Vector,
    pub w: Vector,
    pub gamma: f64,
    pub beta: f64,
}

pub fn linear_example() -> Result<LinearExample> {
    let space = gram_from_basis(&periodic_oracle())?;
    let spec = LocusSpec::new(vec![poly_coords(&[0.0, 1.0], 2)?, poly_coords(&[0.0, -2.0], 2)?], vec![2.0, -1.0], 4.0)?;
    Ok(LinearExample {
        space,
        spec,
        v: poly_coords(&[-19.3545, 7.9], 2)?,
        w: poly_coords(&[7.9104, 3.0], 2)?,
        gamma: 2.0,
        beta: 3.0,
    })
}

fn periodic_oracle() -> BasisOracle {
    BasisOracle::poly_integral(0.0, 2.0 * PI, 1.0 / (2.0 * PI), 2)
}

/// The ellipse with foci `(±4, 0)` and major semi-axis 5.
pub fn ellipse() -> LocusSpec {
    LocusSpec::new(vec![Vector::from([4.0, 0.0]), Vector::from([-4.0, 0.0])], vec![1.0, 1.0], 10.0)
        .expect("valid ellipse")
}

pub fn ellipse_window() -> Window {
    Window::new(-8.0, 8.0, -6.0, 6.0, 512, 512).expect("valid window")
}

fn case(certs: &[Certificate], id: u8) -> &Certificate {
    &certs[usize::from(id) - 1]
}

fn group_membership() -> Result<Vec<Check>> {
    let ex = quadratic_example()?;
    let g = eval_g(&ex.space, &ex.spec, &ex.z)?;
    Ok(vec![Check::approx(1, "1", "quadratic example: g(z) = 1/2", g, 0.5, 1e-6)])
}

fn group_add_vector() -> Result<Vec<Check>> {
    let ex = quadratic_example()?;
    let s = &ex.space;
    let (lead_minus, lead_plus) = (&ex.z - &ex.spec.foci()[0], &ex.z - &ex.spec.foci()[1]);
    let certs = certify_add_vector(s, &ex.spec, &ex.z, &ex.y, 1e-6)?;
    let c1 = case(&certs, 1);
    let composite = c1.composite_value(s, &ex.spec);
    Ok(vec![
        Check::approx(2, "2a", "quadratic example: <z + x, x^2>", s.inner(&lead_minus, &ex.y)?, 0.501, 1e-3),
        Check::approx(2, "2b", "quadratic example: <z - x, x^2>", s.inner(&lead_plus, &ex.y)?, 0.002, 1e-3),
        Check::approx(2, "2c", "add-vector case 1 condition", c1.condition_value, -0.2990, 5e-3),
        Check::flag(2, "2d", "add-vector case 1 fires (condition < 0)", c1.fired),
        Check::approx(2, "2e", "g(z + x^2)", composite, 0.7868, 1e-3),
        Check::new(2, "2f", "g(z + x^2) >= 1/2", composite, 0.5, 0.0, Relation::AtLeast),
    ])
}

fn group_add_members() -> Result<Vec<Check>> {
    let ex = spatial_example()?;
    let s = &ex.space;
    let mut checks = Vec::new();
    for (k, (f, expected)) in ex.spec.foci().iter().zip([4.1065, 9.787, 45.8995]).enumerate() {
        let ip = s.inner(&(&ex.v - f), &(&ex.w - f))?;
        let id = format!("3{}", ['a', 'b', 'c'][k]);
        checks.push(Check::approx(3, &id, &format!("R^3 example: <v - x{0}, w - x{0}>", k + 1), ip, expected, 5e-3));
    }
    let certs = certify_add_members(s, &ex.spec, &ex.v, &ex.w, 5e-3)?;
    let c2 = case(&certs, 2);
    let composite = c2.composite_value(s, &ex.spec);
    checks.extend([
        Check::approx(3, "3d", "add-members case 2 condition", c2.condition_value, 0.2449, 5e-2),
        Check::flag(3, "3e", "add-members case 2 fires and audits", c2.fired && c2.audit(s, &ex.spec)),
        Check::approx(3, "3f", "g(v + w) against doubled foci", composite, 27.6970, 1e-2),
        Check::new(3, "3g", "g(v + w) <= 30", composite, 30.0, 0.0, Relation::AtMost),
    ]);
    Ok(checks)
}

fn group_linear_combo() -> Result<Vec<Check>> {
    let ex = linear_example()?;
    let s = &ex.space;
    let mut checks = Vec::new();
    for (id, p) in [("4a", &ex.v), ("4b", &ex.w)] {
        let g = eval_g(s, &ex.spec, p)?;
        checks.push(Check::approx(4, id, &format!("linear example: g({p}) = 4"), g, 4.0, 5e-3));
    }
    for (k, (f, expected)) in ex.spec.foci().iter().zip([470.1877, 2641.7982]).enumerate() {
        let ip = s.inner(&(&ex.v - f).scale(ex.gamma), &(&ex.w - f).scale(ex.beta))?;
        let id = format!("4{}", ['c', 'd'][k]);
        checks.push(Check::approx(
            4,
            &id,
            &format!("linear example: <2(v - x{0}), 3(w - x{0})>", k + 1),
            ip,
            expected,
            0.5,
        ));
    }
    let certs = certify_linear_combo(s, &ex.spec, &ex.v, &ex.w, ex.gamma, ex.beta, 5e-3)?;
    let c2 = case(&certs, 2);
    let composite = c2.composite_value(s, &ex.spec);
    checks.extend([
        Check::approx(4, "4e", "linear-combo case 2 condition", c2.condition_value, 0.1973, 5e-2),
        Check::flag(4, "4f", "linear-combo case 2 fires and audits", c2.fired && c2.audit(s, &ex.spec)),
        Check::approx(4, "4g", "g(2v + 3w) against foci scaled by 5", composite, 5.1431, 1e-2),
        Check::new(4, "4h", "g(2v + 3w) <= 20", composite, 20.0, 0.0, Relation::AtMost),
    ]);
    Ok(checks)
}

fn group_transport() -> Result<Vec<Check>> {
    let unit = gram_from_basis(&BasisOracle::poly_integral(0.0, 1.0, 1.0, 2))?;
    let periodic = gram_from_basis(&periodic_oracle())?;
    let trace = gram_from_basis(&BasisOracle::matrix_trace(2, 1))?;
    let max_abs_err = |s: &GramSpace, want: [[f64; 2]; 2], relative: bool| {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let e = (s.entry(i, j) - want[i][j]).abs();
                worst = worst.max(if relative { e / want[i][j].abs() } else { e });
            }
        }
        worst
    };
    Ok(vec![
        Check::approx(
            5,
            "5a",
            "Gram of [0,1] integral, max abs error",
            max_abs_err(&unit, [[1.0, 0.5], [0.5, 1.0 / 3.0]], false),
            0.0,
            1e-12,
        ),
        Check::approx(
            5,
            "5b",
            "Gram of [0,2pi]/(2pi) integral, max rel error",
            max_abs_err(&periodic, [[1.0, PI], [PI, 4.0 * PI * PI / 3.0]], true),
            0.0,
            1e-12,
        ),
        Check::approx(
            5,
            "5c",
            "Gram of 2x1 trace product, max abs error",
            max_abs_err(&trace, [[1.0, 0.0], [0.0, 1.0]], false),
            0.0,
            0.0,
        ),
    ])
}

fn group_hyperbola() -> Result<Vec<Check>> {
    let spec = LocusSpec::new(vec![Vector::from([2.0, 0.0]), Vector::from([-2.0, 0.0])], vec![1.0, -1.0], 2.0)?;
    let g = eval_g(&GramSpace::euclidean(2), &spec, &Vector::from([-2.0, -3.0]))?;
    Ok(vec![Check::approx(6, "6", "hyperbola: g(-2, -3)", g, 2.0, 1e-12)])
}

/// Smallest distance from `p` to any vertex of `lines`.
pub fn distance_to_trace(lines: &[Polyline], p: [f64; 2]) -> f64 {
    lines.iter().flat_map(|l| &l.points).map(|q| (q[0] - p[0]).hypot(q[1] - p[1])).fold(f64::INFINITY, f64::min)
}

fn group_trace() -> Result<Vec<Check>> {
    let space = GramSpace::euclidean(2);
    let window = ellipse_window();
    let lines = trace_locus(&space, &ellipse(), &window)?;
    let diag = window.cell_diagonal(&space);
    let mut checks =
        vec![Check::flag(7, "7a", "ellipse trace is one closed curve", lines.len() == 1 && lines[0].closed)];
    for (id, p) in [("7b", [5.0, 0.0]), ("7c", [-5.0, 0.0]), ("7d", [0.0, 3.0]), ("7e", [0.0, -3.0])] {
        checks.push(Check::new(
            7,
            id,
            &format!("ellipse trace passes near ({}, {})", p[0], p[1]),
            distance_to_trace(&lines, p),
            diag,
            0.0,
            Relation::AtMost,
        ));
    }
    Ok(checks)
}

/// Every built-in check, grouped and in order.
pub fn all_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for group in [
        group_membership,
        group_add_vector,
        group_add_members,
        group_linear_combo,
        group_transport,
        group_hyperbola,
        group_trace,
    ] {
        out.extend(group()?);
    }
    Ok(out)
}
