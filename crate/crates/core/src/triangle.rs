//! Cosine law, sine law and the length-of-sum formula in an arbitrary real
//! inner product space, plus the bracket on `||x + y||` obtained by bounding
//! the `sin^2` term of the length-of-sum formula between 0 and 1.

use crate::error::{Error, Result};
use crate::space::{GramSpace, Vector};

/// `sin^2` below this makes [`sine_law_ratios`] report a degenerate triangle.
pub const DEGENERATE_SIN_SQ: f64 = 1e-14;

/// `||x||^2 + ||y||^2 + 2 ||x|| ||y|| cos(theta)`, which equals `||x + y||^2`.
pub fn cosine_law_norm_sq(space: &GramSpace, x: &Vector, y: &Vector) -> Result<f64> {
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    let cos = space.cos_angle(x, y)?;
    Ok(nx * nx + ny * ny + 2.0 * nx * ny * cos)
}

/// `sin` of the angle between `u` and `v`, as `‖u − ⟨u,v⟩/‖v‖² · v‖ / ‖u‖`.
///
/// Equal to `sqrt(1 − cos²)` but keeps its relative accuracy for small
/// angles, where `1 − cos²` cancels.
fn sin_between(space: &GramSpace, u: &Vector, v: &Vector) -> Result<f64> {
    let (uu, vv) = (space.norm_sq(u)?, space.norm_sq(v)?);
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let rejection = u.along(v, -space.inner(u, v)? / vv);
    let sin_sq = (space.norm_sq(&rejection)? / uu).min(1.0);
    if sin_sq < DEGENERATE_SIN_SQ {
        return Err(Error::DegenerateTriangle);
    }
    Ok(sin_sq.sqrt())
}

/// The three side/sine ratios of the triangle with sides `x`, `y`, `x + y`.
///
/// The angles are those between pairs of the side vectors, i.e. `arccos`
/// of their normalized inner products. Those are the supplements of the
/// interior angles, which have the same sine, so all three ratios agree.
pub fn sine_law_ratios(space: &GramSpace, x: &Vector, y: &Vector) -> Result<(f64, f64, f64)> {
    space.check(x)?;
    space.check(y)?;
    let s = x + y;
    let (nx, ny, ns) = (space.norm(x)?, space.norm(y)?, space.norm(&s)?);
    if nx == 0.0 || ny == 0.0 || ns == 0.0 {
        return Err(Error::ZeroVector);
    }
    let opposite_x = sin_between(space, y, &s)?;
    let opposite_y = sin_between(space, x, &s)?;
    let opposite_s = sin_between(space, x, y)?;
    Ok((nx / opposite_x, ny / opposite_y, ns / opposite_s))
}

/// `||y||^2 sin^2(theta) + (||x||^2 + <x,y>)^2 / ||x||^2`, another
/// expression for `||x + y||^2`.
///
/// A zero `y` contributes nothing to the first term, so only `x` has to be
/// nonzero.
pub fn sum_length_sq(space: &GramSpace, x: &Vector, y: &Vector) -> Result<f64> {
    let nx_sq = space.norm_sq(x)?;
    if nx_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ny_sq = space.norm_sq(y)?;
    let ip = space.inner(x, y)?;
    let sin_sq_term = if ny_sq == 0.0 {
        0.0
    } else {
        let cos = space.cos_angle(x, y)?;
        ny_sq * (1.0 - cos * cos).max(0.0)
    };
    let lead = nx_sq + ip;
    Ok(sin_sq_term + lead * lead / nx_sq)
}

/// Bracket `(lower, upper)` around `||x + y||`.
///
/// `lower = |‖x‖² + ⟨x,y⟩| / ‖x‖` and
/// `upper = sqrt(‖y‖² + (‖x‖² + ⟨x,y⟩)² / ‖x‖²)`.
pub fn sum_length_bounds(space: &GramSpace, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
    let nx_sq = space.norm_sq(x)?;
    if nx_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(bounds_from_parts(nx_sq, space.norm_sq(y)?, space.inner(x, y)?))
}

/// The bracket from the raw quantities `‖x‖²`, `‖y‖²`, `⟨x,y⟩`. `nx_sq` must be positive.
pub(crate) fn bounds_from_parts(nx_sq: f64, ny_sq: f64, ip: f64) -> (f64, f64) {
    let lead = nx_sq + ip;
    let lower = lead.abs() / nx_sq.sqrt();
    let upper = (ny_sq + lead * lead / nx_sq).sqrt();
    (lower, upper)
}
