//! Loci defined by weighted sums of distances in real inner product spaces.
//!
//! Given foci `x₁, …, xₙ`, nonzero weights `α₁, …, αₙ` and a level `c`, the
//! locus is the set of points `x` with
//!
//! ```text
//! g(x) = α₁‖x − x₁‖ + … + αₙ‖x − xₙ‖ = c
//! ```
//!
//! where the norm comes from an arbitrary inner product. Ellipses, hyperbola
//! branches, perpendicular bisectors and circles are the familiar planar
//! cases; the same definition works for polynomials, matrices or any other
//! finite-dimensional space once its inner product is written down as a
//! Gram matrix.
//!
//! The crate is organised as:
//!
//! * [`space`]: Gram-matrix spaces, vectors, inner products and norms.
//! * [`triangle`]: cosine law, sine law and the length-of-sum bracket.
//! * [`locus`]: locus definitions, evaluation, membership and ray solving.
//! * [`certify`]: certificates bounding `g` at sums and combinations of members.
//! * [`transport`]: Gram matrices from abstract bases (integrals, traces, tables).
//! * [`trace`]: marching-squares tracing of planar loci, SVG and CSV output.
//! * [`reference`]: worked examples with known answers.
//! * [`sample`]: seeded random instances and a certificate soundness sweep.
//!
//! ```
//! use loci::{eval_g, GramSpace, LocusSpec, Vector};
//!
//! let plane = GramSpace::euclidean(2);
//! let ellipse = LocusSpec::new(
//!     vec![Vector::from([4.0, 0.0]), Vector::from([-4.0, 0.0])],
//!     vec![1.0, 1.0],
//!     10.0,
//! )?;
//! assert_eq!(eval_g(&plane, &ellipse, &Vector::from([0.0, 3.0]))?, 10.0);
//! # Ok::<(), loci::Error>(())
//! ```

// `!(x > 0.0)` rejects NaN along with non-positive values, and matrix code reads best with indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod certify;
pub mod error;
mod io;
pub mod locus;
pub mod reference;
pub mod sample;
pub mod space;
pub mod trace;
pub mod transport;
pub mod triangle;

pub use certify::{
    audit_certificate, certify_add_members, certify_add_vector, certify_linear_combo, certify_multi_combo,
    delta_estimates, Certificate, DeltaEstimates, Direction, Theorem,
};
pub use error::{Error, Result};
pub use locus::{eval_g, is_member, solve_on_ray, LocusFile, LocusSpec};
pub use space::{GramSpace, SpaceFile, Vector};
pub use trace::{emit_csv, emit_svg, trace_locus, Polyline, Window};
pub use transport::{gram_from_basis, poly_coords, transport_locus, BasisOracle};

// The guide's code samples are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/inner-spaces.md")]
    mod inner_spaces {}
    #[doc = include_str!("../../../book/src/triangles.md")]
    mod triangles {}
    #[doc = include_str!("../../../book/src/loci.md")]
    mod loci {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/tracing.md")]
    mod tracing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
