//! Volumes of central hyperplane sections of the regular simplex, computed
//! through the density at zero of weighted sums of centered exponentials.
//!
//! The main route integrates the characteristic function along the contour
//! where it is real and positive; the remaining estimators exist to check it.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
// Reference constants are kept at the precision they were computed to.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod charfun;
pub mod contour;
pub mod corpus;
pub mod density;
pub mod direction;
pub mod error;
pub mod quadrature;
pub mod verify;

pub use charfun::{eval_f, eval_phase_lift, eval_psi, tail_envelope};
pub use contour::{domain, eval_f_tilde, solve_y, ContourCase, ContourDomain, ContourSample};
pub use density::{
    density_contour, density_monte_carlo, density_partial_fractions, density_realaxis,
    residue_reference, section_volume, DensityEstimate, IntegrationConfig, Method,
};
pub use direction::{facet_direction, DirectionVector};
pub use error::{Error, Result};
pub use verify::VerificationReport;
