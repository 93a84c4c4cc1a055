//! Trivariate NURBS solid-shell elements for linear elasticity.
//!
//! Thin-walled structures meshed with a single solid element through the
//! thickness lock badly at low polynomial degrees. This crate implements two
//! remedies built on element-local L2 projections of strains onto coarser
//! polynomial spaces, alongside the standard Cartesian and curvilinear
//! formulations they derive from:
//!
//! - [`Formulation::Std`]: standard displacement-based solid element.
//! - [`Formulation::Curv`]: the same element expressed in the covariant
//!   (curvilinear) frame; algebraically identical stiffness.
//! - [`Formulation::SsAns`]: covariant strain components projected onto
//!   per-component reduced spaces (the spaces used by ANS tying schemes).
//! - [`Formulation::Ss`]: all Cartesian basis-function derivatives projected
//!   onto a single reduced space; no local frame needed.
//!
//! The [`benchmarks`] module builds the five classical verification problems
//! (straight/curved cantilever beams and the shell obstacle course) and runs
//! them for any formulation and degree.
//!
//! [`Formulation::Std`]: elements::Formulation::Std
//! [`Formulation::Curv`]: elements::Formulation::Curv
//! [`Formulation::SsAns`]: elements::Formulation::SsAns
//! [`Formulation::Ss`]: elements::Formulation::Ss

pub mod assembly;
pub mod benchmarks;
pub mod elements;
pub mod projection;
pub mod quadrature;
pub mod splines;

use thiserror::Error;

/// Errors produced by geometry construction, evaluation, and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnotVector(String),

    #[error("invalid patch: {0}")]
    InvalidPatch(String),

    #[error("parameter {value} outside domain [{min}, {max}] in direction {direction}")]
    OutsideDomain {
        value: f64,
        min: f64,
        max: f64,
        direction: usize,
    },

    #[error("singular geometry: det J = {det_j:e}{}", element_context(.element))]
    SingularGeometry { det_j: f64, element: Option<usize> },

    #[error("knot {0} cannot be inserted: {1}")]
    InvalidKnotInsertion(f64, String),

    #[error("quadrature point count {0} out of supported range 1..=16")]
    QuadratureOrder(usize),

    #[error("reduced space of dimension {dim} exceeds {n_q} quadrature samples")]
    UnderdeterminedProjection { dim: usize, n_q: usize },

    #[error("unsupported degree {0} for closed-form projector blocks (only p = 1, 2)")]
    NoClosedFormProjector(usize),

    #[error("projector built for degree {projector} applied to degree {element} element")]
    ProjectorDegreeMismatch { projector: usize, element: usize },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("sample vector of length {got} does not match {expected} quadrature points")]
    SampleLengthMismatch { got: usize, expected: usize },

    #[error(
        "stiffness matrix not positive definite: {zero_modes} mode(s) below the \
         zero-energy threshold (unconstrained mechanisms, or conditioning beyond \
         double precision)"
    )]
    SingularSystem { zero_modes: usize },

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("benchmark setup: {0}")]
    Benchmark(String),
}

fn element_context(element: &Option<usize>) -> String {
    match element {
        Some(e) => format!(" (element {e})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
