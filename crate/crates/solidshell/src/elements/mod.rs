//! Solid-shell element formulations and their stiffness matrices.
//!
//! Four variants share one kinematic pipeline:
//!
//! - `Std`: k_e = int B^T D B, the plain displacement element.
//! - `Curv`: k_e = int B~^T D~ B~ in the covariant frame; equals `Std` up
//!   to round-off (pure change of frame).
//! - `SsAns`: covariant strain rows replaced by their element-local L2
//!   projections onto per-component reduced spaces before integration.
//! - `Ss`: Cartesian basis-function derivatives replaced by their
//!   projections onto one reduced space; needs no local frame at all.
//!
//! All variants integrate on the same full (p+1)^3 tensor Gauss rule; the
//! projected ones only reuse the point values already computed there.

mod bmatrix;
mod kinematics;
mod material;

pub use bmatrix::{
    b_cartesian, b_curvilinear, b_projected_cartesian, b_projected_curvilinear,
    curvilinear_material,
};
pub use kinematics::{element_grid, strain_frame_matrix, ElementKinematics, ElementRef, QuadPoint};
pub use material::{material_matrix, ElasticityMatrix};

use nalgebra::DMatrix;

use crate::projection::ProjectorSet;
use crate::{Error, Result};

/// Element formulation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// Standard Cartesian displacement element.
    Std,
    /// Covariant-frame variant of the standard element.
    Curv,
    /// Per-component covariant strain projections.
    SsAns,
    /// Single projection of all Cartesian derivatives.
    Ss,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::Std,
        Formulation::Curv,
        Formulation::SsAns,
        Formulation::Ss,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Formulation::Std => "std",
            Formulation::Curv => "curv",
            Formulation::SsAns => "ss_ans",
            Formulation::Ss => "ss",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" | "standard" => Some(Formulation::Std),
            "curv" | "curvilinear" => Some(Formulation::Curv),
            "ss_ans" | "ssans" | "ss-ans" => Some(Formulation::SsAns),
            "ss" => Some(Formulation::Ss),
            _ => None,
        }
    }

    pub fn needs_projectors(&self) -> bool {
        matches!(self, Formulation::SsAns | Formulation::Ss)
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Element stiffness matrix for the chosen formulation.
///
/// The column-to-DOF mapping is [`ElementKinematics::global_dofs`];
/// `projectors` is required for the projected formulations and must match
/// the element degree.
pub fn stiffness(
    formulation: Formulation,
    kin: &ElementKinematics,
    material: &ElasticityMatrix,
    projectors: Option<&ProjectorSet>,
) -> Result<DMatrix<f64>> {
    let n_dofs = 3 * kin.n_e();
    let mut k = DMatrix::zeros(n_dofs, n_dofs);
    let d = material.matrix();

    match formulation {
        Formulation::Std => {
            for qp in &kin.points {
                let b = b_cartesian(qp);
                accumulate(
                    &mut k,
                    &b,
                    &DMatrix::from_fn(6, 6, |i, j| d[(i, j)]),
                    qp.weight,
                );
            }
        }
        Formulation::Curv => {
            for qp in &kin.points {
                let b = b_curvilinear(qp);
                let dt = curvilinear_material(qp, d)?;
                accumulate(
                    &mut k,
                    &b,
                    &DMatrix::from_fn(6, 6, |i, j| dt[(i, j)]),
                    qp.weight,
                );
            }
        }
        Formulation::SsAns => {
            let projectors = require_projectors(projectors)?;
            let stack = b_projected_curvilinear(kin, projectors)?;
            for (qp, b) in kin.points.iter().zip(&stack) {
                let dt = curvilinear_material(qp, d)?;
                accumulate(
                    &mut k,
                    b,
                    &DMatrix::from_fn(6, 6, |i, j| dt[(i, j)]),
                    qp.weight,
                );
            }
        }
        Formulation::Ss => {
            let projectors = require_projectors(projectors)?;
            let stack = b_projected_cartesian(kin, &projectors.comp_12)?;
            let d_dyn = DMatrix::from_fn(6, 6, |i, j| d[(i, j)]);
            for (qp, b) in kin.points.iter().zip(&stack) {
                accumulate(&mut k, b, &d_dyn, qp.weight);
            }
        }
    }

    Ok(k)
}

fn require_projectors(projectors: Option<&ProjectorSet>) -> Result<&ProjectorSet> {
    projectors
        .ok_or_else(|| Error::InvalidPatch("projected formulation requires a projector set".into()))
}

/// k += w * B^T (D B).
fn accumulate(k: &mut DMatrix<f64>, b: &DMatrix<f64>, d: &DMatrix<f64>, w: f64) {
    let db = d * b;
    k.gemm_tr(w, b, &db, 1.0);
}
