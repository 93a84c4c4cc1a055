//! Strain-displacement matrices for the four element formulations.
//!
//! Row order is Voigt (xx, yy, zz, xy, xz, yz) with engineering shear;
//! columns are function-major with three displacement components per basis
//! function.

use nalgebra::{DMatrix, Matrix6};

use super::kinematics::{ElementKinematics, QuadPoint};
use crate::projection::{ProjectionOperator, ProjectorSet};
use crate::{Error, Result};

/// Cartesian strain-displacement matrix at one quadrature point.
pub fn b_cartesian(qp: &QuadPoint) -> DMatrix<f64> {
    let n_e = qp.basis.values.len();
    let mut b = DMatrix::zeros(6, 3 * n_e);
    for (a, g) in qp.basis.grads_cart.iter().enumerate() {
        let c = 3 * a;
        b[(0, c)] = g.x;
        b[(1, c + 1)] = g.y;
        b[(2, c + 2)] = g.z;
        b[(3, c)] = g.y;
        b[(3, c + 1)] = g.x;
        b[(4, c)] = g.z;
        b[(4, c + 2)] = g.x;
        b[(5, c + 1)] = g.z;
        b[(5, c + 2)] = g.y;
    }
    b
}

/// Covariant strain-displacement matrix at one quadrature point, built
/// directly from parametric derivatives and the covariant base vectors
/// (independent of the algebraic identity B~ = R B).
pub fn b_curvilinear(qp: &QuadPoint) -> DMatrix<f64> {
    let n_e = qp.basis.values.len();
    let g = [
        qp.covariant_basis(0),
        qp.covariant_basis(1),
        qp.covariant_basis(2),
    ];
    let mut b = DMatrix::zeros(6, 3 * n_e);
    for (a, d) in qp.basis.grads_param.iter().enumerate() {
        let c = 3 * a;
        for x in 0..3 {
            b[(0, c + x)] = d[0] * g[0][x];
            b[(1, c + x)] = d[1] * g[1][x];
            b[(2, c + x)] = d[2] * g[2][x];
            b[(3, c + x)] = d[0] * g[1][x] + d[1] * g[0][x];
            b[(4, c + x)] = d[0] * g[2][x] + d[2] * g[0][x];
            b[(5, c + x)] = d[1] * g[2][x] + d[2] * g[1][x];
        }
    }
    b
}

/// Material matrix expressed in the covariant frame: D~ = R^-T D R^-1.
pub fn curvilinear_material(qp: &QuadPoint, d: &Matrix6<f64>) -> Result<Matrix6<f64>> {
    let r_inv = qp.r_matrix.try_inverse().ok_or(Error::SingularGeometry {
        det_j: qp.det_j,
        element: None,
    })?;
    Ok(r_inv.transpose() * d * r_inv)
}

fn check_projector_match(kin: &ElementKinematics, op: &ProjectionOperator) -> Result<usize> {
    let p = kin.degrees[0];
    if kin.degrees.iter().any(|&d| d != p) {
        return Err(Error::InvalidPatch(format!(
            "projected formulations require equal degrees, got {:?}",
            kin.degrees
        )));
    }
    if op.degree() != p {
        return Err(Error::ProjectorDegreeMismatch {
            projector: op.degree(),
            element: p,
        });
    }
    if op.n_q() != kin.n_q() {
        return Err(Error::SampleLengthMismatch {
            got: kin.n_q(),
            expected: op.n_q(),
        });
    }
    Ok(p)
}

/// Applies a projector to one row of a stack of per-point matrices: the
/// scalar entry (row, col) across all quadrature points is one sample
/// vector.
fn project_row(stack: &mut [DMatrix<f64>], row: usize, op: &ProjectionOperator) {
    let n_cols = stack[0].ncols();
    let n_q = stack.len();
    let mut samples = vec![0.0; n_q];
    let mut projected = vec![0.0; n_q];
    for col in 0..n_cols {
        for (q, m) in stack.iter().enumerate() {
            samples[q] = m[(row, col)];
        }
        op.apply_into(&samples, &mut projected);
        for (q, m) in stack.iter_mut().enumerate() {
            m[(row, col)] = projected[q];
        }
    }
}

/// Covariant strain-displacement matrices with the component-wise strain
/// projections applied, for every quadrature point of the element.
///
/// Row assignment: rows 0 (eps^11) and 4 (2 eps^13) through the 11
/// projector, rows 1 (eps^22) and 5 (2 eps^23) through the 22 projector,
/// row 3 (2 eps^12) through the 12 projector. Row 2 (eps^33) stays
/// unprojected.
pub fn b_projected_curvilinear(
    kin: &ElementKinematics,
    projectors: &ProjectorSet,
) -> Result<Vec<DMatrix<f64>>> {
    check_projector_match(kin, &projectors.comp_11)?;
    let mut stack: Vec<DMatrix<f64>> = kin.points.iter().map(b_curvilinear).collect();
    project_row(&mut stack, 0, &projectors.comp_11);
    project_row(&mut stack, 4, &projectors.comp_11);
    project_row(&mut stack, 1, &projectors.comp_22);
    project_row(&mut stack, 5, &projectors.comp_22);
    project_row(&mut stack, 3, &projectors.comp_12);
    Ok(stack)
}

/// Cartesian strain-displacement matrices rebuilt from projected basis
/// function derivatives: every Cartesian derivative field of every function
/// goes through the single 12 projector.
pub fn b_projected_cartesian(
    kin: &ElementKinematics,
    projector: &ProjectionOperator,
) -> Result<Vec<DMatrix<f64>>> {
    check_projector_match(kin, projector)?;
    let n_e = kin.n_e();
    let n_q = kin.n_q();

    // Projected derivative fields, one sample vector per (function,
    // component).
    let mut samples = vec![0.0; n_q];
    let mut grads = vec![[0.0; 3]; n_e * n_q]; // [q * n_e + a][component]
    for a in 0..n_e {
        for comp in 0..3 {
            for (q, qp) in kin.points.iter().enumerate() {
                samples[q] = qp.basis.grads_cart[a][comp];
            }
            let projected = projector.apply(&samples)?;
            for q in 0..n_q {
                grads[q * n_e + a][comp] = projected[q];
            }
        }
    }

    let mut stack = Vec::with_capacity(n_q);
    for q in 0..n_q {
        let mut b = DMatrix::zeros(6, 3 * n_e);
        for a in 0..n_e {
            let g = grads[q * n_e + a];
            let c = 3 * a;
            b[(0, c)] = g[0];
            b[(1, c + 1)] = g[1];
            b[(2, c + 2)] = g[2];
            b[(3, c)] = g[1];
            b[(3, c + 1)] = g[0];
            b[(4, c)] = g[2];
            b[(4, c + 2)] = g[0];
            b[(5, c + 1)] = g[2];
            b[(5, c + 2)] = g[1];
        }
        stack.push(b);
    }
    Ok(stack)
}
