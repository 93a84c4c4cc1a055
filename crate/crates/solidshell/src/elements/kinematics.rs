//! Per-element quadrature-point kinematics: basis values, Jacobians,
//! covariant base vectors, and the strain frame transformation R.

use nalgebra::{Matrix3, Matrix6, Point3, Vector3};

use crate::quadrature::TensorRule;
use crate::splines::{BasisEval, NurbsPatch3d};
use crate::{Error, Result};

/// One Bezier element of a patch: a triple of nonempty knot spans.
#[derive(Debug, Clone)]
pub struct ElementRef {
    /// Flat element index (first direction fastest).
    pub index: usize,
    /// Knot-span index per direction.
    pub spans: [usize; 3],
    /// Parametric bounds per direction.
    pub bounds: [(f64, f64); 3],
}

/// Enumerates the elements of a patch in lexicographic order.
pub fn element_grid(patch: &NurbsPatch3d) -> Vec<ElementRef> {
    let spans: Vec<_> = (0..3).map(|d| patch.knot_vector(d).spans()).collect();
    let mut out = Vec::with_capacity(spans[0].len() * spans[1].len() * spans[2].len());
    for &(s2, lo2, hi2) in &spans[2] {
        for &(s1, lo1, hi1) in &spans[1] {
            for &(s0, lo0, hi0) in &spans[0] {
                out.push(ElementRef {
                    index: out.len(),
                    spans: [s0, s1, s2],
                    bounds: [(lo0, hi0), (lo1, hi1), (lo2, hi2)],
                });
            }
        }
    }
    out
}

/// Kinematic data at a single quadrature point.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub basis: BasisEval,
    pub point: Point3<f64>,
    /// Jacobian; columns are the covariant base vectors g_1, g_2, g_3.
    pub jacobian: Matrix3<f64>,
    pub det_j: f64,
    /// Maps Cartesian Voigt strains to covariant Voigt strains.
    pub r_matrix: Matrix6<f64>,
    /// Quadrature weight including det J and the parametric span measure.
    pub weight: f64,
}

impl QuadPoint {
    pub fn covariant_basis(&self, i: usize) -> Vector3<f64> {
        self.jacobian.column(i).into()
    }
}

/// All quadrature-point data of one element.
#[derive(Debug, Clone)]
pub struct ElementKinematics {
    pub element: ElementRef,
    /// Global indices of the functions supported on this element.
    pub active: Vec<usize>,
    pub points: Vec<QuadPoint>,
    pub degrees: [usize; 3],
}

impl ElementKinematics {
    /// Evaluates basis, geometry, and frame data at the mapped tensor
    /// quadrature points of the element.
    pub fn evaluate(patch: &NurbsPatch3d, element: &ElementRef, rule: &TensorRule) -> Result<Self> {
        let span_scale: f64 = element
            .bounds
            .iter()
            .map(|(lo, hi)| 0.5 * (hi - lo))
            .product();

        let mut points = Vec::with_capacity(rule.len());
        let mut active = Vec::new();
        for (q, reference) in rule.points.iter().enumerate() {
            let xi = [
                element.bounds[0].0
                    + 0.5 * (reference[0] + 1.0) * (element.bounds[0].1 - element.bounds[0].0),
                element.bounds[1].0
                    + 0.5 * (reference[1] + 1.0) * (element.bounds[1].1 - element.bounds[1].0),
                element.bounds[2].0
                    + 0.5 * (reference[2] + 1.0) * (element.bounds[2].1 - element.bounds[2].0),
            ];
            let eval = patch.eval(xi).map_err(|e| match e {
                Error::SingularGeometry { det_j, .. } => Error::SingularGeometry {
                    det_j,
                    element: Some(element.index),
                },
                other => other,
            })?;
            if eval.det_j <= 0.0 {
                return Err(Error::SingularGeometry {
                    det_j: eval.det_j,
                    element: Some(element.index),
                });
            }
            if q == 0 {
                active = eval.basis.active_indices.clone();
            } else {
                debug_assert_eq!(active, eval.basis.active_indices);
            }
            let r_matrix = strain_frame_matrix(&eval.jacobian);
            points.push(QuadPoint {
                weight: rule.weights[q] * eval.det_j * span_scale,
                r_matrix,
                det_j: eval.det_j,
                point: eval.point,
                jacobian: eval.jacobian,
                basis: eval.basis,
            });
        }

        Ok(Self {
            element: element.clone(),
            active,
            points,
            degrees: patch.degrees(),
        })
    }

    /// Functions supported on the element.
    pub fn n_e(&self) -> usize {
        self.active.len()
    }

    pub fn n_q(&self) -> usize {
        self.points.len()
    }

    /// Global DOF index for each local stiffness column (function-major,
    /// three displacement components per function).
    pub fn global_dofs(&self) -> Vec<usize> {
        let mut dofs = Vec::with_capacity(3 * self.active.len());
        for &f in &self.active {
            for c in 0..3 {
                dofs.push(3 * f + c);
            }
        }
        dofs
    }
}

/// The 6x6 transformation taking Cartesian Voigt strains to covariant
/// Voigt strains: eps_cov = R eps_cart, built from the covariant base
/// vectors (columns of J).
pub fn strain_frame_matrix(jacobian: &Matrix3<f64>) -> Matrix6<f64> {
    let g: [Vector3<f64>; 3] = [
        jacobian.column(0).into(),
        jacobian.column(1).into(),
        jacobian.column(2).into(),
    ];
    let normal_row = |a: &Vector3<f64>| {
        [
            a.x * a.x,
            a.y * a.y,
            a.z * a.z,
            a.x * a.y,
            a.x * a.z,
            a.y * a.z,
        ]
    };
    let shear_row = |a: &Vector3<f64>, b: &Vector3<f64>| {
        [
            2.0 * a.x * b.x,
            2.0 * a.y * b.y,
            2.0 * a.z * b.z,
            a.x * b.y + a.y * b.x,
            a.x * b.z + a.z * b.x,
            a.y * b.z + a.z * b.y,
        ]
    };
    let rows = [
        normal_row(&g[0]),
        normal_row(&g[1]),
        normal_row(&g[2]),
        shear_row(&g[0], &g[1]),
        shear_row(&g[0], &g[2]),
        shear_row(&g[1], &g[2]),
    ];
    Matrix6::from_fn(|r, c| rows[r][c])
}
