//! Trivariate rational tensor-product patches.

use nalgebra::{Matrix3, Point3, Vector3};

use super::KnotVector;
use crate::{Error, Result};

/// Basis data at one parametric point: the `n_e` nonzero rational functions,
/// their parametric gradients, and their Cartesian gradients.
#[derive(Debug, Clone)]
pub struct BasisEval {
    /// Global (tensor) indices of the nonzero functions, first direction
    /// running fastest.
    pub active_indices: Vec<usize>,
    pub values: Vec<f64>,
    pub grads_param: Vec<Vector3<f64>>,
    pub grads_cart: Vec<Vector3<f64>>,
}

/// Result of a full patch evaluation at one parametric point.
#[derive(Debug, Clone)]
pub struct PatchEval {
    pub basis: BasisEval,
    /// Geometric point x(xi).
    pub point: Point3<f64>,
    /// Jacobian with columns g_1, g_2, g_3 (covariant base vectors).
    pub jacobian: Matrix3<f64>,
    pub det_j: f64,
}

/// Trivariate NURBS patch: geometry (or any coefficient field) over a
/// tensor grid of control points with positive weights.
#[derive(Debug, Clone)]
pub struct NurbsPatch3d {
    kvs: [KnotVector; 3],
    dims: [usize; 3],
    control_points: Vec<Point3<f64>>,
    weights: Vec<f64>,
}

impl NurbsPatch3d {
    /// Control points and weights in lexicographic order (first direction
    /// fastest).
    pub fn new(
        kvs: [KnotVector; 3],
        control_points: Vec<Point3<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let dims = [kvs[0].num_basis(), kvs[1].num_basis(), kvs[2].num_basis()];
        let expected = dims[0] * dims[1] * dims[2];
        if control_points.len() != expected {
            return Err(Error::InvalidPatch(format!(
                "expected {expected} control points for grid {dims:?}, got {}",
                control_points.len()
            )));
        }
        if weights.len() != expected {
            return Err(Error::InvalidPatch(format!(
                "expected {expected} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidPatch("all weights must be positive".into()));
        }
        Ok(Self {
            kvs,
            dims,
            control_points,
            weights,
        })
    }

    pub fn knot_vector(&self, direction: usize) -> &KnotVector {
        &self.kvs[direction]
    }

    pub fn degrees(&self) -> [usize; 3] {
        [
            self.kvs[0].degree(),
            self.kvs[1].degree(),
            self.kvs[2].degree(),
        ]
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn num_control_points(&self) -> usize {
        self.control_points.len()
    }

    pub fn flat_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.dims[0] * (ijk[1] + self.dims[1] * ijk[2])
    }

    pub fn control_point(&self, ijk: [usize; 3]) -> Point3<f64> {
        self.control_points[self.flat_index(ijk)]
    }

    pub fn weight(&self, ijk: [usize; 3]) -> f64 {
        self.weights[self.flat_index(ijk)]
    }

    pub fn control_points(&self) -> &[Point3<f64>] {
        &self.control_points
    }

    pub fn control_points_mut(&mut self) -> &mut [Point3<f64>] {
        &mut self.control_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nonzero functions per element.
    pub fn funcs_per_element(&self) -> usize {
        (self.kvs[0].degree() + 1) * (self.kvs[1].degree() + 1) * (self.kvs[2].degree() + 1)
    }

    /// Homogeneous coordinates (w*x, w*y, w*z, w) of all control points.
    pub(crate) fn homogeneous(&self) -> Vec<[f64; 4]> {
        self.control_points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| [w * p.x, w * p.y, w * p.z, w])
            .collect()
    }

    /// Rational basis values (no derivatives) at a parametric point. Works
    /// everywhere in the domain, including points where the geometric map
    /// degenerates.
    pub fn values(&self, xi: [f64; 3]) -> Result<(Vec<usize>, Vec<f64>)> {
        let mut spans = [0usize; 3];
        let mut uni = Vec::with_capacity(3);
        for d in 0..3 {
            let (first, ders) = self.kvs[d].eval_basis(xi[d], 0).map_err(|e| match e {
                Error::OutsideDomain {
                    value, min, max, ..
                } => Error::OutsideDomain {
                    value,
                    min,
                    max,
                    direction: d,
                },
                other => other,
            })?;
            spans[d] = first;
            uni.push(ders);
        }
        let n = [
            self.kvs[0].degree() + 1,
            self.kvs[1].degree() + 1,
            self.kvs[2].degree() + 1,
        ];
        let n_e = n[0] * n[1] * n[2];
        let mut active = Vec::with_capacity(n_e);
        let mut num = Vec::with_capacity(n_e);
        let mut w_sum = 0.0;
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let ijk = [spans[0] + i, spans[1] + j, spans[2] + k];
                    let bw = self.weight(ijk) * uni[0][0][i] * uni[1][0][j] * uni[2][0][k];
                    active.push(self.flat_index(ijk));
                    num.push(bw);
                    w_sum += bw;
                }
            }
        }
        Ok((active, num.into_iter().map(|v| v / w_sum).collect()))
    }

    /// Rational basis, geometry point, and Jacobian at a parametric point.
    pub fn eval(&self, xi: [f64; 3]) -> Result<PatchEval> {
        let mut spans = [0usize; 3];
        let mut uni = Vec::with_capacity(3);
        for d in 0..3 {
            let (first, ders) = self.kvs[d].eval_basis(xi[d], 1).map_err(|e| match e {
                Error::OutsideDomain {
                    value, min, max, ..
                } => Error::OutsideDomain {
                    value,
                    min,
                    max,
                    direction: d,
                },
                other => other,
            })?;
            spans[d] = first;
            uni.push(ders);
        }

        let n = [
            self.kvs[0].degree() + 1,
            self.kvs[1].degree() + 1,
            self.kvs[2].degree() + 1,
        ];
        let n_e = n[0] * n[1] * n[2];

        let mut active_indices = Vec::with_capacity(n_e);
        let mut num = Vec::with_capacity(n_e);
        let mut num_grad = Vec::with_capacity(n_e);
        let mut w_sum = 0.0;
        let mut w_grad = Vector3::zeros();
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let ijk = [spans[0] + i, spans[1] + j, spans[2] + k];
                    let w = self.weight(ijk);
                    let b = uni[0][0][i] * uni[1][0][j] * uni[2][0][k];
                    let db = Vector3::new(
                        uni[0][1][i] * uni[1][0][j] * uni[2][0][k],
                        uni[0][0][i] * uni[1][1][j] * uni[2][0][k],
                        uni[0][0][i] * uni[1][0][j] * uni[2][1][k],
                    );
                    active_indices.push(self.flat_index(ijk));
                    num.push(w * b);
                    num_grad.push(w * db);
                    w_sum += w * b;
                    w_grad += w * db;
                }
            }
        }

        // Quotient rule on the rational basis.
        let mut values = Vec::with_capacity(n_e);
        let mut grads_param = Vec::with_capacity(n_e);
        for a in 0..n_e {
            let v = num[a] / w_sum;
            values.push(v);
            grads_param.push((num_grad[a] - v * w_grad) / w_sum);
        }

        let mut point = Vector3::zeros();
        let mut jacobian = Matrix3::zeros();
        for (a, &idx) in active_indices.iter().enumerate() {
            let cp = self.control_points[idx].coords;
            point += values[a] * cp;
            jacobian += cp * grads_param[a].transpose();
        }

        let det_j = jacobian.determinant();
        let scale =
            jacobian.column(0).norm() * jacobian.column(1).norm() * jacobian.column(2).norm();
        if !det_j.is_finite() || det_j.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularGeometry {
                det_j,
                element: None,
            });
        }
        let j_inv_t = jacobian
            .try_inverse()
            .ok_or(Error::SingularGeometry {
                det_j,
                element: None,
            })?
            .transpose();
        let grads_cart = grads_param.iter().map(|g| j_inv_t * g).collect();

        Ok(PatchEval {
            basis: BasisEval {
                active_indices,
                values,
                grads_param,
                grads_cart,
            },
            point: Point3::from(point),
            jacobian,
            det_j,
        })
    }

    /// Geometry point only; valid even where the map degenerates (e.g. a
    /// collapsed patch edge).
    pub fn point(&self, xi: [f64; 3]) -> Result<Point3<f64>> {
        let (active, values) = self.values(xi)?;
        let mut out = Vector3::zeros();
        for (&idx, &v) in active.iter().zip(&values) {
            out += v * self.control_points[idx].coords;
        }
        Ok(Point3::from(out))
    }

    /// Interpolates a per-control-point coefficient field (e.g. a solution)
    /// at a parametric point: sum_k N_k(xi) c_k.
    pub fn interpolate(&self, coeffs: &[Vector3<f64>], xi: [f64; 3]) -> Result<Vector3<f64>> {
        if coeffs.len() != self.num_control_points() {
            return Err(Error::InvalidPatch(format!(
                "coefficient field has {} entries, patch has {} control points",
                coeffs.len(),
                self.num_control_points()
            )));
        }
        let (active, values) = self.values(xi)?;
        let mut out = Vector3::zeros();
        for (&idx, &v) in active.iter().zip(&values) {
            out += v * coeffs[idx];
        }
        Ok(out)
    }
}

/// Evaluates the trivariate rational basis with geometry point and Jacobian.
pub fn eval_nurbs_3d(patch: &NurbsPatch3d, xi: [f64; 3]) -> Result<PatchEval> {
    patch.eval(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::test_geometry::{quarter_arc_patch, unit_cube_patch};
    use approx::assert_relative_eq;

    #[test]
    fn unit_cube_jacobian_is_identity() {
        let patch = unit_cube_patch();
        for xi in [[0.2, 0.7, 0.4], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]] {
            let eval = patch.eval(xi).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_relative_eq!(eval.jacobian[(i, j)], expected, epsilon = 1e-14);
                }
            }
            assert_relative_eq!(eval.det_j, 1.0, epsilon = 1e-14);
            for d in 0..3 {
                assert_relative_eq!(eval.point[d], xi[d], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn quarter_arc_points_lie_on_circle() {
        let radius = 2.5;
        let patch = quarter_arc_patch(radius);
        // The inner surface (third coordinate 0) is the exact circle.
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let eval = patch.eval([t, 0.3, 0.0]).unwrap();
            let r = (eval.point.x.powi(2) + eval.point.y.powi(2)).sqrt();
            assert_relative_eq!(r, radius, epsilon = 1e-12);
        }
    }

    #[test]
    fn rigid_translation_shifts_point_only() {
        let patch = quarter_arc_patch(1.0);
        let shift = Vector3::new(0.3, -1.2, 2.0);
        let mut moved = patch.clone();
        for p in moved.control_points_mut() {
            *p += shift;
        }
        for xi in [[0.1, 0.4, 0.9], [0.8, 0.8, 0.2]] {
            let a = patch.eval(xi).unwrap();
            let b = moved.eval(xi).unwrap();
            assert_relative_eq!((b.point - a.point - shift).norm(), 0.0, epsilon = 1e-13);
            for k in 0..a.basis.values.len() {
                assert_eq!(a.basis.values[k], b.basis.values[k]);
                assert_eq!(a.basis.grads_param[k], b.basis.grads_param[k]);
            }
        }
    }

    #[test]
    fn rational_partition_of_unity_and_gradient_sums() {
        let patch = quarter_arc_patch(3.0);
        // Fixed linear-congruential stream keeps the test deterministic.
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let xi = [next(), next(), next()];
            let eval = patch.eval(xi).unwrap();
            let sum: f64 = eval.basis.values.iter().sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
            let gsum: Vector3<f64> = eval.basis.grads_param.iter().sum();
            let gmax = eval
                .basis
                .grads_param
                .iter()
                .fold(0.0f64, |m, g| m.max(g.amax()))
                .max(1.0);
            assert!(gsum.amax() < 1e-10 * gmax);
            // J^T grads_cart = grads_param for every active function.
            for a in 0..eval.basis.values.len() {
                let back = eval.jacobian.transpose() * eval.basis.grads_cart[a];
                assert!((back - eval.basis.grads_param[a]).amax() < 1e-10 * gmax);
            }
        }
    }

    #[test]
    fn degenerate_patch_reports_singular_jacobian() {
        // Collapse the cube onto a plane: zero thickness in z.
        let mut patch = unit_cube_patch();
        for p in patch.control_points_mut() {
            p.z = 0.0;
        }
        match patch.eval([0.5, 0.5, 0.5]) {
            Err(Error::SingularGeometry { det_j, .. }) => assert_eq!(det_j, 0.0),
            other => panic!("expected singular geometry, got {other:?}"),
        }
    }
}
