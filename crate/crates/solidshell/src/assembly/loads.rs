//! Consistent load vectors: body forces, line loads on parametric edges,
//! and concentrated forces.

use nalgebra::{DVector, Point3, Vector3};

use super::{full_quadrature, Side};
use crate::elements::{element_grid, ElementKinematics};
use crate::quadrature::gauss_legendre;
use crate::splines::NurbsPatch3d;
use crate::{Error, Result};

/// A parametric edge: one direction varies, the other two sit on a side.
/// `sides` refers to the two remaining axes in ascending order.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub along: usize,
    pub sides: [Side; 2],
}

impl Edge {
    pub fn new(along: usize, sides: [Side; 2]) -> Self {
        Self { along, sides }
    }

    fn other_axes(&self) -> [usize; 2] {
        match self.along {
            0 => [1, 2],
            1 => [0, 2],
            2 => [0, 1],
            _ => unreachable!(),
        }
    }
}

/// Distribution of a line load along an edge.
#[derive(Debug, Clone, Copy)]
pub enum EdgeLoadKind {
    /// Uniform load with the given resultant vector.
    Uniform(Vector3<f64>),
    /// Load of constant magnitude per unit length, directed along the local
    /// cylindrical radial direction about the given axis; `magnitude` is the
    /// integral of the load intensity over the edge.
    Radial {
        center: Point3<f64>,
        axis: Vector3<f64>,
        magnitude: f64,
    },
}

/// Consistent body load for a constant force density.
pub fn body_load(patch: &NurbsPatch3d, density: Vector3<f64>) -> Result<DVector<f64>> {
    let rule = full_quadrature(patch)?;
    let mut f = DVector::zeros(3 * patch.num_control_points());
    for element in element_grid(patch) {
        let kin = ElementKinematics::evaluate(patch, &element, &rule)?;
        for qp in &kin.points {
            for (a, &idx) in kin.active.iter().enumerate() {
                let scale = qp.basis.values[a] * qp.weight;
                for c in 0..3 {
                    f[3 * idx + c] += scale * density[c];
                }
            }
        }
    }
    Ok(f)
}

struct EdgeSample {
    xi: [f64; 3],
    point: Point3<f64>,
    /// Arc-length measure: |dx/dt| * dt-scale * quadrature weight.
    dl: f64,
}

fn edge_samples(patch: &NurbsPatch3d, edge: Edge) -> Result<Vec<EdgeSample>> {
    if edge.along > 2 {
        return Err(Error::InvalidEdge(format!(
            "direction {} out of range",
            edge.along
        )));
    }
    let other = edge.other_axes();
    let mut fixed = [0.0; 3];
    for (k, &axis) in other.iter().enumerate() {
        let (lo, hi) = patch.knot_vector(axis).domain();
        fixed[axis] = match edge.sides[k] {
            Side::Min => lo,
            Side::Max => hi,
        };
    }

    let kv = patch.knot_vector(edge.along);
    let rule = gauss_legendre(kv.degree() + 1)?;
    let mut samples = Vec::new();
    for (_, lo, hi) in kv.spans() {
        let scale = 0.5 * (hi - lo);
        for (&x, &w) in rule.points.iter().zip(&rule.weights) {
            let mut xi = fixed;
            xi[edge.along] = lo + (x + 1.0) * scale;
            let eval = patch.eval(xi)?;
            let tangent: Vector3<f64> = eval.jacobian.column(edge.along).into();
            samples.push(EdgeSample {
                xi,
                point: eval.point,
                dl: tangent.norm() * scale * w,
            });
        }
    }
    Ok(samples)
}

/// Consistent line load along a parametric edge. The assembled resultant
/// exactly reproduces the requested total (the same quadrature measures the
/// edge length and the load).
pub fn edge_load(patch: &NurbsPatch3d, edge: Edge, kind: EdgeLoadKind) -> Result<DVector<f64>> {
    let samples = edge_samples(patch, edge)?;
    let length: f64 = samples.iter().map(|s| s.dl).sum();
    if length <= 0.0 {
        return Err(Error::InvalidEdge("edge has zero length".into()));
    }

    let mut f = DVector::zeros(3 * patch.num_control_points());
    for sample in &samples {
        let intensity = match kind {
            EdgeLoadKind::Uniform(resultant) => resultant / length,
            EdgeLoadKind::Radial {
                center,
                axis,
                magnitude,
            } => {
                let axis = axis.normalize();
                let rel = sample.point - center;
                let radial = rel - axis * rel.dot(&axis);
                let norm = radial.norm();
                if norm == 0.0 {
                    return Err(Error::InvalidEdge(
                        "edge point lies on the radial axis".into(),
                    ));
                }
                radial / norm * (magnitude / length)
            }
        };
        let eval = patch.eval(sample.xi)?;
        for (a, &idx) in eval.basis.active_indices.iter().enumerate() {
            let scale = eval.basis.values[a] * sample.dl;
            for c in 0..3 {
                f[3 * idx + c] += scale * intensity[c];
            }
        }
    }
    Ok(f)
}

/// Where a concentrated force acts.
#[derive(Debug, Clone, Copy)]
pub enum PointLocation {
    /// Consistent point load: F_k = N_k(xi) * force.
    Parametric([f64; 3]),
    /// Direct nodal force on one control point.
    ControlPoint([usize; 3]),
}

/// Concentrated force. At a patch corner the parametric form reduces to a
/// single nonzero entry (clamped interpolation).
pub fn point_load(
    patch: &NurbsPatch3d,
    location: PointLocation,
    force: Vector3<f64>,
) -> Result<DVector<f64>> {
    let mut f = DVector::zeros(3 * patch.num_control_points());
    match location {
        PointLocation::Parametric(xi) => {
            let (active, values) = patch.values(xi)?;
            for (&idx, &v) in active.iter().zip(&values) {
                for c in 0..3 {
                    f[3 * idx + c] += v * force[c];
                }
            }
        }
        PointLocation::ControlPoint(ijk) => {
            let dims = patch.dims();
            if ijk.iter().zip(&dims).any(|(&i, &n)| i >= n) {
                return Err(Error::InvalidPatch(format!(
                    "control point {ijk:?} outside grid {dims:?}"
                )));
            }
            let idx = patch.flat_index(ijk);
            for c in 0..3 {
                f[3 * idx + c] = force[c];
            }
        }
    }
    Ok(f)
}
