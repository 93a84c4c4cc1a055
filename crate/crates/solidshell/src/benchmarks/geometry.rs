//! Exact solid-shell geometries for the benchmark problems.
//!
//! Curved midsurfaces are rational quadratic arcs (exact circles/spheres);
//! thickness is built by radial offsetting, which for circular geometry is
//! a pure scaling of the control net. The through-thickness direction is
//! always the third parametric direction.
//!
//! Knot vectors span the physical extent of each direction (arc length,
//! axial length, thickness) rather than [0, 1]. The discrete spaces and the
//! projection operators are invariant under this affine relabeling, but the
//! covariant base vectors stay O(1) even at extreme slenderness, which
//! keeps the strain frame transformation well conditioned in floating
//! point.

use nalgebra::{Point3, Vector3};

use crate::splines::{elevate_to_degrees, refine_to_elements, KnotVector, NurbsPatch3d};
use crate::{Error, Result};

fn linear_kv(extent: f64) -> KnotVector {
    KnotVector::new(1, vec![0.0, 0.0, extent, extent]).unwrap()
}

fn quadratic_kv(extent: f64) -> KnotVector {
    KnotVector::new(2, vec![0.0, 0.0, 0.0, extent, extent, extent]).unwrap()
}

/// Maps unit-cube coordinates to the patch's parametric domain.
pub fn unit_to_param(patch: &NurbsPatch3d, unit: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for d in 0..3 {
        let (lo, hi) = patch.knot_vector(d).domain();
        out[d] = lo + unit[d] * (hi - lo);
    }
    out
}

/// Axis-aligned solid box as a trilinear patch.
pub fn solid_box(origin: Point3<f64>, lengths: [f64; 3]) -> NurbsPatch3d {
    let mut cps = Vec::with_capacity(8);
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                cps.push(Point3::new(
                    origin.x + i as f64 * lengths[0],
                    origin.y + j as f64 * lengths[1],
                    origin.z + k as f64 * lengths[2],
                ));
            }
        }
    }
    NurbsPatch3d::new(
        [
            linear_kv(lengths[0]),
            linear_kv(lengths[1]),
            linear_kv(lengths[2]),
        ],
        cps,
        vec![1.0; 8],
    )
    .unwrap()
}

/// Single-segment rational quadratic arc of a unit circle from `a0` to `a1`
/// (opening angle below pi). Returns planar control points (cos, sin
/// components) and weights.
fn unit_arc(a0: f64, a1: f64) -> ([[f64; 2]; 3], [f64; 3]) {
    let half = 0.5 * (a1 - a0);
    let mid = 0.5 * (a0 + a1);
    let w1 = half.cos();
    let pts = [
        [a0.cos(), a0.sin()],
        [mid.cos() / w1, mid.sin() / w1],
        [a1.cos(), a1.sin()],
    ];
    (pts, [1.0, w1, 1.0])
}

/// Solid circular-arc shell: midsurface radius `radius`, thickness along
/// the local radial direction, extruded along `e_axial`.
///
/// The arc lives in the plane spanned by `e_cos` and `e_sin`; the triple
/// `(e_cos, e_sin, e_axial)` must be right-handed orthonormal so elements
/// are positively oriented. Directions: first = circumferential, second =
/// axial, third = thickness.
///
/// `segments` selects the arc representation: 1 gives a single rational
/// segment (refine by knot insertion for a maximally smooth basis); larger
/// values give the standard piecewise Bezier arc, one exact segment per
/// element with C0 joints.
pub struct ArcShell {
    pub radius: f64,
    pub thickness: f64,
    pub angles: (f64, f64),
    pub segments: usize,
    pub axial_range: (f64, f64),
    pub e_cos: Vector3<f64>,
    pub e_sin: Vector3<f64>,
    pub e_axial: Vector3<f64>,
}

impl ArcShell {
    pub fn build(&self) -> Result<NurbsPatch3d> {
        if !(self.thickness > 0.0 && self.radius > self.thickness / 2.0) {
            return Err(Error::Benchmark(format!(
                "invalid shell radius {} / thickness {}",
                self.radius, self.thickness
            )));
        }
        if self.segments == 0 {
            return Err(Error::Benchmark("need at least one arc segment".into()));
        }
        // Composite quadratic rational arc: one exact sub-arc per segment,
        // shared endpoints, doubled interior knots at the joints.
        let n_arc = 2 * self.segments + 1;
        let mut planar: Vec<[f64; 2]> = Vec::with_capacity(n_arc);
        let mut arc_w: Vec<f64> = Vec::with_capacity(n_arc);
        let step = (self.angles.1 - self.angles.0) / self.segments as f64;
        for s in 0..self.segments {
            let (pts, w) = unit_arc(
                self.angles.0 + s as f64 * step,
                self.angles.0 + (s + 1) as f64 * step,
            );
            if s == 0 {
                planar.push(pts[0]);
                arc_w.push(w[0]);
            }
            planar.push(pts[1]);
            planar.push(pts[2]);
            arc_w.push(w[1]);
            arc_w.push(w[2]);
        }

        let mut cps = Vec::with_capacity(2 * 2 * n_arc);
        let mut weights = Vec::with_capacity(2 * 2 * n_arc);
        for k in 0..2 {
            let rho = self.radius + (k as f64 - 0.5) * self.thickness;
            for j in 0..2 {
                let axial = if j == 0 {
                    self.axial_range.0
                } else {
                    self.axial_range.1
                };
                for i in 0..n_arc {
                    let p = self.e_cos * planar[i][0] + self.e_sin * planar[i][1];
                    cps.push(Point3::from(p * rho + self.e_axial * axial));
                    weights.push(arc_w[i]);
                }
            }
        }

        let arc_length = self.radius * (self.angles.1 - self.angles.0);
        let mut arc_knots = vec![0.0; 3];
        for s in 1..self.segments {
            let u = arc_length * s as f64 / self.segments as f64;
            arc_knots.push(u);
            arc_knots.push(u);
        }
        arc_knots.extend_from_slice(&[arc_length; 3]);
        let axial_length = self.axial_range.1 - self.axial_range.0;
        NurbsPatch3d::new(
            [
                KnotVector::new(2, arc_knots)?,
                linear_kv(axial_length),
                linear_kv(self.thickness),
            ],
            cps,
            weights,
        )
    }
}

/// Exact octant of a spherical solid shell, degenerate at the apex.
///
/// First direction: azimuth from +x to +y along the equator; second:
/// meridian from the equator up to the apex at +z; third: thickness along
/// the exact radial direction (mid control layer on the midsurface after
/// degree elevation).
pub fn sphere_octant_shell(radius: f64, thickness: f64) -> Result<NurbsPatch3d> {
    if !(thickness > 0.0 && radius > thickness / 2.0) {
        return Err(Error::Benchmark(format!(
            "invalid shell radius {radius} / thickness {thickness}"
        )));
    }
    let s = 0.5f64.sqrt();
    // Unit-sphere octant net: rows j = 0 (equator), 1, 2 (apex).
    let net = [
        [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
        [[1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
    ];
    let w_1d = [1.0, s, 1.0];
    let mut cps = Vec::with_capacity(18);
    let mut weights = Vec::with_capacity(18);
    for k in 0..2 {
        let rho = radius + (k as f64 - 0.5) * thickness;
        for j in 0..3 {
            for i in 0..3 {
                let p = net[j][i];
                cps.push(Point3::new(p[0] * rho, p[1] * rho, p[2] * rho));
                weights.push(w_1d[i] * w_1d[j]);
            }
        }
    }
    let quarter = radius * std::f64::consts::FRAC_PI_2;
    NurbsPatch3d::new(
        [
            quadratic_kv(quarter),
            quadratic_kv(quarter),
            linear_kv(thickness),
        ],
        cps,
        weights,
    )
}

/// Elevates to a uniform degree and refines the requested directions.
pub fn elevate_and_refine(
    patch: &NurbsPatch3d,
    degree: usize,
    elems: [usize; 3],
) -> Result<NurbsPatch3d> {
    let mut out = elevate_to_degrees(patch, [degree, degree, degree])?;
    for d in 0..3 {
        if elems[d] > 1 {
            out = refine_to_elements(&out, d, elems[d])?;
        }
    }
    Ok(out)
}
