//! Small exact geometries shared by unit tests.

use nalgebra::Point3;

use super::{KnotVector, NurbsPatch3d};

/// Unit cube [0,1]^3 as a trilinear patch with unit weights.
pub(crate) fn unit_cube_patch() -> NurbsPatch3d {
    let kv = || KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    let mut cps = Vec::new();
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                cps.push(Point3::new(i as f64, j as f64, k as f64));
            }
        }
    }
    NurbsPatch3d::new([kv(), kv(), kv()], cps, vec![1.0; 8]).unwrap()
}

/// Quarter annulus solid: exact 90-degree arc (weights 1, sqrt(2)/2, 1) of
/// inner radius `radius` in the xy-plane, extruded to z in [0,1] along the
/// second direction, with unit radial thickness along the third.
pub(crate) fn quarter_arc_patch(radius: f64) -> NurbsPatch3d {
    let kv_arc = KnotVector::new(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
    let kv_lin = || KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    let arc = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let w = [1.0, 0.5f64.sqrt(), 1.0];
    let mut cps = Vec::new();
    let mut weights = Vec::new();
    for k in 0..2 {
        let rho = radius + k as f64;
        for j in 0..2 {
            let z = j as f64;
            for i in 0..3 {
                cps.push(Point3::new(rho * arc[i][0], rho * arc[i][1], z));
                weights.push(w[i]);
            }
        }
    }
    NurbsPatch3d::new([kv_arc, kv_lin(), kv_lin()], cps, weights).unwrap()
}
