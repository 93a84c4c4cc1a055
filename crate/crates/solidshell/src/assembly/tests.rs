use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector, Point3, Vector3};

use super::*;
use crate::elements::material_matrix;
use crate::splines::test_geometry::{quarter_arc_patch, unit_cube_patch};
use crate::splines::{elevate_to_degrees, refine_to_elements, KnotVector, NurbsPatch3d};

fn dense(system: &LinearSystem) -> DMatrix<f64> {
    let n = system.stiffness.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (r, c, &v) in system.stiffness.triplet_iter() {
        out[(r, c)] += v;
    }
    out
}

/// An x-aligned box [0, lx] x [0, ly] x [0, lz] as a trilinear patch.
fn box_patch(lx: f64, ly: f64, lz: f64) -> NurbsPatch3d {
    let kv = || KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
    let mut cps = Vec::new();
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                cps.push(Point3::new(i as f64 * lx, j as f64 * ly, k as f64 * lz));
            }
        }
    }
    NurbsPatch3d::new([kv(), kv(), kv()], cps, vec![1.0; 8]).unwrap()
}

/// Consistent traction load on the xi = 1 face: F_k = int N_k t dA,
/// integrated with a tensor Gauss rule over the face.
fn face_traction(patch: &NurbsPatch3d, traction: Vector3<f64>) -> DVector<f64> {
    let mut f = DVector::zeros(3 * patch.num_control_points());
    let p = patch.degrees();
    let r1 = crate::quadrature::gauss_legendre(p[1] + 1).unwrap();
    let r2 = crate::quadrature::gauss_legendre(p[2] + 1).unwrap();
    for (_, lo1, hi1) in patch.knot_vector(1).spans() {
        for (_, lo2, hi2) in patch.knot_vector(2).spans() {
            for (&x1, &w1) in r1.points.iter().zip(&r1.weights) {
                for (&x2, &w2) in r2.points.iter().zip(&r2.weights) {
                    let s1 = 0.5 * (hi1 - lo1);
                    let s2 = 0.5 * (hi2 - lo2);
                    let xi = [1.0, lo1 + (x1 + 1.0) * s1, lo2 + (x2 + 1.0) * s2];
                    let eval = patch.eval(xi).unwrap();
                    let g1: Vector3<f64> = eval.jacobian.column(1).into();
                    let g2: Vector3<f64> = eval.jacobian.column(2).into();
                    let da = g1.cross(&g2).norm() * s1 * s2 * w1 * w2;
                    for (a, &idx) in eval.basis.active_indices.iter().enumerate() {
                        for c in 0..3 {
                            f[3 * idx + c] += eval.basis.values[a] * traction[c] * da;
                        }
                    }
                }
            }
        }
    }
    f
}

#[test]
fn single_element_global_matrix_equals_local() {
    let patch = unit_cube_patch();
    let mat = material_matrix(10.0, 0.25).unwrap();
    let system = assemble(&patch, Formulation::Std, &mat).unwrap();
    let k_global = dense(&system);

    let rule = full_quadrature(&patch).unwrap();
    let grid = element_grid(&patch);
    let kin = ElementKinematics::evaluate(&patch, &grid[0], &rule).unwrap();
    let k_e = stiffness(Formulation::Std, &kin, &mat, None).unwrap();
    let dofs = kin.global_dofs();
    for (lr, &gr) in dofs.iter().enumerate() {
        for (lc, &gc) in dofs.iter().enumerate() {
            assert_relative_eq!(k_global[(gr, gc)], k_e[(lr, lc)], epsilon = 1e-14);
        }
    }
}

#[test]
fn disjoint_support_gives_zero_coupling() {
    // Two linear elements along x: functions 0 and 2 never share an element.
    let patch = refine_to_elements(&unit_cube_patch(), 0, 2).unwrap();
    let mat = material_matrix(1.0, 0.0).unwrap();
    let system = assemble(&patch, Formulation::Std, &mat).unwrap();
    let k = dense(&system);
    let scale = k.amax();
    for c_a in 0..3 {
        for c_b in 0..3 {
            // Control points (0, j, k) and (2, j, k) in the 3 x 2 x 2 grid.
            let a = 3 * patch.flat_index([0, 0, 0]) + c_a;
            let b = 3 * patch.flat_index([2, 1, 1]) + c_b;
            assert!(k[(a, b)].abs() < 1e-14 * scale);
        }
    }
    assert!((&k - k.transpose()).amax() < 1e-12 * scale);
}

#[test]
fn clamped_bar_under_uniform_traction_matches_1d_solution() {
    // nu = 0 makes the 3D solution the exact 1D bar field u_x = sigma x / E.
    let length = 4.0;
    let youngs = 1000.0;
    let sigma = 5.0;
    let patch = refine_to_elements(
        &elevate_to_degrees(&box_patch(length, 1.0, 1.0), [2, 2, 2]).unwrap(),
        0,
        2,
    )
    .unwrap();
    let mat = material_matrix(youngs, 0.0).unwrap();
    let mut dofmap = DofMap::new(&patch);
    dofmap.constrain_face(Face::new(0, Side::Min), [true; 3]);
    let f = face_traction(&patch, Vector3::new(sigma, 0.0, 0.0));
    let solution = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();

    assert!(solution.residual < 1e-10, "residual {}", solution.residual);
    let tip = evaluate_displacement(&patch, &solution.displacements, [1.0, 0.3, 0.6]).unwrap();
    assert_relative_eq!(tip.x, sigma * length / youngs, max_relative = 1e-10);
    assert_relative_eq!(tip.y, 0.0, epsilon = 1e-12);
    // Mid-length displacement is half the tip value (linear field).
    let mid = evaluate_displacement(&patch, &solution.displacements, [0.5, 0.5, 0.5]).unwrap();
    assert_relative_eq!(mid.x, 0.5 * sigma * length / youngs, max_relative = 1e-10);
}

#[test]
fn body_load_resultant_preserved_on_unit_cube() {
    let patch = unit_cube_patch();
    let f = body_load(&patch, Vector3::new(0.0, 0.0, -1.0)).unwrap();
    let mut total = Vector3::zeros();
    for k in 0..patch.num_control_points() {
        total += Vector3::new(f[3 * k], f[3 * k + 1], f[3 * k + 2]);
    }
    assert_relative_eq!(total.x, 0.0, epsilon = 1e-14);
    assert_relative_eq!(total.y, 0.0, epsilon = 1e-14);
    assert_relative_eq!(total.z, -1.0, epsilon = 1e-13);
}

#[test]
fn zero_body_load_is_zero() {
    let patch = quarter_arc_patch(2.0);
    let f = body_load(&patch, Vector3::zeros()).unwrap();
    assert_eq!(f.amax(), 0.0);
}

#[test]
fn straight_edge_uniform_load_resultant_is_exact() {
    let patch = box_patch(3.0, 1.0, 0.5);
    let resultant = Vector3::new(0.0, 0.0, -7.25);
    // Top edge of the xi = 1 face, running along eta.
    let edge = Edge::new(1, [Side::Max, Side::Max]);
    let f = edge_load(&patch, edge, EdgeLoadKind::Uniform(resultant)).unwrap();
    let mut total = Vector3::zeros();
    let mut loaded = 0;
    for k in 0..patch.num_control_points() {
        let fk = Vector3::new(f[3 * k], f[3 * k + 1], f[3 * k + 2]);
        if fk.norm() > 0.0 {
            loaded += 1;
        }
        total += fk;
    }
    assert_relative_eq!((total - resultant).norm(), 0.0, epsilon = 1e-12);
    // Only the control points of that edge carry load.
    assert_eq!(loaded, 2);
}

#[test]
fn radial_edge_load_matches_line_quadrature_oracle() {
    // Quarter-circle edge of radius R: the assembled resultant must equal
    // the analytic integral m/L * int r_hat dl = m * 2/pi * (1, 1, 0).
    // Refine the edge so the arc-length quadrature converges well past the
    // comparison tolerance.
    let radius = 2.0;
    let magnitude = 3.0;
    let patch = refine_to_elements(&quarter_arc_patch(radius), 0, 12).unwrap();
    let edge = Edge::new(0, [Side::Min, Side::Min]);
    let f = edge_load(
        &patch,
        edge,
        EdgeLoadKind::Radial {
            center: Point3::origin(),
            axis: Vector3::z(),
            magnitude,
        },
    )
    .unwrap();
    let mut total = Vector3::zeros();
    for k in 0..patch.num_control_points() {
        total += Vector3::new(f[3 * k], f[3 * k + 1], f[3 * k + 2]);
    }
    let expected = magnitude * 2.0 / std::f64::consts::PI;
    assert_relative_eq!(total.x, expected, max_relative = 1e-5);
    assert_relative_eq!(total.y, expected, max_relative = 1e-5);
    assert_relative_eq!(total.z, 0.0, epsilon = 1e-12);
}

#[test]
fn zero_edge_load_is_zero() {
    let patch = box_patch(1.0, 1.0, 1.0);
    let f = edge_load(
        &patch,
        Edge::new(2, [Side::Min, Side::Max]),
        EdgeLoadKind::Uniform(Vector3::zeros()),
    )
    .unwrap();
    assert_eq!(f.amax(), 0.0);
}

#[test]
fn corner_point_load_hits_single_control_point() {
    let patch = elevate_to_degrees(&unit_cube_patch(), [2, 2, 2]).unwrap();
    let force = Vector3::new(1.0, -2.0, 0.5);
    let f = point_load(&patch, PointLocation::Parametric([0.0, 0.0, 0.0]), force).unwrap();
    let corner = patch.flat_index([0, 0, 0]);
    for k in 0..patch.num_control_points() {
        let fk = Vector3::new(f[3 * k], f[3 * k + 1], f[3 * k + 2]);
        if k == corner {
            assert_relative_eq!((fk - force).norm(), 0.0, epsilon = 1e-14);
        } else {
            assert_eq!(fk.norm(), 0.0);
        }
    }
}

#[test]
fn midside_point_load_splits_by_hat_values() {
    let patch = unit_cube_patch();
    let f = point_load(
        &patch,
        PointLocation::Parametric([0.5, 0.0, 0.0]),
        Vector3::new(1.0, 0.0, 0.0),
    )
    .unwrap();
    let a = patch.flat_index([0, 0, 0]);
    let b = patch.flat_index([1, 0, 0]);
    assert_relative_eq!(f[3 * a], 0.5, epsilon = 1e-14);
    assert_relative_eq!(f[3 * b], 0.5, epsilon = 1e-14);
    let total: f64 = (0..patch.num_control_points()).map(|k| f[3 * k]).sum();
    assert_relative_eq!(total, 1.0, epsilon = 1e-14);
}

#[test]
fn control_point_load_is_single_entry() {
    let patch = elevate_to_degrees(&unit_cube_patch(), [2, 2, 2]).unwrap();
    let f = point_load(
        &patch,
        PointLocation::ControlPoint([1, 0, 2]),
        Vector3::new(0.0, 4.0, 0.0),
    )
    .unwrap();
    let idx = patch.flat_index([1, 0, 2]);
    assert_eq!(f[3 * idx + 1], 4.0);
    assert_eq!(f.iter().filter(|&&v| v != 0.0).count(), 1);
}

#[test]
fn out_of_domain_point_load_is_rejected() {
    let patch = unit_cube_patch();
    assert!(point_load(
        &patch,
        PointLocation::Parametric([1.2, 0.0, 0.0]),
        Vector3::x()
    )
    .is_err());
    assert!(point_load(&patch, PointLocation::ControlPoint([5, 0, 0]), Vector3::x()).is_err());
}

#[test]
fn fully_clamped_patch_with_zero_load_stays_put() {
    let patch = unit_cube_patch();
    let mat = material_matrix(1.0, 0.3).unwrap();
    let mut dofmap = DofMap::new(&patch);
    for axis in 0..3 {
        dofmap.constrain_face(Face::new(axis, Side::Min), [true; 3]);
        dofmap.constrain_face(Face::new(axis, Side::Max), [true; 3]);
    }
    let f = DVector::zeros(dofmap.n_dofs());
    // Everything is constrained: the reduced system is empty.
    assert_eq!(dofmap.n_free(), 0);
    let solution = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();
    assert_eq!(solution.displacements.amax(), 0.0);
}

#[test]
fn partially_clamped_patch_with_zero_load_stays_put() {
    let patch = unit_cube_patch();
    let mat = material_matrix(1.0, 0.3).unwrap();
    let mut dofmap = DofMap::new(&patch);
    dofmap.constrain_face(Face::new(0, Side::Min), [true; 3]);
    let f = DVector::zeros(dofmap.n_dofs());
    let solution = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();
    assert_eq!(solution.displacements.amax(), 0.0);
}

#[test]
fn unconstrained_patch_reports_rigid_modes() {
    let patch = unit_cube_patch();
    let mat = material_matrix(1.0, 0.0).unwrap();
    let dofmap = DofMap::new(&patch);
    let f = DVector::zeros(dofmap.n_dofs());
    match assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f) {
        Err(Error::SingularSystem { zero_modes }) => {
            assert!(zero_modes >= 6, "found {zero_modes} zero modes");
        }
        other => panic!("expected singular system, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn displacement_evaluation_reproduces_translation_and_corners() {
    let patch = elevate_to_degrees(&quarter_arc_patch(1.0), [2, 2, 2]).unwrap();
    let n = patch.num_control_points();
    let shift = Vector3::new(0.1, -0.2, 0.3);
    let mut u = DVector::zeros(3 * n);
    for k in 0..n {
        for c in 0..3 {
            u[3 * k + c] = shift[c];
        }
    }
    let at = evaluate_displacement(&patch, &u, [0.3, 0.8, 0.2]).unwrap();
    assert_relative_eq!((at - shift).norm(), 0.0, epsilon = 1e-13);

    // Corner value equals the corner control-point coefficients.
    let corner = patch.flat_index([0, 0, 0]);
    let mut v = DVector::zeros(3 * n);
    v[3 * corner] = 2.5;
    let at = evaluate_displacement(&patch, &v, [0.0, 0.0, 0.0]).unwrap();
    assert_relative_eq!(at.x, 2.5, epsilon = 1e-14);
    assert!(evaluate_displacement(&patch, &v, [0.0, -0.1, 0.0]).is_err());
}

#[test]
fn assembly_and_solve_are_deterministic() {
    let patch = refine_to_elements(
        &elevate_to_degrees(&box_patch(2.0, 1.0, 1.0), [2, 2, 2]).unwrap(),
        0,
        3,
    )
    .unwrap();
    let mat = material_matrix(100.0, 0.3).unwrap();
    let mut dofmap = DofMap::new(&patch);
    dofmap.constrain_face(Face::new(0, Side::Min), [true; 3]);
    let f = face_traction(&patch, Vector3::new(0.0, 1.0, 0.0));

    let s1 = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();
    let s2 = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();
    for (a, b) in s1.displacements.iter().zip(s2.displacements.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn prescribed_nonzero_values_enter_the_rhs() {
    // Stretch the bar by prescribing the end face displacement instead of a
    // load: same linear solution field.
    let length = 2.0;
    let patch = elevate_to_degrees(&box_patch(length, 1.0, 1.0), [2, 1, 1]).unwrap();
    let mat = material_matrix(10.0, 0.0).unwrap();
    let mut dofmap = DofMap::new(&patch);
    dofmap.constrain_face(Face::new(0, Side::Min), [true, false, false]);
    // Pin one corner line to kill the remaining rigid modes.
    dofmap.constrain_control_point([0, 0, 0], [true; 3]);
    dofmap.constrain_control_point([0, 1, 0], [false, false, true]);
    let stretch = 0.04;
    let dims = patch.dims();
    for j in 0..dims[1] {
        for k in 0..dims[2] {
            let cp = patch.flat_index([dims[0] - 1, j, k]);
            dofmap.constrain_dof(3 * cp, stretch);
        }
    }
    let f = DVector::zeros(dofmap.n_dofs());
    let solution = assemble_and_solve(&patch, Formulation::Std, &mat, &dofmap, &f).unwrap();
    let mid = evaluate_displacement(&patch, &solution.displacements, [0.5, 0.5, 0.5]).unwrap();
    assert_relative_eq!(mid.x, 0.5 * stretch, max_relative = 1e-10);
}
