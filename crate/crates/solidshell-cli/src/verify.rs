//! Verification checks: closed-form projector match, projector algebra,
//! strain-frame identities, rigid-body modes, and constant-strain patch
//! tests for every formulation.

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};
use solidshell::elements::{
    b_cartesian, b_curvilinear, element_grid, material_matrix, stiffness, ElementKinematics,
    Formulation,
};
use solidshell::projection::{appendix_constants, build_projector, ProjectorSet, ReducedSpace};
use solidshell::quadrature::{gauss_legendre, tensor_rule, TensorRule};
use solidshell::splines::{KnotVector, NurbsPatch3d};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Optional fault injection for the closed-form comparison, used by the
/// sensitivity test: adds `delta` to one entry of each tabulated block.
#[derive(Clone, Copy, Default)]
pub struct Perturbation {
    pub delta: f64,
}

struct Lcg(u64);

impl Lcg {
    fn next_symmetric(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

fn full_rule(degrees: [usize; 3]) -> TensorRule {
    let r: Vec<_> = degrees
        .iter()
        .map(|&p| gauss_legendre(p + 1).unwrap())
        .collect();
    tensor_rule([&r[0], &r[1], &r[2]])
}

fn single_element_patch(degree: usize, rng: &mut Lcg, jiggle: f64) -> NurbsPatch3d {
    let kv = |p: usize| {
        let mut knots = vec![0.0; p + 1];
        knots.extend(std::iter::repeat_n(1.0, p + 1));
        KnotVector::new(p, knots).unwrap()
    };
    let a = Matrix3::new(1.2, 0.3, -0.15, 0.05, 0.95, 0.25, -0.1, 0.2, 1.1);
    let n = degree + 1;
    let mut cps = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let unit = Vector3::new(
                    i as f64 / degree as f64,
                    j as f64 / degree as f64,
                    k as f64 / degree as f64,
                );
                let mut p = a * unit;
                p += Vector3::new(
                    rng.next_symmetric(),
                    rng.next_symmetric(),
                    rng.next_symmetric(),
                ) * jiggle
                    / degree as f64;
                cps.push(Point3::from(p));
            }
        }
    }
    NurbsPatch3d::new(
        [kv(degree), kv(degree), kv(degree)],
        cps,
        vec![1.0; n * n * n],
    )
    .unwrap()
}

/// Multi-element lattice with one global affine map (every element affine)
/// and non-uniform spans.
fn affine_lattice(degree: usize) -> NurbsPatch3d {
    let kv = |p: usize, interior: &[f64]| {
        let mut knots = vec![0.0; p + 1];
        knots.extend_from_slice(interior);
        knots.extend(std::iter::repeat_n(1.0, p + 1));
        KnotVector::new(p, knots).unwrap()
    };
    let kvs = [
        kv(degree, &[0.35, 0.7]),
        kv(degree, &[0.55]),
        kv(degree, &[0.45]),
    ];
    let a = Matrix3::new(1.3, 0.45, -0.2, 0.1, 0.9, 0.35, -0.25, 0.15, 1.1);
    let grev: Vec<Vec<f64>> = kvs.iter().map(|k| k.greville()).collect();
    let dims = [grev[0].len(), grev[1].len(), grev[2].len()];
    let mut cps = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let xi = Vector3::new(grev[0][i], grev[1][j], grev[2][k]);
                cps.push(Point3::from(a * xi));
            }
        }
    }
    let n = cps.len();
    NurbsPatch3d::new(kvs, cps, vec![1.0; n]).unwrap()
}

fn check_appendix_match(perturb: Perturbation) -> CheckResult {
    let mut worst = 0.0f64;
    for p in [1usize, 2] {
        let closed = appendix_constants(p).unwrap();
        let spaces = [
            ReducedSpace::for_comp_11(p),
            ReducedSpace::for_comp_22(p),
            ReducedSpace::for_comp_12(p),
        ];
        for (space, closed_block) in spaces.iter().zip(&closed) {
            let mut tabulated = closed_block.clone();
            tabulated[(0, 0)] += perturb.delta;
            let op = build_projector(p, *space).unwrap();
            let block = op.block().expect("thickness degree unreduced");
            worst = worst.max((block - tabulated).abs().max());
        }
    }
    CheckResult {
        name: "closed-form projector blocks (p = 1, 2)",
        passed: worst < 1e-13,
        detail: format!("max entry deviation {worst:.2e}"),
    }
}

fn check_idempotence() -> CheckResult {
    let mut worst = 0.0f64;
    for p in 1..=3usize {
        let set = ProjectorSet::new(p).unwrap();
        for op in [&set.comp_11, &set.comp_22, &set.comp_12] {
            let m = op.matrix();
            worst = worst.max((m * m - m).abs().max() / m.abs().max());
        }
    }
    CheckResult {
        name: "projector idempotence (p = 1, 2, 3)",
        passed: worst < 1e-12,
        detail: format!("max |P^2 - P| = {worst:.2e} relative"),
    }
}

fn check_frame_equivalence() -> CheckResult {
    let mut rng = Lcg(0x5eed | 1);
    let mut worst = 0.0f64;
    for i in 0..60 {
        let degree = 1 + i % 3;
        let patch = single_element_patch(degree, &mut rng, 0.12);
        let rule = full_rule(patch.degrees());
        let grid = element_grid(&patch);
        let kin = ElementKinematics::evaluate(&patch, &grid[0], &rule).unwrap();
        for qp in &kin.points {
            let b = b_cartesian(qp);
            let bt = b_curvilinear(qp);
            let r = DMatrix::from_fn(6, 6, |i, j| qp.r_matrix[(i, j)]);
            worst = worst.max((&bt - r * &b).amax() / bt.amax());
        }
    }
    CheckResult {
        name: "covariant B equals R times Cartesian B",
        passed: worst < 1e-12,
        detail: format!("max deviation {worst:.2e} relative on 60 random elements"),
    }
}

fn check_curvilinear_energy() -> CheckResult {
    let mut rng = Lcg(0xfeed | 1);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let degree = 1 + i % 3;
        let patch = single_element_patch(degree, &mut rng, 0.12);
        let rule = full_rule(patch.degrees());
        let grid = element_grid(&patch);
        let kin = ElementKinematics::evaluate(&patch, &grid[0], &rule).unwrap();
        let mat = material_matrix(75.0, 0.28).unwrap();
        let k_std = stiffness(Formulation::Std, &kin, &mat, None).unwrap();
        let k_curv = stiffness(Formulation::Curv, &kin, &mat, None).unwrap();
        worst = worst.max((&k_std - &k_curv).amax() / k_std.amax());
    }
    CheckResult {
        name: "curvilinear stiffness equals standard stiffness",
        passed: worst < 1e-10,
        detail: format!("max deviation {worst:.2e} relative"),
    }
}

fn check_rigid_modes() -> CheckResult {
    let mut rng = Lcg(0xabc | 1);
    let patch = single_element_patch(2, &mut rng, 0.18);
    let rule = full_rule(patch.degrees());
    let grid = element_grid(&patch);
    let kin = ElementKinematics::evaluate(&patch, &grid[0], &rule).unwrap();
    let mat = material_matrix(12.0, 0.22).unwrap();
    let projectors = ProjectorSet::new(2).unwrap();
    let mut passed = true;
    let mut detail = String::new();
    for f in Formulation::ALL {
        let k = stiffness(f, &kin, &mat, Some(&projectors)).unwrap();
        let scale = k.amax();
        let mut worst = 0.0f64;
        let mut fields: Vec<([f64; 3], [[f64; 3]; 3])> = Vec::new();
        for c in 0..3 {
            let mut a = [0.0; 3];
            a[c] = 1.0;
            fields.push((a, [[0.0; 3]; 3]));
        }
        for omega in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            fields.push((
                [0.0; 3],
                [
                    [0.0, -omega[2], omega[1]],
                    [omega[2], 0.0, -omega[0]],
                    [-omega[1], omega[0], 0.0],
                ],
            ));
        }
        for (a, g) in &fields {
            let mut u = DVector::zeros(3 * kin.n_e());
            for (local, &idx) in kin.active.iter().enumerate() {
                let x = patch.control_points()[idx];
                for c in 0..3 {
                    u[3 * local + c] = a[c] + g[c][0] * x.x + g[c][1] * x.y + g[c][2] * x.z;
                }
            }
            let energy = (u.transpose() * &k * &u)[(0, 0)].abs();
            worst = worst.max(energy / (scale * u.norm_squared()));
        }
        passed &= worst < 1e-9;
        detail.push_str(&format!("{}: {worst:.1e} ", f.label()));
    }
    CheckResult {
        name: "rigid modes carry no energy (all formulations)",
        passed,
        detail,
    }
}

fn check_patch_tests() -> CheckResult {
    let mut passed = true;
    let mut detail = String::new();
    for degree in [1usize, 2] {
        let patch = affine_lattice(degree);
        let mat = material_matrix(30.0, 0.3).unwrap();
        let eps = [[0.4, 0.1, -0.05], [0.1, -0.3, 0.2], [-0.05, 0.2, 0.15]];
        let d = mat.matrix();
        let voigt = nalgebra::Vector6::new(
            eps[0][0],
            eps[1][1],
            eps[2][2],
            2.0 * eps[0][1],
            2.0 * eps[0][2],
            2.0 * eps[1][2],
        );
        let density = (voigt.transpose() * d * voigt)[(0, 0)];
        let rule = full_rule(patch.degrees());
        let elements = element_grid(&patch);
        let mut volume = 0.0;
        for element in &elements {
            let kin = ElementKinematics::evaluate(&patch, element, &rule).unwrap();
            volume += kin.points.iter().map(|qp| qp.weight).sum::<f64>();
        }
        let exact = 0.5 * density * volume;
        let projectors = ProjectorSet::new(degree).unwrap();
        for f in Formulation::ALL {
            let mut energy = 0.0;
            for element in &elements {
                let kin = ElementKinematics::evaluate(&patch, element, &rule).unwrap();
                let k = stiffness(f, &kin, &mat, Some(&projectors)).unwrap();
                let mut u = DVector::zeros(3 * kin.n_e());
                for (local, &idx) in kin.active.iter().enumerate() {
                    let x = patch.control_points()[idx];
                    for c in 0..3 {
                        u[3 * local + c] = eps[c][0] * x.x + eps[c][1] * x.y + eps[c][2] * x.z;
                    }
                }
                energy += 0.5 * (u.transpose() * &k * &u)[(0, 0)];
            }
            let rel = (energy - exact).abs() / exact;
            passed &= rel < 1e-10;
            detail.push_str(&format!("{} p={degree}: {rel:.1e} ", f.label()));
        }
    }
    CheckResult {
        name: "constant-strain patch test on distorted lattices",
        passed,
        detail,
    }
}

/// Runs every check; `perturb` exists so tests can prove the closed-form
/// comparison has teeth.
pub fn run_checks(perturb: Perturbation) -> Vec<CheckResult> {
    vec![
        check_appendix_match(perturb),
        check_idempotence(),
        check_frame_equivalence(),
        check_curvilinear_energy(),
        check_rigid_modes(),
        check_patch_tests(),
    ]
}

pub fn command() -> i32 {
    let results = run_checks(Perturbation::default());
    let mut failures = 0;
    for r in &results {
        println!(
            "check {:<55} {} ({})",
            r.name,
            if r.passed { "ok" } else { "FAILED" },
            r.detail.trim_end()
        );
        if !r.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        eprintln!("{failures} verification check(s) failed");
        1
    } else {
        println!("all {} checks passed", results.len());
        0
    }
}
