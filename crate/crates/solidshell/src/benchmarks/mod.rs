//! The five verification problems: straight and curved cantilever beams
//! (shear and membrane locking) and the shell obstacle course
//! (Scordelis-Lo roof, pinched hemisphere, pinched cylinder).
//!
//! Each case bundles exact geometry, boundary conditions, loading, a
//! measurement point, and the value used to normalize the measured
//! deflection. Beams are normalized by analytic thin-beam limits, the
//! obstacle-course problems by their published reference deflections.

pub mod geometry;

use std::time::{Duration, Instant};

use nalgebra::{DVector, Point3, Vector3};

use crate::assembly::{
    apply_constraints, assemble, body_load, edge_load, evaluate_displacement, point_load, solve,
    DofMap, Edge, EdgeLoadKind, Face, PointLocation, Side,
};
use crate::elements::{material_matrix, Formulation};
use crate::splines::NurbsPatch3d;
use crate::{Error, Result};
use geometry::{elevate_and_refine, solid_box, sphere_octant_shell, unit_to_param, ArcShell};

/// Reference vertical deflection at the Scordelis-Lo measurement point.
pub const SCORDELIS_LO_REFERENCE: f64 = 0.3024;
/// Reference radial deflection at the hemisphere load point.
pub const HEMISPHERE_REFERENCE: f64 = 0.0924;
/// Reference radial deflection under the pinched-cylinder load.
pub const CYLINDER_REFERENCE: f64 = 1.8248e-5;

#[derive(Debug, Clone)]
enum CaseGeometry {
    StraightBeam,
    CurvedBeam,
    ScordelisLo,
    Hemisphere,
    Cylinder,
}

/// One benchmark problem, ready to run at any degree and formulation.
#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub name: &'static str,
    geometry: CaseGeometry,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Deflection used to normalize the raw measurement.
    pub reference: f64,
    /// Elements along the length (beams) or per in-plane side (shells).
    pub n_elems: usize,
    pub slenderness: f64,
    pub distortion_deg: f64,
}

/// Everything needed for one solve.
pub(crate) struct Model {
    pub patch: NurbsPatch3d,
    pub dofmap: DofMap,
    pub forces: DVector<f64>,
    pub measure_point: [f64; 3],
    pub measure_direction: Vector3<f64>,
}

/// Result of one benchmark solve.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub benchmark: &'static str,
    pub formulation: Formulation,
    pub degree: usize,
    pub n_elems: usize,
    pub slenderness: f64,
    pub distortion_deg: f64,
    /// Measured deflection, positive in the expected direction.
    pub raw_deflection: f64,
    pub normalized_deflection: f64,
    pub wall_time: Duration,
}

/// Straight cantilever beam, clamped at one face, loaded along the top edge
/// of the free face; deflection measured at the bottom edge of the free
/// end. Optional in-plane mesh distortion, largest at mid-length.
pub fn straight_beam(
    n_elems: usize,
    slenderness: f64,
    distortion_deg: f64,
) -> Result<BenchmarkCase> {
    if n_elems < 1 {
        return Err(Error::Benchmark("need at least one element".into()));
    }
    if !(slenderness > 0.0) {
        return Err(Error::Benchmark("slenderness must be positive".into()));
    }
    if !(0.0..90.0).contains(&distortion_deg) {
        return Err(Error::Benchmark(format!(
            "distortion angle {distortion_deg} must lie in [0, 90) degrees"
        )));
    }
    let (length, thickness) = (STRAIGHT_BEAM_LENGTH, STRAIGHT_BEAM_LENGTH / slenderness);
    let width = 1.0;
    let inertia = width * thickness.powi(3) / 12.0;
    let youngs = 1000.0;
    // Euler-Bernoulli tip deflection F L^3 / (3 E I), exact in the slender
    // limit for nu = 0.
    let reference = BEAM_FORCE * length.powi(3) / (3.0 * youngs * inertia);
    Ok(BenchmarkCase {
        name: "straight",
        geometry: CaseGeometry::StraightBeam,
        youngs_modulus: youngs,
        poisson_ratio: 0.0,
        reference,
        n_elems,
        slenderness,
        distortion_deg,
    })
}

/// Quarter-ring cantilever, clamped at one face, radial line load along the
/// exterior edge of the free face; radial deflection measured at the
/// interior edge of the free end.
pub fn curved_beam(n_elems: usize, slenderness: f64) -> Result<BenchmarkCase> {
    if n_elems < 1 {
        return Err(Error::Benchmark("need at least one element".into()));
    }
    if !(slenderness > 0.0) {
        return Err(Error::Benchmark("slenderness must be positive".into()));
    }
    let radius = CURVED_BEAM_RADIUS;
    let thickness = radius / slenderness;
    let width = 1.0;
    let inertia = width * thickness.powi(3) / 12.0;
    let youngs = 1000.0;
    // Unit-load (Castigliano) radial tip deflection of a quarter ring:
    // pi F R^3 / (4 E I).
    let reference = std::f64::consts::PI * BEAM_FORCE * radius.powi(3) / (4.0 * youngs * inertia);
    Ok(BenchmarkCase {
        name: "curved",
        geometry: CaseGeometry::CurvedBeam,
        youngs_modulus: youngs,
        poisson_ratio: 0.0,
        reference,
        n_elems,
        slenderness,
        distortion_deg: 0.0,
    })
}

/// Scordelis-Lo roof quarter model under self-weight.
pub fn scordelis_lo(n_elems_per_side: usize) -> Result<BenchmarkCase> {
    if n_elems_per_side < 2 {
        return Err(Error::Benchmark("need at least 2 elements per side".into()));
    }
    Ok(BenchmarkCase {
        name: "scordelis",
        geometry: CaseGeometry::ScordelisLo,
        youngs_modulus: 4.32e8,
        poisson_ratio: 0.0,
        reference: SCORDELIS_LO_REFERENCE,
        n_elems: n_elems_per_side,
        slenderness: 25.0 / 0.25,
        distortion_deg: 0.0,
    })
}

/// Pinched hemisphere quarter model: apex fixed, free equator, alternating
/// point loads at the equator corners.
pub fn pinched_hemisphere(n_elems_per_side: usize) -> Result<BenchmarkCase> {
    if n_elems_per_side < 2 {
        return Err(Error::Benchmark("need at least 2 elements per side".into()));
    }
    Ok(BenchmarkCase {
        name: "hemisphere",
        geometry: CaseGeometry::Hemisphere,
        youngs_modulus: 6.825e7,
        poisson_ratio: 0.3,
        reference: HEMISPHERE_REFERENCE,
        n_elems: n_elems_per_side,
        slenderness: 10.0 / 0.04,
        distortion_deg: 0.0,
    })
}

/// Pinched cylinder eighth model with rigid end diaphragms.
pub fn pinched_cylinder(n_elems_per_side: usize) -> Result<BenchmarkCase> {
    if n_elems_per_side < 2 {
        return Err(Error::Benchmark("need at least 2 elements per side".into()));
    }
    Ok(BenchmarkCase {
        name: "cylinder",
        geometry: CaseGeometry::Cylinder,
        youngs_modulus: 3e6,
        poisson_ratio: 0.3,
        reference: CYLINDER_REFERENCE,
        n_elems: n_elems_per_side,
        slenderness: 300.0 / 3.0,
        distortion_deg: 0.0,
    })
}

const STRAIGHT_BEAM_LENGTH: f64 = 100.0;
const CURVED_BEAM_RADIUS: f64 = 10.0;
/// Beam load resultant. Results are normalized, and in linear elasticity
/// the normalized deflection is independent of this choice.
const BEAM_FORCE: f64 = 1.0;
const SCORDELIS_WEIGHT_DENSITY: f64 = 360.0;

impl BenchmarkCase {
    /// Builds geometry, constraints, loads, and measurement for a given
    /// degree.
    pub(crate) fn build_model(&self, degree: usize) -> Result<Model> {
        match self.geometry {
            CaseGeometry::StraightBeam => self.build_straight_beam(degree),
            CaseGeometry::CurvedBeam => self.build_curved_beam(degree),
            CaseGeometry::ScordelisLo => self.build_scordelis(degree),
            CaseGeometry::Hemisphere => self.build_hemisphere(degree),
            CaseGeometry::Cylinder => self.build_cylinder(degree),
        }
    }

    fn require_quadratic(&self, degree: usize) -> Result<()> {
        if degree < 2 {
            return Err(Error::Benchmark(format!(
                "{} needs degree >= 2 for its exact curved geometry, got {degree}",
                self.name
            )));
        }
        Ok(())
    }

    fn build_straight_beam(&self, degree: usize) -> Result<Model> {
        if degree < 1 {
            return Err(Error::Benchmark("degree must be >= 1".into()));
        }
        let length = STRAIGHT_BEAM_LENGTH;
        let width = 1.0;
        let thickness = length / self.slenderness;
        let coarse = solid_box(
            Point3::new(0.0, 0.0, -thickness / 2.0),
            [length, width, thickness],
        );
        let mut patch = elevate_and_refine(&coarse, degree, [self.n_elems, 1, 1])?;
        if self.distortion_deg > 0.0 {
            apply_in_plane_distortion(&mut patch, length, width, self.distortion_deg.to_radians());
        }

        let mut dofmap = DofMap::new(&patch);
        dofmap.constrain_face(Face::new(0, Side::Min), [true; 3]);

        // Distributed load along the top edge of the free face.
        let forces = edge_load(
            &patch,
            Edge::new(1, [Side::Max, Side::Max]),
            EdgeLoadKind::Uniform(Vector3::new(0.0, 0.0, -BEAM_FORCE)),
        )?;

        let measure_point = unit_to_param(&patch, [1.0, 0.5, 0.0]);
        Ok(Model {
            patch,
            dofmap,
            forces,
            measure_point,
            measure_direction: Vector3::new(0.0, 0.0, -1.0),
        })
    }

    fn build_curved_beam(&self, degree: usize) -> Result<Model> {
        self.require_quadratic(degree)?;
        let radius = CURVED_BEAM_RADIUS;
        let thickness = radius / self.slenderness;
        // The ring is modeled in the standard piecewise-arc NURBS form:
        // one exact rational segment per element, joined with C0
        // continuity (doubled knots), as circular arcs come out of
        // geometry kernels.
        let shell = ArcShell {
            radius,
            thickness,
            angles: (0.0, std::f64::consts::FRAC_PI_2),
            segments: self.n_elems,
            axial_range: (0.0, 1.0),
            e_cos: Vector3::x(),
            e_sin: Vector3::y(),
            e_axial: Vector3::z(),
        };
        let patch = elevate_and_refine(&shell.build()?, degree, [1, 1, 1])?;

        let mut dofmap = DofMap::new(&patch);
        dofmap.constrain_face(Face::new(0, Side::Min), [true; 3]);

        // Radial line load along the exterior edge of the free face.
        let forces = edge_load(
            &patch,
            Edge::new(1, [Side::Max, Side::Max]),
            EdgeLoadKind::Radial {
                center: Point3::origin(),
                axis: Vector3::z(),
                magnitude: BEAM_FORCE,
            },
        )?;

        // Interior edge of the free end, mid-width; the local radial
        // direction there is +y.
        let measure_point = unit_to_param(&patch, [1.0, 0.5, 0.0]);
        Ok(Model {
            patch,
            dofmap,
            forces,
            measure_point,
            measure_direction: Vector3::y(),
        })
    }

    fn build_scordelis(&self, degree: usize) -> Result<Model> {
        self.require_quadratic(degree)?;
        let shell = ArcShell {
            radius: 25.0,
            thickness: 0.25,
            // 40 degrees from the crown to the free edge (classical roof).
            angles: (0.0, 40f64.to_radians()),
            segments: 1,
            axial_range: (0.0, 25.0),
            e_cos: Vector3::z(),
            e_sin: Vector3::x(),
            e_axial: Vector3::y(),
        };
        let patch = elevate_and_refine(&shell.build()?, degree, [self.n_elems, self.n_elems, 1])?;

        let mut dofmap = DofMap::new(&patch);
        // Rigid diaphragm at y = 0: in-plane components fixed, axial free.
        dofmap.constrain_face(Face::new(1, Side::Min), [true, false, true]);
        // Mid-span symmetry plane (normal y).
        dofmap.constrain_face(Face::new(1, Side::Max), [false, true, false]);
        // Crown symmetry plane x = 0 (normal x).
        dofmap.constrain_face(Face::new(0, Side::Min), [true, false, false]);

        let forces = body_load(&patch, Vector3::new(0.0, 0.0, -SCORDELIS_WEIGHT_DENSITY))?;

        // Point A: midside of the free edge, on the midsurface.
        let measure_point = unit_to_param(&patch, [1.0, 1.0, 0.5]);
        Ok(Model {
            patch,
            dofmap,
            forces,
            measure_point,
            measure_direction: Vector3::new(0.0, 0.0, -1.0),
        })
    }

    fn build_hemisphere(&self, degree: usize) -> Result<Model> {
        self.require_quadratic(degree)?;
        let patch = elevate_and_refine(
            &sphere_octant_shell(10.0, 0.04)?,
            degree,
            [self.n_elems, self.n_elems, 1],
        )?;

        let mut dofmap = DofMap::new(&patch);
        // Symmetry plane y = 0 through point A.
        dofmap.constrain_face(Face::new(0, Side::Min), [false, true, false]);
        // Symmetry plane x = 0 through point B.
        dofmap.constrain_face(Face::new(0, Side::Max), [true, false, false]);
        // Apex fixed: the whole collapsed control row.
        dofmap.constrain_face(Face::new(1, Side::Max), [true; 3]);

        // The classical data (reference 0.0924) corresponds to forces of
        // magnitude 1 applied at points A and B of the quarter model, as in
        // the problem sketch. Inward at A, outward at B.
        let f = 1.0;
        let mut forces = point_load(
            &patch,
            PointLocation::Parametric(unit_to_param(&patch, [0.0, 0.0, 0.5])),
            Vector3::new(-f, 0.0, 0.0),
        )?;
        forces += point_load(
            &patch,
            PointLocation::Parametric(unit_to_param(&patch, [1.0, 0.0, 0.5])),
            Vector3::new(0.0, f, 0.0),
        )?;

        // Radial at A, positive inward (along the load).
        let measure_point = unit_to_param(&patch, [0.0, 0.0, 0.5]);
        Ok(Model {
            patch,
            dofmap,
            forces,
            measure_point,
            measure_direction: Vector3::new(-1.0, 0.0, 0.0),
        })
    }

    fn build_cylinder(&self, degree: usize) -> Result<Model> {
        self.require_quadratic(degree)?;
        let shell = ArcShell {
            radius: 300.0,
            thickness: 3.0,
            angles: (0.0, std::f64::consts::FRAC_PI_2),
            segments: 1,
            axial_range: (0.0, 300.0),
            e_cos: Vector3::z(),
            e_sin: Vector3::x(),
            e_axial: Vector3::y(),
        };
        let patch = elevate_and_refine(&shell.build()?, degree, [self.n_elems, self.n_elems, 1])?;

        let mut dofmap = DofMap::new(&patch);
        // Rigid diaphragm at y = 0.
        dofmap.constrain_face(Face::new(1, Side::Min), [true, false, true]);
        // Mid-span symmetry plane (normal y) where the load acts.
        dofmap.constrain_face(Face::new(1, Side::Max), [false, true, false]);
        // Symmetry plane x = 0 through the load line.
        dofmap.constrain_face(Face::new(0, Side::Min), [true, false, false]);
        // Symmetry plane z = 0 at the side.
        dofmap.constrain_face(Face::new(0, Side::Max), [false, false, true]);

        // Eighth model: F / 4 at the load point, pinching inward.
        let forces = point_load(
            &patch,
            PointLocation::Parametric(unit_to_param(&patch, [0.0, 1.0, 0.5])),
            Vector3::new(0.0, 0.0, -0.25),
        )?;

        let measure_point = unit_to_param(&patch, [0.0, 1.0, 0.5]);
        Ok(Model {
            patch,
            dofmap,
            forces,
            measure_point,
            measure_direction: Vector3::new(0.0, 0.0, -1.0),
        })
    }
}

/// Skews the interior control-net columns of the straight beam in plane:
/// the tilt angle is largest at mid-length and fades linearly to zero at
/// both ends.
fn apply_in_plane_distortion(patch: &mut NurbsPatch3d, length: f64, width: f64, theta_max: f64) {
    for p in patch.control_points_mut() {
        let s = (p.x / length).clamp(0.0, 1.0);
        let theta = theta_max * (1.0 - (2.0 * s - 1.0).abs());
        p.x += (p.y - width / 2.0) * theta.tan();
    }
}

/// Runs one benchmark case: assemble, constrain, solve, measure.
pub fn run(case: &BenchmarkCase, formulation: Formulation, degree: usize) -> Result<RunResult> {
    let start = Instant::now();
    let model = case.build_model(degree)?;
    let material = material_matrix(case.youngs_modulus, case.poisson_ratio)?;
    let system = assemble(&model.patch, formulation, &material)
        .map_err(|e| Error::Benchmark(format!("{}: {e}", case.name)))?;
    let reduced = apply_constraints(&system, &model.forces, &model.dofmap)?;
    let solution = solve(&reduced)?;
    let u = evaluate_displacement(&model.patch, &solution.displacements, model.measure_point)?;
    let raw = u.dot(&model.measure_direction);
    Ok(RunResult {
        benchmark: case.name,
        formulation,
        degree,
        n_elems: case.n_elems,
        slenderness: case.slenderness,
        distortion_deg: case.distortion_deg,
        raw_deflection: raw,
        normalized_deflection: raw / case.reference,
        wall_time: start.elapsed(),
    })
}
