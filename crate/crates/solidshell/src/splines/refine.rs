//! Geometry-preserving refinement: knot insertion and degree elevation.
//!
//! Both operate on homogeneous control points line by line along one
//! parametric direction, so rational patches stay exact.

use nalgebra::Point3;

use super::{KnotVector, NurbsPatch3d};
use crate::{Error, Result};

type Hom = [f64; 4];

fn lerp(a: Hom, b: Hom, alpha: f64) -> Hom {
    [
        alpha * b[0] + (1.0 - alpha) * a[0],
        alpha * b[1] + (1.0 - alpha) * a[1],
        alpha * b[2] + (1.0 - alpha) * a[2],
        alpha * b[3] + (1.0 - alpha) * a[3],
    ]
}

fn axpy(acc: &mut Hom, coeff: f64, x: Hom) {
    for d in 0..4 {
        acc[d] += coeff * x[d];
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Applies a per-line transform along `direction` and rebuilds the patch
/// with the given knot vector in that direction.
fn map_lines(
    patch: &NurbsPatch3d,
    direction: usize,
    new_kv: KnotVector,
    transform: impl Fn(&[Hom]) -> Vec<Hom>,
) -> Result<NurbsPatch3d> {
    let dims = patch.dims();
    let hom = patch.homogeneous();
    let mut new_dims = dims;
    new_dims[direction] = new_kv.num_basis();

    let flat = |ijk: [usize; 3], d: [usize; 3]| ijk[0] + d[0] * (ijk[1] + d[1] * ijk[2]);
    let (da, db) = match direction {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };

    let mut new_hom = vec![[0.0; 4]; new_dims[0] * new_dims[1] * new_dims[2]];
    for ib in 0..dims[db] {
        for ia in 0..dims[da] {
            let mut line = Vec::with_capacity(dims[direction]);
            for i in 0..dims[direction] {
                let mut ijk = [0usize; 3];
                ijk[direction] = i;
                ijk[da] = ia;
                ijk[db] = ib;
                line.push(hom[flat(ijk, dims)]);
            }
            let new_line = transform(&line);
            debug_assert_eq!(new_line.len(), new_dims[direction]);
            for (i, &h) in new_line.iter().enumerate() {
                let mut ijk = [0usize; 3];
                ijk[direction] = i;
                ijk[da] = ia;
                ijk[db] = ib;
                new_hom[flat(ijk, new_dims)] = h;
            }
        }
    }

    let mut cps = Vec::with_capacity(new_hom.len());
    let mut weights = Vec::with_capacity(new_hom.len());
    for h in &new_hom {
        let w = h[3];
        cps.push(Point3::new(h[0] / w, h[1] / w, h[2] / w));
        weights.push(w);
    }

    let mut kvs = [
        patch.knot_vector(0).clone(),
        patch.knot_vector(1).clone(),
        patch.knot_vector(2).clone(),
    ];
    kvs[direction] = new_kv;
    NurbsPatch3d::new(kvs, cps, weights)
}

/// Single-knot Boehm insertion on a homogeneous control polygon.
fn insert_one(kv: &KnotVector, line: &[Hom], u: f64) -> Vec<Hom> {
    let p = kv.degree();
    let knots = kv.knots();
    let k = kv.find_span(u).expect("validated earlier");
    let mut out = Vec::with_capacity(line.len() + 1);
    for i in 0..=(k - p) {
        out.push(line[i]);
    }
    for i in (k - p + 1)..=k {
        let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
        out.push(lerp(line[i - 1], line[i], alpha));
    }
    for i in k..line.len() {
        out.push(line[i]);
    }
    out
}

/// Inserts knots along one direction. The geometric map is unchanged.
pub fn insert_knots(
    patch: &NurbsPatch3d,
    direction: usize,
    new_knots: &[f64],
) -> Result<NurbsPatch3d> {
    let mut result = patch.clone();
    let mut sorted = new_knots.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &u in &sorted {
        let kv = result.knot_vector(direction);
        let (lo, hi) = kv.domain();
        if !(u > lo && u < hi) {
            return Err(Error::InvalidKnotInsertion(
                u,
                format!("must lie strictly inside ({lo}, {hi})"),
            ));
        }
        if kv.interior_multiplicity(u) >= kv.degree() {
            return Err(Error::InvalidKnotInsertion(
                u,
                format!("already at full multiplicity {}", kv.degree()),
            ));
        }
        let p = kv.degree();
        let mut knots = kv.knots().to_vec();
        let pos = knots.partition_point(|&k| k <= u);
        knots.insert(pos, u);
        let new_kv = KnotVector::new(p, knots)?;
        let old_kv = kv.clone();
        result = map_lines(&result, direction, new_kv, |line| {
            insert_one(&old_kv, line, u)
        })?;
    }
    Ok(result)
}

/// Uniform refinement helper: splits the domain into `n_elems` equal spans
/// (existing interior knots must already be a subset of the uniform grid).
pub fn refine_to_elements(
    patch: &NurbsPatch3d,
    direction: usize,
    n_elems: usize,
) -> Result<NurbsPatch3d> {
    let kv = patch.knot_vector(direction);
    let (lo, hi) = kv.domain();
    let mut add = Vec::new();
    for i in 1..n_elems {
        let u = lo + (hi - lo) * i as f64 / n_elems as f64;
        if kv.interior_multiplicity(u) == 0 {
            add.push(u);
        }
    }
    insert_knots(patch, direction, &add)
}

/// Degree elevation by one on a homogeneous control polygon, preserving the
/// geometric map and the continuity at every interior knot (one-pass
/// Bezier-decompose / elevate / recompose scheme).
fn elevate_curve(kv: &KnotVector, line: &[Hom]) -> (KnotVector, Vec<Hom>) {
    let p = kv.degree();
    let knots = kv.knots();
    let t = 1usize;
    let ph = p + t;
    let n = line.len() - 1;
    let m = n + p + 1;

    let mut distinct = 1usize;
    for i in 1..knots.len() {
        if knots[i] != knots[i - 1] {
            distinct += 1;
        }
    }
    let new_knot_count = knots.len() + distinct * t;
    let new_cp_count = new_knot_count - ph - 1;

    // Coefficients expressing elevated Bernstein polynomials in the original
    // basis.
    let ph2 = ph / 2;
    let mut bezalfs = vec![vec![0.0; p + 1]; ph + 1];
    bezalfs[0][0] = 1.0;
    bezalfs[ph][p] = 1.0;
    for i in 1..=ph2 {
        let inv = 1.0 / binom(ph, i);
        for j in i.saturating_sub(t)..=p.min(i) {
            bezalfs[i][j] = inv * binom(p, j) * binom(t, i - j);
        }
    }
    for i in (ph2 + 1)..ph {
        for j in i.saturating_sub(t)..=p.min(i) {
            bezalfs[i][j] = bezalfs[ph - i][p - j];
        }
    }

    let mut qw = vec![[0.0; 4]; new_cp_count];
    let mut uh = vec![0.0; new_knot_count];
    let mut bpts = vec![[0.0; 4]; p + 1];
    let mut ebpts = vec![[0.0; 4]; ph + 1];
    let mut next_bpts = vec![[0.0; 4]; p.saturating_sub(1)];
    let mut alfs = vec![0.0; p.saturating_sub(1)];

    let mut kind = ph + 1;
    let mut r: i64 = -1;
    let mut a = p;
    let mut b = p + 1;
    let mut cind = 1usize;
    let mut ua = knots[0];

    qw[0] = line[0];
    for u in uh.iter_mut().take(ph + 1) {
        *u = ua;
    }
    bpts[..(p + 1)].copy_from_slice(&line[..(p + 1)]);

    while b < m {
        let i0 = b;
        while b < m && knots[b] == knots[b + 1] {
            b += 1;
        }
        let mul = b - i0 + 1;
        let ub = knots[b];
        let oldr = r;
        r = p as i64 - mul as i64;
        let lbz = if oldr > 0 {
            ((oldr as usize) + 2) / 2
        } else {
            1
        };
        let rbz = if r > 0 { ph - (r as usize + 1) / 2 } else { ph };

        // Insert ub until the current segment is Bezier.
        if r > 0 {
            let numer = ub - ua;
            for k in ((mul + 1)..=p).rev() {
                alfs[k - mul - 1] = numer / (knots[a + k] - ua);
            }
            for j in 1..=(r as usize) {
                let save = r as usize - j;
                let s = mul + j;
                for k in (s..=p).rev() {
                    bpts[k] = lerp(bpts[k - 1], bpts[k], alfs[k - s]);
                }
                next_bpts[save] = bpts[p];
            }
        }

        // Elevate the Bezier segment.
        for (i, e) in ebpts.iter_mut().enumerate().take(ph + 1).skip(lbz) {
            *e = [0.0; 4];
            for j in i.saturating_sub(t)..=p.min(i) {
                axpy(e, bezalfs[i][j], bpts[j]);
            }
        }

        // Remove the knot ua to restore its original continuity.
        if oldr > 1 {
            let mut first = kind as i64 - 2;
            let mut last = kind as i64;
            let den = ub - ua;
            let bet = (ub - uh[kind - 1]) / den;
            for tr in 1..oldr {
                let mut i = first;
                let mut j = last;
                let mut kj = j - kind as i64 + 1;
                while j - i > tr {
                    if i < cind as i64 {
                        let alf = (ub - uh[i as usize]) / (ua - uh[i as usize]);
                        qw[i as usize] = lerp(qw[(i - 1) as usize], qw[i as usize], alf);
                    }
                    if j >= lbz as i64 {
                        if j - tr <= kind as i64 - ph as i64 + oldr {
                            let gam = (ub - uh[(j - tr) as usize]) / den;
                            ebpts[kj as usize] =
                                lerp(ebpts[(kj + 1) as usize], ebpts[kj as usize], gam);
                        } else {
                            ebpts[kj as usize] =
                                lerp(ebpts[(kj + 1) as usize], ebpts[kj as usize], bet);
                        }
                    }
                    i += 1;
                    j -= 1;
                    kj -= 1;
                }
                first -= 1;
                last += 1;
            }
        }

        // Load the knot ua into the elevated knot vector.
        if a != p {
            for _ in 0..(ph as i64 - oldr) {
                uh[kind] = ua;
                kind += 1;
            }
        }
        // Load the elevated control points for this segment.
        for e in ebpts.iter().take(rbz + 1).skip(lbz) {
            qw[cind] = *e;
            cind += 1;
        }

        if b < m {
            debug_assert!(r >= 0);
            for j in 0..(r as usize) {
                bpts[j] = next_bpts[j];
            }
            for j in (r.max(0) as usize)..=p {
                bpts[j] = line[b - p + j];
            }
            a = b;
            b += 1;
            ua = ub;
        } else {
            for i in 0..=ph {
                uh[kind + i] = ub;
            }
        }
    }

    let new_kv = KnotVector::new(ph, uh).expect("elevated knot vector is valid");
    debug_assert_eq!(new_kv.num_basis(), qw.len());
    (new_kv, qw)
}

/// Raises the degree along one direction by one. The geometric map and the
/// continuity at every interior knot are unchanged.
pub fn elevate_degree(patch: &NurbsPatch3d, direction: usize) -> Result<NurbsPatch3d> {
    let kv = patch.knot_vector(direction).clone();
    // Dry-run on a single line to obtain the elevated knot vector; map_lines
    // then reuses the same transform for every line.
    let dims = patch.dims();
    let hom = patch.homogeneous();
    let mut first_line = Vec::with_capacity(dims[direction]);
    for i in 0..dims[direction] {
        let mut ijk = [0usize; 3];
        ijk[direction] = i;
        first_line.push(hom[patch.flat_index(ijk)]);
    }
    let (new_kv, _) = elevate_curve(&kv, &first_line);
    map_lines(patch, direction, new_kv, |line| elevate_curve(&kv, line).1)
}

/// Elevates every direction until the patch reaches `degrees`.
pub fn elevate_to_degrees(patch: &NurbsPatch3d, degrees: [usize; 3]) -> Result<NurbsPatch3d> {
    let mut out = patch.clone();
    for d in 0..3 {
        let current = out.knot_vector(d).degree();
        if degrees[d] < current {
            return Err(Error::InvalidPatch(format!(
                "cannot lower degree {current} to {} in direction {d}",
                degrees[d]
            )));
        }
        for _ in current..degrees[d] {
            out = elevate_degree(&out, d)?;
        }
    }
    Ok(out)
}
