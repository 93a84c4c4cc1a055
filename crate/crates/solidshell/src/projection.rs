//! Element-local L2 projections onto reduced tensor-product polynomial
//! spaces, in point-value matrix form.
//!
//! A projector maps the values of a scalar field at the (p+1)^3 tensor
//! Gauss points of an element to the values of its L2 projection (in the
//! parametric measure) at the same points:
//!
//! ```text
//! P = Theta (Theta^T W Theta)^-1 Theta^T W
//! ```
//!
//! where `Theta` samples a tensor Legendre basis of the reduced space at
//! the quadrature points and `W` holds the quadrature weights. Because the
//! projection lives on the parametric element and is affine-invariant per
//! direction, the same matrix serves every element of a patch.
//!
//! The third parametric direction is the through-thickness one and is never
//! reduced, so `P` is block diagonal with p+1 identical `(p+1)^2` blocks.

use nalgebra::DMatrix;

use crate::quadrature::{gauss_legendre, tensor_rule};
use crate::{Error, Result};

/// Per-direction polynomial degrees of a reduced space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedSpace {
    pub degrees: [usize; 3],
}

impl ReducedSpace {
    pub fn new(degrees: [usize; 3]) -> Self {
        Self { degrees }
    }

    /// Space for the 11 and 13 covariant strain components: Q_{p-1, p, p}.
    pub fn for_comp_11(p: usize) -> Self {
        Self::new([p - 1, p, p])
    }

    /// Space for the 22 and 23 covariant strain components: Q_{p, p-1, p}.
    pub fn for_comp_22(p: usize) -> Self {
        Self::new([p, p - 1, p])
    }

    /// Space for the 12 component (and the all-Cartesian variant):
    /// Q_{p-1, p-1, p}.
    pub fn for_comp_12(p: usize) -> Self {
        Self::new([p - 1, p - 1, p])
    }

    pub fn dim(&self) -> usize {
        (self.degrees[0] + 1) * (self.degrees[1] + 1) * (self.degrees[2] + 1)
    }
}

/// Point-value form of one element-local L2 projection.
#[derive(Debug, Clone)]
pub struct ProjectionOperator {
    degree: usize,
    space: ReducedSpace,
    matrix: DMatrix<f64>,
    block: Option<DMatrix<f64>>,
}

impl ProjectionOperator {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> ReducedSpace {
        self.space
    }

    /// The full n_q x n_q matrix, n_q = (p+1)^3.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The (p+1)^2 x (p+1)^2 diagonal block, present whenever the
    /// through-thickness degree is unreduced.
    pub fn block(&self) -> Option<&DMatrix<f64>> {
        self.block.as_ref()
    }

    pub fn n_q(&self) -> usize {
        self.matrix.nrows()
    }

    /// Projects point values sampled at the element's tensor Gauss points
    /// (lexicographic order, first direction fastest).
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.n_q() {
            return Err(Error::SampleLengthMismatch {
                got: samples.len(),
                expected: self.n_q(),
            });
        }
        let mut out = vec![0.0; samples.len()];
        self.apply_into(samples, &mut out);
        Ok(out)
    }

    /// `apply` without the allocation; lengths must match `n_q`.
    pub fn apply_into(&self, samples: &[f64], out: &mut [f64]) {
        let n = self.n_q();
        debug_assert_eq!(samples.len(), n);
        debug_assert_eq!(out.len(), n);
        match &self.block {
            Some(block) => {
                // Block-diagonal fast path: one identical block per
                // through-thickness quadrature index.
                let bs = block.nrows();
                for chunk in 0..(n / bs) {
                    let off = chunk * bs;
                    for r in 0..bs {
                        let mut acc = 0.0;
                        for c in 0..bs {
                            acc += block[(r, c)] * samples[off + c];
                        }
                        out[off + r] = acc;
                    }
                }
            }
            None => {
                for r in 0..n {
                    let mut acc = 0.0;
                    for c in 0..n {
                        acc += self.matrix[(r, c)] * samples[c];
                    }
                    out[r] = acc;
                }
            }
        }
    }
}

/// Legendre polynomial values L_0..L_max at `x`.
fn legendre_values(max_degree: usize, x: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(max_degree + 1);
    v.push(1.0);
    if max_degree >= 1 {
        v.push(x);
    }
    for k in 1..max_degree {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * v[k as usize] - k * v[k as usize - 1]) / (k + 1.0);
        v.push(next);
    }
    v
}

/// Builds the projector onto `space` for elements of degree `p`, using the
/// (p+1)-point tensor Gauss rule.
pub fn build_projector(p: usize, space: ReducedSpace) -> Result<ProjectionOperator> {
    if space.degrees.iter().any(|&d| d > p) {
        return Err(Error::InvalidPatch(format!(
            "reduced degrees {:?} exceed element degree {p}",
            space.degrees
        )));
    }
    let rule_1d = gauss_legendre(p + 1)?;
    let rule = tensor_rule([&rule_1d, &rule_1d, &rule_1d]);
    let n_q = rule.len();
    let dim = space.dim();
    if dim > n_q {
        return Err(Error::UnderdeterminedProjection { dim, n_q });
    }

    // Theta: rows = quadrature points, columns = tensor Legendre basis of
    // the reduced space (first direction fastest in both orderings).
    let mut theta = DMatrix::zeros(n_q, dim);
    for (q, point) in rule.points.iter().enumerate() {
        let lx = legendre_values(space.degrees[0], point[0]);
        let ly = legendre_values(space.degrees[1], point[1]);
        let lz = legendre_values(space.degrees[2], point[2]);
        let mut col = 0;
        for c in 0..=space.degrees[2] {
            for b in 0..=space.degrees[1] {
                for a in 0..=space.degrees[0] {
                    theta[(q, col)] = lx[a] * ly[b] * lz[c];
                    col += 1;
                }
            }
        }
    }

    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(rule.weights.clone()));
    let gram = theta.transpose() * &w * &theta;
    let gram_inv = gram
        .cholesky()
        .ok_or(Error::UnderdeterminedProjection { dim, n_q })?
        .inverse();
    let matrix = &theta * gram_inv * theta.transpose() * &w;

    let block = if space.degrees[2] == p {
        let bs = (p + 1) * (p + 1);
        Some(matrix.view((0, 0), (bs, bs)).into_owned())
    } else {
        None
    };

    Ok(ProjectionOperator {
        degree: p,
        space,
        matrix,
        block,
    })
}

/// The closed-form diagonal blocks S^(1,1), S^(2,2), S^(1,2) for p = 1, 2.
///
/// Entries are exact rationals; degrees 3 and above fall back to
/// [`build_projector`].
pub fn appendix_constants(p: usize) -> Result<[DMatrix<f64>; 3]> {
    match p {
        1 => {
            let s11 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0, 1.0, 0.0, 0.0, //
                    1.0, 1.0, 0.0, 0.0, //
                    0.0, 0.0, 1.0, 1.0, //
                    0.0, 0.0, 1.0, 1.0,
                ],
            ) / 2.0;
            let s22 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0, 0.0, 1.0, 0.0, //
                    0.0, 1.0, 0.0, 1.0, //
                    1.0, 0.0, 1.0, 0.0, //
                    0.0, 1.0, 0.0, 1.0,
                ],
            ) / 2.0;
            let s12 = DMatrix::from_element(4, 4, 0.25);
            Ok([s11, s22, s12])
        }
        2 => {
            let s11 = DMatrix::from_row_slice(
                9,
                9,
                &[
                    14.0, 8.0, -4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
                    5.0, 8.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
                    -4.0, 8.0, 14.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 14.0, 8.0, -4.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 5.0, 8.0, 5.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, -4.0, 8.0, 14.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 14.0, 8.0, -4.0, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0, 8.0, 5.0, //
                    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -4.0, 8.0, 14.0,
                ],
            ) / 18.0;
            let s22 = DMatrix::from_row_slice(
                9,
                9,
                &[
                    14.0, 0.0, 0.0, 8.0, 0.0, 0.0, -4.0, 0.0, 0.0, //
                    0.0, 14.0, 0.0, 0.0, 8.0, 0.0, 0.0, -4.0, 0.0, //
                    0.0, 0.0, 14.0, 0.0, 0.0, 8.0, 0.0, 0.0, -4.0, //
                    5.0, 0.0, 0.0, 8.0, 0.0, 0.0, 5.0, 0.0, 0.0, //
                    0.0, 5.0, 0.0, 0.0, 8.0, 0.0, 0.0, 5.0, 0.0, //
                    0.0, 0.0, 5.0, 0.0, 0.0, 8.0, 0.0, 0.0, 5.0, //
                    -4.0, 0.0, 0.0, 8.0, 0.0, 0.0, 14.0, 0.0, 0.0, //
                    0.0, -4.0, 0.0, 0.0, 8.0, 0.0, 0.0, 14.0, 0.0, //
                    0.0, 0.0, -4.0, 0.0, 0.0, 8.0, 0.0, 0.0, 14.0,
                ],
            ) / 18.0;
            let s12 = DMatrix::from_row_slice(
                9,
                9,
                &[
                    196.0, 112.0, -56.0, 112.0, 64.0, -32.0, -56.0, -32.0, 16.0, //
                    70.0, 112.0, 70.0, 40.0, 64.0, 40.0, -20.0, -32.0, -20.0, //
                    -56.0, 112.0, 196.0, -32.0, 64.0, 112.0, 16.0, -32.0, -56.0, //
                    70.0, 40.0, -20.0, 112.0, 64.0, -32.0, 70.0, 40.0, -20.0, //
                    25.0, 40.0, 25.0, 40.0, 64.0, 40.0, 25.0, 40.0, 25.0, //
                    -20.0, 40.0, 70.0, -32.0, 64.0, 112.0, -20.0, 40.0, 70.0, //
                    -56.0, -32.0, 16.0, 112.0, 64.0, -32.0, 196.0, 112.0, -56.0, //
                    -20.0, -32.0, -20.0, 40.0, 64.0, 40.0, 70.0, 112.0, 70.0, //
                    16.0, -32.0, -56.0, -32.0, 64.0, 112.0, -56.0, 112.0, 196.0,
                ],
            ) / 324.0;
            Ok([s11, s22, s12])
        }
        other => Err(Error::NoClosedFormProjector(other)),
    }
}

/// The three projectors used by the locking-alleviated formulations, built
/// once per degree and shared across all elements.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    pub comp_11: ProjectionOperator,
    pub comp_22: ProjectionOperator,
    pub comp_12: ProjectionOperator,
}

impl ProjectorSet {
    pub fn new(p: usize) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidPatch("degree must be >= 1".into()));
        }
        Ok(Self {
            comp_11: build_projector(p, ReducedSpace::for_comp_11(p))?,
            comp_22: build_projector(p, ReducedSpace::for_comp_22(p))?,
            comp_12: build_projector(p, ReducedSpace::for_comp_12(p))?,
        })
    }

    pub fn degree(&self) -> usize {
        self.comp_11.degree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_legendre, tensor_rule};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn expand_block_diagonal(block: &DMatrix<f64>, copies: usize) -> DMatrix<f64> {
        let bs = block.nrows();
        let mut full = DMatrix::zeros(bs * copies, bs * copies);
        for c in 0..copies {
            full.view_mut((c * bs, c * bs), (bs, bs)).copy_from(block);
        }
        full
    }

    #[test]
    fn identity_when_projecting_onto_full_space() {
        for p in 1..=3 {
            let op = build_projector(p, ReducedSpace::new([p, p, p])).unwrap();
            let n = op.n_q();
            let eye = DMatrix::<f64>::identity(n, n);
            assert_relative_eq!(op.matrix(), &eye, epsilon = 1e-12);
        }
    }

    #[test]
    fn blocks_match_appendix_constants_p1_and_p2() {
        for p in [1usize, 2] {
            let [s11, s22, s12] = appendix_constants(p).unwrap();
            let built = [
                build_projector(p, ReducedSpace::for_comp_11(p)).unwrap(),
                build_projector(p, ReducedSpace::for_comp_22(p)).unwrap(),
                build_projector(p, ReducedSpace::for_comp_12(p)).unwrap(),
            ];
            for (op, s) in built.iter().zip([&s11, &s22, &s12]) {
                let block = op.block().expect("thickness degree unreduced");
                assert_eq!(block.nrows(), (p + 1) * (p + 1));
                for r in 0..block.nrows() {
                    for c in 0..block.ncols() {
                        assert!(
                            (block[(r, c)] - s[(r, c)]).abs() < 1e-13,
                            "p = {p}, entry ({r}, {c}): {} vs {}",
                            block[(r, c)],
                            s[(r, c)]
                        );
                    }
                }
                // Full matrix = block-diagonal expansion with p+1 copies.
                let full = expand_block_diagonal(s, p + 1);
                assert_relative_eq!(op.matrix(), &full, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn appendix_constants_spot_values() {
        let [_, s22, s12] = appendix_constants(1).unwrap();
        assert_eq!(s22[(0, 0)], 0.5);
        assert_eq!(s22[(0, 2)], 0.5);
        assert_eq!(s22[(0, 1)], 0.0);
        assert_eq!(s12[(3, 3)], 0.25);
        let [s11, s22, _] = appendix_constants(2).unwrap();
        assert_relative_eq!(s11[(0, 0)], 14.0 / 18.0);
        assert_relative_eq!(s11[(0, 2)], -4.0 / 18.0);
        let expected_row = [14.0, 0.0, 0.0, 8.0, 0.0, 0.0, -4.0, 0.0, 0.0];
        for (c, &v) in expected_row.iter().enumerate() {
            assert_relative_eq!(s22[(0, c)], v / 18.0);
        }
        assert!(appendix_constants(3).is_err());
    }

    #[test]
    fn p1_block_averages_along_first_direction() {
        // S^(1,1) for p = 1 averages each (eta, zeta) fiber over xi:
        // samples (1, 3, 5, 9) -> (2, 2, 7, 7) per thickness block.
        let op = build_projector(1, ReducedSpace::for_comp_11(1)).unwrap();
        let samples = [1.0, 3.0, 5.0, 9.0, 1.0, 3.0, 5.0, 9.0];
        let out = op.apply(&samples).unwrap();
        let expected = [2.0, 2.0, 7.0, 7.0, 2.0, 2.0, 7.0, 7.0];
        for (o, e) in out.iter().zip(expected) {
            assert_relative_eq!(*o, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn constants_are_invariant() {
        for p in 1..=3 {
            for space in [
                ReducedSpace::for_comp_11(p),
                ReducedSpace::for_comp_22(p),
                ReducedSpace::for_comp_12(p),
            ] {
                let op = build_projector(p, space).unwrap();
                let ones = vec![1.0; op.n_q()];
                let out = op.apply(&ones).unwrap();
                for v in out {
                    assert_relative_eq!(v, 1.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn p2_s12_rows_sum_to_one() {
        let [_, _, s12] = appendix_constants(2).unwrap();
        for r in 0..9 {
            let sum: f64 = (0..9).map(|c| s12[(r, c)]).sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-14);
        }
        // Equivalent statement through apply: all-ones stays all-ones.
        let op = build_projector(2, ReducedSpace::for_comp_12(2)).unwrap();
        let out = op.apply(&vec![1.0; 27]).unwrap();
        for v in out {
            assert_relative_eq!(v, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn idempotent_and_self_adjoint() {
        for p in 1..=3 {
            for space in [
                ReducedSpace::for_comp_11(p),
                ReducedSpace::for_comp_22(p),
                ReducedSpace::for_comp_12(p),
                ReducedSpace::new([p - 1, p, p - 1]),
            ] {
                let op = build_projector(p, space).unwrap();
                let m = op.matrix();
                let m2 = m * m;
                assert_relative_eq!(&m2, m, epsilon = 1e-12);
                // W P = P^T W.
                let rule_1d = gauss_legendre(p + 1).unwrap();
                let rule = tensor_rule([&rule_1d, &rule_1d, &rule_1d]);
                let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(rule.weights));
                let wp = &w * m;
                let ptw = m.transpose() * &w;
                assert_relative_eq!(&wp, &ptw, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn reproduces_polynomials_of_the_reduced_space() {
        let p = 2;
        let space = ReducedSpace::for_comp_11(p); // degrees (1, 2, 2)
        let op = build_projector(p, space).unwrap();
        let rule_1d = gauss_legendre(p + 1).unwrap();
        let rule = tensor_rule([&rule_1d, &rule_1d, &rule_1d]);
        let f = |x: f64, y: f64, z: f64| (0.3 - 1.7 * x) * (1.0 + y + 0.5 * y * y) * (z * z - z);
        let samples: Vec<f64> = rule.points.iter().map(|q| f(q[0], q[1], q[2])).collect();
        let out = op.apply(&samples).unwrap();
        for (o, s) in out.iter().zip(&samples) {
            assert_relative_eq!(o, s, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn p2_projection_of_xi_squared_is_best_linear_fit() {
        // L2 projection of xi^2 onto degree-1 polynomials on [-1, 1] is the
        // constant 1/3 (Legendre expansion: xi^2 = 1/3 + 2/3 L_2).
        let op = build_projector(2, ReducedSpace::for_comp_11(2)).unwrap();
        let rule_1d = gauss_legendre(3).unwrap();
        let rule = tensor_rule([&rule_1d, &rule_1d, &rule_1d]);
        let samples: Vec<f64> = rule.points.iter().map(|q| q[0] * q[0]).collect();
        let out = op.apply(&samples).unwrap();
        for v in out {
            assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn oversized_space_is_rejected() {
        assert!(matches!(
            build_projector(2, ReducedSpace::new([3, 2, 2])),
            Err(Error::InvalidPatch(_))
        ));
    }

    #[test]
    fn sample_length_mismatch_is_rejected() {
        let op = build_projector(1, ReducedSpace::for_comp_12(1)).unwrap();
        assert!(matches!(
            op.apply(&[1.0, 2.0]),
            Err(Error::SampleLengthMismatch { .. })
        ));
    }

    #[test]
    fn lexicographic_ordering_is_load_bearing() {
        // Feeding samples ordered with the second direction running fastest
        // into the closed-form blocks computes a different projection:
        // conjugating P by the axis-swap permutation must change it.
        for p in [1usize, 2] {
            let op = build_projector(p, ReducedSpace::for_comp_11(p)).unwrap();
            let m = op.matrix();
            let n1 = p + 1;
            let perm = |q: usize| {
                let i = q % n1;
                let j = (q / n1) % n1;
                let k = q / (n1 * n1);
                j + n1 * (i + n1 * k)
            };
            let n = op.n_q();
            let mut permuted = DMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    permuted[(perm(r), perm(c))] = m[(r, c)];
                }
            }
            let diff = (&permuted - m).abs().max();
            assert!(
                diff > 0.4,
                "axis-swap permutation must change the operator (p = {p}, diff = {diff})"
            );
        }
    }

    proptest! {
        #[test]
        fn projection_never_increases_weighted_norm(
            p in 1usize..=3,
            which in 0usize..3,
            seed in any::<u64>(),
        ) {
            let space = match which {
                0 => ReducedSpace::for_comp_11(p),
                1 => ReducedSpace::for_comp_22(p),
                _ => ReducedSpace::for_comp_12(p),
            };
            let op = build_projector(p, space).unwrap();
            let rule_1d = gauss_legendre(p + 1).unwrap();
            let rule = tensor_rule([&rule_1d, &rule_1d, &rule_1d]);
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            let samples: Vec<f64> = (0..op.n_q()).map(|_| next()).collect();
            let out = op.apply(&samples).unwrap();
            let norm = |v: &[f64]| -> f64 {
                v.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum()
            };
            // L2 projections are contractions in the weighted norm.
            prop_assert!(norm(&out) <= norm(&samples) * (1.0 + 1e-12) + 1e-12);
        }
    }
}
