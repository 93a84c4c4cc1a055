//! B-spline / NURBS basis evaluation and tensor-product patches.
//!
//! Univariate bases use open (clamped) knot vectors and the Cox-de Boor
//! recurrence; trivariate rational bases are formed as weighted tensor
//! products. Refinement (knot insertion, degree elevation) operates on
//! homogeneous coordinates so the geometric map is preserved exactly.

mod patch;
mod refine;
#[cfg(test)]
pub(crate) mod test_geometry;

pub use patch::{eval_nurbs_3d, BasisEval, NurbsPatch3d, PatchEval};
pub use refine::{elevate_degree, elevate_to_degrees, insert_knots, refine_to_elements};

use crate::{Error, Result};

/// An open (clamped) knot vector of a fixed polynomial degree.
///
/// The number of basis functions is `knots.len() - degree - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidKnotVector("degree must be >= 1".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::InvalidKnotVector(format!(
                "need at least {} knots for degree {}, got {}",
                2 * (degree + 1),
                degree,
                knots.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnotVector(
                "knots must be non-decreasing".into(),
            ));
        }
        let first = knots[0];
        let last = *knots.last().unwrap();
        if first == last {
            return Err(Error::InvalidKnotVector("zero-length domain".into()));
        }
        let lead = knots.iter().take_while(|&&k| k == first).count();
        let trail = knots.iter().rev().take_while(|&&k| k == last).count();
        if lead != degree + 1 || trail != degree + 1 {
            return Err(Error::InvalidKnotVector(format!(
                "open knot vector requires end multiplicity exactly {} (got {lead} and {trail})",
                degree + 1
            )));
        }
        Ok(Self { degree, knots })
    }

    /// Uniform open knot vector with `n_elems` equal spans on [0, 1].
    pub fn uniform(degree: usize, n_elems: usize) -> Result<Self> {
        if n_elems == 0 {
            return Err(Error::InvalidKnotVector("need at least one span".into()));
        }
        let mut knots = vec![0.0; degree];
        for i in 0..=n_elems {
            knots.push(i as f64 / n_elems as f64);
        }
        knots.extend(std::iter::repeat_n(1.0, degree));
        Self::new(degree, knots)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Nonempty knot spans as `(span_index, t_min, t_max)`. Each span is one
    /// Bezier element.
    pub fn spans(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        let n = self.num_basis();
        (p..n)
            .filter(|&s| self.knots[s + 1] > self.knots[s])
            .map(|s| (s, self.knots[s], self.knots[s + 1]))
            .collect()
    }

    /// Multiplicity of `u` among the interior knots.
    pub fn interior_multiplicity(&self, u: f64) -> usize {
        self.knots.iter().filter(|&&k| k == u).count()
    }

    /// Greville abscissae (one per basis function).
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.num_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Index of the knot span containing `t`.
    pub fn find_span(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideDomain {
                value: t,
                min: lo,
                max: hi,
                direction: 0,
            });
        }
        let n = self.num_basis();
        if t >= self.knots[n] {
            return Ok(n - 1);
        }
        let mut low = self.degree;
        let mut high = n;
        while high - low > 1 {
            let mid = (low + high) / 2;
            if t < self.knots[mid] {
                high = mid;
            } else {
                low = mid;
            }
        }
        Ok(low)
    }

    /// Values and derivatives of the `degree + 1` basis functions that are
    /// nonzero at `t`.
    ///
    /// Returns `(first_index, ders)` where `ders[k][j]` is the k-th
    /// derivative of basis function `first_index + j`.
    pub fn eval_basis(&self, t: f64, n_derivs: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        let span = self.find_span(t)?;
        let ders = self.ders_basis_funs(span, t, n_derivs);
        Ok((span - self.degree, ders))
    }

    /// Cox-de Boor recurrence with derivatives (the standard triangular
    /// table formulation).
    fn ders_basis_funs(&self, span: usize, t: f64, n_derivs: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let u = &self.knots;
        let nd = n_derivs.min(p);

        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = t - u[span + 1 - j];
            right[j] = u[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; n_derivs + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        if nd == 0 {
            return ders;
        }

        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=nd {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize {
                    k - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][(rk + j as isize) as usize];
                    d += a[s2][j] * ndu[(rk + j as isize) as usize][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }

        let mut factor = p as f64;
        for k in 1..=nd {
            for j in 0..=p {
                ders[k][j] *= factor;
            }
            factor *= (p - k) as f64;
        }
        ders
    }
}

/// Values and derivatives of the nonzero B-spline basis functions at `t`.
///
/// Convenience wrapper over [`KnotVector::eval_basis`] returning the p+1
/// values and first `n_derivs` derivative rows.
pub fn eval_bspline_basis(
    kv: &KnotVector,
    t: f64,
    n_derivs: usize,
) -> Result<(usize, Vec<Vec<f64>>)> {
    kv.eval_basis(t, n_derivs)
}
