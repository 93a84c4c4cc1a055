//! Isotropic linear-elastic material in Voigt form.

use nalgebra::Matrix6;

use crate::{Error, Result};

/// 3D isotropic Hooke law in Voigt order (xx, yy, zz, xy, xz, yz) with
/// engineering shear strains (factor 2 on the off-diagonal components).
#[derive(Debug, Clone)]
pub struct ElasticityMatrix {
    youngs_modulus: f64,
    poisson_ratio: f64,
    d: Matrix6<f64>,
}

impl ElasticityMatrix {
    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.d
    }
}

/// Assembles the elasticity matrix from the Lame constants.
pub fn material_matrix(youngs_modulus: f64, poisson_ratio: f64) -> Result<ElasticityMatrix> {
    if !(youngs_modulus > 0.0) {
        return Err(Error::InvalidMaterial(format!(
            "Young modulus must be positive, got {youngs_modulus}"
        )));
    }
    if !(poisson_ratio > -1.0 && poisson_ratio < 0.5) {
        return Err(Error::InvalidMaterial(format!(
            "Poisson ratio must lie in (-1, 0.5), got {poisson_ratio}"
        )));
    }
    let lambda =
        youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    let mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));

    let mut d = Matrix6::zeros();
    for i in 0..3 {
        for j in 0..3 {
            d[(i, j)] = if i == j { lambda + 2.0 * mu } else { lambda };
        }
        // Shear block acts on engineering strains: sigma_ij = mu * (2 eps_ij).
        d[(i + 3, i + 3)] = mu;
    }

    Ok(ElasticityMatrix {
        youngs_modulus,
        poisson_ratio,
        d,
    })
}
