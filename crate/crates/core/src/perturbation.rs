//! Rank-two perturbations `Δᵘ_Y` that put a prescribed unit vector `u` into
//! the kernel of `Y + Δ` while preserving symmetry, skewness and PSD-ness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_square, lambda_min_unchecked, psd_margin_ok, tuple_frobenius, RealMatrix, RealVector,
    Tolerance,
};
use crate::structures::StructuredTuple;

/// Normalizes `u` once; rejects zero and non-finite vectors.
pub fn unit(u: &RealVector) -> Result<RealVector> {
    let norm = u.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(u / norm)
}

fn check_len(y: &RealMatrix, u: &RealVector) -> Result<()> {
    if y.nrows() != u.len() || y.ncols() != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} vs vector of length {}",
            y.nrows(),
            y.ncols(),
            u.len()
        )));
    }
    Ok(())
}

/// `-uuᵀY - Yuuᵀ + (uᵀYu)uuᵀ`, assuming `u` is already unit.
fn delta_unit(y: &RealMatrix, u: &RealVector) -> RealMatrix {
    let yu = y * u;
    let uty = y.tr_mul(u); // Yᵀu
    let c = u.dot(&yu);
    -(u * uty.transpose()) - &yu * u.transpose() + (u * u.transpose()) * c
}

/// `Δᵘ_Y` for an arbitrary square `Y`.
pub fn delta_general(y: &RealMatrix, u: &RealVector) -> Result<RealMatrix> {
    ensure_square("Y", y)?;
    check_len(y, u)?;
    let u = unit(u)?;
    Ok(delta_unit(y, &u))
}

/// Skew case: `-uuᵀJ - Juuᵀ = u(Ju)ᵀ - (Ju)uᵀ`, returned exactly skew.
pub fn delta_skew(j: &RealMatrix, u: &RealVector) -> Result<RealMatrix> {
    ensure_square("J", j)?;
    check_len(j, u)?;
    let u = unit(u)?;
    Ok(delta_skew_unit(j, &u))
}

fn delta_skew_unit(j: &RealMatrix, u: &RealVector) -> RealMatrix {
    let ju = j * u;
    let a = u * ju.transpose();
    &a - a.transpose()
}

/// PSD case; `X + Δ` stays PSD and `Δ` is exactly symmetric.
pub fn delta_psd(x: &RealMatrix, u: &RealVector, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_square("X", x)?;
    check_len(x, u)?;
    let lmin = lambda_min_unchecked(&crate::linalg::symmetrize(x));
    if !psd_margin_ok(lmin, x.norm(), tol) {
        return Err(Error::NotPsd {
            name: "X".into(),
            lambda_min: lmin,
        });
    }
    let u = unit(u)?;
    Ok(delta_sym_unit(x, &u))
}

fn delta_sym_unit(x: &RealMatrix, u: &RealVector) -> RealMatrix {
    let xu = x * u;
    let c = u.dot(&xu);
    let a = u * xu.transpose();
    (u * u.transpose()) * c - (&a + a.transpose())
}

/// Norm pieces of a skew perturbation, both readings of the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewNormDiagnostics {
    /// `2‖Ju‖²`, equal to `‖Δ_J‖_F²`.
    pub squared_form: f64,
    /// `2‖Ju‖` as it is sometimes printed; kept for comparison only.
    pub unsquared_form: f64,
    /// `‖Δ_J‖_F²` computed from the explicit matrix.
    pub explicit: f64,
}

/// Optimal structured perturbation of a whole tuple for a given unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSet {
    pub u: RealVector,
    pub delta_j: RealMatrix,
    pub delta_xs: Vec<RealMatrix>,
    pub total_norm: f64,
    pub skew_norm: SkewNormDiagnostics,
}

impl PerturbationSet {
    /// Perturbed tuple `(J + Δ_J, [Xᵢ + Δ_Xᵢ])`.
    pub fn apply(&self, t: &StructuredTuple) -> StructuredTuple {
        let j = t.j() + &self.delta_j;
        let xs = t
            .xs()
            .iter()
            .zip(&self.delta_xs)
            .map(|(x, d)| x + d)
            .collect();
        StructuredTuple::from_parts(j, xs)
    }

    /// Largest `‖(Y + Δ)u‖` over the members of the perturbed tuple.
    pub fn kernel_residual(&self, t: &StructuredTuple) -> f64 {
        self.apply(t)
            .matrices()
            .map(|m| (m * &self.u).norm())
            .fold(0.0, f64::max)
    }
}

pub fn build_perturbation(t: &StructuredTuple, u: &RealVector) -> Result<PerturbationSet> {
    check_len(t.j(), u)?;
    let u = unit(u)?;
    Ok(build_unit(t, &u))
}

pub(crate) fn build_unit(t: &StructuredTuple, u: &RealVector) -> PerturbationSet {
    let delta_j = delta_skew_unit(t.j(), u);
    let delta_xs: Vec<RealMatrix> = t.xs().iter().map(|x| delta_sym_unit(x, u)).collect();
    let total_norm = tuple_frobenius(std::iter::once(&delta_j).chain(delta_xs.iter()));
    let ju = (t.j() * u).norm();
    let skew_norm = SkewNormDiagnostics {
        squared_form: 2.0 * ju * ju,
        unsquared_form: 2.0 * ju,
        explicit: delta_j.norm_squared(),
    };
    PerturbationSet {
        u: u.clone(),
        delta_j,
        delta_xs,
        total_norm,
        skew_norm,
    }
}
