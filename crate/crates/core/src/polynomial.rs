//! Distances for the polynomial class `-λʲ J + Σᵢ λⁱ Aᵢ` and its companion
//! linearization.

use serde::{Deserialize, Serialize};

use crate::ckdistance::{common_kernel_check, minimize_sphere, CommonKernel, DistanceResult, OptimizerConfig};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, RankDecision, RealMatrix, Tolerance};
use crate::perturbation::PerturbationSet;
use crate::spectrum::{numeric_index_with, regularity_at, sample_points, IndexReport, RegularityCheck, SAMPLE_SEED};
use crate::structures::{StructuredPolynomial, StructuredTuple};

/// Companion pencil `λE - A` of a polynomial of grade `k`:
/// `E = diag(Y_k, I, …, I)` and `-A` has first block row `[Y_{k-1} … Y₀]`
/// and `-I` blocks on the block subdiagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanionPencil {
    pub e_block: RealMatrix,
    pub a_block: RealMatrix,
    pub source_grade: usize,
    pub n: usize,
}

/// Companion linearization. Grade 0 gives the `n x n` pencil `λ·0 + A₀`.
pub fn companion(p: &StructuredPolynomial) -> CompanionPencil {
    let n = p.dim();
    let k = p.grade();
    if k == 0 {
        return CompanionPencil {
            e_block: RealMatrix::zeros(n, n),
            a_block: -p.coefficient(0),
            source_grade: 0,
            n,
        };
    }
    let size = k * n;
    let mut e = RealMatrix::identity(size, size);
    e.view_mut((0, 0), (n, n)).copy_from(&p.coefficient(k));
    let mut a = RealMatrix::zeros(size, size);
    for b in 0..k {
        // block column b holds Y_{k-1-b}
        a.view_mut((0, b * n), (n, n))
            .copy_from(&(-p.coefficient(k - 1 - b)));
    }
    for b in 1..k {
        a.view_mut((b * n, (b - 1) * n), (n, n))
            .copy_from(&RealMatrix::identity(n, n));
    }
    CompanionPencil {
        e_block: e,
        a_block: a,
        source_grade: k,
        n,
    }
}

/// Sample points in `[0.5, 2]`: for this class a singular value `P(α)` at
/// some `α > 0` already makes the polynomial singular.
pub fn positive_samples() -> Vec<f64> {
    sample_points(5, 0.5, 2.0, SAMPLE_SEED)
}

/// Regularity and index of the polynomial through its companion pencil.
pub fn polynomial_index(p: &StructuredPolynomial, tol: &Tolerance) -> Result<IndexReport> {
    let cp = companion(p);
    let reg = regularity_at(&cp.e_block, &cp.a_block, tol, &positive_samples());
    numeric_index_with(&cp.e_block, &cp.a_block, tol, reg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSingularity {
    pub singular: bool,
    /// Rank of `P(1) = -J + Σ Aᵢ`.
    pub p_one: RankDecision,
    pub common_kernel: CommonKernel,
    /// Rank of `P(λ₀)` at positive sample points.
    pub sampling: RegularityCheck,
}

/// Singularity by three independent tests, which must agree.
pub fn is_singular_poly(p: &StructuredPolynomial, tol: &Tolerance) -> Result<PolynomialSingularity> {
    let n = p.dim();
    let p_one = numerical_rank(&p.evaluate(1.0), tol).with_label("P(1)");
    let common_kernel = common_kernel_check(&p.tuple(), tol)?;
    let samples = positive_samples();
    let decisions: Vec<RankDecision> = samples
        .iter()
        .map(|&l| numerical_rank(&p.evaluate(l), tol).with_label(format!("P({l:.6})")))
        .collect();
    let sampling = RegularityCheck {
        is_regular: decisions.iter().any(|d| d.rank == n),
        samples,
        decisions,
    };
    let by_p_one = p_one.rank < n;
    let by_kernel = common_kernel.has_common_kernel;
    let by_sampling = !sampling.is_regular;
    if by_p_one != by_kernel || by_kernel != by_sampling {
        return Err(Error::SingularityDisagreement(format!(
            "P(1): {by_p_one}, common kernel: {by_kernel}, sampling: {by_sampling}"
        )));
    }
    Ok(PolynomialSingularity {
        singular: by_kernel,
        p_one,
        common_kernel,
        sampling,
    })
}

/// Distance to singularity: `d_ck(J, [A₀, …, A_k])`.
pub fn d_sing_poly(p: &StructuredPolynomial, cfg: &OptimizerConfig) -> Result<DistanceResult> {
    minimize_sphere(&p.tuple(), cfg)
}

/// Coefficients of `P + Δ` for a certificate of [`d_sing_poly`].
pub fn perturbed_polynomial(p: &StructuredPolynomial, cert: &PerturbationSet) -> StructuredPolynomial {
    let coeffs = p
        .coeffs()
        .iter()
        .zip(&cert.delta_xs)
        .map(|(a, d)| a + d)
        .collect();
    StructuredPolynomial::from_parts(p.grade(), p.skew_index(), p.j() + &cert.delta_j, coeffs)
}

/// Which tuple governs the distance to high index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighIndexCase {
    /// `j < k`: `d_ck(0, [A_k, A_{k-1}])`.
    SkewBelowGrade,
    /// `j = k > 1`: `d_ck(J, [A_k, A_{k-1}])`.
    SkewAtGrade,
    /// `max(n, k) = 1` or `j = k = 1`: no regular high-index members.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighIndexDistance {
    pub case: HighIndexCase,
    /// `None` means the distance is infinite.
    pub result: Option<DistanceResult>,
}

impl HighIndexDistance {
    pub fn distance(&self) -> f64 {
        self.result.as_ref().map_or(f64::INFINITY, |r| r.distance)
    }
}

/// The tuple whose common-kernel distance is `d_hi`, or `None` when infinite.
pub fn hi_tuple(p: &StructuredPolynomial) -> Result<(HighIndexCase, Option<StructuredTuple>)> {
    let n = p.dim();
    let k = p.grade();
    let j = p.skew_index();
    if k == 0 {
        if n == 1 {
            return Ok((HighIndexCase::Empty, None));
        }
        return Err(Error::InvalidParameter(
            "grade 0 with n > 1: raise the grade to 1 explicitly before asking for d_hi".into(),
        ));
    }
    if (n == 1 && k == 1) || (j == k && k == 1) {
        return Ok((HighIndexCase::Empty, None));
    }
    let pair = vec![p.coeffs()[k].clone(), p.coeffs()[k - 1].clone()];
    if j < k {
        Ok((
            HighIndexCase::SkewBelowGrade,
            Some(StructuredTuple::from_parts(RealMatrix::zeros(n, n), pair)),
        ))
    } else {
        Ok((
            HighIndexCase::SkewAtGrade,
            Some(StructuredTuple::from_parts(p.j().clone(), pair)),
        ))
    }
}

pub fn d_hi_poly(p: &StructuredPolynomial, cfg: &OptimizerConfig) -> Result<HighIndexDistance> {
    let (case, tuple) = hi_tuple(p)?;
    let result = tuple.map(|t| minimize_sphere(&t, cfg)).transpose()?;
    Ok(HighIndexDistance { case, result })
}

/// Largest `‖(Y + Δ_Y)u‖` over the matrices of the closure-set condition,
/// evaluated on the certificate of [`d_hi_poly`].
pub fn hi_certificate_residual(p: &StructuredPolynomial, hi: &HighIndexDistance) -> Option<f64> {
    let r = hi.result.as_ref()?;
    let (_, t) = hi_tuple(p).ok()?;
    Some(r.certificate.kernel_residual(&t?))
}
