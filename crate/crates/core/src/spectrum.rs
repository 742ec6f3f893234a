//! Regularity, index and finite spectrum of a general square pencil `λE - A`.
//!
//! The index comes from the Wong sequence `W₀ = {0}`,
//! `W_{i+1} = E⁻¹(A Wᵢ)`, computed with orthonormal bases: the sequence grows
//! once per level of the longest Jordan chain at infinity and stops at the
//! deflating subspace of the infinite eigenvalues. Finite eigenvalues use
//! shift-and-invert on `(σE - A)⁻¹E`.

use nalgebra::linalg::Schur;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, kernel_split, kernel_split_scaled, numerical_rank,
    singular_values, spectral_norm, RankDecision, RealMatrix, Tolerance,
};

/// Seed for the sample points of the regularity test.
pub const SAMPLE_SEED: u64 = 0x5eed_d4a1;

/// `count` points drawn uniformly from `[lo, hi]`.
pub fn sample_points(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(lo..=hi)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub is_regular: bool,
    pub samples: Vec<f64>,
    /// Rank decision for `λ₀E - A` at each sample.
    pub decisions: Vec<RankDecision>,
}

/// Rank test of `λ₀E - A` at `points`: regular iff some sample has full rank.
pub fn regularity_at(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance, points: &[f64]) -> RegularityCheck {
    let n = e.nrows();
    let decisions: Vec<RankDecision> = points
        .iter()
        .map(|&l| numerical_rank(&(e * l - a), tol).with_label(format!("lambda0={l:.6}")))
        .collect();
    RegularityCheck {
        is_regular: n == 0 || decisions.iter().any(|d| d.rank == n),
        samples: points.to_vec(),
        decisions,
    }
}

/// Regularity by rank at five seeded points of `[-2, 2]`.
pub fn regularity(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance) -> RegularityCheck {
    regularity_at(e, a, tol, &sample_points(5, -2.0, 2.0, SAMPLE_SEED))
}

/// Outcome of the block test with `E = diag(E₁₁, 0)` after an SVD change of basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockIndexTest {
    /// `E` invertible.
    IndexZero,
    /// `A₂₂` invertible.
    IndexOne,
    /// `A₂₂` singular: the pencil is singular or has index at least two.
    SingularOrHigher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub is_regular: bool,
    /// `None` for singular pencils.
    pub index: Option<usize>,
    /// Dimension of the deflating subspace at infinity (regular pencils only).
    pub infinite_multiplicity: usize,
    /// Dimensions of the Wong subspaces `W₀ ⊂ W₁ ⊂ …`.
    pub wong_dims: Vec<usize>,
    pub decisions: Vec<RankDecision>,
    pub block_test: BlockIndexTest,
    pub regularity: RegularityCheck,
}

fn check_pair(e: &RealMatrix, a: &RealMatrix) -> Result<()> {
    ensure_square("E", e)?;
    ensure_square("A", a)?;
    ensure_finite("E", e)?;
    ensure_finite("A", a)?;
    if e.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "E is {}x{}, A is {}x{}",
            e.nrows(),
            e.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Block test: SVD-split `E` and check invertibility of the trailing block of `A`.
pub fn block_index_test(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance) -> (BlockIndexTest, Vec<RankDecision>) {
    let right = kernel_split(e, tol);
    let left = kernel_split(&e.transpose(), tol);
    let mut decisions = vec![right.decision.clone().with_label("rank E")];
    if right.kernel.ncols() == 0 {
        return (BlockIndexTest::IndexZero, decisions);
    }
    let a22 = left.kernel.transpose() * a * &right.kernel;
    let scale = spectral_norm(a).max(spectral_norm(e));
    let d = kernel_split_scaled(&a22, tol, Some(scale)).decision.with_label("rank A22");
    let full = d.nullity() == 0;
    decisions.push(d);
    let verdict = if full {
        BlockIndexTest::IndexOne
    } else {
        BlockIndexTest::SingularOrHigher
    };
    (verdict, decisions)
}

/// Regularity and index of `λE - A`, cross-checked against the block test.
pub fn numeric_index(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance) -> Result<IndexReport> {
    check_pair(e, a)?;
    let regularity = regularity(e, a, tol);
    numeric_index_with(e, a, tol, regularity)
}

pub(crate) fn numeric_index_with(
    e: &RealMatrix,
    a: &RealMatrix,
    tol: &Tolerance,
    regularity: RegularityCheck,
) -> Result<IndexReport> {
    let n = e.nrows();
    let scale = spectral_norm(e).max(spectral_norm(a));
    let scale = (scale > 0.0).then_some(scale);
    let mut decisions = Vec::new();
    let mut w = RealMatrix::zeros(n, 0);
    let mut dims = vec![0];
    for step in 0..=n {
        // Left null space of A·Wᵢ = orthogonal complement of its range.
        let left = kernel_split_scaled(&(a * &w).transpose(), tol, scale);
        decisions.push(left.decision.with_label(format!("rank A W{step}")));
        let ks = kernel_split_scaled(&left.kernel.tr_mul(e), tol, scale);
        decisions.push(ks.decision.with_label(format!("W{}", step + 1)));
        let next = ks.kernel;
        if next.ncols() < w.ncols() {
            return Err(Error::Numerical(format!(
                "Wong sequence shrank from {} to {}",
                w.ncols(),
                next.ncols()
            )));
        }
        if next.ncols() == w.ncols() {
            break;
        }
        dims.push(next.ncols());
        w = next;
    }
    let (block_test, block_decisions) = block_index_test(e, a, tol);
    decisions.extend(block_decisions);

    let is_regular = regularity.is_regular;
    let index = is_regular.then(|| dims.len() - 1);
    let consistent = match block_test {
        BlockIndexTest::IndexZero => index == Some(0),
        BlockIndexTest::IndexOne => index == Some(1),
        BlockIndexTest::SingularOrHigher => index.map_or(true, |i| i >= 2),
    };
    if !consistent {
        return Err(Error::SingularityDisagreement(format!(
            "block test {block_test:?} vs Wong index {index:?} (dims {dims:?})"
        )));
    }
    Ok(IndexReport {
        is_regular,
        index,
        infinite_multiplicity: if is_regular { *dims.last().unwrap() } else { 0 },
        wong_dims: dims,
        decisions,
        block_test,
        regularity,
    })
}

/// Finite eigenvalues of a regular pencil `λE - A`, sorted by real then imaginary part.
pub fn finite_eigenvalues(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance) -> Result<Vec<Complex64>> {
    let report = numeric_index(e, a, tol)?;
    if !report.is_regular {
        return Err(Error::InvalidParameter(
            "a singular pencil has no well-defined spectrum".into(),
        ));
    }
    finite_eigenvalues_known(e, a, report.infinite_multiplicity)
}

pub(crate) fn finite_eigenvalues_known(
    e: &RealMatrix,
    a: &RealMatrix,
    n_inf: usize,
) -> Result<Vec<Complex64>> {
    let n = e.nrows();
    if n_inf >= n {
        return Ok(Vec::new());
    }
    let ne = spectral_norm(e);
    let na = spectral_norm(a);
    let unit = if ne > 0.0 && na > 0.0 { na / ne } else { 1.0 };
    // Pick the best-conditioned shift among a few irrational-looking candidates.
    let (sigma, _) = [0.6180339887, -1.3247179572, 2.2360679775, -0.4142135624, 3.1415926536]
        .iter()
        .map(|c| {
            let s = c * unit;
            let sv = singular_values(&(e * s - a));
            let cond = sv.last().copied().unwrap_or(0.0) / sv[0].max(f64::MIN_POSITIVE);
            (s, cond)
        })
        .fold((0.0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let shifted = e * sigma - a;
    let lu = shifted.lu();
    let m = lu
        .solve(e)
        .ok_or_else(|| Error::Numerical("shifted pencil is singular at every trial shift".into()))?;
    let schur = Schur::try_new(m, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let mut mus: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    mus.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    let mut lambdas: Vec<Complex64> = mus[n_inf..]
        .iter()
        .map(|mu| Complex64::new(sigma, 0.0) - mu.inv())
        .collect();
    lambdas.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(lambdas)
}
