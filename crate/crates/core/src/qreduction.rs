//! Removing `Q` from a general dH system `E ẋ = (J - R)Qx`, and the trimmed
//! linearization of a quadratic with singular stiffness.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block2, block_diag, lambda_min_unchecked, numerical_rank, singular_values, skew_part,
    sym_eig_unchecked, symmetrize, validated_psd, validated_skew, RealMatrix, Tolerance,
};
use crate::spectrum::{numeric_index, IndexReport};
use crate::structures::{DHPencil, DHQuadratic, GeneralDHSystem};

/// `cond(E₂₂)` above this is flagged as ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e8;

/// Result of eliminating `Q`. The reduced pencil is
/// `transform_left · (λE - (J - R)Q) · transform_right`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionReport {
    pub reduced: DHPencil,
    pub transform_left: RealMatrix,
    pub transform_right: RealMatrix,
    pub eliminated_dim: usize,
    /// Condition number of the eliminated block `E₂₂` (1 when nothing was eliminated).
    pub conditioning: f64,
    pub ill_conditioned: bool,
    /// `ẋ₂ = recovery_dx1 · ẋ₁ + recovery_x1 · x₁` in the rotated coordinates
    /// `x = V [x₁; x₂]`.
    pub recovery_dx1: RealMatrix,
    pub recovery_x1: RealMatrix,
    /// Orthogonal factors of `UᵀQV = diag(Q₁₁, 0)`.
    pub u: RealMatrix,
    pub v: RealMatrix,
    pub original_index: Option<IndexReport>,
    pub reduced_index: Option<IndexReport>,
}

fn reduce_invertible(
    e: &RealMatrix,
    q: &RealMatrix,
    j: &RealMatrix,
    r: &RealMatrix,
    tol: &Tolerance,
) -> Result<DHPencil> {
    let qt = q.transpose();
    let e_t = validated_psd("QᵀE", &(&qt * e), tol)?;
    let j_t = validated_skew("QᵀJQ", &(&qt * j * q), tol)?;
    let r_t = validated_psd("QᵀRQ", &(&qt * r * q), tol)?;
    Ok(DHPencil::from_parts(e_t, j_t, r_t))
}

fn index_pair(e: &RealMatrix, a: &RealMatrix, tol: &Tolerance) -> Option<IndexReport> {
    numeric_index(e, a, tol).ok()
}

/// `Q̃ = I, Ẽ = QᵀE, J̃ = QᵀJQ, R̃ = QᵀRQ`.
pub fn remove_q_invertible(s: &GeneralDHSystem, tol: &Tolerance) -> Result<ReductionReport> {
    let n = s.dim();
    let q = s.q();
    let rank = numerical_rank(q, tol);
    if rank.rank < n {
        return Err(Error::SingularQ {
            sigma_min: rank.singular_values.last().copied().unwrap_or(0.0),
        });
    }
    let reduced = reduce_invertible(s.e(), q, s.j(), s.r(), tol)?;
    let (e, a) = s.pencil_pair();
    let original_index = index_pair(&e, &a, tol);
    let reduced_index = index_pair(reduced.e(), &reduced.a(), tol);
    let id = RealMatrix::identity(n, n);
    Ok(ReductionReport {
        reduced,
        transform_left: q.transpose(),
        transform_right: id.clone(),
        eliminated_dim: 0,
        conditioning: 1.0,
        ill_conditioned: false,
        recovery_dx1: RealMatrix::zeros(0, n),
        recovery_x1: RealMatrix::zeros(0, n),
        u: id.clone(),
        v: id,
        original_index,
        reduced_index,
    })
}

/// Full SVD `X = U Σ Vᵀ` with singular values sorted descending.
fn full_svd(x: &RealMatrix) -> (RealMatrix, Vec<f64>, RealMatrix) {
    let n = x.nrows();
    let svd = SVD::new(x.clone(), true, true);
    let u0 = svd.u.expect("requested U");
    let vt0 = svd.v_t.expect("requested V");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let mut u = RealMatrix::zeros(n, n);
    let mut v = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u0.column(src));
        v.set_column(dst, &vt0.row(src).transpose());
    }
    (u, order.iter().map(|&i| sv[i]).collect(), v)
}

/// SVD split of `Q`; requires `E₁₂ = 0` and `E₂₂` invertible, eliminates
/// `x₂` and removes `Q₁₁` from the `r x r` remainder.
pub fn remove_q_singular(s: &GeneralDHSystem, tol: &Tolerance) -> Result<ReductionReport> {
    let n = s.dim();
    if n == 0 {
        return remove_q_invertible(s, tol);
    }
    let rank = numerical_rank(s.q(), tol).rank;
    let (u, _, v) = full_svd(s.q());
    let m = n - rank;

    let qb = u.transpose() * s.q() * &v;
    let eb = u.transpose() * s.e() * &v;
    let lb = u.transpose() * (s.j() - s.r()) * &u;
    let q11 = qb.view((0, 0), (rank, rank)).into_owned();
    let e11 = eb.view((0, 0), (rank, rank)).into_owned();
    let e12 = eb.view((0, rank), (rank, m)).into_owned();
    let e21 = eb.view((rank, 0), (m, rank)).into_owned();
    let e22 = eb.view((rank, rank), (m, m)).into_owned();
    let l21 = lb.view((rank, 0), (m, rank)).into_owned();

    let q_sv = singular_values(&q11);
    let cond_q = match (q_sv.first(), q_sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => 1.0,
    };
    let e_norm = s.e().norm().max(1.0);
    let e12_tol = (tol.psd_rel * e_norm * cond_q).max(tol.residual_abs);
    if e12.norm() > e12_tol {
        return Err(Error::InconsistentStructure(format!(
            "E12 has norm {:.3e} > {:.3e}; EᵀQ is not symmetric",
            e12.norm(),
            e12_tol
        )));
    }

    let (conditioning, e22_inv) = if m == 0 {
        (1.0, RealMatrix::zeros(0, 0))
    } else {
        let sv = singular_values(&e22);
        let hi = sv[0];
        let lo = *sv.last().unwrap();
        let threshold = tol.rank_rel_for(m, m) * s.e().norm().max(f64::MIN_POSITIVE);
        if !(lo > threshold) {
            return Err(Error::IndexAssumption(format!(
                "E22 is singular (smallest singular value {lo:.3e}); λE - Q is not of index at most one"
            )));
        }
        let inv = e22
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("E22 inversion failed".into()))?;
        (hi / lo, inv)
    };

    let recovery_dx1 = -(&e22_inv * &e21);
    let recovery_x1 = &e22_inv * &l21 * &q11;

    let u1 = u.columns(0, rank).into_owned();
    let v1 = v.columns(0, rank).into_owned();
    let j11 = skew_part(&(u1.transpose() * s.j() * &u1));
    let r11 = symmetrize(&(u1.transpose() * s.r() * &u1));
    let reduced = reduce_invertible(&e11, &q11, &j11, &r11, tol)?;

    let (e, a) = s.pencil_pair();
    let original_index = index_pair(&e, &a, tol);
    let reduced_index = index_pair(reduced.e(), &reduced.a(), tol);
    Ok(ReductionReport {
        reduced,
        transform_left: q11.transpose() * u1.transpose(),
        transform_right: v1,
        eliminated_dim: m,
        conditioning,
        ill_conditioned: conditioning > ILL_CONDITIONED,
        recovery_dx1,
        recovery_x1,
        u,
        v,
        original_index,
        reduced_index,
    })
}

/// Positive part of `K`: eigenvalues above the rank threshold in descending
/// order and their eigenvectors.
fn stiffness_split(k: &RealMatrix, tol: &Tolerance) -> (RealMatrix, RealMatrix) {
    let n = k.nrows();
    let eig = sym_eig_unchecked(&symmetrize(k));
    let top = eig.values.iter().copied().fold(0.0f64, f64::max);
    let threshold = tol.rank_rel_for(n, n) * top;
    let keep: Vec<usize> = (0..n).rev().filter(|&i| eig.values[i] > threshold).collect();
    let kk = keep.len();
    let mut k1 = RealMatrix::zeros(kk, kk);
    let mut v1 = RealMatrix::zeros(n, kk);
    for (dst, &src) in keep.iter().enumerate() {
        k1[(dst, dst)] = eig.values[src];
        v1.set_column(dst, &eig.vectors.column(src));
    }
    (k1, v1)
}

/// Trimmed linearization `E₁ = diag(M, K₁)`, `J₁ = [[G, -K₂ᵀ], [K₂, 0]]`,
/// `R₁ = diag(D, 0)` of size `n + rank K`.
///
/// `K₁` is diagonal (eigenvalues of `K` in descending order) and
/// `K₂ = K₁V₁ᵀ` with `V₁` the matching eigenvectors, so `K₂ᵀK₁⁻¹K₂ = K`
/// and `M, G, D` keep their original coordinates. When `K` is invertible
/// `K₁ = K` and `K₂ = K`.
pub fn trim_linearize(q: &DHQuadratic, tol: &Tolerance) -> DHPencil {
    let n = q.dim();
    let (k1, k2) = if numerical_rank(q.k(), tol).rank == n {
        (q.k().clone(), q.k().clone())
    } else {
        let (k1, v1) = stiffness_split(q.k(), tol);
        let k2 = &k1 * v1.transpose();
        (k1, k2)
    };
    let kk = k1.nrows();
    let e1 = block_diag(&[q.m(), &k1]);
    let j1 = block2(q.g(), &(-k2.transpose()), &k2, &RealMatrix::zeros(kk, kk));
    let r1 = block_diag(&[q.d(), &RealMatrix::zeros(kk, kk)]);
    DHPencil::from_parts(e1, j1, r1)
}

/// Distance bounds for the trimmed linearization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimmedBounds {
    pub k: usize,
    /// Smallest eigenvalue of `K₁` (infinite when `k = 0`).
    pub kappa_min: f64,
    /// `√(2 λ_min(K₁²))`.
    pub sing_upper: f64,
    /// `√3 κ_min`: the objective at `u = (0, v)` with `K₁v = κ_min v`.
    pub sing_upper_probe: f64,
    /// `√λ_min(K₁²)`, reported when `G = 0` and `K` is invertible.
    pub sing_lower_if_g0: Option<f64>,
    pub beta: f64,
    pub hi_lower: f64,
    pub hi_upper: f64,
}

pub fn trimmed_bounds(q: &DHQuadratic, tol: &Tolerance) -> TrimmedBounds {
    let n = q.dim();
    let (k1, _) = stiffness_split(q.k(), tol);
    let k = k1.nrows();
    let kappa_min = (0..k).map(|i| k1[(i, i)]).fold(f64::INFINITY, f64::min);
    let k1_sq = kappa_min * kappa_min;
    let md = symmetrize(&(q.m() * q.m() + q.d() * q.d()));
    let beta = lambda_min_unchecked(&md).min(k1_sq);
    let g_small = q.g().norm() <= tol.residual_abs.max(tol.psd_rel * q.m().norm());
    TrimmedBounds {
        k,
        kappa_min,
        sing_upper: (2.0 * k1_sq).sqrt(),
        sing_upper_probe: 3f64.sqrt() * kappa_min,
        sing_lower_if_g0: (g_small && k == n).then_some(kappa_min),
        beta,
        hi_lower: beta.sqrt(),
        hi_upper: (2.0 * beta).sqrt(),
    }
}
