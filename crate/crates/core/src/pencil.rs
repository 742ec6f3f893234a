//! Distances and classification for dH pencils `λE - (J - R)`.

use serde::{Deserialize, Serialize};

use crate::ckdistance::{common_kernel_check, minimize_sphere, DistanceResult, OptimizerConfig};
use crate::error::{Error, Result};
use crate::linalg::{
    hstack, kernel_split, kernel_split_scaled, lambda_min_unchecked, min_singular_value,
    numerical_rank, spectral_norm, vstack, RankDecision, RealMatrix, Tolerance,
};
use crate::perturbation::PerturbationSet;
use crate::spectrum::{regularity, RegularityCheck};
use crate::structures::DHPencil;

/// Distance to singularity: common-kernel distance of `(J, [E, R])`.
pub fn d_sing(p: &DHPencil, cfg: &OptimizerConfig) -> Result<DistanceResult> {
    minimize_sphere(&p.tuple_sing(), cfg)
}

/// Distance to high index, equal to the distance to instability:
/// common-kernel distance of `(0, [E, R])`.
pub fn d_hi_inst(p: &DHPencil, cfg: &OptimizerConfig) -> Result<DistanceResult> {
    minimize_sphere(&p.tuple_hi(), cfg)
}

/// `(E + Δ_E, J + Δ_J, R + Δ_R)` from a certificate of either pencil tuple.
pub fn perturbed_pencil(p: &DHPencil, cert: &PerturbationSet) -> DHPencil {
    DHPencil::from_parts(
        p.e() + &cert.delta_xs[0],
        p.j() + &cert.delta_j,
        p.r() + &cert.delta_xs[1],
    )
}

/// Rank test of `λ₀E - (J - R)` at five seeded points; the pencil is singular
/// when every sample is rank deficient.
pub fn sample_regularity(p: &DHPencil, tol: &Tolerance) -> RegularityCheck {
    regularity(p.e(), &p.a(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexClass {
    /// Regular, index at most one, and `ker E ∩ ker R = {0}`.
    IndexAtMostOne,
    /// Regular with index at most one, but in the closure of the index-two pencils.
    IndexTwoClosure,
    RegularIndexTwo,
    Singular,
}

/// Orthogonal `U` exhibiting the three-block form of a regular index-two pencil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTwoDecomposition {
    pub u: RealMatrix,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// Column-rank decision for `J₁₃`.
    pub j13_rank: RankDecision,
    /// Rank decision for `J₂₂ - R₂₂`.
    pub a22_rank: RankDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilClassification {
    pub is_singular: bool,
    pub index_class: IndexClass,
    /// 0, 1 or 2; `None` when singular.
    pub index: Option<usize>,
    pub in_index_two_closure: bool,
    pub common_kernel_jer: RealMatrix,
    pub common_kernel_er: RealMatrix,
    pub decomposition: Option<IndexTwoDecomposition>,
    pub decisions: Vec<RankDecision>,
    /// Independent rank test at sample points.
    pub sampling: RegularityCheck,
}

pub fn classify(p: &DHPencil, tol: &Tolerance) -> Result<PencilClassification> {
    let n = p.dim();
    let ck_jer = common_kernel_check(&p.tuple_sing(), tol)?;
    let ck_er = common_kernel_check(&p.tuple_hi(), tol)?;
    let sampling = sample_regularity(p, tol);
    let is_singular = ck_jer.has_common_kernel;
    if is_singular == sampling.is_regular {
        return Err(Error::SingularityDisagreement(format!(
            "common kernel says singular={is_singular}, sampling says regular={}",
            sampling.is_regular
        )));
    }
    let mut decisions = vec![
        ck_jer.stacked.clone().with_label("ker J ∩ ker E ∩ ker R"),
        ck_er.stacked.clone().with_label("ker E ∩ ker R"),
    ];
    let in_closure = ck_er.has_common_kernel;
    let mut out = PencilClassification {
        is_singular,
        index_class: IndexClass::Singular,
        index: None,
        in_index_two_closure: in_closure,
        common_kernel_jer: ck_jer.kernel,
        common_kernel_er: ck_er.kernel,
        decomposition: None,
        decisions: Vec::new(),
        sampling,
    };
    if is_singular {
        out.decisions = decisions;
        return Ok(out);
    }

    let scale = spectral_norm(p.e()).max(spectral_norm(&p.a()));
    let es = kernel_split(p.e(), tol);
    decisions.push(es.decision.clone().with_label("rank E"));
    let (p1, p2) = (es.range, es.kernel);
    if p2.ncols() == 0 {
        out.index_class = if in_closure {
            IndexClass::IndexTwoClosure
        } else {
            IndexClass::IndexAtMostOne
        };
        out.index = Some(0);
        out.decisions = decisions;
        return Ok(out);
    }

    let jt = p2.transpose() * p.j() * &p2;
    let rt = p2.transpose() * p.r() * &p2;
    let a22 = &jt - &rt;
    let a22_rank = kernel_split_scaled(&a22, tol, Some(scale))
        .decision
        .with_label("rank (J - R)22");
    decisions.push(a22_rank.clone());
    if a22_rank.nullity() == 0 {
        out.index_class = if in_closure {
            IndexClass::IndexTwoClosure
        } else {
            IndexClass::IndexAtMostOne
        };
        out.index = Some(1);
        out.decisions = decisions;
        return Ok(out);
    }

    // Second split: common kernel of the trailing (J̃, R̃).
    let inner = kernel_split_scaled(&vstack(&[&jt, &rt]), tol, Some(scale));
    decisions.push(inner.decision.clone().with_label("ker J̃ ∩ ker R̃"));
    let w = inner.kernel;
    let wc = inner.range;
    let j13 = p1.transpose() * p.j() * &p2 * &w;
    let j13_rank = if j13.nrows() == 0 {
        numerical_rank(&j13, tol)
    } else {
        kernel_split_scaled(&j13, tol, Some(scale)).decision
    }
    .with_label("column rank J13");
    decisions.push(j13_rank.clone());
    if j13_rank.rank != w.ncols() {
        return Err(Error::SingularityDisagreement(format!(
            "J13 has column rank {} < {} although the pencil tested regular",
            j13_rank.rank,
            w.ncols()
        )));
    }
    let u = hstack(&[&p1, &(&p2 * &wc), &(&p2 * &w)]);
    out.index_class = IndexClass::RegularIndexTwo;
    out.index = Some(2);
    out.decomposition = Some(IndexTwoDecomposition {
        u,
        p: p1.ncols(),
        q: wc.ncols(),
        r: w.ncols(),
        j13_rank,
        a22_rank,
    });
    debug_assert!(n == p1.ncols() + p2.ncols());
    out.decisions = decisions;
    Ok(out)
}

/// Interval for `d_sing²` from `d_hi`:
/// `2λ_min(-J²) + d_hi² ≤ d_sing² ≤ 2‖J‖² + d_hi²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryBounds {
    pub lower_sq: f64,
    /// Upper end with the Frobenius norm of `J`.
    pub upper_sq: f64,
    /// Upper end with the spectral norm of `J` (the tighter reading).
    pub upper_sq_spectral: f64,
}

impl CorollaryBounds {
    /// Containment of `d_sing²` with a relative slack.
    pub fn contains(&self, d_sing: f64, rel: f64) -> bool {
        let d2 = d_sing * d_sing;
        let slack = rel * self.upper_sq.max(1.0);
        self.lower_sq - slack <= d2 && d2 <= self.upper_sq + slack
    }
}

pub fn corollary_bounds(p: &DHPencil, d_hi: f64) -> CorollaryBounds {
    let j = p.j();
    let neg_j2 = crate::linalg::symmetrize(&(-(j * j)));
    let lmin = lambda_min_unchecked(&neg_j2).max(0.0);
    let h2 = d_hi * d_hi;
    let js = spectral_norm(j);
    CorollaryBounds {
        lower_sq: 2.0 * lmin + h2,
        upper_sq: 2.0 * j.norm_squared() + h2,
        upper_sq_spectral: 2.0 * js * js + h2,
    }
}

/// Distances tied to the reversal `-λ(J - R) + E` and the swap `λR - (J - E)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    /// `d_ck(J, [E, R])`, also `d_sing` of the pencil and of its reversal.
    pub d_ck_jer: f64,
    /// `d_ck(J, [R, E])`, i.e. `d_sing(λR - (J - E))`.
    pub d_ck_jre: f64,
    /// `d_hi` of the reversal as a member of the skew-index-one pencil class:
    /// that class has no regular high-index members, so it is infinite.
    pub d_hi_reversal: f64,
    pub difference: f64,
}

pub fn reversal_identities(p: &DHPencil, cfg: &OptimizerConfig) -> Result<ReversalReport> {
    let a = minimize_sphere(&p.tuple_sing(), cfg)?.distance;
    let b = minimize_sphere(&p.swapped().tuple_sing(), cfg)?.distance;
    let difference = (a - b).abs();
    if difference > 1e-8 {
        return Err(Error::OptimizerInconsistency(format!(
            "d_ck(J,E,R) = {a} but d_ck(J,R,E) = {b}"
        )));
    }
    Ok(ReversalReport {
        d_ck_jer: a,
        d_ck_jre: b,
        d_hi_reversal: f64::INFINITY,
        difference,
    })
}

/// `(σ_min([A; E]), σ_min([A, E]))` with `A = J - R`.
pub fn unstructured_comparison(p: &DHPencil) -> Result<(f64, f64)> {
    let a = p.a();
    let stack = vstack(&[&a, p.e()]);
    let side = hstack(&[&a, p.e()]);
    Ok((min_singular_value(&stack)?, min_singular_value(&side)?))
}
