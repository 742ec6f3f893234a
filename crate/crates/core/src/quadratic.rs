//! Quadratic dH polynomials `λ²M - λ(G - D) + K`: the linearization with a
//! nontrivial `Q`, spectral checks, and the three structured distances.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ckdistance::{minimize_sphere, DistanceResult, OptimizerConfig};
use crate::error::Result;
use crate::linalg::{
    block2, block_diag, kernel_split_scaled, lambda_min_unchecked, symmetrize, RankDecision,
    RealMatrix, Tolerance,
};
use crate::polynomial::{companion, polynomial_index};
use crate::spectrum::{finite_eigenvalues_known, IndexReport};
use crate::structures::{polynomial_from_quadratic, DHQuadratic, GeneralDHSystem, StructuredTuple};

/// First-order system with `E = diag(M, I)`, `J = [[G, I], [-I, 0]]`,
/// `R = diag(D, 0)`, `Q = diag(I, K)`. The pencil `λE - (J - R)Q` applied to
/// `(-λx, x)` gives `(P(λ)x, 0)` up to sign.
pub fn dh_linearize(q: &DHQuadratic) -> GeneralDHSystem {
    let n = q.dim();
    let i = RealMatrix::identity(n, n);
    let z = RealMatrix::zeros(n, n);
    let e = block_diag(&[q.m(), &i]);
    let j = block2(q.g(), &i, &(-&i), &z);
    let r = block_diag(&[q.d(), &z]);
    let qq = block_diag(&[&i, q.k()]);
    GeneralDHSystem::from_parts(e, qq, j, r)
}

/// Semisimplicity test for one group of nearby eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub center: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
    pub semisimple: bool,
    pub on_imaginary_axis: bool,
    pub rank: RankDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub is_regular: bool,
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub scale: f64,
    /// All eigenvalues satisfy `Re λ ≤ 1e-8 · scale`.
    pub left_half_plane: bool,
    pub clusters: Vec<EigenCluster>,
    /// Every nonzero eigenvalue on the imaginary axis is semisimple.
    pub imaginary_semisimple: bool,
    /// Index of `P` (longest chain at ∞).
    pub index_infinity: IndexReport,
    /// Index of the reversal (longest chain at 0).
    pub index_zero: IndexReport,
    pub chains_at_most_two: bool,
}

/// Relative radius within which eigenvalues are grouped.
pub const CLUSTER_REL: f64 = 1e-6;

/// Rank of the complex matrix `X + iY` through its real form `[[X, -Y], [Y, X]]`,
/// with the threshold relative to `scale`.
fn complex_rank(x: &RealMatrix, y: &RealMatrix, tol: &Tolerance, scale: f64) -> RankDecision {
    let big = block2(x, &(-y), y, x);
    let mut d = kernel_split_scaled(&big, tol, Some(scale)).decision;
    d.rank /= 2;
    d.cols /= 2;
    d
}

pub fn spectral_check(q: &DHQuadratic, tol: &Tolerance) -> Result<SpectralReport> {
    let n = q.dim();
    let p = polynomial_from_quadratic(q);
    let index_infinity = polynomial_index(&p, tol)?;
    let index_zero = polynomial_index(&polynomial_from_quadratic(&q.reversal()), tol)?;
    let chains_at_most_two = index_infinity.index.map_or(false, |i| i <= 2)
        && index_zero.index.map_or(false, |i| i <= 2);
    let mut report = SpectralReport {
        is_regular: index_infinity.is_regular,
        eigenvalues: Vec::new(),
        max_real_part: f64::NEG_INFINITY,
        scale: 1.0,
        left_half_plane: true,
        clusters: Vec::new(),
        imaginary_semisimple: true,
        index_infinity,
        index_zero,
        chains_at_most_two,
    };
    if !report.is_regular {
        return Ok(report);
    }
    let cp = companion(&p);
    let ev = finite_eigenvalues_known(
        &cp.e_block,
        &cp.a_block,
        report.index_infinity.infinite_multiplicity,
    )?;
    let scale = ev.iter().fold(1.0f64, |s, l| s.max(l.norm()));
    let radius = CLUSTER_REL * scale;
    let max_re = ev.iter().fold(f64::NEG_INFINITY, |m, l| m.max(l.re));

    // Group eigenvalues by single linkage within `radius`.
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &l in &ev {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&m| (m - l).norm() <= radius))
        {
            Some(g) => g.push(l),
            None => groups.push(vec![l]),
        }
    }
    // Evaluations at computed eigenvalues carry their rounding error; decide
    // rank at √ε unless the caller fixed a threshold.
    let eval_tol = match tol.rank_rel {
        Some(_) => *tol,
        None => tol.with_rank_rel(f64::EPSILON.sqrt()),
    };
    let mut clusters = Vec::new();
    for g in groups {
        let center = g.iter().sum::<Complex64>() / g.len() as f64;
        let on_axis = center.re.abs() <= 1e-8 * scale && center.norm() > radius;
        let (x, y) = eval_complex(q, center);
        let l = center.norm();
        let p_scale = q.m().norm() * l * l + (q.g() - q.d()).norm() * l + q.k().norm();
        let rank = complex_rank(&x, &y, &eval_tol, p_scale);
        let geometric = n - rank.rank;
        clusters.push(EigenCluster {
            center,
            algebraic: g.len(),
            geometric,
            semisimple: geometric == g.len(),
            on_imaginary_axis: on_axis,
            rank,
        });
    }
    report.imaginary_semisimple = clusters
        .iter()
        .filter(|c| c.on_imaginary_axis)
        .all(|c| c.semisimple);
    report.left_half_plane = max_re <= 1e-8 * scale;
    report.max_real_part = max_re;
    report.scale = scale;
    report.eigenvalues = ev;
    report.clusters = clusters;
    Ok(report)
}

/// Real and imaginary parts of `P(λ)` at a complex point.
fn eval_complex(q: &DHQuadratic, l: Complex64) -> (RealMatrix, RealMatrix) {
    let l2 = l * l;
    let b = q.g() - q.d();
    let re = q.m() * l2.re - &b * l.re + q.k();
    let im = q.m() * l2.im - &b * l.im;
    (re, im)
}

/// Branch of the distance to instability that attains the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstBranch {
    /// Common kernel of `M` and `D` (eigenvalue at ∞ made unstable).
    MassDamping,
    /// Common kernel of `D` and `K` (eigenvalue at 0 made unstable).
    DampingStiffness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDistanceBundle {
    /// `d_ck(G, [M, D, K])`.
    pub d_sing: DistanceResult,
    /// `d_ck(0, [M, D])`.
    pub d_hi: DistanceResult,
    /// `d_ck(0, [D, K])`.
    pub d_dk: DistanceResult,
    pub d_inst: f64,
    pub inst_branch: InstBranch,
    /// `α = min(λ_min(M² + D²), λ_min(D² + K²))`.
    pub inst_alpha: f64,
    pub inst_lower: f64,
    pub inst_upper: f64,
}

impl QuadraticDistanceBundle {
    pub fn d_inst_result(&self) -> &DistanceResult {
        match self.inst_branch {
            InstBranch::MassDamping => &self.d_hi,
            InstBranch::DampingStiffness => &self.d_dk,
        }
    }
}

pub fn quadratic_distances(q: &DHQuadratic, cfg: &OptimizerConfig) -> Result<QuadraticDistanceBundle> {
    let n = q.dim();
    let z = RealMatrix::zeros(n, n);
    let sing = StructuredTuple::from_parts(q.g().clone(), vec![q.m().clone(), q.d().clone(), q.k().clone()]);
    let md = StructuredTuple::from_parts(z.clone(), vec![q.m().clone(), q.d().clone()]);
    let dk = StructuredTuple::from_parts(z, vec![q.d().clone(), q.k().clone()]);
    let (d_sing, (d_hi, d_dk)) = rayon::join(
        || minimize_sphere(&sing, cfg),
        || rayon::join(|| minimize_sphere(&md, cfg), || minimize_sphere(&dk, cfg)),
    );
    let (d_sing, d_hi, d_dk) = (d_sing?, d_hi?, d_dk?);
    let inst_branch = if d_dk.distance < d_hi.distance {
        InstBranch::DampingStiffness
    } else {
        InstBranch::MassDamping
    };
    let d_inst = d_hi.distance.min(d_dk.distance);
    let inst_alpha = d_hi.lambda_min.min(d_dk.lambda_min);
    Ok(QuadraticDistanceBundle {
        d_sing,
        d_hi,
        d_dk,
        d_inst,
        inst_branch,
        inst_alpha,
        inst_lower: inst_alpha.sqrt(),
        inst_upper: (2.0 * inst_alpha).sqrt(),
    })
}

/// The perturbed quadratic realizing `d_inst`; the coefficient outside the
/// winning branch is left untouched.
pub fn inst_perturbed(q: &DHQuadratic, b: &QuadraticDistanceBundle) -> DHQuadratic {
    let cert = &b.d_inst_result().certificate;
    match b.inst_branch {
        InstBranch::MassDamping => DHQuadratic::from_parts(
            q.m() + &cert.delta_xs[0],
            q.g().clone(),
            q.d() + &cert.delta_xs[1],
            q.k().clone(),
        ),
        InstBranch::DampingStiffness => DHQuadratic::from_parts(
            q.m().clone(),
            q.g().clone(),
            q.d() + &cert.delta_xs[0],
            q.k() + &cert.delta_xs[1],
        ),
    }
}

/// `λ_min(M² + D² + K² - G²)`.
pub fn sing_lambda_min(q: &DHQuadratic) -> f64 {
    let s = q.m() * q.m() + q.d() * q.d() + q.k() * q.k() - q.g() * q.g();
    lambda_min_unchecked(&symmetrize(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_rows, is_psd};
    use approx::assert_relative_eq;

    fn quad(m: RealMatrix, g: RealMatrix, d: RealMatrix, k: RealMatrix) -> DHQuadratic {
        DHQuadratic::new(m, g, d, k, &Tolerance::default()).unwrap()
    }

    #[test]
    fn linearize_identity_case() {
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        let s = dh_linearize(&quad(i.clone(), z.clone(), z.clone(), i));
        assert_eq!(s.e(), &RealMatrix::identity(4, 4));
        assert_eq!(s.q(), &RealMatrix::identity(4, 4));
        assert_eq!(s.r(), &RealMatrix::zeros(4, 4));
    }

    #[test]
    fn linearize_structure_and_scalar_spectrum() {
        let one = RealMatrix::from_element(1, 1, 1.0);
        let zero = RealMatrix::zeros(1, 1);
        let q = quad(one.clone(), zero, one.clone(), one);
        let s = dh_linearize(&q);
        let tol = Tolerance::default();
        assert!(GeneralDHSystem::new(s.e().clone(), s.q().clone(), s.j().clone(), s.r().clone(), &tol).is_ok());
        let etq = s.e().transpose() * s.q();
        assert_eq!(etq, block_diag(&[q.m(), q.k()]));
        let (e, a) = s.pencil_pair();
        let ev = crate::spectrum::finite_eigenvalues(&e, &a, &tol).unwrap();
        assert_eq!(ev.len(), 2);
        for l in ev {
            assert!(l.re <= 1e-12);
            // roots of λ² + λ + 1
            assert_relative_eq!((l * l + l).re, -1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_undamped_oscillator() {
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        let r = spectral_check(&quad(i.clone(), z.clone(), z, i), &Tolerance::default()).unwrap();
        assert!(r.is_regular && r.left_half_plane && r.imaginary_semisimple);
        assert_eq!(r.eigenvalues.len(), 4);
        assert_eq!(r.clusters.len(), 2);
        for c in &r.clusters {
            assert!(c.on_imaginary_axis && c.semisimple);
            assert_eq!(c.algebraic, 2);
            assert_relative_eq!(c.center.im.abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_critically_damped() {
        let i = RealMatrix::identity(1, 1);
        let z = RealMatrix::zeros(1, 1);
        let r = spectral_check(&quad(i.clone(), z, i.clone() * 2.0, i), &Tolerance::default()).unwrap();
        assert!(r.left_half_plane);
        assert_eq!(r.clusters.len(), 1);
        let c = &r.clusters[0];
        assert_relative_eq!(c.center.re, -1.0, epsilon = 1e-6);
        assert_eq!(c.algebraic, 2);
        assert_eq!(c.geometric, 1);
        assert!(!c.on_imaginary_axis);
    }

    #[test]
    fn distances_identity() {
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        let b = quadratic_distances(&quad(i.clone(), z, i.clone(), i), &OptimizerConfig::default()).unwrap();
        assert_relative_eq!(b.d_sing.distance, 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(b.d_hi.distance, 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(b.d_inst, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(b.inst_branch, InstBranch::MassDamping);
    }

    #[test]
    fn distances_common_kernel() {
        let p = from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let z = RealMatrix::zeros(2, 2);
        let b = quadratic_distances(&quad(p.clone(), z, p.clone(), p), &OptimizerConfig::default()).unwrap();
        assert!(b.d_sing.distance < 1e-14 && b.d_hi.distance < 1e-14 && b.d_inst < 1e-14);
    }

    #[test]
    fn inst_branch_picks_stiffness() {
        let tol = Tolerance::default();
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        let q = quad(i.clone() * 3.0, z, i.clone() * 0.1, i.clone() * 0.2);
        let b = quadratic_distances(&q, &OptimizerConfig::default()).unwrap();
        assert_eq!(b.inst_branch, InstBranch::DampingStiffness);
        let p = inst_perturbed(&q, &b);
        assert_eq!(p.m(), q.m());
        assert!(is_psd(p.k(), &tol).unwrap() && is_psd(p.d(), &tol).unwrap());
        let u = &b.d_dk.minimizer;
        assert!((p.d() * u).norm() < 1e-12 && (p.k() * u).norm() < 1e-12);
    }
}
