//! Distance of a structured tuple to the set of tuples with a common kernel.
//!
//! The distance is `min_{‖u‖=1} f(u)^{1/2}` with
//! `f(u) = 2‖Ju‖² + Σᵢ [2‖(I - uuᵀ)Xᵢu‖² + (uᵀXᵢu)²]`,
//! sandwiched by `λ_min(S) ≤ f_min ≤ 2 λ_min(S)` where `S = JᵀJ + Σ Xᵢ²`.
//!
//! `f` is a quartic on the sphere. We run Riemannian descent from the
//! bottom eigenvector of `S` plus seeded random starts, taking a Newton step
//! whenever the tangent Hessian is positive definite and a projected gradient
//! step otherwise. Steps use Armijo backtracking and the normalization
//! retraction.

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    kernel_split, sym_eig_unchecked, symmetrize, vstack, RankDecision, RealMatrix, RealVector,
    Tolerance,
};
use crate::perturbation::{build_unit, unit, PerturbationSet};
use crate::structures::StructuredTuple;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub num_random_starts: usize,
    pub max_iterations: usize,
    /// Stop when `‖grad f‖ ≤ gradient_tol · max(1, ‖S‖₂)`.
    pub gradient_tol: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking contraction factor.
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Try Newton steps when the tangent Hessian is positive definite.
    pub newton: bool,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            num_random_starts: 16,
            max_iterations: 500,
            gradient_tol: 1e-10,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            newton: true,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.num_random_starts = starts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.gradient_tol > 0.0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.max_backtracks > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "optimizer counts and tolerances must be positive, armijo and backtrack in (0,1)"
                    .into(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    /// `√λ_min(S)`.
    pub lower_bound: f64,
    /// `√(2 λ_min(S))`.
    pub upper_bound: f64,
    pub lambda_min: f64,
    pub minimizer: RealVector,
    pub certificate: PerturbationSet,
    pub objective_value: f64,
    pub starts_used: usize,
    pub converged: bool,
    /// Iterations spent by the winning start.
    pub iterations: usize,
    /// Riemannian gradient norm at the minimizer.
    pub grad_norm: f64,
}

/// `f(u)` in its definitional form; `u` is normalized first.
pub fn objective(t: &StructuredTuple, u: &RealVector) -> Result<f64> {
    check_len(t, u)?;
    Ok(objective_unit(t, &unit(u)?))
}

fn check_len(t: &StructuredTuple, u: &RealVector) -> Result<()> {
    if u.len() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a tuple of size {}",
            u.len(),
            t.dim()
        )));
    }
    Ok(())
}

pub(crate) fn objective_unit(t: &StructuredTuple, u: &RealVector) -> f64 {
    let ju = t.j() * u;
    let mut f = 2.0 * ju.norm_squared();
    for x in t.xs() {
        let xu = x * u;
        let c = u.dot(&xu);
        f += 2.0 * (xu - u * c).norm_squared() + c * c;
    }
    f
}

/// `S = JᵀJ + Σ Xᵢ²`.
pub fn eigen_bound_matrix(t: &StructuredTuple) -> RealMatrix {
    let mut s = t.j().tr_mul(t.j());
    for x in t.xs() {
        s += x * x;
    }
    symmetrize(&s)
}

/// Euclidean gradient `4Su - 4 Σ (uᵀXᵢu) Xᵢu` of the polynomial extension of `f`.
pub fn euclidean_gradient(t: &StructuredTuple, s: &RealMatrix, u: &RealVector) -> RealVector {
    let mut g = s * u * 4.0;
    for x in t.xs() {
        let xu = x * u;
        let c = u.dot(&xu);
        g -= xu * (4.0 * c);
    }
    g
}

/// Riemannian gradient `(I - uuᵀ)∇f` at a unit vector.
pub fn riemannian_gradient(t: &StructuredTuple, u: &RealVector) -> Result<RealVector> {
    check_len(t, u)?;
    let u = unit(u)?;
    let s = eigen_bound_matrix(t);
    let g = euclidean_gradient(t, &s, &u);
    Ok(&g - &u * u.dot(&g))
}

/// Euclidean Hessian `4S - Σ [8 Xᵢuuᵀ Xᵢ + 4 (uᵀXᵢu) Xᵢ]`.
fn euclidean_hessian(t: &StructuredTuple, s: &RealMatrix, u: &RealVector) -> RealMatrix {
    let mut h = s * 4.0;
    for x in t.xs() {
        let xu = x * u;
        let c = u.dot(&xu);
        h -= &xu * xu.transpose() * 8.0 + x * (4.0 * c);
    }
    h
}

/// Orthonormal basis of `u^⊥` from a Householder reflector.
fn tangent_basis(u: &RealVector) -> RealMatrix {
    let n = u.len();
    let k = u.iamax();
    let mut v = u.clone();
    v[k] += u[k].signum();
    let vv = v.norm_squared();
    let h = RealMatrix::identity(n, n) - &v * v.transpose() * (2.0 / vv);
    let mut b = RealMatrix::zeros(n, n - 1);
    let mut c = 0;
    for i in 0..n {
        if i != k {
            b.set_column(c, &h.column(i));
            c += 1;
        }
    }
    b
}

struct Point {
    u: RealVector,
    f: f64,
    egrad: RealVector,
    rgrad: RealVector,
}

impl Point {
    fn new(t: &StructuredTuple, s: &RealMatrix, u: RealVector) -> Self {
        let f = objective_unit(t, &u);
        let egrad = euclidean_gradient(t, s, &u);
        let rgrad = &egrad - &u * u.dot(&egrad);
        Self { u, f, egrad, rgrad }
    }
}

struct Run {
    u: RealVector,
    f: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

fn retract(u: &RealVector, step: &RealVector) -> Option<RealVector> {
    let v = u + step;
    let n = v.norm();
    (n.is_finite() && n > 0.0).then(|| v / n)
}

fn descend(
    t: &StructuredTuple,
    s: &RealMatrix,
    s_norm: f64,
    start: RealVector,
    cfg: &OptimizerConfig,
) -> Run {
    let gtol = cfg.gradient_tol * s_norm.max(1.0);
    let roundoff = 16.0 * f64::EPSILON;
    let mut p = Point::new(t, s, start);
    let mut alpha_grad = 1.0 / (8.0 * s_norm).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        let gn = p.rgrad.norm();
        if gn <= gtol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut direction = None;
        if cfg.newton && p.u.len() > 1 {
            let b = tangent_basis(&p.u);
            let mut hr = b.transpose() * euclidean_hessian(t, s, &p.u) * &b;
            let radial = p.u.dot(&p.egrad);
            for i in 0..hr.nrows() {
                hr[(i, i)] -= radial;
            }
            let gr = b.tr_mul(&p.egrad);
            if let Some(chol) = Cholesky::new(symmetrize(&hr)) {
                let d = -(&b * chol.solve(&gr));
                if d.iter().all(|x| x.is_finite()) && p.rgrad.dot(&d) < 0.0 {
                    direction = Some((d, 1.0, true));
                }
            }
        }
        let (d, alpha0, newton) =
            direction.unwrap_or_else(|| (-p.rgrad.clone(), alpha_grad, false));

        let slope = p.rgrad.dot(&d);
        let mut alpha = alpha0;
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            if let Some(u_new) = retract(&p.u, &(&d * alpha)) {
                let q = Point::new(t, s, u_new);
                let armijo = q.f <= p.f + cfg.armijo * alpha * slope;
                // Near a minimizer the decrease drops below rounding; accept
                // steps that keep f flat and shrink the gradient.
                let flat = q.f <= p.f + roundoff * p.f.abs() && q.rgrad.norm() < gn;
                if armijo || flat {
                    accepted = Some(q);
                    break;
                }
            }
            alpha *= cfg.backtrack;
        }
        match accepted {
            Some(q) => {
                if !newton {
                    alpha_grad = (alpha * 2.0).min(1e6 * alpha0.max(1.0));
                }
                p = q;
            }
            None if newton => {
                // Retry the iteration with a gradient step.
                let mut alpha = alpha_grad;
                let slope = -gn * gn;
                let mut moved = false;
                for _ in 0..cfg.max_backtracks {
                    if let Some(u_new) = retract(&p.u, &(&p.rgrad * -alpha)) {
                        let q = Point::new(t, s, u_new);
                        if q.f <= p.f + cfg.armijo * alpha * slope {
                            alpha_grad = alpha * 2.0;
                            p = q;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= cfg.backtrack;
                }
                if !moved {
                    break;
                }
            }
            None => break,
        }
    }
    let grad_norm = p.rgrad.norm();
    if grad_norm <= gtol {
        converged = true;
    }
    Run {
        u: p.u,
        f: p.f,
        grad_norm,
        iterations,
        converged,
    }
}

/// Flip `u` so that its largest-magnitude entry is positive.
fn normalize_sign(mut u: RealVector) -> RealVector {
    if u.is_empty() {
        return u;
    }
    let k = u.iamax();
    if u[k] < 0.0 {
        u.neg_mut();
    }
    u
}

fn random_starts(n: usize, count: usize, seed: u64) -> Vec<RealVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(count);
    while starts.len() < count {
        let v = RealVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        if let Ok(u) = unit(&v) {
            starts.push(u);
        }
    }
    starts
}

/// Structured distance to the common-kernel set with its certificate.
pub fn minimize_sphere(t: &StructuredTuple, cfg: &OptimizerConfig) -> Result<DistanceResult> {
    cfg.validate()?;
    let n = t.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty tuple".into()));
    }
    let s = eigen_bound_matrix(t);
    let eig = sym_eig_unchecked(&s);
    let lambda_min = eig.min().max(0.0);
    let s_norm = eig.values[n - 1].abs();

    let (best, starts_used) = if n == 1 {
        let u = RealVector::from_element(1, 1.0);
        let f = objective_unit(t, &u);
        let run = Run {
            u,
            f,
            grad_norm: 0.0,
            iterations: 0,
            converged: true,
        };
        (run, 1)
    } else {
        let mut starts = vec![eig.vectors.column(0).into_owned()];
        starts.extend(random_starts(n, cfg.num_random_starts, cfg.rng_seed));
        let runs: Vec<Run> = starts
            .into_par_iter()
            .map(|u0| descend(t, &s, s_norm, u0, cfg))
            .collect();
        let used = runs.len();
        // Fixed start order, strict improvement: the first minimum wins.
        let best = runs
            .into_iter()
            .reduce(|a, b| if b.f < a.f { b } else { a })
            .expect("at least one start");
        (best, used)
    };

    let objective_value = best.f.max(0.0);
    let distance = objective_value.sqrt();
    let lower_bound = lambda_min.sqrt();
    let upper_bound = (2.0 * lambda_min).sqrt();
    let slack = 1e-8 * s_norm.max(1.0);
    if objective_value < lambda_min - slack {
        return Err(Error::OptimizerInconsistency(format!(
            "objective {objective_value:e} below the eigenvalue bound {lambda_min:e}"
        )));
    }
    let minimizer = normalize_sign(best.u);
    let certificate = build_unit(t, &minimizer);
    Ok(DistanceResult {
        distance,
        lower_bound,
        upper_bound,
        lambda_min,
        minimizer,
        certificate,
        objective_value,
        starts_used,
        converged: best.converged,
        iterations: best.iterations,
        grad_norm: best.grad_norm,
    })
}

/// The three kernel characterizations of a tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonKernel {
    pub has_common_kernel: bool,
    /// Orthonormal basis of `ker(JᵀJ + Σ Xᵢ²)`.
    pub kernel: RealMatrix,
    /// `ker [J; X₀; …; X_ℓ]`.
    pub stacked: RankDecision,
    /// `ker(JᵀJ + Σ Xᵢ²)`; the threshold is squared and floored at rounding level.
    pub squared: RankDecision,
    /// `ker(-J + Σ Xᵢ)`.
    pub linear: RankDecision,
}

/// Decides whether the members of `t` share a kernel, computing it three ways.
pub fn common_kernel_check(t: &StructuredTuple, tol: &Tolerance) -> Result<CommonKernel> {
    let n = t.dim();
    let members: Vec<&RealMatrix> = t.matrices().collect();
    let stacked_m = vstack(&members);
    let stacked_split = kernel_split(&stacked_m, tol);
    let stacked = stacked_split.decision.clone().with_label("stacked");

    let s = eigen_bound_matrix(t);
    let eig = sym_eig_unchecked(&s);
    let lmax = eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let thr = stacked.threshold.powi(2).max(10.0 * n as f64 * f64::EPSILON * lmax);
    let mut values: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    values.reverse();
    let squared_rank = values.iter().filter(|&&v| v > thr).count();
    let squared = RankDecision {
        label: "squared".into(),
        rank: squared_rank,
        cols: n,
        ambiguous: thr > 0.0 && values.iter().any(|&v| v > thr / 10.0 && v < thr * 10.0),
        singular_values: values,
        threshold: thr,
    };

    let mut lin = -t.j().clone();
    for x in t.xs() {
        lin += x;
    }
    let linear = kernel_split(&lin, tol).decision.with_label("linear");

    let dims = (stacked.nullity(), squared.nullity(), linear.nullity());
    if dims.0 != dims.1 || dims.1 != dims.2 {
        return Err(Error::CharacterizationDisagreement {
            stacked: dims.0,
            squared: dims.1,
            linear: dims.2,
        });
    }
    Ok(CommonKernel {
        has_common_kernel: dims.0 > 0,
        kernel: stacked_split.kernel,
        stacked,
        squared,
        linear,
    })
}

/// Orthogonal splitting off the common kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSplitting {
    /// Orthogonal; the last `r` columns span the common kernel.
    pub u: RealMatrix,
    /// Compressed tuple of size `n - r`.
    pub reduced: StructuredTuple,
    pub r: usize,
    /// Largest off-diagonal block entry of the transformed members.
    pub coupling: f64,
}

pub fn split_common_kernel(t: &StructuredTuple, tol: &Tolerance) -> Result<KernelSplitting> {
    let n = t.dim();
    let ck = common_kernel_check(t, tol)?;
    let r = ck.kernel.ncols();
    if r == 0 {
        return Ok(KernelSplitting {
            u: RealMatrix::identity(n, n),
            reduced: t.clone(),
            r: 0,
            coupling: 0.0,
        });
    }
    let members: Vec<&RealMatrix> = t.matrices().collect();
    let split = kernel_split(&vstack(&members), tol);
    let u = split.orthogonal();
    let full = t.congruence(&u);
    let m = n - r;
    let coupling = full
        .matrices()
        .map(|x| {
            let off = x.view((0, m), (m, r)).amax();
            let low = x.view((m, 0), (r, n)).amax();
            off.max(low)
        })
        .fold(0.0, f64::max);
    let reduced = t.congruence(&split.range);
    Ok(KernelSplitting {
        u,
        reduced,
        r,
        coupling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{block_diag, from_rows};
    use approx::assert_relative_eq;

    fn ex54() -> StructuredTuple {
        StructuredTuple::new(
            from_rows(&[&[0.0, -0.5], &[0.5, 0.0]]),
            vec![
                from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]),
                from_rows(&[&[0.18, 0.42], &[0.42, 1.03]]),
            ],
            &Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let tol = Tolerance::default();
        let i = RealMatrix::identity(2, 2);
        let t = StructuredTuple::without_skew(vec![i.clone(), i], &tol).unwrap();
        let u = RealVector::from_vec(vec![0.6, 0.8]);
        assert_relative_eq!(objective(&t, &u).unwrap(), 2.0, epsilon = 1e-14);

        let d = from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let t = StructuredTuple::without_skew(vec![d], &tol).unwrap();
        assert_eq!(objective(&t, &RealVector::from_vec(vec![0.0, 1.0])).unwrap(), 0.0);

        // hand evaluation: 2(0.5)² + 0 + 0 + 2(0.42)² + 0.18²
        let f = objective(&ex54(), &RealVector::from_vec(vec![1.0, 0.0])).unwrap();
        let hand = 2.0 * 0.25 + 2.0 * 0.42f64.powi(2) + 0.18f64.powi(2);
        assert_relative_eq!(f, hand, epsilon = 1e-15);
        assert_relative_eq!(f, 0.8852, epsilon = 1e-12);
        let cert = crate::perturbation::build_perturbation(&ex54(), &RealVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(cert.total_norm.powi(2), f, max_relative = 1e-12);
    }

    #[test]
    fn simplified_form_matches_definition() {
        let t = ex54();
        let s = eigen_bound_matrix(&t);
        for k in 0..50 {
            let a = k as f64 * 0.13;
            let u = RealVector::from_vec(vec![a.cos(), a.sin()]);
            let mut simple = 2.0 * u.dot(&(t.j().tr_mul(t.j()) * &u));
            for x in t.xs() {
                let c = u.dot(&(x * &u));
                simple += 2.0 * u.dot(&(x * x * &u)) - c * c;
            }
            assert_relative_eq!(simple, objective_unit(&t, &u), max_relative = 1e-12);
            assert!(u.dot(&(&s * &u)) <= objective_unit(&t, &u) + 1e-14);
        }
    }

    #[test]
    fn eigen_bound_examples() {
        let t = StructuredTuple::without_skew(vec![RealMatrix::identity(2, 2)], &Tolerance::default()).unwrap();
        assert_eq!(eigen_bound_matrix(&t), RealMatrix::identity(2, 2));
    }

    #[test]
    fn minimize_constant_objective() {
        let tol = Tolerance::default();
        for n in 1..5 {
            let i = RealMatrix::identity(n, n);
            let t = StructuredTuple::without_skew(vec![i.clone(), i], &tol).unwrap();
            let r = minimize_sphere(&t, &OptimizerConfig::default()).unwrap();
            assert_relative_eq!(r.distance, 2f64.sqrt(), epsilon = 1e-12);
            assert!(r.converged);
        }
    }

    #[test]
    fn minimize_common_kernel_is_zero() {
        let tol = Tolerance::default();
        let d = from_rows(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let j = from_rows(&[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let t = StructuredTuple::new(j, vec![d.clone(), d], &tol).unwrap();
        let r = minimize_sphere(&t, &OptimizerConfig::default()).unwrap();
        assert!(r.distance < 1e-12);
        assert_relative_eq!(r.minimizer[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn minimize_example_sandwich_and_certificate() {
        let t = ex54();
        let r = minimize_sphere(&t, &OptimizerConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.lower_bound <= r.distance && r.distance <= r.upper_bound + 1e-10);
        assert_relative_eq!(r.upper_bound, 2f64.sqrt() * r.lower_bound, max_relative = 1e-14);
        assert_relative_eq!(r.certificate.total_norm, r.distance, max_relative = 1e-10);
        assert_relative_eq!(objective_unit(&t, &r.minimizer), r.objective_value, max_relative = 1e-12);
        assert!(r.minimizer[r.minimizer.iamax()] > 0.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let t = ex54();
        let cfg = OptimizerConfig::default().with_seed(42);
        let a = minimize_sphere(&t, &cfg).unwrap();
        let b = minimize_sphere(&t, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = ex54();
        let u = unit(&RealVector::from_vec(vec![0.3, -0.7])).unwrap();
        let g = riemannian_gradient(&t, &u).unwrap();
        let b = tangent_basis(&u);
        let v = b.column(0).into_owned();
        let h = 1e-6;
        let fp = objective_unit(&t, &retract(&u, &(&v * h)).unwrap());
        let fm = objective_unit(&t, &retract(&u, &(&v * -h)).unwrap());
        let fd = (fp - fm) / (2.0 * h);
        assert_relative_eq!(g.dot(&v), fd, max_relative = 1e-5);
    }

    #[test]
    fn tangent_basis_is_orthonormal_complement() {
        let u = unit(&RealVector::from_vec(vec![1.0, -2.0, 0.5, 3.0])).unwrap();
        let b = tangent_basis(&u);
        assert!((b.transpose() * &b - RealMatrix::identity(3, 3)).norm() < 1e-14);
        assert!((b.transpose() * &u).norm() < 1e-14);
    }

    #[test]
    fn common_kernel_examples() {
        let tol = Tolerance::default();
        let d = from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let t = StructuredTuple::without_skew(vec![d.clone(), d], &tol).unwrap();
        let ck = common_kernel_check(&t, &tol).unwrap();
        assert!(ck.has_common_kernel);
        assert_eq!(ck.kernel.ncols(), 1);
        assert_relative_eq!(ck.kernel[(1, 0)].abs(), 1.0, epsilon = 1e-15);

        let ck = common_kernel_check(&ex54(), &tol).unwrap();
        assert!(!ck.has_common_kernel);
    }

    #[test]
    fn split_trivial_kernel_is_identity() {
        let tol = Tolerance::default();
        let s = split_common_kernel(&ex54(), &tol).unwrap();
        assert_eq!(s.r, 0);
        assert_eq!(s.u, RealMatrix::identity(2, 2));
    }

    #[test]
    fn split_padded_block() {
        let tol = Tolerance::default();
        let t0 = ex54();
        let z = RealMatrix::zeros(1, 1);
        let pad = |m: &RealMatrix| block_diag(&[m, &z]);
        let t = StructuredTuple::new(pad(t0.j()), t0.xs().iter().map(pad).collect(), &tol).unwrap();
        let s = split_common_kernel(&t, &tol).unwrap();
        assert_eq!(s.r, 1);
        assert!(s.coupling < 1e-14);
        assert_relative_eq!(s.u.column(2).amax(), 1.0, epsilon = 1e-15);
        // The reduced tuple is the nonzero block up to an orthogonal change of basis.
        let a = minimize_sphere(&s.reduced, &OptimizerConfig::default()).unwrap();
        let b = minimize_sphere(&t0, &OptimizerConfig::default()).unwrap();
        assert_relative_eq!(a.distance, b.distance, epsilon = 1e-10);
        let q = &s.u.view((0, 0), (2, 2)).into_owned();
        let back = t0.congruence(q);
        for (x, y) in back.matrices().zip(s.reduced.matrices()) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
