//! Dense linear-algebra primitives shared by the distance computations.
//!
//! Everything here is a thin, tolerance-aware layer over `nalgebra`: sorted
//! symmetric eigendecompositions, SVD-based numerical rank and kernels, and
//! the structure checks (symmetry, skew-symmetry, semidefiniteness) that the
//! structured constructors rely on.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type RealVector = DVector<f64>;

/// Thresholds used for rank, semidefiniteness and kernel-membership decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative rank threshold. `None` means `max(rows, cols) * f64::EPSILON`
    /// for the matrix at hand.
    #[serde(default)]
    pub rank_rel: Option<f64>,
    #[serde(default = "default_psd_rel")]
    pub psd_rel: f64,
    #[serde(default = "default_residual_abs")]
    pub residual_abs: f64,
}

fn default_psd_rel() -> f64 {
    1e-10
}

fn default_residual_abs() -> f64 {
    1e-10
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: None,
            psd_rel: default_psd_rel(),
            residual_abs: default_residual_abs(),
        }
    }
}

impl Tolerance {
    pub fn with_rank_rel(mut self, rank_rel: f64) -> Self {
        self.rank_rel = Some(rank_rel);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rank_ok = self.rank_rel.map_or(true, |r| r > 0.0 && r.is_finite());
        if !rank_ok || !(self.psd_rel > 0.0) || !(self.residual_abs > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be strictly positive".into(),
            ));
        }
        Ok(())
    }

    /// Relative rank threshold for a `rows x cols` matrix.
    pub fn rank_rel_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rel
            .unwrap_or_else(|| rows.max(cols).max(1) as f64 * f64::EPSILON)
    }
}

/// Outcome of a numerical rank decision, with the singular values that
/// governed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    pub label: String,
    pub rank: usize,
    pub cols: usize,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Absolute threshold: singular values below it count as zero.
    pub threshold: f64,
    /// Some singular value lies within a factor of ten of the threshold.
    pub ambiguous: bool,
}

impl RankDecision {
    pub fn nullity(&self) -> usize {
        self.cols - self.rank
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Ascending symmetric eigendecomposition.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: RealVector,
    /// Orthogonal matrix whose columns are the eigenvectors, in the order of `values`.
    pub vectors: RealMatrix,
}

impl SymEig {
    pub fn min(&self) -> f64 {
        if self.values.is_empty() {
            f64::INFINITY
        } else {
            self.values[0]
        }
    }
}

pub fn ensure_finite(name: &str, m: &RealMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(name.to_string()))
    }
}

pub fn ensure_square(name: &str, m: &RealMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            name: name.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// `(X + Xᵀ)/2`.
pub fn symmetrize(x: &RealMatrix) -> RealMatrix {
    (x + x.transpose()) * 0.5
}

/// `(X - Xᵀ)/2`.
pub fn skew_part(x: &RealMatrix) -> RealMatrix {
    (x - x.transpose()) * 0.5
}

/// Accepts `x` as symmetric if its asymmetry is within `psd_rel` relative to
/// its norm and returns the exact symmetric projection.
pub fn validated_symmetric(name: &str, x: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_square(name, x)?;
    ensure_finite(name, x)?;
    let norm = x.norm();
    let asym = (x - x.transpose()).norm();
    if asym > tol.psd_rel * norm {
        return Err(Error::NotSymmetric {
            name: name.to_string(),
            asymmetry: if norm > 0.0 { asym / norm } else { asym },
            tolerance: tol.psd_rel,
        });
    }
    Ok(symmetrize(x))
}

/// Skew-symmetric counterpart of [`validated_symmetric`].
pub fn validated_skew(name: &str, x: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    ensure_square(name, x)?;
    ensure_finite(name, x)?;
    let norm = x.norm();
    let defect = (x + x.transpose()).norm();
    if defect > tol.psd_rel * norm {
        return Err(Error::NotSkew {
            name: name.to_string(),
            defect: if norm > 0.0 { defect / norm } else { defect },
            tolerance: tol.psd_rel,
        });
    }
    Ok(skew_part(x))
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eig(s: &RealMatrix, tol: &Tolerance) -> Result<SymEig> {
    let s = validated_symmetric("S", s, tol)?;
    Ok(sym_eig_unchecked(&s))
}

/// Same as [`sym_eig`] for a matrix already known to be exactly symmetric.
pub(crate) fn sym_eig_unchecked(s: &RealMatrix) -> SymEig {
    let n = s.nrows();
    if n == 0 {
        return SymEig {
            values: RealVector::zeros(0),
            vectors: RealMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(s.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = RealVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SymEig { values, vectors }
}

/// Smallest eigenvalue of an exactly symmetric matrix (`+inf` for 0x0).
pub(crate) fn lambda_min_unchecked(s: &RealMatrix) -> f64 {
    if s.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(s.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Full right-singular basis: singular values (descending, length `min(m,n)`
/// padded with zeros up to `n`) and an orthogonal `n x n` matrix `V`.
fn right_svd(x: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let (m, n) = x.shape();
    if n == 0 {
        return (Vec::new(), RealMatrix::zeros(0, 0));
    }
    // Pad with zero rows so that the thin SVD still yields a square V.
    let padded = if m < n {
        let mut p = RealMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(x);
        p
    } else {
        x.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let mut v = RealMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &v_t.row(src).transpose());
    }
    let values = order.iter().map(|&i| sv[i]).collect();
    (values, v)
}

/// Singular values in descending order.
pub fn singular_values(x: &RealMatrix) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = x.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Smallest singular value of a nonempty matrix.
pub fn min_singular_value(x: &RealMatrix) -> Result<f64> {
    ensure_finite("X", x)?;
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    Ok(singular_values(x).last().copied().unwrap_or(0.0))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(x: &RealMatrix) -> f64 {
    singular_values(x).first().copied().unwrap_or(0.0)
}

fn decide_rank(label: &str, sv: Vec<f64>, rows: usize, cols: usize, tol: &Tolerance) -> RankDecision {
    decide_rank_scaled(label, sv, rows, cols, tol, None)
}

fn decide_rank_scaled(
    label: &str,
    sv: Vec<f64>,
    rows: usize,
    cols: usize,
    tol: &Tolerance,
    scale: Option<f64>,
) -> RankDecision {
    let smax = scale.unwrap_or_else(|| sv.first().copied().unwrap_or(0.0));
    let threshold = tol.rank_rel_for(rows, cols) * smax;
    let rank = sv.iter().filter(|&&s| s > threshold && s > 0.0).count();
    let ambiguous = threshold > 0.0
        && sv
            .iter()
            .any(|&s| s > threshold / 10.0 && s < threshold * 10.0);
    RankDecision {
        label: label.to_string(),
        rank,
        cols,
        singular_values: sv,
        threshold,
        ambiguous,
    }
}

/// Numerical rank: singular values below `rank_rel * sigma_max` count as zero.
pub fn numerical_rank(x: &RealMatrix, tol: &Tolerance) -> RankDecision {
    let sv = singular_values(x);
    decide_rank("rank", sv, x.nrows(), x.ncols(), tol)
}

/// Orthonormal bases of the row space complement and the right kernel.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    /// `n x rank` orthonormal basis of the orthogonal complement of the kernel.
    pub range: RealMatrix,
    /// `n x (n - rank)` orthonormal kernel basis.
    pub kernel: RealMatrix,
    pub decision: RankDecision,
}

impl KernelSplit {
    /// `[range, kernel]` as one orthogonal matrix.
    pub fn orthogonal(&self) -> RealMatrix {
        let n = self.range.nrows();
        let mut u = RealMatrix::zeros(n, n);
        let r = self.range.ncols();
        u.view_mut((0, 0), (n, r)).copy_from(&self.range);
        u.view_mut((0, r), (n, n - r)).copy_from(&self.kernel);
        u
    }
}

pub fn kernel_split(x: &RealMatrix, tol: &Tolerance) -> KernelSplit {
    kernel_split_scaled(x, tol, None)
}

/// Like [`kernel_split`], with the threshold taken relative to `scale`
/// instead of the largest singular value of `x`. Used when `x` is a
/// compression of a larger matrix whose norm sets the noise level.
pub fn kernel_split_scaled(x: &RealMatrix, tol: &Tolerance, scale: Option<f64>) -> KernelSplit {
    let (m, n) = x.shape();
    let (sv, v) = right_svd(x);
    let decision = decide_rank_scaled("kernel", sv, m, n, tol, scale);
    let r = decision.rank;
    KernelSplit {
        range: v.columns(0, r).into_owned(),
        kernel: v.columns(r, n - r).into_owned(),
        decision,
    }
}

/// Orthonormal basis of the numerical right kernel of `x`.
pub fn kernel_basis(x: &RealMatrix, tol: &Tolerance) -> RealMatrix {
    kernel_split(x, tol).kernel
}

/// Orthonormal basis of the column space of `x`.
pub fn range_basis(x: &RealMatrix, tol: &Tolerance) -> (RealMatrix, RankDecision) {
    range_basis_scaled(x, tol, None)
}

/// [`range_basis`] with an external reference scale for the threshold.
pub fn range_basis_scaled(
    x: &RealMatrix,
    tol: &Tolerance,
    scale: Option<f64>,
) -> (RealMatrix, RankDecision) {
    let (m, c) = x.shape();
    if m == 0 || c == 0 {
        return (
            RealMatrix::zeros(m, 0),
            decide_rank_scaled("range", Vec::new(), m, c, tol, scale),
        );
    }
    let svd = SVD::new(x.clone(), true, false);
    let u = svd.u.expect("requested U");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let decision = decide_rank_scaled("range", sorted, m, c, tol, scale);
    let mut basis = RealMatrix::zeros(m, decision.rank);
    for (dst, &src) in order.iter().take(decision.rank).enumerate() {
        basis.set_column(dst, &u.column(src));
    }
    (basis, decision)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// (orthonormal) columns of `basis`.
pub fn orthogonal_complement(basis: &RealMatrix) -> RealMatrix {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return RealMatrix::identity(n, n);
    }
    let tol = Tolerance::default().with_rank_rel(1e-8);
    kernel_basis(&basis.transpose(), &tol)
}

/// `λ_min(S) >= -psd_rel * max(1, ‖S‖_F)` after exact symmetrization.
pub fn is_psd(s: &RealMatrix, tol: &Tolerance) -> Result<bool> {
    ensure_square("S", s)?;
    ensure_finite("S", s)?;
    let s = symmetrize(s);
    Ok(psd_margin_ok(lambda_min_unchecked(&s), s.norm(), tol))
}

pub(crate) fn psd_margin_ok(lambda_min: f64, norm: f64, tol: &Tolerance) -> bool {
    lambda_min >= -tol.psd_rel * norm.max(1.0)
}

/// Validated symmetric positive semidefinite matrix (exactly symmetrized).
pub fn validated_psd(name: &str, x: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    let s = validated_symmetric(name, x, tol)?;
    let lmin = lambda_min_unchecked(&s);
    if !psd_margin_ok(lmin, s.norm(), tol) {
        return Err(Error::NotPsd {
            name: name.to_string(),
            lambda_min: lmin,
        });
    }
    Ok(s)
}

/// Unique split `X = sym + skew`.
pub fn split_sym_skew(x: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    ensure_square("X", x)?;
    ensure_finite("X", x)?;
    Ok((symmetrize(x), skew_part(x)))
}

/// Frobenius norm of a tuple of matrices.
pub fn tuple_frobenius<'a, I>(matrices: I) -> f64
where
    I: IntoIterator<Item = &'a RealMatrix>,
{
    matrices
        .into_iter()
        .map(|m| m.norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Block-diagonal assembly of square or rectangular blocks.
pub fn block_diag(blocks: &[&RealMatrix]) -> RealMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = RealMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Stack blocks with equal column counts on top of each other.
pub fn vstack(blocks: &[&RealMatrix]) -> RealMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RealMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    out
}

/// Place blocks with equal row counts side by side.
pub fn hstack(blocks: &[&RealMatrix]) -> RealMatrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = RealMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    out
}

/// Assemble a 2x2 block matrix.
pub fn block2(
    a11: &RealMatrix,
    a12: &RealMatrix,
    a21: &RealMatrix,
    a22: &RealMatrix,
) -> RealMatrix {
    let (r1, c1) = a11.shape();
    let (r2, c2) = a22.shape();
    debug_assert_eq!(a12.shape(), (r1, c2));
    debug_assert_eq!(a21.shape(), (r2, c1));
    let mut out = RealMatrix::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a11);
    out.view_mut((0, c1), (r1, c2)).copy_from(a12);
    out.view_mut((r1, 0), (r2, c1)).copy_from(a21);
    out.view_mut((r1, c1), (r2, c2)).copy_from(a22);
    out
}

/// Row-major constructor used by fixtures and tests.
pub fn from_rows(rows: &[&[f64]]) -> RealMatrix {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    RealMatrix::from_fn(m, n, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn orth_residual(v: &RealMatrix) -> f64 {
        (v.transpose() * v - RealMatrix::identity(v.ncols(), v.ncols())).norm()
    }

    #[test]
    fn sym_eig_identity_and_diagonal() {
        let tol = Tolerance::default();
        let e = sym_eig(&RealMatrix::identity(2, 2), &tol).unwrap();
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
        assert!(orth_residual(&e.vectors) < 1e-12);

        let e = sym_eig(&from_rows(&[&[3.0, 0.0], &[0.0, -1.0]]), &tol).unwrap();
        assert_relative_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn sym_eig_residual_small() {
        let s = from_rows(&[&[2.0, 1.0, 0.5], &[1.0, 3.0, -1.0], &[0.5, -1.0, 1.0]]);
        let e = sym_eig(&s, &Tolerance::default()).unwrap();
        let norm = s.norm();
        for k in 0..3 {
            let v = e.vectors.column(k);
            let r = &s * v - v * e.values[k];
            assert!(r.norm() <= 1e-12 * norm);
        }
        assert!(orth_residual(&e.vectors) < 1e-10);
    }

    #[test]
    fn sym_eig_rejects_bad_input() {
        let tol = Tolerance::default();
        assert!(matches!(
            sym_eig(&RealMatrix::zeros(2, 3), &tol),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            sym_eig(&from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]), &tol),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            sym_eig(&from_rows(&[&[f64::NAN, 0.0], &[0.0, 1.0]]), &tol),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn kernel_examples() {
        let tol = Tolerance::default();
        let k = kernel_basis(&from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]), &tol);
        assert_eq!(k.ncols(), 1);
        assert_relative_eq!(k[(1, 0)].abs(), 1.0, epsilon = 1e-14);

        let full = from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        assert_eq!(kernel_basis(&full, &tol).ncols(), 0);

        let ones = from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let k = kernel_basis(&ones, &tol);
        assert_eq!(k.ncols(), 1);
        let s = 0.5f64.sqrt();
        assert_relative_eq!((k[(0, 0)] * k[(1, 0)]), -0.5, epsilon = 1e-14);
        assert_relative_eq!(k[(0, 0)].abs(), s, epsilon = 1e-14);
        assert!((&ones * &k).norm() < 1e-14);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let x = from_rows(&[&[1.0, 0.0, 0.0]]);
        let split = kernel_split(&x, &Tolerance::default());
        assert_eq!(split.kernel.ncols(), 2);
        assert!(orth_residual(&split.orthogonal()) < 1e-12);
    }

    #[test]
    fn psd_examples() {
        let tol = Tolerance::default();
        assert!(is_psd(&RealMatrix::identity(3, 3), &tol).unwrap());
        assert!(!is_psd(&from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]), &tol).unwrap());
        let r = from_rows(&[&[0.18, 0.42], &[0.42, 1.03]]);
        assert!(is_psd(&r, &tol).unwrap());
        assert!(is_psd(&RealMatrix::zeros(3, 2), &tol).is_err());
    }

    #[test]
    fn split_examples() {
        let x = from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let (s, k) = split_sym_skew(&x).unwrap();
        assert_eq!(s, from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]));
        assert_eq!(k, from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        assert_relative_eq!(x.norm_squared(), s.norm_squared() + k.norm_squared(), max_relative = 1e-12);

        let sym = from_rows(&[&[2.0, 3.0], &[3.0, 4.0]]);
        let (s, k) = split_sym_skew(&sym).unwrap();
        assert_eq!(s, sym);
        assert_eq!(k, RealMatrix::zeros(2, 2));
        let (s, k) = split_sym_skew(&from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])).unwrap();
        assert_eq!(s, RealMatrix::zeros(2, 2));
        assert_eq!(k, from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
    }

    #[test]
    fn tuple_frobenius_examples() {
        let i2 = RealMatrix::identity(2, 2);
        assert_relative_eq!(tuple_frobenius([&i2, &i2]), 2.0, epsilon = 1e-15);
        assert_eq!(tuple_frobenius([&RealMatrix::zeros(2, 2)]), 0.0);
        let a = from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_relative_eq!(tuple_frobenius([&a, &b]), 3f64.sqrt(), epsilon = 1e-15);
        let x = from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]);
        assert_eq!(tuple_frobenius([&x]), x.norm());
    }

    #[test]
    fn min_singular_value_zero_matrix() {
        assert_eq!(min_singular_value(&RealMatrix::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn rank_decision_flags_near_threshold() {
        let tol = Tolerance::default().with_rank_rel(1e-6);
        let x = RealMatrix::from_diagonal(&RealVector::from_vec(vec![1.0, 5e-7]));
        let d = numerical_rank(&x, &tol);
        assert_eq!(d.rank, 1);
        assert!(d.ambiguous);
        let x = RealMatrix::from_diagonal(&RealVector::from_vec(vec![1.0, 1e-12]));
        let d = numerical_rank(&x, &tol);
        assert_eq!(d.rank, 1);
        assert!(!d.ambiguous);
    }
}
