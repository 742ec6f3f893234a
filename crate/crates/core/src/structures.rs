//! Structured matrix objects with validated construction.
//!
//! Every constructor checks the structure class within tolerance and then
//! projects exactly once: skew parts become `(J - Jᵀ)/2`, symmetric parts
//! `(X + Xᵀ)/2`. After that the objects are immutable.
//!
//! Sign convention: a polynomial in the class `-λʲ J + Σ λⁱ Aᵢ` stores `J`
//! exactly as it appears under the minus sign. A dH pencil `λE - (J - R)` is
//! the grade-1, skew-index-0 member with `A₁ = E`, `A₀ = R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, validated_psd, validated_skew, RealMatrix, Tolerance,
};

fn check_dim(name: &str, m: &RealMatrix, n: usize) -> Result<()> {
    ensure_square(name, m)?;
    if m.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "`{name}` is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// A skew-symmetric `J` together with PSD matrices `X₀, …, X_ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredTuple {
    j: RealMatrix,
    xs: Vec<RealMatrix>,
}

impl StructuredTuple {
    pub fn new(j: RealMatrix, xs: Vec<RealMatrix>, tol: &Tolerance) -> Result<Self> {
        ensure_square("J", &j)?;
        let n = j.nrows();
        if xs.is_empty() {
            return Err(Error::InvalidParameter(
                "a structured tuple needs at least one PSD matrix".into(),
            ));
        }
        let j = validated_skew("J", &j, tol)?;
        let xs = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let name = format!("X{i}");
                check_dim(&name, x, n)?;
                validated_psd(&name, x, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { j, xs })
    }

    /// Tuple with `J = 0`.
    pub fn without_skew(xs: Vec<RealMatrix>, tol: &Tolerance) -> Result<Self> {
        let n = xs.first().map_or(0, |x| x.nrows());
        Self::new(RealMatrix::zeros(n, n), xs, tol)
    }

    /// Internal constructor for matrices that are structured by construction.
    pub(crate) fn from_parts(j: RealMatrix, xs: Vec<RealMatrix>) -> Self {
        Self { j, xs }
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn j(&self) -> &RealMatrix {
        &self.j
    }

    pub fn xs(&self) -> &[RealMatrix] {
        &self.xs
    }

    /// All members, `J` first.
    pub fn matrices(&self) -> impl Iterator<Item = &RealMatrix> {
        std::iter::once(&self.j).chain(self.xs.iter())
    }

    /// Orthogonal congruence `(UᵀJU, UᵀXᵢU)`; `u` may be rectangular (compression).
    pub fn congruence(&self, u: &RealMatrix) -> Self {
        let ut = u.transpose();
        let j = crate::linalg::skew_part(&(&ut * &self.j * u));
        let xs = self
            .xs
            .iter()
            .map(|x| crate::linalg::symmetrize(&(&ut * x * u)))
            .collect();
        Self { j, xs }
    }

    /// Same tuple with the PSD list reversed (`[X_ℓ, …, X₀]`).
    pub fn with_reversed_xs(&self) -> Self {
        let mut xs = self.xs.clone();
        xs.reverse();
        Self { j: self.j.clone(), xs }
    }
}

/// Dissipative-Hamiltonian pencil `λE - (J - R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DHPencil {
    e: RealMatrix,
    j: RealMatrix,
    r: RealMatrix,
}

impl DHPencil {
    pub fn new(e: RealMatrix, j: RealMatrix, r: RealMatrix, tol: &Tolerance) -> Result<Self> {
        ensure_square("E", &e)?;
        let n = e.nrows();
        check_dim("J", &j, n)?;
        check_dim("R", &r, n)?;
        Ok(Self {
            e: validated_psd("E", &e, tol)?,
            j: validated_skew("J", &j, tol)?,
            r: validated_psd("R", &r, tol)?,
        })
    }

    pub(crate) fn from_parts(e: RealMatrix, j: RealMatrix, r: RealMatrix) -> Self {
        Self { e, j, r }
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn e(&self) -> &RealMatrix {
        &self.e
    }

    pub fn j(&self) -> &RealMatrix {
        &self.j
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }

    /// `A = J - R`.
    pub fn a(&self) -> RealMatrix {
        &self.j - &self.r
    }

    /// `λE - (J - R)`.
    pub fn evaluate(&self, lambda: f64) -> RealMatrix {
        &self.e * lambda - &self.j + &self.r
    }

    /// Tuple `(J, [E, R])` whose common-kernel distance is the distance to singularity.
    pub fn tuple_sing(&self) -> StructuredTuple {
        StructuredTuple::from_parts(self.j.clone(), vec![self.e.clone(), self.r.clone()])
    }

    /// Tuple `(0, [E, R])` governing the distances to high index and instability.
    pub fn tuple_hi(&self) -> StructuredTuple {
        let n = self.dim();
        StructuredTuple::from_parts(
            RealMatrix::zeros(n, n),
            vec![self.e.clone(), self.r.clone()],
        )
    }

    /// The pencil `λR - (J - E)` (roles of `E` and `R` swapped).
    pub fn swapped(&self) -> Self {
        Self::from_parts(self.r.clone(), self.j.clone(), self.e.clone())
    }

    /// View as the grade-1, skew-index-0 polynomial `-J + R + λE`.
    pub fn to_polynomial(&self) -> StructuredPolynomial {
        StructuredPolynomial::from_parts(1, 0, self.j.clone(), vec![self.r.clone(), self.e.clone()])
    }
}

pub fn tuple_from_pencil_sing(p: &DHPencil) -> StructuredTuple {
    p.tuple_sing()
}

pub fn tuple_from_pencil_hi(p: &DHPencil) -> StructuredTuple {
    p.tuple_hi()
}

/// Matrix polynomial `-λʲ J + Σᵢ λⁱ Aᵢ` of explicit grade `k`.
///
/// The grade is never inferred from trailing zero coefficients: index and
/// infinite-eigenvalue multiplicities depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredPolynomial {
    grade: usize,
    skew_index: usize,
    j: RealMatrix,
    coeffs: Vec<RealMatrix>,
}

impl StructuredPolynomial {
    pub fn new(
        grade: usize,
        skew_index: usize,
        j: RealMatrix,
        coeffs: Vec<RealMatrix>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if skew_index > grade {
            return Err(Error::InvalidParameter(format!(
                "skew index {skew_index} exceeds grade {grade}"
            )));
        }
        if coeffs.len() != grade + 1 {
            return Err(Error::InvalidParameter(format!(
                "grade {grade} needs {} coefficients, got {}",
                grade + 1,
                coeffs.len()
            )));
        }
        ensure_square("J", &j)?;
        let n = j.nrows();
        let j = validated_skew("J", &j, tol)?;
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let name = format!("A{i}");
                check_dim(&name, a, n)?;
                validated_psd(&name, a, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grade,
            skew_index,
            j,
            coeffs,
        })
    }

    pub(crate) fn from_parts(
        grade: usize,
        skew_index: usize,
        j: RealMatrix,
        coeffs: Vec<RealMatrix>,
    ) -> Self {
        Self {
            grade,
            skew_index,
            j,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn skew_index(&self) -> usize {
        self.skew_index
    }

    pub fn j(&self) -> &RealMatrix {
        &self.j
    }

    /// PSD coefficients `A₀, …, A_k`.
    pub fn coeffs(&self) -> &[RealMatrix] {
        &self.coeffs
    }

    /// Full coefficient of `λⁱ`, i.e. `Aᵢ` or `A_j - J`.
    pub fn coefficient(&self, i: usize) -> RealMatrix {
        if i == self.skew_index {
            &self.coeffs[i] - &self.j
        } else {
            self.coeffs[i].clone()
        }
    }

    pub fn evaluate(&self, lambda: f64) -> RealMatrix {
        // Horner on the full coefficients.
        let mut acc = self.coefficient(self.grade);
        for i in (0..self.grade).rev() {
            acc = acc * lambda + self.coefficient(i);
        }
        acc
    }

    /// Tuple `(J, [A₀, …, A_k])`.
    pub fn tuple(&self) -> StructuredTuple {
        StructuredTuple::from_parts(self.j.clone(), self.coeffs.clone())
    }

    /// Same polynomial regarded at a larger grade (zero leading coefficients).
    pub fn with_grade(&self, grade: usize) -> Result<Self> {
        if grade < self.grade {
            return Err(Error::InvalidParameter(format!(
                "cannot lower grade from {} to {grade}",
                self.grade
            )));
        }
        let n = self.dim();
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(grade + 1, RealMatrix::zeros(n, n));
        Ok(Self::from_parts(grade, self.skew_index, self.j.clone(), coeffs))
    }
}

/// Quadratic `λ²M - λ(G - D) + K` with `M, D, K` PSD and `G` skew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DHQuadratic {
    m: RealMatrix,
    g: RealMatrix,
    d: RealMatrix,
    k: RealMatrix,
}

impl DHQuadratic {
    pub fn new(
        m: RealMatrix,
        g: RealMatrix,
        d: RealMatrix,
        k: RealMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        ensure_square("M", &m)?;
        let n = m.nrows();
        check_dim("G", &g, n)?;
        check_dim("D", &d, n)?;
        check_dim("K", &k, n)?;
        Ok(Self {
            m: validated_psd("M", &m, tol)?,
            g: validated_skew("G", &g, tol)?,
            d: validated_psd("D", &d, tol)?,
            k: validated_psd("K", &k, tol)?,
        })
    }

    pub(crate) fn from_parts(m: RealMatrix, g: RealMatrix, d: RealMatrix, k: RealMatrix) -> Self {
        Self { m, g, d, k }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn m(&self) -> &RealMatrix {
        &self.m
    }

    pub fn g(&self) -> &RealMatrix {
        &self.g
    }

    pub fn d(&self) -> &RealMatrix {
        &self.d
    }

    pub fn k(&self) -> &RealMatrix {
        &self.k
    }

    pub fn evaluate(&self, lambda: f64) -> RealMatrix {
        &self.m * (lambda * lambda) - (&self.g - &self.d) * lambda + &self.k
    }

    /// Reversal `λ²K - λ(G - D) + M`.
    pub fn reversal(&self) -> Self {
        Self::from_parts(self.k.clone(), self.g.clone(), self.d.clone(), self.m.clone())
    }
}

/// Maps `λ²M - λ(G - D) + K` to the grade-2, skew-index-1 polynomial with
/// `J = G` and `[A₀, A₁, A₂] = [K, D, M]`.
pub fn polynomial_from_quadratic(q: &DHQuadratic) -> StructuredPolynomial {
    StructuredPolynomial::from_parts(
        2,
        1,
        q.g.clone(),
        vec![q.k.clone(), q.d.clone(), q.m.clone()],
    )
}

/// General dH system `E ẋ = (J - R) Q x` with `EᵀQ` symmetric PSD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralDHSystem {
    e: RealMatrix,
    q: RealMatrix,
    j: RealMatrix,
    r: RealMatrix,
}

impl GeneralDHSystem {
    pub fn new(
        e: RealMatrix,
        q: RealMatrix,
        j: RealMatrix,
        r: RealMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        ensure_square("E", &e)?;
        let n = e.nrows();
        check_dim("Q", &q, n)?;
        check_dim("J", &j, n)?;
        check_dim("R", &r, n)?;
        ensure_finite("E", &e)?;
        ensure_finite("Q", &q)?;
        validated_psd("E^T Q", &(e.transpose() * &q), tol)?;
        Ok(Self {
            e,
            q,
            j: validated_skew("J", &j, tol)?,
            r: validated_psd("R", &r, tol)?,
        })
    }

    pub(crate) fn from_parts(e: RealMatrix, q: RealMatrix, j: RealMatrix, r: RealMatrix) -> Self {
        Self { e, q, j, r }
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn e(&self) -> &RealMatrix {
        &self.e
    }

    pub fn q(&self) -> &RealMatrix {
        &self.q
    }

    pub fn j(&self) -> &RealMatrix {
        &self.j
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }

    /// Pair `(E, (J - R)Q)` of the pencil `λE - (J - R)Q`.
    pub fn pencil_pair(&self) -> (RealMatrix, RealMatrix) {
        (self.e.clone(), (&self.j - &self.r) * &self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex54() -> DHPencil {
        DHPencil::new(
            from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]),
            from_rows(&[&[0.0, -0.5], &[0.5, 0.0]]),
            from_rows(&[&[0.18, 0.42], &[0.42, 1.03]]),
            &Tolerance::default(),
        )
        .unwrap()
    }

    #[test]
    fn tuple_from_example_pencil() {
        let p = ex54();
        let t = tuple_from_pencil_sing(&p);
        assert_eq!(t.j(), &from_rows(&[&[0.0, -0.5], &[0.5, 0.0]]));
        assert_eq!(t.xs(), &[p.e().clone(), p.r().clone()]);
        let h = tuple_from_pencil_hi(&p);
        assert_eq!(h.j(), &RealMatrix::zeros(2, 2));
        assert_eq!(h.xs(), t.xs());
    }

    #[test]
    fn trivial_pencil_tuples() {
        let tol = Tolerance::default();
        let z = RealMatrix::zeros(2, 2);
        let p = DHPencil::new(z.clone(), z.clone(), z.clone(), &tol).unwrap();
        let t = p.tuple_sing();
        assert!(t.matrices().all(|m| m.norm() == 0.0));

        let i = RealMatrix::identity(2, 2);
        let p = DHPencil::new(i.clone(), z.clone(), i.clone(), &tol).unwrap();
        assert_eq!(p.tuple_sing(), p.tuple_hi());

        let jr = from_rows(&[&[0.0, 3.0], &[-3.0, 0.0]]);
        let p = DHPencil::new(z.clone(), jr, z.clone(), &tol).unwrap();
        assert!(p.tuple_hi().matrices().all(|m| m.norm() == 0.0));
    }

    #[test]
    fn remark_counterexample_rejected() {
        let j = from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let x0 = from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let err = StructuredTuple::new(j, vec![x0], &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn construction_projects_structure() {
        let tol = Tolerance::default();
        let j = from_rows(&[&[0.0, 1.0 + 1e-13], &[-1.0, 0.0]]);
        let x = from_rows(&[&[2.0, 1.0], &[1.0 + 1e-13, 2.0]]);
        let t = StructuredTuple::new(j, vec![x], &tol).unwrap();
        assert_eq!(t.j(), &(-t.j().transpose()));
        assert_eq!(t.xs()[0], t.xs()[0].transpose());

        let bad = from_rows(&[&[0.0, 1.0], &[-0.9, 0.0]]);
        assert!(matches!(
            StructuredTuple::new(bad, vec![RealMatrix::identity(2, 2)], &tol),
            Err(Error::NotSkew { .. })
        ));
        assert!(matches!(
            StructuredTuple::new(RealMatrix::zeros(2, 2), vec![RealMatrix::identity(3, 3)], &tol),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn quadratic_to_polynomial_examples() {
        let tol = Tolerance::default();
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        let q = DHQuadratic::new(i.clone(), z.clone(), z.clone(), i.clone(), &tol).unwrap();
        let p = polynomial_from_quadratic(&q);
        assert_eq!((p.grade(), p.skew_index()), (2, 1));
        assert_eq!(p.coeffs(), &[i.clone(), z.clone(), i.clone()]);
        assert_eq!(p.j(), &z);

        let one = RealMatrix::from_element(1, 1, 1.0);
        let zero = RealMatrix::zeros(1, 1);
        let q = DHQuadratic::new(one.clone(), zero.clone(), zero.clone(), one.clone(), &tol).unwrap();
        let p = polynomial_from_quadratic(&q);
        assert_eq!(p.coeffs()[2], one);
        assert_eq!(p.coeffs()[0], one);
        assert_relative_eq!(p.evaluate(2.0)[(0, 0)], 5.0);
    }

    #[test]
    fn quadratic_evaluation_matches_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let rnd = |rng: &mut ChaCha8Rng| RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let f1 = rnd(&mut rng);
        let f2 = rnd(&mut rng);
        let f3 = rnd(&mut rng);
        let b = rnd(&mut rng);
        let q = DHQuadratic::new(
            f1.transpose() * &f1,
            &b - b.transpose(),
            f2.transpose() * &f2,
            f3.transpose() * &f3,
            &Tolerance::default(),
        )
        .unwrap();
        let p = polynomial_from_quadratic(&q);
        for _ in 0..5 {
            let lambda: f64 = rng.random_range(-3.0..3.0);
            let direct = q.m() * (lambda * lambda) - (q.g() - q.d()) * lambda + q.k();
            let via = p.evaluate(lambda);
            assert!((direct - &via).norm() <= 1e-12 * via.norm().max(1.0));
        }
    }

    #[test]
    fn polynomial_validation() {
        let tol = Tolerance::default();
        let z = RealMatrix::zeros(2, 2);
        assert!(StructuredPolynomial::new(1, 2, z.clone(), vec![z.clone(), z.clone()], &tol).is_err());
        assert!(StructuredPolynomial::new(2, 0, z.clone(), vec![z.clone(), z.clone()], &tol).is_err());
        let p = StructuredPolynomial::new(1, 0, z.clone(), vec![z.clone(), z.clone()], &tol).unwrap();
        assert_eq!(p.with_grade(3).unwrap().coeffs().len(), 4);
        assert!(p.with_grade(0).is_err());
    }

    #[test]
    fn pencil_polynomial_view_agrees() {
        let p = ex54();
        let poly = p.to_polynomial();
        for lambda in [-1.5, 0.0, 0.3, 2.0] {
            assert!((poly.evaluate(lambda) - p.evaluate(lambda)).norm() < 1e-15);
        }
    }

    #[test]
    fn general_system_validation() {
        let tol = Tolerance::default();
        let i = RealMatrix::identity(2, 2);
        let z = RealMatrix::zeros(2, 2);
        assert!(GeneralDHSystem::new(i.clone(), i.clone(), z.clone(), z.clone(), &tol).is_ok());
        // EᵀQ not symmetric
        let e = from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(GeneralDHSystem::new(e, i.clone(), z.clone(), z.clone(), &tol).is_err());
        // EᵀQ symmetric but indefinite
        let q = from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            GeneralDHSystem::new(i.clone(), q, z.clone(), z, &tol),
            Err(Error::NotPsd { .. })
        ));
    }
}
