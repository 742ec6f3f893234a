//! Instance generators: RLC networks, named fixtures and seeded random
//! structured instances.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, from_rows, hstack, lambda_min_unchecked, numerical_rank, sym_eig_unchecked,
    symmetrize, validated_symmetric, RankDecision, RealMatrix, Tolerance,
};
use crate::pencil::classify;
use crate::problem::{Problem, ProblemFile, ProblemKind};
use crate::structures::{
    DHPencil, DHQuadratic, GeneralDHSystem, StructuredPolynomial, StructuredTuple,
};

/// Incidence blocks (nodes x elements) and element matrices of an RLC network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RLCTopology {
    gc: RealMatrix,
    gl: RealMatrix,
    gr: RealMatrix,
    gv: RealMatrix,
    c: RealMatrix,
    l: RealMatrix,
    rr: RealMatrix,
}

fn validated_pd(name: &str, x: &RealMatrix, tol: &Tolerance) -> Result<RealMatrix> {
    let s = validated_symmetric(name, x, tol)?;
    let lmin = lambda_min_unchecked(&s);
    if s.nrows() > 0 && !(lmin > tol.rank_rel_for(s.nrows(), s.nrows()) * s.norm()) {
        return Err(Error::NotPsd {
            name: format!("{name} (must be positive definite)"),
            lambda_min: lmin,
        });
    }
    Ok(s)
}

impl RLCTopology {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gc: RealMatrix,
        gl: RealMatrix,
        gr: RealMatrix,
        gv: RealMatrix,
        c: RealMatrix,
        l: RealMatrix,
        rr: RealMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let nodes = gc.nrows();
        for (name, g) in [("Gc", &gc), ("Gl", &gl), ("Gr", &gr), ("Gv", &gv)] {
            if g.nrows() != nodes {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} rows, Gc has {nodes}",
                    g.nrows()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        for (name, g, x) in [("C", &gc, &c), ("L", &gl, &l), ("Rr", &gr, &rr)] {
            if x.nrows() != g.ncols() || x.ncols() != g.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    x.nrows(),
                    x.ncols(),
                    g.ncols(),
                    g.ncols()
                )));
            }
        }
        Ok(Self {
            c: validated_pd("C", &c, tol)?,
            l: validated_pd("L", &l, tol)?,
            rr: validated_pd("Rr", &rr, tol)?,
            gc,
            gl,
            gr,
            gv,
        })
    }

    pub fn nodes(&self) -> usize {
        self.gc.nrows()
    }

    pub fn gc(&self) -> &RealMatrix {
        &self.gc
    }

    pub fn gl(&self) -> &RealMatrix {
        &self.gl
    }

    pub fn gr(&self) -> &RealMatrix {
        &self.gr
    }

    pub fn gv(&self) -> &RealMatrix {
        &self.gv
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn l(&self) -> &RealMatrix {
        &self.l
    }

    pub fn rr(&self) -> &RealMatrix {
        &self.rr
    }

    /// `G₁ = [Gc Gr Gl Gv]`.
    pub fn g1(&self) -> RealMatrix {
        hstack(&[&self.gc, &self.gr, &self.gl, &self.gv])
    }

    fn capacitance(&self) -> RealMatrix {
        symmetrize(&(&self.gc * &self.c * self.gc.transpose()))
    }

    fn conductance(&self) -> Result<RealMatrix> {
        let inv = self
            .rr
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("Rr is not invertible".into()))?;
        Ok(symmetrize(&(&self.gr * symmetrize(&inv) * self.gr.transpose())))
    }
}

/// `E = diag(GcCGcᵀ, L, 0)`, `J = [[0, -Gl, -Gv], [Glᵀ, 0, 0], [Gvᵀ, 0, 0]]`,
/// `R = diag(GrRr⁻¹Grᵀ, 0, 0)` in the variables `(V, I_l, I_v)`.
pub fn rlc_assemble(t: &RLCTopology, tol: &Tolerance) -> Result<DHPencil> {
    let nn = t.nodes();
    let nl = t.gl.ncols();
    let nv = t.gv.ncols();
    let size = nn + nl + nv;
    let e = block_diag(&[&t.capacitance(), &t.l, &RealMatrix::zeros(nv, nv)]);
    let r = block_diag(&[
        &t.conductance()?,
        &RealMatrix::zeros(nl, nl),
        &RealMatrix::zeros(nv, nv),
    ]);
    let mut j = RealMatrix::zeros(size, size);
    j.view_mut((0, nn), (nn, nl)).copy_from(&(-&t.gl));
    j.view_mut((0, nn + nl), (nn, nv)).copy_from(&(-&t.gv));
    j.view_mut((nn, 0), (nl, nn)).copy_from(&t.gl.transpose());
    j.view_mut((nn + nl, 0), (nv, nn)).copy_from(&t.gv.transpose());
    DHPencil::new(e, j, r, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlcRegularity {
    pub regular: bool,
    pub gv_full_rank: bool,
    pub g1_full_row_rank: bool,
    /// Verdict of the kernel-based classification of the assembled pencil.
    pub classified_regular: bool,
    pub decisions: Vec<RankDecision>,
}

/// Regular iff `Gv` has full column rank and `G₁` has full row rank.
pub fn rlc_regularity(t: &RLCTopology, tol: &Tolerance) -> Result<RlcRegularity> {
    let gv = numerical_rank(&t.gv, tol).with_label("Gv");
    let g1 = numerical_rank(&t.g1(), tol).with_label("G1");
    let gv_full_rank = gv.rank == t.gv.ncols();
    let g1_full_row_rank = g1.rank == t.nodes();
    let cls = classify(&rlc_assemble(t, tol)?, tol)?;
    Ok(RlcRegularity {
        regular: gv_full_rank && g1_full_row_rank,
        gv_full_rank,
        g1_full_row_rank,
        classified_regular: !cls.is_singular,
        decisions: vec![gv, g1],
    })
}

/// The two diagonal blocks of `-J² + R² + E²` for an assembled network and
/// their smallest eigenvalues; the overall minimum is the smaller one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlcBlocks {
    pub node_block: RealMatrix,
    pub current_block: RealMatrix,
    pub node_lambda_min: f64,
    pub current_lambda_min: f64,
}

impl RlcBlocks {
    pub fn lambda_min(&self) -> f64 {
        self.node_lambda_min.min(self.current_lambda_min)
    }
}

pub fn rlc_blocks(t: &RLCTopology) -> Result<RlcBlocks> {
    let cap = t.capacitance();
    let cond = t.conductance()?;
    let node = symmetrize(
        &(&cap * &cap
            + &cond * &cond
            + &t.gl * t.gl.transpose()
            + &t.gv * t.gv.transpose()),
    );
    let glt = t.gl.transpose();
    let gvt = t.gv.transpose();
    let (nl, nv) = (t.gl.ncols(), t.gv.ncols());
    let mut cur = RealMatrix::zeros(nl + nv, nl + nv);
    cur.view_mut((0, 0), (nl, nl))
        .copy_from(&(&t.l * &t.l + &glt * &t.gl));
    cur.view_mut((0, nl), (nl, nv)).copy_from(&(&glt * &t.gv));
    cur.view_mut((nl, 0), (nv, nl)).copy_from(&(&gvt * &t.gl));
    cur.view_mut((nl, nl), (nv, nv)).copy_from(&(&gvt * &t.gv));
    let cur = symmetrize(&cur);
    Ok(RlcBlocks {
        node_lambda_min: lambda_min_unchecked(&node),
        current_lambda_min: lambda_min_unchecked(&cur),
        node_block: node,
        current_block: cur,
    })
}

/// Ladder with `sections` nodes: a source at node 1, resistors between
/// consecutive nodes, capacitors from nodes `2..` to ground and an inductor
/// at the last node.
pub fn rlc_ladder(sections: usize, tol: &Tolerance) -> Result<RLCTopology> {
    let n = sections.max(1);
    let unit = |i: usize| {
        let mut v = RealMatrix::zeros(n, 1);
        v[(i, 0)] = 1.0;
        v
    };
    let gv = unit(0);
    let gl = unit(n - 1);
    let gc = RealMatrix::from_fn(n, n - 1, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
    let gr = RealMatrix::from_fn(n, n - 1, |i, j| match i as isize - j as isize {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    });
    let diag = |k: usize, base: f64| {
        RealMatrix::from_fn(k, k, |i, j| if i == j { base + 0.1 * i as f64 } else { 0.0 })
    };
    RLCTopology::new(
        gc,
        gl,
        gr,
        gv,
        diag(n - 1, 1.0),
        diag(1, 0.5),
        diag(n - 1, 2.0),
        tol,
    )
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random topology with up to four nodes and up to two elements of each kind.
/// Elements connect two nodes or a node to ground, so rank defects in `G₁`
/// and `Gv` occur with noticeable probability.
pub fn random_topology(seed: u64, tol: &Tolerance) -> Result<RLCTopology> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.random_range(1..=4usize);
    let incidence = |rng: &mut ChaCha8Rng| {
        let count = rng.random_range(0..=2usize);
        let mut g = RealMatrix::zeros(nodes, count);
        for col in 0..count {
            let a = rng.random_range(0..nodes);
            g[(a, col)] = 1.0;
            if nodes > 1 && rng.random_bool(0.6) {
                let b = (a + rng.random_range(1..nodes)) % nodes;
                g[(b, col)] = -1.0;
            }
        }
        g
    };
    let gc = incidence(&mut rng);
    let gl = incidence(&mut rng);
    let gr = incidence(&mut rng);
    let gv = incidence(&mut rng);
    let mut pd = |k: usize| {
        let f = gaussian(&mut rng, k, k);
        symmetrize(&(f.transpose() * f + RealMatrix::identity(k, k) * 0.5))
    };
    let (c, l, rr) = (pd(gc.ncols()), pd(gl.ncols()), pd(gr.ncols()));
    RLCTopology::new(gc, gl, gr, gv, c, l, rr, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Tuple,
    Pencil,
    Polynomial,
    Quadratic,
    GeneralQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomOptions {
    /// Number of PSD matrices in a random tuple.
    pub tuple_len: usize,
    pub grade: usize,
    pub skew_index: usize,
    /// Number of trailing eigenvalues zeroed in every PSD part.
    pub rank_deficiency: usize,
    /// Project every coefficient onto the complement of one random vector.
    pub shared_kernel: bool,
}

impl Default for RandomOptions {
    fn default() -> Self {
        Self {
            tuple_len: 2,
            grade: 2,
            skew_index: 1,
            rank_deficiency: 0,
            shared_kernel: false,
        }
    }
}

struct Draw {
    rng: ChaCha8Rng,
    n: usize,
    deficiency: usize,
    projector: Option<RealMatrix>,
}

impl Draw {
    fn project(&self, x: RealMatrix) -> RealMatrix {
        match &self.projector {
            Some(p) => p * x * p,
            None => x,
        }
    }

    fn psd(&mut self) -> RealMatrix {
        let f = gaussian(&mut self.rng, self.n, self.n);
        let mut x = symmetrize(&(f.transpose() * f));
        if self.deficiency > 0 {
            let eig = sym_eig_unchecked(&x);
            let mut vals = eig.values.clone();
            for v in vals.iter_mut().take(self.deficiency.min(self.n)) {
                *v = 0.0;
            }
            x = symmetrize(&(&eig.vectors * DMatrix::from_diagonal(&vals) * eig.vectors.transpose()));
        }
        symmetrize(&self.project(x))
    }

    fn skew(&mut self) -> RealMatrix {
        let b = gaussian(&mut self.rng, self.n, self.n);
        let s = (&b - b.transpose()) * 0.5;
        let s = self.project(s);
        (&s - s.transpose()) * 0.5
    }
}

/// Seeded random structured instance of dimension `n`.
pub fn random_instance(
    n: usize,
    kind: RandomKind,
    seed: u64,
    opts: &RandomOptions,
) -> Result<Problem> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let projector = opts.shared_kernel.then(|| {
        let v = gaussian(&mut rng, n, 1);
        let v = &v / v.norm();
        RealMatrix::identity(n, n) - &v * v.transpose()
    });
    let mut d = Draw {
        rng,
        n,
        deficiency: opts.rank_deficiency,
        projector,
    };
    let tol = Tolerance::default();
    Ok(match kind {
        RandomKind::Tuple => {
            let j = d.skew();
            let xs = (0..opts.tuple_len.max(1)).map(|_| d.psd()).collect();
            Problem::Tuple(StructuredTuple::new(j, xs, &tol)?)
        }
        RandomKind::Pencil => {
            let e = d.psd();
            let j = d.skew();
            let r = d.psd();
            Problem::Pencil(DHPencil::new(e, j, r, &tol)?)
        }
        RandomKind::Polynomial => {
            let j = d.skew();
            let coeffs = (0..=opts.grade).map(|_| d.psd()).collect();
            Problem::Polynomial(StructuredPolynomial::new(
                opts.grade,
                opts.skew_index.min(opts.grade),
                j,
                coeffs,
                &tol,
            )?)
        }
        RandomKind::Quadratic => {
            let m = d.psd();
            let g = d.skew();
            let dd = d.psd();
            let k = d.psd();
            Problem::Quadratic(DHQuadratic::new(m, g, dd, k, &tol)?)
        }
        RandomKind::GeneralQ => {
            // E = Q⁻ᵀH makes EᵀQ = H PSD.
            let q = gaussian(&mut d.rng, n, n) + RealMatrix::identity(n, n) * (n as f64).sqrt();
            let h = d.psd();
            let q_inv_t = q
                .transpose()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("random Q is singular".into()))?;
            let e = q_inv_t * h;
            let j = d.skew();
            let r = d.psd();
            Problem::GeneralQ(GeneralDHSystem::new(e, q, j, r, &tol)?)
        }
    })
}

/// Known fixture names.
pub const FIXTURES: &[&str] = &[
    "numeric1",
    "ex51-eps",
    "ex42",
    "remark49-eps",
    "cubic",
    "grade2-const",
    "grade3-const",
    "rlc-ladder",
];

pub const DEFAULT_EPS: f64 = 1e-2;

fn scalar(x: f64) -> RealMatrix {
    RealMatrix::from_element(1, 1, x)
}

/// `α = ‖[[0,1],[1,1],[1,1]]‖²_F / ε + 1 = 5/ε + 1`.
pub fn ex51_alpha(eps: f64) -> f64 {
    let b = from_rows(&[&[0.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
    b.norm_squared() / eps + 1.0
}

/// 5x5 family `(E, J, R)` with `R > 0` by the choice of `α`.
pub fn ex51_matrices(eps: f64) -> (RealMatrix, RealMatrix, RealMatrix) {
    let a = ex51_alpha(eps);
    let e = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, 0.0, 0.0]));
    let j = from_rows(&[
        &[0.0, 0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 0.0, 1.0, 1.0],
        &[0.0, 0.0, 0.0, -1.0, -1.0],
        &[0.0, -1.0, 1.0, 0.0, eps],
        &[1.0, -1.0, 1.0, -eps, 0.0],
    ]);
    let r = from_rows(&[
        &[a, 0.0, 0.0, 0.0, 1.0],
        &[0.0, a, 0.0, 1.0, 1.0],
        &[0.0, 0.0, a, 1.0, 1.0],
        &[0.0, 1.0, 1.0, eps, 0.0],
        &[1.0, 1.0, 1.0, 0.0, eps],
    ]);
    (e, j, r)
}

/// The symmetric-but-indefinite perturbation `(ΔJ, ΔR)` of norm `2ε` that
/// makes the 5x5 family singular.
pub fn ex51_unstructured_perturbation(eps: f64) -> (RealMatrix, RealMatrix) {
    let mut dj = RealMatrix::zeros(5, 5);
    dj[(3, 4)] = -eps;
    dj[(4, 3)] = eps;
    let mut dr = RealMatrix::zeros(5, 5);
    dr[(3, 3)] = -eps;
    dr[(4, 4)] = -eps;
    (dj, dr)
}

pub fn numeric1_matrices() -> (RealMatrix, RealMatrix, RealMatrix) {
    (
        from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]),
        from_rows(&[&[0.0, -0.5], &[0.5, 0.0]]),
        from_rows(&[&[0.18, 0.42], &[0.42, 1.03]]),
    )
}

fn pencil_file(e: &RealMatrix, j: &RealMatrix, r: &RealMatrix) -> ProblemFile {
    ProblemFile::new(ProblemKind::Pencil)
        .with_matrix("E", e)
        .with_matrix("J", j)
        .with_matrix("R", r)
}

fn scalar_polynomial(coeffs: &[f64]) -> ProblemFile {
    let mut pf = ProblemFile::new(ProblemKind::Polynomial).with_matrix("J", &scalar(0.0));
    pf.grade = Some(coeffs.len() - 1);
    pf.skew_index = Some(0);
    for (i, &c) in coeffs.iter().enumerate() {
        pf = pf.with_matrix(&format!("A{i}"), &scalar(c));
    }
    pf
}

/// Named fixture; `eps` parametrizes the `-eps` families (default `1e-2`).
pub fn fixture(name: &str, eps: Option<f64>) -> Result<ProblemFile> {
    let eps = eps.unwrap_or(DEFAULT_EPS);
    if name.ends_with("-eps") && !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let mut pf = match name {
        "numeric1" => {
            let (e, j, r) = numeric1_matrices();
            pencil_file(&e, &j, &r)
        }
        "ex51-eps" => {
            let (e, j, r) = ex51_matrices(eps);
            pencil_file(&e, &j, &r)
        }
        "ex42" => {
            let z = RealMatrix::zeros(2, 2);
            pencil_file(&z, &z, &RealMatrix::identity(2, 2))
        }
        "remark49-eps" => {
            let mut pf = ProblemFile::new(ProblemKind::Polynomial)
                .with_matrix("J", &RealMatrix::zeros(2, 2))
                .with_matrix("A0", &from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]))
                .with_matrix("A1", &from_rows(&[&[eps, 0.0], &[0.0, 0.0]]));
            pf.grade = Some(1);
            pf.skew_index = Some(0);
            pf
        }
        "cubic" => scalar_polynomial(&[1.0, 0.0, 0.0, 1.0]),
        "grade2-const" => scalar_polynomial(&[1.0, 0.0, 0.0]),
        "grade3-const" => scalar_polynomial(&[1.0, 0.0, 0.0, 0.0]),
        "rlc-ladder" => Problem::Rlc(rlc_ladder(3, &Tolerance::default())?).to_file(),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    pf.description = Some(match name {
        n if n.ends_with("-eps") => format!("{n} with eps = {eps:e}"),
        n => n.to_string(),
    });
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ckdistance::OptimizerConfig;
    use crate::pencil::d_sing;
    use approx::assert_relative_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn single_capacitor_is_regular() {
        // λC is regular; a capacitor with no node connection is not.
        let t = RLCTopology::new(
            scalar(1.0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            scalar(2.0),
            RealMatrix::zeros(0, 0),
            RealMatrix::zeros(0, 0),
            &tol(),
        )
        .unwrap();
        let p = rlc_assemble(&t, &tol()).unwrap();
        assert_eq!(p.e(), &scalar(2.0));
        assert_eq!(p.j(), &scalar(0.0));
        let reg = rlc_regularity(&t, &tol()).unwrap();
        assert!(reg.regular && reg.classified_regular);

        let t = RLCTopology::new(
            scalar(0.0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            scalar(2.0),
            RealMatrix::zeros(0, 0),
            RealMatrix::zeros(0, 0),
            &tol(),
        )
        .unwrap();
        let reg = rlc_regularity(&t, &tol()).unwrap();
        assert!(!reg.regular && !reg.g1_full_row_rank && !reg.classified_regular);
    }

    #[test]
    fn ladder_is_regular() {
        for k in 1..5 {
            let t = rlc_ladder(k, &tol()).unwrap();
            let reg = rlc_regularity(&t, &tol()).unwrap();
            assert!(reg.regular && reg.classified_regular, "{k} sections");
        }
    }

    #[test]
    fn repeated_source_column_is_singular() {
        let t = rlc_ladder(3, &tol()).unwrap();
        let gv = hstack(&[t.gv(), t.gv()]);
        let t = RLCTopology::new(
            t.gc().clone(),
            t.gl().clone(),
            t.gr().clone(),
            gv,
            t.c().clone(),
            t.l().clone(),
            t.rr().clone(),
            &tol(),
        )
        .unwrap();
        let reg = rlc_regularity(&t, &tol()).unwrap();
        assert!(!reg.gv_full_rank && !reg.regular && !reg.classified_regular);
    }

    #[test]
    fn missing_node_row_is_singular() {
        // Node 3 of the ladder loses every connection.
        let t = rlc_ladder(3, &tol()).unwrap();
        let mut gc = t.gc().clone();
        let mut gr = t.gr().clone();
        let mut gl = t.gl().clone();
        gc.row_mut(2).fill(0.0);
        gr.row_mut(2).fill(0.0);
        gl.row_mut(2).fill(0.0);
        let t = RLCTopology::new(
            gc,
            gl,
            gr,
            t.gv().clone(),
            t.c().clone(),
            t.l().clone(),
            t.rr().clone(),
            &tol(),
        )
        .unwrap();
        let reg = rlc_regularity(&t, &tol()).unwrap();
        assert!(!reg.g1_full_row_rank && !reg.regular && !reg.classified_regular);
    }

    #[test]
    fn indefinite_element_rejected() {
        let err = RLCTopology::new(
            scalar(1.0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            RealMatrix::zeros(1, 0),
            scalar(-1.0),
            RealMatrix::zeros(0, 0),
            RealMatrix::zeros(0, 0),
            &tol(),
        );
        assert!(err.unwrap_err().is_validation());
    }

    #[test]
    fn two_block_formula_matches_assembly() {
        for seed in 0..20 {
            let t = random_topology(seed, &tol()).unwrap();
            let p = rlc_assemble(&t, &tol()).unwrap();
            let s = symmetrize(&(-(p.j() * p.j()) + p.r() * p.r() + p.e() * p.e()));
            let direct = lambda_min_unchecked(&s);
            let blocks = rlc_blocks(&t).unwrap();
            assert_relative_eq!(blocks.lambda_min(), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn ex51_alpha_value() {
        assert_relative_eq!(ex51_alpha(0.01), 501.0, epsilon = 1e-9);
        let (_, _, r) = ex51_matrices(0.01);
        assert!(lambda_min_unchecked(&r) > 0.0);
    }

    #[test]
    fn ex51_unstructured_perturbation_is_singular() {
        let eps = 1e-3;
        let (e, j, r) = ex51_matrices(eps);
        let (dj, dr) = ex51_unstructured_perturbation(eps);
        let a = &j + &dj - (&r + &dr);
        assert_relative_eq!((dj.norm_squared() + dr.norm_squared()).sqrt(), 2.0 * eps, epsilon = 1e-15);
        // Rows 4 and 5 of the perturbed A coincide and E vanishes there.
        assert_eq!(a.row(3), a.row(4));
        for lambda in [0.3, -1.7, 2.5] {
            assert!((&e * lambda - &a).determinant().abs() < 1e-9);
        }
        assert!(lambda_min_unchecked(&(&r + &dr)) < 0.0);
    }

    #[test]
    fn fixtures_validate_and_round_trip() {
        for name in FIXTURES {
            let pf = fixture(name, None).unwrap();
            pf.to_problem().unwrap();
            let back = ProblemFile::from_json(&pf.to_json().unwrap()).unwrap();
            assert_eq!(back, pf, "{name}");
        }
        assert!(matches!(fixture("nope", None), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn numeric1_is_verbatim() {
        let pf = fixture("numeric1", None).unwrap();
        assert_eq!(pf.matrices["R"], vec![vec![0.18, 0.42], vec![0.42, 1.03]]);
        assert_eq!(pf.matrices["J"], vec![vec![0.0, -0.5], vec![0.5, 0.0]]);
    }

    #[test]
    fn random_instances_are_deterministic() {
        let opts = RandomOptions::default();
        for kind in [
            RandomKind::Tuple,
            RandomKind::Pencil,
            RandomKind::Polynomial,
            RandomKind::Quadratic,
            RandomKind::GeneralQ,
        ] {
            let a = random_instance(3, kind, 7, &opts).unwrap();
            let b = random_instance(3, kind, 7, &opts).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, random_instance(3, kind, 8, &opts).unwrap());
        }
    }

    #[test]
    fn shared_kernel_gives_zero_distance() {
        let opts = RandomOptions {
            shared_kernel: true,
            ..Default::default()
        };
        let Problem::Pencil(p) = random_instance(4, RandomKind::Pencil, 3, &opts).unwrap() else {
            panic!("expected a pencil");
        };
        let d = d_sing(&p, &OptimizerConfig::default()).unwrap().distance;
        assert!(d < 1e-7, "{d}");
    }

    #[test]
    fn rank_deficiency_is_injected() {
        let opts = RandomOptions {
            rank_deficiency: 2,
            ..Default::default()
        };
        let Problem::Pencil(p) = random_instance(4, RandomKind::Pencil, 1, &opts).unwrap() else {
            panic!("expected a pencil");
        };
        assert_eq!(numerical_rank(p.e(), &tol()).rank, 2);
        assert_eq!(numerical_rank(p.r(), &tol()).rank, 2);
    }
}
