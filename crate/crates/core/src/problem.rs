//! JSON problem files and Matrix Market payloads.
//!
//! A problem file looks like
//!
//! ```json
//! { "kind": "pencil", "matrices": { "E": [[1, 0], [0, 0]], "J": …, "R": … } }
//! ```
//!
//! with `grade` and `skew_index` for polynomials, an optional `tolerances`
//! object and optional `matrices_mm` entries pointing at Matrix Market files
//! (resolved relative to the problem file).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::RLCTopology;
use crate::linalg::{RealMatrix, Tolerance};
use crate::structures::{
    DHPencil, DHQuadratic, GeneralDHSystem, StructuredPolynomial, StructuredTuple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Tuple,
    Pencil,
    Polynomial,
    Quadratic,
    GeneralQ,
    Rlc,
}

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew_index: Option<usize>,
    #[serde(default)]
    pub matrices: BTreeMap<String, Rows>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices_mm: BTreeMap<String, PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A validated problem of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Tuple(StructuredTuple),
    Pencil(DHPencil),
    Polynomial(StructuredPolynomial),
    Quadratic(DHQuadratic),
    GeneralQ(GeneralDHSystem),
    Rlc(RLCTopology),
}

pub fn to_rows(m: &RealMatrix) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows_checked(name: &str, rows: &Rows) -> Result<RealMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::InvalidProblem(format!(
            "matrix `{name}` has rows of unequal length"
        )));
    }
    Ok(RealMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

/// Parse a Matrix Market `matrix` in `array` or `coordinate` format with
/// `real` or `integer` field and `general`, `symmetric` or `skew-symmetric`
/// symmetry.
pub fn parse_matrix_market(text: &str) -> Result<RealMatrix> {
    let bad = |msg: &str| Error::InvalidProblem(format!("Matrix Market: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if h.len() < 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(bad("missing `%%MatrixMarket matrix` header"));
    }
    let coordinate = match h[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(bad(&format!("unsupported format `{other}`"))),
    };
    if h[3] != "real" && h[3] != "integer" {
        return Err(bad(&format!("unsupported field `{}`", h[3])));
    }
    let sym = match h[4].as_str() {
        "general" => 0.0,
        "symmetric" => 1.0,
        "skew-symmetric" => -1.0,
        other => return Err(bad(&format!("unsupported symmetry `{other}`"))),
    };
    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size: Vec<usize> = body
        .next()
        .ok_or_else(|| bad("missing size line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("bad size line")))
        .collect::<Result<_>>()?;
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("bad number `{t}`")));
    let (rows, cols) = match size.as_slice() {
        [r, c, ..] => (*r, *c),
        _ => return Err(bad("bad size line")),
    };
    let mut m = RealMatrix::zeros(rows, cols);
    let mut put = |i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        if sym != 0.0 && i != j {
            m[(j, i)] = sym * v;
        }
    };
    if coordinate {
        let nnz = *size.get(2).ok_or_else(|| bad("coordinate size line needs nnz"))?;
        for _ in 0..nnz {
            let line = body.next().ok_or_else(|| bad("too few entries"))?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() < 3 {
                return Err(bad("coordinate entry needs `i j value`"));
            }
            let i: usize = t[0].parse().map_err(|_| bad("bad row index"))?;
            let j: usize = t[1].parse().map_err(|_| bad("bad column index"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(bad("index out of range"));
            }
            put(i - 1, j - 1, num(t[2])?);
        }
    } else {
        // Column-major; symmetric variants store the lower triangle only.
        let values: Vec<f64> = body
            .flat_map(str::split_whitespace)
            .map(num)
            .collect::<Result<_>>()?;
        let mut it = values.into_iter();
        for j in 0..cols {
            let start = match sym {
                s if s == 0.0 => 0,
                s if s > 0.0 => j,
                _ => j + 1,
            };
            for i in start..rows {
                put(i, j, it.next().ok_or_else(|| bad("too few entries"))?);
            }
        }
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<RealMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

impl ProblemFile {
    pub fn new(kind: ProblemKind) -> Self {
        Self {
            kind,
            grade: None,
            skew_index: None,
            matrices: BTreeMap::new(),
            matrices_mm: BTreeMap::new(),
            tolerances: None,
            description: None,
        }
    }

    pub fn with_matrix(mut self, name: &str, m: &RealMatrix) -> Self {
        self.matrices.insert(name.to_string(), to_rows(m));
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Read a problem file and inline its Matrix Market references.
    pub fn load(path: &Path) -> Result<Self> {
        let mut pf = Self::from_json(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        pf.inline_mm(base)?;
        Ok(pf)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn inline_mm(&mut self, base: &Path) -> Result<()> {
        for (name, p) in std::mem::take(&mut self.matrices_mm) {
            let full = if p.is_absolute() { p } else { base.join(p) };
            let m = read_matrix_market(&full)?;
            self.matrices.insert(name, to_rows(&m));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerances.unwrap_or_default()
    }

    fn get(&self, name: &str) -> Result<Option<RealMatrix>> {
        if self.matrices_mm.contains_key(name) {
            return Err(Error::InvalidProblem(format!(
                "matrix `{name}` references a Matrix Market file that was not loaded"
            )));
        }
        self.matrices
            .get(name)
            .map(|rows| from_rows_checked(name, rows))
            .transpose()
    }

    fn req(&self, name: &str) -> Result<RealMatrix> {
        self.get(name)?.ok_or_else(|| {
            Error::InvalidProblem(format!("{:?} problem needs matrix `{name}`", self.kind))
        })
    }

    fn check_names(&self, allowed: impl Fn(&str) -> bool) -> Result<()> {
        for name in self.matrices.keys().chain(self.matrices_mm.keys()) {
            if !allowed(name) {
                return Err(Error::InvalidProblem(format!(
                    "unexpected matrix `{name}` for a {:?} problem",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    /// Indexed matrices `prefix0, prefix1, …` (consecutive from zero).
    fn indexed(&self, prefix: &str) -> Result<Vec<RealMatrix>> {
        let mut out = Vec::new();
        while let Some(m) = self.get(&format!("{prefix}{}", out.len()))? {
            out.push(m);
        }
        Ok(out)
    }

    fn is_indexed(name: &str, prefix: &str) -> bool {
        name.strip_prefix(prefix)
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    }

    /// Validate into a structured object.
    pub fn to_problem(&self) -> Result<Problem> {
        let tol = self.tolerance();
        tol.validate()?;
        match self.kind {
            ProblemKind::Tuple => {
                self.check_names(|n| n == "J" || Self::is_indexed(n, "X"))?;
                let xs = self.indexed("X")?;
                if xs.is_empty() {
                    return Err(Error::InvalidProblem("tuple needs X0".into()));
                }
                let n = xs[0].nrows();
                let j = self.get("J")?.unwrap_or_else(|| RealMatrix::zeros(n, n));
                Ok(Problem::Tuple(StructuredTuple::new(j, xs, &tol)?))
            }
            ProblemKind::Pencil => {
                self.check_names(|n| matches!(n, "E" | "J" | "R"))?;
                Ok(Problem::Pencil(DHPencil::new(
                    self.req("E")?,
                    self.req("J")?,
                    self.req("R")?,
                    &tol,
                )?))
            }
            ProblemKind::Polynomial => {
                self.check_names(|n| n == "J" || Self::is_indexed(n, "A"))?;
                let grade = self
                    .grade
                    .ok_or_else(|| Error::InvalidProblem("polynomial needs `grade`".into()))?;
                let skew = self.skew_index.ok_or_else(|| {
                    Error::InvalidProblem("polynomial needs `skew_index`".into())
                })?;
                let coeffs = self.indexed("A")?;
                Ok(Problem::Polynomial(StructuredPolynomial::new(
                    grade,
                    skew,
                    self.req("J")?,
                    coeffs,
                    &tol,
                )?))
            }
            ProblemKind::Quadratic => {
                self.check_names(|n| matches!(n, "M" | "G" | "D" | "K"))?;
                Ok(Problem::Quadratic(DHQuadratic::new(
                    self.req("M")?,
                    self.req("G")?,
                    self.req("D")?,
                    self.req("K")?,
                    &tol,
                )?))
            }
            ProblemKind::GeneralQ => {
                self.check_names(|n| matches!(n, "E" | "Q" | "J" | "R"))?;
                Ok(Problem::GeneralQ(GeneralDHSystem::new(
                    self.req("E")?,
                    self.req("Q")?,
                    self.req("J")?,
                    self.req("R")?,
                    &tol,
                )?))
            }
            ProblemKind::Rlc => {
                const NAMES: [&str; 7] = ["Gc", "Gl", "Gr", "Gv", "C", "L", "Rr"];
                self.check_names(|n| NAMES.contains(&n))?;
                let incidence = ["Gc", "Gl", "Gr", "Gv"]
                    .map(|n| self.get(n))
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                let nodes = incidence
                    .iter()
                    .flatten()
                    .map(RealMatrix::nrows)
                    .max()
                    .ok_or_else(|| Error::InvalidProblem("rlc needs an incidence block".into()))?;
                let [gc, gl, gr, gv]: [RealMatrix; 4] = incidence
                    .into_iter()
                    .map(|m| m.unwrap_or_else(|| RealMatrix::zeros(nodes, 0)))
                    .collect::<Vec<_>>()
                    .try_into()
                    .expect("four blocks");
                let elem = |name: &str| -> Result<RealMatrix> {
                    Ok(self.get(name)?.unwrap_or_else(|| RealMatrix::zeros(0, 0)))
                };
                Ok(Problem::Rlc(RLCTopology::new(
                    gc,
                    gl,
                    gr,
                    gv,
                    elem("C")?,
                    elem("L")?,
                    elem("Rr")?,
                    &tol,
                )?))
            }
        }
    }
}

impl Problem {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Tuple(_) => ProblemKind::Tuple,
            Problem::Pencil(_) => ProblemKind::Pencil,
            Problem::Polynomial(_) => ProblemKind::Polynomial,
            Problem::Quadratic(_) => ProblemKind::Quadratic,
            Problem::GeneralQ(_) => ProblemKind::GeneralQ,
            Problem::Rlc(_) => ProblemKind::Rlc,
        }
    }

    pub fn to_file(&self) -> ProblemFile {
        let mut pf = ProblemFile::new(self.kind());
        match self {
            Problem::Tuple(t) => {
                pf = pf.with_matrix("J", t.j());
                for (i, x) in t.xs().iter().enumerate() {
                    pf = pf.with_matrix(&format!("X{i}"), x);
                }
            }
            Problem::Pencil(p) => {
                pf = pf.with_matrix("E", p.e()).with_matrix("J", p.j()).with_matrix("R", p.r());
            }
            Problem::Polynomial(p) => {
                pf.grade = Some(p.grade());
                pf.skew_index = Some(p.skew_index());
                pf = pf.with_matrix("J", p.j());
                for (i, a) in p.coeffs().iter().enumerate() {
                    pf = pf.with_matrix(&format!("A{i}"), a);
                }
            }
            Problem::Quadratic(q) => {
                pf = pf
                    .with_matrix("M", q.m())
                    .with_matrix("G", q.g())
                    .with_matrix("D", q.d())
                    .with_matrix("K", q.k());
            }
            Problem::GeneralQ(s) => {
                pf = pf
                    .with_matrix("E", s.e())
                    .with_matrix("Q", s.q())
                    .with_matrix("J", s.j())
                    .with_matrix("R", s.r());
            }
            Problem::Rlc(t) => {
                pf = pf
                    .with_matrix("Gc", t.gc())
                    .with_matrix("Gl", t.gl())
                    .with_matrix("Gr", t.gr())
                    .with_matrix("Gv", t.gv())
                    .with_matrix("C", t.c())
                    .with_matrix("L", t.l())
                    .with_matrix("Rr", t.rr());
            }
        }
        pf
    }
}
