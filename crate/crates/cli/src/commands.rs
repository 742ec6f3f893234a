use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use dhdist::ckdistance::{common_kernel_check, minimize_sphere};
use dhdist::generators::{rlc_assemble, rlc_regularity};
use dhdist::linalg::numerical_rank;
use dhdist::pencil::{classify as classify_pencil, d_hi_inst, d_sing, perturbed_pencil};
use dhdist::polynomial::{
    companion as companion_pencil, d_hi_poly, d_sing_poly, is_singular_poly, perturbed_polynomial,
    polynomial_index, HighIndexCase,
};
use dhdist::problem::{to_rows, Problem, ProblemFile};
use dhdist::qreduction::{remove_q_invertible, remove_q_singular, trim_linearize, trimmed_bounds};
use dhdist::quadratic::{dh_linearize, inst_perturbed, quadratic_distances, spectral_check, InstBranch};
use dhdist::spectrum::{finite_eigenvalues, numeric_index};
use dhdist::structures::polynomial_from_quadratic;
use dhdist::{
    DHPencil, DHQuadratic, DistanceResult, Error, StructuredPolynomial, StructuredTuple, Tolerance,
};

use crate::{Ctx, DistKind, Outcome};

pub fn distance_json(d: &DistanceResult) -> Value {
    json!({
        "distance": d.distance,
        "lower_bound": d.lower_bound,
        "upper_bound": d.upper_bound,
        "lambda_min": d.lambda_min,
        "minimizer": d.minimizer.as_slice(),
        "objective_value": d.objective_value,
        "converged": d.converged,
        "iterations": d.iterations,
        "grad_norm": d.grad_norm,
        "starts_used": d.starts_used,
        "certificate_norm": d.certificate.total_norm,
        "skew_norm": d.certificate.skew_norm,
    })
}

struct Labels {
    skew: Option<String>,
    psd: Vec<String>,
}

impl Labels {
    fn new(skew: Option<&str>, psd: &[&str]) -> Self {
        Self {
            skew: skew.map(str::to_string),
            psd: psd.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn full_report(
    quantity: &str,
    t: &StructuredTuple,
    d: &DistanceResult,
    labels: &Labels,
    tol: &Tolerance,
) -> (Value, String) {
    let mut norms = BTreeMap::new();
    if let Some(s) = &labels.skew {
        norms.insert(s.clone(), d.certificate.delta_j.norm());
    }
    for (name, dx) in labels.psd.iter().zip(&d.certificate.delta_xs) {
        norms.insert(name.clone(), dx.norm());
    }
    let diagnostics = match common_kernel_check(t, tol) {
        Ok(ck) => json!({
            "has_common_kernel": ck.has_common_kernel,
            "stacked": ck.stacked,
            "squared": ck.squared,
            "linear": ck.linear,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let mut report = distance_json(d);
    report["quantity"] = json!(quantity);
    report["perturbation_norms"] = json!(norms);
    report["rank_diagnostics"] = diagnostics;
    let mut text = String::new();
    let _ = writeln!(text, "{quantity}: {:.10e}", d.distance);
    let _ = writeln!(
        text,
        "bounds: [{:.6e}, {:.6e}]  (lambda_min = {:.6e})",
        d.lower_bound, d.upper_bound, d.lambda_min
    );
    let _ = writeln!(
        text,
        "converged: {} after {} iterations, gradient norm {:.2e}",
        d.converged, d.iterations, d.grad_norm
    );
    let u: Vec<String> = d.minimizer.iter().map(|x| format!("{x:.6}")).collect();
    let _ = writeln!(text, "minimizer: [{}]", u.join(", "));
    let parts: Vec<String> = norms.iter().map(|(k, v)| format!("{k}: {v:.4e}")).collect();
    let _ = write!(text, "perturbation norms: {}", parts.join(", "));
    (report, text)
}

fn infinite(quantity: &str, reason: &str) -> (Value, String) {
    (
        json!({ "quantity": quantity, "distance": Value::Null, "infinite": true, "reason": reason }),
        format!("{quantity}: inf ({reason})"),
    )
}

fn pencil_distance(
    p: &DHPencil,
    kind: DistKind,
    ctx: &Ctx,
    tol: &Tolerance,
) -> Result<(Value, String, Option<Problem>), Error> {
    let (quantity, t, d, labels) = match kind {
        DistKind::Sing => (
            "d_sing",
            p.tuple_sing(),
            d_sing(p, &ctx.cfg)?,
            Labels::new(Some("J"), &["E", "R"]),
        ),
        DistKind::Hi | DistKind::Inst => (
            if kind == DistKind::Hi { "d_hi" } else { "d_inst" },
            p.tuple_hi(),
            d_hi_inst(p, &ctx.cfg)?,
            Labels::new(None, &["E", "R"]),
        ),
    };
    let (report, text) = full_report(quantity, &t, &d, &labels, tol);
    Ok((report, text, Some(Problem::Pencil(perturbed_pencil(p, &d.certificate)))))
}

fn polynomial_distance(
    p: &StructuredPolynomial,
    kind: DistKind,
    ctx: &Ctx,
    tol: &Tolerance,
) -> Result<(Value, String, Option<Problem>), Error> {
    match kind {
        DistKind::Sing => {
            let d = d_sing_poly(p, &ctx.cfg)?;
            let names: Vec<String> = (0..=p.grade()).map(|i| format!("A{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let (report, text) = full_report("d_sing", &p.tuple(), &d, &Labels::new(Some("J"), &refs), tol);
            let q = perturbed_polynomial(p, &d.certificate);
            Ok((report, text, Some(Problem::Polynomial(q))))
        }
        DistKind::Hi => {
            let hi = d_hi_poly(p, &ctx.cfg)?;
            let Some(d) = hi.result.as_ref() else {
                let (r, t) = infinite("d_hi", "no regular high-index polynomials in this class");
                return Ok((r, t, None));
            };
            let k = p.grade();
            let hi_names = [format!("A{k}"), format!("A{}", k - 1)];
            let skew = (hi.case == HighIndexCase::SkewAtGrade).then_some("J");
            let t = dhdist::polynomial::hi_tuple(p)?.1.expect("finite case has a tuple");
            let (mut report, text) = full_report(
                "d_hi",
                &t,
                d,
                &Labels::new(skew, &[&hi_names[0], &hi_names[1]]),
                tol,
            );
            report["case"] = json!(hi.case);
            let mut coeffs = p.coeffs().to_vec();
            coeffs[k] += &d.certificate.delta_xs[0];
            coeffs[k - 1] += &d.certificate.delta_xs[1];
            let j = if skew.is_some() { p.j() + &d.certificate.delta_j } else { p.j().clone() };
            let q = StructuredPolynomial::new(k, p.skew_index(), j, coeffs, tol)?;
            Ok((report, text, Some(Problem::Polynomial(q))))
        }
        DistKind::Inst => Err(Error::InvalidParameter(
            "the distance to instability is available for pencils and quadratics".into(),
        )),
    }
}

fn quadratic_distance(
    q: &DHQuadratic,
    kind: DistKind,
    ctx: &Ctx,
    tol: &Tolerance,
) -> Result<(Value, String, Option<Problem>), Error> {
    let b = quadratic_distances(q, &ctx.cfg)?;
    let n = q.dim();
    let z = dhdist::RealMatrix::zeros(n, n);
    let (quantity, t, d, labels, perturbed) = match kind {
        DistKind::Sing => {
            let c = &b.d_sing.certificate;
            let pq = DHQuadratic::new(
                q.m() + &c.delta_xs[0],
                q.g() + &c.delta_j,
                q.d() + &c.delta_xs[1],
                q.k() + &c.delta_xs[2],
                tol,
            )?;
            (
                "d_sing",
                StructuredTuple::new(q.g().clone(), vec![q.m().clone(), q.d().clone(), q.k().clone()], tol)?,
                &b.d_sing,
                Labels::new(Some("G"), &["M", "D", "K"]),
                pq,
            )
        }
        DistKind::Hi => {
            let c = &b.d_hi.certificate;
            let pq = DHQuadratic::new(
                q.m() + &c.delta_xs[0],
                q.g().clone(),
                q.d() + &c.delta_xs[1],
                q.k().clone(),
                tol,
            )?;
            (
                "d_hi",
                StructuredTuple::new(z, vec![q.m().clone(), q.d().clone()], tol)?,
                &b.d_hi,
                Labels::new(None, &["M", "D"]),
                pq,
            )
        }
        DistKind::Inst => {
            let (t, labels) = match b.inst_branch {
                InstBranch::MassDamping => (
                    StructuredTuple::new(z, vec![q.m().clone(), q.d().clone()], tol)?,
                    Labels::new(None, &["M", "D"]),
                ),
                InstBranch::DampingStiffness => (
                    StructuredTuple::new(z, vec![q.d().clone(), q.k().clone()], tol)?,
                    Labels::new(None, &["D", "K"]),
                ),
            };
            ("d_inst", t, b.d_inst_result(), labels, inst_perturbed(q, &b))
        }
    };
    let (mut report, mut text) = full_report(quantity, &t, d, &labels, tol);
    if kind == DistKind::Inst {
        report["branch"] = json!(b.inst_branch);
        report["alpha"] = json!(b.inst_alpha);
        report["alpha_bounds"] = json!([b.inst_lower, b.inst_upper]);
        let _ = write!(
            text,
            "\nbranch: {:?}, alpha = {:.6e}, [sqrt(alpha), sqrt(2 alpha)] = [{:.6e}, {:.6e}]",
            b.inst_branch, b.inst_alpha, b.inst_lower, b.inst_upper
        );
    }
    Ok((report, text, Some(Problem::Quadratic(perturbed))))
}

pub fn distance(
    ctx: &Ctx,
    p: &Problem,
    kind: DistKind,
    tol: &Tolerance,
) -> Result<(Value, String, Option<Problem>), Error> {
    let (mut report, text, perturbed) = match p {
        Problem::Tuple(t) => {
            if kind != DistKind::Sing {
                return Err(Error::InvalidParameter(
                    "tuples only have the common-kernel distance (--kind sing)".into(),
                ));
            }
            let d = minimize_sphere(t, &ctx.cfg)?;
            let names: Vec<String> = (0..t.xs().len()).map(|i| format!("X{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let (r, text) = full_report("d_ck", t, &d, &Labels::new(Some("J"), &refs), tol);
            (r, text, Some(Problem::Tuple(d.certificate.apply(t))))
        }
        Problem::Pencil(pp) => pencil_distance(pp, kind, ctx, tol)?,
        Problem::Rlc(t) => pencil_distance(&rlc_assemble(t, tol)?, kind, ctx, tol)?,
        Problem::Polynomial(pp) => polynomial_distance(pp, kind, ctx, tol)?,
        Problem::Quadratic(q) => quadratic_distance(q, kind, ctx, tol)?,
        Problem::GeneralQ(_) => {
            return Err(Error::InvalidParameter(
                "structured distances for systems with a general Q are not characterized; \
                 run reduce-q first"
                    .into(),
            ))
        }
    };
    report["problem_kind"] = json!(p.kind());
    Ok((report, text, perturbed))
}

fn eigen_json(ev: &[num_complex::Complex64]) -> Value {
    json!(ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn eigen_text(ev: &[num_complex::Complex64]) -> String {
    let parts: Vec<String> = ev
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                format!("{:.6}", z.re)
            } else {
                format!("{:.6}{:+.6}i", z.re, z.im)
            }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn pencil_classification(p: &DHPencil, tol: &Tolerance) -> Result<(Value, String), Error> {
    let c = classify_pencil(p, tol)?;
    let mut text = format!(
        "singular: {}\nindex class: {:?}\nindex: {}\nin closure of index-two pencils: {}",
        c.is_singular,
        c.index_class,
        c.index.map_or("-".into(), |i| i.to_string()),
        c.in_index_two_closure
    );
    let mut report = json!({ "classification": c });
    if !c.is_singular {
        let ev = finite_eigenvalues(p.e(), &p.a(), tol)?;
        let _ = write!(text, "\nfinite eigenvalues: {}", eigen_text(&ev));
        report["finite_eigenvalues"] = eigen_json(&ev);
    }
    Ok((report, text))
}

pub fn classify(p: &Problem, tol: &Tolerance) -> Result<Outcome, Error> {
    let (mut report, text) = match p {
        Problem::Tuple(t) => {
            let ck = common_kernel_check(t, tol)?;
            let text = format!(
                "common kernel: {} (dimension {})",
                ck.has_common_kernel,
                ck.kernel.ncols()
            );
            (json!({ "common_kernel": ck }), text)
        }
        Problem::Pencil(pp) => pencil_classification(pp, tol)?,
        Problem::Rlc(t) => {
            let reg = rlc_regularity(t, tol)?;
            let (mut report, text) = pencil_classification(&rlc_assemble(t, tol)?, tol)?;
            let text = format!(
                "topology regular: {} (Gv full column rank: {}, G1 full row rank: {})\n{text}",
                reg.regular, reg.gv_full_rank, reg.g1_full_row_rank
            );
            report["rlc"] = json!(reg);
            (report, text)
        }
        Problem::Polynomial(pp) => {
            let s = is_singular_poly(pp, tol)?;
            let idx = polynomial_index(pp, tol)?;
            let mut text = format!(
                "singular: {}\nindex: {}\ninfinite eigenvalue multiplicity: {}",
                s.singular,
                idx.index.map_or("-".into(), |i| i.to_string()),
                idx.infinite_multiplicity
            );
            let mut report = json!({ "singularity": s, "index": idx });
            if !s.singular {
                let cp = companion_pencil(pp);
                let ev = finite_eigenvalues(&cp.e_block, &cp.a_block, tol)?;
                let rhp = ev.iter().filter(|z| z.re > 0.0).count();
                let _ = write!(
                    text,
                    "\nfinite eigenvalues: {}\nright half plane: {rhp}",
                    eigen_text(&ev)
                );
                report["finite_eigenvalues"] = eigen_json(&ev);
                report["right_half_plane"] = json!(rhp);
            }
            (report, text)
        }
        Problem::Quadratic(q) => {
            let s = is_singular_poly(&polynomial_from_quadratic(q), tol)?;
            let mut text = format!("singular: {}", s.singular);
            let mut report = json!({ "singularity": s });
            if !s.singular {
                let sp = spectral_check(q, tol)?;
                let _ = write!(
                    text,
                    "\nfinite eigenvalues: {}\nmax real part: {:.3e}\nimaginary-axis eigenvalues semisimple: {}\n\
                     index at infinity: {}\nindex at zero: {}",
                    eigen_text(&sp.eigenvalues),
                    sp.max_real_part,
                    sp.imaginary_semisimple,
                    sp.index_infinity.index.map_or("-".into(), |i| i.to_string()),
                    sp.index_zero.index.map_or("-".into(), |i| i.to_string()),
                );
                report["spectrum"] = json!(sp);
            }
            (report, text)
        }
        Problem::GeneralQ(s) => {
            let (e, a) = s.pencil_pair();
            let idx = numeric_index(&e, &a, tol)?;
            let mut text = format!(
                "regular: {}\nindex: {}",
                idx.is_regular,
                idx.index.map_or("-".into(), |i| i.to_string())
            );
            let mut report = json!({ "index": idx });
            if idx.is_regular {
                let ev = finite_eigenvalues(&e, &a, tol)?;
                let _ = write!(text, "\nfinite eigenvalues: {}", eigen_text(&ev));
                report["finite_eigenvalues"] = eigen_json(&ev);
            }
            (report, text)
        }
    };
    report["problem_kind"] = json!(p.kind());
    Ok(Outcome { report, text })
}

pub fn reduce_q(p: &Problem, tol: &Tolerance, out: Option<&Path>) -> Result<Outcome, Error> {
    let rep = match p {
        Problem::GeneralQ(s) => {
            if numerical_rank(s.q(), tol).rank == s.dim() {
                remove_q_invertible(s, tol)?
            } else {
                remove_q_singular(s, tol)?
            }
        }
        Problem::Quadratic(q) => remove_q_singular(&dh_linearize(q), tol)?,
        _ => {
            return Err(Error::InvalidProblem(
                "reduce-q needs a general_q or quadratic problem".into(),
            ))
        }
    };
    let pf = Problem::Pencil(rep.reduced.clone()).to_file();
    if let Some(path) = out {
        pf.save(path)?;
    }
    let mut text = format!(
        "reduced dimension: {} (eliminated {})\nE22 condition number: {:.3e}{}",
        rep.reduced.dim(),
        rep.eliminated_dim,
        rep.conditioning,
        if rep.ill_conditioned { " (ill-conditioned)" } else { "" }
    );
    let idx = |r: &Option<dhdist::spectrum::IndexReport>| {
        r.as_ref()
            .and_then(|r| r.index)
            .map_or("-".to_string(), |i| i.to_string())
    };
    let _ = write!(
        text,
        "\nindex before: {}, after: {}",
        idx(&rep.original_index),
        idx(&rep.reduced_index)
    );
    if let Some(path) = out {
        let _ = write!(text, "\nreduced pencil written to {}", path.display());
    } else {
        let _ = write!(text, "\n{}", pf.to_json()?);
    }
    Ok(Outcome {
        report: json!({ "reduction": rep, "reduced_problem": pf }),
        text,
    })
}

pub fn companion(p: &Problem) -> Result<Outcome, Error> {
    let poly = match p {
        Problem::Polynomial(pp) => pp.clone(),
        Problem::Quadratic(q) => polynomial_from_quadratic(q),
        Problem::Pencil(pp) => pp.to_polynomial(),
        _ => {
            return Err(Error::InvalidProblem(
                "companion linearization needs a polynomial, quadratic or pencil".into(),
            ))
        }
    };
    let cp = companion_pencil(&poly);
    let report = json!({
        "form": "companion",
        "grade": cp.source_grade,
        "n": cp.n,
        "E": to_rows(&cp.e_block),
        "A": to_rows(&cp.a_block),
    });
    let text = serde_json::to_string_pretty(&report)?;
    Ok(Outcome { report, text })
}

pub fn dh(p: &Problem) -> Result<ProblemFile, Error> {
    match p {
        Problem::Quadratic(q) => Ok(Problem::GeneralQ(dh_linearize(q)).to_file()),
        _ => Err(Error::InvalidProblem("dh linearization needs a quadratic".into())),
    }
}

pub fn trimmed(p: &Problem, tol: &Tolerance) -> Result<(ProblemFile, Value), Error> {
    match p {
        Problem::Quadratic(q) => Ok((
            Problem::Pencil(trim_linearize(q, tol)).to_file(),
            json!(trimmed_bounds(q, tol)),
        )),
        _ => Err(Error::InvalidProblem("trimmed linearization needs a quadratic".into())),
    }
}
