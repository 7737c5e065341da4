use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use sepface::position::{
    certify_simplicial_face, check_general_position, check_gupb_complement, check_gupb_partition,
    product_states_independent, product_vectors_independent, FaceVerdict,
};
use sepface::pptes::{boundary_data, build_rho, gamma_span_dims, verify_pptes, PptesReport, PptesVerdict, ProductCount, SixTuple};
use sepface::registry::{load_example, NAMES};
use sepface::{
    enumerate_in_subspace, membership_residual, EnumerationResult, Error, PartyShape, ProductVector, SubspaceBasis, Tolerance, C64,
};

use crate::files::{complex, entries, product_entry, to_json, StateFile, SubspaceMode, VectorFile};
use crate::{CliError, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Gp,
    Gupb,
    Independence,
    StateIndependence,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn tol_line(tol: &Tolerance) -> String {
    format!(
        "tolerances: rank_rel={:e} psd_abs={:e} residual_abs={:e} dedupe_fid={:e}",
        tol.rank_rel, tol.psd_abs, tol.residual_abs, tol.dedupe_fid
    )
}

fn fmt_c(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn fmt_locals(z: &ProductVector) -> String {
    z.locals()
        .iter()
        .map(|l| format!("({})", l.iter().map(|&c| fmt_c(c)).collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join(" ⊗ ")
}

fn one_based(ix: &[usize]) -> Vec<usize> {
    ix.iter().map(|i| i + 1).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, format!("{text}\n")).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn nonempty(vs: Vec<ProductVector>) -> Result<Vec<ProductVector>, CliError> {
    if vs.is_empty() {
        return Err(input("product_vectors: the file has no product vectors"));
    }
    Ok(vs)
}

pub fn check(kind: CheckKind, path: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let file = VectorFile::read(path)?;
    let vs = nonempty(file.products()?)?;
    let mut human = tol_line(tol) + "\n";
    let (holds, report) = match kind {
        CheckKind::Gp => {
            let r = check_general_position(&vs, tol)?;
            let witness = r.witness.as_ref().map(|w| json!({"party": w.party + 1, "vectors": one_based(&w.indices)}));
            writeln!(human, "general position: {}", yes_no(r.is_gp)).unwrap();
            if let Some(w) = &r.witness {
                writeln!(
                    human,
                    "witness: the party {} locals of vectors {:?} do not span",
                    w.party + 1,
                    one_based(&w.indices)
                )
                .unwrap();
            }
            (r.is_gp, json!({"property": "general-position", "holds": r.is_gp, "witness": witness}))
        }
        CheckKind::Gupb => {
            let r = check_gupb_partition(&vs, tol)?;
            writeln!(human, "GUPB: {}", yes_no(r.is_gupb)).unwrap();
            let partition = r
                .bad_partition
                .as_ref()
                .map(|p| p.iter().map(|b| one_based(b)).collect::<Vec<_>>());
            if let Some(p) = &partition {
                writeln!(human, "partition with no spanning block (party 1, 2, ...): {p:?}").unwrap();
            }
            if let Some(w) = &r.witness_vector {
                writeln!(human, "orthogonal product vector: {}", fmt_locals(w)).unwrap();
            }
            let shape = vs[0].shape();
            let cross = if shape.is_qubits() && matches!(shape.parties(), 2 | 3) {
                let c = check_gupb_complement(&vs, tol)?;
                writeln!(
                    human,
                    "complement enumeration: {} ({})",
                    yes_no(c.is_gupb),
                    if c.is_gupb == r.is_gupb { "agrees" } else { "DISAGREES" }
                )
                .unwrap();
                json!({"holds": c.is_gupb, "agrees": c.is_gupb == r.is_gupb})
            } else {
                Value::Null
            };
            (
                r.is_gupb,
                json!({
                    "property": "gupb",
                    "holds": r.is_gupb,
                    "bad_partition": partition,
                    "witness": r.witness_vector.as_ref().map(product_entry),
                    "complement_method": cross,
                }),
            )
        }
        CheckKind::Independence => {
            let holds = product_vectors_independent(&vs, tol)?;
            writeln!(human, "product vectors linearly independent: {}", yes_no(holds)).unwrap();
            (holds, json!({"property": "independence", "holds": holds}))
        }
        CheckKind::StateIndependence => {
            let holds = product_states_independent(&vs, tol)?;
            writeln!(human, "pure product states linearly independent: {}", yes_no(holds)).unwrap();
            (holds, json!({"property": "state-independence", "holds": holds}))
        }
    };
    let mut report = report;
    report["vectors"] = json!(vs.len());
    report["tolerances"] = json!(tol);
    Ok(Outcome::new(holds, human, report))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vector_report(z: &ProductVector, basis: &SubspaceBasis) -> Result<Value, CliError> {
    Ok(json!({
        "locals": product_entry(z).locals,
        "flat": entries(z.flat()),
        "residual": membership_residual(z, basis)?,
    }))
}

fn kind_name(r: &EnumerationResult) -> &'static str {
    if r.is_finite() {
        "finite"
    } else {
        "infinite"
    }
}

pub fn enumerate(path: &Path, complement: bool, out: Option<&Path>, tol: &Tolerance) -> Result<Outcome, CliError> {
    let file = VectorFile::read(path)?;
    let shape = file.party_shape()?;
    let set = file.spanning_set()?;
    if set.is_empty() {
        return Err(input("the file has neither product_vectors nor vectors"));
    }
    let mode = if complement {
        SubspaceMode::Complement
    } else {
        file.subspace.as_ref().map_or(SubspaceMode::Span, |s| s.mode)
    };
    let span = SubspaceBasis::spanned_by(shape.total(), &set, tol)?;
    let basis = match mode {
        SubspaceMode::Span => span,
        SubspaceMode::Complement => span.complement(tol)?,
    };
    let found = enumerate_in_subspace(&basis, &shape, tol)?;
    let shown = if found.is_finite() { &found.vectors } else { &found.samples };

    let mut human = tol_line(tol) + "\n";
    writeln!(
        human,
        "subspace: {} of {} vectors, dimension {}",
        if mode == SubspaceMode::Span { "span" } else { "orthogonal complement" },
        set.len(),
        basis.dim()
    )
    .unwrap();
    match found.count() {
        Some(n) => writeln!(human, "product vectors: {n}").unwrap(),
        None => writeln!(human, "product vectors: infinite (showing {} verified samples)", shown.len()).unwrap(),
    }
    let mut reports = Vec::new();
    for (i, z) in shown.iter().enumerate() {
        let r = vector_report(z, &basis)?;
        writeln!(human, "{:>3}: {}", i + 1, fmt_locals(z)).unwrap();
        writeln!(
            human,
            "     flat [{}]  residual {:.2e}",
            z.flat().iter().map(|&c| fmt_c(c)).collect::<Vec<_>>().join(", "),
            r["residual"].as_f64().unwrap_or(f64::NAN)
        )
        .unwrap();
        reports.push(r);
    }
    let vector_file = VectorFile::from_products(&shape, shown);
    if let Some(out) = out {
        write_file(out, &to_json(&vector_file))?;
        writeln!(human, "wrote {}", out.display()).unwrap();
    }
    let json = json!({
        "tolerances": tol,
        "mode": mode,
        "subspace_dim": basis.dim(),
        "kind": kind_name(&found),
        "count": found.count(),
        "vectors": if found.is_finite() { reports.clone() } else { Vec::new() },
        "samples": if found.is_finite() { Vec::new() } else { reports },
        "charts_visited": found.charts_visited,
        "residual_max": found.residual_max,
        "file": vector_file,
    });
    Ok(Outcome::new(true, human, json))
}

pub fn face(path: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let vs = nonempty(VectorFile::read(path)?.products()?)?;
    let cert = certify_simplicial_face(&vs, tol)?;
    let verdict = match cert.verdict {
        FaceVerdict::SimplicialFace => "simplicial-face",
        FaceVerdict::NotSimplicialFace => "not-simplicial-face",
        FaceVerdict::InfiniteFamily => "infinite-family",
    };
    let mut human = tol_line(tol) + "\n";
    writeln!(human, "vectors: {}", cert.k).unwrap();
    writeln!(human, "pure states linearly independent: {}", yes_no(cert.states_independent)).unwrap();
    match cert.enumeration.count() {
        Some(n) => writeln!(human, "product vectors in the span: {n}").unwrap(),
        None => writeln!(human, "product vectors in the span: infinite").unwrap(),
    }
    writeln!(human, "verdict: {verdict}").unwrap();
    if cert.verdict == FaceVerdict::SimplicialFace {
        writeln!(human, "face: simplex Δ{} with {} vertices", cert.k - 1, cert.k).unwrap();
    }
    let json = json!({
        "tolerances": tol,
        "k": cert.k,
        "states_independent": cert.states_independent,
        "span_kind": kind_name(&cert.enumeration),
        "span_count": cert.enumeration.count(),
        "verdict": verdict,
    });
    Ok(Outcome::new(cert.verdict == FaceVerdict::SimplicialFace, human, json))
}

/// Positive weights, renormalized to sum 1. A warning is returned when the sum was
/// off by more than 1e-12.
pub fn normalize_weights(weights: &[f64]) -> Result<(Vec<f64>, Option<String>), CliError> {
    if weights.len() != 5 {
        return Err(input(format!("--weights: expected 5 values, got {}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(input(format!("--weights: {w} is not a positive number")));
    }
    let sum: f64 = weights.iter().sum();
    let warning = ((sum - 1.0).abs() > 1e-12).then(|| format!("weights sum to {sum}; renormalized to 1"));
    Ok((weights.iter().map(|w| w / sum).collect(), warning))
}

fn count_text(c: &ProductCount) -> String {
    match c {
        ProductCount::Finite(n) => n.to_string(),
        ProductCount::Infinite => "infinite".into(),
    }
}

fn verdict_name(v: PptesVerdict) -> &'static str {
    match v {
        PptesVerdict::PptesEdgeRank4 => "pptes-edge-rank4",
        PptesVerdict::Separable => "separable",
        PptesVerdict::Inconclusive => "inconclusive",
    }
}

fn describe_report(human: &mut String, r: &PptesReport) {
    let ranks: Vec<String> = r.ranks.iter().map(|k| k.to_string()).collect();
    let eigs: Vec<String> = r.min_eigs.iter().map(|e| format!("{e:.3e}")).collect();
    writeln!(human, "ranks of rho, rho^T(1), rho^T(2), rho^T(3): {}", ranks.join(" ")).unwrap();
    writeln!(human, "smallest eigenvalues: {}", eigs.join(" ")).unwrap();
    writeln!(human, "product vectors in the range: {}", count_text(&r.range_products)).unwrap();
    writeln!(human, "product vectors in the kernel: {}", count_text(&r.kernel_products)).unwrap();
    if let Some(d) = r.gamma_span_dims {
        writeln!(human, "partial conjugate span dims: {} {} {}", d[0], d[1], d[2]).unwrap();
    }
    for note in &r.notes {
        writeln!(human, "note: {note}").unwrap();
    }
    writeln!(human, "verdict: {}", verdict_name(r.verdict)).unwrap();
}

fn refusal(human: String, reason: &str, mut json: Value) -> Outcome {
    json["refused"] = json!(reason);
    Outcome::new(false, human + &format!("refused: {reason}\n"), json)
}

pub fn pptes_build(
    path: &Path,
    weights: Option<&[f64]>,
    distinguished: Option<usize>,
    out: Option<&Path>,
    tol: &Tolerance,
) -> Result<Outcome, CliError> {
    let vs = VectorFile::read(path)?.products()?;
    if vs.len() != 6 {
        return Err(input(format!("product_vectors: expected 6 vectors, got {}", vs.len())));
    }
    let d = distinguished.unwrap_or(6);
    if !(1..=6).contains(&d) {
        return Err(input(format!("--distinguished: {d} is not in 1..=6")));
    }
    let (p, warning) = normalize_weights(weights.unwrap_or(&[0.2; 5]))?;
    let six = SixTuple::with_distinguished(vs, d - 1, tol)?;

    let mut human = tol_line(tol) + "\n";
    writeln!(human, "distinguished vector: {d}").unwrap();
    writeln!(human, "weights: {}", p.iter().map(|w| format!("{w}")).collect::<Vec<_>>().join(", ")).unwrap();
    let mut json = json!({"tolerances": tol, "distinguished": d, "weights": p});

    let gamma = gamma_span_dims(&six, tol)?;
    writeln!(human, "partial conjugate span dims: {} {} {}", gamma[0], gamma[1], gamma[2]).unwrap();
    json["gamma_span_dims"] = json!(gamma);
    let mut outcome = if let Some(&bad) = gamma.iter().find(|&&g| g != 5) {
        let reason = format!("partial conjugates span {bad} dimensions; the construction needs 5 for every party");
        refusal(human, &reason, json)
    } else {
        match boundary_data(&six, &p, tol) {
            Err(Error::NoPptBoundary(s)) => {
                json["S"] = json!(s);
                refusal(human, &format!("S = {s} does not exceed 1, so the mixture has no PPT boundary"), json)
            }
            Err(e) => return Err(e.into()),
            Ok(data) => {
                let a: Vec<_> = data.a.iter().map(|&z| complex(z)).collect();
                let a_sq: Vec<f64> = data.a.iter().map(|z| z.norm_sqr()).collect();
                writeln!(human, "a: {}", data.a.iter().map(|&z| fmt_c(z)).collect::<Vec<_>>().join(", ")).unwrap();
                writeln!(human, "|a|^2: {}", a_sq.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(", ")).unwrap();
                writeln!(human, "S = {}", data.s).unwrap();
                writeln!(human, "lambda = {}", data.lambda).unwrap();
                json["a"] = json!(a);
                json["abs_a_sq"] = json!(a_sq);
                json["S"] = json!(data.s);
                json["lambda"] = json!(data.lambda);
                match build_rho(&six, &p, tol) {
                    Err(e @ Error::LambdaAudit { .. }) => refusal(human, &e.to_string(), json),
                    Err(e) => return Err(e.into()),
                    Ok(rho) => {
                        let report = verify_pptes(&rho, tol)?;
                        describe_report(&mut human, &report);
                        if let Some(out) = out {
                            write_file(out, &to_json(&StateFile::from_operator(&rho)))?;
                            writeln!(human, "wrote {}", out.display()).unwrap();
                            json["state_file"] = json!(out.display().to_string());
                        }
                        json["verification"] = json!(report);
                        json["verdict"] = json!(verdict_name(report.verdict));
                        Outcome::new(report.verdict == PptesVerdict::PptesEdgeRank4, human, json)
                    }
                }
            }
        }
    };
    outcome.warnings.extend(warning);
    Ok(outcome)
}

pub fn pptes_verify(path: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let rho = StateFile::read(path)?.operator(tol)?;
    let report = verify_pptes(&rho, tol)?;
    let mut human = tol_line(tol) + "\n";
    describe_report(&mut human, &report);
    let mut json = json!(report);
    json["tolerances"] = json!(tol);
    json["verdict"] = json!(verdict_name(report.verdict));
    Ok(Outcome::new(report.verdict == PptesVerdict::PptesEdgeRank4, human, json))
}

pub fn example_list() -> Outcome {
    let mut human = String::new();
    for name in NAMES {
        writeln!(human, "{name}").unwrap();
    }
    human.push_str("(zt-family takes parameters as zt-family:t1,t2,...)\n");
    Outcome::new(true, human, json!({"examples": NAMES}))
}

/// The named fixture as a vector file. With `auxiliary`, the file holds the fixture's
/// auxiliary flat vectors instead of its product vectors.
pub fn example_show(name: &str, auxiliary: bool, out: Option<&Path>) -> Result<Outcome, CliError> {
    let ex = load_example(name)?;
    let shape: &PartyShape = &ex.shape;
    let file = if auxiliary {
        VectorFile {
            shape: shape.dims().to_vec(),
            product_vectors: Vec::new(),
            vectors: ex.auxiliary().iter().map(entries).collect(),
            subspace: None,
        }
    } else {
        VectorFile::from_products(shape, &ex.products())
    };
    let text = to_json(&file);
    let human = match out {
        Some(out) => {
            write_file(out, &text)?;
            format!("wrote {}\n", out.display())
        }
        None => text + "\n",
    };
    Ok(Outcome::new(true, human, serde_json::to_value(&file).expect("plain data")))
}
