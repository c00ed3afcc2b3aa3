//! singular point -> classification -> normal form -> side conditions ->
//! time function -> grid certificates.

use std::collections::BTreeMap;

use hypcert_core::normal_form::{
    build_normal_form, check_side_conditions, NormalFormSpec, SignGrid,
};
use hypcert_core::spectral::{classify_jet, Classification};
use hypcert_core::symbolic::{
    parse_rational, quadratic_jet, rat_to_f64, singularity_check, PhasePoint, PolySymbol, Var,
};
use hypcert_core::time_function::{
    construct_time_function, time_function_condition, TimeFunctionCert,
};
use hypcert_core::verifier::{
    check_structural, estimate_c, estimate_kappa, verify_nonnegativity, BranchConstant,
    MarginCheck, NonnegReport, RatioEstimate, StructuralOptions, StructuralReport,
};
use sha2::{Digest, Sha256};

use crate::format::{NormalFormData, SymbolFile};
use crate::report::*;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The full symbol `p = -tau^2 + a`.
pub fn full_symbol(a: &PolySymbol) -> PolySymbol {
    a - PolySymbol::tau(a.dim()).pow(2)
}

pub fn build_spec(nf: &NormalFormData, dim: usize) -> hypcert_core::Result<NormalFormSpec> {
    match nf {
        NormalFormData::Form1 { p, q, r, phi, psi } => {
            NormalFormSpec::form1(dim, *p, q.clone(), r.clone(), phi.clone(), psi.clone())
        }
        NormalFormData::Form2 { p, q, r, g } => NormalFormSpec::form2(dim, *p, q.clone(), r.clone(), g.clone()),
    }
}

struct Builder {
    report: Report,
}

impl Builder {
    fn finish(mut self, status: Status, stage: &'static str, reason: Option<String>) -> Report {
        self.report.status = status;
        self.report.stage = stage;
        self.report.reason = reason;
        self.report
    }
}

fn classification_out(c: &Classification) -> ClassificationOut {
    ClassificationOut {
        effective: c.effective,
        witness: c.witness.map(|w| Complex { re: w.re, im: w.im }),
        spectrum_class: c.spectrum.class.as_str(),
        eigenvalues: c
            .spectrum
            .eigenvalues
            .iter()
            .map(|e| EigenOut {
                re: e.value.re,
                im: e.value.im,
                multiplicity: e.multiplicity,
                residual: e.residual,
            })
            .collect(),
        tol: c.spectrum.tol,
        marginal: c.marginal(),
        exact_real_pairs: c.spectrum.exact_real_pairs,
        charpoly: c.spectrum.charpoly.to_string(),
        quadratic_part: c.jet.to_poly().to_string(),
    }
}

fn ratio_out(dim: usize, r: &RatioEstimate) -> RatioOut {
    RatioOut {
        value: r.value,
        witness: named_point(dim, &r.witness),
        evaluated: r.evaluated,
        excluded: r.excluded,
        eta_den: r.eta_den,
        grid: (&r.grid).into(),
    }
}

fn margin_out(dim: usize, m: &MarginCheck) -> MarginOut {
    MarginOut {
        pass: m.pass,
        worst_margin: m.worst_margin,
        witness: named_point(dim, &m.witness),
        samples: m.samples,
        skipped: m.skipped,
    }
}

fn branch_out(dim: usize, b: &Option<BranchConstant>) -> Option<BranchOut> {
    b.as_ref().map(|b| BranchOut {
        value: b.value,
        witness: named_point(dim, &b.witness),
        evaluated: b.evaluated,
    })
}

fn structural_out(dim: usize, s: &StructuralReport, opts: &StructuralOptions) -> StructuralOut {
    StructuralOut {
        passed: s.passed(),
        lower_bound_chain: margin_out(dim, &s.kihon),
        t_zero_bound: margin_out(dim, &s.t_phi_lower),
        c1: branch_out(dim, &s.c1),
        c_prime: branch_out(dim, &s.c_prime),
        lipschitz_c: s.lipschitz_c,
        m1_min: s.m1_min,
        max_hessian_cond: s.max_hessian_cond,
        theta_samples: s.theta_samples,
        cutoff_delta: opts.cutoff_delta,
    }
}

fn nonneg_out(dim: usize, n: &NonnegReport) -> (NonnegOut, OneSidedOut) {
    (
        NonnegOut {
            pass: n.pass,
            min_value: n.min_value,
            witness: named_point(dim, &n.witness),
            scale: n.scale,
            grid: (&n.grid).into(),
        },
        OneSidedOut {
            negative_for_negative_t: n.negative_for_negative_t(),
            min_value: n.mirrored.min_value,
            witness: named_point(dim, &n.mirrored.witness),
            grid: (&n.mirrored.grid).into(),
        },
    )
}

fn time_function_out(cert: &TimeFunctionCert, cls: &Classification, base: &PhasePoint) -> TimeFunctionOut {
    let f = cert.time_function();
    let cond = time_function_condition(&cls.jet, &f, base).expect("dimensions agree");
    let s = |v: &[hypcert_core::symbolic::Rational]| v.iter().map(|x| x.to_string()).collect();
    TimeFunctionOut {
        phi: cert.phi.to_string(),
        branch: cert.branch.as_str(),
        slack: cert.slack.to_string(),
        kappa_target: cert.kappa_target.to_string(),
        kappa_target_f64: rat_to_f64(&cert.kappa_target),
        eps: s(&cert.eps),
        rho_weight: cert.rho_weight.as_ref().map(|r| r.to_string()),
        alpha: s(&cert.alpha),
        h_phi_sq_a: cert.h_phi_sq_a.to_string(),
        condition: ConditionOut {
            f: f.to_string(),
            value: cond.value.to_string(),
            is_time_function: cond.is_time_function,
        },
        notes: cert.notes.clone(),
    }
}

/// Runs the singular-point check and the classification. Returns the builder
/// and the classification when both succeed without a verdict.
#[allow(clippy::result_large_err)]
fn front(file: &SymbolFile, input: &[u8]) -> Result<(Builder, Classification), Report> {
    let mut b = Builder {
        report: Report {
            tool: Tool::default(),
            input_sha256: sha256_hex(input),
            status: Status::Failed,
            stage: "parse",
            reason: None,
            dim: file.dim,
            symbol: file.symbol.to_string(),
            region: file.region,
            options: file.options.clone(),
            singularity: None,
            classification: None,
            side_conditions: None,
            time_function: None,
            certificate: None,
            marginal_flags: vec![],
        },
    };
    let p = full_symbol(&file.symbol);
    let check = singularity_check(&p, &file.base_point).expect("dimensions validated on parse");
    let nonzero: BTreeMap<String, String> = check
        .gradient
        .iter()
        .enumerate()
        .filter(|(_, g)| !num_traits::Zero::is_zero(*g))
        .map(|(k, g)| (format!("dp/d{}", Var::from_index(k, file.dim)), g.to_string()))
        .collect();
    b.report.singularity = Some(SingularityOut {
        singular: check.is_singular(),
        value: check.value.to_string(),
        nonzero_derivatives: nonzero,
    });
    let jet = match quadratic_jet(&p, &file.base_point) {
        Ok(j) => j,
        Err(e) => return Err(b.finish(Status::Failed, "singularity", Some(e.to_string()))),
    };
    let cls = match classify_jet(jet, file.options.tol) {
        Ok(c) => c,
        Err(e) => return Err(b.finish(Status::Failed, "classification", Some(e.to_string()))),
    };
    b.report.classification = Some(classification_out(&cls));
    if cls.marginal() {
        let eig: Vec<String> = cls
            .spectrum
            .eigenvalues
            .iter()
            .map(|e| format!("{}{:+}i", e.value.re, e.value.im))
            .collect();
        let msg = format!(
            "marginal spectrum: an eigenvalue lies within 10 tol = {:e} of an axis; eigenvalues {}",
            10.0 * cls.spectrum.tol,
            eig.join(", ")
        );
        b.report.marginal_flags.push(msg.clone());
        return Err(b.finish(Status::Marginal, "classification", Some(msg)));
    }
    if !cls.effective {
        let reason = format!(
            "not effectively hyperbolic: Hamilton map spectrum is {}",
            cls.spectrum.class.as_str()
        );
        return Err(b.finish(Status::Failed, "classification", Some(reason)));
    }
    Ok((b, cls))
}

/// `classify`: singular-point check and spectral classification only.
pub fn run_classify(file: &SymbolFile, input: &[u8]) -> Report {
    match front(file, input) {
        Err(r) => r,
        Ok((b, _)) => b.finish(Status::Certified, "classification", None),
    }
}

/// `certify`: the full pipeline.
// NaN estimates must fail the comparisons below
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn run_pipeline(file: &SymbolFile, input: &[u8]) -> Report {
    let (mut b, cls) = match front(file, input) {
        Err(r) => return r,
        Ok(x) => x,
    };
    let d = file.dim;
    let Some(nf) = &file.normal_form else {
        let reason = "no normal_form block; time function and certificates need one".to_string();
        return b.finish(Status::NotApplicable, "classification", Some(reason));
    };
    if file.base_point != PhasePoint::base(d) {
        let reason = "normal forms are anchored at (0, 0, 0, e_d); move the base point there".to_string();
        return b.finish(Status::NotApplicable, "normal_form", Some(reason));
    }
    let spec = match build_spec(nf, d) {
        Ok(s) => s,
        Err(e) => return b.finish(Status::Failed, "normal_form", Some(e.to_string())),
    };
    let assembled = build_normal_form(&spec).expect("validated spec assembles");
    if assembled != file.symbol {
        let diff = &file.symbol - &assembled;
        let reason = format!("normal form does not reproduce the symbol: a - assembled = {diff}");
        return b.finish(Status::Failed, "normal_form", Some(reason));
    }

    let side = check_side_conditions(&spec, SignGrid::default());
    b.report.side_conditions = Some(SideConditionsOut {
        form: spec.variant().as_str(),
        p: spec.p(),
        passed: side.passed(),
        checks: side
            .checks
            .iter()
            .map(|c| SideCheckOut {
                name: c.name.clone(),
                holds: c.holds,
                value: c.value.clone(),
                note: c.note.clone(),
            })
            .collect(),
        sign_grid: SignGridOut {
            half_width: side.grid.half_width,
            points_per_axis: side.grid.points,
            points: side.grid_points,
            axes: side.grid_axes.iter().map(|v| v.to_string()).collect(),
        },
    });
    if !side.passed() {
        let failed: Vec<String> = side
            .failures()
            .map(|c| match &c.note {
                Some(n) => format!("{} ({n})", c.name),
                None => c.name.clone(),
            })
            .collect();
        return b.finish(
            Status::Failed,
            "side_conditions",
            Some(format!("side conditions fail: {}", failed.join("; "))),
        );
    }

    let slack = parse_rational(&file.options.slack).expect("slack validated on parse");
    let cert = match construct_time_function(&spec, &slack) {
        Ok(c) => c,
        Err(e) => return b.finish(Status::Failed, "time_function", Some(e.to_string())),
    };
    let base = PhasePoint::base(d);
    let tf = time_function_out(&cert, &cls, &base);
    let not_time_function = !tf.condition.is_time_function;
    b.report.time_function = Some(tf);
    if not_time_function {
        let reason = "t - phi fails the time-function condition at the base point".to_string();
        return b.finish(Status::Failed, "time_function", Some(reason));
    }

    let region = file.region.region();
    let stage_err = |b: Builder, e: hypcert_core::Error| b.finish(Status::Failed, "certificate", Some(e.to_string()));
    let nonneg = match verify_nonnegativity(&file.symbol, &region) {
        Ok(n) => n,
        Err(e) => return stage_err(b, e),
    };
    let c_est = match estimate_c(&file.symbol, &cert.phi, &region) {
        Ok(c) => c,
        Err(e) => return stage_err(b, e),
    };
    let kappa_est = match estimate_kappa(&file.symbol, &cert.phi, &region) {
        Ok(k) => k,
        Err(e) => return stage_err(b, e),
    };
    let sopts = StructuralOptions {
        points: file.options.structural_points,
        ..StructuralOptions::default()
    };
    let structural = match check_structural(&spec, &cert, &region, sopts) {
        Ok(s) => s,
        Err(e) => return stage_err(b, e),
    };
    let (nn, one_sided) = nonneg_out(d, &nonneg);
    let summary = Summary {
        c_est: c_est.value,
        kappa_est: kappa_est.value,
        kappa_target: rat_to_f64(&cert.kappa_target),
        nonneg_min: nonneg.min_value,
        negative_t_min: nonneg.mirrored.min_value,
    };
    b.report.certificate = Some(CertificateOut {
        label: "empirical",
        summary,
        c_est: ratio_out(d, &c_est),
        kappa_est: ratio_out(d, &kappa_est),
        nonneg: nn,
        one_sided,
        structural: structural_out(d, &structural, &sopts),
    });

    let mut failures = Vec::new();
    if !nonneg.pass {
        failures.push(format!("a is negative on t >= 0 (min {})", nonneg.min_value));
    }
    if !(c_est.value > 0.0) {
        failures.push(format!("c_est = {} is not positive", c_est.value));
    }
    if !(kappa_est.value < 1.0) {
        failures.push(format!("kappa_est = {} is not below 1", kappa_est.value));
    }
    if !structural.passed() {
        failures.push("structural inequality checks fail".to_string());
    }
    if failures.is_empty() {
        b.finish(Status::Certified, "certificate", None)
    } else {
        b.finish(Status::Failed, "certificate", Some(failures.join("; ")))
    }
}
