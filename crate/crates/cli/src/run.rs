//! Executes a [`JobSpec`]: one pipeline per command, rendered in the chosen format.

use dp1kstab_core::alpha::{compare_with, AlphaReport, OracleOptions};
use dp1kstab_core::cone::{compute_mu, decompose_with, is_ample, is_nef_with, ConicSubtype, Contraction, Decomposition};
use dp1kstab_core::exec::Exec;
use dp1kstab_core::kstab::{nef_test_divisor, slope_nu, verdict_with, VerdictOptions};
use dp1kstab_core::lattice::{named, DivClass};
use dp1kstab_core::rational::{fmt_q, q};
use dp1kstab_core::sample::{rng, sample};

use crate::args::{Command, JobSpec};
use crate::model::{
    approximations, AlphaJson, AxisJson, CheckJson, ClassBody, ClassReport, CompareCase, CompareReport,
    DecompositionJson, Pair, ScanReport, ScanRow, VerdictJson, SCHEMA,
};
use crate::render::{render_class, render_compare, render_scan, render_selftest};
use crate::selftest::selftest;
use crate::CliError;

/// Rendered report and the exit code it implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub report: String,
}

fn options(job: &JobSpec, exec: Exec) -> VerdictOptions {
    VerdictOptions {
        oracle: OracleOptions { extended: job.extended_oracle, exec },
        shift: job.faults.formula_shift.clone(),
    }
}

fn notes(d: &Decomposition, alpha: Option<&AlphaReport>) -> Vec<String> {
    let mut out = Vec::new();
    if let Contraction::ConicBundle { subtype, .. } = &d.kind {
        out.push(format!(
            "conic bundle: {} face curves in {} reducible fibers; one component per fiber enters the decomposition",
            d.face.len(),
            d.curves.len()
        ));
        if *subtype == ConicSubtype::P1xP1 {
            out.push(
                "P1xP1 contraction: the closed form deletes a_7 and applies the F1 formulas; \
                 other readings are listed under alpha.p1xp1"
                    .into(),
            );
        }
    }
    if let Some(r) = alpha.filter(|r| !r.agree) {
        out.push(format!(
            "closed form {} ({}) differs from oracle {} (argmax {})",
            fmt_q(r.closed_form()),
            r.closed.form.branch.label(),
            fmt_q(r.oracle_value()),
            r.oracle.argmax.label()
        ));
    }
    out
}

/// Run `command` on one class. `exec` parallelizes inside the pipeline.
pub fn evaluate(command: Command, a: &DivClass, job: &JobSpec, exec: Exec) -> Result<ClassBody, CliError> {
    let norm = job.normalization;
    let ample = is_ample(a);
    let mut body = ClassBody {
        input_class: a.to_csv_string(),
        ample: (&ample).into(),
        check: None,
        decomposition: None,
        alpha: None,
        verdict: None,
        approximate: None,
        notes: Vec::new(),
    };
    if !ample.holds {
        return Ok(body);
    }
    let opts = options(job, exec);
    match command {
        Command::Check => {
            let mu = compute_mu(a)?;
            let nu = slope_nu(a)?;
            let t = nef_test_divisor(a)?;
            let nef = is_nef_with(&t, exec);
            body.check = Some(CheckJson::new(norm, a, &mu, &nu, &t, &nef));
        }
        Command::Decompose => {
            let d = decompose_with(a, exec)?;
            body.decomposition = Some(DecompositionJson::new(&d, a));
            body.notes = notes(&d, None);
        }
        Command::Alpha => {
            let d = decompose_with(a, exec)?;
            let r = compare_with(&d, opts.oracle, &opts.shift)?;
            body.decomposition = Some(DecompositionJson::new(&d, a));
            body.alpha = Some(AlphaJson::new(norm, &d.mu, &r, job.extended_oracle));
            body.notes = notes(&d, Some(&r));
        }
        Command::Verdict | Command::Scan => {
            let v = verdict_with(a, &opts)?;
            let d = &v.decomposition;
            body.check = Some(CheckJson::new(norm, a, &d.mu, &v.nu, &v.test_divisor, &v.nef));
            body.decomposition = Some(DecompositionJson::new(d, a));
            body.alpha = Some(AlphaJson::new(norm, &d.mu, &v.alpha, job.extended_oracle));
            body.verdict = Some(VerdictJson::new(norm, &v));
            body.notes = notes(d, Some(&v.alpha));
        }
        Command::OracleCompare | Command::Selftest => unreachable!("not a single-class command"),
    }
    if job.approx {
        body.approximate = Some(approximations(&body, norm));
    }
    Ok(body)
}

/// Grid coordinates in row-major order, first axis outermost.
fn grid(job: &JobSpec) -> Vec<Vec<dp1kstab_core::rational::Q>> {
    let mut out = vec![Vec::new()];
    for axis in &job.axes {
        let pts = axis.points();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                pts.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn scan(job: &JobSpec, base: &DivClass) -> Result<Output, CliError> {
    let points = grid(job);
    // Points run concurrently; each pipeline stays sequential inside.
    let bodies = Exec::default().map(&points, |lambda| {
        let mut x = base.clone();
        for (l, axis) in lambda.iter().zip(&job.axes) {
            x = &x + &axis.direction.scale(l);
        }
        evaluate(Command::Scan, &x, job, Exec::Sequential)
    });
    let mut rows = Vec::with_capacity(points.len());
    for (lambda, body) in points.iter().zip(bodies) {
        rows.push(ScanRow { grid: lambda.iter().map(fmt_q).collect(), body: body? });
    }
    let code = rows.iter().map(|r| r.body.exit_code()).max().unwrap_or(0);
    let report = ScanReport {
        schema: SCHEMA.into(),
        command: "scan".into(),
        normalization: job.normalization.label().into(),
        input_class: base.to_csv_string(),
        axes: job
            .axes
            .iter()
            .map(|a| AxisJson {
                direction: a.direction.to_csv_string(),
                from: fmt_q(&a.from),
                to: fmt_q(&a.to),
                steps: a.steps,
            })
            .collect(),
        rows,
    };
    Ok(Output { code, report: render_scan(&report, job)? })
}

/// The built-in comparison suite: fixed examples, then seeded samples per stratum.
pub fn compare_suite(job: &JobSpec) -> Vec<(String, DivClass)> {
    if let Some(a) = &job.class {
        return vec![("input".into(), a.clone())];
    }
    let mut cases = Vec::new();
    if job.strata.len() == dp1kstab_core::sample::Stratum::ALL.len() {
        cases.push(("-K".into(), dp1kstab_core::lattice::anticanonical_class()));
        cases.push(("-K + 1/2*E1".into(), named::anticanonical_plus_e(1, 1, 2)));
        cases.push(("-K + 9/10*(E1+E2+E3)".into(), named::anticanonical_plus(&[q(9, 10), q(9, 10), q(9, 10)])));
        cases.push(("-K + 2/3*(E1+...+E8)".into(), named::anticanonical_plus(&vec![q(2, 3); 8])));
    }
    let mut r = rng(job.seed);
    for s in &job.strata {
        for k in 0..job.samples {
            cases.push((format!("{} #{}", s.label(), k + 1), sample(&mut r, *s, 6).class));
        }
    }
    cases
}

fn oracle_compare(job: &JobSpec) -> Result<Output, CliError> {
    let suite = compare_suite(job);
    let opts = options(job, Exec::Sequential);
    let results = Exec::default().map(&suite, |(label, a)| -> Result<CompareCase, CliError> {
        let ample = is_ample(a);
        if let Some(w) = ample.witness {
            return Err(CliError::NotAmple(format!("{label}: pairing {} with {}", fmt_q(&w.pairing), w.class().label())));
        }
        let d = decompose_with(a, Exec::Sequential)?;
        let r = compare_with(&d, opts.oracle, &opts.shift)?;
        Ok(CompareCase {
            label: label.clone(),
            input_class: a.to_csv_string(),
            kind: d.kind.label().into(),
            branch: r.closed.form.branch.label().into(),
            closed: Pair::alpha(job.normalization, &d.mu, r.closed_form()),
            oracle: Pair::alpha(job.normalization, &d.mu, r.oracle_value()),
            agree: r.agree,
        })
    });
    let cases = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let agree_count = cases.iter().filter(|c| c.agree).count();
    let total = cases.len();
    let report = CompareReport {
        schema: SCHEMA.into(),
        command: "oracle-compare".into(),
        normalization: job.normalization.label().into(),
        extended_oracle: job.extended_oracle,
        agree_percent: (100 * agree_count).checked_div(total).unwrap_or(100),
        cases,
        agree_count,
        total,
    };
    let code = if agree_count == total { 0 } else { 3 };
    Ok(Output { code, report: render_compare(&report, job)? })
}

/// Execute a job and render its report.
pub fn run(job: &JobSpec) -> Result<Output, CliError> {
    match job.command {
        Command::Check | Command::Decompose | Command::Alpha | Command::Verdict => {
            let a = job.class.as_ref().ok_or_else(|| CliError::Usage("missing --class".into()))?;
            let body = evaluate(job.command, a, job, Exec::default())?;
            let code = body.exit_code();
            let report = ClassReport {
                schema: SCHEMA.into(),
                command: job.command.label().into(),
                normalization: job.normalization.label().into(),
                body,
            };
            Ok(Output { code, report: render_class(&report, job)? })
        }
        Command::Scan => {
            let base = job.class.as_ref().ok_or_else(|| CliError::Usage("missing --class".into()))?;
            scan(job, base)
        }
        Command::OracleCompare => oracle_compare(job),
        Command::Selftest => {
            let report = selftest(&job.faults);
            let code = if report.pass { 0 } else { 3 };
            Ok(Output { code, report: render_selftest(&report, job)? })
        }
    }
}
