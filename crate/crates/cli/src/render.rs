//! Text, JSON and CSV renderings of the report model.

use std::fmt::Write as _;

use serde::Serialize;

use crate::args::{Format, JobSpec};
use crate::model::{pair_columns, ClassBody, ClassReport, CompareReport, Normalization, Pair, ScanReport, SelftestReport, SCHEMA};
use crate::CliError;

pub fn json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn csv_table(command: &str, norm: Option<Normalization>, header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(r).map_err(csv_error)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| csv_error(e.into_error().into()))?).expect("utf-8");
    let norm = norm.map(|n| format!(" normalization={};", n.label())).unwrap_or_default();
    Ok(format!(
        "# schema={SCHEMA}; command={command};{norm} values are exact p/q; *_approx columns are approximate decimals\n{body}"
    ))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Exact value columns in output order, each with its value for `body`.
fn class_cells(body: &ClassBody, norm: Normalization) -> Vec<(String, String)> {
    let d = body.decomposition.as_ref();
    let c = body.check.as_ref();
    let s = |x: Option<&String>| x.cloned().unwrap_or_default();
    let mut out = vec![
        ("mu".to_string(), s(d.map(|d| &d.mu).or(c.map(|c| &c.mu)))),
        ("kind".to_string(), if body.ample.holds { s(d.map(|d| &d.kind)) } else { "NotAmple".into() }),
    ];
    for k in 0..8 {
        out.push((format!("a{}", k + 1), s(d.map(|d| &d.a_sorted[k]))));
    }
    out.push(("a".into(), s(d.map(|d| &d.a))));
    out.push(("s_A".into(), s(d.map(|d| &d.s_a))));
    let empty = Pair::default();
    let alpha = body.alpha.as_ref();
    for (name, pair) in [
        ("alpha_c_closed", alpha.map_or(&empty, |a| &a.closed)),
        ("alpha_c_oracle", alpha.map_or(&empty, |a| &a.oracle)),
    ] {
        for (col, v) in pair_columns(name, pair, norm.alpha_slots()) {
            out.push((col, v.clone().unwrap_or_default()));
        }
    }
    for (col, v) in pair_columns("nu", c.map_or(&empty, |c| &c.nu), norm.nu_slots()) {
        out.push((col, v.clone().unwrap_or_default()));
    }
    out.push(("nef".into(), c.map(|c| yes(c.nef.holds).to_string()).unwrap_or_default()));
    out.push(("verdict".into(), body.outcome().to_string()));
    out
}

/// Approximate companions of the `alpha_c_*` and `nu*` columns.
fn approx_cells(body: &ClassBody, norm: Normalization) -> Vec<(String, String)> {
    let approx = body.approximate.clone().unwrap_or_default();
    class_cells(body, norm)
        .into_iter()
        .filter(|(name, _)| name.starts_with("alpha_c") || name.starts_with("nu"))
        .map(|(name, _)| {
            let key = format!("{name}_approx");
            let v = approx.get(&key).cloned().unwrap_or_default();
            (key, v)
        })
        .collect()
}

fn row_cells(grid: &[String], body: &ClassBody, job: &JobSpec) -> Vec<(String, String)> {
    let mut cells: Vec<(String, String)> =
        grid.iter().enumerate().map(|(k, g)| (format!("lambda{}", k + 1), g.clone())).collect();
    cells.extend(class_cells(body, job.normalization));
    if job.approx {
        cells.extend(approx_cells(body, job.normalization));
    }
    cells
}

fn class_csv(command: &str, rows: &[(Vec<String>, &ClassBody)], job: &JobSpec) -> Result<String, CliError> {
    let dims = rows.first().map_or(job.axes.len(), |r| r.0.len());
    let header: Vec<String> = match rows.first() {
        Some((g, b)) => row_cells(g, b, job).into_iter().map(|c| c.0).collect(),
        None => {
            let blank = ClassBody {
                input_class: String::new(),
                ample: crate::model::Positivity { holds: true, witness: None },
                check: None,
                decomposition: None,
                alpha: None,
                verdict: None,
                approximate: None,
                notes: Vec::new(),
            };
            row_cells(&vec![String::new(); dims], &blank, job).into_iter().map(|c| c.0).collect()
        }
    };
    let table: Vec<Vec<String>> =
        rows.iter().map(|(g, b)| row_cells(g, b, job).into_iter().map(|c| c.1).collect()).collect();
    csv_table(command, Some(job.normalization), &header, &table)
}

fn pair_text(p: &Pair) -> String {
    match (&p.a, &p.mu_a) {
        (Some(a), Some(m)) => format!("{m} (muA), {a} (A)"),
        (Some(a), None) => format!("{a} (A)"),
        (None, Some(m)) => format!("{m} (muA)"),
        (None, None) => "-".into(),
    }
}

/// Curve labels with several terms get parentheses in products.
fn factor(label: &str) -> String {
    if label.contains(['+', '-']) {
        format!("({label})")
    } else {
        label.to_string()
    }
}

fn body_text(out: &mut String, b: &ClassBody) {
    let _ = writeln!(out, "class: {}", b.input_class);
    match &b.ample.witness {
        None => out.push_str("ample: yes\n"),
        Some(w) => {
            let _ = writeln!(out, "ample: no, pairing {} with {} (curve #{})", w.pairing, w.curve, w.index);
        }
    }
    if let Some(c) = &b.check {
        let _ = writeln!(out, "A.A = {}", c.self_intersection);
        let _ = writeln!(out, "-K.A = {}", c.anticanonical_degree);
        let _ = writeln!(out, "mu = {}", c.mu);
        let _ = writeln!(out, "nu = {}", pair_text(&c.nu));
        let _ = writeln!(out, "test divisor -K - (2/3)nu(A)A = ({})", c.test_divisor.join(","));
        match &c.nef.witness {
            None => out.push_str("nef: yes\n"),
            Some(w) => {
                let _ = writeln!(out, "nef: no, pairing {} with {}", w.pairing, w.curve);
            }
        }
    }
    if let Some(d) = &b.decomposition {
        let _ = writeln!(out, "decomposition: mu = {}, kind = {}", d.mu, d.kind);
        if let Some(f) = &d.fiber {
            let _ = writeln!(out, "  fiber B = ({}), a = {}", f.join(","), d.a);
        }
        for c in &d.curves {
            match &c.partner {
                Some(p) => {
                    let _ = writeln!(out, "  {} * {}  (fiber partner {})", c.coefficient, factor(&c.curve), p);
                }
                None => {
                    let _ = writeln!(out, "  {} * {}", c.coefficient, factor(&c.curve));
                }
            }
        }
        let _ = writeln!(out, "  a_i = [{}], s_A = {}", d.a_sorted.join(", "), d.s_a);
        let _ = writeln!(out, "  face: {} curves; reconstruction {}", d.face.len(), if d.reconstruction_ok { "ok" } else { "FAILED" });
    }
    if let Some(a) = &b.alpha {
        let _ = writeln!(out, "alpha_c: branch {}", a.branch);
        let _ = writeln!(out, "  closed form = {}", pair_text(&a.closed));
        let _ = writeln!(out, "  oracle      = {}  (max multiplicity {} along {})", pair_text(&a.oracle), a.max_mult, a.argmax);
        if let Some(c) = &a.candidates {
            let _ = writeln!(out, "  middle candidates: two = {}, four = {}, three = {}", c[0], c[1], c[2]);
        }
        if let Some(p) = &a.p1xp1 {
            let _ = writeln!(
                out,
                "  P1xP1 readings: relabelings [{}], literal {}",
                p.relabelings.join(", "),
                p.literal
            );
        }
        let _ = writeln!(out, "  agree: {}", if a.agree { "yes" } else { "NO" });
    }
    if let Some(v) = &b.verdict {
        out.push_str("trace:\n");
        for s in &v.trace {
            let mark = match s.holds {
                Some(true) => "  [holds]",
                Some(false) => "  [fails]",
                None => "",
            };
            let _ = writeln!(out, "  {}: {}{}", s.check, s.value, mark);
        }
        let _ = writeln!(out, "verdict: {}", v.outcome);
    }
    if let Some(x) = &b.approximate {
        for (k, v) in x {
            let _ = writeln!(out, "~ {k} = {v} (approximate)");
        }
    }
    for n in &b.notes {
        let _ = writeln!(out, "note: {n}");
    }
}

pub fn render_class(r: &ClassReport, job: &JobSpec) -> Result<String, CliError> {
    Ok(match job.format {
        Format::Json => json(r),
        Format::Csv => class_csv(&r.command, &[(Vec::new(), &r.body)], job)?,
        Format::Text => {
            let mut out = format!("{} [normalization {}]\n", r.command, r.normalization);
            body_text(&mut out, &r.body);
            if !r.body.ample.holds {
                out.push_str("verdict: NotAmple\n");
            }
            out
        }
    })
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|k| rows.iter().map(|r| r[k].len()).chain([header[k].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

pub fn render_scan(r: &ScanReport, job: &JobSpec) -> Result<String, CliError> {
    let rows: Vec<(Vec<String>, &ClassBody)> = r.rows.iter().map(|x| (x.grid.clone(), &x.body)).collect();
    Ok(match job.format {
        Format::Json => json(r),
        Format::Csv => class_csv("scan", &rows, job)?,
        Format::Text => {
            let mut out = format!("scan of {} points from ({}) [normalization {}]\n", r.rows.len(), r.input_class, r.normalization);
            for (k, a) in r.axes.iter().enumerate() {
                let _ = writeln!(out, "lambda{}: ({}) over [{}, {}) in {} steps", k + 1, a.direction, a.from, a.to, a.steps);
            }
            let keep = |name: &str| {
                name.starts_with("lambda")
                    || name.starts_with("alpha_c_oracle")
                    || name.starts_with("nu")
                    || ["mu", "kind", "nef", "verdict"].contains(&name)
            };
            let cells: Vec<Vec<(String, String)>> =
                rows.iter().map(|(g, b)| row_cells(g, b, job).into_iter().filter(|c| keep(&c.0)).collect()).collect();
            if let Some(first) = cells.first() {
                let header: Vec<String> = first.iter().map(|c| c.0.clone()).collect();
                let table: Vec<Vec<String>> = cells.iter().map(|r| r.iter().map(|c| c.1.clone()).collect()).collect();
                out.push_str(&aligned(&header, &table));
            }
            for row in &r.rows {
                for n in &row.body.notes {
                    let _ = writeln!(out, "note [{}]: {n}", row.grid.join(","));
                }
            }
            out
        }
    })
}

fn agree_line(r: &CompareReport) -> String {
    format!("agree: {}% ({}/{})", r.agree_percent, r.agree_count, r.total)
}

pub fn render_compare(r: &CompareReport, job: &JobSpec) -> Result<String, CliError> {
    let norm = job.normalization;
    let mut header: Vec<String> = ["label", "input_class", "kind", "branch"].map(String::from).to_vec();
    let empty = Pair::default();
    for name in ["alpha_c_closed", "alpha_c_oracle"] {
        header.extend(pair_columns(name, &empty, norm.alpha_slots()).into_iter().map(|c| c.0));
    }
    header.push("agree".into());
    let table: Vec<Vec<String>> = r
        .cases
        .iter()
        .map(|c| {
            let mut row = vec![c.label.clone(), c.input_class.clone(), c.kind.clone(), c.branch.clone()];
            for (name, p) in [("alpha_c_closed", &c.closed), ("alpha_c_oracle", &c.oracle)] {
                row.extend(pair_columns(name, p, norm.alpha_slots()).into_iter().map(|c| c.1.clone().unwrap_or_default()));
            }
            row.push(yes(c.agree).into());
            row
        })
        .collect();
    Ok(match job.format {
        Format::Json => json(r),
        Format::Csv => csv_table("oracle-compare", Some(norm), &header, &table)?,
        Format::Text => {
            let mut out = format!(
                "oracle-compare over {} classes{} [normalization {}]\n",
                r.total,
                if r.extended_oracle { " with conic pivots" } else { "" },
                r.normalization
            );
            let brief: Vec<Vec<String>> = table
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, v)| v.clone()).collect())
                .collect();
            let brief_header: Vec<String> =
                header.iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, v)| v.clone()).collect();
            out.push_str(&aligned(&brief_header, &brief));
            out.push_str(&agree_line(r));
            out.push('\n');
            out
        }
    })
}

pub fn render_selftest(r: &SelftestReport, job: &JobSpec) -> Result<String, CliError> {
    Ok(match job.format {
        Format::Json => json(r),
        Format::Csv => unreachable!("rejected during validation"),
        Format::Text => {
            let mut out = String::new();
            for c in &r.checks {
                let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let passed = r.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(out, "selftest: {} ({passed}/{})", if r.pass { "pass" } else { "FAIL" }, r.checks.len());
            out
        }
    })
}
