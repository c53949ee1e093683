//! Bundled invariant suite: curve counts, branch continuity, reconstruction
//! and a small closed-form versus oracle sample.

use dp1kstab_core::alpha::{branch_formulas_shifted, compare_with, OracleOptions};
use dp1kstab_core::cone::decompose;
use dp1kstab_core::exec::Exec;
use dp1kstab_core::lattice::{anticanonical_class, enumerate_conics, enumerate_curves, enumerate_roots, named, CurveKind};
use dp1kstab_core::rational::{fmt_q, q, qi, Q};
use dp1kstab_core::sample::{rng, sample, Stratum};
use num_traits::{One, Signed};

use crate::args::Faults;
use crate::model::{SelftestCheck, SelftestReport, SCHEMA};

const FAMILY_SIZES: [usize; 7] = [8, 28, 56, 56, 56, 28, 8];

fn check(name: &str, pass: bool, detail: String) -> SelftestCheck {
    SelftestCheck { name: name.into(), pass, detail }
}

fn curve_counts(faults: &Faults) -> SelftestCheck {
    let all = enumerate_curves();
    let curves = &all[..faults.truncate_curves.unwrap_or(all.len()).min(all.len())];
    let sizes: Vec<usize> = CurveKind::ALL.iter().map(|k| curves.iter().filter(|c| c.kind == *k).count()).collect();
    let roots = enumerate_roots().len();
    let conics = enumerate_conics().len();
    let pass = curves.len() == 240 && sizes == FAMILY_SIZES && roots == 240 && conics == 2160;
    let sizes: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    check(
        "curve_counts",
        pass,
        format!("{} curves ({}), {roots} roots, {conics} conics", curves.len(), sizes.join("/")),
    )
}

/// Closed forms on both sides of `s_A = 4` and `s_A = 1` stay within a
/// Lipschitz bound of the value at the threshold.
fn branch_continuity(faults: &Faults) -> SelftestCheck {
    let eps = q(1, 1_000_000_000);
    let mut worst = Q::from_integer(0.into());
    let mut cases = 0;
    for threshold in [qi(4), qi(1)] {
        let c = &threshold / qi(7);
        for a1 in [c.clone(), q(1, 2).max(c.clone()), q(9, 10)] {
            for a in [q(0, 1), q(1, 3)] {
                let at = |x: &Q| {
                    let mut v = vec![a1.clone()];
                    v.extend(std::iter::repeat_n(x.clone(), 7));
                    branch_formulas_shifted(&v, &a, &faults.formula_shift).value
                };
                let f0 = at(&c);
                for side in [&c - &eps, &c + &eps] {
                    worst = worst.max((at(&side) - &f0).abs());
                }
                cases += 1;
            }
        }
    }
    // Each formula has |d/ds_A| <= 3, and s_A moves by 7*eps.
    let bound = qi(21) * &eps;
    check(
        "branch_continuity",
        worst <= bound,
        format!("{cases} families, largest one-sided jump {} (bound {})", fmt_q(&worst), fmt_q(&bound)),
    )
}

fn reconstruction() -> SelftestCheck {
    let mut r = rng(7);
    let mut classes = vec![anticanonical_class(), named::anticanonical_plus_e(1, 1, 2)];
    classes.extend(Stratum::ALL.iter().map(|s| sample(&mut r, *s, 5).class));
    let mut failures = Vec::new();
    for (k, a) in classes.iter().enumerate() {
        let ok = match decompose(a) {
            Ok(d) => {
                d.reconstruct() == a.scale(&d.mu)
                    && d.a_sorted.iter().all(|x| !x.is_negative() && *x < Q::one())
                    && d.a_sorted.windows(2).all(|w| w[0] >= w[1])
                    && d.a.is_positive() == d.kind.is_conic()
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(k.to_string());
        }
    }
    check(
        "reconstruction",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} classes rebuild as -K + sum a_i E_i + a*B", classes.len())
        } else {
            format!("failed on cases {}", failures.join(", "))
        },
    )
}

fn oracle_equivalence(faults: &Faults) -> SelftestCheck {
    let mut r = rng(8);
    let mut classes = vec![
        anticanonical_class(),
        named::anticanonical_plus(&[q(9, 10), q(9, 10), q(9, 10)]),
        named::anticanonical_plus(&vec![q(2, 3); 8]),
    ];
    for s in [Stratum::BirHigh, Stratum::BirMid, Stratum::BirLow, Stratum::ConicF1] {
        classes.push(sample(&mut r, s, 3).class);
    }
    let opts = OracleOptions { extended: false, exec: Exec::Sequential };
    let results = Exec::default().map(&classes, |a| {
        let d = decompose(a).ok()?;
        compare_with(&d, opts, &faults.formula_shift).ok()
    });
    let agree = results.iter().filter(|x| x.as_ref().is_some_and(|r| r.agree)).count();
    let first_bad = results.iter().position(|x| !x.as_ref().is_some_and(|r| r.agree));
    let detail = match first_bad.and_then(|k| results[k].as_ref().map(|r| (k, r))) {
        Some((k, r)) => format!(
            "{agree}/{} agree; case {k}: closed {} vs oracle {}",
            classes.len(),
            fmt_q(r.closed_form()),
            fmt_q(r.oracle_value())
        ),
        None => format!("{agree}/{} agree", classes.len()),
    };
    check("oracle_equivalence", agree == classes.len(), detail)
}

pub fn selftest(faults: &Faults) -> SelftestReport {
    let checks = vec![curve_counts(faults), branch_continuity(faults), reconstruction(), oracle_equivalence(faults)];
    let pass = checks.iter().all(|c| c.pass);
    SelftestReport { schema: SCHEMA.into(), command: "selftest".into(), checks, pass }
}
