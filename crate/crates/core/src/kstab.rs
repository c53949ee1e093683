//! K-stability verdict from the nef test divisor
//!
//! ```text
//!     -K - (2/3) nu(A) A,    nu(A) = (-K.A)/(A.A)
//! ```
//!
//! Nefness gives KStable. Failure proves nothing and gives Inconclusive.

use num_traits::Zero;
use serde::Serialize;

use crate::alpha::{alpha_c_for_a, compare_with, AlphaReport, FormulaShift, OracleOptions};
use crate::cone::{decompose_with, is_nef_with, require_ample, Decomposition, PairingCheck};
use crate::error::Result;
use crate::exec::Exec;
use crate::lattice::{anticanonical_class, DivClass};
use crate::rational::{fmt_q, q, qi, Q};

/// `(-K.A)/(A.A)`.
pub fn slope_nu(a: &DivClass) -> Result<Q> {
    require_ample(a)?;
    Ok(anticanonical_class().dot(a) / a.dot(a))
}

/// `-K - (2/3) nu(A) A`; unchanged under `A -> tA`.
pub fn nef_test_divisor(a: &DivClass) -> Result<DivClass> {
    let nu = slope_nu(a)?;
    Ok(&anticanonical_class() - &a.scale(&(q(2, 3) * nu)))
}

pub fn nef_condition(a: &DivClass) -> Result<PairingCheck> {
    nef_condition_with(a, Exec::default())
}

pub fn nef_condition_with(a: &DivClass, exec: Exec) -> Result<PairingCheck> {
    Ok(is_nef_with(&nef_test_divisor(a)?, exec))
}

/// `2/(3 + a_1)` in the `mu*A` normalization.
pub fn point_alpha_bound(d: &Decomposition) -> Q {
    qi(2) / (qi(3) + d.a1())
}

/// `1/(3a_1 + 2s_A + 1 + 2a) >= (2/3) nu(mu*A)`.
pub fn z_class_inequality(d: &Decomposition, a: &DivClass) -> Result<bool> {
    let nu_mu = slope_nu(a)? / &d.mu;
    let lhs = qi(1) / (qi(3) * d.a1() + qi(2) * &d.s_a + qi(1) + qi(2) * &d.a);
    Ok(lhs >= q(2, 3) * nu_mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    KStable,
    Inconclusive,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::KStable => "KStable",
            Outcome::Inconclusive => "Inconclusive",
        }
    }
}

/// One named check with its exact value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub check: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

fn step(check: &str, value: String, holds: Option<bool>) -> TraceStep {
    TraceStep { check: check.to_string(), value, holds }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerdictOptions {
    pub oracle: OracleOptions,
    pub shift: FormulaShift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub decomposition: Decomposition,
    pub alpha: AlphaReport,
    /// `nu(A)`.
    pub nu: Q,
    /// `nu(mu*A) = nu(A)/mu`.
    pub nu_mu_a: Q,
    pub test_divisor: DivClass,
    pub nef: PairingCheck,
    /// `2/(3 + a_1)`, `mu*A` normalization.
    pub point_bound: Q,
    /// `min(alpha_c(S, mu*A), 2/(3 + a_1))`.
    pub alpha_lower_bound_mu_a: Q,
    /// The same bound rescaled to `A`.
    pub alpha_lower_bound_a: Q,
    /// `alpha(S, A) > (2/3) nu(A)` as certified by the point dichotomy: either
    /// `alpha = alpha_c > (2/3) nu`, or `alpha > 2/(3 + a_1) >= (2/3) nu`
    /// (both in the `mu*A` normalization).
    pub condition_i: bool,
    /// The plain strict comparison `alpha_lower_bound_a > (2/3) nu(A)`.
    /// Equality holds at `A = t(-K)`, where this is false.
    pub lower_bound_strict: bool,
    /// Only evaluated when the nef condition holds.
    pub z_class: Option<bool>,
    pub outcome: Outcome,
    pub trace: Vec<TraceStep>,
}

pub fn verdict(a: &DivClass) -> Result<Verdict> {
    verdict_with(a, &VerdictOptions::default())
}

pub fn verdict_with(a: &DivClass, opts: &VerdictOptions) -> Result<Verdict> {
    let exec = opts.oracle.exec;
    let nu = slope_nu(a)?;
    let decomposition = decompose_with(a, exec)?;
    let alpha = compare_with(&decomposition, opts.oracle, &opts.shift)?;
    let mu = decomposition.mu.clone();
    let nu_mu_a = &nu / &mu;
    let test_divisor = nef_test_divisor(a)?;
    let nef = is_nef_with(&test_divisor, exec);
    let point_bound = point_alpha_bound(&decomposition);
    let alpha_lower_bound_mu_a = alpha.oracle.value.clone().min(point_bound.clone());
    let alpha_lower_bound_a = alpha_c_for_a(&mu, &alpha_lower_bound_mu_a);
    let two_thirds_nu_mu = q(2, 3) * &nu_mu_a;
    let condition_i = *alpha.oracle_value() > two_thirds_nu_mu && point_bound >= two_thirds_nu_mu;
    let lower_bound_strict = alpha_lower_bound_a > q(2, 3) * &nu;
    let z_class = if nef.holds { Some(z_class_inequality(&decomposition, a)?) } else { None };
    let outcome = if nef.holds { Outcome::KStable } else { Outcome::Inconclusive };

    let mut trace = vec![
        step("mu", fmt_q(&mu), None),
        step("nu(A) = (-K.A)/(A.A)", fmt_q(&nu), None),
        step("nu(muA) = nu(A)/mu", fmt_q(&nu_mu_a), None),
        step("test divisor -K - (2/3)nu(A)A", test_divisor.to_string(), None),
    ];
    match &nef.witness {
        Some(w) => trace.push(step(
            &format!("nef: pairing with {}", w.class().label()),
            fmt_q(&w.pairing),
            Some(false),
        )),
        None => trace.push(step("nef: all 240 pairings >= 0", "0".to_string(), Some(true))),
    }
    trace.push(step("alpha_c(S,muA) closed form", fmt_q(alpha.closed_form()), None));
    trace.push(step("alpha_c(S,muA) oracle", fmt_q(alpha.oracle_value()), Some(alpha.agree)));
    trace.push(step("alpha_c(S,A) = mu*alpha_c(S,muA)", fmt_q(&alpha_c_for_a(&mu, alpha.oracle_value())), None));
    trace.push(step("2/(3+a1)", fmt_q(&point_bound), None));
    trace.push(step("alpha lower bound (muA)", fmt_q(&alpha_lower_bound_mu_a), None));
    trace.push(step("alpha lower bound (A) > (2/3)nu(A)", fmt_q(&alpha_lower_bound_a), Some(lower_bound_strict)));
    trace.push(step(
        "alpha_c(muA) > (2/3)nu(muA) and 2/(3+a1) >= (2/3)nu(muA)",
        fmt_q(&two_thirds_nu_mu),
        Some(condition_i),
    ));
    if let Some(z) = z_class {
        let lhs = qi(1) / (qi(3) * decomposition.a1() + qi(2) * &decomposition.s_a + qi(1) + qi(2) * &decomposition.a);
        trace.push(step("1/(3a1+2s_A+1+2a) >= (2/3)nu(muA)", fmt_q(&lhs), Some(z)));
    }
    trace.push(step("outcome", outcome.label().to_string(), None));
    debug_assert!(!nu.is_zero());

    Ok(Verdict {
        decomposition,
        alpha,
        nu,
        nu_mu_a,
        test_divisor,
        nef,
        point_bound,
        alpha_lower_bound_mu_a,
        alpha_lower_bound_a,
        condition_i,
        lower_bound_strict,
        z_class,
        outcome,
        trace,
    })
}
