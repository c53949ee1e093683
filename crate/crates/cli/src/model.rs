//! Report data shared by the text, JSON and CSV renderers. Every rational is
//! an exact `p/q` string.

use std::collections::BTreeMap;

use dp1kstab_core::alpha::{alpha_c_for_a, AlphaReport, P1xP1Readings};
use dp1kstab_core::cone::{Decomposition, PairingCheck};
use dp1kstab_core::kstab::Verdict;
use dp1kstab_core::lattice::{enumerate_curves, DivClass};
use dp1kstab_core::rational::{approx, fmt_q, Q};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "1";

/// Which normalizations to report for `alpha_c` and `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `alpha_c` for `mu*A`, `nu` for `A`.
    Default,
    A,
    MuA,
    Both,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::Default => "alpha_c=muA,nu=A",
            Normalization::A => "A",
            Normalization::MuA => "muA",
            Normalization::Both => "both",
        }
    }

    /// `(A, muA)` slots for `alpha_c` and its bounds.
    pub fn alpha_slots(self) -> (bool, bool) {
        match self {
            Normalization::Default | Normalization::MuA => (false, true),
            Normalization::A => (true, false),
            Normalization::Both => (true, true),
        }
    }

    /// `(A, muA)` slots for `nu`.
    pub fn nu_slots(self) -> (bool, bool) {
        match self {
            Normalization::Default | Normalization::A => (true, false),
            Normalization::MuA => (false, true),
            Normalization::Both => (true, true),
        }
    }
}

/// A quantity in the `A` and/or `mu*A` normalization.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(rename = "muA", default, skip_serializing_if = "Option::is_none")]
    pub mu_a: Option<String>,
}

impl Pair {
    fn from_slots((want_a, want_mu): (bool, bool), value_a: &Q, value_mu_a: &Q) -> Pair {
        Pair {
            a: want_a.then(|| fmt_q(value_a)),
            mu_a: want_mu.then(|| fmt_q(value_mu_a)),
        }
    }

    /// `alpha`-type quantity given in the `mu*A` normalization.
    pub fn alpha(norm: Normalization, mu: &Q, value_mu_a: &Q) -> Pair {
        Pair::from_slots(norm.alpha_slots(), &alpha_c_for_a(mu, value_mu_a), value_mu_a)
    }

    /// `nu`-type quantity given in the `A` normalization.
    pub fn nu(norm: Normalization, mu: &Q, value_a: &Q) -> Pair {
        Pair::from_slots(norm.nu_slots(), value_a, &(value_a / mu))
    }

    /// The single populated value, or `muA` then `A` when both are.
    pub fn any(&self) -> Option<&str> {
        self.mu_a.as_deref().or(self.a.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub curve: String,
    pub index: usize,
    pub pairing: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positivity {
    pub holds: bool,
    pub witness: Option<WitnessJson>,
}

impl From<&PairingCheck> for Positivity {
    fn from(p: &PairingCheck) -> Self {
        Positivity {
            holds: p.holds,
            witness: p.witness.as_ref().map(|w| WitnessJson {
                curve: w.class().label(),
                index: w.curve,
                pairing: fmt_q(&w.pairing),
            }),
        }
    }
}

fn class_strings(x: &DivClass) -> Vec<String> {
    x.coeffs().iter().map(fmt_q).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    /// `A.A`
    pub self_intersection: String,
    /// `-K.A`
    pub anticanonical_degree: String,
    pub mu: String,
    pub nu: Pair,
    /// `-K - (2/3) nu(A) A`
    pub test_divisor: Vec<String>,
    pub nef: Positivity,
}

impl CheckJson {
    pub fn new(norm: Normalization, a: &DivClass, mu: &Q, nu: &Q, test_divisor: &DivClass, nef: &PairingCheck) -> Self {
        let minus_k = dp1kstab_core::lattice::anticanonical_class();
        CheckJson {
            self_intersection: fmt_q(&a.dot(a)),
            anticanonical_degree: fmt_q(&minus_k.dot(a)),
            mu: fmt_q(mu),
            nu: Pair::nu(norm, mu, nu),
            test_divisor: class_strings(test_divisor),
            nef: nef.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCoefficient {
    pub curve: String,
    pub index: usize,
    pub coefficient: String,
    /// Conic bundles: the other component of the fiber through this curve.
    pub partner: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub mu: String,
    pub kind: String,
    pub fiber: Option<Vec<String>>,
    /// Fiber coefficient `a`.
    pub a: String,
    /// `a_1 >= ... >= a_8`, zero padded.
    pub a_sorted: Vec<String>,
    pub s_a: String,
    pub curves: Vec<CurveCoefficient>,
    pub face: Vec<String>,
    /// `-K + sum a_i E_i + a*B` equals `mu*A`.
    pub reconstruction_ok: bool,
}

impl DecompositionJson {
    pub fn new(d: &Decomposition, a: &DivClass) -> Self {
        let curves = enumerate_curves();
        DecompositionJson {
            mu: fmt_q(&d.mu),
            kind: d.kind.label().to_string(),
            fiber: d.fiber().map(class_strings),
            a: fmt_q(&d.a),
            a_sorted: d.a_sorted.iter().map(fmt_q).collect(),
            s_a: fmt_q(&d.s_a),
            curves: d
                .curves
                .iter()
                .enumerate()
                .map(|(k, &c)| CurveCoefficient {
                    curve: curves[c].label(),
                    index: c,
                    coefficient: fmt_q(&d.a_sorted[k]),
                    partner: d.partners.get(k).map(|&p| curves[p].label()),
                })
                .collect(),
            face: d.face.iter().map(|&c| curves[c].label()).collect(),
            reconstruction_ok: d.reconstruct() == a.scale(&d.mu),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1xP1Json {
    /// Deleting `a_m` for `m = 1..7` and applying the F1 formulas.
    pub relabelings: Vec<String>,
    /// The relabeling used as the closed form (`m = 7`).
    pub designated: String,
    /// `s_7 = s_A - a_7` substituted into the printed formulas.
    pub literal: String,
    pub m_consistent: bool,
    pub literal_agrees: bool,
}

impl From<&P1xP1Readings> for P1xP1Json {
    fn from(r: &P1xP1Readings) -> Self {
        P1xP1Json {
            relabelings: r.relabelings.iter().map(|c| fmt_q(&c.value)).collect(),
            designated: fmt_q(&r.designated().value),
            literal: fmt_q(&r.literal.value),
            m_consistent: r.m_consistent,
            literal_agrees: r.literal_agrees,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaJson {
    pub branch: String,
    pub closed: Pair,
    pub oracle: Pair,
    /// Middle branch: the candidates two, four, three (`mu*A`).
    pub candidates: Option<Vec<String>>,
    pub argmax: String,
    pub max_mult: String,
    pub agree: bool,
    pub mult_bound: String,
    pub bound_off_face: bool,
    pub bound_overall: bool,
    pub extended_oracle: bool,
    pub p1xp1: Option<P1xP1Json>,
}

impl AlphaJson {
    pub fn new(norm: Normalization, mu: &Q, r: &AlphaReport, extended: bool) -> Self {
        AlphaJson {
            branch: r.closed.form.branch.label().to_string(),
            closed: Pair::alpha(norm, mu, r.closed_form()),
            oracle: Pair::alpha(norm, mu, r.oracle_value()),
            candidates: r.closed.form.candidates.as_ref().map(|c| c.iter().map(fmt_q).collect()),
            argmax: r.oracle.argmax.label(),
            max_mult: fmt_q(&r.oracle.max_mult),
            agree: r.agree,
            mult_bound: fmt_q(&r.mult_bound),
            bound_off_face: r.bound_off_face,
            bound_overall: r.bound_overall,
            extended_oracle: extended,
            p1xp1: r.closed.p1xp1.as_ref().map(P1xP1Json::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub check: String,
    pub value: String,
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub outcome: String,
    /// `2/(3 + a_1)` for `mu*A`.
    pub point_bound: String,
    /// `min(alpha_c, 2/(3 + a_1))`.
    pub alpha_lower_bound: Pair,
    pub condition_i: bool,
    pub lower_bound_strict: bool,
    pub z_class: Option<bool>,
    pub trace: Vec<Step>,
}

impl VerdictJson {
    pub fn new(norm: Normalization, v: &Verdict) -> Self {
        let mu = &v.decomposition.mu;
        VerdictJson {
            outcome: v.outcome.label().to_string(),
            point_bound: fmt_q(&v.point_bound),
            alpha_lower_bound: Pair::alpha(norm, mu, &v.alpha_lower_bound_mu_a),
            condition_i: v.condition_i,
            lower_bound_strict: v.lower_bound_strict,
            z_class: v.z_class,
            trace: v
                .trace
                .iter()
                .map(|s| Step { check: s.check.clone(), value: s.value.clone(), holds: s.holds })
                .collect(),
        }
    }
}

/// Everything computed for one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBody {
    pub input_class: String,
    pub ample: Positivity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    /// Decimal approximations to 12 significant digits, for plotting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximate: Option<BTreeMap<String, String>>,
    pub notes: Vec<String>,
}

impl ClassBody {
    pub fn exit_code(&self) -> u8 {
        let disagree = self.alpha.as_ref().is_some_and(|a| !a.agree)
            || self.decomposition.as_ref().is_some_and(|d| !d.reconstruction_ok)
            || self.verdict.as_ref().is_some_and(|v| v.z_class == Some(false));
        if disagree {
            3
        } else if !self.ample.holds {
            2
        } else {
            0
        }
    }

    pub fn outcome(&self) -> &str {
        match &self.verdict {
            _ if !self.ample.holds => "NotAmple",
            Some(v) => &v.outcome,
            None => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub schema: String,
    pub command: String,
    pub normalization: String,
    #[serde(flatten)]
    pub body: ClassBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisJson {
    pub direction: String,
    pub from: String,
    pub to: String,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub grid: Vec<String>,
    #[serde(flatten)]
    pub body: ClassBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema: String,
    pub command: String,
    pub normalization: String,
    pub input_class: String,
    pub axes: Vec<AxisJson>,
    pub rows: Vec<ScanRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareCase {
    pub label: String,
    pub input_class: String,
    pub kind: String,
    pub branch: String,
    pub closed: Pair,
    pub oracle: Pair,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: String,
    pub command: String,
    pub normalization: String,
    pub extended_oracle: bool,
    pub cases: Vec<CompareCase>,
    pub agree_count: usize,
    pub total: usize,
    /// Rounded down, so 100 means every case agrees.
    pub agree_percent: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub schema: String,
    pub command: String,
    pub checks: Vec<SelftestCheck>,
    pub pass: bool,
}

/// Decimal companions of the exact values in `body`, keyed by CSV column name.
pub fn approximations(body: &ClassBody, norm: Normalization) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut put = |name: String, v: &Option<String>| {
        if let Some(s) = v {
            let x: Q = s.parse().expect("exact rational string");
            out.insert(format!("{name}_approx"), approx(&x));
        }
    };
    if let Some(a) = &body.alpha {
        for (col, p) in [("alpha_c_closed", &a.closed), ("alpha_c_oracle", &a.oracle)] {
            for (suffix, v) in pair_columns(col, p, norm.alpha_slots()) {
                put(suffix, v);
            }
        }
    }
    if let Some(c) = &body.check {
        for (suffix, v) in pair_columns("nu", &c.nu, norm.nu_slots()) {
            put(suffix, v);
        }
    }
    out
}

/// Column names and values of a [`Pair`]: a plain name for one slot,
/// `_A`/`_muA` suffixes for both.
pub fn pair_columns<'a>(name: &str, p: &'a Pair, slots: (bool, bool)) -> Vec<(String, &'a Option<String>)> {
    match slots {
        (true, true) => vec![(format!("{name}_A"), &p.a), (format!("{name}_muA"), &p.mu_a)],
        (true, false) => vec![(name.to_string(), &p.a)],
        _ => vec![(name.to_string(), &p.mu_a)],
    }
}
