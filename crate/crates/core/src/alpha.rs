//! Alpha-invariant along curves of a normalized polarization `mu*A`.
//!
//! The closed forms depend only on the sorted coefficients `a_1 >= ... >= a_8`,
//! the fiber coefficient `a` and `s_A = a_2 + ... + a_8`. The oracle computes
//! the largest class-level multiplicity of `mu*A` along `-K` and every
//! (-1)-curve with one exact LP per pivot.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cone::{ConicSubtype, Contraction, Decomposition};
use crate::error::Result;
use crate::exec::Exec;
use crate::lattice::{anticanonical_class, curve_classes, enumerate_conics, enumerate_curves, DivClass};
use crate::lp::ConeSolver;
use crate::rational::{qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MidWinner {
    /// `2/(2+2a_1+s_A-a_2-a_3+2a)`
    Two,
    /// `4/(3+4a_1+2s_A-a_2-a_3-a_4+4a)`
    Four,
    /// `3/(2+3a_1+s_A+3a)`
    Three,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    HighS,
    MidS(MidWinner),
    LowS,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::HighS => "HighS",
            Branch::MidS(MidWinner::Two) => "MidS:two",
            Branch::MidS(MidWinner::Four) => "MidS:four",
            Branch::MidS(MidWinner::Three) => "MidS:three",
            Branch::LowS => "LowS",
        }
    }
}

/// One evaluation of the branch formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub value: Q,
    pub branch: Branch,
    /// The three middle-branch candidates in the order two, four, three.
    pub candidates: Option<[Q; 3]>,
}

/// Shifts every formula denominator by a constant. Zero in normal use; the
/// self-test sets it to check that the oracle comparison catches a bad formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormulaShift(pub Q);

fn sorted8(a: &[Q]) -> [Q; 8] {
    let mut v: Vec<Q> = a.to_vec();
    v.sort_by(|x, y| y.cmp(x));
    v.resize(8, Q::zero());
    std::array::from_fn(|k| v[k].clone())
}

/// Branch formulas for a birational or F1 contraction. `coeffs` need not be sorted.
pub fn branch_formulas(coeffs: &[Q], a: &Q) -> ClosedForm {
    branch_formulas_shifted(coeffs, a, &FormulaShift::default())
}

pub fn branch_formulas_shifted(coeffs: &[Q], a: &Q, shift: &FormulaShift) -> ClosedForm {
    let c = sorted8(coeffs);
    let s: Q = c[1..].iter().sum();
    let d = |x: Q| x + &shift.0;
    let (a1, a2, a3, a4) = (&c[0], &c[1], &c[2], &c[3]);
    if s > qi(4) {
        return ClosedForm { value: qi(1) / d(qi(2) + a1 + a), branch: Branch::HighS, candidates: None };
    }
    if s > qi(1) {
        let two = qi(2) / d(qi(2) + qi(2) * a1 + &s - a2 - a3 + qi(2) * a);
        let four = qi(4) / d(qi(3) + qi(4) * a1 + qi(2) * &s - a2 - a3 - a4 + qi(4) * a);
        let three = qi(3) / d(qi(2) + qi(3) * a1 + &s + qi(3) * a);
        let (value, winner) = if two >= four && two >= three {
            (two.clone(), MidWinner::Two)
        } else if four >= three {
            (four.clone(), MidWinner::Four)
        } else {
            (three.clone(), MidWinner::Three)
        };
        return ClosedForm { value, branch: Branch::MidS(winner), candidates: Some([two, four, three]) };
    }
    let low = qi(2) / d(qi(1) + qi(2) * a1 + &s + qi(2) * a);
    ClosedForm { value: low.min(Q::one()), branch: Branch::LowS, candidates: None }
}

/// Both readings of the P1 x P1 formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1xP1Readings {
    /// Entry `m-1`: delete `a_m`, pad with two zeros, apply the F1 formulas.
    pub relabelings: Vec<ClosedForm>,
    /// The formulas read literally with `s_A7 = s_A - a_7`, branch chosen by `s_A`.
    pub literal: ClosedForm,
    /// All relabelings give the same value.
    pub m_consistent: bool,
    /// The literal reading equals the designated (m = 7) relabeling.
    pub literal_agrees: bool,
}

impl P1xP1Readings {
    pub fn designated(&self) -> &ClosedForm {
        &self.relabelings[6]
    }
}

pub fn p1xp1_readings(coeffs: &[Q], a: &Q, shift: &FormulaShift) -> P1xP1Readings {
    let c = sorted8(coeffs);
    let relabelings: Vec<ClosedForm> = (0..7)
        .map(|m| {
            let rest: Vec<Q> = c[..7].iter().enumerate().filter(|(k, _)| *k != m).map(|(_, x)| x.clone()).collect();
            branch_formulas_shifted(&rest, a, shift)
        })
        .collect();
    let literal = p1xp1_literal(&c, a, shift);
    let m_consistent = relabelings.iter().all(|r| r.value == relabelings[0].value);
    let literal_agrees = literal.value == relabelings[6].value;
    P1xP1Readings { relabelings, literal, m_consistent, literal_agrees }
}

fn p1xp1_literal(c: &[Q; 8], a: &Q, shift: &FormulaShift) -> ClosedForm {
    let s: Q = c[1..].iter().sum();
    let s7 = &s - &c[6];
    let d = |x: Q| x + &shift.0;
    let (a1, a2, a3, a4) = (&c[0], &c[1], &c[2], &c[3]);
    if s > qi(4) {
        return ClosedForm { value: qi(1) / d(qi(2) + a1 + a), branch: Branch::HighS, candidates: None };
    }
    if s > qi(1) {
        let two = qi(2) / d(qi(2) + &s7 - a2 - a3 + qi(2) * a);
        let four = qi(4) / d(qi(3) + qi(2) * &s7 - a2 - a3 - a4 + qi(4) * a);
        let three = qi(3) / d(qi(2) + &s7 + qi(3) * a);
        let (value, winner) = if two >= four && two >= three {
            (two.clone(), MidWinner::Two)
        } else if four >= three {
            (four.clone(), MidWinner::Four)
        } else {
            (three.clone(), MidWinner::Three)
        };
        return ClosedForm { value, branch: Branch::MidS(winner), candidates: Some([two, four, three]) };
    }
    let low = qi(2) / d(qi(1) + &s7 + qi(2) * a);
    ClosedForm { value: low.min(Q::one()), branch: Branch::LowS, candidates: None }
}

/// Closed form together with the P1 x P1 readings when they apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormReport {
    pub form: ClosedForm,
    pub p1xp1: Option<P1xP1Readings>,
}

pub fn alpha_c_closed_form(d: &Decomposition) -> ClosedFormReport {
    alpha_c_closed_form_shifted(d, &FormulaShift::default())
}

pub fn alpha_c_closed_form_shifted(d: &Decomposition, shift: &FormulaShift) -> ClosedFormReport {
    match &d.kind {
        Contraction::ConicBundle { subtype: ConicSubtype::P1xP1, .. } => {
            let readings = p1xp1_readings(&d.a_sorted, &d.a, shift);
            ClosedFormReport { form: readings.designated().clone(), p1xp1: Some(readings) }
        }
        _ => ClosedFormReport { form: branch_formulas_shifted(&d.a_sorted, &d.a, shift), p1xp1: None },
    }
}

/// `(2 + s_A + 2a_1 - a_7 - a_8 + 3a)/3`.
pub fn mult_bound(d: &Decomposition) -> Q {
    let c = &d.a_sorted;
    (qi(2) + &d.s_a + qi(2) * &c[0] - &c[6] - &c[7] + qi(3) * &d.a) / qi(3)
}

/// Largest `t` with `mu_a - t*pivot` in the cone of curves.
pub fn max_mult_along(mu_a: &DivClass, pivot: &DivClass) -> Result<Q> {
    let solver = ConeSolver::new(curve_classes(), mu_a).map_err(crate::cone::lp_error)?;
    Ok(solver.max_along(pivot)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pivot {
    AntiCanonical,
    /// Index into [`enumerate_curves`].
    Curve(usize),
    /// Index into [`enumerate_conics`].
    Conic(usize),
}

impl Pivot {
    pub fn class(&self) -> DivClass {
        match *self {
            Pivot::AntiCanonical => anticanonical_class(),
            Pivot::Curve(k) => enumerate_curves()[k].cls.clone(),
            Pivot::Conic(k) => enumerate_conics()[k].clone(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Pivot::AntiCanonical => "-K".to_string(),
            Pivot::Curve(k) => enumerate_curves()[k].label(),
            Pivot::Conic(k) => format!("conic {}", enumerate_conics()[k]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// `min(1, 1/max_mult)`.
    pub value: Q,
    pub max_mult: Q,
    /// First pivot attaining `max_mult`, in the order `-K`, curves, conics.
    pub argmax: Pivot,
    pub multiplicities: Vec<(Pivot, Q)>,
}

impl OracleResult {
    pub fn mult(&self, p: Pivot) -> Option<&Q> {
        self.multiplicities.iter().find(|(q, _)| *q == p).map(|(_, m)| m)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleOptions {
    /// Also try the 2160 conic classes as pivots.
    pub extended: bool,
    pub exec: Exec,
}

pub fn alpha_c_oracle(mu_a: &DivClass) -> Result<OracleResult> {
    alpha_c_oracle_with(mu_a, OracleOptions::default())
}

pub fn alpha_c_oracle_with(mu_a: &DivClass, opts: OracleOptions) -> Result<OracleResult> {
    let solver = ConeSolver::new(curve_classes(), mu_a).map_err(crate::cone::lp_error)?;
    let mut pivots = vec![Pivot::AntiCanonical];
    pivots.extend((0..enumerate_curves().len()).map(Pivot::Curve));
    if opts.extended {
        pivots.extend((0..enumerate_conics().len()).map(Pivot::Conic));
    }
    let values = opts.exec.map(&pivots, |p| solver.max_along(&p.class()).map(|m| m.value));
    let mut multiplicities = Vec::with_capacity(pivots.len());
    for (p, v) in pivots.into_iter().zip(values) {
        multiplicities.push((p, v?));
    }
    let mut best = 0;
    for (k, (_, m)) in multiplicities.iter().enumerate() {
        if *m > multiplicities[best].1 {
            best = k;
        }
    }
    let (argmax, max_mult) = multiplicities[best].clone();
    let value = if max_mult <= Q::one() { Q::one() } else { max_mult.recip() };
    Ok(OracleResult { value, max_mult, argmax, multiplicities })
}

/// `alpha_c(S, A) = mu * alpha_c(S, mu*A)`.
pub fn alpha_c_for_a(mu: &Q, alpha_mu_a: &Q) -> Q {
    mu * alpha_mu_a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaReport {
    pub closed: ClosedFormReport,
    pub oracle: OracleResult,
    pub agree: bool,
    pub mult_bound: Q,
    /// Every pivot off the face with multiplicity above 1 stays within `mult_bound`.
    pub bound_off_face: bool,
    /// The oracle maximum is at most max(1, multiplicity along the `E_i`, `mult_bound`).
    pub bound_overall: bool,
}

impl AlphaReport {
    pub fn closed_form(&self) -> &Q {
        &self.closed.form.value
    }

    pub fn oracle_value(&self) -> &Q {
        &self.oracle.value
    }
}

pub fn compare(d: &Decomposition) -> Result<AlphaReport> {
    compare_with(d, OracleOptions::default(), &FormulaShift::default())
}

pub fn compare_with(d: &Decomposition, opts: OracleOptions, shift: &FormulaShift) -> Result<AlphaReport> {
    let closed = alpha_c_closed_form_shifted(d, shift);
    let oracle = alpha_c_oracle_with(&d.reconstruct(), opts)?;
    let bound = mult_bound(d);
    let bound_off_face = oracle.multiplicities.iter().all(|(p, m)| {
        let on_face = matches!(p, Pivot::Curve(k) if d.face.contains(k));
        on_face || *m <= Q::one() || *m <= bound
    });
    let along_e = d
        .curves
        .iter()
        .filter_map(|&k| oracle.mult(Pivot::Curve(k)))
        .max()
        .cloned()
        .unwrap_or_else(Q::zero);
    let bound_overall = oracle.max_mult <= along_e.max(bound.clone()).max(Q::one());
    let agree = closed.form.value == oracle.value;
    Ok(AlphaReport { closed, oracle, agree, mult_bound: bound, bound_off_face, bound_overall })
}

/// `a_1 = s_A = 0` gives `alpha_c = 1`; positive everywhere else.
pub fn in_unit_interval(x: &Q) -> bool {
    x.is_positive() && *x <= Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::decompose;
    use crate::lattice::{named, DivClass};
    use crate::rational::q;

    fn bir(coeffs: &[Q]) -> ClosedForm {
        branch_formulas(coeffs, &Q::zero())
    }

    #[test]
    fn branch_examples() {
        let f = bir(&vec![q(2, 3); 8]);
        assert_eq!(f.value, q(3, 8));
        assert_eq!(f.branch, Branch::HighS);

        let f = bir(&[q(9, 10), q(9, 10), q(9, 10)]);
        assert_eq!(f.value, q(10, 19));
        assert_eq!(f.candidates, Some([q(10, 19), q(10, 21), q(6, 13)]));
        assert_eq!(f.branch, Branch::MidS(MidWinner::Two));

        let f = bir(&[]);
        assert_eq!(f.value, qi(1));
        assert_eq!(f.branch, Branch::LowS);
    }

    #[test]
    fn thresholds() {
        // s_A exactly 4 and exactly 1 stay in the lower branch.
        let f = bir(&vec![q(4, 7); 8]);
        assert_eq!(f.branch, Branch::MidS(MidWinner::Three));
        assert_eq!(f.value, q(7, 18));
        assert_eq!(f.value, qi(1) / (qi(2) + q(4, 7)));
        let f = bir(&[q(1, 3), q(1, 3), q(1, 3), q(1, 3)]);
        assert_eq!(f.branch, Branch::LowS);
        assert_eq!(f.value, q(3, 4));
    }

    #[test]
    fn shift_changes_value() {
        let s = FormulaShift(q(1, 1000));
        let f = branch_formulas_shifted(&[q(1, 2)], &Q::zero(), &s);
        assert_ne!(f.value, bir(&[q(1, 2)]).value);
    }

    #[test]
    fn mult_bound_examples() {
        let d = decompose(&anticanonical_class()).unwrap();
        assert_eq!(mult_bound(&d), q(2, 3));
        let d = decompose(&named::anticanonical_plus(&vec![q(2, 3); 8])).unwrap();
        assert_eq!(mult_bound(&d), q(20, 9));
        let d = decompose(&named::anticanonical_plus_e(1, 1, 2)).unwrap();
        assert_eq!(mult_bound(&d), qi(1));
    }

    #[test]
    fn max_mult_examples() {
        let k = anticanonical_class();
        assert_eq!(max_mult_along(&k, &DivClass::e(1)).unwrap(), q(1, 2));
        assert!(max_mult_along(&k, &k).unwrap() >= qi(1));
        let a = named::anticanonical_plus(&vec![q(2, 3); 8]);
        assert_eq!(max_mult_along(&a, &DivClass::e(1)).unwrap(), q(8, 3));
    }

    #[test]
    fn oracle_examples() {
        let o = alpha_c_oracle(&anticanonical_class()).unwrap();
        assert_eq!(o.value, qi(1));
        assert_eq!(o.max_mult, qi(1));
        assert_eq!(o.argmax, Pivot::AntiCanonical);

        let o = alpha_c_oracle(&named::anticanonical_plus(&vec![q(2, 3); 8])).unwrap();
        assert_eq!(o.value, q(3, 8));
        assert_eq!(o.argmax.class(), DivClass::e(1));

        let o = alpha_c_oracle(&named::anticanonical_plus(&[q(9, 10), q(9, 10), q(9, 10)])).unwrap();
        assert_eq!(o.max_mult, q(19, 10));
        assert_eq!(o.argmax.class(), DivClass::e(1));
    }

    #[test]
    fn extended_oracle_matches() {
        let a = named::anticanonical_plus(&[q(1, 2), q(1, 3)]);
        let base = alpha_c_oracle(&a).unwrap();
        let ext = alpha_c_oracle_with(&a, OracleOptions { extended: true, exec: Exec::default() }).unwrap();
        assert_eq!(base.value, ext.value);
        assert_eq!(ext.multiplicities.len(), 1 + 240 + 2160);
    }

    #[test]
    fn compare_examples() {
        for a in [anticanonical_class(), named::anticanonical_plus(&vec![q(2, 3); 8])] {
            let d = decompose(&a).unwrap();
            let r = compare(&d).unwrap();
            assert!(r.agree);
            assert!(r.bound_off_face && r.bound_overall);
            assert!(in_unit_interval(r.closed_form()));
        }
    }

    #[test]
    fn p1xp1_readings_shape() {
        let coeffs = [q(1, 2), q(1, 3), q(1, 4), q(1, 5), q(1, 6), q(1, 7), q(1, 8)];
        let r = p1xp1_readings(&coeffs, &q(1, 3), &FormulaShift::default());
        assert_eq!(r.relabelings.len(), 7);
        // Deleting the smallest coefficient keeps the largest remaining sum.
        assert_eq!(r.designated(), &branch_formulas(&coeffs[..6], &q(1, 3)));
        assert_eq!(r.literal_agrees, r.literal.value == r.designated().value);
    }

    #[test]
    fn rescaling() {
        assert_eq!(alpha_c_for_a(&q(1, 2), &q(3, 8)), q(3, 16));
    }
}
