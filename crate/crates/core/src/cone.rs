//! Positivity tests against the 240 (-1)-curves and the decomposition
//!
//! ```text
//!     mu*A = -K + sum a_i E_i + a*B
//! ```
//!
//! of an ample class, read off from the smallest face of the effective cone
//! containing `K + mu*A`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{
    anticanonical_class, canonical_class, curve_classes, enumerate_curves, intersect_ints, solve_in_span, CurveClass,
    DivClass,
};
use crate::lp::{cone_member, Certificate, ConeSolver, LpError};
use crate::rational::{one, Q};

/// A curve whose pairing violates a positivity condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index into [`enumerate_curves`].
    pub curve: usize,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub pairing: Q,
}

impl Witness {
    pub fn class(&self) -> &'static CurveClass {
        &enumerate_curves()[self.curve]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingCheck {
    pub holds: bool,
    /// Most negative pairing; ties go to the earliest curve in canonical order.
    pub witness: Option<Witness>,
}

fn pairing_scan(d: &DivClass, strict: bool, exec: Exec) -> PairingCheck {
    let (nums, den) = d.integer_scaling();
    let curves = enumerate_curves();
    let pairing_num = |c: &CurveClass| {
        let mut acc = &nums[0] * c.ints[0];
        for k in 1..9 {
            if c.ints[k] != 0 {
                acc -= &nums[k] * c.ints[k];
            }
        }
        acc
    };
    let pairings = exec.map(curves, pairing_num);
    let mut worst: Option<usize> = None;
    for (k, p) in pairings.iter().enumerate() {
        let violates = if strict { !p.is_positive() } else { p.is_negative() };
        if violates && worst.is_none_or(|w| *p < pairings[w]) {
            worst = Some(k);
        }
    }
    match worst {
        Some(k) => PairingCheck {
            holds: false,
            witness: Some(Witness { curve: k, pairing: Q::new(pairings[k].clone(), den) }),
        },
        None => PairingCheck { holds: true, witness: None },
    }
}

/// `A.C > 0` for every (-1)-curve.
pub fn is_ample(a: &DivClass) -> PairingCheck {
    pairing_scan(a, true, Exec::default())
}

/// `D.C >= 0` for every (-1)-curve.
pub fn is_nef(d: &DivClass) -> PairingCheck {
    is_nef_with(d, Exec::default())
}

pub fn is_nef_with(d: &DivClass, exec: Exec) -> PairingCheck {
    pairing_scan(d, false, exec)
}

pub(crate) fn require_ample(a: &DivClass) -> Result<()> {
    match is_ample(a).witness {
        Some(w) => Err(Error::NotAmple { curve: w.curve, pairing: w.pairing }),
        None => Ok(()),
    }
}

/// Membership in the cone spanned by the 240 curves.
pub fn is_pseff(d: &DivClass) -> (bool, Certificate) {
    cone_member(d, curve_classes())
}

/// `mu` together with a nef class supporting the effective cone at `K + mu*A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuSupport {
    pub mu: Q,
    /// Nef class `N` with `N.(-K) = 1` and `N.(K + mu*A) = 0`.
    pub support: DivClass,
}

/// `mu = 1/theta` where `theta` is the largest multiple of `-K` that can be
/// removed from `A` while staying effective.
pub fn mu_with_support(a: &DivClass) -> Result<MuSupport> {
    require_ample(a)?;
    let solver = ConeSolver::new(curve_classes(), a)?;
    let best = solver.max_along(&anticanonical_class())?;
    debug_assert!(best.value.is_positive());
    Ok(MuSupport { mu: best.value.recip(), support: best.dual })
}

/// The least `lambda` with `K + lambda*A` pseudo-effective.
pub fn compute_mu(a: &DivClass) -> Result<Q> {
    Ok(mu_with_support(a)?.mu)
}

/// Curves appearing with positive coefficient in some cone representation of `d`.
pub fn minimal_face(d: &DivClass) -> Result<Vec<usize>> {
    minimal_face_with(d, None, Exec::default())
}

/// As [`minimal_face`], optionally seeded with a nef class `N` satisfying
/// `N.d = 0`; only curves orthogonal to `N` are tested.
pub fn minimal_face_with(d: &DivClass, support: Option<&DivClass>, exec: Exec) -> Result<Vec<usize>> {
    if d.is_zero() {
        return Ok(Vec::new());
    }
    let support = match support {
        Some(n) => Some(n.clone()),
        None => {
            let solver = ConeSolver::new(curve_classes(), d).map_err(lp_error)?;
            let m = solver.max_along(&anticanonical_class())?;
            m.value.is_zero().then_some(m.dual)
        }
    };
    let curves = enumerate_curves();
    let candidates: Vec<usize> = match &support {
        Some(n) => (0..curves.len()).filter(|&k| n.dot_ints(&curves[k].ints).is_zero()).collect(),
        None => (0..curves.len()).collect(),
    };
    let gens: Vec<DivClass> = candidates.iter().map(|&k| curves[k].cls.clone()).collect();
    let solver = ConeSolver::new(&gens, d).map_err(lp_error)?;
    let maxima = exec.map_range(gens.len(), |k| solver.max_generator_coefficient(k));
    let mut face = Vec::new();
    for (k, m) in candidates.iter().zip(maxima) {
        if m?.is_positive() {
            face.push(*k);
        }
    }
    Ok(face)
}

pub(crate) fn lp_error(e: LpError) -> Error {
    match e {
        LpError::NotInCone { separation } => Error::NotPseff { separation },
        other => Error::Lp(other),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConicSubtype {
    /// Contracting `E_1..E_7` gives the Hirzebruch surface F1.
    F1,
    /// Contracting `E_1..E_7` gives P1 x P1.
    P1xP1,
}

/// Face shape before coefficients are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Skeleton {
    Birational {
        exceptionals: Vec<usize>,
    },
    ConicBundle {
        fiber: DivClass,
        /// One curve per reducible fiber plus unpaired face curves.
        components: Vec<usize>,
        /// The other component of each reducible fiber, if it is in the face.
        partners: Vec<Option<usize>>,
        subtype: ConicSubtype,
    },
}

/// F1 iff some (-1)-curve is disjoint from all of the given curves.
pub fn conic_subtype(components: &[usize]) -> ConicSubtype {
    let curves = enumerate_curves();
    let extra = curves.iter().enumerate().any(|(k, c)| {
        !components.contains(&k) && components.iter().all(|&j| intersect_ints(&c.ints, &curves[j].ints) == 0)
    });
    if extra {
        ConicSubtype::F1
    } else {
        ConicSubtype::P1xP1
    }
}

pub fn classify_contraction(face: &[usize]) -> Result<Skeleton> {
    let curves = enumerate_curves();
    let pair = |i: usize, j: usize| intersect_ints(&curves[i].ints, &curves[j].ints);
    let mut partner: Vec<Option<usize>> = vec![None; face.len()];
    for (x, &i) in face.iter().enumerate() {
        for (y, &j) in face.iter().enumerate().skip(x + 1) {
            match pair(i, j) {
                0 => {}
                1 => {
                    if partner[x].is_some() || partner[y].is_some() {
                        return Err(Error::MalformedFace(format!("curve #{i} or #{j} meets two face curves")));
                    }
                    partner[x] = Some(y);
                    partner[y] = Some(x);
                }
                m => return Err(Error::MalformedFace(format!("curves #{i} and #{j} meet with multiplicity {m}"))),
            }
        }
    }
    if partner.iter().all(Option::is_none) {
        if face.len() > 8 {
            return Err(Error::MalformedFace(format!("{} disjoint curves", face.len())));
        }
        return Ok(Skeleton::Birational { exceptionals: face.to_vec() });
    }
    let mut fiber: Option<[i64; 9]> = None;
    let mut components = Vec::new();
    let mut partners = Vec::new();
    for (x, &i) in face.iter().enumerate() {
        match partner[x] {
            Some(y) if y < x => continue,
            Some(y) => {
                let j = face[y];
                let b: [i64; 9] = std::array::from_fn(|k| curves[i].ints[k] + curves[j].ints[k]);
                if *fiber.get_or_insert(b) != b {
                    return Err(Error::MalformedFace("reducible fibers have different classes".into()));
                }
                components.push(i);
                partners.push(Some(j));
            }
            None => {
                components.push(i);
                partners.push(None);
            }
        }
    }
    let b = fiber.expect("at least one pair");
    if intersect_ints(&b, &b) != 0 || intersect_ints(&b, &crate::lattice::CANONICAL_INTS) != -2 {
        return Err(Error::MalformedFace("fiber class is not a conic class".into()));
    }
    if components.len() != 7 {
        return Err(Error::MalformedFace(format!("{} fiber components, expected 7", components.len())));
    }
    let subtype = conic_subtype(&components);
    Ok(Skeleton::ConicBundle { fiber: DivClass::from_ints(b), components, partners, subtype })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contraction {
    Birational,
    ConicBundle { fiber: DivClass, subtype: ConicSubtype },
}

impl Contraction {
    pub fn label(&self) -> &'static str {
        match self {
            Contraction::Birational => "Birational",
            Contraction::ConicBundle { subtype: ConicSubtype::F1, .. } => "ConicBundleF1",
            Contraction::ConicBundle { subtype: ConicSubtype::P1xP1, .. } => "ConicBundleP1xP1",
        }
    }

    pub fn is_conic(&self) -> bool {
        matches!(self, Contraction::ConicBundle { .. })
    }
}

/// `mu*A = -K + sum a_i E_i + a*B` with the `a_i` sorted non-increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub mu: Q,
    pub kind: Contraction,
    /// Curves `E_i`, aligned with the first entries of `a_sorted`.
    pub curves: Vec<usize>,
    /// Conic bundles only: the other component of each `E_i`'s fiber.
    pub partners: Vec<usize>,
    /// Fiber coefficient, zero for birational contractions.
    pub a: Q,
    /// `a_1 >= ... >= a_8`, zero padded.
    pub a_sorted: Vec<Q>,
    pub s_a: Q,
    pub face: Vec<usize>,
}

impl Decomposition {
    /// `-K + sum a_i E_i + a*B`.
    pub fn reconstruct(&self) -> DivClass {
        let curves = enumerate_curves();
        let mut acc = anticanonical_class();
        for (k, &c) in self.curves.iter().enumerate() {
            acc = &acc + &curves[c].cls.scale(&self.a_sorted[k]);
        }
        if let Contraction::ConicBundle { fiber, .. } = &self.kind {
            acc = &acc + &fiber.scale(&self.a);
        }
        acc
    }

    pub fn fiber(&self) -> Option<&DivClass> {
        match &self.kind {
            Contraction::ConicBundle { fiber, .. } => Some(fiber),
            Contraction::Birational => None,
        }
    }

    pub fn a1(&self) -> &Q {
        &self.a_sorted[0]
    }
}

/// Compute `mu`, the extremal face and the coefficients of an ample class.
pub fn decompose(a: &DivClass) -> Result<Decomposition> {
    decompose_with(a, Exec::default())
}

pub fn decompose_with(a: &DivClass, exec: Exec) -> Result<Decomposition> {
    let MuSupport { mu, support } = mu_with_support(a)?;
    let d = &canonical_class() + &a.scale(&mu);
    let face = minimal_face_with(&d, Some(&support), exec)?;
    let curves = enumerate_curves();

    let (kind, mut coeffs, mut chosen, mut partners, fiber_coeff) = match classify_contraction(&face)? {
        Skeleton::Birational { exceptionals } => {
            let basis: Vec<DivClass> = exceptionals.iter().map(|&k| curves[k].cls.clone()).collect();
            let x = solve_in_span(&d, &basis)
                .ok_or_else(|| Error::MalformedFace("K + mu*A is not in the span of its face".into()))?;
            if x.iter().any(|c| !c.is_positive()) {
                return Err(Error::MalformedFace("non-positive coefficient on a birational face".into()));
            }
            (Contraction::Birational, x, exceptionals, Vec::new(), Q::zero())
        }
        Skeleton::ConicBundle { fiber, components, partners, .. } => {
            let mut basis = vec![fiber.clone()];
            basis.extend(components.iter().map(|&k| curves[k].cls.clone()));
            let x = solve_in_span(&d, &basis)
                .ok_or_else(|| Error::MalformedFace("K + mu*A is not in the span of its face".into()))?;
            let mut a_fiber = x[0].clone();
            let mut coeffs = x[1..].to_vec();
            let mut chosen = components;
            let mut other = Vec::with_capacity(7);
            for k in 0..chosen.len() {
                let p = partners[k].ok_or_else(|| Error::MalformedFace("unpaired fiber component".into()))?;
                if coeffs[k].is_negative() {
                    // a*B + c*E = (a + c)*B - c*E'
                    a_fiber += &coeffs[k];
                    coeffs[k] = -&coeffs[k];
                    other.push(chosen[k]);
                    chosen[k] = p;
                } else {
                    other.push(p);
                }
            }
            if conic_subtype(&chosen) == ConicSubtype::P1xP1 {
                // A zero coefficient leaves the component choice free; take the F1 labelling.
                if let Some(k) = coeffs.iter().position(Zero::is_zero) {
                    std::mem::swap(&mut chosen[k], &mut other[k]);
                }
            }
            if !a_fiber.is_positive() {
                return Err(Error::MalformedFace("conic bundle face with non-positive fiber coefficient".into()));
            }
            let subtype = conic_subtype(&chosen);
            (Contraction::ConicBundle { fiber, subtype }, coeffs, chosen, other, a_fiber)
        }
    };

    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&i, &j| coeffs[j].cmp(&coeffs[i]).then(chosen[i].cmp(&chosen[j])));
    coeffs = order.iter().map(|&i| coeffs[i].clone()).collect();
    chosen = order.iter().map(|&i| chosen[i]).collect();
    if !partners.is_empty() {
        partners = order.iter().map(|&i| partners[i]).collect();
    }
    let mut a_sorted = coeffs;
    a_sorted.resize(8, Q::zero());
    let s_a = a_sorted[1..].iter().sum();

    let dec = Decomposition { mu, kind, curves: chosen, partners, a: fiber_coeff, a_sorted, s_a, face };
    if dec.a_sorted.iter().any(|c| c.is_negative() || *c >= one()) {
        return Err(Error::MalformedFace("coefficient outside [0, 1)".into()));
    }
    if dec.reconstruct() != a.scale(&dec.mu) {
        return Err(Error::MalformedFace("decomposition does not reconstruct mu*A".into()));
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{curve_index, named};
    use crate::rational::{q, qi};

    fn idx(x: &DivClass) -> usize {
        curve_index(x).unwrap()
    }

    #[test]
    fn ampleness() {
        assert!(is_ample(&anticanonical_class()).holds);
        assert!(is_ample(&named::anticanonical_plus(&vec![q(2, 3); 8])).holds);
        let h = is_ample(&DivClass::h());
        assert!(!h.holds);
        assert_eq!(h.witness.unwrap().class().cls, DivClass::e(1));
    }

    #[test]
    fn nefness() {
        assert!(is_nef(&DivClass::zero()).holds);
        assert!(is_nef(&anticanonical_class().scale(&q(1, 3))).holds);
        let a = named::anticanonical_plus_e(1, 1, 2);
        let t = &anticanonical_class() - &a.scale(&q(4, 7));
        let check = is_nef(&t);
        assert!(!check.holds);
        let w = check.witness.unwrap();
        assert_eq!(w.pairing, q(-3, 7));
        assert_eq!(w.class().cls, named::z_curve());
    }

    #[test]
    fn pseudo_effectivity() {
        assert!(is_pseff(&anticanonical_class()).0);
        assert!(is_pseff(&DivClass::e(1)).0);
        let (member, cert) = is_pseff(&canonical_class());
        assert!(!member);
        assert!(matches!(cert, Certificate::Separation(_)));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(compute_mu(&anticanonical_class()).unwrap(), qi(1));
        assert_eq!(compute_mu(&anticanonical_class().scale(&qi(2))).unwrap(), q(1, 2));
        assert_eq!(compute_mu(&named::anticanonical_plus_e(1, 1, 2)).unwrap(), qi(1));
        assert!(matches!(compute_mu(&DivClass::h()), Err(Error::NotAmple { .. })));
    }

    #[test]
    fn support_is_nef_and_orthogonal() {
        let a = named::anticanonical_plus(&[q(1, 2), q(1, 3), q(1, 5)]);
        let s = mu_with_support(&a).unwrap();
        assert!(is_nef(&s.support).holds);
        assert_eq!(s.support.dot(&anticanonical_class()), qi(1));
        let d = &canonical_class() + &a.scale(&s.mu);
        assert_eq!(s.support.dot(&d), qi(0));
    }

    #[test]
    fn face_examples() {
        assert!(minimal_face(&DivClass::zero()).unwrap().is_empty());
        assert_eq!(minimal_face(&DivClass::e(1).scale(&q(1, 2))).unwrap(), vec![idx(&DivClass::e(1))]);
        assert!(matches!(minimal_face(&canonical_class()), Err(Error::NotPseff { .. })));
    }

    #[test]
    fn conic_face_from_fiber() {
        // B = h - e1 with all seven fibers {e_j, h-e1-e_j} in play.
        let b = &DivClass::h() - &DivClass::e(1);
        let d = &b.scale(&q(1, 3)) + &DivClass::e(2).scale(&q(1, 2));
        let face = minimal_face(&d).unwrap();
        assert_eq!(face.len(), 14);
        match classify_contraction(&face).unwrap() {
            Skeleton::ConicBundle { fiber, components, .. } => {
                assert_eq!(fiber, b);
                assert_eq!(components.len(), 7);
            }
            other => panic!("expected conic bundle, got {other:?}"),
        }
    }

    #[test]
    fn classify_examples() {
        let e1 = idx(&DivClass::e(1));
        assert_eq!(classify_contraction(&[e1]).unwrap(), Skeleton::Birational { exceptionals: vec![e1] });
        assert_eq!(classify_contraction(&[]).unwrap(), Skeleton::Birational { exceptionals: vec![] });
        let l12 = idx(&named::l(2));
        let e2 = idx(&DivClass::e(2));
        // A lone intersecting pair is not a full conic-bundle face.
        assert!(matches!(classify_contraction(&[e2, l12]), Err(Error::MalformedFace(_))));
        let mut face = vec![];
        for j in 2..=8 {
            face.push(idx(&DivClass::e(j)));
            face.push(idx(&named::l(j)));
        }
        face.sort();
        match classify_contraction(&face).unwrap() {
            Skeleton::ConicBundle { fiber, subtype, .. } => {
                assert_eq!(fiber, &DivClass::h() - &DivClass::e(1));
                assert_eq!(subtype, ConicSubtype::F1);
            }
            other => panic!("expected conic bundle, got {other:?}"),
        }
        let z = idx(&named::z_curve());
        assert!(matches!(classify_contraction(&[e1, z]), Err(Error::MalformedFace(_))));
    }

    #[test]
    fn subtype_parity() {
        let b = &DivClass::h() - &DivClass::e(1);
        let mut comps: Vec<usize> = (2..=8).map(|j| idx(&DivClass::e(j))).collect();
        assert_eq!(conic_subtype(&comps), ConicSubtype::F1);
        comps[6] = idx(&(&b - &DivClass::e(8)));
        assert_eq!(conic_subtype(&comps), ConicSubtype::P1xP1);
        comps[5] = idx(&(&b - &DivClass::e(7)));
        assert_eq!(conic_subtype(&comps), ConicSubtype::F1);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&anticanonical_class()).unwrap();
        assert_eq!(d.mu, qi(1));
        assert_eq!(d.kind, Contraction::Birational);
        assert!(d.curves.is_empty());
        assert!(d.a_sorted.iter().all(Zero::is_zero));
        assert_eq!(d.s_a, qi(0));

        let d = decompose(&named::anticanonical_plus_e(1, 1, 2)).unwrap();
        assert_eq!(d.mu, qi(1));
        assert_eq!(d.kind, Contraction::Birational);
        assert_eq!(d.a_sorted[0], q(1, 2));
        assert!(d.a_sorted[1..].iter().all(Zero::is_zero));
        assert_eq!(d.curves, vec![idx(&DivClass::e(1))]);

        let a = named::anticanonical_plus(&vec![q(2, 3); 8]);
        let d = decompose(&a).unwrap();
        assert_eq!(d.mu, qi(1));
        assert_eq!(d.curves.len(), 8);
        assert!(d.a_sorted.iter().all(|c| *c == q(2, 3)));
        assert_eq!(d.s_a, q(14, 3));
        assert_eq!(d.reconstruct(), a);
    }

    #[test]
    fn decompose_conic_bundle() {
        // mu*A = -K + a*B + sum a_j e_j with B = h - e1, scaled by 3.
        let b = &DivClass::h() - &DivClass::e(1);
        let coeffs = [q(1, 2), q(1, 3), q(1, 4), qi(0), q(1, 5), q(1, 6), q(1, 7)];
        let mut mu_a = &anticanonical_class() + &b.scale(&q(2, 5));
        for (k, c) in coeffs.iter().enumerate() {
            mu_a = &mu_a + &DivClass::e(k + 2).scale(c);
        }
        let d = decompose(&mu_a.scale(&qi(3))).unwrap();
        assert_eq!(d.mu, q(1, 3));
        assert_eq!(d.kind, Contraction::ConicBundle { fiber: b.clone(), subtype: ConicSubtype::F1 });
        assert_eq!(d.a, q(2, 5));
        assert_eq!(d.a_sorted[..3], [q(1, 2), q(1, 3), q(1, 4)]);
        assert_eq!(d.a_sorted[7], qi(0));
        assert_eq!(d.reconstruct(), mu_a);
        assert_eq!(d.face.len(), 14);
        let fiber = d.fiber().unwrap();
        assert_eq!(fiber.dot(fiber), qi(0));
        assert_eq!(fiber.dot(&canonical_class()), qi(-2));
        for &c in &d.curves {
            assert_eq!(fiber.dot(&enumerate_curves()[c].cls), qi(0));
        }
    }

    #[test]
    fn p1xp1_needs_all_positive() {
        let b = &DivClass::h() - &DivClass::e(1);
        let flipped = &b - &DivClass::e(8);
        let mut mu_a = &anticanonical_class() + &b.scale(&q(1, 3));
        for j in 2..=7 {
            mu_a = &mu_a + &DivClass::e(j).scale(&q(1, 4));
        }
        let with_flip = &mu_a + &flipped.scale(&q(1, 5));
        let d = decompose(&with_flip).unwrap();
        assert_eq!(d.kind.label(), "ConicBundleP1xP1");
        assert_eq!(d.reconstruct(), with_flip);
        // Zero coefficient on the flipped fiber: the F1 labelling is preferred.
        let d = decompose(&mu_a).unwrap();
        assert_eq!(d.kind.label(), "ConicBundleF1");
    }
}
