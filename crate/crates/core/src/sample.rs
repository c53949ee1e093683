//! Seeded random ample classes, stratified by contraction type and branch.
//!
//! Each stratum starts from a normal form `-K + sum a_i E_i + a*B` with known
//! coefficients, then moves it by a random Weyl word and a random scale.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::is_ample;
use crate::lattice::{anticanonical_class, apply_word, enumerate_curves, enumerate_roots, DivClass, Root};
use crate::rational::{q, qi, Q};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Stratum {
    /// Birational, `s_A > 4`.
    BirHigh,
    /// Birational, `1 < s_A <= 4`.
    BirMid,
    /// Birational, `s_A <= 1`.
    BirLow,
    ConicF1,
    ConicP1xP1,
}

impl Stratum {
    pub const ALL: [Stratum; 5] = [Stratum::BirHigh, Stratum::BirMid, Stratum::BirLow, Stratum::ConicF1, Stratum::ConicP1xP1];

    pub fn label(&self) -> &'static str {
        match self {
            Stratum::BirHigh => "birational/high",
            Stratum::BirMid => "birational/mid",
            Stratum::BirLow => "birational/low",
            Stratum::ConicF1 => "conic/F1",
            Stratum::ConicP1xP1 => "conic/P1xP1",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub stratum: Stratum,
    /// `-K + sum a_i E_i + a*B` in the standard frame, so `mu = 1` there.
    pub normal_form: DivClass,
    /// Coefficients used to build the normal form, unsorted.
    pub coeffs: Vec<Q>,
    pub fiber_coeff: Q,
    pub word: Vec<Root>,
    pub scale: Q,
    /// `scale * word(normal_form)`.
    pub class: DivClass,
}

/// A rational in `[0, 1)` with denominator at most `max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Q {
    let d = rng.random_range(1..=max_den);
    q(rng.random_range(0..d), d)
}

/// A rational in `(0, 1)`.
pub fn open_unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Q {
    let d = rng.random_range(2..=max_den);
    q(rng.random_range(1..d), d)
}

/// Positive rational `p/q` with `1 <= p, q <= 9`.
pub fn random_scale<R: Rng>(rng: &mut R) -> Q {
    q(rng.random_range(1..=9), rng.random_range(1..=9))
}

/// Uniformly chosen roots, length in `0..=max_len`.
pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Root> {
    let roots = enumerate_roots();
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| roots.choose(rng).expect("roots").clone()).collect()
}

fn branch_of(coeffs: &[Q]) -> Stratum {
    let mut c = coeffs.to_vec();
    c.sort_by(|x, y| y.cmp(x));
    let s: Q = c.iter().skip(1).sum();
    if s > qi(4) {
        Stratum::BirHigh
    } else if s > qi(1) {
        Stratum::BirMid
    } else {
        Stratum::BirLow
    }
}

fn birational_coeffs<R: Rng>(rng: &mut R, target: Stratum) -> Vec<Q> {
    loop {
        let c: Vec<Q> = match target {
            // Bias the draw toward the target range to keep rejection cheap.
            Stratum::BirHigh => (0..8).map(|_| q(1, 2) + unit_rational(rng, 12) / qi(2)).collect(),
            Stratum::BirLow => (0..8).map(|_| unit_rational(rng, 12) / qi(rng.random_range(1..=8))).collect(),
            _ => (0..8).map(|_| unit_rational(rng, 12)).collect(),
        };
        if branch_of(&c) == target {
            return c;
        }
    }
}

/// `-K + sum a_i e_i`.
pub fn birational_normal_form(coeffs: &[Q]) -> DivClass {
    let mut a = anticanonical_class();
    for (i, c) in coeffs.iter().enumerate() {
        a = &a + &DivClass::e(i + 1).scale(c);
    }
    a
}

/// `-K + a*B + sum a_j E_j` with `B = h - e1`, `E_j = e_j` for `j = 2..8`,
/// except `E_8 = B - e8` when `flip_last`.
pub fn conic_normal_form(coeffs: &[Q], a: &Q, flip_last: bool) -> DivClass {
    let b = &DivClass::h() - &DivClass::e(1);
    let mut x = &anticanonical_class() + &b.scale(a);
    for (k, c) in coeffs.iter().enumerate() {
        let j = k + 2;
        let e = if flip_last && j == 8 { &b - &DivClass::e(8) } else { DivClass::e(j) };
        x = &x + &e.scale(c);
    }
    x
}

pub fn sample_normal_form<R: Rng>(rng: &mut R, stratum: Stratum) -> (DivClass, Vec<Q>, Q) {
    match stratum {
        Stratum::BirHigh | Stratum::BirMid | Stratum::BirLow => {
            let c = birational_coeffs(rng, stratum);
            (birational_normal_form(&c), c, Q::from_integer(0.into()))
        }
        Stratum::ConicF1 => {
            let c: Vec<Q> = (0..7).map(|_| unit_rational(rng, 12)).collect();
            let a = open_unit_rational(rng, 12) * qi(rng.random_range(1..=3));
            (conic_normal_form(&c, &a, false), c, a)
        }
        Stratum::ConicP1xP1 => {
            let c: Vec<Q> = (0..7).map(|_| open_unit_rational(rng, 12)).collect();
            let a = open_unit_rational(rng, 12) * qi(rng.random_range(1..=3));
            (conic_normal_form(&c, &a, true), c, a)
        }
    }
}

/// A stratum sample in a random Weyl frame (word length up to `max_word`) at a random scale.
pub fn sample<R: Rng>(rng: &mut R, stratum: Stratum, max_word: usize) -> Sample {
    let (normal_form, coeffs, fiber_coeff) = sample_normal_form(rng, stratum);
    let word = random_word(rng, max_word);
    let scale = random_scale(rng);
    let class = apply_word(&normal_form, &word).scale(&scale);
    Sample { stratum, normal_form, coeffs, fiber_coeff, word, scale, class }
}

/// `-K` plus a few random (-1)-curves with small coefficients, then moved and
/// scaled; rejected until ample. Not tied to any stratum.
pub fn random_ample<R: Rng>(rng: &mut R) -> DivClass {
    let curves = enumerate_curves();
    loop {
        let mut a = anticanonical_class();
        for _ in 0..rng.random_range(1..=6) {
            let c = curves.choose(rng).expect("curves");
            a = &a + &c.cls.scale(&(unit_rational(rng, 10) / qi(2)));
        }
        if rng.random_bool(0.3) {
            let b = &DivClass::h() - &DivClass::e(rng.random_range(1..=8));
            a = &a + &b.scale(&unit_rational(rng, 10));
        }
        let a = apply_word(&a, &random_word(rng, 6)).scale(&random_scale(rng));
        if is_ample(&a).holds {
            return a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{decompose, ConicSubtype, Contraction};

    #[test]
    fn strata_decompose_as_built() {
        let mut r = rng(7);
        for s in Stratum::ALL {
            let x = sample(&mut r, s, 4);
            assert!(is_ample(&x.class).holds);
            let d = decompose(&x.class).unwrap();
            assert_eq!(d.mu, x.scale.recip());
            let mut want = x.coeffs.clone();
            want.sort_by(|a, b| b.cmp(a));
            want.resize(8, Q::from_integer(0.into()));
            match s {
                Stratum::ConicF1 => {
                    assert!(matches!(d.kind, Contraction::ConicBundle { subtype: ConicSubtype::F1, .. }))
                }
                Stratum::ConicP1xP1 => {
                    assert!(matches!(d.kind, Contraction::ConicBundle { subtype: ConicSubtype::P1xP1, .. }))
                }
                _ => assert_eq!(d.kind, Contraction::Birational),
            }
            assert_eq!(d.a_sorted, want);
            assert_eq!(d.a, x.fiber_coeff);
        }
    }

    #[test]
    fn seeded_is_deterministic() {
        let a = random_ample(&mut rng(3));
        let b = random_ample(&mut rng(3));
        assert_eq!(a, b);
    }
}
