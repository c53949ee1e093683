mod common;

use common::*;
use dp1kstab_core::alpha::{alpha_c_oracle, compare};
use dp1kstab_core::cone::{compute_mu, decompose, is_pseff, minimal_face, Contraction};
use dp1kstab_core::lattice::{
    canonical_class, enumerate_conics, enumerate_curves, enumerate_roots, is_minus_one_class, DivClass,
};
use dp1kstab_core::rational::{q, Q};
use dp1kstab_core::sample::{random_ample, rng, sample, Stratum};
use num_traits::Zero;
use std::collections::BTreeSet;

#[test]
fn curves_match_exhaustive_search() {
    let ours: BTreeSet<V> = enumerate_curves().iter().map(|c| c.ints).collect();
    assert_eq!(&ours, cached_curves());
    for x in cached_curves() {
        assert!(is_minus_one_class(&DivClass::from_ints(*x)));
    }
}

#[test]
fn roots_match_exhaustive_search() {
    let ours: BTreeSet<V> = enumerate_roots().iter().map(|r| r.ints).collect();
    assert_eq!(ours.len(), 240);
    assert_eq!(ours, exhaustive_roots());
}

#[test]
fn nef_rays_are_dual_to_curves() {
    let rays = nef_rays();
    assert_eq!(rays.len(), 19440);
    let curves = cached_curves();
    for r in rays.iter().step_by(97) {
        assert!(curves.iter().all(|c| dot(r, c) >= 0));
        assert!(curves.iter().filter(|c| dot(r, c) == 0).count() >= 8);
    }
    let conics: BTreeSet<V> = weyl_orbit([1, -1, 0, 0, 0, 0, 0, 0, 0]).into_iter().collect();
    let ours: BTreeSet<V> = enumerate_conics().iter().map(to_v).collect();
    assert_eq!(ours, conics);
}

#[test]
fn pseff_agrees_with_rays() {
    let mut r = rng(11);
    let curves = enumerate_curves();
    for k in 0..40 {
        // Mixtures of curves with signed coefficients land on both sides of the cone.
        let mut x = DivClass::zero();
        for j in 0..3 {
            let c = &curves[(k * 37 + j * 101) % 240];
            x = &x + &c.cls.scale(&q((k as i64 % 5) - 1 + j as i64, 3));
        }
        let x = &x + &random_ample(&mut r).scale(&q(k as i64 % 3, 4));
        assert_eq!(is_pseff(&x).0, ray_pseff(&x), "class {x}");
    }
    assert!(!ray_pseff(&canonical_class()));
}

#[test]
fn mu_agrees_with_rays() {
    let mut r = rng(12);
    for _ in 0..25 {
        let a = random_ample(&mut r);
        assert_eq!(compute_mu(&a).unwrap(), ray_mu(&a), "class {a}");
    }
}

#[test]
fn face_is_ray_orthogonal() {
    let mut r = rng(13);
    for s in Stratum::ALL {
        let x = sample(&mut r, s, 5);
        let d = decompose(&x.class).unwrap();
        let dk = &canonical_class() + &x.class.scale(&d.mu);
        let face = minimal_face(&dk).unwrap();
        assert_eq!(face, d.face);
        // Curves in the face are exactly those orthogonal to every ray orthogonal to K + mu*A.
        let (n, _) = scaled(&dk);
        let support: Vec<&V> = nef_rays()
            .iter()
            .filter(|ray| {
                let mut acc = &n[0] * ray[0];
                for k in 1..9 {
                    acc -= &n[k] * ray[k];
                }
                acc.is_zero()
            })
            .collect();
        let expected: Vec<usize> = (0..240)
            .filter(|&k| support.iter().all(|ray| dot(ray, &enumerate_curves()[k].ints) == 0))
            .collect();
        assert_eq!(face, expected, "stratum {}", s.label());
    }
}

#[test]
fn multiplicities_agree_with_rays() {
    let mut r = rng(14);
    for s in Stratum::ALL {
        let x = sample(&mut r, s, 3);
        let d = decompose(&x.class).unwrap();
        let mu_a = d.reconstruct();
        let o = alpha_c_oracle(&mu_a).unwrap();
        for (k, (_, m)) in o.multiplicities.iter().enumerate().step_by(7) {
            let pivot = if k == 0 { MINUS_K } else { enumerate_curves()[k - 1].ints };
            assert_eq!(*m, ray_max_mult(&mu_a, &pivot));
        }
        assert_eq!(o.value, ray_alpha_c(&mu_a));
    }
}

#[test]
fn spec_alpha_values_by_rays() {
    use dp1kstab_core::lattice::named::anticanonical_plus;
    assert_eq!(ray_alpha_c(&anticanonical_plus(&vec![q(2, 3); 8])), q(3, 8));
    assert_eq!(ray_alpha_c(&anticanonical_plus(&[q(9, 10), q(9, 10), q(9, 10)])), q(10, 19));
    let d = decompose(&anticanonical_plus(&[q(9, 10), q(9, 10), q(9, 10)])).unwrap();
    let r = compare(&d).unwrap();
    assert!(r.agree);
    assert_eq!(*r.closed_form(), q(10, 19));
}

#[test]
fn birational_coefficients_are_minus_pairings() {
    let mut r = rng(15);
    for s in [Stratum::BirHigh, Stratum::BirMid, Stratum::BirLow] {
        let x = sample(&mut r, s, 6);
        let d = decompose(&x.class).unwrap();
        assert_eq!(d.kind, Contraction::Birational);
        let dk = &canonical_class() + &x.class.scale(&d.mu);
        for (k, &c) in d.curves.iter().enumerate() {
            let pairing: Q = dk.dot(&enumerate_curves()[c].cls);
            assert_eq!(d.a_sorted[k], -pairing);
        }
    }
}
