use dp1kstab_core::alpha::{branch_formulas, compare, compare_with, Branch, FormulaShift, OracleOptions};
use dp1kstab_core::cone::{compute_mu, decompose, decompose_with, is_nef_with, Contraction};
use dp1kstab_core::exec::Exec;
use dp1kstab_core::kstab::{nef_test_divisor, slope_nu, verdict};
use dp1kstab_core::lattice::{apply_word, canonical_class};
use dp1kstab_core::rational::{q, qi, Q};
use dp1kstab_core::sample::{random_ample, random_word, rng, sample, Stratum};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn stratum() -> impl Strategy<Value = Stratum> {
    prop::sample::select(Stratum::ALL.to_vec())
}

fn unit() -> impl Strategy<Value = Q> {
    (1i64..=24).prop_flat_map(|d| (0..d).prop_map(move |n| q(n, d)))
}

fn positive_scale() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reconstruction_and_bounds(seed in any::<u64>(), s in stratum()) {
        let x = sample(&mut rng(seed), s, 8);
        let d = decompose(&x.class).unwrap();
        prop_assert_eq!(d.reconstruct(), x.class.scale(&d.mu));
        prop_assert!(d.a_sorted.iter().all(|c| !c.is_negative() && *c < Q::one()));
        prop_assert!(d.a_sorted.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(d.a.is_positive(), d.kind.is_conic());
        prop_assert_eq!(&d.s_a, &d.a_sorted[1..].iter().sum::<Q>());
    }

    #[test]
    fn homogeneity(seed in any::<u64>(), s in stratum(), t in positive_scale()) {
        let x = sample(&mut rng(seed), s, 4);
        let d = decompose(&x.class).unwrap();
        let dt = decompose(&x.class.scale(&t)).unwrap();
        prop_assert_eq!(&dt.mu, &(&d.mu / &t));
        prop_assert_eq!(&dt.face, &d.face);
        prop_assert_eq!(&dt.kind, &d.kind);
        prop_assert_eq!(&dt.a_sorted, &d.a_sorted);
        prop_assert_eq!(&dt.a, &d.a);
        prop_assert_eq!(&dt.s_a, &d.s_a);
    }

    #[test]
    fn weyl_equivariance(seed in any::<u64>(), s in stratum()) {
        let mut r = rng(seed);
        let x = sample(&mut r, s, 4);
        let w = random_word(&mut r, 10);
        let d = decompose(&x.class).unwrap();
        let dw = decompose(&apply_word(&x.class, &w)).unwrap();
        prop_assert_eq!(&dw.mu, &d.mu);
        prop_assert_eq!(dw.kind.label(), d.kind.label());
        prop_assert_eq!(&dw.a_sorted, &d.a_sorted);
        prop_assert_eq!(&dw.a, &d.a);
        prop_assert_eq!(&dw.s_a, &d.s_a);
    }

    #[test]
    fn mu_homogeneous_on_raw_classes(seed in any::<u64>(), t in positive_scale()) {
        let a = random_ample(&mut rng(seed));
        prop_assert_eq!(compute_mu(&a.scale(&t)).unwrap(), compute_mu(&a).unwrap() / &t);
        prop_assert_eq!(slope_nu(&a.scale(&t)).unwrap(), slope_nu(&a).unwrap() / &t);
        prop_assert_eq!(nef_test_divisor(&a.scale(&t)).unwrap(), nef_test_divisor(&a).unwrap());
    }

    #[test]
    fn branch_continuity_symbolic(a1 in unit(), a in unit()) {
        // s_A = 4: the three-candidate formula meets 1/(2+a_1+a).
        let three_at_4 = qi(3) / (qi(2) + qi(3) * &a1 + qi(4) + qi(3) * &a);
        prop_assert_eq!(three_at_4, qi(1) / (qi(2) + &a1 + &a));
        // s_A = 1: it meets 2/(1+2a_1+s_A+2a).
        let three_at_1 = qi(3) / (qi(2) + qi(3) * &a1 + qi(1) + qi(3) * &a);
        prop_assert_eq!(three_at_1, qi(2) / (qi(1) + qi(2) * &a1 + qi(1) + qi(2) * &a));
    }

    #[test]
    fn closed_form_continuous_at_thresholds(a1 in unit(), a in unit(), k in 1i64..=6) {
        // Seven equal lower coefficients summing to the threshold, a_1 raised to stay largest.
        for threshold in [qi(4), qi(1)] {
            let c = &threshold / qi(7);
            let a1 = (&a1).max(&c).clone();
            let mut at = vec![a1.clone()];
            at.extend(std::iter::repeat_n(c.clone(), 7));
            let eps = q(1, 10i64.pow(k as u32)) / qi(7);
            let mut above = vec![a1.clone()];
            above.extend(std::iter::repeat_n(&c + &eps, 7));
            let f0 = branch_formulas(&at, &a).value;
            let f1 = branch_formulas(&above, &a).value;
            // Lipschitz in s_A with constant at most 3 on this range.
            prop_assert!((&f1 - &f0).abs() <= qi(3) * qi(7) * &eps);
        }
    }

    #[test]
    fn monotone_in_a1(coeffs in prop::collection::vec(unit(), 8), bump in unit()) {
        let mut c = coeffs.clone();
        c.sort_by(|x, y| y.cmp(x));
        let raised = (&c[0] + (qi(1) - &c[0]) * &bump / qi(2)).min(q(99, 100)).max(c[0].clone());
        let mut up = c.clone();
        up[0] = raised;
        let before = branch_formulas(&c, &Q::zero());
        let after = branch_formulas(&up, &Q::zero());
        prop_assert_eq!(std::mem::discriminant(&before.branch), std::mem::discriminant(&after.branch));
        prop_assert!(after.value <= before.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_matches_oracle_off_p1xp1(seed in any::<u64>(), s in prop::sample::select(vec![
        Stratum::BirHigh, Stratum::BirMid, Stratum::BirLow, Stratum::ConicF1,
    ])) {
        let x = sample(&mut rng(seed), s, 4);
        let d = decompose(&x.class).unwrap();
        let r = compare(&d).unwrap();
        prop_assert!(r.agree, "closed {} oracle {}", r.closed_form(), r.oracle_value());
        prop_assert!(r.bound_off_face && r.bound_overall);
        prop_assert!(r.oracle_value().is_positive() && *r.oracle_value() <= Q::one());
        if let Branch::MidS(_) = r.closed.form.branch {
            prop_assert!(r.closed.form.candidates.is_some());
        }
    }

    #[test]
    fn exec_modes_agree(seed in any::<u64>(), s in stratum()) {
        let x = sample(&mut rng(seed), s, 4);
        let seq = decompose_with(&x.class, Exec::Sequential).unwrap();
        let par = decompose_with(&x.class, Exec::Parallel).unwrap();
        prop_assert_eq!(&seq, &par);
        let o = |exec| compare_with(&seq, OracleOptions { extended: false, exec }, &FormulaShift::default()).unwrap();
        prop_assert_eq!(o(Exec::Sequential), o(Exec::Parallel));
        let t = &canonical_class() + &x.class;
        prop_assert_eq!(is_nef_with(&t, Exec::Sequential), is_nef_with(&t, Exec::Parallel));
    }

    #[test]
    fn verdict_invariance(seed in any::<u64>(), s in stratum()) {
        let mut r = rng(seed);
        let x = sample(&mut r, s, 4);
        let v = verdict(&x.class).unwrap();
        let moved = apply_word(&x.class, &random_word(&mut r, 10)).scale(&q(7, 5));
        let vm = verdict(&moved).unwrap();
        prop_assert_eq!(v.outcome, vm.outcome);
        prop_assert_eq!(&vm.nu, &(&v.nu * q(5, 7)));
        prop_assert_eq!(&vm.alpha.oracle.value, &v.alpha.oracle.value);
        let conic = matches!(v.decomposition.kind, Contraction::ConicBundle { .. });
        prop_assert_eq!(conic, v.decomposition.a.is_positive());
    }
}
