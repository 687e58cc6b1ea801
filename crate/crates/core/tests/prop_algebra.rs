mod common;

use std::collections::BTreeSet;

use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use zfree_core::colstruct::{col_condition, is_uniform, matrix_order};
use zfree_core::fixper::{classify_sing_reg, is_fixed, same_fix_orbit, OrbitPattern, SingReg};
use zfree_core::oracle::abelian_step;
use zfree_core::*;

fn abelian_only(q: IntMatrix) -> Endomorphism {
    let m = q.rows();
    Endomorphism::type_i(q, IntMatrix::zeros(2, m), FreeEndo::identity(2)).unwrap()
}

fn random_element<R: Rng>(rng: &mut R, m: usize, n: usize) -> GroupElement {
    let a: Vec<_> = (0..m).map(|_| big(rng.gen_range(-5..=5))).collect();
    GroupElement::new(a, random_word(rng, n, 6))
}

/// Any type I or type II map, uc or not.
fn random_endo<R: Rng>(rng: &mut R) -> Endomorphism {
    let m = rng.gen_range(1..=3);
    let n = 2;
    let mut q = IntMatrix::zeros(m, m);
    let mut p = IntMatrix::zeros(n, m);
    for i in 0..m {
        for j in 0..m {
            q.set(i, j, rng.gen_range(-2..=2));
        }
    }
    for i in 0..n {
        for j in 0..m {
            if rng.gen_bool(0.3) {
                p.set(i, j, rng.gen_range(-2..=2));
            }
        }
    }
    if rng.gen_bool(0.5) {
        let phi = FreeEndo::new(n, vec![random_word(rng, n, 3), random_word(rng, n, 3)]).unwrap();
        Endomorphism::type_i(q, p, phi).unwrap()
    } else {
        let z = random_primitive(rng, n, 3);
        let mut ell: Vec<i64> = (0..m).map(|_| rng.gen_range(-1..=1)).collect();
        if ell.iter().all(|&x| x == 0) {
            ell[0] = 1;
        }
        let h = (0..n).map(|_| if rng.gen_bool(0.3) { rng.gen_range(-1..=1) } else { 0 }).collect();
        Endomorphism::type_ii(q, p, z, ell, h).unwrap()
    }
}

fn random_uc_type_i<R: Rng>(rng: &mut R) -> Endomorphism {
    let m = rng.gen_range(1..=3);
    let q = random_column_matrix(rng, m, &[-2, -1, 0, 1, 2]);
    let imgs = [["ab", "b"], ["b", "A"], ["aa", "b"], ["ab", "ba"], ["1", "1"], ["a", "b"]];
    let phi = free_endo(2, &imgs[rng.gen_range(0..imgs.len())]);
    Endomorphism::type_i(q, IntMatrix::zeros(2, m), phi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn closed_form_matches_repeated_steps(seed in any::<u64>(), r in 0u64..=32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let a = random_ext_vector(&mut rng, m, 5);
        let mut cur = a.clone();
        for _ in 0..r {
            cur = s.apply_ext(&cur).unwrap();
        }
        prop_assert_eq!(s.iterate_ext(&a, r).unwrap(), cur);
    }

    #[test]
    fn decomposition_reproduces_the_matrix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=5);
        let q = random_column_matrix(&mut rng, m, &[-3, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        prop_assert_eq!(s.to_matrix(), q);
        prop_assert!(s.horizon % (2 * s.cycle_lcm) == 0);
        prop_assert!(s.horizon >= 2 * m as u64 + 1);
        for i in 0..m {
            let t = s.landing_time[i] as u64;
            prop_assert!(s.horizon >= t);
            prop_assert_eq!(s.landing_index[i], s.psi_pow(i, t));
            prop_assert_eq!(&s.landing_product[i], &s.pi_product(i, t));
            prop_assert!(t % s.cycle_len(i) as u64 == 0 && t >= s.preperiod[i] as u64);
        }
    }

    #[test]
    fn uniform_order_divides_twice_the_cycle_lcm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=5);
        let q = random_uniform(&mut rng, m);
        let u = is_uniform(&q).unwrap();
        prop_assert_eq!(u.permutation_matrix().mul(&u.sign_matrix()), q.clone());
        let p = matrix_order(&u);
        let s = col_condition(&q).unwrap();
        prop_assert_eq!((2 * s.cycle_lcm) % p, 0);
        let fact: u64 = (1..=m as u64).product();
        prop_assert!(p <= (1u64 << m) * fact);
        let a = random_ext_vector(&mut rng, m, 20);
        prop_assert_eq!(s.iterate_ext(&a, p).unwrap(), a);
    }

    #[test]
    fn horizon_decides_abelian_periodicity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let e = abelian_only(q);
        let a = random_ext_vector(&mut rng, m, 3);
        let mut cur = a.clone();
        let mut brute = None;
        for r in 1..=(s.horizon + 2 * s.cycle_lcm) {
            cur = abelian_step(&e, &cur).unwrap();
            if cur == a { brute = Some(r); break; }
        }
        prop_assert_eq!(s.iterate_ext(&a, s.horizon).unwrap() == a, brute.is_some());
        prop_assert_eq!(decide_periodic_abelian(&s, &a).unwrap(), brute);
    }

    #[test]
    fn eventually_unit_reads_off_the_horizon(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let r = s.horizon;
        for i in 0..m {
            let landed = s.psi_pow(i, r);
            let unit = s.pi_product(landed, r).abs() == 1.into();
            prop_assert_eq!(s.eventually_unit(i), unit);
        }
    }

    #[test]
    fn apply_is_a_homomorphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_endo(&mut rng);
        let x = random_element(&mut rng, e.m(), e.n());
        let y = random_element(&mut rng, e.m(), e.n());
        let lhs = e.apply(&x.mul(&y)).unwrap();
        let rhs = e.apply(&x).unwrap().mul(&e.apply(&y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn completion_extends_apply(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = if rng.gen_bool(0.5) { random_uc_type_i(&mut rng) } else { random_uc_type_ii(&mut rng, 3, &[-2, -1, 0, 1, 2]) };
        prop_assert!(e.is_uc());
        let x = random_element(&mut rng, e.m(), e.n());
        prop_assert_eq!(e.apply_completion(&x.to_point()).unwrap(), e.apply(&x).unwrap().to_point());
    }

    #[test]
    fn witnesses_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_endo(&mut rng);
        let r = e.check_uc();
        prop_assert_eq!(r.is_uc, r.failures.is_empty());
        if let Some(w) = &r.witness {
            prop_assert!(!r.is_uc);
            let d = product_dist(&w.x.to_point(), &w.y.to_point()).unwrap();
            prop_assert!(d < Dyadic::neg_pow(10));
            let fx = e.apply(&w.x).unwrap().to_point();
            let fy = e.apply(&w.y).unwrap().to_point();
            prop_assert!(product_dist(&fx, &fy).unwrap().is_one());
        } else {
            prop_assert!(r.is_uc);
        }
    }

    #[test]
    fn uc_maps_have_a_modulus(seed in any::<u64>()) {
        // for automorphism-type free parts, pairs agreeing on 24 letters and
        // all abelian entries have images that still agree
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=2);
        let q = random_column_matrix(&mut rng, m, &[-1, 1, 2]);
        let phi = free_endo(2, &[["ab", "b"], ["b", "A"], ["a", "ba"]][rng.gen_range(0..3)]);
        let e = Endomorphism::type_i(q, IntMatrix::zeros(2, m), phi).unwrap();
        let x = GroupElement::new(vec![big(3); m], reduce_prefix(&mut rng, 30));
        let tail = random_word(&mut rng, 2, 6);
        let y = GroupElement::new(vec![big(3); m], x.free.prefix(24).mul(&tail));
        prop_assume!(x.free.common_prefix(&y.free) >= 24);
        let d = product_dist(&e.apply(&x).unwrap().to_point(), &e.apply(&y).unwrap().to_point()).unwrap();
        prop_assert!(d <= Dyadic::neg_pow(4), "image distance {}", d);
    }

    #[test]
    fn fix_basis_is_fixed_and_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let basis = fix_basis_abelian(&s).basis;
        let mut supports = BTreeSet::new();
        for b in &basis {
            let v = ExtVector::from_bigints(b);
            prop_assert!(is_fixed(&s, &v).unwrap());
            let lead = b.iter().position(|x| x != &0.into()).unwrap();
            prop_assert!(supports.insert(lead));
            for o in &basis {
                if o != b {
                    prop_assert!(o[lead] == 0.into());
                }
            }
        }
    }

    #[test]
    fn pattern_counts_against_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let e = abelian_only(q);
        let values: Vec<ExtInt> = (-2..=2).map(ExtInt::from).chain([ExtInt::PosInf, ExtInt::NegInf]).collect();
        let mut fix = BTreeSet::new();
        let mut per = BTreeSet::new();
        let mut idx = vec![0usize; m];
        loop {
            let a = ExtVector(idx.iter().map(|&i| values[i].clone()).collect());
            let mut cur = a.clone();
            for r in 1..=(s.horizon + 2 * s.cycle_lcm) {
                cur = abelian_step(&e, &cur).unwrap();
                if cur == a {
                    per.insert(OrbitPattern::of(&a).to_string());
                    if r == 1 { fix.insert(OrbitPattern::of(&a).to_string()); }
                    break;
                }
            }
            let mut i = 0;
            while i < m && idx[i] + 1 == values.len() { idx[i] = 0; i += 1; }
            if i == m { break; }
            idx[i] += 1;
        }
        let got_fix: BTreeSet<String> = fix_ext_patterns(&s).patterns.iter().map(|p| p.to_string()).collect();
        let got_per: BTreeSet<String> = per_ext_patterns(&s).patterns.iter().map(|p| p.to_string()).collect();
        prop_assert_eq!(got_fix.clone(), fix);
        prop_assert_eq!(got_per, per);
        prop_assert!(got_fix.len() <= 3usize.pow(m as u32));
    }

    #[test]
    fn pattern_representatives_split_orbits(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let q = random_column_matrix(&mut rng, m, &[-2, -1, 0, 1, 2]);
        let s = col_condition(&q).unwrap();
        let rep = fix_ext_patterns(&s);
        for (i, a) in rep.representatives.iter().enumerate() {
            prop_assert!(same_fix_orbit(&s, a, a).unwrap());
            for b in &rep.representatives[i + 1..] {
                prop_assert!(!same_fix_orbit(&s, a, b).unwrap());
            }
            // a fixed translate stays in the orbit
            if let Some(v) = fix_basis_abelian(&s).basis.first() {
                let shifted = ExtVector(a.0.iter().zip(v).map(|(x, y)| match x {
                    ExtInt::Fin(f) => ExtInt::Fin(f + y),
                    inf => inf.clone(),
                }).collect());
                if is_fixed(&s, &shifted).unwrap() {
                    prop_assert!(same_fix_orbit(&s, a, &shifted).unwrap());
                }
            }
        }
    }

    #[test]
    fn uniform_fixed_points_are_singular(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let q = random_uniform(&mut rng, m);
        let s = col_condition(&q).unwrap();
        for a in fix_ext_patterns(&s).representatives {
            prop_assert_eq!(classify_sing_reg(&s, &a).unwrap(), SingReg::Singular);
        }
    }
}

fn reduce_prefix<R: Rng>(rng: &mut R, len: usize) -> Word {
    zfree_core::words::reduce(random_letters(rng, 2, len))
}
