mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use zfree_core::extmath::{ext_add, ext_mul, int_lcp, PrefixLen};
use zfree_core::words::{
    apply_free, apply_free_boundary, canonicalize_boundary, cyclic_core, dist, is_proper_power,
    lcp_len, primitive_root, reduce, z_power,
};
use zfree_core::*;

fn letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    letters(rank, max).prop_map(reduce)
}

fn nonempty_word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    word(rank, max).prop_filter("nonempty", |w| !w.is_empty())
}

fn ext_int() -> impl Strategy<Value = ExtInt> {
    prop_oneof![
        Just(ExtInt::PosInf),
        Just(ExtInt::NegInf),
        (-50i64..=50).prop_map(ExtInt::from),
    ]
}

fn nielsen_automorphism(rng: &mut ChaCha8Rng) -> FreeEndo {
    use rand::Rng;
    let moves = [
        ["b", "a"],
        ["A", "b"],
        ["ab", "b"],
        ["a", "ba"],
        ["Ba", "b"],
        ["a", "Ab"],
    ];
    let mut phi = FreeEndo::identity(2);
    for _ in 0..rng.gen_range(1..=3) {
        phi = phi.compose(&free_endo(2, &moves[rng.gen_range(0..moves.len())]));
    }
    phi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_idempotent_and_shortening(raw in letters(3, 20)) {
        let w = reduce(raw.clone());
        prop_assert!(w.len() <= raw.len());
        prop_assert_eq!(reduce(w.letters().iter().copied()), w.clone());
        prop_assert!(w.mul(&w.inverse()).is_empty());
        let text = w.to_string();
        prop_assert_eq!(text.parse::<Word>().unwrap(), w);
    }

    #[test]
    fn multiplication_is_associative(u in word(2, 8), v in word(2, 8), w in word(2, 8)) {
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
    }

    #[test]
    fn cyclic_core_roundtrip(z in nonempty_word(3, 12)) {
        let (w, core) = cyclic_core(&z).unwrap();
        prop_assert!(core.is_cyclically_reduced() && !core.is_empty());
        prop_assert_eq!(w.mul(&core).mul(&w.inverse()), z);
    }

    #[test]
    fn primitive_root_roundtrip(z in nonempty_word(2, 6), k in 1i64..4) {
        let zk = z.pow(k);
        let (root, e) = primitive_root(&zk).unwrap();
        prop_assert_eq!(root.pow(e as i64), zk.clone());
        prop_assert!(!is_proper_power(&root));
        prop_assert_eq!(is_proper_power(&zk), e > 1);
    }

    #[test]
    fn powers_converge_to_the_infinite_power(z in nonempty_word(2, 5), k in 1i64..6) {
        prop_assume!(!is_proper_power(&z));
        let (w, core) = cyclic_core(&z).unwrap();
        let plus = z_power(&z, &ExtInt::PosInf).unwrap();
        let fin = CompletionWord::Finite(z.pow(k));
        let want = w.len() + k as usize * core.len();
        prop_assert_eq!(dist(&fin, &plus), Dyadic::neg_pow(want as u64));
    }

    #[test]
    fn boundary_image_is_the_limit_of_prefix_images(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = nielsen_automorphism(&mut rng);
        let CompletionWord::Infinite(x) = random_boundary(&mut rng, 2) else { unreachable!() };
        let image = CompletionWord::Infinite(apply_free_boundary(&phi, &x).unwrap());
        let mut last = 0usize;
        for l in [16usize, 64, 256] {
            let approx = CompletionWord::Finite(apply_free(&phi, &x.prefix(l)));
            let PrefixLen::Finite(k) = lcp_len(&approx, &image) else { unreachable!() };
            let k: usize = k.try_into().unwrap();
            prop_assert!(k >= last);
            last = k;
        }
        prop_assert!(last >= 32, "agreement {}", last);
    }

    #[test]
    fn canonical_form_is_a_congruence(head in word(2, 5), period in nonempty_word(2, 4), j in 0usize..4) {
        prop_assume!(period.is_cyclically_reduced());
        let b = canonicalize_boundary(&head, &period).unwrap();
        // move j letters of the period into the head, or double the period
        let moved = head.mul(&period.prefix(j.min(period.len())));
        let rotated = {
            let j = j.min(period.len());
            let l = period.letters();
            reduce(l[j..].iter().chain(&l[..j]).copied())
        };
        prop_assert_eq!(canonicalize_boundary(&moved, &rotated).unwrap(), b.clone());
        prop_assert_eq!(canonicalize_boundary(&head, &period.pow(2)).unwrap(), b.clone());
        // the canonical stream is the reduced stream of head·period^K
        let k = head.len() + 8;
        let raw = head.mul(&period.pow(k as i64));
        let stable = raw.len().saturating_sub(period.len() + head.len());
        let cap = stable.min(4 * (head.len() + period.len()));
        let canon: Vec<Letter> = b.stream().take(cap).collect();
        prop_assert_eq!(&canon[..], &raw.letters()[..cap]);
        let text = b.to_string();
        prop_assert_eq!(text.parse::<BoundaryWord>().unwrap(), b);
    }

    #[test]
    fn word_metric_is_an_ultrametric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_completion(&mut rng, 2);
        let y = random_completion(&mut rng, 2);
        let z = random_completion(&mut rng, 2);
        let (xy, yz, xz) = (dist(&x, &y), dist(&y, &z), dist(&x, &z));
        prop_assert!(xz <= xy.clone().max(yz.clone()));
        prop_assert_eq!(xy.clone(), dist(&y, &x));
        prop_assert_eq!(xy.is_zero(), x == y);
    }

    #[test]
    fn automorphisms_have_unit_determinant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = nielsen_automorphism(&mut rng);
        prop_assert!(phi.is_automorphism() && phi.is_injective());
        let d = phi.abelian_determinant();
        prop_assert!(d == 1.into() || d == (-1).into());
    }

    #[test]
    fn free_images_are_homomorphic(seed in any::<u64>(), u in word(2, 8), v in word(2, 8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = FreeEndo::new(2, vec![random_word(&mut rng, 2, 4), random_word(&mut rng, 2, 4)]).unwrap();
        prop_assert_eq!(apply_free(&phi, &u.mul(&v)), apply_free(&phi, &u).mul(&apply_free(&phi, &v)));
        if let Some(w) = phi.kernel_witness() {
            prop_assert!(!w.is_empty() && apply_free(&phi, w).is_empty());
        }
    }

    #[test]
    fn scalar_laws(l in -5i64..=5, k in -5i64..=5, x in ext_int(), y in -50i64..=50, w in -50i64..=50) {
        let (lb, kb) = (big(l), big(k));
        prop_assert_eq!(ext_mul(&lb, &ext_mul(&kb, &x)), ext_mul(&(&lb * &kb), &x));
        let (fy, fw) = (ExtInt::from(y), ExtInt::from(w));
        prop_assert_eq!(
            ext_mul(&lb, &ext_add(&fy, &fw).unwrap()),
            ext_add(&ext_mul(&lb, &fy), &ext_mul(&lb, &fw)).unwrap()
        );
        if x.is_infinite() && l != 0 {
            prop_assert_eq!(ext_mul(&lb, &x).signum(), x.signum() * l.signum() as i8);
        }
        if l == 0 {
            prop_assert_eq!(ext_mul(&lb, &x), ExtInt::zero());
        }
    }

    #[test]
    fn int_lcp_laws(x in ext_int(), y in ext_int()) {
        prop_assert_eq!(int_lcp(&x, &y), int_lcp(&y, &x));
        prop_assert_eq!(int_lcp(&x, &y) == PrefixLen::Infinite, x == y);
        prop_assert_eq!(x.to_string().parse::<ExtInt>().unwrap(), x);
    }

    #[test]
    fn finite_vectors_are_isolated(a in prop::collection::vec(-3i64..=3, 1..=2)) {
        let av = ExtVector::from_ints(&a);
        let bound = a.iter().map(|x| x.unsigned_abs()).max().unwrap();
        let m = a.len();
        let mut b = vec![-6i64; m];
        loop {
            if b != a {
                let dd = av.dist(&ExtVector::from_ints(&b)).unwrap();
                prop_assert!(dd >= Dyadic::neg_pow(bound));
            }
            let mut i = 0;
            while i < m && b[i] == 6 { b[i] = -6; i += 1; }
            if i == m { break; }
            b[i] += 1;
        }
    }
}
