use proptest::prelude::*;
use zfree_cli::commands::{analyze, Probe};
use zfree_cli::descriptor::Descriptor;
use zfree_cli::report::Format;
use zfree_core::{Endomorphism, FreeEndo, IntMatrix, Word};

fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
    let letter = prop_oneof![Just('a'), Just('b'), Just('A'), Just('B'), Just('c'), Just('C')];
    prop::collection::vec(letter, 0..=max).prop_map(move |v| {
        let keep: String = v.into_iter().filter(|c| (c.to_ascii_lowercase() as u8 - b'a') < rank as u8).collect();
        keep.parse().unwrap()
    })
}

fn column_matrix(m: usize) -> impl Strategy<Value = IntMatrix> {
    (prop::collection::vec(0..m, m), prop::collection::vec(-2i64..=2, m)).prop_map(move |(rows, vals)| {
        let mut q = IntMatrix::zeros(m, m);
        for (j, (i, v)) in rows.into_iter().zip(vals).enumerate() {
            q.set(i, j, v);
        }
        q
    })
}

fn endomorphism() -> impl Strategy<Value = Endomorphism> {
    let type_i = (1usize..=3, 2usize..=3).prop_flat_map(|(m, n)| {
        (column_matrix(m), prop::collection::vec(word(n, 4), n))
            .prop_map(move |(q, imgs)| Endomorphism::type_i(q, IntMatrix::zeros(n, m), FreeEndo::new(n, imgs).unwrap()).unwrap())
    });
    let type_ii = (1usize..=3, 2usize..=3).prop_flat_map(|(m, n)| {
        (column_matrix(m), word(n, 4), prop::collection::vec(-2i64..=2, m), prop::collection::vec(-1i64..=1, n))
            .prop_filter_map("valid type II", move |(q, z, ell, h)| {
                Endomorphism::type_ii(q, IntMatrix::zeros(n, m), z, ell, h).ok()
            })
    });
    prop_oneof![type_i, type_ii]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptors_roundtrip(e in endomorphism()) {
        let d = Descriptor::of(&e);
        let text = d.to_toml();
        let back = Descriptor::parse(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(back.build().unwrap(), e);
    }

    #[test]
    fn json_reports_roundtrip(e in endomorphism()) {
        let probe = Probe { samples: 20, horizon: 16, ..Probe::default() };
        for r in analyze(&e, &[], probe).unwrap() {
            let line = r.render(Format::Json);
            let v: serde_json::Value = serde_json::from_str(&line).unwrap();
            prop_assert_eq!(&v, &r.to_json());
            prop_assert_eq!(v.to_string(), line);
        }
    }
}
