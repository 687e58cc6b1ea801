//! Fixtures shared by the benchmarks.

use zfree_core::{Endomorphism, FreeEndo, IntMatrix, Point};

/// Type II map on `Z^4 × F_3` with a 3-cycle and a self-loop in its column structure.
pub fn type_ii_fixture() -> Endomorphism {
    let q = IntMatrix::square(4, &[0, 2, 0, 0, 0, 0, -1, 0, 1, 0, 0, 0, 0, 0, 0, -1]);
    Endomorphism::type_ii(q, IntMatrix::zeros(3, 4), "abCbA".parse().unwrap(), vec![0, 1, 0, 0], vec![0; 3]).unwrap()
}

pub fn type_ii_points() -> Vec<Point> {
    ["[0,0,0,0] 1", "[1,2,3,4] ab", "[+inf,-inf,2,0] (c)^inf", "[+inf,+inf,+inf,+inf] a(abCbA)^inf", "[0,5,-inf,1] cc"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

/// Composite of Nielsen moves on `F_3`, applied `k` times.
pub fn nielsen_power(k: usize) -> FreeEndo {
    let step = FreeEndo::from_strs(3, &["ab", "bc", "c"])
        .unwrap()
        .compose(&FreeEndo::from_strs(3, &["b", "c", "a"]).unwrap());
    let mut phi = FreeEndo::identity(3);
    for _ in 0..k {
        phi = phi.compose(&step);
    }
    phi
}
