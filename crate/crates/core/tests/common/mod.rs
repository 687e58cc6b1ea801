#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use zfree_core::words::{canonicalize_boundary, is_proper_power, reduce, z_power};
use zfree_core::{
    CompletionWord, Endomorphism, ExtInt, ExtVector, FreeEndo, IntMatrix, Letter, Point, Word,
};

pub fn random_letters<R: Rng>(rng: &mut R, rank: usize, len: usize) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    while out.len() < len {
        let l = Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5));
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    out
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    reduce(random_letters(rng, rank, len))
}

pub fn random_boundary<R: Rng>(rng: &mut R, rank: usize) -> CompletionWord {
    loop {
        let head = random_word(rng, rank, 4);
        let plen = rng.gen_range(1..=3);
        let period = reduce(random_letters(rng, rank, plen));
        if let Ok(b) = canonicalize_boundary(&head, &period) {
            return CompletionWord::Infinite(b);
        }
    }
}

pub fn random_completion<R: Rng>(rng: &mut R, rank: usize) -> CompletionWord {
    if rng.gen_bool(0.5) {
        CompletionWord::Finite(random_word(rng, rank, 6))
    } else {
        random_boundary(rng, rank)
    }
}

pub fn random_ext<R: Rng>(rng: &mut R, bound: i64) -> ExtInt {
    match rng.gen_range(0..6) {
        0 => ExtInt::PosInf,
        1 => ExtInt::NegInf,
        _ => ExtInt::from(rng.gen_range(-bound..=bound)),
    }
}

pub fn random_ext_vector<R: Rng>(rng: &mut R, m: usize, bound: i64) -> ExtVector {
    ExtVector((0..m).map(|_| random_ext(rng, bound)).collect())
}

pub fn random_uniform<R: Rng>(rng: &mut R, m: usize) -> IntMatrix {
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let mut q = IntMatrix::zeros(m, m);
    for (i, &j) in perm.iter().enumerate() {
        q.set(i, j, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    q
}

/// Random matrix satisfying the column condition with multipliers in `lams`.
pub fn random_column_matrix<R: Rng>(rng: &mut R, m: usize, lams: &[i64]) -> IntMatrix {
    let mut q = IntMatrix::zeros(m, m);
    for j in 0..m {
        let lam = *lams.choose(rng).unwrap();
        q.set(rng.gen_range(0..m), j, lam);
    }
    q
}

pub fn random_primitive<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    loop {
        let w = random_word(rng, rank, max_len);
        if !w.is_empty() && !is_proper_power(&w) {
            return w;
        }
    }
}

pub fn random_uc_type_ii<R: Rng>(rng: &mut R, max_m: usize, lams: &[i64]) -> Endomorphism {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(2..=3);
    let q = random_column_matrix(rng, m, lams);
    let z = random_primitive(rng, n, 4);
    let mut ell = vec![0; m];
    ell[rng.gen_range(0..m)] = *[-2i64, -1, 1, 2].choose(rng).unwrap();
    Endomorphism::type_ii(q, IntMatrix::zeros(n, m), z, ell, vec![0; n]).unwrap()
}

/// A completion point suited to a type II map, biased towards powers of `z`.
pub fn random_point_ii<R: Rng>(rng: &mut R, e: &Endomorphism) -> Point {
    let a = random_ext_vector(rng, e.m(), 4);
    let z = e.z().unwrap();
    let free = match rng.gen_range(0..5) {
        0 => z_power(z, &ExtInt::PosInf).unwrap(),
        1 => z_power(z, &ExtInt::NegInf).unwrap(),
        2 => z_power(z, &ExtInt::from(rng.gen_range(-2..=2))).unwrap(),
        _ => random_completion(rng, e.n()),
    };
    Point::new(a, free)
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn free_endo(rank: usize, imgs: &[&str]) -> FreeEndo {
    FreeEndo::from_strs(rank, imgs).unwrap()
}
