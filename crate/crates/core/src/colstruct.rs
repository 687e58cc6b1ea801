//! Integer matrices whose columns carry at most one nonzero entry, digested
//! into the functional graph `ψ : i ↦ α_i` with multipliers `λ_i`.
//!
//! Row vectors act on the right, so `(aQ)_i = λ_i · a_{α_i}` and
//! `(aQ^r)_i = π_i^{(r)} · a_{iψ^r}` with `π_i^{(r)} = λ_i λ_{iψ} ⋯ λ_{iψ^{r-1}}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::extmath::{ext_mul, ExtError, ExtVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColError {
    #[error("column {column} has more than one nonzero entry")]
    ColumnCondition { column: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not uniform: {0}")]
    NotUniform(String),
    #[error("index {0} is not eventually unit")]
    NotEventuallyUnit(usize),
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
}

/// A dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut q = Self::zeros(m, m);
        for i in 0..m {
            q.set(i, i, 1);
        }
        q
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, ColError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ColError::Ragged);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Square matrix from a row-major slice.
    pub fn square(m: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), m * m, "wrong number of entries");
        IntMatrix {
            rows: m,
            cols: m,
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| self.get(i, j) != 0)
                    .map(|i| &v[i] * self.get(i, j))
                    .sum()
            })
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Functional-graph digest of a column-conditioned matrix. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColStructure {
    pub m: usize,
    pub lambda: Vec<i64>,
    pub alpha: Vec<usize>,
    /// Cycles of ψ, each listed in ψ order starting from its smallest index.
    pub cycles: Vec<Vec<usize>>,
    /// Product of λ around each cycle.
    pub cycle_product: Vec<BigInt>,
    /// The cycle eventually reached from each index.
    pub cycle_of: Vec<usize>,
    /// Steps until `iψ^s` lies on a cycle.
    pub preperiod: Vec<usize>,
    /// Smallest multiple of the cycle length that is at least the preperiod.
    pub landing_time: Vec<usize>,
    pub landing_index: Vec<usize>,
    pub landing_product: Vec<BigInt>,
    /// lcm of the cycle lengths.
    pub cycle_lcm: u64,
    /// Periodicity is decided by comparing `a` with its image after this many steps.
    pub horizon: u64,
    position: Vec<usize>,
}

pub fn col_condition(q: &IntMatrix) -> Result<ColStructure, ColError> {
    if q.rows() != q.cols() {
        return Err(ColError::NotSquare {
            rows: q.rows(),
            cols: q.cols(),
        });
    }
    let m = q.rows();
    let mut lambda = vec![0i64; m];
    let mut alpha = vec![0usize; m];
    for j in 0..m {
        let nz: Vec<usize> = (0..m).filter(|&i| q.get(i, j) != 0).collect();
        match nz.as_slice() {
            [] => {}
            [i] => {
                lambda[j] = q.get(*i, j);
                alpha[j] = *i;
            }
            _ => return Err(ColError::ColumnCondition { column: j + 1 }),
        }
    }
    Ok(ColStructure::from_parts(lambda, alpha))
}

impl ColStructure {
    /// Builds the digest directly from multipliers and the map `ψ`.
    pub fn from_parts(lambda: Vec<i64>, alpha: Vec<usize>) -> Self {
        let m = lambda.len();
        assert_eq!(alpha.len(), m);
        assert!(alpha.iter().all(|&a| a < m || m == 0));

        // cycle members: iψ^m always lies on a cycle
        let mut on_cycle = vec![false; m];
        for i in 0..m {
            let mut x = i;
            for _ in 0..m {
                x = alpha[x];
            }
            on_cycle[x] = true;
        }
        let mut cycle_id = vec![usize::MAX; m];
        let mut position = vec![0usize; m];
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for i in 0..m {
            if !on_cycle[i] || cycle_id[i] != usize::MAX {
                continue;
            }
            let mut members = vec![i];
            let mut x = alpha[i];
            while x != i {
                members.push(x);
                x = alpha[x];
            }
            for (p, &x) in members.iter().enumerate() {
                cycle_id[x] = cycles.len();
                position[x] = p;
                on_cycle[x] = true;
            }
            cycles.push(members);
        }
        let cycle_product = cycles
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(lambda[x])).product())
            .collect();

        let mut preperiod = vec![0usize; m];
        let mut cycle_of = vec![0usize; m];
        for i in 0..m {
            let mut x = i;
            let mut s = 0;
            while cycle_id[x] == usize::MAX {
                x = alpha[x];
                s += 1;
            }
            preperiod[i] = s;
            cycle_of[i] = cycle_id[x];
        }

        let mut s = ColStructure {
            m,
            lambda,
            alpha,
            cycles,
            cycle_product,
            cycle_of,
            preperiod,
            landing_time: Vec::new(),
            landing_index: Vec::new(),
            landing_product: Vec::new(),
            cycle_lcm: 1,
            horizon: 0,
            position,
        };
        for i in 0..m {
            let c = s.cycle_len(i);
            let t = s.preperiod[i].div_ceil(c) * c;
            s.landing_time.push(t);
            s.landing_index.push(s.psi_pow(i, t as u64));
            s.landing_product.push(s.pi_product(i, t as u64));
        }
        s.cycle_lcm = s
            .cycles
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)));
        let need = (2 * m as u64 + 1).max(s.landing_time.iter().copied().max().unwrap_or(0) as u64);
        let step = 2 * s.cycle_lcm;
        s.horizon = need.div_ceil(step).max(1) * step;
        s
    }

    pub fn psi(&self, i: usize) -> usize {
        self.alpha[i]
    }

    pub fn cycle_len(&self, i: usize) -> usize {
        self.cycles[self.cycle_of[i]].len()
    }

    pub fn is_on_cycle(&self, i: usize) -> bool {
        self.preperiod[i] == 0
    }

    /// Multiplier `Λ` of the cycle reached from `i`.
    pub fn reached_product(&self, i: usize) -> &BigInt {
        &self.cycle_product[self.cycle_of[i]]
    }

    pub fn psi_pow(&self, i: usize, r: u64) -> usize {
        let s = self.preperiod[i] as u64;
        let mut x = i;
        for _ in 0..r.min(s) {
            x = self.alpha[x];
        }
        if r <= s {
            return x;
        }
        let cyc = &self.cycles[self.cycle_of[i]];
        let offset = ((r - s) % cyc.len() as u64) as usize;
        cyc[(self.position[x] + offset) % cyc.len()]
    }

    /// `π_i^{(r)}`; 1 for `r = 0`.
    pub fn pi_product(&self, i: usize, r: u64) -> BigInt {
        let s = self.preperiod[i] as u64;
        let mut x = i;
        let mut acc = BigInt::one();
        for _ in 0..r.min(s) {
            acc *= self.lambda[x];
            x = self.alpha[x];
        }
        if r <= s {
            return acc;
        }
        let cyc = &self.cycles[self.cycle_of[i]];
        let c = cyc.len() as u64;
        let (whole, rem) = ((r - s) / c, (r - s) % c);
        if !whole.is_zero() {
            let lam = &self.cycle_product[self.cycle_of[i]];
            acc *= pow_big(lam, whole);
        }
        for _ in 0..rem {
            acc *= self.lambda[x];
            x = self.alpha[x];
        }
        acc
    }

    pub fn apply_ext(&self, a: &ExtVector) -> Result<ExtVector, ExtError> {
        self.check_dim(a)?;
        Ok(ExtVector(
            (0..self.m)
                .map(|i| ext_mul(&BigInt::from(self.lambda[i]), &a.0[self.alpha[i]]))
                .collect(),
        ))
    }

    /// `a` after `r` steps, by the closed form.
    pub fn iterate_ext(&self, a: &ExtVector, r: u64) -> Result<ExtVector, ExtError> {
        self.check_dim(a)?;
        Ok(ExtVector(
            (0..self.m)
                .map(|i| ext_mul(&self.pi_product(i, r), &a.0[self.psi_pow(i, r)]))
                .collect(),
        ))
    }

    fn check_dim(&self, a: &ExtVector) -> Result<(), ExtError> {
        if a.dim() != self.m {
            return Err(ExtError::DimensionMismatch {
                expected: self.m,
                got: a.dim(),
            });
        }
        Ok(())
    }

    /// Every multiplier on the cycle reached from `i` is ±1.
    pub fn eventually_unit(&self, i: usize) -> bool {
        self.cycles[self.cycle_of[i]]
            .iter()
            .all(|&x| self.lambda[x].abs() == 1)
    }

    /// Largest magnitude of a product of consecutive multipliers along the
    /// ψ-path from `i`, at least 1.
    pub fn bound_b(&self, i: usize) -> Result<BigInt, ColError> {
        if !self.eventually_unit(i) {
            return Err(ColError::NotEventuallyUnit(i + 1));
        }
        let len = self.preperiod[i] + self.cycle_len(i);
        let mut path = Vec::with_capacity(len);
        let mut x = i;
        for _ in 0..len {
            path.push(self.lambda[x]);
            x = self.alpha[x];
        }
        let mut best = BigInt::one();
        for s in 0..len {
            let mut acc = BigInt::one();
            for &l in &path[s..] {
                acc *= l;
                if acc.abs() > best {
                    best = acc.abs();
                }
            }
        }
        Ok(best)
    }

    /// The matrix this structure encodes.
    pub fn to_matrix(&self) -> IntMatrix {
        let mut q = IntMatrix::zeros(self.m, self.m);
        for j in 0..self.m {
            if self.lambda[j] != 0 {
                q.set(self.alpha[j], j, self.lambda[j]);
            }
        }
        q
    }
}

pub(crate) fn pow_big(base: &BigInt, e: u64) -> BigInt {
    if base.abs().is_one() || base.is_zero() {
        return if base.is_zero() {
            BigInt::zero()
        } else if base.is_negative() && e % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
    }
    base.pow(u32::try_from(e).expect("exponent too large for a non-unit base"))
}

/// `Q = A · D` with `A` a permutation matrix and `D` a ±1 diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformDecomposition {
    /// Column `j` of `A` has its 1 in row `perm[j]`.
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl UniformDecomposition {
    pub fn permutation_matrix(&self) -> IntMatrix {
        let m = self.perm.len();
        let mut a = IntMatrix::zeros(m, m);
        for (j, &i) in self.perm.iter().enumerate() {
            a.set(i, j, 1);
        }
        a
    }

    pub fn sign_matrix(&self) -> IntMatrix {
        let m = self.signs.len();
        let mut d = IntMatrix::zeros(m, m);
        for (j, &s) in self.signs.iter().enumerate() {
            d.set(j, j, s);
        }
        d
    }
}

pub fn is_uniform(q: &IntMatrix) -> Result<UniformDecomposition, ColError> {
    let s = col_condition(q).map_err(|e| ColError::NotUniform(e.to_string()))?;
    if let Some(j) = s.lambda.iter().position(|l| l.abs() != 1) {
        return Err(ColError::NotUniform(format!(
            "column {} has entry {} (need ±1)",
            j + 1,
            s.lambda[j]
        )));
    }
    let mut hit = vec![false; s.m];
    for &a in &s.alpha {
        if std::mem::replace(&mut hit[a], true) {
            return Err(ColError::NotUniform(format!(
                "row {} holds two nonzero entries",
                a + 1
            )));
        }
    }
    Ok(UniformDecomposition {
        perm: s.alpha,
        signs: s.lambda,
    })
}

/// Least `p ≥ 1` with `Q^p = I`.
pub fn matrix_order(u: &UniformDecomposition) -> u64 {
    let s = ColStructure::from_parts(u.signs.clone(), u.perm.clone());
    s.cycles
        .iter()
        .zip(&s.cycle_product)
        .fold(1u64, |acc, (c, p)| {
            let len = c.len() as u64;
            acc.lcm(&if p.is_one() { len } else { 2 * len })
        })
}

/// Every uniform `m × m` matrix: `2^m · m!` of them.
pub fn enumerate_uniform(m: usize) -> Vec<IntMatrix> {
    let mut perms = Vec::new();
    permutations(&mut (0..m).collect(), 0, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << m);
    for p in &perms {
        for mask in 0u64..(1 << m) {
            let mut q = IntMatrix::zeros(m, m);
            for (j, &i) in p.iter().enumerate() {
                q.set(i, j, if mask >> j & 1 == 1 { -1 } else { 1 });
            }
            out.push(q);
        }
    }
    out
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extmath::ExtInt;

    #[test]
    fn col_condition_examples() {
        let s = col_condition(&IntMatrix::identity(2)).unwrap();
        assert_eq!((s.lambda.clone(), s.alpha.clone()), (vec![1, 1], vec![0, 1]));
        assert_eq!(
            col_condition(&IntMatrix::square(2, &[1, 1, 0, 1])),
            Err(ColError::ColumnCondition { column: 2 })
        );
        let s = col_condition(&IntMatrix::square(2, &[0, 2, 1, 0])).unwrap();
        assert_eq!((s.lambda.clone(), s.alpha.clone()), (vec![1, 2], vec![1, 0]));
    }

    #[test]
    fn zero_column_convention() {
        let s = col_condition(&IntMatrix::square(2, &[0, 0, 0, 3])).unwrap();
        assert_eq!(s.lambda, vec![0, 3]);
        assert_eq!(s.alpha, vec![0, 1]);
        assert_eq!(s.to_matrix(), IntMatrix::square(2, &[0, 0, 0, 3]));
    }

    #[test]
    fn uniform_examples() {
        let u = is_uniform(&IntMatrix::identity(2)).unwrap();
        assert_eq!((u.perm.clone(), u.signs.clone()), (vec![0, 1], vec![1, 1]));
        let q = IntMatrix::square(2, &[0, -1, 1, 0]);
        let u = is_uniform(&q).unwrap();
        assert_eq!(u.signs, vec![1, -1]);
        assert_eq!(u.permutation_matrix().mul(&u.sign_matrix()), q);
        assert_eq!(enumerate_uniform(2).len(), 8);
        assert_eq!(enumerate_uniform(3).len(), 48);
        assert!(is_uniform(&IntMatrix::square(1, &[2])).is_err());
        assert!(is_uniform(&IntMatrix::square(2, &[1, 1, 0, 0])).is_err());
    }

    #[test]
    fn order_examples() {
        let o = |e: &[i64]| matrix_order(&is_uniform(&IntMatrix::square(2, e)).unwrap());
        assert_eq!(o(&[1, 0, 0, 1]), 1);
        assert_eq!(o(&[0, 1, 1, 0]), 2);
        assert_eq!(o(&[0, -1, 1, 0]), 4);
        assert_eq!(o(&[-1, 0, 0, 1]), 2);
    }

    #[test]
    fn order_agrees_with_powers() {
        for m in 1..=3 {
            for q in enumerate_uniform(m) {
                let p = matrix_order(&is_uniform(&q).unwrap());
                let mut acc = q.clone();
                let mut k = 1;
                while acc != IntMatrix::identity(m) {
                    acc = acc.mul(&q);
                    k += 1;
                }
                assert_eq!(k, p, "{q:?}");
            }
        }
    }

    #[test]
    fn pi_examples() {
        let s = col_condition(&IntMatrix::square(1, &[2])).unwrap();
        assert_eq!(s.pi_product(0, 0), BigInt::one());
        assert_eq!(s.pi_product(0, 3), BigInt::from(8));
        let s = col_condition(&IntMatrix::square(2, &[0, 2, 1, 0])).unwrap();
        assert_eq!(s.pi_product(0, 2), BigInt::from(2));
    }

    #[test]
    fn apply_examples() {
        let s = col_condition(&IntMatrix::identity(2)).unwrap();
        let a = ExtVector(vec![ExtInt::PosInf, ExtInt::from(-4)]);
        assert_eq!(s.apply_ext(&a).unwrap(), a);
        let s = col_condition(&IntMatrix::square(1, &[0])).unwrap();
        assert_eq!(
            s.apply_ext(&ExtVector(vec![ExtInt::PosInf])).unwrap(),
            ExtVector::from_ints(&[0])
        );
        let s = col_condition(&IntMatrix::square(2, &[0, 1, 1, 0])).unwrap();
        assert_eq!(
            s.apply_ext(&ExtVector(vec![ExtInt::PosInf, ExtInt::from(3)])).unwrap(),
            ExtVector(vec![ExtInt::from(3), ExtInt::PosInf])
        );
        assert!(s.apply_ext(&ExtVector::zeros(3)).is_err());
    }

    #[test]
    fn unit_examples() {
        let s = col_condition(&IntMatrix::square(1, &[1])).unwrap();
        assert!(s.eventually_unit(0));
        assert_eq!(s.bound_b(0).unwrap(), BigInt::one());
        let s = col_condition(&IntMatrix::square(1, &[2])).unwrap();
        assert!(!s.eventually_unit(0));
        assert!(s.bound_b(0).is_err());
        let s = col_condition(&IntMatrix::square(2, &[0, -1, 1, 0])).unwrap();
        assert!(s.eventually_unit(0) && s.eventually_unit(1));
    }

    #[test]
    fn bound_on_paths() {
        // 0 -> 1 (λ=3), 1 fixed with λ=1
        let s = ColStructure::from_parts(vec![3, 1], vec![1, 1]);
        assert_eq!(s.bound_b(0).unwrap(), BigInt::from(3));
        // 0 -> 1 -> 2, λ = -2, 2, then a unit loop
        let s = ColStructure::from_parts(vec![-2, 2, -1], vec![1, 2, 2]);
        assert_eq!(s.bound_b(0).unwrap(), BigInt::from(4));
    }

    #[test]
    fn landing_and_horizon() {
        // path 0 -> 1 -> 2 <-> 3
        let s = ColStructure::from_parts(vec![2, 3, 1, -1], vec![1, 2, 3, 2]);
        assert_eq!(s.preperiod, vec![2, 1, 0, 0]);
        assert_eq!(s.landing_time, vec![2, 2, 0, 0]);
        assert_eq!(s.landing_index, vec![2, 3, 2, 3]);
        assert_eq!(s.landing_product[0], BigInt::from(6));
        assert_eq!(s.cycle_lcm, 2);
        assert_eq!(s.horizon, 12);
        assert_eq!(s.cycle_product, vec![BigInt::from(-1)]);
    }
}
