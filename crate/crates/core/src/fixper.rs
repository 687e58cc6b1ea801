//! Fixed and periodic points of `a ↦ aQ` on `Z^m` and on `Ẑ^m`, their orbit
//! patterns, and the singular/regular and attractor/repeller classifications.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::colstruct::ColStructure;
use crate::endo::{EndoError, Endomorphism};
use crate::extmath::{ext_mul, ExtError, ExtInt, ExtVector, Point};
use crate::words::{z_power, CompletionWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixError {
    #[error("point is not fixed")]
    NotFixed,
    #[error("a singular free point cannot be an attractor or a repeller")]
    SingularAttractor,
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Endo(#[from] EndoError),
}

/// Basis of `{a ∈ Z^m : aQ = a}`, with the cycle each vector comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixBasis {
    pub basis: Vec<Vec<BigInt>>,
    /// Index into `ColStructure::cycles` for each basis vector.
    pub cycles: Vec<usize>,
}

/// Positions (0-based) and signs of the infinite entries of a vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OrbitPattern(pub BTreeMap<usize, i8>);

impl OrbitPattern {
    pub fn of(a: &ExtVector) -> Self {
        OrbitPattern(
            a.0.iter()
                .enumerate()
                .filter(|(_, x)| x.is_infinite())
                .map(|(i, x)| (i, x.signum()))
                .collect(),
        )
    }
}

impl fmt::Display for OrbitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, s)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", i + 1, if *s > 0 { '+' } else { '-' })?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternReport {
    pub patterns: Vec<OrbitPattern>,
    /// One vector per pattern, in the same order.
    pub representatives: Vec<ExtVector>,
    pub enumerated: usize,
    /// `Σ 2^i C(m,i) = 3^m`.
    pub formula: BigUint,
    pub mismatch: bool,
}

impl PatternReport {
    fn new(mut reps: Vec<ExtVector>, m: usize) -> Self {
        reps.sort_by_key(OrbitPattern::of);
        reps.dedup_by_key(|a| OrbitPattern::of(a));
        let patterns: Vec<OrbitPattern> = reps.iter().map(OrbitPattern::of).collect();
        let formula = BigUint::from(3u32).pow(m as u32);
        let enumerated = patterns.len();
        PatternReport {
            mismatch: BigUint::from(enumerated) != formula,
            patterns,
            representatives: reps,
            enumerated,
            formula,
        }
    }
}

pub fn is_fixed(s: &ColStructure, a: &ExtVector) -> Result<bool, ExtError> {
    Ok(s.apply_ext(a)? == *a)
}

/// Processing order in which `ψ(i)` is settled before `i` for tree nodes.
fn tree_order(s: &ColStructure) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.m).filter(|&i| !s.is_on_cycle(i)).collect();
    order.sort_by_key(|&i| s.preperiod[i]);
    order
}

/// The fixed vector of `ColStructure` whose value at each cycle's first
/// member is `seed[c]`, filled backwards around cycles and outwards on trees.
fn fixed_from_seeds(s: &ColStructure, seed: &[ExtInt]) -> ExtVector {
    let mut a = vec![ExtInt::zero(); s.m];
    for (c, members) in s.cycles.iter().enumerate() {
        let len = members.len();
        a[members[0]] = seed[c].clone();
        for p in (1..len).rev() {
            let x = members[p];
            let next = members[(p + 1) % len];
            a[x] = ext_mul(&BigInt::from(s.lambda[x]), &a[next]);
        }
    }
    for i in tree_order(s) {
        a[i] = ext_mul(&BigInt::from(s.lambda[i]), &a[s.psi(i)]);
    }
    ExtVector(a)
}

pub fn fix_basis_abelian(s: &ColStructure) -> FixBasis {
    let mut basis = Vec::new();
    let mut cycles = Vec::new();
    for (c, prod) in s.cycle_product.iter().enumerate() {
        if !prod.is_one() {
            continue;
        }
        let mut seed = vec![ExtInt::zero(); s.cycles.len()];
        seed[c] = ExtInt::from(1);
        let v = fixed_from_seeds(s, &seed)
            .to_finite()
            .expect("finite seeds stay finite");
        basis.push(v);
        cycles.push(c);
    }
    FixBasis { basis, cycles }
}

/// Infinite-entry patterns of the fixed points of the extension to `Ẑ^m`.
pub fn fix_ext_patterns(s: &ColStructure) -> PatternReport {
    let choices: Vec<Vec<ExtInt>> = s
        .cycle_product
        .iter()
        .map(|p| {
            if p.is_positive() {
                vec![ExtInt::zero(), ExtInt::PosInf, ExtInt::NegInf]
            } else {
                vec![ExtInt::zero()]
            }
        })
        .collect();
    let reps = product(&choices)
        .into_iter()
        .map(|seed| fixed_from_seeds(s, &seed))
        .collect();
    PatternReport::new(reps, s.m)
}

/// Infinite-entry patterns of the periodic points of the extension.
pub fn per_ext_patterns(s: &ColStructure) -> PatternReport {
    let mut slots: Vec<(usize, Vec<ExtInt>)> = Vec::new();
    for (members, prod) in s.cycles.iter().zip(&s.cycle_product) {
        let opts = if prod.is_zero() {
            vec![ExtInt::zero()]
        } else {
            vec![ExtInt::zero(), ExtInt::PosInf, ExtInt::NegInf]
        };
        for &x in members {
            slots.push((x, opts.clone()));
        }
    }
    let choices: Vec<Vec<ExtInt>> = slots.iter().map(|(_, o)| o.clone()).collect();
    let reps = product(&choices)
        .into_iter()
        .map(|vals| {
            let mut v = ExtVector::zeros(s.m);
            for ((x, _), val) in slots.iter().zip(vals) {
                v.0[*x] = val;
            }
            s.iterate_ext(&v, s.horizon).expect("dimension matches")
        })
        .collect();
    PatternReport::new(reps, s.m)
}

fn product(choices: &[Vec<ExtInt>]) -> Vec<Vec<ExtInt>> {
    let mut out = vec![Vec::new()];
    for opts in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Whether two fixed vectors lie in the same orbit under translation by
/// finite fixed vectors.
pub fn same_fix_orbit(s: &ColStructure, a: &ExtVector, b: &ExtVector) -> Result<bool, FixError> {
    if !is_fixed(s, a)? || !is_fixed(s, b)? {
        return Err(FixError::NotFixed);
    }
    Ok(OrbitPattern::of(a) == OrbitPattern::of(b))
}

/// `b − a` entrywise, where the two vectors share their infinite entries.
pub fn finite_difference(a: &ExtVector, b: &ExtVector) -> Option<Vec<BigInt>> {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| match (x, y) {
            (ExtInt::Fin(x), ExtInt::Fin(y)) => Some(y - x),
            (x, y) if x == y => Some(BigInt::zero()),
            _ => None,
        })
        .collect()
}

/// Fixed points of a uniformly continuous type II map.
pub struct FixSetII<'a> {
    endo: &'a Endomorphism,
    k: usize,
    lambda: i64,
}

impl<'a> FixSetII<'a> {
    pub fn new(endo: &'a Endomorphism) -> Result<Self, EndoError> {
        let (k, lambda) = endo
            .special_form()
            .ok_or(EndoError::NotUniformlyContinuous)?;
        Ok(FixSetII { endo, k, lambda })
    }

    fn col(&self) -> &ColStructure {
        self.endo.col_structure().expect("uc")
    }

    fn free_part(&self, a: &ExtVector) -> Result<CompletionWord, EndoError> {
        let e = ext_mul(&BigInt::from(self.lambda), &a.0[self.k]);
        Ok(z_power(self.endo.z().expect("type II"), &e)?)
    }

    pub fn contains(&self, p: &Point) -> Result<bool, EndoError> {
        if !is_fixed(self.col(), &p.abelian)? {
            return Ok(false);
        }
        Ok(self.free_part(&p.abelian)? == p.free)
    }

    pub fn representatives(&self) -> Result<Vec<Point>, EndoError> {
        fix_ext_patterns(self.col())
            .representatives
            .into_iter()
            .map(|a| {
                let u = self.free_part(&a)?;
                Ok(Point::new(a, u))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingReg {
    Singular,
    Regular,
}

/// Singular fixed points are limits of finite fixed points.
pub fn classify_sing_reg(s: &ColStructure, a: &ExtVector) -> Result<SingReg, FixError> {
    if !is_fixed(s, a)? {
        return Err(FixError::NotFixed);
    }
    let regular = (0..s.m).any(|i| a.0[i].is_infinite() && !s.reached_product(i).is_one());
    Ok(if regular { SingReg::Regular } else { SingReg::Singular })
}

/// Type II version: the point must be fixed; the answer is that of its
/// abelian part.
pub fn classify_sing_reg_ii(e: &Endomorphism, p: &Point) -> Result<SingReg, FixError> {
    if !FixSetII::new(e)?.contains(p)? {
        return Err(FixError::NotFixed);
    }
    classify_sing_reg(e.col_structure().expect("uc"), &p.abelian)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttractorStatus {
    Attractor,
    Repeller,
    Neither,
}

impl fmt::Display for AttractorStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttractorStatus::Attractor => "attractor",
            AttractorStatus::Repeller => "repeller",
            AttractorStatus::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorReport {
    pub status: AttractorStatus,
    /// Basin `{a} × S_u` when the status is attractor or repeller.
    pub basin: Option<String>,
}

/// Status of `(a, u)` for a uniform `Q`, given the status of `u` under the
/// free part. `free_singular` flags `u` as a singular fixed point.
pub fn classify_attractor(
    s: &ColStructure,
    a: &ExtVector,
    free_status: AttractorStatus,
    free_singular: bool,
) -> Result<AttractorReport, FixError> {
    if free_singular && free_status != AttractorStatus::Neither {
        return Err(FixError::SingularAttractor);
    }
    if !is_fixed(s, a)? {
        return Err(FixError::NotFixed);
    }
    if !a.is_finite() {
        return Ok(AttractorReport {
            status: AttractorStatus::Neither,
            basin: None,
        });
    }
    let basin = (free_status != AttractorStatus::Neither).then(|| format!("{{{a}}} x S_u"));
    Ok(AttractorReport {
        status: free_status,
        basin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colstruct::{col_condition, IntMatrix};

    fn st(m: usize, q: &[i64]) -> ColStructure {
        col_condition(&IntMatrix::square(m, q)).unwrap()
    }

    fn v(s: &str) -> ExtVector {
        s.parse().unwrap()
    }

    #[test]
    fn basis_examples() {
        let b = fix_basis_abelian(&st(2, &[0, 1, 1, 0]));
        assert_eq!(b.basis, vec![vec![BigInt::from(1), BigInt::from(1)]]);
        assert!(fix_basis_abelian(&st(1, &[2])).basis.is_empty());
        let b = fix_basis_abelian(&st(2, &[1, 0, 0, 1]));
        assert_eq!(b.basis.len(), 2);
    }

    #[test]
    fn basis_propagates_through_trees() {
        // column 1 points at the fixed coordinate 2 with multiplier 3
        let s = st(2, &[0, 0, 3, 1]);
        let b = fix_basis_abelian(&s);
        assert_eq!(b.basis, vec![vec![BigInt::from(3), BigInt::from(1)]]);
        let q = s.to_matrix();
        for x in &b.basis {
            assert_eq!(q.left_mul(x), *x);
        }
    }

    #[test]
    fn fix_pattern_examples() {
        assert_eq!(fix_ext_patterns(&st(1, &[1])).enumerated, 3);
        let r = fix_ext_patterns(&st(2, &[0, 1, 1, 0]));
        assert_eq!(r.enumerated, 3);
        assert!(r.mismatch);
        assert_eq!(r.formula, BigUint::from(9u32));
        assert_eq!(fix_ext_patterns(&st(1, &[-1])).enumerated, 1);
        assert_eq!(fix_ext_patterns(&st(2, &[1, 0, 0, 1])).enumerated, 9);
    }

    #[test]
    fn per_pattern_examples() {
        assert_eq!(per_ext_patterns(&st(1, &[-1])).enumerated, 3);
        assert_eq!(per_ext_patterns(&st(1, &[0])).enumerated, 1);
        assert_eq!(per_ext_patterns(&st(2, &[1, 0, 0, 1])).enumerated, 9);
        assert_eq!(per_ext_patterns(&st(2, &[0, 1, 1, 0])).enumerated, 9);
    }

    #[test]
    fn representatives_are_fixed() {
        let s = st(3, &[0, 1, 0, 1, 0, 0, 0, 0, 2]);
        let r = fix_ext_patterns(&s);
        for a in &r.representatives {
            assert!(is_fixed(&s, a).unwrap(), "{a}");
        }
    }

    #[test]
    fn orbit_examples() {
        let id = st(2, &[1, 0, 0, 1]);
        assert!(same_fix_orbit(&id, &v("[5,+inf]"), &v("[9,+inf]")).unwrap());
        assert!(!same_fix_orbit(&id, &v("[+inf,0]"), &v("[0,+inf]")).unwrap());
        let sw = st(2, &[0, 1, 1, 0]);
        assert!(!same_fix_orbit(&sw, &v("[+inf,+inf]"), &v("[-inf,-inf]")).unwrap());
        assert_eq!(
            same_fix_orbit(&sw, &v("[1,2]"), &v("[1,1]")),
            Err(FixError::NotFixed)
        );
    }

    #[test]
    fn sing_reg_examples() {
        let sw = st(2, &[0, 1, 1, 0]);
        assert_eq!(classify_sing_reg(&sw, &v("[+inf,+inf]")).unwrap(), SingReg::Singular);
        assert_eq!(classify_sing_reg(&st(1, &[2]), &v("[+inf]")).unwrap(), SingReg::Regular);
        assert_eq!(classify_sing_reg(&st(1, &[2]), &v("[0]")).unwrap(), SingReg::Singular);
        assert!(classify_sing_reg(&st(1, &[2]), &v("[1]")).is_err());
    }

    #[test]
    fn attractor_examples() {
        let id = st(2, &[1, 0, 0, 1]);
        let r = classify_attractor(&id, &v("[+inf,+inf]"), AttractorStatus::Attractor, false).unwrap();
        assert_eq!(r.status, AttractorStatus::Neither);
        let r = classify_attractor(&id, &v("[3,-1]"), AttractorStatus::Attractor, false).unwrap();
        assert_eq!(r.status, AttractorStatus::Attractor);
        assert!(r.basin.unwrap().contains("[3,-1]"));
        let r = classify_attractor(&id, &v("[3,-1]"), AttractorStatus::Neither, false).unwrap();
        assert_eq!(r.status, AttractorStatus::Neither);
        assert_eq!(
            classify_attractor(&id, &v("[0,0]"), AttractorStatus::Repeller, true),
            Err(FixError::SingularAttractor)
        );
    }

    #[test]
    fn pattern_text() {
        assert_eq!(OrbitPattern::of(&v("[+inf,2,-inf]")).to_string(), "{1:+, 3:-}");
        assert_eq!(OrbitPattern::of(&v("[1]")).to_string(), "{}");
    }
}
