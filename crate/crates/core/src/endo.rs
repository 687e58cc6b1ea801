//! Endomorphisms of `Z^m × F_n` (`n ≥ 2`): the two normal forms, recognition
//! from generator images, the uniform-continuity decision with verified
//! witnesses, and evaluation on the group and on its completion.
//!
//! Type I:  `(a, u) ↦ (aQ + ūP, uΦ)`
//! Type II: `(a, u) ↦ (aQ + ūP, z^{a·ℓ + ū·h})`
//!
//! where `ū ∈ Z^n` is the abelianization of `u`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::colstruct::{col_condition, ColError, ColStructure, IntMatrix};
use crate::extmath::{ext_mul, product_dist, Dyadic, ExtError, ExtInt, ExtVector, Point};
use crate::words::{
    apply_free, apply_free_boundary, cyclic_core, power_exponent, primitive_root, CompletionWord,
    FreeEndo, Letter, PowerWord, Word, WordError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error("free rank must be at least 2 (got {0})")]
    FreeRank(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("endomorphism is not uniformly continuous")]
    NotUniformlyContinuous,
    #[error("invalid type II data: {0}")]
    BadTypeII(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Col(#[from] ColError),
}

/// An element `(a, u)` of `Z^m × F_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub abelian: Vec<BigInt>,
    pub free: Word,
}

impl GroupElement {
    pub fn new(abelian: Vec<BigInt>, free: Word) -> Self {
        GroupElement { abelian, free }
    }

    pub fn from_ints(abelian: &[i64], free: &str) -> Result<Self, WordError> {
        Ok(GroupElement {
            abelian: abelian.iter().map(|&x| BigInt::from(x)).collect(),
            free: free.parse()?,
        })
    }

    pub fn identity(m: usize) -> Self {
        GroupElement {
            abelian: vec![BigInt::zero(); m],
            free: Word::empty(),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            abelian: self
                .abelian
                .iter()
                .zip(&other.abelian)
                .map(|(x, y)| x + y)
                .collect(),
            free: self.free.mul(&other.free),
        }
    }

    pub fn to_point(&self) -> Point {
        Point::new(
            ExtVector::from_bigints(&self.abelian),
            CompletionWord::Finite(self.free.clone()),
        )
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_point())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIEndo {
    pub q: IntMatrix,
    pub p: IntMatrix,
    pub phi: FreeEndo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIIEndo {
    pub q: IntMatrix,
    pub p: IntMatrix,
    pub z: Word,
    pub ell: Vec<i64>,
    pub h: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndoKind {
    TypeI(TypeIEndo),
    TypeII(TypeIIEndo),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    m: usize,
    n: usize,
    kind: EndoKind,
    col: Option<ColStructure>,
}

/// A condition whose failure breaks uniform continuity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UcFailure {
    NonzeroP,
    NonzeroH,
    ColumnCondition { column: usize },
    EllNotSingle { nonzero: usize },
    FreeNeitherTrivialNorInjective,
}

impl fmt::Display for UcFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UcFailure::NonzeroP => f.write_str("P is nonzero"),
            UcFailure::NonzeroH => f.write_str("h is nonzero"),
            UcFailure::ColumnCondition { column } => {
                write!(f, "column {column} of Q has several nonzero entries")
            }
            UcFailure::EllNotSingle { nonzero } => {
                write!(f, "ell has {nonzero} nonzero entries")
            }
            UcFailure::FreeNeitherTrivialNorInjective => {
                f.write_str("free part is neither trivial nor injective")
            }
        }
    }
}

/// Two elements closer than `delta` whose images are at distance 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub x: GroupElement,
    pub y: GroupElement,
    pub delta: Dyadic,
    pub distance: Dyadic,
    pub image_distance: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UcReport {
    pub is_uc: bool,
    pub failures: Vec<UcFailure>,
    pub witness: Option<Witness>,
}

/// Exponent of the default witness radius `2^-10`.
pub const WITNESS_RADIUS: u64 = 10;

impl Endomorphism {
    pub fn type_i(q: IntMatrix, p: IntMatrix, phi: FreeEndo) -> Result<Self, EndoError> {
        let (m, n) = (q.rows(), phi.rank());
        check_shapes(&q, &p, m, n)?;
        let col = col_condition(&q).ok();
        Ok(Endomorphism {
            m,
            n,
            kind: EndoKind::TypeI(TypeIEndo { q, p, phi }),
            col,
        })
    }

    pub fn type_ii(
        q: IntMatrix,
        p: IntMatrix,
        z: Word,
        ell: Vec<i64>,
        h: Vec<i64>,
    ) -> Result<Self, EndoError> {
        let (m, n) = (q.rows(), h.len());
        check_shapes(&q, &p, m, n)?;
        if ell.len() != m {
            return Err(EndoError::Dimension(format!("ell has length {}, expected {m}", ell.len())));
        }
        if z.is_empty() {
            return Err(EndoError::BadTypeII("z is trivial".into()));
        }
        if primitive_root(&z)?.1 > 1 {
            return Err(EndoError::BadTypeII(format!("z = {z} is a proper power")));
        }
        if z.max_generator() > n {
            return Err(WordError::RankExceeded { gen: z.max_generator(), rank: n }.into());
        }
        if ell.iter().all(|&x| x == 0) {
            return Err(EndoError::BadTypeII("ell is zero".into()));
        }
        let col = col_condition(&q).ok();
        Ok(Endomorphism {
            m,
            n,
            kind: EndoKind::TypeII(TypeIIEndo { q, p, z, ell, h }),
            col,
        })
    }

    /// Recognizes an endomorphism from the images of the generators
    /// `e_1..e_m` of `Z^m` and `x_1..x_n` of `F_n`.
    pub fn from_images(
        m: usize,
        n: usize,
        abelian_images: &[(Vec<i64>, Word)],
        free_images: &[(Vec<i64>, Word)],
    ) -> Result<Self, EndoError> {
        if n < 2 {
            return Err(EndoError::FreeRank(n));
        }
        if abelian_images.len() != m || free_images.len() != n {
            return Err(EndoError::Dimension(format!(
                "expected {m} abelian and {n} free images, got {} and {}",
                abelian_images.len(),
                free_images.len()
            )));
        }
        if let Some((v, _)) = abelian_images
            .iter()
            .chain(free_images)
            .find(|(v, _)| v.len() != m)
        {
            return Err(EndoError::Dimension(format!(
                "image vector of length {} in Z^{m}",
                v.len()
            )));
        }
        let q = IntMatrix::from_rows(&abelian_images.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>())
?;
        let p = IntMatrix::from_rows(&free_images.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>())?;

        let Some((_, first)) = abelian_images.iter().find(|(_, w)| !w.is_empty()) else {
            let phi = FreeEndo::new(n, free_images.iter().map(|(_, w)| w.clone()).collect())?;
            return Self::type_i(q, p, phi);
        };
        let (z, _) = primitive_root(first)?;
        let exponent = |w: &Word, what: String| -> Result<i64, EndoError> {
            match power_exponent(&z, &CompletionWord::Finite(w.clone())) {
                Some(ExtInt::Fin(e)) => i64::try_from(e).map_err(|_| {
                    EndoError::NotAHomomorphism(format!("exponent of {what} overflows"))
                }),
                _ => Err(EndoError::NotAHomomorphism(format!(
                    "free part {w} of {what} does not commute with {z}"
                ))),
            }
        };
        let ell = abelian_images
            .iter()
            .enumerate()
            .map(|(i, (_, w))| exponent(w, format!("e_{}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let h = free_images
            .iter()
            .enumerate()
            .map(|(j, (_, w))| exponent(w, format!("x_{}", j + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::type_ii(q, p, z, ell, h)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &EndoKind {
        &self.kind
    }

    pub fn q(&self) -> &IntMatrix {
        match &self.kind {
            EndoKind::TypeI(e) => &e.q,
            EndoKind::TypeII(e) => &e.q,
        }
    }

    pub fn p(&self) -> &IntMatrix {
        match &self.kind {
            EndoKind::TypeI(e) => &e.p,
            EndoKind::TypeII(e) => &e.p,
        }
    }

    pub fn is_type_ii(&self) -> bool {
        matches!(self.kind, EndoKind::TypeII(_))
    }

    /// Column digest of `Q`, when `Q` satisfies the column condition.
    pub fn col_structure(&self) -> Option<&ColStructure> {
        self.col.as_ref()
    }

    /// For a uniformly continuous type II map: the index `k` (0-based) and
    /// value `λ` of the single nonzero entry of `ℓ`.
    pub fn special_form(&self) -> Option<(usize, i64)> {
        match &self.kind {
            EndoKind::TypeII(e) if self.is_uc() => {
                e.ell.iter().position(|&x| x != 0).map(|k| (k, e.ell[k]))
            }
            _ => None,
        }
    }

    pub fn failures(&self) -> Vec<UcFailure> {
        let mut out = Vec::new();
        if !self.p().is_zero() {
            out.push(UcFailure::NonzeroP);
        }
        if let EndoKind::TypeII(e) = &self.kind {
            if e.h.iter().any(|&x| x != 0) {
                out.push(UcFailure::NonzeroH);
            }
        }
        if let Err(ColError::ColumnCondition { column }) = col_condition(self.q()) {
            out.push(UcFailure::ColumnCondition { column });
        }
        match &self.kind {
            EndoKind::TypeII(e) => {
                let nz = e.ell.iter().filter(|&&x| x != 0).count();
                if nz != 1 {
                    out.push(UcFailure::EllNotSingle { nonzero: nz });
                }
            }
            EndoKind::TypeI(e) => {
                if !e.phi.is_trivial() && !e.phi.is_injective() {
                    out.push(UcFailure::FreeNeitherTrivialNorInjective);
                }
            }
        }
        out
    }

    pub fn is_uc(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn check_uc(&self) -> UcReport {
        self.check_uc_with_radius(WITNESS_RADIUS)
    }

    /// Decides uniform continuity; a non-uc report carries a pair closer than
    /// `2^-radius` whose images are at distance 1.
    pub fn check_uc_with_radius(&self, radius: u64) -> UcReport {
        let failures = self.failures();
        let witness = failures
            .iter()
            .find_map(|f| self.witness_for(f, radius));
        UcReport {
            is_uc: failures.is_empty(),
            failures,
            witness,
        }
    }

    fn witness_for(&self, failure: &UcFailure, radius: u64) -> Option<Witness> {
        let q = radius as i64 + 1;
        let candidates = match failure {
            UcFailure::NonzeroP => self.candidates_p(q),
            UcFailure::NonzeroH => self.candidates_h(q),
            UcFailure::ColumnCondition { column } => {
                let u: Vec<i64> = (0..self.m).map(|i| self.q().get(i, column - 1)).collect();
                linear_form_candidates(&u, q)
                    .into_iter()
                    .map(|(a, b)| (self.abelian_only(a), self.abelian_only(b)))
                    .collect()
            }
            UcFailure::EllNotSingle { .. } => {
                let EndoKind::TypeII(e) = &self.kind else { return None };
                linear_form_candidates(&e.ell, q)
                    .into_iter()
                    .map(|(a, b)| (self.abelian_only(a), self.abelian_only(b)))
                    .collect()
            }
            UcFailure::FreeNeitherTrivialNorInjective => self.candidates_kernel(q),
        };
        let delta = Dyadic::neg_pow(radius);
        candidates
            .into_iter()
            .find_map(|(x, y)| self.verify_witness(x, y, &delta))
    }

    fn verify_witness(&self, x: GroupElement, y: GroupElement, delta: &Dyadic) -> Option<Witness> {
        let distance = product_dist(&x.to_point(), &y.to_point()).ok()?;
        if distance >= *delta {
            return None;
        }
        let fx = self.apply(&x).ok()?;
        let fy = self.apply(&y).ok()?;
        let image_distance = product_dist(&fx.to_point(), &fy.to_point()).ok()?;
        image_distance.is_one().then(|| Witness {
            x,
            y,
            delta: delta.clone(),
            distance,
            image_distance,
        })
    }

    fn abelian_only(&self, a: Vec<BigInt>) -> GroupElement {
        GroupElement::new(a, Word::empty())
    }

    fn free_only(&self, w: Word) -> GroupElement {
        GroupElement::new(vec![BigInt::zero(); self.m], w)
    }

    fn candidates_p(&self, q: i64) -> Vec<(GroupElement, GroupElement)> {
        let p = self.p();
        let mut out = Vec::new();
        let Some((t, s)) = (0..self.n)
            .flat_map(|t| (0..self.m).map(move |s| (t, s)))
            .find(|&(t, s)| p.get(t, s) != 0)
        else {
            return out;
        };
        let xt = Word::generator(t + 1);
        let base = xt.pow(q);
        let pts = p.get(t, s);
        for r in (0..self.n).filter(|&r| r != t) {
            let prs = p.get(r, s);
            let beta = if prs == 0 {
                1
            } else {
                -pts.signum() * prs.signum() * (pts.abs() * q + 1)
            };
            let y = base.mul(&Word::generator(r + 1).pow(beta));
            out.push((self.free_only(base.clone()), self.free_only(y)));
        }
        // x_t^q x_r x_t^{-2q} flips the sign of the s-th image coordinate
        let r = if t == 0 { 1 } else { 0 };
        let y = base
            .mul(&Word::generator(r + 1))
            .mul(&xt.pow(-2 * q));
        let y2 = base.mul(&Word::generator(r + 1).inverse()).mul(&xt.pow(-2 * q));
        out.push((self.free_only(base.clone()), self.free_only(y)));
        out.push((self.free_only(base), self.free_only(y2)));
        out
    }

    fn candidates_h(&self, q: i64) -> Vec<(GroupElement, GroupElement)> {
        let EndoKind::TypeII(e) = &self.kind else { return Vec::new() };
        let mut out = Vec::new();
        for k in (0..self.n).filter(|&k| e.h[k] != 0) {
            for t in (0..self.n).filter(|&t| t != k) {
                let hk = e.h[k];
                let ht = e.h[t];
                // h-exponent of x: q|h_k| h_t - q sgn(h_k) h_t h_k = 0
                let x = Word::generator(t + 1)
                    .pow(q * hk.abs())
                    .mul(&Word::generator(k + 1).pow(-q * hk.signum() * ht));
                let step = match x.last() {
                    Some(l) if l.gen() == k + 1 && l.is_inverse() => -1,
                    _ => 1,
                };
                let y = x.mul(&Word::generator(k + 1).pow(step));
                out.push((self.free_only(x), self.free_only(y)));
            }
        }
        out
    }

    fn candidates_kernel(&self, q: i64) -> Vec<(GroupElement, GroupElement)> {
        let EndoKind::TypeI(e) = &self.kind else { return Vec::new() };
        let Some(kappa) = e.phi.kernel_witness() else { return Vec::new() };
        let Ok((_, core)) = cyclic_core(kappa) else { return Vec::new() };
        let reps = q as usize / core.len() + 1;
        let x = core.pow(reps as i64);
        let last = x.last().expect("nonempty core");
        let mut out = Vec::new();
        for j in (1..=self.n).filter(|&j| !e.phi.image(j).is_empty()) {
            for l in [Letter::new(j, false), Letter::new(j, true)] {
                if l != last.inverse() {
                    let y = x.mul(&Word::letter(l));
                    out.push((self.free_only(x.clone()), self.free_only(y)));
                }
            }
        }
        out
    }

    /// Image of a group element.
    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement, EndoError> {
        if g.abelian.len() != self.m {
            return Err(ExtError::DimensionMismatch {
                expected: self.m,
                got: g.abelian.len(),
            }
            .into());
        }
        let ubar: Vec<BigInt> = g
            .free
            .abelianization(self.n)
            .into_iter()
            .take(self.n)
            .map(BigInt::from)
            .collect();
        let mut abelian = self.q().left_mul(&g.abelian);
        for (x, y) in abelian.iter_mut().zip(self.p().left_mul(&ubar)) {
            *x += y;
        }
        let free = match &self.kind {
            EndoKind::TypeI(e) => apply_free(&e.phi, &g.free),
            EndoKind::TypeII(e) => {
                let ex = dot(&g.abelian, &e.ell) + dot(&ubar, &e.h);
                match PowerWord::new(&e.z, ExtInt::Fin(ex))?.materialize()? {
                    CompletionWord::Finite(w) => w,
                    CompletionWord::Infinite(_) => unreachable!("finite exponent"),
                }
            }
        };
        Ok(GroupElement { abelian, free })
    }

    fn uc_col(&self) -> Result<&ColStructure, EndoError> {
        if !self.is_uc() {
            return Err(EndoError::NotUniformlyContinuous);
        }
        Ok(self.col.as_ref().expect("uc implies the column condition"))
    }

    /// Image of a completion point, with the free part of a type II image
    /// kept as a symbolic power of `z`.
    pub fn apply_completion_symbolic(&self, p: &Point) -> Result<(ExtVector, FreeImage), EndoError> {
        let col = self.uc_col()?;
        let abelian = col.apply_ext(&p.abelian)?;
        let free = match &self.kind {
            EndoKind::TypeI(e) => FreeImage::Word(match &p.free {
                CompletionWord::Finite(w) => CompletionWord::Finite(apply_free(&e.phi, w)),
                CompletionWord::Infinite(_) if e.phi.is_trivial() => CompletionWord::empty(),
                CompletionWord::Infinite(b) => {
                    CompletionWord::Infinite(apply_free_boundary(&e.phi, b)?)
                }
            }),
            EndoKind::TypeII(_) => {
                let (k, lam) = self.special_form().expect("uc type II");
                FreeImage::Power(ext_mul(&BigInt::from(lam), &p.abelian.0[k]))
            }
        };
        Ok((abelian, free))
    }

    pub fn apply_completion(&self, p: &Point) -> Result<Point, EndoError> {
        let (abelian, free) = self.apply_completion_symbolic(p)?;
        Ok(Point::new(abelian, self.materialize(&free)?))
    }

    /// Turns a symbolic free image into a completion word.
    pub fn materialize(&self, f: &FreeImage) -> Result<CompletionWord, EndoError> {
        match (f, &self.kind) {
            (FreeImage::Word(w), _) => Ok(w.clone()),
            (FreeImage::Power(e), EndoKind::TypeII(t)) => {
                Ok(PowerWord::new(&t.z, e.clone())?.materialize()?)
            }
            (FreeImage::Power(_), EndoKind::TypeI(_)) => {
                Err(EndoError::BadTypeII("power image for a type I map".into()))
            }
        }
    }

    /// Exponent of `z` in the free part after `r ≥ 1` steps of a uc type II map.
    pub fn closed_form_exponent(&self, a: &ExtVector, r: u64) -> Result<ExtInt, EndoError> {
        let col = self.uc_col()?;
        let (k, lam) = self
            .special_form()
            .ok_or_else(|| EndoError::BadTypeII("closed form needs a type II map".into()))?;
        if a.dim() != self.m {
            return Err(ExtError::DimensionMismatch { expected: self.m, got: a.dim() }.into());
        }
        assert!(r >= 1, "closed form needs r >= 1");
        let pi = col.pi_product(k, r - 1) * lam;
        Ok(ext_mul(&pi, &a.0[col.psi_pow(k, r - 1)]))
    }

    /// `r`-th iterate of a uc type II map in closed form.
    pub fn iterate_closed_form(&self, p: &Point, r: u64) -> Result<Point, EndoError> {
        let e = self.closed_form_exponent(&p.abelian, r)?;
        let col = self.uc_col()?;
        let abelian = col.iterate_ext(&p.abelian, r)?;
        Ok(Point::new(abelian, self.materialize(&FreeImage::Power(e))?))
    }

    /// The generator `z` of a type II map.
    pub fn z(&self) -> Option<&Word> {
        match &self.kind {
            EndoKind::TypeII(e) => Some(&e.z),
            _ => None,
        }
    }

    pub fn phi(&self) -> Option<&FreeEndo> {
        match &self.kind {
            EndoKind::TypeI(e) => Some(&e.phi),
            _ => None,
        }
    }
}

/// Free part of an image point: explicit, or `z^e` left symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FreeImage {
    Word(CompletionWord),
    Power(ExtInt),
}

fn check_shapes(q: &IntMatrix, p: &IntMatrix, m: usize, n: usize) -> Result<(), EndoError> {
    if n < 2 {
        return Err(EndoError::FreeRank(n));
    }
    if q.rows() != q.cols() {
        return Err(EndoError::Dimension(format!("Q is {}x{}", q.rows(), q.cols())));
    }
    if p.rows() != n || p.cols() != m {
        return Err(EndoError::Dimension(format!(
            "P is {}x{}, expected {n}x{m}",
            p.rows(),
            p.cols()
        )));
    }
    Ok(())
}

fn dot(a: &[BigInt], b: &[i64]) -> BigInt {
    a.iter().zip(b).map(|(x, &y)| x * y).sum()
}

/// Pairs `(v, w)` of close vectors with `v·u` and `w·u` at unary distance 1.
fn linear_form_candidates(u: &[i64], q: i64) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
    let m = u.len();
    let mut out = Vec::new();
    let v: Vec<BigInt> = vec![BigInt::from(q); m];
    for j in (0..m).filter(|&j| u[j] != 0) {
        let mut w = v.clone();
        w[j] += 1;
        out.push((v.clone(), w));
    }
    let support: Vec<usize> = (0..m).filter(|&i| u[i] != 0).collect();
    if let [i1, i2, ..] = support[..] {
        let g = u[i1].gcd(&u[i2]);
        // v_{i1} u_{i1} + v_{i2} u_{i2} = 0 with both entries beyond q
        let k = BigInt::from(q + 1);
        let mut v = vec![BigInt::zero(); m];
        v[i1] = &k * (u[i2] / g);
        v[i2] = -&k * (u[i1] / g);
        let mut w = v.clone();
        w[i1] += if v[i1].is_negative() { -BigInt::one() } else { BigInt::one() };
        out.push((v, w));
    }
    out
}
