use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use super::{cyclic_core, root_period, Letter, Word, WordError, MAX_WORD_LEN};
use crate::extmath::{Dyadic, ExtInt, PrefixLen};

/// An eventually periodic infinite reduced word `head · period^∞` in canonical
/// form: the period is cyclically reduced and primitive, every junction is
/// reduced, and the head is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryWord {
    head: Word,
    period: Word,
}

impl BoundaryWord {
    pub fn head(&self) -> &Word {
        &self.head
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter_at(&self, i: usize) -> Letter {
        let h = self.head.len();
        if i < h {
            self.head.letters()[i]
        } else {
            self.period.letters()[(i - h) % self.period.len()]
        }
    }

    pub fn stream(&self) -> impl Iterator<Item = Letter> + '_ {
        self.head
            .letters()
            .iter()
            .copied()
            .chain(self.period.letters().iter().copied().cycle())
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word::from_reduced(self.stream().take(k).collect())
    }
}

impl fmt::Debug for BoundaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Boundary({self})")
    }
}

impl fmt::Display for BoundaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.head.is_empty() {
            write!(f, "{}", self.head)?;
        }
        write!(f, "({})^inf", self.period)
    }
}

impl FromStr for BoundaryWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || WordError::Malformed(s.to_string());
        let body = t.strip_suffix(")^inf").ok_or_else(bad)?;
        let open = body.rfind('(').ok_or_else(bad)?;
        let head: Word = body[..open].parse()?;
        let period: Word = body[open + 1..].parse()?;
        canonicalize_boundary(&head, &period)
    }
}

/// Canonical representative of `head · period^∞`.
pub fn canonicalize_boundary(head: &Word, period: &Word) -> Result<BoundaryWord, WordError> {
    if period.is_empty() {
        return Err(WordError::DegeneratePeriod);
    }
    let (g, core) = cyclic_core(period)?;
    let d = root_period(core.letters());
    let mut p: VecDeque<Letter> = core.letters()[..d].iter().copied().collect();
    let mut h = head.mul(&g).into_letters();
    // cancel the tail of the head against the period, one letter at a time
    while h.last().copied() == Some(p[0].inverse()) {
        h.pop();
        p.rotate_left(1);
    }
    // absorb trailing copies of the period into the period itself
    while h.last().copied() == p.back().copied() && !h.is_empty() {
        h.pop();
        p.rotate_right(1);
    }
    Ok(BoundaryWord {
        head: Word::from_reduced(h),
        period: Word::from_reduced(p.into_iter().collect()),
    })
}

/// A point of the completion `F̂_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompletionWord {
    Finite(Word),
    Infinite(BoundaryWord),
}

impl CompletionWord {
    pub fn empty() -> Self {
        CompletionWord::Finite(Word::empty())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CompletionWord::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Word> {
        match self {
            CompletionWord::Finite(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_boundary(&self) -> Option<&BoundaryWord> {
        match self {
            CompletionWord::Infinite(b) => Some(b),
            _ => None,
        }
    }

    /// Length, `None` for boundary points.
    pub fn len(&self) -> Option<usize> {
        self.as_finite().map(Word::len)
    }

    pub fn stream(&self) -> Box<dyn Iterator<Item = Letter> + '_> {
        match self {
            CompletionWord::Finite(w) => Box::new(w.letters().iter().copied()),
            CompletionWord::Infinite(b) => Box::new(b.stream()),
        }
    }
}

impl From<Word> for CompletionWord {
    fn from(w: Word) -> Self {
        CompletionWord::Finite(w)
    }
}

impl From<BoundaryWord> for CompletionWord {
    fn from(b: BoundaryWord) -> Self {
        CompletionWord::Infinite(b)
    }
}

impl fmt::Debug for CompletionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CompletionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompletionWord::Finite(w) => write!(f, "{w}"),
            CompletionWord::Infinite(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for CompletionWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('(') {
            s.parse().map(CompletionWord::Infinite)
        } else {
            s.parse().map(CompletionWord::Finite)
        }
    }
}

/// Common prefix length of two letter streams, examining at most `cap` letters.
pub fn lcp_streams<A, B>(a: A, b: B, cap: usize) -> usize
where
    A: IntoIterator<Item = Letter>,
    B: IntoIterator<Item = Letter>,
{
    a.into_iter()
        .zip(b)
        .take(cap)
        .take_while(|(x, y)| x == y)
        .count()
}

/// Length of `x ∧ y`. Equal boundary words give `∞`; equal finite words give
/// their length.
pub fn lcp_len(x: &CompletionWord, y: &CompletionWord) -> PrefixLen {
    use CompletionWord::*;
    match (x, y) {
        (Infinite(a), Infinite(b)) => {
            if a == b {
                return PrefixLen::Infinite;
            }
            let bound =
                2 * (a.head.len() + a.period.len() + b.head.len() + b.period.len());
            let k = lcp_streams(a.stream(), b.stream(), bound);
            debug_assert!(k < bound, "distinct canonical forms agree on {bound} letters");
            PrefixLen::finite(k)
        }
        (Finite(u), other) | (other, Finite(u)) => {
            PrefixLen::finite(lcp_streams(u.letters().iter().copied(), other.stream(), u.len()))
        }
    }
}

pub fn dist(x: &CompletionWord, y: &CompletionWord) -> Dyadic {
    if x == y {
        Dyadic::Zero
    } else {
        Dyadic::from_prefix(lcp_len(x, y))
    }
}

/// `z^e` for a nonempty word `z`, kept symbolic so that huge exponents can be
/// measured and compared without materializing letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerWord {
    conj: Word,
    core: Word,
    exponent: ExtInt,
}

impl PowerWord {
    pub fn new(z: &Word, exponent: ExtInt) -> Result<Self, WordError> {
        let (conj, core) = cyclic_core(z)?;
        Ok(PowerWord {
            conj,
            core,
            exponent,
        })
    }

    pub fn exponent(&self) -> &ExtInt {
        &self.exponent
    }

    pub fn conj(&self) -> &Word {
        &self.conj
    }

    pub fn core(&self) -> &Word {
        &self.core
    }

    /// `2|w| + |e||core|`, or `None` when the exponent is infinite.
    pub fn len(&self) -> Option<BigUint> {
        match &self.exponent {
            ExtInt::Fin(e) if e.is_zero() => Some(BigUint::zero()),
            ExtInt::Fin(e) => Some(
                BigUint::from(2 * self.conj.len())
                    + e.magnitude() * BigUint::from(self.core.len()),
            ),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.exponent, ExtInt::Fin(e) if e.is_zero())
    }

    pub fn stream(&self) -> PowerStream<'_> {
        let (blocks, inverse) = match &self.exponent {
            ExtInt::Fin(e) => (Some(e.magnitude().clone()), e.sign() == Sign::Minus),
            ExtInt::PosInf => (None, false),
            ExtInt::NegInf => (None, true),
        };
        PowerStream {
            word: self,
            phase: if self.is_empty() { Phase::Done } else { Phase::Conj },
            pos: 0,
            blocks,
            inverse,
        }
    }

    pub fn materialize(&self) -> Result<CompletionWord, WordError> {
        match &self.exponent {
            ExtInt::Fin(_) => {
                let len = self.len().unwrap_or_default();
                match len.to_usize() {
                    Some(l) if l <= MAX_WORD_LEN => {
                        Ok(CompletionWord::Finite(Word::from_reduced(self.stream().collect())))
                    }
                    _ => Err(WordError::TooLong(len.to_string())),
                }
            }
            inf => {
                let period = if *inf == ExtInt::PosInf {
                    self.core.clone()
                } else {
                    self.core.inverse()
                };
                canonicalize_boundary(&self.conj, &period).map(CompletionWord::Infinite)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Conj,
    Core,
    ConjInv,
    Done,
}

pub struct PowerStream<'a> {
    word: &'a PowerWord,
    phase: Phase,
    pos: usize,
    blocks: Option<BigUint>,
    inverse: bool,
}

impl Iterator for PowerStream<'_> {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        loop {
            match self.phase {
                Phase::Done => return None,
                Phase::Conj => {
                    if let Some(&l) = self.word.conj.letters().get(self.pos) {
                        self.pos += 1;
                        return Some(l);
                    }
                    self.phase = Phase::Core;
                    self.pos = 0;
                }
                Phase::Core => {
                    if matches!(&self.blocks, Some(b) if b.is_zero()) {
                        self.phase = Phase::ConjInv;
                        self.pos = 0;
                        continue;
                    }
                    let c = self.word.core.letters();
                    let l = if self.inverse {
                        c[c.len() - 1 - self.pos].inverse()
                    } else {
                        c[self.pos]
                    };
                    self.pos += 1;
                    if self.pos == c.len() {
                        self.pos = 0;
                        if let Some(b) = self.blocks.as_mut() {
                            *b -= BigUint::one();
                        }
                    }
                    return Some(l);
                }
                Phase::ConjInv => {
                    let c = self.word.conj.letters();
                    if self.pos < c.len() {
                        self.pos += 1;
                        return Some(c[c.len() - self.pos].inverse());
                    }
                    self.phase = Phase::Done;
                }
            }
        }
    }
}

/// `z^e` as a point of the completion: a finite word for finite `e`, the
/// boundary word `w · (core^{±1})^∞` for `e = ±∞`.
pub fn z_power(z: &Word, e: &ExtInt) -> Result<CompletionWord, WordError> {
    PowerWord::new(z, e.clone())?.materialize()
}

/// The exponent `e` with `u = z^e` in the completion, if there is one.
/// `z` must be nonempty and not a proper power.
pub fn power_exponent(z: &Word, u: &CompletionWord) -> Option<ExtInt> {
    let (conj, core) = cyclic_core(z).ok()?;
    match u {
        CompletionWord::Infinite(b) => [ExtInt::PosInf, ExtInt::NegInf]
            .into_iter()
            .find(|e| z_power(z, e).ok().as_ref().and_then(CompletionWord::as_boundary) == Some(b)),
        CompletionWord::Finite(w) => {
            if w.is_empty() {
                return Some(ExtInt::zero());
            }
            let g = conj.len();
            let l = w.letters();
            if l.len() < 2 * g + core.len() || (l.len() - 2 * g) % core.len() != 0 {
                return None;
            }
            if l[..g] != *conj.letters() || Word::from_reduced(l[l.len() - g..].to_vec()) != conj.inverse() {
                return None;
            }
            let mid = &l[g..l.len() - g];
            let k = (mid.len() / core.len()) as i64;
            let inv = core.inverse();
            let fits = |c: &Word| mid.chunks(c.len()).all(|ch| ch == c.letters());
            if fits(&core) {
                Some(ExtInt::from(k))
            } else if fits(&inv) {
                Some(ExtInt::from(-k))
            } else {
                None
            }
        }
    }
}
