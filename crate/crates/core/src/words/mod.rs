//! Reduced words of `F_n`, eventually periodic boundary words, and the prefix
//! ultrametric on the completion `F̂_n`.

mod boundary;
mod fold;
mod free_endo;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use boundary::{
    canonicalize_boundary, dist, lcp_len, lcp_streams, power_exponent, z_power, BoundaryWord,
    CompletionWord, PowerWord,
};
pub use fold::{fold_images, FoldResult};
pub use free_endo::{apply_free, apply_free_boundary, is_injective, FreeEndo};

/// Longest word the library will materialize letter by letter.
pub const MAX_WORD_LEN: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("empty word where a nonempty word is required")]
    Empty,
    #[error("boundary period cancels to a finite word")]
    DegeneratePeriod,
    #[error("invalid letter {0:?}")]
    BadLetter(char),
    #[error("malformed word {0:?}")]
    Malformed(String),
    #[error("generator {gen} exceeds rank {rank}")]
    RankExceeded { gen: usize, rank: usize },
    #[error("endomorphism is not injective")]
    NotInjective,
    #[error("word of length {0} is too long to materialize")]
    TooLong(String),
}

/// A generator `a_i` or its inverse. Stored as `±i` with `i ≥ 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(i32);

impl Letter {
    /// `gen` is 1-based.
    pub fn new(gen: usize, inverse: bool) -> Letter {
        assert!(gen >= 1 && gen <= i32::MAX as usize, "generator index out of range");
        let g = gen as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn gen(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new((c as u8 - b'a') as usize + 1, false)),
            'A'..='Z' => Some(Letter::new((c as u8 - b'A') as usize + 1, true)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.gen();
        if g <= 26 {
            let base = if self.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + (g - 1) as u8) as char)
        } else if self.is_inverse() {
            write!(f, "X{g}")
        } else {
            write!(f, "x{g}")
        }
    }
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    push_reduced(&mut out, raw);
    Word(out)
}

fn push_reduced<I: IntoIterator<Item = Letter>>(out: &mut Vec<Letter>, raw: I) {
    for l in raw {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Generator `x_gen^{±1}` as a word.
    pub fn generator(gen: usize) -> Word {
        Word(vec![Letter::new(gen, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        push_reduced(&mut out, other.0.iter().copied());
        Word(out)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::new();
        for _ in 0..k.unsigned_abs() {
            push_reduced(&mut out, base.0.iter().copied());
        }
        Word(out)
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.gen()).max().unwrap_or(0)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Exponent sums of each generator.
    pub fn abelianization(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank.max(self.max_generator())];
        for l in &self.0 {
            v[l.gen() - 1] += if l.is_inverse() { -1 } else { 1 };
        }
        v
    }

    /// Common prefix length with another finite word.
    pub fn common_prefix(&self, other: &Word) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Prefix of length `k` (or the whole word if shorter).
    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.len())].to_vec())
    }

    pub(crate) fn from_reduced(v: Vec<Letter>) -> Word {
        debug_assert!(v.windows(2).all(|w| w[0] != w[1].inverse()));
        Word(v)
    }

    pub(crate) fn into_letters(self) -> Vec<Letter> {
        self.0
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "1" || t.is_empty() || t == "ε" {
            return Ok(Word::empty());
        }
        let mut raw = Vec::with_capacity(t.len());
        for c in t.chars() {
            raw.push(Letter::from_char(c).ok_or(WordError::BadLetter(c))?);
        }
        Ok(reduce(raw))
    }
}

/// Splits `z = w · core · w⁻¹` with `core` cyclically reduced.
pub fn cyclic_core(z: &Word) -> Result<(Word, Word), WordError> {
    if z.is_empty() {
        return Err(WordError::Empty);
    }
    let l = z.letters();
    let mut k = 0;
    while 2 * k + 1 < l.len() && l[k] == l[l.len() - 1 - k].inverse() {
        k += 1;
    }
    Ok((
        Word(l[..k].to_vec()),
        Word(l[k..l.len() - k].to_vec()),
    ))
}

/// Smallest `d | |c|` with `c = (c[..d])^(|c|/d)`.
fn root_period(c: &[Letter]) -> usize {
    let n = c.len();
    (1..=n)
        .find(|&d| n % d == 0 && (d..n).all(|i| c[i] == c[i - d]))
        .unwrap_or(n)
}

/// `w = z^k` with `z` not a proper power and `k` maximal.
pub fn primitive_root(w: &Word) -> Result<(Word, usize), WordError> {
    let (g, core) = cyclic_core(w)?;
    let d = root_period(core.letters());
    let root = Word(core.letters()[..d].to_vec());
    let z = g.mul(&root).mul(&g.inverse());
    Ok((z, core.len() / d))
}

pub fn is_proper_power(w: &Word) -> bool {
    matches!(primitive_root(w), Ok((_, k)) if k > 1)
}

/// All reduced words over `rank` generators with length at most `max_len`,
/// in shortlex order.
pub fn enumerate_reduced(rank: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (1..=rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(l.inverse()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aA"), Word::empty());
        assert_eq!(w("abBc"), w("ac"));
        assert_eq!(reduce(Vec::new()), Word::empty());
        assert_eq!(w("aA").to_string(), "1");
    }

    #[test]
    fn cyclic_core_examples() {
        assert_eq!(cyclic_core(&w("abA")).unwrap(), (w("a"), w("b")));
        assert_eq!(cyclic_core(&w("ab")).unwrap(), (Word::empty(), w("ab")));
        assert_eq!(cyclic_core(&w("abcB A")).unwrap(), (w("ab"), w("c")));
        assert_eq!(cyclic_core(&Word::empty()), Err(WordError::Empty));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(&w("abab")).unwrap(), (w("ab"), 2));
        assert_eq!(primitive_root(&w("aaa")).unwrap(), (w("a"), 3));
        let (z, k) = primitive_root(&w("abcbcA")).unwrap();
        assert_eq!((z.clone(), k), (w("abcA"), 2));
        assert_eq!(z.pow(2), w("abcbcA"));
        assert_eq!(primitive_root(&Word::empty()), Err(WordError::Empty));
    }

    #[test]
    fn text_format() {
        assert_eq!(w("abA").to_string(), "abA");
        assert!("ab3".parse::<Word>().is_err());
        assert_eq!(Letter::new(30, true).to_string(), "X30");
    }

    #[test]
    fn enumeration_counts() {
        // 1 + 4 + 12 + 36 reduced words of length <= 3 in F_2
        assert_eq!(enumerate_reduced(2, 3).len(), 53);
    }
}
