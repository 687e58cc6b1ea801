use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{canonicalize_boundary, cyclic_core, fold_images, BoundaryWord, Word, WordError};

/// An endomorphism of `F_n` given by the images of the generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeEndo {
    rank: usize,
    images: Vec<Word>,
    injective: bool,
    automorphism: bool,
    kernel: Option<Word>,
}

impl FreeEndo {
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, WordError> {
        if images.len() != rank {
            return Err(WordError::Malformed(format!(
                "{} images for rank {rank}",
                images.len()
            )));
        }
        if let Some(g) = images.iter().map(Word::max_generator).find(|&g| g > rank) {
            return Err(WordError::RankExceeded { gen: g, rank });
        }
        let (injective, automorphism, kernel) =
            if let Some(j) = images.iter().position(Word::is_empty) {
                (false, false, Some(Word::generator(j + 1)))
            } else {
                let f = fold_images(&images);
                let inj = f.rank() == rank && f.closed_folds == 0;
                (inj, inj && f.is_rose(rank), f.kernel_witness)
            };
        Ok(FreeEndo {
            rank,
            images,
            injective,
            automorphism,
            kernel,
        })
    }

    pub fn identity(rank: usize) -> Self {
        Self::new(rank, (1..=rank).map(Word::generator).collect()).expect("identity is valid")
    }

    pub fn trivial(rank: usize) -> Self {
        Self::new(rank, vec![Word::empty(); rank]).expect("trivial map is valid")
    }

    /// Parses images such as `["ab", "b"]`.
    pub fn from_strs(rank: usize, images: &[&str]) -> Result<Self, WordError> {
        let imgs = images
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Word>, _>>()?;
        Self::new(rank, imgs)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen - 1]
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(Word::is_empty)
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_automorphism(&self) -> bool {
        self.automorphism
    }

    /// A nontrivial element of the kernel, when the map is not injective.
    pub fn kernel_witness(&self) -> Option<&Word> {
        self.kernel.as_ref()
    }

    pub fn compose(&self, then: &FreeEndo) -> FreeEndo {
        let imgs = self.images.iter().map(|w| apply_free(then, w)).collect();
        FreeEndo::new(self.rank, imgs).expect("composition stays in rank")
    }

    /// Integer matrix whose row `i` is the abelianized image of `a_i`.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        self.images
            .iter()
            .map(|w| w.abelianization(self.rank))
            .collect()
    }

    pub fn abelian_determinant(&self) -> BigInt {
        determinant(&self.abelianization())
    }
}

impl fmt::Debug for FreeEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeEndo({self})")
    }
}

impl fmt::Display for FreeEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("]")
    }
}

/// Exact determinant by fraction-free elimination.
pub(crate) fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn apply_free(phi: &FreeEndo, u: &Word) -> Word {
    let mut out: Vec<super::Letter> = Vec::new();
    for l in u.letters() {
        let img = phi.image(l.gen());
        let piece = if l.is_inverse() { img.inverse() } else { img.clone() };
        for x in piece.into_letters() {
            if out.last() == Some(&x.inverse()) {
                out.pop();
            } else {
                out.push(x);
            }
        }
    }
    Word::from_reduced(out)
}

/// Continuous extension of an injective map to the boundary.
pub fn apply_free_boundary(phi: &FreeEndo, x: &BoundaryWord) -> Result<BoundaryWord, WordError> {
    if !phi.is_injective() {
        return Err(WordError::NotInjective);
    }
    let image = apply_free(phi, x.period());
    let (g, core) = cyclic_core(&image)?;
    let head = apply_free(phi, x.head()).mul(&g);
    canonicalize_boundary(&head, &core)
}

pub fn is_injective(phi: &FreeEndo) -> bool {
    phi.is_injective()
}
