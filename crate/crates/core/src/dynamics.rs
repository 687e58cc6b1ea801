//! Periodicity decisions, the periodic/wandering classifier for uniformly
//! continuous type II maps with explicit wandering balls, and budgeted probes
//! for type I automorphisms and free endomorphisms.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::colstruct::{is_uniform, matrix_order, ColStructure};
use crate::endo::{EndoError, EndoKind, Endomorphism};
use crate::extmath::{product_dist, Dyadic, ExtError, ExtVector, Point, PrefixLen};
use crate::words::{
    apply_free, apply_free_boundary, cyclic_core, dist, enumerate_reduced, lcp_len,
    power_exponent, z_power, CompletionWord, FreeEndo, Letter, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("point is periodic")]
    Periodic,
    #[error("not a uniformly continuous type II endomorphism")]
    NotTypeII,
    #[error("not a uniformly continuous type I automorphism with uniform matrix: {0}")]
    NotAutomorphism(String),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Ext(#[from] ExtError),
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Least period of `a` under `a ↦ aQ`, if `a` is periodic.
pub fn decide_periodic_abelian(s: &ColStructure, a: &ExtVector) -> Result<Option<u64>, ExtError> {
    if s.iterate_ext(a, s.horizon)? != *a {
        return Ok(None);
    }
    for d in divisors(s.horizon) {
        if s.iterate_ext(a, d)? == *a {
            return Ok(Some(d));
        }
    }
    unreachable!("the horizon itself returns")
}

fn uc_type_ii(e: &Endomorphism) -> Result<(&ColStructure, &Word, usize, i64), DynError> {
    let (k, lam) = e.special_form().ok_or(DynError::NotTypeII)?;
    let col = e.col_structure().ok_or(DynError::NotTypeII)?;
    Ok((col, e.z().expect("type II"), k, lam))
}

/// Least period of a completion point under a uc type II map. Once the
/// abelian part returns after `p` steps, the free part after `p` steps is
/// `z^{λ (aQ^{p-1})_k}` for every later return as well, so a single exponent
/// comparison decides.
pub fn decide_periodic_type_ii(e: &Endomorphism, p: &Point) -> Result<Option<u64>, DynError> {
    let (col, z, _, _) = uc_type_ii(e)?;
    let Some(pa) = decide_periodic_abelian(col, &p.abelian)? else {
        return Ok(None);
    };
    let exponent = e.closed_form_exponent(&p.abelian, pa)?;
    Ok((power_exponent(z, &p.free) == Some(exponent)).then_some(pa))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    AllInfiniteFiniteWord,
    BoundaryNotZ,
    FiniteEntries,
    ZInfinity1,
    ZInfinity2,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::AllInfiniteFiniteWord => "all-infinite-finite-word",
            CaseTag::BoundaryNotZ => "boundary-not-z",
            CaseTag::FiniteEntries => "finite-entries",
            CaseTag::ZInfinity1 => "z-infinity-1",
            CaseTag::ZInfinity2 => "z-infinity-2",
        })
    }
}

/// The open ball of radius `2^-d` about the point misses its `r`-th image
/// for every `r > steps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub d: BigUint,
    pub steps: usize,
    pub case: CaseTag,
}

impl Certificate {
    pub fn radius(&self) -> Dyadic {
        Dyadic::NegPow(self.d.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Periodic(u64),
    Wandering(Option<Certificate>),
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Periodic(p) => write!(f, "periodic period={p}"),
            Classification::Wandering(Some(c)) => write!(
                f,
                "wandering radius={} N={} case={}",
                c.radius(),
                c.steps,
                c.case
            ),
            Classification::Wandering(None) => f.write_str("wandering"),
        }
    }
}

pub fn classify_type_ii(e: &Endomorphism, p: &Point) -> Result<Classification, DynError> {
    match decide_periodic_type_ii(e, p)? {
        Some(period) => Ok(Classification::Periodic(period)),
        None => Ok(Classification::Wandering(wandering_certificate(e, p)?)),
    }
}

fn prefix_to_big(p: PrefixLen) -> BigUint {
    match p {
        PrefixLen::Finite(n) => n,
        PrefixLen::Infinite => unreachable!("distinct points"),
    }
}

/// A ball about a non-periodic point that its images eventually leave.
pub fn wandering_certificate(e: &Endomorphism, p: &Point) -> Result<Option<Certificate>, DynError> {
    if decide_periodic_type_ii(e, p)?.is_some() {
        return Err(DynError::Periodic);
    }
    let (col, z, k, lam) = uc_type_ii(e)?;
    let (w, core) = cyclic_core(z).expect("z nonempty");
    let m = col.m;
    let a = &p.abelian;
    let one = BigUint::one();
    let delta_a = a.max_finite_magnitude();
    let tau = (0..m)
        .filter(|&i| col.eventually_unit(i))
        .map(|i| col.bound_b(i).expect("eventually unit").magnitude().clone())
        .max()
        .unwrap_or_else(BigUint::one)
        .max(BigUint::one());
    let lam_abs = BigUint::from(lam.unsigned_abs());
    let wl = BigUint::from(w.len());
    let cl = BigUint::from(core.len());

    let cert = match &p.free {
        CompletionWord::Finite(u) if a.all_infinite() => Certificate {
            d: BigUint::from(u.len()).max(one),
            steps: 0,
            case: CaseTag::AllInfiniteFiniteWord,
        },
        CompletionWord::Finite(u) => {
            let delta = delta_a.max(BigUint::from(u.len()));
            Certificate {
                d: (tau * delta).max(one),
                steps: m,
                case: CaseTag::FiniteEntries,
            }
        }
        CompletionWord::Infinite(_) => {
            let plus = z_power(z, &crate::extmath::ExtInt::PosInf).expect("z nonempty");
            let minus = z_power(z, &crate::extmath::ExtInt::NegInf).expect("z nonempty");
            if p.free == plus || p.free == minus {
                let bk = if col.eventually_unit(k) {
                    col.bound_b(k).expect("eventually unit").magnitude().clone()
                } else {
                    BigUint::one()
                };
                let d1 = BigUint::from(2u32) * &wl + &lam_abs * &tau * &delta_a * &cl;
                let d2 = BigUint::from(2u32) * &wl + &lam_abs * &delta_a * bk * &cl;
                let cycle = &col.cycles[col.cycle_of[k]];
                if cycle.iter().all(|&j| a.0[j].is_finite()) {
                    Certificate { d: d2.max(one), steps: m, case: CaseTag::ZInfinity2 }
                } else {
                    Certificate { d: d1.max(one), steps: m, case: CaseTag::ZInfinity1 }
                }
            } else {
                let delta = prefix_to_big(lcp_len(&p.free, &plus))
                    .max(prefix_to_big(lcp_len(&p.free, &minus)));
                Certificate {
                    d: (delta + wl).max(one),
                    steps: 0,
                    case: CaseTag::BoundaryNotZ,
                }
            }
        }
    };
    Ok(Some(cert))
}

/// Result of iterating a type I automorphism with stride `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaReport {
    pub converged: bool,
    /// The closed orbit reached, under single steps.
    pub orbit: Vec<Point>,
    pub q_used: u64,
    /// Strides taken before entering the closed orbit.
    pub steps: usize,
}

/// Longest free word tracked by the automorphism probe.
pub const AUTO_WORD_CAP: usize = 1 << 16;

fn free_len(p: &Point) -> usize {
    p.free.as_finite().map_or(0, |w| w.len())
        + p.free.as_boundary().map_or(0, |b| b.head().len() + b.period().len())
}

pub fn classify_auto_point(e: &Endomorphism, p: &Point, budget: usize) -> Result<OmegaReport, DynError> {
    let EndoKind::TypeI(t) = e.kind() else {
        return Err(DynError::NotAutomorphism("type II map".into()));
    };
    if !e.p().is_zero() {
        return Err(DynError::NotAutomorphism("P is nonzero".into()));
    }
    let u = is_uniform(&t.q).map_err(|err| DynError::NotAutomorphism(err.to_string()))?;
    if !t.phi.is_automorphism() {
        return Err(DynError::NotAutomorphism("free part is not an automorphism".into()));
    }
    let q = matrix_order(&u);
    let stride = |x: &Point| -> Result<Point, DynError> {
        let mut y = x.clone();
        for _ in 0..q {
            y = e.apply_completion(&y)?;
        }
        Ok(y)
    };
    let mut seen: HashMap<Point, usize> = HashMap::new();
    let mut cur = p.clone();
    for t in 0..=budget {
        if let Some(&s) = seen.get(&cur) {
            let mut orbit = vec![cur.clone()];
            let mut y = e.apply_completion(&cur)?;
            while y != cur {
                orbit.push(y.clone());
                y = e.apply_completion(&y)?;
            }
            return Ok(OmegaReport { converged: true, orbit, q_used: q, steps: s });
        }
        if t == budget || free_len(&cur) > AUTO_WORD_CAP {
            break;
        }
        seen.insert(cur.clone(), t);
        cur = stride(&cur)?;
    }
    Ok(OmegaReport { converged: false, orbit: Vec::new(), q_used: q, steps: budget })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LndVerdict {
    /// `|u| ≥ p ⇒ |uΦ| ≥ |u|` for every reduced word `u`.
    Yes(usize),
    /// Length-decreasing words at every length of the scanned tail.
    NoUpTo(Vec<Word>),
    /// No certificate; the scan found no shortening beyond the given length.
    Unknown(usize),
}

/// Cancellation when `φ(x)φ(y)` is freely reduced.
fn cancellation(phi: &FreeEndo, x: Letter, y: Letter) -> usize {
    let fx = letter_image(phi, x);
    let fy = letter_image(phi, y);
    fx.inverse().common_prefix(&fy)
}

fn letter_image(phi: &FreeEndo, l: Letter) -> Word {
    let img = phi.image(l.gen());
    if l.is_inverse() {
        img.inverse()
    } else {
        img.clone()
    }
}

/// Local slack: each letter image keeps a letter after cancelling on both
/// sides, which forces `|uΦ| ≥ |u|` for every reduced `u`.
fn slack_certificate(phi: &FreeEndo) -> bool {
    let n = phi.rank();
    let letters: Vec<Letter> = (1..=n)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    if phi.images().iter().any(Word::is_empty) {
        return false;
    }
    let len = |l: Letter| phi.image(l.gen()).len();
    for &x in &letters {
        for &y in letters.iter().filter(|&&y| y != x.inverse()) {
            let cxy = cancellation(phi, x, y);
            if cxy + 1 > len(x).min(len(y)) {
                return false;
            }
            for &z in letters.iter().filter(|&&z| z != y.inverse()) {
                if cxy + cancellation(phi, y, z) + 1 > len(y) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn check_eventually_lnd(phi: &FreeEndo, cutoff: usize) -> LndVerdict {
    let mut witness: Vec<Option<Word>> = vec![None; cutoff + 1];
    for u in enumerate_reduced(phi.rank(), cutoff) {
        let l = u.len();
        if witness[l].is_none() && apply_free(phi, &u).len() < l {
            witness[l] = Some(u);
        }
    }
    let threshold = (0..=cutoff)
        .rev()
        .find(|&l| witness[l].is_some())
        .map_or(0, |l| l + 1);
    if threshold == 0 && slack_certificate(phi) {
        return LndVerdict::Yes(0);
    }
    let tail_start = cutoff / 2 + 1;
    if cutoff >= 1 && (tail_start..=cutoff).all(|l| witness[l].is_some()) {
        return LndVerdict::NoUpTo(witness[tail_start..].iter().flatten().cloned().collect());
    }
    LndVerdict::Unknown(threshold)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LndOutcome {
    Recurrent { step: usize },
    Wandering { reason: String },
    Unknown,
}

fn free_step(phi: &FreeEndo, u: &CompletionWord) -> Option<CompletionWord> {
    match u {
        CompletionWord::Finite(w) => Some(CompletionWord::Finite(apply_free(phi, w))),
        CompletionWord::Infinite(b) => apply_free_boundary(phi, b).ok().map(CompletionWord::Infinite),
    }
}

/// Recurrent/wandering probe for an eventually length-nondecreasing map with
/// threshold `p`. A return counts once an iterate agrees with `u` past
/// `max(p, |u|)` letters, where a boundary word counts its head plus two
/// periods.
pub fn dichotomy_lnd(phi: &FreeEndo, p: usize, u: &CompletionWord, budget: usize) -> LndOutcome {
    let size = match u {
        CompletionWord::Finite(w) => w.len(),
        CompletionWord::Infinite(b) => b.head().len() + 2 * b.period().len(),
    };
    let target = BigUint::from(p.max(size));
    let mut seen: HashMap<CompletionWord, usize> = HashMap::new();
    let mut cur = u.clone();
    for step in 1..=budget {
        let Some(next) = free_step(phi, &cur) else { return LndOutcome::Unknown };
        cur = next;
        if dist(&cur, u).lt_neg_pow(&target) {
            return LndOutcome::Recurrent { step };
        }
        if let CompletionWord::Finite(w) = &cur {
            if w.len() >= p && u.len().is_some_and(|ul| w.len() > ul) {
                return LndOutcome::Wandering {
                    reason: format!("iterate {step} has length {} beyond the threshold", w.len()),
                };
            }
        }
        if seen.insert(cur.clone(), step).is_some() {
            return if u.is_finite() {
                LndOutcome::Wandering {
                    reason: format!("orbit closes at step {step} without revisiting the point"),
                }
            } else {
                LndOutcome::Unknown
            };
        }
        if cur.len().is_some_and(|l| l > AUTO_WORD_CAP) {
            break;
        }
    }
    LndOutcome::Unknown
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivReport {
    pub point_period: Option<usize>,
    pub free_period: Option<usize>,
    /// First step at which the point comes within `2^-radius` of itself.
    pub point_near_return: Option<usize>,
    pub free_near_return: Option<usize>,
    pub violations: Vec<String>,
}

/// Checks on a concrete orbit that the free coordinate carries the
/// periodicity and recurrence of the whole point.
pub fn equivs_probe(e: &Endomorphism, p: &Point, budget: usize, radius: u64) -> Result<EquivReport, DynError> {
    let EndoKind::TypeI(t) = e.kind() else { return Err(DynError::NotTypeII) };
    if !e.is_uc() {
        return Err(EndoError::NotUniformlyContinuous.into());
    }
    let r = BigUint::from(radius);
    let mut point_period = None;
    let mut free_period = None;
    let mut point_near = None;
    let mut free_near = None;
    let mut cur = p.clone();
    let mut free = p.free.clone();
    for step in 1..=budget {
        cur = e.apply_completion(&cur)?;
        free = if t.phi.is_trivial() {
            CompletionWord::empty()
        } else {
            match free_step(&t.phi, &free) {
                Some(f) => f,
                None => break,
            }
        };
        if point_period.is_none() && cur == *p {
            point_period = Some(step);
        }
        if free_period.is_none() && free == p.free {
            free_period = Some(step);
        }
        if point_near.is_none() && product_dist(&cur, p)?.lt_neg_pow(&r) {
            point_near = Some(step);
        }
        if free_near.is_none() && dist(&free, &p.free).lt_neg_pow(&r) {
            free_near = Some(step);
        }
        if point_period.is_some() || free_len(&cur) > AUTO_WORD_CAP {
            break;
        }
    }
    let mut violations = Vec::new();
    if let Some(n) = point_period {
        if free_period.is_none_or(|f| n % f != 0) {
            violations.push(format!("point returns at step {n} but its free part does not"));
        }
    }
    if free_period.is_none() && point_period.is_some() {
        violations.push("free part never returns yet the point does".into());
    }
    if let Some(n) = point_near {
        if free_near.is_none_or(|f| f > n) {
            violations.push(format!("point comes back near at step {n} before its free part"));
        }
    }
    Ok(EquivReport {
        point_period,
        free_period,
        point_near_return: point_near,
        free_near_return: free_near,
        violations,
    })
}
