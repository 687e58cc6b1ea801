//! Brute-force iteration used to cross-check the closed forms and certificates.
//! Steps multiply by the matrix entry by entry and keep type II free parts as
//! exponents of `z`, so none of the column-structure shortcuts are involved.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::Certificate;
use crate::endo::{EndoError, EndoKind, Endomorphism};
use crate::extmath::{ext_add, ext_mul_i64, ExtError, ExtInt, ExtVector, Point};
use crate::words::{
    apply_free, apply_free_boundary, canonicalize_boundary, lcp_streams, reduce, CompletionWord,
    Letter, PowerWord, Word,
};

/// Free coordinate of an orbit state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FreeState {
    Word(CompletionWord),
    /// `z^e` for the map's generator `z`.
    Power(ExtInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitState {
    pub abelian: ExtVector,
    pub free: FreeState,
}

impl OrbitState {
    pub fn from_point(p: &Point) -> Self {
        OrbitState { abelian: p.abelian.clone(), free: FreeState::Word(p.free.clone()) }
    }
}

/// `aQ` computed as a row vector times the matrix.
pub fn abelian_step(e: &Endomorphism, a: &ExtVector) -> Result<ExtVector, ExtError> {
    let q = e.q();
    let mut out = Vec::with_capacity(q.cols());
    for j in 0..q.cols() {
        let mut acc = ExtInt::zero();
        for i in 0..q.rows() {
            acc = ext_add(&acc, &ext_mul_i64(q.get(i, j), &a.0[i]))?;
        }
        out.push(acc);
    }
    Ok(ExtVector(out))
}

fn dot(a: &ExtVector, ell: &[i64]) -> Result<ExtInt, ExtError> {
    a.0.iter()
        .zip(ell)
        .try_fold(ExtInt::zero(), |acc, (x, &l)| ext_add(&acc, &ext_mul_i64(l, x)))
}

/// One step of a uniformly continuous map on an orbit state.
pub fn orbit_step(e: &Endomorphism, s: &OrbitState) -> Result<OrbitState, EndoError> {
    if !e.is_uc() {
        return Err(EndoError::NotUniformlyContinuous);
    }
    let abelian = abelian_step(e, &s.abelian)?;
    let free = match e.kind() {
        EndoKind::TypeII(t) => FreeState::Power(dot(&s.abelian, &t.ell)?),
        EndoKind::TypeI(t) => match &s.free {
            FreeState::Word(CompletionWord::Finite(w)) => {
                FreeState::Word(CompletionWord::Finite(apply_free(&t.phi, w)))
            }
            FreeState::Word(CompletionWord::Infinite(_)) if t.phi.is_trivial() => {
                FreeState::Word(CompletionWord::empty())
            }
            FreeState::Word(CompletionWord::Infinite(b)) => {
                FreeState::Word(CompletionWord::Infinite(apply_free_boundary(&t.phi, b)?))
            }
            FreeState::Power(_) => unreachable!("type I states hold words"),
        },
    };
    Ok(OrbitState { abelian, free })
}

fn power_len(z: &Word, e: &ExtInt) -> Option<BigUint> {
    PowerWord::new(z, e.clone()).ok()?.len()
}

/// Exact comparison of `z^e` with a completion word by reading letters.
fn power_equals_word(z: &Word, e: &ExtInt, u: &CompletionWord) -> bool {
    let pw = PowerWord::new(z, e.clone()).expect("z nonempty");
    match (e, u) {
        (ExtInt::Fin(_), CompletionWord::Finite(w)) => {
            pw.len().and_then(|l| l.to_usize()) == Some(w.len())
                && lcp_streams(pw.stream(), w.letters().iter().copied(), w.len()) == w.len()
        }
        (ExtInt::Fin(_), CompletionWord::Infinite(_)) | (_, CompletionWord::Finite(_)) => false,
        (_, CompletionWord::Infinite(b)) => {
            // eventually periodic words agree iff they agree on
            // preperiods plus the product of the periods
            let (h, p) = (b.head().len(), b.period().len());
            let zl = z.len();
            let cap = h + 2 * zl + p * zl + p + zl;
            lcp_streams(pw.stream(), b.stream(), cap) == cap
        }
    }
}

fn states_equal(z: Option<&Word>, x: &OrbitState, y: &OrbitState) -> bool {
    if x.abelian != y.abelian {
        return false;
    }
    match (&x.free, &y.free) {
        (FreeState::Word(a), FreeState::Word(b)) => a == b,
        (FreeState::Power(a), FreeState::Power(b)) => a == b,
        (FreeState::Power(e), FreeState::Word(u)) | (FreeState::Word(u), FreeState::Power(e)) => {
            power_equals_word(z.expect("power states come from type II maps"), e, u)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<OrbitState>,
    /// First index of the detected cycle, with its length.
    pub cycle: Option<(usize, usize)>,
}

/// Iterates up to `steps` times, stopping once a state repeats.
pub fn orbit_iterate(e: &Endomorphism, p: &Point, steps: usize) -> Result<Trajectory, EndoError> {
    let z = e.z();
    let start = OrbitState::from_point(p);
    let mut states = vec![start.clone()];
    let mut index: HashMap<OrbitState, usize> = HashMap::new();
    let mut cur = start;
    for t in 1..=steps {
        cur = orbit_step(e, &cur)?;
        if states_equal(z, &cur, &states[0]) {
            states.push(cur);
            return Ok(Trajectory { states, cycle: Some((0, t)) });
        }
        if let Some(&s) = index.get(&cur) {
            states.push(cur);
            return Ok(Trajectory { states, cycle: Some((s, t - s)) });
        }
        index.insert(cur.clone(), t);
        states.push(cur.clone());
    }
    Ok(Trajectory { states, cycle: None })
}

/// Least `r ≤ horizon` with `p φ^r = p`.
pub fn brute_periodic(e: &Endomorphism, p: &Point, horizon: usize) -> Result<Option<u64>, EndoError> {
    let t = orbit_iterate(e, p, horizon)?;
    Ok(match t.cycle {
        Some((0, len)) => Some(len as u64),
        _ => None,
    })
}

/// Whether an extended integer lies in the open `2^-d` ball about `c`.
pub fn int_in_ball(x: &ExtInt, c: &ExtInt, d: &BigUint) -> bool {
    if x == c {
        return true;
    }
    if x.signum() != c.signum() || x.signum() == 0 {
        return false;
    }
    let big = |v: &ExtInt| v.magnitude().is_none_or(|m| m > *d);
    big(x) && big(c)
}

fn letters_in_ball<I>(x: I, x_len: Option<BigUint>, u: &CompletionWord, d: &BigUint) -> bool
where
    I: Iterator<Item = Letter>,
{
    let Some(need) = (d + 1u32).to_usize() else { return false };
    let k = lcp_streams(x, u.stream(), need);
    if k == need {
        return true;
    }
    // agreement stopped short: only an exact match of two finite words remains
    let ul = u.len();
    x_len.and_then(|l| l.to_usize()) == Some(k) && ul == Some(k)
}

fn free_in_ball(z: Option<&Word>, f: &FreeState, u: &CompletionWord, d: &BigUint) -> bool {
    match f {
        FreeState::Word(w) => {
            if w == u {
                return true;
            }
            letters_in_ball(w.stream(), w.len().map(BigUint::from), u, d)
        }
        FreeState::Power(e) => {
            let z = z.expect("type II state");
            let pw = PowerWord::new(z, e.clone()).expect("z nonempty");
            letters_in_ball(pw.stream(), power_len(z, e), u, d)
        }
    }
}

pub fn state_in_ball(z: Option<&Word>, s: &OrbitState, center: &Point, d: &BigUint) -> bool {
    s.abelian.0.iter().zip(&center.abelian.0).all(|(x, c)| int_in_ball(x, c, d))
        && free_in_ball(z, &s.free, &center.free, d)
}

fn random_word<R: Rng>(rng: &mut R, rank: usize, len: usize, after: Option<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = Letter::new(rng.gen_range(1..=rank), rng.gen_bool(0.5));
        let prev = out.last().copied().or(after);
        if prev != Some(l.inverse()) {
            out.push(l);
        }
    }
    out
}

fn sample_int<R: Rng>(rng: &mut R, c: &ExtInt, d: &BigUint) -> ExtInt {
    let wide = c.magnitude().is_none_or(|m| m > *d);
    if !wide || c.signum() == 0 || rng.gen_bool(0.25) {
        return c.clone();
    }
    if rng.gen_bool(0.2) {
        return ExtInt::infinity(c.signum());
    }
    let lo = BigInt::from(d.clone()) + 1;
    let span: u64 = if rng.gen_bool(0.5) { 8 } else { 1 << 40 };
    let mag: BigInt = lo + rng.gen_range(0..span);
    ExtInt::Fin(if c.signum() < 0 { -mag } else { mag })
}

fn sample_word<R: Rng>(rng: &mut R, rank: usize, u: &CompletionWord, d: &BigUint, z: Option<&Word>) -> CompletionWord {
    let Some(keep) = (d + 1u32).to_usize().filter(|&k| k <= 1 << 16) else {
        return u.clone();
    };
    let fits = u.len().is_none_or(|l| l >= keep);
    if !fits || rng.gen_bool(0.15) {
        return u.clone();
    }
    let prefix: Vec<Letter> = u.stream().take(keep).collect();
    let last = prefix.last().copied();
    let choice = rng.gen_range(0..3);
    if choice == 0 {
        if let (Some(z), CompletionWord::Infinite(_)) = (z, u) {
            // long finite powers of z imitate z^{±∞}
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let e = BigInt::from(keep + rng.gen_range(0..16)) * sign;
            if let Ok(w) = PowerWord::new(z, ExtInt::Fin(e)).and_then(|p| p.materialize()) {
                return w;
            }
        }
    }
    let tail_len = rng.gen_range(0..6);
    let tail = random_word(rng, rank, tail_len, last);
    let head: Vec<Letter> = prefix.into_iter().chain(tail).collect();
    if choice == 1 {
        return CompletionWord::Finite(reduce(head));
    }
    let period_len = rng.gen_range(1..5);
    let period = reduce(random_word(rng, rank, period_len, None));
    let head = reduce(head);
    match canonicalize_boundary(&head, &period) {
        Ok(b) => CompletionWord::Infinite(b),
        Err(_) => CompletionWord::Finite(head),
    }
}

/// `count` seeded samples from the open `2^-d` ball about `p`, each checked
/// to lie in the ball.
pub fn ball_points(e: &Endomorphism, p: &Point, d: &BigUint, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = e.z();
    let center = OrbitState::from_point(p);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 20 * count + 20 {
        tries += 1;
        let abelian = ExtVector(p.abelian.0.iter().map(|c| sample_int(&mut rng, c, d)).collect());
        let free = sample_word(&mut rng, e.n(), &p.free, d, z);
        let q = Point::new(abelian, free);
        if state_in_ball(z, &OrbitState::from_point(&q), p, d) {
            out.push(q);
        }
    }
    debug_assert!(state_in_ball(z, &center, p, d));
    out
}

#[derive(Clone, Debug, Default)]
pub struct CertCheck {
    pub points: usize,
    /// Sample points that landed back in the ball, with the offending step.
    pub returns: Vec<(Point, u64)>,
}

impl CertCheck {
    pub fn passed(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Iterates the center and sampled points of the certified ball for steps
/// `N < r ≤ N + horizon` and records any return to the ball.
pub fn validate_certificate(
    e: &Endomorphism,
    p: &Point,
    cert: &Certificate,
    horizon: usize,
    samples: usize,
    seed: u64,
) -> Result<CertCheck, EndoError> {
    let z = e.z();
    let mut pts = vec![p.clone()];
    pts.extend(ball_points(e, p, &cert.d, samples, seed));
    let mut check = CertCheck { points: pts.len(), returns: Vec::new() };
    for q in pts {
        let mut s = OrbitState::from_point(&q);
        for r in 1..=(cert.steps + horizon) {
            s = orbit_step(e, &s)?;
            if r > cert.steps && state_in_ball(z, &s, p, &cert.d) {
                check.returns.push((q.clone(), r as u64));
                break;
            }
        }
    }
    Ok(check)
}

/// `B(a) = max_{0≤s≤t} |λ_s ⋯ λ_t|` along the column path from `i`, read
/// directly off the matrix over `steps` entries.
pub fn brute_path_bound(e: &Endomorphism, i: usize, steps: usize) -> BigInt {
    let q = e.q();
    let mut lams = Vec::with_capacity(steps);
    let mut j = i;
    for _ in 0..steps {
        let row = (0..q.rows()).find(|&r| q.get(r, j) != 0);
        match row {
            Some(r) => {
                lams.push(q.get(r, j));
                j = r;
            }
            None => {
                lams.push(0);
                break;
            }
        }
    }
    let mut best = BigInt::one();
    for s in 0..lams.len() {
        let mut prod = BigInt::one();
        for &l in &lams[s..] {
            prod *= l;
            if prod.abs() > best {
                best = prod.abs();
            }
            if prod.is_zero() {
                break;
            }
        }
    }
    best
}
