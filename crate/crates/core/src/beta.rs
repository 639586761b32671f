//! The β-transformation `T_β(x) = βx mod 1` on `[0, 1)` and its periodic
//! points.
//!
//! Digits follow the greedy convention `d = ⌊βx⌋`. For rational β the
//! periodic points are found exactly: admissible digit words are generated
//! depth first, each word's candidate point is solved for in closed form,
//! and the candidate is accepted only if its exact orbit reproduces the word.
//! For β known only to an interval (such as `exp(2λ_∞)`), words are counted
//! with Parry's lexicographic criterion against the quasi-greedy expansion
//! of 1 at each endpoint, which brackets the count for every β inside.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::roots::rational_to_f64;

/// Refuse enumerations with more than this many candidate digit words.
pub const CANDIDATE_BUDGET: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Beta {
    Exact(BigRational),
    /// β lies in the closed interval `[lo, hi]`.
    Interval { lo: BigRational, hi: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSystem {
    beta: Beta,
}

/// Number of periodic points, exact when `min == max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BetaCount {
    pub min: u64,
    pub max: u64,
}

impl BetaCount {
    fn exact(n: u64) -> Self {
        BetaCount { min: n, max: n }
    }

    pub fn is_exact(&self) -> bool {
        self.min == self.max
    }

    pub fn value(&self) -> Option<u64> {
        self.is_exact().then_some(self.min)
    }
}

fn ceil_u32(r: &BigRational) -> Result<u32> {
    r.ceil()
        .to_integer()
        .to_u32()
        .ok_or_else(|| Error::Budget(format!("β = {r} is too large")))
}

impl BetaSystem {
    pub fn exact(beta: BigRational) -> Result<Self> {
        if !beta.is_positive() {
            return domain("β must be positive");
        }
        Ok(BetaSystem {
            beta: Beta::Exact(beta),
        })
    }

    pub fn interval(lo: BigRational, hi: BigRational) -> Result<Self> {
        if !lo.is_positive() || lo > hi {
            return domain(format!("[{lo}, {hi}] is not an interval of positive reals"));
        }
        if lo == hi {
            return Self::exact(lo);
        }
        Ok(BetaSystem {
            beta: Beta::Interval { lo, hi },
        })
    }

    /// β within `radius` of the double `center`.
    pub fn from_f64(center: f64, radius: f64) -> Result<Self> {
        let to_rat = |v: f64| {
            BigRational::from_float(v).ok_or_else(|| Error::Domain(format!("{v} is not finite")))
        };
        Self::interval(to_rat(center - radius)?, to_rat(center + radius)?)
    }

    pub fn beta(&self) -> &Beta {
        &self.beta
    }

    fn bounds(&self) -> (&BigRational, &BigRational) {
        match &self.beta {
            Beta::Exact(b) => (b, b),
            Beta::Interval { lo, hi } => (lo, hi),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bounds();
        rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into())))
    }

    /// Digits `0..⌈β⌉`.
    pub fn alphabet_size(&self) -> Result<u32> {
        ceil_u32(self.bounds().1)
    }

    /// `log⁺ β`.
    pub fn entropy(&self) -> f64 {
        self.to_f64().ln().max(0.0)
    }

    /// `T_β(x) = {βx}` for exact β and `x ∈ [0, 1)`.
    pub fn step(&self, x: &BigRational) -> Result<BigRational> {
        let Beta::Exact(b) = &self.beta else {
            return domain("exact iteration needs an exact β");
        };
        if x.is_negative() || x >= &BigRational::one() {
            return domain(format!("x = {x} is outside [0, 1)"));
        }
        Ok((b * x).fract())
    }

    fn check_period(&self, n: u32) -> Result<()> {
        if n == 0 {
            return domain("period must be at least 1");
        }
        let (lo, hi) = self.bounds();
        if lo <= &BigRational::one() && hi >= &BigRational::one() {
            if self.beta == Beta::Exact(BigRational::one()) {
                return domain("β = 1 is the identity map; every point is periodic");
            }
            return domain("the β interval contains 1");
        }
        if hi > &BigRational::one() {
            let words = (self.alphabet_size()? as u128).checked_pow(n);
            if words.map_or(true, |w| w > CANDIDATE_BUDGET) {
                return Err(Error::Budget(format!(
                    "{}^{n} candidate words exceed 2^26",
                    self.alphabet_size()?
                )));
            }
        }
        Ok(())
    }

    /// Points of `[0, 1)` with `T_β^n x = x`, exact β only.
    pub fn periodic_points(&self, n: u32) -> Result<Vec<BigRational>> {
        self.check_period(n)?;
        let Beta::Exact(b) = &self.beta else {
            return domain("periodic points are listed for exact β only; use periodic_count");
        };
        if b < &BigRational::one() {
            return Ok(vec![BigRational::zero()]);
        }
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(n as usize);
        enumerate_words(b, n as usize, &mut word, BigRational::one(), &mut |w| {
            if let Some(x) = accept_word(b, w) {
                out.push(x);
            }
        });
        out.sort();
        Ok(out)
    }

    /// `|{x : T_β^n x = x}|`.
    pub fn periodic_count(&self, n: u32) -> Result<BetaCount> {
        self.check_period(n)?;
        let (lo, hi) = self.bounds();
        if hi < &BigRational::one() {
            return Ok(BetaCount::exact(1));
        }
        if lo <= &BigRational::one() {
            return domain(format!("[{lo}, {hi}] contains β = 1, where every point is fixed"));
        }
        match &self.beta {
            Beta::Exact(_) => Ok(BetaCount::exact(self.periodic_points(n)?.len() as u64)),
            Beta::Interval { .. } => parry_count(lo, hi, n as usize),
        }
    }
}

/// Depth-first over admissible words: after a prefix, the image of its
/// cylinder under `T^j` is `[0, u)`, and digit `d` may follow iff `d < βu`.
fn enumerate_words(
    b: &BigRational,
    n: usize,
    word: &mut Vec<u32>,
    u: BigRational,
    visit: &mut impl FnMut(&[u32]),
) {
    if word.len() == n {
        visit(word);
        return;
    }
    let bu = b * &u;
    let mut d = 0u32;
    while BigRational::from_integer(d.into()) < bu {
        let next = (&bu - BigRational::from_integer(d.into())).min(BigRational::one());
        word.push(d);
        enumerate_words(b, n, word, next, visit);
        word.pop();
        d += 1;
    }
}

/// The point `x = Σ d_i β^{n−1−i} / (β^n − 1)` if it lies in `[0, 1)` and
/// its greedy digits under `T_β` are exactly `w`.
fn accept_word(b: &BigRational, w: &[u32]) -> Option<BigRational> {
    let mut num = BigRational::zero();
    for &d in w {
        num = num * b + BigRational::from_integer(d.into());
    }
    let x = num / (b.pow(w.len() as i32) - BigRational::one());
    if x.is_negative() || x >= BigRational::one() {
        return None;
    }
    let mut y = x.clone();
    for &d in w {
        let by = b * &y;
        if by.floor().to_integer() != BigInt::from(d) {
            return None;
        }
        y = by.fract();
    }
    (y == x).then_some(x)
}

/// The first `len` digits of the quasi-greedy expansion of 1 in base β,
/// with its period when the greedy expansion of 1 is finite (the
/// quasi-greedy one is then purely periodic).
fn quasi_greedy_one(beta: &BigRational, len: usize) -> (Vec<u32>, Option<usize>) {
    let mut digits = Vec::with_capacity(len);
    let mut r = BigRational::one();
    while digits.len() < len {
        let p = beta * &r;
        let t = p.floor();
        let d = t.to_integer().to_u32().unwrap();
        r = p - t;
        if r.is_zero() {
            // Greedy digits t_1 … t_k of 1 give (t_1 … t_{k-1} (t_k − 1))^∞.
            digits.push(d - 1);
            let period = digits.clone();
            while digits.len() < len {
                digits.push(period[digits.len() % period.len()]);
            }
            return (digits, Some(period.len()));
        }
        digits.push(d);
    }
    (digits, None)
}

/// Words of length `n` passing Parry's criterion for a single β: `w^∞`
/// expands a point of `[0, 1)` iff every rotation of it is
/// lexicographically below the quasi-greedy expansion of 1. Comparisons
/// that the computed digits cannot settle count as `undecided_passes`.
fn parry_words(beta: &BigRational, n: usize, undecided_passes: bool) -> Result<u64> {
    let alphabet = ceil_u32(beta)? as u64;
    // Periodic comparisons settle within a couple of periods; more digits
    // only shrink the undecided set.
    let (reference, period) = quasi_greedy_one(beta, 4 * n + 16);
    // Purely periodic sequences of periods n and p agreeing on n + p digits
    // are equal (Fine and Wilf).
    let equal_after = period.map(|p| n + p).filter(|&m| m <= reference.len());
    let mut count = 0u64;
    let mut word = vec![0u32; n];
    for code in 0..alphabet.pow(n as u32) {
        let mut c = code;
        for slot in word.iter_mut().rev() {
            *slot = (c % alphabet) as u32;
            c /= alphabet;
        }
        match word_admissible(&word, &reference, equal_after) {
            Some(true) => count += 1,
            Some(false) => {}
            None => count += undecided_passes as u64,
        }
    }
    Ok(count)
}

/// Range of `|Per_n(T_β)|` over `β ∈ [lo, hi]`. The quasi-greedy expansion
/// of 1 increases with β, so the admissible words grow with β and the
/// endpoints bound the count.
fn parry_count(lo: &BigRational, hi: &BigRational, n: usize) -> Result<BetaCount> {
    Ok(BetaCount {
        min: parry_words(lo, n, false)?,
        max: parry_words(hi, n, true)?,
    })
}

/// `Some(true)` if every rotation `r` has `r^∞ < reference`, `Some(false)` if
/// some rotation is `≥`, `None` if the known digits do not decide.
/// `equal_after` is a prefix length on which agreement implies equality.
fn word_admissible(word: &[u32], reference: &[u32], equal_after: Option<usize>) -> Option<bool> {
    let n = word.len();
    let mut undecided = false;
    for start in 0..n {
        let mut decided = false;
        for (i, &r) in reference.iter().enumerate() {
            let d = word[(start + i) % n];
            if d < r {
                decided = true;
                break;
            }
            if d > r {
                return Some(false);
            }
        }
        if !decided {
            if equal_after.is_some() {
                return Some(false);
            }
            undecided = true;
        }
    }
    if undecided {
        None
    } else {
        Some(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sys(n: i64, d: i64) -> BetaSystem {
        BetaSystem::exact(r(n, d)).unwrap()
    }

    #[test]
    fn steps() {
        let b = sys(3, 2);
        assert_eq!(b.step(&r(0, 1)).unwrap(), r(0, 1));
        assert_eq!(b.step(&r(2, 3)).unwrap(), r(0, 1));
        assert_eq!(b.step(&r(1, 2)).unwrap(), r(3, 4));
        assert!(b.step(&r(1, 1)).is_err());
    }

    #[test]
    fn entropy() {
        assert_eq!(sys(2, 1).entropy(), 2f64.ln());
        assert_eq!(sys(1, 2).entropy(), 0.0);
        assert_eq!(sys(1, 1).entropy(), 0.0);
    }

    #[test]
    fn doubling_map_points() {
        let pts = sys(2, 1).periodic_points(3).unwrap();
        let want: Vec<BigRational> = (0..7).map(|k| r(k, 7)).collect();
        assert_eq!(pts, want);
    }

    #[test]
    fn integer_beta_counts() {
        for m in 2..=4 {
            for n in 1..=6 {
                let c = sys(m, 1).periodic_count(n).unwrap();
                assert_eq!(c.value(), Some(m.pow(n) as u64 - 1), "β={m} n={n}");
            }
        }
    }

    #[test]
    fn contracting_and_identity() {
        assert_eq!(sys(1, 2).periodic_points(5).unwrap(), vec![r(0, 1)]);
        assert_eq!(sys(1, 2).periodic_count(5).unwrap().value(), Some(1));
        assert!(sys(1, 1).periodic_count(2).is_err());
    }

    #[test]
    fn points_are_fixed() {
        let b = sys(5, 3);
        for x in b.periodic_points(6).unwrap() {
            let mut y = x.clone();
            for _ in 0..6 {
                y = b.step(&y).unwrap();
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn parry_matches_enumeration_for_exact_beta() {
        for (p, q) in [(3, 2), (5, 3), (7, 4), (2, 1), (5, 2)] {
            let b = r(p, q);
            for n in 1..=8 {
                let direct = sys(p, q).periodic_count(n).unwrap().min;
                let parry = parry_count(&b, &b, n as usize).unwrap();
                assert_eq!(parry, BetaCount::exact(direct), "β={p}/{q} n={n}");
            }
        }
    }

    #[test]
    fn golden_mean_interval() {
        // 1 = 0.11 in base φ, so admissible words are the cyclic words
        // avoiding 11 (L_n of them, L_n the Lucas numbers), minus the two
        // alternating words when n is even.
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let b = BetaSystem::from_f64(phi, 1e-12).unwrap();
        let lucas = [1u64, 3, 4, 7, 11, 18, 29, 47, 76, 123];
        for n in 1..=10 {
            let want = lucas[n as usize - 1] - if n % 2 == 0 { 2 } else { 0 };
            let c = b.periodic_count(n).unwrap();
            // Just above φ the alternating words become admissible, so the
            // bracket is exactly [L_n − 2, L_n] for even n.
            let expect = if n % 2 == 0 { (want, want + 2) } else { (want, want) };
            assert_eq!((c.min, c.max), expect, "n={n}");
        }
        let above = BetaSystem::interval(BigRational::new(1618034.into(), 1000000.into()), BigRational::new(1618035.into(), 1000000.into())).unwrap();
        for n in 1..=10 {
            assert_eq!(above.periodic_count(n).unwrap().value(), Some(lucas[n as usize - 1]));
        }
        let straddle = BetaSystem::interval(BigRational::one(), BigRational::new(3.into(), 2.into())).unwrap();
        assert!(straddle.periodic_count(2).is_err());
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(sys(3, 1).periodic_count(17), Err(Error::Budget(_))));
    }
}
