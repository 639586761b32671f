//! p-adic numbers at finite precision and the q-transformation on Z_p.
//!
//! The q-transformation multiplies a p-adic integer by q and discards the
//! digits of negative index, landing back in Z_p. When `|q|_p = p^k > 1`
//! each application consumes `k` digits of precision: the output is known
//! modulo `p^{N-k}` when the input is known modulo `p^N`. Every operation
//! here tracks that loss and fails with [`Error::PrecisionExhausted`]
//! instead of inventing digits.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, mod_inverse, valuation_int};
use crate::error::{domain, Error, Result};

/// Exact p-adic valuation of a rational; zero has infinite valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// `v_p(x)`, so that `|x|_p = p^{-v}`.
pub fn padic_valuation(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let bp = BigUint::from(p);
    let num = valuation_int(x.numer(), &bp) as i64;
    let den = valuation_int(x.denom(), &bp) as i64;
    Valuation::Finite(num - den)
}

/// Split a nonzero rational as `p^v · u / w` with `p ∤ u w`, `w > 0`.
fn split_unit(x: &BigRational, p: u64) -> (i64, BigInt, BigInt) {
    let bp = BigInt::from(p);
    let mut u = x.numer().clone();
    let mut w = x.denom().clone();
    let mut v = 0i64;
    while (&u % &bp).is_zero() {
        u /= &bp;
        v += 1;
    }
    while (&w % &bp).is_zero() {
        w /= &bp;
        v -= 1;
    }
    (v, u, w)
}

/// An element of Q_p known modulo `p^precision`.
///
/// `digits[i]` is the coefficient of `p^(valuation + i)`; there are exactly
/// `precision - valuation` of them and the first is nonzero. The element
/// that is zero to the known precision has no digits and
/// `valuation == precision`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicNumber {
    prime: u64,
    valuation: i64,
    digits: Vec<u32>,
    precision: i64,
}

impl PAdicNumber {
    pub fn zero(prime: u64, precision: i64) -> Self {
        PAdicNumber {
            prime,
            valuation: precision,
            digits: Vec::new(),
            precision,
        }
    }

    /// Build from base-p digits of an integer `Σ digits[i] p^i`, known
    /// modulo `p^precision` where `precision = digits.len()`.
    pub fn from_digits(prime: u64, digits: &[u32]) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d as u64 >= prime) {
            return domain(format!("digit {d} out of range for p = {prime}"));
        }
        let precision = digits.len() as i64;
        match digits.iter().position(|&d| d != 0) {
            None => Ok(Self::zero(prime, precision)),
            Some(first) => Ok(PAdicNumber {
                prime,
                valuation: first as i64,
                digits: digits[first..].to_vec(),
                precision,
            }),
        }
    }

    /// The integer with residue `residue` modulo `p^precision`.
    pub fn from_residue(prime: u64, residue: &BigUint, precision: i64) -> Self {
        let mut digits = Vec::with_capacity(precision.max(0) as usize);
        let mut r = residue.clone();
        let bp = BigUint::from(prime);
        for _ in 0..precision {
            let (q, d) = r.div_rem(&bp);
            digits.push(d.to_u32().unwrap());
            r = q;
        }
        Self::from_digits(prime, &digits).expect("digits are reduced mod p")
    }

    /// p-adic expansion of a rational to absolute precision `precision`.
    pub fn from_rational(prime: u64, x: &BigRational, precision: i64) -> Result<Self> {
        if !is_prime_u64(prime) {
            return domain(format!("{prime} is not prime"));
        }
        if x.is_zero() {
            return Ok(Self::zero(prime, precision));
        }
        let (v, u, w) = split_unit(x, prime);
        if v >= precision {
            return Ok(Self::zero(prime, precision));
        }
        let count = (precision - v) as u32;
        let modulus = BigInt::from(prime).pow(count);
        let winv = mod_inverse(&w, &modulus).expect("w is a p-adic unit");
        let residue = (u * winv).mod_floor(&modulus);
        let mut digits = Vec::with_capacity(count as usize);
        let mut r = residue.to_biguint().unwrap();
        let bp = BigUint::from(prime);
        for _ in 0..count {
            let (q, d) = r.div_rem(&bp);
            digits.push(d.to_u32().unwrap());
            r = q;
        }
        Ok(PAdicNumber {
            prime,
            valuation: v,
            digits,
            precision,
        })
    }

    pub fn from_integer(prime: u64, x: &BigInt, precision: i64) -> Result<Self> {
        Self::from_rational(prime, &BigRational::from_integer(x.clone()), precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Index of the lowest nonzero digit (equals `precision` for zero).
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Digits of the unit part, lowest first.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Absolute precision: the value is known modulo `p^precision`.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation >= 0
    }

    /// Coefficient of `p^index`, or `None` past the known precision.
    pub fn digit(&self, index: i64) -> Option<u32> {
        if index >= self.precision {
            return None;
        }
        if index < self.valuation {
            return Some(0);
        }
        Some(self.digits[(index - self.valuation) as usize])
    }

    /// Digits `0 .. precision` of a p-adic integer.
    pub fn integer_digits(&self) -> Vec<u32> {
        (0..self.precision.max(0)).map(|i| self.digit(i).unwrap()).collect()
    }

    /// Residue modulo `p^precision` of a p-adic integer.
    pub fn to_residue(&self) -> BigUint {
        assert!(self.is_integral(), "residue of a non-integral p-adic number");
        let bp = BigUint::from(self.prime);
        let mut acc = BigUint::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &bp + BigUint::from(*d);
        }
        acc * bp.pow(self.valuation as u32)
    }

    /// The rational `Σ_i b_i p^i` over the known digits.
    pub fn to_rational(&self) -> BigRational {
        let bp = BigInt::from(self.prime);
        let mut acc = BigInt::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &bp + BigInt::from(*d);
        }
        let scale = BigRational::from_integer(bp).pow(self.valuation.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
        BigRational::from_integer(acc) * scale
    }

    /// Drop digits so that the value is known modulo `p^precision` only.
    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        if precision <= self.valuation {
            return Self::zero(self.prime, precision);
        }
        PAdicNumber {
            prime: self.prime,
            valuation: self.valuation,
            digits: self.digits[..(precision - self.valuation) as usize].to_vec(),
            precision,
        }
    }

    /// Equality of the digits both operands know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let prec = self.precision.min(other.precision);
        self.prime == other.prime && self.truncate(prec) == other.truncate(prec)
    }
}

impl fmt::Debug for PAdicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PAdicNumber {
    /// Digits from most to least significant, e.g. `…1011.01 (p=2, O(2^5))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.valuation.min(0);
        let sep = if self.prime > 10 { "," } else { "" };
        let mut parts = Vec::new();
        for i in (lo..self.precision).rev() {
            parts.push(self.digit(i).unwrap().to_string());
            if i == 0 && lo < 0 {
                parts.push(".".into());
            }
        }
        write!(
            f,
            "…{} (p={}, O({}^{}))",
            parts.join(sep).replace(&format!("{sep}.{sep}"), "."),
            self.prime,
            self.prime,
            self.precision
        )
    }
}

/// Residue arithmetic backing the q-transformation: `u64` for small moduli,
/// `BigUint` otherwise.
pub(crate) trait Limb: Clone + Ord + Num + From<u32> {
    fn mul_mod(&self, other: &Self, m: &Self) -> Self;
    fn to_big(&self) -> BigUint;
    fn from_big(b: &BigUint) -> Self;
}

impl Limb for u64 {
    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        ((*self as u128 * *other as u128) % *m as u128) as u64
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn from_big(b: &BigUint) -> Self {
        b.to_u64().expect("residue fits the fast path")
    }
}

impl Limb for BigUint {
    fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        (self * other) % m
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
    fn from_big(b: &BigUint) -> Self {
        b.clone()
    }
}

/// Moduli below this bound use the `u64` fast path.
const FAST_MODULUS_LIMIT: u128 = 1 << 62;

/// `T_q` acting on residues modulo `p^max`.
pub(crate) struct Kernel<T: Limb> {
    k: u32,
    pows: Vec<T>,
    /// `q·p^k` reduced modulo `p^max`; a unit when `k > 0`.
    mult: T,
}

impl<T: Limb> Kernel<T> {
    fn new(t: &QTransform, max: u32) -> Self {
        let p = T::from_big(&BigUint::from(t.prime));
        let mut pows = vec![T::one()];
        for i in 0..max {
            let next = pows[i as usize].clone() * p.clone();
            pows.push(next);
        }
        let modulus = BigInt::from(t.prime).pow(max);
        let mult_big = t.scaled_multiplier(&modulus);
        Kernel {
            k: t.k,
            mult: T::from_big(&mult_big),
            pows,
        }
    }

    fn pow_p(&self, e: u32) -> &T {
        &self.pows[e as usize]
    }

    /// `T_q(x)` for `x` known modulo `p^prec`; the result is known modulo
    /// `p^{prec-k}`. Requires `prec > k`.
    fn step(&self, x: &T, prec: u32) -> T {
        let y = self.mult.mul_mod(x, self.pow_p(prec));
        y / self.pow_p(self.k).clone()
    }

    /// Numerator of the fractional tail cut by `step`, over `p^k`.
    fn tail(&self, x: &T, prec: u32) -> T {
        let y = self.mult.mul_mod(x, self.pow_p(prec));
        y % self.pow_p(self.k).clone()
    }

    fn iterate(&self, x: &T, prec: u32, n: u32) -> (T, u32) {
        let mut z = x.clone();
        let mut prec = prec;
        for _ in 0..n {
            z = self.step(&z, prec);
            prec -= self.k;
        }
        (z, prec)
    }

    /// Data shared by every periodic point of period dividing `n` at the
    /// given precision: the verifiable precision `R = precision - nk` and
    /// the inverse of the unit `q^n p^{nk} - p^{nk}` modulo `p^R`.
    fn periodic_solver(&self, n: u32, precision: u32) -> PeriodicSolver<T> {
        let nk = n * self.k;
        let rem = precision - nk;
        let m = self.pow_p(rem).to_big();
        let mut v = BigUint::one();
        let mult = self.mult.to_big();
        for _ in 0..n {
            v = (v * &mult) % &m;
        }
        let pnk = self.pow_p(nk).to_big() % &m;
        let c = (v + &m - pnk) % &m;
        let inv = mod_inverse(&BigInt::from(c), &BigInt::from(m.clone()))
            .expect("q^n p^{nk} - p^{nk} is a unit");
        PeriodicSolver {
            n,
            nk,
            rem,
            precision,
            c_inv: T::from_big(&inv.to_biguint().unwrap()),
        }
    }

    /// The unique point `x ≡ class (mod p^{nk})` with `T^n x = x`.
    ///
    /// Writing `x = a + p^{nk} y`, the tails cut along the orbit depend on
    /// `a` alone, so `T^n x = T^n a + q^n p^{nk} y` and the fixed-point
    /// equation is linear in `y`.
    fn periodic_point(&self, s: &PeriodicSolver<T>, class: &T) -> T {
        let (b, _) = self.iterate(class, s.precision, s.n);
        let m = self.pow_p(s.rem).clone();
        let d = (class.clone() % m.clone() + m.clone() - b % m.clone()) % m.clone();
        let y = d.mul_mod(&s.c_inv, &m);
        class.clone() + self.pow_p(s.nk).clone() * y
    }

    fn is_fixed(&self, x: &T, n: u32, precision: u32) -> bool {
        let (z, rem) = self.iterate(x, precision, n);
        let m = self.pow_p(rem).clone();
        z % m.clone() == x.clone() % m
    }
}

struct PeriodicSolver<T> {
    n: u32,
    nk: u32,
    rem: u32,
    precision: u32,
    c_inv: T,
}

/// Summary of a streamed periodic-point enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSummary {
    /// Number of points produced, one per residue class modulo `p^{nk}`.
    pub count: u64,
    /// Every point satisfied `T^n x ≡ x` to the verifiable precision.
    pub all_fixed: bool,
    /// Points were pairwise incongruent modulo `p^{nk}`.
    pub pairwise_distinct: bool,
    /// Digits of agreement checked for each point (`precision - nk`).
    pub verified_digits: u32,
}

/// Image of the q-transformation on a single digit position; see
/// [`QTransform::bowen_ball`].
#[derive(Clone, Debug, PartialEq)]
pub struct BowenBall {
    /// Residues modulo `p^modulus_exponent` whose first `n` iterates lie in `p^m Z_p`.
    pub count: u64,
    pub modulus_exponent: u32,
    /// `-log_p μ`, the Haar measure of the dynamical ball.
    pub measure_exponent: f64,
}

/// The q-transformation `T_q` on Z_p for a rational `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTransform {
    prime: u64,
    q: BigRational,
    valuation: Valuation,
    k: u32,
}

impl QTransform {
    pub fn new(prime: u64, q: BigRational) -> Result<Self> {
        if !is_prime_u64(prime) {
            return domain(format!("{prime} is not prime"));
        }
        let valuation = padic_valuation(&q, prime);
        let k = match valuation {
            Valuation::Finite(v) if v < 0 => u32::try_from(-v).map_err(|_| {
                Error::Domain("valuation out of range".into())
            })?,
            _ => 0,
        };
        Ok(QTransform {
            prime,
            q,
            valuation,
            k,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    /// `k = max(0, -v_p(q))`, so that `|q|_p = p^k` when `k > 0`.
    pub fn expansion_exponent(&self) -> u32 {
        self.k
    }

    /// Topological entropy `log⁺|q|_p = k log p`, in nats.
    pub fn entropy(&self) -> f64 {
        self.k as f64 * (self.prime as f64).ln()
    }

    /// The only rational roots of unity are ±1.
    pub fn is_root_of_unity(&self) -> bool {
        self.q.abs().is_one()
    }

    /// `q·p^k` modulo `modulus`, as a non-negative residue.
    fn scaled_multiplier(&self, modulus: &BigInt) -> BigUint {
        if self.q.is_zero() {
            return BigUint::zero();
        }
        let (v, u, w) = split_unit(&self.q, self.prime);
        let shift = v + self.k as i64;
        let winv = mod_inverse(&w, modulus).expect("w is a unit");
        let scaled = u * winv * BigInt::from(self.prime).pow(shift as u32);
        scaled.mod_floor(modulus).to_biguint().unwrap()
    }

    fn check_input(&self, x: &PAdicNumber) -> Result<()> {
        if x.prime != self.prime {
            return domain(format!(
                "input is {}-adic but the transformation is {}-adic",
                x.prime, self.prime
            ));
        }
        if !x.is_integral() {
            return domain("the q-transformation acts on p-adic integers only");
        }
        Ok(())
    }

    /// One application of `T_q` together with the discarded tail
    /// `q·x - T_q(x)`, a rational in `[0, 1)` with denominator `p^k`.
    pub fn step_with_tail(&self, x: &PAdicNumber) -> Result<(PAdicNumber, BigRational)> {
        self.check_input(x)?;
        let needed = self.k as i64 + 1;
        if x.precision < needed {
            return Err(Error::PrecisionExhausted {
                needed,
                available: x.precision,
            });
        }
        let prec = x.precision as u32;
        let kernel: Kernel<BigUint> = Kernel::new(self, prec);
        let residue = x.to_residue();
        let image = kernel.step(&residue, prec);
        let tail = kernel.tail(&residue, prec);
        let out = PAdicNumber::from_residue(self.prime, &image, (prec - self.k) as i64);
        let tail = BigRational::new(
            BigInt::from(tail),
            BigInt::from(self.prime).pow(self.k),
        );
        Ok((out, tail))
    }

    /// `T_q(x)`: multiply by q and cut away the fractional tail. The result
    /// has `k` fewer digits of precision than `x`.
    pub fn step(&self, x: &PAdicNumber) -> Result<PAdicNumber> {
        self.step_with_tail(x).map(|(y, _)| y)
    }

    /// `T_q^n(x)`.
    pub fn iterate(&self, x: &PAdicNumber, n: u32) -> Result<PAdicNumber> {
        let mut z = x.clone();
        for _ in 0..n {
            z = self.step(&z)?;
        }
        Ok(z)
    }

    /// Forward orbit `x0, T x0, …, T^steps x0`.
    pub fn orbit(&self, x0: &PAdicNumber, steps: u32) -> Result<Vec<PAdicNumber>> {
        self.check_input(x0)?;
        let needed = steps as i64 * self.k as i64 + 1;
        if x0.precision < needed {
            return Err(Error::PrecisionExhausted {
                needed,
                available: x0.precision,
            });
        }
        let mut out = Vec::with_capacity(steps as usize + 1);
        out.push(x0.clone());
        for _ in 0..steps {
            let next = self.step(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    fn reject_root_of_unity(&self) -> Result<()> {
        if self.is_root_of_unity() {
            return domain(format!(
                "q = {} is a root of unity; T_q has infinitely many periodic points",
                self.q
            ));
        }
        Ok(())
    }

    /// `|Per_n(T_q)| = p^{nk}` (or 1 when `|q|_p ≤ 1`).
    pub fn periodic_count(&self, n: u32) -> Result<BigUint> {
        self.reject_root_of_unity()?;
        if n == 0 {
            return domain("period must be at least 1");
        }
        Ok(BigUint::from(self.prime).pow(n * self.k))
    }

    fn check_periodic_request(&self, n: u32, precision: u32) -> Result<u32> {
        self.reject_root_of_unity()?;
        if n == 0 {
            return domain("period must be at least 1");
        }
        let nk = n * self.k;
        let needed = 2 * nk + 1;
        if precision < needed {
            return Err(Error::PrecisionExhausted {
                needed: needed as i64,
                available: precision as i64,
            });
        }
        Ok(nk)
    }

    fn fast_path(&self, precision: u32) -> bool {
        (self.prime as u128)
            .checked_pow(precision + 1)
            .is_some_and(|m| m < FAST_MODULUS_LIMIT)
    }

    /// All points of period dividing `n`, each known modulo `p^precision`.
    ///
    /// For `|q|_p = p^k > 1` there is exactly one fixed point of `T^n` in
    /// every residue class modulo `p^{nk}`; it is found by solving the
    /// linear equation `T^n(a) + v·y = a + p^{nk}·y` (with `v = q^n p^{nk}`
    /// a unit) digit by digit. Requires `precision ≥ 2nk + 1`. When
    /// `|q|_p ≤ 1` the only periodic point is 0.
    pub fn periodic_points(&self, n: u32, precision: u32) -> Result<Vec<PAdicNumber>> {
        let nk = self.check_periodic_request(n, precision)?;
        if self.k == 0 {
            return Ok(vec![PAdicNumber::zero(self.prime, precision as i64)]);
        }
        let classes = (self.prime as u128).checked_pow(nk).unwrap_or(u128::MAX);
        if classes > 1 << 20 {
            return Err(Error::Budget(format!(
                "{classes} periodic points requested as a list; use verify_periodic_points"
            )));
        }
        let to_padic = |r: BigUint| PAdicNumber::from_residue(self.prime, &r, precision as i64);
        if self.fast_path(precision) {
            let kernel: Kernel<u64> = Kernel::new(self, precision + 1);
            let solver = kernel.periodic_solver(n, precision);
            Ok((0..classes as u64)
                .map(|a| to_padic(BigUint::from(kernel.periodic_point(&solver, &a))))
                .collect())
        } else {
            let kernel: Kernel<BigUint> = Kernel::new(self, precision + 1);
            let solver = kernel.periodic_solver(n, precision);
            Ok((0..classes as u64)
                .map(|a| to_padic(kernel.periodic_point(&solver, &BigUint::from(a))))
                .collect())
        }
    }

    /// Stream through every periodic point of period dividing `n` without
    /// materialising them, checking the fixed-point equation and that the
    /// points fall in distinct classes modulo `p^{nk}`.
    pub fn verify_periodic_points(&self, n: u32, precision: u32) -> Result<PeriodicSummary> {
        let nk = self.check_periodic_request(n, precision)?;
        if self.k == 0 {
            let zero = PAdicNumber::zero(self.prime, precision as i64);
            let fixed = self.iterate(&zero, n)?.agrees_with(&zero);
            return Ok(PeriodicSummary {
                count: 1,
                all_fixed: fixed,
                pairwise_distinct: true,
                verified_digits: precision,
            });
        }
        let classes = (self.prime as u128).checked_pow(nk).unwrap_or(u128::MAX);
        if classes > 1 << 32 {
            return Err(Error::Budget(format!("{classes} periodic points")));
        }
        let classes = classes as u64;
        if self.fast_path(precision) {
            let kernel: Kernel<u64> = Kernel::new(self, precision + 1);
            Ok(stream_verify(&kernel, classes, n, nk, precision, |a| a))
        } else {
            let kernel: Kernel<BigUint> = Kernel::new(self, precision + 1);
            Ok(stream_verify(&kernel, classes, n, nk, precision, BigUint::from))
        }
    }

    /// Exponent `r` with `T_q^{-1}(p^m Z_p) = p^{m+r} Z_p` along the inverse
    /// branch of `T_q` through the fixed point 0.
    ///
    /// On `p^k Z_p` the map is plain multiplication by q (no tail is cut),
    /// and this is the branch whose volume expansion Bowen's formula
    /// measures. The radius is found empirically: every residue modulo
    /// `p^M` with `M = m + k + 2` is scanned, the preimage set collected,
    /// and checked to be exactly a ball around 0. The result is `k` when
    /// `|q|_p = p^k > 1` and `≤ 0` (the preimage contains `p^m Z_p`)
    /// otherwise.
    pub fn preimage_ball_radius(&self, m: u32) -> Result<i64> {
        let modulus_exp = m + self.k + 2;
        let size = (self.prime as u128).checked_pow(modulus_exp).unwrap_or(u128::MAX);
        if size > 1 << 24 {
            return Err(Error::Budget(format!("scan of {size} residues")));
        }
        let kernel: Kernel<u64> = Kernel::new(self, modulus_exp + 1);
        let pm = *kernel.pow_p(m);
        let mut members = 0u64;
        let mut min_val = modulus_exp;
        for x in 0..size as u64 {
            if kernel.tail(&x, modulus_exp) != 0 {
                continue;
            }
            let image = kernel.step(&x, modulus_exp);
            if image % pm == 0 {
                members += 1;
                let v = if x == 0 {
                    modulus_exp
                } else {
                    let mut v = 0;
                    let mut y = x;
                    while y % self.prime == 0 {
                        y /= self.prime;
                        v += 1;
                    }
                    v
                };
                min_val = min_val.min(v);
            }
        }
        let ball = *kernel.pow_p(modulus_exp - min_val);
        if members != ball {
            return Err(Error::Domain(format!(
                "preimage of p^{m} Z_p along the branch through 0 is not a ball ({members} residues)"
            )));
        }
        Ok(min_val as i64 - m as i64)
    }

    /// The dynamical ball `⋂_{j<n} T_q^{-j}(p^m Z_p)` on the finite quotient
    /// `Z/p^M` with `M = m + (n-1)k`, which determines it exactly.
    pub fn bowen_ball(&self, m: u32, n: u32) -> Result<BowenBall> {
        if n == 0 {
            return domain("need at least one iterate");
        }
        let modulus_exp = m + (n - 1) * self.k;
        let size = (self.prime as u128).checked_pow(modulus_exp).unwrap_or(u128::MAX);
        if size > 1 << 24 {
            return Err(Error::Budget(format!("scan of {size} residues")));
        }
        let kernel: Kernel<u64> = Kernel::new(self, modulus_exp + 1);
        let pm = *kernel.pow_p(m);
        let mut count = 0u64;
        'scan: for x in 0..size as u64 {
            let mut z = x;
            let mut prec = modulus_exp;
            for j in 0..n {
                if z % pm != 0 {
                    continue 'scan;
                }
                if j + 1 < n {
                    z = kernel.step(&z, prec);
                    prec -= self.k;
                }
            }
            count += 1;
        }
        let measure_exponent =
            modulus_exp as f64 - (count as f64).ln() / (self.prime as f64).ln();
        Ok(BowenBall {
            count,
            modulus_exponent: modulus_exp,
            measure_exponent,
        })
    }
}

fn stream_verify<T: Limb>(
    kernel: &Kernel<T>,
    classes: u64,
    n: u32,
    nk: u32,
    precision: u32,
    lift: impl Fn(u64) -> T,
) -> PeriodicSummary {
    let pnk = kernel.pow_p(nk).clone();
    let solver = kernel.periodic_solver(n, precision);
    let mut seen = vec![false; classes as usize];
    let mut all_fixed = true;
    let mut distinct = true;
    let mut count = 0u64;
    for a in 0..classes {
        let x = kernel.periodic_point(&solver, &lift(a));
        let class = (x.clone() % pnk.clone()).to_big().to_u64().unwrap() as usize;
        if std::mem::replace(&mut seen[class], true) {
            distinct = false;
        }
        if !kernel.is_fixed(&x, n, precision) {
            all_fixed = false;
        }
        count += 1;
    }
    PeriodicSummary {
        count,
        all_fixed,
        pairwise_distinct: distinct && seen.iter().all(|&s| s),
        verified_digits: precision - nk,
    }
}

/// Frequencies of each digit value at `position` along an orbit, the
/// ergodic-average diagnostic for the q-transformation.
pub fn digit_frequencies(orbit: &[PAdicNumber], position: i64) -> Vec<u64> {
    let p = orbit.first().map(|x| x.prime).unwrap_or(2);
    let mut counts = vec![0u64; p as usize];
    for x in orbit {
        if let Some(d) = x.digit(position) {
            counts[d as usize] += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn int(p: u64, n: i64, prec: i64) -> PAdicNumber {
        PAdicNumber::from_integer(p, &BigInt::from(n), prec).unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&rat(12, 1), 2), Valuation::Finite(2));
        assert_eq!(padic_valuation(&rat(1, 5), 5), Valuation::Finite(-1));
        assert_eq!(padic_valuation(&rat(7, 9), 3), Valuation::Finite(-2));
        assert_eq!(padic_valuation(&rat(0, 1), 3), Valuation::Infinite);
    }

    #[test]
    fn expansion_of_rationals() {
        // -1 = ...1111 in Z_2.
        let m1 = int(2, -1, 6);
        assert_eq!(m1.integer_digits(), vec![1; 6]);
        // 1/3 in Z_2 = ...10101011.
        let third = PAdicNumber::from_rational(2, &rat(1, 3), 8).unwrap();
        assert_eq!(third.integer_digits(), vec![1, 1, 0, 1, 0, 1, 0, 1]);
        // 7/25 in Q_5 has valuation -2.
        let x = PAdicNumber::from_rational(5, &rat(7, 25), 3).unwrap();
        assert_eq!(x.valuation(), -2);
        assert_eq!(x.digit(-2), Some(2));
        assert_eq!(x.digit(-1), Some(1));
        assert_eq!(x.digit(3), None);
    }

    #[test]
    fn step_examples() {
        let half = QTransform::new(2, rat(1, 2)).unwrap();
        assert!(half.step(&int(2, 1, 8)).unwrap().is_zero());
        assert_eq!(half.step(&int(2, 2, 8)).unwrap(), int(2, 1, 7));
        let (y, tail) = half.step_with_tail(&int(2, 3, 8)).unwrap();
        assert_eq!(y, int(2, 1, 7));
        assert_eq!(tail, rat(1, 2));
        let five = QTransform::new(3, rat(5, 1)).unwrap();
        assert_eq!(five.step(&int(3, 1, 6)).unwrap(), int(3, 5, 6));
    }

    #[test]
    fn precision_is_consumed_and_exhaustion_reported() {
        let t = QTransform::new(5, rat(7, 25)).unwrap();
        let x = int(5, 123, 5);
        let y = t.step(&x).unwrap();
        assert_eq!(y.precision(), 3);
        let z = t.step(&y).unwrap();
        assert_eq!(z.precision(), 1);
        assert_eq!(
            t.step(&z),
            Err(Error::PrecisionExhausted {
                needed: 3,
                available: 1
            })
        );
    }

    #[test]
    fn rejects_non_integral_input_and_composite_prime() {
        let t = QTransform::new(3, rat(1, 3)).unwrap();
        let x = PAdicNumber::from_rational(3, &rat(1, 3), 5).unwrap();
        assert!(matches!(t.step(&x), Err(Error::Domain(_))));
        assert!(QTransform::new(4, rat(1, 2)).is_err());
    }

    #[test]
    fn entropy_values() {
        let ln = |x: f64| x.ln();
        assert_eq!(QTransform::new(2, rat(1, 2)).unwrap().entropy(), ln(2.0));
        assert_eq!(QTransform::new(3, rat(6, 1)).unwrap().entropy(), 0.0);
        assert_eq!(QTransform::new(5, rat(7, 25)).unwrap().entropy(), 2.0 * ln(5.0));
    }

    #[test]
    fn periodic_counts() {
        let c = |p, q: BigRational, n| QTransform::new(p, q).unwrap().periodic_count(n).unwrap();
        assert_eq!(c(2, rat(1, 2), 3), BigUint::from(8u32));
        assert_eq!(c(3, rat(2, 1), 5), BigUint::one());
        assert_eq!(c(5, rat(3, 25), 2), BigUint::from(625u32));
        for q in [rat(1, 1), rat(-1, 1)] {
            assert!(QTransform::new(2, q).unwrap().periodic_count(1).is_err());
        }
    }

    #[test]
    fn fixed_points_of_the_half_map() {
        let t = QTransform::new(2, rat(1, 2)).unwrap();
        let pts = t.periodic_points(1, 6).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].is_zero());
        // The other fixed point of the shift is ...1111 = -1.
        assert_eq!(pts[1].integer_digits(), vec![1; 6]);
        let pts = t.periodic_points(2, 9).unwrap();
        let classes: Vec<BigUint> = pts.iter().map(|x| x.to_residue() % 4u32).collect();
        assert_eq!(classes, (0u32..4).map(BigUint::from).collect::<Vec<_>>());
    }

    #[test]
    fn unit_q_has_only_zero() {
        let t = QTransform::new(3, rat(2, 1)).unwrap();
        let pts = t.periodic_points(4, 5).unwrap();
        assert_eq!(pts, vec![PAdicNumber::zero(3, 5)]);
    }

    #[test]
    fn fast_and_big_kernels_agree() {
        let t = QTransform::new(3, rat(7, 99)).unwrap();
        let fast: Kernel<u64> = Kernel::new(&t, 12);
        let slow: Kernel<BigUint> = Kernel::new(&t, 12);
        for a in 0..81u64 {
            let x = fast.periodic_point(&fast.periodic_solver(2, 11), &a);
            let y = slow.periodic_point(&slow.periodic_solver(2, 11), &BigUint::from(a));
            assert_eq!(BigUint::from(x), y);
        }
    }

    #[test]
    fn preimage_radius_examples() {
        let r = |p, q, m| QTransform::new(p, q).unwrap().preimage_ball_radius(m).unwrap();
        assert_eq!(r(2, rat(1, 4), 1), 2);
        assert_eq!(r(3, rat(2, 1), 2), 0);
        assert_eq!(r(5, rat(1, 5), 0), 1);
        // |q| < 1: the preimage contains the ball.
        assert_eq!(r(3, rat(9, 1), 3), -2);
    }

    #[test]
    fn bowen_balls_shrink_by_k_per_step() {
        let t = QTransform::new(3, rat(5, 9)).unwrap();
        for n in 1..4 {
            let a = t.bowen_ball(2, n).unwrap();
            let b = t.bowen_ball(2, n + 1).unwrap();
            assert!((b.measure_exponent - a.measure_exponent - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_examples() {
        let t = QTransform::new(2, rat(3, 1)).unwrap();
        let orbit = t.orbit(&int(2, 1, 10), 3).unwrap();
        let expect: Vec<PAdicNumber> = [1, 3, 9, 27].iter().map(|&v| int(2, v, 10)).collect();
        assert_eq!(orbit, expect);
        let zero_orbit = t.orbit(&PAdicNumber::zero(2, 4), 5).unwrap();
        assert!(zero_orbit.iter().all(|x| x.is_zero()));
        let shift = QTransform::new(2, rat(1, 2)).unwrap();
        let x = PAdicNumber::from_digits(2, &[1, 1, 0, 1, 0, 0, 1]).unwrap();
        let y = shift.step(&x).unwrap();
        assert_eq!(y.integer_digits(), vec![1, 0, 1, 0, 0, 1]);
        let freq = digit_frequencies(&orbit, 0);
        assert_eq!(freq, vec![0, 4]);
    }

    #[test]
    fn display_shows_fractional_digits() {
        let x = PAdicNumber::from_rational(2, &rat(5, 4), 3).unwrap();
        assert_eq!(x.to_string(), "…001.01 (p=2, O(2^3))");
    }
}
