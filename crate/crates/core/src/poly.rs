//! Dense univariate polynomials over the integers, exact determinants and
//! resultants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::sign_of;

/// Polynomial with big-integer coefficients, lowest degree first.
///
/// Trailing zero coefficients are always stripped, so the zero polynomial
/// has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut result = IntPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        // Homogenised Horner keeps everything integral until the final division.
        let (num, den) = (x.numer(), x.denom());
        let Some(d) = self.degree() else {
            return BigRational::zero();
        };
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        BigRational::new(acc, den.pow(d as u32))
    }

    /// Sign of `p(c / 2^k)`, computed exactly.
    pub fn sign_at_dyadic(&self, c: &BigInt, k: u64) -> i32 {
        let Some(d) = self.degree() else {
            return 0;
        };
        let mut acc = BigInt::zero();
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            acc = acc * c + (a << (k as usize * (d - i)));
        }
        sign_of(&acc)
    }

    /// Sign of `p(r)` for a rational `r`.
    pub fn sign_at(&self, r: &BigRational) -> i32 {
        // den > 0, so the homogenising factor den^deg does not change the sign.
        let (num, den) = (r.numer(), r.denom());
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        sign_of(&acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    /// `p(x + 1)`.
    pub fn taylor_shift_one(&self) -> IntPoly {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = a[j + 1].clone();
                a[j] += t;
            }
        }
        IntPoly::new(a)
    }

    /// `x^d p(1/x)`, reversing the coefficient order.
    pub fn reversed(&self) -> IntPoly {
        let mut a = self.coeffs.clone();
        a.reverse();
        IntPoly::new(a)
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `2^{k·deg} p(x / 2^k)`; zero-scaling shifts are applied per coefficient.
    pub fn shrink_pow2(&self, k: u64) -> IntPoly {
        let d = self.degree().unwrap_or(0);
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c << (k as usize * (d - i)))
                .collect(),
        )
    }

    /// `p(2^k x)`.
    pub fn stretch_pow2(&self, k: u64) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c << (k as usize * i))
                .collect(),
        )
    }

    /// Number of sign changes in the coefficient sequence (zeros skipped).
    pub fn sign_variations(&self) -> usize {
        let mut last = 0;
        let mut count = 0;
        for c in &self.coeffs {
            let s = sign_of(c);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Pseudo-remainder `lc(g)^{deg f - deg g + 1} f mod g`.
    pub fn pseudo_rem(&self, g: &IntPoly) -> IntPoly {
        let dg = g.degree().expect("division by zero polynomial");
        let lg = g.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shifted = IntPoly::monomial(lr, dr - dg);
            r = &r.scale(&lg) - &(&shifted * g);
        }
        r
    }

    /// Exact division `self / g`; `None` if `g` does not divide `self` in Z[x].
    pub fn div_exact(&self, g: &IntPoly) -> Option<IntPoly> {
        let dg = g.degree()?;
        let lg = g.leading().unwrap();
        let mut r = self.clone();
        let Some(df) = self.degree() else {
            return Some(IntPoly::zero());
        };
        if df < dg {
            return None;
        }
        let mut q = vec![BigInt::zero(); df - dg + 1];
        while let Some(dr) = r.degree() {
            if dr < dg {
                return None;
            }
            let (c, rem) = r.leading().unwrap().div_rem(lg);
            if !rem.is_zero() {
                return None;
            }
            q[dr - dg] = c.clone();
            r = &r - &(&IntPoly::monomial(c, dr - dg) * g);
        }
        Some(IntPoly::new(q))
    }

    /// Greatest common divisor (primitive, positive leading coefficient).
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        let content = self.content().gcd(&other.content());
        a.primitive_part().scale(&content.max(BigInt::one()))
    }

    /// Squarefree part `p / gcd(p, p')`, primitive.
    pub fn squarefree_part(&self) -> IntPoly {
        let pp = self.primitive_part();
        if pp.degree().unwrap_or(0) == 0 {
            return pp;
        }
        let g = pp.gcd(&pp.derivative()).primitive_part();
        pp.div_exact(&g)
            .expect("gcd divides the polynomial")
            .primitive_part()
    }

    /// Factor `p = c·∏ g_i^i` with each `g_i` squarefree, primitive and
    /// pairwise coprime. Returns `(g_i, i)` for the non-constant factors.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, u32)> {
        let f = self.primitive_part();
        let mut out = Vec::new();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let mut c = f.gcd(&f.derivative()).primitive_part();
        let mut w = f.div_exact(&c).expect("gcd divides").primitive_part();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(&c).primitive_part();
            let z = w.div_exact(&y).expect("gcd divides").primitive_part();
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            c = c.div_exact(&y).expect("gcd divides").primitive_part();
            w = y;
            i += 1;
        }
        out
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: IntPoly) -> IntPoly {
        &self + &rhs
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: IntPoly) -> IntPoly {
        &self - &rhs
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination. Every intermediate division is exact.
pub fn determinant(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant of two nonzero polynomials via the Sylvester matrix.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    if m == 0 {
        return f.coeff(0).pow(n as u32);
    }
    if n == 0 {
        return g.coeff(0).pow(m as u32);
    }
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for (r, row) in rows.iter_mut().enumerate().take(n) {
        for i in 0..=m {
            row[r + i] = f.coeff(m - i);
        }
    }
    for r in 0..m {
        for i in 0..=n {
            rows[n + r][r + i] = g.coeff(n - i);
        }
    }
    determinant(&rows)
}
