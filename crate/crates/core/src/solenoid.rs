//! Toral and solenoidal endomorphisms: Mahler measure, entropy and exact
//! periodic-point counts.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{ln_abs_bigint, ln_biguint};
use crate::error::{domain, Result};
use crate::poly::{determinant, resultant, IntPoly};
use crate::roots::complex_roots;

/// Largest trapezoid-rule sample count tried by the integral path.
const MAX_SAMPLES: usize = 1 << 20;

/// Mahler measure by two independent paths.
#[derive(Clone, Debug, PartialEq)]
pub struct MahlerMeasure {
    /// `log|b| + Σ log⁺|α_i|` over numerically located complex roots.
    pub root_path: f64,
    /// `∫_0^1 log|F(e^{2πit})| dt` by the trapezoid rule.
    pub integral_path: f64,
    /// Samples used by the final trapezoid pass.
    pub samples: usize,
    /// False when the trapezoid rule stopped at `MAX_SAMPLES` without
    /// settling, which happens when `F` has roots on or very near the unit
    /// circle. The root path is authoritative in that case.
    pub integral_converged: bool,
}

/// `m(F)`, computed from the roots and cross-checked by integrating
/// `log|F|` over the unit circle (Jensen's formula).
pub fn mahler_measure(f: &IntPoly) -> Result<MahlerMeasure> {
    let Some(lead) = f.leading() else {
        return domain("the zero polynomial has no Mahler measure");
    };
    let mut root_path = ln_abs_bigint(lead);
    for (root, mult) in complex_roots(f) {
        let r = root.z.norm();
        if r > 1.0 {
            root_path += mult as f64 * r.ln();
        }
    }
    let (integral_path, samples, integral_converged) = unit_circle_integral(f);
    Ok(MahlerMeasure {
        root_path,
        integral_path,
        samples,
        integral_converged,
    })
}

fn trapezoid(f: &IntPoly, n: usize) -> f64 {
    let tau = std::f64::consts::TAU;
    let sum: f64 = (0..n)
        .map(|j| {
            let t = (j as f64 + 0.5) / n as f64;
            f.eval_complex(Complex64::from_polar(1.0, tau * t)).norm().ln()
        })
        .sum();
    sum / n as f64
}

/// The trapezoid rule with half-step offset is spectrally accurate for a
/// smooth periodic integrand, so the sample count doubles until successive
/// estimates agree to 1e-12.
fn unit_circle_integral(f: &IntPoly) -> (f64, usize, bool) {
    let mut n = 64;
    let mut prev = trapezoid(f, n);
    while n < MAX_SAMPLES {
        n *= 2;
        let next = trapezoid(f, n);
        if (next - prev).abs() < 1e-12 {
            return (next, n, true);
        }
        prev = next;
    }
    (prev, n, false)
}

/// `h = log max(|a|, |b|) = m(bx − a)` for the solenoid endomorphism
/// dual to multiplication by `a/b`.
pub fn solenoid_entropy(a: &BigInt, b: &BigInt) -> f64 {
    let m = a.magnitude().max(b.magnitude());
    if m.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_biguint(m)
}

/// `|Per_n| = |b^n − a^n|` for the solenoid endomorphism with `a/b`.
///
/// `a/b = 1` is excluded because every point is fixed, and so is `a/b = −1`
/// because its square is the identity and `|b^n − a^n|` vanishes for even
/// `n`.
pub fn solenoid_periodic_count(a: &BigInt, b: &BigInt, n: u32) -> Result<BigUint> {
    if n == 0 {
        return domain("period must be at least 1");
    }
    if b.is_zero() {
        return domain("b must be nonzero");
    }
    if !a.gcd(b).is_one() {
        return domain(format!("a = {a} and b = {b} are not coprime"));
    }
    if a == b || *a == -b {
        return domain(format!("a/b = {} is a root of unity", if a == b { "1" } else { "-1" }));
    }
    Ok((b.pow(n) - a.pow(n)).magnitude().clone())
}

/// `n × n` circulant matrix with first row `(a, −1, 0, …, 0)`.
pub fn circulant_matrix(a: &BigInt, n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += a;
        row[(i + 1) % n] -= 1;
    }
    m
}

/// `|det C|` for the circulant matrix on `(a, −1, 0, …)`, by an exact
/// fraction-free determinant (no circulant shortcut).
pub fn circulant_periodic_oracle(a: &BigInt, n: usize) -> Result<BigUint> {
    if n == 0 {
        return domain("matrix size must be at least 1");
    }
    Ok(determinant(&circulant_matrix(a, n)).magnitude().clone())
}

/// `d`-th cyclotomic polynomials `Φ_1, …, Φ_d_max` (index 0 unused).
fn cyclotomic_table(d_max: usize) -> Vec<IntPoly> {
    let mut table = vec![IntPoly::zero()];
    for d in 1..=d_max {
        let mut p = &IntPoly::monomial(BigInt::one(), d) - &IntPoly::one();
        for (e, phi) in table.iter().enumerate().skip(1) {
            if d % e == 0 {
                p = p.div_exact(phi).expect("Φ_e divides x^d − 1");
            }
        }
        table.push(p);
    }
    table
}

fn totient(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// Least `d` such that `Φ_d` divides `F`, if any.
pub fn cyclotomic_factor(f: &IntPoly) -> Option<usize> {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return None;
    }
    // φ(d) ≥ sqrt(d/2), so φ(d) ≤ deg forces d ≤ 2 deg².
    let d_max = 2 * deg * deg + 2;
    let table = cyclotomic_table(d_max);
    (1..=d_max)
        .filter(|&d| totient(d) <= deg)
        .find(|&d| f.div_exact(&table[d]).is_some())
}

/// Exact and logarithmic periodic-point counts for a toral endomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct ToralCount {
    /// `|Res(F, x^n − 1)|`.
    pub exact: BigUint,
    /// `n log|b| + Σ log|α_i^n − 1|`, from numerical roots.
    pub log_from_roots: f64,
}

/// `|Per_n| = |b|^n ∏ |α_i^n − 1|`, computed exactly as `|Res(F, x^n − 1)|`.
///
/// Repeated roots are allowed; the resultant formula is taken as the
/// definition in that case.
pub fn toral_periodic_count(f: &IntPoly, n: u32) -> Result<ToralCount> {
    let Some(deg) = f.degree() else {
        return domain("the zero polynomial defines no endomorphism");
    };
    if deg == 0 {
        return domain("F must have degree at least 1");
    }
    if n == 0 {
        return domain("period must be at least 1");
    }
    if let Some(d) = cyclotomic_factor(f) {
        return domain(format!("F has the cyclotomic factor Φ_{d}; some root is a root of unity"));
    }
    let xn1 = &IntPoly::monomial(BigInt::one(), n as usize) - &IntPoly::one();
    let exact = resultant(f, &xn1).magnitude().clone();
    let mut log_from_roots = n as f64 * ln_abs_bigint(f.leading().unwrap());
    for (root, mult) in complex_roots(f) {
        let z = root.z.powu(n) - Complex64::new(1.0, 0.0);
        log_from_roots += mult as f64 * z.norm().ln();
    }
    Ok(ToralCount {
        exact,
        log_from_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn mahler_examples() {
        let m = mahler_measure(&p(&[-3, 2])).unwrap();
        assert!((m.root_path - 3f64.ln()).abs() < 1e-12);
        assert!((m.integral_path - 3f64.ln()).abs() < 1e-10);
        assert!(m.integral_converged);
        let m = mahler_measure(&p(&[-1, 1])).unwrap();
        assert_eq!(m.root_path, 0.0);
        let m = mahler_measure(&p(&[-1, -1, 1])).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.root_path - phi.ln()).abs() < 1e-12);
        assert!((m.integral_path - phi.ln()).abs() < 1e-10);
    }

    #[test]
    fn lehmer_polynomial() {
        // Lehmer's degree-10 polynomial, m = log 1.17628081826...
        let f = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let m = mahler_measure(&f).unwrap();
        assert!((m.root_path - 1.176_280_818_259_917_5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn solenoid_counts() {
        assert_eq!(solenoid_periodic_count(&big(3), &big(2), 2).unwrap(), BigUint::from(5u32));
        assert_eq!(solenoid_periodic_count(&big(2), &big(1), 3).unwrap(), BigUint::from(7u32));
        assert!(solenoid_periodic_count(&big(1), &big(1), 3).is_err());
        assert!(solenoid_periodic_count(&big(-1), &big(1), 3).is_err());
        assert!(solenoid_periodic_count(&big(4), &big(2), 3).is_err());
        assert_eq!(solenoid_entropy(&big(3), &big(2)), 3f64.ln());
        assert_eq!(solenoid_entropy(&big(1), &big(1)), 0.0);
        assert_eq!(solenoid_entropy(&big(5), &big(7)), 7f64.ln());
    }

    #[test]
    fn circulant_examples() {
        assert_eq!(circulant_periodic_oracle(&big(2), 4).unwrap(), BigUint::from(15u32));
        assert_eq!(circulant_periodic_oracle(&big(-1), 2).unwrap(), BigUint::zero());
        assert_eq!(circulant_periodic_oracle(&big(3), 5).unwrap(), BigUint::from(242u32));
        assert_eq!(circulant_periodic_oracle(&big(5), 1).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn toral_examples() {
        let c = |f: &[i64], n| toral_periodic_count(&p(f), n).unwrap();
        assert_eq!(c(&[-2, 1], 3).exact, BigUint::from(7u32));
        assert_eq!(c(&[-1, -1, 1], 5).exact, BigUint::from(11u32));
        assert_eq!(c(&[-3, 2], 2).exact, BigUint::from(5u32));
        let t = c(&[-1, -1, 1], 12);
        assert!((t.log_from_roots - ln_biguint(&t.exact)).abs() < 1e-9);
    }

    #[test]
    fn cyclotomic_detection() {
        assert_eq!(cyclotomic_factor(&p(&[1, 1, 1])), Some(3));
        assert_eq!(cyclotomic_factor(&(&p(&[-2, 1]) * &p(&[1, 0, 1]))), Some(4));
        assert_eq!(cyclotomic_factor(&p(&[-1, -1, 1])), None);
        assert!(toral_periodic_count(&p(&[1, 1]), 3).is_err());
    }
}
