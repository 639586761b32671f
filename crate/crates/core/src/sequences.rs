//! Elliptic divisibility sequences and the Möbius test for whether a
//! sequence can count the periodic points of a single map.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{divisors, ln_biguint, mobius};
use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{domain, Error, Result};

/// `E_n = |b^{n²−1} ψ_n(P)|` for `n = 1..=n_max`, where `x(P) = a/b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisibilitySequence {
    pub curve: WeierstrassCurve,
    pub point: CurvePoint,
    /// `terms[n − 1] = E_n`.
    pub terms: Vec<BigUint>,
    /// Indices `n` with `E_n = 0`, i.e. `nP = O`.
    pub zero_terms: Vec<u32>,
}

impl DivisibilitySequence {
    pub fn term(&self, n: u32) -> Option<&BigUint> {
        self.terms.get((n as usize).checked_sub(1)?)
    }

    pub fn len(&self) -> u32 {
        self.terms.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `log E_n / n²` for each nonzero term.
    pub fn growth_rates(&self) -> Vec<(u32, f64)> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_zero())
            .map(|(i, t)| {
                let n = i as f64 + 1.0;
                (i as u32 + 1, ln_biguint(t) / (n * n))
            })
            .collect()
    }
}

/// Compute `E_1, …, E_{n_max}`. Even-index terms use the point's own `y`;
/// the sign ambiguity disappears in the absolute value.
pub fn eds_terms(e: &WeierstrassCurve, q: &CurvePoint, n_max: u32) -> Result<DivisibilitySequence> {
    let Some(x) = q.x() else {
        return domain("the identity has no divisibility sequence");
    };
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    let b = x.denom().clone();
    let psi = e.psi_values(q, n_max)?;
    let mut terms = Vec::with_capacity(n_max as usize);
    let mut zero_terms = Vec::new();
    for n in 1..=n_max {
        let scaled = BigRational::from_integer(b.pow(n * n - 1)) * &psi[n as usize];
        if !scaled.is_integer() {
            return Err(Error::Domain(format!("b^(n²−1) ψ_{n}(P) = {scaled} is not an integer")));
        }
        let t = scaled.to_integer().magnitude().clone();
        if t.is_zero() {
            zero_terms.push(n);
        }
        terms.push(t);
    }
    Ok(DivisibilitySequence {
        curve: e.clone(),
        point: q.clone(),
        terms,
        zero_terms,
    })
}

/// The classical normalization `W_n = d^{n²} ψ_n(P)` for `x(P) = a/d²`,
/// so `W_1 = d`, `|W_n|` is the denominator of `x(nP)` up to cancellation,
/// and `E_n = d^{n²−2} W_n`.
pub fn classical_eds_terms(e: &WeierstrassCurve, q: &CurvePoint, n_max: u32) -> Result<Vec<BigInt>> {
    let Some(x) = q.x() else {
        return domain("the identity has no divisibility sequence");
    };
    let d = x.denom().sqrt();
    if &(&d * &d) != x.denom() {
        return domain("the denominator of x(P) is not a square");
    }
    let psi = e.psi_values(q, n_max)?;
    (1..=n_max)
        .map(|n| {
            let v = BigRational::from_integer(d.pow(n * n)) * &psi[n as usize];
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::Domain(format!("d^(n²) ψ_{n}(P) = {v} is not an integer")))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityReport {
    pub checked_pairs: usize,
    /// Pairs `(m, n)` with `m | n` and `E_m ∤ E_n`.
    pub violations: Vec<(u32, u32)>,
}

impl DivisibilityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `s_m | s_n` for every `m | n ≤ n_max`, where `terms[n − 1] = s_n`.
/// Zero divides only zero.
pub fn divisibility_check(terms: &[BigUint], n_max: u32) -> Result<DivisibilityReport> {
    if n_max as usize > terms.len() {
        return domain(format!("only {} terms available, {n_max} requested", terms.len()));
    }
    let mut checked_pairs = 0;
    let mut violations = Vec::new();
    for n in 1..=n_max {
        for m in divisors(n as u64) {
            let m = m as u32;
            let (sm, sn) = (&terms[m as usize - 1], &terms[n as usize - 1]);
            let divides = if sm.is_zero() { sn.is_zero() } else { (sn % sm).is_zero() };
            checked_pairs += 1;
            if !divides {
                violations.push((m, n));
            }
        }
    }
    Ok(DivisibilityReport {
        checked_pairs,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityReport {
    /// `O_n = (1/n) Σ_{d|n} μ(n/d) counts[d]`, the would-be number of
    /// orbits of length exactly `n`.
    pub orbit_counts: Vec<BigRational>,
    /// First `n` where `O_n` is not a nonnegative integer.
    pub first_failure: Option<u32>,
}

impl RealizabilityReport {
    pub fn realizable(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Test whether `counts[n − 1]` can be `|Per_n(T)|` for a single map `T`.
pub fn realizability_check(counts: &[BigUint]) -> RealizabilityReport {
    let mut orbit_counts = Vec::with_capacity(counts.len());
    let mut first_failure = None;
    for n in 1..=counts.len() as u64 {
        let mut sum = BigInt::zero();
        for d in divisors(n) {
            let c = BigInt::from(counts[d as usize - 1].clone());
            match mobius(n / d) {
                1 => sum += c,
                -1 => sum -= c,
                _ => {}
            }
        }
        let o = BigRational::new(sum, BigInt::from(n));
        if first_failure.is_none() && (!o.is_integer() || o.is_negative()) {
            first_failure = Some(n as u32);
        }
        orbit_counts.push(o);
    }
    RealizabilityReport {
        orbit_counts,
        first_failure,
    }
}

/// `|Per_n(f)|` for a self-map of `{0, …, len − 1}`, by iterating.
pub fn finite_map_periodic_counts(map: &[usize], n_max: u32) -> Vec<BigUint> {
    (1..=n_max)
        .map(|n| {
            let fixed = (0..map.len())
                .filter(|&x| (0..n).fold(x, |y, _| map[y]) == x)
                .count();
            BigUint::from(fixed)
        })
        .collect()
}

/// Number of cycles of exact length `n` in a self-map of a finite set.
pub fn finite_map_cycle_counts(map: &[usize], n_max: u32) -> Vec<u64> {
    let mut out = vec![0u64; n_max as usize];
    let mut seen = vec![false; map.len()];
    for start in 0..map.len() {
        // Walk until a repeat; the repeat lies on the cycle reachable from
        // start, which is counted once when first met at its least element.
        let mut x = start;
        for _ in 0..map.len() {
            x = map[x];
        }
        let mut len = 1;
        let mut least = x;
        let mut y = map[x];
        while y != x {
            least = least.min(y);
            y = map[y];
            len += 1;
        }
        if !seen[least] {
            seen[least] = true;
            if len <= n_max as usize {
                out[len - 1] += 1;
            }
        }
    }
    out
}

/// Gcd of the sequence's terms at indices `m` and `n`; for a strong
/// divisibility sequence this is the term at `gcd(m, n)`.
pub fn term_gcd(terms: &[BigUint], m: u32, n: u32) -> BigUint {
    terms[m as usize - 1].gcd(&terms[n as usize - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn curve37() -> (WeierstrassCurve, CurvePoint) {
        let e = WeierstrassCurve::from_coefficients([0, 0, 1, -1, 0]).unwrap();
        let p = e.point_i64((0, 1), (0, 1)).unwrap();
        (e, p)
    }

    #[test]
    fn first_terms() {
        let (e, p) = curve37();
        let s = eds_terms(&e, &p, 10).unwrap();
        assert_eq!(s.terms[..5], big(&[1, 1, 1, 1, 2])[..]);
        // Sequence A006769 up to sign.
        assert_eq!(s.terms[5..], big(&[1, 3, 5, 7, 4])[..]);
        assert!(s.zero_terms.is_empty());
    }

    #[test]
    fn negation_does_not_change_terms() {
        let (e, p) = curve37();
        let q = e.mul(3, &p);
        let a = eds_terms(&e, &q, 12).unwrap();
        let b = eds_terms(&e, &e.negate(&q), 12).unwrap();
        assert_eq!(a.terms, b.terms);
    }

    #[test]
    fn torsion_gives_zero_terms() {
        // (0, 0) has order 5 on y² + y = x³ − x².
        let e = WeierstrassCurve::from_coefficients([0, -1, 1, 0, 0]).unwrap();
        let t = e.point_i64((0, 1), (0, 1)).unwrap();
        let s = eds_terms(&e, &t, 12).unwrap();
        assert_eq!(s.zero_terms, vec![5, 10]);
    }

    #[test]
    fn spec_and_classical_normalizations() {
        let (e, p) = curve37();
        let q = e.mul(2, &p);
        let q = e.add(&q, &p); // 3P = (−1, −1)
        let q = e.add(&q, &p); // 4P = (2, −3)
        let q = e.add(&q, &p); // 5P = (1/4, −5/8)
        let d = BigUint::from(2u32);
        let s = eds_terms(&e, &q, 8).unwrap();
        let w = classical_eds_terms(&e, &q, 8).unwrap();
        assert_eq!(s.terms[0], BigUint::one());
        assert_eq!(w[0], BigInt::from(2));
        for n in 2..=8u32 {
            let expect = d.pow(n * n - 2) * w[n as usize - 1].magnitude();
            assert_eq!(s.terms[n as usize - 1], expect);
        }
        // ψ_{5n}(P) = ψ_n(5P) ψ_5(P)^{n²}, and d(5P) = |ψ_5(P)| = 2.
        let base = eds_terms(&e, &p, 40).unwrap();
        for n in 1..=8u32 {
            assert_eq!(*w[n as usize - 1].magnitude(), base.terms[(5 * n) as usize - 1]);
        }
    }

    #[test]
    fn divisibility() {
        let (e, p) = curve37();
        let s = eds_terms(&e, &p, 30).unwrap();
        let r = divisibility_check(&s.terms, 30).unwrap();
        assert!(r.holds());
        let mersenne: Vec<BigUint> = (1..=20u32).map(|n| (BigUint::one() << n) - 1u32).collect();
        assert!(divisibility_check(&mersenne, 20).unwrap().holds());
        let mut planted = mersenne.clone();
        planted[11] += 1u32;
        let r = divisibility_check(&planted, 20).unwrap();
        assert_eq!(r.violations, vec![(2, 12), (3, 12), (4, 12), (6, 12)]);
        // Strong divisibility: gcd(E_m, E_n) = E_gcd(m,n).
        for (m, n) in [(6, 9), (10, 15), (12, 18), (7, 11)] {
            assert_eq!(term_gcd(&s.terms, m, n), s.terms[(m.gcd(&n) - 1) as usize]);
        }
    }

    #[test]
    fn realizability() {
        let r = realizability_check(&big(&[1, 1, 1, 1, 2]));
        assert_eq!(r.first_failure, Some(5));
        assert_eq!(r.orbit_counts[4], BigRational::new(1.into(), 5.into()));
        let doubling: Vec<BigUint> = (1..=24u32).map(|n| (BigUint::one() << n) - 1u32).collect();
        assert!(realizability_check(&doubling).realizable());
        assert!(realizability_check(&big(&[1; 12])).realizable());
        // A negative orbit count also fails.
        assert_eq!(realizability_check(&big(&[3, 1])).first_failure, Some(2));
    }

    #[test]
    fn finite_map_oracle() {
        // 0 → 1 → 2 → 0, 3 → 3, 4 → 3.
        let map = [1, 2, 0, 3, 3];
        assert_eq!(finite_map_periodic_counts(&map, 3), big(&[1, 1, 4]));
        assert_eq!(finite_map_cycle_counts(&map, 3), vec![1, 0, 1]);
    }
}
