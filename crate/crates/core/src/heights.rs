//! Local and global canonical heights, a doubling oracle, and the
//! admissibility conditions for building the adelic system.
//!
//! Heights are in nats. Local heights are normalized without the
//! discriminant term, so that `λ_p(Q) = ½ log max{|x(Q)|_p, 1}` at good
//! primes and the archimedean height absorbs the rest.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor, ln_biguint, mod_inverse, valuation_int};
use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{domain, Error, Result};
use crate::poly::{resultant, IntPoly};
use crate::roots::rational_to_f64;

/// Decimal digits of accuracy targeted by the archimedean series.
const ARCH_DIGITS: f64 = 12.0;

fn affine(q: &CurvePoint) -> Result<(&BigRational, &BigRational)> {
    match q {
        CurvePoint::Identity => domain("heights are not evaluated at the identity"),
        CurvePoint::Affine { x, y } => Ok((x, y)),
    }
}

/// Residue of a p-integral rational modulo p.
fn reduce_mod(r: &BigRational, p: &BigInt) -> BigInt {
    let inv = mod_inverse(r.denom(), p).expect("p-integral");
    (r.numer() * inv).mod_floor(p)
}

/// Whether `Q` reduces to a nonsingular point of the curve modulo `p`.
fn nonsingular_reduction(e: &WeierstrassCurve, q: &CurvePoint, p: &BigUint) -> bool {
    let Ok((x, y)) = affine(q) else {
        return true;
    };
    let bp = BigInt::from(p.clone());
    if (x.denom() % &bp).is_zero() {
        // Reduces to the point at infinity.
        return true;
    }
    let (x, y) = (reduce_mod(x, &bp), reduce_mod(y, &bp));
    let [a1, a2, a3, a4, _] = e.coefficients();
    let fy = (BigInt::from(2) * &y + a1 * &x + a3).mod_floor(&bp);
    let fx = (a1 * &y - BigInt::from(3) * &x * &x - BigInt::from(2) * a2 * &x - a4).mod_floor(&bp);
    !(fx.is_zero() && fy.is_zero())
}

/// `λ_p(Q) = ½ log max{|x(Q)|_p, 1}`.
///
/// Valid at primes of good reduction, and at bad primes when `Q` lies in
/// the kernel of reduction (`p` divides the denominator of `x(Q)`). It is
/// also accepted at a bad prime where `Q` reduces to a nonsingular point and
/// `v_p(Δ) < 12` (so the model is minimal there); any other bad-prime case
/// is refused.
pub fn local_height_finite(e: &WeierstrassCurve, q: &CurvePoint, p: &BigUint) -> Result<f64> {
    let (x, _) = affine(q)?;
    if e.bad_primes().contains(p) {
        let in_kernel = (x.denom() % BigInt::from(p.clone())).is_zero();
        let minimal = valuation_int(e.discriminant(), p) < 12;
        if !in_kernel && !(minimal && nonsingular_reduction(e, q, p)) {
            return Err(Error::UnsupportedReduction {
                prime: p.to_string(),
            });
        }
    }
    let v = valuation_int(x.denom(), p);
    Ok(0.5 * v as f64 * ln_biguint(p))
}

/// Number of series terms for the archimedean height to `ARCH_DIGITS`
/// decimal digits (bound from the duplication-series error analysis).
fn arch_terms(e: &WeierstrassCurve) -> usize {
    let f = |b: &BigInt| b.abs().to_f64().unwrap_or(f64::MAX);
    let h = [4.0, f(e.b2()), 2.0 * f(e.b4()), 2.0 * f(e.b6()), f(e.b8())]
        .into_iter()
        .fold(0.0, f64::max);
    let n = 5.0 / 3.0 * ARCH_DIGITS + 0.5 + 0.75 * (7.0 + 4.0 / 3.0 * h).ln();
    n.ceil() as usize + 4
}

/// Archimedean local height by the duplication series.
///
/// The series tracks `t = 1/x` (or `1/(x+1)` near the origin, with shifted
/// b-invariants) along the doubling orbit `2^n Q`, switching branch so that
/// every logarithm stays bounded. Torsion orbits reach `t = 0`, after which
/// all further terms vanish.
pub fn local_height_arch(e: &WeierstrassCurve, q: &CurvePoint) -> Result<f64> {
    let (x, _) = affine(q)?;
    let fl = |b: &BigInt| b.to_f64().unwrap_or(f64::NAN);
    let (b2, b4, b6, b8) = (fl(e.b2()), fl(e.b4()), fl(e.b6()), fl(e.b8()));
    let (c2, c4, c6, c8) = (
        b2 - 12.0,
        b4 - b2 + 6.0,
        b6 - 2.0 * b4 + b2 - 4.0,
        b8 - 3.0 * b6 + 3.0 * b4 - b2 + 3.0,
    );
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (mut t, mut beta) = if x.abs() < half {
        (rational_to_f64(&(BigRational::one() / (x + BigRational::one()))), false)
    } else {
        (rational_to_f64(&x.recip()), true)
    };
    let mut mu = -t.abs().ln();
    let mut f = 1.0;
    for _ in 0..arch_terms(e) {
        if t == 0.0 {
            break;
        }
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        let (w, z, zw) = if beta {
            let w = b6 * t4 + 2.0 * b4 * t3 + b2 * t2 + 4.0 * t;
            let z = 1.0 - b4 * t2 - 2.0 * b6 * t3 - b8 * t4;
            (w, z, z + w)
        } else {
            let w = c6 * t4 + 2.0 * c4 * t3 + c2 * t2 + 4.0 * t;
            let z = 1.0 - c4 * t2 - 2.0 * c6 * t3 - c8 * t4;
            (w, z, z - w)
        };
        if w.abs() <= 2.0 * z.abs() {
            mu += f * z.abs().ln() / 4.0;
            t = w / z;
        } else {
            mu += f * zw.abs().ln() / 4.0;
            t = w / zw;
            beta = !beta;
        }
        f /= 4.0;
        if !mu.is_finite() {
            return Err(Error::Domain("archimedean height series diverged".into()));
        }
    }
    Ok(mu / 2.0)
}

/// Local heights at every place where they can be nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHeightProfile {
    pub point: CurvePoint,
    /// `(p, λ_p)` for the bad primes and the primes dividing the
    /// denominator of `x(Q)`, increasing in `p`.
    pub finite: Vec<(BigUint, f64)>,
    pub archimedean: f64,
    /// `ĥ(Q) = λ_∞ + Σ λ_p`.
    pub global: f64,
}

/// `ĥ(Q)` assembled from local heights.
pub fn global_height(e: &WeierstrassCurve, q: &CurvePoint) -> Result<LocalHeightProfile> {
    if q.is_identity() {
        return Ok(LocalHeightProfile {
            point: q.clone(),
            finite: Vec::new(),
            archimedean: 0.0,
            global: 0.0,
        });
    }
    let (x, _) = affine(q)?;
    let mut primes: Vec<BigUint> = e.bad_primes().to_vec();
    if !x.denom().is_one() {
        primes.extend(factor(x.denom().magnitude())?.into_iter().map(|(p, _)| p));
    }
    primes.sort();
    primes.dedup();
    let mut finite = Vec::with_capacity(primes.len());
    for p in primes {
        let h = local_height_finite(e, q, &p)?;
        finite.push((p, h));
    }
    let archimedean = local_height_arch(e, q)?;
    let global = archimedean + finite.iter().map(|(_, h)| h).sum::<f64>();
    Ok(LocalHeightProfile {
        point: q.clone(),
        finite,
        archimedean,
        global,
    })
}

/// Successive estimates `½·4^{-n}·h(x(2^n Q))` of the canonical height,
/// with `h(a/b) = log max(|a|, |b|)`, for `n = 0..=iterations`.
///
/// Doubling runs on the integer pair `(A, B)` with `x = A/B`. The common
/// factor of the doubled pair divides the resultant `R` of the two
/// doubling forms, so it is extracted by gcds against `R` instead of
/// against the full (and rapidly growing) numbers. Reaching the identity,
/// or revisiting an earlier x-coordinate, means `Q` is torsion and the
/// estimate is 0 from then on.
pub fn naive_height_sequence(
    e: &WeierstrassCurve,
    q: &CurvePoint,
    iterations: u32,
) -> Result<Vec<f64>> {
    if q.is_identity() {
        return Ok(vec![0.0; iterations as usize + 1]);
    }
    let (x, _) = affine(q)?;
    let (b2, b4, b6, b8) = (e.b2(), e.b4(), e.b6(), e.b8());
    let phi = IntPoly::new(vec![-b8, -2 * b6, -b4, BigInt::zero(), BigInt::one()]);
    let psi = e.two_torsion_polynomial();
    let r = resultant(&phi, &psi).abs();
    let mut a = x.numer().clone();
    let mut b = x.denom().clone();
    let mut out = Vec::with_capacity(iterations as usize + 1);
    let mut scale = 0.5;
    let naive = |a: &BigInt, b: &BigInt| ln_biguint(a.magnitude().max(b.magnitude()));
    out.push(scale * naive(&a, &b));
    let mut torsion = false;
    let mut seen = vec![(a.clone(), b.clone())];
    for _ in 0..iterations {
        scale /= 4.0;
        if torsion || b.is_zero() {
            torsion = true;
            out.push(0.0);
            continue;
        }
        let a2 = &a * &a;
        let b2_ = &b * &b;
        let ab = &a * &b;
        let a2b2 = &ab * &ab;
        let ab3 = &ab * &b2_;
        let b4_ = &b2_ * &b2_;
        let new_a: BigInt = &a2 * &a2 - b4 * &a2b2 - 2 * b6 * &ab3 - b8 * &b4_;
        let new_b: BigInt = 4 * (&a2 * &ab) + b2 * &a2b2 + 2 * b4 * &ab3 + b6 * &b4_;
        let g = Integer::gcd(&Integer::gcd(&(&new_a % &r), &r), &(&new_b % &r));
        let (mut na, mut nb) = if g.is_one() {
            (new_a, new_b)
        } else {
            (new_a / &g, new_b / &g)
        };
        if nb.is_negative() {
            na = -na;
            nb = -nb;
        }
        a = na;
        b = nb;
        if a.bits() + b.bits() < 4096 {
            if seen.contains(&(a.clone(), b.clone())) {
                torsion = true;
            }
            seen.push((a.clone(), b.clone()));
        }
        if torsion || b.is_zero() {
            torsion = true;
            out.push(0.0);
        } else {
            out.push(scale * naive(&a, &b));
        }
    }
    Ok(out)
}

/// The doubling oracle's final estimate; error `O(4^{-iterations})`.
pub fn naive_height_oracle(e: &WeierstrassCurve, q: &CurvePoint, iterations: u32) -> Result<f64> {
    Ok(*naive_height_sequence(e, q, iterations)?.last().unwrap())
}

/// Per-prime admissibility condition.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeCondition {
    pub prime: BigUint,
    /// `v_p(x(Q))`; the condition is `v_p < 0`, i.e. `|x(Q)|_p > 1`.
    pub valuation: i64,
    pub passes: bool,
}

/// Which admissibility conditions hold at each place of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub point: CurvePoint,
    pub bad_primes: Vec<PrimeCondition>,
    pub archimedean_height: f64,
    pub archimedean_passes: bool,
    pub passes: bool,
}

impl AssumptionReport {
    /// Human-readable list of the failing conditions.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .bad_primes
            .iter()
            .filter(|c| !c.passes)
            .map(|c| format!("|x(Q)|_{} = {}^{} is not > 1", c.prime, c.prime, -c.valuation))
            .collect();
        if !self.archimedean_passes {
            out.push(format!("λ_∞(Q) = {:.12} is not > 0", self.archimedean_height));
        }
        out
    }
}

/// Check `|x(Q)|_p > 1` at every bad prime and `λ_∞(Q) > 0`.
pub fn check_assumptions(e: &WeierstrassCurve, q: &CurvePoint) -> Result<AssumptionReport> {
    let (x, _) = affine(q)?;
    let bad_primes = e
        .bad_primes()
        .iter()
        .map(|p| {
            let num = if x.numer().is_zero() {
                0
            } else {
                valuation_int(x.numer(), p) as i64
            };
            let valuation = num - valuation_int(x.denom(), p) as i64;
            PrimeCondition {
                prime: p.clone(),
                valuation,
                passes: valuation < 0,
            }
        })
        .collect::<Vec<_>>();
    let archimedean_height = local_height_arch(e, q)?;
    let archimedean_passes = archimedean_height > 0.0;
    let passes = archimedean_passes && bad_primes.iter().all(|c| c.passes);
    Ok(AssumptionReport {
        point: q.clone(),
        bad_primes,
        archimedean_height,
        archimedean_passes,
        passes,
    })
}

/// The least admissible multiple found by [`find_admissible_multiple`].
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleMultiple {
    pub multiple: u32,
    pub point: CurvePoint,
    pub report: AssumptionReport,
    /// Reports for the rejected multiples `1..multiple`.
    pub rejected: Vec<AssumptionReport>,
}

/// Least `m ≤ bound` for which `mQ` passes [`check_assumptions`].
pub fn find_admissible_multiple(
    e: &WeierstrassCurve,
    q: &CurvePoint,
    bound: u32,
) -> Result<AdmissibleMultiple> {
    let mut rejected = Vec::new();
    let mut mq = CurvePoint::Identity;
    for m in 1..=bound {
        mq = e.add(&mq, q);
        if mq.is_identity() {
            return Err(Error::Assumptions(format!(
                "the point is torsion of order {m}"
            )));
        }
        let report = check_assumptions(e, &mq)?;
        if report.passes {
            return Ok(AdmissibleMultiple {
                multiple: m,
                point: mq,
                report,
                rejected,
            });
        }
        rejected.push(report);
    }
    let last = rejected
        .last()
        .map(|r| r.failures().join("; "))
        .unwrap_or_default();
    Err(Error::Assumptions(format!(
        "no multiple m ≤ {bound} is admissible (at m = {bound}: {last})"
    )))
}
