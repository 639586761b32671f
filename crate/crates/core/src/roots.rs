//! Real root isolation by Descartes' rule of signs on dyadic intervals, exact
//! refinement, and an Aberth iteration for complex roots.
//!
//! Real roots are carried as [`RealRoot`]: a squarefree integer polynomial
//! together with an isolating interval with rational endpoints. All sign
//! decisions are made in exact integer arithmetic; floats only appear when
//! a caller asks for [`RealRoot::to_f64`].

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// Refuse to bisect beyond this depth; a squarefree polynomial never needs it.
const MAX_DEPTH: u64 = 4096;

/// A real algebraic number given by an isolating interval of a squarefree
/// polynomial. When `lo == hi` the root is the rational `lo` itself.
#[derive(Clone, Debug)]
pub struct RealRoot {
    poly: IntPoly,
    lo: BigRational,
    hi: BigRational,
    /// Sign of the polynomial just to the right of `lo`.
    sign_lo: i32,
}

impl RealRoot {
    fn exact(poly: IntPoly, r: BigRational) -> Self {
        RealRoot {
            poly,
            lo: r.clone(),
            hi: r,
            sign_lo: 0,
        }
    }

    fn open(poly: IntPoly, lo: BigRational, hi: BigRational) -> Self {
        let mut sign_lo = poly.sign_at(&lo);
        if sign_lo == 0 {
            sign_lo = poly.derivative().sign_at(&lo);
        }
        RealRoot {
            poly,
            lo,
            hi,
            sign_lo,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// One bisection step.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        let s = self.poly.sign_at(&mid);
        if s == 0 {
            self.lo = mid.clone();
            self.hi = mid;
            self.sign_lo = 0;
        } else if s == self.sign_lo {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisect until the interval is at most `width` wide.
    pub fn refine_to(&mut self, width: &BigRational) -> Result<()> {
        let mut steps = 0;
        while !self.is_exact() && &self.width() > width {
            self.bisect();
            steps += 1;
            if steps > 100_000 {
                return Err(Error::RootRefinement(format!(
                    "could not reach width {width} on {}",
                    self.poly
                )));
            }
        }
        Ok(())
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// Nearest double to the midpoint of the current interval.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        if self.is_exact() {
            return self.lo.cmp(r);
        }
        if r <= &self.lo {
            return Ordering::Greater;
        }
        if r >= &self.hi {
            return Ordering::Less;
        }
        let s = self.poly.sign_at(r);
        if s == 0 {
            Ordering::Equal
        } else if s == self.sign_lo {
            // Still on the left of the root.
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Compare two real algebraic numbers by refining until their intervals
    /// separate. Fails if they cannot be separated within the refinement
    /// budget (which happens only when they are equal).
    pub fn compare(&mut self, other: &mut RealRoot) -> Result<Ordering> {
        if self.is_exact() {
            return Ok(other.cmp_rational(&self.lo).reverse());
        }
        if other.is_exact() {
            return Ok(self.cmp_rational(&other.lo));
        }
        for _ in 0..2000 {
            if self.hi <= other.lo {
                return Ok(Ordering::Less);
            }
            if other.hi <= self.lo {
                return Ok(Ordering::Greater);
            }
            if self.poly == other.poly && self.lo == other.lo && self.hi == other.hi {
                return Ok(Ordering::Equal);
            }
            if self.width() >= other.width() {
                self.bisect();
            } else {
                other.bisect();
            }
            if self.is_exact() || other.is_exact() {
                return self.compare(other);
            }
        }
        Err(Error::RootRefinement(
            "roots could not be separated; they are probably equal".into(),
        ))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Shift both into a comfortable range before converting.
    let shift = (nb - db) - 60;
    let q = if shift > 0 {
        (n / (d << shift as usize)).clone()
    } else {
        (n << (-shift) as usize) / d
    };
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Exponent `s` with every root of `p` strictly inside `(-2^s, 2^s)`
/// (Fujiwara's bound, evaluated on bit lengths).
fn root_bound_exponent(p: &IntPoly) -> u64 {
    let d = p.degree().unwrap_or(0);
    let lead_bits = p.leading().map(|c| c.bits() as i64).unwrap_or(1);
    let mut s: i64 = 0;
    for i in 1..=d {
        let c = p.coeff(d - i);
        if c.is_zero() {
            continue;
        }
        let num = c.bits() as i64 - lead_bits + 1;
        let e = if num <= 0 { 0 } else { (num + i as i64 - 1) / i as i64 };
        s = s.max(e + 1);
    }
    s.max(1) as u64
}

/// Roots of a squarefree `q` in (0, 1), as dyadic intervals `(c/2^k, (c+1)/2^k)`
/// or exact dyadic roots.
fn descartes_unit(q: &IntPoly, out_open: &mut Vec<(BigInt, u64)>, out_exact: &mut Vec<(BigInt, u64)>) -> Result<()> {
    let mut stack: Vec<(IntPoly, BigInt, u64)> = vec![(q.clone(), BigInt::zero(), 0)];
    while let Some((poly, c, k)) = stack.pop() {
        let var = poly.reversed().taylor_shift_one().sign_variations();
        if var == 0 {
            continue;
        }
        if var == 1 {
            out_open.push((c, k));
            continue;
        }
        if k >= MAX_DEPTH {
            return Err(Error::RootRefinement(
                "isolation depth exceeded; polynomial is probably not squarefree".into(),
            ));
        }
        let left = poly.shrink_pow2(1);
        if left.sign_at_dyadic(&BigInt::one(), 0) == 0 {
            out_exact.push((&c * 2 + 1, k + 1));
        }
        let right = left.taylor_shift_one();
        stack.push((right, &c * 2 + 1, k + 1));
        stack.push((left, &c * 2, k + 1));
    }
    Ok(())
}

/// Isolate the positive roots of squarefree `p`.
fn positive_roots(p: &IntPoly) -> Result<Vec<RealRoot>> {
    let s = root_bound_exponent(p);
    let q = p.stretch_pow2(s);
    let mut open = Vec::new();
    let mut exact = Vec::new();
    descartes_unit(&q, &mut open, &mut exact)?;
    let scale = |c: &BigInt, k: u64| -> BigRational {
        // c / 2^k · 2^s
        if k >= s {
            BigRational::new(c.clone(), BigInt::one() << (k - s) as usize)
        } else {
            BigRational::from_integer(c << (s - k) as usize)
        }
    };
    let mut roots: Vec<RealRoot> = open
        .iter()
        .map(|(c, k)| RealRoot::open(p.clone(), scale(c, *k), scale(&(c + 1), *k)))
        .collect();
    roots.extend(exact.iter().map(|(c, k)| RealRoot::exact(p.clone(), scale(c, *k))));
    Ok(roots)
}

/// Isolate all real roots of a polynomial assumed squarefree, sorted
/// increasingly.
pub fn isolate_real_roots_squarefree(p: &IntPoly) -> Result<Vec<RealRoot>> {
    let Some(d) = p.degree() else {
        return Err(Error::Domain("zero polynomial has no isolated roots".into()));
    };
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    let mut core = p.clone();
    if core.coeff(0).is_zero() {
        roots.push(RealRoot::exact(p.clone(), BigRational::zero()));
        core = IntPoly::new(core.coeffs()[1..].to_vec());
    }
    if core.degree().unwrap_or(0) > 0 {
        for r in positive_roots(&core)? {
            roots.push(RealRoot {
                poly: p.clone(),
                ..r
            });
        }
        for r in positive_roots(&core.reflect())? {
            let (lo, hi) = (-r.hi.clone(), -r.lo.clone());
            roots.push(if lo == hi {
                RealRoot::exact(p.clone(), lo)
            } else {
                RealRoot::open(p.clone(), lo, hi)
            });
        }
    }
    for r in roots.iter_mut() {
        if !r.is_exact() {
            *r = RealRoot::open(p.clone(), r.lo.clone(), r.hi.clone());
        }
    }
    // An exact root at c precedes an open interval starting at c.
    roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.is_exact().cmp(&a.is_exact())));
    Ok(roots)
}

/// Isolate the distinct real roots of any nonzero polynomial.
pub fn isolate_real_roots(p: &IntPoly) -> Result<Vec<RealRoot>> {
    isolate_real_roots_squarefree(&p.squarefree_part())
}

/// An approximate complex root with a radius of a disc known to contain a
/// root of the polynomial.
#[derive(Clone, Copy, Debug)]
pub struct ComplexRoot {
    pub z: Complex64,
    pub radius: f64,
}

/// Complex roots of a squarefree polynomial by the Aberth-Ehrlich
/// iteration in double precision.
///
/// Each returned `radius` is the inclusion radius `deg·|p(z)/p'(z)|`, which
/// always encloses some root of `p`.
pub fn complex_roots_squarefree(p: &IntPoly) -> Vec<ComplexRoot> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let bound = 2f64.powi(root_bound_exponent(p) as i32);
    let radius0 = bound.min(1e6).max(0.5) * 0.5;
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(radius0, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..d {
            let pz = p.eval_complex(z[i]);
            let dpz = dp.eval_complex(z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dpz;
            let sum: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.into_iter()
        .map(|zi| {
            let r = d as f64 * (p.eval_complex(zi) / dp.eval_complex(zi)).norm();
            ComplexRoot { z: zi, radius: r }
        })
        .collect()
}

/// Complex roots with multiplicity, via squarefree decomposition.
pub fn complex_roots(p: &IntPoly) -> Vec<(ComplexRoot, u32)> {
    p.squarefree_decomposition()
        .into_iter()
        .flat_map(|(g, e)| {
            complex_roots_squarefree(&g)
                .into_iter()
                .map(move |r| (r, e))
        })
        .collect()
}

#[cfg(test)]
fn dyadic_width(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn isolates_and_refines_sqrt2() {
        let f = p(&[-2, 0, 1]);
        let mut roots = isolate_real_roots(&f).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots.iter_mut() {
            r.refine_to(&dyadic_width(60)).unwrap();
        }
        assert!((roots[0].to_f64() + 2f64.sqrt()).abs() < 1e-15);
        assert!((roots[1].to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_dyadic_and_zero_roots() {
        // x (2x - 1)(x + 3)(x - 4)
        let f = &(&(&p(&[0, 1]) * &p(&[-1, 2])) * &p(&[3, 1])) * &p(&[-4, 1]);
        let roots = isolate_real_roots(&f).unwrap();
        let vals: Vec<f64> = roots.iter().map(|r| r.to_f64()).collect();
        assert_eq!(vals.len(), 4);
        let expected = [-3.0, 0.0, 0.5, 4.0];
        for (mut r, e) in roots.into_iter().zip(expected) {
            r.refine_to(&dyadic_width(40)).unwrap();
            assert!((r.to_f64() - e).abs() < 1e-10, "{} vs {e}", r.to_f64());
        }
    }

    #[test]
    fn close_roots_are_separated() {
        // (1000x - 1)(1001x - 1)(x^2 + 1)
        let f = &(&p(&[-1, 1000]) * &p(&[-1, 1001])) * &p(&[1, 0, 1]);
        let roots = isolate_real_roots(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi() <= roots[1].lo());
    }

    #[test]
    fn compare_algebraic_numbers() {
        let mut a = isolate_real_roots(&p(&[-2, 0, 1])).unwrap().pop().unwrap();
        let mut b = isolate_real_roots(&p(&[-3, 0, 1])).unwrap().pop().unwrap();
        assert_eq!(a.compare(&mut b).unwrap(), Ordering::Less);
        let half = BigRational::new(3.into(), 2.into());
        assert_eq!(a.cmp_rational(&half), Ordering::Less);
        assert_eq!(b.cmp_rational(&half), Ordering::Greater);
    }

    #[test]
    fn aberth_finds_golden_ratio_and_complex_pair() {
        let f = &p(&[-1, -1, 1]) * &p(&[2, 0, 1]);
        let roots: Vec<Complex64> = complex_roots_squarefree(&f).into_iter().map(|r| r.z).collect();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let s2 = 2f64.sqrt();
        for want in [
            Complex64::new(phi, 0.0),
            Complex64::new(1.0 - phi, 0.0),
            Complex64::new(0.0, s2),
            Complex64::new(0.0, -s2),
        ] {
            assert!(roots.iter().any(|z| (z - want).norm() < 1e-12), "{want} missing");
        }
    }

    #[test]
    fn high_degree_isolation() {
        // ∏_{i=1}^{20} (x - i): Wilkinson's polynomial.
        let mut f = IntPoly::one();
        for i in 1..=20 {
            f = &f * &p(&[-i, 1]);
        }
        let roots = isolate_real_roots_squarefree(&f).unwrap();
        assert_eq!(roots.len(), 20);
        for (i, r) in roots.iter().enumerate() {
            assert_eq!(r.cmp_rational(&BigRational::from_integer(BigInt::from(i as i64 + 1))), Ordering::Equal);
        }
    }
}
