//! Elliptic curves over Q in generalized Weierstrass form
//! `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
//!
//! Points have exact rational coordinates. Division polynomials are kept as
//! integer polynomials in `x` alone: `ψ_n = ψ_2^{[n even]} · g_n(x)` with
//! `ψ_2 = 2y + a1·x + a3`, and `ψ_2² = f(x) = 4x³ + b2·x² + 2b4·x + b6` on
//! the curve.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor, ln_abs_rational};
use crate::error::{domain, Error, Result};
use crate::poly::IntPoly;
use crate::roots::{isolate_real_roots_squarefree, RealRoot};

/// Default absolute width to which roots of `ν_n` are refined: 2^-60.
pub const ROOT_WIDTH_BITS: u32 = 60;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    a: [BigInt; 5],
    b2: BigInt,
    b4: BigInt,
    b6: BigInt,
    b8: BigInt,
    discriminant: BigInt,
    bad_primes: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Identity,
    Affine { x: BigRational, y: BigRational },
}

impl CurvePoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Identity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Identity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Identity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl WeierstrassCurve {
    pub fn new(a1: BigInt, a2: BigInt, a3: BigInt, a4: BigInt, a6: BigInt) -> Result<Self> {
        let b2: BigInt = &a1 * &a1 + 4 * &a2;
        let b4: BigInt = 2 * &a4 + &a1 * &a3;
        let b6: BigInt = &a3 * &a3 + 4 * &a6;
        let b8: BigInt = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let discriminant: BigInt = -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6
            + 9 * &b2 * &b4 * &b6;
        if discriminant.is_zero() {
            return Err(Error::SingularCurve);
        }
        let bad_primes = factor(discriminant.magnitude())?
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        Ok(WeierstrassCurve {
            a: [a1, a2, a3, a4, a6],
            b2,
            b4,
            b6,
            b8,
            discriminant,
            bad_primes,
        })
    }

    /// Curve from `[a1, a2, a3, a4, a6]`.
    pub fn from_coefficients(a: [i64; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
        Self::new(a1, a2, a3, a4, a6)
    }

    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }
    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.a
    }
    pub fn b2(&self) -> &BigInt {
        &self.b2
    }
    pub fn b4(&self) -> &BigInt {
        &self.b4
    }
    pub fn b6(&self) -> &BigInt {
        &self.b6
    }
    pub fn b8(&self) -> &BigInt {
        &self.b8
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Primes dividing the discriminant, increasing.
    pub fn bad_primes(&self) -> &[BigUint] {
        &self.bad_primes
    }

    /// `f(x) = 4x³ + b2·x² + 2b4·x + b6`, whose roots are the x-coordinates of
    /// the 2-torsion points.
    pub fn two_torsion_polynomial(&self) -> IntPoly {
        IntPoly::new(vec![
            self.b6.clone(),
            2 * &self.b4,
            self.b2.clone(),
            BigInt::from(4),
        ])
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        let lhs = y * y + rat(a1) * x * y + rat(a3) * y;
        let rhs = x * x * x + rat(a2) * x * x + rat(a4) * x + rat(a6);
        lhs == rhs
    }

    pub fn point(&self, x: BigRational, y: BigRational) -> Result<CurvePoint> {
        if !self.contains(&x, &y) {
            return Err(Error::NotOnCurve);
        }
        Ok(CurvePoint::Affine { x, y })
    }

    pub fn point_i64(&self, x: (i64, i64), y: (i64, i64)) -> Result<CurvePoint> {
        self.point(
            BigRational::new(x.0.into(), x.1.into()),
            BigRational::new(y.0.into(), y.1.into()),
        )
    }

    pub fn negate(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: -y - rat(self.a1()) * x - rat(self.a3()),
            },
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Identity, _) => return q.clone(),
            (_, CurvePoint::Identity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let [a1, a2, a3, a4, a6] = self.a.clone().map(BigRational::from_integer);
        let (lambda, nu) = if x1 == x2 {
            let denom = y1 + y2 + &a1 * x2 + &a3;
            if denom.is_zero() {
                return CurvePoint::Identity;
            }
            let two_y = rat_i(2) * y1 + &a1 * x1 + &a3;
            let lambda = (rat_i(3) * x1 * x1 + rat_i(2) * &a2 * x1 + &a4 - &a1 * y1) / &two_y;
            let nu = (-(x1 * x1 * x1) + &a4 * x1 + rat_i(2) * &a6 - &a3 * y1) / &two_y;
            (lambda, nu)
        } else {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
        };
        let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
        let y3 = -(&lambda + &a1) * &x3 - nu - a3;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        self.add(p, p)
    }

    /// `m·P` by double-and-add; negative `m` negates.
    pub fn mul(&self, m: i64, p: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Identity;
        let mut base = if m < 0 { self.negate(p) } else { p.clone() };
        let mut e = m.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// Order of `P` if it is at most `bound`.
    pub fn torsion_order(&self, p: &CurvePoint, bound: u32) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=bound {
            if q.is_identity() {
                return Some(n);
            }
            q = self.add(&q, p);
            if n == bound && q.is_identity() {
                return None;
            }
        }
        None
    }

    /// The x-parts `g_1, …, g_{n_max}` (index 0 holds `g_0 = 0`).
    fn g_table(&self, n_max: u32) -> Vec<IntPoly> {
        let (b2, b4, b6, b8) = (&self.b2, &self.b4, &self.b6, &self.b8);
        let f = self.two_torsion_polynomial();
        let f2 = &f * &f;
        let mut g = vec![IntPoly::zero(), IntPoly::one(), IntPoly::one()];
        g.push(IntPoly::new(vec![
            b8.clone(),
            3 * b6,
            3 * b4,
            b2.clone(),
            BigInt::from(3),
        ]));
        g.push(IntPoly::new(vec![
            b4 * b8 - b6 * b6,
            b2 * b8 - b4 * b6,
            10 * b8,
            10 * b6,
            5 * b4,
            b2.clone(),
            BigInt::from(2),
        ]));
        let cube = |p: &IntPoly| p * &(p * p);
        let square = |p: &IntPoly| p * p;
        for n in 5..=n_max as usize {
            let m = n / 2;
            let next = if n % 2 == 1 {
                let left = &g[m + 2] * &cube(&g[m]);
                let right = &g[m - 1] * &cube(&g[m + 1]);
                if m % 2 == 0 {
                    &(&f2 * &left) - &right
                } else {
                    &left - &(&f2 * &right)
                }
            } else {
                let inner = &(&g[m + 2] * &square(&g[m - 1])) - &(&g[m - 2] * &square(&g[m + 1]));
                &g[m] * &inner
            };
            g.push(next);
        }
        g.truncate(n_max as usize + 1);
        g
    }

    /// `ψ_1, …, ψ_{n_max}`.
    pub fn division_polynomials(&self, n_max: u32) -> Result<Vec<DivisionPolynomial>> {
        if n_max == 0 {
            return domain("division polynomials are indexed from 1");
        }
        let f = self.two_torsion_polynomial();
        Ok(self
            .g_table(n_max)
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(n, g)| {
                let even = n % 2 == 0;
                let mut sq = &g * &g;
                if even {
                    sq = &sq * &f;
                }
                DivisionPolynomial {
                    n: n as u32,
                    x_part: g,
                    even,
                    psi_squared: sq,
                }
            })
            .collect())
    }

    pub fn division_polynomial(&self, n: u32) -> Result<DivisionPolynomial> {
        Ok(self.division_polynomials(n)?.pop().unwrap())
    }

    /// Values `ψ_0(P), …, ψ_{n_max}(P)`, by the same recurrence run on
    /// rational values instead of polynomials.
    pub fn psi_values(&self, p: &CurvePoint, n_max: u32) -> Result<Vec<BigRational>> {
        let CurvePoint::Affine { x, y } = p else {
            return domain("division polynomials are not evaluated at the identity");
        };
        let psi2 = rat_i(2) * y + rat(self.a1()) * x + rat(self.a3());
        let f = &psi2 * &psi2;
        let f2 = &f * &f;
        let (b2, b4, b6, b8) = (rat(&self.b2), rat(&self.b4), rat(&self.b6), rat(&self.b8));
        let x2 = x * x;
        let x3 = &x2 * x;
        let x4 = &x3 * x;
        let g3 = rat_i(3) * &x4 + &b2 * &x3 + rat_i(3) * &b4 * &x2 + rat_i(3) * &b6 * x + &b8;
        let g4 = rat_i(2) * &x3 * &x3
            + &b2 * &x4 * x
            + rat_i(5) * &b4 * &x4
            + rat_i(10) * &b6 * &x3
            + rat_i(10) * &b8 * &x2
            + (&b2 * &b8 - &b4 * &b6) * x
            + (&b4 * &b8 - &b6 * &b6);
        let mut g = vec![BigRational::zero(), BigRational::one(), BigRational::one(), g3, g4];
        let cube = |v: &BigRational| v * v * v;
        for n in 5..=n_max.max(4) as usize {
            let m = n / 2;
            let next = if n % 2 == 1 {
                let left = &g[m + 2] * cube(&g[m]);
                let right = &g[m - 1] * cube(&g[m + 1]);
                if m % 2 == 0 {
                    &f2 * left - right
                } else {
                    left - &f2 * right
                }
            } else {
                &g[m] * (&g[m + 2] * &g[m - 1] * &g[m - 1] - &g[m - 2] * &g[m + 1] * &g[m + 1])
            };
            g.push(next);
        }
        g.truncate(n_max as usize + 1);
        Ok(g.into_iter()
            .enumerate()
            .map(|(n, v)| if n % 2 == 0 { v * &psi2 } else { v })
            .collect())
    }

    /// `ψ_n(P)`, with the `y`-dependent factor evaluated at `P`'s own `y`
    /// when `n` is even.
    pub fn evaluate_psi_at_point(&self, n: u32, p: &CurvePoint) -> Result<BigRational> {
        if n == 0 {
            return domain("division polynomials are indexed from 1");
        }
        Ok(self.psi_values(p, n)?.pop().unwrap())
    }

    /// Largest real root of `f`, the x-coordinate where the identity
    /// component of `E(R)` meets the x-axis.
    pub fn gamma_max(&self) -> Result<RealRoot> {
        isolate_real_roots_squarefree(&self.two_torsion_polynomial())?
            .pop()
            .ok_or_else(|| Error::RootRefinement("a real cubic has a real root".into()))
    }

    /// Whether some real point of the identity component has x-coordinate
    /// `x0`. Such points are exactly those with `x0 ≥ γ_max`: when `Δ < 0`
    /// this is the same as `f(x0) ≥ 0`, and when `Δ > 0` it excludes the
    /// egg-shaped component lying over `[e1, e2]`.
    pub fn identity_component_contains(&self, x0: &BigRational) -> Result<bool> {
        Ok(self.gamma_max()?.cmp_rational(x0) != Ordering::Greater)
    }

    /// The roots of `ν_n`: x-coordinates of the non-identity points of
    /// order dividing `n` on the identity component, with multiplicity.
    ///
    /// Each root above `γ_max` carries the pair `±P` and counts twice; for
    /// even `n` the point of order 2 at `γ_max` counts once. The total is
    /// checked to be `n − 1`.
    pub fn nu_poly(&self, n: u32) -> Result<Vec<NuRoot>> {
        if n < 2 {
            return domain("ν_n is defined for n ≥ 2");
        }
        let psi = self.division_polynomial(n)?;
        let mut gamma = self.gamma_max()?;
        let g = psi.x_part.primitive_part();
        let mut out = Vec::new();
        if g.degree().unwrap_or(0) > 0 {
            for mut root in isolate_real_roots_squarefree(&g)? {
                if root.compare(&mut gamma)? == Ordering::Greater {
                    out.push(NuRoot {
                        root,
                        multiplicity: 2,
                    });
                }
            }
        }
        if psi.even {
            out.push(NuRoot {
                root: gamma,
                multiplicity: 1,
            });
        }
        let total: u32 = out.iter().map(|r| r.multiplicity).sum();
        if total != n - 1 {
            return Err(Error::RootRefinement(format!(
                "ν_{n} collected total multiplicity {total}, expected {}",
                n - 1
            )));
        }
        Ok(out)
    }

    /// `log |ν_n(q)| = Σ mult · log |q − x_i|`.
    pub fn real_division_value(&self, n: u32, q: &BigRational) -> Result<f64> {
        let roots = self.nu_poly(n)?;
        log_abs_nu(roots, q)
    }
}

/// `Σ mult · log |q − x_i|` over refined roots.
pub fn log_abs_nu(roots: Vec<NuRoot>, q: &BigRational) -> Result<f64> {
    let width = BigRational::new(BigInt::one(), BigInt::one() << ROOT_WIDTH_BITS as usize);
    let mut total = 0.0;
    for NuRoot {
        mut root,
        multiplicity,
    } in roots
    {
        root.refine_to(&width)?;
        if root.cmp_rational(q) == Ordering::Equal {
            return domain(format!("q = {q} is a root of ν_n"));
        }
        // Shrink until the interval is small relative to its distance from q.
        let mut guard = 0;
        loop {
            let d_lo = (q - root.lo()).abs();
            let d_hi = (q - root.hi()).abs();
            let near = if d_lo < d_hi { d_lo } else { d_hi };
            if root.width() * BigRational::from_integer(BigInt::one() << 50) <= near {
                break;
            }
            root.bisect();
            guard += 1;
            if guard > 20_000 {
                return Err(Error::RootRefinement("q is too close to a root of ν_n".into()));
            }
        }
        total += multiplicity as f64 * ln_abs_rational(&(q - root.midpoint()));
    }
    Ok(total)
}

/// A root of the real division polynomial `ν_n`.
#[derive(Clone, Debug)]
pub struct NuRoot {
    pub root: RealRoot,
    pub multiplicity: u32,
}

/// `ψ_n` stored through its x-part: `ψ_n = (2y + a1·x + a3)^{[n even]} · g_n(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionPolynomial {
    n: u32,
    x_part: IntPoly,
    even: bool,
    psi_squared: IntPoly,
}

impl DivisionPolynomial {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `g_n(x)`.
    pub fn x_part(&self) -> &IntPoly {
        &self.x_part
    }

    pub fn has_y_factor(&self) -> bool {
        self.even
    }

    /// `ψ_n²` as a polynomial in `x`: degree `n² − 1`, leading coefficient `n²`.
    pub fn psi_squared(&self) -> &IntPoly {
        &self.psi_squared
    }

    pub fn evaluate(&self, curve: &WeierstrassCurve, p: &CurvePoint) -> Result<BigRational> {
        let CurvePoint::Affine { x, y } = p else {
            return domain("division polynomials are not evaluated at the identity");
        };
        let g = self.x_part.eval_rational(x);
        if self.even {
            Ok(g * (rat_i(2) * y + rat(curve.a1()) * x + rat(curve.a3())))
        } else {
            Ok(g)
        }
    }
}
