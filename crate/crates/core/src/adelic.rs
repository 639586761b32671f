//! The product system `T_Q` attached to a rational point: a q-transformation
//! at each prime dividing the denominator of `q = x(Q)` and a
//! β-transformation with `β = exp(2λ_∞(Q))` at the archimedean place.
//!
//! Points of the product space are never materialized. Entropy and periodic
//! counts are assembled from the components, which is all the theory needs.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::{factor, ln_biguint};
use crate::beta::{BetaCount, BetaSystem};
use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{domain, Error, Result};
use crate::heights::{check_assumptions, global_height, AssumptionReport, LocalHeightProfile};
use crate::padic::QTransform;

/// Relative radius of the interval placed around `exp(2λ_∞)`; the
/// archimedean height is accurate to about 1e-12, so this is generous.
pub const BETA_RELATIVE_RADIUS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct AdelicSystem {
    curve: WeierstrassCurve,
    point: CurvePoint,
    q: BigRational,
    /// Finite part of the support: primes dividing the denominator of `q`,
    /// with their q-transformations.
    components: Vec<QTransform>,
    beta: BetaSystem,
    log_beta: f64,
    heights: LocalHeightProfile,
    report: AssumptionReport,
}

impl AdelicSystem {
    /// Assemble `T_Q`, refusing torsion points and points that fail the
    /// admissibility conditions.
    pub fn build(curve: &WeierstrassCurve, point: &CurvePoint) -> Result<Self> {
        let Some(q) = point.x().cloned() else {
            return Err(Error::Assumptions("Q is the identity".into()));
        };
        // Rational torsion has order at most 12.
        if let Some(order) = curve.torsion_order(point, 12) {
            return Err(Error::Assumptions(format!("Q is torsion of order {order}")));
        }
        let report = check_assumptions(curve, point)?;
        if !report.passes {
            return Err(Error::Assumptions(report.failures().join("; ")));
        }
        let mut components = Vec::new();
        for (p, _) in factor(q.denom().magnitude())? {
            let p = p
                .to_u64()
                .ok_or_else(|| Error::Domain(format!("prime {p} exceeds the 64-bit p-adic kernel")))?;
            components.push(QTransform::new(p, q.clone())?);
        }
        let heights = global_height(curve, point)?;
        let log_beta = 2.0 * heights.archimedean;
        let beta_value = log_beta.exp();
        let beta = BetaSystem::from_f64(beta_value, beta_value * BETA_RELATIVE_RADIUS)?;
        Ok(AdelicSystem {
            curve: curve.clone(),
            point: point.clone(),
            q,
            components,
            beta,
            log_beta,
            heights,
            report,
        })
    }

    pub fn curve(&self) -> &WeierstrassCurve {
        &self.curve
    }

    pub fn point(&self) -> &CurvePoint {
        &self.point
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    /// `b`, the positive denominator of `q`.
    pub fn denominator(&self) -> BigUint {
        self.q.denom().magnitude().clone()
    }

    /// Finite primes of the support `S*(Q)`, increasing.
    pub fn support(&self) -> Vec<u64> {
        self.components.iter().map(|t| t.prime()).collect()
    }

    pub fn components(&self) -> &[QTransform] {
        &self.components
    }

    /// The q-transformation at any prime; off the support it is an
    /// isometry with entropy 0 and the single periodic point 0.
    pub fn component_at(&self, p: u64) -> Result<QTransform> {
        QTransform::new(p, self.q.clone())
    }

    pub fn beta(&self) -> &BetaSystem {
        &self.beta
    }

    /// `log β = 2λ_∞(Q)`.
    pub fn log_beta(&self) -> f64 {
        self.log_beta
    }

    pub fn heights(&self) -> &LocalHeightProfile {
        &self.heights
    }

    pub fn assumptions(&self) -> &AssumptionReport {
        &self.report
    }

    /// Entropy by component, checked against `2ĥ(Q)`.
    pub fn entropy(&self) -> EntropyReport {
        let finite: Vec<(u64, f64)> = self
            .components
            .iter()
            .map(|t| (t.prime(), t.entropy()))
            .collect();
        let finite_sum: f64 = finite.iter().map(|(_, h)| h).sum();
        let product: BigUint = self
            .components
            .iter()
            .map(|t| BigUint::from(t.prime()).pow(t.expansion_exponent()))
            .product();
        // Each component reports its own entropy; nothing here is read back
        // from the height computation except the value compared against.
        let archimedean = self.beta.entropy();
        let total = finite_sum + archimedean;
        let two_h = 2.0 * self.heights.global;
        EntropyReport {
            finite,
            finite_sum,
            log_denominator: ln_biguint(&self.denominator()),
            finite_product_is_denominator: product == self.denominator(),
            archimedean,
            total,
            twice_height: two_h,
            discrepancy: (total - two_h).abs(),
        }
    }

    /// Periodic-point growth for `n = 1..=n_max`, compared with
    /// `log|b^n ν_n(q)|`. Stops early (and says so) once the β-enumeration
    /// budget is exceeded.
    pub fn periodic_growth(&self, n_max: u32) -> Result<GrowthTable> {
        if n_max == 0 {
            return domain("n_max must be at least 1");
        }
        let b = self.denominator();
        let log_b = ln_biguint(&b);
        let mut rows = Vec::new();
        let mut truncated_at = None;
        for n in 1..=n_max {
            let beta_count = match self.beta.periodic_count(n) {
                Ok(c) => c,
                Err(Error::Budget(_)) => {
                    truncated_at = Some(n);
                    break;
                }
                Err(e) => return Err(e),
            };
            let mut finite = BigUint::one();
            for t in &self.components {
                finite *= t.periodic_count(n)?;
            }
            let finite_matches = finite == b.pow(n);
            let log_finite = n as f64 * log_b;
            let log_nu = if n == 1 {
                0.0
            } else {
                self.curve.real_division_value(n, &self.q)?
            };
            let log_bn_nu = log_finite + log_nu;
            let log_beta_min = (beta_count.min as f64).ln();
            let log_beta_max = (beta_count.max as f64).ln();
            let gap_at = |lb: f64| (log_finite + lb - log_bn_nu).abs() / n as f64;
            rows.push(GrowthRow {
                n,
                per_finite: finite,
                finite_matches_bn: finite_matches,
                log_per_finite: log_finite,
                per_beta: beta_count,
                log_per_beta: 0.5 * (log_beta_min + log_beta_max),
                log_per_total: log_finite + 0.5 * (log_beta_min + log_beta_max),
                log_nu,
                log_bn_nu,
                gap: gap_at(log_beta_min).max(gap_at(log_beta_max)),
            });
        }
        Ok(GrowthTable { rows, truncated_at })
    }
}

/// Entropy of `T_Q` by component.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// `(p, log⁺|q|_p)` over the finite support.
    pub finite: Vec<(u64, f64)>,
    pub finite_sum: f64,
    /// `log b`, which the finite sum must equal.
    pub log_denominator: f64,
    /// `∏ p^{k_p} = b` exactly, i.e. the finite sum is `log b` before any
    /// rounding.
    pub finite_product_is_denominator: bool,
    /// Entropy of the β-transformation, `log β`.
    pub archimedean: f64,
    pub total: f64,
    pub twice_height: f64,
    pub discrepancy: f64,
}

/// One row of the periodic-growth experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: u32,
    /// `∏_p |Per_n(T_p)| = ∏_p p^{n k_p}`.
    pub per_finite: BigUint,
    /// `per_finite == b^n`.
    pub finite_matches_bn: bool,
    /// `n log b`.
    pub log_per_finite: f64,
    pub per_beta: BetaCount,
    /// Log of the β count (midpoint of the log range when inexact).
    pub log_per_beta: f64,
    pub log_per_total: f64,
    /// `log|ν_n(q)|` (0 for `n = 1`, where `ν_1 = 1`).
    pub log_nu: f64,
    /// `n log b + log|ν_n(q)|`.
    pub log_bn_nu: f64,
    /// `|log Per_n − log|b^n ν_n(q)|| / n`, worst case over the β count range.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    /// First `n` skipped because the β enumeration would exceed its budget.
    pub truncated_at: Option<u32>,
}
