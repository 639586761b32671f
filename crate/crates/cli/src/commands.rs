use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use elldyn::adelic::AdelicSystem;
use elldyn::arith::parse_rational;
use elldyn::beta::BetaSystem;
use elldyn::curve::{CurvePoint, WeierstrassCurve};
use elldyn::heights::{check_assumptions, find_admissible_multiple, global_height};
use elldyn::padic::QTransform;
use elldyn::poly::IntPoly;
use elldyn::sequences::{divisibility_check, eds_terms, realizability_check};
use elldyn::solenoid::{mahler_measure, solenoid_entropy, solenoid_periodic_count};

use crate::config::{Command, Options};
use crate::schema::*;
use crate::CliError;

/// Bound on the error of computed local heights; the archimedean series is
/// summed to about twelve digits.
pub const HEIGHT_ERROR_BOUND: f64 = 1e-10;
/// Periodic points are listed only up to this many.
pub const LIST_LIMIT: u64 = 4096;

const DEFAULT_ENTROPY_TOLERANCE: f64 = 1e-6;
const DEFAULT_GAP_TOLERANCE: f64 = 0.15;

fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Parse(format!("missing --{flag}")))
}

fn rational(s: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Parse(format!("{what}: {s:?} is not an integer or num/den")))
}

fn integer(s: &str, what: &str) -> Result<BigInt, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("{what}: {s:?} is not an integer")))
}

/// `num/den`, an integer, or a terminating decimal such as `1.618`.
fn rational_or_decimal(s: &str, what: &str) -> Result<BigRational, CliError> {
    if let Some((int, frac)) = s.trim().split_once('.') {
        if !frac.is_empty() && frac.bytes().all(|c| c.is_ascii_digit()) {
            let neg = int.starts_with('-');
            let whole = integer(if int.is_empty() || int == "-" { "0" } else { int }, what)?.abs();
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let v = BigRational::new(whole * &scale + integer(frac, what)?, scale);
            return Ok(if neg { -v } else { v });
        }
    }
    rational(s, what)
}

fn curve(o: &Options) -> Result<WeierstrassCurve, CliError> {
    let text = require(&o.curve, "curve")?;
    let coeffs = text
        .split(',')
        .map(|c| integer(c, "--curve"))
        .collect::<Result<Vec<_>, _>>()?;
    let [a1, a2, a3, a4, a6]: [BigInt; 5] = coeffs
        .try_into()
        .map_err(|_| CliError::Parse("--curve needs exactly five coefficients a1,a2,a3,a4,a6".into()))?;
    WeierstrassCurve::new(a1, a2, a3, a4, a6).map_err(|e| CliError::Parse(format!("--curve: {e}")))
}

fn curve_and_point(o: &Options) -> Result<(WeierstrassCurve, CurvePoint), CliError> {
    let e = curve(o)?;
    let text = require(&o.point, "point")?;
    let Some((x, y)) = text.split_once(',') else {
        return Err(CliError::Parse("--point must be x,y".into()));
    };
    let p = e
        .point(rational(x, "--point")?, rational(y, "--point")?)
        .map_err(|e| CliError::Parse(format!("--point: {e}")))?;
    Ok((e, p))
}

fn curve_out(e: &WeierstrassCurve) -> Vec<String> {
    e.coefficients().iter().map(|c| c.to_string()).collect()
}

fn point_out(p: &CurvePoint) -> PointOut {
    match (p.x(), p.y()) {
        (Some(x), Some(y)) => PointOut {
            x: x.to_string(),
            y: y.to_string(),
        },
        _ => PointOut {
            x: "O".into(),
            y: "O".into(),
        },
    }
}

fn envelope<T: Serialize>(cmd: Command, body: T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(Envelope {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().into(),
        body,
    })
    .map_err(|e| CliError::Io(e.to_string()))
}

pub fn run(cmd: Command, o: &Options) -> Result<serde_json::Value, CliError> {
    match cmd {
        Command::Height => height(o).and_then(|b| envelope(cmd, b)),
        Command::Entropy => entropy(o).and_then(|b| envelope(cmd, b)),
        Command::PadicPeriodic => padic(o).and_then(|b| envelope(cmd, b)),
        Command::BetaPeriodic => beta(o).and_then(|b| envelope(cmd, b)),
        Command::Mahler => mahler(o).and_then(|b| envelope(cmd, b)),
        Command::SolenoidPeriodic => solenoid(o).and_then(|b| envelope(cmd, b)),
        Command::Eds => eds(o).and_then(|b| envelope(cmd, b)),
        Command::ExperimentAsymptotic => experiment(o).and_then(|b| envelope(cmd, b)),
        Command::CheckPoint => check_point(o).and_then(|b| envelope(cmd, b)),
    }
}

fn height(o: &Options) -> Result<HeightOut, CliError> {
    let (e, p) = curve_and_point(o)?;
    let h = global_height(&e, &p)?;
    Ok(HeightOut {
        curve: curve_out(&e),
        point: point_out(&p),
        finite: h
            .finite
            .iter()
            .map(|(prime, v)| LocalOut {
                prime: prime.to_string(),
                value: *v,
            })
            .collect(),
        archimedean: h.archimedean,
        global: h.global,
        error_bound: HEIGHT_ERROR_BOUND,
    })
}

fn entropy(o: &Options) -> Result<EntropyOut, CliError> {
    let (e, p) = curve_and_point(o)?;
    let s = AdelicSystem::build(&e, &p)?;
    let r = s.entropy();
    let tolerance = o.tolerance.unwrap_or(DEFAULT_ENTROPY_TOLERANCE);
    Ok(EntropyOut {
        curve: curve_out(&e),
        point: point_out(&p),
        q: s.q().to_string(),
        finite: r
            .finite
            .iter()
            .map(|(prime, v)| LocalOut {
                prime: prime.to_string(),
                value: *v,
            })
            .collect(),
        finite_sum: r.finite_sum,
        log_denominator: r.log_denominator,
        finite_product_is_denominator: r.finite_product_is_denominator,
        archimedean: r.archimedean,
        total: r.total,
        twice_height: r.twice_height,
        discrepancy: r.discrepancy,
        tolerance,
        within_tolerance: r.discrepancy < tolerance,
    })
}

fn padic(o: &Options) -> Result<PadicOut, CliError> {
    let prime = *require(&o.prime, "prime")?;
    let q = rational(require(&o.q, "q")?, "--q")?;
    let n = o.n_max.unwrap_or(1);
    let t = QTransform::new(prime, q.clone())?;
    let k = t.expansion_exponent();
    let precision = o.precision.unwrap_or(2 * n * k + 1);
    let count = t.periodic_count(n)?;
    let summary = t.verify_periodic_points(n, precision)?;
    let points = if BigUint::from(summary.count) <= BigUint::from(LIST_LIMIT) {
        let pts = t.periodic_points(n, precision)?;
        Some(
            pts.iter()
                .map(|x| PadicPointOut {
                    residue: x.to_residue().to_string(),
                    digits: x.integer_digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "),
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(PadicOut {
        prime,
        q: q.to_string(),
        k,
        entropy: t.entropy(),
        n,
        precision,
        count: count.to_string(),
        enumerated: summary.count.to_string(),
        all_fixed: summary.all_fixed,
        pairwise_distinct: summary.pairwise_distinct,
        verified_digits: summary.verified_digits,
        points,
    })
}

fn beta(o: &Options) -> Result<BetaOut, CliError> {
    let text = require(&o.beta, "beta")?;
    let b = rational_or_decimal(text, "--beta")?;
    let system = match o.tolerance {
        None => BetaSystem::exact(b.clone())?,
        Some(r) => {
            let r = BigRational::from_float(r).ok_or_else(|| CliError::Parse("--tolerance is not finite".into()))?;
            BetaSystem::interval(&b - &r, &b + &r)?
        }
    };
    let n_max = o.n_max.unwrap_or(10);
    let mut rows = Vec::new();
    let mut truncated_at = None;
    for n in 1..=n_max {
        match system.periodic_count(n) {
            Ok(c) => rows.push(BetaRow {
                n,
                min: c.min.to_string(),
                max: c.max.to_string(),
                exact: c.is_exact(),
            }),
            Err(elldyn::Error::Budget(_)) => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(BetaOut {
        beta: b.to_string(),
        exact_beta: o.tolerance.is_none(),
        entropy: system.entropy(),
        rows,
        truncated_at,
    })
}

fn mahler(o: &Options) -> Result<MahlerOut, CliError> {
    let text = require(&o.poly, "poly")?;
    let mut coeffs = text
        .split(',')
        .map(|c| integer(c, "--poly"))
        .collect::<Result<Vec<_>, _>>()?;
    let shown = coeffs.iter().map(|c| c.to_string()).collect();
    coeffs.reverse();
    let m = mahler_measure(&IntPoly::new(coeffs))?;
    Ok(MahlerOut {
        poly: shown,
        root_path: m.root_path,
        integral_path: m.integral_path,
        samples: m.samples,
        integral_converged: m.integral_converged,
        error_bound: (m.root_path - m.integral_path).abs(),
    })
}

fn solenoid(o: &Options) -> Result<SolenoidOut, CliError> {
    let a = integer(require(&o.a, "a")?, "--a")?;
    let b = match &o.b {
        Some(b) => integer(b, "--b")?,
        None => BigInt::one(),
    };
    let n_max = o.n_max.unwrap_or(10);
    let rows = (1..=n_max)
        .map(|n| {
            solenoid_periodic_count(&a, &b, n).map(|c| CountRow {
                n,
                count: c.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SolenoidOut {
        a: a.to_string(),
        b: b.to_string(),
        entropy: solenoid_entropy(&a, &b),
        rows,
    })
}

fn eds(o: &Options) -> Result<EdsOut, CliError> {
    let (e, p) = curve_and_point(o)?;
    let n_max = o.n_max.unwrap_or(10);
    let s = eds_terms(&e, &p, n_max)?;
    let div = divisibility_check(&s.terms, n_max)?;
    let real = realizability_check(&s.terms);
    let rows = s
        .terms
        .iter()
        .zip(&real.orbit_counts)
        .enumerate()
        .map(|(i, (t, orbit))| EdsRow {
            n: i as u32 + 1,
            term: t.to_string(),
            orbit_count: orbit.to_string(),
        })
        .collect();
    Ok(EdsOut {
        curve: curve_out(&e),
        point: point_out(&p),
        rows,
        zero_terms: s.zero_terms.clone(),
        divisibility_pairs_checked: div.checked_pairs,
        divisibility_violations: div.violations.iter().map(|&(m, n)| [m, n]).collect(),
        realizable: real.realizable(),
        realizability_first_failure: real.first_failure,
    })
}

fn experiment(o: &Options) -> Result<ExperimentOut, CliError> {
    let (e, p) = curve_and_point(o)?;
    let s = AdelicSystem::build(&e, &p)?;
    let table = s.periodic_growth(o.n_max.unwrap_or(15))?;
    let tolerance = o.tolerance.unwrap_or(DEFAULT_GAP_TOLERANCE);
    let within = table.rows.last().is_some_and(|r| r.gap < tolerance);
    Ok(ExperimentOut {
        curve: curve_out(&e),
        point: point_out(&p),
        q: s.q().to_string(),
        support: s.support().iter().map(|p| p.to_string()).collect(),
        log_beta: s.log_beta(),
        rows: table
            .rows
            .iter()
            .map(|r| GrowthRowOut {
                n: r.n,
                per_finite: r.per_finite.to_string(),
                log_per_finite: r.log_per_finite,
                per_beta_min: r.per_beta.min.to_string(),
                per_beta_max: r.per_beta.max.to_string(),
                log_per_beta: r.log_per_beta,
                log_per_total: r.log_per_total,
                log_nu: r.log_nu,
                log_bn_nu: r.log_bn_nu,
                gap: r.gap,
            })
            .collect(),
        truncated_at: table.truncated_at,
        tolerance,
        within_tolerance: within,
    })
}

fn check_point(o: &Options) -> Result<CheckPointOut, CliError> {
    let (e, p) = curve_and_point(o)?;
    let report = check_assumptions(&e, &p)?;
    let bound = o.bound.unwrap_or(50);
    let (admissible, admissible_error) = match find_admissible_multiple(&e, &p, bound) {
        Ok(a) => (
            Some(AdmissibleOut {
                multiple: a.multiple,
                point: point_out(&a.point),
                archimedean_height: a.report.archimedean_height,
            }),
            None,
        ),
        Err(err) => (None, Some(err.to_string())),
    };
    Ok(CheckPointOut {
        curve: curve_out(&e),
        point: point_out(&p),
        passes: report.passes,
        bad_primes: report
            .bad_primes
            .iter()
            .map(|c| PrimeConditionOut {
                prime: c.prime.to_string(),
                valuation: c.valuation,
                passes: c.passes,
            })
            .collect(),
        archimedean_height: report.archimedean_height,
        archimedean_passes: report.archimedean_passes,
        failures: report.failures(),
        search_bound: bound,
        admissible,
        admissible_error,
    })
}
