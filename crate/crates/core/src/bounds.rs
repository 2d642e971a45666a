//! Closed-form bounds on `inf E|eta - tau_l|` and the overshoot results they
//! rest on.
//!
//! Every evaluator is a pure function of its arguments and returns the literal
//! value of its formula, including trivially negative lower bounds. Each one
//! checks the hypotheses of its own bound and reports the failing inequality.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::{gaussian_tail, TimeMode, WalkParams};
use crate::{Error, Result};

pub const DISCRETE_UPPER: &str = "discrete upper bound";
pub const DISCRETE_LOWER: &str = "discrete lower bound";
pub const BROWNIAN_UPPER: &str = "brownian upper bound";
pub const BROWNIAN_LOWER: &str = "brownian lower bound";

/// Variance term inside `Q` of the lower bound.
///
/// The published bound divides by `sqrt(n (1 + eps))`; the variance of `Y_n`
/// given the joint Gaussian structure suggests `sqrt(n (1 + eps^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundVariant {
    #[default]
    Printed,
    Variance,
}

impl std::str::FromStr for LowerBoundVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(LowerBoundVariant::Printed),
            "variance" => Ok(LowerBoundVariant::Variance),
            other => Err(Error::Config(format!(
                "unknown lower bound variant `{other}` (expected `printed` or `variance`)"
            ))),
        }
    }
}

fn require(ok: bool, bound: &'static str, condition: &'static str, detail: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            bound,
            condition,
            detail,
        })
    }
}

fn require_positive(p: &WalkParams, bound: &'static str) -> Result<()> {
    require(p.eps > 0.0, bound, "eps > 0", format!("eps = {}", p.eps))?;
    require(p.s > 0.0, bound, "s > 0", format!("s = {}", p.s))?;
    require(p.l > 0.0, bound, "l > 0", format!("l = {}", p.l))
}

/// Leading asymptotic value `sqrt(2 l eps^2 / (pi s^3 (1 + eps^2)))`.
pub fn main_term(p: &WalkParams) -> f64 {
    let e2 = p.eps * p.eps;
    (2.0 * p.l * e2 / (PI * (1.0 + e2) * p.s.powi(3))).sqrt()
}

fn brownian_upper_terms(p: &WalkParams) -> f64 {
    let s = p.s;
    main_term(p) + 6.0 / s * (p.l / (2.0 * PI * s).powi(3)).powf(0.25)
}

/// Overshoot contribution separating the discrete upper bound from the
/// Brownian one: `sqrt(8 (s + 2) / (pi s^3)) + 10 + 20 / s`.
pub fn discrete_upper_excess(s: f64) -> f64 {
    (8.0 * (s + 2.0) / (PI * s.powi(3))).sqrt() + 10.0 + 20.0 / s
}

/// Upper bound achieved by the optimal tracking rule on the random walk.
pub fn upper_bound_discrete(p: &WalkParams) -> Result<f64> {
    require_positive(p, DISCRETE_UPPER)?;
    Ok(brownian_upper_terms(p) + discrete_upper_excess(p.s))
}

/// Upper bound achieved by the optimal tracking rule on Brownian motion.
pub fn upper_bound_brownian(p: &WalkParams) -> Result<f64> {
    require_positive(p, BROWNIAN_UPPER)?;
    Ok(brownian_upper_terms(p))
}

/// Largest admissible `n`: the largest integer strictly below `l / s`.
pub fn max_lower_n(p: &WalkParams) -> u64 {
    let ratio = p.l / p.s;
    if !(ratio.is_finite() && ratio > 1.0) {
        return 0;
    }
    (ratio.ceil() - 1.0) as u64
}

fn check_n(p: &WalkParams, n: u64, bound: &'static str) -> Result<()> {
    let n_max = max_lower_n(p);
    require(
        n >= 1 && n <= n_max && (n as f64) < p.l / p.s,
        bound,
        "1 <= n < l/s",
        format!("n = {n}, l/s = {}", p.l / p.s),
    )
}

fn brownian_lower_terms(p: &WalkParams, n: u64, variant: LowerBoundVariant) -> f64 {
    let (s, l) = (p.s, p.l);
    let e2 = p.eps * p.eps;
    let nf = n as f64;
    let spread = match variant {
        LowerBoundVariant::Printed => nf * (1.0 + p.eps),
        LowerBoundVariant::Variance => nf * (1.0 + e2),
    };
    let deficit = l - s * nf;
    // deficit > 0 and spread > 0 here, so the argument is finite.
    let q = gaussian_tail(deficit / spread.sqrt()).expect("finite Q argument");
    let estimation = (2.0 * nf * e2 / (PI * s * s * (1.0 + e2))).sqrt() * (1.0 - q);
    let residual = (2.0 / (PI * s.powi(3))).sqrt() * (deficit + (nf / (2.0 * PI)).sqrt()).sqrt();
    estimation - residual
}

/// Overshoot constant separating the two lower bounds: `2 + 4 / s`.
pub fn discrete_lower_excess(s: f64) -> f64 {
    2.0 + 4.0 / s
}

/// Lower bound for any estimator of `tau_l` on the random walk, at horizon `n`.
pub fn lower_bound_discrete(p: &WalkParams, n: u64, variant: LowerBoundVariant) -> Result<f64> {
    require_positive(p, DISCRETE_LOWER)?;
    require(
        p.l / p.s >= 2.0,
        DISCRETE_LOWER,
        "l/s >= 2",
        format!("l/s = {}", p.l / p.s),
    )?;
    check_n(p, n, DISCRETE_LOWER)?;
    Ok(brownian_lower_terms(p, n, variant) - discrete_lower_excess(p.s))
}

/// Lower bound for any estimator of `tau_l` on Brownian motion, at horizon `n`.
pub fn lower_bound_brownian(p: &WalkParams, n: u64, variant: LowerBoundVariant) -> Result<f64> {
    require_positive(p, BROWNIAN_LOWER)?;
    check_n(p, n, BROWNIAN_LOWER)?;
    Ok(brownian_lower_terms(p, n, variant))
}

/// Exhaustive scan of `n in 1..l/s` for the largest lower bound in `mode`.
/// Ties go to the smallest `n`.
pub fn best_n(p: &WalkParams, mode: TimeMode, variant: LowerBoundVariant) -> Result<(u64, f64)> {
    let eval = |n| match mode {
        TimeMode::Discrete => lower_bound_discrete(p, n, variant),
        TimeMode::Brownian => lower_bound_brownian(p, n, variant),
    };
    // Validates the hypotheses and seeds the scan.
    let mut best = (1, eval(1)?);
    let offset = match mode {
        TimeMode::Discrete => discrete_lower_excess(p.s),
        TimeMode::Brownian => 0.0,
    };
    for n in 2..=max_lower_n(p) {
        let v = brownian_lower_terms(p, n, variant) - offset;
        if v > best.1 {
            best = (n, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub q: f64,
    /// `s (l/s)^(q - 1/2)`; must diverge in the asymptotic regime.
    pub drift_term: f64,
    /// `(l/s)^(1 - q) eps^2 / (1 + eps^2)`; must diverge as well.
    pub noise_term: f64,
    /// `l/s >= 2`.
    pub ratio_ok: bool,
}

/// The two quantities whose divergence puts `(l, s, eps)` in the regime where
/// the upper and lower bounds meet, for an exponent `q` in (1/2, 1).
pub fn regime_check(p: &WalkParams, q: f64) -> Result<RegimeCheck> {
    if !(q > 0.5 && q < 1.0) {
        return Err(Error::domain("q", q, "must lie strictly between 1/2 and 1"));
    }
    if p.s <= 0.0 {
        return Err(Error::domain("s", p.s, "regime check needs a positive drift"));
    }
    let ratio = p.l / p.s;
    let e2 = p.eps * p.eps;
    Ok(RegimeCheck {
        q,
        drift_term: p.s * ratio.powf(q - 0.5),
        noise_term: ratio.powf(1.0 - q) * e2 / (1.0 + e2),
        ratio_ok: ratio >= 2.0,
    })
}

fn check_step(step_mean: f64, step_std: f64) -> Result<()> {
    if !(step_mean.is_finite() && step_mean >= 0.0) {
        return Err(Error::domain("step_mean", step_mean, "must be finite and non-negative"));
    }
    if !(step_std.is_finite() && step_std >= 0.0) {
        return Err(Error::domain("step_std", step_std, "must be finite and non-negative"));
    }
    if step_mean == 0.0 && step_std == 0.0 {
        return Err(Error::DegenerateStep);
    }
    Ok(())
}

/// `E|Z|^k` for `Z ~ N(mean, std^2)`, by double-exponential quadrature.
pub fn folded_gaussian_moment(mean: f64, std: f64, k: f64) -> f64 {
    if std == 0.0 {
        return mean.abs().powf(k);
    }
    let integrand = |x: f64| {
        let z = mean + std * x;
        z.abs().powf(k) * (-0.5 * x * x).exp()
    };
    // Tanh-sinh clusters nodes at the ends of each piece, so break at the
    // peak, its shoulders and the kink.
    let reach = 40.0;
    let kink = -mean / std;
    let mut knots = vec![-reach, -8.0, 0.0, 8.0, reach];
    if kink > -reach && kink < reach {
        knots.push(kink);
    }
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup();
    let total: f64 = knots
        .windows(2)
        .map(|w| quadrature::integrate(integrand, w[0], w[1], 1e-14 * (1.0 + mean.abs().powf(k))).integral)
        .sum();
    total / (2.0 * PI).sqrt()
}

fn moment_bound_factor(p: f64) -> f64 {
    2.0 * (p + 2.0) / (p + 1.0)
}

/// Level-uniform bound on `E R^p` for the overshoot `R` of a walk with
/// `N(step_mean, step_std^2)` steps: `2(p+2)/(p+1) E|Z|^(p+2) / E Z^2`.
/// Exact Gaussian moments at `p = 2`, quadrature otherwise.
pub fn overshoot_moment_bound(step_mean: f64, step_std: f64, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::domain("p", p, "moment order must be positive"));
    }
    check_step(step_mean, step_std)?;
    let (s2, v) = (step_mean * step_mean, step_std * step_std);
    if p == 2.0 {
        return Ok(8.0 / 3.0 * (s2 + 5.0 * v - 2.0 * v * v / (s2 + v)));
    }
    Ok(overshoot_moment_bound_quadrature(step_mean, step_std, p))
}

/// The moment bound with `E|Z|^(p+2)` always taken by quadrature.
pub fn overshoot_moment_bound_quadrature(step_mean: f64, step_std: f64, p: f64) -> f64 {
    let second = step_mean * step_mean + step_std * step_std;
    moment_bound_factor(p) * folded_gaussian_moment(step_mean, step_std, p + 2.0) / second
}

/// Level-uniform bound on the mean overshoot, `2 s + 4 sigma`.
pub fn overshoot_mean_bound(step_mean: f64, step_std: f64) -> Result<f64> {
    check_step(step_mean, step_std)?;
    Ok(2.0 * step_mean + 4.0 * step_std)
}

/// Bracket on the mean passage time `E mu_l` from Wald's identity:
/// `(l / s, (l + 2 s + 4 sigma) / s)`.
pub fn wald_bracket(step_mean: f64, step_std: f64, level: f64) -> Result<(f64, f64)> {
    check_step(step_mean, step_std)?;
    if step_mean <= 0.0 {
        return Err(Error::domain(
            "step_mean",
            step_mean,
            "Wald bracket needs a positive drift",
        ));
    }
    if !(level.is_finite() && level >= 0.0) {
        return Err(Error::domain("level", level, "must be finite and non-negative"));
    }
    let s = step_mean;
    Ok((level / s, (level + 2.0 * s + 4.0 * step_std) / s))
}

/// Bounds on the spread of `s tau_l` around `l` for a unit-variance walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpreadBounds {
    /// Bound on `E (s tau - l)_+`: `sqrt(l / (2 pi s)) + s + 2`.
    pub pos_dev: f64,
    /// Bound on `E |s tau - l|`: `sqrt(2 l / (pi s)) + 2 s + 4`.
    pub abs_dev: f64,
    /// Bound on `E (X_tau - s tau)_+`: `sqrt(l / (2 pi s)) + 3 s + 6`.
    pub endpoint_excess: f64,
}

pub fn crossing_spread_bounds(s: f64, l: f64) -> Result<CrossingSpreadBounds> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s", s, "must be positive"));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::domain("l", l, "must be positive"));
    }
    let half = (l / (2.0 * PI * s)).sqrt();
    Ok(CrossingSpreadBounds {
        pos_dev: half + s + 2.0,
        abs_dev: (2.0 * l / (PI * s)).sqrt() + 2.0 * s + 4.0,
        endpoint_excess: half + 3.0 * s + 6.0,
    })
}

/// `E|eta^(0) - tau_l|` bound for the blind rule `c = 0`:
/// `sqrt(2 l / (pi s^3)) + 2 + 4 / s`.
pub fn estimate_c0(s: f64, l: f64) -> Result<f64> {
    crossing_spread_bounds(s, l)?;
    Ok((2.0 * l / (PI * s.powi(3))).sqrt() + 2.0 + 4.0 / s)
}

/// `E|eta^(1) - tau_l|` bound for the raw-observation rule `c = 1`:
/// `2 eps sqrt(l + 2s + 4) / sqrt(2 pi s^3) + 4 (s + 1 + sqrt(1 + eps^2)) / s`.
pub fn estimate_c1(s: f64, eps: f64, l: f64) -> Result<f64> {
    crossing_spread_bounds(s, l)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::domain("eps", eps, "must be finite and non-negative"));
    }
    Ok(2.0 * eps * (l + 2.0 * s + 4.0).sqrt() / (2.0 * PI * s.powi(3)).sqrt()
        + 4.0 * (s + 1.0 + (1.0 + eps * eps).sqrt()) / s)
}

/// Lower limit on `E(eta^(c) - tau_l)` for a unit-variance walk: `-(2s + 4)/s`.
pub fn signed_dev_floor(s: f64) -> f64 {
    -(2.0 * s + 4.0) / s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub upper: bool,
    pub lower: bool,
}

/// Every bound that applies to `params`, evaluated for its time mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mode: TimeMode,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub lower_best_n: Option<u64>,
    pub main_term: Option<f64>,
    pub lower_bound_variant: LowerBoundVariant,
    pub hypotheses_ok: Hypotheses,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeCheck>,
}

impl BoundReport {
    /// Bracket `[lower, upper]` when both sides are available.
    pub fn bracket(&self) -> Option<(f64, f64)> {
        Some((self.lower?, self.upper?))
    }
}

/// Evaluate every applicable bound; failing hypotheses leave fields empty.
pub fn bound_report(p: &WalkParams, variant: LowerBoundVariant) -> BoundReport {
    let upper = match p.mode {
        TimeMode::Discrete => upper_bound_discrete(p),
        TimeMode::Brownian => upper_bound_brownian(p),
    }
    .ok();
    let lower = best_n(p, p.mode, variant).ok();
    BoundReport {
        mode: p.mode,
        upper,
        lower: lower.map(|(_, v)| v),
        lower_best_n: lower.map(|(n, _)| n),
        main_term: upper.map(|_| main_term(p)),
        lower_bound_variant: variant,
        hypotheses_ok: Hypotheses {
            upper: upper.is_some(),
            lower: lower.is_some(),
        },
        regime: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn d(l: f64, s: f64, eps: f64) -> WalkParams {
        WalkParams::discrete(s, eps, l).unwrap()
    }

    // Expected values below were computed term by term at 30 significant
    // digits (mpmath) from the printed formulas.

    #[test]
    fn upper_bound_values() {
        assert_relative_eq!(
            upper_bound_discrete(&d(100.0, 1.0, 1.0)).unwrap(),
            43.186_822_670_197_4,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            upper_bound_discrete(&d(1e4, 1.0, 1.0)).unwrap(),
            104.301_677_682_849_16,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            upper_bound_brownian(&d(100.0, 1.0, 1.0)).unwrap(),
            10.422_869_474_426_72,
            epsilon = 1e-10
        );
    }

    #[test]
    fn upper_bound_small_noise_limit() {
        let tiny = upper_bound_discrete(&d(100.0, 1.0, 1e-12)).unwrap();
        let rest = 6.0 * (100.0 / (2.0 * PI).powi(3)).powf(0.25) + discrete_upper_excess(1.0);
        assert_relative_eq!(tiny, rest, epsilon = 1e-9);
        let b = upper_bound_brownian(&d(100.0, 1.0, 1e-12)).unwrap();
        assert_relative_eq!(b, 6.0 * (100.0 / (2.0 * PI).powi(3)).powf(0.25), epsilon = 1e-9);
    }

    #[test]
    fn upper_bound_rejects_degenerate_inputs() {
        for p in [d(100.0, 1.0, 0.0), d(0.0, 1.0, 1.0), d(100.0, 0.0, 1.0)] {
            assert!(matches!(upper_bound_discrete(&p), Err(Error::Hypothesis { .. })));
        }
    }

    #[test]
    fn lower_bound_values() {
        let v = lower_bound_discrete(&d(100.0, 1.0, 1.0), 90, LowerBoundVariant::Printed).unwrap();
        assert_relative_eq!(v, -4.830_485_772_041_228, epsilon = 1e-10);
        let v = lower_bound_discrete(&d(1e4, 1.0, 1.0), 9000, LowerBoundVariant::Printed).unwrap();
        assert_relative_eq!(v, 21.819_367_566_859_15, epsilon = 1e-9);
        let b = lower_bound_brownian(&d(1e4, 1.0, 1.0), 9000, LowerBoundVariant::Printed).unwrap();
        assert_relative_eq!(b, 27.819_367_566_859_15, epsilon = 1e-9);
    }

    #[test]
    fn lower_bound_domain() {
        let p = d(100.0, 1.0, 1.0);
        assert!(lower_bound_discrete(&p, 0, LowerBoundVariant::Printed).is_err());
        assert!(lower_bound_discrete(&p, 100, LowerBoundVariant::Printed).is_err());
        assert!(lower_bound_discrete(&p, 99, LowerBoundVariant::Printed).is_ok());
        let err = lower_bound_discrete(&d(1.0, 1.0, 1.0), 1, LowerBoundVariant::Printed).unwrap_err();
        assert!(err.to_string().contains("l/s >= 2"), "{err}");
        // The Brownian bound has no l/s >= 2 hypothesis.
        assert!(lower_bound_brownian(&d(1.5, 1.0, 1.0), 1, LowerBoundVariant::Printed).is_ok());
        assert!(lower_bound_brownian(&d(1.0, 1.0, 1.0), 1, LowerBoundVariant::Printed).is_err());
    }

    #[test]
    fn first_factor_meets_main_term_at_full_horizon() {
        // sqrt(2 n eps^2 / (pi s^2 (1+eps^2))) at n = l/s equals the main term.
        let p = d(400.0, 2.0, 0.7);
        let n = p.l / p.s;
        let e2 = p.eps * p.eps;
        let first = (2.0 * n * e2 / (PI * p.s * p.s * (1.0 + e2))).sqrt();
        assert_relative_eq!(first, main_term(&p), epsilon = 1e-12);
    }

    #[test]
    fn variants_differ_only_inside_q() {
        let p = d(1e4, 1.0, 3.0);
        let a = lower_bound_discrete(&p, 9990, LowerBoundVariant::Printed).unwrap();
        let b = lower_bound_discrete(&p, 9990, LowerBoundVariant::Variance).unwrap();
        assert!(a != b);
        // eps = 1 makes the two spreads identical.
        let p = d(1e4, 1.0, 1.0);
        assert_eq!(
            lower_bound_discrete(&p, 9990, LowerBoundVariant::Printed).unwrap(),
            lower_bound_discrete(&p, 9990, LowerBoundVariant::Variance).unwrap()
        );
    }

    #[test]
    fn best_n_is_maximal_and_reproducible() {
        let p = d(1e4, 1.0, 1.0);
        let (n, v) = best_n(&p, TimeMode::Discrete, LowerBoundVariant::Printed).unwrap();
        // Scan frozen from the 30-digit oracle: n = 9732, value 34.1463821602...
        assert_eq!(n, 9732);
        assert_relative_eq!(v, 34.146_382_160_221_854, epsilon = 1e-9);
        assert!(v >= 21.82);
        for m in [1, 9999] {
            assert!(v >= lower_bound_discrete(&p, m, LowerBoundVariant::Printed).unwrap());
        }
        assert_eq!(
            best_n(&p, TimeMode::Discrete, LowerBoundVariant::Printed).unwrap(),
            (n, v)
        );
        let (nb, vb) = best_n(&p, TimeMode::Brownian, LowerBoundVariant::Printed).unwrap();
        assert_eq!(nb, n);
        assert_relative_eq!(vb - v, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn main_term_values() {
        assert_relative_eq!(main_term(&d(2000.0, 1.0, 1.0)), 25.231_325_220_201_6, epsilon = 1e-10);
        let big = main_term(&d(2000.0, 1.0, 1e8));
        assert_relative_eq!(big, (2.0 * 2000.0 / PI).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn regime_values() {
        let r = regime_check(&d(1e4, 1.0, 1.0), 0.75).unwrap();
        assert_relative_eq!(r.drift_term, 10.0, epsilon = 1e-12);
        // (l/s)^(1-q) = 10, times eps^2/(1+eps^2) = 1/2.
        assert_relative_eq!(r.noise_term, 5.0, epsilon = 1e-12);
        assert!(r.ratio_ok);
        let r = regime_check(&d(1e4, 3.0, 1.0), 0.5 + 1e-12).unwrap();
        assert_relative_eq!(r.drift_term, 3.0, epsilon = 1e-9);
        assert!(!regime_check(&d(1.5, 1.0, 1.0), 0.75).unwrap().ratio_ok);
        assert!(regime_check(&d(1e4, 1.0, 1.0), 0.5).is_err());
        assert!(regime_check(&d(1e4, 1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn overshoot_bounds() {
        assert_relative_eq!(
            overshoot_moment_bound(1.0, 1.0, 2.0).unwrap(),
            40.0 / 3.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            overshoot_moment_bound(1.0, 0.0, 2.0).unwrap(),
            8.0 / 3.0,
            epsilon = 1e-14
        );
        assert!(overshoot_moment_bound(1.0, 1.0, 0.0).is_err());
        assert!(matches!(
            overshoot_moment_bound(0.0, 0.0, 2.0),
            Err(Error::DegenerateStep)
        ));
        assert_eq!(overshoot_mean_bound(1.0, 1.0).unwrap(), 6.0);
        assert_eq!(overshoot_mean_bound(0.0, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn quadrature_moments_match_gaussian_closed_forms() {
        // E|Z|^4 = s^4 + 6 s^2 v + 3 v^2, E|Z|^2 = s^2 + v
        for &(s, sd) in &[(1.0f64, 1.0f64), (0.0, 2.0), (3.0, 0.5), (0.2, 1.7)] {
            let v: f64 = sd * sd;
            let m4 = s.powi(4) + 6.0 * s * s * v + 3.0 * v * v;
            assert_relative_eq!(folded_gaussian_moment(s, sd, 4.0), m4, max_relative = 1e-11);
            assert_relative_eq!(folded_gaussian_moment(s, sd, 2.0), s * s + v, max_relative = 1e-11);
        }
        // Centered absolute moment E|Z|^3 = 2 sqrt(2/pi) sd^3.
        assert_relative_eq!(
            folded_gaussian_moment(0.0, 1.5, 3.0),
            2.0 * (2.0 / PI).sqrt() * 1.5f64.powi(3),
            max_relative = 1e-11
        );
    }

    #[test]
    fn wald_bracket_values() {
        assert_eq!(wald_bracket(1.0, 1.0, 100.0).unwrap(), (100.0, 106.0));
        assert_eq!(wald_bracket(1.0, 0.0, 3.0).unwrap(), (3.0, 5.0));
        assert!(wald_bracket(0.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn crossing_spread_values() {
        let b = crossing_spread_bounds(1.0, 100.0).unwrap();
        assert_relative_eq!(b.pos_dev, 6.989_422_804_014_327, epsilon = 1e-12);
        assert_relative_eq!(b.abs_dev, 13.978_845_608_028_653, epsilon = 1e-12);
        assert_relative_eq!(b.endpoint_excess, 12.989_422_804_014_326, epsilon = 1e-12);
        assert!(crossing_spread_bounds(0.0, 1.0).is_err());
    }

    #[test]
    fn special_coefficient_estimates() {
        assert_relative_eq!(
            estimate_c0(1.0, 100.0).unwrap(),
            (200.0 / PI).sqrt() + 6.0,
            epsilon = 1e-12
        );
        // c = 1, eps = 0: 4 (s + 2) / s.
        assert_relative_eq!(estimate_c1(1.0, 0.0, 100.0).unwrap(), 12.0, epsilon = 1e-12);
        assert_eq!(signed_dev_floor(1.0), -6.0);
    }

    #[test]
    fn report_flags() {
        let r = bound_report(&d(1e4, 1.0, 1.0), LowerBoundVariant::Printed);
        assert!(r.hypotheses_ok.upper && r.hypotheses_ok.lower);
        assert_eq!(r.lower_best_n, Some(9732));
        let r = bound_report(&d(1e4, 1.0, 0.0), LowerBoundVariant::Printed);
        assert!(!r.hypotheses_ok.upper && !r.hypotheses_ok.lower);
        assert!(r.bracket().is_none());
        let r = bound_report(&d(1.5, 1.0, 1.0), LowerBoundVariant::Printed);
        assert!(r.hypotheses_ok.upper && !r.hypotheses_ok.lower);
    }

    proptest! {
        #[test]
        fn lower_never_exceeds_upper(l in 2.0f64..5e4, s in 0.05f64..5.0, eps in 0.01f64..10.0) {
            let p = d(l * s, s, eps);
            let (_, lo) = best_n(&p, TimeMode::Discrete, LowerBoundVariant::Printed).unwrap();
            prop_assert!(lo <= upper_bound_discrete(&p).unwrap());
            let (_, lob) = best_n(&p, TimeMode::Brownian, LowerBoundVariant::Printed).unwrap();
            prop_assert!(lob <= upper_bound_brownian(&p).unwrap());
        }

        #[test]
        fn mode_offsets(l in 2.0f64..1e5, s in 0.05f64..5.0, eps in 0.01f64..10.0, frac in 0.0f64..1.0) {
            let p = d(l * s, s, eps);
            let up = upper_bound_discrete(&p).unwrap() - upper_bound_brownian(&p).unwrap();
            prop_assert!((up - discrete_upper_excess(s)).abs() <= 1e-9 * up.abs().max(1.0));
            let n = 1 + ((max_lower_n(&p) - 1) as f64 * frac) as u64;
            let lo = lower_bound_brownian(&p, n, LowerBoundVariant::Printed).unwrap()
                - lower_bound_discrete(&p, n, LowerBoundVariant::Printed).unwrap();
            prop_assert!((lo - (2.0 + 4.0 / s)).abs() <= 1e-9 * lo.abs().max(1.0));
            prop_assert!(main_term(&p) <= upper_bound_brownian(&p).unwrap());
        }

        #[test]
        fn mean_bound_dominates_root_of_second_moment(s in 0.0f64..20.0, sd in 0.0f64..20.0) {
            prop_assume!(s > 0.0 || sd > 0.0);
            let root = overshoot_moment_bound(s, sd, 2.0).unwrap().sqrt();
            prop_assert!(overshoot_mean_bound(s, sd).unwrap() >= root - 1e-12);
        }

        #[test]
        fn moment_quadrature_matches_closed_form(s in 0.0f64..5.0, sd in 0.05f64..5.0) {
            let exact = overshoot_moment_bound(s, sd, 2.0).unwrap();
            let quad = overshoot_moment_bound_quadrature(s, sd, 2.0);
            prop_assert!(((quad - exact) / exact).abs() <= 1e-9);
        }

        #[test]
        fn evaluators_are_pure(l in 2.0f64..1e4, eps in 0.01f64..5.0) {
            let p = d(l, 1.0, eps);
            prop_assert_eq!(upper_bound_discrete(&p).unwrap().to_bits(), upper_bound_discrete(&p).unwrap().to_bits());
            prop_assert_eq!(main_term(&p).to_bits(), main_term(&p).to_bits());
        }
    }
}
