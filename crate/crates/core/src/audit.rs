//! Audit statistics: hypothesis tests on a sample of challenge outcomes,
//! lower confidence bounds on `succ(P)`, and sample-size planning.
//!
//! Under `H0: succ(P) <= (omega-1)/gamma` the number of correct answers in
//! `t` uniformly drawn challenges is binomial (with replacement) or
//! hypergeometric (without replacement). `H0` is rejected, and the file
//! deemed retrievable, when the upper-tail p-value falls below `alpha`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::gamma::ln_gamma;

use crate::analysis::ThresholdReport;
use crate::error::{Error, Result};
use crate::schemes::SchemeKind;

/// Above this many challenges the hypergeometric tail switches from exact
/// big-integer sums to a log-gamma evaluation.
pub const DEFAULT_EXACT_CROSSOVER: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    WithReplacement,
    WithoutReplacement,
}

impl Sampling {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sampling::WithReplacement => "with_replacement",
            Sampling::WithoutReplacement => "without_replacement",
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "with_replacement" | "with" => Ok(Sampling::WithReplacement),
            "without_replacement" | "without" => Ok(Sampling::WithoutReplacement),
            _ => Err(Error::Parameter(format!("unknown sampling mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSample {
    pub t: u64,
    pub g: u64,
    pub sampling: Sampling,
    pub gamma: u128,
    pub omega: u128,
}

impl AuditSample {
    pub fn validate(&self) -> Result<()> {
        if self.g > self.t {
            return Err(Error::Parameter(format!("g={} exceeds t={}", self.g, self.t)));
        }
        if self.omega < 1 || self.omega > self.gamma {
            return Err(Error::Parameter(format!("omega={} must be in [1, gamma={}]", self.omega, self.gamma)));
        }
        if self.sampling == Sampling::WithoutReplacement && self.t as u128 > self.gamma {
            return Err(Error::Parameter(format!(
                "t={} exceeds gamma={} without replacement",
                self.t, self.gamma
            )));
        }
        Ok(())
    }

    /// `(omega - 1) / gamma`, the largest success rate allowed by `H0`.
    pub fn p0(&self) -> f64 {
        (self.omega - 1) as f64 / self.gamma as f64
    }
}

fn binom_big(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Hypergeometric upper tail `sum_{i>=g} C(omega-1, i) C(gamma-omega+1, t-i) / C(gamma, t)`.
pub fn pvalue_without_replacement(gamma: u128, omega: u128, t: u64, g: u64) -> Result<f64> {
    pvalue_without_replacement_with(gamma, omega, t, g, DEFAULT_EXACT_CROSSOVER)
}

/// As [`pvalue_without_replacement`] with an explicit exact/log crossover.
pub fn pvalue_without_replacement_with(gamma: u128, omega: u128, t: u64, g: u64, crossover: u64) -> Result<f64> {
    AuditSample {
        t,
        g,
        sampling: Sampling::WithoutReplacement,
        gamma,
        omega,
    }
    .validate()?;
    Ok(hyper_tail(gamma, omega - 1, t, g, crossover))
}

/// Upper tail of the number of good draws among `t` from `gamma` items of
/// which `good` are good.
fn hyper_tail(gamma: u128, good: u128, t: u64, g: u64, crossover: u64) -> f64 {
    if g == 0 {
        return 1.0;
    }
    let bad = gamma - good;
    // i ranges over feasible counts of correct answers
    let lo = (g as u128).max((t as u128).saturating_sub(bad));
    let hi = (t as u128).min(good);
    if lo > hi {
        return 0.0;
    }
    let (lo, hi) = (lo as u64, hi as u64);
    if t <= crossover {
        let good_b = BigUint::from(good);
        let bad_b = BigUint::from(bad);
        let mut a = binom_big(&good_b, lo);
        let mut b = binom_big(&bad_b, t - lo);
        let mut sum = BigUint::zero();
        for i in lo..=hi {
            sum += &a * &b;
            if i == hi {
                break;
            }
            // C(good, i+1) = C(good, i)(good-i)/(i+1)
            a = a * (&good_b - BigUint::from(i)) / BigUint::from(i + 1);
            // C(bad, t-i-1) = C(bad, t-i)(t-i)/(bad-t+i+1)
            b = b * BigUint::from(t - i) / (&bad_b - BigUint::from(t - i - 1));
        }
        let total = binom_big(&BigUint::from(gamma), t);
        let r = BigRational::new(BigInt::from(sum), BigInt::from(total));
        return r.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
    }
    let ln_c = |n: f64, k: f64| ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
    let (good_f, bad_f, gamma_f) = (good as f64, bad as f64, gamma as f64);
    let denom = ln_c(gamma_f, t as f64);
    let logs: Vec<f64> = (lo..=hi)
        .map(|i| ln_c(good_f, i as f64) + ln_c(bad_f, (t - i) as f64) - denom)
        .collect();
    log_sum_exp(&logs).exp().clamp(0.0, 1.0)
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    // Neumaier summation of the shifted terms
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &l in logs {
        let x = (l - max).exp();
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    max + (sum + comp).ln()
}

/// Binomial upper tail `P(X >= g)` for `X ~ Bin(t, p0)`.
pub fn pvalue_with_replacement(p0: f64, t: u64, g: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Parameter(format!("p0={p0} is not in [0, 1]")));
    }
    if g > t {
        return Err(Error::Parameter(format!("g={g} exceeds t={t}")));
    }
    if g == 0 {
        return Ok(1.0);
    }
    binomial_tail(p0, t, g)
}

fn binomial_tail(p: f64, t: u64, g: u64) -> Result<f64> {
    let dist = Binomial::new(p, t).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(dist.sf(g - 1).clamp(0.0, 1.0))
}

/// A lower confidence bound `theta_L`; `(theta_L, 1]` is the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceBound {
    pub theta_l: f64,
    pub confidence: f64,
    /// `g = 0`: the tail is identically one and no bound above zero exists.
    pub degenerate: bool,
}

/// `theta_L = sup { theta : P_theta(X >= g) < 1 - confidence }`, found by
/// bisection to `1e-10`.
pub fn lower_conf_bound(t: u64, g: u64, confidence: f64) -> Result<ConfidenceBound> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Parameter(format!("confidence={confidence} is not in (0, 1)")));
    }
    if t == 0 || g > t {
        return Err(Error::Parameter(format!("need 0 <= g <= t and t >= 1 (t={t}, g={g})")));
    }
    if g == 0 {
        return Ok(ConfidenceBound {
            theta_l: 0.0,
            confidence,
            degenerate: true,
        });
    }
    let alpha = 1.0 - confidence;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if binomial_tail(mid, t, g)? < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ConfidenceBound {
        theta_l: 0.5 * (lo + hi),
        confidence,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Enough evidence that `succ(P)` clears the extraction threshold.
    RejectH0,
    InsufficientEvidence,
}

impl Decision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::RejectH0 => "reject_H0",
            Decision::InsufficientEvidence => "insufficient_evidence",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Decision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject_H0" => Ok(Decision::RejectH0),
            "insufficient_evidence" => Ok(Decision::InsufficientEvidence),
            _ => Err(Error::Format(format!("unknown decision '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub sample: AuditSample,
    pub p_value: f64,
    pub alpha: f64,
    pub decision: Decision,
    pub theta_l: f64,
    pub confidence_level: f64,
    pub degenerate: bool,
    /// `(omega-1)/gamma < theta_L`, the confidence-interval form of the test.
    pub confidence_rule_rejects: bool,
    /// Advisory follow-up when the evidence is insufficient.
    pub advice: Option<String>,
}

impl AuditReport {
    /// Whether the p-value rule and the confidence-bound rule agree.
    pub fn rules_agree(&self) -> bool {
        self.confidence_rule_rejects == (self.decision == Decision::RejectH0)
    }

    /// Line-oriented `key=value` record.
    pub fn to_text(&self) -> String {
        let s = &self.sample;
        let mut out = format!(
            "t={}\ng={}\nsampling={}\np_value={:.10}\nalpha={}\ndecision={}\ntheta_L={:.8}\n",
            s.t, s.g, s.sampling, self.p_value, self.alpha, self.decision, self.theta_l
        );
        out.push_str(&format!(
            "gamma={}\nomega={}\nconfidence={}\nrules_agree={}\n",
            s.gamma,
            s.omega,
            self.confidence_level,
            self.rules_agree()
        ));
        if let Some(a) = &self.advice {
            out.push_str(&format!("advice={a}\n"));
        }
        out
    }
}

/// Evaluates a sample at significance `alpha`.
pub fn audit_decision(sample: &AuditSample, alpha: f64) -> Result<AuditReport> {
    sample.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha={alpha} is not in (0, 1)")));
    }
    let p0 = sample.p0();
    let p_value = match sample.sampling {
        Sampling::WithReplacement => pvalue_with_replacement(p0, sample.t, sample.g)?,
        Sampling::WithoutReplacement => pvalue_without_replacement(sample.gamma, sample.omega, sample.t, sample.g)?,
    };
    let decision = if p_value < alpha {
        Decision::RejectH0
    } else {
        Decision::InsufficientEvidence
    };
    let (theta_l, degenerate) = if sample.t == 0 {
        (0.0, true)
    } else {
        let b = lower_conf_bound(sample.t, sample.g, 1.0 - alpha)?;
        (b.theta_l, b.degenerate)
    };
    let advice = (decision == Decision::InsufficientEvidence).then(|| {
        let suggested = min_sample_all_correct(p0, alpha).map_or_else(|_| sample.t * 2, |m| m.max(sample.t * 2));
        format!("re-audit with a larger sample (t >= {suggested}) before acting against the prover")
    });
    Ok(AuditReport {
        sample: *sample,
        p_value,
        alpha,
        decision,
        theta_l,
        confidence_level: 1.0 - alpha,
        degenerate,
        confidence_rule_rejects: !degenerate && p0 < theta_l,
        advice,
    })
}

/// Smallest `t` with `p0^t < alpha`: the shortest all-correct transcript
/// that rejects `H0: succ <= p0`.
pub fn min_sample_all_correct(p0: f64, alpha: f64) -> Result<u64> {
    if !(p0 > 0.0 && p0 < 1.0 && alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("need p0, alpha in (0, 1) (p0={p0}, alpha={alpha})")));
    }
    let mut t = (alpha.ln() / p0.ln()).floor() as u64 + 1;
    // guard the floor against rounding at exact powers
    while t > 1 && p0.powi((t - 1) as i32) < alpha {
        t -= 1;
    }
    while p0.powi(t as i32) >= alpha {
        t += 1;
    }
    Ok(t)
}

/// `omega` derived from a threshold report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaDerivation {
    /// `floor(threshold * gamma) + 1`.
    pub from_threshold: u128,
    /// Basic scheme only: `n - floor(d/2) + 1`.
    pub from_basic_form: Option<u128>,
    /// The stricter (larger) of the two.
    pub omega: u128,
    pub gamma: u128,
}

impl OmegaDerivation {
    pub fn differs(&self) -> bool {
        self.from_basic_form.is_some_and(|b| b != self.from_threshold)
    }
}

pub fn omega_from_threshold(report: &ThresholdReport) -> Result<OmegaDerivation> {
    let gamma = report
        .gamma
        .to_u128()
        .ok_or_else(|| Error::Parameter("gamma does not fit in 128 bits".into()))?;
    let scaled = &report.threshold * BigRational::from_integer(report.gamma.clone());
    let from_threshold = scaled
        .floor()
        .to_integer()
        .to_u128()
        .ok_or_else(|| Error::Parameter("threshold out of range".into()))?
        + 1;
    let from_basic_form = (report.params.kind == SchemeKind::Basic)
        .then(|| (report.params.n - report.params.d / 2 + 1) as u128);
    let omega = from_threshold.max(from_basic_form.unwrap_or(0)).min(gamma);
    Ok(OmegaDerivation {
        from_threshold,
        from_basic_form,
        omega,
        gamma,
    })
}

/// One row of a sampling plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRow {
    pub t: u64,
    /// Smallest `g` that rejects `H0` at `alpha`, if any.
    pub critical_g: Option<u64>,
    /// Probability of rejecting `H0` when the true success rate is `succ_true`.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub p0: f64,
    pub succ_true: f64,
    pub alpha: f64,
    pub target_power: f64,
    pub sampling: Sampling,
    pub recommended_t: Option<u64>,
    pub all_correct_t: u64,
    pub rows: Vec<PlanRow>,
}

impl Plan {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "p0={}\nsucc_true={}\nalpha={}\ntarget_power={}\nsampling={}\nall_correct_t={}\nrecommended_t={}\n",
            self.p0,
            self.succ_true,
            self.alpha,
            self.target_power,
            self.sampling,
            self.all_correct_t,
            self.recommended_t.map_or("none".to_string(), |t| t.to_string())
        );
        out.push_str("t,critical_g,power\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.6}\n",
                r.t,
                r.critical_g.map_or("-".to_string(), |g| g.to_string()),
                r.power
            ));
        }
        out
    }
}

fn tail(sampling: Sampling, gamma: u128, good: u128, p: f64, t: u64, g: u64) -> Result<f64> {
    match sampling {
        Sampling::WithReplacement => pvalue_with_replacement(p, t, g),
        Sampling::WithoutReplacement => Ok(hyper_tail(gamma, good, t, g, DEFAULT_EXACT_CROSSOVER)),
    }
}

/// Smallest rejecting `g` for a sample of size `t`.
pub fn critical_g(sampling: Sampling, gamma: u128, omega: u128, t: u64, alpha: f64) -> Result<Option<u64>> {
    let p0 = (omega - 1) as f64 / gamma as f64;
    if tail(sampling, gamma, omega - 1, p0, t, t)? >= alpha {
        return Ok(None);
    }
    // the tail is non-increasing in g
    let (mut lo, mut hi) = (0u64, t);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail(sampling, gamma, omega - 1, p0, t, mid)? < alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Evaluates sample sizes `1..=t_max` and recommends the smallest reaching
/// `target_power` against a prover whose true success rate is `succ_true`.
pub fn plan(
    sampling: Sampling,
    gamma: u128,
    omega: u128,
    succ_true: f64,
    alpha: f64,
    target_power: f64,
    t_max: u64,
) -> Result<Plan> {
    if omega < 1 || omega > gamma {
        return Err(Error::Parameter(format!("omega={omega} must be in [1, gamma={gamma}]")));
    }
    if !(0.0..=1.0).contains(&succ_true) || !(target_power > 0.0 && target_power <= 1.0) {
        return Err(Error::Parameter("succ_true and target power must be probabilities".into()));
    }
    let p0 = (omega - 1) as f64 / gamma as f64;
    let t_max = match sampling {
        Sampling::WithoutReplacement => t_max.min(gamma.min(u64::MAX as u128) as u64),
        Sampling::WithReplacement => t_max,
    };
    let good_true = ((succ_true * gamma as f64).floor() as u128).min(gamma);
    let mut rows = Vec::new();
    let mut recommended = None;
    for t in 1..=t_max {
        let critical = critical_g(sampling, gamma, omega, t, alpha)?;
        let power = match critical {
            None => 0.0,
            Some(g) => tail(sampling, gamma, good_true, succ_true, t, g)?,
        };
        if recommended.is_none() && power >= target_power {
            recommended = Some(t);
        }
        rows.push(PlanRow {
            t,
            critical_g: critical,
            power,
        });
    }
    Ok(Plan {
        p0,
        succ_true,
        alpha,
        target_power,
        sampling,
        recommended_t: recommended,
        all_correct_t: if p0 > 0.0 { min_sample_all_correct(p0, alpha)? } else { 1 },
        rows,
    })
}

/// `(omega-1)/gamma, t, g, rejects at 5%, rejects at 1%)` as published.
pub const TABLE2_PUBLISHED: [(f64, u64, u64, bool, bool); 30] = [
    (0.8, 100, 100, true, true),
    (0.8, 100, 95, true, true),
    (0.8, 100, 90, false, false),
    (0.8, 100, 85, false, false),
    (0.8, 100, 80, false, false),
    (0.8, 200, 180, true, true),
    (0.8, 200, 175, true, true),
    (0.8, 200, 170, true, false),
    (0.8, 200, 165, false, false),
    (0.8, 200, 160, false, false),
    (0.8, 500, 435, true, true),
    (0.8, 500, 430, true, true),
    (0.8, 500, 425, true, true),
    (0.8, 500, 420, true, false),
    (0.8, 500, 415, false, false),
    (0.9, 100, 100, true, true),
    (0.9, 100, 95, false, false),
    (0.9, 100, 90, false, false),
    (0.9, 100, 85, false, false),
    (0.9, 100, 80, false, false),
    (0.9, 200, 200, true, true),
    (0.9, 200, 195, true, true),
    (0.9, 200, 190, true, true),
    (0.9, 200, 185, false, false),
    (0.9, 200, 180, false, false),
    (0.9, 500, 480, true, true),
    (0.9, 500, 475, true, true),
    (0.9, 500, 470, true, true),
    (0.9, 500, 465, true, false),
    (0.9, 500, 460, false, false),
];
