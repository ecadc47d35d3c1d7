//! Power-law application profiles `t = a · P^b`.
//!
//! A profile maps a total processor count to an execution time on one
//! environment. Profiles are fitted from timing observations with a
//! Levenberg-Marquardt refinement of the log-log regression line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Unit a profile's scale coefficient (and an observation's elapsed time) is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Seconds,
    Minutes,
    Hours,
}

impl TimeUnit {
    pub fn seconds(self) -> f64 {
        match self {
            TimeUnit::Seconds => 1.0,
            TimeUnit::Minutes => 60.0,
            TimeUnit::Hours => 3600.0,
        }
    }

    /// Factor that converts a value in `self` into `to`.
    pub fn factor_to<T: Scalar>(self, to: TimeUnit) -> T {
        if self == to {
            T::one()
        } else {
            T::lit(self.seconds()) / T::lit(to.seconds())
        }
    }

    pub fn convert<T: Scalar>(self, value: T, to: TimeUnit) -> T {
        value * self.factor_to::<T>(to)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::Seconds => "seconds",
            TimeUnit::Minutes => "minutes",
            TimeUnit::Hours => "hours",
        }
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TimeUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "sec" | "secs" | "second" | "seconds" => Ok(TimeUnit::Seconds),
            "m" | "min" | "mins" | "minute" | "minutes" => Ok(TimeUnit::Minutes),
            "h" | "hr" | "hrs" | "hour" | "hours" => Ok(TimeUnit::Hours),
            other => Err(format!("unknown time unit `{other}` (expected seconds, minutes or hours)")),
        }
    }
}

/// Fitted power-law profile `t = a · P^b` for one environment.
///
/// `a > 0` is the single-processor time in `time_unit`; `b < 0` makes the
/// execution time strictly decreasing in `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplicationProfile<T> {
    a: T,
    b: T,
    time_unit: TimeUnit,
    observed: Option<(u32, u32)>,
}

impl<T: Scalar> ApplicationProfile<T> {
    pub fn new(a: T, b: T, time_unit: TimeUnit) -> Result<Self> {
        if !(a.is_finite() && a > T::zero()) {
            return Err(Error::InvalidProfile(format!("scale a = {a} must be positive and finite")));
        }
        if !(b.is_finite() && b < T::zero()) {
            return Err(Error::InvalidProfile(format!(
                "exponent b = {b} must be negative: execution time has to fall as processors grow"
            )));
        }
        Ok(ApplicationProfile { a, b, time_unit, observed: None })
    }

    /// Records the processor range the profile was fitted on. Evaluations
    /// outside it are flagged as extrapolated.
    pub fn with_observed_range(mut self, min: u32, max: u32) -> Result<Self> {
        if min == 0 || min > max {
            return Err(Error::InvalidProfile(format!("observed range {min}..={max} is invalid")));
        }
        self.observed = Some((min, max));
        Ok(self)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn time_unit(&self) -> TimeUnit {
        self.time_unit
    }

    pub fn observed_range(&self) -> Option<(u32, u32)> {
        self.observed
    }

    /// The same profile with `a` expressed in `unit`; `b` is unit-free.
    pub fn in_unit(&self, unit: TimeUnit) -> Self {
        ApplicationProfile { a: self.time_unit.convert(self.a, unit), time_unit: unit, ..*self }
    }

    /// Execution time on `processors` processors, in the profile's unit.
    pub fn eval_time(&self, processors: u32) -> Result<T> {
        if processors == 0 {
            return Err(Error::ZeroProcessors);
        }
        Ok(self.a * T::from_count(processors).powf(self.b))
    }

    pub fn eval_time_in(&self, processors: u32, unit: TimeUnit) -> Result<T> {
        Ok(self.time_unit.convert(self.eval_time(processors)?, unit))
    }

    /// Fractional processor count that runs in exactly `time_budget`
    /// (profile unit). Not rounded.
    pub fn required_processors(&self, time_budget: T) -> Result<T> {
        if !(time_budget.is_finite() && time_budget > T::zero()) {
            return Err(Error::non_positive("time budget", time_budget.as_f64()));
        }
        Ok((time_budget / self.a).powf(self.b.recip()))
    }

    /// Whether `processors` lies outside the range the profile was fitted on.
    pub fn is_extrapolated(&self, processors: u32) -> bool {
        match self.observed {
            Some((lo, hi)) => processors < lo || processors > hi,
            None => false,
        }
    }
}

/// One measured run: total processors and elapsed wall time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingObservation<T> {
    pub processors: u32,
    pub elapsed: T,
    pub unit: TimeUnit,
}

impl<T: Scalar> TimingObservation<T> {
    pub fn new(processors: u32, elapsed: T, unit: TimeUnit) -> Result<Self> {
        if processors == 0 {
            return Err(Error::ZeroProcessors);
        }
        if !(elapsed.is_finite() && elapsed > T::zero()) {
            return Err(Error::non_positive("elapsed time", elapsed.as_f64()));
        }
        Ok(TimingObservation { processors, elapsed, unit })
    }

    pub fn elapsed_in(&self, unit: TimeUnit) -> T {
        self.unit.convert(self.elapsed, unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    /// Least squares on the elapsed times, refined from the log-log line.
    LevenbergMarquardt,
    /// Ordinary least squares on `ln t = ln a + b ln P`.
    LogLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport<T> {
    pub profile: ApplicationProfile<T>,
    /// Root-mean-square residual of predicted vs. observed time, in the profile unit.
    pub rms_residual: T,
    pub method: FitMethod,
    pub iterations: usize,
}

/// Fits a profile to `observations`, expressed in the unit of the first observation.
pub fn fit_profile<T: Scalar>(observations: &[TimingObservation<T>]) -> Result<FitReport<T>> {
    let unit = observations.first().map(|o| o.unit).ok_or(Error::TooFewObservations(0))?;
    fit_profile_in(observations, unit)
}

/// Fits a profile to `observations` after converting every elapsed time to `unit`.
pub fn fit_profile_in<T: Scalar>(
    observations: &[TimingObservation<T>],
    unit: TimeUnit,
) -> Result<FitReport<T>> {
    let points = prepare(observations, unit)?;
    let (a0, b0) = log_log_line(&points);
    let start_sse = sse(&points, a0, b0);

    let (a, b, iterations, method) = match levenberg_marquardt(&points, a0, b0) {
        Some((a, b, iters)) if a > T::zero() && b.is_finite() && sse(&points, a, b) <= start_sse => {
            (a, b, iters, FitMethod::LevenbergMarquardt)
        }
        _ => (a0, b0, 0, FitMethod::LogLog),
    };
    finish(&points, observations, unit, a, b, iterations, method)
}

/// Closed-form log-log regression only; the initializer of [`fit_profile_in`].
pub fn fit_log_log<T: Scalar>(
    observations: &[TimingObservation<T>],
    unit: TimeUnit,
) -> Result<FitReport<T>> {
    let points = prepare(observations, unit)?;
    let (a, b) = log_log_line(&points);
    finish(&points, observations, unit, a, b, 0, FitMethod::LogLog)
}

fn prepare<T: Scalar>(observations: &[TimingObservation<T>], unit: TimeUnit) -> Result<Vec<(T, T)>> {
    if observations.len() < 2 {
        return Err(Error::TooFewObservations(observations.len()));
    }
    let mut points = Vec::with_capacity(observations.len());
    for o in observations {
        let checked = TimingObservation::new(o.processors, o.elapsed, o.unit)?;
        points.push((T::from_count(checked.processors), checked.elapsed_in(unit)));
    }
    let first = observations[0].processors;
    if observations.iter().all(|o| o.processors == first) {
        return Err(Error::DegenerateObservations(first));
    }
    Ok(points)
}

fn finish<T: Scalar>(
    points: &[(T, T)],
    observations: &[TimingObservation<T>],
    unit: TimeUnit,
    a: T,
    b: T,
    iterations: usize,
    method: FitMethod,
) -> Result<FitReport<T>> {
    if !b.is_finite() || b >= T::zero() {
        return Err(Error::NonScalingFit(b.as_f64()));
    }
    let lo = observations.iter().map(|o| o.processors).min().unwrap_or(1);
    let hi = observations.iter().map(|o| o.processors).max().unwrap_or(1);
    let profile = ApplicationProfile::new(a, b, unit)?.with_observed_range(lo, hi)?;
    let n = T::from_usize(points.len()).unwrap_or_else(T::one);
    let rms_residual = (sse(points, a, b) / n).sqrt();
    Ok(FitReport { profile, rms_residual, method, iterations })
}

fn log_log_line<T: Scalar>(points: &[(T, T)]) -> (T, T) {
    let n = T::from_usize(points.len()).unwrap_or_else(T::one);
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(sx, sy), &(p, t)| (sx + p.ln(), sy + t.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.iter().fold((T::zero(), T::zero()), |(sxx, sxy), &(p, t)| {
        let dx = p.ln() - mx;
        (sxx + dx * dx, sxy + dx * (t.ln() - my))
    });
    let b = sxy / sxx;
    ((my - b * mx).exp(), b)
}

fn sse<T: Scalar>(points: &[(T, T)], a: T, b: T) -> T {
    points.iter().fold(T::zero(), |acc, &(p, t)| {
        let r = t - a * p.powf(b);
        acc + r * r
    })
}

const MAX_ITERATIONS: usize = 500;

/// Damped Gauss-Newton on the untransformed residuals `t - a P^b`.
fn levenberg_marquardt<T: Scalar>(points: &[(T, T)], a0: T, b0: T) -> Option<(T, T, usize)> {
    let (mut a, mut b) = (a0, b0);
    let mut cost = sse(points, a, b);
    let mut lambda = T::lit(1e-3);
    let tiny = T::epsilon() * T::lit(4.0);

    for iter in 1..=MAX_ITERATIONS {
        // Normal equations JᵀJ δ = Jᵀr with Marquardt's diagonal scaling.
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) =
            (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
        for &(p, t) in points {
            let pb = p.powf(b);
            let da = pb;
            let db = a * pb * p.ln();
            let r = t - a * pb;
            jaa = jaa + da * da;
            jab = jab + da * db;
            jbb = jbb + db * db;
            ga = ga + da * r;
            gb = gb + db * r;
        }
        if !(ga.is_finite() && gb.is_finite()) {
            return None;
        }

        let mut improved = false;
        while lambda < T::lit(1e16) {
            let maa = jaa * (T::one() + lambda);
            let mbb = jbb * (T::one() + lambda);
            let det = maa * mbb - jab * jab;
            if det.abs() <= T::min_positive_value() || !det.is_finite() {
                lambda = lambda * T::lit(10.0);
                continue;
            }
            let step_a = (mbb * ga - jab * gb) / det;
            let step_b = (maa * gb - jab * ga) / det;
            let (na, nb) = (a + step_a, b + step_b);
            let new_cost = if na > T::zero() { sse(points, na, nb) } else { T::infinity() };
            if new_cost.is_finite() && new_cost <= cost {
                let converged = step_a.abs() <= tiny * a.abs() && step_b.abs() <= tiny * b.abs()
                    || cost - new_cost <= tiny * cost;
                a = na;
                b = nb;
                cost = new_cost;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-12));
                improved = true;
                if converged {
                    return Some((a, b, iter));
                }
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            // No downhill step at any damping: already at the minimum.
            return Some((a, b, iter));
        }
    }
    Some((a, b, MAX_ITERATIONS))
}
