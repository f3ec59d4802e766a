//! Service-time distribution catalog.
//!
//! Every supported law has a closed-form survival function, mean, and tail
//! integral, so downstream numerics can be checked against exact values.
//! The catalog covers one representative per tail regime: exponential,
//! hyperexponential and Erlang laws satisfy the Cramér condition; the
//! Lomax (shifted Pareto) law is regularly varying with explicit slowly
//! varying part; the heavy Weibull law (shape < 1) is subexponential
//! without being regularly varying and is provided for simulation.

use rand::Rng;
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::quad;
use crate::{Error, Result};

/// Tolerance for probability-vector normalization.
const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Exponential {
        rate: f64,
    },
    HyperExponential {
        weights: Vec<f64>,
        rates: Vec<f64>,
    },
    Erlang {
        shape: u32,
        rate: f64,
    },
    Lomax {
        alpha: f64,
        scale: f64,
    },
    WeibullHeavy {
        shape: f64,
        scale: f64,
    },
}

/// A parametric service-time law `B` with survival `B̄(x) = 1 − B(x)`.
///
/// Values are immutable once constructed and safe to share across threads.
/// Construct through the checked constructors or [`str::parse`]; they
/// enforce positivity and normalization so evaluation never re-validates.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceModel {
    kind: Kind,
}

/// Tail classification of a service law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// The moment generating function is finite on `(0, cramer_abscissa)`.
    Light { cramer_abscissa: f64 },
    /// `B̄(x) = x^{-alpha} L(x)` with `L` slowly varying.
    RegularlyVarying {
        alpha: f64,
        slowly_varying: SlowlyVarying,
    },
    /// Subexponential but not regularly varying (heavy Weibull).
    SubexponentialOther,
}

/// The slowly varying factor `L` in the exact factorization
/// `B̄(x) = x^{-alpha} L(x)` of a Lomax survival function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowlyVarying {
    alpha: f64,
    scale: f64,
}

impl SlowlyVarying {
    /// Evaluates `L(x) = scale^alpha (1 + scale/x)^{-alpha}` for `x > 0`.
    pub fn eval(&self, x: f64) -> f64 {
        (self.scale * x / (x + self.scale)).powf(self.alpha)
    }

    /// The limit `L(∞) = scale^alpha`.
    pub fn limit(&self) -> f64 {
        self.scale.powf(self.alpha)
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidModel(format!(
            "{name} must be finite and > 0, got {v}"
        )));
    }
    Ok(())
}

impl ServiceModel {
    /// Exponential law with the given rate (mean `1/rate`).
    pub fn exponential(rate: f64) -> Result<Self> {
        require_positive("rate", rate)?;
        Ok(Self {
            kind: Kind::Exponential { rate },
        })
    }

    /// Mixture of exponentials: component `i` has weight `weights[i]` and
    /// rate `rates[i]`. Weights must sum to one.
    pub fn hyper_exponential(weights: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != rates.len() {
            return Err(Error::InvalidModel(format!(
                "hyperexponential needs matching nonempty weights and rates, \
                 got {} weights and {} rates",
                weights.len(),
                rates.len()
            )));
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "weights must be nonnegative, got {w}"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidModel(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOL:e}, got {sum}"
            )));
        }
        for &r in &rates {
            require_positive("rate", r)?;
        }
        Ok(Self {
            kind: Kind::HyperExponential { weights, rates },
        })
    }

    /// Erlang law: sum of `shape` independent exponentials of the given rate.
    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidModel("Erlang shape must be >= 1".into()));
        }
        require_positive("rate", rate)?;
        Ok(Self {
            kind: Kind::Erlang { shape, rate },
        })
    }

    /// Lomax (shifted Pareto) law with survival `(1 + x/scale)^{-alpha}`.
    ///
    /// Any `alpha > 0` is accepted; mean-dependent operations fail for
    /// `alpha <= 1` where the mean diverges.
    pub fn lomax(alpha: f64, scale: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        require_positive("scale", scale)?;
        Ok(Self {
            kind: Kind::Lomax { alpha, scale },
        })
    }

    /// Heavy-tailed Weibull law with shape in `(0, 1)` and survival
    /// `exp(-(x/scale)^shape)`.
    pub fn weibull_heavy(shape: f64, scale: f64) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("scale", scale)?;
        if shape >= 1.0 {
            return Err(Error::InvalidModel(format!(
                "heavy Weibull requires shape in (0, 1), got {shape}; \
                 shape >= 1 is a light tail"
            )));
        }
        Ok(Self {
            kind: Kind::WeibullHeavy { shape, scale },
        })
    }

    /// Survival function `B̄(x)`.
    pub fn sf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!(
                "survival requires finite x >= 0, got {x}"
            )));
        }
        Ok(self.sf_raw(x))
    }

    /// Survival at a point already known to be nonnegative.
    pub(crate) fn sf_raw(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Exponential { rate } => (-rate * x).exp(),
            Kind::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(w, r)| w * (-r * x).exp())
                .sum(),
            Kind::Erlang { shape, rate } => erlang_ln_sf(*shape, rate * x).exp(),
            Kind::Lomax { alpha, scale } => (-alpha * (x / scale).ln_1p()).exp(),
            Kind::WeibullHeavy { shape, scale } => (-(x / scale).powf(*shape)).exp(),
        }
    }

    /// Mean service time `b = ∫_0^∞ B̄(x) dx`.
    pub fn mean(&self) -> Result<f64> {
        match &self.kind {
            Kind::Exponential { rate } => Ok(1.0 / rate),
            Kind::HyperExponential { weights, rates } => {
                Ok(weights.iter().zip(rates).map(|(w, r)| w / r).sum())
            }
            Kind::Erlang { shape, rate } => Ok(f64::from(*shape) / rate),
            Kind::Lomax { alpha, scale } => {
                if *alpha <= 1.0 {
                    Err(Error::InfiniteMean(format!(
                        "Lomax mean diverges for alpha <= 1 (alpha = {alpha})"
                    )))
                } else {
                    Ok(scale / (alpha - 1.0))
                }
            }
            Kind::WeibullHeavy { shape, scale } => Ok(scale * gamma(1.0 + 1.0 / shape)),
        }
    }

    /// Tail integral `∫_t^∞ B̄(x) dx`, the driver of the explicit
    /// convergence bound. Equals the mean at `t = 0`.
    pub fn tail_integral(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!(
                "tail integral requires finite t >= 0, got {t}"
            )));
        }
        match &self.kind {
            Kind::Exponential { rate } => Ok((-rate * t).exp() / rate),
            Kind::HyperExponential { weights, rates } => Ok(weights
                .iter()
                .zip(rates)
                .map(|(w, r)| w * (-r * t).exp() / r)
                .sum()),
            Kind::Erlang { shape, rate } => Ok(erlang_ln_tail_integral(*shape, rate * t).exp() / rate),
            Kind::Lomax { alpha, scale } => {
                if *alpha <= 1.0 {
                    Err(Error::InfiniteMean(format!(
                        "Lomax tail integral diverges for alpha <= 1 (alpha = {alpha})"
                    )))
                } else {
                    // ∫_t^∞ (1+x/s)^{-a} dx = s (1+t/s)^{1-a} / (a-1)
                    Ok(scale * ((1.0 - alpha) * (t / scale).ln_1p()).exp() / (alpha - 1.0))
                }
            }
            Kind::WeibullHeavy { shape, scale } => {
                // Substituting u = (x/s)^c gives (s/c) Γ(1/c) Q(1/c, (t/s)^c).
                let a = 1.0 / shape;
                let z = (t / scale).powf(*shape);
                Ok(scale / shape * gamma(a) * gamma_ur(a, z))
            }
        }
    }

    /// Inverse CDF: the unique `x >= 0` with `B(x) = u`, for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(format!(
                "quantile requires u in [0, 1), got {u}"
            )));
        }
        Ok(match &self.kind {
            Kind::Exponential { rate } => -(-u).ln_1p() / rate,
            Kind::Lomax { alpha, scale } => scale * ((-(-u).ln_1p()) / alpha).exp_m1(),
            Kind::WeibullHeavy { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            // No elementary inverse; bisect the closed-form survival.
            Kind::HyperExponential { .. } | Kind::Erlang { .. } => self.quantile_bisect(u),
        })
    }

    fn quantile_bisect(&self, u: f64) -> f64 {
        let target = 1.0 - u;
        if target >= 1.0 {
            return 0.0;
        }
        let mut hi = self.mean().expect("catalog bisection laws have finite mean");
        let mut grow = 0;
        while self.sf_raw(hi) > target && grow < 1100 {
            hi *= 2.0;
            grow += 1;
        }
        let mut lo = 0.0;
        while hi - lo > 1e-14 * (1.0 + hi) {
            let mid = 0.5 * (lo + hi);
            if self.sf_raw(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Draws one service time by inverse CDF from a single uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u).expect("uniform draw lies in [0, 1)")
    }

    /// Classifies the tail of the law.
    pub fn classify_tail(&self) -> TailClass {
        match &self.kind {
            Kind::Exponential { rate } => TailClass::Light {
                cramer_abscissa: *rate,
            },
            Kind::HyperExponential { rates, .. } => TailClass::Light {
                cramer_abscissa: rates.iter().cloned().fold(f64::INFINITY, f64::min),
            },
            Kind::Erlang { rate, .. } => TailClass::Light {
                cramer_abscissa: *rate,
            },
            Kind::Lomax { alpha, scale } => TailClass::RegularlyVarying {
                alpha: *alpha,
                slowly_varying: SlowlyVarying {
                    alpha: *alpha,
                    scale: *scale,
                },
            },
            Kind::WeibullHeavy { .. } => TailClass::SubexponentialOther,
        }
    }

    /// Exponential moment `∫_0^∞ e^{sx} dB(x)`; `+∞` when divergent.
    pub fn exp_moment(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Exponential { rate } => {
                if s < *rate {
                    rate / (rate - s)
                } else {
                    f64::INFINITY
                }
            }
            Kind::HyperExponential { weights, rates } => {
                let abscissa = rates.iter().cloned().fold(f64::INFINITY, f64::min);
                if s < abscissa {
                    weights.iter().zip(rates).map(|(w, r)| w * r / (r - s)).sum()
                } else {
                    f64::INFINITY
                }
            }
            Kind::Erlang { shape, rate } => {
                if s < *rate {
                    (rate / (rate - s)).powi(*shape as i32)
                } else {
                    f64::INFINITY
                }
            }
            Kind::Lomax { .. } | Kind::WeibullHeavy { .. } => {
                if s > 0.0 {
                    f64::INFINITY
                } else if s == 0.0 {
                    1.0
                } else {
                    // Integration by parts: E e^{sX} = 1 + s ∫_0^∞ e^{sx} B̄(x) dx,
                    // truncated where the integrand is below 1e-16.
                    let mut hi = self.mean().map(|b| 2.0 * b).unwrap_or(1.0);
                    while (s * hi).exp() * self.sf_raw(hi) > 1e-16 && hi < 1e12 {
                        hi *= 2.0;
                    }
                    let f = |x: f64| (s * x).exp() * self.sf_raw(x);
                    1.0 + s * quad::integrate(&f, 0.0, hi, 1e-10)
                }
            }
        }
    }
}

/// `ln B̄(x)` for Erlang(shape, rate) at `z = rate * x`, via log-sum-exp so
/// large `z` cannot overflow the partial Poisson sum.
fn erlang_ln_sf(shape: u32, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let ln_z = z.ln();
    let mut max_term = f64::NEG_INFINITY;
    let terms: Vec<f64> = (0..shape)
        .map(|j| {
            let t = f64::from(j) * ln_z - ln_gamma(f64::from(j) + 1.0);
            max_term = max_term.max(t);
            t
        })
        .collect();
    let sum: f64 = terms.iter().map(|t| (t - max_term).exp()).sum();
    (-z + max_term + sum.ln()).min(0.0)
}

/// `ln (rate ∫_t^∞ B̄)` for Erlang(shape, rate) at `z = rate * t`:
/// the integral equals `e^{-z} Σ_{i<shape} (shape-i) z^i / i!` divided by rate.
fn erlang_ln_tail_integral(shape: u32, z: f64) -> f64 {
    if z <= 0.0 {
        return f64::from(shape).ln();
    }
    let ln_z = z.ln();
    let mut max_term = f64::NEG_INFINITY;
    let terms: Vec<f64> = (0..shape)
        .map(|i| {
            let t = f64::from(shape - i).ln() + f64::from(i) * ln_z - ln_gamma(f64::from(i) + 1.0);
            max_term = max_term.max(t);
            t
        })
        .collect();
    let sum: f64 = terms.iter().map(|t| (t - max_term).exp()).sum();
    -z + max_term + sum.ln()
}

impl std::str::FromStr for ServiceModel {
    type Err = Error;

    /// Parses the CLI grammar:
    /// `exp:rate=1.0`, `hyperexp:w=0.5,0.5;rates=1,2`, `erlang:k=2,rate=3`,
    /// `lomax:alpha=3,scale=1`, `weibull:shape=0.5,scale=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidModel(format!("expected 'family:params', got '{s}'")))?;
        match family {
            "exp" => {
                let kv = parse_kv(body, &["rate"])?;
                Self::exponential(kv[0])
            }
            "erlang" => {
                let kv = parse_kv(body, &["k", "rate"])?;
                let k = kv[0];
                if k.fract() != 0.0 || k < 1.0 || k > f64::from(u32::MAX) {
                    return Err(Error::InvalidModel(format!(
                        "erlang k must be a positive integer, got {k}"
                    )));
                }
                Self::erlang(k as u32, kv[1])
            }
            "lomax" => {
                let kv = parse_kv(body, &["alpha", "scale"])?;
                Self::lomax(kv[0], kv[1])
            }
            "weibull" => {
                let kv = parse_kv(body, &["shape", "scale"])?;
                Self::weibull_heavy(kv[0], kv[1])
            }
            "hyperexp" => {
                let mut weights = None;
                let mut rates = None;
                for part in body.split(';') {
                    let (key, list) = part.split_once('=').ok_or_else(|| {
                        Error::InvalidModel(format!("expected 'key=v1,v2,...', got '{part}'"))
                    })?;
                    let values = parse_list(list)?;
                    match key {
                        "w" => weights = Some(values),
                        "rates" => rates = Some(values),
                        other => {
                            return Err(Error::InvalidModel(format!(
                                "unknown hyperexp field '{other}' (expected w, rates)"
                            )))
                        }
                    }
                }
                let weights =
                    weights.ok_or_else(|| Error::InvalidModel("hyperexp is missing w=...".into()))?;
                let rates = rates
                    .ok_or_else(|| Error::InvalidModel("hyperexp is missing rates=...".into()))?;
                Self::hyper_exponential(weights, rates)
            }
            other => Err(Error::InvalidModel(format!(
                "unknown distribution family '{other}' \
                 (expected exp, hyperexp, erlang, lomax, weibull)"
            ))),
        }
    }
}

fn parse_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidModel(format!("expected a number, got '{v}'")))
        })
        .collect()
}

/// Parses `key=value` pairs in fixed order `keys`, rejecting unknowns.
fn parse_kv(body: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let mut out = vec![None; keys.len()];
    for part in body.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidModel(format!("expected 'key=value', got '{part}'"))
        })?;
        let idx = keys.iter().position(|k| *k == key.trim()).ok_or_else(|| {
            Error::InvalidModel(format!(
                "unknown field '{}' (expected {})",
                key.trim(),
                keys.join(", ")
            ))
        })?;
        if out[idx].is_some() {
            return Err(Error::InvalidModel(format!("duplicate field '{key}'")));
        }
        out[idx] = Some(value.trim().parse::<f64>().map_err(|_| {
            Error::InvalidModel(format!("field '{key}' expects a number, got '{value}'"))
        })?);
    }
    out.into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| Error::InvalidModel(format!("missing field '{k}'"))))
        .collect()
}

impl std::fmt::Display for ServiceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::Exponential { rate } => write!(f, "exp:rate={rate}"),
            Kind::HyperExponential { weights, rates } => {
                let w: Vec<String> = weights.iter().map(f64::to_string).collect();
                let r: Vec<String> = rates.iter().map(f64::to_string).collect();
                write!(f, "hyperexp:w={};rates={}", w.join(","), r.join(","))
            }
            Kind::Erlang { shape, rate } => write!(f, "erlang:k={shape},rate={rate}"),
            Kind::Lomax { alpha, scale } => write!(f, "lomax:alpha={alpha},scale={scale}"),
            Kind::WeibullHeavy { shape, scale } => {
                write!(f, "weibull:shape={shape},scale={scale}")
            }
        }
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_model() -> impl Strategy<Value = ServiceModel> {
        prop_oneof![
            (0.1f64..5.0).prop_map(|r| ServiceModel::exponential(r).unwrap()),
            (0.05f64..0.95, 0.1f64..4.0, 0.1f64..4.0).prop_map(|(w, r1, r2)| {
                ServiceModel::hyper_exponential(vec![w, 1.0 - w], vec![r1, r2]).unwrap()
            }),
            (1u32..6, 0.2f64..5.0).prop_map(|(k, r)| ServiceModel::erlang(k, r).unwrap()),
            (1.2f64..6.0, 0.2f64..4.0).prop_map(|(a, s)| ServiceModel::lomax(a, s).unwrap()),
            (0.2f64..0.9, 0.2f64..4.0)
                .prop_map(|(c, s)| ServiceModel::weibull_heavy(c, s).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn sf_is_monotone_with_unit_start(model in arb_model(), x1 in 0.0f64..50.0, dx in 0.0f64..50.0) {
            prop_assert_eq!(model.sf(0.0).unwrap(), 1.0);
            let s1 = model.sf(x1).unwrap();
            let s2 = model.sf(x1 + dx).unwrap();
            prop_assert!((0.0..=1.0).contains(&s1));
            prop_assert!(s2 <= s1 + 1e-15);
        }

        #[test]
        fn tail_integral_monotone_and_bounded(model in arb_model(), t in 0.0f64..20.0, dt in 0.0f64..20.0) {
            let b = model.mean().unwrap();
            let v1 = model.tail_integral(t).unwrap();
            let v2 = model.tail_integral(t + dt).unwrap();
            prop_assert!(v1 <= b + 1e-10);
            prop_assert!(v2 <= v1 + 1e-12);
        }

        #[test]
        fn quantile_cdf_roundtrip(model in arb_model(), u in 0.0f64..0.9999) {
            let x = model.quantile(u).unwrap();
            let back = 1.0 - model.sf(x).unwrap();
            prop_assert!((back - u).abs() < 1e-8, "u={}, x={}, back={}", u, x, back);
        }
    }
}
