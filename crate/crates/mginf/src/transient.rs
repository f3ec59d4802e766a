//! Exact transient law of the infinite-server queue.
//!
//! Starting from an empty system, the number in system at time `t` is
//! Poisson with mean `rho(t) = lambda ∫_0^t B̄(x) dx`, which increases to
//! the offered load `rho = lambda b`. The sup-distance
//! `phi(t) = sup_k |P_k(t) − P_k|` to the stationary Poisson law is
//! computed exactly over a certified truncation range, together with the
//! explicit bound `phi(t) <= C_rho · lambda ∫_t^∞ B̄(x) dx`.

use statrs::function::gamma::ln_gamma;

use crate::dist::ServiceModel;
use crate::{Error, Result};

/// Arrival rate plus service law; the immutable input of every analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueParams {
    lambda: f64,
    service: ServiceModel,
    mean_service: f64,
}

impl QueueParams {
    /// Validates `lambda > 0` and a finite offered load `rho = lambda b`.
    pub fn new(lambda: f64, service: ServiceModel) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        let mean_service = service.mean()?;
        Ok(Self {
            lambda,
            service,
            mean_service,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn service(&self) -> &ServiceModel {
        &self.service
    }

    /// Mean service time `b`.
    pub fn mean_service(&self) -> f64 {
        self.mean_service
    }

    /// Offered load `rho = lambda b`, the stationary Poisson mean.
    pub fn rho(&self) -> f64 {
        self.lambda * self.mean_service
    }

    /// Transient Poisson mean `rho(t) = lambda ∫_0^t B̄(x) dx`.
    pub fn rho_of_t(&self, t: f64) -> Result<f64> {
        let tail = self.service.tail_integral(t)?;
        Ok((self.lambda * (self.mean_service - tail)).max(0.0))
    }

    /// `P(Q(t) = k)` for an initially empty system.
    pub fn pk_transient(&self, k: u64, t: f64) -> Result<f64> {
        Ok(poisson_pmf(k, self.rho_of_t(t)?))
    }

    /// Stationary probability `P_k`, the Poisson(rho) mass at `k`.
    pub fn pk_stationary(&self, k: u64) -> f64 {
        poisson_pmf(k, self.rho())
    }

    /// Exact sup-distance `phi(t) = sup_k |P_k(t) − P_k|`.
    ///
    /// The sup is taken over `k <= ceil(rho + 10 sqrt(rho) + 30)`; beyond
    /// that both masses are below 1e-12. Each difference is computed as
    /// `P_k · |expm1(k ln(rho(t)/rho) + rho − rho(t))|`, which keeps full
    /// relative precision when the two means are nearly equal.
    pub fn phi_exact(&self, t: f64) -> Result<f64> {
        let rho = self.rho();
        let rho_t = self.rho_of_t(t)?;
        let delta = self.lambda * self.service.tail_integral(t)?;
        let mut sup = 0.0_f64;
        for k in 0..=truncation_k(rho) {
            let diff = if k == 0 {
                // e^{-rho(t)} − e^{-rho} = e^{-rho} (e^{delta} − 1)
                (-rho).exp() * delta.exp_m1()
            } else if rho_t <= 0.0 {
                poisson_pmf(k, rho)
            } else {
                poisson_pmf(k, rho) * (k as f64 * (rho_t / rho).ln() + delta).exp_m1().abs()
            };
            sup = sup.max(diff.abs());
        }
        Ok(sup)
    }

    /// The constant `C_rho = 2 rho^{floor(rho)} / floor(rho)!`.
    pub fn c_rho(&self) -> f64 {
        let rho = self.rho();
        let m = rho.floor();
        2.0 * (m * rho.ln() - ln_gamma(m + 1.0)).exp()
    }

    /// Explicit bound `C_rho · lambda ∫_t^∞ B̄(x) dx >= phi(t)`.
    pub fn phi_bound_eq1(&self, t: f64) -> Result<f64> {
        Ok(self.c_rho() * self.lambda * self.service.tail_integral(t)?)
    }
}

/// Truncation index for sups over the Poisson support: mass beyond
/// `mean + 10 sqrt(mean) + 30` is below 1e-12.
pub fn truncation_k(mean: f64) -> u64 {
    (mean + 10.0 * mean.sqrt() + 30.0).ceil() as u64
}

/// Poisson probability mass, evaluated in log space so large means and
/// large `k` neither overflow nor produce NaN.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)).exp()
}

/// The transient law evaluated over a time grid, ready for CSV output.
#[derive(Debug, Clone)]
pub struct TransientCurve {
    pub times: Vec<f64>,
    pub rho_t: Vec<f64>,
    pub phi: Vec<f64>,
    pub bound_eq1: Vec<f64>,
}

impl TransientCurve {
    /// Evaluates `rho(t)`, `phi(t)`, and the explicit bound on `times`,
    /// which must be ascending and nonnegative.
    pub fn build(params: &QueueParams, times: &[f64]) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Config("time grid must be nonempty".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("time grid must be strictly ascending".into()));
        }
        let mut rho_t = Vec::with_capacity(times.len());
        let mut phi = Vec::with_capacity(times.len());
        let mut bound = Vec::with_capacity(times.len());
        for &t in times {
            rho_t.push(params.rho_of_t(t)?);
            phi.push(params.phi_exact(t)?);
            bound.push(params.phi_bound_eq1(t)?);
        }
        Ok(Self {
            times: times.to_vec(),
            rho_t,
            phi,
            bound_eq1: bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ServiceModel;

    fn exp_unit() -> QueueParams {
        QueueParams::new(1.0, ServiceModel::exponential(1.0).unwrap()).unwrap()
    }

    /// Brute-force oracle: direct pmf subtraction over a wide fixed range.
    fn phi_brute(params: &QueueParams, t: f64, k_max: u64) -> f64 {
        let rho_t = params.rho_of_t(t).unwrap();
        let rho = params.rho();
        (0..=k_max)
            .map(|k| (poisson_pmf(k, rho_t) - poisson_pmf(k, rho)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rho_examples() {
        let p = exp_unit();
        assert_eq!(p.rho_of_t(0.0).unwrap(), 0.0);
        assert!((p.rho_of_t(1.0).unwrap() - (1.0 - (-1.0_f64).exp())).abs() < 1e-15);
        let heavy = QueueParams::new(2.0, ServiceModel::lomax(3.0, 1.0).unwrap()).unwrap();
        assert!((heavy.rho() - 1.0).abs() < 1e-15);
        assert!((heavy.rho_of_t(1e9).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pk_examples() {
        let p = exp_unit();
        assert_eq!(p.pk_transient(0, 0.0).unwrap(), 1.0);
        assert_eq!(p.pk_transient(3, 0.0).unwrap(), 0.0);
        let expected = (-(1.0 - (-1.0_f64).exp())).exp();
        assert!((p.pk_transient(0, 1.0).unwrap() - expected).abs() < 1e-15);
        // k = 1 at stationarity: e^{-1}.
        assert!((p.pk_stationary(1) - (-1.0_f64).exp()).abs() < 1e-15);
        let sum: f64 = (0..=200).map(|k| p.pk_stationary(k)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_log_space_behavior() {
        // Way out in the Poisson tail the mass is far below the smallest
        // subnormal, so the correct f64 answer is zero — never NaN.
        let v = poisson_pmf(500, 1.0);
        assert!(v.is_finite() && v >= 0.0);
        let v3 = poisson_pmf(500, 3.0);
        assert!(!v3.is_nan() && v3 >= 0.0);
        // With mean 50 the mass at k = 500 is representable and tiny:
        // the log-space path must not round it down to zero.
        let v50 = poisson_pmf(500, 50.0);
        assert!(v50 > 0.0 && v50 < 1e-300, "pmf(500, 50) = {v50}");
    }

    #[test]
    fn phi_at_zero_and_infinity() {
        let p = exp_unit();
        // At t = 0 the sup is 1 − e^{-rho}, attained at k = 0.
        assert!((p.phi_exact(0.0).unwrap() - (1.0 - (-1.0_f64).exp())).abs() < 1e-14);
        assert!(p.phi_exact(80.0).unwrap() < 1e-12);
    }

    #[test]
    fn phi_matches_brute_force() {
        let p = exp_unit();
        for &t in &[0.0, 0.3, 1.0, 2.5, 5.0] {
            let exact = p.phi_exact(t).unwrap();
            let brute = phi_brute(&p, t, 100);
            assert!(
                (exact - brute).abs() < 1e-14,
                "t={t}: exact={exact}, brute={brute}"
            );
        }
    }

    #[test]
    fn phi_sup_attained_at_small_k() {
        // The argmax of |P_k(t) − P_k| stays below ceil(rho) + 2.
        let models = [
            ServiceModel::exponential(1.0).unwrap(),
            ServiceModel::hyper_exponential(vec![0.5, 0.5], vec![1.0, 2.0]).unwrap(),
            ServiceModel::erlang(2, 3.0).unwrap(),
            ServiceModel::lomax(3.0, 1.0).unwrap(),
            ServiceModel::weibull_heavy(0.5, 1.0).unwrap(),
        ];
        for model in &models {
            for &lambda in &[0.5, 1.0, 2.0] {
                let p = QueueParams::new(lambda, model.clone()).unwrap();
                let b = p.mean_service();
                for &t in &[0.0, 0.5 * b, b, 3.0 * b, 10.0 * b] {
                    let rho = p.rho();
                    let rho_t = p.rho_of_t(t).unwrap();
                    let argmax = (0..=truncation_k(rho))
                        .max_by(|&a, &bk| {
                            let da = (poisson_pmf(a, rho_t) - poisson_pmf(a, rho)).abs();
                            let db = (poisson_pmf(bk, rho_t) - poisson_pmf(bk, rho)).abs();
                            da.partial_cmp(&db).unwrap()
                        })
                        .unwrap();
                    assert!(
                        argmax <= rho.ceil() as u64 + 2,
                        "{model}, lambda={lambda}, t={t}: argmax={argmax}"
                    );
                }
            }
        }
    }

    #[test]
    fn c_rho_examples() {
        let p = exp_unit(); // rho = 1
        assert!((p.c_rho() - 2.0).abs() < 1e-14);
        let half = QueueParams::new(0.5, ServiceModel::exponential(1.0).unwrap()).unwrap();
        assert!((half.c_rho() - 2.0).abs() < 1e-14);
        let p25 = QueueParams::new(2.5, ServiceModel::exponential(1.0).unwrap()).unwrap();
        assert!((p25.c_rho() - 6.25).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        let p = exp_unit();
        assert!((p.phi_bound_eq1(0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((p.phi_bound_eq1(3.0).unwrap() - 2.0 * (-3.0_f64).exp()).abs() < 1e-14);
        let heavy = QueueParams::new(1.0, ServiceModel::lomax(3.0, 1.0).unwrap()).unwrap();
        assert!((heavy.phi_bound_eq1(9.0).unwrap() - 0.01).abs() < 1e-14);
    }

    #[test]
    fn two_routes_to_rho_gap_agree() {
        let p = exp_unit();
        for &t in &[0.0, 0.7, 2.0, 11.0] {
            let gap = p.rho() - p.rho_of_t(t).unwrap();
            let tail = p.lambda() * p.service().tail_integral(t).unwrap();
            assert!((gap - tail).abs() < 1e-10, "t={t}: {gap} vs {tail}");
        }
    }

    #[test]
    fn curve_build_validates_grid() {
        let p = exp_unit();
        assert!(TransientCurve::build(&p, &[]).is_err());
        assert!(TransientCurve::build(&p, &[0.0, 1.0, 1.0]).is_err());
        let curve = TransientCurve::build(&p, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(curve.times.len(), 4);
        for i in 0..4 {
            assert!(curve.phi[i] <= curve.bound_eq1[i]);
        }
        assert!(curve.rho_t.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn params_validation() {
        assert!(QueueParams::new(0.0, ServiceModel::exponential(1.0).unwrap()).is_err());
        assert!(QueueParams::new(-1.0, ServiceModel::exponential(1.0).unwrap()).is_err());
        // Infinite-mean service is rejected up front.
        assert!(QueueParams::new(1.0, ServiceModel::lomax(0.9, 1.0).unwrap()).is_err());
    }
}
