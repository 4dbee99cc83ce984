//! Limiting laws: Mittag-Leffler moments and densities, the moment
//! sequences of the binary model, and finite-size gaps to them.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::binary::phi_tilde;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::quadrature::{integrate, uniform_breaks, Estimate, QuadratureConfig};
use crate::scalar::RealScalar;
use crate::Distribution;

fn gamma(x: f64) -> f64 {
    // Exact at 1 so that zeroth moments are exactly one.
    if x == 1.0 {
        1.0
    } else {
        RealScalar::gamma(&x)
    }
}

fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

/// Which limiting law a moment sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LimitFamily {
    MittagLeffler { p: f64 },
    BinaryLength,
    BinaryDegree,
}

/// `E(X^r)` for `r = 0..=r_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    pub family: LimitFamily,
    pub values: Vec<f64>,
    /// The auxiliary `c̃_r` of the binary recurrences; empty for Mittag-Leffler.
    pub coefficients: Vec<f64>,
}

impl MomentSequence {
    pub fn get(&self, r: usize) -> Option<f64> {
        self.values.get(r).copied()
    }

    /// Lyapunov: `r -> ln E(X^r)` is convex.
    pub fn is_log_convex(&self) -> bool {
        self.values.windows(3).all(|w| {
            let mid = 2.0 * w[1].ln();
            mid <= w[0].ln() + w[2].ln() + 1e-12 * mid.abs().max(1.0)
        })
    }
}

/// `E(D^r) = r!/Γ(rp + 1)`.
pub fn ml_moment(r: u32, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(factorial(r) / gamma(f64::from(r) * p + 1.0))
}

pub fn ml_moments(r_max: u32, p: f64) -> Result<MomentSequence> {
    let values = (0..=r_max).map(|r| ml_moment(r, p)).collect::<Result<_>>()?;
    Ok(MomentSequence { family: LimitFamily::MittagLeffler { p }, values, coefficients: Vec::new() })
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// `ln` of the smallest envelope value kept by the density integral.
const ENVELOPE_LOG: f64 = -41.5;

/// Upper limit `W` where `-w^{1/p} - x w cos(πp)` falls to [`ENVELOPE_LOG`].
/// The exponent is convex in `w` and negative at 0, so the root is unique.
fn upper_limit(x: f64, p: f64) -> f64 {
    let g = |w: f64| w.powf(1.0 / p) + x * w * (PI * p).cos() + ENVELOPE_LOG;
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

/// Mittag-Leffler density by its real integral representation
/// `f(x) = (1/(πp)) ∫_0^∞ e^{-w^{1/p} - xw cos(πp)} sin(πp - xw sin(πp)) dw`.
///
/// The range is cut where the envelope drops below `e^{-41.5}` and split
/// into pieces no longer than half an oscillation.
pub fn ml_density(x: f64, p: f64, config: QuadratureConfig) -> Result<Estimate> {
    check_p(p)?;
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::InvalidArgument(format!("density argument must be positive, got {x}")));
    }
    let (s, c) = (PI * p).sin_cos();
    let w_max = upper_limit(x, p);
    let pieces = ((w_max * x * s / PI).ceil() as usize + 1).clamp(4, 4096);
    let integrand = |w: f64| (-w.powf(1.0 / p) - x * w * c).exp() * (PI * p - x * w * s).sin();
    let scaled = QuadratureConfig { tolerance: config.tolerance * PI * p, ..config };
    let mut est = integrate(integrand, &uniform_breaks(0.0, w_max, pieces), scaled)?;
    est.value /= PI * p;
    est.error /= PI * p;
    Ok(est)
}

/// Density of the Bernoulli length limit, Mittag-Leffler with parameter `1 - p`.
pub fn length_limit_density(x: f64, p: f64, config: QuadratureConfig) -> Result<Estimate> {
    check_p(p)?;
    ml_density(x, 1.0 - p, config)
}

/// `(1/√π) e^{-x²/4}`, the `p = 1/2` case.
pub fn ml_density_halfnormal(x: f64) -> f64 {
    (-x * x / 4.0).exp() / PI.sqrt()
}

/// Point where the tail `exp(-(1-p) p^{p/(1-p)} x^{1/(1-p)})` reaches `e^{-40}`.
fn tail_cutoff(p: f64) -> f64 {
    let k = (1.0 - p) * p.powf(p / (1.0 - p));
    (40.0 / k).powf(1.0 - p)
}

/// `∫ x^r f(x) dx` with the density evaluated by quadrature; the reported
/// error adds the outer estimate and the integrated inner errors.
pub fn ml_numeric_moment(r: u32, p: f64, config: QuadratureConfig) -> Result<Estimate> {
    check_p(p)?;
    let x_max = tail_cutoff(p);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_error = RefCell::new(0.0f64);
    let integrand = |x: f64| match ml_density(x, p, config) {
        Ok(e) => {
            let weighted = e.error * x.powi(r as i32);
            inner_error.replace_with(|m| m.max(weighted));
            x.powi(r as i32) * e.value
        }
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            0.0
        }
    };
    let mut est = integrate(integrand, &uniform_breaks(0.0, x_max, 16), config)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    est.error += inner_error.into_inner() * x_max;
    Ok(est)
}

/// `c̃_r` and `E(L^r) = r! c̃_r / Γ(rφ̃ + 1)` for the binary leftmost length.
pub fn binary_length_moments(r_max: u32) -> MomentSequence {
    let phi: f64 = phi_tilde();
    let mut c = vec![1.0, (3.0 + phi) / 5.0];
    for r in 2..=r_max as usize {
        let rf = r as f64;
        let sum: f64 = (1..r).map(|k| (k as f64 * phi + 1.0) * c[k] * c[r - k]).sum();
        c.push(sum / (phi * (rf - 1.0) * ((rf + 1.0) * phi + 1.0)));
    }
    c.truncate(r_max as usize + 1);
    let values = (0..=r_max).map(|r| factorial(r) * c[r as usize] / gamma(f64::from(r) * phi + 1.0)).collect();
    MomentSequence { family: LimitFamily::BinaryLength, values, coefficients: c }
}

/// `c̃_r` and `E(D^r) = r! (r(√2-1)+1) c̃_r / Γ(r(√2-1) + 1)` for the sink degree.
pub fn binary_degree_moments(r_max: u32) -> MomentSequence {
    let beta = 2f64.sqrt() - 1.0;
    let mut c = vec![1.0, (1.0 + 2f64.sqrt()) / (2.0 * 2f64.sqrt())];
    for r in 2..=r_max as usize {
        let sum: f64 = (1..r).map(|k| c[k] * c[r - k]).sum();
        c.push(sum / ((r as f64 * beta + 1.0).powi(2) - 2.0));
    }
    c.truncate(r_max as usize + 1);
    let values = (0..=r_max)
        .map(|r| {
            let rb = f64::from(r) * beta;
            factorial(r) * (rb + 1.0) * c[r as usize] / gamma(rb + 1.0)
        })
        .collect();
    MomentSequence { family: LimitFamily::BinaryDegree, values, coefficients: c }
}

/// The parameter whose scaled law converges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Source degree (Bernoulli) or sink degree (binary).
    PoleDegree,
    LeftmostLength,
}

/// Scaling exponent `β` and limit family for `X_n / n^β`.
pub fn scaling(model: Model, quantity: Quantity) -> (f64, LimitFamily) {
    match (model, quantity) {
        (Model::Bernoulli { p }, Quantity::PoleDegree) => (p, LimitFamily::MittagLeffler { p }),
        (Model::Bernoulli { p }, Quantity::LeftmostLength) => (1.0 - p, LimitFamily::MittagLeffler { p: 1.0 - p }),
        (Model::Binary, Quantity::LeftmostLength) => (phi_tilde(), LimitFamily::BinaryLength),
        (Model::Binary, Quantity::PoleDegree) => (2f64.sqrt() - 1.0, LimitFamily::BinaryDegree),
    }
}

/// `E(X^r)` of a limit law.
pub fn limit_moment(family: LimitFamily, r: u32) -> Result<f64> {
    match family {
        LimitFamily::MittagLeffler { p } => ml_moment(r, p),
        LimitFamily::BinaryLength => Ok(binary_length_moments(r).values[r as usize]),
        LimitFamily::BinaryDegree => Ok(binary_degree_moments(r).values[r as usize]),
    }
}

/// `|E(X_n^r)/n^{βr} - E(X^r)|` from a raw finite-size moment.
pub fn scaled_moment_gap_from(model: Model, quantity: Quantity, n: usize, r: u32, raw_moment: f64) -> Result<f64> {
    model.validate()?;
    if r == 0 {
        return Ok(0.0);
    }
    let (beta, family) = scaling(model, quantity);
    let scaled = raw_moment / (n as f64).powf(beta * f64::from(r));
    Ok((scaled - limit_moment(family, r)?).abs())
}

/// [`scaled_moment_gap_from`] with the moment taken from an exact law.
pub fn scaled_moment_gap(model: Model, quantity: Quantity, n: usize, r: u32, law: &Distribution) -> Result<f64> {
    scaled_moment_gap_from(model, quantity, n, r, law.moment(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::degree_dist_dp;

    #[test]
    fn closed_moments() {
        assert_eq!(ml_moment(0, 0.3).unwrap(), 1.0);
        assert!((ml_moment(1, 0.5).unwrap() - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!((ml_moment(2, 0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(ml_moment(1, 1.0).is_err());
    }

    #[test]
    fn half_normal_case() {
        let config = QuadratureConfig::default();
        let f = ml_density(1.0, 0.5, config).unwrap();
        assert!((f.value - (-0.25f64).exp() / PI.sqrt()).abs() < 1e-10, "{f:?}");
        assert!((ml_density_halfnormal(1e-9) - 1.0 / PI.sqrt()).abs() < 1e-12);
        let mass = integrate(ml_density_halfnormal, &[0.0, 20.0, 40.0], config).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn density_rejects_bad_arguments() {
        let config = QuadratureConfig::default();
        assert!(ml_density(0.0, 0.5, config).is_err());
        assert!(ml_density(1.0, 0.0, config).is_err());
        let tight = QuadratureConfig { tolerance: 1e-30, max_evaluations: 200 };
        assert!(matches!(ml_density(3.0, 0.3, tight), Err(Error::QuadratureBudget { .. })));
    }

    #[test]
    fn length_density_is_the_reflected_family() {
        let config = QuadratureConfig::default();
        let g = length_limit_density(0.7, 0.3, config).unwrap();
        assert_eq!(g.value, ml_density(0.7, 0.7, config).unwrap().value);
    }

    #[test]
    fn binary_sequences() {
        let phi: f64 = phi_tilde();
        let len = binary_length_moments(10);
        assert_eq!(len.coefficients[0], 1.0);
        assert!((len.coefficients[1] - (3.0 + phi) / 5.0).abs() < 1e-15);
        let c1 = len.coefficients[1];
        let c2 = (phi + 1.0) * c1 * c1 / (phi * (3.0 * phi + 1.0));
        assert!((len.coefficients[2] - c2).abs() < 1e-15);
        let deg = binary_degree_moments(10);
        let s2 = 2f64.sqrt();
        assert!((deg.values[1] - (1.0 + s2) / (2.0 * gamma(s2))).abs() < 1e-14);
        for seq in [&len, &deg, &ml_moments(10, 0.3).unwrap()] {
            assert_eq!(seq.values[0], 1.0);
            assert!(seq.values.iter().all(|&m| m > 0.0));
            assert!(seq.is_log_convex());
        }
    }

    #[test]
    fn first_moments_match_mean_asymptotics() {
        let phi: f64 = phi_tilde();
        let len = binary_length_moments(1).values[1];
        let expect = (3.0 + 5f64.sqrt()) / (2.0 * 5f64.sqrt()) / gamma(phi);
        assert!((len - expect).abs() < 1e-14);
    }

    #[test]
    fn degree_gap_shrinks() {
        let model = Model::bernoulli(0.5).unwrap();
        let small = scaled_moment_gap(model, Quantity::PoleDegree, 400, 1, &degree_dist_dp(400, 0.5).unwrap()).unwrap();
        let large =
            scaled_moment_gap(model, Quantity::PoleDegree, 4000, 1, &degree_dist_dp(4000, 0.5).unwrap()).unwrap();
        assert!(large < small);
        let law = degree_dist_dp(50, 0.5).unwrap();
        assert_eq!(scaled_moment_gap(model, Quantity::PoleDegree, 50, 0, &law).unwrap(), 0.0);
    }
}
