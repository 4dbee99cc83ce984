//! Exact laws for the Bernoulli model.
//!
//! The recurrences ([`degree_dist_dp`], [`expected_paths_series`]) only add
//! positive terms and are the ones to use in practice. The explicit formulas
//! alternate in sign and lose many bits to cancellation; they run in MPFR
//! arithmetic against an explicit budget and fail with
//! [`Error::InsufficientPrecision`] naming the precision that would do.

use num_rational::BigRational;
use num_traits::pow;

use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, Provenance};
use crate::scalar::{with_precision, MpFloat, RealScalar, Scalar};
use crate::{Distribution, ExactDistribution};

/// Bits of headroom below the unit (absolute) or the value (relative).
const TARGET_BITS: f64 = 64.0;

/// Precision tried first by the `*_auto` helpers.
const FIRST_TRY_BITS: u32 = 128;
/// Escalations before giving up: 128 bits grow to at least 32768.
const MAX_RETRIES: usize = 8;

/// Parallel-doubling probability `p` and its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliParams {
    p: f64,
    q: f64,
}

impl BernoulliParams {
    pub fn new(p: f64) -> Result<BernoulliParams> {
        if p > 0.0 && p < 1.0 {
            Ok(BernoulliParams { p, q: 1.0 - p })
        } else {
            Err(Error::InvalidProbability(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

fn check_rational(p: &BigRational) -> Result<()> {
    let zero = BigRational::from_int(0);
    let one = BigRational::from_int(1);
    if *p > zero && *p < one {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p.to_f64()))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptySize)
    } else {
        Ok(())
    }
}

/// `a (a-1) ... (a-k+1) / k!` for real `a`.
pub fn gen_binomial<T: Scalar>(a: &T, k: usize) -> T {
    (0..k as u64).fold(T::one(), |acc, i| acc * (a.clone() - T::from_u64(i)) / T::from_u64(i + 1))
}

/// `H_n^(m) = sum_{j=1}^n j^-m`.
pub fn harmonic<T: Scalar>(n: usize, m: usize) -> T {
    (1..=n as u64).fold(T::zero(), |acc, j| acc + pow(T::one() / T::from_u64(j), m))
}

/// `[H_n^(1), ..., H_n^(m_max)]` in one pass of running powers.
fn harmonic_orders<T: Scalar>(n: usize, m_max: usize) -> Vec<T> {
    let mut sums = vec![T::zero(); m_max];
    for j in 1..=n as u64 {
        let inv = T::one() / T::from_u64(j);
        let mut power = inv.clone();
        for sum in sums.iter_mut() {
            *sum = sum.clone() + power.clone();
            power = power * inv.clone();
        }
    }
    sums
}

/// Complete Bell polynomials `B_0, ..., B_k` of `x_1, ..., x_k`, together
/// with the same recurrence run on `|x_i|`, which bounds the round-off.
fn bell_with_bound<T: Scalar>(x: &[T]) -> (Vec<T>, Vec<T>) {
    let mut b = vec![T::one()];
    let mut bound = vec![T::one()];
    let mut row = vec![T::one()];
    for k in 0..x.len() {
        if k > 0 {
            let mut next = vec![T::one(); k + 1];
            for i in 1..k {
                next[i] = row[i - 1].clone() + row[i].clone();
            }
            row = next;
        }
        let (mut s, mut s_abs) = (T::zero(), T::zero());
        for i in 0..=k {
            s = s + row[i].clone() * b[k - i].clone() * x[i].clone();
            s_abs = s_abs + row[i].clone() * bound[k - i].clone() * x[i].abs();
        }
        b.push(s);
        bound.push(s_abs);
    }
    (b, bound)
}

/// `B_k(x_1, ..., x_k)` with `k = x.len()`, by the binomial recurrence
/// `B_{k+1} = sum_i C(k, i) B_{k-i} x_{i+1}`.
pub fn complete_bell<T: Scalar>(x: &[T]) -> T {
    bell_with_bound(x).0.pop().unwrap()
}

/// Law of the source degree by the blue-subtree Markov chain: from size `k`
/// the degree `d` grows by one with probability `p d / k`.
pub fn degree_dist_dp_in<T: Scalar>(n: usize, p: &T) -> Result<DiscreteDistribution<T>> {
    check_size(n)?;
    let mut law = vec![T::one()];
    for k in 1..n {
        let mut next = vec![T::zero(); k + 1];
        let k_t = T::from_u64(k as u64);
        for (i, w) in law.iter().enumerate() {
            let up = p.clone() * T::from_u64(i as u64 + 1) / k_t.clone();
            next[i + 1] = next[i + 1].clone() + w.clone() * up.clone();
            next[i] = next[i].clone() + w.clone() * (T::one() - up);
        }
        law = next;
    }
    DiscreteDistribution::new(1, law, Provenance::DynamicProgram)
}

pub fn degree_dist_dp(n: usize, p: f64) -> Result<Distribution> {
    BernoulliParams::new(p)?;
    degree_dist_dp_in(n, &p)
}

pub fn degree_dist_dp_exact(n: usize, p: &BigRational) -> Result<ExactDistribution> {
    check_rational(p)?;
    degree_dist_dp_in(n, p)
}

/// Values and absolute-term sums of
/// `sum_{j<m} C(m-1, j) (-1)^(n+j-1) C(upper(j), n-1)` for `m = 1..=n`.
fn alternating_law<T: Scalar>(n: usize, upper: impl Fn(u64) -> T) -> (Vec<T>, Vec<T>) {
    let g: Vec<T> = (0..n as u64).map(|j| gen_binomial(&upper(j), n - 1)).collect();
    let mut row = vec![T::one()];
    let mut values = Vec::with_capacity(n);
    let mut magnitudes = Vec::with_capacity(n);
    for m in 1..=n {
        if m > 1 {
            let mut next = vec![T::one(); m];
            for j in 1..m - 1 {
                next[j] = row[j - 1].clone() + row[j].clone();
            }
            row = next;
        }
        let (mut value, mut magnitude) = (T::zero(), T::zero());
        for j in 0..m {
            let term = row[j].clone() * g[j].clone();
            magnitude = magnitude + term.abs();
            value = if (n + j - 1).is_multiple_of(2) { value + term } else { value - term };
        }
        values.push(value);
        magnitudes.push(magnitude);
    }
    (values, magnitudes)
}

/// Closed-form law evaluated in extended precision.
#[derive(Debug, Clone)]
pub struct ClosedFormLaw {
    pub distribution: Distribution,
    /// `log2(sum |terms| / |value|)` per entry of the support.
    pub cancellation_bits: Vec<f64>,
    pub precision: u32,
}

fn closed_law_mp(n: usize, precision: u32, upper: impl Fn(&MpFloat, u64) -> MpFloat, p: f64) -> Result<ClosedFormLaw> {
    BernoulliParams::new(p)?;
    check_size(n)?;
    with_precision(precision, || {
        let p_mp = MpFloat::new(p);
        let (values, magnitudes) = alternating_law(n, |j| upper(&p_mp, j));
        let terms = (n as f64).log2() + 1.0;
        let mut required = 0.0f64;
        let mut cancellation = Vec::with_capacity(n);
        for (v, s) in values.iter().zip(&magnitudes) {
            required = required.max(s.log2_abs().max(0.0) + terms + TARGET_BITS);
            cancellation.push(s.log2_abs() - v.log2_abs());
        }
        let required = required.ceil() as u32;
        if precision < required {
            let worst = cancellation.iter().copied().filter(|c| c.is_finite()).fold(0.0, f64::max);
            return Err(Error::InsufficientPrecision { available: precision, required, cancellation_bits: worst });
        }
        let probabilities = values.iter().map(Scalar::to_f64).collect();
        Ok(ClosedFormLaw {
            distribution: DiscreteDistribution::new(1, probabilities, Provenance::ClosedForm)?,
            cancellation_bits: cancellation,
            precision,
        })
    })
}

/// While the value is unresolved it is rounding noise, and the measured
/// cancellation tracks the working precision; so escalate at least
/// geometrically until the estimate settles.
fn retry_on_precision<R>(mut attempt: impl FnMut(u32) -> Result<R>) -> Result<R> {
    let mut bits = FIRST_TRY_BITS;
    for _ in 0..MAX_RETRIES {
        match attempt(bits) {
            Err(Error::InsufficientPrecision { required, .. }) => bits = (required + 64).max(2 * bits),
            other => return other,
        }
    }
    attempt(bits)
}

fn degree_upper<T: Scalar>(p: &T, j: u64) -> T {
    p.clone() * T::from_u64(j + 1) - T::one()
}

fn length_upper<T: Scalar>(p: &T, j: u64) -> T {
    T::from_u64(j) - p.clone() * T::from_u64(j + 1)
}

/// `P{D_n = m} = sum_{j<m} C(m-1,j) (-1)^(n+j-1) C(p(j+1)-1, n-1)` at
/// `precision` mantissa bits.
pub fn degree_dist_closed(n: usize, p: f64, precision: u32) -> Result<ClosedFormLaw> {
    closed_law_mp(n, precision, degree_upper, p)
}

/// As [`degree_dist_closed`], raising the precision once if needed.
pub fn degree_dist_closed_auto(n: usize, p: f64) -> Result<ClosedFormLaw> {
    retry_on_precision(|bits| degree_dist_closed(n, p, bits))
}

/// Leftmost path length: `sum_{j<m} C(m-1,j) (-1)^(n+j-1) C(j-p(j+1), n-1)`.
pub fn length_dist_closed(n: usize, p: f64, precision: u32) -> Result<ClosedFormLaw> {
    closed_law_mp(n, precision, length_upper, p)
}

pub fn length_dist_closed_auto(n: usize, p: f64) -> Result<ClosedFormLaw> {
    retry_on_precision(|bits| length_dist_closed(n, p, bits))
}

pub fn degree_dist_closed_exact(n: usize, p: &BigRational) -> Result<ExactDistribution> {
    check_rational(p)?;
    check_size(n)?;
    let (values, _) = alternating_law(n, |j| degree_upper(p, j));
    DiscreteDistribution::new(1, values, Provenance::ClosedForm)
}

pub fn length_dist_closed_exact(n: usize, p: &BigRational) -> Result<ExactDistribution> {
    check_rational(p)?;
    check_size(n)?;
    let (values, _) = alternating_law(n, |j| length_upper(p, j));
    DiscreteDistribution::new(1, values, Provenance::ClosedForm)
}

/// `E(D_n (D_n - 1) ... (D_n - r + 1))`.
pub fn degree_factorial_moment_in<T: Scalar>(n: usize, p: &T, r: u32) -> T {
    if r == 0 {
        return T::one();
    }
    let r = r as usize;
    let mut binom = T::one();
    let mut sum = T::zero();
    for j in 0..r {
        let upper = T::from_u64(n as u64) + p.clone() * T::from_u64(j as u64 + 1) - T::one();
        let term = binom.clone() * gen_binomial(&upper, n - 1);
        sum = if (r - 1 - j).is_multiple_of(2) { sum + term } else { sum - term };
        binom = binom * T::from_u64((r - 1 - j) as u64) / T::from_u64(j as u64 + 1);
    }
    (1..=r as u64).fold(sum, |acc, i| acc * T::from_u64(i))
}

/// Exact factorial moment and its large-`n` proxy `r! n^(rp) / Γ(rp + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorialMoment {
    pub exact: f64,
    pub asymptotic: f64,
}

pub fn degree_factorial_moment(n: usize, p: f64, r: u32) -> Result<FactorialMoment> {
    BernoulliParams::new(p)?;
    check_size(n)?;
    let exact = with_precision(256, || degree_factorial_moment_in(n, &MpFloat::new(p), r).to_f64());
    let rp = f64::from(r) * p;
    let factorial: f64 = (1..=r).map(f64::from).product();
    let asymptotic = factorial * (n as f64).powf(rp) / RealScalar::gamma(&(rp + 1.0));
    Ok(FactorialMoment { exact, asymptotic })
}

/// `E(P_1), ..., E(P_{n_max})` from
/// `E_n = 2p/(n-1) sum_{k<n} E_k + (1-p)/(n-1) sum_{k<n} E_k E_{n-k}`.
pub fn expected_paths_series_in<T: Scalar>(n_max: usize, p: &T) -> Vec<T> {
    let mut e: Vec<T> = Vec::with_capacity(n_max);
    if n_max == 0 {
        return e;
    }
    e.push(T::one());
    let mut prefix = T::one();
    let two_p = p.clone() + p.clone();
    let q = T::one() - p.clone();
    for n in 2..=n_max {
        let conv = (1..n).fold(T::zero(), |acc, k| acc + e[k - 1].clone() * e[n - k - 1].clone());
        let next = (two_p.clone() * prefix.clone() + q.clone() * conv) / T::from_u64(n as u64 - 1);
        prefix = prefix + next.clone();
        e.push(next);
    }
    e
}

pub fn expected_paths_series(n_max: usize, p: f64) -> Result<Vec<f64>> {
    BernoulliParams::new(p)?;
    Ok(expected_paths_series_in(n_max, &p))
}

/// Value and absolute-term sum of the explicit `E(P_n)` for `p != 1/2`.
fn paths_closed_general<T: Scalar>(n: usize, p: &T) -> (T, T) {
    let slope = p.clone() + p.clone() - T::one();
    let r = p.clone() / slope.clone();
    let mut powers = vec![T::one()];
    for k in 1..n {
        powers.push(powers[k - 1].clone() * r.clone());
    }
    let (mut value, mut magnitude) = (T::zero(), T::zero());
    for j in 0..n {
        let (mut inner, mut inner_abs) = (T::zero(), T::zero());
        let mut c = T::one();
        for (k, power) in powers.iter().enumerate().skip(j) {
            let term = c.clone() * power.clone();
            inner_abs = inner_abs + term.abs();
            inner = inner + term;
            c = c * T::from_u64(k as u64 + 1) / T::from_u64((k + 1 - j) as u64);
        }
        let g = gen_binomial(&(slope.clone() * T::from_u64(j as u64) - T::one()), n - 1);
        magnitude = magnitude + g.abs() * inner_abs;
        let term = g * inner;
        value = if (n + j - 1).is_multiple_of(2) { value + term } else { value - term };
    }
    (value, magnitude)
}

/// Value and error bound of the Bell-polynomial formula at `p = 1/2`.
fn paths_closed_half<T: Scalar>(n: usize) -> (T, T) {
    let harmonics = harmonic_orders::<T>(n - 1, n - 1);
    let mut x = Vec::with_capacity(n.saturating_sub(1));
    let mut factorial = T::one();
    for i in 1..n {
        if i > 1 {
            factorial = factorial * T::from_u64(i as u64 - 1);
        }
        x.push(-(factorial.clone() * harmonics[i - 1].clone()));
    }
    let (b, bound) = bell_with_bound(&x);
    let half = T::from_ratio(1, 2);
    let (mut value, mut magnitude) = (T::zero(), T::zero());
    let mut scale = T::one();
    for k in 0..n {
        let term = b[k].clone() * scale.clone();
        value = if k % 2 == 0 { value + term } else { value - term };
        magnitude = magnitude + bound[k].clone() * scale.clone();
        scale = scale * half.clone();
    }
    (value, magnitude)
}

fn paths_closed_in<T: Scalar>(n: usize, p: &T) -> (T, T) {
    if *p == T::from_ratio(1, 2) {
        paths_closed_half(n)
    } else {
        paths_closed_general(n, p)
    }
}

/// Explicit `E(P_n)` in exact arithmetic.
pub fn expected_paths_closed_exact(n: usize, p: &BigRational) -> Result<BigRational> {
    check_rational(p)?;
    check_size(n)?;
    Ok(paths_closed_in(n, p).0)
}

/// A closed-form value with its cancellation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    pub cancellation_bits: f64,
    pub precision: u32,
}

/// Explicit `E(P_n)`: the Bell-polynomial branch for `p = 1/2` exactly, the
/// double sum otherwise.
pub fn expected_paths_closed(n: usize, p: f64, precision: u32) -> Result<ClosedFormValue> {
    BernoulliParams::new(p)?;
    check_size(n)?;
    if p != 0.5 && (p - 0.5).abs() < 1e-12 {
        log::warn!("p = {p} is within 1e-12 of 1/2; the double sum degenerates there, prefer p = 1/2");
    }
    with_precision(precision, || {
        let (value, magnitude) = paths_closed_in(n, &MpFloat::new(p));
        let cancellation = magnitude.log2_abs() - value.log2_abs();
        let terms = 2.0 * (n as f64).log2() + 1.0;
        let required = (cancellation.max(0.0) + terms + TARGET_BITS).ceil() as u32;
        if precision < required {
            return Err(Error::InsufficientPrecision {
                available: precision,
                required,
                cancellation_bits: cancellation,
            });
        }
        Ok(ClosedFormValue { value: value.to_f64(), cancellation_bits: cancellation, precision })
    })
}

pub fn expected_paths_closed_auto(n: usize, p: f64) -> Result<ClosedFormValue> {
    retry_on_precision(|bits| expected_paths_closed(n, p, bits))
}

/// Exponential growth rate `α_p` of `E(P_n)`; continuous at `p = 1/2`.
pub fn alpha_p(p: f64) -> f64 {
    if p == 0.5 {
        return 1.0 / (1.0 - (-2.0f64).exp());
    }
    // (p/q)^(1/(1-2p)) with p/q = 1 + (2p-1)/q, kept accurate near 1/2.
    let slope = 2.0 * p - 1.0;
    let log_base = (slope / (1.0 - p)).ln_1p();
    1.0 / (1.0 - (-log_base / slope).exp())
}

/// `α_p` in any real scalar type, for residuals that need extra precision.
pub fn alpha_p_in<T: RealScalar>(p: &T) -> T {
    let one = T::one();
    if *p == T::from_ratio(1, 2) {
        return one.clone() / (one - T::from_int(-2).exp());
    }
    let q = one.clone() - p.clone();
    let exponent = one.clone() / (one.clone() - p.clone() - p.clone());
    one.clone() / (one - (p.clone() / q).powf(&exponent))
}

/// Main term `α_p^n / (1 - p)`.
pub fn main_term_in<T: RealScalar>(n: usize, p: &T) -> T {
    pow(alpha_p_in(p), n) / (T::one() - p.clone())
}

/// Leading term of `R_p(n)` for the range of `p`.
pub fn correction_term(n: usize, p: f64) -> f64 {
    let n = n as f64;
    if p < 0.5 {
        -(1.0 - 2.0 * p) / (p * RealScalar::gamma(&(2.0 * p))) * n.powf(2.0 * p - 1.0)
    } else if p == 0.5 {
        -2.0 / n.ln()
    } else {
        -(2.0 * p - 1.0) / (1.0 - p)
    }
}

/// `E(P_n) = α_p^n / (1 - p) + R_p(n)`, split into its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAsymptotics {
    pub alpha: f64,
    /// `α_p^n / (1-p)`; infinite once it leaves the `f64` range.
    pub main_term: f64,
    pub correction: f64,
}

pub fn expected_paths_asymptotic(n: usize, p: f64) -> Result<PathAsymptotics> {
    BernoulliParams::new(p)?;
    if n < 3 {
        return Err(Error::InvalidArgument(format!("asymptotic form needs n >= 3, got {n}")));
    }
    let alpha = alpha_p(p);
    Ok(PathAsymptotics { alpha, main_term: alpha.powi(n as i32) / (1.0 - p), correction: correction_term(n, p) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn helpers() {
        assert_eq!(gen_binomial(&2.5, 0), 1.0);
        assert_eq!(gen_binomial(&(0.3 - 1.0), 1), 0.3 - 1.0);
        assert!((gen_binomial(&2.5f64, 2) - 1.875).abs() < 1e-15);
        assert_eq!(complete_bell::<f64>(&[]), 1.0);
        assert_eq!(complete_bell(&[3.0]), 3.0);
        assert_eq!(complete_bell(&[3.0, 5.0]), 14.0);
        // B_3 = x1^3 + 3 x1 x2 + x3
        assert_eq!(complete_bell(&[2.0, 3.0, 5.0]), 8.0 + 18.0 + 5.0);
        assert_eq!(harmonic::<BigRational>(3, 2), q("49/36"));
        assert_eq!(harmonic::<f64>(0, 1), 0.0);
    }

    #[test]
    fn dp_small_cases() {
        assert_eq!(degree_dist_dp(1, 0.3).unwrap().probabilities(), &[1.0]);
        let d2 = degree_dist_dp(2, 0.3).unwrap();
        assert!((d2.prob(1) - 0.7).abs() < 1e-15 && (d2.prob(2) - 0.3).abs() < 1e-15);
        let d3 = degree_dist_dp_exact(3, &q("1/2")).unwrap();
        assert_eq!(d3.probabilities(), &[q("3/8"), q("3/8"), q("1/4")]);
        assert!(degree_dist_dp(0, 0.5).is_err());
        assert!(degree_dist_dp(3, 1.0).is_err());
    }

    #[test]
    fn closed_forms_small_cases() {
        let p = q("3/10");
        let d2 = degree_dist_closed_exact(2, &p).unwrap();
        assert_eq!(d2.probabilities(), &[q("7/10"), q("3/10")]);
        let l2 = length_dist_closed_exact(2, &p).unwrap();
        assert_eq!(l2.probabilities(), &[q("3/10"), q("7/10")]);
        assert_eq!(length_dist_closed_exact(1, &p).unwrap().probabilities(), &[q("1")]);
        for n in 1..=7 {
            assert!(degree_dist_closed_exact(n, &p).unwrap().same_law(&degree_dist_dp_exact(n, &p).unwrap()));
        }
    }

    #[test]
    fn closed_degree_law_matches_dp_at_ten() {
        let closed = degree_dist_closed_auto(10, 0.5).unwrap();
        let dp = degree_dist_dp(10, 0.5).unwrap();
        assert!(closed.distribution.max_abs_diff(&dp) < 1e-10);
        assert_eq!(closed.cancellation_bits.len(), 10);
    }

    #[test]
    fn low_precision_is_refused_with_a_hint() {
        match degree_dist_closed(150, 0.3, 64) {
            Err(Error::InsufficientPrecision { available: 64, required, cancellation_bits }) => {
                assert!(required > 64);
                assert!(cancellation_bits > 10.0);
                assert!(degree_dist_closed(150, 0.3, required).is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn factorial_moments() {
        assert_eq!(degree_factorial_moment_in(1, &0.3, 1), 1.0);
        let m = degree_factorial_moment(2, 0.3, 1).unwrap();
        assert!((m.exact - 1.3).abs() < 1e-14);
        let p = q("1/4");
        for n in 1..=8 {
            let law = degree_dist_dp_exact(n, &p).unwrap();
            assert_eq!(degree_factorial_moment_in(n, &p, 2), law.factorial_moment(2));
            assert_eq!(degree_factorial_moment_in(n, &p, 3), law.factorial_moment(3));
        }
        assert_eq!(degree_factorial_moment_in(5, &0.5, 0), 1.0);
    }

    #[test]
    fn path_expectations_small_cases() {
        let p = q("2/7");
        let e = expected_paths_series_in(4, &p);
        assert_eq!(e[0], q("1"));
        assert_eq!(e[1], q("9/7"));
        assert_eq!(e[2], q("11/7"));
        for n in 1..=12 {
            assert_eq!(expected_paths_closed_exact(n, &p).unwrap(), expected_paths_series_in(n, &p)[n - 1]);
            let half = q("1/2");
            assert_eq!(expected_paths_closed_exact(n, &half).unwrap(), expected_paths_series_in(n, &half)[n - 1]);
        }
        assert_eq!(expected_paths_closed_exact(2, &q("1/2")).unwrap(), q("3/2"));
    }

    #[test]
    fn closed_paths_in_mpfr() {
        let series = expected_paths_series(6, 0.25).unwrap();
        let closed = expected_paths_closed_auto(6, 0.25).unwrap();
        assert!((closed.value - series[5]).abs() < 1e-10);
        assert_eq!(expected_paths_closed_auto(1, 0.5).unwrap().value, 1.0);
        assert_eq!(expected_paths_closed_auto(1, 0.7).unwrap().value, 1.0);
    }

    #[test]
    fn alpha_is_continuous_at_one_half() {
        let limit = 1.0 / (1.0 - (-2.0f64).exp());
        assert_eq!(alpha_p(0.5), limit);
        assert!((alpha_p(0.5 + 1e-6) - limit).abs() < 1e-9);
        assert!((alpha_p(0.5 - 1e-6) - limit).abs() < 1e-9);
        assert!((alpha_p(0.75) - 1.125).abs() < 1e-14);
        assert!((alpha_p(0.25) - 1.125).abs() < 1e-14);
        let mp = with_precision(200, || alpha_p_in(&MpFloat::new(0.75)).to_f64());
        assert!((mp - 1.125).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_parts() {
        let a = expected_paths_asymptotic(10, 0.75).unwrap();
        assert_eq!(a.correction, -2.0);
        assert!((a.main_term - 1.125f64.powi(10) * 4.0).abs() < 1e-12);
        assert!(expected_paths_asymptotic(2, 0.75).is_err());
        assert!((correction_term(100, 0.5) + 2.0 / 100f64.ln()).abs() < 1e-15);
    }
}
