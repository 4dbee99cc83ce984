//! Exact laws for the binary saturation model.
//!
//! The bivariate generating functions are solved coefficient by coefficient:
//! each new `z^n` coefficient of `F` only needs lower ones, so the ODEs turn
//! into recurrences on polynomials in `v`. Sizes up to
//! [`SeriesConfig::exact_crossover`] run in exact rationals, larger sizes
//! continue in `f64`.

use std::cmp::Ordering;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, Provenance};
use crate::scalar::{with_precision, MpFloat, RealScalar, Scalar};
use crate::Distribution;

/// Truncated power series in `z` whose coefficients are polynomials in `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesInV<T> {
    /// `coeffs[k][m]` is the coefficient of `z^k v^m`.
    coeffs: Vec<Vec<T>>,
}

impl<T: Scalar> SeriesInV<T> {
    /// Zero series known up to and including `z^order`.
    pub fn zero(order: usize) -> SeriesInV<T> {
        SeriesInV { coeffs: vec![Vec::new(); order + 1] }
    }

    pub fn from_coefficients(coeffs: Vec<Vec<T>>) -> SeriesInV<T> {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        SeriesInV { coeffs }
    }

    /// Highest power of `z` carried.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Polynomial in `v` multiplying `z^k`; empty beyond the truncation.
    pub fn coefficient(&self, k: usize) -> &[T] {
        self.coeffs.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn add(&self, other: &SeriesInV<T>) -> SeriesInV<T> {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| poly_add(self.coefficient(k), other.coefficient(k))).collect();
        SeriesInV { coeffs }
    }

    pub fn mul(&self, other: &SeriesInV<T>) -> SeriesInV<T> {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Vec::new(); order + 1];
        for (k, out) in coeffs.iter_mut().enumerate() {
            for i in 0..=k {
                poly_mul_acc(out, self.coefficient(i), other.coefficient(k - i), &T::one());
            }
        }
        SeriesInV { coeffs }
    }

    /// `d/dz`; the truncation order drops by one.
    pub fn derivative(&self) -> SeriesInV<T> {
        let coeffs: Vec<Vec<T>> =
            (1..=self.order()).map(|k| poly_scale(self.coefficient(k), &T::from_u64(k as u64))).collect();
        if coeffs.is_empty() {
            SeriesInV::zero(0)
        } else {
            SeriesInV { coeffs }
        }
    }

    /// `exp` of a series without constant term, via `k e_k = sum_j j f_j e_{k-j}`.
    pub fn exp(&self) -> SeriesInV<T> {
        assert!(self.coefficient(0).iter().all(Zero::is_zero), "exp needs a zero constant term");
        let mut e: Vec<Vec<T>> = vec![vec![T::one()]];
        for k in 1..=self.order() {
            let mut acc = Vec::new();
            for j in 1..=k {
                poly_mul_acc(&mut acc, self.coefficient(j), &e[k - j], &T::from_u64(j as u64));
            }
            e.push(poly_scale(&acc, &(T::one() / T::from_u64(k as u64))));
        }
        SeriesInV { coeffs: e }
    }

    /// Multiplication by `1/(1 - z)`: prefix sums of coefficients.
    pub fn cumulative(&self) -> SeriesInV<T> {
        let mut acc = Vec::new();
        let coeffs = self.coeffs.iter().map(|c| {
            acc = poly_add(&acc, c);
            acc.clone()
        });
        SeriesInV { coeffs: coeffs.collect() }
    }

    /// Multiplication by `v`.
    pub fn shift_v(&self) -> SeriesInV<T> {
        SeriesInV { coeffs: self.coeffs.iter().map(|c| poly_shift(c)).collect() }
    }

    /// Largest coefficient difference over the common range.
    pub fn max_abs_diff(&self, other: &SeriesInV<T>) -> f64 {
        let order = self.order().min(other.order());
        (0..=order)
            .flat_map(|k| {
                let a = self.coefficient(k);
                let b = other.coefficient(k);
                (0..a.len().max(b.len())).map(move |m| {
                    let x = a.get(m).cloned().unwrap_or_else(T::zero);
                    let y = b.get(m).cloned().unwrap_or_else(T::zero);
                    (x - y).abs().to_f64()
                })
            })
            .fold(0.0, f64::max)
    }

    /// Law of `X_n` for a series `F = sum_n P{X_n = m} z^n v^m / n`.
    fn law_at(&self, n: usize) -> Vec<T> {
        poly_scale(self.coefficient(n), &T::from_u64(n as u64))
    }
}

fn poly_add<T: Clone + Zero + Mul<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = out[i].clone() + x.clone();
    }
    for (i, x) in b.iter().enumerate() {
        out[i] = out[i].clone() + x.clone();
    }
    out
}

/// `acc += scale * a * b`.
fn poly_mul_acc<T: Clone + Zero + Mul<Output = T>>(acc: &mut Vec<T>, a: &[T], b: &[T], scale: &T) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if acc.len() < a.len() + b.len() - 1 {
        acc.resize(a.len() + b.len() - 1, T::zero());
    }
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let xs = x.clone() * scale.clone();
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                acc[i + j] = acc[i + j].clone() + xs.clone() * y.clone();
            }
        }
    }
}

fn poly_scale<T: Clone + Zero + Mul<Output = T>>(a: &[T], c: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Drops trailing coefficients that have underflowed; exact types keep all.
fn trim_underflow<T: Scalar>(mut a: Vec<T>) -> Vec<T> {
    if !T::EXACT {
        while a.last().is_some_and(|c| c.to_f64().abs() < 1e-300) {
            a.pop();
        }
    }
    a
}

fn poly_shift<T: Clone + Zero + Mul<Output = T>>(a: &[T]) -> Vec<T> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(T::zero());
    out.extend_from_slice(a);
    out
}

/// Where exact arithmetic hands over to `f64`; 0 disables the exact stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesConfig {
    pub exact_crossover: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { exact_crossover: 60 }
    }
}

/// Online solver state: size laws `x[n]` (`x[0]` unused) and the auxiliary
/// series `y[k]`, both as polynomials in `v`.
#[derive(Clone)]
struct Online<T> {
    x: Vec<Vec<T>>,
    y: Vec<Vec<T>>,
    /// Running sum used by the next step.
    prefix: Vec<T>,
}

impl<T: Scalar> Online<T> {
    fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Online<U> {
        let conv = |p: &Vec<T>| p.iter().map(&f).collect::<Vec<U>>();
        Online {
            x: self.x.iter().map(conv).collect(),
            y: self.y.iter().map(conv).collect(),
            prefix: conv(&self.prefix),
        }
    }
}

/// Leftmost length: `F'' = v e^F / (1 - z)`, `F(0) = 0`, `F'(0) = v`.
/// With `x[n] = n [z^n] F` and `y = e^F` this is
/// `x[n] = v/(n-1) sum_{k<=n-2} y[k]`, `k y[k] = sum_{j<=k} x[j] y[k-j]`.
fn length_start<T: Scalar>() -> Online<T> {
    Online { x: vec![Vec::new(), vec![T::zero(), T::one()]], y: vec![vec![T::one()]], prefix: vec![T::one()] }
}

fn length_extend<T: Scalar>(state: &mut Online<T>, n_max: usize) {
    while state.x.len() <= n_max {
        let n = state.x.len();
        // y[n-2] is the newest term the next size depends on.
        let k = n - 2;
        if k >= 1 && state.y.len() == k {
            let mut acc = Vec::new();
            for j in 1..=k {
                poly_mul_acc(&mut acc, &state.x[j], &state.y[k - j], &T::one());
            }
            let yk = trim_underflow(poly_scale(&acc, &(T::one() / T::from_u64(k as u64))));
            state.prefix = poly_add(&state.prefix, &yk);
            state.y.push(yk);
        }
        let next = trim_underflow(poly_scale(&poly_shift(&state.prefix), &(T::one() / T::from_u64(n as u64 - 1))));
        state.x.push(next);
    }
}

/// Sink degree: `F'' = A^2`, `A' = F'/(1 - z)`, `A(0) = v`, `F(0) = 0`,
/// `F'(0) = v`. With `x[n] = n [z^n] F` and `y[k] = [z^k] A`:
/// `x[n] = 1/(n-1) sum_{i<=n-2} y[i] y[n-2-i]`, `k y[k] = sum_{j<=k} x[j]`.
fn degree_start<T: Scalar>() -> Online<T> {
    let v = vec![T::zero(), T::one()];
    Online { x: vec![Vec::new(), v.clone()], y: vec![v], prefix: Vec::new() }
}

fn degree_extend<T: Scalar>(state: &mut Online<T>, n_max: usize) {
    while state.x.len() <= n_max {
        let n = state.x.len();
        let k = n - 2;
        if k >= 1 && state.y.len() == k {
            // prefix holds x[1] + ... + x[k].
            state.prefix = poly_add(&state.prefix, &state.x[k]);
            let yk = trim_underflow(poly_scale(&state.prefix, &(T::one() / T::from_u64(k as u64))));
            state.y.push(yk);
        }
        let mut conv = Vec::new();
        for i in 0..=k {
            poly_mul_acc(&mut conv, &state.y[i], &state.y[k - i], &T::one());
        }
        state.x.push(trim_underflow(poly_scale(&conv, &(T::one() / T::from_u64(n as u64 - 1)))));
    }
}

/// Exact state after `n_max` sizes, computed on integer counts: with
/// `X[n] = (n-1)! x[n]` and `Y[k] = k! y[k]` both recurrences only add and
/// multiply integers, which is far cheaper than normalising rationals.
fn length_exact_state(n_max: usize) -> Online<BigRational> {
    let one = vec![BigUint::one()];
    let mut x: Vec<Vec<BigUint>> = vec![Vec::new(), vec![BigUint::zero(), BigUint::one()]];
    let mut y: Vec<Vec<BigUint>> = vec![one.clone()];
    // q = m! sum_{k<=m} Y[k] / k! with m = y.len() - 1.
    let mut q = one;
    for n in 2..=n_max {
        let k = n - 2;
        if k >= 1 {
            let mut acc = Vec::new();
            let mut binom = BigUint::one();
            for j in 1..=k {
                // binom = C(k-1, j-1)
                poly_mul_acc(&mut acc, &x[j], &y[k - j], &binom);
                binom = binom * BigUint::from(k - j) / BigUint::from(j);
            }
            q = poly_add(&poly_scale(&q, &BigUint::from(k)), &acc);
            y.push(acc);
        }
        x.push(poly_shift(&q));
    }
    let fact = factorials(n_max);
    normalise(&x, &y, &fact, Recurrence::Length)
}

fn degree_exact_state(n_max: usize) -> Online<BigRational> {
    let v = vec![BigUint::zero(), BigUint::one()];
    let mut x: Vec<Vec<BigUint>> = vec![Vec::new(), v.clone()];
    let mut y: Vec<Vec<BigUint>> = vec![v];
    // p = (k-1)! sum_{j<=k} X[j] / (j-1)!, which is Y[k].
    let mut p: Vec<BigUint> = Vec::new();
    for n in 2..=n_max {
        let k = n - 2;
        if k >= 1 {
            p = poly_add(&poly_scale(&p, &BigUint::from(k - 1)), &x[k]);
            y.push(p.clone());
        }
        let mut conv = Vec::new();
        let mut binom = BigUint::one();
        for i in 0..=k {
            // binom = C(k, i)
            poly_mul_acc(&mut conv, &y[i], &y[k - i], &binom);
            binom = binom * BigUint::from(k - i) / BigUint::from(i + 1);
        }
        x.push(conv);
    }
    let fact = factorials(n_max);
    normalise(&x, &y, &fact, Recurrence::Degree)
}

#[derive(Clone, Copy)]
enum Recurrence {
    Length,
    Degree,
}

fn factorials(n: usize) -> Vec<BigUint> {
    let mut f = vec![BigUint::one()];
    for k in 1..=n.max(1) {
        let next = &f[k - 1] * BigUint::from(k);
        f.push(next);
    }
    f
}

/// Divides the counts back to probabilities and rebuilds the running sum the
/// generic solver expects at this point.
fn normalise(x: &[Vec<BigUint>], y: &[Vec<BigUint>], fact: &[BigUint], kind: Recurrence) -> Online<BigRational> {
    let div = |poly: &Vec<BigUint>, d: &BigUint| -> Vec<BigRational> {
        poly.iter().map(|c| BigRational::new(BigInt::from(c.clone()), BigInt::from(d.clone()))).collect()
    };
    let xs: Vec<Vec<BigRational>> =
        x.iter().enumerate().map(|(n, p)| if n == 0 { Vec::new() } else { div(p, &fact[n - 1]) }).collect();
    let ys: Vec<Vec<BigRational>> = y.iter().enumerate().map(|(k, p)| div(p, &fact[k])).collect();
    let prefix = match kind {
        Recurrence::Length => ys.iter().fold(Vec::new(), |acc, p| poly_add(&acc, p)),
        Recurrence::Degree => xs[1..ys.len()].iter().fold(Vec::new(), |acc, p| poly_add(&acc, p)),
    };
    Online { x: xs, y: ys, prefix }
}

fn to_series<T: Scalar>(state: &Online<T>, n_max: usize) -> SeriesInV<T> {
    let mut coeffs = vec![Vec::new()];
    for n in 1..=n_max {
        coeffs.push(poly_scale(&state.x[n], &(T::one() / T::from_u64(n as u64))));
    }
    SeriesInV { coeffs }
}

type ExactState = fn(usize) -> Online<BigRational>;
type ExtendFloat = fn(&mut Online<f64>, usize);

/// Exact up to the crossover, `f64` after it; a crossover of 0 is `f64` throughout.
fn solve_mixed(
    n_max: usize,
    config: SeriesConfig,
    start: fn() -> Online<f64>,
    exact: ExactState,
    float: ExtendFloat,
) -> SeriesInV<f64> {
    let mut state = match config.exact_crossover {
        0 => start(),
        c => exact(n_max.min(c)).convert(Scalar::to_f64),
    };
    float(&mut state, n_max);
    to_series(&state, n_max)
}

fn laws_from(series: &SeriesInV<f64>) -> Result<Vec<Distribution>> {
    (1..=series.order())
        .map(|n| {
            let law = series.law_at(n);
            let first = law.iter().position(|p| *p != 0.0).unwrap_or(0);
            let hi = law.iter().rposition(|p| *p != 0.0).unwrap_or(0);
            DiscreteDistribution::new(first as u64, law[first..=hi].to_vec(), Provenance::SeriesExtraction)
        })
        .collect()
}

fn exact_laws_from(series: &SeriesInV<BigRational>) -> Result<Vec<DiscreteDistribution<BigRational>>> {
    (1..=series.order())
        .map(|n| DiscreteDistribution::new(0, series.law_at(n), Provenance::SeriesExtraction).map(|d| d.trimmed()))
        .collect()
}

/// `F(z, v) = sum P{L_n = m} z^n v^m / n` up to `z^n_max`, exact.
pub fn length_series_exact(n_max: usize) -> SeriesInV<BigRational> {
    to_series(&length_exact_state(n_max.max(1)), n_max.max(1))
}

/// Laws of the leftmost path length for `n = 1..=n_max`.
pub fn length_dist_series(n_max: usize) -> Result<Vec<Distribution>> {
    length_dist_series_with(n_max, SeriesConfig::default())
}

pub fn length_dist_series_with(n_max: usize, config: SeriesConfig) -> Result<Vec<Distribution>> {
    if n_max == 0 {
        return Err(Error::EmptySize);
    }
    laws_from(&solve_mixed(n_max, config, length_start, length_exact_state, length_extend))
}

pub fn length_dist_series_exact(n_max: usize) -> Result<Vec<DiscreteDistribution<BigRational>>> {
    if n_max == 0 {
        return Err(Error::EmptySize);
    }
    exact_laws_from(&length_series_exact(n_max))
}

/// `F(z, v) = sum P{D_n = m} z^n v^m / n` for the sink degree, exact.
pub fn sink_degree_series_exact(n_max: usize) -> SeriesInV<BigRational> {
    to_series(&degree_exact_state(n_max.max(1)), n_max.max(1))
}

/// The auxiliary forest series `A(z, v)` of the sink-degree system, exact.
pub fn sink_degree_forest_series_exact(n_max: usize) -> SeriesInV<BigRational> {
    let state = degree_exact_state(n_max + 2);
    SeriesInV { coeffs: state.y[..=n_max].to_vec() }
}

/// Laws of the sink degree for `n = 1..=n_max`.
pub fn sink_degree_dist_series(n_max: usize) -> Result<Vec<Distribution>> {
    sink_degree_dist_series_with(n_max, SeriesConfig::default())
}

pub fn sink_degree_dist_series_with(n_max: usize, config: SeriesConfig) -> Result<Vec<Distribution>> {
    if n_max == 0 {
        return Err(Error::EmptySize);
    }
    laws_from(&solve_mixed(n_max, config, degree_start, degree_exact_state, degree_extend))
}

pub fn sink_degree_dist_series_exact(n_max: usize) -> Result<Vec<DiscreteDistribution<BigRational>>> {
    if n_max == 0 {
        return Err(Error::EmptySize);
    }
    exact_laws_from(&sink_degree_series_exact(n_max))
}

/// `φ̃ = (√5 - 1)/2`, the growth exponent of the leftmost path.
pub fn phi_tilde<T: RealScalar>() -> T {
    (T::from_int(5).sqrt() - T::one()) / T::from_int(2)
}

/// `C(k + c, k) = prod_{i<=k} (1 + c/i)`; the factors stay near 1, so large
/// `k` neither overflows nor cancels.
fn shifted_binomial<T: Scalar>(c: &T, k: usize) -> T {
    (1..=k as u64).fold(T::one(), |acc, i| acc * (T::one() + c.clone() / T::from_u64(i)))
}

/// `E(L_n) = n ((3+√5)/(2√5) C(n+√5/2-3/2, n) - (3-√5)/(2√5) C(n-√5/2-3/2, n))`.
pub fn expected_length_closed_in<T: RealScalar>(n: usize) -> T {
    let s5 = T::from_int(5).sqrt();
    let two = T::from_int(2);
    let three = T::from_int(3);
    let half_shift = three.clone() / two.clone();
    let a = (three.clone() + s5.clone()) / (two.clone() * s5.clone());
    let b = (three - s5.clone()) / (two.clone() * s5.clone());
    let up = shifted_binomial(&(s5.clone() / two.clone() - half_shift.clone()), n);
    let down = shifted_binomial(&(-(s5 / two) - half_shift), n);
    T::from_u64(n as u64) * (a * up - b * down)
}

pub fn expected_length_closed(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySize);
    }
    Ok(expected_length_closed_in::<f64>(n))
}

/// Leading behaviour `c̃_1 n^φ̃ / Γ(φ̃ + 1)` with `c̃_1 = (1+√5)/(2√5)`.
///
/// The exact formula's leading coefficient is `(3+√5)/(2√5) / Γ(φ̃)`, which
/// equals this; the argument of Γ is `φ̃ + 1`, not `φ̃`.
pub fn expected_length_asymptotic(n: usize) -> f64 {
    let phi: f64 = phi_tilde();
    let c1 = (1.0 + 5f64.sqrt()) / (2.0 * 5f64.sqrt());
    c1 * (n as f64).powf(phi) / RealScalar::gamma(&(phi + 1.0))
}

/// `E(D_n) = (1+√2)/2 C(n+√2-2, n-1) - (√2-1)/2 C(n-√2-2, n-1)`.
pub fn expected_sink_degree_closed_in<T: RealScalar>(n: usize) -> T {
    let s2 = T::from_int(2).sqrt();
    let two = T::from_int(2);
    let up = shifted_binomial(&(s2.clone() - T::one()), n - 1);
    let down = shifted_binomial(&(-s2.clone() - T::one()), n - 1);
    (T::one() + s2.clone()) / two.clone() * up - (s2 - T::one()) / two * down
}

/// Exact mean and the companion `(1+√2)/2 n^(√2-1) / Γ(√2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkDegreeMean {
    pub exact: f64,
    pub asymptotic: f64,
}

pub fn expected_sink_degree_closed(n: usize) -> Result<SinkDegreeMean> {
    if n == 0 {
        return Err(Error::EmptySize);
    }
    let s2 = 2f64.sqrt();
    Ok(SinkDegreeMean {
        exact: expected_sink_degree_closed_in::<f64>(n),
        asymptotic: (1.0 + s2) / 2.0 * (n as f64).powf(s2 - 1.0) / RealScalar::gamma(&s2),
    })
}

/// `E_n = E(P_n)` and `Ẽ_n`, the mean path count of a forest of order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryExpectationTables<T> {
    /// `e[n]` for `n = 0..=n_max`, with `e[0] = 0`.
    pub e: Vec<T>,
    /// `e_tilde[n]` for `n = 0..=n_max`, with `e_tilde[0] = 1`.
    pub e_tilde: Vec<T>,
}

/// `E_n = 2/(n-1) sum_{k<=n-2} Ẽ_k`, `Ẽ_n = (1/n) sum_{k=1}^n E_k Ẽ_{n-k}`.
pub fn expected_paths_tables_in<T: Scalar>(n_max: usize) -> BinaryExpectationTables<T> {
    let mut e = vec![T::zero(), T::one()];
    let mut et = vec![T::one(), T::one()];
    let mut prefix = T::one();
    for n in 2..=n_max.max(1) {
        let en = T::from_int(2) * prefix.clone() / T::from_u64(n as u64 - 1);
        e.push(en);
        let conv = (1..=n).fold(T::zero(), |acc, k| acc + e[k].clone() * et[n - k].clone());
        let etn = conv / T::from_u64(n as u64);
        prefix = prefix + et[n - 1].clone();
        et.push(etn);
    }
    e.truncate(n_max + 1);
    et.truncate(n_max + 1);
    BinaryExpectationTables { e, e_tilde: et }
}

pub fn expected_paths_tables(n_max: usize) -> BinaryExpectationTables<f64> {
    expected_paths_tables_in(n_max)
}

/// Second-order coefficient: `E_n = (2/ρ^n)(1 - K ρ²/((ρ-1)²(n-1)(n-2)) + …)`.
///
/// Matching the expansion against the exact tables gives `K = 1/3`; with
/// `K = 1` the relative error at `n = 200` is above `1e-3`.
pub const SECOND_ORDER_FACTOR: f64 = 1.0 / 3.0;

/// Two-term asymptotic value of `E(P_n)` for a given singularity `rho`.
pub fn expected_paths_asymptotic(n: usize, rho: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("asymptotic form needs n >= 3, got {n}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {rho}")));
    }
    let nn = n as f64;
    let second = SECOND_ORDER_FACTOR * rho * rho / ((rho - 1.0).powi(2) * (nn - 1.0) * (nn - 2.0));
    Ok(2.0 / rho.powf(nn) * (1.0 - second))
}

/// A singularity estimate from coefficient ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoEstimate {
    pub rho: f64,
    pub uncertainty: f64,
    /// The sizes whose ratios `c_n / c_{n+1}` were extrapolated.
    pub sizes: Vec<usize>,
}

/// Polynomial extrapolation to `h = 0` through `(h_i, y_i)` (Neville).
fn extrapolate(points: &[(f64, f64)]) -> f64 {
    let mut y: Vec<f64> = points.iter().map(|p| p.1).collect();
    for level in 1..points.len() {
        for i in 0..points.len() - level {
            let (hi, hj) = (points[i].0, points[i + level].0);
            y[i] = (hj * y[i] - hi * y[i + 1]) / (hj - hi);
        }
    }
    y[0]
}

/// Radius of convergence from `coeffs[i] = c_{i+1}`: the ratios
/// `c_n / c_{n+1}` are extrapolated in `1/n` from five sizes spread over the
/// upper half of the table. The uncertainty is the spread between the
/// five-point and four-point extrapolations and the same estimate on the
/// table cut to two thirds.
pub fn estimate_singularity<T: Scalar>(coeffs: &[T]) -> Result<RhoEstimate> {
    let n_max = coeffs.len();
    if n_max < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 coefficients, got {n_max}")));
    }
    let ratio = |n: usize| (coeffs[n - 1].clone() / coeffs[n].clone()).to_f64();
    let run = |top: usize| -> (f64, f64, Vec<usize>) {
        let sizes: Vec<usize> =
            [1.0, 0.875, 0.75, 0.625, 0.5].iter().map(|f| ((top - 1) as f64 * f) as usize).collect();
        let points: Vec<(f64, f64)> = sizes.iter().map(|&n| (1.0 / n as f64, ratio(n))).collect();
        let five = extrapolate(&points);
        let four = extrapolate(&points[..4]);
        (five, (five - four).abs(), sizes)
    };
    let (rho, spread, sizes) = run(n_max);
    let (rho_short, _, _) = run(n_max * 2 / 3);
    let uncertainty = spread.max((rho - rho_short).abs());

    // The tail of the ratio sequence must settle monotonically.
    let tail: Vec<f64> = (n_max / 2..n_max).map(ratio).collect();
    // Steps below rounding noise count as flat.
    let noise = 64.0 * f64::EPSILON * rho.abs();
    let step = |w: &[f64]| if (w[1] - w[0]).abs() <= noise { Ordering::Equal } else { w[1].total_cmp(&w[0]) };
    let steps: Vec<Ordering> = tail.windows(2).map(step).filter(|o| *o != Ordering::Equal).collect();
    let monotone = steps.windows(2).all(|w| w[0] == w[1]);
    if !rho.is_finite() || !monotone || uncertainty > 1e-2 * rho.abs() {
        return Err(Error::NonConvergent(format!(
            "ratio estimate {rho} with spread {uncertainty:e}; tail monotone: {monotone}; last ratios {:?}",
            &tail[tail.len().saturating_sub(3)..]
        )));
    }
    Ok(RhoEstimate { rho, uncertainty, sizes })
}

/// Estimates `ρ`, the dominant singularity of `sum E(P_n) z^n`, from the
/// tables up to `n_max` computed at 256 bits.
pub fn estimate_rho(n_max: usize) -> Result<RhoEstimate> {
    if n_max < 100 {
        return Err(Error::InvalidArgument(format!("estimate_rho needs n_max >= 100, got {n_max}")));
    }
    with_precision(256, || {
        let tables = expected_paths_tables_in::<MpFloat>(n_max);
        estimate_singularity(&tables.e[1..])
    })
}
