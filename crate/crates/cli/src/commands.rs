use std::fs;
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

use splab::bernoulli::{
    degree_dist_closed_auto, degree_dist_closed_exact, degree_dist_dp, degree_dist_dp_exact, expected_paths_asymptotic,
    expected_paths_closed_auto, expected_paths_closed_exact, expected_paths_series, expected_paths_series_in,
    length_dist_closed_auto, length_dist_closed_exact,
};
use splab::binary::{
    estimate_rho, expected_length_asymptotic, expected_length_closed, expected_paths_tables, expected_paths_tables_in,
    expected_sink_degree_closed, length_dist_series, length_dist_series_exact, sink_degree_dist_series,
    sink_degree_dist_series_exact, SeriesConfig,
};
use splab::limits::{binary_degree_moments, binary_length_moments, ml_density, ml_moment, Quantity};
use splab::model::HistoryFile;
use splab::montecarlo::{chi_square_gof, compare_scaled_limit, run_trials, EmpiricalLaw, Quantities, TrialBatchResult};
use splab::oracle::{enumerate_with, history_count, JointDistributionTable, OracleConfig, Parameter};
use splab::quadrature::QuadratureConfig;
use splab::stats::ParameterSample;
use splab::{grow, Distribution, ExactDistribution, Model, ModelKind, Provenance, RngStream, Scalar};

use crate::args::*;

/// Version of every JSON document the CLI writes itself.
const SCHEMA_VERSION: u32 = 1;
/// Pooling threshold of the chi-square tests.
const MIN_EXPECTED: f64 = 5.0;

pub enum Outcome {
    Success,
    ValidationFailed,
}

type CliResult<T> = Result<T, String>;

fn err(e: splab::Error) -> String {
    e.to_string()
}

pub fn run(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Grow(a) => grow_cmd(a).map(|_| Outcome::Success),
        Command::Exact(ExactCommand::Bernoulli(a)) => exact_bernoulli(a).map(|_| Outcome::Success),
        Command::Exact(ExactCommand::Binary(a)) => exact_binary(a).map(|_| Outcome::Success),
        Command::Oracle(a) => oracle_cmd(a).map(|_| Outcome::Success),
        Command::Simulate(a) => simulate(a).map(|_| Outcome::Success),
        Command::Validate(a) => validate(a),
        Command::Limits(a) => limits(a).map(|_| Outcome::Success),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    emit(out, &text)
}

/// Shortest representation that reads back to the same `f64`.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn ratio(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn model_of(opts: &ModelOpts) -> CliResult<Model> {
    match (opts.model, &opts.p) {
        (ModelArg::Bernoulli, Some(p)) => Model::bernoulli(p.value).map_err(err),
        (ModelArg::Bernoulli, None) => Err("--p is required for the bernoulli model".into()),
        (ModelArg::Binary, None) => Ok(Model::Binary),
        (ModelArg::Binary, Some(_)) => Err("--p applies to the bernoulli model only".into()),
    }
}

fn check_n(n: usize) -> CliResult<()> {
    if n == 0 {
        Err("--n must be at least 1".into())
    } else {
        Ok(())
    }
}

fn grow_cmd(a: GrowArgs) -> CliResult<()> {
    let model = model_of(&a.model)?;
    check_n(a.n)?;
    let mut rng = RngStream::new(a.seed, a.stream);
    let grown = grow(model, a.n, &mut rng).map_err(err)?;
    match a.format {
        GrowFormat::Json => {
            // A history file with the schema version alongside; it still loads as one.
            let mut v = serde_json::to_value(HistoryFile::from(&grown.history)).map_err(|e| e.to_string())?;
            v["schema_version"] = json!(SCHEMA_VERSION);
            emit_json(&a.out, &v)
        }
        GrowFormat::Dot => emit(&a.out, &grown.network.to_dot()),
        GrowFormat::Csv => {
            let sample = ParameterSample::of(&grown.network, Some(&mut rng));
            emit(&a.out, &format!("{}\n{}\n", ParameterSample::CSV_HEADER, sample.csv_row()))
        }
    }
}

/// A law as printed: `f64` probabilities, exact strings when known.
struct LawOut {
    lo: u64,
    probabilities: Vec<f64>,
    exact: Option<Vec<String>>,
}

impl LawOut {
    fn float(d: &Distribution) -> LawOut {
        LawOut { lo: d.lo(), probabilities: d.probabilities().to_vec(), exact: None }
    }

    fn exact(d: &ExactDistribution) -> LawOut {
        let d = d.trimmed();
        LawOut {
            lo: d.lo(),
            probabilities: d.probabilities().iter().map(Scalar::to_f64).collect(),
            exact: Some(d.probabilities().iter().map(ratio).collect()),
        }
    }

    fn render(&self, format: TableFormat, header: Value) -> CliResult<String> {
        match format {
            TableFormat::Csv => {
                let mut s = String::from("m,probability\n");
                for (i, p) in self.probabilities.iter().enumerate() {
                    s.push_str(&format!("{},{}\n", self.lo + i as u64, num(*p)));
                }
                Ok(s)
            }
            TableFormat::Json => {
                let rows: Vec<Value> = self
                    .probabilities
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let mut row = json!({ "m": self.lo + i as u64, "probability": p });
                        if let Some(exact) = &self.exact {
                            row["exact"] = json!(exact[i]);
                        }
                        row
                    })
                    .collect();
                let mut v = header;
                v["rows"] = json!(rows);
                Ok(serde_json::to_string_pretty(&v).map_err(|e| e.to_string())? + "\n")
            }
        }
    }
}

/// `(n, expectation)` rows.
fn render_expectations(rows: &[(usize, f64)], format: TableFormat, header: Value) -> CliResult<String> {
    match format {
        TableFormat::Csv => {
            let mut s = String::from("n,expectation\n");
            for (n, e) in rows {
                s.push_str(&format!("{n},{}\n", num(*e)));
            }
            Ok(s)
        }
        TableFormat::Json => {
            let mut v = header;
            v["rows"] = json!(rows.iter().map(|(n, e)| json!({ "n": n, "expectation": e })).collect::<Vec<_>>());
            Ok(serde_json::to_string_pretty(&v).map_err(|e| e.to_string())? + "\n")
        }
    }
}

fn exact_bernoulli(a: ExactBernoulliArgs) -> CliResult<()> {
    check_n(a.n)?;
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "model": "bernoulli",
        "quantity": format!("{:?}", a.quantity).to_lowercase(),
        "method": format!("{:?}", a.method).to_lowercase(),
        "n": a.n,
        "p": a.p.text,
    });
    let p = a.p.value;
    let text = match a.quantity {
        BernoulliQuantity::Degree | BernoulliQuantity::Length => {
            let length = a.quantity == BernoulliQuantity::Length;
            let law = match (a.method, &a.p.exact) {
                (BernoulliMethod::Dp, Some(q)) => {
                    let q = if length { BigRational::one() - q } else { q.clone() };
                    LawOut::exact(&degree_dist_dp_exact(a.n, &q).map_err(err)?)
                }
                (BernoulliMethod::Dp, None) => {
                    LawOut::float(&degree_dist_dp(a.n, if length { 1.0 - p } else { p }).map_err(err)?)
                }
                (BernoulliMethod::Closed, Some(q)) => {
                    let d = if length { length_dist_closed_exact(a.n, q) } else { degree_dist_closed_exact(a.n, q) };
                    LawOut::exact(&d.map_err(err)?)
                }
                (BernoulliMethod::Closed, None) => {
                    let law = if length { length_dist_closed_auto(a.n, p) } else { degree_dist_closed_auto(a.n, p) };
                    LawOut::float(&law.map_err(err)?.distribution)
                }
                (m, _) => return Err(format!("method {m:?} gives no law; use dp or closed").to_lowercase()),
            };
            law.render(a.format, header)?
        }
        BernoulliQuantity::Paths => match a.method {
            BernoulliMethod::Dp | BernoulliMethod::Series => {
                let values: Vec<f64> = match &a.p.exact {
                    Some(q) => expected_paths_series_in(a.n, q).iter().map(Scalar::to_f64).collect(),
                    None => expected_paths_series(a.n, p).map_err(err)?,
                };
                let rows: Vec<(usize, f64)> = values.into_iter().enumerate().map(|(i, e)| (i + 1, e)).collect();
                render_expectations(&rows, a.format, header)?
            }
            BernoulliMethod::Closed => {
                let value = match &a.p.exact {
                    Some(q) => Scalar::to_f64(&expected_paths_closed_exact(a.n, q).map_err(err)?),
                    None => expected_paths_closed_auto(a.n, p).map_err(err)?.value,
                };
                render_expectations(&[(a.n, value)], a.format, header)?
            }
            BernoulliMethod::Asymptotic => {
                let asym = expected_paths_asymptotic(a.n, p).map_err(err)?;
                let mut header = header;
                header["alpha"] = json!(asym.alpha);
                header["main_term"] = json!(asym.main_term);
                header["correction"] = json!(asym.correction);
                render_expectations(&[(a.n, asym.main_term + asym.correction)], a.format, header)?
            }
        },
    };
    emit(&a.out, &text)
}

fn exact_binary(a: ExactBinaryArgs) -> CliResult<()> {
    if a.estimate_rho {
        let est = estimate_rho(a.nmax).map_err(err)?;
        let text = match a.format {
            TableFormat::Csv => format!("rho,uncertainty\n{},{}\n", num(est.rho), num(est.uncertainty)),
            TableFormat::Json => {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "nmax": a.nmax,
                    "rho": est.rho,
                    "uncertainty": est.uncertainty,
                    "sizes": est.sizes,
                });
                serde_json::to_string_pretty(&v).map_err(|e| e.to_string())? + "\n"
            }
        };
        return emit(&a.out, &text);
    }
    let (quantity, n) = (a.quantity.expect("required by clap"), a.n.expect("required by clap"));
    check_n(n)?;
    let method = a.method.unwrap_or(match quantity {
        BinaryQuantity::Paths => BinaryMethod::Tables,
        _ => BinaryMethod::Series,
    });
    let header = json!({
        "schema_version": SCHEMA_VERSION,
        "model": "binary",
        "quantity": format!("{quantity:?}").to_lowercase(),
        "method": format!("{method:?}").to_lowercase(),
        "n": n,
    });
    let exact_limit = SeriesConfig::default().exact_crossover;
    let text = match (quantity, method) {
        (BinaryQuantity::Length | BinaryQuantity::Sinkdeg, BinaryMethod::Series) => {
            let length = quantity == BinaryQuantity::Length;
            let law = if n <= exact_limit {
                let laws = if length { length_dist_series_exact(n) } else { sink_degree_dist_series_exact(n) };
                LawOut::exact(&laws.map_err(err)?[n - 1])
            } else {
                let laws = if length { length_dist_series(n) } else { sink_degree_dist_series(n) };
                LawOut::float(&laws.map_err(err)?[n - 1])
            };
            law.render(a.format, header)?
        }
        (BinaryQuantity::Length, BinaryMethod::Closed) => {
            render_expectations(&[(n, expected_length_closed(n).map_err(err)?)], a.format, header)?
        }
        (BinaryQuantity::Length, BinaryMethod::Asymptotic) => {
            render_expectations(&[(n, expected_length_asymptotic(n))], a.format, header)?
        }
        (BinaryQuantity::Sinkdeg, BinaryMethod::Closed | BinaryMethod::Asymptotic) => {
            let mean = expected_sink_degree_closed(n).map_err(err)?;
            let value = if method == BinaryMethod::Closed { mean.exact } else { mean.asymptotic };
            render_expectations(&[(n, value)], a.format, header)?
        }
        (BinaryQuantity::Paths, BinaryMethod::Tables | BinaryMethod::Series) => {
            let tables = expected_paths_tables(n);
            let rows: Vec<(usize, f64)> = (1..=n).map(|k| (k, tables.e[k])).collect();
            render_expectations(&rows, a.format, header)?
        }
        (BinaryQuantity::Paths, BinaryMethod::Asymptotic) => {
            let est = estimate_rho(a.nmax).map_err(err)?;
            let value = splab::binary::expected_paths_asymptotic(n, est.rho).map_err(err)?;
            let mut header = header;
            header["rho"] = json!(est.rho);
            render_expectations(&[(n, value)], a.format, header)?
        }
        (q, m) => return Err(format!("method {m:?} is not available for {q:?}").to_lowercase()),
    };
    emit(&a.out, &text)
}

fn oracle_cmd(a: OracleArgs) -> CliResult<()> {
    let p = match (&a.p, a.p_num, a.p_den) {
        (Some(p), _, _) => Some(p.rational().ok_or_else(|| format!("cannot read {} as an exact rational", p.text))?),
        (None, Some(num), Some(den)) => {
            if den == 0 {
                return Err("--p-den must be non-zero".into());
            }
            Some(BigRational::new(num.into(), den.into()))
        }
        _ => None,
    };
    let kind = match a.model {
        ModelArg::Bernoulli => ModelKind::Bernoulli,
        ModelArg::Binary => ModelKind::Binary,
    };
    match (kind, &p) {
        (ModelKind::Bernoulli, None) => {
            return Err("--p (or --p-num/--p-den) is required for the bernoulli model".into())
        }
        (ModelKind::Binary, Some(_)) => return Err("--p applies to the bernoulli model only".into()),
        (ModelKind::Bernoulli, Some(q)) if !(q > &BigRational::zero() && q < &BigRational::one()) => {
            return Err(format!("p must lie strictly between 0 and 1, got {}", ratio(q)));
        }
        _ => {}
    }
    check_n(a.n)?;
    let mut config = OracleConfig::default();
    if let Some(cap) = a.cap {
        config.bernoulli_cap = cap;
        config.binary_cap = cap;
    }
    let table = enumerate_with(kind, a.n, p.as_ref(), config).map_err(err)?;
    emit(&a.out, &(table.to_json().map_err(err)? + "\n"))
}

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let model = model_of(&a.model)?;
    check_n(a.n)?;
    let quantities: Quantities = a.quantities.parse().map_err(err)?;
    let result = run_trials(model, a.n, a.trials, a.seed, quantities).map_err(err)?;
    emit(&a.out, &(result.to_json().map_err(err)? + "\n"))
}

/// One line of a validation report.
struct Check {
    name: String,
    passed: bool,
    detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Value) -> Check {
        Check { name: name.into(), passed, detail }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "name": self.name, "passed": self.passed });
        if let (Value::Object(target), Value::Object(extra)) = (&mut v, &self.detail) {
            target.extend(extra.clone());
        }
        v
    }
}

fn validate(a: ValidateArgs) -> CliResult<Outcome> {
    let text = fs::read_to_string(&a.input).map_err(|e| format!("cannot read {}: {e}", a.input.display()))?;
    let checks = match a.against {
        Against::Oracle => validate_oracle(&JointDistributionTable::from_json(&text).map_err(err)?)?,
        Against::Dp | Against::Closed => {
            validate_laws(&TrialBatchResult::from_json(&text).map_err(err)?, a.against, a.alpha)?
        }
        Against::Limit => validate_limit(&TrialBatchResult::from_json(&text).map_err(err)?, a.tolerance)?,
    };
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "against": format!("{:?}", a.against).to_lowercase(),
        "passed": passed,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    emit_json(&a.out, &report)?;
    Ok(if passed { Outcome::Success } else { Outcome::ValidationFailed })
}

fn law_check(name: &str, oracle: &ExactDistribution, exact: &ExactDistribution) -> Check {
    Check::new(name, oracle.same_law(exact), json!({ "max_abs_diff": oracle.max_abs_diff(exact) }))
}

fn rational_check(name: &str, oracle: &BigRational, exact: &BigRational) -> Check {
    Check::new(name, oracle == exact, json!({ "oracle": ratio(oracle), "exact": ratio(exact) }))
}

fn mean_of(d: &ExactDistribution) -> BigRational {
    d.iter().fold(BigRational::zero(), |acc, (m, p)| acc + BigRational::from_integer(m.into()) * p)
}

/// Every exact result that has an oracle counterpart at the table's size.
fn validate_oracle(table: &JointDistributionTable) -> CliResult<Vec<Check>> {
    let n = table.n;
    let mut checks = vec![
        Check::new(
            "history_count",
            history_count(table.model, n) == table.histories.into(),
            json!({ "histories": table.histories }),
        ),
        Check::new("total_mass", table.total().is_one(), json!({ "total": ratio(&table.total()) })),
    ];
    let source = table.marginal(Parameter::SourceDegree);
    let sink = table.marginal(Parameter::SinkDegree);
    let length = table.marginal(Parameter::LeftmostLength);
    let paths_mean = mean_of(&table.marginal(Parameter::PathCount));
    match table.model {
        ModelKind::Bernoulli => {
            let p = table.p.as_ref().ok_or("bernoulli table without p")?;
            let q = BigRational::one() - p;
            checks.push(law_check("source_degree_vs_dp", &source, &degree_dist_dp_exact(n, p).map_err(err)?));
            checks.push(law_check("source_degree_vs_closed", &source, &degree_dist_closed_exact(n, p).map_err(err)?));
            checks.push(law_check("sink_degree_vs_source_degree", &sink, &source));
            checks.push(law_check("leftmost_length_vs_closed", &length, &length_dist_closed_exact(n, p).map_err(err)?));
            checks.push(law_check(
                "leftmost_length_vs_dual_degree",
                &length,
                &degree_dist_dp_exact(n, &q).map_err(err)?,
            ));
            let series = expected_paths_series_in(n, p);
            checks.push(rational_check("expected_paths_vs_series", &paths_mean, &series[n - 1]));
            checks.push(rational_check(
                "expected_paths_vs_closed",
                &paths_mean,
                &expected_paths_closed_exact(n, p).map_err(err)?,
            ));
        }
        ModelKind::Binary => {
            let pole = if n >= 2 { 2 } else { 1 };
            let point = ExactDistribution::new(pole, vec![BigRational::one()], Provenance::Oracle).map_err(err)?;
            checks.push(law_check("source_degree_is_point_mass", &source, &point));
            let sink_laws = sink_degree_dist_series_exact(n).map_err(err)?;
            checks.push(law_check("sink_degree_vs_series", &sink, &sink_laws[n - 1]));
            let length_laws = length_dist_series_exact(n).map_err(err)?;
            checks.push(law_check("leftmost_length_vs_series", &length, &length_laws[n - 1]));
            let tables = expected_paths_tables_in::<BigRational>(n);
            checks.push(rational_check("expected_paths_vs_tables", &paths_mean, &tables.e[n]));
            let close = |name: &str, oracle: f64, exact: f64| {
                let gap = (oracle - exact).abs();
                Check::new(
                    name,
                    gap <= 1e-10 * exact.abs().max(1.0),
                    json!({ "oracle": oracle, "exact": exact, "gap": gap }),
                )
            };
            checks.push(close(
                "mean_length_vs_closed",
                Scalar::to_f64(&mean_of(&length)),
                expected_length_closed(n).map_err(err)?,
            ));
            checks.push(close(
                "mean_sink_degree_vs_closed",
                Scalar::to_f64(&mean_of(&sink)),
                expected_sink_degree_closed(n).map_err(err)?.exact,
            ));
        }
    }
    Ok(checks)
}

fn gof_check(name: &str, observed: &EmpiricalLaw, law: &Distribution, alpha: f64) -> CliResult<Check> {
    let gof = chi_square_gof(observed, law, MIN_EXPECTED).map_err(err)?;
    Ok(Check::new(
        name,
        gof.passes(alpha),
        json!({ "statistic": gof.statistic, "dof": gof.dof, "p_value": gof.p_value, "bins": gof.bins.len() }),
    ))
}

/// Two-sided z-test of a sample mean against an exact mean.
fn mean_check(name: &str, observed: &EmpiricalLaw, exact: f64, alpha: f64) -> Check {
    let t = observed.trials() as f64;
    let mean = observed.moment(1, 1.0);
    let var = (observed.moment(2, 1.0) - mean * mean).max(0.0);
    let se = (var / t).sqrt();
    let z = if se > 0.0 {
        (mean - exact) / se
    } else if mean == exact {
        0.0
    } else {
        f64::INFINITY
    };
    let p_value = if z.is_finite() { 2.0 * Normal::standard().sf(z.abs()) } else { 0.0 };
    Check::new(name, p_value >= alpha, json!({ "sample_mean": mean, "exact_mean": exact, "z": z, "p_value": p_value }))
}

/// Goodness of fit of every recorded law against the exact laws.
fn validate_laws(result: &TrialBatchResult, against: Against, alpha: f64) -> CliResult<Vec<Check>> {
    let n = result.n;
    let mut checks = Vec::new();
    match result.model {
        Model::Bernoulli { p } => {
            let (degree, length) = if against == Against::Dp {
                (degree_dist_dp(n, p).map_err(err)?, degree_dist_dp(n, 1.0 - p).map_err(err)?)
            } else {
                (
                    degree_dist_closed_auto(n, p).map_err(err)?.distribution,
                    length_dist_closed_auto(n, p).map_err(err)?.distribution,
                )
            };
            for (name, law, exact) in [
                ("source_degree", &result.source_degree, &degree),
                ("sink_degree", &result.sink_degree, &degree),
                ("leftmost_length", &result.leftmost_length, &length),
                ("random_length", &result.random_length, &length),
            ] {
                if let Some(observed) = law {
                    checks.push(gof_check(name, observed, exact, alpha)?);
                }
            }
        }
        Model::Binary => {
            if let Some(source) = &result.source_degree {
                let pole = if n >= 2 { 2 } else { 1 };
                let stray = source.trials() - source.count(pole);
                checks.push(Check::new(
                    "source_degree",
                    stray == 0,
                    json!({ "expected": pole, "other_values": stray }),
                ));
            }
            if against == Against::Dp {
                let sink = sink_degree_dist_series(n).map_err(err)?;
                let length = length_dist_series(n).map_err(err)?;
                for (name, law, exact) in [
                    ("sink_degree", &result.sink_degree, &sink[n - 1]),
                    ("leftmost_length", &result.leftmost_length, &length[n - 1]),
                    ("random_length", &result.random_length, &length[n - 1]),
                ] {
                    if let Some(observed) = law {
                        checks.push(gof_check(name, observed, exact, alpha)?);
                    }
                }
            } else {
                let length_mean = expected_length_closed(n).map_err(err)?;
                let sink_mean = expected_sink_degree_closed(n).map_err(err)?.exact;
                for (name, law, exact) in [
                    ("sink_degree_mean", &result.sink_degree, sink_mean),
                    ("leftmost_length_mean", &result.leftmost_length, length_mean),
                    ("random_length_mean", &result.random_length, length_mean),
                ] {
                    if let Some(observed) = law {
                        checks.push(mean_check(name, observed, exact, alpha));
                    }
                }
            }
        }
    }
    if checks.is_empty() {
        return Err("the result records no quantity with an exact law".into());
    }
    Ok(checks)
}

/// Scaled moments `r = 1..=4` against the limit law. A row passes when the
/// gap is within `tolerance` of the limit plus four standard errors.
fn validate_limit(result: &TrialBatchResult, tolerance: f64) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, quantity) in [("pole_degree", Quantity::PoleDegree), ("leftmost_length", Quantity::LeftmostLength)] {
        if result.law(quantity).is_none() {
            continue;
        }
        let report = compare_scaled_limit(result, quantity).map_err(err)?;
        for row in report.rows.iter().filter(|r| r.r >= 1) {
            let gap = (row.empirical - row.limit).abs();
            let allowed = tolerance * row.limit.abs() + 4.0 * row.standard_error;
            checks.push(Check::new(
                format!("{name}_moment_{}", row.r),
                gap <= allowed,
                json!({
                    "beta": report.beta,
                    "empirical": row.empirical,
                    "standard_error": row.standard_error,
                    "limit": row.limit,
                    "relative_gap": row.relative_gap,
                }),
            ));
        }
    }
    if checks.is_empty() {
        return Err("the result records neither degree nor length".into());
    }
    Ok(checks)
}

fn limits(a: LimitsArgs) -> CliResult<()> {
    let mut v = json!({ "schema_version": SCHEMA_VERSION });
    let (value, error) = match a.family {
        Family::Ml => {
            let p = a.p.ok_or("--p is required for the ml family")?;
            if !(p > 0.0 && p < 1.0) {
                return Err(format!("p must lie strictly between 0 and 1, got {p}"));
            }
            v["family"] = json!("ml");
            v["p"] = json!(p);
            match (a.x, a.r) {
                (Some(x), _) => {
                    v["x"] = json!(x);
                    let config = QuadratureConfig { tolerance: a.tolerance, ..QuadratureConfig::default() };
                    let e = ml_density(x, p, config).map_err(err)?;
                    (e.value, e.error)
                }
                (None, Some(r)) => {
                    v["r"] = json!(r);
                    let m = ml_moment(r, p).map_err(err)?;
                    // Rounding of the gamma ratio, a few ulps.
                    (m, 16.0 * f64::EPSILON * m.abs())
                }
                (None, None) => unreachable!("clap requires --x or --r"),
            }
        }
        Family::BinaryLength | Family::BinaryDegree => {
            if a.p.is_some() {
                return Err("--p applies to the ml family only".into());
            }
            let r = a.r.ok_or("binary families provide moments only; pass --r")?;
            let (name, seq) = if a.family == Family::BinaryLength {
                ("binary-length", binary_length_moments(r))
            } else {
                ("binary-degree", binary_degree_moments(r))
            };
            v["family"] = json!(name);
            v["r"] = json!(r);
            let m = seq.values[r as usize];
            (m, 16.0 * f64::EPSILON * m.abs() * f64::from(r.max(1)))
        }
    };
    v["value"] = json!(value);
    v["error_estimate"] = json!(error);
    emit_json(&None, &v)
}
