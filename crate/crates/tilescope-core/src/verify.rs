//! Parameter sweeps that compare counting methods, polynomial reconstruction
//! in the core side, a JSON-lines record cache and JSON/CSV reports.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::determinants::{
    count_general, count_via_determinant, factorized_count, GeneralParams, MatrixVariant, DEFAULT_D,
};
use crate::exactalg::{interpolate, rint};
use crate::formulas::{
    conjectured_count, leading_coefficient, leading_degree, macmahon, mr_closed_form, newtheo_count, FormulaResult,
};
use crate::oracle::{count_invariant_tilings, count_tilings, BigCount, DEFAULT_CELL_CAP};
use crate::region::{build_region, RegionSpec};
use crate::{Error, Result};

/// Version tag stored with every cached record.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A way of computing the number of tilings of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Transfer-matrix perfect matching count.
    Oracle,
    /// Transfer-matrix count of tilings invariant under 120 degree rotation.
    OracleInvariant,
    /// Cheapest applicable determinant for a general cored region.
    Det,
    Gelfand,
    Evenb,
    Oddb,
    Evenodd,
    Reduced,
    Cored,
    /// Total count from the three-way Eisenstein factorization.
    Factorized,
    /// Rotation-invariant factor of that factorization.
    FactorizedInvariant,
    Macmahon,
    Mr,
    Newtheo,
    Conjectured,
}

impl Method {
    pub const ALL: [Method; 15] = [
        Method::Oracle,
        Method::OracleInvariant,
        Method::Det,
        Method::Gelfand,
        Method::Evenb,
        Method::Oddb,
        Method::Evenodd,
        Method::Reduced,
        Method::Cored,
        Method::Factorized,
        Method::FactorizedInvariant,
        Method::Macmahon,
        Method::Mr,
        Method::Newtheo,
        Method::Conjectured,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::OracleInvariant => "oracle-invariant",
            Method::Det => "det",
            Method::Gelfand => "gelfand",
            Method::Evenb => "evenb",
            Method::Oddb => "oddb",
            Method::Evenodd => "evenodd",
            Method::Reduced => "reduced",
            Method::Cored => "cored",
            Method::Factorized => "factorized",
            Method::FactorizedInvariant => "factorized-invariant",
            Method::Macmahon => "macmahon",
            Method::Mr => "mr",
            Method::Newtheo => "newtheo",
            Method::Conjectured => "conjectured",
        }
    }

    /// Evaluates the method on a region; errors mean the method does not apply.
    pub fn evaluate(self, spec: &RegionSpec, cell_cap: usize) -> Result<Evaluated> {
        let proved = |c: BigCount| Evaluated { value: c.to_string(), status: "proved".into() };
        let formula = |r: FormulaResult| Evaluated { value: r.value.to_string(), status: r.status.to_string() };
        let general = || GeneralParams::from_spec(spec);
        match self {
            Method::Oracle => {
                let c = count_tilings(&build_region(spec)?, cell_cap)?;
                Ok(Evaluated { value: c.to_string(), status: "oracle".into() })
            }
            Method::OracleInvariant => {
                let c = count_invariant_tilings(&build_region(spec)?, cell_cap)?;
                Ok(Evaluated { value: c.to_string(), status: "oracle".into() })
            }
            Method::Det => count_general(&general()?).map(proved),
            Method::Gelfand => match spec {
                RegionSpec::DentedTrapezoid { n, removed, .. } => {
                    let v = MatrixVariant::Gelfand { n: *n, removed: removed.clone(), d: DEFAULT_D };
                    count_via_determinant(&v).map(proved)
                }
                _ => Err(not_applicable(self, spec)),
            },
            Method::Evenb => {
                count_via_determinant(&MatrixVariant::GeneralEvenB { params: general()?, d: DEFAULT_D }).map(proved)
            }
            Method::Oddb => count_via_determinant(&MatrixVariant::OddB(general()?)).map(proved),
            Method::Evenodd => count_via_determinant(&MatrixVariant::EvenOddAB(general()?)).map(proved),
            Method::Reduced => count_via_determinant(&MatrixVariant::Reduced(general()?)).map(proved),
            Method::Cored => {
                let p = general()?;
                if p.b1 + p.b2 + p.b3 != 0 {
                    return Err(not_applicable(self, spec));
                }
                count_via_determinant(&MatrixVariant::Cored { n1: p.n1, n2: p.n2, n3: p.n3, a: p.a }).map(proved)
            }
            Method::Factorized | Method::FactorizedInvariant => match *spec {
                RegionSpec::S { n, a, b, k } => {
                    let (total, invariant) = factorized_count(n, a, b, k)?;
                    Ok(proved(if self == Method::Factorized { total } else { invariant }))
                }
                _ => Err(not_applicable(self, spec)),
            },
            Method::Macmahon => match *spec {
                RegionSpec::Hexagon { p, q, r } if p >= 0 && q >= 0 && r >= 0 => {
                    Ok(proved(macmahon(p as u64, q as u64, r as u64)))
                }
                _ => Err(not_applicable(self, spec)),
            },
            Method::Mr => match *spec {
                RegionSpec::S { n, a, b, k } => {
                    if n % 2 != 0 || a % 2 != 0 {
                        return Err(Error::Parity(format!("mr needs even side and core, got n = {n}, a = {a}")));
                    }
                    mr_closed_form(n / 2, a / 2, b, k).map(formula)
                }
                _ => Err(not_applicable(self, spec)),
            },
            Method::Newtheo => {
                let p = general()?;
                if p.b1 + p.b2 + p.b3 != 0 {
                    return Err(not_applicable(self, spec));
                }
                newtheo_count(p.n1, p.n2, p.n3, p.a).map(formula)
            }
            Method::Conjectured => match *spec {
                RegionSpec::S { n, a, b, k } => conjectured_count(n, a, b, k).map(formula),
                _ => Err(not_applicable(self, spec)),
            },
        }
    }
}

fn not_applicable(m: Method, spec: &RegionSpec) -> Error {
    Error::VariantParameter(format!("method {} does not apply to {spec}", m.name()))
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::VariantParameter(format!("unknown method {s:?}")))
    }
}

/// A computed value with its origin label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluated {
    /// Decimal string.
    pub value: String,
    /// `oracle`, `proved` or `conjectured`.
    pub status: String,
}

/// Inclusive integer range with a positive step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamRange {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    #[serde(default = "one")]
    pub step: i64,
}

fn one() -> i64 {
    1
}

impl ParamRange {
    pub fn new(name: &str, lo: i64, hi: i64, step: i64) -> Self {
        ParamRange { name: name.into(), lo, hi, step }
    }

    pub fn fixed(name: &str, v: i64) -> Self {
        ParamRange::new(name, v, v, 1)
    }

    fn values(&self) -> Vec<i64> {
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    /// `name=v`, `name=lo..hi` or `name=lo..hi:step`.
    fn from_str(s: &str) -> Result<ParamRange> {
        let bad = || Error::VariantParameter(format!("range {s:?} is not name=lo..hi[:step]"));
        let (name, body) = s.split_once('=').ok_or_else(bad)?;
        let (span, step) = match body.split_once(':') {
            Some((span, step)) => (span, step.trim().parse().map_err(|_| bad())?),
            None => (body, 1),
        };
        let (lo, hi) = match span.split_once("..") {
            Some((lo, hi)) => (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?),
            None => {
                let v = span.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        Ok(ParamRange::new(name.trim(), lo, hi, step))
    }
}

/// Restriction on generated tuples; tuples failing one are not generated at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// The named parameters are non-decreasing in the listed order.
    NonDecreasing(Vec<String>),
    /// The two named parameters are equal.
    Equal(String, String),
}

impl Constraint {
    fn holds(&self, get: &impl Fn(&str) -> Option<i64>) -> bool {
        match self {
            Constraint::NonDecreasing(names) => {
                let vs: Vec<Option<i64>> = names.iter().map(|n| get(n)).collect();
                vs.windows(2).all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if x <= y))
            }
            Constraint::Equal(x, y) => get(x).is_some() && get(x) == get(y),
        }
    }
}

/// A sweep: a region family, parameter ranges and the methods to compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub suite: String,
    /// Region family name as accepted by [`RegionSpec::from_json`].
    pub variant: String,
    pub ranges: Vec<ParamRange>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    pub methods: Vec<Method>,
    #[serde(default = "default_cap")]
    pub cell_cap: usize,
    /// Tuples not started within this many seconds are skipped for resources.
    #[serde(default)]
    pub time_budget_secs: Option<u64>,
}

fn default_cap() -> usize {
    DEFAULT_CELL_CAP
}

impl SweepSpec {
    pub fn new(suite: &str, variant: &str, ranges: Vec<ParamRange>, methods: Vec<Method>) -> Self {
        SweepSpec {
            suite: suite.into(),
            variant: variant.into(),
            ranges,
            constraints: Vec::new(),
            methods,
            cell_cap: DEFAULT_CELL_CAP,
            time_budget_secs: None,
        }
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    /// Named suites with their default ranges.
    pub fn preset(name: &str) -> Result<SweepSpec> {
        use Method::*;
        let r = ParamRange::new;
        let spec = match name {
            "oracle-vs-det" => SweepSpec::new(
                name,
                "sgeneral",
                vec![
                    r("n1", 0, 3, 1),
                    r("n2", 0, 3, 1),
                    r("n3", 0, 3, 1),
                    r("a", 0, 2, 2),
                    r("b1", 0, 2, 1),
                    r("b2", 0, 2, 1),
                    r("b3", 0, 2, 1),
                    r("k1", 0, 1, 1),
                    r("k2", 0, 1, 1),
                    r("k3", 0, 1, 1),
                ],
                vec![Oracle, Det],
            ),
            "oracle-vs-evenodd" => SweepSpec::new(
                name,
                "s",
                vec![r("n", 1, 3, 1), r("a", 0, 2, 2), r("b", 0, 2, 1), r("k", 0, 1, 1)],
                vec![Oracle, Evenodd],
            ),
            "newtheo" => SweepSpec::new(
                name,
                "sgeneral",
                vec![
                    r("n1", 0, 4, 1),
                    r("n2", 0, 4, 1),
                    r("n3", 0, 4, 1),
                    r("a", 0, 6, 1),
                    ParamRange::fixed("b1", 0),
                    ParamRange::fixed("b2", 0),
                    ParamRange::fixed("b3", 0),
                    ParamRange::fixed("k1", 0),
                    ParamRange::fixed("k2", 0),
                    ParamRange::fixed("k3", 0),
                ],
                vec![Newtheo, Cored, Oracle],
            )
            .with_constraint(Constraint::NonDecreasing(vec!["n1".into(), "n2".into(), "n3".into()])),
            "mr" => SweepSpec::new(
                name,
                "s",
                vec![r("n", 0, 6, 2), r("a", 0, 6, 2), r("b", 0, 3, 1), r("k", 0, 3, 1)],
                vec![Mr, OracleInvariant],
            ),
            "conjecture1" => SweepSpec::new(
                name,
                "s",
                vec![r("n", 0, 6, 2), r("a", 0, 2, 2), r("b", 0, 2, 1), r("k", 0, 3, 1)],
                vec![Conjectured, Det],
            ),
            "factorization" => SweepSpec::new(
                name,
                "s",
                vec![r("n", 0, 6, 1), r("a", 0, 2, 2), r("b", 0, 2, 2), r("k", 0, 3, 1)],
                vec![Factorized, Oddb, Oracle],
            ),
            "macmahon" => SweepSpec::new(
                name,
                "hexagon",
                vec![r("p", 0, 4, 1), r("q", 0, 4, 1), r("r", 0, 4, 1)],
                vec![Macmahon, Oracle],
            ),
            other => return Err(Error::VariantParameter(format!("unknown suite {other:?}"))),
        };
        Ok(spec)
    }

    pub const PRESETS: [&'static str; 7] =
        ["oracle-vs-det", "oracle-vs-evenodd", "newtheo", "mr", "conjecture1", "factorization", "macmahon"];

    /// Replaces ranges with the same name and appends new ones.
    pub fn override_ranges(&mut self, ranges: impl IntoIterator<Item = ParamRange>) {
        for r in ranges {
            match self.ranges.iter_mut().find(|x| x.name == r.name) {
                Some(slot) => *slot = r,
                None => self.ranges.push(r),
            }
        }
    }

    fn validate(&self) -> Result<()> {
        for r in &self.ranges {
            if r.step <= 0 {
                return Err(Error::VariantParameter(format!("range {} has non-positive step {}", r.name, r.step)));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::VariantParameter("a sweep needs at least one method".into()));
        }
        Ok(())
    }

    /// All parameter tuples in lexicographic order of the ranges.
    pub fn tuples(&self) -> Vec<Vec<(String, i64)>> {
        let axes: Vec<Vec<i64>> = self.ranges.iter().map(ParamRange::values).collect();
        if axes.iter().any(Vec::is_empty) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        loop {
            let tuple: Vec<(String, i64)> =
                self.ranges.iter().zip(&idx).zip(&axes).map(|((r, &i), ax)| (r.name.clone(), ax[i])).collect();
            let get = |n: &str| tuple.iter().find(|(m, _)| m == n).map(|&(_, v)| v);
            if self.constraints.iter().all(|c| c.holds(&get)) {
                out.push(tuple);
            }
            // odometer with the last range fastest
            let mut pos = axes.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < axes[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// Overall result for one tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// At least two methods produced values and all of them are equal.
    Agree,
    Disagree,
    /// The tuple is not a valid instance, or fewer than two methods apply.
    Skipped,
    /// A method hit the cell cap or the time budget ran out.
    ResourceSkipped,
    /// A method failed with an arithmetic error.
    Failed,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Agree => "agree",
            Outcome::Disagree => "disagree",
            Outcome::Skipped => "skipped",
            Outcome::ResourceSkipped => "resource-skipped",
            Outcome::Failed => "failed",
        }
    }
}

/// One method's result inside a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodValue {
    pub method: Method,
    /// Decimal string, absent when the method did not run to completion.
    pub value: Option<String>,
    pub status: Option<String>,
    /// Why no value was produced.
    pub note: Option<String>,
}

/// Result of one parameter tuple of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub suite: String,
    pub variant: String,
    pub params: Vec<(String, i64)>,
    pub values: Vec<MethodValue>,
    pub agree: bool,
    pub outcome: Outcome,
    /// Distinct status labels of the computed values.
    pub labels: Vec<String>,
    pub reason: Option<String>,
    pub ms: u64,
    pub version: String,
}

impl VerificationRecord {
    /// Cache key: canonical tuple, methods and code version.
    pub fn key(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let methods: Vec<&str> = self.values.iter().map(|v| v.method.name()).collect();
        format!("{}({})|{}|{}", self.variant, params.join(","), methods.join("+"), self.version)
    }

    /// The computed value of a method, if any.
    pub fn value_of(&self, m: Method) -> Option<&str> {
        self.values.iter().find(|v| v.method == m).and_then(|v| v.value.as_deref())
    }
}

fn spec_from_tuple(variant: &str, params: &[(String, i64)]) -> Result<RegionSpec> {
    let map: Map<String, Value> = params.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
    RegionSpec::from_json(&json!({ "variant": variant, "params": map }))
}

fn is_resource(e: &Error) -> bool {
    matches!(e, Error::RegionTooLarge { .. })
}

fn is_inapplicable(e: &Error) -> bool {
    matches!(
        e,
        Error::GeometryViolation(_)
            | Error::VariantParameter(_)
            | Error::Parity(_)
            | Error::HypothesisViolation(_)
            | Error::NotSymmetric
    )
}

fn run_tuple(spec: &SweepSpec, params: Vec<(String, i64)>, deadline: Option<Instant>) -> VerificationRecord {
    let start = Instant::now();
    let mut record = empty_record(spec, params);
    if deadline.is_some_and(|d| Instant::now() > d) {
        record.outcome = Outcome::ResourceSkipped;
        record.reason = Some("time budget exhausted".into());
        return record;
    }
    let region = match spec_from_tuple(&spec.variant, &record.params).and_then(|r| build_region(&r).map(|_| r)) {
        Ok(r) => r,
        Err(e) => {
            record.reason = Some(e.to_string());
            return record;
        }
    };
    let mut resource = false;
    let mut failure = None;
    record.values.clear();
    for &m in &spec.methods {
        match m.evaluate(&region, spec.cell_cap) {
            Ok(ev) => record.values.push(MethodValue {
                method: m,
                value: Some(ev.value),
                status: Some(ev.status),
                note: None,
            }),
            Err(e) => {
                resource |= is_resource(&e);
                if !is_resource(&e) && !is_inapplicable(&e) {
                    failure.get_or_insert_with(|| format!("{m}: {e}"));
                }
                record.values.push(blank(m, Some(e.to_string())));
            }
        }
    }
    let computed: Vec<&str> = record.values.iter().filter_map(|v| v.value.as_deref()).collect();
    let labels: BTreeSet<String> = record.values.iter().filter_map(|v| v.status.clone()).collect();
    record.labels = labels.into_iter().collect();
    let identical = computed.windows(2).all(|w| w[0] == w[1]);
    record.agree = computed.len() >= 2 && identical;
    (record.outcome, record.reason) = if !identical {
        (Outcome::Disagree, Some("methods returned different values".into()))
    } else if let Some(f) = failure {
        (Outcome::Failed, Some(f))
    } else if computed.len() >= 2 {
        (Outcome::Agree, None)
    } else if resource {
        (Outcome::ResourceSkipped, Some("cell cap exceeded".into()))
    } else {
        (Outcome::Skipped, Some("fewer than two methods apply".into()))
    };
    record.ms = start.elapsed().as_millis() as u64;
    record
}

/// Runs every tuple of the sweep on `jobs` worker threads (all cores when
/// `None`); the records come back in canonical tuple order.
pub fn run_suite(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<VerificationRecord>> {
    spec.validate()?;
    let mut records = execute(spec, spec.tuples(), jobs)?;
    sort_canonical(&mut records);
    Ok(records)
}

/// Like [`run_suite`], reusing records from `cache` whose key matches and
/// appending the newly computed ones.
pub fn run_suite_cached(spec: &SweepSpec, jobs: Option<usize>, cache: &Path) -> Result<Vec<VerificationRecord>> {
    spec.validate()?;
    let (known, _) = if cache.exists() { load(cache)? } else { (Vec::new(), Vec::new()) };
    let known: HashMap<String, VerificationRecord> = known.into_iter().map(|r| (r.key(), r)).collect();
    let mut records = Vec::new();
    let mut todo = Vec::new();
    for t in spec.tuples() {
        match known.get(&tuple_key(spec, &t)) {
            Some(r) if r.outcome != Outcome::ResourceSkipped => {
                records.push(VerificationRecord { suite: spec.suite.clone(), ..r.clone() })
            }
            _ => todo.push(t),
        }
    }
    let fresh = execute(spec, todo, jobs)?;
    store(cache, &fresh)?;
    records.extend(fresh);
    sort_canonical(&mut records);
    Ok(records)
}

fn execute(spec: &SweepSpec, tuples: Vec<Vec<(String, i64)>>, jobs: Option<usize>) -> Result<Vec<VerificationRecord>> {
    let deadline = spec.time_budget_secs.map(|s| Instant::now() + Duration::from_secs(s));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| tuples.into_par_iter().map(|t| run_tuple(spec, t, deadline)).collect()))
}

fn sort_canonical(records: &mut [VerificationRecord]) {
    records.sort_by_cached_key(|r| r.params.iter().map(|p| p.1).collect::<Vec<i64>>());
}

fn blank(m: Method, note: Option<String>) -> MethodValue {
    MethodValue { method: m, value: None, status: None, note }
}

fn empty_record(spec: &SweepSpec, params: Vec<(String, i64)>) -> VerificationRecord {
    VerificationRecord {
        suite: spec.suite.clone(),
        variant: spec.variant.clone(),
        params,
        values: spec.methods.iter().map(|&m| blank(m, None)).collect(),
        agree: false,
        outcome: Outcome::Skipped,
        labels: Vec::new(),
        reason: None,
        ms: 0,
        version: CODE_VERSION.into(),
    }
}

fn tuple_key(spec: &SweepSpec, params: &[(String, i64)]) -> String {
    empty_record(spec, params.to_vec()).key()
}

/// Process exit code for a finished sweep: 2 on any disagreement or
/// failure, otherwise 3 if some tuple was skipped for resources, otherwise 0.
pub fn exit_code(records: &[VerificationRecord]) -> i32 {
    if records.iter().any(|r| matches!(r.outcome, Outcome::Disagree | Outcome::Failed)) {
        2
    } else if records.iter().any(|r| r.outcome == Outcome::ResourceSkipped) {
        3
    } else {
        0
    }
}

fn io(e: impl fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Appends records to a JSON-lines file, one record per line.
pub fn store(path: &Path, records: &[VerificationRecord]) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    for r in records {
        let mut line = serde_json::to_value(r).map_err(io)?;
        line["key"] = json!(r.key());
        writeln!(f, "{line}").map_err(io)?;
    }
    Ok(())
}

/// Reads a JSON-lines cache. Later lines replace earlier ones with the same
/// key; unreadable lines are skipped and reported in the second component.
pub fn load(path: &Path) -> Result<(Vec<VerificationRecord>, Vec<String>)> {
    let f = File::open(path).map_err(io)?;
    let mut order: Vec<String> = Vec::new();
    let mut latest: HashMap<String, VerificationRecord> = HashMap::new();
    let mut warnings = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<VerificationRecord>(&line) {
            Ok(r) => {
                let key = r.key();
                if latest.insert(key.clone(), r).is_none() {
                    order.push(key);
                }
            }
            Err(e) => warnings.push(format!("{}:{}: skipped corrupt line: {e}", path.display(), i + 1)),
        }
    }
    let records = order.into_iter().map(|k| latest.remove(&k).expect("key recorded")).collect();
    Ok((records, warnings))
}

/// Report formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::VariantParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// Column layout: suite, parameters, methods, agree, status, ms.
fn columns(records: &[VerificationRecord]) -> (Vec<String>, Vec<Method>) {
    let mut params: Vec<String> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for r in records {
        for (n, _) in &r.params {
            if !params.contains(n) {
                params.push(n.clone());
            }
        }
        for v in &r.values {
            if !methods.contains(&v.method) {
                methods.push(v.method);
            }
        }
    }
    (params, methods)
}

/// Renders records as a JSON array or an RFC 4180 CSV table. Counts are
/// always decimal strings. `timing` controls the `ms` column, the only
/// field that differs between identical runs.
pub fn emit_report(records: &[VerificationRecord], format: Format, timing: bool) -> Result<String> {
    let (params, methods) = columns(records);
    let status_of = |r: &VerificationRecord| {
        let mut s = r.outcome.name().to_string();
        if !r.labels.is_empty() {
            s = format!("{s};{}", r.labels.join(";"));
        }
        s
    };
    match format {
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| {
                    let ps: Map<String, Value> = r.params.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
                    let vs: Map<String, Value> =
                        r.values.iter().map(|v| (v.method.name().to_string(), json!(v.value))).collect();
                    let mut row = json!({
                        "suite": r.suite,
                        "params": ps,
                        "values": vs,
                        "agree": r.agree,
                        "status": status_of(r),
                    });
                    if let Some(reason) = &r.reason {
                        row["reason"] = json!(reason);
                    }
                    if timing {
                        row["ms"] = json!(r.ms);
                    }
                    row
                })
                .collect();
            serde_json::to_string_pretty(&rows).map_err(io)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = vec!["suite".into()];
            header.extend(params.iter().cloned());
            header.extend(methods.iter().map(|m| m.name().to_string()));
            header.extend(["agree".into(), "status".into()]);
            if timing {
                header.push("ms".into());
            }
            w.write_record(&header).map_err(io)?;
            for r in records {
                let mut row = vec![r.suite.clone()];
                row.extend(params.iter().map(|n| {
                    r.params.iter().find(|(m, _)| m == n).map(|(_, v)| v.to_string()).unwrap_or_default()
                }));
                row.extend(methods.iter().map(|&m| r.value_of(m).unwrap_or("").to_string()));
                row.extend([r.agree.to_string(), status_of(r)]);
                if timing {
                    row.push(r.ms.to_string());
                }
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(io)?;
            String::from_utf8(bytes).map_err(io)
        }
    }
}

/// Degree and leading coefficient in the core side of the full count of the
/// region with side `2n`, core `2a`, satellites `b` and gap `k`, recovered by
/// exact interpolation of `evaluator` (`evenodd` or `reduced`) at
/// `a = 0..=D+2` with `D` the expected degree.
pub fn poly_reconstruct(n: i64, b: i64, k: i64, evaluator: Method) -> Result<(i64, BigRational)> {
    if b % 2 != 0 {
        return Err(Error::Parity(format!("reconstruction needs even satellites, got b = {b}")));
    }
    let variant = |p: GeneralParams| match evaluator {
        Method::Evenodd => Ok(MatrixVariant::EvenOddAB(p)),
        Method::Reduced => Ok(MatrixVariant::Reduced(p)),
        other => Err(Error::VariantParameter(format!("{other} is not a polynomial evaluator"))),
    };
    let top = leading_degree(n, b, k) + 2;
    let points = (0..=top)
        .into_par_iter()
        .map(|a| {
            let side = 2 * n;
            let p = GeneralParams { n1: side, n2: side, n3: side, a: 2 * a, b1: b, b2: b, b3: b, k1: k, k2: k, k3: k };
            let count = count_via_determinant(&variant(p)?)?;
            Ok((rint(a), BigRational::from_integer(BigInt::from(count))))
        })
        .collect::<Result<Vec<_>>>()?;
    let poly = interpolate(&points)?;
    let degree = poly.degree().map_or(-1, |d| d as i64);
    Ok((degree, poly.leading()))
}

/// Reconstructed and predicted degree and leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionCheck {
    pub degree: i64,
    pub leading: BigRational,
    pub expected_degree: i64,
    pub expected_leading: BigRational,
}

impl ReconstructionCheck {
    pub fn holds(&self) -> bool {
        self.degree == self.expected_degree && self.leading == self.expected_leading
    }
}

/// Runs [`poly_reconstruct`] and compares with the closed forms.
pub fn check_reconstruction(n: i64, b: i64, k: i64, evaluator: Method) -> Result<ReconstructionCheck> {
    let (degree, leading) = poly_reconstruct(n, b, k, evaluator)?;
    Ok(ReconstructionCheck {
        degree,
        leading,
        expected_degree: leading_degree(n, b, k),
        expected_leading: leading_coefficient(n, b, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(suite: &str, variant: &str, ranges: Vec<ParamRange>, methods: Vec<Method>) -> SweepSpec {
        SweepSpec::new(suite, variant, ranges, methods)
    }

    #[test]
    fn empty_range_gives_no_records() {
        let spec = small("empty", "s", vec![ParamRange::new("n", 3, 2, 1)], vec![Method::Oracle, Method::Det]);
        let records = run_suite(&spec, Some(1)).unwrap();
        assert!(records.is_empty());
        assert_eq!(exit_code(&records), 0);
    }

    #[test]
    fn single_tuple_agrees() {
        let ranges = ["n=2", "a=0", "b=1", "k=1"].map(|s| s.parse().unwrap()).to_vec();
        let spec = small("oracle-vs-evenodd", "s", ranges, vec![Method::Oracle, Method::Evenodd]);
        let records = run_suite(&spec, Some(2)).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert!(r.agree, "{r:?}");
        assert_eq!(r.outcome, Outcome::Agree);
        assert_eq!(r.value_of(Method::Oracle), r.value_of(Method::Evenodd));
        assert_eq!(exit_code(&records), 0);
    }

    #[test]
    fn geometry_violation_is_skipped_without_affecting_exit() {
        // core side must be even when satellites are present
        let ranges = ["n=2", "a=1", "b=1", "k=0"].map(|s| s.parse().unwrap()).to_vec();
        let spec = small("bad", "s", ranges, vec![Method::Oracle, Method::Det]);
        let records = run_suite(&spec, None).unwrap();
        assert_eq!(records[0].outcome, Outcome::Skipped);
        assert!(records[0].reason.as_deref().unwrap().contains("even"));
        assert_eq!(exit_code(&records), 0);
    }

    #[test]
    fn cell_cap_gives_resource_exit() {
        let mut spec = SweepSpec::preset("macmahon").unwrap();
        spec.override_ranges(["p=3", "q=3", "r=3"].map(|s| s.parse().unwrap()));
        spec.methods = vec![Method::Oracle];
        spec.cell_cap = 10;
        let records = run_suite(&spec, None).unwrap();
        assert_eq!(records[0].outcome, Outcome::ResourceSkipped);
        assert_eq!(exit_code(&records), 3);
    }

    #[test]
    fn disagreement_gives_exit_two() {
        let mut r = run_suite(&SweepSpec::preset("macmahon").unwrap(), None).unwrap();
        r.truncate(1);
        r[0].outcome = Outcome::Disagree;
        assert_eq!(exit_code(&r), 2);
    }

    #[test]
    fn macmahon_suite_matches_oracle() {
        let records = run_suite(&SweepSpec::preset("macmahon").unwrap(), None).unwrap();
        assert_eq!(records.len(), 125);
        assert!(records.iter().all(|r| r.outcome == Outcome::Agree), "{:?}", records.iter().find(|r| !r.agree));
    }

    #[test]
    fn constraints_filter_tuples() {
        let spec = SweepSpec::preset("newtheo").unwrap();
        let tuples = spec.tuples();
        assert_eq!(tuples.len(), 35 * 7);
        assert!(tuples.iter().all(|t| t[0].1 <= t[1].1 && t[1].1 <= t[2].1));
    }

    #[test]
    fn range_parsing() {
        assert_eq!("n=0..6:2".parse::<ParamRange>().unwrap(), ParamRange::new("n", 0, 6, 2));
        assert_eq!("a=3".parse::<ParamRange>().unwrap(), ParamRange::fixed("a", 3));
        assert!("n0..3".parse::<ParamRange>().is_err());
        assert!("n=x".parse::<ParamRange>().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), json!(m.name()));
        }
    }

    fn temp_path(tag: &str) -> std::path::PathBuf {
        let p = std::env::temp_dir().join(format!("tilescope-{tag}-{}.jsonl", std::process::id()));
        let _ = std::fs::remove_file(&p);
        p
    }

    #[test]
    fn cache_round_trips_byte_identically() {
        let records = run_suite(&SweepSpec::preset("oracle-vs-evenodd").unwrap(), None).unwrap();
        let (p, q) = (temp_path("rt1"), temp_path("rt2"));
        store(&p, &records).unwrap();
        let (loaded, warnings) = load(&p).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(loaded, records);
        store(&q, &loaded).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
        let _ = (std::fs::remove_file(&p), std::fs::remove_file(&q));
    }

    #[test]
    fn cache_keeps_newest_duplicate_and_skips_corrupt_lines() {
        let mut records = run_suite(&SweepSpec::preset("oracle-vs-evenodd").unwrap(), None).unwrap();
        records.truncate(1);
        let p = temp_path("dup");
        store(&p, &records).unwrap();
        std::fs::OpenOptions::new().append(true).open(&p).unwrap().write_all(b"{not json\n").unwrap();
        let mut newer = records[0].clone();
        newer.ms = 123_456;
        store(&p, &[newer.clone()]).unwrap();
        let (loaded, warnings) = load(&p).unwrap();
        assert_eq!(loaded, vec![newer]);
        assert_eq!(warnings.len(), 1);
        let _ = std::fs::remove_file(&p);
    }

    #[test]
    fn huge_decimal_counts_survive_the_cache() {
        let (total, _) = factorized_count(12, 2, 2, 1).unwrap();
        let big = total.to_string().repeat(1 + 1000 / total.to_string().len());
        assert!(big.len() >= 1000);
        let mut records = run_suite(&SweepSpec::preset("oracle-vs-evenodd").unwrap(), None).unwrap();
        records.truncate(1);
        records[0].values[0].value = Some(big.clone());
        let p = temp_path("big");
        store(&p, &records).unwrap();
        let (loaded, _) = load(&p).unwrap();
        assert_eq!(loaded[0].values[0].value.as_deref(), Some(big.as_str()));
        let _ = std::fs::remove_file(&p);
    }

    #[test]
    fn cached_run_reuses_records() {
        let mut spec = SweepSpec::preset("macmahon").unwrap();
        spec.override_ranges(["p=0..2", "q=0..2", "r=0..2"].map(|s| s.parse().unwrap()));
        let p = temp_path("reuse");
        let first = run_suite_cached(&spec, None, &p).unwrap();
        assert!(first.iter().all(|r| r.outcome == Outcome::Agree));
        let lines = std::fs::read_to_string(&p).unwrap().lines().count();
        let second = run_suite_cached(&spec, None, &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), lines);
        let strip = |rs: &[VerificationRecord]| rs.iter().map(|r| VerificationRecord { ms: 0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&first), strip(&second));
        let _ = std::fs::remove_file(&p);
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = emit_report(&[], Format::Csv, true).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert_eq!(csv.trim_end(), "suite,agree,status,ms");
        assert_eq!(emit_report(&[], Format::Json, true).unwrap(), "[]");
    }

    #[test]
    fn reports_carry_identical_values() {
        let records = run_suite(&SweepSpec::preset("oracle-vs-evenodd").unwrap(), None).unwrap();
        let one = &records[..1];
        let csv = emit_report(one, Format::Csv, true).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("suite,n,a,b,k,oracle,evenodd,agree,status,ms"));
        let json: Value = serde_json::from_str(&emit_report(&records, Format::Json, true).unwrap()).unwrap();
        let full_csv = emit_report(&records, Format::Csv, true).unwrap();
        let mut reader = csv::Reader::from_reader(full_csv.as_bytes());
        for (row, obj) in reader.records().zip(json.as_array().unwrap()) {
            let row = row.unwrap();
            assert_eq!(obj["values"]["oracle"].as_str().unwrap_or(""), &row[5]);
            assert_eq!(obj["values"]["evenodd"].as_str().unwrap_or(""), &row[6]);
            assert_eq!(obj["status"].as_str().unwrap(), &row[8]);
        }
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut records = run_suite(&SweepSpec::preset("oracle-vs-evenodd").unwrap(), None).unwrap();
        records.truncate(1);
        records[0].suite = "a,\"b\"".into();
        let csv = emit_report(&records, Format::Csv, false).unwrap();
        assert!(csv.lines().nth(1).unwrap().starts_with("\"a,\"\"b\"\"\","));
    }

    #[test]
    fn sweeps_are_deterministic() {
        let spec = SweepSpec::preset("oracle-vs-evenodd").unwrap();
        let a = emit_report(&run_suite(&spec, Some(1)).unwrap(), Format::Json, false).unwrap();
        let b = emit_report(&run_suite(&spec, Some(4)).unwrap(), Format::Json, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reconstruction_small_cases() {
        let c = check_reconstruction(1, 0, 0, Method::Evenodd).unwrap();
        assert_eq!(c.degree, 3);
        assert!(c.holds(), "{c:?}");
        assert!(matches!(poly_reconstruct(1, 1, 0, Method::Evenodd), Err(Error::Parity(_))));
        assert!(matches!(poly_reconstruct(1, 0, 0, Method::Oracle), Err(Error::VariantParameter(_))));
    }

    #[test]
    fn reconstruction_without_satellites_ignores_gap() {
        let (d0, l0) = poly_reconstruct(1, 0, 0, Method::Reduced).unwrap();
        let (d1, l1) = poly_reconstruct(1, 0, 1, Method::Reduced).unwrap();
        assert_eq!((d0, &l0), (d1, &l1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn records_agree_iff_values_identical(n in 0i64..3, a in 0i64..2, b in 0i64..3, k in 0i64..2) {
            let ranges = vec![
                ParamRange::fixed("n", n),
                ParamRange::fixed("a", 2 * a),
                ParamRange::fixed("b", b),
                ParamRange::fixed("k", k),
            ];
            let spec = SweepSpec::new("prop", "s", ranges, vec![Method::Oracle, Method::Det, Method::Evenodd]);
            let records = run_suite(&spec, Some(1)).unwrap();
            prop_assert_eq!(records.len(), 1);
            let r = &records[0];
            let vals: Vec<&str> = r.values.iter().filter_map(|v| v.value.as_deref()).collect();
            prop_assert_eq!(r.agree, vals.len() >= 2 && vals.windows(2).all(|w| w[0] == w[1]));
            prop_assert!(r.outcome != Outcome::Disagree);
        }
    }
}
