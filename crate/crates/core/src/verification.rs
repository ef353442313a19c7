//! Seeded property suites and the Monte Carlo reproducing-property oracle.
//!
//! Every suite is a list of independent jobs. Job `i` draws from the ChaCha
//! stream `(seed, i)` and the results are collected in job order, so a report
//! does not depend on the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphisms::{random_automorphism, random_induced, random_stabilizer, BaseMap, CayleyTransform};
use crate::hartogs::{HartogsDescriptor, HartogsDomain, HartogsPoint, HartogsStatus, DEFAULT_TRUNCATION};
use crate::siegel::{concat, random_cvector, random_unitary, Domain, DomainDescriptor, SiegelKind, SiegelPoint};
use crate::{CVector, Error, Result, C64};

/// Suite names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: [&str; 9] = [
    "kernel_compare",
    "reproducing",
    "transformation",
    "h_invariance",
    "group_law",
    "levi",
    "shilov",
    "jacobian",
    "tumanov",
];

/// Acceptance band for Monte Carlo estimates, in standard errors.
pub const STDERR_BAND: f64 = 4.0;

const MC_BLOCKS: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    /// Base domain; the shipped catalog when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDescriptor>,
    /// Fiber dimensions; suite defaults when empty.
    #[serde(default, rename = "N", skip_serializing_if = "Vec::is_empty")]
    pub fibers: Vec<usize>,
    /// Exponents `s`; suite defaults when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides keyed by metric name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            domain: None,
            fibers: Vec::new(),
            exponents: Vec::new(),
            samples: None,
            seed: 0,
            tolerances: BTreeMap::new(),
            truncation: DEFAULT_TRUNCATION,
            threads: None,
        }
    }

    pub fn with_domain(mut self, d: DomainDescriptor) -> Self {
        self.domain = Some(d);
        self
    }

    /// Restrict to one Hartogs domain.
    pub fn with_hartogs(mut self, h: &HartogsDescriptor) -> Self {
        self.domain = Some(h.base.clone());
        self.fibers = vec![h.n_fiber];
        self.exponents = vec![h.s];
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_tolerance(mut self, metric: &str, tol: f64) -> Self {
        self.tolerances.insert(metric.to_string(), tol);
        self
    }

    fn samples_or(&self, n: usize) -> usize {
        self.samples.unwrap_or(n).max(1)
    }

    fn fibers_or(&self, d: &[usize]) -> Vec<usize> {
        if self.fibers.is_empty() {
            d.to_vec()
        } else {
            self.fibers.clone()
        }
    }

    fn exponents_or(&self, d: &[f64]) -> Vec<f64> {
        if self.exponents.is_empty() {
            d.to_vec()
        } else {
            self.exponents.clone()
        }
    }

    fn tol(&self, metric: &str, default: f64) -> f64 {
        self.tolerances.get(metric).copied().unwrap_or(default)
    }

    fn domains(&self) -> Result<Vec<(String, Domain)>> {
        match &self.domain {
            Some(d) => Ok(vec![(domain_label(d), Domain::from_descriptor(d)?)]),
            None => Ok(Domain::catalog().into_iter().map(|(n, d)| (n.to_string(), d)).collect()),
        }
    }
}

/// Default sample count of a suite.
pub fn default_samples(suite: &str) -> Option<usize> {
    Some(match suite {
        "kernel_compare" => 100,
        "reproducing" => 1_000_000,
        "transformation" => 500,
        "h_invariance" => 1000,
        "group_law" => 200,
        "levi" => 1000,
        "shilov" => 500,
        "jacobian" => 20,
        "tumanov" => 100,
        _ => return None,
    })
}

/// Metric that `--tol` overrides for a suite.
pub fn primary_metric(suite: &str) -> Option<&'static str> {
    Some(match suite {
        "kernel_compare" => "rel_err",
        "reproducing" => "stderr_band",
        "transformation" => "residual",
        "h_invariance" => "h_residual",
        "group_law" => "compose_residual",
        "levi" => "min_eig",
        "shilov" => "shilov_residual",
        "jacobian" => "df2_dz_norm",
        "tumanov" => "min_abs_r",
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Worst value must not exceed the bound.
    AtMost,
    /// Worst value must exceed the bound.
    Above,
    /// Reported only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub metric: String,
    /// Maximum for `at_most`, minimum for `above`.
    pub value: f64,
    pub bound: f64,
    pub kind: BoundKind,
    pub samples: usize,
    pub errors: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    pub pass: bool,
}

/// Monte Carlo estimate of `∫ f(q) K(p, q) dV(q)` against `f(p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub name: String,
    pub function: String,
    #[serde(with = "crate::wire::complex_vec")]
    pub point: CVector,
    #[serde(with = "crate::wire::complex")]
    pub estimate: C64,
    /// Standard errors of the real and imaginary parts.
    pub stderr: [f64; 2],
    #[serde(with = "crate::wire::complex")]
    pub target: C64,
    /// Largest componentwise deviation in standard errors.
    pub deviation: f64,
    pub samples: usize,
    pub accepted: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub estimates: Vec<McEstimate>,
    pub wall_clock_s: f64,
}

impl SuiteReport {
    /// Bit patterns of every residual and estimate field, in report order.
    pub fn residual_bits(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for c in &self.checks {
            out.extend([c.value.to_bits(), c.bound.to_bits(), c.samples as u64, c.errors as u64]);
        }
        for e in &self.estimates {
            out.extend([
                e.estimate.re.to_bits(),
                e.estimate.im.to_bits(),
                e.stderr[0].to_bits(),
                e.stderr[1].to_bits(),
                e.deviation.to_bits(),
                e.accepted as u64,
            ]);
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Compact JSON of a descriptor, used as a check label.
pub fn domain_label(d: &DomainDescriptor) -> String {
    serde_json::to_string(d).unwrap_or_else(|_| "domain".into())
}

/// Generator for job `index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

struct Acc {
    metric: &'static str,
    kind: BoundKind,
    bound: f64,
    value: f64,
    samples: usize,
    errors: usize,
    first_error: Option<String>,
}

impl Acc {
    fn new(metric: &'static str, kind: BoundKind, bound: f64) -> Self {
        let value = match kind {
            BoundKind::AtMost => 0.0,
            _ => f64::INFINITY,
        };
        Self {
            metric,
            kind,
            bound,
            value,
            samples: 0,
            errors: 0,
            first_error: None,
        }
    }

    fn at_most(metric: &'static str, cfg: &SuiteConfig, default: f64) -> Self {
        Self::new(metric, BoundKind::AtMost, cfg.tol(metric, default))
    }

    fn above(metric: &'static str, cfg: &SuiteConfig, default: f64) -> Self {
        Self::new(metric, BoundKind::Above, cfg.tol(metric, default))
    }

    /// Tracks the minimum without gating.
    fn info(metric: &'static str) -> Self {
        Self::new(metric, BoundKind::Info, f64::NAN)
    }

    fn push(&mut self, v: Result<f64>) {
        match v {
            Ok(x) if x.is_nan() => self.fail("NaN".into()),
            Ok(x) => {
                self.samples += 1;
                self.value = match self.kind {
                    BoundKind::AtMost => self.value.max(x),
                    _ => self.value.min(x),
                };
            }
            Err(e) => self.fail(e.to_string()),
        }
    }

    fn fail(&mut self, msg: String) {
        self.errors += 1;
        if self.first_error.is_none() {
            self.first_error = Some(msg);
        }
    }

    fn finish(self, name: &str) -> Check {
        let ok = match self.kind {
            BoundKind::AtMost => self.value <= self.bound,
            BoundKind::Above => self.value > self.bound,
            BoundKind::Info => true,
        };
        let value = if self.samples == 0 { f64::NAN } else { self.value };
        Check {
            name: name.to_string(),
            metric: self.metric.to_string(),
            value,
            bound: self.bound,
            kind: self.kind,
            samples: self.samples,
            errors: self.errors,
            first_error: self.first_error,
            pass: ok && self.errors == 0 && self.samples > 0 || self.kind == BoundKind::Info,
        }
    }
}

type Job<'a> = Box<dyn Fn(&mut ChaCha8Rng) -> Vec<Check> + Send + Sync + 'a>;

fn run_jobs(seed: u64, jobs: Vec<Job<'_>>) -> Vec<Check> {
    jobs.par_iter()
        .enumerate()
        .map(|(i, job)| job(&mut stream_rng(seed, i as u64)))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.suite != "all" && !SUITES.contains(&config.suite.as_str()) {
        return Err(Error::UnknownSuite(config.suite.clone()));
    }
    match config.threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| run_inner(config)),
        _ => run_inner(config),
    }
}

fn run_inner(config: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let (checks, estimates) = if config.suite == "all" {
        let mut checks = Vec::new();
        let mut estimates = Vec::new();
        for s in SUITES {
            let sub = SuiteConfig {
                suite: s.to_string(),
                ..config.clone()
            };
            let (c, e) = dispatch(&sub)?;
            checks.extend(c.into_iter().map(|mut c| {
                c.name = format!("{s}:{}", c.name);
                c
            }));
            estimates.extend(e.into_iter().map(|mut e| {
                e.name = format!("{s}:{}", e.name);
                e
            }));
        }
        (checks, estimates)
    } else {
        dispatch(config)?
    };
    let pass = !checks.is_empty() || !estimates.is_empty();
    let pass = pass && checks.iter().all(|c| c.pass) && estimates.iter().all(|e| e.pass);
    Ok(SuiteReport {
        suite: config.suite.clone(),
        pass,
        checks,
        estimates,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

fn dispatch(cfg: &SuiteConfig) -> Result<(Vec<Check>, Vec<McEstimate>)> {
    let checks = match cfg.suite.as_str() {
        "kernel_compare" => kernel_compare_suite(cfg)?,
        "reproducing" => return reproducing_suite(cfg),
        "transformation" => transformation_suite(cfg)?,
        "h_invariance" => h_invariance_suite(cfg)?,
        "group_law" => group_law_suite(cfg)?,
        "levi" => levi_suite(cfg)?,
        "shilov" => shilov_suite(cfg)?,
        "jacobian" => jacobian_suite(cfg)?,
        "tumanov" => tumanov_suite(cfg)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok((checks, Vec::new()))
}

fn hartogs_grid(cfg: &SuiteConfig, fibers: &[usize], exponents: &[f64]) -> Result<Vec<(String, HartogsDomain)>> {
    let mut out = Vec::new();
    for (name, d) in cfg.domains()? {
        for &n in &cfg.fibers_or(fibers) {
            for &s in &cfg.exponents_or(exponents) {
                out.push((format!("{name}/N={n}/s={s}"), HartogsDomain::new(d.clone(), n, s)?));
            }
        }
    }
    Ok(out)
}

fn kernel_compare_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let bases = match &cfg.domain {
        Some(d) => vec![(domain_label(d), Domain::from_descriptor(d)?)],
        None => vec![
            ("disc".to_string(), Domain::disc()),
            ("ball2".to_string(), Domain::ball(2)),
            ("bidisc".to_string(), Domain::product(vec![Domain::disc(), Domain::disc()])?),
        ],
    };
    let samples = cfg.samples_or(100);
    let mut jobs: Vec<Job> = Vec::new();
    for (name, base) in bases {
        for &n in &cfg.fibers_or(&[1, 2]) {
            for &s in &cfg.exponents_or(&[1.0, 2.0]) {
                let h = HartogsDomain::new(base.clone(), n, s)?;
                let label = format!("{name}/N={n}/s={s}");
                let trunc = cfg.truncation;
                jobs.push(Box::new(move |rng| {
                    let mut rel = Acc::at_most("rel_err", cfg, 1e-8);
                    let mut tail = Acc::info("tail_bound");
                    let mut literal = Acc::info("literal_prefactor_rel_err");
                    let origin = HartogsPoint::new(CVector::zeros(h.base().dim()), CVector::zeros(n));
                    let mut pairs = vec![(origin.clone(), origin)];
                    pairs.extend((0..samples).map(|_| (h.sample_series_point(rng), h.sample_series_point(rng))));
                    for (p, q) in &pairs {
                        match h.kernel_compare(p, q, trunc) {
                            Ok(c) => {
                                rel.push(Ok(c.rel_err));
                                tail.push(Ok(-c.tail_bound / c.series.norm()));
                                literal.push(
                                    h.kernel_operator_with(p, q, n as f64 + 1.0, n + 1)
                                        .map(|l| -(l - c.series).norm() / c.series.norm()),
                                );
                            }
                            Err(e) => rel.push(Err(e)),
                        }
                    }
                    let mut out = vec![rel.finish(&label), neg(tail.finish(&label)), neg(literal.finish(&label))];
                    if h.base() == &Domain::disc() && n == 1 && s == 1.0 {
                        let mut org = Acc::at_most("origin_rel_err", cfg, 1e-12);
                        let z = HartogsPoint::new(CVector::zeros(1), CVector::zeros(1));
                        let want = 3.0 / std::f64::consts::PI.powi(3);
                        org.push(h.kernel_operator(&z, &z).map(|k| (k - want).norm() / want));
                        out.push(org.finish(&label));
                    }
                    out
                }));
            }
        }
    }
    Ok(run_jobs(cfg.seed, jobs))
}

/// Info accumulators track minima; negate to report the maximum.
fn neg(mut c: Check) -> Check {
    c.value = -c.value;
    c
}

/// Monomial `∏ x_i^{e_i}` in the flat coordinates of a domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<usize>,
}

impl Monomial {
    pub fn eval(&self, x: &CVector) -> C64 {
        self.exponents
            .iter()
            .zip(x.iter())
            .fold(C64::new(1.0, 0.0), |acc, (&e, v)| acc * v.powu(e as u32))
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// All monomials in `dim` variables of degree at most `max_degree`.
    pub fn all(dim: usize, max_degree: usize) -> Vec<Self> {
        let mut out = vec![Self {
            exponents: vec![0; dim],
        }];
        for deg in 1..=max_degree {
            let mut cur = vec![0; dim];
            enumerate(&mut cur, 0, deg, &mut out);
        }
        out
    }

    /// Parses `1`, `x0`, `x0^2*x1`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        let mut exponents = vec![0; dim];
        let bad = || Error::InvalidParameter(format!("cannot parse monomial {s:?}; expected e.g. 1, x0, x0^2*x1"));
        if s.trim() == "1" {
            return Ok(Self { exponents });
        }
        for part in s.split('*') {
            let (var, pow) = match part.trim().split_once('^') {
                Some((v, p)) => (v, p.parse::<usize>().map_err(|_| bad())?),
                None => (part.trim(), 1),
            };
            let idx: usize = var.strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if idx >= dim {
                return Err(Error::DimensionMismatch {
                    what: "monomial variable",
                    expected: dim,
                    found: idx + 1,
                });
            }
            exponents[idx] += pow;
        }
        Ok(Self { exponents })
    }
}

fn enumerate(cur: &mut Vec<usize>, i: usize, left: usize, out: &mut Vec<Monomial>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(Monomial { exponents: cur.clone() });
        cur[i] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        enumerate(cur, i + 1, left - k, out);
    }
    cur[i] = 0;
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Bounded domain on which the Monte Carlo oracle integrates.
#[derive(Clone, Debug, PartialEq)]
pub enum McTarget {
    Base(Domain),
    Hartogs(HartogsDomain),
}

fn bounded_only(d: &Domain) -> Result<()> {
    if d.is_bounded() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "Monte Carlo integration needs a bounded realization; use disc, ball or their products".into(),
        ))
    }
}

impl McTarget {
    pub fn new(base: Domain, fiber: Option<(usize, f64)>) -> Result<Self> {
        bounded_only(&base)?;
        Ok(match fiber {
            None => Self::Base(base),
            Some((n, s)) => Self::Hartogs(HartogsDomain::new(base, n, s)?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Base(d) => d.dim(),
            Self::Hartogs(h) => h.dim(),
        }
    }

    /// Half-widths of the bounding box, one per complex coordinate.
    fn half_widths(&self) -> Result<Vec<f64>> {
        match self {
            Self::Base(d) => Ok(vec![1.0; d.dim()]),
            Self::Hartogs(h) => {
                // K(z, z) is smallest at the origin on balls and their products
                let d = h.base().dim();
                let z0 = CVector::zeros(d);
                let k0 = h.base().kernel_eval(&z0, &z0)?.re;
                let r = k0.powf(-h.s() / 2.0);
                let mut w = vec![1.0; d];
                w.extend(std::iter::repeat_n(r, h.n_fiber()));
                Ok(w)
            }
        }
    }

    fn inside(&self, x: &CVector) -> bool {
        match self {
            Self::Base(d) => d.classify(x, 0.0).map(|c| c.is_interior()).unwrap_or(false),
            Self::Hartogs(h) => {
                let p = HartogsPoint::from_flat(h.base().dim(), x);
                h.contains(&p, 0.0).map(|c| c.status == HartogsStatus::Interior).unwrap_or(false)
            }
        }
    }

    pub fn kernel(&self, p: &CVector, q: &CVector) -> Result<C64> {
        match self {
            Self::Base(d) => d.kernel_eval(p, q),
            Self::Hartogs(h) => {
                let d = h.base().dim();
                h.kernel_operator(&HartogsPoint::from_flat(d, p), &HartogsPoint::from_flat(d, q))
            }
        }
    }

    /// Interior test point `(0.3 − 0.2i, …)` with fiber at `h = 0.09`.
    pub fn off_center_point(&self) -> Result<CVector> {
        match self {
            Self::Base(d) => Ok(off_center(d)),
            Self::Hartogs(h) => {
                let z = off_center(h.base());
                let k = h.base().kernel_eval(&z, &z)?.re;
                let r = 0.3 * k.powf(-h.s() / 2.0) / (h.n_fiber() as f64).sqrt();
                Ok(concat(vec![z, CVector::from_element(h.n_fiber(), C64::new(r, 0.0))]))
            }
        }
    }
}

fn off_center(d: &Domain) -> CVector {
    match d {
        Domain::Product(fs) => concat(fs.iter().map(off_center).collect()),
        _ => {
            let m = d.dim();
            CVector::from_element(m, C64::new(0.3, -0.2) / (m as f64).sqrt())
        }
    }
}

/// `∫ f(q) K(p, q) dV(q)` for each `(p, f)` from one shared sample stream.
pub fn mc_reproducing_batch(
    target: &McTarget,
    points: &[CVector],
    functions: &[Monomial],
    samples: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let dim = target.dim();
    for p in points {
        crate::error::check_dim("evaluation point", dim, p.len())?;
        if !target.inside(p) {
            return Err(Error::NotInterior("evaluation point is not interior".into()));
        }
    }
    for f in functions {
        crate::error::check_dim("monomial", dim, f.exponents.len())?;
    }
    let widths = target.half_widths()?;
    let volume: f64 = widths.iter().map(|w| 4.0 * w * w).product();
    let ne = points.len() * functions.len();
    let per_block = samples / MC_BLOCKS as usize;
    let extra = samples % MC_BLOCKS as usize;
    let blocks: Vec<Result<(Vec<[f64; 4]>, usize)>> = (0..MC_BLOCKS)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let n = per_block + usize::from((b as usize) < extra);
            let mut sums = vec![[0.0; 4]; ne];
            let mut accepted = 0;
            for _ in 0..n {
                let q = CVector::from_iterator(
                    dim,
                    widths
                        .iter()
                        .map(|&w| C64::new(rng.random_range(-w..w), rng.random_range(-w..w))),
                );
                if !target.inside(&q) {
                    continue;
                }
                accepted += 1;
                let fs: Vec<C64> = functions.iter().map(|f| f.eval(&q)).collect();
                for (i, p) in points.iter().enumerate() {
                    let k = target.kernel(p, &q)?;
                    for (j, fv) in fs.iter().enumerate() {
                        let g = fv * k;
                        let s = &mut sums[i * functions.len() + j];
                        s[0] += g.re;
                        s[1] += g.im;
                        s[2] += g.re * g.re;
                        s[3] += g.im * g.im;
                    }
                }
            }
            Ok((sums, accepted))
        })
        .collect();
    let mut total = vec![[0.0; 4]; ne];
    let mut accepted = 0;
    for b in blocks {
        let (s, a) = b?;
        accepted += a;
        for (t, x) in total.iter_mut().zip(s) {
            for k in 0..4 {
                t[k] += x[k];
            }
        }
    }
    let n = samples as f64;
    let mut out = Vec::with_capacity(ne);
    for (i, p) in points.iter().enumerate() {
        for (j, f) in functions.iter().enumerate() {
            let s = total[i * functions.len() + j];
            let mean = [s[0] / n, s[1] / n];
            let se = |k: usize| {
                let var = (s[k + 2] / n - mean[k] * mean[k]).max(0.0) * n / (n - 1.0).max(1.0);
                volume * (var / n).sqrt()
            };
            let stderr = [se(0), se(1)];
            let estimate = C64::new(volume * mean[0], volume * mean[1]);
            let want = f.eval(p);
            let dev = |d: f64, e: f64| {
                if d == 0.0 {
                    0.0
                } else if e == 0.0 {
                    f64::INFINITY
                } else {
                    d.abs() / e
                }
            };
            let deviation = dev(estimate.re - want.re, stderr[0]).max(dev(estimate.im - want.im, stderr[1]));
            out.push(McEstimate {
                name: format!("p{i}/{f}"),
                function: f.to_string(),
                point: p.clone(),
                estimate,
                stderr,
                target: want,
                deviation,
                samples,
                accepted,
                pass: deviation <= STDERR_BAND,
            });
        }
    }
    Ok(out)
}

pub fn mc_reproducing(target: &McTarget, f: &Monomial, p: &CVector, samples: usize, seed: u64) -> Result<McEstimate> {
    Ok(mc_reproducing_batch(target, std::slice::from_ref(p), std::slice::from_ref(f), samples, seed)?.remove(0))
}

fn reproducing_suite(cfg: &SuiteConfig) -> Result<(Vec<Check>, Vec<McEstimate>)> {
    let targets = match &cfg.domain {
        Some(d) => {
            let base = Domain::from_descriptor(d)?;
            let label = domain_label(d);
            if cfg.fibers.is_empty() && cfg.exponents.is_empty() {
                vec![(label, McTarget::new(base, None)?)]
            } else {
                let mut v = Vec::new();
                for &n in &cfg.fibers_or(&[1]) {
                    for &s in &cfg.exponents_or(&[1.0]) {
                        v.push((format!("{label}/N={n}/s={s}"), McTarget::new(base.clone(), Some((n, s)))?));
                    }
                }
                v
            }
        }
        None => vec![
            ("disc".to_string(), McTarget::new(Domain::disc(), None)?),
            (
                "bidisc".to_string(),
                McTarget::new(Domain::product(vec![Domain::disc(), Domain::disc()])?, None)?,
            ),
            ("disc/N=1/s=1".to_string(), McTarget::new(Domain::disc(), Some((1, 1.0)))?),
        ],
    };
    let samples = cfg.samples_or(1_000_000);
    let band = cfg.tol("stderr_band", STDERR_BAND);
    let mut estimates = Vec::new();
    let mut checks = Vec::new();
    for (i, (label, t)) in targets.iter().enumerate() {
        let points = vec![CVector::zeros(t.dim()), t.off_center_point()?];
        let fs = Monomial::all(t.dim(), 2);
        let mut acc = Acc::at_most("stderr_band", cfg, STDERR_BAND);
        // domains get disjoint stream ranges
        let seed = cfg.seed ^ ((i as u64 + 1) << 48);
        for mut e in mc_reproducing_batch(t, &points, &fs, samples, seed)? {
            e.pass = e.deviation <= band;
            acc.push(Ok(e.deviation));
            e.name = format!("{label}/{}", e.name);
            estimates.push(e);
        }
        checks.push(acc.finish(label));
    }
    Ok((checks, estimates))
}

/// `|K′(φp, φq) Jφ(p) conj Jφ(q) − K(p, q)| / √(K(p,p) K(q,q))`.
pub fn normalized_transformation_residual(
    source: &Domain,
    target: &Domain,
    map: &BaseMap,
    p: &CVector,
    q: &CVector,
) -> Result<f64> {
    let r = source.transformation_residual(target, map, p, q)?;
    let scale = (source.kernel_eval(p, p)?.re * source.kernel_eval(q, q)?.re).sqrt();
    Ok(r / scale)
}

fn cayley_for(d: &Domain) -> Option<(CayleyTransform, Domain)> {
    match d {
        Domain::Ball { m } => Some((CayleyTransform::to_siegel(m - 1), Domain::siegel_ball(m - 1))),
        Domain::Siegel(s) => match s.kind() {
            SiegelKind::HalfPlane => Some((CayleyTransform::to_bounded(0), Domain::disc())),
            SiegelKind::SiegelBall { m } => Some((CayleyTransform::to_bounded(*m), Domain::ball(m + 1))),
            _ => None,
        },
        Domain::Product(_) => None,
    }
}

fn transformation_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(500);
    let mut jobs: Vec<Job> = Vec::new();
    for (name, d) in cfg.domains()? {
        let family = match &d {
            Domain::Ball { m: 1 } => "mobius",
            Domain::Ball { .. } => "ball",
            Domain::Siegel(_) => "affine",
            Domain::Product(_) => "product",
        };
        let dd = d.clone();
        let label = format!("{family}/{name}");
        jobs.push(Box::new(move |rng| {
            let mut acc = Acc::at_most("residual", cfg, 1e-10);
            for _ in 0..samples {
                let r = random_automorphism(&dd, rng).and_then(|phi| {
                    let (p, q) = (dd.sample_interior(rng), dd.sample_interior(rng));
                    normalized_transformation_residual(&dd, &dd, &phi, &p, &q)
                });
                acc.push(r);
            }
            vec![acc.finish(&label)]
        }));
        if let Some((cayley, target)) = cayley_for(&d) {
            let label = format!("cayley/{name}");
            jobs.push(Box::new(move |rng| {
                let mut acc = Acc::at_most("residual", cfg, 1e-10);
                let map = BaseMap::Cayley(cayley);
                for _ in 0..samples {
                    let (p, q) = (d.sample_interior(rng), d.sample_interior(rng));
                    acc.push(normalized_transformation_residual(&d, &target, &map, &p, &q));
                }
                vec![acc.finish(&label)]
            }));
        }
    }
    Ok(run_jobs(cfg.seed, jobs))
}

fn h_invariance_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(1000);
    let jobs: Vec<Job> = hartogs_grid(cfg, &[1, 2, 3], &[1.0, 1.5, 2.0])?
        .into_iter()
        .map(|(label, h)| -> Job {
            Box::new(move |rng| {
                let mut res = Acc::at_most("h_residual", cfg, 1e-10);
                let mut cls = Acc::at_most("class_mismatch", cfg, 0.0);
                for _ in 0..samples {
                    let phi = match random_induced(&h, rng) {
                        Ok(phi) => phi,
                        Err(e) => {
                            res.push(Err(e));
                            continue;
                        }
                    };
                    let p = h.sample_interior(rng);
                    res.push(
                        phi.apply(&p)
                            .and_then(|img| Ok((h.h_value(&img)? - h.h_value(&p)?).abs())),
                    );
                    let b0 = h.sample_boundary0(rng);
                    let bb = h.sample_boundary_base(rng);
                    let mut bad = 0.0;
                    for (pt, want) in [
                        (&p, HartogsStatus::Interior),
                        (&b0, HartogsStatus::Boundary0),
                        (&bb, HartogsStatus::BoundaryBase),
                    ] {
                        match phi.apply(pt).and_then(|img| h.contains(&img, 1e-8)) {
                            Ok(c) if c.status == want => {}
                            Ok(_) => bad += 1.0,
                            Err(e) => {
                                cls.push(Err(e));
                            }
                        }
                    }
                    cls.push(Ok(bad));
                }
                vec![res.finish(&label), cls.finish(&label)]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

fn point_residual(a: &HartogsPoint, b: &HartogsPoint) -> f64 {
    (a.to_flat() - b.to_flat()).norm() / (1.0 + b.to_flat().norm())
}

fn group_law_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(200);
    let jobs: Vec<Job> = hartogs_grid(cfg, &[1, 2], &[1.0, 1.5, 2.0])?
        .into_iter()
        .map(|(label, h)| -> Job {
            Box::new(move |rng| {
                let integer = h.s().fract() == 0.0;
                let mut comp = Acc::at_most("compose_residual", cfg, 1e-10);
                let mut inv = Acc::at_most("inverse_residual", cfg, 1e-10);
                let mut phase = if integer {
                    Acc::at_most("phase_defect", cfg, 0.0)
                } else {
                    Acc::info("phase_defect")
                };
                let mut spread = Acc::at_most("phase_spread", cfg, 1e-6);
                for _ in 0..samples {
                    let (phi, psi) = match (random_induced(&h, rng), random_induced(&h, rng)) {
                        (Ok(a), Ok(b)) => (a, b),
                        (Err(e), _) | (_, Err(e)) => {
                            comp.push(Err(e));
                            continue;
                        }
                    };
                    let p = h.sample_interior(rng);
                    match phi.compose(&psi) {
                        Ok((c, ph)) => {
                            comp.push(
                                psi.apply(&p)
                                    .and_then(|x| phi.apply(&x))
                                    .and_then(|want| Ok(point_residual(&c.apply(&p)?, &want))),
                            );
                            phase.push(Ok(if integer { ph.angle.abs() } else { -ph.angle.abs() }));
                            spread.push(Ok(ph.spread));
                        }
                        Err(e) => comp.push(Err(e)),
                    }
                    match phi.inverse() {
                        Ok((i, ph)) => {
                            inv.push(
                                phi.apply(&p)
                                    .and_then(|x| i.apply(&x))
                                    .map(|back| point_residual(&back, &p)),
                            );
                            spread.push(Ok(ph.spread));
                        }
                        Err(e) => inv.push(Err(e)),
                    }
                }
                let phase = if integer { phase.finish(&label) } else { neg(phase.finish(&label)) };
                vec![comp.finish(&label), inv.finish(&label), phase, spread.finish(&label)]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

fn levi_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(1000);
    let jobs: Vec<Job> = hartogs_grid(cfg, &[1, 2], &[0.5, 1.0, 1.5, 2.0])?
        .into_iter()
        .map(|(label, h)| -> Job {
            Box::new(move |rng| {
                let mut eig = Acc::above("min_eig", cfg, 0.0);
                let mut fd = Acc::at_most("fd_residual", cfg, 1e-5);
                let mut tan = Acc::at_most("tangency_residual", cfg, 1e-10);
                let mut closed = Acc::at_most("closed_form_residual", cfg, 1e-8);
                let mut alt = Acc::info("inverse_coefficient_residual");
                for _ in 0..samples {
                    let p = h.sample_boundary0(rng);
                    match h.levi_certificate(&p, 1e-9) {
                        Ok(r) => {
                            eig.push(Ok(r.min_eig));
                            fd.push(Ok(r.fd_residual));
                            tan.push(Ok(r.tangency_residual));
                            closed.push(Ok(r.closed_form_residual));
                            alt.push(Ok(r.inverse_coefficient_residual));
                        }
                        Err(e) => eig.push(Err(e)),
                    }
                }
                vec![
                    eig.finish(&label),
                    fd.finish(&label),
                    tan.finish(&label),
                    closed.finish(&label),
                    alt.finish(&label),
                ]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

/// Point of the Shilov boundary: `Im w = F(u, u)` on Siegel factors, the
/// unit sphere on ball factors.
pub fn sample_shilov<R: Rng + ?Sized>(d: &Domain, rng: &mut R) -> CVector {
    match d {
        Domain::Ball { m } => {
            let v = random_cvector(*m, 1.0, rng);
            v.unscale(v.norm())
        }
        Domain::Siegel(s) => s.sample_shilov(rng).to_flat(),
        Domain::Product(fs) => concat(fs.iter().map(|f| sample_shilov(f, rng)).collect()),
    }
}

/// Distance-like residual of `z` from the Shilov boundary.
pub fn shilov_residual(d: &Domain, z: &CVector) -> Result<f64> {
    crate::error::check_dim("point", d.dim(), z.len())?;
    match d {
        Domain::Ball { .. } => Ok((z.norm() - 1.0).abs()),
        Domain::Siegel(s) => Ok(s.shilov_membership(&SiegelPoint::from_flat(s.n(), z), 0.0)?.1),
        Domain::Product(fs) => fs
            .iter()
            .zip(Domain::factor_offsets(fs))
            .map(|(f, (o, n))| shilov_residual(f, &z.rows(o, n).into_owned()))
            .try_fold(0.0, |a, r| Ok(f64::max(a, r?))),
    }
}

fn shilov_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(500);
    let jobs: Vec<Job> = cfg
        .domains()?
        .into_iter()
        .map(|(name, d)| -> Job {
            Box::new(move |rng| {
                let mut acc = Acc::at_most("shilov_residual", cfg, 1e-9);
                for _ in 0..samples {
                    acc.push(random_automorphism(&d, rng).and_then(|phi| {
                        let x = sample_shilov(&d, rng);
                        shilov_residual(&d, &phi.apply(&x)?)
                    }));
                }
                vec![acc.finish(&name)]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

fn jacobian_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(20);
    let jobs: Vec<Job> = hartogs_grid(cfg, &[1, 2], &[1.0, 1.5, 2.0])?
        .into_iter()
        .map(|(label, h)| -> Job {
            Box::new(move |rng| {
                let mut dz = Acc::at_most("df2_dz_norm", cfg, 1e-8);
                let mut unit = Acc::at_most("unitary_defect", cfg, 1e-8);
                let mut dzeta = Acc::at_most("df1_dzeta_norm", cfg, 1e-8);
                let mut step = Acc::at_most("step_discrepancy", cfg, 1e-6);
                for _ in 0..samples {
                    let z0 = h.base().sample_interior(rng);
                    let rep = random_stabilizer(h.base(), &z0, rng).and_then(|base| {
                        let u = random_unitary(h.n_fiber(), rng);
                        crate::automorphisms::InducedHartogsAutomorphism::new(base, u, h.s())?.jacobian_block(&z0)
                    });
                    match rep {
                        Ok(r) => {
                            dz.push(Ok(r.df2_dz_norm));
                            unit.push(Ok(r.unitary_defect));
                            dzeta.push(Ok(r.df1_dzeta_norm));
                            step.push(Ok(r.step_discrepancy));
                        }
                        Err(e) => dz.push(Err(e)),
                    }
                }
                vec![dz.finish(&label), unit.finish(&label), dzeta.finish(&label), step.finish(&label)]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

fn tumanov_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.samples_or(100);
    let jobs: Vec<Job> = cfg
        .domains()?
        .into_iter()
        .map(|(name, d)| -> Job {
            Box::new(move |rng| {
                let mut acc = Acc::above("min_abs_r", cfg, 1e-6);
                for _ in 0..samples {
                    let (p, q) = (d.sample_interior(rng), d.sample_interior(rng));
                    acc.push(d.tumanov_r(&p, &q).map(|r| r.norm()));
                }
                vec![acc.finish(&name)]
            })
        })
        .collect();
    Ok(run_jobs(cfg.seed, jobs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn monomials_up_to_degree_two() {
        assert_eq!(Monomial::all(1, 2).len(), 3);
        assert_eq!(Monomial::all(2, 2).len(), 6);
        assert_eq!(Monomial::all(3, 2).len(), 10);
        let m = Monomial::parse("x0^2*x1", 2).unwrap();
        assert_eq!(m.exponents, vec![2, 1]);
        assert_eq!(m.to_string(), "x0^2*x1");
        assert_eq!(Monomial::parse("1", 2).unwrap().degree(), 0);
        assert!(Monomial::parse("x2", 2).is_err());
        assert!(Monomial::parse("y", 2).is_err());
    }

    #[test]
    fn disc_constant_function() {
        let t = McTarget::new(Domain::disc(), None).unwrap();
        let f = Monomial::parse("1", 1).unwrap();
        let e = mc_reproducing(&t, &f, &CVector::zeros(1), 200_000, 1).unwrap();
        assert!(e.deviation <= 3.0, "{e:?}");
        assert!((e.estimate.re - 1.0).abs() < 0.02);
    }

    #[test]
    fn disc_odd_function_at_origin() {
        let t = McTarget::new(Domain::disc(), None).unwrap();
        let f = Monomial::parse("x0", 1).unwrap();
        let e = mc_reproducing(&t, &f, &CVector::zeros(1), 200_000, 2).unwrap();
        assert!(e.deviation <= 3.0, "{e:?}");
    }

    #[test]
    fn hartogs_constant_function() {
        let t = McTarget::new(Domain::disc(), Some((1, 1.0))).unwrap();
        let f = Monomial::parse("1", 2).unwrap();
        let e = mc_reproducing(&t, &f, &CVector::zeros(2), 200_000, 3).unwrap();
        assert!(e.deviation <= 3.0, "{e:?}");
        // K_H(0, q) = 3/π³ on the whole domain of volume π³/3
        assert!((e.estimate.re - 1.0).abs() < 0.05);
    }

    #[test]
    fn unbounded_rejected() {
        assert!(matches!(McTarget::new(Domain::half_plane(), None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mc_is_thread_independent() {
        let t = McTarget::new(Domain::disc(), None).unwrap();
        let f = Monomial::all(1, 2);
        let p = [CVector::from_element(1, C64::new(0.2, 0.1))];
        let a = mc_reproducing_batch(&t, &p, &f, 10_000, 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mc_reproducing_batch(&t, &p, &f, 10_000, 7).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite(&SuiteConfig::new("nope")), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn transformation_disc() {
        let cfg = SuiteConfig::new("transformation").with_domain(DomainDescriptor::Disc);
        let r = run_suite(&cfg).unwrap();
        assert!(r.pass, "{:#?}", r.checks);
        assert_eq!(r.checks.len(), 2);
        assert!(r.checks.iter().all(|c| c.value <= 1e-10));
    }

    #[test]
    fn group_law_disc_s2() {
        let h = HartogsDescriptor {
            base: DomainDescriptor::Disc,
            n_fiber: 1,
            s: 2.0,
        };
        let r = run_suite(&SuiteConfig::new("group_law").with_hartogs(&h).with_samples(50)).unwrap();
        assert!(r.pass, "{:#?}", r.checks);
        let ph = r.checks.iter().find(|c| c.metric == "phase_defect").unwrap();
        assert_eq!(ph.value, 0.0);
    }

    #[test]
    fn origin_value() {
        let h = HartogsDomain::new(Domain::disc(), 1, 1.0).unwrap();
        let z = HartogsPoint::new(CVector::zeros(1), CVector::zeros(1));
        let k = h.kernel_operator(&z, &z).unwrap();
        assert!((k.re - 3.0 / PI.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn config_roundtrip() {
        let cfg = SuiteConfig::new("levi")
            .with_domain(DomainDescriptor::Ball { m: 2 })
            .with_samples(3)
            .with_tolerance("min_eig", 0.0);
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SuiteConfig>(&s).unwrap(), cfg);
        let bare: SuiteConfig = serde_json::from_str(r#"{"suite":"shilov"}"#).unwrap();
        assert_eq!(bare, SuiteConfig::new("shilov"));
    }

    #[test]
    fn small_runs_deterministic() {
        for s in ["shilov", "tumanov", "jacobian"] {
            let cfg = SuiteConfig::new(s).with_samples(3).with_seed(11);
            let a = run_suite(&cfg).unwrap();
            let b = run_suite(&cfg.clone().with_threads(1)).unwrap();
            assert_eq!(a.residual_bits(), b.residual_bits(), "{s}");
        }
    }
}
