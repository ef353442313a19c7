mod input;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hartogs_core::automorphisms::{InducedHartogsAutomorphism, MapDescriptor};
use hartogs_core::hartogs::HartogsPoint;
use hartogs_core::verification::{self, primary_metric, SuiteConfig};
use hartogs_core::wire::{WireJet, WirePoint};
use hartogs_core::{BaseMap, CMatrix, Domain, SuiteReport, DEFAULT_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use input::{parse_domain, parse_map, parse_point, parse_points, Target};
use output::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "hartogs", version, about = "Bergman kernels, automorphisms and Levi certificates for Hartogs domains")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = hartogs_core::hartogs::DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; changes speed only.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Domain descriptors.
    Domain {
        #[command(subcommand)]
        cmd: DomainCmd,
    },
    /// Classify a point.
    Member {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        point: String,
    },
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
    Aut {
        #[command(subcommand)]
        cmd: AutCmd,
    },
    Shilov {
        #[command(subcommand)]
        cmd: ShilovCmd,
    },
    Levi {
        #[command(subcommand)]
        cmd: LeviCmd,
    },
    /// Run a verification suite; exit 0 on pass, 1 on fail.
    Verify {
        suite: String,
        #[arg(long)]
        domain: Option<String>,
        /// Full SuiteConfig JSON; flags given explicitly override it.
        #[arg(long)]
        config: Option<String>,
    },
    Sample {
        #[command(subcommand)]
        cmd: SampleCmd,
    },
}

#[derive(Subcommand, Debug)]
enum DomainCmd {
    /// Print the normalized descriptor, or the catalog without --domain.
    Show {
        #[arg(long)]
        domain: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum KernelCmd {
    Eval {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Hartogs domains only.
        #[arg(long, value_enum, default_value_t = Method::Operator)]
        method: Method,
    },
    /// `{value, grad, hess}` of log K on the diagonal.
    Jet {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        point: String,
    },
    /// Operator formula against the orthonormal series.
    Compare {
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Operator,
    Series,
}

#[derive(Subcommand, Debug)]
enum AutCmd {
    Apply {
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: String,
        /// Exponent for base maps applied to points with a fiber part.
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// `outer ∘ inner`.
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
    Inverse {
        #[arg(long)]
        map: String,
    },
    /// Jacobian blocks of an induced map at a fixed point `(z0, 0)`.
    Jacobian {
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum ShilovCmd {
    Check {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum LeviCmd {
    Check {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        point: String,
    },
    /// Certificates for points from a file, or for --samples sampled
    /// boundary points.
    Batch {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        input: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SampleCmd {
    Boundary {
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum)]
        stratum: Stratum,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Stratum {
    B0,
    Base,
}

/// Bad input; exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: anyhow::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| Usage(e).into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<Usage>() { 2 } else { 1 })
        }
    }
}

fn rng(g: &Global) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(g.seed)
}

fn hpoint(p: WirePoint) -> HartogsPoint {
    p.into()
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let g = &cli.global;
    match &cli.command {
        Command::Domain {
            cmd: DomainCmd::Show { domain },
        } => match domain {
            Some(d) => {
                let t = usage(parse_domain(d))?;
                emit(g.format, &t.descriptor_json(), None)?;
            }
            None => {
                let cat: Vec<_> = Domain::catalog()
                    .into_iter()
                    .map(|(n, d)| json!({"name": n, "descriptor": d.descriptor()}))
                    .collect();
                let rows = cat
                    .iter()
                    .map(|r| json!({"name": r["name"], "descriptor": r["descriptor"].to_string()}))
                    .collect();
                emit(g.format, &cat, Some(rows))?;
            }
        },
        Command::Member { domain, point } => {
            let t = usage(parse_domain(domain))?;
            let p = usage(parse_point(point, t.base().dim()))?;
            let tol = g.tol.unwrap_or(DEFAULT_TOL);
            match &t {
                Target::Hartogs(_, h) => emit(g.format, &h.contains(&hpoint(p), tol)?, None)?,
                Target::Base(_, d) => {
                    if !p.zeta.is_empty() {
                        return Err(Usage(anyhow::anyhow!("point has fiber coordinates but the domain has none")).into());
                    }
                    emit(g.format, &d.classify(&p.z, tol)?, None)?
                }
            }
        }
        Command::Kernel { cmd } => return kernel(g, cmd),
        Command::Aut { cmd } => aut(g, cmd)?,
        Command::Shilov {
            cmd: ShilovCmd::Check { domain, point },
        } => {
            let t = usage(parse_domain(domain))?;
            let p = usage(parse_point(point, t.base().dim()))?;
            let r = verification::shilov_residual(t.base(), &p.z)?;
            let tol = g.tol.unwrap_or(DEFAULT_TOL);
            emit(g.format, &json!({"on_shilov": r <= tol, "residual": r}), None)?;
        }
        Command::Levi { cmd } => levi(g, cmd)?,
        Command::Verify { suite, domain, config } => return verify(g, suite, domain.as_deref(), config.as_deref()),
        Command::Sample {
            cmd: SampleCmd::Boundary { domain, stratum },
        } => {
            let t = usage(parse_domain(domain))?;
            let h = usage(t.hartogs())?;
            let mut r = rng(g);
            let pts: Vec<WirePoint> = (0..g.samples.unwrap_or(1))
                .map(|_| {
                    match stratum {
                        Stratum::B0 => h.sample_boundary0(&mut r),
                        Stratum::Base => h.sample_boundary_base(&mut r),
                    }
                    .into()
                })
                .collect();
            emit(g.format, &pts, None)?;
        }
    }
    Ok(true)
}

fn kernel(g: &Global, cmd: &KernelCmd) -> anyhow::Result<bool> {
    match cmd {
        KernelCmd::Eval { domain, p, q, method } => {
            let t = usage(parse_domain(domain))?;
            let d = t.base().dim();
            let (p, q) = (usage(parse_point(p, d))?, usage(parse_point(q, d))?);
            let value = match (&t, method) {
                (Target::Base(_, dom), Method::Operator) => dom.kernel_eval(&p.z, &q.z)?,
                (Target::Base(..), Method::Series) => bail!(Usage(anyhow::anyhow!("--method series needs a Hartogs domain"))),
                (Target::Hartogs(_, h), Method::Operator) => h.kernel_operator(&hpoint(p), &hpoint(q))?,
                (Target::Hartogs(_, h), Method::Series) => {
                    let s = h.kernel_series(&hpoint(p), &hpoint(q), g.truncation)?;
                    return emit(g.format, &json!({"value": [s.value.re, s.value.im], "tail_bound": s.bound}), None)
                        .map(|_| true);
                }
            };
            emit(g.format, &json!({"value": [value.re, value.im]}), None)?;
        }
        KernelCmd::Jet { domain, point } => {
            let t = usage(parse_domain(domain))?;
            let p = usage(parse_point(point, t.base().dim()))?;
            let j = t.base().kernel_jet(&p.z)?;
            emit(
                g.format,
                &WireJet {
                    value: j.value,
                    grad: j.grad,
                    hess: j.hess,
                },
                None,
            )?;
        }
        KernelCmd::Compare { domain, pairs } => {
            let t = usage(parse_domain(domain))?;
            let h = usage(t.hartogs())?;
            let mut r = rng(g);
            let tol = g.tol.unwrap_or(1e-8);
            let origin = HartogsPoint::new(hartogs_core::CVector::zeros(h.base().dim()), hartogs_core::CVector::zeros(h.n_fiber()));
            let mut max_rel: f64 = 0.0;
            let mut max_tail: f64 = 0.0;
            let mut n = 0;
            for i in 0..=*pairs {
                let (p, q) = if i == 0 {
                    (origin.clone(), origin.clone())
                } else {
                    (h.sample_series_point(&mut r), h.sample_series_point(&mut r))
                };
                let c = h.kernel_compare(&p, &q, g.truncation)?;
                max_rel = max_rel.max(c.rel_err);
                max_tail = max_tail.max(c.tail_bound / c.series.norm());
                n += 1;
            }
            let pass = max_rel <= tol;
            emit(
                g.format,
                &json!({"pairs": n, "max_rel_err": max_rel, "max_rel_tail_bound": max_tail, "tol": tol, "pass": pass}),
                None,
            )?;
            return Ok(pass);
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct Composed {
    map: MapDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_defect: Option<hartogs_core::PhaseDefect>,
}

enum AnyMap {
    Base(BaseMap),
    Induced(InducedHartogsAutomorphism),
}

fn load_map(arg: &str) -> anyhow::Result<AnyMap> {
    let d = usage(parse_map(arg))?;
    Ok(match d {
        MapDescriptor::Induced { .. } => AnyMap::Induced(InducedHartogsAutomorphism::from_descriptor(&d)?),
        _ => AnyMap::Base(BaseMap::from_descriptor(&d)?),
    })
}

fn aut(g: &Global, cmd: &AutCmd) -> anyhow::Result<()> {
    match cmd {
        AutCmd::Apply { map, point, s } => {
            let m = load_map(map)?;
            let dim = match &m {
                AnyMap::Base(b) => b.dim(),
                AnyMap::Induced(i) => i.base().dim(),
            };
            let p = usage(parse_point(point, dim))?;
            let out: WirePoint = match m {
                AnyMap::Base(b) if p.zeta.is_empty() => WirePoint {
                    z: b.apply(&p.z)?,
                    zeta: p.zeta,
                },
                // a fiber part makes the base map act as the induced map with U = I
                AnyMap::Base(b) => {
                    let n = p.zeta.len();
                    InducedHartogsAutomorphism::new(b, CMatrix::identity(n, n), *s)?.apply(&hpoint(p))?.into()
                }
                AnyMap::Induced(i) => i.apply(&hpoint(p))?.into(),
            };
            emit(g.format, &out, None)?;
        }
        AutCmd::Compose { outer, inner } => {
            let out = match (load_map(outer)?, load_map(inner)?) {
                (AnyMap::Base(a), AnyMap::Base(b)) => Composed {
                    map: BaseMap::compose(&a, &b)?.to_descriptor(),
                    phase_defect: None,
                },
                (AnyMap::Induced(a), AnyMap::Induced(b)) => {
                    let (c, ph) = a.compose(&b)?;
                    Composed {
                        map: c.to_descriptor(),
                        phase_defect: Some(ph),
                    }
                }
                _ => bail!(Usage(anyhow::anyhow!("cannot compose a base map with an induced map"))),
            };
            emit(g.format, &out, None)?;
        }
        AutCmd::Inverse { map } => {
            let out = match load_map(map)? {
                AnyMap::Base(b) => Composed {
                    map: b.inverse()?.to_descriptor(),
                    phase_defect: None,
                },
                AnyMap::Induced(i) => {
                    let (inv, ph) = i.inverse()?;
                    Composed {
                        map: inv.to_descriptor(),
                        phase_defect: Some(ph),
                    }
                }
            };
            emit(g.format, &out, None)?;
        }
        AutCmd::Jacobian { map, point } => {
            let i = match load_map(map)? {
                AnyMap::Induced(i) => i,
                AnyMap::Base(_) => bail!(Usage(anyhow::anyhow!("jacobian needs an induced map descriptor"))),
            };
            let p = usage(parse_point(point, i.base().dim()))?;
            emit(g.format, &i.jacobian_block(&p.z)?, None)?;
        }
    }
    Ok(())
}

fn levi_row(r: &hartogs_core::LeviReport) -> serde_json::Value {
    json!({
        "min_eig": r.min_eig,
        "tangency_residual": r.tangency_residual,
        "fd_residual": r.fd_residual,
        "closed_form_residual": r.closed_form_residual,
        "inverse_coefficient_residual": r.inverse_coefficient_residual,
        "matching_coefficient": r.matching_coefficient,
    })
}

fn levi(g: &Global, cmd: &LeviCmd) -> anyhow::Result<()> {
    let tol = g.tol.unwrap_or(DEFAULT_TOL);
    match cmd {
        LeviCmd::Check { domain, point } => {
            let t = usage(parse_domain(domain))?;
            let h = usage(t.hartogs())?;
            let p = usage(parse_point(point, h.base().dim()))?;
            let r = h.levi_certificate(&hpoint(p), tol)?;
            let row = levi_row(&r);
            emit(g.format, &r, Some(vec![row]))?;
        }
        LeviCmd::Batch { domain, input } => {
            let t = usage(parse_domain(domain))?;
            let h = usage(t.hartogs())?;
            let pts: Vec<HartogsPoint> = match input {
                Some(f) => usage(parse_points(f, h.base().dim()))?.into_iter().map(hpoint).collect(),
                None => {
                    let mut r = rng(g);
                    (0..g.samples.unwrap_or(100)).map(|_| h.sample_boundary0(&mut r)).collect()
                }
            };
            let reports = pts
                .iter()
                .map(|p| h.levi_certificate(p, tol))
                .collect::<hartogs_core::Result<Vec<_>>>()
                .context("levi certificate")?;
            let rows = reports
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut v = levi_row(r);
                    v["index"] = json!(i);
                    v
                })
                .collect();
            emit(g.format, &reports, Some(rows))?;
        }
    }
    Ok(())
}

fn verify(g: &Global, suite: &str, domain: Option<&str>, config: Option<&str>) -> anyhow::Result<bool> {
    let mut cfg = match config {
        Some(c) => usage(input::parse_json::<SuiteConfig>(c, "suite config"))?,
        None => SuiteConfig::new(suite),
    };
    cfg.suite = suite.to_string();
    cfg.seed = if config.is_some() && g.seed == 0 { cfg.seed } else { g.seed };
    if let Some(d) = domain {
        cfg = match usage(parse_domain(d))? {
            Target::Base(desc, _) => cfg.with_domain(desc),
            Target::Hartogs(desc, _) => cfg.with_hartogs(&desc),
        };
    }
    if let Some(n) = g.samples {
        cfg.samples = Some(n);
    }
    if g.truncation != hartogs_core::hartogs::DEFAULT_TRUNCATION {
        cfg.truncation = g.truncation;
    }
    if let Some(n) = g.threads {
        cfg.threads = Some(n);
    }
    if let Some(t) = g.tol {
        if let Some(m) = primary_metric(suite) {
            cfg.tolerances.insert(m.to_string(), t);
        }
    }
    let report: SuiteReport = match verification::run_suite(&cfg) {
        Err(e @ hartogs_core::Error::UnknownSuite(_)) => return Err(Usage(e.into()).into()),
        r => r?,
    };
    let rows = report.checks.iter().map(|c| serde_json::to_value(c).expect("check serializes")).chain(
        report.estimates.iter().map(|e| {
            json!({
                "name": e.name, "metric": "stderr_deviation", "value": e.deviation,
                "estimate": [e.estimate.re, e.estimate.im], "target": [e.target.re, e.target.im],
                "stderr": e.stderr, "pass": e.pass,
            })
        }),
    );
    emit(g.format, &report, Some(rows.collect()))?;
    for c in report.failures() {
        eprintln!("FAIL {} {} = {:e} (bound {:e}, errors {})", c.name, c.metric, c.value, c.bound, c.errors);
    }
    Ok(report.pass)
}
