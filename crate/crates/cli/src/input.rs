//! Domain, map and point arguments.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use hartogs_core::automorphisms::MapDescriptor;
use hartogs_core::hartogs::HartogsDescriptor;
use hartogs_core::wire::{pairs_to_vec, WirePoint};
use hartogs_core::{CVector, Domain, DomainDescriptor, HartogsDomain};
use serde::de::DeserializeOwned;

/// A `--domain` argument: a base domain or a Hartogs domain over one.
#[derive(Clone, Debug)]
pub enum Target {
    Base(DomainDescriptor, Domain),
    Hartogs(HartogsDescriptor, HartogsDomain),
}

impl Target {
    pub fn base(&self) -> &Domain {
        match self {
            Self::Base(_, d) => d,
            Self::Hartogs(_, h) => h.base(),
        }
    }

    pub fn hartogs(&self) -> anyhow::Result<&HartogsDomain> {
        match self {
            Self::Hartogs(_, h) => Ok(h),
            Self::Base(..) => bail!("this command needs a Hartogs domain descriptor {{\"base\":…,\"N\":…,\"s\":…}}"),
        }
    }

    pub fn descriptor_json(&self) -> serde_json::Value {
        match self {
            Self::Base(d, _) => serde_json::to_value(d),
            Self::Hartogs(d, _) => serde_json::to_value(d),
        }
        .expect("descriptors serialize")
    }
}

/// Reads a file if `arg` names one, otherwise returns `arg` itself.
fn text_of(arg: &str) -> anyhow::Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).with_context(|| format!("reading {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

pub fn parse_json<T: DeserializeOwned>(arg: &str, what: &str) -> anyhow::Result<T> {
    let text = text_of(arg)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} from {arg:?}"))
}

/// Path or inline JSON of a domain or Hartogs descriptor, or a catalog name.
pub fn parse_domain(arg: &str) -> anyhow::Result<Target> {
    if let Some((_, d)) = Domain::catalog().into_iter().find(|(n, _)| *n == arg) {
        return Ok(Target::Base(d.descriptor(), d));
    }
    let text = text_of(arg)?;
    let mut v: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{arg:?} is neither a catalog name nor JSON"))?;
    if let Some(base) = v.get_mut("base") {
        if let Some(name) = base.as_str() {
            let (_, d) = Domain::catalog()
                .into_iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| anyhow!("unknown catalog domain {name:?}"))?;
            *base = serde_json::to_value(d.descriptor())?;
        }
        let d: HartogsDescriptor = serde_json::from_value(v).context("invalid Hartogs descriptor")?;
        let h = HartogsDomain::from_descriptor(&d)?;
        Ok(Target::Hartogs(d, h))
    } else {
        let d: DomainDescriptor = serde_json::from_value(v).context("invalid domain descriptor")?;
        let dom = Domain::from_descriptor(&d)?;
        Ok(Target::Base(d, dom))
    }
}

pub fn parse_map(arg: &str) -> anyhow::Result<MapDescriptor> {
    parse_json(arg, "map descriptor")
}

/// `{"z":…,"zeta":…}` or the shorthand `[re,im],[re,im],…` whose first
/// `base_dim` entries are `z`.
pub fn parse_point(arg: &str, base_dim: usize) -> anyhow::Result<WirePoint> {
    let text = text_of(arg)?;
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).with_context(|| format!("parsing point {arg:?}"));
    }
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&format!("[{t}]"))
        .map_err(|_| anyhow!("cannot parse point {arg:?}; expected [re,im],[re,im],… or {{\"z\":…,\"zeta\":…}}"))?;
    if pairs.len() < base_dim {
        bail!("point has {} coordinates, base dimension is {base_dim}", pairs.len());
    }
    let v = pairs_to_vec(&pairs);
    Ok(WirePoint {
        z: v.rows(0, base_dim).into_owned(),
        zeta: v.rows(base_dim, pairs.len() - base_dim).into_owned(),
    })
}

/// Points from a JSON array, JSON lines, or CSV rows of `re,im,…`.
pub fn parse_points(arg: &str, base_dim: usize) -> anyhow::Result<Vec<WirePoint>> {
    let text = text_of(arg)?;
    let t = text.trim();
    if t.starts_with('[') && t[1..].trim_start().starts_with('{') {
        return serde_json::from_str(t).context("parsing point array");
    }
    if t.starts_with('{') {
        return t
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).context("parsing JSON line"))
            .collect();
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_reader(t.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let xs: Vec<f64> = match rec.iter().map(|x| x.trim().parse::<f64>()).collect() {
            Ok(xs) => xs,
            // header row
            Err(_) if out.is_empty() => continue,
            Err(e) => return Err(e).context("parsing CSV point row"),
        };
        if xs.len() % 2 != 0 || xs.len() < 2 * base_dim {
            bail!("CSV point rows need re,im pairs with at least {base_dim} coordinates");
        }
        let v = CVector::from_iterator(xs.len() / 2, xs.chunks(2).map(|c| hartogs_core::C64::new(c[0], c[1])));
        out.push(WirePoint {
            z: v.rows(0, base_dim).into_owned(),
            zeta: v.rows(base_dim, v.len() - base_dim).into_owned(),
        });
    }
    Ok(out)
}
