//! On-disk coefficient tables keyed by `(lambda, theta, n_max, version)`.
//!
//! A table for a larger `n_max` also serves smaller requests, so lookups
//! scan the directory for the smallest covering file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use jacobi_core::coefficients::{coefficients_for, CoeffTable, LimitParams, Route};
use rayon::prelude::*;

use crate::formats::{format_rational, CoeffTableJson};

/// Bumped whenever cached tables could change.
pub const VERSION_TAG: &str = "1";

pub const CACHE_ENV: &str = "JACOBI_CACHE_DIR";

fn key_part(r: &jacobi_core::Rational) -> String {
    format_rational(r).replace('/', "_")
}

fn prefix(params: &LimitParams) -> String {
    format!("coeff-{}-{}-", key_part(params.lambda()), key_part(params.theta()))
}

pub fn file_name(params: &LimitParams, n_max: u32) -> String {
    format!("{}n{n_max}-v{VERSION_TAG}.json", prefix(params))
}

fn parse_n_max(name: &str, prefix: &str) -> Option<u32> {
    let rest = name.strip_prefix(prefix)?.strip_suffix(&format!("-v{VERSION_TAG}.json"))?;
    rest.strip_prefix('n')?.parse().ok()
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, params: &LimitParams, n_max: u32) -> PathBuf {
        self.dir.join(file_name(params, n_max))
    }

    /// The smallest cached table covering `n_max`, if any.
    pub fn load(&self, params: &LimitParams, n_max: u32) -> anyhow::Result<Option<CoeffTable>> {
        let Ok(read) = fs::read_dir(&self.dir) else { return Ok(None) };
        let prefix = prefix(params);
        let mut best: Option<(u32, PathBuf)> = None;
        for entry in read {
            let entry = entry?;
            let name = entry.file_name();
            let Some(n) = name.to_str().and_then(|s| parse_n_max(s, &prefix)) else { continue };
            if n >= n_max && best.as_ref().is_none_or(|(b, _)| n < *b) {
                best = Some((n, entry.path()));
            }
        }
        let Some((_, path)) = best else { return Ok(None) };
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let json: CoeffTableJson =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let table = json.to_table()?;
        Ok(table.covers(n_max).then_some(table))
    }

    pub fn store(&self, table: &CoeffTable, n_max: u32) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.path(table.params(), n_max);
        let text = serde_json::to_string_pretty(&CoeffTableJson::from_table(table))?;
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Loads a covering table or builds one with `route` and stores it.
    /// `route` must cover every index, i.e. not be `Diagonal`, `Toeplitz`
    /// or `ClosedForm`.
    pub fn get_or_build(&self, params: &LimitParams, n_max: u32, route: Route) -> anyhow::Result<CoeffTable> {
        if let Some(t) = self.load(params, n_max)? {
            return Ok(t);
        }
        let table = par_build_table(n_max, params, route)?;
        if !table.covers(n_max) {
            anyhow::bail!("route {route} does not cover every coefficient");
        }
        self.store(&table, n_max)?;
        Ok(table)
    }
}

/// Same table as `coefficients::build_table`, with the `(n, h)` jobs run
/// in parallel and inserted in index order.
pub fn par_build_table(n_max: u32, params: &LimitParams, route: Route) -> anyhow::Result<CoeffTable> {
    let jobs: Vec<(u32, u32)> = (1..=n_max).flat_map(|n| (1..=n).map(move |h| (n, h))).collect();
    let parts = jobs
        .par_iter()
        .map(|&(n, h)| coefficients_for(route, n, h, params).map(|v| (n, h, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = CoeffTable::new(params.clone());
    for (n, h, values) in parts {
        for (l, value) in values {
            table.insert(n, h, l, value, route)?;
        }
    }
    Ok(table)
}
