//! Frame-by-frame simulation of a base station serving several user pools.
//!
//! Every frame, each pool draws a request (a uniformly random number of
//! users in `min_request..=max_request`, then a uniformly random set of that
//! size) and asks for distinct codes for them. The demand model is a test
//! harness, not a traffic model.
//!
//! Codes are namespaced per pool: pool `p`'s local code `t` is reported as
//! global code `offset_p + t`, where offsets stack the pools' `k` in id order.
//! Random draws come from ChaCha8 seeded with the config seed, one stream per
//! pool, so results replay exactly across platforms.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use walsh_core::banded_assign::{assign_with_fallback, Route};
use walsh_core::bounds::analyze;
use walsh_core::{build_augmented_l_banded, build_l_banded, BinaryMatrix, CodeAssignment};

use crate::format::{load_matrix, FormatError};
use crate::verify_auto;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("pool {pool}: {field}: {msg}")]
    Pool {
        pool: u32,
        field: &'static str,
        msg: String,
    },
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Format(#[from] FormatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolKind {
    Banded,
    Augmented,
    Custom,
}

/// One `[[pool]]` section.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSpec {
    pub id: u32,
    pub kind: PoolKind,
    pub k: Option<usize>,
    pub n: Option<usize>,
    /// `.wam`/`.wat` file for `custom` pools, relative to the config file.
    pub matrix: Option<PathBuf>,
    pub min_request: Option<usize>,
    pub max_request: Option<usize>,
}

/// Simulation config, read from TOML:
///
/// ```toml
/// seed = 7
/// frames = 1000
///
/// [[pool]]
/// id = 1
/// kind = "banded"
/// k = 5
/// n = 10
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolConfig {
    pub seed: u64,
    pub frames: usize,
    #[serde(rename = "pool", default)]
    pub pools: Vec<PoolSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PoolConfig {
    /// Parses TOML; relative matrix paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, SimError> {
        let mut cfg: PoolConfig = toml::from_str(text)?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// A validated pool ready to serve requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    pub id: u32,
    pub kind: PoolKind,
    pub matrix: BinaryMatrix,
    /// Added to local 0-based codes to form global 0-based codes.
    pub code_offset: usize,
    pub min_request: usize,
    pub max_request: usize,
}

fn pool_err(pool: u32, field: &'static str, msg: impl Into<String>) -> SimError {
    SimError::Pool {
        pool,
        field,
        msg: msg.into(),
    }
}

fn build_pool(spec: &PoolSpec, base_dir: &Path) -> Result<BinaryMatrix, SimError> {
    let id = spec.id;
    let dim = |v: Option<usize>, field| v.ok_or_else(|| pool_err(id, field, "required"));
    let built = match spec.kind {
        PoolKind::Banded => build_l_banded(dim(spec.k, "k")?, dim(spec.n, "n")?),
        PoolKind::Augmented => build_augmented_l_banded(dim(spec.k, "k")?, dim(spec.n, "n")?),
        PoolKind::Custom => {
            let path = spec
                .matrix
                .as_ref()
                .ok_or_else(|| pool_err(id, "matrix", "required for custom pools"))?;
            let m = load_matrix(&base_dir.join(path))
                .map_err(|e| pool_err(id, "matrix", e.to_string()))?;
            for (field, want, got) in [("k", spec.k, m.k()), ("n", spec.n, m.n())] {
                if want.is_some_and(|w| w != got) {
                    return Err(pool_err(id, field, format!("file has {field} = {got}")));
                }
            }
            let report = verify_auto(&m).map_err(|e| pool_err(id, "matrix", e.to_string()))?;
            if !report.holds() {
                return Err(pool_err(
                    id,
                    "matrix",
                    format!("assignment property fails: {report}"),
                ));
            }
            Ok(m)
        }
    };
    built.map_err(|e| pool_err(id, "kind", e.to_string()))
}

/// Validates every pool and lays out the code namespaces, in id order.
pub fn prepare(cfg: &PoolConfig) -> Result<Vec<Pool>, SimError> {
    let mut specs: Vec<&PoolSpec> = cfg.pools.iter().collect();
    specs.sort_by_key(|s| s.id);
    if let Some(w) = specs.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(pool_err(w[0].id, "id", "duplicate pool id"));
    }
    let mut offset = 0;
    let mut pools = Vec::with_capacity(specs.len());
    for spec in specs {
        let matrix = build_pool(spec, &cfg.base_dir)?;
        let k = matrix.k();
        let min_request = spec.min_request.unwrap_or(0);
        let max_request = spec.max_request.unwrap_or(k);
        if max_request > k {
            return Err(pool_err(spec.id, "max_request", format!("exceeds k = {k}")));
        }
        if min_request > max_request {
            return Err(pool_err(spec.id, "min_request", "exceeds max_request"));
        }
        pools.push(Pool {
            id: spec.id,
            kind: spec.kind,
            matrix,
            code_offset: offset,
            min_request,
            max_request,
        });
        offset += k;
    }
    Ok(pools)
}

/// One pool's request in one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolGrant {
    pub pool: u32,
    /// Requested users, 0-based, ascending.
    pub requested: Vec<usize>,
    /// Local assignment, `None` when the request could not be served.
    pub granted: Option<CodeAssignment>,
    /// Row moves when the banded shift algorithm served the request.
    pub relocations: Option<usize>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameResult {
    /// 0-based frame index.
    pub frame: usize,
    pub grants: Vec<PoolGrant>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub frames: usize,
    pub requests: usize,
    pub failures: usize,
    pub banded_requests: usize,
    pub max_relocations: usize,
    pub mean_relocations: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub pools: Vec<Pool>,
    pub frames: Vec<FrameResult>,
    pub summary: Summary,
}

impl Simulation {
    /// One JSON record per (frame, pool), 1-based users and global codes.
    /// Wall times are included only with `timing`, since they do not replay.
    pub fn records(&self, timing: bool) -> Vec<serde_json::Value> {
        let offsets: Vec<(u32, usize)> = self.pools.iter().map(|p| (p.id, p.code_offset)).collect();
        let mut out = Vec::new();
        for fr in &self.frames {
            for g in &fr.grants {
                let offset = offsets.iter().find(|o| o.0 == g.pool).map_or(0, |o| o.1);
                let grants: Option<Vec<[usize; 2]>> = g.granted.as_ref().map(|a| {
                    a.pairs
                        .iter()
                        .map(|&(u, t)| [u + 1, offset + t + 1])
                        .collect()
                });
                let mut rec = json!({
                    "frame": fr.frame + 1,
                    "pool": g.pool,
                    "users": g.requested.iter().map(|u| u + 1).collect::<Vec<_>>(),
                    "grants": grants,
                    "route": if g.relocations.is_some() { "banded" } else { "matching" },
                    "relocations": g.relocations,
                });
                if timing {
                    rec["wall_time_ns"] = json!(g.wall_time.as_nanos() as u64);
                }
                out.push(rec);
            }
        }
        out
    }
}

fn granted_is_valid(pool: &Pool, requested: &[usize], a: &CodeAssignment) -> bool {
    a.is_valid_for(&pool.matrix)
        && a.len() == requested.len()
        && a.pairs.iter().map(|p| p.0).eq(requested.iter().copied())
}

/// Runs every frame for every pool, in (frame, pool id) order.
pub fn run_simulation(cfg: &PoolConfig) -> Result<Simulation, SimError> {
    let pools = prepare(cfg)?;
    let mut rngs: Vec<ChaCha8Rng> = (0..pools.len())
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            rng
        })
        .collect();
    let mut frames = Vec::with_capacity(cfg.frames);
    let mut summary = Summary {
        frames: cfg.frames,
        requests: 0,
        failures: 0,
        banded_requests: 0,
        max_relocations: 0,
        mean_relocations: 0.0,
    };
    let mut relocation_total = 0;
    for frame in 0..cfg.frames {
        let mut grants = Vec::with_capacity(pools.len());
        for (pool, rng) in pools.iter().zip(&mut rngs) {
            let size = rng.gen_range(pool.min_request..=pool.max_request);
            let mut requested = sample(rng, pool.matrix.n(), size).into_vec();
            requested.sort_unstable();

            let started = Instant::now();
            let dispatch = assign_with_fallback(&pool.matrix, &requested);
            let wall_time = started.elapsed();

            let (granted, relocations) = match dispatch {
                Ok(d) => {
                    let relocations = match &d.route {
                        Route::Banded(trace) => Some(trace.len()),
                        Route::Matching => None,
                    };
                    (d.outcome.assignment().cloned(), relocations)
                }
                Err(_) => (None, None),
            };
            let granted = granted.filter(|a| granted_is_valid(pool, &requested, a));
            summary.requests += 1;
            if granted.is_none() {
                summary.failures += 1;
            }
            if let Some(r) = relocations {
                summary.banded_requests += 1;
                summary.max_relocations = summary.max_relocations.max(r);
                relocation_total += r;
            }
            grants.push(PoolGrant {
                pool: pool.id,
                requested,
                granted,
                relocations,
                wall_time,
            });
        }
        frames.push(FrameResult { frame, grants });
    }
    if summary.banded_requests > 0 {
        summary.mean_relocations = relocation_total as f64 / summary.banded_requests as f64;
    }
    Ok(Simulation {
        pools,
        frames,
        summary,
    })
}

/// How many codes each user of a pool has to monitor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoolLoad {
    pub pool: u32,
    /// Codes monitored by each user: its row weight.
    pub per_user: Vec<usize>,
    pub l_max: usize,
    /// `ceil(k(n-k+1)/n)`, the least possible `l_max`.
    pub per_row_bound: usize,
    pub meets_row_bound: bool,
}

pub fn monitor_load(sim: &Simulation) -> Vec<PoolLoad> {
    sim.pools
        .iter()
        .map(|p| {
            let report = analyze(&p.matrix).expect("pools are validated with n >= k");
            PoolLoad {
                pool: p.id,
                per_user: p.matrix.row_weight_profile().row_weights,
                l_max: report.max_row_weight,
                per_row_bound: report.per_row_bound,
                meets_row_bound: report.row_bound_met(),
            }
        })
        .collect()
}

/// Global codes used anywhere in the run, grouped by pool.
pub fn codes_by_pool(sim: &Simulation) -> Vec<(u32, BTreeSet<usize>)> {
    sim.pools
        .iter()
        .map(|p| {
            let codes = sim
                .frames
                .iter()
                .flat_map(|f| &f.grants)
                .filter(|g| g.pool == p.id)
                .filter_map(|g| g.granted.as_ref())
                .flat_map(|a| a.pairs.iter().map(|&(_, t)| p.code_offset + t))
                .collect();
            (p.id, codes)
        })
        .collect()
}
