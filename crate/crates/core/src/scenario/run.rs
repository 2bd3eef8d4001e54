use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::config::{load_config, ConfigError, Scenario, ScenarioConfig, Target};
use crate::error::Error;
use crate::evolve::{evolve_master, evolve_pure, make_propagator};
use crate::hilbert::{basis_state, project_qubit_qubit, StateVector};
use crate::measures::{
    bell_state, chsh_violation, entanglement_entropy, mixed_fidelity, probabilities, pure_fidelity,
    truncation_fidelity_series, FidelityConvention,
};
use crate::model::{collapse_operators, hamiltonian};
use crate::series::TimeSeries;
use crate::VERSION;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{scenario}{}: {source}", at_time(*.time))]
    Numeric {
        scenario: Scenario,
        time: Option<f64>,
        #[source]
        source: Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn at_time(t: Option<f64>) -> String {
    t.map(|t| format!(" at t = {t:e}")).unwrap_or_default()
}

impl RunError {
    /// Process exit code: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Output { .. } => 1,
            RunError::Numeric { .. } => 2,
        }
    }
}

struct Ctx {
    scenario: Scenario,
}

impl Ctx {
    fn err(&self, time: Option<f64>) -> impl Fn(Error) -> RunError + '_ {
        move |source| RunError::Numeric {
            scenario: self.scenario,
            time,
            source,
        }
    }
}

/// Runs one scenario. The returned series carries the full config and the
/// crate version as metadata.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TimeSeries, RunError> {
    cfg.validate()?;
    let ctx = Ctx { scenario: cfg.scenario };
    let mut series = match cfg.scenario {
        Scenario::Damped => run_damped(cfg, &ctx)?,
        _ => run_pure(cfg, &ctx)?,
    };
    series.push_metadata("version", VERSION);
    for (k, v) in cfg.to_pairs() {
        series.push_metadata(k, v);
    }
    Ok(series)
}

fn bell_ids(cfg: &ScenarioConfig) -> Vec<crate::measures::BellStateId> {
    cfg.targets
        .iter()
        .filter_map(|t| match t {
            Target::Bell(id) => Some(*id),
            Target::Fock(..) => None,
        })
        .collect()
}

fn run_pure(cfg: &ScenarioConfig, ctx: &Ctx) -> Result<TimeSeries, RunError> {
    let h = hamiltonian(&cfg.params, cfg.dims);
    let prop = make_propagator(&h).map_err(ctx.err(None))?;
    let (n, m) = cfg.initial;
    let psi0 = basis_state(cfg.dims, n, m).map_err(ctx.err(None))?;
    let states = evolve_pure(&prop, &psi0, &cfg.grid).map_err(ctx.err(None))?;
    let times = cfg.grid.times();

    if cfg.scenario == Scenario::Truncation {
        return truncation_fidelity_series(&states, &cfg.params, &cfg.grid).map_err(ctx.err(None));
    }

    type RowFn<'a> = Box<dyn Fn(&StateVector) -> crate::Result<Vec<Option<f64>>> + 'a>;
    let (columns, row): (Vec<String>, RowFn) = match cfg.scenario {
        Scenario::Probabilities => {
            let levels: Vec<(usize, usize)> = cfg
                .targets
                .iter()
                .filter_map(|t| match t {
                    Target::Fock(n, m) => Some((*n, *m)),
                    Target::Bell(_) => None,
                })
                .collect();
            let cols = levels.iter().map(|(n, m)| format!("p_{n}_{m}")).collect();
            (
                cols,
                Box::new(move |psi| Ok(probabilities(psi, &levels)?.into_iter().map(Some).collect())),
            )
        }
        Scenario::BellFidelities => {
            let ids = bell_ids(cfg);
            let refs = ids
                .iter()
                .map(|&id| bell_state(id, cfg.dims))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(ctx.err(None))?;
            let cols = ids.iter().map(|id| format!("fid_amp_{id}")).collect();
            (
                cols,
                Box::new(move |psi| {
                    refs.iter()
                        .map(|r| pure_fidelity(psi, r, FidelityConvention::Amplitude).map(Some))
                        .collect()
                }),
            )
        }
        Scenario::Entropy => (
            vec!["entropy_ebits".into()],
            Box::new(|psi| Ok(vec![Some(entanglement_entropy(psi)?)])),
        ),
        Scenario::Chsh => (
            vec!["b".into(), "m".into()],
            Box::new(|psi| match project_qubit_qubit(&psi.to_density()) {
                Ok(qq) => {
                    let r = chsh_violation(&qq)?;
                    Ok(vec![Some(r.b_value), Some(r.m_value)])
                }
                // no weight in the qubit subspace: B undefined
                Err(Error::NearZeroSupport { .. }) => Ok(vec![None, None]),
                Err(e) => Err(e),
            }),
        ),
        Scenario::Truncation | Scenario::Damped => unreachable!("handled by caller"),
    };

    let mut series = TimeSeries::new(columns);
    for (psi, t) in states.iter().zip(times) {
        let values = row(psi).map_err(ctx.err(Some(t)))?;
        series.push(t, values).map_err(ctx.err(Some(t)))?;
    }
    Ok(series)
}

fn run_damped(cfg: &ScenarioConfig, ctx: &Ctx) -> Result<TimeSeries, RunError> {
    let h = hamiltonian(&cfg.params, cfg.dims);
    let collapse = collapse_operators(&cfg.params, cfg.dims);
    let (n, m) = cfg.initial;
    let rho0 = basis_state(cfg.dims, n, m).map_err(ctx.err(None))?.to_density();
    let states = evolve_master(&h, &collapse, &rho0, &cfg.grid, cfg.method).map_err(ctx.err(None))?;

    let ids = bell_ids(cfg);
    let refs = ids
        .iter()
        .map(|&id| bell_state(id, cfg.dims).map(|s| s.to_density()))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(ctx.err(None))?;
    let mut columns = vec!["chi_t".to_string()];
    columns.extend(ids.iter().map(|id| format!("fid_uhlmann_{id}")));

    let mut series = TimeSeries::new(columns);
    for (rho, t) in states.iter().zip(cfg.grid.times()) {
        let mut row = vec![Some(cfg.params.chi_a * t)];
        for r in &refs {
            row.push(Some(mixed_fidelity(rho, r).map_err(ctx.err(Some(t)))?));
        }
        series.push(t, row).map_err(ctx.err(Some(t)))?;
    }
    Ok(series)
}

/// Runs `cfg` and writes the CSV to `out`, or to the config's own
/// `output_path` when `out` is `None`. Returns the path written, if any.
pub fn run_to_file(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<(TimeSeries, Option<PathBuf>), RunError> {
    let series = run_scenario(cfg)?;
    let target = out.map(Path::to_path_buf).or_else(|| cfg.output_path.clone());
    if let Some(path) = &target {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|source| RunError::Output {
                path: path.clone(),
                source,
            })?;
        }
        series.write_csv(path).map_err(|source| RunError::Output {
            path: path.clone(),
            source,
        })?;
    }
    Ok((series, target))
}

/// One sweep entry: the config file and where its CSV goes.
#[derive(Debug, Clone)]
pub struct SweepJob {
    pub config_path: PathBuf,
    pub output_path: PathBuf,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub job: SweepJob,
    pub result: Result<(), RunError>,
}

/// `*.conf` files in `dir`, sorted by file name. Output goes to the config's
/// `output_path` (relative paths resolve against `dir`) or `<stem>.csv`
/// next to the config.
pub fn sweep_jobs(dir: &Path) -> Result<Vec<SweepJob>, ConfigError> {
    let io = |source| ConfigError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "conf"));
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|config_path| {
            let stem = config_path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            SweepJob {
                output_path: dir.join(format!("{stem}.csv")),
                config_path,
            }
        })
        .collect())
}

/// Runs every job in parallel. Each job is independent, so outputs do not
/// depend on scheduling order; outcomes are returned in job order.
pub fn run_sweep(jobs: &[SweepJob]) -> Vec<SweepOutcome> {
    jobs.par_iter()
        .map(|job| {
            let result = load_config(&job.config_path).map_err(RunError::from).and_then(|cfg| {
                let mut job = job.clone();
                if let Some(p) = &cfg.output_path {
                    job.output_path = match job.config_path.parent() {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p.clone(),
                    };
                }
                run_to_file(&cfg, Some(&job.output_path)).map(|_| job)
            });
            match result {
                Ok(job) => SweepOutcome { job, result: Ok(()) },
                Err(e) => SweepOutcome {
                    job: job.clone(),
                    result: Err(e),
                },
            }
        })
        .collect()
}
