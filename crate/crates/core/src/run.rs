//! Experiment orchestration: mesh series, initial field, remap cycle,
//! verification report and file output.
//!
//! A run directory contains
//!
//! | file | contents |
//! |------|----------|
//! | `config.txt` | resolved configuration |
//! | `mesh_initial.csv`, `mesh_final.csv` | first and last mesh of the series |
//! | `field_initial.csv`, `field_final.csv` | field before and after the cycle |
//! | `field_reference.csv` | exact means on the final mesh |
//! | `mesh_NNNNN.csv`, `field_NNNNN.csv` | every `stride`-th intermediate step |
//! | `steps.csv` | per-step diagnostics |
//! | `report.txt` | [`RemapReport`] as `key=value` |
//! | `*.vtk` | optional legacy VTK copies of the fields |

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::fields::{init_means, CellField, FieldError, FieldSpec, RemapReport};
use crate::io::{self, IoError};
use crate::mesh::Mesh;
use crate::meshgen::{mesh_series, MeshgenError, SeriesKind};
use crate::remap::{remap_cycle_with, RemapError, StepReport};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Meshgen(#[from] MeshgenError),
    #[error(transparent)]
    Remap(#[from] RemapError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// In-memory result of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub meshes: Vec<Mesh>,
    pub initial: CellField,
    pub final_field: CellField,
    pub reference: CellField,
    pub steps: Vec<StepReport>,
    pub report: RemapReport,
}

impl Simulation {
    pub fn final_mesh(&self) -> &Mesh {
        self.meshes.last().expect("series is never empty")
    }
}

fn width_band(config: &RunConfig) -> Option<(f64, f64)> {
    matches!(config.field, FieldSpec::Shock).then_some((config.lo, config.hi))
}

/// Exact reference on the final mesh: the initial field for the tensor series
/// (which returns to its starting mesh), fresh means otherwise.
fn reference_field(config: &RunConfig, initial: &CellField, final_mesh: &Mesh) -> CellField {
    match config.mesh.kind {
        SeriesKind::Tensor => initial.clone(),
        SeriesKind::RandomSmooth => init_means(final_mesh, &config.field),
    }
}

/// Runs the remap cycle described by `config` on the current rayon pool.
pub fn simulate_with(
    config: &RunConfig,
    on_step: impl FnMut(usize, &Mesh, &CellField),
) -> Result<Simulation, RunError> {
    config.validate()?;
    let meshes = mesh_series(&config.mesh)?;
    let initial = init_means(&meshes[0], &config.field);
    let mass_initial = initial.mass(&volumes(&meshes[0]));
    let mut on_step = on_step;
    let (final_field, steps) = remap_cycle_with(&meshes, initial.clone(), &config.limiter, |k, f| {
        on_step(k, &meshes[k], f)
    })?;
    let final_mesh = meshes.last().expect("series is never empty");
    let reference = reference_field(config, &initial, final_mesh);
    let report = RemapReport::evaluate(
        steps.len(),
        mass_initial,
        final_mesh,
        &final_field,
        &reference,
        width_band(config),
    )?;
    Ok(Simulation {
        meshes,
        initial,
        final_field,
        reference,
        steps,
        report,
    })
}

pub fn simulate(config: &RunConfig) -> Result<Simulation, RunError> {
    simulate_with(config, |_, _, _| {})
}

fn volumes(mesh: &Mesh) -> Vec<f64> {
    mesh.cells()
        .map(|c| crate::geometry::polygon_area(&crate::geometry::Polygon::new(mesh.cell_corners(c).to_vec())))
        .collect()
}

/// Runs `f` on a pool with `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RunError> {
    match threads {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| {
        RunError::Io(IoError::Io {
            path: dir.to_path_buf(),
            error: source,
        })
    })
}

fn write_field(dir: &Path, stem: &str, mesh: &Mesh, field: &CellField, vtk: bool) -> Result<(), IoError> {
    io::write_file(&dir.join(format!("{stem}.csv")), &io::field_to_csv(mesh, field))?;
    if vtk {
        io::write_file(&dir.join(format!("{stem}.vtk")), &io::field_to_vtk(mesh, field, stem))?;
    }
    Ok(())
}

/// Runs the experiment and writes every output file into `config.output.dir`.
pub fn run(config: &RunConfig, threads: Option<usize>) -> Result<Simulation, RunError> {
    let dir = config.output.dir.clone();
    create_dir(&dir)?;
    io::write_file(&dir.join("config.txt"), &config.to_text())?;
    let (stride, vtk) = (config.output.stride, config.output.vtk);
    let nmax = config.mesh.nmax;

    let sim = with_threads(threads, || {
        let mut dump_error: Option<IoError> = None;
        let sim = simulate_with(config, |step, mesh, field| {
            if stride == 0 || step % stride != 0 || step == nmax || dump_error.is_some() {
                return;
            }
            let res = io::write_file(&dir.join(format!("mesh_{step:05}.csv")), &io::mesh_to_csv(mesh))
                .and_then(|_| write_field(&dir, &format!("field_{step:05}"), mesh, field, vtk));
            if let Err(e) = res {
                dump_error = Some(e);
            }
        });
        match dump_error {
            Some(e) => Err(RunError::Io(e)),
            None => sim,
        }
    })??;

    let first = &sim.meshes[0];
    let last = sim.final_mesh();
    io::write_file(&dir.join("mesh_initial.csv"), &io::mesh_to_csv(first))?;
    io::write_file(&dir.join("mesh_final.csv"), &io::mesh_to_csv(last))?;
    write_field(&dir, "field_initial", first, &sim.initial, vtk)?;
    write_field(&dir, "field_final", last, &sim.final_field, vtk)?;
    write_field(&dir, "field_reference", last, &sim.reference, false)?;
    io::write_file(&dir.join("steps.csv"), &io::steps_to_csv(&sim.steps))?;
    io::write_file(&dir.join("report.txt"), &sim.report.to_key_value())?;
    Ok(sim)
}

/// Writes the mesh series only: the first and last member plus every
/// `stride`-th one, as `mesh_NNNNN.csv`. Returns the written paths.
pub fn emit_mesh_series(config: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    config.validate()?;
    let meshes = mesh_series(&config.mesh)?;
    let dir = &config.output.dir;
    create_dir(dir)?;
    let last = meshes.len() - 1;
    let mut written = Vec::new();
    for (n, mesh) in meshes.iter().enumerate() {
        let keep = n == 0 || n == last || (config.output.stride > 0 && n % config.output.stride == 0);
        if keep {
            let path = dir.join(format!("mesh_{n:05}.csv"));
            io::write_file(&path, &io::mesh_to_csv(mesh))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Recomputes the report of a finished run from its emitted files.
pub fn report_from_dir(dir: &Path) -> Result<RemapReport, RunError> {
    let config = parse_config(&io::read_file(&dir.join("config.txt"))?)?;
    let mesh_initial = io::read_mesh(&dir.join("mesh_initial.csv"))?;
    let mesh_final = io::read_mesh(&dir.join("mesh_final.csv"))?;
    let initial = io::read_field(&dir.join("field_initial.csv"))?;
    let final_field = io::read_field(&dir.join("field_final.csv"))?;
    let reference = io::read_field(&dir.join("field_reference.csv"))?;
    initial.matches(&mesh_initial)?;
    let mass_initial = initial.mass(&volumes(&mesh_initial));
    Ok(RemapReport::evaluate(
        config.mesh.nmax,
        mass_initial,
        &mesh_final,
        &final_field,
        &reference,
        width_band(&config),
    )?)
}
