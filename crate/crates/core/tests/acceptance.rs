//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sasremap::config::RunConfig;
use sasremap::fields::RemapReport;
use sasremap::reconstruct::eta;
use sasremap::run::{self, simulate, Simulation};
use sasremap::{
    clip_convex, init_means, integrate_affine, polygon_area, reconstruct, remap_field, CellField, CellId,
    FieldSpec, LimiterConfig, LimiterKind, Mesh, MeshGeometry, MeshSeriesSpec, Point, Polygon, SeriesKind,
};

const MASS_TOL: f64 = 1e-11;
const AFFINE_TOL: f64 = 1e-10;
const MIN_ORDER: f64 = 1.6;
const SAS_BJ_RATIO: f64 = 1.5;
const WIDTH_GAP: f64 = 0.5;
const OVERSHOOT_TOL: f64 = 1e-12;
const ETA_STRADDLE: f64 = 0.1;
const ETA_FAR: f64 = 0.9;
const QUAD_PAIRS: usize = 1000;
const INTEGRAL_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Limiter {
    Bj,
    Sas29,
    Sas42,
    SasBounded,
}

impl Limiter {
    fn config(self) -> LimiterConfig {
        match self {
            Limiter::Bj => LimiterConfig::with_kind(LimiterKind::BarthJespersen),
            Limiter::Sas29 => LimiterConfig::sas(2.9),
            Limiter::Sas42 => LimiterConfig::sas(4.2),
            Limiter::SasBounded => LimiterConfig {
                beta_smooth: 1.0,
                beta_steep: 1.0,
                ..LimiterConfig::default()
            },
        }
    }

    fn label(self) -> &'static str {
        match self {
            Limiter::Bj => "bj",
            Limiter::Sas29 => "sas2.9",
            Limiter::Sas42 => "sas4.2",
            Limiter::SasBounded => "sas1/1",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Series {
    Tensor,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Field {
    Sine,
    Shock,
}

type Key = (Series, Field, Limiter, usize);

fn config(key: Key) -> RunConfig {
    let (series, field, limiter, imax) = key;
    let nmax = 5 * (imax - 1);
    let mesh = match series {
        Series::Tensor => MeshSeriesSpec::tensor(imax, nmax),
        Series::Random => MeshSeriesSpec::random_smooth(imax, nmax, 0),
    };
    RunConfig {
        mesh,
        limiter: limiter.config(),
        field: match field {
            Field::Sine => FieldSpec::Sine,
            Field::Shock => FieldSpec::Shock,
        },
        ..RunConfig::default()
    }
}

struct Run {
    report: RemapReport,
    /// Largest excursion of any step outside the initial field's range.
    global_excursion: f64,
}

struct Runs {
    cache: BTreeMap<Key, Run>,
}

impl Runs {
    fn run(&mut self, key: Key) -> Result<&Run, String> {
        if let Entry::Vacant(slot) = self.cache.entry(key) {
            let t = Instant::now();
            let sim: Simulation = simulate(&config(key)).map_err(|e| format!("{key:?}: {e}"))?;
            eprintln!("  run {key:?}: {:.1}s", t.elapsed().as_secs_f64());
            let (lo, hi) = (sim.initial.min(), sim.initial.max());
            let global_excursion = sim
                .steps
                .iter()
                .map(|s| (s.field_max - hi).max(lo - s.field_min).max(0.0))
                .fold(0.0, f64::max);
            slot.insert(Run {
                report: sim.report,
                global_excursion,
            });
        }
        Ok(&self.cache[&key])
    }

    fn get(&mut self, key: Key) -> Result<&RemapReport, String> {
        Ok(&self.run(key)?.report)
    }
}

fn conservation(runs: &mut Runs) -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let mut worst_key = None;
    for series in [Series::Tensor, Series::Random] {
        for field in [Field::Sine, Field::Shock] {
            for limiter in [Limiter::Bj, Limiter::Sas29, Limiter::Sas42] {
                let key = (series, field, limiter, 65);
                let err = runs.get(key)?.mass_relative_error();
                if err >= worst {
                    worst = err;
                    worst_key = Some(key);
                }
            }
        }
    }
    Ok(outcome(
        worst <= MASS_TOL,
        format!("max relative mass error {worst:.3e} ({worst_key:?}), tol {MASS_TOL:.0e}"),
    ))
}

fn affine_exactness() -> Result<Outcome, String> {
    let cfg = RunConfig {
        mesh: MeshSeriesSpec::random_smooth(17, 20, 0),
        limiter: LimiterConfig::with_kind(LimiterKind::None),
        field: FieldSpec::Affine { a: 0.3, b: 0.7, c: -0.2 },
        ..RunConfig::default()
    };
    let sim = simulate(&cfg).map_err(|e| e.to_string())?;
    let linf = sim.report.linf;
    Ok(outcome(linf <= AFFINE_TOL, format!("Linf {linf:.3e}, tol {AFFINE_TOL:.0e}")))
}

fn convergence(runs: &mut Runs) -> Result<Outcome, String> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut l1_at_65 = BTreeMap::new();
    for limiter in [Limiter::Bj, Limiter::Sas29, Limiter::Sas42] {
        let mut l1 = Vec::new();
        for imax in [17, 33, 65] {
            l1.push(runs.get((Series::Tensor, Field::Sine, limiter, imax))?.l1);
        }
        let orders: Vec<f64> = l1.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        pass &= orders.iter().all(|&q| q >= MIN_ORDER);
        parts.push(format!(
            "{} L1 {:.3e}/{:.3e}/{:.3e} orders {:.2}/{:.2}",
            limiter.label(),
            l1[0],
            l1[1],
            l1[2],
            orders[0],
            orders[1]
        ));
        l1_at_65.insert(limiter, l1[2]);
    }
    for limiter in [Limiter::Sas29, Limiter::Sas42] {
        let ratio = l1_at_65[&limiter] / l1_at_65[&Limiter::Bj];
        pass &= ratio <= SAS_BJ_RATIO;
        parts.push(format!("{}/bj {:.3}", limiter.label(), ratio));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn anti_diffusion(runs: &mut Runs) -> Result<Outcome, String> {
    let mut pass = true;
    let mut parts = Vec::new();
    for series in [Series::Tensor, Series::Random] {
        let mut w = Vec::new();
        for limiter in [Limiter::Bj, Limiter::Sas29, Limiter::Sas42] {
            let width = runs
                .get((series, Field::Shock, limiter, 65))?
                .interface_width
                .ok_or("no interface width")?;
            w.push(width);
        }
        let ok = w[0] - w[1] >= WIDTH_GAP && w[1] - w[2] >= WIDTH_GAP;
        pass &= ok;
        parts.push(format!("{series:?} widths bj {:.3} > sas2.9 {:.3} > sas4.2 {:.3}", w[0], w[1], w[2]));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn bounds(runs: &mut Runs) -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let mut excursion: f64 = 0.0;
    let mut parts = Vec::new();
    for series in [Series::Tensor, Series::Random] {
        for field in [Field::Sine, Field::Shock] {
            for limiter in [Limiter::Bj, Limiter::SasBounded] {
                let run = runs.run((series, field, limiter, 65))?;
                let overshoot = run.report.overshoot;
                worst = worst.max(overshoot);
                excursion = excursion.max(run.global_excursion);
                parts.push(format!("{series:?}/{field:?}/{} {overshoot:.1e}", limiter.label()));
            }
        }
    }
    Ok(outcome(
        worst <= OVERSHOOT_TOL,
        format!(
            "max overshoot vs reference {worst:.3e}, tol {OVERSHOOT_TOL:.0e} ({}); \
             max excursion outside initial range over all steps {excursion:.1e}",
            parts.join(", ")
        ),
    ))
}

fn eta_behaviour() -> Result<Outcome, String> {
    let cfg = LimiterConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for series in [Series::Tensor, Series::Random] {
        let spec = config((series, Field::Shock, Limiter::Sas29, 65)).mesh;
        let mesh = match spec.kind {
            SeriesKind::Tensor => Mesh::uniform(spec.imax, spec.jmax).map_err(|e| e.to_string())?,
            SeriesKind::RandomSmooth => sasremap::meshgen::random_mesh(&spec).map_err(|e| e.to_string())?,
        };
        let field = init_means(&mesh, &FieldSpec::Shock);
        let straddling: Vec<CellId> = mesh
            .cells()
            .filter(|&c| {
                let f = field.get(c);
                f > 0.0 && f < 1.0
            })
            .collect();
        let mut straddle_max: f64 = 0.0;
        let mut far_min: f64 = 1.0;
        for c in mesh.cells() {
            let e = eta(&mesh, &field, c, &cfg);
            let dist = straddling
                .iter()
                .map(|s| s.ci.abs_diff(c.ci).max(s.cj.abs_diff(c.cj)))
                .min()
                .unwrap_or(usize::MAX);
            if dist == 0 {
                straddle_max = straddle_max.max(e);
            } else if dist >= 3 {
                far_min = far_min.min(e);
            }
        }
        let above = straddling
            .iter()
            .filter(|&&c| eta(&mesh, &field, c, &cfg) >= ETA_STRADDLE)
            .count();
        pass &= straddle_max < ETA_STRADDLE && far_min > ETA_FAR;
        parts.push(format!(
            "{series:?}: straddling max {straddle_max:.3} ({above}/{} >= {ETA_STRADDLE}), far min {far_min:.3}",
            straddling.len()
        ));
    }

    let mesh = sasremap::meshgen::random_mesh(&MeshSeriesSpec::random_smooth(17, 1, 3)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base: Vec<f64> = (0..mesh.num_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let reference = CellField::for_mesh(&mesh, base.clone()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for lambda in [1e-3, 1.0, 1e3] {
        let scaled = CellField::for_mesh(&mesh, base.iter().map(|v| lambda * v).collect()).map_err(|e| e.to_string())?;
        for c in mesh.cells() {
            worst = worst.max((eta(&mesh, &scaled, c, &cfg) - eta(&mesh, &reference, c, &cfg)).abs());
        }
    }
    pass &= worst <= 1e-12;
    parts.push(format!("scale invariance max diff {worst:.1e}"));
    Ok(outcome(pass, parts.join("; ")))
}

fn geometry_oracle() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut area_fail = 0;
    let mut worst_z: f64 = 0.0;
    let mut worst_int: f64 = 0.0;
    for _ in 0..QUAD_PAIRS {
        let a = common::random_convex_quad(&mut rng, Point::new(0.0, 0.0), 1.0);
        let offset = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = common::random_convex_quad(&mut rng, offset, 1.0);
        let clip = clip_convex(&Polygon::new(a.clone()), &Polygon::new(b.clone())).map_err(|e| e.to_string())?;
        let lib_area = polygon_area(&clip);

        let side = 200;
        let (mc, sigma) = common::mc_intersection_area(&a, &b, side, &mut rng);
        let (x0, x1, y0, y1) = a.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a0, a1, b0, b1), p| (a0.min(p.x), a1.max(p.x), b0.min(p.y), b1.max(p.y)),
        );
        // One sample's worth of area keeps σ meaningful when no or all samples hit.
        let resolution = (x1 - x0) * (y1 - y0) / (side * side) as f64;
        let sigma = sigma.max(resolution);
        let z = (lib_area - mc).abs() / sigma;
        worst_z = worst_z.max(z);
        if z > 3.0 {
            area_fail += 1;
        }

        let f_c = rng.gen_range(-2.0..2.0);
        let grad = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let r_c = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let exact = common::integrate(&common::intersect(&a, &b), 4, |p| {
            f_c + grad.x * (p.x - r_c.x) + grad.y * (p.y - r_c.y)
        });
        worst_int = worst_int.max((integrate_affine(&clip, f_c, grad, r_c) - exact).abs());
    }
    Ok(outcome(
        area_fail == 0 && worst_int <= INTEGRAL_TOL,
        format!(
            "{QUAD_PAIRS} pairs: {area_fail} outside 3 sigma (max z {worst_z:.2}); integral max diff {worst_int:.2e}, tol {INTEGRAL_TOL:.0e}"
        ),
    ))
}

fn perturbed(mesh: &Mesh, rng: &mut ChaCha8Rng, amplitude: f64) -> Mesh {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    Mesh::from_fn(nx, ny, |i, j| {
        let p = mesh.node(i, j);
        if i == 0 || j == 0 || i == nx - 1 || j == ny - 1 {
            p
        } else {
            Point::new(
                p.x + amplitude * rng.gen_range(-1.0..1.0),
                p.y + amplitude * rng.gen_range(-1.0..1.0),
            )
        }
    })
    .expect("small perturbation keeps the mesh valid")
}

fn remap_oracle() -> Result<Outcome, String> {
    let mut worst: f64 = 0.0;
    let trials = 50;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + trial);
        let h = 1.0 / 3.0;
        let old = perturbed(&Mesh::uniform(4, 4).map_err(|e| e.to_string())?, &mut rng, 0.2 * h);
        let new = perturbed(&old, &mut rng, 0.1 * h);
        let field = CellField::for_mesh(&old, (0..9).map(|_| rng.gen_range(0.0..1.0)).collect())
            .map_err(|e| e.to_string())?;
        let old_geom = MeshGeometry::new(old.clone()).map_err(|e| e.to_string())?;
        let new_geom = MeshGeometry::new(new.clone()).map_err(|e| e.to_string())?;
        let limiter = if trial % 2 == 0 { LimiterConfig::sas(2.9) } else { LimiterConfig::with_kind(LimiterKind::None) };
        let recon = reconstruct(&old_geom, &field, &limiter);
        let result = remap_field(&old_geom, &new_geom, &recon).map_err(|e| e.to_string())?;

        for c_new in new.cells() {
            let target = new.cell_corners(c_new).to_vec();
            let mut integral = 0.0;
            for c_old in old.cells() {
                let slope = recon.cells[old.cell_index(c_old)];
                let piece = common::intersect(&target, &old.cell_corners(c_old));
                integral += common::integrate(&piece, 8, |p| slope.eval(p));
            }
            let expected = integral / common::area(&target);
            worst = worst.max((result.field.get(c_new) - expected).abs());
        }
    }
    Ok(outcome(worst <= ORACLE_TOL, format!("{trials} meshes, max per-cell diff {worst:.2e}, tol {ORACLE_TOL:.0e}")))
}

fn determinism() -> Result<Outcome, String> {
    let mut reports = Vec::new();
    let mut fields = Vec::new();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for threads in [1usize, 8] {
        let mut cfg = config((Series::Random, Field::Shock, Limiter::Sas29, 33));
        cfg.output.dir = tmp.path().join(format!("threads{threads}"));
        run::run(&cfg, Some(threads)).map_err(|e| e.to_string())?;
        reports.push(fs::read(cfg.output.dir.join("report.txt")).map_err(|e| e.to_string())?);
        fields.push(fs::read(cfg.output.dir.join("field_final.csv")).map_err(|e| e.to_string())?);
    }
    let same_report = reports[0] == reports[1];
    let same_field = fields[0] == fields[1];
    Ok(outcome(
        same_report && same_field,
        format!("report bytes identical: {same_report}; final field bytes identical: {same_field}"),
    ))
}

fn main() -> ExitCode {
    let mut runs = Runs { cache: BTreeMap::new() };
    let start = Instant::now();
    let results: Vec<(usize, &str, Result<Outcome, String>)> = vec![
        (1, "conservation", conservation(&mut runs)),
        (2, "affine exactness", affine_exactness()),
        (3, "convergence order", convergence(&mut runs)),
        (4, "anti-diffusion ordering", anti_diffusion(&mut runs)),
        (5, "bound preservation", bounds(&mut runs)),
        (6, "smoothness score", eta_behaviour()),
        (7, "geometry oracle", geometry_oracle()),
        (8, "remap oracle", remap_oracle()),
        (9, "determinism", determinism()),
    ];

    let mut failed = 0;
    for (id, name, res) in &results {
        let (pass, detail) = match res {
            Ok(o) => (o.pass, o.detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} criterion {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
