use std::fs;
use std::path::Path;
use std::process::Command;

use sasremap::config::RunConfig;
use sasremap::io::{field_from_csv, field_to_csv, mesh_from_csv, mesh_to_csv, report_values};
use sasremap::run::{report_from_dir, run};
use sasremap::{init_means, parse_config, FieldSpec, LimiterKind, MeshSeriesSpec, SeriesKind};

fn small_config(dir: &Path) -> RunConfig {
    let text = format!(
        "[mesh]\nkind = random_smooth\nimax = 9\nnmax = 12\nseed = 5\n\
         [limiter]\nkind = sas\nbeta_steep = 4.2\n\
         [field]\nkind = shock\n\
         [output]\ndir = {}\nstride = 4\nvtk = true\n",
        dir.display()
    );
    parse_config(&text).unwrap()
}

#[test]
fn config_text_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    assert_eq!(cfg.mesh.kind, SeriesKind::RandomSmooth);
    assert_eq!(cfg.mesh.jmax, 9);
    assert_eq!(cfg.limiter.kind, LimiterKind::Sas);
    assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);

    let dotted = parse_config("field.kind = affine\nfield.a = 1.5\nfield.b = -2\nfield.c = 0.25\nlimiter.kind = bj").unwrap();
    assert_eq!(dotted.field, FieldSpec::Affine { a: 1.5, b: -2.0, c: 0.25 });
    assert_eq!(dotted.limiter.kind, LimiterKind::BarthJespersen);
    assert_eq!(parse_config(&dotted.to_text()).unwrap(), dotted);
}

#[test]
fn csv_round_trips_are_exact() {
    let mesh = sasremap::meshgen::random_mesh(&MeshSeriesSpec::random_smooth(7, 1, 2)).unwrap();
    let field = init_means(&mesh, &FieldSpec::Sine);
    let p = Path::new("memory");
    assert_eq!(mesh_from_csv(p, &mesh_to_csv(&mesh)).unwrap(), mesh);
    assert_eq!(field_from_csv(p, &field_to_csv(&mesh, &field)).unwrap(), field);
}

#[test]
fn run_writes_outputs_and_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(&dir.path().join("out"));
    let sim = run(&cfg, Some(2)).unwrap();
    let out = &cfg.output.dir;
    for name in [
        "config.txt",
        "mesh_initial.csv",
        "mesh_final.csv",
        "field_initial.csv",
        "field_final.csv",
        "field_reference.csv",
        "field_initial.vtk",
        "field_final.vtk",
        "steps.csv",
        "report.txt",
        "mesh_00004.csv",
        "field_00008.csv",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    assert!(!out.join("field_00012.csv").exists());
    let steps = fs::read_to_string(out.join("steps.csv")).unwrap();
    assert_eq!(steps.lines().count(), 13);

    let recomputed = report_from_dir(out).unwrap();
    assert_eq!(recomputed.to_key_value(), sim.report.to_key_value());
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert_eq!(text, sim.report.to_key_value());
    let values = report_values(&out.join("report.txt"), &text).unwrap();
    assert!(values["mass_rel_error"] <= 1e-13);
    assert!(values.contains_key("interface_width"));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in [1, 3, 8] {
        let mut cfg = small_config(&dir.path().join(format!("t{threads}")));
        cfg.field = FieldSpec::Sine;
        run(&cfg, Some(threads)).unwrap();
        outputs.push((
            fs::read(cfg.output.dir.join("report.txt")).unwrap(),
            fs::read(cfg.output.dir.join("field_final.csv")).unwrap(),
        ));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn binary_subcommands() {
    let exe = env!("CARGO_BIN_EXE_sasremap");
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    fs::write(
        &cfg_path,
        format!(
            "# small tensor run\n[mesh]\nimax = 9\nnmax = 40\n[field]\nkind = sine\n[output]\ndir = {}\nstride = 10\n",
            out.display()
        ),
    )
    .unwrap();

    let res = Command::new(exe).args(["--threads", "2", "run"]).arg(&cfg_path).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let printed = String::from_utf8(res.stdout).unwrap();
    assert_eq!(printed, fs::read_to_string(out.join("report.txt")).unwrap());

    let res = Command::new(exe).arg("report").arg(&out).output().unwrap();
    assert!(res.status.success());
    assert_eq!(String::from_utf8(res.stdout).unwrap(), printed);

    let res = Command::new(exe).args(["mesh"]).arg(&cfg_path).output().unwrap();
    assert!(res.status.success());
    let listed = String::from_utf8(res.stdout).unwrap();
    assert_eq!(listed.lines().count(), 5);
    assert!(out.join("mesh_00040.csv").is_file());

    fs::write(&cfg_path, "[mesh]\nimax = two\n").unwrap();
    let res = Command::new(exe).arg("run").arg(&cfg_path).output().unwrap();
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("imax"));
}
