use iga_bem::bench::{
    emit_outputs, observed_order, to_csv, Experiment, ExperimentConfig, CSV_HEADER,
};
use iga_bem::space::{dim_splinespace, dim_superspace};

fn sweep(text: &str) -> iga_bem::bench::RunSummary {
    let mut ex = Experiment::new(ExperimentConfig::parse(text).unwrap()).unwrap();
    ex.run(|_, _, _| {})
}

/// CSV with the wall-time column removed.
fn without_seconds(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect()
}

#[test]
fn identical_configs_give_identical_tables() {
    let cfg = "geometry = torus\nproblem = helmholtz\nkappa = 1\ndegrees = 0,1\nlevels = 1,2\n";
    let a = to_csv(&sweep(cfg).records);
    let b = to_csv(&sweep(cfg).records);
    assert_eq!(without_seconds(&a), without_seconds(&b));
    assert_eq!(a.lines().next(), Some(CSV_HEADER));
}

#[test]
fn records_carry_closed_form_dimensions() {
    let s = sweep("geometry = fichera\ndegrees = 0,2\nlevels = 1,2\n");
    assert!(s.failures.is_empty());
    assert_eq!(s.records.len(), 4);
    for r in &s.records {
        assert_eq!(r.dof_star, dim_superspace(24, r.p, r.m));
        assert_eq!(r.dof, dim_splinespace(24, r.p, r.m));
        assert_eq!(r.h, 0.5f64.powi(r.m as i32));
        assert!(r.density_l2_err.is_none());
    }
}

#[test]
fn sphere_sweep_reports_density_and_order() {
    let s = sweep("geometry = sphere\ndegrees = 0\nlevels = 1-3\n");
    assert!(s.records.iter().all(|r| r.density_l2_err.is_some()));
    let errs = s.potential_errors(0);
    assert!(errs.windows(2).all(|w| w[1].1 < w[0].1), "{errs:?}");
    let order = observed_order(&errs).unwrap();
    assert!(order > 2.0, "{order}");
}

#[test]
fn outputs_land_in_the_directory() {
    let s = sweep("geometry = sphere\ndegrees = 0\nlevels = 1\n");
    let dir = std::env::temp_dir().join(format!("iga_bem_outputs_{}", std::process::id()));
    let (csv, script) = emit_outputs(&s.records, &dir, "probe", "probe").unwrap();
    assert!(csv.exists() && script.exists());
    std::fs::remove_dir_all(dir).ok();
    assert!(emit_outputs(&[], std::path::Path::new("."), "x", "x").is_err());
}
