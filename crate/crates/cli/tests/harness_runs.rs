use std::fs;

use planted::config::ExperimentConfig;
use planted::harness::{overlap_metrics, read_results, run_sweep, threshold_points, timing_path};
use planted::{emit_plotdata, PlotKind};

fn config(n: &str, snr: &str, seeds: &str) -> ExperimentConfig {
    let text = format!(
        "[model]\nkind = pds\nr = 2\nn = {n}\nrho_exponent = 0.3\nq0 = 0.5\nsnr = {snr}\n\
         [recovery]\nell = 1\ntrials = 6\npreprocess = false\n[run]\nseeds = {seeds}\noutput = res.csv\n"
    );
    ExperimentConfig::parse(&text).unwrap()
}

#[test]
fn overlap_examples() {
    assert_eq!(overlap_metrics(&[1, 2, 3], &[1, 2, 3], 10, 0.3).0, 0);
    assert_eq!(overlap_metrics(&[1, 2, 3], &[4, 5, 6], 10, 0.3).0, 6);
    let (d, norm) = overlap_metrics(&[1, 2, 3], &[2, 3, 4], 10, 0.3);
    assert_eq!(d, 2);
    assert!((norm - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_sweep(&config("20", "", "0..2"), dir.path()).unwrap();
    assert!(rows.is_empty());
    let text = fs::read_to_string(dir.path().join("res.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("row,grid_index,seed,"));
}

#[test]
fn one_point_two_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_sweep(&config("20", "2", "4,9"), dir.path()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].seed, rows[1].seed), (4, 9));
    assert!(rows.iter().all(|r| r.status == "ok" && r.grid_index == 0));
    assert_eq!(read_results(&dir.path().join("res.csv")).unwrap(), rows);
    let timing = fs::read_to_string(timing_path(&dir.path().join("res.csv"))).unwrap();
    assert_eq!(timing.lines().count(), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = config("20, 24", "0.5, 4", "0..3");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_sweep(&cfg, a.path()).unwrap();
    std::env::set_var(planted::harness::WORKERS_ENV, "3");
    run_sweep(&cfg, b.path()).unwrap();
    std::env::remove_var(planted::harness::WORKERS_ENV);
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("res.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn plot_data_groups_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let rows = run_sweep(&config("20", "1", "0..1"), dir.path()).unwrap();
    let one = emit_plotdata(&rows, PlotKind::Threshold).unwrap();
    assert_eq!(one.lines().count(), 2);
    assert_eq!(one.lines().next().unwrap(), "n,r,snr,count,mean,stderr");

    let rows = run_sweep(&config("20, 24", "0.5, 2", "0..2"), dir.path()).unwrap();
    let points = threshold_points(&rows);
    assert_eq!(points.len(), 4);
    assert_eq!(points.iter().map(|p| p.n).collect::<Vec<_>>(), vec![20, 20, 24, 24]);
    assert!(points.iter().all(|p| p.count == 2));
    let text = emit_plotdata(&rows, PlotKind::Threshold).unwrap();
    assert_eq!(text, emit_plotdata(&rows, PlotKind::Threshold).unwrap());
    assert!(emit_plotdata(&[], PlotKind::Threshold).is_err());
}
