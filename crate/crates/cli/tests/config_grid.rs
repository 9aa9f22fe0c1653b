use planted::config::{ExperimentConfig, ModelKind, RhoSpec};

const BASE: &str = "\
[model]
kind = pds
r = 2, 3
n = 20, 30
rho_exponent = 0.3
q0 = 0.4
snr = 0.5, 2
[recovery]
ell = 1
trials = auto
preprocess = false
[run]
seeds = 3..5
output = out.csv
";

#[test]
fn parses_and_orders_grid() {
    let cfg = ExperimentConfig::parse(BASE).unwrap();
    assert_eq!(cfg.model, ModelKind::Pds);
    assert_eq!(cfg.seeds, vec![3, 4]);
    assert_eq!(cfg.recovery.ell, Some(1));
    assert_eq!(cfg.recovery.trials, None);
    assert!(!cfg.recovery.preprocess);
    assert_eq!(cfg.rho, RhoSpec::Exponents(vec![0.3]));
    let grid = cfg.grid();
    let axes: Vec<(usize, usize, f64)> = grid.iter().map(|p| (p.r, p.n, p.snr)).collect();
    assert_eq!(
        axes,
        vec![
            (2, 20, 0.5),
            (2, 20, 2.0),
            (2, 30, 0.5),
            (2, 30, 2.0),
            (3, 20, 0.5),
            (3, 20, 2.0),
            (3, 30, 0.5),
            (3, 30, 2.0)
        ]
    );
    for (i, p) in grid.iter().enumerate() {
        assert_eq!(p.index, i);
        assert!((p.rho - (p.n as f64).powf(-0.3)).abs() < 1e-15);
        assert!(p.strength > p.q0 && p.strength <= 1.0);
    }
}

#[test]
fn snr_resolution_inverts() {
    let cfg = ExperimentConfig::parse(BASE).unwrap();
    for p in cfg.grid() {
        let q1 = format!("q1 = {:?}", p.strength);
        let text = BASE.replace("snr = 0.5, 2", &q1).replace("r = 2, 3", &format!("r = {}", p.r));
        let text = text.replace("n = 20, 30", &format!("n = {}", p.n));
        let back = ExperimentConfig::parse(&text).unwrap().grid();
        assert!((back[0].snr - p.snr).abs() < 1e-9 * p.snr, "{} vs {}", back[0].snr, p.snr);
    }
}

#[test]
fn replicates_and_lists() {
    let text = BASE.replace("seeds = 3..5", "replicates = 3");
    assert_eq!(ExperimentConfig::parse(&text).unwrap().seeds, vec![0, 1, 2]);
    let text = BASE.replace("seeds = 3..5", "seeds = 7, 1");
    assert_eq!(ExperimentConfig::parse(&text).unwrap().seeds, vec![7, 1]);
}

#[test]
fn empty_axis_gives_empty_grid() {
    let text = BASE.replace("snr = 0.5, 2", "snr =");
    assert!(ExperimentConfig::parse(&text).unwrap().grid().is_empty());
}

#[test]
fn tensor_config_uses_lambda() {
    let text = "[model]\nkind = stpca\nr = 3\nn = 10\nrho = 0.2\nlambda = 1.5\nnoise = symmetrized\n[run]\nseeds = 0..1\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    assert!(cfg.symmetrized_noise);
    assert!(cfg.recovery.preprocess);
    let g = cfg.grid();
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].strength, 1.5);
    assert!(g[0].snr > 0.0);
}

#[test]
fn rejects_malformed_configs() {
    let cases = [
        BASE.replace("kind = pds", "kind = clique"),
        BASE.replace("q0 = 0.4", "q0 = 0.4\ncolour = red"),
        BASE.replace("[run]", "[extra]\na = 1\n[run]"),
        BASE.replace("seeds = 3..5", "seeds = 5..5"),
        BASE.replace("seeds = 3..5", "seeds = 3..5\nreplicates = 2"),
        BASE.replace("output = out.csv", "output = ../out.csv"),
        BASE.replace("rho_exponent = 0.3", "rho_exponent = 0.3\nrho = 0.1"),
        BASE.replace("snr = 0.5, 2", "snr = 0.5, x"),
        BASE.replace("trials = auto", "trials = 0"),
        BASE.replace("preprocess = false", "preprocess = maybe"),
        BASE.replace("ell = 1", "ell = 1\nell = 2"),
        BASE.replace("[model]\n", ""),
    ];
    for text in &cases {
        assert!(ExperimentConfig::parse(text).is_err(), "accepted:\n{text}");
    }
}
