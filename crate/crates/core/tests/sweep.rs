use annulus::energy::{self, EnergySolution, MinimizeOptions, Parity, Provenance};
use annulus::explorer::{self, Consistency, PlotFormat, Regime, SweepConfig};
use annulus::grid::GridSpec;
use annulus::profile;
use annulus::ProblemParams;

fn config(text: &str) -> SweepConfig {
    SweepConfig::from_json(text).unwrap()
}

fn blocks(text: &str) -> Vec<Vec<(f64, f64)>> {
    text.split("\n\n\n")
        .map(|block| {
            block
                .lines()
                .filter(|l| !l.starts_with('#') && !l.is_empty())
                .map(|l| {
                    let mut it = l.split(' ').map(|x| x.parse::<f64>().unwrap());
                    (it.next().unwrap(), it.next().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn three_by_three_sweep_has_no_violations() {
    let cfg = config(r#"{"lambda": [0.5, 0.9, 1.0], "p": [3.0, 4.5, 9.0], "epsilon": 0.01, "workers": 4}"#);
    let outcome = explorer::sweep(&cfg).unwrap();
    assert_eq!(outcome.records.len(), 9);
    assert_eq!(outcome.violations(), 0);
    assert_eq!(outcome.exit_code(), 0);
    let regimes: Vec<Regime> = outcome.records.iter().map(|r| r.verdict.regime).collect();
    for wanted in [Regime::Ii, Regime::V, Regime::Vi] {
        assert!(regimes.contains(&wanted), "{regimes:?}");
    }
    for (r, (l, p)) in outcome.records.iter().zip([0.5, 0.9, 1.0].iter().flat_map(|&l| [3.0, 4.5, 9.0].map(move |p| (l, p)))) {
        assert_eq!((r.params.lambda, r.params.p), (l, p));
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert_eq!(r.solutions_found, r.even_count + r.non_even_count);
        assert_eq!(r.rayleigh_values.len(), r.solutions_found);
    }
    let mut csv = Vec::new();
    explorer::write_csv(&outcome.records, &mut csv).unwrap();
    assert_eq!(explorer::read_csv(csv.as_slice()).unwrap(), outcome.records);
}

#[test]
fn worker_count_does_not_change_records() {
    let text = |w: usize| format!(r#"{{"lambda": [0.5, 1.0], "p": [3.0, 4.5], "epsilon": 0.05, "workers": {w}}}"#);
    let one = explorer::sweep(&config(&text(1))).unwrap();
    let three = explorer::sweep(&config(&text(3))).unwrap();
    assert_eq!(one.records, three.records);
}

#[test]
fn empty_grid_gives_empty_output() {
    let outcome = explorer::sweep(&config(r#"{"lambda": [], "p": [3.0], "epsilon": 0.01}"#)).unwrap();
    assert!(outcome.records.is_empty());
    assert_eq!(outcome.exit_code(), 0);
    let mut csv = Vec::new();
    explorer::write_csv(&outcome.records, &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1);
}

#[test]
fn unsupported_lambda_is_marked_and_warned() {
    let outcome = explorer::sweep(&config(r#"{"lambda": [1.5], "p": [3.0], "epsilon": 0.01}"#)).unwrap();
    assert_eq!(outcome.records.len(), 1);
    assert_eq!(outcome.records[0].verdict.regime, Regime::Unsupported);
    assert_eq!(outcome.records[0].consistency, Consistency::Inconclusive);
    assert_eq!(outcome.exit_code(), 0);
    assert!(!outcome.warnings.is_empty());
}

#[test]
fn schema_errors_name_the_key() {
    let err = SweepConfig::from_json(r#"{"lambda": [1.0], "p": [3.0], "epsilon": 0.01, "budget": {"grid_nodse": 11}}"#).unwrap_err();
    assert!(err.to_string().contains("grid_nodse"), "{err}");
}

#[test]
fn exact_solution_at_lambda_one_plots_constant_u() {
    let params = ProblemParams::with_epsilon(1.0, 2.0, 0.1).unwrap();
    // not a Dirichlet solution on the annulus, so no quotient is attached
    let w = profile::exact_solution(&params).unwrap();
    let sol = EnergySolution {
        rayleigh: f64::NAN,
        profile: w,
        parity: Parity::Even,
        provenance: Provenance::ShootingRoot,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.dat");
    explorer::emit_profile_plot(&sol, &params, &path, PlotFormat::Text).unwrap();
    let data = blocks(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(data.len(), 2);
    for &(_, u) in &data[1] {
        assert!((u - 1.0).abs() < 1e-12, "{u}");
    }

    let svg = dir.path().join("exact.svg");
    explorer::emit_profile_plot(&sol, &params, &svg, PlotFormat::Svg).unwrap();
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 2);
    let t_range = format!("data-x-range=\"{} {}\"", -params.b, params.b);
    assert!(text.contains(&t_range), "{t_range}");
}

#[test]
fn mirror_minimizers_give_mirror_plots() {
    let params = ProblemParams::with_epsilon(1.0, 4.5, 0.01).unwrap();
    let (left, right) = energy::free_minimizers(&params, &GridSpec::graded(801), &MinimizeOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (lp, rp) = (dir.path().join("l.dat"), dir.path().join("r.dat"));
    explorer::emit_profile_plot(&left, &params, &lp, PlotFormat::Text).unwrap();
    explorer::emit_profile_plot(&right, &params, &rp, PlotFormat::Text).unwrap();
    let l = blocks(&std::fs::read_to_string(lp).unwrap());
    let r = blocks(&std::fs::read_to_string(rp).unwrap());
    for k in 0..2 {
        let n = l[k].len();
        for i in 0..n {
            let (x, y) = l[k][i];
            let (xm, ym) = r[k][n - 1 - i];
            assert!((x + xm).abs() < 1e-12 && (y - ym).abs() < 1e-6, "{k} {i}: ({x}, {y}) vs ({xm}, {ym})");
        }
    }
}

#[test]
fn low_energy_even_solution_is_a_plateau() {
    let params = ProblemParams::with_a(1.0, 9.0, 1.57).unwrap();
    let sol = energy::even_least_energy(&params, &GridSpec::default(), &MinimizeOptions::default()).unwrap();
    assert!((sol.rayleigh - 0.285).abs() < 0.02 * 0.285);
    let w = &sol.profile;
    let mid: Vec<f64> = w
        .grid
        .iter()
        .zip(&w.values)
        .filter(|(t, _)| t.abs() < 0.95 * params.b)
        .map(|(_, v)| *v)
        .collect();
    let (lo, hi) = mid.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    assert!((hi - lo) < 1e-2 * hi, "{lo} {hi}");
}
