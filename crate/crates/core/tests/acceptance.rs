//! End-to-end acceptance run. Every criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::time::{Duration, Instant};

use annulus::energy::{self, MinimizeOptions, Parity, Provenance};
use annulus::explorer::{self, Budget, FoundSolution};
use annulus::grid::GridSpec;
use annulus::pohozaev::{self, CoefficientKind};
use annulus::profile;
use annulus::shooting::{self, EvenSearch, ShootOptions};
use annulus::spectral::{self, SpectralOptions};
use annulus::ProblemParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Point {
    params: ProblemParams,
    found: Vec<FoundSolution>,
    elapsed: Duration,
}

fn solve(params: ProblemParams) -> Point {
    let start = Instant::now();
    let (found, failures) = explorer::find_solutions(&params, &Budget::default());
    assert!(failures.is_empty(), "{params:?}: {failures:?}");
    Point {
        params,
        found,
        elapsed: start.elapsed(),
    }
}

fn rel(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn evens(point: &Point) -> Vec<&FoundSolution> {
    point.found.iter().filter(|f| f.solution.parity == Parity::Even).collect()
}

fn non_evens(point: &Point) -> Vec<&FoundSolution> {
    point.found.iter().filter(|f| f.solution.parity == Parity::NonEven).collect()
}

fn quotients_low_exponent(point: &Point) -> Outcome {
    let free: Vec<f64> = non_evens(point).iter().map(|f| f.solution.rayleigh).collect();
    let even: Vec<f64> = evens(point).iter().map(|f| f.solution.rayleigh).collect();
    let ok = !free.is_empty()
        && free.iter().all(|r| rel(*r, 1.305) <= 0.02)
        && even.len() == 1
        && rel(even[0], 1.350) <= 0.02
        && point.elapsed <= Duration::from_secs(60);
    check(ok, format!("free R {free:?}, even R {even:?}, {:.2?}", point.elapsed))
}

fn quotients_high_exponent(point: &Point) -> Outcome {
    let mut even: Vec<f64> = evens(point).iter().map(|f| f.solution.rayleigh).collect();
    even.sort_by(f64::total_cmp);
    let targets = [0.285, 1.436, 1.437];
    let mut even_ok = false;
    for i in 0..even.len() {
        for j in i + 1..even.len() {
            for k in j + 1..even.len() {
                let picked = [even[i], even[j], even[k]];
                even_ok |= picked.iter().zip(targets).all(|(r, t)| rel(*r, t) <= 0.02);
            }
        }
    }
    let free = non_evens(point);
    let free_r: Vec<f64> = free.iter().map(|f| f.solution.rayleigh).collect();
    let mirrored = free.iter().any(|a| {
        free.iter().any(|b| {
            let apart = a.solution.profile.sup_distance(&b.solution.profile).unwrap() > 1e-6;
            let mirror = a.solution.profile.reflected().sup_distance(&b.solution.profile).unwrap() <= 1e-6;
            apart && mirror
        })
    });
    let free_ok = !free_r.is_empty() && free_r.iter().all(|r| rel(*r, 0.166) <= 0.02);
    let ok = even_ok && free_ok && mirrored && point.elapsed <= Duration::from_secs(300);
    check(
        ok,
        format!(
            "even R {even:?}, free R {free_r:?} (off by {:.2}% from 0.166), mirror pair {mirrored}, {:.2?}",
            free_r.first().map_or(f64::NAN, |r| 100.0 * rel(*r, 0.166)),
            point.elapsed
        ),
    )
}

fn exact_solution_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_residual = 0.0f64;
    let mut worst_distance = 0.0f64;
    for _ in 0..10 {
        let lambda = rng.gen_range(0.5..=1.0);
        let p = rng.gen_range(2.0..=9.0);
        let prm = ProblemParams::with_epsilon(lambda, p, 0.01).map_err(|e| e.to_string())?;
        let exact = profile::exact_solution(&prm).map_err(|e| e.to_string())?;
        worst_residual = worst_residual.max(profile::ode_residual(&exact, &prm).map_err(|e| e.to_string())?);
        let shot = shooting::shoot(prm.constant_height(), &prm, &ShootOptions::default()).map_err(|e| e.to_string())?;
        let cut = 0.9 * prm.b;
        let grid: Vec<f64> = (0..=400).map(|i| cut * i as f64 / 400.0).collect();
        let oracle = profile::exact_solution_on(&prm, &grid).map_err(|e| e.to_string())?;
        for (t, w) in grid.iter().zip(&oracle.values) {
            let (v, _) = shot.eval(*t).ok_or(format!("trajectory ends before t = {t}"))?;
            worst_distance = worst_distance.max((v - w).abs());
        }
    }
    check(
        worst_residual <= 1e-8 && worst_distance <= 1e-7,
        format!("max residual {worst_residual:.2e}, max distance {worst_distance:.2e}"),
    )
}

fn lambda_1_cross_check() -> Outcome {
    let mut worst = 0.0f64;
    for eps in [0.01, 0.05, 0.1, 0.3, 0.6] {
        let prm = ProblemParams::with_epsilon(0.5, 3.0, eps).map_err(|e| e.to_string())?;
        let numeric = spectral::numeric_lambda_1(&prm, &GridSpec::uniform(2001)).map_err(|e| e.to_string())?;
        worst = worst.max((numeric - prm.lambda_1()).abs());
    }
    check(worst <= 1e-6, format!("max difference {worst:.2e}"))
}

fn uniqueness_regimes(points: &[Point]) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for point in points {
        let prm = &point.params;
        let verdict = explorer::classify(prm);
        let single = point.found.len() == 1
            && point.found[0].solution.parity == Parity::Even
            && point.found[0].morse_index == Some(1);
        let even = pohozaev::sign_check_even(prm, 10_000);
        let mut signs = even.interior.negative && (even.at_zero + (prm.p + 3.0) / 2.0).abs() <= 1e-12;
        if verdict.claims_uniqueness() && (prm.lambda <= 0.0 || prm.lambda > 0.75) {
            let general = pohozaev::sign_check_general(prm, 10_000);
            signs &= general.passes() && (general.at_a - general.at_a_closed).abs() <= 1e-12 * general.at_a.abs().max(1.0);
        }
        ok &= single && signs;
        notes.push(format!("{}: {} found, signs {}", verdict.regime, point.found.len(), signs));
    }
    check(ok, notes.join("; "))
}

fn multiplicity_regimes(low: &Point, high: &Point) -> Outcome {
    let even = evens(low);
    let mu_2 = match even.first() {
        Some(f) => spectral::linearized_spectrum(&f.solution, &low.params, 2, &SpectralOptions::default())
            .map_err(|e| e.to_string())?
            .eigenvalues[1],
        None => f64::NAN,
    };
    let low_ok = even.len() == 1 && non_evens(low).len() >= 2 && mu_2 < 0.0;
    let free_morse: Vec<Option<usize>> = non_evens(high).iter().map(|f| f.morse_index).collect();
    let high_ok = evens(high).len() >= 3 && free_morse.len() >= 2 && free_morse.iter().all(|m| *m == Some(1));
    check(
        low_ok && high_ok,
        format!(
            "v: {} even, {} non-even, mu_2 {mu_2:.4}; vi: {} even, {} non-even, free Morse {free_morse:?}",
            even.len(),
            non_evens(low).len(),
            evens(high).len(),
            non_evens(high).len()
        ),
    )
}

fn pohozaev_identity(points: &[&Point]) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for point in points {
        for f in &point.found {
            for kind in [CoefficientKind::EvenUniqueness, CoefficientKind::GeneralUniqueness] {
                let rep = pohozaev::identity_along_trajectory(&f.solution.profile, kind, &point.params, 0.95)
                    .map_err(|e| e.to_string())?;
                worst = worst.max(rep.relative);
                count += 1;
            }
        }
    }
    check(worst <= 1e-5, format!("{count} checks, max relative defect {worst:.2e}"))
}

fn second_variation() -> Outcome {
    let options = MinimizeOptions::default();
    let grid = GridSpec::default();
    let samples = [(1.0, 3.0, 0.2), (0.9, 3.0, 0.01), (1.0, 4.5, 0.01), (0.5, 3.0, 0.05), (1.0, 9.0, 0.1)];
    let mut worst = 0.0f64;
    for (lambda, p, eps) in samples {
        let prm = ProblemParams::with_epsilon(lambda, p, eps).map_err(|e| e.to_string())?;
        let sol = energy::even_least_energy(&prm, &grid, &options).map_err(|e| e.to_string())?;
        let sv = energy::second_variation_f(&sol, &prm).map_err(|e| e.to_string())?;
        let fd = energy::second_variation_fd(&sol.profile, &prm, 1e-3).map_err(|e| e.to_string())?;
        worst = worst.max((sv.r_ss - fd).abs() / sv.r_ss.abs());
    }
    let high = ProblemParams::with_a(1.0, 9.0, 1.57).map_err(|e| e.to_string())?;
    let low = ProblemParams::with_epsilon(0.9, 3.0, 0.01).map_err(|e| e.to_string())?;
    let f_of = |prm: &ProblemParams| -> Result<f64, String> {
        let sol = energy::even_least_energy(prm, &grid, &options).map_err(|e| e.to_string())?;
        Ok(energy::second_variation_f(&sol, prm).map_err(|e| e.to_string())?.f_of_b)
    };
    let (f_high, f_low) = (f_of(&high)?, f_of(&low)?);
    check(
        worst <= 1e-4 && f_high < 0.0 && f_low > 0.0,
        format!("max R_ss mismatch {worst:.2e}, F(b) {f_high:.3e} at p = 9, {f_low:.3e} at p = 3"),
    )
}

fn energy_decay() -> Outcome {
    let base = ProblemParams::with_epsilon(1.0, 9.0, 0.1).map_err(|e| e.to_string())?;
    let eps = [0.1, 0.05, 0.02, 0.01];
    let curve = energy::even_least_energy_curve(&base, &eps, &GridSpec::default(), &MinimizeOptions::default());
    let mut values = Vec::new();
    let mut bounded = true;
    for (e, value) in curve {
        let value = value.map_err(|err| err.to_string())?;
        let bound = energy::plateau_upper_bound(&ProblemParams::with_epsilon(1.0, 9.0, e).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        bounded &= value <= bound;
        values.push(value);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    check(decreasing && bounded, format!("E {values:?}, below plateau bound {bounded}"))
}

fn zero_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    while checked < 20 {
        let lambda = rng.gen_range(-0.2..=1.0);
        let p = rng.gen_range(1.5..=10.0);
        let Ok(prm) = ProblemParams::with_epsilon(lambda, p, 0.05) else { continue };
        if !prm.is_supported() {
            continue;
        }
        let alpha = 10f64.powf(rng.gen_range(1.0..4.0));
        let Some(delta) = shooting::zero_bound_delta(alpha, &prm).map_err(|e| e.to_string())? else { continue };
        let z = shooting::shoot(alpha, &prm, &ShootOptions::default())
            .map_err(|e| e.to_string())?
            .first_zero
            .ok_or(format!("no zero for alpha = {alpha} at {prm:?}"))?;
        worst = worst.max(z / delta);
        checked += 1;
    }
    check(worst <= 1.0, format!("20 heights, max Z / bound {worst:.3}"))
}

fn crossing_functions() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (lambda, p) in [(0.9, 4.2), (0.8, 4.9), (0.95, 3.5), (0.85, 4.5), (0.99, 3.2)] {
        let rep = pohozaev::appendix_b_monotonicity(lambda, p, 10_000).map_err(|e| e.to_string())?;
        ok &= rep.passes();
        notes.push(format!("({lambda}, {p}) {}", rep.passes()));
    }
    check(ok, notes.join(", "))
}

fn property_suites(points: &[&Point]) -> Outcome {
    let options = MinimizeOptions::default();
    let grid = GridSpec::default();
    let mut grid_change = 0.0f64;
    for prm in [points[0].params, points[1].params] {
        let coarse = energy::even_least_energy(&prm, &grid, &options).map_err(|e| e.to_string())?;
        let fine = energy::even_least_energy(&prm, &grid.doubled(), &options).map_err(|e| e.to_string())?;
        grid_change = grid_change.max(rel(fine.rayleigh, coarse.rayleigh));
        let (c, _) = energy::free_minimizers(&prm, &grid, &options).map_err(|e| e.to_string())?;
        let (f, _) = energy::free_minimizers(&prm, &grid.doubled(), &options).map_err(|e| e.to_string())?;
        grid_change = grid_change.max(rel(f.rayleigh, c.rayleigh));
    }

    let mut agreement = 0.0f64;
    let mut eigen = 0.0f64;
    for point in points {
        let prm = &point.params;
        let min = energy::even_least_energy(prm, &grid, &options).map_err(|e| e.to_string())?;
        let refined = energy::extrapolated_profile(&min, prm, &options).map_err(|e| e.to_string())?;
        let search = EvenSearch::default();
        let roots = shooting::find_even_solutions(prm, &search).map_err(|e| e.to_string())?;
        let closest = roots
            .iter()
            .filter(|s| s.provenance == Provenance::ShootingRoot)
            .map(|s| refined.sup_distance(&s.profile).unwrap_or(f64::INFINITY))
            .fold(f64::INFINITY, f64::min);
        agreement = agreement.max(closest);
        for f in &point.found {
            let rep = spectral::linearized_spectrum(&f.solution, prm, 2, &SpectralOptions::default())
                .map_err(|e| e.to_string())?;
            eigen = eigen.max(rep.max_disagreement);
        }
    }

    let records: Vec<_> = points
        .iter()
        .map(|p| explorer::count_solutions(&p.params, &Budget::default()))
        .collect();
    let mut csv = Vec::new();
    explorer::write_csv(&records, &mut csv).map_err(|e| e.to_string())?;
    let parsed = explorer::read_csv(csv.as_slice()).map_err(|e| e.to_string())?;
    let round_trip = parsed == records;

    check(
        grid_change < 2e-3 && agreement <= 1e-6 && eigen <= 1e-6 && round_trip,
        format!(
            "grid doubling {:.3}%, shooting/minimizer {agreement:.2e}, eigen {eigen:.2e}, CSV round trip {round_trip}",
            100.0 * grid_change
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let low = solve(ProblemParams::with_epsilon(1.0, 4.5, 0.01).unwrap());
    let high = solve(ProblemParams::with_a(1.0, 9.0, 1.57).unwrap());
    let high_eps = solve(ProblemParams::with_epsilon(1.0, 9.0, 0.01).unwrap());
    let unique: Vec<Point> = [(-0.005, 3.0), (0.5, 3.0), (0.9, 3.0), (0.9, 4.25)]
        .into_iter()
        .map(|(lambda, p)| solve(ProblemParams::with_epsilon(lambda, p, 0.01).unwrap()))
        .collect();
    let mut stored: Vec<&Point> = vec![&low, &high, &high_eps];
    stored.extend(unique.iter());

    let results: Vec<(&str, Outcome)> = vec![
        ("reference quotients, p = 4.5", quotients_low_exponent(&low)),
        ("reference quotients, p = 9, a = 1.57", quotients_high_exponent(&high)),
        ("exact-solution oracle", exact_solution_oracle()),
        ("lambda_1 cross-check", lambda_1_cross_check()),
        ("uniqueness regimes", uniqueness_regimes(&unique)),
        ("multiplicity regimes", multiplicity_regimes(&low, &high_eps)),
        ("Pohozaev identity", pohozaev_identity(&stored)),
        ("second variation", second_variation()),
        ("even least energy decay", energy_decay()),
        ("first-zero bound", zero_bound()),
        ("phi_1 / phi_2 crossing", crossing_functions()),
        ("property suites", property_suites(&stored)),
    ];

    let mut failed = Vec::new();
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
