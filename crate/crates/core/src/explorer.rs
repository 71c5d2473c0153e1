//! Regime classification, solution counting and parameter sweeps.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{self, EnergySolution, MinimizeOptions, Parity, Provenance};
use crate::error::{Error, Result};
use crate::grid::{GridKind, GridSpec};
use crate::params::{i_of_lambda, HalfWidth, ProblemParams};
use crate::profile::{self, CoordinateKind, RadialProfile};
use crate::shooting::{self, EvenSearch};
use crate::spectral::{self, SpectralOptions};

/// Environment variable read for the sweep worker count.
pub const WORKERS_ENV: &str = "ANNULUS_WORKERS";

/// Residual below which a solution counts towards a uniqueness violation.
pub const VALID_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    OpenGap,
    Unsupported,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::I => "i",
            Regime::Ii => "ii",
            Regime::Iii => "iii",
            Regime::Iv => "iv",
            Regime::V => "v",
            Regime::Vi => "vi",
            Regime::Vii => "vii",
            Regime::OpenGap => "open_gap",
            Regime::Unsupported => "unsupported",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "i" => Regime::I,
            "ii" => Regime::Ii,
            "iii" => Regime::Iii,
            "iv" => Regime::Iv,
            "v" => Regime::V,
            "vi" => Regime::Vi,
            "vii" => Regime::Vii,
            "open_gap" => Regime::OpenGap,
            "unsupported" => Regime::Unsupported,
            _ => return Err(Error::Config(format!("unknown regime `{s}`"))),
        })
    }
}

/// What the multiplicity result predicts at `(lambda, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    /// "unique", "≥3", "≥5" or "unknown".
    pub predicted_count: String,
    pub parity_breakdown: String,
    pub inputs_echo: ProblemParams,
}

impl RegimeVerdict {
    /// Whether the total number of positive solutions is claimed to be one.
    pub fn claims_uniqueness(&self) -> bool {
        matches!(self.regime, Regime::I | Regime::Ii | Regime::Iv | Regime::Vii)
    }

    /// Whether the even solution is claimed to be unique.
    pub fn claims_even_uniqueness(&self) -> bool {
        self.claims_uniqueness() || matches!(self.regime, Regime::V | Regime::OpenGap)
    }

    /// Lower bounds `(even, non_even)` on the counts.
    pub fn lower_bounds(&self) -> (usize, usize) {
        match self.regime {
            Regime::I | Regime::Ii | Regime::Iv | Regime::Vii | Regime::OpenGap => (1, 0),
            Regime::V => (1, 2),
            Regime::Iii | Regime::Vi => (3, 2),
            Regime::Unsupported => (0, 0),
        }
    }
}

/// Place `(lambda, p)` in the multiplicity classification. `params` supplies
/// the domain and hence `lambda_1`.
pub fn classify(params: &ProblemParams) -> RegimeVerdict {
    let (lambda, p) = (params.lambda, params.p);
    let verdict = |regime, count: &str, parity: &str| RegimeVerdict {
        regime,
        predicted_count: count.into(),
        parity_breakdown: parity.into(),
        inputs_echo: *params,
    };
    if !params.is_supported() || !(p > 1.0) {
        return verdict(Regime::Unsupported, "unknown", "outside -lambda_1 < lambda <= 1");
    }
    if lambda <= 0.0 {
        return verdict(Regime::I, "unique", "1 even");
    }
    if lambda <= 0.75 {
        return if p <= 5.0 {
            verdict(Regime::Ii, "unique", "1 even")
        } else {
            verdict(Regime::Iii, "≥5", "≥3 even, ≥2 non-even")
        };
    }
    let i = i_of_lambda(lambda).unwrap_or(f64::NAN);
    if p <= i {
        verdict(Regime::Iv, "unique", "1 even")
    } else if p > 5.0 {
        verdict(Regime::Vi, "≥5", "≥3 even, ≥2 non-even")
    } else if p > 3.0 / lambda + 1.0 {
        verdict(Regime::V, "≥3", "1 even, ≥2 non-even")
    } else {
        verdict(Regime::OpenGap, "unknown", "1 even (unique among even), non-even count open")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    Violation,
    Inconclusive,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Consistent => "consistent",
            Consistency::Violation => "violation",
            Consistency::Inconclusive => "inconclusive",
        })
    }
}

impl std::str::FromStr for Consistency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "consistent" => Ok(Consistency::Consistent),
            "violation" => Ok(Consistency::Violation),
            "inconclusive" => Ok(Consistency::Inconclusive),
            _ => Err(Error::Config(format!("unknown consistency `{s}`"))),
        }
    }
}

/// Outcome of counting solutions at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub params: ProblemParams,
    pub solutions_found: usize,
    pub even_count: usize,
    pub non_even_count: usize,
    /// Even solutions first, each group by increasing quotient.
    pub rayleigh_values: Vec<f64>,
    pub morse_indices: Vec<usize>,
    pub verdict: RegimeVerdict,
    pub consistency: Consistency,
    /// Sub-tasks that failed; the record is still produced.
    pub failures: Vec<String>,
}

/// Work limits for one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub grid: GridSpec,
    pub minimize: MinimizeOptions,
    pub scan_points: usize,
    /// Sup-norm distance below which two profiles are the same solution.
    pub dedup_tol: f64,
    pub spectrum: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            minimize: MinimizeOptions::default(),
            scan_points: EvenSearch::default().scan_points,
            dedup_tol: 1e-6,
            spectrum: true,
        }
    }
}

/// A solution kept by [`count_solutions`], with its residual and Morse index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundSolution {
    pub solution: EnergySolution,
    pub residual: f64,
    pub morse_index: Option<usize>,
}

/// Residual appropriate to how the solution was produced: the scheme's own
/// equation for minimizers, the ODE through the derivative samples for
/// shooting profiles.
pub fn solution_residual(solution: &EnergySolution, params: &ProblemParams) -> Result<f64> {
    match solution.provenance {
        Provenance::ShootingRoot => profile::integral_residual(&solution.profile, params),
        _ => profile::discrete_residual(&solution.profile, params),
    }
}

/// All solutions found at `params` within `budget`, deduplicated.
pub fn find_solutions(params: &ProblemParams, budget: &Budget) -> (Vec<FoundSolution>, Vec<String>) {
    let mut failures = Vec::new();
    let search = EvenSearch {
        scan_points: budget.scan_points,
        grid: budget.grid,
        ..EvenSearch::default()
    };
    let (shot, (even_min, free)) = rayon::join(
        || shooting::find_even_solutions(params, &search),
        || {
            rayon::join(
                || energy::even_least_energy(params, &budget.grid, &budget.minimize),
                || energy::free_minimizers(params, &budget.grid, &budget.minimize),
            )
        },
    );
    let mut kept: Vec<EnergySolution> = Vec::new();
    let tol = budget.dedup_tol;
    let close = |a: &RadialProfile, b: &RadialProfile| a.sup_distance(b).map_or(false, |d| d <= tol);
    // a minimizer is compared with the others as computed and, failing that,
    // after Richardson extrapolation against the halved grid
    let push = |s: EnergySolution, kept: &mut Vec<EnergySolution>| -> bool {
        if kept.iter().any(|k| close(&k.profile, &s.profile)) {
            return false;
        }
        let near: Vec<&EnergySolution> = kept
            .iter()
            .filter(|k| (k.rayleigh - s.rayleigh).abs() <= 1e-5 * s.rayleigh.abs())
            .collect();
        if s.provenance != Provenance::ShootingRoot && !near.is_empty() {
            if let Ok(x) = energy::extrapolated_profile(&s, params, &budget.minimize) {
                if near.iter().any(|k| close(&k.profile, &x)) {
                    return false;
                }
            }
        }
        kept.push(s);
        true
    };
    match shot {
        Ok(v) => v.into_iter().for_each(|s| {
            push(s, &mut kept);
        }),
        Err(e) => failures.push(format!("shooting: {e}")),
    }
    let shot_count = kept.len();
    match even_min {
        Ok(s) => {
            if push(s, &mut kept) && shot_count > 0 {
                failures.push("even minimizer matches no shooting solution".into());
            }
        }
        Err(e) => failures.push(format!("even minimization: {e}")),
    }
    match free {
        Ok((l, r)) => {
            for s in [l, r] {
                let mirror = (s.parity == Parity::NonEven).then(|| s.reflected());
                push(s, &mut kept);
                if let Some(m) = mirror {
                    push(m, &mut kept);
                }
            }
        }
        Err(e) => failures.push(format!("free minimization: {e}")),
    }
    kept.sort_by(|a, b| {
        (a.parity != Parity::Even)
            .cmp(&(b.parity != Parity::Even))
            .then(a.rayleigh.total_cmp(&b.rayleigh))
    });
    let found: Vec<(FoundSolution, Option<String>)> = kept
        .into_par_iter()
        .map(|solution| {
            let mut note = None;
            let residual = solution_residual(&solution, params).unwrap_or(f64::INFINITY);
            let morse_index = if budget.spectrum {
                match spectral::linearized_spectrum(&solution, params, 2, &SpectralOptions::default()) {
                    Ok(rep) => Some(rep.morse_index),
                    Err(e) => {
                        note = Some(format!("spectrum (R = {}): {e}", solution.rayleigh));
                        let matrix = SpectralOptions {
                            matrix_only: true,
                            ..SpectralOptions::default()
                        };
                        spectral::linearized_spectrum(&solution, params, 2, &matrix)
                            .ok()
                            .map(|r| r.morse_index)
                    }
                }
            } else {
                None
            };
            (
                FoundSolution {
                    solution,
                    residual,
                    morse_index,
                },
                note,
            )
        })
        .collect();
    let mut out = Vec::with_capacity(found.len());
    for (f, note) in found {
        failures.extend(note);
        out.push(f);
    }
    (out, failures)
}

/// Count solutions at `params` and compare with [`classify`].
pub fn count_solutions(params: &ProblemParams, budget: &Budget) -> SweepRecord {
    let verdict = classify(params);
    if verdict.regime == Regime::Unsupported {
        return record_from(params, verdict, &[], vec!["unsupported parameters; nothing solved".into()]);
    }
    let (found, failures) = find_solutions(params, budget);
    record_from(params, verdict, &found, failures)
}

fn record_from(params: &ProblemParams, verdict: RegimeVerdict, found: &[FoundSolution], failures: Vec<String>) -> SweepRecord {
    let even: Vec<&FoundSolution> = found.iter().filter(|f| f.solution.parity == Parity::Even).collect();
    let non_even: Vec<&FoundSolution> = found.iter().filter(|f| f.solution.parity != Parity::Even).collect();
    let valid = |v: &[&FoundSolution]| v.iter().filter(|f| f.residual <= VALID_RESIDUAL).count();
    let consistency = judge(&verdict, valid(&even), valid(&non_even), found.len());
    SweepRecord {
        params: *params,
        solutions_found: found.len(),
        even_count: even.len(),
        non_even_count: non_even.len(),
        rayleigh_values: found.iter().map(|f| f.solution.rayleigh).collect(),
        morse_indices: found.iter().filter_map(|f| f.morse_index).collect(),
        verdict,
        consistency,
        failures,
    }
}

/// Uniqueness claims contradicted by two valid solutions are violations;
/// shortfalls against lower bounds are inconclusive, since the classification only
/// covers `eps` below an unquantified threshold.
fn judge(verdict: &RegimeVerdict, even: usize, non_even: usize, total: usize) -> Consistency {
    if verdict.regime == Regime::Unsupported || total == 0 {
        return Consistency::Inconclusive;
    }
    if verdict.claims_uniqueness() && even + non_even >= 2 {
        return Consistency::Violation;
    }
    if verdict.claims_even_uniqueness() && even >= 2 {
        return Consistency::Violation;
    }
    let (need_even, need_non_even) = verdict.lower_bounds();
    if even < need_even || non_even < need_non_even || verdict.regime == Regime::OpenGap {
        return Consistency::Inconclusive;
    }
    Consistency::Consistent
}

/// Budget section of a sweep configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub grid_nodes: usize,
    pub grid_kind: GridKind,
    pub max_iterations: usize,
    pub scan_points: usize,
    pub spectrum: bool,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let b = Budget::default();
        Self {
            grid_nodes: b.grid.nodes,
            grid_kind: b.grid.kind,
            max_iterations: b.minimize.max_iterations,
            scan_points: b.scan_points,
            spectrum: b.spectrum,
        }
    }
}

impl From<BudgetConfig> for Budget {
    fn from(c: BudgetConfig) -> Self {
        Budget {
            grid: GridSpec {
                nodes: c.grid_nodes,
                kind: c.grid_kind,
            },
            minimize: MinimizeOptions {
                max_iterations: c.max_iterations,
                ..MinimizeOptions::default()
            },
            scan_points: c.scan_points,
            spectrum: c.spectrum,
            ..Budget::default()
        }
    }
}

/// Sweep description, read from JSON.
///
/// ```json
/// { "lambda": [0.5, 1.0], "p": [3.0, 4.5], "epsilon": 0.01, "budget": { "grid_nodes": 2001 } }
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
    pub epsilon: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    #[serde(default)]
    pub budget: BudgetConfig,
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// The half-width to use, with a warning when more than one was given
    /// (precedence `epsilon`, `a`, `b`).
    pub fn half_width(&self) -> Result<(HalfWidth, Option<String>)> {
        let given: Vec<HalfWidth> = [
            self.epsilon.map(HalfWidth::Epsilon),
            self.a.map(HalfWidth::A),
            self.b.map(HalfWidth::B),
        ]
        .into_iter()
        .flatten()
        .collect();
        match given.first() {
            None => Err(Error::Config("one of `epsilon`, `a` or `b` is required".into())),
            Some(&w) => {
                let warning = (given.len() > 1).then(|| format!("several half-widths given; using {w:?}"));
                Ok((w, warning))
            }
        }
    }
}

/// Records of a sweep plus the warnings raised while running it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub warnings: Vec<String>,
}

impl SweepOutcome {
    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| r.consistency == Consistency::Violation).count()
    }

    /// Supported points where nothing was found and something failed.
    pub fn numerical_failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verdict.regime != Regime::Unsupported && r.solutions_found == 0 && !r.failures.is_empty())
            .count()
    }

    /// 0 success, 3 consistency violation, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        if self.violations() > 0 {
            3
        } else if self.numerical_failures() > 0 {
            4
        } else {
            0
        }
    }
}

/// Worker count from an explicit value, else the environment, else rayon's default.
pub fn worker_count(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok()).filter(|&n| n > 0)
}

/// Run the `lambda x p` grid of `config`, one record per point in grid order
/// (lambda major).
pub fn sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    let mut warnings = Vec::new();
    let points: Vec<(f64, f64)> = config
        .lambda
        .iter()
        .flat_map(|&l| config.p.iter().map(move |&p| (l, p)))
        .collect();
    if points.is_empty() {
        return Ok(SweepOutcome::default());
    }
    let (width, warning) = config.half_width()?;
    warnings.extend(warning);
    let budget = Budget::from(config.budget);
    let mut params = Vec::with_capacity(points.len());
    for &(l, p) in &points {
        match ProblemParams::new(l, p, width) {
            Ok(prm) => {
                if !prm.is_supported() {
                    warnings.push(format!("lambda = {l}, p = {p} is outside the supported range; marked unsupported"));
                }
                params.push(prm);
            }
            Err(e) => warnings.push(format!("skipping lambda = {l}, p = {p}: {e}")),
        }
    }
    let run = || params.par_iter().map(|prm| count_solutions(prm, &budget)).collect::<Vec<_>>();
    let records = match worker_count(config.workers) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(SweepOutcome { records, warnings })
}

/// CSV header, in column order.
pub const CSV_HEADER: [&str; 13] = [
    "lambda",
    "p",
    "epsilon",
    "a",
    "b",
    "regime",
    "predicted",
    "even_count",
    "non_even_count",
    "rayleigh_list",
    "morse_list",
    "consistency",
    "failures",
];

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split<T: std::str::FromStr>(s: &str, column: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| x.parse().map_err(|_| Error::Config(format!("bad entry `{x}` in column {column}"))))
        .collect()
}

/// Write records as CSV (`.` decimals, `\n` line endings).
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in records {
        let prm = &r.params;
        w.write_record([
            prm.lambda.to_string(),
            prm.p.to_string(),
            prm.epsilon.to_string(),
            prm.a.to_string(),
            prm.b.to_string(),
            r.verdict.regime.to_string(),
            r.verdict.predicted_count.clone(),
            r.even_count.to_string(),
            r.non_even_count.to_string(),
            join(&r.rayleigh_values),
            join(&r.morse_indices),
            r.consistency.to_string(),
            r.failures.join(";"),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parse CSV written by [`write_csv`]. The verdict is recomputed from the
/// parameters, which reproduces the written one since [`classify`] is pure.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers().map_err(|e| Error::Config(e.to_string()))?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!("unexpected CSV header {headers:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| Error::Config(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad number `{}` in column {}", &row[i], CSV_HEADER[i])))
        };
        let count = |i: usize| -> Result<usize> {
            row[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad count `{}` in column {}", &row[i], CSV_HEADER[i])))
        };
        let params = ProblemParams {
            lambda: num(0)?,
            p: num(1)?,
            epsilon: num(2)?,
            a: num(3)?,
            b: num(4)?,
        };
        let verdict = classify(&params);
        if verdict.regime != row[5].parse()? || verdict.predicted_count != row[6] {
            return Err(Error::Config(format!("verdict in row does not match parameters {params:?}")));
        }
        let even_count = count(7)?;
        let non_even_count = count(8)?;
        out.push(SweepRecord {
            params,
            solutions_found: even_count + non_even_count,
            even_count,
            non_even_count,
            rayleigh_values: split(&row[9], CSV_HEADER[9])?,
            morse_indices: split(&row[10], CSV_HEADER[10])?,
            verdict,
            consistency: row[11].parse()?,
            failures: if row[12].is_empty() {
                Vec::new()
            } else {
                row[12].split(';').map(String::from).collect()
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotFormat {
    Svg,
    /// Two gnuplot data blocks, `t w` then `r u`, separated by two blank lines.
    Text,
}

/// Write `w` over `t` and `u` over `r` side by side.
pub fn emit_profile_plot(solution: &EnergySolution, params: &ProblemParams, path: &Path, format: PlotFormat) -> Result<()> {
    solution.profile.require_coordinate(CoordinateKind::T)?;
    let u = profile::u_from_w(&solution.profile, params)?;
    let w_pts: Vec<(f64, f64)> = solution.profile.grid.iter().copied().zip(solution.profile.values.iter().copied()).collect();
    let u_pts: Vec<(f64, f64)> = u.grid.iter().copied().zip(u.values.iter().copied()).collect();
    let text = match format {
        PlotFormat::Text => {
            let mut s = String::from("# t w\n");
            for (t, w) in &w_pts {
                s.push_str(&format!("{t} {w}\n"));
            }
            s.push_str("\n\n# r u\n");
            for (r, v) in &u_pts {
                s.push_str(&format!("{r} {v}\n"));
            }
            s
        }
        PlotFormat::Svg => svg(&[("t", "w", &w_pts), ("r", "u", &u_pts)], solution.rayleigh),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Data range of a series, widened when degenerate.
pub fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn svg(panels: &[(&str, &str, &[(f64, f64)])], rayleigh: f64) -> String {
    const W: f64 = 420.0;
    const H: f64 = 300.0;
    const M: f64 = 50.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        W * panels.len() as f64,
        H + 20.0
    );
    for (k, (xl, yl, pts)) in panels.iter().enumerate() {
        let (x0, x1) = axis_range(pts.iter().map(|p| p.0));
        let (y0, y1) = axis_range(pts.iter().map(|p| p.1));
        let ox = k as f64 * W;
        let sx = |x: f64| ox + M + (x - x0) / (x1 - x0) * (W - 1.5 * M);
        let sy = |y: f64| H - M + 20.0 - (y - y0) / (y1 - y0) * (H - 1.5 * M);
        s.push_str(&format!(
            "<g data-x-range=\"{x0} {x1}\" data-y-range=\"{y0} {y1}\">\n<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
            sx(x0),
            sy(y1),
            sx(x1) - sx(x0),
            sy(y0) - sy(y1)
        ));
        let line: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        s.push_str(&format!("<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"{}\"/>\n", line.join(" ")));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xl}</text>\n<text x=\"{}\" y=\"{}\">{yl}</text>\n",
            sx(0.5 * (x0 + x1)),
            H,
            ox + 10.0,
            sy(0.5 * (y0 + y1))
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\">{x0:.4}</text><text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{x1:.4}</text>\n",
            sx(x0),
            sy(y0) + 14.0,
            sx(x1),
            sy(y0) + 14.0
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{y0:.4}</text><text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{y1:.4}</text>\n</g>\n",
            sx(x0) - 4.0,
            sy(y0),
            sx(x0) - 4.0,
            sy(y1) + 10.0
        ));
    }
    s.push_str(&format!("<text x=\"10\" y=\"16\">R(w) = {rayleigh:.6}</text>\n</svg>\n"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prm(lambda: f64, p: f64) -> ProblemParams {
        ProblemParams::with_epsilon(lambda, p, 0.01).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&prm(0.5, 3.0)).regime, Regime::Ii);
        assert_eq!(classify(&prm(0.5, 3.0)).predicted_count, "unique");
        assert_eq!(classify(&prm(1.0, 9.0)).regime, Regime::Vi);
        assert_eq!(classify(&prm(1.0, 9.0)).predicted_count, "≥5");
        assert_eq!(classify(&prm(0.9, 4.25)).regime, Regime::OpenGap);
        assert_eq!(classify(&prm(0.9, 4.25)).predicted_count, "unknown");
        assert_eq!(classify(&prm(1.0, 4.5)).regime, Regime::V);
        assert_eq!(classify(&prm(0.9, 4.0)).regime, Regime::Iv);
        assert_eq!(classify(&prm(0.5, 7.0)).regime, Regime::Iii);
        assert_eq!(classify(&prm(-0.01, 7.0)).regime, Regime::I);
        assert_eq!(classify(&prm(1.5, 3.0)).regime, Regime::Unsupported);
        assert_eq!(classify(&prm(-0.5, 3.0)).regime, Regime::Unsupported);
    }

    #[test]
    fn judge_only_flags_uniqueness() {
        let v = classify(&prm(0.5, 3.0));
        assert_eq!(judge(&v, 1, 0, 1), Consistency::Consistent);
        assert_eq!(judge(&v, 1, 2, 3), Consistency::Violation);
        let v = classify(&prm(1.0, 9.0));
        assert_eq!(judge(&v, 1, 0, 1), Consistency::Inconclusive);
        assert_eq!(judge(&v, 3, 2, 5), Consistency::Consistent);
        let v = classify(&prm(1.0, 4.5));
        assert_eq!(judge(&v, 2, 2, 4), Consistency::Violation);
    }

    #[test]
    fn half_width_precedence() {
        let c = SweepConfig {
            a: Some(1.5),
            b: Some(1.0),
            ..SweepConfig::default()
        };
        let (w, warn) = c.half_width().unwrap();
        assert_eq!(w, HalfWidth::A(1.5));
        assert!(warn.is_some());
        assert!(SweepConfig::default().half_width().is_err());
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = SweepConfig::from_json(r#"{"lambda": [1.0], "p": [3.0], "epsilon": 0.1, "gird": 3}"#).unwrap_err();
        assert!(e.to_string().contains("gird"), "{e}");
        let e = SweepConfig::from_json(r#"{"epsilon": 0.1, "budget": {"nodes": 3}}"#).unwrap_err();
        assert!(e.to_string().contains("nodes"), "{e}");
    }

    #[test]
    fn exit_codes_follow_worst_record() {
        let record = |consistency, found, failures: &[&str]| SweepRecord {
            params: prm(1.0, 4.5),
            solutions_found: found,
            even_count: found,
            non_even_count: 0,
            rayleigh_values: vec![1.0; found],
            morse_indices: Vec::new(),
            verdict: classify(&prm(1.0, 4.5)),
            consistency,
            failures: failures.iter().map(|s| s.to_string()).collect(),
        };
        let mut outcome = SweepOutcome::default();
        assert_eq!(outcome.exit_code(), 0);
        outcome.records.push(record(Consistency::Inconclusive, 0, &["minimizer stalled"]));
        assert_eq!(outcome.exit_code(), 4);
        outcome.records.push(record(Consistency::Violation, 4, &[]));
        assert_eq!(outcome.exit_code(), 3);
    }

    #[test]
    fn axis_range_widens_constants() {
        assert_eq!(axis_range([1.0, 1.0].into_iter()), (0.95, 1.05));
        assert_eq!(axis_range([0.0, 2.0].into_iter()), (0.0, 2.0));
    }
}
