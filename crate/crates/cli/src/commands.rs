//! `sweep-werner`, `verify` and `thouless`.

use std::fmt::Write as _;
use std::path::Path;

use fermi_ent::bogoliubov::{annihilation_residual, apply_map, thouless_vacuum, BogoliubovMap};
use fermi_ent::densities::{entropy_qsp, entropy_sc, entropy_sp, majorization_chain, qsp_matrix, sp_matrix};
use fermi_ent::linalg::{frobenius, max_sorted_difference};
use fermi_ent::oracle::{convex_roof_search, min_entropy_over_qsp_bases, SearchBudget};
use fermi_ent::par::{map_indices, Execution};
use fermi_ent::quartet::{
    concurrence_of, d_values_both_routes, dual_state, entropy_from_concurrence, mixed_concurrence,
    optimal_decomposition, pure_concurrence, two_fermion_mixture, werner_mixture, QuartetState, MODES,
};
use fermi_ent::random::{random_state, seeded};
use fermi_ent::{binary_entropy, CMatrix, FockState, MixedState, Parity, C64};
use serde::Serialize;

use crate::failure::Failure;
use crate::report::{analyze, fmt_num, AnalyzeOptions};
use crate::statefile::{Loaded, StateFile};

// ---------------------------------------------------------------------------
// Grids and reference states.

/// Parse `a:b:step` into the inclusive grid `a, a + step, ...`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::schema(format!("grid {text:?} is not of the form a:b:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(Failure::schema(format!("grid {text:?} needs 0 <= a <= b <= 1 and step > 0")));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| (a + k as f64 * step).min(b)).collect())
}

pub fn max_entangled(parity: Parity) -> FockState {
    let state = match parity {
        Parity::Odd => {
            let vac = FockState::vacuum(MODES).expect("four modes");
            let full = FockState::filled(MODES).expect("four modes");
            &vac.create(0).expect("mode 0") + &full.annihilate(0).expect("mode 0")
        }
        _ => {
            &FockState::from_creations(MODES, &[0, 1]).expect("modes 0, 1")
                + &FockState::from_creations(MODES, &[2, 3]).expect("modes 2, 3")
        }
    };
    state.normalized().expect("nonzero")
}

/// First sign change of `raw` (positive meaning above rounding noise),
/// linearly interpolated.
pub fn threshold(grid: &[f64], raw: &[f64]) -> Option<f64> {
    const NOISE: f64 = 1e-12;
    (1..grid.len()).find_map(|k| {
        (raw[k - 1] <= NOISE && raw[k] > NOISE)
            .then(|| grid[k - 1] + (grid[k] - grid[k - 1]) * (-raw[k - 1]) / (raw[k] - raw[k - 1]))
    })
}

// ---------------------------------------------------------------------------
// sweep-werner

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mixture {
    /// `p |psi><psi| + (1 - p) I/8` over the parity sector.
    Werner,
    /// `p |psi><psi| + (1 - p) I/6` over the two-fermion states.
    TwoFermion,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub concurrence: f64,
    pub entanglement: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub mixture: Mixture,
    pub pure_concurrence: f64,
    pub rows: Vec<SweepRow>,
    pub threshold: Option<f64>,
}

pub fn sweep_werner(
    psi: &FockState,
    mixture: Mixture,
    grid: &[f64],
    oracle: Option<&SearchBudget>,
) -> Result<Sweep, Failure> {
    let pure = concurrence_of(psi)?;
    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for &p in grid {
        let rho = match mixture {
            Mixture::Werner => werner_mixture(psi, p)?,
            Mixture::TwoFermion => two_fermion_mixture(psi, p)?,
        };
        let r = mixed_concurrence(&rho)?;
        let found = match oracle {
            Some(b) => Some(convex_roof_search(&rho, b, Execution::Parallel)?.value),
            None => None,
        };
        raw.push(r.raw);
        rows.push(SweepRow {
            p,
            concurrence: r.concurrence,
            entanglement: entropy_from_concurrence(r.concurrence),
            oracle: found,
        });
    }
    Ok(Sweep { mixture, pure_concurrence: pure, rows, threshold: threshold(grid, &raw) })
}

pub fn render_sweep(s: &Sweep) -> String {
    let mut out = String::new();
    let with_oracle = s.rows.iter().any(|r| r.oracle.is_some());
    let _ = write!(out, "{:<20} {:<20} {:<20}", "p", "C", "E_qsp");
    if with_oracle {
        let _ = write!(out, " {:<20}", "C_oracle");
    }
    out.push('\n');
    for r in &s.rows {
        let _ = write!(out, "{:<20} {:<20} {:<20}", fmt_num(r.p), fmt_num(r.concurrence), fmt_num(r.entanglement));
        if let Some(o) = r.oracle {
            let _ = write!(out, " {:<20}", fmt_num(o));
        }
        out.push('\n');
    }
    match s.threshold {
        Some(t) => {
            let _ = writeln!(out, "threshold p = {}", fmt_num(t));
        }
        None => out.push_str("threshold: no sign change on the grid\n"),
    }
    out
}

// ---------------------------------------------------------------------------
// verify

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Corpus,
    Werner,
    Degeneracy,
    Majorization,
    Thouless,
    Decomposition,
    Dual,
    Invariance,
    Oracle,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub property: String,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    /// `tolerance - worst`; negative on failure.
    pub margin: f64,
    pub pass: bool,
}

fn result(suite: &str, property: &str, cases: usize, worst: f64, tolerance: f64) -> SuiteResult {
    SuiteResult {
        suite: suite.into(),
        property: property.into(),
        cases,
        worst,
        tolerance,
        margin: tolerance - worst,
        pass: worst <= tolerance,
    }
}

fn parity_of(i: usize) -> Parity {
    if i.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Random single-sector four-mode mixture of `rank` states.
fn random_mixture(seed: u64, i: usize, rank: usize) -> Result<MixedState, Failure> {
    let mut rng = seeded(seed, i as u64);
    let parity = parity_of(i);
    let mut parts: Vec<(f64, FockState)> = Vec::new();
    for k in 0..rank {
        let state =
            if k == 0 && !i.is_multiple_of(3) { max_entangled(parity) } else { random_state(MODES, parity, &mut rng) };
        parts.push((1.0 / (k as f64 + 1.0), state));
    }
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
    Ok(MixedState::mixture(MODES, &parts)?)
}

fn corpus_suite() -> Result<Vec<SuiteResult>, Failure> {
    let opts = AnalyzeOptions { split: false, oracle: None, decomposition: true };
    let mut out = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let r = analyze(&Loaded::Pure(max_entangled(parity)), &opts)?;
        let c = r.quartet.as_ref().map_or(0.0, |q| q.concurrence);
        out.push(result(
            "corpus",
            &format!("maximally entangled {parity:?}: C = 1, S_qsp = 4"),
            1,
            (c - 1.0).abs().max((r.s_qsp - 4.0).abs()),
            1e-9,
        ));
        out.push(result(
            "corpus",
            &format!("maximally entangled {parity:?}: identities"),
            r.checks.len(),
            max_of(r.checks.iter().map(|c| c.residual)),
            1e-9,
        ));
    }
    let slater = analyze(&Loaded::Pure(FockState::from_creations(MODES, &[0, 2])?), &opts)?;
    out.push(result(
        "corpus",
        "Slater determinant: entropies vanish",
        1,
        slater.s_c.max(slater.s_sp).max(slater.s_qsp).abs(),
        1e-12,
    ));
    let rho = werner_mixture(&max_entangled(Parity::Odd), 0.5)?;
    let w = analyze(&Loaded::Mixed(rho), &opts)?;
    let c = w.quartet.as_ref().map_or(f64::NAN, |q| q.concurrence);
    out.push(result("corpus", "Werner p = 0.5: C = 0.125", 1, (c - 0.125).abs(), 1e-9));
    Ok(out)
}

fn werner_suite() -> Result<Vec<SuiteResult>, Failure> {
    let grid = parse_grid("0:1:0.1")?;
    let mut out = Vec::new();
    for (mixture, parity, exact, t) in [
        (Mixture::Werner, Parity::Odd, (|p: f64| (7.0 * p - 3.0) / 4.0) as fn(f64) -> f64, 3.0 / 7.0),
        (Mixture::TwoFermion, Parity::Even, (|p: f64| (5.0 * p - 2.0) / 3.0) as fn(f64) -> f64, 2.0 / 5.0),
    ] {
        let s = sweep_werner(&max_entangled(parity), mixture, &grid, None)?;
        let worst = max_of(s.rows.iter().map(|r| (r.concurrence - exact(r.p).max(0.0)).abs()));
        let name = format!("{mixture:?}");
        out.push(result("werner", &format!("{name}: closed-form curve"), grid.len(), worst, 1e-9));
        let dt = s.threshold.map_or(f64::INFINITY, |x| (x - t).abs());
        out.push(result("werner", &format!("{name}: threshold"), 1, dt, 1e-9));
    }
    Ok(out)
}

fn degeneracy_suite() -> Result<Vec<SuiteResult>, Failure> {
    let errs = map_indices(Execution::Parallel, 500, |i| -> Result<(f64, f64), Failure> {
        let psi = random_state(MODES, parity_of(i), &mut seeded(3, i as u64));
        let c = concurrence_of(&psi)?;
        let fp = (1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0;
        let mut expected = vec![fp; 4];
        expected.extend([1.0 - fp; 4]);
        let spectrum = max_sorted_difference(&qsp_matrix(&psi)?.eigenvalues(), &expected);
        Ok((spectrum, (entropy_qsp(&psi)? - 4.0 * binary_entropy(fp)).abs()))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        result("degeneracy", "qsp spectrum {f+ x4, f- x4}", 500, max_of(errs.iter().map(|e| e.0)), 1e-9),
        result("degeneracy", "S_qsp = 4h(f+)", 500, max_of(errs.iter().map(|e| e.1)), 1e-9),
    ])
}

fn majorization_suite() -> Result<Vec<SuiteResult>, Failure> {
    let slack = map_indices(Execution::Parallel, 1000, |i| -> Result<(f64, f64), Failure> {
        let n = 2 + i % 3;
        let psi = random_state(n, parity_of(i / 3), &mut seeded(5, i as u64));
        let (sc, sp, qsp) = (entropy_sc(&psi, None)?, entropy_sp(&psi)?, entropy_qsp(&psi)?);
        Ok(((sc - sp).min(sp - qsp), majorization_chain(&qsp_matrix(&psi)?).min_slack))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        result("majorization", "S_c >= S_sp >= S_qsp", 1000, max_of(slack.iter().map(|s| -s.0)), 1e-9),
        result("majorization", "diag < sp < qsp", 1000, max_of(slack.iter().map(|s| -s.1)), 1e-9),
    ])
}

fn thouless_suite() -> Result<Vec<SuiteResult>, Failure> {
    let mut rng = seeded(6, 0);
    let mut worst = [0.0f64; 3];
    let mut count = 0;
    while count < 100 {
        let map = BogoliubovMap::random(2 + count % 4, &mut rng);
        if map.determinant_u() <= 0.1 {
            continue;
        }
        count += 1;
        let psi = thouless_vacuum(&map)?;
        let vv = map.v() * map.v().adjoint();
        worst[0] = worst[0].max(annihilation_residual(&map, &psi));
        worst[1] = worst[1].max(entropy_qsp(&psi)?);
        worst[2] = worst[2].max(frobenius(&(sp_matrix(&psi)?.matrix() - vv)));
    }
    Ok(vec![
        result("thouless", "annihilated by every a_nu", 100, worst[0], 1e-9),
        result("thouless", "S_qsp = 0", 100, worst[1], 1e-9),
        result("thouless", "rho_sp = V V^dagger", 100, worst[2], 1e-9),
    ])
}

fn decomposition_suite() -> Result<Vec<SuiteResult>, Failure> {
    let rows = map_indices(Execution::Parallel, 40, |i| -> Result<(bool, f64, f64), Failure> {
        let rho = random_mixture(7, i, 2 + i % 7)?;
        let report = mixed_concurrence(&rho)?;
        let dec = optimal_decomposition(&rho)?;
        let spread = max_of(dec.components.iter().map(|(_, q)| (pure_concurrence(q) - report.concurrence).abs()));
        Ok((report.separable, spread, frobenius(&(dec.reconstruct()? - rho.matrix()))))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let ent: Vec<_> = rows.iter().filter(|r| !r.0).collect();
    let sep: Vec<_> = rows.iter().filter(|r| r.0).collect();
    Ok(vec![
        result("decomposition", "entangled components have C(rho)", ent.len(), max_of(ent.iter().map(|r| r.1)), 1e-6),
        result("decomposition", "separable components have C = 0", sep.len(), max_of(sep.iter().map(|r| r.1)), 1e-6),
        result("decomposition", "reconstruction", rows.len(), max_of(rows.iter().map(|r| r.2)), 1e-8),
    ])
}

fn dual_suite() -> Result<Vec<SuiteResult>, Failure> {
    let dual = map_indices(Execution::Parallel, 500, |i| -> Result<f64, Failure> {
        let psi = random_state(MODES, parity_of(i), &mut seeded(8, i as u64));
        let q = QuartetState::from_fock(&psi)?;
        Ok((dual_state(&psi)?.inner(&psi).norm() - 2.0 * q.overlap().norm()).abs())
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let routes = map_indices(Execution::Parallel, 100, |i| -> Result<f64, Failure> {
        let (a, b) = d_values_both_routes(&random_mixture(80, i, 1 + i % 8)?)?;
        Ok(max_sorted_difference(&a, &b))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        result("dual", "|<dual|psi>| = 2|beta^dagger alpha|", 500, max_of(dual), 1e-10),
        result("dual", "d_k routes agree", 100, max_of(routes), 1e-8),
    ])
}

fn invariance_suite() -> Result<Vec<SuiteResult>, Failure> {
    let drift = map_indices(Execution::Parallel, 100, |i| -> Result<(f64, f64), Failure> {
        let mut rng = seeded(9, i as u64);
        let psi = random_state(MODES, parity_of(i), &mut rng);
        let map = BogoliubovMap::random(MODES, &mut rng);
        let moved = apply_map(&psi, &map)?;
        let dc = (concurrence_of(&moved)? - concurrence_of(&psi)?).abs();
        let ds = (entropy_qsp(&moved)? - entropy_qsp(&psi)?).abs();
        let subset: Vec<usize> = (0..MODES).filter(|j| (i >> j) & 1 == 1).collect();
        let flipped = fermi_ent::bogoliubov::particle_hole(&psi, &subset)?;
        let dp = max_sorted_difference(&qsp_matrix(&psi)?.eigenvalues(), &qsp_matrix(&flipped)?.eigenvalues());
        Ok((dc.max(ds), dp))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        result("invariance", "C and S_qsp under Bogoliubov maps", 100, max_of(drift.iter().map(|d| d.0)), 1e-8),
        result("invariance", "particle-hole qsp spectrum", 100, max_of(drift.iter().map(|d| d.1)), 1e-10),
    ])
}

fn oracle_suite(budget: &SearchBudget) -> Result<Vec<SuiteResult>, Failure> {
    let mut above = 0.0f64;
    let mut below = 0.0f64;
    for i in 0..10 {
        let psi = random_state(MODES, parity_of(i), &mut seeded(4, i as u64));
        let b = SearchBudget { seed: budget.seed.wrapping_add(i as u64), ..*budget };
        let gap = min_entropy_over_qsp_bases(&psi, &b, Execution::Parallel)?.value - entropy_qsp(&psi)?;
        above = above.max(gap);
        below = below.max(-gap);
    }
    let mut roof_above = 0.0f64;
    let mut roof_below = 0.0f64;
    for i in 0..5 {
        let rho = random_mixture(40, i, 2 + i % 3)?;
        let b = SearchBudget { seed: budget.seed.wrapping_add(100 + i as u64), ..*budget };
        let gap = convex_roof_search(&rho, &b, Execution::Parallel)?.value - mixed_concurrence(&rho)?.concurrence;
        roof_above = roof_above.max(gap);
        roof_below = roof_below.max(-gap);
    }
    Ok(vec![
        result("oracle", "qsp search above S_qsp by at most", 10, above, 1e-3),
        result("oracle", "qsp search never below S_qsp", 10, below, 1e-9),
        result("oracle", "roof search above C by at most", 5, roof_above, 1e-3),
        result("oracle", "roof search never below C", 5, roof_below, 1e-8),
    ])
}

pub fn verify(suite: Suite, budget: &SearchBudget, input: Option<&Path>) -> Result<Vec<SuiteResult>, Failure> {
    let mut out = Vec::new();
    if let Some(path) = input {
        let loaded = StateFile::read(path)?.load()?;
        let opts = AnalyzeOptions { split: true, oracle: None, decomposition: loaded.n() == MODES };
        let r = analyze(&loaded, &opts)?;
        for c in &r.checks {
            out.push(result("input", &c.name, 1, c.residual, c.tolerance));
        }
    }
    let wants = |s: Suite| suite == Suite::All || suite == s;
    type Runner = fn() -> Result<Vec<SuiteResult>, Failure>;
    let runners: [(Suite, Runner); 8] = [
        (Suite::Corpus, corpus_suite),
        (Suite::Werner, werner_suite),
        (Suite::Degeneracy, degeneracy_suite),
        (Suite::Majorization, majorization_suite),
        (Suite::Thouless, thouless_suite),
        (Suite::Decomposition, decomposition_suite),
        (Suite::Dual, dual_suite),
        (Suite::Invariance, invariance_suite),
    ];
    for (s, run) in runners {
        if wants(s) {
            out.extend(run()?);
        }
    }
    if wants(Suite::Oracle) {
        out.extend(oracle_suite(budget)?);
    }
    Ok(out)
}

pub fn render_verify(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(
            out,
            "{} {:<14} {:<44} cases {:<5} worst {} tolerance {} margin {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.property,
            r.cases,
            fmt_num(r.worst),
            fmt_num(r.tolerance),
            fmt_num(r.margin)
        );
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} properties, {failed} failed", results.len());
    out
}

// ---------------------------------------------------------------------------
// thouless

/// Read a complex matrix stored as a JSON list of rows of `[re, im]` pairs.
pub fn read_matrix(path: &Path) -> Result<CMatrix, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<(f64, f64)>> = serde_json::from_str(&text).map_err(|e| {
        Failure::schema(format!("{}: matrix must be a list of rows of [re, im] pairs: {e}", path.display()))
    })?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Failure::schema(format!("{}: matrix rows must be nonempty and equally long", path.display())));
    }
    let values: Vec<C64> = rows.into_iter().flatten().map(|(re, im)| C64::new(re, im)).collect();
    Ok(CMatrix::from_row_slice(nrows, ncols, &values))
}

pub struct ThoulessOutput {
    pub file: StateFile,
    pub state: FockState,
    pub sp_defect: f64,
}

pub fn thouless(u: CMatrix, v: CMatrix) -> Result<ThoulessOutput, Failure> {
    let map = BogoliubovMap::new(u, v)?;
    let state = thouless_vacuum(&map)?;
    let vv = map.v() * map.v().adjoint();
    let sp_defect = frobenius(&(sp_matrix(&state)?.matrix() - vv));
    Ok(ThoulessOutput { file: StateFile::from_pure(&state), state, sp_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("0:1").unwrap_err().code, 2);
        assert_eq!(parse_grid("0:1:0").unwrap_err().code, 2);
    }

    #[test]
    fn sweeps_find_thresholds() {
        let grid = parse_grid("0:1:0.1").unwrap();
        let w = sweep_werner(&max_entangled(Parity::Odd), Mixture::Werner, &grid, None).unwrap();
        assert!((w.threshold.unwrap() - 3.0 / 7.0).abs() < 1e-9);
        let t = sweep_werner(&max_entangled(Parity::Even), Mixture::TwoFermion, &grid, None).unwrap();
        assert!((t.threshold.unwrap() - 0.4).abs() < 1e-9);
        let slater = FockState::from_creations(MODES, &[0]).unwrap();
        let s = sweep_werner(&slater, Mixture::Werner, &grid, None).unwrap();
        assert!(s.rows.iter().all(|r| r.concurrence == 0.0));
        assert!(s.threshold.is_none());
    }

    #[test]
    fn quick_suites_pass() {
        let budget = SearchBudget::default();
        for suite in [Suite::Corpus, Suite::Werner, Suite::Thouless] {
            assert!(verify(suite, &budget, None).unwrap().iter().all(|r| r.pass));
        }
    }

    #[test]
    fn thouless_trivial_vacuum() {
        let out = thouless(CMatrix::identity(3, 3), CMatrix::zeros(3, 3)).unwrap();
        assert!((out.state.amplitude(0).norm() - 1.0).abs() < 1e-12);
        assert!(out.sp_defect < 1e-12);
    }
}
