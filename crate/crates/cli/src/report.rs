//! Analysis reports and their text / JSON rendering.

use std::fmt::Write as _;

use fermi_ent::densities::{entropy_of_occupations, majorization_chain, qsp_matrix, qsp_matrix_mixed, QspMatrix};
use fermi_ent::oracle::{convex_roof_search, min_entropy_over_qsp_bases, SearchBudget};
use fermi_ent::par::Execution;
use fermi_ent::quartet::{
    concurrence_of, entropy_from_concurrence, mixed_concurrence, normal_form, occupations_from_concurrence,
    parity_split, DecompositionRoute, QuartetState, MODES,
};
use fermi_ent::{FockState, MixedState, Parity};
use serde::Serialize;
use serde_json::Value;

use crate::failure::Failure;
use crate::statefile::{Kind, Loaded, ParityTag};

/// Significant digits of every printed number.
pub const DIGITS: usize = 12;
const IDENTITY_TOL: f64 = 1e-9;

/// Round to [`DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 || (1e-5..1e12).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// JSON with every float rounded to [`DIGITS`] significant digits.
pub fn to_structured<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("reports always serialize");
    round_json(&mut v);
    serde_json::to_string_pretty(&v).expect("reports always serialize")
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub ok: bool,
}

fn check(name: &str, residual: f64, tolerance: f64) -> Check {
    Check { name: name.into(), residual, tolerance, ok: residual <= tolerance }
}

#[derive(Clone, Debug, Serialize)]
pub struct Majorization {
    pub holds: bool,
    pub min_slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormReport {
    pub alpha: f64,
    pub beta: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub weight: f64,
    pub concurrence: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub route: String,
    pub components: Vec<Component>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuartetReport {
    pub concurrence: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    /// `4 h(f_+)`; the entanglement of formation for mixed states.
    pub entanglement: f64,
    pub d: Vec<f64>,
    pub separable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<NormalFormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub parity: ParityTag,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quartet: Option<QuartetReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub analytic: f64,
    pub oracle: f64,
    pub gap: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub n: usize,
    pub kind: Kind,
    pub parity: ParityTag,
    pub occupations: Vec<f64>,
    pub s_c: f64,
    pub s_sp: f64,
    pub s_qsp: f64,
    pub s_2: f64,
    pub f_spectrum: Vec<f64>,
    pub majorization: Majorization,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quartet: Option<QuartetReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sectors: Vec<SectorReport>,
    /// Parity-weighted entanglement of formation when the state was split.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_entanglement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub split: bool,
    pub oracle: Option<SearchBudget>,
    pub decomposition: bool,
}

impl Report {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn density_part(kind: Kind, parity: Parity, q: &QspMatrix) -> Report {
    let sp = q.sp_block();
    let occupations: Vec<f64> = (0..q.n()).map(|j| sp[(j, j)].re.clamp(0.0, 1.0)).collect();
    let s_sp = fermi_ent::densities::SpMatrix::new(sp).map(|m| m.entropy()).unwrap_or(f64::NAN);
    let maj = majorization_chain(q);
    let s_c = entropy_of_occupations(&occupations);
    let s_qsp = q.entropy();
    let s_2 = q.quadratic_entropy();
    let checks = vec![
        check("S_c >= S_sp", (s_sp - s_c).max(0.0), IDENTITY_TOL),
        check("S_sp >= S_qsp", (s_qsp - s_sp).max(0.0), IDENTITY_TOL),
        check("S_2 trace = spectral", (s_2 - q.quadratic_entropy_spectral()).abs(), IDENTITY_TOL),
        check("majorization chain", (-maj.min_slack).max(0.0), IDENTITY_TOL),
    ];
    Report {
        n: q.n(),
        kind,
        parity: parity.into(),
        occupations,
        s_c,
        s_sp,
        s_qsp,
        s_2,
        f_spectrum: q.paired_occupations(),
        majorization: Majorization { holds: maj.holds, min_slack: maj.min_slack },
        quartet: None,
        sectors: Vec::new(),
        split_entanglement: None,
        oracle: None,
        checks,
    }
}

fn quartet_from_concurrence(c: f64, d: Vec<f64>, separable: bool) -> QuartetReport {
    let (f_plus, f_minus) = occupations_from_concurrence(c);
    QuartetReport {
        concurrence: c,
        f_plus,
        f_minus,
        entanglement: entropy_from_concurrence(c),
        d,
        separable,
        normal_form: None,
        decomposition: None,
    }
}

fn pure_quartet(state: &FockState) -> Result<QuartetReport, Failure> {
    let c = concurrence_of(state)?;
    let mixed = mixed_concurrence(&MixedState::pure(state)?)?;
    let nf = normal_form(&QuartetState::from_fock(state)?)?;
    let mut q = quartet_from_concurrence(c, mixed.d, c <= 1e-12);
    q.normal_form = Some(NormalFormReport { alpha: nf.alpha, beta: [nf.beta.re, nf.beta.im] });
    Ok(q)
}

fn route_name(route: DecompositionRoute) -> String {
    format!("{route:?}").to_lowercase()
}

fn mixed_quartet(rho: &MixedState, decomposition: bool) -> Result<QuartetReport, Failure> {
    let report = mixed_concurrence(rho)?;
    let mut q = quartet_from_concurrence(report.concurrence, report.d.clone(), report.separable);
    if decomposition {
        let dec = fermi_ent::quartet::optimal_decomposition(rho)?;
        q.decomposition = Some(DecompositionReport {
            route: route_name(dec.route),
            components: dec
                .components
                .iter()
                .map(|(w, s)| Component { weight: *w, concurrence: fermi_ent::quartet::pure_concurrence(s) })
                .collect(),
        });
    }
    Ok(q)
}

fn exec() -> Execution {
    Execution::Parallel
}

pub fn analyze(state: &Loaded, opts: &AnalyzeOptions) -> Result<Report, Failure> {
    match state {
        Loaded::Pure(psi) => analyze_pure(psi, opts),
        Loaded::Mixed(rho) => analyze_mixed(rho, opts),
    }
}

fn analyze_pure(psi: &FockState, opts: &AnalyzeOptions) -> Result<Report, Failure> {
    let parity = psi.definite_parity()?;
    let mut report = density_part(Kind::Pure, parity, &qsp_matrix(psi)?);
    if psi.n() == MODES {
        let q = pure_quartet(psi)?;
        report.checks.push(check("S_qsp = 4h(f+)", (report.s_qsp - q.entanglement).abs(), IDENTITY_TOL));
        report.checks.push(check("S_2 = 4C^2", (report.s_2 - 4.0 * q.concurrence.powi(2)).abs(), IDENTITY_TOL));
        report.quartet = Some(q);
    }
    if let Some(budget) = &opts.oracle {
        let found = min_entropy_over_qsp_bases(psi, budget, exec())?.value;
        report.oracle = Some(oracle_report("S_qsp", report.s_qsp, found, budget));
    }
    Ok(report)
}

fn oracle_report(quantity: &str, analytic: f64, oracle: f64, budget: &SearchBudget) -> OracleReport {
    OracleReport {
        quantity: quantity.into(),
        analytic,
        oracle,
        gap: oracle - analytic,
        samples: budget.samples,
        seed: budget.seed,
    }
}

fn analyze_mixed(rho: &MixedState, opts: &AnalyzeOptions) -> Result<Report, Failure> {
    rho.ensure_parity_commuting()?;
    let parity = rho.sector();
    if parity == Parity::Mixed && !opts.split {
        return Err(fermi_ent::Error::BothSectors.into());
    }
    let mut report = density_part(Kind::Mixed, parity, &qsp_matrix_mixed(rho)?);
    if parity != Parity::Mixed {
        if rho.n() == MODES {
            let q = mixed_quartet(rho, opts.decomposition)?;
            if let Some(budget) = &opts.oracle {
                let found = convex_roof_search(rho, budget, exec())?.value;
                report.oracle = Some(oracle_report("C", q.concurrence, found, budget));
            }
            report.quartet = Some(q);
        }
        return Ok(report);
    }
    let split = parity_split(rho)?;
    let mut total = 0.0;
    for (tag, weight, part) in [(ParityTag::Even, split.p_even, &split.even), (ParityTag::Odd, split.p_odd, &split.odd)]
    {
        let quartet = match part {
            Some(sector) if rho.n() == MODES => {
                let q = mixed_quartet(sector, opts.decomposition)?;
                total += weight * q.entanglement;
                Some(q)
            }
            _ => None,
        };
        report.sectors.push(SectorReport { parity: tag, weight, quartet });
    }
    if rho.n() == MODES {
        report.split_entanglement = Some(total);
    }
    Ok(report)
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ")
}

fn quartet_lines(out: &mut String, prefix: &str, q: &QuartetReport) {
    let _ = writeln!(out, "{prefix}C                 {}", fmt_num(q.concurrence));
    let _ = writeln!(out, "{prefix}f+ / f-           {} {}", fmt_num(q.f_plus), fmt_num(q.f_minus));
    let _ = writeln!(out, "{prefix}E_qsp             {}", fmt_num(q.entanglement));
    let _ = writeln!(out, "{prefix}d_k               {}", list(&q.d));
    let _ = writeln!(out, "{prefix}separable         {}", q.separable);
    if let Some(nf) = &q.normal_form {
        let _ = writeln!(
            out,
            "{prefix}normal form       alpha {} beta {} {}",
            fmt_num(nf.alpha),
            fmt_num(nf.beta[0]),
            fmt_num(nf.beta[1])
        );
    }
    if let Some(dec) = &q.decomposition {
        let _ = writeln!(out, "{prefix}decomposition     {} ({} components)", dec.route, dec.components.len());
        for c in &dec.components {
            let _ = writeln!(out, "{prefix}  weight {} C {}", fmt_num(c.weight), fmt_num(c.concurrence));
        }
    }
}

pub fn render_table(r: &Report) -> String {
    let mut out = String::new();
    let kind = match r.kind {
        Kind::Pure => "pure",
        Kind::Mixed => "mixed",
    };
    let _ = writeln!(out, "state             n={} {kind} parity={}", r.n, r.parity);
    let _ = writeln!(out, "p_j               {}", list(&r.occupations));
    let _ = writeln!(out, "S_c               {}", fmt_num(r.s_c));
    let _ = writeln!(out, "S_sp              {}", fmt_num(r.s_sp));
    let _ = writeln!(out, "S_qsp             {}", fmt_num(r.s_qsp));
    let _ = writeln!(out, "S_2               {}", fmt_num(r.s_2));
    let _ = writeln!(out, "f spectrum        {}", list(&r.f_spectrum));
    let _ = writeln!(
        out,
        "majorization      {} (slack {})",
        if r.majorization.holds { "holds" } else { "violated" },
        fmt_num(r.majorization.min_slack)
    );
    if let Some(q) = &r.quartet {
        quartet_lines(&mut out, "", q);
    }
    for s in &r.sectors {
        let _ = writeln!(out, "sector {}       weight {}", s.parity, fmt_num(s.weight));
        if let Some(q) = &s.quartet {
            quartet_lines(&mut out, "  ", q);
        }
    }
    if let Some(e) = r.split_entanglement {
        let _ = writeln!(out, "E_qsp (split)     {}", fmt_num(e));
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(
            out,
            "oracle {}        {} (analytic {}, gap {}, {} samples, seed {})",
            o.quantity,
            fmt_num(o.oracle),
            fmt_num(o.analytic),
            fmt_num(o.gap),
            o.samples,
            o.seed
        );
    }
    for c in &r.checks {
        let _ = writeln!(
            out,
            "check {:<24} {} (residual {}, tolerance {})",
            c.name,
            if c.ok { "ok" } else { "FAILED" },
            fmt_num(c.residual),
            fmt_num(c.tolerance)
        );
    }
    out
}
