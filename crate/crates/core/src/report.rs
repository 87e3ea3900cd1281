//! Batch runs over scenario files and their tabular output.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greeks::{finite_difference_greeks, greeks_lognormal, GreekTriple};
use crate::calibrate_lognormal::calibrate_lognormal;
use crate::metrics::{c1_c2, CaseResult};
use crate::moments::basket_moments_lognormal;
use crate::montecarlo::{mc_prices, McConfig, McResult};
use crate::pricing::price_basket;
use crate::scenario::{Model, ScenarioFile};

pub const DEFAULT_PATHS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
const MAX_STREAMS: u32 = 64;

/// Which pricers to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Closed,
    Mc,
    Both,
}

impl Method {
    fn closed(self) -> bool {
        matches!(self, Method::Closed | Method::Both)
    }

    fn mc(self) -> bool {
        matches!(self, Method::Mc | Method::Both)
    }
}

/// Run-wide overrides; `None` falls back to the scenario block, then the defaults.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub method: Method,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
}

/// One (scenario, law, strike) line.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: String,
    pub group: String,
    pub law: String,
    pub strike: f64,
    pub closed: Option<f64>,
    pub mc: Option<McResult>,
    pub warnings: Vec<String>,
}

impl Row {
    /// `100 |closed - mc| / |mc|` when both prices exist.
    pub fn abs_pct_err(&self) -> Option<f64> {
        match (self.closed, self.mc) {
            (Some(v), Some(m)) if m.mean != 0.0 => Some(100.0 * (v - m.mean).abs() / m.mean.abs()),
            _ => None,
        }
    }
}

/// C1/C2 for one (group, law) collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Footer {
    pub group: String,
    pub law: String,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
    pub footers: Vec<Footer>,
}

/// Largest stream count not above 64 that divides `paths`.
pub fn streams_for(paths: u64) -> u32 {
    (1..=MAX_STREAMS)
        .rev()
        .find(|s| paths.is_multiple_of(u64::from(*s)))
        .unwrap_or(1)
}

/// Prices every (scenario, law, strike) in the file.
pub fn run_scenarios(file: &ScenarioFile, opts: &RunOptions) -> Result<Report> {
    let mut jobs = Vec::new();
    for s in &file.scenarios {
        for model in s.models()? {
            jobs.push((s, model));
        }
    }
    let blocks: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|(s, model)| -> Result<Vec<Row>> {
            let label = format!("scenario `{}`, law `{}`", s.name, model.label());
            let spec = s.basket().map_err(|e| e.context(label.clone()))?;
            let strikes = s.strikes()?;
            let mc = if opts.method.mc() {
                let paths = opts.paths.or(s.paths).unwrap_or(DEFAULT_PATHS);
                let seed = opts.seed.or(s.seed).unwrap_or(DEFAULT_SEED);
                let cfg = McConfig::new(paths, seed).with_streams(streams_for(paths));
                Some(mc_prices(&spec, model.law(), &strikes, &cfg).map_err(|e| e.context(label.clone()))?)
            } else {
                None
            };
            strikes
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let (closed, warnings) = if opts.method.closed() {
                        let r = price_basket(&spec.with_strike(k), model.law())
                            .map_err(|e| e.context(format!("{label}, strike {k}")))?;
                        (Some(r.price), r.warnings)
                    } else {
                        (None, Vec::new())
                    };
                    Ok(Row {
                        scenario: s.name.clone(),
                        group: s.group_name().to_string(),
                        law: model.label().to_string(),
                        strike: k,
                        closed,
                        mc: mc.as_ref().map(|m| m[i]),
                        warnings,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Row> = blocks.into_iter().flatten().collect();
    let footers = if opts.method == Method::Both {
        footers(&rows)?
    } else {
        Vec::new()
    };
    Ok(Report { rows, footers })
}

fn footers(rows: &[Row]) -> Result<Vec<Footer>> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.group.clone(), r.law.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(group, law)| {
            let cases: Vec<CaseResult> = rows
                .iter()
                .filter(|r| r.group == group && r.law == law)
                .filter_map(|r| {
                    Some(CaseResult::new(
                        r.closed?,
                        r.mc?.mean,
                        format!("{} K={}", r.scenario, r.strike),
                    ))
                })
                .collect();
            let (c1, c2) = c1_c2(&cases).map_err(|e| e.context(format!("group `{group}`, law `{law}`")))?;
            Ok(Footer { group, law, c1, c2 })
        })
        .collect()
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

const HEADER: [&str; 7] = [
    "scenario",
    "law",
    "strike",
    "closed_price",
    "mc_mean",
    "mc_se",
    "abs_pct_err",
];

fn row_cells(r: &Row) -> [String; 7] {
    [
        r.scenario.clone(),
        r.law.clone(),
        format!("{:.6}", r.strike),
        opt(r.closed, 6),
        opt(r.mc.map(|m| m.mean), 6),
        opt(r.mc.map(|m| m.std_error), 4),
        opt(r.abs_pct_err(), 2),
    ]
}

fn footer_cells(f: &Footer) -> [[String; 7]; 2] {
    let line = |tag: &str, v: f64| {
        [
            format!("{tag}:{}", f.group),
            f.law.clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("{v:.2}"),
        ]
    };
    [line("C1", f.c1), line("C2", f.c2)]
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table_lines(report: &Report) -> Vec<[String; 7]> {
    let mut lines: Vec<[String; 7]> = report.rows.iter().map(row_cells).collect();
    for f in &report.footers {
        lines.extend(footer_cells(f));
    }
    lines
}

pub fn render_csv(report: &Report) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for cells in table_lines(report) {
        let fields: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn markdown_table(header: &[&str], lines: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for l in lines {
        out.push_str(&format!("| {} |\n", l.join(" | ")));
    }
    out
}

pub fn render_markdown(report: &Report) -> String {
    let lines: Vec<Vec<String>> = table_lines(report).into_iter().map(Vec::from).collect();
    markdown_table(&HEADER, &lines)
}

/// Per-row distance between closed form and simulation in standard errors,
/// and the C1/C2 footers, as plain text.
pub fn tolerance_report(report: &Report) -> String {
    let mut out = String::from("tolerance report\n");
    for r in &report.rows {
        let (Some(v), Some(m)) = (r.closed, r.mc) else {
            continue;
        };
        let z = if m.std_error > 0.0 {
            (v - m.mean).abs() / m.std_error
        } else {
            f64::INFINITY
        };
        let pct = r.abs_pct_err().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "  {} {} K={:.4}: |closed-mc| = {:.2} SE, {:.2}% {}",
            r.scenario,
            r.law,
            r.strike,
            z,
            pct,
            if pct < 2.0 { "good" } else { "outside 2%" }
        );
    }
    for f in &report.footers {
        let _ = writeln!(out, "  {} {}: C1 = {:.2}%, C2 = {:.2}%", f.group, f.law, f.c1, f.c2);
    }
    for r in &report.rows {
        for w in &r.warnings {
            let _ = writeln!(out, "  warning ({} {} K={}): {w}", r.scenario, r.law, r.strike);
        }
    }
    out
}

/// Analytic Greeks of one (scenario, strike), with optional finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GreekRow {
    pub scenario: String,
    pub strike: f64,
    pub price: f64,
    pub greeks: GreekTriple,
    /// Central differences of `(mu, sigma, eta)` and the largest relative gap.
    pub fd: Option<([f64; 3], f64)>,
}

/// Relative bump used by `--fd-check`.
pub const FD_BUMP: f64 = 1e-5;

/// Greeks for every strike of every scenario; mixture laws are rejected.
pub fn greeks_table(file: &ScenarioFile, fd_check: bool) -> Result<Vec<GreekRow>> {
    let mut rows = Vec::new();
    for s in &file.scenarios {
        if let Some(m) = s.models()?.iter().find(|m| !matches!(m, Model::Lognormal)) {
            return Err(Error::InvalidConfig(format!(
                "scenario `{}` requests law `{}`: Greeks are available for the log-normal model only",
                s.name,
                m.label()
            )));
        }
        let spec = s.basket()?;
        let ms = basket_moments_lognormal(&spec)?;
        let p = calibrate_lognormal(&ms).map_err(|e| e.context(format!("scenario `{}`", s.name)))?;
        for k in s.strikes()? {
            let ctx = |e: Error| e.context(format!("scenario `{}`, strike {k}", s.name));
            let g = greeks_lognormal(&p, &ms, k, spec.rate, spec.horizon).map_err(ctx)?;
            let price = price_basket(&spec.with_strike(k), None).map_err(ctx)?.price;
            let fd = if fd_check {
                let f = finite_difference_greeks(&ms, k, spec.rate, spec.horizon, FD_BUMP)
                    .map_err(ctx)?;
                let analytic = [g.dp_dmu, g.dp_dsigma, g.dp_deta];
                let worst = analytic
                    .iter()
                    .zip(&f)
                    .map(|(a, b)| relative_gap(*a, *b))
                    .fold(0.0, f64::max);
                Some((f, worst))
            } else {
                None
            };
            rows.push(GreekRow {
                scenario: s.name.clone(),
                strike: k,
                price,
                greeks: g,
                fd,
            });
        }
    }
    Ok(rows)
}

/// `|a - b| / |b|`, or the absolute gap when `b == 0`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn greek_header(fd: bool) -> Vec<&'static str> {
    let mut h = vec![
        "scenario", "strike", "case", "price", "dp_dmu", "dp_dsigma", "dp_deta", "dx_deta",
    ];
    if fd {
        h.extend(["fd_dmu", "fd_dsigma", "fd_deta", "fd_max_rel_err"]);
    }
    h
}

fn greek_cells(r: &GreekRow) -> Vec<String> {
    let g = &r.greeks;
    let mut c = vec![
        r.scenario.clone(),
        format!("{:.6}", r.strike),
        g.case.label().to_string(),
        format!("{:.6}", r.price),
        format!("{:.8}", g.dp_dmu),
        format!("{:.8}", g.dp_dsigma),
        format!("{:.8}", g.dp_deta),
        format!("{:.8}", g.dx_deta),
    ];
    if let Some((f, worst)) = r.fd {
        c.extend(f.iter().map(|v| format!("{v:.8}")));
        c.push(format!("{worst:.2e}"));
    }
    c
}

pub fn render_greeks_csv(rows: &[GreekRow]) -> String {
    let fd = rows.iter().any(|r| r.fd.is_some());
    let mut out = greek_header(fd).join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = greek_cells(r).iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn render_greeks_markdown(rows: &[GreekRow]) -> String {
    let fd = rows.iter().any(|r| r.fd.is_some());
    let lines: Vec<Vec<String>> = rows.iter().map(greek_cells).collect();
    markdown_table(&greek_header(fd), &lines)
}
