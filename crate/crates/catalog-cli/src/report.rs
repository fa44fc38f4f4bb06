//! Tables, their renderings and the golden diff against the manifest.

use std::fmt;
use std::str::FromStr;

use kodaira_core::{compute_h1, is_cct, mon, surface_invariants, SurfaceInvariantReport};
use serde::Serialize;

use crate::catalog::check_annotations;
use crate::workspace::{kernel_indices, Workspace};
use crate::Error;

pub const CCT_ORDERS: [usize; 6] = [36, 40, 48, 54, 56, 60];

/// Samples per group behind the `h1-table` rows.
pub const H1_TABLE_SAMPLES: usize = 64;
pub const H1_TABLE_SEED: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (md, csv, json)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    Cct(usize),
    Order64Structures,
    H1Table,
    InvariantsTable,
}

impl Table {
    pub fn all() -> Vec<Table> {
        let mut v: Vec<Table> = CCT_ORDERS.iter().map(|&o| Table::Cct(o)).collect();
        v.extend([Table::Order64Structures, Table::H1Table, Table::InvariantsTable]);
        v
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Table::Cct(o) => write!(f, "cct-{o}"),
            Table::Order64Structures => f.write_str("order64-structures"),
            Table::H1Table => f.write_str("h1-table"),
            Table::InvariantsTable => f.write_str("invariants-table"),
        }
    }
}

impl FromStr for Table {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Table::all()
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| {
                let names: Vec<String> = Table::all().iter().map(|t| t.to_string()).collect();
                format!("unknown table `{s}` (one of {})", names.join(", "))
            })
    }
}

/// A rendered-agnostic table plus golden mismatches.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub mismatches: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    /// Two-column key/value report.
    pub fn record(title: impl Into<String>, pairs: Vec<(&str, String)>) -> Self {
        let mut r = Report::new(title, &["field", "value"]);
        r.rows = pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
        r
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.markdown(),
            Format::Csv => self.csv(),
            Format::Json => serde_json::to_string_pretty(self).expect("serializable report") + "\n",
        }
    }

    fn markdown(&self) -> String {
        let mut s = format!("## {}\n\n", self.title);
        let line = |cells: &[String]| {
            let cells: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
            format!("| {} |\n", cells.join(" | "))
        };
        s += &line(&self.columns);
        s += &format!("|{}\n", "---|".repeat(self.columns.len()));
        for row in &self.rows {
            s += &line(row);
        }
        if !self.notes.is_empty() {
            s.push('\n');
            for n in &self.notes {
                s += &format!("- {n}\n");
            }
        }
        s.push('\n');
        if self.mismatches.is_empty() {
            s += "golden: ok\n";
        } else {
            s += &format!("golden: {} mismatch(es)\n", self.mismatches.len());
            for m in &self.mismatches {
                s += &format!("- {m}\n");
            }
        }
        s
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn run_report(ws: &Workspace, table: Table) -> Result<Report, Error> {
    match table {
        Table::Cct(order) => cct_report(ws, order),
        Table::Order64Structures => order64_report(ws),
        Table::H1Table => h1_report(ws),
        Table::InvariantsTable => invariants_report(ws),
    }
}

fn cct_report(ws: &Workspace, order: usize) -> Result<Report, Error> {
    let mut r = Report::new(
        format!("Non-abelian groups of order {order}: CCT verdicts"),
        &["group", "CCT", "monolithic", "evidence"],
    );
    let mut non_cct = Vec::new();
    for entry in ws.catalog.of_order(order) {
        let g = ws.group(&entry.label)?;
        let v = is_cct(&g);
        let m = mon(&g);
        let evidence = match (v.witness, &entry.annotations.abelian_normal_witness) {
            (Some((x, y, w)), _) => format!("[{x},{y}] = [{y},{w}] = 1, [{x},{w}] != 1"),
            (None, Some(n)) => format!("<{}> abelian normal of index {}", n.generators.join(", "), n.index),
            (None, None) => "every non-central centralizer abelian".to_string(),
        };
        if !v.is_cct {
            non_cct.push(entry.label.clone());
        }
        r.push(vec![entry.label.clone(), yes_no(v.is_cct), yes_no(m.is_monolithic), evidence]);
        r.mismatches.extend(check_annotations(entry, &g, false)?);
        if entry.annotations.cct.is_none() {
            r.mismatches.push(format!("{}: no golden CCT verdict", entry.label));
        }
    }
    r.notes.push(format!(
        "non-CCT: {{{}}}",
        non_cct.join(", ")
    ));
    Ok(r)
}

fn order64_report(ws: &Workspace) -> Result<Report, Error> {
    let mut r = Report::new(
        "Structures with b = 2 on groups of order 64",
        &["group", "monolithic", "structures", "|Aut|", "orbits", "(|K1|, |K2|)", "o(z)"],
    );
    for entry in ws.catalog.of_order(64) {
        let g = ws.group(&entry.label)?;
        let census = ws.census(&entry.label, 2, false)?;
        let aut = ws.aut_order(&entry.label)?;
        let orbits = ws.orbits(&census)?;
        let kernels: Vec<String> = census.kernel_orders.iter().map(|&(a, b, _)| format!("({a}, {b})")).collect();
        let z: Vec<String> = census.z_orders.iter().map(|&(n, _)| n.to_string()).collect();
        let monolithic = mon(&g).is_monolithic;
        r.push(vec![
            entry.label.clone(),
            yes_no(monolithic),
            census.count.to_string(),
            aut.to_string(),
            orbits.to_string(),
            kernels.join(" "),
            z.join(" "),
        ]);
        let a = &entry.annotations;
        let mut expect = |name: &str, found: String, expected: Option<String>| {
            if let Some(e) = expected {
                if e != found {
                    r.mismatches.push(format!("{}: {name} {found}, expected {e}", entry.label));
                }
            }
        };
        expect("monolithic", monolithic.to_string(), a.monolithic.map(|m| m.to_string()));
        expect("structures", census.count.to_string(), a.structures.map(|v| v.to_string()));
        expect("|Aut|", aut.to_string(), a.aut_order.map(|v| v.to_string()));
        expect("orbits", orbits.to_string(), a.orbits.map(|v| v.to_string()));
        expect("kernels", kernels.join(" "), a.kernel_orders.map(|(x, y)| format!("({x}, {y})")));
    }
    Ok(r)
}

const SURFACE_COLUMNS: [&str; 9] = ["q", "K^2", "c2", "sigma", "b1", "b2", "g1", "g2", "p_g"];

fn surface_cells(s: &SurfaceInvariantReport) -> Vec<String> {
    [s.q.unwrap_or_default(), s.c1_sq, s.c2, s.sigma, s.b1_base, s.b2_base, s.g1, s.g2, s.p_g.unwrap_or_default()]
        .iter()
        .map(|v| v.to_string())
        .collect()
}

fn h1_report(ws: &Workspace) -> Result<Report, Error> {
    let mut columns = vec!["group", "H1", "share"];
    columns.extend(SURFACE_COLUMNS);
    let mut r = Report::new("First homology of the surfaces from order-64 structures", &columns);
    for entry in ws.catalog.of_order(64) {
        let g = ws.group(&entry.label)?;
        let first = ws
            .first_structures(&g, 2, 1, false)?
            .pop()
            .ok_or_else(|| Error::Usage(format!("{} has no structures", entry.label)))?;
        let first_h1 = compute_h1(&g, &first, 2)?;
        let (m1, m2) = kernel_indices(&g, &first, 2)?;
        let n = g.element_order(first[8]) as u64;
        let scan = ws.h1_scan(&entry.label, 2, H1_TABLE_SAMPLES, H1_TABLE_SEED)?;
        let mut found: Vec<String> = scan.counts.keys().cloned().collect();
        if !found.contains(&first_h1.to_string()) {
            found.push(first_h1.to_string());
        }
        // golden order first, then anything unexpected
        let golden = &entry.annotations.h1;
        found.sort_by_key(|h| golden.iter().position(|x| x == h).unwrap_or(usize::MAX));
        for h in &found {
            let rank = h.strip_prefix("Z^").and_then(|s| s.split_whitespace().next()).and_then(|s| s.parse::<u64>().ok());
            let q = rank.map(|k| k / 2);
            let s = surface_invariants(64, 2, n, m1 as u64, m2 as u64, q)?;
            let share = format!("{}/{}", scan.counts.get(h).copied().unwrap_or(0), scan.positions.len());
            let mut row = vec![entry.label.clone(), h.clone(), share];
            row.extend(surface_cells(&s));
            r.push(row);
            if let Some(expected) = &entry.annotations.surface {
                let want = [expected.q, expected.k2, expected.c2, expected.sigma, expected.b1, expected.b2, expected.g1, expected.g2];
                let got = [s.q.unwrap_or(-1), s.c1_sq, s.c2, s.sigma, s.b1_base, s.b2_base, s.g1, s.g2];
                if want != got {
                    r.mismatches.push(format!("{} ({h}): invariants {got:?}, expected {want:?}", entry.label));
                }
            }
        }
        if !golden.is_empty() {
            let mut sorted_found = found.clone();
            sorted_found.sort();
            let mut sorted_golden = golden.clone();
            sorted_golden.sort();
            if sorted_found != sorted_golden {
                r.mismatches.push(format!("{}: H1 values {found:?}, expected {golden:?}", entry.label));
            }
        }
    }
    r.notes.push(format!(
        "H1 of the first structure in enumeration order plus {H1_TABLE_SAMPLES} uniformly sampled structures per group (seed {H1_TABLE_SEED}); share = sampled structures with that H1"
    ));
    Ok(r)
}

fn invariants_report(ws: &Workspace) -> Result<Report, Error> {
    let mut columns = vec!["group", "|G|", "b", "n", "m1", "m2"];
    columns.extend(SURFACE_COLUMNS);
    columns.extend(["chi", "Betti"]);
    let mut r = Report::new("Invariants of the associated double Kodaira fibrations", &columns);
    for entry in ws.catalog.entries() {
        let (Some(kernels), Some(surface)) = (entry.annotations.kernel_orders, &entry.annotations.surface) else {
            continue;
        };
        let (m1, m2) = ((entry.order / kernels.0) as u64, (entry.order / kernels.1) as u64);
        let s = surface_invariants(entry.order as u64, 2, 2, m1, m2, Some(surface.q as u64))?;
        let betti = s.betti.expect("q given");
        let mut row = vec![entry.label.clone(), entry.order.to_string(), "2".into(), "2".into(), m1.to_string(), m2.to_string()];
        row.extend(surface_cells(&s));
        row.push(s.chi.to_string());
        row.push(betti.iter().map(|b| b.to_string()).collect::<Vec<_>>().join("/"));
        r.push(row);
        let want = [surface.k2, surface.c2, surface.sigma, surface.b1, surface.b2, surface.g1, surface.g2];
        let got = [s.c1_sq, s.c2, s.sigma, s.b1_base, s.b2_base, s.g1, s.g2];
        if want != got {
            r.mismatches.push(format!("{}: invariants {got:?}, expected {want:?}", entry.label));
        }
        if surface.p_g.is_some_and(|p| Some(p) != s.p_g) {
            r.mismatches.push(format!("{}: p_g {:?}, expected {:?}", entry.label, s.p_g, surface.p_g));
        }
        if surface.betti.is_some_and(|b| b != betti) {
            r.mismatches.push(format!("{}: Betti {betti:?}, expected {:?}", entry.label, surface.betti));
        }
    }
    r.notes.push("m_i = |G|/|K_i| and q from the catalog annotations; n = o(z) = 2".into());
    Ok(r)
}
