use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use kodaira_catalog::{run_report, Cache, Catalog, Format, Report, Table, Workspace};
use kodaira_core::{
    compute_h1, find_prestructures, find_structures, is_cct, mon, structure_metadata, surface_invariants,
    SearchOptions,
};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;

/// Diagonal double Kodaira structures on finite groups.
#[derive(Parser)]
#[command(name = "kodaira", version)]
struct Cli {
    /// Output format: md, csv or json.
    #[arg(long, global = true, default_value = "md")]
    format: Format,
    /// Results cache directory (default: $KODAIRA_CACHE_DIR, then ~/.cache/kodaira).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recompute everything and store nothing.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Catalog directory holding manifest.json (default: $KODAIRA_CATALOG or the shipped catalog).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group-level predicates and data.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Structure search and lifting.
    #[command(subcommand)]
    Structures(StructuresCommand),
    /// First homology of the surface attached to a structure.
    H1(H1Args),
    /// Numerical invariants from closed-form expressions.
    Invariants(InvariantArgs),
    /// Emit a stored table and diff it against the golden values.
    Report {
        /// cct-36, cct-40, cct-48, cct-54, cct-56, cct-60, order64-structures,
        /// h1-table, invariants-table, or `all`.
        table: String,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// List catalog entries, including labels that need external input.
    List,
    /// Order, generators, center and derived subgroup.
    Info { label: String },
    /// Commutativity-transitivity verdict with a witness.
    Cct { label: String },
    /// Monolithic verdict and mon(G).
    Mon { label: String },
    /// Order of the automorphism group.
    Aut { label: String },
}

#[derive(Subcommand)]
enum StructuresCommand {
    Search(SearchArgs),
    Lift(LiftArgs),
}

#[derive(Args)]
struct SearchArgs {
    label: String,
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Print totals only.
    #[arg(long)]
    count_only: bool,
    /// Stop after K structures and list them.
    #[arg(long)]
    first: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Permit b > 2.
    #[arg(long)]
    extended: bool,
    /// Search prestructures (conjugacy relations only) instead.
    #[arg(long)]
    prestructures: bool,
}

#[derive(Args)]
struct LiftArgs {
    label: String,
    /// Quotient group whose structures are lifted.
    #[arg(long)]
    over: String,
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Number of base structures, drawn uniformly from the quotient's enumeration.
    #[arg(long, default_value_t = 1)]
    bases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct H1Args {
    label: String,
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Use the K-th structure in enumeration order (0-based).
    #[arg(long, conflicts_with = "scan_torsion")]
    representative: Option<usize>,
    /// Sample structures uniformly and tally the distinct H1 values.
    #[arg(long)]
    scan_torsion: bool,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InvariantArgs {
    #[arg(long)]
    order: u64,
    #[arg(long)]
    b: u64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m1: u64,
    #[arg(long)]
    m2: u64,
    #[arg(long)]
    q: Option<u64>,
}

fn tuple(t: &[usize]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn group_command(ws: &Workspace, cmd: GroupCommand) -> Result<Report> {
    Ok(match cmd {
        GroupCommand::List => {
            let mut r = Report::new("Catalog", &["group", "order", "file", "status"]);
            for e in ws.catalog.entries() {
                r.push(vec![e.label.clone(), e.order.to_string(), e.file.clone(), "shipped".into()]);
            }
            for e in ws.catalog.external() {
                r.push(vec![e.label.clone(), e.order.to_string(), String::new(), e.status.clone()]);
            }
            r
        }
        GroupCommand::Info { label } => {
            let g = ws.group(&label)?;
            let entry = ws.catalog.entry(&label)?;
            let gens: Vec<String> = g.generators().iter().map(|n| format!("{}={}", n.name, n.element)).collect();
            Report::record(
                entry.label.clone(),
                vec![
                    ("order", g.order().to_string()),
                    ("generators", gens.join(" ")),
                    ("abelian", g.is_abelian().to_string()),
                    ("|Z(G)|", g.center().order().to_string()),
                    ("|[G,G]|", g.derived_subgroup().order().to_string()),
                    ("conjugacy classes", g.class_sizes().len().to_string()),
                    ("file", entry.file.clone()),
                    ("citation", entry.annotations.citation.clone().unwrap_or_default()),
                ],
            )
        }
        GroupCommand::Cct { label } => {
            let g = ws.group(&label)?;
            let v = is_cct(&g);
            let witness = v
                .witness
                .map(|(x, y, w)| format!("[{x},{y}] = [{y},{w}] = 1, [{x},{w}] != 1"))
                .unwrap_or_default();
            Report::record(
                ws.catalog.entry(&label)?.label.clone(),
                vec![("CCT", v.is_cct.to_string()), ("abelian", v.vacuous.to_string()), ("witness", witness)],
            )
        }
        GroupCommand::Mon { label } => {
            let g = ws.group(&label)?;
            let v = mon(&g);
            let orders: Vec<String> = v.mon.elements().iter().map(|&x| g.element_order(x).to_string()).collect();
            Report::record(
                ws.catalog.entry(&label)?.label.clone(),
                vec![
                    ("monolithic", v.is_monolithic.to_string()),
                    ("|mon|", v.mon.order().to_string()),
                    ("mon elements", tuple(&v.mon.elements())),
                    ("element orders", orders.join(" ")),
                ],
            )
        }
        GroupCommand::Aut { label } => {
            let entry = ws.catalog.entry(&label)?;
            Report::record(entry.label.clone(), vec![("|Aut|", ws.aut_order(&label)?.to_string())])
        }
    })
}

fn search(ws: &mut Workspace, args: SearchArgs) -> Result<Report> {
    ws.threads = args.threads;
    let label = ws.catalog.entry(&args.label)?.label.clone();
    let g = ws.group(&label)?;
    if args.prestructures {
        let count = match args.first {
            Some(k) => {
                let opts = SearchOptions { first: Some(k), threads: args.threads, ..Default::default() };
                find_prestructures(&g, args.b, &opts)?.count
            }
            None => ws.prestructure_count(&label, args.b)?,
        };
        return Ok(Report::record(format!("{label}: prestructures, b = {}", args.b), vec![("count", count.to_string())]));
    }
    if let Some(k) = args.first {
        let opts = SearchOptions {
            first: Some(k),
            threads: args.threads,
            allow_large_genus: args.extended,
            ..Default::default()
        };
        let out = find_structures(&g, args.b, &opts)?;
        if args.count_only {
            return Ok(Report::record(
                format!("{label}: first {k} structures, b = {}", args.b),
                vec![("found", out.count.to_string()), ("exhausted", out.complete.to_string())],
            ));
        }
        let mut r = Report::new(
            format!("{label}: first {k} structures, b = {}", args.b),
            &["#", "tuple", "o(z)", "(|K1|, |K2|)", "strong"],
        );
        for (i, t) in out.structures.iter().enumerate() {
            let s = structure_metadata(&g, t, args.b)?;
            r.push(vec![
                i.to_string(),
                tuple(t),
                s.n.to_string(),
                format!("({}, {})", s.k1.order(), s.k2.order()),
                s.strong.to_string(),
            ]);
        }
        return Ok(r);
    }
    let census = ws.census(&label, args.b, args.extended)?;
    let orbits = match ws.orbits(&census) {
        Ok(o) => o.to_string(),
        Err(e) => format!("n/a ({e})"),
    };
    let kernels: Vec<String> = census.kernel_orders.iter().map(|(a, b, c)| format!("({a}, {b}): {c}")).collect();
    let z: Vec<String> = census.z_orders.iter().map(|(n, c)| format!("{n}: {c}")).collect();
    let mut r = Report::record(
        format!("{label}: structures, b = {}", args.b),
        vec![
            ("count", census.count.to_string()),
            ("|Aut|", ws.aut_order(&label)?.to_string()),
            ("orbits", orbits),
            ("(|K1|, |K2|)", kernels.join(", ")),
            ("o(z)", z.join(", ")),
        ],
    );
    if !args.count_only && census.count > 0 {
        for (i, t) in ws.first_structures(&g, args.b, 5, args.extended)?.iter().enumerate() {
            r.notes.push(format!("structure {i}: {}", tuple(t)));
        }
    }
    Ok(r)
}

fn lift(ws: &Workspace, args: LiftArgs) -> Result<Report> {
    let over = ws.catalog.entry(&args.over)?.label.clone();
    let label = ws.catalog.entry(&args.label)?.label.clone();
    let h = ws.group(&over)?;
    let total = ws.census(&over, args.b, false)?.count;
    let k = args.bases.min(total as usize);
    let mut rng = StdRng::seed_from_u64(args.seed);
    let mut wanted: Vec<usize> = sample(&mut rng, total as usize, k).into_vec();
    wanted.sort_unstable();
    let mut bases = Vec::with_capacity(k);
    let mut index = 0usize;
    let mut next = 0usize;
    if k > 0 {
        kodaira_core::for_each_structure(&h, args.b, &SearchOptions::default(), &mut |t| {
            if index == wanted[next] {
                bases.push(t.to_vec());
                next += 1;
            }
            index += 1;
            next < wanted.len()
        })?;
    }
    let lifts = ws.lifts(&label, &over, &bases, args.b)?;
    let mut r = Report::new(format!("Lifts of structures on {over} to {label}"), &["base", "lifts", "generating"]);
    for l in &lifts {
        r.push(vec![tuple(&l.base), l.lifts.to_string(), l.generating.to_string()]);
    }
    Ok(r)
}

fn h1(ws: &Workspace, args: H1Args) -> Result<Report> {
    let label = ws.catalog.entry(&args.label)?.label.clone();
    let g = ws.group(&label)?;
    if args.scan_torsion {
        let scan = ws.h1_scan(&label, args.b, args.samples, args.seed)?;
        let mut r = Report::new(
            format!("{label}: H1 over {} sampled structures of {}", scan.positions.len(), scan.total),
            &["H1", "samples", "share", "first position"],
        );
        for (h, &c) in &scan.counts {
            let share = c as f64 / scan.positions.len() as f64;
            r.push(vec![h.clone(), c.to_string(), format!("{share:.3}"), scan.first_position[h].to_string()]);
        }
        return Ok(r);
    }
    let k = args.representative.unwrap_or(0);
    let t = ws
        .first_structures(&g, args.b, k + 1, false)?
        .into_iter()
        .nth(k)
        .with_context(|| format!("{label} has fewer than {} structures", k + 1))?;
    let h = compute_h1(&g, &t, args.b)?;
    let s = structure_metadata(&g, &t, args.b)?;
    Ok(Report::record(
        format!("{label}: H1 of structure {k}"),
        vec![
            ("structure", tuple(&t)),
            ("H1", h.to_string()),
            ("rank", h.rank.to_string()),
            ("torsion", tuple(&h.torsion.iter().map(|&d| d as usize).collect::<Vec<_>>())),
            ("q", (h.rank / 2).to_string()),
            ("(m1, m2)", format!("({}, {})", s.m1, s.m2)),
        ],
    ))
}

fn invariants(args: InvariantArgs) -> Result<Report> {
    let s = surface_invariants(args.order, args.b, args.n, args.m1, args.m2, args.q)?;
    let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
    Ok(Report::record(
        format!("Invariants for |G| = {}, b = {}, n = {}", args.order, args.b, args.n),
        vec![
            ("K^2", s.c1_sq.to_string()),
            ("c2", s.c2.to_string()),
            ("sigma", s.sigma.to_string()),
            ("chi", s.chi.to_string()),
            ("b1", s.b1_base.to_string()),
            ("b2", s.b2_base.to_string()),
            ("g1", s.g1.to_string()),
            ("g2", s.g2.to_string()),
            ("q", opt(s.q)),
            ("p_g", opt(s.p_g)),
            (
                "Betti",
                s.betti.map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")).unwrap_or_default(),
            ),
        ],
    ))
}

fn run(cli: Cli) -> Result<bool> {
    let catalog = match &cli.catalog {
        Some(dir) => Catalog::open(dir),
        None => Catalog::open_default(),
    }
    .context("opening the catalog")?;
    let cache = if cli.no_cache { Cache::disabled() } else { Cache::resolve(cli.cache_dir.clone()) };
    let mut ws = Workspace::new(catalog, cache);
    let reports = match cli.command {
        Command::Group(cmd) => vec![group_command(&ws, cmd)?],
        Command::Structures(StructuresCommand::Search(args)) => vec![search(&mut ws, args)?],
        Command::Structures(StructuresCommand::Lift(args)) => vec![lift(&ws, args)?],
        Command::H1(args) => vec![h1(&ws, args)?],
        Command::Invariants(args) => vec![invariants(args)?],
        Command::Report { table } => {
            let tables = if table == "all" {
                Table::all()
            } else {
                vec![table.parse::<Table>().map_err(anyhow::Error::msg)?]
            };
            let mut out = Vec::new();
            for t in tables {
                out.push(run_report(&ws, t).with_context(|| format!("report {t}"))?);
            }
            out
        }
    };
    let mut ok = true;
    for r in &reports {
        print!("{}", r.render(cli.format));
        ok &= r.passed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("golden mismatch");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
