//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::common_info::{
    functional_ci_entropy, gkw_decompose, gkw_entropy, nest_search, Nesting, NestingJson, NestSearchConfig, SearchMode,
};
use crate::entropy_solver::{conditional_graph_entropy, graph_entropy};
use crate::error::{Error, Result};
use crate::experiments::{fmt6, parse_grid, run_scenario, Scenario, SweepSpec};
use crate::gf::{bipartition_scheme, build_gf, low_prob_edge_scheme, structure_split_scheme, PeelGrouping};
use crate::graph::{
    build_characteristic_graph, chromatic_entropy_rate, min_entropy_coloring, ColoringMode, GraphKind,
};
use crate::instances::{self, Instance, BUNDLED};
use crate::prob::Source;
use crate::rates::all_rates;
use crate::simulate::{build_code, simulate, SchemeInputs, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "funcomp", version, about = "Distributed functional compression toolkit")]
pub struct Cli {
    /// Seed for sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Node budget for exact colorings and nest searches.
    #[arg(long, global = true, default_value_t = crate::graph::DEFAULT_COLORING_BUDGET)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InstanceArg {
    /// Bundled instance name or path to an instance JSON file.
    #[arg(long)]
    pub instance: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Körner, conditional and chromatic entropies of one source.
    Entropy {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, default_value_t = 1)]
        source: u8,
        /// Also report the chromatic entropy rate of the n-th power graph.
        #[arg(long)]
        power: Option<usize>,
    },
    /// GKW common information (support components).
    Gkw {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Functional common information: evaluate a nesting or search for one.
    Fci {
        #[command(flatten)]
        inst: InstanceArg,
        /// Nesting JSON file; defaults to the instance's nesting, else search.
        #[arg(long)]
        nesting: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        max_nests: usize,
    },
    /// Bipartite function graph G_f and its helper schemes.
    Gf {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Every applicable rate region.
    Rates {
        #[command(flatten)]
        inst: InstanceArg,
    },
    /// Builds a scheme code and simulates it.
    Simulate {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, value_enum)]
        scheme: SchemeKind,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Parameter sweep as CSV.
    Scenario {
        #[arg(value_enum)]
        scenario: Scenario,
        /// lo:hi:step
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        q2: Option<f64>,
    },
    /// Lists bundled instances or prints one.
    Instance { name: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Greedy,
    Auto,
}

/// Command output: a JSON value plus the rows of its CSV rendering.
struct Output {
    json: Value,
    csv: String,
}

impl Output {
    fn pairs(json: Value, rows: &[(&str, f64)]) -> Self {
        let mut csv = String::from("quantity,value\n");
        for (k, v) in rows {
            csv.push_str(&format!("{k},{}\n", fmt6(*v)));
        }
        Output { json, csv }
    }
}

fn source(n: u8) -> Result<Source> {
    Source::from_number(n)
}

fn entropy_cmd(inst: &Instance, s: Source, power: Option<usize>, budget: u64) -> Result<Output> {
    let (j, f) = (&inst.j, &inst.f);
    let g = build_characteristic_graph(j, f, s);
    let p = j.marginal(s);
    let coloring = match min_entropy_coloring(&g, &p, ColoringMode::Exact, budget) {
        Err(Error::Budget(_)) => min_entropy_coloring(&g, &p, ColoringMode::Greedy, 0)?,
        other => other?,
    };
    let mut rows = vec![
        ("h_x", j.entropy_of(s)),
        ("h_g", graph_entropy(j, f, s, GraphKind::Support)?),
        ("h_g_class", graph_entropy(j, f, s, GraphKind::Class)?),
        ("h_g_given_other", conditional_graph_entropy(&g, j, s)?),
        ("chromatic_entropy", coloring.entropy),
    ];
    if let Some(n) = power {
        rows.push(("chromatic_rate", chromatic_entropy_rate(j, f, s, n, budget)?));
    }
    let mut json = serde_json::Map::new();
    json.insert("instance".into(), json!(inst.name));
    json.insert("source".into(), json!(s.index() + 1));
    for (k, v) in &rows {
        json.insert((*k).into(), json!(v));
    }
    json.insert("coloring".into(), json!(coloring.colors));
    Ok(Output::pairs(Value::Object(json), &rows))
}

fn gkw_cmd(inst: &Instance) -> Result<Output> {
    let d = gkw_decompose(&inst.j);
    let e = gkw_entropy(&d);
    let mut csv = String::from("component,mass,rows,cols\n");
    for (i, c) in d.components.iter().enumerate() {
        let rows: Vec<String> = c.rows.iter().map(|&r| inst.j.x1().get(r).to_string()).collect();
        let cols: Vec<String> = c.cols.iter().map(|&k| inst.j.x2().get(k).to_string()).collect();
        csv.push_str(&format!("{i},{:.6},{},{}\n", c.mass, rows.join(" "), cols.join(" ")));
    }
    csv.push_str(&format!("# entropy,{e:.6}\n"));
    let json = json!({ "instance": inst.name, "components": d.components.len(), "masses": d.masses(), "entropy": e });
    Ok(Output { json, csv })
}

fn fci_cmd(inst: &Instance, file: Option<&PathBuf>, mode: Mode, max_nests: usize, budget: u64) -> Result<Output> {
    let (j, f) = (&inst.j, &inst.f);
    let given = match file {
        Some(path) => {
            let raw: NestingJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            Some(Nesting::from_json(j, &raw)?)
        }
        None => inst.nesting.clone(),
    };
    if let Some(n) = given {
        let rows = [("h_kf", functional_ci_entropy(&n, j)), ("h_v", n.h_v(j)), ("nests", n.len() as f64)];
        let json = json!({
            "instance": inst.name,
            "valid": n.is_valid(j, f),
            "h_kf": rows[0].1,
            "h_v": rows[1].1,
            "nesting": n.to_json(j),
        });
        return Ok(Output::pairs(json, &rows));
    }
    let cfg = NestSearchConfig {
        mode: match mode {
            Mode::Exact => SearchMode::Exact,
            Mode::Greedy => SearchMode::Greedy,
            Mode::Auto => SearchMode::Auto,
        },
        max_nests,
        budget,
        ..NestSearchConfig::default()
    };
    let r = nest_search(j, f, &cfg)?;
    let mut csv = String::from("objective,rank,h_kf,h_v,nests\n");
    for (name, list) in [("max_h_kf", &r.by_entropy), ("min_h_v", &r.by_nest_entropy)] {
        for (i, s) in list.iter().enumerate() {
            csv.push_str(&format!("{name},{i},{:.6},{:.6},{}\n", s.h_kf, s.h_v, s.num_nests));
        }
    }
    if !r.complete {
        csv.push_str("# search budget exhausted; results are the best found\n");
    }
    Ok(Output { json: serde_json::to_value(&r)?, csv })
}

fn gf_cmd(inst: &Instance) -> Result<Output> {
    let (j, f) = (&inst.j, &inst.f);
    let g = build_gf(j, f)?;
    let (d, hkb) = bipartition_scheme(&g);
    let mut rows = vec![("bipartitions", d.pieces.len() as f64), ("h_kb", hkb)];
    let mut json = json!({ "instance": inst.name, "gf": g.to_json(j), "bipartitions": d, "h_kb": hkb });
    if let Some(peel) = &inst.peel {
        let kd = low_prob_edge_scheme(&g, peel, &PeelGrouping::Symmetric)?;
        let ks = structure_split_scheme(&g, peel)?;
        rows.push(("h_kdelta", kd.h_kdelta));
        if let Some(t) = kd.total {
            rows.push(("kdelta_total", t));
        }
        rows.push(("h_ks", ks.h_ks));
        if let Some(t) = ks.total {
            rows.push(("ks_total", t));
        }
        json["kdelta"] = serde_json::to_value(&kd)?;
        json["ks"] = serde_json::to_value(&ks)?;
    }
    Ok(Output::pairs(json, &rows))
}

#[derive(Serialize)]
struct RatesOut {
    instance: String,
    r_chi: f64,
    r_h: f64,
    report: crate::rates::RatesReport,
}

fn rates_cmd(inst: &Instance) -> Result<Output> {
    let (j, f) = (&inst.j, &inst.f);
    let r = all_rates(j, f, inst.nesting.as_ref(), inst.peel.as_deref())?;
    let r_h = r.helper_scheme.as_ref().map_or(r.prop4.best, |s| s.sum.min(r.prop4.best));
    let mut csv = String::from("scheme,r1,r2,helper,sum\n");
    let mut row = |s: &crate::rates::RateRegionSummary| {
        csv.push_str(&format!("{},{},{},{},{}\n", s.scheme, fmt6(s.r1), fmt6(s.r2), fmt6(s.helper), fmt6(s.sum)));
    };
    row(&r.slepian_wolf);
    row(&r.functional);
    row(&r.prop1);
    if let Some(p) = &r.prop2 {
        row(p);
    }
    if let Some(p) = &r.prop3 {
        row(&p.primary);
        row(&p.swapped);
    }
    row(&r.prop4.primary);
    row(&r.prop4.swapped);
    if let Some(h) = &r.helper_scheme {
        row(h);
    }
    csv.push_str(&format!("h_joint,,,,{:.6}\n", r.h_joint));
    csv.push_str(&format!("h_f,,,,{:.6}\n", r.h_f));
    csv.push_str(&format!("r_chi,,,,{:.6}\n", r.chi.value));
    csv.push_str(&format!("r_h,,,,{r_h:.6}\n"));
    let out = RatesOut { instance: inst.name.clone(), r_chi: r.chi.value, r_h, report: r };
    Ok(Output { json: serde_json::to_value(&out)?, csv })
}

fn simulate_cmd(inst: &Instance, scheme: SchemeKind, samples: u64, seed: u64) -> Result<Output> {
    let inputs = SchemeInputs { nesting: inst.nesting.as_ref(), peel: inst.peel.as_deref() };
    let code = build_code(scheme, &inst.j, &inst.f, inputs)?;
    let r = simulate(&code, &inst.j, &inst.f, samples, seed)?;
    let rows = [
        ("samples", r.samples as f64),
        ("errors", r.errors as f64),
        ("helper_rate", r.helper_rate),
        ("r1", r.source_rates[0]),
        ("r2", r.source_rates[1]),
        ("sum_rate", r.sum_rate),
        ("expected_sum_rate", r.expected_sum_rate),
        ("theoretical_sum", r.theoretical_sum),
    ];
    Ok(Output::pairs(serde_json::to_value(&r)?, &rows))
}

fn scenario_cmd(
    scenario: Scenario,
    grid: Option<&str>,
    lambda: Option<f64>,
    q2: Option<f64>,
    budget: u64,
) -> Result<Output> {
    let mut spec = match grid {
        Some(g) => SweepSpec::new(scenario, parse_grid(g)?),
        None => SweepSpec::with_default_grid(scenario),
    };
    if let Some(l) = lambda {
        spec.lambda = l;
    }
    if let Some(q) = q2 {
        spec.q2 = q;
    }
    spec.nest.budget = budget;
    let t = run_scenario(&spec)?;
    Ok(Output { json: serde_json::to_value(&t)?, csv: t.to_csv_string()? })
}

fn instance_cmd(name: Option<&str>) -> Result<Output> {
    match name {
        None => {
            let csv = BUNDLED.iter().map(|n| format!("{n}\n")).collect();
            Ok(Output { json: json!(BUNDLED), csv })
        }
        Some(n) => {
            let inst = instances::load(n)?;
            let text = inst.to_json_string()?;
            Ok(Output { json: serde_json::from_str(&text)?, csv: text + "\n" })
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let load = |a: &InstanceArg| instances::load(&a.instance);
    match &cli.command {
        Command::Entropy { inst, source: s, power } => entropy_cmd(&load(inst)?, source(*s)?, *power, cli.budget),
        Command::Gkw { inst } => gkw_cmd(&load(inst)?),
        Command::Fci { inst, nesting, mode, max_nests } => {
            fci_cmd(&load(inst)?, nesting.as_ref(), *mode, *max_nests, cli.budget)
        }
        Command::Gf { inst } => gf_cmd(&load(inst)?),
        Command::Rates { inst } => rates_cmd(&load(inst)?),
        Command::Simulate { inst, scheme, samples } => simulate_cmd(&load(inst)?, *scheme, *samples, cli.seed),
        Command::Scenario { scenario, grid, lambda, q2 } => {
            scenario_cmd(*scenario, grid.as_deref(), *lambda, *q2, cli.budget)
        }
        Command::Instance { name } => instance_cmd(name.as_deref()),
    }
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    let text = match cli.format {
        Format::Csv => out.csv,
        Format::Json => serde_json::to_string_pretty(&out.json)? + "\n",
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the command line and returns the process exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|o| emit(&cli, o)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
