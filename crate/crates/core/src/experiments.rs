//! Parameter sweeps over the bundled scenario families, emitted as CSV with
//! one row per grid point in grid order.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::common_info::{functional_ci_entropy, gkw_decompose, gkw_entropy, nest_search, NestSearchConfig};
use crate::error::{invalid, Result};
use crate::function::function_entropy;
use crate::gf::uniform_sum_rates;
use crate::instances::{binomial_scenario, poisson_scenario, Instance};
use crate::prob::zipf_pmf;
use crate::rates::{
    chi_rate, grid, kdelta_crossover, kdelta_rates, ks_rates, prop1_gkw_helper, prop2_joint_with_kf, prop3_one_source,
    prop4_permutation_helper, KDeltaInstance, KsInstance,
};

pub const CSV_VERSION_LINE: &str = "# funcomp scenario csv v1";

/// Fixed 6-decimal rendering; values that round to zero print as 0.000000.
pub fn fmt6(x: f64) -> String {
    if x.abs() < 5e-7 {
        "0.000000".into()
    } else {
        format!("{x:.6}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Independent B(6,p) and B(5,1-p) sources.
    Binomial,
    /// Poisson-mixed binomial pair, λ fixed, sweep p.
    Poisson,
    /// Independent B(6,p) and B(5,q2) sources with q2 small.
    HighFailure,
    /// K_δ scheme on the low cross-over example.
    KdeltaLow,
    /// K_δ scheme on the high cross-over example.
    KdeltaHigh,
    Petersen,
    Star,
    /// Uniform-within-bipartition sum rates under Zipf bipartition masses.
    Zipf,
}

impl Scenario {
    pub fn default_grid(self) -> (f64, f64, f64) {
        match self {
            Scenario::Binomial | Scenario::Poisson | Scenario::HighFailure => (0.0, 1.0, 0.01),
            Scenario::KdeltaLow => (0.0, 0.99, 0.01),
            Scenario::KdeltaHigh => (0.0, 0.49, 0.01),
            Scenario::Petersen | Scenario::Star => (0.01, 0.49, 0.01),
            Scenario::Zipf => (0.0, 3.0, 0.1),
        }
    }

    fn param_name(self) -> &'static str {
        match self {
            Scenario::Binomial | Scenario::Poisson | Scenario::HighFailure | Scenario::Petersen | Scenario::Star => "p",
            Scenario::KdeltaLow | Scenario::KdeltaHigh => "delta",
            Scenario::Zipf => "gamma",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Scenario::Binomial | Scenario::Poisson | Scenario::HighFailure => &[
                "h_joint", "h_f", "h_kx", "h_kf", "h_v", "prop1_sum", "prop2_sum", "prop3_sum", "prop4_sum", "r_chi",
            ],
            Scenario::KdeltaLow | Scenario::KdeltaHigh => &[
                "h_f",
                "h_kdelta",
                "r_chi_closed",
                "r_chi",
                "r_h_closed",
                "r_h",
                "r_h_minus_r_chi",
            ],
            Scenario::Petersen | Scenario::Star => &[
                "h_f", "h_x1", "h_x2", "r_chi_x1_first", "r_chi_x2_first", "r_chi", "h_ks", "r_h_closed", "r_h",
            ],
            Scenario::Zipf => &["r_s", "r_j", "r_delta", "h_kb", "bound_holds"],
        }
    }
}

/// A sweep: scenario, grid and scenario parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub grid: Vec<f64>,
    /// Poisson mean (scenario b).
    pub lambda: f64,
    /// Second success probability (high-failure scenario).
    pub q2: f64,
    /// Alphabet size and bipartition sizes (zipf).
    pub zipf_n: usize,
    pub zipf_sizes: Vec<usize>,
    pub nest: NestSearchConfig,
}

impl SweepSpec {
    pub fn new(scenario: Scenario, grid: Vec<f64>) -> Self {
        SweepSpec {
            scenario,
            grid,
            lambda: 5.0,
            q2: 0.001,
            zipf_n: 12,
            zipf_sizes: vec![3; 4],
            nest: NestSearchConfig::default(),
        }
    }

    pub fn with_default_grid(scenario: Scenario) -> Self {
        let (lo, hi, step) = scenario.default_grid();
        Self::new(scenario, grid(lo, hi, step).expect("default grid is valid"))
    }

    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return invalid("empty parameter grid");
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return invalid("grid values must be finite");
        }
        Ok(())
    }
}

/// Parses `lo:hi:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return invalid(format!("grid '{s}' is not lo:hi:step"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| crate::Error::Validation(format!("bad number '{p}' in grid")))?;
    }
    grid(v[0], v[1], v[2])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRow {
    pub param: f64,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioTable {
    pub scenario: Scenario,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?.checked_sub(1)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "{CSV_VERSION_LINE}")?;
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            let mut rec = vec![fmt6(r.param)];
            rec.extend(r.values.iter().map(|v| v.map_or(String::new(), fmt6)));
            rec.push(r.error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

fn instance_row(inst: &Instance, cfg: &NestSearchConfig) -> Result<Vec<f64>> {
    let (j, f) = (&inst.j, &inst.f);
    let search = nest_search(j, f, cfg)?;
    let n = search.rate_nesting().ok_or_else(|| crate::Error::Inconsistency("nest search found nothing".into()))?;
    Ok(vec![
        j.joint_entropy(),
        function_entropy(f, j)?.1,
        gkw_entropy(&gkw_decompose(j)),
        functional_ci_entropy(n, j),
        n.h_v(j),
        prop1_gkw_helper(j, f)?.sum,
        prop2_joint_with_kf(j, f, n)?.sum,
        prop3_one_source(j, f, n)?.best,
        prop4_permutation_helper(j, f)?.best,
        chi_rate(j, f)?.value,
    ])
}

fn evaluate(spec: &SweepSpec, x: f64) -> Result<Vec<f64>> {
    match spec.scenario {
        Scenario::Binomial => instance_row(&binomial_scenario(x, None)?, &spec.nest),
        Scenario::HighFailure => instance_row(&binomial_scenario(x, Some(spec.q2))?, &spec.nest),
        Scenario::Poisson => instance_row(&poisson_scenario(spec.lambda, x)?, &spec.nest),
        Scenario::KdeltaLow | Scenario::KdeltaHigh => {
            let which = if spec.scenario == Scenario::KdeltaLow { KDeltaInstance::Example4 } else { KDeltaInstance::Example5 };
            let r = kdelta_rates(which, x)?;
            Ok(vec![
                r.computed.h_f,
                r.computed.h_kdelta,
                r.closed.chi,
                r.computed.chi,
                r.closed.helper_total,
                r.computed.helper_total,
                r.computed.helper_total - r.computed.chi,
            ])
        }
        Scenario::Petersen | Scenario::Star => {
            let which = if spec.scenario == Scenario::Petersen { KsInstance::Petersen } else { KsInstance::Star };
            let r = ks_rates(which, x)?;
            let c = r.computed;
            Ok(vec![
                c.h_f,
                c.h_x1,
                c.h_x2,
                c.chi_x1_first,
                c.chi_x2_first,
                c.chi,
                c.h_ks,
                r.closed.helper_total,
                c.helper_total,
            ])
        }
        Scenario::Zipf => {
            let p = zipf_pmf(spec.zipf_sizes.len(), x)?;
            let u = uniform_sum_rates(spec.zipf_n, &spec.zipf_sizes, &p)?;
            Ok(vec![u.r_s, u.r_j, u.r_delta, u.h_kb, if u.bound_holds { 1.0 } else { 0.0 }])
        }
    }
}

/// Evaluates every grid point (concurrently); per-point failures land in
/// the error column and the sweep continues.
pub fn run_scenario(spec: &SweepSpec) -> Result<ScenarioTable> {
    spec.validate()?;
    let cols = spec.scenario.columns();
    let rows: Vec<ScenarioRow> = spec
        .grid
        .par_iter()
        .map(|&x| match evaluate(spec, x) {
            Ok(v) => ScenarioRow { param: x, values: v.into_iter().map(Some).collect(), error: None },
            Err(e) => ScenarioRow { param: x, values: vec![None; cols.len()], error: Some(e.to_string()) },
        })
        .collect();
    let mut header = vec![spec.scenario.param_name().to_string()];
    header.extend(cols.iter().map(|c| c.to_string()));
    header.push("error".into());
    let mut comments = vec![format!("scenario: {}", serde_json::to_value(spec.scenario)?.as_str().unwrap_or(""))];
    match spec.scenario {
        Scenario::Poisson => comments.push(format!("lambda: {}", spec.lambda)),
        Scenario::HighFailure => comments.push(format!("q2: {}", spec.q2)),
        Scenario::Zipf => comments.push(format!("n: {}, sizes: {:?}", spec.zipf_n, spec.zipf_sizes)),
        Scenario::KdeltaLow | Scenario::KdeltaHigh => {
            let which = if spec.scenario == Scenario::KdeltaLow { KDeltaInstance::Example4 } else { KDeltaInstance::Example5 };
            comments.push(match kdelta_crossover(which) {
                Some(d) => format!("crossover (r_h = r_chi): delta = {d:.6}"),
                None => "crossover (r_h = r_chi): none".into(),
            });
        }
        _ => {}
    }
    Ok(ScenarioTable { scenario: spec.scenario, comments, header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_has_no_gkw_information() {
        let spec = SweepSpec::new(Scenario::Binomial, grid(0.0, 1.0, 0.1).unwrap());
        let t = run_scenario(&spec).unwrap();
        assert!(t.rows.iter().all(|r| r.error.is_none()), "{:?}", t.rows);
        let kx = t.column("h_kx").unwrap();
        assert!(kx.iter().all(|v| *v == Some(0.0)), "{kx:?}");
    }

    #[test]
    fn high_failure_kf_tracks_v() {
        let spec = SweepSpec::new(Scenario::HighFailure, vec![0.95, 0.99]);
        let t = run_scenario(&spec).unwrap();
        let kf = t.column("h_kf").unwrap();
        let v = t.column("h_v").unwrap();
        for (a, b) in kf.iter().zip(&v) {
            assert!((a.unwrap() - b.unwrap()).abs() < 0.05, "{a:?} {b:?}");
        }
    }

    #[test]
    fn zipf_uniform_point() {
        let spec = SweepSpec::new(Scenario::Zipf, vec![0.0]);
        let t = run_scenario(&spec).unwrap();
        assert!((t.column("r_delta").unwrap()[0].unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_is_deterministic() {
        let spec = SweepSpec::new(Scenario::Petersen, grid(0.05, 0.45, 0.05).unwrap());
        let a = run_scenario(&spec).unwrap().to_csv_string().unwrap();
        let b = run_scenario(&spec).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_VERSION_LINE));
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 10);
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let spec = SweepSpec::new(Scenario::Petersen, vec![0.2, 0.7]);
        let t = run_scenario(&spec).unwrap();
        assert!(t.rows[0].error.is_none());
        assert!(t.rows[1].error.is_some());
        assert!(parse_grid("0:1").is_err());
        assert_eq!(parse_grid("0:0.5:0.01").unwrap().len(), 51);
    }
}
