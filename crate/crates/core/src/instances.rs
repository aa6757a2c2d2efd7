//! Named problem instances: parametric constructors, the bundled JSON files
//! and the instance file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::common_info::{Nesting, NestingJson};
use crate::error::{invalid, Error, Result};
use crate::function::{FunctionSpec, FunctionTable, Rule};
use crate::label::{Alphabet, Label};
use crate::prob::{binomial_pmf, poisson_clumped_joint, JointPmf, PmfVector};

/// Instance file: pmf, function and optional nesting / peel set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub pmf: JointPmf,
    pub function: FunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nesting: Option<NestingJson>,
    /// Peel set as [u-class-id, v-class-id] pairs of G_f.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peel: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub description: String,
    pub j: JointPmf,
    pub spec: FunctionSpec,
    pub f: FunctionTable,
    pub nesting: Option<Nesting>,
    pub peel: Option<Vec<(usize, usize)>>,
}

impl Instance {
    pub fn new(name: &str, description: &str, j: JointPmf, spec: FunctionSpec) -> Result<Self> {
        let f = spec.bind(&j)?;
        Ok(Instance { name: name.into(), description: description.into(), j, spec, f, nesting: None, peel: None })
    }

    fn with_peel(mut self, peel: Vec<(usize, usize)>) -> Self {
        self.peel = Some(peel);
        self
    }

    pub fn from_json(raw: InstanceJson) -> Result<Self> {
        let mut inst = Instance::new(&raw.name, &raw.description, raw.pmf, raw.function)?;
        if let Some(n) = &raw.nesting {
            inst.nesting = Some(Nesting::from_json(&inst.j, n)?);
        }
        inst.peel = raw.peel;
        Ok(inst)
    }

    pub fn to_json(&self) -> InstanceJson {
        InstanceJson {
            name: self.name.clone(),
            description: self.description.clone(),
            pmf: self.j.clone(),
            function: self.spec.clone(),
            nesting: self.nesting.as_ref().map(|n| n.to_json(&self.j)),
            peel: self.peel.clone(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Instance::from_json(serde_json::from_str(text)?)
    }
}

fn table(outcomes: &[&[Option<i64>]]) -> FunctionSpec {
    FunctionSpec {
        rule: Rule::Table,
        outcomes: Some(outcomes.iter().map(|r| r.iter().map(|v| v.map(Label::Int)).collect()).collect()),
    }
}

fn named(prefix: &str, n: usize) -> Alphabet {
    Alphabet::new((1..=n).map(|i| Label::Str(format!("{prefix}{i}"))).collect()).expect("distinct labels")
}

fn check_open(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v > lo && v < hi) {
        return invalid(format!("{name} must lie in ({lo}, {hi}), got {v}"));
    }
    Ok(())
}

const X: Option<i64> = None;

/// |x1| + |x2| on uniform {-2..2}^2.
pub fn example1() -> Instance {
    let a = Alphabet::range(-2, 2);
    let u = PmfVector::uniform(5);
    let j = JointPmf::product(a.clone(), u.probs(), a, u.probs()).expect("valid pmf");
    Instance::new("example1", "uniform 5x5, f = |x1| + |x2|", j, FunctionSpec { rule: Rule::AbsSum, outcomes: None })
        .expect("valid instance")
}

/// Two support components of masses 1/3 and 2/3.
pub fn fig2() -> Instance {
    let s = 1.0 / 6.0;
    let j = JointPmf::from_matrix(vec![
        vec![s, s, 0.0, 0.0],
        vec![0.0, 0.0, s, s],
        vec![0.0, 0.0, s, 0.0],
        vec![0.0, 0.0, s / 2.0, s / 2.0],
    ])
    .expect("valid pmf");
    Instance::new("fig2", "4x4 support with components of mass 1/3 and 2/3", j, FunctionSpec {
        rule: Rule::Identity,
        outcomes: None,
    })
    .expect("valid instance")
}

/// Symmetric sum on {0,1,2} with two bipartitions.
pub fn example2() -> Instance {
    let d = 24.0;
    let j = JointPmf::from_matrix(vec![
        vec![12.0 / d, 0.0, 0.0],
        vec![0.0, 2.0 / d, 3.0 / d],
        vec![0.0, 3.0 / d, 4.0 / d],
    ])
    .expect("valid pmf");
    Instance::new("example2", "sum with two bipartitions", j, FunctionSpec { rule: Rule::Sum, outcomes: None })
        .expect("valid instance")
}

/// Sum over different alphabets {1,2,3} x {0,1,3}.
pub fn example3() -> Instance {
    let j = JointPmf::new(
        Alphabet::from_ints(&[1, 2, 3]).expect("distinct"),
        Alphabet::from_ints(&[0, 1, 3]).expect("distinct"),
        vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.0, 0.25], vec![0.0, 0.25, 0.0]],
    )
    .expect("valid pmf");
    Instance::new("example3", "sum over distinct alphabets, three bipartitions", j, FunctionSpec {
        rule: Rule::Sum,
        outcomes: None,
    })
    .expect("valid instance")
}

/// Two bipartitions joined by two edges of mass δ/3 each; δ ∈ [0, 1).
pub fn example4(delta: f64) -> Result<Instance> {
    if !(0.0..1.0).contains(&delta) {
        return invalid(format!("delta must lie in [0, 1), got {delta}"));
    }
    let t = 1.0 / 3.0;
    let p = vec![
        vec![0.0, t, 0.0],
        vec![t * (1.0 - delta), 0.0, t * delta],
        vec![0.0, t * delta, t * (1.0 - delta)],
    ];
    let j = JointPmf::new(named("u", 3), named("v", 3), p)?;
    let spec = table(&[&[X, Some(1), X], &[Some(1), X, Some(3)], &[X, Some(3), Some(2)]]);
    let peel = if delta > 0.0 { vec![(1, 2), (2, 1)] } else { vec![] };
    Ok(Instance::new("example4", "low cross-over between two bipartitions", j, spec)?.with_peel(peel))
}

/// Four cross edges of mass δ/3 each; δ ∈ [0, 1/2).
pub fn example5(delta: f64) -> Result<Instance> {
    if !(0.0..0.5).contains(&delta) {
        return invalid(format!("delta must lie in [0, 1/2), got {delta}"));
    }
    let t = 1.0 / 3.0;
    let p = vec![
        vec![0.0, t * (1.0 - delta), t * delta],
        vec![t * (1.0 - delta), 0.0, t * delta],
        vec![t * delta, t * delta, t * (1.0 - 2.0 * delta)],
    ];
    let j = JointPmf::new(named("u", 3), named("v", 3), p)?;
    let spec = table(&[&[X, Some(1), Some(4)], &[Some(1), X, Some(3)], &[Some(4), Some(3), Some(2)]]);
    let peel = if delta > 0.0 { vec![(0, 2), (1, 2), (2, 0), (2, 1)] } else { vec![] };
    Ok(Instance::new("example5", "high cross-over between two bipartitions", j, spec)?.with_peel(peel))
}

/// Petersen-graph structure on three classes per side; p ∈ (0, 1/2).
pub fn petersen(p: f64) -> Result<Instance> {
    check_open("p", p, 0.0, 0.5)?;
    let q = 1.0 - p;
    let m = vec![
        vec![0.0, p * (1.0 - 2.0 * p) / q, p * p / q],
        vec![p / 2.0, 0.0, p / 2.0],
        vec![1.0 - 2.0 * p, 0.0, 0.0],
    ];
    let j = JointPmf::new(named("u", 3), named("v", 3), m)?;
    let spec = table(&[&[X, Some(1), Some(3)], &[Some(1), X, Some(2)], &[Some(3), X, X]]);
    Ok(Instance::new("petersen", "Petersen graph decomposition", j, spec)?.with_peel(vec![(0, 2), (1, 0)]))
}

/// Correlated star; p ∈ (0, 1/2).
pub fn star(p: f64) -> Result<Instance> {
    check_open("p", p, 0.0, 0.5)?;
    let q = 1.0 - p;
    let m = vec![
        vec![p * p, p * p, p * (1.0 - 2.0 * p)],
        vec![0.0, p * p / q, p * (1.0 - 2.0 * p) / q],
        vec![0.0, 0.0, 1.0 - 2.0 * p],
    ];
    let j = JointPmf::new(named("u", 3), named("v", 3), m)?;
    let spec = table(&[&[Some(1), Some(1), Some(3)], &[X, Some(3), Some(2)], &[X, X, Some(2)]]);
    Ok(Instance::new("star", "correlated star decomposition", j, spec)?.with_peel(vec![(0, 2), (1, 1)]))
}

/// Outcome table of the nested-support instances: min(floor((x1+x2)/2), 4)
/// on the 7x6 grid {0..6} x {0..5}.
pub fn fig3_function() -> Vec<Vec<Option<Label>>> {
    (0..7).map(|a: i64| (0..6).map(|b: i64| Some(Label::Int(((a + b) / 2).min(4)))).collect()).collect()
}

/// Instance on the 7x6 grid with the nested-support outcome table.
pub fn fig3_with(name: &str, description: &str, j: JointPmf) -> Result<Instance> {
    if j.rows() != 7 || j.cols() != 6 {
        return invalid("the nested-support table is 7x6");
    }
    Instance::new(name, description, j, FunctionSpec { rule: Rule::Table, outcomes: Some(fig3_function()) })
}

/// X1 ~ B(6, p), X2 ~ B(5, 1-p) independent (scenario a); with `q2` the
/// second success probability is overridden (scenario c uses 0.001).
pub fn binomial_scenario(p: f64, q2: Option<f64>) -> Result<Instance> {
    let b1 = binomial_pmf(6, p)?;
    let b2 = binomial_pmf(5, q2.unwrap_or(1.0 - p))?;
    let j = JointPmf::product(Alphabet::range(0, 6), b1.probs(), Alphabet::range(0, 5), b2.probs())?;
    fig3_with("fig3", "independent binomial sources on the nested-support table", j)
}

/// Clumped Poisson-mixed binomial pair (scenario b).
pub fn poisson_scenario(lambda: f64, p: f64) -> Result<Instance> {
    fig3_with("fig3_poisson", "Poisson-mixed binomial pair on the nested-support table", poisson_clumped_joint(lambda, p, 6, 5)?)
}

/// Default parameters of the bundled parametric instances.
pub const BUNDLED_DELTA: f64 = 0.1;
pub const BUNDLED_P: f64 = 0.2;

pub const BUNDLED: [&str; 9] = ["example1", "fig2", "example2", "example3", "example4", "example5", "petersen", "star", "fig3"];

fn bundled_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1" => include_str!("../instances/example1.json"),
        "fig2" => include_str!("../instances/fig2.json"),
        "example2" => include_str!("../instances/example2.json"),
        "example3" => include_str!("../instances/example3.json"),
        "example4" => include_str!("../instances/example4.json"),
        "example5" => include_str!("../instances/example5.json"),
        "petersen" => include_str!("../instances/petersen.json"),
        "star" => include_str!("../instances/star.json"),
        "fig3" => include_str!("../instances/fig3.json"),
        _ => return None,
    })
}

/// Builds a bundled instance from its constructor.
pub fn construct(name: &str) -> Result<Instance> {
    match name {
        "example1" => Ok(example1()),
        "fig2" => Ok(fig2()),
        "example2" => Ok(example2()),
        "example3" => Ok(example3()),
        "example4" => example4(BUNDLED_DELTA),
        "example5" => example5(BUNDLED_DELTA),
        "petersen" => petersen(BUNDLED_P),
        "star" => star(BUNDLED_P),
        "fig3" => binomial_scenario(0.5, None),
        _ => invalid(format!("unknown instance '{name}'")),
    }
}

/// Loads a bundled instance by name (optionally with a `.json` suffix) or an
/// instance file by path.
pub fn load(name_or_path: &str) -> Result<Instance> {
    let stem = name_or_path.strip_suffix(".json").unwrap_or(name_or_path);
    if let Some(text) = bundled_text(stem) {
        return Instance::parse(text);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Validation(format!(
            "'{name_or_path}' is neither a bundled instance ({}) nor a file",
            BUNDLED.join(", ")
        )));
    }
    Instance::parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_pmf(a: &JointPmf, b: &JointPmf) -> bool {
        a.x1() == b.x1()
            && a.x2() == b.x2()
            && a.matrix().iter().flatten().zip(b.matrix().iter().flatten()).all(|(x, y)| (x - y).abs() <= 1e-15)
    }

    #[test]
    fn bundled_files_match_constructors() {
        for name in BUNDLED {
            let file = load(name).unwrap();
            let built = construct(name).unwrap();
            assert_eq!(file.name, built.name, "{name}");
            assert!(same_pmf(&file.j, &built.j), "{name}");
            assert_eq!(file.f.outcomes(), built.f.outcomes(), "{name}");
            assert_eq!(file.peel, built.peel, "{name}");
        }
    }

    #[test]
    fn bundled_files_round_trip() {
        for name in BUNDLED {
            let a = load(name).unwrap();
            let b = Instance::parse(&a.to_json_string().unwrap()).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }

    #[test]
    fn parameter_ranges() {
        assert!(example4(1.0).is_err());
        assert!(example5(0.5).is_err());
        assert!(petersen(0.0).is_err());
        assert!(star(0.5).is_err());
        assert!(petersen(0.45).is_ok());
        assert!(load("no-such-instance").is_err());
    }

    #[test]
    fn nesting_survives_round_trip() {
        let mut inst = example2();
        inst.nesting = Some(Nesting::trivial(&inst.j));
        let back = Instance::parse(&inst.to_json_string().unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn fig3_outcomes() {
        let f = fig3_function();
        assert_eq!(f[6][5], Some(Label::Int(4)));
        assert_eq!(f[1][2], Some(Label::Int(1)));
        assert!(binomial_scenario(0.3, Some(0.001)).is_ok());
        assert!(poisson_scenario(5.0, 0.5).is_ok());
    }

    /// Rewrites the bundled files from the constructors.
    #[test]
    #[ignore]
    fn write_bundled_files() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("instances");
        for name in BUNDLED {
            let text = construct(name).unwrap().to_json_string().unwrap();
            std::fs::write(dir.join(format!("{name}.json")), text + "\n").unwrap();
        }
    }
}
