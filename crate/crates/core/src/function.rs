//! Function tables f(x1, x2), their outcome distributions and the
//! equivalence classes each source induces.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::label::{Alphabet, Label};
use crate::prob::{h, JointPmf, Source};

/// Named constructors for function tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Sum,
    AbsSum,
    Xor,
    Identity,
    Table,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<Vec<Option<Label>>>>,
}

/// Outcome table over two alphabets. `None` marks a cell where f is not
/// needed (zero probability).
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTable {
    rule: Rule,
    x1: Alphabet,
    x2: Alphabet,
    outcomes: Vec<Vec<Option<Label>>>,
}

impl Serialize for FunctionTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionJson { rule: self.rule, outcomes: Some(self.outcomes.clone()) }.serialize(s)
    }
}

/// Unpaired function description as read from JSON; alphabets come from the
/// accompanying joint distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<Vec<Option<Label>>>>,
}

impl FunctionSpec {
    /// Builds the table on the alphabets of `j` and pairs it with `j`.
    pub fn bind(&self, j: &JointPmf) -> Result<FunctionTable> {
        let table = match (&self.outcomes, self.rule) {
            (Some(outcomes), rule) => FunctionTable::from_outcomes(rule, j.x1().clone(), j.x2().clone(), outcomes.clone())?,
            (None, Rule::Table) => return invalid("rule \"table\" requires an outcomes matrix"),
            (None, rule) => build_from_rule(rule, j.x1(), j.x2())?,
        };
        table.paired(j)
    }
}

fn numeric(label: &Label, rule: &str) -> Result<i64> {
    label
        .as_int()
        .ok_or_else(|| Error::Validation(format!("rule {rule} needs integer labels, got {label}")))
}

/// Full table for a named rule.
pub fn build_from_rule(rule: Rule, a1: &Alphabet, a2: &Alphabet) -> Result<FunctionTable> {
    let mut outcomes = Vec::with_capacity(a1.len());
    for x in a1.symbols() {
        let mut row = Vec::with_capacity(a2.len());
        for y in a2.symbols() {
            let v = match rule {
                Rule::Sum => Label::Int(numeric(x, "sum")? + numeric(y, "sum")?),
                Rule::AbsSum => Label::Int(numeric(x, "abs_sum")?.abs() + numeric(y, "abs_sum")?.abs()),
                Rule::Xor => Label::Int(numeric(x, "xor")? ^ numeric(y, "xor")?),
                Rule::Identity => Label::Str(format!("({x},{y})")),
                Rule::Table => return invalid("rule \"table\" cannot be generated; supply outcomes"),
            };
            row.push(Some(v));
        }
        outcomes.push(row);
    }
    Ok(FunctionTable { rule, x1: a1.clone(), x2: a2.clone(), outcomes })
}

impl FunctionTable {
    pub fn from_outcomes(rule: Rule, x1: Alphabet, x2: Alphabet, outcomes: Vec<Vec<Option<Label>>>) -> Result<Self> {
        if outcomes.len() != x1.len() || outcomes.iter().any(|r| r.len() != x2.len()) {
            return invalid(format!("outcome table shape does not match alphabets {}x{}", x1.len(), x2.len()));
        }
        Ok(FunctionTable { rule, x1, x2, outcomes })
    }

    /// Custom integer table; `None` entries are off-support markers.
    pub fn from_int_table(x1: Alphabet, x2: Alphabet, table: &[Vec<Option<i64>>]) -> Result<Self> {
        let outcomes = table.iter().map(|r| r.iter().map(|v| v.map(Label::Int)).collect()).collect();
        Self::from_outcomes(Rule::Table, x1, x2, outcomes)
    }

    /// Checks the table against `j` and blanks every off-support cell.
    pub fn paired(mut self, j: &JointPmf) -> Result<FunctionTable> {
        if &self.x1 != j.x1() || &self.x2 != j.x2() {
            return invalid("function alphabets differ from the joint distribution's");
        }
        for i in 0..j.rows() {
            for k in 0..j.cols() {
                if j.in_support(i, k) {
                    if self.outcomes[i][k].is_none() {
                        return invalid(format!(
                            "f undefined on support cell ({}, {})",
                            j.x1().get(i),
                            j.x2().get(k)
                        ));
                    }
                } else {
                    self.outcomes[i][k] = None;
                }
            }
        }
        Ok(self)
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn outcome(&self, i: usize, k: usize) -> Option<&Label> {
        self.outcomes[i][k].as_ref()
    }

    pub fn outcomes(&self) -> &[Vec<Option<Label>>] {
        &self.outcomes
    }

    /// Outcome on a support cell; panics if the table was not paired.
    pub fn at(&self, i: usize, k: usize) -> &Label {
        self.outcomes[i][k].as_ref().expect("outcome on a support cell")
    }

    pub fn transpose(&self) -> FunctionTable {
        let outcomes = (0..self.x2.len())
            .map(|k| (0..self.x1.len()).map(|i| self.outcomes[i][k].clone()).collect())
            .collect();
        FunctionTable { rule: self.rule, x1: self.x2.clone(), x2: self.x1.clone(), outcomes }
    }

    /// Sorted distinct outcomes on the support.
    pub fn range(&self, j: &JointPmf) -> Vec<Label> {
        let mut r: Vec<Label> = j.support().into_iter().map(|(i, k)| self.at(i, k).clone()).collect();
        r.sort();
        r.dedup();
        r
    }

    /// Dense outcome ids for every cell (`usize::MAX` off support), ids in
    /// sorted label order.
    pub fn outcome_ids(&self, j: &JointPmf) -> (Vec<Label>, Vec<Vec<usize>>) {
        let range = self.range(j);
        let index: HashMap<&Label, usize> = range.iter().enumerate().map(|(n, l)| (l, n)).collect();
        let ids = (0..j.rows())
            .map(|i| {
                (0..j.cols())
                    .map(|k| if j.in_support(i, k) { index[self.at(i, k)] } else { usize::MAX })
                    .collect()
            })
            .collect();
        (range, ids)
    }
}

/// Distribution of f(X1, X2), one entry per outcome in sorted order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<Label>,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn entropy(&self) -> f64 {
        h(&self.probs)
    }
}

/// Outcome distribution and its entropy H(f(X1, X2)).
pub fn function_entropy(f: &FunctionTable, j: &JointPmf) -> Result<(OutcomeDistribution, f64)> {
    let mut agg: BTreeMap<Label, f64> = BTreeMap::new();
    for (i, k) in j.support() {
        let o = f.outcome(i, k).ok_or_else(|| {
            Error::Validation(format!("f undefined on support cell ({}, {})", j.x1().get(i), j.x2().get(k)))
        })?;
        *agg.entry(o.clone()).or_insert(0.0) += j.mass(i, k);
    }
    let (outcomes, probs): (Vec<_>, Vec<_>) = agg.into_iter().unzip();
    let d = OutcomeDistribution { outcomes, probs };
    let e = d.entropy();
    Ok((d, e))
}

/// True iff f(a,b) = f(b,a) on every symmetric pair of support cells whose
/// labels occur in both alphabets.
pub fn is_permutation_invariant(f: &FunctionTable, j: &JointPmf) -> bool {
    for (i, k) in j.support() {
        let a = j.x1().get(i);
        let b = j.x2().get(k);
        if let Some((ti, tk)) = j.label_cell(b, a) {
            if j.in_support(ti, tk) && f.at(i, k) != f.at(ti, tk) {
                return false;
            }
        }
    }
    true
}

/// Masked row signature: outcome where the cell has mass, `None` elsewhere.
fn masked_row<'a>(f: &'a FunctionTable, j: &JointPmf, i: usize) -> Vec<Option<&'a Label>> {
    (0..j.cols()).map(|k| if j.in_support(i, k) { f.outcome(i, k) } else { None }).collect()
}

/// Partition of a source's alphabet into classes of symbols whose masked
/// rows are identical (same support pattern, same outcomes). Classes are
/// listed by smallest member; members ascend. Symbols with zero mass share
/// one class.
pub fn equivalence_classes(f: &FunctionTable, j: &JointPmf, source: Source) -> Vec<Vec<usize>> {
    match source {
        Source::One => row_classes(f, j),
        Source::Two => row_classes(&f.transpose(), &j.transpose()),
    }
}

fn row_classes(f: &FunctionTable, j: &JointPmf) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<Option<&Label>>, usize> = HashMap::new();
    for i in 0..j.rows() {
        let sig = masked_row(f, j, i);
        match seen.get(&sig) {
            Some(&c) => classes[c].push(i),
            None => {
                seen.insert(sig, classes.len());
                classes.push(vec![i]);
            }
        }
    }
    classes
}

/// Class id of every symbol of `source`.
pub fn class_index(f: &FunctionTable, j: &JointPmf, source: Source) -> (Vec<Vec<usize>>, Vec<usize>) {
    let classes = equivalence_classes(f, j, source);
    let mut idx = vec![0; j.alphabet(source).len()];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            idx[m] = c;
        }
    }
    (classes, idx)
}

/// Collapses the rows of `j` (source 1) onto their equivalence classes.
/// Row labels become the label of each class's smallest member.
pub fn quotient_rows(f: &FunctionTable, j: &JointPmf) -> Result<(JointPmf, FunctionTable)> {
    let (classes, _) = class_index(f, j, Source::One);
    let labels: Vec<Label> = classes.iter().map(|c| j.x1().get(c[0]).clone()).collect();
    let mut p = vec![vec![0.0; j.cols()]; classes.len()];
    let mut out = vec![vec![None; j.cols()]; classes.len()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            for k in 0..j.cols() {
                p[c][k] += j.mass(i, k);
                if j.in_support(i, k) {
                    out[c][k] = f.outcome(i, k).cloned();
                }
            }
        }
    }
    let qj = JointPmf::new(Alphabet::new(labels)?, j.x2().clone(), p)?;
    let qf = FunctionTable::from_outcomes(Rule::Table, qj.x1().clone(), qj.x2().clone(), out)?.paired(&qj)?;
    Ok((qj, qf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::PmfVector;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn uniform5() -> JointPmf {
        let a = Alphabet::range(-2, 2);
        let u = PmfVector::uniform(5);
        JointPmf::product(a.clone(), u.probs(), a, u.probs()).unwrap()
    }

    fn example2() -> (JointPmf, FunctionTable) {
        let d = 24.0;
        let j = JointPmf::from_matrix(vec![
            vec![12.0 / d, 0.0, 0.0],
            vec![0.0, 2.0 / d, 3.0 / d],
            vec![0.0, 3.0 / d, 4.0 / d],
        ])
        .unwrap();
        let f = build_from_rule(Rule::Sum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        (j, f)
    }

    fn example3() -> (JointPmf, FunctionTable) {
        let j = JointPmf::new(
            Alphabet::from_ints(&[1, 2, 3]).unwrap(),
            Alphabet::from_ints(&[0, 1, 3]).unwrap(),
            vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.0, 0.25], vec![0.0, 0.25, 0.0]],
        )
        .unwrap();
        let f = build_from_rule(Rule::Sum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        (j, f)
    }

    #[test]
    fn rule_outcomes() {
        let a = Alphabet::range(0, 2);
        let f = build_from_rule(Rule::Sum, &a, &a).unwrap();
        assert_eq!(f.outcome(1, 2), Some(&Label::Int(3)));
        let b = Alphabet::range(-2, 2);
        let g = build_from_rule(Rule::AbsSum, &b, &b).unwrap();
        assert_eq!(g.outcome(0, 4), Some(&Label::Int(4)));
        let (_, f3) = example3();
        // (3, 1) is row 2, column 1 and on the support.
        assert_eq!(f3.outcome(2, 1), Some(&Label::Int(4)));
        assert_eq!(f3.outcome(0, 1), None);
        let s = Alphabet::new(vec![Label::from("a")]).unwrap();
        assert!(build_from_rule(Rule::Sum, &s, &s).is_err());
    }

    #[test]
    fn xor_and_identity() {
        let a = Alphabet::range(0, 3);
        let b = Alphabet::range(0, 1);
        let f = build_from_rule(Rule::Xor, &a, &b).unwrap();
        assert_eq!(f.outcome(3, 1), Some(&Label::Int(2)));
        let g = build_from_rule(Rule::Identity, &a, &b).unwrap();
        assert_eq!(g.outcome(2, 1), Some(&Label::from("(2,1)")));
    }

    #[test]
    fn outcome_entropies() {
        let (j, f) = example2();
        let (d, e) = function_entropy(&f, &j).unwrap();
        assert_eq!(d.outcomes, vec![Label::Int(0), Label::Int(2), Label::Int(3), Label::Int(4)]);
        let want = [0.5, 1.0 / 12.0, 0.25, 1.0 / 6.0];
        for (a, b) in d.probs.iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
        assert!(close(e, 1.7296, 5e-4));
        let (j3, f3) = example3();
        let (d3, e3) = function_entropy(&f3, &j3).unwrap();
        assert_eq!(d3.probs, vec![0.5, 0.25, 0.25]);
        assert!(close(e3, 1.5, 1e-12));
    }

    #[test]
    fn constant_function_has_zero_entropy() {
        let j = uniform5();
        let f = FunctionTable::from_outcomes(
            Rule::Table,
            j.x1().clone(),
            j.x2().clone(),
            vec![vec![Some(Label::Int(7)); 5]; 5],
        )
        .unwrap();
        assert_eq!(function_entropy(&f, &j).unwrap().1, 0.0);
        assert_eq!(equivalence_classes(&f, &j, Source::One).len(), 1);
    }

    #[test]
    fn missing_outcome_on_support_is_rejected() {
        let (j, _) = example2();
        let bad = FunctionTable::from_int_table(
            j.x1().clone(),
            j.x2().clone(),
            &[vec![None, None, None], vec![None, Some(2), Some(3)], vec![None, Some(3), Some(4)]],
        )
        .unwrap();
        assert!(bad.paired(&j).is_err());
    }

    #[test]
    fn permutation_invariance() {
        let (j, f) = example2();
        assert!(is_permutation_invariant(&f, &j));
        let id = build_from_rule(Rule::Identity, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        assert!(!is_permutation_invariant(&id, &j));
        let (j3, f3) = example3();
        assert!(is_permutation_invariant(&f3, &j3));
    }

    #[test]
    fn example1_classes() {
        let j = uniform5();
        let f = build_from_rule(Rule::AbsSum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        let classes = equivalence_classes(&f, &j, Source::One);
        // labels -2..2 sit at indices 0..4
        assert_eq!(classes, vec![vec![0, 4], vec![1, 3], vec![2]]);
        assert_eq!(equivalence_classes(&f, &j, Source::Two), classes);
        let id = build_from_rule(Rule::Identity, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        assert_eq!(equivalence_classes(&id, &j, Source::One).len(), 5);
    }

    #[test]
    fn quotient_preserves_mass_and_outcomes() {
        let j = uniform5();
        let f = build_from_rule(Rule::AbsSum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        let (qj, qf) = quotient_rows(&f, &j).unwrap();
        assert_eq!(qj.rows(), 3);
        assert!(close(qj.marginal1()[0], 0.4, 1e-12));
        assert_eq!(qf.at(2, 0), &Label::Int(2));
        assert!(close(function_entropy(&qf, &qj).unwrap().1, function_entropy(&f, &j).unwrap().1, 1e-12));
    }

    #[test]
    fn spec_json_binds() {
        let (j, _) = example2();
        let spec: FunctionSpec = serde_json::from_str(r#"{"rule":"sum"}"#).unwrap();
        let f = spec.bind(&j).unwrap();
        assert_eq!(f.outcome(0, 1), None);
        let text = serde_json::to_string(&f).unwrap();
        let again: FunctionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(again.bind(&j).unwrap(), f);
    }
}
