//! Gács–Körner–Witsenhausen common information and its functional
//! generalization through nestings of the joint support.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::entropy_solver::{check_cell_partition, graph_entropy};
use crate::error::{invalid, Result};
use crate::function::FunctionTable;
use crate::graph::GraphKind;
use crate::label::Label;
use crate::prob::{h, h_normalized, JointPmf, Source};

pub type Cell = (usize, usize);

/// Connected piece of the support bipartite graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub cells: Vec<Cell>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
}

impl ComponentDecomposition {
    pub fn masses(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mass).collect()
    }

    /// Support cells of each component, usable as a helper index.
    pub fn cell_groups(&self) -> Vec<Vec<Cell>> {
        self.components.iter().map(|c| c.cells.clone()).collect()
    }
}

/// Groups `cells` into connected components (cells linked through a shared
/// row or column). Components and their cells are in row-major order.
pub fn cell_components(cells: &[Cell], rows: usize, cols: usize) -> Vec<Vec<Cell>> {
    let mut uf = UnionFind::<usize>::new(rows + cols);
    for &(a, b) in cells {
        uf.union(a, rows + b);
    }
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    let mut roots: Vec<usize> = Vec::new();
    let mut out: Vec<Vec<Cell>> = Vec::new();
    for c in sorted {
        let r = uf.find(c.0);
        match roots.iter().position(|&x| x == r) {
            Some(i) => out[i].push(c),
            None => {
                roots.push(r);
                out.push(vec![c]);
            }
        }
    }
    out
}

/// Connected components of the support bipartite graph of `j`, ordered by
/// smallest row.
pub fn gkw_decompose(j: &JointPmf) -> ComponentDecomposition {
    let components = cell_components(&j.support(), j.rows(), j.cols())
        .into_iter()
        .map(|cells| {
            let mut rows: Vec<usize> = cells.iter().map(|c| c.0).collect();
            let mut cols: Vec<usize> = cells.iter().map(|c| c.1).collect();
            rows.sort_unstable();
            rows.dedup();
            cols.sort_unstable();
            cols.dedup();
            let mass = cells.iter().map(|&(a, b)| j.mass(a, b)).sum();
            Component { rows, cols, cells, mass }
        })
        .collect();
    ComponentDecomposition { components }
}

/// H(K_{X1,X2}).
pub fn gkw_entropy(d: &ComponentDecomposition) -> f64 {
    // one component: exactly zero, whatever the rounding of its mass
    if d.components.len() <= 1 {
        return 0.0;
    }
    h(&d.masses())
}

/// Partition of the support into nests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nesting {
    nests: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestJson {
    pub cells: Vec<(Label, Label)>,
}

/// External form: `{ "nests": [ { "cells": [[x1, x2], ...] } ] }` with
/// symbol labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingJson {
    pub nests: Vec<NestJson>,
}

impl Nesting {
    /// Validates that `nests` partition the support. Nests are put in
    /// canonical order (by smallest cell) with sorted cells; empty nests are
    /// dropped.
    pub fn new(j: &JointPmf, nests: Vec<Vec<Cell>>) -> Result<Self> {
        check_cell_partition(j, &nests)?;
        let mut nests: Vec<Vec<Cell>> = nests
            .into_iter()
            .filter(|n| !n.is_empty())
            .map(|mut n| {
                n.sort_unstable();
                n
            })
            .collect();
        nests.sort();
        Ok(Nesting { nests })
    }

    /// One nest holding the whole support.
    pub fn trivial(j: &JointPmf) -> Self {
        Nesting { nests: vec![j.support()] }
    }

    /// Every support cell in its own nest.
    pub fn singletons(j: &JointPmf) -> Self {
        Nesting { nests: j.support().into_iter().map(|c| vec![c]).collect() }
    }

    pub fn nests(&self) -> &[Vec<Cell>] {
        &self.nests
    }

    pub fn len(&self) -> usize {
        self.nests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nests.is_empty()
    }

    pub fn nest_masses(&self, j: &JointPmf) -> Vec<f64> {
        self.nests.iter().map(|n| n.iter().map(|&(a, b)| j.mass(a, b)).sum()).collect()
    }

    /// Connected components within each nest.
    pub fn components(&self, j: &JointPmf) -> Vec<Vec<Vec<Cell>>> {
        self.nests.iter().map(|n| cell_components(n, j.rows(), j.cols())).collect()
    }

    /// Flattened (nest, component) groups: the cells of each value of K_f.
    pub fn kf_groups(&self, j: &JointPmf) -> Vec<Vec<Cell>> {
        self.components(j).into_iter().flatten().collect()
    }

    /// True iff every component carries a single outcome.
    pub fn is_valid(&self, j: &JointPmf, f: &FunctionTable) -> bool {
        self.kf_groups(j).iter().all(|g| g.iter().all(|&(a, b)| f.at(a, b) == f.at(g[0].0, g[0].1)))
    }

    pub fn h_v(&self, j: &JointPmf) -> f64 {
        h(&self.nest_masses(j))
    }

    pub fn to_json(&self, j: &JointPmf) -> NestingJson {
        NestingJson {
            nests: self
                .nests
                .iter()
                .map(|n| NestJson {
                    cells: n.iter().map(|&(a, b)| (j.x1().get(a).clone(), j.x2().get(b).clone())).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &JointPmf, n: &NestingJson) -> Result<Self> {
        let mut nests = Vec::with_capacity(n.nests.len());
        for nest in &n.nests {
            let mut cells = Vec::with_capacity(nest.cells.len());
            for (a, b) in &nest.cells {
                match j.label_cell(a, b) {
                    Some(c) => cells.push(c),
                    None => return invalid(format!("nest cell ({a}, {b}) is not in the alphabets")),
                }
            }
            nests.push(cells);
        }
        Nesting::new(j, nests)
    }
}

/// H(V) + Σ_i P(i) H(component | V=i), component masses normalized per nest.
pub fn functional_ci_entropy(n: &Nesting, j: &JointPmf) -> f64 {
    let mut total = n.h_v(j);
    for (comps, pi) in n.components(j).iter().zip(n.nest_masses(j)) {
        let masses: Vec<f64> = comps.iter().map(|c| c.iter().map(|&(a, b)| j.mass(a, b)).sum()).collect();
        total += pi * h_normalized(&masses);
    }
    total
}

/// Per-nest rate H_{G^i}(X_s | V=i). For a valid nesting every component is
/// determined by the source symbol alone, so the rate is the entropy of the
/// nest-normalized component masses; otherwise it falls back to the class
/// graph entropy of the nest's conditional instance.
pub fn nest_marginal_rates(n: &Nesting, j: &JointPmf, f: &FunctionTable, source: Source) -> Result<Vec<f64>> {
    let valid = n.is_valid(j, f);
    let mut out = Vec::with_capacity(n.len());
    for (nest, comps) in n.nests().iter().zip(n.components(j)) {
        if valid {
            let masses: Vec<f64> = comps.iter().map(|c| c.iter().map(|&(a, b)| j.mass(a, b)).sum()).collect();
            out.push(h_normalized(&masses));
        } else {
            out.push(graph_entropy(&j.restrict(nest)?, f, source, GraphKind::Class)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    Greedy,
    /// Exact when the support fits the exhaustive cap, greedy otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NestSearchConfig {
    pub mode: SearchMode,
    pub max_nests: usize,
    pub exhaustive_cap: usize,
    /// Search-node budget for exact mode.
    pub budget: u64,
    pub top_k: usize,
}

impl Default for NestSearchConfig {
    fn default() -> Self {
        NestSearchConfig { mode: SearchMode::Auto, max_nests: 4, exhaustive_cap: 16, budget: 20_000_000, top_k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredNesting {
    #[serde(skip)]
    pub nesting: Nesting,
    pub nests: Vec<Vec<Cell>>,
    pub h_kf: f64,
    pub h_v: f64,
    pub num_nests: usize,
}

impl ScoredNesting {
    pub fn new(nesting: Nesting, j: &JointPmf) -> Self {
        let h_kf = functional_ci_entropy(&nesting, j);
        let h_v = nesting.h_v(j);
        ScoredNesting { nests: nesting.nests.clone(), num_nests: nesting.len(), nesting, h_kf, h_v }
    }
}

/// Nest search output under both objectives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestSearchResult {
    pub mode: SearchMode,
    /// False when the exact search ran out of budget.
    pub complete: bool,
    pub nodes: u64,
    /// Ranked by max H(K_f), then min H(V), then fewest nests.
    pub by_entropy: Vec<ScoredNesting>,
    /// Ranked by min H(V), then max H(K_f), then fewest nests.
    pub by_nest_entropy: Vec<ScoredNesting>,
}

impl NestSearchResult {
    /// Nesting used for rate evaluation (min H(V) objective).
    pub fn rate_nesting(&self) -> Option<&Nesting> {
        self.by_nest_entropy.first().map(|s| &s.nesting)
    }
}

const SCORE_EPS: f64 = 1e-12;

fn better_entropy(a: &ScoredNesting, b: &ScoredNesting) -> bool {
    if (a.h_kf - b.h_kf).abs() > SCORE_EPS {
        return a.h_kf > b.h_kf;
    }
    if (a.h_v - b.h_v).abs() > SCORE_EPS {
        return a.h_v < b.h_v;
    }
    a.num_nests < b.num_nests
}

fn better_nest_entropy(a: &ScoredNesting, b: &ScoredNesting) -> bool {
    if (a.h_v - b.h_v).abs() > SCORE_EPS {
        return a.h_v < b.h_v;
    }
    if (a.h_kf - b.h_kf).abs() > SCORE_EPS {
        return a.h_kf > b.h_kf;
    }
    a.num_nests < b.num_nests
}

/// Inserts keeping the list sorted and at most `k` long; earlier entries win
/// ties.
fn insert_ranked(list: &mut Vec<ScoredNesting>, s: &ScoredNesting, k: usize, better: fn(&ScoredNesting, &ScoredNesting) -> bool) {
    let pos = list.iter().position(|e| better(s, e)).unwrap_or(list.len());
    if pos < k {
        list.insert(pos, s.clone());
        list.truncate(k);
    }
}

/// Searches for valid nestings. Exact mode enumerates set partitions of the
/// support cells (canonical restricted-growth order, at most `max_nests`
/// nests) with incremental outcome-purity pruning.
pub fn nest_search(j: &JointPmf, f: &FunctionTable, cfg: &NestSearchConfig) -> Result<NestSearchResult> {
    let cells = j.support();
    let mode = match cfg.mode {
        SearchMode::Auto if cells.len() <= cfg.exhaustive_cap => SearchMode::Exact,
        SearchMode::Auto => SearchMode::Greedy,
        m => m,
    };
    if cfg.max_nests == 0 || cfg.top_k == 0 {
        return invalid("max_nests and top_k must be positive");
    }
    match mode {
        SearchMode::Exact => {
            if cells.len() > cfg.exhaustive_cap {
                return invalid(format!(
                    "{} support cells exceed the exhaustive cap of {}",
                    cells.len(),
                    cfg.exhaustive_cap
                ));
            }
            Ok(exact_search(j, f, &cells, cfg))
        }
        _ => {
            let s = ScoredNesting::new(greedy_nesting(j, f), j);
            Ok(NestSearchResult {
                mode: SearchMode::Greedy,
                complete: true,
                nodes: 0,
                by_entropy: vec![s.clone()],
                by_nest_entropy: vec![s],
            })
        }
    }
}

/// Per-nest purity state: union-find over row and column nodes plus the
/// outcome carried by each node's component.
#[derive(Clone)]
struct NestState {
    uf: UnionFind<usize>,
    outcome: Vec<Option<usize>>,
}

impl NestState {
    fn new(nodes: usize) -> Self {
        NestState { uf: UnionFind::new(nodes), outcome: vec![None; nodes] }
    }

    /// Adds a cell joining nodes `a` and `b` with outcome `o`; false if a
    /// component would carry two outcomes.
    fn add(&mut self, a: usize, b: usize, o: usize) -> bool {
        let (ra, rb) = (self.uf.find(a), self.uf.find(b));
        for r in [ra, rb] {
            if let Some(x) = self.outcome[r] {
                if x != o {
                    return false;
                }
            }
        }
        self.uf.union(ra, rb);
        let r = self.uf.find(ra);
        self.outcome[r] = Some(o);
        true
    }
}

struct Exact<'a> {
    j: &'a JointPmf,
    cells: &'a [Cell],
    ids: Vec<usize>,
    cfg: &'a NestSearchConfig,
    assign: Vec<usize>,
    nodes: u64,
    complete: bool,
    by_entropy: Vec<ScoredNesting>,
    by_nest_entropy: Vec<ScoredNesting>,
}

impl Exact<'_> {
    fn run(&mut self, i: usize, states: &mut Vec<NestState>) {
        if !self.complete {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.cfg.budget {
            self.complete = false;
            return;
        }
        if i == self.cells.len() {
            let mut nests = vec![Vec::new(); states.len()];
            for (c, &k) in self.cells.iter().zip(&self.assign) {
                nests[k].push(*c);
            }
            let s = ScoredNesting::new(Nesting { nests }, self.j);
            insert_ranked(&mut self.by_entropy, &s, self.cfg.top_k, better_entropy);
            insert_ranked(&mut self.by_nest_entropy, &s, self.cfg.top_k, better_nest_entropy);
            return;
        }
        let (a, b) = self.cells[i];
        let rows = self.j.rows();
        let k = states.len();
        for nest in 0..=k.min(self.cfg.max_nests - 1) {
            if nest == k {
                states.push(NestState::new(rows + self.j.cols()));
            }
            let saved = states[nest].clone();
            if states[nest].add(a, rows + b, self.ids[i]) {
                self.assign[i] = nest;
                self.run(i + 1, states);
            }
            states[nest] = saved;
            if nest == k {
                states.pop();
            }
        }
    }
}

fn exact_search(j: &JointPmf, f: &FunctionTable, cells: &[Cell], cfg: &NestSearchConfig) -> NestSearchResult {
    let (_, ids) = f.outcome_ids(j);
    let mut e = Exact {
        j,
        cells,
        ids: cells.iter().map(|&(a, b)| ids[a][b]).collect(),
        cfg,
        assign: vec![0; cells.len()],
        nodes: 0,
        complete: true,
        by_entropy: Vec::new(),
        by_nest_entropy: Vec::new(),
    };
    e.run(0, &mut Vec::new());
    NestSearchResult {
        mode: SearchMode::Exact,
        complete: e.complete,
        nodes: e.nodes,
        by_entropy: e.by_entropy,
        by_nest_entropy: e.by_nest_entropy,
    }
}

/// First-fit peeling: cells by decreasing mass join the first nest whose
/// components stay outcome-pure, opening a new nest otherwise.
pub fn greedy_nesting(j: &JointPmf, f: &FunctionTable) -> Nesting {
    let (_, ids) = f.outcome_ids(j);
    let mut cells = j.support();
    cells.sort_by(|&x, &y| j.mass(y.0, y.1).total_cmp(&j.mass(x.0, x.1)).then(x.cmp(&y)));
    let nodes = j.rows() + j.cols();
    let mut states: Vec<NestState> = Vec::new();
    let mut nests: Vec<Vec<Cell>> = Vec::new();
    for (a, b) in cells {
        let o = ids[a][b];
        let mut placed = false;
        for (st, nest) in states.iter_mut().zip(nests.iter_mut()) {
            let saved = st.clone();
            if st.add(a, j.rows() + b, o) {
                nest.push((a, b));
                placed = true;
                break;
            }
            *st = saved;
        }
        if !placed {
            let mut st = NestState::new(nodes);
            st.add(a, j.rows() + b, o);
            states.push(st);
            nests.push(vec![(a, b)]);
        }
    }
    Nesting::new(j, nests).expect("greedy nests partition the support")
}
