//! The bipartite function graph G_f on equivalence classes and the three
//! helper schemes built on it: bipartition index K_B, low-probability edge
//! indicators K_δ and structure split K_S.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::{class_index, FunctionTable};
use crate::graph::{min_entropy_coloring, CharGraph, ColoringMode, DEFAULT_COLORING_BUDGET};
use crate::label::Label;
use crate::prob::{h, h_normalized, JointPmf, PmfVector, Source, PROB_TOLERANCE};

/// Edge of G_f between class `u` of X1 and class `v` of X2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfEdge {
    pub u: usize,
    pub v: usize,
    pub mass: f64,
    pub outcome: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfGraph {
    u_classes: Vec<Vec<usize>>,
    v_classes: Vec<Vec<usize>>,
    u_of: Vec<usize>,
    v_of: Vec<usize>,
    u_labels: Vec<Label>,
    v_labels: Vec<Label>,
    u_mass: Vec<f64>,
    v_mass: Vec<f64>,
    edges: Vec<GfEdge>,
}

/// JSON export: class-aggregated pmf plus class membership and edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfJson {
    pub x1: Vec<Label>,
    pub x2: Vec<Label>,
    pub p: Vec<Vec<f64>>,
    pub u_classes: Vec<Vec<Label>>,
    pub v_classes: Vec<Vec<Label>>,
    pub edges: Vec<GfEdge>,
}

/// Builds G_f. Nodes are the equivalence classes of each source; an edge
/// carries the aggregated mass of its cells and their common outcome.
pub fn build_gf(j: &JointPmf, f: &FunctionTable) -> Result<GfGraph> {
    let (u_classes, u_of) = class_index(f, j, Source::One);
    let (v_classes, v_of) = class_index(f, j, Source::Two);
    let mut mass = vec![vec![0.0; v_classes.len()]; u_classes.len()];
    let mut outcome: Vec<Vec<Option<&Label>>> = vec![vec![None; v_classes.len()]; u_classes.len()];
    for (a, b) in j.support() {
        let (u, v) = (u_of[a], v_of[b]);
        let o = f.at(a, b);
        match outcome[u][v] {
            Some(prev) if prev != o => {
                return Err(Error::Inconsistency(format!(
                    "edge ({u},{v}) of G_f carries outcomes {prev} and {o} (cell ({}, {}))",
                    j.x1().get(a),
                    j.x2().get(b)
                )))
            }
            _ => outcome[u][v] = Some(o),
        }
        mass[u][v] += j.mass(a, b);
    }
    let mut edges = Vec::new();
    for u in 0..u_classes.len() {
        for v in 0..v_classes.len() {
            if let Some(o) = outcome[u][v] {
                edges.push(GfEdge { u, v, mass: mass[u][v], outcome: o.clone() });
            }
        }
    }
    let m1 = j.marginal1();
    let m2 = j.marginal2();
    Ok(GfGraph {
        u_labels: u_classes.iter().map(|c| j.x1().get(c[0]).clone()).collect(),
        v_labels: v_classes.iter().map(|c| j.x2().get(c[0]).clone()).collect(),
        u_mass: u_classes.iter().map(|c| c.iter().map(|&a| m1[a]).sum()).collect(),
        v_mass: v_classes.iter().map(|c| c.iter().map(|&b| m2[b]).sum()).collect(),
        u_classes,
        v_classes,
        u_of,
        v_of,
        edges,
    })
}

impl GfGraph {
    pub fn edges(&self) -> &[GfEdge] {
        &self.edges
    }

    pub fn u_count(&self) -> usize {
        self.u_classes.len()
    }

    pub fn v_count(&self) -> usize {
        self.v_classes.len()
    }

    pub fn classes(&self, s: Source) -> &[Vec<usize>] {
        match s {
            Source::One => &self.u_classes,
            Source::Two => &self.v_classes,
        }
    }

    /// Class id of every symbol of `s`.
    pub fn class_of(&self, s: Source) -> &[usize] {
        match s {
            Source::One => &self.u_of,
            Source::Two => &self.v_of,
        }
    }

    pub fn class_masses(&self, s: Source) -> &[f64] {
        match s {
            Source::One => &self.u_mass,
            Source::Two => &self.v_mass,
        }
    }

    pub fn class_labels(&self, s: Source) -> &[Label] {
        match s {
            Source::One => &self.u_labels,
            Source::Two => &self.v_labels,
        }
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search_by(|e| (e.u, e.v).cmp(&(u, v))).ok()
    }

    /// Edge carrying support cell (a, b).
    pub fn edge_of_cell(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index(self.u_of[a], self.v_of[b])
    }

    /// Connected components over the given edge subset, as sorted edge-index
    /// lists ordered by smallest edge.
    pub fn components_of(&self, edge_ids: &[usize]) -> Vec<Vec<usize>> {
        let nu = self.u_count();
        let mut uf = UnionFind::<usize>::new(nu + self.v_count());
        for &e in edge_ids {
            uf.union(self.edges[e].u, nu + self.edges[e].v);
        }
        let mut ids = edge_ids.to_vec();
        ids.sort_unstable();
        let mut roots: Vec<usize> = Vec::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for e in ids {
            let r = uf.find(self.edges[e].u);
            match roots.iter().position(|&x| x == r) {
                Some(i) => out[i].push(e),
                None => {
                    roots.push(r);
                    out.push(vec![e]);
                }
            }
        }
        out
    }

    pub fn mass_of(&self, edge_ids: &[usize]) -> f64 {
        edge_ids.iter().map(|&e| self.edges[e].mass).sum()
    }

    /// Support cells of `j` lying on each edge group.
    pub fn cell_groups(&self, j: &JointPmf, pieces: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
        let mut piece_of = vec![usize::MAX; self.edges.len()];
        for (k, p) in pieces.iter().enumerate() {
            for &e in p {
                piece_of[e] = k;
            }
        }
        let mut groups = vec![Vec::new(); pieces.len()];
        for (a, b) in j.support() {
            let e = self.edge_of_cell(a, b).expect("support cell has an edge");
            if piece_of[e] != usize::MAX {
                groups[piece_of[e]].push((a, b));
            }
        }
        groups
    }

    /// Resolves [u-class-id, v-class-id] pairs to edge indices.
    pub fn resolve_peel(&self, peel: &[(usize, usize)]) -> Result<Vec<usize>> {
        let mut ids = Vec::with_capacity(peel.len());
        for &(u, v) in peel {
            match self.edge_index(u, v) {
                Some(e) if !ids.contains(&e) => ids.push(e),
                Some(_) => return invalid(format!("edge ({u},{v}) listed twice in the peel set")),
                None => return invalid(format!("peel edge ({u},{v}) is not an edge of G_f")),
            }
        }
        Ok(ids)
    }

    /// Every edge lighter than `threshold`, as class-id pairs.
    pub fn peel_below(&self, threshold: f64) -> Vec<(usize, usize)> {
        self.edges.iter().filter(|e| e.mass < threshold).map(|e| (e.u, e.v)).collect()
    }

    pub fn to_json(&self, j: &JointPmf) -> GfJson {
        let mut p = vec![vec![0.0; self.v_count()]; self.u_count()];
        for e in &self.edges {
            p[e.u][e.v] = e.mass;
        }
        let names = |classes: &[Vec<usize>], s: Source| {
            classes.iter().map(|c| c.iter().map(|&x| j.alphabet(s).get(x).clone()).collect()).collect()
        };
        GfJson {
            x1: self.u_labels.clone(),
            x2: self.v_labels.clone(),
            p,
            u_classes: names(&self.u_classes, Source::One),
            v_classes: names(&self.v_classes, Source::Two),
            edges: self.edges.clone(),
        }
    }
}

/// Edge-disjoint pieces of G_f indexed by a helper variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfDecomposition {
    /// Edge indices of each piece.
    pub pieces: Vec<Vec<usize>>,
    pub masses: Vec<f64>,
}

impl GfDecomposition {
    fn new(g: &GfGraph, pieces: Vec<Vec<usize>>) -> Self {
        let masses = pieces.iter().map(|p| g.mass_of(p)).collect();
        GfDecomposition { pieces, masses }
    }
}

/// Helper, per-source and total rates of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumRateReport {
    pub scheme: String,
    pub helper_rate: f64,
    pub source_rates: [f64; 2],
    pub total: f64,
}

impl SumRateReport {
    pub fn new(scheme: impl Into<String>, helper_rate: f64, source_rates: [f64; 2]) -> Self {
        SumRateReport { scheme: scheme.into(), helper_rate, source_rates, total: helper_rate + source_rates[0] + source_rates[1] }
    }
}

/// Connected components of G_f (the bipartitions) and H(K_B).
pub fn bipartition_scheme(g: &GfGraph) -> (GfDecomposition, f64) {
    let all: Vec<usize> = (0..g.edges.len()).collect();
    let d = GfDecomposition::new(g, g.components_of(&all));
    let hk = h(&d.masses);
    (d, hk)
}

/// R_S, R_J and R_Δ for a uniform-within-bipartition model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformSumRates {
    pub r_s: f64,
    pub r_j: f64,
    pub r_delta: f64,
    pub h_kb: f64,
    /// Whether R_Δ ≤ H(K_B) holds for this input.
    pub bound_holds: bool,
}

/// R_S = 2 log n, R_J = 2 Σ p_k log n_k + H(p), R_Δ = R_S − R_J.
pub fn uniform_sum_rates(n: usize, sizes: &[usize], probs: &PmfVector) -> Result<UniformSumRates> {
    if sizes.len() != probs.len() {
        return invalid(format!("{} sizes but {} probabilities", sizes.len(), probs.len()));
    }
    if sizes.iter().any(|&s| s == 0) {
        return invalid("bipartition sizes must be positive");
    }
    if sizes.iter().sum::<usize>() != n {
        return invalid(format!("bipartition sizes sum to {}, not {n}", sizes.iter().sum::<usize>()));
    }
    let r_s = 2.0 * (n as f64).log2();
    let h_kb = probs.entropy();
    let r_j = 2.0 * sizes.iter().zip(probs.probs()).map(|(&s, &p)| p * (s as f64).log2()).sum::<f64>() + h_kb;
    let r_delta = r_s - r_j;
    Ok(UniformSumRates { r_s, r_j, r_delta, h_kb, bound_holds: r_delta <= h_kb + 1e-9 })
}

/// How peeled edges are grouped into helper indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeelGrouping {
    /// Edges with u < v, u > v and u = v (class ids) form three groups.
    Symmetric,
    /// One indicator for all peeled edges.
    Single,
    /// Explicit groups of [u, v] class-id pairs.
    Custom(Vec<Vec<(usize, usize)>>),
}

/// Source encoding shared by the K_δ and K_S schemes: given the helper piece,
/// one source sends a coloring of its classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelperSourceCode {
    /// Per source: every class carries one outcome within each piece.
    pub sufficient: [bool; 2],
    /// Per source: entropy of the min-entropy coloring of the class conflict
    /// graph (classes that co-occur in a piece with different outcomes).
    pub source_rate: [Option<f64>; 2],
    /// Per source: color of each class.
    pub colors: [Option<Vec<usize>>; 2],
}

impl HelperSourceCode {
    /// Cheapest sufficient source and its rate.
    pub fn best(&self) -> Option<(Source, f64)> {
        let mut best: Option<(Source, f64)> = None;
        for s in [Source::One, Source::Two] {
            if let Some(r) = self.source_rate[s.index()] {
                if best.is_none_or(|(_, b)| r < b - 1e-12) {
                    best = Some((s, r));
                }
            }
        }
        best
    }
}

fn endpoint(e: &GfEdge, s: Source) -> usize {
    match s {
        Source::One => e.u,
        Source::Two => e.v,
    }
}

pub(crate) fn helper_source_code(g: &GfGraph, pieces: &[Vec<usize>]) -> Result<HelperSourceCode> {
    let mut sufficient = [true; 2];
    let mut source_rate = [None, None];
    let mut colors = [None, None];
    for s in [Source::One, Source::Two] {
        let n = g.classes(s).len();
        let mut conflicts = Vec::new();
        for piece in pieces {
            let mut outcome: Vec<Option<&Label>> = vec![None; n];
            for &e in piece {
                let x = endpoint(&g.edges[e], s);
                match outcome[x] {
                    Some(o) if o != &g.edges[e].outcome => sufficient[s.index()] = false,
                    _ => outcome[x] = Some(&g.edges[e].outcome),
                }
            }
            for a in 0..n {
                for b in a + 1..n {
                    if let (Some(x), Some(y)) = (outcome[a], outcome[b]) {
                        if x != y {
                            conflicts.push((a, b));
                        }
                    }
                }
            }
        }
        if sufficient[s.index()] {
            let cg = CharGraph::new(g.class_labels(s).to_vec(), &conflicts)?;
            let c = min_entropy_coloring(&cg, g.class_masses(s), ColoringMode::Exact, DEFAULT_COLORING_BUDGET)?;
            source_rate[s.index()] = Some(c.entropy);
            colors[s.index()] = Some(c.colors);
        }
    }
    Ok(HelperSourceCode { sufficient, source_rate, colors })
}

/// K_δ scheme evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KDeltaScheme {
    /// Edge indices of each indicator group.
    pub groups: Vec<Vec<usize>>,
    /// H(K_δ) = Σ_groups h(edge masses in the group, 1 − group mass).
    pub h_kdelta: f64,
    /// Entropy of a single indicator over all peeled edges.
    pub joint_indicator_entropy: f64,
    /// Residual components after removing the peeled edges.
    pub residual: Vec<Vec<usize>>,
    /// Residual has at least two components.
    pub disconnects: bool,
    /// Helper pieces: residual edges, then each peeled edge.
    pub decomposition: GfDecomposition,
    pub source_code: HelperSourceCode,
    /// H(K_δ) plus the cheapest sufficient source rate.
    pub total: Option<f64>,
}

fn indicator_entropy(g: &GfGraph, group: &[usize]) -> f64 {
    let mut w: Vec<f64> = group.iter().map(|&e| g.edges[e].mass).collect();
    w.push((1.0 - w.iter().sum::<f64>()).max(0.0));
    h(&w)
}

pub fn low_prob_edge_scheme(g: &GfGraph, peel: &[(usize, usize)], grouping: &PeelGrouping) -> Result<KDeltaScheme> {
    let ids = g.resolve_peel(peel)?;
    let groups: Vec<Vec<usize>> = match grouping {
        PeelGrouping::Symmetric => {
            let mut three = [Vec::new(), Vec::new(), Vec::new()];
            for &e in &ids {
                let (u, v) = (g.edges[e].u, g.edges[e].v);
                three[if u < v { 0 } else if u > v { 1 } else { 2 }].push(e);
            }
            three.into_iter().filter(|x| !x.is_empty()).collect()
        }
        PeelGrouping::Single => {
            if ids.is_empty() {
                vec![]
            } else {
                vec![ids.clone()]
            }
        }
        PeelGrouping::Custom(custom) => {
            let groups: Vec<Vec<usize>> = custom.iter().map(|c| g.resolve_peel(c)).collect::<Result<_>>()?;
            let mut flat: Vec<usize> = groups.concat();
            flat.sort_unstable();
            let mut want = ids.clone();
            want.sort_unstable();
            if flat != want {
                return invalid("custom peel groups must partition the peel set");
            }
            groups
        }
    };
    let h_kdelta = groups.iter().map(|gr| indicator_entropy(g, gr)).fold(0.0, |a, b| a + b);
    let joint_indicator_entropy = indicator_entropy(g, &ids);
    let rest: Vec<usize> = (0..g.edges.len()).filter(|e| !ids.contains(e)).collect();
    let residual = g.components_of(&rest);
    let mut pieces = vec![rest];
    pieces.extend(ids.iter().map(|&e| vec![e]));
    let source_code = helper_source_code(g, &pieces)?;
    let total = source_code.best().map(|(_, r)| h_kdelta + r);
    Ok(KDeltaScheme {
        groups,
        h_kdelta,
        joint_indicator_entropy,
        disconnects: residual.len() >= 2,
        residual,
        decomposition: GfDecomposition::new(g, pieces),
        source_code,
        total,
    })
}

/// K_S scheme evaluation: C_1 = unpeeled edges, C_2 = peeled edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsScheme {
    pub decomposition: GfDecomposition,
    /// h(mass of C_2).
    pub h_ks: f64,
    /// piece_rates[piece][source]: entropy of the piece's components over
    /// that source's classes, full marginal masses renormalized.
    pub piece_rates: [[f64; 2]; 2],
    /// piece_sufficient[piece][source]: the source's class alone fixes the
    /// outcome inside the piece.
    pub piece_sufficient: [[bool; 2]; 2],
    pub source_code: HelperSourceCode,
    pub total: Option<f64>,
}

fn piece_rate(g: &GfGraph, piece: &[usize], s: Source) -> f64 {
    let masses: Vec<f64> = g
        .components_of(piece)
        .iter()
        .map(|comp| {
            let mut xs: Vec<usize> = comp.iter().map(|&e| endpoint(&g.edges[e], s)).collect();
            xs.sort_unstable();
            xs.dedup();
            xs.iter().map(|&x| g.class_masses(s)[x]).sum()
        })
        .collect();
    h_normalized(&masses)
}

fn piece_is_sufficient(g: &GfGraph, piece: &[usize], s: Source) -> bool {
    let n = g.classes(s).len();
    let mut outcome: Vec<Option<&Label>> = vec![None; n];
    for &e in piece {
        let x = endpoint(&g.edges[e], s);
        match outcome[x] {
            Some(o) if o != &g.edges[e].outcome => return false,
            _ => outcome[x] = Some(&g.edges[e].outcome),
        }
    }
    true
}

pub fn structure_split_scheme(g: &GfGraph, peel: &[(usize, usize)]) -> Result<KsScheme> {
    let c2 = g.resolve_peel(peel)?;
    let c1: Vec<usize> = (0..g.edges.len()).filter(|e| !c2.contains(e)).collect();
    let mut c2_sorted = c2.clone();
    c2_sorted.sort_unstable();
    let decomposition = GfDecomposition::new(g, vec![c1, c2_sorted]);
    let h_ks = h(&[decomposition.masses[0].max(0.0), decomposition.masses[1]]);
    let mut piece_rates = [[0.0; 2]; 2];
    let mut piece_sufficient = [[true; 2]; 2];
    for (k, piece) in decomposition.pieces.iter().enumerate() {
        for s in [Source::One, Source::Two] {
            piece_rates[k][s.index()] = piece_rate(g, piece, s);
            piece_sufficient[k][s.index()] = piece_is_sufficient(g, piece, s);
        }
    }
    let source_code = helper_source_code(g, &decomposition.pieces)?;
    let total = source_code.best().map(|(_, r)| h_ks + r);
    Ok(KsScheme { decomposition, h_ks, piece_rates, piece_sufficient, source_code, total })
}

/// Edge masses agree with the class-aggregated pmf and sum to one.
pub fn check_conservation(g: &GfGraph, j: &JointPmf) -> bool {
    let total: f64 = g.edges.iter().map(|e| e.mass).sum();
    let cells_ok = g.edges.iter().all(|e| {
        let m: f64 = j
            .support()
            .into_iter()
            .filter(|&(a, b)| g.u_of[a] == e.u && g.v_of[b] == e.v)
            .map(|(a, b)| j.mass(a, b))
            .sum();
        (m - e.mass).abs() <= PROB_TOLERANCE
    });
    cells_ok && (total - 1.0).abs() <= PROB_TOLERANCE
}
