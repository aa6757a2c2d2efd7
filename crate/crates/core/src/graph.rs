//! Characteristic (confusability) graphs, power graphs, maximal independent
//! sets and minimum-entropy colorings.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::function::{class_index, FunctionTable};
use crate::label::Label;
use crate::prob::{h, JointPmf, Source};

/// Default cap on the number of maximal independent sets enumerated.
pub const DEFAULT_MIS_CAP: usize = 1_000_000;
/// Default cap on power-graph vertex count.
pub const DEFAULT_POWER_CAP: usize = 40_000;
/// Default node budget for exact coloring.
pub const DEFAULT_COLORING_BUDGET: u64 = 20_000_000;

/// Fixed-width bitset used by the search routines.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    pub(crate) fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub(crate) fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub(crate) fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub(crate) fn or(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    pub(crate) fn intersects(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

/// Which confusability rule induces the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    /// u ~ v iff some counterpart with positive mass for both gives
    /// different outcomes.
    Support,
    /// Complete multipartite graph over the equivalence classes (symbols with
    /// identical masked rows are non-adjacent, all others adjacent).
    Class,
}

/// Simple undirected graph on one source's symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct CharGraph {
    labels: Vec<Label>,
    adj: Vec<Vec<usize>>,
}

impl CharGraph {
    /// Builds a graph from an edge list; duplicate edges are merged.
    pub fn new(labels: Vec<Label>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u},{v}) out of range for {n} vertices"));
            }
            if u == v {
                return invalid(format!("self-loop at vertex {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        Ok(CharGraph { labels, adj })
    }

    /// Graph on `0..n` with integer labels.
    pub fn unlabeled(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n as i64).map(Label::Int).collect(), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges with u < v in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            for &v in a {
                if u < v {
                    e.push((u, v));
                }
            }
        }
        e
    }

    pub(crate) fn adjacency_bits(&self) -> Vec<Bits> {
        let n = self.n();
        self.adj
            .iter()
            .map(|a| {
                let mut b = Bits::new(n);
                for &v in a {
                    b.insert(v);
                }
                b
            })
            .collect()
    }

    /// Induced subgraph on `keep` (kept in the given order).
    pub fn induced(&self, keep: &[usize]) -> CharGraph {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let adj = keep
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = self.adj[v].iter().filter_map(|w| pos.get(w).copied()).collect();
                a.sort_unstable();
                a
            })
            .collect();
        CharGraph { labels, adj }
    }

    /// True when every coloring class is independent.
    pub fn is_proper(&self, colors: &[usize]) -> bool {
        colors.len() == self.n() && self.edges().iter().all(|&(u, v)| colors[u] != colors[v])
    }

    /// Edge-list text: a header line `# vertices: <labels>` then one
    /// `u v` label pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::from("# vertices:");
        for l in &self.labels {
            let _ = write!(s, " {l}");
        }
        s.push('\n');
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", self.labels[u], self.labels[v]);
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Validation("empty edge list".into()))?;
        let rest = header
            .strip_prefix("# vertices:")
            .ok_or_else(|| Error::Validation("edge list must start with '# vertices:'".into()))?;
        let labels: Vec<Label> = rest.split_whitespace().map(Label::parse).collect();
        let index: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut edges = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return invalid(format!("malformed edge line '{line}'"));
            }
            let a = Label::parse(toks[0]);
            let b = Label::parse(toks[1]);
            let (Some(&u), Some(&v)) = (index.get(&a), index.get(&b)) else {
                return invalid(format!("unknown vertex in edge line '{line}'"));
            };
            edges.push((u, v));
        }
        CharGraph::new(labels, &edges)
    }
}

/// Support-rule characteristic graph of `source`.
pub fn build_characteristic_graph(j: &JointPmf, f: &FunctionTable, source: Source) -> CharGraph {
    let (j, f) = oriented(j, f, source);
    let mut edges = Vec::new();
    for u in 0..j.rows() {
        for v in u + 1..j.rows() {
            let conflict = (0..j.cols()).any(|k| j.in_support(u, k) && j.in_support(v, k) && f.at(u, k) != f.at(v, k));
            if conflict {
                edges.push((u, v));
            }
        }
    }
    CharGraph::new(j.x1().symbols().to_vec(), &edges).expect("valid edge list")
}

/// Complete multipartite graph over the equivalence classes of `source`.
pub fn class_graph(j: &JointPmf, f: &FunctionTable, source: Source) -> CharGraph {
    let (_, idx) = class_index(f, j, source);
    let n = idx.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if idx[u] != idx[v] {
                edges.push((u, v));
            }
        }
    }
    CharGraph::new(j.alphabet(source).symbols().to_vec(), &edges).expect("valid edge list")
}

pub fn characteristic_graph(j: &JointPmf, f: &FunctionTable, source: Source, kind: GraphKind) -> CharGraph {
    match kind {
        GraphKind::Support => build_characteristic_graph(j, f, source),
        GraphKind::Class => class_graph(j, f, source),
    }
}

/// Returns (j, f) with `source` on the rows.
pub(crate) fn oriented(j: &JointPmf, f: &FunctionTable, source: Source) -> (JointPmf, FunctionTable) {
    match source {
        Source::One => (j.clone(), f.clone()),
        Source::Two => (j.transpose(), f.transpose()),
    }
}

/// n-th power of the support graph `g` of `source`, with i.i.d. tuple masses.
/// Tuples are adjacent iff every coordinate pair shares a positive-mass
/// counterpart and at least one coordinate pair is adjacent in `g`.
pub fn power_graph(g: &CharGraph, j: &JointPmf, source: Source, n: usize, cap: usize) -> Result<(CharGraph, Vec<f64>)> {
    if n == 0 {
        return invalid("power must be at least 1");
    }
    let jo = match source {
        Source::One => j.clone(),
        Source::Two => j.transpose(),
    };
    let m = g.n();
    if m != jo.rows() {
        return invalid("graph does not match the source alphabet");
    }
    let marginal = jo.marginal1();
    if n == 1 {
        return Ok((g.clone(), marginal));
    }
    let count = (m as f64).powi(n as i32);
    if count > cap as f64 {
        return Err(Error::Budget(format!("power graph would have {count} vertices (cap {cap})")));
    }
    let count = count as usize;
    let cosupported: Vec<Vec<bool>> = (0..m)
        .map(|u| (0..m).map(|v| (0..jo.cols()).any(|k| jo.in_support(u, k) && jo.in_support(v, k))).collect())
        .collect();
    let digits = |mut t: usize| {
        let mut d = vec![0; n];
        for slot in d.iter_mut().rev() {
            *slot = t % m;
            t /= m;
        }
        d
    };
    let tuples: Vec<Vec<usize>> = (0..count).map(digits).collect();
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<String> = t.iter().map(|&x| g.labels()[x].to_string()).collect();
            Label::Str(format!("({})", parts.join(",")))
        })
        .collect();
    let masses = tuples.iter().map(|t| t.iter().map(|&x| marginal[x]).product()).collect();
    let mut edges = Vec::new();
    for a in 0..count {
        for b in a + 1..count {
            let (ta, tb) = (&tuples[a], &tuples[b]);
            let all_co = ta.iter().zip(tb).all(|(&x, &y)| cosupported[x][y]);
            if all_co && ta.iter().zip(tb).any(|(&x, &y)| x != y && g.has_edge(x, y)) {
                edges.push((a, b));
            }
        }
    }
    Ok((CharGraph::new(labels, &edges)?, masses))
}

/// All maximal independent sets, each ascending, list sorted.
pub fn maximal_independent_sets(g: &CharGraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    if n == 0 {
        return Ok(vec![vec![]]);
    }
    let adj = g.adjacency_bits();
    // independent sets of g are cliques of the complement
    let non_adj: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = Bits::full(n).and_not(&adj[v]);
            b.remove(v);
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(&mut r, Bits::full(n), Bits::new(n), &non_adj, &mut out, cap)?;
    for s in out.iter_mut() {
        s.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    r: &mut Vec<usize>,
    mut p: Bits,
    mut x: Bits,
    nbr: &[Bits],
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() {
            if out.len() >= cap {
                return Err(Error::Budget(format!("more than {cap} maximal independent sets")));
            }
            out.push(r.clone());
        }
        return Ok(());
    }
    let pivot = p.or(&x).iter().max_by_key(|&u| p.and(&nbr[u]).count()).expect("nonempty");
    let candidates: Vec<usize> = p.and_not(&nbr[pivot]).iter().collect();
    for v in candidates {
        r.push(v);
        bron_kerbosch(r, p.and(&nbr[v]), x.and(&nbr[v]), nbr, out, cap)?;
        r.pop();
        p.remove(v);
        x.insert(v);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ColoringMode {
    Exact,
    Greedy,
}

/// Vertex coloring with its color-mass entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coloring {
    /// Color id per vertex, in first-appearance order over vertex indices.
    pub colors: Vec<usize>,
    pub entropy: f64,
    pub num_colors: usize,
}

fn canonical_colors(colors: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let out = colors
        .iter()
        .map(|c| {
            let next = map.len();
            *map.entry(*c).or_insert(next)
        })
        .collect();
    (out, map.len())
}

/// Entropy of the color-mass distribution.
pub fn coloring_entropy(colors: &[usize], p: &[f64]) -> f64 {
    let k = colors.iter().copied().max().map_or(0, |c| c + 1);
    let mut mass = vec![0.0; k];
    for (&c, &w) in colors.iter().zip(p) {
        mass[c] += w;
    }
    h(&mass)
}

/// Minimum-entropy proper coloring. Exact mode runs branch and bound (after
/// merging false twins) and fails with a budget error once `budget` search
/// nodes are spent; greedy mode assigns vertices by decreasing mass to the
/// heaviest compatible color.
pub fn min_entropy_coloring(g: &CharGraph, p: &[f64], mode: ColoringMode, budget: u64) -> Result<Coloring> {
    if p.len() != g.n() {
        return invalid("vertex masses do not match the graph");
    }
    if p.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return invalid("vertex masses must be nonnegative");
    }
    let raw = match mode {
        ColoringMode::Greedy => greedy_colors(&g.adjacency_bits(), p),
        ColoringMode::Exact => exact_colors(g, p, budget)?,
    };
    let (colors, num_colors) = canonical_colors(&raw);
    let entropy = coloring_entropy(&colors, p);
    Ok(Coloring { colors, entropy, num_colors })
}

fn greedy_colors(adj: &[Bits], p: &[f64]) -> Vec<usize> {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let mut members: Vec<Bits> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    let mut colors = vec![0; n];
    for v in order {
        let best = (0..members.len())
            .filter(|&c| !adj[v].intersects(&members[c]))
            .max_by(|&a, &b| mass[a].total_cmp(&mass[b]).then(b.cmp(&a)));
        let c = match best {
            Some(c) => c,
            None => {
                members.push(Bits::new(n));
                mass.push(0.0);
                members.len() - 1
            }
        };
        members[c].insert(v);
        mass[c] += p[v];
        colors[v] = c;
    }
    colors
}

/// Entropy lower bound: all unassigned mass joins the heaviest color.
fn merged_bound(mass: &[f64], rest: f64) -> f64 {
    if mass.is_empty() {
        return 0.0;
    }
    let (imax, _) = mass.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
    let mut s = 0.0;
    for (i, &m) in mass.iter().enumerate() {
        let w = if i == imax { m + rest } else { m };
        if w > 0.0 {
            s -= w * w.log2();
        }
    }
    s
}

struct Search<'a> {
    adj: &'a [Bits],
    w: &'a [f64],
    suffix: Vec<f64>,
    members: Vec<Bits>,
    mass: Vec<f64>,
    assign: Vec<usize>,
    best_val: f64,
    best: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

const TIE_EPS: f64 = 1e-12;

impl Search<'_> {
    fn run(&mut self, v: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!("exact coloring exceeded {} search nodes", self.budget)));
        }
        let n = self.adj.len();
        if v == n {
            let val = h(&self.mass);
            if val < self.best_val - TIE_EPS {
                self.best_val = val;
                self.best = Some(self.assign.clone());
            }
            return Ok(());
        }
        let k = self.members.len();
        for c in 0..=k {
            if c < k && self.adj[v].intersects(&self.members[c]) {
                continue;
            }
            if c == k {
                self.members.push(Bits::new(n));
                self.mass.push(0.0);
            }
            self.members[c].insert(v);
            self.mass[c] += self.w[v];
            self.assign[v] = c;
            let bound = merged_bound(&self.mass, self.suffix[v + 1]);
            let r = if bound < self.best_val - TIE_EPS { self.run(v + 1) } else { Ok(()) };
            self.members[c].remove(v);
            self.mass[c] -= self.w[v];
            if c == k {
                self.members.pop();
                self.mass.pop();
            }
            r?;
        }
        Ok(())
    }
}

fn exact_colors(g: &CharGraph, p: &[f64], budget: u64) -> Result<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return Ok(vec![]);
    }
    let adj = g.adjacency_bits();
    let positive: Vec<usize> = (0..n).filter(|&v| p[v] > 0.0).collect();
    // Merge false twins among positive-mass vertices: moving a twin into its
    // partner's class keeps the coloring proper and the heavier side never
    // loses entropy.
    let mut group_of: HashMap<&Bits, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &positive {
        let g_id = *group_of.entry(&adj[v]).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g_id].push(v);
    }
    let m = groups.len();
    let mut q_adj = vec![Bits::new(m); m];
    for a in 0..m {
        for b in 0..m {
            if adj[groups[a][0]].contains(groups[b][0]) {
                q_adj[a].insert(b);
            }
        }
    }
    let w: Vec<f64> = groups.iter().map(|gr| gr.iter().map(|&v| p[v]).sum()).collect();
    let mut suffix = vec![0.0; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + w[i];
    }
    let seed = greedy_colors(&q_adj, &w);
    let seed_val = coloring_entropy(&canonical_colors(&seed).0, &w);
    let mut s = Search {
        adj: &q_adj,
        w: &w,
        suffix,
        members: Vec::new(),
        mass: Vec::new(),
        assign: vec![0; m],
        best_val: seed_val + 1e-9,
        best: None,
        nodes: 0,
        budget,
    };
    s.run(0)?;
    let q_colors = s.best.unwrap_or(seed);
    let mut colors = vec![usize::MAX; n];
    for (gi, gr) in groups.iter().enumerate() {
        for &v in gr {
            colors[v] = q_colors[gi];
        }
    }
    // zero-mass vertices take the first compatible color
    let mut k = q_colors.iter().copied().max().map_or(0, |c| c + 1);
    for v in 0..n {
        if colors[v] != usize::MAX {
            continue;
        }
        let c = (0..k)
            .find(|&c| !(0..n).any(|u| colors[u] == c && adj[v].contains(u)))
            .unwrap_or_else(|| {
                k += 1;
                k - 1
            });
        colors[v] = c;
    }
    Ok(colors)
}

/// (1/n) times the minimum coloring entropy of the n-th power of the support
/// graph of `source`.
pub fn chromatic_entropy_rate(j: &JointPmf, f: &FunctionTable, source: Source, n: usize, budget: u64) -> Result<f64> {
    let g = build_characteristic_graph(j, f, source);
    let (pg, masses) = power_graph(&g, j, source, n, DEFAULT_POWER_CAP)?;
    let c = min_entropy_coloring(&pg, &masses, ColoringMode::Exact, budget)?;
    Ok(c.entropy / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{build_from_rule, Rule};
    use crate::label::Alphabet;
    use crate::prob::PmfVector;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn example1() -> (JointPmf, FunctionTable) {
        let a = Alphabet::range(-2, 2);
        let u = PmfVector::uniform(5);
        let j = JointPmf::product(a.clone(), u.probs(), a, u.probs()).unwrap();
        let f = build_from_rule(Rule::AbsSum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        (j, f)
    }

    fn complete(n: usize) -> CharGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        CharGraph::unlabeled(n, &e).unwrap()
    }

    #[test]
    fn example1_graph_is_complete_tripartite() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        // classes {-2,2}, {-1,1}, {0} at indices {0,4}, {1,3}, {2}
        assert!(!g.has_edge(0, 4));
        assert!(!g.has_edge(1, 3));
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && g.has_edge(1, 2) && g.has_edge(3, 4));
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g, class_graph(&j, &f, Source::One));
        let mis = maximal_independent_sets(&g, DEFAULT_MIS_CAP).unwrap();
        assert_eq!(mis, vec![vec![0, 4], vec![1, 3], vec![2]]);
    }

    #[test]
    fn identity_and_constant_graphs() {
        let (j, _) = example1();
        let id = build_from_rule(Rule::Identity, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        assert_eq!(build_characteristic_graph(&j, &id, Source::One).edge_count(), 10);
        let constant = crate::function::FunctionTable::from_outcomes(
            Rule::Table,
            j.x1().clone(),
            j.x2().clone(),
            vec![vec![Some(Label::Int(0)); 5]; 5],
        )
        .unwrap();
        assert_eq!(build_characteristic_graph(&j, &constant, Source::Two).edge_count(), 0);
    }

    #[test]
    fn mis_of_trivial_graphs() {
        assert_eq!(maximal_independent_sets(&complete(4), 100).unwrap().len(), 4);
        let empty = CharGraph::unlabeled(5, &[]).unwrap();
        assert_eq!(maximal_independent_sets(&empty, 100).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
        // a path 0-1-2-3 has MIS {0,2}, {0,3}, {1,3}
        let path = CharGraph::unlabeled(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(maximal_independent_sets(&path, 100).unwrap(), vec![vec![0, 2], vec![0, 3], vec![1, 3]]);
        assert!(maximal_independent_sets(&path, 2).is_err());
    }

    #[test]
    fn coloring_examples() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        let c = min_entropy_coloring(&g, &[0.2; 5], ColoringMode::Exact, DEFAULT_COLORING_BUDGET).unwrap();
        assert_eq!(c.num_colors, 3);
        assert!(close(c.entropy, 1.5219, 5e-4));
        let empty = CharGraph::unlabeled(3, &[]).unwrap();
        let c = min_entropy_coloring(&empty, &[0.2, 0.3, 0.5], ColoringMode::Exact, 1000).unwrap();
        assert_eq!((c.num_colors, c.entropy), (1, 0.0));
        let c = min_entropy_coloring(&complete(3), &[0.5, 0.25, 0.25], ColoringMode::Exact, 1000).unwrap();
        assert!(close(c.entropy, 1.5, 1e-12));
    }

    #[test]
    fn exact_prefers_heavy_merge() {
        // path a-b-c: {a,c} merge gives (0.8, 0.2) vs (0.4+0.4 split)
        let path = CharGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let c = min_entropy_coloring(&path, &[0.4, 0.2, 0.4], ColoringMode::Exact, 1000).unwrap();
        assert_eq!(c.colors, vec![0, 1, 0]);
    }

    #[test]
    fn exact_budget_is_enforced() {
        let g = CharGraph::unlabeled(12, &[(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let p: Vec<f64> = (1..=12).map(|i| i as f64 / 78.0).collect();
        assert!(matches!(min_entropy_coloring(&g, &p, ColoringMode::Exact, 3), Err(Error::Budget(_))));
    }

    #[test]
    fn zero_mass_vertices_get_valid_colors() {
        let g = CharGraph::unlabeled(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let c = min_entropy_coloring(&g, &[0.5, 0.0, 0.5, 0.0], ColoringMode::Exact, 1000).unwrap();
        assert!(g.is_proper(&c.colors));
        assert_eq!(c.entropy, 0.0);
    }

    #[test]
    fn power_graph_example1() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        let (p1, _) = power_graph(&g, &j, Source::One, 1, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(p1, g);
        let (p2, masses) = power_graph(&g, &j, Source::One, 2, DEFAULT_POWER_CAP).unwrap();
        assert_eq!(p2.n(), 25);
        assert!(close(masses.iter().sum::<f64>(), 1.0, 1e-12));
        // class tuple of x (index) is (class(x0), class(x1)); oracle by definition
        let class = [0, 1, 2, 1, 0];
        for a in 0..25 {
            for b in 0..25 {
                if a == b {
                    continue;
                }
                let differ = class[a / 5] != class[b / 5] || class[a % 5] != class[b % 5];
                assert_eq!(p2.has_edge(a, b), differ, "tuples {a} {b}");
            }
        }
        assert!(power_graph(&g, &j, Source::One, 7, DEFAULT_POWER_CAP).is_err());
    }

    #[test]
    fn chromatic_rate_example1() {
        let (j, f) = example1();
        let r1 = chromatic_entropy_rate(&j, &f, Source::One, 1, DEFAULT_COLORING_BUDGET).unwrap();
        let r2 = chromatic_entropy_rate(&j, &f, Source::One, 2, DEFAULT_COLORING_BUDGET).unwrap();
        assert!(close(r1, 1.5219, 5e-4));
        assert!(r2 <= r1 + 1e-12);
    }

    #[test]
    fn edge_list_round_trip() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        let text = g.to_edge_list();
        assert!(text.starts_with("# vertices: -2 -1 0 1 2\n"));
        assert_eq!(CharGraph::from_edge_list(&text).unwrap(), g);
        assert!(CharGraph::from_edge_list("0 1\n").is_err());
    }

    #[test]
    fn self_loops_rejected() {
        assert!(CharGraph::unlabeled(2, &[(1, 1)]).is_err());
    }
}
