//! Körner graph entropy, conditional graph entropy and joint-graph-entropy
//! brackets.
//!
//! Both entropies are computed by one alternating minimization. With `r(w|y)`
//! fixed, the best channel is `q(w|x) ∝ exp(Σ_y p(y|x) ln r(w|y))` over the
//! maximal independent sets `w ∋ x`; with `q` fixed, `r(w|y)` is the induced
//! conditional marginal. The Körner case is the same loop with a single `y`.
//! The reduced objective `F(r) = -Σ_x p(x) ln Z_x(r)` is convex, and its
//! linearization over the simplices gives the certified gap
//! `Σ_y p(y) (max_w r_new(w|y)/r(w|y) - 1)` (nats).

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::function::{class_index, function_entropy, FunctionTable};
use crate::graph::{build_characteristic_graph, characteristic_graph, maximal_independent_sets, CharGraph, GraphKind};
use crate::prob::{h, h_normalized, JointPmf, Source, PROB_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative change in the objective below which iteration stops.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Stop immediately once the certified gap (bits) drops below this.
    pub gap_tol: f64,
    /// Largest gap (bits) accepted when stopping on relative change or at
    /// the iteration cap.
    pub gap_limit: f64,
    pub mis_cap: usize,
    /// Use the closed forms for partition-structured instances.
    pub fast_paths: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-10,
            max_iter: 10_000,
            gap_tol: 1e-10,
            gap_limit: 1e-6,
            mis_cap: crate::graph::DEFAULT_MIS_CAP,
            fast_paths: true,
        }
    }
}

/// Value of a graph-entropy computation with solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    pub value: f64,
    /// Certified upper bound on `value - optimum` (bits); 0 on fast paths.
    pub gap: f64,
    pub iterations: usize,
    pub fast_path: bool,
    pub independent_sets: usize,
}

impl SolverReport {
    fn exact(value: f64, sets: usize) -> Self {
        SolverReport { value, gap: 0.0, iterations: 0, fast_path: true, independent_sets: sets }
    }
}

fn check_pmf(p: &[f64]) -> Result<()> {
    if p.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return invalid("vertex masses must be nonnegative");
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOLERANCE {
        return invalid(format!("vertex masses sum to {s}, not 1"));
    }
    Ok(())
}

/// True when the sets are pairwise disjoint and cover `0..n`.
fn is_partition(sets: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for s in sets {
        for &v in s {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

/// Körner graph entropy H_G(X) for vertex masses `p`.
pub fn koerner_entropy(g: &CharGraph, p: &[f64]) -> Result<f64> {
    Ok(koerner_entropy_report(g, p, &SolverConfig::default())?.value)
}

pub fn koerner_entropy_report(g: &CharGraph, p: &[f64], cfg: &SolverConfig) -> Result<SolverReport> {
    if p.len() != g.n() {
        return invalid("vertex masses do not match the graph");
    }
    check_pmf(p)?;
    let column: Vec<Vec<f64>> = p.iter().map(|&w| vec![w]).collect();
    solve(g, &column, cfg)
}

/// Conditional graph entropy H_G(X_s | X_other), where `g` is a graph on the
/// alphabet of `source`.
pub fn conditional_graph_entropy(g: &CharGraph, j: &JointPmf, source: Source) -> Result<f64> {
    Ok(conditional_graph_entropy_report(g, j, source, &SolverConfig::default())?.value)
}

pub fn conditional_graph_entropy_report(
    g: &CharGraph,
    j: &JointPmf,
    source: Source,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let m = match source {
        Source::One => j.matrix().to_vec(),
        Source::Two => j.transpose().matrix().to_vec(),
    };
    if m.len() != g.n() {
        return invalid("graph does not match the source alphabet");
    }
    solve(g, &m, cfg)
}

/// Core solver over a joint matrix `p[x][y]` with X on the graph's vertices.
fn solve(g: &CharGraph, p: &[Vec<f64>], cfg: &SolverConfig) -> Result<SolverReport> {
    let px: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let keep: Vec<usize> = (0..g.n()).filter(|&x| px[x] > 0.0).collect();
    let sub = g.induced(&keep);
    let p: Vec<&Vec<f64>> = keep.iter().map(|&x| &p[x]).collect();
    let px: Vec<f64> = keep.iter().map(|&x| px[x]).collect();
    let n = keep.len();
    let ny = p.first().map_or(0, |r| r.len());
    let py: Vec<f64> = (0..ny).map(|y| p.iter().map(|r| r[y]).sum()).collect();
    let sets = maximal_independent_sets(&sub, cfg.mis_cap)?;
    let ns = sets.len();

    if cfg.fast_paths && ns == 1 {
        return Ok(SolverReport::exact(0.0, 1));
    }
    if cfg.fast_paths && is_partition(&sets, n) {
        // W is a function of X: the value is H(W | Y)
        let mut set_of = vec![0; n];
        for (w, s) in sets.iter().enumerate() {
            for &x in s {
                set_of[x] = w;
            }
        }
        let mut value = 0.0;
        for y in 0..ny {
            if py[y] <= 0.0 {
                continue;
            }
            let mut mass = vec![0.0; ns];
            for x in 0..n {
                mass[set_of[x]] += p[x][y];
            }
            value += py[y] * h_normalized(&mass);
        }
        return Ok(SolverReport::exact(value, ns));
    }

    let mut sets_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (w, s) in sets.iter().enumerate() {
        for &x in s {
            sets_of[x].push(w);
        }
    }
    // p(y|x) over the y with positive mass, and p(x|y)
    let ys_of: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|x| (0..ny).filter(|&y| p[x][y] > 0.0).map(|y| (y, p[x][y] / px[x])).collect())
        .collect();

    // q uniform over the sets containing x
    let mut q: Vec<Vec<f64>> = sets_of.iter().map(|ws| vec![1.0 / ws.len() as f64; ws.len()]).collect();
    let mut r = induced_r(&q, &sets_of, &ys_of, &px, &py, ns, ny);

    let mut prev_f = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut gap = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        // optimal channel for r
        let mut f_val = 0.0;
        for x in 0..n {
            let c: Vec<f64> = sets_of[x]
                .iter()
                .map(|&w| {
                    ys_of[x]
                        .iter()
                        .map(|&(y, pyx)| if r[w][y] > 0.0 { pyx * r[w][y].ln() } else { f64::NEG_INFINITY })
                        .sum()
                })
                .collect();
            let cmax = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = c.iter().map(|&v| (v - cmax).exp()).sum();
            let ln_z = cmax + z.ln();
            for (qi, &ci) in q[x].iter_mut().zip(&c) {
                *qi = (ci - ln_z).exp();
            }
            f_val -= px[x] * ln_z;
        }
        let r_new = induced_r(&q, &sets_of, &ys_of, &px, &py, ns, ny);
        gap = 0.0;
        for y in 0..ny {
            if py[y] <= 0.0 {
                continue;
            }
            let mut worst: f64 = 0.0;
            for w in 0..ns {
                if r[w][y] > 0.0 {
                    worst = worst.max(r_new[w][y] / r[w][y]);
                }
            }
            gap += py[y] * (worst - 1.0).max(0.0);
        }
        gap /= std::f64::consts::LN_2;
        let value = objective(&q, &r_new, &sets_of, &ys_of, &px);
        if value.is_finite() {
            best = best.min(value.max(0.0));
        }
        let f_bits = f_val / std::f64::consts::LN_2;
        let rel = (prev_f - f_bits).abs() / f_bits.abs().max(1.0);
        prev_f = f_bits;
        r = r_new;
        if gap <= cfg.gap_tol || (rel < cfg.rel_tol && gap <= cfg.gap_limit) {
            return Ok(SolverReport { value: best, gap, iterations: it, fast_path: false, independent_sets: ns });
        }
    }
    if gap <= cfg.gap_limit {
        return Ok(SolverReport { value: best, gap, iterations: cfg.max_iter, fast_path: false, independent_sets: ns });
    }
    Err(Error::NonConvergence { best, gap, iterations: cfg.max_iter })
}

/// r(w|y) = Σ_x p(x|y) q(w|x).
fn induced_r(
    q: &[Vec<f64>],
    sets_of: &[Vec<usize>],
    ys_of: &[Vec<(usize, f64)>],
    px: &[f64],
    py: &[f64],
    ns: usize,
    ny: usize,
) -> Vec<Vec<f64>> {
    let mut r = vec![vec![0.0; ny]; ns];
    for x in 0..q.len() {
        for (&w, &qw) in sets_of[x].iter().zip(&q[x]) {
            for &(y, pyx) in &ys_of[x] {
                r[w][y] += px[x] * pyx * qw / py[y];
            }
        }
    }
    r
}

/// I(W;X|Y) in bits for channel q and its induced r.
fn objective(q: &[Vec<f64>], r: &[Vec<f64>], sets_of: &[Vec<usize>], ys_of: &[Vec<(usize, f64)>], px: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in 0..q.len() {
        for (&w, &qw) in sets_of[x].iter().zip(&q[x]) {
            if qw <= 0.0 {
                continue;
            }
            for &(y, pyx) in &ys_of[x] {
                // underflowed weights contribute nothing (and would give 0 * inf)
                let m = px[x] * pyx * qw;
                if m > 0.0 && r[w][y] > 0.0 {
                    s += m * (qw / r[w][y]).log2();
                }
            }
        }
    }
    s
}

/// Graph entropy of `source` on the graph of the given kind, under its
/// marginal.
pub fn graph_entropy(j: &JointPmf, f: &FunctionTable, source: Source, kind: GraphKind) -> Result<f64> {
    let g = characteristic_graph(j, f, source, kind);
    koerner_entropy(&g, &j.marginal(source))
}

/// Checks that `groups` partition the support of `j`.
pub(crate) fn check_cell_partition(j: &JointPmf, groups: &[Vec<(usize, usize)>]) -> Result<()> {
    let mut seen = vec![vec![false; j.cols()]; j.rows()];
    for g in groups {
        for &(a, b) in g {
            if a >= j.rows() || b >= j.cols() {
                return invalid(format!("cell ({a},{b}) out of range"));
            }
            if !j.in_support(a, b) {
                return Err(Error::Inconsistency(format!("cell ({a},{b}) has zero mass")));
            }
            if seen[a][b] {
                return Err(Error::Inconsistency(format!("cell ({a},{b}) assigned twice")));
            }
            seen[a][b] = true;
        }
    }
    if j.support().into_iter().any(|(a, b)| !seen[a][b]) {
        return Err(Error::Inconsistency("index does not cover the support".into()));
    }
    Ok(())
}

fn group_mass(j: &JointPmf, g: &[(usize, usize)]) -> f64 {
    g.iter().map(|&(a, b)| j.mass(a, b)).sum()
}

/// H_G(X_s | K) = Σ_k P(k) H_{G|k}(X_s | K=k), where `groups` lists the
/// support cells of each index value. Each conditional instance is the
/// renormalized restriction of `j`, and its graph is rebuilt with `kind`.
pub fn conditional_graph_entropy_given_index(
    j: &JointPmf,
    f: &FunctionTable,
    source: Source,
    groups: &[Vec<(usize, usize)>],
    kind: GraphKind,
) -> Result<f64> {
    check_cell_partition(j, groups)?;
    let mut total = 0.0;
    for g in groups {
        let pk = group_mass(j, g);
        if pk <= 0.0 {
            if !g.is_empty() {
                return Err(Error::Inconsistency("index value with cells but no mass".into()));
            }
            continue;
        }
        let sub = j.restrict(g)?;
        total += pk * graph_entropy(&sub, f, source, kind)?;
    }
    Ok(total)
}

/// H(K) + Σ_k P(k) H(f | K=k).
pub fn function_entropy_given_index(j: &JointPmf, f: &FunctionTable, groups: &[Vec<(usize, usize)>]) -> Result<f64> {
    check_cell_partition(j, groups)?;
    let masses: Vec<f64> = groups.iter().map(|g| group_mass(j, g)).collect();
    let mut total = h(&masses);
    for (g, &pk) in groups.iter().zip(&masses) {
        if pk > 0.0 {
            total += pk * function_entropy(f, &j.restrict(g)?)?.1;
        }
    }
    Ok(total)
}

/// Bracket on the joint graph entropy H_{G1,G2}(X1,X2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointBounds {
    /// H(f): colorings of support cells that separate differing outcomes.
    pub lower: f64,
    /// H(C1, C2): both sources send their equivalence class.
    pub upper: f64,
    /// H_G1(X1) + H_G2(X2), reported when the sources are independent.
    pub independent_sum: Option<f64>,
}

pub fn joint_graph_entropy_bounds(j: &JointPmf, f: &FunctionTable) -> Result<JointBounds> {
    let lower = function_entropy(f, j)?.1;
    let (c1, i1) = class_index(f, j, Source::One);
    let (c2, i2) = class_index(f, j, Source::Two);
    let mut pair = vec![vec![0.0; c2.len()]; c1.len()];
    for (a, b) in j.support() {
        pair[i1[a]][i2[b]] += j.mass(a, b);
    }
    let upper = h(&pair.concat());
    let independent_sum = if j.is_product() {
        let g1 = build_characteristic_graph(j, f, Source::One);
        let g2 = build_characteristic_graph(j, f, Source::Two);
        Some(koerner_entropy(&g1, &j.marginal1())? + koerner_entropy(&g2, &j.marginal2())?)
    } else {
        None
    };
    Ok(JointBounds { lower, upper, independent_sum })
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

    /// min over deterministic W = φ(X), φ(x) ∋ x, of H(W | Y).
    fn deterministic_oracle(g: &CharGraph, p: &[Vec<f64>]) -> f64 {
        let sets = maximal_independent_sets(g, 1000).unwrap();
        let n = g.n();
        let choices: Vec<Vec<usize>> =
            (0..n).map(|x| (0..sets.len()).filter(|&w| sets[w].contains(&x)).collect()).collect();
        let ny = p[0].len();
        let mut best = f64::INFINITY;
        let mut pick = vec![0; n];
        loop {
            let mut v = 0.0;
            for y in 0..ny {
                let mut mass = vec![0.0; sets.len()];
                for x in 0..n {
                    mass[choices[x][pick[x]]] += p[x][y];
                }
                let py: f64 = mass.iter().sum();
                if py > 0.0 {
                    v += py * h_normalized(&mass);
                }
            }
            best = best.min(v);
            let mut i = 0;
            while i < n {
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == n {
                return best;
            }
        }
    }

    fn example1() -> (JointPmf, FunctionTable) {
        let a = Alphabet::range(-2, 2);
        let u = PmfVector::uniform(5);
        let j = JointPmf::product(a.clone(), u.probs(), a, u.probs()).unwrap();
        let f = build_from_rule(Rule::AbsSum, j.x1(), j.x2()).unwrap().paired(&j).unwrap();
        (j, f)
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

    #[test]
    fn trivial_graphs() {
        let complete = CharGraph::unlabeled(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let p = [0.5, 0.25, 0.25];
        assert!(close(koerner_entropy(&complete, &p).unwrap(), 1.5, 1e-12));
        let empty = CharGraph::unlabeled(3, &[]).unwrap();
        assert_eq!(koerner_entropy(&empty, &p).unwrap(), 0.0);
        assert!(koerner_entropy(&empty, &[0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn example1_koerner() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        let r = koerner_entropy_report(&g, &j.marginal1(), &SolverConfig::default()).unwrap();
        assert!(r.fast_path);
        assert!(close(r.value, 1.5219, 5e-4));
    }

    #[test]
    fn path_graph_against_known_value() {
        // P3 with uniform masses: H = min over a in the vertex packing polytope
        // of -(1/3) Σ log a_x; optimum puts a = (2/3, 1/3, 2/3) on {0,2},{1}.
        let g = CharGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let v = koerner_entropy(&g, &[1.0 / 3.0; 3]).unwrap();
        let want = -(2.0 * (2.0f64 / 3.0).log2() + (1.0f64 / 3.0).log2()) / 3.0;
        assert!(close(v, want, 1e-8), "{v} vs {want}");
    }

    #[test]
    fn pentagon_is_below_deterministic_oracle() {
        // C5 with uniform masses has H_G = log2(5/2)
        let g = CharGraph::unlabeled(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let p = vec![0.2; 5];
        let v = koerner_entropy(&g, &p).unwrap();
        assert!(close(v, 2.5f64.log2(), 1e-7), "{v}");
        let col: Vec<Vec<f64>> = p.iter().map(|&w| vec![w]).collect();
        assert!(v <= deterministic_oracle(&g, &col) + 1e-9);
    }

    #[test]
    fn example2_conditional_terms() {
        let (j, f) = example2();
        let g2 = build_characteristic_graph(&j, &f, Source::Two);
        let v = conditional_graph_entropy(&g2, &j, Source::Two).unwrap();
        assert!(close(v, j.cond_entropy_2_given_1(), 1e-12));
        assert!(close(v, 0.4896, 5e-4));
        // K_B: {row 0}, {rows 1, 2}
        let groups = vec![vec![(0, 0)], vec![(1, 1), (1, 2), (2, 1), (2, 2)]];
        let k = conditional_graph_entropy_given_index(&j, &f, Source::One, &groups, GraphKind::Class).unwrap();
        assert!(close(k, 0.4899, 5e-4));
        let s = conditional_graph_entropy_given_index(&j, &f, Source::One, &groups, GraphKind::Support).unwrap();
        assert!(close(s, k, 1e-12));
        let fk = function_entropy_given_index(&j, &f, &groups).unwrap();
        assert!(close(fk, 1.7296, 5e-4));
    }

    #[test]
    fn index_must_partition_support() {
        let (j, f) = example2();
        let bad = vec![vec![(0, 0)], vec![(1, 1)]];
        assert!(conditional_graph_entropy_given_index(&j, &f, Source::One, &bad, GraphKind::Class).is_err());
        let zero = vec![vec![(0, 0), (0, 1)], vec![(1, 1), (1, 2), (2, 1), (2, 2)]];
        assert!(conditional_graph_entropy_given_index(&j, &f, Source::One, &zero, GraphKind::Class).is_err());
    }

    #[test]
    fn single_index_is_unconditional() {
        let (j, f) = example2();
        let all = vec![j.support()];
        let a = conditional_graph_entropy_given_index(&j, &f, Source::One, &all, GraphKind::Class).unwrap();
        let b = graph_entropy(&j, &f, Source::One, GraphKind::Class).unwrap();
        assert!(close(a, b, 1e-12));
    }

    #[test]
    fn independent_sources_reduce_to_koerner() {
        let (j, f) = example1();
        let g = build_characteristic_graph(&j, &f, Source::One);
        let c = conditional_graph_entropy(&g, &j, Source::One).unwrap();
        let k = koerner_entropy(&g, &j.marginal1()).unwrap();
        assert!(close(c, k, 1e-9));
        let b = joint_graph_entropy_bounds(&j, &f).unwrap();
        assert!(close(b.independent_sum.unwrap(), 2.0 * k, 1e-9));
        assert!(close(b.upper, 2.0 * k, 1e-9));
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn iterative_path_matches_oracle_on_conditional_cycle() {
        // C5 on X with a correlated Y; the iterative path is exercised
        let g = CharGraph::unlabeled(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let p = vec![
            vec![0.10, 0.05],
            vec![0.05, 0.15],
            vec![0.12, 0.08],
            vec![0.02, 0.18],
            vec![0.15, 0.10],
        ];
        let j = JointPmf::from_matrix(p.clone()).unwrap();
        let r = conditional_graph_entropy_report(&g, &j, Source::One, &SolverConfig::default()).unwrap();
        assert!(!r.fast_path);
        assert!(r.gap <= 1e-6);
        assert!(r.value <= deterministic_oracle(&g, &p) + 1e-9);
        assert!(r.value <= koerner_entropy(&g, &j.marginal1()).unwrap() + 1e-9);
        assert!(r.value >= -1e-12);
    }

    #[test]
    fn fast_path_agrees_with_iteration() {
        let g = CharGraph::unlabeled(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let p = [0.1, 0.2, 0.3, 0.4];
        let fast = koerner_entropy(&g, &p).unwrap();
        assert!(close(fast, h(&[0.3, 0.7]), 1e-12));
        let slow_cfg = SolverConfig { fast_paths: false, ..SolverConfig::default() };
        let slow = koerner_entropy_report(&g, &p, &slow_cfg).unwrap();
        assert!(!slow.fast_path);
        assert!(close(slow.value, fast, 1e-8), "{} vs {fast}", slow.value);
        let (j, f) = example2();
        let g2 = build_characteristic_graph(&j, &f, Source::Two);
        let a = conditional_graph_entropy_report(&g2, &j, Source::Two, &slow_cfg).unwrap();
        assert!(close(a.value, j.cond_entropy_2_given_1(), 1e-8));
        // adding an isolated zero-mass vertex changes nothing
        let g5 = CharGraph::unlabeled(5, &[(0, 2), (0, 3), (1, 2), (1, 3), (0, 4)]).unwrap();
        assert!(close(koerner_entropy(&g5, &[0.1, 0.2, 0.3, 0.4, 0.0]).unwrap(), fast, 1e-12));
    }

    #[test]
    fn constant_function_bounds() {
        let (j, _) = example1();
        let f = FunctionTable::from_int_table(j.x1().clone(), j.x2().clone(), &vec![vec![Some(1); 5]; 5]).unwrap();
        let b = joint_graph_entropy_bounds(&j, &f).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn underflowed_channel_weights_do_not_zero_the_value() {
        // path 4-1-0-2-3: the iteration drives some weights below f64 range
        let g = CharGraph::unlabeled(5, &[(0, 1), (0, 2), (1, 4), (2, 3)]).unwrap();
        let p = [0.39177, 0.38715, 0.03843, 0.05542, 0.12723];
        let t: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / t).collect();
        let v = koerner_entropy(&g, &p).unwrap();
        assert!(v > 0.9 && v <= crate::prob::h(&p), "{v}");
    }
}
