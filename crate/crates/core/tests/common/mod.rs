//! Shared generators and brute-force oracles for the integration tests.

#![allow(dead_code)]

use funcomp::{Alphabet, FunctionTable, JointPmf};
use rand::Rng;

pub fn entropy(w: &[f64]) -> f64 {
    let t: f64 = w.iter().filter(|&&x| x > 0.0).sum();
    if t <= 0.0 {
        return 0.0;
    }
    w.iter().filter(|&&x| x > 0.0).map(|&x| -(x / t) * (x / t).log2()).sum::<f64>().max(0.0)
}

/// Random instance: `rows` x `cols` alphabets, every row and column touched,
/// random masses and outcomes in 0..outcomes.
pub fn random_instance<R: Rng>(rng: &mut R, rows: usize, cols: usize, density: f64, outcomes: i64) -> (JointPmf, FunctionTable) {
    let mut p = vec![vec![0.0; cols]; rows];
    for (i, row) in p.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            if rng.random::<f64>() < density || k == i % cols {
                *x = rng.random_range(0.05..1.0);
            }
        }
    }
    for k in 0..cols {
        if p.iter().all(|r| r[k] == 0.0) {
            p[k % rows][k] = rng.random_range(0.05..1.0);
        }
    }
    let total: f64 = p.iter().flatten().sum();
    for x in p.iter_mut().flatten() {
        *x /= total;
    }
    let a = Alphabet::range(0, rows as i64 - 1);
    let b = Alphabet::range(0, cols as i64 - 1);
    let j = JointPmf::new(a.clone(), b.clone(), p).unwrap();
    let table: Vec<Vec<Option<i64>>> =
        (0..rows).map(|_| (0..cols).map(|_| Some(rng.random_range(0..outcomes))).collect()).collect();
    let f = FunctionTable::from_int_table(a, b, &table).unwrap().paired(&j).unwrap();
    (j, f)
}

/// Support-rule characteristic graph of the row source, as adjacency masks.
pub fn row_conflicts(j: &JointPmf, f: &FunctionTable) -> Vec<u64> {
    let n = j.rows();
    let mut adj = vec![0u64; n];
    for u in 0..n {
        for v in 0..n {
            if u != v && (0..j.cols()).any(|k| j.in_support(u, k) && j.in_support(v, k) && f.at(u, k) != f.at(v, k)) {
                adj[u] |= 1 << v;
            }
        }
    }
    adj
}

/// All maximal independent sets by subset enumeration.
pub fn brute_mis(adj: &[u64]) -> Vec<u64> {
    let n = adj.len();
    let independent = |s: u64| (0..n).all(|u| s >> u & 1 == 0 || adj[u] & s == 0);
    (1u64..1 << n)
        .filter(|&s| independent(s))
        .filter(|&s| (0..n).all(|u| s >> u & 1 == 1 || !independent(s | 1 << u)))
        .collect()
}

/// min over deterministic maps x -> MIS containing x of H(W | Y), where
/// `pxy[x][y]` is the joint mass (one column gives the unconditional case).
pub fn deterministic_oracle(adj: &[u64], pxy: &[Vec<f64>]) -> f64 {
    let mis = brute_mis(adj);
    let active: Vec<usize> = (0..adj.len()).filter(|&x| pxy[x].iter().sum::<f64>() > 0.0).collect();
    let choices: Vec<Vec<usize>> =
        active.iter().map(|&x| (0..mis.len()).filter(|&w| mis[w] >> x & 1 == 1).collect()).collect();
    let cols = pxy[0].len();
    let py: Vec<f64> = (0..cols).map(|y| pxy.iter().map(|r| r[y]).sum()).collect();
    let mut best = f64::INFINITY;
    let mut pick = vec![0usize; active.len()];
    loop {
        let mut pwy = vec![vec![0.0; cols]; mis.len()];
        for (i, &x) in active.iter().enumerate() {
            let w = choices[i][pick[i]];
            for y in 0..cols {
                pwy[w][y] += pxy[x][y];
            }
        }
        let mut hc = 0.0;
        for row in &pwy {
            for y in 0..cols {
                if row[y] > 0.0 {
                    hc += row[y] * (py[y] / row[y]).log2();
                }
            }
        }
        best = best.min(hc);
        let mut i = 0;
        loop {
            if i == pick.len() {
                return best.max(0.0);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Calls `visit` with every set partition of 0..n in restricted-growth form.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(i: usize, n: usize, max: usize, a: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if i == n {
            visit(a);
            return;
        }
        for c in 0..=max {
            a[i] = c;
            rec(i + 1, n, max.max(c + 1), a, visit);
        }
    }
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut a = vec![0; n];
    rec(1, n, 1, &mut a, &mut visit);
}

/// Minimum coloring entropy by exhaustive enumeration of proper colorings.
pub fn brute_min_coloring_entropy(adj: &[u64], p: &[f64]) -> f64 {
    let n = adj.len();
    let mut best = f64::INFINITY;
    for_each_partition(n, |a| {
        for u in 0..n {
            for v in u + 1..n {
                if a[u] == a[v] && adj[u] >> v & 1 == 1 {
                    return;
                }
            }
        }
        let k = a.iter().max().map_or(0, |m| m + 1);
        let mut w = vec![0.0; k];
        for (u, &c) in a.iter().enumerate() {
            w[c] += p[u];
        }
        best = best.min(entropy(&w));
    });
    best
}

/// Connected components (shared row or column) of a cell set.
pub fn components(cells: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let n = cells.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for a in 0..n {
        for b in a + 1..n {
            if cells[a].0 == cells[b].0 || cells[a].1 == cells[b].1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(cells[i]);
    }
    groups.into_values().collect()
}

/// (max H(K_f), min H(V)) over all valid nestings, by full enumeration.
pub fn brute_nest_optima(j: &JointPmf, f: &FunctionTable) -> (f64, f64) {
    let cells = j.support();
    let mut best_kf = f64::NEG_INFINITY;
    let mut best_v = f64::INFINITY;
    for_each_partition(cells.len(), |a| {
        let k = a.iter().max().map_or(0, |m| m + 1);
        let mut nests: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for (i, &c) in a.iter().enumerate() {
            nests[c].push(cells[i]);
        }
        let mut comp_masses = Vec::new();
        for nest in &nests {
            for comp in components(nest) {
                let o = f.at(comp[0].0, comp[0].1);
                if comp.iter().any(|&(x, y)| f.at(x, y) != o) {
                    return;
                }
                comp_masses.push(comp.iter().map(|&(x, y)| j.mass(x, y)).sum::<f64>());
            }
        }
        let nest_masses: Vec<f64> = nests.iter().map(|n| n.iter().map(|&(x, y)| j.mass(x, y)).sum()).collect();
        best_kf = best_kf.max(entropy(&comp_masses));
        best_v = best_v.min(entropy(&nest_masses));
    });
    (best_kf, best_v)
}

/// Körner entropy as min over the vertex packing polytope of -Σ p_i log2 a_i,
/// by Frank-Wolfe with exact line search over MIS indicator vectors.
/// Returns (value, duality gap).
pub fn packing_oracle(adj: &[u64], p: &[f64]) -> (f64, f64) {
    let keep: Vec<usize> = (0..adj.len()).filter(|&i| p[i] > 0.0).collect();
    let sub: Vec<u64> = keep
        .iter()
        .map(|&u| keep.iter().enumerate().filter(|&(_, &v)| adj[u] >> v & 1 == 1).fold(0, |m, (k, _)| m | 1 << k))
        .collect();
    let p: Vec<f64> = keep.iter().map(|&i| p[i]).collect();
    let mis = brute_mis(&sub);
    let n = p.len();
    let ind = |s: u64| -> Vec<f64> { (0..n).map(|i| (s >> i & 1) as f64).collect() };
    let obj = |a: &[f64]| -> f64 { (0..n).map(|i| -p[i] * a[i].log2()).sum() };
    let mut a = vec![0.0; n];
    for &s in &mis {
        for i in 0..n {
            a[i] += (s >> i & 1) as f64 / mis.len() as f64;
        }
    }
    let mut gap = f64::INFINITY;
    for _ in 0..20000 {
        // linear minimization: maximize Σ_{i∈S} p_i / a_i
        let score = |s: u64| (0..n).filter(|&i| s >> i & 1 == 1).map(|i| p[i] / a[i]).sum::<f64>();
        let s = *mis.iter().max_by(|&&x, &&y| score(x).total_cmp(&score(y))).unwrap();
        let v = ind(s);
        // <grad, a - v> with grad_i = -p_i / (a_i ln 2)
        gap = (score(s) - 1.0) / std::f64::consts::LN_2;
        if gap < 1e-9 {
            break;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let at = |t: f64| -> Vec<f64> { (0..n).map(|i| (1.0 - t) * a[i] + t * v[i]).collect() };
            if obj(&at(m1)) < obj(&at(m2)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let t = (lo + hi) / 2.0;
        for i in 0..n {
            a[i] = (1.0 - t) * a[i] + t * v[i];
        }
    }
    (obj(&a), gap)
}
