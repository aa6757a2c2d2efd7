//! Rate regions and sum rates of the compression schemes: Slepian–Wolf,
//! coloring (no helper), GKW and functional-common-information helpers,
//! the bipartition helper and the K_δ / K_S schemes with their closed forms.

use serde::Serialize;

use crate::common_info::{gkw_decompose, gkw_entropy, nest_marginal_rates, Nesting};
use crate::entropy_solver::{
    conditional_graph_entropy, conditional_graph_entropy_given_index, graph_entropy, joint_graph_entropy_bounds,
};
use crate::error::{invalid, Result};
use crate::function::{function_entropy, quotient_rows, FunctionTable};
use crate::gf::{bipartition_scheme, build_gf, low_prob_edge_scheme, structure_split_scheme, PeelGrouping};
use crate::graph::{build_characteristic_graph, GraphKind};
use crate::instances;
use crate::prob::{h, h2, JointPmf, Source};

/// Lower-bound record of one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegionSummary {
    pub scheme: String,
    pub r1: f64,
    pub r2: f64,
    pub helper: f64,
    /// Sum-rate lower bound (helper included).
    pub sum: f64,
    /// Upper end when the sum is only known as a bracket.
    pub sum_upper: Option<f64>,
    pub notes: Vec<String>,
}

impl RateRegionSummary {
    fn new(scheme: &str, r1: f64, r2: f64, helper: f64) -> Self {
        RateRegionSummary { scheme: scheme.into(), r1, r2, helper, sum: r1 + r2 + helper, sum_upper: None, notes: vec![] }
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// Both source-role assignments of a scheme and the better one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RolePair {
    pub primary: RateRegionSummary,
    pub swapped: RateRegionSummary,
    pub best: f64,
}

impl RolePair {
    fn new(primary: RateRegionSummary, swapped: RateRegionSummary) -> Self {
        let best = primary.sum.min(swapped.sum);
        RolePair { primary, swapped, best }
    }
}

pub fn slepian_wolf(j: &JointPmf) -> RateRegionSummary {
    let mut s = RateRegionSummary::new("slepian_wolf", j.cond_entropy_1_given_2(), j.cond_entropy_2_given_1(), 0.0);
    s.sum = j.joint_entropy();
    s
}

/// H_G(X_other | C_given): graph entropy of the other source when the
/// decoder knows the equivalence class of `given`.
pub fn graph_entropy_given_class(j: &JointPmf, f: &FunctionTable, given: Source) -> Result<f64> {
    let (qj, qf) = match given {
        Source::One => quotient_rows(f, j)?,
        Source::Two => quotient_rows(&f.transpose(), &j.transpose())?,
    };
    let g = build_characteristic_graph(&qj, &qf, Source::Two);
    conditional_graph_entropy(&g, &qj, Source::Two)
}

/// Coloring scheme without helper: one source sends its class, the other
/// codes conditionally on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiRate {
    /// H_G1(X1) + H_G2(X2 | C1).
    pub x1_first: f64,
    /// H_G2(X2) + H_G1(X1 | C2).
    pub x2_first: f64,
    pub value: f64,
}

pub fn chi_rate(j: &JointPmf, f: &FunctionTable) -> Result<ChiRate> {
    let x1_first = graph_entropy(j, f, Source::One, GraphKind::Class)? + graph_entropy_given_class(j, f, Source::One)?;
    let x2_first = graph_entropy(j, f, Source::Two, GraphKind::Class)? + graph_entropy_given_class(j, f, Source::Two)?;
    Ok(ChiRate { x1_first, x2_first, value: x1_first.min(x2_first) })
}

/// Marginals H_G1(X1|X2), H_G2(X2|X1); sum bracketed by the joint graph
/// entropy bounds.
pub fn functional_region(j: &JointPmf, f: &FunctionTable) -> Result<RateRegionSummary> {
    let g1 = build_characteristic_graph(j, f, Source::One);
    let g2 = build_characteristic_graph(j, f, Source::Two);
    let r1 = conditional_graph_entropy(&g1, j, Source::One)?;
    let r2 = conditional_graph_entropy(&g2, j, Source::Two)?;
    let b = joint_graph_entropy_bounds(j, f)?;
    let mut s = RateRegionSummary::new("functional", r1, r2, 0.0);
    s.sum = b.lower.max(r1 + r2);
    s.sum_upper = Some(b.upper);
    if let Some(ind) = b.independent_sum {
        s = s.note(format!("independent sources: H_G1(X1) + H_G2(X2) = {ind:.6}"));
    }
    Ok(s)
}

/// GKW helper: R_l ≥ H_G(X_l | K), sum ≥ H(K) + Σ_l H_G(X_l | K).
pub fn prop1_gkw_helper(j: &JointPmf, f: &FunctionTable) -> Result<RateRegionSummary> {
    let d = gkw_decompose(j);
    let groups = d.cell_groups();
    let r1 = conditional_graph_entropy_given_index(j, f, Source::One, &groups, GraphKind::Class)?;
    let r2 = conditional_graph_entropy_given_index(j, f, Source::Two, &groups, GraphKind::Class)?;
    Ok(RateRegionSummary::new("prop1_gkw", r1, r2, gkw_entropy(&d)))
}

fn cond_entropy_given_groups(j: &JointPmf, groups: &[Vec<(usize, usize)>], s: Source) -> Result<f64> {
    let mut total = 0.0;
    for g in groups {
        let m: f64 = g.iter().map(|&(a, b)| j.mass(a, b)).sum();
        if m > 0.0 {
            total += m * j.restrict(g)?.entropy_of(s);
        }
    }
    Ok(total)
}

/// Joint coding with K_f: R_l ≥ H(X_l | K_f), sum ≥ H(K_f) + Σ_l H(X_l | K_f).
pub fn prop2_joint_with_kf(j: &JointPmf, f: &FunctionTable, n: &Nesting) -> Result<RateRegionSummary> {
    let groups = n.kf_groups(j);
    let masses: Vec<f64> = groups.iter().map(|g| g.iter().map(|&(a, b)| j.mass(a, b)).sum()).collect();
    let r1 = cond_entropy_given_groups(j, &groups, Source::One)?;
    let r2 = cond_entropy_given_groups(j, &groups, Source::Two)?;
    let mut s = RateRegionSummary::new("prop2_kf", r1, r2, h(&masses));
    if !n.is_valid(j, f) {
        s = s.note("nesting has components with several outcomes");
    }
    Ok(s)
}

/// One source codes per nest, the other sends the nest index V.
pub fn prop3_one_source(j: &JointPmf, f: &FunctionTable, n: &Nesting) -> Result<RolePair> {
    let pv = n.nest_masses(j);
    let hv = h(&pv);
    let weighted = |s: Source| -> Result<f64> {
        Ok(nest_marginal_rates(n, j, f, s)?.iter().zip(&pv).map(|(r, p)| r * p).sum())
    };
    let primary = RateRegionSummary::new("prop3_x1_codes", weighted(Source::One)?, hv, 0.0);
    let swapped = RateRegionSummary::new("prop3_x2_codes", hv, weighted(Source::Two)?, 0.0);
    Ok(RolePair::new(primary, swapped))
}

/// Bipartition helper: H(K_B) + H_G1(X1 | K_B) + H_G2(X2 | C1), and the
/// role-swapped variant.
pub fn prop4_permutation_helper(j: &JointPmf, f: &FunctionTable) -> Result<RolePair> {
    let g = build_gf(j, f)?;
    let (d, hk) = bipartition_scheme(&g);
    let groups = g.cell_groups(j, &d.pieces);
    let c1 = conditional_graph_entropy_given_index(j, f, Source::One, &groups, GraphKind::Class)?;
    let c2 = conditional_graph_entropy_given_index(j, f, Source::Two, &groups, GraphKind::Class)?;
    let primary = RateRegionSummary::new("prop4_kb", c1, graph_entropy_given_class(j, f, Source::One)?, hk);
    let swapped = RateRegionSummary::new("prop4_kb_swapped", graph_entropy_given_class(j, f, Source::Two)?, c2, hk);
    Ok(RolePair::new(primary, swapped))
}

/// Instances carrying the K_δ scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KDeltaInstance {
    Example4,
    Example5,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KDeltaValues {
    pub h_f: f64,
    pub h_kdelta: f64,
    pub chi: f64,
    pub helper_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KDeltaRates {
    pub instance: KDeltaInstance,
    pub delta: f64,
    pub closed: KDeltaValues,
    pub computed: KDeltaValues,
}

/// Closed forms for the K_δ examples.
pub fn kdelta_closed(instance: KDeltaInstance, d: f64) -> KDeltaValues {
    let third = 1.0 / 3.0;
    let log3 = 3f64.log2();
    match instance {
        KDeltaInstance::Example4 => {
            let h_kdelta = 2.0 * h2(d / 3.0);
            KDeltaValues {
                h_f: h(&[(2.0 - d) / 3.0, (1.0 - d) / 3.0, 2.0 * d / 3.0]),
                h_kdelta,
                chi: log3 + 2.0 * third * h2(d),
                helper_total: h_kdelta + h2(2.0 / 3.0),
            }
        }
        KDeltaInstance::Example5 => {
            let h_kdelta = 2.0 * h(&[d / 3.0, d / 3.0, 1.0 - 2.0 * d / 3.0]);
            KDeltaValues {
                h_f: h(&[(2.0 - 2.0 * d) / 3.0, (1.0 - 2.0 * d) / 3.0, 2.0 * d / 3.0, 2.0 * d / 3.0]),
                h_kdelta,
                chi: log3 + third * (h2(d) + h2(d) + h(&[d, d, 1.0 - 2.0 * d])),
                helper_total: h_kdelta + h2(2.0 / 3.0),
            }
        }
    }
}

/// Closed-form and first-principles K_δ rates. The coloring rate follows
/// the X1-first chain, as in the closed forms.
pub fn kdelta_rates(instance: KDeltaInstance, delta: f64) -> Result<KDeltaRates> {
    let inst = match instance {
        KDeltaInstance::Example4 => instances::example4(delta)?,
        KDeltaInstance::Example5 => instances::example5(delta)?,
    };
    let (j, f) = (&inst.j, &inst.f);
    let g = build_gf(j, f)?;
    let scheme = low_prob_edge_scheme(&g, inst.peel.as_deref().unwrap_or(&[]), &PeelGrouping::Symmetric)?;
    let chi = chi_rate(j, f)?;
    let computed = KDeltaValues {
        h_f: function_entropy(f, j)?.1,
        h_kdelta: scheme.h_kdelta,
        chi: chi.x1_first,
        helper_total: scheme.total.ok_or_else(|| crate::Error::Inconsistency("no source suffices".into()))?,
    };
    Ok(KDeltaRates { instance, delta, closed: kdelta_closed(instance, delta), computed })
}

/// δ where the helper and coloring rates cross (closed forms), by
/// bisection over the instance's δ range; None without a sign change.
pub fn kdelta_crossover(instance: KDeltaInstance) -> Option<f64> {
    let diff = |d: f64| {
        let v = kdelta_closed(instance, d);
        v.helper_total - v.chi
    };
    let (mut lo, mut hi) = match instance {
        KDeltaInstance::Example4 => (1e-12, 1.0 - 1e-12),
        KDeltaInstance::Example5 => (1e-12, 0.5 - 1e-12),
    };
    if diff(lo).signum() == diff(hi).signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if diff(mid).signum() == diff(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KsInstance {
    Petersen,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsValues {
    pub h_f: f64,
    pub h_x1: f64,
    pub h_x2: f64,
    /// H_G1(X1|X2) + H_G2(X2).
    pub chi_x2_first: f64,
    /// H_G2(X2|X1) + H_G1(X1).
    pub chi_x1_first: f64,
    pub chi: f64,
    pub h_ks: f64,
    /// piece_rates[piece][source] for pieces C_1, C_2.
    pub piece_rates: [[f64; 2]; 2],
    pub helper_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsRates {
    pub instance: KsInstance,
    pub p: f64,
    pub closed: KsValues,
    pub computed: KsValues,
}

pub fn ks_closed(instance: KsInstance, p: f64) -> KsValues {
    let q = 1.0 - p;
    match instance {
        KsInstance::Petersen => {
            let h_x1 = h(&[p, p, 1.0 - 2.0 * p]);
            let p2 = [1.0 - 1.5 * p, p * (1.0 - 2.0 * p) / q, p * p / q + p / 2.0];
            let h_x2 = h(&p2);
            let chi_x2_first = (1.0 - 1.5 * p) * h2(p / (2.0 - 3.0 * p))
                + (p * p / q + p / 2.0) * h2((1.0 - p) / (1.0 + p))
                + h_x2;
            let chi_x1_first = p * h2(p / q) + p + h_x1;
            let h_ks = h2(p * p / q + p / 2.0);
            KsValues {
                h_f: h(&[p / 2.0 + p * (1.0 - 2.0 * p) / q, p / 2.0, 1.0 - 2.0 * p + p * p / q]),
                h_x1,
                h_x2,
                chi_x2_first,
                chi_x1_first,
                chi: chi_x2_first.min(chi_x1_first),
                h_ks,
                piece_rates: [[h_x1, h_x2], [1.0, h2((1.0 - 1.5 * p) / (1.0 - p + p * p / q))]],
                helper_total: h_x1.min(h_x2) + h_ks,
            }
        }
        KsInstance::Star => {
            let h_x1 = h(&[p, p, 1.0 - 2.0 * p]);
            let p2_1 = p * p + p * p / q;
            let p2_2 = p * (1.0 - 2.0 * p) + (1.0 - 2.0 * p) / q;
            let h_x2 = h(&[p * p, p2_1, p2_2]);
            let chi_x2_first =
                p2_1 * h2(1.0 / (2.0 - p)) + p2_2 * h2(1.0 / (1.0 + p - p * p)) + h_x2;
            let chi_x1_first = p * h2(2.0 * p) + p * h2(p / q) + h_x1;
            let h_ks = h2(2.0 * p * p + (1.0 - 2.0 * p) / q);
            KsValues {
                h_f: h(&[2.0 * p * p, (1.0 - 2.0 * p) / q, p * p / q + p * (1.0 - 2.0 * p)]),
                h_x1,
                h_x2,
                chi_x2_first,
                chi_x1_first,
                chi: chi_x2_first.min(chi_x1_first),
                h_ks,
                piece_rates: [[h2(p), h2(p2_2)], [1.0, h2(p2_1 / (1.0 - p * p))]],
                helper_total: h2(p).min(h2(p2_2)) + h_ks,
            }
        }
    }
}

/// Closed-form and first-principles K_S rates.
pub fn ks_rates(instance: KsInstance, p: f64) -> Result<KsRates> {
    let inst = match instance {
        KsInstance::Petersen => instances::petersen(p)?,
        KsInstance::Star => instances::star(p)?,
    };
    let (j, f) = (&inst.j, &inst.f);
    let g = build_gf(j, f)?;
    let s = structure_split_scheme(&g, inst.peel.as_deref().unwrap_or(&[]))?;
    let chi = chi_rate(j, f)?;
    let computed = KsValues {
        h_f: function_entropy(f, j)?.1,
        h_x1: graph_entropy(j, f, Source::One, GraphKind::Class)?,
        h_x2: graph_entropy(j, f, Source::Two, GraphKind::Class)?,
        chi_x2_first: chi.x2_first,
        chi_x1_first: chi.x1_first,
        chi: chi.value,
        h_ks: s.h_ks,
        piece_rates: s.piece_rates,
        helper_total: s.total.ok_or_else(|| crate::Error::Inconsistency("no source suffices".into()))?,
    };
    Ok(KsRates { instance, p, closed: ks_closed(instance, p), computed })
}

/// Every applicable region for an instance, for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesReport {
    pub h_joint: f64,
    pub h_f: f64,
    pub slepian_wolf: RateRegionSummary,
    pub functional: RateRegionSummary,
    pub chi: ChiRate,
    pub prop1: RateRegionSummary,
    pub prop2: Option<RateRegionSummary>,
    pub prop3: Option<RolePair>,
    pub prop4: RolePair,
    pub helper_scheme: Option<RateRegionSummary>,
}

/// Evaluates all regions; `nesting` enables the K_f-based schemes and
/// `peel` the structure-split helper.
pub fn all_rates(
    j: &JointPmf,
    f: &FunctionTable,
    nesting: Option<&Nesting>,
    peel: Option<&[(usize, usize)]>,
) -> Result<RatesReport> {
    let prop2 = nesting.map(|n| prop2_joint_with_kf(j, f, n)).transpose()?;
    let prop3 = nesting.map(|n| prop3_one_source(j, f, n)).transpose()?;
    let helper_scheme = match peel {
        Some(peel) => {
            let g = build_gf(j, f)?;
            let s = structure_split_scheme(&g, peel)?;
            s.source_code.best().map(|(src, r)| {
                let (r1, r2) = if src == Source::One { (r, 0.0) } else { (0.0, r) };
                RateRegionSummary::new("helper_split", r1, r2, s.h_ks)
            })
        }
        None => None,
    };
    Ok(RatesReport {
        h_joint: j.joint_entropy(),
        h_f: function_entropy(f, j)?.1,
        slepian_wolf: slepian_wolf(j),
        functional: functional_region(j, f)?,
        chi: chi_rate(j, f)?,
        prop1: prop1_gkw_helper(j, f)?,
        prop2,
        prop3,
        prop4: prop4_permutation_helper(j, f)?,
        helper_scheme,
    })
}

/// Grid of parameter values `lo, lo+step, ..., ≤ hi`.
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || hi < lo || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("bad grid {lo}:{hi}:{step}"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}
