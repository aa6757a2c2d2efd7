//! Builds concrete helper + coloring codes for the helper schemes and
//! simulates them on i.i.d. samples: zero-error check plus empirical
//! (ideal entropy-coded) stream rates.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::common_info::{cell_components, gkw_decompose, Nesting};
use crate::error::{invalid, Error, Result};
use crate::function::FunctionTable;
use crate::gf::{build_gf, low_prob_edge_scheme, structure_split_scheme, GfGraph, PeelGrouping};
use crate::graph::{
    build_characteristic_graph, class_graph, min_entropy_coloring, CharGraph, ColoringMode, DEFAULT_COLORING_BUDGET,
};
use crate::label::Label;
use crate::prob::{h_normalized, JointPmf, Source};
use crate::rates::{prop1_gkw_helper, prop3_one_source, prop4_permutation_helper};

/// Samples per shard; shard `i` draws from ChaCha8 stream `i` of the seed.
const SHARD: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// GKW component helper, both sources send class colors.
    Prop1,
    /// Nest-index helper, one source sends its component within the nest.
    Prop3,
    /// Bipartition helper.
    #[value(name = "kb")]
    KB,
    /// Low-probability edge indicators.
    #[value(name = "kdelta")]
    KDelta,
    /// Structure split into C_1 / C_2.
    #[value(name = "ks")]
    KS,
}

/// What the decoder already knows when a source stream is entropy coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SideInfo {
    /// The source transmits nothing.
    Silent,
    Nothing,
    Helper,
    /// Helper index and the other source's color.
    HelperAndOther,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderEntry {
    pub helper: usize,
    pub c1: usize,
    pub c2: usize,
    pub outcome: Label,
}

/// A complete zero-error code: helper map, per-index source colorings and
/// the decoder look-up table.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeCode {
    pub scheme: SchemeKind,
    /// Helper index of every support cell (None off the support).
    pub helper: Vec<Vec<Option<usize>>>,
    pub helper_count: usize,
    /// Symbol of each helper stream for every helper index; the helper rate
    /// is the sum of the stream entropies.
    pub helper_streams: Vec<Vec<usize>>,
    /// codebooks[source][index][symbol]: color, None when the symbol does
    /// not occur under that index.
    pub codebooks: [Vec<Vec<Option<usize>>>; 2],
    pub side: [SideInfo; 2],
    pub decoder: Vec<DecoderEntry>,
    /// Asymptotic sum rate of the scheme this code realizes.
    pub theoretical_sum: f64,
    #[serde(skip)]
    lookup: HashMap<(usize, usize, usize), usize>,
}

/// Optional inputs some schemes need.
#[derive(Debug, Clone, Copy, Default)]
pub struct SchemeInputs<'a> {
    pub nesting: Option<&'a Nesting>,
    pub peel: Option<&'a [(usize, usize)]>,
}

fn coloring(g: &CharGraph, p: &[f64]) -> Result<Vec<usize>> {
    match min_entropy_coloring(g, p, ColoringMode::Exact, DEFAULT_COLORING_BUDGET) {
        Ok(c) => Ok(c.colors),
        Err(Error::Budget(_)) => Ok(min_entropy_coloring(g, p, ColoringMode::Greedy, 0)?.colors),
        Err(e) => Err(e),
    }
}

/// Colors of the symbols of `s` that occur in `sub`.
fn piece_colors(sub: &JointPmf, f: &FunctionTable, s: Source, support_rule: bool) -> Result<Vec<Option<usize>>> {
    let g = if support_rule { build_characteristic_graph(sub, f, s) } else { class_graph(sub, f, s) };
    let p = sub.marginal(s);
    let colors = coloring(&g, &p)?;
    Ok(colors.into_iter().zip(&p).map(|(c, &m)| (m > 0.0).then_some(c)).collect())
}

fn silent(j: &JointPmf, s: Source, groups: &[Vec<(usize, usize)>]) -> Vec<Vec<Option<usize>>> {
    groups
        .iter()
        .map(|cells| {
            let mut book = vec![None; j.alphabet(s).len()];
            for &(a, b) in cells {
                book[if s == Source::One { a } else { b }] = Some(0);
            }
            book
        })
        .collect()
}

fn helper_map(j: &JointPmf, groups: &[Vec<(usize, usize)>]) -> Vec<Vec<Option<usize>>> {
    let mut m = vec![vec![None; j.cols()]; j.rows()];
    for (k, cells) in groups.iter().enumerate() {
        for &(a, b) in cells {
            m[a][b] = Some(k);
        }
    }
    m
}

/// Per-index class colorings for `class_src` and, for the other source,
/// either class colorings or support-rule colorings given the first.
fn class_codebooks(
    j: &JointPmf,
    f: &FunctionTable,
    groups: &[Vec<(usize, usize)>],
    class_src: Source,
    other_support: bool,
) -> Result<[Vec<Vec<Option<usize>>>; 2]> {
    let mut books: [Vec<Vec<Option<usize>>>; 2] = [Vec::new(), Vec::new()];
    for cells in groups {
        let sub = j.restrict(cells)?;
        books[class_src.index()].push(piece_colors(&sub, f, class_src, false)?);
        books[class_src.other().index()].push(piece_colors(&sub, f, class_src.other(), other_support)?);
    }
    Ok(books)
}

/// One global coloring of `s`'s classes used under every helper index.
fn global_codebooks(
    j: &JointPmf,
    g: &GfGraph,
    groups: &[Vec<(usize, usize)>],
    s: Source,
    class_colors: &[usize],
) -> [Vec<Vec<Option<usize>>>; 2] {
    let class_of = g.class_of(s);
    let sender: Vec<Vec<Option<usize>>> = groups
        .iter()
        .map(|cells| {
            let mut book = vec![None; j.alphabet(s).len()];
            for &(a, b) in cells {
                let x = if s == Source::One { a } else { b };
                book[x] = Some(class_colors[class_of[x]]);
            }
            book
        })
        .collect();
    let quiet = silent(j, s.other(), groups);
    match s {
        Source::One => [sender, quiet],
        Source::Two => [quiet, sender],
    }
}

fn edge_groups(j: &JointPmf, g: &GfGraph, pieces: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    g.cell_groups(j, pieces)
}

/// Builds the code of `scheme` for (j, f).
pub fn build_code(scheme: SchemeKind, j: &JointPmf, f: &FunctionTable, inputs: SchemeInputs) -> Result<SchemeCode> {
    let (groups, books, side, streams, theoretical_sum) = match scheme {
        SchemeKind::Prop1 => {
            let groups = gkw_decompose(j).cell_groups();
            let books = class_codebooks(j, f, &groups, Source::One, false)?;
            let th = prop1_gkw_helper(j, f)?.sum;
            (groups, books, [SideInfo::Helper, SideInfo::Helper], None, th)
        }
        SchemeKind::Prop3 => {
            let Some(n) = inputs.nesting else {
                return invalid("prop3 needs a nesting");
            };
            if !n.is_valid(j, f) {
                return invalid("prop3 needs a nesting whose components are outcome-pure");
            }
            let roles = prop3_one_source(j, f, n)?;
            let s = if roles.swapped.sum < roles.primary.sum - 1e-12 { Source::Two } else { Source::One };
            let nests: Vec<Vec<(usize, usize)>> = n.nests().to_vec();
            let mut sender = Vec::new();
            for cells in &nests {
                let mut book = vec![None; j.alphabet(s).len()];
                for (c, comp) in cell_components(cells, j.rows(), j.cols()).iter().enumerate() {
                    for &(a, b) in comp {
                        book[if s == Source::One { a } else { b }] = Some(c);
                    }
                }
                sender.push(book);
            }
            let quiet = silent(j, s.other(), &nests);
            let books = if s == Source::One { [sender, quiet] } else { [quiet, sender] };
            let mut side = [SideInfo::Silent; 2];
            side[s.index()] = SideInfo::Helper;
            (nests, books, side, None, roles.best)
        }
        SchemeKind::KB => {
            let g = build_gf(j, f)?;
            let (d, _) = crate::gf::bipartition_scheme(&g);
            let groups = edge_groups(j, &g, &d.pieces);
            let roles = prop4_permutation_helper(j, f)?;
            let first = if roles.swapped.sum < roles.primary.sum - 1e-12 { Source::Two } else { Source::One };
            let books = class_codebooks(j, f, &groups, first, true)?;
            let mut side = [SideInfo::Helper; 2];
            side[first.other().index()] = SideInfo::HelperAndOther;
            (groups, books, side, None, roles.best)
        }
        SchemeKind::KDelta => {
            let g = build_gf(j, f)?;
            let s = low_prob_edge_scheme(&g, inputs.peel.unwrap_or(&[]), &PeelGrouping::Symmetric)?;
            let (src, _) = s.source_code.best().ok_or_else(|| Error::Inconsistency("no source suffices for kdelta".into()))?;
            let colors = s.source_code.colors[src.index()].clone().expect("sufficient source has colors");
            let groups = edge_groups(j, &g, &s.decomposition.pieces);
            let books = global_codebooks(j, &g, &groups, src, &colors);
            // piece 0 is the residual, piece 1 + i is the i-th peeled edge
            let peeled: Vec<usize> = s.decomposition.pieces[1..].iter().map(|p| p[0]).collect();
            let streams: Vec<Vec<usize>> = (0..s.decomposition.pieces.len())
                .map(|k| {
                    s.groups
                        .iter()
                        .map(|gr| match k {
                            0 => 0,
                            _ => gr.iter().position(|&e| e == peeled[k - 1]).map_or(0, |i| i + 1),
                        })
                        .collect()
                })
                .collect();
            let mut side = [SideInfo::Silent; 2];
            side[src.index()] = SideInfo::Nothing;
            (groups, books, side, Some(streams), s.total.expect("sufficient source"))
        }
        SchemeKind::KS => {
            let g = build_gf(j, f)?;
            let s = structure_split_scheme(&g, inputs.peel.unwrap_or(&[]))?;
            let (src, _) = s.source_code.best().ok_or_else(|| Error::Inconsistency("no source suffices for ks".into()))?;
            let colors = s.source_code.colors[src.index()].clone().expect("sufficient source has colors");
            let groups = edge_groups(j, &g, &s.decomposition.pieces);
            let books = global_codebooks(j, &g, &groups, src, &colors);
            let mut side = [SideInfo::Silent; 2];
            side[src.index()] = SideInfo::Nothing;
            (groups, books, side, None, s.total.expect("sufficient source"))
        }
    };
    let helper_streams = streams.unwrap_or_else(|| (0..groups.len()).map(|k| vec![k]).collect());
    let helper = helper_map(j, &groups);
    let mut code = SchemeCode {
        scheme,
        helper,
        helper_count: groups.len(),
        helper_streams,
        codebooks: books,
        side,
        decoder: Vec::new(),
        theoretical_sum,
        lookup: HashMap::new(),
    };
    code.fill_decoder(j, f)?;
    Ok(code)
}

impl SchemeCode {
    fn fill_decoder(&mut self, j: &JointPmf, f: &FunctionTable) -> Result<()> {
        let mut first_cell: Vec<(usize, usize)> = Vec::new();
        for (a, b) in j.support() {
            let key = self.encode(a, b).ok_or_else(|| {
                Error::Inconsistency(format!("cell ({}, {}) has no codeword", j.x1().get(a), j.x2().get(b)))
            })?;
            let out = f.at(a, b);
            match self.lookup.get(&key) {
                Some(&e) if &self.decoder[e].outcome != out => {
                    let (pa, pb) = first_cell[e];
                    return Err(Error::Inconsistency(format!(
                        "decoder ambiguity: cells ({}, {}) and ({}, {}) share codeword {:?} with outcomes {} and {}",
                        j.x1().get(pa),
                        j.x2().get(pb),
                        j.x1().get(a),
                        j.x2().get(b),
                        key,
                        self.decoder[e].outcome,
                        out
                    )));
                }
                Some(_) => {}
                None => {
                    self.lookup.insert(key, self.decoder.len());
                    self.decoder.push(DecoderEntry { helper: key.0, c1: key.1, c2: key.2, outcome: out.clone() });
                    first_cell.push((a, b));
                }
            }
        }
        Ok(())
    }

    /// (helper index, color 1, color 2) of a support cell.
    pub fn encode(&self, a: usize, b: usize) -> Option<(usize, usize, usize)> {
        let k = self.helper.get(a)?.get(b).copied().flatten()?;
        Some((k, self.codebooks[0][k][a]?, self.codebooks[1][k][b]?))
    }

    pub fn decode(&self, key: (usize, usize, usize)) -> Option<&Label> {
        self.lookup.get(&key).map(|&e| &self.decoder[e].outcome)
    }

    /// Helper rate and per-source rates when codewords occur with `weights`.
    pub fn rates(&self, weights: &BTreeMap<(usize, usize, usize), f64>) -> (f64, [f64; 2]) {
        let marg = |f: &dyn Fn(&(usize, usize, usize)) -> Vec<usize>| -> f64 {
            let mut m: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (k, &w) in weights {
                *m.entry(f(k)).or_default() += w;
            }
            let w: Vec<f64> = m.into_values().collect();
            h_normalized(&w)
        };
        let streams = self.helper_streams.first().map_or(0, Vec::len);
        let helper: f64 = (0..streams).map(|t| marg(&|k| vec![self.helper_streams[k.0][t]])).sum();
        let h_k = marg(&|k| vec![k.0]);
        let h_kc1 = marg(&|k| vec![k.0, k.1]);
        let h_kc2 = marg(&|k| vec![k.0, k.2]);
        let h_all = marg(&|k| vec![k.0, k.1, k.2]);
        let mut out = [0.0; 2];
        for (i, side) in self.side.iter().enumerate() {
            out[i] = match side {
                SideInfo::Silent => 0.0,
                SideInfo::Nothing => marg(&|k| vec![if i == 0 { k.1 } else { k.2 }]),
                SideInfo::Helper => (if i == 0 { h_kc1 } else { h_kc2 }) - h_k,
                SideInfo::HelperAndOther => h_all - if i == 0 { h_kc2 } else { h_kc1 },
            }
            .max(0.0);
        }
        (helper, out)
    }

    /// Rates of this one-shot code under the true distribution.
    pub fn expected_rates(&self, j: &JointPmf) -> (f64, [f64; 2]) {
        let mut w = BTreeMap::new();
        for (a, b) in j.support() {
            if let Some(key) = self.encode(a, b) {
                *w.entry(key).or_default() += j.mass(a, b);
            }
        }
        self.rates(&w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub scheme: SchemeKind,
    pub samples: u64,
    pub seed: u64,
    pub errors: u64,
    /// Empirical entropies of the transmitted streams.
    pub helper_rate: f64,
    pub source_rates: [f64; 2],
    pub sum_rate: f64,
    /// Same quantities for the one-shot code under the true pmf.
    pub expected_sum_rate: f64,
    pub theoretical_sum: f64,
}

/// Samples `samples` i.i.d. pairs from `j`, encodes and decodes each one.
pub fn simulate(code: &SchemeCode, j: &JointPmf, f: &FunctionTable, samples: u64, seed: u64) -> Result<SimulationReport> {
    if samples == 0 {
        return invalid("samples must be at least 1");
    }
    let cells = j.support();
    let mut cdf = Vec::with_capacity(cells.len());
    let mut acc = 0.0;
    for &(a, b) in &cells {
        acc += j.mass(a, b);
        cdf.push(acc);
    }
    let total = acc;
    let shards = samples.div_ceil(SHARD);
    let per_shard: Vec<(Vec<u64>, u64)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let n = SHARD.min(samples - s * SHARD);
            let mut counts = vec![0u64; cells.len()];
            let mut errors = 0;
            for _ in 0..n {
                let u: f64 = rng.random::<f64>() * total;
                let c = cdf.partition_point(|&x| x <= u).min(cells.len() - 1);
                counts[c] += 1;
                let (a, b) = cells[c];
                let ok = code.encode(a, b).and_then(|key| code.decode(key)).is_some_and(|o| o == f.at(a, b));
                if !ok {
                    errors += 1;
                }
            }
            (counts, errors)
        })
        .collect();
    let mut counts = vec![0u64; cells.len()];
    let mut errors = 0;
    for (c, e) in per_shard {
        for (t, x) in counts.iter_mut().zip(c) {
            *t += x;
        }
        errors += e;
    }
    let mut w: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for (&(a, b), &c) in cells.iter().zip(&counts) {
        if c > 0 {
            if let Some(key) = code.encode(a, b) {
                *w.entry(key).or_default() += c as f64;
            }
        }
    }
    let (helper_rate, source_rates) = code.rates(&w);
    let (eh, es) = code.expected_rates(j);
    Ok(SimulationReport {
        scheme: code.scheme,
        samples,
        seed,
        errors,
        helper_rate,
        source_rates,
        sum_rate: helper_rate + source_rates[0] + source_rates[1],
        expected_sum_rate: eh + es[0] + es[1],
        theoretical_sum: code.theoretical_sum,
    })
}
