//! Probability primitives: distributions, entropies and the scenario
//! distributions used by the sweeps. Logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::label::{Alphabet, Label};

/// Normalization tolerance for distributions.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Poisson truncation point (remaining tail mass).
const POISSON_TAIL: f64 = 1e-12;

/// One of the two sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    One,
    Two,
}

impl Source {
    pub fn other(self) -> Source {
        match self {
            Source::One => Source::Two,
            Source::Two => Source::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Source::One => 0,
            Source::Two => 1,
        }
    }

    pub fn from_number(n: u8) -> Result<Source> {
        match n {
            1 => Ok(Source::One),
            2 => Ok(Source::Two),
            _ => invalid(format!("source must be 1 or 2, got {n}")),
        }
    }
}

/// `-sum w log2 w` over positive entries. No normalization check.
pub fn h(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    // rounding can push a point mass slightly above 1; also avoids -0.0
    if s <= 0.0 {
        0.0
    } else {
        s
    }
}

/// Entropy of `weights / sum(weights)`; 0 for an all-zero vector.
pub fn h_normalized(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().filter(|&&w| w > 0.0).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let s: f64 = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum();
    if s <= 0.0 {
        0.0
    } else {
        s
    }
}

/// Binary entropy function.
pub fn h2(p: f64) -> f64 {
    h(&[p, 1.0 - p])
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return invalid("distribution must be nonempty");
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return invalid(format!("negative or non-finite probability {p}"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return invalid(format!("probabilities sum to {total}, expected 1"));
    }
    Ok(())
}

/// A validated probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PmfVector(Vec<f64>);

impl PmfVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs)?;
        Ok(PmfVector(probs))
    }

    pub fn uniform(m: usize) -> Self {
        PmfVector(vec![1.0 / m as f64; m])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        h(&self.0)
    }
}

impl<'de> Deserialize<'de> for PmfVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        PmfVector::new(v).map_err(serde::de::Error::custom)
    }
}

/// Validated entropy of a raw probability list.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    check_probs(probs)?;
    Ok(h(probs))
}

#[derive(Serialize, Deserialize)]
struct JointPmfJson {
    x1: Alphabet,
    x2: Alphabet,
    p: Vec<Vec<f64>>,
}

/// Joint distribution of (X1, X2) on labelled alphabets. Rows index X1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JointPmfJson", into = "JointPmfJson")]
pub struct JointPmf {
    x1: Alphabet,
    x2: Alphabet,
    p: Vec<Vec<f64>>,
}

impl TryFrom<JointPmfJson> for JointPmf {
    type Error = Error;
    fn try_from(raw: JointPmfJson) -> Result<Self> {
        JointPmf::new(raw.x1, raw.x2, raw.p)
    }
}

impl From<JointPmf> for JointPmfJson {
    fn from(j: JointPmf) -> Self {
        JointPmfJson { x1: j.x1, x2: j.x2, p: j.p }
    }
}

impl JointPmf {
    pub fn new(x1: Alphabet, x2: Alphabet, p: Vec<Vec<f64>>) -> Result<Self> {
        if p.len() != x1.len() || p.iter().any(|row| row.len() != x2.len()) {
            return invalid(format!(
                "mass matrix shape does not match alphabets {}x{}",
                x1.len(),
                x2.len()
            ));
        }
        let flat: Vec<f64> = p.iter().flatten().copied().collect();
        check_probs(&flat)?;
        Ok(JointPmf { x1, x2, p })
    }

    /// Integer alphabets `0..rows` and `0..cols`.
    pub fn from_matrix(p: Vec<Vec<f64>>) -> Result<Self> {
        let rows = p.len() as i64;
        let cols = p.first().map_or(0, |r| r.len()) as i64;
        if rows == 0 || cols == 0 {
            return invalid("mass matrix must be nonempty");
        }
        Self::new(Alphabet::range(0, rows - 1), Alphabet::range(0, cols - 1), p)
    }

    /// Product distribution of two marginals.
    pub fn product(x1: Alphabet, p1: &[f64], x2: Alphabet, p2: &[f64]) -> Result<Self> {
        let p = p1.iter().map(|a| p2.iter().map(|b| a * b).collect()).collect();
        Self::new(x1, x2, p)
    }

    pub fn x1(&self) -> &Alphabet {
        &self.x1
    }

    pub fn x2(&self) -> &Alphabet {
        &self.x2
    }

    pub fn alphabet(&self, s: Source) -> &Alphabet {
        match s {
            Source::One => &self.x1,
            Source::Two => &self.x2,
        }
    }

    pub fn rows(&self) -> usize {
        self.x1.len()
    }

    pub fn cols(&self) -> usize {
        self.x2.len()
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn in_support(&self, i: usize, j: usize) -> bool {
        self.p[i][j] > 0.0
    }

    /// Positive-mass cells in row-major (canonical) order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for (i, row) in self.p.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m > 0.0 {
                    cells.push((i, j));
                }
            }
        }
        cells
    }

    pub fn marginal1(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal2(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols()];
        for row in &self.p {
            for (j, &v) in row.iter().enumerate() {
                m[j] += v;
            }
        }
        m
    }

    pub fn marginal(&self, s: Source) -> Vec<f64> {
        match s {
            Source::One => self.marginal1(),
            Source::Two => self.marginal2(),
        }
    }

    pub fn marginals(&self) -> (PmfVector, PmfVector) {
        (PmfVector(self.marginal1()), PmfVector(self.marginal2()))
    }

    pub fn joint_entropy(&self) -> f64 {
        let flat: Vec<f64> = self.p.iter().flatten().copied().collect();
        h(&flat)
    }

    pub fn entropy_of(&self, s: Source) -> f64 {
        h(&self.marginal(s))
    }

    /// H(X2 | X1).
    pub fn cond_entropy_2_given_1(&self) -> f64 {
        self.p
            .iter()
            .map(|row| {
                let m: f64 = row.iter().sum();
                if m > 0.0 {
                    m * h_normalized(row)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// H(X1 | X2).
    pub fn cond_entropy_1_given_2(&self) -> f64 {
        self.transpose().cond_entropy_2_given_1()
    }

    /// H(X_s | X_other).
    pub fn cond_entropy(&self, s: Source) -> f64 {
        match s {
            Source::One => self.cond_entropy_1_given_2(),
            Source::Two => self.cond_entropy_2_given_1(),
        }
    }

    pub fn transpose(&self) -> JointPmf {
        let p = (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.p[i][j]).collect())
            .collect();
        JointPmf { x1: self.x2.clone(), x2: self.x1.clone(), p }
    }

    /// Keeps only `cells` (same alphabets) and renormalizes. Errors when the
    /// kept mass is zero.
    pub fn restrict(&self, cells: &[(usize, usize)]) -> Result<JointPmf> {
        let total: f64 = cells.iter().map(|&(i, j)| self.p[i][j]).sum();
        if total <= 0.0 {
            return Err(Error::Inconsistency("restriction to a zero-mass cell set".into()));
        }
        let mut p = vec![vec![0.0; self.cols()]; self.rows()];
        for &(i, j) in cells {
            p[i][j] = self.p[i][j] / total;
        }
        Ok(JointPmf { x1: self.x1.clone(), x2: self.x2.clone(), p })
    }

    /// True when the joint mass factorises into its marginals (within tolerance).
    pub fn is_product(&self) -> bool {
        let m1 = self.marginal1();
        let m2 = self.marginal2();
        self.p
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| (v - m1[i] * m2[j]).abs() <= 1e-12))
    }

    pub fn label_cell(&self, a: &Label, b: &Label) -> Option<(usize, usize)> {
        Some((self.x1.index_of(a)?, self.x2.index_of(b)?))
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn binomial_masses(n: u64, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            if p == 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            if p == 1.0 {
                return if k == n { 1.0 } else { 0.0 };
            }
            (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
        })
        .collect()
}

/// Binomial(n, p) masses on 0..=n.
pub fn binomial_pmf(n: u64, p: f64) -> Result<PmfVector> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("binomial p must lie in [0,1], got {p}"));
    }
    let masses = binomial_masses(n, p);
    let total: f64 = masses.iter().sum();
    PmfVector::new(masses.into_iter().map(|m| m / total).collect())
}

/// Truncated, renormalized Poisson masses for N = 0..len.
fn poisson_masses(lambda: f64) -> Vec<f64> {
    let mut masses = Vec::new();
    let mut log_p = -lambda;
    let mut cum = 0.0;
    let mut n = 0u64;
    let hard_cap = (lambda + 60.0 * lambda.sqrt() + 200.0) as u64;
    loop {
        let m = log_p.exp();
        masses.push(m);
        cum += m;
        if (1.0 - cum < POISSON_TAIL && n as f64 >= lambda) || n >= hard_cap {
            break;
        }
        n += 1;
        log_p += lambda.ln() - (n as f64).ln();
    }
    masses.iter().map(|m| m / cum).collect()
}

/// N ~ Poisson(lambda), Y1 ~ B(N, p), Y2 ~ B(N, 1-p) conditionally
/// independent given N, with Y1 clumped at `cap1` and Y2 at `cap2`.
pub fn poisson_clumped_joint(lambda: f64, p: f64, cap1: usize, cap2: usize) -> Result<JointPmf> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return invalid(format!("Poisson rate must be positive, got {lambda}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("p must lie in [0,1], got {p}"));
    }
    if cap1 == 0 || cap2 == 0 {
        return invalid("clumping caps must be at least 1");
    }
    let mut mass = vec![vec![0.0; cap2 + 1]; cap1 + 1];
    for (n, &pn) in poisson_masses(lambda).iter().enumerate() {
        let b1 = binomial_masses(n as u64, p);
        let b2 = binomial_masses(n as u64, 1.0 - p);
        for (y1, &a) in b1.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let row = &mut mass[y1.min(cap1)];
            for (y2, &b) in b2.iter().enumerate() {
                row[y2.min(cap2)] += pn * a * b;
            }
        }
    }
    let total: f64 = mass.iter().flatten().sum();
    for v in mass.iter_mut().flatten() {
        *v /= total;
    }
    JointPmf::new(Alphabet::range(0, cap1 as i64), Alphabet::range(0, cap2 as i64), mass)
}

/// Zipf(gamma) on k ranks: p_i proportional to i^-gamma.
pub fn zipf_pmf(k: usize, gamma: f64) -> Result<PmfVector> {
    if k == 0 {
        return invalid("zipf needs at least one rank");
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return invalid(format!("zipf skew must be nonnegative, got {gamma}"));
    }
    let w: Vec<f64> = (1..=k).map(|i| (i as f64).powf(-gamma)).collect();
    let total: f64 = w.iter().sum();
    PmfVector::new(w.into_iter().map(|x| x / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn example2() -> JointPmf {
        let d = 24.0;
        JointPmf::from_matrix(vec![
            vec![12.0 / d, 0.0, 0.0],
            vec![0.0, 2.0 / d, 3.0 / d],
            vec![0.0, 3.0 / d, 4.0 / d],
        ])
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!(close(entropy(&[1.0 / 3.0, 2.0 / 3.0]).unwrap(), 0.918, 5e-4));
        assert_eq!(entropy(&[1.0]).unwrap(), 0.0);
        assert!(close(entropy(&[0.4, 0.4, 0.2]).unwrap(), 1.5219, 5e-4));
        assert!(entropy(&[0.5, 0.6]).is_err());
        assert!(entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn uniform_is_log_m() {
        for m in 1..20 {
            assert!(close(PmfVector::uniform(m).entropy(), (m as f64).log2(), 1e-12));
        }
    }

    #[test]
    fn example2_quantities() {
        let j = example2();
        let (m1, _) = j.marginals();
        assert!(close(m1.probs()[0], 0.5, 1e-15));
        assert!(close(m1.probs()[1], 5.0 / 24.0, 1e-15));
        assert!(close(m1.probs()[2], 7.0 / 24.0, 1e-15));
        // (5/24) h(2/5) + (7/24) h(3/7)
        let oracle = 5.0 / 24.0 * h2(0.4) + 7.0 / 24.0 * h2(3.0 / 7.0);
        assert!(close(j.cond_entropy_2_given_1(), oracle, 1e-12));
        assert!(close(j.cond_entropy_2_given_1(), 0.4896, 5e-4));
        assert!(close(j.joint_entropy(), 1.9796, 5e-4));
    }

    #[test]
    fn example3_conditional_is_zero() {
        let j = JointPmf::new(
            Alphabet::from_ints(&[1, 2, 3]).unwrap(),
            Alphabet::from_ints(&[0, 1, 3]).unwrap(),
            vec![vec![0.5, 0.0, 0.0], vec![0.0, 0.0, 0.25], vec![0.0, 0.25, 0.0]],
        )
        .unwrap();
        assert_eq!(j.cond_entropy_1_given_2(), 0.0);
        assert!(close(j.joint_entropy(), 1.5, 1e-12));
    }

    #[test]
    fn diagonal_blocks() {
        let mut p = vec![vec![0.0; 4]; 4];
        for (i, row) in p.iter_mut().enumerate() {
            row[i] = 0.25;
        }
        assert!(close(JointPmf::from_matrix(p).unwrap().joint_entropy(), 2.0, 1e-12));
    }

    #[test]
    fn independent_conditional_equals_marginal() {
        let j = JointPmf::product(Alphabet::range(0, 2), &[0.2, 0.3, 0.5], Alphabet::range(0, 1), &[0.9, 0.1])
            .unwrap();
        assert!(close(j.cond_entropy_2_given_1(), h2(0.1), 1e-12));
        assert!(j.is_product());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_pmf(1, 0.5).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(binomial_pmf(6, 0.0).unwrap().probs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = binomial_pmf(5, 0.001).unwrap();
        assert!(close(b.probs()[0], 0.999f64.powi(5), 1e-12));
        assert!(binomial_pmf(3, 1.2).is_err());
    }

    #[test]
    fn zipf_examples() {
        assert_eq!(zipf_pmf(4, 0.0).unwrap().probs(), &[0.25; 4]);
        assert_eq!(zipf_pmf(1, 3.0).unwrap().probs(), &[1.0]);
        let z = zipf_pmf(3, 1.0).unwrap();
        for (a, b) in z.probs().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!(close(*a, b, 1e-12));
        }
    }

    /// Independent triple sum over (N, Y1, Y2), written without reuse of the
    /// library's binomial or truncation helpers.
    fn poisson_oracle(lambda: f64, p: f64, cap1: usize, cap2: usize) -> Vec<Vec<f64>> {
        let fact = |n: usize| (1..=n).fold(1.0f64, |a, k| a * k as f64);
        let choose = |n: usize, k: usize| fact(n) / (fact(k) * fact(n - k));
        let mut out = vec![vec![0.0; cap2 + 1]; cap1 + 1];
        let mut total = 0.0;
        for n in 0..120usize {
            let pn = (-lambda).exp() * lambda.powi(n as i32) / fact(n);
            for y1 in 0..=n {
                for y2 in 0..=n {
                    let a = choose(n, y1) * p.powi(y1 as i32) * (1.0 - p).powi((n - y1) as i32);
                    let b = choose(n, y2) * (1.0 - p).powi(y2 as i32) * p.powi((n - y2) as i32);
                    out[y1.min(cap1)][y2.min(cap2)] += pn * a * b;
                    total += pn * a * b;
                }
            }
        }
        for v in out.iter_mut().flatten() {
            *v /= total;
        }
        out
    }

    #[test]
    fn poisson_matches_oracle() {
        for &p in &[0.0, 0.1, 0.5, 0.77, 1.0] {
            let j = poisson_clumped_joint(5.0, p, 6, 5).unwrap();
            let oracle = poisson_oracle(5.0, p, 6, 5);
            for i in 0..7 {
                for k in 0..6 {
                    assert!(close(j.mass(i, k), oracle[i][k], 1e-9), "p={p} cell ({i},{k})");
                }
            }
        }
    }

    #[test]
    fn poisson_cap_marginal_is_tail_sum() {
        let j = poisson_clumped_joint(5.0, 0.5, 6, 5).unwrap();
        // Y1 ~ Poisson(5 p) by thinning.
        let lam = 2.5f64;
        let mut below = 0.0;
        let mut term = (-lam).exp();
        for y in 0..6 {
            below += term;
            term *= lam / (y + 1) as f64;
        }
        assert!(close(j.marginal1()[6], 1.0 - below, 1e-9));
    }

    #[test]
    fn poisson_small_rate_concentrates_at_origin() {
        let j = poisson_clumped_joint(1e-9, 0.3, 6, 5).unwrap();
        assert!(close(j.mass(0, 0), 1.0, 1e-8));
        assert!(poisson_clumped_joint(0.0, 0.3, 6, 5).is_err());
    }

    #[test]
    fn json_round_trip() {
        let j = example2();
        let s = serde_json::to_string(&j).unwrap();
        let back: JointPmf = serde_json::from_str(&s).unwrap();
        assert_eq!(j, back);
        assert!(serde_json::from_str::<JointPmf>(r#"{"x1":[0],"x2":[0,1],"p":[[0.5,0.6]]}"#).is_err());
    }
}
