//! iDSD chromosomes: `k` distinct section indices, each carrying a liquid
//! fraction, plus the bit-string codec and the genetic operators.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use polyflame_core::InitialDistribution;

use crate::constraints::ConstraintSet;
use crate::space::{GaRng, SearchSpace};
use crate::GaError;

pub const SECTION_BITS: usize = 4;
pub const FRACTION_BITS: usize = 16;
pub const GENE_BITS: usize = SECTION_BITS + FRACTION_BITS;
pub const MAX_SECTIONS: usize = 1 << SECTION_BITS;
const FRACTION_LEVELS: f64 = ((1u32 << FRACTION_BITS) - 1) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    /// 1-based section indices.
    pub sections: Vec<usize>,
    pub fractions: Vec<f64>,
}

impl Chromosome {
    pub fn new(sections: Vec<usize>, fractions: Vec<f64>) -> Result<Self, GaError> {
        if sections.len() != fractions.len() {
            return Err(GaError::Malformed(format!(
                "{} sections but {} fractions",
                sections.len(),
                fractions.len()
            )));
        }
        Ok(Self { sections, fractions })
    }

    pub fn k(&self) -> usize {
        self.sections.len()
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }

    pub fn has_distinct_sections(&self, n_sections: usize) -> bool {
        let mut seen = vec![false; n_sections + 1];
        self.sections.iter().all(|&s| {
            let fresh = (1..=n_sections).contains(&s) && !seen[s];
            if fresh {
                seen[s] = true;
            }
            fresh
        })
    }

    /// Dense per-section fractions.
    pub fn dense(&self, n_sections: usize) -> Vec<f64> {
        let mut delta = vec![0.0; n_sections];
        for (&s, &f) in self.sections.iter().zip(&self.fractions) {
            delta[s - 1] += f;
        }
        delta
    }

    pub fn to_distribution(&self, n_sections: usize) -> Result<InitialDistribution, GaError> {
        if !self.has_distinct_sections(n_sections) {
            return Err(GaError::Malformed(format!("sections {:?} not distinct in 1..={n_sections}", self.sections)));
        }
        Ok(InitialDistribution::new(self.dense(n_sections))?)
    }

    /// Share of the liquid held by the fullest section (0 for an empty spray).
    pub fn dominant_share(&self) -> f64 {
        let total = self.total();
        if total <= 0.0 {
            return 0.0;
        }
        self.fractions.iter().cloned().fold(0.0, f64::max) / total
    }
}

fn quantize(fraction: f64, cap: f64) -> u32 {
    ((fraction / cap).clamp(0.0, 1.0) * FRACTION_LEVELS).round() as u32
}

/// Bit string of `k·20` characters: per gene, 4 bits of `section − 1` then
/// 16 bits of `fraction / cap`, most significant bit first.
pub fn encode(ch: &Chromosome, cap: f64) -> Result<String, GaError> {
    let mut bits = String::with_capacity(ch.k() * GENE_BITS);
    for (&s, &f) in ch.sections.iter().zip(&ch.fractions) {
        if !(1..=MAX_SECTIONS).contains(&s) {
            return Err(GaError::Malformed(format!("section {s} does not fit in {SECTION_BITS} bits")));
        }
        bits.push_str(&format!("{:0w$b}", s - 1, w = SECTION_BITS));
        bits.push_str(&format!("{:0w$b}", quantize(f, cap), w = FRACTION_BITS));
    }
    Ok(bits)
}

pub fn decode(bits: &str, cap: f64) -> Result<Chromosome, GaError> {
    if bits.len() % GENE_BITS != 0 {
        return Err(GaError::Malformed(format!(
            "bit string length {} is not a multiple of {GENE_BITS}",
            bits.len()
        )));
    }
    if let Some(bad) = bits.chars().find(|c| *c != '0' && *c != '1') {
        return Err(GaError::Malformed(format!("unexpected character {bad:?}")));
    }
    let mut sections = Vec::new();
    let mut fractions = Vec::new();
    for gene in bits.as_bytes().chunks(GENE_BITS) {
        let gene = std::str::from_utf8(gene).expect("ascii checked above");
        let s = usize::from_str_radix(&gene[..SECTION_BITS], 2).expect("binary checked above");
        let q = u32::from_str_radix(&gene[SECTION_BITS..], 2).expect("binary checked above");
        sections.push(s + 1);
        fractions.push(cap * q as f64 / FRACTION_LEVELS);
    }
    Chromosome::new(sections, fractions)
}

/// Search space of `k_dof`-gene iDSDs over `n_sections` sections.
#[derive(Debug, Clone, PartialEq)]
pub struct IdsdSpace {
    pub n_sections: usize,
    pub k_dof: usize,
    pub delta_cap: f64,
    pub e_bar_const: f64,
}

impl IdsdSpace {
    pub fn new(n_sections: usize, k_dof: usize, delta_cap: f64, e_bar_const: f64) -> Result<Self, GaError> {
        if n_sections == 0 || n_sections > MAX_SECTIONS {
            return Err(GaError::InvalidConfig {
                field: "n_sections",
                reason: format!("must lie in 1..={MAX_SECTIONS}"),
            });
        }
        if k_dof == 0 || k_dof > n_sections {
            return Err(GaError::InvalidConfig {
                field: "k_dof",
                reason: format!("must lie in 1..={n_sections}, got {k_dof}"),
            });
        }
        if !(delta_cap > 0.0 && delta_cap <= 1.0) {
            return Err(GaError::InvalidConfig {
                field: "delta_cap",
                reason: "must lie in (0, 1]".into(),
            });
        }
        Ok(Self {
            n_sections,
            k_dof,
            delta_cap,
            e_bar_const,
        })
    }

    fn sigma(&self) -> f64 {
        0.05 * self.delta_cap
    }

    fn unused_section(&self, taken: &[usize], rng: &mut GaRng) -> Option<usize> {
        let free: Vec<usize> = (1..=self.n_sections).filter(|s| !taken.contains(s)).collect();
        if free.is_empty() {
            None
        } else {
            Some(free[rng.random_range(0..free.len())])
        }
    }
}

impl SearchSpace for IdsdSpace {
    type Genome = Chromosome;

    /// Sections without replacement; fractions uniform on
    /// `{δ ≥ 0, Σδ ≤ cap}` (normalized exponentials with one slack component).
    fn sample(&self, rng: &mut GaRng) -> Chromosome {
        let sections: Vec<usize> = sample(rng, self.n_sections, self.k_dof).into_iter().map(|s| s + 1).collect();
        let draws: Vec<f64> = (0..=self.k_dof).map(|_| Exp1.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        let fractions = draws[..self.k_dof].iter().map(|e| self.delta_cap * e / sum).collect();
        Chromosome { sections, fractions }
    }

    /// Single cut over the interleaved string `[s₁, f₁, s₂, f₂, …]`. The
    /// children are returned unrepaired.
    fn crossover(&self, a: &Chromosome, b: &Chromosome, rng: &mut GaRng) -> (Chromosome, Chromosome) {
        let len = 2 * a.k();
        let cut = rng.random_range(0..=len);
        let (mut x, mut y) = (a.clone(), b.clone());
        for pos in cut..len {
            let g = pos / 2;
            if pos % 2 == 0 {
                std::mem::swap(&mut x.sections[g], &mut y.sections[g]);
            } else {
                std::mem::swap(&mut x.fractions[g], &mut y.fractions[g]);
            }
        }
        (x, y)
    }

    fn mutate(&self, ch: &mut Chromosome, rate: f64, rng: &mut GaRng) {
        let step = Normal::new(0.0, self.sigma()).expect("positive sigma");
        for g in 0..ch.k() {
            if rng.random::<f64>() < rate {
                if let Some(s) = self.unused_section(&ch.sections, rng) {
                    ch.sections[g] = s;
                }
            }
            if rng.random::<f64>() < rate {
                ch.fractions[g] = (ch.fractions[g] + step.sample(rng)).max(0.0);
            }
        }
    }

    fn repair(&self, ch: &mut Chromosome, rng: &mut GaRng) {
        for g in 0..ch.k() {
            let clash = !(1..=self.n_sections).contains(&ch.sections[g]) || ch.sections[..g].contains(&ch.sections[g]);
            if clash {
                let taken: Vec<usize> = ch.sections[..g].to_vec();
                ch.sections[g] = self
                    .unused_section(&taken, rng)
                    .expect("k_dof ≤ n_sections leaves a free section");
            }
        }
        for f in &mut ch.fractions {
            if !(*f >= 0.0) {
                *f = 0.0;
            }
        }
        let total = ch.total();
        if total > self.delta_cap {
            let scale = self.delta_cap / total;
            ch.fractions.iter_mut().for_each(|f| *f *= scale);
        }
    }

    /// Sorted `(section, quantized fraction)` pairs, so gene order does not
    /// split the cache.
    fn key(&self, ch: &Chromosome) -> Vec<u8> {
        let mut pairs: Vec<(usize, u32)> = ch
            .sections
            .iter()
            .zip(&ch.fractions)
            .map(|(&s, &f)| (s, quantize(f, self.delta_cap)))
            .collect();
        pairs.sort_unstable();
        pairs
            .into_iter()
            .flat_map(|(s, q)| [s as u8, (q >> 8) as u8, q as u8])
            .collect()
    }

    /// `[Ē, δ₁, …, δ_N]`.
    fn decision_vector(&self, ch: &Chromosome) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n_sections + 1);
        x.push(self.e_bar_const);
        x.extend(ch.dense(self.n_sections));
        x
    }

    fn project(&self, ch: &mut Chromosome, constraints: &ConstraintSet, tol: f64) -> bool {
        let mut x = self.decision_vector(ch);
        if constraints.is_feasible(&x, tol) {
            return true;
        }
        let mut free = vec![false; x.len()];
        for &s in &ch.sections {
            free[s] = true;
        }
        let lower = vec![0.0; x.len()];
        let upper = vec![self.delta_cap; x.len()];
        let ok = constraints.project(&mut x, &free, &lower, &upper, tol);
        for (g, &s) in ch.sections.iter().enumerate() {
            ch.fractions[g] = x[s];
        }
        ok
    }
}
