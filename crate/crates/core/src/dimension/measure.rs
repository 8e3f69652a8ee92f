use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use super::pressure::{WordSpectrum, DEFAULT_WORD_BUDGET};
use crate::error::{Error, Result};
use crate::ifs::{Word, IFS2};

/// Level-`n` Gibbs weights `w(v) ∝ φˢ(A_v)` over words of length `n`.
///
/// Words are grouped by their sequence of linear classes (maps with equal
/// linear parts); every concrete word in a class word carries the same weight.
/// Class words are indexed base-`k` with the first letter most significant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsLevel {
    pub n: usize,
    pub s: f64,
    pub classes: Vec<Vec<usize>>,
    /// Weight of each concrete word, per class word.
    pub weights: Vec<f64>,
    /// Number of concrete words per class word.
    pub multiplicity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MeasureWeights {
    Bernoulli(Vec<f64>),
    Gibbs(GibbsLevel),
}

impl MeasureWeights {
    pub fn uniform(m: usize) -> Self {
        MeasureWeights::Bernoulli(vec![1.0 / m as f64; m])
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            MeasureWeights::Bernoulli(p) => {
                if p.len() != m {
                    return Err(Error::InvalidWeights(format!(
                        "{} weights for {m} maps",
                        p.len()
                    )));
                }
                if let Some(i) = p.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidWeights(format!(
                        "weight {i} = {} is not positive",
                        p[i]
                    )));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
            MeasureWeights::Gibbs(g) => {
                let covered: usize = g.classes.iter().map(|c| c.len()).sum();
                if covered != m {
                    return Err(Error::InvalidWeights(format!(
                        "Gibbs classes cover {covered} of {m} maps"
                    )));
                }
                let total: f64 = g
                    .weights
                    .iter()
                    .zip(&g.multiplicity)
                    .map(|(w, k)| w * k)
                    .sum();
                if (total - 1.0).abs() > 1e-12 || g.weights.iter().any(|&w| !(w > 0.0)) {
                    return Err(Error::InvalidWeights(format!(
                        "Gibbs weights not a positive probability vector (sum {total})"
                    )));
                }
                Ok(())
            }
        }
    }
}

impl GibbsLevel {
    fn class_of(&self, map: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&map))
    }

    /// Weight of a concrete word of length `n`.
    pub fn word_weight(&self, w: &Word) -> Result<f64> {
        if w.len() != self.n {
            return Err(Error::invalid(format!(
                "word of length {} for level-{} weights",
                w.len(),
                self.n
            )));
        }
        let k = self.classes.len();
        let mut idx = 0usize;
        for &l in w.letters() {
            let c = self.class_of(l).ok_or(Error::LetterOutOfRange {
                letter: l,
                alphabet: self.classes.iter().map(|c| c.len()).sum(),
            })?;
            idx = idx * k + c;
        }
        Ok(self.weights[idx])
    }

    fn decode(&self, mut idx: usize, out: &mut [usize]) {
        let k = self.classes.len();
        for slot in out.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
    }
}

/// `φˢ(A_w) / Σ_{|v|=n} φˢ(A_v)` for words of length `n`.
pub fn gibbs_weights(ifs: &IFS2, n: usize, s: f64) -> Result<MeasureWeights> {
    let spec = WordSpectrum::build(ifs, n, DEFAULT_WORD_BUDGET)?;
    Ok(MeasureWeights::Gibbs(gibbs_from_spectrum(&spec, n, s)))
}

pub(crate) fn gibbs_from_spectrum(spec: &WordSpectrum, n: usize, s: f64) -> GibbsLevel {
    let level = spec.level(n);
    let log_z = level.log_partition(s);
    let weights = (0..level.len())
        .map(|i| (level.log_phi(i, s) - log_z).exp())
        .collect();
    let multiplicity = level.log_mult.iter().map(|l| l.exp().round()).collect();
    GibbsLevel {
        n,
        s,
        classes: spec.classes().to_vec(),
        weights,
        multiplicity,
    }
}

/// Entropy of one letter: exact for Bernoulli, `(1/n)·H(level-n weights)` for Gibbs.
pub fn entropy(weights: &MeasureWeights) -> f64 {
    match weights {
        MeasureWeights::Bernoulli(p) => -p.iter().map(|&x| x * x.ln()).sum::<f64>(),
        MeasureWeights::Gibbs(g) => {
            let h: f64 = g
                .weights
                .iter()
                .zip(&g.multiplicity)
                .map(|(&w, &k)| -k * w * w.ln())
                .sum();
            h / g.n as f64
        }
    }
}

/// `max` over class words `uv` of length `n` and every split of
/// `w(uv)/(w(u)w(v))` and its reciprocal, with each factor weighted at its own level.
pub fn quasi_bernoulli_constant(ifs: &IFS2, n: usize, s: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("need n ≥ 2 to split words"));
    }
    let spec = WordSpectrum::build(ifs, n, DEFAULT_WORD_BUDGET)?;
    let levels: Vec<GibbsLevel> = (1..=n).map(|j| gibbs_from_spectrum(&spec, j, s)).collect();
    let k = spec.classes().len();
    let top = &levels[n - 1];
    let mut worst: f64 = 1.0;
    for idx in 0..top.weights.len() {
        let mut div = 1usize;
        for split in 1..n {
            div *= k;
            // the last `split` letters form v, the first n − split form u
            let u = idx / div;
            let v = idx % div;
            let wu = levels[n - split - 1].weights[u];
            let wv = levels[split - 1].weights[v];
            let r = top.weights[idx] / (wu * wv);
            worst = worst.max(r).max(1.0 / r);
        }
    }
    Ok(worst)
}

/// Draws letters (Bernoulli) or whole level-`n` words (Gibbs).
pub struct WordSampler<'a> {
    index: WeightedIndex<f64>,
    gibbs: Option<&'a GibbsLevel>,
}

impl<'a> WordSampler<'a> {
    pub fn new(ifs: &IFS2, weights: &'a MeasureWeights) -> Result<Self> {
        weights.validate(ifs.len())?;
        let (index, gibbs) = match weights {
            MeasureWeights::Bernoulli(p) => (WeightedIndex::new(p), None),
            MeasureWeights::Gibbs(g) => {
                let mass: Vec<f64> = g
                    .weights
                    .iter()
                    .zip(&g.multiplicity)
                    .map(|(w, k)| w * k)
                    .collect();
                (WeightedIndex::new(mass), Some(g))
            }
        };
        let index = index.map_err(|e| Error::InvalidWeights(e.to_string()))?;
        Ok(WordSampler { index, gibbs })
    }

    /// Letters consumed per draw.
    pub fn block_len(&self) -> usize {
        self.gibbs.map_or(1, |g| g.n)
    }

    pub fn sample_block<R: Rng>(&self, rng: &mut R, out: &mut Vec<usize>) {
        let i = self.index.sample(rng);
        match self.gibbs {
            None => {
                out.clear();
                out.push(i);
            }
            Some(g) => {
                out.clear();
                out.resize(g.n, 0);
                g.decode(i, out);
                for slot in out.iter_mut() {
                    let class = &g.classes[*slot];
                    *slot = class[rng.gen_range(0..class.len())];
                }
            }
        }
    }
}
