use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{Word, IFS2};
use crate::linalg2::{singular_values, Matrix2};

pub const DEFAULT_STOP_BUDGET: usize = 1 << 22;

/// Words `w` with `α₂(A_w) < ε ≤ α₂(A_{parent(w)})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoppingSet {
    pub epsilon: f64,
    pub words: Vec<Word>,
}

impl StoppingSet {
    /// `Σ m^{−|w|}`; equals 1 exactly when the cylinders partition the shift space.
    pub fn kraft_sum(&self, m: usize) -> f64 {
        self.words
            .iter()
            .map(|w| (m as f64).powi(-(w.len() as i32)))
            .sum()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.words.iter().map(Word::len).min().unwrap_or(0)
    }
}

pub fn stopping_set_W(ifs: &IFS2, epsilon: f64) -> Result<StoppingSet> {
    stopping_set_with_budget(ifs, epsilon, DEFAULT_STOP_BUDGET)
}

/// Depth-first descent that expands a prefix while its `α₂ ≥ ε`.
pub fn stopping_set_with_budget(ifs: &IFS2, epsilon: f64, budget: usize) -> Result<StoppingSet> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    let m = ifs.len();
    let mut words = Vec::new();
    let mut stack: Vec<(Vec<usize>, Matrix2)> = vec![(Vec::new(), Matrix2::IDENTITY)];
    while let Some((prefix, a)) = stack.pop() {
        for i in (0..m).rev() {
            let p = a * ifs.maps()[i].linear;
            let mut w = prefix.clone();
            w.push(i);
            if singular_values(&p)?.alpha2 < epsilon {
                words.push(Word::new(w));
                if words.len() > budget {
                    return Err(Error::BudgetExceeded {
                        needed: words.len() as u128,
                        budget,
                    });
                }
            } else {
                stack.push((w, p));
            }
        }
    }
    words.sort();
    Ok(StoppingSet { epsilon, words })
}
