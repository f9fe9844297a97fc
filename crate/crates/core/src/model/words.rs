use crate::error::{Error, Result};

use super::SwitchingWord;

/// Default cap on the number of window evaluations per enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// `M^k`, saturating.
pub fn word_count(modes: usize, length: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..length {
        total = total.saturating_mul(modes as u128);
    }
    total
}

/// Fails when `M^length` exceeds `budget`. `completed` is the largest length
/// already fully processed by the caller.
pub fn check_budget(modes: usize, length: usize, budget: u64, completed: usize) -> Result<()> {
    let required = word_count(modes, length);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            length,
            required,
            budget,
            completed,
        });
    }
    Ok(())
}

/// Decodes the `index`-th word of `M^length` in lexicographic order
/// (σ_0 is the most significant symbol).
pub(crate) fn word_at(modes: usize, length: usize, mut index: u128) -> SwitchingWord {
    let mut symbols = vec![0; length];
    for slot in symbols.iter_mut().rev() {
        *slot = (index % modes as u128) as usize;
        index /= modes as u128;
    }
    SwitchingWord(symbols)
}

/// Lexicographic enumeration of `{0..M}^length`.
#[derive(Debug, Clone)]
pub struct WordIter {
    modes: usize,
    current: Option<Vec<usize>>,
}

impl WordIter {
    pub fn new(modes: usize, length: usize) -> Self {
        Self {
            modes,
            current: if modes == 0 { None } else { Some(vec![0; length]) },
        }
    }
}

impl Iterator for WordIter {
    type Item = SwitchingWord;

    fn next(&mut self) -> Option<SwitchingWord> {
        let cur = self.current.take()?;
        let out = SwitchingWord(cur.clone());
        let mut next = cur;
        let mut pos = next.len();
        loop {
            if pos == 0 {
                // wrapped around: enumeration finished
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.modes {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}
