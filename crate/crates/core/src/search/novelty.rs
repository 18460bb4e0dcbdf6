use std::collections::HashSet;

use crate::pddl::{GroundTask, State, NOT_FLUENT};

/// Tuples of fluent atoms seen so far in one IW(k) call.
///
/// Static atoms hold in every state, so a tuple containing one is new exactly
/// when its fluent part is; leaving them out gives the same novelty values.
pub struct NoveltyTable {
    k: u32,
    n: usize,
    singles: Vec<u64>,
    pairs: Vec<u64>,
    triples: HashSet<(u32, u32, u32)>,
    scratch: Vec<u32>,
}

#[inline]
fn test_and_set(bits: &mut [u64], i: usize) -> bool {
    let (w, b) = (i / 64, i % 64);
    let was = bits[w] >> b & 1 == 1;
    bits[w] |= 1 << b;
    !was
}

#[inline]
fn pair_index(i: u32, j: u32) -> usize {
    let (i, j) = (i as usize, j as usize);
    j * (j - 1) / 2 + i
}

impl NoveltyTable {
    pub fn new(num_fluents: usize, k: u32) -> NoveltyTable {
        assert!(k <= 3, "novelty tables support k <= 3");
        let pairs = if k >= 2 {
            vec![0; (num_fluents * num_fluents.saturating_sub(1) / 2).div_ceil(64)]
        } else {
            Vec::new()
        };
        NoveltyTable {
            k,
            n: num_fluents,
            singles: vec![0; num_fluents.div_ceil(64)],
            pairs,
            triples: HashSet::new(),
            scratch: Vec::new(),
        }
    }

    pub fn num_fluents(&self) -> usize {
        self.n
    }

    /// Smallest size `m <= k` of a tuple in `s` not seen before, or `k + 1`.
    /// Every tuple of size at most `k` in `s` is recorded as seen.
    pub fn novelty(&mut self, task: &GroundTask, s: &State) -> u32 {
        let mut fl = std::mem::take(&mut self.scratch);
        fl.clear();
        fl.extend(s.iter().map(|a| task.fluent_id(a)).filter(|&f| f != NOT_FLUENT));
        let m = self.novelty_of(&fl);
        self.scratch = fl;
        m
    }

    /// Same as [`novelty`](Self::novelty) over an ascending list of fluent ids.
    pub fn novelty_of(&mut self, fl: &[u32]) -> u32 {
        let mut best = self.k + 1;
        if self.k == 0 {
            return best;
        }
        for &f in fl {
            if test_and_set(&mut self.singles, f as usize) {
                best = 1;
            }
        }
        if self.k >= 2 {
            for j in 1..fl.len() {
                for i in 0..j {
                    if test_and_set(&mut self.pairs, pair_index(fl[i], fl[j])) && best > 2 {
                        best = 2;
                    }
                }
            }
        }
        if self.k >= 3 {
            for c in 2..fl.len() {
                for b in 1..c {
                    for a in 0..b {
                        if self.triples.insert((fl[a], fl[b], fl[c])) && best > 3 {
                            best = 3;
                        }
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_novelty_on_four_atoms() {
        let mut t = NoveltyTable::new(4, 2);
        assert_eq!(t.novelty_of(&[0, 1]), 1);
        assert_eq!(t.novelty_of(&[1, 2]), 1);
        assert_eq!(t.novelty_of(&[0, 2]), 2);
        assert_eq!(t.novelty_of(&[0, 1, 2]), 3);
        assert_eq!(t.novelty_of(&[]), 3);
    }

    #[test]
    fn width_zero_never_novel() {
        let mut t = NoveltyTable::new(3, 0);
        assert_eq!(t.novelty_of(&[0]), 1);
    }

    #[test]
    fn triples_tracked_at_three() {
        let mut t = NoveltyTable::new(3, 3);
        assert_eq!(t.novelty_of(&[0, 1]), 1);
        assert_eq!(t.novelty_of(&[1, 2]), 1);
        assert_eq!(t.novelty_of(&[0, 2]), 2);
        assert_eq!(t.novelty_of(&[0, 1, 2]), 3);
        assert_eq!(t.novelty_of(&[0, 1, 2]), 4);
    }

    #[test]
    fn pair_index_is_a_bijection() {
        let mut seen = HashSet::new();
        for j in 1..20u32 {
            for i in 0..j {
                assert!(seen.insert(pair_index(i, j)));
            }
        }
        assert_eq!(seen.len(), 190);
        assert_eq!(*seen.iter().max().unwrap(), 189);
    }
}
