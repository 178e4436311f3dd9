//! Dense state sets over a fixed universe `0..n`.

use std::fmt;

/// A subset of a declared universe of state indices.
///
/// Both base states and extended states are addressed by dense indices, so a
/// single bitset type serves both. Binary operations require equal universes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: Vec<u64>,
    universe: usize,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet {
            bits: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            set.insert(i);
        }
        set
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_predicate(universe: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        Self::from_indices(universe, (0..universe).filter(|&i| pred(i)))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.universe, "state {i} outside universe of {}", self.universe);
        let fresh = !self.contains(i);
        self.bits[i / 64] |= 1 << (i % 64);
        fresh
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.check_universe(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> StateSet {
        StateSet::full(self.universe).difference(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }

    fn zip_with(&self, other: &StateSet, op: impl Fn(u64, u64) -> u64) -> StateSet {
        self.check_universe(other);
        StateSet {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect(),
            universe: self.universe,
        }
    }

    fn check_universe(&self, other: &StateSet) {
        assert_eq!(
            self.universe, other.universe,
            "state sets over different universes"
        );
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = StateSet::from_indices(70, [0, 3, 65]);
        let b = StateSet::from_indices(70, [3, 4]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![0, 3, 4, 65]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.difference(&b).len(), 2);
        assert_eq!(a.complement().len(), 67);
        assert!(a.complement().contains(69));
        assert!(!a.complement().contains(70));
        assert!(StateSet::empty(70).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(StateSet::full(70).complement().is_empty());
    }

    #[test]
    #[should_panic(expected = "different universes")]
    fn mismatched_universe_panics() {
        StateSet::empty(3).union(&StateSet::empty(4));
    }
}
