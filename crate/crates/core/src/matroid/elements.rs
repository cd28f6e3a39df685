use std::fmt;

/// Subset of the ground set `0..universe`, stored as a bitmask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    universe: usize,
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            universe,
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = ElementSet::empty(universe);
        for e in 0..universe {
            s.insert(e);
        }
        s
    }

    pub fn singleton(universe: usize, e: usize) -> Self {
        let mut s = ElementSet::empty(universe);
        s.insert(e);
        s
    }

    /// Bits of `mask` above `universe` are ignored.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        let mut s = ElementSet::empty(universe);
        if universe > 0 {
            let keep = if universe >= 64 { u64::MAX } else { (1u64 << universe) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    /// `None` if some index is outside the universe.
    pub fn from_indices(universe: usize, items: impl IntoIterator<Item = usize>) -> Option<Self> {
        let mut s = ElementSet::empty(universe);
        for e in items {
            if e >= universe {
                return None;
            }
            s.insert(e);
        }
        Some(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// The set as a `u64` mask when the universe fits in one word.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < self.universe && (self.words[e / 64] >> (e % 64)) & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.universe, "element {e} outside universe {}", self.universe);
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: usize) {
        if e < self.universe {
            self.words[e / 64] &= !(1 << (e % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn complement(&self) -> Self {
        let mut s = ElementSet::full(self.universe);
        for (a, b) in s.words.iter_mut().zip(&self.words) {
            *a &= !b;
        }
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.universe, other.universe);
        ElementSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_algebra() {
        let a = ElementSet::from_indices(70, [0, 3, 65]).unwrap();
        let b = ElementSet::from_indices(70, [3, 69]).unwrap();
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![0, 3, 65, 69]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.complement().len(), 67);
        assert!(!a.complement().contains(65));
        assert!(ElementSet::from_indices(70, [3]).unwrap().is_subset(&a));
        assert!(ElementSet::from_indices(4, [4]).is_none());
        assert_eq!(a.to_mask(), None);
        assert_eq!(ElementSet::from_mask(3, 0b1111).to_mask(), Some(0b111));
        assert_eq!(format!("{}", ElementSet::from_mask(3, 0b101)), "{0,2}");
    }
}
