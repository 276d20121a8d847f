/// Fixed-capacity bitset over vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `(self ∩ mask) ⊆ (other ∩ mask)`.
    pub fn is_subset_within(&self, other: &BitSet, mask: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&mask.words)
            .all(|((a, b), m)| a & m & !b == 0)
    }

    /// `(self ∩ mask) == (other ∩ mask)`.
    pub fn eq_within(&self, other: &BitSet, mask: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&mask.words)
            .all(|((a, b), m)| (a ^ b) & m == 0)
    }

    /// Position of the `rank`-th (0-based) unset bit, if any.
    pub fn nth_unset(&self, mut rank: usize) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            let mut zeros = !w;
            if wi == self.words.len() - 1 && !self.len.is_multiple_of(64) {
                zeros &= (1u64 << (self.len % 64)) - 1;
            }
            let c = zeros.count_ones() as usize;
            if rank < c {
                for _ in 0..rank {
                    zeros &= zeros - 1;
                }
                return Some(wi * 64 + zeros.trailing_zeros() as usize);
            }
            rank -= c;
        }
        None
    }

    pub fn first_unset(&self) -> Option<usize> {
        self.nth_unset(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = BitSet::new(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert_eq!(s.count(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(s.first_unset(), Some(1));
        assert_eq!(s.nth_unset(127), Some(128));
        assert_eq!(s.nth_unset(128), None);
        s.remove(0);
        assert!(!s.contains(0));
        assert!(BitSet::full(130).is_full());
        assert_eq!(BitSet::full(130).count(), 130);
    }

    #[test]
    fn masked_relations() {
        let mut a = BitSet::new(10);
        let mut b = BitSet::new(10);
        let mut m = BitSet::new(10);
        a.insert(1);
        a.insert(5);
        b.insert(1);
        m.insert(1);
        m.insert(2);
        assert!(a.is_subset_within(&b, &m));
        assert!(a.eq_within(&b, &m));
        m.insert(5);
        assert!(!a.is_subset_within(&b, &m));
    }
}
