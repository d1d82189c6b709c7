/// Fixed-length bitset over example indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if !len.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        Bits { words, len }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            if f(i) {
                b.insert(i);
            }
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn and(&self, other: &Bits) -> Bits {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Bits { words, len: self.len }
    }

    pub fn minus(&self, other: &Bits) -> Bits {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        Bits { words, len: self.len }
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Writes `a.and(b)` into `self`.
    pub fn set_and(&mut self, a: &Bits, b: &Bits) {
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = x & y;
        }
    }

    /// `self.and(other).count()` without allocating.
    pub fn and_count(&self, other: &Bits) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn minus_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Bits::from_fn(70, |i| i % 2 == 0);
        let b = Bits::from_fn(70, |i| i % 3 == 0);
        assert_eq!(a.count(), 35);
        assert_eq!(a.and(&b).count(), 12);
        assert!(a.and(&b).is_subset(&a));
        assert_eq!(a.minus(&a), Bits::empty(70));
        assert_eq!(a.and_count(&b), 12);
        assert_eq!(b.ones().take(3).collect::<Vec<_>>(), vec![0, 3, 6]);
        assert_eq!(Bits::from_fn(130, |i| i == 129).ones().collect::<Vec<_>>(), vec![129]);
        let mut d = Bits::empty(70);
        d.set_and(&a, &b);
        assert_eq!(d, a.and(&b));
        let mut c = a.clone();
        c.minus_assign(&b);
        assert_eq!(c, a.minus(&b));
        c.or_assign(&b);
        assert_eq!(c, Bits::from_fn(70, |i| i % 2 == 0 || i % 3 == 0));
    }
}
