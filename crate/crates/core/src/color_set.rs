//! Fixed-capacity bitsets over dense colour ids.

use smallvec::SmallVec;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Dense colour identifier. `Blank` is never a `Color`; it is modelled as
/// `None` wherever a vertex may be uncoloured.
pub type Color = u32;

/// A set of (non-Blank) colours stored as a bitset.
///
/// Palettes of up to 256 colours stay inline; larger palettes spill to the
/// heap transparently.
#[derive(Clone, Default)]
pub struct ColorSet {
    words: SmallVec<[u64; 4]>,
}

impl ColorSet {
    fn trimmed(&self) -> &[u64] {
        let end = self.words.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1);
        &self.words[..end]
    }
}

impl PartialEq for ColorSet {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for ColorSet {}

impl Hash for ColorSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl ColorSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(palette_size: usize) -> Self {
        let mut words = SmallVec::new();
        words.resize(palette_size.div_ceil(64), 0);
        Self { words }
    }

    /// All colours `0..palette_size`.
    pub fn full(palette_size: usize) -> Self {
        let mut s = Self::with_capacity(palette_size);
        for c in 0..palette_size {
            s.insert(c as Color);
        }
        s
    }

    pub fn insert(&mut self, c: Color) -> bool {
        let (w, b) = (c as usize / 64, c as usize % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let was = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !was
    }

    pub fn remove(&mut self, c: Color) -> bool {
        let (w, b) = (c as usize / 64, c as usize % 64);
        match self.words.get_mut(w) {
            Some(word) => {
                let was = *word & (1 << b) != 0;
                *word &= !(1 << b);
                was
            }
            None => false,
        }
    }

    #[inline]
    pub fn contains(&self, c: Color) -> bool {
        let (w, b) = (c as usize / 64, c as usize % 64);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|self ∩ other|` without allocating.
    #[inline]
    pub fn intersection_len(&self, other: &ColorSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &ColorSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn intersection(&self, other: &ColorSet) -> ColorSet {
        let mut out = self.clone();
        for (i, w) in out.words.iter_mut().enumerate() {
            *w &= other.words.get(i).copied().unwrap_or(0);
        }
        out
    }

    /// Colours in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Color> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(i as Color * 64 + b)
            })
        })
    }

    /// The `k`-th smallest colour (0-indexed).
    pub fn nth(&self, k: usize) -> Option<Color> {
        self.iter().nth(k)
    }

    pub fn to_vec(&self) -> Vec<Color> {
        self.iter().collect()
    }
}

impl FromIterator<Color> for ColorSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        let mut s = ColorSet::new();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iterate() {
        let mut s = ColorSet::with_capacity(10);
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(130);
        s.insert(0);
        assert_eq!(s.to_vec(), vec![0, 3, 130]);
        assert_eq!(s.len(), 3);
        assert!(s.remove(3));
        assert!(!s.remove(3));
        assert!(!s.remove(999));
        assert_eq!(s.nth(1), Some(130));
    }

    #[test]
    fn intersections() {
        let a: ColorSet = [1, 2, 3, 70].into_iter().collect();
        let b: ColorSet = [2, 70, 71].into_iter().collect();
        assert_eq!(a.intersection_len(&b), 2);
        assert_eq!(a.intersection(&b).to_vec(), vec![2, 70]);
        assert!(!a.is_subset(&b));
        assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn equality_ignores_capacity() {
        let mut a = ColorSet::with_capacity(300);
        a.insert(5);
        let b: ColorSet = [5].into_iter().collect();
        assert_eq!(a, b);
    }
}
