/// Set of small integers in `0..capacity` with O(1) insert, remove,
/// membership and uniform sampling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexSet {
    pub fn new(capacity: usize) -> Self {
        IndexSet {
            items: Vec::new(),
            pos: vec![ABSENT; capacity],
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.pos[x] != ABSENT
    }

    #[inline]
    pub fn insert(&mut self, x: usize) -> bool {
        if self.pos[x] != ABSENT {
            return false;
        }
        self.pos[x] = self.items.len() as u32;
        self.items.push(x as u32);
        true
    }

    #[inline]
    pub fn remove(&mut self, x: usize) -> bool {
        let p = self.pos[x];
        if p == ABSENT {
            return false;
        }
        let last = self.items.pop().expect("non-empty");
        if last as usize != x {
            self.items[p as usize] = last;
            self.pos[last as usize] = p;
        }
        self.pos[x] = ABSENT;
        true
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Element stored at slot `i` (`i < len`). Slot order is arbitrary.
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.items[i] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.items
    }

    pub fn clear(&mut self) {
        for &x in &self.items {
            self.pos[x as usize] = ABSENT;
        }
        self.items.clear();
    }

    /// Members in increasing order.
    pub fn sorted(&self) -> Vec<u32> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn behaves_like_a_set(ops in prop::collection::vec((any::<bool>(), 0usize..32), 0..200)) {
            let mut s = IndexSet::new(32);
            let mut model = BTreeSet::new();
            for (ins, x) in ops {
                if ins {
                    prop_assert_eq!(s.insert(x), model.insert(x));
                } else {
                    prop_assert_eq!(s.remove(x), model.remove(&x));
                }
                prop_assert_eq!(s.len(), model.len());
            }
            let got: Vec<usize> = s.sorted().into_iter().map(|x| x as usize).collect();
            prop_assert_eq!(got, model.into_iter().collect::<Vec<_>>());
        }
    }
}
