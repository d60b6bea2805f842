//! Binary min-heap with a key → slot map, so priorities can be looked up and changed by key.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hash};

use crate::usi::FingerprintHasher;

#[derive(Clone, Debug)]
pub struct IndexedMinHeap<K, P> {
    heap: Vec<(P, K)>,
    slots: HashMap<K, usize, BuildHasherDefault<FingerprintHasher>>,
}

impl<K: Hash + Eq + Clone, P: Ord + Copy> Default for IndexedMinHeap<K, P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Hash + Eq + Clone, P: Ord + Copy> IndexedMinHeap<K, P> {
    pub fn new() -> Self {
        IndexedMinHeap { heap: Vec::new(), slots: HashMap::default() }
    }

    pub fn with_capacity(cap: usize) -> Self {
        IndexedMinHeap {
            heap: Vec::with_capacity(cap),
            slots: HashMap::with_capacity_and_hasher(cap, Default::default()),
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, key: &K) -> bool {
        self.slots.contains_key(key)
    }

    pub fn priority(&self, key: &K) -> Option<P> {
        self.slots.get(key).map(|&i| self.heap[i].0)
    }

    pub fn peek(&self) -> Option<(&K, P)> {
        self.heap.first().map(|(p, k)| (k, *p))
    }

    /// Returns false (and changes nothing) if the key is already present.
    pub fn push(&mut self, key: K, priority: P) -> bool {
        if self.slots.contains_key(&key) {
            return false;
        }
        let i = self.heap.len();
        self.slots.insert(key.clone(), i);
        self.heap.push((priority, key));
        self.sift_up(i);
        true
    }

    pub fn pop(&mut self) -> Option<(K, P)> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(0, last);
        let (p, k) = self.heap.pop().unwrap();
        self.slots.remove(&k);
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        Some((k, p))
    }

    /// Returns false if the key is absent.
    pub fn set_priority(&mut self, key: &K, priority: P) -> bool {
        let Some(&i) = self.slots.get(key) else {
            return false;
        };
        let old = std::mem::replace(&mut self.heap[i].0, priority);
        if priority < old {
            self.sift_up(i);
        } else {
            self.sift_down(i);
        }
        true
    }

    pub fn remove(&mut self, key: &K) -> Option<P> {
        let i = self.slots.remove(key)?;
        let last = self.heap.len() - 1;
        if i != last {
            self.heap.swap(i, last);
            let moved = self.heap[i].1.clone();
            self.slots.insert(moved, i);
        }
        let (p, _) = self.heap.pop().unwrap();
        if i < self.heap.len() {
            self.sift_up(i);
            self.sift_down(i);
        }
        Some(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, P)> {
        self.heap.iter().map(|(p, k)| (k, *p))
    }

    /// Heap array plus the slot map, counted per element.
    pub fn size_bytes(&self) -> usize {
        let slot = std::mem::size_of::<(P, K)>() + std::mem::size_of::<(K, usize)>() + 1;
        self.heap.capacity().max(self.slots.capacity()) * slot
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.heap.swap(a, b);
        *self.slots.get_mut(&self.heap[a].1).unwrap() = a;
        *self.slots.get_mut(&self.heap[b].1).unwrap() = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.heap[i].0 >= self.heap[parent].0 {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && self.heap[l].0 < self.heap[m].0 {
                m = l;
            }
            if r < n && self.heap[r].0 < self.heap[m].0 {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }
}
