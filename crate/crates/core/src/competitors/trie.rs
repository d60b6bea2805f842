//! Top-K Trie: a trie of at most K counted nodes maintained with Misra-Gries decrements.
//!
//! Positions are processed right to left. Each suffix walks the trie as far as it matches,
//! incrementing every node on the way, then asks for one new child. When all K node slots are
//! taken, every counter is decremented instead and nodes that reach zero are pruned (a child
//! never out-counts its parent, so pruning removes whole subtrees).

use crate::topk::SampledEntry;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    /// Counter before subtracting the global decrement offset.
    raw: u64,
    depth: u32,
    /// Start position of the suffix that created the node.
    witness: u32,
    parent: u32,
    children: Vec<(u8, u32)>,
}

struct Trie {
    nodes: Vec<Node>,
    free: Vec<u32>,
    live: usize,
    offset: u64,
}

impl Trie {
    fn new() -> Self {
        let root = Node { raw: 0, depth: 0, witness: 0, parent: NONE, children: Vec::new() };
        Trie { nodes: vec![root], free: Vec::new(), live: 0, offset: 0 }
    }

    #[inline]
    fn child(&self, v: u32, c: u8) -> Option<u32> {
        self.nodes[v as usize].children.iter().find(|&&(x, _)| x == c).map(|&(_, u)| u)
    }

    fn add_child(&mut self, parent: u32, c: u8, witness: u32) {
        let node = Node {
            raw: self.offset + 1,
            depth: self.nodes[parent as usize].depth + 1,
            witness,
            parent,
            children: Vec::new(),
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        self.nodes[parent as usize].children.push((c, id));
        self.live += 1;
    }

    /// Global decrement, then removal of every node whose count dropped to zero.
    fn decrement_and_prune(&mut self) {
        self.offset += 1;
        let mut stack: Vec<u32> = vec![0];
        while let Some(v) = stack.pop() {
            let children = std::mem::take(&mut self.nodes[v as usize].children);
            let mut kept = Vec::with_capacity(children.len());
            for (c, u) in children {
                if self.nodes[u as usize].raw > self.offset {
                    kept.push((c, u));
                    stack.push(u);
                } else {
                    self.release_subtree(u);
                }
            }
            self.nodes[v as usize].children = kept;
        }
    }

    fn release_subtree(&mut self, u: u32) {
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            let children = std::mem::take(&mut self.nodes[v as usize].children);
            stack.extend(children.into_iter().map(|(_, x)| x));
            self.nodes[v as usize].parent = NONE;
            self.free.push(v);
            self.live -= 1;
        }
    }
}

pub fn topk_trie_mine(text: &[u8], k: usize) -> Vec<SampledEntry> {
    if k == 0 || text.is_empty() {
        return Vec::new();
    }
    let n = text.len();
    let mut trie = Trie::new();
    for i in (0..n).rev() {
        let mut v = 0u32;
        let mut d = 0usize;
        while i + d < n {
            match trie.child(v, text[i + d]) {
                Some(u) => {
                    trie.nodes[u as usize].raw += 1;
                    v = u;
                    d += 1;
                }
                None => {
                    if trie.live < k {
                        trie.add_child(v, text[i + d], i as u32);
                    } else {
                        trie.decrement_and_prune();
                    }
                    break;
                }
            }
        }
    }
    let mut out: Vec<SampledEntry> = Vec::with_capacity(trie.live);
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        for &(_, u) in &trie.nodes[v as usize].children {
            let node = &trie.nodes[u as usize];
            out.push(SampledEntry { j: node.witness as usize, len: node.depth as usize, f: node.raw - trie.offset });
            stack.push(u);
        }
    }
    out.sort_unstable_by_key(|e| (std::cmp::Reverse(e.f), e.len, e.j));
    out.truncate(k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn count(t: &[u8], p: &[u8]) -> u64 {
        (0..t.len()).filter(|&i| t[i..].starts_with(p)).count() as u64
    }

    #[test]
    fn aaaa_exact_counts() {
        let text = b"aaaa";
        let got: Vec<(Vec<u8>, u64)> =
            topk_trie_mine(text, 4).iter().map(|e| (e.substring(text).to_vec(), e.f)).collect();
        assert_eq!(got, vec![(b"a".to_vec(), 4), (b"aa".to_vec(), 3), (b"aaa".to_vec(), 2), (b"aaaa".to_vec(), 1)]);
    }

    #[test]
    fn undercounts_with_bounded_nodes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = rng.gen_range(1..2000);
            let sigma = [2u8, 4, 26][rng.gen_range(0..3)];
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let k = rng.gen_range(1..60);
            let got = topk_trie_mine(&text, k);
            assert!(got.len() <= k);
            for e in &got {
                assert!(e.f >= 1 && e.j + e.len <= n);
                assert!(e.f <= count(&text, e.substring(&text)));
            }
        }
    }
}
