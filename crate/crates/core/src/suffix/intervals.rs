//! Bottom-up traversal of LCP intervals (Abouelhoda, Kurtz & Ohlebusch).

/// An explicit internal node of the (possibly sparse) suffix tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcpInterval {
    /// String depth of the node.
    pub lcp: u32,
    pub lb: u32,
    pub rb: u32,
    /// String depth of the parent node (0 for children of the root).
    pub parent_lcp: u32,
}

impl LcpInterval {
    pub fn frequency(&self) -> u32 {
        self.rb - self.lb + 1
    }
}

struct Frame {
    lcp: u32,
    lb: u32,
    child_start: usize,
}

/// Visits every LCP interval with `lcp > 0`, children before parents, in one stack pass.
///
/// The callback also receives the `[lb, rb]` bounds of the node's internal children. `lcp` is
/// the LCP array over a sorted list of suffixes (full or sparse); entry 0 is ignored.
pub fn for_each_lcp_interval<F>(lcp: &[u32], mut visit: F)
where
    F: FnMut(&LcpInterval, &[(u32, u32)]),
{
    let m = lcp.len();
    if m == 0 {
        return;
    }
    let mut stack = vec![Frame { lcp: 0, lb: 0, child_start: 0 }];
    let mut children: Vec<(u32, u32)> = Vec::new();
    for i in 1..=m {
        let cur = if i < m { lcp[i] } else { 0 };
        let mut lb = (i - 1) as u32;
        // Set when the last popped interval belongs to a node that is about to be pushed.
        let mut pending_child = false;
        while cur < stack.last().unwrap().lcp {
            let frame = stack.pop().unwrap();
            let top_lcp = stack.last().unwrap().lcp;
            let interval =
                LcpInterval { lcp: frame.lcp, lb: frame.lb, rb: (i - 1) as u32, parent_lcp: top_lcp.max(cur) };
            visit(&interval, &children[frame.child_start..]);
            children.truncate(frame.child_start);
            children.push((interval.lb, interval.rb));
            lb = frame.lb;
            pending_child = cur > top_lcp;
        }
        if cur > stack.last().unwrap().lcp {
            let child_start = if pending_child { children.len() - 1 } else { children.len() };
            stack.push(Frame { lcp: cur, lb, child_start });
        }
    }
}

/// Collects all intervals; convenient for small inputs and tests.
pub fn lcp_intervals(lcp: &[u32]) -> Vec<LcpInterval> {
    let mut out = Vec::new();
    for_each_lcp_interval(lcp, |iv, _| out.push(*iv));
    out
}
