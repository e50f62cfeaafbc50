use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Integer partition with parts stored in weakly decreasing order.
///
/// Ordered by weight, then lexicographically with larger parts first, so
/// `(2)` precedes `(1,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: SmallVec<[u16; 8]>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition::default()
    }

    /// Sorts the given positive parts into canonical order.
    pub fn new(parts: impl IntoIterator<Item = u16>) -> Self {
        let mut parts: SmallVec<[u16; 8]> = parts.into_iter().collect();
        assert!(parts.iter().all(|&p| p > 0), "partition parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[u16] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|&p| p as u32).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> Option<u16> {
        self.parts.first().copied()
    }

    /// Everything but the largest part.
    pub fn tail(&self) -> Partition {
        Partition { parts: self.parts.iter().skip(1).copied().collect() }
    }

    /// Prepends a part at least as large as every existing part.
    pub fn with_leading(&self, part: u16) -> Partition {
        debug_assert!(self.largest().is_none_or(|p| p <= part));
        let mut parts = SmallVec::with_capacity(self.parts.len() + 1);
        parts.push(part);
        parts.extend_from_slice(&self.parts);
        Partition { parts }
    }

    /// Appends a part no larger than every existing part.
    pub fn with_trailing(&self, part: u16) -> Partition {
        debug_assert!(self.parts.last().is_none_or(|&p| p >= part));
        let mut parts = self.parts.clone();
        parts.push(part);
        Partition { parts }
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight().cmp(&other.weight()).then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All partitions of `n` in canonical order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u16>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition::new(cur.iter().copied()));
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p as u16);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All partitions with `lo <= weight <= hi`, in canonical order.
pub fn partitions_between(lo: u32, hi: u32) -> Vec<Partition> {
    (lo..=hi).flat_map(partitions_of).collect()
}

/// The partition number `p(n)`.
pub fn partition_count(n: u32) -> u64 {
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_matches_counts() {
        for n in 0..12 {
            let ps = partitions_of(n);
            assert_eq!(ps.len() as u64, partition_count(n));
            assert!(ps.windows(2).all(|w| w[0] < w[1]));
            assert!(ps.iter().all(|p| p.weight() == n));
        }
        assert_eq!(partition_count(9), 30);
    }

    #[test]
    fn canonical_order() {
        let ps = partitions_between(0, 3);
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["()", "(1)", "(2)", "(1,1)", "(3)", "(2,1)", "(1,1,1)"]);
        assert_eq!(Partition::new([1, 3, 2]).parts(), &[3, 2, 1]);
    }
}
