//! Sorted, disjoint sets of half-open tick intervals.

use serde::Serialize;

use crate::schedule::Ticks;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalSet {
    spans: Vec<(Ticks, Ticks)>,
}

impl IntervalSet {
    pub fn new() -> Self {
        IntervalSet::default()
    }

    /// Builds a normalized set from arbitrary (possibly overlapping or
    /// empty) intervals. Adjacent intervals are merged.
    pub fn from_spans<I: IntoIterator<Item = (Ticks, Ticks)>>(spans: I) -> Self {
        let mut v: Vec<(Ticks, Ticks)> = spans.into_iter().filter(|(a, b)| a < b).collect();
        v.sort_unstable();
        let mut out: Vec<(Ticks, Ticks)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalSet { spans: out }
    }

    pub fn full(period: Ticks) -> Self {
        Self::from_spans([(0, period)])
    }

    /// The interval `[start, end)` taken modulo `period`, where `start` may
    /// be negative and the length is at most `period`. Wrapping intervals
    /// are split in two.
    pub fn wrapped(start: i64, len: Ticks, period: Ticks) -> Self {
        if len == 0 {
            return IntervalSet::new();
        }
        if len >= period {
            return Self::full(period);
        }
        let s = start.rem_euclid(period as i64) as Ticks;
        let e = s + len;
        if e <= period {
            Self::from_spans([(s, e)])
        } else {
            Self::from_spans([(0, e - period), (s, period)])
        }
    }

    pub fn spans(&self) -> &[(Ticks, Ticks)] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Total number of ticks in the set.
    pub fn measure(&self) -> Ticks {
        self.spans.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: Ticks) -> bool {
        let i = self.spans.partition_point(|&(_, b)| b <= t);
        self.spans.get(i).is_some_and(|&(a, _)| a <= t)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_spans(self.spans.iter().chain(other.spans.iter()).copied())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.spans.len() && j < other.spans.len() {
            let (a1, b1) = self.spans[i];
            let (a2, b2) = other.spans[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { spans: out }
    }

    /// `[0, period)` minus this set.
    pub fn complement(&self, period: Ticks) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = 0;
        for &(a, b) in &self.spans {
            if a >= period {
                break;
            }
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < period {
            out.push((cursor, period));
        }
        IntervalSet { spans: out }
    }

    /// Every element shifted by `-shift` and reduced modulo `period`.
    pub fn shift_left_mod(&self, shift: Ticks, period: Ticks) -> IntervalSet {
        let mut parts = Vec::with_capacity(self.spans.len() + 1);
        for &(a, b) in &self.spans {
            let w = IntervalSet::wrapped(a as i64 - (shift % period) as i64, b - a, period);
            parts.extend_from_slice(&w.spans);
        }
        Self::from_spans(parts)
    }

    /// Pointwise map `x ↦ (c − x) mod period`.
    pub fn reflect_mod(&self, c: i64, period: Ticks) -> IntervalSet {
        let mut parts = Vec::with_capacity(self.spans.len() + 1);
        for &(a, b) in &self.spans {
            // integers a..b-1 map to c-b+1 ..= c-a
            let w = IntervalSet::wrapped(c - b as i64 + 1, b - a, period);
            parts.extend_from_slice(&w.spans);
        }
        Self::from_spans(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_merges() {
        let s = IntervalSet::from_spans([(5, 7), (0, 2), (2, 3), (6, 9), (4, 4)]);
        assert_eq!(s.spans(), &[(0, 3), (5, 9)]);
        assert_eq!(s.measure(), 7);
        assert!(s.contains(2) && !s.contains(3) && s.contains(8) && !s.contains(9));
    }

    #[test]
    fn shift_wraps_at_zero() {
        let s = IntervalSet::from_spans([(2, 5)]);
        assert_eq!(s.shift_left_mod(4, 10).spans(), &[(0, 1), (8, 10)]);
        assert_eq!(s.shift_left_mod(14, 10), s.shift_left_mod(4, 10));
    }

    #[test]
    fn set_algebra() {
        let a = IntervalSet::from_spans([(0, 4), (6, 8)]);
        let b = IntervalSet::from_spans([(3, 7)]);
        assert_eq!(a.intersection(&b).spans(), &[(3, 4), (6, 7)]);
        assert_eq!(a.union(&b).spans(), &[(0, 8)]);
        assert_eq!(a.complement(10).spans(), &[(4, 6), (8, 10)]);
        assert!(IntervalSet::full(10).complement(10).is_empty());
    }

    #[test]
    fn reflection_maps_each_tick() {
        let s = IntervalSet::from_spans([(1, 3), (7, 8)]);
        let r = s.reflect_mod(4, 8);
        for x in 0..8u64 {
            let image = (4 - x as i64).rem_euclid(8) as u64;
            assert_eq!(s.contains(x), r.contains(image), "tick {x}");
        }
    }
}
