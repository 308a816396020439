use std::fmt::Write;

/// Fraction of queries whose truth sits within the top `k` (ranks are
/// 1-based; `None` = truth not retrieved).
pub fn recall_at_k(ranks: &[Option<usize>], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    ranks.iter().filter(|r| r.is_some_and(|r| r <= k)).count() as f64 / ranks.len() as f64
}

pub fn mrr(ranks: &[Option<usize>]) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    ranks.iter().map(|r| r.map_or(0.0, |r| 1.0 / r as f64)).sum::<f64>() / ranks.len() as f64
}

/// 1-based rank of `truth` in `ranked`.
pub fn rank_of(ranked: &[u64], truth: u64) -> Option<usize> {
    ranked.iter().position(|&id| id == truth).map(|p| p + 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub queries: usize,
    pub r1: f64,
    pub r5: f64,
    pub r10: f64,
    pub mrr: f64,
}

impl Metrics {
    pub fn from_ranks(ranks: &[Option<usize>]) -> Self {
        Self {
            queries: ranks.len(),
            r1: recall_at_k(ranks, 1),
            r5: recall_at_k(ranks, 5),
            r10: recall_at_k(ranks, 10),
            mrr: mrr(ranks),
        }
    }

    /// Unweighted mean over testsets.
    pub fn average(all: &[Metrics]) -> Self {
        let n = all.len().max(1) as f64;
        Self {
            queries: all.iter().map(|m| m.queries).sum(),
            r1: all.iter().map(|m| m.r1).sum::<f64>() / n,
            r5: all.iter().map(|m| m.r5).sum::<f64>() / n,
            r10: all.iter().map(|m| m.r10).sum::<f64>() / n,
            mrr: all.iter().map(|m| m.mrr).sum::<f64>() / n,
        }
    }

    /// `testset metric value` lines.
    pub fn report(&self, testset: &str) -> String {
        let mut out = String::new();
        for (name, v) in [("R@1", self.r1), ("R@5", self.r5), ("R@10", self.r10), ("MRR", self.mrr)] {
            let _ = writeln!(out, "{testset}\t{name}\t{v:.4}");
        }
        let _ = writeln!(out, "{testset}\tqueries\t{}", self.queries);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(recall_at_k(&[Some(1), Some(1)], 1), 1.0);
        let r = [Some(2)];
        assert_eq!((recall_at_k(&r, 1), recall_at_k(&r, 5)), (0.0, 1.0));
        assert_eq!(mrr(&r), 0.5);
        assert_eq!(mrr(&[Some(1), Some(1), Some(1)]), 1.0);
        assert_eq!(mrr(&[None]), 0.0);
        assert_eq!(rank_of(&[4, 9, 2], 2), Some(3));
    }

    #[test]
    fn recall_is_monotone_and_bounds_mrr() {
        let ranks = [Some(1), Some(3), None, Some(12), Some(2), Some(7)];
        let mut prev = 0.0;
        for k in 1..20 {
            let r = recall_at_k(&ranks, k);
            assert!(r >= prev);
            prev = r;
        }
        let m = mrr(&ranks);
        assert!(m >= recall_at_k(&ranks, 1) && m <= recall_at_k(&ranks, usize::MAX));
    }
}
