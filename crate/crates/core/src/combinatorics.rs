//! Lexicographic k-subsets of `0..n`, with ranking for chunked parallel walks.

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank(mut rank: u64, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for slot in 0..k {
        let remaining = (k - slot - 1) as u64;
        loop {
            let with_next = binomial((n - next - 1) as u64, remaining);
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Lexicographic rank of a sorted k-subset of `0..n`; inverse of [`unrank`].
pub fn rank(subset: &[usize], n: usize) -> u64 {
    let k = subset.len();
    let mut r = 0u64;
    let mut prev = 0usize;
    for (slot, &x) in subset.iter().enumerate() {
        for skipped in prev..x {
            r += binomial((n - skipped - 1) as u64, (k - slot - 1) as u64);
        }
        prev = x + 1;
    }
    r
}

#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }

    /// Starts at an arbitrary subset instead of the first one.
    pub fn starting_at(n: usize, start: Vec<usize>) -> Self {
        Self {
            n,
            current: Some(start),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(18, 4), 3060);
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn lexicographic_and_complete() {
        let all: Vec<_> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn unrank_matches_iteration() {
        for (rank, c) in Combinations::new(9, 4).enumerate() {
            assert_eq!(unrank(rank as u64, 9, 4), c);
            assert_eq!(super::rank(&c, 9), rank as u64);
        }
    }
}
