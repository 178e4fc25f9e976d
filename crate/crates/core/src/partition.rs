//! Enumeration helpers for exhaustive sweeps.

/// All set partitions of `{0, …, n-1}` as restricted growth strings:
/// `labels[i]` is the block of element `i`, blocks numbered in order of
/// first appearance. Bell(n) strings in lexicographic order.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            prefix.push(b);
            extend(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    extend(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

/// All nonempty subsets of `{0, …, n-1}` as sorted index lists, in
/// bitmask order.
pub fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    assert!(n < usize::BITS as usize, "too many elements to enumerate");
    (1usize..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(n).len(), b, "n = {n}");
        }
    }

    #[test]
    fn partitions_are_restricted_growth() {
        for p in set_partitions(5) {
            let mut max = 0;
            for (i, &b) in p.iter().enumerate() {
                if i == 0 {
                    assert_eq!(b, 0);
                } else {
                    assert!(b <= max + 1);
                }
                max = max.max(b);
            }
        }
    }

    #[test]
    fn subset_count() {
        assert_eq!(nonempty_subsets(4).len(), 15);
        assert_eq!(nonempty_subsets(1), vec![vec![0]]);
    }
}
