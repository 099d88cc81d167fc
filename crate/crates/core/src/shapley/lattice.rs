//! Indexing of the coalition lattice.
//!
//! A lattice node is identified by its *present* set `Q` (the motifs left
//! unmasked). A depth-`d` lattice keeps the nodes with `|Q| <= d`, i.e. the
//! ones within `d` steps of the fully-masked terminal node. Nodes are stored
//! densely: sizes in increasing order, and within one size by colexicographic
//! rank (combinatorial number system).

use crate::error::{Error, Result};

/// `C(n, k)` as an exact integer, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `C(n, k)` as a float; exact while the value fits in 53 bits.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of lattice nodes with at most `depth` present motifs out of `m`.
pub fn node_count(m: usize, depth: usize) -> Option<u128> {
    (0..=depth.min(m)).try_fold(0u128, |acc, k| acc.checked_add(binomial(m as u64, k as u64)?))
}

pub(crate) struct LatticeIndex {
    m: usize,
    depth: usize,
    /// `table[i][j] = C(i, j)` for `i <= m`, `j <= depth`.
    table: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    len: usize,
}

impl LatticeIndex {
    /// Fails when the lattice has more than `2^limit` nodes.
    pub fn new(m: usize, depth: usize, limit: usize) -> Result<Self> {
        let depth = depth.min(m);
        let max_nodes = 1u128.checked_shl(limit as u32).unwrap_or(u128::MAX);
        let total = node_count(m, depth).filter(|&t| t <= max_nodes).ok_or_else(|| {
            Error::LatticeTooLarge {
                motifs: m,
                limit,
                queries: node_count(m, depth).unwrap_or(u128::MAX),
            }
        })?;
        let table = (0..=m)
            .map(|i| {
                (0..=depth)
                    .map(|j| binomial(i as u64, j as u64).map_or(usize::MAX, |c| c.min(usize::MAX as u128) as usize))
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(depth + 2);
        let mut acc = 0usize;
        for k in 0..=depth {
            offsets.push(acc);
            acc += binomial(m as u64, k as u64).unwrap() as usize;
        }
        offsets.push(acc);
        Ok(LatticeIndex {
            m,
            depth,
            table,
            offsets,
            len: total as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn c(&self, n: usize, k: usize) -> usize {
        self.table[n][k]
    }

    /// Dense index of the present set `q` (ascending, `|q| <= depth`).
    pub fn rank(&self, q: &[usize]) -> usize {
        debug_assert!(q.len() <= self.depth);
        self.offsets[q.len()] + q.iter().enumerate().map(|(j, &c)| self.c(c, j + 1)).sum::<usize>()
    }

    /// Calls `f(i, rank(q ∪ {i}))` for every motif `i` not in `q`, in
    /// ascending order of `i`. Requires `|q| < depth`.
    pub fn for_each_extension(&self, q: &[usize], mut f: impl FnMut(usize, usize)) {
        let k = q.len();
        debug_assert!(k < self.depth);
        // prefix[p] = sum_{t < p} C(q[t], t + 1); shifted[p] = sum_{t >= p} C(q[t], t + 2)
        let mut prefix = vec![0usize; k + 1];
        for t in 0..k {
            prefix[t + 1] = prefix[t] + self.c(q[t], t + 1);
        }
        let mut shifted = vec![0usize; k + 1];
        for t in (0..k).rev() {
            shifted[t] = shifted[t + 1] + self.c(q[t], t + 2);
        }
        let base = self.offsets[k + 1];
        let mut p = 0;
        for i in 0..self.m {
            if p < k && q[p] == i {
                p += 1;
                continue;
            }
            f(i, base + prefix[p] + self.c(i, p + 1) + shifted[p]);
        }
    }

    /// Visits every present set of size `<= max_size` in canonical order:
    /// by size, then lexicographically.
    pub fn for_each_subset(&self, max_size: usize, mut f: impl FnMut(&[usize])) {
        for k in 0..=max_size.min(self.depth) {
            let mut combo: Vec<usize> = (0..k).collect();
            loop {
                f(&combo);
                let mut i = k;
                while i > 0 && combo[i - 1] == self.m - k + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                combo[i - 1] += 1;
                for j in i..k {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
    }
}
