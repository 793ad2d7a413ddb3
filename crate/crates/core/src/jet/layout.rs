//! Graded-lexicographic multi-index tables for jets in three variables.
//!
//! Multi-indices are ordered by total degree first and lexicographically
//! (descending in the first component) within a degree. Because the order is
//! graded, the coefficients of a jet of order `k` are exactly the first
//! `len(k)` entries of the coefficient table of any higher order, so
//! truncation is a prefix operation.

use std::sync::OnceLock;

/// Largest supported jet order.
pub const MAX_ORDER: usize = 8;

pub type MultiIndex = [u8; 3];

pub(crate) struct Layout {
    indices: Vec<MultiIndex>,
    lookup: Vec<u16>,
    /// `mul[k]` lists `(i, j, t)` with `deg(i) + deg(j) <= k` and `t = index(i + j)`.
    mul: Vec<Vec<(u16, u16, u16)>>,
}

const SIDE: usize = MAX_ORDER + 1;

fn slot(a: MultiIndex) -> usize {
    (a[0] as usize * SIDE + a[1] as usize) * SIDE + a[2] as usize
}

impl Layout {
    fn build() -> Self {
        let mut indices = Vec::new();
        for d in 0..=MAX_ORDER as u8 {
            for a0 in (0..=d).rev() {
                for a1 in (0..=d - a0).rev() {
                    indices.push([a0, a1, d - a0 - a1]);
                }
            }
        }
        let mut lookup = vec![u16::MAX; SIDE * SIDE * SIDE];
        for (n, a) in indices.iter().enumerate() {
            lookup[slot(*a)] = n as u16;
        }
        let mut mul = Vec::with_capacity(SIDE);
        for k in 0..=MAX_ORDER {
            let n = len_for(k);
            let mut table = Vec::new();
            for i in 0..n {
                let a = indices[i];
                let da = degree(a);
                for j in 0..n {
                    let b = indices[j];
                    if da + degree(b) <= k {
                        let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                        table.push((i as u16, j as u16, lookup[slot(s)]));
                    }
                }
            }
            mul.push(table);
        }
        Layout { indices, lookup, mul }
    }

    pub(crate) fn get() -> &'static Layout {
        static LAYOUT: OnceLock<Layout> = OnceLock::new();
        LAYOUT.get_or_init(Layout::build)
    }

    pub(crate) fn index_of(&self, a: MultiIndex) -> Option<usize> {
        if a.iter().any(|&x| x as usize > MAX_ORDER) {
            return None;
        }
        match self.lookup[slot(a)] {
            u16::MAX => None,
            n => Some(n as usize),
        }
    }

    pub(crate) fn multi_index(&self, n: usize) -> MultiIndex {
        self.indices[n]
    }

    pub(crate) fn mul_table(&self, order: usize) -> &[(u16, u16, u16)] {
        &self.mul[order]
    }
}

pub fn degree(a: MultiIndex) -> usize {
    a.iter().map(|&x| x as usize).sum()
}

/// Number of multi-indices in three variables with total degree at most `order`.
pub const fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) * (order + 3) / 6
}

/// `a!` for a multi-index.
pub fn factorial(a: MultiIndex) -> f64 {
    a.iter().map(|&x| (1..=x as u64).product::<u64>() as f64).product()
}
