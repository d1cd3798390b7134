//! Dense bit vectors and incremental row echelon forms over GF(2).

use std::fmt;

/// A fixed-length vector over GF(2), packed into 64-bit limbs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    limbs: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.limbs[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i & 63);
        if value {
            self.limbs[i >> 6] |= bit;
        } else {
            self.limbs[i >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i >> 6] ^= 1u64 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the highest set bit.
    pub fn highest_one(&self) -> Option<usize> {
        self.limbs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Iterates the set positions in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A fully reduced row echelon basis, built one row at a time.
///
/// Each stored row has its pivot at its highest set column, and no other
/// stored row has that column set. Reducing a vector therefore leaves it
/// supported on non-pivot ("free") columns only, which makes the reduced
/// vector a canonical coset representative.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    /// `pivot_row[col]` is the row whose pivot is `col`.
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![None; width],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Columns carrying no pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.width).filter(|&c| !self.is_pivot(c)).collect()
    }

    /// Reduces `v` in place against the stored rows.
    pub fn reduce(&self, v: &mut BitVec) {
        debug_assert_eq!(v.len(), self.width);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    /// Inserts a row, returning `true` if it increased the rank.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.highest_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b == 1);
        }
        v
    }

    #[test]
    fn highest_and_ones() {
        let mut v = BitVec::zeros(130);
        assert_eq!(v.highest_one(), None);
        v.set(3, true);
        v.set(129, true);
        v.set(64, true);
        assert_eq!(v.highest_one(), Some(129));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(v.count_ones(), 3);
    }

    #[test]
    fn echelon_rank_and_free_columns() {
        let mut e = Echelon::new(4);
        assert!(e.insert(bv(&[1, 1, 0, 0])));
        assert!(e.insert(bv(&[0, 1, 1, 0])));
        assert!(!e.insert(bv(&[1, 0, 1, 0])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![0, 3]);
        let mut v = bv(&[0, 0, 1, 1]);
        e.reduce(&mut v);
        assert_eq!(v, bv(&[1, 0, 0, 1]));
        assert!(e.contains(&bv(&[1, 0, 1, 0])));
    }

    #[test]
    fn rows_stay_fully_reduced() {
        let mut e = Echelon::new(6);
        for bits in [
            [1, 0, 1, 0, 0, 1],
            [0, 1, 1, 0, 1, 0],
            [1, 1, 0, 1, 0, 0],
            [0, 0, 1, 1, 1, 1],
        ] {
            e.insert(bv(&bits));
        }
        for (i, row) in e.rows.iter().enumerate() {
            assert_eq!(row.highest_one(), Some(e.pivots[i]));
            for (j, &p) in e.pivots.iter().enumerate() {
                assert_eq!(row.get(p), i == j);
            }
        }
    }
}
