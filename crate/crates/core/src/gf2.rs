//! Bit-packed linear algebra over GF(2).
//!
//! [`BitMatrix`] stores rows as runs of `u64` words, so a row XOR is a word
//! loop. Elimination is plain Gaussian elimination with the first row holding
//! a set bit in the current column as pivot. Every routine here borrows its
//! input and eliminates on a private copy; callers keep their matrix.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD_BITS)
}

/// Dense row-major GF(2) matrix. Bits past column `cols - 1` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from per-row column lists. A column listed an even
    /// number of times in a row cancels, so multiset rows give their parity
    /// pattern.
    pub fn from_sparse_rows<R: AsRef<[usize]>>(rows: &[R], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for &c in row.as_ref() {
                if c >= cols {
                    return Err(Error::DimensionMismatch {
                        expected: cols,
                        actual: c + 1,
                    });
                }
                m.flip(r, c);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from dense 0/1 rows; all rows must have equal length.
    pub fn from_dense(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            for (c, &bit) in row.iter().enumerate() {
                if bit {
                    m.set(r, c, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of `u64` words per row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / WORD_BITS] ^= 1u64 << (c % WORD_BITS);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// `row[dst] ^= row[src]`, touching words from `from_word` onward only.
    #[inline]
    fn xor_row_from(&mut self, dst: usize, src: usize, from_word: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (x, y) in a[from_word..].iter_mut().zip(&b[from_word..]) {
            *x ^= *y;
        }
    }

    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        if dst != src {
            self.xor_row_from(dst, src, 0);
        } else {
            self.data[dst * self.stride..(dst + 1) * self.stride].fill(0);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = self.data.split_at_mut(a.max(b) * s);
        lo[a.min(b) * s..a.min(b) * s + s].swap_with_slice(&mut hi[..s]);
    }

    /// Computes `A x` for a bit vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let packed = pack(x);
        Ok((0..self.rows)
            .map(|r| dot(self.row_words(r), &packed))
            .collect())
    }

    /// Transpose, used for left-kernel computations.
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of set bits in row `r`, ascending.
    pub fn ones_in_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * WORD_BITS + b))
    }

    /// Forward elimination in place. Returns the pivot column of each of
    /// the first `rank` rows; rows past `rank` are zero in columns `< col_limit`.
    fn echelonize(&mut self, col_limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..col_limit {
            if rank == self.rows {
                break;
            }
            let w = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * self.stride + w] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if self.data[r * self.stride + w] & mask != 0 {
                    self.xor_row_from(r, rank, w);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

fn pack(bits: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
    }
    out
}

#[inline]
fn dot(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1 == 1
}

/// Outcome of solving `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub consistent: bool,
    pub rank: usize,
    /// A particular solution with every free variable set to 0.
    pub one_solution: Option<Vec<bool>>,
    /// `cols - rank` when consistent; the system then has `2^solution_count_log2` solutions.
    pub solution_count_log2: usize,
}

/// GF(2) row rank.
pub fn rank(m: &BitMatrix) -> usize {
    m.clone().echelonize(m.cols).len()
}

/// Solves `A x = b` over GF(2).
pub fn solve(m: &BitMatrix, b: &[bool]) -> Result<SolveResult> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            actual: b.len(),
        });
    }
    // Augment with b as the last column.
    let mut aug = BitMatrix::zeros(m.rows, m.cols + 1);
    for r in 0..m.rows {
        let src = m.row_words(r);
        let dst = &mut aug.data[r * aug.stride..r * aug.stride + src.len()];
        dst.copy_from_slice(src);
        if b[r] {
            aug.set(r, m.cols, true);
        }
    }
    let pivots = aug.echelonize(m.cols);
    let rank = pivots.len();
    let consistent = (rank..m.rows).all(|r| !aug.get(r, m.cols));
    if !consistent {
        return Ok(SolveResult {
            consistent,
            rank,
            one_solution: None,
            solution_count_log2: 0,
        });
    }
    // Back substitution on the echelon form, free variables = 0.
    let mut x = vec![0u64; words_for(m.cols + 1)];
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let row = aug.row_words(r);
        // Row bits beyond pc other than the rhs column, dotted with x so far.
        let mut acc = aug.get(r, m.cols);
        let mut parity = 0u32;
        for (wi, (&rw, &xw)) in row.iter().zip(&x).enumerate() {
            let mut w = rw & xw;
            if wi == pc / WORD_BITS {
                w &= !(1u64 << (pc % WORD_BITS));
            }
            parity += w.count_ones();
        }
        acc ^= parity & 1 == 1;
        if acc {
            x[pc / WORD_BITS] |= 1 << (pc % WORD_BITS);
        }
    }
    let sol: Vec<bool> = (0..m.cols)
        .map(|c| (x[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1)
        .collect();
    Ok(SolveResult {
        consistent,
        rank,
        one_solution: Some(sol),
        solution_count_log2: m.cols - rank,
    })
}

/// Dimension of the left kernel `{y : y^T A = 0}`.
pub fn nullity_transpose(m: &BitMatrix) -> usize {
    m.rows - rank(m)
}

/// Number of nonempty row subsets summing to zero: `2^nullity_transpose - 1`.
pub fn count_critical_sets(m: &BitMatrix) -> BigUint {
    (BigUint::one() << nullity_transpose(m)) - BigUint::one()
}

/// Row-count ceiling for exhaustive subset enumeration.
pub const BRUTE_FORCE_MAX_ROWS: usize = 24;

/// Counts nonempty critical row sets by enumerating all row subsets in
/// Gray-code order.
pub fn brute_force_critical_sets(m: &BitMatrix) -> Result<BigUint> {
    let by_size = brute_force_critical_sets_by_size(m)?;
    Ok(by_size.iter().skip(1).map(|&c| BigUint::from(c)).sum())
}

/// Critical row sets tallied by cardinality; index `s` holds the number of
/// critical sets with `s` rows (index 0 counts the empty set).
pub fn brute_force_critical_sets_by_size(m: &BitMatrix) -> Result<Vec<u64>> {
    if m.rows > BRUTE_FORCE_MAX_ROWS {
        return Err(Error::TooLarge {
            what: "rows",
            value: m.rows,
            limit: BRUTE_FORCE_MAX_ROWS,
        });
    }
    let mut counts = vec![0u64; m.rows + 1];
    let mut acc = vec![0u64; m.stride];
    counts[0] = 1;
    let mut size = 0usize;
    let mut gray = 0u64;
    for i in 1u64..(1u64 << m.rows) {
        let flip = i.trailing_zeros() as usize;
        gray ^= 1 << flip;
        if (gray >> flip) & 1 == 1 {
            size += 1;
        } else {
            size -= 1;
        }
        for (a, w) in acc.iter_mut().zip(m.row_words(flip)) {
            *a ^= w;
        }
        if acc.iter().all(|&w| w == 0) {
            counts[size] += 1;
        }
    }
    Ok(counts)
}

/// Number of solutions of `A x = b` for every `b`, by evaluating `A x` on all
/// `2^cols` assignments. Index `b` is the right-hand side with row `r` in bit `r`.
pub fn solution_histogram(m: &BitMatrix) -> Result<Vec<u64>> {
    const LIMIT: usize = 24;
    if m.cols > LIMIT || m.rows > LIMIT {
        return Err(Error::TooLarge {
            what: "rows/cols",
            value: m.cols.max(m.rows),
            limit: LIMIT,
        });
    }
    // Column images packed as row bitmasks.
    let col_mask: Vec<u64> = (0..m.cols)
        .map(|c| {
            (0..m.rows)
                .filter(|&r| m.get(r, c))
                .fold(0u64, |acc, r| acc | (1 << r))
        })
        .collect();
    let mut hist = vec![0u64; 1 << m.rows];
    let mut image = 0u64;
    hist[0] += 1;
    for i in 1u64..(1u64 << m.cols) {
        image ^= col_mask[i.trailing_zeros() as usize];
        hist[image as usize] += 1;
    }
    Ok(hist)
}

impl SolveResult {
    /// Exact number of solutions, `2^solution_count_log2` or zero.
    pub fn solution_count(&self) -> BigUint {
        if self.consistent {
            BigUint::one() << self.solution_count_log2
        } else {
            BigUint::zero()
        }
    }
}
