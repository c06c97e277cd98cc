//! Affine hash family `h(x) = Ax + b` over GF(2).

use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::mask;

/// `h: {0,1}^n -> {0,1}^a`; row `i` of `A` is a bit mask over the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineHash {
    input_width: usize,
    rows: Vec<u64>,
    offset: u64,
}

impl AffineHash {
    pub fn new(input_width: usize, rows: Vec<u64>, offset: u64) -> Self {
        let m = mask(input_width);
        let rows: Vec<u64> = rows.into_iter().map(|r| r & m).collect();
        let offset = offset & mask(rows.len());
        Self { input_width, rows, offset }
    }

    /// Uniform member of the family. Pairwise independent because the
    /// offset is uniform too.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, input_width: usize, output_width: usize) -> Self {
        let rows = (0..output_width).map(|_| rng.random::<u64>()).collect();
        let offset = rng.random::<u64>();
        Self::new(input_width, rows, offset)
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let mut out = self.offset;
        for (i, row) in self.rows.iter().enumerate() {
            out ^= u64::from((row & x).count_ones() & 1) << i;
        }
        out
    }

    /// Zero-width hashes send everything to the empty string, i.e. `0`.
    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }
}
