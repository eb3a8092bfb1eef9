//! Exact matrix rank over the rationals.
//!
//! Matrices are assembled as sparse integer triplets. Rank is first computed
//! modulo a fixed prime: the rank mod p never exceeds the rank over Q, so a
//! full modular rank is already an exact certificate. Otherwise the rank is
//! recomputed by fraction-free elimination over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Largest prime below 2^32, so products of residues fit in a `u64`.
const MODULUS: u64 = 4_294_967_291;

/// How an exact rank was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    /// Full rank modulo a prime, which bounds the rational rank from below.
    ModularFullRank,
    /// Fraction-free elimination over the integers.
    FractionFree,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rank {
    pub rank: usize,
    pub method: RankMethod,
}

/// A sparse integer matrix; repeated coordinates are summed.
#[derive(Debug, Clone, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn push(&mut self, row: usize, col: usize, value: BigInt) {
        debug_assert!(row < self.rows && col < self.cols);
        if !value.is_zero() {
            self.entries.push((row, col, value));
        }
    }

    fn dense_mod_p(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.cols]; self.rows];
        let p = BigInt::from(MODULUS);
        for (r, c, v) in &self.entries {
            let residue = v.mod_floor(&p).to_u64().expect("residue below modulus");
            m[*r][*c] = (m[*r][*c] + residue) % MODULUS;
        }
        m
    }

    fn dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            m[*r][*c] += v;
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(r, c, v)| (*c, *r, v.clone()))
                .collect(),
        }
    }

    /// Rank, computed separately on each connected block of the row/column
    /// incidence graph.
    pub fn rank(&self) -> Rank {
        if self.rows == 0 || self.cols == 0 || self.entries.is_empty() {
            return Rank {
                rank: 0,
                method: RankMethod::Trivial,
            };
        }
        let mut total = Rank {
            rank: 0,
            method: RankMethod::ModularFullRank,
        };
        for block in self.blocks() {
            let r = block.block_rank();
            total.rank += r.rank;
            if r.method == RankMethod::FractionFree {
                total.method = RankMethod::FractionFree;
            }
        }
        total
    }

    fn blocks(&self) -> Vec<SparseMatrix> {
        // union-find over rows 0..rows and columns rows..rows+cols
        let mut parent: Vec<usize> = (0..self.rows + self.cols).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (r, c, _) in &self.entries {
            let (a, b) = (find(&mut parent, *r), find(&mut parent, self.rows + c));
            if a != b {
                parent[a] = b;
            }
        }
        let mut index = vec![usize::MAX; self.rows + self.cols];
        let mut blocks: Vec<SparseMatrix> = Vec::new();
        let mut root_block = std::collections::HashMap::new();
        for (r, c, v) in &self.entries {
            let root = find(&mut parent, *r);
            let b = *root_block.entry(root).or_insert_with(|| {
                blocks.push(SparseMatrix::new(0, 0));
                blocks.len() - 1
            });
            let block = &mut blocks[b];
            if index[*r] == usize::MAX {
                index[*r] = block.rows;
                block.rows += 1;
            }
            let cc = self.rows + c;
            if index[cc] == usize::MAX {
                index[cc] = block.cols;
                block.cols += 1;
            }
            block.entries.push((index[*r], index[cc], v.clone()));
        }
        blocks
    }

    fn block_rank(&self) -> Rank {
        let full = self.rows.min(self.cols);
        let modular = rank_mod_p(self.dense_mod_p());
        if modular == full {
            return Rank {
                rank: full,
                method: RankMethod::ModularFullRank,
            };
        }
        Rank {
            rank: rank_fraction_free(self.dense()),
            method: RankMethod::FractionFree,
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= MODULUS;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % MODULUS;
        }
        base = base * base % MODULUS;
        exp >>= 1;
    }
    acc
}

fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][col], MODULUS - 2);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let v = row[col];
            if v == 0 {
                continue;
            }
            let factor = v * inv % MODULUS;
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if y != 0 {
                    *x = (*x + MODULUS - factor * y % MODULUS) % MODULUS;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_fraction_free(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Smallest nonzero pivot keeps intermediate growth down.
        let Some(pivot) = (rank..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].abs())
        else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let p = pivot_row[col].clone();
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let g = p.gcd(&row[col]);
            let a = &p / &g;
            let b = &row[col] / &g;
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = &*x * &a - y * &b;
            }
            let content = row[col + 1..]
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if content > BigInt::from(1) {
                for x in row[col + 1..].iter_mut() {
                    *x /= &content;
                }
            }
        }
        rank += 1;
    }
    rank
}
