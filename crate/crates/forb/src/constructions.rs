//! Block library and assembly for the layered avoiding constructions.
//!
//! A block B_i is a simple k_i-rowed avoiding matrix with no all-ones column
//! (a zero column is allowed). The assembly stacks blocks on the diagonal,
//! fills all-ones above and all-zeros below, and appends one global all-ones
//! column, giving 1 + Σ||B_i|| columns in total.

use crate::containment::{avoids_two_row, contains_two_row};
use crate::matrix::{BinaryMatrix, Mask, MAX_FULL_K};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("no builtin block for p = {0}")]
    UnsupportedP(u32),
    #[error("unknown variant {variant:?} for p = {p}")]
    UnknownVariant { p: u32, variant: String },
    #[error("no builtin extremal matrix for p = {p}, m = {m}")]
    UnsupportedResidue { p: u32, m: u32 },
    #[error("block {name:?} violates its invariants: {reason}")]
    BlockInvariant { name: String, reason: String },
    #[error("assembled matrix failed verification: {0}")]
    VerificationFailed(String),
    #[error("t = {0} outside 2..=20")]
    BadT(u32),
}

/// A named building block for the layered construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLibraryEntry {
    pub p: u32,
    pub name: String,
    /// Includes the zero column where the construction has one, never the
    /// all-ones column.
    pub block: BinaryMatrix,
}

impl BlockLibraryEntry {
    pub fn rows(&self) -> u32 {
        self.block.rows()
    }

    pub fn columns(&self) -> usize {
        self.block.columns()
    }

    fn validated(self) -> Result<Self, ConstructError> {
        let fail = |reason: &str| {
            Err(ConstructError::BlockInvariant {
                name: self.name.clone(),
                reason: reason.into(),
            })
        };
        if !self.block.is_simple() {
            return fail("not simple");
        }
        if self.block.masks().contains(&self.block.full()) {
            return fail("contains the all-ones column");
        }
        if !avoids_two_row(&self.block, self.p) {
            return fail("contains the forbidden configuration");
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub p: u32,
    pub blocks: Vec<BlockLibraryEntry>,
}

impl ConstructionPlan {
    pub fn rows(&self) -> u32 {
        self.blocks.iter().map(|b| b.rows()).sum()
    }
}

fn entry(
    p: u32,
    name: &str,
    rows: u32,
    cols: Vec<Mask>,
) -> Result<BlockLibraryEntry, ConstructError> {
    BlockLibraryEntry {
        p,
        name: name.to_string(),
        block: BinaryMatrix::new(rows, cols).expect("library masks fit"),
    }
    .validated()
}

fn slices(k: u32, weights: &[u32]) -> Vec<Mask> {
    let mut cols = Vec::new();
    for &s in weights {
        cols.extend_from_slice(BinaryMatrix::k_slice(k, s).unwrap().masks());
    }
    cols
}

/// Incidence columns of the 5-cycle 0-1-2-3-4-0.
fn cycle_g5() -> Vec<Mask> {
    [(0u32, 1u32), (1, 2), (2, 3), (3, 4), (4, 0)]
        .iter()
        .map(|&(a, b)| (1 << a) | (1 << b))
        .collect()
}

/// Complements of the incidence columns of the complementary 5-cycle
/// 0-2-4-1-3-0.
fn cycle_g5_prime_complement() -> Vec<Mask> {
    [(0u32, 2u32), (2, 4), (4, 1), (1, 3), (3, 0)]
        .iter()
        .map(|&(a, b)| 0b11111 ^ ((1 << a) | (1 << b)))
        .collect()
}

/// The 13 middle columns of the 5-row p=7 extremal construction.
fn middle_p7() -> Vec<Mask> {
    from_grid(&[
        "1111000001100",
        "1000111001010",
        "0100100111001",
        "0010010100111",
        "0001001010111",
    ])
}

/// The 16 middle columns of the 5-row p=8 extremal construction.
fn middle_p8() -> Vec<Mask> {
    from_grid(&[
        "1111000011110000",
        "1000110011001110",
        "0100101010101101",
        "0010010100111011",
        "0001001101010111",
    ])
}

/// The 11 middle columns of the 6-row p=6 construction.
fn middle_p6_six_rows() -> Vec<Mask> {
    from_grid(&[
        "10111000000",
        "10000111000",
        "10000000111",
        "01100100100",
        "01010010010",
        "01001001001",
    ])
}

fn from_grid(rows: &[&str]) -> Vec<Mask> {
    let n = rows[0].len();
    let mut cols = vec![0u64; n];
    for (r, line) in rows.iter().enumerate() {
        assert_eq!(line.len(), n);
        for (c, ch) in line.chars().enumerate() {
            if ch == '1' {
                cols[c] |= 1 << r;
            }
        }
    }
    cols
}

/// The named per-p block. Every p has "default"; p = 6 additionally has
/// "complement-style" (K_5^3 middle) and "cycle" (G_5 and the complement of
/// G_5' as the middle). Blocks are re-verified on every call.
pub fn builtin_block(p: u32, variant: &str) -> Result<BlockLibraryEntry, ConstructError> {
    match (p, variant) {
        (2, "default") => entry(2, "two-row", 2, vec![0b00, 0b01, 0b10]),
        (3, "default") => entry(3, "three-row", 3, slices(3, &[0, 1, 2])),
        (4, "default") => {
            // D: two complementary columns of sum 2.
            let mut cols = slices(4, &[3]);
            cols.extend([0b0011, 0b1100]);
            cols.extend(slices(4, &[1, 0]));
            entry(4, "four-row", 4, cols)
        }
        (5, "default") => entry(5, "four-row", 4, slices(4, &[3, 2, 1, 0])),
        (6, "default") => entry(6, "five-row", 5, slices(5, &[4, 2, 1, 0])),
        (6, "complement-style") => entry(6, "five-row-complement", 5, slices(5, &[4, 3, 1, 0])),
        (6, "cycle") => {
            let mut cols = slices(5, &[4]);
            cols.extend(cycle_g5());
            cols.extend(cycle_g5_prime_complement());
            cols.extend(slices(5, &[1, 0]));
            entry(6, "five-row-cycle", 5, cols)
        }
        (7, "default") => {
            let mut cols = slices(5, &[0, 1]);
            cols.extend(middle_p7());
            cols.extend(slices(5, &[4]));
            entry(7, "five-row", 5, cols)
        }
        (8, "default") => {
            let mut cols = slices(5, &[0, 1]);
            cols.extend(middle_p8());
            cols.extend(slices(5, &[4]));
            entry(8, "five-row", 5, cols)
        }
        (9, "default") => {
            let cols = (0u64..0b11111).collect();
            entry(9, "five-row", 5, cols)
        }
        (2..=9, _) => Err(ConstructError::UnknownVariant {
            p,
            variant: variant.to_string(),
        }),
        _ => Err(ConstructError::UnsupportedP(p)),
    }
}

/// The three 5-row p=6 blocks.
pub fn p6_variants() -> Vec<BlockLibraryEntry> {
    ["default", "complement-style", "cycle"]
        .iter()
        .map(|v| builtin_block(6, v).unwrap())
        .collect()
}

fn extremal_block_p3(rows: u32) -> Result<BlockLibraryEntry, ConstructError> {
    match rows {
        3 => builtin_block(3, "default"),
        4 => entry(3, "four-row", 4, slices(4, &[0, 1, 3])),
        5 => entry(3, "five-row", 5, slices(5, &[0, 1, 4])),
        _ => unreachable!(),
    }
}

fn six_row_p6() -> Result<BlockLibraryEntry, ConstructError> {
    let mut cols = slices(6, &[5]);
    cols.extend(middle_p6_six_rows());
    cols.extend(slices(6, &[1, 0]));
    entry(6, "six-row", 6, cols)
}

/// K_t without its all-ones column: the conjectured rate-(2^t−1)/t block.
/// Not verified optimal beyond t <= 5.
pub fn conjecture_block(t: u32) -> Result<BlockLibraryEntry, ConstructError> {
    if !(2..=MAX_FULL_K).contains(&t) {
        return Err(ConstructError::BadT(t));
    }
    let p = (1u32 << (t - 2)) + 1;
    entry(p, "complete-minus-ones", t, (0..(1u64 << t) - 1).collect())
}

/// Stack the plan's blocks: ones above the diagonal, zeros below, one global
/// all-ones column appended. The output is re-checked simple and avoiding.
pub fn assemble(plan: &ConstructionPlan) -> Result<BinaryMatrix, ConstructError> {
    let mut offsets = Vec::with_capacity(plan.blocks.len());
    let mut m = 0u32;
    for b in &plan.blocks {
        if b.p != plan.p {
            return Err(ConstructError::BlockInvariant {
                name: b.name.clone(),
                reason: format!("built for p = {}, plan has p = {}", b.p, plan.p),
            });
        }
        b.clone().validated()?;
        offsets.push(m);
        m += b.rows();
    }
    let mut cols: Vec<Mask> = Vec::new();
    for (bi, b) in plan.blocks.iter().enumerate() {
        let above: Mask = (1u64 << offsets[bi]) - 1;
        for &local in b.block.masks() {
            cols.push(above | (local << offsets[bi]));
        }
    }
    cols.push((1u64 << m) - 1);
    let a = BinaryMatrix::new(m, cols)
        .map_err(|e| ConstructError::VerificationFailed(e.to_string()))?;

    let expected: usize = 1 + plan.blocks.iter().map(|b| b.columns()).sum::<usize>();
    if a.columns() != expected {
        return Err(ConstructError::VerificationFailed(format!(
            "expected {expected} columns, assembled {}",
            a.columns()
        )));
    }
    if !a.is_simple() {
        return Err(ConstructError::VerificationFailed("not simple".into()));
    }
    if let Some(w) = contains_two_row(&a, plan.p) {
        return Err(ConstructError::VerificationFailed(format!(
            "contains F(0,{},1,0) at rows {:?}",
            plan.p, w.rows
        )));
    }
    Ok(a)
}

/// Repeat the default block `reps` times and assemble.
pub fn repeated_default(p: u32, reps: u32) -> Result<BinaryMatrix, ConstructError> {
    let block = builtin_block(p, "default")?;
    assemble(&ConstructionPlan {
        p,
        blocks: vec![block; reps as usize],
    })
}

/// The paper-exact extremal (or best-known) construction for the supported
/// residues: p = 2 even m; p = 3 every m >= 3; p in {4,5} m ≡ 0 (mod 4);
/// p in {6..9} m ≡ 0 (mod 5); p = 6 additionally m ≡ 1 (mod 5), m >= 6.
/// Oversized blocks come first; the remainder is filled with default blocks.
pub fn builtin_extremal(p: u32, m: u32) -> Result<BinaryMatrix, ConstructError> {
    let unsupported = ConstructError::UnsupportedResidue { p, m };
    let mut blocks: Vec<BlockLibraryEntry> = Vec::new();
    match p {
        2 => {
            if m < 2 || !m.is_multiple_of(2) {
                return Err(unsupported);
            }
            blocks.extend(vec![builtin_block(2, "default")?; (m / 2) as usize]);
        }
        3 => {
            if m < 3 {
                return Err(unsupported);
            }
            let lead = match m % 3 {
                0 => 3,
                1 => 4,
                _ => 5,
            };
            blocks.push(extremal_block_p3(lead)?);
            blocks.extend(vec![
                builtin_block(3, "default")?;
                ((m - lead) / 3) as usize
            ]);
        }
        4 | 5 => {
            if m < 4 || !m.is_multiple_of(4) {
                return Err(unsupported);
            }
            blocks.extend(vec![builtin_block(p, "default")?; (m / 4) as usize]);
        }
        6 if m % 5 == 1 => {
            if m < 6 {
                return Err(unsupported);
            }
            blocks.push(six_row_p6()?);
            blocks.extend(vec![builtin_block(6, "default")?; ((m - 6) / 5) as usize]);
        }
        6..=9 => {
            if m < 5 || !m.is_multiple_of(5) {
                return Err(unsupported);
            }
            blocks.extend(vec![builtin_block(p, "default")?; (m / 5) as usize]);
        }
        _ => return Err(ConstructError::UnsupportedP(p)),
    }
    assemble(&ConstructionPlan { p, blocks })
}
