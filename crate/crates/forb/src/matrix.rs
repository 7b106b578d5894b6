//! Dense (0,1)-matrices stored column-wise as machine-word bitmasks.
//!
//! A matrix has `m` rows (1 <= m <= 63) and an ordered sequence of columns.
//! Each column is a `u64` mask whose bit `r` is the entry in row `r`.
//! Duplicate columns are allowed; `is_simple` is the predicate that rules
//! them out, not an invariant of the type.

use std::fmt;

/// One column: bit `r` holds the entry in row `r`.
pub type Mask = u64;

/// Row cap so a column always fits one machine word.
pub const MAX_ROWS: u32 = 63;

/// Row cap for brute-force canonicalization (m! permutations).
pub const MAX_CANON_ROWS: u32 = 10;

/// Largest k for which the full 2^k column universe is materialized.
pub const MAX_FULL_K: u32 = 20;

/// All-ones mask for `rows` rows.
pub fn full_mask(rows: u32) -> Mask {
    debug_assert!((1..=MAX_ROWS).contains(&rows));
    (1u64 << rows) - 1
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("row count {0} outside 1..=63")]
    RowCount(u32),
    #[error("column mask {mask:#x} has bits outside {rows} rows")]
    MaskOverflow { mask: Mask, rows: u32 },
    #[error("row counts differ: {left} vs {right}")]
    RowMismatch { left: u32, right: u32 },
    #[error("canonical form limited to 10 rows, got {0}")]
    CanonicalRows(u32),
    #[error("k = {0} outside 1..=20")]
    BadK(u32),
    #[error("column weight {s} outside 0..={k}")]
    BadWeight { k: u32, s: u32 },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: u32,
    cols: Vec<Mask>,
}

impl BinaryMatrix {
    pub fn new(rows: u32, cols: Vec<Mask>) -> Result<Self, MatrixError> {
        if rows == 0 || rows > MAX_ROWS {
            return Err(MatrixError::RowCount(rows));
        }
        let full = full_mask(rows);
        if let Some(&mask) = cols.iter().find(|&&c| c & !full != 0) {
            return Err(MatrixError::MaskOverflow { mask, rows });
        }
        Ok(BinaryMatrix { rows, cols })
    }

    /// Matrix with `rows` rows and no columns.
    pub fn empty(rows: u32) -> Result<Self, MatrixError> {
        Self::new(rows, Vec::new())
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// Number of columns, written ||A||.
    pub fn columns(&self) -> usize {
        self.cols.len()
    }

    pub fn masks(&self) -> &[Mask] {
        &self.cols
    }

    pub fn mask(&self, c: usize) -> Mask {
        self.cols[c]
    }

    pub fn bit(&self, r: u32, c: usize) -> bool {
        debug_assert!(r < self.rows);
        self.cols[c] >> r & 1 == 1
    }

    /// Column sum.
    pub fn weight(&self, c: usize) -> u32 {
        self.cols[c].count_ones()
    }

    pub fn full(&self) -> Mask {
        full_mask(self.rows)
    }

    /// True iff no column appears twice.
    pub fn is_simple(&self) -> bool {
        let mut seen = self.cols.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// All 2^k columns in ascending mask order (the complete configuration K_k).
    pub fn k_full(k: u32) -> Result<Self, MatrixError> {
        if k == 0 || k > MAX_FULL_K {
            return Err(MatrixError::BadK(k));
        }
        Ok(BinaryMatrix {
            rows: k,
            cols: (0..1u64 << k).collect(),
        })
    }

    /// All C(k,s) columns of weight s in ascending mask order (K_k^s).
    pub fn k_slice(k: u32, s: u32) -> Result<Self, MatrixError> {
        if k == 0 || k > MAX_FULL_K {
            return Err(MatrixError::BadK(k));
        }
        if s > k {
            return Err(MatrixError::BadWeight { k, s });
        }
        Ok(BinaryMatrix {
            rows: k,
            cols: (0..1u64 << k).filter(|c| c.count_ones() == s).collect(),
        })
    }

    /// Flip every entry; row count and column order preserved.
    pub fn complement(&self) -> Self {
        let full = self.full();
        BinaryMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|&c| c ^ full).collect(),
        }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::RowMismatch {
                left: self.rows,
                right: other.rows,
            });
        }
        let mut cols = self.cols.clone();
        cols.extend_from_slice(&other.cols);
        Ok(BinaryMatrix {
            rows: self.rows,
            cols,
        })
    }

    /// Same matrix with columns sorted ascending by mask.
    pub fn sorted_columns(&self) -> Self {
        let mut cols = self.cols.clone();
        cols.sort_unstable();
        BinaryMatrix {
            rows: self.rows,
            cols,
        }
    }

    /// Row permutation: old row `r` becomes row `perm[r]`.
    pub fn permuted_rows(&self, perm: &[u32]) -> Self {
        debug_assert_eq!(perm.len(), self.rows as usize);
        BinaryMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|&c| remap_rows(c, perm)).collect(),
        }
    }

    /// Submatrix on the given rows, reindexed so `rows[t]` becomes row `t`.
    /// Column order preserved.
    pub fn restricted_rows(&self, rows: &[u32]) -> Self {
        debug_assert!(!rows.is_empty() && rows.iter().all(|&r| r < self.rows));
        let cols = self
            .cols
            .iter()
            .map(|&c| {
                let mut out = 0u64;
                for (t, &r) in rows.iter().enumerate() {
                    if c >> r & 1 == 1 {
                        out |= 1 << t;
                    }
                }
                out
            })
            .collect();
        BinaryMatrix {
            rows: rows.len() as u32,
            cols,
        }
    }

    /// Lexicographically least column list over all row permutations, columns
    /// sorted ascending. Two matrices are row/column-permutation isomorphic
    /// iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Result<Self, MatrixError> {
        if self.rows > MAX_CANON_ROWS {
            return Err(MatrixError::CanonicalRows(self.rows));
        }
        let mut best: Option<Vec<Mask>> = None;
        let mut perm: Vec<u32> = (0..self.rows).collect();
        heap_permutations(&mut perm, &mut |p| {
            let mut cols: Vec<Mask> = self.cols.iter().map(|&c| remap_rows(c, p)).collect();
            cols.sort_unstable();
            match &best {
                Some(b) if *b <= cols => {}
                _ => best = Some(cols),
            }
        });
        Ok(BinaryMatrix {
            rows: self.rows,
            cols: best.unwrap_or_default(),
        })
    }

    /// Parse either the grid format or the compact mask format.
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        if text.lines().next().is_some_and(|l| l.contains(';')) {
            Self::from_compact(text)
        } else {
            Self::from_text(text)
        }
    }

    /// Grid format: header "m n", then m lines of n characters from {0,1}.
    pub fn from_text(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        let mut parts = header.split_whitespace();
        let parse_dim = |tok: Option<&str>, what: &str| -> Result<usize, MatrixError> {
            tok.and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| MatrixError::Parse {
                    line: 1,
                    column: 1,
                    reason: format!("expected header \"m n\", bad {what}"),
                })
        };
        let m = parse_dim(parts.next(), "row count")?;
        let n = parse_dim(parts.next(), "column count")?;
        if parts.next().is_some() {
            return Err(MatrixError::Parse {
                line: 1,
                column: 1,
                reason: "trailing tokens after header".into(),
            });
        }
        if m == 0 || m > MAX_ROWS as usize {
            return Err(MatrixError::RowCount(m.min(u32::MAX as usize) as u32));
        }
        let mut cols = vec![0u64; n];
        for r in 0..m {
            let lineno = r + 2;
            let line = lines.next().ok_or_else(|| MatrixError::Parse {
                line: lineno,
                column: 1,
                reason: format!("expected {m} rows, input ends after {r}"),
            })?;
            let line = line.trim_end_matches('\r');
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != n {
                return Err(MatrixError::Parse {
                    line: lineno,
                    column: chars.len().min(n) + 1,
                    reason: format!("expected {n} entries, found {}", chars.len()),
                });
            }
            for (c, &ch) in chars.iter().enumerate() {
                match ch {
                    '0' => {}
                    '1' => cols[c] |= 1 << r,
                    _ => {
                        return Err(MatrixError::Parse {
                            line: lineno,
                            column: c + 1,
                            reason: format!("invalid entry {ch:?}, expected '0' or '1'"),
                        })
                    }
                }
            }
        }
        for (extra, line) in lines.enumerate() {
            if !line.trim().is_empty() {
                return Err(MatrixError::Parse {
                    line: m + 2 + extra,
                    column: 1,
                    reason: "unexpected content after last row".into(),
                });
            }
        }
        Ok(BinaryMatrix {
            rows: m as u32,
            cols,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols.len());
        for r in 0..self.rows {
            for &c in &self.cols {
                out.push(if c >> r & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Compact format: "m; h1,h2,..." with columns as hexadecimal masks.
    pub fn from_compact(text: &str) -> Result<Self, MatrixError> {
        let text = text.trim();
        let (m_part, cols_part) = text.split_once(';').ok_or_else(|| MatrixError::Parse {
            line: 1,
            column: 1,
            reason: "expected \"m; h1,h2,...\"".into(),
        })?;
        let m: u32 = m_part.trim().parse().map_err(|_| MatrixError::Parse {
            line: 1,
            column: 1,
            reason: format!("bad row count {:?}", m_part.trim()),
        })?;
        let mut cols = Vec::new();
        for tok in cols_part.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let mask = Mask::from_str_radix(tok, 16).map_err(|_| MatrixError::Parse {
                line: 1,
                column: 1,
                reason: format!("bad hexadecimal mask {tok:?}"),
            })?;
            cols.push(mask);
        }
        Self::new(m, cols)
    }

    pub fn to_compact(&self) -> String {
        let masks: Vec<String> = self.cols.iter().map(|c| format!("{c:x}")).collect();
        format!("{}; {}", self.rows, masks.join(","))
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BinaryMatrix({}x{}; {})",
            self.rows,
            self.cols.len(),
            self.to_compact()
        )
    }
}

fn remap_rows(col: Mask, perm: &[u32]) -> Mask {
    let mut out = 0u64;
    let mut rest = col;
    while rest != 0 {
        let r = rest.trailing_zeros() as usize;
        out |= 1 << perm[r];
        rest &= rest - 1;
    }
    out
}

/// Heap's algorithm; calls `visit` on every arrangement of `items`.
fn heap_permutations<T: Copy, F: FnMut(&[T])>(items: &mut [T], visit: &mut F) {
    let n = items.len();
    let mut counters = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            visit(items);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_round_trip() {
        let text = "3 4\n0101\n0011\n0001\n";
        let a = BinaryMatrix::from_text(text).unwrap();
        assert_eq!(a.rows(), 3);
        assert_eq!(a.columns(), 4);
        assert_eq!(a.to_text(), text);
        assert_eq!(a.masks(), &[0b000, 0b001, 0b010, 0b111]);
    }

    #[test]
    fn parse_errors_carry_position() {
        match BinaryMatrix::from_text("2 3\n010\n0x0\n") {
            Err(MatrixError::Parse {
                line: 3, column: 2, ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match BinaryMatrix::from_text("2 3\n01\n000\n") {
            Err(MatrixError::Parse {
                line: 2, column: 3, ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        assert!(BinaryMatrix::from_text("0 1\n").is_err());
        assert!(BinaryMatrix::from_text("junk\n").is_err());
    }

    #[test]
    fn compact_round_trip() {
        let a = BinaryMatrix::k_slice(5, 2).unwrap();
        let b = BinaryMatrix::from_compact(&a.to_compact()).unwrap();
        assert_eq!(a, b);
        assert_eq!(BinaryMatrix::parse(&a.to_compact()).unwrap(), a);
        assert_eq!(BinaryMatrix::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn k_full_counts() {
        assert_eq!(BinaryMatrix::k_full(3).unwrap().columns(), 8);
        assert_eq!(BinaryMatrix::k_full(1).unwrap().masks(), &[0, 1]);
        let k5 = BinaryMatrix::k_full(5).unwrap();
        assert_eq!(k5.columns(), 32);
        assert!(k5.is_simple());
        assert!(BinaryMatrix::k_full(0).is_err());
        assert!(BinaryMatrix::k_full(21).is_err());
    }

    #[test]
    fn k_slice_counts() {
        assert_eq!(BinaryMatrix::k_slice(5, 2).unwrap().columns(), 10);
        assert_eq!(BinaryMatrix::k_slice(4, 0).unwrap().masks(), &[0]);
        assert_eq!(BinaryMatrix::k_slice(5, 4).unwrap().columns(), 5);
        assert!(BinaryMatrix::k_slice(4, 5).is_err());
    }

    #[test]
    fn complement_involution() {
        let a = BinaryMatrix::k_slice(5, 2).unwrap();
        let c = a.complement();
        assert_eq!(c.sorted_columns(), BinaryMatrix::k_slice(5, 3).unwrap());
        assert_eq!(c.complement(), a);
        assert!(c.is_simple());
        let kk = BinaryMatrix::k_full(4).unwrap();
        assert_eq!(kk.complement().sorted_columns(), kk);
    }

    #[test]
    fn concat_checks_rows() {
        let a = BinaryMatrix::k_slice(2, 0).unwrap();
        let b = BinaryMatrix::k_slice(2, 2).unwrap();
        assert_eq!(a.concat(&b).unwrap().masks(), &[0b00, 0b11]);
        assert!(a.concat(&BinaryMatrix::k_full(3).unwrap()).is_err());
    }

    #[test]
    fn canonical_identity_under_row_swap() {
        let i2 = BinaryMatrix::new(2, vec![0b01, 0b10]).unwrap();
        let swapped = i2.permuted_rows(&[1, 0]);
        assert_eq!(
            i2.canonical_form().unwrap(),
            swapped.canonical_form().unwrap()
        );
    }

    #[test]
    fn canonical_invariant_under_random_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = rng.gen_range(1..=8u32);
            let n = rng.gen_range(0..=10usize);
            let full = full_mask(m);
            let cols: Vec<Mask> = (0..n).map(|_| rng.gen::<u64>() & full).collect();
            let a = BinaryMatrix::new(m, cols).unwrap();
            let mut perm: Vec<u32> = (0..m).collect();
            perm.shuffle(&mut rng);
            let mut b = a.permuted_rows(&perm);
            b.cols.shuffle(&mut rng);
            assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
        }
    }

    #[test]
    fn canonical_refuses_large() {
        let a = BinaryMatrix::empty(11).unwrap();
        assert!(matches!(
            a.canonical_form(),
            Err(MatrixError::CanonicalRows(11))
        ));
    }

    #[test]
    fn simplicity() {
        assert!(BinaryMatrix::k_full(2).unwrap().is_simple());
        let dup = BinaryMatrix::new(2, vec![1, 1]).unwrap();
        assert!(!dup.is_simple());
    }

    #[test]
    fn restricted_rows_reindexes() {
        let a = BinaryMatrix::new(3, vec![0b101, 0b011]).unwrap();
        let r = a.restricted_rows(&[0, 2]);
        assert_eq!(r.rows(), 2);
        assert_eq!(r.masks(), &[0b11, 0b01]);
    }
}
