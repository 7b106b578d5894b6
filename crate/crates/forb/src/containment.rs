//! Configuration containment F ≺ A: a submatrix of A equals F up to row and
//! column permutations, columns matched with multiplicity.
//!
//! The two-row pattern F(0,p,1,0) gets a fast path through pair counts: A
//! contains it iff some ordered row pair (t,b) has at least p columns [1@t,0@b]
//! and at least one column [0@t,1@b].

use crate::matrix::{BinaryMatrix, Mask};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("pair profile needs at least 2 rows, got {0}")]
    TooFewRows(u32),
    #[error("p must be at least 1, got 0")]
    BadP,
}

/// Forbidden configuration: the two-row family F(0,p,1,0) or an arbitrary
/// matrix (repeated columns allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForbiddenPattern {
    /// F(0,p,1,0): p columns [1/0] then one column [0/1].
    TwoRow(u32),
    General(BinaryMatrix),
}

impl ForbiddenPattern {
    pub fn two_row(p: u32) -> Result<Self, CheckError> {
        if p == 0 {
            return Err(CheckError::BadP);
        }
        Ok(ForbiddenPattern::TwoRow(p))
    }

    /// The pattern as an explicit matrix.
    pub fn expand(&self) -> BinaryMatrix {
        match self {
            ForbiddenPattern::TwoRow(p) => {
                assert!(*p >= 1);
                let mut cols = vec![0b01u64; *p as usize];
                cols.push(0b10);
                BinaryMatrix::new(2, cols).unwrap()
            }
            ForbiddenPattern::General(f) => f.clone(),
        }
    }
}

/// Ordered pair counts: n01(i,j) = number of columns with 0 in row i and 1 in
/// row j. For every pair, n01(i,j) + n01(j,i) + #equal = total columns.
#[derive(Debug, Clone)]
pub struct PairProfile {
    m: u32,
    n01: Vec<usize>,
}

impl PairProfile {
    pub fn rows(&self) -> u32 {
        self.m
    }

    pub fn n01(&self, i: u32, j: u32) -> usize {
        debug_assert!(i != j && i < self.m && j < self.m);
        self.n01[(i * self.m + j) as usize]
    }
}

pub fn pair_profile(a: &BinaryMatrix) -> Result<PairProfile, CheckError> {
    let m = a.rows();
    if m < 2 {
        return Err(CheckError::TooFewRows(m));
    }
    let mut n01 = vec![0usize; (m * m) as usize];
    for &c in a.masks() {
        for i in 0..m {
            if c >> i & 1 == 0 {
                let mut ones = c;
                while ones != 0 {
                    let j = ones.trailing_zeros();
                    n01[(i * m + j) as usize] += 1;
                    ones &= ones - 1;
                }
            }
        }
    }
    Ok(PairProfile { m, n01 })
}

/// True iff F(0,p,1,0) is not contained in A: every unordered row pair {i,j}
/// satisfies (n01(i,j) <= p-1 and n01(j,i) <= p-1) or has one count zero.
pub fn avoids_two_row(a: &BinaryMatrix, p: u32) -> bool {
    assert!(p >= 1);
    if a.rows() < 2 {
        return true;
    }
    let prof = pair_profile(a).unwrap();
    let cap = (p - 1) as usize;
    for i in 0..a.rows() {
        for j in i + 1..a.rows() {
            let ab = prof.n01(i, j);
            let ba = prof.n01(j, i);
            if !((ab <= cap && ba <= cap) || ab == 0 || ba == 0) {
                return false;
            }
        }
    }
    true
}

/// Containment witness: `rows[t]` is the row of A playing row t of F, and
/// `cols[l]` the column of A playing column l of F. Both maps are injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub rows: Vec<u32>,
    pub cols: Vec<usize>,
}

/// Fast containment test for F(0,p,1,0); agrees with `contains_general` on
/// the expanded pattern. Scans pairs (0,1),(0,2),... and stops at the first
/// violation.
pub fn contains_two_row(a: &BinaryMatrix, p: u32) -> Option<Witness> {
    assert!(p >= 1);
    if a.rows() < 2 {
        return None;
    }
    let prof = pair_profile(a).unwrap();
    for i in 0..a.rows() {
        for j in i + 1..a.rows() {
            for (top, bottom) in [(i, j), (j, i)] {
                if prof.n01(bottom, top) >= p as usize && prof.n01(top, bottom) >= 1 {
                    return Some(two_row_witness(a, p, top, bottom));
                }
            }
        }
    }
    None
}

fn two_row_witness(a: &BinaryMatrix, p: u32, top: u32, bottom: u32) -> Witness {
    let mut cols = Vec::with_capacity(p as usize + 1);
    for (c, &mask) in a.masks().iter().enumerate() {
        if mask >> top & 1 == 1 && mask >> bottom & 1 == 0 {
            cols.push(c);
            if cols.len() == p as usize {
                break;
            }
        }
    }
    debug_assert_eq!(cols.len(), p as usize);
    let extra = a
        .masks()
        .iter()
        .position(|&mask| mask >> top & 1 == 0 && mask >> bottom & 1 == 1)
        .expect("violating pair must have a [0/1] column");
    cols.push(extra);
    Witness {
        rows: vec![top, bottom],
        cols,
    }
}

/// General containment: some ordered tuple of distinct rows of A carries every
/// column of F with at least its multiplicity. F with more rows than A is
/// never contained (not an error).
pub fn contains_general(a: &BinaryMatrix, f: &BinaryMatrix) -> Option<Witness> {
    let k = f.rows();
    let m = a.rows();
    if k > m {
        return None;
    }
    let mut need: Vec<(Mask, usize)> = Vec::new();
    {
        let mut sorted = f.masks().to_vec();
        sorted.sort_unstable();
        for &mask in &sorted {
            match need.last_mut() {
                Some((last, cnt)) if *last == mask => *cnt += 1,
                _ => need.push((mask, 1)),
            }
        }
    }
    if f.columns() > a.columns() {
        return None;
    }

    let tuples = row_tuples(a, f, k, m);
    for tuple in tuples {
        if let Some(cols) = match_columns(a, f, &need, &tuple) {
            return Some(Witness { rows: tuple, cols });
        }
    }
    None
}

/// Containment under either pattern form; the TwoRow fast path and the
/// general path agree (property-tested).
pub fn contains(a: &BinaryMatrix, pattern: &ForbiddenPattern) -> Option<Witness> {
    match pattern {
        ForbiddenPattern::TwoRow(p) => contains_two_row(a, *p),
        ForbiddenPattern::General(f) => contains_general(a, f),
    }
}

/// Ordered k-tuples of distinct rows. For 2-rowed F the tuples are sorted so
/// pairs rich in F's most-demanded column pattern come first.
fn row_tuples(a: &BinaryMatrix, f: &BinaryMatrix, k: u32, m: u32) -> Vec<Vec<u32>> {
    let mut tuples = Vec::new();
    let mut cur = Vec::with_capacity(k as usize);
    build_tuples(m, k as usize, &mut cur, &mut tuples);
    if k == 2 && m >= 2 {
        let q01 = f.masks().iter().filter(|&&c| c == 0b01).count();
        let q10 = f.masks().iter().filter(|&&c| c == 0b10).count();
        if q01.max(q10) > 0 {
            let prof = pair_profile(a).unwrap();
            // #cols [1@r0, 0@r1] = n01(r1, r0).
            let score = |t: &Vec<u32>| {
                if q01 >= q10 {
                    prof.n01(t[1], t[0])
                } else {
                    prof.n01(t[0], t[1])
                }
            };
            tuples.sort_by_key(|t| std::cmp::Reverse(score(t)));
        }
    }
    tuples
}

fn build_tuples(m: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for r in 0..m {
        if !cur.contains(&r) {
            cur.push(r);
            build_tuples(m, k, cur, out);
            cur.pop();
        }
    }
}

fn match_columns(
    a: &BinaryMatrix,
    f: &BinaryMatrix,
    need: &[(Mask, usize)],
    tuple: &[u32],
) -> Option<Vec<usize>> {
    // Columns of A restricted to the tuple, keyed by k-bit pattern.
    let pattern_of = |mask: Mask| -> Mask {
        let mut p = 0u64;
        for (t, &r) in tuple.iter().enumerate() {
            if mask >> r & 1 == 1 {
                p |= 1 << t;
            }
        }
        p
    };
    let mut have: std::collections::HashMap<Mask, Vec<usize>> = std::collections::HashMap::new();
    for (c, &mask) in a.masks().iter().enumerate() {
        have.entry(pattern_of(mask)).or_default().push(c);
    }
    for &(pat, cnt) in need {
        if have.get(&pat).map_or(0, |v| v.len()) < cnt {
            return None;
        }
    }
    // Assign distinct A-columns to F-columns in F's column order.
    let mut used: std::collections::HashMap<Mask, usize> = std::collections::HashMap::new();
    let cols = f
        .masks()
        .iter()
        .map(|&fc| {
            let idx = used.entry(fc).or_insert(0);
            let c = have[&fc][*idx];
            *idx += 1;
            c
        })
        .collect();
    Some(cols)
}

/// Check a witness against the matrices it claims to relate.
pub fn verify_witness(a: &BinaryMatrix, f: &BinaryMatrix, w: &Witness) -> bool {
    if w.rows.len() != f.rows() as usize || w.cols.len() != f.columns() {
        return false;
    }
    let mut rs = w.rows.clone();
    rs.sort_unstable();
    rs.dedup();
    if rs.len() != w.rows.len() || rs.iter().any(|&r| r >= a.rows()) {
        return false;
    }
    let mut cs = w.cols.clone();
    cs.sort_unstable();
    cs.dedup();
    if cs.len() != w.cols.len() || cs.iter().any(|&c| c >= a.columns()) {
        return false;
    }
    f.masks().iter().enumerate().all(|(l, &fc)| {
        w.rows
            .iter()
            .enumerate()
            .all(|(t, &r)| fc >> t & 1 == a.mask(w.cols[l]) >> r & 1)
    })
}
