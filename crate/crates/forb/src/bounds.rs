//! Exact-rational bound arithmetic: the constants c_p, the upper bound
//! formulas for matrices with bounded pairwise row difference, component
//! deletion costs, and the closed-form column bounds with their proof status.

use crate::matrix::BinaryMatrix;
use crate::rowgraph::{GraphReport, OrderOutcome};
use num_rational::Rational64;

pub type Rational = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("p = {0} outside the supported range 2..=9")]
    UnsupportedP(u32),
    #[error("m = {0} below 2")]
    TooFewRows(u32),
    #[error("formula not applicable: k = {0} below 3")]
    SimpleBoundSmallK(u32),
    #[error("formula not applicable: t = {t} outside the validity window 4..={max} for k = {k}")]
    SimpleBoundWindow { k: u32, t: u32, max: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("component index {index} out of range ({count} components)")]
    BadIndex { index: usize, count: usize },
    #[error("component order is cyclic; block boundaries undefined")]
    NoOrder,
    #[error("deleting component {index} and its {deletable} columns leaves a non-simple matrix")]
    DeletionNotSimple { index: usize, deletable: usize },
    #[error("no c_p for p = {0}")]
    NoRate(u32),
}

/// Per-column rate of the extremal constructions: the avoiding block
/// constructions reach ⌊c_p·m⌋ + 1 columns.
pub fn cp(p: u32) -> Result<Rational, BoundError> {
    let (num, den) = match p {
        2 => (3, 2),
        3 => (7, 3),
        4 => (11, 4),
        5 => (15, 4),
        6 => (21, 5),
        7 => (24, 5),
        8 => (27, 5),
        9 => (31, 5),
        _ => return Err(BoundError::UnsupportedP(p)),
    };
    Ok(Rational::new(num, den))
}

/// Max columns (constant ones excluded) of a k-rowed matrix, repeats allowed,
/// when every row pair differs in at most t columns: ⌊tk/2⌋.
pub fn upper_bound_nonsimple(k: u32, t: u32) -> i64 {
    assert!(k >= 2);
    (t as i64 * k as i64) / 2
}

/// Largest t the simple bound formula covers for k rows: 2(C(k,2) + C(k,1)).
pub fn simple_bound_window(k: u32) -> u32 {
    k * (k - 1) + 2 * k
}

/// Max columns of a simple k-rowed matrix over non-constant columns with
/// every row pair differing in at most t columns:
/// ⌊2k + (t-4)·k(k-1)/(4(k-2))⌋, valid for k >= 3 and 4 <= t <= k²+k.
pub fn upper_bound_simple(k: u32, t: u32) -> Result<i64, BoundError> {
    if k < 3 {
        return Err(BoundError::SimpleBoundSmallK(k));
    }
    let max = simple_bound_window(k);
    if t < 4 || t > max {
        return Err(BoundError::SimpleBoundWindow { k, t, max });
    }
    let (k, t) = (k as i64, t as i64);
    let val = Rational::from_integer(2 * k) + Rational::new((t - 4) * k * (k - 1), 4 * (k - 2));
    Ok(val.floor().to_integer())
}

/// Cost of deleting one undirected component together with its block columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    /// Component size s.
    pub rows: u32,
    /// Columns deleted with the component: ||B_i||.
    pub deletable: usize,
    /// c_p·s − ||B_i||; at least 1 certifies the matrix is not extremal.
    pub cost: Rational,
}

/// Cost of component `index` of `report`, verifying that deleting the
/// component's rows and its block columns leaves a simple matrix.
pub fn component_cost(
    a: &BinaryMatrix,
    report: &GraphReport,
    index: usize,
) -> Result<CostReport, CostError> {
    let count = report.components.len();
    if index >= count {
        return Err(CostError::BadIndex { index, count });
    }
    let rate = cp(report.p).map_err(|_| CostError::NoRate(report.p))?;
    if !matches!(report.order, OrderOutcome::Total(_)) {
        return Err(CostError::NoOrder);
    }
    let block = &report.blocks[index];
    let component = &report.components[index];
    let deletable = block.column_indices.len();

    let keep_rows: Vec<u32> = (0..a.rows()).filter(|r| !component.contains(r)).collect();
    let mut kept: Vec<u64> = a
        .masks()
        .iter()
        .enumerate()
        .filter(|(c, _)| !block.column_indices.contains(c))
        .map(|(_, &mask)| {
            let mut out = 0u64;
            for (t, &r) in keep_rows.iter().enumerate() {
                if mask >> r & 1 == 1 {
                    out |= 1 << t;
                }
            }
            out
        })
        .collect();
    kept.sort_unstable();
    let simple = kept.windows(2).all(|w| w[0] != w[1]);
    if !simple {
        return Err(CostError::DeletionNotSimple { index, deletable });
    }

    let s = component.len() as i64;
    let cost = rate * Rational::from_integer(s) - Rational::from_integer(deletable as i64);
    Ok(CostReport {
        rows: component.len() as u32,
        deletable,
        cost,
    })
}

/// Costs for every component; None where the deletion check fails or the
/// component order is undefined.
pub fn component_costs(a: &BinaryMatrix, report: &GraphReport) -> Vec<Option<CostReport>> {
    (0..report.components.len())
        .map(|i| component_cost(a, report, i).ok())
        .collect()
}

/// How firmly the closed-form bound is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// Equality holds for this p and m.
    Exact,
    /// Proven upper bound; equality open.
    UpperBoundProven,
    /// Value attained by a block construction at supported residues; no
    /// matching upper bound.
    ConstructionLowerBoundOnly,
}

impl std::fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundStatus::Exact => "exact",
            BoundStatus::UpperBoundProven => "upper-bound-proven",
            BoundStatus::ConstructionLowerBoundOnly => "construction-lower-bound-only",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbBound {
    pub value: i64,
    pub status: BoundStatus,
    pub cp: Rational,
}

/// Closed-form bound on forb(m, F(0,p,1,0)) with its proof status:
/// ⌊c_p·m⌋ + 1, refined to ⌊21m/5⌋ for p = 6, m ≡ 1 (mod 5), m >= 6.
pub fn forb_bound(p: u32, m: u32) -> Result<ForbBound, BoundError> {
    let c = cp(p)?;
    if m < 2 {
        return Err(BoundError::TooFewRows(m));
    }
    let generic = (c * Rational::from_integer(m as i64)).floor().to_integer() + 1;
    let (value, status) = match p {
        3 => (
            generic,
            if m >= 3 {
                BoundStatus::Exact
            } else {
                BoundStatus::UpperBoundProven
            },
        ),
        6 if m.is_multiple_of(5) => (generic, BoundStatus::Exact),
        6 if m % 5 == 1 && m >= 6 => ((21 * m as i64) / 5, BoundStatus::Exact),
        6 => (generic, BoundStatus::UpperBoundProven),
        7..=9 => (
            generic,
            if m.is_multiple_of(5) {
                BoundStatus::Exact
            } else {
                BoundStatus::UpperBoundProven
            },
        ),
        _ => (generic, BoundStatus::ConstructionLowerBoundOnly),
    };
    Ok(ForbBound {
        value,
        status,
        cp: c,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureBound {
    pub value: i64,
    /// The p whose c_p the conjectured rate (2^t − 1)/t would extend.
    pub p: u64,
}

/// Conjectured bound ⌊(2^t − 1)·m/t⌋ + 1 from the K_t \ 1_t block family,
/// with p = 2^(t−2) + 1.
pub fn conjecture_bound(t: u32, m: u32) -> ConjectureBound {
    assert!((2..=60).contains(&t));
    let pow = (1u128 << t) - 1;
    let value = (pow * m as u128 / t as u128) as i64 + 1;
    ConjectureBound {
        value,
        p: (1u64 << (t - 2)) + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp_table() {
        assert_eq!(cp(2).unwrap(), Rational::new(3, 2));
        assert_eq!(cp(3).unwrap(), Rational::new(7, 3));
        assert_eq!(cp(4).unwrap(), Rational::new(11, 4));
        assert_eq!(cp(5).unwrap(), Rational::new(15, 4));
        assert_eq!(cp(6).unwrap(), Rational::new(21, 5));
        assert_eq!(cp(7).unwrap(), Rational::new(24, 5));
        assert_eq!(cp(8).unwrap(), Rational::new(27, 5));
        assert_eq!(cp(9).unwrap(), Rational::new(31, 5));
        assert!(cp(1).is_err());
        assert!(cp(10).is_err());
    }

    #[test]
    fn nonsimple_bound() {
        assert_eq!(upper_bound_nonsimple(5, 10), 25);
        assert_eq!(upper_bound_nonsimple(3, 4), 6);
        assert_eq!(upper_bound_nonsimple(7, 0), 0);
    }

    #[test]
    fn simple_bound_values() {
        assert_eq!(upper_bound_simple(6, 10).unwrap(), 23);
        assert_eq!(upper_bound_simple(6, 12).unwrap(), 27);
        assert_eq!(upper_bound_simple(6, 14).unwrap(), 30);
        assert_eq!(upper_bound_simple(6, 16).unwrap(), 34);
        assert_eq!(upper_bound_simple(7, 10).unwrap(), 26);
        assert_eq!(upper_bound_simple(7, 12).unwrap(), 30);
        assert_eq!(upper_bound_simple(7, 14).unwrap(), 35);
        assert_eq!(upper_bound_simple(7, 16).unwrap(), 39);
        assert_eq!(upper_bound_simple(5, 10).unwrap(), 20);
    }

    #[test]
    fn simple_bound_window_guard() {
        // Degenerate end of the window: t = 4 gives 2k.
        for k in 3..=12 {
            assert_eq!(upper_bound_simple(k, 4).unwrap(), 2 * k as i64);
            assert!(upper_bound_simple(k, 3).is_err());
            let max = simple_bound_window(k);
            assert_eq!(max, k * k + k);
            assert!(upper_bound_simple(k, max).is_ok());
            assert!(upper_bound_simple(k, max + 1).is_err());
        }
        assert!(upper_bound_simple(2, 6).is_err());
    }

    #[test]
    fn clique_cost_lower_bounds() {
        // c_p·k − (bound + 1) >= 1 for k >= 6, with the single exception
        // p = 7, k = 6 where the gap is exactly 4/5.
        for p in [3u32, 6, 7, 8, 9] {
            let t = 2 * p - 2;
            for k in 6..=30u32 {
                let h = upper_bound_simple(k, t).unwrap();
                let gap = cp(p).unwrap() * Rational::from_integer(k as i64)
                    - Rational::from_integer(h + 1);
                if p == 7 && k == 6 {
                    assert_eq!(gap, Rational::new(4, 5));
                } else {
                    assert!(gap >= Rational::from_integer(1), "p={p} k={k} gap={gap}");
                }
            }
        }
    }

    #[test]
    fn clique_cost_table() {
        // k = 6 column: gaps 6/5, 4/5, 7/5, 11/5 for p = 6..9.
        let want = [
            (6, Rational::new(6, 5)),
            (7, Rational::new(4, 5)),
            (8, Rational::new(7, 5)),
            (9, Rational::new(11, 5)),
        ];
        for (p, gap) in want {
            let h = upper_bound_simple(6, 2 * p - 2).unwrap();
            let got = cp(p).unwrap() * Rational::from_integer(6) - Rational::from_integer(h + 1);
            assert_eq!(got, gap, "p={p}");
        }
    }

    #[test]
    fn forb_bound_values() {
        let b = forb_bound(3, 10).unwrap();
        assert_eq!((b.value, b.status), (24, BoundStatus::Exact));
        let b = forb_bound(6, 5).unwrap();
        assert_eq!((b.value, b.status), (22, BoundStatus::Exact));
        let b = forb_bound(6, 6).unwrap();
        assert_eq!((b.value, b.status), (25, BoundStatus::Exact));
        let b = forb_bound(6, 11).unwrap();
        assert_eq!((b.value, b.status), (46, BoundStatus::Exact));
        let b = forb_bound(6, 7).unwrap();
        assert_eq!((b.value, b.status), (30, BoundStatus::UpperBoundProven));
        let b = forb_bound(9, 5).unwrap();
        assert_eq!((b.value, b.status), (32, BoundStatus::Exact));
        let b = forb_bound(9, 7).unwrap();
        assert_eq!(b.status, BoundStatus::UpperBoundProven);
        let b = forb_bound(3, 2).unwrap();
        assert_eq!((b.value, b.status), (5, BoundStatus::UpperBoundProven));
        for p in [2u32, 4, 5] {
            let b = forb_bound(p, 8).unwrap();
            assert_eq!(b.status, BoundStatus::ConstructionLowerBoundOnly);
        }
        assert!(forb_bound(10, 5).is_err());
        assert!(forb_bound(6, 1).is_err());
    }

    #[test]
    fn conjecture_values() {
        let c = conjecture_bound(5, 5);
        assert_eq!((c.value, c.p), (32, 9));
        let c = conjecture_bound(3, 3);
        assert_eq!((c.value, c.p), (8, 3));
        let c = conjecture_bound(4, 4);
        assert_eq!((c.value, c.p), (16, 5));
        let c = conjecture_bound(2, 10);
        assert_eq!((c.value, c.p), (16, 2));
    }

    #[test]
    fn conjecture_matches_cp_at_small_t() {
        // (2^t − 1)/t equals c_p exactly at t = 2,3,4,5.
        for (t, p) in [(2u32, 2u32), (3, 3), (4, 5), (5, 9)] {
            let rate = Rational::new((1i64 << t) - 1, t as i64);
            assert_eq!(rate, cp(p).unwrap());
            assert_eq!(conjecture_bound(t, 7).p, p as u64);
        }
    }
}
