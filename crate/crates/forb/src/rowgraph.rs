//! The what-is-missing graph G(A) of an avoiding matrix: rows are vertices,
//! each pair carries exactly one edge class derived from the pair counts.
//! Undirected components, their clique flags, the component order induced by
//! the directed edges, and the per-component blocks recover the layered block
//! shape of the extremal constructions.

use crate::bounds;
use crate::containment::{contains_two_row, pair_profile, Witness};
use crate::matrix::{BinaryMatrix, Mask};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    /// Both pair counts in [1, p-1].
    Undirected,
    /// n01(i,j) = 0, n01(j,i) >= 1: i before j.
    Forward,
    /// n01(j,i) = 0, n01(i,j) >= 1: j before i.
    Backward,
    /// Both counts zero: rows identical as sets of incident columns.
    Duplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub class: EdgeClass,
}

/// Topological order of components, or a directed cycle among component
/// indices when no order exists (requires Duplicate cross edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderOutcome {
    Total(Vec<usize>),
    Cyclic(Vec<usize>),
}

/// Component block B_i: the columns deletable together with the component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Columns of A non-constant on the component, restricted to its rows,
    /// plus one zero column per matching boundary column of A.
    pub matrix: BinaryMatrix,
    /// Indices of those columns in A.
    pub column_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GraphReport {
    pub m: u32,
    pub p: u32,
    /// One entry per unordered pair, i < j.
    pub edges: Vec<Edge>,
    /// Row sets of the undirected components; partition of 0..m, listed by
    /// smallest row.
    pub components: Vec<Vec<u32>>,
    /// Per component: every internal pair Undirected.
    pub cliques: Vec<bool>,
    pub order: OrderOutcome,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("matrix contains F(0,{p},1,0): rows {:?}, columns {:?}", witness.rows, witness.cols)]
    Contains { p: u32, witness: Witness },
}

impl GraphReport {
    /// Class of the unordered pair {i, j}; directions reported as stored
    /// (Forward means min(i,j) -> max(i,j)).
    pub fn class_of(&self, i: u32, j: u32) -> EdgeClass {
        assert!(i != j && i < self.m && j < self.m);
        let (a, b) = (i.min(j), i.max(j));
        let e = self.edges[pair_index(self.m, a, b)];
        debug_assert!(e.i == a && e.j == b);
        e.class
    }

    /// True iff row x precedes row y in the directed part D(A).
    fn directed(&self, x: u32, y: u32) -> bool {
        if x == y {
            return false;
        }
        match self.class_of(x, y) {
            EdgeClass::Forward => x < y,
            EdgeClass::Backward => x > y,
            _ => false,
        }
    }
}

/// Classify every pair of rows of an avoiding matrix and derive components,
/// clique flags, component order and blocks. Containing matrices are refused
/// with a witness.
pub fn build_graph(a: &BinaryMatrix, p: u32) -> Result<GraphReport, GraphError> {
    assert!(p >= 1);
    if let Some(witness) = contains_two_row(a, p) {
        return Err(GraphError::Contains { p, witness });
    }
    let m = a.rows();
    if m == 1 {
        let mut report = GraphReport {
            m,
            p,
            edges: Vec::new(),
            components: vec![vec![0]],
            cliques: vec![true],
            order: OrderOutcome::Total(vec![0]),
            blocks: Vec::new(),
        };
        report.blocks = extract_blocks(a, &report);
        return Ok(report);
    }

    let prof = pair_profile(a).unwrap();
    let cap = (p - 1) as usize;
    let mut edges = Vec::with_capacity((m * (m - 1) / 2) as usize);
    for i in 0..m {
        for j in i + 1..m {
            let ij = prof.n01(i, j);
            let ji = prof.n01(j, i);
            let class = match (ij, ji) {
                (0, 0) => EdgeClass::Duplicate,
                (0, _) => EdgeClass::Forward,
                (_, 0) => EdgeClass::Backward,
                _ => {
                    debug_assert!(ij <= cap && ji <= cap);
                    EdgeClass::Undirected
                }
            };
            edges.push(Edge { i, j, class });
        }
    }

    let components = undirected_components(m, &edges);
    let comp_of = component_index(m, &components);

    let cliques: Vec<bool> = components
        .iter()
        .map(|rows| {
            rows.iter().enumerate().all(|(t, &i)| {
                rows[t + 1..].iter().all(|&j| {
                    matches!(
                        edges[pair_index(m, i.min(j), i.max(j))].class,
                        EdgeClass::Undirected
                    )
                })
            })
        })
        .collect();

    let order = order_components(&components, &comp_of, &edges);

    let mut report = GraphReport {
        m,
        p,
        edges,
        components,
        cliques,
        order,
        blocks: Vec::new(),
    };
    report.blocks = extract_blocks(a, &report);
    Ok(report)
}

fn pair_index(m: u32, i: u32, j: u32) -> usize {
    debug_assert!(i < j);
    // Row-major position of (i,j) in the i<j triangle.
    let i = i as usize;
    let j = j as usize;
    let m = m as usize;
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

fn undirected_components(m: u32, edges: &[Edge]) -> Vec<Vec<u32>> {
    let mut parent: Vec<u32> = (0..m).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        let mut c = x;
        while parent[c as usize] != r {
            let next = parent[c as usize];
            parent[c as usize] = r;
            c = next;
        }
        r
    }
    for e in edges {
        if e.class == EdgeClass::Undirected {
            let (ri, rj) = (find(&mut parent, e.i), find(&mut parent, e.j));
            if ri != rj {
                parent[ri.max(rj) as usize] = ri.min(rj);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for r in 0..m {
        groups.entry(find(&mut parent, r)).or_default().push(r);
    }
    groups.into_values().collect()
}

fn component_index(m: u32, components: &[Vec<u32>]) -> Vec<usize> {
    let mut comp_of = vec![0usize; m as usize];
    for (ci, rows) in components.iter().enumerate() {
        for &r in rows {
            comp_of[r as usize] = ci;
        }
    }
    comp_of
}

/// Kahn's algorithm over the contracted digraph; ties broken by smallest
/// contained row. Duplicate cross pairs orient both ways, so they force a
/// reported cycle.
fn order_components(components: &[Vec<u32>], comp_of: &[usize], edges: &[Edge]) -> OrderOutcome {
    let t = components.len();
    let mut succ: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); t];
    for e in edges {
        let (ci, cj) = (comp_of[e.i as usize], comp_of[e.j as usize]);
        if ci == cj {
            continue;
        }
        match e.class {
            EdgeClass::Forward => {
                succ[ci].insert(cj);
            }
            EdgeClass::Backward => {
                succ[cj].insert(ci);
            }
            EdgeClass::Duplicate => {
                succ[ci].insert(cj);
                succ[cj].insert(ci);
            }
            EdgeClass::Undirected => unreachable!("undirected cross pair"),
        }
    }
    let mut indeg = vec![0usize; t];
    for s in &succ {
        for &y in s {
            indeg[y] += 1;
        }
    }
    // Components are listed by smallest row, so index order is the tie-break.
    let mut order = Vec::with_capacity(t);
    let mut ready: std::collections::BTreeSet<usize> = (0..t).filter(|&c| indeg[c] == 0).collect();
    while let Some(&c) = ready.iter().next() {
        ready.remove(&c);
        order.push(c);
        for &y in &succ[c] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                ready.insert(y);
            }
        }
    }
    if order.len() == t {
        return OrderOutcome::Total(order);
    }
    // Every leftover node keeps at least one predecessor among the leftover
    // nodes, so walking predecessors must revisit a node.
    let leftover: std::collections::BTreeSet<usize> =
        (0..t).filter(|c| !order.contains(c)).collect();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); t];
    for (x, s) in succ.iter().enumerate() {
        for &y in s {
            if leftover.contains(&x) && leftover.contains(&y) {
                pred[y].push(x);
            }
        }
    }
    let mut path = Vec::new();
    let mut seen = vec![false; t];
    let mut cur = *leftover.iter().next().unwrap();
    while !seen[cur] {
        seen[cur] = true;
        path.push(cur);
        cur = pred[cur][0];
    }
    let start = path.iter().position(|&x| x == cur).unwrap();
    let mut cycle = path[start..].to_vec();
    cycle.reverse();
    OrderOutcome::Cyclic(cycle)
}

/// Every column non-constant on some component is non-constant on exactly
/// one; blocks collect those columns restricted to the component, plus zero
/// columns for matching boundary columns (all-ones on the preceding
/// components, zero elsewhere).
fn extract_blocks(a: &BinaryMatrix, report: &GraphReport) -> Vec<Block> {
    let comp_masks: Vec<Mask> = report
        .components
        .iter()
        .map(|rows| rows.iter().fold(0u64, |acc, &r| acc | 1 << r))
        .collect();

    for &col in a.masks() {
        let spanned = comp_masks
            .iter()
            .filter(|&&cm| col & cm != 0 && col & cm != cm)
            .count();
        assert!(
            spanned <= 1,
            "column {col:#x} non-constant on {spanned} components"
        );
    }

    let boundary_mask = |ci: usize| -> Option<Mask> {
        match &report.order {
            OrderOutcome::Total(order) => {
                let pos = order.iter().position(|&c| c == ci).unwrap();
                Some(
                    order[..pos]
                        .iter()
                        .fold(0u64, |acc, &c| acc | comp_masks[c]),
                )
            }
            OrderOutcome::Cyclic(_) => None,
        }
    };

    report
        .components
        .iter()
        .enumerate()
        .map(|(ci, rows)| {
            let cm = comp_masks[ci];
            let mut column_indices: Vec<usize> = Vec::new();
            let mut local_cols: Vec<Mask> = Vec::new();
            for (c, &col) in a.masks().iter().enumerate() {
                if col & cm != 0 && col & cm != cm {
                    column_indices.push(c);
                    local_cols.push(restrict_mask(col, rows));
                }
            }
            if let Some(bm) = boundary_mask(ci) {
                for (c, &col) in a.masks().iter().enumerate() {
                    if col == bm {
                        column_indices.push(c);
                        local_cols.push(0);
                    }
                }
            }
            Block {
                matrix: BinaryMatrix::new(rows.len() as u32, local_cols).unwrap(),
                column_indices,
            }
        })
        .collect()
}

fn restrict_mask(col: Mask, rows: &[u32]) -> Mask {
    let mut out = 0u64;
    for (t, &r) in rows.iter().enumerate() {
        if col >> r & 1 == 1 {
            out |= 1 << t;
        }
    }
    out
}

/// True iff the directed relation is transitive: x->y and y->z imply x->z.
pub fn is_transitive(report: &GraphReport) -> bool {
    let m = report.m;
    for x in 0..m {
        for y in 0..m {
            if y == x || !report.directed(x, y) {
                continue;
            }
            for z in 0..m {
                if z != x && z != y && report.directed(y, z) && !report.directed(x, z) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff every pair inside component `index` is Undirected.
/// Panics when the index is out of range.
pub fn is_clique(report: &GraphReport, index: usize) -> bool {
    report.cliques[index]
}

/// Rebuild the layered construction shape from the blocks: each block's
/// columns get all-ones on the preceding components and zeros below, then one
/// global all-ones column is appended. Equals the input up to column order
/// exactly when the input is construction-shaped. None when the component
/// order is cyclic.
pub fn reassemble(report: &GraphReport) -> Option<BinaryMatrix> {
    let order = match &report.order {
        OrderOutcome::Total(o) => o,
        OrderOutcome::Cyclic(_) => return None,
    };
    let comp_masks: Vec<Mask> = report
        .components
        .iter()
        .map(|rows| rows.iter().fold(0u64, |acc, &r| acc | 1 << r))
        .collect();
    let mut cols: Vec<Mask> = Vec::new();
    let mut prefix = 0u64;
    for &ci in order {
        let rows = &report.components[ci];
        for &local in report.blocks[ci].matrix.masks() {
            let mut col = prefix;
            for (t, &r) in rows.iter().enumerate() {
                if local >> t & 1 == 1 {
                    col |= 1 << r;
                }
            }
            cols.push(col);
        }
        prefix |= comp_masks[ci];
    }
    cols.push((1u64 << report.m) - 1);
    Some(BinaryMatrix::new(report.m, cols).unwrap())
}

#[derive(Serialize)]
struct ReportJson {
    m: u32,
    p: u32,
    edges: Vec<Edge>,
    components: Vec<Vec<u32>>,
    cliques: Vec<bool>,
    order: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<Vec<usize>>,
    costs: Vec<Option<String>>,
}

/// JSON report with per-component deletion costs as exact rational strings;
/// null where the cost is undefined (cyclic order, non-simple deletion, or
/// no c_p for this p).
pub fn analysis_json(a: &BinaryMatrix, report: &GraphReport) -> serde_json::Value {
    let costs = bounds::component_costs(a, report)
        .into_iter()
        .map(|c| c.map(|c| c.cost.to_string()))
        .collect();
    let (order, cycle) = match &report.order {
        OrderOutcome::Total(o) => (o.clone(), None),
        OrderOutcome::Cyclic(c) => (Vec::new(), Some(c.clone())),
    };
    serde_json::to_value(ReportJson {
        m: report.m,
        p: report.p,
        edges: report.edges.clone(),
        components: report.components.clone(),
        cliques: report.cliques.clone(),
        order,
        cycle,
        costs,
    })
    .expect("report serializes")
}
