//! Exact branch-and-bound over the 2^m column universe.
//!
//! Columns are branched in ascending mask order, so every chosen set is
//! strictly increasing and therefore simple. Feasibility is maintained
//! incrementally through the pair counts and never repaired; pruning uses
//! per-pair capacity bounds plus a pooled bound when every pair is active.

use crate::containment::{contains_general, ForbiddenPattern};
use crate::matrix::{BinaryMatrix, Mask, MAX_FULL_K, MAX_ROWS};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

const DEADLINE_STRIDE: u64 = 1024;

/// Canonicality checks cost m! row permutations each; beyond this many rows
/// they cost more than the subtrees they remove.
const MAX_PRUNE_ROWS: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("budget must be positive")]
    BadBudget,
    #[error("m = {0} outside 2..=63")]
    BadRows(u32),
    #[error("k = {0} outside 2..=6")]
    BadK(u32),
    #[error("extremal enumeration limited to m <= 6, got {0}")]
    EnumRows(u32),
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub value: usize,
    pub witness: BinaryMatrix,
    /// True iff the search space was exhausted.
    pub optimal: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct EnumerateResult {
    pub value: usize,
    /// Canonical forms of the maximum witnesses, one per isomorphism class,
    /// in ascending column-list order.
    pub classes: Vec<BinaryMatrix>,
    /// False when a budget expired before the space was exhausted.
    pub exhaustive: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Best value and witness shared across subtree workers. The value mirror is
/// monotonically increasing; stale reads only weaken pruning.
struct SharedBest {
    value: AtomicUsize,
    witness: Mutex<Vec<Mask>>,
}

impl SharedBest {
    fn new() -> Self {
        SharedBest {
            value: AtomicUsize::new(0),
            witness: Mutex::new(Vec::new()),
        }
    }

    fn value(&self) -> usize {
        self.value.load(Ordering::Relaxed)
    }

    fn offer(&self, chosen: &[Mask]) {
        if chosen.len() <= self.value() {
            return;
        }
        let mut w = self.witness.lock().unwrap();
        // Re-check under the lock; the atomic is a fast-path mirror.
        if chosen.len() > w.len() {
            *w = chosen.to_vec();
            self.value.store(chosen.len(), Ordering::Relaxed);
        }
    }
}

struct Clock {
    deadline: Instant,
    expired: AtomicBool,
}

impl Clock {
    fn start(budget: Duration) -> Self {
        Clock {
            deadline: Instant::now() + budget,
            expired: AtomicBool::new(false),
        }
    }

    fn expired(&self) -> bool {
        self.expired.load(Ordering::Relaxed)
    }

    /// Check the wall clock; returns true when out of time.
    fn tick(&self) -> bool {
        if self.expired() {
            return true;
        }
        if Instant::now() >= self.deadline {
            self.expired.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }
}

fn validate(budget: Duration) -> Result<(), SearchError> {
    if budget.is_zero() {
        return Err(SearchError::BadBudget);
    }
    Ok(())
}

/// forb(m, F): the maximum number of columns of a simple m-rowed matrix
/// avoiding F. `optimal` is false only on budget expiry. Exhaustive runs are
/// realistic for m <= 6 with two-row patterns.
pub fn forb_search(
    m: u32,
    pattern: &ForbiddenPattern,
    budget: Duration,
    jobs: usize,
) -> Result<SearchResult, SearchError> {
    validate(budget)?;
    if !(2..=MAX_ROWS).contains(&m) {
        return Err(SearchError::BadRows(m));
    }
    let started = Instant::now();
    let clock = Clock::start(budget);
    let best = SharedBest::new();
    let nodes = AtomicU64::new(0);
    let exhausted = match pattern {
        ForbiddenPattern::TwoRow(p) => {
            if m <= MAX_FULL_K {
                let engine = PairEngine::new(m, *p, &clock, &best, &nodes, None);
                run_split(&engine, m, jobs)
            } else {
                lazy_two_row(m, *p, &clock, &best, &nodes)
            }
        }
        ForbiddenPattern::General(f) => {
            if m <= MAX_FULL_K {
                let mut engine = GeneralEngine::new(m, f, &clock, &best, &nodes);
                engine.dfs(&(0..1u64 << m).collect::<Vec<_>>(), 0);
                engine.flush();
                !clock.expired()
            } else {
                lazy_general(m, f, &clock, &best, &nodes)
            }
        }
    };
    let witness_masks = best.witness.lock().unwrap().clone();
    let nodes = nodes.load(Ordering::Relaxed);
    log::debug!(
        "forb_search m={m}: value={}, exhausted={exhausted}, nodes={nodes}, elapsed={:.3?}",
        witness_masks.len(),
        started.elapsed()
    );
    Ok(SearchResult {
        value: witness_masks.len(),
        witness: BinaryMatrix::new(m, witness_masks).unwrap(),
        optimal: exhausted,
        nodes,
        elapsed: started.elapsed(),
    })
}

/// Ext(m, F) up to row/column permutation: first establishes forb(m, F),
/// then collects every maximum witness and deduplicates by canonical form.
/// Each phase gets `budget`.
pub fn enumerate_extremal(
    m: u32,
    pattern: &ForbiddenPattern,
    budget: Duration,
    jobs: usize,
) -> Result<EnumerateResult, SearchError> {
    validate(budget)?;
    if !(2..=6).contains(&m) {
        return Err(SearchError::EnumRows(m));
    }
    let started = Instant::now();
    let first = forb_search(m, pattern, budget, jobs)?;
    let target = first.value;

    let clock = Clock::start(budget);
    let best = SharedBest::new();
    let nodes = AtomicU64::new(first.nodes);
    let sink: Mutex<std::collections::BTreeSet<Vec<Mask>>> = Mutex::new(Default::default());
    let exhausted = match pattern {
        ForbiddenPattern::TwoRow(p) => {
            let engine = PairEngine::new(
                m,
                *p,
                &clock,
                &best,
                &nodes,
                Some(Collector {
                    target,
                    sink: &sink,
                }),
            );
            run_split(&engine, m, jobs)
        }
        ForbiddenPattern::General(f) => {
            let mut engine = GeneralEngine::new(m, f, &clock, &best, &nodes);
            engine.collect = Some(Collector {
                target,
                sink: &sink,
            });
            engine.dfs(&(0..1u64 << m).collect::<Vec<_>>(), 0);
            engine.flush();
            !clock.expired()
        }
    };
    let classes: Vec<BinaryMatrix> = sink
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|masks| BinaryMatrix::new(m, masks).unwrap())
        .collect();
    Ok(EnumerateResult {
        value: target,
        classes,
        exhaustive: first.optimal && exhausted,
        nodes: nodes.load(Ordering::Relaxed),
        elapsed: started.elapsed(),
    })
}

/// Maximum simple k-rowed matrix over non-constant columns in which every
/// pair of rows differs in at most t columns.
pub fn max_bounded_diff(
    k: u32,
    t: u32,
    budget: Duration,
    jobs: usize,
) -> Result<SearchResult, SearchError> {
    validate(budget)?;
    if !(2..=6).contains(&k) {
        return Err(SearchError::BadK(k));
    }
    let started = Instant::now();
    let clock = Clock::start(budget);
    let best = SharedBest::new();
    let nodes = AtomicU64::new(0);
    let engine = DiffEngine::new(k, t, &clock, &best, &nodes);
    let exhausted = run_split(&engine, k, jobs);
    let witness_masks = best.witness.lock().unwrap().clone();
    log::debug!(
        "max_bounded_diff k={k} t={t}: value={}, exhausted={exhausted}",
        witness_masks.len()
    );
    Ok(SearchResult {
        value: witness_masks.len(),
        witness: BinaryMatrix::new(k, witness_masks).unwrap(),
        optimal: exhausted,
        nodes: nodes.load(Ordering::Relaxed),
        elapsed: started.elapsed(),
    })
}

/// Leaf collector for extremal enumeration.
struct Collector<'a> {
    target: usize,
    sink: &'a Mutex<std::collections::BTreeSet<Vec<Mask>>>,
}

impl Collector<'_> {
    fn offer(&self, m: u32, chosen: &[Mask]) {
        if chosen.len() != self.target {
            return;
        }
        let canon = BinaryMatrix::new(m, chosen.to_vec())
            .unwrap()
            .canonical_form()
            .expect("enumeration rows fit the canonical limit");
        self.sink.lock().unwrap().insert(canon.masks().to_vec());
    }
}

/// Engines expose their root universe and a subtree runner so the top-level
/// split can fan subtrees out across workers.
trait Splittable: Sync {
    fn universe(&self) -> Vec<Mask>;
    /// Explore the subtree rooted at choosing `root` first; `rest` holds the
    /// universe entries after `root`.
    fn subtree(&self, root: Mask, rest: &[Mask]);
    fn enumerating(&self) -> bool;
    fn expired(&self) -> bool;
}

/// Run all depth-1 subtrees, sequentially or on a worker pool.
/// Returns true iff the space was exhausted within budget.
fn run_split<E: Splittable>(engine: &E, m: u32, jobs: usize) -> bool {
    let universe = engine.universe();
    let canon_roots: Vec<(Mask, &[Mask])> = universe
        .iter()
        .enumerate()
        .filter(|&(_, &root)| {
            engine.enumerating() || m > MAX_PRUNE_ROWS || canonical_prefix(m, &[root])
        })
        .map(|(i, &root)| (root, &universe[i + 1..]))
        .collect();
    if jobs <= 1 {
        for (root, rest) in canon_roots {
            engine.subtree(root, rest);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool");
        pool.install(|| {
            rayon::scope(|s| {
                for (root, rest) in canon_roots {
                    s.spawn(move |_| engine.subtree(root, rest));
                }
            });
        });
    }
    !engine.expired()
}

/// True iff the sorted column list is its own canonical form.
fn canonical_prefix(m: u32, chosen: &[Mask]) -> bool {
    let a = BinaryMatrix::new(m, chosen.to_vec()).unwrap();
    a.canonical_form().map_or(true, |c| c.masks() == chosen)
}

/// Search state for the two-row pattern: incremental ordered pair counts.
struct PairEngine<'a> {
    m: u32,
    cap: usize,
    clock: &'a Clock,
    best: &'a SharedBest,
    nodes: &'a AtomicU64,
    collect: Option<Collector<'a>>,
}

/// Per-worker mutable state.
struct PairState {
    chosen: Vec<Mask>,
    n01: Vec<usize>,
    local_nodes: u64,
}

impl<'a> PairEngine<'a> {
    fn new(
        m: u32,
        p: u32,
        clock: &'a Clock,
        best: &'a SharedBest,
        nodes: &'a AtomicU64,
        collect: Option<Collector<'a>>,
    ) -> Self {
        assert!(p >= 1);
        PairEngine {
            m,
            cap: (p - 1) as usize,
            clock,
            best,
            nodes,
            collect,
        }
    }

    fn fresh(&self) -> PairState {
        PairState {
            chosen: Vec::new(),
            n01: vec![0; (self.m * self.m) as usize],
            local_nodes: 0,
        }
    }

    fn apply(&self, st: &mut PairState, col: Mask, delta: isize) {
        let m = self.m;
        for i in 0..m {
            if col >> i & 1 == 0 {
                let mut ones = col;
                while ones != 0 {
                    let j = ones.trailing_zeros();
                    let cell = &mut st.n01[(i * m + j) as usize];
                    *cell = cell.wrapping_add_signed(delta);
                    ones &= ones - 1;
                }
            }
        }
        if delta > 0 {
            st.chosen.push(col);
        } else {
            st.chosen.pop();
        }
    }

    /// A column is admissible iff adding it keeps every pair within the
    /// avoidance condition.
    fn admissible(&self, st: &PairState, col: Mask) -> bool {
        let m = self.m;
        for i in 0..m {
            for j in i + 1..m {
                let (ci, cj) = (col >> i & 1, col >> j & 1);
                if ci == cj {
                    continue;
                }
                // The incremented direction and its opposite.
                let (fwd, bck) = if ci == 0 { (i, j) } else { (j, i) };
                let a = st.n01[(fwd * m + bck) as usize];
                let b = st.n01[(bck * m + fwd) as usize];
                if b != 0 && (a + 1 > self.cap || b > self.cap) {
                    return false;
                }
            }
        }
        true
    }

    /// Upper bound on how many of `cands` can still join `chosen` together.
    fn additions_bound(&self, st: &PairState, cands: &[Mask]) -> usize {
        let m = self.m;
        let mut bound = cands.len();
        let mut all_active = true;
        let mut slack_sum = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                let a = st.n01[(i * m + j) as usize];
                let b = st.n01[(j * m + i) as usize];
                let (mut eq, mut c01, mut c10) = (0usize, 0usize, 0usize);
                for &c in cands {
                    match (c >> i & 1, c >> j & 1) {
                        (x, y) if x == y => eq += 1,
                        (0, _) => c01 += 1,
                        _ => c10 += 1,
                    }
                }
                let pair = if a >= 1 && b >= 1 {
                    slack_sum += (self.cap - a) + (self.cap - b);
                    eq + c01.min(self.cap - a) + c10.min(self.cap - b)
                } else {
                    all_active = false;
                    match (a, b) {
                        (0, 0) => eq + c01.max(c10).max(c01.min(self.cap) + c10.min(self.cap)),
                        (0, _) => {
                            eq + c10.max(c01.min(self.cap) + c10.min(self.cap.saturating_sub(b)))
                        }
                        _ => eq + c01.max(c10.min(self.cap) + c01.min(self.cap.saturating_sub(a))),
                    }
                };
                bound = bound.min(pair);
            }
        }
        if all_active && m >= 2 {
            // Every non-constant column consumes at least m-1 count slots.
            let full = (1u64 << m) - 1;
            let constants = cands.iter().filter(|&&c| c == 0 || c == full).count();
            bound = bound.min(constants + slack_sum / (m as usize - 1));
        }
        bound
    }

    fn dfs(&self, st: &mut PairState, cands: &[Mask], depth: u32) {
        st.local_nodes += 1;
        if st.local_nodes.is_multiple_of(DEADLINE_STRIDE) {
            self.nodes.fetch_add(DEADLINE_STRIDE, Ordering::Relaxed);
            if self.clock.tick() {
                return;
            }
        }
        if self.clock.expired() {
            return;
        }
        match &self.collect {
            Some(c) => {
                if st.chosen.len() == c.target {
                    c.offer(self.m, &st.chosen);
                    return;
                }
                if st.chosen.len() + self.additions_bound(st, cands) < c.target {
                    return;
                }
            }
            None => {
                self.best.offer(&st.chosen);
                if st.chosen.len() + self.additions_bound(st, cands) <= self.best.value() {
                    return;
                }
            }
        }
        for (idx, &c) in cands.iter().enumerate() {
            if self.clock.expired() {
                return;
            }
            self.apply(st, c, 1);
            let keep = self.collect.is_some()
                || depth >= 2
                || self.m > MAX_PRUNE_ROWS
                || canonical_prefix(self.m, &st.chosen);
            if keep {
                let next: Vec<Mask> = cands[idx + 1..]
                    .iter()
                    .copied()
                    .filter(|&d| self.admissible(st, d))
                    .collect();
                self.dfs(st, &next, depth + 1);
            }
            self.apply(st, c, -1);
        }
    }
}

impl Splittable for PairEngine<'_> {
    fn universe(&self) -> Vec<Mask> {
        (0..1u64 << self.m).collect()
    }

    fn subtree(&self, root: Mask, rest: &[Mask]) {
        if self.clock.expired() {
            return;
        }
        let mut st = self.fresh();
        self.apply(&mut st, root, 1);
        let cands: Vec<Mask> = rest
            .iter()
            .copied()
            .filter(|&d| self.admissible(&st, d))
            .collect();
        self.dfs(&mut st, &cands, 1);
        self.apply(&mut st, root, -1);
        self.nodes
            .fetch_add(st.local_nodes % DEADLINE_STRIDE, Ordering::Relaxed);
    }

    fn enumerating(&self) -> bool {
        self.collect.is_some()
    }

    fn expired(&self) -> bool {
        self.clock.expired()
    }
}

/// Lazy variant for 20 < m <= 63: the universe is never materialized, no
/// bound pruning, exhaustion unreachable in practice. Exists so that large m
/// degrade into a best-effort lower bound instead of an error.
fn lazy_two_row(m: u32, p: u32, clock: &Clock, best: &SharedBest, nodes: &AtomicU64) -> bool {
    let engine = PairEngine::new(m, p, clock, best, nodes, None);
    let mut st = engine.fresh();
    lazy_dfs(&engine, &mut st, 0);
    nodes.fetch_add(st.local_nodes % DEADLINE_STRIDE, Ordering::Relaxed);
    !clock.expired()
}

fn lazy_dfs(engine: &PairEngine<'_>, st: &mut PairState, from: Mask) {
    engine.best.offer(&st.chosen);
    let top = 1u64 << engine.m;
    let mut c = from;
    while c < top {
        st.local_nodes += 1;
        if st.local_nodes.is_multiple_of(DEADLINE_STRIDE) {
            engine.nodes.fetch_add(DEADLINE_STRIDE, Ordering::Relaxed);
            if engine.clock.tick() {
                return;
            }
        }
        if engine.admissible(st, c) {
            engine.apply(st, c, 1);
            lazy_dfs(engine, st, c + 1);
            engine.apply(st, c, -1);
            if engine.clock.expired() {
                return;
            }
        }
        c += 1;
    }
}

/// Lazy fallback for general patterns beyond the materialization limit.
fn lazy_general(
    m: u32,
    f: &BinaryMatrix,
    clock: &Clock,
    best: &SharedBest,
    nodes: &AtomicU64,
) -> bool {
    let mut engine = GeneralEngine::new(m, f, clock, best, nodes);
    lazy_general_dfs(&mut engine, 0);
    engine.flush();
    !clock.expired()
}

fn lazy_general_dfs(engine: &mut GeneralEngine<'_>, from: Mask) {
    engine.best.offer(&engine.chosen);
    let top = 1u64 << engine.m;
    let mut c = from;
    while c < top {
        engine.local_nodes += 1;
        if engine.local_nodes.is_multiple_of(DEADLINE_STRIDE) {
            engine.nodes.fetch_add(DEADLINE_STRIDE, Ordering::Relaxed);
            if engine.clock.tick() {
                return;
            }
        }
        if engine.admissible(c) {
            engine.chosen.push(c);
            lazy_general_dfs(engine, c + 1);
            engine.chosen.pop();
            if engine.clock.expired() {
                return;
            }
        }
        c += 1;
    }
}

/// Search state for the bounded-pairwise-difference oracle: per-pair
/// difference counts over non-constant columns.
struct DiffEngine<'a> {
    k: u32,
    t: usize,
    clock: &'a Clock,
    best: &'a SharedBest,
    nodes: &'a AtomicU64,
}

struct DiffState {
    chosen: Vec<Mask>,
    diff: Vec<usize>,
    local_nodes: u64,
}

impl<'a> DiffEngine<'a> {
    fn new(k: u32, t: u32, clock: &'a Clock, best: &'a SharedBest, nodes: &'a AtomicU64) -> Self {
        DiffEngine {
            k,
            t: t as usize,
            clock,
            best,
            nodes,
        }
    }

    fn fresh(&self) -> DiffState {
        DiffState {
            chosen: Vec::new(),
            diff: vec![0; (self.k * self.k) as usize],
            local_nodes: 0,
        }
    }

    fn pair_cell(&self, i: u32, j: u32) -> usize {
        (i * self.k + j) as usize
    }

    fn apply(&self, st: &mut DiffState, col: Mask, delta: isize) {
        for i in 0..self.k {
            for j in i + 1..self.k {
                if (col >> i & 1) != (col >> j & 1) {
                    let cell = self.pair_cell(i, j);
                    st.diff[cell] = st.diff[cell].wrapping_add_signed(delta);
                }
            }
        }
        if delta > 0 {
            st.chosen.push(col);
        } else {
            st.chosen.pop();
        }
    }

    fn admissible(&self, st: &DiffState, col: Mask) -> bool {
        for i in 0..self.k {
            for j in i + 1..self.k {
                if (col >> i & 1) != (col >> j & 1) && st.diff[self.pair_cell(i, j)] + 1 > self.t {
                    return false;
                }
            }
        }
        true
    }

    fn additions_bound(&self, st: &DiffState, cands: &[Mask]) -> usize {
        let mut bound = cands.len();
        let mut slack_sum = 0usize;
        for i in 0..self.k {
            for j in i + 1..self.k {
                let d = st.diff[self.pair_cell(i, j)];
                let slack = self.t - d;
                slack_sum += slack;
                let (mut eq, mut ne) = (0usize, 0usize);
                for &c in cands {
                    if (c >> i & 1) == (c >> j & 1) {
                        eq += 1;
                    } else {
                        ne += 1;
                    }
                }
                bound = bound.min(eq + ne.min(slack));
            }
        }
        // Every non-constant column differs on at least k-1 pairs.
        bound.min(slack_sum / (self.k as usize - 1))
    }

    fn dfs(&self, st: &mut DiffState, cands: &[Mask], depth: u32) {
        st.local_nodes += 1;
        if st.local_nodes.is_multiple_of(DEADLINE_STRIDE) {
            self.nodes.fetch_add(DEADLINE_STRIDE, Ordering::Relaxed);
            if self.clock.tick() {
                return;
            }
        }
        if self.clock.expired() {
            return;
        }
        self.best.offer(&st.chosen);
        if st.chosen.len() + self.additions_bound(st, cands) <= self.best.value() {
            return;
        }
        for (idx, &c) in cands.iter().enumerate() {
            if self.clock.expired() {
                return;
            }
            self.apply(st, c, 1);
            let keep = depth >= 2 || canonical_prefix(self.k, &st.chosen);
            if keep {
                let next: Vec<Mask> = cands[idx + 1..]
                    .iter()
                    .copied()
                    .filter(|&d| self.admissible(st, d))
                    .collect();
                self.dfs(st, &next, depth + 1);
            }
            self.apply(st, c, -1);
        }
    }
}

impl Splittable for DiffEngine<'_> {
    fn universe(&self) -> Vec<Mask> {
        let full = (1u64 << self.k) - 1;
        (1..full).collect()
    }

    fn subtree(&self, root: Mask, rest: &[Mask]) {
        if self.clock.expired() {
            return;
        }
        let mut st = self.fresh();
        self.apply(&mut st, root, 1);
        if self.t >= 1 {
            let cands: Vec<Mask> = rest
                .iter()
                .copied()
                .filter(|&d| self.admissible(&st, d))
                .collect();
            self.dfs(&mut st, &cands, 1);
        }
        self.apply(&mut st, root, -1);
        self.nodes
            .fetch_add(st.local_nodes % DEADLINE_STRIDE, Ordering::Relaxed);
    }

    fn enumerating(&self) -> bool {
        false
    }

    fn expired(&self) -> bool {
        self.clock.expired()
    }
}

/// Fallback engine for arbitrary forbidden matrices: feasibility by the
/// general containment test, no pair pruning.
struct GeneralEngine<'a> {
    m: u32,
    f: &'a BinaryMatrix,
    clock: &'a Clock,
    best: &'a SharedBest,
    nodes: &'a AtomicU64,
    collect: Option<Collector<'a>>,
    chosen: Vec<Mask>,
    local_nodes: u64,
}

impl<'a> GeneralEngine<'a> {
    fn new(
        m: u32,
        f: &'a BinaryMatrix,
        clock: &'a Clock,
        best: &'a SharedBest,
        nodes: &'a AtomicU64,
    ) -> Self {
        GeneralEngine {
            m,
            f,
            clock,
            best,
            nodes,
            collect: None,
            chosen: Vec::new(),
            local_nodes: 0,
        }
    }

    fn admissible(&mut self, col: Mask) -> bool {
        self.chosen.push(col);
        let a = BinaryMatrix::new(self.m, self.chosen.clone()).unwrap();
        let ok = contains_general(&a, self.f).is_none();
        self.chosen.pop();
        ok
    }

    fn flush(&self) {
        self.nodes
            .fetch_add(self.local_nodes % DEADLINE_STRIDE, Ordering::Relaxed);
    }

    fn dfs(&mut self, cands: &[Mask], depth: u32) {
        self.local_nodes += 1;
        if self.local_nodes.is_multiple_of(DEADLINE_STRIDE) {
            self.nodes.fetch_add(DEADLINE_STRIDE, Ordering::Relaxed);
            if self.clock.tick() {
                return;
            }
        }
        if self.clock.expired() {
            return;
        }
        match &self.collect {
            Some(c) => {
                if self.chosen.len() == c.target {
                    c.offer(self.m, &self.chosen);
                    return;
                }
                if self.chosen.len() + cands.len() < c.target {
                    return;
                }
            }
            None => {
                self.best.offer(&self.chosen);
                if self.chosen.len() + cands.len() <= self.best.value() {
                    return;
                }
            }
        }
        for idx in 0..cands.len() {
            if self.clock.expired() {
                return;
            }
            let c = cands[idx];
            if !self.admissible(c) {
                continue;
            }
            self.chosen.push(c);
            let keep = self.collect.is_some()
                || depth >= 2
                || self.m > MAX_PRUNE_ROWS
                || canonical_prefix(self.m, &self.chosen);
            if keep {
                let next: Vec<Mask> = cands[idx + 1..]
                    .iter()
                    .copied()
                    .filter(|&d| self.admissible(d))
                    .collect();
                self.dfs(&next, depth + 1);
            }
            self.chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containment::avoids_two_row;

    fn secs(s: u64) -> Duration {
        Duration::from_secs(s)
    }

    /// Independent oracle: try every subset of the 2^m column universe.
    fn brute_forb(m: u32, p: u32) -> usize {
        let n = 1usize << m;
        let mut best = 0;
        for subset in 0u32..1 << n {
            let cols: Vec<Mask> = (0..n)
                .filter(|&c| subset >> c & 1 == 1)
                .map(|c| c as u64)
                .collect();
            if cols.len() > best {
                let a = BinaryMatrix::new(m, cols).unwrap();
                if avoids_two_row(&a, p) {
                    best = a.columns();
                }
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_baseline_m2() {
        for p in 1..=5u32 {
            let r = forb_search(2, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            assert!(r.optimal);
            assert_eq!(r.value, brute_forb(2, p), "p={p}");
        }
    }

    #[test]
    fn matches_exhaustive_baseline_m3() {
        for p in [1u32, 2, 3, 4, 7] {
            let r = forb_search(3, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            assert!(r.optimal);
            assert_eq!(r.value, brute_forb(3, p), "p={p}");
        }
    }

    #[test]
    fn known_small_values() {
        let r = forb_search(2, &ForbiddenPattern::TwoRow(2), secs(60), 1).unwrap();
        assert_eq!(r.value, 4);
        let r = forb_search(3, &ForbiddenPattern::TwoRow(3), secs(60), 1).unwrap();
        assert_eq!(r.value, 8);
        let r = forb_search(4, &ForbiddenPattern::TwoRow(3), secs(60), 1).unwrap();
        assert_eq!(r.value, 10);
        assert!(r.optimal);
        assert!(r.witness.is_simple());
        assert!(avoids_two_row(&r.witness, 3));
        assert_eq!(r.witness.columns(), 10);
    }

    #[test]
    fn witness_always_valid() {
        for p in 2..=6u32 {
            let r = forb_search(4, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            assert!(r.witness.is_simple());
            assert!(avoids_two_row(&r.witness, p));
            assert_eq!(r.witness.columns(), r.value);
        }
    }

    #[test]
    fn monotone_in_m_and_p() {
        let mut prev_m = 0;
        for m in 2..=4u32 {
            let r = forb_search(m, &ForbiddenPattern::TwoRow(3), secs(60), 1).unwrap();
            assert!(r.value >= prev_m);
            prev_m = r.value;
        }
        let mut prev_p = 0;
        for p in 1..=6u32 {
            let r = forb_search(4, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            assert!(r.value >= prev_p, "p={p}");
            prev_p = r.value;
        }
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        for p in [2u32, 4] {
            let s = forb_search(4, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            let par = forb_search(4, &ForbiddenPattern::TwoRow(p), secs(60), 4).unwrap();
            assert_eq!(s.value, par.value);
            assert!(par.optimal);
        }
    }

    #[test]
    fn enumerate_small() {
        // forb(3, p=3) = 8 forces the whole 3-row universe: one class.
        let e = enumerate_extremal(3, &ForbiddenPattern::TwoRow(3), secs(60), 1).unwrap();
        assert_eq!(e.value, 8);
        assert!(e.exhaustive);
        assert_eq!(e.classes.len(), 1);
        assert_eq!(
            e.classes[0],
            BinaryMatrix::k_full(3).unwrap().canonical_form().unwrap()
        );
        // The 4-row maximum is also unique up to isomorphism.
        let e = enumerate_extremal(4, &ForbiddenPattern::TwoRow(3), secs(60), 1).unwrap();
        assert_eq!(e.value, 10);
        assert_eq!(e.classes.len(), 1);
        assert!(e.classes.iter().all(|c| avoids_two_row(c, 3)));
    }

    #[test]
    fn extremal_class_counts_m5() {
        // Frozen from exhaustive runs: the p=8 maximum is unique up to
        // isomorphism, the p=7 maximum is not.
        for (p, classes) in [(6u32, 3usize), (7, 4), (8, 1), (9, 1)] {
            let e = enumerate_extremal(5, &ForbiddenPattern::TwoRow(p), secs(600), 1).unwrap();
            assert!(e.exhaustive);
            assert_eq!(e.classes.len(), classes, "p={p}");
            for c in &e.classes {
                assert!(c.is_simple());
                assert!(avoids_two_row(c, p));
                assert_eq!(c.columns(), e.value);
            }
        }
    }

    #[test]
    fn enumerate_rejects_large_m() {
        assert!(matches!(
            enumerate_extremal(7, &ForbiddenPattern::TwoRow(3), secs(1), 1),
            Err(SearchError::EnumRows(7))
        ));
    }

    #[test]
    fn budget_expiry_is_reported() {
        let r = forb_search(
            10,
            &ForbiddenPattern::TwoRow(4),
            Duration::from_millis(50),
            1,
        )
        .unwrap();
        assert!(!r.optimal);
        assert!(r.witness.is_simple());
        assert!(avoids_two_row(&r.witness, 4));
        assert!(forb_search(5, &ForbiddenPattern::TwoRow(2), Duration::ZERO, 1).is_err());
    }

    #[test]
    fn large_m_lazy_path() {
        let r = forb_search(
            30,
            &ForbiddenPattern::TwoRow(3),
            Duration::from_millis(300),
            1,
        )
        .unwrap();
        assert!(!r.optimal);
        assert!(r.value > 0);
        assert!(avoids_two_row(&r.witness, 3));
        assert!(forb_search(64, &ForbiddenPattern::TwoRow(3), secs(1), 1).is_err());
    }

    #[test]
    fn general_pattern_chain() {
        // Avoiding the 2x2 identity forces a chain of comparable columns:
        // at most m+1 distinct subsets.
        let i2 = BinaryMatrix::new(2, vec![0b01, 0b10]).unwrap();
        let r = forb_search(3, &ForbiddenPattern::General(i2.clone()), secs(60), 1).unwrap();
        assert!(r.optimal);
        assert_eq!(r.value, 4);
        // The expanded two-row pattern gives the same values as the fast path.
        for p in 1..=3u32 {
            let fast = forb_search(3, &ForbiddenPattern::TwoRow(p), secs(60), 1).unwrap();
            let gen = forb_search(
                3,
                &ForbiddenPattern::General(ForbiddenPattern::TwoRow(p).expand()),
                secs(60),
                1,
            )
            .unwrap();
            assert_eq!(fast.value, gen.value, "p={p}");
        }
    }

    #[test]
    fn bounded_diff_small() {
        let r = max_bounded_diff(3, 4, secs(60), 1).unwrap();
        assert!(r.optimal);
        assert_eq!(r.value, 6);
        // t = 0 admits no non-constant column.
        let r = max_bounded_diff(4, 0, secs(60), 1).unwrap();
        assert_eq!(r.value, 0);
        assert!(max_bounded_diff(7, 4, secs(1), 1).is_err());
        assert!(max_bounded_diff(1, 4, secs(1), 1).is_err());
    }

    #[test]
    fn bounded_diff_respects_nonsimple_bound() {
        use crate::bounds::upper_bound_nonsimple;
        for k in 3..=4u32 {
            for t in [4u32, 6, 8] {
                let r = max_bounded_diff(k, t, secs(60), 1).unwrap();
                assert!(r.optimal);
                assert!(r.value as i64 <= upper_bound_nonsimple(k, t), "k={k} t={t}");
                for i in 0..k {
                    for j in i + 1..k {
                        let d = r
                            .witness
                            .masks()
                            .iter()
                            .filter(|&&c| (c >> i & 1) != (c >> j & 1))
                            .count();
                        assert!(d <= t as usize);
                    }
                }
            }
        }
    }
}
