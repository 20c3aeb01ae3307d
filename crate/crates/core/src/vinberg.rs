//! Vinberg's algorithm from the ideal base point `u0 = (1, 0, 0, 0)`.
//!
//! A root `e` has `B(e, u0) = -x2`, and the crystallographic condition against
//! the first basis vector forces `k | 2 x2`. So for each admissible norm `k`
//! only `x2 = j k / 2` can occur, with weight `j^2 k / 4`. The queue walks
//! these `(x2, k)` pairs in weight order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_rational::Ratio;
use serde::Serialize;

use crate::coxeter::CoxeterDiagram;
use crate::error::{Error, Result};
use crate::qform::{Branch, FormSpec, LatticeVector, Root, BASE_POINT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_roots: usize,
    pub max_weight_sq: Ratio<i64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_roots: 200,
            max_weight_sq: Ratio::from_integer(10_000),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Running,
    Terminated,
    BudgetExhausted,
}

/// The four roots through `u0` bounding its stabilizer.
pub fn initial_roots(form: &FormSpec) -> Result<Vec<Root>> {
    let m = form.m();
    if m == 3 {
        return Err(Error::UnsupportedBaseCusp);
    }
    let vecs = match form.branch() {
        Branch::A => [[0, 0, -1, 0], [1, 0, 1, 0], [0, 0, 0, -1], [m, 0, 0, 1]],
        Branch::B => [[0, 0, -1, 0], [1, 0, 1, 0], [0, 0, 1, -2], [m, 0, -1, 2]],
    };
    vecs.iter()
        .map(|v| Root::new(form, LatticeVector(*v)))
        .collect()
}

pub fn weight(form: &FormSpec, e: &Root) -> Ratio<i128> {
    let p = form.bilinear(e.vec(), &BASE_POINT);
    Ratio::new(p * p, e.norm() as i128)
}

/// Queue position of a pair `(x2, k)`: `4 * weight`, then `k`, then `x2`.
type PairKey = (i128, i64, i64);

fn pair_key(x2: i64, k: i64) -> PairKey {
    (4 * (x2 as i128) * (x2 as i128) / k as i128, k, x2)
}

/// Pending `(x2, k)` pairs in weight order.
#[derive(Clone, Debug)]
pub struct CandidateQueue {
    heap: BinaryHeap<Reverse<(PairKey, i64)>>,
}

impl CandidateQueue {
    pub fn new(form: &FormSpec) -> Self {
        let heap = form
            .allowed_norms()
            .into_iter()
            .map(|k| Reverse((pair_key(k / 2, k), 1)))
            .collect();
        CandidateQueue { heap }
    }

    /// Next `(x2, k)` pair, whose weight is `x2^2 / k`.
    pub fn pop(&mut self) -> (i64, i64) {
        let Reverse(((_, k, x2), j)) = self.heap.pop().expect("queue is infinite");
        let next = (j + 1) * k / 2;
        self.heap.push(Reverse((pair_key(next, k), j + 1)));
        (x2, k)
    }

    pub fn peek_weight(&self) -> Ratio<i128> {
        let Reverse(((w4, _, _), _)) = self.heap.peek().expect("queue is infinite");
        Ratio::new(*w4, 4)
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Every primitive crystallographic root with the given `x2` and norm `k`
/// that lies on the correct side of the four initial mirrors, sorted
/// lexicographically.
pub fn enumerate_candidates(form: &FormSpec, x2: i64, k: i64) -> Vec<Root> {
    let m = form.m();
    let mut out = Vec::new();
    let mut consider = |x3: i64, x4: i64, q: i128| {
        let num = q - k as i128;
        let den = 2 * x2 as i128;
        if num % den != 0 {
            return;
        }
        let Ok(x1) = i64::try_from(num / den) else {
            return;
        };
        let v = LatticeVector::new(x1, x2, x3, x4);
        if !v.is_primitive() || !form.crystallographic_ok(&v).unwrap_or(false) {
            return;
        }
        if let Ok(r) = Root::new(form, v) {
            debug_assert_eq!(r.norm(), k);
            out.push(r);
        }
    };
    match form.branch() {
        Branch::A => {
            for x3 in 0..=x2 / 2 {
                for x4 in 0..=x2 / 2 {
                    let q = 2 * (x3 as i128).pow(2) + 2 * m as i128 * (x4 as i128).pow(2);
                    consider(x3, x4, q);
                }
            }
        }
        Branch::B => {
            let c = (m + 1) / 2;
            for x4 in 0..=x2 {
                for x3 in -floor_div(x4, 2)..=floor_div(x2 - x4, 2) {
                    let (a, b) = (x3 as i128, x4 as i128);
                    let q = 2 * a * a + 2 * a * b + c as i128 * b * b;
                    consider(x3, x4, q);
                }
            }
        }
    }
    out.sort_by(|a, b| a.vec().cmp(b.vec()));
    out
}

/// The state of one run: accepted roots in order, plus the search frontier.
#[derive(Clone, Debug)]
pub struct RootSystem {
    form: FormSpec,
    roots: Vec<Root>,
    status: RunStatus,
    diagram: CoxeterDiagram,
    queue: CandidateQueue,
    /// Candidates of the current pair not yet tested.
    pending: Vec<Root>,
    /// Last candidate tested: its pair key and vector.
    frontier: Option<(PairKey, LatticeVector)>,
}

impl RootSystem {
    /// Starts from the initial roots.
    pub fn new(form: &FormSpec) -> Result<Self> {
        let roots = initial_roots(form)?;
        let diagram = crate::coxeter::build_diagram(form, &roots)?;
        Ok(RootSystem {
            form: form.clone(),
            roots,
            status: RunStatus::Running,
            diagram,
            queue: CandidateQueue::new(form),
            pending: Vec::new(),
            frontier: None,
        })
    }

    pub fn form(&self) -> &FormSpec {
        &self.form
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn status(&self) -> RunStatus {
        self.status
    }

    /// Diagram of the accepted roots, with no vertex filled.
    pub fn diagram(&self) -> &CoxeterDiagram {
        &self.diagram
    }

    fn acceptable(&self, v: &LatticeVector) -> bool {
        self.roots
            .iter()
            .all(|r| self.form.bilinear(v, r.vec()) <= 0)
    }

    /// Accepts and returns the next root, or `None` once the next candidate
    /// would exceed `max_weight_sq`.
    pub fn next_root(&mut self, max_weight_sq: Ratio<i64>) -> Result<Option<Root>> {
        let bound = Ratio::new(*max_weight_sq.numer() as i128, *max_weight_sq.denom() as i128);
        loop {
            if self.pending.is_empty() {
                if self.queue.peek_weight() > bound {
                    return Ok(None);
                }
                let (x2, k) = self.queue.pop();
                self.pending = enumerate_candidates(&self.form, x2, k);
                self.pending.reverse();
                if self.pending.is_empty() {
                    continue;
                }
            }
            let cand = self.pending.pop().expect("nonempty");
            let x2 = cand.vec().0[1];
            self.frontier = Some((pair_key(x2, cand.norm()), *cand.vec()));
            if self.acceptable(cand.vec()) {
                self.diagram.push(cand.clone())?;
                self.roots.push(cand.clone());
                return Ok(Some(cand));
            }
        }
    }

    /// Continues the run until the polyhedron has finite volume or the budget
    /// is spent. May be called again with a larger budget.
    pub fn extend(&mut self, budget: &Budget) -> Result<()> {
        if self.status == RunStatus::Terminated {
            return Ok(());
        }
        self.status = RunStatus::Running;
        loop {
            if self.roots.len() >= budget.max_roots {
                self.status = RunStatus::BudgetExhausted;
                return Ok(());
            }
            match self.next_root(budget.max_weight_sq)? {
                Some(_) => {
                    if self.diagram.has_finite_volume() {
                        self.status = RunStatus::Terminated;
                        return Ok(());
                    }
                }
                None => {
                    self.status = RunStatus::BudgetExhausted;
                    return Ok(());
                }
            }
        }
    }

    /// Whether `v` has already been tested as a candidate (accepted or not).
    /// `v` must be a root with `x2 > 0`.
    pub fn explored(&self, v: &LatticeVector, norm: i64) -> bool {
        let Some((key, last)) = &self.frontier else {
            return false;
        };
        let k = pair_key(v.0[1], norm);
        k < *key || (k == *key && v <= last)
    }

    /// Whether `v` could still be accepted later: a primitive crystallographic
    /// vector of positive norm, away from `u0`, not yet tested, with
    /// non-positive product against every accepted root.
    pub fn could_be_root(&self, v: &LatticeVector) -> bool {
        if v.0[1] <= 0 || !v.is_primitive() {
            return false;
        }
        let k = self.form.norm(v);
        if k <= 0 || !self.form.crystallographic_ok(v).unwrap_or(false) {
            return false;
        }
        let Ok(k) = i64::try_from(k) else {
            return false;
        };
        !self.explored(v, k) && self.acceptable(v)
    }
}

pub fn run(form: &FormSpec, budget: &Budget) -> Result<RootSystem> {
    let mut state = RootSystem::new(form)?;
    state.extend(budget)?;
    Ok(state)
}
