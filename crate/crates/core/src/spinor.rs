//! Which reflections of the extended group already lie in `Bi(m)`, and what
//! that says about `Bi(m)` once the extended group is known to be reflective.
//!
//! A reflection in a root of norm `k` lies in `Bi(m)` exactly when the square
//! class of `k` is that of `2` or of `2m`.

use crate::coxeter::{CoxeterDiagram, SubdiagramClass};
use crate::error::{Error, Result};
use crate::pipeline::Status;

/// `k` divided by its largest square divisor.
pub fn squarefree_part(k: i64) -> i64 {
    assert!(k >= 1, "squarefree_part needs k >= 1");
    let mut n = k;
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * n
}

pub fn reflection_in_bi(m: i64, k: i64) -> bool {
    let s = squarefree_part(k);
    s == 2 || s == squarefree_part(2 * m)
}

/// Fills every vertex whose reflection is not in `Bi(m)`.
pub fn mark_filled(diagram: &CoxeterDiagram, m: i64) -> CoxeterDiagram {
    let mut d = diagram.clone();
    for i in 0..d.len() {
        let filled = !reflection_in_bi(m, d.root(i).norm());
        d.set_filled(i, filled);
    }
    d
}

/// The reflections in the filled vertices generate a finite group.
pub fn non_bi_subgroup_finite(diagram: &CoxeterDiagram) -> bool {
    let filled = diagram.filled_set();
    filled.is_empty()
        || matches!(
            diagram.classify_subdiagram(&filled),
            SubdiagramClass::Elliptic(_)
        )
}

/// Reading of `Bi(m)` from a finite-volume diagram of the extended group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiReading {
    pub status: Status,
    /// The filled vertices form none of the recognised patterns.
    pub unmatched: bool,
}

pub fn bi_verdict_from_reflective_hat(diagram: &CoxeterDiagram, m: i64) -> Result<BiReading> {
    if !diagram.has_finite_volume() {
        return Err(Error::Precondition("diagram must have finite volume"));
    }
    let d = mark_filled(diagram, m);
    let reading = |status, unmatched| BiReading { status, unmatched };
    if non_bi_subgroup_finite(&d) {
        return Ok(reading(Status::Reflective, false));
    }
    let filled = d.filled_set();
    let class = d.classify_subdiagram(&filled);
    Ok(match filled.len() {
        2 if class.is_parabolic_of_rank(1) => reading(Status::QuasiReflective { rank: 1 }, false),
        4 if class.is_parabolic_of_rank(2) => reading(Status::QuasiReflective { rank: 2 }, false),
        _ => reading(Status::NotReflective, true),
    })
}
