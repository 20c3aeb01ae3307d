//! The lattice `L_m` of Hermitian 2x2 matrices over the ring of integers of
//! `Q(sqrt(-m))`, written in integer coordinates `(x1, x2, x3, x4)`, together
//! with its even integral Lorentzian form.
//!
//! For `m = 1, 2 (mod 4)` the form is `-2 x1 x2 + 2 x3^2 + 2m x4^2`; for
//! `m = 3 (mod 4)` it is `-2 x1 x2 + 2 x3^2 + 2 x3 x4 + (m+1)/2 x4^2`.
//! Everything here is exact integer arithmetic.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spinor;

/// The isotropic base point `u0 = (1, 0, 0, 0)` used by the root search.
pub const BASE_POINT: LatticeVector = LatticeVector([1, 0, 0, 0]);

/// A vector of `L_m` in the coordinates `(x1, x2, x3, x4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeVector(pub [i64; 4]);

impl LatticeVector {
    pub const fn new(x1: i64, x2: i64, x3: i64, x4: i64) -> Self {
        LatticeVector([x1, x2, x3, x4])
    }

    pub fn coords(&self) -> [i64; 4] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.map(|x| -x))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// Which of the two coordinate models of `L_m` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// `m = 1, 2 (mod 4)`.
    A,
    /// `m = 3 (mod 4)`.
    B,
}

/// The lattice `L_m` with its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpec {
    m: i64,
    branch: Branch,
    gram: [[i64; 4]; 4],
}

pub fn is_squarefree(n: i64) -> bool {
    if n < 1 {
        return false;
    }
    let mut n = n;
    let mut p = 2i64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Builds the form for a square-free `m >= 1`.
pub fn make_form(m: i64) -> Result<FormSpec> {
    if !is_squarefree(m) {
        return Err(Error::InvalidFieldParameter(m));
    }
    let (branch, gram) = if m % 4 == 3 {
        let c = (m + 1) / 2;
        (
            Branch::B,
            [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 2, 1], [0, 0, 1, c]],
        )
    } else {
        (
            Branch::A,
            [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2 * m]],
        )
    };
    Ok(FormSpec { m, branch, gram })
}

impl FormSpec {
    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn gram(&self) -> &[[i64; 4]; 4] {
        &self.gram
    }

    /// `G v`, i.e. the vector of products `B(v, b_i)` with the standard basis.
    pub fn gram_times(&self, v: &LatticeVector) -> [i128; 4] {
        let mut out = [0i128; 4];
        for (i, row) in self.gram.iter().enumerate() {
            out[i] = row
                .iter()
                .zip(v.0.iter())
                .map(|(&g, &x)| g as i128 * x as i128)
                .sum();
        }
        out
    }

    pub fn bilinear(&self, u: &LatticeVector, v: &LatticeVector) -> i128 {
        let gv = self.gram_times(v);
        u.0.iter().zip(gv.iter()).map(|(&x, &y)| x as i128 * y).sum()
    }

    pub fn norm(&self, v: &LatticeVector) -> i128 {
        self.bilinear(v, v)
    }

    /// `2 B(e, x) / B(e, e)` is an integer for every lattice vector `x`.
    ///
    /// Only the four basis vectors need checking.
    pub fn crystallographic_ok(&self, e: &LatticeVector) -> Result<bool> {
        let k = self.norm(e);
        if k <= 0 {
            return Err(Error::NonPositiveNorm(k));
        }
        Ok(self.gram_times(e).iter().all(|&p| (2 * p) % k == 0))
    }

    /// Every norm a root can have: the even divisors of `4m` (branch A) or
    /// `2m` (branch B). This is a superset; candidates are still checked
    /// individually.
    pub fn allowed_norms(&self) -> Vec<i64> {
        let n = match self.branch {
            Branch::A => 4 * self.m,
            Branch::B => 2 * self.m,
        };
        (1..=n).filter(|k| k % 2 == 0 && n % k == 0).collect()
    }
}

/// Divides out the content and fixes the sign so that `B(v, u0) <= 0`
/// (equivalently `x2 >= 0`); when `x2 = 0` the first nonzero coordinate is
/// made positive.
pub fn normalize_primitive(v: &LatticeVector) -> Result<LatticeVector> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.content();
    let w = LatticeVector(v.0.map(|x| x / g));
    let flip = match w.0[1].signum() {
        -1 => true,
        1 => false,
        _ => w.0.iter().find(|&&x| x != 0).copied().unwrap_or(0) < 0,
    };
    Ok(if flip { w.neg() } else { w })
}

/// A primitive lattice vector of positive norm together with its norm,
/// its weight `B(e, u0)^2 / B(e, e)` and whether its reflection lies in `Bi(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    vec: LatticeVector,
    norm: i64,
    weight_sq: Ratio<i64>,
    in_bi: bool,
}

impl Root {
    /// Wraps `vec` as a root of `form`. The crystallographic condition is not
    /// re-checked here; see [`FormSpec::crystallographic_ok`].
    pub fn new(form: &FormSpec, vec: LatticeVector) -> Result<Root> {
        let k = form.norm(&vec);
        if k <= 0 {
            return Err(Error::NonPositiveNorm(k));
        }
        let norm = i64::try_from(k).map_err(|_| Error::Overflow("root norm"))?;
        let p = i64::try_from(form.bilinear(&vec, &BASE_POINT))
            .map_err(|_| Error::Overflow("root weight"))?;
        let num = p.checked_mul(p).ok_or(Error::Overflow("root weight"))?;
        Ok(Root {
            vec,
            norm,
            weight_sq: Ratio::new(num, norm),
            in_bi: spinor::reflection_in_bi(form.m(), norm),
        })
    }

    pub fn vec(&self) -> &LatticeVector {
        &self.vec
    }

    pub fn norm(&self) -> i64 {
        self.norm
    }

    pub fn weight_sq(&self) -> Ratio<i64> {
        self.weight_sq
    }

    pub fn in_bi(&self) -> bool {
        self.in_bi
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [k={}]", self.vec, self.norm)
    }
}
