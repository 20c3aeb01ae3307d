//! Class groups of imaginary quadratic fields through reduced binary
//! quadratic forms, and the cusp-count bounds built on them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coxeter::CoxeterDiagram;
use crate::error::{Error, Result};
use crate::qform::is_squarefree;

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `g = gcd(a, b) >= 0` and `a x + b y = g`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl Bqf {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The identity class of discriminant `d`.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Bqf::new(1, b, (b * b - d) / 4)
    }

    pub fn inverse(&self) -> Self {
        Bqf::new(self.a, -self.b, self.c).reduce()
    }

    /// The reduced form equivalent to a positive definite form.
    pub fn reduce(&self) -> Self {
        let d = self.discriminant() as i128;
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if !(-a < b && b <= a) {
                let two_a = 2 * a;
                let mut r = b.rem_euclid(two_a);
                if r > a {
                    r -= two_a;
                }
                b = r;
                c = (b * b - d) / (4 * a);
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Bqf::new(a as i64, b as i64, c as i64)
    }
}

pub fn field_discriminant(m: i64) -> Result<i64> {
    if !is_squarefree(m) {
        return Err(Error::InvalidFieldParameter(m));
    }
    Ok(if m % 4 == 3 { -m } else { -4 * m })
}

fn check_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

/// All primitive reduced forms of discriminant `d`, sorted.
pub fn reduced_forms(d: i64) -> Result<Vec<Bqf>> {
    check_discriminant(d)?;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = Bqf::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// Gauss composition, returning the reduced composite.
pub fn compose(f: &Bqf, g: &Bqf) -> Result<Bqf> {
    let d = f.discriminant();
    if g.discriminant() != d {
        return Err(Error::DiscriminantMismatch(d, g.discriminant()));
    }
    let (f, g) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (dd, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (g0, u, _) = ext_gcd(a2, a1);
        (g0, u)
    };
    let (d1, x2, y2) = if s % dd == 0 {
        (dd, 0, -1)
    } else {
        let (g1, u, v) = ext_gcd(s, dd);
        (g1, u, -v)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    let to64 = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("form composition"));
    Ok(Bqf::new(to64(a3)?, to64(b3)?, to64(c3)?).reduce())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassGroupStructure {
    pub d: i64,
    pub h: u64,
    /// `d1 | d2 | ...`, all greater than 1.
    pub invariant_factors: Vec<u64>,
    /// Prime-power orders of the cyclic factors, sorted.
    pub elementary_divisors: Vec<u64>,
}

impl ClassGroupStructure {
    pub fn two_torsion_order(&self) -> u64 {
        1 << self.invariant_factors.iter().filter(|&&x| x % 2 == 0).count()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn element_order(f: &Bqf, id: &Bqf) -> Result<u64> {
    let mut x = *f;
    let mut n = 1;
    while x != *id {
        x = compose(&x, f)?;
        n += 1;
    }
    Ok(n)
}

/// Structure of the form class group, from the orders of its elements.
pub fn group_structure(d: i64) -> Result<ClassGroupStructure> {
    let forms = reduced_forms(d)?;
    let id = Bqf::principal(d);
    let h = forms.len() as u64;
    let orders = forms
        .iter()
        .map(|f| element_order(f, &id))
        .collect::<Result<Vec<u64>>>()?;
    let mut elementary = Vec::new();
    // per prime, the ranks r_k = #{cyclic factors of order >= p^k}
    let mut per_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for p in prime_factors(h) {
        let mut ranks = Vec::new();
        let mut prev = 1u64;
        let mut pk = p;
        loop {
            let n = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            if n == prev {
                break;
            }
            let mut r = 0;
            let mut q = n / prev;
            while q > 1 {
                q /= p;
                r += 1;
            }
            ranks.push(r);
            prev = n;
            pk *= p;
        }
        let mut powers = Vec::new();
        for (k, &r) in ranks.iter().enumerate() {
            let next = ranks.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(r - next) {
                powers.push(p.pow(k as u32 + 1));
            }
        }
        powers.sort_unstable_by(|a, b| b.cmp(a));
        elementary.extend(&powers);
        per_prime.insert(p, powers);
    }
    let len = per_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut invariant: Vec<u64> = (0..len)
        .map(|i| per_prime.values().map(|v| v.get(i).copied().unwrap_or(1)).product())
        .collect();
    invariant.reverse();
    elementary.sort_unstable();
    Ok(ClassGroupStructure {
        d,
        h,
        invariant_factors: invariant,
        elementary_divisors: elementary,
    })
}

/// Order of the 2-torsion of the class group, by genus theory.
pub fn two_part_order(m: i64) -> Result<u64> {
    if !is_squarefree(m) {
        return Err(Error::InvalidFieldParameter(m));
    }
    let t = prime_factors(m as u64).len() as u32;
    Ok(if m % 4 == 1 { 1 << t } else { 1 << t.saturating_sub(1) })
}

/// The four class-group restrictions, read on the primary decomposition:
/// 1. every factor is `Z/2`;
/// 2. every factor is `Z/2` or `Z/4`;
/// 3. every factor is `Z/2`, except at most one `Z/3` or `Z/4`;
/// 4. every factor is `Z/2` or `Z/4`, except at most one `Z/3`.
pub fn passes_filter(s: &ClassGroupStructure, case: u8) -> Result<bool> {
    let e = &s.elementary_divisors;
    let count = |x: u64| e.iter().filter(|&&v| v == x).count();
    let only = |allowed: &[u64]| e.iter().all(|v| allowed.contains(v));
    match case {
        1 => Ok(only(&[2])),
        2 => Ok(only(&[2, 4])),
        3 => Ok(only(&[2, 3, 4]) && count(3) + count(4) <= 1),
        4 => Ok(only(&[2, 3, 4]) && count(3) <= 1),
        _ => Err(Error::InvalidFilterCase(case)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    Bi,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundMode {
    Reflective,
    Quasi,
}

/// Class number and 2-part of the class group for the field of `m`.
pub fn class_numbers(m: i64) -> Result<(u64, u64)> {
    let s = group_structure(field_discriminant(m)?)?;
    Ok((s.h, two_part_order(m)?))
}

pub fn cusp_bound(group: Group, mode: BoundMode, h: u64, h2: u64) -> u64 {
    let g = match group {
        Group::Bi => 1,
        Group::Extended => h2,
    };
    match mode {
        BoundMode::Reflective => 12 * h * g,
        BoundMode::Quasi => 12 * g * (h - 1),
    }
}

/// Checks the necessary cusp conditions on a (possibly partial) diagram.
///
/// Reflective mode compares the number of ideal vertices with the bound.
/// Quasi mode needs a vertex whose mirror misses the singular ideal point,
/// which is unknown. So it collects every vertex with too many cusp pairs
/// and reports a violation only if those mirrors have no rational ideal
/// point in common, so that at least one of them qualifies. When violators
/// exist but might all pass through one ideal point, the result is
/// [`Error::NoAdmissibleVertex`].
pub fn cusp_bound_ok(diagram: &CoxeterDiagram, group: Group, mode: BoundMode, m: i64) -> Result<bool> {
    let (h, h2) = class_numbers(m)?;
    let bound = cusp_bound(group, mode, h, h2) as usize;
    match mode {
        BoundMode::Reflective => Ok(diagram.count_cusps() <= bound),
        BoundMode::Quasi => {
            let violators: Vec<usize> = (0..diagram.len())
                .filter(|&v| diagram.cusp_pairs_at_vertex(v) > bound)
                .collect();
            if violators.is_empty() {
                Ok(true)
            } else if diagram.may_share_ideal_point(&violators) {
                Err(Error::NoAdmissibleVertex)
            } else {
                Ok(false)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(field_discriminant(5), Ok(-20));
        assert_eq!(field_discriminant(23), Ok(-23));
        assert_eq!(field_discriminant(33), Ok(-132));
        assert!(field_discriminant(4).is_err());
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(
            reduced_forms(-20).unwrap(),
            vec![Bqf::new(1, 0, 5), Bqf::new(2, 2, 3)]
        );
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![Bqf::new(1, 1, 6), Bqf::new(2, -1, 3), Bqf::new(2, 1, 3)]
        );
        assert_eq!(reduced_forms(-4).unwrap(), vec![Bqf::new(1, 0, 1)]);
        assert_eq!(reduced_forms(-3).unwrap(), vec![Bqf::new(1, 1, 1)]);
        assert!(reduced_forms(-5).is_err());
        assert!(reduced_forms(8).is_err());
    }

    #[test]
    fn composition_examples() {
        let (p, q) = (Bqf::new(1, 0, 5), Bqf::new(2, 2, 3));
        assert_eq!(compose(&p, &q).unwrap(), q);
        assert_eq!(compose(&q, &q).unwrap(), p);
        let r = Bqf::new(2, 1, 3);
        assert_eq!(compose(&r, &r).unwrap(), Bqf::new(2, -1, 3));
        assert_eq!(
            compose(&p, &r),
            Err(Error::DiscriminantMismatch(-20, -23))
        );
        assert_eq!(Bqf::new(2, 5, 6).reduce().discriminant(), 25 - 48);
    }

    #[test]
    fn structures() {
        let s = group_structure(-23).unwrap();
        assert_eq!((s.h, s.invariant_factors.clone()), (3, vec![3]));
        assert_eq!(group_structure(-2379).unwrap().invariant_factors, vec![4, 4]);
        let t = group_structure(-4).unwrap();
        assert_eq!((t.h, t.invariant_factors), (1, vec![]));
        let s26 = group_structure(field_discriminant(26).unwrap()).unwrap();
        assert_eq!(s26.invariant_factors, vec![6]);
        assert_eq!(s26.elementary_divisors, vec![2, 3]);
        assert_eq!(group_structure(-164).unwrap().invariant_factors, vec![8]);
        assert_eq!(group_structure(-47).unwrap().invariant_factors, vec![5]);
        assert_eq!(group_structure(-84).unwrap().invariant_factors, vec![2, 2]);
    }

    #[test]
    fn two_parts() {
        assert_eq!(two_part_order(21), Ok(4));
        assert_eq!(two_part_order(30), Ok(4));
        assert_eq!(two_part_order(23), Ok(1));
        assert_eq!(two_part_order(1), Ok(1));
        assert_eq!(two_part_order(2), Ok(1));
    }

    #[test]
    fn filters() {
        let s23 = group_structure(-23).unwrap();
        assert!(!passes_filter(&s23, 1).unwrap());
        assert!(passes_filter(&s23, 3).unwrap());
        let s = group_structure(-2379).unwrap();
        assert!(!passes_filter(&s, 3).unwrap());
        assert!(passes_filter(&s, 4).unwrap());
        let t = group_structure(-4).unwrap();
        for case in 1..=4 {
            assert!(passes_filter(&t, case).unwrap());
        }
        assert_eq!(passes_filter(&t, 5), Err(Error::InvalidFilterCase(5)));
        let s26 = group_structure(-104).unwrap();
        assert!(passes_filter(&s26, 3).unwrap());
        assert!(passes_filter(&s26, 4).unwrap());
        assert!(!passes_filter(&s26, 2).unwrap());
    }

    #[test]
    fn bounds() {
        assert_eq!(cusp_bound(Group::Bi, BoundMode::Quasi, 3, 1), 24);
        assert_eq!(cusp_bound(Group::Bi, BoundMode::Quasi, 1, 1), 0);
        let (h, h2) = class_numbers(33).unwrap();
        assert_eq!((h, h2), (4, 4));
        assert_eq!(cusp_bound(Group::Extended, BoundMode::Reflective, h, h2), 192);
    }
}
