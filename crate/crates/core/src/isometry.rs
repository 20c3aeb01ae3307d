//! Integral isometries of `(L_m, B)`: exact type classification, symmetries
//! of partial Coxeter diagrams, and certificates for runs that do not
//! terminate.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::classgroup::{self, BoundMode, Group};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4, IDENTITY};
use crate::qform::{normalize_primitive, FormSpec, LatticeVector, Root};
use crate::vinberg::{RootSystem, RunStatus};

/// A 4x4 integer matrix acting on coordinate columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IntegralIsometry {
    pub mat: Mat4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IsometryType {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

fn gram128(form: &FormSpec) -> Mat4 {
    form.gram().map(|row| row.map(|x| x as i128))
}

fn to_vec4(v: &LatticeVector) -> Vec4 {
    v.0.map(|x| x as i128)
}

fn to_lattice(v: &Vec4) -> Option<LatticeVector> {
    let mut out = [0i64; 4];
    for i in 0..4 {
        out[i] = i64::try_from(v[i]).ok()?;
    }
    Some(LatticeVector(out))
}

impl IntegralIsometry {
    pub fn new(mat: Mat4) -> Self {
        IntegralIsometry { mat }
    }

    pub fn identity() -> Self {
        IntegralIsometry { mat: IDENTITY }
    }

    pub fn apply(&self, v: &LatticeVector) -> Option<LatticeVector> {
        to_lattice(&linalg::mat_vec(&self.mat, &to_vec4(v)))
    }

    pub fn compose(&self, other: &IntegralIsometry) -> IntegralIsometry {
        IntegralIsometry::new(linalg::mat_mul(&self.mat, &other.mat))
    }

    /// Inverse of a matrix with determinant `+-1`.
    pub fn inverse(&self) -> Option<IntegralIsometry> {
        let d = linalg::det(&self.mat);
        if d.abs() != 1 {
            return None;
        }
        Some(IntegralIsometry::new(
            linalg::adjugate(&self.mat).map(|row| row.map(|x| x * d)),
        ))
    }

    pub fn pow(&self, n: u32) -> IntegralIsometry {
        (0..n).fold(IntegralIsometry::identity(), |acc, _| acc.compose(self))
    }
}

/// The reflection `x -> x - 2 B(x, e) / k * e` as an integer matrix.
pub fn reflection_matrix(form: &FormSpec, e: &Root) -> IntegralIsometry {
    let ge = form.gram_times(e.vec());
    let k = e.norm() as i128;
    let v = to_vec4(e.vec());
    let mut mat = IDENTITY;
    for j in 0..4 {
        let c = 2 * ge[j] / k;
        for i in 0..4 {
            mat[i][j] -= c * v[i];
        }
    }
    IntegralIsometry::new(mat)
}

/// `g^T B g = B` and `det g = +-1`.
pub fn preserves_form(g: &IntegralIsometry, form: &FormSpec) -> bool {
    let b = gram128(form);
    let lhs = linalg::mat_mul(&linalg::transpose(&g.mat), &linalg::mat_mul(&b, &g.mat));
    lhs == b && linalg::det(&g.mat).abs() == 1
}

/// Integer polynomial, lowest degree first.
type Poly = Vec<i128>;

/// `det(x I - g)`.
pub fn characteristic_polynomial(g: &IntegralIsometry) -> Poly {
    let a = &g.mat;
    let e1: i128 = (0..4).map(|i| a[i][i]).sum();
    let mut e2 = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            e2 += a[i][i] * a[j][j] - a[i][j] * a[j][i];
        }
    }
    let mut e3 = 0;
    for skip in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&i| i != skip).collect();
        let m = |r: usize, c: usize| a[idx[r]][idx[c]];
        e3 += m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
    let e4 = linalg::det(a);
    vec![e4, -e3, e2, -e1, 1]
}

/// Cyclotomic polynomials of degree at most 4.
const CYCLOTOMIC: [&[i128]; 9] = [
    &[-1, 1],
    &[1, 1],
    &[1, 1, 1],
    &[1, 0, 1],
    &[1, -1, 1],
    &[1, 1, 1, 1, 1],
    &[1, 0, 0, 0, 1],
    &[1, -1, 1, -1, 1],
    &[1, 0, -1, 0, 1],
];

/// Exact division by a monic polynomial, if it divides.
fn divide_monic(p: &Poly, d: &[i128]) -> Option<Poly> {
    let dn = d.len() - 1;
    if p.len() < d.len() {
        return None;
    }
    let mut r = p.clone();
    let mut q = vec![0i128; p.len() - dn];
    for i in (0..q.len()).rev() {
        let c = r[i + dn];
        q[i] = c;
        for (j, &dj) in d.iter().enumerate() {
            r[i + j] -= c * dj;
        }
    }
    r.iter().all(|&x| x == 0).then_some(q)
}

/// Distinct cyclotomic factors of `p`, or `None` if some factor is not
/// cyclotomic.
fn cyclotomic_radical(p: &Poly) -> Option<Vec<&'static [i128]>> {
    let mut rest = p.clone();
    let mut found = Vec::new();
    for phi in CYCLOTOMIC {
        let mut hit = false;
        while let Some(q) = divide_monic(&rest, phi) {
            rest = q;
            hit = true;
        }
        if hit {
            found.push(phi);
        }
    }
    (rest == vec![1]).then_some(found)
}

fn poly_mul(a: &[i128], b: &[i128]) -> Poly {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval_matrix_poly(p: &[i128], g: &Mat4) -> Mat4 {
    let mut acc = [[0i128; 4]; 4];
    for &c in p.iter().rev() {
        acc = linalg::mat_mul(&acc, g);
        for i in 0..4 {
            acc[i][i] += c;
        }
    }
    acc
}

/// Exact type of a form-preserving integer matrix.
pub fn classify(g: &IntegralIsometry, form: &FormSpec) -> Result<IsometryType> {
    if !preserves_form(g, form) {
        return Err(Error::NotAnIsometry);
    }
    Ok(classify_unchecked(g))
}

fn classify_unchecked(g: &IntegralIsometry) -> IsometryType {
    if g.mat == IDENTITY {
        return IsometryType::Identity;
    }
    let Some(factors) = cyclotomic_radical(&characteristic_polynomial(g)) else {
        return IsometryType::Loxodromic;
    };
    let radical = factors
        .iter()
        .fold(vec![1i128], |acc, f| poly_mul(&acc, f));
    if eval_matrix_poly(&radical, &g.mat) == [[0; 4]; 4] {
        IsometryType::Elliptic
    } else {
        IsometryType::Parabolic
    }
}

/// The isotropic direction fixed by a parabolic isometry.
pub fn parabolic_fixed_point(g: &IntegralIsometry, form: &FormSpec) -> Result<LatticeVector> {
    if classify(g, form)? != IsometryType::Parabolic {
        return Err(Error::NotParabolic);
    }
    let shifted = linalg::sub(&g.mat, &IDENTITY);
    let fixed = linalg::kernel(&shifted);
    let b = gram128(form);
    let mut rows: Vec<Vec4> = shifted.to_vec();
    rows.extend(fixed.iter().map(|k| linalg::mat_vec(&b, k)));
    let radical = linalg::kernel(&rows);
    let [q] = radical.as_slice() else {
        return Err(Error::NotParabolic);
    };
    let v = to_lattice(q).ok_or(Error::Overflow("fixed point"))?;
    if form.norm(&v) != 0 {
        return Err(Error::NotParabolic);
    }
    normalize_primitive(&v)
}

/// Translation of `g` on the horosphere at `q`, as a vector of `q^perp`
/// defined modulo `q` and up to a common positive scale. `None` when no
/// power `g^N` with `N <= 12` acts as a pure translation.
fn translation(g: &IntegralIsometry, q: &LatticeVector, form: &FormSpec) -> Option<Vec4> {
    let qv = to_vec4(q);
    let perp = linalg::kernel(&[form.gram_times(q)]);
    let probe = (0..4)
        .map(|i| {
            let mut e = [0i128; 4];
            e[i] = 1;
            e
        })
        .find(|e| form.gram_times(q).iter().zip(e).map(|(a, b)| a * b).sum::<i128>() != 0)?;
    (1..=12).find_map(|n| {
        let gn = g.pow(n);
        let shifted = linalg::sub(&gn.mat, &IDENTITY);
        let trivial = perp.iter().all(|v| {
            let w = linalg::mat_vec(&shifted, v);
            linalg::rank(&[w, qv]) <= 1
        });
        trivial.then(|| linalg::mat_vec(&shifted, &probe))
    })
}

/// Whether two parabolics fixing `q` translate in independent directions.
pub fn independent_translations(
    g1: &IntegralIsometry,
    g2: &IntegralIsometry,
    q: &LatticeVector,
    form: &FormSpec,
) -> bool {
    match (translation(g1, q, form), translation(g2, q, form)) {
        (Some(t1), Some(t2)) => linalg::rank(&[t1, t2, to_vec4(q)]) == 3,
        _ => false,
    }
}

/// Isometries that permute the accepted roots of `state` among themselves
/// and vectors that could still be accepted later, found by matching the
/// first four independent roots against root tuples with the same norms and
/// pairwise products. The identity is excluded.
pub fn find_diagram_symmetry(state: &RootSystem) -> Vec<IntegralIsometry> {
    let form = state.form();
    let roots = state.roots();
    let n = roots.len();
    let mut base = Vec::new();
    let mut rows: Vec<Vec4> = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(to_vec4(r.vec()));
        if linalg::rank(&trial) == trial.len() {
            rows = trial;
            base.push(i);
            if base.len() == 4 {
                break;
            }
        }
    }
    if base.len() < 4 {
        return Vec::new();
    }
    let bmat = linalg::from_columns(&[rows[0], rows[1], rows[2], rows[3]]);
    let det = linalg::det(&bmat);
    let adj = linalg::adjugate(&bmat);
    let products: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| form.bilinear(roots[i].vec(), roots[j].vec()))
                .collect()
        })
        .collect();
    let known: HashSet<LatticeVector> = roots.iter().map(|r| *r.vec()).collect();
    let open = state.status() != RunStatus::Terminated;

    let mut found = Vec::new();
    let mut images = Vec::with_capacity(4);
    search_images(&base, &products, roots, &mut images, &mut |img: &[usize]| {
        let cols = [0, 1, 2, 3].map(|t| to_vec4(roots[img[t]].vec()));
        let c = linalg::from_columns(&cols);
        let num = linalg::mat_mul(&c, &adj);
        if num.iter().flatten().any(|x| x % det != 0) {
            return;
        }
        let g = IntegralIsometry::new(num.map(|row| row.map(|x| x / det)));
        if g.mat == IDENTITY || !preserves_form(&g, form) {
            return;
        }
        let Some(ginv) = g.inverse() else { return };
        let consistent = |h: &IntegralIsometry| {
            roots.iter().all(|r| match h.apply(r.vec()) {
                Some(v) => known.contains(&v) || (open && state.could_be_root(&v)),
                None => false,
            })
        };
        if consistent(&g) && consistent(&ginv) {
            found.push(g);
        }
    });
    found.sort();
    found.dedup();
    found
}

fn search_images(
    base: &[usize],
    products: &[Vec<i128>],
    roots: &[Root],
    images: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let t = images.len();
    if t == base.len() {
        visit(images);
        return;
    }
    let b = base[t];
    for c in 0..roots.len() {
        if roots[c].norm() != roots[b].norm() || images.contains(&c) {
            continue;
        }
        if (0..t).all(|s| products[c][images[s]] == products[b][base[s]]) {
            images.push(c);
            search_images(base, products, roots, images, visit);
            images.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// An infinite-order symmetry with two fixed ideal points; rules out both
    /// reflectivity and quasi-reflectivity.
    LoxodromicSymmetry {
        g: IntegralIsometry,
        /// Weight of the last accepted root when the symmetry was found.
        weight_bound: Ratio<i64>,
    },
    /// Too many cusps for a reflective group, and too many cusp pairs at a
    /// mirror away from the singular point for a quasi-reflective one.
    CuspBoundViolation {
        cusps: usize,
        reflective_bound: u64,
        max_cusp_pairs: usize,
        quasi_bound: u64,
    },
    ParabolicRank2 {
        g1: IntegralIsometry,
        g2: IntegralIsometry,
        q: LatticeVector,
    },
    ParabolicRank1 {
        g: IntegralIsometry,
        q: LatticeVector,
    },
    None,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::LoxodromicSymmetry { .. } => "LoxodromicSymmetry",
            Certificate::CuspBoundViolation { .. } => "CuspBoundViolation",
            Certificate::ParabolicRank2 { .. } => "ParabolicRank2",
            Certificate::ParabolicRank1 { .. } => "ParabolicRank1",
            Certificate::None => "None",
        }
    }
}

fn entry_size(g: &IntegralIsometry) -> i128 {
    g.mat.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

/// Certificate for a run that stopped on its budget.
///
/// Checked in this order: a loxodromic symmetry; a pair (or single) of
/// parabolic symmetries with a common fixed point; both cusp bounds violated
/// for the extended group; otherwise [`Certificate::None`].
pub fn certify(state: &RootSystem) -> Result<Certificate> {
    let form = state.form();
    let syms = find_diagram_symmetry(state);
    let typed: Vec<(IntegralIsometry, IsometryType)> =
        syms.iter().map(|g| (*g, classify_unchecked(g))).collect();

    let lox = typed
        .iter()
        .filter(|(_, t)| *t == IsometryType::Loxodromic)
        .map(|(g, _)| *g)
        .min_by_key(|g| (entry_size(g), *g));
    if let Some(g) = lox {
        let weight_bound = state.roots().last().map(|r| r.weight_sq()).unwrap_or_default();
        return Ok(Certificate::LoxodromicSymmetry { g, weight_bound });
    }

    let mut by_point: BTreeMap<LatticeVector, Vec<IntegralIsometry>> = BTreeMap::new();
    for (g, t) in &typed {
        if *t == IsometryType::Parabolic {
            by_point
                .entry(parabolic_fixed_point(g, form)?)
                .or_default()
                .push(*g);
        }
    }
    for (q, gs) in &by_point {
        for (i, g1) in gs.iter().enumerate() {
            for g2 in &gs[i + 1..] {
                if independent_translations(g1, g2, q, form) {
                    return Ok(Certificate::ParabolicRank2 { g1: *g1, g2: *g2, q: *q });
                }
            }
        }
    }
    if let Some((q, gs)) = by_point.iter().next() {
        return Ok(Certificate::ParabolicRank1 { g: gs[0], q: *q });
    }

    let diagram = state.diagram();
    let m = form.m();
    let (h, h2) = classgroup::class_numbers(m)?;
    let reflective_bound = classgroup::cusp_bound(Group::Extended, BoundMode::Reflective, h, h2);
    let quasi_bound = classgroup::cusp_bound(Group::Extended, BoundMode::Quasi, h, h2);
    let reflective_ok = classgroup::cusp_bound_ok(diagram, Group::Extended, BoundMode::Reflective, m)?;
    let quasi_ok = classgroup::cusp_bound_ok(diagram, Group::Extended, BoundMode::Quasi, m);
    if !reflective_ok && quasi_ok == Ok(false) {
        return Ok(Certificate::CuspBoundViolation {
            cusps: diagram.count_cusps(),
            reflective_bound,
            max_cusp_pairs: (0..diagram.len())
                .map(|v| diagram.cusp_pairs_at_vertex(v))
                .max()
                .unwrap_or(0),
            quasi_bound,
        });
    }
    Ok(Certificate::None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::make_form;
    use crate::vinberg::{run, Budget};

    pub const M35_G: Mat4 = [
        [100, 429, -10, -1230],
        [99, 421, -9, -1212],
        [30, 129, -2, -369],
        [30, 128, -3, -368],
    ];

    fn root(form: &FormSpec, v: [i64; 4]) -> Root {
        Root::new(form, LatticeVector(v)).unwrap()
    }

    #[test]
    fn m35_matrix() {
        let f = make_form(35).unwrap();
        let g = IntegralIsometry::new(M35_G);
        assert!(preserves_form(&g, &f));
        assert_eq!(classify(&g, &f), Ok(IsometryType::Loxodromic));
        assert!(cyclotomic_radical(&characteristic_polynomial(&g)).is_none());
    }

    #[test]
    fn identity_and_reflections() {
        let f = make_form(5).unwrap();
        let id = IntegralIsometry::identity();
        assert!(preserves_form(&id, &f));
        assert_eq!(classify(&id, &f), Ok(IsometryType::Identity));
        let r1 = reflection_matrix(&f, &root(&f, [0, 0, -1, 0]));
        assert!(preserves_form(&r1, &f));
        let r5 = reflection_matrix(&f, &root(&f, [-1, 1, 0, 0]));
        assert_eq!(classify(&r5, &f), Ok(IsometryType::Elliptic));
        assert_eq!(r5.pow(2), id);
        assert_eq!(
            classify(&IntegralIsometry::new([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]), &f),
            Err(Error::NotAnIsometry)
        );
    }

    #[test]
    fn parabolic_at_base_point() {
        let f = make_form(5).unwrap();
        let r1 = reflection_matrix(&f, &root(&f, [0, 0, -1, 0]));
        let r2 = reflection_matrix(&f, &root(&f, [1, 0, 1, 0]));
        let g = r1.compose(&r2);
        assert_eq!(classify(&g, &f), Ok(IsometryType::Parabolic));
        assert_eq!(parabolic_fixed_point(&g, &f), Ok(LatticeVector::new(1, 0, 0, 0)));
        let r3 = reflection_matrix(&f, &root(&f, [0, 0, 0, -1]));
        let r4 = reflection_matrix(&f, &root(&f, [5, 0, 0, 1]));
        let h = r3.compose(&r4);
        let q = LatticeVector::new(1, 0, 0, 0);
        assert!(independent_translations(&g, &h, &q, &f));
        assert!(!independent_translations(&g, &g.pow(2), &q, &f));
        let lox = IntegralIsometry::new(M35_G);
        assert_eq!(
            parabolic_fixed_point(&lox, &make_form(35).unwrap()),
            Err(Error::NotParabolic)
        );
    }

    #[test]
    fn m33_symmetries_are_finite() {
        let f = make_form(33).unwrap();
        let s = run(&f, &Budget::default()).unwrap();
        let syms = find_diagram_symmetry(&s);
        assert!(!syms.is_empty());
        for g in &syms {
            assert_eq!(classify(g, &f), Ok(IsometryType::Elliptic));
        }
    }
}
