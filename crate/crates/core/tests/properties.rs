use bianchi_core::classgroup::{self, Bqf};
use bianchi_core::isometry::{self, IntegralIsometry, IsometryType};
use bianchi_core::qform::{is_squarefree, make_form, FormSpec, LatticeVector};
use bianchi_core::vinberg::{self, Budget};
use num_rational::Ratio;
use proptest::prelude::*;

fn squarefree_m(max: i64) -> impl Strategy<Value = i64> {
    (1..=max).prop_filter("square-free, not 3", |&m| is_squarefree(m) && m != 3)
}

fn small_vec() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-1000i64..=1000)
}

fn poly(m: i64, x: [i64; 4], y: [i64; 4]) -> i128 {
    let (x, y) = (x.map(i128::from), y.map(i128::from));
    let m = m as i128;
    let hyp = -(x[0] * y[1] + x[1] * y[0]);
    if m % 4 == 3 {
        hyp + 2 * x[2] * y[2] + x[2] * y[3] + x[3] * y[2] + (m + 1) / 2 * x[3] * y[3]
    } else {
        hyp + 2 * x[2] * y[2] + 2 * m * x[3] * y[3]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norms_are_even(m in squarefree_m(200), x in small_vec()) {
        let f = make_form(m).unwrap();
        prop_assert_eq!(f.norm(&LatticeVector(x)) % 2, 0);
    }

    #[test]
    fn bilinear_matches_polynomial(m in squarefree_m(200), x in small_vec(), y in small_vec()) {
        let f = make_form(m).unwrap();
        let (u, v) = (LatticeVector(x), LatticeVector(y));
        prop_assert_eq!(f.bilinear(&u, &v), poly(m, x, y));
        prop_assert_eq!(f.bilinear(&u, &v), f.bilinear(&v, &u));
    }

    #[test]
    fn bilinear_is_linear(m in squarefree_m(200), x in small_vec(), y in small_vec(),
                          z in small_vec(), a in -50i64..=50) {
        let f = make_form(m).unwrap();
        let comb: [i64; 4] = std::array::from_fn(|i| a * x[i] + y[i]);
        let (xv, yv, zv) = (LatticeVector(x), LatticeVector(y), LatticeVector(z));
        prop_assert_eq!(
            f.bilinear(&LatticeVector(comb), &zv),
            a as i128 * f.bilinear(&xv, &zv) + f.bilinear(&yv, &zv)
        );
    }
}

fn conj_pool(form: &FormSpec, n: usize) -> Vec<IntegralIsometry> {
    let budget = Budget { max_roots: n, max_weight_sq: Ratio::from_integer(10_000) };
    let sys = vinberg::run(form, &budget).unwrap();
    sys.roots().iter().map(|r| isometry::reflection_matrix(form, r)).collect()
}

const M35_G: [[i128; 4]; 4] = [
    [100, 429, -10, -1230],
    [99, 421, -9, -1212],
    [30, 129, -2, -369],
    [30, 128, -3, -368],
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn classification_is_conjugation_invariant(word in prop::collection::vec(0usize..12, 1..6),
                                               which in 0usize..3) {
        let form = make_form(35).unwrap();
        let refl = conj_pool(&form, 12);
        let g = match which {
            0 => IntegralIsometry::new(M35_G),
            // Two reflections through cusp-pair mirrors: parabolic at the base point.
            1 => refl[0].compose(&refl[1]),
            _ => refl[4].clone(),
        };
        let h = word.iter().fold(IntegralIsometry::identity(), |acc, &i| acc.compose(&refl[i]));
        let conj = h.inverse().unwrap().compose(&g).compose(&h);
        let t = isometry::classify(&g, &form).unwrap();
        let expected = [IsometryType::Loxodromic, IsometryType::Parabolic, IsometryType::Elliptic];
        prop_assert_eq!(t, expected[which]);
        prop_assert_eq!(isometry::classify(&conj, &form).unwrap(), t);
        prop_assert_eq!(isometry::classify(&g.inverse().unwrap(), &form).unwrap(), t);
        if t != IsometryType::Elliptic {
            prop_assert_eq!(isometry::classify(&g.pow(2), &form).unwrap(), t);
        }
    }

    #[test]
    fn accepted_roots_are_valid(m in squarefree_m(50)) {
        let form = make_form(m).unwrap();
        let sys = vinberg::run(&form, &Budget { max_roots: 40, ..Budget::default() }).unwrap();
        let roots = sys.roots();
        for (i, r) in roots.iter().enumerate() {
            prop_assert!(r.vec().is_primitive());
            prop_assert!(form.crystallographic_ok(r.vec()).unwrap());
            prop_assert!(r.norm() > 0);
            for s in &roots[..i] {
                prop_assert!(form.bilinear(r.vec(), s.vec()) <= 0);
            }
        }
        prop_assert!(roots.windows(2).all(|w| w[0].weight_sq() <= w[1].weight_sq()));
    }

    #[test]
    fn class_group_laws(m in (1i64..=300).prop_filter("square-free", |&m| is_squarefree(m))) {
        let d = classgroup::field_discriminant(m).unwrap();
        let forms = classgroup::reduced_forms(d).unwrap();
        let id = Bqf::principal(d);
        let c = |f: &Bqf, g: &Bqf| classgroup::compose(f, g).unwrap();
        for f in &forms {
            prop_assert_eq!(c(f, &id), *f);
            prop_assert_eq!(c(f, &f.inverse().reduce()), id);
            for g in &forms {
                let fg = c(f, g);
                prop_assert!(forms.contains(&fg));
                prop_assert_eq!(fg, c(g, f));
                for h in &forms {
                    prop_assert_eq!(c(&fg, h), c(f, &c(g, h)));
                }
            }
        }
        let s = classgroup::group_structure(d).unwrap();
        prop_assert_eq!(s.h as usize, forms.len());
        prop_assert_eq!(s.invariant_factors.iter().product::<u64>(), s.h);
        prop_assert!(s.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0));
    }
}
