//! Property tests for the exact kernel.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use vir_core::classify::{canonical, classify, generate, scramble, Verdict};
use vir_core::lattice::{span_rank, Lattice, UnitHom};
use vir_core::modules::{act, axiom_residual, ModuleFamily};
use vir_core::scalar::{Field, FieldSpec, Scalar};
use vir_core::svir::{sbracket, super_jacobi_residual, SuperAlgebra, SuperElement, Variant};
use vir_core::vir::{apply_automorphism, bracket, jacobi_residual, AlgebraElement, Automorphism};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sqrt2() -> Field {
    Field::sqrt2()
}

fn cubic() -> Field {
    Field::new(FieldSpec::extension_from_ints(&[-2, 0, 0, 1])).unwrap()
}

fn rank2() -> Lattice {
    let f = sqrt2();
    Lattice::new(&f, vec![f.one(), f.gen()]).unwrap()
}

fn rat() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| q(n, d))
}

fn scalar_in(f: Field) -> impl Strategy<Value = Scalar> {
    let deg = f.degree();
    prop::collection::vec(rat(), deg).prop_map(move |c| f.from_coords(c))
}

fn point(lat: Lattice) -> impl Strategy<Value = Scalar> {
    let r = lat.rank();
    prop::collection::vec(-4i64..=4, r)
        .prop_map(move |c| lat.element(&c.into_iter().map(BigInt::from).collect::<Vec<_>>()))
}

fn element(lat: Lattice, centerless: bool) -> impl Strategy<Value = AlgebraElement> {
    let f = lat.field().clone();
    (
        prop::collection::vec((point(lat.clone()), scalar_in(f.clone())), 0..4),
        scalar_in(f),
    )
        .prop_map(move |(terms, c)| {
            let mut x = AlgebraElement::zero(&lat, centerless);
            for (mu, a) in terms {
                x.add_l(&mu, a).unwrap();
            }
            if !centerless {
                x.add_c(c);
            }
            x
        })
}

fn lattices() -> impl Strategy<Value = Lattice> {
    prop_oneof![Just(Lattice::integers(&Field::rational())), Just(rank2())]
}

fn elements3(centerless: bool) -> impl Strategy<Value = (AlgebraElement, AlgebraElement, AlgebraElement)> {
    lattices().prop_flat_map(move |lat| {
        (
            element(lat.clone(), centerless),
            element(lat.clone(), centerless),
            element(lat, centerless),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn field_axioms(x in scalar_in(sqrt2()), y in scalar_in(sqrt2()), z in scalar_in(sqrt2())) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn cubic_field_inverses(x in scalar_in(cubic()), y in scalar_in(cubic())) {
        prop_assert_eq!(&x * &y, &y * &x);
        if !x.is_zero() {
            let y_over_x = y.checked_div(&x).unwrap();
            prop_assert_eq!(&y_over_x * &x, y);
        }
    }

    #[test]
    fn scalar_format_round_trip(x in scalar_in(sqrt2())) {
        let f = sqrt2();
        let text = x.to_string();
        let back = f.parse(&text).unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn element_format_round_trip(x in element(rank2(), false)) {
        let lat = rank2();
        let text = x.to_string();
        let back = AlgebraElement::parse(&lat, false, &text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back, x);
    }

    #[test]
    fn lattice_coordinates_are_additive(x in point(rank2()), y in point(rank2())) {
        let lat = rank2();
        let (cx, cy) = (lat.coords(&x).unwrap(), lat.coords(&y).unwrap());
        let cs = lat.coords(&(&x + &y)).unwrap();
        let sum: Vec<BigInt> = cx.iter().zip(cy.iter()).map(|(a, b)| a + b).collect();
        prop_assert_eq!(cs.to_vec(), sum);
    }

    #[test]
    fn reduction_stays_in_coset(x in scalar_in(sqrt2())) {
        let lat = rank2();
        let r = lat.reduce(&x);
        prop_assert!(lat.contains(&(&x - &r)));
        prop_assert_eq!(lat.reduce(&r), r);
    }

    #[test]
    fn span_rank_ignores_order_and_sign(
        xs in prop::collection::vec(scalar_in(sqrt2()), 0..5),
        flips in prop::collection::vec(any::<bool>(), 5),
    ) {
        let f = sqrt2();
        let base = span_rank(&f, &xs);
        let mut ys: Vec<Scalar> = xs.iter().zip(&flips).map(|(x, &n)| if n { -x } else { x.clone() }).collect();
        ys.reverse();
        prop_assert_eq!(span_rank(&f, &ys), base);
    }

    #[test]
    fn unit_hom_is_multiplicative(x in point(rank2()), y in point(rank2()), u in 1i64..5, v in 1i64..5) {
        let lat = rank2();
        let f = lat.field().clone();
        let chi = UnitHom::new(&lat, vec![f.from_int(u), f.from_ratio(1, v)]).unwrap();
        prop_assert_eq!(chi.eval(&(&x + &y)).unwrap(), &chi.eval(&x).unwrap() * &chi.eval(&y).unwrap());
    }

    #[test]
    fn antisymmetry((x, y, _) in elements3(false)) {
        let xy = bracket(&x, &y).unwrap();
        let yx = bracket(&y, &x).unwrap();
        prop_assert!(xy.add(&yx).unwrap().is_zero());
    }

    #[test]
    fn jacobi_centered((x, y, z) in elements3(false)) {
        prop_assert!(jacobi_residual(&x, &y, &z).unwrap().is_zero());
    }

    #[test]
    fn jacobi_centerless((x, y, z) in elements3(true)) {
        prop_assert!(jacobi_residual(&x, &y, &z).unwrap().is_zero());
    }

    #[test]
    fn bracket_respects_grading(mu in point(rank2()), nu in point(rank2())) {
        let lat = rank2();
        let x = AlgebraElement::l(&lat, &mu, false).unwrap();
        let y = AlgebraElement::l(&lat, &nu, false).unwrap();
        let z = bracket(&x, &y).unwrap();
        let sum = &mu + &nu;
        prop_assert!(z.support().iter().all(|d| *d == sum));
        if !sum.is_zero() {
            prop_assert!(z.ccoeff().is_zero());
        }
    }

    #[test]
    fn characters_preserve_brackets((x, y, _) in elements3(false), u in 1i64..4, v in 1i64..4) {
        let lat = x.lattice().clone();
        let f = lat.field().clone();
        let values = [f.from_int(u), f.from_ratio(-1, v)][..lat.rank()].to_vec();
        let phi = Automorphism::Character(UnitHom::new(&lat, values).unwrap());
        let lhs = apply_automorphism(&phi, &bracket(&x, &y).unwrap()).unwrap();
        let rhs = bracket(&apply_automorphism(&phi, &x).unwrap(), &apply_automorphism(&phi, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn shifted_scaling_preserves_brackets(x in element(rank2(), false), y in element(rank2(), false), k in 0usize..3) {
        let f = sqrt2();
        let a = [f.parse("1 + t").unwrap(), f.parse("-1 + t").unwrap(), f.from_int(-1)][k].clone();
        let phi = Automorphism::ScaleShifted(a);
        let lhs = apply_automorphism(&phi, &bracket(&x, &y).unwrap()).unwrap();
        let rhs = bracket(&apply_automorphism(&phi, &x).unwrap(), &apply_automorphism(&phi, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn scaling_preserves_centerless_brackets(x in element(rank2(), true), y in element(rank2(), true)) {
        let f = sqrt2();
        let phi = Automorphism::Scale(f.parse("1 + t").unwrap());
        let lhs = apply_automorphism(&phi, &bracket(&x, &y).unwrap()).unwrap();
        let rhs = bracket(&apply_automorphism(&phi, &x).unwrap(), &apply_automorphism(&phi, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn automorphism_composition_law(x in element(rank2(), true), u in 1i64..4, v in 1i64..4) {
        let lat = rank2();
        let f = lat.field().clone();
        let a = f.parse("1 + t").unwrap();
        let chi = UnitHom::new(&lat, vec![f.from_int(u), f.from_ratio(1, v)]).unwrap();
        let chi_a = chi.precompose_scale(&a).unwrap();
        let scale = Automorphism::Scale(a);
        let left = apply_automorphism(&Automorphism::Character(chi), &apply_automorphism(&scale, &x).unwrap()).unwrap();
        let right = apply_automorphism(&scale, &apply_automorphism(&Automorphism::Character(chi_a), &x).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn scalers_are_closed_under_products(i in -3i64..=3, j in -3i64..=3, s in any::<bool>()) {
        let lat = rank2();
        let f = lat.field().clone();
        let u = f.parse("1 + t").unwrap();
        let a = u.pow(&BigInt::from(i)).unwrap();
        let b = u.pow(&BigInt::from(j)).unwrap();
        let b = if s { -b } else { b };
        prop_assert!(lat.is_scaler(&a).unwrap() && lat.is_scaler(&b).unwrap());
        prop_assert!(lat.is_scaler(&(&a * &b)).unwrap());
    }

    #[test]
    fn module_axioms_hold(
        a in scalar_in(sqrt2()), b in scalar_in(sqrt2()),
        x in element(rank2(), false), y in element(rank2(), false), nu in point(rank2()),
    ) {
        let lat = rank2();
        let fam = ModuleFamily::aab(&lat, a, b);
        let v = fam.basis_vector(&nu).unwrap();
        prop_assert!(axiom_residual(&fam, &x, &y, &v).unwrap().is_zero());
        prop_assert!(act(&fam, &AlgebraElement::c(&lat, false), &v).unwrap().is_zero());
    }

    #[test]
    fn classification_is_gauge_invariant(
        a in scalar_in(Field::rational()), b in scalar_in(Field::rational()),
        g in prop::collection::vec((1i64..9, 1i64..9), 7),
    ) {
        let f = Field::rational();
        let lat = Lattice::integers(&f);
        let fam = ModuleFamily::aab(&lat, a, b);
        let shift = if lat.contains(&fam.offset()) { fam.offset() } else { f.zero() };
        let window: Vec<Scalar> = lat.window(3).iter().map(|w| w - &shift).collect();
        let table = generate(&fam, &window, &[f.from_int(1), f.from_int(2)]);
        let gauge = table.basis().into_iter().zip(g).map(|(k, (n, d))| (k, f.from_ratio(n, d))).collect();
        let plain = classify(&table).unwrap();
        let scrambled = classify(&scramble(&table, &gauge)).unwrap();
        prop_assert_eq!(&plain.verdict, &Verdict::Plain(canonical(&fam)));
        prop_assert_eq!(plain.verdict, scrambled.verdict);
    }

    #[test]
    fn super_brackets_are_graded_antisymmetric(
        mu in -3i64..=3, nu in -3i64..=3, r in -3i64..=3, ns in any::<bool>(),
    ) {
        let f = Field::rational();
        let lat = Lattice::integers(&f);
        let variant = if ns { Variant::Ns } else { Variant::Tilde };
        let alg = SuperAlgebra::new(&lat, &f.from_ratio(1, 2), variant).unwrap();
        let half = |k: i64| f.from_ratio(2 * k + 1, 2);
        let l = SuperElement::l(&alg, &f.from_int(mu)).unwrap();
        let g1 = SuperElement::g(&alg, &half(nu)).unwrap();
        let g2 = SuperElement::g(&alg, &half(r)).unwrap();
        let lg = sbracket(&l, &g1).unwrap();
        let gl = sbracket(&g1, &l).unwrap();
        prop_assert!(lg.add(&gl).unwrap().is_zero());
        prop_assert_eq!(sbracket(&g1, &g2).unwrap(), sbracket(&g2, &g1).unwrap());
        prop_assert!(super_jacobi_residual(&g1, &g2, &l).unwrap().is_zero());
    }
}
