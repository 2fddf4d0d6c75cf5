use ellbundle::bundles::{inverse_modification_step, modification_ledger};
use ellbundle::existence::{existence_verdict, filtrable_gap, GapKind, Verdict};
use ellbundle::jacobian_surface::{ruled_invariant_bounds, JacobianSurface};
use ellbundle::rational::{int, rat};
use ellbundle::surface_model::{self, BaseCurve, BaseModel, SurfaceData};
use ellbundle::tate_curve::{CurveParam, Tolerance};
use ellbundle::{ChernData, HomLattice, NSClass};
use proptest::prelude::*;

fn lattice2() -> impl Strategy<Value = HomLattice> {
    (1i64..=5, -6i64..=6, 1i64..=5).prop_filter_map("positive definite", |(a, b, c)| {
        HomLattice::from_polar(vec![vec![2 * a, b], vec![b, 2 * c]]).ok()
    })
}

fn class(rank: usize) -> impl Strategy<Value = NSClass> {
    (prop::collection::vec(-5i64..=5, 1), prop::collection::vec(-8i64..=8, rank))
        .prop_map(|(t, h)| NSClass::new(t, h))
}

fn genus_surface(g: u32, l: HomLattice) -> SurfaceData<f64> {
    let model = if g == 1 {
        BaseModel::Tate {
            sigma: CurveParam::real(3.0).unwrap(),
            hom_exponents: None,
        }
    } else {
        BaseModel::Abstract
    };
    SurfaceData::new(BaseCurve::new(g, model).unwrap(), CurveParam::real(3.0).unwrap(), vec![], None, l).unwrap()
}

proptest! {
    #[test]
    fn pairing_is_bilinear(l in lattice2(), a in class(2), b in class(2), c in class(2), s in -5i64..=5) {
        let p = |x: &NSClass, y: &NSClass| surface_model::pairing(x, y, &l).unwrap();
        let sum = a.scale(s).add(&b).unwrap();
        prop_assert_eq!(p(&sum, &c), s * p(&a, &c) + p(&b, &c));
        prop_assert_eq!(p(&a, &b), p(&b, &a));
        prop_assert_eq!(surface_model::self_intersection(&a, &l).unwrap(), p(&a, &a));
    }

    #[test]
    fn m2_is_invariant_under_even_shifts(l in lattice2(), c in prop::collection::vec(-10i64..=10, 2), mu in prop::collection::vec(-4i64..=4, 2)) {
        let shifted: Vec<i64> = c.iter().zip(&mu).map(|(a, m)| a + 2 * m).collect();
        let m = l.m2(&c).unwrap();
        prop_assert_eq!(m.value, l.m2(&shifted).unwrap().value);
        prop_assert!(m.value >= int(0));
        prop_assert!(m.value <= rat(l.deg(&c).unwrap(), 4));
    }

    #[test]
    fn ledger_inverts(t in -5i64..=5, h in prop::collection::vec(-5i64..=5, 2), c2 in -20i64..=20, k in 0u32..=8, l in lattice2()) {
        let start = ChernData::new(NSClass::new(vec![t], h), c2);
        let ledger = modification_ledger(&start, k);
        prop_assert_eq!(ledger.len(), k as usize + 1);
        let mut back = ledger.last().unwrap().clone();
        for _ in 0..k {
            back = inverse_modification_step(&back, 1);
        }
        prop_assert_eq!(&back, &start);
        for (i, cd) in ledger.iter().enumerate() {
            let gained = cd.discriminant(&l).unwrap() - start.discriminant(&l).unwrap();
            prop_assert_eq!(gained, rat(i as i64, 2));
        }
    }

    #[test]
    fn verdicts_are_monotone_in_c2(h in -3i64..=3, c2 in -12i64..=12, g in 2u32..=4) {
        let x = genus_surface(g, HomLattice::rank_one(3).unwrap());
        let jac = JacobianSurface::new(&x, Tolerance::default(), 0);
        let c1 = NSClass::new(vec![0], vec![h]);
        let here = existence_verdict(&jac, &ChernData::new(c1.clone(), c2), None, None).unwrap();
        let above = existence_verdict(&jac, &ChernData::new(c1, c2 + 1), None, None).unwrap();
        let rank = |v: &Verdict<f64>| match v {
            Verdict::NotExists { .. } => 0,
            Verdict::Unknown { .. } => 1,
            Verdict::Exists { .. } => 2,
        };
        prop_assert!(rank(&above) >= rank(&here));
    }

    #[test]
    fn unknown_interval_is_bounded(h in -3i64..=3, c2 in -12i64..=12, g in 2u32..=5, a in 1i64..=6) {
        let x = genus_surface(g, HomLattice::rank_one(a).unwrap());
        let jac = JacobianSurface::new(&x, Tolerance::default(), 0);
        let cd = ChernData::new(NSClass::new(vec![0], vec![h]), c2);
        if let Verdict::Unknown { delta, m, interval, d_range } = existence_verdict(&jac, &cd, None, None).unwrap() {
            prop_assert!(interval.0 >= int(0));
            prop_assert!(interval.1 <= m.min(rat(g as i64, 4)));
            prop_assert!(interval.0 <= delta && delta < interval.1);
            let b = ruled_invariant_bounds(g, m).unwrap();
            prop_assert_eq!(d_range, b.d);
            let widest = filtrable_gap(&cd, x.lattice(), g, Some(d_range.1)).unwrap();
            prop_assert_eq!(widest.kind, GapKind::NonFiltrableOnly);
            prop_assert_eq!(widest.lower, interval.0);
            let narrowest = filtrable_gap(&cd, x.lattice(), g, Some(d_range.0)).unwrap();
            prop_assert_eq!(narrowest.kind, GapKind::BelowAll);
            prop_assert_eq!(narrowest.lower, interval.1);
        }
    }
}
