//! Invariant suite run by `ellbundle check` on a single surface.

use ellbundle::jacobian_surface::{genus_and_branching, JacobianSurface, SectionOfJ};
use ellbundle::lattice::cube;
use ellbundle::surface_model::{pairing, self_intersection, BaseModel};
use ellbundle::tate_curve::{quotient_x, XValue};
use ellbundle::{ChernData, NSClass};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn check(name: &'static str, cases: usize, failure: Option<String>) -> Check {
    Check {
        name,
        passed: failure.is_none(),
        cases,
        detail: failure,
    }
}

fn auto_radius(jac: &JacobianSurface<'_, f64>) -> i64 {
    let biggest = jac
        .lattice()
        .polar_matrix()
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or(0);
    (4 + biggest).min(25)
}

pub fn run_checks(jac: &JacobianSurface<'_, f64>, enum_radius: Option<i64>) -> Vec<Check> {
    vec![
        hurwitz(jac),
        involution(jac),
        bilinearity(jac),
        quotient_symmetry(jac),
        m2_enumeration(jac, enum_radius.unwrap_or_else(|| auto_radius(jac))),
    ]
}

fn classes(jac: &JacobianSurface<'_, f64>, radius: i64) -> Vec<NSClass> {
    let x = jac.surface();
    let t = x.torsion_len();
    cube(x.lattice().rank(), radius)
        .enumerate()
        .map(|(i, hom)| {
            let mut torsion = vec![0; t];
            torsion[i % t] = (i as i64 % 5) - 2;
            NSClass::new(torsion, hom)
        })
        .collect()
}

fn hurwitz(jac: &JacobianSurface<'_, f64>) -> Check {
    let x = jac.surface();
    let g = x.genus() as i64;
    let mut cases = 0;
    for c1 in classes(jac, 2) {
        for c2 in -6..=6 {
            let cd = ChernData::new(c1.clone(), c2);
            let Ok((genus, branching)) = genus_and_branching(&cd, x.genus(), x.lattice()) else {
                continue;
            };
            cases += 1;
            if 2 * genus - 2 != 2 * (2 * g - 2) + branching {
                return check("hurwitz", cases, Some(format!("fails for c1 = {c1:?}, c2 = {c2}")));
            }
        }
    }
    check("hurwitz", cases, None)
}

fn involution(jac: &JacobianSurface<'_, f64>) -> Check {
    let x = jac.surface();
    let evaluable = matches!(x.base().model, BaseModel::Tate { hom_exponents: Some(_), .. });
    let rank = x.lattice().rank();
    let mut rng = jac.rng();
    let mut worst = 0.0f64;
    let cases = 100;
    for i in 0..cases {
        let mut hom = vec![0; rank];
        if evaluable && rank > 0 {
            hom[i % rank] = (i as i64 % 7) - 3;
        }
        let delta = SectionOfJ::new(x.fibre().sample(&mut rng), hom);
        let b = x.sample_point(&mut rng);
        let lambda = x.fibre().sample(&mut rng);
        let twice = jac
            .involution_apply(&b, &lambda, &delta)
            .and_then(|(b1, l1)| jac.involution_apply(&b1, &l1, &delta))
            .and_then(|(_, l2)| l2.distance(&lambda));
        match twice {
            Ok(d) => worst = worst.max(d),
            Err(e) => return check("involution", i, Some(e.to_string())),
        }
    }
    let limit = 10.0 * jac.tol().eps;
    check(
        "involution",
        cases,
        (worst > limit).then(|| format!("i(i(lambda)) differs from lambda by {worst:e}")),
    )
}

fn bilinearity(jac: &JacobianSurface<'_, f64>) -> Check {
    let l = jac.lattice();
    let cs = classes(jac, 2);
    let mut cases = 0;
    for (i, a) in cs.iter().enumerate() {
        let b = &cs[(7 * i + 3) % cs.len()];
        let c = &cs[(11 * i + 5) % cs.len()];
        cases += 1;
        let ok = (|| -> ellbundle::Result<bool> {
            let lin = pairing(&a.add(b)?, c, l)? == pairing(a, c, l)? + pairing(b, c, l)?;
            let sym = pairing(a, b, l)? == pairing(b, a, l)?;
            let sq = self_intersection(a, l)? == pairing(a, a, l)? && self_intersection(a, l)? == -2 * l.deg(&a.hom)?;
            Ok(lin && sym && sq)
        })();
        match ok {
            Ok(true) => {}
            Ok(false) => return check("bilinearity", cases, Some(format!("fails at {a:?}, {b:?}, {c:?}"))),
            Err(e) => return check("bilinearity", cases, Some(e.to_string())),
        }
    }
    check("bilinearity", cases, None)
}

fn quotient_symmetry(jac: &JacobianSurface<'_, f64>) -> Check {
    let t = jac.surface().fibre();
    let tol = jac.tol();
    let mut rng = jac.rng();
    let cases = 100;
    for i in 0..cases {
        let u = t.sample(&mut rng);
        let pairs = [u.inv(), u.mul(&t.point(t.q()).expect("nonzero")).expect("same curve")];
        let xu = quotient_x(&u, tol);
        for v in pairs {
            let same = match (xu.clone(), quotient_x(&v, tol)) {
                (Ok(XValue::Finite(a)), Ok(XValue::Finite(b))) => (a - b).norm() <= tol.eps * (1.0 + a.norm()),
                (Ok(XValue::Infinity), Ok(XValue::Infinity)) => true,
                (Err(e), _) | (_, Err(e)) => return check("quotient_symmetry", i, Some(e.to_string())),
                _ => false,
            };
            if !same {
                return check("quotient_symmetry", i + 1, Some(format!("x(u) is not symmetric at u = {}", u.rep())));
            }
        }
    }
    check("quotient_symmetry", cases, None)
}

fn m2_enumeration(jac: &JacobianSurface<'_, f64>, radius: i64) -> Check {
    let l = jac.lattice();
    let mut cases = 0;
    for c in cube(l.rank(), 3) {
        cases += 1;
        match (l.m2(&c), l.m2_in_cube(&c, radius)) {
            (Ok(a), Ok(b)) if a.value == b.value => {}
            (Ok(a), Ok(b)) => {
                return check(
                    "m2_enumeration",
                    cases,
                    Some(format!("c = {c:?}: {} vs cube {}", a.value, b.value)),
                )
            }
            (Err(e), _) | (_, Err(e)) => return check("m2_enumeration", cases, Some(e.to_string())),
        }
    }
    check("m2_enumeration", cases, None)
}
