//! Existence of rank-2 bundles with prescribed `(c1, c2)` and replayable constructions.

use log::info;

use crate::bundles::{LineBundleOnX, NonsplitLocus, RankTwoBundle};
use crate::error::{Error, Result};
use crate::jacobian_surface::{ruled_invariant_bounds, Bisection, DoubleCover, JacobianSurface, SectionOfJ};
use crate::lattice::HomLattice;
use crate::rational::{self, Rational};
use crate::scalar::Scalar;
use crate::surface_model::{self, BasePoint, ChernData, NSClass, SurfaceData};
use crate::tate_curve::TatePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrableTag {
    Filtrable,
    NonFiltrable,
}

/// Starting bundle `E_0` of a construction.
#[derive(Clone, Debug, PartialEq)]
pub enum RecipeBase<F> {
    /// Extension `0 -> D -> E_0 -> delta' (x) D^-1 -> 0`, regular over the modified fibre.
    Reducible { d: LineBundleOnX<F>, delta: LineBundleOnX<F> },
    /// Pushforward from an irreducible bisection.
    SpectralPush { bisection: Bisection<F>, delta: LineBundleOnX<F> },
}

/// `E_0` followed by `steps` elementary modifications along the fibre over `fibre`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recipe<F> {
    pub base: RecipeBase<F>,
    pub delta0: Rational,
    pub fibre: BasePoint<F>,
    pub steps: u32,
    pub expected: ChernData,
    /// Chern data of `E_0` and after each step.
    pub transcript: Vec<ChernData>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<F> {
    Exists {
        delta: Rational,
        m: Rational,
        tag: FiltrableTag,
        /// Absent when the construction needs an irreducible bisection that was not supplied.
        recipe: Option<Box<Recipe<F>>>,
    },
    NotExists {
        delta: Rational,
        reason: String,
    },
    /// Existence depends on the unknown subbundle degree `d` of `V_delta`.
    Unknown {
        delta: Rational,
        m: Rational,
        interval: (Rational, Rational),
        d_range: (i64, i64),
    },
}

impl<F> Verdict<F> {
    pub fn delta(&self) -> Rational {
        match self {
            Verdict::Exists { delta, .. } | Verdict::NotExists { delta, .. } | Verdict::Unknown { delta, .. } => *delta,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Exists { .. } => "exists",
            Verdict::NotExists { .. } => "not_exists",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Exists { .. } => 0,
            Verdict::NotExists { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }
}

/// Position of `Delta` relative to `[m - d/2, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapKind {
    BelowAll,
    NonFiltrableOnly,
    FiltrableRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gap {
    pub kind: GapKind,
    pub lower: Rational,
    pub upper: Rational,
}

fn check_class<F: Scalar>(x: &SurfaceData<F>, c1: &NSClass) -> Result<()> {
    x.lattice().check_dim(&c1.hom)?;
    if c1.torsion.len() != x.torsion_len() {
        return Err(Error::DimensionMismatch {
            expected: x.torsion_len(),
            got: c1.torsion.len(),
        });
    }
    Ok(())
}

pub fn filtrable_gap(cd: &ChernData, l: &HomLattice, g: u32, d: Option<i64>) -> Result<Gap> {
    let delta = cd.discriminant(l)?;
    let m = surface_model::m2(&cd.c1, l)?.value;
    let lower = match d {
        Some(d) => m - Rational::new(d, 2),
        None if g <= 1 => rational::int(0).min(m),
        None => return Err(Error::MissingDegree(g)),
    };
    let kind = if delta >= m {
        GapKind::FiltrableRange
    } else if delta >= lower {
        GapKind::NonFiltrableOnly
    } else {
        GapKind::BelowAll
    };
    Ok(Gap { kind, lower, upper: m })
}

/// Decides whether a holomorphic rank-2 bundle with Chern data `cd` exists.
///
/// `base` is an optional bisection used when the construction cannot start
/// from an extension; without it an existing non-filtrable case carries no recipe.
pub fn existence_verdict<F: Scalar>(
    jac: &JacobianSurface<'_, F>,
    cd: &ChernData,
    d_override: Option<i64>,
    base: Option<&Bisection<F>>,
) -> Result<Verdict<F>> {
    let x = jac.surface();
    check_class(x, &cd.c1)?;
    let l = x.lattice();
    let g = x.genus();
    let delta = cd.discriminant(l)?;
    let m = surface_model::m2(&cd.c1, l)?.value;
    let bounds = ruled_invariant_bounds(g, m)?;
    if let Some(d) = d_override {
        if d < bounds.d.0 || d > bounds.d.1 {
            return Err(Error::DegreeOutOfRange {
                d,
                lo: bounds.d.0,
                hi: bounds.d.1,
            });
        }
    }
    if delta < rational::int(0) {
        return Ok(Verdict::NotExists {
            delta,
            reason: format!("Delta = {} is negative", rational::to_string(&delta)),
        });
    }
    let lowest = m - Rational::new(bounds.d.1, 2);
    let highest = m - Rational::new(bounds.d.0, 2);
    let tag = if delta >= m {
        FiltrableTag::Filtrable
    } else {
        FiltrableTag::NonFiltrable
    };
    let exists = |tag| -> Result<Verdict<F>> {
        let recipe = match construction_recipe(jac, cd, base) {
            Ok(r) => Some(Box::new(r)),
            Err(Error::NoBaseBisection(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Verdict::Exists { delta, m, tag, recipe })
    };
    if g <= 1 {
        if delta < lowest {
            info!(
                "g = {g}: Delta = {} is below the ruled-surface threshold {} but Delta >= 0 suffices here",
                rational::to_string(&delta),
                rational::to_string(&lowest)
            );
        }
        return exists(tag);
    }
    if delta >= m {
        return exists(FiltrableTag::Filtrable);
    }
    if let Some(d) = d_override {
        let threshold = m - Rational::new(d, 2);
        return if delta >= threshold {
            exists(FiltrableTag::NonFiltrable)
        } else {
            Ok(Verdict::NotExists {
                delta,
                reason: format!("Delta is below m - d/2 = {}", rational::to_string(&threshold)),
            })
        };
    }
    if delta < lowest {
        Ok(Verdict::NotExists {
            delta,
            reason: format!("Delta is below every admissible threshold (>= {})", rational::to_string(&lowest)),
        })
    } else if delta >= highest {
        exists(FiltrableTag::NonFiltrable)
    } else {
        Ok(Verdict::Unknown {
            delta,
            m,
            interval: (lowest, highest),
            d_range: bounds.d,
        })
    }
}

/// First seeded sample that is a smooth fibre avoiding the branch locus of `cover`.
fn choose_fibre<F: Scalar>(jac: &JacobianSurface<'_, F>, cover: Option<&DoubleCover<F>>) -> Result<BasePoint<F>> {
    let x = jac.surface();
    let mut rng = jac.rng();
    for _ in 0..1000 {
        let b = x.sample_point(&mut rng);
        if x.is_multiple_fibre(&b, jac.tol()) {
            continue;
        }
        if let Some(c) = cover {
            if jac.is_branch_point(c, &b)? {
                continue;
            }
        }
        return Ok(b);
    }
    Err(Error::Inconsistent("no admissible fibre found".into()))
}

fn determinant_bundle<F: Scalar>(c1: &NSClass, constant: TatePoint<F>, k: i64) -> LineBundleOnX<F> {
    LineBundleOnX::new(SectionOfJ::new(constant, c1.hom.clone()), c1.torsion[0] + k, c1.torsion[1..].to_vec())
}

fn steps_between(delta: Rational, delta0: Rational) -> Result<u32> {
    let k = (delta - delta0) * rational::int(2);
    if !k.is_integer() || k < rational::int(0) {
        return Err(Error::Inconsistent(format!(
            "2 (Delta - Delta_0) = {} is not a nonnegative integer",
            rational::to_string(&k)
        )));
    }
    Ok(k.to_integer() as u32)
}

/// Builds `E_0` (an extension when `Delta >= m`, otherwise the pushforward from
/// the supplied bisection) and the number of modifications reaching `cd`.
pub fn construction_recipe<F: Scalar>(
    jac: &JacobianSurface<'_, F>,
    cd: &ChernData,
    base: Option<&Bisection<F>>,
) -> Result<Recipe<F>> {
    let x = jac.surface();
    check_class(x, &cd.c1)?;
    let l = x.lattice();
    let delta = cd.discriminant(l)?;
    if delta < rational::int(0) {
        return Err(Error::NotExists(format!("Delta = {}", rational::to_string(&delta))));
    }
    let m2 = surface_model::m2(&cd.c1, l)?;
    let (recipe_base, delta0, cover) = match base {
        Some(Bisection::Irreducible(cover)) => {
            let constant = match cover {
                DoubleCover::Rational(rc) => rc.center.mul(&rc.center)?,
                DoubleCover::Declared { .. } => x.fibre().identity(),
            };
            // c2 of the pushforward is fixed by the cover, so find k from it
            let probe = determinant_bundle(&cd.c1, constant, 0);
            let e0 = RankTwoBundle::spectral_push(jac, Bisection::Irreducible(cover.clone()), probe, 0)?;
            let delta0 = e0.chern().discriminant(l)?;
            let k = steps_between(delta, delta0)?;
            let det = determinant_bundle(&cd.c1, constant, k as i64);
            (
                RecipeBase::SpectralPush {
                    bisection: Bisection::Irreducible(cover.clone()),
                    delta: det,
                },
                delta0,
                Some(cover),
            )
        }
        Some(Bisection::Reducible(s1, s2)) => {
            let det_section = s1.tensor(s2)?;
            if det_section.hom != cd.c1.hom {
                return Err(Error::Inconsistent("bisection does not match c1".into()));
            }
            let delta0 = crate::bundles::extension_discriminant(l, &s1.hom, &det_section.hom, 0)?;
            let k = steps_between(delta, delta0)?;
            let det = determinant_bundle(&cd.c1, det_section.constant, k as i64);
            (
                RecipeBase::Reducible {
                    d: LineBundleOnX::from_section(s1.clone(), x),
                    delta: det,
                },
                delta0,
                None,
            )
        }
        None => {
            if delta < m2.value {
                return Err(Error::NoBaseBisection(format!(
                    "Delta = {} < m = {} needs an irreducible bisection",
                    rational::to_string(&delta),
                    rational::to_string(&m2.value)
                )));
            }
            let k = steps_between(delta, m2.value)?;
            let d = LineBundleOnX::from_section(SectionOfJ::new(x.fibre().identity(), m2.shift.clone()), x);
            let det = determinant_bundle(&cd.c1, x.fibre().identity(), k as i64);
            (RecipeBase::Reducible { d, delta: det }, m2.value, None)
        }
    };
    let fibre = choose_fibre(jac, cover)?;
    let steps = steps_between(delta, delta0)?;
    let start = base_bundle(jac, &recipe_base, &fibre)?;
    let recipe = Recipe {
        base: recipe_base,
        delta0,
        fibre,
        steps,
        expected: cd.clone(),
        transcript: crate::bundles::modification_ledger(start.chern(), steps),
    };
    recipe.replay(jac)?;
    Ok(recipe)
}

fn base_bundle<F: Scalar>(jac: &JacobianSurface<'_, F>, base: &RecipeBase<F>, fibre: &BasePoint<F>) -> Result<RankTwoBundle<F>> {
    match base {
        RecipeBase::Reducible { d, delta } => RankTwoBundle::extension(
            jac,
            d.clone(),
            delta.clone(),
            Vec::new(),
            NonsplitLocus::At(vec![*fibre]),
        ),
        RecipeBase::SpectralPush { bisection, delta } => RankTwoBundle::spectral_push(jac, bisection.clone(), delta.clone(), 0),
    }
}

impl<F: Scalar> Recipe<F> {
    /// Rebuilds the bundle with the bundle constructors and checks every snapshot.
    pub fn replay(&self, jac: &JacobianSurface<'_, F>) -> Result<RankTwoBundle<F>> {
        let mut e = base_bundle(jac, &self.base, &self.fibre)?;
        let l = jac.lattice();
        if e.chern().discriminant(l)? != self.delta0 {
            return Err(Error::ReplayMismatch(format!(
                "base bundle has Delta = {}, recipe says {}",
                rational::to_string(&e.chern().discriminant(l)?),
                rational::to_string(&self.delta0)
            )));
        }
        if self.transcript.len() != self.steps as usize + 1 {
            return Err(Error::ReplayMismatch("transcript length".into()));
        }
        for (i, snapshot) in self.transcript.iter().enumerate() {
            if i > 0 {
                e = RankTwoBundle::elementary_modification(jac, &e, self.fibre, 1)?;
            }
            if e.chern() != snapshot {
                return Err(Error::ReplayMismatch(format!("snapshot {i} differs")));
            }
        }
        if e.chern() != &self.expected {
            return Err(Error::ReplayMismatch("final Chern data differs from the query".into()));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian_surface::{RationalCover, RationalMap};
    use crate::rational::{int, rat};
    use crate::surface_model::{BaseCurve, BaseModel};
    use crate::tate_curve::{CurveParam, Tolerance};
    use num_complex::Complex;

    fn p1() -> SurfaceData<f64> {
        SurfaceData::new(BaseCurve::rational(), CurveParam::real(3.0).unwrap(), vec![], Some(1), HomLattice::trivial()).unwrap()
    }

    fn elliptic() -> SurfaceData<f64> {
        let t = CurveParam::real(3.0).unwrap();
        SurfaceData::new(
            BaseCurve::new(1, BaseModel::Tate { sigma: t, hom_exponents: Some(vec![1]) }).unwrap(),
            t,
            vec![],
            Some(1),
            HomLattice::rank_one(1).unwrap(),
        )
        .unwrap()
    }

    fn genus(g: u32, l: HomLattice) -> SurfaceData<f64> {
        SurfaceData::new(BaseCurve::new(g, BaseModel::Abstract).unwrap(), CurveParam::real(3.0).unwrap(), vec![], Some(1), l).unwrap()
    }

    #[test]
    fn verdict_examples_genus_zero() {
        let x = p1();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        let v = existence_verdict(&jac, &ChernData::new(NSClass::zero(1, 0), -1), None, None).unwrap();
        assert!(matches!(v, Verdict::NotExists { .. }));
        assert_eq!(v.delta(), rat(-1, 2));
        let v = existence_verdict(&jac, &ChernData::new(NSClass::zero(1, 0), 0), None, None).unwrap();
        let Verdict::Exists { tag, recipe: Some(r), .. } = v else { panic!() };
        assert_eq!(tag, FiltrableTag::Filtrable);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn recipe_steps_are_twice_the_discriminant() {
        let x = p1();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        for (c2, delta, k) in [(2, int(1), 2), (4, int(2), 4)] {
            let cd = ChernData::new(NSClass::zero(1, 0), c2);
            let r = construction_recipe(&jac, &cd, None).unwrap();
            assert_eq!(r.delta0, int(0));
            assert_eq!(r.steps, k);
            assert_eq!(r.transcript.len(), k as usize + 1);
            assert_eq!(r.transcript[0].c1.torsion, vec![k as i64]);
            let e = r.replay(&jac).unwrap();
            assert_eq!(e.chern().discriminant(x.lattice()).unwrap(), delta);
        }
    }

    #[test]
    fn recipe_on_elliptic_base() {
        let x = elliptic();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        let cd = ChernData::new(NSClass::new(vec![0], vec![1]), 0);
        assert_eq!(cd.discriminant(x.lattice()).unwrap(), rat(1, 4));
        let r = construction_recipe(&jac, &cd, None).unwrap();
        assert_eq!(r.steps, 0);
        assert_eq!(r.delta0, rat(1, 4));
        let RecipeBase::Reducible { d, delta } = &r.base else { panic!() };
        let inv = jac.involution_on_section(&d.section, &delta.section).unwrap();
        assert_eq!(jac.section_pairing(&d.section, &inv).unwrap(), 1);
    }

    #[test]
    fn unknown_interval_genus_three() {
        // deg = 4 n^2 and c_hat = 1, so m = 1 and Delta = (c2 + 2) / 2
        let x = genus(3, HomLattice::rank_one(4).unwrap());
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        let c1 = NSClass::new(vec![0], vec![1]);
        let cd = ChernData::new(c1.clone(), -3);
        assert_eq!(surface_model::m2(&c1, x.lattice()).unwrap().value, int(1));
        assert!(cd.discriminant(x.lattice()).unwrap() < int(0));
        let cd = ChernData::new(c1, -2);
        assert_eq!(cd.discriminant(x.lattice()).unwrap(), int(0));
        let v = existence_verdict(&jac, &cd, None, None).unwrap();
        assert_eq!(
            v,
            Verdict::Unknown {
                delta: int(0),
                m: int(1),
                interval: (int(0), rat(1, 2)),
                d_range: (1, 2),
            }
        );
        assert_eq!(v.exit_code(), 2);
        let v = existence_verdict(&jac, &cd, Some(2), None).unwrap();
        assert!(matches!(v, Verdict::Exists { tag: FiltrableTag::NonFiltrable, recipe: None, .. }));
        let v = existence_verdict(&jac, &cd, Some(1), None).unwrap();
        assert!(matches!(v, Verdict::NotExists { .. }));
        assert!(matches!(existence_verdict(&jac, &cd, Some(3), None), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn gap_examples() {
        let l = HomLattice::rank_one(4).unwrap();
        let c1 = NSClass::new(vec![0], vec![1]);
        // Delta = (c2 + 2) / 2
        let gap = filtrable_gap(&ChernData::new(c1.clone(), 0), &l, 3, Some(1)).unwrap();
        assert_eq!(gap.kind, GapKind::FiltrableRange);
        let gap = filtrable_gap(&ChernData::new(c1.clone(), -1), &l, 3, Some(1)).unwrap();
        assert_eq!((gap.kind, gap.lower, gap.upper), (GapKind::NonFiltrableOnly, rat(1, 2), int(1)));
        let gap = filtrable_gap(&ChernData::new(c1.clone(), -2), &l, 3, Some(1)).unwrap();
        assert_eq!(gap.kind, GapKind::BelowAll);
        assert_eq!(filtrable_gap(&ChernData::new(c1, -2), &l, 3, None), Err(Error::MissingDegree(3)));
    }

    #[test]
    fn monotone_in_c2() {
        let x = genus(2, HomLattice::rank_one(2).unwrap());
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        for c in 0..3 {
            let mut seen = false;
            for c2 in -8..8 {
                let v = existence_verdict(&jac, &ChernData::new(NSClass::new(vec![0], vec![c]), c2), None, None).unwrap();
                let e = matches!(v, Verdict::Exists { .. });
                assert!(!seen || e);
                seen |= e;
            }
        }
    }

    #[test]
    fn recipe_from_irreducible_cover() {
        let x = p1();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        let cover = Bisection::Irreducible(DoubleCover::Rational(RationalCover {
            map: RationalMap::new(vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], vec![Complex::new(1.0, 0.0)]).unwrap(),
            center: x.fibre().identity(),
            declared_branch_points: vec![],
        }));
        let cd = ChernData::new(NSClass::zero(1, 0), 3);
        let r = construction_recipe(&jac, &cd, Some(&cover)).unwrap();
        assert_eq!(r.delta0, rat(1, 2));
        assert_eq!(r.steps, 2);
        assert!(!jac.is_branch_point(match &cover { Bisection::Irreducible(c) => c, _ => unreachable!() }, &r.fibre).unwrap());
        assert!(construction_recipe(&jac, &ChernData::new(NSClass::zero(1, 0), 0), Some(&cover)).is_err());
    }

    #[test]
    fn replay_detects_tampering() {
        let x = p1();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 1);
        let mut r = construction_recipe(&jac, &ChernData::new(NSClass::zero(1, 0), 1), None).unwrap();
        r.expected.c2 = 5;
        assert!(matches!(r.replay(&jac), Err(Error::ReplayMismatch(_))));
    }
}
