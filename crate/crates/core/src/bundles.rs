//! Rank-2 bundles given by presentations: extensions, pushforwards from a
//! spectral bisection and elementary modifications along fibres.

use crate::error::{Error, Result};
use crate::jacobian_surface::{Bisection, DoubleCover, JacobianSurface, SectionOfJ};
use crate::lattice::HomLattice;
use crate::rational::{self, Rational};
use crate::scalar::Scalar;
use crate::surface_model::{self, BasePoint, ChernData, NSClass, SurfaceData};
use crate::tate_curve::{h1_indicator, TatePoint};

/// Line bundle on `X`, determined up to `pi^*` twists by its section of `J(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineBundleOnX<F> {
    pub section: SectionOfJ<F>,
    /// Degree of the divisor class pulled back from `B`.
    pub base_degree: i64,
    /// Twists by the reduced multiple fibres `T_i`.
    pub fibre_twists: Vec<i64>,
}

impl<F: Scalar> LineBundleOnX<F> {
    pub fn new(section: SectionOfJ<F>, base_degree: i64, fibre_twists: Vec<i64>) -> Self {
        Self {
            section,
            base_degree,
            fibre_twists,
        }
    }

    pub fn trivial(x: &SurfaceData<F>) -> Self {
        Self::from_section(SectionOfJ::zero(x.fibre(), x.lattice().rank()), x)
    }

    pub fn from_section(section: SectionOfJ<F>, x: &SurfaceData<F>) -> Self {
        Self::new(section, 0, vec![0; x.multiple_fibres().len()])
    }

    pub fn check(&self, x: &SurfaceData<F>) -> Result<()> {
        x.lattice().check_dim(&self.section.hom)?;
        if self.section.constant.curve() != x.fibre() {
            return Err(Error::CurveMismatch);
        }
        if self.fibre_twists.len() != x.multiple_fibres().len() {
            return Err(Error::DimensionMismatch {
                expected: x.multiple_fibres().len(),
                got: self.fibre_twists.len(),
            });
        }
        Ok(())
    }

    pub fn chern_class(&self) -> NSClass {
        let mut torsion = vec![self.base_degree];
        torsion.extend(&self.fibre_twists);
        NSClass::new(torsion, self.section.hom.clone())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.fibre_twists.len() != other.fibre_twists.len() {
            return Err(Error::DimensionMismatch {
                expected: self.fibre_twists.len(),
                got: other.fibre_twists.len(),
            });
        }
        Ok(Self::new(
            self.section.tensor(&other.section)?,
            self.base_degree + other.base_degree,
            self.fibre_twists.iter().zip(&other.fibre_twists).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn dual(&self) -> Self {
        Self::new(
            self.section.inverse(),
            -self.base_degree,
            self.fibre_twists.iter().map(|x| -x).collect(),
        )
    }

    /// Twist by `O_X(k T)`.
    pub fn twist_by_fibres(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.base_degree += k;
        out
    }
}

/// Fibres over which the extension class restricts nontrivially.
#[derive(Clone, Debug, PartialEq)]
pub enum NonsplitLocus<F> {
    Everywhere,
    At(Vec<BasePoint<F>>),
}

impl<F: Scalar> NonsplitLocus<F> {
    pub fn none() -> Self {
        NonsplitLocus::At(Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Presentation<F> {
    /// `0 -> D -> E -> delta (x) D^-1 (x) I_Z -> 0`.
    Extension {
        d: LineBundleOnX<F>,
        delta: LineBundleOnX<F>,
        z: Vec<(BasePoint<F>, u32)>,
        nonsplit_at: NonsplitLocus<F>,
    },
    /// Bundle with irreducible bisection `C` and determinant `delta`;
    /// `z_length` is the declared length of the correction sheaf on the normalisation.
    SpectralPush {
        bisection: Bisection<F>,
        delta: LineBundleOnX<F>,
        z_length: u32,
    },
    ElemMod {
        parent: Box<RankTwoBundle<F>>,
        fibre: BasePoint<F>,
        steps: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankTwoBundle<F> {
    presentation: Presentation<F>,
    chern: ChernData,
}

/// `Delta = 1/4 deg(2 D_hat - delta_hat) + 1/2 l(Z)`, i.e. a quarter of
/// `Sigma_D . i_delta Sigma_D` plus half the length.
pub fn extension_discriminant(l: &HomLattice, d: &[i64], delta: &[i64], z_length: u64) -> Result<Rational> {
    l.check_dim(d)?;
    l.check_dim(delta)?;
    let diff: Vec<i64> = d.iter().zip(delta).map(|(a, b)| 2 * a - b).collect();
    Ok(Rational::new(l.deg(&diff)?, 4) + Rational::new(z_length as i64, 2))
}

/// Chern classes of an extension by Whitney-sum arithmetic, cross-checked against
/// [`extension_discriminant`].
pub fn chern_of_extension<F: Scalar>(
    x: &SurfaceData<F>,
    d: &LineBundleOnX<F>,
    delta: &LineBundleOnX<F>,
    z_length: u64,
) -> Result<ChernData> {
    d.check(x)?;
    delta.check(x)?;
    let l = x.lattice();
    let cd = d.chern_class();
    let cdelta = delta.chern_class();
    let quotient = cdelta.sub(&cd)?;
    let c2 = surface_model::pairing(&cd, &quotient, l)? + z_length as i64;
    let out = ChernData::new(cdelta, c2);
    let whitney = out.discriminant(l)?;
    let identity = extension_discriminant(l, &d.section.hom, &delta.section.hom, z_length)?;
    if whitney != identity {
        return Err(Error::Inconsistent(format!(
            "discriminant {} disagrees with {}",
            rational::to_string(&whitney),
            rational::to_string(&identity)
        )));
    }
    Ok(out)
}

/// One elementary modification along `j_* lambda` with `deg lambda = deg_lambda`:
/// `c1 -> c1 - T`, `c2 -> c2 + deg lambda`.
pub fn modification_step(cd: &ChernData, deg_lambda: i64) -> ChernData {
    let mut out = cd.clone();
    out.c1.torsion[0] -= 1;
    out.c2 += deg_lambda;
    out
}

/// Formal inverse of [`modification_step`].
pub fn inverse_modification_step(cd: &ChernData, deg_lambda: i64) -> ChernData {
    let mut out = cd.clone();
    out.c1.torsion[0] += 1;
    out.c2 -= deg_lambda;
    out
}

/// Chern data after each of `k` degree-one steps, starting with `cd` itself.
pub fn modification_ledger(cd: &ChernData, k: u32) -> Vec<ChernData> {
    let mut out = vec![cd.clone()];
    for _ in 0..k {
        let next = modification_step(out.last().expect("nonempty"), 1);
        out.push(next);
    }
    out
}

impl<F: Scalar> RankTwoBundle<F> {
    pub fn extension(
        jac: &JacobianSurface<'_, F>,
        d: LineBundleOnX<F>,
        delta: LineBundleOnX<F>,
        z: Vec<(BasePoint<F>, u32)>,
        nonsplit_at: NonsplitLocus<F>,
    ) -> Result<Self> {
        let x = jac.surface();
        for (b, _) in &z {
            x.check_point(b)?;
        }
        if let NonsplitLocus::At(points) = &nonsplit_at {
            for b in points {
                x.check_point(b)?;
            }
        }
        let z: Vec<_> = z.into_iter().filter(|(_, k)| *k > 0).collect();
        let length = z.iter().map(|(_, k)| *k as u64).sum();
        let chern = chern_of_extension(x, &d, &delta, length)?;
        Ok(Self {
            presentation: Presentation::Extension { d, delta, z, nonsplit_at },
            chern,
        })
    }

    /// Split bundle `D (+) delta (x) D^-1`.
    pub fn split(jac: &JacobianSurface<'_, F>, d: LineBundleOnX<F>, delta: LineBundleOnX<F>) -> Result<Self> {
        Self::extension(jac, d, delta, Vec::new(), NonsplitLocus::none())
    }

    pub fn spectral_push(
        jac: &JacobianSurface<'_, F>,
        bisection: Bisection<F>,
        delta: LineBundleOnX<F>,
        z_length: u32,
    ) -> Result<Self> {
        let x = jac.surface();
        delta.check(x)?;
        if !bisection.is_irreducible() {
            return Err(Error::Inconsistent("spectral pushforward needs an irreducible bisection".into()));
        }
        let a2 = jac.graph_self_intersection(&bisection, &delta.section)?;
        // Delta = A^2/4 + l/4 and c2 = 2 Delta + c1^2/4
        let c1 = delta.chern_class();
        let c1sq = surface_model::self_intersection(&c1, x.lattice())?;
        let c2 = a2 / rational::int(2) + Rational::new(z_length as i64, 2) + Rational::new(c1sq, 4);
        if !c2.is_integer() {
            return Err(Error::Inconsistent(format!(
                "bisection and determinant give non-integral c2 = {}",
                rational::to_string(&c2)
            )));
        }
        Ok(Self {
            presentation: Presentation::SpectralPush {
                bisection,
                delta,
                z_length,
            },
            chern: ChernData::new(c1, c2.to_integer()),
        })
    }

    /// `k` successive degree-one modifications of `parent` along the fibre over `b`.
    pub fn elementary_modification(jac: &JacobianSurface<'_, F>, parent: &Self, b: BasePoint<F>, k: i64) -> Result<Self> {
        if k < 0 {
            return Err(Error::InvalidSteps(k));
        }
        if k == 0 {
            return Ok(parent.clone());
        }
        let x = jac.surface();
        x.check_point(&b)?;
        if x.is_multiple_fibre(&b, jac.tol()) {
            return Err(Error::MultipleFibre(b.to_string()));
        }
        if let Some(cover) = parent.irreducible_cover() {
            if jac.is_branch_point(cover, &b)? {
                return Err(Error::BranchFibre(b.to_string()));
            }
        }
        let chern = modification_ledger(&parent.chern, k as u32).pop().expect("nonempty");
        Ok(Self {
            presentation: Presentation::ElemMod {
                parent: Box::new(parent.clone()),
                fibre: b,
                steps: k as u32,
            },
            chern,
        })
    }

    pub fn presentation(&self) -> &Presentation<F> {
        &self.presentation
    }

    pub fn chern(&self) -> &ChernData {
        &self.chern
    }

    /// Section of `J(X)` of the determinant (up to fibre twists).
    pub fn determinant_section(&self) -> &SectionOfJ<F> {
        match &self.presentation {
            Presentation::Extension { delta, .. } | Presentation::SpectralPush { delta, .. } => &delta.section,
            Presentation::ElemMod { parent, .. } => parent.determinant_section(),
        }
    }

    fn irreducible_cover(&self) -> Option<&DoubleCover<F>> {
        match &self.presentation {
            Presentation::SpectralPush {
                bisection: Bisection::Irreducible(c),
                ..
            } => Some(c),
            Presentation::ElemMod { parent, .. } => parent.irreducible_cover(),
            _ => None,
        }
    }
}

/// Isomorphism type of `E` restricted to a smooth fibre.
#[derive(Clone, Debug, PartialEq)]
pub enum FibreRestriction<F> {
    Split(TatePoint<F>, TatePoint<F>),
    NonSplit(TatePoint<F>),
    Unstable(u32),
}

pub fn restrict_to_fibre<F: Scalar>(
    jac: &JacobianSurface<'_, F>,
    e: &RankTwoBundle<F>,
    b: &BasePoint<F>,
) -> Result<FibreRestriction<F>> {
    let x = jac.surface();
    x.check_point(b)?;
    if x.is_multiple_fibre(b, jac.tol()) {
        return Err(Error::MultipleFibre(b.to_string()));
    }
    match &e.presentation {
        Presentation::Extension { d, delta, z, nonsplit_at } => {
            if let Some((_, k)) = z.iter().find(|(p, _)| x.same_point(p, b, jac.tol())) {
                return Ok(FibreRestriction::Unstable(*k));
            }
            let v1 = jac.evaluate(&d.section, b)?;
            let v2 = jac.evaluate(&delta.section, b)?.div(&v1)?;
            if v1.distance(&v2)? > jac.tol().eps {
                return Ok(FibreRestriction::Split(v1, v2));
            }
            let nonsplit = match nonsplit_at {
                NonsplitLocus::Everywhere => true,
                NonsplitLocus::At(points) => points.iter().any(|p| x.same_point(p, b, jac.tol())),
            };
            Ok(if nonsplit {
                FibreRestriction::NonSplit(v1)
            } else {
                FibreRestriction::Split(v1, v2)
            })
        }
        Presentation::SpectralPush { bisection, .. } => {
            let values = jac.fibre_values(bisection, b)?;
            Ok(match values.as_slice() {
                [v] => FibreRestriction::NonSplit(*v),
                [v1, v2] => FibreRestriction::Split(*v1, *v2),
                _ => return Err(Error::Inconsistent(format!("{} cover values over {b}", values.len()))),
            })
        }
        Presentation::ElemMod { parent, fibre, .. } => {
            if x.same_point(fibre, b, jac.tol()) {
                Ok(FibreRestriction::Unstable(1))
            } else {
                restrict_to_fibre(jac, parent, b)
            }
        }
    }
}

/// Support of `R^1 pi_*` on `J(X)`: a bisection plus jump fibres.
///
/// The bisection records over `b` the classes `alpha` for which `E_b (x) L_alpha^-1`
/// has a nonzero `h^1`, i.e. the restriction values themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCover<F> {
    pub bisection: Bisection<F>,
    pub jumps: Vec<(BasePoint<F>, u32)>,
    /// Multiple fibres, where the cover is not evaluated.
    pub untracked: Vec<BasePoint<F>>,
}

impl<F: Scalar> SpectralCover<F> {
    pub fn jump_total(&self) -> u64 {
        self.jumps.iter().map(|(_, k)| *k as u64).sum()
    }
}

fn add_jump<F: Scalar>(x: &SurfaceData<F>, jac: &JacobianSurface<'_, F>, jumps: &mut Vec<(BasePoint<F>, u32)>, b: BasePoint<F>, k: u32) {
    if let Some(slot) = jumps.iter_mut().find(|(p, _)| x.same_point(p, &b, jac.tol())) {
        slot.1 += k;
    } else {
        jumps.push((b, k));
    }
}

pub fn spectral_cover<F: Scalar>(jac: &JacobianSurface<'_, F>, e: &RankTwoBundle<F>) -> Result<SpectralCover<F>> {
    let x = jac.surface();
    let untracked = x.multiple_fibres().iter().map(|m| m.point).collect();
    match &e.presentation {
        Presentation::Extension { d, delta, z, .. } => {
            let quotient = delta.section.tensor(&d.section.inverse())?;
            let mut jumps = Vec::new();
            for (b, k) in z {
                add_jump(x, jac, &mut jumps, *b, *k);
            }
            Ok(SpectralCover {
                bisection: Bisection::Reducible(d.section.clone(), quotient),
                jumps,
                untracked,
            })
        }
        Presentation::SpectralPush { bisection, .. } => Ok(SpectralCover {
            bisection: bisection.clone(),
            jumps: Vec::new(),
            untracked,
        }),
        Presentation::ElemMod { parent, fibre, steps } => {
            let mut cover = spectral_cover(jac, parent)?;
            add_jump(x, jac, &mut cover.jumps, *fibre, *steps);
            Ok(cover)
        }
    }
}

/// `C . B_0 + sum of jump multiplicities`, to be compared with `n_E`.
pub fn cover_accounting<F: Scalar>(jac: &JacobianSurface<'_, F>, cover: &SpectralCover<F>) -> Result<i64> {
    Ok(jac.intersection_with_zero_section(&cover.bisection)? + cover.jump_total() as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filtrability {
    Filtrable,
    NonFiltrable,
}

pub fn filtrability<F: Scalar>(cover: &SpectralCover<F>) -> Filtrability {
    if cover.bisection.is_irreducible() {
        Filtrability::NonFiltrable
    } else {
        Filtrability::Filtrable
    }
}

/// Outcome of checking a cover against the fibrewise `h^1` test.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub samples: usize,
    /// Largest distance from a predicted cover value to a class detected by `h^1`.
    pub max_residual: f64,
    /// Random classes off the cover that the `h^1` test nevertheless detected.
    pub false_positives: usize,
    pub worst_fibre: Option<String>,
}

/// Samples `n` smooth fibres away from jumps, and compares the cover values with the
/// classes `alpha` for which `h^1(E_b (x) L_alpha^-1) != 0`.
pub fn verify_cover<F: Scalar>(
    jac: &JacobianSurface<'_, F>,
    e: &RankTwoBundle<F>,
    cover: &SpectralCover<F>,
    n: usize,
) -> Result<VerificationReport> {
    let x = jac.surface();
    let tol = jac.tol();
    let mut rng = jac.rng();
    let mut report = VerificationReport {
        samples: 0,
        max_residual: 0.0,
        false_positives: 0,
        worst_fibre: None,
    };
    let mut attempts = 0;
    while report.samples < n {
        attempts += 1;
        if attempts > 20 * n + 100 {
            break;
        }
        let b = x.sample_point(&mut rng);
        if x.is_multiple_fibre(&b, tol) || cover.jumps.iter().any(|(p, _)| x.same_point(p, &b, tol)) {
            continue;
        }
        let restriction = match restrict_to_fibre(jac, e, &b)? {
            FibreRestriction::Split(a, c) => vec![a, c],
            FibreRestriction::NonSplit(a) => vec![a],
            FibreRestriction::Unstable(_) => continue,
        };
        let predicted = jac.fibre_values(&cover.bisection, &b)?;
        for alpha in &predicted {
            let mut best = F::infinity();
            for lambda in &restriction {
                let twisted = lambda.div(alpha)?;
                if h1_indicator(&twisted, tol) == 1 {
                    best = best.min(lambda.distance(alpha)?);
                }
            }
            let residual = if best.is_finite() { best } else { restriction.iter().map(|l| l.distance(alpha).unwrap_or(F::infinity())).fold(F::infinity(), F::min) };
            let residual = residual.to_f64().unwrap_or(f64::INFINITY);
            if residual > report.max_residual || !residual.is_finite() {
                report.max_residual = residual;
                report.worst_fibre = Some(b.to_string());
            }
        }
        for _ in 0..4 {
            let alpha = x.fibre().sample(&mut rng);
            let on_cover = predicted.iter().any(|p| p.distance(&alpha).map(|d| d <= tol.eps.sqrt()).unwrap_or(false));
            let detected = restriction
                .iter()
                .any(|l| l.div(&alpha).map(|t| h1_indicator(&t, tol) == 1).unwrap_or(false));
            if detected && !on_cover {
                report.false_positives += 1;
            }
        }
        report.samples += 1;
    }
    Ok(report)
}
