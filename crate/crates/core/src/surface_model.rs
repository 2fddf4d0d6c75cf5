//! The elliptic surface `X -> B` as data, its Néron-Severi classes and the
//! Chern-number arithmetic on them.

use std::fmt;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::HomLattice;
use crate::rational::{self, Rational};
use crate::scalar::Scalar;
use crate::tate_curve::{canonicalize, CurveParam, Tolerance};

/// How points of the base curve are represented.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseModel<F> {
    /// `B = P^1`, points are extended complex numbers.
    Rational,
    /// `B = C*/<sigma>`. When `hom_exponents` is present, the `i`-th lattice
    /// generator acts as `b -> b^(e_i)`.
    Tate {
        sigma: CurveParam<F>,
        hom_exponents: Option<Vec<i64>>,
    },
    /// Genus at least 2, no point arithmetic; points are opaque labels.
    Abstract,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseCurve<F> {
    pub genus: u32,
    pub model: BaseModel<F>,
}

impl<F: Scalar> BaseCurve<F> {
    pub fn new(genus: u32, model: BaseModel<F>) -> Result<Self> {
        let ok = match &model {
            BaseModel::Rational => genus == 0,
            BaseModel::Tate { .. } => genus == 1,
            BaseModel::Abstract => genus >= 2,
        };
        if !ok {
            return Err(Error::InvalidSurface(format!("base model does not match genus {genus}")));
        }
        Ok(Self { genus, model })
    }

    pub fn rational() -> Self {
        Self { genus: 0, model: BaseModel::Rational }
    }
}

/// Point of the base curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasePoint<F> {
    Finite(Complex<F>),
    Infinity,
    Label(u32),
}

impl<F: Scalar> fmt::Display for BasePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Finite(z) => write!(f, "{}", z),
            BasePoint::Infinity => write!(f, "inf"),
            BasePoint::Label(l) => write!(f, "#{l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultipleFibre<F> {
    pub point: BasePoint<F>,
    pub multiplicity: u32,
}

/// The surface `X`, its fibre `T = C*/<tau>` and the lattice `NS(X)/Tors`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData<F> {
    base: BaseCurve<F>,
    fibre: CurveParam<F>,
    multiple_fibres: Vec<MultipleFibre<F>>,
    theta_degree: Option<u32>,
    lattice: HomLattice,
}

impl<F: Scalar> SurfaceData<F> {
    pub fn new(
        base: BaseCurve<F>,
        fibre: CurveParam<F>,
        multiple_fibres: Vec<MultipleFibre<F>>,
        theta_degree: Option<u32>,
        lattice: HomLattice,
    ) -> Result<Self> {
        if theta_degree == Some(0) {
            return Err(Error::InvalidSurface("theta degree must be positive".into()));
        }
        if theta_degree.is_some() && !multiple_fibres.is_empty() {
            return Err(Error::InvalidSurface("theta degree is only defined without multiple fibres".into()));
        }
        if base.genus == 0 && lattice.rank() != 0 {
            return Err(Error::InvalidSurface("Hom(J_B, T*) is trivial over a rational base".into()));
        }
        let surface = Self {
            base,
            fibre,
            multiple_fibres,
            theta_degree,
            lattice,
        };
        let tol = Tolerance::default();
        for (i, a) in surface.multiple_fibres.iter().enumerate() {
            if a.multiplicity < 2 {
                return Err(Error::InvalidSurface(format!("multiplicity {} < 2", a.multiplicity)));
            }
            surface.check_point(&a.point)?;
            for b in &surface.multiple_fibres[..i] {
                if surface.same_point(&a.point, &b.point, &tol) {
                    return Err(Error::InvalidSurface(format!("multiple fibre over {} listed twice", a.point)));
                }
            }
        }
        if let BaseModel::Tate {
            sigma,
            hom_exponents: Some(exps),
        } = &surface.base.model
        {
            surface.lattice.check_dim(exps)?;
            for &e in exps {
                // b -> b^e descends to C*/<sigma> only if sigma^e lies in <tau>
                let image = canonicalize(sigma.tau().powi(e as i32), &fibre)?;
                if !image.is_identity(&tol) {
                    return Err(Error::InvalidSurface(format!("b -> b^{e} is not well defined on the base")));
                }
            }
        }
        Ok(surface)
    }

    pub fn base(&self) -> &BaseCurve<F> {
        &self.base
    }

    pub fn genus(&self) -> u32 {
        self.base.genus
    }

    pub fn fibre(&self) -> &CurveParam<F> {
        &self.fibre
    }

    pub fn multiple_fibres(&self) -> &[MultipleFibre<F>] {
        &self.multiple_fibres
    }

    pub fn theta_degree(&self) -> Option<u32> {
        self.theta_degree
    }

    pub fn lattice(&self) -> &HomLattice {
        &self.lattice
    }

    /// Number of torsion generators: the smooth fibre class plus one per multiple fibre.
    pub fn torsion_len(&self) -> usize {
        1 + self.multiple_fibres.len()
    }

    pub fn zero_class(&self) -> NSClass {
        NSClass::zero(self.torsion_len(), self.lattice.rank())
    }

    /// Rejects points that do not belong to the base model.
    pub fn check_point(&self, b: &BasePoint<F>) -> Result<()> {
        let ok = matches!(
            (&self.base.model, b),
            (BaseModel::Rational, BasePoint::Finite(_) | BasePoint::Infinity)
                | (BaseModel::Tate { .. }, BasePoint::Finite(_))
                | (BaseModel::Abstract, BasePoint::Label(_))
        );
        if !ok {
            return Err(Error::InvalidSurface(format!("point {b} does not lie on the base model")));
        }
        if let (BaseModel::Tate { .. }, BasePoint::Finite(z)) = (&self.base.model, b) {
            if z.norm() == F::zero() {
                return Err(Error::ZeroPoint);
            }
        }
        Ok(())
    }

    pub fn same_point(&self, a: &BasePoint<F>, b: &BasePoint<F>, tol: &Tolerance<F>) -> bool {
        match (&self.base.model, a, b) {
            (BaseModel::Tate { sigma, .. }, BasePoint::Finite(x), BasePoint::Finite(y)) => {
                match (canonicalize(*x, sigma), canonicalize(*y, sigma)) {
                    (Ok(p), Ok(q)) => p.distance(&q).map(|d| d <= tol.eps).unwrap_or(false),
                    _ => false,
                }
            }
            (_, BasePoint::Finite(x), BasePoint::Finite(y)) => {
                (x - y).norm() <= tol.eps * (F::one() + x.norm().max(y.norm()))
            }
            (_, BasePoint::Infinity, BasePoint::Infinity) => true,
            (_, BasePoint::Label(x), BasePoint::Label(y)) => x == y,
            _ => false,
        }
    }

    pub fn is_multiple_fibre(&self, b: &BasePoint<F>, tol: &Tolerance<F>) -> bool {
        self.multiple_fibres.iter().any(|m| self.same_point(&m.point, b, tol))
    }

    /// Draws a base point from a fixed distribution on the model.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> BasePoint<F> {
        match &self.base.model {
            BaseModel::Rational => {
                let re = F::lit(rng.gen_range(-2.0..2.0));
                let im = F::lit(rng.gen_range(-2.0..2.0));
                BasePoint::Finite(Complex::new(re, im))
            }
            BaseModel::Tate { sigma, .. } => BasePoint::Finite(sigma.sample(rng).rep()),
            BaseModel::Abstract => BasePoint::Label(rng.gen_range(0..1_000_000)),
        }
    }
}

/// Element of `NS(X)`: torsion coefficients over `{smooth fibre, T_1, ..., T_r}`
/// plus a vector in the lattice `Hom(J_B, T*)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NSClass {
    pub torsion: Vec<i64>,
    pub hom: Vec<i64>,
}

impl NSClass {
    pub fn new(torsion: Vec<i64>, hom: Vec<i64>) -> Self {
        Self { torsion, hom }
    }

    pub fn zero(torsion_len: usize, rank: usize) -> Self {
        Self {
            torsion: vec![0; torsion_len],
            hom: vec![0; rank],
        }
    }

    /// Class of a smooth fibre.
    pub fn fibre(torsion_len: usize, rank: usize) -> Self {
        let mut c = Self::zero(torsion_len, rank);
        c.torsion[0] = 1;
        c
    }

    pub fn is_torsion(&self) -> bool {
        self.hom.iter().all(|&x| x == 0)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Result<Self> {
        same_len(self.torsion.len(), other.torsion.len())?;
        same_len(self.hom.len(), other.hom.len())?;
        Ok(Self {
            torsion: self.torsion.iter().zip(&other.torsion).map(|(a, b)| f(*a, *b)).collect(),
            hom: self.hom.iter().zip(&other.hom).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            torsion: self.torsion.iter().map(|x| k * x).collect(),
            hom: self.hom.iter().map(|x| k * x).collect(),
        }
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a, got: b })
    }
}

/// `c^2 = -2 deg(c_hat)`; torsion contributes nothing.
pub fn self_intersection(c: &NSClass, l: &HomLattice) -> Result<i64> {
    Ok(-2 * l.deg(&c.hom)?)
}

/// Intersection pairing, the polarisation of [`self_intersection`]:
/// `c.c' = -(polar form of deg)(c_hat, c'_hat)`.
///
/// Pairings between torsion generators, including distinct multiple-fibre
/// classes, are taken to be zero.
pub fn pairing(c: &NSClass, d: &NSClass, l: &HomLattice) -> Result<i64> {
    same_len(c.torsion.len(), d.torsion.len())?;
    Ok(-l.polar(&c.hom, &d.hom)?)
}

/// Chern classes `(c1, c2)` of a rank-2 bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernData {
    pub c1: NSClass,
    pub c2: i64,
}

impl ChernData {
    pub fn new(c1: NSClass, c2: i64) -> Self {
        Self { c1, c2 }
    }

    /// `Delta(2, c1, c2) = (c2 - c1^2/4) / 2`.
    pub fn discriminant(&self, l: &HomLattice) -> Result<Rational> {
        let c1sq = self_intersection(&self.c1, l)?;
        Ok((rational::int(self.c2) - Rational::new(c1sq, 4)) / rational::int(2))
    }

    /// `n_E = -ch_2 = c2 - c1^2/2`, an integer because `c1^2` is even.
    pub fn n_e(&self, l: &HomLattice) -> Result<i64> {
        Ok(self.c2 - self_intersection(&self.c1, l)? / 2)
    }

    pub fn ch2(&self, l: &HomLattice) -> Result<i64> {
        Ok(-self.n_e(l)?)
    }
}

pub fn discriminant(cd: &ChernData, l: &HomLattice) -> Result<Rational> {
    cd.discriminant(l)
}

/// `m(2, c1)` together with the class `c1 - 2 mu*` of maximal self-intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M2Class {
    pub value: Rational,
    pub delta_class: NSClass,
    pub shift: Vec<i64>,
}

pub fn m2(c1: &NSClass, l: &HomLattice) -> Result<M2Class> {
    let m = l.m2(&c1.hom)?;
    Ok(M2Class {
        value: m.value,
        delta_class: NSClass::new(c1.torsion.clone(), m.witness),
        shift: m.shift,
    })
}

/// `K_X = pi^* K_B + sum (m_i - 1) T_i`.
pub fn canonical_class<F: Scalar>(x: &SurfaceData<F>) -> NSClass {
    let mut torsion = vec![2 * x.genus() as i64 - 2];
    torsion.extend(x.multiple_fibres().iter().map(|m| m.multiplicity as i64 - 1));
    NSClass::new(torsion, vec![0; x.lattice().rank()])
}
