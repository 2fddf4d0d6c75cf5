//! Divisors on the Jacobian surface `J(X) = B x T*`: sections, bisections,
//! the determinant involution and the ruled-surface quotient.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::HomLattice;
use crate::poly;
use crate::rational::{self, Rational};
use crate::scalar::Scalar;
use crate::surface_model::{self, BaseModel, BasePoint, ChernData, NSClass, SurfaceData};
use crate::tate_curve::{canonicalize, quotient_preimages, quotient_x, two_torsion, CurveParam, TatePoint, Tolerance, XValue};

/// Section `b -> lambda * phi(b)` of `J(X) -> B`, with `lambda` a constant point of `T*`
/// and `phi` the homomorphism `J_B -> T*` given by a lattice vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionOfJ<F> {
    pub constant: TatePoint<F>,
    pub hom: Vec<i64>,
}

impl<F: Scalar> SectionOfJ<F> {
    pub fn new(constant: TatePoint<F>, hom: Vec<i64>) -> Self {
        Self { constant, hom }
    }

    /// The zero section `B_0`.
    pub fn zero(curve: &CurveParam<F>, rank: usize) -> Self {
        Self::new(curve.identity(), vec![0; rank])
    }

    pub fn constant(point: TatePoint<F>, rank: usize) -> Self {
        Self::new(point, vec![0; rank])
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.constant.inv(), self.hom.iter().map(|x| -x).collect())
    }

    /// Fibrewise product, i.e. the section of the tensor product of line bundles.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.hom.len() != other.hom.len() {
            return Err(Error::DimensionMismatch {
                expected: self.hom.len(),
                got: other.hom.len(),
            });
        }
        Ok(Self::new(
            self.constant.mul(&other.constant)?,
            self.hom.iter().zip(&other.hom).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn same_as(&self, other: &Self, tol: &Tolerance<F>) -> bool {
        self.hom == other.hom && self.constant.distance(&other.constant).map(|d| d <= tol.eps).unwrap_or(false)
    }
}

/// Rational map `P^1 -> P^1`, `b -> num(b)/den(b)`, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap<F> {
    pub num: Vec<Complex<F>>,
    pub den: Vec<Complex<F>>,
}

impl<F: Scalar> RationalMap<F> {
    pub fn new(num: Vec<Complex<F>>, den: Vec<Complex<F>>) -> Result<Self> {
        let eps = F::epsilon();
        if poly::degree(&den, eps).is_none() {
            return Err(Error::Inconsistent("denominator of the rational map is zero".into()));
        }
        if poly::degree(&num, eps).is_none() {
            return Err(Error::Inconsistent("numerator of the rational map is zero".into()));
        }
        Ok(Self { num, den })
    }

    fn degs(&self) -> (usize, usize) {
        let eps = F::epsilon();
        (
            poly::degree(&self.num, eps).unwrap_or(0),
            poly::degree(&self.den, eps).unwrap_or(0),
        )
    }

    /// Degree of the map, assuming numerator and denominator are coprime.
    pub fn degree(&self) -> usize {
        let (n, d) = self.degs();
        n.max(d)
    }

    pub fn eval(&self, b: &BasePoint<F>) -> Result<XValue<F>> {
        match b {
            BasePoint::Finite(z) => {
                let d = poly::eval(&self.den, *z);
                let n = poly::eval(&self.num, *z);
                if d.norm() <= F::epsilon() * (F::one() + n.norm()) {
                    Ok(XValue::Infinity)
                } else {
                    Ok(XValue::Finite(n / d))
                }
            }
            BasePoint::Infinity => {
                let (dn, dd) = self.degs();
                Ok(match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => XValue::Infinity,
                    std::cmp::Ordering::Less => XValue::Finite(Complex::new(F::zero(), F::zero())),
                    std::cmp::Ordering::Equal => XValue::Finite(self.num[dn] / self.den[dd]),
                })
            }
            BasePoint::Label(_) => Err(Error::NotEvaluable("rational map at an abstract point".into())),
        }
    }
}

/// Irreducible bisection over `P^1` presented through the quotient coordinate:
/// the fibre over `b` is `{center * u : x(u) = map(b)}`. It is invariant under
/// the involution of any determinant whose fibre value is `center^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCover<F> {
    pub map: RationalMap<F>,
    pub center: TatePoint<F>,
    pub declared_branch_points: Vec<BasePoint<F>>,
}

/// Double-cover data of an irreducible bisection.
#[derive(Clone, Debug, PartialEq)]
pub enum DoubleCover<F> {
    Rational(RationalCover<F>),
    /// Abstract bisection known only through its branch data.
    Declared {
        branch_order: u64,
        branch_points: Vec<BasePoint<F>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bisection<F> {
    Reducible(SectionOfJ<F>, SectionOfJ<F>),
    Irreducible(DoubleCover<F>),
}

impl<F: Scalar> Bisection<F> {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Bisection::Irreducible(_))
    }
}

/// Integer ranges for the maximal subbundle degree `d` of `V_delta` and the invariant `e = 2d - 4m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuledBounds {
    pub d: (i64, i64),
    pub e: (i64, i64),
}

/// The ruled surface `F_delta = J(X)/i_delta = P(V_delta)` attached to `c1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RuledSurfaceData<F> {
    pub delta: SectionOfJ<F>,
    pub delta_class: NSClass,
    pub m: Rational,
    pub bounds: RuledBounds,
    /// `deg L = 4m`, the number of points of `B_0 . Sigma_delta`.
    pub v_delta_degree: i64,
}

/// Bounds `max{0, 2m - g/2} <= d <= 2m` and `e = 2d - 4m`.
pub fn ruled_invariant_bounds(g: u32, m: Rational) -> Result<RuledBounds> {
    if m < rational::int(0) {
        return Err(Error::Negative(format!("m = {}", rational::to_string(&m))));
    }
    let four_m = m * rational::int(4);
    if !four_m.is_integer() {
        return Err(Error::Inconsistent(format!("m = {} is not a quarter-integer", rational::to_string(&m))));
    }
    let four_m = four_m.to_integer();
    let two_m = m * rational::int(2);
    let lo = rational::ceil(&(two_m - Rational::new(g as i64, 2))).max(0);
    let hi = rational::floor(&two_m);
    if lo > hi {
        return Err(Error::EmptyDegreeRange {
            g,
            m: rational::to_string(&m),
        });
    }
    Ok(RuledBounds {
        d: (lo, hi),
        e: (2 * lo - four_m, 2 * hi - four_m),
    })
}

/// Genus `4 Delta + 2g - 1` of a smooth irreducible spectral curve and the
/// branching order `4 c2 - c1^2` of its projection to `B`.
pub fn genus_and_branching(cd: &ChernData, g: u32, l: &HomLattice) -> Result<(i64, i64)> {
    let four_delta = cd.discriminant(l)? * rational::int(4);
    if !four_delta.is_integer() {
        return Err(Error::NonIntegralGenus(rational::to_string(&four_delta)));
    }
    let genus = four_delta.to_integer() + 2 * g as i64 - 1;
    let branch = 4 * cd.c2 - surface_model::self_intersection(&cd.c1, l)?;
    Ok((genus, branch))
}

/// Evaluation context: a surface together with a tolerance and a sampling seed.
#[derive(Clone, Debug)]
pub struct JacobianSurface<'a, F> {
    surface: &'a SurfaceData<F>,
    tol: Tolerance<F>,
    seed: u64,
    samples: usize,
}

impl<'a, F: Scalar> JacobianSurface<'a, F> {
    pub fn new(surface: &'a SurfaceData<F>, tol: Tolerance<F>, seed: u64) -> Self {
        Self {
            surface,
            tol,
            seed,
            samples: 50,
        }
    }

    /// Number of fibres sampled by invariance checks.
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn surface(&self) -> &'a SurfaceData<F> {
        self.surface
    }

    pub fn tol(&self) -> &Tolerance<F> {
        &self.tol
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice(&self) -> &'a HomLattice {
        self.surface.lattice()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn fibre(&self) -> &CurveParam<F> {
        self.surface.fibre()
    }

    pub fn zero_section(&self) -> SectionOfJ<F> {
        SectionOfJ::zero(self.fibre(), self.lattice().rank())
    }

    pub fn check_section(&self, s: &SectionOfJ<F>) -> Result<()> {
        self.lattice().check_dim(&s.hom)?;
        if s.constant.curve() != self.fibre() {
            return Err(Error::CurveMismatch);
        }
        Ok(())
    }

    /// Value of the section over `b`.
    pub fn evaluate(&self, s: &SectionOfJ<F>, b: &BasePoint<F>) -> Result<TatePoint<F>> {
        self.check_section(s)?;
        self.surface.check_point(b)?;
        if s.hom.iter().all(|&x| x == 0) {
            return Ok(s.constant);
        }
        match &self.surface.base().model {
            BaseModel::Tate {
                sigma,
                hom_exponents: Some(exps),
            } => {
                let BasePoint::Finite(z) = b else {
                    return Err(Error::NotEvaluable(format!("point {b}")));
                };
                let n: i64 = s.hom.iter().zip(exps).map(|(v, e)| v * e).sum();
                let p = canonicalize(*z, sigma)?;
                let image = canonicalize(p.rep(), self.fibre())?.pow(n);
                s.constant.mul(&image)
            }
            BaseModel::Tate { hom_exponents: None, .. } => {
                Err(Error::NotEvaluable("lattice generators carry no exponents".into()))
            }
            _ => Err(Error::NotEvaluable("non-constant section on a base without point arithmetic".into())),
        }
    }

    /// `Sigma_1 . Sigma_2`: the degree of `phi_1 - phi_2`, or 0 for parallel translates.
    pub fn section_pairing(&self, s1: &SectionOfJ<F>, s2: &SectionOfJ<F>) -> Result<i64> {
        self.check_section(s1)?;
        self.check_section(s2)?;
        if s1.hom == s2.hom {
            return Ok(0);
        }
        let diff: Vec<i64> = s1.hom.iter().zip(&s2.hom).map(|(a, b)| a - b).collect();
        self.lattice().deg(&diff)
    }

    /// Numeric count of base points where two sections agree (elliptic base only).
    ///
    /// Works in logarithmic coordinates, where `s1/s2` is affine; seeds on a
    /// grid over the base period parallelogram are refined by Newton steps
    /// towards the nearest period of the fibre and the results are merged.
    pub fn coincidence_count(&self, s1: &SectionOfJ<F>, s2: &SectionOfJ<F>) -> Result<usize> {
        self.check_section(s1)?;
        self.check_section(s2)?;
        let BaseModel::Tate {
            sigma,
            hom_exponents: Some(exps),
        } = &self.surface.base().model
        else {
            return Err(Error::NotEvaluable("coincidence count needs an elliptic base with exponents".into()));
        };
        let n: i64 = s1.hom.iter().zip(&s2.hom).zip(exps).map(|((a, b), e)| (a - b) * e).sum();
        let ratio = s1.constant.div(&s2.constant)?;
        if n == 0 {
            return if ratio.is_identity(&self.tol) {
                Err(Error::Inconsistent("sections coincide everywhere".into()))
            } else {
                Ok(0)
            };
        }
        let nf = F::from_i64(n).expect("small exponent");
        let log_c = ratio.rep().ln();
        let log_tau = self.fibre().log_tau();
        let log_sigma = sigma.log_tau();
        let two_pi = F::TAU();
        let nearest_period = |w: Complex<F>| {
            let b = (w.re / log_tau.re).round();
            let a = ((w.im - b * log_tau.im) / two_pi).round();
            Complex::new(F::zero(), two_pi * a) + log_tau * b
        };
        let grid = 4 * n.unsigned_abs() as usize + 4;
        let mut found: Vec<TatePoint<F>> = Vec::new();
        for i in 0..grid {
            for j in 0..grid {
                let s = F::lit((i as f64 + 0.5) / grid as f64);
                let t = F::lit((j as f64 + 0.5) / grid as f64);
                let mut z = log_sigma * s + Complex::new(F::zero(), two_pi * t);
                for _ in 0..8 {
                    let w = log_c + z * nf;
                    let step = (w - nearest_period(w)) / nf;
                    z = z - step;
                    if step.norm() <= F::epsilon() * F::lit(16.0) * (F::one() + z.norm()) {
                        break;
                    }
                }
                let b = canonicalize(z.exp(), sigma)?;
                let v1 = self.evaluate(s1, &BasePoint::Finite(b.rep()))?;
                let v2 = self.evaluate(s2, &BasePoint::Finite(b.rep()))?;
                if v1.distance(&v2)? > self.tol.eps.sqrt() {
                    continue;
                }
                if !found.iter().any(|p| p.distance(&b).map(|d| d <= self.tol.eps.sqrt()).unwrap_or(false)) {
                    found.push(b);
                }
            }
        }
        Ok(found.len())
    }

    /// `i_delta(b, lambda) = (b, delta_b / lambda)`.
    pub fn involution_apply(
        &self,
        b: &BasePoint<F>,
        lambda: &TatePoint<F>,
        delta: &SectionOfJ<F>,
    ) -> Result<(BasePoint<F>, TatePoint<F>)> {
        let d = self.evaluate(delta, b)?;
        Ok((*b, d.div(lambda)?))
    }

    pub fn involution_on_section(&self, s: &SectionOfJ<F>, delta: &SectionOfJ<F>) -> Result<SectionOfJ<F>> {
        self.check_section(s)?;
        delta.tensor(&s.inverse())
    }

    /// The four solutions of `lambda^2 = delta_b`.
    pub fn involution_fixed_points(&self, b: &BasePoint<F>, delta: &SectionOfJ<F>) -> Result<[TatePoint<F>; 4]> {
        let root = self.evaluate(delta, b)?.sqrt();
        let tt = two_torsion(self.fibre());
        let mut out = tt;
        for (o, t) in out.iter_mut().zip(tt.iter()) {
            *o = root.mul(t)?;
        }
        Ok(out)
    }

    /// The (one or two) points of the bisection over `b`.
    pub fn fibre_values(&self, c: &Bisection<F>, b: &BasePoint<F>) -> Result<Vec<TatePoint<F>>> {
        match c {
            Bisection::Reducible(s1, s2) => Ok(vec![self.evaluate(s1, b)?, self.evaluate(s2, b)?]),
            Bisection::Irreducible(DoubleCover::Rational(rc)) => {
                self.surface.check_point(b)?;
                let value = rc.map.eval(b)?;
                quotient_preimages(&value, self.fibre(), &self.tol)?
                    .iter()
                    .map(|u| rc.center.mul(u))
                    .collect()
            }
            Bisection::Irreducible(DoubleCover::Declared { .. }) => {
                Err(Error::NotEvaluable("declared bisection has no fibre values".into()))
            }
        }
    }

    fn same_value_sets(&self, a: &[TatePoint<F>], b: &[TatePoint<F>]) -> bool {
        let radius = self.tol.eps.sqrt();
        let close = |p: &TatePoint<F>, q: &TatePoint<F>| p.distance(q).map(|d| d <= radius).unwrap_or(false);
        a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| close(p, q))) && b.iter().all(|q| a.iter().any(|p| close(p, q)))
    }

    /// Whether the bisection is mapped to itself by `i_delta`.
    ///
    /// Reducible bisections are compared exactly on lattice parts and at
    /// tolerance on constants; rational covers are compared as value sets over
    /// seeded random fibres. Declared covers are accepted as given.
    pub fn is_invariant_bisection(&self, c: &Bisection<F>, delta: &SectionOfJ<F>) -> Result<bool> {
        self.check_section(delta)?;
        match c {
            Bisection::Reducible(s1, s2) => {
                let i1 = self.involution_on_section(s1, delta)?;
                let i2 = self.involution_on_section(s2, delta)?;
                Ok(i1.same_as(s2, &self.tol) || (i1.same_as(s1, &self.tol) && i2.same_as(s2, &self.tol)))
            }
            Bisection::Irreducible(DoubleCover::Rational(_)) => {
                let mut rng = self.rng();
                let mut checked = 0;
                while checked < self.samples {
                    let b = self.surface.sample_point(&mut rng);
                    if self.surface.is_multiple_fibre(&b, &self.tol) {
                        continue;
                    }
                    let values = self.fibre_values(c, &b)?;
                    let images = values
                        .iter()
                        .map(|v| self.involution_apply(&b, v, delta).map(|(_, w)| w))
                        .collect::<Result<Vec<_>>>()?;
                    if !self.same_value_sets(&values, &images) {
                        return Ok(false);
                    }
                    checked += 1;
                }
                Ok(true)
            }
            Bisection::Irreducible(DoubleCover::Declared { .. }) => Ok(true),
        }
    }

    /// Total branching order of an irreducible bisection over `B`.
    pub fn branch_order(&self, cover: &DoubleCover<F>) -> u64 {
        match cover {
            // each of the four branch values of x has deg(map) preimages
            DoubleCover::Rational(rc) => 4 * rc.map.degree() as u64,
            DoubleCover::Declared { branch_order, .. } => *branch_order,
        }
    }

    /// `A^2` for the section `A` of `F_delta` with `eta^* A = C`.
    pub fn graph_self_intersection(&self, c: &Bisection<F>, delta: &SectionOfJ<F>) -> Result<Rational> {
        if !self.is_invariant_bisection(c, delta)? {
            return Err(Error::NotInvariant);
        }
        match c {
            Bisection::Reducible(s1, s2) => Ok(rational::int(self.section_pairing(s1, s2)?)),
            // 4 A^2 = 2 C_1 . C_2 and C_1 . C_2 is the branching order
            Bisection::Irreducible(cover) => Ok(Rational::new(self.branch_order(cover) as i64, 2)),
        }
    }

    /// Branch points of a rational cover found numerically, with local multiplicities.
    pub fn numeric_branch_points(&self, rc: &RationalCover<F>) -> Result<Vec<(BasePoint<F>, usize)>> {
        let n = rc.map.degree();
        let eps = F::epsilon() * F::lit(64.0);
        let cluster = self.tol.eps.sqrt();
        let mut out: Vec<(BasePoint<F>, usize)> = Vec::new();
        let mut push = |p: BasePoint<F>, k: usize| {
            if k == 0 {
                return;
            }
            if let Some(slot) = out.iter_mut().find(|(q, _)| match (q, &p) {
                (BasePoint::Finite(a), BasePoint::Finite(b)) => (a - b).norm() <= cluster * (F::one() + a.norm()),
                (BasePoint::Infinity, BasePoint::Infinity) => true,
                _ => false,
            }) {
                slot.1 += k;
            } else {
                out.push((p, k));
            }
        };
        let mut polys = vec![rc.map.den.clone()];
        for t in &two_torsion(self.fibre())[1..] {
            let e = quotient_x(t, &self.tol)?
                .finite()
                .ok_or_else(|| Error::Inconsistent("two-torsion value at infinity".into()))?;
            polys.push(poly::sub_scaled(&rc.map.num, &rc.map.den, e));
        }
        for p in &polys {
            let deg = poly::degree(p, eps).unwrap_or(0);
            for (z, k) in poly::cluster(&poly::roots(p, eps), cluster) {
                push(BasePoint::Finite(z), k);
            }
            push(BasePoint::Infinity, n - deg);
        }
        Ok(out)
    }

    /// Whether `b` lies under a branch point of the irreducible bisection.
    pub fn is_branch_point(&self, cover: &DoubleCover<F>, b: &BasePoint<F>) -> Result<bool> {
        match cover {
            DoubleCover::Rational(rc) => {
                let value = rc.map.eval(b)?;
                let radius = self.tol.eps.sqrt();
                for t in two_torsion(self.fibre()) {
                    if quotient_x(&t, &self.tol)?.close_to(&value, radius) {
                        return Ok(true);
                    }
                }
                Ok(rc.declared_branch_points.iter().any(|p| self.surface.same_point(p, b, &self.tol)))
            }
            DoubleCover::Declared { branch_points, .. } => {
                Ok(branch_points.iter().any(|p| self.surface.same_point(p, b, &self.tol)))
            }
        }
    }

    /// `C . B_0`, when it can be computed from the presentation.
    pub fn intersection_with_zero_section(&self, c: &Bisection<F>) -> Result<i64> {
        let b0 = self.zero_section();
        match c {
            Bisection::Reducible(s1, s2) => Ok(self.section_pairing(s1, &b0)? + self.section_pairing(s2, &b0)?),
            Bisection::Irreducible(DoubleCover::Rational(rc)) => Ok(rc.map.degree() as i64),
            Bisection::Irreducible(DoubleCover::Declared { .. }) => {
                Err(Error::NotEvaluable("declared bisection has no intersection data".into()))
            }
        }
    }

    /// The ruled surface for `c1`, using the maximal-self-intersection class of `c1 + 2 NS(X)` as `delta`.
    pub fn ruled_surface(&self, c1: &NSClass) -> Result<RuledSurfaceData<F>> {
        let m = surface_model::m2(c1, self.lattice())?;
        let delta = SectionOfJ::new(self.fibre().identity(), m.delta_class.hom.clone());
        let bounds = ruled_invariant_bounds(self.surface.genus(), m.value)?;
        let v_delta_degree = self.section_pairing(&self.zero_section(), &delta)?;
        Ok(RuledSurfaceData {
            delta,
            delta_class: m.delta_class,
            m: m.value,
            bounds,
            v_delta_degree,
        })
    }
}
