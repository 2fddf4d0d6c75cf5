//! Arithmetic and special functions on the Tate curve `T = C*/<tau>`.
//!
//! The same type serves the dual curve `T*`: a point `alpha` is identified
//! with the degree-zero line bundle `L_alpha` given by the constant automorphy
//! factor `alpha`.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multiplicative period `tau` with `|tau| > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveParam<F> {
    tau: Complex<F>,
}

impl<F: Scalar> CurveParam<F> {
    pub fn new(tau: Complex<F>) -> Result<Self> {
        let n = tau.norm();
        if !(n > F::one()) || !n.is_finite() {
            return Err(Error::InvalidPeriod(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { tau })
    }

    pub fn real(tau: f64) -> Result<Self> {
        Self::new(Complex::new(F::lit(tau), F::zero()))
    }

    pub fn tau(&self) -> Complex<F> {
        self.tau
    }

    /// `q = 1/tau`, the nome of the series expansions.
    pub fn q(&self) -> Complex<F> {
        self.tau.inv()
    }

    /// Principal logarithm of `tau`; together with `2 pi i` it spans the period lattice.
    pub fn log_tau(&self) -> Complex<F> {
        self.tau.ln()
    }

    pub fn identity(&self) -> TatePoint<F> {
        TatePoint {
            rep: Complex::new(F::one(), F::zero()),
            curve: *self,
        }
    }

    pub fn point(&self, z: Complex<F>) -> Result<TatePoint<F>> {
        canonicalize(z, self)
    }

    /// Uniformly distributed point in the fundamental parallelogram of the log lattice.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TatePoint<F> {
        let s = F::lit(rng.gen::<f64>());
        let t = F::lit(rng.gen::<f64>());
        let z = self.log_tau() * s + Complex::new(F::zero(), F::TAU() * t);
        canonicalize(z.exp(), self).expect("exp never vanishes")
    }
}

/// Comparison radius and series cap for the numeric routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<F> {
    pub eps: F,
    pub series_terms: usize,
}

impl<F: Scalar> Tolerance<F> {
    pub fn new(eps: F, series_terms: usize) -> Result<Self> {
        if !(eps > F::zero()) || !eps.is_finite() {
            return Err(Error::InvalidTolerance(format!("eps must be positive, got {eps}")));
        }
        if series_terms == 0 {
            return Err(Error::InvalidTolerance("series cap must be positive".into()));
        }
        Ok(Self { eps, series_terms })
    }
}

impl<F: Scalar> Default for Tolerance<F> {
    fn default() -> Self {
        Self {
            eps: F::default_eps(),
            series_terms: 10_000,
        }
    }
}

/// Point of `C*/<tau>` stored by its representative in `1 <= |rep| < |tau|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TatePoint<F> {
    rep: Complex<F>,
    curve: CurveParam<F>,
}

/// Reduces a nonzero complex number to the fundamental annulus.
pub fn canonicalize<F: Scalar>(z: Complex<F>, curve: &CurveParam<F>) -> Result<TatePoint<F>> {
    let r = z.norm();
    if r == F::zero() {
        return Err(Error::ZeroPoint);
    }
    if !r.is_finite() {
        return Err(Error::Inconsistent("non-finite point".into()));
    }
    let tau = curve.tau;
    let abs_tau = tau.norm();
    let k = -(r.ln() / abs_tau.ln()).floor();
    let k = k.to_i32().ok_or_else(|| Error::Inconsistent("point out of range".into()))?;
    let mut w = z * tau.powi(k);
    // rounding can leave w just outside the half-open annulus
    for _ in 0..4 {
        let n = w.norm();
        if n < F::one() {
            w = w * tau;
        } else if n >= abs_tau {
            w = w / tau;
        } else {
            break;
        }
    }
    Ok(TatePoint { rep: w, curve: *curve })
}

impl<F: Scalar> TatePoint<F> {
    pub fn rep(&self) -> Complex<F> {
        self.rep
    }

    pub fn curve(&self) -> &CurveParam<F> {
        &self.curve
    }

    fn check_curve(&self, other: &Self) -> Result<()> {
        if self.curve == other.curve {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_curve(other)?;
        canonicalize(self.rep * other.rep, &self.curve)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_curve(other)?;
        canonicalize(self.rep / other.rep, &self.curve)
    }

    pub fn inv(&self) -> Self {
        canonicalize(self.rep.inv(), &self.curve).expect("inverse of a nonzero point")
    }

    pub fn pow(&self, n: i64) -> Self {
        // canonicalize after every doubling to keep magnitudes bounded
        let mut base = *self;
        let mut acc = self.curve.identity();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same curve");
            }
            base = base.mul(&base).expect("same curve");
            e >>= 1;
        }
        if n < 0 {
            acc.inv()
        } else {
            acc
        }
    }

    /// Principal square root of the representative.
    pub fn sqrt(&self) -> Self {
        canonicalize(self.rep.sqrt(), &self.curve).expect("nonzero")
    }

    /// Relative distance between classes, minimised over the wrap-around at the annulus boundary.
    pub fn distance(&self, other: &Self) -> Result<F> {
        self.check_curve(other)?;
        let ratio = self.rep / other.rep;
        let one = Complex::new(F::one(), F::zero());
        let tau = self.curve.tau;
        let d = [ratio, ratio * tau, ratio / tau]
            .iter()
            .map(|w| (w - one).norm())
            .fold(F::infinity(), F::min);
        Ok(d)
    }

    pub fn is_identity(&self, tol: &Tolerance<F>) -> bool {
        self.distance(&self.curve.identity())
            .map(|d| d <= tol.eps)
            .unwrap_or(false)
    }
}

pub fn group_mul<F: Scalar>(a: &TatePoint<F>, b: &TatePoint<F>) -> Result<TatePoint<F>> {
    a.mul(b)
}

pub fn group_inv<F: Scalar>(a: &TatePoint<F>) -> TatePoint<F> {
    a.inv()
}

pub fn points_equal<F: Scalar>(a: &TatePoint<F>, b: &TatePoint<F>, tol: &Tolerance<F>) -> Result<bool> {
    Ok(a.distance(b)? <= tol.eps)
}

/// The four classes with `lambda^2 = 1`: `{1, -1, sqrt(tau), -sqrt(tau)}`.
pub fn two_torsion<F: Scalar>(curve: &CurveParam<F>) -> [TatePoint<F>; 4] {
    let one = Complex::new(F::one(), F::zero());
    let s = curve.tau.sqrt();
    [one, -one, s, -s].map(|z| canonicalize(z, curve).expect("nonzero"))
}

/// Value of the quotient coordinate on `P^1`, with a distinguished point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XValue<F> {
    Finite(Complex<F>),
    Infinity,
}

impl<F: Scalar> XValue<F> {
    pub fn finite(&self) -> Option<Complex<F>> {
        match self {
            XValue::Finite(z) => Some(*z),
            XValue::Infinity => None,
        }
    }

    /// Distance in the chordal-style sense used for tolerance comparisons.
    pub fn close_to(&self, other: &Self, eps: F) -> bool {
        match (self, other) {
            (XValue::Infinity, XValue::Infinity) => true,
            (XValue::Finite(a), XValue::Finite(b)) => (a - b).norm() <= eps * (F::one() + a.norm().max(b.norm())),
            (XValue::Finite(a), XValue::Infinity) | (XValue::Infinity, XValue::Finite(a)) => {
                a.norm().recip() <= eps
            }
        }
    }
}

#[inline]
fn kernel<F: Scalar>(w: Complex<F>) -> Complex<F> {
    let one = Complex::new(F::one(), F::zero());
    let d = one - w;
    w / (d * d)
}

#[inline]
fn kernel_derivative<F: Scalar>(w: Complex<F>) -> Complex<F> {
    let one = Complex::new(F::one(), F::zero());
    let d = one - w;
    (one + w) / (d * d * d)
}

/// Bound on the omitted terms after `n` terms of the symmetrised series,
/// valid for representatives with `1 <= |u| <= |tau|^(1/2)`.
fn tail_bound<F: Scalar>(abs_q: F, n: usize) -> F {
    let half = F::lit(0.5);
    let sq = abs_q.sqrt();
    let nf = F::from_usize(n).expect("term count");
    let num = abs_q.powf(nf + half) + F::lit(3.0) * abs_q.powf(nf + F::one());
    let den = (F::one() - abs_q) * (F::one() - sq) * (F::one() - sq);
    num / den
}

/// Sums `x(u)` and `dx/du` for a canonical representative `u`.
fn x_series<F: Scalar>(u: Complex<F>, curve: &CurveParam<F>, tol: &Tolerance<F>) -> Result<(Complex<F>, Complex<F>)> {
    let tau = curve.tau;
    let q = curve.q();
    let abs_q = q.norm();
    // x(u) = x(tau/u); pick the representative closer to the unit circle
    let reflect = u.norm() * u.norm() > tau.norm();
    let v = if reflect { tau / u } else { u };

    let mut x = kernel(v);
    let mut dx = kernel_derivative(v);
    let mut qk = Complex::new(F::one(), F::zero());
    let two = F::lit(2.0);
    let target = tol.eps * F::lit(0.5);
    let mut done = false;
    for k in 1..=tol.series_terms {
        qk = qk * q;
        let a = qk * v;
        let b = qk / v;
        x = x + kernel(a) + kernel(b) - kernel(qk) * two;
        dx = dx + qk * kernel_derivative(a) - (b / v) * kernel_derivative(b);
        if tail_bound(abs_q, k) < target {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::SeriesCap {
            eps: tol.eps.to_f64().unwrap_or(f64::NAN),
            cap: tol.series_terms,
        });
    }
    let dx = if reflect { -(dx * v / u) } else { dx };
    Ok((x, dx))
}

/// Degree-2 quotient map `T -> P^1` for the inversion `u -> 1/u`:
///
/// `x(u) = sum_{n in Z} q^n u/(1 - q^n u)^2 - 2 sum_{n >= 1} q^n/(1 - q^n)^2`, `q = 1/tau`,
///
/// with its double pole at the identity class reported as [`XValue::Infinity`].
pub fn quotient_x<F: Scalar>(alpha: &TatePoint<F>, tol: &Tolerance<F>) -> Result<XValue<F>> {
    if alpha.is_identity(tol) {
        return Ok(XValue::Infinity);
    }
    let (x, _) = x_series(alpha.rep, &alpha.curve, tol)?;
    Ok(XValue::Finite(x))
}

/// Derivative of [`quotient_x`] with respect to the canonical representative.
pub fn quotient_x_derivative<F: Scalar>(alpha: &TatePoint<F>, tol: &Tolerance<F>) -> Result<Complex<F>> {
    let (_, dx) = x_series(alpha.rep, &alpha.curve, tol)?;
    Ok(dx)
}

/// Classes `u` in the fundamental annulus with `x(u) = c`, found by
/// grid-seeded Newton iteration in logarithmic coordinates. The second
/// preimage is the inverse of the first unless the two agree to `sqrt(eps)`.
pub fn quotient_preimages<F: Scalar>(c: &XValue<F>, curve: &CurveParam<F>, tol: &Tolerance<F>) -> Result<Vec<TatePoint<F>>> {
    let c = match c {
        XValue::Infinity => return Ok(vec![curve.identity()]),
        XValue::Finite(c) => *c,
    };
    let accept = F::lit(10.0) * tol.eps * (F::one() + c.norm());
    // branch values have a single (double) preimage, where Newton converges slowly
    for t in &two_torsion(curve)[1..] {
        let (x, _) = x_series(t.rep, curve, tol)?;
        if (x - c).norm() <= accept {
            return Ok(vec![*t]);
        }
    }
    let grid = 10usize;
    let log_tau = curve.log_tau();
    let two_pi_i = Complex::new(F::zero(), F::TAU());
    let cluster = tol.eps.sqrt().max(F::lit(1e-6));
    let max_step = log_tau.norm().min(F::TAU()) * F::lit(0.25);

    for i in 0..grid {
        for j in 0..grid {
            let s = F::lit((i as f64 + 0.5) / grid as f64);
            let t = F::lit((j as f64 + 0.5) / grid as f64);
            let mut z = log_tau * s + two_pi_i * t;
            let mut found = None;
            for _ in 0..200 {
                let p = canonicalize(z.exp(), curve)?;
                if p.is_identity(tol) {
                    break;
                }
                let (x, dx) = x_series(p.rep, curve, tol)?;
                let g = x - c;
                let dg = dx * p.rep;
                if dg.norm() == F::zero() {
                    break;
                }
                let mut step = g / dg;
                if step.norm() > max_step {
                    step = step * (max_step / step.norm());
                }
                // restart from the canonical lift to keep the series in range
                z = p.rep.ln() - step;
                if step.norm() <= F::lit(1e-15) * (F::one() + z.norm()) {
                    found = Some(canonicalize(z.exp(), curve)?);
                    break;
                }
                found = Some(canonicalize(z.exp(), curve)?);
            }
            let Some(p) = found else { continue };
            if p.is_identity(tol) {
                continue;
            }
            let (x, _) = x_series(p.rep, curve, tol)?;
            if (x - c).norm() > accept {
                continue;
            }
            // x has degree 2 and x(u) = x(1/u), so the fibre is {p, 1/p}
            let mut roots = vec![p];
            if p.distance(&p.inv())? > cluster {
                roots.push(p.inv());
            }
            return Ok(roots);
        }
    }
    Ok(Vec::new())
}

/// `h^1(T, L_alpha)`: 1 exactly on the identity class, 0 elsewhere.
pub fn h1_indicator<F: Scalar>(alpha: &TatePoint<F>, tol: &Tolerance<F>) -> u8 {
    u8::from(alpha.is_identity(tol))
}
