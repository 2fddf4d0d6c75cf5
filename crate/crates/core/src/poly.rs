//! Complex polynomials (ascending coefficients) and numeric root finding.

use num_complex::Complex;

use crate::scalar::Scalar;

/// Drops trailing coefficients whose modulus is at most `eps` times the largest one.
pub fn trim<F: Scalar>(p: &[Complex<F>], eps: F) -> Vec<Complex<F>> {
    let scale = p.iter().map(|c| c.norm()).fold(F::zero(), F::max);
    let mut v = p.to_vec();
    while let Some(last) = v.last() {
        if last.norm() <= eps * scale || scale == F::zero() {
            v.pop();
        } else {
            break;
        }
    }
    v
}

/// Degree after trimming; `None` for the zero polynomial.
pub fn degree<F: Scalar>(p: &[Complex<F>], eps: F) -> Option<usize> {
    let t = trim(p, eps);
    if t.is_empty() {
        None
    } else {
        Some(t.len() - 1)
    }
}

pub fn eval<F: Scalar>(p: &[Complex<F>], z: Complex<F>) -> Complex<F> {
    p.iter().rev().fold(Complex::new(F::zero(), F::zero()), |acc, c| acc * z + c)
}

pub fn sub_scaled<F: Scalar>(p: &[Complex<F>], q: &[Complex<F>], k: Complex<F>) -> Vec<Complex<F>> {
    let n = p.len().max(q.len());
    let zero = Complex::new(F::zero(), F::zero());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(zero) - q.get(i).copied().unwrap_or(zero) * k)
        .collect()
}

/// All roots with multiplicity, by simultaneous Weierstrass (Durand-Kerner) iteration.
pub fn roots<F: Scalar>(p: &[Complex<F>], eps: F) -> Vec<Complex<F>> {
    let p = trim(p, eps);
    if p.len() <= 1 {
        return Vec::new();
    }
    let n = p.len() - 1;
    let lead = p[n];
    let monic: Vec<Complex<F>> = p.iter().map(|c| c / lead).collect();
    let radius = F::one() + monic[..n].iter().map(|c| c.norm()).fold(F::zero(), F::max);
    let seed = Complex::new(F::lit(0.4), F::lit(0.9));
    let mut z: Vec<Complex<F>> = (0..n).map(|k| seed.powi(k as i32) * radius).collect();
    for _ in 0..2000 {
        let mut delta = F::zero();
        for i in 0..n {
            let mut den = Complex::new(F::one(), F::zero());
            for j in 0..n {
                if i != j {
                    den = den * (z[i] - z[j]);
                }
            }
            if den.norm() == F::zero() {
                den = Complex::new(F::epsilon(), F::zero());
            }
            let step = eval(&monic, z[i]) / den;
            z[i] = z[i] - step;
            delta = delta.max(step.norm() / (F::one() + z[i].norm()));
        }
        if delta < F::epsilon() * F::lit(4.0) {
            break;
        }
    }
    z
}

/// Groups numerically coincident roots, returning `(root, multiplicity)`.
pub fn cluster<F: Scalar>(roots: &[Complex<F>], radius: F) -> Vec<(Complex<F>, usize)> {
    let mut out: Vec<(Complex<F>, usize)> = Vec::new();
    for r in roots {
        if let Some(slot) = out
            .iter_mut()
            .find(|(c, _)| (c - r).norm() <= radius * (F::one() + c.norm()))
        {
            slot.1 += 1;
        } else {
            out.push((*r, 1));
        }
    }
    out
}
