//! The lattice `Hom(J_B, Pic^0 T)` with its degree form, and the
//! closest-vector minimisation behind `m(2, c1)`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Free lattice of rank at most 2 with an integral positive-semidefinite degree form.
///
/// The form is stored through its polar matrix `P = 2G`, so that
/// `deg(v) = v^T P v / 2` and the bilinear pairing `v^T P w` are integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomLattice {
    polar: Vec<Vec<i64>>,
}

/// Result of the `m(2, c1)` minimisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M2 {
    /// `m(2, c1) = min_mu deg(c1 - 2 mu) / 4`.
    pub value: Rational,
    /// Minimising representative `c1 - 2 mu*` of `c1 + 2 Lambda`.
    pub witness: Vec<i64>,
    /// The shift `mu*`.
    pub shift: Vec<i64>,
}

impl HomLattice {
    /// Builds a lattice from the polar matrix `2G`.
    pub fn from_polar(polar: Vec<Vec<i64>>) -> Result<Self> {
        let r = polar.len();
        if r > 2 {
            return Err(Error::InvalidGram(format!("rank {r} exceeds 2")));
        }
        for (i, row) in polar.iter().enumerate() {
            if row.len() != r {
                return Err(Error::InvalidGram("matrix is not square".into()));
            }
            if row[i].is_odd() {
                return Err(Error::InvalidGram(format!("diagonal entry {i} is not an integer")));
            }
            for (j, &x) in row.iter().enumerate() {
                if polar[j][i] != x {
                    return Err(Error::InvalidGram("matrix is not symmetric".into()));
                }
            }
        }
        match r {
            0 => {}
            1 => {
                if polar[0][0] < 0 {
                    return Err(Error::IndefiniteForm);
                }
            }
            _ => {
                let det = polar[0][0] * polar[1][1] - polar[0][1] * polar[1][0];
                if polar[0][0] < 0 || polar[1][1] < 0 || det < 0 {
                    return Err(Error::IndefiniteForm);
                }
            }
        }
        Ok(Self { polar })
    }

    /// Builds a lattice from a Gram matrix with integer diagonal and half-integer off-diagonal entries.
    pub fn from_gram(gram: &[Vec<Rational>]) -> Result<Self> {
        let polar = gram
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let y = *x * rational::int(2);
                        if y.is_integer() {
                            Ok(y.to_integer())
                        } else {
                            Err(Error::InvalidGram(format!("entry {} is not a half-integer", rational::to_string(x))))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_polar(polar)
    }

    pub fn trivial() -> Self {
        Self { polar: Vec::new() }
    }

    /// Rank-one lattice with `deg(n) = a n^2`.
    pub fn rank_one(a: i64) -> Result<Self> {
        Self::from_polar(vec![vec![2 * a]])
    }

    pub fn rank(&self) -> usize {
        self.polar.len()
    }

    pub fn polar_matrix(&self) -> &[Vec<i64>] {
        &self.polar
    }

    pub fn gram(&self) -> Vec<Vec<Rational>> {
        self.polar
            .iter()
            .map(|row| row.iter().map(|&x| Rational::new(x, 2)).collect())
            .collect()
    }

    pub fn check_dim(&self, v: &[i64]) -> Result<()> {
        if v.len() == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: v.len(),
            })
        }
    }

    /// Integral polar form `v^T P w = deg(v + w) - deg(v) - deg(w)`.
    pub fn polar(&self, v: &[i64], w: &[i64]) -> Result<i64> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.polar_unchecked(v, w))
    }

    fn polar_unchecked(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.polar.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                s += v[i] * p * w[j];
            }
        }
        s
    }

    /// Degree of the covering map represented by `v`.
    pub fn deg(&self, v: &[i64]) -> Result<i64> {
        self.check_dim(v)?;
        Ok(self.deg_unchecked(v))
    }

    fn deg_unchecked(&self, v: &[i64]) -> i64 {
        self.polar_unchecked(v, v) / 2
    }

    /// Minimises `deg(c - 2 mu)` over the lattice.
    ///
    /// Definite forms are handled by Fincke-Pohst enumeration inside the
    /// ellipse bounded by a parity-reduced starting vector; degenerate forms
    /// are reduced to the quotient by their kernel, where the minimum is
    /// explicit. Among minimisers the witness with smallest sup-norm, then
    /// lexicographically smallest coordinates, is returned.
    pub fn m2(&self, c: &[i64]) -> Result<M2> {
        self.check_dim(c)?;
        let min = match self.rank() {
            0 => 0,
            1 => {
                if c[0].is_odd() {
                    self.polar[0][0] / 2
                } else {
                    0
                }
            }
            _ => self.min_rank_two(c),
        };
        let witness = self.smallest_witness(c, min);
        Ok(self.finish(c, witness))
    }

    /// Brute-force variant: minimises over `mu` in the cube of the given radius.
    pub fn m2_in_cube(&self, c: &[i64], radius: i64) -> Result<M2> {
        self.check_dim(c)?;
        let mut best: Option<Vec<i64>> = None;
        for mu in cube(self.rank(), radius) {
            let w: Vec<i64> = c.iter().zip(&mu).map(|(a, m)| a - 2 * m).collect();
            if best.as_ref().is_none_or(|b| witness_key(self, &w) < witness_key(self, b)) {
                best = Some(w);
            }
        }
        Ok(self.finish(c, best.unwrap_or_default()))
    }

    fn finish(&self, c: &[i64], witness: Vec<i64>) -> M2 {
        let value = Rational::new(self.deg_unchecked(&witness), 4);
        let shift = c.iter().zip(&witness).map(|(a, w)| (a - w) / 2).collect();
        M2 { value, witness, shift }
    }

    fn min_rank_two(&self, c: &[i64]) -> i64 {
        let a = self.polar[0][0] / 2;
        let b = self.polar[0][1];
        let e = self.polar[1][1] / 2;
        let disc = 4 * a * e - b * b;
        if a == 0 && e == 0 {
            return 0;
        }
        if disc == 0 {
            // deg = s (p x + q y)^2 with gcd(p, q) = 1, so l(c - 2 mu) runs over l(c) + 2Z
            let s = a.gcd(&e);
            let p = isqrt(a / s);
            let q = if b < 0 { -isqrt(e / s) } else { isqrt(e / s) };
            let l = p * c[0] + q * c[1];
            return if l.is_odd() { s } else { 0 };
        }
        // definite: Fincke-Pohst in the coset c + 2Z^2
        let start: Vec<i64> = c.iter().map(|x| x.rem_euclid(2)).collect();
        let mut best = self.deg_unchecked(&start);
        let (af, bf, df) = (a as f64, b as f64, disc as f64);
        let ub = best as f64;
        let ymax = (4.0 * af * ub / df).sqrt().floor() as i64 + 1;
        for y in -ymax..=ymax {
            if (y - c[1]).is_odd() {
                continue;
            }
            let rest = ub - df * (y * y) as f64 / (4.0 * af);
            if rest < -1.0 {
                continue;
            }
            let center = -bf * y as f64 / (2.0 * af);
            let half = (rest.max(0.0) / af).sqrt();
            let lo = (center - half).floor() as i64 - 1;
            let hi = (center + half).ceil() as i64 + 1;
            for x in lo..=hi {
                if (x - c[0]).is_odd() {
                    continue;
                }
                best = best.min(self.deg_unchecked(&[x, y]));
            }
        }
        best
    }

    /// Searches boxes of growing sup-norm for a representative of `c + 2Z^r` attaining `min`.
    fn smallest_witness(&self, c: &[i64], min: i64) -> Vec<i64> {
        let r = self.rank();
        if r == 0 {
            return Vec::new();
        }
        let mut radius = 0i64;
        loop {
            let mut hits: Vec<Vec<i64>> = cube(r, radius)
                .filter(|w| w.iter().map(|x| x.abs()).max().unwrap_or(0) == radius)
                .filter(|w| w.iter().zip(c).all(|(x, y)| (x - y).is_even()))
                .filter(|w| self.deg_unchecked(w) == min)
                .collect();
            if !hits.is_empty() {
                hits.sort();
                return hits.swap_remove(0);
            }
            radius += 1;
        }
    }
}

fn witness_key(l: &HomLattice, w: &[i64]) -> (i64, i64, Vec<i64>) {
    (
        l.deg_unchecked(w),
        w.iter().map(|x| x.abs()).max().unwrap_or(0),
        w.to_vec(),
    )
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All integer vectors of the given length with entries in `[-radius, radius]`.
pub fn cube(rank: usize, radius: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(rank as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0i64; rank];
        for x in v.iter_mut() {
            *x = (idx % side) as i64 - radius;
            idx /= side;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn eisenstein() -> HomLattice {
        // deg(a, b) = a^2 + ab + b^2
        HomLattice::from_gram(&[vec![rat(1, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]]).unwrap()
    }

    #[test]
    fn gram_validation() {
        assert_eq!(HomLattice::rank_one(-1), Err(Error::IndefiniteForm));
        let indefinite = HomLattice::from_gram(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]]);
        assert_eq!(indefinite, Err(Error::IndefiniteForm));
        assert!(HomLattice::from_gram(&[vec![rat(1, 2)]]).is_err());
        assert!(HomLattice::from_gram(&[vec![rat(1, 1), rat(1, 4)], vec![rat(1, 4), rat(1, 1)]]).is_err());
        assert!(HomLattice::from_polar(vec![vec![2, 1], vec![0, 2]]).is_err());
        assert!(HomLattice::from_polar(vec![vec![0; 3]; 3]).is_err());
    }

    #[test]
    fn degree_examples() {
        let l = eisenstein();
        assert_eq!(l.deg(&[1, 1]).unwrap(), 3);
        // polarization cross-check: deg(v+w) - deg v - deg w = polar(v, w)
        let (v, w) = ([1, 0], [0, 1]);
        assert_eq!(l.deg(&[1, 1]).unwrap() - l.deg(&v).unwrap() - l.deg(&w).unwrap(), l.polar(&v, &w).unwrap());
        assert!(matches!(l.deg(&[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn m2_examples() {
        let z = HomLattice::rank_one(1).unwrap();
        let m = z.m2(&[0]).unwrap();
        assert_eq!(m.value, rat(0, 1));
        assert_eq!(m.witness, vec![0]);
        // oracle: brute force over mu in [-10, 10] of (1 - 2 mu)^2
        let brute = (-10i64..=10).map(|mu| (1 - 2 * mu).pow(2)).min().unwrap();
        assert_eq!(brute, 1);
        assert_eq!(z.m2(&[1]).unwrap().value, rat(brute, 4));
        let m = z.m2(&[2]).unwrap();
        assert_eq!(m.value, rat(0, 1));
        assert_eq!(m.shift, vec![1]);
    }

    #[test]
    fn m2_degenerate_forms() {
        // deg(x, y) = (x + 2y)^2, kernel spanned by (2, -1)
        let l = HomLattice::from_polar(vec![vec![2, 4], vec![4, 8]]).unwrap();
        assert_eq!(l.m2(&[1, 0]).unwrap().value, rat(1, 4));
        assert_eq!(l.m2(&[0, 1]).unwrap().value, rat(0, 1));
        assert_eq!(l.m2(&[3, 5]).unwrap(), l.m2_in_cube(&[3, 5], 8).unwrap());
        // deg(x, y) = 2 y^2
        let l = HomLattice::from_polar(vec![vec![0, 0], vec![0, 4]]).unwrap();
        assert_eq!(l.m2(&[7, 3]).unwrap().value, rat(2, 4));
        let zero = HomLattice::from_polar(vec![vec![0, 0], vec![0, 0]]).unwrap();
        let m = zero.m2(&[5, -2]).unwrap();
        assert_eq!(m.value, rat(0, 1));
        assert_eq!(m.witness, vec![-1, 0]);
    }

    #[test]
    fn m2_definite_matches_cube() {
        let l = eisenstein();
        for c in cube(2, 6) {
            assert_eq!(l.m2(&c).unwrap(), l.m2_in_cube(&c, 10).unwrap(), "c = {c:?}");
        }
    }

    #[test]
    fn m2_trivial_lattice() {
        let l = HomLattice::trivial();
        let m = l.m2(&[]).unwrap();
        assert_eq!(m.value, rat(0, 1));
        assert!(m.witness.is_empty());
    }
}
