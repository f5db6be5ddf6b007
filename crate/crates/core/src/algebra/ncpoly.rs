use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result, C64};

use super::Monomial;

/// Shape of a truncated series: ℓ letters, truncation degree D.
///
/// Monomials are enumerated degree-major; inside one degree a word
/// (m₁,…,m_k) sits at the base-ℓ number m₁m₂…m_k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grading {
    letters: usize,
    degree: usize,
}

impl Grading {
    pub fn new(letters: usize, degree: usize) -> Self {
        Grading { letters, degree }
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of words of degree exactly k.
    pub fn count(&self, k: usize) -> usize {
        self.letters.pow(k as u32)
    }

    /// Index of the first word of degree k.
    pub fn offset(&self, k: usize) -> usize {
        (0..k).map(|j| self.count(j)).sum()
    }

    /// Total number of monomials of degree ≤ D.
    pub fn len(&self) -> usize {
        self.offset(self.degree + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree_of(&self, index: usize) -> usize {
        let mut k = 0;
        let mut off = 0;
        while off + self.count(k) <= index {
            off += self.count(k);
            k += 1;
        }
        k
    }

    pub fn monomial(&self, index: usize) -> Monomial {
        let k = self.degree_of(index);
        let mut r = index - self.offset(k);
        let mut word = vec![0; k];
        for slot in word.iter_mut().rev() {
            *slot = r % self.letters;
            r /= self.letters;
        }
        Monomial::new(word)
    }

    pub fn index_of(&self, m: &Monomial) -> Result<usize> {
        if m.degree() > self.degree {
            return Err(Error::DegreeMismatch { left: m.degree(), right: self.degree });
        }
        let mut r = 0;
        for &i in m.letters() {
            if i >= self.letters {
                return Err(Error::InvalidLetter { index: i, len: self.letters });
            }
            r = r * self.letters + i;
        }
        Ok(self.offset(m.degree()) + r)
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.len()).map(|i| self.monomial(i))
    }

    fn check(&self, other: &Grading) -> Result<()> {
        if self.letters != other.letters {
            return Err(Error::AlphabetMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: other.degree });
        }
        Ok(())
    }
}

/// A truncated noncommutative series with complex coefficients, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly {
    grading: Grading,
    coeffs: Vec<C64>,
}

impl NcPoly {
    pub fn zero(grading: Grading) -> Self {
        NcPoly { grading, coeffs: vec![C64::new(0.0, 0.0); grading.len()] }
    }

    pub fn one(grading: Grading) -> Self {
        let mut p = Self::zero(grading);
        p.coeffs[0] = C64::new(1.0, 0.0);
        p
    }

    pub fn from_coeffs(grading: Grading, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grading.len() {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                grading.len(),
                coeffs.len()
            )));
        }
        Ok(NcPoly { grading, coeffs })
    }

    pub fn from_fn(grading: Grading, mut f: impl FnMut(usize) -> C64) -> Self {
        NcPoly { grading, coeffs: (0..grading.len()).map(&mut f).collect() }
    }

    /// Builds a series from (monomial, coefficient) pairs; unlisted terms are 0.
    pub fn from_terms<'a>(grading: Grading, terms: impl IntoIterator<Item = (&'a Monomial, C64)>) -> Result<Self> {
        let mut p = Self::zero(grading);
        for (m, c) in terms {
            let i = grading.index_of(m)?;
            p.coeffs[i] += c;
        }
        Ok(p)
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn degree(&self) -> usize {
        self.grading.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, m: &Monomial) -> Result<C64> {
        Ok(self.coeffs[self.grading.index_of(m)?])
    }

    pub fn set_coeff(&mut self, m: &Monomial, c: C64) -> Result<()> {
        let i = self.grading.index_of(m)?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn constant(&self) -> C64 {
        self.coeffs[0]
    }

    /// Coefficients of degree exactly k.
    pub fn degree_part(&self, k: usize) -> &[C64] {
        let off = self.grading.offset(k);
        &self.coeffs[off..off + self.grading.count(k)]
    }

    pub fn is_unit_normalized(&self) -> bool {
        self.coeffs[0] == C64::new(1.0, 0.0)
    }

    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.grading.check(&other.grading)?;
        let g = self.grading;
        let d = g.degree;
        let l = g.letters;
        let offsets: Vec<usize> = (0..=d + 1).map(|k| g.offset(k)).collect();
        let counts: Vec<usize> = (0..=d).map(|k| g.count(k)).collect();
        let mut out = vec![C64::new(0.0, 0.0); g.len()];
        for k1 in 0..=d {
            for i1 in 0..counts[k1] {
                let a = self.coeffs[offsets[k1] + i1];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k2 in 0..=(d - k1) {
                    let base = offsets[k1 + k2] + i1 * l.pow(k2 as u32);
                    let src = &other.coeffs[offsets[k2]..offsets[k2] + counts[k2]];
                    for (i2, b) in src.iter().enumerate() {
                        out[base + i2] += a * b;
                    }
                }
            }
        }
        Ok(NcPoly { grading: g, coeffs: out })
    }

    /// Inverse in the unit group: Σ_{k≤D} (1 − x)^k.
    pub fn inv(&self) -> Result<NcPoly> {
        if !self.is_unit_normalized() {
            return Err(Error::NonUnitConstant(format!("{}", self.coeffs[0])));
        }
        let one = NcPoly::one(self.grading);
        let u = one.sub(self)?;
        let mut r = one.clone();
        for _ in 0..self.grading.degree {
            r = one.add(&u.mul(&r)?)?;
        }
        r.coeffs[0] = C64::new(1.0, 0.0);
        Ok(r)
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.grading.check(&other.grading)?;
        Ok(NcPoly {
            grading: self.grading,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.grading.check(&other.grading)?;
        Ok(NcPoly {
            grading: self.grading,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> NcPoly {
        NcPoly { grading: self.grading, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Multiplies coefficient i by `f(i)`.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, C64) -> C64) -> NcPoly {
        NcPoly {
            grading: self.grading,
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// max |coefficient| within each degree 0…D.
    pub fn degree_max_norms(&self) -> Vec<f64> {
        (0..=self.grading.degree)
            .map(|k| self.degree_part(k).iter().map(|c| c.norm()).fold(0.0, f64::max))
            .collect()
    }

    /// Nonzero terms keyed by monomial string, for reports.
    pub fn to_map(&self) -> BTreeMap<String, [f64; 2]> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::new(0.0, 0.0))
            .map(|(i, c)| (self.grading.monomial(i).to_string(), [c.re, c.im]))
            .collect()
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)·{}", c.re, c.im, self.grading.monomial(i))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn poly(g: Grading, terms: &[(&str, f64)]) -> NcPoly {
        let ms: Vec<(Monomial, C64)> = terms.iter().map(|(m, v)| (m.parse().unwrap(), c(*v))).collect();
        NcPoly::from_terms(g, ms.iter().map(|(m, v)| (m, *v))).unwrap()
    }

    #[test]
    fn index_roundtrip() {
        let g = Grading::new(3, 4);
        assert_eq!(g.len(), 1 + 3 + 9 + 27 + 81);
        for i in 0..g.len() {
            assert_eq!(g.index_of(&g.monomial(i)).unwrap(), i);
        }
        assert_eq!(g.monomial(0), Monomial::empty());
    }

    #[test]
    fn product_example() {
        let g = Grading::new(2, 2);
        let x = poly(g, &[("1", 1.0), ("A1", 2.0)]);
        let y = poly(g, &[("1", 1.0), ("A2", 3.0)]);
        let want = poly(g, &[("1", 1.0), ("A1", 2.0), ("A2", 3.0), ("A1*A2", 6.0)]);
        assert_eq!(x.mul(&y).unwrap(), want);
        assert_eq!(NcPoly::one(g).mul(&x).unwrap(), x);
    }

    #[test]
    fn truncation() {
        let g = Grading::new(1, 1);
        let a = poly(g, &[("A1", 1.0)]);
        assert_eq!(a.mul(&a).unwrap(), NcPoly::zero(g));
    }

    #[test]
    fn inverse_examples() {
        let g = Grading::new(1, 2);
        let x = poly(g, &[("1", 1.0), ("A1", 1.0)]);
        assert_eq!(x.inv().unwrap(), poly(g, &[("1", 1.0), ("A1", -1.0), ("A1*A1", 1.0)]));
        assert_eq!(NcPoly::one(g).inv().unwrap(), NcPoly::one(g));
        let g = Grading::new(2, 1);
        let x = poly(g, &[("1", 1.0), ("A1", 0.5), ("A2", 0.5)]);
        assert_eq!(x.inv().unwrap(), poly(g, &[("1", 1.0), ("A1", -0.5), ("A2", -0.5)]));
    }

    #[test]
    fn mismatches_rejected() {
        let a = NcPoly::one(Grading::new(2, 2));
        assert!(matches!(a.mul(&NcPoly::one(Grading::new(2, 3))), Err(Error::DegreeMismatch { .. })));
        assert!(matches!(a.mul(&NcPoly::one(Grading::new(3, 2))), Err(Error::AlphabetMismatch)));
        assert!(matches!(NcPoly::zero(Grading::new(2, 2)).inv(), Err(Error::NonUnitConstant(_))));
    }
}
