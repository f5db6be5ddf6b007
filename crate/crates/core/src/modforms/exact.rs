//! Exact integer and rational power series in q, truncated at a fixed length.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Σ_{n<len} c_n qⁿ with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeries {
    coeffs: Vec<BigRational>,
}

impl ExactSeries {
    pub fn zero(len: usize) -> Self {
        ExactSeries { coeffs: vec![BigRational::zero(); len] }
    }

    pub fn one(len: usize) -> Self {
        let mut s = Self::zero(len);
        if len > 0 {
            s.coeffs[0] = BigRational::one();
        }
        s
    }

    pub fn from_integers(v: Vec<BigInt>) -> Self {
        ExactSeries { coeffs: v.into_iter().map(BigRational::from_integer).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn mul(&self, other: &ExactSeries) -> ExactSeries {
        let len = self.len().min(other.len());
        let mut out = Self::zero(len);
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> ExactSeries {
        let mut r = Self::one(self.len());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn add(&self, other: &ExactSeries) -> ExactSeries {
        let len = self.len().min(other.len());
        ExactSeries { coeffs: (0..len).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn scale(&self, s: &BigRational) -> ExactSeries {
        ExactSeries { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Drops the first `k` coefficients (division by q^k of a series vanishing to order k).
    pub fn shift_down(&self, k: usize) -> ExactSeries {
        ExactSeries { coeffs: self.coeffs[k.min(self.len())..].to_vec() }
    }

    pub fn truncate(&self, len: usize) -> ExactSeries {
        ExactSeries { coeffs: self.coeffs[..len.min(self.len())].to_vec() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

/// ∏_{n≥1}(1 − qⁿ)^N to `len` terms, by repeated multiplication.
pub fn euler_product_power(n_pow: u32, len: usize) -> ExactSeries {
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); len];
    if len == 0 {
        return ExactSeries::from_integers(acc);
    }
    acc[0] = BigInt::one();
    for _ in 0..n_pow {
        for n in 1..len {
            // multiply in place by (1 − qⁿ), high degrees first
            for i in (n..len).rev() {
                let t = acc[i - n].clone();
                acc[i] -= t;
            }
        }
    }
    ExactSeries::from_integers(acc)
}

/// Bernoulli numbers B₀…B_n with B₁ = −1/2.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::zero(); n + 1];
    b[0] = BigRational::one();
    for m in 1..=n {
        // Σ_{k=0}^{m} C(m+1,k) B_k = 0
        let mut s = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate().take(m) {
            s += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b[m] = -s / BigRational::from_integer(BigInt::from(m + 1));
    }
    b
}

/// σ_e(n) = Σ_{d | n} d^e.
pub fn divisor_power_sum(n: u64, e: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(e);
            let o = n / d;
            if o != d {
                s += BigInt::from(o).pow(e);
            }
        }
        d += 1;
    }
    s
}

/// E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ for even k ≥ 4.
pub fn eisenstein(k: u32, len: usize) -> ExactSeries {
    assert!(k >= 4 && k.is_even());
    let bk = bernoulli(k as usize)[k as usize].clone();
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bk;
    let mut s = ExactSeries::zero(len);
    if len > 0 {
        s.coeffs[0] = BigRational::one();
    }
    for n in 1..len {
        s.coeffs[n] = &factor * BigRational::from_integer(divisor_power_sum(n as u64, k - 1));
    }
    s
}

/// dim M_j(SL₂(ℤ)) for even j ≥ 0; 0 for anything else.
pub fn dim_modular(j: i64) -> usize {
    if j < 0 || j % 2 != 0 {
        return 0;
    }
    let base = (j / 12) as usize;
    if j % 12 == 2 {
        base
    } else {
        base + 1
    }
}

/// dim S_k(SL₂(ℤ)) for even k.
pub fn dim_cusp(k: i64) -> usize {
    if k < 12 || k % 2 != 0 {
        0
    } else {
        dim_modular(k - 12)
    }
}

/// Echelonized basis of M_j: form i is qⁱ + O(q^{dim}).
pub fn modular_basis(j: i64, len: usize) -> Vec<ExactSeries> {
    let dim = dim_modular(j);
    if dim == 0 {
        return Vec::new();
    }
    let c = if j % 4 == 0 { 0 } else { 1 };
    let e4 = eisenstein(4, len);
    let e6 = eisenstein(6, len);
    let delta = euler_product_power(24, len).shift_up(1, len);
    let mut forms: Vec<ExactSeries> = (0..dim)
        .map(|i| {
            let a = (j - 6 * c - 12 * i as i64) / 4;
            debug_assert!(a >= 0);
            delta.pow(i as u32).mul(&e4.pow(a as u32)).mul(&e6.pow(c as u32))
        })
        .collect();
    echelonize(&mut forms);
    forms
}

/// Clears above the diagonal of a list whose i-th entry is qⁱ + O(q^{i+1}),
/// so entry i becomes qⁱ + O(q^{n}) with n the list length.
pub fn echelonize(forms: &mut [ExactSeries]) {
    let dim = forms.len();
    for i in (0..dim).rev() {
        for r in 0..i {
            let f = forms[r].coeffs[i].clone();
            if !f.is_zero() {
                let sub = forms[i].scale(&f);
                forms[r] = ExactSeries {
                    coeffs: forms[r].coeffs.iter().zip(&sub.coeffs).map(|(x, y)| x - y).collect(),
                };
            }
        }
    }
}

impl ExactSeries {
    /// Multiplies by q^k, keeping `len` terms.
    pub fn shift_up(&self, k: usize, len: usize) -> ExactSeries {
        let mut out = Self::zero(len);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k < len {
                out.coeffs[i + k] = c.clone();
            }
        }
        out
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}
