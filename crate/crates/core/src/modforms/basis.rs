use num_rational::Ratio;

use crate::algebra::{HalfInteger, MultiplierSpec};
use crate::{Error, Result, C64};

use super::exact::{echelonize, euler_product_power, modular_basis, ExactSeries};
use super::forms::{CuspForm, QSeries};

/// Default number of stored q-expansion coefficients.
pub const DEFAULT_LEN: usize = 200;

fn to_complex(s: &ExactSeries) -> Vec<C64> {
    s.to_f64().into_iter().map(|x| C64::new(x, 0.0)).collect()
}

/// q-expansion of ηᴺ with κ = N/24 (κ = 1 and the Δ expansion for N = 24).
pub fn eta_qseries(n: u8, len: usize) -> QSeries {
    let p = euler_product_power(n as u32, len);
    let kappa = if n % 24 == 0 { Ratio::from_integer((n / 24) as i64) } else { Ratio::new(n as i64, 24) };
    QSeries::new(kappa, to_complex(&p))
}

/// Weight j of the holomorphic factor in S_k(εʳ) = ηʳ M_j, when it exists.
fn eta_cofactor_weight(weight: HalfInteger, residue: u8) -> Option<i64> {
    let r = residue as i64;
    let r_eff = if r == 0 { 24 } else { r };
    let twice_j = weight.twice() as i64 - r_eff;
    if twice_j < 0 || twice_j % 4 != 0 {
        return None;
    }
    Some(twice_j / 2)
}

/// dim S_k(SL₂(ℤ), εʳ) for the supported multiplier family.
pub fn cusp_space_dim(weight: HalfInteger, multiplier: MultiplierSpec) -> usize {
    match eta_cofactor_weight(weight, multiplier.residue()) {
        Some(j) => super::exact::dim_modular(j),
        None => 0,
    }
}

/// Echelonized basis of S_k(SL₂(ℤ), εʳ) = ηʳ·M_{k−r/2} (Δ·M_{k−12} when r = 0).
/// Form i has expansion q^{i+κ} + O(q^{d+κ}), d the dimension.
pub fn cusp_space_basis(weight: HalfInteger, multiplier: MultiplierSpec, len: usize) -> Vec<CuspForm> {
    let multiplier = MultiplierSpec::from_eta_count(multiplier.eta_count());
    let r = multiplier.residue();
    let Some(j) = eta_cofactor_weight(weight, r) else {
        return Vec::new();
    };
    let r_eff = if r == 0 { 24 } else { r as u32 };
    let eta = euler_product_power(r_eff, len);
    let kappa = if r == 0 { Ratio::from_integer(1) } else { Ratio::new(r as i64, 24) };
    let shifted = HalfInteger::from_twice(weight.twice() - 4);
    let mut products: Vec<ExactSeries> = modular_basis(j, len).iter().map(|m| eta.mul(m)).collect();
    echelonize(&mut products);
    products
        .iter()
        .map(|p| {
            let coeffs = to_complex(p);
            CuspForm::new(shifted, multiplier, QSeries::new(kappa, coeffs)).expect("basis form is of eta type")
        })
        .collect()
}

/// Echelon basis of S_k(SL₂(ℤ)); empty for odd k or k < 12.
pub fn level_one_basis(k: i64, len: usize) -> Vec<CuspForm> {
    if k < 12 || k % 2 != 0 {
        return Vec::new();
    }
    cusp_space_basis(HalfInteger::from_int(k as i32), MultiplierSpec::Trivial, len)
}

pub fn delta(len: usize) -> CuspForm {
    level_one_basis(12, len).remove(0).with_name("delta")
}

/// The weight-16 cusp form ΔE₄.
pub fn g16(len: usize) -> CuspForm {
    level_one_basis(16, len).remove(0).with_name("g16")
}

/// ηᴺ as a cusp form of weight N/2.
pub fn eta_power_form(n: u8, len: usize) -> Result<CuspForm> {
    if !(1..=24).contains(&n) {
        return Err(Error::InvalidLetterSpec(format!("eta power must be in 1..=24, got {n}")));
    }
    let f = CuspForm::new(
        HalfInteger::from_twice(n as i32 - 4),
        MultiplierSpec::eta_power(n),
        eta_qseries(n, len),
    )?;
    Ok(f.with_name(format!("eta{n}")))
}

/// Forms by name: `delta`, `g16`, `etaN`, `sK` (first echelon form of weight K)
/// or `sK_I` (I-th echelon form, 1-based).
pub fn named_form(name: &str, len: usize) -> Result<CuspForm> {
    let bad = || Error::Parse(format!("unknown form '{name}'"));
    match name {
        "delta" => return Ok(delta(len)),
        "g16" => return Ok(g16(len)),
        _ => {}
    }
    if let Some(n) = name.strip_prefix("eta") {
        let n: u8 = n.parse().map_err(|_| bad())?;
        return eta_power_form(n, len);
    }
    if let Some(rest) = name.strip_prefix('s') {
        let (k, i) = match rest.split_once('_') {
            Some((k, i)) => (k, i.parse::<usize>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let k: i64 = k.parse().map_err(|_| bad())?;
        let basis = level_one_basis(k, len);
        if i == 0 || i > basis.len() {
            return Err(Error::Parse(format!("S_{k} has dimension {}, no form {i}", basis.len())));
        }
        return Ok(basis[i - 1].clone().with_name(name));
    }
    Err(bad())
}
