use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A multiple of 1/2, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const ZERO: Self = HalfInteger(0);

    pub fn from_twice(twice: i32) -> Self {
        HalfInteger(twice)
    }

    pub fn from_int(n: i32) -> Self {
        HalfInteger(2 * n)
    }

    /// Parses a real number that must be a multiple of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if (t - t.round()).abs() > 1e-9 {
            return Err(Error::Unsupported(format!("weight {x} is not a multiple of 1/2")));
        }
        Ok(HalfInteger(t.round() as i32))
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, o: Self) -> Self {
        HalfInteger(self.0 + o.0)
    }
}

impl std::iter::Sum for HalfInteger {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(HalfInteger::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Multiplier system attached to a letter or a cusp-form space.
///
/// `EtaPower(n)` is the multiplier of ηⁿ; only the residue of n mod 24
/// matters for the multiplier itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MultiplierSpec {
    Trivial,
    EtaPower {
        #[serde(rename = "N")]
        n: u8,
    },
}

impl MultiplierSpec {
    pub fn eta_power(n: u8) -> Self {
        MultiplierSpec::EtaPower { n }
    }

    /// Number of η factors contributing to the multiplier.
    pub fn eta_count(self) -> u32 {
        match self {
            MultiplierSpec::Trivial => 0,
            MultiplierSpec::EtaPower { n } => n as u32,
        }
    }

    /// Canonical form of ε^m: `Trivial` for m ≡ 0 mod 24, else `EtaPower(m mod 24)`.
    pub fn from_eta_count(m: u32) -> Self {
        match m % 24 {
            0 => MultiplierSpec::Trivial,
            r => MultiplierSpec::EtaPower { n: r as u8 },
        }
    }

    /// Residue of the η count mod 24; equal residues give equal multipliers.
    pub fn residue(self) -> u8 {
        (self.eta_count() % 24) as u8
    }
}

/// One letter A_j: a shifted weight w_j (weight w_j + 2) and a multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    shifted_weight: HalfInteger,
    multiplier: MultiplierSpec,
}

impl Letter {
    /// Trivial multiplier; `w` must be an even integer ≥ 0.
    pub fn trivial(w: i32) -> Result<Self> {
        if w < 0 || w % 2 != 0 {
            return Err(Error::InvalidLetterSpec(format!(
                "trivial multiplier needs an even shifted weight >= 0, got {w}"
            )));
        }
        Ok(Letter { shifted_weight: HalfInteger::from_int(w), multiplier: MultiplierSpec::Trivial })
    }

    /// Multiplier of ηᴺ with shifted weight N/2 − 2.
    pub fn eta_power(n: u8) -> Result<Self> {
        if !(1..=24).contains(&n) {
            return Err(Error::InvalidLetterSpec(format!("eta power must be in 1..=24, got {n}")));
        }
        Ok(Letter {
            shifted_weight: HalfInteger::from_twice(n as i32 - 4),
            multiplier: MultiplierSpec::EtaPower { n },
        })
    }

    pub fn new(shifted_weight: HalfInteger, multiplier: MultiplierSpec) -> Result<Self> {
        match multiplier {
            MultiplierSpec::Trivial => {
                if !shifted_weight.is_integer() {
                    return Err(Error::InvalidLetterSpec(format!(
                        "trivial multiplier needs an even shifted weight, got {shifted_weight}"
                    )));
                }
                Letter::trivial(shifted_weight.twice() / 2)
            }
            MultiplierSpec::EtaPower { n } => {
                let l = Letter::eta_power(n)?;
                if l.shifted_weight != shifted_weight {
                    return Err(Error::InvalidLetterSpec(format!(
                        "eta power {n} forces shifted weight {}, got {shifted_weight}",
                        l.shifted_weight
                    )));
                }
                Ok(l)
            }
        }
    }

    pub fn shifted_weight(&self) -> HalfInteger {
        self.shifted_weight
    }

    pub fn multiplier(&self) -> MultiplierSpec {
        self.multiplier
    }
}

impl FromStr for Letter {
    type Err = Error;

    /// `trivial:W` or `eta:N`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("letter '{s}': expected trivial:W or eta:N")))?;
        let n: i32 = arg.trim().parse().map_err(|_| Error::Parse(format!("letter '{s}': bad number")))?;
        match kind.trim() {
            "trivial" => Letter::trivial(n),
            "eta" => {
                let n = u8::try_from(n).map_err(|_| Error::InvalidLetterSpec(format!("eta power {n}")))?;
                Letter::eta_power(n)
            }
            other => Err(Error::Parse(format!("unknown letter kind '{other}'"))),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.multiplier {
            MultiplierSpec::Trivial => write!(f, "trivial:{}", self.shifted_weight),
            MultiplierSpec::EtaPower { n } => write!(f, "eta:{n}"),
        }
    }
}

/// The fixed choice of ℓ letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet {
    letters: Vec<Letter>,
}

impl Alphabet {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidLetterSpec("alphabet needs at least one letter".into()));
        }
        Ok(Alphabet { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, index: usize) -> Result<&Letter> {
        self.letters.get(index).ok_or(Error::InvalidLetter { index, len: self.letters.len() })
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        for &i in m.letters() {
            self.letter(i)?;
        }
        Ok(())
    }

    /// w(m) = Σ w_{m_i}, exactly.
    pub fn weight_of(&self, m: &Monomial) -> Result<HalfInteger> {
        self.check(m)?;
        Ok(m.letters().iter().map(|&i| self.letters[i].shifted_weight).sum())
    }

    /// w(m) as a real number.
    pub fn mono_weight(&self, m: &Monomial) -> Result<f64> {
        Ok(self.weight_of(m)?.value())
    }

    /// Total η count of the multiplier v(m) = Π v_{m_i}.
    pub fn eta_count_of(&self, m: &Monomial) -> Result<u32> {
        self.check(m)?;
        Ok(m.letters().iter().map(|&i| self.letters[i].multiplier.eta_count()).sum())
    }

    /// Canonical multiplier v(m).
    pub fn multiplier_of(&self, m: &Monomial) -> Result<MultiplierSpec> {
        Ok(MultiplierSpec::from_eta_count(self.eta_count_of(m)?))
    }
}

impl FromStr for Alphabet {
    type Err = Error;

    /// Comma-separated letters, e.g. `trivial:10,trivial:14` or `eta:4`.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s.split(',').map(str::parse).collect::<Result<Vec<Letter>>>()?;
        Alphabet::new(letters)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A word A_{m_1}⋯A_{m_d} in the letters; letter indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Monomial(letters)
    }

    pub fn letter(i: usize) -> Self {
        Monomial(vec![i])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    /// All ordered factorisations into `parts` nonempty consecutive pieces.
    pub fn splittings(&self, parts: usize) -> Vec<Vec<Monomial>> {
        fn rec(word: &[usize], parts: usize, acc: &mut Vec<Monomial>, out: &mut Vec<Vec<Monomial>>) {
            if parts == 0 {
                if word.is_empty() {
                    out.push(acc.clone());
                }
                return;
            }
            for cut in 1..=word.len() {
                acc.push(Monomial(word[..cut].to_vec()));
                rec(&word[cut..], parts - 1, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        rec(&self.0, parts, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "A{}", i + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::empty());
        }
        s.split('*')
            .map(|p| {
                let p = p.trim();
                p.strip_prefix('A')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .map(|n| n - 1)
                    .ok_or_else(|| Error::Parse(format!("bad monomial factor '{p}' in '{s}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
