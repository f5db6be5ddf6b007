use std::fmt;
use std::ops::Mul;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// An element (a b; c d) of SL₂(ℤ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    pub const MINUS_IDENTITY: Self = Self { a: -1, b: 0, c: 0, d: -1 };
    /// S = (0 −1; 1 0).
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0 };
    /// T = (1 1; 0 1).
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1 };
    pub const T_INV: Self = Self { a: 1, b: -1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::NotInGroup { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn t_power(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Möbius action on a complex point (either half-plane).
    pub fn act(&self, z: C64) -> C64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }

    /// The automorphy argument cz + d.
    pub fn j(&self, z: C64) -> C64 {
        z * self.c as f64 + self.d as f64
    }

    pub fn act_cusp(&self, cusp: Cusp) -> Cusp {
        match cusp {
            Cusp::Infinity => Cusp::from_fraction(self.a, self.c),
            Cusp::Rational { num, den } => {
                let p = self.a as i128 * num as i128 + self.b as i128 * den as i128;
                let q = self.c as i128 * num as i128 + self.d as i128 * den as i128;
                Cusp::from_fraction(p as i64, q as i64)
            }
        }
    }

    /// Product of a word in S, T^{±1} equal to ±self, via the Euclidean
    /// algorithm on the first column.
    pub fn decompose_word(&self) -> Word {
        let mut letters = Vec::new();
        let mut g = *self;
        while g.c != 0 {
            // g = T^q · S · g2 with g2 = S⁻¹ T^{-q} g.
            let q = Integer::div_floor(&g.a, &g.c);
            let r = g.a - q * g.c;
            let b1 = g.b - q * g.d;
            if q != 0 {
                letters.push(WordLetter::T(q));
            }
            letters.push(WordLetter::S);
            g = Self { a: g.c, b: g.d, c: -r, d: -b1 };
        }
        // g = ±T^{n}
        let sign = if g.a == 1 { Sign::Plus } else { Sign::Minus };
        let n = g.b * g.a;
        if n != 0 {
            letters.push(WordLetter::T(n));
        }
        Word { letters, sign }
    }
}

/// Parses "a,b,c,d", "I", "-I", or a word in S and T such as "TS" or
/// "-STS"; "t" stands for T⁻¹.
impl std::str::FromStr for GroupElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(',') {
            let e: Vec<i64> = s
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad matrix entry in '{s}'"))))
                .collect::<Result<_>>()?;
            if e.len() != 4 {
                return Err(Error::Parse(format!("matrix '{s}' needs four entries")));
            }
            return Self::new(e[0], e[1], e[2], e[3]);
        }
        let (neg, word) = match s.strip_prefix('-') {
            Some(w) => (true, w),
            None => (false, s),
        };
        let mut g = Self::IDENTITY;
        if word != "I" {
            if word.is_empty() {
                return Err(Error::Parse("empty group element".into()));
            }
            for ch in word.chars() {
                g = g * match ch {
                    'S' => Self::S,
                    'T' => Self::T,
                    't' => Self::T_INV,
                    _ => return Err(Error::Parse(format!("unknown generator '{ch}' in '{s}'"))),
                };
            }
        }
        Ok(if neg { g.neg() } else { g })
    }
}

impl TryFrom<[i64; 4]> for GroupElement {
    type Error = Error;
    fn try_from(e: [i64; 4]) -> Result<Self> {
        Self::new(e[0], e[1], e[2], e[3])
    }
}

impl From<GroupElement> for [i64; 4] {
    fn from(g: GroupElement) -> Self {
        g.entries()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    S,
    T,
    TInv,
}

impl Generator {
    pub fn element(self) -> GroupElement {
        match self {
            Generator::S => GroupElement::S,
            Generator::T => GroupElement::T,
            Generator::TInv => GroupElement::T_INV,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Run-length letter of a word: S or a power of T.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordLetter {
    S,
    T(i64),
}

/// A word with product `sign · letters[0] · letters[1] ⋯`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub letters: Vec<WordLetter>,
    pub sign: Sign,
}

impl Word {
    /// Generators one at a time, T-powers expanded into T or T⁻¹ repeats.
    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().flat_map(|l| {
            let (g, n) = match *l {
                WordLetter::S => (Generator::S, 1),
                WordLetter::T(k) if k > 0 => (Generator::T, k as u64),
                WordLetter::T(k) => (Generator::TInv, k.unsigned_abs()),
            };
            std::iter::repeat(g).take(n as usize)
        })
    }

    /// Product of the letters, without the sign.
    pub fn product(&self) -> GroupElement {
        self.letters.iter().fold(GroupElement::IDENTITY, |acc, l| match *l {
            WordLetter::S => acc * GroupElement::S,
            WordLetter::T(k) => acc * GroupElement::t_power(k),
        })
    }

    /// sign · product, which equals the decomposed element.
    pub fn element(&self) -> GroupElement {
        let p = self.product();
        match self.sign {
            Sign::Plus => p,
            Sign::Minus => p.neg(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters
            .iter()
            .map(|l| match *l {
                WordLetter::S => 1,
                WordLetter::T(k) => k.unsigned_abs() as usize,
            })
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// A cusp of SL₂(ℤ): ∞ or a reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cusp {
    Infinity,
    Rational { num: i64, den: i64 },
}

impl Cusp {
    pub fn from_fraction(p: i64, q: i64) -> Cusp {
        if q == 0 {
            return Cusp::Infinity;
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Cusp::Rational { num: p, den: q }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Cusp::Infinity => None,
            Cusp::Rational { num, den } => Some(num as f64 / den as f64),
        }
    }

    /// An element σ with σ·∞ = self.
    pub fn scaling(&self) -> GroupElement {
        match *self {
            Cusp::Infinity => GroupElement::IDENTITY,
            Cusp::Rational { num, den } => {
                // num·d − b·den = 1
                let e = num.extended_gcd(&den);
                debug_assert_eq!(e.gcd, 1);
                GroupElement { a: num, b: -e.y, c: den, d: e.x }
            }
        }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "oo"),
            Cusp::Rational { num, den: 1 } => write!(f, "{num}"),
            Cusp::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_elements() {
        assert_eq!("TS".parse::<GroupElement>().unwrap(), GroupElement::T * GroupElement::S);
        assert_eq!("-I".parse::<GroupElement>().unwrap(), GroupElement::MINUS_IDENTITY);
        assert_eq!("Tt".parse::<GroupElement>().unwrap(), GroupElement::IDENTITY);
        assert_eq!("2,1,1,1".parse::<GroupElement>().unwrap(), GroupElement::new(2, 1, 1, 1).unwrap());
        assert!("1,1,1,1".parse::<GroupElement>().is_err());
        assert!("SX".parse::<GroupElement>().is_err());
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(GroupElement::new(2, 0, 0, 1).is_err());
        assert!(GroupElement::new(2, 1, 1, 1).is_ok());
    }

    #[test]
    fn generators_decompose_to_themselves() {
        let w = GroupElement::T.decompose_word();
        assert_eq!(w.letters, vec![WordLetter::T(1)]);
        assert_eq!(w.sign, Sign::Plus);
        let w = GroupElement::S.decompose_word();
        assert_eq!(w.letters, vec![WordLetter::S]);
        assert_eq!(w.sign, Sign::Plus);
    }

    #[test]
    fn minus_identity_is_sign_only() {
        let w = GroupElement::MINUS_IDENTITY.decompose_word();
        assert!(w.is_empty());
        assert_eq!(w.sign, Sign::Minus);
    }

    #[test]
    fn small_elements_multiply_back() {
        for a in -50i64..=50 {
            for c in -50i64..=50 {
                if a.gcd(&c) != 1 {
                    continue;
                }
                let e = a.extended_gcd(&c);
                // a·x + c·y = 1  ⇒  (a −y; c x)
                let g = GroupElement::new(a, -e.y, c, e.x).unwrap();
                let w = g.decompose_word();
                let p = w.product();
                let back = if w.sign == Sign::Plus { p } else { p.neg() };
                assert_eq!(back, g, "{g}");
                let expanded = w
                    .generators()
                    .fold(GroupElement::IDENTITY, |acc, x| acc * x.element());
                assert_eq!(expanded, p);
            }
        }
    }

    #[test]
    fn scaling_matrix_maps_infinity() {
        for (p, q) in [(0, 1), (1, 2), (-3, 7), (5, 3)] {
            let c = Cusp::from_fraction(p, q);
            assert_eq!(c.scaling().act_cusp(Cusp::Infinity), c);
        }
        assert_eq!(GroupElement::S.act_cusp(Cusp::Infinity), Cusp::from_fraction(0, 1));
    }
}
