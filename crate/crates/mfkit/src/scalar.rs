//! Exact scalar arithmetic: arbitrary-precision rationals and prime fields.
//!
//! Rationals are the default everywhere; prime fields exist as a cross-check
//! accelerator and are never used by the acceptance-level computations.
//!
//! Machine integers act as a fast path: a rational value is stored as `Int`
//! whenever it is an integer fitting in `i64`, and every operation that
//! overflows (or leaves the integers) promotes to `BigRational` exactly.
//! The representation is canonical, so derived equality and hashing are
//! sound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Coefficient field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    /// The rationals (characteristic zero).
    Char0,
    /// The prime field `F_p`.
    Prime(u64),
}

impl Field {
    pub fn zero(&self) -> Scalar {
        match self {
            Field::Char0 => Scalar::Int(0),
            Field::Prime(p) => Scalar::Fp { p: *p, val: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Char0 => Scalar::Int(1),
            Field::Prime(p) => Scalar::Fp { p: *p, val: 1 },
        }
    }

    /// Image of the integer `n` in the field.
    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Char0 => Scalar::Int(n),
            Field::Prime(p) => Scalar::Fp {
                p: *p,
                val: n.rem_euclid(*p as i64) as u64,
            },
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Char0 => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact field element.
///
/// Canonical form: characteristic-zero integers fitting `i64` are `Int`;
/// `Rat` holds everything else, in lowest terms with positive denominator
/// (the invariant `num-rational` maintains); `Fp` values lie in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(i64),
    Rat(BigRational),
    Fp { p: u64, val: u64 },
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Modular inverse by extended Euclid. Panics on non-invertible input.
fn invmod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "{a} is not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

/// Renormalizes a big rational into canonical form.
fn norm(r: BigRational) -> Scalar {
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return Scalar::Int(i);
        }
    }
    Scalar::Rat(r)
}

fn to_big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Int(_) | Scalar::Rat(_) => Field::Char0,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::Int(n)
    }

    /// Exact rational `n/d` (panics if `d == 0`).
    pub fn from_ratio(n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        norm(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Int(n) => *n == 0,
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Int(n) => *n == 1,
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { val, .. } => *val == 1,
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Int(n) => match n.checked_neg() {
                Some(m) => Scalar::Int(m),
                None => norm(-to_big(*n)),
            },
            Scalar::Rat(r) => norm(-r),
            Scalar::Fp { p, val } => Scalar::Fp {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match a.checked_add(*b) {
                Some(s) => Scalar::Int(s),
                None => norm(to_big(*a) + to_big(*b)),
            },
            (Scalar::Int(a), Scalar::Rat(b)) => norm(to_big(*a) + b),
            (Scalar::Rat(a), Scalar::Int(b)) => norm(a + to_big(*b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => norm(a + b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { p: q, val: b }) if p == q => Scalar::Fp {
                p: *p,
                val: (a + b) % p,
            },
            _ => panic!(
                "scalar field mismatch: {:?} vs {:?}",
                self.field(),
                other.field()
            ),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match a.checked_sub(*b) {
                Some(s) => Scalar::Int(s),
                None => norm(to_big(*a) - to_big(*b)),
            },
            _ => self.add(&other.neg()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match a.checked_mul(*b) {
                Some(s) => Scalar::Int(s),
                None => norm(to_big(*a) * to_big(*b)),
            },
            (Scalar::Int(a), Scalar::Rat(b)) => norm(to_big(*a) * b),
            (Scalar::Rat(a), Scalar::Int(b)) => norm(a * to_big(*b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => norm(a * b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { p: q, val: b }) if p == q => Scalar::Fp {
                p: *p,
                val: mulmod(*a, *b, *p),
            },
            _ => panic!(
                "scalar field mismatch: {:?} vs {:?}",
                self.field(),
                other.field()
            ),
        }
    }

    /// Exact division (panics on division by zero).
    pub fn div(&self, other: &Scalar) -> Scalar {
        assert!(!other.is_zero(), "division by zero");
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => match (a.checked_rem(*b), a.checked_div(*b)) {
                (Some(0), Some(q)) => Scalar::Int(q),
                _ => norm(BigRational::new(BigInt::from(*a), BigInt::from(*b))),
            },
            (Scalar::Int(a), Scalar::Rat(b)) => norm(to_big(*a) / b),
            (Scalar::Rat(a), Scalar::Int(b)) => norm(a / to_big(*b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => norm(a / b),
            (Scalar::Fp { p, val: a }, Scalar::Fp { p: q, val: b }) if p == q => Scalar::Fp {
                p: *p,
                val: mulmod(*a, invmod(*b, *p), *p),
            },
            _ => panic!(
                "scalar field mismatch: {:?} vs {:?}",
                self.field(),
                other.field()
            ),
        }
    }

    pub fn inv(&self) -> Scalar {
        self.field().one().div(self)
    }

    /// Size proxy for pivot heuristics: bit length of numerator plus
    /// denominator.
    pub fn bit_size(&self) -> u64 {
        match self {
            Scalar::Int(n) => 64 - n.unsigned_abs().leading_zeros() as u64 + 1,
            Scalar::Rat(r) => (r.numer().bits() + r.denom().bits()).max(1),
            Scalar::Fp { .. } => 1,
        }
    }

    pub fn abs_is_one(&self) -> bool {
        match self {
            Scalar::Int(n) => *n == 1 || *n == -1,
            Scalar::Rat(_) => false, // canonical form: units are Int
            Scalar::Fp { .. } => false,
        }
    }

    /// True for negative rationals; prime-field values are never negative.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Int(n) => *n < 0,
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(n) => write!(f, "{n}"),
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}
