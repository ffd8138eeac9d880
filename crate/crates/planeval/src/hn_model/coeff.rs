use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rat_text, Rat};

/// Coefficient field of an expansion or polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Q,
    Fp(u64),
}

/// Default prime for sampling: 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

impl Field {
    pub fn check(&self) -> Result<()> {
        match self {
            Field::Q => Ok(()),
            Field::Fp(p) if is_prime(*p) => Ok(()),
            Field::Fp(p) => Err(Error::validation(format!("{p} is not prime"))),
        }
    }

    pub fn zero(&self) -> Coeff {
        self.int(0)
    }

    pub fn one(&self) -> Coeff {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Coeff {
        match self {
            Field::Q => Coeff::Q(Rat::from_integer(BigInt::from(n))),
            Field::Fp(p) => Coeff::Fp {
                v: n.rem_euclid(*p as i64) as u64,
                p: *p,
            },
        }
    }

    /// Maps a rational into the field; fails if the denominator vanishes mod p.
    pub fn rat(&self, r: &Rat) -> Result<Coeff> {
        match self {
            Field::Q => Ok(Coeff::Q(r.clone())),
            Field::Fp(p) => {
                let pb = BigInt::from(*p);
                let n = r.numer().mod_floor(&pb).to_u64().expect("reduced below p");
                let d = r.denom().mod_floor(&pb).to_u64().expect("reduced below p");
                if d == 0 {
                    return Err(Error::domain(format!(
                        "denominator of {} vanishes modulo {p}",
                        rat_text(r)
                    )));
                }
                Ok(Coeff::Fp {
                    v: mul_mod(n, pow_mod(d, p - 2, *p), *p),
                    p: *p,
                })
            }
        }
    }

    pub fn text(&self) -> String {
        match self {
            Field::Q => "Q".to_string(),
            Field::Fp(p) => format!("Fp:{p}"),
        }
    }
}

/// An exact field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    Q(Rat),
    Fp { v: u64, p: u64 },
}

impl Coeff {
    pub fn field(&self) -> Field {
        match self {
            Coeff::Q(_) => Field::Q,
            Coeff::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_zero(),
            Coeff::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_one(),
            Coeff::Fp { v, .. } => *v == 1,
        }
    }

    pub fn inv(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coeff::Q(r) => Coeff::Q(r.recip()),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            },
        })
    }

    pub fn pow(&self, e: u32) -> Coeff {
        let mut r = self.field().one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coeff::Q(r) => Some(r),
            Coeff::Fp { .. } => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Coeff::Q(r) if r.is_negative())
    }
}

fn mismatch(a: &Coeff, b: &Coeff) -> ! {
    panic!(
        "coefficients from different fields: {} vs {}",
        a.field().text(),
        b.field().text()
    )
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &'a Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a + b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, p: q }) if p == q => Coeff::Fp {
                v: ((*a as u128 + *b as u128) % *p as u128) as u64,
                p: *p,
            },
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &'a Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &'a Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a * b),
            (Coeff::Fp { v: a, p }, Coeff::Fp { v: b, p: q }) if p == q => Coeff::Fp {
                v: mul_mod(*a, *b, *p),
                p: *p,
            },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::Fp { v, p } => Coeff::Fp {
                v: (p - v) % p,
                p: *p,
            },
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(r) => f.write_str(&rat_text(r)),
            Coeff::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}
