//! Fixed-point decimal arithmetic over `BigInt`.
//!
//! The variable-base construction needs floors of `e^((1+r)^(i-1))` that are
//! stable across platforms, with the working precision chosen by the caller.
//! Binary floats cannot do this once the values outgrow 64 bits, so this
//! module keeps values as `mant * 10^-scale` pairs and implements the handful
//! of operations actually required: ring arithmetic with round-to-nearest,
//! integer powers, `exp`, `ln` of an integer, and `log2`.
//!
//! Accuracy contract: every operation returns a result within a few units in
//! the last place of the exact value, and the transcendental functions stay
//! within `TRANS_ULPS` ulps. Callers pick `scale` with enough guard digits
//! that accumulated error stays far below whatever decision threshold they
//! care about (for base floors that is the `10^-(precision/2)` guard band).

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Worst-case ulp error of `exp`/`ln`/`log2` at any supported scale.
/// Determined by the argument-reduction depth; used by callers when sizing
/// guard bands.
pub const TRANS_ULPS: u64 = 1_000_000; // 10^6 ulps = 6 decimal digits of guard

/// A fixed-point decimal number: `mant * 10^-scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fx {
    mant: BigInt,
    scale: u32,
}

fn pow10(scale: u32) -> BigInt {
    BigInt::from(10u32).pow(scale)
}

/// Round-to-nearest division, ties away from zero. `d` must be positive.
fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    debug_assert!(d.is_positive());
    let two_n = n * 2;
    let num = if n.is_negative() { two_n - d } else { two_n + d };
    num / (d * 2)
}

impl Fx {
    pub fn zero(scale: u32) -> Self {
        Fx {
            mant: BigInt::zero(),
            scale,
        }
    }

    pub fn from_u64(v: u64, scale: u32) -> Self {
        Fx {
            mant: BigInt::from(v) * pow10(scale),
            scale,
        }
    }

    /// `num / den` rounded to `scale` digits.
    pub fn from_ratio(num: u64, den: u64, scale: u32) -> Self {
        assert!(den > 0, "zero denominator");
        Fx {
            mant: div_round(&(BigInt::from(num) * pow10(scale)), &BigInt::from(den)),
            scale,
        }
    }

    /// Parse a plain decimal literal (`-?digits[.digits]`), rounding to `scale`.
    pub fn parse(s: &str, scale: u32) -> Result<Self> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("empty decimal literal {s:?}"),
            });
        }
        for c in int_part.chars().chain(frac_part.chars()) {
            if !c.is_ascii_digit() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("bad decimal literal {s:?}"),
                });
            }
        }
        let digits: String = format!("{int_part}{frac_part}");
        let raw: BigInt = digits.parse().map_err(|_| Error::Parse {
            line: 0,
            msg: format!("bad decimal literal {s:?}"),
        })?;
        let fd = frac_part.len() as u32;
        let mant = if fd <= scale {
            raw * pow10(scale - fd)
        } else {
            div_round(&raw, &pow10(fd - scale))
        };
        Ok(Fx {
            mant: if neg { -mant } else { mant },
            scale,
        })
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn check(&self, rhs: &Fx) {
        assert_eq!(self.scale, rhs.scale, "mixed fixed-point scales");
    }

    pub fn add(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            mant: &self.mant + &rhs.mant,
            scale: self.scale,
        }
    }

    pub fn sub(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            mant: &self.mant - &rhs.mant,
            scale: self.scale,
        }
    }

    pub fn mul(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        Fx {
            mant: div_round(&(&self.mant * &rhs.mant), &pow10(self.scale)),
            scale: self.scale,
        }
    }

    pub fn div(&self, rhs: &Fx) -> Fx {
        self.check(rhs);
        assert!(!rhs.mant.is_zero(), "fixed-point division by zero");
        let num = &self.mant * pow10(self.scale);
        let mant = if rhs.mant.is_negative() {
            -div_round(&-num, &-rhs.mant.clone())
        } else {
            div_round(&num, &rhs.mant)
        };
        Fx {
            mant,
            scale: self.scale,
        }
    }

    /// Divide by a small positive integer.
    fn div_u64(&self, d: u64) -> Fx {
        Fx {
            mant: div_round(&self.mant, &BigInt::from(d)),
            scale: self.scale,
        }
    }

    /// Binary exponentiation with rounding after every multiply.
    pub fn pow_u64(&self, mut e: u64) -> Fx {
        let mut base = self.clone();
        let mut acc = Fx::from_u64(1, self.scale);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Largest integer `<= self`, as a `BigInt`.
    pub fn floor(&self) -> BigInt {
        let p = pow10(self.scale);
        let q = &self.mant / &p;
        // BigInt division truncates toward zero; fix up negatives.
        if self.mant.is_negative() && &q * &p != self.mant {
            q - 1
        } else {
            q
        }
    }

    /// Distance to the nearest integer, in ulps (units of `10^-scale`).
    pub fn ulps_to_nearest_int(&self) -> BigInt {
        let p = pow10(self.scale);
        let frac = ((&self.mant % &p) + &p) % &p;
        let up = &p - &frac;
        frac.min(up)
    }

    /// Lossy conversion for reporting. Saturates to infinity far beyond f64
    /// range rather than panicking.
    pub fn to_f64(&self) -> f64 {
        let neg = self.mant.is_negative();
        let digits = self.mant.magnitude().to_string();
        let len = digits.len() as i64;
        const TOP: usize = 18;
        let head: u64 = digits[..digits.len().min(TOP)].parse().unwrap_or(0);
        let rest = (len - TOP as i64).max(0);
        let exp = rest - self.scale as i64;
        let v = head as f64 * 10f64.powi(exp as i32);
        if neg {
            -v
        } else {
            v
        }
    }

    pub fn cmp_value(&self, rhs: &Fx) -> std::cmp::Ordering {
        self.check(rhs);
        self.mant.cmp(&rhs.mant)
    }


    /// Magnitude of the raw mantissa (test/diagnostic use).
    pub fn ulps_raw(&self) -> num_bigint::BigUint {
        self.mant.magnitude().clone()
    }

    /// Change scale; widening is exact, narrowing rounds to nearest.
    pub fn rescale(&self, new_scale: u32) -> Fx {
        use std::cmp::Ordering;
        let mant = match new_scale.cmp(&self.scale) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant * pow10(new_scale - self.scale),
            Ordering::Less => {
                let d = pow10(self.scale - new_scale);
                if self.mant.is_negative() {
                    -div_round(&-self.mant.clone(), &d)
                } else {
                    div_round(&self.mant, &d)
                }
            }
        };
        Fx {
            mant,
            scale: new_scale,
        }
    }
}

/// `e` truncated to `scale` via its Taylor series (converges very fast).
fn e_const(scale: u32) -> Fx {
    let one = pow10(scale);
    let mut sum = one.clone(); // 1
    let mut term = one; // 1/0!
    let mut n: u64 = 1;
    while !term.is_zero() {
        term = div_round(&term, &BigInt::from(n));
        sum += &term;
        n += 1;
    }
    Fx { mant: sum, scale }
}

/// `exp(f)` for `0 <= f < 1` by halve-square argument reduction plus Taylor.
fn exp_frac(f: &Fx) -> Fx {
    let scale = f.scale;
    debug_assert!(!f.is_negative());
    // f / 2^t keeps the Taylor series short even at large scales.
    let t: u32 = 16;
    let reduced = Fx {
        mant: div_round(&f.mant, &BigInt::from(1u64 << t)),
        scale,
    };
    let one = pow10(scale);
    let mut sum = one.clone();
    let mut term = one;
    let mut n: u64 = 1;
    while !term.is_zero() {
        term = div_round(&(&term * &reduced.mant), &pow10(scale));
        term = div_round(&term, &BigInt::from(n));
        sum += &term;
        n += 1;
    }
    let mut acc = Fx { mant: sum, scale };
    for _ in 0..t {
        acc = acc.mul(&acc);
    }
    acc
}

/// `exp(x)` for `x >= 0`. The integer part must fit in `u32`; callers guard
/// the overall result size before asking.
pub fn exp(x: &Fx) -> Fx {
    assert!(!x.is_negative(), "exp of negative argument not needed");
    let k = x.floor().to_u32().expect("exp argument integer part too large");
    let frac = x.sub(&Fx::from_u64(u64::from(k), x.scale));
    let ef = exp_frac(&frac);
    if k == 0 {
        return ef;
    }
    let ek = e_const(x.scale).pow_u64(u64::from(k));
    ek.mul(&ef)
}

/// `ln 2` via `2 * atanh(1/3)`.
fn ln2(scale: u32) -> Fx {
    let third = Fx::from_ratio(1, 3, scale);
    atanh_small(&third).mul(&Fx::from_u64(2, scale))
}

/// `atanh(z)` for `0 <= z <= 1/3`: `z + z^3/3 + z^5/5 + ...`.
fn atanh_small(z: &Fx) -> Fx {
    let zz = z.mul(z);
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 3;
    loop {
        power = power.mul(&zz);
        if power.mant.is_zero() {
            break;
        }
        sum = sum.add(&power.div_u64(k));
        k += 2;
    }
    sum
}

/// `ln n` for `n >= 1`: write `n = 2^a * t` with `t` in `[1, 2)`, then
/// `a*ln2 + 2*atanh((t-1)/(t+1))`.
pub fn ln_u64(n: u64, scale: u32) -> Fx {
    assert!(n >= 1);
    if n == 1 {
        return Fx::zero(scale);
    }
    let a = 63 - n.leading_zeros(); // floor(log2 n)
    let t = Fx::from_ratio(n, 1u64 << a, scale);
    let one = Fx::from_u64(1, scale);
    let z = t.sub(&one).div(&t.add(&one));
    let ln_t = atanh_small(&z).mul(&Fx::from_u64(2, scale));
    ln2(scale).mul(&Fx::from_u64(u64::from(a), scale)).add(&ln_t)
}

/// `log2 n = ln n / ln 2`.
pub fn log2_u64(n: u64, scale: u32) -> Fx {
    ln_u64(n, scale).div(&ln2(scale))
}
