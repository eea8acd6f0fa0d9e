//! Arithmetic in `F_(p^h)` for the Bose–Chowla construction.
//!
//! Elements are coefficient vectors of length `h` (degree < h polynomials
//! over `F_p`), reduced modulo a monic irreducible polynomial found by
//! deterministic search. Sizes are tiny by construction (`p^h <= 10^7`), so
//! everything is plain schoolbook arithmetic on `u64` coefficients.

/// A prime-power field `F_(p^h)` with `h >= 2`.
pub struct Field {
    p: u64,
    h: usize,
    /// Low coefficients of the monic irreducible modulus:
    /// `f = x^h + modulus[h-1] x^(h-1) + ... + modulus[0]`.
    modulus: Vec<u64>,
}

pub type Element = Vec<u64>;

impl Field {
    pub fn new(p: u64, h: u32) -> Field {
        let h = h as usize;
        let modulus = find_irreducible(p, h);
        Field { p, h, modulus }
    }

    pub fn zero(&self) -> Element {
        vec![0; self.h]
    }

    pub fn one(&self) -> Element {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    /// The element `x`.
    pub fn x(&self) -> Element {
        let mut e = self.zero();
        e[1] = 1;
        e
    }

    pub fn is_zero(&self, a: &Element) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, a: &Element) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }

    pub fn element_from_counter(&self, mut c: u64) -> Element {
        let mut e = self.zero();
        for slot in e.iter_mut() {
            *slot = c % self.p;
            c /= self.p;
        }
        e
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let h = self.h;
        let p = self.p;
        let mut buf = vec![0u64; 2 * h - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                buf[i + j] = (buf[i + j] + ai * bj) % p;
            }
        }
        // x^h = -(modulus), applied from the top down
        for k in (h..2 * h - 1).rev() {
            let c = buf[k];
            if c == 0 {
                continue;
            }
            buf[k] = 0;
            for (j, &mj) in self.modulus.iter().enumerate() {
                if mj != 0 {
                    buf[k - h + j] = (buf[k - h + j] + c * (p - mj)) % p;
                }
            }
        }
        buf.truncate(h);
        buf
    }

    pub fn pow(&self, a: &Element, mut e: u64) -> Element {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplicative group order `p^h - 1`.
    pub fn group_order(&self) -> u64 {
        self.p.pow(self.h as u32) - 1
    }

    /// A generator of the multiplicative group, by deterministic search.
    pub fn generator(&self) -> Element {
        let n = self.group_order();
        let prime_factors = distinct_prime_factors(n);
        // Constants generate at most F_p*, never the full group when h >= 2,
        // so start the counter past them.
        for c in self.p..=n {
            let cand = self.element_from_counter(c);
            if self.is_zero(&cand) {
                continue;
            }
            let is_gen = prime_factors
                .iter()
                .all(|&q| !self.is_one(&self.pow(&cand, n / q)));
            if is_gen {
                return cand;
            }
        }
        unreachable!("F_(p^h)* is cyclic; a generator always exists");
    }
}

/// Exponents `a` in `[1, p^h - 1]` with `theta^a - theta` in the prime
/// subfield, where `theta` generates `F_(p^h)*`. This is the Bose–Chowla
/// B_h[1] set before translation; it has exactly `p` members.
pub fn bose_chowla_exponents(p: u64, h: u32) -> Vec<u64> {
    let field = Field::new(p, h);
    let theta = field.generator();
    let n = field.group_order();
    let mut hits = Vec::with_capacity(p as usize);
    let mut cur = theta.clone();
    for a in 1..n {
        if cur[1..] == theta[1..] {
            hits.push(a);
        }
        cur = field.mul(&cur, &theta);
    }
    hits
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- modulus search -------------------------------------------------------

/// Polynomials over F_p as dense low-to-high coefficient vectors with no
/// trailing zeros; used only while hunting for an irreducible modulus.
fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db], p);
    while a.len() > db {
        let da = a.len() - 1;
        let coef = a[da] % p;
        if coef != 0 {
            let factor = coef * lead_inv % p;
            for (j, &bj) in b.iter().enumerate() {
                let idx = da - db + j;
                a[idx] = (a[idx] + (p - bj * factor % p)) % p;
            }
        }
        a.pop();
        a = poly_trim(a);
        if a.is_empty() {
            break;
        }
    }
    a
}

fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    a = poly_trim(a);
    b = poly_trim(b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    pow_mod(a % p, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        e >>= 1;
        b = b * b % m;
    }
    acc
}

/// `x^(p^k) mod f` by square-and-multiply in the quotient ring.
fn x_pow_p_k(f_low: &[u64], p: u64, h: usize, k: u32) -> Vec<u64> {
    let field = Field {
        p,
        h,
        modulus: f_low.to_vec(),
    };
    let mut acc = field.x();
    // exponent p^k fits u64 because p^h <= 10^7
    let e = p.pow(k);
    acc = field.pow(&acc, e);
    acc
}

/// Monic degree-h polynomial irreducibility over F_p:
/// `x^(p^h) == x (mod f)` and `gcd(x^(p^(h/d)) - x, f) = 1` for each prime
/// divisor `d` of `h`.
fn is_irreducible(f_low: &[u64], p: u64, h: usize) -> bool {
    if f_low[0] == 0 {
        return false; // divisible by x
    }
    let frob_top = x_pow_p_k(f_low, p, h, h as u32);
    let field = Field {
        p,
        h,
        modulus: f_low.to_vec(),
    };
    let x = field.x();
    if frob_top != x {
        return false;
    }
    let mut f_full = f_low.to_vec();
    f_full.push(1); // monic closure for gcd arithmetic
    for d in distinct_prime_factors(h as u64) {
        let sub = x_pow_p_k(f_low, p, h, (h as u64 / d) as u32);
        // x^(p^(h/d)) - x as a plain polynomial
        let mut diff = sub.clone();
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(f_full.clone(), poly_trim(diff), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn find_irreducible(p: u64, h: usize) -> Vec<u64> {
    let total = p.pow(h as u32);
    for counter in 0..total {
        let mut low = vec![0u64; h];
        let mut c = counter;
        for slot in low.iter_mut() {
            *slot = c % p;
            c /= p;
        }
        if is_irreducible(&low, p, h) {
            return low;
        }
    }
    unreachable!("an irreducible polynomial of degree h >= 2 always exists over F_p");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_basics() {
        // Only irreducible monic quadratic over F_2 is x^2 + x + 1.
        let f = Field::new(2, 2);
        assert_eq!(f.modulus, vec![1, 1]);
        let x = f.x();
        let x2 = f.mul(&x, &x); // x^2 = x + 1
        assert_eq!(x2, vec![1, 1]);
        assert!(f.is_one(&f.pow(&x, 3)));
    }

    #[test]
    fn generator_has_full_order() {
        for (p, h) in [(2u64, 2u32), (3, 2), (5, 2), (3, 3), (2, 4)] {
            let f = Field::new(p, h);
            let g = f.generator();
            let n = f.group_order();
            assert!(f.is_one(&f.pow(&g, n)));
            for q in distinct_prime_factors(n) {
                assert!(!f.is_one(&f.pow(&g, n / q)), "p={p} h={h} q={q}");
            }
        }
    }

    #[test]
    fn exponent_walk_yields_p_hits() {
        for (p, h) in [(2u64, 2u32), (3, 2), (5, 2), (7, 2), (3, 3), (2, 3)] {
            let hits = bose_chowla_exponents(p, h);
            assert_eq!(hits.len(), p as usize, "p={p} h={h}");
            assert_eq!(hits[0], 1, "theta^1 - theta = 0 is always a hit");
        }
    }

    #[test]
    fn prime_factorization_helper() {
        assert_eq!(distinct_prime_factors(24), vec![2, 3]);
        assert_eq!(distinct_prime_factors(1), Vec::<u64>::new());
        assert_eq!(distinct_prime_factors(9_999_991), vec![9_999_991]);
    }
}
