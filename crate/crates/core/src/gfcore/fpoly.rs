//! Dense polynomials over a prime field, coefficient lists constant term first.
//!
//! Only what modulus validation and primitive-element search need: reduction,
//! modular multiplication and exponentiation, and gcd.

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        exp >>= 1;
    }
    acc as u32
}

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo `m` (m nonzero).
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut m = m.to_vec();
    trim(&mut m);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let coef = r[top] * lead_inv % p;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - coef * mi % p) % p;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem(&prod, m, p)
}

pub(crate) fn pow_poly_mod(base: &[u32], mut exp: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let len = a.len().max(b.len());
    let mut out: Vec<u32> = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

/// x^(p^d) mod m, by repeated p-th powering.
fn frobenius_of_x(m: &[u32], p: u32, d: u32) -> Vec<u32> {
    let mut acc = rem(&[0, 1], m, p);
    for _ in 0..d {
        acc = pow_poly_mod(&acc, p as u64, m, p);
    }
    acc
}

pub(crate) fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && prime_factors(n as u64) == vec![n as u64]
}

/// Irreducibility of a monic polynomial of degree `deg`: x^(p^deg) = x mod m, and
/// gcd(x^(p^d) - x, m) = 1 for every proper divisor d of deg.
pub(crate) fn irreducibility_failure(m: &[u32], p: u32) -> Option<String> {
    let deg = (m.len() - 1) as u32;
    if deg == 1 {
        return None;
    }
    let x = rem(&[0, 1], m, p);
    for d in divisors(deg) {
        let fx = frobenius_of_x(m, p, d);
        let diff = sub(&fx, &x, p);
        if d == deg {
            if !diff.is_empty() {
                return Some("x^(p^deg) != x modulo the polynomial".into());
            }
        } else {
            let g = gcd(m, &diff, p);
            if g.len() > 1 {
                return Some(format!("shares a factor with x^(p^{d}) - x"));
            }
        }
    }
    None
}

/// Whether x generates the multiplicative group of F_p[x]/(m); m assumed irreducible.
pub(crate) fn x_is_primitive(m: &[u32], p: u32) -> bool {
    let deg = (m.len() - 1) as u32;
    let order = (p as u64).pow(deg) - 1;
    let x = rem(&[0, 1], m, p);
    if order == 1 {
        return x == vec![1];
    }
    prime_factors(order)
        .into_iter()
        .all(|r| pow_poly_mod(&x, order / r, m, p) != vec![1])
}

/// First monic primitive polynomial of the given degree, scanning the lower
/// coefficients as a base-p integer in increasing order.
pub(crate) fn first_primitive(p: u32, deg: u32) -> Vec<u32> {
    let count = (p as u64).pow(deg);
    for code in 0..count {
        let mut c = code;
        let mut m: Vec<u32> = (0..deg)
            .map(|_| {
                let d = (c % p as u64) as u32;
                c /= p as u64;
                d
            })
            .collect();
        m.push(1);
        if m[0] == 0 {
            continue;
        }
        if irreducibility_failure(&m, p).is_none() && x_is_primitive(&m, p) {
            return m;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibility() {
        // x^2 + 1 over F_3 is irreducible, x^2 + 1 over F_2 is (x+1)^2
        assert!(irreducibility_failure(&[1, 0, 1], 3).is_none());
        assert!(irreducibility_failure(&[1, 0, 1], 2).is_some());
        assert!(irreducibility_failure(&[1, 1, 0, 1], 2).is_none());
        // x^4 + x^2 + 1 = (x^2+x+1)^2 over F_2
        assert!(irreducibility_failure(&[1, 0, 1, 0, 1], 2).is_some());
    }

    #[test]
    fn primitive_search() {
        assert_eq!(first_primitive(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(first_primitive(2, 5), vec![1, 0, 1, 0, 0, 1]);
        // x^2 + 1 over F_3 is irreducible but x has order 4, not 8
        assert!(!x_is_primitive(&[1, 0, 1], 3));
    }
}
