//! Exact scalar rings.
//!
//! Two scalar domains are used throughout the crate:
//!
//! * [`QScalar`] — elements of ℚ[u]/(u⁴ − p) for a fixed prime p, where
//!   u = p^{1/4}.  For q = pᵉ this field contains q^{1/4} = uᵉ, the square
//!   root v = q^{1/2} = u^{2e}, and all the fractional powers of q the twisted
//!   Hall algebra needs.  (u⁴ − p is irreducible over ℚ by Eisenstein, so this
//!   really is a field — unlike ℚ[x]/(x⁴ − q) when q is a perfect square.)
//! * [`RatFun`] — the rational function field ℚ(v) with integer-normalized
//!   numerator/denominator, the coefficient field of the quantum algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// A prime power q = pᵉ, the cardinality of the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    p: u64,
    e: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimePower {
    /// Build q = pᵉ; panics unless p is prime and e ≥ 1.
    pub fn new(p: u64, e: u32) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        assert!(e >= 1, "exponent must be at least 1");
        PrimePower { p, e }
    }

    /// Parse a prime power from its value: 4 → 2², 9 → 3², primes as themselves.
    pub fn from_q(q: u64) -> Option<Self> {
        for p in 2..=q {
            if !is_prime(p) {
                continue;
            }
            let mut v = q;
            let mut e = 0;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            if v == 1 && e >= 1 {
                return Some(PrimePower::new(p, e));
            }
            if q % p == 0 {
                return None;
            }
        }
        None
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// The cardinality q = pᵉ.
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q())
    }
}

fn big(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

/// An element of ℚ[u]/(u⁴ − p): c₀ + c₁u + c₂u² + c₃u³ with u = p^{1/4}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QScalar {
    ctx: PrimePower,
    c: [BigRational; 4],
}

impl QScalar {
    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn zero(ctx: PrimePower) -> Self {
        QScalar {
            ctx,
            c: [big(0), big(0), big(0), big(0)],
        }
    }

    pub fn one(ctx: PrimePower) -> Self {
        QScalar::from_int(ctx, 1)
    }

    pub fn from_int(ctx: PrimePower, n: i64) -> Self {
        QScalar::from_rational(ctx, big(n))
    }

    pub fn from_bigint(ctx: PrimePower, n: BigInt) -> Self {
        QScalar::from_rational(ctx, BigRational::from_integer(n))
    }

    pub fn from_rational(ctx: PrimePower, r: BigRational) -> Self {
        QScalar {
            ctx,
            c: [r, big(0), big(0), big(0)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The rational part, provided the u¹, u², u³ components vanish.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero() {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// u^k for any integer k (u⁻¹ = u³/p).
    pub fn u_pow(ctx: PrimePower, k: i64) -> Self {
        let r = k.rem_euclid(4) as usize;
        let m = (k - r as i64) / 4; // k = 4m + r
        let p = BigRational::from_integer(BigInt::from(ctx.p));
        let mut scale = BigRational::one();
        if m >= 0 {
            for _ in 0..m {
                scale *= &p;
            }
        } else {
            for _ in 0..(-m) {
                scale /= &p;
            }
        }
        let mut c = [big(0), big(0), big(0), big(0)];
        c[r] = scale;
        QScalar { ctx, c }
    }

    /// v^k where v = q^{1/2} = u^{2e}.
    pub fn v_pow(ctx: PrimePower, k: i64) -> Self {
        QScalar::u_pow(ctx, 2 * ctx.e as i64 * k)
    }

    /// q^k as an exact rational scalar.
    pub fn q_pow(ctx: PrimePower, k: i64) -> Self {
        QScalar::u_pow(ctx, 4 * ctx.e as i64 * k)
    }

    /// q − 1 as a scalar; ubiquitous in automorphism counts.
    pub fn q_minus_one(ctx: PrimePower) -> Self {
        QScalar::from_int(ctx, ctx.q() as i64 - 1)
    }

    pub fn inverse(&self) -> QScalar {
        assert!(!self.is_zero(), "division by zero in QScalar");
        // Solve (self) · x = 1 as a 4×4 linear system over ℚ in the basis
        // {1, u, u², u³}; column j of the matrix is self · u^j.
        let mut m = vec![vec![BigRational::zero(); 5]; 4];
        for j in 0..4 {
            let col = self * &QScalar::u_pow(self.ctx, j as i64);
            for i in 0..4 {
                m[i][j] = col.c[i].clone();
            }
        }
        m[0][4] = BigRational::one();
        // Gaussian elimination with exact rationals.
        let mut row = 0;
        let mut pivots = [usize::MAX; 4];
        for col in 0..4 {
            if let Some(r) = (row..4).find(|&r| !m[r][col].is_zero()) {
                m.swap(row, r);
                let inv = m[row][col].recip();
                for x in m[row].iter_mut() {
                    *x *= &inv;
                }
                for r2 in 0..4 {
                    if r2 != row && !m[r2][col].is_zero() {
                        let f = m[r2][col].clone();
                        for c2 in 0..5 {
                            let t = &m[row][c2] * &f;
                            m[r2][c2] -= t;
                        }
                    }
                }
                pivots[col] = row;
                row += 1;
            }
        }
        let mut c = [big(0), big(0), big(0), big(0)];
        for col in 0..4 {
            assert!(pivots[col] != usize::MAX, "nonzero QScalar must be invertible");
            c[col] = m[pivots[col]][4].clone();
        }
        QScalar { ctx: self.ctx, c }
    }

    pub fn div(&self, other: &QScalar) -> QScalar {
        self * &other.inverse()
    }

    pub fn pow(&self, k: i64) -> QScalar {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let mut acc = QScalar::one(self.ctx);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, coef) in self.c.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{coef}")?;
            } else if coef.is_one() {
                write!(f, "u^{i}")?;
            } else {
                write!(f, "{coef}*u^{i}")?;
            }
        }
        Ok(())
    }
}

macro_rules! qscalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&QScalar> for &QScalar {
            type Output = QScalar;
            fn $method(self, rhs: &QScalar) -> QScalar {
                assert_eq!(self.ctx, rhs.ctx, "QScalar context mismatch");
                let mut c = self.c.clone();
                for i in 0..4 {
                    c[i] = &c[i] $op &rhs.c[i];
                }
                QScalar { ctx: self.ctx, c }
            }
        }
        impl $trait<QScalar> for QScalar {
            type Output = QScalar;
            fn $method(self, rhs: QScalar) -> QScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

qscalar_binop!(Add, add, +);
qscalar_binop!(Sub, sub, -);

impl Mul<&QScalar> for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        assert_eq!(self.ctx, rhs.ctx, "QScalar context mismatch");
        let p = BigRational::from_integer(BigInt::from(self.ctx.p));
        let mut c = [big(0), big(0), big(0), big(0)];
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if rhs.c[j].is_zero() {
                    continue;
                }
                let prod = &self.c[i] * &rhs.c[j];
                let k = i + j;
                if k < 4 {
                    c[k] += prod;
                } else {
                    c[k - 4] += prod * &p;
                }
            }
        }
        QScalar { ctx: self.ctx, c }
    }
}

impl Mul<QScalar> for QScalar {
    type Output = QScalar;
    fn mul(self, rhs: QScalar) -> QScalar {
        (&self).mul(&rhs)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        let mut c = self.c.clone();
        for x in c.iter_mut() {
            *x = -x.clone();
        }
        QScalar { ctx: self.ctx, c }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, rhs: &QScalar) {
        *self = &*self * rhs;
    }
}

// ---------------------------------------------------------------------------
// Integer polynomials in v and the rational function field ℚ(v).
// ---------------------------------------------------------------------------

/// Dense integer polynomial, low degree first; invariant: no trailing zeros.
type ZPoly = Vec<BigInt>;

fn poly_trim(p: &mut ZPoly) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_add(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    poly_trim(&mut out);
    out
}

fn poly_neg(a: &ZPoly) -> ZPoly {
    a.iter().map(|c| -c.clone()).collect()
}

fn poly_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_content(a: &ZPoly) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = num_integer::Integer::gcd(&g, c);
    }
    g
}

/// Polynomial gcd over ℚ, returned primitive with positive leading coefficient.
fn poly_gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_empty() {
        // Pseudo-remainder of a by b.
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let la = a.last().unwrap().clone();
            // a := lb·a − la·x^shift·b  (kills the leading term)
            for c in a.iter_mut() {
                *c *= &lb;
            }
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &la * &lb * c / &lb; // la·c
            }
            poly_trim(&mut a);
            // Keep coefficients small.
            let g = poly_content(&a);
            if !g.is_zero() && g != BigInt::one() {
                for c in a.iter_mut() {
                    *c /= &g;
                }
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    let g = poly_content(&a);
    if !g.is_zero() {
        for c in a.iter_mut() {
            *c /= &g;
        }
    }
    if a.last().map_or(false, |c| c.is_negative()) {
        a = poly_neg(&a);
    }
    a
}

/// Exact division a / b, panicking unless it is exact.
fn poly_div_exact(a: &ZPoly, b: &ZPoly) -> ZPoly {
    assert!(!b.is_empty(), "polynomial division by zero");
    if a.is_empty() {
        return vec![];
    }
    // Work over ℚ then verify integrality.
    let mut rem: Vec<BigRational> = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let bq: Vec<BigRational> = b.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut quot = vec![BigRational::zero(); a.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let idx = k + b.len() - 1;
        let coef = &rem[idx] / bq.last().unwrap();
        quot[k] = coef.clone();
        for (i, c) in bq.iter().enumerate() {
            let t = c * &coef;
            rem[k + i] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    let mut out: ZPoly = quot
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "non-integer quotient in exact division");
            c.to_integer()
        })
        .collect();
    poly_trim(&mut out);
    out
}

/// A normalized element of ℚ(v): integer numerator and denominator polynomials
/// with gcd 1 and positive-leading-coefficient denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun {
    num: ZPoly,
    den: ZPoly,
}

impl RatFun {
    fn make(mut num: ZPoly, mut den: ZPoly) -> RatFun {
        poly_trim(&mut num);
        poly_trim(&mut den);
        assert!(!den.is_empty(), "zero denominator in RatFun");
        if num.is_empty() {
            return RatFun {
                num: vec![],
                den: vec![BigInt::one()],
            };
        }
        let g = poly_gcd(&num, &den);
        if g.len() > 1 || g.first().map_or(false, |c| !c.is_one()) {
            num = poly_div_exact(&num, &g);
            den = poly_div_exact(&den, &g);
        }
        let cn = poly_content(&num);
        let cd = poly_content(&den);
        let c = num_integer::Integer::gcd(&cn, &cd);
        if c > BigInt::one() {
            for x in num.iter_mut() {
                *x /= &c;
            }
            for x in den.iter_mut() {
                *x /= &c;
            }
        }
        if den.last().unwrap().is_negative() {
            num = poly_neg(&num);
            den = poly_neg(&den);
        }
        RatFun { num, den }
    }

    pub fn zero() -> RatFun {
        RatFun {
            num: vec![],
            den: vec![BigInt::one()],
        }
    }

    pub fn one() -> RatFun {
        RatFun::from_int(1)
    }

    pub fn from_int(n: i64) -> RatFun {
        if n == 0 {
            return RatFun::zero();
        }
        RatFun {
            num: vec![BigInt::from(n)],
            den: vec![BigInt::one()],
        }
    }

    pub fn from_rational(r: &BigRational) -> RatFun {
        RatFun::make(vec![r.numer().clone()], vec![r.denom().clone()])
    }

    /// The variable v.
    pub fn v() -> RatFun {
        RatFun {
            num: vec![BigInt::zero(), BigInt::one()],
            den: vec![BigInt::one()],
        }
    }

    /// v^k for any integer k.
    pub fn v_pow(k: i64) -> RatFun {
        let mono = |d: usize| {
            let mut p = vec![BigInt::zero(); d + 1];
            p[d] = BigInt::one();
            p
        };
        if k >= 0 {
            RatFun {
                num: mono(k as usize),
                den: vec![BigInt::one()],
            }
        } else {
            RatFun {
                num: vec![BigInt::one()],
                den: mono((-k) as usize),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &[BigInt] {
        &self.den
    }

    pub fn inverse(&self) -> RatFun {
        assert!(!self.is_zero(), "division by zero in RatFun");
        RatFun::make(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFun) -> RatFun {
        self * &other.inverse()
    }

    pub fn pow(&self, k: i64) -> RatFun {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let mut acc = RatFun::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// v − v⁻¹, the standard quantum denominator.
    pub fn v_minus_vinv() -> RatFun {
        &RatFun::v() - &RatFun::v_pow(-1)
    }

    /// The quantum integer [n] = (vⁿ − v⁻ⁿ)/(v − v⁻¹).
    pub fn quantum_number(n: i64) -> RatFun {
        if n == 0 {
            return RatFun::zero();
        }
        if n < 0 {
            return -RatFun::quantum_number(-n);
        }
        // [n] = v^{−(n−1)} (1 + v² + … + v^{2(n−1)})
        let mut num = vec![BigInt::zero(); 2 * (n as usize - 1) + 1];
        for i in 0..n as usize {
            num[2 * i] = BigInt::one();
        }
        &RatFun { num, den: vec![BigInt::one()] } * &RatFun::v_pow(-(n - 1))
    }

    /// [n]! = [1][2]…[n].
    pub fn quantum_factorial(n: i64) -> RatFun {
        assert!(n >= 0);
        let mut acc = RatFun::one();
        for k in 1..=n {
            acc = &acc * &RatFun::quantum_number(k);
        }
        acc
    }

    /// Gaussian binomial [m+n choose m]_q-style quantum binomial [a choose b].
    pub fn quantum_binomial(a: i64, b: i64) -> RatFun {
        if b < 0 || b > a {
            return RatFun::zero();
        }
        RatFun::quantum_factorial(a)
            .div(&RatFun::quantum_factorial(b))
            .div(&RatFun::quantum_factorial(a - b))
    }

    /// Specialize v ↦ q^{1/2} = u^{2e} into ℚ[u]/(u⁴−p).
    pub fn specialize_v(&self, ctx: PrimePower) -> QScalar {
        let eval = |p: &ZPoly| -> QScalar {
            let mut acc = QScalar::zero(ctx);
            for (i, c) in p.iter().enumerate() {
                let term = &QScalar::from_bigint(ctx, c.clone()) * &QScalar::v_pow(ctx, i as i64);
                acc += &term;
            }
            acc
        };
        let den = eval(&self.den);
        assert!(!den.is_zero(), "denominator vanishes at v = q^(1/2)");
        eval(&self.num).div(&den)
    }

    /// True iff this is a Laurent polynomial in v with integer coefficients
    /// (denominator a monomial ±v^k with unit coefficient).
    pub fn is_integral_laurent(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let nonzero = self.den.iter().filter(|c| !c.is_zero()).count();
        // The denominator is normalized with positive leading coefficient, so
        // "monomial with unit coefficient" is exactly this check.
        nonzero == 1 && self.den.last().unwrap().is_one()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &ZPoly, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if p.is_empty() {
                return write!(f, "0");
            }
            let mut first = true;
            for (i, c) in p.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if i == 0 {
                    write!(f, "{c}")?;
                } else if c.is_one() {
                    write!(f, "v^{i}")?;
                } else {
                    write!(f, "{c}*v^{i}")?;
                }
            }
            Ok(())
        };
        show(&self.num, f)?;
        if self.den.len() > 1 || !self.den[0].is_one() {
            write!(f, " / (")?;
            show(&self.den, f)?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Add<&RatFun> for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        RatFun::make(
            poly_add(&poly_mul(&self.num, &rhs.den), &poly_mul(&rhs.num, &self.den)),
            poly_mul(&self.den, &rhs.den),
        )
    }
}

impl Sub<&RatFun> for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        self + &(-rhs)
    }
}

impl Mul<&RatFun> for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        RatFun::make(poly_mul(&self.num, &rhs.num), poly_mul(&self.den, &rhs.den))
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: poly_neg(&self.num),
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        -&self
    }
}

impl Add<RatFun> for RatFun {
    type Output = RatFun;
    fn add(self, rhs: RatFun) -> RatFun {
        &self + &rhs
    }
}

impl Sub<RatFun> for RatFun {
    type Output = RatFun;
    fn sub(self, rhs: RatFun) -> RatFun {
        &self - &rhs
    }
}

impl Mul<RatFun> for RatFun {
    type Output = RatFun;
    fn mul(self, rhs: RatFun) -> RatFun {
        &self * &rhs
    }
}

impl AddAssign<&RatFun> for RatFun {
    fn add_assign(&mut self, rhs: &RatFun) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RatFun> for RatFun {
    fn sub_assign(&mut self, rhs: &RatFun) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&RatFun> for RatFun {
    fn mul_assign(&mut self, rhs: &RatFun) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx2() -> PrimePower {
        PrimePower::new(2, 1)
    }

    fn ctx4() -> PrimePower {
        PrimePower::new(2, 2)
    }

    #[test]
    fn prime_power_basics() {
        assert_eq!(PrimePower::new(2, 1).q(), 2);
        assert_eq!(PrimePower::new(3, 2).q(), 9);
        assert_eq!(PrimePower::from_q(4), Some(PrimePower::new(2, 2)));
        assert_eq!(PrimePower::from_q(6), None);
    }

    #[test]
    fn u_pow_wraps() {
        let ctx = ctx2();
        // u⁴ = 2
        let u4 = QScalar::u_pow(ctx, 4);
        assert_eq!(u4, QScalar::from_int(ctx, 2));
        // u⁻¹ · u = 1
        let prod = &QScalar::u_pow(ctx, -1) * &QScalar::u_pow(ctx, 1);
        assert_eq!(prod, QScalar::one(ctx));
    }

    #[test]
    fn v_of_q4_is_integer() {
        // For q = 4 = 2², v = q^{1/2} = 2 exactly.
        let ctx = ctx4();
        assert_eq!(QScalar::v_pow(ctx, 1), QScalar::from_int(ctx, 2));
        assert_eq!(QScalar::q_pow(ctx, 1), QScalar::from_int(ctx, 4));
    }

    #[test]
    fn inverse_roundtrip() {
        let ctx = ctx2();
        let x = &QScalar::u_pow(ctx, 3) + &QScalar::from_int(ctx, 5);
        let prod = &x * &x.inverse();
        assert_eq!(prod, QScalar::one(ctx));
    }

    #[test]
    fn quantum_number_identity() {
        // [n](v − v⁻¹) = vⁿ − v⁻ⁿ for |n| ≤ 10.
        for n in -10i64..=10 {
            let lhs = &RatFun::quantum_number(n) * &RatFun::v_minus_vinv();
            let rhs = &RatFun::v_pow(n) - &RatFun::v_pow(-n);
            assert_eq!(lhs, rhs, "failed at n = {n}");
        }
    }

    #[test]
    fn quantum_binomial_values() {
        // [4 choose 2] = [4]![2]!⁻²  = v⁻⁴ + v⁻² + 2 + v² + v⁴
        let b = RatFun::quantum_binomial(4, 2);
        let expect = &(&(&RatFun::v_pow(-4) + &RatFun::v_pow(-2)) + &RatFun::from_int(2))
            + &(&RatFun::v_pow(2) + &RatFun::v_pow(4));
        assert_eq!(b, expect);
    }

    #[test]
    fn specialize_matches() {
        let ctx = PrimePower::new(3, 1);
        // [2] = v + v⁻¹ specializes to 3^{1/2} + 3^{-1/2} = u² + u²/3 · … in u-terms
        let s = RatFun::quantum_number(2).specialize_v(ctx);
        let expect = &QScalar::v_pow(ctx, 1) + &QScalar::v_pow(ctx, -1);
        assert_eq!(s, expect);
    }

    #[test]
    fn integral_laurent_detection() {
        assert!(RatFun::quantum_number(3).is_integral_laurent());
        assert!(!RatFun::quantum_number(2).inverse().is_integral_laurent());
        assert!(RatFun::v_pow(-5).is_integral_laurent());
    }

    proptest! {
        #[test]
        fn field_axioms(a0 in -20i64..20, a1 in -20i64..20, b0 in -20i64..20,
                        b2 in -20i64..20, c3 in -20i64..20) {
            let ctx = ctx2();
            let mk = |x: i64, i: i64, y: i64, j: i64| {
                &(&QScalar::from_int(ctx, x) * &QScalar::u_pow(ctx, i))
                    + &(&QScalar::from_int(ctx, y) * &QScalar::u_pow(ctx, j))
            };
            let a = mk(a0, 0, a1, 1);
            let b = mk(b0, 0, b2, 2);
            let c = mk(c3, 3, 1, 0);
            // associativity
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            // distributivity
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            // inverses
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse(), QScalar::one(ctx));
            }
        }

        #[test]
        fn specialize_is_ring_hom(n1 in -4i64..5, n2 in -4i64..5, k in -3i64..4) {
            let ctx = PrimePower::new(2, 1);
            let f = &RatFun::quantum_number(n1) + &RatFun::v_pow(k);
            let g = &RatFun::quantum_number(n2) - &RatFun::v_pow(-k);
            let lhs = (&f * &g).specialize_v(ctx);
            let rhs = &f.specialize_v(ctx) * &g.specialize_v(ctx);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
