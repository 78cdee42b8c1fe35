//! The cyclotomic ring `Z[zeta_p]` and field `Q(zeta_p)`, with exact p-adic
//! valuations computed through field norms.
//!
//! Elements are stored on the power basis `{1, zeta, ..., zeta^{p-2}}`, i.e.
//! reduced modulo `Phi_p(x) = 1 + x + ... + x^{p-1}`; the representation is
//! canonical, so equality is coefficient-wise. `Q(zeta_p)/Q_p` is totally
//! ramified of degree p-1, hence `ord_p(x) = ord_p(N(x)) / (p-1)` and nonzero
//! integral elements have valuations in `(1/(p-1)) Z_{>=0}`. Valuations are
//! obtained this way throughout; no ramified-field element arithmetic is ever
//! performed, and the uniformizer only enters as the unit of the value group.

use crate::intlin;
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// An element of `Z[zeta_p]` on the basis `{1, zeta, ..., zeta^{p-2}}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<BigInt>, // length p-1
}

impl CycInt {
    pub fn zero(p: u64) -> Self {
        assert!(p >= 2, "p must be a prime >= 2");
        CycInt {
            p,
            coeffs: vec![BigInt::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::from_int(p, BigInt::one())
    }

    pub fn from_int(p: u64, n: BigInt) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = n;
        z
    }

    /// zeta_p^k for any integer k (negative allowed).
    pub fn zeta_pow(p: u64, k: i64) -> Self {
        let mut e = k.rem_euclid(p as i64) as u64;
        let mut z = Self::zero(p);
        if e == p - 1 {
            // zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2})
            for c in z.coeffs.iter_mut() {
                *c = -BigInt::one();
            }
        } else {
            if e >= p {
                e %= p;
            }
            z.coeffs[e as usize] = BigInt::one();
        }
        z
    }

    /// Build from coefficients on powers `zeta^0..zeta^{len-1}`, reducing mod Phi_p.
    pub fn from_coeffs(p: u64, coeffs: &[BigInt]) -> Self {
        let mut folded = vec![BigInt::zero(); p as usize];
        for (i, c) in coeffs.iter().enumerate() {
            folded[i % p as usize] += c;
        }
        let mut z = Self::zero(p);
        let top = folded[(p - 1) as usize].clone();
        for i in 0..(p - 1) as usize {
            z.coeffs[i] = &folded[i] - &top;
        }
        z
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficients on the basis `{1, zeta, ..., zeta^{p-2}}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// gcd of all coefficients (0 for the zero element).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut z = self.clone();
        for c in z.coeffs.iter_mut() {
            *c *= k;
        }
        z
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed cyclotomic levels");
    }

    /// Matrix of multiplication by `self` on the power basis (columns are the
    /// images of the basis vectors).
    fn mult_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = (self.p - 1) as usize;
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        cols.push(cur.coeffs.clone());
        for _ in 1..d {
            cur = cur.mul_zeta();
            cols.push(cur.coeffs.clone());
        }
        // transpose columns into rows
        let mut rows = vec![vec![BigInt::zero(); d]; d];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..d {
                rows[i][j] = col[i].clone();
            }
        }
        rows
    }

    fn mul_zeta(&self) -> Self {
        let d = (self.p - 1) as usize;
        let mut z = Self::zero(self.p);
        // shift up; zeta * zeta^{p-2} = zeta^{p-1} = -(1 + ... + zeta^{p-2})
        let top = self.coeffs[d - 1].clone();
        z.coeffs[0] = -&top;
        for i in 1..d {
            z.coeffs[i] = &self.coeffs[i - 1] - &top;
        }
        z
    }

    /// Field norm N_{Q(zeta_p)/Q}: determinant of the multiplication map.
    /// Multiplicative, and N(m) = m^{p-1} for rational integers m.
    pub fn norm(&self) -> BigInt {
        intlin::det_bareiss(self.mult_matrix())
    }

    /// Exact p-adic valuation; `ord_q = ord_p / a` is read off the result.
    pub fn ord_p(&self, a: u64) -> PadicVal {
        if self.is_zero() {
            return PadicVal::infinite(a);
        }
        let nrm = self.norm();
        let v = int_ord_p(&nrm, self.p);
        PadicVal::finite(
            Rat::new(BigInt::from(v), BigInt::from(self.p - 1)),
            a,
        )
    }
}

/// ord_p of a nonzero integer.
pub fn int_ord_p(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0u64;
    loop {
        let (q, r) = n.div_rem(&p);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return v;
        }
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(p={}, {:?})", self.p, self.coeffs)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*z", c)?,
                _ => write!(f, "{}*z^{}", c, i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, other: &CycInt) -> CycInt {
        self.check_compat(other);
        let mut z = self.clone();
        for (a, b) in z.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        z
    }
}

impl AddAssign<&CycInt> for CycInt {
    fn add_assign(&mut self, other: &CycInt) {
        self.check_compat(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, other: &CycInt) -> CycInt {
        self.check_compat(other);
        let mut z = self.clone();
        for (a, b) in z.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        z
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        let mut z = self.clone();
        for c in z.coeffs.iter_mut() {
            *c = -c.clone();
        }
        z
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, other: &CycInt) -> CycInt {
        self.check_compat(other);
        let d = (self.p - 1) as usize;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        CycInt::from_coeffs(self.p, &prod)
    }
}

/// A p-adic valuation: `ord_p` together with the scale `a` so that
/// `ord_q = ord_p / a` for `q = p^a`. `None` encodes +infinity (the value of 0).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PadicVal {
    pub ord_p: OrdVal,
    pub scale: u64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrdVal {
    Finite(Rat),
    Infinite,
}

impl OrdVal {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            OrdVal::Finite(r) => Some(r),
            OrdVal::Infinite => None,
        }
    }

    /// Infinite compares greater than every finite value.
    pub fn ge(&self, other: &Rat) -> bool {
        match self {
            OrdVal::Infinite => true,
            OrdVal::Finite(r) => r >= other,
        }
    }
}

impl PadicVal {
    pub fn finite(v: Rat, scale: u64) -> Self {
        PadicVal {
            ord_p: OrdVal::Finite(v),
            scale,
        }
    }

    pub fn infinite(scale: u64) -> Self {
        PadicVal {
            ord_p: OrdVal::Infinite,
            scale,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.ord_p, OrdVal::Infinite)
    }

    /// ord_q = ord_p / a.
    pub fn ord_q(&self) -> OrdVal {
        match &self.ord_p {
            OrdVal::Infinite => OrdVal::Infinite,
            OrdVal::Finite(r) => {
                OrdVal::Finite(r / Rat::from_integer(BigInt::from(self.scale)))
            }
        }
    }
}

/// An element of `Q(zeta_p)` as `num / den` with a positive integer
/// denominator coprime to the content of the numerator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycRat {
    num: CycInt,
    den: BigInt, // > 0
}

impl CycRat {
    pub fn new(num: CycInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut z = CycRat { num, den };
        z.reduce();
        z
    }

    pub fn from_cyc(num: CycInt) -> Self {
        CycRat {
            num,
            den: BigInt::one(),
        }
    }

    pub fn from_rat(p: u64, r: &Rat) -> Self {
        CycRat::new(CycInt::from_int(p, r.numer().clone()), r.denom().clone())
    }

    pub fn zero(p: u64) -> Self {
        CycRat::from_cyc(CycInt::zero(p))
    }

    pub fn one(p: u64) -> Self {
        CycRat::from_cyc(CycInt::one(p))
    }

    pub fn p(&self) -> u64 {
        self.num.p
    }

    pub fn num(&self) -> &CycInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the element lies in `Z[zeta_p]`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_cyc_int(&self) -> Option<CycInt> {
        if self.is_integral() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.num
            .as_integer()
            .map(|n| Rat::new(n, self.den.clone()))
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            self.num = -&self.num;
        }
        if self.num.is_zero() {
            self.den = BigInt::one();
            return;
        }
        let g = self.num.content().gcd(&self.den);
        if !g.is_one() {
            for c in self.num.coeffs.iter_mut() {
                *c = &*c / &g;
            }
            self.den = &self.den / &g;
        }
    }

    pub fn ord_p(&self, a: u64) -> PadicVal {
        if self.is_zero() {
            return PadicVal::infinite(a);
        }
        let num_ord = self.num.ord_p(a);
        let den_ord = int_ord_p(&self.den, self.num.p);
        match num_ord.ord_p {
            OrdVal::Finite(r) => {
                PadicVal::finite(r - Rat::from_integer(BigInt::from(den_ord)), a)
            }
            OrdVal::Infinite => unreachable!(),
        }
    }

    /// Multiplicative inverse, by solving the linear system for 1/num.
    pub fn inv(&self) -> Option<CycRat> {
        if self.is_zero() {
            return None;
        }
        let p = self.num.p;
        let d = (p - 1) as usize;
        let m = self.num.mult_matrix();
        let m_rat: Vec<Vec<Rat>> = m
            .iter()
            .map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let mut rhs = vec![Rat::zero(); d];
        rhs[0] = Rat::one();
        let sol = intlin::solve_rat(&m_rat, &rhs)?;
        // 1/self = den * (1/num); clear denominators of sol
        let lcm = crate::rat::denominator_lcm(&sol);
        let coeffs: Vec<BigInt> = sol
            .iter()
            .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let num = CycInt {
            p,
            coeffs: coeffs.clone(),
        }
        .scale(&self.den);
        Some(CycRat::new(num, lcm))
    }
}

impl Add for &CycRat {
    type Output = CycRat;
    fn add(self, other: &CycRat) -> CycRat {
        let num = &self.num.scale(&other.den) + &other.num.scale(&self.den);
        CycRat::new(num, &self.den * &other.den)
    }
}

impl Sub for &CycRat {
    type Output = CycRat;
    fn sub(self, other: &CycRat) -> CycRat {
        let num = &self.num.scale(&other.den) - &other.num.scale(&self.den);
        CycRat::new(num, &self.den * &other.den)
    }
}

impl Neg for &CycRat {
    type Output = CycRat;
    fn neg(self) -> CycRat {
        CycRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &CycRat {
    type Output = CycRat;
    fn mul(self, other: &CycRat) -> CycRat {
        CycRat::new(&self.num * &other.num, &self.den * &other.den)
    }
}

impl CycRat {
    pub fn div(&self, other: &CycRat) -> CycRat {
        let inv = other.inv().expect("division by zero in Q(zeta_p)");
        self * &inv
    }

    pub fn scale_rat(&self, r: &Rat) -> CycRat {
        CycRat::new(self.num.scale(r.numer()), &self.den * r.denom())
    }
}
