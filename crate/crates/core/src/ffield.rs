//! Finite fields `F_{p^a}` and their extension towers.
//!
//! Each tower level `r` is the absolute extension `F_p[x]/(m_{a r})` with the
//! lexicographically smallest irreducible modulus of degree `a r` (or a
//! verified user-supplied modulus at level 1). Elements are coefficient
//! vectors over `F_p`. Embeddings between levels send the generator of the
//! small field to the lexicographically least root of its modulus in the big
//! field, which makes all derived data (closed-point representatives, walks,
//! series) deterministic and independent of worker count.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("supplied modulus is reducible or malformed")]
    ReducibleModulus,
    #[error("closed-point census mismatch at degree {degree}: counted {counted}, formula {expected}")]
    CountMismatch {
        degree: usize,
        counted: u128,
        expected: u128,
    },
}

/// An element of a tower level, as coefficients over `F_p` (little-endian in
/// the level's generator).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct FqElem {
    pub level: usize,
    pub coeffs: Vec<u8>,
}

impl FqElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

pub struct FieldTower {
    p: u64,
    a: usize,
    levels: RwLock<BTreeMap<usize, Arc<Level>>>,
    embeddings: RwLock<BTreeMap<(usize, usize), Arc<Vec<Vec<u8>>>>>,
}

impl FieldTower {
    /// Tower over `F_q`, `q = p^a`; the level-1 modulus is scanned
    /// deterministically unless supplied (and verified) by the caller.
    pub fn new(p: u64, a: usize, modulus: Option<Vec<u8>>) -> Result<Self, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        assert!(a >= 1);
        let base = match modulus {
            Some(m) => {
                if m.len() != a + 1
                    || m[a] != 1
                    || m.iter().any(|&c| c as u64 >= p)
                    || !fp_is_irreducible(&m, p)
                {
                    return Err(FieldError::ReducibleModulus);
                }
                m
            }
            None => smallest_irreducible(p, a),
        };
        let tower = FieldTower {
            p,
            a,
            levels: RwLock::new(BTreeMap::new()),
            embeddings: RwLock::new(BTreeMap::new()),
        };
        let lvl = Arc::new(Level::build(p, a, 1, base));
        tower.levels.write().unwrap().insert(1, lvl);
        Ok(tower)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    /// q = p^a.
    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.a as u32)
    }

    /// The level for `F_{q^r}`, built on first use.
    pub fn level(&self, r: usize) -> Arc<Level> {
        assert!(r >= 1);
        if let Some(l) = self.levels.read().unwrap().get(&r) {
            return l.clone();
        }
        let m = smallest_irreducible(self.p, self.a * r);
        let lvl = Arc::new(Level::build(self.p, self.a, r, m));
        let mut w = self.levels.write().unwrap();
        w.entry(r).or_insert(lvl).clone()
    }

    /// Images of the powers of the level-`from` generator inside level `to`
    /// (the canonical embedding data).
    pub fn embedding(&self, from: usize, to: usize) -> Arc<Vec<Vec<u8>>> {
        assert!(to % from == 0, "no embedding between incomparable levels");
        if let Some(e) = self.embeddings.read().unwrap().get(&(from, to)) {
            return e.clone();
        }
        let small = self.level(from);
        let big = self.level(to);
        let root = least_root(&small.modulus, &big);
        let mut powers = Vec::with_capacity(small.deg);
        let mut cur = big.one();
        for _ in 0..small.deg {
            powers.push(cur.clone());
            cur = big.mul(&cur, &root);
        }
        let arc = Arc::new(powers);
        let mut w = self.embeddings.write().unwrap();
        w.entry((from, to)).or_insert(arc).clone()
    }

    pub fn embed(&self, x: &FqElem, to: usize) -> FqElem {
        if x.level == to {
            return x.clone();
        }
        let emb = self.embedding(x.level, to);
        let big = self.level(to);
        let mut acc = big.zero();
        for (&c, pw) in x.coeffs.iter().zip(emb.iter()) {
            if c != 0 {
                acc = big.add(&acc, &big.scale(pw, c));
            }
        }
        FqElem {
            level: to,
            coeffs: acc,
        }
    }

    /// Express `x` (at some level `r`) in the subfield at level `to | r`;
    /// `None` when `x` is not in that subfield.
    pub fn project(&self, x: &FqElem, to: usize) -> Option<FqElem> {
        if x.level == to {
            return Some(x.clone());
        }
        let emb = self.embedding(to, x.level);
        let small = self.level(to);
        let big = self.level(x.level);
        let cols: Vec<&Vec<u8>> = emb.iter().collect();
        let sol = fp_solve(&cols, &x.coeffs, big.deg, small.deg, self.p)?;
        Some(FqElem {
            level: to,
            coeffs: sol,
        })
    }

    /// Relative trace from level `r` down to level `to | r`:
    /// `sum_{i < r/to} x^{(q^to)^i}`.
    pub fn trace(&self, x: &FqElem, to: usize) -> FqElem {
        let r = x.level;
        assert!(r % to == 0);
        let lvl = self.level(r);
        let steps = r / to;
        let mut acc = x.coeffs.clone();
        let mut cur = x.coeffs.clone();
        for _ in 1..steps {
            for _ in 0..to {
                cur = lvl.frob_q(&cur);
            }
            acc = lvl.add(&acc, &cur);
        }
        let y = FqElem {
            level: r,
            coeffs: acc,
        };
        self.project(&y, to)
            .expect("trace lands in the target subfield")
    }

    pub fn elem_from_int(&self, r: usize, v: i64) -> FqElem {
        let lvl = self.level(r);
        FqElem {
            level: r,
            coeffs: lvl.from_int(v),
        }
    }
}

/// One level of the tower: `F_{p^{a r}}` as `F_p[x]/(modulus)`.
pub struct Level {
    pub p: u64,
    /// degree over F_q
    pub r: usize,
    /// degree over F_p
    pub deg: usize,
    pub modulus: Vec<u8>,
    red: Vec<Vec<u8>>, // x^{deg+i} mod modulus
    trace_vec: Vec<u8>,
    frob_q_cols: Vec<Vec<u8>>,
    card: u128,
    card_m1_primes: Vec<u64>,
    generator: Vec<u8>,
}

impl Level {
    fn build(p: u64, a: usize, r: usize, modulus: Vec<u8>) -> Level {
        let deg = a * r;
        assert_eq!(modulus.len(), deg + 1);
        // reduction rows x^{deg+i} mod modulus
        let mut red: Vec<Vec<u8>> = Vec::new();
        let mut cur: Vec<u8> = (0..deg)
            .map(|i| ((p - modulus[i] as u64) % p) as u8) // x^deg = -(lower part)
            .collect();
        for _ in 0..deg.saturating_sub(1) {
            red.push(cur.clone());
            // multiply by x and reduce with the x^deg row
            let top = cur[deg - 1];
            let mut next = vec![0u8; deg];
            for i in (1..deg).rev() {
                next[i] = cur[i - 1];
            }
            if top != 0 {
                for i in 0..deg {
                    next[i] = ((next[i] as u64 + top as u64 * red[0][i] as u64) % p) as u8;
                }
            }
            cur = next;
        }
        let mut lvl = Level {
            p,
            r,
            deg,
            modulus,
            red,
            trace_vec: Vec::new(),
            frob_q_cols: Vec::new(),
            card: (p as u128).pow(deg as u32),
            card_m1_primes: Vec::new(),
            generator: Vec::new(),
        };
        // Frobenius x -> x^p as columns, then x -> x^q = (x -> x^p)^a
        let xp = lvl.pow(&lvl.x_elem(), p as u128);
        let frob_p_cols = lvl.power_columns(&xp);
        let mut frob_q_cols = identity_cols(deg);
        for _ in 0..a {
            frob_q_cols = compose_cols(&frob_p_cols, &frob_q_cols, deg, p);
        }
        lvl.frob_q_cols = frob_q_cols;
        // absolute trace functional: Tr(x^i) = constant term of sum_j Frob_p^j(x^i)
        let mut trace_vec = vec![0u8; deg];
        for i in 0..deg {
            let mut e = vec![0u8; deg];
            e[i] = 1;
            let mut acc = e.clone();
            let mut cur = e;
            for _ in 1..deg {
                cur = apply_cols(&frob_p_cols, &cur, deg, p);
                for (x, y) in acc.iter_mut().zip(&cur) {
                    *x = ((*x as u64 + *y as u64) % p) as u8;
                }
            }
            debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must land in F_p");
            trace_vec[i] = acc[0];
        }
        lvl.trace_vec = trace_vec;
        lvl.card_m1_primes = distinct_prime_factors(lvl.card - 1);
        lvl.generator = lvl.find_generator();
        lvl
    }

    fn x_elem(&self) -> Vec<u8> {
        let mut e = vec![0u8; self.deg];
        if self.deg > 1 {
            e[1] = 1;
        } else {
            e[0] = ((self.p - self.modulus[0] as u64) % self.p) as u8;
        }
        e
    }

    fn power_columns(&self, y: &[u8]) -> Vec<Vec<u8>> {
        let mut cols = Vec::with_capacity(self.deg);
        let mut cur = self.one();
        for _ in 0..self.deg {
            cols.push(cur.clone());
            cur = self.mul(&cur, y);
        }
        cols
    }

    pub fn card(&self) -> u128 {
        self.card
    }

    pub fn zero(&self) -> Vec<u8> {
        vec![0u8; self.deg]
    }

    pub fn one(&self) -> Vec<u8> {
        let mut e = vec![0u8; self.deg];
        e[0] = 1;
        e
    }

    pub fn from_int(&self, v: i64) -> Vec<u8> {
        let mut e = vec![0u8; self.deg];
        e[0] = v.rem_euclid(self.p as i64) as u8;
        e
    }

    pub fn is_zero(&self, x: &[u8]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| ((a as u64 + b as u64) % self.p) as u8)
            .collect()
    }

    pub fn sub(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| ((a as u64 + self.p - b as u64) % self.p) as u8)
            .collect()
    }

    pub fn neg(&self, x: &[u8]) -> Vec<u8> {
        x.iter()
            .map(|&a| ((self.p - a as u64) % self.p) as u8)
            .collect()
    }

    pub fn scale(&self, x: &[u8], c: u8) -> Vec<u8> {
        x.iter()
            .map(|&a| ((a as u64 * c as u64) % self.p) as u8)
            .collect()
    }

    pub fn mul(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        let mut tmp = vec![0u64; 2 * self.deg - 1];
        let mut out = vec![0u8; self.deg];
        self.mul_into(x, y, &mut tmp, &mut out);
        out
    }

    /// Allocation-free product for hot loops; `tmp` has length `2*deg - 1`.
    pub fn mul_into(&self, x: &[u8], y: &[u8], tmp: &mut [u64], out: &mut [u8]) {
        let d = self.deg;
        for t in tmp.iter_mut() {
            *t = 0;
        }
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u64;
            for (j, &b) in y.iter().enumerate() {
                tmp[i + j] += a * b as u64;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = tmp[i] % self.p;
            if c != 0 {
                let row = &self.red[i - d];
                for (t, &m) in tmp[..d].iter_mut().zip(row) {
                    *t += c * m as u64;
                }
            }
        }
        for i in 0..d {
            out[i] = (tmp[i] % self.p) as u8;
        }
    }

    pub fn pow(&self, x: &[u8], mut e: u128) -> Vec<u8> {
        let mut acc = self.one();
        if self.is_zero(x) {
            return if e == 0 { acc } else { self.zero() };
        }
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &[u8]) -> Vec<u8> {
        assert!(!self.is_zero(x), "inverse of zero");
        self.pow(x, self.card - 2)
    }

    /// Frobenius x -> x^q.
    pub fn frob_q(&self, x: &[u8]) -> Vec<u8> {
        apply_cols(&self.frob_q_cols, x, self.deg, self.p)
    }

    /// Absolute trace down to `F_p`.
    pub fn trace_abs(&self, x: &[u8]) -> u64 {
        let mut acc = 0u64;
        for (&c, &t) in x.iter().zip(&self.trace_vec) {
            acc += c as u64 * t as u64;
        }
        acc % self.p
    }

    /// A fixed multiplicative generator (deterministic scan order).
    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    fn find_generator(&self) -> Vec<u8> {
        let order = self.card - 1;
        for idx in 1..self.card {
            let cand = self.element_from_index(idx);
            let ok = self
                .card_m1_primes
                .iter()
                .all(|&ell| !self.is_one(&self.pow(&cand, order / ell as u128)));
            if ok {
                return cand;
            }
        }
        unreachable!("every finite field has a generator")
    }

    pub fn is_one(&self, x: &[u8]) -> bool {
        x[0] == 1 && x[1..].iter().all(|&c| c == 0)
    }

    /// The idx-th field element in base-p counter order (deterministic).
    pub fn element_from_index(&self, mut idx: u128) -> Vec<u8> {
        let mut e = vec![0u8; self.deg];
        for c in e.iter_mut() {
            *c = (idx % self.p as u128) as u8;
            idx /= self.p as u128;
        }
        e
    }

    /// Packed bits of the modulus for the `p == 2` fast path.
    pub fn modulus_bits(&self) -> u64 {
        assert_eq!(self.p, 2);
        let mut m = 0u64;
        for (i, &c) in self.modulus.iter().enumerate() {
            if c != 0 {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn trace_mask(&self) -> u64 {
        assert_eq!(self.p, 2);
        let mut m = 0u64;
        for (i, &c) in self.trace_vec.iter().enumerate() {
            if c != 0 {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn to_bits(&self, x: &[u8]) -> u64 {
        assert_eq!(self.p, 2);
        let mut b = 0u64;
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                b |= 1 << i;
            }
        }
        b
    }

    pub fn from_bits(&self, mut b: u64) -> Vec<u8> {
        assert_eq!(self.p, 2);
        let mut e = vec![0u8; self.deg];
        let mut i = 0;
        while b != 0 {
            e[i] = (b & 1) as u8;
            b >>= 1;
            i += 1;
        }
        e
    }
}

fn identity_cols(deg: usize) -> Vec<Vec<u8>> {
    (0..deg)
        .map(|i| {
            let mut c = vec![0u8; deg];
            c[i] = 1;
            c
        })
        .collect()
}

fn apply_cols(cols: &[Vec<u8>], x: &[u8], deg: usize, p: u64) -> Vec<u8> {
    let mut acc = vec![0u64; deg];
    for (i, &c) in x.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (a, &m) in acc.iter_mut().zip(&cols[i]) {
            *a += c as u64 * m as u64;
        }
    }
    acc.into_iter().map(|v| (v % p) as u8).collect()
}

fn compose_cols(after: &[Vec<u8>], before: &[Vec<u8>], deg: usize, p: u64) -> Vec<Vec<u8>> {
    before
        .iter()
        .map(|col| apply_cols(after, col, deg, p))
        .collect()
}

// ---- F_p[x] polynomial helpers (dense, little-endian) ----

fn fp_trim(f: &mut Vec<u8>) {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
}

fn fp_deg(f: &[u8]) -> usize {
    let mut d = 0;
    for (i, &c) in f.iter().enumerate() {
        if c != 0 {
            d = i;
        }
    }
    d
}

fn fp_mul(a: &[u8], b: &[u8], p: u64) -> Vec<u8> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x as u64 * y as u64;
        }
    }
    let mut v: Vec<u8> = out.into_iter().map(|c| (c % p) as u8).collect();
    fp_trim(&mut v);
    v
}

fn fp_rem(a: &[u8], m: &[u8], p: u64) -> Vec<u8> {
    let dm = fp_deg(m);
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64 % p).collect();
    let lead_inv = mod_inv(m[dm] as u64, p);
    for dr in (dm..r.len()).rev() {
        let f = r[dr] % p;
        if f == 0 {
            continue;
        }
        let f = f * lead_inv % p;
        for i in 0..=dm {
            let sub = f * m[i] as u64 % p;
            r[i + dr - dm] = (r[i + dr - dm] + p - sub) % p;
        }
    }
    let mut v: Vec<u8> = r.into_iter().map(|c| (c % p) as u8).collect();
    v.truncate(dm.max(1));
    fp_trim(&mut v);
    v
}

fn fp_gcd(a: &[u8], b: &[u8], p: u64) -> Vec<u8> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn fp_powmod_x(e: u128, m: &[u8], p: u64) -> Vec<u8> {
    // x^e mod m
    let mut base = fp_rem(&[0u8, 1], m, p);
    let mut result = vec![1u8];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = fp_rem(&fp_mul(&result, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    result
}

/// Irreducibility over F_p: `x^{p^n} = x (mod f)` and
/// `gcd(x^{p^{n/l}} - x, f) = 1` for every prime `l | n`.
fn fp_is_irreducible(f: &[u8], p: u64) -> bool {
    let n = fp_deg(f);
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let pn = (p as u128).checked_pow(n as u32).expect("field too large");
    let xpn = fp_powmod_x(pn, f, p);
    let x_reduced = fp_rem(&[0u8, 1], f, p);
    if xpn != x_reduced {
        return false;
    }
    for ell in distinct_prime_factors(n as u128) {
        let e = (p as u128).pow((n as u64 / ell) as u32);
        let xe = fp_powmod_x(e, f, p);
        let mut diff: Vec<i64> = vec![0; xe.len().max(2)];
        for (i, &c) in xe.iter().enumerate() {
            diff[i] += c as i64;
        }
        diff[1] -= 1;
        let diff_u8: Vec<u8> = diff
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u8)
            .collect();
        let g = fp_gcd(&diff_u8, f, p);
        if fp_deg(&g) != 0 {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible of degree `n` over `F_p` in a fixed scan order
/// (coefficient counter, low coefficients vary fastest).
fn smallest_irreducible(p: u64, n: usize) -> Vec<u8> {
    let mut counter = vec![0u8; n];
    loop {
        let mut f = counter.clone();
        f.push(1);
        if fp_is_irreducible(&f, p) {
            return f;
        }
        let mut i = 0;
        loop {
            assert!(i < n, "exhausted candidates without finding an irreducible");
            counter[i] += 1;
            if (counter[i] as u64) < p {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

fn mod_inv(x: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = x % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

pub fn is_prime_u64(n: u64) -> bool {
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

fn distinct_prime_factors(mut n: u128) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

fn moebius(n: u64) -> i64 {
    let mut m = n;
    let mut mu = 1i64;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if m > 1 {
        mu = -mu;
    }
    mu
}

// ---- root finding over a tower level (for embeddings) ----

/// The lexicographically least root in `big` of an `F_p`-irreducible
/// polynomial whose degree divides `big.deg`.
fn least_root(f_fp: &[u8], big: &Level) -> Vec<u8> {
    let m = fp_deg(f_fp);
    assert_eq!(big.deg % m, 0);
    let f: Vec<Vec<u8>> = f_fp
        .iter()
        .map(|&c| {
            let mut e = big.zero();
            e[0] = c;
            e
        })
        .collect();
    let one_root = find_root(f, big);
    // all roots are Frobenius_p conjugates; pick the least encoding
    let mut best = one_root.clone();
    let mut cur = one_root;
    for _ in 1..m {
        cur = big.pow(&cur, big.p as u128);
        if cur < best {
            best = cur.clone();
        }
    }
    best
}

type LPoly = Vec<Vec<u8>>; // dense poly with coefficients in a Level

fn lp_deg(f: &LPoly, lvl: &Level) -> usize {
    let mut d = 0;
    for (i, c) in f.iter().enumerate() {
        if !lvl.is_zero(c) {
            d = i;
        }
    }
    d
}

fn lp_trim(f: &mut LPoly, lvl: &Level) {
    while f.len() > 1 && lvl.is_zero(f.last().unwrap()) {
        f.pop();
    }
}

fn lp_is_zero(f: &LPoly, lvl: &Level) -> bool {
    f.iter().all(|c| lvl.is_zero(c))
}

fn lp_monic(f: &mut LPoly, lvl: &Level) {
    let d = lp_deg(f, lvl);
    if lvl.is_one(&f[d]) {
        return;
    }
    let inv = lvl.inv(&f[d]);
    for c in f.iter_mut() {
        *c = lvl.mul(c, &inv);
    }
}

fn lp_mul(a: &LPoly, b: &LPoly, lvl: &Level) -> LPoly {
    let mut out = vec![lvl.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if lvl.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let prod = lvl.mul(x, y);
            out[i + j] = lvl.add(&out[i + j], &prod);
        }
    }
    lp_trim(&mut out, lvl);
    out
}

fn lp_rem(a: &LPoly, m: &LPoly, lvl: &Level) -> LPoly {
    let mut r = a.clone();
    lp_trim(&mut r, lvl);
    let dm = lp_deg(m, lvl);
    let lead_inv = lvl.inv(&m[dm]);
    loop {
        lp_trim(&mut r, lvl);
        let dr = lp_deg(&r, lvl);
        if dr < dm || lp_is_zero(&r, lvl) {
            break;
        }
        let f = lvl.mul(&r[dr], &lead_inv);
        for i in 0..=dm {
            let sub = lvl.mul(&f, &m[i]);
            r[i + dr - dm] = lvl.sub(&r[i + dr - dm], &sub);
        }
        // the leading term cancels exactly
        debug_assert!(lvl.is_zero(&r[dr]));
    }
    r
}

fn lp_gcd(a: &LPoly, b: &LPoly, lvl: &Level) -> LPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    lp_trim(&mut x, lvl);
    lp_trim(&mut y, lvl);
    while !lp_is_zero(&y, lvl) {
        let r = lp_rem(&x, &y, lvl);
        x = y;
        y = r;
    }
    lp_monic(&mut x, lvl);
    x
}

fn lp_quot(a: &LPoly, b: &LPoly, lvl: &Level) -> LPoly {
    let da = lp_deg(a, lvl);
    let db = lp_deg(b, lvl);
    let mut r = a.clone();
    let mut q = vec![lvl.zero(); da - db + 1];
    let lead_inv = lvl.inv(&b[db]);
    for k in (0..=da - db).rev() {
        let dr = db + k;
        let f = lvl.mul(&r[dr], &lead_inv);
        q[k] = f.clone();
        if lvl.is_zero(&f) {
            continue;
        }
        for i in 0..=db {
            let sub = lvl.mul(&f, &b[i]);
            r[i + k] = lvl.sub(&r[i + k], &sub);
        }
    }
    q
}

fn lp_powmod(base: &LPoly, mut e: u128, m: &LPoly, lvl: &Level) -> LPoly {
    let mut acc = vec![lvl.one()];
    let mut b = lp_rem(base, m, lvl);
    while e > 0 {
        if e & 1 == 1 {
            acc = lp_rem(&lp_mul(&acc, &b, lvl), m, lvl);
        }
        b = lp_rem(&lp_mul(&b, &b, lvl), m, lvl);
        e >>= 1;
    }
    acc
}

/// One root of a squarefree polynomial that splits completely over the level,
/// by deterministic-scan equal-degree splitting.
fn find_root(f: LPoly, lvl: &Level) -> Vec<u8> {
    let mut f = f;
    lp_monic(&mut f, lvl);
    loop {
        let d = lp_deg(&f, lvl);
        if d == 1 {
            return lvl.neg(&f[0]); // monic x + c0
        }
        let mut split: Option<LPoly> = None;
        if lvl.p == 2 {
            // trace-polynomial splitting: h = sum_i (delta x)^{2^i} mod f
            for k in 0u128.. {
                let delta = lvl.element_from_index(1 + k);
                let dx = vec![lvl.zero(), delta];
                let mut h = lp_rem(&dx, &f, lvl);
                let mut cur = h.clone();
                for _ in 1..lvl.deg {
                    cur = lp_rem(&lp_mul(&cur, &cur, lvl), &f, lvl);
                    let len = h.len().max(cur.len());
                    let mut acc = vec![lvl.zero(); len];
                    for (i, c) in h.iter().enumerate() {
                        acc[i] = lvl.add(&acc[i], c);
                    }
                    for (i, c) in cur.iter().enumerate() {
                        acc[i] = lvl.add(&acc[i], c);
                    }
                    lp_trim(&mut acc, lvl);
                    h = acc;
                }
                let g = lp_gcd(&f, &h, lvl);
                let dg = lp_deg(&g, lvl);
                if dg > 0 && dg < d && !lp_is_zero(&g, lvl) {
                    split = Some(g);
                    break;
                }
            }
        } else {
            // quadratic-residue splitting on delta*x + c
            for k in 0u128.. {
                let delta = lvl.element_from_index(1 + (k / 8));
                let c = lvl.element_from_index(k % 8);
                let u = vec![c, delta];
                let mut h = lp_powmod(&u, (lvl.card - 1) / 2, &f, lvl);
                h[0] = lvl.sub(&h[0], &lvl.one());
                lp_trim(&mut h, lvl);
                if lp_is_zero(&h, lvl) {
                    continue;
                }
                let g = lp_gcd(&f, &h, lvl);
                let dg = lp_deg(&g, lvl);
                if dg > 0 && dg < d {
                    split = Some(g);
                    break;
                }
            }
        }
        let g = split.expect("splitting scan terminates");
        let other = lp_quot(&f, &g, lvl);
        f = if lp_deg(&g, lvl) <= lp_deg(&other, lvl) {
            g
        } else {
            other
        };
        lp_monic(&mut f, lvl);
    }
}

/// Solve `cols * c = rhs` over F_p for `c` (cols are n-vectors, k of them).
fn fp_solve(cols: &[&Vec<u8>], rhs: &[u8], n: usize, k: usize, p: u64) -> Option<Vec<u8>> {
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut row: Vec<u64> = (0..k).map(|j| cols[j][i] as u64).collect();
            row.push(rhs[i] as u64);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..n).find(|&i| m[i][c] % p != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = mod_inv(m[r][c] % p, p);
        for j in c..=k {
            m[r][j] = m[r][j] % p * inv % p;
        }
        for i in 0..n {
            if i != r && m[i][c] % p != 0 {
                let f = m[i][c] % p;
                for j in c..=k {
                    m[i][j] = (m[i][j] + (p - f) * m[r][j]) % p;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    for row in m.iter().skip(r) {
        if row[k] % p != 0 {
            return None;
        }
    }
    let mut sol = vec![0u8; k];
    for &(row, col) in &pivots {
        sol[col] = (m[row][k] % p) as u8;
    }
    Some(sol)
}

// ---- closed points ----

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PointSpace {
    Torus,
    Affine,
}

/// A closed point of the torus or affine space over `F_q`: one Frobenius
/// orbit, stored by its canonical (lexicographically least) representative.
#[derive(Clone, Debug)]
pub struct ClosedPoint {
    pub degree: usize,
    pub rep: Vec<FqElem>,
}

/// Every closed point of degree <= `d_max` of `space^s`, each orbit exactly
/// once, sorted by (degree, representative). Per-degree counts are checked
/// against the Moebius census.
pub fn closed_points(
    tower: &FieldTower,
    space: PointSpace,
    s: usize,
    d_max: usize,
) -> Result<Vec<ClosedPoint>, FieldError> {
    let q = tower.q();
    let mut out = Vec::new();
    for d in 1..=d_max {
        let lvl = tower.level(d);
        let card = lvl.card();
        let mut reps = Vec::new();
        let mut tuple_idx = vec![0u128; s];
        'tuples: loop {
            let mut tuple: Vec<Vec<u8>> = Vec::with_capacity(s);
            let mut skip = false;
            for &ti in &tuple_idx {
                let e = lvl.element_from_index(ti);
                if space == PointSpace::Torus && lvl.is_zero(&e) {
                    skip = true;
                    break;
                }
                tuple.push(e);
            }
            if !skip {
                if let Some(orbit_len) = canonical_orbit_length(&lvl, &tuple, d) {
                    if orbit_len == d {
                        reps.push(tuple);
                    }
                }
            }
            for i in 0..s {
                tuple_idx[i] += 1;
                if tuple_idx[i] < card {
                    continue 'tuples;
                }
                tuple_idx[i] = 0;
            }
            break;
        }
        let counted = reps.len() as u128;
        let mut expected: i128 = 0;
        for e in 1..=d {
            if d % e != 0 {
                continue;
            }
            let mu = moebius((d / e) as u64) as i128;
            let pts_e: i128 = match space {
                PointSpace::Torus => (q.pow(e as u32) - 1).pow(s as u32) as i128,
                PointSpace::Affine => (q.pow(e as u32)).pow(s as u32) as i128,
            };
            expected += mu * pts_e;
        }
        let expected = (expected / d as i128) as u128;
        if counted != expected {
            return Err(FieldError::CountMismatch {
                degree: d,
                counted,
                expected,
            });
        }
        for rep in reps {
            out.push(ClosedPoint {
                degree: d,
                rep: rep
                    .into_iter()
                    .map(|coeffs| FqElem { level: d, coeffs })
                    .collect(),
            });
        }
    }
    out.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.rep.cmp(&b.rep)));
    Ok(out)
}

/// If the tuple is the canonical representative of its Frobenius orbit,
/// returns the orbit length; otherwise `None`.
fn canonical_orbit_length(lvl: &Level, tuple: &[Vec<u8>], d: usize) -> Option<usize> {
    let mut cur: Vec<Vec<u8>> = tuple.to_vec();
    for step in 1..=d {
        cur = cur.iter().map(|x| lvl.frob_q(x)).collect();
        if cur.as_slice() < tuple {
            return None;
        }
        if cur.as_slice() == tuple {
            debug_assert_eq!(d % step, 0);
            return Some(step);
        }
    }
    unreachable!("orbit length divides the field degree")
}
