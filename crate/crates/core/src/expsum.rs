//! Character sums of Laurent polynomials over torus, affine and mixed point
//! sets, assembly of fiber L-polynomials from them, and the two polygons
//! attached to a fiber: the Newton polygon of coefficient valuations and the
//! combinatorial lower bound read off the basis weights.
//!
//! Sums use the standard additive character `zeta_p ^ Tr`, accumulated as
//! trace-value counts so the inner loops never touch big integers. Points of
//! `(F^*)^n` are visited in generator-power order with incremental monomial
//! updates; a packed-bits path handles `p = 2`.

use crate::cyclotomic::{CycInt, CycRat, OrdVal};
use crate::ffield::{FieldTower, Level};
use crate::rat::Rat;
use crate::toric::{HodgeBasis, LaurentPoly};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ExpsumError {
    #[error("variable {0} has a negative exponent on an affine direction")]
    PoleOnDomain(usize),
    #[error("guard coefficient at degree {index} is nonzero: the fiber is degenerate ({detail})")]
    DegreeViolation { index: usize, detail: String },
    #[error("L-polynomial coefficient at degree {0} is not an algebraic integer")]
    NonIntegralCoefficient(usize),
}

/// The additive character `Theta(c) = zeta_p^c` on `F_p`.
#[derive(Clone, Copy, Debug)]
pub struct Character {
    pub p: u64,
}

impl Character {
    pub fn eval(&self, c: u64) -> CycInt {
        CycInt::zeta_pow(self.p, (c % self.p) as i64)
    }

    pub fn table(&self) -> Vec<CycInt> {
        (0..self.p).map(|c| self.eval(c)).collect()
    }
}

/// Point set of the x-variables: full torus, or torus with the listed
/// variables allowed to be zero (all of them: affine space).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumSpace {
    Torus,
    Mixed(Vec<usize>),
    Affine,
}

impl SumSpace {
    pub fn affine_vars(&self, n: usize) -> Vec<usize> {
        match self {
            SumSpace::Torus => Vec::new(),
            SumSpace::Mixed(vs) => {
                let mut v = vs.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            SumSpace::Affine => (0..n).collect(),
        }
    }
}

/// Enumeration cost of one character sum over the given space at extension
/// degree `r` (number of visited points, used for budget decisions).
pub fn exp_sum_cost(tower: &FieldTower, g_level: usize, n: usize, r: usize) -> u128 {
    let card = tower.q().saturating_pow((g_level * r) as u32);
    card.saturating_pow(n as u32)
}

/// `S_r`: the exact character sum of `g` over the chosen point set of
/// `F_{Q^r}`, `Q` the field of `g`'s coefficients, in `Z[zeta_p]`.
pub fn exp_sum(
    tower: &FieldTower,
    g: &LaurentPoly,
    r: usize,
    space: &SumSpace,
) -> Result<CycInt, ExpsumError> {
    let n = g.n;
    let affine = space.affine_vars(n);
    for (mu, _) in &g.terms {
        for &v in &affine {
            if mu[v] < 0 {
                return Err(ExpsumError::PoleOnDomain(v));
            }
        }
    }
    let target = g.level * r;
    let lvl = tower.level(target);
    let terms: Vec<(Vec<i64>, Vec<u8>)> = g
        .terms
        .iter()
        .map(|(mu, c)| (mu.clone(), tower.embed(c, target).coeffs))
        .collect();

    let p = tower.p();
    let mut counts = vec![0u64; p as usize];
    // stratify over the subset of affine variables pinned to zero
    let k = affine.len();
    for mask in 0u64..(1 << k) {
        let zeroed: Vec<usize> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| affine[i])
            .collect();
        let keep: Vec<usize> = (0..n).filter(|v| !zeroed.contains(v)).collect();
        let sub_terms: Vec<(Vec<i64>, Vec<u8>)> = terms
            .iter()
            .filter(|(mu, _)| zeroed.iter().all(|&v| mu[v] == 0))
            .map(|(mu, c)| (keep.iter().map(|&v| mu[v]).collect(), c.clone()))
            .collect();
        torus_counts(&lvl, keep.len(), &sub_terms, &mut counts);
    }
    let coeffs: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
    Ok(CycInt::from_coeffs(p, &coeffs))
}

/// Adds to `counts[t]` the number of points of `(F^*)^nvars` where the trace
/// of the polynomial value is `t`.
fn torus_counts(lvl: &Level, nvars: usize, terms: &[(Vec<i64>, Vec<u8>)], counts: &mut [u64]) {
    let order = lvl.card() - 1;
    if terms.is_empty() {
        let npoints: u128 = order.pow(nvars as u32);
        counts[0] += u64::try_from(npoints).expect("point count fits u64");
        return;
    }
    if nvars == 0 {
        let mut sum = 0u64;
        for (_, c) in terms {
            sum += lvl.trace_abs(c);
        }
        counts[(sum % lvl.p) as usize] += 1;
        return;
    }
    if lvl.p == 2 && lvl.deg <= 32 {
        torus_counts_gf2(lvl, nvars, terms, counts);
    } else {
        torus_counts_generic(lvl, nvars, terms, counts);
    }
}

fn torus_counts_generic(
    lvl: &Level,
    nvars: usize,
    terms: &[(Vec<i64>, Vec<u8>)],
    counts: &mut [u64],
) {
    let order = lvl.card() - 1;
    let g = lvl.generator().to_vec();
    let p = lvl.p;
    // step factor of each term under one generator step of each variable
    let fac: Vec<Vec<Vec<u8>>> = (0..nvars)
        .map(|v| {
            terms
                .iter()
                .map(|(mu, _)| {
                    let e = (mu[v] as i128).rem_euclid(order as i128) as u128;
                    lvl.pow(&g, e)
                })
                .collect()
        })
        .collect();
    let mut vals: Vec<Vec<u8>> = terms.iter().map(|(_, c)| c.clone()).collect();
    let mut idx = vec![0u128; nvars];
    let mut tmp = vec![0u64; 2 * lvl.deg - 1];
    let mut out = vec![0u8; lvl.deg];
    loop {
        let mut tr = 0u64;
        for v in &vals {
            tr += lvl.trace_abs(v);
        }
        counts[(tr % p) as usize] += 1;
        // odometer step; wrapping a variable also completes its cycle
        let mut moved_all = true;
        for v in 0..nvars {
            for (val, f) in vals.iter_mut().zip(&fac[v]) {
                lvl.mul_into(val, f, &mut tmp, &mut out);
                val.copy_from_slice(&out);
            }
            idx[v] += 1;
            if idx[v] < order {
                moved_all = false;
                break;
            }
            idx[v] = 0;
        }
        if moved_all {
            break;
        }
    }
}

fn torus_counts_gf2(lvl: &Level, nvars: usize, terms: &[(Vec<i64>, Vec<u8>)], counts: &mut [u64]) {
    let order = lvl.card() - 1;
    let deg = lvl.deg as u32;
    let modbits = lvl.modulus_bits();
    let tmask = lvl.trace_mask();
    let gbits = lvl.to_bits(lvl.generator());
    let gf2_pow = |mut base: u64, mut e: u128| -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = gf2_mul(acc, base, modbits, deg);
            }
            base = gf2_mul(base, base, modbits, deg);
            e >>= 1;
        }
        acc
    };
    let fac: Vec<Vec<u64>> = (0..nvars)
        .map(|v| {
            terms
                .iter()
                .map(|(mu, _)| {
                    let e = (mu[v] as i128).rem_euclid(order as i128) as u128;
                    gf2_pow(gbits, e)
                })
                .collect()
        })
        .collect();
    let mut vals: Vec<u64> = terms.iter().map(|(_, c)| lvl.to_bits(c)).collect();
    let mut idx = vec![0u128; nvars];
    loop {
        let mut acc = 0u64;
        for &v in &vals {
            acc ^= v;
        }
        let tr = ((acc & tmask).count_ones() & 1) as usize;
        counts[tr] += 1;
        let mut moved_all = true;
        for v in 0..nvars {
            for (val, &f) in vals.iter_mut().zip(&fac[v]) {
                *val = gf2_mul(*val, f, modbits, deg);
            }
            idx[v] += 1;
            if idx[v] < order {
                moved_all = false;
                break;
            }
            idx[v] = 0;
        }
        if moved_all {
            break;
        }
    }
}

/// Carryless multiply of field elements packed in u64, reduced by the modulus
/// bits; valid for extension degree <= 32.
#[inline]
fn gf2_mul(a: u64, b: u64, modbits: u64, deg: u32) -> u64 {
    let mut acc = 0u64;
    let mut aa = a;
    let mut bb = b;
    while bb != 0 {
        if bb & 1 == 1 {
            acc ^= aa;
        }
        aa <<= 1;
        bb >>= 1;
    }
    let mut bit = 2 * deg - 2;
    while bit >= deg {
        if acc >> bit & 1 == 1 {
            acc ^= modbits << (bit - deg);
        }
        if bit == 0 {
            break;
        }
        bit -= 1;
    }
    acc & ((1u64 << deg) - 1)
}

/// A fiber L-polynomial: coefficients in `Z[zeta_p]`, constant term 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub coeffs: Vec<CycInt>,
}

impl LPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn p(&self) -> u64 {
        self.coeffs[0].p()
    }

    /// Power sums of the reciprocal roots by Newton's identities:
    /// `P(T) = prod (1 - pi_i T)`, returns `sum_i pi_i^r` for `r = 1..=count`.
    pub fn power_sums(&self, count: usize) -> Vec<CycRat> {
        let p = self.p();
        let a: Vec<CycRat> = self
            .coeffs
            .iter()
            .map(|c| CycRat::from_cyc(c.clone()))
            .collect();
        let deg = self.degree();
        let mut ps: Vec<CycRat> = vec![CycRat::zero(p)];
        for k in 1..=count {
            // p_k = -k a_k - sum_{r=1}^{k-1} p_r a_{k-r}
            let mut acc = if k <= deg {
                let kk = CycRat::from_rat(p, &Rat::from_integer(BigInt::from(k as i64)));
                -&(&kk * &a[k])
            } else {
                CycRat::zero(p)
            };
            for r in 1..k {
                if k - r <= deg {
                    let t = &ps[r] * &a[k - r];
                    acc = &acc - &t;
                }
            }
            ps.push(acc);
        }
        ps.remove(0);
        ps
    }
}

/// Builds `L(T)^{(-1)^{n+1}}` from the exact sums `S_1..S_{N+guard}`,
/// verifies the guard coefficients vanish and the kept ones are integral.
/// The power-sum contract is `sum_i pi_i^r = (-1)^n S_r`.
pub fn fiber_lpoly(
    tower: &FieldTower,
    g: &LaurentPoly,
    space: &SumSpace,
    n_expected: usize,
    guard: usize,
) -> Result<LPolynomial, ExpsumError> {
    let m = n_expected + guard;
    let sums: Vec<CycInt> = (1..=m)
        .map(|r| exp_sum(tower, g, r, space))
        .collect::<Result<_, _>>()?;
    lpoly_from_sums(tower.p(), g.n, &sums, n_expected, guard)
}

/// Same as `fiber_lpoly` but from precomputed sums `S_1..S_{N+guard}`.
pub fn lpoly_from_sums(
    p: u64,
    n_vars: usize,
    sums: &[CycInt],
    n_expected: usize,
    guard: usize,
) -> Result<LPolynomial, ExpsumError> {
    let m = n_expected + guard;
    assert!(sums.len() >= m);
    // L = exp(sum S_r T^r / r)
    let mut l: Vec<CycRat> = Vec::with_capacity(m + 1);
    l.push(CycRat::one(p));
    for k in 1..=m {
        let mut acc = CycRat::zero(p);
        for r in 1..=k {
            let t = &CycRat::from_cyc(sums[r - 1].clone()) * &l[k - r];
            acc = &acc + &t;
        }
        l.push(acc.scale_rat(&Rat::new(BigInt::from(1), BigInt::from(k as i64))));
    }
    // P = L^{(-1)^{n+1}}: the series itself for odd n, its reciprocal for even
    let coeffs: Vec<CycRat> = if n_vars % 2 == 1 {
        l
    } else {
        let mut inv: Vec<CycRat> = Vec::with_capacity(m + 1);
        inv.push(CycRat::one(p));
        for k in 1..=m {
            let mut acc = CycRat::zero(p);
            for r in 1..=k {
                let t = &l[r] * &inv[k - r];
                acc = &acc - &t;
            }
            inv.push(acc);
        }
        inv
    };
    for (i, c) in coeffs.iter().enumerate().skip(n_expected + 1) {
        if !c.is_zero() {
            return Err(ExpsumError::DegreeViolation {
                index: i,
                detail: format!("coefficient {}", c.num()),
            });
        }
    }
    let mut out = Vec::with_capacity(n_expected + 1);
    for (i, c) in coeffs.iter().enumerate().take(n_expected + 1) {
        match c.to_cyc_int() {
            Some(z) => out.push(z),
            None => return Err(ExpsumError::NonIntegralCoefficient(i)),
        }
    }
    if out[n_expected].is_zero() {
        return Err(ExpsumError::DegreeViolation {
            index: n_expected,
            detail: "leading coefficient vanishes".into(),
        });
    }
    Ok(LPolynomial { coeffs: out })
}

/// Lower convex hull of coefficient valuations, normalized so that
/// `ord(q^{deg_lambda}) = 1`; starts at (0, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(u64, Rat)>,
}

impl NewtonPolygon {
    /// Value of the polygon at abscissa x (linear interpolation).
    pub fn y_at(&self, x: &Rat) -> Rat {
        let vs = &self.vertices;
        for w in vs.windows(2) {
            let x1r = Rat::from_integer(BigInt::from(w[0].0));
            let x2r = Rat::from_integer(BigInt::from(w[1].0));
            if *x >= x1r && *x <= x2r {
                let t = (x - &x1r) / (&x2r - &x1r);
                return &w[0].1 + (&w[1].1 - &w[0].1) * t;
            }
        }
        if vs.len() == 1 && *x == Rat::from_integer(BigInt::from(vs[0].0)) {
            return vs[0].1.clone();
        }
        panic!("abscissa outside the polygon range");
    }

    pub fn extent(&self) -> u64 {
        self.vertices.last().map(|v| v.0).unwrap_or(0)
    }

    /// Unit-step slopes, one per abscissa interval.
    pub fn slopes(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let run = w[1].0 - w[0].0;
            let slope = (&w[1].1 - &w[0].1) / Rat::from_integer(BigInt::from(run));
            for _ in 0..run {
                out.push(slope.clone());
            }
        }
        out
    }

    /// Whether this polygon lies on or above `lower` at every break point.
    pub fn dominates(&self, lower: &NewtonPolygon) -> bool {
        assert_eq!(self.extent(), lower.extent(), "polygons of equal extent");
        let mut xs: Vec<u64> = self
            .vertices
            .iter()
            .chain(lower.vertices.iter())
            .map(|v| v.0)
            .collect();
        xs.sort_unstable();
        xs.dedup();
        xs.into_iter().all(|x| {
            let xr = Rat::from_integer(BigInt::from(x));
            self.y_at(&xr) >= lower.y_at(&xr)
        })
    }
}

/// Lower hull of weighted points with increasing abscissas.
pub fn lower_hull(points: Vec<(u64, Rat)>) -> NewtonPolygon {
    let mut hull: Vec<(u64, Rat)> = Vec::new();
    for (x, y) in points {
        hull.push((x, y));
        while hull.len() >= 3 {
            let n = hull.len();
            let (x1, y1) = (hull[n - 3].0, hull[n - 3].1.clone());
            let (x2, y2) = (hull[n - 2].0, hull[n - 2].1.clone());
            let (x3, y3) = (hull[n - 1].0, hull[n - 1].1.clone());
            // middle point on or above the chord: drop it
            let lhs = (&y2 - &y1) * Rat::from_integer(BigInt::from(x3 - x1));
            let rhs = (&y3 - &y1) * Rat::from_integer(BigInt::from(x2 - x1));
            if lhs >= rhs {
                hull.remove(n - 2);
            } else {
                break;
            }
        }
    }
    NewtonPolygon { vertices: hull }
}

/// Newton polygon of an L-polynomial with `ord` normalized at the fiber:
/// `ord(q^{deg_lambda}) = 1`, i.e. `ord = ord_p / (a deg_lambda)`.
pub fn newton_polygon(poly: &LPolynomial, a: u64, deg_lambda: u64) -> NewtonPolygon {
    let scale = Rat::from_integer(BigInt::from(a * deg_lambda));
    let mut pts: Vec<(u64, Rat)> = Vec::new();
    for (i, c) in poly.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue; // infinite valuation never supports the lower hull
        }
        let v = c.ord_p(1);
        let ord = match v.ord_p {
            OrdVal::Finite(r) => r / &scale,
            OrdVal::Infinite => unreachable!(),
        };
        pts.push((i as u64, ord));
    }
    lower_hull(pts)
}

/// The combinatorial lower-bound polygon: slopes are the sorted basis
/// weights, independent of the fiber.
pub fn hodge_polygon(basis: &HodgeBasis) -> NewtonPolygon {
    polygon_from_slopes(basis.weights())
}

/// Polygon whose unit slopes are the given multiset, sorted ascending.
pub fn polygon_from_slopes(mut weights: Vec<Rat>) -> NewtonPolygon {
    weights.sort();
    let mut vertices: Vec<(u64, Rat)> = vec![(0, Rat::zero())];
    let mut x = 0u64;
    let mut y = Rat::zero();
    let mut i = 0;
    while i < weights.len() {
        let mut j = i;
        while j < weights.len() && weights[j] == weights[i] {
            j += 1;
        }
        let run = (j - i) as u64;
        x += run;
        y += &weights[i] * Rat::from_integer(BigInt::from(run));
        vertices.push((x, y.clone()));
        i = j;
    }
    NewtonPolygon { vertices }
}

/// Every slope of a toric fiber polygon lies in `[0, n]`; structural check.
pub fn slopes_within(np: &NewtonPolygon, n: usize) -> bool {
    let hi = Rat::from_integer(BigInt::from(n as i64));
    np.slopes().iter().all(|s| !s.is_negative() && s <= &hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::toric::newton_data;
    use num_traits::One;

    fn single_var_poly(tower: &FieldTower, terms: &[(i64, i64)]) -> LaurentPoly {
        let mut f = LaurentPoly::new(1, 1);
        for &(e, c) in terms {
            f.add_term(tower, vec![e], tower.elem_from_int(1, c));
        }
        f
    }

    /// Reference character sum by plain enumeration and exponentiation,
    /// independent of the incremental walk.
    fn naive_exp_sum(tower: &FieldTower, g: &LaurentPoly, r: usize, space: &SumSpace) -> CycInt {
        let n = g.n;
        let target = g.level * r;
        let lvl = tower.level(target);
        let affine = space.affine_vars(n);
        let terms: Vec<(Vec<i64>, Vec<u8>)> = g
            .terms
            .iter()
            .map(|(mu, c)| (mu.clone(), tower.embed(c, target).coeffs))
            .collect();
        let mut acc = CycInt::zero(tower.p());
        let card = lvl.card();
        let mut idx = vec![0u128; n];
        'pts: loop {
            let point: Vec<Vec<u8>> = idx.iter().map(|&i| lvl.element_from_index(i)).collect();
            let ok = (0..n).all(|v| affine.contains(&v) || !lvl.is_zero(&point[v]));
            if ok {
                let mut sum = lvl.zero();
                for (mu, c) in &terms {
                    let mut val = c.clone();
                    for (x, &e) in point.iter().zip(mu.iter()) {
                        if lvl.is_zero(x) {
                            if e > 0 {
                                val = lvl.zero();
                                break;
                            }
                            assert!(e == 0, "pole in naive oracle");
                        } else {
                            let order = lvl.card() - 1;
                            let ee = (e as i128).rem_euclid(order as i128) as u128;
                            val = lvl.mul(&val, &lvl.pow(x, ee));
                        }
                    }
                    sum = lvl.add(&sum, &val);
                }
                let tr = lvl.trace_abs(&sum);
                acc += &CycInt::zeta_pow(tower.p(), tr as i64);
            }
            for v in 0..n {
                idx[v] += 1;
                if idx[v] < card {
                    continue 'pts;
                }
                idx[v] = 0;
            }
            break;
        }
        acc
    }

    #[test]
    fn character_identities() {
        let th = Character { p: 5 };
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(&th.eval(a) * &th.eval(b), th.eval(a + b));
            }
        }
        let mut sum = CycInt::zero(5);
        for v in th.table() {
            sum += &v;
        }
        assert!(sum.is_zero());
    }

    #[test]
    fn linear_sum_is_minus_one() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1)]);
        let s = exp_sum(&t, &f, 1, &SumSpace::Torus).unwrap();
        assert_eq!(s, CycInt::from_int(3, BigInt::from(-1)));
    }

    #[test]
    fn kloosterman_s1() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let s = exp_sum(&t, &f, 1, &SumSpace::Torus).unwrap();
        // zeta^2 at x=1 and zeta at x=2: total -1
        assert_eq!(s, CycInt::from_int(3, BigInt::from(-1)));
    }

    #[test]
    fn zero_polynomial_counts_points() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = LaurentPoly::new(1, 1);
        let s = exp_sum(&t, &f, 2, &SumSpace::Torus).unwrap();
        assert_eq!(s, CycInt::from_int(3, BigInt::from(8)));
    }

    #[test]
    fn pole_on_affine_domain_is_rejected() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(-1, 1)]);
        assert!(matches!(
            exp_sum(&t, &f, 1, &SumSpace::Affine),
            Err(ExpsumError::PoleOnDomain(0))
        ));
    }

    #[test]
    fn walks_match_naive_enumeration() {
        // generic odd-p path, packed p=2 path, torus/affine/mixed, r up to 3
        let cases: Vec<(u64, Vec<(Vec<i64>, i64)>, usize, SumSpace)> = vec![
            (3, vec![(vec![3], 1), (vec![1], 2)], 1, SumSpace::Torus),
            (3, vec![(vec![3], 1), (vec![1], 2)], 2, SumSpace::Torus),
            (5, vec![(vec![2], 1), (vec![-1], 3)], 2, SumSpace::Torus),
            (2, vec![(vec![3], 1), (vec![1], 1)], 3, SumSpace::Torus),
            (2, vec![(vec![1], 1), (vec![0], 1)], 2, SumSpace::Affine),
            (
                3,
                vec![(vec![1, 0], 1), (vec![0, 1], 2), (vec![1, 1], 1)],
                1,
                SumSpace::Mixed(vec![1]),
            ),
            (
                2,
                vec![(vec![1, 0], 1), (vec![0, 1], 1)],
                2,
                SumSpace::Affine,
            ),
        ];
        for (p, terms, r, space) in cases {
            let t = FieldTower::new(p, 1, None).unwrap();
            let n = terms[0].0.len();
            let mut f = LaurentPoly::new(n, 1);
            for (mu, c) in &terms {
                f.add_term(&t, mu.clone(), t.elem_from_int(1, *c));
            }
            let fast = exp_sum(&t, &f, r, &space).unwrap();
            let slow = naive_exp_sum(&t, &f, r, &space);
            assert_eq!(fast, slow, "p={} r={} space={:?}", p, r, space);
        }
    }

    #[test]
    fn fiber_lpoly_of_linear_is_one_minus_t() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1)]);
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, 1, 3).unwrap();
        assert_eq!(p.coeffs.len(), 2);
        assert_eq!(p.coeffs[0], CycInt::one(3));
        assert_eq!(p.coeffs[1], CycInt::from_int(3, BigInt::from(-1)));
    }

    #[test]
    fn kloosterman_lpolynomial() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, 2, 3).unwrap();
        assert_eq!(
            p.coeffs,
            vec![
                CycInt::one(3),
                CycInt::from_int(3, BigInt::from(-1)),
                CycInt::from_int(3, BigInt::from(3)),
            ]
        );
    }

    #[test]
    fn cube_fiber_mod_5_has_degree_three() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, 3, 3).unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.coeffs[0], CycInt::one(5));
    }

    #[test]
    fn degenerate_fiber_raises_degree_violation() {
        // x^3 in characteristic 3: the true L-function degree drops
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        let r = fiber_lpoly(&t, &f, &SumSpace::Torus, 3, 3);
        assert!(matches!(r, Err(ExpsumError::DegreeViolation { .. })));
    }

    #[test]
    fn power_sum_contract() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let n_exp = 2;
        let guard = 3;
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, n_exp, guard).unwrap();
        let ps = p.power_sums(n_exp + guard);
        for r in 1..=n_exp + guard {
            let s = exp_sum(&t, &f, r, &SumSpace::Torus).unwrap();
            // sum pi^r = (-1)^n S_r with n = 1
            let expect = CycRat::from_cyc(-&s);
            assert_eq!(ps[r - 1], expect, "power sum at r = {}", r);
        }
    }

    #[test]
    fn newton_polygon_of_kloosterman() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, 2, 3).unwrap();
        let np = newton_polygon(&p, 1, 1);
        assert_eq!(np.slopes(), vec![rat_int(0), rat_int(1)]);

        let nd = newton_data(&f).unwrap();
        let basis = crate::toric::hodge_basis(&t, &f, &nd).unwrap();
        let hp = hodge_polygon(&basis);
        assert_eq!(hp.slopes(), vec![rat_int(0), rat_int(1)]);
        assert!(np.dominates(&hp));
        assert!(hp.dominates(&np)); // equality here
    }

    #[test]
    fn newton_polygon_simple_cases() {
        // 1 - T: single slope 0
        let one_minus_t = LPolynomial {
            coeffs: vec![CycInt::one(3), CycInt::from_int(3, BigInt::from(-1))],
        };
        assert_eq!(
            newton_polygon(&one_minus_t, 1, 1).slopes(),
            vec![rat_int(0)]
        );
        // 1 + pT: slope 1
        let one_plus_pt = LPolynomial {
            coeffs: vec![CycInt::one(3), CycInt::from_int(3, BigInt::from(3))],
        };
        assert_eq!(
            newton_polygon(&one_plus_pt, 1, 1).slopes(),
            vec![rat_int(1)]
        );
    }

    #[test]
    fn cube_polygons_dominate() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        let p = fiber_lpoly(&t, &f, &SumSpace::Torus, 3, 3).unwrap();
        let np = newton_polygon(&p, 1, 1);
        let nd = newton_data(&f).unwrap();
        let basis = crate::toric::hodge_basis(&t, &f, &nd).unwrap();
        let hp = hodge_polygon(&basis);
        assert_eq!(hp.slopes(), vec![rat_int(0), rat(1, 3), rat(2, 3)]);
        assert!(np.dominates(&hp));
        assert!(slopes_within(&np, 1));
    }

    #[test]
    fn gf2_mul_agrees_with_generic() {
        let t = FieldTower::new(2, 1, None).unwrap();
        let l = t.level(6);
        let modbits = l.modulus_bits();
        for i in 0..64u128 {
            for j in [0u128, 1, 5, 17, 33, 63] {
                let x = l.element_from_index(i);
                let y = l.element_from_index(j);
                let expect = l.to_bits(&l.mul(&x, &y));
                let got = gf2_mul(l.to_bits(&x), l.to_bits(&y), modbits, l.deg as u32);
                assert_eq!(expect, got);
            }
        }
    }

    #[test]
    fn mixed_space_sums_match_naive() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let mut f = LaurentPoly::new(2, 1);
        f.add_term(&t, vec![1, 0], t.elem_from_int(1, 1));
        f.add_term(&t, vec![0, 2], t.elem_from_int(1, 2));
        let full = exp_sum(&t, &f, 1, &SumSpace::Affine).unwrap();
        assert_eq!(full, naive_exp_sum(&t, &f, 1, &SumSpace::Affine));
        let mixed = exp_sum(&t, &f, 1, &SumSpace::Mixed(vec![0])).unwrap();
        assert_eq!(mixed, naive_exp_sum(&t, &f, 1, &SumSpace::Mixed(vec![0])));
    }

    #[test]
    fn polygon_from_slopes_merges_runs() {
        let np = polygon_from_slopes(vec![rat_int(1), rat_int(0), rat_int(1)]);
        assert_eq!(np.vertices.len(), 3);
        assert_eq!(np.extent(), 3);
        assert_eq!(np.y_at(&rat_int(3)), rat_int(2));
        assert!(Rat::one().is_one());
    }
}
