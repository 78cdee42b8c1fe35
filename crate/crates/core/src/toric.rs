//! Laurent polynomials over `F_q`, their Newton polyhedron at infinity, face
//! nondegeneracy, the cofacial graded ring, the monomial (Hodge) basis of the
//! graded quotient by the logarithmic Jacobian ideal, and the alternating
//! volume sum that counts the mixed toric/affine fiber rank.

use crate::ffield::{FieldTower, FqElem, Level};
use crate::polytope::{build_polytope, Face, PolytopeError, QPoint, RationalPolytope};
use crate::rat::{factorial, Rat};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("Newton polyhedron has dimension {got}, the toric pipeline needs {needed}")]
    DimensionDeficient { needed: usize, got: usize },
    #[error("lattice point outside the cone of the polytope")]
    NotInCone,
    #[error("monomial basis outgrew n! vol or failed to stabilize by weight n+1: {0}")]
    RankOverflow(String),
    #[error("not convenient: restricted Newton polyhedron at {0:?} is dimension-deficient")]
    NotConvenient(Vec<usize>),
    #[error("variable {0} occurs with a negative exponent but must be polynomial")]
    AffinePole(usize),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// A Laurent polynomial with coefficients at a tower level; zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub n: usize,
    pub level: usize,
    pub terms: BTreeMap<Vec<i64>, FqElem>,
}

impl LaurentPoly {
    pub fn new(n: usize, level: usize) -> Self {
        LaurentPoly {
            n,
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, tower: &FieldTower, expo: Vec<i64>, coeff: FqElem) {
        assert_eq!(expo.len(), self.n);
        assert_eq!(coeff.level, self.level);
        if coeff.is_zero() {
            return;
        }
        let lvl = tower.level(self.level);
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let summed = lvl.add(&e.get().coeffs, &coeff.coeffs);
                if summed.iter().all(|&c| c == 0) {
                    e.remove();
                } else {
                    e.get_mut().coeffs = summed;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }
}

/// The Newton polyhedron at infinity of a Laurent polynomial, with the closed
/// faces not containing the origin.
#[derive(Clone, Debug)]
pub struct NewtonData {
    pub delta: RationalPolytope,
    pub faces: Vec<Face>,
}

/// `Delta = conv(Supp(f) U {0})`, full-dimensional by hypothesis.
pub fn newton_data(f: &LaurentPoly) -> Result<NewtonData, ToricError> {
    assert!(!f.is_zero(), "zero polynomial has no Newton data");
    let pts: Vec<QPoint> = f.support().iter().map(|mu| QPoint::from_ints(mu)).collect();
    let delta = build_polytope(f.n, &pts)?;
    if delta.span_dim() != f.n {
        return Err(ToricError::DimensionDeficient {
            needed: f.n,
            got: delta.span_dim(),
        });
    }
    let faces = delta.faces_not_containing_origin();
    Ok(NewtonData { delta, faces })
}

fn expo_to_big(mu: &[i64]) -> Vec<BigInt> {
    mu.iter().map(|&x| BigInt::from(x)).collect()
}

/// Whether the rays through `mu` and `nu` exit the polytope through a common
/// closed face: some facet off the origin attains both weights. Governs
/// graded multiplication; 0 is cofacial with everything.
pub fn cofacial(delta: &RationalPolytope, mu: &[i64], nu: &[i64]) -> Result<bool, ToricError> {
    let bu = expo_to_big(mu);
    let bv = expo_to_big(nu);
    let wu = delta.weight(&bu).ok_or(ToricError::NotInCone)?;
    let wv = delta.weight(&bv).ok_or(ToricError::NotInCone)?;
    if wu.is_zero() || wv.is_zero() {
        return Ok(true);
    }
    let yu = delta.span_coords_int(&bu).expect("in cone implies in span");
    let yv = delta.span_coords_int(&bv).expect("in cone implies in span");
    for f in delta.outer_facets() {
        if f.form.eval(&yu) == wu && f.form.eval(&yv) == wv {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Graded product `x^mu * x^nu`: the monomial `x^{mu+nu}` when cofacial,
/// `None` (zero in the graded ring) otherwise.
pub fn graded_product(
    delta: &RationalPolytope,
    mu: &[i64],
    nu: &[i64],
) -> Result<Option<Vec<i64>>, ToricError> {
    if cofacial(delta, mu, nu)? {
        Ok(Some(mu.iter().zip(nu).map(|(a, b)| a + b).collect()))
    } else {
        Ok(None)
    }
}

/// Outcome of the face-by-face nondegeneracy search up to extension degree
/// `k_max`; the algebraic-closure statement is certified only that far.
#[derive(Clone, Debug)]
pub enum Nondegeneracy {
    CertifiedUpTo(usize),
    Degenerate { face: usize, witness: Vec<FqElem> },
}

impl Nondegeneracy {
    pub fn is_certified(&self) -> bool {
        matches!(self, Nondegeneracy::CertifiedUpTo(_))
    }
}

/// For every closed face off the origin, searches `(F_{q^k}^*)^n`, k <= k_max,
/// for a common zero of the logarithmic partials of the face restriction.
pub fn is_nondegenerate(
    tower: &FieldTower,
    f: &LaurentPoly,
    nd: &NewtonData,
    k_max: usize,
) -> Nondegeneracy {
    assert_eq!(f.level, 1, "nondegeneracy is checked over the base field");
    let n = f.n;
    let p = tower.p() as i64;
    let lvl1 = tower.level(1);
    for (fi, face) in nd.faces.iter().enumerate() {
        let face_terms: Vec<(&Vec<i64>, &FqElem)> = f
            .terms
            .iter()
            .filter(|(mu, _)| nd.delta.on_face(face, &expo_to_big(mu)))
            .collect();
        let mut partials: Vec<Vec<(Vec<i64>, FqElem)>> = Vec::with_capacity(n);
        for l in 0..n {
            let mut terms = Vec::new();
            for (mu, c) in &face_terms {
                let fac = mu[l].rem_euclid(p) as u8;
                if fac == 0 {
                    continue;
                }
                terms.push((
                    (*mu).clone(),
                    FqElem {
                        level: 1,
                        coeffs: lvl1.scale(&c.coeffs, fac),
                    },
                ));
            }
            partials.push(terms);
        }
        for k in 1..=k_max {
            let lvl = tower.level(k);
            let embedded: Vec<Vec<(Vec<i64>, Vec<u8>)>> = partials
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|(mu, c)| (mu.clone(), tower.embed(c, k).coeffs))
                        .collect()
                })
                .collect();
            if let Some(witness) = common_torus_zero(&lvl, n, &embedded) {
                return Nondegeneracy::Degenerate {
                    face: fi,
                    witness: witness
                        .into_iter()
                        .map(|coeffs| FqElem { level: k, coeffs })
                        .collect(),
                };
            }
        }
    }
    Nondegeneracy::CertifiedUpTo(k_max)
}

/// First point of `(F^*)^n` (in generator-power order) where all the given
/// polynomials vanish simultaneously.
fn common_torus_zero(
    lvl: &Level,
    n: usize,
    polys: &[Vec<(Vec<i64>, Vec<u8>)>],
) -> Option<Vec<Vec<u8>>> {
    let order = lvl.card() - 1;
    let g = lvl.generator().to_vec();
    let mut exps = vec![0u128; n];
    'points: loop {
        let mut all_zero = true;
        for terms in polys {
            let mut acc = lvl.zero();
            for (mu, c) in terms {
                // x^mu = g^(sum exps_i mu_i mod order)
                let mut e: i128 = 0;
                for (&ei, &mi) in exps.iter().zip(mu.iter()) {
                    e += ei as i128 * mi as i128;
                }
                let e = e.rem_euclid(order as i128) as u128;
                let val = lvl.mul(c, &lvl.pow(&g, e));
                acc = lvl.add(&acc, &val);
            }
            if !lvl.is_zero(&acc) {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Some(exps.iter().map(|&e| lvl.pow(&g, e)).collect());
        }
        for i in 0..n {
            exps[i] += 1;
            if exps[i] < order {
                continue 'points;
            }
            exps[i] = 0;
        }
        return None;
    }
}

/// Monomial basis of the graded quotient with its weights, sorted by weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeBasis {
    pub monomials: Vec<(Vec<i64>, Rat)>,
}

impl HodgeBasis {
    pub fn weights(&self) -> Vec<Rat> {
        self.monomials.iter().map(|(_, w)| w.clone()).collect()
    }

    /// Generating polynomial `sum_beta T^(D w(beta))`, comparable with the
    /// Poincare numerator of the full-dimensional Newton polyhedron.
    pub fn weight_generating_poly(&self, d: u64) -> Vec<BigInt> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (_, w) in &self.monomials {
            let idx = (w * Rat::from_integer(BigInt::from(d)))
                .to_integer()
                .to_usize()
                .expect("small weight index");
            if coeffs.len() <= idx {
                coeffs.resize(idx + 1, BigInt::zero());
            }
            coeffs[idx] += 1;
        }
        coeffs
    }
}

/// Builds the monomial basis of `R-bar / sum_l (x_l df/dx_l)^(1) R-bar` level
/// by level: at each weight, row-reduce graded multiplication by the weight-1
/// parts of the logarithmic partials from one level down, and complete the
/// image with monomials (largest exponent vector first) to span the level.
/// Stops once the basis reaches `n! vol` and the next levels through weight
/// n+1 contribute nothing; anything else is a `RankOverflow`.
pub fn hodge_basis(
    tower: &FieldTower,
    f: &LaurentPoly,
    nd: &NewtonData,
) -> Result<HodgeBasis, ToricError> {
    assert_eq!(f.level, 1);
    let n = f.n;
    let delta = &nd.delta;
    let lvl = tower.level(1);
    let d = delta.weight_denominator();
    let vol_scaled = Rat::from_integer(factorial(n)) * delta.normalized_volume();
    assert!(vol_scaled.is_integer(), "n! vol of a lattice polytope");
    let target: usize = vol_scaled
        .to_integer()
        .to_usize()
        .expect("desk-scale basis size");

    // weight-1 parts of the logarithmic partials
    let one = Rat::from_integer(BigInt::from(1));
    let mut gens: Vec<Vec<(Vec<i64>, Vec<u8>)>> = Vec::with_capacity(n);
    for l in 0..n {
        let mut terms = Vec::new();
        for (mu, c) in &f.terms {
            let w = delta
                .weight(&expo_to_big(mu))
                .expect("support lies in the cone");
            if w != one {
                continue;
            }
            let fac = mu[l].rem_euclid(tower.p() as i64) as u8;
            if fac == 0 {
                continue;
            }
            terms.push((mu.clone(), lvl.scale(&c.coeffs, fac)));
        }
        gens.push(terms);
    }

    // monomials of the cone grouped by scaled weight N = D w
    let cutoff = Rat::from_integer(BigInt::from(n as i64 + 1));
    let pts = delta.lattice_points_up_to_weight(&cutoff);
    let mut by_level: BTreeMap<u64, Vec<Vec<i64>>> = BTreeMap::new();
    for (u, w) in pts {
        let nidx: u64 = (w * Rat::from_integer(BigInt::from(d)))
            .to_integer()
            .to_u64()
            .expect("scaled weight fits");
        let mu: Vec<i64> = u.iter().map(|x| x.to_i64().expect("small exponent")).collect();
        by_level.entry(nidx).or_default().push(mu);
    }

    let mut basis: Vec<(Vec<i64>, Rat)> = Vec::new();
    let max_level = (n as u64 + 1) * d;
    for nidx in 0..=max_level {
        let Some(targets) = by_level.get(&nidx) else {
            continue;
        };
        // deterministic preference order: larger exponent vectors first
        let mut targets = targets.clone();
        targets.sort();
        targets.reverse();
        let index_of: BTreeMap<&Vec<i64>, usize> =
            targets.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = targets.len();
        // image columns: g_l * s for every source monomial s one level down
        let mut columns: Vec<Vec<Vec<u8>>> = Vec::new();
        if nidx >= d {
            if let Some(sources) = by_level.get(&(nidx - d)) {
                for s in sources {
                    for terms in &gens {
                        let mut col = vec![lvl.zero(); dim];
                        let mut nonzero = false;
                        for (mu, c) in terms {
                            if !cofacial(delta, mu, s)? {
                                continue;
                            }
                            let prod: Vec<i64> =
                                mu.iter().zip(s.iter()).map(|(a, b)| a + b).collect();
                            let row = *index_of
                                .get(&prod)
                                .expect("graded product stays on its weight level");
                            col[row] = lvl.add(&col[row], c);
                            nonzero = true;
                        }
                        if nonzero {
                            columns.push(col);
                        }
                    }
                }
            }
        }
        // row-reduce the image, then greedily complete with unit vectors
        let mut echelon: Vec<(usize, Vec<Vec<u8>>)> = Vec::new(); // (pivot row, column)
        for col in columns {
            reduce_and_insert(&lvl, &mut echelon, col);
        }
        let rank = echelon.len();
        for (i, m) in targets.iter().enumerate() {
            let mut unit = vec![lvl.zero(); dim];
            unit[i] = lvl.one();
            if reduce_and_insert(&lvl, &mut echelon, unit) {
                let w = Rat::new(BigInt::from(nidx), BigInt::from(d));
                basis.push((m.clone(), w));
            }
        }
        let _ = rank;
        if basis.len() > target {
            return Err(ToricError::RankOverflow(format!(
                "basis reached {} monomials, n! vol = {}",
                basis.len(),
                target
            )));
        }
        if nidx > (n as u64) * d && basis.len() == target {
            // levels past weight n must contribute nothing
        }
        if nidx > (n as u64) * d {
            let added_here = basis.iter().any(|(_, w)| {
                w == &Rat::new(BigInt::from(nidx), BigInt::from(d))
            });
            if added_here {
                return Err(ToricError::RankOverflow(format!(
                    "nonzero cokernel at weight {}/{} > n",
                    nidx, d
                )));
            }
        }
    }
    if basis.len() != target {
        return Err(ToricError::RankOverflow(format!(
            "basis stabilized at {} monomials, n! vol = {}",
            basis.len(),
            target
        )));
    }
    basis.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(HodgeBasis { monomials: basis })
}

/// Gaussian elimination step over the level: reduces `col` against the echelon
/// set and inserts it when independent. Returns whether it was inserted.
fn reduce_and_insert(
    lvl: &Level,
    echelon: &mut Vec<(usize, Vec<Vec<u8>>)>,
    mut col: Vec<Vec<u8>>,
) -> bool {
    loop {
        let Some(pivot) = col.iter().position(|e| !lvl.is_zero(e)) else {
            return false;
        };
        if let Some((_, existing)) = echelon.iter().find(|(p, _)| *p == pivot) {
            // eliminate: col -= col[pivot] / existing[pivot] * existing
            let factor = lvl.mul(&col[pivot], &lvl.inv(&existing[pivot]));
            for (c, e) in col.iter_mut().zip(existing.iter()) {
                let sub = lvl.mul(&factor, e);
                *c = lvl.sub(c, &sub);
            }
        } else {
            echelon.push((pivot, col));
            return true;
        }
    }
}

/// Alternating volume sum over subsets of the affine variable set: the fiber
/// rank for mixed toric/affine point counts. `s2` holds variable indices that
/// must appear polynomially.
pub fn upsilon(f: &LaurentPoly, s2: &[usize]) -> Result<Rat, ToricError> {
    let n = f.n;
    for (mu, _) in &f.terms {
        for &v in s2 {
            if mu[v] < 0 {
                return Err(ToricError::AffinePole(v));
            }
        }
    }
    let mut total = Rat::zero();
    let k = s2.len();
    for mask in 0u64..(1 << k) {
        let a: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s2[i]).collect();
        let keep: Vec<usize> = (0..n).filter(|v| !a.contains(v)).collect();
        let sign = if a.len() % 2 == 0 { 1i64 } else { -1 };
        let term = if keep.is_empty() {
            // all variables restricted away: the point polytope in R^0 has
            // normalized zero-dimensional volume 1
            Rat::from_integer(BigInt::from(sign))
        } else {
            let supp: Vec<QPoint> = f
                .terms
                .keys()
                .filter(|mu| a.iter().all(|&v| mu[v] == 0))
                .map(|mu| QPoint::from_ints(&keep.iter().map(|&v| mu[v]).collect::<Vec<_>>()))
                .collect();
            let poly = build_polytope(keep.len(), &supp)?;
            if poly.span_dim() != keep.len() {
                return Err(ToricError::NotConvenient(a.clone()));
            }
            Rat::from_integer(BigInt::from(sign))
                * Rat::from_integer(factorial(keep.len()))
                * poly.normalized_volume()
        };
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn single_var_poly(tower: &FieldTower, terms: &[(i64, i64)]) -> LaurentPoly {
        let mut f = LaurentPoly::new(1, 1);
        for &(e, c) in terms {
            f.add_term(tower, vec![e], tower.elem_from_int(1, c));
        }
        f
    }

    #[test]
    fn newton_data_of_cube_and_kloosterman() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        let nd = newton_data(&f).unwrap();
        assert_eq!(nd.faces.len(), 1);
        assert!(nd.delta.on_face(&nd.faces[0], &[BigInt::from(3)]));

        let t3 = FieldTower::new(3, 1, None).unwrap();
        let g = single_var_poly(&t3, &[(1, 1), (-1, 1)]);
        let nd = newton_data(&g).unwrap();
        assert_eq!(nd.faces.len(), 2);
    }

    #[test]
    fn dimension_deficient_is_reported() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let mut f = LaurentPoly::new(2, 1);
        f.add_term(&t, vec![1, 1], t.elem_from_int(1, 1));
        // support {(1,1)} spans only a line in R^2
        assert!(matches!(
            newton_data(&f),
            Err(ToricError::DimensionDeficient { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn nondegeneracy_of_cube_depends_on_characteristic() {
        let t5 = FieldTower::new(5, 1, None).unwrap();
        let f5 = single_var_poly(&t5, &[(3, 1)]);
        let nd5 = newton_data(&f5).unwrap();
        assert!(is_nondegenerate(&t5, &f5, &nd5, 3).is_certified());

        let t3 = FieldTower::new(3, 1, None).unwrap();
        let f3 = single_var_poly(&t3, &[(3, 1)]);
        let nd3 = newton_data(&f3).unwrap();
        match is_nondegenerate(&t3, &f3, &nd3, 2) {
            Nondegeneracy::Degenerate { witness, .. } => {
                // 3 x^3 vanishes identically; the first torus point works
                assert!(witness[0].coeffs == vec![1]);
            }
            _ => panic!("x^3 must be degenerate in characteristic 3"),
        }
    }

    #[test]
    fn kloosterman_is_nondegenerate_mod_3() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let nd = newton_data(&f).unwrap();
        assert!(is_nondegenerate(&t, &f, &nd, 3).is_certified());
    }

    #[test]
    fn cofacial_rules_on_symmetric_interval() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let nd = newton_data(&f).unwrap();
        assert!(cofacial(&nd.delta, &[1], &[2]).unwrap());
        assert!(!cofacial(&nd.delta, &[1], &[-1]).unwrap());
        assert!(cofacial(&nd.delta, &[0], &[-2]).unwrap());
    }

    #[test]
    fn cofaciality_matches_weight_additivity() {
        use rand::{Rng, SeedableRng};
        let t = FieldTower::new(3, 1, None).unwrap();
        let mut f2 = LaurentPoly::new(2, 1);
        for (e, c) in [(vec![2i64, 0], 1i64), (vec![0, 2], 1), (vec![-1, -1], 1)] {
            f2.add_term(&t, e, t.elem_from_int(1, c));
        }
        let nd = newton_data(&f2).unwrap();
        let pts = nd
            .delta
            .lattice_points_up_to_weight(&rat_int(3));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let (u, wu) = &pts[rng.gen_range(0..pts.len())];
            let (v, wv) = &pts[rng.gen_range(0..pts.len())];
            let mu: Vec<i64> = u.iter().map(|x| x.to_i64().unwrap()).collect();
            let nu: Vec<i64> = v.iter().map(|x| x.to_i64().unwrap()).collect();
            let sum: Vec<BigInt> = u.iter().zip(v).map(|(a, b)| a + b).collect();
            let ws = nd.delta.weight(&sum).unwrap();
            let additive = ws == wu + wv;
            assert_eq!(
                cofacial(&nd.delta, &mu, &nu).unwrap(),
                additive,
                "mu={:?} nu={:?}",
                mu,
                nu
            );
        }
    }

    #[test]
    fn graded_multiplication_is_associative() {
        use rand::{Rng, SeedableRng};
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let nd = newton_data(&f).unwrap();
        let pts = nd.delta.lattice_points_up_to_weight(&rat_int(4));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let as_i64 = |u: &Vec<BigInt>| -> Vec<i64> { u.iter().map(|x| x.to_i64().unwrap()).collect() };
        for _ in 0..100 {
            let a = as_i64(&pts[rng.gen_range(0..pts.len())].0);
            let b = as_i64(&pts[rng.gen_range(0..pts.len())].0);
            let c = as_i64(&pts[rng.gen_range(0..pts.len())].0);
            let left = match graded_product(&nd.delta, &a, &b).unwrap() {
                None => None,
                Some(ab) => graded_product(&nd.delta, &ab, &c).unwrap(),
            };
            let right = match graded_product(&nd.delta, &b, &c).unwrap() {
                None => None,
                Some(bc) => graded_product(&nd.delta, &a, &bc).unwrap(),
            };
            assert_eq!(left, right);
        }
    }

    #[test]
    fn hodge_basis_of_cube() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        let nd = newton_data(&f).unwrap();
        let b = hodge_basis(&t, &f, &nd).unwrap();
        assert_eq!(
            b.monomials,
            vec![
                (vec![0], rat_int(0)),
                (vec![1], rat(1, 3)),
                (vec![2], rat(2, 3)),
            ]
        );
    }

    #[test]
    fn hodge_basis_of_kloosterman() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let f = single_var_poly(&t, &[(1, 1), (-1, 1)]);
        let nd = newton_data(&f).unwrap();
        let b = hodge_basis(&t, &f, &nd).unwrap();
        assert_eq!(b.monomials, vec![(vec![0], rat_int(0)), (vec![1], rat_int(1))]);
    }

    #[test]
    fn hodge_count_matches_volume_in_two_variables() {
        let t = FieldTower::new(3, 1, None).unwrap();
        let mut f = LaurentPoly::new(2, 1);
        f.add_term(&t, vec![1, 0], t.elem_from_int(1, 1));
        f.add_term(&t, vec![0, 1], t.elem_from_int(1, 1));
        let nd = newton_data(&f).unwrap();
        assert!(is_nondegenerate(&t, &f, &nd, 2).is_certified());
        let b = hodge_basis(&t, &f, &nd).unwrap();
        assert_eq!(b.monomials.len(), 1); // 2! * 1/2
        assert_eq!(b.monomials[0], (vec![0, 0], rat_int(0)));
    }

    #[test]
    fn hodge_weights_generate_the_poincare_numerator() {
        // for full-dimensional Delta the basis weight polynomial equals Pnum
        let cases: Vec<(u64, Vec<(i64, i64)>)> = vec![
            (5, vec![(3, 1)]),
            (3, vec![(1, 1), (-1, 1)]),
            (5, vec![(2, 1), (-1, 1)]),
        ];
        for (p, terms) in cases {
            let t = FieldTower::new(p, 1, None).unwrap();
            let f = single_var_poly(&t, &terms);
            let nd = newton_data(&f).unwrap();
            assert!(is_nondegenerate(&t, &f, &nd, 2).is_certified());
            let b = hodge_basis(&t, &f, &nd).unwrap();
            let d = nd.delta.weight_denominator();
            let pnum = crate::polytope::poincare_series(&nd.delta, 1).unwrap();
            let mut gen = b.weight_generating_poly(d);
            let mut expected = pnum.coeffs.clone();
            while gen.len() < expected.len() {
                gen.push(BigInt::zero());
            }
            while expected.len() < gen.len() {
                expected.push(BigInt::zero());
            }
            assert_eq!(gen, expected, "p = {}, terms = {:?}", p, terms);
        }
    }

    #[test]
    fn upsilon_examples() {
        let t = FieldTower::new(5, 1, None).unwrap();
        let f = single_var_poly(&t, &[(3, 1)]);
        // affine point count rank: 3 - 1 = 2
        assert_eq!(upsilon(&f, &[0]).unwrap(), rat_int(2));
        // no affine variables: n! vol
        assert_eq!(upsilon(&f, &[]).unwrap(), rat_int(3));

        let t3 = FieldTower::new(3, 1, None).unwrap();
        let g = single_var_poly(&t3, &[(1, 1), (-1, 1)]);
        assert_eq!(upsilon(&g, &[]).unwrap(), rat_int(2));
        assert!(matches!(upsilon(&g, &[0]), Err(ToricError::AffinePole(0))));
    }
}
