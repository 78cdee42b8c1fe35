//! Vertex-presented rational polytopes containing the origin: facet
//! enumeration by exhaustive hyperplane search, polyhedral weight functions,
//! lattice-normalized volumes, lattice-point enumeration and Poincare series.
//!
//! Every polytope here is `conv(points U {0})`. Computations happen in the
//! coordinates of a saturated lattice basis of `span(P) n Z^ambient`, so the
//! volume is normalized to the integer lattice of the span and weights of
//! ambient lattice points are exact rationals in `(1/D) Z_{>=0}`.

use crate::intlin;
use crate::rat::{denominator_lcm, factorial, rat_ceil, rat_floor, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoint(pub Vec<Rat>);

impl QPoint {
    pub fn from_ints(v: &[i64]) -> Self {
        QPoint(v.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("points of differing dimension: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("computed weight counts do not fit the rational Poincare form: {0}")]
    SeriesMismatch(String),
}

/// Linear form in span coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinForm {
    pub coeffs: Vec<Rat>,
}

impl LinForm {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (c, v) in self.coeffs.iter().zip(x) {
            acc += c * v;
        }
        acc
    }
}

/// A facet together with the vertices lying on it.
#[derive(Clone, Debug)]
pub struct Facet {
    /// Outer facets: `form == 1` on the facet, `< 1` on the other vertices.
    /// Cone facets (those containing 0): `form == 0` on the facet, `> 0` inside.
    pub form: LinForm,
    pub vertex_ids: Vec<usize>,
}

/// A closed face that does not contain the origin, recorded by its active
/// facet sets and its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub outer: Vec<usize>,
    pub cone: Vec<usize>,
    pub vertex_ids: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RationalPolytope {
    ambient_dim: usize,
    span_dim: usize,
    vertices: Vec<Vec<Rat>>,      // ambient coordinates, irredundant
    lattice_basis: Vec<Vec<BigInt>>, // span_dim x ambient_dim
    vertices_span: Vec<Vec<Rat>>, // span coordinates
    outer_facets: Vec<Facet>,
    cone_facets: Vec<Facet>,
}

/// Weight function of a polytope: values of ambient lattice points lie in
/// `(1/D) Z_{>=0}`.
#[derive(Clone, Debug)]
pub struct WeightFn<'a> {
    pub poly: &'a RationalPolytope,
    pub d: u64,
}

impl<'a> WeightFn<'a> {
    pub fn weight(&self, u: &[BigInt]) -> Option<Rat> {
        self.poly.weight(u)
    }
}

/// Convex hull of `points U {0}`.
pub fn build_polytope(ambient_dim: usize, points: &[QPoint]) -> Result<RationalPolytope, PolytopeError> {
    for p in points {
        if p.0.len() != ambient_dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: ambient_dim,
                got: p.0.len(),
            });
        }
    }
    let mut pts: Vec<Vec<Rat>> = vec![vec![Rat::zero(); ambient_dim]];
    for p in points {
        if !pts.contains(&p.0) {
            pts.push(p.0.clone());
        }
    }

    let basis = intlin::span_lattice_basis(&pts, ambient_dim);
    let span_dim = basis.len();
    if span_dim == 0 {
        return Ok(RationalPolytope {
            ambient_dim,
            span_dim: 0,
            vertices: vec![vec![Rat::zero(); ambient_dim]],
            lattice_basis: basis,
            vertices_span: vec![Vec::new()],
            outer_facets: Vec::new(),
            cone_facets: Vec::new(),
        });
    }

    let pts_span: Vec<Vec<Rat>> = pts
        .iter()
        .map(|p| intlin::coords_in_rowspace(&basis, p).expect("point inside its own span"))
        .collect();

    let hyps = supporting_hyperplanes(&pts_span);

    // vertices: points whose active facet normals span the whole space
    let mut vertex_ids = Vec::new();
    for (i, p) in pts_span.iter().enumerate() {
        let active: Vec<Vec<Rat>> = hyps
            .iter()
            .filter(|h| (h.normal_eval(p) + &h.offset).is_zero())
            .map(|h| h.normal.clone())
            .collect();
        if intlin::rank_rat(&active) == span_dim {
            vertex_ids.push(i);
        }
    }

    let vertices: Vec<Vec<Rat>> = vertex_ids.iter().map(|&i| pts[i].clone()).collect();
    let vertices_span: Vec<Vec<Rat>> = vertex_ids.iter().map(|&i| pts_span[i].clone()).collect();

    let mut outer_facets = Vec::new();
    let mut cone_facets = Vec::new();
    for h in &hyps {
        let on: Vec<usize> = vertices_span
            .iter()
            .enumerate()
            .filter(|(_, v)| (h.normal_eval(v) + &h.offset).is_zero())
            .map(|(i, _)| i)
            .collect();
        // polytope side is normal . x + offset <= 0
        let c = -h.offset.clone();
        if c.is_zero() {
            // facet through the origin; inner side is -normal . x >= 0
            cone_facets.push(Facet {
                form: LinForm {
                    coeffs: h.normal.iter().map(|a| -a.clone()).collect(),
                },
                vertex_ids: on,
            });
        } else {
            // normalize to form == 1 on the facet
            let inv = c.recip();
            outer_facets.push(Facet {
                form: LinForm {
                    coeffs: h.normal.iter().map(|a| a * &inv).collect(),
                },
                vertex_ids: on,
            });
        }
    }
    sort_facets(&mut outer_facets);
    sort_facets(&mut cone_facets);

    Ok(RationalPolytope {
        ambient_dim,
        span_dim,
        vertices,
        lattice_basis: basis,
        vertices_span,
        outer_facets,
        cone_facets,
    })
}

fn sort_facets(fs: &mut [Facet]) {
    fs.sort_by(|a, b| a.form.coeffs.cmp(&b.form.coeffs));
}

struct Hyperplane {
    normal: Vec<Rat>,
    offset: Rat,
}

impl Hyperplane {
    fn normal_eval(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (a, v) in self.normal.iter().zip(x) {
            acc += a * v;
        }
        acc
    }
}

/// All supporting hyperplanes of `conv(points)` that contain a facet, found by
/// exhaustive search over point subsets. `points` must span R^d affinely
/// (the origin is among them and they span linearly by construction).
fn supporting_hyperplanes(points: &[Vec<Rat>]) -> Vec<Hyperplane> {
    let d = points[0].len();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut out = Vec::new();
    let idx: Vec<usize> = (0..points.len()).collect();
    for subset in combinations(&idx, d) {
        // solve a . p + b = 0 for all p in the subset
        let rows: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&i| {
                let mut row = points[i].clone();
                row.push(Rat::one());
                row
            })
            .collect();
        let kern = intlin::kernel_rat(&rows);
        if kern.len() != 1 {
            continue;
        }
        let v = &kern[0];
        let (normal, offset) = (v[..d].to_vec(), v[d].clone());
        if normal.iter().all(|a| a.is_zero()) {
            continue;
        }
        // one-side test
        let mut pos = false;
        let mut neg = false;
        for p in points {
            let mut val = offset.clone();
            for (a, x) in normal.iter().zip(p) {
                val += a * x;
            }
            if val.is_positive() {
                pos = true;
            } else if val.is_negative() {
                neg = true;
            }
            if pos && neg {
                break;
            }
        }
        if pos && neg {
            continue;
        }
        // normalize: polytope on the <= 0 side, first nonzero normal entry +-1
        let flip = pos;
        let mut normal: Vec<Rat> = if flip {
            normal.iter().map(|a| -a.clone()).collect()
        } else {
            normal
        };
        let mut offset = if flip { -offset } else { offset };
        let scale = normal
            .iter()
            .find(|a| !a.is_zero())
            .expect("nonzero normal")
            .abs()
            .recip();
        for a in normal.iter_mut() {
            *a = &*a * &scale;
        }
        offset = &offset * &scale;
        let mut key = normal.clone();
        key.push(offset.clone());
        if seen.insert(key) {
            out.push(Hyperplane { normal, offset });
        }
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl RationalPolytope {
    /// A point polytope `{0}` in a 0-dimensional ambient space.
    pub fn zero_dim() -> Self {
        RationalPolytope {
            ambient_dim: 0,
            span_dim: 0,
            vertices: vec![Vec::new()],
            lattice_basis: Vec::new(),
            vertices_span: vec![Vec::new()],
            outer_facets: Vec::new(),
            cone_facets: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the smallest linear subspace containing the polytope.
    pub fn span_dim(&self) -> usize {
        self.span_dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn outer_facets(&self) -> &[Facet] {
        &self.outer_facets
    }

    pub fn cone_facets(&self) -> &[Facet] {
        &self.cone_facets
    }

    pub fn is_origin_only(&self) -> bool {
        self.span_dim == 0
    }

    /// Span coordinates of an ambient rational point, `None` outside the span.
    pub fn span_coords(&self, u: &[Rat]) -> Option<Vec<Rat>> {
        if self.ambient_dim == 0 {
            return Some(Vec::new());
        }
        intlin::coords_in_rowspace(&self.lattice_basis, u)
    }

    pub fn span_coords_int(&self, u: &[BigInt]) -> Option<Vec<Rat>> {
        let v: Vec<Rat> = u.iter().map(|x| Rat::from_integer(x.clone())).collect();
        self.span_coords(&v)
    }

    /// Ambient integer coordinates of a span lattice point.
    pub fn ambient_coords(&self, y: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.ambient_dim];
        for (yi, row) in y.iter().zip(&self.lattice_basis) {
            for (o, b) in out.iter_mut().zip(row) {
                *o += yi * b;
            }
        }
        out
    }

    fn in_cone_span(&self, y: &[Rat]) -> bool {
        self.cone_facets.iter().all(|f| !f.form.eval(y).is_negative())
    }

    /// Weight of a rational point given in span coordinates (assumed in the
    /// cone): smallest `c >= 0` with the point in `c * P`.
    fn weight_span(&self, y: &[Rat]) -> Rat {
        if y.iter().all(|v| v.is_zero()) {
            return Rat::zero();
        }
        let mut w = Rat::zero();
        for f in &self.outer_facets {
            let v = f.form.eval(y);
            if v > w {
                w = v;
            }
        }
        assert!(w.is_positive(), "nonzero cone point with nonpositive weight");
        w
    }

    /// Weight of an ambient lattice point; `None` when outside `Cone(P)`.
    pub fn weight(&self, u: &[BigInt]) -> Option<Rat> {
        assert_eq!(u.len(), self.ambient_dim);
        if u.iter().all(|x| x.is_zero()) {
            return Some(Rat::zero());
        }
        let y = self.span_coords_int(u)?;
        if !self.in_cone_span(&y) {
            return None;
        }
        Some(self.weight_span(&y))
    }

    /// Weight of an ambient rational point; `None` when outside `Cone(P)`.
    pub fn weight_rat(&self, u: &[Rat]) -> Option<Rat> {
        assert_eq!(u.len(), self.ambient_dim);
        if u.iter().all(|x| x.is_zero()) {
            return Some(Rat::zero());
        }
        let y = self.span_coords(u)?;
        if !self.in_cone_span(&y) {
            return None;
        }
        Some(self.weight_span(&y))
    }

    /// The weight denominator D: weights of lattice points lie in `(1/D) Z_{>=0}`.
    pub fn weight_denominator(&self) -> u64 {
        let mut all = Vec::new();
        for f in &self.outer_facets {
            all.extend(f.form.coeffs.iter().cloned());
        }
        let lcm = denominator_lcm(&all);
        lcm.try_into().expect("weight denominator fits in u64")
    }

    pub fn weight_fn(&self) -> WeightFn<'_> {
        WeightFn {
            poly: self,
            d: self.weight_denominator(),
        }
    }

    /// Volume inside the lattice span, normalized so a fundamental domain of
    /// the span lattice has unit volume; 0 for the point polytope.
    pub fn normalized_volume(&self) -> Rat {
        if self.span_dim == 0 {
            return Rat::zero();
        }
        let simplices = triangulate_fulldim(&self.vertices_span);
        let d = self.span_dim;
        let mut total = Rat::zero();
        for s in &simplices {
            let base = &self.vertices_span[s[0]];
            let rows: Vec<Vec<Rat>> = s[1..]
                .iter()
                .map(|&i| {
                    self.vertices_span[i]
                        .iter()
                        .zip(base)
                        .map(|(a, b)| a - b)
                        .collect()
                })
                .collect();
            total += det_rat(rows).abs();
        }
        total / Rat::from_integer(factorial(d))
    }

    /// Exactly the lattice points `u` of `M(P)` with `w(u) <= wmax`, with their
    /// weights, sorted by weight then coordinates.
    pub fn lattice_points_up_to_weight(&self, wmax: &Rat) -> Vec<(Vec<BigInt>, Rat)> {
        assert!(!wmax.is_negative(), "wmax must be >= 0");
        if self.span_dim == 0 {
            return vec![(vec![BigInt::zero(); self.ambient_dim], Rat::zero())];
        }
        // bounding box of wmax * P in span coordinates
        let mut lo = vec![BigInt::zero(); self.span_dim];
        let mut hi = vec![BigInt::zero(); self.span_dim];
        for v in &self.vertices_span {
            for (i, x) in v.iter().enumerate() {
                let scaled = x * wmax;
                let f = rat_floor(&scaled);
                let c = rat_ceil(&scaled);
                if f < lo[i] {
                    lo[i] = f;
                }
                if c > hi[i] {
                    hi[i] = c;
                }
            }
        }
        let mut out = Vec::new();
        let mut cur: Vec<BigInt> = lo.clone();
        'outer: loop {
            let y: Vec<Rat> = cur.iter().map(|x| Rat::from_integer(x.clone())).collect();
            if self.in_cone_span(&y) {
                let w = self.weight_span(&y);
                if &w <= wmax {
                    out.push((self.ambient_coords(&cur), w));
                }
            }
            // odometer increment
            for i in 0..self.span_dim {
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    continue 'outer;
                }
                cur[i] = lo[i].clone();
            }
            break;
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// All closed faces of the polytope that do not contain the origin, each
    /// as its set of active facets (with the inclusion-maximal closure) and
    /// its vertices.
    pub fn faces_not_containing_origin(&self) -> Vec<Face> {
        let no = self.outer_facets.len();
        let nc = self.cone_facets.len();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut faces = Vec::new();
        // a face misses the origin exactly when at least one active facet is outer
        for omask in 1u64..(1 << no) {
            for cmask in 0u64..(1 << nc) {
                let mut vids: Vec<usize> = (0..self.vertices.len()).collect();
                for i in 0..no {
                    if omask >> i & 1 == 1 {
                        vids.retain(|v| self.outer_facets[i].vertex_ids.contains(v));
                    }
                }
                for j in 0..nc {
                    if cmask >> j & 1 == 1 {
                        vids.retain(|v| self.cone_facets[j].vertex_ids.contains(v));
                    }
                }
                if vids.is_empty() || !seen.insert(vids.clone()) {
                    continue;
                }
                // closure: all facets containing every vertex of the face
                let outer: Vec<usize> = (0..no)
                    .filter(|&i| vids.iter().all(|v| self.outer_facets[i].vertex_ids.contains(v)))
                    .collect();
                let cone: Vec<usize> = (0..nc)
                    .filter(|&j| vids.iter().all(|v| self.cone_facets[j].vertex_ids.contains(v)))
                    .collect();
                faces.push(Face {
                    outer,
                    cone,
                    vertex_ids: vids,
                });
            }
        }
        faces.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
        faces
    }

    /// Whether an ambient lattice point lies on the given face's affine hull
    /// (for points of the polytope this is exactly face membership).
    pub fn on_face(&self, face: &Face, u: &[BigInt]) -> bool {
        let Some(y) = self.span_coords_int(u) else {
            return false;
        };
        face.outer
            .iter()
            .all(|&i| self.outer_facets[i].form.eval(&y).is_one())
            && face
                .cone
                .iter()
                .all(|&j| self.cone_facets[j].form.eval(&y).is_zero())
    }
}

fn det_rat(m: Vec<Vec<Rat>>) -> Rat {
    // clear denominators row by row, then Bareiss
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut scale = Rat::one();
    let mut int_rows = Vec::with_capacity(n);
    for row in &m {
        let lcm = denominator_lcm(row);
        scale /= Rat::from_integer(lcm.clone());
        int_rows.push(
            row.iter()
                .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
                .collect::<Vec<BigInt>>(),
        );
    }
    Rat::from_integer(intlin::det_bareiss(int_rows)) * scale
}

/// Triangulation of a full-dimensional polytope given by its vertices:
/// simplices (as vertex index lists) covering the polytope with disjoint
/// interiors, by coning each far facet over the lexicographically least
/// vertex.
fn triangulate_fulldim(vertices: &[Vec<Rat>]) -> Vec<Vec<usize>> {
    let d = vertices[0].len();
    assert!(vertices.len() >= d + 1, "not full-dimensional");
    if vertices.len() == d + 1 {
        return vec![(0..=d).collect()];
    }
    let apex = (0..vertices.len())
        .min_by(|&a, &b| vertices[a].cmp(&vertices[b]))
        .unwrap();
    let hyps = supporting_hyperplanes(vertices);
    let mut out = Vec::new();
    for h in &hyps {
        if (h.normal_eval(&vertices[apex]) + &h.offset).is_zero() {
            continue; // apex on the facet: zero-volume cone
        }
        let on_ids: Vec<usize> = (0..vertices.len())
            .filter(|&i| (h.normal_eval(&vertices[i]) + &h.offset).is_zero())
            .collect();
        // project the facet onto d-1 coordinates keeping affine rank
        let fpts: Vec<Vec<Rat>> = on_ids.iter().map(|&i| vertices[i].clone()).collect();
        let keep = choose_projection(&fpts, d - 1);
        let proj: Vec<Vec<Rat>> = fpts
            .iter()
            .map(|p| keep.iter().map(|&j| p[j].clone()).collect())
            .collect();
        let sub = if d - 1 == 0 {
            vec![vec![0usize]]
        } else {
            triangulate_fulldim(&proj)
        };
        for simplex in sub {
            let mut s = vec![apex];
            s.extend(simplex.into_iter().map(|k| on_ids[k]));
            out.push(s);
        }
    }
    out
}

/// A coordinate subset of size `k` on which the affine hull of `pts` projects
/// bijectively.
fn choose_projection(pts: &[Vec<Rat>], k: usize) -> Vec<usize> {
    let d = pts[0].len();
    if k == 0 {
        return Vec::new();
    }
    let base = &pts[0];
    let diffs: Vec<Vec<Rat>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let coords: Vec<usize> = (0..d).collect();
    for keep in combinations(&coords, k) {
        let restricted: Vec<Vec<Rat>> = diffs
            .iter()
            .map(|r| keep.iter().map(|&j| r[j].clone()).collect())
            .collect();
        if intlin::rank_rat(&restricted) == k {
            return keep;
        }
    }
    panic!("no rank-preserving coordinate projection found");
}

/// Numerator of the Poincare series `sum_N W'(N) T^N = Pnum(T) / (1-T^D)^{s~}`
/// where `W'(N) = #{u in M(P) : w(u) = N/D}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareNumerator {
    pub coeffs: Vec<BigInt>,
    pub d: u64,
    pub span_dim: usize,
}

impl PoincareNumerator {
    pub fn eval_one(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for c in &self.coeffs {
            acc += c;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        let mut deg = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                deg = i;
            }
        }
        deg
    }
}

/// Computes lattice-point counts by weight out to `D*(s~+1) + guard*D` and
/// divides off `(1-T^D)^{s~}`, verifying the division is exact on every
/// computed term, that the numerator has nonnegative integer coefficients of
/// degree at most `s~ * D`, and that `Pnum(1) = s~! * vol`.
pub fn poincare_series(
    poly: &RationalPolytope,
    guard: u64,
) -> Result<PoincareNumerator, PolytopeError> {
    assert!(guard >= 1);
    let s = poly.span_dim;
    let d = poly.weight_denominator();
    if s == 0 {
        return Ok(PoincareNumerator {
            coeffs: vec![BigInt::one()],
            d,
            span_dim: 0,
        });
    }
    let ncut = d * (s as u64 + 1) + guard * d;
    let wmax = Rat::new(BigInt::from(ncut), BigInt::from(d));
    let pts = poly.lattice_points_up_to_weight(&wmax);
    let mut counts = vec![0u64; ncut as usize + 1];
    for (_, w) in &pts {
        let scaled = w * Rat::from_integer(BigInt::from(d));
        if !scaled.is_integer() {
            return Err(PolytopeError::SeriesMismatch(format!(
                "weight {} not in (1/{})Z",
                w, d
            )));
        }
        let n: u64 = scaled.to_integer().try_into().expect("small index");
        if n <= ncut {
            counts[n as usize] += 1;
        }
    }
    // multiply the counted series by (1 - T^D)^{s}
    let mut binom = vec![BigInt::one()];
    for _ in 0..s {
        let mut next = vec![BigInt::zero(); binom.len() + 1];
        for (i, b) in binom.iter().enumerate() {
            next[i] += b;
            next[i + 1] -= b;
        }
        binom = next;
    }
    let mut num = vec![BigInt::zero(); ncut as usize + 1];
    for (j, b) in binom.iter().enumerate() {
        let shift = j as u64 * d;
        if shift > ncut {
            break;
        }
        for k in 0..=(ncut - shift) as usize {
            num[k + (shift as usize)] += b * BigInt::from(counts[k]);
        }
    }
    let deg_cap = (s as u64 * d) as usize;
    for (k, c) in num.iter().enumerate().skip(deg_cap + 1) {
        if !c.is_zero() {
            return Err(PolytopeError::SeriesMismatch(format!(
                "numerator coefficient at degree {} is {}, expected 0",
                k, c
            )));
        }
    }
    let coeffs: Vec<BigInt> = num[..=deg_cap].to_vec();
    if coeffs.iter().any(|c| c.is_negative()) {
        return Err(PolytopeError::SeriesMismatch(
            "negative numerator coefficient".into(),
        ));
    }
    let result = PoincareNumerator {
        coeffs,
        d,
        span_dim: s,
    };
    let expected = Rat::from_integer(factorial(s)) * poly.normalized_volume();
    if Rat::from_integer(result.eval_one()) != expected {
        return Err(PolytopeError::SeriesMismatch(format!(
            "Pnum(1) = {} but s~! vol = {}",
            result.eval_one(),
            expected
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn poly_1d(pts: &[i64]) -> RationalPolytope {
        let qs: Vec<QPoint> = pts.iter().map(|&x| QPoint::from_ints(&[x])).collect();
        build_polytope(1, &qs).unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn interval_zero_three() {
        let p = poly_1d(&[3]);
        assert_eq!(p.span_dim(), 1);
        let mut vs: Vec<Vec<Rat>> = p.vertices().to_vec();
        vs.sort();
        assert_eq!(vs, vec![vec![rat_int(0)], vec![rat_int(3)]]);
        assert_eq!(p.outer_facets().len(), 1);
        assert_eq!(p.cone_facets().len(), 1);
        assert_eq!(p.weight_denominator(), 3);
        // w(2) = 2/3, minimal dilation of [0,3] containing 2
        assert_eq!(p.weight(&[bi(2)]).unwrap(), rat(2, 3));
        assert_eq!(p.weight(&[bi(0)]).unwrap(), rat_int(0));
        assert_eq!(p.weight(&[bi(-1)]), None);
        assert_eq!(p.normalized_volume(), rat_int(3));
    }

    #[test]
    fn interval_symmetric() {
        let p = poly_1d(&[-1, 1]);
        assert_eq!(p.span_dim(), 1);
        let mut vs = p.vertices().to_vec();
        vs.sort();
        assert_eq!(vs, vec![vec![rat_int(-1)], vec![rat_int(1)]]);
        assert_eq!(p.cone_facets().len(), 0); // 0 is interior
        assert_eq!(p.weight_denominator(), 1);
        // dilation by 2 reaches -2
        assert_eq!(p.weight(&[bi(-2)]).unwrap(), rat_int(2));
        assert_eq!(p.normalized_volume(), rat_int(2));
    }

    #[test]
    fn standard_triangle() {
        let p = build_polytope(2, &[QPoint::from_ints(&[1, 0]), QPoint::from_ints(&[0, 1])]).unwrap();
        assert_eq!(p.span_dim(), 2);
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.outer_facets().len(), 1); // x + y = 1
        assert_eq!(p.cone_facets().len(), 2);
        assert_eq!(p.normalized_volume(), rat(1, 2));
        assert_eq!(p.weight(&[bi(2), bi(3)]).unwrap(), rat_int(5));
        assert_eq!(p.weight(&[bi(-1), bi(0)]), None);
    }

    #[test]
    fn half_interval_volume() {
        let q = build_polytope(1, &[QPoint(vec![rat(3, 2)])]).unwrap();
        assert_eq!(q.normalized_volume(), rat(3, 2));
        assert_eq!(q.weight_denominator(), 3);
        assert_eq!(q.weight(&[bi(1)]).unwrap(), rat(2, 3));
    }

    #[test]
    fn point_polytope() {
        let p = build_polytope(2, &[QPoint::from_ints(&[0, 0])]).unwrap();
        assert_eq!(p.span_dim(), 0);
        assert_eq!(p.normalized_volume(), rat_int(0));
        let pts = p.lattice_points_up_to_weight(&rat_int(5));
        assert_eq!(pts, vec![(vec![bi(0), bi(0)], rat_int(0))]);
    }

    #[test]
    fn lower_dimensional_span_uses_its_lattice() {
        // segment from 0 to (2, 2): span lattice generated by (1, 1)
        let p = build_polytope(2, &[QPoint::from_ints(&[2, 2])]).unwrap();
        assert_eq!(p.span_dim(), 1);
        assert_eq!(p.normalized_volume(), rat_int(2));
        assert_eq!(p.weight(&[bi(1), bi(1)]).unwrap(), rat(1, 2));
        assert_eq!(p.weight(&[bi(1), bi(2)]), None); // off the span
    }

    #[test]
    fn lattice_points_of_intervals() {
        let p = poly_1d(&[3]);
        let pts: Vec<BigInt> = p
            .lattice_points_up_to_weight(&rat_int(1))
            .into_iter()
            .map(|(u, _)| u[0].clone())
            .collect();
        assert_eq!(pts, vec![bi(0), bi(1), bi(2), bi(3)]);

        let tri = build_polytope(2, &[QPoint::from_ints(&[1, 0]), QPoint::from_ints(&[0, 1])]).unwrap();
        let pts = tri.lattice_points_up_to_weight(&rat_int(1));
        assert_eq!(pts.len(), 3);

        let z = poly_1d(&[3]).lattice_points_up_to_weight(&rat_int(0));
        assert_eq!(z.len(), 1);
    }

    #[test]
    fn poincare_interval_zero_three() {
        let p = poly_1d(&[3]);
        let q = poincare_series(&p, 2).unwrap();
        assert_eq!(q.coeffs, vec![bi(1), bi(1), bi(1), bi(0)]);
        assert_eq!(q.eval_one(), bi(3));
    }

    #[test]
    fn poincare_symmetric_interval() {
        let p = poly_1d(&[-1, 1]);
        let q = poincare_series(&p, 2).unwrap();
        assert_eq!(q.coeffs, vec![bi(1), bi(1)]);
        assert_eq!(q.eval_one(), bi(2));
    }

    #[test]
    fn poincare_point() {
        let p = build_polytope(1, &[QPoint::from_ints(&[0])]).unwrap();
        let q = poincare_series(&p, 1).unwrap();
        assert_eq!(q.coeffs, vec![bi(1)]);
        assert_eq!(q.span_dim, 0);
    }

    #[test]
    fn faces_of_newton_polytopes() {
        // [0,3]: exactly the vertex face {3}
        let p = poly_1d(&[3]);
        let faces = p.faces_not_containing_origin();
        assert_eq!(faces.len(), 1);
        assert!(p.on_face(&faces[0], &[bi(3)]));
        assert!(!p.on_face(&faces[0], &[bi(2)]));

        // [-1,1]: the two endpoint faces
        let q = poly_1d(&[-1, 1]);
        assert_eq!(q.faces_not_containing_origin().len(), 2);

        // triangle 0, e1, e2: edge {e1,e2} plus its two endpoints
        let t = build_polytope(2, &[QPoint::from_ints(&[1, 0]), QPoint::from_ints(&[0, 1])]).unwrap();
        let faces = t.faces_not_containing_origin();
        assert_eq!(faces.len(), 3);
        let sizes: Vec<usize> = faces.iter().map(|f| f.vertex_ids.len()).collect();
        let mut sorted = sizes.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 1, 2]);
    }

    #[test]
    fn weight_axioms_on_random_cone_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let polys = vec![
            poly_1d(&[3]),
            poly_1d(&[-1, 1]),
            build_polytope(2, &[QPoint::from_ints(&[1, 0]), QPoint::from_ints(&[0, 1])]).unwrap(),
            build_polytope(
                2,
                &[
                    QPoint::from_ints(&[2, 0]),
                    QPoint::from_ints(&[0, 2]),
                    QPoint::from_ints(&[-1, -1]),
                ],
            )
            .unwrap(),
        ];
        for p in &polys {
            let pts = p.lattice_points_up_to_weight(&rat_int(4));
            for _ in 0..60 {
                let (u, wu) = &pts[rng.gen_range(0..pts.len())];
                let (v, wv) = &pts[rng.gen_range(0..pts.len())];
                // w(u) = 0 iff u = 0
                assert_eq!(wu.is_zero(), u.iter().all(|x| x.is_zero()));
                // homogeneity
                let c = rng.gen_range(0i64..4);
                let cu: Vec<BigInt> = u.iter().map(|x| x * BigInt::from(c)).collect();
                assert_eq!(
                    p.weight(&cu).unwrap(),
                    wu * Rat::from_integer(BigInt::from(c))
                );
                // subadditivity
                let sum: Vec<BigInt> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                let ws = p.weight(&sum).unwrap();
                assert!(ws <= wu + wv);
                // D-integrality
                let d = p.weight_denominator();
                assert!((wu * Rat::from_integer(BigInt::from(d))).is_integer());
            }
        }
    }

    #[test]
    fn poincare_on_random_lattice_polytopes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut done = 0;
        while done < 6 {
            let dim = rng.gen_range(1..=2);
            let npts = rng.gen_range(1..=4);
            let pts: Vec<QPoint> = (0..npts)
                .map(|_| {
                    QPoint::from_ints(
                        &(0..dim)
                            .map(|_| rng.gen_range(-2i64..=3))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            let p = build_polytope(dim, &pts).unwrap();
            let q = poincare_series(&p, 1).unwrap();
            let s = p.span_dim();
            assert!(q.coeffs.iter().all(|c| !c.is_negative()));
            assert!(q.degree() as u64 <= s as u64 * q.d);
            assert_eq!(
                Rat::from_integer(q.eval_one()),
                Rat::from_integer(factorial(s)) * p.normalized_volume()
            );
            done += 1;
        }
    }
}
