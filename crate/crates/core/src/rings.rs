//! Endomorphism rings presented as free integer modules.
//!
//! A [`RingSpec`] fixes a basis `τ_1 = 1, τ_2, …, τ_t`, integer structure
//! constants, a Rosati involution, a positive-definite Gram form for the
//! Rosati norm and a faithful integral lattice representation. Elements are
//! integer coordinate vectors tagged with the ring they belong to.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::{self, floor_sqrt, min_eigenvalue_lower_bound};
use crate::error::{consistency, domain, shape, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{lift, Scalar};
use crate::wire::{WireInteger, WireRational};
use crate::{int, ratz, Integer, IntegerMatrix, Rational, RationalMatrix};

pub type RingTag = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    tag: RingTag,
    coords: Vec<Integer>,
}

impl RingElement {
    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn coords(&self) -> &[Integer] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Largest absolute coordinate, `|α|∞`.
    pub fn sup_norm(&self) -> Integer {
        self.coords.iter().map(Signed::abs).max().unwrap_or_default()
    }

    pub fn rational_coords(&self) -> Vec<Rational> {
        self.coords.iter().map(ratz).collect()
    }

    /// Gcd of the coordinates (zero for the zero element).
    pub fn content(&self) -> Integer {
        use num_integer::Integer as _;
        self.coords.iter().fold(Integer::zero(), |g, c| g.gcd(c))
    }
}

/// On-disk form of a ring, keyed as in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpecData {
    pub tag: String,
    pub rank: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    /// `mul_table[j][k][l]`: coefficient of `τ_l` in `τ_j·τ_k`.
    pub mul_table: Vec<Vec<Vec<i64>>>,
    /// Column `j` holds the coordinates of the conjugate of `τ_j`.
    pub involution: Vec<Vec<i64>>,
    pub gram: Vec<Vec<WireRational>>,
    /// Images of the basis elements, each a `2d×2d` integer matrix.
    pub lattice_rep: Vec<Vec<Vec<WireInteger>>>,
    pub dimension: usize,
}

#[derive(Debug, Clone)]
pub struct RingSpec {
    tag: RingTag,
    labels: Vec<String>,
    table: Vec<Vec<Vec<i64>>>,
    involution: Matrix<Integer>,
    gram: RationalMatrix,
    lattice_rep: Vec<IntegerMatrix>,
    dimension: usize,
    commutative: bool,
    cache: RingCache,
}

#[derive(Debug, Clone, Default)]
struct RingCache {
    lambda: OnceLock<(Rational, RingElement)>,
    c0_c1: OnceLock<(Rational, Rational)>,
    op_sq: OnceLock<Rational>,
    multiplicative: OnceLock<bool>,
}

impl RingSpec {
    pub fn from_data(data: &RingSpecData) -> Result<Self> {
        let t = data.rank;
        if t == 0 {
            return domain("ring rank must be positive");
        }
        if data.dimension == 0 {
            return domain("simple factor dimension must be positive");
        }
        let cube_ok = data.mul_table.len() == t
            && data
                .mul_table
                .iter()
                .all(|m| m.len() == t && m.iter().all(|r| r.len() == t));
        if !cube_ok {
            return shape(format!("mul_table must be {t}x{t}x{t}"));
        }
        let involution = Matrix::from_rows(data.involution.clone())?.map(|v| int(*v));
        let gram = Matrix::from_rows(data.gram.clone())?.map(|v| v.0.clone());
        if involution.rows() != t || involution.cols() != t || gram.rows() != t || gram.cols() != t {
            return shape("involution and gram must be t x t");
        }
        if data.lattice_rep.len() != t {
            return shape("lattice_rep needs one matrix per basis element");
        }
        let n = 2 * data.dimension;
        let lattice_rep = data
            .lattice_rep
            .iter()
            .map(|m| {
                let mat = Matrix::from_rows(m.clone())?.map(|v| v.0.clone());
                if mat.rows() != n || mat.cols() != n {
                    return shape(format!("lattice_rep matrices must be {n}x{n}"));
                }
                Ok(mat)
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = if data.labels.is_empty() {
            (0..t).map(|j| format!("t{j}")).collect()
        } else if data.labels.len() == t {
            data.labels.clone()
        } else {
            return shape("labels length must equal rank");
        };
        let commutative = (0..t).all(|j| (0..t).all(|k| data.mul_table[j][k] == data.mul_table[k][j]));
        let spec = RingSpec {
            tag: Arc::from(data.tag.as_str()),
            labels,
            table: data.mul_table.clone(),
            involution,
            gram,
            lattice_rep,
            dimension: data.dimension,
            commutative,
            cache: RingCache::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_data(&self) -> RingSpecData {
        RingSpecData {
            tag: self.tag.to_string(),
            rank: self.rank(),
            labels: self.labels.clone(),
            mul_table: self.table.clone(),
            involution: self
                .involution
                .to_rows()
                .into_iter()
                .map(|r| r.iter().map(|v| i64::try_from(v).expect("small involution")).collect())
                .collect(),
            gram: self
                .gram
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(WireRational).collect())
                .collect(),
            lattice_rep: self
                .lattice_rep
                .iter()
                .map(|m| m.to_rows().into_iter().map(|r| r.into_iter().map(WireInteger).collect()).collect())
                .collect(),
            dimension: self.dimension,
        }
    }

    fn validate(&self) -> Result<()> {
        let t = self.rank();
        for j in 0..t {
            for k in 0..t {
                let unit_left = self.table[0][j][k] == i64::from(j == k);
                let unit_right = self.table[j][0][k] == i64::from(j == k);
                if !unit_left || !unit_right {
                    return domain(format!("{}: first basis element is not a two-sided unit", self.tag));
                }
            }
        }
        for a in 0..t {
            for b in 0..t {
                for c in 0..t {
                    let (ea, eb, ec) = (self.unit_vec::<Integer>(a), self.unit_vec(b), self.unit_vec(c));
                    let left = self.mul_coords(&self.mul_coords(&ea, &eb), &ec);
                    let right = self.mul_coords(&ea, &self.mul_coords(&eb, &ec));
                    if left != right {
                        return domain(format!("{}: multiplication not associative on ({a},{b},{c})", self.tag));
                    }
                }
            }
        }
        if self.involution.mul(&self.involution)? != Matrix::identity(t) {
            return domain(format!("{}: involution does not square to the identity", self.tag));
        }
        for j in 0..t {
            for k in 0..t {
                let prod = self.mul_coords(&self.unit_vec(j), &self.unit_vec(k));
                let lhs = self.involution.mul_vec(&prod)?;
                let cj = self.involution.mul_vec(&self.unit_vec(j))?;
                let ck = self.involution.mul_vec(&self.unit_vec(k))?;
                if lhs != self.mul_coords(&ck, &cj) {
                    return domain(format!("{}: involution is not an anti-automorphism", self.tag));
                }
            }
        }
        if !self.gram.is_positive_definite() {
            return domain(format!("{}: gram form is not symmetric positive definite", self.tag));
        }
        let rq = self.involution.map(ratz);
        if rq.transpose().mul(&self.gram)?.mul(&rq)? != self.gram {
            return domain(format!("{}: norm is not invariant under the involution", self.tag));
        }
        let n = 2 * self.dimension;
        if self.lattice_rep[0] != Matrix::identity(n) {
            return domain(format!("{}: lattice representation is not unital", self.tag));
        }
        for j in 0..t {
            for k in 0..t {
                let lhs = self.lattice_rep[j].mul(&self.lattice_rep[k])?;
                let rhs = self.lattice_image_coords(&self.mul_coords(&self.unit_vec(j), &self.unit_vec(k)));
                if lhs != rhs {
                    return domain(format!("{}: lattice representation is not multiplicative", self.tag));
                }
            }
        }
        let flat = Matrix::from_fn(t, n * n, |j, c| ratz(self.lattice_rep[j].get(c / n, c % n)));
        if flat.rank() != t {
            return domain(format!("{}: lattice representation is not faithful", self.tag));
        }
        Ok(())
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn tag_arc(&self) -> RingTag {
        self.tag.clone()
    }

    pub fn rank(&self) -> usize {
        self.table.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn involution(&self) -> &Matrix<Integer> {
        &self.involution
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    fn unit_vec<T: Scalar>(&self, j: usize) -> Vec<T> {
        (0..self.rank()).map(|i| if i == j { T::one() } else { T::zero() }).collect()
    }

    /// Product of coordinate vectors through the structure constants, over any
    /// coefficient type (integers for ring elements, rationals for `E ⊗ Q`).
    pub fn mul_coords<T: Scalar>(&self, a: &[T], b: &[T]) -> Vec<T> {
        let t = self.rank();
        let mut out = vec![T::zero(); t];
        for (j, aj) in a.iter().enumerate() {
            if aj.is_zero() {
                continue;
            }
            for (k, bk) in b.iter().enumerate() {
                if bk.is_zero() {
                    continue;
                }
                let ab = aj.clone() * bk.clone();
                for (l, o) in out.iter_mut().enumerate() {
                    let c = self.table[j][k][l];
                    if c != 0 {
                        *o = o.clone() + ab.clone() * lift::<T>(c);
                    }
                }
            }
        }
        out
    }

    fn lattice_image_coords(&self, coords: &[Integer]) -> IntegerMatrix {
        let n = 2 * self.dimension;
        coords
            .iter()
            .zip(&self.lattice_rep)
            .fold(Matrix::zeros(n, n), |acc, (c, m)| acc.add(&m.scale(c)).expect("same size"))
    }

    // -- element construction ------------------------------------------------

    pub fn element(&self, coords: Vec<Integer>) -> Result<RingElement> {
        if coords.len() != self.rank() {
            return shape(format!("{} expects {} coordinates, got {}", self.tag, self.rank(), coords.len()));
        }
        Ok(RingElement {
            tag: self.tag.clone(),
            coords,
        })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<RingElement> {
        self.element(coords.iter().map(|c| int(*c)).collect())
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            tag: self.tag.clone(),
            coords: vec![Integer::zero(); self.rank()],
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_integer(Integer::one())
    }

    pub fn from_integer(&self, n: Integer) -> RingElement {
        let mut coords = vec![Integer::zero(); self.rank()];
        coords[0] = n;
        RingElement {
            tag: self.tag.clone(),
            coords,
        }
    }

    pub fn basis(&self, j: usize) -> RingElement {
        RingElement {
            tag: self.tag.clone(),
            coords: self.unit_vec(j),
        }
    }

    /// Uniform random element with coordinates in `[-bound, bound]`.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> RingElement {
        RingElement {
            tag: self.tag.clone(),
            coords: (0..self.rank()).map(|_| int(rng.gen_range(-bound..=bound))).collect(),
        }
    }

    /// Random non-zero element with coordinates in `[-bound, bound]`.
    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> RingElement {
        loop {
            let e = self.random_element(rng, bound.max(1));
            if !e.is_zero() {
                return e;
            }
        }
    }

    fn check(&self, a: &RingElement) -> Result<()> {
        if a.tag != self.tag {
            return domain(format!("element of {} used in ring {}", a.tag, self.tag));
        }
        Ok(())
    }

    /// `Some(n)` when `a = n·1`.
    pub fn as_integer(&self, a: &RingElement) -> Option<Integer> {
        a.coords[1..].iter().all(Zero::is_zero).then(|| a.coords[0].clone())
    }

    // -- arithmetic ----------------------------------------------------------

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        self.element(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        self.element(a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        RingElement {
            tag: a.tag.clone(),
            coords: a.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, a: &RingElement, k: &Integer) -> RingElement {
        RingElement {
            tag: a.tag.clone(),
            coords: a.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division of every coordinate by `k`; fails unless `k` divides
    /// the content.
    pub fn div_exact(&self, a: &RingElement, k: &Integer) -> Result<RingElement> {
        use num_integer::Integer as _;
        if k.is_zero() || a.coords.iter().any(|c| !c.is_multiple_of(k)) {
            return domain(format!("{k} does not divide the coordinates"));
        }
        Ok(RingElement {
            tag: a.tag.clone(),
            coords: a.coords.iter().map(|c| c / k).collect(),
        })
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        self.element(self.mul_coords(&a.coords, &b.coords))
    }

    /// Rosati conjugate `ā`.
    pub fn conj(&self, a: &RingElement) -> RingElement {
        RingElement {
            tag: a.tag.clone(),
            coords: self.involution.mul_vec(&a.coords).expect("rank"),
        }
    }

    /// `|a|² = αᵀ G α`.
    pub fn norm_sq(&self, a: &RingElement) -> Rational {
        self.gram.quadratic_form(&a.rational_coords())
    }

    /// Rosati norm of a rational coordinate vector in `E ⊗ Q`.
    pub fn norm_sq_rational(&self, v: &[Rational]) -> Rational {
        self.gram.quadratic_form(v)
    }

    /// Matrix of left multiplication by `a` on coordinate columns.
    pub fn regular_rep(&self, a: &RingElement) -> IntegerMatrix {
        let t = self.rank();
        let cols: Vec<Vec<Integer>> = (0..t)
            .map(|k| self.mul_coords(&a.coords, &self.unit_vec::<Integer>(k)))
            .collect();
        Matrix::from_fn(t, t, |l, k| cols[k][l].clone())
    }

    /// Image of `a` under the lattice representation `ρ`.
    pub fn lattice_image(&self, a: &RingElement) -> IntegerMatrix {
        self.lattice_image_coords(&a.coords)
    }

    /// An element `a′` and a positive integer `n` with `a′·a = n`.
    ///
    /// Uses the conjugate when `ā·a` is a positive integer (orders in CM
    /// fields, quaternion orders with the canonical involution); otherwise
    /// falls back to Cayley–Hamilton on the regular representation.
    pub fn left_norm_multiplier(&self, a: &RingElement) -> Result<(RingElement, Integer)> {
        self.check(a)?;
        if a.is_zero() {
            return domain("zero has no norm multiplier");
        }
        if let Some(n) = self.as_integer(a) {
            return Ok(if n.is_positive() {
                (self.one(), n)
            } else {
                (self.from_integer(-Integer::one()), -n)
            });
        }
        let c = self.conj(a);
        let ca = self.mul(&c, a)?;
        if let Some(n) = self.as_integer(&ca) {
            if n.is_positive() {
                return Ok((c, n));
            }
        }
        let lrep = self.regular_rep(a).map(ratz);
        let poly = characteristic_polynomial(&lrep)?;
        // p(x) = x^t + c_{t-1}x^{t-1} + … + c_0; q(x) = x^{t-1} + … + c_1, q(a)·a = -c_0
        let t = self.rank();
        let coeff = |i: usize| -> Integer { poly[i].to_integer() };
        let mut q = self.one();
        for i in (1..t).rev() {
            q = self.add(&self.mul(&q, a)?, &self.from_integer(coeff(i)))?;
        }
        let mut n = -coeff(0);
        if n.is_zero() {
            return consistency("non-zero element with singular regular representation");
        }
        if n.is_negative() {
            q = self.neg(&q);
            n = -n;
        }
        if self.mul(&q, a)? != self.from_integer(n.clone()) {
            return consistency("Cayley–Hamilton multiplier failed");
        }
        Ok((q, n))
    }

    /// `λ_E²`: the minimum of `|a|²` over non-zero `a`, with a witness.
    ///
    /// Enumerates every integer vector in the box `|α_i|² <= B·(G⁻¹)_ii`,
    /// `B = G_11`, which contains all vectors of norm at most `B`.
    pub fn lambda_min_nonzero(&self) -> (Rational, RingElement) {
        self.cache.lambda.get_or_init(|| self.enumerate_lambda()).clone()
    }

    fn enumerate_lambda(&self) -> (Rational, RingElement) {
        let t = self.rank();
        let bound = self.gram.get(0, 0).clone();
        let inv = self.gram.inverse().expect("square").expect("positive definite");
        let radii: Vec<i64> = (0..t)
            .map(|i| {
                let r = floor_sqrt(&(&bound * inv.get(i, i)));
                i64::try_from(&r).expect("enumeration box radius fits i64")
            })
            .collect();
        let mut best = (bound, self.one());
        let mut cur: Vec<i64> = radii.iter().map(|r| -r).collect();
        loop {
            if cur.iter().any(|c| *c != 0) {
                let e = RingElement {
                    tag: self.tag.clone(),
                    coords: cur.iter().map(|c| int(*c)).collect(),
                };
                let n = self.norm_sq(&e);
                if n < best.0 {
                    best = (n, e);
                }
            }
            let mut i = 0;
            loop {
                if i == t {
                    return best;
                }
                if cur[i] < radii[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -radii[i];
                i += 1;
            }
        }
    }

    /// Certified `(c0², c1²)` with `c0²·|α|∞² <= |a|² <= c1²·|α|∞²`.
    pub fn norm_equivalence_constants(&self) -> Result<(Rational, Rational)> {
        if let Some(v) = self.cache.c0_c1.get() {
            return Ok(v.clone());
        }
        let c0_sq = min_eigenvalue_lower_bound(&self.gram)
            .ok_or_else(|| Error::Domain(format!("{}: gram not positive definite", self.tag)))?;
        let c1_sq = self.gram.abs_entry_sum();
        Ok(self.cache.c0_c1.get_or_init(|| (c0_sq, c1_sq)).clone())
    }

    /// Rational upper bound on `Σ_j |τ_j|`.
    pub fn basis_norm_sum_upper(&self) -> Rational {
        let diag: Vec<Rational> = (0..self.rank()).map(|i| self.gram.get(i, i).clone()).collect();
        certified::sum_of_roots_upper(diag.iter())
    }

    /// Upper bound on `sup |a·v|² / (|a|²|v|²)` over `E ⊗ Q`.
    pub fn operator_constant_sq(&self) -> Rational {
        self.cache.op_sq.get_or_init(|| self.compute_operator_constant_sq()).clone()
    }

    fn compute_operator_constant_sq(&self) -> Rational {
        let (c0_sq, _) = self.norm_equivalence_constants().expect("validated");
        let ginv_bound = c0_sq.recip();
        // |τ_j v|² = vᵀ L_jᵀ G L_j v <= (Σ|A_j|) |v|∞² <= (Σ|A_j|)/c0² |v|²
        let op_sq: Vec<Rational> = (0..self.rank())
            .map(|j| {
                let l = self.regular_rep(&self.basis(j)).map(ratz);
                let a = l.transpose().mul(&self.gram).and_then(|m| m.mul(&l)).expect("square");
                a.abs_entry_sum() * &ginv_bound
            })
            .collect();
        let sum = certified::sum_of_roots_upper(op_sq.iter());
        // |a v| <= |α|∞ Σ_j |τ_j v| and |α|∞² <= |a|²/c0²
        let bound = &sum * &sum * &ginv_bound;
        if self.is_norm_multiplicative() {
            Rational::one()
        } else {
            bound
        }
    }

    /// Whether `|a·b|² = |a|²·|b|²` identically (imaginary quadratic and
    /// definite quaternion orders with their reduced norm).
    pub fn is_norm_multiplicative(&self) -> bool {
        *self.cache.multiplicative.get_or_init(|| self.check_multiplicative())
    }

    fn check_multiplicative(&self) -> bool {
        // N(ab) − N(a)N(b) is a quadratic form in a for fixed b and vice
        // versa; quadratic forms vanishing on {e_i, e_i + e_j} vanish
        let t = self.rank();
        let mut pts: Vec<Vec<Rational>> = (0..t).map(|i| self.unit_vec(i)).collect();
        for i in 0..t {
            for j in i + 1..t {
                let mut v: Vec<Rational> = self.unit_vec(i);
                v[j] = Rational::one();
                pts.push(v);
            }
        }
        pts.iter().all(|a| {
            pts.iter().all(|b| {
                let ab = self.mul_coords(a, b);
                self.norm_sq_rational(&ab) == self.norm_sq_rational(a) * self.norm_sq_rational(b)
            })
        })
    }
}

/// Coefficients `[c_0, …, c_{n-1}, 1]` of `det(xI − A)` via Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &RationalMatrix) -> Result<Vec<Rational>> {
    if !a.is_square() {
        return shape("characteristic polynomial of a non-square matrix");
    }
    let n = a.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = Matrix::<Rational>::zeros(n, n);
    for k in 1..=n {
        let ident = Matrix::<Rational>::identity(n).scale(&coeffs[n - k + 1]);
        m = a.mul(&m)?.add(&ident)?;
        let am = a.mul(&m)?;
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + am.get(i, i));
        coeffs[n - k] = -trace / Rational::from_integer(int(k as i64));
    }
    Ok(coeffs)
}

/// An ordered product `E = E_1 × … × E_n` of rings with distinct tags.
#[derive(Debug, Clone)]
pub struct ProductRingSpec {
    factors: Vec<Arc<RingSpec>>,
}

impl ProductRingSpec {
    pub fn new(factors: Vec<Arc<RingSpec>>) -> Result<Self> {
        if factors.is_empty() {
            return domain("product ring needs at least one factor");
        }
        let tags: BTreeSet<&str> = factors.iter().map(|f| f.tag()).collect();
        if tags.len() != factors.len() {
            return domain("product ring factors must have pairwise distinct tags");
        }
        Ok(ProductRingSpec { factors })
    }

    pub fn factors(&self) -> &[Arc<RingSpec>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &RingSpec {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `t = Σ t_i`.
    pub fn total_rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    pub fn factor_index(&self, tag: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.tag() == tag)
            .ok_or_else(|| Error::Domain(format!("ring {tag} is not a factor")))
    }

    pub fn ring_of(&self, a: &RingElement) -> Result<&RingSpec> {
        Ok(&self.factors[self.factor_index(a.tag())?])
    }

    /// `λ_E² = min_i λ_{E_i}²`.
    pub fn lambda_sq(&self) -> Rational {
        self.factors
            .iter()
            .map(|f| f.lambda_min_nonzero().0)
            .min()
            .expect("non-empty")
    }

    /// Lemma-zero constants for mixed vectors: `(min c0_i², max c1_i²)`.
    pub fn norm_equivalence_constants(&self) -> Result<(Rational, Rational)> {
        let pairs = self
            .factors
            .iter()
            .map(|f| f.norm_equivalence_constants())
            .collect::<Result<Vec<_>>>()?;
        let c0 = pairs.iter().map(|p| p.0.clone()).min().expect("non-empty");
        let c1 = pairs.iter().map(|p| p.1.clone()).max().expect("non-empty");
        Ok((c0, c1))
    }

    /// Rational upper bound on `Σ|τ|` over the whole basis of `E`.
    pub fn basis_norm_sum_upper(&self) -> Rational {
        self.factors.iter().map(|f| f.basis_norm_sum_upper()).sum()
    }

    /// Largest per-factor operator constant `κ²`.
    pub fn operator_constant_sq(&self) -> Rational {
        self.factors
            .iter()
            .map(|f| f.operator_constant_sq())
            .max()
            .expect("non-empty")
    }

    /// `Q₀ = ⌈2·max(1, 1/c₀, Σ|τ|/λ_E)⌉`, decided on squares.
    pub fn compute_q0(&self) -> Result<Integer> {
        let (c0_sq, _) = self.norm_equivalence_constants()?;
        let lambda_sq = self.lambda_sq();
        let tau_sum = self.basis_norm_sum_upper();
        let four = Rational::from_integer(int(4));
        let mut q = int(2);
        loop {
            let qq = Rational::from_integer(&q * &q);
            // q >= 2/c0  <=>  q² c0² >= 4 ;  q >= 2 S/λ  <=>  q² λ² >= 4 S²
            if &qq * &c0_sq >= four && &qq * &lambda_sq >= &four * &tau_sum * &tau_sum {
                return Ok(q);
            }
            q += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use crate::{int, rat};

    #[test]
    fn multiplication_examples() {
        let z = reference::integers();
        let a = z.element_i64(&[3]).unwrap();
        let b = z.element_i64(&[4]).unwrap();
        assert_eq!(z.mul(&a, &b).unwrap(), z.element_i64(&[12]).unwrap());

        let zi = reference::gaussian();
        let i = zi.basis(1);
        assert_eq!(zi.mul(&i, &i).unwrap(), zi.element_i64(&[-1, 0]).unwrap());

        let h = reference::lipschitz();
        assert_eq!(h.mul(&h.basis(1), &h.basis(2)).unwrap(), h.basis(3));
    }

    #[test]
    fn mismatched_tags_rejected() {
        let z = reference::integers();
        let zi = reference::gaussian();
        assert!(matches!(z.mul(&z.one(), &zi.one()), Err(Error::Domain(_))));
    }

    #[test]
    fn rosati_norm_examples() {
        let z = reference::integers();
        let zi = reference::gaussian();
        assert_eq!(zi.norm_sq(&zi.zero()), rat(0, 1));
        assert_eq!(zi.norm_sq(&zi.element_i64(&[2, 1]).unwrap()), rat(5, 1));
        assert_eq!(z.norm_sq(&z.element_i64(&[-3]).unwrap()), rat(9, 1));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(reference::integers().lambda_min_nonzero().0, rat(1, 1));
        assert_eq!(reference::gaussian().lambda_min_nonzero().0, rat(1, 1));
        let diag = reference::diagonal_order("D49", &[rat(4, 1), rat(9, 1)]);
        let (l, w) = diag.lambda_min_nonzero();
        assert_eq!(l, rat(4, 1));
        assert_eq!(diag.norm_sq(&w), l);
    }

    #[test]
    fn norm_equivalence_examples() {
        let zi = reference::gaussian();
        assert_eq!(zi.norm_equivalence_constants().unwrap(), (rat(1, 1), rat(2, 1)));
        let diag = reference::diagonal_order("D23", &[rat(2, 1), rat(3, 1)]);
        assert_eq!(diag.norm_equivalence_constants().unwrap(), (rat(2, 1), rat(5, 1)));
        let seven = reference::diagonal_order("D7", &[rat(7, 1)]);
        assert_eq!(seven.norm_equivalence_constants().unwrap(), (rat(7, 1), rat(7, 1)));
    }

    #[test]
    fn q0_examples() {
        let z = Arc::new(reference::integers());
        let zi = Arc::new(reference::gaussian());
        assert_eq!(ProductRingSpec::new(vec![z.clone()]).unwrap().compute_q0().unwrap(), int(2));
        assert_eq!(ProductRingSpec::new(vec![zi]).unwrap().compute_q0().unwrap(), int(4));
        let z2 = Arc::new(reference::integers_tagged("Z'"));
        assert_eq!(ProductRingSpec::new(vec![z, z2]).unwrap().compute_q0().unwrap(), int(4));
    }

    #[test]
    fn product_requires_distinct_tags() {
        let z = Arc::new(reference::integers());
        assert!(ProductRingSpec::new(vec![z.clone(), z]).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut data = reference::gaussian().to_data();
        data.gram[0][1] = WireRational(rat(1, 1));
        data.gram[1][0] = WireRational(rat(1, 1));
        assert!(RingSpec::from_data(&data).is_err());

        let mut bad_unit = reference::gaussian().to_data();
        bad_unit.mul_table[0][1] = vec![1, 0];
        assert!(RingSpec::from_data(&bad_unit).is_err());
    }

    #[test]
    fn norm_multipliers() {
        for ring in reference::all_reference_rings() {
            for coords in [[1i64, 1, 0, 0], [2, -1, 1, 0], [0, 0, 0, 3]] {
                let a = ring.element_i64(&coords[..ring.rank()]).unwrap();
                if a.is_zero() {
                    continue;
                }
                let (m, n) = ring.left_norm_multiplier(&a).unwrap();
                assert!(n.is_positive());
                assert_eq!(ring.mul(&m, &a).unwrap(), ring.from_integer(n));
            }
        }
    }

    #[test]
    fn characteristic_polynomial_of_rotation() {
        let m = Matrix::from_rows(vec![vec![rat(0, 1), rat(-1, 1)], vec![rat(1, 1), rat(0, 1)]]).unwrap();
        assert_eq!(characteristic_polynomial(&m).unwrap(), vec![rat(1, 1), rat(0, 1), rat(1, 1)]);
    }
}
