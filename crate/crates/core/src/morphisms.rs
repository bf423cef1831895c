//! Block-diagonal morphisms `φ: A^g → A^r` over a product ring.
//!
//! Factor `i` contributes an `r_i × g_i` matrix over `E_i`; there are no
//! off-diagonal blocks. Everything here is exact: ranks go through the
//! lattice representation, determinants through the regular representation.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{consistency, domain, shape, Error, Result};
use crate::linalg::Matrix;
use crate::rings::{ProductRingSpec, RingElement, RingSpec};
use crate::wire::{WireInteger, WireRational};
use crate::{ratz, Integer, Rational};

/// Per-factor counts `(g_1, …, g_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `A^g = A_1^{g_1} × … × A_n^{g_n}`.
#[derive(Debug, Clone)]
pub struct AmbientSpec {
    pub ring: Arc<ProductRingSpec>,
    pub g: MultiIndex,
}

impl AmbientSpec {
    pub fn new(ring: Arc<ProductRingSpec>, g: MultiIndex) -> Result<Self> {
        if g.len() != ring.len() {
            return shape("multi-index length must equal the number of factors");
        }
        Ok(AmbientSpec { ring, g })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.ring.factors().iter().map(|f| f.dimension()).collect()
    }

    /// `Σ d_i g_i`.
    pub fn weighted_dimension(&self) -> usize {
        self.dims().iter().zip(&self.g.0).map(|(d, g)| d * g).sum()
    }
}

/// One `rows × cols` block over a single factor, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Block {
    rows: usize,
    cols: usize,
    entries: Vec<RingElement>,
}

impl Block {
    fn get(&self, r: usize, c: usize) -> &RingElement {
        &self.entries[r * self.cols + c]
    }
}

#[derive(Clone)]
pub struct BlockMorphism {
    ring: Arc<ProductRingSpec>,
    blocks: Vec<Block>,
}

impl PartialEq for BlockMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl Eq for BlockMorphism {}

impl std::hash::Hash for BlockMorphism {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.blocks.hash(state)
    }
}

impl fmt::Debug for BlockMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for b in &self.blocks {
            let rows: Vec<Vec<Vec<String>>> = (0..b.rows)
                .map(|r| {
                    (0..b.cols)
                        .map(|c| b.get(r, c).coords().iter().map(|v| v.to_string()).collect())
                        .collect()
                })
                .collect();
            l.entry(&rows);
        }
        l.finish()
    }
}

/// Wire form: `blocks[i][row][col]` is a coordinate vector over `E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismData {
    pub source: MultiIndex,
    pub target: MultiIndex,
    pub blocks: Vec<Vec<Vec<Vec<WireInteger>>>>,
}

impl BlockMorphism {
    /// Builds from per-factor row-major entry matrices with explicit shapes,
    /// so empty blocks keep their column count.
    pub fn new(ring: Arc<ProductRingSpec>, target: &MultiIndex, source: &MultiIndex, blocks: Vec<Vec<Vec<RingElement>>>) -> Result<Self> {
        if blocks.len() != ring.len() || target.len() != ring.len() || source.len() != ring.len() {
            return shape("one block per ring factor");
        }
        let mut out = Vec::with_capacity(blocks.len());
        for (i, rows) in blocks.into_iter().enumerate() {
            let (r, g) = (target.get(i), source.get(i));
            if rows.len() != r || rows.iter().any(|row| row.len() != g) {
                return shape(format!("block {i} must be {r}x{g}"));
            }
            let f = ring.factor(i);
            let entries: Vec<RingElement> = rows.into_iter().flatten().collect();
            for e in &entries {
                if e.tag() != f.tag() {
                    return domain(format!("entry of {} in block over {}", e.tag(), f.tag()));
                }
                if e.coords().len() != f.rank() {
                    return shape("entry has wrong coordinate length");
                }
            }
            out.push(Block { rows: r, cols: g, entries });
        }
        Ok(BlockMorphism { ring, blocks: out })
    }

    /// Builds from per-factor integer coordinate arrays.
    pub fn from_i64(ring: Arc<ProductRingSpec>, blocks: &[Vec<Vec<Vec<i64>>>]) -> Result<Self> {
        if blocks.len() != ring.len() {
            return shape("one block per ring factor");
        }
        let mut target = Vec::new();
        let mut source = Vec::new();
        let mut elems = Vec::new();
        for (i, b) in blocks.iter().enumerate() {
            let f = ring.factor(i);
            target.push(b.len());
            source.push(b.first().map_or(0, Vec::len));
            elems.push(
                b.iter()
                    .map(|row| row.iter().map(|e| f.element_i64(e)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        BlockMorphism::new(ring, &MultiIndex(target), &MultiIndex(source), elems)
    }

    pub fn from_data(ring: Arc<ProductRingSpec>, data: &MorphismData) -> Result<Self> {
        if data.blocks.len() != ring.len() {
            return shape("one block per ring factor");
        }
        let elems = data
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let f = ring.factor(i);
                b.iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| f.element(e.iter().map(|w| w.0.clone()).collect()))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BlockMorphism::new(ring, &data.target, &data.source, elems)
    }

    pub fn to_data(&self) -> MorphismData {
        MorphismData {
            source: self.source(),
            target: self.target(),
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    (0..b.rows)
                        .map(|r| {
                            (0..b.cols)
                                .map(|c| b.get(r, c).coords().iter().cloned().map(WireInteger).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn zero(ring: Arc<ProductRingSpec>, target: &MultiIndex, source: &MultiIndex) -> Self {
        let blocks = (0..ring.len())
            .map(|i| Block {
                rows: target.get(i),
                cols: source.get(i),
                entries: vec![ring.factor(i).zero(); target.get(i) * source.get(i)],
            })
            .collect();
        BlockMorphism { ring, blocks }
    }

    /// `[k]` on `A^g`.
    pub fn scalar(ring: Arc<ProductRingSpec>, g: &MultiIndex, k: &Integer) -> Self {
        let mut m = Self::zero(ring.clone(), g, g);
        for (i, b) in m.blocks.iter_mut().enumerate() {
            for j in 0..b.rows {
                b.entries[j * b.cols + j] = ring.factor(i).from_integer(k.clone());
            }
        }
        m
    }

    pub fn identity(ring: Arc<ProductRingSpec>, g: &MultiIndex) -> Self {
        Self::scalar(ring, g, &Integer::one())
    }

    pub fn ring(&self) -> &Arc<ProductRingSpec> {
        &self.ring
    }

    pub fn source(&self) -> MultiIndex {
        MultiIndex(self.blocks.iter().map(|b| b.cols).collect())
    }

    pub fn target(&self) -> MultiIndex {
        MultiIndex(self.blocks.iter().map(|b| b.rows).collect())
    }

    pub fn entry(&self, factor: usize, row: usize, col: usize) -> &RingElement {
        self.blocks[factor].get(row, col)
    }

    pub fn block_rows(&self, factor: usize) -> Vec<Vec<RingElement>> {
        let b = &self.blocks[factor];
        (0..b.rows).map(|r| b.entries[r * b.cols..(r + 1) * b.cols].to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.entries.iter().all(RingElement::is_zero))
    }

    /// `|φ|²`: largest Rosati norm² of an entry.
    pub fn norm_sq(&self) -> Rational {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.entries.iter().map(move |e| self.ring.factor(i).norm_sq(e)))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.source() != other.source() || self.target() != other.target() {
            return shape("morphism shapes differ");
        }
        Ok(())
    }

    fn zip_entries(&self, other: &Self, f: impl Fn(&RingSpec, &RingElement, &RingElement) -> Result<RingElement>) -> Result<Self> {
        self.same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .enumerate()
            .map(|(i, (a, b))| {
                let ring = self.ring.factor(i);
                Ok(Block {
                    rows: a.rows,
                    cols: a.cols,
                    entries: a
                        .entries
                        .iter()
                        .zip(&b.entries)
                        .map(|(x, y)| f(ring, x, y))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(BlockMorphism {
            ring: self.ring.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_entries(other, |r, a, b| r.sub(a, b))
    }

    pub fn scale(&self, k: &Integer) -> Self {
        let mut out = self.clone();
        for (i, b) in out.blocks.iter_mut().enumerate() {
            for e in &mut b.entries {
                *e = self.ring.factor(i).scale(e, k);
            }
        }
        out
    }

    /// `self ∘ other`, i.e. the matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.source() != other.target() {
            return shape(format!("cannot compose {} <- {} with {} <- {}", self.target(), self.source(), other.target(), other.source()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .enumerate()
            .map(|(i, (a, b))| {
                let ring = self.ring.factor(i);
                let mut entries = Vec::with_capacity(a.rows * b.cols);
                for r in 0..a.rows {
                    for c in 0..b.cols {
                        let mut acc = vec![Integer::zero(); ring.rank()];
                        for k in 0..a.cols {
                            let p = ring.mul_coords(a.get(r, k).coords(), b.get(k, c).coords());
                            for (x, y) in acc.iter_mut().zip(p) {
                                *x += y;
                            }
                        }
                        entries.push(ring.element(acc)?);
                    }
                }
                Ok(Block {
                    rows: a.rows,
                    cols: b.cols,
                    entries,
                })
            })
            .collect::<Result<_>>()?;
        Ok(BlockMorphism {
            ring: self.ring.clone(),
            blocks,
        })
    }

    /// `(self | other)`: columns of `other` appended per factor.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        if self.target() != other.target() {
            return shape("hconcat needs equal targets");
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let cols = a.cols + b.cols;
                let mut entries = Vec::with_capacity(a.rows * cols);
                for r in 0..a.rows {
                    entries.extend_from_slice(&a.entries[r * a.cols..(r + 1) * a.cols]);
                    entries.extend_from_slice(&b.entries[r * b.cols..(r + 1) * b.cols]);
                }
                Block { rows: a.rows, cols, entries }
            })
            .collect();
        Ok(BlockMorphism {
            ring: self.ring.clone(),
            blocks,
        })
    }

    /// Splits `(φ | φ′)` after the first `g_i` columns of every block.
    pub fn split_columns(&self, g: &MultiIndex) -> Result<(Self, Self)> {
        if g.len() != self.blocks.len() || g.0.iter().zip(&self.blocks).any(|(gi, b)| *gi > b.cols) {
            return shape("split point outside the blocks");
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (gi, b) in g.0.iter().zip(&self.blocks) {
            let mut le = Vec::new();
            let mut re = Vec::new();
            for r in 0..b.rows {
                let row = &b.entries[r * b.cols..(r + 1) * b.cols];
                le.extend_from_slice(&row[..*gi]);
                re.extend_from_slice(&row[*gi..]);
            }
            left.push(Block { rows: b.rows, cols: *gi, entries: le });
            right.push(Block { rows: b.rows, cols: b.cols - gi, entries: re });
        }
        Ok((
            BlockMorphism { ring: self.ring.clone(), blocks: left },
            BlockMorphism { ring: self.ring.clone(), blocks: right },
        ))
    }

    /// Block `i` under the lattice representation: a rational
    /// `(r_i·2d_i) × (g_i·2d_i)` matrix.
    pub fn lattice_matrix(&self, factor: usize) -> Matrix<Rational> {
        let ring = self.ring.factor(factor);
        let b = &self.blocks[factor];
        let n = 2 * ring.dimension();
        let images: Vec<_> = b.entries.iter().map(|e| ring.lattice_image(e)).collect();
        Matrix::from_fn(b.rows * n, b.cols * n, |r, c| ratz(images[(r / n) * b.cols + c / n].get(r % n, c % n)))
    }

    /// Block `i` under the regular representation: a rational
    /// `(r_i·t_i) × (g_i·t_i)` matrix.
    pub fn regular_matrix(&self, factor: usize) -> Matrix<Rational> {
        let ring = self.ring.factor(factor);
        let b = &self.blocks[factor];
        let t = ring.rank();
        let images: Vec<_> = b.entries.iter().map(|e| ring.regular_rep(e)).collect();
        Matrix::from_fn(b.rows * t, b.cols * t, |r, c| ratz(images[(r / t) * b.cols + c / t].get(r % t, c % t)))
    }

    /// Rank multi-index and codimension `Σ d_i r_i`.
    pub fn rank_and_codim(&self) -> (MultiIndex, usize) {
        let mut ranks = Vec::new();
        let mut codim = 0;
        for i in 0..self.blocks.len() {
            let d = self.ring.factor(i).dimension();
            let r = self.lattice_matrix(i).rank() / (2 * d);
            ranks.push(r);
            codim += d * r;
        }
        (MultiIndex(ranks), codim)
    }

    pub fn is_surjective(&self) -> bool {
        self.rank_and_codim().0 == self.target()
    }

    /// Determinant of each square block over `E_i ⊗ Q`, via the regular
    /// representation.
    pub fn rational_determinants(&self) -> Result<Vec<Rational>> {
        (0..self.blocks.len()).map(|i| self.regular_matrix(i).determinant()).collect()
    }

    /// Finds a common positive integer `a` and, for every row, a column equal
    /// to `a` times the matching unit column. Prefers the largest such `a`
    /// and, per row, the smallest column.
    pub fn is_weighted(&self) -> Option<WeightedCertificate> {
        let mut per_row: Vec<Vec<Vec<(Integer, usize)>>> = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let ring = self.ring.factor(i);
            let mut rows = vec![Vec::new(); b.rows];
            for c in 0..b.cols {
                let nonzero: Vec<usize> = (0..b.rows).filter(|r| !b.get(*r, c).is_zero()).collect();
                if let [r] = nonzero[..] {
                    if let Some(a) = ring.as_integer(b.get(r, c)) {
                        if a.is_positive() {
                            rows[r].push((a, c));
                        }
                    }
                }
            }
            per_row.push(rows);
        }
        let mut common: Option<Vec<Integer>> = None;
        for rows in per_row.iter().flatten() {
            let mut vals: Vec<Integer> = rows.iter().map(|(a, _)| a.clone()).collect();
            vals.sort();
            vals.dedup();
            common = Some(match common {
                None => vals,
                Some(prev) => prev.into_iter().filter(|v| vals.contains(v)).collect(),
            });
        }
        let a = match common {
            None => Integer::one(),
            Some(v) => v.into_iter().max()?,
        };
        let columns = per_row
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|cands| cands.iter().filter(|(v, _)| *v == a).map(|(_, c)| *c).min().expect("common value"))
                    .collect()
            })
            .collect();
        WeightedCertificate::new(self, a, columns).ok()
    }

    /// `Φ`: square extension of a weighted `φ` whose first `r_i` rows are
    /// `φ_i` and whose remaining rows are unit rows on the unselected columns.
    pub fn isogeny_extension(&self, cert: &WeightedCertificate) -> Result<Self> {
        cert.verify(self)?;
        let g = self.source();
        let mut out = Self::zero(self.ring.clone(), &g, &g);
        for (i, b) in self.blocks.iter().enumerate() {
            let ring = self.ring.factor(i);
            let ob = &mut out.blocks[i];
            ob.entries[..b.rows * b.cols].clone_from_slice(&b.entries);
            let rest: Vec<usize> = (0..b.cols).filter(|c| !cert.columns[i].contains(c)).collect();
            for (k, c) in rest.iter().enumerate() {
                ob.entries[(b.rows + k) * b.cols + c] = ring.one();
            }
        }
        Ok(out)
    }
}

/// `aI_r` sits inside `φ` at the recorded columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedCertificate {
    pub a: WireInteger,
    /// `columns[i][k]`: column of block `i` holding `a` in row `k`.
    pub columns: Vec<Vec<usize>>,
    /// Realised `C_w² = |φ|²/a²`.
    pub cw_sq: WireRational,
}

impl WeightedCertificate {
    pub fn new(phi: &BlockMorphism, a: Integer, columns: Vec<Vec<usize>>) -> Result<Self> {
        if !a.is_positive() {
            return domain("weight must be a positive integer");
        }
        let a_sq = ratz(&(&a * &a));
        let cert = WeightedCertificate {
            cw_sq: WireRational(phi.norm_sq() / a_sq),
            a: WireInteger(a),
            columns,
        };
        cert.verify(phi)?;
        Ok(cert)
    }

    pub fn a(&self) -> &Integer {
        &self.a.0
    }

    pub fn cw_sq(&self) -> &Rational {
        &self.cw_sq.0
    }

    /// Checks the `aI_r` pattern and `|φ|² <= C_w² a²`.
    pub fn verify(&self, phi: &BlockMorphism) -> Result<()> {
        if self.columns.len() != phi.blocks.len() {
            return shape("certificate has wrong number of factors");
        }
        for (i, (b, cols)) in phi.blocks.iter().zip(&self.columns).enumerate() {
            if cols.len() != b.rows {
                return domain(format!("certificate selects {} columns in a block with {} rows", cols.len(), b.rows));
            }
            let mut seen = cols.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != cols.len() || cols.iter().any(|c| *c >= b.cols) {
                return domain("certificate columns must be distinct and in range");
            }
            let ring = phi.ring.factor(i);
            for (k, c) in cols.iter().enumerate() {
                for r in 0..b.rows {
                    let want = if r == k { ring.from_integer(self.a().clone()) } else { ring.zero() };
                    if *b.get(r, *c) != want {
                        return domain(format!("column {c} of block {i} is not {} times a unit column", self.a()));
                    }
                }
            }
        }
        let a_sq = ratz(&(self.a() * self.a()));
        if phi.norm_sq() > self.cw_sq() * a_sq {
            return domain("|φ|² exceeds C_w²·a²");
        }
        Ok(())
    }

    /// `i_r: A^r → A^g`, the unit matrix on the selected columns.
    pub fn embedding(&self, ring: Arc<ProductRingSpec>, source: &MultiIndex) -> Result<BlockMorphism> {
        if source.len() != self.columns.len() {
            return shape("embedding needs one source count per factor");
        }
        let r = MultiIndex(self.columns.iter().map(Vec::len).collect());
        let mut out = BlockMorphism::zero(ring.clone(), source, &r);
        for (i, cols) in self.columns.iter().enumerate() {
            let b = &mut out.blocks[i];
            for (k, c) in cols.iter().enumerate() {
                if *c >= b.rows {
                    return domain("certificate column outside the source");
                }
                b.entries[c * b.cols + k] = ring.factor(i).one();
            }
        }
        Ok(out)
    }
}

/// `i_r` for a weighted `φ`; `φ ∘ i_r = [a]`.
pub fn embedding_ir(phi: &BlockMorphism, cert: &WeightedCertificate) -> Result<BlockMorphism> {
    cert.verify(phi)?;
    cert.embedding(phi.ring.clone(), &phi.source())
}

/// `(φ | φ′)` with `φ` weighted and a realised `C_s² = |φ̃|²/|φ|²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialCertificate {
    pub g: MultiIndex,
    pub s: MultiIndex,
    pub weighted: WeightedCertificate,
    pub cs_sq: WireRational,
}

impl SpecialCertificate {
    pub fn new(full: &BlockMorphism, g: &MultiIndex) -> Result<Self> {
        let (phi, _) = full.split_columns(g)?;
        let weighted = phi
            .is_weighted()
            .ok_or_else(|| Error::Domain("left part of a special morphism must be weighted".into()))?;
        Self::with_weighted(full, g, weighted)
    }

    pub fn with_weighted(full: &BlockMorphism, g: &MultiIndex, weighted: WeightedCertificate) -> Result<Self> {
        let (phi, _) = full.split_columns(g)?;
        let s = MultiIndex(full.source().0.iter().zip(&g.0).map(|(a, b)| a - b).collect());
        let cert = SpecialCertificate {
            g: g.clone(),
            s,
            cs_sq: WireRational(full.norm_sq() / phi.norm_sq()),
            weighted,
        };
        cert.verify(full)?;
        Ok(cert)
    }

    pub fn cs_sq(&self) -> &Rational {
        &self.cs_sq.0
    }

    pub fn verify(&self, full: &BlockMorphism) -> Result<()> {
        let (phi, _) = full.split_columns(&self.g)?;
        if phi.source().add(&self.s) != full.source() {
            return shape("special split does not match the source");
        }
        self.weighted.verify(&phi)?;
        if full.norm_sq() > self.cs_sq() * phi.norm_sq() {
            return domain("|φ̃|² exceeds C_s²·|φ|²");
        }
        Ok(())
    }
}

/// Non-zero `(a, b)` with `a·x = b·y`.
pub fn solve_ax_eq_by(ring: &RingSpec, x: &RingElement, y: &RingElement) -> Result<(RingElement, RingElement)> {
    if x.is_zero() || y.is_zero() {
        return domain("solve_ax_eq_by needs non-zero x and y");
    }
    if ring.is_commutative() {
        return Ok((y.clone(), x.clone()));
    }
    // m·x = n with n a positive integer, hence central: (y·m)·x = n·y
    let (m, n) = ring.left_norm_multiplier(x)?;
    Ok((ring.mul(y, &m)?, ring.from_integer(n)))
}

fn square_rows(delta: &[Vec<RingElement>]) -> Result<usize> {
    let n = delta.len();
    if n == 0 || delta.iter().any(|r| r.len() != n) {
        return shape("gauss_reduce needs a non-empty square matrix");
    }
    Ok(n)
}

fn mat_mul(ring: &RingSpec, a: &[Vec<RingElement>], b: &[Vec<RingElement>]) -> Result<Vec<Vec<RingElement>>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    (0..inner).try_fold(ring.zero(), |acc, k| ring.add(&acc, &ring.mul(&row[k], &b[k][c])?))
                })
                .collect()
        })
        .collect()
}

/// Left elimination: returns `(Δ′, a)` with `Δ′·Δ = a·I`, `a > 0` minimal
/// after removing the common content.
pub fn gauss_reduce(ring: &RingSpec, delta: &[Vec<RingElement>]) -> Result<(Vec<Vec<RingElement>>, Integer)> {
    let n = square_rows(delta)?;
    let mut m: Vec<Vec<RingElement>> = delta.to_vec();
    let mut t: Vec<Vec<RingElement>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { ring.one() } else { ring.zero() }).collect())
        .collect();
    let row_update = |rows: &mut Vec<Vec<RingElement>>, k: usize, c: usize, v: &RingElement, u: &RingElement| -> Result<()> {
        let new: Vec<RingElement> = (0..rows[k].len())
            .map(|j| ring.sub(&ring.mul(v, &rows[k][j])?, &ring.mul(u, &rows[c][j])?))
            .collect::<Result<_>>()?;
        rows[k] = new;
        Ok(())
    };
    for c in 0..n {
        let pivot = (c..n)
            .filter(|r| !m[*r][c].is_zero())
            .min_by(|a, b| ring.norm_sq(&m[*a][c]).cmp(&ring.norm_sq(&m[*b][c])))
            .ok_or_else(|| Error::Domain("gauss_reduce: matrix is not of full rank".into()))?;
        m.swap(c, pivot);
        t.swap(c, pivot);
        for k in 0..n {
            if k == c || m[k][c].is_zero() {
                continue;
            }
            // v·m[k][c] = u·m[c][c]
            let (v, u) = solve_ax_eq_by(ring, &m[k][c], &m[c][c])?;
            row_update(&mut m, k, c, &v, &u)?;
            row_update(&mut t, k, c, &v, &u)?;
        }
    }
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let (mult, d) = match ring.as_integer(&m[k][k]) {
            Some(d) if d.is_positive() => (ring.one(), d),
            _ => ring.left_norm_multiplier(&m[k][k])?,
        };
        if mult != ring.one() {
            t[k] = t[k].iter().map(|e| ring.mul(&mult, e)).collect::<Result<_>>()?;
        }
        diag.push(d);
    }
    let l = diag.iter().fold(Integer::one(), |acc, d| acc.lcm(d));
    for (k, d) in diag.iter().enumerate() {
        let f = &l / d;
        t[k] = t[k].iter().map(|e| ring.scale(e, &f)).collect();
    }
    let content = t.iter().flatten().fold(l.clone(), |g, e| g.gcd(&e.content()));
    let t: Vec<Vec<RingElement>> = t
        .iter()
        .map(|row| row.iter().map(|e| ring.div_exact(e, &content)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let a = l / content;
    let check = mat_mul(ring, &t, delta)?;
    for (r, row) in check.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            let want = if r == c { ring.from_integer(a.clone()) } else { ring.zero() };
            if *e != want {
                return consistency("gauss_reduce produced Δ′Δ ≠ aI");
            }
        }
    }
    Ok((t, a))
}

/// Result of [`weightify`]: `φ = Δψ` with its certificate.
#[derive(Debug, Clone)]
pub struct Weightified {
    pub delta: BlockMorphism,
    pub phi: BlockMorphism,
    pub cert: WeightedCertificate,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Per factor, the `r_i` columns whose square submatrix has the largest
/// `|det|` over `E_i ⊗ Q` (first in lexicographic order on ties).
pub fn pivot_columns(psi: &BlockMorphism) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for i in 0..psi.blocks.len() {
        let b = &psi.blocks[i];
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for cols in combinations(b.cols, b.rows) {
            let sub = psi.select_factor_columns(i, &cols);
            let det = sub.regular_matrix(i).determinant()?.abs();
            if best.as_ref().is_none_or(|(d, _)| det > *d) {
                best = Some((det, cols));
            }
        }
        match best {
            Some((d, cols)) if !d.is_zero() => out.push(cols),
            _ => return domain(format!("block {i} is not surjective")),
        }
    }
    Ok(out)
}

impl BlockMorphism {
    /// Restriction of block `factor` to the given columns (other blocks are
    /// kept as they are).
    fn select_factor_columns(&self, factor: usize, cols: &[usize]) -> Self {
        let mut out = self.clone();
        let b = &self.blocks[factor];
        out.blocks[factor] = Block {
            rows: b.rows,
            cols: cols.len(),
            entries: (0..b.rows).flat_map(|r| cols.iter().map(move |c| b.get(r, *c).clone())).collect(),
        };
        out
    }
}

/// `Δ` with `Δψ` weighted; identity when `ψ` already is.
pub fn weightify(psi: &BlockMorphism) -> Result<Weightified> {
    if !psi.is_surjective() {
        return domain("weightify needs a surjective morphism");
    }
    if let Some(cert) = psi.is_weighted() {
        return Ok(Weightified {
            delta: BlockMorphism::identity(psi.ring.clone(), &psi.target()),
            phi: psi.clone(),
            cert,
        });
    }
    weightify_at(psi, &pivot_columns(psi)?)
}

/// Gauss reduction on prescribed pivot columns.
pub fn weightify_at(psi: &BlockMorphism, pivots: &[Vec<usize>]) -> Result<Weightified> {
    let r = psi.target();
    if pivots.len() != psi.blocks.len() {
        return shape("one pivot set per factor");
    }
    let mut parts = Vec::new();
    for (i, cols) in pivots.iter().enumerate() {
        if cols.len() != r.get(i) {
            return shape("pivot set size must equal the block's row count");
        }
        if cols.is_empty() {
            parts.push((Vec::new(), Integer::one()));
            continue;
        }
        let sub = psi.select_factor_columns(i, cols);
        parts.push(gauss_reduce(psi.ring.factor(i), &sub.block_rows(i))?);
    }
    let a = parts.iter().fold(Integer::one(), |acc, (_, ai)| acc.lcm(ai));
    let blocks = parts
        .into_iter()
        .enumerate()
        .map(|(i, (d, ai))| {
            let ring = psi.ring.factor(i);
            let f = &a / ai;
            d.into_iter()
                .map(|row| row.into_iter().map(|e| ring.scale(&e, &f)).collect())
                .collect()
        })
        .collect();
    let delta = BlockMorphism::new(psi.ring.clone(), &r, &r, blocks)?;
    let phi = delta.compose(psi)?;
    let cert = WeightedCertificate::new(&phi, a, pivots.to_vec())?;
    Ok(Weightified { delta, phi, cert })
}
