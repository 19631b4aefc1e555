//! Homogeneous spaces G/H: reductive complements, isotropy tori, fixed point
//! sets of isotropy elements, regularity and Ad-rotation speeds.
//!
//! Vectors of `m` are stored in coordinates of the orthonormal `m_basis`;
//! elements of `g` in coordinates of the algebra basis.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::liealg::{self, realize, Family, LieAlgebra, Torus};
use crate::linalg::{self, Mat, Vector};

const SPAN_TOL: f64 = 1e-9;
const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFamily {
    Su,
    Sp,
    So,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// su/sp/so block on the given (0-based) coordinates.
    Block {
        family: BlockFamily,
        indices: Vec<usize>,
    },
    /// Circle `exp(θ Σ w_k T_k)` of the standard torus.
    Circle { weights: Vec<i64> },
    /// Quaternionic Sp(1) acting on one coordinate of H^n.
    Sp1Block { index: usize },
    /// The su(2) of a root of the standard torus (integral torus coordinates).
    RootSu2 { root: Vec<i64> },
    /// Arbitrary realized matrices of the algebra.
    Explicit { matrices: Vec<Mat> },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubalgebraSpec {
    pub pieces: Vec<Piece>,
}

impl SubalgebraSpec {
    pub fn new(pieces: Vec<Piece>) -> Self {
        SubalgebraSpec { pieces }
    }
}

/// A maximal torus of the isotropy algebra.
#[derive(Debug, Clone)]
pub struct IsotropyTorus {
    /// Elements of `h` (g-coordinates) spanning the torus.
    pub elements: Vec<Vector>,
    /// The same elements as weight vectors on the standard torus of `g`,
    /// present when the torus is aligned with it.
    pub lattice: Option<Vec<Vec<f64>>>,
}

impl IsotropyTorus {
    pub fn rank(&self) -> usize {
        self.elements.len()
    }

    pub fn is_aligned(&self) -> bool {
        self.lattice.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    g: Arc<LieAlgebra>,
    spec: SubalgebraSpec,
    h: Mat,
    m: Mat,
    rank_g: usize,
    rank_h: usize,
    torus: IsotropyTorus,
    /// Trace removed from each su circle piece (weight units per coordinate).
    trace_shifts: Vec<f64>,
    /// `m^T ad(h_j) m` for an orthonormal basis of `h`.
    h_ad_m: Vec<Mat>,
}

fn check_indices(indices: &[usize], n: usize, min: usize) -> Result<()> {
    if indices.len() < min {
        return Err(Error::InvalidPiece(format!(
            "block needs at least {min} indices, got {}",
            indices.len()
        )));
    }
    for (a, i) in indices.iter().enumerate() {
        if *i >= n {
            return Err(Error::InvalidPiece(format!("index {} out of range 1..={n}", i + 1)));
        }
        if indices[..a].contains(i) {
            return Err(Error::InvalidPiece(format!("repeated index {}", i + 1)));
        }
    }
    Ok(())
}

/// Coroot-type element of a root: torus weight vector `c` with `α(c) = 2`.
fn coroot_weights(g: &LieAlgebra, root: &[i64]) -> Result<(Vec<f64>, Vec<Vector>)> {
    let datum = g
        .root_datum()
        .ok_or_else(|| Error::TorusAlignment("algebra has no standard torus".into()))?;
    let plane = datum
        .plane(root)
        .ok_or_else(|| Error::InvalidPiece(format!("{root:?} is not a root of {}", g.label())))?;
    let x = plane.x.clone();
    let y = plane.y.clone();
    let hvec = g.bracket(&x, &y)?;
    let t = g.standard_torus().expect("datum implies torus");
    // Least-squares weights c with Σ c_k coords(T_k) = hvec.
    let cols: Vec<Vector> = (0..t.generators.len())
        .map(|k| {
            let mut w = vec![0.0; t.generators.len()];
            w[k] = 1.0;
            g.torus_vector(&w)
        })
        .collect::<Result<_>>()?;
    let a = Mat::from_columns(&cols);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&hvec, 1e-12)
        .map_err(|e| Error::TorusAlignment(e.to_string()))?;
    let alpha_c: f64 = plane.root.iter().zip(c.iter()).map(|(r, w)| r * w).sum();
    if alpha_c.abs() < 1e-12 {
        return Err(Error::TorusAlignment("degenerate coroot".into()));
    }
    let c: Vec<f64> = c.iter().map(|w| w * 2.0 / alpha_c).collect();
    Ok((c, vec![x, y, hvec]))
}

impl HomogeneousSpace {
    /// `G/H` for the subalgebra generated by `spec`.
    pub fn build(g: Arc<LieAlgebra>, spec: SubalgebraSpec) -> Result<HomogeneousSpace> {
        let (family, n) = g.family().ok_or_else(|| {
            Error::UnsupportedAlgebra(format!("{} is not a named family", g.label()))
        })?;
        let size = g.matrix_size();
        let mut span: Vec<Vector> = Vec::new();
        let mut lattice: Vec<Vec<f64>> = Vec::new();
        let mut aligned = true;
        let mut trace_shifts = Vec::new();
        let coords_of = |ms: Vec<Mat>| -> Result<Vec<Vector>> { ms.iter().map(|m| g.coords(m)).collect() };
        let ntor = family.torus_coordinates(n);
        let unit = |k: usize| -> Vec<f64> {
            let mut w = vec![0.0; ntor];
            w[k] = 1.0;
            w
        };
        for piece in &spec.pieces {
            match piece {
                Piece::Block { family: bf, indices } => {
                    let ms = match (bf, family) {
                        (BlockFamily::Su, Family::Su) => {
                            check_indices(indices, n, 2)?;
                            realize::su_block(n, indices)
                        }
                        (BlockFamily::Su, Family::Sp) => {
                            check_indices(indices, n, 2)?;
                            realize::su_in_sp_block(n, indices)
                        }
                        (BlockFamily::Sp, Family::Sp) => {
                            check_indices(indices, n, 1)?;
                            realize::sp_block(n, indices)
                        }
                        (BlockFamily::So, Family::So) => {
                            check_indices(indices, n, 2)?;
                            realize::so_block(n, indices)
                        }
                        (bf, f) => {
                            return Err(Error::InvalidPiece(format!(
                                "{bf:?} block is not available in {f}"
                            )))
                        }
                    };
                    span.extend(coords_of(ms)?);
                    match bf {
                        BlockFamily::Su => {
                            for w in indices.windows(2) {
                                let mut v = vec![0.0; ntor];
                                v[w[0]] = 1.0;
                                v[w[1]] = -1.0;
                                lattice.push(v);
                            }
                        }
                        BlockFamily::Sp => lattice.extend(indices.iter().map(|&i| unit(i))),
                        BlockFamily::So => {
                            let mut sorted = indices.clone();
                            sorted.sort_unstable();
                            let pairs_aligned = sorted
                                .chunks(2)
                                .all(|c| c.len() == 1 || (c[0] % 2 == 0 && c[1] == c[0] + 1));
                            if pairs_aligned {
                                lattice.extend(
                                    sorted.chunks(2).filter(|c| c.len() == 2).map(|c| unit(c[0] / 2)),
                                );
                            } else {
                                aligned = false;
                            }
                        }
                    }
                }
                Piece::Circle { weights } => {
                    if weights.len() != ntor {
                        return Err(Error::InvalidPiece(format!(
                            "circle needs {ntor} weights for {}, got {}",
                            g.label(),
                            weights.len()
                        )));
                    }
                    if weights.iter().all(|w| *w == 0) {
                        return Err(Error::InvalidPiece("circle with all weights zero".into()));
                    }
                    let w: Vec<f64> = weights.iter().map(|x| *x as f64).collect();
                    if family == Family::Su {
                        trace_shifts.push(w.iter().sum::<f64>() / n as f64);
                    }
                    span.push(g.torus_vector(&w)?);
                    lattice.push(w);
                }
                Piece::Sp1Block { index } => {
                    if family != Family::Sp {
                        return Err(Error::InvalidPiece(format!(
                            "sp1 block is not available in {}",
                            g.label()
                        )));
                    }
                    check_indices(&[*index], n, 1)?;
                    span.extend(coords_of(realize::sp_block(n, &[*index]))?);
                    lattice.push(unit(*index));
                }
                Piece::RootSu2 { root } => {
                    if root.len() != ntor {
                        return Err(Error::InvalidPiece(format!(
                            "root needs {ntor} coordinates, got {}",
                            root.len()
                        )));
                    }
                    let (c, vecs) = coroot_weights(&g, root)?;
                    span.extend(vecs);
                    lattice.push(c);
                }
                Piece::Explicit { matrices } => {
                    for m in matrices {
                        if m.nrows() != size || m.ncols() != size {
                            return Err(Error::DimensionMismatch {
                                expected: size,
                                got: m.nrows(),
                            });
                        }
                    }
                    span.extend(coords_of(matrices.clone())?);
                    aligned = false;
                }
            }
        }
        let h = linalg::orthonormalize(&span, g.dim(), SPAN_TOL);
        let torus = if aligned {
            Some(lattice)
        } else {
            None
        };
        Self::from_parts(g, spec, h, torus, trace_shifts)
    }

    /// Space for an arbitrary subalgebra (columns of `h`, g-coordinates).
    /// `lattice` lists candidate torus weight vectors aligned with the
    /// standard torus; without it a torus of `h` is computed numerically.
    pub fn from_parts(
        g: Arc<LieAlgebra>,
        spec: SubalgebraSpec,
        h: Mat,
        lattice: Option<Vec<Vec<f64>>>,
        trace_shifts: Vec<f64>,
    ) -> Result<HomogeneousSpace> {
        let d = g.dim();
        let h = linalg::orthonormalize(&linalg::columns(&h), d, SPAN_TOL);
        let hcols = linalg::columns(&h);
        let mut closure: f64 = 0.0;
        for i in 0..hcols.len() {
            for j in i + 1..hcols.len() {
                let b = g.bracket(&hcols[i], &hcols[j])?;
                closure = closure.max(linalg::vector_outside(&h, &b).norm());
            }
        }
        if closure > CLOSURE_TOL {
            return Err(Error::NotASubalgebra(closure));
        }
        let m = linalg::complement(&h, d);
        let rank_g = g.rank();
        let rank_h = g.compute_rank(&h);
        let h_ad_m: Vec<Mat> = hcols.iter().map(|x| m.transpose() * g.ad(x) * &m).collect();
        for x in &hcols {
            let leak = linalg::outside_residual(&m, &(g.ad(x) * &m));
            if leak > CLOSURE_TOL {
                return Err(Error::NotASubalgebra(leak));
            }
        }
        let torus = Self::isotropy_torus(&g, &h, rank_h, lattice)?;
        Ok(HomogeneousSpace {
            g,
            spec,
            h,
            m,
            rank_g,
            rank_h,
            torus,
            trace_shifts,
            h_ad_m,
        })
    }

    fn isotropy_torus(
        g: &LieAlgebra,
        h: &Mat,
        rank_h: usize,
        lattice: Option<Vec<Vec<f64>>>,
    ) -> Result<IsotropyTorus> {
        if let Some(candidates) = lattice {
            let mut elements: Vec<Vector> = Vec::new();
            let mut kept: Vec<Vec<f64>> = Vec::new();
            let mut span = linalg::empty(g.dim());
            let mut ok = true;
            for w in candidates {
                let x = g.torus_vector(&w)?;
                if linalg::vector_outside(h, &x).norm() > 1e-9 * x.norm().max(1.0) {
                    ok = false;
                    break;
                }
                let rest = linalg::vector_outside(&span, &x);
                if rest.norm() > 1e-9 * x.norm() {
                    let mut cols = linalg::columns(&span);
                    cols.push(rest.normalize());
                    span = Mat::from_columns(&cols);
                    elements.push(x);
                    kept.push(w);
                }
            }
            if ok && elements.len() == rank_h {
                return Ok(IsotropyTorus {
                    elements,
                    lattice: Some(kept),
                });
            }
        }
        // Centralizer of a generic element of h inside h.
        if h.ncols() == 0 {
            return Ok(IsotropyTorus {
                elements: Vec::new(),
                lattice: None,
            });
        }
        let mut rng = linalg::rng(0x7075_0001);
        let x = h * linalg::gaussian_vector(&mut rng, h.ncols());
        let restricted = h.transpose() * g.ad(&x) * h;
        let kernel = linalg::null_space(&restricted, 1e-9, 1e-12);
        let cartan = h * kernel;
        let elements = linalg::columns(&cartan);
        if elements.len() != rank_h {
            return Err(Error::TorusAlignment(format!(
                "torus of h has dimension {} but rank is {rank_h}",
                elements.len()
            )));
        }
        Ok(IsotropyTorus {
            elements,
            lattice: None,
        })
    }

    pub fn g(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn g_arc(&self) -> &Arc<LieAlgebra> {
        &self.g
    }

    pub fn spec(&self) -> &SubalgebraSpec {
        &self.spec
    }

    pub fn h_basis(&self) -> &Mat {
        &self.h
    }

    pub fn m_basis(&self) -> &Mat {
        &self.m
    }

    pub fn dim_h(&self) -> usize {
        self.h.ncols()
    }

    pub fn dim_m(&self) -> usize {
        self.m.ncols()
    }

    pub fn rank_g(&self) -> usize {
        self.rank_g
    }

    pub fn rank_h(&self) -> usize {
        self.rank_h
    }

    pub fn torus(&self) -> &IsotropyTorus {
        &self.torus
    }

    pub fn trace_shifts(&self) -> &[f64] {
        &self.trace_shifts
    }

    /// `m^T ad(h_j) m` for the orthonormal basis of `h`.
    pub fn isotropy_action(&self) -> &[Mat] {
        &self.h_ad_m
    }

    /// `ad(t_j)` restricted to `m`, for the isotropy torus elements.
    pub fn torus_action(&self) -> Vec<Mat> {
        self.torus
            .elements
            .iter()
            .map(|t| self.m.transpose() * self.g.ad(t) * &self.m)
            .collect()
    }

    /// g-coordinates of an m-vector.
    pub fn to_g(&self, x: &Vector) -> Vector {
        &self.m * x
    }

    /// m-coordinates of the m-part of a g-vector.
    pub fn to_m(&self, x: &Vector) -> Vector {
        self.m.transpose() * x
    }

    /// Projection onto m of a subspace given in g-coordinates, as m-coordinates.
    pub fn subspace_to_m(&self, basis: &Mat) -> Mat {
        let cols: Vec<Vector> = basis.column_iter().map(|c| self.m.transpose() * c).collect();
        linalg::orthonormalize(&cols, self.dim_m(), 1e-9)
    }

    /// `[x, y]` in g for m-vectors.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.g.bracket(&self.to_g(x), &self.to_g(y))
    }

    /// `[x, y]_m` in m-coordinates.
    pub fn bracket_m(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        Ok(self.to_m(&self.bracket(x, y)?))
    }

    /// Matrix of `w ↦ [x, w]_m` on m.
    pub fn ad_m(&self, x: &Vector) -> Mat {
        self.m.transpose() * self.g.ad(&self.to_g(x)) * &self.m
    }

    /// Matrix of `w ↦ [x, w]` from m into g.
    pub fn ad_to_g(&self, x: &Vector) -> Mat {
        self.g.ad(&self.to_g(x)) * &self.m
    }

    /// Largest `|[h, m]|` component outside m (reductivity check).
    pub fn reductive_residual(&self) -> f64 {
        self.h
            .column_iter()
            .map(|x| linalg::outside_residual(&self.m, &(self.g.ad(&x.into_owned()) * &self.m)))
            .fold(0.0, f64::max)
    }

    /// `Ad(exp x)` restricted to m, for `x` in g-coordinates.
    pub fn ad_exp_on_m(&self, x: &Vector) -> Mat {
        self.m.transpose() * self.g.ad(x).exp() * &self.m
    }

    /// `Ad(g)` on m for a realized group element normalizing h.
    pub fn adjoint_on_m(&self, elt: &Mat) -> Result<Mat> {
        let ad = self.g.adjoint(elt)?;
        let leak = linalg::outside_residual(&self.m, &(&ad * &self.m));
        if leak > 1e-9 {
            return Err(Error::DoesNotNormalize(leak));
        }
        Ok(self.m.transpose() * ad * &self.m)
    }

    /// Seeded sample of isotropy elements acting on m: exponentials of
    /// random elements of h followed by torus lattice points.
    pub fn isotropy_samples(&self, count: usize, seed: u64) -> Vec<Mat> {
        let mut rng = linalg::rng(seed);
        let mut out = Vec::with_capacity(count);
        if self.dim_h() == 0 {
            out.push(Mat::identity(self.dim_m(), self.dim_m()));
            return out;
        }
        let tor = self.torus_action();
        for i in 0..count {
            if i % 2 == 1 && !tor.is_empty() {
                // 2π k / 7 rotations on the torus.
                let k = (i / 2 % 6 + 1) as f64;
                let j = i / 2 % tor.len();
                out.push((&tor[j] * (2.0 * std::f64::consts::PI * k / 7.0)).exp());
            } else {
                let x = &self.h * linalg::gaussian_vector(&mut rng, self.dim_h()) * 1.3;
                out.push(self.ad_exp_on_m(&x));
            }
        }
        out
    }

    /// Orthonormal (Frobenius) basis of the Ad(H)-invariant symmetric
    /// bilinear forms on m.
    pub fn invariant_forms(&self) -> Vec<Mat> {
        invariant_symmetric_forms(&self.h_ad_m, self.dim_m())
    }

    /// Ad(H)-fixed vectors of m (orthonormal columns, m-coordinates).
    pub fn fixed_vectors(&self) -> Mat {
        let d = self.dim_m();
        if self.h_ad_m.is_empty() {
            return Mat::identity(d, d);
        }
        let rows: usize = self.h_ad_m.len() * d;
        let mut stacked = Mat::zeros(rows, d);
        for (j, a) in self.h_ad_m.iter().enumerate() {
            stacked.view_mut((j * d, 0), (d, d)).copy_from(a);
        }
        linalg::null_space(&stacked, 1e-9, 1e-12)
    }
}

/// Symmetric matrices commuting with every (antisymmetric) operator in `ops`.
pub fn invariant_symmetric_forms(ops: &[Mat], d: usize) -> Vec<Mat> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let basis_elt = |p: usize| -> Mat {
        let (i, j) = pairs[p];
        let mut s = Mat::zeros(d, d);
        if i == j {
            s[(i, i)] = 1.0;
        } else {
            let c = std::f64::consts::FRAC_1_SQRT_2;
            s[(i, j)] = c;
            s[(j, i)] = c;
        }
        s
    };
    if ops.is_empty() {
        return (0..np).map(basis_elt).collect();
    }
    // Gram matrix of the linear map S ↦ ([S, A_j])_j on the isometric basis.
    let images: Vec<Vec<Mat>> = (0..np)
        .map(|p| {
            let s = basis_elt(p);
            ops.iter().map(|a| &s * a - a * &s).collect()
        })
        .collect();
    let gram = Mat::from_fn(np, np, |p, q| {
        images[p]
            .iter()
            .zip(&images[q])
            .map(|(x, y)| x.dot(y))
            .sum()
    });
    let (vals, vecs) = linalg::sorted_symmetric_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(1e-300);
    vals.iter()
        .enumerate()
        .filter(|(_, v)| **v <= 1e-12 * top.max(1.0))
        .map(|(k, _)| {
            (0..np).fold(Mat::zeros(d, d), |acc, p| acc + basis_elt(p) * vecs[(p, k)])
        })
        .collect()
}

/// One summand of an isotropy decomposition.
#[derive(Debug, Clone)]
pub struct Summand {
    pub label: String,
    /// Torus weights (canonical sign); integral when the torus is aligned.
    pub signature: Vec<f64>,
    pub integral: Option<Vec<i64>>,
    /// Orthonormal basis in m-coordinates.
    pub basis: Mat,
    /// Complex structure on `basis` coordinates (absent for the zero weight).
    pub complex_structure: Option<Mat>,
}

impl Summand {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct InvariantDecomposition {
    pub summands: Vec<Summand>,
}

impl InvariantDecomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.summands.iter().map(Summand::dim).collect()
    }

    pub fn find(&self, label: &str) -> Option<&Summand> {
        self.summands.iter().find(|s| s.label == label)
    }

    /// Largest |<a, b>| between distinct summands.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.summands.iter().enumerate() {
            for b in &self.summands[i + 1..] {
                worst = worst.max(linalg::max_abs(&(a.basis.transpose() * &b.basis)));
            }
        }
        worst
    }
}

/// Splits m into ad(t_H)-weight spaces. The zero weight (if any) is `m0`;
/// the other summands follow in descending lexicographic order of their
/// signatures as `m1, m2, …`.
pub fn isotropy_invariant_decomposition(x: &HomogeneousSpace) -> Result<InvariantDecomposition> {
    let ops = x.torus_action();
    let d = x.dim_m();
    let spaces = liealg::weight_spaces(&ops, &Mat::identity(d, d), liealg::CLUSTER_TOL)?;
    let mut zero = Vec::new();
    let mut rest = Vec::new();
    for s in spaces {
        if s.is_zero() {
            zero.push(s);
        } else {
            rest.push(s);
        }
    }
    rest.sort_by(|a, b| liealg::roots::lex_desc(&a.weights, &b.weights, 1e-8));
    let aligned = x.torus().is_aligned();
    let mut summands = Vec::new();
    let mut next = 1;
    for s in zero.into_iter().chain(rest) {
        let label = if s.is_zero() {
            "m0".to_string()
        } else {
            let l = format!("m{next}");
            next += 1;
            l
        };
        let integral = if aligned {
            linalg::to_integers(&s.weights, 1e-8)
        } else {
            None
        };
        summands.push(Summand {
            label,
            signature: s.weights,
            integral,
            basis: s.basis,
            complex_structure: s.complex_structure,
        });
    }
    Ok(InvariantDecomposition { summands })
}

/// Basis of `{x ∈ g : Ad(elt) x = x}`.
pub fn centralizer_subalgebra(g: &LieAlgebra, elt: &Mat) -> Result<Mat> {
    let ad = g.adjoint(elt)?;
    let d = g.dim();
    Ok(linalg::null_space(&(ad - Mat::identity(d, d)), 1e-9, 1e-10))
}

/// Ideal factor of the fixed point algebra and its share of the isotropy.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealFactor {
    pub dim: usize,
    pub isotropy_dim: usize,
    pub quotient_dim: usize,
    pub abelian: bool,
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub space: HomogeneousSpace,
    pub rank_g: usize,
    pub rank_total: usize,
    pub rank_h: usize,
    pub rank_isotropy: usize,
    /// `dim(G/H) - dim(Fix)`.
    pub codimension: usize,
    pub factors: Vec<IdealFactor>,
    /// Whether the isotropy is the sum of its intersections with the factors.
    pub isotropy_splits: bool,
}

impl FixedPointReport {
    pub fn ranks_equal(&self) -> bool {
        self.rank_total == self.rank_g && self.rank_isotropy == self.rank_h
    }
}

/// Ideals of a compact Lie algebra given as the whole of `alg`: the center
/// (one factor) and the simple ideals.
pub fn ideal_decomposition(alg: &LieAlgebra) -> Vec<Mat> {
    let d = alg.dim();
    if d == 0 {
        return Vec::new();
    }
    let ads: Vec<Mat> = (0..d)
        .map(|i| {
            let mut e = Vector::zeros(d);
            e[i] = 1.0;
            alg.ad(&e)
        })
        .collect();
    let mut stacked = Mat::zeros(d * d, d);
    for (i, a) in ads.iter().enumerate() {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(a);
    }
    let center = linalg::null_space(&stacked, 1e-9, 1e-12);
    let derived = linalg::complement(&center, d);
    let mut out = Vec::new();
    if center.ncols() > 0 {
        out.push(center);
    }
    if derived.ncols() == 0 {
        return out;
    }
    let restricted: Vec<Mat> = ads.iter().map(|a| derived.transpose() * a * &derived).collect();
    let forms = invariant_symmetric_forms(&restricted, derived.ncols());
    let mut rng = linalg::rng(0x1dea_0001);
    let generic = forms
        .iter()
        .fold(Mat::zeros(derived.ncols(), derived.ncols()), |acc, f| {
            acc + f * linalg::gaussian_vector(&mut rng, 1)[0]
        });
    let (vals, vecs) = linalg::sorted_symmetric_eigen(&generic);
    let scale = vals.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || (vals[i] - vals[i - 1]).abs() > 1e-7 * scale {
            let block = vecs.columns(start, i - start).into_owned();
            out.push(&derived * block);
            start = i;
        }
    }
    out
}

/// The homogeneous space `C(ι)/(C(ι) ∩ H)`.
pub fn fixed_point_space(x: &HomogeneousSpace, iota: &Mat) -> Result<FixedPointReport> {
    let g = x.g();
    let ad = g.adjoint(iota)?;
    let leak = linalg::outside_residual(x.h_basis(), &(&ad * x.h_basis()));
    if leak > 1e-9 {
        return Err(Error::DoesNotNormalize(leak));
    }
    let d = g.dim();
    let is_identity = linalg::max_abs(&(&ad - Mat::identity(d, d))) < 1e-10;
    let c = linalg::null_space(&(&ad - Mat::identity(d, d)), 1e-9, 1e-10);
    let hi = linalg::intersection(&c, x.h_basis(), 1e-9);
    let space = if is_identity {
        x.clone()
    } else {
        let sub = Arc::new(g.subalgebra(format!("c(ι) in {}", g.label()), &c)?);
        let to_sub = |v: &Vector| -> Result<Vector> { sub.coords(&g.matrix(v)) };
        let h_cols: Vec<Vector> = hi.column_iter().map(|v| to_sub(&v.into_owned())).collect::<Result<_>>()?;
        let h_sub = if h_cols.is_empty() {
            linalg::empty(sub.dim())
        } else {
            Mat::from_columns(&h_cols)
        };
        // Keep the lattice description when the isotropy torus survives.
        let lattice = x.torus().lattice.as_ref().and_then(|lat| {
            let inside = x
                .torus()
                .elements
                .iter()
                .all(|t| linalg::vector_outside(&c, t).norm() < 1e-9);
            (inside && sub.standard_torus().is_some()).then(|| lat.clone())
        });
        let matrices = h_cols.iter().map(|v| sub.matrix(v)).collect();
        HomogeneousSpace::from_parts(
            sub,
            SubalgebraSpec::new(vec![Piece::Explicit { matrices }]),
            h_sub,
            lattice,
            Vec::new(),
        )?
    };
    let ideals = ideal_decomposition(space.g());
    let hs = space.h_basis();
    let mut factors = Vec::new();
    let mut total_iso = 0;
    for ideal in &ideals {
        let inter = linalg::intersection(ideal, hs, 1e-9).ncols();
        total_iso += inter;
        let abelian = (0..ideal.ncols()).all(|i| {
            (0..ideal.ncols()).all(|j| {
                space
                    .g()
                    .bracket(&ideal.column(i).into_owned(), &ideal.column(j).into_owned())
                    .map(|b| b.norm() < 1e-9)
                    .unwrap_or(false)
            })
        });
        factors.push(IdealFactor {
            dim: ideal.ncols(),
            isotropy_dim: inter,
            quotient_dim: ideal.ncols() - inter,
            abelian,
        });
    }
    let codimension = x.dim_m() - space.dim_m();
    Ok(FixedPointReport {
        rank_g: x.rank_g(),
        rank_total: space.g().rank(),
        rank_h: x.rank_h(),
        rank_isotropy: space.rank_h(),
        codimension,
        isotropy_splits: total_iso == hs.ncols(),
        factors,
        space,
    })
}

/// An h-root plane matched to a root plane of g.
#[derive(Debug, Clone)]
pub struct RootMatch {
    /// Weights of the h-root on the isotropy torus elements.
    pub h_root: Vec<f64>,
    /// Restriction of the matched g-root to the isotropy torus.
    pub restricted_g_root: Vec<f64>,
    /// The matched g-root evaluated on the aligned cartan basis.
    pub g_root_on_cartan: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub regular: bool,
    /// Rank of `n_g(h) ∩ c_g(t_H)`.
    pub normalizer_rank: usize,
    pub rank_g: usize,
    /// Number of root pairs of h.
    pub h_roots: usize,
    pub matching: Vec<RootMatch>,
    /// Cartan of g containing t_H, when one normalizing h exists.
    pub aligned_cartan: Option<Mat>,
}

/// Whether h is regular: normalized by a maximal torus of g that contains
/// a maximal torus of h. In that case every root of h is the restriction
/// of a root of g whose plane lies in h, and the matching is reported.
pub fn is_regular_subalgebra(x: &HomogeneousSpace) -> Result<RegularityReport> {
    let g = x.g();
    let d = g.dim();
    let h = x.h_basis();
    let m = x.m_basis();
    let t_elems = &x.torus().elements;
    // n_g(h): x with m^T ad(h_j) x = 0; c_g(t_H): ad(t) x = 0.
    let mut blocks: Vec<Mat> = Vec::new();
    for hj in h.column_iter() {
        blocks.push(m.transpose() * g.ad(&hj.into_owned()));
    }
    for t in t_elems {
        blocks.push(g.ad(t));
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = Mat::zeros(rows.max(1), d);
    let mut r = 0;
    for b in &blocks {
        stacked.view_mut((r, 0), (b.nrows(), d)).copy_from(b);
        r += b.nrows();
    }
    let nc = linalg::null_space(&stacked, 1e-9, 1e-10);
    let mut rng = linalg::rng(0x4e67_0001);
    let generic = &nc * linalg::gaussian_vector(&mut rng, nc.ncols());
    let restricted = nc.transpose() * g.ad(&generic) * &nc;
    let cartan = &nc * linalg::null_space(&restricted, 1e-9, 1e-11);
    let normalizer_rank = cartan.ncols();
    let rank_g = g.rank();

    let h_ops: Vec<Mat> = t_elems.iter().map(|t| g.ad(t)).collect();
    let t_span = linalg::orthonormalize(t_elems, d, 1e-9);
    let h_rest = linalg::intersection(&linalg::complement(&t_span, d), h, 1e-9);
    let h_spaces = liealg::weight_spaces(&h_ops, &h_rest, liealg::CLUSTER_TOL)?;
    let h_root_spaces: Vec<_> = h_spaces.into_iter().filter(|s| !s.is_zero()).collect();
    let h_roots: usize = h_root_spaces.iter().map(|s| s.dim() / 2).sum();

    if normalizer_rank != rank_g {
        return Ok(RegularityReport {
            regular: false,
            normalizer_rank,
            rank_g,
            h_roots,
            matching: Vec::new(),
            aligned_cartan: None,
        });
    }
    let torus = Torus::from_subspace(g, &cartan)?;
    let datum = liealg::root_decomposition(g, &torus)?;
    let mut matching = Vec::new();
    let mut all = true;
    for s in &h_root_spaces {
        let mut found = 0;
        for p in &datum.planes {
            let inside = linalg::outside_residual(h, &p.basis()) < 1e-8;
            if !inside {
                continue;
            }
            let weights: Vec<f64> = h_ops.iter().map(|a| p.y.dot(&(a * &p.x))).collect();
            let same = weights.iter().zip(&s.weights).all(|(a, b)| (a - b).abs() < 1e-8)
                || weights.iter().zip(&s.weights).all(|(a, b)| (a + b).abs() < 1e-8);
            let in_space = linalg::outside_residual(&s.basis, &p.basis()) < 1e-8;
            if same && in_space {
                found += 1;
                matching.push(RootMatch {
                    h_root: s.weights.clone(),
                    restricted_g_root: weights,
                    g_root_on_cartan: p.on_cartan.clone(),
                });
            }
        }
        if found * 2 != s.dim() {
            all = false;
        }
    }
    Ok(RegularityReport {
        regular: all,
        normalizer_rank,
        rank_g,
        h_roots,
        matching,
        aligned_cartan: Some(cartan),
    })
}

/// Rotation speed of a circle of the standard torus on a root plane in m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSpeed {
    pub root: Vec<i64>,
    pub speed: i64,
}

/// Order in which [`ad_rotation_speeds_ordered`] lists root planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootOrder {
    /// Descending lexicographic on the torus coordinates.
    #[default]
    Canonical,
    /// [`Family::conventional_roots`]; falls back to canonical for g2.
    Conventional,
}

/// Speeds of `Ad(exp θ Σ w_k T_k)` on the root planes of g contained in m,
/// in the canonical root order.
pub fn ad_rotation_speeds(x: &HomogeneousSpace, weights: &[i64]) -> Result<Vec<RotationSpeed>> {
    ad_rotation_speeds_ordered(x, weights, RootOrder::Canonical)
}

/// [`ad_rotation_speeds`] with a choice of listing order. Roots are reported
/// with the sign of the chosen listing.
pub fn ad_rotation_speeds_ordered(
    x: &HomogeneousSpace,
    weights: &[i64],
    order: RootOrder,
) -> Result<Vec<RotationSpeed>> {
    let speeds = canonical_speeds(x, weights)?;
    let listing = match (order, x.g().family()) {
        (RootOrder::Conventional, Some((family, n))) => family.conventional_roots(n),
        _ => None,
    };
    let Some(listing) = listing else {
        return Ok(speeds);
    };
    Ok(listing
        .into_iter()
        .filter_map(|r| {
            let neg: Vec<i64> = r.iter().map(|a| -a).collect();
            speeds
                .iter()
                .find(|s| s.root == r || s.root == neg)
                .map(|s| RotationSpeed { root: r, speed: s.speed })
        })
        .collect())
}

fn canonical_speeds(x: &HomogeneousSpace, weights: &[i64]) -> Result<Vec<RotationSpeed>> {
    let g = x.g();
    let datum = g
        .root_datum()
        .ok_or_else(|| Error::TorusAlignment(format!("{} has no standard torus", g.label())))?;
    let t = g.standard_torus().expect("datum implies torus");
    if weights.len() != t.generators.len() {
        return Err(Error::DimensionMismatch {
            expected: t.generators.len(),
            got: weights.len(),
        });
    }
    let op = t
        .ad
        .iter()
        .zip(weights)
        .fold(Mat::zeros(g.dim(), g.dim()), |acc, (a, w)| acc + a * (*w as f64));
    let mut out = Vec::new();
    for p in &datum.planes {
        if linalg::outside_residual(x.m_basis(), &p.basis()) > 1e-8 {
            continue;
        }
        let root = p
            .integral
            .clone()
            .ok_or_else(|| Error::OffLattice(format!("root {:?} is not integral", p.root)))?;
        let exact: i64 = root.iter().zip(weights).map(|(a, b)| a * b).sum();
        let numeric = p.y.dot(&(&op * &p.x));
        if (numeric - exact as f64).abs() > 1e-8 * (1.0 + numeric.abs()) {
            return Err(Error::OffLattice(format!(
                "speed on {root:?} is {numeric} but the lattice predicts {exact}"
            )));
        }
        out.push(RotationSpeed {
            root,
            speed: exact.abs(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(f: Family, n: usize, pieces: Vec<Piece>) -> HomogeneousSpace {
        let g = Arc::new(LieAlgebra::build(f, n).unwrap());
        HomogeneousSpace::build(g, SubalgebraSpec::new(pieces)).unwrap()
    }

    #[test]
    fn dims_of_complements() {
        let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![2, 1] }]);
        assert_eq!(x.dim_m(), 9);
        let x = space(
            Family::Su,
            4,
            vec![
                Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] },
                Piece::Circle { weights: vec![1, 1, -1, -1] },
            ],
        );
        assert_eq!(x.dim_m(), 11);
        assert!(x.reductive_residual() < 1e-12);
        let x = space(
            Family::Sp,
            3,
            vec![Piece::Sp1Block { index: 2 }, Piece::Circle { weights: vec![1, 3, 0] }],
        );
        assert_eq!(x.dim_m(), 17);
        assert_eq!(x.rank_g() - x.rank_h(), 1);
        assert!(x.torus().is_aligned());
    }

    #[test]
    fn non_closing_span_is_rejected() {
        let g = Arc::new(LieAlgebra::build(Family::Su, 3).unwrap());
        let a = g.basis()[0].clone();
        let b = g.basis()[1].clone();
        let err = HomogeneousSpace::build(
            g,
            SubalgebraSpec::new(vec![Piece::Explicit { matrices: vec![a, b] }]),
        );
        assert!(matches!(err, Err(Error::NotASubalgebra(_))));
    }

    #[test]
    fn circle_weight_length_is_checked() {
        let g = Arc::new(LieAlgebra::build(Family::Su, 3).unwrap());
        let err = HomogeneousSpace::build(
            g,
            SubalgebraSpec::new(vec![Piece::Circle { weights: vec![1, -1] }]),
        );
        assert!(matches!(err, Err(Error::InvalidPiece(_))));
    }

    #[test]
    fn centralizers_of_involutions() {
        let g = LieAlgebra::build(Family::Su, 4).unwrap();
        let iota = g.torus_element(&[2.0, 0.0, -1.0, -1.0], std::f64::consts::PI).unwrap();
        // diag(1, 1, -1, -1) up to the realification.
        assert_eq!(centralizer_subalgebra(&g, &iota).unwrap().ncols(), 7);
        let so7 = LieAlgebra::build(Family::So, 7).unwrap();
        let mut d = Mat::identity(7, 7);
        for i in 0..4 {
            d[(i, i)] = -1.0;
        }
        assert_eq!(centralizer_subalgebra(&so7, &d).unwrap().ncols(), 9);
        assert_eq!(centralizer_subalgebra(&so7, &Mat::identity(7, 7)).unwrap().ncols(), 21);
        assert!(centralizer_subalgebra(&so7, &(Mat::identity(7, 7) * 2.0)).is_err());
    }

    #[test]
    fn fixed_point_spaces() {
        let x = space(Family::Su, 3, vec![Piece::Circle { weights: vec![1, 0, -1] }]);
        let iota = x.g().torus_element(&[1.0, 0.0, -1.0], std::f64::consts::PI).unwrap();
        let r = fixed_point_space(&x, &iota).unwrap();
        assert_eq!(r.space.g().dim(), 4);
        assert_eq!(r.space.dim_m(), 3);
        assert!(r.ranks_equal());
        assert_eq!(r.codimension % 2, 0);

        let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![1, 0] }]);
        let iota = x.g().torus_element(&[1.0, 0.0], std::f64::consts::PI).unwrap();
        let r = fixed_point_space(&x, &iota).unwrap();
        let mut q: Vec<usize> = r.factors.iter().map(|f| f.quotient_dim).collect();
        q.sort_unstable();
        assert_eq!(q, vec![2, 3]);
        assert!(r.isotropy_splits);

        let same = fixed_point_space(&x, &Mat::identity(8, 8)).unwrap();
        assert_eq!(same.space.dim_m(), x.dim_m());
    }

    #[test]
    fn regularity() {
        let x = space(
            Family::Su,
            4,
            vec![Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] }],
        );
        let r = is_regular_subalgebra(&x).unwrap();
        assert!(r.regular);
        assert_eq!(r.matching.len(), 1);
        let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![3, 1] }]);
        assert!(is_regular_subalgebra(&x).unwrap().regular);

        // Principal so(3) in so(5): so(3) acting on traceless symmetric 3x3
        // matrices by commutator.
        let g = Arc::new(LieAlgebra::build(Family::So, 5).unwrap());
        let mut sym0: Vec<Vector> = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut s = Mat::zeros(3, 3);
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
            sym0.push(Vector::from_column_slice(s.as_slice()));
        }
        for d in [[1.0, -1.0, 0.0], [1.0, 1.0, -2.0]] {
            let s = Mat::from_diagonal(&Vector::from_vec(d.to_vec()));
            sym0.push(Vector::from_column_slice(s.as_slice()));
        }
        let basis = linalg::orthonormalize(&sym0, 9, 1e-9);
        let gens: Vec<Mat> = realize::so_block(3, &[0, 1, 2])
            .iter()
            .map(|x| {
                Mat::from_fn(5, 5, |r, c| {
                    let s = Mat::from_column_slice(3, 3, basis.column(c).as_slice());
                    let img = x * &s - &s * x;
                    basis.column(r).dot(&Vector::from_column_slice(img.as_slice()))
                })
            })
            .collect();
        let [j3, jp, jq]: [Mat; 3] = gens.try_into().unwrap();
        let x = HomogeneousSpace::build(
            g,
            SubalgebraSpec::new(vec![Piece::Explicit { matrices: vec![j3, jp, jq] }]),
        )
        .unwrap();
        assert_eq!(x.dim_h(), 3);
        let r = is_regular_subalgebra(&x).unwrap();
        assert!(!r.regular);
    }

    #[test]
    fn speeds_in_sp2_and_sp3() {
        for (p, q) in [(2i64, 1i64), (5, 2), (3, 1)] {
            let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![p, q] }]);
            let s = ad_rotation_speeds(&x, &[p, q]).unwrap();
            let get = |r: &[i64]| s.iter().find(|e| e.root == r).unwrap().speed;
            assert_eq!(get(&[2, 0]), 2 * p);
            assert_eq!(get(&[0, 2]), 2 * q);
            assert_eq!(get(&[1, 1]), p + q);
            assert_eq!(get(&[1, -1]), p - q);
        }
        let x = space(Family::Sp, 2, vec![Piece::Circle { weights: vec![2, 1] }]);
        assert!(ad_rotation_speeds(&x, &[0, 0]).unwrap().iter().all(|s| s.speed == 0));
    }

    #[test]
    fn conventional_listing() {
        let x = space(
            Family::Sp,
            3,
            vec![Piece::Sp1Block { index: 2 }, Piece::Circle { weights: vec![1, 3, 0] }],
        );
        let s = ad_rotation_speeds_ordered(&x, &[1, 3, 4], RootOrder::Conventional).unwrap();
        let speeds: Vec<i64> = s.iter().map(|e| e.speed).collect();
        assert_eq!(speeds, vec![2, 6, 4, 2, 5, 3, 7, 1]);
        assert_eq!(s[3].root, vec![1, -1, 0]);
        assert_eq!(Family::So.conventional_roots(5).unwrap().len(), 4);
        assert_eq!(Family::Su.conventional_roots(4).unwrap().len(), 6);
        assert!(Family::G2.conventional_roots(0).is_none());
    }

    #[test]
    fn decomposition_of_example_two() {
        let x = space(
            Family::Su,
            4,
            vec![
                Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] },
                Piece::Circle { weights: vec![1, 1, -1, -1] },
            ],
        );
        let dec = isotropy_invariant_decomposition(&x).unwrap();
        assert_eq!(dec.dims(), vec![3, 4, 4]);
        assert!(dec.orthogonality_residual() < 1e-10);
        assert_eq!(dec.summands[1].integral, Some(vec![1, 2]));
    }

    #[test]
    fn invariant_forms_commute() {
        let x = space(
            Family::Su,
            4,
            vec![
                Piece::Block { family: BlockFamily::Su, indices: vec![0, 1] },
                Piece::Circle { weights: vec![1, 1, -1, -1] },
            ],
        );
        let forms = x.invariant_forms();
        assert!(!forms.is_empty());
        for f in &forms {
            for a in x.isotropy_action() {
                assert!(linalg::max_abs(&(f * a - a * f)) < 1e-10);
            }
        }
    }
}
