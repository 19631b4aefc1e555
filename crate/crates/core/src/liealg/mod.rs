//! Compact Lie algebras as explicit real matrix algebras.
//!
//! Every algebra is stored through a basis of antisymmetric real matrices
//! that is orthonormal for the biinvariant form
//! `<X, Y>_bi = -tr(XY) / (2 * mult)`, where `mult` is the realification
//! multiplicity (2 for su, 4 for sp, 1 for so and g2). With that scale the
//! root vectors `E_rs - E_sr` of every family have unit length. Elements are
//! coordinate vectors in this basis; brackets go through the structure
//! constants.

pub mod g2;
pub mod realize;
pub mod roots;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::par::{self, Exec};

pub use roots::{weight_spaces, WeightSpace};

/// Identity tolerance for algebraic relations.
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Relative tolerance for grouping rotation speeds.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Su,
    Sp,
    So,
    G2,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(Family::Su),
            "sp" => Ok(Family::Sp),
            "so" => Ok(Family::So),
            "g2" => Ok(Family::G2),
            other => Err(Error::UnsupportedAlgebra(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Su => "su",
            Family::Sp => "sp",
            Family::So => "so",
            Family::G2 => "g2",
        }
    }

    /// Dimension of the algebra of this family and rank parameter.
    pub fn dimension(self, n: usize) -> usize {
        match self {
            Family::Su => n * n - 1,
            Family::Sp => n * (2 * n + 1),
            Family::So => n * (n - 1) / 2,
            Family::G2 => 14,
        }
    }

    pub fn rank(self, n: usize) -> usize {
        match self {
            Family::Su => n - 1,
            Family::Sp => n,
            Family::So => n / 2,
            Family::G2 => 2,
        }
    }

    /// Number of coordinates of the standard torus lattice.
    pub fn torus_coordinates(self, n: usize) -> usize {
        match self {
            Family::Su | Family::Sp => n,
            Family::So => n / 2,
            Family::G2 => 2,
        }
    }

    /// Positive roots in the customary textbook listing: for sp(n) the long
    /// roots `2e_i` first, then `e_i + e_j`, `e_i - e_j` for `i < j`; for
    /// su(n) `e_i - e_j`; for so(n) `e_i - e_j`, `e_i + e_j`, then `e_i`
    /// when n is odd. None for g2.
    pub fn conventional_roots(self, n: usize) -> Option<Vec<Vec<i64>>> {
        let k = self.torus_coordinates(n);
        let e = |i: usize| -> Vec<i64> { (0..k).map(|j| i64::from(i == j)).collect() };
        let add = |a: &[i64], b: &[i64], s: i64| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
        let mut out = Vec::new();
        match self {
            Family::G2 => return None,
            Family::Su => {
                for i in 0..k {
                    for j in i + 1..k {
                        out.push(add(&e(i), &e(j), -1));
                    }
                }
            }
            Family::Sp => {
                for i in 0..k {
                    out.push(add(&e(i), &e(i), 1));
                }
                for i in 0..k {
                    for j in i + 1..k {
                        out.push(add(&e(i), &e(j), 1));
                        out.push(add(&e(i), &e(j), -1));
                    }
                }
            }
            Family::So => {
                for i in 0..k {
                    for j in i + 1..k {
                        out.push(add(&e(i), &e(j), -1));
                        out.push(add(&e(i), &e(j), 1));
                    }
                }
                if n % 2 == 1 {
                    out.extend((0..k).map(e));
                }
            }
        }
        Some(out)
    }

    fn multiplicity(self) -> f64 {
        match self {
            Family::Su => 2.0,
            Family::Sp => 4.0,
            Family::So | Family::G2 => 1.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Generators `T_k` of a maximal torus, realized as matrices. For su(n)
/// these are `i E_kk` in u(n), which act on su(n) by commutator; the
/// lattice `Z^r` of weight vectors maps to `exp(θ Σ w_k T_k)`.
#[derive(Debug, Clone)]
pub struct StandardTorus {
    pub generators: Vec<Mat>,
    /// `ad(T_k)` on algebra coordinates.
    pub ad: Vec<Mat>,
}

/// One root plane g_{±α}: `ad(h) x = α(h) y`, `ad(h) y = -α(h) x`.
#[derive(Debug, Clone)]
pub struct RootPlane {
    /// α evaluated on the torus generators (lexicographically positive).
    pub root: Vec<f64>,
    /// `root` rounded, when every entry is an integer.
    pub integral: Option<Vec<i64>>,
    /// α evaluated on the orthonormal cartan basis.
    pub on_cartan: Vec<f64>,
    pub x: Vector,
    pub y: Vector,
}

impl RootPlane {
    pub fn basis(&self) -> Mat {
        Mat::from_columns(&[self.x.clone(), self.y.clone()])
    }

    /// Squared length of α for the biinvariant form.
    pub fn length_sq(&self) -> f64 {
        self.on_cartan.iter().map(|a| a * a).sum()
    }

    /// Whether `root` equals `r` up to sign (integral comparison).
    pub fn matches(&self, r: &[i64]) -> Option<f64> {
        let own = self.integral.as_ref()?;
        if own.as_slice() == r {
            Some(1.0)
        } else if own.iter().zip(r).all(|(a, b)| *a == -*b) && own.len() == r.len() {
            Some(-1.0)
        } else {
            None
        }
    }

    /// `a x + b y`, with the plane oriented for the representative `sign * α`.
    pub fn vector(&self, a: f64, b: f64, sign: f64) -> Vector {
        &self.x * a + &self.y * (b * sign)
    }
}

#[derive(Debug, Clone)]
pub struct RootDatum {
    /// Orthonormal basis (columns, algebra coordinates) of the torus algebra.
    pub cartan_basis: Mat,
    /// One plane per root pair, sorted descending lexicographically.
    pub planes: Vec<RootPlane>,
    /// Centralizer of the torus.
    pub zero_space: Mat,
}

impl RootDatum {
    pub fn find(&self, root: &[i64]) -> Option<(usize, f64)> {
        self.planes
            .iter()
            .enumerate()
            .find_map(|(i, p)| p.matches(root).map(|s| (i, s)))
    }

    pub fn plane(&self, root: &[i64]) -> Option<&RootPlane> {
        self.find(root).map(|(i, _)| &self.planes[i])
    }
}

/// A torus for [`root_decomposition`]: commuting derivations of the algebra.
#[derive(Debug, Clone)]
pub struct Torus {
    pub ad: Vec<Mat>,
    /// Orthonormal basis of the torus algebra inside g (coordinates).
    pub cartan: Mat,
}

impl Torus {
    /// Torus spanned by a subspace of the algebra (columns are coordinates).
    pub fn from_subspace(alg: &LieAlgebra, cartan: &Mat) -> Result<Torus> {
        let basis = linalg::orthonormalize(&linalg::columns(cartan), alg.dim(), 1e-9);
        for i in 0..basis.ncols() {
            for j in i + 1..basis.ncols() {
                let r = alg
                    .bracket(&basis.column(i).into_owned(), &basis.column(j).into_owned())?
                    .norm();
                if r > ALGEBRA_TOL {
                    return Err(Error::NotAbelian(r));
                }
            }
        }
        let ad = basis
            .column_iter()
            .map(|c| alg.ad(&c.into_owned()))
            .collect();
        Ok(Torus { ad, cartan: basis })
    }
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    label: String,
    family: Option<(Family, usize)>,
    matrix_size: usize,
    form_scale: f64,
    basis: Vec<Mat>,
    /// Row k is `-form_scale * vec(b_k^T)`: coordinates are `flat * vec(X)`.
    flat: Mat,
    structure: Vec<f64>,
    rank: usize,
    torus: Option<StandardTorus>,
    datum: Option<RootDatum>,
}

fn vec_of(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

impl LieAlgebra {
    /// Builds su(n), sp(n), so(n) or g2 (the rank parameter is ignored).
    pub fn build(family: Family, n: usize) -> Result<LieAlgebra> {
        Self::build_with(family, n, Exec::default())
    }

    pub fn build_with(family: Family, n: usize, exec: Exec) -> Result<LieAlgebra> {
        let unsupported = || Error::UnsupportedAlgebra(format!("{family}({n})"));
        let (n, size, span, torus): (usize, usize, Vec<Mat>, Vec<Mat>) = match family {
            Family::Su => {
                if n < 2 || n > 12 {
                    return Err(unsupported());
                }
                let idx: Vec<usize> = (0..n).collect();
                let torus = (0..n).map(|k| realize::su_torus_generator(n, k)).collect();
                (n, 2 * n, realize::su_block(n, &idx), torus)
            }
            Family::Sp => {
                if n < 1 || n > 8 {
                    return Err(unsupported());
                }
                let idx: Vec<usize> = (0..n).collect();
                let torus = (0..n).map(|k| realize::sp_torus_generator(n, k)).collect();
                (n, 4 * n, realize::sp_block(n, &idx), torus)
            }
            Family::So => {
                if n < 3 || n > 16 {
                    return Err(unsupported());
                }
                let idx: Vec<usize> = (0..n).collect();
                let torus = (0..n / 2).map(|k| realize::so_torus_generator(n, k)).collect();
                (n, n, realize::so_block(n, &idx), torus)
            }
            Family::G2 => (0, 7, g2::derivation_basis()?, g2::torus_generators()?),
        };
        let scale = 1.0 / (2.0 * family.multiplicity());
        let label = match family {
            Family::G2 => "g2".to_string(),
            f => format!("{f}({n})"),
        };
        let mut alg = Self::from_matrices(label, size, scale, &span, exec)?;
        if alg.dim() != family.dimension(n) {
            return Err(Error::UnsupportedAlgebra(format!(
                "{family}({n}) realized with dimension {}",
                alg.dim()
            )));
        }
        alg.family = Some((family, n));
        alg.attach_torus(torus)?;
        if alg.rank != family.rank(n) {
            return Err(Error::UnsupportedAlgebra(format!(
                "{family}({n}) has computed rank {}",
                alg.rank
            )));
        }
        Ok(alg)
    }

    /// Algebra spanned by `span` (antisymmetric `size x size` matrices) with
    /// form `-scale * tr(XY)`. Fails if the span does not close.
    pub fn from_matrices(
        label: impl Into<String>,
        size: usize,
        scale: f64,
        span: &[Mat],
        exec: Exec,
    ) -> Result<LieAlgebra> {
        let sq = scale.sqrt();
        let vecs: Vec<Vector> = span.iter().map(|m| vec_of(m) * sq).collect();
        let ortho = linalg::orthonormalize(&vecs, size * size, 1e-9);
        let basis: Vec<Mat> = ortho
            .column_iter()
            .map(|c| Mat::from_column_slice(size, size, c.as_slice()) / sq)
            .collect();
        let dim = basis.len();
        let mut flat = Mat::zeros(dim, size * size);
        for (k, b) in basis.iter().enumerate() {
            let v = vec_of(&b.transpose()) * (-scale);
            flat.row_mut(k).copy_from(&v.transpose());
        }
        let rows = par::map_range(exec, dim, |i| {
            let mut row = vec![0.0; dim * dim];
            let mut worst: f64 = 0.0;
            for j in 0..dim {
                let c = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let coords = &flat * vec_of(&c);
                let back = basis
                    .iter()
                    .zip(coords.iter())
                    .fold(Mat::zeros(size, size), |acc, (b, w)| acc + b * *w);
                worst = worst.max(linalg::max_abs(&(back - &c)));
                row[j * dim..(j + 1) * dim].copy_from_slice(coords.as_slice());
            }
            (row, worst)
        });
        let closure = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        if closure > 1e-9 {
            return Err(Error::NotASubalgebra(closure));
        }
        let structure: Vec<f64> = rows.into_iter().flat_map(|r| r.0).collect();
        let mut alg = LieAlgebra {
            label: label.into(),
            family: None,
            matrix_size: size,
            form_scale: scale,
            basis,
            flat,
            structure,
            rank: 0,
            torus: None,
            datum: None,
        };
        alg.rank = alg.compute_rank(&Mat::identity(dim, dim));
        Ok(alg)
    }

    fn attach_torus(&mut self, generators: Vec<Mat>) -> Result<()> {
        let ad: Vec<Mat> = generators
            .iter()
            .map(|t| self.ad_of_matrix(t))
            .collect::<Result<_>>()?;
        let cartan_cols: Vec<Vector> = generators
            .iter()
            .map(|t| self.coords_unchecked(t))
            .collect();
        let cartan = linalg::orthonormalize(&cartan_cols, self.dim(), 1e-9);
        let torus = Torus { ad: ad.clone(), cartan };
        let datum = root_decomposition_inner(self, &torus)?;
        self.torus = Some(StandardTorus { generators, ad });
        self.datum = Some(datum);
        Ok(())
    }

    /// Subalgebra spanned by the columns of `coords`. The standard torus is
    /// inherited when it lies in (and normalizes) the subalgebra.
    pub fn subalgebra(&self, label: impl Into<String>, coords: &Mat) -> Result<LieAlgebra> {
        let span: Vec<Mat> = coords
            .column_iter()
            .map(|c| self.matrix(&c.into_owned()))
            .collect();
        let mut sub = Self::from_matrices(label, self.matrix_size, self.form_scale, &span, Exec::default())?;
        if let Some(t) = &self.torus {
            let normalizes = t.generators.iter().all(|g| sub.ad_of_matrix(g).is_ok());
            if normalizes {
                // Keep the torus only when it is maximal in the subalgebra.
                let mut trial = sub.clone();
                if trial.attach_torus(t.generators.clone()).is_ok() {
                    sub = trial;
                }
            }
        }
        Ok(sub)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn family(&self) -> Option<(Family, usize)> {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn form_scale(&self) -> f64 {
        self.form_scale
    }

    pub fn standard_torus(&self) -> Option<&StandardTorus> {
        self.torus.as_ref()
    }

    /// Root datum of the standard torus.
    pub fn root_datum(&self) -> Option<&RootDatum> {
        self.datum.as_ref()
    }

    /// `c[i][j][k]` with `[b_i, b_j] = Σ_k c[i][j][k] b_k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let d = self.dim();
        self.structure[(i * d + j) * d + k]
    }

    /// Gram matrix of the biinvariant form on the basis.
    pub fn bi_form(&self) -> Mat {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| self.bi_matrices(&self.basis[i], &self.basis[j]))
    }

    pub fn bi_matrices(&self, x: &Mat, y: &Mat) -> f64 {
        -self.form_scale * (x * y).trace()
    }

    pub fn matrix(&self, x: &Vector) -> Mat {
        let n = self.matrix_size;
        self.basis
            .iter()
            .zip(x.iter())
            .fold(Mat::zeros(n, n), |acc, (b, w)| acc + b * *w)
    }

    fn coords_unchecked(&self, m: &Mat) -> Vector {
        &self.flat * vec_of(m)
    }

    /// Coordinates of a realized matrix; fails if it is not in the algebra.
    pub fn coords(&self, m: &Mat) -> Result<Vector> {
        if m.nrows() != self.matrix_size || m.ncols() != self.matrix_size {
            return Err(Error::DimensionMismatch {
                expected: self.matrix_size,
                got: m.nrows(),
            });
        }
        let c = self.coords_unchecked(m);
        let res = linalg::max_abs(&(self.matrix(&c) - m));
        if res > 1e-8 * linalg::max_abs(m).max(1.0) {
            return Err(Error::InvalidPiece(format!(
                "matrix is not in {} (residual {res:.3e})",
                self.label
            )));
        }
        Ok(c)
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `[x, y]` through the structure constants.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let d = self.dim();
        let mut out = Vector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += w * self.structure[base + k];
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(x)` on coordinates.
    pub fn ad(&self, x: &Vector) -> Mat {
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[(k, j)] += x[i] * self.structure[base + k];
                }
            }
        }
        out
    }

    /// `ad` of a realized matrix normalizing the algebra (it need not lie in it).
    pub fn ad_of_matrix(&self, t: &Mat) -> Result<Mat> {
        let cols: Vec<Vector> = self
            .basis
            .iter()
            .map(|b| {
                let c = t * b - b * t;
                let v = self.coords_unchecked(&c);
                let res = linalg::max_abs(&(self.matrix(&v) - &c));
                if res > 1e-9 {
                    Err(Error::DoesNotNormalize(res))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Mat::from_columns(&cols))
    }

    /// Matrix of `Ad(g)` on coordinates for an orthogonal realized `g`.
    pub fn adjoint(&self, g: &Mat) -> Result<Mat> {
        if g.nrows() != self.matrix_size || g.ncols() != self.matrix_size {
            return Err(Error::DimensionMismatch {
                expected: self.matrix_size,
                got: g.nrows(),
            });
        }
        let orth = linalg::max_abs(&(g * g.transpose() - Mat::identity(self.matrix_size, self.matrix_size)));
        if orth > 1e-9 {
            return Err(Error::NotInGroup(orth));
        }
        let gt = g.transpose();
        let cols: Vec<Vector> = self
            .basis
            .iter()
            .map(|b| {
                let c = g * b * &gt;
                let v = self.coords_unchecked(&c);
                let res = linalg::max_abs(&(self.matrix(&v) - &c));
                if res > 1e-9 {
                    Err(Error::NotInGroup(res))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Mat::from_columns(&cols))
    }

    /// `exp(x)` as a realized group element.
    pub fn exp(&self, x: &Vector) -> Mat {
        self.matrix(x).exp()
    }

    /// `exp(angle * Σ w_k T_k)` for a weight vector on the standard torus.
    pub fn torus_element(&self, weights: &[f64], angle: f64) -> Result<Mat> {
        let t = self
            .torus
            .as_ref()
            .ok_or_else(|| Error::TorusAlignment(format!("{} has no standard torus", self.label)))?;
        if weights.len() != t.generators.len() {
            return Err(Error::DimensionMismatch {
                expected: t.generators.len(),
                got: weights.len(),
            });
        }
        let n = self.matrix_size;
        let x = t
            .generators
            .iter()
            .zip(weights)
            .fold(Mat::zeros(n, n), |acc, (g, w)| acc + g * (*w * angle));
        Ok(x.exp())
    }

    /// Algebra element `Σ w_k T_k` projected onto the algebra (for su(n) this
    /// removes the trace).
    pub fn torus_vector(&self, weights: &[f64]) -> Result<Vector> {
        let t = self
            .torus
            .as_ref()
            .ok_or_else(|| Error::TorusAlignment(format!("{} has no standard torus", self.label)))?;
        if weights.len() != t.generators.len() {
            return Err(Error::DimensionMismatch {
                expected: t.generators.len(),
                got: weights.len(),
            });
        }
        Ok(t
            .generators
            .iter()
            .zip(weights)
            .fold(Vector::zeros(self.dim()), |acc, (g, w)| {
                acc + self.coords_unchecked(g) * *w
            }))
    }

    /// Rank of the subalgebra spanned by the orthonormal columns `sub`:
    /// dimension of the centralizer of a generic element.
    pub fn compute_rank(&self, sub: &Mat) -> usize {
        if sub.ncols() == 0 {
            return 0;
        }
        let mut rng = linalg::rng(0x5eed_0001);
        let x = sub * linalg::gaussian_vector(&mut rng, sub.ncols());
        let restricted = sub.transpose() * self.ad(&x) * sub;
        linalg::null_space(&restricted, 1e-9, 1e-12).ncols()
    }

    /// Largest Jacobi residual over all basis triples.
    pub fn jacobi_residual(&self, exec: Exec) -> f64 {
        let d = self.dim();
        par::max_range(exec, d, |i| {
            let mut worst: f64 = 0.0;
            for j in 0..d {
                for k in j + 1..d {
                    for m in 0..d {
                        let mut acc = 0.0;
                        for l in 0..d {
                            acc += self.structure_constant(j, k, l) * self.structure_constant(i, l, m)
                                + self.structure_constant(k, i, l) * self.structure_constant(j, l, m)
                                + self.structure_constant(i, j, l) * self.structure_constant(k, l, m);
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
            worst
        })
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst
                        .max((self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|<[b_i,b_j],b_k> + <b_j,[b_i,b_k]>|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim();
        let form = self.bi_form();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut a = 0.0;
                    let mut b = 0.0;
                    for l in 0..d {
                        a += self.structure_constant(i, j, l) * form[(l, k)];
                        b += form[(j, l)] * self.structure_constant(i, k, l);
                    }
                    worst = worst.max((a + b).abs());
                }
            }
        }
        worst
    }
}

/// Root planes of `alg` with respect to a maximal torus.
pub fn root_decomposition(alg: &LieAlgebra, torus: &Torus) -> Result<RootDatum> {
    root_decomposition_inner(alg, torus)
}

fn root_decomposition_inner(alg: &LieAlgebra, torus: &Torus) -> Result<RootDatum> {
    let d = alg.dim();
    for i in 0..torus.ad.len() {
        for j in i + 1..torus.ad.len() {
            let c = &torus.ad[i] * &torus.ad[j] - &torus.ad[j] * &torus.ad[i];
            let r = linalg::max_abs(&c);
            if r > ALGEBRA_TOL {
                return Err(Error::NotAbelian(r));
            }
        }
    }
    let spaces = weight_spaces(&torus.ad, &Mat::identity(d, d), CLUSTER_TOL)?;
    let cartan_ad: Vec<Mat> = torus
        .cartan
        .column_iter()
        .map(|c| alg.ad(&c.into_owned()))
        .collect();
    let mut zero_space = linalg::empty(d);
    let mut planes = Vec::new();
    for s in spaces {
        let Some(j) = &s.complex_structure else {
            zero_space = s.basis.clone();
            continue;
        };
        if s.dim() != 2 {
            return Err(Error::Diagonalization(format!(
                "root space of real dimension {} (torus not generic or not maximal)",
                s.dim()
            )));
        }
        // x: projection of the coordinate axis best aligned with the plane.
        let proj = &s.basis * s.basis.transpose();
        let (best, _) = (0..d)
            .map(|i| (i, proj.column(i).norm()))
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 + 1e-12 { cur } else { acc });
        let x = proj.column(best).normalize();
        let local = s.basis.transpose() * &x;
        let y = &s.basis * (j * local);
        let on_cartan = cartan_ad.iter().map(|a| y.dot(&(a * &x))).collect();
        let integral = linalg::to_integers(&s.weights, 1e-8);
        planes.push(RootPlane {
            root: s.weights,
            integral,
            on_cartan,
            x,
            y,
        });
    }
    if zero_space.ncols() != torus.cartan.ncols() {
        return Err(Error::Diagonalization(format!(
            "centralizer of the torus has dimension {} but the torus has dimension {}",
            zero_space.ncols(),
            torus.cartan.ncols()
        )));
    }
    planes.sort_by(|a, b| roots::lex_desc(&a.root, &b.root, 1e-8));
    Ok(RootDatum {
        cartan_basis: torus.cartan.clone(),
        planes,
        zero_space,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_families() {
        assert_eq!(LieAlgebra::build(Family::Su, 2).unwrap().dim(), 3);
        assert_eq!(LieAlgebra::build(Family::Sp, 3).unwrap().dim(), 21);
        assert_eq!(LieAlgebra::build(Family::So, 5).unwrap().dim(), 10);
        let g2 = LieAlgebra::build(Family::G2, 0).unwrap();
        assert_eq!(g2.dim(), 14);
        assert_eq!(g2.root_datum().unwrap().planes.len(), 6);
    }

    #[test]
    fn unsupported_ranks_are_rejected() {
        assert!(matches!(
            LieAlgebra::build(Family::So, 2),
            Err(Error::UnsupportedAlgebra(_))
        ));
        assert!(matches!(
            LieAlgebra::build(Family::Su, 1),
            Err(Error::UnsupportedAlgebra(_))
        ));
        assert!(Family::parse("e8").is_err());
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let alg = LieAlgebra::build(Family::Sp, 2).unwrap();
        let mut rng = linalg::rng(1);
        let x = linalg::gaussian_vector(&mut rng, alg.dim());
        assert!(alg.bracket(&x, &x).unwrap().norm() < 1e-13);
        assert!(alg.bracket(&x, &Vector::zeros(3)).is_err());
    }

    #[test]
    fn sp2_roots_are_the_c2_system() {
        let alg = LieAlgebra::build(Family::Sp, 2).unwrap();
        let roots: Vec<Vec<i64>> = alg
            .root_datum()
            .unwrap()
            .planes
            .iter()
            .map(|p| p.integral.clone().unwrap())
            .collect();
        assert_eq!(roots, vec![vec![2, 0], vec![1, 1], vec![1, -1], vec![0, 2]]);
    }

    #[test]
    fn su_roots_are_differences() {
        let alg = LieAlgebra::build(Family::Su, 4).unwrap();
        let datum = alg.root_datum().unwrap();
        assert_eq!(datum.planes.len(), 6);
        for p in &datum.planes {
            let r = p.integral.clone().unwrap();
            assert_eq!(r.iter().sum::<i64>(), 0);
            assert_eq!(r.iter().filter(|x| **x == 1).count(), 1);
            assert_eq!(r.iter().filter(|x| **x == -1).count(), 1);
        }
    }

    #[test]
    fn root_plane_rotation_relations() {
        let alg = LieAlgebra::build(Family::So, 6).unwrap();
        let datum = alg.root_datum().unwrap();
        let t = alg.standard_torus().unwrap();
        for p in &datum.planes {
            for (k, a) in t.ad.iter().enumerate() {
                assert!((a * &p.x - &p.y * p.root[k]).norm() < 1e-10);
                assert!((a * &p.y + &p.x * p.root[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn non_abelian_cartan_is_rejected() {
        let alg = LieAlgebra::build(Family::Su, 3).unwrap();
        let m = Mat::identity(alg.dim(), alg.dim()).columns(0, 2).into_owned();
        assert!(matches!(Torus::from_subspace(&alg, &m), Err(Error::NotAbelian(_))));
    }
}
