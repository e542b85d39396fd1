//! Dense multilinear algebra over an `n`-dimensional frame.
//!
//! A [`Tensor`] of degree `d` stores its `n^d` components row-major, with the
//! first slot varying slowest. Slot `k` corresponds to the `k`-th argument of
//! the multilinear form, so `t[[x, y, z]]` is `t(e_x, e_y, e_z)`.
//!
//! Every operation allocates a fresh result; inputs are never mutated.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    degree: usize,
    dim: usize,
    data: Vec<f64>,
}

fn decode(mut offset: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = offset % dim;
        offset /= dim;
    }
}

fn encode(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl Tensor {
    pub fn zeros(degree: usize, dim: usize) -> Self {
        Tensor {
            degree,
            dim,
            data: vec![0.0; dim.pow(degree as u32)],
        }
    }

    pub fn scalar(value: f64) -> Self {
        Tensor {
            degree: 0,
            dim: 1,
            data: vec![value],
        }
    }

    pub fn from_vec(degree: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(degree as u32);
        if data.len() != expected {
            return Err(Error::WrongLength {
                expected,
                found: data.len(),
            });
        }
        if let Some(offset) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { offset });
        }
        Ok(Tensor { degree, dim, data })
    }

    /// Builds a tensor of degree `D` from a closure over index tuples.
    pub fn from_fn<const D: usize>(dim: usize, mut f: impl FnMut([usize; D]) -> f64) -> Self {
        let mut idx = [0usize; D];
        let data = (0..dim.pow(D as u32))
            .map(|offset| {
                decode(offset, dim, &mut idx);
                f(idx)
            })
            .collect();
        Tensor {
            degree: D,
            dim,
            data,
        }
    }

    /// Like [`Tensor::from_fn`] for a degree only known at run time.
    pub fn from_fn_dyn(degree: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut idx = vec![0usize; degree];
        let data = (0..dim.pow(degree as u32))
            .map(|offset| {
                decode(offset, dim, &mut idx);
                f(&idx)
            })
            .collect();
        Tensor { degree, dim, data }
    }

    /// Degree-2 tensor with `t(e_i, e_j) = m[(i, j)]`.
    pub fn from_matrix(m: &Matrix) -> Self {
        Tensor::from_fn(m.nrows(), |[i, j]| m[(i, j)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    /// Value of a degree-0 tensor (or the first component otherwise).
    pub fn value(&self) -> f64 {
        self.data[0]
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.degree);
        self.data[encode(idx, self.dim)]
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        self.expect_degree(2)?;
        Ok(Matrix::from_fn(self.dim, self.dim, |i, j| self[[i, j]]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, a: f64) -> Tensor {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor {
            degree: self.degree,
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Component-wise `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Tensor, b: f64) -> Result<Tensor> {
        self.expect_same_shape(other)?;
        Ok(Tensor {
            degree: self.degree,
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Max-abs distance between two tensors of the same shape.
    pub fn distance(&self, other: &Tensor) -> Result<f64> {
        Ok(self.lincomb(1.0, other, -1.0)?.max_abs())
    }

    /// Reorders slots: `result(i_0, …, i_{d-1}) = self(i_{perm[0]}, …, i_{perm[d-1]})`.
    ///
    /// For instance `t.permute(&[1, 2, 0])` evaluates to `t(y, z, x)` at `(x, y, z)`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        if perm.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; self.degree];
        for &p in perm {
            if p >= self.degree || seen[p] {
                return Err(Error::SlotOutOfRange {
                    slot: p,
                    degree: self.degree,
                });
            }
            seen[p] = true;
        }
        let mut src = vec![0usize; self.degree];
        Ok(Tensor::from_fn_dyn(self.degree, self.dim, |idx| {
            for (s, &p) in src.iter_mut().zip(perm) {
                *s = idx[p];
            }
            self.get(&src)
        }))
    }

    /// Contracts slots `a < b` against `g_inv`: `Σ_{i,j} g^{ij} t[…i…j…]`.
    pub fn contract(&self, g_inv: &Matrix, a: usize, b: usize) -> Result<Tensor> {
        if a >= b {
            return Err(Error::SlotOrder { a, b });
        }
        if b >= self.degree {
            return Err(Error::SlotOutOfRange {
                slot: b,
                degree: self.degree,
            });
        }
        self.expect_matrix(g_inv)?;
        let n = self.dim;
        let mut out = Tensor::zeros(self.degree - 2, n);
        let mut idx = vec![0usize; self.degree];
        let mut rest = Vec::with_capacity(self.degree - 2);
        for (offset, &v) in self.data.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            decode(offset, n, &mut idx);
            let w = g_inv[(idx[a], idx[b])];
            if w == 0.0 {
                continue;
            }
            rest.clear();
            rest.extend(
                idx.iter()
                    .enumerate()
                    .filter(|&(s, _)| s != a && s != b)
                    .map(|(_, &i)| i),
            );
            out.data[encode(&rest, n)] += w * v;
        }
        Ok(out)
    }

    /// Substitutes `P x` into one slot: `result[…a…] = Σ_b P^b_a t[…b…]`.
    pub fn compose_p(&self, p: &Matrix, slot: usize) -> Result<Tensor> {
        self.apply_matrix(p, slot, |b, a| p[(b, a)])
    }

    /// [`Tensor::compose_p`] applied to several slots in turn.
    pub fn compose_p_slots(&self, p: &Matrix, slots: &[usize]) -> Result<Tensor> {
        slots
            .iter()
            .try_fold(self.clone(), |t, &s| t.compose_p(p, s))
    }

    /// Raises one slot with the inverse metric: `result[…a…] = Σ_b g^{ab} t[…b…]`.
    ///
    /// The raised slot then holds vector components, which is how `Q(x,y)`,
    /// `T(x,y)` and `(∇_x P)y` are recovered from their lowered forms.
    pub fn raise_slot(&self, g_inv: &Matrix, slot: usize) -> Result<Tensor> {
        self.apply_matrix(g_inv, slot, |b, a| g_inv[(a, b)])
    }

    fn apply_matrix(
        &self,
        m: &Matrix,
        slot: usize,
        coeff: impl Fn(usize, usize) -> f64,
    ) -> Result<Tensor> {
        if slot >= self.degree {
            return Err(Error::SlotOutOfRange {
                slot,
                degree: self.degree,
            });
        }
        self.expect_matrix(m)?;
        let n = self.dim;
        let mut out = Tensor::zeros(self.degree, n);
        let mut idx = vec![0usize; self.degree];
        for (offset, &v) in self.data.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            decode(offset, n, &mut idx);
            let b = idx[slot];
            for a in 0..n {
                let c = coeff(b, a);
                if c != 0.0 {
                    idx[slot] = a;
                    out.data[encode(&idx, n)] += c * v;
                }
            }
            idx[slot] = b;
        }
        Ok(out)
    }

    /// `result(x,y,z) = t(x,y,z) + t(y,z,x) + t(z,x,y)`.
    pub fn cyclic_sum3(&self) -> Result<Tensor> {
        self.expect_degree(3)?;
        Ok(Tensor::from_fn(self.dim, |[x, y, z]| {
            self[[x, y, z]] + self[[y, z, x]] + self[[z, x, y]]
        }))
    }

    /// Cyclic sum over the first three slots of a degree-4 tensor.
    pub fn cyclic_sum_first3(&self) -> Result<Tensor> {
        self.expect_degree(4)?;
        Ok(Tensor::from_fn(self.dim, |[x, y, z, w]| {
            self[[x, y, z, w]] + self[[y, z, x, w]] + self[[z, x, y, w]]
        }))
    }

    /// Full metric inner product, every slot of `self` paired with the same slot of `other`.
    pub fn inner(&self, other: &Tensor, g_inv: &Matrix) -> Result<f64> {
        self.expect_same_shape(other)?;
        let raised = (0..self.degree).try_fold(self.clone(), |t, s| t.raise_slot(g_inv, s))?;
        Ok(raised
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Square norm induced by the metric; non-negative for a positive definite metric.
    pub fn norm_sq(&self, g_inv: &Matrix) -> Result<f64> {
        self.inner(self, g_inv)
    }

    pub fn expect_degree(&self, degree: usize) -> Result<()> {
        if self.degree != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: self.degree,
            });
        }
        Ok(())
    }

    fn expect_matrix(&self, m: &Matrix) -> Result<()> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        Ok(())
    }

    fn expect_same_shape(&self, other: &Tensor) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.expect_degree_of(other)
    }

    fn expect_degree_of(&self, other: &Tensor) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }
}

impl<const D: usize> Index<[usize; D]> for Tensor {
    type Output = f64;

    fn index(&self, idx: [usize; D]) -> &f64 {
        debug_assert_eq!(D, self.degree);
        &self.data[encode(&idx, self.dim)]
    }
}

impl Add for &Tensor {
    type Output = Tensor;

    fn add(self, rhs: &Tensor) -> Tensor {
        self.lincomb(1.0, rhs, 1.0).expect("tensor shapes differ")
    }
}

impl Sub for &Tensor {
    type Output = Tensor;

    fn sub(self, rhs: &Tensor) -> Tensor {
        self.lincomb(1.0, rhs, -1.0).expect("tensor shapes differ")
    }
}

impl Neg for &Tensor {
    type Output = Tensor;

    fn neg(self) -> Tensor {
        self.scale(-1.0)
    }
}

impl Mul<&Tensor> for f64 {
    type Output = Tensor;

    fn mul(self, rhs: &Tensor) -> Tensor {
        rhs.scale(self)
    }
}

/// A metric together with its inverse `g^{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPair {
    g: Matrix,
    g_inv: Matrix,
}

impl MetricPair {
    /// Requires `g` to be exactly symmetric and invertible; definiteness is not checked here.
    pub fn new(g: Matrix) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.ncols(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if g[(i, j)] != g[(j, i)] {
                    return Err(Error::NotSymmetric {
                        i,
                        j,
                        a: g[(i, j)],
                        b: g[(j, i)],
                    });
                }
            }
        }
        let g_inv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        // symmetrize the inverse so contractions against symmetric slots cancel exactly
        let g_inv = (&g_inv + g_inv.transpose()) * 0.5;
        let scale = 1.0f64.max(g.amax() * g_inv.amax() * n as f64);
        let residual = (&g * &g_inv - Matrix::identity(n, n)).amax();
        if !residual.is_finite() || residual > 1e-12 * scale {
            return Err(Error::SingularMetric);
        }
        Ok(MetricPair { g, g_inv })
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g.clone().cholesky().is_some()
    }

    /// The metric as a degree-2 tensor.
    pub fn tensor(&self) -> Tensor {
        Tensor::from_matrix(&self.g)
    }
}
