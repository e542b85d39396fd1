//! Invariant-frame model of a Riemannian almost product manifold.
//!
//! The manifold is a Lie group with a left-invariant frame `{e_i}`, brackets
//! `[e_i, e_j] = C^k_ij e_k`, and constant components of `g` and `P` in that
//! frame. Every tensor built from these data has constant components, so
//! covariant derivatives reduce to contractions with the connection
//! coefficients and no numerical differentiation is involved.

use crate::error::{Error, Result};
use crate::tensor::{Matrix, MetricPair, Tensor};

/// Entry-wise tolerance for `P² = id`, `Pᵀ g P = g` and `tr P = 0`.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Brackets `[e_i, e_j] = C^k_ij e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    // offset (k * n + i) * n + j
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Self {
        StructureConstants {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds brackets from `(i, j, k, value)` entries with `i < j`; the
    /// `(j, i)` partners are implied. Repeated entries accumulate.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = StructureConstants::zero(dim);
        for &(i, j, k, v) in entries {
            let bad = [i, j, k].into_iter().find(|&s| s >= dim);
            if let Some(slot) = bad {
                return Err(Error::SlotOutOfRange { slot, degree: dim });
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::BracketNotAntisymmetric {
                        i,
                        j,
                        k,
                        a: v,
                        b: v,
                    });
                }
                continue;
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { offset: k });
            }
            let (a, b, v) = if i < j { (i, j, v) } else { (j, i, -v) };
            c.data[(k * dim + a) * dim + b] += v;
            c.data[(k * dim + b) * dim + a] -= v;
        }
        Ok(c)
    }

    /// Builds brackets from a closure `f(k, i, j) = C^k_ij`, checking exact antisymmetry.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; dim * dim * dim];
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    data[(k * dim + i) * dim + j] = f(k, i, j);
                }
            }
        }
        let c = StructureConstants { dim, data };
        c.check_antisymmetry()?;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `C^k_ij`.
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        StructureConstants {
            dim: self.dim,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    /// Nonzero entries `(i, j, k, C^k_ij)` with `i < j`, in lexicographic order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.get(k, i, j);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let a = self.get(k, i, j);
                    let b = self.get(k, j, i);
                    if a != -b || !a.is_finite() {
                        return Err(Error::BracketNotAntisymmetric { i, j, k, a, b });
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest Jacobi residual `Σ_m (C^m_ij C^l_mk + C^m_jk C^l_mi + C^m_ki C^l_mj)`
    /// together with the `(i, j, k, l)` where it occurs.
    pub fn jacobi_residual(&self) -> (f64, [usize; 4]) {
        let n = self.dim;
        let mut worst = (0.0, [0; 4]);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let r: f64 = (0..n)
                            .map(|m| {
                                self.get(m, i, j) * self.get(l, m, k)
                                    + self.get(m, j, k) * self.get(l, m, i)
                                    + self.get(m, k, i) * self.get(l, m, j)
                            })
                            .sum();
                        if r.abs() > f64::abs(worst.0) {
                            worst = (r, [i, j, k, l]);
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn check_jacobi(&self) -> Result<()> {
        let (residual, [i, j, k, l]) = self.jacobi_residual();
        let scale = 1.0f64.max(self.max_abs().powi(2));
        if residual.abs() > VALIDATION_TOL * scale {
            return Err(Error::JacobiViolated {
                i,
                j,
                k,
                l,
                residual,
            });
        }
        Ok(())
    }
}

/// A validated `(M, P, g)` on an invariant frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameManifold {
    brackets: StructureConstants,
    metric: MetricPair,
    p: Matrix,
    associated: MetricPair,
}

impl FrameManifold {
    /// Validates all structural invariants. `p[(m, j)]` is `P^m_j`, i.e. `P e_j = P^m_j e_m`.
    pub fn new(brackets: StructureConstants, g: Matrix, p: Matrix) -> Result<Self> {
        let n = brackets.dim();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidDimension(n));
        }
        for m in [&g, &p] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
        }
        if let Some(offset) = g.iter().chain(p.iter()).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { offset });
        }
        brackets.check_antisymmetry()?;
        brackets.check_jacobi()?;

        let metric = MetricPair::new(g)?;
        if !metric.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let g = metric.g();

        let p_sq = &p * &p - Matrix::identity(n, n);
        if let Some((i, j, residual)) = worst_entry(&p_sq, 1.0) {
            return Err(Error::PSquareNotIdentity { i, j, residual });
        }
        let compat = p.transpose() * g * &p - g;
        if let Some((i, j, residual)) = worst_entry(&compat, g.amax()) {
            return Err(Error::PNotCompatible { i, j, residual });
        }
        let trace = p.trace();
        if trace.abs() > VALIDATION_TOL * n as f64 {
            return Err(Error::TraceNonZero { trace });
        }

        // g̃(x, y) = g(x, P y); symmetric up to roundoff once P is compatible.
        let gp = g * &p;
        let g_assoc = (&gp + gp.transpose()) * 0.5;
        let associated = MetricPair::new(g_assoc).map_err(|_| Error::AssociatedMetricSingular)?;

        Ok(FrameManifold {
            brackets,
            metric,
            p,
            associated,
        })
    }

    pub fn dim(&self) -> usize {
        self.brackets.dim()
    }

    pub fn brackets(&self) -> &StructureConstants {
        &self.brackets
    }

    pub fn metric(&self) -> &MetricPair {
        &self.metric
    }

    pub fn g_inv(&self) -> &Matrix {
        self.metric.g_inv()
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn associated_metric(&self) -> &MetricPair {
        &self.associated
    }

    /// `P` with its value slot lowered: `(j, k) ↦ g(P e_j, e_k)`.
    pub fn p_lowered(&self) -> Tensor {
        let g = self.metric.g();
        let n = self.dim();
        Tensor::from_fn(n, |[j, k]| (0..n).map(|m| self.p[(m, j)] * g[(m, k)]).sum())
    }

    pub fn levi_civita(&self) -> Connection {
        levi_civita(&self.brackets, &self.metric).expect("validated dimensions")
    }

    /// Levi-Civita connection of the associated metric `g̃`.
    pub fn associated_levi_civita(&self) -> Connection {
        levi_civita(&self.brackets, &self.associated).expect("validated dimensions")
    }

    /// Re-expresses the manifold in the frame `f_a = Σ_i L^i_a e_i` (columns of `l`).
    ///
    /// The geometry is unchanged; only components transform.
    pub fn change_frame(&self, l: &Matrix) -> Result<FrameManifold> {
        let n = self.dim();
        if l.nrows() != n || l.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: l.nrows(),
            });
        }
        let l_inv = l.clone().try_inverse().ok_or(Error::SingularMetric)?;
        // C'^c_ab = (L⁻¹)^c_k C^k_ij L^i_a L^j_b
        let mut partial = vec![0.0; n * n * n];
        for k in 0..n {
            for a in 0..n {
                for j in 0..n {
                    partial[(k * n + a) * n + j] =
                        (0..n).map(|i| self.brackets.get(k, i, j) * l[(i, a)]).sum();
                }
            }
        }
        let mut full = vec![0.0; n * n * n];
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    full[(k * n + a) * n + b] = (0..n)
                        .map(|j| partial[(k * n + a) * n + j] * l[(j, b)])
                        .sum();
                }
            }
        }
        let brackets = StructureConstants::from_fn(n, |c, a, b| {
            if a == b {
                return 0.0;
            }
            let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
            sign * (0..n)
                .map(|k| l_inv[(c, k)] * full[(k * n + lo) * n + hi])
                .sum::<f64>()
        })?;
        let g = l.transpose() * self.metric.g() * l;
        let g = (&g + g.transpose()) * 0.5;
        let p = &l_inv * &self.p * l;
        FrameManifold::new(brackets, g, p)
    }
}

fn worst_entry(m: &Matrix, scale: f64) -> Option<(usize, usize, f64)> {
    let tol = VALIDATION_TOL * scale.max(1.0);
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v.abs() > tol && worst.is_none_or(|w| v.abs() > w.2.abs()) {
                worst = Some((i, j, v));
            }
        }
    }
    worst
}

/// Coefficients `Γ^k_ij` with `∇_{e_i} e_j = Γ^k_ij e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    // offset (i * n + j) * n + k
    gamma: Vec<f64>,
}

impl Connection {
    pub fn zero(dim: usize) -> Self {
        Connection {
            dim,
            gamma: vec![0.0; dim * dim * dim],
        }
    }

    /// Raw injection of coefficients, `f(k, i, j) = Γ^k_ij`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut gamma = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let v = f(k, i, j);
                    if !v.is_finite() {
                        return Err(Error::NonFinite {
                            offset: (i * dim + j) * dim + k,
                        });
                    }
                    gamma[(i * dim + j) * dim + k] = v;
                }
            }
        }
        Ok(Connection { dim, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_ij`.
    #[inline]
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(i * self.dim + j) * self.dim + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(i, j, l) ↦ g(∇_{e_i} e_j, e_l)`.
    pub fn lowered(&self, metric: &MetricPair) -> Tensor {
        let g = metric.g();
        let n = self.dim;
        Tensor::from_fn(n, |[i, j, l]| {
            (0..n).map(|k| self.christoffel(k, i, j) * g[(k, l)]).sum()
        })
    }

    /// `∇'_x y = ∇_x y + Q(x, y)` for a lowered deformation tensor `Q(x, y, z) = g(Q(x, y), z)`.
    pub fn deformed(&self, q: &Tensor, metric: &MetricPair) -> Result<Connection> {
        q.expect_degree(3)?;
        let q_up = q.raise_slot(metric.g_inv(), 2)?;
        Connection::from_fn(self.dim, |k, i, j| {
            self.christoffel(k, i, j) + q_up[[i, j, k]]
        })
    }

    /// Lowered difference tensor `g(∇^self_x y − ∇^other_x y, z)`.
    pub fn difference(&self, other: &Connection, metric: &MetricPair) -> Result<Tensor> {
        self.lowered(metric)
            .lincomb(1.0, &other.lowered(metric), -1.0)
    }

    /// Lowered torsion `T(x, y, z) = g(∇_x y − ∇_y x − [x, y], z)`.
    pub fn torsion(&self, brackets: &StructureConstants, metric: &MetricPair) -> Tensor {
        let g = metric.g();
        let n = self.dim;
        Tensor::from_fn(n, |[i, j, l]| {
            (0..n)
                .map(|k| {
                    (self.christoffel(k, i, j) - self.christoffel(k, j, i) - brackets.get(k, i, j))
                        * g[(k, l)]
                })
                .sum()
        })
    }

    /// Max `|Γ^k_ij − Γ^k_ji − C^k_ij|`, zero for a torsion-free connection.
    pub fn torsion_free_defect(&self, brackets: &StructureConstants) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = self.christoffel(k, i, j)
                        - self.christoffel(k, j, i)
                        - brackets.get(k, i, j);
                    worst = worst.max(d.abs());
                }
            }
        }
        worst
    }
}

/// Koszul formula on an invariant frame:
/// `2 g(∇_{e_i} e_j, e_k) = g([e_i,e_j],e_k) − g([e_j,e_k],e_i) + g([e_k,e_i],e_j)`.
pub fn levi_civita(brackets: &StructureConstants, metric: &MetricPair) -> Result<Connection> {
    let n = brackets.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: metric.dim(),
        });
    }
    let g = metric.g();
    let bracket_lowered = |i: usize, j: usize, k: usize| -> f64 {
        (0..n).map(|m| brackets.get(m, i, j) * g[(m, k)]).sum()
    };
    let koszul = Tensor::from_fn(n, |[i, j, k]| {
        0.5 * (bracket_lowered(i, j, k) - bracket_lowered(j, k, i) + bracket_lowered(k, i, j))
    });
    let raised = koszul.raise_slot(metric.g_inv(), 2)?;
    Connection::from_fn(n, |k, i, j| raised[[i, j, k]])
}

/// `(∇t)(x, y_1, …, y_d)` for a tensor with constant frame components:
/// `(∇_{e_i} t)(e_{j_1}, …) = −Σ_s Σ_m Γ^m_{i j_s} t(…, e_m, …)`.
pub fn covariant_derivative(conn: &Connection, t: &Tensor) -> Result<Tensor> {
    let n = conn.dim();
    if t.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.dim(),
        });
    }
    let d = t.degree();
    let mut src = vec![0usize; d];
    Ok(Tensor::from_fn_dyn(d + 1, n, |idx| {
        let i = idx[0];
        src.copy_from_slice(&idx[1..]);
        let mut acc = 0.0;
        for s in 0..d {
            let js = idx[s + 1];
            for m in 0..n {
                let gamma = conn.christoffel(m, i, js);
                if gamma != 0.0 {
                    src[s] = m;
                    acc -= gamma * t.get(&src);
                }
            }
            src[s] = js;
        }
        acc
    }))
}

/// `G(i, j, k) = g((∇_{e_i} P) e_j, e_k)` for the given metric connection.
pub fn nabla_p(manifold: &FrameManifold, conn: &Connection) -> Tensor {
    covariant_derivative(conn, &manifold.p_lowered()).expect("validated dimensions")
}

/// Lowered curvature `R(x, y, z, w) = g(∇_x ∇_y z − ∇_y ∇_x z − ∇_{[x,y]} z, w)`.
pub fn curvature(
    conn: &Connection,
    brackets: &StructureConstants,
    metric: &MetricPair,
) -> Result<Tensor> {
    let n = conn.dim();
    if brackets.dim() != n || metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: brackets.dim().max(metric.dim()),
        });
    }
    let g = metric.g();
    // R^l_ijk: component l of R(e_i, e_j) e_k
    let r_up = Tensor::from_fn(n, |[i, j, k, l]| {
        (0..n)
            .map(|m| {
                conn.christoffel(m, j, k) * conn.christoffel(l, i, m)
                    - conn.christoffel(m, i, k) * conn.christoffel(l, j, m)
                    - brackets.get(m, i, j) * conn.christoffel(l, m, k)
            })
            .sum()
    });
    Ok(Tensor::from_fn(n, |[i, j, k, w]| {
        (0..n).map(|l| r_up[[i, j, k, l]] * g[(l, w)]).sum()
    }))
}
