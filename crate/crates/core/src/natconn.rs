//! The tensor `Φ`, the four torsion projectors, natural-connection tests and
//! the canonical connection.
//!
//! All deformation and torsion tensors are lowered:
//! `Q(x,y,z) = g(Q(x,y), z)` and `T(x,y,z) = g(T(x,y), z)`.

use crate::apclass::compute_f;
use crate::error::{Error, Result};
use crate::frame::{covariant_derivative, Connection, FrameManifold};
use crate::tensor::{Matrix, MetricPair, Tensor};

/// Antisymmetry defect allowed for torsion-like input, relative to `max(1, max|T|)`.
pub const TORSION_LIKE_TOL: f64 = 1e-10;

/// `Φ(x,y,z) = g(∇̃_x y − ∇_x y, z)` from the two Levi-Civita connections.
pub fn phi_direct(manifold: &FrameManifold) -> Tensor {
    manifold
        .associated_levi_civita()
        .difference(&manifold.levi_civita(), manifold.metric())
        .expect("same frame")
}

/// `Φ(x,y,z) = ½{−F(Pz,x,y) + F(x,y,Pz) + F(y,Pz,x)}`.
pub fn phi_from_f(f: &Tensor, p: &Matrix) -> Tensor {
    let f0 = f.compose_p(p, 0).expect("degree 3");
    let f1 = f.compose_p(p, 1).expect("degree 3");
    let f2 = f.compose_p(p, 2).expect("degree 3");
    Tensor::from_fn(f.dim(), |[x, y, z]| {
        0.5 * (-f0[[z, x, y]] + f2[[x, y, z]] + f1[[y, z, x]])
    })
}

/// `F(x,y,z) = Φ(x,y,Pz) + Φ(x,z,Py)`.
pub fn f_from_phi(phi: &Tensor, p: &Matrix) -> Tensor {
    let phi2 = phi.compose_p(p, 2).expect("degree 3");
    Tensor::from_fn(phi.dim(), |[x, y, z]| phi2[[x, y, z]] + phi2[[x, z, y]])
}

fn antisymmetry_defect(t: &Tensor) -> f64 {
    t.distance(&t.permute(&[1, 0, 2]).unwrap().scale(-1.0))
        .unwrap()
}

fn expect_torsion_like(t: &Tensor) -> Result<()> {
    t.expect_degree(3)?;
    let defect = antisymmetry_defect(t);
    if defect > TORSION_LIKE_TOL * t.max_abs().max(1.0) {
        return Err(Error::NotTorsionLike { defect });
    }
    Ok(())
}

/// `T` restricted to its four invariant components.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionDecomposition {
    pub p1: Tensor,
    pub p2: Tensor,
    pub p3: Tensor,
    pub p4: Tensor,
    /// `max|T − Σ p_i|`
    pub residual: f64,
}

impl TorsionDecomposition {
    pub fn components(&self) -> [&Tensor; 4] {
        [&self.p1, &self.p2, &self.p3, &self.p4]
    }

    /// Largest `|⟨p_i, p_j⟩|` over `i ≠ j` in the metric inner product.
    pub fn max_cross_inner(&self, g_inv: &Matrix) -> f64 {
        let comps = self.components();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max(comps[i].inner(comps[j], g_inv).unwrap().abs());
            }
        }
        worst
    }

    /// Largest antisymmetry defect (first two slots) over the four components.
    pub fn max_antisymmetry_defect(&self) -> f64 {
        self.components()
            .iter()
            .map(|p| antisymmetry_defect(p))
            .fold(0.0, f64::max)
    }
}

/// Projects a torsion-like tensor onto the four invariant subspaces.
pub fn project_torsion(t: &Tensor, p: &Matrix) -> Result<TorsionDecomposition> {
    expect_torsion_like(t)?;
    if p.nrows() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: p.nrows(),
        });
    }
    let t01 = t.compose_p_slots(p, &[0, 1])?;
    let t02 = t.compose_p_slots(p, &[0, 2])?;
    let t12 = t.compose_p_slots(p, &[1, 2])?;
    let n = t.dim();

    // The bracketed sum shared by p1 and p2, without the 2T and −2T(Px,Py,z) terms.
    let mixed = Tensor::from_fn(n, |[x, y, z]| {
        -t[[y, z, x]] - t[[z, x, y]] - t02[[z, x, y]]
            + t02[[y, z, x]]
            + t12[[z, x, y]]
            + t01[[y, z, x]]
            + t01[[z, x, y]]
            - t12[[y, z, x]]
    });
    let p1 = Tensor::from_fn(n, |[x, y, z]| {
        (2.0 * t[[x, y, z]] - 2.0 * t01[[x, y, z]] + mixed[[x, y, z]]) / 8.0
    });
    let p2 = Tensor::from_fn(n, |[x, y, z]| {
        (2.0 * t[[x, y, z]] - 2.0 * t01[[x, y, z]] - mixed[[x, y, z]]) / 8.0
    });
    let p3 = Tensor::from_fn(n, |[x, y, z]| {
        (t[[x, y, z]] + t01[[x, y, z]] - t02[[x, y, z]] - t12[[x, y, z]]) / 4.0
    });
    let p4 = Tensor::from_fn(n, |[x, y, z]| {
        (t[[x, y, z]] + t01[[x, y, z]] + t02[[x, y, z]] + t12[[x, y, z]]) / 4.0
    });
    let sum = &(&p1 + &p2) + &(&p3 + &p4);
    let residual = t.distance(&sum)?;
    Ok(TorsionDecomposition {
        p1,
        p2,
        p3,
        p4,
        residual,
    })
}

/// Defects of `∇'g = 0`, `∇'P = 0` and of the equivalent algebraic conditions on `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalDefects {
    pub nabla_g: f64,
    pub nabla_p: f64,
    /// `F(x,y,z) − Q(x,y,Pz) + Q(x,Py,z)`
    pub f_relation: f64,
    /// `Q(x,y,z) + Q(x,z,y)`
    pub skew: f64,
}

impl NaturalDefects {
    pub fn is_natural(&self, tol: f64) -> bool {
        self.nabla_g <= tol && self.nabla_p <= tol
    }

    /// Both characterizations give the same verdict.
    pub fn consistent(&self, tol: f64) -> bool {
        self.is_natural(tol) == (self.f_relation <= tol && self.skew <= tol)
    }
}

pub fn is_natural(conn: &Connection, manifold: &FrameManifold) -> Result<NaturalDefects> {
    let metric = manifold.metric();
    let p = manifold.p();
    let nabla_g = covariant_derivative(conn, &metric.tensor())?.max_abs();
    let nabla_p = covariant_derivative(conn, &manifold.p_lowered())?.max_abs();
    let q = conn.difference(&manifold.levi_civita(), metric)?;
    let f = compute_f(manifold);
    let q_z = q.compose_p(p, 2)?;
    let q_y = q.compose_p(p, 1)?;
    let f_relation = Tensor::from_fn(q.dim(), |[x, y, z]| {
        f[[x, y, z]] - q_z[[x, y, z]] + q_y[[x, y, z]]
    })
    .max_abs();
    let skew = q.distance(&q.permute(&[0, 2, 1])?.scale(-1.0))?;
    Ok(NaturalDefects {
        nabla_g,
        nabla_p,
        f_relation,
        skew,
    })
}

/// Defects of the canonical torsion condition in its two equivalent forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalDefects {
    /// `T(x,y,z) + T(y,z,x) + T(Px,y,Pz) + T(y,Pz,Px)`
    pub quarter: f64,
    pub p2: f64,
    pub p4: f64,
}

impl CanonicalDefects {
    pub fn is_canonical(&self, tol: f64) -> bool {
        self.quarter <= tol
    }

    pub fn consistent(&self, tol: f64) -> bool {
        self.is_canonical(tol) == (self.p2 <= tol && self.p4 <= tol)
    }
}

pub fn is_canonical(t: &Tensor, p: &Matrix) -> Result<CanonicalDefects> {
    let parts = project_torsion(t, p)?;
    let t02 = t.compose_p_slots(p, &[0, 2])?;
    let t12 = t.compose_p_slots(p, &[1, 2])?;
    let quarter = Tensor::from_fn(t.dim(), |[x, y, z]| {
        t[[x, y, z]] + t[[y, z, x]] + t02[[x, y, z]] + t12[[y, z, x]]
    })
    .max_abs();
    Ok(CanonicalDefects {
        quarter,
        p2: parts.p2.max_abs(),
        p4: parts.p4.max_abs(),
    })
}

/// Levi-Civita and canonical connection with deformation and torsion tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionPair {
    pub nabla: Connection,
    pub nabla_prime: Connection,
    pub q: Tensor,
    pub t: Tensor,
    /// `max|Q_Φ − Q_∇P|` between the general construction and the vector
    /// formula built from `∇P`; the latter is only valid on `W3`.
    pub w3_route_gap: f64,
}

/// `Q(x,y,z) = ¼{Φ(x,y,z) − 2Φ(z,x,y) − Φ(x,Py,Pz)}`.
pub fn q_from_phi(phi: &Tensor, p: &Matrix) -> Tensor {
    let phi12 = phi.compose_p_slots(p, &[1, 2]).expect("degree 3");
    Tensor::from_fn(phi.dim(), |[x, y, z]| {
        0.25 * (phi[[x, y, z]] - 2.0 * phi[[z, x, y]] - phi12[[x, y, z]])
    })
}

/// `Q(x,y) = ¼{−(∇_y P)Px + (∇_{Py} P)x − 2(∇_x P)Py}`, evaluated on vectors
/// and lowered afterwards.
pub fn q_from_nabla_p_vectors(manifold: &FrameManifold) -> Tensor {
    let n = manifold.dim();
    let p = manifold.p();
    let g = manifold.metric().g();
    // dp[[i, j, m]]: component m of (∇_{e_i} P) e_j
    let dp = compute_f(manifold)
        .raise_slot(manifold.g_inv(), 2)
        .expect("degree 3");
    let q_up = Tensor::from_fn(n, |[x, y, m]| {
        let mut v = 0.0;
        for a in 0..n {
            v += -p[(a, x)] * dp[[y, a, m]] + p[(a, y)] * dp[[a, x, m]]
                - 2.0 * p[(a, y)] * dp[[x, a, m]];
        }
        0.25 * v
    });
    Tensor::from_fn(n, |[x, y, z]| {
        (0..n).map(|m| q_up[[x, y, m]] * g[(m, z)]).sum()
    })
}

/// Builds the canonical connection from `Φ`, valid on every manifold.
pub fn canonical_connection(manifold: &FrameManifold) -> Result<ConnectionPair> {
    let metric = manifold.metric();
    let nabla = manifold.levi_civita();
    let phi = phi_direct(manifold);
    let q = q_from_phi(&phi, manifold.p());
    let nabla_prime = nabla.deformed(&q, metric)?;
    let t = q.lincomb(1.0, &q.permute(&[1, 0, 2])?, -1.0)?;
    let w3_route_gap = q.distance(&q_from_nabla_p_vectors(manifold))?;
    Ok(ConnectionPair {
        nabla,
        nabla_prime,
        q,
        t,
        w3_route_gap,
    })
}

/// `T(x,y,z) = ¼{Φ(y,z,x) − Φ(z,x,y) − Φ(y,Pz,Px) + Φ(Pz,x,Py)}`.
pub fn torsion_from_phi(phi: &Tensor, p: &Matrix) -> Tensor {
    let phi12 = phi.compose_p_slots(p, &[1, 2]).expect("degree 3");
    let phi02 = phi.compose_p_slots(p, &[0, 2]).expect("degree 3");
    Tensor::from_fn(phi.dim(), |[x, y, z]| {
        0.25 * (phi[[y, z, x]] - phi[[z, x, y]] - phi12[[y, z, x]] + phi02[[z, x, y]])
    })
}

fn expect_w3(f: &Tensor, tol: f64) -> Result<()> {
    let cyclic = f.cyclic_sum3()?.max_abs();
    if cyclic > tol {
        return Err(Error::NotW3 { cyclic, tol });
    }
    Ok(())
}

/// `T(x,y,z) = −½{F(x,Py,z) + F(Px,y,z)}`; `tol` bounds the cyclic sum of `F`.
pub fn torsion_from_f(f: &Tensor, p: &Matrix, tol: f64) -> Result<Tensor> {
    expect_w3(f, tol)?;
    let f1 = f.compose_p(p, 1)?;
    let f0 = f.compose_p(p, 0)?;
    Ok(Tensor::from_fn(f.dim(), |[x, y, z]| {
        -0.5 * (f1[[x, y, z]] + f0[[x, y, z]])
    }))
}

/// `F(x,y,z) = T(x,z,Py) − T(x,Py,z)`.
pub fn f_from_torsion(t: &Tensor, p: &Matrix) -> Tensor {
    let t2 = t.compose_p(p, 2).expect("degree 3");
    let t1 = t.compose_p(p, 1).expect("degree 3");
    Tensor::from_fn(t.dim(), |[x, y, z]| t2[[x, z, y]] - t1[[x, y, z]])
}

/// `Q(x,y,z) = −¼{F(y,Px,z) − F(Py,x,z) + 2F(x,Py,z)}`.
pub fn q_from_f(f: &Tensor, p: &Matrix, tol: f64) -> Result<Tensor> {
    expect_w3(f, tol)?;
    let f1 = f.compose_p(p, 1)?;
    let f0 = f.compose_p(p, 0)?;
    Ok(Tensor::from_fn(f.dim(), |[x, y, z]| {
        -0.25 * (f1[[y, x, z]] - f0[[y, x, z]] + 2.0 * f1[[x, y, z]])
    }))
}

/// Residual of `Q(x,y,z) = −Q(y,x,z) − F(Pz,x,y)`.
pub fn q_swap_defect(q: &Tensor, f: &Tensor, p: &Matrix) -> f64 {
    let f0 = f.compose_p(p, 0).expect("degree 3");
    Tensor::from_fn(q.dim(), |[x, y, z]| {
        q[[x, y, z]] + q[[y, x, z]] + f0[[z, x, y]]
    })
    .max_abs()
}

/// Deformation tensor of a metric connection from its torsion:
/// `Q(x,y,z) = ½{T(x,y,z) − T(y,z,x) + T(z,x,y)}`.
pub fn hayden_q_from_t(t: &Tensor) -> Result<Tensor> {
    expect_torsion_like(t)?;
    Ok(Tensor::from_fn(t.dim(), |[x, y, z]| {
        0.5 * (t[[x, y, z]] - t[[y, z, x]] + t[[z, x, y]])
    }))
}

/// The `p1` component every natural connection must have, written with `Φ`:
/// `¼{−Φ(x,y,z) + Φ(y,z,x) − Φ(x,Py,Pz) − Φ(y,Pz,Px) + 2Φ(z,Px,Py)}`.
pub fn natural_p1_from_phi(phi: &Tensor, p: &Matrix) -> Tensor {
    let phi12 = phi.compose_p_slots(p, &[1, 2]).expect("degree 3");
    Tensor::from_fn(phi.dim(), |[x, y, z]| {
        0.25 * (-phi[[x, y, z]] + phi[[y, z, x]] - phi12[[x, y, z]] - phi12[[y, z, x]]
            + 2.0 * phi12[[z, x, y]])
    })
}

/// The `p3` component every natural connection must have: `−½{Φ(z,Px,Py) + Φ(z,x,y)}`.
pub fn natural_p3_from_phi(phi: &Tensor, p: &Matrix) -> Tensor {
    let phi12 = phi.compose_p_slots(p, &[1, 2]).expect("degree 3");
    Tensor::from_fn(phi.dim(), |[x, y, z]| {
        -0.5 * (phi12[[z, x, y]] + phi[[z, x, y]])
    })
}

/// Lowered torsion of an arbitrary connection on the manifold.
pub fn torsion_of(conn: &Connection, manifold: &FrameManifold) -> Tensor {
    conn.torsion(manifold.brackets(), manifold.metric())
}

/// Adds a further deformation to a connection; used to explore other natural connections.
pub fn deform(conn: &Connection, q: &Tensor, metric: &MetricPair) -> Result<Connection> {
    conn.deformed(q, metric)
}
