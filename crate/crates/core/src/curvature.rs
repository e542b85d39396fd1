//! Curvature of `∇` and of the canonical connection `∇'`, Ricci and scalar
//! curvatures, curvature-like / P-tensor tests, the Bianchi criterion for `R'`
//! and the parallel-torsion analysis.

use crate::apclass::{classify, compute_f, ClassificationReport};
use crate::error::{Error, Result};
use crate::frame::{covariant_derivative, curvature, FrameManifold};
use crate::natconn::{canonical_connection, ConnectionPair};
use crate::tensor::{Matrix, Tensor};

/// Threshold on `max|∇'T|` (relative to `max(1, max|T|)`) below which the torsion counts as parallel.
pub const PARALLEL_TOL: f64 = 1e-10;

/// `ρ(y,z) = g^{ij} R(e_i,y,z,e_j)`.
pub fn ricci(r: &Tensor, g_inv: &Matrix) -> Tensor {
    r.contract(g_inv, 0, 3).expect("degree 4")
}

pub fn scalar(rho: &Tensor, g_inv: &Matrix) -> f64 {
    rho.contract(g_inv, 0, 1).expect("degree 2").value()
}

/// `ρ*(y,z) = g^{ij} R(e_i,y,z,Pe_j)`.
pub fn ricci_star(r: &Tensor, p: &Matrix, g_inv: &Matrix) -> Tensor {
    r.compose_p(p, 3)
        .and_then(|t| t.contract(g_inv, 0, 3))
        .expect("degree 4")
}

/// `τ** = g^{ij} g^{ks} R(e_i,e_k,Pe_s,Pe_j)`.
pub fn tau_star_star(r: &Tensor, p: &Matrix, g_inv: &Matrix) -> f64 {
    let rp = r.compose_p_slots(p, &[2, 3]).expect("degree 4");
    let partial = rp.contract(g_inv, 0, 3).expect("degree 4");
    partial.contract(g_inv, 0, 1).expect("degree 2").value()
}

/// `X(a,b,c,d) = g(A(a,b), B(c,d))` for two lowered vector-valued 2-forms.
pub fn vector_pairing(a: &Tensor, b: &Tensor, g_inv: &Matrix) -> Tensor {
    let n = a.dim();
    let a_up = a.raise_slot(g_inv, 2).expect("degree 3");
    Tensor::from_fn(n, |[i, j, k, l]| {
        (0..n).map(|m| a_up[[i, j, m]] * b[[k, l, m]]).sum()
    })
}

/// `T(T(x,y),z,w)`-type substitution: `Σ_m A^m(x,y) B(e_m,z,w)`.
pub fn substitute_first(a: &Tensor, b: &Tensor, g_inv: &Matrix) -> Tensor {
    let n = a.dim();
    let a_up = a.raise_slot(g_inv, 2).expect("degree 3");
    Tensor::from_fn(n, |[x, y, z, w]| {
        (0..n).map(|m| a_up[[x, y, m]] * b[[m, z, w]]).sum()
    })
}

/// `Σ g^{ij} g^{ks} X(pattern)` for a degree-4 `X`, with `slots[s]` naming which
/// of `(i, j, k, s)` goes into argument `s`.
fn double_trace(x: &Tensor, g_inv: &Matrix, slots: [usize; 4]) -> f64 {
    let n = x.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let gij = g_inv[(i, j)];
            if gij == 0.0 {
                continue;
            }
            for k in 0..n {
                for s in 0..n {
                    let gks = g_inv[(k, s)];
                    if gks == 0.0 {
                        continue;
                    }
                    let v = [i, j, k, s];
                    acc += gij * gks * x[[v[slots[0]], v[slots[1]], v[slots[2]], v[slots[3]]]];
                }
            }
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSummary {
    pub r: Tensor,
    pub r_prime: Tensor,
    pub rho: Tensor,
    pub rho_prime: Tensor,
    pub tau: f64,
    pub tau_prime: f64,
    pub tau_star: f64,
    pub tau_star_star: f64,
    pub norm_nabla_p_sq: f64,
}

pub fn curvature_summary(manifold: &FrameManifold) -> Result<CurvatureSummary> {
    let pair = canonical_connection(manifold)?;
    curvature_summary_with(manifold, &pair)
}

pub fn curvature_summary_with(
    manifold: &FrameManifold,
    pair: &ConnectionPair,
) -> Result<CurvatureSummary> {
    let g_inv = manifold.g_inv();
    let r = curvature(&pair.nabla, manifold.brackets(), manifold.metric())?;
    let r_prime = curvature(&pair.nabla_prime, manifold.brackets(), manifold.metric())?;
    let rho = ricci(&r, g_inv);
    let rho_prime = ricci(&r_prime, g_inv);
    let tau = scalar(&rho, g_inv);
    let tau_prime = scalar(&rho_prime, g_inv);
    let tau_star = scalar(&ricci_star(&r, manifold.p(), g_inv), g_inv);
    let tau_star_star = tau_star_star(&r, manifold.p(), g_inv);
    let norm_nabla_p_sq = compute_f(manifold).norm_sq(g_inv)?;
    Ok(CurvatureSummary {
        r,
        r_prime,
        rho,
        rho_prime,
        tau,
        tau_prime,
        tau_star,
        tau_star_star,
        norm_nabla_p_sq,
    })
}

/// `R' = R + (∇_xQ)(y,z,w) − (∇_yQ)(x,z,w) − g(Q(x,w),Q(y,z)) + g(Q(y,w),Q(x,z))`.
pub fn rprime_deformation(manifold: &FrameManifold, pair: &ConnectionPair) -> Result<Tensor> {
    let r = curvature(&pair.nabla, manifold.brackets(), manifold.metric())?;
    let dq = covariant_derivative(&pair.nabla, &pair.q)?;
    let qq = vector_pairing(&pair.q, &pair.q, manifold.g_inv());
    Ok(Tensor::from_fn(manifold.dim(), |[x, y, z, w]| {
        r[[x, y, z, w]] + dq[[x, y, z, w]] - dq[[y, x, z, w]] - qq[[x, w, y, z]] + qq[[y, w, x, z]]
    }))
}

/// Contracted deformation data on `W3`: `ρ'` and `τ'` predicted from `Q`, and
/// the trace identities `g^{ij}Q(e_i,e_j,z) = 0`, `g^{ij}(∇_xQ)(e_i,e_j,z) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedDeformation {
    /// `ρ + g^{ij}(∇_{e_i}Q)(y,z,e_j) + g^{ij}g(Q(y,e_j),Q(e_i,z))`
    pub rho_prime: Tensor,
    /// `g^{ij}g^{ks}g(Q(e_k,e_j),Q(e_i,e_s))`
    pub tau_shift: f64,
    pub trace_q: Tensor,
    pub trace_nabla_q: Tensor,
}

pub fn contracted_deformation(
    manifold: &FrameManifold,
    pair: &ConnectionPair,
    rho: &Tensor,
) -> Result<ContractedDeformation> {
    let g_inv = manifold.g_inv();
    let n = manifold.dim();
    let dq = covariant_derivative(&pair.nabla, &pair.q)?;
    let qq = vector_pairing(&pair.q, &pair.q, g_inv);
    let rho_prime = Tensor::from_fn(n, |[y, z]| {
        let mut acc = rho[[y, z]];
        for i in 0..n {
            for j in 0..n {
                acc += g_inv[(i, j)] * (dq[[i, y, z, j]] + qq[[y, j, i, z]]);
            }
        }
        acc
    });
    // (i, j, k, s) -> Q(e_k, e_j) against Q(e_i, e_s)
    let tau_shift = double_trace(&qq, g_inv, [2, 1, 0, 3]);
    Ok(ContractedDeformation {
        rho_prime,
        tau_shift,
        trace_q: pair.q.contract(g_inv, 0, 1)?,
        trace_nabla_q: dq.contract(g_inv, 1, 2)?,
    })
}

/// Defects of `L(x,y,z,w) = −L(y,x,z,w) = −L(x,y,w,z)` and of the first Bianchi identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureLikeDefects {
    pub antisym_xy: f64,
    pub antisym_zw: f64,
    pub bianchi: f64,
}

impl CurvatureLikeDefects {
    pub fn symmetries(&self) -> f64 {
        self.antisym_xy.max(self.antisym_zw)
    }

    pub fn max(&self) -> f64 {
        self.symmetries().max(self.bianchi)
    }
}

pub fn is_curvature_like(l: &Tensor) -> Result<CurvatureLikeDefects> {
    l.expect_degree(4)?;
    let antisym_xy = (l + &l.permute(&[1, 0, 2, 3])?).max_abs();
    let antisym_zw = (l + &l.permute(&[0, 1, 3, 2])?).max_abs();
    let bianchi = l.cyclic_sum_first3()?.max_abs();
    Ok(CurvatureLikeDefects {
        antisym_xy,
        antisym_zw,
        bianchi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTensorDefects {
    pub curvature_like: CurvatureLikeDefects,
    /// `L(x,y,Pz,Pw) − L(x,y,z,w)`
    pub p_invariance: f64,
}

impl PTensorDefects {
    pub fn max(&self) -> f64 {
        self.curvature_like.max().max(self.p_invariance)
    }

    pub fn is_p_tensor(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn is_p_tensor(l: &Tensor, p: &Matrix) -> Result<PTensorDefects> {
    let curvature_like = is_curvature_like(l)?;
    let p_invariance = l.distance(&l.compose_p_slots(p, &[2, 3])?)?;
    Ok(PTensorDefects {
        curvature_like,
        p_invariance,
    })
}

/// `R(x,y,z,w) = R(z,w,x,y)` defect.
pub fn pair_symmetry_defect(r: &Tensor) -> Result<f64> {
    r.distance(&r.permute(&[2, 3, 0, 1])?)
}

fn expect_w3(report: &ClassificationReport) -> Result<()> {
    if !report.class_label.is_w3() {
        return Err(Error::NotW3 {
            cyclic: report.norm_cyclic_f,
            tol: report.tolerance_used,
        });
    }
    Ok(())
}

/// `(∇'_xT)(y,z,w) + T(T(x,y),z,w)`, before the cyclic sum.
pub fn bianchi_torsion_expression(
    manifold: &FrameManifold,
    pair: &ConnectionPair,
) -> Result<Tensor> {
    let dt = covariant_derivative(&pair.nabla_prime, &pair.t)?;
    let tt = substitute_first(&pair.t, &pair.t, manifold.g_inv());
    Ok(&dt + &tt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BianchiRecord {
    /// `max|𝔖{(∇'_xT)(y,z,w) + T(T(x,y),z,w)}|`
    pub torsion_expression: f64,
    /// `max|𝔖R'(x,y,z,w)|`
    pub r_prime_cyclic: f64,
    /// `max|` difference of the two cyclic sums `|`
    pub gap: f64,
}

pub fn bianchi_record(manifold: &FrameManifold, pair: &ConnectionPair) -> Result<BianchiRecord> {
    let lhs = bianchi_torsion_expression(manifold, pair)?.cyclic_sum_first3()?;
    let r_prime = curvature(&pair.nabla_prime, manifold.brackets(), manifold.metric())?;
    let rhs = r_prime.cyclic_sum_first3()?;
    Ok(BianchiRecord {
        torsion_expression: lhs.max_abs(),
        r_prime_cyclic: rhs.max_abs(),
        gap: lhs.distance(&rhs)?,
    })
}

/// Norm of the first-Bianchi obstruction of `R'` on a `W3` manifold.
pub fn bianchi_defect_prime(manifold: &FrameManifold, tol: f64) -> Result<f64> {
    expect_w3(&classify(manifold, tol))?;
    let pair = canonical_connection(manifold)?;
    Ok(bianchi_record(manifold, &pair)?.torsion_expression)
}

/// `max |g((∇_xP)Pz + (∇_{Px}P)z, (∇_{Py}P)w − (∇_yP)Pw)|` over basis quadruples.
pub fn bianchi_pairing(manifold: &FrameManifold) -> f64 {
    let p = manifold.p();
    let f = compute_f(manifold);
    let f0 = f.compose_p(p, 0).expect("degree 3");
    let f1 = f.compose_p(p, 1).expect("degree 3");
    let n = f.dim();
    let u = Tensor::from_fn(n, |[x, z, a]| f1[[x, z, a]] + f0[[x, z, a]]);
    let v = Tensor::from_fn(n, |[y, w, b]| f0[[y, w, b]] - f1[[y, w, b]]);
    vector_pairing(&u, &v, manifold.g_inv()).max_abs()
}

pub fn bianchi_pairing_checked(manifold: &FrameManifold, tol: f64) -> Result<f64> {
    expect_w3(&classify(manifold, tol))?;
    Ok(bianchi_pairing(manifold))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelTorsionAnalysis {
    pub norm_nabla_prime_t: f64,
    pub norm_nabla_prime_q: f64,
    pub norm_nabla_prime_f: f64,
    pub norm_t: f64,
    /// `max|∇'T| ≤ PARALLEL_TOL · max(1, max|T|)`
    pub parallel: bool,
    /// The three norms are all below or all above `PARALLEL_TOL`.
    pub simultaneous: bool,
    /// `R' = R + (∇'_xQ)(y,z,w) − (∇'_yQ)(x,z,w) + Q(T(x,y),z,w)
    ///       + g(Q(y,z),Q(x,w)) − g(Q(x,z),Q(y,w))`, valid without parallelism.
    pub generalized_curvature_defect: f64,
    /// Same identity with the `∇'Q` terms dropped (needs parallel torsion).
    pub parallel_curvature_defect: f64,
    /// `Q(T(x,y),z,w) = g(Q(z,w),T(x,y)) − g((∇_{Pw}P)z,T(x,y))`.
    pub substitution_defect: f64,
    /// Curvature formula with the substitution applied (needs parallel torsion).
    pub r_prime_via_substitution_defect: f64,
    /// `ρ' = ρ − g^{ij}g(Q(e_j,z),Q(e_i,y)) + g^{ij}g((∇_{Pz}P)e_j,T(e_i,y))`.
    pub ricci_parallel_defect: f64,
    /// `g^{ij}g^{ks}g(Q(e_j,e_s),Q(e_i,e_k))`
    pub contraction_qq: f64,
    /// `g^{ij}g^{ks}g((∇_{Pe_s}P)e_j,T(e_i,e_k))`
    pub contraction_ft: f64,
    pub norm_nabla_p_sq: f64,
    pub tau: f64,
    pub tau_prime: f64,
}

impl ParallelTorsionAnalysis {
    /// `τ' − τ − ¼‖∇P‖²`
    pub fn tau_relation_quarter(&self) -> f64 {
        self.tau_prime - self.tau - 0.25 * self.norm_nabla_p_sq
    }

    /// `τ' − τ + A − B` with the two contractions above.
    pub fn tau_from_contractions(&self) -> f64 {
        self.tau_prime - self.tau + self.contraction_qq - self.contraction_ft
    }
}

pub fn parallel_torsion_analysis(
    manifold: &FrameManifold,
    tol: f64,
) -> Result<ParallelTorsionAnalysis> {
    expect_w3(&classify(manifold, tol))?;
    let pair = canonical_connection(manifold)?;
    parallel_torsion_analysis_with(manifold, &pair)
}

pub fn parallel_torsion_analysis_with(
    manifold: &FrameManifold,
    pair: &ConnectionPair,
) -> Result<ParallelTorsionAnalysis> {
    let g_inv = manifold.g_inv();
    let p = manifold.p();
    let n = manifold.dim();
    let f = compute_f(manifold);
    let nabla_prime = &pair.nabla_prime;
    let (q, t) = (&pair.q, &pair.t);

    let norm_nabla_prime_t = covariant_derivative(nabla_prime, t)?.max_abs();
    let dq = covariant_derivative(nabla_prime, q)?;
    let norm_nabla_prime_q = dq.max_abs();
    let norm_nabla_prime_f = covariant_derivative(nabla_prime, &f)?.max_abs();
    let norm_t = t.max_abs();
    let parallel = norm_nabla_prime_t <= PARALLEL_TOL * norm_t.max(1.0);
    let flags =
        [norm_nabla_prime_t, norm_nabla_prime_q, norm_nabla_prime_f].map(|v| v <= PARALLEL_TOL);
    let simultaneous = flags.iter().all(|&b| b == flags[0]);

    let summary = curvature_summary_with(manifold, pair)?;
    let (r, r_prime) = (&summary.r, &summary.r_prime);
    let qq = vector_pairing(q, q, g_inv);
    let qt = substitute_first(t, q, g_inv);
    let q_dot_t = vector_pairing(q, t, g_inv);
    let f_pw = f.compose_p(p, 0)?;
    let f_dot_t = vector_pairing(&f_pw, t, g_inv);

    let mut generalized: f64 = 0.0;
    let mut parallel_form: f64 = 0.0;
    let mut substitution: f64 = 0.0;
    let mut via_substitution: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let quad = qq[[y, z, x, w]] - qq[[x, z, y, w]];
                    let base = r[[x, y, z, w]] + qt[[x, y, z, w]] + quad;
                    let rp = r_prime[[x, y, z, w]];
                    let deriv = dq[[x, y, z, w]] - dq[[y, x, z, w]];
                    generalized = generalized.max((rp - base - deriv).abs());
                    parallel_form = parallel_form.max((rp - base).abs());
                    let substituted = q_dot_t[[z, w, x, y]] - f_dot_t[[w, z, x, y]];
                    substitution = substitution.max((qt[[x, y, z, w]] - substituted).abs());
                    let via = r[[x, y, z, w]] + quad + substituted;
                    via_substitution = via_substitution.max((rp - via).abs());
                }
            }
        }
    }

    let rho_parallel = Tensor::from_fn(n, |[y, z]| {
        let mut acc = summary.rho[[y, z]];
        for i in 0..n {
            for j in 0..n {
                acc += g_inv[(i, j)] * (-qq[[j, z, i, y]] + f_dot_t[[z, j, i, y]]);
            }
        }
        acc
    });
    let ricci_parallel_defect = summary.rho_prime.distance(&rho_parallel)?;

    // (i, j, k, s) -> Q(e_j, e_s) against Q(e_i, e_k)
    let contraction_qq = double_trace(&qq, g_inv, [1, 3, 0, 2]);
    // (i, j, k, s) -> F(Pe_s, e_j, ·) against T(e_i, e_k)
    let contraction_ft = double_trace(&f_dot_t, g_inv, [3, 1, 0, 2]);

    Ok(ParallelTorsionAnalysis {
        norm_nabla_prime_t,
        norm_nabla_prime_q,
        norm_nabla_prime_f,
        norm_t,
        parallel,
        simultaneous,
        generalized_curvature_defect: generalized,
        parallel_curvature_defect: parallel_form,
        substitution_defect: substitution,
        r_prime_via_substitution_defect: via_substitution,
        ricci_parallel_defect,
        contraction_qq,
        contraction_ft,
        norm_nabla_p_sq: summary.norm_nabla_p_sq,
        tau: summary.tau,
        tau_prime: summary.tau_prime,
    })
}
