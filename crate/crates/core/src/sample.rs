//! Seeded generators: random compatible `(g, P)`, random Lie brackets, random
//! torsion-like tensors, random natural deformations and strict-`W3` manifolds.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::apclass::{classify, compute_f, ClassLabel};
use crate::error::Result;
use crate::frame::{FrameManifold, StructureConstants};
use crate::tensor::{Matrix, Tensor};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn diag(values: &[f64]) -> Matrix {
    Matrix::from_diagonal(&DVector::from_column_slice(values))
}

/// `diag(1,…,1,−1,…,−1)` with `n/2` of each sign.
pub fn standard_p(n: usize) -> Matrix {
    let signs: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect();
    diag(&signs)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed by `diag(R) > 0`).
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> Matrix {
    let a = Matrix::from_fn(n, n, |_, _| normal(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn random_spd(n: usize, rng: &mut SeededRng) -> Matrix {
    let a = Matrix::from_fn(n, n, |_, _| normal(rng));
    &a * a.transpose() / n as f64 + Matrix::identity(n, n) * 0.5
}

fn symmetrized(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// `g = O·blockdiag(A, B)·Oᵀ`, `P = O·diag(I, −I)·Oᵀ` with random `O` and SPD blocks.
pub fn random_compatible_pair(n: usize, rng: &mut SeededRng) -> (Matrix, Matrix) {
    let h = n / 2;
    let o = random_orthogonal(n, rng);
    let mut block = Matrix::zeros(n, n);
    block
        .view_mut((0, 0), (h, h))
        .copy_from(&random_spd(h, rng));
    block
        .view_mut((h, h), (h, h))
        .copy_from(&random_spd(h, rng));
    let g = symmetrized(&(&o * block * o.transpose()));
    let p = &o * standard_p(n) * o.transpose();
    (g, p)
}

/// Two-step nilpotent bracket: `[V, V] ⊂ Z` for a random split of the frame,
/// `Z` central. Jacobi holds automatically.
pub fn random_nilpotent2(n: usize, rng: &mut SeededRng) -> StructureConstants {
    let v = rng.random_range(2..n);
    let mut entries = Vec::new();
    for i in 0..v {
        for j in (i + 1)..v {
            for k in v..n {
                entries.push((i, j, k, normal(rng)));
            }
        }
    }
    StructureConstants::from_entries(n, &entries).expect("indices in range")
}

/// A few fixed Lie algebras of dimension `n` (padded with an abelian factor).
pub fn catalog_algebras(n: usize) -> Vec<(&'static str, StructureConstants)> {
    let mut out = Vec::new();
    let mut push = |name, entries: &[(usize, usize, usize, f64)]| {
        if entries.iter().all(|&(i, j, k, _)| i.max(j).max(k) < n) {
            out.push((name, StructureConstants::from_entries(n, entries).unwrap()));
        }
    };
    push("heisenberg", &[(0, 1, 2, 1.0)]);
    push("affine", &[(0, 1, 1, 1.0)]);
    push("so3", &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]);
    push("sl2", &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)]);
    push(
        "so3_so3",
        &[
            (0, 1, 2, 1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (3, 4, 5, 1.0),
            (4, 5, 3, 1.0),
            (5, 3, 4, 1.0),
        ],
    );
    push("filiform", &[(0, 1, 2, 1.0), (0, 2, 3, 1.0)]);
    out
}

/// A random validated manifold: a nilpotent or catalog bracket with a random compatible `(g, P)`.
pub fn random_manifold(n: usize, rng: &mut SeededRng) -> FrameManifold {
    let brackets = if rng.random_bool(0.5) {
        random_nilpotent2(n, rng)
    } else {
        let catalog = catalog_algebras(n);
        let (_, c) = catalog[rng.random_range(0..catalog.len())].clone();
        c.scaled(0.5 + rng.random::<f64>())
    };
    let (g, p) = random_compatible_pair(n, rng);
    FrameManifold::new(brackets, g, p).expect("generator output is valid")
}

pub fn random_tensor(degree: usize, n: usize, rng: &mut SeededRng) -> Tensor {
    Tensor::from_fn_dyn(degree, n, |_| normal(rng))
}

/// Random tensor antisymmetric in its first two slots.
pub fn random_torsion_like(n: usize, rng: &mut SeededRng) -> Tensor {
    let a = random_tensor(3, n, rng);
    Tensor::from_fn(n, |[x, y, z]| a[[x, y, z]] - a[[y, x, z]])
}

/// Random `Q0` with `Q0(x,y,z) = −Q0(x,z,y)` and `Q0(x,Py,Pz) = Q0(x,y,z)`: adding it
/// to a natural connection gives another natural connection.
pub fn random_natural_deformation(p: &Matrix, rng: &mut SeededRng) -> Tensor {
    let n = p.nrows();
    let r = random_tensor(3, n, rng);
    let a = Tensor::from_fn(n, |[x, y, z]| r[[x, y, z]] - r[[x, z, y]]);
    let ap = a.compose_p_slots(p, &[1, 2]).expect("degree 3");
    (&a + &ap).scale(0.5)
}

/// A strict-`W3` manifold and how it was obtained.
#[derive(Debug, Clone)]
pub struct W3Candidate {
    pub manifold: FrameManifold,
    /// Number of frame vectors in the non-central part `V` (nilpotent family).
    pub v_dim: Option<usize>,
    /// Catalog algebra name (catalog family).
    pub algebra: Option<&'static str>,
    /// Eigenvalues of `P` on the adapted frame, before rotation.
    pub signs: Vec<f64>,
    /// Dimension of the solution space the bracket was drawn from (nilpotent family).
    pub null_dim: Option<usize>,
    /// Attempt index (0-based) that produced the candidate.
    pub attempt: usize,
    pub norm_f: f64,
    pub norm_cyclic_f: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub attempts: usize,
    /// Null-space dimension found at each attempt.
    pub null_dims: Vec<usize>,
}

/// Bracket parameters `(i, j, k)` for `[e_i, e_j] ∋ e_k`, and a basis of solutions over them.
pub type NullSpace = (Vec<(usize, usize, usize)>, Matrix);

/// Null space of `C ↦ 𝔖F` over the two-step nilpotent brackets `[V,V] ⊂ Z`
/// with `g = I` and `P = diag(signs)`. Rows of the returned matrix span it.
pub fn w3_null_space(n: usize, v_dim: usize, signs: &[f64]) -> Result<NullSpace> {
    let params: Vec<(usize, usize, usize)> = (0..v_dim)
        .flat_map(|i| ((i + 1)..v_dim).flat_map(move |j| (v_dim..n).map(move |k| (i, j, k))))
        .collect();
    let g = Matrix::identity(n, n);
    let p = diag(signs);
    let rows = n * n * n;
    let mut a = Matrix::zeros(rows, params.len());
    for (col, &(i, j, k)) in params.iter().enumerate() {
        let c = StructureConstants::from_entries(n, &[(i, j, k, 1.0)])?;
        let m = FrameManifold::new(c, g.clone(), p.clone())?;
        let cyc = compute_f(&m).cyclic_sum3()?;
        for (r, v) in cyc.components().iter().enumerate() {
            a[(r, col)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let null_rows: Vec<usize> = (0..params.len())
        .filter(|&r| svd.singular_values[r] <= 1e-9 * smax.max(1.0))
        .collect();
    let mut basis = Matrix::zeros(null_rows.len(), params.len());
    for (out, &r) in null_rows.iter().enumerate() {
        basis.row_mut(out).copy_from(&v_t.row(r));
    }
    Ok((params, basis))
}

/// Searches the two-step nilpotent family for strict-`W3` manifolds. Each attempt draws
/// a `V`/`Z` split and a sign pattern for `P`, solves the null space in that adapted
/// frame, samples a null vector and finally applies a random orthogonal frame change.
pub fn search_w3_nilpotent(
    n: usize,
    rng: &mut SeededRng,
    max_attempts: usize,
    count: usize,
    tol: f64,
) -> Result<(Vec<W3Candidate>, SearchStats)> {
    let mut found = Vec::new();
    let mut stats = SearchStats::default();
    for attempt in 0..max_attempts {
        if found.len() >= count {
            break;
        }
        stats.attempts += 1;
        let v_dim = rng.random_range(2..n);
        let mut signs = standard_p(n).diagonal().as_slice().to_vec();
        signs.shuffle(rng);
        let (params, basis) = w3_null_space(n, v_dim, &signs)?;
        stats.null_dims.push(basis.nrows());
        if basis.nrows() == 0 {
            continue;
        }
        let coeffs = DVector::from_fn(basis.nrows(), |_, _| normal(rng));
        let mut x = basis.transpose() * coeffs;
        let scale = x.amax();
        if scale == 0.0 {
            continue;
        }
        x /= scale;
        let entries: Vec<_> = params
            .iter()
            .zip(x.iter())
            .map(|(&(i, j, k), &v)| (i, j, k, v))
            .collect();
        let brackets = StructureConstants::from_entries(n, &entries)?;
        let o = random_orthogonal(n, rng);
        if let Some(c) = rotated_w3(brackets, &signs, &o, tol) {
            found.push(W3Candidate {
                manifold: c.0,
                v_dim: Some(v_dim),
                algebra: None,
                signs,
                null_dim: Some(basis.nrows()),
                attempt,
                norm_f: c.1,
                norm_cyclic_f: c.2,
            });
        }
    }
    Ok((found, stats))
}

/// Tries the catalog algebras of dimension `n` against random sign patterns of `P`.
pub fn search_w3_catalog(
    n: usize,
    rng: &mut SeededRng,
    max_attempts: usize,
    count: usize,
    tol: f64,
) -> Result<(Vec<W3Candidate>, SearchStats)> {
    let catalog = catalog_algebras(n);
    let mut found = Vec::new();
    let mut stats = SearchStats::default();
    if catalog.is_empty() {
        return Ok((found, stats));
    }
    for attempt in 0..max_attempts {
        if found.len() >= count {
            break;
        }
        stats.attempts += 1;
        let (name, brackets) = catalog[attempt % catalog.len()].clone();
        let mut signs = standard_p(n).diagonal().as_slice().to_vec();
        signs.shuffle(rng);
        let o = random_orthogonal(n, rng);
        if let Some(c) = rotated_w3(brackets, &signs, &o, tol) {
            found.push(W3Candidate {
                manifold: c.0,
                v_dim: None,
                algebra: Some(name),
                signs,
                null_dim: None,
                attempt,
                norm_f: c.1,
                norm_cyclic_f: c.2,
            });
        }
    }
    Ok((found, stats))
}

/// Applies the isometric frame change `f_a = Σ O^i_a e_i` keeping `g = I` exactly,
/// and keeps the result if it is strict `W3` with `‖F‖ > 10³·tol`.
fn rotated_w3(
    brackets: StructureConstants,
    signs: &[f64],
    o: &Matrix,
    tol: f64,
) -> Option<(FrameManifold, f64, f64)> {
    let n = signs.len();
    let c = rotate_brackets(&brackets, o);
    let p = symmetrized(&(o.transpose() * diag(signs) * o));
    let m = FrameManifold::new(c, Matrix::identity(n, n), p).ok()?;
    let report = classify(&m, tol);
    (report.class_label == ClassLabel::W3Strict && report.norm_f > 1e3 * tol).then_some((
        m,
        report.norm_f,
        report.norm_cyclic_f,
    ))
}

/// Structure constants in the frame `f_a = Σ O^i_a e_i` for orthogonal `O`.
pub fn rotate_brackets(c: &StructureConstants, o: &Matrix) -> StructureConstants {
    let n = c.dim();
    // [f_a, f_b] = O^i_a O^j_b C^k_ij e_k = (Oᵀ)^c_k O^i_a O^j_b C^k_ij f_c
    let mut ab = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let v = c.get(k, i, j);
                if v == 0.0 {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        ab[(k * n + a) * n + b] += o[(i, a)] * o[(j, b)] * v;
                    }
                }
            }
        }
    }
    let full = |cc: usize, a: usize, b: usize| -> f64 {
        (0..n).map(|k| o[(k, cc)] * ab[(k * n + a) * n + b]).sum()
    };
    // antisymmetrize explicitly so roundoff cannot break the stored symmetry
    StructureConstants::from_fn(n, |cc, a, b| {
        if a < b {
            0.5 * (full(cc, a, b) - full(cc, b, a))
        } else if a > b {
            -0.5 * (full(cc, b, a) - full(cc, a, b))
        } else {
            0.0
        }
    })
    .expect("antisymmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = seeded(7);
        let o = random_orthogonal(6, &mut rng);
        let err = (&o.transpose() * &o - Matrix::identity(6, 6)).amax();
        assert!(err < 1e-14);
    }

    #[test]
    fn compatible_pairs_validate() {
        let mut rng = seeded(1);
        for _ in 0..20 {
            let m = random_manifold(4, &mut rng);
            assert!(m.metric().is_positive_definite());
        }
    }

    #[test]
    fn natural_deformation_symmetries() {
        let mut rng = seeded(3);
        let p = standard_p(4);
        let q = random_natural_deformation(&p, &mut rng);
        assert!((&q + &q.permute(&[0, 2, 1]).unwrap()).max_abs() < 1e-15);
        let qz = q.compose_p(&p, 2).unwrap();
        let qy = q.compose_p(&p, 1).unwrap();
        assert!(qz.distance(&qy).unwrap() < 1e-15);
    }

    #[test]
    fn search_is_deterministic() {
        let run = || {
            let mut rng = seeded(0);
            search_w3_nilpotent(4, &mut rng, 20, 1, 1e-9).unwrap()
        };
        let (a, sa) = run();
        let (b, sb) = run();
        assert_eq!(sa, sb);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].manifold, b[0].manifold);
    }
}
