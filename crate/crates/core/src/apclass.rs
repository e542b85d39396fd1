//! Classifying tensors `F`, `N`, `N*` and the `W0` / `W3` membership tests.

use std::fmt;

use crate::frame::{nabla_p, FrameManifold};
use crate::tensor::Tensor;

/// Default classification tolerance (relative to the connection scale).
pub const DEFAULT_CLASS_TOL: f64 = 1e-9;

/// `F(x, y, z) = g((∇_x P) y, z)` for the Levi-Civita connection `∇` of `g`.
pub fn compute_f(manifold: &FrameManifold) -> Tensor {
    nabla_p(manifold, &manifold.levi_civita())
}

/// Defects of the three symmetries every `F` satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSymmetryDefects {
    /// `F(x,y,z) − F(x,z,y)`
    pub swap: f64,
    /// `F(x,y,z) + F(x,Py,Pz)`
    pub double_p: f64,
    /// `F(x,y,Pz) + F(x,Py,z)`
    pub mixed_p: f64,
}

impl FSymmetryDefects {
    pub fn max(&self) -> f64 {
        self.swap.max(self.double_p).max(self.mixed_p)
    }
}

pub fn f_symmetry_defects(manifold: &FrameManifold, f: &Tensor) -> FSymmetryDefects {
    let p = manifold.p();
    let f_yz = f.compose_p_slots(p, &[1, 2]).expect("degree 3");
    let f_z = f.compose_p(p, 2).expect("degree 3");
    let f_y = f.compose_p(p, 1).expect("degree 3");
    let swapped = f.permute(&[0, 2, 1]).expect("degree 3");
    FSymmetryDefects {
        swap: f.distance(&swapped).unwrap(),
        double_p: (f + &f_yz).max_abs(),
        mixed_p: (&f_z + &f_y).max_abs(),
    }
}

/// Nijenhuis tensor, lowered:
/// `N(x,y) = (∇_x P)Py − (∇_y P)Px + (∇_{Px} P)y − (∇_{Py} P)x`.
///
/// This is the antisymmetric integrability obstruction of `P`; it equals
/// `[Px,Py] + [x,y] − P[Px,y] − P[x,Py]`.
pub fn nijenhuis(manifold: &FrameManifold) -> Tensor {
    nijenhuis_from_f(&compute_f(manifold), manifold)
}

pub fn nijenhuis_from_f(f: &Tensor, manifold: &FrameManifold) -> Tensor {
    let p = manifold.p();
    let f_py = f.compose_p(p, 1).expect("degree 3");
    let f_px = f.compose_p(p, 0).expect("degree 3");
    Tensor::from_fn(f.dim(), |[x, y, z]| {
        f_py[[x, y, z]] - f_py[[y, x, z]] + f_px[[x, y, z]] - f_px[[y, x, z]]
    })
}

/// Associated tensor, lowered:
/// `N*(x,y) = (∇_x P)Py + (∇_{Px} P)y + (∇_y P)Px + (∇_{Py} P)x`.
pub fn n_star(manifold: &FrameManifold) -> Tensor {
    n_star_from_f(&compute_f(manifold), manifold)
}

pub fn n_star_from_f(f: &Tensor, manifold: &FrameManifold) -> Tensor {
    let p = manifold.p();
    let f_py = f.compose_p(p, 1).expect("degree 3");
    let f_px = f.compose_p(p, 0).expect("degree 3");
    Tensor::from_fn(f.dim(), |[x, y, z]| {
        f_py[[x, y, z]] + f_px[[x, y, z]] + f_py[[y, x, z]] + f_px[[y, x, z]]
    })
}

/// `‖∇P‖² = g^{ij} g^{ks} g((∇_{e_i}P)e_k, (∇_{e_j}P)e_s)`.
pub fn square_norm_nabla_p(manifold: &FrameManifold) -> f64 {
    compute_f(manifold).norm_sq(manifold.g_inv()).unwrap()
}

/// The crossed contraction `−2 g^{ij} g^{ks} g((∇_{e_i}P)e_k, (∇_{e_s}P)e_j)`,
/// which agrees with `‖∇P‖²` on `W3`.
pub fn square_norm_crossed(manifold: &FrameManifold, f: &Tensor) -> f64 {
    // F(s, j, b) re-indexed as (j, s, b) so both copies carry the same slot pattern
    let crossed = f.permute(&[1, 0, 2]).unwrap();
    -2.0 * f.inner(&crossed, manifold.g_inv()).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    /// `∇P = 0`
    W0,
    /// Cyclic sum of `F` vanishes, `F ≠ 0`.
    W3Strict,
    /// Cyclic sum of `F` does not vanish; no finer label is decided.
    OutsideScope,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::W0 => "W0",
            ClassLabel::W3Strict => "W3_strict",
            ClassLabel::OutsideScope => "OUTSIDE_SCOPE",
        }
    }

    /// `W0 ⊂ W3`, so both labels satisfy the `W3` hypotheses.
    pub fn is_w3(&self) -> bool {
        matches!(self, ClassLabel::W0 | ClassLabel::W3Strict)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub norm_f: f64,
    pub norm_cyclic_f: f64,
    pub norm_n: f64,
    pub norm_n_star: f64,
    pub norm_nabla_p_sq: f64,
    pub class_label: ClassLabel,
    /// Absolute threshold actually applied: `tol · max(1, max|Γ|)`.
    pub tolerance_used: f64,
    /// `‖N*‖ ≤ 4·dim·tolerance_used` agrees with the cyclic-sum test.
    pub n_star_consistent: bool,
}

/// Decides `W0` / `W3_strict` / `OUTSIDE_SCOPE` from the g-norms of `F` and its cyclic sum.
pub fn classify(manifold: &FrameManifold, tol: f64) -> ClassificationReport {
    let g_inv = manifold.g_inv();
    let lc = manifold.levi_civita();
    let f = nabla_p(manifold, &lc);
    let norm = |t: &Tensor| t.norm_sq(g_inv).unwrap().max(0.0).sqrt();
    let norm_f = norm(&f);
    let norm_cyclic_f = norm(&f.cyclic_sum3().unwrap());
    let norm_n = norm(&nijenhuis_from_f(&f, manifold));
    let norm_n_star = norm(&n_star_from_f(&f, manifold));
    let tolerance_used = tol * lc.max_abs().max(1.0);

    let class_label = if norm_f <= tolerance_used {
        ClassLabel::W0
    } else if norm_cyclic_f <= tolerance_used {
        ClassLabel::W3Strict
    } else {
        ClassLabel::OutsideScope
    };
    let n_star_small = norm_n_star <= 4.0 * manifold.dim() as f64 * tolerance_used;
    ClassificationReport {
        norm_f,
        norm_cyclic_f,
        norm_n,
        norm_n_star,
        norm_nabla_p_sq: norm_f * norm_f,
        class_label,
        tolerance_used,
        n_star_consistent: n_star_small == (norm_cyclic_f <= tolerance_used),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::StructureConstants;
    use crate::tensor::Matrix;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    #[test]
    fn e0_is_w0() {
        let m = FrameManifold::new(
            StructureConstants::zero(4),
            Matrix::identity(4, 4),
            diag(&[1.0, 1.0, -1.0, -1.0]),
        )
        .unwrap();
        let report = classify(&m, DEFAULT_CLASS_TOL);
        assert_eq!(report.class_label, ClassLabel::W0);
        assert_eq!(report.norm_nabla_p_sq, 0.0);
        assert_eq!(nijenhuis(&m).max_abs(), 0.0);
        assert_eq!(n_star(&m).max_abs(), 0.0);
        assert_eq!(square_norm_nabla_p(&m), 0.0);
    }

    #[test]
    fn nilpotent_aligned_example_is_w3_strict() {
        // [e0,e1] = e2 + 0.5 e3 with P = +1 on span(e0,e1)
        let c = StructureConstants::from_entries(4, &[(0, 1, 2, 1.0), (0, 1, 3, 0.5)]).unwrap();
        let m =
            FrameManifold::new(c, Matrix::identity(4, 4), diag(&[1.0, 1.0, -1.0, -1.0])).unwrap();
        let report = classify(&m, DEFAULT_CLASS_TOL);
        assert_eq!(report.class_label, ClassLabel::W3Strict);
        assert!(report.n_star_consistent);
        assert!(report.norm_n > 1e-3);
        let f = compute_f(&m);
        assert!(f_symmetry_defects(&m, &f).max() < 1e-15);
        let n = nijenhuis(&m);
        assert!(
            n.distance(&n.permute(&[1, 0, 2]).unwrap().scale(-1.0))
                .unwrap()
                < 1e-15
        );
        let ns = n_star(&m);
        assert!(ns.distance(&ns.permute(&[1, 0, 2]).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn misaligned_bracket_is_outside_scope() {
        // the center is no longer a P-eigenspace
        let c = StructureConstants::from_entries(4, &[(0, 2, 1, 1.0)]).unwrap();
        let m =
            FrameManifold::new(c, Matrix::identity(4, 4), diag(&[1.0, 1.0, -1.0, -1.0])).unwrap();
        let report = classify(&m, DEFAULT_CLASS_TOL);
        assert_eq!(report.class_label, ClassLabel::OutsideScope);
        assert!(report.n_star_consistent);
    }
}
