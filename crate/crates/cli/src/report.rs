//! Verification reports: a fixed registry of identity checks, each with a
//! pinned tolerance and a hypothesis gate.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use apm_core::apclass::{
    classify, compute_f, f_symmetry_defects, n_star_from_f, nijenhuis_from_f, square_norm_crossed,
    ClassLabel, ClassificationReport,
};
use apm_core::curvature::{
    bianchi_pairing, bianchi_record, contracted_deformation, curvature_summary_with,
    is_curvature_like, is_p_tensor, pair_symmetry_defect, parallel_torsion_analysis_with,
    rprime_deformation,
};
use apm_core::frame::covariant_derivative;
use apm_core::natconn::*;
use apm_core::{FrameManifold, Tensor};
use serde_json::{json, Map, Value};

/// Hypothesis under which a check is evaluated; otherwise it is SKIPPED.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Always,
    /// Class `W0` or `W3_strict`.
    W3,
    W3Strict,
    /// `W3` with parallel canonical torsion.
    W3Parallel,
    /// `W3` with `R'` satisfying the first Bianchi identity.
    W3Bianchi,
}

impl Gate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gate::Always => "always",
            Gate::W3 => "W3",
            Gate::W3Strict => "W3_strict",
            Gate::W3Parallel => "W3_parallel_torsion",
            Gate::W3Bianchi => "W3_bianchi_R_prime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// PASS iff `defect ≤ tol`.
    Vanish,
    /// PASS iff `defect > tol` (the quantity must be bounded away from zero).
    Exceed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Skipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub id: &'static str,
    pub gate: Gate,
    pub kind: Kind,
    pub tol: f64,
}

const fn vanish(id: &'static str, gate: Gate, tol: f64) -> CheckSpec {
    CheckSpec {
        id,
        gate,
        kind: Kind::Vanish,
        tol,
    }
}

const fn exceed(id: &'static str, gate: Gate, tol: f64) -> CheckSpec {
    CheckSpec {
        id,
        gate,
        kind: Kind::Exceed,
        tol,
    }
}

/// Relative defects are divided by `max(1, |reference|)` and carry a relative tolerance.
/// Boolean checks report 0 (holds) or 1 (violated) against tolerance 0.
pub const REGISTRY: &[CheckSpec] = &[
    // fundamental tensor and Levi-Civita connection
    vanish("f_symmetry_swap", Gate::Always, 1e-12),
    vanish("f_symmetry_double_p", Gate::Always, 1e-12),
    vanish("f_symmetry_mixed_p", Gate::Always, 1e-12),
    vanish("levi_civita_metric", Gate::Always, 1e-12),
    vanish("levi_civita_torsion_free", Gate::Always, 1e-12),
    vanish("levi_civita_curvature_symmetries", Gate::Always, 1e-10),
    vanish("levi_civita_first_bianchi", Gate::Always, 1e-10),
    vanish("levi_civita_pair_symmetry", Gate::Always, 1e-10),
    vanish("nijenhuis_antisymmetry", Gate::Always, 1e-12),
    vanish("n_star_symmetry", Gate::Always, 1e-12),
    vanish("w3_iff_n_star_vanishes", Gate::Always, 0.0),
    // Φ and the natural connections
    vanish("phi_from_f", Gate::Always, 1e-10),
    vanish("f_from_phi", Gate::Always, 1e-10),
    vanish("torsion_projector_reconstruction", Gate::Always, 1e-10),
    vanish("torsion_projector_orthogonality", Gate::Always, 1e-10),
    vanish("natural_p1_from_phi", Gate::Always, 1e-10),
    vanish("natural_p3_from_phi", Gate::Always, 1e-10),
    vanish("natural_p3_nijenhuis", Gate::Always, 1e-10),
    // canonical connection, general construction
    vanish("canonical_metric", Gate::Always, 1e-12),
    vanish("canonical_parallel_p", Gate::Always, 1e-12),
    vanish("canonical_f_from_q", Gate::Always, 1e-10),
    vanish("canonical_q_skew", Gate::Always, 1e-12),
    vanish("canonical_torsion_condition", Gate::Always, 1e-10),
    vanish("canonical_torsion_no_p2_p4", Gate::Always, 1e-10),
    vanish("canonical_torsion_from_q", Gate::Always, 1e-12),
    vanish("canonical_torsion_from_phi", Gate::Always, 1e-10),
    vanish("r_prime_deformation", Gate::Always, 1e-10),
    vanish("r_prime_curvature_symmetries", Gate::Always, 1e-10),
    vanish("r_prime_p_invariance", Gate::Always, 1e-10),
    vanish("r_prime_generalized_parallel_formula", Gate::Always, 1e-10),
    vanish("t_q_f_parallel_simultaneously", Gate::Always, 0.0),
    // W3 identities
    vanish("phi_w3_form", Gate::W3, 1e-10),
    vanish("phi_w3_alternative_form", Gate::W3, 1e-10),
    vanish("canonical_route_agreement", Gate::W3, 1e-10),
    vanish("torsion_p_commutation", Gate::W3, 1e-10),
    vanish("torsion_p_slot_exchange", Gate::W3, 1e-10),
    vanish("torsion_equals_p3", Gate::W3, 1e-10),
    vanish("natural_p1_vanishes", Gate::W3, 1e-10),
    vanish("torsion_from_f", Gate::W3, 1e-10),
    vanish("f_from_torsion", Gate::W3, 1e-10),
    vanish("q_from_f", Gate::W3, 1e-10),
    vanish("q_swap_identity", Gate::W3, 1e-10),
    vanish("q_trace", Gate::W3, 1e-10),
    vanish("nabla_q_trace", Gate::W3, 1e-10),
    vanish("hayden_formula", Gate::W3, 1e-10),
    vanish("ricci_prime_formula", Gate::W3, 1e-10),
    vanish("tau_prime_contraction", Gate::W3, 1e-10),
    vanish("tau_shift_eighth_norm", Gate::W3, 1e-9),
    vanish("tau_prime_eighth_norm", Gate::W3, 1e-9),
    vanish("norm_nabla_p_crossed", Gate::W3, 1e-9),
    vanish("norm_nabla_p_tau_star_star", Gate::W3, 1e-9),
    vanish("tau_equal_iff_w0", Gate::W3, 0.0),
    vanish("r_prime_bianchi_torsion_expression", Gate::W3, 1e-10),
    vanish("q_substitution_identity", Gate::W3, 1e-10),
    vanish("contraction_f_t_half_norm", Gate::W3, 1e-9),
    vanish("contraction_q_q_quarter_norm", Gate::W3, 1e-9),
    vanish("contraction_q_q_three_eighths_norm", Gate::W3, 1e-9),
    // strict W3
    exceed("natural_p3_nonzero", Gate::W3Strict, 1e-6),
    exceed("curvature_not_p_tensor", Gate::W3Strict, 1e-10),
    exceed("canonical_torsion_not_parallel", Gate::W3Strict, 1e-6),
    // conditional
    vanish("bianchi_pairing", Gate::W3Bianchi, 1e-8),
    vanish("parallel_curvature_formula", Gate::W3Parallel, 1e-10),
    vanish("parallel_curvature_substituted", Gate::W3Parallel, 1e-10),
    vanish("parallel_ricci_formula", Gate::W3Parallel, 1e-10),
    vanish("parallel_tau_quarter_norm", Gate::W3Parallel, 1e-9),
    vanish("parallel_torsion_forces_w0", Gate::W3Parallel, 1e-10),
];

/// Below this `max|T|` the non-parallel check is only a warning.
const TINY_TORSION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: &'static str,
    pub gate: Gate,
    pub defect: f64,
    pub tol: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub manifold: String,
    pub classification: ClassificationReport,
    pub checks: Vec<CheckResult>,
    pub scalars: Vec<(&'static str, f64)>,
    pub timing_ms: Vec<(&'static str, f64)>,
}

fn rel(value: f64, reference: f64) -> f64 {
    value.abs() / reference.abs().max(1.0)
}

fn flag(violated: bool) -> f64 {
    if violated {
        1.0
    } else {
        0.0
    }
}

/// Every registry quantity, computed regardless of gates.
fn measure(
    m: &FrameManifold,
    class: &ClassificationReport,
    timing: &mut Vec<(&'static str, f64)>,
) -> apm_core::Result<(HashMap<&'static str, f64>, Flags)> {
    let mut out: HashMap<&'static str, f64> = HashMap::new();
    let mut put = |id: &'static str, v: f64| {
        let prev = out.insert(id, v);
        debug_assert!(prev.is_none(), "{id} measured twice");
    };
    let p = m.p();
    let g_inv = m.g_inv();
    let n = m.dim();
    let clock = Instant::now();

    let lc = m.levi_civita();
    let f = compute_f(m);
    let fs = f_symmetry_defects(m, &f);
    put("f_symmetry_swap", fs.swap);
    put("f_symmetry_double_p", fs.double_p);
    put("f_symmetry_mixed_p", fs.mixed_p);
    put(
        "levi_civita_metric",
        covariant_derivative(&lc, &m.metric().tensor())?.max_abs(),
    );
    put(
        "levi_civita_torsion_free",
        lc.torsion_free_defect(m.brackets()),
    );
    let nij = nijenhuis_from_f(&f, m);
    let nst = n_star_from_f(&f, m);
    put(
        "nijenhuis_antisymmetry",
        (&nij + &nij.permute(&[1, 0, 2])?).max_abs(),
    );
    put("n_star_symmetry", nst.distance(&nst.permute(&[1, 0, 2])?)?);
    put("w3_iff_n_star_vanishes", flag(!class.n_star_consistent));

    let phi = phi_direct(m);
    put("phi_from_f", phi.distance(&phi_from_f(&f, p))?);
    put("f_from_phi", f_from_phi(&phi, p).distance(&f)?);
    let f0 = f.compose_p(p, 0)?;
    let f1 = f.compose_p(p, 1)?;
    put(
        "phi_w3_form",
        phi.distance(&Tensor::from_fn(n, |[x, y, z]| -f0[[z, x, y]]))?,
    );
    put(
        "phi_w3_alternative_form",
        phi.distance(&Tensor::from_fn(n, |[x, y, z]| {
            -f1[[x, y, z]] - f1[[y, x, z]]
        }))?,
    );

    let pair = canonical_connection(m)?;
    timing.push(("connection", clock.elapsed().as_secs_f64() * 1e3));
    let clock = Instant::now();
    let t = &pair.t;
    let q = &pair.q;
    let parts = project_torsion(t, p)?;
    put("torsion_projector_reconstruction", parts.residual);
    put(
        "torsion_projector_orthogonality",
        parts.max_cross_inner(g_inv),
    );
    put(
        "natural_p1_from_phi",
        parts.p1.distance(&natural_p1_from_phi(&phi, p))?,
    );
    put(
        "natural_p3_from_phi",
        parts.p3.distance(&natural_p3_from_phi(&phi, p))?,
    );
    put(
        "natural_p3_nijenhuis",
        (&parts.p3.scale(4.0) + &nij).max_abs(),
    );
    put("natural_p1_vanishes", parts.p1.max_abs());
    put("natural_p3_nonzero", parts.p3.max_abs());
    put(
        "torsion_equals_p3",
        parts
            .p1
            .max_abs()
            .max(parts.p2.max_abs())
            .max(parts.p4.max_abs())
            .max(parts.p3.distance(t)?),
    );

    let nat = is_natural(&pair.nabla_prime, m)?;
    put("canonical_metric", nat.nabla_g);
    put("canonical_parallel_p", nat.nabla_p);
    put("canonical_f_from_q", nat.f_relation);
    put("canonical_q_skew", nat.skew);
    let can = is_canonical(t, p)?;
    put("canonical_torsion_condition", can.quarter);
    put("canonical_torsion_no_p2_p4", can.p2.max(can.p4));
    put(
        "canonical_torsion_from_q",
        torsion_of(&pair.nabla_prime, m).distance(t)?,
    );
    put(
        "canonical_torsion_from_phi",
        torsion_from_phi(&phi, p).distance(t)?,
    );
    put("canonical_route_agreement", pair.w3_route_gap);
    let t0 = t.compose_p(p, 0)?;
    let t1 = t.compose_p(p, 1)?;
    let t2 = t.compose_p(p, 2)?;
    // T(Px,y) = −P T(x,y), i.e. T(Px,y,z) = −T(x,y,Pz)
    put("torsion_p_commutation", (&t0 + &t2).max_abs());
    put("torsion_p_slot_exchange", t0.distance(&t1)?);
    // the W3 formulas are evaluated even off W3; their rows are gated
    put(
        "torsion_from_f",
        torsion_from_f(&f, p, f64::INFINITY)?.distance(t)?,
    );
    put("f_from_torsion", f_from_torsion(t, p).distance(&f)?);
    put("q_from_f", q_from_f(&f, p, f64::INFINITY)?.distance(q)?);
    put("q_swap_identity", q_swap_defect(q, &f, p));
    put("hayden_formula", hayden_q_from_t(t)?.distance(q)?);

    let summary = curvature_summary_with(m, &pair)?;
    let r_like = is_curvature_like(&summary.r)?;
    put("levi_civita_curvature_symmetries", r_like.symmetries());
    put("levi_civita_first_bianchi", r_like.bianchi);
    put(
        "levi_civita_pair_symmetry",
        pair_symmetry_defect(&summary.r)?,
    );
    put(
        "r_prime_deformation",
        rprime_deformation(m, &pair)?.distance(&summary.r_prime)?,
    );
    let rp = is_p_tensor(&summary.r_prime, p)?;
    put(
        "r_prime_curvature_symmetries",
        rp.curvature_like.symmetries(),
    );
    put("r_prime_p_invariance", rp.p_invariance);
    put("curvature_not_p_tensor", is_p_tensor(&summary.r, p)?.max());

    let cd = contracted_deformation(m, &pair, &summary.rho)?;
    let np = summary.norm_nabla_p_sq;
    let (tau, tau_prime) = (summary.tau, summary.tau_prime);
    put("q_trace", cd.trace_q.max_abs());
    put("nabla_q_trace", cd.trace_nabla_q.max_abs());
    put(
        "ricci_prime_formula",
        cd.rho_prime.distance(&summary.rho_prime)?,
    );
    put(
        "tau_prime_contraction",
        (tau + cd.tau_shift - tau_prime).abs(),
    );
    put(
        "tau_shift_eighth_norm",
        rel(cd.tau_shift - np / 8.0, np / 8.0),
    );
    put(
        "tau_prime_eighth_norm",
        rel(tau_prime - tau - np / 8.0, tau),
    );
    put(
        "norm_nabla_p_crossed",
        rel(square_norm_crossed(m, &f) - np, np),
    );
    put(
        "norm_nabla_p_tau_star_star",
        rel(np - 2.0 * (tau - summary.tau_star_star), np),
    );
    let tau_tol = 1e-9 * tau.abs().max(1.0);
    put(
        "tau_equal_iff_w0",
        flag(((tau_prime - tau).abs() <= tau_tol) != (np <= 8.0 * tau_tol)),
    );

    let bianchi = bianchi_record(m, &pair)?;
    put("r_prime_bianchi_torsion_expression", bianchi.gap);
    put("bianchi_pairing", bianchi_pairing(m));

    let pa = parallel_torsion_analysis_with(m, &pair)?;
    put(
        "r_prime_generalized_parallel_formula",
        pa.generalized_curvature_defect,
    );
    put("t_q_f_parallel_simultaneously", flag(!pa.simultaneous));
    put("q_substitution_identity", pa.substitution_defect);
    put(
        "contraction_f_t_half_norm",
        rel(pa.contraction_ft - np / 2.0, np / 2.0),
    );
    put(
        "contraction_q_q_quarter_norm",
        rel(pa.contraction_qq - np / 4.0, np / 4.0),
    );
    put(
        "contraction_q_q_three_eighths_norm",
        rel(pa.contraction_qq - 0.375 * np, 0.375 * np),
    );
    let ratio = if pa.norm_t > 0.0 {
        pa.norm_nabla_prime_t / pa.norm_t
    } else {
        0.0
    };
    put("canonical_torsion_not_parallel", ratio);
    put("parallel_curvature_formula", pa.parallel_curvature_defect);
    put(
        "parallel_curvature_substituted",
        pa.r_prime_via_substitution_defect,
    );
    put("parallel_ricci_formula", pa.ricci_parallel_defect);
    put(
        "parallel_tau_quarter_norm",
        rel(pa.tau_relation_quarter(), tau),
    );
    put("parallel_torsion_forces_w0", np);
    timing.push(("curvature", clock.elapsed().as_secs_f64() * 1e3));

    let flags = Flags {
        parallel: pa.parallel,
        bianchi_flat: bianchi.torsion_expression <= 1e-10,
        tiny_torsion: pa.norm_t < TINY_TORSION,
        scalars: vec![
            ("tau", tau),
            ("tau_prime", tau_prime),
            ("tau_star", summary.tau_star),
            ("tau_star_star", summary.tau_star_star),
            ("norm_nabla_p_sq", np),
            ("norm_nabla_prime_t", pa.norm_nabla_prime_t),
        ],
    };
    Ok((out, flags))
}

struct Flags {
    parallel: bool,
    bianchi_flat: bool,
    tiny_torsion: bool,
    scalars: Vec<(&'static str, f64)>,
}

/// Runs every registry check on a validated manifold.
pub fn verify(
    m: &FrameManifold,
    name: &str,
    class_tol: f64,
) -> apm_core::Result<VerificationReport> {
    let start = Instant::now();
    let classification = classify(m, class_tol);
    let mut timing = vec![("classify", start.elapsed().as_secs_f64() * 1e3)];
    let (values, flags) = measure(m, &classification, &mut timing)?;
    let w3 = classification.class_label.is_w3();
    let strict = classification.class_label == ClassLabel::W3Strict;

    let checks = REGISTRY
        .iter()
        .map(|spec| {
            let defect = values[spec.id];
            let active = match spec.gate {
                Gate::Always => true,
                Gate::W3 => w3,
                Gate::W3Strict => strict,
                Gate::W3Parallel => w3 && flags.parallel,
                Gate::W3Bianchi => w3 && flags.bianchi_flat,
            };
            let holds = match spec.kind {
                Kind::Vanish => defect <= spec.tol,
                Kind::Exceed => defect > spec.tol,
            };
            let status = if !active {
                Status::Skipped
            } else if holds {
                Status::Pass
            } else if spec.id == "canonical_torsion_not_parallel" && flags.tiny_torsion {
                Status::Warn
            } else {
                Status::Fail
            };
            CheckResult {
                id: spec.id,
                gate: spec.gate,
                defect,
                tol: spec.tol,
                status,
            }
        })
        .collect();
    timing.push(("total", start.elapsed().as_secs_f64() * 1e3));
    Ok(VerificationReport {
        manifold: name.to_string(),
        classification,
        checks,
        scalars: flags.scalars,
        timing_ms: timing,
    })
}

impl VerificationReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn overall(&self) -> &'static str {
        if self.failed() {
            "FAIL"
        } else {
            "PASS"
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
    }

    pub fn to_json(&self, timing: bool) -> Value {
        let c = &self.classification;
        let classification = json!({
            "class_label": c.class_label.as_str(),
            "norm_f": c.norm_f,
            "norm_cyclic_f": c.norm_cyclic_f,
            "norm_n": c.norm_n,
            "norm_n_star": c.norm_n_star,
            "norm_nabla_p_sq": c.norm_nabla_p_sq,
            "tolerance_used": c.tolerance_used,
            "n_star_consistent": c.n_star_consistent,
        });
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|r| {
                json!({
                    "id": r.id,
                    "condition": r.gate.as_str(),
                    "defect": r.defect,
                    "tol": r.tol,
                    "status": r.status.as_str(),
                })
            })
            .collect();
        let scalars: Map<String, Value> = self
            .scalars
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let mut out = json!({
            "manifold": self.manifold,
            "classification": classification,
            "checks": checks,
            "scalars": scalars,
            "overall": self.overall(),
        });
        if timing {
            let t: Map<String, Value> = self
                .timing_ms
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            out["timing_ms"] = Value::Object(t);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.classification;
        let _ = writeln!(s, "manifold: {}", self.manifold);
        let _ = writeln!(
            s,
            "class: {}  |F| = {:.3e}  |cyclic F| = {:.3e}  |N| = {:.3e}  |N*| = {:.3e}  tol = {:.1e}",
            c.class_label, c.norm_f, c.norm_cyclic_f, c.norm_n, c.norm_n_star, c.tolerance_used
        );
        for (k, v) in &self.scalars {
            let _ = writeln!(s, "  {k:<20} {v:>+.12e}");
        }
        for r in &self.checks {
            let _ = writeln!(
                s,
                "{:<8} {:<40} defect {:.3e}  tol {:.1e}  [{}]",
                r.status.as_str(),
                r.id,
                r.defect,
                r.tol,
                r.gate.as_str()
            );
        }
        let _ = writeln!(
            s,
            "overall: {}  (pass {}, fail {}, warn {}, skipped {})",
            self.overall(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Warn),
            self.count(Status::Skipped)
        );
        let timing: Vec<String> = self
            .timing_ms
            .iter()
            .map(|(k, v)| format!("{k} {v:.2} ms"))
            .collect();
        let _ = writeln!(s, "timing: {}", timing.join(", "));
        s
    }
}
