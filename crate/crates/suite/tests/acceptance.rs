//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use apm::report::{verify, Status};
use apm::spec::ManifoldSpec;
use apm_core::apclass::{classify, compute_f, f_symmetry_defects, square_norm_nabla_p};
use apm_core::curvature::{
    bianchi_pairing, bianchi_record, contracted_deformation, curvature_summary_with, is_p_tensor,
    parallel_torsion_analysis_with, rprime_deformation,
};
use apm_core::natconn::{
    canonical_connection, hayden_q_from_t, is_canonical, is_natural, project_torsion,
};
use apm_core::sample::*;
use apm_core::{ClassLabel, FrameManifold, Matrix, DEFAULT_CLASS_TOL};

const RANDOM_GENERAL: usize = 120;
const RANDOM_W3: usize = 100;

struct Population {
    /// Committed fixtures, by file name.
    fixtures: Vec<(String, FrameManifold)>,
    general: Vec<FrameManifold>,
    w3: Vec<FrameManifold>,
}

impl Population {
    fn all(&self) -> impl Iterator<Item = &FrameManifold> {
        self.fixtures
            .iter()
            .map(|(_, m)| m)
            .chain(&self.general)
            .chain(&self.w3)
    }

    /// Committed W3 fixtures plus the randomized strict-W3 instances.
    fn w3_fixtures(&self) -> impl Iterator<Item = &FrameManifold> {
        self.fixtures
            .iter()
            .map(|(_, m)| m)
            .filter(|m| classify(m, DEFAULT_CLASS_TOL).class_label.is_w3())
            .chain(&self.w3)
    }
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/fixtures")
}

/// The `apm` binary from the same target directory, built on demand.
fn apm_binary() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let bin = exe
        .parent()
        .and_then(Path::parent)
        .unwrap()
        .join(format!("apm{}", std::env::consts::EXE_SUFFIX));
    if !bin.exists() {
        let status = Command::new(env!("CARGO"))
            .args(["build", "-p", "apm", "--bin", "apm"])
            .status()
            .unwrap();
        assert!(status.success(), "building apm failed");
    }
    bin
}

fn load_fixtures() -> Vec<(String, FrameManifold)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let spec = ManifoldSpec::load(&p).unwrap();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                spec.to_manifold().unwrap(),
            )
        })
        .collect()
}

fn build_population() -> Population {
    let mut rng = seeded(2024);
    let general = (0..RANDOM_GENERAL)
        .map(|i| random_manifold(if i % 2 == 0 { 4 } else { 6 }, &mut rng))
        .collect();
    let mut w3 = Vec::new();
    let mut seed = 1000;
    while w3.len() < RANDOM_W3 {
        let mut rng = seeded(seed);
        seed += 1;
        let n = if seed % 4 == 0 { 6 } else { 4 };
        let (found, _) = search_w3_nilpotent(n, &mut rng, 10, 1, DEFAULT_CLASS_TOL).unwrap();
        for c in found {
            // half of the instances in a non-orthonormal frame
            let m = if w3.len() % 2 == 1 {
                let l = Matrix::identity(n, n)
                    + random_tensor(2, n, &mut rng).to_matrix().unwrap() * 0.3;
                c.manifold.change_frame(&l).unwrap()
            } else {
                c.manifold
            };
            w3.push(m);
        }
    }
    Population {
        fixtures: load_fixtures(),
        general,
        w3,
    }
}

struct Line {
    pass: bool,
    detail: String,
}

type Criterion<'a> = Box<dyn Fn() -> Line + 'a>;

fn line(pass: bool, detail: String) -> Line {
    Line { pass, detail }
}

fn criterion_1(pop: &Population) -> Line {
    let (mut count, mut worst) = (0, 0.0f64);
    for m in pop.all() {
        worst = worst.max(f_symmetry_defects(m, &compute_f(m)).max());
        count += 1;
    }
    line(
        worst <= 1e-12 && pop.general.len() >= 100,
        format!("max F-symmetry defect {worst:.2e} (tol 1e-12) over {count} manifolds"),
    )
}

fn criterion_2(pop: &Population) -> Line {
    let mut count = 0;
    let mut bad = 0;
    let mut w3 = 0;
    for m in pop.all() {
        let r = classify(m, DEFAULT_CLASS_TOL);
        count += 1;
        w3 += r.class_label.is_w3() as usize;
        bad += (!r.n_star_consistent) as usize;
    }
    line(
        bad == 0,
        format!("cyclic-F and N* tests disagree on {bad} of {count} manifolds ({w3} in W3)"),
    )
}

fn criterion_3(pop: &Population) -> Line {
    let (mut nat, mut can, mut route, mut count) = (0.0f64, 0.0f64, 0.0f64, 0);
    for m in pop.w3_fixtures() {
        let pair = canonical_connection(m).unwrap();
        let d = is_natural(&pair.nabla_prime, m).unwrap();
        nat = nat.max(d.nabla_g).max(d.nabla_p);
        can = can.max(is_canonical(&pair.t, m.p()).unwrap().quarter);
        route = route.max(pair.w3_route_gap);
        count += 1;
    }
    line(
        nat <= 1e-12 && can <= 1e-10 && route <= 1e-10,
        format!(
            "natural {nat:.2e} (1e-12), canonical {can:.2e} (1e-10), route gap {route:.2e} (1e-10) over {count} W3 manifolds"
        ),
    )
}

fn criterion_4(pop: &Population) -> Line {
    let (mut off_p3, mut min_p3, mut count) = (0.0f64, f64::INFINITY, 0);
    for m in pop.w3_fixtures() {
        let pair = canonical_connection(m).unwrap();
        let parts = project_torsion(&pair.t, m.p()).unwrap();
        off_p3 = off_p3
            .max(parts.p1.max_abs())
            .max(parts.p2.max_abs())
            .max(parts.p4.max_abs())
            .max(parts.p3.distance(&pair.t).unwrap());
        if classify(m, DEFAULT_CLASS_TOL).class_label == ClassLabel::W3Strict {
            min_p3 = min_p3.min(parts.p3.max_abs());
        }
        count += 1;
    }
    let mut rng = seeded(77);
    let (mut idem, mut ortho, mut recon) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let n = if i % 2 == 0 { 4 } else { 6 };
        let (g, p) = random_compatible_pair(n, &mut rng);
        let g_inv = g.try_inverse().unwrap();
        let parts = project_torsion(&random_torsion_like(n, &mut rng), &p).unwrap();
        recon = recon.max(parts.residual);
        ortho = ortho.max(parts.max_cross_inner(&g_inv));
        for (k, comp) in parts.components().into_iter().enumerate() {
            let again = project_torsion(comp, &p).unwrap();
            for (l, c) in again.components().into_iter().enumerate() {
                let d = if k == l {
                    c.distance(comp).unwrap()
                } else {
                    c.max_abs()
                };
                idem = idem.max(d);
            }
        }
    }
    line(
        off_p3 <= 1e-10 && min_p3 > 1e-6 && idem <= 1e-10 && ortho <= 1e-10 && recon <= 1e-10,
        format!(
            "|T−p3| and p1,p2,p4 {off_p3:.2e}, min |p3| {min_p3:.2e} over {count} W3 manifolds; \
             random torsion: idempotency {idem:.2e}, orthogonality {ortho:.2e}, reconstruction {recon:.2e}"
        ),
    )
}

fn criterion_5(pop: &Population) -> Line {
    let (mut eighth, mut twice, mut count) = (0.0f64, 0.0f64, 0);
    for m in pop.w3_fixtures() {
        let pair = canonical_connection(m).unwrap();
        let s = curvature_summary_with(m, &pair).unwrap();
        let np = s.norm_nabla_p_sq;
        eighth = eighth.max((s.tau_prime - s.tau - np / 8.0).abs() / s.tau.abs().max(1.0));
        twice = twice.max((np - 2.0 * (s.tau - s.tau_star_star)).abs() / np.max(1.0));
        count += 1;
    }
    line(
        eighth <= 1e-9 && twice <= 1e-9,
        format!("τ' − τ − ⅛|∇P|²: {eighth:.2e}, |∇P|² − 2(τ − τ**): {twice:.2e} (rel 1e-9) over {count} W3 manifolds"),
    )
}

fn criterion_6(pop: &Population) -> Line {
    let (mut rdef, mut rho, mut tau, mut traces, mut count) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0);
    for m in pop.w3_fixtures() {
        let pair = canonical_connection(m).unwrap();
        let s = curvature_summary_with(m, &pair).unwrap();
        rdef = rdef.max(
            rprime_deformation(m, &pair)
                .unwrap()
                .distance(&s.r_prime)
                .unwrap(),
        );
        let cd = contracted_deformation(m, &pair, &s.rho).unwrap();
        rho = rho.max(cd.rho_prime.distance(&s.rho_prime).unwrap());
        tau = tau.max((s.tau + cd.tau_shift - s.tau_prime).abs());
        traces = traces
            .max(cd.trace_q.max_abs())
            .max(cd.trace_nabla_q.max_abs());
        count += 1;
    }
    line(
        rdef <= 1e-10 && rho <= 1e-10 && tau <= 1e-10 && traces <= 1e-10,
        format!("R' routes {rdef:.2e}, ρ' {rho:.2e}, τ' {tau:.2e}, traces {traces:.2e} (1e-10) over {count} W3 manifolds"),
    )
}

fn criterion_7(pop: &Population) -> Line {
    let (mut sym, mut lemma, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
    let (mut count, mut hypothesis) = (0, 0);
    for m in pop.all() {
        let pair = canonical_connection(m).unwrap();
        let s = curvature_summary_with(m, &pair).unwrap();
        let d = is_p_tensor(&s.r_prime, m.p()).unwrap();
        sym = sym.max(d.curvature_like.symmetries()).max(d.p_invariance);
        count += 1;
        if !classify(m, DEFAULT_CLASS_TOL).class_label.is_w3() {
            continue;
        }
        let b = bianchi_record(m, &pair).unwrap();
        lemma = lemma.max(b.gap);
        if b.torsion_expression <= 1e-10 {
            hypothesis += 1;
            pairing = pairing.max(bianchi_pairing(m));
        }
    }
    line(
        sym <= 1e-10 && lemma <= 1e-10 && pairing <= 1e-8,
        format!(
            "R' symmetries and P-invariance {sym:.2e} over {count} manifolds; Bianchi gap {lemma:.2e}; \
             pairing {pairing:.2e} (1e-8) on {hypothesis} manifolds meeting the hypothesis"
        ),
    )
}

fn criterion_8(pop: &Population) -> Line {
    let mut simultaneous_bad = 0;
    let mut hayden = 0.0f64;
    let mut quarter = 0.0f64;
    let mut count = 0;
    for m in pop.all() {
        let pair = canonical_connection(m).unwrap();
        let a = parallel_torsion_analysis_with(m, &pair).unwrap();
        simultaneous_bad += (!a.simultaneous) as usize;
        count += 1;
        if !classify(m, DEFAULT_CLASS_TOL).class_label.is_w3() {
            continue;
        }
        hayden = hayden.max(hayden_q_from_t(&pair.t).unwrap().distance(&pair.q).unwrap());
        let np = square_norm_nabla_p(m);
        quarter = quarter.max((a.contraction_qq - np / 4.0).abs() / (np / 4.0).max(1.0));
    }
    let mut parallel_fixtures = Vec::new();
    for (name, m) in &pop.fixtures {
        if classify(m, DEFAULT_CLASS_TOL).class_label != ClassLabel::W3Strict {
            continue;
        }
        let pair = canonical_connection(m).unwrap();
        let a = parallel_torsion_analysis_with(m, &pair).unwrap();
        if a.norm_nabla_prime_t <= 1e-6 * a.norm_t {
            parallel_fixtures.push(format!(
                "{name} (|∇'T|/|T| = {:.1e})",
                a.norm_nabla_prime_t / a.norm_t
            ));
        }
    }
    let ok =
        simultaneous_bad == 0 && parallel_fixtures.is_empty() && hayden <= 1e-10 && quarter <= 1e-9;
    line(
        ok,
        format!(
            "simultaneity violations {simultaneous_bad}/{count}; strict-W3 fixtures with parallel torsion: [{}]; \
             Hayden {hayden:.2e}; quarter contraction rel err {quarter:.2e} (1e-9)",
            parallel_fixtures.join(", ")
        ),
    )
}

fn criterion_9(pop: &Population) -> Line {
    let (_, e0) = pop
        .fixtures
        .iter()
        .find(|(n, _)| n == "E0.json")
        .expect("E0 fixture");
    let r = verify(e0, "E0", DEFAULT_CLASS_TOL).unwrap();
    let nonzero: Vec<&str> = r
        .checks
        .iter()
        .filter(|c| c.defect != 0.0)
        .map(|c| c.id)
        .collect();
    let w0 = r.classification.class_label == ClassLabel::W0;
    let mut cor_bad = 0;
    let mut count = 0;
    for m in pop.w3_fixtures() {
        let pair = canonical_connection(m).unwrap();
        let s = curvature_summary_with(m, &pair).unwrap();
        let tol = 1e-9 * s.tau.abs().max(1.0);
        let equal = (s.tau_prime - s.tau).abs() <= tol;
        cor_bad += (equal != (s.norm_nabla_p_sq <= 8.0 * tol)) as usize;
        count += 1;
    }
    line(
        w0 && nonzero.is_empty() && !r.failed() && cor_bad == 0,
        format!(
            "E0 class {}, nonzero defects {:?}, FAILs {}; τ'=τ ⟺ W0 violated on {cor_bad}/{count} W3 manifolds",
            r.classification.class_label,
            nonzero,
            r.count(Status::Fail)
        ),
    )
}

fn apm(bin: &Path, args: &[&str]) -> std::process::Output {
    Command::new(bin)
        .args(args)
        .env_remove("APM_DEFAULT_TOL")
        .output()
        .unwrap()
}

fn criterion_10() -> Line {
    let bin = apm_binary();
    let w3x = fixtures_dir().join("W3X.json");
    let w3x = w3x.to_str().unwrap();
    let v1 = apm(&bin, &["verify", w3x]);
    let v2 = apm(&bin, &["verify", w3x]);
    let verify_det = v1.stdout == v2.stdout && !v1.stdout.is_empty();

    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        apm(
            &bin,
            &[
                "search-w3",
                "--dim",
                "4",
                "--seed",
                "0",
                "--out",
                d.path().to_str().unwrap(),
                "--name",
                "W3X",
            ],
        );
    }
    let s1 = std::fs::read(d1.path().join("W3X.json")).unwrap_or_default();
    let s2 = std::fs::read(d2.path().join("W3X.json")).unwrap_or_default();
    let search_det = !s1.is_empty() && s1 == s2 && s1 == std::fs::read(w3x).unwrap();

    let report: serde_json::Value = serde_json::from_slice(&v1.stdout).unwrap();
    let fails: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "FAIL")
        .map(|c| c["id"].as_str().unwrap())
        .collect();

    let start = Instant::now();
    apm(&bin, &["report", fixtures_dir().to_str().unwrap()]);
    let secs = start.elapsed().as_secs_f64();
    line(
        verify_det && search_det && fails.is_empty() && secs < 10.0,
        format!(
            "verify deterministic {verify_det}, search deterministic {search_det}, W3X FAILs {fails:?}, fixture suite {secs:.2} s"
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let pop = build_population();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("fundamental symmetries", Box::new(|| criterion_1(&pop))),
        ("W3 equivalence", Box::new(|| criterion_2(&pop))),
        ("canonical connection", Box::new(|| criterion_3(&pop))),
        ("torsion decomposition", Box::new(|| criterion_4(&pop))),
        ("scalar curvature relation", Box::new(|| criterion_5(&pop))),
        ("curvature route agreement", Box::new(|| criterion_6(&pop))),
        ("P-tensor criterion", Box::new(|| criterion_7(&pop))),
        ("parallel-torsion rigidity", Box::new(|| criterion_8(&pop))),
        ("W0 degenerate suite", Box::new(|| criterion_9(&pop))),
        ("reproducibility", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let l = run();
        failed += (!l.pass) as usize;
        println!(
            "criterion {:>2} {:<28} {}  {}",
            i + 1,
            name,
            if l.pass { "PASS" } else { "FAIL" },
            l.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass ({:.1} s)",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
