//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Tolerances and grids are the published ones; nothing here is loosened to
//! force a pass. A criterion whose wording cannot hold as stated is reported
//! as DEVIATION with the evidence, and does not count as a pass.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ballquot::ball::BallPoint;
use ballquot::cmfield::Embedding;
use ballquot::cmfield::{CmField, FieldElement, FieldMatrix};
use ballquot::hermitian::HermitianForm;
use ballquot::hodge::HodgeSetup;
use ballquot::isometry::{expansion_error, goldman_f, goldman_f_exact, sample, trace_sum, IsometryLabel};
use ballquot::kahler::{
    bergman_form, eig2, genus_certificate, hwang_to_check, lelong_ratio, monotonicity_scan, omega_f, Bound,
    CurveFamily, CurvePatch, CurveSpec, GenusInput, MonotonicityMode, QuadSpec, DEFAULT_LELONG_GRID,
};
use ballquot::lattice::{pair_certificate, torsion_search, ArithmeticLattice, TorsionDatum, TraceClass, Verdict};
use ballquot::numeric::{Mat3, C64};
use ballquot::par::Execution;
use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Deviation,
}

struct Line {
    id: &'static str,
    status: Status,
    detail: String,
    elapsed: Duration,
}

fn timed(id: &'static str, f: impl FnOnce() -> (Status, String)) -> Line {
    let t = Instant::now();
    let (status, detail) = f();
    Line {
        id,
        status,
        detail,
        elapsed: t.elapsed(),
    }
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn curve(family: CurveFamily) -> CurvePatch {
    CurvePatch::from_spec(&CurveSpec { family, rho: None }).expect("built-in curve")
}

/// Eigenvalue moduli from a Schur decomposition, independent of the trace formula.
fn off_unit_circle(m: &Mat3) -> f64 {
    let ev = m.schur().eigenvalues().expect("complex Schur form is triangular");
    ev.iter()
        .map(|l: &Complex<f64>| (l.norm() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn criterion_1() -> (Status, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut checked, mut borderline, mut disagree) = (0, 0, 0);
    for _ in 0..1000 {
        let m = sample::random_element(&mut rng);
        let f = goldman_f(m.trace());
        if f.abs() <= 1e-9 {
            borderline += 1;
            continue;
        }
        checked += 1;
        let lox_by_modulus = off_unit_circle(&m) > 1e-6;
        if lox_by_modulus != (f > 0.0) {
            disagree += 1;
        }
    }
    (
        verdict(disagree == 0 && checked > 0),
        format!("{checked} non-borderline elements, {borderline} borderline skipped, {disagree} disagreements"),
    )
}

fn criterion_2() -> (Status, String) {
    let field = CmField::from_ints(5, -1, 0).unwrap();
    let f3 = goldman_f_exact(&FieldElement::from_int(&field, 3));
    let fm1 = goldman_f_exact(&FieldElement::from_int(&field, -1));
    (
        verdict(f3.is_zero() && fm1.is_zero()),
        format!("f(3) = {f3}, f(-1) = {fm1}"),
    )
}

fn criterion_3() -> (Status, String) {
    let line = curve(CurveFamily::Line);
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.5, 1.0, 1.5] {
        let t = Instant::now();
        let rep = hwang_to_check(&line, C64::new(0.0, 0.0), r, None, &QuadSpec::default()).unwrap();
        let secs = t.elapsed().as_secs_f64();
        ok &= (0.995..=1.005).contains(&rep.ratio) && secs < 30.0 && !rep.touches_boundary;
        parts.push(format!("r={r}: ratio {:.9} ({secs:.2}s)", rep.ratio));
    }
    (verdict(ok), parts.join(", "))
}

fn criterion_4() -> (Status, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3u32 {
        let rep = lelong_ratio(
            &curve(CurveFamily::Graph { k }),
            &DEFAULT_LELONG_GRID,
            &QuadSpec::default(),
        )
        .unwrap();
        let normalized = rep.limit / (2.0 * PI * k as f64);
        ok &= (0.95..=1.05).contains(&normalized);
        parts.push(format!("k={k}: {normalized:.6}"));
    }
    (verdict(ok), parts.join(", "))
}

/// Radical inverse in base `b`.
fn halton(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

fn criterion_5() -> (Status, String) {
    let (omega, bergman) = (omega_f(), bergman_form());
    let diff = bergman.minus(&omega);
    let (mut min_omega, mut min_diff) = (f64::INFINITY, f64::INFINITY);
    let mut n = 0;
    let mut i = 1u64;
    while n < 100_000 {
        // Uniform in the ball: radius by the 4-dimensional volume law, direction from Halton angles.
        let rad = halton(i, 2).powf(0.25) * 0.999_999;
        let t = halton(i, 3).sqrt();
        let (a1, a2) = (2.0 * PI * halton(i, 5), 2.0 * PI * halton(i, 7));
        i += 1;
        let z = C64::from_polar(rad * t, a1);
        let w = C64::from_polar(rad * (1.0 - t * t).sqrt(), a2);
        let (Ok(mo), Ok(md)) = (omega.eval(z, w), diff.eval(z, w)) else {
            continue;
        };
        min_omega = min_omega.min(eig2(&mo)[0]);
        min_diff = min_diff.min(eig2(&md)[0]);
        n += 1;
    }
    (
        verdict(min_omega >= -1e-12 && min_diff >= -1e-12),
        format!("{n} points: min eig omega_F {min_omega:.3e}, min eig (bergman - omega_F) {min_diff:.3e}"),
    )
}

fn criterion_6() -> (Status, String) {
    let grid: Vec<f64> = (1..=8).map(|i| 0.2 * i as f64).collect();
    let modes = [
        MonotonicityMode::OmegaFOverSinh2,
        MonotonicityMode::VolOverCosh2Tube,
        MonotonicityMode::VolOverCosh2Ball,
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, fam) in [("line", CurveFamily::Line), ("graph2", CurveFamily::Graph { k: 2 })] {
        let c = curve(fam);
        for mode in modes {
            let rep = monotonicity_scan(&c, mode, &grid, &QuadSpec::default()).unwrap();
            let used = rep.exhausted.iter().filter(|e| !**e).count();
            ok &= rep.nondecreasing && used >= 2;
            parts.push(format!(
                "{name}/{mode:?}: {} ({used}/{} radii inside patch)",
                if rep.nondecreasing {
                    "nondecreasing"
                } else {
                    "DECREASES"
                },
                grid.len()
            ));
        }
    }
    (verdict(ok), parts.join("; "))
}

fn sign_diagonals(lat: &ArithmeticLattice) -> Vec<FieldMatrix> {
    let f = lat.field();
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
        .iter()
        .map(|d| FieldMatrix::from_ints(f, [[d[0], 0, 0], [0, d[1], 0], [0, 0, d[2]]]))
        .collect()
}

struct LatticeRun {
    d: i64,
    lat: ArithmeticLattice,
    data: Vec<TorsionDatum>,
}

fn lattice_runs() -> Vec<LatticeRun> {
    [5, 29]
        .into_iter()
        .map(|d| {
            let lat = ArithmeticLattice::diagonal(d, -11).unwrap();
            let data = torsion_search(&lat, 1, Execution::Parallel).unwrap().data;
            LatticeRun { d, lat, data }
        })
        .collect()
}

fn is_line(d: &TorsionDatum) -> bool {
    d.label == IsometryLabel::ReflectionAboutLine
}

fn criterion_7(runs: &[LatticeRun], elapsed: Duration) -> Vec<(Status, String)> {
    let mut found_all = true;
    let mut verified = true;
    let mut example_ok = true;
    let mut trichotomy_ok = true;
    let mut extras = Vec::new();
    for run in runs {
        let diags = sign_diagonals(&run.lat);
        for m in &diags {
            found_all &= run.data.iter().any(|d| d.matrix() == m);
        }
        for d in &run.data {
            verified &= run.lat.is_member(d.matrix()).member;
            if !diags.contains(d.matrix()) {
                extras.push(format!("D={} {:?} order {}", run.d, d.label, d.order));
            }
        }
        // The worked example: distinct diagonal line reflections meet at [0,0,1].
        let diag_lines: Vec<&TorsionDatum> = run
            .data
            .iter()
            .filter(|d| diags.contains(d.matrix()) && is_line(d))
            .collect();
        for (i, a) in diag_lines.iter().enumerate() {
            for b in &diag_lines[i + 1..] {
                let c = pair_certificate(&run.lat, a, b).unwrap();
                example_ok &= match &c.verdict {
                    Verdict::IntersectAtIsolatedPoint { point, product_label } => {
                        let p = [point[0], point[1], point[2]];
                        let at_origin = p[0] == [0.0, 0.0] && p[1] == [0.0, 0.0] && (p[2][0] - 1.0).abs() < 1e-12;
                        at_origin && *product_label == Some(IsometryLabel::ReflectionAboutPoint)
                    }
                    _ => false,
                };
            }
        }
        for (i, a) in run.data.iter().enumerate() {
            for b in &run.data[i + 1..] {
                if !(a.label.is_elliptic() && b.label.is_elliptic()) {
                    continue;
                }
                let c = pair_certificate(&run.lat, a, b).unwrap();
                trichotomy_ok &= c.trace_class != TraceClass::OutsideRange;
            }
        }
    }
    let main = verdict(found_all && verified && example_ok && trichotomy_ok && elapsed.as_secs_f64() < 60.0);
    let detail = format!(
        "sign-diagonals found {found_all}, all outputs verified members {verified}, example verdict {example_ok}, \
         trichotomy {trichotomy_ok}, {:.2}s",
        elapsed.as_secs_f64()
    );
    let exact = if extras.is_empty() {
        (Status::Pass, "search output equals the sign-diagonal set".to_string())
    } else {
        (
            Status::Deviation,
            format!(
                "\"exactly the sign-diagonal members\" cannot hold: cap 1 also admits verified non-diagonal members: {}",
                extras.join(", ")
            ),
        )
    };
    vec![(main, detail), exact]
}

fn criterion_8(runs: &[LatticeRun]) -> (Status, String) {
    let (mut worst_expand, mut worst_trace, mut pairs) = (0.0f64, 0.0f64, 0);
    for run in runs {
        let j = run.lat.form();
        for (i, a) in run.data.iter().enumerate() {
            for b in &run.data[i + 1..] {
                if !(a.label.is_elliptic() && b.label.is_elliptic()) {
                    continue;
                }
                pairs += 1;
                let e = expansion_error(j, &a.frame, &b.frame).max(expansion_error(j, &b.frame, &a.frame));
                let exact = a.matrix().mul(b.matrix()).trace().embed(Embedding::Sigma1);
                worst_expand = worst_expand.max(e);
                worst_trace = worst_trace.max((trace_sum(j, &a.frame, &b.frame) - exact).norm());
            }
        }
    }
    (
        verdict(pairs > 0 && worst_expand <= 1e-10 && worst_trace <= 1e-9),
        format!("{pairs} elliptic pairs: max expansion error {worst_expand:.2e}, max trace error {worst_trace:.2e}"),
    )
}

fn criterion_9() -> (Status, String) {
    let t = Instant::now();
    let field = CmField::from_ints(5, -11, 0).unwrap();
    let form = Arc::new(HermitianForm::diagonal_sqrt_d(&field));
    let setup = HodgeSetup::new(form.clone(), None).unwrap();
    let pol = setup.polarization();
    let int_ok = pol.entries.len() == 12 && pol.entries.iter().all(|r| r.len() == 12) && pol.is_skew();
    let det_nonzero = pol.determinant_big() != 0.into();
    let v = BallPoint::new(form, Mat3::identity().column(2).into_owned()).unwrap();
    let frame = setup.frame(&v).unwrap();
    let rr = setup.riemann(&frame);
    let secs = t.elapsed().as_secs_f64();
    let ok = int_ok && det_nonzero && rr.max_isotropy < 1e-9 && rr.min_eigenvalue > 0.0 && secs < 5.0;
    (
        verdict(ok),
        format!(
            "skew integer 12x12 {int_ok}, det {}, max |Q| on H^(-1,0) {:.2e}, min Gram eigenvalue {:.4}, {secs:.2}s",
            pol.determinant, rr.max_isotropy, rr.min_eigenvalue
        ),
    )
}

fn criterion_10() -> (Status, String) {
    let expected = 200.0 * PI / 7.0;
    let got = genus_certificate(GenusInput::new(2, 100.0))
        .bound
        .value()
        .unwrap_or(f64::NAN);
    let rel = ((got - expected) / expected).abs();
    let infeasible = [72.0, 50.0, 1.0]
        .iter()
        .all(|&s| matches!(genus_certificate(GenusInput::new(2, s)).bound, Bound::Infeasible { .. }));
    (
        verdict(rel <= 1e-12 && infeasible),
        format!("vol_upper {got} vs 200pi/7 (rel {rel:.1e}); sinh^2 in {{72, 50, 1}} infeasible {infeasible}"),
    )
}

fn main() -> ExitCode {
    // cargo passes libtest flags to harness=false targets; only honour a name filter.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let want = |id: &str| filter.as_deref().map_or(true, |f| id.contains(f));
    let mut lines = Vec::new();
    let simple: [(&'static str, fn() -> (Status, String)); 6] = [
        ("1 classifier-consistency", criterion_1),
        ("2 exact-f-zeros", criterion_2),
        ("3 hwang-to-equality", criterion_3),
        ("4 lelong-ratios", criterion_4),
        ("5 form-sandwich", criterion_5),
        ("6 monotonicity", criterion_6),
    ];
    for (id, f) in simple {
        if want(id) {
            lines.push(timed(id, f));
        }
    }
    if want("7 lattice") || want("8 eigenframe") {
        let t = Instant::now();
        let runs = lattice_runs();
        let search = t.elapsed();
        let mut c7 = criterion_7(&runs, search).into_iter();
        let (s, d) = c7.next().unwrap();
        lines.push(Line {
            id: "7 lattice-arithmetic",
            status: s,
            detail: d,
            elapsed: t.elapsed(),
        });
        let (s, d) = c7.next().unwrap();
        lines.push(Line {
            id: "7 lattice-exactly-sign-diagonal",
            status: s,
            detail: d,
            elapsed: Duration::ZERO,
        });
        lines.push(timed("8 eigenframe-identities", || criterion_8(&runs)));
    }
    for (id, f) in [
        ("9 hodge-build", criterion_9 as fn() -> (Status, String)),
        ("10 genus-certificate", criterion_10),
    ] {
        if want(id) {
            lines.push(timed(id, f));
        }
    }

    let mut failed = false;
    for l in &lines {
        let tag = match l.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed = true;
                "FAIL"
            }
            Status::Deviation => "DEVIATION",
        };
        println!(
            "{tag:9} criterion {:34} [{:7.2}s] {}",
            l.id,
            l.elapsed.as_secs_f64(),
            l.detail
        );
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
