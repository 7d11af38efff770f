//! Cross-module checks: descriptors through classification, search, certificates and Hodge data.

use std::sync::Arc;

use ballquot::ball::BallPoint;
use ballquot::hodge::HodgeSetup;
use ballquot::io::{self, FieldDesc, FormDesc, Matrix, MatrixDesc};
use ballquot::isometry::{classify, Isometry, IsometryLabel};
use ballquot::kahler::{
    bergman_form, omega_f, pullback_integral, stokes_check, CurveFamily, CurvePatch, CurveSpec, QuadSpec, StdRegion,
};
use ballquot::lattice::{pair_certificate, torsion_search, ArithmeticLattice};
use ballquot::numeric::{Vec3, C64};
use ballquot::par::Execution;

fn field_5() -> FieldDesc {
    serde_json::from_str(r#"{"d":5,"alpha":[-11,0]}"#).unwrap()
}

#[test]
fn descriptor_to_exact_classification() {
    let field = field_5().build().unwrap();
    let form = Arc::new(io::form(Some(&field), &FormDesc::DiagonalSqrtD).unwrap());
    let desc: MatrixDesc = serde_json::from_str(r#"{"kind":"ints","entries":[[-1,0,0],[0,-1,0],[0,0,1]]}"#).unwrap();
    let Matrix::Exact(m) = io::matrix(Some(&field), &desc).unwrap() else {
        panic!("integer descriptor with a field is exact");
    };
    let class = classify(&Isometry::exact(form, m).unwrap()).unwrap();
    assert_eq!(class.label, IsometryLabel::ReflectionAboutPoint);
}

#[test]
fn search_is_identical_across_policies() {
    let lat = ArithmeticLattice::diagonal(29, -11).unwrap();
    let a = torsion_search(&lat, 1, Execution::Sequential).unwrap();
    let b = torsion_search(&lat, 1, Execution::Parallel).unwrap();
    assert_eq!(a.data.len(), b.data.len());
    for (x, y) in a.data.iter().zip(&b.data) {
        assert_eq!(x.matrix(), y.matrix());
        assert_eq!(x.label, y.label);
    }
}

#[test]
fn every_found_pair_certifies() {
    let lat = ArithmeticLattice::diagonal(5, -11).unwrap();
    let data = torsion_search(&lat, 1, Execution::Parallel).unwrap().data;
    for a in &data {
        for b in &data {
            let c = pair_certificate(&lat, a, b).unwrap();
            assert!(c.trace_sum_error < 1e-9, "{:?} {:?}", a.label, b.label);
        }
    }
}

#[test]
fn found_members_act_equivariantly_on_hodge_frames() {
    let lat = ArithmeticLattice::diagonal(5, -11).unwrap();
    let setup = HodgeSetup::new(lat.form().clone(), None).unwrap();
    let v = BallPoint::new(
        lat.form().clone(),
        Vec3::new(C64::new(0.1, 0.05), C64::new(-0.2, 0.0), C64::new(1.0, 0.0)),
    )
    .unwrap();
    for d in torsion_search(&lat, 1, Execution::Parallel).unwrap().data {
        let rep = setup.equivariance(d.matrix(), &v).unwrap();
        assert!(rep.equivariant, "{:?}: {rep:?}", d.label);
    }
}

#[test]
fn omega_f_never_exceeds_bergman_on_a_curve() {
    let c = CurvePatch::from_spec(&CurveSpec {
        family: CurveFamily::Cusp,
        rho: None,
    })
    .unwrap();
    let region = StdRegion::tube_z0(0.8).unwrap();
    let q = QuadSpec::default();
    let wf = pullback_integral(&c, &omega_f(), &region, &q).unwrap();
    let vol = pullback_integral(&c, &bergman_form(), &region, &q).unwrap();
    assert!(wf.value <= vol.value + vol.error + wf.error);
    assert!(wf.value > 0.0);
}

#[test]
fn stokes_holds_for_parabola() {
    let c = CurvePatch::from_spec(&CurveSpec {
        family: CurveFamily::Parabola,
        rho: None,
    })
    .unwrap();
    let rep = stokes_check(&c, 0.6, &QuadSpec::default()).unwrap();
    assert!(rep.consistent, "{rep:?}");
}
