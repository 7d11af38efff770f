use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use ballquot::ball::{self, BallError, BallPoint, ComplexLine};
use ballquot::cmfield::CmField;
use ballquot::hermitian::HermitianForm;
use ballquot::hodge::{HodgeError, HodgeSetup};
use ballquot::io::{self, ElementDesc, FieldDesc, FormDesc, IoError, Matrix, MatrixDesc, Vector, VectorDesc};
use ballquot::isometry::{classify_with, ClassifyOptions, Isometry, IsometryError};
use ballquot::kahler::{
    self, bergman_form, omega_f, CurvePatch, CurveSpec, GenusInput, KahlerError, MonotonicityMode, PshSpec, QuadSpec,
    StdRegion, HWANG_TO_TOLERANCE,
};
use ballquot::lattice::{self, ArithmeticLattice, LatticeError};
use ballquot::numeric::C64;
use ballquot::par::Execution;
use serde_json::{json, Value};

use crate::report::{parse_json, write_output, Envelope, InputHasher, Table, TOOL, VERSION};
use crate::{
    CertificateCommand, Cli, CliError, Command, FormKind, HodgeCommand, LatticeAmbient, LatticeCommand, Profile,
    RegionKind, ScanMode, VolumeCommand,
};

/// What a command produced. The report is written even when `status` is an error.
struct Outcome {
    result: Value,
    table: Option<Table>,
    status: Result<(), CliError>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self {
            result,
            table: None,
            status: Ok(()),
        }
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn with_status(mut self, status: Result<(), CliError>) -> Self {
        self.status = status;
        self
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut h = InputHasher::default();
    h.args(&(cli.seed, &cli.command));
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let outcome = match &cli.command {
        Command::Classify(a) => {
            let desc: MatrixDesc = parse_json(&h.read(&a.matrix)?, "matrix")?;
            let form_desc: Option<FormDesc> = a
                .ambient
                .form
                .as_ref()
                .map(|p| parse_json(&h.read(p)?, "form"))
                .transpose()?;
            let field = match &a.ambient.field {
                Some(p) => Some(load_field(&mut h, p)?),
                None if integral_input(&desc, form_desc.as_ref()) => Some(auxiliary_field()?),
                None => None,
            };
            let form = form_from_desc(field.as_ref(), form_desc)?;
            let m = io::matrix(field.as_ref(), &desc).map_err(io_err)?;
            classify_cmd(form, m, a.assume_repeated)?
        }
        Command::Dist(a) => {
            let (field, form) = ambient(&mut h, a.ambient.field.as_ref(), a.ambient.form.as_ref())?;
            let p = load_vector(&mut h, field.as_ref(), &a.p)?;
            let p = point(&form, &p)?;
            match (&a.q, &a.line) {
                (Some(q), _) => {
                    let q = point(&form, &load_vector(&mut h, field.as_ref(), q)?)?;
                    let d = ball::distance(&p, &q).map_err(ball_err)?;
                    Outcome::ok(json!({ "kind": "point_point", "distance": d }))
                }
                (None, Some(l)) => {
                    let polar = load_vector(&mut h, field.as_ref(), l)?.numeric();
                    let line = ComplexLine::new(form.clone(), polar).map_err(ball_err)?;
                    let d = ball::dist_point_line(&p, &line).map_err(ball_err)?;
                    let mu = ball::mu_tilde(&p, &line).map_err(ball_err)?;
                    Outcome::ok(json!({ "kind": "point_line", "distance": d, "mu_tilde": mu }))
                }
                (None, None) => return Err(CliError::Input("either --q or --line is required".into())),
            }
        }
        Command::Lattice(LatticeCommand::Check(a)) => {
            let lat = load_lattice(&mut h, &a.ambient)?;
            let m = exact_matrix(&mut h, &lat, &a.matrix)?;
            let membership = lat.is_member(&m);
            let mut result = json!({ "membership": membership, "discriminant": lat.discriminant() });
            if membership.member {
                let iso = lat.element(m.clone()).map_err(lattice_err)?;
                let class = classify_with(&iso, ClassifyOptions::default()).map_err(isometry_err)?;
                result["class"] = io::class_view(&class);
                if let Ok(d) = lattice::torsion_datum(&lat, m) {
                    result["torsion"] = io::datum_view(&d);
                }
            }
            Outcome::ok(result)
        }
        Command::Lattice(LatticeCommand::Search(a)) => {
            let lat = load_lattice(&mut h, &a.ambient)?;
            let rep = lattice::torsion_search(&lat, a.cap, exec).map_err(lattice_err)?;
            let mut table = Table::new(vec!["index", "label", "order", "locus"]);
            for (i, d) in rep.data.iter().enumerate() {
                table.push(vec![
                    i.to_string(),
                    format!("{:?}", d.label),
                    d.order.to_string(),
                    serde_json::to_string(&d.locus()).expect("locus serializes"),
                ]);
            }
            Outcome::ok(json!({
                "discriminant": lat.discriminant(),
                "height_cap": rep.height_cap,
                "order_bound": rep.order_bound,
                "column_combinations": rep.column_combinations.to_string(),
                "members_found": rep.members_found,
                "data": rep.data.iter().map(io::datum_view).collect::<Vec<_>>(),
            }))
            .with_table(table)
        }
        Command::Lattice(LatticeCommand::Certify(a)) => {
            let lat = load_lattice(&mut h, &a.ambient)?;
            let ma = exact_matrix(&mut h, &lat, &a.a)?;
            let mb = exact_matrix(&mut h, &lat, &a.b)?;
            let da = lattice::torsion_datum(&lat, ma).map_err(lattice_err)?;
            let db = lattice::torsion_datum(&lat, mb).map_err(lattice_err)?;
            let cert = lattice::pair_certificate(&lat, &da, &db).map_err(lattice_err)?;
            Outcome::ok(io::certificate_view(&cert))
        }
        Command::Volume(VolumeCommand::Curve(a)) => {
            let spec: CurveSpec = parse_json(&h.read(&a.curve)?, "curve")?;
            volume_curve(a, &spec, exec)?
        }
        Command::Volume(VolumeCommand::Psh(a)) => {
            let spec = match a.profile {
                Profile::Log => PshSpec::log(),
                Profile::F => PshSpec::big_f(),
                Profile::NegLog => PshSpec::neg_log(),
            };
            let v = kahler::psh_check(&spec, a.samples, cli.seed);
            Outcome::ok(serde_json::to_value(&v).expect("verdict serializes"))
        }
        Command::Certificate(CertificateCommand::Genus(a)) => {
            let sinh2 = match (a.sinh2, a.r) {
                (Some(s), _) => s,
                (None, Some(r)) => (r / 2.0).sinh().powi(2),
                (None, None) => return Err(CliError::Input("either --sinh2 or --r is required".into())),
            };
            if !sinh2.is_finite() || sinh2 < 0.0 {
                return Err(CliError::Input(format!(
                    "sinh^2(r/2) must be finite and nonnegative, got {sinh2}"
                )));
            }
            let cert = kahler::genus_certificate(GenusInput::new(a.g, sinh2));
            let status = match cert.bound.value() {
                Some(_) => Ok(()),
                None => Err(CliError::Rejected(format!(
                    "no bound: sinh^2(r/2) = {sinh2} must exceed {}",
                    cert.threshold
                ))),
            };
            Outcome::ok(serde_json::to_value(&cert).expect("certificate serializes")).with_status(status)
        }
        Command::Hodge(HodgeCommand::Build(a)) => {
            let field = load_field(&mut h, &a.field)?;
            let form = load_form(&mut h, Some(&field), a.form.as_ref())?;
            let alpha = match &a.alpha {
                Some(p) => {
                    let e: ElementDesc = parse_json(&h.read(p)?, "alpha")?;
                    Some(io::element(&field, &e).map_err(io_err)?)
                }
                None => None,
            };
            let v = load_vector(&mut h, Some(&field), &a.v)?;
            hodge_cmd(form, alpha, &v)?
        }
    };
    let envelope = Envelope {
        tool: TOOL,
        version: VERSION,
        command: cli.command.name(),
        input_hash: h.finish(),
        seed: cli.seed,
        result: outcome.result,
    };
    write_output(cli.out.as_ref(), &envelope)?;
    if let (Some(path), Some(table)) = (&cli.csv, &outcome.table) {
        table.write(path)?;
    }
    outcome.status
}

fn classify_cmd(form: Arc<HermitianForm>, m: Matrix, assume_repeated: bool) -> Result<Outcome, CliError> {
    let iso = match (&m, form.is_exact()) {
        (Matrix::Exact(x), true) => Isometry::exact(form, x.clone()),
        _ => Isometry::numeric(form, m.numeric()),
    }
    .map_err(isometry_err)?;
    let opts = ClassifyOptions {
        assume_repeated_eigenvalue: assume_repeated,
    };
    let class = classify_with(&iso, opts).map_err(isometry_err)?;
    let mut table = Table::new(vec!["label", "trace_re", "trace_im", "f"]);
    let t = class.trace.trace_shadow();
    table.push(vec![
        format!("{:?}", class.label),
        t.re.to_string(),
        t.im.to_string(),
        class.trace.f_shadow().to_string(),
    ]);
    Ok(Outcome::ok(json!({ "exact": iso.is_exact(), "class": io::class_view(&class) })).with_table(table))
}

fn volume_curve(a: &crate::VolumeCurveArgs, spec: &CurveSpec, exec: Execution) -> Result<Outcome, CliError> {
    let curve = CurvePatch::from_spec(spec).map_err(kahler_err)?;
    let quad = QuadSpec {
        rel_tol: a.rel_tol,
        ..QuadSpec::default()
    }
    .with_exec(exec);
    let s0 = C64::new(a.center[0], a.center[1]);
    let (z0, w0) = curve.point(s0);
    let form = match a.form {
        FormKind::Bergman => bergman_form(),
        FormKind::OmegaF => omega_f(),
    };
    // Normalizer 4π sinh²(r/2)·m with m the multiplicity at the center (ball) or C·L (tube).
    let m = match a.region {
        RegionKind::Ball => curve.multiplicity_at(s0),
        RegionKind::Tube => curve.intersection_number(),
    };
    let mut rows = Vec::new();
    let mut table = Table::new(vec![
        "r",
        "value",
        "error",
        "normalizer",
        "ratio",
        "converged",
        "touches_boundary",
    ]);
    let mut all_converged = true;
    let mut hwang_to_ok = true;
    for &r in &a.radii {
        let region = match a.region {
            RegionKind::Ball => StdRegion::ball(z0, w0, r),
            RegionKind::Tube => StdRegion::tube_z0(r),
        }
        .map_err(kahler_err)?;
        let int = kahler::pullback_integral(&curve, &form, &region, &quad).map_err(kahler_err)?;
        let normalizer = 4.0 * PI * (r / 2.0).sinh().powi(2) * m as f64;
        let ratio = int.value / normalizer;
        all_converged &= int.converged;
        let verdict = (a.region == RegionKind::Ball && a.form == FormKind::Bergman && !int.touches_boundary)
            .then(|| ratio >= 1.0 - HWANG_TO_TOLERANCE);
        if verdict == Some(false) {
            hwang_to_ok = false;
        }
        table.push(vec![
            r.to_string(),
            int.value.to_string(),
            int.error.to_string(),
            normalizer.to_string(),
            ratio.to_string(),
            int.converged.to_string(),
            int.touches_boundary.to_string(),
        ]);
        rows.push(json!({
            "r": r,
            "value": int.value,
            "error": int.error,
            "normalizer": normalizer,
            "ratio": ratio,
            "verdict": verdict,
            "converged": int.converged,
            "touches_boundary": int.touches_boundary,
        }));
    }
    let mut result = json!({
        "curve": curve.name(),
        "region": a.region,
        "form": a.form,
        "center": [z0.re, z0.im, w0.re, w0.im],
        "multiplier": m,
        "rows": rows,
    });
    let mut inconclusive = Vec::new();
    if !all_converged {
        inconclusive.push("quadrature did not reach the requested tolerance".to_string());
    }
    if a.lelong {
        let rep = kahler::lelong_ratio(&curve, &a.radii, &quad).map_err(kahler_err)?;
        result["lelong"] = serde_json::to_value(&rep).expect("report serializes");
    }
    if let Some(mode) = a.scan {
        let mode = match mode {
            ScanMode::OmegaFOverSinh2 => MonotonicityMode::OmegaFOverSinh2,
            ScanMode::VolOverCosh2Tube => MonotonicityMode::VolOverCosh2Tube,
            ScanMode::VolOverCosh2Ball => MonotonicityMode::VolOverCosh2Ball,
        };
        let rep = kahler::monotonicity_scan(&curve, mode, &a.radii, &quad).map_err(kahler_err)?;
        // Flat steps with a negative difference are reported in the scan but do not change the exit status.
        if !rep.nondecreasing {
            inconclusive.push("normalized quantity decreased beyond its error bars".to_string());
        }
        result["monotonicity"] = serde_json::to_value(&rep).expect("report serializes");
    }
    result["hwang_to_ok"] = json!(hwang_to_ok);
    let status = if inconclusive.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconclusive(inconclusive.join("; ")))
    };
    Ok(Outcome::ok(result).with_table(table).with_status(status))
}

fn hodge_cmd(
    form: Arc<HermitianForm>,
    alpha: Option<ballquot::cmfield::FieldElement>,
    v: &Vector,
) -> Result<Outcome, CliError> {
    let setup = HodgeSetup::new(form.clone(), alpha).map_err(hodge_err)?;
    let p = point(&form, v)?;
    let frame = setup.frame(&p).map_err(hodge_err)?;
    let riemann = setup.riemann(&frame);
    let period = setup.period_matrix(&frame).map_err(hodge_err)?;
    let pol = setup.polarization();
    let status = if riemann.holds {
        Ok(())
    } else {
        Err(CliError::Inconclusive(
            "Riemann relations not verified numerically".into(),
        ))
    };
    let mut table = Table::new((0..pol.entries.len()).map(|j| format!("q{j}")));
    for row in &pol.entries {
        table.push(row.iter().map(|x| x.to_string()).collect());
    }
    Ok(Outcome::ok(json!({
        "alpha": io::element_view(setup.alpha()),
        "positive_block": format!("{:?}", setup.positive_block()),
        "polarization": {
            "entries": pol.entries,
            "determinant": pol.determinant,
            "skew": pol.is_skew(),
        },
        "riemann": riemann,
        "period_matrix": {
            "rows": period.rows(),
            "smallest_singular_value": period.smallest_singular_value,
            "real_lattice_det": period.real_lattice_det,
        },
    }))
    .with_table(table)
    .with_status(status))
}

fn load_field(h: &mut InputHasher, path: &PathBuf) -> Result<Arc<CmField>, CliError> {
    let desc: FieldDesc = parse_json(&h.read(path)?, "field")?;
    desc.build().map_err(io_err)
}

/// Without `--form`, a field gives `diag(1, 1, −√D)` and no field gives `diag(1, 1, −1)`.
fn load_form(
    h: &mut InputHasher,
    field: Option<&Arc<CmField>>,
    path: Option<&PathBuf>,
) -> Result<Arc<HermitianForm>, CliError> {
    let desc = path.map(|p| parse_json(&h.read(p)?, "form")).transpose()?;
    form_from_desc(field, desc)
}

fn form_from_desc(field: Option<&Arc<CmField>>, desc: Option<FormDesc>) -> Result<Arc<HermitianForm>, CliError> {
    let desc = desc.unwrap_or(if field.is_some() {
        FormDesc::DiagonalSqrtD
    } else {
        FormDesc::Standard
    });
    Ok(Arc::new(io::form(field, &desc).map_err(io_err)?))
}

/// Integer matrix against an integer (or default) form: exact arithmetic applies in any field.
fn integral_input(m: &MatrixDesc, form: Option<&FormDesc>) -> bool {
    matches!(m, MatrixDesc::Ints { .. })
        && match form {
            None | Some(FormDesc::Standard) => true,
            Some(FormDesc::Matrix { matrix }) => matches!(matrix, MatrixDesc::Ints { .. }),
            Some(FormDesc::DiagonalSqrtD) => false,
        }
}

/// `Q(√5)(√−1)`, used only to run integer inputs through the exact classifier.
fn auxiliary_field() -> Result<Arc<CmField>, CliError> {
    FieldDesc { d: 5, alpha: [-1, 0] }.build().map_err(io_err)
}

fn ambient(
    h: &mut InputHasher,
    field: Option<&PathBuf>,
    form: Option<&PathBuf>,
) -> Result<(Option<Arc<CmField>>, Arc<HermitianForm>), CliError> {
    let field = field.map(|p| load_field(h, p)).transpose()?;
    let form = load_form(h, field.as_ref(), form)?;
    Ok((field, form))
}

fn load_lattice(h: &mut InputHasher, a: &LatticeAmbient) -> Result<ArithmeticLattice, CliError> {
    let field = load_field(h, &a.field)?;
    let form = load_form(h, Some(&field), a.form.as_ref())?;
    ArithmeticLattice::new(form).map_err(lattice_err)
}

fn exact_matrix(
    h: &mut InputHasher,
    lat: &ArithmeticLattice,
    path: &PathBuf,
) -> Result<ballquot::cmfield::FieldMatrix, CliError> {
    let desc: MatrixDesc = parse_json(&h.read(path)?, "matrix")?;
    match io::matrix(Some(lat.field()), &desc).map_err(io_err)? {
        Matrix::Exact(m) => Ok(m),
        Matrix::Numeric(_) => Err(CliError::Input(
            "lattice commands need an exact or integer matrix".into(),
        )),
    }
}

fn load_vector(h: &mut InputHasher, field: Option<&Arc<CmField>>, path: &PathBuf) -> Result<Vector, CliError> {
    let desc: VectorDesc = parse_json(&h.read(path)?, "vector")?;
    io::vector(field, &desc).map_err(io_err)
}

fn point(form: &Arc<HermitianForm>, v: &Vector) -> Result<BallPoint, CliError> {
    match v {
        Vector::Exact(x) if form.is_exact() => BallPoint::from_exact(form.clone(), x),
        _ => BallPoint::new(form.clone(), v.numeric()),
    }
    .map_err(ball_err)
}

fn io_err(e: IoError) -> CliError {
    match e {
        IoError::Field(_) | IoError::Form(_) => CliError::Rejected(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn ball_err(e: BallError) -> CliError {
    CliError::Rejected(e.to_string())
}

fn isometry_err(e: IsometryError) -> CliError {
    match e {
        IsometryError::Borderline(_) => CliError::Inconclusive(e.to_string()),
        _ => CliError::Rejected(e.to_string()),
    }
}

fn lattice_err(e: LatticeError) -> CliError {
    match e {
        LatticeError::Isometry(i) => isometry_err(i),
        _ => CliError::Rejected(e.to_string()),
    }
}

fn kahler_err(e: KahlerError) -> CliError {
    match e {
        KahlerError::BadGrid(_) | KahlerError::BadQuad(_) => CliError::Input(e.to_string()),
        _ => CliError::Rejected(e.to_string()),
    }
}

fn hodge_err(e: HodgeError) -> CliError {
    match e {
        HodgeError::Degenerate(_) => CliError::Inconclusive(e.to_string()),
        _ => CliError::Rejected(e.to_string()),
    }
}
