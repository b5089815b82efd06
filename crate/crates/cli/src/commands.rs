//! One function per subcommand, each producing a [`JobReport`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use toric_k::cech::ExactnessOutcome;
use toric_k::lattice::IntVec;
use toric_k::{
    coset_decomposition, hilbert_basis, k0_affine_toric, k0_class, AffineMonoid, CechComplex, CechError,
    CoefficientSpec, Fan, FanSheaf, FlasqueOutcome, GradedFreeData, GroupRingElement, SheafError,
};

use crate::fanfile::{load, LoadedFan};
use crate::report::{self, ExitStatus, JobReport};
use crate::{Cli, CliError, Command};

/// Runs a parsed command line. Input errors become a report with exit status 2.
pub fn run(cli: &Cli) -> JobReport {
    let name = command_name(&cli.command);
    let mut report = JobReport::new(name);
    let outcome = match &cli.command {
        Command::Info { fan } => info(&mut report, fan),
        Command::K0Affine { fan, cone, coeff } => k0_affine(&mut report, fan, cone, coeff),
        Command::K0Global { fan, element } => k0_global(&mut report, cli, fan, element.as_deref()),
        Command::CheckExactness { fan, level } => check_exactness(&mut report, cli, fan, *level),
        Command::CheckFlasque { fan } => check_flasque(&mut report, cli, fan),
        Command::Hilbert { fan, cone, primal } => hilbert(&mut report, fan, cone, *primal),
        Command::Kclass {
            generators,
            fan,
            cone,
            shifts,
            coeff,
            symbolic,
        } => kclass(
            &mut report,
            generators.as_deref(),
            fan.as_deref(),
            cone.as_deref(),
            shifts,
            coeff,
            *symbolic,
        ),
    };
    if let Err(CliError::Input(msg)) = outcome {
        report.result("error", msg);
        report.exit_status = ExitStatus::InputError;
    }
    report
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Info { .. } => "info",
        Command::K0Affine { .. } => "k0-affine",
        Command::K0Global { .. } => "k0-global",
        Command::CheckExactness { .. } => "check-exactness",
        Command::CheckFlasque { .. } => "check-flasque",
        Command::Hilbert { .. } => "hilbert",
        Command::Kclass { .. } => "kclass",
    }
}

fn load_into(report: &mut JobReport, spec: &str) -> Result<LoadedFan, CliError> {
    report.input("fan", spec);
    let loaded = load(spec)?;
    report.warnings.extend(loaded.warnings.iter().cloned());
    Ok(loaded)
}

/// `"0,2"` or `"zero"` to a fan cone index.
pub fn parse_cone(fan: &Fan, spec: &str) -> Result<usize, CliError> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("zero") || spec.is_empty() {
        return Ok(fan.zero_cone());
    }
    let ids: Vec<usize> = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("bad cone {spec:?}: {e}")))?;
    fan.find(&ids)
        .ok_or_else(|| CliError::Input(format!("cone {spec:?} is not in the fan")))
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{what}:{}:{}: {e}", e.line(), e.column())))
}

fn to_vecs(rows: &[Vec<i64>], rank: usize, what: &str) -> Result<Vec<IntVec>, CliError> {
    rows.iter()
        .map(|r| {
            if r.len() != rank {
                Err(CliError::Input(format!(
                    "{what}: vector {r:?} does not have length {rank}"
                )))
            } else {
                Ok(r.iter().map(|&x| BigInt::from(x)).collect())
            }
        })
        .collect()
}

fn ray_ids(fan: &Fan, cone: usize) -> Value {
    json!(fan.cones()[cone].ray_ids)
}

fn info(report: &mut JobReport, spec: &str) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    report.result("name", fan.name().unwrap_or(""));
    report.result("lattice_rank", fan.rank());
    report.result("rays", report::int_rows(fan.rays()));
    report.result("smooth", fan.is_smooth());
    report.result("simplicial", fan.is_simplicial());
    report.result("complete", fan.is_complete().map_or(Value::Null, Value::Bool));
    let maxes: Vec<Value> = fan.max_cones().iter().map(|&m| ray_ids(&fan, m)).collect();
    report.result("max_cones", maxes);
    let cones: Vec<Value> = fan
        .cones()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let faces: Vec<Value> = fan.faces_of(i).iter().map(|&f| ray_ids(&fan, f)).collect();
            json!({
                "rays": c.ray_ids,
                "dim": c.cone.dim(),
                "smooth": c.cone.is_smooth(),
                "simplicial": c.cone.is_simplicial(),
                "m_sigma_rank": c.cone.m_sigma().dim(),
                "faces": faces,
            })
        })
        .collect();
    report.stat("cone_count", fan.len());
    report.result("cones", cones);
    Ok(())
}

fn k0_affine(report: &mut JobReport, spec: &str, cone: &str, coeff: &str) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    report.input("cone", cone);
    report.input("coeff", coeff);
    let c = parse_cone(&fan, cone)?;
    let k = k0_affine_toric(fan.cone(c), &CoefficientSpec::rank_one(coeff));
    report.result("cone", ray_ids(&fan, c));
    report.result("dim", fan.cone(c).dim());
    report.result("m_sigma", k.m_sigma.describe());
    report.result("m_sigma_rank", k.rank());
    report.result("group_ring", toric_k::graded_k::group_ring_name(&k.m_sigma));
    report.result("k_q", k.statement(0).to_string().replace("K_0", "K_q"));
    let basis: Vec<Value> = (0..k.rank())
        .map(|i| {
            let mut e = vec![BigInt::from(0); k.rank()];
            e[i] = BigInt::from(1);
            json!({
                "character": k.basis_characters()[i].to_string(),
                "m": report::int_vec(&k.m_sigma.lift(&e)),
            })
        })
        .collect();
    report.result("basis_characters", basis);
    let smooth = fan.cone(c).is_smooth();
    report.result("smooth", smooth);
    if !smooth {
        report.result("note", "the cone is singular; the description does not use smoothness");
    }
    Ok(())
}

/// One `[[m, coeff], ...]` list per maximal cone.
type TupleInput = Vec<Vec<(Vec<i64>, i64)>>;

fn k0_global(report: &mut JobReport, cli: &Cli, spec: &str, element: Option<&str>) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    if !fan.is_smooth() {
        report
            .warnings
            .push("fan is not smooth; Ȟ⁰ is computed but is not asserted to be K₀ᵀ(X)".to_string());
    }
    let complex = CechComplex::build(&fan);
    let h = complex.h0();
    let n = fan.max_cones().len();
    let Some(text) = element else {
        report.input("samples", cli.options.trials);
        report.input("seed", cli.options.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(cli.options.seed);
        let mut all = true;
        let mut samples = Vec::new();
        for _ in 0..cli.options.trials {
            let m: IntVec = (0..fan.rank())
                .map(|_| BigInt::from(rng.random_range(-4..=4)))
                .collect();
            let x = h.character_tuple(&m).map_err(|e| CliError::Input(e.to_string()))?;
            let member = h.contains(&x);
            all &= member;
            let parts: Vec<Value> = (0..n).map(|i| report::element(&h.component(&x, i))).collect();
            samples.push(json!({ "m": report::int_vec(&m), "components": parts, "member": member }));
        }
        report.result("all_members", all);
        report.certificates = samples;
        if !all {
            report.exit_status = ExitStatus::VerificationFailure;
        }
        return Ok(());
    };
    report.input("element", text);
    let parts: TupleInput = parse_json("element", text)?;
    if parts.len() != n {
        return Err(CliError::Input(format!(
            "element has {} components, the fan has {n} maximal cones",
            parts.len()
        )));
    }
    let mut comps = Vec::new();
    for (i, terms) in parts.iter().enumerate() {
        let group = complex.stalk_of(0, &[i]).expect("level 0");
        let mut x = GroupRingElement::zero(group);
        for (m, c) in terms {
            let v = to_vecs(std::slice::from_ref(m), fan.rank(), "element")?.remove(0);
            let t = GroupRingElement::character(group, &v)
                .map_err(|e| CliError::Input(e.to_string()))?
                .scale(&BigInt::from(*c));
            x = x.checked_add(&t).expect("same group");
        }
        comps.push(x);
    }
    let tuple = h.tuple(comps).map_err(|e| CliError::Input(e.to_string()))?;
    let member = h.contains(&tuple);
    report.result("member", member);
    let shown: Vec<Value> = (0..n)
        .map(|i| json!({ "cone": ray_ids(&fan, fan.max_cones()[i]), "value": h.component(&tuple, i).to_string() }))
        .collect();
    report.result("components", shown);
    if let Some((i, j)) = h.witness(&tuple) {
        let (a, b) = (fan.max_cones()[i], fan.max_cones()[j]);
        let meet = fan.meet(a, b);
        let sh = complex.sheaf();
        let fa = sh.restrict_element(&h.component(&tuple, i), meet, a);
        let fb = sh.restrict_element(&h.component(&tuple, j), meet, b);
        report.certificates.push(json!({
            "incompatible_pair": [ray_ids(&fan, a), ray_ids(&fan, b)],
            "common_face": ray_ids(&fan, meet),
            "restrictions": [report::element(&fa), report::element(&fb)],
            "restrictions_display": [fa.to_string(), fb.to_string()],
        }));
        report.exit_status = ExitStatus::VerificationFailure;
    }
    Ok(())
}

fn check_exactness(report: &mut JobReport, cli: &Cli, spec: &str, level: usize) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    let o = &cli.options;
    report.input("level", level);
    report.input("trials", o.trials);
    report.input("depth", o.depth);
    report.input("seed", o.seed);
    report.input("experimental_nonsmooth", o.experimental_nonsmooth);
    let complex = CechComplex::build(&fan);
    let r = complex
        .verify_exactness(level, o.trials, o.depth, o.seed, o.experimental_nonsmooth)
        .map_err(|e| match e {
            CechError::NotSmoothFan => {
                CliError::Input("the fan is not smooth; pass --experimental-nonsmooth to run anyway".to_string())
            }
            other => CliError::Input(other.to_string()),
        })?;
    report.result("solved", r.solved);
    report.result("gave_up", r.gave_up);
    report.result("failed", r.failed);
    report.result("d_squared_zero", r.d_squared_zero);
    let mut supports = Vec::new();
    for (i, t) in r.trials.iter().enumerate() {
        supports.push(t.cocycle.support_size());
        let mut cert = json!({ "trial": i, "cocycle": report::cochain(&fan, &t.cocycle, &complex) });
        match &t.outcome {
            ExactnessOutcome::Solved { preimage, verified } => {
                cert["preimage"] = report::cochain(&fan, preimage, &complex);
                cert["verified"] = json!(verified);
            }
            ExactnessOutcome::GaveUp { support_sizes } => {
                cert["gave_up"] = json!(support_sizes);
            }
        }
        report.certificates.push(cert);
    }
    report.stat("cocycle_support_sizes", supports);
    report.stat(
        "slots",
        (0..=complex.top_level())
            .map(|p| complex.slots(p).len())
            .collect::<Vec<_>>(),
    );
    report.exit_status = if r.failed > 0 || !r.d_squared_zero {
        ExitStatus::VerificationFailure
    } else if r.gave_up > 0 {
        ExitStatus::GaveUp
    } else {
        ExitStatus::Success
    };
    Ok(())
}

fn check_flasque(report: &mut JobReport, cli: &Cli, spec: &str) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    let o = &cli.options;
    report.input("trials", o.trials);
    report.input("depth", o.depth);
    report.input("seed", o.seed);
    report.input("experimental_nonsmooth", o.experimental_nonsmooth);
    let sheaf = FanSheaf::a0(&fan);
    let r = sheaf
        .verify_flasque(o.trials, o.depth, o.seed, o.experimental_nonsmooth)
        .map_err(|e| match e {
            SheafError::NotSmoothFan => {
                CliError::Input("the fan is not smooth; pass --experimental-nonsmooth to run anyway".to_string())
            }
            other => CliError::Input(other.to_string()),
        })?;
    report.result("extended", r.extended);
    report.result("gave_up", r.gave_up);
    report.result("failed", r.failed);
    let mut domain_sizes = Vec::new();
    for (i, t) in r.trials.iter().enumerate() {
        domain_sizes.push(t.section.domain().members().len());
        let mut cert = json!({ "trial": i, "section": report::section(&fan, &t.section) });
        match &t.outcome {
            FlasqueOutcome::Extended { extension, verified } => {
                cert["extension"] = report::section(&fan, extension);
                cert["verified"] = json!(verified);
            }
            FlasqueOutcome::GaveUp { support_sizes } => cert["gave_up"] = json!(support_sizes),
        }
        report.certificates.push(cert);
    }
    report.stat("domain_sizes", domain_sizes);
    report.exit_status = if r.failed > 0 {
        ExitStatus::VerificationFailure
    } else if r.gave_up > 0 {
        ExitStatus::GaveUp
    } else {
        ExitStatus::Success
    };
    Ok(())
}

fn hilbert(report: &mut JobReport, spec: &str, cone: &str, primal: bool) -> Result<(), CliError> {
    let fan = load_into(report, spec)?.fan;
    report.input("cone", cone);
    report.input("primal", primal);
    let c = parse_cone(&fan, cone)?;
    let sigma = fan.cone(c);
    let target = if primal { sigma.clone() } else { sigma.dual() };
    let basis = hilbert_basis(&target).map_err(|e| CliError::Input(e.to_string()))?;
    report.result("cone", ray_ids(&fan, c));
    report.result("rays", report::int_rows(target.rays()));
    report.result("lineality", report::int_rows(&target.lineality().row_vecs()));
    report.result("hilbert_basis", report::int_rows(&basis));
    report.stat("basis_size", basis.len());
    Ok(())
}

fn kclass(
    report: &mut JobReport,
    generators: Option<&str>,
    fan: Option<&str>,
    cone: Option<&str>,
    shifts: &str,
    coeff: &str,
    symbolic: bool,
) -> Result<(), CliError> {
    let monoid = match (generators, fan, cone) {
        (Some(g), _, _) => {
            report.input("generators", g);
            let rows: Vec<Vec<i64>> = parse_json("generators", g)?;
            let rank = rows.first().map_or(0, Vec::len);
            let gens = to_vecs(&rows, rank, "generators")?;
            AffineMonoid::from_generators(rank, &gens).map_err(|e| CliError::Input(e.to_string()))?
        }
        (None, Some(f), Some(c)) => {
            let fan = load_into(report, f)?.fan;
            report.input("cone", c);
            let idx = parse_cone(&fan, c)?;
            AffineMonoid::from_cone(fan.cone(idx)).map_err(|e| CliError::Input(e.to_string()))?
        }
        _ => {
            return Err(CliError::Input(
                "give either --generators or --fan with --cone".to_string(),
            ))
        }
    };
    let monoid = Arc::new(monoid);
    report.input("shifts", shifts);
    report.input("coeff", coeff);
    let rows: Vec<Vec<i64>> = parse_json("shifts", shifts)?;
    let shifts = to_vecs(&rows, monoid.rank(), "shifts")?;
    let spec = if symbolic {
        CoefficientSpec::symbolic(coeff)
    } else {
        CoefficientSpec::rank_one(coeff)
    };
    let data = GradedFreeData::new(&monoid, shifts).map_err(|e| CliError::Input(e.to_string()))?;
    let parts: BTreeMap<String, Value> = coset_decomposition(data.shifts(), &monoid)
        .into_iter()
        .map(|(k, v)| {
            (
                format!("[{}]", k.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
                report::int_rows(&v),
            )
        })
        .collect();
    report.result("coset_decomposition", serde_json::to_value(parts).expect("plain map"));
    report.result("units", report::int_rows(&monoid.unit_generators().row_vecs()));
    report.result("m_mod_units", monoid.coset_quotient().describe());
    let class = k0_class(&data, &spec).map_err(|e| CliError::Input(e.to_string()))?;
    report.result("class", class.to_string());
    report.result("terms", report::element(class.value()));
    report.result("virtual", class.is_virtual());
    report.result("k_q", class.statement(0).to_string().replace("K_0", "K_q"));
    Ok(())
}
