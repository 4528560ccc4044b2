use std::f64::consts::{FRAC_PI_2, PI};

use biphasic_core::charroots::{characteristic_c, find_roots, RootFamily};
use biphasic_core::kernels::{creep_m, relaxation_k};
use biphasic_core::material::{BiphasicSpectrum, MaterialFile, MaterialParams};
use biphasic_core::moduli::{self, FrequencyGrid, Spacing};
use biphasic_core::response::{self, LoadingProtocol, ProtocolKind, TimeGrid};

use crate::error::CliError;
use crate::table::{format_num, Cell, Table};
use crate::units;
use crate::{
    FamilyArg, FrequencyArgs, KernelArgs, MaterialArgs, ModuliArgs, ProtocolArg, RootsArgs, SimulateArgs, SpacingArg,
    SweepArgs, Truncation,
};

const MAX_TERMS: usize = 10_000;

fn n_terms(t: &Truncation) -> Result<usize, CliError> {
    if t.n_terms == 0 || t.n_terms > MAX_TERMS {
        return Err(CliError::usage(
            "n-terms",
            format!("must lie in 1..={MAX_TERMS}, got {}", t.n_terms),
        ));
    }
    Ok(t.n_terms)
}

fn required<'a>(field: &str, v: &'a Option<String>) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::usage(field, "required unless --config is given"))
}

fn material(a: &MaterialArgs) -> Result<MaterialParams, CliError> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let file: MaterialFile =
            serde_json::from_str(&text).map_err(|e| CliError::usage("config", format!("{}: {e}", path.display())))?;
        return Ok(MaterialParams::try_from(file)?);
    }
    let k_perm = units::plain("k-perm", required("k-perm", &a.k_perm)?)?;
    let radius = units::length("radius", required("radius", &a.radius)?)?;
    let height = units::length("height", required("height", &a.height)?)?;
    if let Some(e) = &a.youngs {
        let nu = a.nu.ok_or_else(|| CliError::usage("nu", "required with --youngs"))?;
        return Ok(MaterialParams::from_young_poisson(
            units::pressure("youngs", e)?,
            nu,
            k_perm,
            radius,
            height,
        )?);
    }
    match (&a.mu, &a.lambda) {
        (Some(mu), Some(lambda)) => Ok(MaterialParams::new(
            units::pressure("mu", mu)?,
            units::pressure("lambda", lambda)?,
            k_perm,
            radius,
            height,
        )?),
        _ => Err(CliError::usage(
            "material",
            "give --config, --mu with --lambda, or --youngs with --nu",
        )),
    }
}

fn material_meta(t: &mut Table, p: &MaterialParams, spec: &BiphasicSpectrum) -> Result<(), CliError> {
    let d = p.derive_constants()?;
    t.meta_num("mu_s_pa", p.mu_s);
    t.meta_num("lambda_s_pa", p.lambda_s);
    t.meta_num("k_perm", p.k_perm);
    t.meta_num("radius_m", p.radius_a);
    t.meta_num("height_m", p.height_h);
    t.meta_num("nu_s", d.nu_s);
    t.meta_num("H_A_pa", d.h_a);
    t.meta_num("E_s_pa", d.e_s);
    t.meta_num("t_g_s", d.t_g);
    t.meta_num("force_scale_n_per_m", p.force_scale()?);
    t.meta("n_terms", spec.n_terms());
    Ok(())
}

pub fn roots(a: &RootsArgs) -> Result<Table, CliError> {
    let n = n_terms(&a.truncation)?;
    let families: &[(RootFamily, &str)] = match a.family {
        FamilyArg::Alpha => &[(RootFamily::Relaxation, "alpha")],
        FamilyArg::Beta => &[(RootFamily::Retardation, "beta")],
        FamilyArg::Both => &[(RootFamily::Relaxation, "alpha"), (RootFamily::Retardation, "beta")],
    };
    let mut columns = vec!["n".to_string()];
    let mut found = Vec::new();
    for &(family, name) in families {
        found.push(find_roots(family, a.nu, n)?);
        columns.push(name.to_string());
        columns.push(format!("{name}_residual"));
    }
    let mut table = Table::new(&columns.iter().map(String::as_str).collect::<Vec<_>>());
    table.meta("command", "roots");
    table.meta_num("nu_s", a.nu);
    for &(family, name) in families {
        table.meta_num(&format!("c_{name}"), characteristic_c(family, a.nu)?);
    }
    table.meta("n_terms", n);
    for i in 0..n {
        let mut row = vec![Cell::from(i + 1)];
        for r in &found {
            row.push(r.roots[i].into());
            row.push(r.residuals[i].into());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn kernel(a: &KernelArgs) -> Result<Table, CliError> {
    let p = material(&a.material)?;
    let spec = BiphasicSpectrum::from_material(&p, n_terms(&a.truncation)?)?;
    let t_g = spec.gel_time();
    let times: Vec<(f64, f64)> = match (&a.t, &a.t_hat) {
        (Some(t), _) => {
            let t = units::range("t", t)?;
            if t.iter().any(|&v| v < 0.0) {
                return Err(CliError::usage("t", "times must be non-negative"));
            }
            t.into_iter().map(|t| (t, if t == 0.0 { 0.0 } else { t / t_g })).collect()
        }
        (None, t_hat) => {
            let th = units::range("t-hat", t_hat.as_deref().unwrap_or("0:0.05:2"))?;
            if th.iter().any(|&v| v < 0.0) {
                return Err(CliError::usage("t-hat", "times must be non-negative"));
            }
            th.into_iter().map(|th| (th * t_g, th)).collect()
        }
    };
    let mut table = Table::new(&["t", "t_hat", "K", "M", "K_hat", "M_hat", "tail_bound"]);
    table.meta("command", "kernel");
    material_meta(&mut table, &p, &spec)?;
    let two = 2.0 * (1.0 + spec.nu_s());
    let mut capped = false;
    let mut max_terms = 0;
    for (t, t_hat) in times {
        let k = relaxation_k(t_hat, &spec, false)?;
        let m = creep_m(t_hat, &spec, false)?;
        capped |= k.cap_reached || m.cap_reached;
        max_terms = max_terms.max(k.n_terms_used).max(m.n_terms_used);
        table.push(vec![
            t.into(),
            t_hat.into(),
            (k.value / two).into(),
            (m.value * two).into(),
            k.value.into(),
            m.value.into(),
            k.tail_bound.max(m.tail_bound).into(),
        ]);
    }
    table.meta("max_terms_used", max_terms);
    if capped {
        table.meta("warning", "term cap reached; see tail_bound");
    }
    Ok(table)
}

fn frequencies(f: &FrequencyArgs) -> Result<Vec<f64>, CliError> {
    let omegas = if let Some(freq) = &f.freq {
        units::range("freq", freq)?.into_iter().map(|v| 2.0 * PI * v).collect()
    } else if let Some(omega) = &f.omega {
        units::range("omega", omega)?
    } else if let (Some(lo), Some(hi)) = (f.fmin, f.fmax) {
        let spacing = match f.spacing {
            SpacingArg::Log => Spacing::Log,
            SpacingArg::Linear => Spacing::Linear,
        };
        FrequencyGrid::new(2.0 * PI * lo, 2.0 * PI * hi, f.points, spacing)?.values()
    } else {
        return Err(CliError::usage("freq", "give --freq, --omega, or --fmin with --fmax"));
    };
    if omegas.iter().any(|&w| !(w >= 0.0)) {
        return Err(CliError::usage("freq", "frequencies must be non-negative"));
    }
    Ok(omegas)
}

pub fn moduli(a: &ModuliArgs) -> Result<Table, CliError> {
    let p = material(&a.material)?;
    let spec = BiphasicSpectrum::from_material(&p, n_terms(&a.truncation)?)?;
    let mut table = Table::new(&[
        "omega", "f_hz", "K1", "K2", "tan_delta", "M1", "M2", "K1_tilde", "M1_tilde",
    ]);
    table.meta("command", "moduli");
    material_meta(&mut table, &p, &spec)?;
    let mut tail: f64 = 0.0;
    for omega in frequencies(&a.frequency)? {
        let e = moduli::evaluate(omega, &spec)?;
        tail = tail.max(e.tail_bound);
        table.push(vec![
            omega.into(),
            (omega / (2.0 * PI)).into(),
            e.k1.into(),
            e.k2.into(),
            (e.k2 / e.k1).into(),
            e.m1.into(),
            e.m2.into(),
            e.k1_tilde.into(),
            e.m1_tilde.into(),
        ]);
    }
    table.meta_num("max_tail_bound", tail);
    Ok(table)
}

pub fn simulate(a: &SimulateArgs) -> Result<Table, CliError> {
    let p = material(&a.material)?;
    let spec = BiphasicSpectrum::from_material(&p, n_terms(&a.truncation)?)?;
    let kind = match a.protocol {
        ProtocolArg::CyclicDisplacement => ProtocolKind::CyclicDisplacement,
        ProtocolArg::CyclicForce => ProtocolKind::CyclicForce,
        ProtocolArg::HalfsineDisplacement => ProtocolKind::HalfsineDisplacement,
        ProtocolArg::HalfsineForce => ProtocolKind::HalfsineForce,
    };
    let omega = match (a.freq, a.omega) {
        (Some(f), _) => 2.0 * PI * f,
        (None, Some(w)) => w,
        (None, None) => return Err(CliError::usage("freq", "give --freq or --omega")),
    };
    let (amplitude, preoffset) = if kind.is_displacement_controlled() {
        let raw = a
            .w0
            .as_deref()
            .ok_or_else(|| CliError::usage("w0", format!("required for {kind}")))?;
        (units::length("w0", raw)?, units::length("preoffset", &a.preoffset)?)
    } else {
        let raw = a
            .f0
            .as_deref()
            .ok_or_else(|| CliError::usage("f0", format!("required for {kind}")))?;
        (units::force("f0", raw)?, units::force("preoffset", &a.preoffset)?)
    };
    let proto = LoadingProtocol::new(kind, omega, amplitude, preoffset)?;
    let grid = match &a.t {
        Some(t) => TimeGrid::Explicit(units::range("t", t)?),
        None => TimeGrid::Auto {
            end: None,
            per_period: a.per_period,
        },
    };
    let trace = response::simulate(&proto, &p, &spec, &grid)?;
    let mut table = Table::new(&["t", "input_value", "response_value"]);
    table.meta("command", "simulate");
    table.meta("protocol", kind);
    table.meta_num("omega", omega);
    table.meta_num("amplitude", amplitude);
    table.meta_num("preoffset", preoffset);
    table.meta(
        "units",
        if kind.is_displacement_controlled() {
            "input m, response N"
        } else {
            "input N, response m"
        },
    );
    material_meta(&mut table, &p, &spec)?;
    if kind.is_halfsine() {
        let t_m = FRAC_PI_2 / omega;
        table.meta_num("t_peak_input_s", t_m);
        table.meta_num("response_at_peak_input", response::respond(t_m, &proto, &p, &spec)?);
        table.meta_num("contact_duration_s", response::contact_duration(&proto, &spec)?);
    }
    if trace.beyond_loading {
        table.meta("warning", "samples past the end of loading continue the closed form");
    }
    for ((t, x), y) in trace.times.iter().zip(&trace.inputs).zip(&trace.values) {
        table.push(vec![(*t).into(), (*x).into(), (*y).into()]);
    }
    Ok(table)
}

pub fn sweep(a: &SweepArgs) -> Result<Table, CliError> {
    let p = material(&a.material)?;
    let spec = BiphasicSpectrum::from_material(&p, n_terms(&a.truncation)?)?;
    let w0 = units::length("w0", &a.w0)?;
    let f0 = units::force("f0", &a.f0)?;
    let mut table = Table::new(&[
        "omega",
        "f_hz",
        "K1",
        "K1_tilde",
        "M1",
        "M1_tilde",
        "peak_force_n",
        "displacement_at_peak_force_m",
        "contact_duration_s",
        "contact_fraction",
    ]);
    table.meta("command", "sweep");
    table.meta("w0_m", format_num(w0));
    table.meta("f0_n", format_num(f0));
    material_meta(&mut table, &p, &spec)?;
    for omega in frequencies(&a.frequency)? {
        if omega == 0.0 {
            return Err(CliError::usage("freq", "half-sine tests need positive frequencies"));
        }
        let e = moduli::evaluate(omega, &spec)?;
        let t_m = FRAC_PI_2 / omega;
        let disp = LoadingProtocol::new(ProtocolKind::HalfsineDisplacement, omega, w0, 0.0)?;
        let force = LoadingProtocol::new(ProtocolKind::HalfsineForce, omega, f0, 0.0)?;
        let duration = response::contact_duration(&disp, &spec)?;
        table.push(vec![
            omega.into(),
            (omega / (2.0 * PI)).into(),
            e.k1.into(),
            e.k1_tilde.into(),
            e.m1.into(),
            e.m1_tilde.into(),
            response::halfsine_displacement_test(t_m, &disp, &p, &spec)?.into(),
            response::halfsine_force_test(t_m, &force, &p, &spec)?.into(),
            duration.into(),
            (duration * omega / PI).into(),
        ]);
    }
    Ok(table)
}
