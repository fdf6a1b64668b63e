use std::collections::BTreeMap;

use minent_core::classify::{
    brieskorn_weights, even_form_realizable, form_of_word, theorem_d_decision, theorem_e_decision, tstructure_flags,
};
use minent_core::collapse::{lemma61_sweep, sweep, write_sweep_csv, CircleAction, CollapseFamily};
use minent_core::ellipticity::{group_growth_report, growth_report};
use minent_core::entropy::{
    chain_check, manning_upper_bound, mane_estimate, separated_set_estimate, volume_entropy, ChainInputs, ManeOptions,
    SeparatedOptions,
};
use minent_core::geodesic::{shoot_arcs, write_arcs_csv, ShootOptions};
use minent_core::geom::{curvature_bounds, CatalogTag};
use minent_core::{AbelianGroup, BardenIndex, ChartedMetric, FourManifoldWord, QuadratureSpec, SampleGrid};
use serde_json::{json, Value};

use crate::report::{CliError, Output};
use crate::*;

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Entropy(EntropyCommand::Mane(a)) => mane(a),
        Command::Entropy(EntropyCommand::Separated(a)) => separated(a),
        Command::Entropy(EntropyCommand::Volume(a)) => volume(a),
        Command::CollapseSweep(a) => collapse(a),
        Command::Lemma61Check(a) => lemma61(a),
        Command::TorGrowth(a) => tor_growth(a),
        Command::Classify4(a) => classify4(a),
        Command::Classify5(a) => classify5(a),
        Command::Brieskorn(a) => brieskorn(a),
        Command::ChainCheck(a) => chain(a),
        Command::Arcs(a) => arcs(a),
    }
}

fn metric(spec: &str) -> Result<ChartedMetric, CliError> {
    Ok(spec.parse::<ChartedMetric>()?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn mane(a: &ManeArgs) -> Result<Output, CliError> {
    positive("residual-threshold", a.residual_threshold)?;
    let m = metric(&a.metric)?;
    let opts = ManeOptions {
        pairs: a.pairs,
        t_max: a.t_max,
        seed: a.seed,
        grid: a.grid,
        resolution: a.resolution,
        residual_threshold: f64::INFINITY,
        ..ManeOptions::default()
    };
    let est = mane_estimate(&m, &opts)?;
    let mut fields = to_value(&est.report());
    fields["metric"] = a.metric.clone().into();
    fields["Tmax"] = a.t_max.into();
    let mut out = Output::json("entropy mane", fields);
    if let Some(fit) = &est.fit {
        if fit.residual > a.residual_threshold {
            out.warn(format!("growth fit residual {} exceeds {}; increase --Tmax", fit.residual, a.residual_threshold));
        }
    }
    if !est.within_brackets(a.bracket_tolerance) {
        out.warn(format!("estimate {} lies outside [λ, upper] by more than {}", est.value, a.bracket_tolerance));
    }
    Ok(out)
}

fn separated(a: &SeparatedArgs) -> Result<Output, CliError> {
    let m = metric(&a.metric)?;
    let opts = SeparatedOptions {
        epsilon: a.epsilon,
        t: a.t_max,
        samples: a.samples,
        seed: a.seed,
        speed: a.speed,
        checkpoints: a.checkpoints,
        step: a.step,
    };
    let est = separated_set_estimate(&m, &opts)?;
    Ok(Output::json(
        "entropy separated",
        json!({ "metric": a.metric, "method": "separated", "h": est.value, "estimate": est, "options": opts }),
    ))
}

fn volume(a: &VolumeArgs) -> Result<Output, CliError> {
    let m = metric(&a.metric)?;
    let lambda = volume_entropy(&m)?;
    let report = curvature_bounds(&m, &SampleGrid::uniform(a.per_axis))?;
    let manning = manning_upper_bound(&report);
    Ok(Output::json(
        "entropy volume",
        json!({ "metric": a.metric, "method": "volume_entropy", "lambda": lambda, "upper": manning.coarse, "manning": manning, "curvature": report }),
    ))
}

fn collapse(a: &CollapseArgs) -> Result<Output, CliError> {
    let base = metric(&a.metric)?;
    let action = match (base.tag(), &a.direction) {
        (CatalogTag::RoundSphere { .. }, None) => CircleAction::sphere_rotation(),
        (CatalogTag::FlatTorus { sides }, Some(d)) => CircleAction::torus_translation(&sides, d)?,
        (CatalogTag::FlatTorus { .. }, None) => {
            return Err(CliError::Validation("a torus base needs --direction".into()));
        }
        (CatalogTag::RoundSphere { .. }, Some(_)) => {
            return Err(CliError::Validation("--direction applies to torus bases only".into()));
        }
        _ => return Err(CliError::Validation("collapse-sweep supports sphere and torus bases".into())),
    };
    let family = CollapseFamily::new(base, action, a.deltas.clone())?;
    let grid = family.avoiding_grid(a.per_axis, a.rho);
    let spec = QuadratureSpec { order: a.order, panels: a.panels, ..QuadratureSpec::default() };
    let summary = sweep(&family, &a.deltas, &grid, a.rho, &spec)?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &summary.rows).map_err(|e| CliError::Io(e.to_string()))?;
    let mut fields = to_value(&summary);
    fields["metric"] = a.metric.clone().into();
    let mut out = Output::json("collapse-sweep", fields).with_csv(csv, Format::Csv);
    if !summary.volume_monotone {
        out.warn("volume is not monotone in δ");
    }
    if !summary.volume_bounded {
        out.warn("volume exceeds the base volume");
    }
    if !summary.curvature_finite {
        out.warn("curvature is not finite on the sample grid");
    }
    Ok(out)
}

fn lemma61(a: &LemmaArgs) -> Result<Output, CliError> {
    let s = lemma61_sweep(a.samples, a.max_l, a.seed)?;
    let mut out = Output::json("lemma61-check", to_value(&s));
    if s.projection_failures + s.quotient_failures > 0 {
        out.warn(format!("{} projection and {} quotient verdicts failed", s.projection_failures, s.quotient_failures));
    }
    Ok(out)
}

fn parse_fields(s: &str) -> Result<BTreeMap<String, u64>, CliError> {
    let mut map = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Validation(format!("expected FIELD=a, got {part:?}")))?;
        let k = k.trim();
        let ok = k == "Q" || k.strip_prefix('F').is_some_and(|p| p.parse::<u64>().is_ok_and(|p| p >= 2));
        if !ok {
            return Err(CliError::Validation(format!("unknown field {k:?}; use Q or Fp")));
        }
        let v = v.trim().parse().map_err(|_| CliError::Validation(format!("not a dimension: {v:?}")))?;
        map.insert(k.to_string(), v);
    }
    if map.is_empty() {
        return Err(CliError::Validation("no fields given".into()));
    }
    Ok(map)
}

fn tor_growth(a: &TorArgs) -> Result<Output, CliError> {
    let report = match (&a.a, &a.h2, &a.fields) {
        (Some(v), None, None) => growth_report(BTreeMap::from([("k".to_string(), *v)]), a.n),
        (None, Some(h2), None) => group_growth_report(&h2.parse::<AbelianGroup>()?, a.n),
        (None, None, Some(f)) => growth_report(parse_fields(f)?, a.n),
        _ => return Err(CliError::Validation("give exactly one of --a, --h2 or --fields".into())),
    };
    let mut fields = to_value(&report);
    if let Some(h2) = &a.h2 {
        fields["h2"] = h2.clone().into();
    }
    Ok(Output::json("tor-growth", fields))
}

fn classify4(a: &Classify4Args) -> Result<Output, CliError> {
    if let Some(spec) = &a.even_form {
        let bad = || CliError::Validation(format!("expected k,l, got {spec:?}"));
        let (k, l) = spec.split_once(',').ok_or_else(bad)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        let l: u64 = l.trim().parse().map_err(|_| bad())?;
        let verdict = even_form_realizable(k, l);
        let mut fields = to_value(&verdict);
        fields["input"] = format!("{k}E8+{l}H").into();
        return Ok(Output::json("classify4", fields));
    }
    let word: FourManifoldWord = a.word.as_deref().unwrap_or_default().parse()?;
    let d = theorem_d_decision(&word);
    let form = form_of_word(&word);
    let mut fields = to_value(&d);
    fields["form"] = json!({ "rank": form.rank(), "signature": form.signature(), "parity": form.parity() });
    // connected sums of the generators carry rank-zero T-structures; a
    // polarized one would force χ = 2 + b₂ to vanish
    fields["t_structure"] = true.into();
    fields["polarized"] = false.into();
    Ok(Output::json("classify4", fields))
}

fn classify5(a: &Classify5Args) -> Result<Output, CliError> {
    let h2: AbelianGroup = a.h2.parse()?;
    let i: BardenIndex = a.i.parse()?;
    let d = theorem_e_decision(&h2, i)?;
    let flags = tstructure_flags(&h2, i)?;
    let mut fields = to_value(&d);
    fields["t_structure"] = flags.t_structure.into();
    fields["polarized"] = to_value(&flags.polarized);
    fields["flags"] = to_value(&flags);
    Ok(Output::json("classify5", fields))
}

fn brieskorn(a: &BrieskornArgs) -> Result<Output, CliError> {
    let e: [u64; 4] = a.exponents.clone().try_into().map_err(|_| CliError::Validation("need four exponents".into()))?;
    Ok(Output::json("brieskorn", to_value(&brieskorn_weights(e)?)))
}

fn chain(a: &ChainArgs) -> Result<Output, CliError> {
    let m = a.metric.as_deref().map(metric).transpose()?;
    let n = match (a.n, &m) {
        (Some(n), _) => n,
        (None, Some(m)) => m.dim(),
        (None, None) => return Err(CliError::Validation("give --n or --metric".into())),
    };
    let lambda = match (a.lambda, &m) {
        (Some(l), _) => l,
        (None, Some(m)) => volume_entropy(m)?,
        (None, None) => return Err(CliError::Validation("give --lambda or --metric".into())),
    };
    let h = match (a.h, &m) {
        (Some(h), _) => h,
        (None, Some(m)) => mane_estimate(m, &ManeOptions { t_max: a.t_max, seed: a.seed, ..ManeOptions::default() })?.value,
        (None, None) => return Err(CliError::Validation("give --h or --metric".into())),
    };
    let inputs = ChainInputs {
        simplicial_volume: a.simplicial_volume,
        c_n: a.c_n,
        min_vol: a.min_vol,
        tolerance: a.tolerance,
        ..ChainInputs::new(n, lambda, h)
    };
    let report = chain_check(&inputs);
    let mut fields = to_value(&report);
    fields["consistent"] = report.consistent().into();
    let mut out = Output::json("chain-check", fields);
    if !report.consistent() {
        out.warn("a link of the chain fails beyond the tolerance");
    }
    Ok(out)
}

fn arcs(a: &ArcsArgs) -> Result<Output, CliError> {
    let m = metric(&a.metric)?;
    let opts = ShootOptions { check_resolution: a.check_resolution, ..ShootOptions::default() };
    let arcs = shoot_arcs(&m, (0, &a.p), (0, &a.q), a.t_max, a.resolution, &opts)?;
    let mut csv = Vec::new();
    write_arcs_csv(&mut csv, &arcs).map_err(|e| CliError::Io(e.to_string()))?;
    let list: Vec<Value> = arcs
        .iter()
        .map(|arc| json!({ "length": arc.length, "angle": arc.angle, "direction": arc.direction, "endpoint_error": arc.endpoint_error }))
        .collect();
    Ok(Output::json(
        "arcs",
        json!({ "metric": a.metric, "p": a.p, "q": a.q, "Tmax": a.t_max, "n_T": arcs.len(), "arcs": list }),
    )
    .with_csv(csv, Format::Json))
}
