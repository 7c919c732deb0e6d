use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::args::{AlphabetArgs, Cli, Command};
use super::scenario::{density, read_json, read_text, Scenario};
use super::{fmt_f64, CliError, Outcome, ReportBuilder, Result, Table};
use crate::fsm::format::{MachineDoc, TraceDoc};
use crate::fsm::{self, Machine, Symbol, Trace};
use crate::nogo::{self, ChshSetting};
use crate::observation::{self, ObserverModel};
use crate::quantum::random::{ginibre_density, random_povm, random_unitary_state};
use crate::quantum::{overlap, Povm, StateVector, Tensor};

const CHSH_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-12;

pub(super) fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Witness { trace, alphabets } => witness(cli, trace, alphabets),
        Command::Enumerate { trace, alphabets } => enumerate(cli, trace, alphabets),
        Command::Distinguish {
            machine_a,
            machine_b,
        } => distinguish(cli, machine_a, machine_b),
        Command::Minimize { machine } => minimize(cli, machine),
        Command::Chsh { config, shots } => chsh(cli, config.as_deref(), *shots),
        Command::Ks => ks(cli),
        Command::Noclone {
            config,
            trace,
            random_pairs,
        } => noclone(cli, config.as_deref(), trace.as_deref(), *random_pairs),
        Command::Exchange { config } => exchange(cli, config.as_deref()),
        Command::Geiger { config, samples } => geiger(cli, config.as_deref(), *samples),
    }
}

fn rng(cli: &Cli) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cli.seed)
}

fn symbols(v: &Option<Vec<String>>) -> Option<Vec<Symbol>> {
    v.as_ref().map(|v| v.iter().map(|s| Symbol::new(s.as_str())).collect())
}

fn load_trace(path: &Path, alphabets: &AlphabetArgs) -> Result<Trace> {
    let text = read_text(path)?;
    let doc = TraceDoc::parse(&text).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    doc.into_trace(symbols(&alphabets.inputs), symbols(&alphabets.outputs))
        .map_err(|e| CliError::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })
}

fn load_machine(path: &Path) -> Result<Machine> {
    let doc: MachineDoc = read_json(path)?;
    Machine::try_from(doc).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn trace_echo(path: &Path, trace: &Trace) -> Value {
    json!({
        "trace": path.display().to_string(),
        "outputs": trace.output_symbols(),
        "inputs": trace.input_symbols(),
        "input_alphabet": trace.input_alphabet(),
        "output_alphabet": trace.output_alphabet(),
    })
}

fn render_outputs(m: &Machine, run: &[usize]) -> String {
    run.iter().map(|&o| m.outputs().symbol(o).as_str()).collect::<Vec<_>>().join(" ")
}

fn witness(cli: &Cli, path: &Path, alphabets: &AlphabetArgs) -> Result<Outcome> {
    let trace = load_trace(path, alphabets)?;
    let pair = fsm::witness_moore(&trace)?;
    let mut b = ReportBuilder::new("witness", cli.seed, trace_echo(path, &trace));
    b.check("machine_a_consistent", fsm::consistent(&pair.machine_a, &trace)?)
        .check("machine_b_consistent", fsm::consistent(&pair.machine_b, &trace)?)
        .check("not_equivalent", !fsm::equivalent(&pair.machine_a, &pair.machine_b)?)
        .check(
            "experiment_separates",
            pair.separating.separates(&pair.machine_a, &pair.machine_b)?,
        );

    let mut table = Table::new(&["word", "outputs_a", "outputs_b"]);
    let mut experiment = Vec::new();
    for word in pair.separating.words() {
        let rendered = pair.machine_a.inputs().render_word(word);
        let ra = render_outputs(&pair.machine_a, &pair.machine_a.run(word)?);
        let rb = render_outputs(&pair.machine_b, &pair.machine_b.run(word)?);
        table.push(vec![rendered.clone(), ra.clone(), rb.clone()]);
        experiment.push(json!({ "word": rendered, "outputs_a": ra, "outputs_b": rb }));
    }
    let results = json!({
        "machine_a": MachineDoc::from(&pair.machine_a),
        "machine_b": MachineDoc::from(&pair.machine_b),
        "separating_experiment": experiment,
    });
    Ok(b.finish(results, table))
}

fn enumerate(cli: &Cli, path: &Path, alphabets: &AlphabetArgs) -> Result<Outcome> {
    let trace = load_trace(path, alphabets)?;
    let max = cli.max_states;
    if max == 0 {
        return Err(CliError::Config("--max-states must be at least 1".into()));
    }
    let machines = fsm::enumerate_consistent(&trace, max)?;
    let counts: Vec<usize> = (1..=max)
        .map(|n| machines.iter().filter(|m| m.state_count() <= n).count())
        .collect();

    let mut inputs = trace_echo(path, &trace);
    inputs["max_states"] = json!(max);
    let mut b = ReportBuilder::new("enumerate", cli.seed, inputs);
    b.check("counts_nondecreasing", counts.windows(2).all(|w| w[0] <= w[1]));
    b.check(
        "all_consistent",
        machines.iter().try_fold(true, |ok, m| Ok::<_, CliError>(ok && fsm::consistent(m, &trace)?))?,
    );

    let mut table = Table::new(&["bound", "count"]);
    let per_bound: Vec<Value> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            table.push(vec![(i + 1).to_string(), c.to_string()]);
            json!({ "bound": i + 1, "count": c })
        })
        .collect();
    let results = json!({
        "counts": per_bound,
        "machines": machines.iter().map(MachineDoc::from).collect::<Vec<_>>(),
    });
    Ok(b.finish(results, table))
}

fn distinguish(cli: &Cli, pa: &Path, pb: &Path) -> Result<Outcome> {
    let a = load_machine(pa)?;
    let b_machine = load_machine(pb)?;
    let experiment = fsm::distinguishing_experiment(&a, &b_machine)?;
    let mut b = ReportBuilder::new(
        "distinguish",
        cli.seed,
        json!({ "machine_a": pa.display().to_string(), "machine_b": pb.display().to_string() }),
    );
    let mut table = Table::new(&["word", "outputs_a", "outputs_b"]);
    let results = match &experiment {
        Some(e) => {
            b.check("experiment_separates", e.separates(&a, &b_machine)?);
            let word = &e.words()[0];
            let rendered = a.inputs().render_word(word);
            let ra = render_outputs(&a, &a.run(word)?);
            let rb = render_outputs(&b_machine, &b_machine.run(word)?);
            table.push(vec![rendered.clone(), ra.clone(), rb.clone()]);
            json!({ "equivalent": false, "word": rendered, "length": word.len(),
                    "outputs_a": ra, "outputs_b": rb })
        }
        None => json!({ "equivalent": true, "word": Value::Null }),
    };
    Ok(b.finish(results, table))
}

fn minimize(cli: &Cli, path: &Path) -> Result<Outcome> {
    let m = load_machine(path)?;
    let min = fsm::minimize(&m);
    let mut b = ReportBuilder::new(
        "minimize",
        cli.seed,
        json!({ "machine": path.display().to_string(), "states": m.state_count() }),
    );
    b.check("equivalent_to_input", fsm::equivalent(&m, &min)?)
        .check("idempotent", fsm::minimize(&min) == min);
    let mut table = Table::new(&["state", "output", "transitions"]);
    for s in 0..min.state_count() {
        let targets: Vec<String> = min.transitions()[s].iter().map(usize::to_string).collect();
        table.push(vec![
            s.to_string(),
            min.outputs().symbol(min.output(s)).to_string(),
            targets.join(" "),
        ]);
    }
    let results = json!({
        "original_states": m.state_count(),
        "minimal_states": min.state_count(),
        "machine": MachineDoc::from(&min),
    });
    Ok(b.finish(results, table))
}

fn chsh(cli: &Cli, config: Option<&Path>, shots: Option<usize>) -> Result<Outcome> {
    use std::f64::consts::{PI, SQRT_2};
    let scenario = Scenario::load_optional(config)?;
    let mut setting = ChshSetting::tsirelson();
    let mut custom_state = false;
    if let Some(doc) = &scenario.chsh {
        [setting.a, setting.a_prime, setting.b, setting.b_prime] = doc.angles;
        if let Some(state) = &doc.state {
            setting.state = density("chsh.state", state)?;
            custom_state = true;
        }
    }
    let tol = cli.tol.unwrap_or(CHSH_TOL);
    let s = nogo::chsh_value(&setting)?;
    let lhv = nogo::lhv_chsh_bound();
    let exceeds = s.abs() > f64::from(lhv.max_abs) + tol;

    let mut b = ReportBuilder::new(
        "chsh",
        cli.seed,
        json!({
            "config": config.map(|p| p.display().to_string()),
            "angles": [setting.a, setting.a_prime, setting.b, setting.b_prime],
            "state": if custom_state { "custom" } else { "singlet" },
            "shots": shots,
        }),
    );
    b.check("lhv_bound_is_two", lhv.max_abs == 2)
        .check("lhv_strategies_reaching_two", lhv.achieving_max == 8)
        .check("tsirelson_respected", s.abs() <= 2.0 * SQRT_2 + tol)
        .check("quantum_exceeds_lhv", exceeds);

    // Closed-form cross-check on a 10x10 angle grid for the built-in singlet.
    if !custom_state {
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let (x, y) = (i as f64 * PI / 5.0, j as f64 * PI / 5.0);
                let e = nogo::correlator(&setting.state, x, y)?;
                worst = worst.max((e + (x - y).cos()).abs());
            }
        }
        b.check("closed_form_agreement", worst <= tol);
    }

    let sampled = shots
        .map(|n| nogo::chsh_sampled(&setting, n, &mut rng(cli)))
        .transpose()?;

    let mut table = Table::new(&["phi", "a", "a_prime", "b", "b_prime", "s"]);
    for k in 0..=100 {
        let phi = k as f64 * PI / 100.0;
        let sweep = ChshSetting {
            a: 0.0,
            a_prime: 2.0 * phi,
            b: phi,
            b_prime: 3.0 * phi,
            state: setting.state.clone(),
        };
        let v = nogo::chsh_value(&sweep)?;
        table.push(
            [phi, sweep.a, sweep.a_prime, sweep.b, sweep.b_prime, v]
                .map(fmt_f64)
                .to_vec(),
        );
    }

    let results = json!({
        "s": s,
        "abs_s": s.abs(),
        "tsirelson_bound": 2.0 * SQRT_2,
        "lhv_max_abs": lhv.max_abs,
        "lhv_strategies_reaching_max": lhv.achieving_max,
        "lhv_table": lhv.table.iter().map(|(st, v)| json!({ "strategy": st, "s": v })).collect::<Vec<_>>(),
        "sampled_s": sampled,
        "verdict": if exceeds { "quantum exceeds LHV" } else { "within LHV bound" },
        "note": "Enlarging the system to include a classical channel between the two \
                 measurement sites changes what counts as local; that reading is \
                 interpretive and is not computed here.",
    });
    Ok(b.finish(results, table))
}

fn ks(cli: &Cli) -> Result<Outcome> {
    let r = nogo::kochen_specker_check();
    let tol = cli.tol.unwrap_or(EXACT_TOL);
    let mut b = ReportBuilder::new("ks", cli.seed, json!({ "square": "peres-mermin" }));
    b.check("observables_square_to_identity", r.max_observable_deviation <= tol)
        .check("lines_commute", r.max_commutator <= tol)
        .check("products_are_plus_minus_identity", r.max_product_deviation() <= tol)
        .check("rows_plus", r.row_products.iter().all(|p| p.sign == 1))
        .check(
            "columns_plus_plus_minus",
            r.column_products.map(|p| p.sign) == [1, 1, -1],
        )
        .check("no_classical_assignment", r.satisfying_assignments == 0);
    let mut table = Table::new(&["line", "index", "sign", "deviation"]);
    for (kind, products) in [("row", &r.row_products), ("column", &r.column_products)] {
        for (i, p) in products.iter().enumerate() {
            table.push(vec![kind.into(), i.to_string(), p.sign.to_string(), fmt_f64(p.deviation)]);
        }
    }
    let results = serde_json::to_value(&r).expect("report serializes");
    Ok(b.finish(results, table))
}

fn noclone(
    cli: &Cli,
    config: Option<&Path>,
    trace_path: Option<&Path>,
    random_pairs: usize,
) -> Result<Outcome> {
    let scenario = Scenario::load_optional(config)?;
    let tol = cli.tol.unwrap_or(EXACT_TOL);

    let mut pairs: Vec<(String, StateVector, StateVector)> = match &scenario.noclone {
        Some(doc) => doc
            .pairs
            .iter()
            .enumerate()
            .map(|(i, [p, q])| {
                let conv = |d: &crate::quantum::format::StateDoc| {
                    d.to_state()
                        .map_err(|e| CliError::Config(format!("noclone.pairs[{i}]: {e}")))
                };
                Ok((format!("config_{i}"), conv(p)?, conv(q)?))
            })
            .collect::<Result<_>>()?,
        None => {
            let zero = StateVector::basis(2, 0);
            vec![
                ("orthogonal".into(), zero.clone(), StateVector::basis(2, 1)),
                ("identical".into(), zero.clone(), zero.clone()),
                ("overlap_0.6".into(), zero, StateVector::from_real(&[0.6, 0.8])?),
            ]
        }
    };
    let mut r = rng(cli);
    for i in 0..random_pairs {
        let dim = pairs.first().map_or(2, |p| p.1.dim());
        pairs.push((
            format!("random_{i}"),
            random_unitary_state(dim, &mut r),
            random_unitary_state(dim, &mut r),
        ));
    }

    let mut rows = Vec::with_capacity(pairs.len());
    let mut zero_iff_trivial = true;
    for (name, psi, phi) in &pairs {
        let o = overlap(psi, phi)?.norm();
        let gap = nogo::no_cloning_gap(psi, phi)?;
        let trivial = o <= tol || o >= 1.0 - tol;
        zero_iff_trivial &= (gap <= tol) == trivial;
        rows.push((name.clone(), o, gap));
    }

    let trace = match trace_path {
        Some(p) => load_trace(p, &AlphabetArgs::default())?,
        None => Trace::autonomous(
            fsm::Alphabet::of(&["0", "1"]),
            &[Symbol::from(0), Symbol::from(1)],
        )?,
    };
    let analogue = nogo::clone_inference_report(&trace)?;

    let mut b = ReportBuilder::new(
        "noclone",
        cli.seed,
        json!({
            "config": config.map(|p| p.display().to_string()),
            "trace": trace_path.map(|p| p.display().to_string()),
            "random_pairs": random_pairs,
        }),
    );
    b.check("gap_zero_iff_orthogonal_or_parallel", zero_iff_trivial)
        .check("gap_nonnegative", rows.iter().all(|r| r.2 >= -tol))
        .check("records_identical", analogue.record_identical)
        .check("machines_distinguishable", analogue.distinguishable);

    let mut table = Table::new(&["t", "overlap", "gap"]);
    for k in 0..=90 {
        let t = (k as f64).to_radians();
        let psi = StateVector::basis(2, 0);
        let phi = nogo::qubit_at(t);
        let o = overlap(&psi, &phi)?.norm();
        table.push(vec![fmt_f64(t), fmt_f64(o), fmt_f64(nogo::no_cloning_gap(&psi, &phi)?)]);
    }

    let results = json!({
        "pairs": rows.iter().map(|(n, o, g)| json!({
            "name": n, "overlap": o, "gap": g, "single_unitary_can_clone_both": *g <= tol,
        })).collect::<Vec<_>>(),
        "record_analogue": analogue,
    });
    Ok(b.finish(results, table))
}

fn exchange(cli: &Cli, config: Option<&Path>) -> Result<Outcome> {
    let scenario = Scenario::load_optional(config)?;
    let tol = cli.tol.unwrap_or(EXACT_TOL);
    let mut r = rng(cli);

    let observer = match scenario.observer()? {
        Some(o) => o,
        None => ObserverModel::new(
            2,
            vec![
                ("Z".into(), Povm::computational(2)),
                ("X".into(), Povm::qubit_x()),
                ("random".into(), random_povm(2, 3, &mut r)),
            ],
        )?,
    };
    let dim = observer.env_dim();
    let rho = match scenario.state()? {
        Some(s) => s,
        None => ginibre_density(dim, &mut r),
    };
    if rho.dim() != dim {
        return Err(CliError::Config(format!(
            "state: dimension {} does not match observer env_dim {dim}",
            rho.dim()
        )));
    }
    let envs = match scenario.environments()? {
        Some(e) => e,
        None => vec![ginibre_density(2, &mut r), ginibre_density(2, &mut r)],
    };
    if envs.is_empty() {
        return Err(CliError::Config("environments: at least one is required".into()));
    }

    let reference = observation::outcome_statistics(&rho, &observer)?;
    let mut b = ReportBuilder::new(
        "exchange",
        cli.seed,
        json!({
            "config": config.map(|p| p.display().to_string()),
            "env_dim": dim,
            "povms": observer.povms().iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "environment_dims": envs.iter().map(|e| e.dim()).collect::<Vec<_>>(),
            "tolerance": tol,
        }),
    );
    let mut table = Table::new(&["environment", "povm", "outcome", "p_reference", "p_composite"]);
    let mut comparisons = Vec::new();
    for (i, env) in envs.iter().enumerate() {
        let lifted = observer.lift(env.dim())?;
        let stats = observation::outcome_statistics(&rho.tensor(env), &lifted)?;
        let cmp = observation::indistinguishable(&reference, &stats, tol)?;
        b.check(&format!("indistinguishable_env_{i}"), cmp.indistinguishable);
        for (name, dist) in &reference {
            for (k, label) in dist.labels.iter().enumerate() {
                table.push(vec![
                    i.to_string(),
                    name.clone(),
                    label.clone(),
                    fmt_f64(dist.probabilities[k]),
                    fmt_f64(stats[name].probabilities[k]),
                ]);
            }
        }
        comparisons.push(json!({ "environment": i, "comparison": cmp, "statistics": stats }));
    }
    let results = json!({ "reference": reference, "composites": comparisons });
    Ok(b.finish(results, table))
}

fn geiger(cli: &Cli, config: Option<&Path>, samples: Option<usize>) -> Result<Outcome> {
    let scenario = Scenario::load_optional(config)?;
    let detector = scenario.detector()?;
    let sources = scenario.sources()?;
    let mut r = rng(cli);

    let mut b = ReportBuilder::new(
        "geiger",
        cli.seed,
        json!({
            "config": config.map(|p| p.display().to_string()),
            "detector": detector,
            "sources": sources.iter().map(|s| json!({ "name": s.name, "source": s.source })).collect::<Vec<_>>(),
            "samples": samples,
        }),
    );
    let mut table = Table::new(&["name", "activity", "distance", "yield", "rate", "outcome"]);
    let mut records = Vec::new();
    for s in &sources {
        let rate = observation::expected_rate(&s.source, &detector);
        let outcome = observation::geiger_outcome(&s.source, &detector);
        b.check(&format!("within_saturation_{}", s.name), outcome <= detector.saturation);
        table.push(vec![
            s.name.clone(),
            fmt_f64(s.source.activity),
            fmt_f64(s.source.distance),
            fmt_f64(s.source.photon_yield),
            fmt_f64(rate),
            outcome.to_string(),
        ]);
        let sampled = samples.map(|n| observation::geiger_samples(&s.source, &detector, n, &mut r));
        records.push(json!({
            "name": s.name, "rate": rate, "outcome": outcome, "samples": sampled,
        }));
    }
    let exchange = (sources.len() >= 2).then(|| {
        observation::exchange_witness(&sources[0].source, &sources[1].source, &detector)
    });
    if let Some(x) = &exchange {
        b.check("records_equal", x.records_equal)
            .check("configurations_distinct", x.configurations_distinct);
    }
    let results = json!({
        "records": records,
        "exchange": exchange,
        "verdict": match &exchange {
            Some(x) if x.exchangeable() => "distinct sources leave identical records",
            Some(x) if x.records_equal => "identical configurations",
            Some(_) => "records differ",
            None => "single source",
        },
    });
    Ok(b.finish(results, table))
}
