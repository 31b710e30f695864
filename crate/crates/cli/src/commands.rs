use std::io::Write;
use std::path::Path;

use serde::Serialize;
use swaysim::choice::{choice_probability, odds_ratio, polarity_mismatch, rank_options, Polarity};
use swaysim::estimation::{build_design_matrix, fit_logit, loo_cross_validate, InteractionSpec};
use swaysim::graph::{degree_stats, generate_power_law, load_edge_list, load_gml, DegreeStats};
use swaysim::montecarlo::{child_seed, dispersion_stats, histogram, run_ensemble, stochastic_dominance};
use swaysim::{
    io, ChoiceInstance, ChoiceModel, DispersionStats, DominanceReport, FitOptions, RankItem, RunConfig, SocialGraph,
};

use crate::args::{
    DynamicsArgs, FitArgs, GraphArgs, ModelArgs, PredictArgs, RankArgs, SimulateArgs, SweepArgs, ValidateArgs,
};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Seed used for `--power-law` graphs, fixed so the substrate does not move
/// with `--seed`.
const GRAPH_SEED: u64 = 1;

const NETSCIENCE_COUNTS: (usize, usize) = (1589, 2743);

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| {
        CliError::Core(swaysim::Error::Io {
            path: "<stdout>".into(),
            source: e,
        })
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    Ok(io::write_file(path, bytes)?)
}

fn resolve_model(args: &ModelArgs, default_preset: &str) -> Result<ChoiceModel> {
    Ok(match (&args.preset, args.alpha_s, args.alpha_f) {
        (Some(p), _, _) => ChoiceModel::preset(p)?,
        (None, Some(s), Some(f)) => ChoiceModel::new(s, f)?.labeled("custom"),
        _ => ChoiceModel::preset(default_preset)?,
    })
}

#[derive(Serialize)]
struct GraphInfo {
    source: String,
    nodes: usize,
    edges: usize,
}

fn load_graph(args: &GraphArgs) -> Result<(SocialGraph, GraphInfo)> {
    let (g, source) = match (&args.graph, args.power_law) {
        (Some(path), _) => {
            let is_gml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gml"));
            let g = if is_gml { load_gml(path)? } else { load_edge_list(path)? };
            (g, path.display().to_string())
        }
        (None, Some((n, m))) => (generate_power_law(n, m, GRAPH_SEED)?, format!("power-law:{n},{m}")),
        (None, None) => return Err(CliError::Usage("one of --graph or --power-law is required".into())),
    };
    let info = GraphInfo {
        source,
        nodes: g.node_count(),
        edges: g.edge_count(),
    };
    Ok((g, info))
}

fn run_config(model: &ChoiceModel, d: &DynamicsArgs, seed: u64) -> Result<RunConfig> {
    let config = RunConfig {
        alpha_s: model.alpha_s(),
        alpha_f: model.alpha_f(),
        sigma: d.sigma,
        theta: d.theta,
        initial_stars: [d.s1, d.s2],
        clamp_ratings: !d.no_clamp,
        prior_weight: d.prior_weight,
        seed,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Serialize)]
struct CoefficientRow<'a> {
    name: &'a str,
    estimate: f64,
    std_error: f64,
    z_value: f64,
    odds_ratio: f64,
}

#[derive(Serialize)]
struct FitReport<'a> {
    input: String,
    observations: usize,
    interactions: bool,
    intercept: bool,
    coefficients: Vec<CoefficientRow<'a>>,
    log_likelihood: f64,
    pseudo_r2: f64,
    iterations: usize,
    converged: bool,
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let data = io::load_observations::<f64>(&args.input)?;
    let options = FitOptions {
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
        intercept: args.intercept,
    };
    let spec = args.interactions.then(InteractionSpec::full);
    let (design, y) = build_design_matrix(&data, spec.as_ref())?;
    let result = fit_logit(&design, &y, &options)?;
    let coefficients = result
        .names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            Ok(CoefficientRow {
                name,
                estimate: result.coefficients[i],
                std_error: result.standard_errors[i],
                z_value: result.z_values[i],
                odds_ratio: odds_ratio(result.coefficients[i])?,
            })
        })
        .collect::<std::result::Result<Vec<_>, swaysim::Error>>()?;
    let report = FitReport {
        input: args.input.display().to_string(),
        observations: data.len(),
        interactions: args.interactions,
        intercept: args.intercept,
        coefficients,
        log_likelihood: result.log_likelihood,
        pseudo_r2: result.pseudo_r2,
        iterations: result.iterations,
        converged: result.converged,
    };
    let json = io::versioned_json("fit", &report)?;

    if let Some(cv_path) = &args.cv {
        let table = loo_cross_validate(&data, &options)?;
        let mut buf = Vec::new();
        io::write_cv_csv(&table, &mut buf)?;
        write(cv_path, &buf)?;
    }
    match &args.output {
        Some(path) => write(path, json.as_bytes()),
        None => emit(&json),
    }
}

#[derive(Serialize)]
struct OptionEcho {
    stars: f64,
    friends: u32,
}

#[derive(Serialize)]
struct Prediction<'a> {
    model: &'a ChoiceModel,
    option_1: OptionEcho,
    option_2: OptionEcho,
    polarity: Polarity,
    p_option_1: f64,
    p_option_2: f64,
    preferred: &'static str,
    notes: Vec<String>,
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let model = resolve_model(&args.model, "study1")?;
    let polarity = args
        .polarity
        .map(Polarity::from)
        .or_else(|| model.fitted_polarity())
        .unwrap_or_default();
    let instance = ChoiceInstance::new(args.s1, args.s2, args.f1, args.f2, polarity)?;
    let p = choice_probability(&model, &instance);
    let z = model.linear_predictor(instance.delta_stars(), instance.delta_friends());
    let preferred = if z > 0.0 {
        "option_1"
    } else if z < 0.0 {
        "option_2"
    } else {
        "tie"
    };
    let mut notes = Vec::new();
    if polarity == Polarity::Negative {
        notes.push(
            "friend counts are negative opinions; a negative alpha_f means more warnings lower an option's odds"
                .to_string(),
        );
    }
    if polarity_mismatch(&model, &instance) {
        notes.push(format!(
            "the model's friends coefficient has the sign of {} opinions but the friend counts are {}",
            polarity_name(model.fitted_polarity().unwrap_or_default()),
            polarity_name(polarity)
        ));
    }
    let json = io::versioned_json(
        "prediction",
        &Prediction {
            model: &model,
            option_1: OptionEcho {
                stars: args.s1,
                friends: args.f1,
            },
            option_2: OptionEcho {
                stars: args.s2,
                friends: args.f2,
            },
            polarity,
            p_option_1: p,
            p_option_2: 1.0 - p,
            preferred,
            notes,
        },
    )?;
    emit(&json)
}

fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::Positive => "positive",
        Polarity::Negative => "negative",
    }
}

#[derive(Serialize)]
struct RankRow<'a> {
    rank: usize,
    label: &'a str,
    stars: f64,
    friends: u32,
    score: f64,
    /// Probability of being chosen over the next option in the ranking.
    p_over_next: Option<f64>,
}

#[derive(Serialize)]
struct Ranking<'a> {
    model: &'a ChoiceModel,
    ranking: Vec<RankRow<'a>>,
}

pub fn rank(args: &RankArgs) -> Result<()> {
    let model = resolve_model(&args.model, "study1")?;
    let items: Vec<RankItem> = args
        .options
        .iter()
        .map(|(label, stars, friends)| RankItem::new(label.clone(), *stars, *friends))
        .collect();
    // reuse the instance check for the star range
    for it in &items {
        ChoiceInstance::positive(it.stars, it.stars, it.friends, it.friends)?;
    }
    let order = rank_options(&model, &items)?;
    let ranking = order
        .iter()
        .enumerate()
        .map(|(i, it)| RankRow {
            rank: i + 1,
            label: &it.label,
            stars: it.stars,
            friends: it.friends,
            score: model.linear_score(it.stars, it.friends as f64),
            p_over_next: order.get(i + 1).map(|next| {
                model.probability_from_deltas(it.stars - next.stars, it.friends as f64 - next.friends as f64)
            }),
        })
        .collect();
    emit(&io::versioned_json("ranking", &Ranking { model: &model, ranking })?)
}

#[derive(Serialize)]
struct PathEntry {
    index: usize,
    seed: u64,
    final_share_1: f64,
    csv: String,
    metadata: String,
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    graph: GraphInfo,
    config: &'a RunConfig,
    paths: Vec<PathEntry>,
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> Result<()> {
    if args.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let (graph, info) = load_graph(&args.graph)?;
    let model = resolve_model(&args.model, "dynamics")?;
    let base = run_config(&model, &args.dynamics, seed)?;
    let mut entries = Vec::with_capacity(args.paths);
    for i in 0..args.paths {
        let config = RunConfig {
            seed: child_seed(seed, i as u64),
            ..base.clone()
        };
        let path = swaysim::dynamics::run(&graph, &config)?;
        let csv_name = format!("path_{i}.csv");
        let meta_name = format!("path_{i}.json");
        let mut buf = Vec::new();
        io::write_path_csv(&path, &mut buf)?;
        write(&args.out_dir.join(&csv_name), &buf)?;
        write(
            &args.out_dir.join(&meta_name),
            io::run_metadata_json(&config, &path)?.as_bytes(),
        )?;
        entries.push(PathEntry {
            index: i,
            seed: config.seed,
            final_share_1: path.final_share_1,
            csv: csv_name,
            metadata: meta_name,
        });
    }
    emit(&io::versioned_json(
        "simulation",
        &SimulationSummary {
            graph: info,
            config: &base,
            paths: entries,
        },
    )?)
}

#[derive(Serialize)]
struct SweepCell {
    index: usize,
    sigma: f64,
    theta: f64,
    stats: DispersionStats,
    ensemble_csv: String,
    histogram_csv: String,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    graph: GraphInfo,
    base_config: &'a RunConfig,
    runs: usize,
    bins: usize,
    grid_step: f64,
    tolerance: f64,
    cells: Vec<SweepCell>,
    /// `dominance[i][j]` compares cell `i` (as `a`) with cell `j` (as `b`).
    dominance: Vec<Vec<DominanceReport>>,
}

pub fn sweep(args: &SweepArgs, seed: u64, jobs: Option<usize>) -> Result<()> {
    if args.sigmas.is_empty() && args.thetas.is_empty() {
        return Err(CliError::Usage("empty sweep: give --sigmas and/or --thetas".into()));
    }
    if args.runs < 2 {
        return Err(CliError::Usage("--runs must be at least 2".into()));
    }
    let (graph, info) = load_graph(&args.graph)?;
    let model = resolve_model(&args.model, "dynamics")?;
    let base = run_config(&model, &args.dynamics, seed)?;
    let sigmas = if args.sigmas.is_empty() {
        vec![base.sigma]
    } else {
        args.sigmas.clone()
    };
    let thetas = if args.thetas.is_empty() {
        vec![base.theta]
    } else {
        args.thetas.clone()
    };

    let mut cells = Vec::new();
    let mut shares = Vec::new();
    for &sigma in &sigmas {
        for &theta in &thetas {
            let index = cells.len();
            let config = RunConfig {
                sigma,
                theta,
                ..base.clone()
            };
            config.validate()?;
            let result = run_ensemble(&graph, &config, args.runs, jobs)?;
            let ensemble_csv = format!("cell_{index}_ensemble.csv");
            let histogram_csv = format!("cell_{index}_histogram.csv");
            let mut buf = Vec::new();
            io::write_ensemble_csv(&result, &mut buf)?;
            write(&args.out_dir.join(&ensemble_csv), &buf)?;
            let mut buf = Vec::new();
            io::write_histogram_csv(&histogram(&result.final_shares, args.bins)?, &mut buf)?;
            write(&args.out_dir.join(&histogram_csv), &buf)?;
            cells.push(SweepCell {
                index,
                sigma,
                theta,
                stats: dispersion_stats(&result.final_shares)?,
                ensemble_csv,
                histogram_csv,
            });
            shares.push(result.final_shares);
        }
    }
    let dominance = shares
        .iter()
        .map(|a| {
            shares
                .iter()
                .map(|b| stochastic_dominance(a, b, args.grid_step, args.tolerance))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let json = io::versioned_json(
        "sweep",
        &SweepSummary {
            graph: info,
            base_config: &base,
            runs: args.runs,
            bins: args.bins,
            grid_step: args.grid_step,
            tolerance: args.tolerance,
            cells,
            dominance,
        },
    )?;
    write(&args.out_dir.join("summary.json"), json.as_bytes())?;
    emit(&json)
}

#[derive(Serialize)]
struct Expected {
    nodes: Option<usize>,
    edges: Option<usize>,
}

#[derive(Serialize)]
struct ValidationReport {
    graph: GraphInfo,
    self_loops_dropped: usize,
    duplicates_collapsed: usize,
    components: usize,
    degree: DegreeStats,
    invariants: String,
    expected: Expected,
    pass: bool,
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let (graph, info) = load_graph(&args.graph)?;
    let netscience = args
        .graph
        .graph
        .as_deref()
        .and_then(Path::file_stem)
        .is_some_and(|s| s.eq_ignore_ascii_case("netscience"));
    let (default_nodes, default_edges) = if netscience {
        (Some(NETSCIENCE_COUNTS.0), Some(NETSCIENCE_COUNTS.1))
    } else {
        (None, None)
    };
    let expected = Expected {
        nodes: args.expect_nodes.or(default_nodes),
        edges: args.expect_edges.or(default_edges),
    };
    let invariants = graph.check_invariants();
    let mut failures = Vec::new();
    if let Err(e) = &invariants {
        failures.push(format!("invariant violated: {e}"));
    }
    if let Some(n) = expected.nodes.filter(|&n| n != info.nodes) {
        failures.push(format!("expected {n} nodes, found {}", info.nodes));
    }
    if let Some(m) = expected.edges.filter(|&m| m != info.edges) {
        failures.push(format!("expected {m} edges, found {}", info.edges));
    }
    let report = ValidationReport {
        self_loops_dropped: graph.self_loops_dropped(),
        duplicates_collapsed: graph.duplicates_collapsed(),
        components: graph.component_count(),
        degree: degree_stats(&graph),
        invariants: invariants.err().unwrap_or_else(|| "ok".into()),
        expected,
        pass: failures.is_empty(),
        graph: info,
    };
    emit(&io::versioned_json("validation", &report)?)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}
