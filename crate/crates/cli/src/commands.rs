use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde_json::json;

use dyadic_core::coloring::{
    analyze_membership, membership_probability, to_f64, tree_experiment, universe_at_scale,
    verify_recoloring_injective, Fraction,
};
use dyadic_core::goodness::{
    estimate_bad_probability, estimate_boundary_decay, exact_good_probabilities, geometric_schedule,
    really_good_probability, simulate_equalization, GoodnessParams, LatticeSampler,
};
use dyadic_core::grid::{build_nested_grids, finest_level, GridHierarchy, GridSampler, HierarchyOptions};
use dyadic_core::lattice::{
    build_forest, check_grid_cover, check_structure, cube_cover_report, scan_chain_separation, CubeAtlas,
    CHAIN_SEPARATION_MAX_DELTA,
};
use dyadic_core::measures::{a2_characteristic, growth_constant, measure_doubling_constant, BallWitness, WeightedMeasure};
use dyadic_core::metric::FiniteMetricSpace;
use dyadic_core::stats::trial_rng;
use dyadic_core::{Error, SamplingMode};

use crate::args::{A2Args, ColoringArgs, CommonArgs, Format, GoodnessArgs, LatticeArgs};
use crate::report::{to_value, Check, Failure, Output, Report};

pub fn load_space(path: &Path) -> Result<FiniteMetricSpace, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let space = if is_csv {
        FiniteMetricSpace::from_csv_reader(text.as_bytes())
    } else {
        FiniteMetricSpace::from_json(&text)
    };
    let space = space.map_err(Failure::input)?;
    if space.is_empty() {
        return Err(Failure::Input("the space has no points".into()));
    }
    Ok(space)
}

fn json_only(common: &CommonArgs) -> Result<(), Failure> {
    if common.format == Format::Csv {
        return Err(Failure::Config("csv output is only available for `goodness`".into()));
    }
    Ok(())
}

fn json_output(report: Report) -> Output {
    Output { report, csv: None }
}

pub fn validate(args: &CommonArgs) -> Result<Output, Failure> {
    json_only(args)?;
    let space = load_space(&args.input)?;
    let exact = space.doubling_exact().ok();
    let results = json!({
        "points": space.names(),
        "count": space.len(),
        "min_distance": space.min_distance(),
        "diameter": space.diameter(),
        "doubling_estimate": space.doubling_estimate(),
        "doubling_exact": exact,
    });
    let checks = vec![Check::new(
        "metric_axioms",
        true,
        format!("{} points: finite nonnegative entries, zero diagonal, symmetric, distinct points, triangle inequality", space.len()),
    )];
    Ok(json_output(Report::new("validate", &args.input, json!({}), results, checks)))
}

fn lattice_params(args: &LatticeArgs) -> serde_json::Value {
    json!({
        "delta": args.delta,
        "seed": args.seed,
        "mode": SamplingMode::from(args.mode),
        "exhaustive_limit": args.exhaustive_limit,
        "coarsest": args.coarsest,
        "freeze_from": args.freeze_from,
    })
}

fn lattice_sampler(args: &LatticeArgs) -> Result<LatticeSampler, Failure> {
    let opts = HierarchyOptions { delta: args.delta, coarsest: args.coarsest, freeze_from: args.freeze_from };
    opts.validate()?;
    Ok(LatticeSampler::new(opts, GridSampler::new(args.mode.into(), args.exhaustive_limit)))
}

fn levels_json(space: &FiniteMetricSpace, h: &GridHierarchy) -> serde_json::Value {
    h.levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "scale": h.scale(l.level),
                "points": l.grid.members.iter().map(|&p| space.name(p)).collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn cover_checks(space: &FiniteMetricSpace, h: &GridHierarchy) -> Vec<Check> {
    (h.coarsest()..=h.finest())
        .map(|level| match check_grid_cover(space, h, level) {
            Ok(r) => Check::new(
                &format!("grid_cover_level_{level}"),
                true,
                format!(
                    "max dist(x, G) = {} at {} <= 3 delta^k = {}",
                    r.max_distance,
                    space.name(r.witness),
                    r.bound
                ),
            ),
            Err(e) => Check::new(&format!("grid_cover_level_{level}"), false, e.to_string()),
        })
        .collect()
}

pub fn grids(args: &LatticeArgs) -> Result<Output, Failure> {
    json_only(&args.common)?;
    let space = load_space(&args.common.input)?;
    let sampler = lattice_sampler(args)?;
    let mut rng = trial_rng(args.seed, 0);
    let h = build_nested_grids(&space, &sampler.opts, &sampler.grids, &mut rng)?;
    let mut checks = vec![match h.validate(&space) {
        Ok(()) => Check::new("nested_maximal_grids", true, format!("{} levels", h.levels.len())),
        Err(e) => Check::new("nested_maximal_grids", false, e.to_string()),
    }];
    checks.extend(cover_checks(&space, &h));
    let results = json!({
        "finest": h.finest(),
        "coarsest": h.coarsest(),
        "levels": levels_json(&space, &h),
    });
    Ok(json_output(Report::new("grids", &args.common.input, lattice_params(args), results, checks)))
}

pub fn lattice(args: &LatticeArgs) -> Result<Output, Failure> {
    json_only(&args.common)?;
    let space = load_space(&args.common.input)?;
    let sampler = lattice_sampler(args)?;
    let mut rng = trial_rng(args.seed, 0);
    let h = build_nested_grids(&space, &sampler.opts, &sampler.grids, &mut rng)?;
    let mut checks = cover_checks(&space, &h);
    let forest = match build_forest(&space, h, &mut rng) {
        Ok(f) => f,
        Err(e @ (Error::NoCandidateParent { .. } | Error::AmbiguousParent { .. })) => {
            checks.push(Check::new("parent_assignment", false, e.to_string()));
            let report = Report::new("lattice", &args.common.input, lattice_params(args), json!({}), checks);
            return Ok(json_output(report));
        }
        Err(e) => return Err(e.into()),
    };
    let atlas = CubeAtlas::build(&space, &forest)?;
    let name = |p: usize| space.name(p).to_string();
    let mut levels = Vec::new();
    for cubes in atlas.levels() {
        let level = cubes.level;
        checks.push(match cube_cover_report(cubes) {
            Ok(r) => Check::new(
                &format!("cube_cover_level_{level}"),
                true,
                format!("every point lies in a cube; {} in more than one", r.multiply_covered),
            ),
            Err(e) => Check::new(&format!("cube_cover_level_{level}"), false, e.to_string()),
        });
        let edges: Vec<(String, String)> = forest.edges(level)?.into_iter().map(|(c, p)| (name(c), name(p))).collect();
        levels.push(json!({
            "level": level,
            "scale": forest.scale(level),
            "cubes": cubes.cubes.iter().map(|c| json!({
                "center": name(c.center),
                "members": c.members.iter().map(|&m| name(m)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "parents": edges,
        }));
    }
    let structure = check_structure(&space, &forest, &atlas)?;
    checks.push(Check::new(
        "structure",
        structure.violations() == 0,
        format!(
            "{} violations; max ancestor distance {} delta^k, max cube diameter {} delta^k",
            structure.violations(),
            structure.max_ancestor_ratio,
            structure.max_diameter_ratio
        ),
    ));
    let chains = if forest.delta() <= CHAIN_SEPARATION_MAX_DELTA {
        let scan = scan_chain_separation(&space, &forest, &atlas)?;
        checks.push(Check::new(
            "chain_separation",
            scan.violations.is_empty(),
            format!(
                "{} hypothesis instances, {} chains, {} violations",
                scan.hypothesis_instances,
                scan.chains_checked,
                scan.violations.len()
            ),
        ));
        to_value(&scan)
    } else {
        json!({ "skipped": "the separation lemma needs delta <= 1/1000" })
    };
    let results = json!({
        "finest": forest.finest(),
        "coarsest": forest.coarsest(),
        "levels": levels,
        "structure": to_value(&structure),
        "chain_separation": chains,
    });
    Ok(json_output(Report::new("lattice", &args.common.input, lattice_params(args), results, checks)))
}

pub fn coloring(args: &ColoringArgs) -> Result<Output, Failure> {
    json_only(&args.common)?;
    let space = load_space(&args.common.input)?;
    if !(args.scale > 0.0 && args.scale.is_finite()) {
        return Err(Failure::Config(format!("scale {} must be positive", args.scale)));
    }
    let universe = universe_at_scale(&space, args.scale, args.exhaustive_limit)?;
    let membership = analyze_membership(&universe)?;
    let mut checks = vec![Check::new(
        "membership_floor",
        membership.floor_holds,
        format!(
            "min P(v red) = {}/{} against 2^-d with d = {}",
            membership.min_probability.numerator, membership.min_probability.denominator, membership.d
        ),
    )];
    let mut injectivity = Vec::new();
    let mut failures = Vec::new();
    for v in 0..space.len() {
        match verify_recoloring_injective(&universe, v) {
            Ok(rep) => injectivity.push(json!({
                "vertex": space.name(v),
                "b_count": rep.b_count,
                "classes": rep.classes.iter().map(|c| json!({
                    "s": c.s.iter().map(|&p| space.name(p)).collect::<Vec<_>>(),
                    "w_count": c.w_count,
                })).collect::<Vec<_>>(),
                "mapped": rep.mapped,
            })),
            Err(e @ (Error::InjectivityViolation { .. } | Error::RecoloringFailure(_))) => {
                failures.push(format!("{}: {e}", space.name(v)))
            }
            Err(e) => return Err(e.into()),
        }
    }
    checks.push(Check::new(
        "recoloring_injective",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} vertices, every class W_S maps injectively into B", space.len())
        } else {
            failures.join("; ")
        },
    ));
    let tree = tree_experiment(args.tree_branching, args.tree_height, 0, args.exhaustive_limit)?;
    if (args.tree_branching, args.tree_height) == (3, 2) {
        checks.push(Check::new(
            "tree_root_probability",
            tree.exceeds_one_sixteenth,
            format!("P(root red) = {}/{} > 1/16", tree.probability.numerator, tree.probability.denominator),
        ));
    }
    let results = json!({
        "lattices": universe.len(),
        "membership": to_value(&membership),
        "injectivity": injectivity,
        "tree": to_value(&tree),
    });
    let params = json!({
        "scale": args.scale,
        "exhaustive_limit": args.exhaustive_limit,
        "tree_branching": args.tree_branching,
        "tree_height": args.tree_height,
    });
    Ok(json_output(Report::new("coloring", &args.common.input, params, results, checks)))
}

/// Smallest exact 1-lattice membership probability over the grid scales
/// `delta^j`, `k <= j < finest`; `None` when some scale is too large to
/// enumerate.
fn exact_membership_floor(space: &FiniteMetricSpace, delta: f64, k: i32, limit: usize) -> Option<BigRational> {
    let finest = finest_level(space, delta);
    let mut a: Option<BigRational> = None;
    for level in k..finest {
        let universe = universe_at_scale(space, delta.powi(level), limit).ok()?;
        for v in 0..space.len() {
            let p = membership_probability(&universe, v).ok()?;
            a = Some(match a {
                Some(cur) if cur <= p => cur,
                _ => p,
            });
        }
    }
    a
}

pub fn goodness(args: &GoodnessArgs) -> Result<Output, Failure> {
    let la = &args.lattice;
    let space = load_space(&la.common.input)?;
    let params = GoodnessParams::new(la.delta, args.gamma, args.r)?;
    let sampler = lattice_sampler(la)?;
    let finest = finest_level(&space, la.delta);
    let k = args.level.unwrap_or(finest);
    let center = match &args.center {
        Some(name) => space.index_of(name)?,
        None => 0,
    };
    let schedule = args
        .eps_schedule
        .clone()
        .unwrap_or_else(|| geometric_schedule(la.delta, args.gamma, 10));

    let bad = estimate_bad_probability(&space, k, center, &params, &sampler, args.trials, la.seed).map_err(|e| match e {
        Error::CenterNotInGrid { .. } => {
            Failure::Config(format!("{e}; fix the grid with --freeze-from {k} or pick a level where the center is always a grid point"))
        }
        e => e.into(),
    })?;
    let mut checks = vec![
        Check::new(
            "bad_probability",
            bad.interval.high <= 0.5,
            format!(
                "P(bad) = {}/{} = {}, 95% Wilson interval [{}, {}]",
                bad.bad, bad.trials, bad.estimate, bad.interval.low, bad.interval.high
            ),
        ),
        Check::new(
            "proof_step",
            bad.proof_steps.failures == 0,
            format!("{} checks, {} failures", bad.proof_steps.checks, bad.proof_steps.failures),
        ),
    ];

    let a_coloring = if space.len() <= la.exhaustive_limit {
        exact_membership_floor(&space, la.delta, k, la.exhaustive_limit)
    } else {
        None
    };
    let decay = estimate_boundary_decay(
        &space,
        center,
        k,
        &schedule,
        &sampler,
        args.trials,
        la.seed,
        a_coloring.as_ref().map(to_f64),
    )?;
    checks.push(Check::new(
        "decay_monotone",
        decay.monotone,
        match decay.eta_hat {
            Some(eta) => format!("fitted exponent {eta} over {} points", decay.fit_points),
            None => "too few nonzero estimates to fit an exponent".to_string(),
        },
    ));

    let deterministic_level = k == finest || la.freeze_from.is_some_and(|f| f <= k);
    let exact = if SamplingMode::from(la.mode) == SamplingMode::ExhaustiveUniform && space.len() <= la.exhaustive_limit {
        let centers: Vec<usize> = if deterministic_level {
            sampler.sample(&space, &mut trial_rng(la.seed, 0))?.grid(k)?.members.clone()
        } else {
            vec![center]
        };
        match exact_good_probabilities(&space, k, &centers, &params, &sampler.opts, la.exhaustive_limit, args.max_outcomes) {
            Ok((values, forests)) => Some((values, forests)),
            Err(Error::TooLargeForExhaustive { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let (p, a, source) = match &exact {
        Some((values, _)) => {
            let p = values
                .iter()
                .find(|v| v.center == center)
                .map(|v| v.exact.clone())
                .ok_or(Error::UnknownCenter(center))?;
            let a = values.iter().map(|v| v.exact.clone()).min().expect("at least one center");
            (p, a, "exact")
        }
        None => {
            let p = BigRational::new((bad.trials - bad.bad).into(), bad.trials.into());
            (p, BigRational::new(1.into(), 2.into()), "plugin")
        }
    };
    let equalization = if p >= a && a > BigRational::new(0.into(), 1.into()) {
        let est = simulate_equalization(&space, k, center, &params, &sampler, to_f64(&p), to_f64(&a), args.trials, la.seed)?;
        checks.push(Check::new(
            "equalization_frequency",
            est.within_sigmas(4.0),
            format!("really good {}/{} = {}, target a = {}, z = {}", est.really_good, est.trials, est.frequency, est.target, est.z),
        ));
        if source == "exact" {
            let identity = really_good_probability(&p, &a)? == a;
            checks.push(Check::new("equalization_identity", identity, format!("p_Q (a / p_Q) = {a}")));
        }
        Some(to_value(&est))
    } else {
        checks.push(Check::new("equalization_frequency", false, format!("p_Q = {p} is below a = {a}")));
        None
    };

    let results = json!({
        "level": k,
        "center": space.name(center),
        "bad_probability": to_value(&bad),
        "boundary_decay": to_value(&decay),
        "coloring_a": a_coloring.as_ref().map(Fraction::from),
        "equalization": {
            "p_source": source,
            "p": Fraction::from(&p),
            "a": Fraction::from(&a),
            "forests_enumerated": exact.as_ref().map(|e| e.1),
            "exact": exact.as_ref().map(|(values, _)| values.iter().map(|v| json!({
                "center": space.name(v.center),
                "p": v.probability,
            })).collect::<Vec<_>>()),
            "estimate": equalization,
        },
    });
    let mut params_json = lattice_params(la);
    params_json["gamma"] = json!(args.gamma);
    params_json["r"] = json!(args.r);
    params_json["trials"] = json!(args.trials);
    params_json["eps_schedule"] = json!(schedule);
    params_json["max_outcomes"] = json!(args.max_outcomes);
    let csv = (la.common.format == Format::Csv).then(|| {
        let mut out = String::from("eps,estimate,ci_low,ci_high\n");
        for point in &decay.points {
            out.push_str(&format!("{},{},{},{}\n", point.eps, point.estimate, point.interval.low, point.interval.high));
        }
        out
    });
    Ok(Output { report: Report::new("goodness", &la.common.input, params_json, results, checks), csv })
}

pub fn a2(args: &A2Args) -> Result<Output, Failure> {
    json_only(&args.common)?;
    let space = load_space(&args.common.input)?;
    let text = fs::read_to_string(&args.weights)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.weights.display())))?;
    let wm = WeightedMeasure::from_json(&space, &text).map_err(Failure::input)?;
    let ball = |w: &BallWitness| json!({ "center": space.name(w.center), "radius": w.radius });
    let a2 = a2_characteristic(&space, &wm)?;
    let a2_inv = a2_characteristic(&space, &wm.inverted())?;
    let growth = growth_constant(&space, &wm, args.m)?;
    let doubling = measure_doubling_constant(&space, &wm)?;
    let checks = vec![
        Check::new("a2_at_least_one", a2.value >= 1.0 - 1e-12, format!("[w] = {}", a2.value)),
        Check::new(
            "a2_symmetric",
            (a2.value - a2_inv.value).abs() <= 1e-12 * a2.value,
            format!("[w] = {}, [1/w] = {}", a2.value, a2_inv.value),
        ),
        Check::new("doubling_at_least_one", doubling.constant >= 1.0, format!("{}", doubling.constant)),
    ];
    let results = json!({
        "a2": { "value": a2.value, "witness": ball(&a2.witness), "balls_checked": a2.balls_checked },
        "a2_inverse_weight": a2_inv.value,
        "growth": {
            "m": growth.m,
            "c_min": growth.c_min,
            "witness": growth.witness.as_ref().map(ball),
            "radii": "all positive pairwise distances",
        },
        "doubling": { "constant": doubling.constant, "witness": doubling.witness.as_ref().map(ball) },
    });
    let params = json!({ "weights": args.weights.display().to_string(), "m": args.m });
    Ok(json_output(Report::new("a2", &args.common.input, params, results, checks)))
}
