//! One function per subcommand. Each reads its inputs, runs the library
//! operation and prints a JSON summary (or CSV, for the matrix and
//! per-column outputs).

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use structinfo::coding::{
    esscl, initial_code_tree, lambda_u, mu_u, optimal_code_tree, optimize, run_bound_trials,
    EXACT_MAX_LETTERS,
};
use structinfo::concordance::{d_hat, state_distance_matrix, BinarySplit};
use structinfo::conservation::conservation_score;
use structinfo::linear::{
    check_expectations, collapse_duplicates, dkl_r, h_r, h_r_conditional, h_r_joint, h_r_limit,
    i_r, stddev_correlation_sim, LinearAlphabet,
};
use structinfo::notions::{d_kl_s, h_s, h_s_via_q, Direction, StructuredJoint};
use structinfo::sequences::{
    equivalence_class_stats, estimate_typical_set, typical_set, SequenceSpace,
};
use structinfo::{Alphabet, JointDistribution, PartitionStructure};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::inputs::{self, TreeSource};
use crate::output::{emit, num, print_json, Units};

fn tree_source(t: &TreeArgs) -> TreeSource {
    match (&t.tree, &t.matrix) {
        (Some(p), _) => TreeSource::Newick(p.clone(), t.lengths.into()),
        (None, Some(p)) => TreeSource::Matrix(p.clone()),
        (None, None) => unreachable!("clap requires one tree source"),
    }
}

fn letter_map(a: &Alphabet, values: impl Fn(usize) -> Value) -> Value {
    Value::Object(
        a.letters()
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), values(i)))
            .collect(),
    )
}

pub fn hu(args: &HuArgs, units: Units) -> CliResult<()> {
    let tree = tree_source(&args.tree).load()?;
    let p = inputs::load_distribution(&args.probs, args.renormalize)?.reindex(tree.alphabet())?;
    let mut s = units.summary("hu");
    s.insert("letters".into(), json!(tree.alphabet().letters()));
    s.insert("H_U".into(), units.info(tree.hu(&p)?));
    s.insert(
        "formulations".into(),
        json!({
            "recursive": units.info(tree.hu_recursive(&p)?),
            "nodewise": units.info(tree.hu_nodewise(&p)?),
            "arcwise": units.info(tree.hu_arcwise(&p)?),
            "bandwise": units.info(tree.hu_bandwise(&p)?),
        }),
    );
    s.insert("H".into(), units.info(p.entropy()));
    s.insert("root_height".into(), num(tree.root_height()));
    s.insert("normalized".into(), json!(tree.is_normalized()));
    print_json(s)
}

fn parse_side(a: &Alphabet, letters: &str) -> CliResult<Vec<usize>> {
    let names: Vec<&str> = letters
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    Ok(a.subset(&names)?)
}

pub fn hs(args: &HsArgs, units: Units) -> CliResult<()> {
    let p = inputs::load_distribution(&args.probs, args.renormalize)?;
    let st = inputs::load_structure(&args.structure, Some(p.alphabet()))?;
    let mut s = units.summary("hs");
    s.insert("letters".into(), json!(p.alphabet().letters()));
    s.insert("H_S".into(), units.info(h_s(&p, &st)?));
    s.insert("H_Q_minus_H_S_hat".into(), units.info(h_s_via_q(&p, &st)?));
    s.insert("H".into(), units.info(p.entropy()));
    s.insert("total_measure".into(), num(st.total_measure()));
    s.insert("normalized".into(), json!(st.is_normalized()));
    if let Some(q) = &args.against {
        let q = inputs::load_distribution(q, args.renormalize)?.reindex(p.alphabet())?;
        s.insert("D_KL_S".into(), units.info(d_kl_s(&p, &q, &st)?));
    }
    if let Some(left) = &args.split_left {
        let n = p.len();
        let l = parse_side(p.alphabet(), left)?;
        let split = match &args.split_right {
            Some(r) => BinarySplit::new(n, &l, &parse_side(p.alphabet(), r)?)?,
            None => BinarySplit::complementary(n, &l)?,
        };
        let name = |side: &[usize]| -> Vec<&str> {
            side.iter().map(|&i| p.alphabet().letter(i)).collect()
        };
        s.insert(
            "split".into(),
            json!({
                "left": name(split.left()),
                "right": name(split.right()),
                "concordance_distance": num(d_hat(&split, &st, &p)?),
            }),
        );
    }
    print_json(s)
}

pub fn notions(args: &NotionsArgs, units: Units) -> CliResult<()> {
    let joint = inputs::load_joint(&args.joint)?;
    let load = |path: &Option<PathBuf>, a: &Alphabet| -> CliResult<PartitionStructure> {
        match path {
            Some(p) => inputs::load_structure(p, Some(a)),
            None => Ok(PartitionStructure::traditional(a.clone())),
        }
    };
    let sa = load(&args.structure_a, joint.rows())?;
    let sb = load(&args.structure_b, joint.cols())?;
    let j = StructuredJoint::new(joint, sa, sb)?;
    let mut s = units.summary("notions");
    s.insert("H_S_joint".into(), units.info(j.h_s_joint()));
    s.insert("H_S_A".into(), units.info(j.h_s_a()));
    s.insert("H_S_B".into(), units.info(j.h_s_b()));
    s.insert(
        "H_S_B_given_A".into(),
        units.info(j.h_s_conditional(Direction::BGivenA)),
    );
    s.insert(
        "H_S_A_given_B".into(),
        units.info(j.h_s_conditional(Direction::AGivenB)),
    );
    s.insert("I_S".into(), units.info(j.i_s()));
    print_json(s)
}

pub fn distance(args: &DistanceArgs, units: Units) -> CliResult<()> {
    let st = inputs::load_structure(&args.structure, None)?;
    let d = state_distance_matrix(&st);
    emit(&inputs::write_distance_csv(&d), args.out.as_deref())?;
    if let Some(path) = &args.out {
        let mut s = units.summary("distance");
        s.insert("letters".into(), json!(d.alphabet().letters()));
        s.insert("matrix_csv".into(), json!(path));
        s.insert("max_distance".into(), num(d.max_distance()));
        s.insert("ultrametric".into(), json!(d.is_ultrametric()));
        print_json(s)?;
    }
    Ok(())
}

pub fn code(args: &CodeArgs, units: Units) -> CliResult<()> {
    let tree = tree_source(&args.tree).load()?;
    let p = inputs::load_distribution(&args.probs, args.renormalize)?.reindex(tree.alphabet())?;
    let d = tree.to_distance_matrix();
    let start = initial_code_tree(&tree, &p)?;
    let out = optimize(&tree, &p)?;
    let hu = tree.hu(&p)?;
    let mu = mu_u(&out.tree, &p, &d)?;
    let words = out.tree.codewords();
    let mut s = units.summary("code");
    s.insert(
        "codewords".into(),
        letter_map(tree.alphabet(), |i| json!(words[i])),
    );
    s.insert("H_U".into(), units.info(hu));
    s.insert("lambda_U".into(), units.info(lambda_u(&out.tree, &p, &d)?));
    s.insert("mu_U".into(), units.info(mu));
    s.insert("initial_mu_U".into(), units.info(mu_u(&start, &p, &d)?));
    s.insert("expected_length".into(), num(out.tree.expected_length(&p)?));
    s.insert("restarts".into(), json!(out.restarts));
    s.insert(
        "within_bound".into(),
        json!(mu <= hu + 1.0 + structinfo::coding::BOUND_TOL),
    );
    if args.exact {
        if p.len() > EXACT_MAX_LETTERS {
            return Err(CliError::Usage(format!(
                "--exact supports at most {EXACT_MAX_LETTERS} letters, the tree has {}",
                p.len()
            )));
        }
        let (_, best) = optimal_code_tree(&p, &d)?;
        s.insert("exact_mu_U".into(), units.info(best));
    }
    if let Some(path) = &args.structure {
        let st = inputs::load_structure(path, Some(tree.alphabet()))?;
        let r = esscl(&out.tree, &p, &st)?;
        s.insert("ESSCL".into(), units.info(r.total));
        s.insert("H_S".into(), units.info(h_s(&p, &st)?));
    }
    print_json(s)
}

pub fn trials(args: &TrialsArgs, units: Units) -> CliResult<()> {
    let config = structinfo::coding::TrialConfig {
        count: args.count,
        n_min: args.n_min,
        n_max: args.n_max,
        seed: args.seed,
    };
    let report = run_bound_trials(config)?;
    let mut files = Vec::new();
    if !report.violations.is_empty() {
        std::fs::create_dir_all(&args.violations_dir).map_err(|source| CliError::Write {
            path: args.violations_dir.clone(),
            source,
        })?;
        for v in &report.violations {
            let path = args
                .violations_dir
                .join(format!("violation-seed{}-index{}.json", v.seed, v.index));
            let text = serde_json::to_string_pretty(v).expect("violation serializes");
            emit(&(text + "\n"), Some(&path))?;
            files.push(path);
        }
    }
    if let Some(path) = &args.instances_csv {
        emit(&instances_csv(&report.instances, units), Some(path))?;
    }
    let n = report.instances.len() as f64;
    let mean_gap = report.instances.iter().map(|i| i.gap).sum::<f64>() / n;
    let mut s = units.summary("trials");
    s.insert("config".into(), json!(config));
    s.insert("instances".into(), json!(report.instances.len()));
    s.insert("violation_count".into(), json!(report.violation_count));
    s.insert("max_gap".into(), units.info(report.max_gap));
    s.insert("max_gap_index".into(), json!(report.max_gap_index));
    s.insert("mean_gap".into(), units.info(mean_gap));
    s.insert(
        "max_restarts".into(),
        json!(report
            .instances
            .iter()
            .map(|i| i.restarts)
            .max()
            .unwrap_or(0)),
    );
    s.insert("violation_files".into(), json!(files));
    print_json(s)
}

fn instances_csv(instances: &[structinfo::coding::TrialInstance], units: Units) -> String {
    use crate::output::csv_num;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "n", "h_u", "mu_u", "gap", "restarts"])
        .expect("in-memory write");
    for i in instances {
        w.write_record([
            i.index.to_string(),
            i.n.to_string(),
            csv_num(units.info_raw(i.h_u)),
            csv_num(units.info_raw(i.mu_u)),
            csv_num(units.info_raw(i.gap)),
            i.restarts.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsInput {
    points: Vec<f64>,
    #[serde(default)]
    probs: Option<Vec<f64>>,
    #[serde(default)]
    against: Option<Vec<f64>>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct JointPointsInput {
    points_a: Vec<f64>,
    points_b: Vec<f64>,
    probs: Vec<Vec<f64>>,
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = inputs::read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        location: format!("line {}, column {}", e.line(), e.column()),
        reason: e.to_string(),
    })
}

pub fn itr(cmd: &ItrCommand, units: Units) -> CliResult<()> {
    let mut s = units.summary("itr");
    match cmd {
        ItrCommand::Entropy { input } => {
            let raw: PointsInput = read_json(input)?;
            // Repeated values are merged, so samples with ties are accepted.
            let (a, p) = collapse_duplicates(&raw.points, raw.probs.as_deref())?;
            s.insert(
                "points".into(),
                Value::Array(a.points().iter().map(|&x| num(x)).collect()),
            );
            s.insert(
                "probs".into(),
                Value::Array(p.probs().iter().map(|&x| num(x)).collect()),
            );
            s.insert("span".into(), num(a.span()));
            s.insert("H_R".into(), units.info(h_r(&a, &p)?));
            s.insert("H".into(), units.info(p.entropy()));
            if let Some(q) = &raw.against {
                if raw.probs.is_none() || q.len() != raw.points.len() {
                    return Err(CliError::Usage(
                        "`against` needs `probs` and one probability per point".into(),
                    ));
                }
                let (_, q) = collapse_duplicates(&raw.points, Some(q))?;
                s.insert("DKL_R".into(), units.info(dkl_r(&a, &p, &q)?));
            }
        }
        ItrCommand::Joint { input } => {
            let raw: JointPointsInput = read_json(input)?;
            let a = LinearAlphabet::new(raw.points_a)?;
            let b = LinearAlphabet::new(raw.points_b)?;
            let cells: Vec<f64> = raw.probs.into_iter().flatten().collect();
            let joint = JointDistribution::new(a.alphabet().clone(), b.alphabet().clone(), cells)?;
            s.insert("H_R_joint".into(), units.info(h_r_joint(&a, &b, &joint)?));
            s.insert("H_R_A".into(), units.info(h_r(&a, &joint.marginal_rows())?));
            s.insert("H_R_B".into(), units.info(h_r(&b, &joint.marginal_cols())?));
            s.insert(
                "H_R_B_given_A".into(),
                units.info(h_r_conditional(&a, &b, &joint, Direction::BGivenA)?),
            );
            s.insert(
                "H_R_A_given_B".into(),
                units.info(h_r_conditional(&a, &b, &joint, Direction::AGivenB)?),
            );
            s.insert("I_R".into(), units.info(i_r(&a, &b, &joint)?));
        }
        ItrCommand::Expectations { epsilon } => {
            let mut checks = Vec::new();
            for &e in epsilon {
                for c in check_expectations(e)? {
                    checks.push(json!({
                        "name": c.name,
                        "epsilon": num(c.epsilon),
                        "lhs": units.info(c.lhs),
                        "rhs": units.info(c.rhs),
                        "holds": c.holds,
                    }));
                }
            }
            s.insert(
                "all_hold".into(),
                json!(checks.iter().all(|c| c["holds"] == json!(true))),
            );
            s.insert("checks".into(), Value::Array(checks));
        }
        ItrCommand::Correlation {
            samples,
            points,
            dist,
            seed,
        } => {
            let r = stddev_correlation_sim(*samples, *points, (*dist).into(), *seed)?;
            s.insert("samples".into(), json!(r.samples));
            s.insert("points_per_sample".into(), json!(r.points_per_sample));
            s.insert("distribution".into(), json!(r.distribution));
            s.insert("seed".into(), json!(r.seed));
            s.insert("pearson_r".into(), num(r.correlation));
            s.insert("mean_H_R".into(), units.info(r.mean_h_r));
            s.insert("mean_stddev".into(), num(r.mean_stddev));
        }
        ItrCommand::UniformLimit { step } => {
            let v = h_r_limit(|x| x.clamp(0.0, 1.0), 0.0, 1.0, *step)?;
            s.insert("step".into(), num(*step));
            s.insert("H_R_limit".into(), units.info(v));
            s.insert(
                "closed_form".into(),
                units.info(1.0 / (2.0 * std::f64::consts::LN_2)),
            );
        }
    }
    print_json(s)
}

pub fn sequences(args: &SequencesArgs, units: Units) -> CliResult<()> {
    let p = inputs::load_distribution(&args.probs, args.renormalize)?;
    let st = args
        .structure
        .as_ref()
        .map(|path| inputs::load_structure(path, Some(p.alphabet())))
        .transpose()?;
    let need_structure = || {
        st.as_ref()
            .ok_or_else(|| CliError::Usage("this sequence kind needs --structure".into()))
    };
    let kind = args.kind.unwrap_or(if st.is_some() {
        KindArg::Structured
    } else {
        KindArg::Letters
    });
    let space = match kind {
        KindArg::Letters => SequenceSpace::letters(&p, args.length)?,
        KindArg::Partitions => SequenceSpace::partitions(need_structure()?, args.length)?,
        KindArg::Structured => SequenceSpace::structured(&p, need_structure()?, args.length)?,
        KindArg::Reduced => {
            let st = need_structure()?;
            let k = args.partition_index;
            let (part, _) = st.terms().get(k).ok_or_else(|| {
                CliError::Usage(format!(
                    "--partition-index {k} but the structure has {} partitions",
                    st.len()
                ))
            })?;
            SequenceSpace::reduced(&p, part, args.length)?
        }
    };
    let mut s = units.summary("sequences");
    s.insert("kind".into(), json!(space.kind()));
    s.insert("length".into(), json!(args.length));
    s.insert("epsilon".into(), num(args.epsilon));
    if let Some(samples) = args.estimate {
        let e = estimate_typical_set(&space, args.epsilon, samples, args.seed)?;
        s.insert(
            "estimate".into(),
            json!({
                "approximate": e.approximate,
                "samples": e.samples,
                "seed": args.seed,
                "mass_estimate": num(e.mass_estimate),
                "log2_count_estimate": e.log2_count_estimate.map(num),
            }),
        );
    } else {
        let t = typical_set(&space, args.epsilon)?;
        s.insert(
            "typical_set".into(),
            json!({
                "entropy": units.info(t.entropy),
                "space_size": num(t.space_size),
                "count": t.count,
                "mass": num(t.mass),
                "rate": units.info_opt(t.rate),
                "lower_envelope": num(t.lower_envelope),
                "upper_envelope": num(t.upper_envelope),
                "within_envelope": t.within_envelope,
                "types_correction": units.info(t.types_correction),
                "within_rate_envelope": t.within_rate_envelope,
            }),
        );
    }
    if args.classes {
        let c = equivalence_class_stats(args.length, &p, need_structure()?, args.epsilon)?;
        s.insert(
            "equivalence_classes".into(),
            json!({
                "H_Q": units.info(c.h_q),
                "H_S_hat": units.info(c.h_structure),
                "H_S": units.info(c.h_s),
                "typical_count": c.typical_count,
                "typical_mass": num(c.typical_mass),
                "class_count": c.class_count,
                "min_class_size": c.min_class_size,
                "max_class_size": c.max_class_size,
                "class_count_rate": units.info_opt(c.class_count_rate),
                "min_class_size_rate": units.info_opt(c.min_class_size_rate),
                "max_class_size_rate": units.info_opt(c.max_class_size_rate),
                "classes_cover": c.classes_cover,
            }),
        );
    }
    print_json(s)
}

pub fn conserve(args: &ConserveArgs, units: Units) -> CliResult<()> {
    let aln = inputs::load_alignment(&args.aln)?;
    let tree = TreeSource::Newick(args.tree.clone(), args.lengths.into()).load()?;
    let report = conservation_score(&aln, &tree, args.gap_mode.into(), args.coverage_threshold)?;
    let text = inputs::write_conservation_csv(&report, |x| units.info_raw(x));
    emit(&text, args.out.as_deref())?;
    if let Some(path) = &args.out {
        let scored: Vec<&structinfo::conservation::ColumnScore> =
            report.columns.iter().filter(|c| c.h_u.is_some()).collect();
        let mean = |f: fn(&structinfo::conservation::ColumnScore) -> Option<f64>| -> Value {
            if scored.is_empty() {
                Value::Null
            } else {
                units.info(scored.iter().filter_map(|c| f(c)).sum::<f64>() / scored.len() as f64)
            }
        };
        let mut s = units.summary("conserve");
        s.insert("report_csv".into(), json!(path));
        s.insert("rows".into(), json!(aln.num_rows()));
        s.insert("columns".into(), json!(aln.width()));
        s.insert("gap_mode".into(), json!(report.gap_mode));
        s.insert("coverage_threshold".into(), num(report.coverage_threshold));
        s.insert(
            "low_coverage_columns".into(),
            json!(report.columns.iter().filter(|c| c.low_coverage).count()),
        );
        s.insert("mean_H_U".into(), mean(|c| c.h_u));
        s.insert("mean_H".into(), mean(|c| c.h));
        print_json(s)?;
    }
    Ok(())
}
