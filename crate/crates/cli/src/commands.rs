//! Subcommand implementations.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use owlproofs_core::dataset::{build_dataset, BuildConfig, BuildMode, DatasetBuilder};
use owlproofs_core::io::sample::EvalSample;
use owlproofs_core::io::{parse_dl_axiom, parse_dl_document, parse_ofs, read_samples, ParseReport};
use owlproofs_core::justify::{self, Budget};
use owlproofs_core::model::Ontology;
use owlproofs_core::proofdsl;
use owlproofs_core::reasoner::classify_ontology;
use owlproofs_core::runner::{
    read_run_records, run_batch, ChatClient, ExampleMode, PromptConfig, Responder, Task,
};
use owlproofs_core::score::{aggregate, score_batch, AggregateReport, SampleScore};
use owlproofs_core::taxonomy::build_taxonomy;
use owlproofs_core::verbalize::{verbalize_axiom, Lexicon};

use crate::config;
use crate::{data_err, CliError, Command, ExampleArg, ResponderArg, TaskArg};

pub fn dispatch(command: Command, seed: Option<u64>) -> Result<(), CliError> {
    match command {
        Command::Classify { input, out } => classify_cmd(&input, &out),
        Command::Distance { input, out } => distance_cmd(&input, &out),
        Command::Justify { input, goal, max_count, max_tests } => {
            justify_cmd(&input, &goal, max_count, max_tests)
        }
        Command::Verbalize { input, out, lexicon } => {
            verbalize_cmd(input.as_deref(), out.as_deref(), lexicon.as_deref())
        }
        Command::BuildDataset { input, out_dir, config, quota, ratios, distance_range, modes } => {
            let overrides = BuildOverrides { quota, ratios, distance_range, modes, seed };
            build_dataset_cmd(&input, &out_dir, config.as_deref(), overrides)
        }
        Command::Run {
            samples,
            out,
            endpoint,
            model,
            responder,
            prompt_config,
            rules,
            example,
            task,
            parallel,
        } => run_cmd(RunArgs {
            samples,
            out,
            endpoint,
            model,
            responder,
            prompt_config,
            rules,
            example,
            task,
            parallel,
        }),
        Command::ParseResponse { responses, out, task } => {
            parse_response_cmd(&responses, &out, task)
        }
        Command::Score { samples, responses, out } => score_cmd(&samples, &responses, &out),
        Command::Report { scores, group_by, out } => report_cmd(&scores, &group_by, &out),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| data_err(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| data_err(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| data_err(format!("cannot write {}: {e}", path.display())))
}

/// Loads an ontology by extension: `.ofn`/`.owl`/`.ofs` as OWL functional
/// syntax, anything else as compact DL lines.
fn load_ontology(path: &Path) -> Result<(Ontology, ParseReport), CliError> {
    let text = read_file(path)?;
    let by_ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let (ontology, report) = match by_ext {
        "ofn" | "owl" | "ofs" => {
            parse_ofs(&text).map_err(|e| data_err(format!("{}: {e}", path.display())))?
        }
        _ => parse_dl_document(&text),
    };
    if ontology.is_empty() {
        return Err(data_err(format!("{}: no EL axioms accepted", path.display())));
    }
    for (locator, reason) in &report.skipped {
        log::warn!("{}: skipped {locator}: {reason}", path.display());
    }
    log::info!(
        "{}: accepted {} axioms, skipped {} ({} non-EL)",
        path.display(),
        report.accepted,
        report.skipped.len(),
        report.non_el_filtered
    );
    Ok((ontology, report))
}

fn classify_cmd(input: &Path, out: &Path) -> Result<(), CliError> {
    let (ontology, _) = load_ontology(input)?;
    let taxonomy = build_taxonomy(&classify_ontology(&ontology));
    let mut text = String::from("relation\tsub\tsup\n");
    for (sub, sup) in taxonomy.direct_edges() {
        text.push_str(&format!("direct\t{sub}\t{sup}\n"));
    }
    for class in taxonomy.equivalence_classes() {
        for other in &class[1..] {
            text.push_str(&format!("equiv\t{}\t{}\n", class[0], other));
        }
    }
    write_file(out, &text)?;
    println!("{} classes, taxonomy written to {}", taxonomy.class_count(), out.display());
    Ok(())
}

fn distance_cmd(input: &Path, out: &Path) -> Result<(), CliError> {
    let (ontology, _) = load_ontology(input)?;
    let taxonomy = build_taxonomy(&classify_ontology(&ontology));
    let mut text = String::from("distance\tsubsumptions\n");
    for (distance, count) in taxonomy.distance_histogram() {
        text.push_str(&format!("{distance}\t{count}\n"));
    }
    write_file(out, &text)?;
    println!("histogram written to {}", out.display());
    Ok(())
}

fn justify_cmd(input: &Path, goal: &str, max_count: usize, max_tests: usize) -> Result<(), CliError> {
    let (ontology, _) = load_ontology(input)?;
    let goal_axiom = parse_dl_axiom(goal).map_err(|e| data_err(format!("goal: {e}")))?;
    let checker = owlproofs_core::reasoner::EntailmentChecker::new(&ontology);
    let budget = Budget { max_count, max_tests };
    let (just, truncated) = justify::min_size_justification(&checker, &goal_axiom, budget)
        .map_err(|e| data_err(e.to_string()))?;
    println!("goal: {goal_axiom}");
    println!("minimal justification ({} axioms):", just.axioms.len());
    for idx in &just.axioms {
        println!("  [{idx}] {}", ontology.axiom(*idx));
    }
    println!("enumeration truncated: {truncated}");
    Ok(())
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon, CliError> {
    let mut lexicon = Lexicon::new();
    if let Some(path) = path {
        for (lineno, line) in read_file(path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((name, label)) = line.split_once('\t') else {
                return Err(data_err(format!(
                    "{}:{}: expected identifier<TAB>label",
                    path.display(),
                    lineno + 1
                )));
            };
            lexicon.insert(name.trim(), label.trim());
        }
    }
    Ok(lexicon)
}

fn verbalize_cmd(
    input: Option<&Path>,
    out: Option<&Path>,
    lexicon_path: Option<&Path>,
) -> Result<(), CliError> {
    let lexicon = load_lexicon(lexicon_path)?;
    let text = match input {
        Some(path) => read_file(path)?,
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| data_err(format!("stdin: {e}")))?;
            buffer
        }
    };
    let mut result = String::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let axiom = parse_dl_axiom(line)
            .map_err(|e| data_err(format!("line {}: {e}", lineno + 1)))?;
        let sentence = verbalize_axiom(&axiom, &lexicon)
            .map_err(|e| data_err(format!("line {}: {e}", lineno + 1)))?;
        result.push_str(&sentence);
        result.push('\n');
    }
    match out {
        Some(path) => write_file(path, &result)?,
        None => print!("{result}"),
    }
    Ok(())
}

pub struct BuildOverrides {
    pub quota: Option<usize>,
    pub ratios: Option<String>,
    pub distance_range: Option<String>,
    pub modes: Option<String>,
    pub seed: Option<u64>,
}

fn parse_ratios(text: &str) -> Result<Vec<(u32, u32)>, CliError> {
    text.split(',')
        .map(|part| {
            let (l, r) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| data_err(format!("ratio '{part}' is not of the form 1:N")))?;
            let l = l.trim().parse().map_err(|_| data_err(format!("bad ratio '{part}'")))?;
            let r = r.trim().parse().map_err(|_| data_err(format!("bad ratio '{part}'")))?;
            Ok((l, r))
        })
        .collect()
}

fn parse_modes(text: &str) -> Result<std::collections::BTreeSet<BuildMode>, CliError> {
    text.split(',')
        .map(|part| match part.trim() {
            "standard" => Ok(BuildMode::Standard),
            "hard" => Ok(BuildMode::Hard),
            "natural_language" => Ok(BuildMode::NaturalLanguage),
            "just_only" => Ok(BuildMode::JustOnly),
            "naming" => Ok(BuildMode::Naming),
            "incomplete" => Ok(BuildMode::Incomplete),
            other => Err(data_err(format!("unknown mode '{other}'"))),
        })
        .collect()
}

#[derive(Serialize)]
struct BuildManifest<'a> {
    input: String,
    config: &'a BuildConfig,
    files: Vec<FileEntry>,
    warnings: &'a [String],
    guard_failures: usize,
    truncated_enumerations: usize,
    parse_report: ParseSummary,
}

#[derive(Serialize)]
struct FileEntry {
    file: String,
    mode: String,
    ratio: (u32, u32),
    samples: usize,
}

#[derive(Serialize)]
struct ParseSummary {
    accepted: usize,
    skipped: usize,
    non_el_filtered: usize,
}

fn build_dataset_cmd(
    input: &Path,
    out_dir: &Path,
    config_path: Option<&Path>,
    overrides: BuildOverrides,
) -> Result<(), CliError> {
    let file_config = config::load(config_path).map_err(data_err)?;
    let mut cfg = file_config.build.clone();
    if let Some(quota) = overrides.quota {
        cfg.per_distance_quota = quota;
    }
    if let Some(ratios) = &overrides.ratios {
        cfg.ratios = parse_ratios(ratios)?;
    }
    if let Some(range) = &overrides.distance_range {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| data_err("distance range must be LO:HI"))?;
        cfg.distance_range = (
            lo.trim().parse().map_err(|_| data_err("bad distance range"))?,
            hi.trim().parse().map_err(|_| data_err("bad distance range"))?,
        );
    }
    if let Some(modes) = &overrides.modes {
        cfg.modes = parse_modes(modes)?;
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }

    let (ontology, report) = load_ontology(input)?;
    let builder = DatasetBuilder::new(&ontology, Lexicon::new(), file_config.similarity.provider())
        .map_err(|e| data_err(e.to_string()))?;
    let taxonomy = builder.taxonomy();
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("ontology")
        .to_string();
    let output = build_dataset(&builder, &taxonomy, &cfg, &stem)
        .map_err(|e| data_err(e.to_string()))?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| data_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    for group in &output.groups {
        let path = out_dir.join(&group.file_name);
        write_file(&path, &owlproofs_core::io::write_samples(&group.samples))?;
        files.push(FileEntry {
            file: group.file_name.clone(),
            mode: group.mode.to_string(),
            ratio: group.ratio,
            samples: group.samples.len(),
        });
    }
    for warning in &output.warnings {
        log::warn!("{warning}");
    }
    let manifest = BuildManifest {
        input: input.display().to_string(),
        config: &cfg,
        files,
        warnings: &output.warnings,
        guard_failures: output.guard_failures,
        truncated_enumerations: output.truncated_enumerations,
        parse_report: ParseSummary {
            accepted: report.accepted,
            skipped: report.skipped.len(),
            non_el_filtered: report.non_el_filtered,
        },
    };
    write_file(
        &out_dir.join("manifest.json"),
        &format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap()),
    )?;
    let total: usize = output.groups.iter().map(|g| g.samples.len()).sum();
    println!(
        "{total} samples in {} files written to {}",
        output.groups.len(),
        out_dir.display()
    );
    Ok(())
}

pub struct RunArgs {
    pub samples: std::path::PathBuf,
    pub out: std::path::PathBuf,
    pub endpoint: Option<String>,
    pub model: String,
    pub responder: Option<ResponderArg>,
    pub prompt_config: Option<std::path::PathBuf>,
    pub rules: bool,
    pub example: Option<ExampleArg>,
    pub task: Option<TaskArg>,
    pub parallel: usize,
}

fn load_samples(path: &Path) -> Result<Vec<EvalSample>, CliError> {
    read_samples(&read_file(path)?).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

fn run_cmd(args: RunArgs) -> Result<(), CliError> {
    let samples = load_samples(&args.samples)?;
    let file_config = config::load(args.prompt_config.as_deref()).map_err(data_err)?;
    let mut cfg = file_config.prompt.clone();
    if args.rules {
        cfg.include_rules = true;
    }
    if let Some(example) = args.example {
        cfg.example_mode = match example {
            ExampleArg::Simp => ExampleMode::Simp,
            ExampleArg::Detail => ExampleMode::Detail,
            ExampleArg::None => ExampleMode::None,
        };
    }
    match args.task {
        Some(TaskArg::Incomplete) => cfg.task = Task::Incomplete,
        Some(TaskArg::Standard) => cfg.task = Task::Standard,
        None => {
            // Infer from the samples when unambiguous.
            if samples.iter().all(|s| s.mode.is_incomplete()) {
                cfg.task = Task::Incomplete;
            }
        }
    }

    let responder = match (&args.endpoint, args.responder) {
        (Some(endpoint), None) => Responder::Endpoint(ChatClient::new(endpoint.clone())),
        (None, Some(ResponderArg::Gold)) => Responder::Gold,
        (None, Some(ResponderArg::Empty)) => Responder::Empty,
        (None, Some(ResponderArg::Corrupt)) => Responder::Corrupt,
        (None, None) => {
            return Err(data_err("either --endpoint or --responder is required"))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let manifest = run_batch(&samples, &cfg, &responder, &args.model, &args.out, args.parallel)
        .map_err(|e| data_err(format!("cannot write {}: {e}", args.out.display())))?;

    #[derive(Serialize)]
    struct RunManifestOut<'a> {
        prompt_config: &'a PromptConfig,
        #[serde(flatten)]
        manifest: &'a owlproofs_core::runner::RunManifest,
    }
    let manifest_path = args.out.with_extension("manifest.json");
    write_file(
        &manifest_path,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&RunManifestOut { prompt_config: &cfg, manifest: &manifest })
                .unwrap()
        ),
    )?;

    let endpoint_failures: usize = manifest.failed.values().sum();
    println!(
        "{} completed, {} skipped (resume), {} failed",
        manifest.completed, manifest.skipped_existing, endpoint_failures
    );
    if args.endpoint.is_some() && manifest.completed == 0 && endpoint_failures > 0 {
        let reasons: Vec<String> =
            manifest.failed.iter().map(|(r, n)| format!("{r} ({n})")).collect();
        return Err(CliError::Endpoint(format!(
            "all requests failed: {}",
            reasons.join(", ")
        )));
    }
    Ok(())
}

fn parse_response_cmd(responses: &Path, out: &Path, task: TaskArg) -> Result<(), CliError> {
    let records = read_run_records(&read_file(responses)?);
    #[derive(Serialize)]
    struct ParsedLine {
        sample_id: String,
        format_ok: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        axioms_used: Option<Vec<u32>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        steps: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        missing: Option<bool>,
    }
    let mut text = String::new();
    for record in records {
        let line = match task {
            TaskArg::Standard => match proofdsl::parse_proof(&record.response) {
                Ok(script) => ParsedLine {
                    sample_id: record.sample_id,
                    format_ok: true,
                    error: None,
                    axioms_used: Some(script.axioms_used.iter().copied().collect()),
                    steps: Some(script.steps.len()),
                    missing: None,
                },
                Err(e) => ParsedLine {
                    sample_id: record.sample_id,
                    format_ok: false,
                    error: Some(e.reason),
                    axioms_used: None,
                    steps: None,
                    missing: None,
                },
            },
            TaskArg::Incomplete => match proofdsl::parse_incomplete(&record.response) {
                Ok(parsed) => ParsedLine {
                    sample_id: record.sample_id,
                    format_ok: true,
                    error: None,
                    axioms_used: Some(parsed.useful.iter().copied().collect()),
                    steps: None,
                    missing: Some(parsed.missing),
                },
                Err(e) => ParsedLine {
                    sample_id: record.sample_id,
                    format_ok: false,
                    error: Some(e.reason),
                    axioms_used: None,
                    steps: None,
                    missing: None,
                },
            },
        };
        text.push_str(&serde_json::to_string(&line).unwrap());
        text.push('\n');
    }
    write_file(out, &text)?;
    Ok(())
}

fn summary_tsv(report: &AggregateReport) -> String {
    let mut out = String::from(
        "values\tFormat-Correct\tJaccard Avg.\tSimp. axiom-wise\tSimp. overall\tSimp. length-drop\tDeriv. step-wise\tDeriv. overall\t#Steps\n",
    );
    for (label, m, rate) in [
        ("raw", &report.raw, report.format_rate_pct),
        ("weighted", &report.weighted, report.format_rate_pct),
    ] {
        out.push_str(&format!(
            "{label}\t{rate:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\n",
            100.0 * m.jaccard,
            100.0 * m.simp_axiom_wise,
            100.0 * m.simp_overall,
            m.length_drop_pct,
            100.0 * m.deriv_step_wise,
            100.0 * m.deriv_overall,
            m.avg_steps,
        ));
    }
    if let Some(inc) = &report.incomplete {
        out.push_str("\nincomplete\tn\tF1\tMissing Acc.\tUseful Jaccard\n");
        out.push_str(&format!(
            "incomplete\t{}\t{:.4}\t{:.4}\t{:.4}\n",
            inc.n, inc.f1, inc.missing_accuracy, inc.useful_jaccard_mean
        ));
        for (k, mean) in &inc.useful_jaccard_by_k {
            out.push_str(&format!("useful_jaccard_k{k}\t\t\t\t{mean:.4}\n"));
        }
    }
    out
}

fn groups_tsv(report: &AggregateReport) -> String {
    let mut out = String::from(
        "distance\tjsize\tn\tformat_rate\tjaccard\tsimp_axiom_wise\tsimp_overall\tderiv_step_wise\tderiv_overall\n",
    );
    for cell in &report.groups {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.2}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\n",
            cell.atomic_distance,
            cell.justification_size,
            cell.n,
            cell.format_rate_pct,
            cell.weighted.jaccard,
            cell.weighted.simp_axiom_wise,
            cell.weighted.simp_overall,
            cell.weighted.deriv_step_wise,
            cell.weighted.deriv_overall,
        ));
    }
    out
}

fn score_cmd(samples_path: &Path, responses_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let samples = load_samples(samples_path)?;
    let records = read_run_records(&read_file(responses_path)?);
    let responses: BTreeMap<String, String> = records
        .into_iter()
        .filter(|r| r.error.is_none())
        .map(|r| (r.sample_id, r.response))
        .collect();

    let scores = score_batch(&samples, &responses);
    let report = aggregate(&scores).map_err(|e| data_err(e.to_string()))?;

    std::fs::create_dir_all(out_dir)
        .map_err(|e| data_err(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut scores_text = String::new();
    for score in &scores {
        scores_text.push_str(&serde_json::to_string(score).unwrap());
        scores_text.push('\n');
    }
    write_file(&out_dir.join("scores.jsonl"), &scores_text)?;
    write_file(&out_dir.join("summary.tsv"), &summary_tsv(&report))?;
    write_file(&out_dir.join("groups.tsv"), &groups_tsv(&report))?;
    #[derive(Serialize)]
    struct ReportOut<'a> {
        samples: String,
        responses: String,
        #[serde(flatten)]
        report: &'a AggregateReport,
    }
    write_file(
        &out_dir.join("report.json"),
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&ReportOut {
                samples: samples_path.display().to_string(),
                responses: responses_path.display().to_string(),
                report: &report,
            })
            .unwrap()
        ),
    )?;
    println!(
        "scored {} samples: format {:.2}%, weighted jaccard {:.4}",
        report.n, report.format_rate_pct, report.weighted.jaccard
    );
    Ok(())
}

fn report_cmd(scores_path: &Path, group_by: &str, out: &Path) -> Result<(), CliError> {
    let keys: Vec<&str> = group_by.split(',').map(str::trim).collect();
    for key in &keys {
        if !matches!(*key, "distance" | "jsize") {
            return Err(data_err(format!("unsupported group key '{key}'")));
        }
    }
    let text = read_file(scores_path)?;
    let scores: Vec<SampleScore> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| data_err(format!("bad score line: {e}"))))
        .collect::<Result<_, _>>()?;
    let report = aggregate(&scores).map_err(|e| data_err(e.to_string()))?;
    write_file(out, &groups_tsv(&report))?;
    println!("grouped matrix written to {}", out.display());
    Ok(())
}
