//! Subcommand implementations: thin orchestration over the engine crate.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use anxlex_core::analysis::{
    affect_space_points, aoa_class_shares, aoa_distribution, correlation_matrix, join_lexicons,
    non_neutral_classes, read_aoa_csv, AffectDims, AffectSpaceConfig, CorrelationMethod,
};
use anxlex_core::annotation::{
    qc_filter, read_golds_csv, read_responses_csv, run_pipeline, GoldSet, PipelineConfig,
};
use anxlex_core::arcs::{evaluate as evaluate_arcs, gold_arc, predicted_arc, BinSpec};
use anxlex_core::lexicon::OrdinalClass;
use anxlex_core::reliability::{reliability_report, GroupedResponses};
use anxlex_core::sampler::{generate_stream, MixingMode, SamplerConfig};
use anxlex_core::{EmotionArc, Lexicon, ScoreTable, TextStream};

use crate::output::{open_out, write_comment_header, write_json};
use crate::{
    AggregateArgs, AoaArgs, ArcArgs, ClassdistArgs, CorrelateArgs, EvaluateArgs, FormatArg,
    MethodArg, MixingArg, ReliabilityArgs, SampleArgs,
};

fn open_in(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "lexicon".to_string());
    Lexicon::from_tsv(open_in(path)?, &name)
        .with_context(|| format!("reading lexicon {}", path.display()))
}

fn load_stream(path: &Path) -> Result<TextStream> {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "stream".to_string());
    TextStream::read_jsonl(open_in(path)?, &id)
        .with_context(|| format!("reading stream {}", path.display()))
}

fn load_golds(path: &Option<PathBuf>) -> Result<GoldSet> {
    match path {
        Some(p) => {
            read_golds_csv(open_in(p)?).with_context(|| format!("reading golds {}", p.display()))
        }
        None => Ok(GoldSet::new()),
    }
}

/// `name=path`, or a bare path whose stem becomes the name.
fn parse_named_path(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((name, path)) => (name.to_string(), PathBuf::from(path)),
        None => {
            let path = PathBuf::from(spec);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (name, path)
        }
    }
}

pub fn aggregate(args: &AggregateArgs, seed: u64) -> Result<()> {
    let responses = read_responses_csv(open_in(&args.responses)?)
        .with_context(|| format!("reading responses {}", args.responses.display()))?;
    if responses.is_empty() {
        bail!("responses file {} holds no rows", args.responses.display());
    }
    let golds = load_golds(&args.golds)?;
    let cfg = PipelineConfig {
        gold_accuracy_threshold: args.threshold,
        gold_tolerance: args.tolerance,
        include_golds_in_aggregation: args.include_golds,
    };
    let (lexicon, summary, stats) = run_pipeline::<f64>(&responses, &golds, &cfg, &args.name)?;

    let mut lex_out = open_out(&args.lexicon_out)?;
    lexicon.write_tsv(
        &mut lex_out,
        &crate::output::provenance_comments(seed, args)?,
    )?;
    lex_out.flush()?;

    let mut summary_out = open_out(&args.summary_out)?;
    write_json(
        &mut summary_out,
        seed,
        args,
        "summary",
        serde_json::to_value(&summary)?,
    )?;
    summary_out.flush()?;

    if let Some(stats_path) = &args.stats_out {
        let mut stats_out = open_out(stats_path)?;
        write_json(
            &mut stats_out,
            seed,
            args,
            "annotators",
            serde_json::to_value(&stats)?,
        )?;
        stats_out.flush()?;
    }
    eprintln!(
        "aggregated {} responses into {} terms ({} annotators kept, {} discarded)",
        summary.n_annotations_kept,
        summary.n_terms,
        summary.n_annotators_kept,
        summary.n_annotators_discarded
    );
    Ok(())
}

pub fn reliability(args: &ReliabilityArgs, seed: u64) -> Result<()> {
    let responses = read_responses_csv(open_in(&args.responses)?)
        .with_context(|| format!("reading responses {}", args.responses.display()))?;
    let filtered;
    let input = if args.golds.is_some() {
        let golds = load_golds(&args.golds)?;
        filtered = qc_filter(&responses, &golds, &PipelineConfig::default()).kept;
        &filtered
    } else {
        &responses
    };
    let grouped = GroupedResponses::from_records(input);
    let report = reliability_report::<f64>(
        &grouped,
        &args.schemes,
        &args.thresholds,
        args.trials,
        seed,
    )?;
    let mut out = open_out(&args.out)?;
    write_json(
        &mut out,
        seed,
        args,
        "reliability",
        serde_json::to_value(&report)?,
    )?;
    out.flush()?;
    eprintln!(
        "SHR over {} trials on {} terms: spearman {:.4}, pearson {:.4}",
        report.n_trials, report.n_terms, report.shr_spearman, report.shr_pearson
    );
    Ok(())
}

fn binspec_from(bin_size: usize, step: usize, period: Option<i64>) -> Result<BinSpec> {
    Ok(match period {
        Some(secs) => BinSpec::time(secs)?,
        None => BinSpec::count(bin_size, step)?,
    })
}

fn write_arc_csv(
    path: &Path,
    arc: &EmotionArc,
    seed: u64,
    config: &impl serde::Serialize,
) -> Result<()> {
    let mut out = open_out(path)?;
    write_comment_header(&mut out, seed, config)?;
    writeln!(out, "bin_start,score,coverage")?;
    for point in &arc.points {
        writeln!(out, "{},{},{}", point.bin_start, point.mean, point.coverage)?;
    }
    out.flush()?;
    Ok(())
}

pub fn arc(args: &ArcArgs, seed: u64) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let stream = load_stream(&args.stream)?;
    let spec = binspec_from(args.bin_size, args.step, args.period)?;
    let predicted = predicted_arc(&stream, &lexicon, &spec)?;
    write_arc_csv(&args.out, &predicted, seed, args)?;
    if args.gold_out.is_some() || args.report_out.is_some() {
        let gold = gold_arc(&stream, &spec)?;
        if let Some(gold_path) = &args.gold_out {
            write_arc_csv(gold_path, &gold, seed, args)?;
        }
        if let Some(report_path) = &args.report_out {
            let report = evaluate_arcs(&predicted, &gold, &spec)?;
            let mut out = open_out(report_path)?;
            write_json(&mut out, seed, args, "report", serde_json::to_value(&report)?)?;
            out.flush()?;
        }
    }
    eprintln!(
        "scored {} bins over {} posts with '{}'",
        predicted.len(),
        stream.len(),
        lexicon.name()
    );
    Ok(())
}

pub fn sample(args: &SampleArgs, seed: u64) -> Result<()> {
    let posts = load_stream(&args.corpus)?;
    let corpus = anxlex_core::LabeledCorpus::from_posts(posts.posts())?;
    let cfg = SamplerConfig {
        total_length: args.length,
        n_streams: args.streams,
        burst_len_min: args.burst_min,
        burst_len_max: args.burst_max,
        mixing: match args.mixing {
            MixingArg::Exact => MixingMode::Exact,
            MixingArg::Bernoulli => MixingMode::Bernoulli,
        },
        master_seed: seed,
    };
    cfg.validate()?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    // Streams are generated and written in parallel; each is determined by
    // (seed, index) alone, so the job count never changes the bytes.
    let entries: Vec<serde_json::Value> = (0..cfg.n_streams)
        .into_par_iter()
        .map(|index| -> Result<serde_json::Value> {
            let sampled = generate_stream::<f64>(&corpus, &cfg, index)?;
            let file_name = format!("{}.jsonl", sampled.stream.id());
            let path = args.out_dir.join(&file_name);
            let mut writer = std::io::BufWriter::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            );
            sampled.stream.write_jsonl(&mut writer)?;
            writer.flush()?;
            Ok(json!({
                "id": sampled.stream.id(),
                "file": file_name,
                "n_posts": sampled.stream.len(),
                "bursts": serde_json::to_value(&sampled.bursts)?,
            }))
        })
        .collect::<Result<_>>()?;

    let manifest_path = args.out_dir.join("manifest.json");
    let mut manifest = open_out(&manifest_path)?;
    write_json(
        &mut manifest,
        seed,
        args,
        "streams",
        serde_json::Value::Array(entries),
    )?;
    manifest.flush()?;
    eprintln!(
        "wrote {} streams of {} posts to {}",
        cfg.n_streams,
        cfg.total_length,
        args.out_dir.display()
    );
    Ok(())
}

fn stream_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .with_context(|| format!("listing {}", path.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no .jsonl streams under {}", path.display());
        }
        Ok(files)
    } else {
        Ok(vec![path.to_path_buf()])
    }
}

pub fn evaluate(args: &EvaluateArgs, seed: u64) -> Result<()> {
    let lexicons: Vec<(String, Lexicon)> = args
        .lexicon
        .iter()
        .map(|spec| {
            let (name, path) = parse_named_path(spec);
            Ok((name, load_lexicon(&path)?))
        })
        .collect::<Result<_>>()?;
    let files = stream_files(&args.streams)?;

    // mean measures per (lexicon, bin size) over all streams
    struct Cell {
        spearman: f64,
        pearson: f64,
        rmse: f64,
        rmse_raw: f64,
    }
    let per_stream: Vec<Vec<Cell>> = files
        .par_iter()
        .map(|file| -> Result<Vec<Cell>> {
            let stream = load_stream(file)?;
            let mut cells = Vec::with_capacity(lexicons.len() * args.bin_sizes.len());
            for (name, lexicon) in &lexicons {
                for &k in &args.bin_sizes {
                    let spec = BinSpec::count(k, args.step)?;
                    let gold = gold_arc(&stream, &spec)?;
                    let predicted = predicted_arc(&stream, lexicon, &spec)?;
                    let report = evaluate_arcs(&predicted, &gold, &spec).with_context(|| {
                        format!(
                            "evaluating '{}' at bin size {k} on {}",
                            name,
                            file.display()
                        )
                    })?;
                    cells.push(Cell {
                        spearman: report.spearman,
                        pearson: report.pearson,
                        rmse: report.rmse,
                        rmse_raw: report.rmse_raw,
                    });
                }
            }
            Ok(cells)
        })
        .collect::<Result<_>>()?;

    let n_streams = files.len() as f64;
    let mut out = open_out(&args.out)?;
    write_comment_header(&mut out, seed, args)?;
    writeln!(
        out,
        "lexicon,bin_size,step,n_streams,mean_spearman,mean_pearson,mean_rmse,mean_rmse_raw"
    )?;
    for (li, (name, _)) in lexicons.iter().enumerate() {
        for (ki, &k) in args.bin_sizes.iter().enumerate() {
            let idx = li * args.bin_sizes.len() + ki;
            let sum = |pick: &dyn Fn(&Cell) -> f64| {
                per_stream.iter().map(|cells| pick(&cells[idx])).sum::<f64>()
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                name,
                k,
                args.step,
                files.len(),
                sum(&|c| c.spearman) / n_streams,
                sum(&|c| c.pearson) / n_streams,
                sum(&|c| c.rmse) / n_streams,
                sum(&|c| c.rmse_raw) / n_streams,
            )?;
        }
    }
    out.flush()?;
    eprintln!(
        "evaluated {} lexicon(s) x {} bin size(s) over {} stream(s)",
        lexicons.len(),
        args.bin_sizes.len(),
        files.len()
    );
    Ok(())
}

pub fn correlate(args: &CorrelateArgs, seed: u64) -> Result<()> {
    let tables: Vec<ScoreTable> = args
        .resource
        .iter()
        .map(|spec| {
            let (name, path) = parse_named_path(spec);
            let lexicon = load_lexicon(&path)?;
            let mut table = ScoreTable::from_lexicon(&lexicon);
            if lexicon.name() != name {
                table = ScoreTable::from_pairs(
                    &name,
                    lexicon.iter().map(|e| (e.term().to_string(), e.score().value())),
                );
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    let join = join_lexicons(&tables)?;
    let method = match args.method {
        MethodArg::Spearman => CorrelationMethod::Spearman,
        MethodArg::Pearson => CorrelationMethod::Pearson,
    };
    let matrix = correlation_matrix(&join, method)?;

    let mut out = open_out(&args.out)?;
    write_comment_header(&mut out, seed, args)?;
    writeln!(out, "# joined terms: {}", matrix.n_terms)?;
    writeln!(out, ",{}", matrix.resources.join(","))?;
    for (i, name) in matrix.resources.iter().enumerate() {
        let row: Vec<String> = (0..matrix.resources.len())
            .map(|j| matrix.get(i, j).to_string())
            .collect();
        writeln!(out, "{},{}", name, row.join(","))?;
    }
    out.flush()?;

    if let Some(affect_path) = &args.affect_out {
        let dims = AffectDims {
            anxiety: "anxiety".into(),
            valence: "valence".into(),
            arousal: "arousal".into(),
            dominance: "dominance".into(),
        };
        let cfg = AffectSpaceConfig {
            anxiety_cutoff_high: args.affect_cutoff,
            anxiety_cutoff_low: -args.affect_cutoff,
            ..AffectSpaceConfig::default()
        };
        let space = affect_space_points(&join, &dims, &cfg)?;
        let mut out = open_out(affect_path)?;
        write_comment_header(&mut out, seed, args)?;
        for (plane, counts) in [("va", &space.counts_va), ("vd", &space.counts_vd)] {
            for c in counts {
                let (x, y) = if plane == "va" { ("v", "a") } else { ("v", "d") };
                writeln!(
                    out,
                    "# count {} {:?} {}",
                    c.quadrant.label(x, y),
                    c.band,
                    c.count
                )?;
            }
        }
        writeln!(out, "term,v,a,d,anxiety,quadrant_va,quadrant_vd")?;
        for p in &space.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.term,
                p.valence,
                p.arousal,
                p.dominance,
                p.anxiety,
                p.quadrant_va.label("v", "a"),
                p.quadrant_vd.label("v", "d"),
            )?;
        }
        out.flush()?;
    }
    eprintln!(
        "correlated {} resources over {} shared terms",
        matrix.resources.len(),
        matrix.n_terms
    );
    Ok(())
}

pub fn aoa(args: &AoaArgs, seed: u64) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let records = read_aoa_csv(open_in(&args.aoa)?)
        .with_context(|| format!("reading {}", args.aoa.display()))?;

    let dist = aoa_distribution(&lexicon, &records)?;
    let mut out = open_out(&args.dist_out)?;
    write_comment_header(&mut out, seed, args)?;
    writeln!(out, "# joined terms: {}", dist.n_joined)?;
    writeln!(out, "age,class,percentage")?;
    for row in &dist.rows {
        for (class, pct) in OrdinalClass::ALL.iter().zip(&row.class_percentages) {
            writeln!(out, "{},{},{}", row.age, class, pct)?;
        }
    }
    out.flush()?;

    let shares = aoa_class_shares(&lexicon, &records)?;
    let mut out = open_out(&args.shares_out)?;
    write_comment_header(&mut out, seed, args)?;
    writeln!(out, "age,class,percentage")?;
    for row in &shares {
        for (class, pct) in non_neutral_classes().iter().zip(&row.class_shares) {
            writeln!(out, "{},{},{}", row.age, class, pct)?;
        }
    }
    out.flush()?;
    eprintln!(
        "joined {} terms with acquisition ages across {} year(s)",
        dist.n_joined,
        dist.rows.len()
    );
    Ok(())
}

pub fn classdist(args: &ClassdistArgs, seed: u64) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let dist = lexicon.class_distribution()?;
    let mut out = open_out(&args.out)?;
    match args.format {
        FormatArg::Json => {
            write_json(
                &mut out,
                seed,
                args,
                "distribution",
                serde_json::to_value(&dist)?,
            )?;
        }
        FormatArg::Csv => {
            write_comment_header(&mut out, seed, args)?;
            writeln!(out, "class,count,percentage")?;
            for row in &dist.rows {
                writeln!(out, "{},{},{}", row.class, row.count, row.percentage)?;
            }
        }
    }
    out.flush()?;
    eprintln!("{} terms across 7 classes", dist.total);
    Ok(())
}
