use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use claimcheck::corpus::{
    annotate_corpus, dataset_stats, read_jsonl, wice, Claim, Corpus, EntailmentLabel, GoldAnnotation,
    RawAnnotationRecord, SupportSet,
};
use claimcheck::decompose::{decompose, Decomposition, PromptTemplate};
use claimcheck::entail::{
    classify_with_claimsplit, filter_trivially_entailed, max_stretch, partitions, Aggregation, EntailmentVerdict, Level,
};
use claimcheck::evalkit::{
    auroc, binary_f1_acc, mean_retrieval_prf, paired_bootstrap, BinaryPrediction, BootstrapSettings, EvalReport,
    DEFAULT_RESAMPLES,
};
use claimcheck::oracle::{build_oracle_dataset, score_oracle, OracleLevel};
use claimcheck::retrieval::{
    bm25_scores, nli_sentence_scores, retrieve_then_predict, select_above, top_k, tune_threshold, Bm25Params, DevItem,
    RetrievalRecord, RetrievalScore, DEFAULT_TOP_K,
};
use claimcheck::scorer::Scorer;
use claimcheck::textproc::{tokenize, DEFAULT_CHUNK_TOKENS};
use claimcheck::{EvidenceSet, Subclaim};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    AggregateArg, Cli, Command, Common, DecomposeArgs, EntailArgs, EvalArgs, IngestArgs, InputFormat, LevelArg, Method,
    OracleArgs, RetrieveArgs, Strategy, Unit,
};
use crate::backend::{build_completion_client, build_scorer};
use crate::config::{resolve, Header};
use crate::output::{read_artifact, write_artifact, write_document, write_with_manifest};
use crate::UsageError;

const DEFAULT_ENTAIL_THRESHOLD: f64 = 0.5;
const DEFAULT_WORKERS: usize = 5;

/// Shared options with defaults applied.
struct Ctx {
    command: &'static str,
    common: Common,
    jobs: usize,
}

/// Effective shared settings recorded in artifact headers.
#[derive(Serialize)]
struct SharedSettings<'a> {
    input: Option<&'a Path>,
    evidence: Option<&'a Path>,
    backend: &'static str,
    endpoint: Option<&'a str>,
    model: Option<&'a str>,
    chunk_tokens: usize,
    k: usize,
    threshold: Option<f64>,
    seed: u64,
}

impl Ctx {
    fn chunk_tokens(&self) -> usize {
        self.common.chunk_tokens.unwrap_or(DEFAULT_CHUNK_TOKENS)
    }

    fn k(&self) -> usize {
        self.common.k.unwrap_or(DEFAULT_TOP_K)
    }

    fn seed(&self) -> u64 {
        self.common.seed.unwrap_or(0)
    }

    fn entail_threshold(&self) -> f64 {
        self.common.threshold.unwrap_or(DEFAULT_ENTAIL_THRESHOLD)
    }

    fn input(&self) -> Result<&Path> {
        self.common
            .input
            .as_deref()
            .ok_or_else(|| UsageError(format!("{} needs --input", self.command)).into())
    }

    fn out(&self) -> Result<&Path> {
        self.common
            .out
            .as_deref()
            .ok_or_else(|| UsageError(format!("{} needs --out", self.command)).into())
    }

    fn corpus(&self) -> Result<Corpus> {
        let input = self.input()?;
        let evidence = self
            .common
            .evidence
            .as_deref()
            .ok_or_else(|| UsageError(format!("{} needs --evidence", self.command)))?;
        Ok(Corpus::load(input, evidence)?)
    }

    fn scorer(&self) -> Result<Scorer> {
        build_scorer(&self.common, self.jobs)
    }

    fn header(&self, options: Value, extra_inputs: &[&Path]) -> Result<Header> {
        let c = &self.common;
        let shared = SharedSettings {
            input: c.input.as_deref(),
            evidence: c.evidence.as_deref(),
            backend: match c.backend {
                Some(crate::args::BackendKind::Remote) => "remote",
                Some(crate::args::BackendKind::Replay) => "replay",
                _ => "lexical",
            },
            endpoint: c.endpoint.as_deref(),
            model: c.model.as_deref(),
            chunk_tokens: self.chunk_tokens(),
            k: self.k(),
            threshold: c.threshold,
            seed: self.seed(),
        };
        let config = json!({ "shared": shared, "options": options });
        let mut inputs: Vec<&Path> = Vec::new();
        if let Some(p) = c.input.as_deref().filter(|p| p.is_file()) {
            inputs.push(p);
        }
        if let Some(p) = c.evidence.as_deref() {
            inputs.push(p);
        }
        inputs.extend(extra_inputs.iter().copied().filter(|p| p.is_file()));
        Header::new(self.command, config, &inputs)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let (command, common) = resolve(cli.command, cli.common)?;
    let jobs = common
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        log::debug!("thread pool already configured: {e}");
    }
    let ctx = Ctx {
        command: command.name(),
        common,
        jobs,
    };
    match command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Stats => stats(&ctx),
        Command::Decompose(a) => decompose_cmd(&ctx, a),
        Command::Filter => filter(&ctx),
        Command::Entail(a) => entail(&ctx, a),
        Command::Retrieve(a) => retrieve(&ctx, a),
        Command::Rtp(a) => rtp(&ctx, a),
        Command::Oracle(a) => oracle(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
    }
}

fn ingest(ctx: &Ctx, args: IngestArgs) -> Result<()> {
    let out = ctx.out()?;
    let format = args.format.unwrap_or(InputFormat::Repo);
    let mut manifest = serde_json::Map::new();
    let corpus = match format {
        InputFormat::Wice => {
            let split_name = args.split.clone().unwrap_or_else(|| "dev".into());
            let split = wice::WiceSplit::in_release(ctx.input()?, &split_name);
            if !split.exists() {
                return Err(UsageError(format!(
                    "no {split_name} split under {} (expected claim/ and subclaim/ directories)",
                    ctx.input()?.display()
                ))
                .into());
            }
            let (corpus, orphans) = wice::import_split(&split)?;
            if !orphans.is_empty() {
                log::warn!("{} subclaims without a matching claim were skipped", orphans.len());
            }
            manifest.insert("orphan_subclaims".into(), json!(orphans));
            corpus
        }
        InputFormat::Repo => {
            let corpus = ctx.corpus()?;
            match &args.annotations {
                Some(path) => {
                    let records: Vec<RawAnnotationRecord> = read_jsonl(path)?;
                    let workers = args.workers.unwrap_or(DEFAULT_WORKERS);
                    let outcome = annotate_corpus(&corpus.claims, &records, workers)?;
                    log::info!(
                        "annotated {} claims, dropped {}, token annotations discarded for {} subclaims",
                        outcome.claims.len(),
                        outcome.dropped.len(),
                        outcome.token_excluded.len()
                    );
                    manifest.insert(
                        "dropped".into(),
                        json!(outcome.dropped.iter().map(|(id, why)| json!({"claim_id": id, "reason": why})).collect::<Vec<_>>()),
                    );
                    manifest.insert("token_excluded".into(), json!(outcome.token_excluded));
                    Corpus::new(outcome.claims, corpus.documents.into_values().collect())?
                }
                None => corpus,
            }
        }
    };
    manifest.insert("claims".into(), json!(corpus.claims.len()));
    manifest.insert("documents".into(), json!(corpus.documents.len()));
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    corpus.save(out.join("claims.jsonl"), out.join("evidence.jsonl"))?;
    let extra: Vec<&Path> = args.annotations.iter().map(PathBuf::as_path).collect();
    let header = ctx.header(serde_json::to_value(&args)?, &extra)?;
    write_document(&out.join("manifest.json"), &header, Value::Object(manifest))?;
    log::info!("wrote corpus to {}", out.display());
    Ok(())
}

fn stats(ctx: &Ctx) -> Result<()> {
    let corpus = ctx.corpus()?;
    let report = dataset_stats(&corpus);
    print!("{}", report.render_table());
    if let Some(out) = &ctx.common.out {
        let header = ctx.header(Value::Null, &[])?;
        write_document(out, &header, json!({ "stats": report }))?;
    }
    Ok(())
}

fn decompose_cmd(ctx: &Ctx, args: DecomposeArgs) -> Result<()> {
    let out = ctx.out()?;
    let claims: Vec<Claim> = read_jsonl(ctx.input()?)?;
    let template = match &args.template {
        Some(path) => PromptTemplate::load(path)?,
        None => PromptTemplate::wice(),
    };
    let client = build_completion_client(&ctx.common, args.record.as_deref())?;
    let decompositions: Vec<Decomposition> = claims
        .par_iter()
        .map(|c| decompose(&c.id, &c.text, client.as_ref(), &template))
        .collect::<Result<_, _>>()?;
    let accepted = decompositions.iter().filter(|d| d.accepted).count();
    log::info!("{accepted} of {} claims have an accepted decomposition", decompositions.len());

    let mut extra: Vec<&Path> = args.template.iter().map(PathBuf::as_path).collect();
    extra.extend(ctx.common.replay.as_deref());
    let options = json!({ "template": template.name, "claims_out": args.claims_out });
    let header = ctx.header(options, &extra)?;
    write_artifact(out, &header, &decompositions)?;

    if let Some(claims_out) = &args.claims_out {
        let updated: Vec<Claim> = claims
            .iter()
            .zip(&decompositions)
            .filter(|(_, d)| d.accepted)
            .map(|(c, d)| {
                let mut c = c.clone();
                c.subclaims = d
                    .subclaims
                    .iter()
                    .enumerate()
                    .map(|(i, text)| Subclaim::new(format!("{}-{i}", c.id), text.as_str()))
                    .collect();
                c
            })
            .collect();
        let rejected: Vec<&str> = decompositions.iter().filter(|d| !d.accepted).map(|d| d.claim_id.as_str()).collect();
        write_with_manifest(claims_out, &header, &updated, json!({ "retained": updated.len(), "rejected": rejected }))?;
    }
    Ok(())
}

fn filter(ctx: &Ctx) -> Result<()> {
    let out = ctx.out()?;
    let corpus = ctx.corpus()?;
    let scorer = ctx.scorer()?;
    let threshold = ctx.entail_threshold();
    let outcome = filter_trivially_entailed(&corpus, &corpus.claims, &scorer, ctx.chunk_tokens(), threshold)?;
    log::info!("removed {} trivially entailed claims, kept {}", outcome.removed.len(), outcome.retained.len());
    let header = ctx.header(json!({ "entail_threshold": threshold }), &[])?;
    write_with_manifest(
        out,
        &header,
        &outcome.retained,
        json!({ "retained": outcome.retained.len(), "removed": outcome.removed }),
    )
}

fn level(arg: LevelArg) -> Level {
    match arg {
        LevelArg::Sentence => Level::Sentence,
        LevelArg::Chunk => Level::Chunk,
        LevelArg::Document => Level::Document,
    }
}

fn aggregation(arg: AggregateArg) -> Aggregation {
    match arg {
        AggregateArg::Harmonic => Aggregation::Harmonic,
        AggregateArg::Min => Aggregation::Min,
        AggregateArg::Mean => Aggregation::Mean,
    }
}

/// A claim or subclaim together with its parent claim.
struct Item<'a> {
    claim: &'a Claim,
    subclaim_id: Option<&'a str>,
    id: &'a str,
    text: &'a str,
    gold: Option<&'a GoldAnnotation>,
}

fn items(corpus: &Corpus, unit: Unit) -> Vec<Item<'_>> {
    let mut out = Vec::new();
    for claim in &corpus.claims {
        match unit {
            Unit::Claim => out.push(Item {
                claim,
                subclaim_id: None,
                id: &claim.id,
                text: &claim.text,
                gold: claim.gold.as_ref(),
            }),
            Unit::Subclaim => out.extend(claim.subclaims.iter().map(|s| Item {
                claim,
                subclaim_id: Some(&s.id),
                id: &s.id,
                text: &s.text,
                gold: s.gold.as_ref(),
            })),
        }
    }
    out
}

fn entail(ctx: &Ctx, args: EntailArgs) -> Result<()> {
    let out = ctx.out()?;
    let strategy = args.strategy.unwrap_or(Strategy::Max);
    let level_arg = args.level.unwrap_or(LevelArg::Chunk);
    let aggregate = args.aggregate.unwrap_or(AggregateArg::Harmonic);
    let unit = args.unit.unwrap_or(Unit::Claim);
    if strategy == Strategy::Claimsplit && unit == Unit::Subclaim {
        return Err(UsageError("--strategy claimsplit scores whole claims; drop --unit subclaim".into()).into());
    }
    let corpus = ctx.corpus()?;
    let scorer = ctx.scorer()?;
    let threshold = ctx.entail_threshold();
    let mut verdicts = Vec::new();
    for claim in &corpus.claims {
        let evidence = corpus.evidence(claim)?;
        let parts: Vec<String> = partitions(&evidence, level(level_arg), ctx.chunk_tokens())
            .into_iter()
            .map(|p| p.text)
            .collect();
        match strategy {
            Strategy::Max => match unit {
                Unit::Claim => verdicts.push(max_stretch(&claim.id, &claim.text, &parts, &scorer, threshold)?),
                Unit::Subclaim => {
                    for s in &claim.subclaims {
                        verdicts.push(max_stretch(&s.id, &s.text, &parts, &scorer, threshold)?);
                    }
                }
            },
            Strategy::Claimsplit => {
                let subs: Vec<&str> = claim.subclaims.iter().map(|s| s.text.as_str()).collect();
                verdicts.push(classify_with_claimsplit(&claim.id, &subs, &parts, &scorer, threshold, aggregation(aggregate))?);
            }
        }
    }
    log::info!("scored {} items", verdicts.len());
    let options = json!({ "strategy": strategy, "level": level_arg, "aggregate": aggregate, "unit": unit, "entail_threshold": threshold });
    write_artifact(out, &ctx.header(options, &[])?, &verdicts)
}

fn method_name(method: Method, context_tokens: Option<usize>) -> String {
    match (method, context_tokens) {
        (Method::Bm25, _) => "bm25".into(),
        (Method::Nli, None) => "nli".into(),
        (Method::Nli, Some(n)) => format!("nli+context{n}"),
    }
}

fn retrieval_scores(
    item: &Item<'_>,
    evidence: &EvidenceSet<'_>,
    method: Method,
    context_tokens: Option<usize>,
    scorer: Option<&Scorer>,
) -> Result<Vec<RetrievalScore>> {
    Ok(match method {
        Method::Bm25 => bm25_scores(&tokenize(item.text), evidence, Bm25Params::default()),
        Method::Nli => nli_sentence_scores(item.id, item.text, evidence, scorer.expect("scorer built for nli"), context_tokens)?,
    })
}

fn dev_threshold(args: &RetrieveArgs, method: Method, unit: Unit, scorer: Option<&Scorer>) -> Result<Option<f64>> {
    let Some(dev_input) = &args.dev_input else {
        return Ok(None);
    };
    let dev_evidence = args
        .dev_evidence
        .as_ref()
        .ok_or_else(|| UsageError("--dev-input needs --dev-evidence".into()))?;
    let dev = Corpus::load(dev_input, dev_evidence)?;
    let mut dev_items = Vec::new();
    for item in items(&dev, unit) {
        let Some(gold) = item.gold.filter(|g| !g.support_sets.is_empty()) else {
            continue;
        };
        let evidence = dev.evidence(item.claim)?;
        dev_items.push(DevItem {
            scores: retrieval_scores(&item, &evidence, method, args.context_tokens, scorer)?,
            gold_sets: gold.support_sets.clone(),
        });
    }
    let choice = tune_threshold(&dev_items)?;
    log::info!(
        "tuned threshold {:.6} (dev mean max-F1 {:.4} over {} items)",
        choice.threshold,
        choice.mean_max_f1,
        choice.n_items
    );
    Ok(Some(choice.threshold))
}

fn retrieve(ctx: &Ctx, args: RetrieveArgs) -> Result<()> {
    let out = ctx.out()?;
    let method = args.method.unwrap_or(Method::Nli);
    let unit = args.unit.unwrap_or(Unit::Claim);
    let corpus = ctx.corpus()?;
    let scorer = match method {
        Method::Nli => Some(ctx.scorer()?),
        Method::Bm25 => None,
    };
    let threshold = match ctx.common.threshold {
        Some(t) => Some(t),
        None => dev_threshold(&args, method, unit, scorer.as_ref())?,
    };
    let name = method_name(method, args.context_tokens);
    let mut records = Vec::new();
    for item in items(&corpus, unit) {
        let evidence = corpus.evidence(item.claim)?;
        let scores = retrieval_scores(&item, &evidence, method, args.context_tokens, scorer.as_ref())?;
        let (refs, k) = match threshold {
            Some(t) => (select_above(&scores, t).into_iter().collect::<Vec<_>>(), None),
            None => (top_k(&scores, ctx.k()), Some(ctx.k())),
        };
        records.push(RetrievalRecord {
            claim_id: item.claim.id.clone(),
            subclaim_id: item.subclaim_id.map(str::to_string),
            method: name.clone(),
            threshold,
            k,
            refs: evidence.in_document_order(&refs),
            scores,
        });
    }
    let mut extra: Vec<&Path> = Vec::new();
    extra.extend(args.dev_input.as_deref());
    extra.extend(args.dev_evidence.as_deref());
    let options = json!({ "method": name, "unit": unit, "selection_threshold": threshold });
    write_artifact(out, &ctx.header(options, &extra)?, &records)
}

fn rtp(ctx: &Ctx, args: RetrieveArgs) -> Result<()> {
    let out = ctx.out()?;
    let method = args.method.unwrap_or(Method::Nli);
    let unit = args.unit.unwrap_or(Unit::Claim);
    let corpus = ctx.corpus()?;
    let scorer = ctx.scorer()?;
    let threshold = ctx.entail_threshold();
    let k = ctx.k();
    let mut verdicts = Vec::new();
    for item in items(&corpus, unit) {
        let evidence = corpus.evidence(item.claim)?;
        let scores = retrieval_scores(&item, &evidence, method, args.context_tokens, Some(&scorer))?;
        let (_, verdict) = retrieve_then_predict(item.id, item.text, &evidence, &scores, k, &scorer, threshold)?;
        verdicts.push(verdict);
    }
    let options = json!({ "method": method_name(method, args.context_tokens), "unit": unit, "entail_threshold": threshold });
    write_artifact(out, &ctx.header(options, &[])?, &verdicts)
}

fn oracle(ctx: &Ctx, args: OracleArgs) -> Result<()> {
    let out = ctx.out()?;
    let unit = args.unit.unwrap_or(Unit::Claim);
    let corpus = ctx.corpus()?;
    let ids: Vec<String> = corpus.claims.iter().map(|c| c.id.clone()).collect();
    let level = match unit {
        Unit::Claim => OracleLevel::Claim,
        Unit::Subclaim => OracleLevel::Subclaim,
    };
    let chunks = build_oracle_dataset(&corpus, &ids, level, ctx.seed(), ctx.chunk_tokens())?;
    let header = ctx.header(json!({ "unit": unit }), &[])?;
    write_artifact(out, &header, &chunks)?;
    log::info!("wrote {} oracle chunks", chunks.len());
    if let Some(score_out) = &args.score_out {
        let scorer = ctx.scorer()?;
        let verdicts = score_oracle(&corpus, &chunks, &scorer, ctx.entail_threshold())?;
        write_artifact(score_out, &header, &verdicts)?;
    }
    Ok(())
}

fn binary_f1(scores: &[f64], golds: &[bool], threshold: f64) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&s, &g) in scores.iter().zip(golds) {
        match (s > threshold, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

fn eval(ctx: &Ctx, args: EvalArgs) -> Result<()> {
    if args.verdicts.is_none() && args.retrieval.is_none() {
        return Err(UsageError("eval needs --verdicts and/or --retrieval".into()).into());
    }
    if !args.compare.is_empty() && args.verdicts.is_none() {
        return Err(UsageError("--compare needs --verdicts".into()).into());
    }
    let claims: Vec<Claim> = read_jsonl(ctx.input()?)?;
    let mut labels: HashMap<&str, EntailmentLabel> = HashMap::new();
    let mut support: HashMap<&str, &[SupportSet]> = HashMap::new();
    for c in &claims {
        if let Some(g) = &c.gold {
            labels.insert(&c.id, g.label);
            support.insert(&c.id, &g.support_sets);
        }
        for s in &c.subclaims {
            if let Some(g) = &s.gold {
                labels.insert(&s.id, g.label);
                support.insert(&s.id, &g.support_sets);
            }
        }
    }

    let threshold = ctx.entail_threshold();
    let n_resamples = args.n_resamples.unwrap_or(DEFAULT_RESAMPLES);
    let seed = ctx.seed();
    let mut report = EvalReport::default();
    let mut sources: BTreeMap<String, Option<String>> = BTreeMap::new();

    if let Some(path) = &args.verdicts {
        let (header, verdicts) = read_artifact::<EntailmentVerdict>(path)?;
        sources.insert(path.display().to_string(), header.map(|h| h.config_digest));
        let scored: Vec<(&str, f64, bool)> = verdicts
            .iter()
            .filter_map(|v| labels.get(v.claim_id.as_str()).map(|l| (v.claim_id.as_str(), v.score, *l == EntailmentLabel::Supported)))
            .collect();
        if scored.len() < verdicts.len() {
            log::warn!("{} verdicts have no gold label and were skipped", verdicts.len() - scored.len());
        }
        let preds: Vec<BinaryPrediction> = scored
            .iter()
            .map(|&(id, score, gold)| BinaryPrediction::new(id, score, threshold, gold))
            .collect();
        let (f1, acc) = binary_f1_acc(&preds)?;
        report.n_items = preds.len();
        report.threshold = Some(threshold);
        report.f1 = Some(f1);
        report.accuracy = Some(acc);
        report.auroc = auroc(&scored.iter().map(|&(_, s, g)| (s, g)).collect::<Vec<_>>());

        for other in &args.compare {
            let (other_header, other_verdicts) = read_artifact::<EntailmentVerdict>(other)?;
            sources.insert(other.display().to_string(), other_header.map(|h| h.config_digest));
            let other_scores: HashMap<&str, f64> = other_verdicts.iter().map(|v| (v.claim_id.as_str(), v.score)).collect();
            let (mut a, mut b, mut g) = (Vec::new(), Vec::new(), Vec::new());
            for &(id, score, gold) in &scored {
                if let Some(&s) = other_scores.get(id) {
                    a.push(score);
                    b.push(s);
                    g.push(gold);
                }
            }
            if a.len() < scored.len() {
                log::warn!("{}: {} items missing; comparing on {}", other.display(), scored.len() - a.len(), a.len());
            }
            let outcome = paired_bootstrap(|x: &[f64], y: &[bool]| binary_f1(x, y, threshold), &a, &b, &g, n_resamples, seed)?;
            let name = other.file_stem().map_or_else(|| other.display().to_string(), |s| s.to_string_lossy().into_owned());
            report.p_values.insert(name, outcome.p_value);
        }
        if !args.compare.is_empty() {
            report.bootstrap = Some(BootstrapSettings { n_resamples, seed });
        }
    }

    if let Some(path) = &args.retrieval {
        let (header, records) = read_artifact::<RetrievalRecord>(path)?;
        sources.insert(path.display().to_string(), header.map(|h| h.config_digest));
        let predicted: Vec<(SupportSet, &[SupportSet])> = records
            .iter()
            .filter_map(|r| {
                let id = r.subclaim_id.as_deref().unwrap_or(&r.claim_id);
                support
                    .get(id)
                    .filter(|s| !s.is_empty())
                    .map(|s| (r.refs.iter().cloned().collect::<SupportSet>(), *s))
            })
            .collect();
        report.retrieval = mean_retrieval_prf(predicted.iter().map(|(p, g)| (p, *g)));
        if report.n_items == 0 {
            report.n_items = predicted.len();
        }
    }

    print!("{}", report.render_table());
    if let Some(out) = &ctx.common.out {
        let extra: Vec<&Path> = args.verdicts.iter().chain(&args.compare).chain(&args.retrieval).map(PathBuf::as_path).collect();
        let options = json!({ "n_resamples": n_resamples, "compare": args.compare });
        let header = ctx.header(options, &extra)?;
        write_document(out, &header, json!({ "report": report, "sources": sources }))?;
    }
    Ok(())
}
