use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::config::PipelineConfig;
use crate::artifact::{read_bytes, read_text, split_header, write_atomic, Stamp};
use crate::corpus::io::{read_pairs, read_toponyms, read_triplets, write_pairs, write_toponyms, write_triplets};
use crate::corpus::{
    gen_pairs, ingest as ingest_docs, AdjacencySet, IngestReport, NegativeSampler, PairReport, PrefixIndex,
    ToponymStore, TripletKind, TripletReport,
};
use crate::encoder::{
    load_student, load_teacher, save_student, save_teacher, CheckpointHeader, CheckpointMeta, Student, StudentInput,
    Teacher,
};
use crate::error::{Error, Result};
use crate::evalkit::{
    parse_pairs, run_baseline, run_diagnostics, run_model, DiagnosticReport, Metrics, StringMetric, Testset,
    BUNDLED_DIAGNOSTICS,
};
use crate::index::{EmbeddingStore, Hit, Index};
use crate::phonetics::{phonetic_features, FeatureSeq, FeatureTable, G2pProvider};
use crate::script_kit::{Romaniser, VocabOptions, Vocabulary};
use crate::toy;
use crate::training::{train_phase1, train_phase2, train_phase3, DistillSample, PhaseOutcome, LOG_HEADER};

/// Scalar type of every model the pipeline trains or loads.
pub type Real = f32;

const RANDOM_SALT: u64 = 0x52_414e_444f_4d;
const HARD_SALT: u64 = 0x48_4152_44;
const STUDENT_SALT: u64 = 0x53_5455_4445_4e54;

pub const TOY_MAGIC: &str = "toponym-toy";
pub const REPORT_MAGIC: &str = "toponym-report";
pub const LOG_MAGIC: &str = "toponym-train-log";

fn headed(magic: &str, stamp: &Stamp, body: &str) -> String {
    format!("# {magic} v1 {}\n{body}", stamp.render())
}

fn load_store(cfg: &PipelineConfig) -> Result<ToponymStore> {
    read_toponyms(&read_text(&cfg.paths.toponyms, "ingest")?)
}

fn load_vocab(cfg: &PipelineConfig) -> Result<Vocabulary> {
    Vocabulary::parse(&read_text(&cfg.paths.vocab, "build-vocab")?)
}

#[derive(Debug, Clone)]
pub struct ToySummary {
    pub places: usize,
    pub toponyms: usize,
    pub heldout: usize,
}

/// Writes the synthetic gazetteer to `paths.corpus` and its held-out
/// testset to `paths.testsets`.
pub fn toy(cfg: &PipelineConfig) -> Result<ToySummary> {
    let toy_cfg = toy::ToyConfig {
        seed: cfg.seed,
        ..cfg.toy.clone()
    };
    let g = toy::generate(&toy_cfg)?;
    let stamp = cfg.stamp();
    write_atomic(&cfg.paths.corpus, headed(TOY_MAGIC, &stamp, &g.to_jsonl()).as_bytes())?;
    let (q, c) = Testset::paths(&cfg.paths.testsets, &g.heldout.name);
    write_atomic(&q, headed(REPORT_MAGIC, &stamp, &g.heldout.queries_tsv()).as_bytes())?;
    write_atomic(&c, headed(REPORT_MAGIC, &stamp, &g.heldout.candidates_tsv()).as_bytes())?;
    Ok(ToySummary {
        places: g.docs.len(),
        toponyms: g.toponym_count(),
        heldout: g.heldout.queries.len(),
    })
}

pub fn ingest(cfg: &PipelineConfig) -> Result<(ToponymStore, IngestReport)> {
    let bytes = read_bytes(&cfg.paths.corpus, "toy")?;
    let (store, report) = ingest_docs(bytes.as_slice())?;
    if store.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    write_atomic(&cfg.paths.toponyms, write_toponyms(&store, &cfg.stamp()).as_bytes())?;
    Ok((store, report))
}

pub fn build_vocab(cfg: &PipelineConfig) -> Result<Vocabulary> {
    let store = load_store(cfg)?;
    let vocab = Vocabulary::build(store.records().iter().map(|r| r.name.as_str()), VocabOptions::default())?;
    write_atomic(&cfg.paths.vocab, vocab.to_file_string(&cfg.stamp()).as_bytes())?;
    Ok(vocab)
}

pub fn pairs(cfg: &PipelineConfig) -> Result<PairReport> {
    let store = load_store(cfg)?;
    let (pairs, report) = gen_pairs(&store, &cfg.pairs, cfg.seed)?;
    write_atomic(&cfg.paths.pairs, write_pairs(&pairs, &cfg.stamp()).as_bytes())?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct TripletSummary {
    pub random: TripletReport,
    pub hard: TripletReport,
    /// Fraction of random triplets whose three members all have phonetic
    /// features.
    pub phonetic_survival: f64,
    pub feature_coverage: f64,
}

pub fn triplets(cfg: &PipelineConfig) -> Result<TripletSummary> {
    let store = load_store(cfg)?;
    let pairs = read_pairs(&read_text(&cfg.paths.pairs, "gen-pairs")?)?;
    let adjacency = AdjacencySet::build(&store);
    let prefixes = PrefixIndex::build(&store);
    let pool: Vec<u64> = store.ids().collect();
    let sampler = NegativeSampler {
        pool: &pool,
        adjacency: &adjacency,
        prefixes: &prefixes,
        max_draws: cfg.triplets.max_draws,
    };
    let (random, random_report) = sampler.generate(&pairs, TripletKind::Random, cfg.seed ^ RANDOM_SALT)?;
    let (hard, hard_report) = sampler.generate(&pairs, TripletKind::Hard, cfg.seed ^ HARD_SALT)?;
    let stamp = cfg.stamp();
    write_atomic(&cfg.paths.random_triplets, write_triplets(&random, &stamp).as_bytes())?;
    write_atomic(&cfg.paths.hard_triplets, write_triplets(&hard, &stamp).as_bytes())?;
    let features = features(cfg, &store)?;
    let (_, survival) = crate::corpus::filter_by_features(&random, |id| features.contains_key(&id));
    Ok(TripletSummary {
        random: random_report,
        hard: hard_report,
        phonetic_survival: survival,
        feature_coverage: features.len() as f64 / store.len().max(1) as f64,
    })
}

/// Phonetic feature sequences of every toponym the transcription tables
/// (or the overlay) cover.
pub fn features(cfg: &PipelineConfig, store: &ToponymStore) -> Result<HashMap<u64, FeatureSeq>> {
    let mut provider = G2pProvider::bundled().clone();
    if let Some(path) = &cfg.paths.ipa_overlay {
        provider.load_overlay(&read_text(path, "ipa overlay")?)?;
    }
    let table = FeatureTable::bundled();
    let mut out = HashMap::new();
    for r in store.records() {
        if let Some(fs) = phonetic_features(&provider, table, Some(r.id), &r.name, r.lang.as_deref()) {
            if !fs.is_empty() {
                out.insert(r.id, fs);
            }
        }
    }
    Ok(out)
}

fn languages(store: &ToponymStore) -> Vec<String> {
    let set: BTreeSet<&str> = store.records().iter().filter_map(|r| r.lang.as_deref()).collect();
    set.into_iter().map(String::from).collect()
}

fn student_inputs(student: &Student<Real>, vocab: &Vocabulary, store: &ToponymStore) -> Result<HashMap<u64, StudentInput>> {
    let mut out = HashMap::with_capacity(store.len());
    for r in store.records() {
        let x = student.prepare(vocab, &r.name, r.lang.as_deref())?;
        if !x.ids.is_empty() {
            out.insert(r.id, x);
        }
    }
    Ok(out)
}

fn meta(cfg: &PipelineConfig, phase: u8, outcome: &PhaseOutcome, vocab_hash: Option<String>) -> CheckpointMeta {
    CheckpointMeta {
        seed: cfg.seed,
        phase,
        epoch: outcome.best.epoch,
        train_loss: outcome.best.train_loss,
        val_loss: outcome.best.val_loss,
        val_sim: outcome.best.val_sim,
        config_hash: cfg.hash(),
        vocab_hash,
    }
}

fn write_log(cfg: &PipelineConfig, phase: u8, outcome: &PhaseOutcome) -> Result<()> {
    let body = format!("{LOG_HEADER}\n{}", outcome.log_tsv());
    write_atomic(&cfg.paths.train_log(phase), headed(LOG_MAGIC, &cfg.stamp(), &body).as_bytes())
}

pub fn load_teacher_file(path: &Path) -> Result<(Teacher<Real>, CheckpointHeader)> {
    load_teacher(&read_bytes(path, "train --phase 1")?)
}

pub fn load_student_file(path: &Path, stage: &'static str) -> Result<(Student<Real>, CheckpointHeader)> {
    load_student(&read_bytes(path, stage)?)
}

fn check_vocab(header: &CheckpointHeader, vocab: &Vocabulary) -> Result<()> {
    match &header.vocab_hash {
        Some(expected) if *expected != vocab.hash() => Err(Error::HashMismatch {
            what: "vocabulary",
            expected: expected.clone(),
            found: vocab.hash(),
        }),
        _ => Ok(()),
    }
}

/// Runs one training phase and writes its checkpoint and log.
pub fn train(cfg: &PipelineConfig, phase: u8) -> Result<PhaseOutcome> {
    let tc = cfg.train_config();
    let store = load_store(cfg)?;
    match phase {
        1 => {
            let triplets = read_triplets(&read_text(&cfg.paths.random_triplets, "gen-triplets")?)?;
            let features = features(cfg, &store)?;
            let mut teacher = Teacher::<Real>::new(cfg.encoder.clone(), cfg.seed)?;
            let outcome = train_phase1(&mut teacher, &triplets, &features, &tc)?;
            write_atomic(&cfg.paths.teacher(), &save_teacher(&teacher, &meta(cfg, 1, &outcome, None)))?;
            write_log(cfg, 1, &outcome)?;
            Ok(outcome)
        }
        2 => {
            let teacher = match read_bytes(&cfg.paths.teacher(), "train --phase 1") {
                Ok(bytes) => load_teacher::<Real>(&bytes)?.0,
                Err(Error::MissingArtifact { .. }) => return Err(Error::TeacherCheckpointRequired),
                Err(e) => return Err(e),
            };
            let vocab = load_vocab(cfg)?;
            let mut student = Student::<Real>::new(cfg.encoder.clone(), vocab.len(), languages(&store), cfg.seed ^ STUDENT_SALT)?;
            if cfg.warm_start {
                student.copy_trunk_from(&teacher)?;
            }
            let features = features(cfg, &store)?;
            let inputs = student_inputs(&student, &vocab, &store)?;
            let samples: Vec<DistillSample> = store
                .ids()
                .filter_map(|id| {
                    Some(DistillSample {
                        input: inputs.get(&id)?.clone(),
                        features: features.get(&id)?.clone(),
                    })
                })
                .collect();
            let outcome = train_phase2(&mut student, Some(&teacher), &samples, &vocab, &tc)?;
            let bytes = save_student(&student, &meta(cfg, 2, &outcome, Some(vocab.hash())));
            write_atomic(&cfg.paths.student_phase2(), &bytes)?;
            write_log(cfg, 2, &outcome)?;
            Ok(outcome)
        }
        3 => {
            let (mut student, header) = load_student_file(&cfg.paths.student_phase2(), "train --phase 2")?;
            let vocab = load_vocab(cfg)?;
            check_vocab(&header, &vocab)?;
            let triplets = read_triplets(&read_text(&cfg.paths.hard_triplets, "gen-triplets")?)?;
            let inputs = student_inputs(&student, &vocab, &store)?;
            let outcome = train_phase3(&mut student, &triplets, &inputs, &vocab, &tc)?;
            write_atomic(&cfg.paths.student(), &save_student(&student, &meta(cfg, 3, &outcome, Some(vocab.hash()))))?;
            write_log(cfg, 3, &outcome)?;
            Ok(outcome)
        }
        other => Err(Error::Config(format!("unknown training phase {other}; expected 1, 2 or 3"))),
    }
}

fn final_student(cfg: &PipelineConfig) -> Result<(Student<Real>, CheckpointHeader, Vocabulary)> {
    let (student, header) = load_student_file(&cfg.paths.student(), "train --phase 3")?;
    let vocab = load_vocab(cfg)?;
    check_vocab(&header, &vocab)?;
    Ok((student, header, vocab))
}

#[derive(Debug, Clone)]
pub struct EmbedSummary {
    pub embedded: usize,
    /// Toponyms with no token left after preprocessing.
    pub skipped: usize,
    pub model_hash: String,
}

pub fn embed(cfg: &PipelineConfig) -> Result<EmbedSummary> {
    let (student, header, vocab) = final_student(cfg)?;
    let store = load_store(cfg)?;
    let mut out = EmbeddingStore::new(header.params_hash.clone());
    out.stamp = cfg.stamp().render();
    let mut skipped = 0;
    for r in store.records() {
        let x = student.prepare(&vocab, &r.name, r.lang.as_deref())?;
        if x.ids.is_empty() {
            skipped += 1;
            continue;
        }
        out.insert(r.id, &student.embed(&x)?)?;
    }
    out.save(&cfg.paths.embeddings)?;
    Ok(EmbedSummary {
        embedded: out.len(),
        skipped,
        model_hash: header.params_hash,
    })
}

pub fn index(cfg: &PipelineConfig) -> Result<usize> {
    let store = EmbeddingStore::load(&cfg.paths.embeddings)?;
    let index = Index::build(store, cfg.index.mode, &cfg.index.hnsw)?;
    index.save(&cfg.paths.index)?;
    Ok(index.len())
}

#[derive(Debug, Clone)]
pub struct QueryHit {
    pub hit: Hit,
    pub place_id: u64,
    pub lang: Option<String>,
    pub name: String,
}

pub fn query(cfg: &PipelineConfig, name: &str, lang: Option<&str>, k: usize) -> Result<Vec<QueryHit>> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let (student, header, vocab) = final_student(cfg)?;
    let index = Index::load(&cfg.paths.index)?;
    if index.store().model_hash != header.params_hash {
        return Err(Error::HashMismatch {
            what: "index model",
            expected: header.params_hash,
            found: index.store().model_hash.clone(),
        });
    }
    let store = load_store(cfg)?;
    let x = student.prepare(&vocab, name, lang)?;
    if x.ids.is_empty() {
        return Err(Error::EmptyToponym);
    }
    let e = student.embed(&x)?;
    index
        .query(&e, k)?
        .into_iter()
        .map(|hit| {
            let r = store
                .get(hit.id)
                .ok_or_else(|| Error::format("index", format!("toponym {} is not in the store", hit.id)))?;
            Ok(QueryHit {
                hit,
                place_id: r.place_id,
                lang: r.lang.clone(),
                name: r.name.clone(),
            })
        })
        .collect()
}

/// Metrics per testset plus the unweighted average, for one system.
#[derive(Debug, Clone)]
pub struct SystemMetrics {
    pub system: String,
    pub per_testset: Vec<(String, Metrics)>,
    pub average: Metrics,
}

impl SystemMetrics {
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (name, m) in &self.per_testset {
            out.push_str(&m.report(name));
        }
        out.push_str(&self.average.report("average"));
        out
    }

    pub fn get(&self, testset: &str) -> Option<&Metrics> {
        self.per_testset.iter().find(|(n, _)| n == testset).map(|(_, m)| m)
    }
}

fn collect(system: &str, testsets: &[Testset], f: impl Fn(&Testset) -> Result<Metrics>) -> Result<SystemMetrics> {
    let mut per = Vec::with_capacity(testsets.len());
    for ts in testsets {
        per.push((ts.name.clone(), f(ts)?));
    }
    let all: Vec<Metrics> = per.iter().map(|(_, m)| m.clone()).collect();
    Ok(SystemMetrics {
        system: system.to_string(),
        average: Metrics::average(&all),
        per_testset: per,
    })
}

/// Baselines over every testset in `dir`, no model needed.
pub fn evaluate_baselines(dir: &Path) -> Result<Vec<SystemMetrics>> {
    let testsets = load_testsets(dir)?;
    let romaniser = Romaniser::bundled();
    [StringMetric::Lev, StringMetric::Jw]
        .into_iter()
        .map(|m| collect(m.name(), &testsets, |ts| run_baseline(ts, m, romaniser)))
        .collect()
}

pub fn load_testsets(dir: &Path) -> Result<Vec<Testset>> {
    if !dir.is_dir() {
        return Err(Error::MissingArtifact {
            path: dir.to_path_buf(),
            stage: "toy",
        });
    }
    let names = Testset::discover(dir)?;
    if names.is_empty() {
        return Err(Error::EmptyTestset);
    }
    names.iter().map(|n| Testset::load(dir, n)).collect()
}

/// Baselines and the trained student over every testset; writes one
/// report per system.
pub fn evaluate(cfg: &PipelineConfig) -> Result<Vec<SystemMetrics>> {
    let (student, header, vocab) = final_student(cfg)?;
    let mut systems = evaluate_baselines(&cfg.paths.testsets)?;
    let testsets = load_testsets(&cfg.paths.testsets)?;
    systems.push(collect("model", &testsets, |ts| {
        run_model(ts, &student, &vocab, header.vocab_hash.as_deref())
    })?);
    let stamp = cfg.stamp();
    for s in &systems {
        let path = cfg.paths.reports.join(format!("metrics.{}.tsv", s.system));
        write_atomic(&path, headed(REPORT_MAGIC, &stamp, &s.report()).as_bytes())?;
    }
    Ok(systems)
}

pub fn diagnostics(cfg: &PipelineConfig) -> Result<DiagnosticReport> {
    let (student, _, vocab) = final_student(cfg)?;
    let src = match &cfg.paths.diagnostics {
        Some(p) => read_text(p, "diagnostics pair file")?,
        None => BUNDLED_DIAGNOSTICS.to_string(),
    };
    let report = run_diagnostics(&student, &vocab, &parse_pairs(&src)?)?;
    let stamp = cfg.stamp();
    let summary = format!("category\tpassed\ttotal\n{}", report.summary_tsv());
    write_atomic(&cfg.paths.reports.join("diagnostics.tsv"), headed(REPORT_MAGIC, &stamp, &summary).as_bytes())?;
    write_atomic(
        &cfg.paths.reports.join("diagnostics.pairs.tsv"),
        headed(REPORT_MAGIC, &stamp, &report.pairs_tsv()).as_bytes(),
    )?;
    Ok(report)
}

/// Stamp recorded in the header line of a text artifact.
pub fn stamp_of(text: &str, magic: &'static str) -> Result<Stamp> {
    let (stamp, _) = split_header(text, magic, 1)?;
    Stamp::parse(stamp).ok_or_else(|| Error::format(magic, "header carries no stamp"))
}
