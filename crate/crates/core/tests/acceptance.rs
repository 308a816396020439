//! End-to-end acceptance checks. Each test prints one `PASS` or `FAIL`
//! line per criterion straight to stderr so the lines survive output
//! capture, then asserts.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toponym_core::artifact::sha256_hex;
use toponym_core::corpus::io::{read_pairs, read_toponyms, read_triplets};
use toponym_core::corpus::{filter_by_features, fold_name, norm_lev_sim, prefix_key, Triplet, TripletKind};
use toponym_core::encoder::{EncoderConfig, Student, StudentInput, Teacher, EMBED_DIM};
use toponym_core::evalkit::{jaro_winkler, Testset, SAMPLE_CANDIDATES, SAMPLE_QUERIES};
use toponym_core::index::{EmbeddingStore, HnswParams, Index, IndexMode};
use toponym_core::nn::{Gradients, Graph, Matrix};
use toponym_core::phonetics::FeatureSeq;
use toponym_core::pipeline::{self, Paths, PipelineConfig, SystemMetrics};
use toponym_core::script_kit::{hangul, preprocess, romanise, ScriptId, VocabOptions, Vocabulary};
use toponym_core::training::{
    apply_noise, distill_loss, distill_loss_graph, language_dropout, triplet_loss, triplet_loss_graph, NoiseConfig,
};
use toponym_core::ParamsF64;

const LEV_REFERENCE: f64 = 0.57;
const JW_MARTHA: f64 = 0.9611;
const JW_TOL: f64 = 1e-4;
const LOSS_TOL: f64 = 1e-12;
const ANTIPODAL_DISTILL: f64 = 1.015625;
const GRAD_TOL: f64 = 1e-4;
const GRAD_STEP: f64 = 1e-6;
const GRAD_FLOOR: f64 = 1e-3;
const RATE_TOL: f64 = 0.01;
const SURVIVAL_TOL: f64 = 0.02;
const P1_MIN_REDUCTION: f64 = 0.50;
const P2_MIN_COSINE: f64 = 0.90;
const P3_MIN_REDUCTION: f64 = 0.30;
const DESK_BUDGET_SECS: f64 = 2.0 * 3600.0;
const RECALL_MIN: f64 = 0.95;
const INDEX_VECTORS: usize = 100_000;
const INDEX_QUERIES: usize = 200;
const MEHDIE_TOL: f64 = 0.02;
const MEHDIE_LEV: f64 = 0.815;
const MEHDIE_JW: f64 = 0.785;
const MEHDIE_TS10_LEV: f64 = 0.667;

fn report(n: u32, what: &str, pass: bool, detail: &str) -> bool {
    let line = format!("\n{} {n:>2} {what}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    pass
}

fn note(what: &str, detail: &str) {
    std::io::stderr().write_all(format!("INFO    {what}: {detail}\n").as_bytes()).unwrap();
}

/// Full-matrix edit distance.
fn dp_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

fn dp_sim(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        1.0
    } else {
        1.0 - dp_distance(a, b) as f64 / longest as f64
    }
}

#[test]
fn criterion_01_levenshtein_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alphabet: Vec<char> = "abcdeäöüмосквαβ".chars().collect();
    let word = |rng: &mut ChaCha8Rng| -> String {
        let n = rng.gen_range(0..12);
        (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    };
    let mismatches = (0..1000)
        .filter(|_| {
            let (a, b) = (word(&mut rng), word(&mut rng));
            norm_lev_sim(&a, &b) != dp_sim(&a, &b)
        })
        .count();
    let london = norm_lev_sim(&romanise("London"), &romanise("Londres"));
    let munich = norm_lev_sim(&romanise("München"), &romanise("Munich"));
    let two_dp = |x: f64| (x * 100.0).round() / 100.0;
    let secs = t.elapsed().as_secs_f64();
    let pass = mismatches == 0 && two_dp(london) == LEV_REFERENCE && two_dp(munich) == LEV_REFERENCE && secs < 1.0;
    let detail = format!("{mismatches}/1000 oracle mismatches, London/Londres {london:.4}, München/Munich {munich:.4}, {secs:.3}s");
    assert!(report(1, "Levenshtein oracle", pass, &detail));
}

#[test]
fn criterion_02_jaro_winkler() {
    let t = Instant::now();
    let martha = jaro_winkler("martha", "marhta");
    let identity = jaro_winkler("dixon", "dixon");
    let disjoint = jaro_winkler("abc", "xyz");
    let secs = t.elapsed().as_secs_f64();
    let pass = (martha - JW_MARTHA).abs() <= JW_TOL && identity == 1.0 && disjoint == 0.0 && secs < 1.0;
    let detail = format!("martha/marhta {martha:.4}, identity {identity}, disjoint {disjoint}");
    assert!(report(2, "Jaro-Winkler", pass, &detail));
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

#[test]
fn criterion_03_loss_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (margin, alpha) = (0.3, 0.5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, p, n) = (random_unit(&mut rng, EMBED_DIM), random_unit(&mut rng, EMBED_DIM), random_unit(&mut rng, EMBED_DIM));
        let (mut dap, mut dan, mut dot) = (0.0, 0.0, 0.0);
        for i in 0..EMBED_DIM {
            dap += (a[i] - p[i]) * (a[i] - p[i]);
            dan += (a[i] - n[i]) * (a[i] - n[i]);
            dot += a[i] * p[i];
        }
        let triplet = (dap.sqrt() - dan.sqrt() + margin).max(0.0);
        let distill = alpha * dap / EMBED_DIM as f64 + (1.0 - alpha) * (1.0 - dot);
        worst = worst
            .max((triplet_loss(&a, &p, &n, margin) - triplet).abs())
            .max((distill_loss(&a, &p, alpha) - distill).abs());
    }
    let t = random_unit(&mut rng, EMBED_DIM);
    let s: Vec<f64> = t.iter().map(|x| -x).collect();
    let antipodal = distill_loss(&s, &t, alpha);
    let pass = worst <= LOSS_TOL && antipodal == ANTIPODAL_DISTILL;
    let detail = format!("max deviation {worst:.2e} over 100 cases, antipodal distill {antipodal}");
    assert!(report(3, "loss oracles", pass, &detail));
}

/// Bidirectional trunk output of width 8.
fn width8() -> EncoderConfig {
    EncoderConfig {
        char_dim: 4,
        script_dim: 2,
        lang_dim: 2,
        hidden: 4,
        heads: 2,
        max_len: 64,
    }
}

type LossFn<'a> = dyn Fn(&ParamsF64, bool) -> (f64, Option<Gradients<f64>>) + 'a;

/// Worst relative error over every parameter entry.
fn worst_gradient_error(params: &mut ParamsF64, loss: &LossFn<'_>) -> f64 {
    let grads = loss(params, true).1.unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        for k in 0..grads.by_index(i).len() {
            let orig = params.iter().nth(i).unwrap().value.as_slice()[k];
            params.iter_mut().nth(i).unwrap().value.as_mut_slice()[k] = orig + GRAD_STEP;
            let up = loss(params, false).0;
            params.iter_mut().nth(i).unwrap().value.as_mut_slice()[k] = orig - GRAD_STEP;
            let down = loss(params, false).0;
            params.iter_mut().nth(i).unwrap().value.as_mut_slice()[k] = orig;
            let numeric = (up - down) / (2.0 * GRAD_STEP);
            let analytic = grads.by_index(i).as_slice()[k];
            let scale = numeric.abs().max(analytic.abs()).max(GRAD_FLOOR);
            worst = worst.max((numeric - analytic).abs() / scale);
        }
    }
    worst
}

#[test]
fn criterion_04_gradient_check() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fs: Vec<FeatureSeq> = (0..3)
        .map(|i| FeatureSeq {
            vectors: (0..3 + i).map(|_| std::array::from_fn(|_| rng.gen_range(0..2u8))).collect(),
            dropped: 0,
        })
        .collect();
    let teacher = Teacher::<f64>::new(width8(), 9).unwrap();
    let mut params = teacher.params.clone();
    // A wide margin keeps the hinge active.
    let triplet = |p: &ParamsF64, grad: bool| {
        let mut g = Graph::new(p);
        let e: Vec<_> = fs.iter().map(|f| teacher.forward_graph(&mut g, f).unwrap()).collect();
        let l = triplet_loss_graph(&mut g, e[0], e[1], e[2], 3.0);
        let grads = grad.then(|| {
            let mut gr = p.zero_grads();
            g.backward(l, &mut gr);
            gr
        });
        (g.scalar(l), grads)
    };
    let teacher_err = worst_gradient_error(&mut params, &triplet);

    let student = Student::<f64>::new(width8(), 12, vec!["en".into(), "ru".into()], 3).unwrap();
    let input = StudentInput {
        ids: vec![2, 5, 7, 1, 11],
        script: ScriptId::Latin,
        lang: 2,
    };
    let target = random_unit(&mut rng, EMBED_DIM);
    let mut params = student.params.clone();
    let distill = |p: &ParamsF64, grad: bool| {
        let mut g = Graph::new(p);
        let s = student.forward_graph(&mut g, &input).unwrap();
        let tv = g.constant(Matrix::row_vector(target.clone()));
        let l = distill_loss_graph(&mut g, s, tv, 0.5);
        let grads = grad.then(|| {
            let mut gr = p.zero_grads();
            g.backward(l, &mut gr);
            gr
        });
        (g.scalar(l), grads)
    };
    let student_err = worst_gradient_error(&mut params, &distill);
    let secs = t.elapsed().as_secs_f64();
    let pass = teacher_err < GRAD_TOL && student_err < GRAD_TOL && secs < 120.0;
    let detail = format!("teacher/triplet {teacher_err:.2e}, student/distill {student_err:.2e}, {secs:.1}s");
    assert!(report(4, "gradient check", pass, &detail));
}

#[test]
fn criterion_05_augmentation_calibration() {
    let names = ["moscow", "Москва", "Αθήνα", "ירושלים", "თბილისი", "서울"];
    let vocab = Vocabulary::build(names, VocabOptions::default()).unwrap();
    let inputs: Vec<StudentInput> = names
        .iter()
        .map(|n| {
            let seq = preprocess(n);
            StudentInput {
                ids: vocab.encode(&seq).into_iter().map(|i| i as usize).collect(),
                script: toponym_core::script_kit::detect_script(n).unwrap(),
                lang: 1,
            }
        })
        .collect();
    let cfg = NoiseConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = 100_000;
    let (mut applied, mut ops, mut script_violations, mut empty) = (0usize, [0usize; 4], 0usize, 0usize);
    for s in 0..samples {
        let x = &inputs[s % inputs.len()];
        let (out, r) = apply_noise(x, &vocab, &cfg, &mut rng);
        empty += out.ids.is_empty() as usize;
        script_violations += out
            .ids
            .iter()
            .filter(|&&id| vocab.token(id as u32).is_some_and(|t| t.script != x.script))
            .count();
        if r.applied {
            applied += 1;
            for k in 0..4 {
                ops[k] += r.ops[k] as usize;
            }
        }
    }
    let dropped = (0..samples).filter(|_| language_dropout(3, 0.5, &mut rng) == 0).count();
    let apply_rate = applied as f64 / samples as f64;
    let op_rates: Vec<f64> = ops.iter().map(|&c| c as f64 / applied as f64).collect();
    let drop_rate = dropped as f64 / samples as f64;
    let nominal = [cfg.insert, cfg.delete, cfg.substitute, cfg.transpose];
    let pass = (apply_rate - cfg.apply_prob).abs() <= RATE_TOL
        && op_rates.iter().zip(nominal).all(|(r, n)| (r - n).abs() <= RATE_TOL)
        && (drop_rate - 0.5).abs() <= RATE_TOL
        && script_violations == 0
        && empty == 0;
    let detail = format!(
        "apply {apply_rate:.4}, ops {:.4}/{:.4}/{:.4}/{:.4}, dropout {drop_rate:.4}, script violations {script_violations}, empty {empty}",
        op_rates[0], op_rates[1], op_rates[2], op_rates[3]
    );
    assert!(report(5, "augmentation calibration", pass, &detail));
}

/// Data stages only, into `dir`.
fn data_stages(cfg: &PipelineConfig) {
    pipeline::toy(cfg).unwrap();
    pipeline::ingest(cfg).unwrap();
    pipeline::build_vocab(cfg).unwrap();
    pipeline::pairs(cfg).unwrap();
    pipeline::triplets(cfg).unwrap();
}

fn config_under(preset: &str, dir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::preset(preset).unwrap();
    cfg.paths = Paths::under(dir);
    cfg
}

fn text(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn criterion_06_pipeline_invariants() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_under("desk", dir.path());
    data_stages(&cfg);
    let store = read_toponyms(&text(&cfg.paths.toponyms)).unwrap();
    let pairs = read_pairs(&text(&cfg.paths.pairs)).unwrap();
    let hard = read_triplets(&text(&cfg.paths.hard_triplets)).unwrap();
    let rec = |id: u64| store.get(id).unwrap();

    let mut seen_ids = HashSet::new();
    let mut seen_names = HashSet::new();
    let mut duplicates = 0;
    let mut counts: HashMap<(ScriptId, ScriptId), usize> = HashMap::new();
    let mut below = 0;
    for p in &pairs {
        let (a, b) = (rec(p.anchor_id), rec(p.positive_id));
        let ids = (p.anchor_id.min(p.positive_id), p.anchor_id.max(p.positive_id));
        let mut names = [(fold_name(&a.name), a.lang.clone()), (fold_name(&b.name), b.lang.clone())];
        names.sort();
        if !seen_ids.insert(ids) || !seen_names.insert(names) {
            duplicates += 1;
        }
        let scripts = (a.script.min(b.script), a.script.max(b.script));
        *counts.entry(scripts).or_default() += 1;
        let twin = fold_name(&a.name) == fold_name(&b.name) && a.lang != b.lang;
        let sim = if twin { 1.0 } else { dp_sim(&romanise(&a.name), &romanise(&b.name)) };
        let threshold = if a.script == b.script { cfg.pairs.same_threshold } else { cfg.pairs.cross_threshold };
        if sim < threshold || a.place_id != b.place_id {
            below += 1;
        }
    }
    let over_quota = counts.values().filter(|&&c| c > cfg.pairs.quota).count();

    let mut adjacent = 0;
    let mut off_bucket = 0;
    for tr in &hard {
        let (a, n) = (rec(tr.anchor), rec(tr.negative));
        if a.place_id == n.place_id || tr.negative == tr.anchor || tr.negative == tr.positive {
            adjacent += 1;
        }
        let key = |name: &str| prefix_key(&romanise(name));
        if key(&a.name).is_none() || key(&a.name) != key(&n.name) || a.script != n.script {
            off_bucket += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = !pairs.is_empty()
        && !hard.is_empty()
        && duplicates == 0
        && over_quota == 0
        && below == 0
        && adjacent == 0
        && off_bucket == 0
        && secs < 60.0;
    let detail = format!(
        "{} pairs: {duplicates} duplicates, {over_quota} script pairs over quota {}, {below} below threshold; {} hard triplets: {adjacent} adjacent, {off_bucket} outside prefix+script bucket; {secs:.1}s",
        pairs.len(),
        cfg.pairs.quota,
        hard.len()
    );
    assert!(report(6, "pipeline invariants", pass, &detail));
}

#[test]
fn criterion_07_triplet_survival() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_under("desk", dir.path());
    data_stages(&cfg);
    let store = read_toponyms(&text(&cfg.paths.toponyms)).unwrap();
    let random = read_triplets(&text(&cfg.paths.random_triplets)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n_ids = 40_000u64;
    let mut lines = Vec::new();
    let mut pass = true;
    for p in [0.3, 0.46, 0.7] {
        // Synthetic draws with distinct members.
        let has: Vec<bool> = (0..n_ids).map(|_| rng.gen_bool(p)).collect();
        let synthetic: Vec<Triplet> = (0..30_000)
            .map(|_| loop {
                let ids: [u64; 3] = std::array::from_fn(|_| rng.gen_range(0..n_ids));
                if ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
                    break Triplet {
                        anchor: ids[0],
                        positive: ids[1],
                        negative: ids[2],
                        kind: TripletKind::Random,
                    };
                }
            })
            .collect();
        let (_, synthetic_rate) = filter_by_features(&synthetic, |id| has[id as usize]);
        // The same availability law over the toy corpus's random triplets.
        let toy_has: Vec<bool> = (0..store.len()).map(|_| rng.gen_bool(p)).collect();
        let (_, toy_rate) = filter_by_features(&random, |id| toy_has[id as usize]);
        let expected = p * p * p;
        pass &= (synthetic_rate - expected).abs() <= SURVIVAL_TOL && (toy_rate - expected).abs() <= SURVIVAL_TOL;
        lines.push(format!("p={p}: p^3 {expected:.4}, synthetic {synthetic_rate:.4}, toy {toy_rate:.4}"));
    }
    assert!(report(7, "triplet survival", pass, &lines.join("; ")));
}

struct RunRecord {
    secs: f64,
    p1_reduction: f64,
    p2_cosine: f64,
    p3_reduction: f64,
    systems: Vec<SystemMetrics>,
    moscow_rank: Option<usize>,
    checkpoint_hashes: Vec<String>,
}

/// Every stage, toy corpus through diagnostics.
fn full_run(cfg: &PipelineConfig) -> RunRecord {
    let t = Instant::now();
    data_stages(cfg);
    let p1 = pipeline::train(cfg, 1).unwrap();
    let p2 = pipeline::train(cfg, 2).unwrap();
    let p3 = pipeline::train(cfg, 3).unwrap();
    pipeline::embed(cfg).unwrap();
    pipeline::index(cfg).unwrap();
    let systems = pipeline::evaluate(cfg).unwrap();
    pipeline::diagnostics(cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let hits = pipeline::query(cfg, "Москва", None, 100).unwrap();
    let moscow_rank = hits.iter().position(|h| h.name == "Moscow").map(|r| r + 1);
    let checkpoint_hashes = vec![
        pipeline::load_teacher_file(&cfg.paths.teacher()).unwrap().1.params_hash,
        pipeline::load_student_file(&cfg.paths.student_phase2(), "train --phase 2").unwrap().1.params_hash,
        pipeline::load_student_file(&cfg.paths.student(), "train --phase 3").unwrap().1.params_hash,
    ];
    RunRecord {
        secs,
        p1_reduction: p1.val_loss_reduction(),
        p2_cosine: p2.best.val_sim.unwrap_or(f64::NAN),
        p3_reduction: p3.val_loss_reduction(),
        systems,
        moscow_rank,
        checkpoint_hashes,
    }
}

fn heldout_r1(run: &RunRecord, system: &str) -> f64 {
    let s = run.systems.iter().find(|s| s.system == system).unwrap();
    s.get(toponym_core::toy::HELDOUT_NAME).unwrap().r1
}

fn file_digest(path: &Path) -> String {
    sha256_hex(&std::fs::read(path).unwrap())
}

#[test]
fn criteria_08_09_desk_run_and_determinism() {
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ca, cb) = (config_under("desk", da.path()), config_under("desk", db.path()));
    let a = full_run(&ca);

    let (model, lev) = (heldout_r1(&a, "model"), heldout_r1(&a, "lev"));
    let queries = a.systems[0].get(toponym_core::toy::HELDOUT_NAME).unwrap().queries;
    let pass8 = a.p1_reduction >= P1_MIN_REDUCTION
        && a.p2_cosine >= P2_MIN_COSINE
        && a.p3_reduction >= P3_MIN_REDUCTION
        && model > lev
        && queries == 500
        && a.secs <= DESK_BUDGET_SECS;
    let detail = format!(
        "P1 val loss -{:.1}%, P2 val cosine {:.4}, P3 val loss -{:.1}%, held-out R@1 model {model:.3} vs Lev {lev:.3} (JW {:.3}) on {queries} queries, {:.0}s",
        100.0 * a.p1_reduction,
        a.p2_cosine,
        100.0 * a.p3_reduction,
        heldout_r1(&a, "jw"),
        a.secs
    );
    let ok8 = report(8, "desk end-to-end", pass8, &detail);
    note(
        "query Москва",
        &match a.moscow_rank {
            Some(r) => format!("\"Moscow\" at rank {r}"),
            None => "\"Moscow\" not in the top 100".into(),
        },
    );

    let b = full_run(&cb);
    let files = |c: &PipelineConfig| {
        [&c.paths.pairs, &c.paths.random_triplets, &c.paths.hard_triplets].map(|p| file_digest(p))
    };
    let same_files = files(&ca) == files(&cb);
    let same_checkpoints = a.checkpoint_hashes == b.checkpoint_hashes;
    let detail = format!(
        "pair and triplet files {}, checkpoint hashes {} ({})",
        if same_files { "byte-identical" } else { "differ" },
        if same_checkpoints { "identical" } else { "differ" },
        a.checkpoint_hashes.join(" ")
    );
    let ok9 = report(9, "determinism", same_files && same_checkpoints, &detail);
    assert!(ok8 && ok9);
}

fn random_store(rng: &mut ChaCha8Rng, n: usize) -> EmbeddingStore {
    let mut store = EmbeddingStore::new("random");
    for id in 0..n as u64 {
        let v: Vec<f32> = random_unit(rng, EMBED_DIM).into_iter().map(|x| x as f32).collect();
        store.insert(id, &v).unwrap();
    }
    store
}

#[test]
fn criterion_10_index() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let store = random_store(&mut rng, INDEX_VECTORS);
    let queries: Vec<Vec<f32>> = (0..INDEX_QUERIES)
        .map(|_| random_unit(&mut rng, EMBED_DIM).into_iter().map(|x| x as f32).collect())
        .collect();
    // f64 brute force.
    let oracle: Vec<Vec<u64>> = queries
        .iter()
        .map(|q| {
            let mut scored: Vec<(f64, u64)> = store
                .iter()
                .map(|(id, v)| (v.iter().zip(q).map(|(a, b)| *a as f64 * *b as f64).sum(), id))
                .collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            scored.iter().take(10).map(|s| s.1).collect()
        })
        .collect();

    let exact = Index::build(store.clone(), IndexMode::Exact, &HnswParams::default()).unwrap();
    let exact_ids: Vec<Vec<u64>> = queries
        .iter()
        .map(|q| exact.query(q, 10).unwrap().iter().map(|h| h.id).collect())
        .collect();
    let exact_matches = exact_ids == oracle;

    let build = Instant::now();
    let approx = Index::build(store, IndexMode::Approximate, &HnswParams::default()).unwrap();
    let build_secs = build.elapsed().as_secs_f64();
    let results: Vec<_> = queries.iter().map(|q| approx.query(q, 10).unwrap()).collect();
    let found: usize = results
        .iter()
        .zip(&oracle)
        .map(|(hits, truth)| hits.iter().filter(|h| truth.contains(&h.id)).count())
        .sum();
    let recall = found as f64 / (10 * INDEX_QUERIES) as f64;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    approx.save(&path).unwrap();
    let loaded = Index::load(&path).unwrap();
    let round_trip = queries.iter().zip(&results).all(|(q, r)| &loaded.query(q, 10).unwrap() == r);
    let exact_path = dir.path().join("exact.bin");
    exact.save(&exact_path).unwrap();
    let exact_loaded = Index::load(&exact_path).unwrap();
    let round_trip = round_trip && queries.iter().zip(&exact_ids).all(|(q, ids)| {
        exact_loaded.query(q, 10).unwrap().iter().map(|h| h.id).collect::<Vec<_>>() == *ids
    });

    let pass = recall >= RECALL_MIN && exact_matches && round_trip;
    let detail = format!(
        "recall@10 {recall:.4} over {INDEX_QUERIES} queries on {INDEX_VECTORS} vectors (build {build_secs:.0}s), exact {} brute force, save/load {}, {:.0}s",
        if exact_matches { "matches" } else { "differs from" },
        if round_trip { "query-identical" } else { "differs" },
        t.elapsed().as_secs_f64()
    );
    assert!(report(10, "index", pass, &detail));
}

fn table(systems: &[SystemMetrics]) -> String {
    let mut out = String::from("system\ttestset\tqueries\tR@1\tR@5\tR@10\tMRR\n");
    for s in systems {
        for (name, m) in s.per_testset.iter().chain(std::iter::once(&("average".to_string(), s.average.clone()))) {
            out.push_str(&format!(
                "{}\t{name}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\n",
                s.system, m.queries, m.r1, m.r5, m.r10, m.mrr
            ));
        }
    }
    out
}

/// With `MEHDIE_DIR` pointing at converted testsets the reference values
/// are checked; otherwise the harness runs on the bundled sample.
#[test]
fn criterion_11_benchmark_harness() {
    let supplied = std::env::var_os("MEHDIE_DIR").map(std::path::PathBuf::from);
    let sample_dir = tempfile::tempdir().unwrap();
    let dir = match &supplied {
        Some(d) => d.clone(),
        None => {
            let sample = Testset::parse("sample", SAMPLE_QUERIES, SAMPLE_CANDIDATES).unwrap();
            let (q, c) = Testset::paths(sample_dir.path(), "sample");
            std::fs::write(q, sample.queries_tsv()).unwrap();
            std::fs::write(c, sample.candidates_tsv()).unwrap();
            sample_dir.path().to_path_buf()
        }
    };
    let systems = pipeline::evaluate_baselines(&dir).unwrap();
    std::io::stderr().write_all(table(&systems).as_bytes()).unwrap();
    let emitted = systems.len() == 2 && systems.iter().all(|s| !s.per_testset.is_empty());
    let (pass, detail) = match supplied {
        None => (emitted, "no MEHDIE files supplied (set MEHDIE_DIR); harness ran on the bundled sample and emitted the table".to_string()),
        Some(_) => {
            let lev = systems[0].average.r1;
            let jw = systems[1].average.r1;
            let ts10 = systems[0]
                .per_testset
                .iter()
                .find(|(n, _)| n.to_ascii_lowercase().ends_with("10"))
                .map(|(_, m)| m.r1);
            let pass = emitted
                && (lev - MEHDIE_LEV).abs() <= MEHDIE_TOL
                && (jw - MEHDIE_JW).abs() <= MEHDIE_TOL
                && ts10.is_some_and(|r| (r - MEHDIE_TS10_LEV).abs() <= MEHDIE_TOL);
            (pass, format!("Lev R@1 {lev:.3}, JW R@1 {jw:.3}, TS10 Lev R@1 {}", ts10.map_or("missing".into(), |r| format!("{r:.3}"))))
        }
    };
    assert!(report(11, "benchmark harness", pass, &detail));
}

#[test]
fn criterion_12_hangul_round_trip() {
    let mut failures = 0;
    for cp in hangul::SYLLABLE_BASE..hangul::SYLLABLE_BASE + hangul::SYLLABLE_COUNT {
        let c = char::from_u32(cp).unwrap();
        let back = hangul::decompose(c).and_then(|j| hangul::compose(j[0], j[1], j.get(2).copied()));
        failures += (back != Some(c)) as usize;
    }
    let detail = format!("{} syllables, {failures} failures", hangul::SYLLABLE_COUNT);
    assert!(report(12, "Hangul round-trip", failures == 0 && hangul::SYLLABLE_COUNT == 11_172, &detail));
}
