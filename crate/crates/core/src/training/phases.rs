use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::augment::{apply_noise, language_dropout};
use super::config::TrainConfig;
use super::losses::{distill_loss_graph, triplet_loss_graph};
use super::schedule::lr_schedule;
use crate::corpus::Triplet;
use crate::encoder::{cosine, Student, StudentInput, Teacher};
use crate::error::{Error, Result};
use crate::nn::{AdamW, Gradients, Graph, ParamSet};
use crate::phonetics::FeatureSeq;
use crate::scalar::Scalar;
use crate::script_kit::Vocabulary;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub phase: u8,
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_sim: Option<f64>,
    /// Rate used by the last step of the epoch.
    pub lr: f64,
}

pub const LOG_HEADER: &str = "phase\tepoch\ttrain_loss\tval_loss\tval_sim\tlr";

impl EpochLog {
    pub fn to_tsv(&self) -> String {
        let sim = self.val_sim.map_or_else(|| "-".to_string(), |s| format!("{s:.6}"));
        format!(
            "{}\t{}\t{:.6}\t{:.6}\t{}\t{:.3e}",
            self.phase, self.epoch, self.train_loss, self.val_loss, sim, self.lr
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let bad = || Error::format("training log", format!("bad line `{line}`"));
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(bad());
        }
        Ok(Self {
            phase: f[0].parse().map_err(|_| bad())?,
            epoch: f[1].parse().map_err(|_| bad())?,
            train_loss: f[2].parse().map_err(|_| bad())?,
            val_loss: f[3].parse().map_err(|_| bad())?,
            val_sim: if f[4] == "-" {
                None
            } else {
                Some(f[4].parse().map_err(|_| bad())?)
            },
            lr: f[5].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub log: Vec<EpochLog>,
    /// Epoch with the lowest validation loss; its parameters are installed
    /// in the model on return.
    pub best: EpochLog,
    pub first_lr: f64,
    pub steps: usize,
    pub train_size: usize,
    pub val_size: usize,
}

impl PhaseOutcome {
    pub fn log_tsv(&self) -> String {
        let mut out = String::new();
        for l in &self.log {
            out.push_str(&l.to_tsv());
            out.push('\n');
        }
        out
    }

    /// Validation loss of the first epoch.
    pub fn first_val_loss(&self) -> f64 {
        self.log.first().map_or(f64::NAN, |l| l.val_loss)
    }

    /// `1 − best / first` validation loss.
    pub fn val_loss_reduction(&self) -> f64 {
        1.0 - self.best.val_loss / self.first_val_loss()
    }
}

/// Seeded 90/10 style split. With fewer items than one validation slot
/// the training set doubles as validation set.
pub fn split_train_val<T: Clone>(items: &[T], val_fraction: f64, seed: u64) -> (Vec<T>, Vec<T>) {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ SPLIT_SALT));
    let n_val = (items.len() as f64 * val_fraction).round() as usize;
    if n_val == 0 || n_val >= items.len() {
        return (items.to_vec(), items.to_vec());
    }
    let val = order[..n_val].iter().map(|&i| items[i].clone()).collect();
    let train = order[n_val..].iter().map(|&i| items[i].clone()).collect();
    (train, val)
}


const SPLIT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn epoch_rng(seed: u64, phase: u8, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((phase as u64) << 32) | epoch as u64);
    rng
}

struct LoopSpec {
    phase: u8,
    epochs: usize,
    lr: f64,
    batch_size: usize,
    weight_decay: f64,
    seed: u64,
}

/// Minibatch AdamW with cosine annealing; one graph per example, gradients
/// summed in example order and averaged over the batch.
fn run_loop<S: Scalar, T>(
    params: &mut ParamSet<S>,
    spec: &LoopSpec,
    train: &[T],
    val: &[T],
    mut step: impl FnMut(&ParamSet<S>, &T, &mut ChaCha8Rng, &mut Gradients<S>) -> Result<f64>,
    mut eval: impl FnMut(&ParamSet<S>, &[T]) -> Result<(f64, Option<f64>)>,
) -> Result<PhaseOutcome> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if spec.epochs == 0 {
        return Err(Error::Config(format!("phase {} needs at least one epoch", spec.phase)));
    }
    let per_epoch = train.len().div_ceil(spec.batch_size);
    let total = per_epoch * spec.epochs;
    let first_lr = lr_schedule(0, total, spec.lr)?;
    let mut opt = AdamW::new(params, S::of(spec.weight_decay));
    let mut grads = params.zero_grads();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut log = Vec::with_capacity(spec.epochs);
    let mut best: Option<(EpochLog, ParamSet<S>)> = None;
    let mut global = 0;
    for epoch in 1..=spec.epochs {
        let mut rng = epoch_rng(spec.seed, spec.phase, epoch);
        order.sort_unstable();
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut lr = first_lr;
        for batch in order.chunks(spec.batch_size) {
            grads.fill_zero();
            for &i in batch {
                loss_sum += step(params, &train[i], &mut rng, &mut grads)?;
            }
            grads.scale(S::one() / S::of(batch.len() as f64));
            lr = lr_schedule(global, total, spec.lr)?;
            opt.step(params, &grads, S::of(lr));
            global += 1;
        }
        if !params.all_finite() {
            return Err(Error::Config(format!(
                "phase {}: parameters diverged at epoch {epoch}; lower the learning rate",
                spec.phase
            )));
        }
        let (val_loss, val_sim) = eval(params, val)?;
        let entry = EpochLog {
            phase: spec.phase,
            epoch,
            train_loss: loss_sum / train.len() as f64,
            val_loss,
            val_sim,
            lr,
        };
        if best.as_ref().map_or(true, |(b, _)| val_loss < b.val_loss) {
            best = Some((entry.clone(), params.clone()));
        }
        log.push(entry);
    }
    let (best, best_params) = best.expect("at least one epoch");
    *params = best_params;
    Ok(PhaseOutcome {
        log,
        best,
        first_lr,
        steps: total,
        train_size: train.len(),
        val_size: val.len(),
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn triplet_on_tape<S: Scalar>(
    params: &ParamSet<S>,
    grads: &mut Gradients<S>,
    margin: S,
    forward: impl Fn(&mut Graph<'_, S>, usize) -> Result<crate::nn::Var>,
) -> Result<f64> {
    let mut g = Graph::new(params);
    let a = forward(&mut g, 0)?;
    let p = forward(&mut g, 1)?;
    let n = forward(&mut g, 2)?;
    let loss = triplet_loss_graph(&mut g, a, p, n, margin);
    let value = g.scalar(loss).as_f64();
    if value > 0.0 {
        g.backward(loss, grads);
    }
    Ok(value)
}

/// Mean triplet loss with each distinct member embedded once.
fn triplet_val_loss<S: Scalar>(val: &[Triplet], margin: S, embed: impl Fn(u64) -> Result<Vec<S>>) -> Result<f64> {
    let mut cache: HashMap<u64, Vec<S>> = HashMap::new();
    for t in val {
        for id in triplet_members(t) {
            if !cache.contains_key(&id) {
                cache.insert(id, embed(id)?);
            }
        }
    }
    Ok(mean(val.iter().map(|t| {
        let [a, p, n] = triplet_members(t);
        super::losses::triplet_loss(&cache[&a], &cache[&p], &cache[&n], margin).as_f64()
    })))
}

fn triplet_members(t: &Triplet) -> [u64; 3] {
    [t.anchor, t.positive, t.negative]
}

/// Phase 1: teacher on phonetic triplets. Triplets with a member lacking a
/// feature sequence are dropped first.
pub fn train_phase1<S: Scalar>(
    teacher: &mut Teacher<S>,
    triplets: &[Triplet],
    features: &HashMap<u64, FeatureSeq>,
    cfg: &TrainConfig,
) -> Result<PhaseOutcome> {
    cfg.validate()?;
    let usable: Vec<Triplet> = triplets
        .iter()
        .copied()
        .filter(|t| triplet_members(t).iter().all(|id| features.get(id).is_some_and(|f| !f.is_empty())))
        .collect();
    if usable.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let (train, val) = split_train_val(&usable, cfg.val_fraction, cfg.seed);
    let margin = S::of(cfg.phase1.margin);
    let spec = LoopSpec {
        phase: 1,
        epochs: cfg.phase1.epochs,
        lr: cfg.phase1.lr,
        batch_size: cfg.batch_size,
        weight_decay: cfg.weight_decay,
        seed: cfg.seed,
    };
    let mut params = std::mem::take(&mut teacher.params);
    let layout: &Teacher<S> = teacher;
    let result = run_loop(
        &mut params,
        &spec,
        &train,
        &val,
        |p, t, _, grads| {
            let ids = triplet_members(t);
            triplet_on_tape(p, grads, margin, |g, k| layout.forward_graph(g, &features[&ids[k]]))
        },
        |p, val| {
            let embed = |id: u64| {
                let mut g = Graph::new(p);
                let v = layout.forward_graph(&mut g, &features[&id])?;
                Ok(g.value(v).as_slice().to_vec())
            };
            Ok((triplet_val_loss(val, margin, embed)?, None))
        },
    );
    teacher.params = params;
    result
}

/// One distillation example: the student's clean input and the phonetic
/// features the frozen teacher embeds.
#[derive(Debug, Clone)]
pub struct DistillSample {
    pub input: StudentInput,
    pub features: FeatureSeq,
}

struct Target<S> {
    input: StudentInput,
    /// Teacher embedding of the clean sample, computed once.
    target: Vec<S>,
}

/// Phase 2: student regresses onto the frozen teacher under noise and
/// language dropout.
pub fn train_phase2<S: Scalar>(
    student: &mut Student<S>,
    teacher: Option<&Teacher<S>>,
    samples: &[DistillSample],
    vocab: &Vocabulary,
    cfg: &TrainConfig,
) -> Result<PhaseOutcome> {
    let teacher = teacher.ok_or(Error::TeacherCheckpointRequired)?;
    cfg.validate()?;
    let mut targets = Vec::with_capacity(samples.len());
    for s in samples {
        if s.input.ids.is_empty() || s.features.is_empty() {
            continue;
        }
        targets.push(Target {
            input: s.input.clone(),
            target: teacher.embed(&s.features)?,
        });
    }
    if targets.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let indices: Vec<usize> = (0..targets.len()).collect();
    let (train, val) = split_train_val(&indices, cfg.val_fraction, cfg.seed);
    let alpha = S::of(cfg.phase2.alpha);
    let spec = LoopSpec {
        phase: 2,
        epochs: cfg.phase2.epochs,
        lr: cfg.phase2.lr,
        batch_size: cfg.batch_size,
        weight_decay: cfg.weight_decay,
        seed: cfg.seed,
    };
    let mut params = std::mem::take(&mut student.params);
    let layout: &Student<S> = student;
    let targets = &targets;
    let result = run_loop(
        &mut params,
        &spec,
        &train,
        &val,
        |p, &i, rng, grads| {
            let sample = &targets[i];
            let (mut input, _) = apply_noise(&sample.input, vocab, &cfg.noise, rng);
            input.lang = language_dropout(input.lang, cfg.lang_dropout, rng);
            let mut g = Graph::new(p);
            let s = layout.forward_graph(&mut g, &input)?;
            let t = g.constant(crate::nn::Matrix::row_vector(sample.target.clone()));
            let loss = distill_loss_graph(&mut g, s, t, alpha);
            g.backward(loss, grads);
            Ok(g.scalar(loss).as_f64())
        },
        |p, val| {
            let mut losses = Vec::with_capacity(val.len());
            let mut sims = Vec::with_capacity(val.len());
            for &i in val {
                let mut g = Graph::new(p);
                let s = layout.forward_graph(&mut g, &targets[i].input)?;
                let e = g.value(s).as_slice();
                losses.push(super::losses::distill_loss(e, &targets[i].target, alpha).as_f64());
                sims.push(cosine(e, &targets[i].target).as_f64());
            }
            Ok((mean(losses.into_iter()), Some(mean(sims.into_iter()))))
        },
    );
    student.params = params;
    result
}

/// Phase 3: student fine-tuned on hard triplets of character inputs.
pub fn train_phase3<S: Scalar>(
    student: &mut Student<S>,
    triplets: &[Triplet],
    inputs: &HashMap<u64, StudentInput>,
    vocab: &Vocabulary,
    cfg: &TrainConfig,
) -> Result<PhaseOutcome> {
    cfg.validate()?;
    let usable: Vec<Triplet> = triplets
        .iter()
        .copied()
        .filter(|t| triplet_members(t).iter().all(|id| inputs.get(id).is_some_and(|x| !x.ids.is_empty())))
        .collect();
    if usable.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let (train, val) = split_train_val(&usable, cfg.val_fraction, cfg.seed);
    let margin = S::of(cfg.phase3.margin);
    let spec = LoopSpec {
        phase: 3,
        epochs: cfg.phase3.epochs,
        lr: cfg.phase3.lr,
        batch_size: cfg.batch_size,
        weight_decay: cfg.weight_decay,
        seed: cfg.seed,
    };
    let mut params = std::mem::take(&mut student.params);
    let layout: &Student<S> = student;
    let result = run_loop(
        &mut params,
        &spec,
        &train,
        &val,
        |p, t, rng, grads| {
            let mut members = Vec::with_capacity(3);
            for id in triplet_members(t) {
                let mut x = inputs[&id].clone();
                if cfg.phase3_noise {
                    x = apply_noise(&x, vocab, &cfg.noise, rng).0;
                }
                if cfg.phase3_lang_dropout {
                    x.lang = language_dropout(x.lang, cfg.lang_dropout, rng);
                }
                members.push(x);
            }
            triplet_on_tape(p, grads, margin, |g, k| layout.forward_graph(g, &members[k]))
        },
        |p, val| {
            let embed = |id: u64| {
                let mut g = Graph::new(p);
                let v = layout.forward_graph(&mut g, &inputs[&id])?;
                Ok(g.value(v).as_slice().to_vec())
            };
            Ok((triplet_val_loss(val, margin, embed)?, None))
        },
    );
    student.params = params;
    result
}
