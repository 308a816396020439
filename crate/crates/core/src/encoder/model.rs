use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{EncoderConfig, EMBED_DIM};
use crate::error::{Error, Result};
use crate::nn::{Graph, Matrix, ParamId, ParamSet, Var};
use crate::phonetics::{FeatureSeq, FEATURE_DIM};
use crate::scalar::Scalar;
use crate::script_kit::{detect_script, preprocess, ScriptId, Vocabulary};

static TRUNCATIONS: AtomicU64 = AtomicU64::new(0);

/// Inputs cut to `max_len` since process start.
pub fn truncation_count() -> u64 {
    TRUNCATIONS.load(Ordering::Relaxed)
}

fn capped(len: usize, max_len: usize) -> usize {
    if len > max_len {
        TRUNCATIONS.fetch_add(1, Ordering::Relaxed);
        max_len
    } else {
        len
    }
}

struct Init {
    rng: ChaCha8Rng,
}

impl Init {
    /// `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`
    fn weight<S: Scalar>(&mut self, rows: usize, cols: usize) -> Matrix<S> {
        let bound = 1.0 / (rows as f64).sqrt();
        self.uniform(rows, cols, bound)
    }

    fn uniform<S: Scalar>(&mut self, rows: usize, cols: usize, bound: f64) -> Matrix<S> {
        let data = (0..rows * cols).map(|_| S::of(self.rng.gen_range(-bound..=bound))).collect();
        Matrix::from_vec(rows, cols, data)
    }
}

#[derive(Debug, Clone, Copy)]
struct LstmIds {
    w_ih: ParamId,
    w_hh: ParamId,
    b: ParamId,
}

#[derive(Debug, Clone, Copy)]
struct TrunkIds {
    fw: LstmIds,
    bw: LstmIds,
    /// q, k, v, o
    attn_w: [ParamId; 4],
    attn_b: [ParamId; 4],
    pool_w: ParamId,
    pool_b: ParamId,
    pool_v: ParamId,
    out_w: ParamId,
    out_b: ParamId,
}

impl TrunkIds {
    fn declare<S: Scalar>(ps: &mut ParamSet<S>, cfg: &EncoderConfig, init: &mut Init) -> Self {
        let (p, h, w) = (cfg.input_width(), cfg.hidden, cfg.trunk_width());
        let mut lstm = |ps: &mut ParamSet<S>, dir: &str| {
            let w_ih = ps.push(format!("lstm_{dir}.w_ih"), init.weight(p, 4 * h), true);
            let w_hh = ps.push(format!("lstm_{dir}.w_hh"), init.weight(h, 4 * h), true);
            // Forget gate bias starts at 1.
            let mut b = Matrix::zeros(1, 4 * h);
            for j in h..2 * h {
                b.set(0, j, S::one());
            }
            let b = ps.push(format!("lstm_{dir}.b"), b, true);
            LstmIds { w_ih, w_hh, b }
        };
        let fw = lstm(ps, "fw");
        let bw = lstm(ps, "bw");
        let names = ["q", "k", "v", "o"];
        let attn_w = names.map(|n| ps.push(format!("attn.w_{n}"), init.weight(w, w), true));
        let attn_b = names.map(|n| ps.push(format!("attn.b_{n}"), Matrix::zeros(1, w), true));
        let pool_w = ps.push("pool.w", init.weight(w, w), true);
        let pool_b = ps.push("pool.b", Matrix::zeros(1, w), true);
        let v: Matrix<S> = init.weight(w, 1);
        let pool_v = ps.push("pool.v", Matrix::from_vec(1, w, v.into_vec()), true);
        let out_w = ps.push("out.w", init.weight(w, EMBED_DIM), true);
        let out_b = ps.push("out.b", Matrix::zeros(1, EMBED_DIM), true);
        TrunkIds {
            fw,
            bw,
            attn_w,
            attn_b,
            pool_w,
            pool_b,
            pool_v,
            out_w,
            out_b,
        }
    }
}

fn lstm<S: Scalar>(g: &mut Graph<'_, S>, ids: &LstmIds, x: Var, hidden: usize, reverse: bool) -> Var {
    let t_len = g.value(x).rows();
    let w_ih = g.param(ids.w_ih);
    let w_hh = g.param(ids.w_hh);
    let b = g.param(ids.b);
    let xw = g.affine(x, w_ih, b);
    let mut h: Option<Var> = None;
    let mut c: Option<Var> = None;
    let mut outs = vec![None; t_len];
    let order: Vec<usize> = if reverse { (0..t_len).rev().collect() } else { (0..t_len).collect() };
    for t in order {
        let mut gates = g.slice_rows(xw, t, 1);
        if let Some(hp) = h {
            let rec = g.matmul(hp, w_hh);
            gates = g.add(gates, rec);
        }
        let i_pre = g.slice_cols(gates, 0, hidden);
        let f_pre = g.slice_cols(gates, hidden, hidden);
        let g_pre = g.slice_cols(gates, 2 * hidden, hidden);
        let o_pre = g.slice_cols(gates, 3 * hidden, hidden);
        let i = g.sigmoid(i_pre);
        let f = g.sigmoid(f_pre);
        let cand = g.tanh(g_pre);
        let o = g.sigmoid(o_pre);
        let ic = g.mul(i, cand);
        let c_new = match c {
            Some(cp) => {
                let fc = g.mul(f, cp);
                g.add(fc, ic)
            }
            None => ic,
        };
        let tc = g.tanh(c_new);
        let h_new = g.mul(o, tc);
        outs[t] = Some(h_new);
        h = Some(h_new);
        c = Some(c_new);
    }
    let rows: Vec<Var> = outs.into_iter().map(|v| v.expect("every step visited")).collect();
    g.concat_rows(&rows)
}

/// BiLSTM → residual multi-head self-attention → additive attention pooling
/// → linear → L2 normalisation. Returns a `1×128` unit row.
fn trunk<S: Scalar>(g: &mut Graph<'_, S>, ids: &TrunkIds, cfg: &EncoderConfig, x: Var) -> Var {
    let fw = lstm(g, &ids.fw, x, cfg.hidden, false);
    let bw = lstm(g, &ids.bw, x, cfg.hidden, true);
    let y = g.concat_cols(&[fw, bw]);

    let w = cfg.trunk_width();
    let dh = w / cfg.heads;
    let proj = |g: &mut Graph<'_, S>, k: usize| {
        let wv = g.param(ids.attn_w[k]);
        let bv = g.param(ids.attn_b[k]);
        g.affine(y, wv, bv)
    };
    let q = proj(g, 0);
    let k = proj(g, 1);
    let v = proj(g, 2);
    let scale = S::one() / S::of(dh as f64).sqrt();
    let mut heads = Vec::with_capacity(cfg.heads);
    for hd in 0..cfg.heads {
        let qh = g.slice_cols(q, hd * dh, dh);
        let kh = g.slice_cols(k, hd * dh, dh);
        let vh = g.slice_cols(v, hd * dh, dh);
        let scores = g.matmul_bt(qh, kh);
        let scores = g.scale(scores, scale);
        let attn = g.softmax_rows(scores);
        heads.push(g.matmul(attn, vh));
    }
    let cat = if heads.len() == 1 { heads[0] } else { g.concat_cols(&heads) };
    let wo = g.param(ids.attn_w[3]);
    let bo = g.param(ids.attn_b[3]);
    let mixed = g.affine(cat, wo, bo);
    let y = g.add(y, mixed);

    let pw = g.param(ids.pool_w);
    let pb = g.param(ids.pool_b);
    let pv = g.param(ids.pool_v);
    let u = g.affine(y, pw, pb);
    let u = g.tanh(u);
    let scores = g.matmul_bt(pv, u);
    let weights = g.softmax_rows(scores);
    let pooled = g.matmul(weights, y);

    let ow = g.param(ids.out_w);
    let ob = g.param(ids.out_b);
    let out = g.affine(pooled, ow, ob);
    g.l2_normalize_rows(out)
}

fn finish<S: Scalar>(g: &Graph<'_, S>, v: Var) -> Vec<S> {
    g.value(v).as_slice().to_vec()
}

/// Phonetic encoder over articulatory feature sequences.
#[derive(Debug, Clone)]
pub struct Teacher<S: Scalar> {
    pub config: EncoderConfig,
    pub params: ParamSet<S>,
    proj_w: ParamId,
    proj_b: ParamId,
    trunk: TrunkIds,
}

impl<S: Scalar> Teacher<S> {
    pub fn new(config: EncoderConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut init = Init {
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let mut params = ParamSet::new();
        let proj_w = params.push("proj.w", init.weight(FEATURE_DIM, config.input_width()), true);
        let proj_b = params.push("proj.b", Matrix::zeros(1, config.input_width()), true);
        let trunk = TrunkIds::declare(&mut params, &config, &mut init);
        Ok(Self {
            config,
            params,
            proj_w,
            proj_b,
            trunk,
        })
    }

    /// Same layout with externally supplied tensors (checkpoint loading).
    pub fn with_params(config: EncoderConfig, params: ParamSet<S>) -> Result<Self> {
        let mut t = Self::new(config, 0)?;
        super::checkpoint::check_layout(&t.params, &params)?;
        t.params = params;
        Ok(t)
    }

    pub fn forward_graph(&self, g: &mut Graph<'_, S>, fs: &FeatureSeq) -> Result<Var> {
        if fs.is_empty() {
            return Err(Error::EmptySequence);
        }
        let t = capped(fs.len(), self.config.max_len);
        let flat: Vec<S> = fs.vectors[..t].iter().flatten().map(|&b| S::of(b as f64)).collect();
        let x = g.constant(Matrix::from_vec(t, FEATURE_DIM, flat));
        let w = g.param(self.proj_w);
        let b = g.param(self.proj_b);
        let h = g.affine(x, w, b);
        Ok(trunk(g, &self.trunk, &self.config, h))
    }

    pub fn embed(&self, fs: &FeatureSeq) -> Result<Vec<S>> {
        let mut g = Graph::new(&self.params);
        let v = self.forward_graph(&mut g, fs)?;
        Ok(finish(&g, v))
    }
}

/// Token ids plus name-level script and language index (0 = unknown).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudentInput {
    pub ids: Vec<usize>,
    pub script: ScriptId,
    pub lang: usize,
}

/// Character encoder; language index 0 is the unknown language.
#[derive(Debug, Clone)]
pub struct Student<S: Scalar> {
    pub config: EncoderConfig,
    pub params: ParamSet<S>,
    pub languages: Vec<String>,
    pub vocab_size: usize,
    char_emb: ParamId,
    script_emb: ParamId,
    lang_emb: ParamId,
    trunk: TrunkIds,
}

impl<S: Scalar> Student<S> {
    pub fn new(config: EncoderConfig, vocab_size: usize, languages: Vec<String>, seed: u64) -> Result<Self> {
        config.validate()?;
        if vocab_size < 2 {
            return Err(Error::Config("student: vocabulary must hold at least PAD and UNK".into()));
        }
        let mut init = Init {
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let mut params = ParamSet::new();
        let char_emb = params.push("emb.char", init.uniform(vocab_size, config.char_dim, 0.1), false);
        let script_emb = params.push("emb.script", init.uniform(ScriptId::COUNT, config.script_dim, 0.1), false);
        let lang_emb = params.push("emb.lang", init.uniform(languages.len() + 1, config.lang_dim, 0.1), false);
        let trunk = TrunkIds::declare(&mut params, &config, &mut init);
        Ok(Self {
            config,
            params,
            languages,
            vocab_size,
            char_emb,
            script_emb,
            lang_emb,
            trunk,
        })
    }

    pub fn with_params(config: EncoderConfig, vocab_size: usize, languages: Vec<String>, params: ParamSet<S>) -> Result<Self> {
        let mut s = Self::new(config, vocab_size, languages, 0)?;
        super::checkpoint::check_layout(&s.params, &params)?;
        s.params = params;
        Ok(s)
    }

    /// Copies every trunk tensor from `teacher`; embedding tables keep
    /// their initial values.
    pub fn copy_trunk_from(&mut self, teacher: &Teacher<S>) -> Result<()> {
        if teacher.config.hidden != self.config.hidden
            || teacher.config.heads != self.config.heads
            || teacher.config.input_width() != self.config.input_width()
        {
            return Err(Error::Config("student and teacher trunks differ in shape".into()));
        }
        let source: std::collections::HashMap<&str, &Matrix<S>> =
            teacher.params.iter().map(|p| (p.name.as_str(), &p.value)).collect();
        for p in self.params.iter_mut() {
            if let Some(v) = source.get(p.name.as_str()) {
                p.value = (*v).clone();
            }
        }
        Ok(())
    }

    /// Index into the language table; 0 for unknown or absent codes.
    pub fn lang_index(&self, lang: Option<&str>) -> usize {
        lang.and_then(|l| self.languages.iter().position(|x| x == l))
            .map_or(0, |i| i + 1)
    }

    pub fn prepare(&self, vocab: &Vocabulary, text: &str, lang: Option<&str>) -> Result<StudentInput> {
        let script = detect_script(text)?;
        let ts = preprocess(text);
        let ids = vocab.encode(&ts).into_iter().map(|i| i as usize).collect();
        Ok(StudentInput {
            ids,
            script,
            lang: self.lang_index(lang),
        })
    }

    pub fn forward_graph(&self, g: &mut Graph<'_, S>, input: &StudentInput) -> Result<Var> {
        if input.ids.is_empty() {
            return Err(Error::EmptySequence);
        }
        let t = capped(input.ids.len(), self.config.max_len);
        let ids: Vec<usize> = input.ids[..t]
            .iter()
            .map(|&i| if i < self.vocab_size { i } else { crate::script_kit::UNK as usize })
            .collect();
        let chars = g.gather(self.char_emb, &ids);
        let script = g.gather(self.script_emb, &vec![input.script.index(); t]);
        let lang = g.gather(self.lang_emb, &vec![input.lang.min(self.languages.len()); t]);
        let x = g.concat_cols(&[chars, script, lang]);
        Ok(trunk(g, &self.trunk, &self.config, x))
    }

    pub fn embed(&self, input: &StudentInput) -> Result<Vec<S>> {
        let mut g = Graph::new(&self.params);
        let v = self.forward_graph(&mut g, input)?;
        Ok(finish(&g, v))
    }

    pub fn embed_text(&self, vocab: &Vocabulary, text: &str, lang: Option<&str>) -> Result<Vec<S>> {
        self.embed(&self.prepare(vocab, text, lang)?)
    }
}

/// Dot product of two unit vectors, clamped to `[-1, 1]`.
pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> S {
    crate::nn::dot(a, b).max(-S::one()).min(S::one())
}
