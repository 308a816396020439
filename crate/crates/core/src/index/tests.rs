use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub(crate) fn random_store(n: usize, seed: u64) -> EmbeddingStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = EmbeddingStore::new("test");
    for id in 0..n as u64 {
        store.insert(id, &random_unit(&mut rng)).unwrap();
    }
    store
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec<f32> {
    let v: Vec<f64> = (0..EMBED_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| (x / n) as f32).collect()
}

fn axis(i: usize) -> Vec<f32> {
    let mut v = vec![0.0; EMBED_DIM];
    v[i] = 1.0;
    v
}

#[test]
fn orthogonal_vectors() {
    let mut store = EmbeddingStore::new("m");
    for i in 0..3 {
        store.insert(i as u64 + 1, &axis(i)).unwrap();
    }
    for mode in [IndexMode::Exact, IndexMode::Approximate] {
        let idx = Index::build(store.clone(), mode, &HnswParams::default()).unwrap();
        let hits = idx.query(&axis(0), 1).unwrap();
        assert_eq!(hits, vec![Hit { id: 1, score: 1.0 }]);
        assert_eq!(idx.query(&axis(0), 10).unwrap().len(), 3);
    }
}

#[test]
fn ties_break_by_ascending_id() {
    let mut store = EmbeddingStore::new("m");
    store.insert(9, &axis(1)).unwrap();
    store.insert(4, &axis(1)).unwrap();
    store.insert(7, &axis(2)).unwrap();
    let idx = Index::build(store, IndexMode::Exact, &HnswParams::default()).unwrap();
    let ids: Vec<u64> = idx.query(&axis(1), 3).unwrap().iter().map(|h| h.id).collect();
    assert_eq!(ids, vec![4, 9, 7]);
}

#[test]
fn store_rejects_bad_vectors() {
    let mut store = EmbeddingStore::new("m");
    let mut v = axis(0);
    v[0] = 1.01;
    assert!(matches!(store.insert(1, &v), Err(Error::NotUnitNorm { .. })));
    v[0] = 1.0005;
    store.insert(1, &v).unwrap();
    assert!(matches!(store.insert(1, &axis(2)), Err(Error::DuplicateId(1))));
    assert!(matches!(store.insert(2, &[1.0]), Err(Error::Dimensions(_))));
    assert!(matches!(
        Index::build(EmbeddingStore::new("m"), IndexMode::Exact, &HnswParams::default()),
        Err(Error::EmptyStore)
    ));
}

#[test]
fn exact_mode_matches_brute_force() {
    let store = random_store(1000, 1);
    let idx = Index::build(store.clone(), IndexMode::Exact, &HnswParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let q = random_unit(&mut rng);
        let mut oracle: Vec<(f64, u64)> = store
            .iter()
            .map(|(id, v)| (v.iter().zip(&q).map(|(a, b)| *a as f64 * *b as f64).sum(), id))
            .collect();
        oracle.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let got: Vec<u64> = idx.query(&q, 10).unwrap().iter().map(|h| h.id).collect();
        let want: Vec<u64> = oracle[..10].iter().map(|p| p.1).collect();
        assert_eq!(got, want);
    }
}

#[test]
fn full_ranking_is_a_total_order() {
    let store = random_store(200, 3);
    let idx = Index::build(store, IndexMode::Exact, &HnswParams::default()).unwrap();
    let hits = idx.query(idx.store().row(5), 200).unwrap();
    assert_eq!(hits.len(), 200);
    assert_eq!(hits[0].id, 5);
    for w in hits.windows(2) {
        assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].id < w[1].id));
    }
}

#[test]
fn approximate_recall_on_a_small_store() {
    let store = random_store(5000, 4);
    let exact = Index::build(store.clone(), IndexMode::Exact, &HnswParams::default()).unwrap();
    let approx = Index::build(store, IndexMode::Approximate, &HnswParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut hit = 0;
    for _ in 0..100 {
        let q = random_unit(&mut rng);
        let truth: Vec<u64> = exact.query(&q, 10).unwrap().iter().map(|h| h.id).collect();
        hit += approx.query(&q, 10).unwrap().iter().filter(|h| truth.contains(&h.id)).count();
    }
    assert!(hit as f64 / 1000.0 >= 0.95, "recall {}", hit as f64 / 1000.0);
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let store = random_store(500, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let queries: Vec<Vec<f32>> = (0..10).map(|_| random_unit(&mut rng)).collect();
    for mode in [IndexMode::Exact, IndexMode::Approximate] {
        let idx = Index::build(store.clone(), mode, &HnswParams::default()).unwrap();
        let path = dir.path().join("x.idx");
        idx.save(&path).unwrap();
        let back = Index::load(&path).unwrap();
        assert_eq!(back, idx);
        for q in &queries {
            assert_eq!(back.query(q, 10).unwrap(), idx.query(q, 10).unwrap());
        }
    }
    let path = dir.path().join("e.emb");
    store.save(&path).unwrap();
    assert_eq!(EmbeddingStore::load(&path).unwrap(), store);
}

#[test]
fn corrupted_files_fail_to_load() {
    let idx = Index::build(random_store(50, 8), IndexMode::Approximate, &HnswParams::default()).unwrap();
    let bytes = idx.to_bytes();
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(Index::from_bytes(&bad).is_err());
    let mut bad = bytes.clone();
    bad[9] ^= 0xff;
    assert!(Index::from_bytes(&bad).is_err());
    let mut bad = bytes.clone();
    bad[4] = 9;
    assert!(matches!(Index::from_bytes(&bad), Err(Error::VersionMismatch { found: 9, .. })));
    assert!(Index::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    assert!(matches!(Index::load(Path::new("")), Err(Error::EmptyPath)));
}

#[test]
fn hnsw_build_is_deterministic() {
    let store = random_store(300, 9);
    let a = Index::build(store.clone(), IndexMode::Approximate, &HnswParams::default()).unwrap();
    let b = Index::build(store, IndexMode::Approximate, &HnswParams::default()).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
}
