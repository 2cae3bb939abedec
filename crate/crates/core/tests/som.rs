mod common;

use blockmorph::metrics::{FeatureMatrix, MetricSet, NormParam, SetName};
use blockmorph::som::{EncodingsFile, SeededRng, SomConfig, SomModel};
use blockmorph::synth;
use blockmorph::Error;
use common::*;

fn features(rows: Vec<Vec<f64>>) -> FeatureMatrix {
    let mut set = MetricSet::new(SetName::Spacemate);
    set.norm_params = set.indicators.iter().map(|&i| NormParam { indicator: i, min: 0.0, max: 1.0 }).collect();
    FeatureMatrix { set, block_ids: (0..rows.len()).map(|i| format!("s{i:03}")).collect(), rows }
}

fn random_rows(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SeededRng::new(seed);
    (0..n).map(|_| (0..4).map(|_| rng.next_f64()).collect()).collect()
}

/// Online SOM written out directly from the training rule.
fn reference_train(x: &[Vec<f64>], cfg: &SomConfig) -> Vec<Vec<f64>> {
    let mut rng = SeededRng::new(cfg.seed);
    let dim = x[0].len();
    let k = cfg.grid_rows * cfg.grid_cols;
    let mut w: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.next_f64()).collect()).collect();
    for t in 0..cfg.iterations {
        let frac = 1.0 - t as f64 / cfg.iterations as f64;
        let alpha = cfg.alpha0 * frac;
        let sigma = (cfg.sigma0 * frac).max(0.5);
        let mut order: Vec<usize> = (0..x.len()).collect();
        rng.shuffle(&mut order);
        for &s in &order {
            let mut bmu = 0;
            for j in 1..k {
                if euclid(&x[s], &w[j]) < euclid(&x[s], &w[bmu]) {
                    bmu = j;
                }
            }
            let (br, bc) = ((bmu / cfg.grid_cols) as f64, (bmu % cfg.grid_cols) as f64);
            for (j, wj) in w.iter_mut().enumerate() {
                let (r, c) = ((j / cfg.grid_cols) as f64, (j % cfg.grid_cols) as f64);
                let g2 = (r - br).powi(2) + (c - bc).powi(2);
                let h = (-g2 / (2.0 * sigma * sigma)).exp();
                for m in 0..dim {
                    wj[m] += alpha * h * (x[s][m] - wj[m]);
                }
            }
        }
    }
    w
}

fn brute_bmu(m: &SomModel, x: &[f64]) -> usize {
    let d: Vec<f64> = m.weights().map(|w| euclid(w, x)).collect();
    (0..d.len()).fold(0, |best, j| if d[j] < d[best] { j } else { best })
}

fn hand_model(weights: Vec<Vec<f64>>, rows: usize, cols: usize) -> SomModel {
    SomModel::from_weights(SomConfig::with_grid(rows, cols), SetName::Spacemate, vec![], weights).unwrap()
}

#[test]
fn trainer_matches_reference() {
    let rows = random_rows(30, 1);
    let cfg = SomConfig { iterations: 60, ..SomConfig::with_grid(4, 3) };
    let model = SomModel::train(&features(rows.clone()), &cfg).unwrap();
    let oracle = reference_train(&rows, &cfg);
    for (w, o) in model.weights().zip(&oracle) {
        for (a, b) in w.iter().zip(o) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn identical_samples_attract_every_neuron() {
    let v = vec![0.2, 0.7, 0.4, 0.9];
    let f = features(vec![v.clone(); 12]);
    let model = SomModel::train(&f, &SomConfig::default()).unwrap();
    let worst = model.weights().flat_map(|w| w.iter().zip(&v).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn training_is_deterministic() {
    let f = features(random_rows(80, 2));
    let cfg = SomConfig { iterations: 200, ..SomConfig::default() };
    let a = SomModel::train(&f, &cfg).unwrap();
    let b = SomModel::train(&f, &cfg).unwrap();
    assert_eq!(a, b);
    let c = SomModel::train(&f, &SomConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn weights_stay_in_unit_box() {
    for seed in 0..5 {
        let f = features(random_rows(60, 100 + seed));
        let cfg = SomConfig { iterations: 100, seed, ..SomConfig::with_grid(6, 5) };
        let m = SomModel::train(&f, &cfg).unwrap();
        assert!(m.weights().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn bmu_cases() {
    let mut rng = SeededRng::new(3);
    let weights: Vec<Vec<f64>> = (0..100).map(|_| (0..4).map(|_| rng.next_f64()).collect()).collect();
    let m = hand_model(weights.clone(), 10, 10);
    assert_eq!(m.bmu(&weights[37]).unwrap(), 37);

    // neurons 3 and 8 equidistant from x, every other neuron far away
    let mut w = vec![vec![5.0, 5.0, 5.0, 5.0]; 9];
    w[3] = vec![0.0, 0.0, 0.0, 0.0];
    w[8] = vec![1.0, 0.0, 0.0, 0.0];
    let m = hand_model(w, 3, 3);
    assert_eq!(m.bmu(&[0.5, 0.0, 0.0, 0.0]).unwrap(), 3);

    let m = hand_model(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], 2, 2);
    let mut rng = SeededRng::new(4);
    for _ in 0..500 {
        let x = [rng.next_f64() * 1.4 - 0.2, rng.next_f64() * 1.4 - 0.2];
        assert_eq!(m.bmu(&x).unwrap(), brute_bmu(&m, &x));
    }
    assert!(matches!(m.bmu(&[0.0]), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
}

#[test]
fn encode_cases() {
    let m = hand_model(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]], 2, 2);
    let e = m.encode(&[1.0, 0.0]).unwrap();
    assert_eq!(&e[..2], &[1.0, 1.0]);

    let f = features(random_rows(20, 5));
    let trained = SomModel::train(&f, &SomConfig { iterations: 20, ..SomConfig::default() }).unwrap();
    let w5 = trained.weight(5).to_vec();
    let e = trained.encode(&w5).unwrap();
    assert_eq!(e[5], 0.0);
    assert!(e.iter().enumerate().all(|(j, d)| j == 5 || *d > 0.0));
    for (j, d) in e.iter().enumerate() {
        assert_eq!(*d, euclid(trained.weight(j), &w5));
    }
}

#[test]
fn assign_cases() {
    let one = features(vec![vec![0.5; 4]]);
    let m = SomModel::train(&one, &SomConfig { iterations: 10, ..SomConfig::default() }).unwrap();
    let a = m.assign(&one).unwrap();
    assert_eq!(a.len(), 100);
    assert_eq!(a.values().filter(|v| !v.is_empty()).count(), 1);

    let two = synth::two_clusters(1);
    let m = SomModel::train(&two, &SomConfig::default()).unwrap();
    let a = m.assign(&two).unwrap();
    assert!(a.values().filter(|v| !v.is_empty()).count() >= 2);
    for ids in a.values() {
        let kinds: std::collections::BTreeSet<char> = ids.iter().map(|id| id.chars().next().unwrap()).collect();
        assert!(kinds.len() <= 1, "mixed neuron {ids:?}");
    }
    assert_eq!(a.values().map(Vec::len).sum::<usize>(), 200);
}

#[test]
fn quantization_error_cases() {
    let w: Vec<Vec<f64>> = (0..4).map(|j| vec![j as f64 / 4.0, 0.0]).collect();
    let m = hand_model(w.clone(), 2, 2);
    let mut f = features(w.clone());
    f.set.norm_params.truncate(2);
    assert_eq!(m.quantization_error(&f).unwrap(), 0.0);
    let single = FeatureMatrix { rows: vec![vec![0.75, 0.3]], block_ids: vec!["x".into()], set: f.set.clone() };
    assert!((m.quantization_error(&single).unwrap() - 0.3).abs() < 1e-15);

    let rows = random_rows(50, 6);
    let f = features(rows.clone());
    let m = SomModel::train(&f, &SomConfig { iterations: 30, ..SomConfig::default() }).unwrap();
    let brute = rows.iter().map(|x| m.weights().map(|w| euclid(w, x)).fold(f64::INFINITY, f64::min)).sum::<f64>() / 50.0;
    assert!((m.quantization_error(&f).unwrap() - brute).abs() < 1e-12);
}

#[test]
fn two_clusters_are_separated_in_encoding_space() {
    let f = synth::two_clusters(9);
    let m = SomModel::train(&f, &SomConfig::default()).unwrap();
    let initial = SomModel::initialize(&f, &SomConfig::default()).unwrap().quantization_error(&f).unwrap();
    assert!(m.quantization_error(&f).unwrap() < 0.5 * initial);

    let enc = m.encode_all(&f).unwrap();
    let (mut intra, mut inter, mut ni, mut nx) = (0.0, 0.0, 0, 0);
    for i in (0..enc.len()).step_by(7) {
        for j in (0..enc.len()).step_by(5) {
            let d = euclid(&enc[i].values, &enc[j].values);
            if enc[i].block_id[..1] == enc[j].block_id[..1] {
                intra += d;
                ni += 1;
            } else {
                inter += d;
                nx += 1;
            }
        }
    }
    assert!(intra / (ni as f64) < inter / (nx as f64));
}

#[test]
fn config_validation() {
    let f = features(random_rows(5, 7));
    let bad = [
        SomConfig::with_grid(1, 10),
        SomConfig { iterations: 0, ..SomConfig::default() },
        SomConfig { alpha0: 0.0, ..SomConfig::default() },
        SomConfig { alpha0: 1.5, ..SomConfig::default() },
        SomConfig { sigma0: -1.0, ..SomConfig::default() },
    ];
    for cfg in bad {
        assert!(matches!(SomModel::train(&f, &cfg), Err(Error::InvalidConfig(_))), "{cfg:?}");
    }
    let empty = FeatureMatrix { rows: vec![], block_ids: vec![], set: f.set.clone() };
    assert!(matches!(SomModel::train(&empty, &SomConfig::default()), Err(Error::EmptyFeatures)));
}

#[test]
fn schedule_endpoints() {
    let cfg = SomConfig::default();
    assert_eq!(cfg.schedule(0), (0.5, 5.0));
    let (a, s) = cfg.schedule(999);
    assert!((a - 0.0005).abs() < 1e-15);
    assert_eq!(s, 0.5);
}

#[test]
fn model_and_encodings_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = features(random_rows(25, 8));
    let m = SomModel::train(&f, &SomConfig { iterations: 40, ..SomConfig::default() }).unwrap();
    let p = dir.path().join("m.model.json");
    m.write(&p).unwrap();
    let back = SomModel::read(&p).unwrap();
    assert_eq!(back, m);
    let p2 = dir.path().join("again.model.json");
    back.write(&p2).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());

    let enc = EncodingsFile::new(&m, m.encode_all(&f).unwrap());
    let pe = dir.path().join("m.encodings.json");
    enc.write(&pe).unwrap();
    let e2 = EncodingsFile::read(&pe).unwrap();
    assert_eq!(e2, enc);
    assert_eq!(e2.get("s003").unwrap().values, m.encode(&f.rows[3]).unwrap());
}
