mod common;

use blockmorph::geometry::{Point2, PolygonM};
use blockmorph::ingest::{Block, Building};
use blockmorph::metrics::{
    compute_corpus_metrics, compute_metrics, normalize, pearson_matrix, select_set, write_csv, Indicator, MetricRecord, MetricSet,
    MetricsFile, SetName, CSV_HEADER,
};
use blockmorph::synth;
use blockmorph::Error;
use common::*;

fn shoelace(ring: &[Point2]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ring[i].x * ring[(i + 1) % n].y - ring[(i + 1) % n].x * ring[i].y).sum::<f64>().abs() / 2.0
}

fn ring_length(ring: &[Point2]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ((ring[i].x - ring[(i + 1) % n].x).powi(2) + (ring[i].y - ring[(i + 1) % n].y).powi(2)).sqrt()).sum()
}

fn rings(p: &PolygonM) -> Vec<Vec<Point2>> {
    std::iter::once(p.outer()).chain(p.holes()).map(|r| r.vertices().to_vec()).collect()
}

fn area(p: &PolygonM) -> f64 {
    let rs = rings(p);
    shoelace(&rs[0]) - rs[1..].iter().map(|r| shoelace(r)).sum::<f64>()
}

fn centroid(p: &PolygonM) -> Point2 {
    // area-weighted triangle fan, holes subtracted
    let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
    for (k, r) in rings(p).iter().enumerate() {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let n = r.len();
        let (mut rx, mut ry, mut ra) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (p0, p1) = (r[i], r[(i + 1) % n]);
            let c = p0.x * p1.y - p1.x * p0.y;
            rx += (p0.x + p1.x) * c;
            ry += (p0.y + p1.y) * c;
            ra += c;
        }
        let s = sign * ra.signum();
        cx += s * rx;
        cy += s * ry;
        a += s * ra;
    }
    Point2::new(cx / (3.0 * a), cy / (3.0 * a))
}

/// Straight transcription of the indicator formulas.
fn oracle(b: &Block) -> [f64; 15] {
    let n = b.buildings.len() as f64;
    let h: Vec<f64> = b.buildings.iter().map(|x| x.height).collect();
    let a: Vec<f64> = b.buildings.iter().map(|x| area(&x.footprint)).collect();
    let s: Vec<f64> = b.buildings.iter().map(|x| x.storeys as f64).collect();
    let ab = area(&b.boundary);
    let sum_a: f64 = a.iter().sum();
    let max_h = h.iter().cloned().fold(f64::MIN, f64::max);
    let min_h = h.iter().cloned().fold(f64::MAX, f64::min);
    let ave_h = h.iter().sum::<f64>() / n;
    let sdh = if n > 1.0 { (h.iter().map(|x| (x - ave_h).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    let wah = a.iter().zip(&h).map(|(a, h)| a * h).sum::<f64>() / sum_a;
    let as_ = s.iter().sum::<f64>() / n;
    let floor: f64 = a.iter().zip(&s).map(|(a, s)| a * s).sum();
    let walls: f64 = b
        .buildings
        .iter()
        .zip(&h)
        .map(|(x, h)| rings(&x.footprint).iter().map(|r| ring_length(r)).sum::<f64>() * h)
        .sum();
    let ghwr = if n > 1.0 {
        let cs: Vec<Point2> = b.buildings.iter().map(|x| centroid(&x.footprint)).collect();
        ave_h / (complete_graph_mst(&cs) / (n - 1.0))
    } else {
        0.0
    };
    let outer = &rings(&b.boundary)[0];
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in outer {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    [
        max_h,
        min_h,
        ave_h,
        sdh,
        wah,
        as_,
        sum_a / ab,
        floor / ab,
        (walls + sum_a + (ab - sum_a)) / ab,
        (ab - sum_a) / floor,
        ghwr,
        n,
        ab,
        ab / ((x1 - x0) * (y1 - y0)),
        ab / sweep_obb_area(outer),
    ]
}

fn rotate_block(b: &Block, theta: f64) -> Block {
    let (s, c) = theta.sin_cos();
    let rot = |p: Point2| Point2::new(p.x * c - p.y * s, p.x * s + p.y * c);
    Block {
        id: b.id.clone(),
        boundary: b.boundary.map_points(rot).unwrap(),
        buildings: b
            .buildings
            .iter()
            .map(|x| Building { footprint: x.footprint.map_points(rot).unwrap(), ..x.clone() })
            .collect(),
    }
}

#[test]
fn two_box_fixture() {
    let r = compute_metrics(&two_box_block()).unwrap();
    let expected = [20.0, 10.0, 15.0, 50f64.sqrt(), 15.0, 5.0, 0.02, 0.10, 2.2, 9.8, 15.0 / 50f64.sqrt(), 2.0, 100.0, 1.0, 1.0];
    for (ind, e) in Indicator::ALL.iter().zip(expected) {
        assert!(rel_close(r.value(*ind), e, 1e-9), "{ind}: {} vs {e}", r.value(*ind));
    }
    // the rounded hand values
    assert!((r.sdh - 7.0711).abs() < 5e-5);
    assert!((r.ghwr - 2.1213).abs() < 5e-5);
}

#[test]
fn full_coverage_block() {
    let b = Block {
        id: "full".into(),
        boundary: PolygonM::simple(square(0.0, 0.0, 20.0)).unwrap(),
        buildings: vec![building("b", square(0.0, 0.0, 20.0), 30.0, 10)],
    };
    let r = compute_metrics(&b).unwrap();
    assert_eq!((r.bcr, r.sdh, r.ghwr, r.osr), (1.0, 0.0, 0.0, 0.0));
}

#[test]
fn published_row_is_self_consistent() {
    // published example row; its geometry is not available, only the values
    let (bcr, far, osr, bsf, bss): (f64, f64, f64, f64, f64) = (0.41, 2.67, 0.22, 0.47, 0.89);
    let derived = (1.0 - bcr) / far;
    assert_eq!((derived * 100.0).round() / 100.0, osr);
    assert!(bsf <= bss);
}

#[test]
fn synthetic_blocks_match_the_formula_oracle() {
    let corpus = synth::corpus(120, 21).unwrap();
    let (records, skipped) = compute_corpus_metrics(&corpus);
    assert!(skipped.is_empty());
    assert_eq!(records.len(), corpus.blocks.len());
    for (b, r) in corpus.blocks.iter().zip(&records) {
        assert_eq!(b.id, r.block_id);
        let o = oracle(b);
        for (i, ind) in Indicator::ALL.iter().enumerate() {
            let tol = if *ind == Indicator::Bss { 1e-3 } else { 1e-9 };
            assert!(rel_close(r.value(*ind), o[i], tol) || (r.value(*ind) - o[i]).abs() < 1e-9, "{} {ind}: {} vs {}", b.id, r.value(*ind), o[i]);
        }
        assert!(r.invariant_violations().is_empty(), "{:?}", r.invariant_violations());
    }
}

#[test]
fn identities_hold_for_every_block() {
    let corpus = synth::corpus(300, 4).unwrap();
    let (records, _) = compute_corpus_metrics(&corpus);
    for r in &records {
        assert!(rel_close(r.osr * r.far, 1.0 - r.bcr, 1e-9), "{}", r.block_id);
        assert!(r.min_h <= r.ave_h && r.ave_h <= r.max_h);
        assert!(r.min_h <= r.wah && r.wah <= r.max_h);
        assert!(0.0 < r.bsf && r.bsf <= r.bss && r.bss <= 1.0);
        assert!(r.bcr > 0.0 && r.bcr <= 1.0);
    }
}

#[test]
fn rotation_changes_only_bsf() {
    let corpus = synth::corpus(60, 8).unwrap();
    let mut bsf_changed = 0;
    for b in &corpus.blocks {
        let r0 = compute_metrics(b).unwrap();
        let r1 = compute_metrics(&rotate_block(b, std::f64::consts::FRAC_PI_4)).unwrap();
        for ind in Indicator::ALL {
            if ind == Indicator::Bsf {
                if (r0.bsf - r1.bsf).abs() > 1e-3 {
                    bsf_changed += 1;
                }
                continue;
            }
            assert!(rel_close(r0.value(ind), r1.value(ind), 1e-6) || r0.value(ind).abs() < 1e-12, "{} {ind}", b.id);
        }
    }
    assert!(bsf_changed > corpus.blocks.len() / 2, "{bsf_changed}");

    let square_block = two_box_block();
    let r = compute_metrics(&rotate_block(&square_block, std::f64::consts::FRAC_PI_4)).unwrap();
    assert!(rel_close(r.bsf, 0.5, 1e-9));
    assert!(rel_close(r.bss, 1.0, 1e-9));
}

#[test]
fn pearson_matches_two_pass_oracle() {
    let corpus = synth::corpus(200, 13).unwrap();
    let (records, _) = compute_corpus_metrics(&corpus);
    let m = pearson_matrix(&records).unwrap();
    for a in Indicator::ALL {
        for b in Indicator::ALL {
            let xs: Vec<f64> = records.iter().map(|r| r.value(a)).collect();
            let ys: Vec<f64> = records.iter().map(|r| r.value(b)).collect();
            let o = if a == b { 1.0 } else { pearson(&xs, &ys).clamp(-1.0, 1.0) };
            assert!((m.get(a, b) - o).abs() < 1e-12, "{a} {b}: {} vs {o}", m.get(a, b));
            assert_eq!(m.get(a, b), m.get(b, a));
        }
    }
}

fn record(id: &str, v: f64) -> MetricRecord {
    let two = compute_metrics(&two_box_block()).unwrap();
    MetricRecord { block_id: id.into(), wah: v, bcr: v / 20.0, nob: 1 + v as u32, ba: 100.0 + v, ..two }
}

#[test]
fn pearson_small_cases() {
    let recs: Vec<MetricRecord> = [(1.0, 2.0), (2.0, 1.0), (3.0, 4.0), (4.0, 3.0), (5.0, 6.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let mut r = record(&format!("b{i}"), x);
            r.max_h = 20.0 + x;
            r.min_h = y;
            r.ave_h = 2.0 * x - y;
            r.sdh = x * x;
            r.as_ = x + 0.5 * y;
            r.far = -2.0 * x + 3.0;
            r.car = y * y;
            r.osr = x * y;
            r.ghwr = x.sqrt();
            r.bsf = 1.0 / (1.0 + x);
            r.bss = 1.0 / (1.0 + y);
            r
        })
        .collect();
    let m = pearson_matrix(&recs).unwrap();
    assert!((m.get(Indicator::MaxH, Indicator::MinH) - 10.0 / 148f64.sqrt()).abs() < 1e-12);
    assert!((m.get(Indicator::MaxH, Indicator::Far) + 1.0).abs() < 1e-12);
    assert!(matches!(pearson_matrix(&recs[..2]), Err(Error::TooFewBlocks { .. })));
    let flat: Vec<MetricRecord> = recs.iter().map(|r| MetricRecord { sdh: 1.0, ..r.clone() }).collect();
    match pearson_matrix(&flat) {
        Err(Error::ZeroVariance(v)) => assert_eq!(v, ["SDH"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn normalization() {
    let recs: Vec<MetricRecord> = [0.0, 5.0, 10.0].iter().enumerate().map(|(i, &v)| record(&format!("b{i}"), v)).collect();
    let f = normalize(&recs, &MetricSet::new(SetName::OneBmc)).unwrap();
    assert_eq!(f.dim(), 4);
    let wah: Vec<f64> = f.rows.iter().map(|r| r[0]).collect();
    assert_eq!(wah, [0.0, 0.5, 1.0]);
    assert!(f.rows.iter().flatten().all(|v| (0.0..=1.0).contains(v)));

    let flat: Vec<MetricRecord> = recs.iter().map(|r| MetricRecord { wah: 3.0, ..r.clone() }).collect();
    assert!(matches!(normalize(&flat, &MetricSet::new(SetName::OneBmc)), Err(Error::ConstantIndicator(_))));
    assert!(matches!(normalize(&recs[..1], &MetricSet::new(SetName::OneBmc)), Err(Error::TooFewBlocks { .. })));
}

#[test]
fn set_compositions() {
    use Indicator::*;
    assert_eq!(select_set("OneBMC").unwrap().indicators, [Wah, Bcr, Nob, Ba]);
    assert_eq!(select_set("Spacemate").unwrap().indicators, [As, Bcr, Far, Osr]);
    assert_eq!(select_set("BlockShape").unwrap().indicators, [Far, Ba, Bsf, Bss]);
    assert_eq!(select_set("AllBlockMetric").unwrap().indicators, Indicator::ALL);
    assert!(matches!(select_set("Spacemat"), Err(Error::UnknownSet(_))));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth::corpus(40, 2).unwrap();
    let (records, _) = compute_corpus_metrics(&corpus);
    let pearson = pearson_matrix(&records).ok();
    let file = MetricsFile::new(records.clone(), pearson);
    let path = dir.path().join("metrics.json");
    file.write(&path).unwrap();
    let back = MetricsFile::read(&path).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.record(&records[7].block_id), Some(&records[7]));

    let csv = dir.path().join("metrics.csv");
    write_csv(&records, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), records.len());
}
