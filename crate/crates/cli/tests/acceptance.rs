//! Acceptance suite: one test per shipping criterion, each ending in a
//! single PASS line (assertion messages carry the FAIL side). Statistical
//! criteria run against pinned seeds and tolerances; expected values were
//! frozen from an independent brute-force oracle that lives in this file.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use boxnoise::corrector::kalman::{kalman_update, posterior_batch, KalmanState};
use boxnoise::corrector::{CorrectionConfig, WeightFn};
use boxnoise::geometry::BBox;
use boxnoise::metrics::{evaluate_ap, Boundary};
use boxnoise::noise::{corrupt_box, estimate_noise_level, NoiseModel};
use boxnoise::seeding::stream_rng;
use boxnoise::simulator::{
    run_experiment, synthesize_instances, ScoreLaw, SimConfig, SyntheticConfig,
};
use boxnoise::types::{Instance, Prediction};

fn assert_runtime(criterion: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{criterion} FAIL: runtime {elapsed:?} exceeded {limit:?}"
    );
}

// --- criterion 1: Gaussian noise calibration ---------------------------------

#[test]
fn criterion_01_gaussian_noise_calibrates_to_gamma() {
    let start = Instant::now();
    let clean = BBox::new(0.0, 0.0, 100.0, 100.0).unwrap();
    for gamma in [0.05, 0.1] {
        let model = NoiseModel::Gaussian { gamma };
        let mut rng = stream_rng(11, 1);
        let mut relative = Vec::with_capacity(400_000);
        for _ in 0..100_000 {
            let noisy = corrupt_box(&clean, &model, &mut rng).unwrap().bbox;
            for (a, b) in noisy.corners().iter().zip(clean.corners()) {
                relative.push((a - b) / 100.0);
            }
        }
        let empirical: f64 = estimate_noise_level(&relative).unwrap();
        let rel_err = (empirical - gamma).abs() / gamma;
        assert!(
            rel_err < 0.02,
            "criterion 01 FAIL: gamma {gamma} measured {empirical} ({rel_err:.4} rel off)"
        );
    }
    assert_runtime("criterion 01", start.elapsed(), Duration::from_secs(5));
    println!("criterion 01 PASS: empirical gamma within 2% at 0.05 and 0.1 over 1e5 corruptions");
}

// --- criterion 2: exponential rate and level agree ----------------------------

#[test]
fn criterion_02_exponential_rate_matches_level() {
    let start = Instant::now();
    // Rate lambda and level gamma are tied by gamma = sqrt(2) / lambda;
    // this rate must land exactly on the 0.05 level.
    let lambda = 20.0 * std::f64::consts::SQRT_2;
    let gamma = std::f64::consts::SQRT_2 / lambda;
    let clean = BBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
    let model = NoiseModel::ExpEnclosing { gamma };
    let mut rng = stream_rng(22, 1);
    let mut relative = Vec::with_capacity(1_000_000);
    for _ in 0..250_000 {
        let noisy = corrupt_box(&clean, &model, &mut rng).unwrap().bbox;
        for (a, b) in noisy.corners().iter().zip(clean.corners()) {
            relative.push(a - b);
        }
    }
    let empirical: f64 = estimate_noise_level(&relative).unwrap();
    assert!(
        (empirical - 0.05).abs() <= 0.001,
        "criterion 02 FAIL: 1e6 draws at rate 20*sqrt(2) measured {empirical}, want 0.05 +/- 0.001"
    );
    assert_runtime("criterion 02", start.elapsed(), Duration::from_secs(5));
    println!("criterion 02 PASS: 1e6 exponential draws at rate 20*sqrt(2) measure {empirical:.5}");
}

// --- criterion 3: measurement order does not matter ---------------------------

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

fn random_psd(rng: &mut ChaCha8Rng, scale: f64) -> Matrix4<f64> {
    let a = Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0) * scale);
    a * a.transpose() + Matrix4::identity() * (0.5 * scale * scale)
}

#[test]
fn criterion_03_update_order_is_irrelevant() {
    let start = Instant::now();
    let perms = permutations(5);
    assert_eq!(perms.len(), 120);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let prior_mean = Vector4::from_fn(|_, _| rng.gen_range(-50.0..50.0));
        let prior_cov = random_psd(&mut rng, 2.0);
        let prior = KalmanState::new(prior_mean, prior_cov).unwrap();
        let measurements: Vec<(Vector4<f64>, Matrix4<f64>)> = (0..5)
            .map(|_| {
                let z = prior_mean + Vector4::from_fn(|_, _| rng.gen_range(-5.0..5.0));
                let scale = rng.gen_range(0.5..2.0);
                (z, random_psd(&mut rng, scale))
            })
            .collect();
        let batch = posterior_batch(prior.mean(), prior.cov(), &measurements).unwrap();
        for perm in &perms {
            let mut state = prior.clone();
            for &i in perm {
                state = kalman_update(&state, &measurements[i].0, &measurements[i].1).unwrap();
            }
            let mean_diff = (state.mean() - batch.mean()).abs().max();
            let cov_diff = (state.cov() - batch.cov()).abs().max();
            worst = worst.max(mean_diff).max(cov_diff);
            assert!(
                mean_diff <= 1e-9 && cov_diff <= 1e-9,
                "criterion 03 FAIL: permutation {perm:?} deviates from batch by \
                 mean {mean_diff:.3e}, cov {cov_diff:.3e}"
            );
        }
    }
    assert_runtime("criterion 03", start.elapsed(), Duration::from_secs(10));
    println!(
        "criterion 03 PASS: 100 cases x 120 permutations agree with the batch posterior \
         (worst deviation {worst:.3e})"
    );
}

// --- criterion 4: matrix posterior reduces to the per-boundary formula --------

#[test]
fn criterion_04_diagonal_trust_reduces_to_weighted_average() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let ann = Vector4::from_fn(|_, _| rng.gen_range(-100.0..100.0));
        let prior_cov =
            Matrix4::from_diagonal(&Vector4::from_fn(|_, _| rng.gen_range(0.1..10.0)));
        let n = rng.gen_range(1..=8);
        let mut deltas = Vec::with_capacity(n);
        let mut measurements = Vec::with_capacity(n);
        for _ in 0..n {
            let delta: f64 = rng.gen_range(0.01..5.0);
            let z = ann + Vector4::from_fn(|_, _| rng.gen_range(-20.0..20.0));
            // Trust delta means measurement covariance prior_cov / delta.
            measurements.push((z, prior_cov / delta));
            deltas.push(delta);
        }
        let posterior = posterior_batch(&ann, &prior_cov, &measurements).unwrap();
        for k in 0..4 {
            let mut num = ann[k];
            let mut den = 1.0;
            for (delta, (z, _)) in deltas.iter().zip(&measurements) {
                num += delta * z[k];
                den += delta;
            }
            let want = num / den;
            let diff = (posterior.mean()[k] - want).abs();
            worst = worst.max(diff);
            assert!(
                diff <= 1e-9,
                "criterion 04 FAIL: boundary {k} posterior {} differs from weighted \
                 average {want} by {diff:.3e}",
                posterior.mean()[k]
            );
        }
    }
    assert_runtime("criterion 04", start.elapsed(), Duration::from_secs(5));
    println!(
        "criterion 04 PASS: 1000 diagonal-trust cases match the per-boundary weighted \
         average (worst {worst:.3e})"
    );
}

// --- criteria 5 and 6: the correction experiment ------------------------------

/// Expected mean-IoU margin of the frozen criterion-5 experiment, computed
/// by [`oracle_margin`] (50_000 single-object scenes, seed 0xACCE5) and
/// pinned here. The library run must land within 0.005 of it.
const EXPECTED_MARGIN: f64 = 0.225174;

/// Box-Muller transform; deliberately not the library's sampler.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0.0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0.0);
    let inter = iw * ih;
    let union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

fn repair(mut c: [f64; 4]) -> [f64; 4] {
    if c[0] > c[2] {
        let m = 0.5 * (c[0] + c[2]);
        (c[0], c[2]) = (m - 0.5, m + 0.5);
    }
    if c[1] > c[3] {
        let m = 0.5 * (c[1] + c[3]);
        (c[1], c[3]) = (m - 0.5, m + 0.5);
    }
    c
}

/// Straight-line reimplementation of the criterion-5 experiment: corrupt a
/// box, fabricate 20 scored predictions, fuse with a step gate, measure the
/// IoU gain. Shares no sampling or fusion code with the library.
fn oracle_margin(reps: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE5);
    let (gamma_ann, gamma_pred, n_preds) = (0.1, 0.05, 20);
    let (tau, iou_floor, score_floor, score_sd) = (0.5, 0.5, 0.05, 0.05);
    let mut total = 0.0;
    for _ in 0..reps {
        let w = 40.0 + 120.0 * rng.gen::<f64>();
        let h = 40.0 + 120.0 * rng.gen::<f64>();
        let clean = [0.0, 0.0, w, h];
        let ann = repair([
            gamma_ann * w * normal(&mut rng),
            gamma_ann * h * normal(&mut rng),
            w + gamma_ann * w * normal(&mut rng),
            h + gamma_ann * h * normal(&mut rng),
        ]);
        let mut fused = ann;
        let mut mass = 1.0;
        for _ in 0..n_preds {
            let pred = repair([
                gamma_pred * w * normal(&mut rng),
                gamma_pred * h * normal(&mut rng),
                w + gamma_pred * w * normal(&mut rng),
                h + gamma_pred * h * normal(&mut rng),
            ]);
            let score = (iou(pred, clean) + score_sd * normal(&mut rng)).clamp(0.0, 1.0);
            let overlap = iou(pred, ann);
            if overlap < iou_floor || score < score_floor || overlap < tau {
                continue;
            }
            for k in 0..4 {
                fused[k] += score * pred[k];
            }
            mass += score;
        }
        let corrected = repair([
            fused[0] / mass,
            fused[1] / mass,
            fused[2] / mass,
            fused[3] / mass,
        ]);
        total += iou(corrected, clean) - iou(ann, clean);
    }
    total / reps as f64
}

fn criterion_5_experiment() -> boxnoise::simulator::ExperimentReport<f64> {
    let clean = synthesize_instances(
        &SyntheticConfig {
            count: 1000,
            instances_per_image: 1,
            image_width: 640.0,
            image_height: 480.0,
            min_extent: 40.0,
            max_extent: 160.0,
            category_id: 1,
        },
        555,
    )
    .unwrap();
    run_experiment(
        &clean,
        &NoiseModel::Gaussian { gamma: 0.1 },
        &SimConfig {
            n_predictions: 20,
            pred_noise: NoiseModel::Gaussian { gamma: 0.05 },
            score_law: ScoreLaw::IouProportional { noise_sd: 0.05 },
            seed: 99,
        },
        &CorrectionConfig {
            weight: WeightFn::Step { tau: 0.5 },
            ..CorrectionConfig::default()
        },
        4242,
    )
    .unwrap()
}

#[test]
fn criterion_05_correction_recovers_iou() {
    let start = Instant::now();
    let oracle = oracle_margin(50_000);
    assert!(
        (oracle - EXPECTED_MARGIN).abs() < 1e-3,
        "criterion 05 FAIL: oracle drifted from its pinned value: {oracle} vs {EXPECTED_MARGIN}"
    );
    let report = criterion_5_experiment();
    let margin = report.mean_iou_corrected - report.mean_iou_noisy;
    assert!(
        margin >= 0.02,
        "criterion 05 FAIL: margin {margin:.4} below 0.02 \
         (noisy {:.4}, corrected {:.4})",
        report.mean_iou_noisy,
        report.mean_iou_corrected
    );
    assert!(
        (margin - EXPECTED_MARGIN).abs() <= 0.005,
        "criterion 05 FAIL: margin {margin:.6} not within 0.005 of the oracle's \
         {EXPECTED_MARGIN}"
    );
    assert_runtime("criterion 05", start.elapsed(), Duration::from_secs(30));
    println!(
        "criterion 05 PASS: mean IoU {:.4} -> {:.4}, margin {margin:.4} \
         (oracle expectation {EXPECTED_MARGIN})",
        report.mean_iou_noisy, report.mean_iou_corrected
    );
}

#[test]
fn criterion_06_correction_shrinks_error_spread() {
    let report = criterion_5_experiment();
    for boundary in [
        Boundary::Left,
        Boundary::Right,
        Boundary::Top,
        Boundary::Bottom,
    ] {
        let noisy = report.noisy_errors.get(boundary).std;
        let corrected = report.corrected_errors.get(boundary).std;
        assert!(
            corrected < noisy,
            "criterion 06 FAIL: {} error spread grew: {corrected:.5} vs noisy {noisy:.5}",
            boundary.name()
        );
    }
    println!(
        "criterion 06 PASS: corrected relative-error spread below noisy on all four \
         boundaries (left {:.4} -> {:.4})",
        report.noisy_errors.get(Boundary::Left).std,
        report.corrected_errors.get(Boundary::Left).std
    );
}

// --- criterion 7: every gate design beats score-only weighting ----------------

#[test]
fn criterion_07_score_only_weighting_fails() {
    let clean = synthesize_instances(
        &SyntheticConfig {
            count: 800,
            instances_per_image: 4,
            image_width: 640.0,
            image_height: 480.0,
            min_extent: 40.0,
            max_extent: 160.0,
            category_id: 1,
        },
        808,
    )
    .unwrap();
    let ann_noise = NoiseModel::Gaussian { gamma: 0.1 };
    // A deliberately poor teacher: systematically oversized predictions.
    let teacher = SimConfig {
        n_predictions: 24,
        pred_noise: NoiseModel::ExpEnclosing { gamma: 0.25 },
        score_law: ScoreLaw::IouProportional { noise_sd: 0.08 },
        seed: 777,
    };

    let gated: [(&str, WeightFn<f64>); 6] = [
        ("step 0.5", WeightFn::Step { tau: 0.5 }),
        ("step 0.6", WeightFn::Step { tau: 0.6 }),
        ("step 0.7", WeightFn::Step { tau: 0.7 }),
        ("gauss 0.2", WeightFn::Gaussian { alpha: 0.2 }),
        ("gauss 0.1", WeightFn::Gaussian { alpha: 0.1 }),
        ("gauss 0.05", WeightFn::Gaussian { alpha: 0.05 }),
    ];
    let ungated = CorrectionConfig {
        weight: WeightFn::Step { tau: 0.0 },
        iou_floor: 0.0,
        ..CorrectionConfig::default()
    };
    let ungated_iou = run_experiment(&clean, &ann_noise, &teacher, &ungated, 2024)
        .unwrap()
        .mean_iou_corrected;

    let mut results = Vec::new();
    for (name, weight) in gated {
        let cfg = CorrectionConfig {
            weight,
            ..CorrectionConfig::default()
        };
        let report = run_experiment(&clean, &ann_noise, &teacher, &cfg, 2024).unwrap();
        assert!(
            report.mean_iou_corrected > ungated_iou + 0.5,
            "criterion 07 FAIL: {name} at {:.4} does not clearly beat score-only \
             weighting at {ungated_iou:.4}",
            report.mean_iou_corrected
        );
        results.push(format!("{name} {:.3}", report.mean_iou_corrected));
    }
    println!(
        "criterion 07 PASS: all six gate designs ran and beat score-only weighting \
         ({}; score-only {ungated_iou:.3})",
        results.join(", ")
    );
}

// --- criterion 8: AP evaluator ------------------------------------------------

fn gt(id: u64, image: u64, corners: [f64; 4]) -> Instance<f64> {
    Instance {
        id,
        image_id: image,
        category_id: 1,
        bbox: BBox::new(corners[0], corners[1], corners[2], corners[3]).unwrap(),
        iscrowd: false,
    }
}

fn det(image: u64, corners: [f64; 4], score: f64) -> Prediction<f64> {
    Prediction {
        image_id: image,
        category_id: 1,
        bbox: BBox::new(corners[0], corners[1], corners[2], corners[3]).unwrap(),
        score,
    }
}

#[test]
fn criterion_08_ap_evaluator_is_exact_and_lawful() {
    let start = Instant::now();

    // Perfect predictions: AP exactly 1.
    let gts = vec![gt(1, 1, [0.0, 0.0, 50.0, 50.0]), gt(2, 2, [10.0, 10.0, 90.0, 60.0])];
    let preds: Vec<Prediction<f64>> = gts
        .iter()
        .map(|g| det(g.image_id, g.bbox.corners(), 0.9))
        .collect();
    let thresholds: Vec<f64> = boxnoise::metrics::coco_thresholds();
    let perfect = evaluate_ap(&preds, &gts, &thresholds).unwrap();
    assert!(
        perfect.map == 1.0,
        "criterion 08 FAIL: perfect predictions scored {}",
        perfect.map
    );

    // No predictions: AP exactly 0.
    let empty = evaluate_ap(&[], &gts, &thresholds).unwrap();
    assert!(
        empty.map == 0.0,
        "criterion 08 FAIL: no predictions scored {}",
        empty.map
    );

    // Ranked false positive before a true positive over two ground truths:
    // precision at the only scored recall point is 1/2, held for the 51
    // interpolation points up to recall 0.5, so AP = 51 * 0.5 / 101.
    let two = vec![
        gt(1, 1, [0.0, 0.0, 100.0, 100.0]),
        gt(2, 1, [200.0, 0.0, 300.0, 100.0]),
    ];
    let mixed_preds = vec![
        det(1, [400.0, 400.0, 440.0, 440.0], 0.9),
        det(1, [0.0, 0.0, 100.0, 100.0], 0.8),
    ];
    let mixed = evaluate_ap(&mixed_preds, &two, &[0.5]).unwrap();
    let want = 51.0 * 0.5 / 101.0;
    assert!(
        (mixed.map - want).abs() < 1e-12,
        "criterion 08 FAIL: mixed case scored {} instead of {want}",
        mixed.map
    );

    // Laws over random scenes: AP never rises with the IoU threshold, and
    // any strictly increasing score rescaling leaves it bit-identical.
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..100 {
        let n = rng.gen_range(1..6);
        let gts: Vec<Instance<f64>> = (0..n)
            .map(|i| {
                let l = rng.gen_range(0.0..300.0);
                let t = rng.gen_range(0.0..300.0);
                let w = rng.gen_range(20.0..120.0);
                let h = rng.gen_range(20.0..120.0);
                gt(i + 1, 1, [l, t, l + w, t + h])
            })
            .collect();
        let preds: Vec<Prediction<f64>> = gts
            .iter()
            .flat_map(|g| {
                let copies = rng.gen_range(0..4);
                let mut v = Vec::new();
                for _ in 0..copies {
                    let [l, t, r, b] = g.bbox.corners();
                    let j = |rng: &mut ChaCha8Rng| rng.gen_range(-30.0..30.0);
                    let (dl, dt, dr, db) = (j(&mut rng), j(&mut rng), j(&mut rng), j(&mut rng));
                    let corners = [
                        l + dl,
                        t + dt,
                        (r + dr).max(l + dl + 1.0),
                        (b + db).max(t + dt + 1.0),
                    ];
                    v.push(det(1, corners, rng.gen_range(0.0..1.0)));
                }
                v
            })
            .collect();

        let graded = evaluate_ap(&preds, &gts, &[0.3, 0.5, 0.7, 0.9]).unwrap();
        for pair in graded.per_threshold.windows(2) {
            assert!(
                pair[0].ap >= pair[1].ap,
                "criterion 08 FAIL: AP rose with threshold: {:?}",
                graded.per_threshold
            );
        }

        let rescaled: Vec<Prediction<f64>> = preds
            .iter()
            .map(|p| Prediction {
                score: 0.25 * p.score + 0.5 * p.score * p.score,
                ..p.clone()
            })
            .collect();
        let a = evaluate_ap(&preds, &gts, &[0.5, 0.75]).unwrap();
        let b = evaluate_ap(&rescaled, &gts, &[0.5, 0.75]).unwrap();
        assert!(
            a.map == b.map,
            "criterion 08 FAIL: monotone score rescaling moved AP {} -> {}",
            a.map,
            b.map
        );
    }

    assert_runtime("criterion 08", start.elapsed(), Duration::from_secs(10));
    println!(
        "criterion 08 PASS: exact AP on hand cases and both ranking laws over 100 \
         random scenes"
    );
}

// --- criterion 9: one-sided noise keeps its promised side ----------------------

#[test]
fn criterion_09_one_sided_noise_nests_boxes() {
    let clean = BBox::new(50.0, 40.0, 150.0, 140.0).unwrap();
    let mut rng = stream_rng(99, 1);
    let enclosing = NoiseModel::ExpEnclosing { gamma: 0.3 };
    for _ in 0..10_000 {
        let noisy = corrupt_box(&clean, &enclosing, &mut rng).unwrap();
        assert!(
            !noisy.clamped && noisy.bbox.contains(&clean),
            "criterion 09 FAIL: outward draw {:?} does not contain the clean box",
            noisy.bbox
        );
    }

    let enclosed = NoiseModel::ExpEnclosed { gamma: 0.3 };
    let mut clamped = 0usize;
    for _ in 0..10_000 {
        let noisy = corrupt_box(&clean, &enclosed, &mut rng).unwrap();
        if noisy.clamped {
            clamped += 1;
            continue;
        }
        assert!(
            clean.contains(&noisy.bbox),
            "criterion 09 FAIL: inward draw {:?} escapes the clean box",
            noisy.bbox
        );
    }
    assert!(
        clamped < 2_000,
        "criterion 09 FAIL: inward noise degenerated {clamped} times out of 10000"
    );
    println!(
        "criterion 09 PASS: 1e4 outward draws all contain the box, 1e4 inward draws \
         stay inside it ({clamped} repaired degenerate draws)"
    );
}

// --- criterion 10: reruns are byte-identical -----------------------------------

fn cli(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_boxnoise"))
        .args(args)
        .output()
        .expect("spawn boxnoise");
    assert!(
        out.status.success(),
        "criterion 10 FAIL: {args:?} exited {:?}:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_pipeline(dir: &Path) -> Vec<Vec<u8>> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let sim_cfg = dir.join("sim.json");
    std::fs::write(
        &sim_cfg,
        r#"{
  "seed": 42,
  "instances": {"synthetic": {
    "count": 120, "instances_per_image": 3,
    "image_width": 640.0, "image_height": 480.0,
    "min_extent": 40.0, "max_extent": 160.0
  }},
  "annotation_noise": {"kind": "gaussian", "gamma": 0.1},
  "teacher": {
    "n_predictions": 16,
    "pred_noise": {"kind": "gaussian", "gamma": 0.05},
    "score_law": {"kind": "iou-proportional", "noise_sd": 0.05},
    "seed": 7
  },
  "correction": {"weight": {"kind": "step", "tau": 0.5}}
}"#,
    )
    .unwrap();

    let mut stdouts = Vec::new();
    let mut push = |out: Output| stdouts.push(out.stdout);
    push(cli(&[
        "simulate", "--config", sim_cfg.to_str().unwrap(), "--out", &p("sim_report.json"),
        "--data-out", &p("clean.json"), "--preds-out", &p("teacher.json"),
    ]));
    push(cli(&[
        "corrupt", "--ann", &p("clean.json"), "--model", "gaussian", "--gamma", "0.1",
        "--seed", "42", "--out", &p("noisy.json"), "--report", &p("corrupt_report.json"),
    ]));
    push(cli(&[
        "correct", "--ann", &p("noisy.json"), "--preds", &p("teacher.json"), "--weight",
        "step:0.5", "--out", &p("fixed.json"), "--report", &p("correct_report.json"),
    ]));
    push(cli(&[
        "analyze", "--ref", &p("clean.json"), "--cand", &p("noisy.json"), "--out",
        &p("analyze_noisy.json"), "--csv", &p("points.csv"),
    ]));
    push(cli(&[
        "analyze", "--ref", &p("clean.json"), "--cand", &p("fixed.json"), "--out",
        &p("analyze_fixed.json"),
    ]));
    push(cli(&[
        "eval-ap", "--gt", &p("clean.json"), "--preds", &p("teacher.json"), "--out",
        &p("ap.json"),
    ]));

    let files = [
        "sim_report.json",
        "clean.json",
        "teacher.json",
        "noisy.json",
        "corrupt_report.json",
        "fixed.json",
        "correct_report.json",
        "analyze_noisy.json",
        "analyze_fixed.json",
        "points.csv",
        "ap.json",
    ];
    let mut artifacts = stdouts;
    for f in files {
        artifacts.push(std::fs::read(dir.join(f)).unwrap());
    }
    artifacts
}

#[test]
fn criterion_10_pipeline_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_pipeline(dir.path());
    let second = run_pipeline(dir.path());
    assert_eq!(first.len(), second.len());
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        assert!(
            a == b,
            "criterion 10 FAIL: artifact {i} differs between identical-seed reruns"
        );
    }
    assert!(!first.iter().all(|a| a.is_empty()));
    println!(
        "criterion 10 PASS: {} pipeline artifacts (6 stdouts, 11 files) byte-identical \
         across reruns",
        first.len()
    );
}
