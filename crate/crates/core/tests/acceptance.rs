//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use freqaug::augment::{self, AugmentParams};
use freqaug::fourier;
use freqaug::metrics::{self, BoundaryPointSet};
use freqaug::oracle;
use freqaug::synthetic;
use freqaug::types::{Amplitude, ImageTensor, SegmentationMask, Shape, StructureLabel, ThresholdVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DFT_ABS_TOL: f64 = 1e-9;
const PARSEVAL_REL_TOL: f64 = 1e-9;
const FOURIER_BUDGET: Duration = Duration::from_secs(60);
const IDENTITY_TOL: f64 = 1e-6;
const AUGMENT_TRIALS: usize = 100;
const ST_SAMPLES: usize = 10_000;
const ALPHAS: [f64; 6] = [0.0, 0.001, 0.01, 0.05, 0.1, 0.5];
const RESIDUAL_REL_TOL: f64 = 1e-6;
const MASK_PAIRS: usize = 10_000;
const ASD_TOL: f64 = 1e-12;
const PIPELINE_BUDGET: Duration = Duration::from_secs(30);
const PAIR_BUDGET: Duration = Duration::from_millis(100);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn random_image(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> ImageTensor {
    ImageTensor::from_fn(Shape::new(c, h, w).unwrap(), |_, _, _| rng.gen()).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

/// 1. Fast transforms vs direct sums, round trip, Parseval, time budget.
fn fourier_oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_small = 0.0f64;
    for h in 1..=9 {
        for w in 1..=9 {
            let x = random_image(&mut rng, 1, h, w);
            let fast = fourier::dft2(&x);
            worst_small = worst_small.max(max_diff(fast.data(), &oracle::direct_dft2(&x)));
            let back = fourier::idft2(&fast).unwrap();
            let slow_back = oracle::direct_idft2(&fast);
            for (a, b) in back.image.data().iter().zip(&slow_back) {
                worst_small = worst_small.max((a - b.re).abs());
            }
        }
    }
    ensure(worst_small <= DFT_ABS_TOL, format!("small sizes: max error {worst_small:e}"))?;

    let (c, h, w) = (3, 256, 256);
    let x = random_image(&mut rng, c, h, w);
    let fast = fourier::dft2(&x);
    let real: Vec<Complex64> = x.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let slow = oracle::separable_direct_dft2(&real, c, h, w, false);
    let mut worst_large = max_diff(fast.data(), &slow);
    // Spot check against the unfactored double sum.
    for _ in 0..32 {
        let (ch, u, v) = (rng.gen_range(0..c), rng.gen_range(0..h), rng.gen_range(0..w));
        let exact = oracle::direct_dft2_entry(&x, ch, u, v);
        worst_large = worst_large.max((fast.get(ch, u, v) - exact).norm());
    }
    let back = fourier::idft2(&fast).unwrap();
    let slow_back = oracle::separable_direct_dft2(fast.data(), c, h, w, true);
    for (a, b) in back.image.data().iter().zip(&slow_back) {
        worst_large = worst_large.max((a - b.re).abs());
    }
    ensure(worst_large <= DFT_ABS_TOL, format!("3x256x256: max error {worst_large:e}"))?;

    let round_trip = back
        .image
        .data()
        .iter()
        .zip(x.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(round_trip <= DFT_ABS_TOL, format!("round trip error {round_trip:e}"))?;

    let plane = h * w;
    let mut parseval = 0.0f64;
    for ch in 0..c {
        let spatial: f64 = x.channel(ch).iter().map(|v| v * v).sum();
        let freq: f64 = fast.data()[ch * plane..(ch + 1) * plane]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            / plane as f64;
        parseval = parseval.max((spatial - freq).abs() / spatial);
    }
    ensure(parseval <= PARSEVAL_REL_TOL, format!("Parseval relative error {parseval:e}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < FOURIER_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!(
        "small {worst_small:.1e}, 256x256 {worst_large:.1e}, round trip {round_trip:.1e}, Parseval {parseval:.1e}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

/// 2. lambda = 0 identity, lambda = 1 amplitude swap, alpha = 0 equivalence.
fn augmentation_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..AUGMENT_TRIALS {
        let s = random_image(&mut rng, 3, 32, 32);
        let t = random_image(&mut rng, 3, 32, 32);

        let zero = AugmentParams {
            lambda: 0.0,
            ..AugmentParams::fdg(1.0).unwrap()
        };
        let out = augment::fdg_augment(&s, &t, &zero).unwrap();
        let err = out.data().iter().zip(s.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        failures += usize::from(err > IDENTITY_TOL);

        let swap = augment::augment_traced(&s, &t, &AugmentParams::fdg_st(1.0, 0.0).unwrap()).unwrap();
        let src = fourier::decompose(&fourier::dft2(&s));
        let tgt = fourier::decompose(&fourier::dft2(&t));
        failures += usize::from(swap.mixed_amplitude != tgt.amplitude);
        let expected = fourier::idft2(&fourier::recompose_parts(&tgt.amplitude, &src.phase).unwrap()).unwrap();
        let err = swap
            .reconstruction
            .image
            .data()
            .iter()
            .zip(expected.image.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        failures += usize::from(err > IDENTITY_TOL);

        let lambda = rng.gen_range(0.01..=1.0);
        let plain = augment::augment_traced(&s, &t, &AugmentParams::fdg(lambda).unwrap()).unwrap();
        let st = augment::augment_traced(&s, &t, &AugmentParams::fdg_st(lambda, 0.0).unwrap()).unwrap();
        failures += usize::from(plain.mixed_amplitude != st.mixed_amplitude);
    }
    ensure(failures == 0, format!("{failures} failures"))?;
    Ok(format!("{AUGMENT_TRIALS} trials, 0 failures, lambda=0 max error {worst:.1e}"))
}

/// One soft-threshold sample; `slack` bounds the rounding of the two
/// subtractions when inputs are not exactly representable differences.
fn st_sample_ok(a: f64, b: f64, t: f64, slack: f64) -> bool {
    let amp = Amplitude::new(Shape::new(1, 1, 2).unwrap(), vec![a, b]).unwrap();
    let out = augment::soft_threshold(&amp, &ThresholdVector::new(vec![t]).unwrap()).unwrap();
    let (sa, sb) = (out.data()[0], out.data()[1]);
    let shrink = 0.0 <= sa && sa <= a && 0.0 <= sb && sb <= b;
    let lipschitz = (sa - sb).abs() <= (a - b).abs() + slack;
    let monotone = if a <= b { sa <= sb } else { sb <= sa };
    shrink && lipschitz && monotone
}

/// 3. Shrinkage, 1-Lipschitz and monotonicity of the soft threshold.
fn soft_threshold_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut violations = 0usize;
    // Multiples of 2^-20 below 2^20: every difference is exact, so no slack.
    let dyadic = |rng: &mut ChaCha8Rng| rng.gen_range(0u64..1 << 40) as f64 / (1u64 << 20) as f64;
    for _ in 0..ST_SAMPLES {
        let (a, b) = (dyadic(&mut rng), dyadic(&mut rng));
        let t = if rng.gen_bool(0.1) { 0.0 } else { dyadic(&mut rng) };
        violations += usize::from(!st_sample_ok(a, b, t, 0.0));
    }
    for _ in 0..ST_SAMPLES {
        let scale = 10f64.powf(rng.gen_range(-3.0..4.0));
        let a = rng.gen_range(0.0..scale);
        let b = rng.gen_range(0.0..scale);
        let t = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..scale) };
        let slack = 2.0 * f64::EPSILON * a.max(b);
        violations += usize::from(!st_sample_ok(a, b, t, slack));
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    Ok(format!("{} samples (half exact-dyadic), 0 violations", 2 * ST_SAMPLES))
}

/// 4. Per-channel mean non-increasing in alpha at lambda = 1.
fn dc_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut pairs = Vec::new();
    for _ in 0..20 {
        pairs.push((random_image(&mut rng, 3, 32, 32), random_image(&mut rng, 3, 32, 32)));
    }
    for i in 0..5 {
        let s = synthetic::generate(&mut rng, 64, 64, &synthetic::domain_style(1 + i % 4)).unwrap();
        let t = synthetic::generate(&mut rng, 64, 64, &synthetic::domain_style(2 + i % 3)).unwrap();
        pairs.push((s.image, t.image));
    }
    let mut violations = 0usize;
    for (s, t) in &pairs {
        let means: Vec<Vec<f64>> = ALPHAS
            .iter()
            .map(|&alpha| {
                augment::fdg_st_augment(s, t, &AugmentParams::fdg_st(1.0, alpha).unwrap())
                    .unwrap()
                    .channel_means()
            })
            .collect();
        for w in means.windows(2) {
            violations += w[0].iter().zip(&w[1]).filter(|(a, b)| b > a).count();
        }
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    Ok(format!("{} pairs x {} alphas, 0 violations", pairs.len(), ALPHAS.len()))
}

/// 5. Imaginary residual of the inverse in both augmentation paths.
fn output_reality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (h, w) = if i % 2 == 0 { (32, 32) } else { (rng.gen_range(1..40), rng.gen_range(1..40)) };
        let s = random_image(&mut rng, 3, h, w);
        let t = random_image(&mut rng, 3, h, w);
        let lambda = rng.gen_range(0.01..=1.0);
        for params in [AugmentParams::fdg(lambda).unwrap(), AugmentParams::fdg_st(lambda, 0.05).unwrap()] {
            let trace = augment::augment_traced(&s, &t, &params).unwrap();
            worst = worst.max(trace.reconstruction.relative_residual());
        }
    }
    ensure(worst <= RESIDUAL_REL_TOL, format!("relative residual {worst:e}"))?;
    Ok(format!("100 pairs, max relative residual {worst:.1e}"))
}

/// 6. Metrics vs exhaustive scans plus hand-computed cases.
fn metric_oracle_suite() -> Outcome {
    let cup = StructureLabel::OpticCup;
    let a = BoundaryPointSet::new(vec![(0, 0)]).unwrap();
    let b = BoundaryPointSet::new(vec![(3, 4)]).unwrap();
    let hd = metrics::hausdorff(&a, &b).unwrap();
    ensure(hd == 5.0, format!("3-4-5 Hausdorff gave {hd}"))?;
    let block = |dc: usize| SegmentationMask::from_fn(4, 4, cup, |r, c| r < 2 && c >= dc && c < dc + 2).unwrap();
    let dsc = metrics::dice(&block(0), &block(1)).unwrap();
    ensure(dsc == 0.5, format!("shifted-block DSC gave {dsc}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut mismatches = 0usize;
    for _ in 0..MASK_PAIRS {
        let (h, w) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let mut build = || {
            let n = rng.gen_range(1..=6);
            let pts: Vec<(usize, usize)> = (0..n).map(|_| (rng.gen_range(0..h), rng.gen_range(0..w))).collect();
            SegmentationMask::from_fn(h, w, cup, |r, c| pts.contains(&(r, c))).unwrap()
        };
        let (y, yh) = (build(), build());
        let (by, byh) = (metrics::extract_boundary(&y).unwrap(), metrics::extract_boundary(&yh).unwrap());
        let (oy, oyh) = (oracle::boundary_points(&y), oracle::boundary_points(&yh));
        let ok = by.points() == oy.as_slice()
            && byh.points() == oyh.as_slice()
            && metrics::hausdorff(&by, &byh).unwrap() == oracle::hausdorff(&oy, &oyh)
            && (metrics::average_surface_distance(&by, &byh).unwrap() - oracle::average_surface_distance(&oy, &oyh)).abs()
                <= ASD_TOL
            && metrics::dice(&y, &yh).unwrap() == oracle::dice(&y, &yh);
        mismatches += usize::from(!ok);
    }
    ensure(mismatches == 0, format!("{mismatches} mismatches"))?;
    Ok(format!("{MASK_PAIRS} pairs, 0 mismatches; HD=5.0, DSC=0.5"))
}

fn snapshot(dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            snapshot(&path, out);
        } else {
            out.insert(path.display().to_string(), fs::read(&path).unwrap());
        }
    }
}

/// 7. Two identical `augment` runs give identical bytes; `splits` lists 4 folds.
fn pipeline_determinism() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().join("data");
    synthetic::write_dataset(&root, 4, 8, (96, 96), 707).unwrap();
    let out = tmp.path().join("out");
    let bin = env!("CARGO_BIN_EXE_freqaug");

    let run = || -> Result<BTreeMap<String, Vec<u8>>, String> {
        let _ = fs::remove_dir_all(&out);
        let status = Command::new(bin)
            .args(["augment", "--root"])
            .arg(&root)
            .args(["--source-domains", "1,2,3", "--target-domains", "1,2,3", "--lambda", "uniform", "--seed", "17", "--out"])
            .arg(&out)
            .env_remove(freqaug::cli::OUT_ENV)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("augment failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        let mut files = BTreeMap::new();
        snapshot(&out, &mut files);
        Ok(files)
    };
    let first = run()?;
    let second = run()?;
    ensure(first.len() == 24 + 1, format!("expected 25 files, got {}", first.len()))?;
    ensure(first == second, "runs differ".into())?;
    let manifest = String::from_utf8(first[&out.join("manifest.csv").display().to_string()].clone()).unwrap();
    ensure(manifest.lines().count() == 25, format!("manifest has {} lines", manifest.lines().count()))?;

    let splits = Command::new(bin).args(["splits", "--root"]).arg(&root).output().unwrap();
    let text = String::from_utf8_lossy(&splits.stdout);
    ensure(splits.status.success(), "splits failed".into())?;
    ensure(text.lines().count() == 4, format!("splits printed {} lines", text.lines().count()))?;
    for k in 1..=4 {
        ensure(
            text.lines().filter(|l| l.contains(&format!("test=domain{k} "))).count() == 1,
            format!("domain{k} not held out exactly once"),
        )?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < PIPELINE_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("24 outputs + manifest identical, 4 splits, {:.1}s", elapsed.as_secs_f64()))
}

/// 8. One 3x256x256 pair through the full augmentation in under 100 ms.
fn performance_budget() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let s = random_image(&mut rng, 3, 256, 256);
    let t = random_image(&mut rng, 3, 256, 256);
    let params = AugmentParams::fdg_st(0.7, 0.05).unwrap();
    augment::fdg_st_augment(&s, &t, &params).unwrap();
    let mut times: Vec<Duration> = (0..5)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(augment::fdg_st_augment(&s, &t, &params).unwrap());
            start.elapsed()
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    ensure(median < PAIR_BUDGET, format!("median {median:?}"))?;
    Ok(format!("median {:.1} ms over 5 runs", median.as_secs_f64() * 1e3))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 Fourier oracle suite", fourier_oracle_suite),
        ("AC2 augmentation identities", augmentation_identities),
        ("AC3 soft-threshold properties", soft_threshold_properties),
        ("AC4 DC monotonicity in alpha", dc_monotonicity),
        ("AC5 reality of output", output_reality),
        ("AC6 metric oracle suite", metric_oracle_suite),
        ("AC7 pipeline determinism", pipeline_determinism),
        ("AC8 performance budget", performance_budget),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
