//! Quick oracle checks runnable from the command line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{self, AugmentParams};
use crate::fourier;
use crate::metrics;
use crate::oracle;
use crate::types::{ImageTensor, SegmentationMask, Shape, StructureLabel};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_image(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> ImageTensor {
    ImageTensor::from_fn(Shape::new(c, h, w).expect("positive dims"), |_, _, _| rng.gen()).expect("finite")
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("max error {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn dft_vs_oracle(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for h in 1..=9 {
        for w in 1..=9 {
            let x = random_image(rng, 1, h, w);
            let fast = fourier::dft2(&x);
            let slow = oracle::direct_dft2(&x);
            for (a, b) in fast.data().iter().zip(&slow) {
                worst = worst.max((a - b).norm());
            }
            let back = fourier::idft2(&fast).expect("finite");
            let slow_back = oracle::direct_idft2(&fast);
            for (a, b) in back.image.data().iter().zip(&slow_back) {
                worst = worst.max((a - b.re).abs());
            }
        }
    }
    check("dft2/idft2 match direct sums on 1..9 x 1..9", worst, 1e-9)
}

fn round_trip_and_parseval(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for (h, w) in [(16, 16), (30, 17), (64, 48)] {
        let x = random_image(rng, 3, h, w);
        let spec = fourier::dft2(&x);
        let back = fourier::idft2(&spec).expect("finite");
        for (a, b) in back.image.data().iter().zip(x.data()) {
            worst = worst.max((a - b).abs());
        }
        let plane = h * w;
        for c in 0..3 {
            let spatial: f64 = x.channel(c).iter().map(|v| v * v).sum();
            let freq: f64 = spec.data()[c * plane..(c + 1) * plane]
                .iter()
                .map(Complex64::norm_sqr)
                .sum::<f64>()
                / plane as f64;
            worst = worst.max((spatial - freq).abs() / spatial);
        }
    }
    check("round trip and Parseval", worst, 1e-9)
}

fn augmentation_identities(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let s = random_image(rng, 3, 32, 32);
        let t = random_image(rng, 3, 32, 32);
        let zero = AugmentParams {
            lambda: 0.0,
            ..AugmentParams::fdg(1.0).expect("valid")
        };
        let out = augment::fdg_augment(&s, &t, &zero).expect("same shape");
        for (a, b) in out.data().iter().zip(s.data()) {
            worst = worst.max((a - b).abs());
        }
        let plain = augment::augment_traced(&s, &t, &AugmentParams::fdg(0.6).expect("valid")).expect("same shape");
        let st = augment::augment_traced(&s, &t, &AugmentParams::fdg_st(0.6, 0.0).expect("valid")).expect("same shape");
        if plain.mixed_amplitude != st.mixed_amplitude {
            worst = f64::INFINITY;
        }
        worst = worst.max(st.reconstruction.relative_residual());
    }
    check("augmentation identities (lambda = 0, alpha = 0)", worst, 1e-6)
}

fn metrics_vs_oracle(rng: &mut ChaCha8Rng) -> Check {
    let mut mismatches = 0usize;
    for _ in 0..2000 {
        let (h, w) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let build = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=6);
            let pts: Vec<(usize, usize)> = (0..n).map(|_| (rng.gen_range(0..h), rng.gen_range(0..w))).collect();
            SegmentationMask::from_fn(h, w, StructureLabel::OpticCup, |r, c| pts.contains(&(r, c))).expect("binary")
        };
        let (a, b) = (build(rng), build(rng));
        let fast = metrics::evaluate(&a, &b).expect("non-empty");
        let (oa, ob) = (oracle::boundary_points(&a), oracle::boundary_points(&b));
        let ok = fast.hd == oracle::hausdorff(&oa, &ob)
            && (fast.asd - oracle::average_surface_distance(&oa, &ob)).abs() <= 1e-12
            && fast.dsc == oracle::dice(&a, &b);
        mismatches += usize::from(!ok);
    }
    Check {
        name: "HD/ASD/DSC match exhaustive scans on 2000 mask pairs",
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatches"),
    }
}

pub fn run_all(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        dft_vs_oracle(&mut rng),
        round_trip_and_parseval(&mut rng),
        augmentation_identities(&mut rng),
        metrics_vs_oracle(&mut rng),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_all(1) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
