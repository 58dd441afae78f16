mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use robustmix::augment::{mixup_with, reverse_partners, robustmix_with};
use robustmix::sampler::sample_draw;
use robustmix::{
    label_coefficient, mix, mixup_batch, robustmix_batch, robustmix_no_energy_weight_batch,
    robustmix_no_inband_mix_batch, AugmentConfig, LabelWeighting, Policy, RngState, RobustmixDraw,
    Tensor,
};

struct Case {
    x: Tensor,
    y: Tensor,
}

fn case(seed: u64, n: usize, side: usize, ch: usize, classes: usize) -> Case {
    let mut rng = RngState::new(seed);
    Case {
        x: random_tensor(vec![n, side, side, ch], &mut rng),
        y: random_simplex(n, classes, &mut rng),
    }
}

/// Mix first, then filter: the unreordered two-band formula.
fn unreordered_images(x: &Tensor, draw: &RobustmixDraw) -> Vec<f64> {
    let (n, side, ch) = (x.dims()[0], x.dims()[1], x.dims()[3]);
    let x1 = to_f64(x);
    let x2 = reverse_rows(&x1, n);
    let low_in = lerp(&x1, &x2, draw.lambda_low);
    let high_in = lerp(&x1, &x2, draw.lambda_high);
    let low = naive_low_pass(&low_in, n, side, ch, draw.cutoff);
    let high_low = naive_low_pass(&high_in, n, side, ch, draw.cutoff);
    low.iter()
        .zip(high_in.iter().zip(&high_low))
        .map(|(l, (h, hl))| l + (h - hl))
        .collect()
}

/// Label as the energy-weighted blend of two separately mixed labels.
fn two_term_labels(y: &Tensor, l_low: f64, l_high: f64, weight: f64) -> Vec<f64> {
    let y1 = to_f64(y);
    let y2 = reverse_rows(&y1, y.dims()[0]);
    let a = lerp(&y1, &y2, l_low);
    let b = lerp(&y1, &y2, l_high);
    a.iter()
        .zip(&b)
        .map(|(p, q)| weight * p + (1.0 - weight) * q)
        .collect()
}

#[test]
fn reordered_kernel_matches_unreordered_formula() {
    let mut draws = RngState::new(31);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let c = case(300 + i, 4, 16, 3, 5);
        let draw = sample_draw(0.4, 0.0, &mut draws).unwrap();
        let out = robustmix_with(
            &c.x,
            &c.y,
            draw,
            LabelWeighting::Energy,
            &reverse_partners(4),
        )
        .unwrap();
        worst = worst.max(max_abs(&unreordered_images(&c.x, &draw), out.images.data()));

        // the energy weight is measured on the unmixed batch
        let lc = naive_energy_fraction(&to_f64(&c.x), 4, 16, 3, draw.cutoff);
        assert!((out.draw.energy_weight - lc).abs() < 1e-5);
        let labels = two_term_labels(
            &c.y,
            draw.lambda_low,
            draw.lambda_high,
            out.draw.energy_weight,
        );
        assert!(max_abs(&labels, out.labels.data()) < 1e-6);
    }
    assert!(worst < 1e-4, "max abs {worst}");
}

#[test]
fn label_line_agrees_with_two_term_label_formula() {
    let mut rng = RngState::new(32);
    for _ in 0..10_000 {
        let classes = rng.random_range(2..12);
        let y = random_simplex(2, classes, &mut rng);
        let (y1, y2) = (
            Tensor::new(vec![classes], y.row(0).to_vec()).unwrap(),
            Tensor::new(vec![classes], y.row(1).to_vec()).unwrap(),
        );
        let (l_low, l_high, lc) = (
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        );
        let algo = mix(&y1, &y2, label_coefficient(l_low, l_high, lc)).unwrap();
        let (a, b) = (to_f64(&y1), to_f64(&y2));
        let eq: Vec<f64> = lerp(&a, &b, l_low)
            .iter()
            .zip(lerp(&a, &b, l_high))
            .map(|(p, q)| lc * p + (1.0 - lc) * q)
            .collect();
        assert!(max_abs(&eq, algo.data()) < 1e-6);
    }
}

#[test]
fn equal_band_coefficients_collapse_to_mixup() {
    let mut rng = RngState::new(33);
    for i in 0..20 {
        let c = case(400 + i, 6, 8, 3, 4);
        let lambda = rng.random::<f64>();
        let cutoff = rng.random::<f64>();
        let partners = reverse_partners(6);
        let r = robustmix_with(
            &c.x,
            &c.y,
            RobustmixDraw::new(lambda, lambda, cutoff),
            LabelWeighting::Energy,
            &partners,
        )
        .unwrap();
        let m = mixup_with(&c.x, &c.y, lambda, &partners).unwrap();
        assert!(r.images.max_abs_diff(&m.images).unwrap() < 1e-4);
        assert!(r.labels.max_abs_diff(&m.labels).unwrap() < 1e-6);
    }
}

#[test]
fn unit_tau_reproduces_mixup_stream() {
    for seed in 0..20 {
        let c = case(500 + seed, 5, 8, 3, 3);
        let cfg = AugmentConfig::new(Policy::Robustmix, 0.3).with_tau(1.0);
        let r = robustmix_batch(&c.x, &c.y, &cfg, &mut RngState::new(seed)).unwrap();
        let m = mixup_batch(
            &c.x,
            &c.y,
            &AugmentConfig::new(Policy::Mixup, 0.3),
            &mut RngState::new(seed),
        )
        .unwrap();
        assert_eq!(r.draw.cutoff, 1.0);
        assert_eq!(r.draw.energy_weight, 1.0);
        assert!(r.images.max_abs_diff(&m.images).unwrap() < 1e-4);
        assert!(r.labels.max_abs_diff(&m.labels).unwrap() < 1e-6);
    }
}

#[test]
fn cutoff_weighted_variant_uses_cutoff_in_label() {
    for seed in 0..20 {
        let c = case(600 + seed, 4, 8, 1, 6);
        let cfg = AugmentConfig::new(Policy::RobustmixNoEnergyWeight, 0.4);
        let out =
            robustmix_no_energy_weight_batch(&c.x, &c.y, &cfg, &mut RngState::new(seed)).unwrap();
        let d = out.draw;
        let labels = two_term_labels(&c.y, d.lambda_low, d.lambda_high, d.cutoff);
        assert!(max_abs(&labels, out.labels.data()) < 1e-6);
        // images are the same as the energy-weighted policy with the same draws
        let full = robustmix_batch(
            &c.x,
            &c.y,
            &AugmentConfig::new(Policy::Robustmix, 0.4),
            &mut RngState::new(seed),
        )
        .unwrap();
        assert_eq!(full.images, out.images);
    }
}

#[test]
fn band_swap_is_the_forced_draw_of_the_full_policy() {
    for seed in 0..10 {
        let c = case(700 + seed, 4, 8, 3, 3);
        let cfg = AugmentConfig::new(Policy::RobustmixNoInbandMix, 0.4);
        let swap =
            robustmix_no_inband_mix_batch(&c.x, &c.y, &cfg, &mut RngState::new(seed)).unwrap();
        let forced = robustmix_with(
            &c.x,
            &c.y,
            RobustmixDraw::new(1.0, 0.0, swap.draw.cutoff),
            LabelWeighting::Energy,
            &reverse_partners(4),
        )
        .unwrap();
        assert!(swap.images.max_abs_diff(&forced.images).unwrap() < 1e-6);
        assert!(swap.labels.max_abs_diff(&forced.labels).unwrap() < 1e-6);
    }
}

#[test]
fn draws_stay_in_range() {
    let c = case(800, 4, 8, 1, 2);
    for seed in 0..200 {
        let cfg = AugmentConfig::new(Policy::Robustmix, 0.2).with_tau(0.1);
        let d = robustmix_batch(&c.x, &c.y, &cfg, &mut RngState::new(seed))
            .unwrap()
            .draw;
        assert!((0.0..=1.0).contains(&d.lambda_low));
        assert!((0.0..=1.0).contains(&d.lambda_high));
        assert!((0.1..=1.0).contains(&d.cutoff));
        assert!((0.0..=1.0).contains(&d.energy_weight));
    }
}

fn any_policy() -> impl Strategy<Value = Policy> {
    prop::sample::select(Policy::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_labels_stay_on_the_simplex(
        seed in any::<u64>(),
        n in 1usize..7,
        side in 1usize..10,
        classes in 1usize..8,
        policy in any_policy(),
        alpha in 0.05f64..2.0,
        tau in 0.0f64..=1.0,
    ) {
        let c = case(seed, n, side, 2, classes);
        let cfg = AugmentConfig::new(policy, alpha).with_tau(tau);
        let out = robustmix::augment_batch(&c.x, &c.y, &cfg, &mut RngState::new(seed)).unwrap();
        prop_assert_eq!(out.images.dims(), c.x.dims());
        for i in 0..n {
            let row = out.labels.row(i);
            prop_assert!(row.iter().all(|&v| v >= 0.0));
            let s: f32 = row.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn reversing_the_batch_reverses_the_output(
        seed in any::<u64>(),
        n in 1usize..7,
        side in 1usize..10,
        l_low in 0.0f64..=1.0,
        l_high in 0.0f64..=1.0,
        cutoff in 0.0f64..=1.0,
    ) {
        let c = case(seed, n, side, 3, 4);
        let rev: Vec<usize> = reverse_partners(n);
        let xr = c.x.gather_rows(&rev).unwrap();
        let yr = c.y.gather_rows(&rev).unwrap();
        let draw = RobustmixDraw::new(l_low, l_high, cutoff);
        let a = robustmix_with(&c.x, &c.y, draw, LabelWeighting::Energy, &rev).unwrap();
        let b = robustmix_with(&xr, &yr, draw, LabelWeighting::Energy, &rev).unwrap();
        prop_assert!(b.images.max_abs_diff(&a.images.gather_rows(&rev).unwrap()).unwrap() < 1e-6);
        prop_assert!(b.labels.max_abs_diff(&a.labels.gather_rows(&rev).unwrap()).unwrap() < 1e-6);
    }
}
