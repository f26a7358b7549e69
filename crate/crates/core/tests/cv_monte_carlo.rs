use bifidelity::cv::{cv_estimate, optimal_alpha_scalar, predicted_variance, CvCoefficient, MeanKind, PairedSamples};
use bifidelity::rng::{stream, Purpose};
use rand_distr::{Distribution, StandardNormal};

fn pair(rng: &mut impl rand::Rng, rho: f64, sx: f64) -> (f64, f64) {
    let a: f64 = StandardNormal.sample(rng);
    let b: f64 = StandardNormal.sample(rng);
    (sx * a, rho * a + (1.0 - rho * rho).sqrt() * b)
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

#[test]
fn exact_and_estimated_mean_laws() {
    let (sx, n_h, n_l, reps) = (1.5, 8, 24, 4000);
    for rho in [0.5, 0.9] {
        let alpha = rho * sx;
        let mut exact = Vec::with_capacity(reps);
        let mut est = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut rng = stream(17, Purpose::Validation, r as u64, (rho * 100.0) as u64);
            let (x, y): (Vec<f64>, Vec<f64>) = (0..n_h).map(|_| pair(&mut rng, rho, sx)).unzip();
            let ybar_l = (0..n_l).map(|_| pair(&mut rng, rho, sx).1).sum::<f64>() / n_l as f64;
            let a = PairedSamples::scalar(&x, &y, 0.0, MeanKind::Exact).unwrap();
            exact.push(cv_estimate(&a, &CvCoefficient::Scalar(alpha)).unwrap()[0]);
            let shrunk = alpha / (1.0 + n_h as f64 / n_l as f64);
            let b = PairedSamples::scalar(&x, &y, ybar_l, MeanKind::Estimated { n_l }).unwrap();
            est.push(cv_estimate(&b, &CvCoefficient::Scalar(shrunk)).unwrap()[0]);
        }
        let want = predicted_variance(rho, sx * sx, n_h, None).unwrap();
        let got = variance(&exact);
        assert!((got / want - 1.0).abs() < 0.1, "rho {rho}: {got} vs {want}");
        let want = predicted_variance(rho, sx * sx, n_h, Some(n_l)).unwrap();
        let got = variance(&est);
        assert!((got / want - 1.0).abs() < 0.1, "rho {rho} estimated: {got} vs {want}");
    }
}

#[test]
fn sample_coefficient_converges() {
    let mut rng = stream(5, Purpose::Validation, 0, 0);
    let (x, y): (Vec<f64>, Vec<f64>) = (0..10_000).map(|_| pair(&mut rng, 0.9, 2.0)).unzip();
    let a = optimal_alpha_scalar(&PairedSamples::scalar(&x, &y, 0.0, MeanKind::Exact).unwrap()).unwrap();
    assert!((a / 1.8 - 1.0).abs() < 0.05);
}
