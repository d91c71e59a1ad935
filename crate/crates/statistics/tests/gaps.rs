use loggas_equilibrium::EquilibriumDensity;
use loggas_model::{stream_rng, ParticleConfiguration, Scaling};
use loggas_samplers::sample_gaussian_beta_tridiagonal;
use loggas_statistics::{gap_distribution, Ensemble, StatsError};

fn tridiagonal_draws(n: usize, beta: f64, draws: usize, seed: u64) -> Vec<ParticleConfiguration> {
    (0..draws)
        .map(|d| sample_gaussian_beta_tridiagonal(n, beta, &mut stream_rng(seed, d as u64)).unwrap())
        .collect()
}

#[test]
fn equal_spacing_rescales_to_one() {
    let n = 100;
    let sc = EquilibriumDensity::semicircle();
    let k = 30;
    let spacing = 1.0 / (n as f64 * sc.density_at_quantile(k, n).unwrap());
    let x: Vec<f64> = (0..n).map(|j| j as f64 * spacing).collect();
    let conf = ParticleConfiguration::full(x, Scaling::Macroscopic).unwrap();
    let (sample, _) = gap_distribution(&[conf], &sc, Ensemble::new("lattice", 1.0), k, 1).unwrap();
    assert!((sample.order(1)[0] - 1.0).abs() < 1e-12);
}

#[test]
fn microscopic_units_give_the_same_gaps() {
    let draws = tridiagonal_draws(40, 2.0, 3, 5);
    let micro: Vec<_> = draws.iter().map(|c| c.micro_rescale(40).unwrap()).collect();
    let sc = EquilibriumDensity::semicircle();
    let (a, _) = gap_distribution(&draws, &sc, Ensemble::new("gue", 2.0), 20, 3).unwrap();
    let (b, _) = gap_distribution(&micro, &sc, Ensemble::new("gue", 2.0), 20, 3).unwrap();
    for (ra, rb) in a.gaps.iter().zip(&b.gaps) {
        for (ga, gb) in ra.iter().zip(rb) {
            assert!((ga - gb).abs() < 1e-12 * ga.max(1.0));
        }
    }
}

#[test]
fn single_draw_cdf_has_capped_jumps() {
    let sc = EquilibriumDensity::semicircle();
    let draw = tridiagonal_draws(20, 1.0, 1, 9);
    // N − k = 2 gaps exist past k = 18.
    let (_, cdf) = gap_distribution(&draw, &sc, Ensemble::new("goe", 1.0), 18, 5).unwrap();
    assert_eq!(cdf.jumps(), 2);
    let (sample, cdf) = gap_distribution(&draw, &sc, Ensemble::new("goe", 1.0), 10, 3).unwrap();
    assert_eq!(cdf.jumps(), 3);
    assert!(sample.gaps[0].windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn edge_indices_are_rejected() {
    let sc = EquilibriumDensity::semicircle();
    let draw = tridiagonal_draws(100, 1.0, 1, 1);
    for k in [1, 9, 91, 100] {
        assert!(matches!(
            gap_distribution(&draw, &sc, Ensemble::new("goe", 1.0), k, 1),
            Err(StatsError::Domain(_))
        ));
    }
    assert!(gap_distribution(&draw, &sc, Ensemble::new("goe", 1.0), 10, 1).is_ok());
}

#[test]
fn mean_nearest_gap_at_the_centre_is_one() {
    let n = 200;
    let draws = tridiagonal_draws(n, 1.0, 10_000, 21);
    let (sample, _) =
        gap_distribution(&draws, &EquilibriumDensity::semicircle(), Ensemble::new("goe", 1.0), n / 2, 1).unwrap();
    let mean = sample.mean(1);
    assert!((mean - 1.0).abs() < 0.05, "mean rescaled gap {mean}");
}

/// Off-centre the density gradient biases the rescaled gap by O(1/N); pooled
/// over k in [N/10, N/5] the bias is large enough to resolve.
#[test]
fn rescaled_gap_bias_shrinks_with_n() {
    let sc = EquilibriumDensity::semicircle();
    let deviations: Vec<f64> = [(50, 24_000), (100, 12_000), (200, 6_000)]
        .iter()
        .map(|&(n, m)| {
            let draws = tridiagonal_draws(n, 1.0, m, n as u64);
            let (mut sum, mut count) = (0.0, 0usize);
            for k in n / 10..=n / 5 {
                let (s, _) = gap_distribution(&draws, &sc, Ensemble::new("goe", 1.0), k, 1).unwrap();
                let g = s.order(1);
                sum += g.iter().sum::<f64>();
                count += g.len();
            }
            (sum / count as f64 - 1.0).abs()
        })
        .collect();
    assert!(deviations.windows(2).all(|w| w[1] < w[0]), "{deviations:?}");
}
