use loggas_model::ParticleConfiguration;

/// Particles in the open interval (E − δ, E + δ).
pub fn level_count(config: &ParticleConfiguration, e: f64, delta: f64) -> usize {
    let x = config.positions();
    let lo = x.partition_point(|&v| v <= e - delta);
    let hi = x.partition_point(|&v| v < e + delta);
    hi.saturating_sub(lo)
}

/// Fraction of configurations with at least `m` particles in (E − δ, E + δ).
pub fn occupancy_probability(samples: &[ParticleConfiguration], e: f64, delta: f64, m: usize) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|s| level_count(s, e, delta) >= m).count() as f64 / samples.len() as f64
}
