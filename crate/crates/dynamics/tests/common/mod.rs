use loggas_equilibrium::EquilibriumDensity;
use loggas_model::{BoundaryData, IndexWindow, ParticleConfiguration, PotentialModel, Scaling};
use loggas_samplers::LogGasMeasure;

/// Local Gaussian gas of 2K+1 particles around the middle of N, with the
/// frozen points at the classical locations (microscopic units).
#[allow(dead_code)]
pub struct LocalGas {
    pub measure: LogGasMeasure,
    pub boundary: BoundaryData,
    pub start: ParticleConfiguration,
    pub center: i64,
}

pub fn local_gas(n: usize, k: i64, beta: f64) -> LocalGas {
    let gamma: Vec<f64> = EquilibriumDensity::semicircle()
        .classical_locations(n)
        .unwrap()
        .iter()
        .map(|g| g * n as f64)
        .collect();
    let center = n as i64 / 2;
    let window = IndexWindow::centered(center, k).unwrap();
    let boundary = BoundaryData::from_full(&gamma, window, Scaling::Microscopic).unwrap();
    let measure = LogGasMeasure::local(beta, &PotentialModel::gaussian(), &boundary, window).unwrap();
    let start = ParticleConfiguration::new(
        gamma[(window.lo - 1) as usize..window.hi as usize].to_vec(),
        window,
        Scaling::Microscopic,
    )
    .unwrap();
    LocalGas { measure, boundary, start, center }
}
