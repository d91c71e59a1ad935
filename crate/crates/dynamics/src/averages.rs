/// Running time integrals of window averages a_M(t), M = 1..=K, by the
/// trapezoid rule on the stored grid.
pub(crate) struct RadiusIntegrals<'a> {
    times: &'a [f64],
    cum: Vec<Vec<f64>>,
}

impl<'a> RadiusIntegrals<'a> {
    pub(crate) fn new(times: &'a [f64], averages: &[Vec<f64>]) -> Self {
        let radii = averages.first().map_or(0, Vec::len);
        let mut cum = Vec::with_capacity(times.len());
        cum.push(vec![0.0; radii]);
        for t in 1..times.len() {
            let dt = times[t] - times[t - 1];
            let prev = &cum[t - 1];
            let row = (0..radii).map(|m| prev[m] + 0.5 * dt * (averages[t - 1][m] + averages[t][m])).collect();
            cum.push(row);
        }
        Self { times, cum }
    }

    fn at(&self, s: f64, m: usize) -> f64 {
        let i = self.times.partition_point(|&t| t <= s);
        if i == 0 {
            return self.cum[0][m];
        }
        if i == self.times.len() {
            return self.cum[i - 1][m];
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let f = (s - t0) / (t1 - t0);
        self.cum[i - 1][m] * (1.0 - f) + self.cum[i][m] * f
    }

    /// sup over stored s and M of |∫_s^σ a_M| / (1 + |s − σ|).
    pub(crate) fn sup(&self, sigma: f64) -> f64 {
        let radii = self.cum[0].len();
        let mut best: f64 = 0.0;
        for m in 0..radii {
            let c_sigma = self.at(sigma, m);
            for (t, row) in self.times.iter().zip(&self.cum) {
                best = best.max((c_sigma - row[m]).abs() / (1.0 + (t - sigma).abs()));
            }
        }
        best
    }
}

/// Dyadic time shifts Ξ = {−K·2^{−m}(1 + 2^{−k}) : 0 ≤ k, m ≤ ⌊c·ln K⌋}.
pub fn dyadic_shifts(k_half: usize, c: f64) -> Vec<f64> {
    let k = k_half.max(1) as f64;
    let top = (c * k.ln()).floor().max(0.0) as i32;
    let mut out = Vec::new();
    for m in 0..=top {
        for j in 0..=top {
            out.push(-k * 2f64.powi(-m) * (1.0 + 2f64.powi(-j)));
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
