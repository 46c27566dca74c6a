//! Free energy `F(k) = -k ln Σ e^{-f/k}` and its small-k Taylor data.

use rayon::prelude::*;

use super::{nest, validate_spectrum, NestType, NestingError};

/// `-k ln Σ_α e^{-f_α/k}`, shifted by the minimum so nothing overflows.
pub fn free_energy(values: &[f64], k: f64) -> Result<f64, NestingError> {
    validate_spectrum(values)?;
    if !(k > 0.0) {
        return Err(NestingError::NonPositiveK);
    }
    let kappa0 = values.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = values.iter().map(|f| (-(f - kappa0) / k).exp()).sum();
    Ok(kappa0 - k * sum.ln())
}

/// `F(k) - κ0` where `κ0` is the minimum and the minimisers are grouped with
/// `tie_tol`; returns `(κ0, λ0, F(k) - κ0)`.
///
/// Written as `-k (ln λ0 + ln(1 + ε))` so the exponentially small part keeps
/// full relative precision.
pub fn free_energy_excess(values: &[f64], k: f64, tie_tol: f64) -> Result<(f64, usize, f64), NestingError> {
    if !(k > 0.0) {
        return Err(NestingError::NonPositiveK);
    }
    let nf = nest(values, NestType::B, tie_tol)?;
    let bottom = nf.bottom();
    let kappa0 = bottom.mu;
    let lambda0 = bottom.nu;
    let eps: f64 = values
        .iter()
        .enumerate()
        .filter(|(i, _)| !bottom.indices.contains(*i))
        .map(|(_, f)| (-(f - kappa0) / k).exp())
        .sum::<f64>()
        / lambda0 as f64;
    Ok((kappa0, lambda0, -k * ((lambda0 as f64).ln() + eps.ln_1p())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions {
    /// Strictly decreasing positive grid; halving by default.
    pub grid: Vec<f64>,
    pub tie_tol: f64,
    pub tol_order0: f64,
    pub tol_order1: f64,
    pub tol_higher: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            grid: (0..9).map(|j| 0.1 / f64::powi(2.0, j)).collect(),
            tie_tol: crate::scalar::FLOAT_TIE_TOLERANCE,
            tol_order0: 1e-9,
            tol_order1: 1e-6,
            tol_higher: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub order: usize,
    pub estimate: f64,
    pub expected: f64,
    pub residual: f64,
    /// Gap between the chosen extrapolant and its predecessor.
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub kappa0: f64,
    pub lambda0: usize,
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Five-point central stencil for the `order`-th derivative at `x` with step `h`.
fn stencil(g: &dyn Fn(f64) -> f64, x: f64, h: f64, order: usize) -> f64 {
    let (m2, m1, p1, p2) = (g(x - 2.0 * h), g(x - h), g(x + h), g(x + 2.0 * h));
    match order {
        1 => (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
        2 => (-m2 + 16.0 * m1 - 30.0 * g(x) + 16.0 * p1 - p2) / (12.0 * h * h),
        3 => (-m2 + 2.0 * m1 - 2.0 * p1 + p2) / (2.0 * h * h * h),
        4 => (m2 - 4.0 * m1 + 6.0 * g(x) - 4.0 * p1 + p2) / (h * h * h * h),
        _ => unreachable!("orders are validated"),
    }
}

/// Two rounds of Richardson elimination (linear, then quadratic error terms)
/// toward `k = 0`.
fn richardson(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let level = |ks: &[f64], vs: &[f64], power: i32| -> Vec<f64> {
        (1..vs.len())
            .map(|j| {
                let r = (ks[j - 1] / ks[j]).powi(power);
                (r * vs[j] - vs[j - 1]) / (r - 1.0)
            })
            .collect()
    };
    let first = level(grid, values, 1);
    level(&grid[1..], &first, 2)
}

/// The extrapolant at which consecutive values agree best, with that spread.
/// The sequence counts as contracting when that spread is at most half the
/// first one, or already at rounding level.
///
/// Truncation error shrinks along the grid while rounding grows, so the
/// sequence settles and then drifts.
fn settle(seq: &[f64]) -> (f64, f64) {
    (1..seq.len())
        .map(|j| (seq[j], (seq[j] - seq[j - 1]).abs()))
        .fold((seq[0], f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Estimates `F^{(m)}(0+)` for `m = 0..=max_order` and compares them with
/// `κ0`, `-ln λ0` and `0`.
pub fn taylor_probe(values: &[f64], max_order: usize, opts: &ProbeOptions) -> Result<ProbeReport, NestingError> {
    validate_spectrum(values)?;
    if !(2..=4).contains(&max_order) {
        return Err(NestingError::InvalidOrders(max_order));
    }
    let grid = &opts.grid;
    if grid.len() < 5 {
        return Err(NestingError::InvalidGrid(format!("need at least 5 points, got {}", grid.len())));
    }
    if grid.iter().any(|k| !(*k > 0.0) || !k.is_finite()) || grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(NestingError::InvalidGrid("points must be positive and strictly decreasing".into()));
    }
    let (kappa0, lambda0, _) = free_energy_excess(values, grid[0], opts.tie_tol)?;
    let g = |k: f64| free_energy_excess(values, k, opts.tie_tol).expect("validated").2;

    let mut entries = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let raw: Vec<f64> = grid
            .par_iter()
            .map(|&k| if order == 0 { kappa0 + g(k) } else { stencil(&g, k, k / 3.0, order) })
            .collect();
        let (expected, tol) = match order {
            0 => (kappa0, opts.tol_order0),
            1 => (-(lambda0 as f64).ln(), opts.tol_order1),
            _ => (0.0, opts.tol_higher),
        };
        let extrapolated = richardson(grid, &raw);
        let (estimate, spread) = settle(&extrapolated);
        let first = (extrapolated[1] - extrapolated[0]).abs();
        // Stencil rounding: eps * |G| / h^m, amplified by the stencil weights and extrapolation.
        let noise = grid
            .iter()
            .map(|&k| 1024.0 * f64::EPSILON * (kappa0.abs() + g(k).abs()) / (k / 3.0).powi(order as i32))
            .fold(0.0, f64::max);
        if !(spread < 0.5 * first || spread <= noise.max(f64::EPSILON * estimate.abs().max(1.0))) {
            return Err(NestingError::GridTooCoarse { order });
        }
        let residual = (estimate - expected).abs();
        entries.push(ProbeEntry { order, estimate, expected, residual, spread, pass: residual <= tol });
    }
    Ok(ProbeReport { kappa0, lambda0, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn free_energy_example() {
        let f = free_energy(&[0.0, 1.0], 1.0).unwrap();
        assert!((f + (1.0 + (-1f64).exp()).ln()).abs() < 1e-15);
        assert!((f + 0.313262).abs() < 1e-6);
        assert_eq!(free_energy(&[0.0], 0.0), Err(NestingError::NonPositiveK));
    }

    #[test]
    fn probe_examples() {
        let opts = ProbeOptions::default();
        let r = taylor_probe(&[0.0, 0.0, 1.0], 3, &opts).unwrap();
        assert_eq!((r.kappa0, r.lambda0), (0.0, 2));
        assert!(r.pass(), "{r:?}");
        assert!((r.entries[1].estimate + 2f64.ln()).abs() < 1e-6);

        let r = taylor_probe(&[0.0, 0.5, 1.5], 3, &opts).unwrap();
        assert_eq!(r.lambda0, 1);
        assert!(r.pass(), "{r:?}");

        let r = taylor_probe(&[0.0], 3, &opts).unwrap();
        assert!(r.entries.iter().all(|e| e.estimate == 0.0));
    }

    #[test]
    fn coarse_grid_is_reported() {
        let opts = ProbeOptions { grid: vec![8.0, 4.0, 2.0, 1.0, 0.5], ..ProbeOptions::default() };
        assert_eq!(taylor_probe(&[0.0, 0.1, 0.3, 5.0], 3, &opts), Err(NestingError::GridTooCoarse { order: 1 }));
    }

    #[test]
    fn probe_input_errors() {
        let opts = ProbeOptions::default();
        assert_eq!(taylor_probe(&[0.0], 1, &opts), Err(NestingError::InvalidOrders(1)));
        let short = ProbeOptions { grid: vec![0.1, 0.05], ..ProbeOptions::default() };
        assert!(matches!(taylor_probe(&[0.0], 2, &short), Err(NestingError::InvalidGrid(_))));
    }

    proptest! {
        #[test]
        fn free_energy_stays_near_tropical_limit(
            spectrum in prop::collection::vec(-5.0f64..5.0, 1..12),
            k in 0.01f64..2.0,
        ) {
            let (kappa0, lambda0, _) = free_energy_excess(&spectrum, k, 0.0).unwrap();
            let gap = spectrum.iter().copied().filter(|f| *f > kappa0).fold(f64::INFINITY, f64::min);
            let n = spectrum.len();
            let f = free_energy(&spectrum, k).unwrap();
            let bound = if gap.is_finite() { k * (n - lambda0) as f64 * (-(gap - kappa0) / k).exp() } else { 0.0 };
            prop_assert!((f - kappa0 + k * (lambda0 as f64).ln()).abs() <= bound + 1e-12);
        }

        #[test]
        fn probe_recovers_degeneracy(
            lambda0 in 1usize..5,
            kappa0 in -3.0f64..3.0,
            gap in 0.1f64..2.0,
            extra in prop::collection::vec(0.0f64..4.0, 0..15),
        ) {
            let mut spectrum = vec![kappa0; lambda0];
            spectrum.push(kappa0 + gap);
            spectrum.extend(extra.iter().map(|e| kappa0 + gap + e));
            let r = taylor_probe(&spectrum, 3, &ProbeOptions::default()).unwrap();
            prop_assert_eq!(r.lambda0, lambda0);
            prop_assert!(r.pass(), "{:?}", r);
        }
    }
}
