//! Exact arithmetic on decimal edge weights.
//!
//! Instance weights are short decimals (five fractional digits after
//! rounding) and the lower-bound LP produces rationals with small
//! denominators. When every weight sits on a decimal grid of at most nine
//! fractional digits we work in integer units of that grid, which makes
//! cut energies and matching weights exact and comparable bit for bit.

/// Largest number of fractional decimal digits handled as integers.
pub const MAX_DECIMALS: u32 = 9;

/// Largest magnitude (in grid units) accepted for a single weight; leaves
/// head-room for sums over tens of thousands of edges in `i64`.
const MAX_UNITS: f64 = 4.0e13;

/// Weights expressed as integer multiples of `10^-decimals`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledWeights {
    pub decimals: u32,
    pub units: Vec<i64>,
}

impl ScaledWeights {
    /// Finds the coarsest decimal grid (up to [`MAX_DECIMALS`] digits) that
    /// holds every value to within a relative error of `1e-12`.
    pub fn detect(values: &[f64]) -> Option<ScaledWeights> {
        if values.iter().any(|v| !v.is_finite()) {
            return None;
        }
        'grid: for decimals in 0..=MAX_DECIMALS {
            let scale = 10f64.powi(decimals as i32);
            let mut units = Vec::with_capacity(values.len());
            for &v in values {
                let u = (v * scale).round();
                if u.abs() > MAX_UNITS {
                    return None;
                }
                if (v - u / scale).abs() > 1e-12 * v.abs().max(1.0) {
                    continue 'grid;
                }
                units.push(u as i64);
            }
            return Some(ScaledWeights { decimals, units });
        }
        None
    }

    pub fn scale(&self) -> f64 {
        10f64.powi(self.decimals as i32)
    }

    /// Converts a sum of units back to a real value with a single rounding.
    pub fn to_real(&self, units: i64) -> f64 {
        units as f64 / self.scale()
    }
}

/// Evaluates `sum_e w_e [edge e is selected]`, exactly when the weights lie
/// on a decimal grid.
#[derive(Clone, Debug)]
pub enum EnergyEvaluator {
    Exact(ScaledWeights),
    Float(Vec<f64>),
}

impl EnergyEvaluator {
    pub fn new(weights: &[f64]) -> EnergyEvaluator {
        match ScaledWeights::detect(weights) {
            Some(s) => EnergyEvaluator::Exact(s),
            None => EnergyEvaluator::Float(weights.to_vec()),
        }
    }

    /// Sum of the weights of selected edges.
    pub fn sum_where<F: Fn(usize) -> bool>(&self, selected: F) -> f64 {
        match self {
            EnergyEvaluator::Exact(s) => {
                let total: i64 = s.units.iter().enumerate().filter(|&(e, _)| selected(e)).map(|(_, &u)| u).sum();
                s.to_real(total)
            }
            EnergyEvaluator::Float(w) => w.iter().enumerate().filter(|&(e, _)| selected(e)).map(|(_, &x)| x).sum(),
        }
    }

    /// Energy of a vertex labeling: weights of edges whose endpoints differ.
    pub fn labeling_energy(&self, edges: &[(usize, usize)], labels: &[usize]) -> f64 {
        self.sum_where(|e| {
            let (u, v) = edges[e];
            labels[u] != labels[v]
        })
    }

    /// Integer key for exact comparisons; falls back to the raw bits of the
    /// float sum otherwise (only meaningful for ordering equal sums).
    pub fn key_where<F: Fn(usize) -> bool>(&self, selected: F) -> EnergyKey {
        match self {
            EnergyEvaluator::Exact(s) => {
                EnergyKey::Units(s.units.iter().enumerate().filter(|&(e, _)| selected(e)).map(|(_, &u)| u).sum())
            }
            EnergyEvaluator::Float(_) => EnergyKey::Real(self.sum_where(selected)),
        }
    }

    pub fn labeling_key(&self, edges: &[(usize, usize)], labels: &[usize]) -> EnergyKey {
        self.key_where(|e| {
            let (u, v) = edges[e];
            labels[u] != labels[v]
        })
    }

    pub fn key_to_real(&self, key: EnergyKey) -> f64 {
        match (self, key) {
            (EnergyEvaluator::Exact(s), EnergyKey::Units(u)) => s.to_real(u),
            (_, EnergyKey::Real(x)) => x,
            (EnergyEvaluator::Float(_), EnergyKey::Units(u)) => u as f64,
        }
    }
}

/// Totally ordered energy value used by the enumeration oracles.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum EnergyKey {
    Units(i64),
    Real(f64),
}

/// Rounds to five decimals with ties going to the even neighbour, treating
/// the input as the decimal number its shortest representation spells.
pub fn round_half_even_5(value: f64) -> f64 {
    if !value.is_finite() {
        return value;
    }
    let text = format!("{}", value.abs());
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text.as_str(), ""),
    };
    let mut frac: Vec<u8> = frac_part.bytes().map(|b| b - b'0').collect();
    frac.resize(frac.len().max(5), 0);
    let kept: i64 = frac[..5].iter().fold(0, |acc, &d| acc * 10 + d as i64);
    let int_val: i64 = int_part.parse().unwrap_or(0);
    let mut units = int_val * 100_000 + kept;
    let rest = &frac[5..];
    if let Some((&first, tail)) = rest.split_first() {
        let round_up = match first.cmp(&5) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => tail.iter().any(|&d| d != 0) || units % 2 == 1,
        };
        if round_up {
            units += 1;
        }
    }
    let magnitude = units as f64 / 100_000.0;
    if value < 0.0 && units != 0 {
        -magnitude
    } else {
        magnitude
    }
}
