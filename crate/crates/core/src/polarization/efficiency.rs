//! Conversion efficiency versus pump power, η_max·sin²(√(η_nor·P)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCurveParams {
    pub eta_max: f64,
    /// Per mW.
    pub eta_nor: f64,
}

impl EfficiencyCurveParams {
    pub fn new(eta_max: f64, eta_nor: f64) -> Result<Self> {
        if !(eta_max > 0.0 && eta_max.is_finite() && eta_nor > 0.0 && eta_nor.is_finite()) {
            return Err(Error::domain(format!(
                "efficiency parameters must be positive, got ({eta_max}, {eta_nor})"
            )));
        }
        Ok(Self { eta_max, eta_nor })
    }

    /// Pump power of the first maximum, (π/2)²/η_nor.
    pub fn peak_power_mw(&self) -> f64 {
        std::f64::consts::FRAC_PI_2.powi(2) / self.eta_nor
    }
}

pub fn efficiency_model(power_mw: f64, params: &EfficiencyCurveParams) -> f64 {
    if power_mw <= 0.0 {
        return 0.0;
    }
    let s = (params.eta_nor * power_mw).sqrt().sin();
    params.eta_max * s * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyFit {
    pub params: EfficiencyCurveParams,
    /// √Σ residual².
    pub residual_norm: f64,
    pub iterations: usize,
}

const GRID_POINTS: usize = 2000;
const MAX_ITERATIONS: usize = 200;

fn shape(nor: f64, p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        let s = (nor * p).sqrt().sin();
        s * s
    }
}

/// Best amplitude for a fixed `nor` and the resulting squared residual.
fn profile(data: &[(f64, f64)], nor: f64) -> (f64, f64) {
    let (mut sy, mut ss) = (0.0, 0.0);
    for &(p, y) in data {
        let s = shape(nor, p);
        sy += s * y;
        ss += s * s;
    }
    let amp = if ss > 0.0 { sy / ss } else { 0.0 };
    (amp, ssr(data, amp, nor))
}

fn ssr(data: &[(f64, f64)], amp: f64, nor: f64) -> f64 {
    data.iter().map(|&(p, y)| (y - amp * shape(nor, p)).powi(2)).sum()
}

/// Least-squares fit of `(P_mW, η)` samples.
///
/// The amplitude is eliminated in closed form; the rate is located on a
/// logarithmic grid limited to at most one full period across the data,
/// refined by golden-section search and finished with Levenberg–Marquardt on
/// both parameters.
pub fn fit_efficiency(data: &[(f64, f64)]) -> Result<EfficiencyFit> {
    if data.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 samples, got {}", data.len())));
    }
    if data.iter().any(|&(p, y)| !p.is_finite() || !y.is_finite() || p < 0.0) {
        return Err(Error::domain("samples must be finite with non-negative power"));
    }
    if data.iter().all(|&(_, y)| y == 0.0) {
        return Err(Error::Degenerate("all efficiencies are zero".into()));
    }
    let p_max = data.iter().map(|d| d.0).fold(0.0, f64::max);
    let mut distinct: Vec<f64> = data.iter().map(|d| d.0).filter(|&p| p > 0.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Degenerate("need at least two distinct non-zero pump powers".into()));
    }

    let hi = (2.0 * std::f64::consts::PI).powi(2) / p_max;
    let (log_lo, log_hi) = ((hi * 1e-4).ln(), hi.ln());
    let at = |k: usize| (log_lo + (log_hi - log_lo) * k as f64 / (GRID_POINTS - 1) as f64).exp();
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..GRID_POINTS {
        let v = profile(data, at(k)).1;
        if v < best_val {
            best_val = v;
            best = k;
        }
    }

    // Golden section in log(nor) over the neighbouring grid cells.
    let mut a = at(best.saturating_sub(1)).ln();
    let mut b = at((best + 1).min(GRID_POINTS - 1)).ln();
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| profile(data, x.exp()).1;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while (b - a).abs() > 1e-13 && iterations < MAX_ITERATIONS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let mut nor = (0.5 * (a + b)).exp();
    let mut amp = profile(data, nor).0;
    let mut cost = ssr(data, amp, nor);

    // Levenberg–Marquardt polish on (amp, nor).
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for &(p, y) in data {
            let s = shape(nor, p);
            let ds = if p > 0.0 {
                let u = (nor * p).sqrt();
                (2.0 * u).sin() * p / (2.0 * u)
            } else {
                0.0
            };
            let j = [s, amp * ds];
            let r = y - amp * s;
            for i in 0..2 {
                jtr[i] += j[i] * r;
                for k in 0..2 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        let grad = (jtr[0].powi(2) + jtr[1].powi(2)).sqrt();
        if grad <= 1e-15 * (1.0 + cost) {
            converged = true;
            break;
        }
        let mut step_taken = false;
        while lambda < 1e12 {
            let a11 = jtj[0][0] * (1.0 + lambda);
            let a22 = jtj[1][1] * (1.0 + lambda);
            let det = a11 * a22 - jtj[0][1] * jtj[1][0];
            if det.abs() < f64::MIN_POSITIVE {
                lambda *= 10.0;
                continue;
            }
            let da = (a22 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let dn = (a11 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            let (na, nn) = (amp + da, nor + dn);
            if nn > 0.0 {
                let nc = ssr(data, na, nn);
                if nc <= cost {
                    let small = da.abs() <= 1e-14 * amp.abs() && dn.abs() <= 1e-14 * nor;
                    amp = na;
                    nor = nn;
                    let gain = cost - nc;
                    cost = nc;
                    lambda = (lambda / 10.0).max(1e-12);
                    step_taken = true;
                    if small || gain <= 1e-16 * cost.max(1e-300) {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !step_taken {
            // No downhill step at any damping: the current point is a minimum to working precision.
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations,
            reason: "efficiency fit did not settle".into(),
        });
    }
    if !(amp > 0.0) {
        return Err(Error::Degenerate("data do not rise with pump power".into()));
    }
    Ok(EfficiencyFit {
        params: EfficiencyCurveParams {
            eta_max: amp,
            eta_nor: nor,
        },
        residual_norm: cost.sqrt(),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSplit {
    pub p_ccw_mw: f64,
    pub p_cw_mw: f64,
    pub efficiency_ccw: f64,
    pub efficiency_cw: f64,
    /// False when no split equalizes the arms and the closest one is returned.
    pub balanced: bool,
}

const SPLIT_GRID: usize = 2000;

/// Divides `total_mw` between the two arms so their efficiencies match.
///
/// Every sign change of the efficiency gap on a dense grid of split ratios is
/// refined by bisection; among the roots the one with the highest common
/// efficiency wins.
pub fn pump_balance(
    ccw: &EfficiencyCurveParams,
    cw: &EfficiencyCurveParams,
    total_mw: f64,
) -> Result<PumpSplit> {
    if !(total_mw >= 0.0 && total_mw.is_finite()) {
        return Err(Error::domain(format!("total pump power must be non-negative, got {total_mw}")));
    }
    let split = |r: f64| {
        let (a, b) = (r * total_mw, (1.0 - r) * total_mw);
        let (ea, eb) = (efficiency_model(a, ccw), efficiency_model(b, cw));
        PumpSplit {
            p_ccw_mw: a,
            p_cw_mw: b,
            efficiency_ccw: ea,
            efficiency_cw: eb,
            balanced: true,
        }
    };
    if total_mw == 0.0 {
        return Ok(split(0.0));
    }
    let gap = |r: f64| {
        let s = split(r);
        s.efficiency_ccw - s.efficiency_cw
    };
    let ratio = |k: usize| k as f64 / SPLIT_GRID as f64;

    let mut roots = Vec::new();
    let mut prev = gap(ratio(0));
    for k in 1..=SPLIT_GRID {
        let (r0, r1) = (ratio(k - 1), ratio(k));
        let cur = gap(r1);
        if cur == 0.0 && k < SPLIT_GRID {
            roots.push(r1);
        } else if prev * cur < 0.0 {
            let (mut lo, mut hi, mut glo) = (r0, r1, prev);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = gap(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let r = if gap(lo).abs() <= gap(hi).abs() { lo } else { hi };
            roots.push(r);
        }
        prev = cur;
    }
    let interior: Vec<f64> = roots.into_iter().filter(|&r| r > 0.0 && r < 1.0).collect();
    if let Some(best) = interior
        .iter()
        .map(|&r| split(r))
        .filter(|s| (s.efficiency_ccw - s.efficiency_cw).abs() <= 1e-9)
        .max_by(|a, b| (a.efficiency_ccw + a.efficiency_cw).total_cmp(&(b.efficiency_ccw + b.efficiency_cw)))
    {
        return Ok(best);
    }
    let closest = (1..SPLIT_GRID)
        .map(ratio)
        .min_by(|&a, &b| gap(a).abs().total_cmp(&gap(b).abs()))
        .unwrap_or(0.5);
    Ok(PumpSplit {
        balanced: false,
        ..split(closest)
    })
}
