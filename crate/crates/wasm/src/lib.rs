//! Browser bindings for three analyses of a two-type mix with exponential
//! type-1 jobs: ATIR by window, response-time tails and mean improvement by
//! load. Results are JSON strings; errors are plain messages.

use nudgem::asymptotics::{atir_nudge_m, m_opt};
use nudgem::fluid::FLUID_CAP;
use nudgem::report::{self, MixTemplate, Table};
use nudgem::{decay_rate, SizeShape};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest window plotted by the ATIR view.
pub const WINDOW_PLOT_MAX: u32 = 60;
/// Largest number of points on a curve.
pub const CURVE_POINTS_MAX: u32 = 400;

/// Shape with the given squared coefficient of variation: exponential at 1,
/// balanced hyperexponential above, Erlang with the nearest stage count below.
pub fn shape_for_scv(scv: f64) -> Result<SizeShape, String> {
    if !(scv.is_finite() && scv > 0.0) {
        return Err(format!("SCV must be positive, got {scv}"));
    }
    if (scv - 1.0).abs() < 1e-9 {
        Ok(SizeShape::Exp)
    } else if scv > 1.0 {
        Ok(SizeShape::Hyperexp { scv, f: 0.5 })
    } else {
        let stages = (1.0 / scv).round() as usize;
        if stages > 20 {
            return Err(format!("SCV {scv} needs more than 20 Erlang stages"));
        }
        Ok(SizeShape::Erlang { stages })
    }
}

fn template(p: f64, ratio: f64, scv2: f64) -> Result<MixTemplate, String> {
    Ok(MixTemplate { p, ratio, shape1: SizeShape::Exp, shape2: shape_for_scv(scv2)? })
}

#[derive(Debug, Serialize)]
struct WindowCurve {
    m: Vec<u32>,
    atir: Vec<f64>,
    m_opt: usize,
}

#[derive(Debug, Serialize)]
struct Columns {
    m: Option<usize>,
    columns: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl Columns {
    fn from_table(m: Option<usize>, table: &Table) -> Self {
        let data = table.columns.iter().map(|c| table.column(c).unwrap_or_default()).collect();
        Self { m, columns: table.columns.clone(), data }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// ATIR of Nudge-M for `m = 0..=m_max` together with the optimal window.
#[wasm_bindgen]
pub fn window_curve(p: f64, ratio: f64, lambda: f64, scv2: f64, m_max: u32) -> Result<String, String> {
    if m_max > WINDOW_PLOT_MAX {
        return Err(format!("window limit {m_max} exceeds {WINDOW_PLOT_MAX}"));
    }
    let mix = template(p, ratio, scv2)?.at(lambda).map_err(|e| e.to_string())?;
    let info = decay_rate(&mix).map_err(|e| e.to_string())?;
    let m: Vec<u32> = (0..=m_max).collect();
    let atir = m.iter().map(|&m| atir_nudge_m(&info, m as usize)).collect();
    json(&WindowCurve { m, atir, m_opt: m_opt(&info) })
}

/// Waiting and response tails of both types and TIR(t) on `points` times in
/// `[0, t_max]`. A missing window means the optimal one.
#[wasm_bindgen]
pub fn tail_curve(p: f64, ratio: f64, lambda: f64, scv2: f64, m: Option<u32>, t_max: f64, points: u32) -> Result<String, String> {
    if !(2..=CURVE_POINTS_MAX).contains(&points) || !(t_max.is_finite() && t_max > 0.0) {
        return Err(format!("need 2..={CURVE_POINTS_MAX} points over a positive range"));
    }
    let mix = template(p, ratio, scv2)?.at(lambda).map_err(|e| e.to_string())?;
    let m = match m {
        Some(m) => m as usize,
        None => m_opt(&decay_rate(&mix).map_err(|e| e.to_string())?),
    };
    if m > FLUID_CAP {
        return Err(format!("window {m} exceeds the tail-curve limit {FLUID_CAP}"));
    }
    let times: Vec<f64> = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
    let table = report::distribution(&mix, m, &times).map_err(|e| e.to_string())?;
    json(&Columns::from_table(Some(m), &table))
}

/// Mean response of FCFS, Nudge-M and priority with both MTIRs on `points`
/// loads in `[lo, hi]`. A missing window means the optimal one at each load.
#[wasm_bindgen]
pub fn mean_curve(p: f64, ratio: f64, scv2: f64, m: Option<u32>, lo: f64, hi: f64, points: u32) -> Result<String, String> {
    if !(2..=CURVE_POINTS_MAX).contains(&points) || !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(format!("need 2..={CURVE_POINTS_MAX} points with 0 < lo < hi < 1"));
    }
    let lambdas: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let window = m.map(|m| m as usize);
    let table = report::mean_by_load(&template(p, ratio, scv2)?, window, &lambdas).map_err(|e| e.to_string())?;
    json(&Columns::from_table(window, &table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_follow_the_scv() {
        assert_eq!(shape_for_scv(1.0).unwrap(), SizeShape::Exp);
        assert_eq!(shape_for_scv(0.5).unwrap(), SizeShape::Erlang { stages: 2 });
        assert_eq!(shape_for_scv(2.0).unwrap(), SizeShape::Hyperexp { scv: 2.0, f: 0.5 });
        assert!(shape_for_scv(0.0).is_err());
        assert!(shape_for_scv(0.01).is_err());
    }
}
