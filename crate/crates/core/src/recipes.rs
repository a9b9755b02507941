//! Registry of named parameter sets that regenerate the published curves.

use serde::Serialize;

use crate::asymptotics::decay_rate;
use crate::error::{Error, Result};
use crate::phtype::SizeShape;
use crate::report::{self, MixTemplate, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecipeKind {
    Atir,
    Dist,
    Mean,
}

#[derive(Debug, Clone, Copy)]
pub struct Recipe {
    pub name: &'static str,
    pub kind: RecipeKind,
    pub summary: &'static str,
    run: fn() -> Result<Table>,
}

impl Recipe {
    pub fn run(&self) -> Result<Table> {
        (self.run)()
    }
}

const HE2: SizeShape = SizeShape::Hyperexp { scv: 2.0, f: 0.5 };

fn exp_exp(p: f64, ratio: f64) -> MixTemplate {
    MixTemplate { p, ratio, shape1: SizeShape::Exp, shape2: SizeShape::Exp }
}

fn exp_he(p: f64, ratio: f64) -> MixTemplate {
    MixTemplate { p, ratio, shape1: SizeShape::Exp, shape2: HE2 }
}

/// `from, from + step, ...` up to and including `to` (within rounding).
pub fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| from + step * i as f64).collect()
}

fn load_grid() -> Vec<f64> {
    grid(0.05, 0.95, 0.05)
}

fn heavy_grid() -> Vec<f64> {
    let mut g = grid(0.5, 0.98, 0.02);
    g.extend([0.99, 0.995, 0.999]);
    g
}

fn tir_times(template: &MixTemplate) -> Result<Vec<f64>> {
    let theta = decay_rate(&template.at(0.7)?)?.theta_z;
    Ok(grid(0.0, 60.0, 0.5).into_iter().map(|k| k / theta).collect())
}

fn fig2() -> Result<Table> {
    report::atir_contour(0.9, SizeShape::Exp, SizeShape::Exp, &load_grid(), &grid(1.5, 10.0, 0.5))
}

fn fig5a() -> Result<Table> {
    report::atir_by_window(&exp_exp(2.0 / 3.0, 4.0).at(0.7)?, 20)
}

fn fig5b() -> Result<Table> {
    report::atir_by_window(&exp_he(2.0 / 3.0, 4.0).at(0.7)?, 20)
}

fn fig6a() -> Result<Table> {
    report::atir_heavy(&exp_exp(2.0 / 3.0, 4.0), &heavy_grid())
}

fn fig6b() -> Result<Table> {
    report::atir_heavy(&exp_he(2.0 / 3.0, 4.0), &heavy_grid())
}

fn fig7a() -> Result<Table> {
    report::atir_family(&exp_exp(2.0 / 3.0, 4.0), &load_grid())
}

fn fig7b() -> Result<Table> {
    report::atir_family(&exp_exp(0.9, 10.0), &load_grid())
}

fn fig8a() -> Result<Table> {
    report::mtir_comparison(&exp_exp(2.0 / 3.0, 4.0), 20, &load_grid())
}

fn fig8b() -> Result<Table> {
    report::mtir_comparison(&exp_he(2.0 / 3.0, 4.0), 20, &load_grid())
}

fn fig9a() -> Result<Table> {
    let template = exp_exp(2.0 / 3.0, 4.0);
    report::distribution(&template.at(0.7)?, 5, &tir_times(&template)?)
}

fn fig9b() -> Result<Table> {
    let template = exp_he(2.0 / 3.0, 4.0);
    report::distribution(&template.at(0.7)?, 7, &tir_times(&template)?)
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "fig2",
        kind: RecipeKind::Atir,
        summary: "Nudge-K and Nudge-M at their optimal windows, p = 0.9, exp/exp, load x mean-ratio grid",
        run: fig2,
    },
    Recipe { name: "fig5a", kind: RecipeKind::Atir, summary: "ATIR vs M, exp/exp, ratio 4, p = 2/3, load 0.7", run: fig5a },
    Recipe {
        name: "fig5b",
        kind: RecipeKind::Atir,
        summary: "ATIR vs M, exp/hyperexp(SCV 2, f 1/2), ratio 4, p = 2/3, load 0.7",
        run: fig5b,
    },
    Recipe { name: "fig6a", kind: RecipeKind::Atir, summary: "optimal vs heavy-traffic window, exp/exp", run: fig6a },
    Recipe { name: "fig6b", kind: RecipeKind::Atir, summary: "optimal vs heavy-traffic window, exp/hyperexp", run: fig6b },
    Recipe {
        name: "fig7a",
        kind: RecipeKind::Atir,
        summary: "Nudge-K, L, K,L and M at their best parameters, exp/exp, ratio 4, p = 2/3",
        run: fig7a,
    },
    Recipe {
        name: "fig7b",
        kind: RecipeKind::Atir,
        summary: "Nudge-K, L, K,L and M at their best parameters, exp/exp, ratio 10, p = 0.9",
        run: fig7b,
    },
    Recipe { name: "fig8a", kind: RecipeKind::Mean, summary: "MTIR of Nudge-M (optimal and 20) and priority, exp/exp", run: fig8a },
    Recipe {
        name: "fig8b",
        kind: RecipeKind::Mean,
        summary: "MTIR of Nudge-M (optimal and 20) and priority, exp/hyperexp",
        run: fig8b,
    },
    Recipe { name: "fig9a", kind: RecipeKind::Dist, summary: "tails and TIR(t) of Nudge-5, exp/exp, load 0.7", run: fig9a },
    Recipe {
        name: "fig9b",
        kind: RecipeKind::Dist,
        summary: "tails and TIR(t) of Nudge-7, exp/hyperexp, load 0.7",
        run: fig9b,
    },
];

pub fn lookup(name: &str) -> Result<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name).ok_or_else(|| {
        let known: Vec<_> = RECIPES.iter().map(|r| r.name).collect();
        Error::Input(format!("unknown recipe '{name}' (known: {})", known.join(", ")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argmax(v: &[f64]) -> usize {
        (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.05, 0.95, 0.05);
        assert_eq!(g.len(), 19);
        assert!((g[18] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn fig5a_peaks_at_five() {
        let t = lookup("fig5a").unwrap().run().unwrap();
        let atir = t.column("atir").unwrap();
        assert_eq!(atir[0], 0.0);
        assert_eq!(argmax(&atir), 5);
    }

    #[test]
    fn fig6_has_both_windows() {
        let t = lookup("fig6a").unwrap().run().unwrap();
        assert!(t.column("atir_m_opt").is_some() && t.column("atir_m_heavy").is_some());
        for r in &t.rows {
            assert!(r[2] >= r[4] - 1e-12);
        }
    }

    #[test]
    fn fig8_ordering() {
        for name in ["fig8a", "fig8b"] {
            let t = lookup(name).unwrap().run().unwrap();
            for r in &t.rows {
                assert!(r[4] >= r[2] - 1e-12 && r[2] >= -1e-12, "{name} {r:?}");
            }
        }
    }

    #[test]
    fn fig9a_tir_approaches_atir() {
        let t = lookup("fig9a").unwrap().run().unwrap();
        let mix = exp_exp(2.0 / 3.0, 4.0).at(0.7).unwrap();
        let atir = crate::asymptotics::atir_nudge_m(&decay_rate(&mix).unwrap(), 5);
        let last = t.rows.last().unwrap();
        assert!((last[5] - atir).abs() < 5e-2, "{} vs {atir}", last[5]);
        let first = &t.rows[0];
        assert_eq!(first[0], 0.0);
        assert!(first[5].abs() < 1e-10);
    }

    #[test]
    fn unknown_recipe() {
        assert!(matches!(lookup("fig42"), Err(Error::Input(_))));
    }
}
