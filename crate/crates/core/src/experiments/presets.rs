//! Named configurations for the `fig*` and `table1-*` presets.

use crate::env_model::EnvSpec;

/// A single-run figure configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub spec: EnvSpec,
    pub n: usize,
}

pub const FIGURE_PRESETS: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

pub const TABLE1_PRESETS: [&str; 5] =
    ["table1-kappa0.6", "table1-kappa0.75", "table1-kappa1", "table1-kappa2", "table1-kappa3"];

pub fn figure_preset(name: &str) -> Option<FigurePreset> {
    let (spec, n) = match name {
        "fig1" => (EnvSpec::beta(3.0, 3.0), 500),
        "fig2" => (EnvSpec::beta(3.5, 3.0), 500),
        "fig3" => (EnvSpec::beta(4.0, 3.0), 500),
        "fig4" => (EnvSpec::beta(6.0, 3.0), 500),
        "fig5" => (EnvSpec::uniform(0.3, 0.9), 10_000),
        "fig6" => (EnvSpec::discrete(vec![(0.3, 0.4), (0.7, 0.7)]), 10_000),
        _ => return None,
    };
    Some(FigurePreset { name: FIGURE_PRESETS.iter().find(|p| **p == name)?, spec: spec.expect("valid preset"), n })
}

/// `(spec, n_values)` of a `table1-*` preset: `Beta(3 + κ, 3)` at `n = 100·2^k`.
pub fn table1_preset(name: &str) -> Option<(EnvSpec, Vec<usize>)> {
    let (kappa, k_max) = match name {
        "table1-kappa0.6" => (0.6, 5),
        "table1-kappa0.75" => (0.75, 7),
        "table1-kappa1" => (1.0, 7),
        "table1-kappa2" => (2.0, 7),
        "table1-kappa3" => (3.0, 7),
        _ => return None,
    };
    let n_values = (0..=k_max).map(|k| 100usize << k).collect();
    Some((EnvSpec::beta(3.0 + kappa, 3.0).expect("valid preset"), n_values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env_model::Regime;

    #[test]
    fn all_presets_resolve() {
        for name in FIGURE_PRESETS {
            assert_eq!(figure_preset(name).unwrap().name, name);
        }
        for name in TABLE1_PRESETS {
            let (spec, ns) = table1_preset(name).unwrap();
            let kappa: f64 = name.trim_start_matches("table1-kappa").parse().unwrap();
            match spec.solve_kappa().unwrap() {
                Regime::TransientRight { kappa: k, .. } => assert!((k - kappa).abs() < 1e-9),
                other => panic!("{other:?}"),
            }
            assert_eq!(ns[0], 100);
        }
        assert_eq!(table1_preset("table1-kappa0.6").unwrap().1.last(), Some(&3200));
        assert_eq!(table1_preset("table1-kappa1").unwrap().1.last(), Some(&12800));
        assert!(figure_preset("fig7").is_none());
    }
}
