use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Sample Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two points".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input".into()));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// One scored sentence pair as seen by the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredItem {
    pub system: String,
    pub human: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemRow {
    pub system: String,
    pub count: usize,
    pub human_mean: f64,
    pub bivert_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemReport {
    /// Sorted by system name.
    pub rows: Vec<SystemRow>,
    pub excluded: Option<String>,
    pub pearson: std::result::Result<f64, String>,
}

/// Per-system means and their correlation. Items of the `exclude` system are
/// left out entirely.
pub fn system_level_report(items: &[ScoredItem], exclude: Option<&str>) -> SystemReport {
    let mut groups: BTreeMap<&str, (usize, f64, f64)> = BTreeMap::new();
    for item in items {
        if Some(item.system.as_str()) == exclude {
            continue;
        }
        let g = groups.entry(&item.system).or_default();
        g.0 += 1;
        g.1 += item.human;
        g.2 += item.predicted;
    }
    let rows: Vec<SystemRow> = groups
        .into_iter()
        .map(|(system, (count, h, p))| SystemRow {
            system: system.to_string(),
            count,
            human_mean: h / count as f64,
            bivert_mean: p / count as f64,
        })
        .collect();
    let human: Vec<f64> = rows.iter().map(|r| r.human_mean).collect();
    let bivert: Vec<f64> = rows.iter().map(|r| r.bivert_mean).collect();
    SystemReport {
        pearson: pearson(&human, &bivert).map_err(|e| e.to_string()),
        excluded: exclude.map(str::to_string),
        rows,
    }
}

impl SystemReport {
    /// Tab-separated rows, then a `PEARSON` line (`n/a` plus the reason when
    /// undefined). An excluded system is noted in a leading comment.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(ex) = &self.excluded {
            let _ = writeln!(out, "# excluded system: {ex}");
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{:.6}\t{:.6}", r.system, r.human_mean, r.bivert_mean);
        }
        match &self.pearson {
            Ok(r) => {
                let _ = writeln!(out, "PEARSON\t{r:.6}");
            }
            Err(why) => {
                let _ = writeln!(out, "PEARSON\tn/a\t{why}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn item(system: &str, human: f64, predicted: f64) -> ScoredItem {
        ScoredItem {
            system: system.into(),
            human,
            predicted,
        }
    }

    #[test]
    fn exact_extremes() {
        let a = [0.3, 1.7, -2.2, 5.0, 0.01];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(pearson(&a, &a).unwrap(), 1.0);
        assert_eq!(pearson(&a, &neg).unwrap(), -1.0);
    }

    #[test]
    fn three_points() {
        // sxy = 3, sxx = 2, syy = 14/3
        let expected = 3.0 / (2.0f64 * 14.0 / 3.0).sqrt();
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.981_980_506).abs() < 1e-9);
    }

    #[test]
    fn undefined_cases() {
        assert!(matches!(
            pearson(&[1.0, 1.0], &[2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(matches!(pearson(&[1.0], &[2.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(pearson(&[1.0, 2.0], &[2.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn two_systems_correlate_perfectly() {
        let items = [item("a", 9.0, 0.4), item("a", 9.0, 0.6), item("b", 10.0, 0.6)];
        let report = system_level_report(&items, None);
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].bivert_mean, 0.5);
        assert_eq!(report.pearson, Ok(1.0));
        assert_eq!(
            report.render(),
            "a\t9.000000\t0.500000\nb\t10.000000\t0.600000\nPEARSON\t1.000000\n"
        );
    }

    #[test]
    fn single_system_is_not_applicable() {
        let items = [item("a", 1.0, 1.0), item("refB", 2.0, 0.0), item("a", 1.0, 1.0)];
        let report = system_level_report(&items, Some("refB"));
        assert_eq!(report.rows.len(), 1);
        let text = report.render();
        assert!(text.starts_with("# excluded system: refB\n"));
        assert!(text.contains("PEARSON\tn/a\t"));
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30),
            alpha in 0.01f64..100.0,
            beta in -100.0f64..100.0,
        ) {
            let a: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let b: Vec<f64> = pts.iter().map(|p| p.1).collect();
            if let Ok(r) = pearson(&a, &b) {
                prop_assert!((-1.0..=1.0).contains(&r));
                prop_assert!((pearson(&b, &a).unwrap() - r).abs() < 1e-12);
                let scaled: Vec<f64> = b.iter().map(|v| alpha * v + beta).collect();
                prop_assert!((pearson(&a, &scaled).unwrap() - r).abs() < 1e-9);
            }
        }
    }
}
