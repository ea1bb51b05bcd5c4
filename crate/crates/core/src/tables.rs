//! Boundary strata tables: for each parabolic `Q`, the double coset sets `W_{QΣ}` and
//! the degree shifts `(q'_w, q_w)` attached to every stratum `Σ`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::roots::{degree_stats, double_cosets, weyl_group, ParabolicType, WeylElement};
use crate::{Error, Result};

/// Version tag carried by the JSON rendering.
pub const TABLE_SCHEMA: &str = "gsp4.tables.v1";

/// Row order of the strata column (`W_{QΣ}` lists).
pub const STRATA_ORDER: [WeylElement; 8] = [
    WeylElement::ID,
    WeylElement::NEG_ID,
    WeylElement::S1,
    WeylElement::NEG_S1,
    WeylElement::S2,
    WeylElement::NEG_S2,
    WeylElement::S1S2,
    WeylElement::S2S1,
];

/// Strata appear in the order Siegel, Klingen, Borel.
pub const SIGMA_ORDER: [ParabolicType; 3] =
    [ParabolicType::Siegel, ParabolicType::Klingen, ParabolicType::Borel];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRow {
    pub sigma: String,
    pub roots: Vec<String>,
    pub representatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub w: String,
    pub q_prime: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTable {
    pub sigma: String,
    pub rows: Vec<DegreeRow>,
}

/// `w_{Σ,q}` for `q = 1..4` and the two maximal strata (Borel `Q` only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorRow {
    pub q: usize,
    pub siegel: String,
    pub klingen: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSet {
    pub schema: String,
    pub parabolic: String,
    pub strata: Vec<StratumRow>,
    pub degrees: Vec<DegreeTable>,
    pub selector: Option<Vec<SelectorRow>>,
}

/// Computes every table for `Q`. Degree rows follow the class labels in table order.
pub fn build_tables(q: ParabolicType) -> Result<TableSet> {
    if q == ParabolicType::Full {
        return Err(Error::InvalidInput("tables are defined for B, P and P* only".into()));
    }
    let mut strata = Vec::new();
    let mut degrees = Vec::new();
    for sigma in SIGMA_ORDER {
        let classes = double_cosets(q, sigma);
        let mut labels: Vec<WeylElement> = classes.iter().map(|c| c.label).collect();
        labels.sort_by_key(|w| STRATA_ORDER.iter().position(|x| x == w));
        strata.push(StratumRow {
            sigma: sigma.short_name().to_string(),
            roots: sigma.positive_unipotent_roots().iter().map(|r| r.name().to_string()).collect(),
            representatives: labels.iter().map(|w| w.name().to_string()).collect(),
        });
        let rows = classes
            .iter()
            .map(|c| {
                let (q_prime, q_full) = degree_stats(q, sigma, c.label);
                DegreeRow { w: c.label.name().to_string(), q_prime, q: q_full }
            })
            .collect();
        degrees.push(DegreeTable { sigma: sigma.short_name().to_string(), rows });
    }
    let selector = if q == ParabolicType::Borel {
        let mut rows = Vec::new();
        for deg in 1..=4 {
            let pick = |sigma: ParabolicType| -> Result<String> {
                selector_element(sigma, deg).map(|w| w.name().to_string())
            };
            rows.push(SelectorRow {
                q: deg,
                siegel: pick(ParabolicType::Siegel)?,
                klingen: pick(ParabolicType::Klingen)?,
            });
        }
        Some(rows)
    } else {
        None
    };
    Ok(TableSet {
        schema: TABLE_SCHEMA.to_string(),
        parabolic: q.short_name().to_string(),
        strata,
        degrees,
        selector,
    })
}

/// The unique `w ∈ W_{BΣ}` with `n_w = q − 1`, for `Σ` maximal and `1 ≤ q ≤ 4`.
pub fn selector_element(sigma: ParabolicType, q: usize) -> Result<WeylElement> {
    if !matches!(sigma, ParabolicType::Siegel | ParabolicType::Klingen) || !(1..=4).contains(&q) {
        return Err(Error::InvalidInput(format!("no selector for ({sigma}, {q})")));
    }
    let hits: Vec<WeylElement> = double_cosets(ParabolicType::Borel, sigma)
        .into_iter()
        .map(|c| c.label)
        .filter(|&w| degree_stats(ParabolicType::Borel, sigma, w).0 + 1 == q)
        .collect();
    match hits.as_slice() {
        [w] => Ok(*w),
        _ => Err(Error::InvalidInput(format!("selector for ({sigma}, {q}) is not unique"))),
    }
}

/// Checks that the named elements `−s1 = s2s1s2` and `−s2 = s1s2s1` give `n_w = 4 − length(w)`
/// on the Borel stratum of the Borel table.
pub fn validate_named_elements() -> bool {
    let words_ok = WeylElement::from_word(&[2, 1, 2]).ok() == Some(WeylElement::NEG_S1)
        && WeylElement::from_word(&[1, 2, 1]).ok() == Some(WeylElement::NEG_S2);
    words_ok
        && weyl_group().into_iter().all(|w| {
            let (qp, qf) = degree_stats(ParabolicType::Borel, ParabolicType::Borel, w);
            qp == qf && qp == 4 - w.length()
        })
}

/// Tab-separated rendering, byte-stable across runs.
pub fn render_tsv(t: &TableSet) -> String {
    let mut s = String::new();
    let borel = t.parabolic == "B";
    writeln!(s, "# Q = {}", t.parabolic).unwrap();
    writeln!(s, "## strata").unwrap();
    writeln!(s, "Sigma\tR_Sigma\tW_QSigma").unwrap();
    for row in &t.strata {
        writeln!(s, "{}\t{}\t{}", row.sigma, row.roots.join(", "), row.representatives.join(", "))
            .unwrap();
    }
    for table in &t.degrees {
        writeln!(s, "## degrees Sigma = {}", table.sigma).unwrap();
        if borel {
            writeln!(s, "w\tn_w").unwrap();
            for r in &table.rows {
                writeln!(s, "{}\t{}", r.w, r.q).unwrap();
            }
        } else {
            writeln!(s, "w\tq'_w\tq_w").unwrap();
            for r in &table.rows {
                writeln!(s, "{}\t{}\t{}", r.w, r.q_prime, r.q).unwrap();
            }
        }
    }
    if let Some(sel) = &t.selector {
        writeln!(s, "## selector").unwrap();
        writeln!(s, "q\tw_P,q\tw_P*,q").unwrap();
        for r in sel {
            writeln!(s, "{}\t{}\t{}", r.q, r.siegel, r.klingen).unwrap();
        }
    }
    s
}

/// Full TSV output for `Q`.
pub fn emit_tables(q: ParabolicType) -> Result<String> {
    build_tables(q).map(|t| render_tsv(&t))
}

/// Pretty JSON output for `Q`.
pub fn emit_tables_json(q: ParabolicType) -> Result<String> {
    let t = build_tables(q)?;
    serde_json::to_string_pretty(&t).map_err(|e| Error::InvalidInput(e.to_string()))
}
