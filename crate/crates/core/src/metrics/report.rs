use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::scenario::{ScenarioConfig, ScenarioMode};
use super::{fmr, fnmr, mmpmr, threshold_at_fmr, MetricsError, MmpmrRule, Result, ScoreSet};

/// Rates at the operating threshold of one (system, scenario) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub threshold: f64,
    pub target_fmr: f64,
    pub rule: MmpmrRule,
    pub fmr_at_threshold: f64,
    pub fnmr_at_threshold: f64,
    pub mmpmr: f64,
    pub n_genuine: usize,
    pub n_impostor: usize,
    pub n_morphs: usize,
    pub n_morph_comparisons: usize,
}

/// Picks the threshold where the bona fide FMR meets the target and reports
/// FMR, FNMR and MMPMR there.
pub fn evaluate(set: &ScoreSet, config: &ScenarioConfig) -> Result<EvalReport> {
    config.validate()?;
    let threshold = threshold_at_fmr(&set.impostor, config.target_fmr)?;
    Ok(EvalReport {
        threshold,
        target_fmr: config.target_fmr,
        rule: config.rule,
        fmr_at_threshold: fmr(&set.impostor, threshold)?,
        fnmr_at_threshold: fnmr(&set.genuine, threshold)?,
        mmpmr: mmpmr(&set.morph_attacks, threshold, config.rule)?,
        n_genuine: set.genuine.len(),
        n_impostor: set.impostor.len(),
        n_morphs: set.n_morphs(),
        n_morph_comparisons: set.morph_attacks.len(),
    })
}

/// One evaluated cell with its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub tool: String,
    pub model: String,
    pub dataset: String,
    pub mode: ScenarioMode,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

/// Percentage with one decimal, rounding half away from zero.
pub fn format_percent(rate: f64) -> String {
    let tenths = (rate * 1000.0).round();
    format!("{:.1}", tenths / 10.0)
}

/// `"refs | probes"` cell; a missing side prints as `-`.
pub fn format_cell(refs: Option<f64>, probes: Option<f64>) -> String {
    let side = |v: Option<f64>| v.map(format_percent).unwrap_or_else(|| "-".into());
    format!("{} | {}", side(refs), side(probes))
}

const CSV_HEADER: &str = "tool,model,dataset,mode,threshold,fmr,fnmr,mmpmr,n_morphs";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sorted(entries: &[ReportEntry]) -> Vec<&ReportEntry> {
    let mut v: Vec<&ReportEntry> = entries.iter().collect();
    v.sort_by(|a, b| {
        (&a.tool, &a.model, &a.dataset, a.mode).cmp(&(&b.tool, &b.model, &b.dataset, b.mode))
    });
    v
}

/// Renders reports as CSV (`tool,model,dataset,mode,threshold,fmr,fnmr,mmpmr,n_morphs`)
/// or as an aligned table with one row per (tool, model) and a
/// `refs | probes` MMPMR column per dataset.
pub fn emit_report(entries: &[ReportEntry], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for e in sorted(entries) {
                let r = &e.report;
                writeln!(
                    out,
                    "{},{},{},{},{:?},{:?},{:?},{:?},{}",
                    csv_field(&e.tool),
                    csv_field(&e.model),
                    csv_field(&e.dataset),
                    e.mode,
                    r.threshold,
                    r.fmr_at_threshold,
                    r.fnmr_at_threshold,
                    r.mmpmr,
                    r.n_morphs
                )
                .unwrap();
            }
            out
        }
        ReportFormat::Text => text_table(entries),
    }
}

fn text_table(entries: &[ReportEntry]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    for e in entries {
        if !datasets.contains(&e.dataset.as_str()) {
            datasets.push(&e.dataset);
        }
    }
    type Cell = (Option<f64>, Option<f64>);
    let mut grid: BTreeMap<(&str, &str), BTreeMap<&str, Cell>> = BTreeMap::new();
    for e in entries {
        let cell = grid
            .entry((&e.tool, &e.model))
            .or_default()
            .entry(&e.dataset)
            .or_default();
        match e.mode {
            ScenarioMode::MorphsAsReferences => cell.0 = Some(e.report.mmpmr),
            ScenarioMode::MorphsAsProbes => cell.1 = Some(e.report.mmpmr),
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Tool".to_string(), "FRS".to_string()];
    header.extend(datasets.iter().map(|d| d.to_string()));
    rows.push(header);
    for ((tool, model), cells) in &grid {
        let mut r = vec![tool.to_string(), model.to_string()];
        for d in &datasets {
            let (a, b) = cells.get(d).copied().unwrap_or_default();
            r.push(format_cell(a, b));
        }
        rows.push(r);
    }

    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();

    let mut targets: Vec<String> = entries.iter().map(|e| format_percent(e.report.target_fmr)).collect();
    targets.sort();
    targets.dedup();
    let mut rules: Vec<String> = entries.iter().map(|e| e.report.rule.to_string()).collect();
    rules.sort();
    rules.dedup();
    let target = if targets.is_empty() {
        format_percent(super::DEFAULT_TARGET_FMR)
    } else {
        targets.join("/")
    };
    let rule = if rules.is_empty() {
        MmpmrRule::default().to_string()
    } else {
        rules.join("/")
    };

    let mut out = String::new();
    writeln!(out, "MMPMR @ FMR = {target}% (Morphs as references | Morphs as probes) [%]").unwrap();
    writeln!(
        out,
        "rule: {rule}; scores are cosine similarities, accepted when score >= threshold"
    )
    .unwrap();
    for (i, r) in rows.iter().enumerate() {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c < 2 {
                    format!("{:<w$}", s, w = widths[c])
                } else {
                    format!("{:^w$}", s, w = widths[c])
                }
            })
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (ncol - 1);
            writeln!(out, "{}", "-".repeat(total)).unwrap();
        }
    }
    out
}

/// Reads report CSV rows back into entries. Only the columns of the CSV are
/// recovered; counts other than `n_morphs` come back as zero and the rule
/// and target are taken from the caller.
pub fn read_report_csv(path: &Path, target_fmr: f64, rule: MmpmrRule) -> Result<Vec<ReportEntry>> {
    let bad = |what: &'static str, value: String| MetricsError::InvalidValue { what, value };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad("report file", e.to_string()))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad("report row", e.to_string()))?;
        if rec.len() != 9 {
            return Err(bad("report row", format!("{rec:?}")));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| bad("report number", rec[i].to_string()))
        };
        out.push(ReportEntry {
            tool: rec[0].to_string(),
            model: rec[1].to_string(),
            dataset: rec[2].to_string(),
            mode: rec[3].parse()?,
            report: EvalReport {
                threshold: num(4)?,
                target_fmr,
                rule,
                fmr_at_threshold: num(5)?,
                fnmr_at_threshold: num(6)?,
                mmpmr: num(7)?,
                n_genuine: 0,
                n_impostor: 0,
                n_morphs: rec[8]
                    .parse()
                    .map_err(|_| bad("n_morphs", rec[8].to_string()))?,
                n_morph_comparisons: 0,
            },
        });
    }
    Ok(out)
}
