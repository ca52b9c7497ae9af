use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::eval::{Slice, SpeakerEvaluation, SpeakerKind};
use crate::error::{Error, Result};
use crate::speaker::Utterance;
use crate::taxonomy::{Taxonomy, ANIMAL};

/// Mean and sample standard deviation over repeats.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    /// Sample std (n - 1 denominator); 0 for a single value.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Stat::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, std }
    }

    /// `self - other` with independent errors.
    pub fn minus(self, other: Stat) -> Stat {
        Stat {
            mean: self.mean - other.mean,
            std: self.std.hypot(other.std),
        }
    }
}

/// `%g`-style rendering with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_fraction(&format!("{x:.*}", (5 - exp) as usize)).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Reports that can be written as CSV or JSON.
pub trait Report: Serialize + DeserializeOwned {
    fn to_csv(&self) -> String;

    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn render(&self, format: ExportFormat) -> Result<String> {
        match format {
            ExportFormat::Csv => Ok(self.to_csv()),
            ExportFormat::Json => self.to_json(),
        }
    }
}

pub fn export(report: &impl Report, format: ExportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report.render(format)?).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub speaker: SpeakerKind,
    pub slice: Slice,
    pub mean: f64,
    pub std: f64,
    /// Accuracy of each repeat.
    pub runs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub n_hard: usize,
    pub n_easy: usize,
    /// Speakers in [`SpeakerKind::ALL`] order, each with Hard, Easy, Combined.
    pub rows: Vec<AccuracyRow>,
}

impl AccuracyReport {
    /// `runs[r]` holds the evaluations of every speaker in repeat `r`.
    pub fn from_runs(runs: &[Vec<SpeakerEvaluation>]) -> Result<Self> {
        let first = runs
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::config("no evaluations to report"))?;
        let mut rows = Vec::new();
        for kind in SpeakerKind::ALL {
            let evals = runs
                .iter()
                .map(|run| {
                    run.iter().find(|e| e.kind == kind).ok_or_else(|| {
                        Error::config(format!("repeat lacks an evaluation of {kind}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            for slice in Slice::ALL {
                let values: Vec<f64> = evals.iter().map(|e| e.accuracy(slice)).collect();
                let stat = Stat::of(&values);
                rows.push(AccuracyRow {
                    speaker: kind,
                    slice,
                    mean: stat.mean,
                    std: stat.std,
                    runs: values,
                });
            }
        }
        Ok(AccuracyReport {
            n_hard: first.counts.hard_total,
            n_easy: first.counts.easy_total,
            rows,
        })
    }

    pub fn get(&self, speaker: SpeakerKind, slice: Slice) -> Stat {
        self.rows
            .iter()
            .find(|r| r.speaker == speaker && r.slice == slice)
            .map(|r| Stat {
                mean: r.mean,
                std: r.std,
            })
            .expect("every speaker and slice is reported")
    }

    pub fn mean(&self, speaker: SpeakerKind, slice: Slice) -> f64 {
        self.get(speaker, slice).mean
    }
}

impl Report for AccuracyReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("speaker,slice,mean,std\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.speaker,
                r.slice.as_str(),
                format_sig6(r.mean),
                format_sig6(r.std)
            );
        }
        out
    }
}

/// Share of content-token occurrences per vocabulary entry.
pub fn token_shares(chosen: &[Utterance], tax: &Taxonomy) -> Vec<f64> {
    let mut counts = vec![0usize; tax.vocab_len()];
    for t in chosen.iter().flat_map(|u| &u.tokens) {
        counts[t.index()] += 1;
    }
    let total: usize = counts.iter().sum();
    counts
        .into_iter()
        .map(|c| {
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TokenShare {
    pub token: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeakerShift {
    pub speaker: SpeakerKind,
    /// Object (hyponym) words among chosen tokens.
    pub hyponym_share: Stat,
    /// Category words among chosen tokens.
    pub hypernym_share: Stat,
    /// Animal names plus the word `animal` among chosen tokens.
    pub animal_token_share: Stat,
    /// Whole vocabulary in id order.
    pub tokens: Vec<TokenShare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub speakers: Vec<SpeakerShift>,
}

impl ShiftReport {
    pub fn from_runs(runs: &[Vec<SpeakerEvaluation>], tax: &Taxonomy) -> Result<Self> {
        let animal = tax.category_id(ANIMAL)?;
        let mut speakers = Vec::new();
        for kind in SpeakerKind::ALL {
            let shares: Vec<Vec<f64>> = runs
                .iter()
                .filter_map(|run| run.iter().find(|e| e.kind == kind))
                .map(|e| token_shares(&e.chosen, tax))
                .collect();
            if shares.is_empty() {
                return Err(Error::config(format!("no evaluations of {kind}")));
            }
            let aggregate = |keep: &dyn Fn(crate::TokenId) -> bool| {
                let per_run: Vec<f64> = shares
                    .iter()
                    .map(|s| {
                        tax.vocabulary()
                            .filter(|&t| keep(t))
                            .map(|t| s[t.index()])
                            .sum()
                    })
                    .collect();
                Stat::of(&per_run)
            };
            let tokens = tax
                .vocabulary()
                .map(|t| {
                    let stat = Stat::of(&shares.iter().map(|s| s[t.index()]).collect::<Vec<_>>());
                    TokenShare {
                        token: tax.name(t).to_string(),
                        mean: stat.mean,
                        std: stat.std,
                    }
                })
                .collect();
            speakers.push(SpeakerShift {
                speaker: kind,
                hyponym_share: aggregate(&|t| !tax.is_hypernym(t)),
                hypernym_share: aggregate(&|t| tax.is_hypernym(t)),
                animal_token_share: aggregate(&|t| tax.parent(t) == animal),
                tokens,
            });
        }
        Ok(ShiftReport { speakers })
    }

    pub fn speaker(&self, kind: SpeakerKind) -> &SpeakerShift {
        self.speakers
            .iter()
            .find(|s| s.speaker == kind)
            .expect("every speaker is reported")
    }
}

impl Report for ShiftReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("speaker,item,mean,std\n");
        for s in &self.speakers {
            let aggregates = [
                ("hyponym_share", s.hyponym_share),
                ("hypernym_share", s.hypernym_share),
                ("animal_token_share", s.animal_token_share),
            ];
            for (name, stat) in aggregates {
                let _ = writeln!(
                    out,
                    "{},{name},{},{}",
                    s.speaker,
                    format_sig6(stat.mean),
                    format_sig6(stat.std)
                );
            }
            for t in &s.tokens {
                let _ = writeln!(
                    out,
                    "{},token:{},{},{}",
                    s.speaker,
                    t.token,
                    format_sig6(t.mean),
                    format_sig6(t.std)
                );
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub slice: Slice,
    /// S1d - S1.
    pub vs_rational: Stat,
    /// S1d - S1nd; expected to be at most zero.
    pub vs_upper: Stat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub rows: Vec<GainRow>,
}

impl GainReport {
    pub fn row(&self, slice: Slice) -> &GainRow {
        self.rows
            .iter()
            .find(|r| r.slice == slice)
            .expect("every slice is reported")
    }
}

pub fn gain_report(acc: &AccuracyReport) -> GainReport {
    let rows = Slice::ALL
        .into_iter()
        .map(|slice| {
            let d = acc.get(SpeakerKind::S1d, slice);
            GainRow {
                slice,
                vs_rational: d.minus(acc.get(SpeakerKind::S1, slice)),
                vs_upper: d.minus(acc.get(SpeakerKind::S1nd, slice)),
            }
        })
        .collect();
    GainReport { rows }
}

impl Report for GainReport {
    fn to_csv(&self) -> String {
        let mut out =
            String::from("slice,vs_rational_mean,vs_rational_std,vs_upper_mean,vs_upper_std\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.slice.as_str(),
                format_sig6(r.vs_rational.mean),
                format_sig6(r.vs_rational.std),
                format_sig6(r.vs_upper.mean),
                format_sig6(r.vs_upper.std)
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda_l: f64,
    pub lambda_d: f64,
    /// S1d Combined test accuracy.
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSweepReport {
    pub points: Vec<SweepPoint>,
}

impl LambdaSweepReport {
    pub fn point(&self, lambda_l: f64, lambda_d: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.lambda_l == lambda_l && p.lambda_d == lambda_d)
    }
}

impl Report for LambdaSweepReport {
    fn to_csv(&self) -> String {
        let mut out = String::from("lambda_l,lambda_d,mean,std\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_sig6(p.lambda_l),
                format_sig6(p.lambda_d),
                format_sig6(p.mean),
                format_sig6(p.std)
            );
        }
        out
    }
}
