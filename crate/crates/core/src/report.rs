//! Uniform run reports and their renderings.
//!
//! Every CLI invocation produces one [`RunReport`]; renders are bit-stable
//! for a fixed report and version (wall-clock timing is carried alongside
//! but never serialized and never enters equality).

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::time::Duration;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// How far the run's conclusions are machine-certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// Every number entering the verdict comes from a certified base case.
    Certified,
    /// The verdict holds, but some entries rest on SHGH-assumed base cases.
    ShghAssumed,
    Failed,
}

impl Certification {
    pub fn from_outcome(passed: bool, fully_certified: bool) -> Certification {
        match (passed, fully_certified) {
            (false, _) => Certification::Failed,
            (true, true) => Certification::Certified,
            (true, false) => Certification::ShghAssumed,
        }
    }

    /// 0 = certified pass, 2 = pass resting on assumed entries (1 under
    /// `--strict`), 1 = fail.
    pub fn exit_code(self, strict: bool) -> i32 {
        match self {
            Certification::Certified => 0,
            Certification::ShghAssumed => {
                if strict {
                    1
                } else {
                    2
                }
            }
            Certification::Failed => 1,
        }
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certification::Certified => "certified",
            Certification::ShghAssumed => "shgh-assumed",
            Certification::Failed => "failed",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub certification: Certification,
    pub assumptions: Vec<String>,
    pub version: String,
    /// Display-only; excluded from serialization and equality so renders
    /// stay reproducible.
    #[serde(skip)]
    pub timing: Option<Duration>,
}

impl PartialEq for RunReport {
    fn eq(&self, other: &RunReport) -> bool {
        self.command == other.command
            && self.inputs == other.inputs
            && self.results == other.results
            && self.certification == other.certification
            && self.assumptions == other.assumptions
            && self.version == other.version
    }
}

impl Eq for RunReport {}

impl RunReport {
    pub fn new(
        command: &str,
        inputs: Value,
        results: Value,
        certification: Certification,
        assumptions: Vec<String>,
    ) -> RunReport {
        RunReport {
            command: command.to_string(),
            inputs,
            results,
            certification,
            assumptions,
            version: TOOL_VERSION.to_string(),
            timing: None,
        }
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        self.certification.exit_code(strict)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            other => Err(format!(
                "unknown format {other:?} (expected json, text, or csv)"
            )),
        }
    }
}

pub fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => render_json(report),
        Format::Text => render_text(report),
        Format::Csv => render_csv(report),
    }
}

fn render_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report)
        .expect("reports contain only serializable values");
    s.push('\n');
    s
}

// ---- helpers for reading the results value without panicking --------------

fn field<'a>(v: &'a Value, key: &str) -> &'a Value {
    v.get(key).unwrap_or(&Value::Null)
}

fn arr<'a>(v: &'a Value, key: &str) -> &'a [Value] {
    field(v, key).as_array().map_or(&[], Vec::as_slice)
}

fn int(v: &Value, key: &str) -> i64 {
    field(v, key).as_i64().unwrap_or(0)
}

fn boolean(v: &Value, key: &str) -> bool {
    field(v, key).as_bool().unwrap_or(false)
}

fn text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A height / degree value: an integer or the string `"inf"`.
fn glyph(v: &Value, infinity: &str) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) if s == "inf" => infinity.to_string(),
        Value::Null => "-".to_string(),
        other => other.to_string(),
    }
}

fn divisor_display(v: &Value) -> String {
    let d = int(v, "d");
    let m: Vec<String> = arr(v, "m").iter().map(text).collect();
    format!("({d}; {})", m.join(", "))
}

// ---- text -----------------------------------------------------------------

fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "phantomcert {} :: {}\n",
        report.version, report.command
    ));
    out.push_str(&format!("inputs: {}\n\n", report.inputs));
    let body = match report.command.as_str() {
        "search" => text_search(&report.results),
        "verify" => text_verify(&report.results),
        "height" => text_height(&report.results),
        "cohomology" => text_cohomology(&report.results),
        "coconnective" => text_coconnective(&report.results),
        "certificate" => text_certificate(&report.results),
        _ => format!("{:#}\n", report.results),
    };
    out.push_str(&body);
    out.push_str(&format!("\ncertification: {}\n", report.certification));
    if report.assumptions.is_empty() {
        out.push_str("assumptions: none\n");
    } else {
        out.push_str("assumptions:\n");
        for a in &report.assumptions {
            out.push_str(&format!("  - {a}\n"));
        }
    }
    out
}

fn text_search(r: &Value) -> String {
    let mut out = String::new();
    let candidates: Vec<String> = arr(r, "candidates").iter().map(text).collect();
    out.push_str(&format!("candidate n: {}\n", candidates.join(" ")));
    let solutions = arr(r, "solutions");
    if solutions.is_empty() {
        out.push_str("solutions: none\n");
    } else {
        out.push_str("solutions:\n");
        for s in solutions {
            out.push_str(&format!(
                "  n={} a={} b={}\n",
                int(s, "n"),
                int(s, "a"),
                int(s, "b")
            ));
        }
    }
    out
}

fn text_verify(r: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!("collection length: {}\n", int(r, "length")));
    let pairs = arr(r, "pairs");
    let failing: Vec<&Value> = pairs
        .iter()
        .filter(|p| field(p, "verdict") == "fail")
        .collect();
    out.push_str(&format!(
        "pair checks: {}/{} pass\n",
        pairs.len() - failing.len(),
        pairs.len()
    ));
    for p in failing {
        out.push_str(&format!(
            "  FAIL ({}, {}): (hom, ext1, ext2) = ({}, {}, {}), chi = {}\n",
            int(p, "i"),
            int(p, "j"),
            int(p, "hom"),
            int(p, "ext1"),
            int(p, "ext2"),
            int(p, "chi")
        ));
    }
    let ml = field(r, "maximal_length");
    if !ml.is_null() {
        out.push_str(&format!(
            "maximal length: {} (length {} vs expected {}, det = {}, \
             factor routes agree: {})\n",
            if boolean(ml, "passed") { "pass" } else { "FAIL" },
            int(ml, "length"),
            int(ml, "expected_length"),
            glyph(field(ml, "det"), "inf"),
            boolean(ml, "routes_agree"),
        ));
    }
    out.push_str(&format!(
        "exceptional: {}\n",
        if boolean(r, "exceptional") { "yes" } else { "no" }
    ));
    out
}

fn text_height(r: &Value) -> String {
    let labels: Vec<String> = arr(r, "labels").iter().map(text).collect();
    let entries = arr(field(r, "matrix"), "entries");
    let mut out = String::new();
    let label_w = labels.iter().map(String::len).max().unwrap_or(1).max(3);
    // Column header + rule.
    out.push_str(&format!("{:>3} {:<label_w$} |", "", ""));
    for c in 0..labels.len() {
        out.push_str(&format!("{c:>4} "));
    }
    out.push('\n');
    out.push_str(&format!(
        "{}-+{}\n",
        "-".repeat(4 + label_w),
        "-".repeat(5 * labels.len())
    ));
    for (rix, row) in entries.iter().enumerate() {
        let label = labels.get(rix).cloned().unwrap_or_default();
        out.push_str(&format!("{rix:>3} {label:<label_w$} |"));
        for cell in row.as_array().map_or(&[][..], Vec::as_slice) {
            let star = if boolean(cell, "certified") { " " } else { "*" };
            out.push_str(&format!("{:>4}{star}", glyph(field(cell, "value"), "∞")));
        }
        out.push('\n');
    }
    out.push_str(
        "\nabove the diagonal: e(row, col); on and below: e(row, col - K); \
         * = SHGH-assumed\n",
    );
    out.push_str(&format!(
        "pseudoheight: {}\n",
        glyph(field(r, "pseudoheight"), "∞")
    ));
    let witness: Vec<String> = arr(r, "witness_labels").iter().map(text).collect();
    if !witness.is_empty() {
        out.push_str(&format!("witness chain: {}\n", witness.join(", ")));
    }
    out
}

fn text_cohomology(r: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "divisor: {}\n",
        divisor_display(field(r, "divisor"))
    ));
    out.push_str(&format!("chi: {}\n", int(r, "chi")));
    let certified = arr(r, "certified");
    for (k, key) in ["h0", "h1", "h2"].iter().enumerate() {
        let flag = certified.get(k).and_then(Value::as_bool).unwrap_or(false);
        out.push_str(&format!(
            "h^{k} = {}{}\n",
            int(r, key),
            if flag { "" } else { "   (SHGH-assumed)" }
        ));
    }
    for (key, title) in [("trace_h0", "h^0 reduction"), ("trace_h2", "h^2 reduction")] {
        let steps = arr(field(r, key), "steps");
        if steps.is_empty() {
            continue;
        }
        let rendered: Vec<String> = steps.iter().map(trace_step).collect();
        out.push_str(&format!("{title}: {}\n", rendered.join("; ")));
    }
    out
}

fn trace_step(s: &Value) -> String {
    match field(s, "step").as_str().unwrap_or("") {
        "clamp" => format!("clamp m[{}]", int(s, "index")),
        "cremona" => format!("cremona -> d = {}", int(s, "d_after")),
        "base" => format!(
            "base {} with chi = {}",
            divisor_display(field(s, "class")),
            int(s, "chi")
        ),
        "negative-degree-exit" => format!("d = {} < 0: no sections", int(s, "d")),
        other => other.to_string(),
    }
}

fn text_coconnective(r: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "full collection: {} objects; dual collection: {} objects\n",
        int(r, "full_length"),
        int(r, "dual_length")
    ));
    let conc = field(r, "concentration");
    out.push_str(&format!(
        "concentration: {} ({} pairs, Ext in top degree with dimension chi)\n",
        pass_word(boolean(conc, "passed")),
        arr(conc, "entries").len()
    ));
    let region = field(r, "region");
    out.push_str(&format!(
        "negative-degree audit: {}\n",
        pass_word(boolean(region, "passed"))
    ));
    let rows = arr(region, "rows");
    let mut silent_from = None;
    for row in rows {
        let q = field(row, "min_q");
        if q.is_null() {
            silent_from.get_or_insert(int(row, "chain_length"));
            continue;
        }
        out.push_str(&format!(
            "  column {}: min q = {}, min total degree = {}\n",
            int(row, "column"),
            glyph(q, "∞"),
            glyph(field(row, "min_total"), "∞")
        ));
    }
    if let Some(p) = silent_from {
        out.push_str(&format!("  chains of length >= {p}: none\n"));
    }
    let slots: Vec<String> = arr(region, "negative_slots")
        .iter()
        .map(|s| {
            let pair = s.as_array().map_or(&[][..], Vec::as_slice);
            format!(
                "({}, {})",
                pair.first().map_or(String::new(), text),
                pair.get(1).map_or(String::new(), text)
            )
        })
        .collect();
    out.push_str(&format!(
        "  slots of negative total degree: {}\n",
        if slots.is_empty() {
            "none".to_string()
        } else {
            slots.join(", ")
        }
    ));
    let kernel = field(r, "kernel");
    out.push_str(&format!(
        "kernel check: {} ({} triples, {} nonzero products, all through \
         the trivial class)\n",
        pass_word(boolean(kernel, "passed")),
        int(kernel, "triples_checked"),
        arr(kernel, "nonzero").len()
    ));
    out
}

fn text_certificate(r: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "collection: {} line bundles\n",
        int(r, "collection_length")
    ));
    let exceptional = field(r, "exceptional");
    if !exceptional.is_null() {
        out.push_str(&format!(
            "exceptional: {}\n",
            if exceptional.as_bool().unwrap_or(false) {
                "yes"
            } else {
                "no"
            }
        ));
    }
    out.push_str(&format!(
        "pseudoheight: {}\n",
        glyph(field(r, "pseudoheight"), "∞")
    ));
    let witness: Vec<String> = arr(r, "witness_labels").iter().map(text).collect();
    if !witness.is_empty() {
        out.push_str(&format!("witness chain: {}\n", witness.join(", ")));
    }
    let height = field(r, "height");
    let kind = field(height, "kind").as_str().unwrap_or("unknown");
    let height_line = match kind {
        "exact" => format!("= {} (criterion fired)", glyph(field(height, "value"), "∞")),
        "at-least" => format!(">= {} (criterion did not fire)", glyph(field(height, "value"), "∞")),
        "infinite" => "= ∞".to_string(),
        other => other.to_string(),
    };
    out.push_str(&format!("height {height_line}\n"));
    out.push_str(&format!(
        "fullness: {}\n",
        field(r, "full").as_str().unwrap_or("unknown")
    ));
    let ml = field(r, "maximal_length");
    out.push_str(&format!(
        "maximal length: {} (length {}, det = {})\n",
        pass_word(boolean(ml, "passed")),
        int(ml, "length"),
        glyph(field(ml, "det"), "inf")
    ));
    out.push_str(&format!(
        "phantom complement: {}\n",
        if boolean(r, "phantom_complement") {
            "certified — any completion to a full collection of the declared \
             reference length has a phantom complement"
        } else {
            "not claimed"
        }
    ));
    out
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

// ---- csv ------------------------------------------------------------------

fn render_csv(report: &RunReport) -> String {
    match report.command.as_str() {
        "search" => {
            let mut out = String::from("n,a,b\n");
            for s in arr(&report.results, "solutions") {
                out.push_str(&format!(
                    "{},{},{}\n",
                    int(s, "n"),
                    int(s, "a"),
                    int(s, "b")
                ));
            }
            out
        }
        "height" => {
            let mut out = String::from("row,col,value,certified\n");
            let entries = arr(field(&report.results, "matrix"), "entries");
            for (r, row) in entries.iter().enumerate() {
                for (c, cell) in row.as_array().map_or(&[][..], Vec::as_slice).iter().enumerate() {
                    out.push_str(&format!(
                        "{r},{c},{},{}\n",
                        glyph(field(cell, "value"), "inf"),
                        boolean(cell, "certified")
                    ));
                }
            }
            out
        }
        "cohomology" => {
            let mut out = String::from("degree,dim,certified\n");
            let certified = arr(&report.results, "certified");
            for (k, key) in ["h0", "h1", "h2"].iter().enumerate() {
                out.push_str(&format!(
                    "{k},{},{}\n",
                    int(&report.results, key),
                    certified.get(k).and_then(Value::as_bool).unwrap_or(false)
                ));
            }
            out
        }
        "verify" => {
            let mut out = String::from("i,j,chi,hom,ext1,ext2,verdict\n");
            for p in arr(&report.results, "pairs") {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    int(p, "i"),
                    int(p, "j"),
                    int(p, "chi"),
                    int(p, "hom"),
                    int(p, "ext1"),
                    int(p, "ext2"),
                    field(p, "verdict").as_str().unwrap_or("")
                ));
            }
            out
        }
        _ => {
            let mut out = String::from("field,value\n");
            out.push_str(&format!("command,{}\n", report.command));
            out.push_str(&format!("certification,{}\n", report.certification));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> RunReport {
        RunReport::new(
            "search",
            json!({"n": "10..12"}),
            json!({
                "candidates": [10, 11, 12, 15],
                "solutions": [
                    {"n": 10, "a": 2, "b": 6},
                    {"n": 11, "a": 1, "b": 3},
                ],
            }),
            Certification::Certified,
            vec![],
        )
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Certification::Certified.exit_code(false), 0);
        assert_eq!(Certification::Certified.exit_code(true), 0);
        assert_eq!(Certification::ShghAssumed.exit_code(false), 2);
        assert_eq!(Certification::ShghAssumed.exit_code(true), 1);
        assert_eq!(Certification::Failed.exit_code(false), 1);
        assert_eq!(Certification::Failed.exit_code(true), 1);
    }

    #[test]
    fn outcome_mapping() {
        assert_eq!(
            Certification::from_outcome(true, true),
            Certification::Certified
        );
        assert_eq!(
            Certification::from_outcome(true, false),
            Certification::ShghAssumed
        );
        assert_eq!(
            Certification::from_outcome(false, true),
            Certification::Failed
        );
        assert_eq!(
            Certification::from_outcome(false, false),
            Certification::Failed
        );
    }

    #[test]
    fn json_round_trip_ignores_timing() {
        let mut report = sample();
        report.timing = Some(Duration::from_millis(41));
        let rendered = render(&report, Format::Json);
        let parsed: RunReport = serde_json::from_str(&rendered).unwrap();
        assert_eq!(parsed, report);
        assert!(parsed.timing.is_none());
        assert!(!rendered.contains("timing"));
    }

    #[test]
    fn renders_are_deterministic() {
        let report = sample();
        for f in [Format::Json, Format::Text, Format::Csv] {
            assert_eq!(render(&report, f), render(&report, f));
        }
    }

    #[test]
    fn search_csv_rows() {
        assert_eq!(
            render(&sample(), Format::Csv),
            "n,a,b\n10,2,6\n11,1,3\n"
        );
    }

    #[test]
    fn search_text_lists_solutions() {
        let text = render(&sample(), Format::Text);
        assert!(text.contains("candidate n: 10 11 12 15"));
        assert!(text.contains("  n=10 a=2 b=6\n"));
        assert!(text.contains("  n=11 a=1 b=3\n"));
        assert!(text.contains("certification: certified"));
        assert!(text.contains("assumptions: none"));
    }

    #[test]
    fn height_text_grid() {
        let report = RunReport::new(
            "height",
            json!({"case": "tiny"}),
            json!({
                "labels": ["O", "O(H)"],
                "matrix": {"entries": [
                    [{"value": "inf", "certified": true}, {"value": 2, "certified": true}],
                    [{"value": 1, "certified": false}, {"value": 0, "certified": true}],
                ]},
                "pseudoheight": 3,
                "witness": [0],
                "witness_labels": ["O"],
            }),
            Certification::ShghAssumed,
            vec!["example flag".to_string()],
        );
        let text = render(&report, Format::Text);
        assert!(text.contains("  0 O    |   ∞    2 \n"));
        assert!(text.contains("  1 O(H) |   1*   0 \n"));
        assert!(text.contains("pseudoheight: 3"));
        assert!(text.contains("witness chain: O"));
        assert!(text.contains("  - example flag"));
        let csv = render(&report, Format::Csv);
        assert!(csv.starts_with("row,col,value,certified\n0,0,inf,true\n"));
        assert!(csv.contains("1,0,1,false\n"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("text".parse::<Format>().unwrap(), Format::Text);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("yaml".parse::<Format>().is_err());
    }

    #[test]
    fn unknown_command_text_falls_back_to_json_body() {
        let report = RunReport::new(
            "mystery",
            Value::Null,
            json!({"k": 1}),
            Certification::Failed,
            vec![],
        );
        let text = render(&report, Format::Text);
        assert!(text.contains("\"k\": 1"));
        assert!(text.contains("certification: failed"));
    }
}
