use super::Explanation;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn highlighted(token: &str, weight: f64, max: f64) -> String {
    let alpha = if max > 0.0 { weight.abs() / max } else { 0.0 };
    let rgb = if weight >= 0.0 { "0,90,255" } else { "230,20,20" };
    format!(
        "<span class=\"tok\" title=\"{weight:.4}\" style=\"background:rgba({rgb},{alpha:.3})\">{}</span>",
        escape(token)
    )
}

fn exemplar_rows(items: &[super::Exemplar]) -> String {
    items
        .iter()
        .map(|e| {
            format!(
                "<tr><td>{}</td><td>{}</td><td>{:.4}</td><td>{:.4}</td></tr>\n",
                escape(&e.text),
                e.label.as_u8(),
                e.score,
                e.distance
            )
        })
        .collect()
}

/// Self-contained saliency page: query tokens shaded blue (positive-leaning) or red
/// (negative-leaning) with opacity proportional to |weight|.
pub fn render_html(e: &Explanation) -> String {
    let max = e.intrinsic.iter().chain(&e.extrinsic).map(|a| a.weight.abs()).fold(0.0, f64::max);
    let query: Vec<String> = crate::text::tokenize(&e.query)
        .iter()
        .map(|t| highlighted(t, e.weight_of(t).unwrap_or(0.0), max))
        .collect();
    let extrinsic: Vec<String> = e.extrinsic.iter().map(|a| highlighted(&a.token, a.weight, max)).collect();
    format!(
        r#"<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>explanation</title>
<style>
body{{font-family:sans-serif;margin:2em;max-width:60em}}
.tok{{padding:0 .2em;margin:0 .1em;border-radius:3px}}
table{{border-collapse:collapse}}td,th{{border:1px solid #ccc;padding:.2em .5em}}
</style></head><body>
<h1>Prediction: {label} (score {score:.4})</h1>
<p>method {method}, seed {seed}, r2 {r2:.4}, fidelity {fid:.4}, neighborhood {size}</p>
<h2>Query</h2>
<p class="query">{query}</p>
<h2>Extrinsic words</h2>
<p>{extrinsic}</p>
<h2>Factuals</h2>
<table><tr><th>text</th><th>label</th><th>score</th><th>distance</th></tr>
{factuals}</table>
<h2>Counterfactuals</h2>
<table><tr><th>text</th><th>label</th><th>score</th><th>distance</th></tr>
{counterfactuals}</table>
</body></html>
"#,
        label = e.label.as_u8(),
        score = e.score,
        method = e.method,
        seed = e.seed,
        r2 = e.diagnostics.r2,
        fid = e.diagnostics.fidelity,
        size = e.diagnostics.neighborhood_size,
        query = query.join(" "),
        extrinsic = extrinsic.join(" "),
        factuals = exemplar_rows(&e.factuals),
        counterfactuals = exemplar_rows(&e.counterfactuals),
    )
}
