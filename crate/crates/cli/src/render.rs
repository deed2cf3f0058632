use qxsim_core::Histogram;

pub const BAR_COLUMNS: usize = 50;

/// Outcomes by count, descending; ties by bitstring.
fn sorted(h: &Histogram) -> Vec<(&String, u64)> {
    let mut rows: Vec<_> = h.counts.iter().map(|(k, &v)| (k, v)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    rows
}

/// One line per outcome: key, bar scaled so probability 1 fills 50 columns,
/// probability, count.
pub fn bars(h: &Histogram) -> String {
    let mut out = String::new();
    for (key, count) in sorted(h) {
        let p = count as f64 / h.shots as f64;
        let len = (p * BAR_COLUMNS as f64).round() as usize;
        out.push_str(&format!("{key} |{:<width$}| {p:.4} ({count})\n", "#".repeat(len), width = BAR_COLUMNS));
    }
    out
}

pub fn csv(h: &Histogram) -> String {
    let mut out = String::from("bitstring,count,probability\n");
    for (key, &count) in &h.counts {
        out.push_str(&format!("{key},{count},{}\n", count as f64 / h.shots as f64));
    }
    out
}

pub fn json(h: &Histogram) -> String {
    h.to_json() + "\n"
}
