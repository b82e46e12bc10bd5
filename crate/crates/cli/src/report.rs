//! Key-value reports, CSV tables and SVG log-log plots. No timestamps anywhere.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    entries: Vec<(String, String)>,
    tables: Vec<(String, String)>,
    plots: Vec<(String, String)>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            pass: true,
            ..Self::default()
        }
    }

    pub fn put(&mut self, key: &str, value: impl Value) -> &mut Self {
        self.entries.push((key.to_string(), value.text()));
        self
    }

    /// Record a criterion and fold it into the overall status.
    pub fn check(&mut self, key: &str, ok: bool) -> &mut Self {
        self.pass &= ok;
        self.put(key, if ok { "pass" } else { "fail" })
    }

    pub fn table(&mut self, name: &str, csv: String) {
        self.tables.push((name.to_string(), csv));
    }

    pub fn plot(&mut self, name: &str, svg: String) {
        self.plots.push((name.to_string(), svg));
    }

    pub fn render(&self) -> String {
        let mut out = format!("command = {}\n", self.command);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "status = {}", if self.pass { "pass" } else { "fail" });
        for (name, csv) in &self.tables {
            let _ = write!(out, "\n# table {name}\n{csv}");
        }
        out
    }

    /// Writes `<command>.report`, one `.csv` per table and one `.svg` per plot.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.report", self.command)), self.render())?;
        for (name, csv) in &self.tables {
            std::fs::write(dir.join(format!("{name}.csv")), csv)?;
        }
        for (name, svg) in &self.plots {
            std::fs::write(dir.join(format!("{name}.svg")), svg)?;
        }
        Ok(())
    }
}

pub trait Value {
    fn text(&self) -> String;
}

macro_rules! plain {
    ($($t:ty),*) => {$(impl Value for $t { fn text(&self) -> String { self.to_string() } })*};
}
plain!(usize, u64, i64, i32, u32, bool, &str, String, &String);

impl Value for f64 {
    fn text(&self) -> String {
        fmt_f64(*self)
    }
}

/// Shortest round-trip text, switching to exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Standalone SVG of one or more log-log series; non-positive points are dropped.
pub fn loglog_svg(title: &str, xlabel: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let logged: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, pts)| {
            pts.iter()
                .filter(|p| p.0 > 0.0 && p.1 > 0.0)
                .map(|p| (p.0.log10(), p.1.log10()))
                .collect()
        })
        .collect();
    let all: Vec<&(f64, f64)> = logged.iter().flatten().collect();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    if all.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(|p| f(p)).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|p| f(p)).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        out,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 {}</text>",
        W / 2.0,
        H - 20.0,
        escape(xlabel)
    );
    for (k, (x, y)) in [(x0, y0), (x1, y1)].into_iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{x:.2}</text>",
            sx(x),
            H - PAD + 16.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{y:.2}</text>",
            PAD - 6.0,
            sy(y) + 4.0 * (1 - k) as f64
        );
    }
    for (i, ((name, _), pts)) in series.iter().zip(&logged).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            PAD + 8.0,
            PAD + 16.0 * (i + 1) as f64,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_ordered() {
        let mut r = Report::new("x");
        r.put("b", 2).put("a", 1.5);
        r.check("ok", false);
        r.put("tiny", 1.25e-17);
        assert_eq!(
            r.render(),
            "command = x\nb = 2\na = 1.5\nok = fail\ntiny = 1.25e-17\nstatus = fail\n"
        );
    }

    #[test]
    fn svg_is_well_formed() {
        let s = loglog_svg("t", "X", &[("s", vec![(1.0, 2.0), (10.0, 20.0), (0.0, 1.0)])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
