//! Labeled time series, CSV emission, and cross-series deviation metrics.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// A labeled time series. The imaginary column is optional; number-like
/// series omit it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub label: String,
    pub t: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl SeriesTable {
    pub fn real(label: impl Into<String>, t: Vec<f64>, re: Vec<f64>) -> Result<Self> {
        Self::build(label.into(), t, re, None)
    }

    pub fn complex(
        label: impl Into<String>,
        t: Vec<f64>,
        re: Vec<f64>,
        im: Vec<f64>,
    ) -> Result<Self> {
        Self::build(label.into(), t, re, Some(im))
    }

    fn build(label: String, t: Vec<f64>, re: Vec<f64>, im: Option<Vec<f64>>) -> Result<Self> {
        if t.len() != re.len() || im.as_ref().is_some_and(|v| v.len() != t.len()) {
            return Err(Error::InvalidParameter(format!(
                "series '{label}': column lengths differ"
            )));
        }
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "series '{label}': time column must be strictly increasing"
                )));
            }
        }
        let finite = t.iter().chain(re.iter()).all(|x| x.is_finite())
            && im.iter().flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(format!(
                "series '{label}': non-finite value"
            )));
        }
        Ok(Self { label, t, re, im })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Writes the series as CSV: header row, scientific notation with
    /// 12 significant digits, '\n' line endings.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        if self.im.is_some() {
            out.push_str("t_seconds,value_real,value_imag\n");
        } else {
            out.push_str("t_seconds,value_real\n");
        }
        for i in 0..self.len() {
            out.push_str(&fmt_sci(self.t[i]));
            out.push(',');
            out.push_str(&fmt_sci(self.re[i]));
            if let Some(im) = &self.im {
                out.push(',');
                out.push_str(&fmt_sci(im[i]));
            }
            out.push('\n');
        }
        let mut f = fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config(format!("{}: empty CSV", path.display())))?;
        let has_imag = header.trim_end() == "t_seconds,value_real,value_imag";
        if !has_imag && header.trim_end() != "t_seconds,value_real" {
            return Err(Error::Config(format!(
                "{}: unrecognized CSV header '{header}'",
                path.display()
            )));
        }
        let mut t = Vec::new();
        let mut re = Vec::new();
        let mut im = Vec::new();
        for (ln, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let want = if has_imag { 3 } else { 2 };
            if cols.len() != want {
                return Err(Error::Config(format!(
                    "{}:{}: expected {} columns",
                    path.display(),
                    ln + 2,
                    want
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("{}: bad number '{s}': {e}", path.display())))
            };
            t.push(parse(cols[0])?);
            re.push(parse(cols[1])?);
            if has_imag {
                im.push(parse(cols[2])?);
            }
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::build(label, t, re, if has_imag { Some(im) } else { None })
    }
}

fn fmt_sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{x:.11e}")
}

/// Deviation metrics between two series on a shared grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub max_abs: f64,
    pub rms: f64,
    pub t_of_max: f64,
}

/// Compares b against a on a's grid; b is linearly interpolated when the
/// grids differ. Comparison is on the real column (complex pairs compare by
/// the modulus of the difference).
pub fn compare_series(a: &SeriesTable, b: &SeriesTable) -> Result<Deviation> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("cannot compare empty series".into()));
    }
    let same_grid = a.len() == b.len() && a.t.iter().zip(b.t.iter()).all(|(x, y)| x == y);
    let mut max_abs = 0.0f64;
    let mut t_of_max = a.t[0];
    let mut sum_sq = 0.0f64;
    let mut count = 0usize;
    for i in 0..a.len() {
        let t = a.t[i];
        let (br, bi) = if same_grid {
            (b.re[i], b.im.as_ref().map(|v| v[i]))
        } else {
            match interp(b, t) {
                Some(v) => v,
                None => continue, // outside b's support
            }
        };
        let dre = a.re[i] - br;
        let dim = match (&a.im, bi) {
            (Some(aim), Some(bim)) => aim[i] - bim,
            (Some(aim), None) => aim[i],
            (None, Some(bim)) => -bim,
            (None, None) => 0.0,
        };
        let d = (dre * dre + dim * dim).sqrt();
        if d > max_abs {
            max_abs = d;
            t_of_max = t;
        }
        sum_sq += d * d;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidParameter(
            "series time ranges do not overlap".into(),
        ));
    }
    Ok(Deviation {
        max_abs,
        rms: (sum_sq / count as f64).sqrt(),
        t_of_max,
    })
}

/// Long-time window statistics: mean and the fractional change implied by a
/// least-squares linear fit across the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub mean: f64,
    /// |fitted slope| * window duration / |mean|.
    pub relative_slope: f64,
}

/// Fits the last `window_frac` of the series; None for degenerate input.
pub fn plateau_stats(t: &[f64], v: &[f64], window_frac: f64) -> Option<Plateau> {
    if t.len() != v.len() || t.len() < 4 || !(window_frac > 0.0 && window_frac <= 1.0) {
        return None;
    }
    let start = ((t.len() as f64) * (1.0 - window_frac)) as usize;
    let (tw, vw) = (&t[start..], &v[start..]);
    if tw.len() < 2 {
        return None;
    }
    let n = tw.len() as f64;
    let t0 = tw[0];
    let mut st = 0.0;
    let mut stt = 0.0;
    let mut sv = 0.0;
    let mut stv = 0.0;
    for (&ti, &vi) in tw.iter().zip(vw.iter()) {
        let u = ti - t0;
        st += u;
        stt += u * u;
        sv += vi;
        stv += u * vi;
    }
    let denom = n * stt - st * st;
    if denom == 0.0 {
        return None;
    }
    let slope = (n * stv - st * sv) / denom;
    let mean = sv / n;
    if mean == 0.0 {
        return None;
    }
    let duration = tw[tw.len() - 1] - t0;
    Some(Plateau {
        mean,
        relative_slope: (slope * duration / mean).abs(),
    })
}

fn interp(s: &SeriesTable, t: f64) -> Option<(f64, Option<f64>)> {
    if t < s.t[0] || t > s.t[s.len() - 1] {
        return None;
    }
    let j = match s.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(j) => return Some((s.re[j], s.im.as_ref().map(|v| v[j]))),
        Err(j) => j,
    };
    let (t0, t1) = (s.t[j - 1], s.t[j]);
    let w = (t - t0) / (t1 - t0);
    let lerp = |v: &Vec<f64>| v[j - 1] + w * (v[j] - v[j - 1]);
    Some((lerp(&s.re), s.im.as_ref().map(lerp)))
}

/// Minimal line-plot SVG for a set of series, one polyline each.
pub fn write_svg_plot(series: &[&SeriesTable], title: &str, path: &Path) -> Result<()> {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 50.0;
    let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for i in 0..s.len() {
            tmin = tmin.min(s.t[i]);
            tmax = tmax.max(s.t[i]);
            vmin = vmin.min(s.re[i]);
            vmax = vmax.max(s.re[i]);
        }
    }
    if !tmin.is_finite() || tmax <= tmin {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    if vmax <= vmin {
        vmax = vmin + 1.0;
    }
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
        W / 2.0
    );
    for (si, s) in series.iter().enumerate() {
        let mut pts = String::new();
        for i in 0..s.len() {
            let x = M + (s.t[i] - tmin) / (tmax - tmin) * (W - 2.0 * M);
            let y = H - M - (s.re[i] - vmin) / (vmax - vmin) * (H - 2.0 * M);
            pts.push_str(&format!("{x:.2},{y:.2} "));
        }
        let color = colors[si % colors.len()];
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{pts}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            M + 6.0,
            M + 16.0 * (si as f64 + 1.0),
            s.label
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n</svg>\n",
        H - M,
        W - M,
        H - M,
        H - M
    ));
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_decreasing_time() {
        assert!(SeriesTable::real("x", vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(SeriesTable::real("x", vec![0.0, 1.0, 0.5], vec![0.0; 3]).is_err());
    }

    #[test]
    fn identical_series_compare_to_zero() {
        let a = SeriesTable::real("a", vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let d = compare_series(&a, &a).unwrap();
        assert_eq!(d.max_abs, 0.0);
        assert_eq!(d.rms, 0.0);
    }

    #[test]
    fn constant_offset_has_matching_metrics() {
        let a = SeriesTable::real("a", vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        let b = SeriesTable::real("b", vec![0.0, 1.0, 2.0], vec![1.5, 2.5, 3.5]).unwrap();
        let d = compare_series(&a, &b).unwrap();
        assert!((d.max_abs - 0.5).abs() < 1e-15);
        assert!((d.rms - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolates_other_grid() {
        let a = SeriesTable::real("a", vec![0.25, 0.75], vec![0.25, 0.75]).unwrap();
        let b = SeriesTable::real("b", vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let d = compare_series(&a, &b).unwrap();
        assert!(d.max_abs < 1e-15);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let a = SeriesTable::complex(
            "s",
            vec![0.0, 1.25e-3, 7.5e-3],
            vec![1.0, -2.5e-7, 3.0],
            vec![0.5, 0.0, -1.0],
        )
        .unwrap();
        a.write_csv(&p).unwrap();
        let b = SeriesTable::read_csv(&p).unwrap();
        assert_eq!(a.t, b.t);
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, b.im);
        // byte-identical rewrite
        let bytes1 = std::fs::read(&p).unwrap();
        b.write_csv(&p).unwrap();
        assert_eq!(bytes1, std::fs::read(&p).unwrap());
    }
}
