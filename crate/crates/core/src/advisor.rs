//! Fitted parameter surfaces `alpha(n, sigma_v)` and `beta(n, sigma_v)`.
//!
//! Both are order-5 bivariate series in the node count `n` (x axis) and the
//! nearest-neighbour variation coefficient `sigma_v` (y axis):
//!
//! ```text
//! f(x, y) = a + sum_i b_i B_i(x) + sum_i c_i B_i(y) + sum_{i<=4, j<=5-i} d_ij B_i(x) B_j(y)
//! ```
//!
//! with shifted logistic basis functions on `[-1, 1]` for alpha and cosines
//! `cos(i x)` on `[0, pi]` for beta.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roadmap::{extract_features, FeatureVector, Roadmap};

pub const ORDER: usize = 5;
const CROSS_TERMS: usize = 10;
const SIGMOID_WIDTH: f64 = 0.12;

/// Band applied to recommended alpha.
pub const ALPHA_BAND: (f64, f64) = (0.5, 1.5);
/// Band applied to recommended beta.
pub const BETA_BAND: (f64, f64) = (3.0, 4.5);

/// Classical (alpha, beta) for the uniform deposition rule.
pub const UNIFORM_BASELINE: (f64, f64) = (1.0, 2.0);

/// Default x range: node count in a 300 x 300 area.
pub const DEFAULT_X_RANGE: (f64, f64) = (50.0, 500.0);
/// Default y range: variation coefficient.
pub const DEFAULT_Y_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Error, PartialEq)]
pub enum AdvisorError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing coefficient {0}")]
    Missing(String),
    #[error("invalid range for {axis}: min {min} must be below max {max}")]
    Range {
        axis: &'static str,
        min: f64,
        max: f64,
    },
}

/// Coefficients of an order-5 bivariate series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub a: f64,
    pub b: [f64; ORDER],
    pub c: [f64; ORDER],
    /// `d11 d12 d13 d14 d21 d22 d23 d31 d32 d41`.
    pub d: [f64; CROSS_TERMS],
}

/// Position of `d_ij` (1-based) in the flat cross-term array.
fn cross_index(i: usize, j: usize) -> usize {
    debug_assert!((1..ORDER).contains(&i) && j >= 1 && i + j <= ORDER);
    // rows have 4, 3, 2, 1 entries
    let row_start: usize = (1..i).map(|r| ORDER - r).sum();
    row_start + j - 1
}

impl SeriesCoefficients {
    pub fn constant(a: f64) -> Self {
        Self {
            a,
            b: [0.0; ORDER],
            c: [0.0; ORDER],
            d: [0.0; CROSS_TERMS],
        }
    }

    /// `d_ij` with 1-based `i`, `j` and `i + j <= 5`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[cross_index(i, j)]
    }

    /// Sum of all coefficients (the series value when every basis term is 1).
    pub fn total(&self) -> f64 {
        self.a
            + self.b.iter().sum::<f64>()
            + self.c.iter().sum::<f64>()
            + self.d.iter().sum::<f64>()
    }

    /// `a + sum b_i bx_i + sum c_i by_i + sum d_ij bx_i by_j`, summed in that order.
    fn combine(&self, bx: &[f64; ORDER], by: &[f64; ORDER]) -> f64 {
        let mut f = self.a;
        for i in 0..ORDER {
            f += self.b[i] * bx[i];
        }
        for j in 0..ORDER {
            f += self.c[j] * by[j];
        }
        let mut k = 0;
        for i in 0..ORDER - 1 {
            for j in 0..ORDER - 1 - i {
                f += self.d[k] * bx[i] * by[j];
                k += 1;
            }
        }
        f
    }
}

/// Coefficients fitted for alpha.
pub fn alpha_coefficients() -> SeriesCoefficients {
    SeriesCoefficients {
        a: 0.538,
        b: [-2.167, 0.903, 0.479, 0.215, 0.410],
        c: [-0.207, 0.829, -0.079, 0.052, 0.190],
        d: [
            0.050, 1.319, -0.15, 0.57, -0.2, -0.63, -0.09, 0.027, -0.18, -1.022,
        ],
    }
}

/// Coefficients fitted for beta.
pub fn beta_coefficients() -> SeriesCoefficients {
    SeriesCoefficients {
        a: 3.76,
        b: [-0.06, 0.07, -0.17, 0.023, 0.05],
        c: [-0.17, 0.07, -0.11, 0.03, -0.02],
        d: [
            -0.24, 0.122, -0.159, 0.080, -0.026, -0.008, 0.002, -0.101, -0.041, 0.011,
        ],
    }
}

/// `i`-th basis function (1-based) of the logistic series on `[-1, 1]`.
///
/// `S_1(x) = x`; for `i >= 2`,
/// `S_i(x) = -1 + 2 / (1 + exp(-(x + 1 - (i - 1) * 2 / n) / 0.12))` with `n = 5`.
pub fn sigmoid_basis(i: usize, x_scaled: f64) -> f64 {
    assert!(
        (1..=ORDER).contains(&i),
        "basis index {i} outside 1..={ORDER}"
    );
    if i == 1 {
        return x_scaled;
    }
    let shift = (i - 1) as f64 * (2.0 / ORDER as f64);
    -1.0 + 2.0 / (1.0 + (-(x_scaled + 1.0 - shift) / SIGMOID_WIDTH).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl AxisRange {
    pub fn new(axis: &'static str, min: f64, max: f64) -> Result<Self, AdvisorError> {
        if min < max && min.is_finite() && max.is_finite() {
            Ok(Self { min, max })
        } else {
            Err(AdvisorError::Range { axis, min, max })
        }
    }

    /// Maps `v` affinely from this range onto `[lo, hi]`, clamping at the ends.
    fn map(&self, v: f64, lo: f64, hi: f64) -> (f64, bool) {
        let clamped = v.clamp(self.min, self.max);
        let unit = (clamped - self.min) / (self.max - self.min);
        (lo + unit * (hi - lo), clamped != v)
    }
}

impl From<(f64, f64)> for AxisRange {
    fn from((min, max): (f64, f64)) -> Self {
        Self { min, max }
    }
}

/// Surface value plus whether either input had to be clamped into range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceValue {
    pub value: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Sigmoid,
    Cosine,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Sigmoid => "sigmoid",
            SeriesKind::Cosine => "cosine",
        })
    }
}

/// Logistic-basis surface, inputs scaled to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmoidSurface {
    pub coefficients: SeriesCoefficients,
    pub x_range: AxisRange,
    pub y_range: AxisRange,
}

impl Default for SigmoidSurface {
    fn default() -> Self {
        Self {
            coefficients: alpha_coefficients(),
            x_range: DEFAULT_X_RANGE.into(),
            y_range: DEFAULT_Y_RANGE.into(),
        }
    }
}

impl SigmoidSurface {
    pub fn evaluate(&self, x: f64, y: f64) -> SurfaceValue {
        let (xs, cx) = self.x_range.map(x, -1.0, 1.0);
        let (ys, cy) = self.y_range.map(y, -1.0, 1.0);
        let bx: [f64; ORDER] = std::array::from_fn(|i| sigmoid_basis(i + 1, xs));
        let by: [f64; ORDER] = std::array::from_fn(|i| sigmoid_basis(i + 1, ys));
        SurfaceValue {
            value: self.coefficients.combine(&bx, &by),
            clamped: cx || cy,
        }
    }
}

/// Cosine-basis surface, inputs scaled to `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineSurface {
    pub coefficients: SeriesCoefficients,
    pub x_range: AxisRange,
    pub y_range: AxisRange,
}

impl Default for CosineSurface {
    fn default() -> Self {
        Self {
            coefficients: beta_coefficients(),
            x_range: DEFAULT_X_RANGE.into(),
            y_range: DEFAULT_Y_RANGE.into(),
        }
    }
}

impl CosineSurface {
    pub fn evaluate(&self, x: f64, y: f64) -> SurfaceValue {
        let (xs, cx) = self.x_range.map(x, 0.0, PI);
        let (ys, cy) = self.y_range.map(y, 0.0, PI);
        let bx: [f64; ORDER] = std::array::from_fn(|i| ((i + 1) as f64 * xs).cos());
        let by: [f64; ORDER] = std::array::from_fn(|i| ((i + 1) as f64 * ys).cos());
        SurfaceValue {
            value: self.coefficients.combine(&bx, &by),
            clamped: cx || cy,
        }
    }
}

pub fn eval_sigmoid_surface(surface: &SigmoidSurface, x: f64, y: f64) -> f64 {
    surface.evaluate(x, y).value
}

pub fn eval_cosine_surface(surface: &CosineSurface, x: f64, y: f64) -> f64 {
    surface.evaluate(x, y).value
}

/// A coefficient file: series kind, coefficients and optional input ranges.
///
/// The text layout mirrors the published coefficient blocks, e.g.
///
/// ```text
/// function = sigmoid
/// x_range = 50 500
/// y_range = 0 1
/// a = 0.538, b1 = -2.167, b2 = 0.903, ...
/// d11 = 0.050, d12 = 1.319, ...
/// ```
///
/// Assignments may be separated by commas or newlines; `#` starts a comment.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile {
    pub kind: SeriesKind,
    pub coefficients: SeriesCoefficients,
    pub x_range: AxisRange,
    pub y_range: AxisRange,
}

impl CoefficientFile {
    pub fn into_sigmoid(self) -> SigmoidSurface {
        SigmoidSurface {
            coefficients: self.coefficients,
            x_range: self.x_range,
            y_range: self.y_range,
        }
    }

    pub fn into_cosine(self) -> CosineSurface {
        CosineSurface {
            coefficients: self.coefficients,
            x_range: self.x_range,
            y_range: self.y_range,
        }
    }

    pub fn to_text(&self) -> String {
        let co = &self.coefficients;
        let mut out = format!(
            "function = {}\nx_range = {} {}\ny_range = {} {}\na = {}\n",
            self.kind, self.x_range.min, self.x_range.max, self.y_range.min, self.y_range.max, co.a
        );
        let list = |name: char, vals: &[f64]| {
            vals.iter()
                .enumerate()
                .map(|(i, v)| format!("{name}{} = {v}", i + 1))
                .collect::<Vec<_>>()
                .join(", ")
        };
        out.push_str(&list('b', &co.b));
        out.push('\n');
        out.push_str(&list('c', &co.c));
        out.push('\n');
        let mut cross = Vec::new();
        for i in 1..ORDER {
            for j in 1..=ORDER - i {
                cross.push(format!("d{i}{j} = {}", co.d(i, j)));
            }
        }
        out.push_str(&cross.join(", "));
        out.push('\n');
        out
    }
}

impl FromStr for CoefficientFile {
    type Err = AdvisorError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut kind = None;
        let mut x_range = AxisRange::from(DEFAULT_X_RANGE);
        let mut y_range = AxisRange::from(DEFAULT_Y_RANGE);
        let mut a = None;
        let mut b = [None; ORDER];
        let mut c = [None; ORDER];
        let mut d = [None; CROSS_TERMS];

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or_default();
            for item in content.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                let err = |message: String| AdvisorError::Parse { line, message };
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected `name = value`, got {item:?}")))?;
                let key = key.trim();
                let value = value.trim();
                let number = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|e| err(format!("{key}: {s:?}: {e}")))
                };
                match key {
                    "function" => {
                        kind = Some(match value {
                            "sigmoid" => SeriesKind::Sigmoid,
                            "cosine" => SeriesKind::Cosine,
                            other => return Err(err(format!("unknown function {other:?}"))),
                        })
                    }
                    "x_range" | "y_range" => {
                        let parts: Vec<&str> = value.split_whitespace().collect();
                        if parts.len() != 2 {
                            return Err(err(format!("{key} needs two numbers")));
                        }
                        let axis = if key == "x_range" { "x" } else { "y" };
                        let range = AxisRange::new(axis, number(parts[0])?, number(parts[1])?)?;
                        if key == "x_range" {
                            x_range = range;
                        } else {
                            y_range = range;
                        }
                    }
                    "a" => a = Some(number(value)?),
                    _ => {
                        let slot = coefficient_slot(key)
                            .ok_or_else(|| err(format!("unknown coefficient {key:?}")))?;
                        let v = Some(number(value)?);
                        match slot {
                            Slot::B(i) => b[i] = v,
                            Slot::C(i) => c[i] = v,
                            Slot::D(i) => d[i] = v,
                        }
                    }
                }
            }
        }

        let kind = kind.ok_or_else(|| AdvisorError::Missing("function".into()))?;
        let a = a.ok_or_else(|| AdvisorError::Missing("a".into()))?;
        let fill = |prefix: char, vals: &[Option<f64>]| -> Result<Vec<f64>, AdvisorError> {
            vals.iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| AdvisorError::Missing(format!("{prefix}{}", i + 1))))
                .collect()
        };
        let b = fill('b', &b)?;
        let c = fill('c', &c)?;
        let mut d_vals = [0.0; CROSS_TERMS];
        for i in 1..ORDER {
            for j in 1..=ORDER - i {
                d_vals[cross_index(i, j)] = d[cross_index(i, j)]
                    .ok_or_else(|| AdvisorError::Missing(format!("d{i}{j}")))?;
            }
        }
        Ok(Self {
            kind,
            coefficients: SeriesCoefficients {
                a,
                b: b.try_into().expect("length checked"),
                c: c.try_into().expect("length checked"),
                d: d_vals,
            },
            x_range,
            y_range,
        })
    }
}

enum Slot {
    B(usize),
    C(usize),
    D(usize),
}

fn coefficient_slot(key: &str) -> Option<Slot> {
    let mut chars = key.chars();
    let prefix = chars.next()?;
    let digits: Vec<usize> = chars
        .map(|ch| ch.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()?;
    match (prefix, digits.as_slice()) {
        ('b', &[i]) if (1..=ORDER).contains(&i) => Some(Slot::B(i - 1)),
        ('c', &[i]) if (1..=ORDER).contains(&i) => Some(Slot::C(i - 1)),
        ('d', &[i, j]) if i >= 1 && j >= 1 && i + j <= ORDER => Some(Slot::D(cross_index(i, j))),
        _ => None,
    }
}

/// Recommended (alpha, beta) for the exponential deposition rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub alpha: f64,
    pub beta: f64,
    /// Surface outputs before banding.
    pub raw_alpha: f64,
    pub raw_beta: f64,
    pub features: FeatureVector,
    /// True when either raw output fell outside its band.
    pub clamped: bool,
    /// True when a feature lay outside a surface's input range.
    pub input_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Advisor {
    pub alpha_surface: SigmoidSurface,
    pub beta_surface: CosineSurface,
}

impl Advisor {
    pub fn new(alpha_surface: SigmoidSurface, beta_surface: CosineSurface) -> Self {
        Self {
            alpha_surface,
            beta_surface,
        }
    }

    pub fn recommend_for_features(&self, features: FeatureVector) -> Recommendation {
        let x = features.n as f64;
        let y = features.sigma_v;
        let a = self.alpha_surface.evaluate(x, y);
        let b = self.beta_surface.evaluate(x, y);
        let alpha = a.value.clamp(ALPHA_BAND.0, ALPHA_BAND.1);
        let beta = b.value.clamp(BETA_BAND.0, BETA_BAND.1);
        Recommendation {
            alpha,
            beta,
            raw_alpha: a.value,
            raw_beta: b.value,
            features,
            clamped: alpha != a.value || beta != b.value,
            input_clamped: a.clamped || b.clamped,
        }
    }

    pub fn recommend(&self, roadmap: &Roadmap) -> Recommendation {
        self.recommend_for_features(extract_features(roadmap))
    }

    /// (alpha, beta) for the uniform rule, independent of the instance.
    pub fn uniform_baseline(&self) -> (f64, f64) {
        UNIFORM_BASELINE
    }
}

/// Recommendation from the default surfaces.
pub fn recommend(roadmap: &Roadmap) -> Recommendation {
    Advisor::default().recommend(roadmap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_basis() {
        assert_eq!(sigmoid_basis(1, 0.5), 0.5);
        assert_eq!(sigmoid_basis(1, -1.0), -1.0);
    }

    #[test]
    fn shifted_sigmoid_midpoint() {
        assert!(sigmoid_basis(2, -0.6).abs() < 1e-15);
        assert!(sigmoid_basis(3, -0.2).abs() < 1e-15);
    }

    #[test]
    fn s3_at_one() {
        // -1 + 2 / (1 + e^-10)
        let expected = 0.999_909_204_262_595_1;
        assert!((sigmoid_basis(3, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn basis_index_zero_panics() {
        sigmoid_basis(0, 0.0);
    }

    #[test]
    fn cross_index_layout() {
        let order: Vec<(usize, usize)> = vec![
            (1, 1),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 1),
            (2, 2),
            (2, 3),
            (3, 1),
            (3, 2),
            (4, 1),
        ];
        for (k, (i, j)) in order.into_iter().enumerate() {
            assert_eq!(cross_index(i, j), k);
        }
        let co = alpha_coefficients();
        assert_eq!(co.d(1, 2), 1.319);
        assert_eq!(co.d(4, 1), -1.022);
        assert_eq!(beta_coefficients().d(3, 1), -0.101);
    }

    #[test]
    fn constant_surfaces() {
        let s = SigmoidSurface {
            coefficients: SeriesCoefficients::constant(0.7),
            ..SigmoidSurface::default()
        };
        let c = CosineSurface {
            coefficients: SeriesCoefficients::constant(3.3),
            ..CosineSurface::default()
        };
        for (x, y) in [(50.0, 0.0), (123.0, 0.4), (500.0, 1.0)] {
            assert_eq!(eval_sigmoid_surface(&s, x, y), 0.7);
            assert_eq!(eval_cosine_surface(&c, x, y), 3.3);
        }
    }

    #[test]
    fn b1_term_vanishes_at_midpoint() {
        let mut co = SeriesCoefficients::constant(0.0);
        co.b[0] = 42.0;
        let s = SigmoidSurface {
            coefficients: co,
            ..SigmoidSurface::default()
        };
        assert_eq!(eval_sigmoid_surface(&s, 275.0, 0.5), 0.0);
    }

    #[test]
    fn cosine_origin_is_coefficient_sum() {
        // 3.76 + (-0.087) + (-0.2) + (-0.36)
        let v = eval_cosine_surface(&CosineSurface::default(), 50.0, 0.0);
        assert!((v - 3.113).abs() < 1e-12);
    }

    #[test]
    fn cosine_odd_terms_vanish_at_half_pi() {
        let mut co = SeriesCoefficients::constant(1.0);
        co.b = [10.0, 0.0, 20.0, 0.0, 30.0];
        let s = CosineSurface {
            coefficients: co,
            ..CosineSurface::default()
        };
        assert!((eval_cosine_surface(&s, 275.0, 0.3) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn out_of_range_inputs_clamp() {
        let s = SigmoidSurface::default();
        let inside = s.evaluate(500.0, 1.0);
        let outside = s.evaluate(900.0, 4.0);
        assert!(!inside.clamped);
        assert!(outside.clamped);
        assert_eq!(inside.value, outside.value);
    }

    #[test]
    fn uniform_baseline_is_classical() {
        assert_eq!(Advisor::default().uniform_baseline(), (1.0, 2.0));
    }

    #[test]
    fn recommendation_bands() {
        let advisor = Advisor::default();
        for n in [10, 50, 200, 250, 700] {
            for sigma_v in [0.0, 0.3, 0.6, 2.0] {
                let r = advisor.recommend_for_features(FeatureVector {
                    n,
                    width: 300.0,
                    height: 300.0,
                    sigma_v,
                });
                assert!((ALPHA_BAND.0..=ALPHA_BAND.1).contains(&r.alpha));
                assert!((BETA_BAND.0..=BETA_BAND.1).contains(&r.beta));
                assert_eq!(r.clamped, r.alpha != r.raw_alpha || r.beta != r.raw_beta);
            }
        }
    }

    #[test]
    fn coefficient_file_round_trip() {
        let file = CoefficientFile {
            kind: SeriesKind::Cosine,
            coefficients: beta_coefficients(),
            x_range: AxisRange {
                min: 100.0,
                max: 300.0,
            },
            y_range: AxisRange { min: 0.1, max: 0.9 },
        };
        let parsed: CoefficientFile = file.to_text().parse().unwrap();
        assert_eq!(parsed, file);
    }

    #[test]
    fn coefficient_file_in_published_layout() {
        let text = "function = sigmoid\n\
            a = 0.538, b1 = -2.167, b2 = 0.903, b3 = 0.479, b4 = 0.215, b5 = 0.410, \
            c1 = -0.207, c2 = 0.829, c3 = -0.079, c4 = 0.052, c5 = 0.190, d11 = 0.050, \
            d12 = 1.319, d13 = -0.15, d14 = 0.57, d21 = -0.2, d22 = -0.63, d23 = -0.09, \
            d31 = 0.027, d32 = -0.18, d41 = -1.022\n";
        let parsed: CoefficientFile = text.parse().unwrap();
        assert_eq!(parsed.coefficients, alpha_coefficients());
        assert_eq!(parsed.into_sigmoid(), SigmoidSurface::default());
    }

    #[test]
    fn coefficient_file_errors() {
        let missing = "function = cosine\na = 1\n";
        assert_eq!(
            missing.parse::<CoefficientFile>(),
            Err(AdvisorError::Missing("b1".into()))
        );
        let bad = "function = cosine\na = x\n";
        assert!(matches!(
            bad.parse::<CoefficientFile>(),
            Err(AdvisorError::Parse { line: 2, .. })
        ));
        let unknown = "function = cosine\nd51 = 1\n";
        assert!(matches!(
            unknown.parse::<CoefficientFile>(),
            Err(AdvisorError::Parse { line: 2, .. })
        ));
        let range = "function = cosine\nx_range = 5 1\n";
        assert!(matches!(
            range.parse::<CoefficientFile>(),
            Err(AdvisorError::Range { .. })
        ));
    }
}
