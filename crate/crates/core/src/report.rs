//! JSON reports.
//!
//! Every real number is written with 17 significant digits; non-finite
//! values are the strings `"inf"`, `"-inf"` and `"nan"`.

use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::estimator::Estimate;
use crate::intervals::{CombinedIntervals, CombinedStatus, Interval};
use crate::simulator::{ChainModel, CoverageSummary, Proportion, Quantiles, Start};

pub const SCHEMA_VERSION: u32 = 1;

/// An `f64` with the report's text encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("nan")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            let text = format!("{x:.16e}");
            let number = serde_json::Number::from_str(&text).map_err(serde::ser::Error::custom)?;
            number.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Real)
                .ok_or_else(|| D::Error::custom(format!("unrepresentable number {n}"))),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Ok(Real(f64::INFINITY)),
                "-inf" => Ok(Real(f64::NEG_INFINITY)),
                "nan" => Ok(Real(f64::NAN)),
                other => Err(D::Error::custom(format!(
                    "expected a number, got {other:?}"
                ))),
            },
            other => Err(D::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub lo: Real,
    pub hi: Real,
}

impl From<Interval> for IntervalReport {
    fn from(iv: Interval) -> Self {
        Self {
            lo: Real(iv.lo),
            hi: Real(iv.hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateInputs {
    pub n: usize,
    pub d: usize,
    /// `d` was taken as one plus the largest observed state.
    pub d_inferred: bool,
    pub delta: Real,
    pub c: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationReport {
    pub lo: Real,
    pub hi: Real,
    /// Always true: obtained by mapping the gap interval through `1/x`.
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedReport {
    pub pimin: IntervalReport,
    pub gap: IntervalReport,
    pub status: CombinedStatus,
    pub pimin_lower_bound: Real,
    pub gap_lower_bound: Real,
    pub freq_pimin: Real,
    pub freq_gap: Option<Real>,
    pub err_constant: Real,
}

impl From<&CombinedIntervals> for CombinedReport {
    fn from(c: &CombinedIntervals) -> Self {
        Self {
            pimin: c.pimin.into(),
            gap: c.gap.into(),
            status: c.status,
            pimin_lower_bound: Real(c.pimin_lower_bound),
            gap_lower_bound: Real(c.gap_lower_bound),
            freq_pimin: Real(c.freq_pimin),
            freq_gap: c.freq_gap.map(Real),
            err_constant: Real(c.err_constant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalsReport {
    pub pi: Vec<IntervalReport>,
    pub gap: IntervalReport,
    pub pimin: IntervalReport,
    pub relaxation_time: RelaxationReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined: Option<CombinedReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub schema_version: u32,
    pub inputs: EstimateInputs,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_hat: Option<Vec<Vec<Real>>>,
    pub pi_hat: Vec<Real>,
    pub eigenvalues: Vec<Real>,
    pub gap_hat: Real,
    pub relaxation_time_hat: Real,
    pub tau_hat: Real,
    pub kappa_hat: Real,
    pub b_hat: Real,
    pub rho_hat: Real,
    pub w_hat: Real,
    pub max_b: Real,
    pub intervals: IntervalsReport,
    pub timings: Timings,
}

impl EstimationReport {
    pub fn new(est: &Estimate, d_inferred: bool, emit_matrix: bool, total_ms: f64) -> Self {
        let set = &est.intervals;
        Self {
            schema_version: SCHEMA_VERSION,
            inputs: EstimateInputs {
                n: est.n,
                d: est.d,
                d_inferred,
                delta: Real(est.delta),
                c: Real(est.tail.c),
            },
            p_hat: emit_matrix.then(|| {
                est.p_hat
                    .matrix()
                    .to_rows()
                    .iter()
                    .map(|r| reals(r))
                    .collect()
            }),
            pi_hat: reals(est.pi_hat.values()),
            eigenvalues: reals(est.eigenvalues.values()),
            gap_hat: Real(est.gap_hat),
            relaxation_time_hat: Real(est.relaxation_time_hat()),
            tau_hat: Real(est.tail.tau),
            kappa_hat: Real(est.kappa),
            b_hat: Real(est.b),
            rho_hat: Real(est.rho),
            w_hat: Real(est.w),
            max_b: Real(est.max_bound()),
            intervals: IntervalsReport {
                pi: set.pi.iter().map(|&iv| iv.into()).collect(),
                gap: set.gap.into(),
                pimin: set.pimin.into(),
                relaxation_time: RelaxationReport {
                    lo: Real(set.relaxation_time.lo),
                    hi: Real(set.relaxation_time.hi),
                    derived: true,
                },
                combined: set.combined.as_ref().map(CombinedReport::from),
            },
            timings: Timings {
                total_ms: Real(total_ms),
            },
        }
    }
}

/// Ground truth of a simulated chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthReport {
    pub schema_version: u32,
    pub d: usize,
    pub pi: Vec<Real>,
    pub pimin: Real,
    pub gap: Real,
    pub relaxation_time: Real,
    pub kappa: Real,
    pub reversible: bool,
}

impl TruthReport {
    pub fn new(model: &ChainModel, kappa: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            d: model.dim(),
            pi: reals(model.pi.values()),
            pimin: Real(model.pimin()),
            gap: Real(model.gap),
            relaxation_time: Real(1.0 / model.gap),
            kappa: Real(kappa),
            reversible: model.reversible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub fraction: Real,
    pub standard_error: Real,
    pub successes: usize,
}

impl From<Proportion> for ProportionReport {
    fn from(p: Proportion) -> Self {
        Self {
            fraction: Real(p.fraction()),
            standard_error: Real(p.standard_error()),
            successes: p.successes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub q10: Real,
    pub median: Real,
    pub q90: Real,
}

impl From<Quantiles> for QuantileReport {
    fn from(q: Quantiles) -> Self {
        Self {
            q10: Real(q.q10),
            median: Real(q.median),
            q90: Real(q.q90),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageTargets {
    /// All `pi_i` covered simultaneously.
    pub pi: ProportionReport,
    pub gap: ProportionReport,
    pub pimin: ProportionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined_pimin: Option<ProportionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined_gap: Option<ProportionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined_gap_subset: Option<ProportionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined_intersected: Option<ProportionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub b: QuantileReport,
    pub w: QuantileReport,
    pub gap_interval: QuantileReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub combined_gap_interval: Option<QuantileReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub schema_version: u32,
    pub chain: String,
    pub d: usize,
    pub n: usize,
    pub delta: Real,
    pub trials: usize,
    pub seed: u64,
    pub start: String,
    pub true_pi: Vec<Real>,
    pub true_gap: Real,
    pub coverage: CoverageTargets,
    pub widths: WidthReport,
}

impl CoverageReport {
    pub fn new(chain: &str, s: &CoverageSummary) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            chain: chain.to_string(),
            d: s.true_pi.len(),
            n: s.config.n,
            delta: Real(s.config.delta),
            trials: s.config.trials,
            seed: s.config.master_seed,
            start: match s.config.start {
                Start::Stationary => "stationary".into(),
                Start::State(i) => i.to_string(),
            },
            true_pi: reals(&s.true_pi),
            true_gap: Real(s.true_gap),
            coverage: CoverageTargets {
                pi: s.pi.into(),
                gap: s.gap.into(),
                pimin: s.pimin.into(),
                combined_pimin: s.combined_pimin.map(Into::into),
                combined_gap: s.combined_gap.map(Into::into),
                combined_gap_subset: s.combined_gap_subset.map(Into::into),
                combined_intersected: s.combined_intersected.map(Into::into),
            },
            widths: WidthReport {
                b: s.b.into(),
                w: s.w.into(),
                gap_interval: s.gap_width.into(),
                combined_gap_interval: s.combined_gap_width.map(Into::into),
            },
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_use_17_significant_digits() {
        let s = serde_json::to_string(&Real(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(
            serde_json::to_string(&Real(f64::INFINITY)).unwrap(),
            "\"inf\""
        );
        assert_eq!(
            serde_json::to_string(&Real(-2.5)).unwrap(),
            "-2.5000000000000000e+0"
        );
    }

    #[test]
    fn non_finite_round_trip() {
        for x in [f64::INFINITY, f64::NEG_INFINITY] {
            let back: Real =
                serde_json::from_str(&serde_json::to_string(&Real(x)).unwrap()).unwrap();
            assert_eq!(back.0, x);
        }
        let nan: Real = serde_json::from_str("\"nan\"").unwrap();
        assert!(nan.0.is_nan());
        assert!(serde_json::from_str::<Real>("\"fast\"").is_err());
        let plain: Real = serde_json::from_str("3").unwrap();
        assert_eq!(plain.0, 3.0);
    }
}
