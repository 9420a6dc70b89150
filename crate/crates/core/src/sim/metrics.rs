use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::truth::{GroundTruth, Label};
use crate::Verdict;

/// Misclassification percentages against the ground truth. `None` means
/// the ground-truth class was empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Mandatory nodes classified Interior.
    pub mandatory_fn_pct: Option<f64>,
    /// Optional nodes classified Interior.
    pub optional_interior_pct: Option<f64>,
    /// Interior nodes classified Boundary.
    pub interior_fp_pct: Option<f64>,
}

fn pct(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * hits as f64 / total as f64)
}

pub fn evaluate(gt: &GroundTruth, cls: &[Verdict]) -> Result<Metrics> {
    if gt.labels.len() != cls.len() {
        return Err(Error::UniverseMismatch { truth: gt.labels.len(), classified: cls.len() });
    }
    let mut total = [0usize; 3];
    let mut hits = [0usize; 3];
    for (&label, &v) in gt.labels.iter().zip(cls) {
        let (slot, miss) = match label {
            Label::Mandatory => (0, v == Verdict::Interior),
            Label::Optional => (1, v == Verdict::Interior),
            Label::Interior => (2, v == Verdict::Boundary),
        };
        total[slot] += 1;
        hits[slot] += miss as usize;
    }
    Ok(Metrics {
        mandatory_fn_pct: pct(hits[0], total[0]),
        optional_interior_pct: pct(hits[1], total[1]),
        interior_fp_pct: pct(hits[2], total[2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(labels: Vec<Label>) -> GroundTruth {
        GroundTruth { labels, holes: Vec::new(), h_min: 4.0 }
    }

    #[test]
    fn perfect_and_all_boundary() {
        use Label::*;
        let gt = truth(vec![Mandatory, Optional, Interior, Interior]);
        let b = Verdict::Boundary;
        let i = Verdict::Interior;
        let m = evaluate(&gt, &[b, b, i, i]).unwrap();
        assert_eq!(m, Metrics { mandatory_fn_pct: Some(0.0), optional_interior_pct: Some(0.0), interior_fp_pct: Some(0.0) });
        let m = evaluate(&gt, &[b; 4]).unwrap();
        assert_eq!(m.mandatory_fn_pct, Some(0.0));
        assert_eq!(m.interior_fp_pct, Some(100.0));
    }

    #[test]
    fn one_of_four_mandatory_missed() {
        use Label::*;
        let gt = truth(vec![Mandatory, Mandatory, Mandatory, Mandatory, Optional, Optional, Interior, Interior, Interior, Interior]);
        let b = Verdict::Boundary;
        let i = Verdict::Interior;
        let m = evaluate(&gt, &[i, b, b, b, b, i, i, i, i, b]).unwrap();
        assert_eq!(m.mandatory_fn_pct, Some(25.0));
        assert_eq!(m.optional_interior_pct, Some(50.0));
        assert_eq!(m.interior_fp_pct, Some(25.0));
    }

    #[test]
    fn empty_class_is_not_applicable() {
        let gt = truth(vec![Label::Mandatory]);
        let m = evaluate(&gt, &[Verdict::Boundary]).unwrap();
        assert_eq!(m.optional_interior_pct, None);
        assert_eq!(m.interior_fp_pct, None);
        assert_eq!(serde_json::to_value(m).unwrap()["interior_fp_pct"], serde_json::Value::Null);
    }

    #[test]
    fn universe_mismatch() {
        let gt = truth(vec![Label::Mandatory; 3]);
        assert!(matches!(evaluate(&gt, &[Verdict::Boundary]), Err(Error::UniverseMismatch { truth: 3, classified: 1 })));
    }
}
