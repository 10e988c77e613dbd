//! Synthetic access matrices with implanted coherent biclusters, and
//! Jaccard-based recovery scoring against the implants.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ingest::AccessMatrix;
use crate::metrics::Bicluster;
use crate::rng::from_seed;

/// How implant rows relate to the shared base pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceModel {
    /// `row_i = base + β_i`
    Shift,
    /// `row_i = α_i · base`, `α_i > 0`
    Scale,
    /// `row_i = α_i · base + β_i`
    ShiftScale,
}

impl CoherenceModel {
    pub fn name(self) -> &'static str {
        match self {
            CoherenceModel::Shift => "shift",
            CoherenceModel::Scale => "scale",
            CoherenceModel::ShiftScale => "shift-scale",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplantSpec {
    pub rows: usize,
    pub cols: usize,
    /// First host row covered; the implant spans `row_offset..row_offset + rows`.
    pub row_offset: usize,
    pub col_offset: usize,
    pub model: CoherenceModel,
    /// Range of the base pattern values.
    pub base_range: (f64, f64),
    /// Range of the additive coefficients β.
    pub shift_range: (f64, f64),
    /// Range of the multiplicative coefficients α; must be strictly positive.
    pub scale_range: (f64, f64),
}

impl ImplantSpec {
    pub fn new(
        rows: usize,
        cols: usize,
        row_offset: usize,
        col_offset: usize,
        model: CoherenceModel,
    ) -> Self {
        Self {
            rows,
            cols,
            row_offset,
            col_offset,
            model,
            base_range: (10.0, 50.0),
            shift_range: (0.0, 20.0),
            scale_range: (0.5, 2.0),
        }
    }

    pub fn truth(&self) -> Bicluster {
        Bicluster::new(
            (self.row_offset..self.row_offset + self.rows).collect(),
            (self.col_offset..self.col_offset + self.cols).collect(),
        )
    }

    fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::Config(format!(
                "implant {}x{} is smaller than 2x2",
                self.rows, self.cols
            )));
        }
        if self.row_offset + self.rows > n || self.col_offset + self.cols > m {
            return Err(Error::Config(format!(
                "implant {}x{} at ({}, {}) does not fit a {n}x{m} host",
                self.rows, self.cols, self.row_offset, self.col_offset
            )));
        }
        let ordered = |(lo, hi): (f64, f64)| lo <= hi && lo.is_finite() && hi.is_finite();
        if !ordered(self.base_range) || !ordered(self.shift_range) || !ordered(self.scale_range) {
            return Err(Error::Config(
                "implant ranges must be finite with lo <= hi".into(),
            ));
        }
        if self.scale_range.0 <= 0.0 {
            return Err(Error::Config(
                "scale coefficients must be strictly positive".into(),
            ));
        }
        if self.base_range.0 < 0.0 || self.shift_range.0 < 0.0 {
            return Err(Error::Config(
                "base and shift ranges must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    /// Integer counts: the real-valued matrix rounded to the nearest integer.
    pub matrix: AccessMatrix,
    /// Values before rounding.
    pub real: AccessMatrix,
    pub truth: Vec<Bicluster>,
    /// Cells written by more than one implant (the later implant wins).
    pub overwritten_cells: usize,
}

fn draw(rng: &mut crate::rng::Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Builds an `n × m` matrix of uniform integer noise in `0..=noise_max` and
/// overwrites each implant's block with its coherence model, in order.
pub fn generate(
    n: usize,
    m: usize,
    implants: &[ImplantSpec],
    noise_max: u32,
    seed: u64,
) -> Result<SyntheticData> {
    if n < 2 || m < 2 {
        return Err(Error::Config(format!(
            "host matrix {n}x{m} is smaller than 2x2"
        )));
    }
    for imp in implants {
        imp.validate(n, m)?;
    }
    let mut rng = from_seed(seed);
    let mut real: Vec<f64> = (0..n * m)
        .map(|_| f64::from(rng.gen_range(0..=noise_max)))
        .collect();
    let mut written = alloc::vec![0u8; n * m];

    for imp in implants {
        let base: Vec<f64> = (0..imp.cols)
            .map(|_| draw(&mut rng, imp.base_range))
            .collect();
        for r in 0..imp.rows {
            let (alpha, beta) = match imp.model {
                CoherenceModel::Shift => (1.0, draw(&mut rng, imp.shift_range)),
                CoherenceModel::Scale => (draw(&mut rng, imp.scale_range), 0.0),
                CoherenceModel::ShiftScale => {
                    let a = draw(&mut rng, imp.scale_range);
                    (a, draw(&mut rng, imp.shift_range))
                }
            };
            let i = imp.row_offset + r;
            for (c, &b) in base.iter().enumerate() {
                let cell = i * m + imp.col_offset + c;
                real[cell] = alpha * b + beta;
                written[cell] = written[cell].saturating_add(1);
            }
        }
    }

    let rounded: Vec<f64> = real.iter().map(|&v| libm::round(v).max(0.0)).collect();
    Ok(SyntheticData {
        matrix: AccessMatrix::new(n, m, rounded)?,
        real: AccessMatrix::new(n, m, real)?,
        truth: implants.iter().map(ImplantSpec::truth).collect(),
        overwritten_cells: written.iter().filter(|&&w| w > 1).count(),
    })
}

/// Intersection over union of the element sets of two biclusters; 0 when
/// both are empty.
pub fn jaccard(a: &Bicluster, b: &Bicluster) -> f64 {
    let shared_rows = a.rows().iter().filter(|&&i| b.contains_row(i)).count();
    let shared_cols = a.cols().iter().filter(|&&j| b.contains_col(j)).count();
    let inter = shared_rows * shared_cols;
    let union = a.volume() + b.volume() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    /// Best Jaccard over `found` for each truth bicluster.
    pub per_truth: Vec<f64>,
    /// Mean of `per_truth`, 0 when there is no truth.
    pub mean: f64,
}

pub fn score_recovery(found: &[Bicluster], truth: &[Bicluster]) -> Recovery {
    let per_truth: Vec<f64> = truth
        .iter()
        .map(|t| found.iter().map(|f| jaccard(f, t)).fold(0.0, f64::max))
        .collect();
    let mean = if per_truth.is_empty() {
        0.0
    } else {
        per_truth.iter().sum::<f64>() / per_truth.len() as f64
    };
    Recovery { per_truth, mean }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::acv;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn no_implants_is_pure_noise() {
        let d = generate(10, 6, &[], 5, 1).unwrap();
        assert!(d.truth.is_empty());
        assert!(d
            .matrix
            .values()
            .iter()
            .all(|&v| (0.0..=5.0).contains(&v) && v.fract() == 0.0));
    }

    #[test]
    fn shift_implant_is_perfectly_coherent_before_rounding() {
        let imp = ImplantSpec::new(10, 5, 3, 1, CoherenceModel::Shift);
        let d = generate(30, 12, &[imp], 5, 2).unwrap();
        let v = acv(&d.real, &d.truth[0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn scale_and_shift_scale_are_coherent_before_rounding() {
        for model in [CoherenceModel::Scale, CoherenceModel::ShiftScale] {
            let imp = ImplantSpec::new(8, 6, 0, 0, model);
            let d = generate(20, 10, &[imp], 5, 3).unwrap();
            assert!((acv(&d.real, &d.truth[0]).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rounded_scale_implant_stays_coherent() {
        for seed in 0..20 {
            let imp = ImplantSpec::new(10, 5, 2, 2, CoherenceModel::Scale);
            let d = generate(25, 10, &[imp], 5, seed).unwrap();
            let v = acv(&d.matrix, &d.truth[0]).unwrap();
            assert!(v >= 0.95, "seed {seed}: {v}");
        }
    }

    #[test]
    fn overlapping_implants_are_counted() {
        let a = ImplantSpec::new(4, 4, 0, 0, CoherenceModel::Shift);
        let b = ImplantSpec::new(4, 4, 2, 2, CoherenceModel::Scale);
        let d = generate(10, 10, &[a, b], 5, 4).unwrap();
        assert_eq!(d.overwritten_cells, 4);
    }

    #[test]
    fn implants_must_fit() {
        assert!(generate(
            5,
            5,
            &[ImplantSpec::new(4, 4, 2, 0, CoherenceModel::Shift)],
            5,
            0
        )
        .is_err());
        assert!(generate(
            5,
            5,
            &[ImplantSpec::new(1, 4, 0, 0, CoherenceModel::Shift)],
            5,
            0
        )
        .is_err());
        let mut bad = ImplantSpec::new(2, 2, 0, 0, CoherenceModel::Scale);
        bad.scale_range = (0.0, 1.0);
        assert!(generate(5, 5, &[bad], 5, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let imp = ImplantSpec::new(5, 3, 1, 1, CoherenceModel::ShiftScale);
        assert_eq!(
            generate(12, 8, core::slice::from_ref(&imp), 5, 9).unwrap(),
            generate(12, 8, &[imp], 5, 9).unwrap()
        );
    }

    #[test]
    fn jaccard_examples() {
        let a = Bicluster::new(vec![0, 1], vec![0, 1]);
        assert_eq!(jaccard(&a, &a), 1.0);
        assert_eq!(jaccard(&a, &Bicluster::new(vec![2, 3], vec![0, 1])), 0.0);
        assert_eq!(
            jaccard(&a, &Bicluster::new(vec![0, 1], vec![0, 1, 2, 3])),
            0.5
        );
        assert_eq!(jaccard(&Bicluster::default(), &Bicluster::default()), 0.0);
    }

    #[test]
    fn recovery_examples() {
        let truth = vec![
            Bicluster::new(vec![0, 1], vec![0, 1]),
            Bicluster::new(vec![4, 5], vec![2, 3]),
        ];
        let r = score_recovery(&truth, &truth);
        assert_eq!(r.per_truth, [1.0, 1.0]);
        assert_eq!(score_recovery(&[], &truth).per_truth, [0.0, 0.0]);

        let t = Bicluster::new(vec![0, 1, 2, 3], vec![0, 1, 2, 3, 4]);
        let half = Bicluster::new(vec![0, 1], vec![0, 1, 2, 3, 4]);
        let most = Bicluster::new(vec![0, 1, 2, 3], vec![0, 1, 2, 3]);
        assert_eq!(jaccard(&half, &t), 0.5);
        assert_eq!(jaccard(&most, &t), 0.8);
        assert_eq!(score_recovery(&[half, most], &[t]).per_truth, [0.8]);
    }

    proptest! {
        #[test]
        fn jaccard_symmetric_and_one_iff_equal(
            r1 in prop::sample::subsequence((0..6).collect::<Vec<_>>(), 1..=6),
            c1 in prop::sample::subsequence((0..5).collect::<Vec<_>>(), 1..=5),
            r2 in prop::sample::subsequence((0..6).collect::<Vec<_>>(), 1..=6),
            c2 in prop::sample::subsequence((0..5).collect::<Vec<_>>(), 1..=5),
        ) {
            let a = Bicluster::new(r1, c1);
            let b = Bicluster::new(r2, c2);
            let j = jaccard(&a, &b);
            prop_assert_eq!(j, jaccard(&b, &a));
            prop_assert_eq!(j == 1.0, a == b);
            prop_assert!((0.0..=1.0).contains(&j));
        }
    }
}
