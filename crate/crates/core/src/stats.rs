//! Compensated summation, batch-means errors, the two-sample
//! Kolmogorov-Smirnov test and isotonic regression.

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

/// Means of `n_batches` contiguous batches of equal length; a tail shorter
/// than one batch is dropped. Falls back to one value per batch when there
/// are fewer values than batches.
pub fn batch_means(values: &[f64], n_batches: usize) -> Vec<f64> {
    let nb = n_batches.clamp(1, values.len().max(1));
    let size = values.len() / nb;
    if size == 0 {
        return Vec::new();
    }
    values.chunks_exact(size).take(nb).map(|c| c.iter().sum::<f64>() / size as f64).collect()
}

/// Mean and standard error of i.i.d. values (here, batch means).
pub fn mean_and_se_iid(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Mean of a correlated series with its batch-means standard error.
pub fn mean_and_se(values: &[f64], n_batches: usize) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (_, se) = mean_and_se_iid(&batch_means(values, n_batches));
    (mean, se)
}

/// Pools several independent series: the mean is over all values and the
/// error comes from the batch means of every series together.
pub fn pooled_mean_and_se<'a>(series: impl IntoIterator<Item = &'a [f64]>, batches_per_series: usize) -> (f64, f64) {
    let mut total = NeumaierSum::new();
    let mut count = 0usize;
    let mut means = Vec::new();
    for s in series {
        s.iter().for_each(|&x| total.add(x));
        count += s.len();
        means.extend(batch_means(s, batches_per_series));
    }
    let (_, se) = mean_and_se_iid(&means);
    (total.value() / count as f64, se)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov tail `Q(λ) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS test with the asymptotic p-value and Stephens'
/// small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    ks_two_sample_effective(a, b, a.len() as f64, b.len() as f64)
}

/// As [`ks_two_sample`], with the p-value taken at effective sample sizes
/// `n_a` and `n_b` (for correlated draws).
pub fn ks_two_sample_effective(a: &[f64], b: &[f64], n_a: f64, n_b: f64) -> KsResult {
    let d = ks_statistic(a, b);
    if d == 0.0 {
        return KsResult { statistic: 0.0, p_value: 1.0 };
    }
    let en = (n_a * n_b / (n_a + n_b)).sqrt();
    KsResult { statistic: d, p_value: kolmogorov_q((en + 0.12 + 0.11 / en) * d) }
}

/// Variance inflation of a correlated series, `(se_batch / se_iid)^2`,
/// never below one.
pub fn variance_inflation<'a>(series: impl IntoIterator<Item = &'a [f64]> + Clone, batches_per_series: usize) -> f64 {
    let all: Vec<f64> = series.clone().into_iter().flatten().copied().collect();
    let (_, se_iid) = mean_and_se_iid(&all);
    let (_, se_bm) = pooled_mean_and_se(series, batches_per_series);
    if se_iid > 0.0 && se_bm.is_finite() {
        (se_bm / se_iid).powi(2).max(1.0)
    } else {
        1.0
    }
}

/// Weighted least-squares fit by a non-decreasing sequence (pool adjacent
/// violators).
pub fn isotonic_non_decreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    // blocks of (mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&y, &w) in values.iter().zip(weights) {
        blocks.push((y, w, 1));
        while blocks.len() > 1 {
            let (m2, w2, l2) = blocks[blocks.len() - 1];
            let (m1, w1, l1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            let m = if w > 0.0 { (m1 * w1 + m2 * w2) / w } else { 0.5 * (m1 + m2) };
            *blocks.last_mut().unwrap() = (m, w, l1 + l2);
        }
    }
    blocks.into_iter().flat_map(|(m, _, l)| std::iter::repeat_n(m, l)).collect()
}

pub fn isotonic_non_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = values.iter().map(|x| -x).collect();
    isotonic_non_decreasing(&neg, weights).into_iter().map(|x| -x).collect()
}

/// `Σ w_i |y_i - fit_i|` for the isotonic fit in the given direction.
pub fn isotonic_distance(values: &[f64], weights: &[f64], increasing: bool) -> f64 {
    let fit =
        if increasing { isotonic_non_decreasing(values, weights) } else { isotonic_non_increasing(values, weights) };
    values.iter().zip(&fit).zip(weights).map(|((y, f), w)| w * (y - f).abs()).sum()
}
