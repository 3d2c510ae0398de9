//! k-means with k-means++ seeding, silhouette scoring, the adjusted Rand
//! index, and Kneedle-style elbow distances for cluster-number selection.

use super::AnalysisError;
use crate::rng::{substream, substream_seed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Column-standardized feature block. Constant columns are dropped and
/// reported rather than standardized.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScored {
    pub data: Vec<Vec<f64>>,
    pub kept_columns: Vec<usize>,
    pub dropped_columns: Vec<usize>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

/// Standardizes every column to mean 0 and population SD 1.
pub fn zscore(rows: &[Vec<f64>]) -> ZScored {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut means = vec![0.0; cols];
    let mut sds = vec![0.0; cols];
    let mut kept_columns = Vec::new();
    let mut dropped_columns = Vec::new();
    for j in 0..cols {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        means[j] = mean;
        sds[j] = var.sqrt();
        if sds[j] > 1e-12 {
            kept_columns.push(j);
        } else {
            dropped_columns.push(j);
        }
    }
    let data = rows
        .iter()
        .map(|r| kept_columns.iter().map(|&j| (r[j] - means[j]) / sds[j]).collect())
        .collect();
    ZScored {
        data,
        kept_columns,
        dropped_columns,
        means,
        sds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub wcss: f64,
    /// WCSS after each Lloyd iteration (non-increasing).
    pub wcss_trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from k-means++ seeding until the assignment fixpoint or
/// `max_iter`; empty clusters are re-seeded to the point farthest from its
/// centroid. Deterministic per seed.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult, AnalysisError> {
    let n = points.len();
    if n == 0 {
        return Err(AnalysisError::Empty);
    }
    if k == 0 || k > n {
        return Err(AnalysisError::BadK { k, n });
    }
    let dim = points[0].len();
    let mut rng = substream(seed, "kmeans");

    // k-means++: later centers drawn proportionally to squared distance.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if u < *w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, centroids.last().expect("just pushed")));
        }
    }

    let mut labels = vec![0usize; n];
    let mut wcss_trace = Vec::new();
    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
            wcss += best_d;
        }
        wcss_trace.push(wcss);
        if !changed && wcss_trace.len() > 1 {
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            } else {
                // Re-seed to the farthest available point.
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| {
                        sq_dist(&points[a], &centroids[labels[a]])
                            .total_cmp(&sq_dist(&points[b], &centroids[labels[b]]))
                    })
                    .expect("n >= k leaves a point available");
                taken[far] = true;
                centroids[c] = points[far].clone();
            }
        }
    }

    let wcss = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    Ok(KMeansResult {
        labels,
        centroids,
        wcss,
        wcss_trace,
    })
}

/// Mean silhouette score over all points: (b - a) / max(a, b), with
/// singleton-cluster points scoring 0.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize]) -> Result<f64, AnalysisError> {
    if points.len() != labels.len() {
        return Err(AnalysisError::LengthMismatch(points.len(), labels.len()));
    }
    let n = points.len();
    if n == 0 {
        return Err(AnalysisError::Empty);
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(AnalysisError::SingleCluster);
    }
    let mut total = 0.0;
    for i in 0..n {
        if sizes[labels[i]] == 1 {
            continue; // singleton scores 0
        }
        let mut dist_sum = vec![0.0; k];
        for j in 0..n {
            if i != j {
                dist_sum[labels[j]] += sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let own = labels[i];
        let a = dist_sum[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| dist_sum[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

fn pairs(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

fn normalized_partition(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Pair-counting adjusted Rand index with expected-index correction;
/// symmetric and invariant to relabeling.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut contingency: HashMap<(usize, usize), f64> = HashMap::new();
    let mut row: HashMap<usize, f64> = HashMap::new();
    let mut col: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *contingency.entry((x, y)).or_default() += 1.0;
        *row.entry(x).or_default() += 1.0;
        *col.entry(y).or_default() += 1.0;
    }
    let index: f64 = contingency.values().map(|&v| pairs(v)).sum();
    let row_sum: f64 = row.values().map(|&v| pairs(v)).sum();
    let col_sum: f64 = col.values().map(|&v| pairs(v)).sum();
    let total_pairs = pairs(a.len() as f64);
    let expected = row_sum * col_sum / total_pairs;
    let max_index = 0.5 * (row_sum + col_sum);
    if (max_index - expected).abs() < 1e-12 {
        // Both partitions trivial (all-singletons or one cluster each).
        return Ok(if normalized_partition(a) == normalized_partition(b) {
            1.0
        } else {
            0.0
        });
    }
    Ok((index - expected) / (max_index - expected))
}

/// Normalized vertical distance from a curve to the chord joining its
/// endpoints, after min-max normalizing both axes over the scanned range.
/// Endpoints get distance 0 by construction.
pub fn kneedle_distance(wcss_by_k: &[(usize, f64)]) -> Result<Vec<f64>, AnalysisError> {
    if wcss_by_k.len() < 3 {
        return Err(AnalysisError::BadKGrid);
    }
    for pair in wcss_by_k.windows(2) {
        if pair[1].0 != pair[0].0 + 1 {
            return Err(AnalysisError::BadKGrid);
        }
    }
    let x0 = wcss_by_k[0].0 as f64;
    let x1 = wcss_by_k[wcss_by_k.len() - 1].0 as f64;
    let ymin = wcss_by_k.iter().map(|&(_, y)| y).fold(f64::INFINITY, f64::min);
    let ymax = wcss_by_k.iter().map(|&(_, y)| y).fold(f64::NEG_INFINITY, f64::max);
    if ymax - ymin <= 0.0 {
        return Ok(vec![0.0; wcss_by_k.len()]);
    }
    let yn: Vec<f64> = wcss_by_k.iter().map(|&(_, y)| (y - ymin) / (ymax - ymin)).collect();
    let y_first = yn[0];
    let y_last = yn[yn.len() - 1];
    Ok(wcss_by_k
        .iter()
        .zip(&yn)
        .map(|(&(k, _), &y)| {
            let xn = (k as f64 - x0) / (x1 - x0);
            let chord = y_first + (y_last - y_first) * xn;
            chord - y
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub k: usize,
    pub silhouette: f64,
    pub mean_ari: f64,
    /// False when only one run was requested (mean ARI defined as 1).
    pub ari_defined: bool,
    pub kneedle_dist: f64,
}

/// Per candidate k: silhouette of the best-of-`repeats` run (lowest WCSS),
/// mean pairwise ARI across the repeated runs, and the Kneedle distance of
/// the mean-WCSS curve.
pub fn select_k(
    points: &[Vec<f64>],
    k_range: (usize, usize),
    repeats: usize,
    seed: u64,
) -> Result<Vec<SelectionRow>, AnalysisError> {
    let (lo, hi) = k_range;
    let n = points.len();
    if n < 3 {
        return Err(AnalysisError::TooFewObservations { need: 3, got: n });
    }
    let max = n - 1;
    if lo < 2 || hi < lo || hi > max {
        return Err(AnalysisError::BadKRange { lo, hi, max });
    }
    if repeats == 0 {
        return Err(AnalysisError::Empty);
    }
    let mut rows = Vec::with_capacity(hi - lo + 1);
    let mut mean_wcss = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        let runs: Vec<KMeansResult> = (0..repeats)
            .map(|r| kmeans(points, k, substream_seed(seed, &format!("select/{k}/{r}")), 300))
            .collect::<Result<_, _>>()?;
        let best = runs
            .iter()
            .min_by(|a, b| a.wcss.total_cmp(&b.wcss))
            .expect("repeats >= 1");
        let sil = silhouette(points, &best.labels)?;
        let (mean_ari, ari_defined) = if repeats == 1 {
            (1.0, false)
        } else {
            let mut total = 0.0;
            let mut count = 0usize;
            for i in 0..runs.len() {
                for j in (i + 1)..runs.len() {
                    total += adjusted_rand_index(&runs[i].labels, &runs[j].labels)?;
                    count += 1;
                }
            }
            (total / count as f64, true)
        };
        mean_wcss.push((k, runs.iter().map(|r| r.wcss).sum::<f64>() / repeats as f64));
        rows.push(SelectionRow {
            k,
            silhouette: sil,
            mean_ari,
            ari_defined,
            kneedle_dist: 0.0,
        });
    }
    if rows.len() >= 3 {
        let dists = kneedle_distance(&mean_wcss)?;
        for (row, d) in rows.iter_mut().zip(dists) {
            row.kneedle_dist = d;
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub sizes: Vec<usize>,
    /// Per-cluster arithmetic means of the input columns.
    pub means: Vec<Vec<f64>>,
}

pub fn cluster_profile(labels: &[usize], rows: &[Vec<f64>], k: usize) -> Result<ClusterProfile, AnalysisError> {
    if labels.len() != rows.len() {
        return Err(AnalysisError::LengthMismatch(labels.len(), rows.len()));
    }
    if rows.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let cols = rows[0].len();
    let mut sizes = vec![0usize; k];
    let mut means = vec![vec![0.0; cols]; k];
    for (row, &l) in rows.iter().zip(labels) {
        if l >= k {
            return Err(AnalysisError::BadK { k, n: l });
        }
        sizes[l] += 1;
        for (m, v) in means[l].iter_mut().zip(row) {
            *m += v;
        }
    }
    for (mean, &size) in means.iter_mut().zip(&sizes) {
        if size > 0 {
            for v in mean.iter_mut() {
                *v /= size as f64;
            }
        }
    }
    Ok(ClusterProfile { sizes, means })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zscore_golden_column() {
        let z = zscore(&[vec![1.0], vec![2.0], vec![3.0]]);
        let sd = (2.0f64 / 3.0).sqrt();
        assert_abs_diff_eq!(z.data[0][0], -1.0 / sd, epsilon = 1e-12);
        assert_abs_diff_eq!(z.data[0][0], -1.224744871391589, epsilon = 1e-12);
        assert_abs_diff_eq!(z.data[1][0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.data[2][0], 1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn zscore_drops_constant_columns_and_is_idempotent() {
        let rows = vec![vec![1.0, 7.0], vec![2.0, 7.0], vec![4.0, 7.0]];
        let z = zscore(&rows);
        assert_eq!(z.kept_columns, vec![0]);
        assert_eq!(z.dropped_columns, vec![1]);
        assert_eq!(z.data[0].len(), 1);
        let again = zscore(&z.data);
        for (a, b) in z.data.iter().flatten().zip(again.data.iter().flatten()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn kmeans_degenerate_ks() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        // k = 1: centroid is the mean, WCSS the total squared deviation.
        let r = kmeans(&pts, 1, 0, 100).unwrap();
        assert_abs_diff_eq!(r.centroids[0][0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.centroids[0][1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.wcss, 4.0 * 0.5, epsilon = 1e-12);
        // k = n: every point its own centroid.
        let r = kmeans(&pts, 4, 0, 100).unwrap();
        assert_abs_diff_eq!(r.wcss, 0.0, epsilon = 1e-12);
        assert!(kmeans(&pts, 5, 0, 100).is_err());
        assert!(kmeans(&pts, 0, 0, 100).is_err());
    }

    #[test]
    fn kmeans_separates_two_pairs() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![10.0, 10.0], vec![10.1, 10.0]];
        let r = kmeans(&pts, 2, 3, 100).unwrap();
        assert_eq!(r.labels[0], r.labels[1]);
        assert_eq!(r.labels[2], r.labels[3]);
        assert_ne!(r.labels[0], r.labels[2]);
        // Within-pair sum of squares: each pair contributes 2 * (0.05)^2.
        assert_abs_diff_eq!(r.wcss, 2.0 * 2.0 * 0.05 * 0.05, epsilon = 1e-12);
    }

    #[test]
    fn kmeans_wcss_is_monotone_and_deterministic() {
        let mut rng = crate::rng::substream(5, "test/kmeans");
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..4).map(|_| rng.random::<f64>() * 10.0).collect())
            .collect();
        let a = kmeans(&pts, 4, 9, 300).unwrap();
        let b = kmeans(&pts, 4, 9, 300).unwrap();
        assert_eq!(a, b);
        for w in a.wcss_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "WCSS increased: {} -> {}", w[0], w[1]);
        }
        // Label stability under point reordering, up to relabeling.
        let mut reordered = pts.clone();
        reordered.reverse();
        let c = kmeans(&reordered, 4, 9, 300).unwrap();
        let mut relabeled = c.labels.clone();
        relabeled.reverse();
        assert_abs_diff_eq!(adjusted_rand_index(&a.labels, &relabeled).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn silhouette_golden_cases() {
        // Two distant tight pairs: near-perfect separation.
        let pts = vec![vec![0.0], vec![0.1], vec![100.0], vec![100.1]];
        let s = silhouette(&pts, &[0, 0, 1, 1]).unwrap();
        assert!(s > 0.95, "got {s}");
        // All points identical: a = b = 0, score 0.
        let same = vec![vec![1.0]; 4];
        assert_abs_diff_eq!(silhouette(&same, &[0, 0, 1, 1]).unwrap(), 0.0, epsilon = 1e-12);
        // Interleaved labels on one tight blob: negative score.
        let blob = vec![vec![0.0], vec![1.0], vec![0.05], vec![1.05]];
        let s = silhouette(&blob, &[0, 0, 1, 1]).unwrap();
        assert!(s < 0.0, "got {s}");
        assert!(silhouette(&pts, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn silhouette_is_isometry_invariant() {
        let pts = vec![vec![0.0, 1.0], vec![0.2, 0.8], vec![5.0, 5.0], vec![5.1, 4.9]];
        let labels = [0, 0, 1, 1];
        let base = silhouette(&pts, &labels).unwrap();
        // Translate and rotate by 90 degrees.
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| vec![-p[1] + 3.0, p[0] - 7.0]).collect();
        assert_abs_diff_eq!(silhouette(&moved, &labels).unwrap(), base, epsilon = 1e-9);
    }

    #[test]
    fn ari_golden_values() {
        assert_abs_diff_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0, epsilon = 1e-12);
        // Permuted relabeling is still a perfect match.
        assert_abs_diff_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 2, 2]).unwrap(), 1.0, epsilon = 1e-12);
        // Maximally crossed 2x2 case: every contingency cell is 1.
        assert_abs_diff_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), -0.5, epsilon = 1e-12);
        // Symmetry.
        let a = [0, 1, 1, 2, 2, 2];
        let b = [0, 0, 1, 1, 2, 2];
        assert_abs_diff_eq!(
            adjusted_rand_index(&a, &b).unwrap(),
            adjusted_rand_index(&b, &a).unwrap(),
            epsilon = 1e-12
        );
        assert!(adjusted_rand_index(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn kneedle_endpoints_and_flat_curves() {
        // Exactly linear decreasing curve: all distances 0.
        let linear: Vec<(usize, f64)> = (2..=10).map(|k| (k, 100.0 - 10.0 * k as f64)).collect();
        for d in kneedle_distance(&linear).unwrap() {
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-12);
        }
        // Endpoints are zero by construction on any curve.
        let curve: Vec<(usize, f64)> = (2..=10).map(|k| (k, 1.0 / k as f64)).collect();
        let d = kneedle_distance(&curve).unwrap();
        assert_abs_diff_eq!(d[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[8], 0.0, epsilon = 1e-12);
        // Interior distances are positive for a convex decreasing curve.
        assert!(d[1..8].iter().all(|&v| v > 0.0));
        // y = 1/k: the continuous chord-distance argmax sits at sqrt(20),
        // between the k = 4 and k = 5 grid points.
        let argmax = d
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i + 2)
            .unwrap();
        assert!(argmax == 4 || argmax == 5, "got {argmax}");
    }

    #[test]
    fn kneedle_finds_a_sharp_knee() {
        // Steep drop until k = 3, then a gentle linear tail.
        let wcss = [
            (2usize, 100.0),
            (3, 30.0),
            (4, 28.0),
            (5, 26.0),
            (6, 24.0),
            (7, 22.0),
            (8, 20.0),
            (9, 18.0),
            (10, 16.0),
        ];
        let d = kneedle_distance(&wcss).unwrap();
        let argmax = d
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i + 2)
            .unwrap();
        assert_eq!(argmax, 3);
    }

    #[test]
    fn kneedle_rejects_bad_grids() {
        assert!(kneedle_distance(&[(2, 1.0), (3, 0.5)]).is_err());
        assert!(kneedle_distance(&[(2, 1.0), (4, 0.5), (5, 0.2)]).is_err());
    }

    fn blobs(n_per: usize, centers: &[(f64, f64)], spread: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = substream(seed, "test/blobs");
        let mut pts = Vec::new();
        let mut truth = Vec::new();
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..n_per {
                pts.push(vec![
                    cx + (rng.random::<f64>() - 0.5) * spread,
                    cy + (rng.random::<f64>() - 0.5) * spread,
                ]);
                truth.push(c);
            }
        }
        (pts, truth)
    }

    #[test]
    fn select_k_prefers_the_planted_count() {
        let (pts, truth) = blobs(20, &[(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)], 1.0, 1);
        let rows = select_k(&pts, (2, 6), 4, 7).unwrap();
        assert_eq!(rows.len(), 5);
        let best = rows.iter().max_by(|a, b| a.mean_ari.total_cmp(&b.mean_ari)).unwrap();
        assert_eq!(best.k, 3);
        let at3 = kmeans(&pts, 3, 11, 300).unwrap();
        assert!(adjusted_rand_index(&at3.labels, &truth).unwrap() > 0.95);
    }

    #[test]
    fn select_k_single_repeat_flags_ari() {
        let (pts, _) = blobs(10, &[(0.0, 0.0), (8.0, 8.0)], 1.0, 2);
        let rows = select_k(&pts, (2, 4), 1, 3).unwrap();
        for row in &rows {
            assert_eq!(row.mean_ari, 1.0);
            assert!(!row.ari_defined);
        }
        assert!(select_k(&pts, (1, 4), 1, 3).is_err());
        assert!(select_k(&pts, (2, 100), 1, 3).is_err());
    }

    #[test]
    fn profiles_partition_the_data() {
        let rows = vec![vec![1.0, 0.0], vec![3.0, 0.0], vec![0.0, 4.0]];
        let p = cluster_profile(&[0, 0, 1], &rows, 2).unwrap();
        assert_eq!(p.sizes, vec![2, 1]);
        assert_eq!(p.sizes.iter().sum::<usize>(), 3);
        assert_abs_diff_eq!(p.means[0][0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.means[1][1], 4.0, epsilon = 1e-12);
        // One cluster: profile equals the global mean.
        let p = cluster_profile(&[0, 0, 0], &rows, 1).unwrap();
        assert_abs_diff_eq!(p.means[0][0], 4.0 / 3.0, epsilon = 1e-12);
    }
}
