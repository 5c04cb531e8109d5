//! Independent reference implementations the library output is checked
//! against. These deliberately share no code with the library: the
//! closure oracle scans index matrices, the regression oracles solve
//! normal equations with a local Gaussian elimination, and the feature
//! oracle re-enumerates region/word pairs directly.

// Index loops keep every scan order — and therefore every floating-point
// evaluation order — explicit, which the bitwise comparisons rely on.
#![allow(clippy::needless_range_loop)]

use cwsim_core::features::Agg;
use cwsim_core::wordnet::WnSim;

// ---------------------------------------------------------------------
// Transitive-closure brute force (criterion 1)
// ---------------------------------------------------------------------

/// Final closure state over word indices: a dense symmetric score
/// matrix plus a per-pair derived flag.
pub struct ClosureOracle {
    pub n: usize,
    score: Vec<Option<f64>>,
    derived: Vec<bool>,
}

impl ClosureOracle {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn score(&self, i: usize, j: usize) -> Option<f64> {
        self.score[self.idx(i, j)]
    }

    pub fn is_derived(&self, i: usize, j: usize) -> bool {
        self.derived[self.idx(i, j)]
    }

    pub fn pair_count(&self) -> usize {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.score[i * self.n + j].is_some())
            .count()
    }
}

/// Literal triple scan: for every ordered word pair (i, k) and pivot j
/// with edges i–j and j–k, apply the two blending conditions. Words are
/// visited in sorted order, matching first-come-wins tie resolution on
/// newly derived pairs; within one pass every new pair reads only the
/// pass's starting state.
pub fn close_brute_force(
    n: usize,
    edges: &[(usize, usize, f64)],
    neutral: f64,
    cap: f64,
    passes: usize,
) -> ClosureOracle {
    let mut oracle = ClosureOracle {
        n,
        score: vec![None; n * n],
        derived: vec![false; n * n],
    };
    for &(i, j, s) in edges {
        let (a, b) = (oracle.idx(i, j), oracle.idx(j, i));
        oracle.score[a] = Some(s);
        oracle.score[b] = Some(s);
    }

    for _ in 0..passes {
        let mut added: Vec<((usize, usize), f64)> = Vec::new();
        let mut added_set = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                let Some(s_ij) = oracle.score(i, j) else {
                    continue;
                };
                for k in 0..n {
                    if k == i {
                        continue;
                    }
                    let Some(s_jk) = oracle.score(j, k) else {
                        continue;
                    };
                    if !(s_jk > s_ij && s_jk > neutral) {
                        continue;
                    }
                    let blended = s_ij + (s_jk - s_ij) * s_jk / cap;
                    // Mirrors the library's two admission gates verbatim.
                    #[allow(clippy::if_same_then_else)]
                    let new_score = if s_ij > neutral {
                        blended.min(cap)
                    } else if s_ij < neutral && blended < neutral {
                        blended.min(cap)
                    } else {
                        continue;
                    };
                    let key = (i.min(k), i.max(k));
                    let flat = key.0 * n + key.1;
                    if oracle.score[flat].is_some() || added_set[flat] {
                        continue;
                    }
                    added_set[flat] = true;
                    added.push((key, new_score));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for ((a, b), s) in added {
            let (ab, ba) = (oracle.idx(a, b), oracle.idx(b, a));
            oracle.score[ab] = Some(s);
            oracle.score[ba] = Some(s);
            oracle.derived[ab] = true;
            oracle.derived[ba] = true;
        }
    }
    oracle
}

// ---------------------------------------------------------------------
// Dense linear algebra (criteria 5 and 6)
// ---------------------------------------------------------------------

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-12, "oracle system is singular");
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Ridge regression by hand: center the columns and the target, solve
/// `(Xcᵀ Xc + λI) β = Xcᵀ yc`, recover the intercept from the means.
pub fn ridge_by_hand(x: &[Vec<f64>], y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len();
    let mut col_means = vec![0.0; d];
    for row in x {
        for (j, v) in row.iter().enumerate() {
            col_means[j] += v;
        }
    }
    for m in &mut col_means {
        *m /= n as f64;
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let mut ata = vec![vec![0.0; d]; d];
    let mut atb = vec![0.0; d];
    for (row, &yi) in x.iter().zip(y) {
        let yc = yi - y_mean;
        for j in 0..d {
            let xj = row[j] - col_means[j];
            atb[j] += xj * yc;
            for k in 0..d {
                ata[j][k] += xj * (row[k] - col_means[k]);
            }
        }
    }
    for j in 0..d {
        ata[j][j] += lambda;
    }
    let beta = solve_dense(ata, atb);
    let intercept = y_mean - col_means.iter().zip(&beta).map(|(m, b)| m * b).sum::<f64>();
    (beta, intercept)
}

/// Training-set predictions of ordinary least squares with an intercept
/// column, solved through the raw normal equations.
pub fn ols_predictions(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let d = x[0].len() + 1;
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|row| std::iter::once(1.0).chain(row.iter().copied()).collect())
        .collect();
    let mut ata = vec![vec![0.0; d]; d];
    let mut atb = vec![0.0; d];
    for (row, &yi) in design.iter().zip(y) {
        for j in 0..d {
            atb[j] += row[j] * yi;
            for k in 0..d {
                ata[j][k] += row[j] * row[k];
            }
        }
    }
    let coef = solve_dense(ata, atb);
    (0..n)
        .map(|i| design[i].iter().zip(&coef).map(|(a, c)| a * c).sum())
        .collect()
}

// ---------------------------------------------------------------------
// WordNet inter-feature block (criterion 3)
// ---------------------------------------------------------------------

fn aggregate(values: &[f64], how: Agg) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(match how {
        Agg::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Agg::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        Agg::Mean => values.iter().sum::<f64>() / values.len() as f64,
    })
}

/// One aggregation scheme's sixteen values by direct enumeration:
/// cell (i, j) applies `inner` over the similarities of each word of
/// region i against all of region j, then `outer` over region i's
/// words; averages skip undefined cells; undefined slots emit 0.
pub fn wn_sixteen_by_hand(
    wn: &WnSim,
    regions1: &[Vec<String>],
    regions2: &[Vec<String>],
    outer: Agg,
    inner: Agg,
) -> [f64; 16] {
    let mut cells = [[None::<f64>; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut per_word = Vec::new();
            for u in &regions1[i] {
                let values: Vec<f64> = regions2[j].iter().map(|v| wn.sim(u, v)).collect();
                if let Some(agg) = aggregate(&values, inner) {
                    per_word.push(agg);
                }
            }
            cells[i][j] = aggregate(&per_word, outer);
        }
    }

    let mut out = [0.0; 16];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = cells[i][j].unwrap_or(0.0);
        }
    }
    for i in 0..3 {
        let (mut sum, mut count) = (0.0, 0usize);
        for j in 0..3 {
            if let Some(v) = cells[i][j] {
                sum += v;
                count += 1;
            }
        }
        out[9 + i] = if count > 0 { sum / count as f64 } else { 0.0 };
    }
    for j in 0..3 {
        let (mut sum, mut count) = (0.0, 0usize);
        for i in 0..3 {
            if let Some(v) = cells[i][j] {
                sum += v;
                count += 1;
            }
        }
        out[12 + j] = if count > 0 { sum / count as f64 } else { 0.0 };
    }
    let (mut sum, mut count) = (0.0, 0usize);
    for row in &cells {
        for v in row.iter().flatten() {
            sum += v;
            count += 1;
        }
    }
    out[15] = if count > 0 { sum / count as f64 } else { 0.0 };
    out
}
