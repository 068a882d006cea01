//! Sparse LU factorization with Markowitz pivot selection, generic over
//! binary64 and exact rationals, plus product-form column updates.
//!
//! The matrix `M` is given by its columns. Solves are available with `M`
//! (`ftran`) and with `M^T` (`btran`).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Field operations the factorization needs beyond [`RealScalar`].
pub trait LuField: RealScalar {
    /// Whether `candidate` is an acceptable pivot given the largest modulus in
    /// its column.
    fn acceptable(candidate: &Self, col_max: &Self) -> bool;
    /// Values this small are treated as zero after an update.
    fn negligible(v: &Self) -> bool;
}

impl LuField for f64 {
    fn acceptable(candidate: &f64, col_max: &f64) -> bool {
        candidate.abs() >= 0.1 * col_max && candidate.abs() > 1e-12
    }
    fn negligible(v: &f64) -> bool {
        v.abs() < 1e-14
    }
}

impl LuField for num_rational::BigRational {
    fn acceptable(candidate: &Self, _col_max: &Self) -> bool {
        !num_traits::Zero::is_zero(candidate)
    }
    fn negligible(v: &Self) -> bool {
        num_traits::Zero::is_zero(v)
    }
}

#[derive(Clone, Debug)]
struct Step<T> {
    row: usize,
    col: usize,
    pivot: T,
    /// Off-pivot entries of the pivot row, `(col, value)`.
    urow: Vec<(usize, T)>,
    /// Row multipliers `(row, l)`: `row -= l * pivot row`.
    lcol: Vec<(usize, T)>,
}

/// Product-form update replacing basis column `p` by a column whose
/// representation in the old basis is `v`.
#[derive(Clone, Debug)]
struct Eta<T> {
    p: usize,
    vp: T,
    /// `(i, v_i)` for `i != p`.
    rest: Vec<(usize, T)>,
}

#[derive(Clone, Debug)]
pub struct SparseLu<T> {
    dim: usize,
    steps: Vec<Step<T>>,
    etas: Vec<Eta<T>>,
}

impl<T: LuField> SparseLu<T> {
    /// Factor the `dim x dim` matrix whose column `j` has the entries
    /// `columns[j] = [(row, value), ...]`.
    pub fn factor(dim: usize, columns: &[Vec<(usize, T)>]) -> Result<Self> {
        if columns.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim} columns, got {}",
                columns.len()
            )));
        }
        // Row-wise values, column-wise patterns.
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); dim];
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); dim];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                if *i >= dim {
                    return Err(Error::DimensionMismatch(format!("row index {i} >= {dim}")));
                }
                if v.is_zero() {
                    continue;
                }
                rows[*i].push((j, v.clone()));
                cols[j].push(*i);
            }
        }
        for r in rows.iter_mut() {
            r.sort_by_key(|e| e.0);
        }
        for c in cols.iter_mut() {
            c.sort_unstable();
            c.dedup();
        }
        let mut col_active = vec![true; dim];
        let mut queue: BTreeSet<(usize, usize)> = (0..dim).map(|j| (cols[j].len(), j)).collect();
        let mut steps = Vec::with_capacity(dim);

        for step in 0..dim {
            // Markowitz search over the few sparsest columns.
            let mut best: Option<(usize, usize, usize)> = None; // (cost, row, col)
            for &(count, j) in queue.iter().take(4) {
                if count == 0 {
                    return Err(Error::SingularMatrix { step });
                }
                let mut col_max = T::zero();
                for &i in &cols[j] {
                    let a = lookup(&rows[i], j).abs();
                    if a > col_max {
                        col_max = a;
                    }
                }
                for &i in &cols[j] {
                    let a = lookup(&rows[i], j);
                    if !T::acceptable(&a, &col_max) {
                        continue;
                    }
                    let cost = (rows[i].len() - 1) * (count - 1);
                    let cand = (cost, i, j);
                    if best.map_or(true, |b| cand < b) {
                        best = Some(cand);
                    }
                }
                if let Some((0, _, _)) = best {
                    break;
                }
            }
            let (_, pr, pc) = best.ok_or(Error::SingularMatrix { step })?;

            let prow = std::mem::take(&mut rows[pr]);
            let pivot = lookup(&prow, pc);
            let urow: Vec<(usize, T)> = prow.iter().filter(|e| e.0 != pc).cloned().collect();
            col_active[pc] = false;
            queue.remove(&(cols[pc].len(), pc));

            // Columns touched by the pivot row lose the pivot row.
            for (c, _) in &urow {
                queue.remove(&(cols[*c].len(), *c));
                cols[*c].retain(|&i| i != pr);
            }

            let mut lcol = Vec::new();
            let targets: Vec<usize> = cols[pc].iter().copied().filter(|&i| i != pr).collect();
            for r in targets {
                let arj = lookup(&rows[r], pc);
                let l = arj / pivot.clone();
                let old = std::mem::take(&mut rows[r]);
                let mut merged = Vec::with_capacity(old.len() + urow.len());
                let (mut a, mut b) = (0, 0);
                while a < old.len() || b < urow.len() {
                    let take_old = b == urow.len() || (a < old.len() && old[a].0 < urow[b].0);
                    let take_new = a == old.len() || (b < urow.len() && urow[b].0 < old[a].0);
                    if take_old {
                        if old[a].0 != pc {
                            merged.push(old[a].clone());
                        }
                        a += 1;
                    } else if take_new {
                        let c = urow[b].0;
                        let v = -(l.clone() * urow[b].1.clone());
                        if !T::negligible(&v) {
                            queue.remove(&(cols[c].len(), c));
                            cols[c].push(r);
                            merged.push((c, v));
                        }
                        b += 1;
                    } else {
                        let c = old[a].0;
                        let v = old[a].1.clone() - l.clone() * urow[b].1.clone();
                        if T::negligible(&v) {
                            queue.remove(&(cols[c].len(), c));
                            cols[c].retain(|&i| i != r);
                        } else {
                            merged.push((c, v));
                        }
                        a += 1;
                        b += 1;
                    }
                }
                rows[r] = merged;
                lcol.push((r, l));
            }
            cols[pc].clear();
            for (c, _) in &urow {
                cols[*c].sort_unstable();
                cols[*c].dedup();
                if col_active[*c] {
                    queue.insert((cols[*c].len(), *c));
                }
            }
            steps.push(Step {
                row: pr,
                col: pc,
                pivot,
                urow,
                lcol,
            });
        }
        Ok(SparseLu {
            dim,
            steps,
            etas: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solve `M z = h`.
    pub fn ftran(&self, h: &[T]) -> Vec<T> {
        let mut h = h.to_vec();
        for s in &self.steps {
            let hp = h[s.row].clone();
            if hp.is_zero() {
                continue;
            }
            for (r, l) in &s.lcol {
                h[*r] = h[*r].clone() - l.clone() * hp.clone();
            }
        }
        let mut z = vec![T::zero(); self.dim];
        for s in self.steps.iter().rev() {
            let mut acc = h[s.row].clone();
            for (c, u) in &s.urow {
                if !z[*c].is_zero() {
                    acc = acc - u.clone() * z[*c].clone();
                }
            }
            z[s.col] = acc / s.pivot.clone();
        }
        for e in &self.etas {
            let zp = z[e.p].clone() / e.vp.clone();
            if !zp.is_zero() {
                for (i, v) in &e.rest {
                    z[*i] = z[*i].clone() - v.clone() * zp.clone();
                }
            }
            z[e.p] = zp;
        }
        z
    }

    /// Solve `M^T u = g`.
    pub fn btran(&self, g: &[T]) -> Vec<T> {
        let mut g = g.to_vec();
        for e in self.etas.iter().rev() {
            let mut acc = g[e.p].clone();
            for (i, v) in &e.rest {
                if !g[*i].is_zero() {
                    acc = acc - v.clone() * g[*i].clone();
                }
            }
            g[e.p] = acc / e.vp.clone();
        }
        let mut v = vec![T::zero(); self.dim];
        for s in &self.steps {
            let vr = g[s.col].clone() / s.pivot.clone();
            if !vr.is_zero() {
                for (c, u) in &s.urow {
                    g[*c] = g[*c].clone() - u.clone() * vr.clone();
                }
            }
            v[s.row] = vr;
        }
        for s in self.steps.iter().rev() {
            let mut acc = v[s.row].clone();
            for (r, l) in &s.lcol {
                if !v[*r].is_zero() {
                    acc = acc - l.clone() * v[*r].clone();
                }
            }
            v[s.row] = acc;
        }
        v
    }

    /// Replace column `p` of `M` by the column `a`, given `w = M^{-1} a`.
    pub fn update(&mut self, p: usize, w: &[T]) -> Result<()> {
        let vp = w[p].clone();
        if vp.is_zero() {
            return Err(Error::SingularMatrix { step: p });
        }
        let rest = w
            .iter()
            .enumerate()
            .filter(|(i, v)| *i != p && !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        self.etas.push(Eta { p, vp, rest });
        Ok(())
    }
}

fn lookup<T: LuField>(row: &[(usize, T)], col: usize) -> T {
    match row.binary_search_by_key(&col, |e| e.0) {
        Ok(i) => row[i].1.clone(),
        Err(_) => T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::rat;
    use num_rational::BigRational;

    fn dense_cols(m: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let n = m.len();
        (0..n)
            .map(|j| (0..n).filter(|&i| m[i][j] != 0.0).map(|i| (i, m[i][j])).collect())
            .collect()
    }

    fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn solves_small_system() {
        let m = vec![
            vec![0.0, 2.0, 0.0, 1.0],
            vec![3.0, 0.0, 0.0, 0.0],
            vec![1.0, 1.0, 4.0, 0.0],
            vec![0.0, 0.0, 1.0, 5.0],
        ];
        let lu = SparseLu::factor(4, &dense_cols(&m)).unwrap();
        let h = vec![1.0, -2.0, 0.5, 3.0];
        let z = lu.ftran(&h);
        let back = matvec(&m, &z);
        for i in 0..4 {
            assert!((back[i] - h[i]).abs() < 1e-12);
        }
        let u = lu.btran(&h);
        let mt: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m[j][i]).collect()).collect();
        let back = matvec(&mt, &u);
        for i in 0..4 {
            assert!((back[i] - h[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_matches_refactor() {
        let mut m = vec![
            vec![2.0, 1.0, 0.0],
            vec![0.0, 3.0, 1.0],
            vec![1.0, 0.0, 4.0],
        ];
        let mut lu = SparseLu::factor(3, &dense_cols(&m)).unwrap();
        let a = vec![1.0, 1.0, 1.0];
        let w = lu.ftran(&a);
        lu.update(1, &w).unwrap();
        for i in 0..3 {
            m[i][1] = a[i];
        }
        let h = vec![0.3, -1.0, 2.0];
        let z = lu.ftran(&h);
        let back = matvec(&m, &z);
        for i in 0..3 {
            assert!((back[i] - h[i]).abs() < 1e-12);
        }
        let u = lu.btran(&h);
        let mt: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| m[j][i]).collect()).collect();
        let back = matvec(&mt, &u);
        for i in 0..3 {
            assert!((back[i] - h[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_and_singular() {
        let cols: Vec<Vec<(usize, BigRational)>> = vec![
            vec![(0, rat(1, 1)), (1, rat(1, 1))],
            vec![(0, rat(1, 1)), (1, rat(-1, 1))],
        ];
        let lu = SparseLu::factor(2, &cols).unwrap();
        assert_eq!(lu.ftran(&[rat(3, 1), rat(1, 1)]), vec![rat(2, 1), rat(1, 1)]);
        let sing: Vec<Vec<(usize, BigRational)>> = vec![
            vec![(0, rat(1, 1)), (1, rat(2, 1))],
            vec![(0, rat(2, 1)), (1, rat(4, 1))],
        ];
        assert!(SparseLu::factor(2, &sing).is_err());
    }
}
