//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! The basis is factorized left-looking (one column at a time) with threshold
//! partial pivoting. Column replacements after a pivot are recorded as eta
//! columns until the next refactorization.

#[derive(Debug, Clone)]
pub(crate) struct SparseColumn {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

#[derive(Debug)]
pub(crate) struct Singular {
    /// Basis positions whose columns could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, in ascending order.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    pivot: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub(crate) struct BasisFactor {
    m: usize,
    /// Step k pivots original row `prow[k]`.
    prow: Vec<usize>,
    /// Step k factorizes basis position `qcol[k]`.
    qcol: Vec<usize>,
    /// Multipliers of L for step k, keyed by original row.
    l_cols: Vec<SparseColumn>,
    /// Off-diagonal entries of U column k, keyed by step.
    u_cols: Vec<SparseColumn>,
    u_diag: Vec<f64>,
    /// Original row -> pivot step.
    pinv: Vec<usize>,
    etas: Vec<Eta>,
}

impl BasisFactor {
    /// Factorize the `m` basis columns. On failure the singular positions and
    /// unpivoted rows are returned so the caller can patch the basis.
    pub fn factorize(m: usize, cols: &[SparseColumn]) -> Result<Self, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut row_count = vec![0usize; m];
        for c in cols {
            for &i in &c.idx {
                row_count[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].idx.len(), p));

        let mut pinv: Vec<Option<usize>> = vec![None; m];
        let mut prow = Vec::with_capacity(m);
        let mut qcol = Vec::with_capacity(m);
        let mut l_cols: Vec<SparseColumn> = Vec::with_capacity(m);
        let mut u_cols = Vec::with_capacity(m);
        let mut u_diag = Vec::with_capacity(m);
        let mut failed = Vec::new();

        let mut work = vec![0.0f64; m];
        let mut mark = vec![false; m];
        let mut touched: Vec<usize> = Vec::new();

        for &pos in &order {
            let col = &cols[pos];
            for (&i, &v) in col.idx.iter().zip(&col.val) {
                if !mark[i] {
                    mark[i] = true;
                    touched.push(i);
                }
                work[i] += v;
            }
            // Eliminate with previous steps in pivot order. The reach of a
            // sparse column is found by repeatedly taking the earliest
            // pivoted step among touched rows.
            let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
                touched.iter().filter_map(|&i| pinv[i]).map(std::cmp::Reverse).collect();
            let mut done_steps: Vec<usize> = Vec::new();
            while let Some(std::cmp::Reverse(k)) = heap.pop() {
                if done_steps.last() == Some(&k) {
                    continue;
                }
                done_steps.push(k);
                let xp = work[prow[k]];
                if xp == 0.0 {
                    continue;
                }
                let lc: &SparseColumn = &l_cols[k];
                for (&i, &l) in lc.idx.iter().zip(&lc.val) {
                    if !mark[i] {
                        mark[i] = true;
                        touched.push(i);
                    }
                    work[i] -= l * xp;
                    if let Some(ki) = pinv[i] {
                        if ki > k {
                            heap.push(std::cmp::Reverse(ki));
                        }
                    }
                }
            }
            // Choose the pivot among unpivoted rows.
            let mut max_abs = 0.0f64;
            for &i in &touched {
                if pinv[i].is_none() {
                    max_abs = max_abs.max(work[i].abs());
                }
            }
            if max_abs < SINGULAR_TOL {
                failed.push(pos);
                for &i in &touched {
                    work[i] = 0.0;
                    mark[i] = false;
                }
                touched.clear();
                continue;
            }
            let mut best: Option<usize> = None;
            for &i in &touched {
                if pinv[i].is_some() || work[i].abs() < PIVOT_THRESHOLD * max_abs {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if (row_count[i], i) < (row_count[b], b) {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let p = best.expect("pivot candidate exists");
            let piv = work[p];
            let step = prow.len();
            let mut u = SparseColumn {
                idx: Vec::new(),
                val: Vec::new(),
            };
            let mut l = SparseColumn {
                idx: Vec::new(),
                val: Vec::new(),
            };
            touched.sort_unstable();
            for &i in &touched {
                let v = work[i];
                if v != 0.0 {
                    if let Some(k) = pinv[i] {
                        u.idx.push(k);
                        u.val.push(v);
                    } else if i != p {
                        l.idx.push(i);
                        l.val.push(v / piv);
                    }
                }
                work[i] = 0.0;
                mark[i] = false;
            }
            touched.clear();
            pinv[p] = Some(step);
            prow.push(p);
            qcol.push(pos);
            l_cols.push(l);
            u_cols.push(u);
            u_diag.push(piv);
        }
        if !failed.is_empty() {
            let rows = (0..m).filter(|&i| pinv[i].is_none()).collect();
            return Err(Singular {
                positions: failed,
                rows,
            });
        }
        let pinv = pinv.into_iter().map(|k| k.expect("all rows pivoted")).collect();
        Ok(BasisFactor {
            m,
            pinv,
            prow,
            qcol,
            l_cols,
            u_cols,
            u_diag,
            etas: Vec::new(),
        })
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solve `B z = b` in place; on entry `rhs` is indexed by row, on exit by
    /// basis position.
    pub fn ftran(&self, rhs: &mut Vec<f64>) {
        let m = self.m;
        for k in 0..m {
            let xp = rhs[self.prow[k]];
            if xp != 0.0 {
                let lc = &self.l_cols[k];
                for (&i, &l) in lc.idx.iter().zip(&lc.val) {
                    rhs[i] -= l * xp;
                }
            }
        }
        let mut v: Vec<f64> = self.prow.iter().map(|&p| rhs[p]).collect();
        for k in (0..m).rev() {
            let uk = v[k] / self.u_diag[k];
            v[k] = uk;
            if uk != 0.0 {
                let uc = &self.u_cols[k];
                for (&kk, &val) in uc.idx.iter().zip(&uc.val) {
                    v[kk] -= val * uk;
                }
            }
        }
        for k in 0..m {
            rhs[self.qcol[k]] = v[k];
        }
        for eta in &self.etas {
            let zr = rhs[eta.pos] / eta.pivot;
            if zr != 0.0 {
                for (&i, &w) in eta.idx.iter().zip(&eta.val) {
                    rhs[i] -= w * zr;
                }
            }
            rhs[eta.pos] = zr;
        }
    }

    /// Solve `B^T y = c` in place; on entry `rhs` is indexed by basis
    /// position, on exit by row.
    pub fn btran(&self, rhs: &mut Vec<f64>) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut s = rhs[eta.pos];
            for (&i, &w) in eta.idx.iter().zip(&eta.val) {
                s -= w * rhs[i];
            }
            rhs[eta.pos] = s / eta.pivot;
        }
        let mut h: Vec<f64> = self.qcol.iter().map(|&q| rhs[q]).collect();
        for k in 0..m {
            let uc = &self.u_cols[k];
            let mut s = h[k];
            for (&kk, &val) in uc.idx.iter().zip(&uc.val) {
                s -= val * h[kk];
            }
            h[k] = s / self.u_diag[k];
        }
        let pinv = &self.pinv;
        for k in (0..m).rev() {
            let lc = &self.l_cols[k];
            let mut s = h[k];
            for (&i, &l) in lc.idx.iter().zip(&lc.val) {
                s -= l * h[pinv[i]];
            }
            h[k] = s;
        }
        for k in 0..m {
            rhs[self.prow[k]] = h[k];
        }
    }

    /// Record the replacement of basis position `pos` by a column whose
    /// FTRAN image is `w` (indexed by basis position).
    pub fn update(&mut self, pos: usize, w: &[f64]) {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &v) in w.iter().enumerate() {
            if i != pos && v != 0.0 {
                idx.push(i);
                val.push(v);
            }
        }
        self.etas.push(Eta {
            pos,
            pivot: w[pos],
            idx,
            val,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_cols(a: &[Vec<f64>]) -> Vec<SparseColumn> {
        let m = a.len();
        (0..m)
            .map(|j| {
                let mut c = SparseColumn {
                    idx: vec![],
                    val: vec![],
                };
                for i in 0..m {
                    if a[i][j] != 0.0 {
                        c.idx.push(i);
                        c.val.push(a[i][j]);
                    }
                }
                c
            })
            .collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    }

    fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = a.len();
        (0..m).map(|i| (0..m).map(|j| a[j][i]).collect()).collect()
    }

    #[test]
    fn solves_small_system_both_ways() {
        let a = vec![
            vec![2.0, 0.0, 1.0, 0.0],
            vec![0.0, 3.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0, 4.0],
            vec![0.0, 1.0, 5.0, 0.0],
        ];
        let f = BasisFactor::factorize(4, &dense_to_cols(&a)).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5];
        let mut z = b.clone();
        f.ftran(&mut z);
        let back = matvec(&a, &z);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
        let mut y = b.clone();
        f.btran(&mut y);
        let back = matvec(&transpose(&a), &y);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_update_matches_refactorization() {
        let mut a = vec![
            vec![1.0, 2.0, 0.0],
            vec![0.0, 1.0, 3.0],
            vec![4.0, 0.0, 1.0],
        ];
        let mut f = BasisFactor::factorize(3, &dense_to_cols(&a)).unwrap();
        let newcol = vec![1.0, 1.0, -2.0];
        let mut w = newcol.clone();
        f.ftran(&mut w);
        f.update(1, &w);
        for i in 0..3 {
            a[i][1] = newcol[i];
        }
        let b = vec![0.3, -1.0, 2.0];
        let mut z = b.clone();
        f.ftran(&mut z);
        let back = matvec(&a, &z);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
        let mut y = b.clone();
        f.btran(&mut y);
        let back = matvec(&transpose(&a), &y);
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_basis_reported() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let err = BasisFactor::factorize(2, &dense_to_cols(&a)).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
