use crate::tensor::Tensor;

/// `a (m,k) * b (k,n) -> (m,n)`.
pub(crate) fn matmul(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k) = (a.rows(), a.cols());
    let (kb, n) = (b.rows(), b.cols());
    assert_eq!(k, kb, "matmul inner dims {k} vs {kb}");
    let mut out = Tensor::zeros(&[m, n]);
    for i in 0..m {
        let ar = a.row(i);
        let or = out.row_mut(i);
        for (p, &av) in ar.iter().enumerate() {
            for (o, &bv) in or.iter_mut().zip(b.row(p)) {
                *o += av * bv;
            }
        }
    }
    out
}

/// `a (m,k) * b^T` with `b (n,k) -> (m,n)`. Rows of `b` are dotted directly.
pub(crate) fn matmul_nt(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k) = (a.rows(), a.cols());
    let (n, kb) = (b.rows(), b.cols());
    assert_eq!(k, kb, "matmul_nt inner dims {k} vs {kb}");
    let mut out = Tensor::zeros(&[m, n]);
    for i in 0..m {
        let ar = a.row(i);
        let or = out.row_mut(i);
        for (j, o) in or.iter_mut().enumerate() {
            *o = ar.iter().zip(b.row(j)).map(|(x, y)| x * y).sum();
        }
    }
    out
}

/// `a^T * b` with `a (k,m)`, `b (k,n) -> (m,n)`.
pub(crate) fn matmul_tn(a: &Tensor, b: &Tensor) -> Tensor {
    let (k, m) = (a.rows(), a.cols());
    let (kb, n) = (b.rows(), b.cols());
    assert_eq!(k, kb, "matmul_tn outer dims {k} vs {kb}");
    let mut out = Tensor::zeros(&[m, n]);
    for p in 0..k {
        let ar = a.row(p);
        for (i, &av) in ar.iter().enumerate() {
            for (o, &bv) in out.row_mut(i).iter_mut().zip(b.row(p)) {
                *o += av * bv;
            }
        }
    }
    out
}

/// Column sums of `a (m,n) -> (n,)`.
pub(crate) fn col_sum(a: &Tensor) -> Tensor {
    let (m, n) = (a.rows(), a.cols());
    let mut out = Tensor::zeros(&[n]);
    for i in 0..m {
        let ar = a.row(i);
        let or = out.data_mut();
        for j in 0..n {
            or[j] += ar[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Tensor {
        let data = (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect();
        Tensor::from_vec(&[rows, cols], data).unwrap()
    }

    fn naive(a: &Tensor, b: &Tensor) -> Tensor {
        let mut out = Tensor::zeros(&[a.rows(), b.cols()]);
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for p in 0..a.cols() {
                    acc += a.at(i, p) * b.at(p, j);
                }
                out.row_mut(i)[j] = acc;
            }
        }
        out
    }

    fn transpose(a: &Tensor) -> Tensor {
        let mut out = Tensor::zeros(&[a.cols(), a.rows()]);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                out.row_mut(j)[i] = a.at(i, j);
            }
        }
        out
    }

    fn close(a: &Tensor, b: &Tensor) -> bool {
        a.shape() == b.shape()
            && a.data().iter().zip(b.data()).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn variants_agree_with_naive_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (m, k, n) = (
                rng.random_range(1..6),
                rng.random_range(1..6),
                rng.random_range(1..6),
            );
            let a = random(&mut rng, m, k);
            let b = random(&mut rng, k, n);
            assert!(close(&matmul(&a, &b), &naive(&a, &b)));
            let bt = random(&mut rng, n, k);
            assert!(close(&matmul_nt(&a, &bt), &naive(&a, &transpose(&bt))));
            let at = random(&mut rng, k, m);
            assert!(close(&matmul_tn(&at, &b), &naive(&transpose(&at), &b)));
        }
    }

    #[test]
    fn col_sum_matches_manual_sum() {
        let a = Tensor::from_vec(&[3, 2], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let s = col_sum(&a);
        assert_eq!(s.data(), &[9.0, 12.0]);
    }
}
