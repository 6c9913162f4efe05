//! Truncated univariate Taylor arithmetic on coefficient slices `[a_0, a_1, ...]`.
//! All inputs of one operation share a length.

use alloc::vec;
use alloc::vec::Vec;

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len())
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

pub fn div(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    if b[0] == 0.0 {
        return None;
    }
    let mut q: Vec<f64> = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        let acc: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
        q.push((a[k] - acc) / b[0]);
    }
    Some(q)
}

pub fn powi(a: &[f64], n: u32) -> Vec<f64> {
    let mut result = vec![0.0; a.len()];
    result[0] = 1.0;
    let mut base = a.to_vec();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = mul(&result, &base);
        }
        n >>= 1;
        if n > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

pub fn exp(a: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(a.len());
    e.push(libm::exp(a[0]));
    for k in 1..a.len() {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e.push(acc / k as f64);
    }
    e
}

pub fn sin_cos(a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut s = Vec::with_capacity(a.len());
    let mut c = Vec::with_capacity(a.len());
    s.push(libm::sin(a[0]));
    c.push(libm::cos(a[0]));
    for k in 1..a.len() {
        let mut ds = 0.0;
        let mut dc = 0.0;
        for j in 1..=k {
            ds += j as f64 * a[j] * c[k - j];
            dc += j as f64 * a[j] * s[k - j];
        }
        s.push(ds / k as f64);
        c.push(-dc / k as f64);
    }
    (s, c)
}

pub fn log(a: &[f64]) -> Option<Vec<f64>> {
    if a[0] <= 0.0 {
        return None;
    }
    let mut l = Vec::with_capacity(a.len());
    l.push(libm::log(a[0]));
    for k in 1..a.len() {
        let acc: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
        l.push((a[k] - acc / k as f64) / a[0]);
    }
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // series of e^(x0 + δ): e^x0 / k!
    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn exp_of_shifted_identity() {
        let a = [0.3, 1.0, 0.0, 0.0, 0.0, 0.0];
        let e = exp(&a);
        for (k, v) in e.iter().enumerate() {
            assert_relative_eq!(*v, libm::exp(0.3) / factorial(k), max_relative = 1e-14);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let a = [0.2, -0.7, 1.1, 0.4, -0.3];
        let back = log(&exp(&a)).unwrap();
        for (x, y) in back.iter().zip(&a) {
            assert_relative_eq!(*x, *y, epsilon = 1e-14);
        }
        assert!(log(&[0.0, 1.0]).is_none());
    }

    #[test]
    fn division_undoes_multiplication() {
        let a = [1.5, 2.0, -1.0, 0.5];
        let b = [2.0, 0.1, 0.3, -0.2];
        let q = div(&mul(&a, &b), &b).unwrap();
        for (x, y) in q.iter().zip(&a) {
            assert_relative_eq!(*x, *y, epsilon = 1e-14);
        }
        assert!(div(&a, &[0.0, 1.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn sin_cos_pythagoras() {
        let a = [0.4, 1.3, -0.2, 0.7, 0.1];
        let (s, c) = sin_cos(&a);
        let one = zip_add(&mul(&s, &s), &mul(&c, &c));
        assert_relative_eq!(one[0], 1.0, epsilon = 1e-15);
        assert!(one[1..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let a = [0.9, -0.4, 0.25, 1.0];
        let cube = mul(&mul(&a, &a), &a);
        for (x, y) in powi(&a, 3).iter().zip(&cube) {
            assert_relative_eq!(*x, *y, epsilon = 1e-15);
        }
        assert_eq!(powi(&a, 0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    fn zip_add(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
}
