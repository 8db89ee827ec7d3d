//! Dense polynomials in ascending coefficient order.

pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

/// Antiderivative vanishing at 0.
pub fn antiderivative(c: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(0.0);
    out.extend(c.iter().enumerate().map(|(k, &a)| a / (k + 1) as f64));
    trim(out)
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let v = (0..n).map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0)).collect();
    trim(v)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    trim(a.iter().map(|x| x * k).collect())
}

/// p(-x)
pub fn reflect(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().map(|(k, &x)| if k % 2 == 1 { -x } else { x }).collect()
}

/// Drops trailing zero coefficients, keeping at least one.
pub fn trim(mut v: Vec<f64>) -> Vec<f64> {
    while v.len() > 1 && v.last() == Some(&0.0) {
        v.pop();
    }
    if v.is_empty() {
        v.push(0.0);
    }
    v
}

pub fn degree(c: &[f64]) -> usize {
    let mut d = c.len().saturating_sub(1);
    while d > 0 && c[d] == 0.0 {
        d -= 1;
    }
    d
}

/// Physicists' Hermite polynomial H_k.
pub fn hermite(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for n in 1..k {
        // H_{n+1} = 2x H_n - 2n H_{n-1}
        let next = add(&mul(&[0.0, 2.0], &cur), &scale(&prev, -2.0 * n as f64));
        prev = cur;
        cur = next;
    }
    cur
}

/// Real roots in the open interval (lo, hi), sorted, each found by bisection
/// between consecutive critical points.
pub fn roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c.to_vec());
    let d = degree(&c);
    if d == 0 || lo >= hi {
        return Vec::new();
    }
    if d == 1 {
        let r = -c[0] / c[1];
        return if r > lo && r < hi { vec![r] } else { Vec::new() };
    }
    let mut knots = vec![lo];
    knots.extend(roots_in(&derivative(&c), lo, hi));
    knots.push(hi);
    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(&c, a), eval(&c, b));
        if fb == 0.0 && b < hi {
            push_unique(&mut out, b);
            continue;
        }
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        push_unique(&mut out, bisect(&c, a, b, fa));
    }
    out
}

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if v.last().is_none_or(|&l| l != x) {
        v.push(x);
    }
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = [1.0, -3.0, 2.0]; // (1-x)(1-2x)
        assert_eq!(eval(&p, 2.0), 3.0);
        assert_eq!(derivative(&p), vec![-3.0, 4.0]);
        assert_eq!(antiderivative(&[2.0, 2.0]), vec![0.0, 2.0, 1.0]);
    }

    #[test]
    fn roots_of_cubic() {
        // (x+1) x (x-0.5) = x^3 + 0.5x^2 - 0.5x
        let r = roots_in(&[0.0, -0.5, 0.5, 1.0], -2.0, 2.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-1.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        assert!(roots_in(&[1.0, 0.0, 1.0], -5.0, 5.0).is_empty());
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(2), vec![-2.0, 0.0, 4.0]);
        assert_eq!(hermite(3), vec![0.0, -12.0, 0.0, 8.0]);
    }
}
