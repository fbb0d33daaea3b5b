//! Reference computations written without the library.

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn argmax(f: &[i64]) -> Vec<i64> {
    let m = *f.iter().max().unwrap();
    (0..f.len() as i64)
        .filter(|&k| f[k as usize] == m)
        .collect()
}

/// Lexicographically least (i, j, k) with a[i] = b[j] = c[k].
pub fn first_common(a: &[i64], b: &[i64], c: &[i64]) -> Option<(i64, i64, i64)> {
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            for (k, z) in c.iter().enumerate() {
                if x == y && y == z {
                    return Some((i as i64, j as i64, k as i64));
                }
            }
        }
    }
    None
}

/// All non-attacking placements, `q[col] = row`, rows and columns 1-based.
pub fn queens(n: usize) -> Vec<Vec<i64>> {
    fn go(n: usize, q: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if q.len() == n {
            out.push(q.clone());
            return;
        }
        let col = q.len() as i64 + 1;
        for row in 1..=n as i64 {
            let safe = q.iter().enumerate().all(|(c, &r)| {
                let c = c as i64 + 1;
                r != row && (r - row).abs() != (c - col).abs()
            });
            if safe {
                q.push(row);
                go(n, q, out);
                q.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

pub fn non_attacking(q: &[i64]) -> bool {
    let n = q.len();
    (0..n).all(|i| {
        (1..=n as i64).contains(&q[i])
            && (i + 1..n).all(|j| q[i] != q[j] && (q[i] - q[j]).abs() != (j - i) as i64)
    })
}

/// Blank-free copy of a sentinel-terminated input, sentinel included.
pub fn filter_blanks(input: &[i64], blank: i64, sentinel: i64) -> Vec<i64> {
    let mut out = Vec::new();
    for &x in input {
        if x != blank {
            out.push(x);
        }
        if x == sentinel {
            break;
        }
    }
    out
}

pub fn least_positive(ia: &[i64]) -> i64 {
    ia.iter()
        .position(|&v| v > 0)
        .map_or(ia.len() as i64 + 1, |p| p as i64 + 1)
}

/// Iterates `x := F(x)` from the bottom of `(0..=h)^n`.
pub fn kleene(f: &dyn Fn(&[u32]) -> Vec<u32>, n: usize) -> Vec<u32> {
    let mut x = vec![0; n];
    loop {
        let y = f(&x);
        if y == x {
            return x;
        }
        x = y;
    }
}

/// Points reachable from bottom by single-component updates
/// `x_i := F_i(x)` taken while `x` is not a fixed point.
pub fn chaotic_reachable(f: &dyn Fn(&[u32]) -> Vec<u32>, n: usize) -> Vec<Vec<u32>> {
    let mut seen = vec![vec![0; n]];
    let mut k = 0;
    while k < seen.len() {
        let x = seen[k].clone();
        k += 1;
        let fx = f(&x);
        if fx == x {
            continue;
        }
        for i in 0..n {
            let mut y = x.clone();
            y[i] = fx[i];
            if !seen.contains(&y) {
                seen.push(y);
            }
        }
    }
    seen
}
