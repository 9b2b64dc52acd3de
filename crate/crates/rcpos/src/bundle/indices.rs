//! Index combinatorics for derived bundles: basis enumeration for tensor,
//! exterior and symmetric powers, all in the lexicographic orders the rest of
//! the module assumes.

/// Binomial coefficient, None on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

/// All k-tuples over 0..r in lexicographic order; the basis of the k-th
/// tensor power.
pub fn tuples(r: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < r {
                break;
            }
            cur[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// Strictly increasing p-subsets of 0..r in lexicographic order; the basis of
/// the p-th exterior power.
pub fn lex_subsets(r: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if p > r {
        return out;
    }
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that still has room.
        let mut pos = p;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < r - (p - pos) {
                cur[pos] += 1;
                for q in pos + 1..p {
                    cur[q] = cur[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Non-decreasing p-multisets over 0..r in lexicographic order; the basis of
/// the p-th symmetric power.
pub fn sorted_multisets(r: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; p];
    if r == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut pos = p;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < r - 1 {
                let v = cur[pos] + 1;
                for q in pos..p {
                    cur[q] = v;
                }
                break;
            }
        }
    }
}

/// The distinct arrangements of a sorted multiset, each a tuple.
pub fn multiset_arrangements(ms: &[usize]) -> Vec<Vec<usize>> {
    if ms.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut remaining = ms.to_vec();
    let mut prefix = Vec::with_capacity(ms.len());
    arrange(&mut remaining, &mut prefix, &mut out);
    out
}

fn arrange(remaining: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining.is_empty() {
        out.push(prefix.clone());
        return;
    }
    let mut last: Option<usize> = None;
    for pos in 0..remaining.len() {
        let v = remaining[pos];
        if last == Some(v) {
            continue;
        }
        last = Some(v);
        remaining.remove(pos);
        prefix.push(v);
        arrange(remaining, prefix, out);
        prefix.pop();
        remaining.insert(pos, v);
    }
}

/// All permutations of 0..p paired with their signs, by Heap's algorithm
/// (each step is a single transposition, so the sign just alternates with it).
pub fn permutations_signed(p: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..p).collect();
    let mut c = vec![0usize; p];
    let mut sign = 1.0f64;
    out.push((a.clone(), sign));
    let mut i = 0;
    while i < p {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            out.push((a.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Product of the multiplicity factorials of a sorted multiset. Together with
/// p! it fixes the normalization making the symmetric basis orthonormal.
pub fn multiset_multiplicity(ms: &[usize]) -> f64 {
    let mut acc = 1.0f64;
    let mut run = 1usize;
    for w in 1..=ms.len() {
        if w < ms.len() && ms[w] == ms[w - 1] {
            run += 1;
        } else {
            acc *= factorial(run);
            run = 1;
        }
    }
    acc
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
