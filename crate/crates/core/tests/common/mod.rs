//! Brute-force reference implementations, written without the library's
//! simulator or measure code.

#![allow(dead_code)]

/// One step of an elementary rule on a two-sided window; the result is two
/// cells shorter.
pub fn eca_step(rule: u8, cells: &[u8]) -> Vec<u8> {
    cells
        .windows(3)
        .map(|w| (rule >> (4 * w[0] + 2 * w[1] + w[2])) & 1)
        .collect()
}

/// Centre `2m+1` cells of each iterate `0..=t` of a two-sided window.
pub fn eca_trace(rule: u8, cells: &[u8], m: usize, t: usize) -> Vec<Vec<u8>> {
    let mut cur = cells.to_vec();
    let mut out = Vec::with_capacity(t + 1);
    for step in 0..=t {
        let mid = cur.len() / 2;
        out.push(cur[mid - m..=mid + m].to_vec());
        if step < t {
            cur = eca_step(rule, &cur);
        }
    }
    out
}

/// Cells `0..=m` of each shift iterate `0..=t` of a one-sided word.
pub fn shift_trace(cells: &[u8], m: usize, t: usize) -> Vec<Vec<u8>> {
    (0..=t).map(|i| cells[i..=i + m].to_vec()).collect()
}

/// Adds one with carry to mixed-radix digits, least significant first;
/// the last size repeats.
pub fn odometer_add_one(sizes: &[usize], digits: &mut [u8]) {
    for (i, d) in digits.iter_mut().enumerate() {
        let s = sizes[i.min(sizes.len() - 1)] as u8;
        *d += 1;
        if *d < s {
            return;
        }
        *d = 0;
    }
}

/// Steps until the digits come back to where they started.
pub fn odometer_return_time(sizes: &[usize], start: &[u8]) -> usize {
    let mut cur = start.to_vec();
    let mut steps = 0;
    loop {
        odometer_add_one(sizes, &mut cur);
        steps += 1;
        if cur == start {
            return steps;
        }
    }
}

/// All words of length `len` over `{0..k}`, lexicographic.
pub fn all_words(k: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone)]
pub enum Law {
    Iid(Vec<f64>),
    /// Two-state chain with the stationary law in closed form.
    Chain2 {
        p01: f64,
        p10: f64,
    },
}

impl Law {
    pub fn fair() -> Law {
        Law::Iid(vec![0.5, 0.5])
    }

    pub fn sticky() -> Law {
        Law::Chain2 { p01: 0.1, p10: 0.2 }
    }

    pub fn word(&self, w: &[u8]) -> f64 {
        match self {
            Law::Iid(p) => w.iter().map(|&s| p[s as usize]).product(),
            Law::Chain2 { p01, p10 } => {
                let pi0 = p10 / (p01 + p10);
                let pi = [pi0, 1.0 - pi0];
                let step = |a: u8, b: u8| match (a, b) {
                    (0, 0) => 1.0 - p01,
                    (0, _) => *p01,
                    (_, 0) => *p10,
                    _ => 1.0 - p10,
                };
                let Some(&first) = w.first() else { return 1.0 };
                pi[first as usize] * w.windows(2).map(|p| step(p[0], p[1])).product::<f64>()
            }
        }
    }
}

/// `mu(B^o_{m,T}(x) ∩ B_n(x)) / mu(B_n(x))` for an elementary rule,
/// enumerating every word on `W_{m+T}`. `x` is a two-sided window of radius
/// at least `m + T` and at least `n`.
pub fn eca_ratio(rule: u8, law: &Law, x: &[u8], m: usize, n: usize, t: usize) -> f64 {
    let rho = m + t;
    let mid = x.len() / 2;
    let core = &x[mid - rho..=mid + rho];
    let target = eca_trace(rule, core, m, t);
    let ball = &x[mid - n..=mid + n];
    let denom = law.word(ball);
    if n >= rho {
        return 1.0;
    }
    let mut mass = 0.0;
    for w in all_words(2, 2 * rho + 1) {
        if w[rho - n..=rho + n] != *ball {
            continue;
        }
        if eca_trace(rule, &w, m, t) == target {
            mass += law.word(&w);
        }
    }
    mass / denom
}

/// Smallest period then smallest preperiod with the evidence rule used by
/// the certificates: `T - q >= 2p` and `2q <= T`.
pub fn naive_eventual_period<T: PartialEq>(trace: &[T]) -> Option<(usize, usize)> {
    let t = trace.len().checked_sub(1)?;
    for p in 1..=t {
        for q in 0..=t {
            if t < q + 2 * p || 2 * q > t {
                continue;
            }
            if (q..=t - p).all(|i| trace[i] == trace[i + p]) {
                return Some((p, q));
            }
        }
    }
    None
}
