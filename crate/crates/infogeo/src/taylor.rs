//! Truncated multivariate Taylor arithmetic.
//!
//! A value is the jet of a smooth function at a point: the coefficients
//! c_α = ∂^α f / α! for every exponent multi-index α with |α| ≤ order.
//! Arithmetic on jets propagates derivatives exactly (up to rounding),
//! which is what the curvature pipeline needs at order 4 — central
//! differences lose far too much precision there.
//!
//! Enumeration tables (multi-index list, product decompositions) depend
//! only on (n, order) and are cached process-wide.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Enumeration tables for jets in `n` variables truncated at total degree
/// `order`.
pub struct JetContext {
    pub n: usize,
    pub order: usize,
    /// Multi-indices in graded lexicographic order; entry 0 is the constant.
    midx: Vec<Vec<u8>>,
    index_of: HashMap<Vec<u8>, usize>,
    /// For each coefficient γ, all ordered pairs (a, b) with α_a + α_b = γ.
    mul_pairs: Vec<Vec<(u32, u32)>>,
    /// α! per multi-index.
    alpha_factorial: Vec<f64>,
    /// Index of the degree-1 multi-index e_i per variable.
    var_index: Vec<usize>,
}

impl JetContext {
    fn build(n: usize, order: usize) -> Self {
        let mut midx: Vec<Vec<u8>> = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; n];
            gen_fixed_degree(&mut current, 0, degree as u8, &mut midx);
        }
        let index_of: HashMap<Vec<u8>, usize> = midx
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut mul_pairs = vec![Vec::new(); midx.len()];
        for (ia, a) in midx.iter().enumerate() {
            let da: usize = a.iter().map(|&v| v as usize).sum();
            for (ib, b) in midx.iter().enumerate() {
                let db: usize = b.iter().map(|&v| v as usize).sum();
                if da + db > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let ig = index_of[&sum];
                mul_pairs[ig].push((ia as u32, ib as u32));
            }
        }

        let alpha_factorial = midx
            .iter()
            .map(|m| m.iter().map(|&e| factorial(e as usize)).product())
            .collect();

        let var_index = (0..n)
            .map(|i| {
                let mut e = vec![0u8; n];
                if order >= 1 {
                    e[i] = 1;
                    index_of[&e]
                } else {
                    0
                }
            })
            .collect();

        Self {
            n,
            order,
            midx,
            index_of,
            mul_pairs,
            alpha_factorial,
            var_index,
        }
    }

    pub fn len(&self) -> usize {
        self.midx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.midx.is_empty()
    }

    pub fn multi_indices(&self) -> &[Vec<u8>] {
        &self.midx
    }

    pub fn index_of(&self, m: &[u8]) -> usize {
        self.index_of[m]
    }

    /// ∂^α f extracted from the coefficient vector of f's jet.
    pub fn derivative(&self, coeffs: &[f64], alpha: &[u8]) -> f64 {
        let idx = self.index_of[alpha];
        coeffs[idx] * self.alpha_factorial[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.midx[idx].iter().map(|&v| v as usize).sum()
    }
}

fn gen_fixed_degree(current: &mut Vec<u8>, pos: usize, remaining: u8, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        gen_fixed_degree(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

type ContextCache = Mutex<HashMap<(usize, usize), Arc<JetContext>>>;

/// Process-wide cache of enumeration tables.
pub fn context(n: usize, order: usize) -> Arc<JetContext> {
    static CACHE: OnceLock<ContextCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet context cache poisoned");
    guard
        .entry((n, order))
        .or_insert_with(|| Arc::new(JetContext::build(n, order)))
        .clone()
}

// ---------------------------------------------------------------------------
// Coefficient-vector kernels. Callers keep plain Vec<f64> buffers and pass
// the shared context explicitly; no per-value allocation of tables.
// ---------------------------------------------------------------------------

pub fn jet_const(ctx: &JetContext, v: f64) -> Vec<f64> {
    let mut c = vec![0.0; ctx.len()];
    c[0] = v;
    c
}

pub fn jet_var(ctx: &JetContext, i: usize, x: f64) -> Vec<f64> {
    let mut c = vec![0.0; ctx.len()];
    c[0] = x;
    if ctx.order >= 1 {
        c[ctx.var_index[i]] = 1.0;
    }
    c
}

pub fn jet_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn jet_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn jet_neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

pub fn jet_mul(ctx: &JetContext, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; ctx.len()];
    for (ig, pairs) in ctx.mul_pairs.iter().enumerate() {
        let mut acc = 0.0;
        for &(ia, ib) in pairs {
            acc += a[ia as usize] * b[ib as usize];
        }
        c[ig] = acc;
    }
    c
}

/// Solve b·c = a coefficient-by-coefficient in graded order.
pub fn jet_div(ctx: &JetContext, a: &[f64], b: &[f64]) -> Vec<f64> {
    let b0 = b[0];
    let mut c = vec![0.0; ctx.len()];
    for ig in 0..ctx.len() {
        let mut acc = a[ig];
        for &(ia, ib) in &ctx.mul_pairs[ig] {
            // b[ia]·c[ib] with ia ≠ 0 only touches lower-degree c entries.
            if ia != 0 {
                acc -= b[ia as usize] * c[ib as usize];
            }
        }
        c[ig] = acc / b0;
    }
    c
}

/// f(u) for a univariate f given the scaled derivatives f^(k)(u₀)/k!.
///
/// Writing u = u₀ + w with w the degree ≥ 1 part, w^(order+1) truncates to
/// zero, so a Horner evaluation in w is exact.
pub fn jet_compose(ctx: &JetContext, u: &[f64], scaled: &[f64]) -> Vec<f64> {
    debug_assert_eq!(scaled.len(), ctx.order + 1);
    let mut w = u.to_vec();
    w[0] = 0.0;
    let mut r = jet_const(ctx, scaled[ctx.order]);
    for k in (0..ctx.order).rev() {
        r = jet_mul(ctx, &r, &w);
        r[0] += scaled[k];
    }
    r
}

pub fn jet_exp(ctx: &JetContext, u: &[f64]) -> Vec<f64> {
    let e = u[0].exp();
    let mut scaled = vec![0.0; ctx.order + 1];
    let mut fct = 1.0;
    for (k, s) in scaled.iter_mut().enumerate() {
        if k > 0 {
            fct *= k as f64;
        }
        *s = e / fct;
    }
    jet_compose(ctx, u, &scaled)
}

pub fn jet_ln(ctx: &JetContext, u: &[f64]) -> Vec<f64> {
    let u0 = u[0];
    let mut scaled = vec![0.0; ctx.order + 1];
    scaled[0] = u0.ln();
    // d^k ln(u)/k! at u0 = (-1)^(k+1) / (k u0^k)
    let mut p = 1.0;
    for (k, s) in scaled.iter_mut().enumerate().skip(1) {
        p *= u0;
        *s = if k % 2 == 1 { 1.0 } else { -1.0 } / (k as f64 * p);
    }
    jet_compose(ctx, u, &scaled)
}

pub fn jet_sqrt(ctx: &JetContext, u: &[f64]) -> Vec<f64> {
    let u0 = u[0];
    let s = u0.sqrt();
    // binomial series: (u0 + w)^(1/2) = s·Σ C(1/2, k) (w/u0)^k
    let mut scaled = vec![0.0; ctx.order + 1];
    let mut coeff = 1.0;
    let mut p = 1.0;
    for (k, sc) in scaled.iter_mut().enumerate() {
        if k > 0 {
            coeff *= (0.5 - (k as f64 - 1.0)) / k as f64;
            p *= u0;
        }
        *sc = s * coeff / p;
    }
    jet_compose(ctx, u, &scaled)
}

pub fn jet_powi(ctx: &JetContext, u: &[f64], k: i32) -> Vec<f64> {
    if k == 0 {
        return jet_const(ctx, 1.0);
    }
    let (mut base, mut e) = if k < 0 {
        (jet_div(ctx, &jet_const(ctx, 1.0), u), (-k) as u32)
    } else {
        (u.to_vec(), k as u32)
    };
    let mut acc: Option<Vec<f64>> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => jet_mul(ctx, &a, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = jet_mul(ctx, &base, &base);
        }
    }
    acc.unwrap()
}
