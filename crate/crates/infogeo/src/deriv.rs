//! Derivative stacks: value and all partials of a scalar field up to
//! order 4 at a point.
//!
//! The main path propagates truncated Taylor jets through the operation
//! graph, so every entry is exact to rounding and the order-2/3/4 tensors
//! are symmetric by construction (all index permutations read the same jet
//! coefficient). Central finite differences are provided as an independent
//! cross-check; they are never used by the geometry pipeline itself.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::ScalarField;
use crate::taylor;
use crate::tensors::{Tensor3, Tensor4};

pub const MAX_ORDER: usize = 4;

/// Value and partial derivatives of a scalar field at one point.
///
/// Tensors above `max_order` are present but empty (dimension 0).
#[derive(Debug, Clone)]
pub struct DerivativeStack {
    pub max_order: usize,
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    pub order3: Tensor3,
    pub order4: Tensor4,
}

impl DerivativeStack {
    fn empty(n: usize, max_order: usize) -> Self {
        Self {
            max_order,
            value: 0.0,
            gradient: DVector::zeros(if max_order >= 1 { n } else { 0 }),
            hessian: DMatrix::zeros(
                if max_order >= 2 { n } else { 0 },
                if max_order >= 2 { n } else { 0 },
            ),
            order3: Tensor3::zeros(if max_order >= 3 { n } else { 0 }),
            order4: Tensor4::zeros(if max_order >= 4 { n } else { 0 }),
        }
    }

    /// a·self + b·other, componentwise.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.max_order, other.max_order);
        let n = self.gradient.len();
        let mut out = Self::empty(n, self.max_order);
        out.value = a * self.value + b * other.value;
        out.gradient = &self.gradient * a + &other.gradient * b;
        if self.max_order >= 2 {
            out.hessian = &self.hessian * a + &other.hessian * b;
        }
        if self.max_order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.order3[(i, j, k)] =
                            a * self.order3[(i, j, k)] + b * other.order3[(i, j, k)];
                    }
                }
            }
        }
        if self.max_order >= 4 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            out.order4[(i, j, k, l)] =
                                a * self.order4[(i, j, k, l)] + b * other.order4[(i, j, k, l)];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Exact derivatives up to `max_order` via jet propagation.
pub fn evaluate_stack(
    field: &ScalarField,
    point: &[f64],
    max_order: usize,
) -> Result<DerivativeStack> {
    if max_order > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "max_order {max_order} > {MAX_ORDER}"
        )));
    }
    field.check_in_domain(point)?;
    let n = field.arity();
    let ctx = taylor::context(n, max_order);
    let coeffs = field.tape().eval_jet(&ctx, point)?;

    let mut stack = DerivativeStack::empty(n, max_order);
    stack.value = coeffs[0];
    let mut alpha = vec![0u8; n];
    if max_order >= 1 {
        for i in 0..n {
            alpha[i] = 1;
            stack.gradient[i] = ctx.derivative(&coeffs, &alpha);
            alpha[i] = 0;
        }
    }
    if max_order >= 2 {
        for i in 0..n {
            for j in 0..n {
                alpha[i] += 1;
                alpha[j] += 1;
                stack.hessian[(i, j)] = ctx.derivative(&coeffs, &alpha);
                alpha[i] -= 1;
                alpha[j] -= 1;
            }
        }
    }
    if max_order >= 3 {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    alpha[i] += 1;
                    alpha[j] += 1;
                    alpha[k] += 1;
                    stack.order3[(i, j, k)] = ctx.derivative(&coeffs, &alpha);
                    alpha[i] -= 1;
                    alpha[j] -= 1;
                    alpha[k] -= 1;
                }
            }
        }
    }
    if max_order >= 4 {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        alpha[i] += 1;
                        alpha[j] += 1;
                        alpha[k] += 1;
                        alpha[l] += 1;
                        stack.order4[(i, j, k, l)] = ctx.derivative(&coeffs, &alpha);
                        alpha[i] -= 1;
                        alpha[j] -= 1;
                        alpha[k] -= 1;
                        alpha[l] -= 1;
                    }
                }
            }
        }
    }
    Ok(stack)
}

// ---------------------------------------------------------------------------
// Central-difference oracle.
// ---------------------------------------------------------------------------

/// Per-variable central stencil for the m-th derivative, O(h²) truncation.
/// Returned as (offset, weight) pairs; weights carry no h factor.
fn stencil(m: u8) -> &'static [(i8, f64)] {
    match m {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("stencils only go to order 4"),
    }
}

/// Central-difference estimate of ∂^alpha f at `point` with spacing `step`.
///
/// Truncation error is O(step²) for every order; round-off grows like
/// ε/step^|alpha|, so callers should pick larger steps for higher orders.
pub fn finite_difference_partial(
    field: &ScalarField,
    point: &[f64],
    alpha: &[u8],
    step: f64,
) -> Result<f64> {
    let n = field.arity();
    debug_assert_eq!(alpha.len(), n);
    let active: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0).collect();
    let total: u32 = alpha.iter().map(|&v| v as u32).sum();

    let mut acc = 0.0;
    let mut offsets = vec![0i8; active.len()];
    let mut shifted = point.to_vec();
    // tensor product of the per-variable stencils
    let mut stack_idx = vec![0usize; active.len()];
    loop {
        let mut weight = 1.0;
        for (slot, &var) in active.iter().enumerate() {
            let (off, w) = stencil(alpha[var])[stack_idx[slot]];
            offsets[slot] = off;
            weight *= w;
        }
        for (slot, &var) in active.iter().enumerate() {
            shifted[var] = point[var] + offsets[slot] as f64 * step;
        }
        if !field.domain().contains(&shifted) {
            return Err(Error::Domain(format!(
                "finite-difference stencil leaves the domain at offsets {offsets:?}"
            )));
        }
        acc += weight * field.value_unchecked(&shifted)?;

        // advance the mixed-radix counter over stencil nodes
        let mut slot = 0;
        loop {
            if slot == active.len() {
                return Ok(acc / step.powi(total as i32));
            }
            stack_idx[slot] += 1;
            if stack_idx[slot] < stencil(alpha[active[slot]]).len() {
                break;
            }
            stack_idx[slot] = 0;
            slot += 1;
        }
    }
}

/// Full derivative stack from central differences with a single spacing.
///
/// This is the independent oracle for [`evaluate_stack`]; expect accuracy
/// to degrade with order as O(step²) + O(ε/step^order).
pub fn finite_difference_stack(
    field: &ScalarField,
    point: &[f64],
    step: f64,
) -> Result<DerivativeStack> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }
    field.check_in_domain(point)?;
    let n = field.arity();
    let mut stack = DerivativeStack::empty(n, MAX_ORDER);
    stack.value = field.value(point)?;

    let mut alpha = vec![0u8; n];
    for i in 0..n {
        alpha[i] = 1;
        stack.gradient[i] = finite_difference_partial(field, point, &alpha, step)?;
        alpha[i] = 0;
    }
    for i in 0..n {
        for j in i..n {
            alpha[i] += 1;
            alpha[j] += 1;
            let v = finite_difference_partial(field, point, &alpha, step)?;
            alpha[i] -= 1;
            alpha[j] -= 1;
            stack.hessian[(i, j)] = v;
            stack.hessian[(j, i)] = v;
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                alpha[i] += 1;
                alpha[j] += 1;
                alpha[k] += 1;
                let v = finite_difference_partial(field, point, &alpha, step)?;
                alpha[i] -= 1;
                alpha[j] -= 1;
                alpha[k] -= 1;
                write_sym3(&mut stack.order3, i, j, k, v);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                for l in k..n {
                    alpha[i] += 1;
                    alpha[j] += 1;
                    alpha[k] += 1;
                    alpha[l] += 1;
                    let v = finite_difference_partial(field, point, &alpha, step)?;
                    alpha[i] -= 1;
                    alpha[j] -= 1;
                    alpha[k] -= 1;
                    alpha[l] -= 1;
                    write_sym4(&mut stack.order4, i, j, k, l, v);
                }
            }
        }
    }
    Ok(stack)
}

fn write_sym3(t: &mut Tensor3, i: usize, j: usize, k: usize, v: f64) {
    let idx = [i, j, k];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for p in perms {
        t[(idx[p[0]], idx[p[1]], idx[p[2]])] = v;
    }
}

fn write_sym4(t: &mut Tensor4, i: usize, j: usize, k: usize, l: usize, v: f64) {
    let idx = [i, j, k, l];
    let mut perm = [0usize, 1, 2, 3];
    // Heap's algorithm unrolled is overkill; 4! = 24 permutations via simple
    // recursion on a fixed array.
    fn rec(t: &mut Tensor4, idx: &[usize; 4], perm: &mut [usize; 4], k: usize, v: f64) {
        if k == 4 {
            t[(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]])] = v;
            return;
        }
        for i in k..4 {
            perm.swap(k, i);
            rec(t, idx, perm, k + 1, v);
            perm.swap(k, i);
        }
    }
    rec(t, &idx, &mut perm, 0, v);
}
