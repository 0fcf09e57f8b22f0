//! Calderón's operator
//! `S_{p,q} f(t) = t^{-1/p} ∫_0^t s^{1/p} f(s) ds/s + t^{-1/q} ∫_t^∞ s^{1/q} f(s) ds/s`
//! and the Hardy average `A = S_{1,∞}`.

use crate::error::{check, Error, Result};
use crate::operators::curve::{Curve, CurvePiece, PowerTail};
use crate::stepfn::StepFunction;

fn check_pair(p: f64, q: f64) -> Result<()> {
    check(p > 0.0 && p.is_finite(), "exponent p", "> 0", p)?;
    if !(q > p) {
        return Err(Error::Window(format!("p < q <= ∞, got p={p}, q={q}")));
    }
    Ok(())
}

/// `S_{p,q} f(t)` by integrating `s^{1/p - 1}` and `s^{1/q - 1}` exactly
/// over each interval of `f`. `S_{p,∞}` drops the second term.
pub fn calderon(f: &StepFunction, p: f64, q: f64, t: f64) -> Result<f64> {
    check_pair(p, q)?;
    check(t > 0.0, "time t", "> 0", t)?;
    let (ip, iq) = (1.0 / p, 1.0 / q);
    let mut inner = 0.0;
    let mut outer = 0.0;
    for piece in f.pieces().filter(|piece| piece.value > 0.0) {
        if piece.start < t {
            let right = piece.end.min(t);
            inner += piece.value * p * (right.powf(ip) - piece.start.powf(ip));
        }
        if q.is_finite() && piece.end > t {
            let left = piece.start.max(t);
            outer += piece.value * q * (piece.end.powf(iq) - left.powf(iq));
        }
    }
    let mut s = t.powf(-ip) * inner;
    if q.is_finite() {
        s += t.powf(-iq) * outer;
    }
    Ok(s)
}

/// `S_{p,q} f` as a curve: on the `i`-th interval
/// `v_i (p - q) + α_i t^{-1/p} + β_i t^{-1/q}`, and `P t^{-1/p}` past the
/// support.
pub fn calderon_curve(f: &StepFunction, p: f64, q: f64) -> Result<Curve> {
    check_pair(p, q)?;
    let (ip, iq) = (1.0 / p, 1.0 / q);
    let pieces: Vec<_> = f.pieces().collect();
    let n = pieces.len();
    let mut outer_from = vec![0.0; n + 1];
    if q.is_finite() {
        for i in (0..n).rev() {
            let pc = pieces[i];
            outer_from[i] = outer_from[i + 1] + pc.value * q * (pc.end.powf(iq) - pc.start.powf(iq));
        }
    }
    let mut inner = 0.0;
    let mut out = Vec::with_capacity(n);
    for (i, pc) in pieces.iter().enumerate() {
        let v = pc.value;
        let alpha = inner - v * p * pc.start.powf(ip);
        let (c, beta) = if q.is_finite() {
            (v * (p - q), v * q * pc.end.powf(iq) + outer_from[i + 1])
        } else {
            (v * p, 0.0)
        };
        out.push(CurvePiece {
            start: pc.start,
            end: pc.end,
            c,
            terms: [(alpha, ip), (beta, if q.is_finite() { iq } else { 0.0 })],
        });
        inner += v * p * (pc.end.powf(ip) - pc.start.powf(ip));
    }
    Ok(Curve {
        pieces: out,
        tail: PowerTail {
            start: f.support_end(),
            coef: inner,
            exp: ip,
        },
    })
}

/// `A f(t) = t^{-1} ∫_0^t f`.
pub fn hardy_curve(f: &StepFunction) -> Curve {
    calderon_curve(f, 1.0, f64::INFINITY).expect("(1, ∞) is admissible")
}
