use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::operators::{omega, qudit_clock_shift, HilbertSpace, Operator};
use crate::states::check_truncation;

/// Exact matrix elements `<m|D(beta)|n>`, `0 <= m, n <= n_max`, of the
/// untruncated displacement `exp(beta a^dag - beta^* a)`.
///
/// Uses `<n+k|D|n> = f_n^(k)(|beta|^2) e^{ik arg beta}` with `f` the
/// normalized associated Laguerre functions, generated by their three-term
/// recurrence in `n` from `f_0^(k) = x^{k/2} e^{-x/2} / sqrt(k!)`.
pub fn displacement_elements(beta: C64, n_max: usize) -> DMatrix<C64> {
    let d = n_max + 1;
    let x = beta.norm_sqr();
    if x == 0.0 {
        return DMatrix::identity(d, d);
    }
    let theta = beta.arg();
    let ln_x = x.ln();
    let mut ln_fact = vec![0.0f64; d + 1];
    for i in 1..=d {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut m = DMatrix::zeros(d, d);
    let mut f = vec![0.0f64; d];
    for k in 0..d {
        let len = d - k;
        f[0] = (0.5 * k as f64 * ln_x - 0.5 * x - 0.5 * ln_fact[k]).exp();
        if len > 1 {
            f[1] = (1.0 + k as f64 - x) * f[0] / ((1 + k) as f64).sqrt();
        }
        for n in 1..len.saturating_sub(1) {
            let nf = n as f64;
            let kf = k as f64;
            f[n + 1] = ((2.0 * nf + 1.0 + kf - x) * f[n] - (nf * (nf + kf)).sqrt() * f[n - 1])
                / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
        }
        let up = C64::from_polar(1.0, k as f64 * theta);
        let down = if k % 2 == 0 { up.conj() } else { -up.conj() };
        for (n, &fv) in f.iter().enumerate().take(len) {
            m[(n + k, n)] = up * fv;
            if k > 0 {
                m[(n, n + k)] = down * fv;
            }
        }
    }
    m
}

/// Displacement `D(z)` truncated to `|0>..|n_max>`; guarded like coherent states.
pub fn displacement(z: C64, n_max: usize) -> Result<Operator> {
    check_truncation(z.norm(), n_max)?;
    Operator::from_dense(HilbertSpace::fock(n_max)?, &displacement_elements(z, n_max))
}

/// Boson Wigner kernel `D(2z) (-1)^{a^dag a}` on `|0>..|n_max>`.
pub fn boson_kernel(z: C64, n_max: usize) -> DMatrix<C64> {
    let mut k = displacement_elements(2.0 * z, n_max);
    for c in (1..=n_max).step_by(2) {
        k.column_mut(c).neg_mut();
    }
    k
}

/// Qutrit displacement `D_Q(a, b) = w^{-2ab} Z^b X^a`; the half in the
/// exponent is the inverse of 2 mod 3.
pub fn qutrit_displacement(a: i64, b: i64) -> Operator {
    let (z, x) = qudit_clock_shift(3).expect("qutrit clock and shift");
    let zb = z.pow(b.rem_euclid(3) as u32);
    let xa = x.pow(a.rem_euclid(3) as u32);
    (&zb * &xa).scale(omega(-2 * a * b))
}

/// Qutrit parity `|i> -> |-i mod 3>`.
pub fn qutrit_parity() -> Operator {
    let space = HilbertSpace::qudit(3).expect("qutrit space");
    Operator::from_triplets(
        space,
        (0..3).map(|i| ((3 - i) % 3, i, C64::new(1.0, 0.0))).collect::<Vec<_>>(),
    )
    .into_hermitian()
    .expect("parity is Hermitian")
}

/// Qutrit Wigner kernel `D_Q(2a, 2b) Pi_Q` as a dense 3x3 matrix.
pub fn qutrit_kernel(a: i64, b: i64) -> [[C64; 3]; 3] {
    let k = &qutrit_displacement(2 * a, 2 * b) * &qutrit_parity();
    std::array::from_fn(|r| std::array::from_fn(|c| k.get(r, c)))
}
