//! Pointwise envelopes `|f(x)| ≤ …` and lattice-sum tail bounds built from
//! them.
//!
//! A [`DecayModel`] is a finite sum of terms. A radial term bounds by
//! `E(‖x‖∞)`, a separable term by `Π_k E_k(|x_k|)`. Every envelope is
//! non-increasing, which is what the tail estimates rely on.

use serde::Serialize;

/// A non-increasing bound `E : [0, ∞) → [0, ∞)`:
///
/// ```text
/// E(u) = 0                     if u > radius
///      = min(sup, C·u^(−p))    if u ≥ threshold and p > 0
///      = sup                   otherwise
/// ```
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope {
    pub sup: f64,
    pub constant: f64,
    pub exponent: f64,
    pub threshold: f64,
    pub radius: Option<f64>,
}

impl Envelope {
    pub fn constant(sup: f64) -> Self {
        Envelope {
            sup,
            constant: sup,
            exponent: 0.0,
            threshold: 0.0,
            radius: None,
        }
    }

    pub fn compact(sup: f64, radius: f64) -> Self {
        Envelope {
            radius: Some(radius),
            ..Envelope::constant(sup)
        }
    }

    pub fn power_law(sup: f64, constant: f64, exponent: f64, threshold: f64) -> Self {
        Envelope {
            sup,
            constant,
            exponent,
            threshold,
            radius: None,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        if let Some(r) = self.radius {
            if u > r {
                return 0.0;
            }
        }
        if self.exponent > 0.0 && u >= self.threshold && u > 0.0 {
            self.sup.min(self.constant * u.powf(-self.exponent))
        } else {
            self.sup
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup == 0.0
    }

    pub fn scale(&self, k: f64) -> Self {
        Envelope {
            sup: self.sup * k,
            constant: self.constant * k,
            ..self.clone()
        }
    }

    /// Bound for `u ↦ E(u / s)`, `s > 0`.
    pub fn stretch(&self, s: f64) -> Self {
        Envelope {
            sup: self.sup,
            constant: self.constant * s.powf(self.exponent),
            exponent: self.exponent,
            threshold: self.threshold * s,
            radius: self.radius.map(|r| r * s),
        }
    }

    /// Bound for `u ↦ E(max(0, u − σ))`.
    pub fn shift(&self, sigma: f64) -> Self {
        if sigma == 0.0 {
            return self.clone();
        }
        // for u ≥ 2σ we have u − σ ≥ u/2
        Envelope {
            sup: self.sup,
            constant: self.constant * 2f64.powf(self.exponent),
            exponent: self.exponent,
            threshold: (self.threshold + sigma).max(2.0 * sigma),
            radius: self.radius.map(|r| r + sigma),
        }
    }

    pub fn product(&self, other: &Envelope) -> Self {
        Envelope {
            sup: self.sup * other.sup,
            constant: self.constant * other.constant,
            exponent: self.exponent + other.exponent,
            threshold: self.threshold.max(other.threshold),
            radius: match (self.radius, other.radius) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }

    /// Bound for `E^(1/m)`.
    pub fn root(&self, m: usize) -> Self {
        let k = 1.0 / m as f64;
        Envelope {
            sup: self.sup.powf(k),
            constant: self.constant.powf(k),
            exponent: self.exponent * k,
            threshold: self.threshold,
            radius: self.radius,
        }
    }

    /// `Σ_{k ≥ start} E(k)` for integers `k`.
    pub fn integer_tail(&self, start: u64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if let Some(r) = self.radius {
            let last = r.floor() as u64;
            return (start..=last).map(|k| self.eval(k as f64)).sum();
        }
        if self.exponent <= 1.0 {
            return f64::INFINITY;
        }
        let k0 = start.max(3).max(self.threshold.ceil() as u64);
        let explicit: f64 = (start..k0).map(|k| self.eval(k as f64)).sum();
        let k = k0 as f64;
        let p = self.exponent;
        explicit + self.constant * (k.powf(-p) + k.powf(1.0 - p) / (p - 1.0))
    }
}

/// One summand of a [`DecayModel`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DecayTerm {
    /// `|f(x)| ≤ E(‖x‖∞)`.
    Radial { envelope: Envelope },
    /// `|f(x)| ≤ Π_k E_k(|x_k|)`.
    Separable { axes: Vec<Envelope> },
}

impl DecayTerm {
    fn scale(&self, k: f64) -> Self {
        match self {
            DecayTerm::Radial { envelope } => DecayTerm::Radial {
                envelope: envelope.scale(k),
            },
            DecayTerm::Separable { axes } => {
                let mut axes = axes.clone();
                axes[0] = axes[0].scale(k);
                DecayTerm::Separable { axes }
            }
        }
    }

    fn sup(&self) -> f64 {
        match self {
            DecayTerm::Radial { envelope } => envelope.sup,
            DecayTerm::Separable { axes } => axes.iter().map(|e| e.sup).product(),
        }
    }

    /// Radial bound in `‖·‖∞`: at the coordinate attaining the max norm the
    /// factor decays and every other factor is at most its sup.
    fn to_radial(&self) -> Envelope {
        match self {
            DecayTerm::Radial { envelope } => envelope.clone(),
            DecayTerm::Separable { axes } => {
                let sups: Vec<f64> = axes.iter().map(|e| e.sup).collect();
                let others = |k: usize| -> f64 {
                    sups.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, s)| s).product()
                };
                let exponent = axes.iter().map(|e| e.exponent).fold(f64::INFINITY, f64::min);
                let constant = axes
                    .iter()
                    .enumerate()
                    .map(|(k, e)| e.constant * others(k))
                    .sum();
                let threshold = axes.iter().map(|e| e.threshold).fold(1.0, f64::max);
                let radius = axes
                    .iter()
                    .map(|e| e.radius)
                    .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
                Envelope {
                    sup: sups.iter().product(),
                    constant,
                    exponent,
                    threshold,
                    radius,
                }
            }
        }
    }

    fn to_separable(&self, n: usize) -> Vec<Envelope> {
        match self {
            DecayTerm::Radial { envelope } => vec![envelope.root(n); n],
            DecayTerm::Separable { axes } => axes.clone(),
        }
    }

    fn product(&self, other: &DecayTerm, n: usize) -> DecayTerm {
        match (self, other) {
            (DecayTerm::Radial { envelope: a }, DecayTerm::Radial { envelope: b }) => {
                DecayTerm::Radial {
                    envelope: a.product(b),
                }
            }
            _ => {
                let a = self.to_separable(n);
                let b = other.to_separable(n);
                DecayTerm::Separable {
                    axes: a.iter().zip(&b).map(|(x, y)| x.product(y)).collect(),
                }
            }
        }
    }

    fn axis_radius(&self, k: usize) -> Option<f64> {
        match self {
            DecayTerm::Radial { envelope } => envelope.radius,
            DecayTerm::Separable { axes } => axes[k].radius,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            DecayTerm::Radial { envelope } => envelope.is_zero(),
            DecayTerm::Separable { axes } => axes.iter().any(Envelope::is_zero),
        }
    }
}

/// `|f(x)| ≤ Σ_terms bound(x)` on `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayModel {
    pub n: usize,
    pub terms: Vec<DecayTerm>,
}

impl DecayModel {
    pub fn radial(n: usize, envelope: Envelope) -> Self {
        DecayModel {
            n,
            terms: vec![DecayTerm::Radial { envelope }],
        }
    }

    pub fn separable(axes: Vec<Envelope>) -> Self {
        DecayModel {
            n: axes.len(),
            terms: vec![DecayTerm::Separable { axes }],
        }
    }

    pub fn bounded(n: usize, sup: f64) -> Self {
        DecayModel::radial(n, Envelope::constant(sup))
    }

    pub fn zero(n: usize) -> Self {
        DecayModel { n, terms: vec![] }
    }

    pub fn sup(&self) -> f64 {
        self.terms.iter().map(DecayTerm::sup).sum()
    }

    pub fn scale(&self, k: f64) -> Self {
        DecayModel {
            n: self.n,
            terms: self.terms.iter().map(|t| t.scale(k)).collect(),
        }
    }

    pub fn sum(&self, other: &DecayModel) -> Self {
        DecayModel {
            n: self.n,
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }

    pub fn product(&self, other: &DecayModel) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let t = a.product(b, self.n);
                if !t.is_zero() {
                    terms.push(t);
                }
            }
        }
        DecayModel { n: self.n, terms }
    }

    /// Bound for `x ↦ f(x_A)·g(x_B)` on the concatenated variables.
    pub fn tensor(&self, other: &DecayModel) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut axes = a.to_separable(self.n);
                axes.extend(b.to_separable(other.n));
                terms.push(DecayTerm::Separable { axes });
            }
        }
        DecayModel {
            n: self.n + other.n,
            terms,
        }
    }

    /// Bound for `x ↦ f(x_k / s_k)` with every `s_k > 0`.
    pub fn stretch(&self, s: &[f64]) -> Self {
        let smax = s.iter().copied().fold(0.0, f64::max);
        self.map_terms(|t| match t {
            DecayTerm::Radial { envelope } => DecayTerm::Radial {
                envelope: envelope.stretch(smax),
            },
            DecayTerm::Separable { axes } => DecayTerm::Separable {
                axes: axes.iter().zip(s).map(|(e, &sk)| e.stretch(sk)).collect(),
            },
        })
    }

    /// Bound for `x ↦ f(x − o)`.
    pub fn shift(&self, o: &[f64]) -> Self {
        let m = o.iter().map(|x| x.abs()).fold(0.0, f64::max);
        self.map_terms(|t| match t {
            DecayTerm::Radial { envelope } => DecayTerm::Radial {
                envelope: envelope.shift(m),
            },
            DecayTerm::Separable { axes } => DecayTerm::Separable {
                axes: axes.iter().zip(o).map(|(e, ok)| e.shift(ok.abs())).collect(),
            },
        })
    }

    /// Bound for `x ↦ f(Tx)` given `T⁻¹` (row-major). Diagonal `T` keeps
    /// separable terms separable; otherwise `‖Tx‖∞ ≥ ‖x‖∞ / ‖T⁻¹‖∞` is used.
    pub fn linear_map(&self, t_inv: &[f64]) -> Self {
        let n = self.n;
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || t_inv[i * n + j] == 0.0));
        if diagonal {
            let s: Vec<f64> = (0..n).map(|i| t_inv[i * n + i].abs()).collect();
            return self.stretch(&s);
        }
        let kappa = (0..n)
            .map(|i| (0..n).map(|j| t_inv[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        self.map_terms(|t| DecayTerm::Radial {
            envelope: t.to_radial().stretch(kappa),
        })
    }

    fn map_terms(&self, f: impl Fn(&DecayTerm) -> DecayTerm) -> Self {
        DecayModel {
            n: self.n,
            terms: self.terms.iter().map(f).collect(),
        }
    }

    /// Per-axis radius outside of which the function vanishes, if known.
    pub fn support_box(&self) -> Vec<Option<f64>> {
        (0..self.n)
            .map(|k| {
                self.terms
                    .iter()
                    .map(|t| t.axis_radius(k))
                    .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
            })
            .collect()
    }

    /// Uniform bound on `Σ_{p ∈ ℤⁿ, ‖p‖∞ > R} B(t − p)` over `t ∈ [0,1)ⁿ`,
    /// where `B` is this model read as a bound on a nonnegative function
    /// (typically `|f̄ g|`). Infinite when the sum need not converge.
    pub fn lattice_tail(&self, radius: u64) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                DecayTerm::Radial { envelope } => radial_tail(envelope, self.n, radius),
                DecayTerm::Separable { axes } => separable_tail(axes, radius),
            })
            .sum()
    }
}

fn shell_count(n: usize, m: u64) -> f64 {
    let n = n as i32;
    (2.0 * m as f64 + 1.0).powi(n) - (2.0 * m as f64 - 1.0).powi(n)
}

/// For `‖p‖∞ = m` and `t ∈ [0,1)ⁿ`, `‖t − p‖∞ ≥ m − 1`.
fn radial_tail(h: &Envelope, n: usize, radius: u64) -> f64 {
    if h.is_zero() {
        return 0.0;
    }
    if let Some(rho) = h.radius {
        let last = rho.floor() as u64 + 1;
        return (radius + 1..=last)
            .map(|m| shell_count(n, m) * h.eval((m - 1) as f64))
            .sum();
    }
    let q = h.exponent;
    if q <= n as f64 {
        return f64::INFINITY;
    }
    let k0 = 3u64.max(h.threshold.ceil() as u64).max(radius);
    let explicit: f64 = (radius + 1..=k0)
        .map(|m| shell_count(n, m) * h.eval((m - 1) as f64))
        .sum();
    // m = j + 1 with j ≥ k0 ≥ 3: shell ≤ 2n(2j + 3)^(n−1) ≤ 2n·3^(n−1)·j^(n−1)
    let s = q - n as f64 + 1.0;
    let k = k0 as f64;
    let tail = 2.0 * n as f64 * 3f64.powi(n as i32 - 1) * h.constant * (k.powf(-s) + k.powf(1.0 - s) / (s - 1.0));
    explicit + tail
}

/// Inclusion–exclusion over the box: `Π(Ŝ_k + T̂_k) − Π Ŝ_k`.
fn separable_tail(axes: &[Envelope], radius: u64) -> f64 {
    if axes.iter().any(Envelope::is_zero) {
        return 0.0;
    }
    let r = radius as i64;
    let mut inside = 1.0;
    let mut all = 1.0;
    for h in axes {
        let s: f64 = (-r..=r)
            .map(|m| {
                let dist = match m {
                    0 | 1 => 0.0,
                    m if m >= 2 => (m - 1) as f64,
                    m => (-m) as f64,
                };
                h.eval(dist)
            })
            .sum();
        let t = 2.0 * h.integer_tail(radius);
        inside *= s;
        all *= s + t;
    }
    if all.is_infinite() {
        return f64::INFINITY;
    }
    (all - inside).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar() -> Envelope {
        Envelope::power_law(1.0, 1.0 / std::f64::consts::PI, 1.0, 0.0)
    }

    #[test]
    fn envelope_is_monotone() {
        let e = haar().shift(0.7).stretch(3.0);
        let mut prev = f64::INFINITY;
        for k in 0..2000 {
            let v = e.eval(k as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn shift_dominates() {
        let e = haar();
        let s = e.shift(1.5);
        for k in 0..5000 {
            let u = k as f64 * 0.01;
            assert!(s.eval(u) >= e.eval((u - 1.5).max(0.0)) - 1e-15, "u = {u}");
        }
    }

    #[test]
    fn radial_tail_dominates_haar_square_sum() {
        let h = haar().product(&haar());
        for r in [4u64, 16, 64] {
            let bound = radial_tail(&h, 1, r);
            for t in [0.0, 0.25, 0.5, 0.99] {
                let truth: f64 = (r as i64 + 1..200_000)
                    .flat_map(|p| [p, -p])
                    .map(|p| h.eval((t - p as f64).abs()))
                    .sum();
                assert!(truth <= bound, "R = {r}, t = {t}: {truth} > {bound}");
            }
            assert!(bound < 4.0 / (r as f64));
        }
    }

    #[test]
    fn separable_tail_dominates_two_dim() {
        let h = haar().product(&haar());
        let r = 8u64;
        let bound = separable_tail(&[h.clone(), h.clone()], r);
        let t = [0.5, 0.5];
        let mut truth = 0.0;
        let big = 400i64;
        for p in -big..=big {
            for q in -big..=big {
                if p.abs().max(q.abs()) > r as i64 {
                    truth += h.eval((t[0] - p as f64).abs()) * h.eval((t[1] - q as f64).abs());
                }
            }
        }
        assert!(truth <= bound);
        assert!(bound.is_finite());
    }

    #[test]
    fn non_summable_is_infinite() {
        let c = Envelope::constant(1.0);
        assert!(radial_tail(&c, 1, 10).is_infinite());
        assert!(radial_tail(&haar().product(&haar()), 2, 10).is_infinite());
        assert!(separable_tail(&[c.clone(), haar().product(&haar())], 5).is_infinite());
    }

    #[test]
    fn compact_tail_vanishes_beyond_support() {
        let e = Envelope::compact(1.0, 2.5);
        assert_eq!(radial_tail(&e, 2, 3), 0.0);
        assert!(radial_tail(&e, 2, 1) > 0.0);
        let m = DecayModel::separable(vec![e.clone(), Envelope::compact(1.0, 0.5)]);
        assert_eq!(m.support_box(), vec![Some(2.5), Some(0.5)]);
        assert_eq!(m.lattice_tail(3), 0.0);
    }

    #[test]
    fn separable_to_radial_dominates() {
        let t = DecayTerm::Separable {
            axes: vec![haar(), haar().scale(2.0)],
        };
        let r = t.to_radial();
        for i in -30..30 {
            for j in -30..30 {
                let (x, y) = (i as f64 * 0.37, j as f64 * 0.41);
                let v = haar().eval(x.abs()) * 2.0 * haar().eval(y.abs());
                assert!(v <= r.eval(x.abs().max(y.abs())) + 1e-15);
            }
        }
    }
}
