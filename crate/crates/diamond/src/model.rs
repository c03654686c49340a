//! Domain types for the diamond network, system-matrix construction,
//! scattering solve, and non-reciprocity metrics.
//!
//! # Doubled space and probe bases
//!
//! The parametric (two-mode-squeezing) couplings mix annihilation and
//! creation operators, so the dynamics are written in the doubled basis
//! `{a1..a4, a1*..a4*}` with an 8x8 system matrix `M`. The scattering
//! matrix at probe frequency `w` is
//!
//! ```text
//! S(w) = I -/+ sqrt(G) (i w F + M)^-1 sqrt(G)
//! ```
//!
//! where `G` is the diagonal of port linewidths (duplicated across the two
//! blocks) and `F` selects the probe basis:
//!
//! * [`ProbeBasis::Conjugate`]: `F = diag(1,1,1,1,-1,-1,-1,-1)`. Each
//!   creation row is evaluated at the mirrored frequency `-w`, i.e. the
//!   creation components are paired with the conjugate tone. This is the
//!   standard convention for parametric networks with resonant pumps (it is
//!   what an explicit rotating-frame treatment of the pump phases produces),
//!   and it is the basis in which the squeezing terms contribute resonantly
//!   to the scattering at the probe tone. All spectra, sweeps and
//!   optimization targets use this basis.
//! * [`ProbeBasis::Uniform`]: `F = I`, the literal Fourier transform of the
//!   static-coefficient equations of motion `da/dt = M a - sqrt(G) a_in`.
//!   In this basis the creation block is probed far off resonance, the
//!   parametric terms decouple, and the network is reciprocal at every
//!   frequency. It is retained because it is exactly what the time-domain
//!   integrator (module `timedomain`) measures, giving an independent
//!   cross-check of the whole frequency-domain pipeline.
//!
//! The sign flag [`SignConvention`] switches between `I - ...` and
//! `I + ...`; only reflection (diagonal) entries differ between the two, so
//! every transmission-based metric is convention-invariant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Threshold below which a transmission coefficient is considered absent.
pub const DEGENERATE_TRANSMISSION_TOL: f64 = 1e-30;

/// Full parameterization of the four-mode diamond network.
///
/// Modes 1 and 3 resonate at `omega1`, modes 2 and 4 at `omega2` (rad/s).
/// `g, h, f, k` are the complex hopping rates on edges 1-2, 2-3, 3-4, 4-1;
/// `gamma` is the real parametric rate on both diagonals 1-3 and 2-4.
/// `gamma1` is the linewidth of ports 1 and 3, `gamma2` of ports 2 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondParams {
    pub omega1: f64,
    pub omega2: f64,
    pub g: Complex64,
    pub h: Complex64,
    pub f: Complex64,
    pub k: Complex64,
    pub gamma: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl DiamondParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > 0.0) || !(self.omega2 > 0.0) {
            return Err(Error::InvalidParams(
                "mode resonance frequencies must be positive".into(),
            ));
        }
        if self.omega1 == self.omega2 {
            return Err(Error::InvalidParams(
                "the two resonance frequencies must differ (resonant pump drives \
                 require omega1 != omega2)"
                    .into(),
            ));
        }
        if !(self.gamma1 > 0.0) || !(self.gamma2 > 0.0) {
            return Err(Error::InvalidParams(
                "port linewidths must be positive".into(),
            ));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParams(
                "parametric rate must be non-negative".into(),
            ));
        }
        for (name, c) in [("g", self.g), ("h", self.h), ("f", self.f), ("k", self.k)] {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "hopping rate {name} must be finite"
                )));
            }
        }
        if !self.gamma.is_finite() || !self.gamma1.is_finite() || !self.gamma2.is_finite() {
            return Err(Error::InvalidParams("rates must be finite".into()));
        }
        Ok(())
    }

    /// Quality factor of ports 1 and 3.
    pub fn q1(&self) -> f64 {
        self.omega1 / self.gamma1
    }

    /// Quality factor of ports 2 and 4.
    pub fn q2(&self) -> f64 {
        self.omega2 / self.gamma2
    }

    /// Port linewidths in mode order 1..4.
    pub fn linewidths(&self) -> [f64; 4] {
        [self.gamma1, self.gamma2, self.gamma1, self.gamma2]
    }

    /// Redistributes the round-trip phase `theta` equally over the four
    /// hopping edges (theta/4 each), preserving magnitudes.
    pub fn with_theta(&self, theta: f64) -> Self {
        let quarter = Complex64::from_polar(1.0, theta / 4.0);
        let mut p = *self;
        p.g = Complex64::from_polar(self.g.norm(), 0.0) * quarter;
        p.h = Complex64::from_polar(self.h.norm(), 0.0) * quarter;
        p.f = Complex64::from_polar(self.f.norm(), 0.0) * quarter;
        p.k = Complex64::from_polar(self.k.norm(), 0.0) * quarter;
        p
    }

    /// Sum of the four hopping phases (the round-trip phase theta).
    pub fn round_trip_phase(&self) -> f64 {
        self.g.arg() + self.h.arg() + self.f.arg() + self.k.arg()
    }

    /// The equivalent general coupling graph.
    pub fn to_graph(&self) -> CouplingGraph {
        CouplingGraph {
            modes: vec![
                ModeSpec { resonance: self.omega1, linewidth: self.gamma1 },
                ModeSpec { resonance: self.omega2, linewidth: self.gamma2 },
                ModeSpec { resonance: self.omega1, linewidth: self.gamma1 },
                ModeSpec { resonance: self.omega2, linewidth: self.gamma2 },
            ],
            hopping_edges: vec![(0, 1, self.g), (1, 2, self.h), (2, 3, self.f), (3, 0, self.k)],
            parametric_edges: vec![(0, 2, self.gamma), (1, 3, self.gamma)],
        }
    }
}

/// One bosonic mode: resonance frequency and port linewidth, both rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub resonance: f64,
    pub linewidth: f64,
}

/// General coupling graph: modes plus hopping and parametric edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    pub modes: Vec<ModeSpec>,
    /// Undirected beamsplitter edges `(m, n, c)`: the equation of motion of
    /// mode `n` picks up `-i c a_m`, that of mode `m` picks up `-i c* a_n`.
    pub hopping_edges: Vec<(usize, usize, Complex64)>,
    /// Undirected two-mode-squeezing edges `(m, n, rate)` with real rate.
    pub parametric_edges: Vec<(usize, usize, f64)>,
}

impl CouplingGraph {
    pub fn validate(&self) -> Result<()> {
        let n = self.modes.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one mode".into()));
        }
        for m in &self.modes {
            if !(m.resonance > 0.0) || !(m.linewidth > 0.0) {
                return Err(Error::InvalidGraph(
                    "mode resonances and linewidths must be positive".into(),
                ));
            }
        }
        let mut seen_hop = std::collections::HashSet::new();
        for &(a, b, c) in &self.hopping_edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "hopping edge ({a},{b}) has invalid endpoints"
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidGraph("hopping rate must be finite".into()));
            }
            if !seen_hop.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate hopping edge ({a},{b})"
                )));
            }
        }
        let mut seen_par = std::collections::HashSet::new();
        for &(a, b, r) in &self.parametric_edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "parametric edge ({a},{b}) has invalid endpoints"
                )));
            }
            if !r.is_finite() {
                return Err(Error::InvalidGraph("parametric rate must be finite".into()));
            }
            if !seen_par.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate parametric edge ({a},{b})"
                )));
            }
        }
        Ok(())
    }

    pub fn linewidths(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.linewidth).collect()
    }
}

/// Normalized auxiliary pump amplitudes driven into ports 2 and 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    pub a2bar: Complex64,
    pub a4bar: Complex64,
}

impl PumpConfig {
    pub const OFF: PumpConfig = PumpConfig {
        a2bar: Complex64::new(0.0, 0.0),
        a4bar: Complex64::new(0.0, 0.0),
    };

    pub fn real(a2: f64, a4: f64) -> Self {
        Self {
            a2bar: Complex64::new(a2, 0.0),
            a4bar: Complex64::new(a4, 0.0),
        }
    }
}

/// Sign in front of the `sqrt(G) (...)^-1 sqrt(G)` term of the scattering
/// formula. Transmission magnitudes are identical between the two; only
/// reflections differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// `S = I - sqrt(G) (iwF + M)^-1 sqrt(G)`.
    Paper,
    /// `S = I + sqrt(G) (iwF + M)^-1 sqrt(G)`; the sign produced by the
    /// input-output boundary relation `a_out = a_in + sqrt(G) a` under an
    /// `e^{-iwt}` drive, as measured by the time-domain integrator.
    Standard,
}

/// Frequency signature used in the resolvent; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeBasis {
    Conjugate,
    Uniform,
}

/// Scattering matrix at one probe frequency plus the flags it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub probe_frequency: f64,
    pub s: ComplexMatrix,
    pub convention: SignConvention,
    pub basis: ProbeBasis,
}

/// Builds the 8x8 diamond system matrix.
///
/// Row/column order is `{a1, a2, a3, a4, a1*, a2*, a3*, a4*}`. The
/// annihilation block has diagonal `-i omega_n - Gamma_n/2`, hopping entries
/// `-i c` / `-i c*`, and the creation block is its elementwise conjugate.
/// Parametric entries `-i gamma` couple annihilation rows to creation
/// columns at (1,7),(2,8),(3,5),(4,6) and `+i gamma` the reverse at
/// (5,3),(6,4),(7,1),(8,2) (1-based positions).
pub fn build_diamond_matrix(p: &DiamondParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let i = Complex64::new(0.0, 1.0);
    let mut m = ComplexMatrix::zeros(8, 8);

    let diag = [
        -i * p.omega1 - p.gamma1 / 2.0,
        -i * p.omega2 - p.gamma2 / 2.0,
        -i * p.omega1 - p.gamma1 / 2.0,
        -i * p.omega2 - p.gamma2 / 2.0,
    ];
    for (n, &d) in diag.iter().enumerate() {
        m[(n, n)] = d;
        m[(n + 4, n + 4)] = d.conj();
    }

    for (a, b, c) in [(0, 1, p.g), (1, 2, p.h), (2, 3, p.f), (3, 0, p.k)] {
        m[(b, a)] += -i * c;
        m[(a, b)] += -i * c.conj();
        m[(b + 4, a + 4)] += (-i * c).conj();
        m[(a + 4, b + 4)] += (-i * c.conj()).conj();
    }

    for (a, b) in [(0, 2), (1, 3)] {
        let ig = i * p.gamma;
        m[(a, b + 4)] += -ig;
        m[(b, a + 4)] += -ig;
        m[(a + 4, b)] += ig;
        m[(b + 4, a)] += ig;
    }
    Ok(m)
}

/// Builds the 2Nx2N doubled-space system matrix of a general graph.
pub fn build_graph_matrix(graph: &CouplingGraph) -> Result<ComplexMatrix> {
    graph.validate()?;
    let n = graph.modes.len();
    let i = Complex64::new(0.0, 1.0);
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);

    for (idx, mode) in graph.modes.iter().enumerate() {
        let d = -i * mode.resonance - mode.linewidth / 2.0;
        m[(idx, idx)] = d;
        m[(idx + n, idx + n)] = d.conj();
    }
    for &(a, b, c) in &graph.hopping_edges {
        m[(b, a)] += -i * c;
        m[(a, b)] += -i * c.conj();
        m[(b + n, a + n)] += (-i * c).conj();
        m[(a + n, b + n)] += (-i * c.conj()).conj();
    }
    for &(a, b, r) in &graph.parametric_edges {
        let ig = i * r;
        m[(a, b + n)] += -ig;
        m[(b, a + n)] += -ig;
        m[(a + n, b)] += ig;
        m[(b + n, a)] += ig;
    }
    Ok(m)
}

/// Computes the scattering matrix in the default [`ProbeBasis::Conjugate`].
pub fn scattering(
    m: &ComplexMatrix,
    linewidths: &[f64],
    w: f64,
    convention: SignConvention,
) -> Result<ScatteringResult> {
    scattering_in_basis(m, linewidths, w, convention, ProbeBasis::Conjugate)
}

/// Computes `S(w) = I -/+ sqrt(G) (iwF + M)^-1 sqrt(G)` in the given basis.
///
/// `linewidths` has length N and is duplicated across the two blocks to
/// form the 2N-dimensional diagonal `G`.
pub fn scattering_in_basis(
    m: &ComplexMatrix,
    linewidths: &[f64],
    w: f64,
    convention: SignConvention,
    basis: ProbeBasis,
) -> Result<ScatteringResult> {
    let dim = m.rows();
    if !m.is_square() || dim % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "system matrix must be square with even dimension, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = dim / 2;
    if linewidths.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} linewidths for a {dim}x{dim} system matrix, got {}",
            linewidths.len()
        )));
    }
    if linewidths.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidParams("linewidths must be positive".into()));
    }

    let i = Complex64::new(0.0, 1.0);
    let mut a = m.clone();
    for idx in 0..dim {
        let sign = match basis {
            ProbeBasis::Uniform => 1.0,
            ProbeBasis::Conjugate => {
                if idx < n {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        a[(idx, idx)] += i * (w * sign);
    }
    let inv = linalg::invert(&a)?;

    let sqrt_g: Vec<f64> = (0..dim).map(|idx| linewidths[idx % n].sqrt()).collect();
    let sign = match convention {
        SignConvention::Paper => -1.0,
        SignConvention::Standard => 1.0,
    };
    let mut s = ComplexMatrix::identity(dim);
    for r in 0..dim {
        for c in 0..dim {
            s[(r, c)] += sign * sqrt_g[r] * inv[(r, c)] * sqrt_g[c];
        }
    }
    Ok(ScatteringResult {
        probe_frequency: w,
        s,
        convention,
        basis,
    })
}

/// Symmetrized port 1 <-> 3 transmission asymmetry
/// `R = (|S31/S13|^2 + |S13/S31|^2) / 2`; equals 1 for reciprocal networks
/// and is >= 1 everywhere by AM-GM.
pub fn intrinsic_nonreciprocity(s: &ScatteringResult) -> Result<f64> {
    let s31 = s.s[(2, 0)];
    let s13 = s.s[(0, 2)];
    if s31.norm() < DEGENERATE_TRANSMISSION_TOL || s13.norm() < DEGENERATE_TRANSMISSION_TOL {
        return Err(Error::DegenerateTransmission(format!(
            "|S31| = {:.3e}, |S13| = {:.3e}: no meaningful 1<->3 transmission",
            s31.norm(),
            s13.norm()
        )));
    }
    let r = (s31 / s13).norm_sqr();
    Ok(0.5 * (r + 1.0 / r))
}

/// Pump-dressed transfer ratio
/// `W = (S31 + S32 a2 + S34 a4) / (S13 + S12 a2 + S14 a4)`,
/// using annihilation-block entries only.
pub fn extrinsic_w(s: &ScatteringResult, pumps: &PumpConfig) -> Result<Complex64> {
    let m = &s.s;
    let num = m[(2, 0)] + m[(2, 1)] * pumps.a2bar + m[(2, 3)] * pumps.a4bar;
    let den = m[(0, 2)] + m[(0, 1)] * pumps.a2bar + m[(0, 3)] * pumps.a4bar;
    if den.norm() < DEGENERATE_TRANSMISSION_TOL {
        return Err(Error::DegenerateTransmission(format!(
            "pump-dressed backward amplitude vanished (|den| = {:.3e})",
            den.norm()
        )));
    }
    Ok(num / den)
}

/// Symmetrized pump-dressed measure `R = (|W|^2 + |W|^-2) / 2`.
pub fn extrinsic_nonreciprocity(s: &ScatteringResult, pumps: &PumpConfig) -> Result<f64> {
    let w = extrinsic_w(s, pumps)?;
    let w2 = w.norm_sqr();
    if w2 < DEGENERATE_TRANSMISSION_TOL {
        return Err(Error::DegenerateTransmission(format!(
            "pump-dressed forward amplitude vanished (|W|^2 = {w2:.3e})"
        )));
    }
    Ok(0.5 * (w2 + 1.0 / w2))
}

/// Forward and backward power gains: the squared magnitudes of the
/// numerator and denominator of the pump-dressed ratio `W`. With pumps off
/// these reduce to `|S31|^2` and `|S13|^2`.
pub fn directional_gains(s: &ScatteringResult, pumps: &PumpConfig) -> (f64, f64) {
    let m = &s.s;
    let fwd = (m[(2, 0)] + m[(2, 1)] * pumps.a2bar + m[(2, 3)] * pumps.a4bar).norm_sqr();
    let bwd = (m[(0, 2)] + m[(0, 1)] * pumps.a2bar + m[(0, 3)] * pumps.a4bar).norm_sqr();
    (fwd, bwd)
}

/// Largest singular value of the annihilation-block 4x4 of `S`, via power
/// iteration on `B* B`. Intended as a passivity sanity check for networks
/// with the parametric rate set to zero and `convention = Standard`, where
/// the block must be contractive (largest singular value <= 1).
pub fn contractivity_check(s: &ScatteringResult) -> f64 {
    let n = s.s.rows() / 2;
    let mut b = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = s.s[(i, j)];
        }
    }
    let bhb = linalg::matmul(&b.conj_transpose(), &b).expect("square blocks");

    // Deterministic start vector with nonzero overlap with any direction.
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + i as f64 * 0.1, 0.3 - i as f64 * 0.05))
        .collect();
    let mut lambda = 0.0f64;
    for _ in 0..500 {
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += bhb[(i, j)] * v[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        for z in &mut next {
            *z /= norm;
        }
        v = next;
    }
    lambda.sqrt()
}

/// `10 log10(x)`: decibel value of a power-ratio quantity.
pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}
