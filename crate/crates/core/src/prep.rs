//! Circuit states and canonical class representatives.
//!
//! Each photon carries a polarization qubit `p` and a spatial qubit `s`.
//! After the beam displacer only `|00>` and `|11>` are populated per photon,
//! and the waveplate stage maps
//!
//! ```text
//! |00> -> |00>
//! |11> -> cos(2 route) |10> - sin(2 route) (cos(2 rotate) |01> - sin(2 rotate) |11>)
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{apply_sloc, c, complex_gaussian, PureState, SlocOperator, NORM_TOL};
use crate::seeding;

const AMPLITUDE_TOL: f64 = 1e-12;

fn check_amplitudes(alpha: Complex64, beta: Complex64) -> Result<()> {
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if (n - 1.0).abs() > AMPLITUDE_TOL {
        return invalid(format!("|alpha|^2 + |beta|^2 = {n}, expected 1"));
    }
    Ok(())
}

/// `(alpha, beta) = (cos 2g, sin 2g)` for a pump half-wave plate at `g`.
///
/// One convention among several; the configs take amplitudes directly.
pub fn pump_amplitudes(gamma_h: f64) -> (Complex64, Complex64) {
    let t = 2.0 * gamma_h;
    (c(t.cos(), 0.0), c(t.sin(), 0.0))
}

/// Output of one photon's `(p, s)` pair for input `|11>`, indexed `2p + s`.
fn pair_output(route: f64, rotate: f64) -> [f64; 4] {
    let (s_route, c_route) = (2.0 * route).sin_cos();
    let (s_rot, c_rot) = (2.0 * rotate).sin_cos();
    [0.0, -s_route * c_rot, c_route, s_route * s_rot]
}

/// Three-qubit circuit, qubit order `(A_p, B_p, A_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveplateConfig3 {
    pub alpha: Complex64,
    pub beta: Complex64,
    /// HWP angle routing the `|1>` spatial mode.
    pub phi: f64,
    /// HWP angle rotating polarization in the routed mode.
    pub varphi: f64,
}

impl WaveplateConfig3 {
    pub fn new(alpha: Complex64, beta: Complex64, phi: f64, varphi: f64) -> Result<Self> {
        check_amplitudes(alpha, beta)?;
        Ok(Self { alpha, beta, phi, varphi })
    }

    pub fn validate(&self) -> Result<()> {
        check_amplitudes(self.alpha, self.beta)
    }

    /// Settings that reach `class`, where the circuit can.
    pub fn preset(class: ThreeQubitClass) -> Option<Self> {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let cfg = match class {
            ThreeQubitClass::S => Self { alpha: Complex64::ONE, beta: Complex64::ZERO, phi: 0.0, varphi: 0.0 },
            ThreeQubitClass::BsAbC => Self { alpha: h, beta: h, phi: 0.0, varphi: 0.0 },
            ThreeQubitClass::BsBcA => Self { alpha: h, beta: h, phi: FRAC_PI_4, varphi: 0.0 },
            ThreeQubitClass::BsAcB => return None,
            ThreeQubitClass::W => Self {
                alpha: c((1.0f64 / 3.0).sqrt(), 0.0),
                beta: c((2.0f64 / 3.0).sqrt(), 0.0),
                phi: FRAC_PI_8,
                varphi: 0.0,
            },
            ThreeQubitClass::Ghz => Self { alpha: h, beta: h, phi: FRAC_PI_4, varphi: FRAC_PI_4 },
        };
        Some(cfg)
    }
}

/// `alpha |000> + beta [cos2phi |110> - sin2phi (cos2varphi |011> - sin2varphi |111>)]`.
pub fn prepare_three_qubit(cfg: &WaveplateConfig3) -> Result<PureState> {
    cfg.validate()?;
    let t = pair_output(cfg.phi, cfg.varphi);
    let mut amps = vec![Complex64::ZERO; 8];
    amps[0] = cfg.alpha;
    for a_p in 0..2 {
        for a_s in 0..2 {
            amps[(a_p << 2) | (1 << 1) | a_s] += cfg.beta * t[2 * a_p + a_s];
        }
    }
    PureState::normalized(amps)
}

/// Four-qubit circuit, qubit order `(A_p, B_p, A_s, B_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveplateConfig4 {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub route_a: f64,
    pub route_b: f64,
    pub rotate_a: f64,
    pub rotate_b: f64,
}

impl WaveplateConfig4 {
    pub fn new(alpha: Complex64, beta: Complex64, angles: [f64; 4]) -> Result<Self> {
        check_amplitudes(alpha, beta)?;
        let [route_a, route_b, rotate_a, rotate_b] = angles;
        Ok(Self { alpha, beta, route_a, route_b, rotate_a, rotate_b })
    }

    /// From `[gamma_h, route_A, route_B, rotate_A, rotate_B]`, with the pump
    /// angle converted by [`pump_amplitudes`].
    pub fn from_angle_set(m: [f64; 5]) -> Result<Self> {
        let (alpha, beta) = pump_amplitudes(m[0]);
        Self::new(alpha, beta, [m[1], m[2], m[3], m[4]])
    }

    pub fn validate(&self) -> Result<()> {
        check_amplitudes(self.alpha, self.beta)
    }

    /// Circuit settings producing a member of `family`, for the families the
    /// setup reaches.
    pub fn preset(family: FourQubitFamily) -> Option<Self> {
        use FourQubitFamily::*;
        let h = c(FRAC_1_SQRT_2, 0.0);
        let q = FRAC_PI_4;
        let e = FRAC_PI_8;
        let (alpha, beta, angles) = match family {
            LAbc2 => (Complex64::ONE, Complex64::ZERO, [0.0; 4]),
            LA2b2 => (h, h, [0.0; 4]),
            L0_3plus1bar0_3plus1 => (h, h, [q, 0.0, q, 0.0]),
            LA2_0_3plus1 => (c((1.0f64 / 3.0).sqrt(), 0.0), c((2.0f64 / 3.0).sqrt(), 0.0), [e, 0.0, 0.0, 0.0]),
            LAb3 => (h, h, [e, e, 0.0, 0.0]),
            GAbcd => (h, h, [q; 4]),
            LA4 | L0_5plus3 | L0_7plus1bar => return None,
        };
        Some(Self::new(alpha, beta, angles).expect("preset amplitudes are normalized"))
    }
}

/// Applies the per-photon transform to `alpha |0000> + beta |1111>`.
pub fn prepare_four_qubit(cfg: &WaveplateConfig4) -> Result<PureState> {
    cfg.validate()?;
    let ta = pair_output(cfg.route_a, cfg.rotate_a);
    let tb = pair_output(cfg.route_b, cfg.rotate_b);
    let mut amps = vec![Complex64::ZERO; 16];
    amps[0] = cfg.alpha;
    for idx in 0..16usize {
        let bit = |q: usize| (idx >> (3 - q)) & 1;
        let (a_p, b_p, a_s, b_s) = (bit(0), bit(1), bit(2), bit(3));
        amps[idx] += cfg.beta * (ta[2 * a_p + a_s] * tb[2 * b_p + b_s]);
    }
    PureState::normalized(amps)
}

/// The six three-qubit SLOCC classes. Parties `A, B, C` are qubits 0, 1, 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ThreeQubitClass {
    S,
    #[serde(rename = "BS_AB_C")]
    BsAbC,
    #[serde(rename = "BS_AC_B")]
    BsAcB,
    #[serde(rename = "BS_BC_A")]
    BsBcA,
    W,
    #[serde(rename = "GHZ")]
    Ghz,
}

impl ThreeQubitClass {
    pub const ALL: [ThreeQubitClass; 6] = [Self::S, Self::BsAbC, Self::BsAcB, Self::BsBcA, Self::W, Self::Ghz];

    pub fn label(self) -> &'static str {
        match self {
            Self::S => "S",
            Self::BsAbC => "BS_AB_C",
            Self::BsAcB => "BS_AC_B",
            Self::BsBcA => "BS_BC_A",
            Self::W => "W",
            Self::Ghz => "GHZ",
        }
    }

    /// The qubit left in a product state, for biseparable classes.
    pub fn separable_qubit(self) -> Option<usize> {
        match self {
            Self::BsAbC => Some(2),
            Self::BsAcB => Some(1),
            Self::BsBcA => Some(0),
            _ => None,
        }
    }

    /// Ranks of the single-qubit marginals of a generic member.
    pub fn marginal_ranks(self) -> [usize; 3] {
        match self {
            Self::S => [1, 1, 1],
            Self::BsAbC => [2, 2, 1],
            Self::BsAcB => [2, 1, 2],
            Self::BsBcA => [1, 2, 2],
            Self::W | Self::Ghz => [2, 2, 2],
        }
    }
}

impl std::str::FromStr for ThreeQubitClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown three-qubit class {s:?}")))
    }
}

fn basis_sum(n: usize, terms: &[(&str, Complex64)]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::ZERO; 1 << n];
    for (bits, coeff) in terms {
        let idx = usize::from_str_radix(bits, 2).expect("binary literal");
        amps[idx] += *coeff;
    }
    amps
}

/// Class representative; biseparable pairs and GHZ use equal weights.
pub fn canonical_three_qubit(class: ThreeQubitClass) -> PureState {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let w = c(1.0 / 3f64.sqrt(), 0.0);
    let terms: Vec<(&str, Complex64)> = match class {
        ThreeQubitClass::S => vec![("000", Complex64::ONE)],
        ThreeQubitClass::BsAbC => vec![("000", h), ("110", h)],
        ThreeQubitClass::BsAcB => vec![("000", h), ("101", h)],
        ThreeQubitClass::BsBcA => vec![("000", h), ("011", h)],
        ThreeQubitClass::W => vec![("001", w), ("010", w), ("100", w)],
        ThreeQubitClass::Ghz => vec![("000", h), ("111", h)],
    };
    PureState::new(basis_sum(3, &terms)).expect("representatives are normalized")
}

/// The nine four-qubit families of the SLOCC classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FourQubitFamily {
    #[serde(rename = "G_abcd")]
    GAbcd,
    #[serde(rename = "L_abc2")]
    LAbc2,
    #[serde(rename = "L_a2b2")]
    LA2b2,
    #[serde(rename = "L_ab3")]
    LAb3,
    #[serde(rename = "L_a4")]
    LA4,
    #[serde(rename = "L_a2_0_3plus1")]
    LA2_0_3plus1,
    #[serde(rename = "L_0_5plus3")]
    L0_5plus3,
    #[serde(rename = "L_0_7plus1bar")]
    L0_7plus1bar,
    #[serde(rename = "L_0_3plus1bar_0_3plus1")]
    L0_3plus1bar0_3plus1,
}

impl FourQubitFamily {
    pub const ALL: [FourQubitFamily; 9] = [
        Self::GAbcd,
        Self::LAbc2,
        Self::LA2b2,
        Self::LAb3,
        Self::LA4,
        Self::LA2_0_3plus1,
        Self::L0_5plus3,
        Self::L0_7plus1bar,
        Self::L0_3plus1bar0_3plus1,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::GAbcd => "G_abcd",
            Self::LAbc2 => "L_abc2",
            Self::LA2b2 => "L_a2b2",
            Self::LAb3 => "L_ab3",
            Self::LA4 => "L_a4",
            Self::LA2_0_3plus1 => "L_a2_0_3plus1",
            Self::L0_5plus3 => "L_0_5plus3",
            Self::L0_7plus1bar => "L_0_7plus1bar",
            Self::L0_3plus1bar0_3plus1 => "L_0_3plus1bar_0_3plus1",
        }
    }
}

impl std::str::FromStr for FourQubitFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown four-qubit family {s:?}")))
    }
}

/// A family with its complex parameters; unused parameters are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: FourQubitFamily,
    #[serde(default)]
    pub a: Complex64,
    #[serde(default)]
    pub b: Complex64,
    #[serde(default)]
    pub c: Complex64,
    #[serde(default)]
    pub d: Complex64,
}

impl FamilySpec {
    pub fn new(family: FourQubitFamily, params: [Complex64; 4]) -> Self {
        let [a, b, c, d] = params;
        Self { family, a, b, c, d }
    }
}

/// Normalized family representative.
///
/// `L_0_3plus1bar_0_3plus1` uses the same expression as `L_a2_0_3plus1`:
/// the published representatives coincide textually and are kept literal.
pub fn canonical_four_qubit(spec: &FamilySpec) -> Result<PureState> {
    use FourQubitFamily::*;
    let FamilySpec { a, b, c: cc, d, .. } = *spec;
    let one = Complex64::ONE;
    let i = Complex64::I;
    let half = 0.5;
    let terms: Vec<(&str, Complex64)> = match spec.family {
        GAbcd => vec![
            ("0000", (a + b) * half),
            ("1111", (a + b) * half),
            ("0011", (a - d) * half),
            ("1100", (a - d) * half),
            ("0101", (b + cc) * half),
            ("1010", (b + cc) * half),
            ("0110", (b - cc) * half),
            ("1001", (b - cc) * half),
        ],
        LAbc2 => vec![
            ("0000", (a + b) * half),
            ("1111", (a + b) * half),
            ("0011", (a - b) * half),
            ("1100", (a - b) * half),
            ("0101", cc),
            ("1010", cc),
            ("0110", one),
        ],
        LA2b2 => vec![("0000", a), ("1111", a), ("0101", b), ("1010", b), ("0110", one), ("0011", one)],
        LAb3 => {
            let r = i * FRAC_1_SQRT_2;
            vec![
                ("0000", a),
                ("1111", a),
                ("0101", (a + b) * half),
                ("1010", (a + b) * half),
                ("0110", (a - b) * half),
                ("1001", (a - b) * half),
                ("0001", r),
                ("0010", r),
                ("0111", r),
                ("1011", r),
            ]
        }
        LA4 => vec![
            ("0000", a),
            ("0101", a),
            ("1010", a),
            ("1111", a),
            ("0001", i),
            ("0110", one),
            ("1011", -i),
        ],
        LA2_0_3plus1 | L0_3plus1bar0_3plus1 => {
            vec![("0000", a), ("1111", a), ("0011", one), ("0101", one), ("0110", one)]
        }
        L0_5plus3 => vec![("0000", one), ("0101", one), ("1000", one), ("1110", one)],
        L0_7plus1bar => vec![("0000", one), ("1011", one), ("1100", one), ("1110", one)],
    };
    let amps = basis_sum(4, &terms);
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 1e-9 {
        return Err(Error::DegenerateFamily(norm));
    }
    PureState::normalized(amps)
}

const MIN_SAMPLED_DET: f64 = 0.1;
const MAX_SLOC_ATTEMPTS: usize = 100;

fn random_invertible<R: rand::Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    loop {
        let m = Matrix2::from_fn(|_, _| complex_gaussian(rng));
        if m.determinant().norm() > MIN_SAMPLED_DET {
            return m;
        }
    }
}

/// Random SLOCC image of the canonical representative of `class`.
pub fn random_class_member(class: ThreeQubitClass, seed: u64) -> Result<PureState> {
    let psi = canonical_three_qubit(class);
    let mut rng = seeding::rng(seed);
    let mut last = Error::DegenerateOperator(0.0);
    for _ in 0..MAX_SLOC_ATTEMPTS {
        let ops = (0..3).map(|_| random_invertible(&mut rng)).collect();
        let op = SlocOperator::new(ops)?;
        match apply_sloc(&op, &psi) {
            Ok(out) => return Ok(out),
            Err(e @ Error::DegenerateOperator(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// `true` when `psi` and `phi` agree up to a global phase within `tol`.
pub fn equal_up_to_phase(psi: &PureState, phi: &PureState, tol: f64) -> bool {
    psi.dim() == phi.dim() && (1.0 - psi.inner(phi).norm()).abs() <= tol.max(NORM_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{local_max_eigenvalues, marginal_ranks, partial_trace};
    use approx::assert_abs_diff_eq;

    fn amps(psi: &PureState) -> Vec<Complex64> {
        psi.amplitudes().iter().copied().collect()
    }

    #[test]
    fn ghz_preset_gives_ghz() {
        let psi = prepare_three_qubit(&WaveplateConfig3::preset(ThreeQubitClass::Ghz).unwrap()).unwrap();
        assert!(equal_up_to_phase(&psi, &canonical_three_qubit(ThreeQubitClass::Ghz), 1e-12));
        for l in local_max_eigenvalues(&psi.projector()) {
            assert_abs_diff_eq!(l, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn w_preset_sign() {
        let psi = prepare_three_qubit(&WaveplateConfig3::preset(ThreeQubitClass::W).unwrap()).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let a = amps(&psi);
        assert_abs_diff_eq!(a[0b000].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(a[0b110].re, s, epsilon = 1e-12);
        assert_abs_diff_eq!(a[0b011].re, -s, epsilon = 1e-12);
        for l in local_max_eigenvalues(&psi.projector()) {
            assert_abs_diff_eq!(l, 2.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn biseparable_presets() {
        let ab_c = prepare_three_qubit(&WaveplateConfig3::preset(ThreeQubitClass::BsAbC).unwrap()).unwrap();
        assert_eq!(marginal_ranks(&ab_c.projector(), 1e-9), vec![2, 2, 1]);
        let bc_a = prepare_three_qubit(&WaveplateConfig3::preset(ThreeQubitClass::BsBcA).unwrap()).unwrap();
        assert_eq!(marginal_ranks(&bc_a.projector(), 1e-9), vec![1, 2, 2]);
        assert!(WaveplateConfig3::preset(ThreeQubitClass::BsAcB).is_none());
    }

    #[test]
    fn config_rejects_unnormalized_amplitudes() {
        assert!(WaveplateConfig3::new(Complex64::ONE, Complex64::ONE, 0.0, 0.0).is_err());
        assert!(WaveplateConfig4::new(Complex64::ONE, Complex64::ONE, [0.0; 4]).is_err());
    }

    #[test]
    fn four_qubit_ghz_and_product() {
        let ghz = prepare_four_qubit(&WaveplateConfig4::preset(FourQubitFamily::GAbcd).unwrap()).unwrap();
        let a = amps(&ghz);
        assert_abs_diff_eq!(a[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(a[15].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        let prod = prepare_four_qubit(&WaveplateConfig4::preset(FourQubitFamily::LAbc2).unwrap()).unwrap();
        assert_eq!(marginal_ranks(&prod.projector(), 1e-9), vec![1, 1, 1, 1]);
    }

    #[test]
    fn four_qubit_ghz3_times_zero() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let cfg = WaveplateConfig4::new(h, h, [FRAC_PI_4, 0.0, FRAC_PI_4, 0.0]).unwrap();
        let psi = prepare_four_qubit(&cfg).unwrap();
        let a = amps(&psi);
        assert_abs_diff_eq!(a[0b0000].norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(a[0b1110].norm(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_eq!(marginal_ranks(&psi.projector(), 1e-9), vec![2, 2, 2, 1]);
    }

    #[test]
    fn pump_converter() {
        let cfg = WaveplateConfig4::from_angle_set([FRAC_PI_8, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(cfg.alpha.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(cfg.beta.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let (a, b) = pump_amplitudes(0.0);
        assert_eq!((a.re, b.re), (1.0, 0.0));
    }

    #[test]
    fn four_qubit_w_type_spectrum() {
        let psi = prepare_four_qubit(&WaveplateConfig4::preset(FourQubitFamily::LAb3).unwrap()).unwrap();
        for l in local_max_eigenvalues(&psi.projector()) {
            assert_abs_diff_eq!(l, 0.75, epsilon = 1e-12);
        }
    }

    #[test]
    fn canonical_ranks_match_table() {
        for class in ThreeQubitClass::ALL {
            let psi = canonical_three_qubit(class);
            assert_eq!(marginal_ranks(&psi.projector(), 1e-9), class.marginal_ranks().to_vec(), "{class:?}");
        }
    }

    #[test]
    fn g_abcd_literal_expression() {
        let spec = FamilySpec::new(FourQubitFamily::GAbcd, [Complex64::ONE, Complex64::ONE, Complex64::ZERO, Complex64::ZERO]);
        let psi = canonical_four_qubit(&spec).unwrap();
        let mut expected = [0.0f64; 16];
        for i in [0b0000, 0b1111] {
            expected[i] = 1.0;
        }
        for i in [0b0011, 0b1100, 0b0101, 0b1010, 0b0110, 0b1001] {
            expected[i] = 0.5;
        }
        let n = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (i, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(psi.amplitude(i).re, e / n, epsilon = 1e-12);
        }
    }

    #[test]
    fn l_abc2_zero_params_is_product() {
        let psi = canonical_four_qubit(&FamilySpec::new(FourQubitFamily::LAbc2, [Complex64::ZERO; 4])).unwrap();
        assert_abs_diff_eq!(psi.amplitude(0b0110).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_family_parameters() {
        // G_abcd vanishes when a = b = c = d = 0.
        let spec = FamilySpec::new(FourQubitFamily::GAbcd, [Complex64::ZERO; 4]);
        assert!(matches!(canonical_four_qubit(&spec), Err(Error::DegenerateFamily(_))));
    }

    #[test]
    fn duplicated_representatives_coincide() {
        let p = [c(0.3, 0.0), Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];
        let x = canonical_four_qubit(&FamilySpec::new(FourQubitFamily::LA2_0_3plus1, p)).unwrap();
        let y = canonical_four_qubit(&FamilySpec::new(FourQubitFamily::L0_3plus1bar0_3plus1, p)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn random_members_keep_rank_signature() {
        for seed in 0..20 {
            let s = random_class_member(ThreeQubitClass::S, seed).unwrap();
            assert_eq!(marginal_ranks(&s.projector(), 1e-8), vec![1, 1, 1]);
            let bs = random_class_member(ThreeQubitClass::BsAcB, seed).unwrap();
            let r = partial_trace(&bs.projector(), &[1]).unwrap();
            assert_abs_diff_eq!(crate::linalg::purity(&r), 1.0, epsilon = 1e-9);
        }
        let a = random_class_member(ThreeQubitClass::Ghz, 5).unwrap();
        let b = random_class_member(ThreeQubitClass::Ghz, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn class_and_family_labels_round_trip() {
        for class in ThreeQubitClass::ALL {
            assert_eq!(class.label().parse::<ThreeQubitClass>().unwrap(), class);
        }
        for f in FourQubitFamily::ALL {
            assert_eq!(f.label().parse::<FourQubitFamily>().unwrap(), f);
        }
        assert!("nope".parse::<FourQubitFamily>().is_err());
    }
}
