use num_complex::Complex;

use super::constellation::Modulation;
use super::PhyError;
use crate::scalar::Real;

/// Guard on `|Z_m + Z_a|`, in ohms.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Resistance above which a load is treated as an open circuit.
const OPEN_CIRCUIT_OHMS: f64 = 1e12;

/// Minimum separation between reflection states of distinct loads.
const DISTINCT_GAMMA_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impedance<T> {
    pub resistance: T,
    pub reactance: T,
}

impl<T: Real> Impedance<T> {
    pub fn new(resistance: T, reactance: T) -> Self {
        Self { resistance, reactance }
    }

    pub fn resistive(resistance: T) -> Self {
        Self::new(resistance, T::zero())
    }

    pub fn reactive(reactance: T) -> Self {
        Self::new(T::zero(), reactance)
    }

    pub fn short() -> Self {
        Self::resistive(T::zero())
    }

    pub fn open() -> Self {
        Self::resistive(T::lit(OPEN_CIRCUIT_OHMS))
    }

    pub fn conj(self) -> Self {
        Self::new(self.resistance, -self.reactance)
    }

    pub fn is_passive(&self) -> bool {
        self.resistance >= T::zero()
    }

    pub fn as_complex(self) -> Complex<T> {
        Complex::new(self.resistance, self.reactance)
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z.re, z.im)
    }
}

/// Complex reflection state `Γ = |Γ|·e^{jθ_Γ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionCoefficient<T>(pub Complex<T>);

impl<T: Real> ReflectionCoefficient<T> {
    /// The `m = 0` inactive state: no reflection.
    pub fn inactive() -> Self {
        Self(Complex::new(T::zero(), T::zero()))
    }

    pub fn from_polar(magnitude: T, phase: T) -> Self {
        Self(Complex::from_polar(magnitude, phase))
    }

    pub fn value(self) -> Complex<T> {
        self.0
    }

    pub fn magnitude(self) -> T {
        self.0.norm()
    }

    pub fn phase(self) -> T {
        self.0.arg()
    }
}

/// `Γ = (Z_m − Z_a*) / (Z_m + Z_a)`.
pub fn reflection_coefficient<T: Real>(
    load: Impedance<T>,
    antenna: Impedance<T>,
) -> Result<ReflectionCoefficient<T>, PhyError> {
    if antenna.resistance <= T::zero() {
        return Err(PhyError::InvalidAntenna(antenna.resistance.as_f64()));
    }
    let zm = load.as_complex();
    let za = antenna.as_complex();
    let den = zm + za;
    if den.norm() < T::lit(DEGENERATE_EPS) {
        return Err(PhyError::DegenerateImpedance);
    }
    Ok(ReflectionCoefficient((zm - za.conj()) / den))
}

/// Inverts the reflection formula: the load that yields `gamma` on `antenna`.
///
/// The load is passive exactly when `|Γ| ≤ 1`.
pub fn load_for_reflection<T: Real>(
    gamma: Complex<T>,
    antenna: Impedance<T>,
) -> Result<Impedance<T>, PhyError> {
    if antenna.resistance <= T::zero() {
        return Err(PhyError::InvalidAntenna(antenna.resistance.as_f64()));
    }
    let one = Complex::new(T::one(), T::zero());
    let den = one - gamma;
    if den.norm() < T::lit(DEGENERATE_EPS) {
        return Err(PhyError::DegenerateImpedance);
    }
    let za = antenna.as_complex();
    Ok(Impedance::from_complex((za.conj() + gamma * za) / den))
}

/// Antenna impedance plus the `M` switchable loads of a tag.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpedanceMap<T> {
    antenna: Impedance<T>,
    loads: Vec<Impedance<T>>,
}

impl<T: Real> ImpedanceMap<T> {
    pub fn new(antenna: Impedance<T>, loads: Vec<Impedance<T>>) -> Result<Self, PhyError> {
        if antenna.resistance <= T::zero() {
            return Err(PhyError::InvalidAntenna(antenna.resistance.as_f64()));
        }
        if loads.is_empty() {
            return Err(PhyError::InvalidImpedanceMap("at least one load is required".into()));
        }
        if let Some(i) = loads.iter().position(|z| !z.is_passive()) {
            return Err(PhyError::InvalidImpedanceMap(format!(
                "load {i} has negative resistance"
            )));
        }
        let gammas = loads
            .iter()
            .map(|&z| reflection_coefficient(z, antenna).map(|g| g.0))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..gammas.len() {
            for j in i + 1..gammas.len() {
                if (gammas[i] - gammas[j]).norm() <= T::lit(DISTINCT_GAMMA_EPS) {
                    return Err(PhyError::InvalidImpedanceMap(format!(
                        "loads {i} and {j} produce the same reflection state"
                    )));
                }
            }
        }
        Ok(Self { antenna, loads })
    }

    /// Builds the loads that realize the requested reflection states.
    pub fn synthesize(antenna: Impedance<T>, gammas: &[Complex<T>]) -> Result<Self, PhyError> {
        let loads = gammas
            .iter()
            .map(|&g| {
                let mut z = load_for_reflection(g, antenna)?;
                // |Γ| = 1 lands on R = 0 up to rounding.
                if z.resistance < T::zero() && z.resistance > -T::lit(1e-9) {
                    z.resistance = T::zero();
                }
                Ok(z)
            })
            .collect::<Result<Vec<_>, PhyError>>()?;
        Self::new(antenna, loads)
    }

    /// Default tag front end for `modulation` on a 50 Ω antenna.
    ///
    /// OOK switches a short against the inactive state, BPSK toggles short and
    /// open, and the multi-level schemes use synthesized loads whose Γ points
    /// are the unit constellation scaled into the passive disc.
    pub fn default_for(modulation: Modulation) -> Self {
        let antenna = Impedance::resistive(T::lit(50.0));
        let map = match modulation {
            Modulation::Ook => Self::new(antenna, vec![Impedance::short()]),
            Modulation::Bpsk => Self::new(antenna, vec![Impedance::short(), Impedance::open()]),
            Modulation::Qpsk | Modulation::Qam16 => {
                let unit = modulation.unit_constellation::<T>();
                let peak = unit.iter().fold(T::zero(), |m, p| m.max(p.norm()));
                let scale = if modulation == Modulation::Qpsk {
                    T::one() / peak
                } else {
                    T::lit(0.9) / peak
                };
                let gammas: Vec<_> = unit.iter().map(|&p| p * scale).collect();
                Self::synthesize(antenna, &gammas)
            }
        };
        map.expect("default impedance maps are valid")
    }

    pub fn antenna(&self) -> Impedance<T> {
        self.antenna
    }

    pub fn loads(&self) -> &[Impedance<T>] {
        &self.loads
    }

    pub fn num_states(&self) -> usize {
        self.loads.len()
    }

    /// Reflection state `m`; `m = 0` is inactive, `1..=M` index the loads.
    pub fn state(&self, m: usize) -> Result<ReflectionCoefficient<T>, PhyError> {
        if m == 0 {
            return Ok(ReflectionCoefficient::inactive());
        }
        let load = self.loads.get(m - 1).ok_or_else(|| {
            PhyError::InvalidImpedanceMap(format!("state {m} out of range 0..={}", self.loads.len()))
        })?;
        reflection_coefficient(*load, self.antenna)
    }
}
