#pragma once

// Closed-form and transfer-matrix evaluators.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace qmm {

// ---------------------------------------------------------------------------
// Band structure of alpha'' = beta^2 alpha_xx - V(x) alpha with periodic V.
// ---------------------------------------------------------------------------

struct Segment {
    double length = 0.0;
    double v = 0.0;
};

struct PeriodicPotential {
    std::vector<Segment> segments;

    double period() const noexcept;
    /// One segment of length dxi per entry of `values`.
    static PeriodicPotential from_samples(std::span<const double> values, double dxi);
};

void validate_potential(const PeriodicPotential& p);

/// Real 2x2 matrix acting on (psi, dpsi/dx).
struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    double det() const noexcept { return a11 * a22 - a12 * a21; }
    double half_trace() const noexcept { return 0.5 * (a11 + a22); }
};

Mat2 operator*(const Mat2& lhs, const Mat2& rhs) noexcept;

/// Transfer matrix of one segment at frequency omega: propagating when
/// omega^2 > v, evanescent when omega^2 < v.
Mat2 segment_transfer(const Segment& s, double beta, double omega) noexcept;

struct PeriodTransfer {
    Mat2 matrix;
    double half_trace = 1.0;
    bool clamped = false;  // entries overflowed; half_trace saturated at +-kClampedTrace
};

inline constexpr double kClampedTrace = 1e150;

PeriodTransfer period_transfer(const PeriodicPotential& p, double beta, double omega);

struct BandRow {
    double omega = 0.0;
    double half_trace = 0.0;
    std::optional<double> bloch_k;  // empty inside a gap
    bool clamped = false;

    bool in_gap() const noexcept { return !bloch_k.has_value(); }
};

struct Gap {
    double omega_low = 0.0;
    double omega_high = 0.0;
    double width() const noexcept { return omega_high - omega_low; }
};

struct BandStructure {
    std::vector<BandRow> rows;
    std::vector<Gap> gaps;
};

/// Samples the half trace on `omega_grid` (strictly increasing, >= 0),
/// groups consecutive gap rows into intervals and refines every edge that
/// lies between two grid points by bisection on |half_trace| = 1 to 1e-10.
/// Edges at the ends of the grid are reported unrefined.
BandStructure bloch_bands(const PeriodicPotential& p, double beta,
                          std::span<const double> omega_grid);

std::vector<double> linspace(double lo, double hi, std::size_t n);

// ---------------------------------------------------------------------------
// Critical temperatures of the photon-field phase transitions. Energies are
// in joules, temperatures in kelvin.
// ---------------------------------------------------------------------------

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

struct TransitionParams {
    double m = 0.0;           // line inductance per unit cell
    double eta = 0.0;         // qubit-field interaction
    std::size_t n_qubits = 1;
    double delta0 = 0.0;      // tunnelling energy scale Delta_0

    double coupling_energy() const noexcept {
        return m * eta * eta * static_cast<double>(n_qubits);
    }
    /// Sets m and eta so that m eta^2 N / k_B = coupling_kelvin.
    static TransitionParams from_kelvin(double coupling_kelvin, double delta0_kelvin,
                                        std::size_t n_qubits);
};

void validate_transition(const TransitionParams& p);

struct CriticalTemperature {
    double kelvin = 0.0;
    bool valid = false;
};

/// T* = m eta^2 N / k_B, valid when Delta_0 < k_B T*.
CriticalTemperature critical_temp_weak_disorder(const TransitionParams& p);

/// T* = (Delta_0 / k_B) exp(-Delta_0 / (m eta^2 N)), valid when
/// Delta_0 > m eta^2 N.
CriticalTemperature critical_temp_strong_disorder(const TransitionParams& p);

enum class CouplingRegime { strong_coupling, weak_coupling };

/// strong: C [Delta_0^2 m eta^2 N / pi^2]^(1/3) / k_B
/// weak:   Delta_0 / (k_B pi) exp(-Delta_0 / (m eta^2 N))
double quantum_transition_temp(const TransitionParams& p, CouplingRegime regime,
                               double proportionality = 1.0);

// ---------------------------------------------------------------------------
// Quantum-dot permittivity and layered stacks (normal incidence, c = 1,
// time dependence e^{-i omega t}; Im eps > 0 is absorbing).
// ---------------------------------------------------------------------------

struct QDParams {
    double eps_b = 1.0;
    double pop_factor = 0.0;    // f_c - f_v; > 0 absorbing, < 0 amplifying
    double osc_strength = 0.0;  // a
    double omega0 = 1.0;
    double gamma = 0.1;
};

void validate_qd(const QDParams& p);

/// eps_b + pop_factor * a / (omega0^2 - omega^2 - 2 i omega gamma).
std::complex<double> qd_permittivity(const QDParams& p, double omega);

struct Layer {
    double thickness = 0.0;
    std::variant<std::complex<double>, QDParams> medium;
};

struct TransmissionRow {
    double omega = 0.0;
    std::complex<double> t;
    std::complex<double> r;
    double t2 = 0.0;  // |t|^2, not clamped to 1 for amplifying stacks
    bool clamped = false;
};

/// Complex transfer matrix on (E, dE/dx) for a homogeneous layer.
std::array<std::complex<double>, 4> layer_transfer(std::complex<double> eps, double thickness,
                                                   double omega);

/// Quarter-wave mirror (H L)^front, a half-wave quantum-dot layer, then
/// (L H)^back. Layer thicknesses are tuned to qd.omega0.
std::vector<Layer> bragg_cavity(const QDParams& qd, double eps_high, double eps_low,
                                std::size_t front, std::size_t back);

/// (QD L)^periods with quarter-wave layers at qd.omega0.
std::vector<Layer> qd_superlattice(const QDParams& qd, double eps_low, std::size_t periods);

std::vector<TransmissionRow> layered_transmission(std::span<const Layer> stack,
                                                  double ambient_eps,
                                                  std::span<const double> omega_grid);

}  // namespace qmm
