#pragma once

// End-to-end scenarios: single-qubit scattering, breathing photonic crystal,
// priming-pulse crystal creation and lasing onset.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qmm/analytics.hpp"
#include "qmm/core.hpp"
#include "qmm/field.hpp"
#include "qmm/qubits.hpp"

namespace qmm {

enum class LaunchSide { left, right, both };
enum class Envelope { gaussian, raised_cosine };

/// A wave packet launched towards the chain. `amplitude` is the peak
/// electric field; `envelope_width` is the full extent of the packet
/// (raised cosine support, or six standard deviations of a gaussian).
struct PulseSpec {
    double amplitude = 0.0;
    double carrier_k = 0.0;
    double envelope_width = 0.0;
    LaunchSide launch_side = LaunchSide::left;
    Envelope envelope = Envelope::raised_cosine;
};

/// Frequency of the discrete plane wave with wavenumber k at time step dt.
double discrete_frequency(double k, double beta, double dxi, double dt);
/// Inverse of discrete_frequency.
double discrete_wavenumber(double omega, double beta, double dxi, double dt);

void validate_pulse(const PulseSpec& p, const ModelParams& params);

/// Envelope value at offset x from the packet centre (peak 1).
double envelope_shape(const PulseSpec& p, double x);

/// Adds the packet to `state` with its centre at `centre` (cells from the
/// left edge). Left launches move right and vice versa; `both` adds the two
/// mirror-image packets, the right one centred at n_cells - 1 - centre.
/// Returns the field energy of the added packet(s) on their own.
double add_pulse(FieldState& state, const PulseSpec& p, const ModelParams& params,
                 double centre);

// ---------------------------------------------------------------------------
// Scattering
// ---------------------------------------------------------------------------

struct SpectrumRow {
    double omega = 0.0;
    std::complex<double> r;
    std::complex<double> t;
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows;
};

struct ScatteringSetup {
    double beta = 10.0;
    double dxi = 1.0;
    double courant = 0.5;          // upper bound; dt is fitted to the drive period
    std::size_t half_length = 500;  // cells on either side of the qubit
    SpongeSpec sponge{200, 0.05};
    double ramp_periods = 24.0;     // switch-on of the incident wave
    double tolerance = 1e-5;       // relative change of |r| per drive period
    double max_time = 4000.0;
    LaunchSide launch_side = LaunchSide::left;
    double gamma_qb = 0.0;
};

/// For every omega drives the line with a monochromatic wave, evolves line
/// and qubit to steady state and projects onto incoming and outgoing waves on
/// both sides of the qubit. mutual_coupling is the field-qubit coupling
/// constant of the run.
SpectrumTable run_scattering(const QubitParams& qubit, double mutual_coupling,
                             std::span<const double> omega_grid, double drive_amplitude,
                             const ScatteringSetup& setup = {});

/// Linear-response reflection of a point dipole on a continuous line,
///   r = i z / (1 - i z),  z = g^2 d0^2 omega omega_q / (beta (omega_q^2 - omega^2)).
std::complex<double> linear_response_reflection(const QubitParams& qubit, double coupling,
                                                double beta, double omega);

/// |t|^2 of a monochromatic wave through a static potential region
/// `crystal_v` (one value per cell) embedded in a V = 0 line, from an FDTD
/// run to steady state.
struct TransmissionSetup {
    double beta = 10.0;
    double dxi = 1.0;
    double courant = 0.5;
    std::size_t gap_cells = 40;
    SpongeSpec sponge{200, 0.05};
    double ramp_periods = 24.0;
    double tolerance = 1e-6;
    double max_time = 4000.0;
};

double fdtd_transmission(std::span<const double> crystal_v, double omega,
                         const TransmissionSetup& setup = {});

// ---------------------------------------------------------------------------
// Breathing crystal
// ---------------------------------------------------------------------------

struct BreathingSetup {
    double v0 = 8.0;
    double v_offset = 0.0;
    double beta = 10.0;
    double dxi = 1.0;
    std::size_t samples_per_beat = 32;
    std::size_t omega_points = 1500;
    double omega_max_factor = 2.0;   // band scan up to factor * Bragg frequency
    /// Continuous probe at the carrier frequency of `probe`, switched on
    /// over envelope_width / beta and sent through the profile's sites.
    std::optional<PulseSpec> probe;
    std::size_t probe_windows_per_beat = 8;
    SpongeSpec probe_sponge{60, 0.05};
    std::size_t probe_gap_cells = 20;
};

struct GapSample {
    double time = 0.0;
    bool has_gap = false;
    double omega_low = 0.0;
    double omega_high = 0.0;

    double width() const noexcept { return has_gap ? omega_high - omega_low : 0.0; }
};

struct ProbeWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    double transmitted_energy = 0.0;
    double mean_gap_width = 0.0;
};

struct BreathingResult {
    std::vector<GapSample> samples;
    std::vector<ProbeWindow> probe;   // empty without a probe
    bool warned_no_gap = false;       // B nonzero but no gap at t = 0
};

/// Time step of the probe run; a probe frequency maps to its carrier via
/// discrete_wavenumber at this step.
double probe_time_step(const BreathingSetup& setup);

/// Periodic superposition profile of n_periods * period sites (one per cell)
/// with A = cos(theta/2), B = sin(theta/2) and
/// theta(x) = theta_mean + theta_mod cos(2 pi x / period).
SuperpositionProfile periodic_profile(const QubitParams& qubit, std::size_t period,
                                      std::size_t n_periods, double theta_mean,
                                      double theta_mod, std::size_t first_site = 0);

/// Bragg gap of the frozen potential at one instant.
GapSample instantaneous_gap(const SuperpositionProfile& profile, std::size_t period,
                            const BreathingSetup& setup, double time);

BreathingResult run_breathing(const SuperpositionProfile& profile, std::size_t period,
                              const BreathingSetup& setup, double duration);

/// Angular frequency of the strongest spectral line of a uniformly sampled
/// series (mean removed, Hann window), refined by golden-section search.
double dominant_frequency(std::span<const double> values, double sample_dt);

// ---------------------------------------------------------------------------
// Priming
// ---------------------------------------------------------------------------

struct PrimingSetup {
    double beta = 2.5;
    double dxi = 1.0;
    double courant = 0.5;
    double coupling_g = 1.0;
    std::size_t n_sites = 128;
    std::size_t gap_cells = 40;          // between sponge/pulse and chain
    SpongeSpec sponge{200, 0.05};
    double exit_tolerance = 0.01;         // residual / injected field energy
};

struct PrimingResult {
    std::vector<double> excitation;       // p_e per site
    std::vector<double> fourier_k;        // wavenumber of each DFT bin
    std::vector<double> fourier_magnitude;
    double injected_energy = 0.0;
    double residual_energy = 0.0;
    double final_time = 0.0;
};

PrimingResult run_priming(const PulseSpec& left, const PulseSpec& right,
                          const PrimingSetup& setup, const QubitParams& qubit);

struct SpectralPeak {
    std::size_t bin = 0;
    double k = 0.0;
    double magnitude = 0.0;
    double noise_floor = 0.0;  // median magnitude over non-DC bins
};

/// Largest non-DC bin of a priming spectrum and the spectrum's noise floor.
SpectralPeak dominant_peak(const PrimingResult& r);
/// Magnitude at the bin closest to wavenumber k.
double magnitude_at(const PrimingResult& r, double k);

// ---------------------------------------------------------------------------
// Lasing
// ---------------------------------------------------------------------------

struct LasingSetup {
    double beta = 40.0;
    double dxi = 1.0;
    double courant = 0.5;
    double coupling_g = 1.0;
    std::size_t n_sites = 32;
    std::size_t site_stride = 1;
    std::size_t gap_cells = 40;
    SpongeSpec sponge{380, 0.05};
    double seed_sx = 1e-6;
    std::uint64_t seed = 0;
    double threshold_fraction = 0.5;
    std::size_t sample_every = 4;         // steps between energy samples
};

struct OnsetResult {
    std::optional<double> tau_onset;       // empty: not detected
    double trigger_amplitude = 0.0;
    std::vector<double> times;
    std::vector<double> energy_series;     // field energy gained from the chain
    double injected_energy = 0.0;
    double initial_qubit_energy = 0.0;
    double qubit_energy_floor = 0.0;
    double max_budget_violation = 0.0;     // max(gain - released qubit energy, 0) / scale

    bool detected() const noexcept { return tau_onset.has_value(); }
};

/// Excited chain with a transverse seed sx = +-seed_sx whose signs come from
/// a splitmix64 stream started at `seed`.
BlochChain seeded_inverted_chain(const QubitParams& qubit, std::size_t n_sites, double seed_sx,
                                 std::uint64_t seed);

/// Evolves the sourced-mode system seeded with `chain` (positions are
/// assigned by the setup) and the trigger pulse for `duration`.
OnsetResult run_lasing(const PulseSpec& trigger, const LasingSetup& setup, BlochChain chain,
                       double duration);

/// First time the series reaches threshold_fraction * reference, by linear
/// interpolation between samples. Empty result: never reached.
std::optional<double> detect_onset(std::span<const double> times,
                                   std::span<const double> values, double threshold_fraction,
                                   double reference = 1.0);

/// splitmix64 step; all scenario randomness derives from this generator.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace qmm
