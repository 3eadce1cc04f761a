#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qmm/core.hpp"
#include "qmm/field.hpp"
#include "qmm/kernels.hpp"

namespace qmm {

/// Per-site superposition A|g> + B e^{-i w t}|e> of identical qubits.
struct SuperpositionProfile {
    std::vector<std::complex<double>> a_profile;
    std::vector<std::complex<double>> b_profile;
    double beat_omega = 1.0;
    QubitParams qubit;                       // beat_omega must equal qubit.omega
    std::vector<std::size_t> site_positions;  // grid index of every site
};

void validate_profile(const SuperpositionProfile& p);

/// One RK4 step of the Bloch equations with `field_at_sites` held constant
/// over the step; the drive on site j is 2 d0_j E_j. Damping gamma_qb acts
/// on the transverse components. Throws if, without damping, any norm
/// leaves 1 by more than 1e-6.
BlochChain step_bloch(const BlochChain& chain, std::span<const double> field_at_sites,
                      const ModelParams& params);

/// In-place step of length dt (no norm check).
void advance_bloch(BlochChain& chain, std::span<const double> field_at_sites, double dt,
                   double gamma, kernels::Backend backend = kernels::Backend::automatic);

/// Largest |norm - 1| over all sites.
double max_norm_error(const BlochChain& chain);

/// Charge-basis <cos phi> of a site in terms of its energy-basis Bloch
/// vector: (epsilon/omega) sx - (delta/omega) sz.
double cos_phi_expectation(const QubitParams& q, double sx, double sz);

/// V = v_offset + v0 <cos phi> on qubit sites, v_offset elsewhere. For a
/// bias-only qubit (delta = 0) this is v_offset + v0 sx.
PotentialField potential_from_state(const BlochChain& chain, double v0, double v_offset,
                                    std::size_t n_cells);

/// sx on every site at the two steps preceding the current one.
struct SxHistory {
    std::vector<double> older;     // step n-2
    std::vector<double> previous;  // step n-1
};

/// d0 * d^2 sx/dt^2 from the second difference over steps n-2, n-1, n
/// (centered on step n-1), placed on the qubit sites of an n_cells grid.
PolarizationSource polarization_from_state(const BlochChain& chain, const SxHistory& history,
                                           const ModelParams& params);

/// d0 * d sx/dt evaluated from the Bloch equations (exact, no history).
std::vector<double> polarization_rate(const BlochChain& chain, double gamma);

BlochChain chain_from_superposition(const SuperpositionProfile& profile, double time);

/// Sum over sites of (omega/2) sz.
double qubit_energy(const BlochChain& chain);

}  // namespace qmm
