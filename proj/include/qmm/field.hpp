#pragma once

// Explicit integration of the 1D field equation
//
//     alpha'' = beta^2 d^2 alpha / dxi^2 - V alpha - kappa s - gamma_tl alpha'
//
// with position-Verlet (drift/kick/drift). V is the state-dependent
// potential of the potential-coupling mode, s the polarization source of
// the sourced mode. Both are sampled at the midpoint time t + dt/2.

#include <cstddef>
#include <span>
#include <vector>

#include "qmm/core.hpp"
#include "qmm/kernels.hpp"

namespace qmm {

struct PotentialField {
    std::vector<double> v;

    static PotentialField uniform(std::size_t n, double value) {
        return PotentialField{std::vector<double>(n, value)};
    }
};

/// Source density s of the sourced wave equation. In the field-strength
/// form it holds d^2P/dt^2 on qubit sites; the coupled vector-potential
/// integrator fills it with -dP/dt / dxi instead.
struct PolarizationSource {
    std::vector<double> values;
};

struct SpongeSpec {
    std::size_t width = 0;   // cells at each end
    double strength = 0.0;   // fractional damping per application at the outer edge
};

FieldState step_field_potential(const FieldState& state, const PotentialField& v,
                                const ModelParams& params);

FieldState step_field_sourced(const FieldState& state, const PolarizationSource& source,
                              const ModelParams& params);

/// 1/2 sum (alpha_dot^2 + beta^2 (D alpha)^2 + V alpha^2) dxi, with D the
/// forward difference between neighbouring cells (zero ghost cells on a
/// sponge-bounded grid). An empty potential means V = 0.
double field_energy(const FieldState& state, const PotentialField& v,
                    const ModelParams& params);
double field_energy(const FieldState& state, const ModelParams& params);

/// Quadratic invariant of the lossless position-Verlet step:
/// field_energy - (dt^2 / 4) * U(alpha_dot), U the gradient plus potential
/// part of field_energy evaluated on alpha_dot. Conserved to rounding when
/// V is static and gamma_tl = 0.
double integrator_energy(const FieldState& state, const PotentialField& v,
                         const ModelParams& params);

/// Multiplies alpha and alpha_dot inside `width` cells of either end by
/// 1 - strength * ((width - d) / width)^3, d the distance from the edge.
FieldState apply_sponge(const FieldState& state, std::size_t sponge_width,
                        double sponge_strength);

/// In-place form of apply_sponge used inside time loops.
void apply_sponge_inplace(FieldState& state, const SpongeSpec& sponge);

/// In-place position-Verlet step. `potential` and `forcing` may be empty;
/// forcing enters as alpha'' += forcing. Used by the steppers above and by
/// the coupled integrators.
void advance_field(FieldState& state, const ModelParams& params,
                   std::span<const double> potential, std::span<const double> forcing,
                   kernels::Backend backend = kernels::Backend::automatic);

/// Exact travelling-wave solution of the discretized equation (V = 0) for
/// a given angular frequency. Used to inject monochromatic waves and to
/// project steady states onto incoming/outgoing components.
class DiscretePlaneWave {
public:
    DiscretePlaneWave(double omega, const ModelParams& params);

    double omega() const noexcept { return omega_; }
    /// Discrete wavenumber; throws if omega is above the grid cutoff.
    double k() const noexcept { return k_; }

    /// Right-moving wave amplitude * cos(k x - omega t) as seen by the
    /// full-step state (alpha, alpha_dot) at time t.
    double alpha(double x, double t, double amplitude) const;
    double alpha_dot(double x, double t, double amplitude) const;
    /// Value at the half-step positions where forces are evaluated.
    double alpha_mid(double x, double t_mid, double amplitude) const;

private:
    double omega_;
    double k_;
    double dt_;
    double half_factor_;  // cos(omega dt / 2)
    double rate_;         // 2 sin(omega dt / 2) / dt
};

}  // namespace qmm
