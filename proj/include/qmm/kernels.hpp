#pragma once

// Data-parallel inner loops of the integrators. Every kernel exists in a
// serial reference form and an OpenMP form with identical per-element
// arithmetic, so the two produce bit-identical results. The serial form is
// what the tests compare against; qmm_bench times both.

#include <cstddef>
#include <span>

namespace qmm::kernels {

enum class Backend { serial, openmp, automatic };

/// Grids at least this long use the OpenMP kernels under Backend::automatic.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

bool openmp_available() noexcept;
Backend resolve(Backend requested, std::size_t n) noexcept;

/// Arguments of one velocity kick of the discrete wave equation
///   v += dt * (c2 * (a[i-1] - 2 a[i] + a[i+1]) - V[i] a[i] + f[i])
/// with optional implicit-midpoint line damping. Empty potential/forcing
/// spans mean zero.
struct WaveKick {
    std::span<const double> alpha;
    std::span<double> alpha_dot;
    std::span<const double> potential;
    std::span<const double> forcing;
    double c2 = 0.0;       // beta^2 / dxi^2
    double dt = 0.0;
    double damping = 0.0;  // gamma_tl
    bool periodic = true;  // otherwise zero ghost cells at both ends
};

/// Per-site RK4 step of the damped Bloch equations with a drive held
/// constant over the step:
///   sx' = -w sy - g sx,  sy' = w sx + h sz - g sy,  sz' = -h sy
/// where h = 2 d0 E.
struct BlochStep {
    std::span<double> sx, sy, sz;
    std::span<const double> omega;
    std::span<const double> drive;  // h per site
    double gamma = 0.0;
    double dt = 0.0;
};

namespace serial {
void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h);
void kick(const WaveKick& k);
void bloch_rk4(const BlochStep& b);
}  // namespace serial

namespace omp {
void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h);
void kick(const WaveKick& k);
void bloch_rk4(const BlochStep& b);
}  // namespace omp

void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h,
           Backend backend = Backend::automatic);
void kick(const WaveKick& k, Backend backend = Backend::automatic);
void bloch_rk4(const BlochStep& b, Backend backend = Backend::automatic);

}  // namespace qmm::kernels
