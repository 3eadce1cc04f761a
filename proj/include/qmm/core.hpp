#pragma once

// Domain types shared by every module. Everything is dimensionless:
// hbar = 1, the reference qubit splitting is 1 and one grid cell is one
// unit cell of the metamaterial.

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "qmm/errors.hpp"

namespace qmm {

/// Global parameters of a simulation grid. Use validate_params() before
/// handing a record to any integrator.
struct ModelParams {
    double beta = 1.0;         // signal velocity, unit cells per time unit
    double dxi = 1.0;          // grid spacing
    double dt = 0.5;           // time step
    std::size_t n_cells = 2;
    double coupling_g = 1.0;   // field-qubit coupling
    double gamma_qb = 0.0;     // transverse qubit damping
    double gamma_tl = 0.0;     // line damping

    double courant() const noexcept { return beta * dt / dxi; }

    /// dt = 0.5 * dxi / beta
    static double recommended_dt(double beta, double dxi) noexcept {
        return 0.5 * dxi / beta;
    }
};

/// Returns `raw` unchanged if every invariant holds, throws otherwise.
ModelParams validate_params(const ModelParams& raw);

/// Single two-level system. omega is always sqrt(epsilon^2 + delta^2).
struct QubitParams {
    double epsilon = 1.0;
    double delta = 0.0;
    double omega = 1.0;
    double d0 = 0.0;

    static QubitParams make(double epsilon, double delta, double d0);
    /// A qubit with bias-only splitting (delta = 0).
    static QubitParams with_splitting(double omega, double d0);
};

void validate_qubit(const QubitParams& q);

enum class Boundary { periodic, sponge };

struct FieldState {
    std::vector<double> alpha;
    std::vector<double> alpha_dot;
    double time = 0.0;
    std::uint64_t step = 0;
    Boundary boundary = Boundary::periodic;

    static FieldState zeros(std::size_t n, Boundary b);
    std::size_t size() const noexcept { return alpha.size(); }
};

void validate_field(const FieldState& s, std::size_t n_cells);

/// Per-site Bloch vectors of a factorized chain state. sz = +1 is the
/// excited state, sz = -1 the ground state.
struct BlochChain {
    std::vector<double> sx, sy, sz;
    std::vector<QubitParams> site_params;
    std::vector<std::size_t> site_positions;

    std::size_t size() const noexcept { return sx.size(); }
};

/// Checks sizes, positions and per-site normalization (1e-8).
void validate_chain(const BlochChain& chain, std::size_t n_cells);

struct Ground {};
struct Excited {};
struct BlochVector {
    double sx = 0.0, sy = 0.0, sz = -1.0;
};
using InitialQubitState = std::variant<Ground, Excited, BlochVector>;

/// Chain of n_sites identical qubits on grid indices 0..n_sites-1. Use
/// place_sites() to spread them over a larger grid.
BlochChain uniform_chain(std::size_t n_sites, const QubitParams& qubit,
                         const InitialQubitState& initial);

/// Positions first, first+stride, ... for n sites.
std::vector<std::size_t> place_sites(std::size_t n_sites, std::size_t first,
                                     std::size_t stride);

struct FiguresOfMerit {
    double beta = 0.0;
    double nu = 0.0;
    bool continuum_ok = false;
    bool coherent_ok = false;
};

inline constexpr double kContinuumThreshold = 10.0;
inline constexpr double kCoherenceThreshold = 1e-2;

/// beta = sqrt(E_em / delta), nu = gamma_max / delta.
FiguresOfMerit figures_of_merit(double e_em, double delta, double gamma_max);

}  // namespace qmm
