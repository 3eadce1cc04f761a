#pragma once

// Field + qubit chain in the polarization-source coupling mode.
//
// The field variable is the vector potential: the electric field at a
// qubit site is E = -alpha_dot, and the chain acts back through
//
//     alpha'' = beta^2 d^2 alpha / dxi^2 + (g / dxi) dP/dt,   P = d0 sx,
//
// while each qubit is driven by g E. With this pairing
// field_energy + qubit_energy is a constant of the lossless dynamics.
// One step is Strang-split: half qubit step, full field step, half qubit
// step.

#include <optional>
#include <span>
#include <vector>

#include "qmm/core.hpp"
#include "qmm/field.hpp"
#include "qmm/qubits.hpp"

namespace qmm {

class SourcedSystem {
public:
    SourcedSystem(FieldState field, BlochChain chain, const ModelParams& params,
                  std::optional<SpongeSpec> sponge = std::nullopt,
                  kernels::Backend backend = kernels::Backend::automatic);

    /// Advances by params.dt. `external_forcing` (grid-sized or empty) is
    /// added to alpha'' and must be sampled at time() + dt/2.
    void step(std::span<const double> external_forcing = {});

    const FieldState& field() const noexcept { return field_; }
    const BlochChain& chain() const noexcept { return chain_; }
    const ModelParams& params() const noexcept { return params_; }
    double time() const noexcept { return field_.time; }

    double field_energy() const;
    double qubit_energy() const;
    /// Field energy removed by the sponge layers so far.
    double absorbed_energy() const noexcept { return absorbed_; }

    /// E = -alpha_dot on every qubit site.
    std::vector<double> field_at_sites() const;

private:
    void half_qubit_step();

    FieldState field_;
    BlochChain chain_;
    ModelParams params_;
    std::optional<SpongeSpec> sponge_;
    kernels::Backend backend_;
    double absorbed_ = 0.0;
    std::vector<double> forcing_;
    std::vector<double> drive_;
};

}  // namespace qmm
