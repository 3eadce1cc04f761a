#include "qmm/coupled.hpp"

#include <algorithm>

namespace qmm {

SourcedSystem::SourcedSystem(FieldState field, BlochChain chain, const ModelParams& params,
                             std::optional<SpongeSpec> sponge, kernels::Backend backend)
    : field_(std::move(field)),
      chain_(std::move(chain)),
      params_(validate_params(params)),
      sponge_(sponge),
      backend_(backend) {
    validate_field(field_, params_.n_cells);
    validate_chain(chain_, params_.n_cells);
    if (sponge_ && field_.boundary != Boundary::sponge) {
        fail(ErrorKind::configuration, "sponge layers need a sponge-bounded field");
    }
    forcing_.assign(params_.n_cells, 0.0);
    drive_.assign(chain_.size(), 0.0);
}

std::vector<double> SourcedSystem::field_at_sites() const {
    std::vector<double> e(chain_.size());
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        e[i] = -field_.alpha_dot[chain_.site_positions[i]];
    }
    return e;
}

void SourcedSystem::half_qubit_step() {
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        drive_[i] = -params_.coupling_g * field_.alpha_dot[chain_.site_positions[i]];
    }
    advance_bloch(chain_, drive_, 0.5 * params_.dt, params_.gamma_qb, backend_);
}

void SourcedSystem::step(std::span<const double> external_forcing) {
    if (!external_forcing.empty() && external_forcing.size() != params_.n_cells) {
        fail(ErrorKind::shape, "external forcing must be grid-sized");
    }
    half_qubit_step();

    if (external_forcing.empty()) {
        std::fill(forcing_.begin(), forcing_.end(), 0.0);
    } else {
        std::copy(external_forcing.begin(), external_forcing.end(), forcing_.begin());
    }
    const std::vector<double> rate = polarization_rate(chain_, params_.gamma_qb);
    const double scale = params_.coupling_g / params_.dxi;
    for (std::size_t i = 0; i < chain_.size(); ++i) {
        forcing_[chain_.site_positions[i]] += scale * rate[i];
    }
    advance_field(field_, params_, {}, forcing_, backend_);

    half_qubit_step();

    if (sponge_) {
        const double before = qmm::field_energy(field_, params_);
        apply_sponge_inplace(field_, *sponge_);
        absorbed_ += before - qmm::field_energy(field_, params_);
    }
}

double SourcedSystem::field_energy() const { return qmm::field_energy(field_, params_); }

double SourcedSystem::qubit_energy() const { return qmm::qubit_energy(chain_); }

}  // namespace qmm
