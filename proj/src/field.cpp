#include "qmm/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmm {

namespace {

void check_array(std::span<const double> a, std::size_t n, const char* what) {
    if (!a.empty() && a.size() != n) {
        std::ostringstream os;
        os << what << " has length " << a.size() << ", grid has " << n << " cells";
        fail(ErrorKind::shape, os.str());
    }
}

void check_finite(const FieldState& s) {
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
        if (!std::isfinite(s.alpha[i]) || !std::isfinite(s.alpha_dot[i])) {
            std::ostringstream os;
            os << "field diverged at step " << s.step << " (cell " << i << ")";
            throw DivergenceError(os.str(), s.step);
        }
    }
}

}  // namespace

void advance_field(FieldState& s, const ModelParams& p, std::span<const double> potential,
                   std::span<const double> forcing, kernels::Backend backend) {
    const std::size_t n = s.alpha.size();
    if (s.alpha_dot.size() != n || n != p.n_cells) {
        fail(ErrorKind::shape, "field state does not match the grid");
    }
    check_array(potential, n, "potential");
    check_array(forcing, n, "forcing");

    const double half = 0.5 * p.dt;
    kernels::drift(s.alpha, s.alpha_dot, half, backend);

    kernels::WaveKick k;
    k.alpha = s.alpha;
    k.alpha_dot = s.alpha_dot;
    k.potential = potential;
    k.forcing = forcing;
    k.c2 = (p.beta * p.beta) / (p.dxi * p.dxi);
    k.dt = p.dt;
    k.damping = p.gamma_tl;
    k.periodic = s.boundary == Boundary::periodic;
    kernels::kick(k, backend);

    kernels::drift(s.alpha, s.alpha_dot, half, backend);
    s.time += p.dt;
    ++s.step;
    check_finite(s);
}

FieldState step_field_potential(const FieldState& state, const PotentialField& v,
                                const ModelParams& params) {
    FieldState next = state;
    advance_field(next, params, v.v, {});
    return next;
}

FieldState step_field_sourced(const FieldState& state, const PolarizationSource& source,
                              const ModelParams& params) {
    check_array(source.values, state.alpha.size(), "polarization source");
    std::vector<double> forcing(source.values.size());
    for (std::size_t i = 0; i < forcing.size(); ++i) {
        forcing[i] = -params.coupling_g * source.values[i];
    }
    FieldState next = state;
    advance_field(next, params, {}, forcing);
    return next;
}

double field_energy(const FieldState& s, const PotentialField& v, const ModelParams& p) {
    const std::size_t n = s.alpha.size();
    if (s.alpha_dot.size() != n) fail(ErrorKind::shape, "field arrays differ in length");
    check_array(v.v, n, "potential");
    if (n == 0) return 0.0;

    const double b2 = (p.beta * p.beta) / (p.dxi * p.dxi);
    double kinetic = 0.0, gradient = 0.0, pot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        kinetic += s.alpha_dot[i] * s.alpha_dot[i];
        if (i + 1 < n) {
            const double d = s.alpha[i + 1] - s.alpha[i];
            gradient += d * d;
        }
        if (!v.v.empty()) pot += v.v[i] * s.alpha[i] * s.alpha[i];
    }
    if (s.boundary == Boundary::periodic) {
        const double d = s.alpha[0] - s.alpha[n - 1];
        gradient += d * d;
    } else {
        gradient += s.alpha[0] * s.alpha[0] + s.alpha[n - 1] * s.alpha[n - 1];
    }
    return 0.5 * (kinetic + b2 * gradient + pot) * p.dxi;
}

double field_energy(const FieldState& s, const ModelParams& p) {
    return field_energy(s, PotentialField{}, p);
}

double integrator_energy(const FieldState& s, const PotentialField& v, const ModelParams& p) {
    FieldState rates = s;
    rates.alpha = s.alpha_dot;
    std::fill(rates.alpha_dot.begin(), rates.alpha_dot.end(), 0.0);
    return field_energy(s, v, p) - 0.25 * p.dt * p.dt * field_energy(rates, v, p);
}

void apply_sponge_inplace(FieldState& s, const SpongeSpec& sponge) {
    const std::size_t n = s.alpha.size();
    if (sponge.width == 0 || sponge.strength == 0.0) return;
    if (4 * sponge.width >= n) {
        std::ostringstream os;
        os << "sponge width " << sponge.width << " must be below a quarter of the grid (" << n
           << " cells)";
        fail(ErrorKind::configuration, os.str());
    }
    if (sponge.strength < 0.0 || sponge.strength > 1.0) {
        fail(ErrorKind::configuration, "sponge strength must lie in [0, 1]");
    }
    const double w = static_cast<double>(sponge.width);
    for (std::size_t d = 0; d < sponge.width; ++d) {
        const double r = (w - static_cast<double>(d)) / w;
        const double factor = 1.0 - sponge.strength * r * r * r;
        s.alpha[d] *= factor;
        s.alpha_dot[d] *= factor;
        s.alpha[n - 1 - d] *= factor;
        s.alpha_dot[n - 1 - d] *= factor;
    }
}

FieldState apply_sponge(const FieldState& state, std::size_t sponge_width,
                        double sponge_strength) {
    FieldState next = state;
    apply_sponge_inplace(next, SpongeSpec{sponge_width, sponge_strength});
    return next;
}

DiscretePlaneWave::DiscretePlaneWave(double omega, const ModelParams& p)
    : omega_(omega), dt_(p.dt) {
    if (!(omega > 0.0)) fail(ErrorKind::parameter, "plane-wave frequency must be positive");
    const double s = (p.dxi / (p.beta * p.dt)) * std::sin(0.5 * omega * p.dt);
    if (!(s < 1.0) || omega * p.dt >= M_PI) {
        fail(ErrorKind::parameter, "frequency above the grid cutoff");
    }
    k_ = 2.0 * std::asin(s) / p.dxi;
    half_factor_ = std::cos(0.5 * omega * p.dt);
    rate_ = 2.0 * std::sin(0.5 * omega * p.dt) / p.dt;
}

double DiscretePlaneWave::alpha(double x, double t, double amplitude) const {
    return amplitude * half_factor_ * std::cos(k_ * x - omega_ * t);
}

double DiscretePlaneWave::alpha_dot(double x, double t, double amplitude) const {
    return amplitude * rate_ * std::sin(k_ * x - omega_ * t);
}

double DiscretePlaneWave::alpha_mid(double x, double t_mid, double amplitude) const {
    return amplitude * std::cos(k_ * x - omega_ * t_mid);
}

}  // namespace qmm
