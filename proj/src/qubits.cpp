#include "qmm/qubits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmm {

void validate_profile(const SuperpositionProfile& p) {
    const std::size_t n = p.a_profile.size();
    if (p.b_profile.size() != n || p.site_positions.size() != n) {
        fail(ErrorKind::shape, "superposition profile arrays differ in length");
    }
    validate_qubit(p.qubit);
    if (std::abs(p.beat_omega - p.qubit.omega) > 1e-12 * p.qubit.omega) {
        fail(ErrorKind::validation, "beat frequency must equal the qubit splitting");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double norm = std::norm(p.a_profile[i]) + std::norm(p.b_profile[i]);
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-10) {
            std::ostringstream os;
            os << "superposition amplitudes at site " << i << " have |A|^2+|B|^2 = " << norm;
            fail(ErrorKind::validation, os.str());
        }
    }
}

void advance_bloch(BlochChain& c, std::span<const double> field_at_sites, double dt,
                   double gamma, kernels::Backend backend) {
    const std::size_t n = c.size();
    if (field_at_sites.size() != n) {
        fail(ErrorKind::shape, "field_at_sites must have one entry per qubit");
    }
    std::vector<double> omega(n), drive(n);
    for (std::size_t i = 0; i < n; ++i) {
        omega[i] = c.site_params[i].omega;
        drive[i] = 2.0 * c.site_params[i].d0 * field_at_sites[i];
    }
    kernels::BlochStep b;
    b.sx = c.sx;
    b.sy = c.sy;
    b.sz = c.sz;
    b.omega = omega;
    b.drive = drive;
    b.gamma = gamma;
    b.dt = dt;
    kernels::bloch_rk4(b, backend);
}

double max_norm_error(const BlochChain& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double norm = std::sqrt(c.sx[i] * c.sx[i] + c.sy[i] * c.sy[i] + c.sz[i] * c.sz[i]);
        worst = std::max(worst, std::abs(norm - 1.0));
    }
    return worst;
}

BlochChain step_bloch(const BlochChain& chain, std::span<const double> field_at_sites,
                      const ModelParams& params) {
    BlochChain next = chain;
    advance_bloch(next, field_at_sites, params.dt, params.gamma_qb);
    if (params.gamma_qb == 0.0) {
        const double err = max_norm_error(next);
        if (!(err <= 1e-6)) {
            std::ostringstream os;
            os << "Bloch norm drifted by " << err << " in one step";
            fail(ErrorKind::integration, os.str());
        }
    }
    return next;
}

double cos_phi_expectation(const QubitParams& q, double sx, double sz) {
    return (q.epsilon / q.omega) * sx - (q.delta / q.omega) * sz;
}

PotentialField potential_from_state(const BlochChain& c, double v0, double v_offset,
                                    std::size_t n_cells) {
    PotentialField v = PotentialField::uniform(n_cells, v_offset);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::size_t pos = c.site_positions[i];
        if (pos >= n_cells) fail(ErrorKind::shape, "qubit site outside the grid");
        v.v[pos] = v_offset + v0 * cos_phi_expectation(c.site_params[i], c.sx[i], c.sz[i]);
    }
    return v;
}

PolarizationSource polarization_from_state(const BlochChain& c, const SxHistory& h,
                                           const ModelParams& params) {
    const std::size_t n = c.size();
    if (h.older.size() != n || h.previous.size() != n) {
        fail(ErrorKind::state,
             "polarization needs sx from the two preceding steps for every site");
    }
    PolarizationSource src{std::vector<double>(params.n_cells, 0.0)};
    const double inv_dt2 = 1.0 / (params.dt * params.dt);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t pos = c.site_positions[i];
        if (pos >= params.n_cells) fail(ErrorKind::shape, "qubit site outside the grid");
        const double sx_ddot = (c.sx[i] - 2.0 * h.previous[i] + h.older[i]) * inv_dt2;
        src.values[pos] = c.site_params[i].d0 * sx_ddot;
    }
    return src;
}

std::vector<double> polarization_rate(const BlochChain& c, double gamma) {
    std::vector<double> rate(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const QubitParams& q = c.site_params[i];
        rate[i] = q.d0 * (-q.omega * c.sy[i] - gamma * c.sx[i]);
    }
    return rate;
}

BlochChain chain_from_superposition(const SuperpositionProfile& p, double time) {
    validate_profile(p);
    const std::size_t n = p.a_profile.size();
    BlochChain c;
    c.sx.resize(n);
    c.sy.resize(n);
    c.sz.resize(n);
    c.site_params.assign(n, p.qubit);
    c.site_positions = p.site_positions;
    const std::complex<double> phase = std::polar(1.0, p.beat_omega * time);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> a = p.a_profile[i];
        const std::complex<double> b = p.b_profile[i];
        // <sigma_-> = A* B e^{-i w t}, so sx + i sy = 2 A B* e^{+i w t}.
        const std::complex<double> transverse = 2.0 * a * std::conj(b) * phase;
        const double sz = std::norm(b) - std::norm(a);
        const double scale = 1.0 / (std::norm(a) + std::norm(b));
        c.sx[i] = transverse.real() * scale;
        c.sy[i] = transverse.imag() * scale;
        c.sz[i] = sz * scale;
    }
    return c;
}

double qubit_energy(const BlochChain& c) {
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) e += 0.5 * c.site_params[i].omega * c.sz[i];
    return e;
}

}  // namespace qmm
