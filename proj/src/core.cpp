#include "qmm/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmm {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::stability: return "stability error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::divergence: return "divergence error";
    case ErrorKind::integration: return "integration error";
    case ErrorKind::convergence: return "convergence error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::state: return "state error";
    case ErrorKind::input: return "input error";
    case ErrorKind::pole: return "pole error";
    case ErrorKind::incomplete: return "incomplete-exit error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::internal: return "internal error";
    }
    return "error";
}

namespace {

bool finite_all(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

ModelParams validate_params(const ModelParams& raw) {
    const double values[] = {raw.beta, raw.dxi, raw.dt, raw.coupling_g, raw.gamma_qb,
                             raw.gamma_tl};
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorKind::validation, "model parameters must be finite");
    }
    if (raw.beta <= 0.0) fail(ErrorKind::validation, "beta must be positive");
    if (raw.dxi <= 0.0) fail(ErrorKind::validation, "dxi must be positive");
    if (raw.dt <= 0.0) fail(ErrorKind::validation, "dt must be positive");
    if (raw.n_cells < 2) fail(ErrorKind::validation, "n_cells must be at least 2");
    if (raw.gamma_qb < 0.0 || raw.gamma_tl < 0.0) {
        fail(ErrorKind::validation, "damping rates must be non-negative");
    }
    if (raw.courant() > 1.0) {
        std::ostringstream os;
        os << "CFL condition violated: beta*dt/dxi = " << raw.courant() << " > 1 (beta="
           << raw.beta << ", dt=" << raw.dt << ", dxi=" << raw.dxi << ")";
        fail(ErrorKind::stability, os.str());
    }
    return raw;
}

QubitParams QubitParams::make(double epsilon, double delta, double d0) {
    QubitParams q;
    q.epsilon = epsilon;
    q.delta = delta;
    q.omega = std::hypot(epsilon, delta);
    q.d0 = d0;
    validate_qubit(q);
    return q;
}

QubitParams QubitParams::with_splitting(double omega, double d0) {
    return make(omega, 0.0, d0);
}

void validate_qubit(const QubitParams& q) {
    if (!std::isfinite(q.epsilon) || !std::isfinite(q.delta) || !std::isfinite(q.omega) ||
        !std::isfinite(q.d0)) {
        fail(ErrorKind::validation, "qubit parameters must be finite");
    }
    if (q.d0 < 0.0) fail(ErrorKind::validation, "dipole magnitude d0 must be non-negative");
    const double w2 = q.epsilon * q.epsilon + q.delta * q.delta;
    if (std::abs(q.omega * q.omega - w2) > 1e-12 * std::max(w2, 1e-300)) {
        fail(ErrorKind::validation, "qubit splitting must equal sqrt(epsilon^2 + delta^2)");
    }
}

FieldState FieldState::zeros(std::size_t n, Boundary b) {
    FieldState s;
    s.alpha.assign(n, 0.0);
    s.alpha_dot.assign(n, 0.0);
    s.boundary = b;
    return s;
}

void validate_field(const FieldState& s, std::size_t n_cells) {
    if (s.alpha.size() != n_cells || s.alpha_dot.size() != n_cells) {
        std::ostringstream os;
        os << "field arrays have lengths " << s.alpha.size() << "/" << s.alpha_dot.size()
           << ", grid has " << n_cells << " cells";
        fail(ErrorKind::shape, os.str());
    }
    if (!finite_all(s.alpha) || !finite_all(s.alpha_dot) || !std::isfinite(s.time)) {
        fail(ErrorKind::validation, "field state contains non-finite values");
    }
}

void validate_chain(const BlochChain& c, std::size_t n_cells) {
    const std::size_t n = c.sx.size();
    if (c.sy.size() != n || c.sz.size() != n || c.site_params.size() != n ||
        c.site_positions.size() != n) {
        fail(ErrorKind::shape, "Bloch chain arrays have inconsistent lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (c.site_positions[i] >= n_cells) {
            fail(ErrorKind::validation, "qubit site outside the grid");
        }
        if (i > 0 && c.site_positions[i] <= c.site_positions[i - 1]) {
            fail(ErrorKind::validation, "qubit sites must be strictly increasing");
        }
        const double norm2 = c.sx[i] * c.sx[i] + c.sy[i] * c.sy[i] + c.sz[i] * c.sz[i];
        if (!std::isfinite(norm2) || std::abs(std::sqrt(norm2) - 1.0) > 1e-8) {
            std::ostringstream os;
            os << "Bloch vector at site " << i << " has norm " << std::sqrt(norm2);
            fail(ErrorKind::validation, os.str());
        }
        validate_qubit(c.site_params[i]);
    }
}

BlochChain uniform_chain(std::size_t n_sites, const QubitParams& qubit,
                         const InitialQubitState& initial) {
    if (n_sites == 0) fail(ErrorKind::validation, "a chain needs at least one site");
    validate_qubit(qubit);

    BlochVector v;
    if (std::holds_alternative<Excited>(initial)) {
        v = {0.0, 0.0, 1.0};
    } else if (const auto* b = std::get_if<BlochVector>(&initial)) {
        v = *b;
        const double norm = std::sqrt(v.sx * v.sx + v.sy * v.sy + v.sz * v.sz);
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8) {
            fail(ErrorKind::validation, "initial Bloch vector must be normalized");
        }
    }

    BlochChain c;
    c.sx.assign(n_sites, v.sx);
    c.sy.assign(n_sites, v.sy);
    c.sz.assign(n_sites, v.sz);
    c.site_params.assign(n_sites, qubit);
    c.site_positions = place_sites(n_sites, 0, 1);
    return c;
}

std::vector<std::size_t> place_sites(std::size_t n_sites, std::size_t first,
                                     std::size_t stride) {
    if (stride == 0 && n_sites > 1) fail(ErrorKind::validation, "site stride must be positive");
    std::vector<std::size_t> pos(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) pos[i] = first + i * stride;
    return pos;
}

FiguresOfMerit figures_of_merit(double e_em, double delta, double gamma_max) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        fail(ErrorKind::parameter, "qubit energy scale delta must be positive");
    }
    if (!(e_em >= 0.0) || !(gamma_max >= 0.0) || !std::isfinite(e_em) ||
        !std::isfinite(gamma_max)) {
        fail(ErrorKind::parameter, "field energy and decoherence rate must be non-negative");
    }
    FiguresOfMerit f;
    f.beta = std::sqrt(e_em / delta);
    f.nu = gamma_max / delta;
    f.continuum_ok = f.beta >= kContinuumThreshold;
    f.coherent_ok = f.nu <= kCoherenceThreshold;
    return f;
}

}  // namespace qmm
