#include "qmm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmm/errors.hpp"

namespace qmm {

// ---------------------------------------------------------------------------
// Bands
// ---------------------------------------------------------------------------

double PeriodicPotential::period() const noexcept {
    double total = 0.0;
    for (const Segment& s : segments) total += s.length;
    return total;
}

PeriodicPotential PeriodicPotential::from_samples(std::span<const double> values, double dxi) {
    PeriodicPotential p;
    p.segments.reserve(values.size());
    for (double v : values) p.segments.push_back({dxi, v});
    return p;
}

void validate_potential(const PeriodicPotential& p) {
    if (p.segments.empty()) fail(ErrorKind::validation, "periodic potential has no segments");
    for (const Segment& s : p.segments) {
        if (!(s.length > 0.0) || !std::isfinite(s.length) || !std::isfinite(s.v)) {
            fail(ErrorKind::validation, "segments need a positive length and a finite value");
        }
    }
}

Mat2 operator*(const Mat2& l, const Mat2& r) noexcept {
    return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
            l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
}

Mat2 segment_transfer(const Segment& s, double beta, double omega) noexcept {
    const double k2 = (omega * omega - s.v) / (beta * beta);
    const double len = s.length;
    if (k2 > 0.0) {
        const double k = std::sqrt(k2);
        const double c = std::cos(k * len), sn = std::sin(k * len);
        return {c, sn / k, -k * sn, c};
    }
    if (k2 < 0.0) {
        const double q = std::sqrt(-k2);
        const double c = std::cosh(q * len), sh = std::sinh(q * len);
        return {c, sh / q, q * sh, c};
    }
    return {1.0, len, 0.0, 1.0};
}

PeriodTransfer period_transfer(const PeriodicPotential& p, double beta, double omega) {
    PeriodTransfer out;
    Mat2 m;
    for (const Segment& s : p.segments) {
        // The matrix of the first segment acts first, so it sits rightmost.
        m = segment_transfer(s, beta, omega) * m;
        const double big = std::max(std::max(std::abs(m.a11), std::abs(m.a12)),
                                    std::max(std::abs(m.a21), std::abs(m.a22)));
        if (!std::isfinite(big) || big > kClampedTrace) {
            out.clamped = true;
            break;
        }
    }
    out.matrix = m;
    if (out.clamped) {
        const double tr = m.a11 + m.a22;
        out.half_trace = (std::isfinite(tr) && tr < 0.0) ? -kClampedTrace : kClampedTrace;
    } else {
        out.half_trace = m.half_trace();
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

namespace {

double gap_indicator(const PeriodicPotential& p, double beta, double omega) {
    return std::abs(period_transfer(p, beta, omega).half_trace) - 1.0;
}

/// Point where |half_trace| crosses 1 between a band frequency and a gap frequency.
double refine_edge(const PeriodicPotential& p, double beta, double band_omega, double gap_omega) {
    double in_band = band_omega, in_gap = gap_omega;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(in_gap - in_band) <= 1e-13 * std::max(1.0, std::abs(in_gap))) break;
        const double mid = 0.5 * (in_band + in_gap);
        if (gap_indicator(p, beta, mid) > 0.0) {
            in_gap = mid;
        } else {
            in_band = mid;
        }
    }
    return 0.5 * (in_band + in_gap);
}

}  // namespace

BandStructure bloch_bands(const PeriodicPotential& p, double beta,
                          std::span<const double> omega_grid) {
    validate_potential(p);
    if (!(beta > 0.0)) fail(ErrorKind::parameter, "beta must be positive");
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] >= 0.0) || (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))) {
            fail(ErrorKind::input, "omega grid must be non-negative and strictly increasing");
        }
    }

    const double period = p.period();
    BandStructure bs;
    bs.rows.reserve(omega_grid.size());
    for (double w : omega_grid) {
        const PeriodTransfer t = period_transfer(p, beta, w);
        BandRow row;
        row.omega = w;
        row.half_trace = t.half_trace;
        row.clamped = t.clamped;
        if (!t.clamped && std::abs(t.half_trace) <= 1.0) {
            row.bloch_k = std::acos(t.half_trace) / period;
        }
        bs.rows.push_back(row);
    }

    const std::size_t n = bs.rows.size();
    std::size_t i = 0;
    while (i < n) {
        if (!bs.rows[i].in_gap()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && bs.rows[j + 1].in_gap()) ++j;
        Gap g;
        g.omega_low = (i == 0) ? bs.rows[0].omega
                               : refine_edge(p, beta, bs.rows[i - 1].omega, bs.rows[i].omega);
        g.omega_high = (j + 1 == n) ? bs.rows[j].omega
                                    : refine_edge(p, beta, bs.rows[j + 1].omega, bs.rows[j].omega);
        bs.gaps.push_back(g);
        i = j + 1;
    }
    return bs;
}

// ---------------------------------------------------------------------------
// Critical temperatures
// ---------------------------------------------------------------------------

TransitionParams TransitionParams::from_kelvin(double coupling_kelvin, double delta0_kelvin,
                                               std::size_t n_qubits) {
    TransitionParams p;
    p.n_qubits = n_qubits;
    p.m = 1.0;
    p.eta = std::sqrt(coupling_kelvin * kBoltzmann / static_cast<double>(n_qubits));
    p.delta0 = delta0_kelvin * kBoltzmann;
    validate_transition(p);
    return p;
}

void validate_transition(const TransitionParams& p) {
    if (!std::isfinite(p.m) || !std::isfinite(p.eta) || !std::isfinite(p.delta0)) {
        fail(ErrorKind::validation, "transition parameters must be finite");
    }
    if (p.m < 0.0 || p.eta < 0.0 || p.delta0 < 0.0) {
        fail(ErrorKind::validation, "m, eta and Delta_0 must be non-negative");
    }
    if (p.n_qubits < 1) fail(ErrorKind::validation, "at least one qubit is required");
}

CriticalTemperature critical_temp_weak_disorder(const TransitionParams& p) {
    validate_transition(p);
    CriticalTemperature t;
    t.kelvin = p.coupling_energy() / kBoltzmann;
    t.valid = p.delta0 < kBoltzmann * t.kelvin;
    return t;
}

namespace {

/// Delta_0 exp(-Delta_0 / E_c), with the E_c -> 0 and Delta_0 -> 0 limits.
double activated(double delta0, double coupling) {
    if (delta0 == 0.0) return 0.0;
    if (coupling == 0.0) return 0.0;
    return delta0 * std::exp(-delta0 / coupling);
}

}  // namespace

CriticalTemperature critical_temp_strong_disorder(const TransitionParams& p) {
    validate_transition(p);
    const double ec = p.coupling_energy();
    CriticalTemperature t;
    t.kelvin = activated(p.delta0, ec) / kBoltzmann;
    t.valid = p.delta0 > ec;
    return t;
}

double quantum_transition_temp(const TransitionParams& p, CouplingRegime regime,
                               double proportionality) {
    validate_transition(p);
    const double ec = p.coupling_energy();
    constexpr double pi = std::numbers::pi;
    if (regime == CouplingRegime::strong_coupling) {
        return proportionality * std::cbrt(p.delta0 * p.delta0 * ec / (pi * pi)) / kBoltzmann;
    }
    return activated(p.delta0, ec) / (kBoltzmann * pi);
}

// ---------------------------------------------------------------------------
// Quantum-dot stacks
// ---------------------------------------------------------------------------

void validate_qd(const QDParams& p) {
    if (!std::isfinite(p.eps_b) || !std::isfinite(p.pop_factor) ||
        !std::isfinite(p.osc_strength) || !std::isfinite(p.omega0) || !std::isfinite(p.gamma)) {
        fail(ErrorKind::validation, "quantum-dot parameters must be finite");
    }
    if (p.eps_b < 1.0) fail(ErrorKind::validation, "background permittivity must be >= 1");
    if (p.pop_factor < -1.0 || p.pop_factor > 1.0) {
        fail(ErrorKind::validation, "population factor must lie in [-1, 1]");
    }
    if (!(p.omega0 > 0.0)) fail(ErrorKind::validation, "resonance frequency must be positive");
    if (p.gamma < 0.0) fail(ErrorKind::validation, "linewidth must be non-negative");
}

std::complex<double> qd_permittivity(const QDParams& p, double omega) {
    validate_qd(p);
    if (!(omega >= 0.0)) fail(ErrorKind::input, "frequency must be non-negative");
    const std::complex<double> denom(p.omega0 * p.omega0 - omega * omega,
                                     -2.0 * omega * p.gamma);
    if (denom == std::complex<double>(0.0, 0.0)) {
        fail(ErrorKind::pole, "undamped quantum-dot resonance evaluated at omega0");
    }
    return p.eps_b + p.pop_factor * p.osc_strength / denom;
}

std::array<std::complex<double>, 4> layer_transfer(std::complex<double> eps, double d,
                                                   double omega) {
    const std::complex<double> k = omega * std::sqrt(eps);
    const std::complex<double> c = std::cos(k * d);
    std::complex<double> sinc_d;  // sin(kd)/k
    if (std::abs(k * d) < 1e-8) {
        sinc_d = d;
    } else {
        sinc_d = std::sin(k * d) / k;
    }
    return {c, sinc_d, -k * k * sinc_d, c};
}

namespace {

double quarter_wave(double eps, double omega0) {
    return std::numbers::pi / (2.0 * omega0 * std::sqrt(eps));
}

}  // namespace

std::vector<Layer> bragg_cavity(const QDParams& qd, double eps_high, double eps_low,
                                std::size_t front, std::size_t back) {
    validate_qd(qd);
    const Layer high{quarter_wave(eps_high, qd.omega0), std::complex<double>(eps_high, 0.0)};
    const Layer low{quarter_wave(eps_low, qd.omega0), std::complex<double>(eps_low, 0.0)};
    std::vector<Layer> stack;
    for (std::size_t i = 0; i < front; ++i) {
        stack.push_back(high);
        stack.push_back(low);
    }
    stack.push_back(Layer{2.0 * quarter_wave(qd.eps_b, qd.omega0), qd});
    for (std::size_t i = 0; i < back; ++i) {
        stack.push_back(low);
        stack.push_back(high);
    }
    return stack;
}

std::vector<Layer> qd_superlattice(const QDParams& qd, double eps_low, std::size_t periods) {
    validate_qd(qd);
    const Layer low{quarter_wave(eps_low, qd.omega0), std::complex<double>(eps_low, 0.0)};
    std::vector<Layer> stack;
    for (std::size_t i = 0; i < periods; ++i) {
        stack.push_back(Layer{quarter_wave(qd.eps_b, qd.omega0), qd});
        stack.push_back(low);
    }
    return stack;
}

std::vector<TransmissionRow> layered_transmission(std::span<const Layer> stack,
                                                  double ambient_eps,
                                                  std::span<const double> omega_grid) {
    if (!(ambient_eps >= 1.0)) fail(ErrorKind::validation, "ambient permittivity must be >= 1");
    for (const Layer& l : stack) {
        if (!(l.thickness > 0.0)) fail(ErrorKind::validation, "layer thickness must be positive");
        if (const auto* q = std::get_if<QDParams>(&l.medium)) validate_qd(*q);
    }

    using cd = std::complex<double>;
    std::vector<TransmissionRow> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        if (!(w > 0.0)) fail(ErrorKind::input, "frequencies must be positive");
        cd m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
        bool clamped = false;
        for (const Layer& l : stack) {
            const cd eps = std::holds_alternative<cd>(l.medium)
                               ? std::get<cd>(l.medium)
                               : qd_permittivity(std::get<QDParams>(l.medium), w);
            const auto t = layer_transfer(eps, l.thickness, w);
            const cd n11 = t[0] * m11 + t[1] * m21;
            const cd n12 = t[0] * m12 + t[1] * m22;
            const cd n21 = t[2] * m11 + t[3] * m21;
            const cd n22 = t[2] * m12 + t[3] * m22;
            m11 = n11;
            m12 = n12;
            m21 = n21;
            m22 = n22;
            const double big = std::max({std::abs(m11), std::abs(m12), std::abs(m21),
                                         std::abs(m22)});
            if (!std::isfinite(big) || big > 1e150) {
                clamped = true;
                break;
            }
        }
        TransmissionRow row;
        row.omega = w;
        row.clamped = clamped;
        if (clamped) {
            row.t = 0.0;
            row.r = 0.0;
            row.t2 = 0.0;
        } else {
            const double k0 = w * std::sqrt(ambient_eps);
            const cd ik0(0.0, k0);
            const cd denom = ik0 * (m11 + m22) + k0 * k0 * m12 - m21;
            // every layer matrix is unimodular, so det M = 1
            row.t = 2.0 * ik0 / denom;
            row.r = (m21 + k0 * k0 * m12 + ik0 * (m22 - m11)) / denom;
            row.t2 = std::norm(row.t);
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace qmm
