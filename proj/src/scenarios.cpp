#include "qmm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmm/coupled.hpp"
#include "qmm/errors.hpp"

namespace qmm {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

ModelParams line_params(double beta, double dxi, double dt, std::size_t n, double g,
                        double gamma_qb = 0.0) {
    ModelParams p;
    p.beta = beta;
    p.dxi = dxi;
    p.dt = dt;
    p.n_cells = n;
    p.coupling_g = g;
    p.gamma_qb = gamma_qb;
    return validate_params(p);
}

/// Time step no larger than courant * dxi / beta that divides the period
/// 2 pi / omega into an integer number of steps.
std::size_t steps_per_period(double omega, double beta, double dxi, double courant) {
    const double period = 2.0 * kPi / omega;
    const double dt_max = courant * dxi / beta;
    return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(period / dt_max)));
}

// Plane wave entering the total-field region through a boundary between
// cells `edge - dir` (scattered field) and `edge` (total field).
struct TfsfSource {
    const DiscretePlaneWave* wave = nullptr;
    std::size_t edge = 0;
    int dir = 1;  // +1 travels towards larger x
    double c2 = 0.0;

    double ramp = 0.0;  // switch-on time; erf profile centred on ramp / 2
    double phase_velocity = 1.0;

    double incident(std::size_t j, double t_mid, double amplitude) const {
        const double x = dir * (static_cast<double>(j) - static_cast<double>(edge));
        return wave->alpha_mid(dir * static_cast<double>(j), t_mid,
                               amplitude * switch_on(t_mid - x / phase_velocity));
    }

    // A smooth switch-on keeps the injected spectrum away from the
    // near-static modes that the sponges cannot absorb.
    double switch_on(double t) const {
        if (t >= ramp) return 1.0;
        if (t <= 0.0) return 0.0;
        return 0.5 * (1.0 + std::erf(12.0 * (t - 0.5 * ramp) / ramp));
    }

    void apply(std::vector<double>& forcing, double t_mid, double amplitude) const {
        const std::size_t outside = dir > 0 ? edge - 1 : edge + 1;
        forcing[edge] += c2 * incident(outside, t_mid, amplitude);
        forcing[outside] -= c2 * incident(edge, t_mid, amplitude);
    }
};

// Accumulates alpha(t) e^{i omega t} at a fixed set of cells over one period.
struct Demodulator {
    std::vector<std::size_t> cells;
    std::vector<cplx> acc;
    std::size_t count = 0;

    explicit Demodulator(std::vector<std::size_t> c) : cells(std::move(c)), acc(cells.size()) {}

    void add(const FieldState& s, double omega) {
        const cplx phase = std::polar(1.0, omega * s.time);
        for (std::size_t i = 0; i < cells.size(); ++i) acc[i] += s.alpha[cells[i]] * phase;
        ++count;
    }

    std::vector<cplx> take() {
        std::vector<cplx> out(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) {
            out[i] = acc[i] * (2.0 / static_cast<double>(count));
        }
        std::fill(acc.begin(), acc.end(), cplx{});
        count = 0;
        return out;
    }
};

// Splits the phasors at x1, x2 into F e^{ikx} + B e^{-ikx}.
std::pair<cplx, cplx> split_waves(cplx a1, double x1, cplx a2, double x2, double k) {
    const cplx e1 = std::polar(1.0, k * x1), e2 = std::polar(1.0, k * x2);
    const cplx det = e1 / e2 - e2 / e1;
    const cplx f = (a1 / e2 - a2 / e1) / det;
    const cplx b = (a2 * e1 - a1 * e2) / det;
    return {f, b};
}

std::size_t quarter_wave_cells(double k, double dxi) {
    const double q = 0.5 * kPi / (k * dxi);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(q)));
}

double pulse_frequency(double k, const ModelParams& p) {
    const double s = (p.beta * p.dt / p.dxi) * std::sin(0.5 * k * p.dxi);
    return 2.0 * std::asin(s) / p.dt;
}

double pulse_group_velocity(double k, const ModelParams& p) {
    const double w = pulse_frequency(k, p);
    return p.beta * std::cos(0.5 * k * p.dxi) / std::cos(0.5 * w * p.dt);
}

}  // namespace

// ---------------------------------------------------------------------------
// Pulses
// ---------------------------------------------------------------------------

double discrete_frequency(double k, double beta, double dxi, double dt) {
    return 2.0 * std::asin((beta * dt / dxi) * std::sin(0.5 * k * dxi)) / dt;
}

double discrete_wavenumber(double omega, double beta, double dxi, double dt) {
    const double s = std::sin(0.5 * omega * dt) * dxi / (beta * dt);
    if (!(omega > 0.0) || 0.5 * omega * dt >= 0.5 * kPi || s >= 1.0) fail(ErrorKind::parameter, "frequency above the grid cutoff");
    return 2.0 * std::asin(s) / dxi;
}

void validate_pulse(const PulseSpec& p, const ModelParams& params) {
    if (!std::isfinite(p.amplitude) || p.amplitude < 0.0) {
        fail(ErrorKind::parameter, "pulse amplitude must be finite and >= 0");
    }
    if (!std::isfinite(p.envelope_width) || p.envelope_width < 2.0 * params.dxi) {
        fail(ErrorKind::parameter, "pulse envelope_width must be at least 2 dxi");
    }
    if (!std::isfinite(p.carrier_k) || p.carrier_k <= 0.0 ||
        p.carrier_k * params.dxi >= 0.25 * kPi) {
        fail(ErrorKind::parameter, "pulse carrier_k must satisfy 0 < k dxi < pi/4");
    }
}

double envelope_shape(const PulseSpec& p, double x) {
    const double w = p.envelope_width;
    if (p.envelope == Envelope::raised_cosine) {
        if (std::abs(x) >= 0.5 * w) return 0.0;
        return 0.5 * (1.0 + std::cos(2.0 * kPi * x / w));
    }
    const double sigma = w / 6.0;
    return std::exp(-0.5 * (x / sigma) * (x / sigma));
}

namespace {

double envelope_slope(const PulseSpec& p, double x) {
    const double w = p.envelope_width;
    if (p.envelope == Envelope::raised_cosine) {
        if (std::abs(x) >= 0.5 * w) return 0.0;
        return -0.5 * (2.0 * kPi / w) * std::sin(2.0 * kPi * x / w);
    }
    const double sigma = w / 6.0;
    return -(x / (sigma * sigma)) * std::exp(-0.5 * (x / sigma) * (x / sigma));
}

void add_packet(FieldState& s, const PulseSpec& p, const ModelParams& params, double centre,
                int dir) {
    const double w = pulse_frequency(p.carrier_k, params);
    const double vg = pulse_group_velocity(p.carrier_k, params);
    const double a = p.amplitude / w;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double x = (static_cast<double>(j) - centre) * params.dxi;
        const double env = envelope_shape(p, x);
        const double slope = envelope_slope(p, x);
        if (env == 0.0 && slope == 0.0) continue;
        const double phase = dir * p.carrier_k * x;
        s.alpha[j] += a * env * std::cos(phase);
        s.alpha_dot[j] += a * (w * env * std::sin(phase) - dir * vg * slope * std::cos(phase));
    }
}

}  // namespace

double add_pulse(FieldState& state, const PulseSpec& p, const ModelParams& params,
                 double centre) {
    validate_pulse(p, params);
    FieldState packet = FieldState::zeros(state.size(), state.boundary);
    const double mirror = static_cast<double>(state.size() - 1) - centre;
    switch (p.launch_side) {
        case LaunchSide::left: add_packet(packet, p, params, centre, +1); break;
        case LaunchSide::right: add_packet(packet, p, params, mirror, -1); break;
        case LaunchSide::both:
            add_packet(packet, p, params, centre, +1);
            add_packet(packet, p, params, mirror, -1);
            break;
    }
    for (std::size_t j = 0; j < state.size(); ++j) {
        state.alpha[j] += packet.alpha[j];
        state.alpha_dot[j] += packet.alpha_dot[j];
    }
    return field_energy(packet, params);
}

// ---------------------------------------------------------------------------
// Scattering
// ---------------------------------------------------------------------------

std::complex<double> linear_response_reflection(const QubitParams& q, double g, double beta,
                                                double omega) {
    const double gd = g * q.d0;
    const double den = beta * (q.omega * q.omega - omega * omega);
    if (den == 0.0) return gd == 0.0 ? cplx{} : cplx{-1.0, 0.0};
    const double z = gd * gd * omega * q.omega / den;
    const cplx iz{0.0, z};
    return iz / (1.0 - iz);
}

namespace {

struct LineGeometry {
    std::size_t n = 0;
    std::size_t centre = 0;
    std::size_t edge = 0;
    int dir = 1;
    std::size_t probe_offset = 0;   // distance of the near probe cell from the centre
    std::size_t probe_spacing = 0;
};

LineGeometry scattering_geometry(const ScatteringSetup& s, double k) {
    LineGeometry g;
    g.n = 2 * s.half_length + 1;
    g.centre = s.half_length;
    g.dir = s.launch_side == LaunchSide::right ? -1 : 1;
    const std::size_t margin = s.sponge.width + 10;
    g.edge = g.dir > 0 ? margin : g.n - 1 - margin;
    g.probe_spacing = quarter_wave_cells(k, s.dxi);
    g.probe_offset = 10;
    const std::size_t needed = margin + 2 + g.probe_offset + g.probe_spacing;
    if (needed >= s.half_length) {
        std::ostringstream os;
        os << "scattering line too short: half_length " << s.half_length << " < " << needed + 1
           << " needed for sponge and probe cells";
        fail(ErrorKind::configuration, os.str());
    }
    return g;
}

void validate_scattering(const ScatteringSetup& s, std::span<const double> grid,
                         double drive_amplitude) {
    if (grid.empty()) fail(ErrorKind::parameter, "omega_grid is empty");
    for (double w : grid) {
        if (!std::isfinite(w) || w <= 0.0) {
            fail(ErrorKind::parameter, "omega_grid entries must be positive");
        }
    }
    if (!std::isfinite(drive_amplitude) || drive_amplitude <= 0.0) {
        fail(ErrorKind::parameter, "drive_amplitude must be positive");
    }
    if (drive_amplitude > 0.1 * *std::min_element(grid.begin(), grid.end())) {
        fail(ErrorKind::parameter, "drive_amplitude must not exceed 0.1 omega for a weak drive");
    }
    if (s.launch_side == LaunchSide::both) {
        fail(ErrorKind::parameter, "scattering launches from one side only");
    }
    if (!(s.tolerance > 0.0) || !(s.max_time > 0.0) || !(s.courant > 0.0 && s.courant <= 1.0)) {
        fail(ErrorKind::parameter, "scattering tolerance, max_time and courant must be positive");
    }
}

SpectrumRow scatter_one(const QubitParams& qubit, double g, double omega, double drive,
                        const ScatteringSetup& s) {
    const std::size_t per_period = steps_per_period(omega, s.beta, s.dxi, s.courant);
    const double dt = (2.0 * kPi / omega) / static_cast<double>(per_period);
    const std::size_t n = 2 * s.half_length + 1;
    const ModelParams params = line_params(s.beta, s.dxi, dt, n, g, s.gamma_qb);
    const DiscretePlaneWave wave(omega, params);
    const LineGeometry geo = scattering_geometry(s, wave.k());
    const double amp = drive / omega;

    FieldState field = FieldState::zeros(n, Boundary::sponge);
    BlochChain chain = uniform_chain(1, qubit, Ground{});
    chain.site_positions[0] = geo.centre;
    SourcedSystem sys(std::move(field), std::move(chain), params, s.sponge);

    TfsfSource src{&wave, geo.edge, geo.dir, (s.beta * s.beta) / (s.dxi * s.dxi),
                   s.ramp_periods * 2.0 * kPi / omega, omega / wave.k()};
    std::vector<double> forcing(n, 0.0);

    const std::size_t c = geo.centre, o = geo.probe_offset, d = geo.probe_spacing;
    Demodulator demod({c - o, c - o - d, c + o, c + o + d});
    const double xl1 = -static_cast<double>(o) * s.dxi, xl2 = -static_cast<double>(o + d) * s.dxi;
    const double xr1 = -xl1, xr2 = -xl2;

    // Radiative transients decay at roughly g^2 d0^2 omega_q / beta; the
    // sponges need a few round trips to settle.
    const double gamma_rad = g * g * qubit.d0 * qubit.d0 * qubit.omega / s.beta + s.gamma_qb;
    const double transit = static_cast<double>(n) * s.dxi / s.beta;
    double t_min = src.ramp + 8.0 * transit;
    if (gamma_rad > 0.0) {
        t_min = std::max(t_min, src.ramp + 2.0 * std::log(1.0 / s.tolerance) / gamma_rad);
    }
    t_min = std::min(t_min, s.max_time);

    double last_r = -1.0;
    double residual = 1.0;
    int settled = 0;
    SpectrumRow row{omega, {}, {}};
    while (sys.time() < s.max_time + 0.5 * dt) {
        for (std::size_t i = 0; i < per_period; ++i) {
            std::fill(forcing.begin(), forcing.end(), 0.0);
            src.apply(forcing, sys.time() + 0.5 * dt, amp);
            sys.step(forcing);
            demod.add(sys.field(), omega);
        }
        const std::vector<cplx> ph = demod.take();
        auto [fl, bl] = split_waves(ph[0], xl1, ph[1], xl2, wave.k());
        auto [fr, br] = split_waves(ph[2], xr1, ph[3], xr2, wave.k());
        // outgoing = [[r, t], [t, r]] * incoming
        const cplx in_l = fl, in_r = br, out_l = bl, out_r = fr;
        const cplx det = in_l * in_l - in_r * in_r;
        row.r = (out_l * in_l - out_r * in_r) / det;
        row.t = (out_r * in_l - out_l * in_r) / det;

        const double mag = std::abs(row.r);
        if (last_r >= 0.0) {
            residual = std::abs(mag - last_r) / std::max(mag, 1e-3);
            settled = residual < s.tolerance ? settled + 1 : 0;
        }
        last_r = mag;
        if (settled >= 3 && sys.time() >= t_min) return row;
    }
    std::ostringstream os;
    os << "scattering at omega = " << omega << " did not reach steady state by t = "
       << s.max_time << " (relative change of |r| " << residual << ")";
    throw ConvergenceError(os.str(), residual);
}

}  // namespace

SpectrumTable run_scattering(const QubitParams& qubit, double mutual_coupling,
                             std::span<const double> omega_grid, double drive_amplitude,
                             const ScatteringSetup& setup) {
    validate_qubit(qubit);
    if (!std::isfinite(mutual_coupling)) fail(ErrorKind::parameter, "mutual_coupling not finite");
    validate_scattering(setup, omega_grid, drive_amplitude);
    SpectrumTable table;
    table.rows.reserve(omega_grid.size());
    for (double w : omega_grid) {
        table.rows.push_back(scatter_one(qubit, mutual_coupling, w, drive_amplitude, setup));
    }
    return table;
}

double fdtd_transmission(std::span<const double> crystal_v, double omega,
                         const TransmissionSetup& s) {
    if (crystal_v.empty()) fail(ErrorKind::parameter, "crystal potential is empty");
    if (!(omega > 0.0)) fail(ErrorKind::parameter, "frequency must be positive");
    const std::size_t per_period = steps_per_period(omega, s.beta, s.dxi, s.courant);
    const double dt = (2.0 * kPi / omega) / static_cast<double>(per_period);

    // sponge | edge | gap | crystal | gap | sponge, gaps widened so the
    // sponges take less than a quarter of the grid
    const std::size_t bare = 2 * s.sponge.width + 10 + crystal_v.size();
    const std::size_t need = 4 * s.sponge.width + 1;
    const std::size_t gap = std::max(s.gap_cells, need > bare ? (need - bare + 1) / 2 : 0);
    const std::size_t first = s.sponge.width + 10 + gap;
    const std::size_t n = first + crystal_v.size() + gap + s.sponge.width;
    const ModelParams params = line_params(s.beta, s.dxi, dt, n, 0.0);
    const DiscretePlaneWave wave(omega, params);
    const std::size_t d = quarter_wave_cells(wave.k(), s.dxi);
    if (d + 2 > gap) fail(ErrorKind::configuration, "transmission gap too short");

    std::vector<double> v(n, 0.0);
    std::copy(crystal_v.begin(), crystal_v.end(), v.begin() + static_cast<std::ptrdiff_t>(first));
    const std::size_t edge = s.sponge.width + 10;
    FieldState field = FieldState::zeros(n, Boundary::sponge);
    TfsfSource src{&wave, edge, 1, (s.beta * s.beta) / (s.dxi * s.dxi),
                   s.ramp_periods * 2.0 * kPi / omega, omega / wave.k()};
    std::vector<double> forcing(n, 0.0);

    const std::size_t l1 = edge + 1, r1 = first + crystal_v.size() + 1;
    Demodulator demod({l1, l1 + d, r1, r1 + d});
    const double transit = static_cast<double>(n) * s.dxi / s.beta;

    double last = -1.0, residual = 1.0, t2 = 0.0;
    int settled = 0;
    while (field.time < s.max_time) {
        for (std::size_t i = 0; i < per_period; ++i) {
            std::fill(forcing.begin(), forcing.end(), 0.0);
            src.apply(forcing, field.time + 0.5 * dt, 1.0);
            advance_field(field, params, v, forcing);
            apply_sponge_inplace(field, s.sponge);
            demod.add(field, omega);
        }
        const std::vector<cplx> ph = demod.take();
        auto [fl, bl] = split_waves(ph[0], static_cast<double>(l1), ph[1],
                                    static_cast<double>(l1 + d), wave.k());
        auto [fr, br] = split_waves(ph[2], static_cast<double>(r1), ph[3],
                                    static_cast<double>(r1 + d), wave.k());
        (void)bl;
        (void)br;
        t2 = std::norm(fr / fl);
        if (last >= 0.0) {
            residual = std::abs(t2 - last) / std::max(t2, 1e-6);
            settled = residual < s.tolerance ? settled + 1 : 0;
        }
        last = t2;
        if (settled >= 3 && field.time > src.ramp + 6.0 * transit) return t2;
    }
    throw ConvergenceError("transmission did not settle", residual);
}

// ---------------------------------------------------------------------------
// Breathing crystal
// ---------------------------------------------------------------------------

SuperpositionProfile periodic_profile(const QubitParams& qubit, std::size_t period,
                                      std::size_t n_periods, double theta_mean,
                                      double theta_mod, std::size_t first_site) {
    if (period == 0 || n_periods == 0) fail(ErrorKind::parameter, "empty periodic profile");
    SuperpositionProfile p;
    p.qubit = qubit;
    p.beat_omega = qubit.omega;
    const std::size_t n = period * n_periods;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = static_cast<double>(j % period) / static_cast<double>(period);
        const double theta = theta_mean + theta_mod * std::cos(2.0 * kPi * x);
        p.a_profile.emplace_back(std::cos(0.5 * theta), 0.0);
        p.b_profile.emplace_back(std::sin(0.5 * theta), 0.0);
        p.site_positions.push_back(first_site + j);
    }
    return p;
}

namespace {

void validate_breathing(const SuperpositionProfile& profile, std::size_t period,
                        const BreathingSetup& s) {
    validate_profile(profile);
    if (profile.site_positions.empty()) fail(ErrorKind::shape, "profile has no sites");
    if (static_cast<double>(period) < 4.0) {
        fail(ErrorKind::parameter, "profile period must be at least 4 dxi");
    }
    if (profile.site_positions.back() < profile.site_positions.front() + period - 1) {
        fail(ErrorKind::shape, "profile must span at least one full period");
    }
    if (!(s.beta > 0.0) || !(s.dxi > 0.0) || s.samples_per_beat < 4 || s.omega_points < 16 ||
        !(s.omega_max_factor > 1.0)) {
        fail(ErrorKind::parameter, "invalid breathing setup");
    }
    if (!std::isfinite(s.v0) || !std::isfinite(s.v_offset)) {
        fail(ErrorKind::parameter, "v0 and v_offset must be finite");
    }
}

std::vector<double> frozen_potential(const SuperpositionProfile& profile, double v0,
                                     double v_offset, double time) {
    const BlochChain chain = chain_from_superposition(profile, time);
    const std::size_t n = profile.site_positions.back() + 1;
    return potential_from_state(chain, v0, v_offset, n).v;
}

struct GapScan {
    std::vector<double> grid;
    double reference = 0.0;  // centre of the tracked gap
};

GapScan make_scan(const SuperpositionProfile& profile, std::size_t period,
                  const BreathingSetup& s) {
    GapScan scan;
    const double bragg = kPi * s.beta / (static_cast<double>(period) * s.dxi);
    const double top = s.omega_max_factor *
                       std::sqrt(bragg * bragg + std::abs(s.v_offset) + std::abs(s.v0));
    scan.grid = linspace(top / static_cast<double>(s.omega_points), top, s.omega_points);
    scan.reference = bragg;
    (void)profile;
    return scan;
}

GapSample gap_at(const SuperpositionProfile& profile, std::size_t period,
                 const BreathingSetup& s, const GapScan& scan, double time) {
    const std::vector<double> v = frozen_potential(profile, s.v0, s.v_offset, time);
    const std::size_t first = profile.site_positions.front();
    const PeriodicPotential pot = PeriodicPotential::from_samples(
        std::span<const double>(v).subspan(first, period), s.dxi);
    const BandStructure bands = bloch_bands(pot, s.beta, scan.grid);

    GapSample out;
    out.time = time;
    double best = 0.0;
    for (const Gap& g : bands.gaps) {
        if (g.omega_low <= scan.grid.front() || g.omega_high >= scan.grid.back()) continue;
        const double dist = std::abs(0.5 * (g.omega_low + g.omega_high) - scan.reference);
        if (!out.has_gap || dist < best) {
            out.has_gap = true;
            out.omega_low = g.omega_low;
            out.omega_high = g.omega_high;
            best = dist;
        }
    }
    return out;
}

}  // namespace

GapSample instantaneous_gap(const SuperpositionProfile& profile, std::size_t period,
                            const BreathingSetup& setup, double time) {
    validate_breathing(profile, period, setup);
    return gap_at(profile, period, setup, make_scan(profile, period, setup), time);
}

double dominant_frequency(std::span<const double> values, double sample_dt) {
    const std::size_t n = values.size();
    if (n < 4) fail(ErrorKind::input, "need at least 4 samples for a frequency estimate");
    if (!(sample_dt > 0.0)) fail(ErrorKind::input, "sample spacing must be positive");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    // Hann-windowed DTFT; the window keeps the negative-frequency image and
    // harmonics from pulling the peak.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                               static_cast<double>(n - 1)));
        x[i] = w * (values[i] - mean);
    }
    auto power = [&](double w) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) {
            acc += x[i] * std::polar(1.0, -w * sample_dt * static_cast<double>(i));
        }
        return std::norm(acc);
    };
    const double nyquist = kPi / sample_dt;
    const std::size_t m = 16 * n;
    const double step = nyquist / static_cast<double>(m);
    std::size_t best = 1;
    double best_p = -1.0;
    for (std::size_t i = 1; i <= m; ++i) {
        const double p = power(step * static_cast<double>(i));
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    // Golden-section refinement inside the neighbouring grid cells.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = step * (static_cast<double>(best) - 1.0);
    double hi = step * (static_cast<double>(best) + 1.0);
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    double pc = power(c), pd = power(d);
    for (int it = 0; it < 80 && hi - lo > 1e-14 * hi; ++it) {
        if (pc > pd) {
            hi = d;
            d = c;
            pd = pc;
            c = hi - phi * (hi - lo);
            pc = power(c);
        } else {
            lo = c;
            c = d;
            pc = pd;
            d = lo + phi * (hi - lo);
            pd = power(d);
        }
    }
    return 0.5 * (lo + hi);
}

double probe_time_step(const BreathingSetup& s) {
    const double dt_max = 0.5 * s.dxi / s.beta;
    // Keep the kick stable with the potential included.
    const double vmax = std::abs(s.v_offset) + std::abs(s.v0);
    const double bound = 2.0 / std::sqrt(4.0 * s.beta * s.beta / (s.dxi * s.dxi) + vmax);
    return std::min(dt_max, 0.9 * bound);
}

namespace {

std::vector<ProbeWindow> run_probe(const SuperpositionProfile& profile, std::size_t period,
                                   const BreathingSetup& s, const GapScan& scan,
                                   double duration) {
    const PulseSpec& probe = *s.probe;
    const double dt = probe_time_step(s);

    const std::size_t offset = s.probe_sponge.width + 10 + s.probe_gap_cells;
    const std::size_t first = profile.site_positions.front();
    const std::size_t span = profile.site_positions.back() - first + 1;
    const std::size_t detector = offset + span + s.probe_gap_cells;
    const std::size_t n = detector + s.probe_gap_cells + s.probe_sponge.width;
    const ModelParams params = line_params(s.beta, s.dxi, dt, n, 0.0);
    validate_pulse(probe, params);
    const double omega = pulse_frequency(probe.carrier_k, params);
    const DiscretePlaneWave wave(omega, params);
    const double amp = probe.amplitude / omega;

    SuperpositionProfile shifted = profile;
    for (std::size_t& pos : shifted.site_positions) pos = pos - first + offset;

    const std::size_t edge = s.probe_sponge.width + 10;
    const double c2 = (s.beta * s.beta) / (s.dxi * s.dxi);
    const double ramp = probe.envelope_width * s.dxi / s.beta;
    auto envelope = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= ramp) return 1.0;
        return 0.5 * (1.0 - std::cos(kPi * t / ramp));
    };

    FieldState field = FieldState::zeros(n, Boundary::sponge);
    std::vector<double> forcing(n, 0.0);
    const double beat = 2.0 * kPi / profile.beat_omega;
    const double window = beat / static_cast<double>(s.probe_windows_per_beat);
    const double delay = (static_cast<double>(detector) -
                          (static_cast<double>(offset) + 0.5 * static_cast<double>(span))) *
                         s.dxi / s.beta;
    const double start = ramp + static_cast<double>(detector - edge) * s.dxi / s.beta;

    std::vector<ProbeWindow> windows;
    ProbeWindow current;
    current.t_start = start - delay;
    current.t_end = current.t_start + window;
    const double t_stop = duration + delay;
    while (field.time < t_stop) {
        const double t_mid = field.time + 0.5 * dt;
        std::vector<double> v = potential_from_state(chain_from_superposition(shifted, t_mid),
                                                     s.v0, s.v_offset, n)
                                    .v;
        std::fill(forcing.begin(), forcing.end(), 0.0);
        const double a_left = amp * envelope(t_mid - 0.0);
        forcing[edge] += c2 * wave.alpha_mid(static_cast<double>(edge - 1), t_mid, a_left);
        forcing[edge - 1] -= c2 * wave.alpha_mid(static_cast<double>(edge), t_mid, a_left);
        advance_field(field, params, v, forcing);
        apply_sponge_inplace(field, s.probe_sponge);

        const double t_source = field.time - delay;
        if (t_source > current.t_start && t_source <= current.t_end) {
            const double e = field.alpha_dot[detector];
            current.transmitted_energy += e * e * dt;
        }
        if (t_source > current.t_end) {
            const double mid = 0.5 * (current.t_start + current.t_end);
            double width = 0.0;
            for (double t : {current.t_start, mid, current.t_end}) {
                width += gap_at(profile, period, s, scan, t).width() / 3.0;
            }
            current.mean_gap_width = width;
            windows.push_back(current);
            current = ProbeWindow{};
            current.t_start = windows.back().t_end;
            current.t_end = current.t_start + window;
        }
    }
    return windows;
}

}  // namespace

BreathingResult run_breathing(const SuperpositionProfile& profile, std::size_t period,
                              const BreathingSetup& setup, double duration) {
    validate_breathing(profile, period, setup);
    const double beat = 2.0 * kPi / profile.beat_omega;
    if (!(duration >= 4.0 * beat * (1.0 - 1e-12))) {
        fail(ErrorKind::parameter, "duration must cover at least 4 beat periods");
    }
    const GapScan scan = make_scan(profile, period, setup);
    BreathingResult out;
    const double dt = beat / static_cast<double>(setup.samples_per_beat);
    const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
    for (std::size_t i = 0; i < n; ++i) {
        out.samples.push_back(gap_at(profile, period, setup, scan, dt * static_cast<double>(i)));
    }
    bool any_b = false;
    for (const cplx& b : profile.b_profile) any_b = any_b || std::abs(b) > 0.0;
    out.warned_no_gap = any_b && !out.samples.front().has_gap;
    if (setup.probe) out.probe = run_probe(profile, period, setup, scan, duration);
    return out;
}

// ---------------------------------------------------------------------------
// Priming
// ---------------------------------------------------------------------------

PrimingResult run_priming(const PulseSpec& left, const PulseSpec& right, const PrimingSetup& s,
                          const QubitParams& qubit) {
    validate_qubit(qubit);
    if (s.n_sites < 4) fail(ErrorKind::parameter, "priming chain needs at least 4 sites");
    if (!(s.exit_tolerance > 0.0)) fail(ErrorKind::parameter, "exit_tolerance must be positive");
    const double dt = s.courant * s.dxi / s.beta;
    const double width = std::max(left.envelope_width, right.envelope_width);
    const auto w_cells = static_cast<std::size_t>(std::ceil(width / s.dxi));
    // sponge | gap | pulse | gap | chain | gap | pulse | gap | sponge
    const std::size_t S = s.sponge.width, G = s.gap_cells;
    const std::size_t n = 2 * S + 4 * G + 2 * w_cells + s.n_sites;
    const ModelParams params = line_params(s.beta, s.dxi, dt, n, s.coupling_g);

    PulseSpec l = left, r = right;
    l.launch_side = LaunchSide::left;
    r.launch_side = LaunchSide::right;
    FieldState field = FieldState::zeros(n, Boundary::sponge);
    const double centre = static_cast<double>(S + G) + 0.5 * static_cast<double>(w_cells);
    PrimingResult out;
    out.injected_energy = add_pulse(field, l, params, centre);
    out.injected_energy += add_pulse(field, r, params, centre);

    BlochChain chain = uniform_chain(s.n_sites, qubit, Ground{});
    chain.site_positions = place_sites(s.n_sites, S + 2 * G + w_cells, 1);
    SourcedSystem sys(std::move(field), std::move(chain), params, s.sponge);

    const double vg = std::min(pulse_group_velocity(l.carrier_k, params),
                               pulse_group_velocity(r.carrier_k, params));
    const double t_exit = 1.05 * static_cast<double>(n - S - G) * s.dxi / vg;
    const auto steps = static_cast<std::size_t>(std::ceil(t_exit / dt));
    for (std::size_t i = 0; i < steps; ++i) sys.step();

    out.final_time = sys.time();
    out.residual_energy = sys.field_energy();
    if (out.residual_energy > s.exit_tolerance * out.injected_energy) {
        std::ostringstream os;
        os << "pulses did not exit: residual field energy " << out.residual_energy
           << " exceeds " << s.exit_tolerance << " of injected " << out.injected_energy;
        fail(ErrorKind::incomplete, os.str());
    }

    const BlochChain& c = sys.chain();
    out.excitation.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out.excitation[i] = 0.5 * (1.0 + c.sz[i]);

    const std::size_t m = c.size();
    for (std::size_t b = 0; b <= m / 2; ++b) {
        cplx acc{};
        for (std::size_t i = 0; i < m; ++i) {
            acc += out.excitation[i] *
                   std::polar(1.0, -2.0 * kPi * static_cast<double>(b * i) / static_cast<double>(m));
        }
        out.fourier_k.push_back(2.0 * kPi * static_cast<double>(b) /
                                (static_cast<double>(m) * s.dxi));
        out.fourier_magnitude.push_back(std::abs(acc));
    }
    return out;
}

SpectralPeak dominant_peak(const PrimingResult& r) {
    if (r.fourier_magnitude.size() < 3) fail(ErrorKind::input, "spectrum too short");
    SpectralPeak p;
    std::vector<double> rest(r.fourier_magnitude.begin() + 1, r.fourier_magnitude.end());
    for (std::size_t b = 1; b < r.fourier_magnitude.size(); ++b) {
        if (r.fourier_magnitude[b] > p.magnitude) {
            p.magnitude = r.fourier_magnitude[b];
            p.bin = b;
        }
    }
    p.k = r.fourier_k[p.bin];
    std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(rest.size() / 2),
                     rest.end());
    p.noise_floor = rest[rest.size() / 2];
    return p;
}

double magnitude_at(const PrimingResult& r, double k) {
    if (r.fourier_k.empty()) fail(ErrorKind::input, "empty spectrum");
    std::size_t best = 0;
    for (std::size_t b = 1; b < r.fourier_k.size(); ++b) {
        if (std::abs(r.fourier_k[b] - k) < std::abs(r.fourier_k[best] - k)) best = b;
    }
    return r.fourier_magnitude[best];
}

// ---------------------------------------------------------------------------
// Lasing
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

BlochChain seeded_inverted_chain(const QubitParams& qubit, std::size_t n_sites, double seed_sx,
                                 std::uint64_t seed) {
    if (!std::isfinite(seed_sx) || std::abs(seed_sx) >= 1.0) {
        fail(ErrorKind::parameter, "seed_sx must lie in (-1, 1)");
    }
    BlochChain chain = uniform_chain(n_sites, qubit, Excited{});
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < n_sites; ++i) {
        const double sign = (splitmix64(state) >> 63) ? -1.0 : 1.0;
        chain.sx[i] = sign * seed_sx;
        chain.sz[i] = std::sqrt(1.0 - seed_sx * seed_sx);
    }
    return chain;
}

std::optional<double> detect_onset(std::span<const double> times, std::span<const double> values,
                                   double threshold_fraction, double reference) {
    if (times.empty() || values.empty()) fail(ErrorKind::input, "empty energy series");
    if (times.size() != values.size()) {
        fail(ErrorKind::input, "times and values differ in length");
    }
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
        fail(ErrorKind::input, "threshold_fraction must lie in (0, 1)");
    }
    if (!(reference > 0.0) || !std::isfinite(reference)) {
        fail(ErrorKind::input, "onset reference must be positive");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] >= times[i - 1])) fail(ErrorKind::input, "time base is not monotone");
    }
    const double level = threshold_fraction * reference;
    if (values[0] >= level) return times[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] >= level) {
            const double f = (level - values[i - 1]) / (values[i] - values[i - 1]);
            return times[i - 1] + f * (times[i] - times[i - 1]);
        }
    }
    return std::nullopt;
}

OnsetResult run_lasing(const PulseSpec& trigger, const LasingSetup& s, BlochChain chain,
                       double duration) {
    if (!(duration > 0.0)) fail(ErrorKind::parameter, "lasing duration must be positive");
    if (s.sample_every == 0 || s.site_stride == 0) {
        fail(ErrorKind::parameter, "sample_every and site_stride must be positive");
    }
    const std::size_t n_sites = chain.size();
    if (n_sites == 0) fail(ErrorKind::shape, "lasing chain is empty");
    const double dt = s.courant * s.dxi / s.beta;
    const std::size_t span = (n_sites - 1) * s.site_stride + 1;
    const auto half_w = static_cast<std::size_t>(std::ceil(0.5 * trigger.envelope_width / s.dxi));
    const std::size_t G = std::max(s.gap_cells, half_w + 2);
    const std::size_t S = s.sponge.width;
    const std::size_t n = 2 * S + 2 * G + span;
    const ModelParams params = line_params(s.beta, s.dxi, dt, n, s.coupling_g);

    chain.site_positions = place_sites(n_sites, S + G, s.site_stride);
    validate_chain(chain, n);

    OnsetResult out;
    out.trigger_amplitude = trigger.amplitude;
    FieldState field = FieldState::zeros(n, Boundary::sponge);
    // The trigger is centred on the chain at t = 0.
    const double centre = static_cast<double>(S + G) + 0.5 * static_cast<double>(span - 1);
    if (trigger.launch_side == LaunchSide::both) {
        PulseSpec l = trigger, r = trigger;
        l.launch_side = LaunchSide::left;
        r.launch_side = LaunchSide::right;
        out.injected_energy = add_pulse(field, l, params, centre);
        out.injected_energy += add_pulse(field, r, params, static_cast<double>(n - 1) - centre);
    } else {
        const double c = trigger.launch_side == LaunchSide::right
                             ? static_cast<double>(n - 1) - centre
                             : centre;
        out.injected_energy = add_pulse(field, trigger, params, c);
    }

    SourcedSystem sys(std::move(field), std::move(chain), params, s.sponge);
    out.initial_qubit_energy = sys.qubit_energy();
    double full_scale = 0.0;
    for (const QubitParams& q : sys.chain().site_params) full_scale += q.omega;

    std::vector<double> qubit_series;
    auto sample = [&] {
        const double eq = sys.qubit_energy();
        const double gain = sys.field_energy() + sys.absorbed_energy() - out.injected_energy;
        out.times.push_back(sys.time());
        out.energy_series.push_back(gain);
        qubit_series.push_back(eq);
        const double released = out.initial_qubit_energy - eq;
        const double excess = (gain - released) / (full_scale + out.injected_energy);
        out.max_budget_violation = std::max(out.max_budget_violation, excess);
    };
    sample();
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    for (std::size_t i = 1; i <= steps; ++i) {
        sys.step();
        if (i % s.sample_every == 0 || i == steps) sample();
    }

    out.qubit_energy_floor = *std::min_element(qubit_series.begin(), qubit_series.end());
    const double reference = out.initial_qubit_energy - out.qubit_energy_floor;
    if (reference > 0.05 * full_scale) {
        out.tau_onset = detect_onset(out.times, out.energy_series, s.threshold_fraction, reference);
    }
    return out;
}

}  // namespace qmm
