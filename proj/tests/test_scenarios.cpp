#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "qmm/errors.hpp"
#include "qmm/field.hpp"
#include "qmm/scenarios.hpp"

using namespace qmm;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams line(double beta, std::size_t n) {
    ModelParams p;
    p.beta = beta;
    p.dxi = 1.0;
    p.dt = 0.5 / beta;
    p.n_cells = n;
    return p;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct Priming {
    PrimingSetup setup;
    QubitParams qubit;
    PulseSpec left;
    PulseSpec right;
};

Priming priming_case(double amp_left, double amp_right) {
    Priming c;
    const double k0 = kPi / 8.0;
    const double dt = c.setup.courant * c.setup.dxi / c.setup.beta;
    c.qubit = QubitParams::with_splitting(discrete_frequency(k0, c.setup.beta, c.setup.dxi, dt), 0.003);
    c.left = PulseSpec{amp_left, k0, 300.0, LaunchSide::left, Envelope::raised_cosine};
    c.right = c.left;
    c.right.amplitude = amp_right;
    c.right.launch_side = LaunchSide::right;
    return c;
}

struct Lasing {
    LasingSetup setup;
    QubitParams qubit = QubitParams::with_splitting(1.0, 0.5);
    double k = 0.0;

    Lasing() { k = discrete_wavenumber(1.0, setup.beta, setup.dxi, setup.courant * setup.dxi / setup.beta); }
    PulseSpec pulse(double a) const { return {a, k, 12000.0, LaunchSide::left, Envelope::raised_cosine}; }
};

}  // namespace

TEST_CASE("discrete dispersion round trip") {
    for (double k : {0.05, 0.3, 0.7}) {
        const double w = discrete_frequency(k, 10.0, 1.0, 0.05);
        CHECK(discrete_wavenumber(w, 10.0, 1.0, 0.05) == doctest::Approx(k).epsilon(1e-12));
        CHECK(w < 10.0 * k);
    }
    CHECK(discrete_frequency(1e-4, 2.0, 1.0, 0.25) == doctest::Approx(2e-4).epsilon(1e-6));
    CHECK_THROWS_AS(discrete_wavenumber(100.0, 1.0, 1.0, 0.5), Error);
}

TEST_CASE("pulse validation") {
    const ModelParams p = line(1.0, 256);
    CHECK_NOTHROW(validate_pulse({1.0, 0.5, 20.0}, p));
    CHECK_THROWS_AS(validate_pulse({-1.0, 0.5, 20.0}, p), Error);
    CHECK_THROWS_AS(validate_pulse({1.0, 0.5, 1.5}, p), Error);
    CHECK_THROWS_AS(validate_pulse({1.0, 0.8, 20.0}, p), Error);
    CHECK_THROWS_AS(validate_pulse({1.0, 0.0, 20.0}, p), Error);
}

TEST_CASE("envelopes") {
    PulseSpec p{1.0, 0.3, 40.0};
    CHECK(envelope_shape(p, 0.0) == 1.0);
    CHECK(envelope_shape(p, 10.0) == doctest::Approx(0.5));
    CHECK(envelope_shape(p, 20.0) == 0.0);
    p.envelope = Envelope::gaussian;
    CHECK(envelope_shape(p, 0.0) == 1.0);
    CHECK(envelope_shape(p, 40.0 / 6.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("added pulse energy and mirror image") {
    const ModelParams p = line(2.0, 600);
    PulseSpec pulse{0.2, 0.3, 80.0};
    FieldState one = FieldState::zeros(600, Boundary::sponge);
    const double e1 = add_pulse(one, pulse, p, 150.0);
    CHECK(e1 > 0.0);
    CHECK(field_energy(one, p) == doctest::Approx(e1).epsilon(1e-12));

    pulse.launch_side = LaunchSide::both;
    FieldState two = FieldState::zeros(600, Boundary::sponge);
    const double e2 = add_pulse(two, pulse, p, 150.0);
    CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-10));
    for (std::size_t i = 0; i < 600; ++i) {
        CHECK(two.alpha[i] == doctest::Approx(two.alpha[599 - i]).scale(1.0).epsilon(1e-14));
        CHECK(two.alpha_dot[i] == doctest::Approx(two.alpha_dot[599 - i]).scale(1.0).epsilon(1e-14));
    }
}

TEST_CASE("decoupled qubit leaves the line transparent") {
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    const std::vector<double> w{0.9, 1.0, 1.1};
    const SpectrumTable t = run_scattering(q, 0.0, w, 1e-3);
    for (const SpectrumRow& r : t.rows) {
        CHECK(std::abs(r.t - 1.0) < 1e-10);
        CHECK(std::abs(r.r) < 1e-10);
    }
}

TEST_CASE("single qubit scattering against linear response") {
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    const std::vector<double> w{0.9, 1.0, 1.05};
    const SpectrumTable t = run_scattering(q, 1.0, w, 1e-3);
    for (const SpectrumRow& r : t.rows) {
        CHECK(std::abs(std::norm(r.r) + std::norm(r.t) - 1.0) < 1e-3);
        CHECK(std::abs(r.r - linear_response_reflection(q, 1.0, 10.0, r.omega)) < 5e-3);
    }
    CHECK(std::abs(t.rows[1].r) >= 0.98);

    ScatteringSetup right;
    right.launch_side = LaunchSide::right;
    const SpectrumTable back = run_scattering(q, 1.0, w, 1e-3, right);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(std::abs(std::abs(back.rows[i].t) - std::abs(t.rows[i].t)) < 1e-3);
    }
}

TEST_CASE("linear response reflection") {
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    CHECK(std::abs(linear_response_reflection(q, 1.0, 10.0, 1.0) + 1.0) < 1e-12);
    CHECK(linear_response_reflection(q, 0.0, 10.0, 0.7) == std::complex<double>(0.0, 0.0));
    const std::complex<double> r = linear_response_reflection(q, 1.0, 10.0, 0.8);
    const double z = 0.8 / (10.0 * (1.0 - 0.64));
    CHECK(std::abs(r - std::complex<double>(0.0, z) / std::complex<double>(1.0, -z)) < 1e-14);
}

TEST_CASE("scattering errors") {
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    CHECK_THROWS_AS(run_scattering(q, 1.0, std::vector<double>{-1.0}, 1e-3), Error);
    CHECK_THROWS_AS(run_scattering(q, 1.0, std::vector<double>{1.0}, 0.5), Error);
    ScatteringSetup s;
    s.max_time = 5.0;
    CHECK_THROWS_AS(run_scattering(q, 1.0, std::vector<double>{1.0}, 1e-3, s), ConvergenceError);
}

TEST_CASE("crystal transmission in gap and band") {
    std::vector<double> v;
    for (int i = 0; i < 20; ++i) {
        v.insert(v.end(), 4, 0.0);
        v.insert(v.end(), 4, 8.0);
    }
    const PeriodicPotential p{{Segment{4.0, 0.0}, Segment{4.0, 8.0}}};
    const BandStructure bs = bloch_bands(p, 10.0, linspace(3.0, 6.0, 2000));
    REQUIRE(bs.gaps.size() == 1);
    const Gap bragg = bs.gaps[0];
    CHECK(fdtd_transmission(v, 0.5 * (bragg.omega_low + bragg.omega_high)) < 1e-2);
    CHECK(fdtd_transmission(v, 3.0) > 0.5);
}

TEST_CASE("ground chain gives a static band structure") {
    const QubitParams q = QubitParams::make(0.6, 0.8, 0.0);
    const SuperpositionProfile prof = periodic_profile(q, 8, 6, 0.0, 0.0);
    BreathingSetup s;
    s.omega_points = 400;
    const BreathingResult r = run_breathing(prof, 8, s, 4.0 * 2.0 * kPi);
    REQUIRE(!r.samples.empty());
    for (const GapSample& g : r.samples) {
        CHECK(g.has_gap == r.samples[0].has_gap);
        CHECK(std::abs(g.omega_low - r.samples[0].omega_low) < 1e-6);
        CHECK(std::abs(g.omega_high - r.samples[0].omega_high) < 1e-6);
    }
}

TEST_CASE("superposition chain breathes at the beat frequency") {
    const QubitParams q = QubitParams::make(0.6, 0.8, 0.0);
    const SuperpositionProfile prof = periodic_profile(q, 8, 10, kPi / 4.0, 1.0);
    BreathingSetup s;
    s.omega_points = 800;
    const double beat = 2.0 * kPi / q.omega;
    const BreathingResult r = run_breathing(prof, 8, s, 8.0 * beat);
    std::vector<double> widths;
    for (const GapSample& g : r.samples) widths.push_back(g.width());
    const double w = dominant_frequency(widths, beat / static_cast<double>(s.samples_per_beat));
    CHECK(std::abs(w / q.omega - 1.0) < 0.02);
    CHECK_FALSE(r.warned_no_gap);
}

TEST_CASE("probe inside the gap transmits less when the gap is wide") {
    // slow beat: the crystal transit time is a small fraction of a beat
    const QubitParams q = QubitParams::make(0.06, 0.08, 0.0);
    const SuperpositionProfile prof = periodic_profile(q, 8, 10, kPi / 4.0, 1.0);
    BreathingSetup s;
    s.omega_points = 400;
    const double beat = 2.0 * kPi / q.omega;
    double centre = 0.0;
    for (int i = 0; i < 16; ++i) {
        const GapSample g = instantaneous_gap(prof, 8, s, beat * i / 16.0);
        REQUIRE(g.has_gap);
        centre += 0.5 * (g.omega_low + g.omega_high) / 16.0;
    }
    PulseSpec probe;
    probe.amplitude = 1e-2;
    probe.carrier_k = discrete_wavenumber(centre, s.beta, s.dxi, probe_time_step(s));
    probe.envelope_width = 200.0;
    s.probe = probe;
    const BreathingResult r = run_breathing(prof, 8, s, 8.0 * beat);
    REQUIRE(r.probe.size() >= 16);
    std::vector<double> energy, width;
    for (std::size_t i = r.probe.size() / 4; i < r.probe.size(); ++i) {
        energy.push_back(r.probe[i].transmitted_energy);
        width.push_back(r.probe[i].mean_gap_width);
    }
    CHECK(correlation(energy, width) < -0.5);
}

TEST_CASE("dominant frequency of a sampled sinusoid") {
    std::vector<double> x(512);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 3.0 + std::cos(0.37 * static_cast<double>(i) * 0.5 + 0.2);
    CHECK(dominant_frequency(x, 0.5) == doctest::Approx(0.37).epsilon(2e-3));
}

TEST_CASE("undriven priming leaves the chain in the ground state") {
    const Priming c = priming_case(0.0, 0.0);
    const PrimingResult r = run_priming(c.left, c.right, c.setup, c.qubit);
    REQUIRE(r.excitation.size() == c.setup.n_sites);
    for (double p : r.excitation) CHECK(p == 0.0);
}

TEST_CASE("counter-propagating priming pulses write a grating at 2 k0") {
    const Priming c = priming_case(4.4, 4.4);
    const PrimingResult r = run_priming(c.left, c.right, c.setup, c.qubit);
    const SpectralPeak peak = dominant_peak(r);
    const double bin = r.fourier_k[1] - r.fourier_k[0];
    CHECK(std::abs(peak.k - kPi / 4.0) <= 0.5 * bin);
    CHECK(magnitude_at(r, kPi / 4.0) >= 10.0 * peak.noise_floor);
    CHECK(r.residual_energy <= 0.01 * r.injected_energy);

    const PrimingResult again = run_priming(c.left, c.right, c.setup, c.qubit);
    CHECK(again.excitation == r.excitation);
}

TEST_CASE("a single priming pulse leaves no grating") {
    const Priming c = priming_case(4.4, 0.0);
    const PrimingResult r = run_priming(c.left, c.right, c.setup, c.qubit);
    const SpectralPeak peak = dominant_peak(r);
    CHECK(magnitude_at(r, kPi / 4.0) < 10.0 * peak.noise_floor);
    CHECK(*std::max_element(r.excitation.begin(), r.excitation.end()) > 0.0);
}

TEST_CASE("seeded inverted chain") {
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    const BlochChain a = seeded_inverted_chain(q, 16, 1e-6, 7);
    const BlochChain b = seeded_inverted_chain(q, 16, 1e-6, 7);
    CHECK(a.sx == b.sx);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(std::abs(a.sx[i]) == 1e-6);
        CHECK(a.sz[i] == doctest::Approx(1.0));
        CHECK(a.sx[i] * a.sx[i] + a.sy[i] * a.sy[i] + a.sz[i] * a.sz[i] == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(seeded_inverted_chain(q, 16, 1e-6, 8).sx != a.sx);
    CHECK(seeded_inverted_chain(q, 4, 0.0, 7).sz == std::vector<double>(4, 1.0));
}

TEST_CASE("unseeded, untriggered inverted chain stays put") {
    const Lasing c;
    const OnsetResult r = run_lasing(c.pulse(0.0), c.setup, seeded_inverted_chain(c.qubit, 32, 0.0, 0), 20.0);
    CHECK_FALSE(r.detected());
    for (double e : r.energy_series) REQUIRE(e == 0.0);
}

TEST_CASE("ground chain does not lase") {
    const Lasing c;
    BlochChain chain = seeded_inverted_chain(c.qubit, 32, 1e-6, 0);
    for (double& z : chain.sz) z = -z;
    const OnsetResult r = run_lasing(c.pulse(0.072), c.setup, chain, 60.0);
    CHECK_FALSE(r.detected());
    const double peak = *std::max_element(r.energy_series.begin(), r.energy_series.end());
    CHECK(peak <= 2.0 * r.injected_energy);
}

TEST_CASE("four times the trigger halves the onset time") {
    const Lasing c;
    const BlochChain chain = seeded_inverted_chain(c.qubit, 32, 1e-6, 0);
    const OnsetResult weak = run_lasing(c.pulse(0.036), c.setup, chain, 100.0);
    const OnsetResult strong = run_lasing(c.pulse(0.144), c.setup, chain, 100.0);
    REQUIRE(weak.detected());
    REQUIRE(strong.detected());
    CHECK(std::abs(*strong.tau_onset / (0.5 * *weak.tau_onset) - 1.0) < 0.15);
    CHECK(weak.max_budget_violation < 1e-3);
    CHECK(strong.max_budget_violation < 1e-3);
}

TEST_CASE("onset detection") {
    const std::vector<double> t{0.0, 1.0, 2.0};
    CHECK(*detect_onset(t, std::vector<double>{0.0, 0.2, 0.8}, 0.5) == doctest::Approx(1.5));
    CHECK_FALSE(detect_onset(t, std::vector<double>{0.0, 0.0, 0.0}, 0.5).has_value());
    CHECK(*detect_onset(t, std::vector<double>{0.0, 1.0, 4.0}, 0.5, 4.0) == doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(detect_onset(t, std::vector<double>{0.0, 0.2, 0.8}, 1.5), Error);
    CHECK_THROWS_AS(detect_onset(t, std::vector<double>{0.0, 0.2, 0.8}, 0.0), Error);
    CHECK_THROWS_AS(detect_onset({}, {}, 0.5), Error);
    CHECK_THROWS_AS(detect_onset(std::vector<double>{0.0, 2.0, 1.0}, std::vector<double>{0.0, 0.2, 0.8}, 0.5), Error);
    CHECK_THROWS_AS(detect_onset(t, std::vector<double>{0.0, 0.2}, 0.5), Error);
}

TEST_CASE("splitmix64 reference values") {
    std::uint64_t s = 1234567;
    CHECK(splitmix64(s) == 6457827717110365317ULL);
    CHECK(splitmix64(s) == 3203168211198807973ULL);
    std::uint64_t z = 0;
    CHECK(splitmix64(z) == 0xE220A8397B1DCDAFULL);
}
