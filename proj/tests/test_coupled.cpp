#include <doctest.h>

#include <cmath>
#include <vector>

#include "qmm/coupled.hpp"
#include "qmm/scenarios.hpp"

using namespace qmm;

namespace {

struct DriftRun {
    double drift = 0.0;   // max |E(t) - E(0)| / scale
    double scale = 0.0;
};

/// 16 qubits tipped off the pole, a packet on a periodic 512-cell line.
DriftRun energy_drift(double dt, std::size_t steps) {
    ModelParams p;
    p.beta = 1.0;
    p.dxi = 1.0;
    p.dt = dt;
    p.n_cells = 512;
    p.coupling_g = 1.0;
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    BlochChain chain = uniform_chain(16, q, BlochVector{0.6, 0.0, 0.8});
    chain.site_positions = place_sites(16, 240, 2);
    FieldState f = FieldState::zeros(512, Boundary::periodic);
    for (std::size_t i = 0; i < 512; ++i) {
        const double x = static_cast<double>(i) - 150.0;
        f.alpha_dot[i] = 0.3 * std::exp(-0.5 * x * x / 100.0) * std::sin(1.0 * x);
    }
    SourcedSystem sys(f, chain, p);
    const double e0 = sys.field_energy() + sys.qubit_energy();
    DriftRun r;
    r.scale = std::abs(sys.field_energy()) + std::abs(sys.qubit_energy());
    for (std::size_t i = 0; i < steps; ++i) {
        sys.step();
        r.drift = std::max(r.drift, std::abs(sys.field_energy() + sys.qubit_energy() - e0));
    }
    r.drift /= r.scale;
    return r;
}

}  // namespace

TEST_CASE("lossless coupled run conserves field plus qubit energy, second order in dt") {
    const DriftRun coarse = energy_drift(0.05, 10000);
    const DriftRun fine = energy_drift(0.025, 20000);
    CHECK(coarse.drift < 1e-3);
    CHECK(coarse.drift / fine.drift >= 3.0);
}

TEST_CASE("uncoupled chain leaves the field alone") {
    ModelParams p;
    p.beta = 2.0;
    p.dt = 0.25;
    p.n_cells = 64;
    p.coupling_g = 0.0;
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    BlochChain chain = uniform_chain(4, q, BlochVector{1.0, 0.0, 0.0});
    chain.site_positions = place_sites(4, 10, 5);
    FieldState f = FieldState::zeros(64, Boundary::periodic);
    f.alpha[20] = 1.0;
    FieldState ref = f;
    SourcedSystem sys(f, chain, p);
    for (int i = 0; i < 100; ++i) {
        sys.step();
        advance_field(ref, p, {}, {});
    }
    CHECK(sys.field().alpha == ref.alpha);
    // free precession of the chain
    const double t = sys.time();
    CHECK(sys.chain().sx[0] == doctest::Approx(std::cos(t)).epsilon(1e-4));
}

TEST_CASE("a ground chain with no field stays put") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.5;
    p.n_cells = 32;
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    BlochChain chain = uniform_chain(3, q, Ground{});
    chain.site_positions = {5, 6, 7};
    SourcedSystem sys(FieldState::zeros(32, Boundary::periodic), chain, p);
    for (int i = 0; i < 200; ++i) sys.step();
    CHECK(sys.field_energy() == 0.0);
    CHECK(sys.qubit_energy() == -1.5);
}

TEST_CASE("an inverted chain without seed or field is an exact equilibrium") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.5;
    p.n_cells = 128;
    p.coupling_g = 1.0;
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    BlochChain chain = seeded_inverted_chain(q, 8, 0.0, 3);
    chain.site_positions = place_sites(8, 60, 1);
    SourcedSystem sys(FieldState::zeros(128, Boundary::sponge), chain, p, SpongeSpec{20, 0.05});
    for (int i = 0; i < 2000; ++i) {
        sys.step();
        REQUIRE(sys.field_energy() == 0.0);
    }
    CHECK(sys.qubit_energy() == 4.0);
}

TEST_CASE("sponge losses are booked as absorbed energy") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.05;
    p.n_cells = 400;
    p.coupling_g = 1.0;
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    BlochChain chain = uniform_chain(4, q, Excited{});
    chain.sx.assign(4, 0.6);
    chain.sz.assign(4, 0.8);
    chain.site_positions = place_sites(4, 198, 1);
    SourcedSystem sys(FieldState::zeros(400, Boundary::sponge), chain, p, SpongeSpec{80, 0.05});
    const double e0 = sys.qubit_energy();
    for (int i = 0; i < 8000; ++i) sys.step();
    const double released = e0 - sys.qubit_energy();
    CHECK(released > 1.0);
    CHECK(sys.absorbed_energy() > 0.5 * released);
    const double total = sys.field_energy() + sys.qubit_energy() + sys.absorbed_energy();
    CHECK(std::abs(total - e0) < 1e-3 * released);
}

TEST_CASE("field at sites is minus alpha_dot") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.5;
    p.n_cells = 8;
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    BlochChain chain = uniform_chain(2, q, Ground{});
    chain.site_positions = {2, 5};
    FieldState f = FieldState::zeros(8, Boundary::periodic);
    f.alpha_dot[2] = 0.25;
    f.alpha_dot[5] = -3.0;
    SourcedSystem sys(f, chain, p);
    CHECK(sys.field_at_sites() == std::vector<double>{-0.25, 3.0});
}

TEST_CASE("coupled system configuration errors") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.5;
    p.n_cells = 64;
    const QubitParams q = QubitParams::with_splitting(1.0, 1.0);
    BlochChain chain = uniform_chain(2, q, Ground{});
    chain.site_positions = {2, 5};
    CHECK_THROWS_AS(SourcedSystem(FieldState::zeros(64, Boundary::periodic), chain, p, SpongeSpec{4, 0.1}),
                    Error);
    SourcedSystem sys(FieldState::zeros(64, Boundary::periodic), chain, p);
    CHECK_THROWS_AS(sys.step(std::vector<double>(3, 0.0)), Error);
    BlochChain off = chain;
    off.site_positions = {2, 70};
    CHECK_THROWS_AS(SourcedSystem(FieldState::zeros(64, Boundary::periodic), off, p), Error);
}

TEST_CASE("serial and OpenMP coupled runs are bit-identical") {
    ModelParams p;
    p.beta = 1.0;
    p.dt = 0.5;
    p.n_cells = 1u << 15;
    p.coupling_g = 1.0;
    const QubitParams q = QubitParams::with_splitting(1.0, 0.5);
    BlochChain chain = uniform_chain(64, q, BlochVector{0.6, 0.0, 0.8});
    chain.site_positions = place_sites(64, 16000, 3);
    FieldState f = FieldState::zeros(p.n_cells, Boundary::sponge);
    for (std::size_t i = 15000; i < 17000; ++i) f.alpha[i] = std::sin(0.01 * static_cast<double>(i));
    SourcedSystem a(f, chain, p, SpongeSpec{100, 0.05}, kernels::Backend::serial);
    SourcedSystem b(f, chain, p, SpongeSpec{100, 0.05}, kernels::Backend::openmp);
    for (int i = 0; i < 50; ++i) {
        a.step();
        b.step();
    }
    CHECK(a.field().alpha == b.field().alpha);
    CHECK(a.field().alpha_dot == b.field().alpha_dot);
    CHECK(a.chain().sx == b.chain().sx);
    CHECK(a.chain().sz == b.chain().sz);
}
