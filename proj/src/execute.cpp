#include "qmm/execute.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmm/analytics.hpp"
#include "qmm/scenarios.hpp"
#include "qmm/table.hpp"

namespace qmm {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::internal, "SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::divergence:
        case ErrorKind::integration:
        case ErrorKind::convergence:
            return exit_numerical;
        default:
            return exit_invalid;
    }
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

constexpr double kPi = std::numbers::pi;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["command"] = to_string(cfg.command);
    if (cfg.command == Command::simulate) j["scenario"] = to_string(cfg.scenario);
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    for (const auto& [k, v] : cfg.params) {
        if (const double* d = std::get_if<double>(&v)) {
            if (std::floor(*d) == *d && std::abs(*d) < 9e15) j[k] = static_cast<std::int64_t>(*d);
            else j[k] = *d;
        } else {
            j[k] = std::get<std::string>(v);
        }
    }
    return j;
}

struct Manifest {
    json doc;
    fs::path path;

    void write() const {
        const std::string text = doc.dump(2) + "\n";
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorKind::io, "cannot write " + path.string());
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!f) fail(ErrorKind::io, "write to " + path.string() + " failed");
    }
};

Envelope parse_envelope(const std::string& s) {
    return s == "gaussian" ? Envelope::gaussian : Envelope::raised_cosine;
}

LaunchSide parse_side(const std::string& s) {
    if (s == "right") return LaunchSide::right;
    if (s == "both") return LaunchSide::both;
    return LaunchSide::left;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

/// Largest |x / mean - 1|.
double spread_about_mean(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double worst = 0.0;
    for (double x : xs) worst = std::max(worst, std::abs(x / mean - 1.0));
    return worst;
}

struct Context {
    const RunConfig& cfg;
    const RunOptions& opt;
    fs::path dir;
    RunOutcome& out;

    void table(const std::string& name, const std::vector<Row>& rows,
               const std::vector<Column>& schema) {
        const fs::path p = dir / name;
        write_table(rows, schema, p);
        out.files.push_back(p);
    }
    void check(std::string name, bool passed, std::string detail) {
        out.checks.push_back({std::move(name), passed, std::move(detail)});
    }
};

// ---------------------------------------------------------------------------

void run_temps(Context& c) {
    const RunConfig& cfg = c.cfg;
    const TransitionParams p = TransitionParams::from_kelvin(
        cfg.number("m_eta2_N_K"), cfg.number("delta0_K"), cfg.count("n_qubits"));
    const double prop = cfg.number("proportionality");
    const double ec = p.coupling_energy();
    const std::string& regime = cfg.text("regime");

    std::vector<Row> rows;
    auto add = [&](const std::string& name, double kelvin, bool valid) {
        if (regime == "all" || regime == name) rows.push_back({name, kelvin, valid});
    };
    const CriticalTemperature weak = critical_temp_weak_disorder(p);
    const CriticalTemperature strong = critical_temp_strong_disorder(p);
    add("weak_disorder", weak.kelvin, weak.valid);
    add("strong_disorder", strong.kelvin, strong.valid);
    add("quantum_strong", quantum_transition_temp(p, CouplingRegime::strong_coupling, prop),
        ec > p.delta0);
    add("quantum_weak", quantum_transition_temp(p, CouplingRegime::weak_coupling), ec < p.delta0);
    c.table("temps.csv", rows,
            {{"regime", ColumnType::text}, {"T_star_K", ColumnType::real}, {"valid", ColumnType::boolean}});
}

PeriodicPotential parse_segments(const std::string& text) {
    PeriodicPotential p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        p.segments.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    return p;
}

void run_bands(Context& c) {
    const RunConfig& cfg = c.cfg;
    const PeriodicPotential pot = parse_segments(cfg.text("segments"));
    const std::vector<double> grid =
        linspace(cfg.number("omega_min"), cfg.number("omega_max"), cfg.count("omega_points"));
    const BandStructure bs = bloch_bands(pot, cfg.number("beta"), grid);
    const double period = pot.period();

    std::vector<Row> rows;
    for (const BandRow& r : bs.rows) {
        double k = 0.0, kappa = 0.0;
        if (r.bloch_k) {
            k = *r.bloch_k;
        } else {
            k = r.half_trace < 0.0 ? kPi / period : 0.0;
            kappa = std::acosh(std::min(std::abs(r.half_trace), kClampedTrace)) / period;
        }
        rows.push_back({r.omega, r.half_trace, k, kappa, r.in_gap(), r.clamped});
    }
    c.table("bands.csv", rows,
            {{"omega", ColumnType::real}, {"half_trace", ColumnType::real},
             {"bloch_k", ColumnType::real}, {"bloch_kappa", ColumnType::real},
             {"in_gap", ColumnType::boolean}, {"clamped", ColumnType::boolean}});

    std::vector<Row> gaps;
    for (const Gap& g : bs.gaps) gaps.push_back({g.omega_low, g.omega_high, g.width()});
    c.table("gaps.csv", gaps,
            {{"omega_low", ColumnType::real}, {"omega_high", ColumnType::real},
             {"width", ColumnType::real}});
    c.check("gaps_found", true, std::to_string(bs.gaps.size()) + " gap(s)");
}

void run_scatter(Context& c) {
    const RunConfig& cfg = c.cfg;
    const QubitParams q =
        QubitParams::make(cfg.number("qubit_epsilon"), cfg.number("qubit_delta"), cfg.number("d0"));
    ScatteringSetup s;
    s.beta = cfg.number("beta");
    s.half_length = cfg.count("half_length");
    s.sponge = {cfg.count("sponge_width"), cfg.number("sponge_strength")};
    s.tolerance = cfg.number("tolerance");
    s.max_time = cfg.number("max_time");
    s.launch_side = parse_side(cfg.text("launch_side"));
    s.gamma_qb = cfg.number("gamma_qb");
    const std::vector<double> grid =
        linspace(cfg.number("omega_min"), cfg.number("omega_max"), cfg.count("omega_points"));
    const double g = cfg.number("mutual_coupling");
    const double drive = cfg.number("drive_amplitude");

    std::vector<SpectrumRow> spectrum(grid.size());
    parallel_for(grid.size(), c.opt.jobs, [&](std::size_t i) {
        const double w[1] = {grid[i]};
        spectrum[i] = run_scattering(q, g, w, drive, s).rows.front();
    });

    std::vector<Row> rows;
    double worst = 0.0;
    for (const SpectrumRow& r : spectrum) {
        const double r2 = std::norm(r.r), t2 = std::norm(r.t);
        worst = std::max(worst, std::abs(r2 + t2 - 1.0));
        rows.push_back({r.omega, r.r.real(), r.r.imag(), r.t.real(), r.t.imag(), r2, t2});
    }
    c.table("scatter.csv", rows,
            {{"omega", ColumnType::real}, {"r_re", ColumnType::real}, {"r_im", ColumnType::real},
             {"t_re", ColumnType::real}, {"t_im", ColumnType::real}, {"r2", ColumnType::real},
             {"t2", ColumnType::real}});
    if (s.gamma_qb == 0.0) {
        c.check("unitarity", worst <= 1e-3, "max |r2 + t2 - 1| = " + fmt(worst));
    }
}

void run_permittivity(Context& c) {
    const RunConfig& cfg = c.cfg;
    QDParams qd;
    qd.eps_b = cfg.number("eps_b");
    qd.pop_factor = cfg.number("pop_factor");
    qd.osc_strength = cfg.number("osc_strength");
    qd.omega0 = cfg.number("omega0");
    qd.gamma = cfg.number("gamma");
    const std::vector<double> grid =
        linspace(cfg.number("omega_min"), cfg.number("omega_max"), cfg.count("omega_points"));

    std::vector<Row> rows;
    for (double w : grid) {
        const std::complex<double> eps = qd_permittivity(qd, w);
        rows.push_back({w, eps.real(), eps.imag()});
    }
    c.table("permittivity.csv", rows,
            {{"omega", ColumnType::real}, {"eps_re", ColumnType::real}, {"eps_im", ColumnType::real}});

    const std::size_t periods = cfg.count("stack_periods");
    if (periods == 0) return;
    const std::vector<Layer> stack =
        cfg.text("stack_layout") == "cavity"
            ? bragg_cavity(qd, cfg.number("eps_high"), cfg.number("eps_low"), periods,
                           cfg.count("exit_periods"))
            : qd_superlattice(qd, cfg.number("eps_low"), periods);
    const std::vector<TransmissionRow> t =
        layered_transmission(stack, cfg.number("ambient_eps"), grid);
    std::vector<Row> srows;
    double peak = 0.0;
    for (const TransmissionRow& r : t) {
        peak = std::max(peak, r.t2);
        srows.push_back({r.omega, r.t.real(), r.t.imag(), r.r.real(), r.r.imag(), r.t2, r.clamped});
    }
    c.table("stack.csv", srows,
            {{"omega", ColumnType::real}, {"t_re", ColumnType::real}, {"t_im", ColumnType::real},
             {"r_re", ColumnType::real}, {"r_im", ColumnType::real}, {"t2", ColumnType::real},
             {"clamped", ColumnType::boolean}});
    if (qd.pop_factor >= 0.0) {
        c.check("passive_bound", peak <= 1.0 + 1e-9, "max |t|^2 = " + fmt(peak));
    }
}

void run_breathing_scenario(Context& c) {
    const RunConfig& cfg = c.cfg;
    const QubitParams q = QubitParams::make(cfg.number("qubit_epsilon"), cfg.number("qubit_delta"), 0.0);
    const std::size_t period = cfg.count("period");
    const SuperpositionProfile profile = periodic_profile(
        q, period, cfg.count("n_periods"), cfg.number("theta_mean"), cfg.number("theta_mod"));
    BreathingSetup s;
    s.v0 = cfg.number("v0");
    s.v_offset = cfg.number("v_offset");
    s.beta = cfg.number("beta");
    s.samples_per_beat = cfg.count("samples_per_beat");
    s.omega_points = cfg.count("omega_points");
    s.probe_windows_per_beat = cfg.count("probe_windows_per_beat");
    const double beat = 2.0 * kPi / q.omega;

    if (cfg.number("probe_amplitude") > 0.0) {
        double omega = cfg.number("probe_omega");
        if (omega == 0.0) {
            double sum = 0.0;
            std::size_t found = 0;
            for (std::size_t i = 0; i < 16; ++i) {
                const GapSample g = instantaneous_gap(profile, period, s, beat * i / 16.0);
                if (!g.has_gap) continue;
                sum += 0.5 * (g.omega_low + g.omega_high);
                ++found;
            }
            if (found == 0) fail(ErrorKind::configuration, "no band gap to place the probe in");
            omega = sum / static_cast<double>(found);
        }
        PulseSpec p;
        p.amplitude = cfg.number("probe_amplitude");
        p.carrier_k = discrete_wavenumber(omega, s.beta, s.dxi, probe_time_step(s));
        p.envelope_width = cfg.number("probe_ramp");
        s.probe = p;
    }

    const BreathingResult r = run_breathing(profile, period, s, cfg.number("duration"));
    std::vector<Row> rows;
    std::vector<double> widths;
    std::size_t with_gap = 0;
    for (const GapSample& g : r.samples) {
        rows.push_back({g.time, g.has_gap, g.omega_low, g.omega_high, g.width()});
        widths.push_back(g.width());
        with_gap += g.has_gap ? 1 : 0;
    }
    c.table("breathing.csv", rows,
            {{"time", ColumnType::real}, {"has_gap", ColumnType::boolean},
             {"omega_low", ColumnType::real}, {"omega_high", ColumnType::real},
             {"width", ColumnType::real}});
    if (s.probe) {
        std::vector<Row> prow;
        for (const ProbeWindow& w : r.probe) {
            prow.push_back({w.t_start, w.t_end, w.transmitted_energy, w.mean_gap_width});
        }
        c.table("probe.csv", prow,
                {{"t_start", ColumnType::real}, {"t_end", ColumnType::real},
                 {"transmitted_energy", ColumnType::real}, {"mean_gap_width", ColumnType::real}});
    }

    if (r.warned_no_gap) std::cerr << "qmmsim: warning: no band gap at t = 0\n";
    if (with_gap == 0) {
        c.out.not_detected = true;
        c.check("breathing_frequency", false, "no band gap in any sample");
        return;
    }
    const double sample_dt = beat / static_cast<double>(s.samples_per_beat);
    const double f = dominant_frequency(widths, sample_dt);
    const double rel = std::abs(f / q.omega - 1.0);
    c.check("breathing_frequency", rel <= 0.02,
            "gap-width frequency " + fmt(f) + " vs beat " + fmt(q.omega));
}

void run_priming_scenario(Context& c) {
    const RunConfig& cfg = c.cfg;
    PrimingSetup s;
    s.beta = cfg.number("beta");
    s.coupling_g = cfg.number("coupling_g");
    s.n_sites = cfg.count("n_sites");
    s.gap_cells = cfg.count("gap_cells");
    s.sponge = {cfg.count("sponge_width"), cfg.number("sponge_strength")};
    s.exit_tolerance = cfg.number("exit_tolerance");
    const double dt = s.courant * s.dxi / s.beta;
    const double k0 = cfg.number("carrier_k");
    double omega = cfg.number("qubit_omega");
    if (omega == 0.0) omega = discrete_frequency(k0, s.beta, s.dxi, dt);
    const QubitParams q = QubitParams::with_splitting(omega, cfg.number("d0"));

    PulseSpec left{cfg.number("amplitude_left"), k0, cfg.number("envelope_width"), LaunchSide::left,
                   parse_envelope(cfg.text("envelope"))};
    PulseSpec right = left;
    right.amplitude = cfg.number("amplitude_right");
    right.launch_side = LaunchSide::right;
    const PrimingResult r = run_priming(left, right, s, q);

    std::vector<Row> rows;
    for (std::size_t i = 0; i < r.excitation.size(); ++i) {
        rows.push_back({static_cast<std::int64_t>(i), r.excitation[i]});
    }
    c.table("priming.csv", rows, {{"site", ColumnType::integer}, {"excitation", ColumnType::real}});
    std::vector<Row> spec;
    for (std::size_t i = 0; i < r.fourier_k.size(); ++i) {
        spec.push_back({static_cast<std::int64_t>(i), r.fourier_k[i], r.fourier_magnitude[i]});
    }
    c.table("priming_spectrum.csv", spec,
            {{"bin", ColumnType::integer}, {"k", ColumnType::real}, {"magnitude", ColumnType::real}});

    const SpectralPeak peak = dominant_peak(r);
    const double at2k = magnitude_at(r, 2.0 * k0);
    const double ratio = peak.noise_floor > 0.0 ? at2k / peak.noise_floor : 0.0;
    const double bin_width = r.fourier_k.size() > 1 ? r.fourier_k[1] - r.fourier_k[0] : 0.0;
    const bool at_2k = std::abs(peak.k - 2.0 * k0) <= 0.5 * bin_width;
    const bool found = at_2k && ratio >= 10.0;
    c.out.not_detected = !found;
    c.check("grating_at_2k0", found,
            "dominant k " + fmt(peak.k) + ", 2k0 " + fmt(2.0 * k0) + ", peak/noise " + fmt(ratio));
    c.check("pulses_exited", true,
            "residual/injected " + fmt(r.residual_energy / r.injected_energy));
}

void run_lasing_scenario(Context& c) {
    const RunConfig& cfg = c.cfg;
    LasingSetup s;
    s.beta = cfg.number("beta");
    s.coupling_g = cfg.number("coupling_g");
    s.n_sites = cfg.count("n_sites");
    s.site_stride = cfg.count("site_stride");
    s.gap_cells = cfg.count("gap_cells");
    s.sponge = {cfg.count("sponge_width"), cfg.number("sponge_strength")};
    s.seed_sx = cfg.number("seed_sx");
    s.seed = cfg.seed;
    s.threshold_fraction = cfg.number("threshold");
    s.sample_every = cfg.count("sample_every");
    const double dt = s.courant * s.dxi / s.beta;
    const QubitParams q = QubitParams::with_splitting(cfg.number("qubit_omega"), cfg.number("d0"));
    double k = cfg.number("carrier_k");
    if (k == 0.0) k = discrete_wavenumber(q.omega, s.beta, s.dxi, dt);

    BlochChain chain = seeded_inverted_chain(q, s.n_sites, s.seed_sx, s.seed);
    if (cfg.text("initial") == "ground") {
        for (double& z : chain.sz) z = -z;
    }
    const std::vector<double> amps = cfg.numbers("amplitudes");
    const double duration = cfg.number("duration");
    std::vector<OnsetResult> results(amps.size());
    parallel_for(amps.size(), c.opt.jobs, [&](std::size_t i) {
        PulseSpec p{amps[i], k, cfg.number("envelope_width"), parse_side(cfg.text("launch_side")),
                    parse_envelope(cfg.text("envelope"))};
        results[i] = run_lasing(p, s, chain, duration);
    });

    std::vector<Row> rows;
    std::vector<double> products;
    double violation = 0.0;
    for (const OnsetResult& r : results) {
        const double tau = r.tau_onset.value_or(0.0);
        const double prod = r.detected() ? std::sqrt(r.trigger_amplitude) * tau : 0.0;
        if (r.detected()) products.push_back(prod);
        violation = std::max(violation, r.max_budget_violation);
        rows.push_back({r.trigger_amplitude, r.detected(), tau, prod});
    }
    c.table("onset.csv", rows,
            {{"amplitude", ColumnType::real}, {"detected", ColumnType::boolean},
             {"tau_onset", ColumnType::real}, {"sqrt_a_tau", ColumnType::real}});

    const bool all = products.size() == results.size();
    c.out.not_detected = !all;
    c.check("onset_detected", all,
            std::to_string(products.size()) + " of " + std::to_string(results.size()));
    if (products.size() >= 2) {
        const double spread = spread_about_mean(products);
        c.check("sqrt_a_tau_constant", spread <= 0.15, "max |x/mean - 1| = " + fmt(spread));
    }
    c.check("energy_budget", violation <= 1e-3, "max violation " + fmt(violation));
}

void dispatch(Context& c) {
    switch (c.cfg.command) {
        case Command::temps: run_temps(c); break;
        case Command::bands: run_bands(c); break;
        case Command::scatter: run_scatter(c); break;
        case Command::permittivity: run_permittivity(c); break;
        case Command::simulate:
            switch (c.cfg.scenario) {
                case Scenario::breathing: run_breathing_scenario(c); break;
                case Scenario::priming: run_priming_scenario(c); break;
                case Scenario::lasing: run_lasing_scenario(c); break;
                case Scenario::none: fail(ErrorKind::configuration, "simulate needs a scenario");
            }
            break;
    }
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, const RunOptions& opt) {
    RunOutcome out;
    const std::string echo = echo_config(cfg);
    Manifest m;
    const fs::path dir = cfg.output_dir;
    try {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) fail(ErrorKind::io, "cannot create output_dir " + dir.string() + ": " + ec.message());
        m.path = dir / "manifest.json";
        m.doc["artifact"] = "qmmsim";
        m.doc["version"] = kArtifactVersion;
        m.doc["command"] = to_string(cfg.command);
        m.doc["scenario"] = to_string(cfg.scenario);
        m.doc["config_sha256"] = sha256_hex(echo);
        m.doc["seed"] = cfg.seed;
        m.doc["config"] = config_json(cfg);
        m.doc["started_at"] = utc_now();
        m.doc["finished_at"] = nullptr;
        m.doc["status"] = "running";
        m.doc["exit_code"] = nullptr;
        m.doc["outputs"] = json::array();
        m.doc["checks"] = json::array();
        m.write();
    } catch (const Error& e) {
        out.exit_code = exit_invalid;
        out.message = e.what();
        return out;
    }

    Context ctx{cfg, opt, dir, out};
    std::string status = "ok";
    try {
        dispatch(ctx);
        if (out.not_detected) {
            status = "not_detected";
            if (opt.strict) out.exit_code = exit_not_detected;
        }
    } catch (const DivergenceError& e) {
        out.exit_code = exit_numerical;
        out.message = std::string(e.what()) + " (step " + std::to_string(e.step()) + ")";
        status = "error";
    } catch (const Error& e) {
        out.exit_code = exit_code_for(e.kind());
        out.message = std::string(to_string(e.kind())) + " error: " + e.what();
        status = "error";
    } catch (const std::exception& e) {
        out.exit_code = exit_invalid;
        out.message = std::string("internal error: ") + e.what();
        status = "error";
    }

    m.doc["finished_at"] = utc_now();
    m.doc["status"] = status;
    m.doc["exit_code"] = out.exit_code;
    if (!out.message.empty()) m.doc["message"] = out.message;
    for (const fs::path& p : out.files) m.doc["outputs"].push_back(p.filename().string());
    for (const CheckSummary& c : out.checks) {
        m.doc["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    try {
        m.write();
    } catch (const Error& e) {
        if (out.exit_code == exit_ok) {
            out.exit_code = exit_invalid;
            out.message = e.what();
        }
    }
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"qmmsim: quantum metamaterial simulations"};
    std::string path;
    RunOptions opt;
    app.add_option("config", path, "configuration file")->required();
    app.add_flag("--strict", opt.strict, "exit 3 when an expected effect is not detected");
    app.add_option("--jobs", opt.jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
    app.set_version_flag("--version", kArtifactVersion);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }

    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "qmmsim: error: cannot read " << path << "\n";
        return exit_invalid;
    }
    std::ostringstream text;
    text << f.rdbuf();

    RunConfig cfg;
    try {
        cfg = parse_config(text.str());
    } catch (const Error& e) {
        std::cerr << "qmmsim: " << path << ": " << e.what() << "\n";
        return exit_invalid;
    }

    const RunOutcome out = execute(cfg, opt);
    for (const fs::path& p : out.files) std::cout << p.string() << "\n";
    for (const CheckSummary& c : out.checks) {
        std::cout << (c.passed ? "pass " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    if (!out.message.empty()) std::cerr << "qmmsim: " << out.message << "\n";
    if (out.exit_code == exit_not_detected) std::cerr << "qmmsim: effect not detected (--strict)\n";
    return out.exit_code;
}

}  // namespace qmm
