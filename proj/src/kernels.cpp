#include "qmm/kernels.hpp"

#include <cstdint>

namespace qmm::kernels {

namespace {

inline double laplacian_at(std::span<const double> a, std::size_t i, bool periodic) {
    const std::size_t n = a.size();
    double left, right;
    if (i == 0) {
        left = periodic ? a[n - 1] : 0.0;
    } else {
        left = a[i - 1];
    }
    if (i + 1 == n) {
        right = periodic ? a[0] : 0.0;
    } else {
        right = a[i + 1];
    }
    return left - 2.0 * a[i] + right;
}

inline void kick_one(const WaveKick& k, std::size_t i) {
    double acc = k.c2 * laplacian_at(k.alpha, i, k.periodic);
    if (!k.potential.empty()) acc -= k.potential[i] * k.alpha[i];
    if (!k.forcing.empty()) acc += k.forcing[i];
    if (k.damping > 0.0) {
        const double h = 0.5 * k.damping * k.dt;
        k.alpha_dot[i] = (k.alpha_dot[i] * (1.0 - h) + k.dt * acc) / (1.0 + h);
    } else {
        k.alpha_dot[i] += k.dt * acc;
    }
}

struct Vec3 {
    double x, y, z;
};

inline Vec3 bloch_rhs(const Vec3& s, double w, double h, double g) {
    return {-w * s.y - g * s.x, w * s.x + h * s.z - g * s.y, -h * s.y};
}

inline void rk4_one(const BlochStep& b, std::size_t i) {
    const double w = b.omega[i];
    const double h = b.drive.empty() ? 0.0 : b.drive[i];
    const double g = b.gamma;
    const double dt = b.dt;
    const Vec3 s{b.sx[i], b.sy[i], b.sz[i]};

    const Vec3 k1 = bloch_rhs(s, w, h, g);
    const Vec3 s2{s.x + 0.5 * dt * k1.x, s.y + 0.5 * dt * k1.y, s.z + 0.5 * dt * k1.z};
    const Vec3 k2 = bloch_rhs(s2, w, h, g);
    const Vec3 s3{s.x + 0.5 * dt * k2.x, s.y + 0.5 * dt * k2.y, s.z + 0.5 * dt * k2.z};
    const Vec3 k3 = bloch_rhs(s3, w, h, g);
    const Vec3 s4{s.x + dt * k3.x, s.y + dt * k3.y, s.z + dt * k3.z};
    const Vec3 k4 = bloch_rhs(s4, w, h, g);

    const double c = dt / 6.0;
    b.sx[i] = s.x + c * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    b.sy[i] = s.y + c * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    b.sz[i] = s.z + c * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
}

}  // namespace

bool openmp_available() noexcept {
#ifdef QMM_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

Backend resolve(Backend requested, std::size_t n) noexcept {
    if (requested == Backend::automatic) {
        return (openmp_available() && n >= kParallelThreshold) ? Backend::openmp
                                                                : Backend::serial;
    }
    if (requested == Backend::openmp && !openmp_available()) return Backend::serial;
    return requested;
}

namespace serial {

void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h) {
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] += h * alpha_dot[i];
}

void kick(const WaveKick& k) {
    for (std::size_t i = 0; i < k.alpha.size(); ++i) kick_one(k, i);
}

void bloch_rk4(const BlochStep& b) {
    for (std::size_t i = 0; i < b.sx.size(); ++i) rk4_one(b, i);
}

}  // namespace serial

namespace omp {

void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h) {
    const auto n = static_cast<std::int64_t>(alpha.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) alpha[i] += h * alpha_dot[i];
}

void kick(const WaveKick& k) {
    const auto n = static_cast<std::int64_t>(k.alpha.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) kick_one(k, static_cast<std::size_t>(i));
}

void bloch_rk4(const BlochStep& b) {
    const auto n = static_cast<std::int64_t>(b.sx.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) rk4_one(b, static_cast<std::size_t>(i));
}

}  // namespace omp

void drift(std::span<double> alpha, std::span<const double> alpha_dot, double h,
           Backend backend) {
    if (resolve(backend, alpha.size()) == Backend::openmp) {
        omp::drift(alpha, alpha_dot, h);
    } else {
        serial::drift(alpha, alpha_dot, h);
    }
}

void kick(const WaveKick& k, Backend backend) {
    if (resolve(backend, k.alpha.size()) == Backend::openmp) {
        omp::kick(k);
    } else {
        serial::kick(k);
    }
}

void bloch_rk4(const BlochStep& b, Backend backend) {
    if (resolve(backend, b.sx.size()) == Backend::openmp) {
        omp::bloch_rk4(b);
    } else {
        serial::bloch_rk4(b);
    }
}

}  // namespace qmm::kernels
