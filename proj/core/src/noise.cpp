#include "lk/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lk {

double NormalStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1p-53;
}

double NormalStream::next() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    return r * std::cos(angle);
}

NoisyData add_relative_gaussian_noise(const Grid& g, double delta_rel, std::uint64_t seed) {
    if (!(delta_rel >= 0.0) || !std::isfinite(delta_rel)) {
        throw std::invalid_argument("add_relative_gaussian_noise: noise level must be nonnegative");
    }
    if (delta_rel == 0.0) return {g, 0.0};

    const double g_norm = norm(g);
    if (g_norm == 0.0) {
        throw std::invalid_argument("add_relative_gaussian_noise: relative noise on zero data");
    }
    Grid e(g.rows(), g.cols());
    NormalStream stream(seed);
    for (auto& v : e.values()) v = stream.next();
    const double delta_abs = delta_rel * g_norm;
    e *= delta_abs / norm(e);
    return {g + e, delta_abs};
}

}  // namespace lk
