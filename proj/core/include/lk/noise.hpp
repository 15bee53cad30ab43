#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "lk/grid.hpp"

namespace lk {

/// Seedable standard-normal stream, specified so other implementations can
/// reproduce it bit for bit:
///
///   engine: std::mt19937_64 constructed from the 64-bit seed
///   uniform: u = (engine() >> 11) * 2^-53, in [0, 1)
///   Box-Muller on consecutive uniforms (u1, u2):
///     r = sqrt(-2 ln(1 - u1)),  z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
///   values are emitted z0, z1, z0, z1, ...
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    double uniform();

    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct NoisyData {
    Grid data;
    double delta_abs = 0.0;
};

/// g + e with e Gaussian, rescaled so that ||e|| = delta_rel ||g|| exactly.
/// Returns delta_abs = delta_rel ||g||. Throws for delta_rel < 0, or for g = 0
/// with delta_rel > 0.
NoisyData add_relative_gaussian_noise(const Grid& g, double delta_rel, std::uint64_t seed);

}  // namespace lk
