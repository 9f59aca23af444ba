#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace sphclust {

using Rng = std::mt19937_64;

/// splitmix64 finalizer: decorrelated child seeds from one master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Eigen::VectorXd random_unit(Rng& rng, int dim) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(dim);
    do {
        for (int i = 0; i < dim; ++i)
            v(i) = normal(rng);
    } while (!(v.squaredNorm() > 0.0));
    return v.normalized();
}

/// Uniform sample in the ball of `radius` around `center`.
inline Eigen::VectorXd random_in_ball(Rng& rng, const Eigen::VectorXd& center, double radius) {
    const auto dim = static_cast<int>(center.size());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double r = radius * std::pow(unif(rng), 1.0 / dim);
    return center + r * random_unit(rng, dim);
}

} // namespace sphclust
