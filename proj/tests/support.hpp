#pragma once

#include <initializer_list>
#include <random>

#include "kobayashi/domain.hpp"

namespace testing_support {

inline kobayashi::ComplexPoint pt(std::initializer_list<kobayashi::cplx> v) {
    kobayashi::ComplexPoint p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto c : v) p(i++) = c;
    return p;
}

inline kobayashi::DomainSpec perturbed(double eta = 0.05) {
    return kobayashi::DomainSpec::perturbed_ball(2, eta, kobayashi::reference_perturbation(2));
}

/// Uniform point of the ball of radius `radius` in C^d.
inline kobayashi::ComplexPoint random_in_ball(std::mt19937_64& rng, int d, double radius) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    kobayashi::ComplexPoint p(d);
    for (int i = 0; i < d; ++i) p(i) = {g(rng), g(rng)};
    p.normalize();
    return p * (radius * std::pow(u(rng), 1.0 / (2.0 * d)));
}

}  // namespace testing_support
