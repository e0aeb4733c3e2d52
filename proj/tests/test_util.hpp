// Copyright 2026 The ionsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random generators and reference routines shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#ifndef IONSIM_TESTS_TEST_UTIL_HPP
#define IONSIM_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <random>

#include "ionsim/linalg.hpp"

namespace testing_util {

using ionsim::complex;
using ionsim::ComplexMatrix;
using ionsim::real;
using ionsim::StateVec;

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64 &rng) {
    std::normal_distribution<real> g;
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = complex(g(rng), g(rng));
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64 &rng) {
    const ComplexMatrix a = random_matrix(dim, dim, rng);
    ComplexMatrix h = a + a.adjoint();
    h *= 0.5;
    return h;
}

inline ComplexMatrix random_density(std::size_t dim, std::mt19937_64 &rng) {
    const ComplexMatrix a = random_matrix(dim, dim, rng);
    ComplexMatrix rho = a * a.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho;
}

inline StateVec random_state(std::size_t dim, std::mt19937_64 &rng) {
    std::normal_distribution<real> g;
    StateVec v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = complex(g(rng), g(rng));
    }
    return v.normalized();
}

/// exp(-i h t) by scaling and squaring a 30-term Taylor series.
inline ComplexMatrix taylor_exp(const ComplexMatrix &h, real t) {
    real norm = 0.0;
    for (auto x : h.entries()) {
        norm = std::max(norm, std::abs(x));
    }
    int squarings = 0;
    real scale = std::abs(t) * norm * static_cast<real>(h.rows());
    while (scale > 0.25) {
        scale /= 2.0;
        ++squarings;
    }
    const ComplexMatrix a = h * complex(0.0, -t / std::ldexp(1.0, squarings));
    ComplexMatrix term = ComplexMatrix::identity(h.rows());
    ComplexMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * a;
        term *= 1.0 / k;
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    return sum;
}

} // namespace testing_util

#endif // IONSIM_TESTS_TEST_UTIL_HPP
