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

#include "ionsim/linalg.hpp"

#include <random>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace ionsim;

TEST(Tensor, identity_times_identity) {
    EXPECT_EQ(tensor(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
}

TEST(Tensor, basis_state_product) {
    EXPECT_EQ(tensor(StateVec{1.0, 0.0}, StateVec{0.0, 1.0}), (StateVec{0.0, 1.0, 0.0, 0.0}));
}

TEST(Tensor, pauli_x_pair_flips_both) {
    const StateVec out = tensor(pauli::x(), pauli::x()) * StateVec::basis(4, 0);
    EXPECT_EQ(out, StateVec::basis(4, 3));
}

TEST(Tensor, rejects_oversized_products) {
    const ComplexMatrix big = ComplexMatrix::identity(300);
    EXPECT_THROW(tensor(big, big), DimensionError);
    EXPECT_THROW(tensor(StateVec(10), StateVec(10), 50), DimensionError);
    EXPECT_THROW(tensor(ComplexMatrix(), big), DimensionError);
}

TEST(Tensor, associative) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = testing_util::random_matrix(2, 3, rng);
        const auto b = testing_util::random_matrix(3, 2, rng);
        const auto c = testing_util::random_matrix(2, 2, rng);
        EXPECT_LT(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))), 1e-12);
    }
}

TEST(PartialTrace, pure_product_state_stays_pure) {
    const StateVec psi = tensor(StateVec{0.6, complex(0.0, 0.8)}, StateVec{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    const ComplexMatrix reduced = partial_trace(psi.projector(), {0}, {2, 2});
    EXPECT_NEAR(fidelity(reduced, reduced), 1.0, 1e-12);
    EXPECT_NEAR(reduced(0, 0).real(), 0.36, 1e-12);
}

TEST(PartialTrace, bell_state_is_maximally_mixed) {
    const real h = 1.0 / std::sqrt(2.0);
    const StateVec bell{h, 0.0, 0.0, h};
    EXPECT_LT(max_abs_diff(partial_trace(bell.projector(), {1}, {2, 2}), ComplexMatrix::identity(2) * 0.5), 1e-15);
    EXPECT_LT(max_abs_diff(partial_trace(bell.projector(), {0}, {2, 2}), ComplexMatrix::identity(2) * 0.5), 1e-15);
}

TEST(PartialTrace, random_two_by_three_matches_index_sum) {
    std::mt19937_64 rng(5);
    const ComplexMatrix rho = testing_util::random_density(6, rng);

    // rho_A(i, j) = sum_k rho(3i + k, 3j + k), rho_B(k, l) = sum_i rho(3i + k, 3i + l)
    ComplexMatrix a(2, 2);
    ComplexMatrix b(3, 3);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 3; ++k) {
                a(i, j) += rho(3 * i + k, 3 * j + k);
            }
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t l = 0; l < 3; ++l) {
            for (std::size_t i = 0; i < 2; ++i) {
                b(k, l) += rho(3 * i + k, 3 * i + l);
            }
        }
    }
    const ComplexMatrix ra = partial_trace(rho, {0}, {2, 3});
    const ComplexMatrix rb = partial_trace(rho, {1}, {2, 3});
    EXPECT_LT(max_abs_diff(ra, a), 1e-15);
    EXPECT_LT(max_abs_diff(rb, b), 1e-15);
    EXPECT_NEAR(ra.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(rb.trace().real(), 1.0, 1e-12);
}

TEST(PartialTrace, order_of_tracing_does_not_matter) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix rho = testing_util::random_density(2 * 3 * 2, rng);
        // Keep subsystem 1 of (2, 3, 2): drop 0 first or drop 2 first.
        const ComplexMatrix via0 = partial_trace(partial_trace(rho, {1, 2}, {2, 3, 2}), {0}, {3, 2});
        const ComplexMatrix via2 = partial_trace(partial_trace(rho, {0, 1}, {2, 3, 2}), {1}, {2, 3});
        const ComplexMatrix direct = partial_trace(rho, {1}, {2, 3, 2});
        EXPECT_LT(max_abs_diff(via0, via2), 1e-12);
        EXPECT_LT(max_abs_diff(via0, direct), 1e-12);
    }
}

TEST(PartialTrace, dimension_mismatch) {
    EXPECT_THROW(partial_trace(ComplexMatrix::identity(4), {0}, {2, 3}), DimensionError);
    EXPECT_THROW(partial_trace(ComplexMatrix::identity(4), {2}, {2, 2}), DimensionError);
    EXPECT_THROW(partial_trace(ComplexMatrix::identity(4), {0, 0}, {2, 2}), DimensionError);
}

TEST(MatExp, zero_generator_gives_identity) {
    EXPECT_LT(max_abs_diff(mat_exp(ComplexMatrix::zeros(4, 4), 1.7), ComplexMatrix::identity(4)), 1e-15);
}

TEST(MatExp, quarter_turn_about_x) {
    // exp(-i (pi/2) X) = cos(pi/2) I - i sin(pi/2) X = -i X
    const ComplexMatrix u = mat_exp(pauli::x(), pi / 2.0);
    EXPECT_LT(max_abs_diff(u, pauli::x() * complex(0.0, -1.0)), 1e-12);
}

TEST(MatExp, random_hermitian_is_unitary) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix h = testing_util::random_hermitian(8, rng);
        std::uniform_real_distribution<real> t(-5.0, 5.0);
        EXPECT_LT(unitarity_error(mat_exp(h, t(rng))), 1e-9);
    }
}

TEST(MatExp, agrees_with_taylor_series) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix h = testing_util::random_hermitian(5, rng);
        EXPECT_LT(max_abs_diff(mat_exp(h, 0.8), testing_util::taylor_exp(h, 0.8)), 1e-10);
    }
}

TEST(MatExp, rejects_non_hermitian) {
    const ComplexMatrix m{{0.0, 1.0}, {0.0, 0.0}};
    EXPECT_THROW(mat_exp(m, 1.0), NotHermitianError);
    EXPECT_THROW(ComplexMatrix::hermitian(2, {0.0, 1.0, 0.0, 0.0}), NotHermitianError);
}

TEST(Fidelity, pure_state_with_itself) {
    const StateVec psi = StateVec{0.6, complex(0.0, 0.8)};
    EXPECT_NEAR(fidelity(psi.projector(), psi.projector()), 1.0, 1e-15);
}

TEST(Fidelity, orthogonal_states) {
    EXPECT_EQ(fidelity(StateVec::basis(2, 0).projector(), StateVec::basis(2, 1).projector()), 0.0);
}

TEST(Fidelity, pure_against_maximally_mixed) {
    EXPECT_NEAR(fidelity(StateVec::basis(2, 0).projector(), ComplexMatrix::identity(2) * 0.5), 0.5, 1e-15);
}

TEST(Fidelity, clamps_only_at_the_boundary) {
    ComplexMatrix rho = StateVec::basis(2, 0).projector();
    ComplexMatrix sigma = rho * (1.0 + 5e-10);
    EXPECT_EQ(fidelity(rho, sigma), 1.0);
    sigma = rho * (1.0 + 1e-6);
    EXPECT_GT(fidelity(rho, sigma), 1.0);
}

TEST(Fidelity, dimension_mismatch) {
    EXPECT_THROW(fidelity(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), DimensionError);
}
