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

#include "ionsim/motional.hpp"

#include <algorithm>
#include <random>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gtest/gtest.h"

using namespace ionsim;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

/// L_m^k(x) as the explicit finite sum sum_l (-1)^l C(m+k, m-l) x^l / l!.
template <typename T>
T laguerre_sum(int m, int k, T x) {
    T sum = 0;
    T x_pow = 1;
    T l_fact = 1;
    for (int l = 0; l <= m; ++l) {
        if (l > 0) {
            x_pow *= x;
            l_fact *= l;
        }
        T binom = 1;
        for (int j = 1; j <= m - l; ++j) {
            binom = binom * T(k + l + j) / T(j);
        }
        sum += (l % 2 == 0 ? 1 : -1) * binom * x_pow / l_fact;
    }
    return sum;
}

/// f_k(n, n_r) in 50-digit arithmetic with factorials taken literally.
big coupling_factor_big(int k, int n, int n_r, big eta, big eta_r) {
    big n_fact = 1;
    for (int j = 2; j <= n; ++j) {
        n_fact *= j;
    }
    big nk_fact = n_fact;
    for (int j = n + 1; j <= n + k; ++j) {
        nk_fact *= j;
    }
    using boost::multiprecision::exp;
    return exp(-(eta * eta + eta_r * eta_r) / 2) * n_fact / nk_fact * laguerre_sum<big>(n, k, eta * eta) *
           laguerre_sum<big>(n_r, 0, eta_r * eta_r);
}

const ModeParams fig3 = ModeParams::from_eta(0.15);

} // namespace

TEST(Laguerre, degree_zero_is_one) {
    for (int k : {0, 1, 3}) {
        for (real x : {0.0, 0.3, 7.5}) {
            EXPECT_EQ(laguerre(0, k, x), 1.0);
        }
    }
}

TEST(Laguerre, degree_one_order_zero) {
    for (real x : {0.0, 0.3, 2.0}) {
        EXPECT_NEAR(laguerre(1, 0, x), 1.0 - x, 1e-15);
    }
}

TEST(Laguerre, matches_finite_sum) {
    // L_2^1(x) = x^2/2 - 3x + 3
    EXPECT_NEAR(laguerre(2, 1, 0.0225), laguerre_sum<real>(2, 1, 0.0225), 1e-12);
    EXPECT_NEAR(laguerre(2, 1, 0.0225), 2.932753125, 1e-12);
}

TEST(Laguerre, high_degree_matches_extended_precision_sum) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> m_dist(0, 50);
    std::uniform_int_distribution<int> k_dist(0, 3);
    std::uniform_real_distribution<real> x_dist(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = m_dist(rng);
        const int k = k_dist(rng);
        const real x = x_dist(rng);
        const real ref = static_cast<real>(laguerre_sum<big>(m, k, big(x)));
        EXPECT_NEAR(laguerre(m, k, x), ref, 1e-9 * std::max(1.0, std::abs(ref))) << "m=" << m << " k=" << k;
    }
}

TEST(Laguerre, three_term_recurrence) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> m_dist(1, 49);
    std::uniform_int_distribution<int> k_dist(0, 3);
    std::uniform_real_distribution<real> x_dist(0.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = m_dist(rng);
        const int k = k_dist(rng);
        const real x = x_dist(rng);
        const real lhs = (m + 1) * laguerre(m + 1, k, x);
        const real a = (2 * m + k + 1 - x) * laguerre(m, k, x);
        const real b = (m + k) * laguerre(m - 1, k, x);
        const real scale = std::max({std::abs(lhs), std::abs(a), std::abs(b), 1.0});
        EXPECT_NEAR(lhs, a - b, 1e-9 * scale);
    }
}

TEST(Laguerre, negative_indices_rejected) {
    EXPECT_THROW(laguerre(-1, 0, 0.1), std::invalid_argument);
    EXPECT_THROW(laguerre(1, -2, 0.1), std::invalid_argument);
}

TEST(CouplingFactor, first_sideband_ground_sector) {
    const real expected = std::exp(-(0.0225 + fig3.eta_r * fig3.eta_r) / 2.0);
    EXPECT_NEAR(coupling_factor(1, 0, 0, fig3), expected, 1e-15);
    EXPECT_NEAR(coupling_factor(1, 0, 0, fig3), 0.98241, 5e-6);
}

TEST(CouplingFactor, zero_order_ground_sector) {
    const ModeParams p = ModeParams::from_eta(0.27);
    EXPECT_NEAR(coupling_factor(0, 0, 0, p), std::exp(-(p.eta * p.eta + p.eta_r * p.eta_r) / 2.0), 1e-15);
}

TEST(CouplingFactor, large_n_matches_extended_precision) {
    for (int n : {25, 40, 60}) {
        for (int n_r : {0, 7}) {
            const real ref = static_cast<real>(coupling_factor_big(1, n, n_r, big(0.15), big(fig3.eta_r)));
            const real got = coupling_factor(1, n, n_r, fig3);
            EXPECT_TRUE(std::isfinite(got));
            EXPECT_NEAR(got, ref, 1e-9 * std::abs(ref)) << "n=" << n << " n_r=" << n_r;
        }
    }
}

TEST(CouplingFactor, huge_n_stays_finite) {
    EXPECT_TRUE(std::isfinite(coupling_factor(2, 1000000, 0, ModeParams::from_eta(0.001))));
}

TEST(RabiFrequency, ground_sector_first_sideband) {
    const real expected = -std::exp(-(fig3.eta * fig3.eta + fig3.eta_r * fig3.eta_r));
    EXPECT_NEAR(rabi_frequency(1, 0, 0, fig3), expected, 1e-15);
    EXPECT_NEAR(rabi_frequency(1, 0, 0, fig3), -0.96513, 5e-6);
}

TEST(RabiFrequency, no_coupling_without_sideband) {
    for (int n = 0; n <= 10; ++n) {
        for (int n_r = 0; n_r <= 10; ++n_r) {
            EXPECT_EQ(rabi_frequency(0, n, n_r, fig3), 0.0);
        }
    }
}

TEST(RabiFrequency, annihilation_term_absent_below_k) {
    // n < k: only the creation term survives.
    const ModeParams p = ModeParams::from_eta(0.2);
    for (int n = 0; n < 3; ++n) {
        const real f = coupling_factor(3, n, 2, p);
        EXPECT_NEAR(rabi_frequency(3, n, 2, p), -f * f * rising_ratio(n, 3), 1e-15);
    }
}

TEST(RabiFrequency, fig3_grid_pairwise_distinct) {
    std::vector<real> mags;
    for (int n = 0; n <= 25; ++n) {
        for (int n_r = 0; n_r <= 25; ++n_r) {
            mags.push_back(std::abs(rabi_frequency(1, n, n_r, fig3)));
        }
    }
    ASSERT_EQ(mags.size(), 676U);
    std::sort(mags.begin(), mags.end());
    for (std::size_t i = 1; i < mags.size(); ++i) {
        EXPECT_GT(mags[i] - mags[i - 1], 1e-9);
    }
    EXPECT_GT(mags.front(), 0.0);
}

TEST(RabiFrequency, finite_and_nonzero_across_lamb_dicke_range) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<real> eta_dist(1e-3, 0.3);
    for (int trial = 0; trial < 30; ++trial) {
        const ModeParams p = ModeParams::from_eta(eta_dist(rng));
        for (int k = 1; k <= 3; ++k) {
            for (int n = 0; n <= 25; ++n) {
                for (int n_r = 0; n_r <= 25; ++n_r) {
                    const real w = rabi_frequency(k, n, n_r, p);
                    ASSERT_TRUE(std::isfinite(w));
                    ASSERT_NE(w, 0.0) << "eta=" << p.eta << " k=" << k << " n=" << n << " n_r=" << n_r;
                }
            }
        }
    }
}

TEST(MatchedNbarR, reproduces_reported_values) {
    EXPECT_NEAR(matched_nbar_r(0.2), 0.047, 0.001);
    EXPECT_NEAR(matched_nbar_r(1.0), 0.43, 0.005);
    EXPECT_NEAR(matched_nbar_r(5.0), 2.69, 0.005);
    EXPECT_EQ(matched_nbar_r(0.0), 0.0);
}

TEST(MatchedNbarR, strictly_increasing) {
    real prev = matched_nbar_r(0.0);
    for (int i = 1; i <= 200; ++i) {
        const real v = matched_nbar_r(0.05 * i);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(CutoffFor, examples) {
    EXPECT_EQ(cutoff_for(0.0, 1e-6), 0U);
    EXPECT_EQ(cutoff_for(1.0, 1e-6), 19U);
    EXPECT_EQ(cutoff_for(5.0, 1e-6), 75U);
}

TEST(CutoffFor, is_smallest_cutoff_meeting_tolerance) {
    // Brute force: tail beyond N is q^(N+1) for geometric weights.
    for (real nbar : {0.05, 0.2, 1.0, 2.69, 5.0, 12.0}) {
        for (real tol : {1e-3, 1e-6, 1e-9}) {
            const real q = nbar / (1.0 + nbar);
            std::size_t n = 0;
            while (std::pow(q, static_cast<real>(n + 1)) >= tol) {
                ++n;
            }
            EXPECT_EQ(cutoff_for(nbar, tol), n) << "nbar=" << nbar << " tol=" << tol;
        }
    }
}

TEST(ThermalDistribution, zero_temperature) {
    const ThermalSpec t = thermal_distribution(0.0, 0.0, 4);
    EXPECT_EQ(t.weight(0, 0), 1.0);
    for (std::size_t i = 1; i < t.weights.size(); ++i) {
        EXPECT_EQ(t.weights[i], 0.0);
    }
}

TEST(ThermalDistribution, two_level_truncation_renormalizes) {
    // Geometric weights 1/2 and 1/4 for n = 0, 1, renormalized over {0, 1}.
    const real w0 = 0.5;
    const real w1 = 0.25;
    const ThermalSpec t = thermal_distribution(1.0, 0.0, 1, 0);
    EXPECT_NEAR(t.weight(0, 0), w0 / (w0 + w1), 1e-15);
    EXPECT_NEAR(t.weight(1, 0), w1 / (w0 + w1), 1e-15);
    EXPECT_NEAR(t.tail_mass, 0.25, 1e-15);
}

TEST(ThermalDistribution, auto_cutoff_tail_below_tolerance) {
    const ThermalSpec t = thermal_distribution_auto(5.0, 0.0, 1e-6);
    EXPECT_EQ(t.cutoff, 75U);
    EXPECT_LT(t.tail_mass, 1e-6);
    EXPECT_FALSE(t.tail_exceeds(1e-6));
    EXPECT_TRUE(thermal_distribution(5.0, 0.0, 3, 0).tail_exceeds(1e-6));
}

TEST(ThermalDistribution, normalized_and_monotone) {
    for (real nbar : {0.1, 0.2, 1.0, 5.0}) {
        const real nr = matched_nbar_r(nbar);
        const ThermalSpec t = thermal_distribution_auto(nbar, nr);
        real sum = 0.0;
        for (real w : t.weights) {
            EXPECT_GE(w, 0.0);
            sum += w;
        }
        EXPECT_NEAR(sum, 1.0, 1e-14);
        for (std::size_t n = 0; n <= t.cutoff; ++n) {
            for (std::size_t m = 0; m <= t.cutoff_r; ++m) {
                if (n > 0) {
                    EXPECT_LE(t.weight(n, m), t.weight(n - 1, m));
                }
                if (m > 0) {
                    EXPECT_LE(t.weight(n, m), t.weight(n, m - 1));
                }
            }
        }
    }
}
