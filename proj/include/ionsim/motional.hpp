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

// Motional-mode mathematics for a two-ion crystal: Laguerre polynomials,
// sideband coupling factors, sector Rabi frequencies and thermal Fock
// distributions.

#ifndef IONSIM_MOTIONAL_HPP
#define IONSIM_MOTIONAL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ionsim/linalg.hpp"

namespace ionsim {

inline const real sqrt3 = std::sqrt(3.0);

/// Lamb-Dicke parameters of the centre-of-mass (eta) and stretch (eta_r)
/// modes, plus the stretch/CM frequency ratio.
struct ModeParams {
    real eta = 0.15;
    real eta_r = 0.15 * std::pow(3.0, -0.25);
    real nu_ratio = sqrt3;

    /// eta_r from harmonic-oscillator length scaling, eta * (nu / nu_r)^(1/2).
    static ModeParams from_eta(real eta, real nu_ratio = sqrt3) {
        ModeParams p;
        p.eta = eta;
        p.eta_r = eta / std::sqrt(nu_ratio);
        p.nu_ratio = nu_ratio;
        p.validate();
        return p;
    }

    void validate() const {
        if (!(eta > 0.0) || !(eta_r > 0.0) || !(nu_ratio > 1.0)) {
            throw std::invalid_argument("ModeParams: require eta > 0, eta_r > 0, nu_ratio > 1");
        }
    }
};

/// Associated Laguerre polynomial L_m^k(x), by the upward three-term recurrence.
inline real laguerre(int m, int k, real x) {
    if (m < 0 || k < 0) {
        throw std::invalid_argument("laguerre: negative index");
    }
    real prev = 1.0;
    if (m == 0) {
        return prev;
    }
    real cur = 1.0 + k - x;
    for (int j = 1; j < m; ++j) {
        const real next = ((2.0 * j + k + 1.0 - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// (n+1)(n+2)...(n+k), i.e. (n+k)!/n!.
inline real rising_ratio(int n, int k) {
    real p = 1.0;
    for (int j = 1; j <= k; ++j) {
        p *= static_cast<real>(n) + j;
    }
    return p;
}

/// n(n-1)...(n-k+1), i.e. n!/(n-k)!; zero when n < k.
inline real falling_ratio(int n, int k) {
    if (n < k) {
        return 0.0;
    }
    real p = 1.0;
    for (int j = 0; j < k; ++j) {
        p *= static_cast<real>(n) - j;
    }
    return p;
}

/// f_k(n, n_r) = exp(-(eta^2 + eta_r^2)/2) n!/(n+k)! L_n^k(eta^2) L_{n_r}^0(eta_r^2).
inline real coupling_factor(int k, int n, int n_r, const ModeParams &p) {
    if (k < 0 || n < 0 || n_r < 0) {
        throw std::invalid_argument("coupling_factor: negative index");
    }
    const real eta2 = p.eta * p.eta;
    const real eta_r2 = p.eta_r * p.eta_r;
    return std::exp(-(eta2 + eta_r2) / 2.0) / rising_ratio(n, k) * laguerre(n, k, eta2) * laguerre(n_r, 0, eta_r2);
}

/// Sector Rabi frequency in units of Omega_k:
///   f_k^2(n-k, n_r) n!/(n-k)! - f_k^2(n, n_r) (n+k)!/n!
/// The first term is absent for n < k (no quanta to annihilate), and k = 0
/// gives exactly zero.
inline real rabi_frequency(int k, int n, int n_r, const ModeParams &p) {
    if (k < 0 || n < 0 || n_r < 0) {
        throw std::invalid_argument("rabi_frequency: negative index");
    }
    if (k == 0) {
        return 0.0;
    }
    real annihilate_first = 0.0;
    if (n >= k) {
        const real f = coupling_factor(k, n - k, n_r, p);
        annihilate_first = f * f * falling_ratio(n, k);
    }
    const real f = coupling_factor(k, n, n_r, p);
    return annihilate_first - f * f * rising_ratio(n, k);
}

/// Stretch-mode mean occupation at the temperature of a CM mode with mean nbar.
inline real matched_nbar_r(real nbar, real nu_ratio = sqrt3) {
    if (nbar < 0.0) {
        throw std::invalid_argument("matched_nbar_r: nbar must be non-negative");
    }
    if (nbar == 0.0) {
        return 0.0;
    }
    return 1.0 / (std::pow(1.0 / nbar + 1.0, nu_ratio) - 1.0);
}

inline constexpr real default_tail_tol = 1e-6;

/// Smallest Fock cutoff N whose geometric tail sum_{n>N} P(n) is below tail_tol.
inline std::size_t cutoff_for(real nbar, real tail_tol = default_tail_tol) {
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
        throw std::invalid_argument("cutoff_for: tail_tol must lie in (0, 1)");
    }
    if (nbar < 0.0) {
        throw std::invalid_argument("cutoff_for: nbar must be non-negative");
    }
    if (nbar == 0.0) {
        return 0;
    }
    const real ratio = nbar / (1.0 + nbar);
    const real n = std::ceil(std::log(tail_tol) / std::log(ratio)) - 1.0;
    return n <= 0.0 ? 0 : static_cast<std::size_t>(n);
}

/// Bose-Einstein weight n̄^n / (1 + n̄)^(n+1).
inline real bose_einstein_weight(real nbar, std::size_t n) {
    if (nbar == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(static_cast<real>(n) * std::log(nbar) - (static_cast<real>(n) + 1.0) * std::log1p(nbar));
}

/// Renormalized single-mode thermal weights over 0..cutoff.
inline std::vector<real> single_mode_thermal(real nbar, std::size_t cutoff) {
    if (nbar < 0.0) {
        throw std::invalid_argument("single_mode_thermal: nbar must be non-negative");
    }
    std::vector<real> w(cutoff + 1);
    real sum = 0.0;
    for (std::size_t n = 0; n <= cutoff; ++n) {
        w[n] = bose_einstein_weight(nbar, n);
        sum += w[n];
    }
    for (auto &x : w) {
        x /= sum;
    }
    return w;
}

/// Truncated two-mode thermal distribution P(n, n_r) = P_cm(n) P_rel(n_r).
struct ThermalSpec {
    real nbar = 0.0;
    real nbar_r = 0.0;
    std::size_t cutoff = 0;   ///< max CM Fock index
    std::size_t cutoff_r = 0; ///< max stretch Fock index
    /// Probability mass dropped by truncation, before renormalization.
    real tail_mass = 0.0;
    /// Row-major over (n, n_r): weights[n * (cutoff_r + 1) + n_r].
    std::vector<real> weights;

    real weight(std::size_t n, std::size_t n_r) const { return weights[n * (cutoff_r + 1) + n_r]; }

    bool tail_exceeds(real tail_tol) const { return tail_mass > tail_tol; }
};

inline ThermalSpec thermal_distribution(real nbar, real nbar_r, std::size_t cutoff, std::size_t cutoff_r) {
    if (nbar < 0.0 || nbar_r < 0.0) {
        throw std::invalid_argument("thermal_distribution: mean occupations must be non-negative");
    }
    ThermalSpec spec;
    spec.nbar = nbar;
    spec.nbar_r = nbar_r;
    spec.cutoff = cutoff;
    spec.cutoff_r = cutoff_r;
    spec.weights.resize((cutoff + 1) * (cutoff_r + 1));

    real sum = 0.0;
    for (std::size_t n = 0; n <= cutoff; ++n) {
        const real wn = bose_einstein_weight(nbar, n);
        for (std::size_t m = 0; m <= cutoff_r; ++m) {
            const real w = wn * bose_einstein_weight(nbar_r, m);
            spec.weights[n * (cutoff_r + 1) + m] = w;
            sum += w;
        }
    }
    spec.tail_mass = std::max(0.0, 1.0 - sum);
    for (auto &w : spec.weights) {
        w /= sum;
    }
    return spec;
}

inline ThermalSpec thermal_distribution(real nbar, real nbar_r, std::size_t cutoff) {
    return thermal_distribution(nbar, nbar_r, cutoff, cutoff);
}

/// Both cutoffs chosen so each mode's truncated tail stays below tail_tol.
inline ThermalSpec thermal_distribution_auto(real nbar, real nbar_r, real tail_tol = default_tail_tol) {
    return thermal_distribution(nbar, nbar_r, cutoff_for(nbar, tail_tol), cutoff_for(nbar_r, tail_tol));
}

} // namespace ionsim

#endif // IONSIM_MOTIONAL_HPP
