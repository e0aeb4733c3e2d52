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

// Two-ion dispersive dynamics.
//
// Units: energies are measured in |Omega_k| and times in 1/|Omega_k|, with
// Omega_k = (-1)^k |Omega_k|. The rate seen by a Fock sector (n, n_r) is then
// W = (-1)^k * rabi_frequency(k, n, n_r). Because the vibrational part of the
// effective Hamiltonian only contains number operators, every sector evolves
// as an independent 4-dimensional electronic problem; build_heff() assembles
// the full truncated operator purely so that claim can be checked.
//
// Electronic basis for a pulsed pair (j, m): index 2*s_j + s_m with
// down = 0 and up = 1, i.e. {dd, du, ud, uu}.

#ifndef IONSIM_DYNAMICS_HPP
#define IONSIM_DYNAMICS_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ionsim/linalg.hpp"
#include "ionsim/motional.hpp"

namespace ionsim {

/// One Raman-pair excitation on a pair of ions.
struct PulseSpec {
    int k = 1;
    real phi = 0.0;
    real phi0 = 0.0;
    real area = pi / 4.0; ///< target |W_ref| t for the reference sector
    real epsilon = 0.0;   ///< fractional pulse-area error
    int reference_n = 0;
    int reference_n_r = 0;

    void validate() const {
        if (k < 0) {
            throw std::invalid_argument("PulseSpec: sideband order must be non-negative");
        }
        if (!(area > 0.0)) {
            throw std::invalid_argument("PulseSpec: area must be positive");
        }
        if (!(epsilon > -1.0)) {
            throw std::invalid_argument("PulseSpec: epsilon must exceed -1");
        }
    }
};

/// Electronic pure state attached to one motional Fock label.
struct SectorState {
    int n = 0;
    int n_r = 0;
    int n_B = 0;
    real weight = 1.0;
    StateVec amplitudes;
};

inline constexpr int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

/// Signed sector rate W in units of |Omega_k|.
inline real sector_rate(int k, int n, int n_r, const ModeParams &p) {
    return parity_sign(k) * rabi_frequency(k, n, n_r, p);
}

/// Duration (in 1/|Omega_k|) of a pulse whose area is calibrated on the reference sector.
inline real pulse_duration(const PulseSpec &pulse, real reference_rabi) {
    if (reference_rabi == 0.0) {
        throw std::domain_error("pulse_duration: reference sector has zero Rabi frequency");
    }
    return (1.0 + pulse.epsilon) * pulse.area / std::abs(reference_rabi);
}

inline real pulse_duration(const PulseSpec &pulse, const ModeParams &p) {
    return pulse_duration(pulse, rabi_frequency(pulse.k, pulse.reference_n, pulse.reference_n_r, p));
}

/// exp(-i H t) on one Fock sector, closed form. `rate` is the signed sector
/// frequency W (units of |Omega_k|); the populations mix at |W|:
///
/// |dd> -> g [cos(|W|t) |dd> + i s e^{2i phi} sin(|W|t) |uu>]
/// |du> -> g [cos(|W|t) |du> + i e^{i phi0} sin(|W|t) |ud>]
/// with s = (-1)^k and g = exp(-i s W t). This is the exact exponential of the
/// sector block whenever Omega^k_{n n_r} < 0, which holds below the first
/// Laguerre node (n < 9 for every eta <= 0.3 at k = 1).
inline ComplexMatrix sector_unitary(int k, real phi, real phi0, real rate, real duration) {
    const real s = parity_sign(k);
    const complex g = std::exp(complex(0.0, -s * rate * duration));
    const complex i(0.0, 1.0);
    const real wt = std::abs(rate) * duration;
    const real c = std::cos(wt);
    const real sn = std::sin(wt);

    ComplexMatrix u(4, 4);
    u(0, 0) = g * c;
    u(3, 3) = g * c;
    u(3, 0) = g * i * s * std::exp(2.0 * i * phi) * sn;
    u(0, 3) = g * i * s * std::exp(-2.0 * i * phi) * sn;
    u(1, 1) = g * c;
    u(2, 2) = g * c;
    u(2, 1) = g * i * std::exp(i * phi0) * sn;
    u(1, 2) = g * i * std::exp(-i * phi0) * sn;
    return u;
}

/// Evolves a two-ion electronic state in one sector. `sector_rabi` and
/// `reference_rabi` are rabi_frequency() values (units of Omega_k).
inline StateVec sector_evolve(const StateVec &electronic, const PulseSpec &pulse, real sector_rabi,
                              real reference_rabi) {
    if (electronic.dim() != 4) {
        throw DimensionError("sector_evolve: expected a 4-amplitude two-ion state");
    }
    const real t = pulse_duration(pulse, reference_rabi);
    return sector_unitary(pulse.k, pulse.phi, pulse.phi0, parity_sign(pulse.k) * sector_rabi, t) * electronic;
}

namespace detail {

// Two-ion electronic operators in the {dd, du, ud, uu} basis.
inline ComplexMatrix raise_both() {
    ComplexMatrix m(4, 4);
    m(3, 0) = 1.0; // S+_j S+_m |dd> = |uu>
    return m;
}

inline ComplexMatrix raise_first_lower_second() {
    ComplexMatrix m(4, 4);
    m(2, 1) = 1.0; // S+_j S-_m |du> = |ud>
    return m;
}

inline ComplexMatrix electronic_generator(int k, real phi, real phi0) {
    const complex i(0.0, 1.0);
    ComplexMatrix a = raise_both() * std::exp(2.0 * i * phi);
    a += static_cast<real>(parity_sign(k)) *
         (raise_first_lower_second() * std::exp(i * phi0) + ComplexMatrix::identity(4) * 0.5);
    return a;
}

} // namespace detail

/// Full effective Hamiltonian on (electronic pair) (x) (CM Fock) (x) (stretch Fock),
/// Fock indices 0..cutoff in each mode, units of |Omega_k|.
inline ComplexMatrix build_heff(int k, const ModeParams &p, real phi, real phi0, std::size_t cutoff) {
    if (cutoff < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("build_heff: cutoff must be at least k");
    }
    const std::size_t modes = cutoff + 1;
    ComplexMatrix vib(modes * modes, modes * modes);
    for (std::size_t n = 0; n < modes; ++n) {
        for (std::size_t m = 0; m < modes; ++m) {
            vib(n * modes + m, n * modes + m) = rabi_frequency(k, static_cast<int>(n), static_cast<int>(m), p);
        }
    }
    const ComplexMatrix half = tensor(detail::electronic_generator(k, phi, phi0), vib);
    ComplexMatrix h = half + half.adjoint();
    h *= static_cast<real>(parity_sign(k));
    return h;
}

/// k = 1, Lamb-Dicke limit: [S+S+ e^{2i phi} - S+S- e^{i phi0} - 1/2] + H.c., units of |Omega_1|.
inline ComplexMatrix build_ld_hamiltonian(real phi, real phi0) {
    const ComplexMatrix a = detail::electronic_generator(1, phi, phi0);
    return a + a.adjoint();
}

/// Single-ion rotation axis.
enum class Axis { X, Y, Z };

inline Axis parse_axis(std::string_view s) {
    if (s == "x") {
        return Axis::X;
    }
    if (s == "y") {
        return Axis::Y;
    }
    if (s == "z") {
        return Axis::Z;
    }
    throw std::invalid_argument("unknown rotation axis '" + std::string(s) + "'");
}

inline const char *axis_name(Axis a) {
    switch (a) {
    case Axis::X:
        return "x";
    case Axis::Y:
        return "y";
    case Axis::Z:
        return "z";
    }
    return "?";
}

/// Carrier Debye-Waller ratio D(n)/D(0) = L_n^0(eta^2).
inline real carrier_scaling(int n, real eta_local) { return laguerre(n, 0, eta_local * eta_local); }

/// exp(-i theta sigma/2) with theta = angle (1+eps) D(n)/D(0).
inline ComplexMatrix carrier_rotation(Axis axis, real angle, int n, real eta_local, real epsilon) {
    const real theta = angle * (1.0 + epsilon) * carrier_scaling(n, eta_local);
    ComplexMatrix sigma;
    switch (axis) {
    case Axis::X:
        sigma = pauli::x();
        break;
    case Axis::Y:
        sigma = pauli::y();
        break;
    case Axis::Z:
        sigma = pauli::z();
        break;
    }
    return ComplexMatrix::identity(2) * std::cos(theta / 2.0) + sigma * complex(0.0, -std::sin(theta / 2.0));
}

inline StateVec oracle_evolve(const StateVec &state, const ComplexMatrix &h, real t) {
    if (state.dim() != h.rows()) {
        throw DimensionError("oracle_evolve: state and Hamiltonian dimensions differ");
    }
    return mat_exp(h, t) * state;
}

// Register helpers. Ions are numbered from 1; ion 1 is the slowest tensor index.

inline std::size_t ion_bit(int ion, int n_ions) {
    if (ion < 1 || ion > n_ions) {
        throw std::out_of_range("ion index " + std::to_string(ion) + " outside register of " +
                                std::to_string(n_ions));
    }
    return static_cast<std::size_t>(n_ions - ion);
}

/// Applies a 4x4 operator (basis 2*s_a + s_b) to ions a and b of an n-ion register.
inline StateVec apply_two_ion(const StateVec &state, const ComplexMatrix &u, int ion_a, int ion_b, int n_ions) {
    if (ion_a == ion_b) {
        throw std::invalid_argument("apply_two_ion: ions must differ");
    }
    if (state.dim() != (std::size_t{1} << n_ions) || u.rows() != 4 || u.cols() != 4) {
        throw DimensionError("apply_two_ion: dimension mismatch");
    }
    const std::size_t ba = ion_bit(ion_a, n_ions);
    const std::size_t bb = ion_bit(ion_b, n_ions);
    const std::size_t mask = (std::size_t{1} << ba) | (std::size_t{1} << bb);
    StateVec out(state.dim());
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if ((base & mask) != 0) {
            continue;
        }
        std::size_t idx[4];
        for (std::size_t l = 0; l < 4; ++l) {
            idx[l] = base | (((l >> 1) & 1U) << ba) | ((l & 1U) << bb);
        }
        for (std::size_t r = 0; r < 4; ++r) {
            complex s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) {
                s += u(r, c) * state[idx[c]];
            }
            out[idx[r]] = s;
        }
    }
    return out;
}

inline StateVec apply_one_ion(const StateVec &state, const ComplexMatrix &u, int ion, int n_ions) {
    if (state.dim() != (std::size_t{1} << n_ions) || u.rows() != 2 || u.cols() != 2) {
        throw DimensionError("apply_one_ion: dimension mismatch");
    }
    const std::size_t b = ion_bit(ion, n_ions);
    StateVec out(state.dim());
    for (std::size_t base = 0; base < state.dim(); ++base) {
        if ((base >> b) & 1U) {
            continue;
        }
        const std::size_t i0 = base;
        const std::size_t i1 = base | (std::size_t{1} << b);
        out[i0] = u(0, 0) * state[i0] + u(0, 1) * state[i1];
        out[i1] = u(1, 0) * state[i0] + u(1, 1) * state[i1];
    }
    return out;
}

} // namespace ionsim

#endif // IONSIM_DYNAMICS_HPP
