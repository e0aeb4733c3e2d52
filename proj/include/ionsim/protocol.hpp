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

// Teleportation pipeline: Bell-channel preparation, the single-pulse Bell
// analyzer, projective readout, conditional correction, and the
// entanglement teleportation / swapping variants.
//
// Conventions
//   * Ion 1 is the slowest tensor index; |down> = 0, |up> = 1.
//   * Bell states: Phi+- = (|dd> +- |uu>)/sqrt2, Psi+- = (|du> +- |ud>)/sqrt2.
//   * The prepared channel is (|dd> - i e^{2i phi_B} |uu>)/sqrt2; with the
//     default phases (phi0 = 3pi/2, phi = pi - phi0/2) this is exactly Phi+.
//   * Readout outcomes are indexed 2*s_a + s_b for the measured pair (a, b).

#ifndef IONSIM_PROTOCOL_HPP
#define IONSIM_PROTOCOL_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionsim/dynamics.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/motional.hpp"

namespace ionsim {

struct PhaseConfig {
    real phi_A = pi / 4.0;
    real phi_B = pi / 4.0;
    real phi0_A = 1.5 * pi;
    real phi0_B = 1.5 * pi;

    /// phi_A = phi_B = pi - phi0/2 with one shared phi0.
    static PhaseConfig matched(real phi0 = 1.5 * pi) {
        const real phi = pi - phi0 / 2.0;
        return {phi, phi, phi0, phi0};
    }
};

struct InputQubit {
    complex alpha = 1.0;
    complex beta = 0.0;

    void validate(real tol = 1e-12) const {
        if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > tol) {
            throw std::invalid_argument("InputQubit: |alpha|^2 + |beta|^2 must equal 1");
        }
    }

    StateVec ket() const { return StateVec{alpha, beta}; }

    /// The six cardinal Bloch states: +z, -z, +x, -x, +y, -y.
    static std::array<InputQubit, 6> cardinal_states() {
        const real h = 1.0 / std::sqrt(2.0);
        return {{{1.0, 0.0},
                 {0.0, 1.0},
                 {h, h},
                 {h, -h},
                 {h, complex(0.0, h)},
                 {h, complex(0.0, -h)}}};
    }
};

enum class Outcome : int { DownDown = 0, DownUp = 1, UpDown = 2, UpUp = 3 };

inline constexpr std::array<Outcome, 4> all_outcomes = {Outcome::DownDown, Outcome::DownUp, Outcome::UpDown,
                                                        Outcome::UpUp};

inline const char *outcome_label(Outcome o) {
    static constexpr const char *labels[] = {"dd", "du", "ud", "uu"};
    return labels[static_cast<int>(o)];
}

/// Correction Bob applies for each readout: uu none, dd z, ud x, du y.
inline std::optional<Axis> correction_axis(Outcome o) {
    switch (o) {
    case Outcome::UpUp:
        return std::nullopt;
    case Outcome::DownDown:
        return Axis::Z;
    case Outcome::UpDown:
        return Axis::X;
    case Outcome::DownUp:
        return Axis::Y;
    }
    return std::nullopt;
}

enum class BellLabel : int { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline const char *bell_label_name(BellLabel b) {
    static constexpr const char *names[] = {"Phi+", "Phi-", "Psi+", "Psi-"};
    return names[static_cast<int>(b)];
}

inline StateVec bell_state(BellLabel b) {
    const real h = 1.0 / std::sqrt(2.0);
    switch (b) {
    case BellLabel::PhiPlus:
        return {h, 0.0, 0.0, h};
    case BellLabel::PhiMinus:
        return {h, 0.0, 0.0, -h};
    case BellLabel::PsiPlus:
        return {0.0, h, h, 0.0};
    case BellLabel::PsiMinus:
        return {0.0, h, -h, 0.0};
    }
    return {};
}

/// Heralded Bell label of ions 1&4 for each 2-3 readout: uu Phi+, dd Phi-, ud Psi+, du Psi-.
inline BellLabel heralded_bell(Outcome o) {
    switch (o) {
    case Outcome::UpUp:
        return BellLabel::PhiPlus;
    case Outcome::DownDown:
        return BellLabel::PhiMinus;
    case Outcome::UpDown:
        return BellLabel::PsiPlus;
    case Outcome::DownUp:
        return BellLabel::PsiMinus;
    }
    return BellLabel::PhiPlus;
}

/// (|dd> - i e^{2i phi} |uu>)/sqrt2, the state an exact pi/4 pulse makes from |dd>.
inline StateVec bell_channel_target(real phi) {
    const real h = 1.0 / std::sqrt(2.0);
    return {h, 0.0, 0.0, complex(0.0, -1.0) * std::exp(complex(0.0, 2.0 * phi)) * h};
}

// ---------------------------------------------------------------------------
// Channel preparation

/// Evolves |dd> of a thermal ion pair through `pulse`; one entry per (n, n_r) sector.
inline std::vector<SectorState> prepare_channel(const ThermalSpec &thermal, const PulseSpec &pulse,
                                                const ModeParams &mode) {
    pulse.validate();
    const real reference = rabi_frequency(pulse.k, pulse.reference_n, pulse.reference_n_r, mode);
    const StateVec ground = StateVec::basis(4, 0);
    std::vector<SectorState> out;
    out.reserve(thermal.weights.size());
    for (std::size_t n = 0; n <= thermal.cutoff; ++n) {
        for (std::size_t m = 0; m <= thermal.cutoff_r; ++m) {
            SectorState s;
            s.n = static_cast<int>(n);
            s.n_r = static_cast<int>(m);
            s.weight = thermal.weight(n, m);
            s.amplitudes =
                sector_evolve(ground, pulse, rabi_frequency(pulse.k, s.n, s.n_r, mode), reference);
            out.push_back(std::move(s));
        }
    }
    return out;
}

/// Closed form F = 1/2 + 1/2 sum P sin(2 |W| tau) for a k = 1 pulse.
inline real channel_fidelity(const ThermalSpec &thermal, const PulseSpec &pulse, const ModeParams &mode) {
    if (pulse.k != 1) {
        throw std::invalid_argument("channel_fidelity: closed form holds for k = 1 only");
    }
    const real tau = pulse_duration(pulse, mode);
    real sum = 0.0;
    for (std::size_t n = 0; n <= thermal.cutoff; ++n) {
        for (std::size_t m = 0; m <= thermal.cutoff_r; ++m) {
            const real w = std::abs(rabi_frequency(1, static_cast<int>(n), static_cast<int>(m), mode));
            sum += thermal.weight(n, m) * std::sin(2.0 * w * tau);
        }
    }
    return 0.5 + 0.5 * sum;
}

/// Same quantity through the general pipeline: evolve every sector, then
/// take Tr{rho_target rho'}.
inline real channel_fidelity_pipeline(const ThermalSpec &thermal, const PulseSpec &pulse, const ModeParams &mode) {
    const StateVec target = bell_channel_target(pulse.phi);
    real f = 0.0;
    for (const auto &s : prepare_channel(thermal, pulse, mode)) {
        f += s.weight * std::norm(inner(target, s.amplitudes));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Teleportation

/// Trap-B single-mode thermal state seen by the correction pulse on ion 3.
struct TrapB {
    real nbar = 0.0;
    real eta = 0.15;
    std::vector<real> weights{1.0};

    static TrapB thermal(real nbar, real eta, std::size_t cutoff) {
        return {nbar, eta, single_mode_thermal(nbar, cutoff)};
    }
};

/// Everything a teleportation run depends on.
struct TeleportParams {
    ModeParams mode = ModeParams::from_eta(0.15);
    real nbar = 0.0;
    std::optional<real> nbar_r; ///< defaults to the temperature-matched value
    std::optional<real> nbar_B; ///< defaults to nbar
    std::optional<real> eta_B;  ///< defaults to mode.eta
    real epsilon = 0.0;
    int k = 1;
    PhaseConfig phases;
    real tail_tol = default_tail_tol;
    std::optional<std::size_t> cutoff; ///< overrides the tail_tol cutoff for every mode
    std::size_t cutoff_scale = 1;      ///< multiplies the automatic cutoffs

    real resolved_nbar_r() const { return nbar_r.value_or(matched_nbar_r(nbar, mode.nu_ratio)); }
    real resolved_nbar_B() const { return nbar_B.value_or(nbar); }
    real resolved_eta_B() const { return eta_B.value_or(mode.eta); }

    std::size_t cutoff_for_mode(real mean) const {
        return cutoff ? *cutoff : cutoff_for(mean, tail_tol) * cutoff_scale;
    }

    ThermalSpec trap_a() const {
        const real nr = resolved_nbar_r();
        return thermal_distribution(nbar, nr, cutoff_for_mode(nbar), cutoff_for_mode(nr));
    }

    TrapB trap_b() const {
        const real nb = resolved_nbar_B();
        return TrapB::thermal(nb, resolved_eta_B(), cutoff_for_mode(nb));
    }

    PulseSpec analyzer_pulse() const {
        PulseSpec p;
        p.k = k;
        p.phi = phases.phi_A;
        p.phi0 = phases.phi0_A;
        p.area = pi / 4.0;
        p.epsilon = epsilon;
        return p;
    }

    void validate() const {
        mode.validate();
        if (nbar < 0.0 || resolved_nbar_r() < 0.0 || resolved_nbar_B() < 0.0) {
            throw std::invalid_argument("TeleportParams: mean occupations must be non-negative");
        }
        if (!(epsilon > -1.0)) {
            throw std::invalid_argument("TeleportParams: epsilon must exceed -1");
        }
        if (k < 1) {
            throw std::invalid_argument("TeleportParams: the analyzer needs k >= 1");
        }
        if (cutoff_scale == 0) {
            throw std::invalid_argument("TeleportParams: cutoff_scale must be positive");
        }
    }
};

struct FidelityReport {
    std::array<real, 4> outcome_probs{};
    std::array<real, 4> outcome_fidelities{};
    real aggregate = 0.0;
    /// Conditional states before and after the correction pulse (empty for p = 0).
    std::array<ComplexMatrix, 4> conditional_states;
    std::array<ComplexMatrix, 4> corrected_states;

    real nbar = 0.0;
    real nbar_r = 0.0;
    real nbar_B = 0.0;
    real eta = 0.0;
    real eta_r = 0.0;
    real eta_B = 0.0;
    real epsilon = 0.0;
    PhaseConfig phases;
    std::string input;
};

/// One readout branch after measuring two ions.
struct ConditionalState {
    real probability = 0.0;
    ComplexMatrix state; ///< normalized density operator of the unmeasured ions
    bool empty = true;   ///< set when the branch has zero probability
};

/// Ion-1 input (x) ideal channel on ions 2-3, one register per trap-A sector.
inline std::vector<SectorState> initial_registers(const InputQubit &input, const ThermalSpec &trap_a,
                                                  const PhaseConfig &phases) {
    input.validate(1e-10);
    const StateVec reg = tensor(input.ket(), bell_channel_target(phases.phi_B));
    std::vector<SectorState> out;
    out.reserve(trap_a.weights.size());
    for (std::size_t n = 0; n <= trap_a.cutoff; ++n) {
        for (std::size_t m = 0; m <= trap_a.cutoff_r; ++m) {
            out.push_back({static_cast<int>(n), static_cast<int>(m), 0, trap_a.weight(n, m), reg});
        }
    }
    return out;
}

namespace detail {

inline int register_ions(const StateVec &v) {
    int n = 0;
    while ((std::size_t{1} << n) < v.dim()) {
        ++n;
    }
    if ((std::size_t{1} << n) != v.dim()) {
        throw DimensionError("register dimension is not a power of two");
    }
    return n;
}

/// Applies a pair pulse on ions (a, b) to every sector register; phases come from the pulse.
inline std::vector<SectorState> pulse_registers(std::vector<SectorState> registers, const PulseSpec &pulse,
                                                const ModeParams &mode, int ion_a, int ion_b) {
    pulse.validate();
    const real t = pulse_duration(pulse, mode);
    for (auto &s : registers) {
        const int n_ions = register_ions(s.amplitudes);
        const ComplexMatrix u =
            sector_unitary(pulse.k, pulse.phi, pulse.phi0, sector_rate(pulse.k, s.n, s.n_r, mode), t);
        s.amplitudes = apply_two_ion(s.amplitudes, u, ion_a, ion_b, n_ions);
    }
    return registers;
}

} // namespace detail

/// pi/4 analyzer pulse on ions 1-2 with the trap-A phases.
inline std::vector<SectorState> analyzer_pulse(std::vector<SectorState> registers, PulseSpec pulse,
                                               const PhaseConfig &phases, const ModeParams &mode) {
    pulse.phi = phases.phi_A;
    pulse.phi0 = phases.phi0_A;
    return detail::pulse_registers(std::move(registers), pulse, mode, 1, 2);
}

/// Projective readout of ions (a, b) in the energy basis. Each branch holds
/// the sector-mixed state of the remaining ions, in ascending ion order.
inline std::array<ConditionalState, 4> measure_and_condition(const std::vector<SectorState> &registers,
                                                             int ion_a = 1, int ion_b = 2) {
    if (registers.empty()) {
        throw std::invalid_argument("measure_and_condition: no registers");
    }
    const int n_ions = detail::register_ions(registers.front().amplitudes);
    const std::size_t ba = ion_bit(ion_a, n_ions);
    const std::size_t bb = ion_bit(ion_b, n_ions);
    if (ba == bb) {
        throw std::invalid_argument("measure_and_condition: ions must differ");
    }
    const std::size_t rest_dim = std::size_t{1} << (n_ions - 2);

    // Full index for (outcome, remaining-ion index).
    auto full_index = [&](std::size_t outcome, std::size_t rest) {
        std::size_t idx = (((outcome >> 1) & 1U) << ba) | ((outcome & 1U) << bb);
        std::size_t r = rest;
        for (std::size_t bit = 0; bit < static_cast<std::size_t>(n_ions); ++bit) {
            if (bit == ba || bit == bb) {
                continue;
            }
            idx |= (r & 1U) << bit;
            r >>= 1;
        }
        return idx;
    };

    std::array<ComplexMatrix, 4> acc;
    for (auto &m : acc) {
        m = ComplexMatrix(rest_dim, rest_dim);
    }
    for (const auto &s : registers) {
        if (detail::register_ions(s.amplitudes) != n_ions) {
            throw DimensionError("measure_and_condition: registers differ in size");
        }
        for (std::size_t o = 0; o < 4; ++o) {
            StateVec chi(rest_dim);
            for (std::size_t r = 0; r < rest_dim; ++r) {
                chi[r] = s.amplitudes[full_index(o, r)];
            }
            acc[o] += chi.projector() * s.weight;
        }
    }

    real total = 0.0;
    for (const auto &m : acc) {
        total += m.trace().real();
    }
    std::array<ConditionalState, 4> out;
    for (std::size_t o = 0; o < 4; ++o) {
        const real p = acc[o].trace().real() / total;
        out[o].probability = p;
        if (p > 1e-300) {
            out[o].state = acc[o] * (1.0 / acc[o].trace().real());
            out[o].empty = false;
        } else {
            out[o].probability = 0.0;
            out[o].state = ComplexMatrix(rest_dim, rest_dim);
        }
    }
    return out;
}

/// Applies the outcome's correction pulse to qubit `target` (0-based, slowest
/// first) of a `n_qubits` density operator, averaged over trap-B occupation.
inline ComplexMatrix correct_qubit(Outcome outcome, const ComplexMatrix &rho, std::size_t target,
                                   std::size_t n_qubits, const TrapB &trap, real epsilon) {
    const auto axis = correction_axis(outcome);
    if (!axis) {
        return rho;
    }
    ComplexMatrix out(rho.rows(), rho.cols());
    for (std::size_t nb = 0; nb < trap.weights.size(); ++nb) {
        const ComplexMatrix r = carrier_rotation(*axis, pi, static_cast<int>(nb), trap.eta, epsilon);
        ComplexMatrix full = ComplexMatrix::identity(1);
        for (std::size_t q = 0; q < n_qubits; ++q) {
            full = tensor(full, q == target ? r : ComplexMatrix::identity(2));
        }
        out += full * rho * full.adjoint() * trap.weights[nb];
    }
    return out;
}

inline ComplexMatrix correct_ion3(Outcome outcome, const ComplexMatrix &rho, const TrapB &trap, real epsilon) {
    return correct_qubit(outcome, rho, 0, 1, trap, epsilon);
}

namespace detail {

inline FidelityReport report_skeleton(const TeleportParams &params) {
    FidelityReport r;
    r.nbar = params.nbar;
    r.nbar_r = params.resolved_nbar_r();
    r.nbar_B = params.resolved_nbar_B();
    r.eta = params.mode.eta;
    r.eta_r = params.mode.eta_r;
    r.eta_B = params.resolved_eta_B();
    r.epsilon = params.epsilon;
    r.phases = params.phases;
    return r;
}

/// Corrects every branch on `target` and scores it against `ideal`.
inline void score_branches(FidelityReport &report, const std::array<ConditionalState, 4> &branches,
                           const ComplexMatrix &ideal, std::size_t target, std::size_t n_qubits,
                           const TrapB &trap, real epsilon) {
    report.aggregate = 0.0;
    for (std::size_t o = 0; o < 4; ++o) {
        const auto &b = branches[o];
        report.outcome_probs[o] = b.probability;
        report.conditional_states[o] = b.state;
        if (b.empty) {
            report.corrected_states[o] = b.state;
            report.outcome_fidelities[o] = 0.0;
            continue;
        }
        report.corrected_states[o] = correct_qubit(static_cast<Outcome>(o), b.state, target, n_qubits, trap, epsilon);
        report.outcome_fidelities[o] = fidelity(ideal, report.corrected_states[o]);
        report.aggregate += b.probability * report.outcome_fidelities[o];
    }
}

inline std::string describe(const InputQubit &q) {
    auto c = [](complex z) {
        return std::to_string(z.real()) + (z.imag() < 0 ? "-" : "+") + std::to_string(std::abs(z.imag())) + "i";
    };
    return "alpha=" + c(q.alpha) + ",beta=" + c(q.beta);
}

} // namespace detail

/// Full pipeline for one input qubit: analyzer on a thermal trap A, readout,
/// and Debye-Waller-limited correction in trap B.
inline FidelityReport teleport_fidelity(const InputQubit &input, const TeleportParams &params) {
    params.validate();
    input.validate(1e-10);
    auto registers = initial_registers(input, params.trap_a(), params.phases);
    registers = analyzer_pulse(std::move(registers), params.analyzer_pulse(), params.phases, params.mode);
    const auto branches = measure_and_condition(registers, 1, 2);

    FidelityReport report = detail::report_skeleton(params);
    report.input = detail::describe(input);
    detail::score_branches(report, branches, input.ket().projector(), 0, 1, params.trap_b(), params.epsilon);
    return report;
}

/// Uniform average over the six cardinal input states. Per-outcome
/// fidelities are probability-weighted so aggregate = sum p_o F_o still holds.
inline FidelityReport teleport_fidelity_average(const TeleportParams &params) {
    FidelityReport avg = detail::report_skeleton(params);
    avg.input = "average";
    const auto states = InputQubit::cardinal_states();
    std::array<real, 4> weighted{};
    for (const auto &q : states) {
        const FidelityReport r = teleport_fidelity(q, params);
        for (std::size_t o = 0; o < 4; ++o) {
            avg.outcome_probs[o] += r.outcome_probs[o] / states.size();
            weighted[o] += r.outcome_probs[o] * r.outcome_fidelities[o] / states.size();
        }
        avg.aggregate += r.aggregate / states.size();
    }
    for (std::size_t o = 0; o < 4; ++o) {
        avg.outcome_fidelities[o] = avg.outcome_probs[o] > 0.0 ? weighted[o] / avg.outcome_probs[o] : 0.0;
    }
    return avg;
}

/// Single state or the six-state average.
inline FidelityReport teleport_fidelity(const std::optional<InputQubit> &input, const TeleportParams &params) {
    return input ? teleport_fidelity(*input, params) : teleport_fidelity_average(params);
}

// ---------------------------------------------------------------------------
// Entanglement teleportation and swapping

/// Teleports an arbitrary two-ion state of ions 1-2 onto ions 1-4, using
/// ions 3-4 as the channel and the analyzer on ions 2-3.
inline FidelityReport entanglement_teleport(const StateVec &input12, const TeleportParams &params) {
    params.validate();
    if (input12.dim() != 4 || std::abs(input12.norm_squared() - 1.0) > 1e-10) {
        throw std::invalid_argument("entanglement_teleport: input must be a normalized two-ion state");
    }
    const StateVec reg = tensor(input12, bell_channel_target(params.phases.phi_B));
    const ThermalSpec trap_a = params.trap_a();
    std::vector<SectorState> registers;
    for (std::size_t n = 0; n <= trap_a.cutoff; ++n) {
        for (std::size_t m = 0; m <= trap_a.cutoff_r; ++m) {
            registers.push_back({static_cast<int>(n), static_cast<int>(m), 0, trap_a.weight(n, m), reg});
        }
    }
    registers = detail::pulse_registers(std::move(registers), params.analyzer_pulse(), params.mode, 2, 3);
    const auto branches = measure_and_condition(registers, 2, 3);

    FidelityReport report = detail::report_skeleton(params);
    report.input = "two-ion state";
    detail::score_branches(report, branches, input12.projector(), 1, 2, params.trap_b(), params.epsilon);
    return report;
}

struct SwapOutcome {
    real probability = 0.0;
    ComplexMatrix state; ///< ions 1&4
    BellLabel label = BellLabel::PhiPlus;
    real fidelity = 0.0;
};

struct SwapParams {
    ModeParams mode = ModeParams::from_eta(0.15);
    PhaseConfig phases;
    real epsilon = 0.0;
    real nbar = 0.0; ///< thermal CM occupation of the trap holding ions 2-3
    std::optional<real> nbar_r;
    real tail_tol = default_tail_tol;
    int k = 1;
};

/// |Phi+>_12 |Phi+>_34, pi/4 pulse on ions 2-3, readout of 2-3.
inline std::array<SwapOutcome, 4> entanglement_swap(const SwapParams &params) {
    params.mode.validate();
    const real nr = params.nbar_r.value_or(matched_nbar_r(params.nbar, params.mode.nu_ratio));
    const ThermalSpec trap = thermal_distribution_auto(params.nbar, nr, params.tail_tol);

    const StateVec reg = tensor(bell_state(BellLabel::PhiPlus), bell_state(BellLabel::PhiPlus));
    std::vector<SectorState> registers;
    for (std::size_t n = 0; n <= trap.cutoff; ++n) {
        for (std::size_t m = 0; m <= trap.cutoff_r; ++m) {
            registers.push_back({static_cast<int>(n), static_cast<int>(m), 0, trap.weight(n, m), reg});
        }
    }
    PulseSpec pulse;
    pulse.k = params.k;
    pulse.phi = params.phases.phi_A;
    pulse.phi0 = params.phases.phi0_A;
    pulse.area = pi / 4.0;
    pulse.epsilon = params.epsilon;
    registers = detail::pulse_registers(std::move(registers), pulse, params.mode, 2, 3);
    const auto branches = measure_and_condition(registers, 2, 3);

    std::array<SwapOutcome, 4> out;
    for (std::size_t o = 0; o < 4; ++o) {
        out[o].probability = branches[o].probability;
        out[o].state = branches[o].state;
        out[o].label = heralded_bell(static_cast<Outcome>(o));
        out[o].fidelity = branches[o].empty ? 0.0 : fidelity(bell_state(out[o].label), branches[o].state);
    }
    return out;
}

} // namespace ionsim

#endif // IONSIM_PROTOCOL_HPP
