#pragma once

// Qubit order for the three-party state is C (input), A, B; the Bell
// measurement acts on (C, A) and the resource is shared by A and B.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrd/channels.hpp"
#include "vrd/metrics.hpp"
#include "vrd/numcore.hpp"
#include "vrd/protocols.hpp"
#include "vrd/states.hpp"

namespace vrd {

/// Bell outcome as (parity bit, phase bit): 11 = Psi-, 10 = Psi+, 01 = Phi-, 00 = Phi+.
struct BsmOutcome {
    int bits;  // 0..3, parity bit is the high bit
    BellLabel label;
    ComplexMatrix correction;
};

inline const std::array<BsmOutcome, 4>& bsm_outcomes() {
    static const std::array<BsmOutcome, 4> table{{
        {0b00, BellLabel::PhiPlus, pauli::Z() * pauli::X()},
        {0b01, BellLabel::PhiMinus, pauli::X()},
        {0b10, BellLabel::PsiPlus, pauli::Z()},
        {0b11, BellLabel::PsiMinus, pauli::I()},
    }};
    return table;
}

/// Bob's corrected state summed over outcomes, for any Hermitian resource
/// operator (linear in the resource).
inline ComplexMatrix teleport_linear(const ComplexMatrix& resource, const PureState& input) {
    if (resource.rows() != 4 || resource.cols() != 4) throw std::invalid_argument("teleport: resource must be two-qubit");
    if (input.dim() != 2) throw std::invalid_argument("teleport: input must be a single qubit");
    const ComplexMatrix joint = tensor(input.projector(), resource);
    ComplexMatrix out(2, 2);
    for (const auto& o : bsm_outcomes()) {
        const ComplexMatrix p = tensor(bell(o.label).projector(), pauli::I());
        const ComplexMatrix bob = partial_trace(p * joint * p, {2, 2, 2}, {2});
        out += o.correction * bob * o.correction.adjoint();
    }
    return out;
}

inline DensityOperator teleport_exact(const DensityOperator& resource, const PureState& input) {
    if (product(resource.dims()) != 4 || resource.dims().size() != 2)
        throw std::invalid_argument("teleport: resource must be two-qubit");
    return DensityOperator(teleport_linear(resource.matrix(), input), {2});
}

/// Signed combination of the teleported branch outputs of `qc` applied to `resource`.
inline ComplexMatrix teleport_vrd(const QuasiChannel& qc, const DensityOperator& resource, const PureState& input) {
    ComplexMatrix out(2, 2);
    for (const auto& b : qc.branches()) {
        const DensityOperator branch_state = b.channel.apply(resource);
        out += (qc.cost() * to_double(b.sign) * b.probability) * teleport_linear(branch_state.matrix(), input);
    }
    return out;
}

/// Werner distillation followed by teleportation of `input`.
inline ComplexMatrix teleport_vrd(double xi, const PureState& input) {
    return teleport_vrd(entanglement_vrd(xi), werner(WernerParams{xi}), input);
}

/// Quasi-channel on the input projector whose branches emit Bob's corrected
/// state for each branch of `qc`; used to sample teleported statistics.
inline QuasiChannel teleport_quasi_channel(const QuasiChannel& qc, const DensityOperator& resource, const PureState& input) {
    std::vector<QuasiBranch> branches;
    for (const auto& b : qc.branches())
        branches.push_back(
            {b.sign, b.probability, Channel::replacement(teleport_exact(b.channel.apply(resource), input), 2)});
    return QuasiChannel(std::move(branches), qc.cost());
}

inline QuasiChannel teleport_quasi_channel(double xi, const PureState& input) {
    return teleport_quasi_channel(entanglement_vrd(xi), werner(WernerParams{xi}), input);
}

struct TeleportInput {
    std::string label;
    PureState state;
};

/// H, V, (H + V)/sqrt2, (H + iV)/sqrt2
inline std::vector<TeleportInput> standard_teleport_inputs() {
    const double r = 1.0 / std::sqrt(2.0);
    return {
        {"H", PureState({1.0, 0.0}, {2})},
        {"V", PureState({0.0, 1.0}, {2})},
        {"+", PureState({r, r}, {2})},
        {"R", PureState({Complex{r, 0.0}, Complex{0.0, r}}, {2})},
    };
}

struct TeleportOutcome {
    std::string label;
    DensityOperator output;
    double fidelity;

    TeleportOutcome(std::string l, DensityOperator out, double f) : label(std::move(l)), output(std::move(out)), fidelity(f) {
        if (!(fidelity >= -kStructuralTol && fidelity <= 1.0 + kStructuralTol))
            throw std::invalid_argument("TeleportOutcome: fidelity outside [0, 1]");
    }
};

inline double average_fidelity(const std::vector<TeleportOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("average_fidelity: no outcomes");
    double s = 0.0;
    for (const auto& o : outcomes) s += o.fidelity;
    return s / static_cast<double>(outcomes.size());
}

inline std::vector<TeleportOutcome> teleport_all(const DensityOperator& resource) {
    std::vector<TeleportOutcome> out;
    for (const auto& in : standard_teleport_inputs()) {
        DensityOperator rho = teleport_exact(resource, in.state);
        const double f = fidelity_to_pure(rho, in.state);
        out.emplace_back(in.label, std::move(rho), f);
    }
    return out;
}

inline std::vector<TeleportOutcome> teleport_vrd_all(const QuasiChannel& qc, const DensityOperator& resource) {
    std::vector<TeleportOutcome> out;
    for (const auto& in : standard_teleport_inputs()) {
        DensityOperator rho(teleport_vrd(qc, resource, in.state), {2});
        const double f = fidelity_to_pure(rho, in.state);
        out.emplace_back(in.label, std::move(rho), f);
    }
    return out;
}

inline std::vector<TeleportOutcome> teleport_vrd_all(double xi) {
    return teleport_vrd_all(entanglement_vrd(xi), werner(WernerParams{xi}));
}

/// Best average fidelity reachable with classical communication alone.
inline constexpr double kClassicalTeleportFidelity = 2.0 / 3.0;

}  // namespace vrd
