#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrd/channels.hpp"
#include "vrd/states.hpp"

namespace vrd {

inline constexpr double kSeparableWernerThreshold = 1.0 / 3.0;

/// Cost of the singlet protocol: min{(7 - 3 xi)/(1 + 3 xi), 3}.
inline double vrd_cost(double xi) {
    WernerParams{xi};
    return std::min((7.0 - 3.0 * xi) / (1.0 + 3.0 * xi), 3.0);
}

/// m / C^2
inline double one_shot_rate(double cost, int m = 1) {
    if (!(cost >= 1.0)) throw std::invalid_argument("one_shot_rate: cost must be >= 1");
    if (m < 1) throw std::invalid_argument("one_shot_rate: m must be >= 1");
    return static_cast<double>(m) / (cost * cost);
}

/// Twelve equiprobable-per-sign incoherent unitaries turning (|0>+|1>)/sqrt2 into
/// the four-level maximally coherent state; p_+ = 2/3, p_- = 1/3, C = 3.
inline QuasiChannel coherence_vrd() {
    constexpr double p_plus = 2.0 / 3.0;
    constexpr double p_minus = 1.0 / 3.0;
    std::vector<QuasiBranch> branches;
    branches.reserve(12);
    for (int k = 1; k <= 6; ++k) branches.push_back({Sign::plus, p_plus / 6.0, incoherent_op(k, Sign::plus)});
    for (int k = 1; k <= 6; ++k) branches.push_back({Sign::minus, p_minus / 6.0, incoherent_op(k, Sign::minus)});
    return QuasiChannel(std::move(branches), 3.0);
}

/// Single-copy singlet distillation from a Werner input. Below the separability
/// threshold the positive branch prepares the xi = 1/3 Werner state instead of
/// passing the input through, so the cost saturates at 3.
inline QuasiChannel entanglement_vrd(double xi) {
    WernerParams{xi};
    const double xe = std::max(xi, kSeparableWernerThreshold);
    const double denom = 7.0 - 3.0 * xe;
    const double p_plus = 4.0 / denom;
    const double p_minus = (3.0 - 3.0 * xe) / denom;
    const double cost = denom / (1.0 + 3.0 * xe);

    Channel positive = xi < kSeparableWernerThreshold
                           ? Channel::replacement(werner(WernerParams{kSeparableWernerThreshold}))
                           : Channel::identity(4);
    std::vector<QuasiBranch> branches;
    branches.push_back({Sign::plus, p_plus, std::move(positive)});
    if (p_minus > 0.0) branches.push_back({Sign::minus, p_minus, Channel::replacement(eta_state())});
    return QuasiChannel(std::move(branches), cost);
}

enum class ProtocolName { coherence_2to4, entanglement_werner };

struct ProtocolSpec {
    ProtocolName name;
    double xi;  // 1 for the coherence protocol
    QuasiChannel channel;
    PureState target;

    double cost() const { return channel.cost(); }

    static ProtocolSpec coherence() {
        return {ProtocolName::coherence_2to4, 1.0, coherence_vrd(), mcs_ququart()};
    }

    static ProtocolSpec entanglement(double xi) {
        return {ProtocolName::entanglement_werner, xi, entanglement_vrd(xi), bell(BellLabel::PsiMinus)};
    }
};

}  // namespace vrd
