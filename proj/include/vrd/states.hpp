#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vrd/numcore.hpp"

namespace vrd {

/// Single-photon ququart: |0>=|H,v>, |1>=|V,v>, |2>=|H,h>, |3>=|V,h>.
/// As a two-qubit register the path is subsystem 0 (v=0, h=1) and the
/// polarization subsystem 1 (H=0, V=1), so index = 2 * path + polarization.
namespace ququart {

enum class Polarization { H = 0, V = 1 };
enum class Path { v = 0, h = 1 };

inline constexpr std::size_t index(Polarization pol, Path path) {
    return 2 * static_cast<std::size_t>(path) + static_cast<std::size_t>(pol);
}

inline const Dims kDims{2, 2};

}  // namespace ququart

enum class BellLabel { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline BellLabel parse_bell_label(std::string_view s) {
    if (s == "Phi+" || s == "phi+") return BellLabel::PhiPlus;
    if (s == "Phi-" || s == "phi-") return BellLabel::PhiMinus;
    if (s == "Psi+" || s == "psi+") return BellLabel::PsiPlus;
    if (s == "Psi-" || s == "psi-") return BellLabel::PsiMinus;
    throw std::invalid_argument("unknown Bell label '" + std::string(s) + "'");
}

class WernerParams {
public:
    explicit WernerParams(double xi) : xi_(xi) {
        if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("WernerParams: xi must lie in [0, 1]");
    }
    double xi() const noexcept { return xi_; }

private:
    double xi_;
};

inline PureState basis_state(std::size_t index, Dims dims) {
    const std::size_t n = product(dims);
    if (index >= n) throw std::out_of_range("basis_state: index out of range");
    std::vector<Complex> a(n, Complex{0.0, 0.0});
    a[index] = 1.0;
    return PureState(std::move(a), std::move(dims));
}

/// Uniform superposition of the d computational basis states.
inline PureState mcs(std::size_t d) {
    if (d == 0) throw std::invalid_argument("mcs: dimension must be >= 1");
    return PureState(std::vector<Complex>(d, Complex{1.0 / std::sqrt(static_cast<double>(d)), 0.0}), {d});
}

/// mcs(4) carrying the ququart's path x polarization dims.
inline PureState mcs_ququart() { return PureState(std::vector<Complex>(4, Complex{0.5, 0.0}), ququart::kDims); }

/// (|0> + |1>)/sqrt(2) embedded in the ququart.
inline PureState psi_plus_1() {
    const double r = 1.0 / std::sqrt(2.0);
    return PureState({r, r, 0.0, 0.0}, ququart::kDims);
}

inline PureState bell(BellLabel label) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (label) {
        case BellLabel::PhiPlus: return PureState({r, 0.0, 0.0, r}, {2, 2});
        case BellLabel::PhiMinus: return PureState({r, 0.0, 0.0, -r}, {2, 2});
        case BellLabel::PsiPlus: return PureState({0.0, r, r, 0.0}, {2, 2});
        case BellLabel::PsiMinus: return PureState({0.0, r, -r, 0.0}, {2, 2});
    }
    throw std::invalid_argument("bell: unknown label");
}

inline DensityOperator maximally_mixed(Dims dims) {
    const std::size_t n = product(dims);
    return DensityOperator(ComplexMatrix::identity(n) * Complex{1.0 / static_cast<double>(n), 0.0}, std::move(dims));
}

/// xi Psi- + (1 - xi) I/4
inline DensityOperator werner(WernerParams p) {
    const double xi = p.xi();
    ComplexMatrix m = xi * bell(BellLabel::PsiMinus).projector() + ((1.0 - xi) / 4.0) * ComplexMatrix::identity(4);
    return DensityOperator(std::move(m), {2, 2});
}

struct WeightedPureState {
    double weight;
    PureState state;
};

/// The four-term pure-state decomposition of the Werner family; zero-weight terms are dropped.
inline std::vector<WeightedPureState> werner_mixture(WernerParams p) {
    const double xi = p.xi();
    const double singlet = (1.0 + 3.0 * xi) / 4.0;
    const double other = (1.0 - xi) / 4.0;
    std::vector<WeightedPureState> out;
    out.push_back({singlet, bell(BellLabel::PsiMinus)});
    if (other > 0.0) {
        out.push_back({other, bell(BellLabel::PsiPlus)});
        out.push_back({other, basis_state(0, {2, 2})});  // |HH>
        out.push_back({other, basis_state(3, {2, 2})});  // |VV>
    }
    return out;
}

/// (I - Psi-)/3, the output of the negative-branch replacement channel.
inline DensityOperator eta_state() {
    ComplexMatrix m = ComplexMatrix::identity(4) - bell(BellLabel::PsiMinus).projector();
    m *= Complex{1.0 / 3.0, 0.0};
    return DensityOperator(std::move(m), {2, 2});
}

}  // namespace vrd
