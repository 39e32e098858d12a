#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "vrd/estimator.hpp"
#include "vrd/numcore.hpp"
#include "vrd/protocols.hpp"

namespace vrd {

struct MetricReport {
    std::string name;
    double value;
    std::string convention;
};

/// <target| rho |target>
inline double fidelity_to_pure(const ComplexMatrix& rho, const PureState& target) {
    if (rho.rows() != target.dim() || rho.cols() != target.dim())
        throw std::invalid_argument("fidelity_to_pure: dimension mismatch");
    const auto a = target.amplitudes();
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[i]) * rho(i, j) * a[j];
    return s.real();
}

inline double fidelity_to_pure(const DensityOperator& rho, const PureState& target) {
    return fidelity_to_pure(rho.matrix(), target);
}

namespace detail {

/// -sum p log2 p with 0 log 0 = 0; tiny negative round-off is clamped.
inline double shannon_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

}  // namespace detail

inline double von_neumann_entropy(const DensityOperator& rho) {
    return detail::shannon_bits(hermitian_eig(rho.matrix()).values);
}

/// Relative entropy of coherence S(diag rho) - S(rho), in bits.
inline double rel_entropy_coherence(const DensityOperator& rho) {
    std::vector<double> diag(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i) diag[i] = rho.matrix()(i, i).real();
    return detail::shannon_bits(diag) - von_neumann_entropy(rho);
}

enum class NegativityConvention {
    trace_norm,  // (|rho^T_A|_1 - 1)/2 >= 0
    signed_sum,  // sum of negative eigenvalues of rho^T_A, <= 0
};

inline const char* convention_name(NegativityConvention c) {
    return c == NegativityConvention::trace_norm ? "trace_norm" : "signed";
}

/// Partial transpose on subsystem 0 of a bipartite state.
inline double negativity(const DensityOperator& rho, NegativityConvention convention) {
    if (rho.dims().size() != 2) throw std::invalid_argument("negativity: state must be bipartite");
    const ComplexMatrix pt = partial_transpose(rho, 0);
    if (convention == NegativityConvention::trace_norm) return (trace_norm(pt) - 1.0) / 2.0;
    double s = 0.0;
    for (double v : hermitian_eig(pt).values)
        if (v < 0.0) s += v;
    return s;
}

inline constexpr double kQfiThreshold = 1e-12;

/// 2 sum_{k,l} (l_k - l_l)^2 / (l_k + l_l) |<k|A|l>|^2 over pairs with l_k + l_l > threshold.
inline double qfi(const DensityOperator& rho, const Observable& generator) {
    if (generator.dim() != rho.dim()) throw std::invalid_argument("qfi: dimension mismatch");
    const auto e = hermitian_eig(rho.matrix());
    const std::size_t n = rho.dim();
    const ComplexMatrix a = e.vectors.adjoint() * generator.matrix() * e.vectors;
    double f = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            const double sum = e.values[k] + e.values[l];
            if (sum <= kQfiThreshold) continue;
            const double diff = e.values[k] - e.values[l];
            f += diff * diff / sum * std::norm(a(k, l));
        }
    return 2.0 * f;
}

/// Z (x) I + I (x) Z
inline Observable collective_z() {
    return Observable(tensor(pauli::Z(), pauli::I()) + tensor(pauli::I(), pauli::Z()), "Z_A+Z_B");
}

/// xi Phi+ + (1 - xi) I/4
inline DensityOperator noisy_phi_plus(double xi) {
    WernerParams{xi};
    ComplexMatrix m = xi * bell(BellLabel::PhiPlus).projector() + ((1.0 - xi) / 4.0) * ComplexMatrix::identity(4);
    return DensityOperator(std::move(m), {2, 2});
}

/// 32 xi^2 / (1 + xi)
inline double qfi_noisy_phi_plus_closed_form(double xi) { return 32.0 * xi * xi / (1.0 + xi); }

struct CrbCoefficients {
    double noisy;    // sqrt((1 + xi) / (32 xi^2)); +inf at xi = 0
    double virtual_; // C(xi) / 4 = sqrt(1 / (V F_Q[pure])) with F_Q[pure] = 16
};

/// Cramer-Rao prefactors (multiply by 1/sqrt(m)) for the noisy state and for the
/// virtually distilled state paying the one-shot rate 1/C^2. For xi >= 1/3 the
/// virtual value is (7 - 3 xi) / (4 (1 + 3 xi)); below it the cost saturates at 3.
inline CrbCoefficients crb_coefficients(double xi) {
    WernerParams{xi};
    const double noisy = xi == 0.0 ? std::numeric_limits<double>::infinity() : std::sqrt((1.0 + xi) / (32.0 * xi * xi));
    const double virt = std::sqrt(1.0 / (one_shot_rate(vrd_cost(xi)) * 16.0));
    return {noisy, virt};
}

}  // namespace vrd
