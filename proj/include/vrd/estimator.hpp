#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "vrd/channels.hpp"
#include "vrd/numcore.hpp"
#include "vrd/rng.hpp"

namespace vrd {

class Observable {
public:
    Observable(ComplexMatrix m, std::string name) : m_(std::move(m)), name_(std::move(name)) {
        if (!m_.is_hermitian(kStructuralTol)) throw std::invalid_argument("Observable: matrix not Hermitian");
        eig_ = hermitian_eig(m_);
        bound_ = 0.0;
        for (double v : eig_.values) bound_ = std::max(bound_, std::abs(v));
    }

    static Observable projector(const PureState& psi, std::string name) { return Observable(psi.projector(), std::move(name)); }

    const ComplexMatrix& matrix() const noexcept { return m_; }
    const std::string& name() const noexcept { return name_; }
    const EigenDecomposition& spectrum() const noexcept { return eig_; }
    /// Operator norm.
    double bound() const noexcept { return bound_; }
    std::size_t dim() const noexcept { return m_.rows(); }

private:
    ComplexMatrix m_;
    std::string name_;
    EigenDecomposition eig_;
    double bound_;
};

enum class SamplingMode { expectation_oracle, projective_sampling };

struct SamplingPlan {
    std::uint64_t shots;
    std::uint64_t seed;
    SamplingMode mode = SamplingMode::projective_sampling;
    unsigned workers = 1;
};

struct EstimateResult {
    double mean;
    double std_error;
    std::uint64_t shots;
    double cost;
    std::uint64_t seed;
};

namespace detail {

/// Draws index k with probability weights[k] / sum, by inverse CDF on u in [0,1).
inline std::size_t sample_index(const std::vector<double>& cdf, double u) {
    const double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const auto idx = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    return std::min(idx, cdf.size() - 1);
}

inline std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += std::max(w[i], 0.0);
        cdf[i] = acc;
    }
    return cdf;
}

/// Born probabilities of the spectral projectors of `obs` on `rho`.
inline std::vector<double> born_probabilities(const ComplexMatrix& rho, const EigenDecomposition& obs) {
    const std::size_t n = rho.rows();
    std::vector<double> p(obs.values.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += std::conj(obs.vectors(i, k)) * rho(i, j) * obs.vectors(j, k);
        p[k] = std::max(s.real(), 0.0);
    }
    return p;
}

/// Runs `body(begin, end, counts)` over shot ranges, possibly on several threads,
/// and sums the integer tallies; the result does not depend on the partition.
template <typename Body>
std::vector<std::uint64_t> tally_shots(std::uint64_t shots, unsigned workers, std::size_t bins, Body body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(shots, 64))));
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(bins, 0));
    if (workers == 1) {
        body(std::uint64_t{0}, shots, partial[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (shots + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t b = std::min<std::uint64_t>(shots, w * chunk);
            const std::uint64_t e = std::min<std::uint64_t>(shots, b + chunk);
            pool.emplace_back([&, w, b, e] { body(b, e, partial[w]); });
        }
        for (auto& t : pool) t.join();
    }
    std::vector<std::uint64_t> total(bins, 0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < bins; ++i) total[i] += p[i];
    return total;
}

}  // namespace detail

/// Monte-Carlo estimate of Tr[O Gamma~(rho)]: each shot picks a branch with its
/// probability, obtains a value (exact branch expectation, or a Born-sampled
/// eigenvalue of O) and contributes C * sign * value.
inline EstimateResult estimate(const QuasiChannel& qc, const DensityOperator& rho, const Observable& obs,
                               const SamplingPlan& plan) {
    if (plan.shots == 0) throw std::invalid_argument("estimate: shots must be positive");
    if (rho.dim() != qc.input_dim() || obs.dim() != qc.output_dim())
        throw std::invalid_argument("estimate: dimension mismatch");

    const auto& branches = qc.branches();
    std::vector<double> branch_w;
    for (const auto& b : branches) branch_w.push_back(b.probability);
    const auto branch_cdf = detail::cumulative(branch_w);

    // Every shot falls into one (branch, value) category; values per category are fixed.
    std::vector<double> category_value;
    std::vector<std::size_t> category_offset;
    std::vector<std::vector<double>> outcome_cdf;
    for (const auto& b : branches) {
        const ComplexMatrix out = b.channel.apply_linear(rho.matrix());
        const double scale = qc.cost() * to_double(b.sign);
        category_offset.push_back(category_value.size());
        if (plan.mode == SamplingMode::expectation_oracle) {
            Complex s{0.0, 0.0};
            for (std::size_t i = 0; i < out.rows(); ++i)
                for (std::size_t j = 0; j < out.cols(); ++j) s += out(i, j) * obs.matrix()(j, i);
            category_value.push_back(scale * s.real());
            outcome_cdf.emplace_back();
        } else {
            for (double v : obs.spectrum().values) category_value.push_back(scale * v);
            outcome_cdf.push_back(detail::cumulative(detail::born_probabilities(out, obs.spectrum())));
        }
    }

    const CounterRng rng(plan.seed);
    const auto counts = detail::tally_shots(
        plan.shots, plan.workers, category_value.size(),
        [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& tally) {
            for (std::uint64_t shot = begin; shot < end; ++shot) {
                const std::size_t b = detail::sample_index(branch_cdf, rng.uniform(shot, 0));
                std::size_t cat = category_offset[b];
                if (plan.mode == SamplingMode::projective_sampling)
                    cat += detail::sample_index(outcome_cdf[b], rng.uniform(shot, 1));
                ++tally[cat];
            }
        });

    const double n = static_cast<double>(plan.shots);
    double sum = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) sum += static_cast<double>(counts[c]) * category_value[c];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const double d = category_value[c] - mean;
        ss += static_cast<double>(counts[c]) * d * d;
    }
    const double var = plan.shots > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), plan.shots, qc.cost(), plan.seed};
}

/// Real-valued Hoeffding sample complexity 2 (C |O|)^2 ln(2/delta) / eps^2.
inline double hoeffding_sample_bound(double cost, double obs_bound, double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("shots_for_accuracy: epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("shots_for_accuracy: delta must lie in (0, 1)");
    if (!(cost >= 1.0)) throw std::invalid_argument("shots_for_accuracy: cost must be >= 1");
    if (!(obs_bound > 0.0)) throw std::invalid_argument("shots_for_accuracy: observable bound must be positive");
    const double range = cost * obs_bound;
    return 2.0 * range * range * std::log(2.0 / delta) / (epsilon * epsilon);
}

/// Smallest N with 2 exp(-N eps^2 / (2 (C |O|)^2)) <= delta, at least one shot.
inline std::uint64_t shots_for_accuracy(double cost, double obs_bound, double epsilon, double delta) {
    const double n = hoeffding_sample_bound(cost, obs_bound, epsilon, delta);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(n)));
}

enum class PauliLabel { X, Y, Z };

inline char to_char(PauliLabel p) {
    switch (p) {
        case PauliLabel::X: return 'X';
        case PauliLabel::Y: return 'Y';
        case PauliLabel::Z: return 'Z';
    }
    return '?';
}

inline PauliLabel parse_pauli(char c) {
    switch (c) {
        case 'X': return PauliLabel::X;
        case 'Y': return PauliLabel::Y;
        case 'Z': return PauliLabel::Z;
        default: throw std::invalid_argument(std::string("invalid Pauli label '") + c + "'");
    }
}

/// Eigenvector of a single-qubit Pauli for eigenvalue +1 (outcome 0) or -1 (outcome 1).
inline std::array<Complex, 2> pauli_eigenvector(PauliLabel p, int outcome) {
    const double r = 1.0 / std::sqrt(2.0);
    const double s = outcome == 0 ? 1.0 : -1.0;
    switch (p) {
        case PauliLabel::X: return {Complex{r, 0.0}, Complex{s * r, 0.0}};
        case PauliLabel::Y: return {Complex{r, 0.0}, Complex{0.0, s * r}};
        case PauliLabel::Z: return outcome == 0 ? std::array<Complex, 2>{1.0, 0.0} : std::array<Complex, 2>{0.0, 1.0};
    }
    return {};
}

using PauliSetting = std::pair<PauliLabel, PauliLabel>;

/// Outcome bins in order (+,+), (+,-), (-,+), (-,-); the first sign belongs to subsystem 0.
using OutcomeCounts = std::array<std::uint64_t, 4>;

/// Joint Born probabilities of a two-qubit product Pauli measurement, in bin order.
inline std::array<double, 4> pauli_setting_probabilities(const ComplexMatrix& rho, PauliSetting setting) {
    if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("Pauli setting: state must be two-qubit");
    std::array<double, 4> p{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto va = pauli_eigenvector(setting.first, a);
            const auto vb = pauli_eigenvector(setting.second, b);
            const auto v = tensor(std::span<const Complex>(va), std::span<const Complex>(vb));
            Complex s{0.0, 0.0};
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) s += std::conj(v[i]) * rho(i, j) * v[j];
            p[static_cast<std::size_t>(2 * a + b)] = std::max(s.real(), 0.0);
        }
    return p;
}

/// Multinomial sample of a product Pauli measurement on a two-qubit state.
inline OutcomeCounts measure_pauli_setting(const DensityOperator& rho, PauliSetting setting, std::uint64_t shots,
                                           std::uint64_t seed) {
    if (product(rho.dims()) != 4) throw std::invalid_argument("measure_pauli_setting: state must be two-qubit");
    const auto p = pauli_setting_probabilities(rho.matrix(), setting);
    const auto cdf = detail::cumulative(std::vector<double>(p.begin(), p.end()));
    const CounterRng rng(seed);
    OutcomeCounts c{};
    for (std::uint64_t shot = 0; shot < shots; ++shot) ++c[detail::sample_index(cdf, rng.uniform(shot, 0))];
    return c;
}

inline OutcomeCounts measure_pauli_setting(const DensityOperator& rho, char first, char second, std::uint64_t shots,
                                           std::uint64_t seed) {
    return measure_pauli_setting(rho, {parse_pauli(first), parse_pauli(second)}, shots, seed);
}

}  // namespace vrd
