#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vrd/numcore.hpp"

namespace vrd {

class Channel;

struct UnitaryChannel {
    ComplexMatrix u;
};

/// Discards its input and emits `state`.
struct ReplacementChannel {
    DensityOperator state;
    std::size_t input_dim;
};

/// (1 - p) rho + p I/d
struct DepolarizingChannel {
    double p;
    std::size_t dim;
};

/// Applied front to back.
struct CompositionChannel {
    std::vector<Channel> parts;
};

class Channel {
public:
    using Kind = std::variant<UnitaryChannel, ReplacementChannel, DepolarizingChannel, CompositionChannel>;

    static Channel unitary(ComplexMatrix u) {
        if (!u.is_square()) throw std::invalid_argument("Channel::unitary: matrix not square");
        const double err = (u.adjoint() * u).max_abs_diff(ComplexMatrix::identity(u.rows()));
        if (err > kStructuralTol) {
            std::ostringstream os;
            os << "Channel::unitary: U^dagger U deviates from identity by " << err;
            throw std::invalid_argument(os.str());
        }
        return Channel(UnitaryChannel{std::move(u)});
    }

    static Channel identity(std::size_t dim) { return unitary(ComplexMatrix::identity(dim)); }

    static Channel replacement(DensityOperator sigma, std::optional<std::size_t> input_dim = std::nullopt) {
        const std::size_t in = input_dim.value_or(sigma.dim());
        return Channel(ReplacementChannel{std::move(sigma), in});
    }

    static Channel depolarizing(double p, std::size_t dim) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Channel::depolarizing: p must lie in [0, 1]");
        if (dim == 0) throw std::invalid_argument("Channel::depolarizing: dimension must be positive");
        return Channel(DepolarizingChannel{p, dim});
    }

    static Channel composition(std::vector<Channel> parts) {
        if (parts.empty()) throw std::invalid_argument("Channel::composition: empty part list");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i)
            if (parts[i].output_dim() != parts[i + 1].input_dim())
                throw std::invalid_argument("Channel::composition: dimension mismatch between parts");
        return Channel(CompositionChannel{std::move(parts)});
    }

    const Kind& kind() const noexcept { return kind_; }

    std::size_t input_dim() const {
        return std::visit(
            [](const auto& k) -> std::size_t {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, UnitaryChannel>) return k.u.rows();
                else if constexpr (std::is_same_v<T, ReplacementChannel>) return k.input_dim;
                else if constexpr (std::is_same_v<T, DepolarizingChannel>) return k.dim;
                else return k.parts.front().input_dim();
            },
            kind_);
    }

    std::size_t output_dim() const {
        return std::visit(
            [](const auto& k) -> std::size_t {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, UnitaryChannel>) return k.u.rows();
                else if constexpr (std::is_same_v<T, ReplacementChannel>) return k.state.dim();
                else if constexpr (std::is_same_v<T, DepolarizingChannel>) return k.dim;
                else return k.parts.back().output_dim();
            },
            kind_);
    }

    /// Action on an arbitrary square matrix (linear extension; no physicality checks).
    /// The replacement channel maps X to Tr(X) sigma.
    ComplexMatrix apply_linear(const ComplexMatrix& x) const {
        if (!x.is_square() || x.rows() != input_dim())
            throw std::invalid_argument("Channel::apply: dimension mismatch");
        return std::visit(
            [&](const auto& k) -> ComplexMatrix {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, UnitaryChannel>) {
                    return k.u * x * k.u.adjoint();
                } else if constexpr (std::is_same_v<T, ReplacementChannel>) {
                    return k.state.matrix() * x.trace();
                } else if constexpr (std::is_same_v<T, DepolarizingChannel>) {
                    return (1.0 - k.p) * x + (k.p / static_cast<double>(k.dim)) * ComplexMatrix::identity(k.dim) * x.trace();
                } else {
                    ComplexMatrix y = x;
                    for (const auto& part : k.parts) y = part.apply_linear(y);
                    return y;
                }
            },
            kind_);
    }

    /// Output dims: replacement carries the replacement state's dims, otherwise the input's.
    DensityOperator apply(const DensityOperator& rho) const {
        if (rho.dim() != input_dim()) throw std::invalid_argument("Channel::apply: dimension mismatch");
        return DensityOperator(apply_linear(rho.matrix()), output_dims(rho.dims()));
    }

    /// Maps diagonal inputs to diagonal outputs (checked on every basis projector).
    bool maps_diagonal_to_diagonal(double tol = kStructuralTol) const {
        const std::size_t n = input_dim();
        for (std::size_t i = 0; i < n; ++i) {
            ComplexMatrix e(n, n);
            e(i, i) = 1.0;
            const ComplexMatrix y = apply_linear(e);
            for (std::size_t r = 0; r < y.rows(); ++r)
                for (std::size_t c = 0; c < y.cols(); ++c)
                    if (r != c && std::abs(y(r, c)) > tol) return false;
        }
        return true;
    }

private:
    explicit Channel(Kind k) : kind_(std::move(k)) {}

    Dims output_dims(const Dims& in) const {
        return std::visit(
            [&](const auto& k) -> Dims {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, ReplacementChannel>) return k.state.dims();
                else if constexpr (std::is_same_v<T, CompositionChannel>) {
                    Dims d = in;
                    for (const auto& part : k.parts) d = part.output_dims(d);
                    return d;
                } else return in;
            },
            kind_);
    }

    Kind kind_;
};

enum class Sign : int { plus = 1, minus = -1 };

inline double to_double(Sign s) noexcept { return static_cast<double>(static_cast<int>(s)); }

struct QuasiBranch {
    Sign sign;
    double probability;
    Channel channel;
};

/// C * sum_b sign_b p_b Gamma_b, with sum_b p_b = 1 and C (gamma_+ - gamma_-) = 1.
class QuasiChannel {
public:
    QuasiChannel(std::vector<QuasiBranch> branches, double cost) : branches_(std::move(branches)), cost_(cost) {
        if (branches_.empty()) throw std::invalid_argument("QuasiChannel: no branches");
        if (!(cost_ >= 1.0 - 1e-12)) throw std::invalid_argument("QuasiChannel: cost must be >= 1");
        double total = 0.0, signed_total = 0.0;
        for (const auto& b : branches_) {
            if (!(b.probability >= 0.0)) throw std::invalid_argument("QuasiChannel: negative branch probability");
            total += b.probability;
            signed_total += to_double(b.sign) * b.probability;
            if (b.channel.input_dim() != branches_.front().channel.input_dim() ||
                b.channel.output_dim() != branches_.front().channel.output_dim())
                throw std::invalid_argument("QuasiChannel: branch dimensions differ");
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("QuasiChannel: probabilities do not sum to 1");
        if (std::abs(cost_ * signed_total - 1.0) > 1e-12)
            throw std::invalid_argument("QuasiChannel: C * (p_+ - p_-) != 1");
    }

    static QuasiChannel identity(std::size_t dim) { return QuasiChannel({{Sign::plus, 1.0, Channel::identity(dim)}}, 1.0); }

    const std::vector<QuasiBranch>& branches() const noexcept { return branches_; }
    double cost() const noexcept { return cost_; }
    std::size_t input_dim() const { return branches_.front().channel.input_dim(); }
    std::size_t output_dim() const { return branches_.front().channel.output_dim(); }

    double positive_weight() const {
        double s = 0.0;
        for (const auto& b : branches_)
            if (b.sign == Sign::plus) s += b.probability;
        return s;
    }
    double negative_weight() const { return 1.0 - positive_weight(); }

private:
    std::vector<QuasiBranch> branches_;
    double cost_;
};

inline DensityOperator apply(const Channel& c, const DensityOperator& rho) { return c.apply(rho); }

/// C * sum_b sign_b p_b Gamma_b(rho); Hermitian with unit trace, not necessarily PSD.
inline ComplexMatrix quasi_apply_exact(const QuasiChannel& qc, const DensityOperator& rho) {
    if (rho.dim() != qc.input_dim()) throw std::invalid_argument("quasi_apply_exact: dimension mismatch");
    ComplexMatrix acc(qc.output_dim(), qc.output_dim());
    for (const auto& b : qc.branches()) {
        if (b.probability == 0.0) continue;
        acc += (qc.cost() * to_double(b.sign) * b.probability) * b.channel.apply_linear(rho.matrix());
    }
    return acc;
}

/// Table of the twelve incoherent ququart unitaries used for coherence distillation.
namespace incoherent {

/// |j><k| + |k><j| completed with the identity on the other basis states.
inline ComplexMatrix X(std::size_t j, std::size_t k, std::size_t dim = 4) {
    if (j >= dim || k >= dim || j == k) throw std::invalid_argument("incoherent::X: bad indices");
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m(j, j) = 0.0;
    m(k, k) = 0.0;
    m(j, k) = 1.0;
    m(k, j) = 1.0;
    return m;
}

/// |j><j| - |k><k| completed with +1 on the other basis states.
inline ComplexMatrix Z(std::size_t j, std::size_t k, std::size_t dim = 4) {
    if (j >= dim || k >= dim || j == k) throw std::invalid_argument("incoherent::Z: bad indices");
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m(k, k) = -1.0;
    return m;
}

/// Unitary for Gamma_sign^k, k in 1..6.
inline ComplexMatrix unitary(int k, Sign sign) {
    const ComplexMatrix x0213 = X(0, 2) * X(1, 3);
    if (sign == Sign::plus) {
        switch (k) {
            case 1: return ComplexMatrix::identity(4);
            case 2: return X(1, 2);
            case 3: return X(1, 3);
            case 4: return X(0, 2);
            case 5: return X(0, 3);
            case 6: return x0213;
        }
    } else {
        switch (k) {
            case 1: return Z(0, 1);
            case 2: return Z(0, 2) * X(1, 2);
            case 3: return Z(0, 3) * X(1, 3);
            case 4: return Z(1, 2) * X(0, 2);
            case 5: return Z(1, 3) * X(0, 3);
            case 6: return Z(2, 3) * x0213;
        }
    }
    throw std::invalid_argument("incoherent::unitary: k must lie in 1..6");
}

}  // namespace incoherent

inline Channel incoherent_op(int k, Sign sign) { return Channel::unitary(incoherent::unitary(k, sign)); }

}  // namespace vrd
