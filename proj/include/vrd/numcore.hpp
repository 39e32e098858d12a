#pragma once

// Dense complex linear algebra for small Hilbert spaces (dimension <= 16).
//
// Index convention for composite systems: subsystem 0 is the most
// significant digit of the composite basis index. For dims {d0, d1, ...}
// the basis state |i0 i1 ...> has index ((i0 * d1) + i1) * d2 + ...

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vrd {

using Complex = std::complex<double>;
using Dims = std::vector<std::size_t>;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kSpectralTol = 1e-9;
inline constexpr double kEigInputTol = 1e-8;
inline constexpr double kMinEigenvalueTol = 1e-9;
inline constexpr double kPureNormTol = 1e-12;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
        }
        for (const auto& z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw std::invalid_argument("ComplexMatrix: non-finite entry");
            }
        }
    }

    /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        if (rows_ == 0 || cols_ == 0) {
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        }
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        std::vector<double> v(values);
        return diagonal(std::span<const double>(v));
    }

    /// |a><b|
    static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b) {
        ComplexMatrix m(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    std::span<const Complex> data() const noexcept { return data_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    Complex trace() const {
        require_square("trace");
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    std::vector<Complex> apply(std::span<const Complex> v) const {
        if (v.size() != cols_) throw std::invalid_argument("ComplexMatrix::apply: size mismatch");
        std::vector<Complex> out(rows_, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex{s, 0.0}; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("ComplexMatrix: product shape mismatch");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    /// Largest |a_ij - b_ij|.
    double max_abs_diff(const ComplexMatrix& o) const {
        require_same_shape(o, "max_abs_diff");
        double m = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - o.data_[i]));
        return m;
    }

    /// Largest |a_ij - conj(a_ji)|.
    double max_asymmetry() const {
        require_square("max_asymmetry");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool is_hermitian(double tol = kStructuralTol) const { return is_square() && max_asymmetry() <= tol; }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    bool operator==(const ComplexMatrix&) const = default;

private:
    void require_square(const char* what) const {
        if (!is_square()) throw std::invalid_argument(std::string("ComplexMatrix::") + what + ": matrix not square");
    }
    void require_same_shape(const ComplexMatrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("ComplexMatrix::") + what + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

inline std::size_t product(const Dims& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

/// Kronecker product; the first factor is the most significant index digit.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

inline std::vector<Complex> tensor(std::span<const Complex> a, std::span<const Complex> b) {
    std::vector<Complex> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(x * y);
    return out;
}

struct EigenDecomposition {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square()) throw std::invalid_argument("hermitian_eig: matrix not square");
    const double asym = m.max_asymmetry();
    if (asym > kEigInputTol) {
        std::ostringstream os;
        os << "hermitian_eig: matrix not Hermitian (max asymmetry " << asym << ")";
        throw std::invalid_argument(os.str());
    }
    const std::size_t n = m.rows();

    // symmetrize so the rotations act on an exactly Hermitian matrix
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = std::max(a.frobenius_norm(), 1e-300);
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-300) continue;
                const Complex phase = a(p, q) / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // J = diag-phase * real rotation; only the (p,q) block differs from I.
                const Complex jpp = c;
                const Complex jpq = s;
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // A <- A J
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // A <- J^dagger A
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {  // V <- V J
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

/// V diag(values) V^dagger
inline ComplexMatrix reconstruct(const EigenDecomposition& e) {
    const std::size_t n = e.values.size();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vik = e.vectors(i, k) * e.values[k];
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(e.vectors(j, k));
        }
    return out;
}

/// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
    if (!m.is_square()) throw std::invalid_argument("trace_norm: matrix not square");
    if (m.is_hermitian(kEigInputTol)) {
        const auto e = hermitian_eig(m);
        double s = 0.0;
        for (double x : e.values) s += std::abs(x);
        return s;
    }
    // singular values are square roots of the eigenvalues of m^dagger m
    const auto e = hermitian_eig(m.adjoint() * m);
    double s = 0.0;
    for (double x : e.values) s += std::sqrt(std::max(x, 0.0));
    return s;
}

class PureState {
public:
    PureState(std::vector<Complex> amplitudes, Dims dims) : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
        if (amps_.empty()) throw std::invalid_argument("PureState: empty amplitude vector");
        if (dims_.empty()) dims_ = {amps_.size()};
        if (product(dims_) != amps_.size())
            throw std::invalid_argument("PureState: dims product does not match amplitude count");
        double norm2 = 0.0;
        for (const auto& z : amps_) norm2 += std::norm(z);
        if (std::abs(std::sqrt(norm2) - 1.0) > kPureNormTol)
            throw std::invalid_argument("PureState: amplitude vector not normalized");
    }

    explicit PureState(std::vector<Complex> amplitudes) : PureState(amplitudes, {amplitudes.size()}) {}

    /// Normalizes, then fixes the global phase so the first nonzero amplitude is real positive.
    static PureState normalized(std::vector<Complex> amplitudes, Dims dims) {
        double norm2 = 0.0;
        for (const auto& z : amplitudes) norm2 += std::norm(z);
        if (norm2 <= 0.0) throw std::invalid_argument("PureState::normalized: zero vector");
        const double inv = 1.0 / std::sqrt(norm2);
        Complex phase{1.0, 0.0};
        for (const auto& z : amplitudes)
            if (std::abs(z) > 1e-14) {
                phase = std::conj(z) / std::abs(z);
                break;
            }
        for (auto& z : amplitudes) z *= inv * phase;
        return PureState(std::move(amplitudes), std::move(dims));
    }

    const std::vector<Complex>& amplitudes() const& noexcept { return amps_; }
    std::vector<Complex> amplitudes() && noexcept { return std::move(amps_); }
    const Dims& dims() const noexcept { return dims_; }
    std::size_t dim() const noexcept { return amps_.size(); }

    ComplexMatrix projector() const { return ComplexMatrix::outer(amps_, amps_); }

    Complex inner(const PureState& o) const {
        if (o.dim() != dim()) throw std::invalid_argument("PureState::inner: dimension mismatch");
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * o.amps_[i];
        return s;
    }

    /// |<this|o>|^2, i.e. equality up to global phase when 1.
    double overlap(const PureState& o) const { return std::norm(inner(o)); }

private:
    std::vector<Complex> amps_;
    Dims dims_;
};

class DensityOperator {
public:
    DensityOperator(ComplexMatrix matrix, Dims dims) : m_(std::move(matrix)), dims_(std::move(dims)) {
        if (!m_.is_square()) throw std::invalid_argument("DensityOperator: matrix not square");
        if (dims_.empty()) dims_ = {m_.rows()};
        if (product(dims_) != m_.rows())
            throw std::invalid_argument("DensityOperator: dims product does not match matrix dimension");
        const double asym = m_.max_asymmetry();
        if (asym > kStructuralTol) {
            std::ostringstream os;
            os << "DensityOperator: not Hermitian (max asymmetry " << asym << ")";
            throw std::invalid_argument(os.str());
        }
        const Complex tr = m_.trace();
        if (std::abs(tr - Complex{1.0, 0.0}) > kStructuralTol) {
            std::ostringstream os;
            os << "DensityOperator: trace " << tr.real() << " != 1";
            throw std::invalid_argument(os.str());
        }
        const double lmin = hermitian_eig(m_).values.back();
        if (lmin < -kMinEigenvalueTol) {
            std::ostringstream os;
            os << "DensityOperator: negative eigenvalue " << lmin;
            throw std::invalid_argument(os.str());
        }
    }

    explicit DensityOperator(ComplexMatrix matrix) : DensityOperator(matrix, {matrix.rows()}) {}

    explicit DensityOperator(const PureState& psi) : DensityOperator(psi.projector(), psi.dims()) {}

    const ComplexMatrix& matrix() const noexcept { return m_; }
    const Dims& dims() const noexcept { return dims_; }
    std::size_t dim() const noexcept { return m_.rows(); }

    /// Tr(rho O) for Hermitian O; imaginary residue dropped.
    double expectation(const ComplexMatrix& o) const {
        if (o.rows() != dim() || o.cols() != dim())
            throw std::invalid_argument("DensityOperator::expectation: dimension mismatch");
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j) s += m_(i, j) * o(j, i);
        return s.real();
    }

private:
    ComplexMatrix m_;
    Dims dims_;
};

namespace detail {

inline std::vector<std::size_t> digits(std::size_t index, const Dims& dims) {
    std::vector<std::size_t> d(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        d[k] = index % dims[k];
        index /= dims[k];
    }
    return d;
}

inline std::size_t index_of(std::span<const std::size_t> digits, const Dims& dims) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
    return idx;
}

}  // namespace detail

/// Transpose on one tensor factor, given as a raw matrix over `dims`.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, const Dims& dims, std::size_t subsystem) {
    if (subsystem >= dims.size()) throw std::out_of_range("partial_transpose: subsystem index out of range");
    if (!m.is_square() || product(dims) != m.rows())
        throw std::invalid_argument("partial_transpose: dims do not match matrix");
    const std::size_t n = m.rows();
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto di = detail::digits(i, dims);
        for (std::size_t j = 0; j < n; ++j) {
            auto dj = detail::digits(j, dims);
            std::swap(di[subsystem], dj[subsystem]);
            out(detail::index_of(di, dims), detail::index_of(dj, dims)) = m(i, j);
            std::swap(di[subsystem], dj[subsystem]);
        }
    }
    return out;
}

inline ComplexMatrix partial_transpose(const DensityOperator& rho, std::size_t subsystem) {
    return partial_transpose(rho.matrix(), rho.dims(), subsystem);
}

/// Trace out every subsystem not listed in `keep`; kept factors retain their order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const Dims& dims, std::vector<std::size_t> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (auto k : keep)
        if (k >= dims.size()) throw std::out_of_range("partial_trace: subsystem index out of range");
    if (!m.is_square() || product(dims) != m.rows())
        throw std::invalid_argument("partial_trace: dims do not match matrix");

    Dims kept_dims;
    for (auto k : keep) kept_dims.push_back(dims[k]);
    std::vector<bool> is_kept(dims.size(), false);
    for (auto k : keep) is_kept[k] = true;

    const std::size_t n = m.rows();
    ComplexMatrix out(product(kept_dims), product(kept_dims));
    std::vector<std::size_t> ki(keep.size()), kj(keep.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto di = detail::digits(i, dims);
        for (std::size_t j = 0; j < n; ++j) {
            const auto dj = detail::digits(j, dims);
            bool traced_equal = true;
            for (std::size_t s = 0; s < dims.size() && traced_equal; ++s)
                if (!is_kept[s] && di[s] != dj[s]) traced_equal = false;
            if (!traced_equal) continue;
            for (std::size_t s = 0; s < keep.size(); ++s) {
                ki[s] = di[keep[s]];
                kj[s] = dj[keep[s]];
            }
            out(detail::index_of(ki, kept_dims), detail::index_of(kj, kept_dims)) += m(i, j);
        }
    }
    return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::vector<std::size_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    Dims kept;
    for (auto k : sorted) {
        if (k >= rho.dims().size()) throw std::out_of_range("partial_trace: subsystem index out of range");
        kept.push_back(rho.dims()[k]);
    }
    return DensityOperator(partial_trace(rho.matrix(), rho.dims(), sorted), kept);
}

namespace pauli {

inline ComplexMatrix I() { return ComplexMatrix::identity(2); }
inline ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix Y() { return {{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}}; }
inline ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

/// 'I', 'X', 'Y' or 'Z'.
inline ComplexMatrix from_label(char label) {
    switch (label) {
        case 'I': return I();
        case 'X': return X();
        case 'Y': return Y();
        case 'Z': return Z();
        default: throw std::invalid_argument(std::string("unknown Pauli label '") + label + "'");
    }
}

}  // namespace pauli

}  // namespace vrd
