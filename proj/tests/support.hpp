#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "vrd/numcore.hpp"

namespace vrd::test {

using Gen = std::mt19937_64;

inline std::vector<Complex> random_vector(std::size_t n, Gen& g) {
    std::normal_distribution<double> nd;
    std::vector<Complex> v(n);
    for (auto& x : v) x = {nd(g), nd(g)};
    return v;
}

inline PureState random_pure(const Dims& dims, Gen& g) {
    return PureState::normalized(random_vector(product(dims), g), dims);
}

/// Ginibre ensemble with rank `rank` (full rank by default).
inline DensityOperator random_density(const Dims& dims, Gen& g, std::size_t rank = 0) {
    const std::size_t n = product(dims);
    if (rank == 0) rank = n;
    ComplexMatrix a(n, rank);
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rank; ++j) a(i, j) = {nd(g), nd(g)};
    ComplexMatrix m = a * a.adjoint();
    m *= Complex{1.0 / m.trace().real(), 0.0};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m(j, i) = std::conj(m(i, j));
    return DensityOperator(std::move(m), dims);
}

inline ComplexMatrix random_hermitian(std::size_t n, Gen& g, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = nd(g);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = {nd(g), nd(g)};
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

/// QR of a Ginibre matrix by modified Gram-Schmidt.
inline ComplexMatrix random_unitary(std::size_t n, Gen& g) {
    std::vector<std::vector<Complex>> cols;
    for (std::size_t c = 0; c < n; ++c) {
        auto v = random_vector(n, g);
        for (const auto& q : cols) {
            Complex d{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) d += std::conj(q[i]) * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * q[i];
        }
        double nrm = 0.0;
        for (const auto& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        for (auto& x : v) x /= nrm;
        cols.push_back(std::move(v));
    }
    ComplexMatrix u(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) u(r, c) = cols[c][r];
    return u;
}

inline ComplexMatrix projector_of(std::initializer_list<Complex> v) {
    std::vector<Complex> a(v);
    return ComplexMatrix::outer(a, a);
}

}  // namespace vrd::test
