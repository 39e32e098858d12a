#pragma once

// Two-qubit Pauli tomography: sampled datasets, linear inversion, projection
// onto the physical set, and reconstruction of virtual (quasi-channel) states.
//
// A ququart is handled as path (subsystem 0) x polarization (subsystem 1),
// so the same nine product settings cover it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrd/channels.hpp"
#include "vrd/estimator.hpp"
#include "vrd/numcore.hpp"
#include "vrd/rng.hpp"

namespace vrd {

struct SettingRecord {
    PauliSetting setting;
    OutcomeCounts counts;
    std::uint64_t shots;
    std::uint64_t seed;
};

struct PauliDataset {
    std::vector<SettingRecord> rows;
};

/// The nine settings in the fixed order XX, XY, XZ, YX, ..., ZZ.
inline std::vector<PauliSetting> all_pauli_settings() {
    std::vector<PauliSetting> out;
    for (auto a : {PauliLabel::X, PauliLabel::Y, PauliLabel::Z})
        for (auto b : {PauliLabel::X, PauliLabel::Y, PauliLabel::Z}) out.emplace_back(a, b);
    return out;
}

inline std::string setting_label(PauliSetting s) { return {to_char(s.first), to_char(s.second)}; }

inline std::size_t setting_index(PauliSetting s) {
    return 3 * static_cast<std::size_t>(s.first) + static_cast<std::size_t>(s.second);
}

/// Pauli expectation table f[a][b] for a, b in {I, X, Y, Z}; f[0][0] = 1.
using PauliExpectations = std::array<std::array<double, 4>, 4>;

inline std::size_t pauli_slot(PauliLabel p) { return 1 + static_cast<std::size_t>(p); }

inline ComplexMatrix pauli_by_slot(std::size_t slot) { return pauli::from_label("IXYZ"[slot]); }

inline PauliExpectations exact_pauli_expectations(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("exact_pauli_expectations: state must be two-qubit");
    PauliExpectations f{};
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            const ComplexMatrix m = tensor(pauli_by_slot(a), pauli_by_slot(b));
            Complex s{0.0, 0.0};
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) s += rho(i, j) * m(j, i);
            f[a][b] = s.real();
        }
    f[0][0] = 1.0;
    return f;
}

namespace detail {

/// Signed tallies of one setting: sum of s_a s_b, s_a, s_b over shots (s = +-1).
struct SignedTally {
    std::int64_t corr = 0;
    std::int64_t first = 0;
    std::int64_t second = 0;
    std::uint64_t shots = 0;

    void add(const OutcomeCounts& c) {
        const auto pp = static_cast<std::int64_t>(c[0]), pm = static_cast<std::int64_t>(c[1]);
        const auto mp = static_cast<std::int64_t>(c[2]), mm = static_cast<std::int64_t>(c[3]);
        corr += pp - pm - mp + mm;
        first += pp + pm - mp - mm;
        second += pp - pm + mp - mm;
        shots += c[0] + c[1] + c[2] + c[3];
    }
};

/// Correlators from their own setting; single-qubit terms pooled over the three
/// settings that measure that Pauli on that qubit.
inline PauliExpectations expectations_from_tallies(const std::array<SignedTally, 9>& t, double scale) {
    PauliExpectations f{};
    f[0][0] = 1.0;
    std::array<double, 3> first_sum{}, second_sum{};
    std::array<double, 3> first_n{}, second_n{};
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            const auto& x = t[3 * a + b];
            if (x.shots == 0) throw std::invalid_argument("Pauli dataset: setting with zero shots");
            const double n = static_cast<double>(x.shots);
            f[a + 1][b + 1] = scale * static_cast<double>(x.corr) / n;
            first_sum[a] += static_cast<double>(x.first);
            first_n[a] += n;
            second_sum[b] += static_cast<double>(x.second);
            second_n[b] += n;
        }
    for (std::size_t a = 0; a < 3; ++a) {
        f[a + 1][0] = scale * first_sum[a] / first_n[a];
        f[0][a + 1] = scale * second_sum[a] / second_n[a];
    }
    return f;
}

}  // namespace detail

/// Derives the 15 nontrivial expectations; requires all nine settings.
inline PauliExpectations pauli_expectations(const PauliDataset& ds) {
    std::array<detail::SignedTally, 9> t{};
    std::array<bool, 9> seen{};
    for (const auto& r : ds.rows) {
        const std::uint64_t total = r.counts[0] + r.counts[1] + r.counts[2] + r.counts[3];
        if (total != r.shots) throw std::invalid_argument("Pauli dataset: counts do not sum to shots for " + setting_label(r.setting));
        const auto i = setting_index(r.setting);
        t[i].add(r.counts);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < 9; ++i)
        if (!seen[i])
            throw std::invalid_argument("Pauli dataset incomplete: missing setting " + setting_label(all_pauli_settings()[i]));
    return detail::expectations_from_tallies(t, 1.0);
}

/// (1/4) sum_v f_v M_v
inline ComplexMatrix linear_inversion(const PauliExpectations& f) {
    ComplexMatrix rho(4, 4);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) rho += (f[a][b] / 4.0) * tensor(pauli_by_slot(a), pauli_by_slot(b));
    return rho;
}

inline ComplexMatrix linear_inversion(const PauliDataset& ds) { return linear_inversion(pauli_expectations(ds)); }

/// Euclidean projection of a vector onto the probability simplex (sort-and-threshold).
inline std::vector<double> project_to_simplex(std::vector<double> v) {
    if (v.empty()) return v;
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>{});
    double cumsum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    for (auto& x : v) x = std::max(x - theta, 0.0);
    return v;
}

/// Frobenius-nearest unit-trace PSD matrix: keep eigenvectors, project the spectrum.
inline DensityOperator project_physical(const ComplexMatrix& m, Dims dims = {}) {
    if (!m.is_square()) throw std::invalid_argument("project_physical: matrix not square");
    const double asym = m.max_asymmetry();
    if (asym > kEigInputTol) {
        std::ostringstream os;
        os << "project_physical: input not Hermitian (max asymmetry " << asym << ")";
        throw std::invalid_argument(os.str());
    }
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > kEigInputTol)
        throw std::invalid_argument("project_physical: input trace is not 1");
    auto e = hermitian_eig(m);
    e.values = project_to_simplex(std::move(e.values));
    ComplexMatrix out = reconstruct(e);
    const std::size_t n = out.rows();
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = out(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (out(i, j) + std::conj(out(j, i)));
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    if (dims.empty()) dims = {n};
    return DensityOperator(std::move(out), std::move(dims));
}

/// Nine independently seeded product-Pauli settings on one state.
inline PauliDataset simulate_pauli_dataset(const DensityOperator& rho, std::uint64_t shots_per_setting, std::uint64_t seed) {
    if (shots_per_setting == 0) throw std::invalid_argument("simulate_pauli_dataset: shots must be positive");
    const CounterRng root(seed);
    PauliDataset ds;
    for (const auto& s : all_pauli_settings()) {
        const std::uint64_t sub = root.derive(setting_index(s)).seed();
        ds.rows.push_back({s, measure_pauli_setting(rho, s, shots_per_setting, sub), shots_per_setting, sub});
    }
    return ds;
}

struct TomographyResult {
    ComplexMatrix lin;
    DensityOperator physical;
};

inline TomographyResult state_tomography(const PauliDataset& ds, const Dims& dims) {
    ComplexMatrix lin = linear_inversion(ds);
    DensityOperator phys = project_physical(lin, dims);
    return {std::move(lin), std::move(phys)};
}

/// How shots of one setting are split between quasi-channel branches.
enum class BranchAllocation {
    per_shot,  // each shot draws its branch, signed average as in the Monte-Carlo estimator
    fixed,     // branch b receives round(p_b N) shots, branch estimates weighted by p_b
};

/// Reconstruction of C sum_b sign_b p_b Gamma_b(rho) from simulated Pauli data,
/// followed by projection onto the physical set.
inline TomographyResult virtual_tomography(const QuasiChannel& qc, const DensityOperator& rho,
                                           std::uint64_t shots_per_setting, std::uint64_t seed,
                                           BranchAllocation allocation = BranchAllocation::per_shot) {
    if (shots_per_setting == 0) throw std::invalid_argument("virtual_tomography: shots must be positive");
    if (rho.dim() != qc.input_dim() || qc.output_dim() != 4)
        throw std::invalid_argument("virtual_tomography: two-qubit output required");
    const Dims out_dims = qc.branches().front().channel.apply(rho).dims();

    const auto& branches = qc.branches();
    std::vector<ComplexMatrix> states;
    for (const auto& b : branches) states.push_back(b.channel.apply_linear(rho.matrix()));

    const CounterRng root(seed);
    ComplexMatrix lin(4, 4);

    if (allocation == BranchAllocation::per_shot) {
        std::vector<double> w;
        for (const auto& b : branches) w.push_back(b.probability);
        const auto branch_cdf = detail::cumulative(w);
        std::array<detail::SignedTally, 9> tally{};
        for (const auto& s : all_pauli_settings()) {
            std::vector<std::vector<double>> outcome_cdf;
            for (const auto& st : states) {
                const auto p = pauli_setting_probabilities(st, s);
                outcome_cdf.push_back(detail::cumulative(std::vector<double>(p.begin(), p.end())));
            }
            const CounterRng rng = root.derive(setting_index(s));
            std::array<OutcomeCounts, 2> by_sign{};  // [0] positive branches, [1] negative
            for (std::uint64_t shot = 0; shot < shots_per_setting; ++shot) {
                const auto b = detail::sample_index(branch_cdf, rng.uniform(shot, 0));
                const auto k = detail::sample_index(outcome_cdf[b], rng.uniform(shot, 1));
                ++by_sign[branches[b].sign == Sign::plus ? 0 : 1][k];
            }
            detail::SignedTally pos, neg;
            pos.add(by_sign[0]);
            neg.add(by_sign[1]);
            auto& t = tally[setting_index(s)];
            t.corr = pos.corr - neg.corr;
            t.first = pos.first - neg.first;
            t.second = pos.second - neg.second;
            t.shots = shots_per_setting;
        }
        lin = linear_inversion(detail::expectations_from_tallies(tally, qc.cost()));
    } else {
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const double p = branches[b].probability;
            if (p == 0.0) continue;
            const auto n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(p * static_cast<double>(shots_per_setting))));
            const DensityOperator branch_state(states[b], out_dims);
            const auto ds = simulate_pauli_dataset(branch_state, n, root.derive(1000 + b).seed());
            lin += (qc.cost() * to_double(branches[b].sign) * p) * linear_inversion(ds);
        }
    }
    DensityOperator phys = project_physical(lin, out_dims);
    return {std::move(lin), std::move(phys)};
}

/// Infinite-shot limit: branch states reconstructed from exact expectations.
inline TomographyResult virtual_tomography_exact(const QuasiChannel& qc, const DensityOperator& rho) {
    if (rho.dim() != qc.input_dim() || qc.output_dim() != 4)
        throw std::invalid_argument("virtual_tomography: two-qubit output required");
    const Dims out_dims = qc.branches().front().channel.apply(rho).dims();
    ComplexMatrix lin(4, 4);
    for (const auto& b : qc.branches()) {
        if (b.probability == 0.0) continue;
        lin += (qc.cost() * to_double(b.sign) * b.probability) *
               linear_inversion(exact_pauli_expectations(b.channel.apply_linear(rho.matrix())));
    }
    DensityOperator phys = project_physical(lin, out_dims);
    return {std::move(lin), std::move(phys)};
}

// CSV layout: one row per setting.
//   setting,n_pp,n_pm,n_mp,n_mm,shots,seed
// `setting` is two Pauli letters (subsystem 0 first); n_pm counts outcome
// +1 on subsystem 0 and -1 on subsystem 1.
inline constexpr const char* kDatasetCsvHeader = "setting,n_pp,n_pm,n_mp,n_mm,shots,seed";

inline void write_dataset_csv(std::ostream& os, const PauliDataset& ds) {
    os << kDatasetCsvHeader << '\n';
    for (const auto& r : ds.rows)
        os << setting_label(r.setting) << ',' << r.counts[0] << ',' << r.counts[1] << ',' << r.counts[2] << ','
           << r.counts[3] << ',' << r.shots << ',' << r.seed << '\n';
}

inline PauliDataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("dataset CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDatasetCsvHeader) throw std::invalid_argument("dataset CSV: unexpected header '" + line + "'");
    PauliDataset ds;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 7 || f[0].size() != 2)
            throw std::invalid_argument("dataset CSV: malformed row at line " + std::to_string(lineno));
        SettingRecord r{{parse_pauli(f[0][0]), parse_pauli(f[0][1])}, {}, 0, 0};
        try {
            for (std::size_t k = 0; k < 4; ++k) r.counts[k] = std::stoull(f[k + 1]);
            r.shots = std::stoull(f[5]);
            r.seed = std::stoull(f[6]);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("dataset CSV: bad number at line " + std::to_string(lineno));
        }
        if (r.counts[0] + r.counts[1] + r.counts[2] + r.counts[3] != r.shots)
            throw std::invalid_argument("dataset CSV: counts do not sum to shots at line " + std::to_string(lineno));
        ds.rows.push_back(r);
    }
    return ds;
}

}  // namespace vrd
