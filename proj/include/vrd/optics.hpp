#pragma once

// Jones-calculus model of the ququart and Werner-state optics.
//
// Waveplate angles are in degrees and give the fast axis relative to the
// vertical. States live on path (x) polarization with the ququart index
// 2 * path + polarization (see states.hpp).

#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vrd/channels.hpp"
#include "vrd/numcore.hpp"
#include "vrd/states.hpp"

namespace vrd::optics {

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// -[[cos 2t, sin 2t], [sin 2t, -cos 2t]]
inline ComplexMatrix hwp(double theta_deg) {
    const double c = std::cos(2.0 * deg_to_rad(theta_deg));
    const double s = std::sin(2.0 * deg_to_rad(theta_deg));
    return {{-c, -s}, {-s, c}};
}

/// (1/sqrt2) [[1 + i cos 2z, i sin 2z], [i sin 2z, 1 - i cos 2z]]
inline ComplexMatrix qwp(double zeta_deg) {
    const double c = std::cos(2.0 * deg_to_rad(zeta_deg));
    const double s = std::sin(2.0 * deg_to_rad(zeta_deg));
    const double r = 1.0 / std::sqrt(2.0);
    return {{r * Complex{1.0, c}, r * Complex{0.0, s}}, {r * Complex{0.0, s}, r * Complex{1.0, -c}}};
}

/// |H,v> -> |H,h>, |H,h> -> |H,v>; vertical polarization keeps its path.
inline ComplexMatrix beam_displacer() {
    using namespace ququart;
    ComplexMatrix m(4, 4);
    m(index(Polarization::H, Path::h), index(Polarization::H, Path::v)) = 1.0;
    m(index(Polarization::H, Path::v), index(Polarization::H, Path::h)) = 1.0;
    m(index(Polarization::V, Path::v), index(Polarization::V, Path::v)) = 1.0;
    m(index(Polarization::V, Path::h), index(Polarization::V, Path::h)) = 1.0;
    return m;
}

enum class PathSelector { v, h, both };

/// A polarization operator acting on one or both spatial modes.
inline ComplexMatrix on_path(const ComplexMatrix& pol_op, PathSelector path) {
    if (pol_op.rows() != 2 || pol_op.cols() != 2) throw std::invalid_argument("on_path: 2x2 operator expected");
    if (path == PathSelector::both) return tensor(ComplexMatrix::identity(2), pol_op);
    ComplexMatrix m = ComplexMatrix::identity(4);
    const std::size_t base = path == PathSelector::v ? 0 : 2;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m(base + i, base + j) = pol_op(i, j);
    return m;
}

/// How a half-wave plate set to exactly 0 degrees is modelled.
enum class ZeroAngle {
    literal,  // the matrix hwp(0) = diag(-1, 1)
    parked,   // removed from the beam (identity)
};

struct Waveplate {
    enum class Type { half, quarter };
    Type type;
    double angle_deg;
    PathSelector path = PathSelector::both;
    ZeroAngle zero = ZeroAngle::literal;

    ComplexMatrix matrix() const {
        if (type == Type::half && angle_deg == 0.0 && zero == ZeroAngle::parked) return ComplexMatrix::identity(4);
        return on_path(type == Type::half ? hwp(angle_deg) : qwp(angle_deg), path);
    }
};

struct BeamDisplacer {
    ComplexMatrix matrix() const { return beam_displacer(); }
};

/// Transmitted port of a polarizing beam splitter on both paths (not unitary).
struct PbsPort {
    ququart::Polarization transmitted = ququart::Polarization::H;

    ComplexMatrix matrix() const {
        ComplexMatrix p(2, 2);
        const auto i = static_cast<std::size_t>(transmitted);
        p(i, i) = 1.0;
        return on_path(p, PathSelector::both);
    }
};

using JonesElement = std::variant<Waveplate, BeamDisplacer, PbsPort>;

class OpticalPipeline {
public:
    OpticalPipeline() = default;
    explicit OpticalPipeline(std::vector<JonesElement> elements) : elements_(std::move(elements)) {}

    OpticalPipeline& then(JonesElement e) {
        elements_.push_back(std::move(e));
        return *this;
    }

    const std::vector<JonesElement>& elements() const noexcept { return elements_; }

    /// Product of element operators, first element applied first.
    ComplexMatrix compose() const {
        ComplexMatrix u = ComplexMatrix::identity(4);
        for (const auto& e : elements_) u = std::visit([](const auto& x) { return x.matrix(); }, e) * u;
        return u;
    }

    bool is_unitary(double tol = 1e-10) const {
        const ComplexMatrix u = compose();
        return (u.adjoint() * u).max_abs_diff(ComplexMatrix::identity(4)) <= tol;
    }

private:
    std::vector<JonesElement> elements_;
};

// ---------------------------------------------------------------------------
// Ququart preparation

/// One of the four preparation half-wave plates H1..H4 and where it sits.
struct HwpSlot {
    int slot;  // 1..4
    PathSelector path;
    ZeroAngle zero;

    bool operator==(const HwpSlot&) const = default;
};

struct DisplacerSlot {
    bool operator==(const DisplacerSlot&) const = default;
};

using LayoutItem = std::variant<HwpSlot, DisplacerSlot>;

struct PrepLayout {
    std::vector<LayoutItem> items;

    bool operator==(const PrepLayout&) const = default;

    /// Each of H1..H4 exactly once, exactly one beam displacer.
    void validate() const {
        std::array<int, 4> seen{};
        int displacers = 0;
        for (const auto& it : items) {
            if (std::holds_alternative<DisplacerSlot>(it)) {
                ++displacers;
                continue;
            }
            const auto& h = std::get<HwpSlot>(it);
            if (h.slot < 1 || h.slot > 4) throw std::invalid_argument("prep layout: HWP slot must be 1..4");
            ++seen[static_cast<std::size_t>(h.slot - 1)];
        }
        if (displacers != 1) throw std::invalid_argument("prep layout: exactly one beam displacer required");
        for (int c : seen)
            if (c != 1) throw std::invalid_argument("prep layout: each of H1..H4 must appear exactly once");
    }

    PrepLayout with_zero(int slot, ZeroAngle z) const {
        PrepLayout out = *this;
        for (auto& it : out.items)
            if (auto* h = std::get_if<HwpSlot>(&it); h && h->slot == slot) h->zero = z;
        return out;
    }

    PrepLayout with_all_zero(ZeroAngle z) const {
        PrepLayout out = *this;
        for (int s = 1; s <= 4; ++s) out = out.with_zero(s, z);
        return out;
    }
};

/// H1 on the input mode, the displacer, then H2 on v, H4 on both paths, H3 on h.
/// All plates literal; this ordering reproduces the most rows of the published angle table.
inline PrepLayout default_prep_layout() {
    return PrepLayout{{HwpSlot{1, PathSelector::v, ZeroAngle::literal}, DisplacerSlot{},
                       HwpSlot{2, PathSelector::v, ZeroAngle::literal}, HwpSlot{4, PathSelector::both, ZeroAngle::literal},
                       HwpSlot{3, PathSelector::h, ZeroAngle::literal}}};
}

using PrepAngles = std::array<double, 4>;

inline OpticalPipeline prep_pipeline(const PrepAngles& deg, const PrepLayout& layout) {
    layout.validate();
    OpticalPipeline p;
    for (const auto& it : layout.items) {
        if (std::holds_alternative<DisplacerSlot>(it)) {
            p.then(BeamDisplacer{});
        } else {
            const auto& h = std::get<HwpSlot>(it);
            p.then(Waveplate{Waveplate::Type::half, deg[static_cast<std::size_t>(h.slot - 1)], h.path, h.zero});
        }
    }
    return p;
}

/// Output of the preparation optics on (|H,v> + |V,v>)/sqrt2, global phase fixed.
inline PureState prepare_ququart(const PrepAngles& deg, const PrepLayout& layout = default_prep_layout()) {
    const ComplexMatrix u = prep_pipeline(deg, layout).compose();
    const PureState in = psi_plus_1();
    return PureState::normalized(u.apply(in.amplitudes()), ququart::kDims);
}

/// Ideal output Gamma_sign^k (|0> + |1>)/sqrt2 from the incoherent-unitary table.
inline PureState ideal_branch_state(int k, Sign sign) {
    const PureState in = psi_plus_1();
    return PureState::normalized(incoherent::unitary(k, sign).apply(in.amplitudes()), ququart::kDims);
}

struct AngleSetting {
    int k;
    Sign sign;
    PrepAngles deg;

    bool operator==(const AngleSetting&) const = default;
};

/// The published angle settings theta_sign^k.
inline std::vector<AngleSetting> default_angle_table() {
    return {
        {1, Sign::plus, {67.5, 0, 0, 22.5}},  {2, Sign::plus, {45, 45, 0, 0}},  {3, Sign::plus, {45, 45, 45, 0}},
        {4, Sign::plus, {45, 0, 0, 0}},       {5, Sign::plus, {45, 0, 45, 0}},  {6, Sign::plus, {22.5, 0, 22.5, 0}},
        {1, Sign::minus, {67.5, 0, 0, 67.5}}, {2, Sign::minus, {0, 45, 0, 0}},  {3, Sign::minus, {0, 45, 45, 0}},
        {4, Sign::minus, {0, 0, 0, 0}},       {5, Sign::minus, {0, 0, 45, 0}},  {6, Sign::minus, {22.5, 0, 67.5, 0}},
    };
}

inline constexpr double kPhaseFreeTol = 1e-9;

struct AngleRowCheck {
    AngleSetting setting;
    double overlap_layout;   // the layout as given
    double overlap_literal;  // every HWP literal
    double overlap_parked;   // every HWP parked at 0 degrees
    bool support_matches;    // |amplitudes| agree under the given layout: right basis pair, possibly wrong relative sign
    bool reproduced() const {
        return std::max({overlap_layout, overlap_literal, overlap_parked}) >= 1.0 - kPhaseFreeTol;
    }
};

/// Compares each angle row with its ideal branch state under the layout and both zero-angle models.
inline std::vector<AngleRowCheck> check_angle_table(const std::vector<AngleSetting>& table,
                                                    const PrepLayout& layout = default_prep_layout()) {
    std::vector<AngleRowCheck> out;
    const PrepLayout literal = layout.with_all_zero(ZeroAngle::literal);
    const PrepLayout parked = layout.with_all_zero(ZeroAngle::parked);
    for (const auto& row : table) {
        const PureState target = ideal_branch_state(row.k, row.sign);
        const PureState got = prepare_ququart(row.deg, layout);
        bool support = true;
        for (std::size_t i = 0; i < 4; ++i)
            if (std::abs(std::abs(got.amplitudes()[i]) - std::abs(target.amplitudes()[i])) > 1e-9) support = false;
        out.push_back({row, target.overlap(got), target.overlap(prepare_ququart(row.deg, literal)),
                       target.overlap(prepare_ququart(row.deg, parked)), support});
    }
    return out;
}

inline std::vector<double> default_angle_grid() { return {0.0, 22.5, -22.5, 45.0, 67.5, 90.0}; }

/// Exhaustive search over grid^4 for settings producing `target` up to global phase.
inline std::vector<PrepAngles> grid_search(const PureState& target, const PrepLayout& layout = default_prep_layout(),
                                           const std::vector<double>& grid = default_angle_grid()) {
    std::vector<PrepAngles> hits;
    for (double a : grid)
        for (double b : grid)
            for (double c : grid)
                for (double d : grid) {
                    const PrepAngles deg{a, b, c, d};
                    if (target.overlap(prepare_ququart(deg, layout)) >= 1.0 - kPhaseFreeTol) hits.push_back(deg);
                }
    return hits;
}

// ---------------------------------------------------------------------------
// Ququart measurement

/// Relative phase picked up by the half-wave plate that sits on path h only
/// while the path qubit is transferred onto polarization.
enum class PathPhase {
    compensated,  // interferometer phase calibrated so the plate acts as an ideal swap
    literal,      // plate keeps its global minus sign, flipping the h/v relative sign
};

struct MeasurementSetting {
    double theta1;  // polarization HWP
    double zeta1;   // polarization QWP
    double theta2;  // path HWP
    double zeta2;   // path QWP
};

/// Row vector r with acceptance amplitude r . psi for a ququart state psi.
///
/// Chain: HWP(theta1) then QWP(zeta1) on both paths; HWP@45 on path h; the
/// displacer recombines |H,v> and |V,h> into one mode (other components are
/// lost); HWP@45; HWP(theta2) then QWP(zeta2); PBS transmits H.
inline std::array<Complex, 4> measurement_bra(const MeasurementSetting& s, PathPhase phase = PathPhase::compensated) {
    using namespace ququart;
    const ComplexMatrix w1 = on_path(qwp(s.zeta1) * hwp(s.theta1), PathSelector::both);
    const ComplexMatrix flip_h = on_path(phase == PathPhase::literal ? hwp(45.0) : pauli::X(), PathSelector::h);
    ComplexMatrix combine(2, 4);
    combine(0, index(Polarization::H, Path::v)) = 1.0;
    combine(1, index(Polarization::V, Path::h)) = 1.0;
    const ComplexMatrix w2 = qwp(s.zeta2) * hwp(s.theta2) * hwp(45.0);
    const ComplexMatrix chain = w2 * combine * flip_h * w1;  // 2x4
    return {chain(0, 0), chain(0, 1), chain(0, 2), chain(0, 3)};
}

/// Rank-one effect r^dagger r realized by the chain.
inline ComplexMatrix measurement_projector(const MeasurementSetting& s, PathPhase phase = PathPhase::compensated) {
    const auto r = measurement_bra(s, phase);
    ComplexMatrix p(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) p(i, j) = std::conj(r[i]) * r[j];
    return p;
}

/// Waveplate angles (theta, zeta) projecting one qubit onto a Pauli eigenstate.
/// Outcome 0 is eigenvalue +1. For the path qubit |0> = |v>.
struct PauliAngles {
    double theta;
    double zeta;
};

/// Settings for |H>, |V>, (|H>+|V>)/sqrt2, (|H>+i|V>)/sqrt2 on polarization and
/// |h>, |v>, (|h>+|v>)/sqrt2, (|h>+i|v>)/sqrt2 on the path.
inline PauliAngles table_angles(int column) {
    switch (column) {
        case 0: return {0.0, 0.0};
        case 1: return {45.0, 0.0};
        case 2: return {22.5, 0.0};
        case 3: return {0.0, 45.0};
    }
    throw std::invalid_argument("table_angles: column must be 0..3");
}

// ---------------------------------------------------------------------------
// Werner preparation from attenuator transmittances

struct WernerPrepConfig {
    std::array<double, 4> t;
};

inline WernerPrepConfig transmittances_for_werner(double xi) {
    WernerParams{xi};
    return {{(1.0 - xi) / (2.0 + 2.0 * xi), (1.0 + 3.0 * xi) / (2.0 + 2.0 * xi), (1.0 - xi) / 2.0, (1.0 + xi) / 2.0}};
}

inline WernerPrepConfig transmittances_for_eta() { return {{1.0, 0.0, 2.0 / 3.0, 1.0 / 3.0}}; }

/// [t2 t4 Psi- + t1 t4 Psi+ + ((t1 + t2) t3 / 2)(HH + VV)] / [(t1 + t2)(t3 + t4)]
inline DensityOperator werner_from_transmittances(const WernerPrepConfig& cfg) {
    for (double x : cfg.t)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("werner_from_transmittances: transmittance outside [0, 1]");
    const auto [t1, t2, t3, t4] = cfg.t;
    const double norm = (t1 + t2) * (t3 + t4);
    if (!(norm > 0.0)) throw std::invalid_argument("werner_from_transmittances: all path weights vanish");
    ComplexMatrix m = (t2 * t4) * bell(BellLabel::PsiMinus).projector() + (t1 * t4) * bell(BellLabel::PsiPlus).projector() +
                      ((t1 + t2) * t3 / 2.0) * (basis_state(0, {2, 2}).projector() + basis_state(3, {2, 2}).projector());
    m *= Complex{1.0 / norm, 0.0};
    return DensityOperator(std::move(m), {2, 2});
}

// ---------------------------------------------------------------------------
// Plain-text layout / angle configuration
//
//   # comment
//   hwp slot=<1..4> path=<v|h|both> zero=<literal|parked>
//   bd
//   angles k=<1..6> sign=<+|-> deg=<a1>,<a2>,<a3>,<a4>
//
// Layout lines are taken in beam order.

struct OpticsConfig {
    PrepLayout layout;
    std::vector<AngleSetting> angles;
};

namespace detail {

inline PathSelector parse_path(const std::string& s) {
    if (s == "v") return PathSelector::v;
    if (s == "h") return PathSelector::h;
    if (s == "both") return PathSelector::both;
    throw std::invalid_argument("bad path '" + s + "'");
}

inline ZeroAngle parse_zero(const std::string& s) {
    if (s == "literal") return ZeroAngle::literal;
    if (s == "parked") return ZeroAngle::parked;
    throw std::invalid_argument("bad zero convention '" + s + "'");
}

}  // namespace detail

inline OpticsConfig parse_optics_config(std::istream& is) {
    OpticsConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        std::vector<std::pair<std::string, std::string>> kv;
        std::string tok;
        while (ls >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("optics config line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
            kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        auto get = [&](const std::string& key) -> std::string {
            for (const auto& [k, v] : kv)
                if (k == key) return v;
            throw std::invalid_argument("optics config line " + std::to_string(lineno) + ": missing key '" + key + "'");
        };
        try {
            if (kind == "bd") {
                cfg.layout.items.emplace_back(DisplacerSlot{});
            } else if (kind == "hwp") {
                const int slot = std::stoi(get("slot"));
                if (slot < 1 || slot > 4) throw std::invalid_argument("slot must be 1..4");
                cfg.layout.items.emplace_back(HwpSlot{slot, detail::parse_path(get("path")), detail::parse_zero(get("zero"))});
            } else if (kind == "angles") {
                AngleSetting a{std::stoi(get("k")), Sign::plus, {}};
                const std::string sign = get("sign");
                if (sign == "+") a.sign = Sign::plus;
                else if (sign == "-") a.sign = Sign::minus;
                else throw std::invalid_argument("bad sign '" + sign + "'");
                std::stringstream ds(get("deg"));
                std::string cell;
                std::size_t n = 0;
                while (std::getline(ds, cell, ',')) {
                    if (n >= 4) throw std::invalid_argument("more than four angles");
                    a.deg[n++] = std::stod(cell);
                }
                if (n != 4) throw std::invalid_argument("expected four angles");
                if (a.k < 1 || a.k > 6) throw std::invalid_argument("k must be 1..6");
                cfg.angles.push_back(a);
            } else {
                throw std::invalid_argument("unknown element kind '" + kind + "'");
            }
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            if (what.rfind("optics config", 0) == 0) throw;
            throw std::invalid_argument("optics config line " + std::to_string(lineno) + ": " + what);
        }
    }
    cfg.layout.validate();
    return cfg;
}

}  // namespace vrd::optics
